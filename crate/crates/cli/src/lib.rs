//! `icirc`: command-line front end for `implicit-circuits`.
//!
//! Exit status 0 on success or a certified/positive verdict, 1 when the
//! analysis answers "no" (degenerate solution, refuted hypothesis, not
//! associates), 2 on bad input.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use implicit_circuits::analysis::{
    self, char_poly, char_poly_memristive, kirchhoff_poly, nondegeneracy_sum, pencil_oracle, proportionality,
    to_f64, AnalysisError, CharPoly, Mode, Residuals, RESIDUAL_TOL,
};
use implicit_circuits::bifurcation::{check_bifurcation, eigen_exchange_probe, BifurcationReport, Check, Overall, ProbeRow};
use implicit_circuits::expr::{parse_expr_with, Bindings};
use implicit_circuits::graph::spanning_trees;
use implicit_circuits::netlist::{parse_netlist, BranchKind, Circuit, ParamValue};
use implicit_circuits::operating_point::OperatingPoint;
use implicit_circuits::poly::{Control, DehomChoice, MultiPoly};
use implicit_circuits::projective::{AssociatesReport, PlanePair, GAMMA_TOL};
use implicit_circuits::Rational;

#[derive(Debug, Parser)]
#[command(name = "icirc", version, about = "Tree-sum analysis of circuits with implicit device characteristics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Tolerance: residual bound for operating points, γ threshold for
    /// `associates`.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a netlist and print the circuit.
    Parse { netlist: PathBuf },
    /// List the spanning trees.
    Trees { netlist: PathBuf },
    /// Multihomogeneous Kirchhoff polynomial.
    Kirchhoff {
        netlist: PathBuf,
        #[arg(long)]
        dehom: Option<String>,
    },
    /// Characteristic polynomial, symbolic or at an operating point.
    Charpoly(CharpolyArgs),
    /// Residuals of an operating point and, for resistive circuits, the
    /// nondegeneracy sum.
    CheckSolution {
        netlist: PathBuf,
        #[arg(long)]
        at: PathBuf,
    },
    /// Hypotheses of the stationary bifurcation test at the origin.
    CheckBifurcation {
        netlist: PathBuf,
        #[arg(long)]
        branch: String,
        #[arg(long)]
        mu: String,
        /// Comma-separated parameter values for the stability probe.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        probe: Option<Vec<f64>>,
    },
    /// Whether two submersions of the plane share their zero set.
    Associates(AssociatesArgs),
}

#[derive(Debug, Args)]
pub struct CharpolyArgs {
    netlist: PathBuf,
    #[arg(long, conflicts_with = "at")]
    symbolic: bool,
    /// Operating-point file.
    #[arg(long)]
    at: Option<PathBuf>,
    /// Dehomogenization, e.g. `R1=current,M1=voltage`.
    #[arg(long, conflicts_with = "at")]
    dehom: Option<String>,
}

#[derive(Debug, Args)]
pub struct AssociatesArgs {
    #[arg(long, allow_hyphen_values = true)]
    f1: String,
    #[arg(long, allow_hyphen_values = true)]
    f2: String,
    /// `a,b,c,d` for the rectangle `[a, b] × [c, d]`.
    #[arg(long, allow_hyphen_values = true)]
    domain: String,
    #[arg(long, default_value_t = 64)]
    grid: usize,
    /// Plane variables.
    #[arg(long, default_value = "i,v")]
    vars: String,
    /// Parameter values, `name=value`.
    #[arg(long = "param")]
    params: Vec<String>,
}

/// Input error: exit status 2.
#[derive(Debug)]
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

/// Result of a command: text and machine forms plus the verdict.
struct Outcome {
    text: String,
    machine: Value,
    ok: bool,
}

/// Runs one invocation; `argv[0]` is the program name.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { out.write_all(rendered.as_bytes()) } else { err.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    match execute(&cli) {
        Ok(o) => {
            let written = match cli.format {
                Format::Text => out.write_all(o.text.as_bytes()),
                Format::Machine => writeln!(out, "{}", serde_json::to_string_pretty(&o.machine).expect("serializable")),
            };
            if written.is_err() {
                return 2;
            }
            if o.ok {
                0
            } else {
                1
            }
        }
        Err(InputError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn execute(cli: &Cli) -> Result<Outcome, InputError> {
    match &cli.command {
        Command::Parse { netlist } => cmd_parse(&load(netlist)?),
        Command::Trees { netlist } => cmd_trees(&load(netlist)?),
        Command::Kirchhoff { netlist, dehom } => cmd_kirchhoff(&load(netlist)?, dehom.as_deref()),
        Command::Charpoly(a) => cmd_charpoly(cli, a),
        Command::CheckSolution { netlist, at } => {
            let c = load(netlist)?;
            let op = load_op(at, &c)?;
            cmd_check_solution(&c, &op, cli.tol.unwrap_or(RESIDUAL_TOL))
        }
        Command::CheckBifurcation { netlist, branch, mu, probe } => {
            cmd_check_bifurcation(&load(netlist)?, branch, mu, probe.as_deref())
        }
        Command::Associates(a) => cmd_associates(a, cli.tol.unwrap_or(GAMMA_TOL)),
    }
}

fn read(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Circuit, InputError> {
    parse_netlist(&read(path)?).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn load_op(path: &Path, c: &Circuit) -> Result<OperatingPoint, InputError> {
    OperatingPoint::parse(&read(path)?, c).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn rational_string(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Polynomial terms as exponent-map/coefficient records, canonical order.
pub fn poly_json(p: &MultiPoly) -> Value {
    let terms: Vec<Value> = p
        .sorted_terms()
        .into_iter()
        .map(|(m, c)| {
            let exps: Map<String, Value> = m.powers().map(|(s, k)| (s.to_string(), json!(k))).collect();
            json!({ "exponents": exps, "coefficient": rational_string(c), "value": to_f64(c) })
        })
        .collect();
    json!({ "text": p.to_string(), "terms": terms })
}

fn kind_name(k: BranchKind) -> &'static str {
    match k {
        BranchKind::Resistor => "resistor",
        BranchKind::Capacitor => "capacitor",
        BranchKind::Inductor => "inductor",
        BranchKind::Memristor => "memristor",
        BranchKind::VoltageSource => "vsource",
        BranchKind::CurrentSource => "isource",
    }
}

fn cmd_parse(c: &Circuit) -> Result<Outcome, InputError> {
    let mut text = format!("{} nodes, {} branches\n", c.node_count(), c.branch_count());
    let mut branches = Vec::new();
    for b in c.branches() {
        let expr = b.expr.as_ref().map(|e| e.to_string());
        let _ = writeln!(
            text,
            "  {:<6} {:<9} {} -> {}  {}",
            b.name,
            kind_name(b.kind),
            c.nodes()[b.tail],
            c.nodes()[b.head],
            expr.as_deref().map(|e| format!("{}={e}", b.kind.key())).unwrap_or_default()
        );
        branches.push(json!({
            "name": b.name,
            "kind": kind_name(b.kind),
            "tail": c.nodes()[b.tail],
            "head": c.nodes()[b.head],
            "expr": expr,
        }));
    }
    let mut params = Map::new();
    for (name, v) in c.params() {
        let value = match v {
            ParamValue::Value(x) => json!(x),
            ParamValue::Symbolic => json!("sym"),
        };
        let _ = writeln!(text, "  .param {name}={}", value.as_str().map(str::to_string).unwrap_or(value.to_string()));
        params.insert(name.clone(), value);
    }
    Ok(Outcome {
        text,
        machine: json!({ "nodes": c.nodes(), "branches": branches, "params": params }),
        ok: true,
    })
}

fn cmd_trees(c: &Circuit) -> Result<Outcome, InputError> {
    let trees = spanning_trees(c);
    let sets: Vec<Vec<&str>> =
        trees.iter().map(|t| t.twigs().iter().map(|&j| c.branch(j).name.as_str()).collect()).collect();
    let mut text = format!("{} spanning trees\n", trees.len());
    for s in &sets {
        let _ = writeln!(text, "  {{{}}}", s.join(", "));
    }
    Ok(Outcome { text, machine: json!({ "count": trees.len(), "trees": sets }), ok: true })
}

fn parse_dehom(c: &Circuit, spec: &str) -> Result<Vec<DehomChoice>, InputError> {
    spec.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|item| {
            let (name, control) = item
                .split_once('=')
                .ok_or_else(|| InputError(format!("--dehom: expected `branch=current|voltage`, got `{item}`")))?;
            let name = name.trim();
            let j = c.branch_index(name).ok_or_else(|| InputError(format!("--dehom: no branch named `{name}`")))?;
            let kind = c.branch(j).kind;
            if !matches!(kind, BranchKind::Resistor | BranchKind::Memristor) {
                return Err(InputError(format!("--dehom: `{name}` is a {kind}, not a resistor or memristor")));
            }
            let control = match control.trim() {
                "current" => Control::Current,
                "voltage" => Control::Voltage,
                other => return Err(InputError(format!("--dehom: unknown control `{other}` for `{name}`"))),
            };
            Ok(DehomChoice::new(name, control, kind == BranchKind::Memristor))
        })
        .collect()
}

fn dehomogenize(c: &Circuit, p: MultiPoly, spec: Option<&str>) -> Result<MultiPoly, InputError> {
    match spec {
        None => Ok(p),
        Some(s) => Ok(p.dehomogenize(&parse_dehom(c, s)?)?),
    }
}

fn cmd_kirchhoff(c: &Circuit, dehom: Option<&str>) -> Result<Outcome, InputError> {
    let p = dehomogenize(c, kirchhoff_poly(c), dehom)?;
    Ok(Outcome { text: format!("{p}\n"), machine: json!({ "polynomial": poly_json(&p) }), ok: true })
}

fn compute_charpoly(c: &Circuit, op: Option<&OperatingPoint>, tol: f64) -> Result<CharPoly, AnalysisError> {
    if c.count(BranchKind::Memristor) > 0 {
        char_poly_memristive(c, op, tol)
    } else {
        char_poly(c, op, tol)
    }
}

fn cmd_charpoly(cli: &Cli, a: &CharpolyArgs) -> Result<Outcome, InputError> {
    let c = load(&a.netlist)?;
    let tol = cli.tol.unwrap_or(RESIDUAL_TOL);
    let op = a.at.as_ref().map(|p| load_op(p, &c)).transpose()?;
    let cp = compute_charpoly(&c, op.as_ref(), tol)?;
    let note = "up to a nonvanishing factor";
    match cp.mode {
        Mode::Symbolic => {
            let p = dehomogenize(&c, cp.poly, a.dehom.as_deref())?;
            let mut text = format!("{p}\n");
            if cp.memristors > 0 {
                let _ = writeln!(text, "# includes lambda^{} from {} memristor(s)", cp.memristors, cp.memristors);
            }
            let _ = writeln!(text, "# {note}");
            Ok(Outcome {
                text,
                machine: json!({ "mode": "symbolic", "polynomial": poly_json(&p), "memristors": cp.memristors, "scale": note }),
                ok: true,
            })
        }
        Mode::Numeric => {
            let op = op.expect("numeric mode has an operating point");
            let coeffs = cp.coefficients_f64().expect("numeric coefficients");
            let pencil: Vec<f64> = pencil_oracle(&c, &op, tol)?.iter().map(to_f64).collect();
            let prop = proportionality(&coeffs, &pencil);
            let mut text = String::new();
            for (k, x) in coeffs.iter().enumerate().rev() {
                let _ = writeln!(text, "lambda^{k}: {x}");
            }
            let _ = writeln!(text, "pencil determinant ratio {} (max relative deviation {:e})", prop.ratio, prop.deviation);
            let _ = writeln!(text, "# {note}");
            Ok(Outcome {
                text,
                machine: json!({
                    "mode": "numeric",
                    "polynomial": poly_json(&cp.poly),
                    "coefficients": coeffs,
                    "pencil": pencil,
                    "ratio": prop.ratio,
                    "deviation": prop.deviation,
                    "memristors": cp.memristors,
                    "scale": note,
                }),
                ok: true,
            })
        }
    }
}

fn residuals_json(r: &Residuals) -> Value {
    Value::Array(r.entries.iter().map(|e| json!({ "label": e.label, "value": e.value })).collect())
}

fn cmd_check_solution(c: &Circuit, op: &OperatingPoint, tol: f64) -> Result<Outcome, InputError> {
    let r = analysis::residuals(c, op)?;
    if r.exceeding(tol).next().is_some() {
        return Err(InputError(format!("operating point rejected (tolerance {tol:e}), max residual {:e}:\n{r}", r.max_abs())));
    }
    let mut text = format!("residuals within {tol:e} (max {:e})\n", r.max_abs());
    let mut machine = json!({ "residuals": residuals_json(&r), "max_residual": r.max_abs(), "tol": tol });
    let dynamic = c.branches().iter().any(|b| !matches!(b.kind, BranchKind::Resistor) && !b.kind.is_source());
    if dynamic {
        text.push_str("nondegeneracy sum not evaluated: circuit has reactive elements or memristors\n");
        machine["nondegenerate"] = Value::Null;
        return Ok(Outcome { text, machine, ok: true });
    }
    let nd = nondegeneracy_sum(c, op, tol)?;
    let _ = writeln!(
        text,
        "nondegeneracy sum {} -> {}",
        rational_string(&nd.sum),
        if nd.nondegenerate { "nondegenerate" } else { "degenerate" }
    );
    machine["nondegeneracy_sum"] = json!(rational_string(&nd.sum));
    machine["nondegeneracy_value"] = json!(to_f64(&nd.sum));
    machine["nondegenerate"] = json!(nd.nondegenerate);
    Ok(Outcome { text, machine, ok: nd.nondegenerate })
}

fn check_json(c: &Check) -> Value {
    json!({ "passed": c.passed, "witness": c.witness, "detail": c.detail })
}

fn check_line(name: &str, c: &Check) -> String {
    let status = if c.passed { "pass" } else { "FAIL" };
    let witness = if c.witness.is_empty() { String::new() } else { format!(" [witness: {}]", c.witness.join(", ")) };
    format!("  {name:<14} {status}  {}{witness}\n", c.detail)
}

fn probe_json(rows: &[ProbeRow]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| {
                json!({
                    "mu": r.mu,
                    "branch_voltage": r.branch_voltage,
                    "coefficients": r.coefficients,
                    "constant_term": rational_string(&r.constant_term),
                    "nearest_real_root": r.nearest_real_root,
                    "sign": r.sign,
                })
            })
            .collect(),
    )
}

fn bifurcation_text(r: &BifurcationReport) -> String {
    let mut text = format!("bifurcation test for {} with parameter {}\n", r.branch, r.mu);
    for (name, chk) in r.hypotheses() {
        text.push_str(&check_line(name, chk));
    }
    text.push_str(&check_line("condition (i)", &r.condition_i));
    text.push_str(&check_line("condition (ii)", &r.condition_ii));
    let _ = writeln!(text, "  independent term: {}", r.independent_term);
    match r.k {
        Some(k) => {
            let _ = writeln!(text, "  k = {k}, linearity residual {:e}", r.linearity_residual);
        }
        None => text.push_str("  k: none\n"),
    }
    let _ = writeln!(text, "  lambda coefficient at {} = 0: {}", r.mu, r.lambda1_at_zero);
    let _ = writeln!(text, "  independent-term summands share a sign: {}", r.independent_term_same_sign);
    let _ = writeln!(text, "overall: {}", r.overall);
    if r.overall != Overall::Certified {
        text.push_str("note: the test is sufficient only; a failure does not rule out a bifurcation\n");
    }
    text
}

fn cmd_check_bifurcation(c: &Circuit, branch: &str, mu: &str, probe: Option<&[f64]>) -> Result<Outcome, InputError> {
    let r = check_bifurcation(c, branch, mu)?;
    let mut text = bifurcation_text(&r);
    let hyps: Map<String, Value> = r.hypotheses().iter().map(|(n, chk)| (n.to_string(), check_json(chk))).collect();
    let mut machine = json!({
        "branch": r.branch,
        "mu": r.mu,
        "hypotheses": hyps,
        "condition_i": check_json(&r.condition_i),
        "condition_ii": check_json(&r.condition_ii),
        "proper_tree_sum": r.proper_tree_sum,
        "independent_term": poly_json(&r.independent_term),
        "k": r.k,
        "linearity_residual": r.linearity_residual,
        "lambda1_at_zero": r.lambda1_at_zero,
        "independent_term_same_sign": r.independent_term_same_sign,
        "overall": r.overall.to_string(),
    });
    if let Some(values) = probe {
        let rows = eigen_exchange_probe(c, branch, mu, values)?;
        text.push_str("stability probe:\n");
        for row in &rows {
            let root = row.nearest_real_root.map(|x| format!("{x:e}")).unwrap_or_else(|| "none".into());
            let _ = writeln!(
                text,
                "  {mu} = {:<8} v({branch}) = {:<12.6e} nearest real root {root} (sign {}), constant term {:e}",
                row.mu,
                row.branch_voltage,
                match row.sign {
                    0 => "0",
                    s if s > 0 => "+",
                    _ => "-",
                },
                to_f64(&row.constant_term)
            );
        }
        machine["probe"] = probe_json(&rows);
    }
    Ok(Outcome { text, machine, ok: r.overall == Overall::Certified })
}

fn parse_list(s: &str, what: &str, n: usize) -> Result<Vec<String>, InputError> {
    let items: Vec<String> = s.split(',').map(|x| x.trim().to_string()).collect();
    if items.len() != n || items.iter().any(String::is_empty) {
        return Err(InputError(format!("--{what}: expected {n} comma-separated values, got `{s}`")));
    }
    Ok(items)
}

fn cmd_associates(a: &AssociatesArgs, tol: f64) -> Result<Outcome, InputError> {
    let vars = parse_list(&a.vars, "vars", 2)?;
    let var_refs = [vars[0].as_str(), vars[1].as_str()];
    let f1 = parse_expr_with(&a.f1, &var_refs).map_err(|e| InputError(format!("--f1: {e}")))?;
    let f2 = parse_expr_with(&a.f2, &var_refs).map_err(|e| InputError(format!("--f2: {e}")))?;
    let mut domain = [0.0; 4];
    for (slot, s) in domain.iter_mut().zip(parse_list(&a.domain, "domain", 4)?) {
        *slot = s.parse().map_err(|_| InputError(format!("--domain: `{s}` is not a number")))?;
    }
    let mut params = Bindings::new();
    for p in &a.params {
        let (name, value) =
            p.split_once('=').ok_or_else(|| InputError(format!("--param: expected `name=value`, got `{p}`")))?;
        let value: f64 = value.parse().map_err(|_| InputError(format!("--param: `{value}` is not a number")))?;
        params.set(name.trim(), value);
    }
    let pair = PlanePair { f1: &f1, f2: &f2, vars: var_refs, params: &params };
    let r = pair.check_associates(domain, a.grid, tol)?;
    Ok(Outcome { text: associates_text(&r, tol), machine: associates_json(&r, tol), ok: r.associates })
}

fn associates_text(r: &AssociatesReport, tol: f64) -> String {
    let mut text = format!("associates: {}\n", r.associates);
    let _ = writeln!(text, "  samples {}, zero-set points {}", r.samples, r.zero_points);
    let _ = writeln!(
        text,
        "  gamma range [{}, {}], min |gamma| {} (threshold {tol:e}), consistent sign: {}",
        r.gamma_range.0, r.gamma_range.1, r.gamma_min_abs, r.gamma_sign_consistent
    );
    let _ = writeln!(text, "  zero-set mismatches: {}", r.zero_set_mismatches.len());
    for m in r.zero_set_mismatches.iter().take(5) {
        let _ = writeln!(text, "    ({}, {}) -> ({}, {})", m.from[0], m.from[1], m.to[0], m.to[1]);
    }
    text
}

fn associates_json(r: &AssociatesReport, tol: f64) -> Value {
    let mismatches: Vec<Value> =
        r.zero_set_mismatches.iter().map(|m| json!({ "from": m.from, "to": m.to })).collect();
    json!({
        "associates": r.associates,
        "gamma_min_abs": r.gamma_min_abs,
        "gamma_range": [r.gamma_range.0, r.gamma_range.1],
        "gamma_sign_consistent": r.gamma_sign_consistent,
        "zero_points": r.zero_points,
        "samples": r.samples,
        "tol": tol,
        "zero_set_mismatches": mismatches,
    })
}
