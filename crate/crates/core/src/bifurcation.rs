//! Sufficient conditions for a simple stationary bifurcation at the origin
//! of a circuit whose bifurcating resistor reads `f = i − g(v, μ)`, plus an
//! empirical probe of the exchange of stability between the two
//! equilibrium branches.
//!
//! The bifurcating characteristic must be in normal form: `g(0, μ) = 0`,
//! `∂g/∂v(0, 0) = 0` and `∂²g/∂v∂μ(0, 0) = 1`, so that `μ` is the
//! incremental conductance at the origin.

use std::fmt;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::analysis::{self, exact, linearize, to_f64, tree_sum, tree_sum_rational, AnalysisError, DeviceLin};
use crate::expr::{Bindings, EvalError};
use crate::graph::{homogeneous_cutset, homogeneous_loop, loop_avoiding, spanning_trees, trees_with, SpanningTree};
use crate::linalg::roots;
use crate::netlist::{BranchKind, Circuit, ParamValue};
use crate::operating_point::OperatingPoint;
use crate::poly::{Monomial, MultiPoly, PolySymbol};
use crate::projective::is_strictly_locally_passive;
use crate::Rational;

const NORMAL_FORM_TOL: f64 = 1e-10;
const MU_SAMPLES: [f64; 5] = [-1.0, -0.1, 0.0, 0.1, 1.0];
const LINEARITY_SAMPLES: [f64; 4] = [-0.1, -0.01, 0.01, 0.1];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BifurcationError {
    #[error("no branch named `{0}`")]
    UnknownBranch(String),
    #[error("branch `{branch}` is a {kind}, expected a resistor")]
    NotAResistor { branch: String, kind: BranchKind },
    #[error("parameter `{0}` is not declared")]
    UnknownParameter(String),
    #[error("branch `{branch}` is a memristor; the bifurcation test covers RLC circuits only")]
    Memristor { branch: String },
    #[error("branch `{branch}` is not in normal form f = i - g(v, {mu}): {detail}")]
    NormalForm { branch: String, mu: String, detail: String },
    #[error("branch `{branch}`: {source}")]
    Eval { branch: String, source: EvalError },
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

/// Outcome of one hypothesis; failures name the branches responsible.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub passed: bool,
    pub witness: Vec<String>,
    pub detail: String,
}

impl Check {
    fn pass(detail: impl Into<String>) -> Self {
        Check { passed: true, witness: Vec::new(), detail: detail.into() }
    }

    fn fail(witness: Vec<String>, detail: impl Into<String>) -> Self {
        Check { passed: false, witness, detail: detail.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Overall {
    Certified,
    /// Some hypothesis fails. The test is only sufficient, so this does
    /// not rule out a bifurcation.
    RefutedWithWitness,
    /// Hypotheses hold but a derived eigenvalue condition does not.
    Inconclusive,
}

impl fmt::Display for Overall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Overall::Certified => "certified",
            Overall::RefutedWithWitness => "refuted-with-witness",
            Overall::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BifurcationReport {
    pub branch: String,
    pub mu: String,
    /// No loop or cutset made of one kind of reactive element only.
    pub t1: Check,
    /// The bifurcating branch forms a cutset with capacitors.
    pub t2: Check,
    /// Every resistor characteristic meets the origin.
    pub d1: Check,
    /// Strict local passivity of the other devices; positive `C`, `L`.
    pub d2: Check,
    /// Nonvanishing proper-tree sum.
    pub d3: Check,
    pub proper_tree_sum: f64,
    /// `λ⁰` coefficient as a polynomial in `μ`.
    pub independent_term: MultiPoly,
    /// `k` in `λ⁰ = k·μ`.
    pub k: Option<f64>,
    /// Largest `|c₀(μ) − k·μ|` over small sampled `μ`, with `c₀` from the
    /// exact linearization.
    pub linearity_residual: f64,
    pub lambda1_at_zero: f64,
    /// Nonzero terms of the `λ⁰` tree sum share one sign.
    pub independent_term_same_sign: bool,
    pub condition_i: Check,
    pub condition_ii: Check,
    pub overall: Overall,
}

impl BifurcationReport {
    pub fn hypotheses(&self) -> [(&'static str, &Check); 5] {
        [("T1", &self.t1), ("T2", &self.t2), ("D1", &self.d1), ("D2", &self.d2), ("D3", &self.d3)]
    }
}

fn names(c: &Circuit, idx: &[usize]) -> Vec<String> {
    idx.iter().map(|&j| c.branch(j).name.clone()).collect()
}

fn origin_point(c: &Circuit) -> OperatingPoint {
    OperatingPoint::zeros(c.branch_count())
}

struct Prepared {
    bif: usize,
    /// Sources converted, `μ = 0`.
    at_zero: Circuit,
    f_i: f64,
    f_v_mu: f64,
}

fn prepare(c: &Circuit, branch: &str, mu: &str) -> Result<Prepared, BifurcationError> {
    let bif = c.branch_index(branch).ok_or_else(|| BifurcationError::UnknownBranch(branch.to_string()))?;
    let b = c.branch(bif);
    if b.kind != BranchKind::Resistor {
        return Err(BifurcationError::NotAResistor { branch: b.name.clone(), kind: b.kind });
    }
    if let Some(m) = c.branches().iter().find(|b| b.kind == BranchKind::Memristor) {
        return Err(BifurcationError::Memristor { branch: m.name.clone() });
    }
    if !c.params().contains_key(mu) {
        return Err(BifurcationError::UnknownParameter(mu.to_string()));
    }
    let f = b.expr.clone().ok_or(AnalysisError::MissingExpression { branch: b.name.clone(), key: "f" })?;
    let normal = |detail: String| BifurcationError::NormalForm { branch: b.name.clone(), mu: mu.to_string(), detail };
    let eval_err = |source| BifurcationError::Eval { branch: b.name.clone(), source };
    let at = |m: f64| -> Bindings {
        let mut x = c.bindings();
        x.set(mu, m);
        x.with("i", 0.0).with("v", 0.0)
    };
    for m in MU_SAMPLES {
        let value = f.eval(&at(m)).map_err(eval_err)?;
        if value.abs() > NORMAL_FORM_TOL {
            return Err(normal(format!("f(0, 0) = {value} at {mu} = {m}")));
        }
    }
    let f_i = f.diff("i").eval(&at(0.0)).map_err(eval_err)?;
    let f_v = f.diff("v").eval(&at(0.0)).map_err(eval_err)?;
    let f_v_mu = f.diff("v").diff(mu).eval(&at(0.0)).map_err(eval_err)?;
    if (f_i - 1.0).abs() > NORMAL_FORM_TOL {
        return Err(normal(format!("df/di = {f_i} at the origin, expected 1")));
    }
    if f_v.abs() > NORMAL_FORM_TOL {
        return Err(normal(format!("df/dv = {f_v} at the origin for {mu} = 0, expected 0")));
    }
    if (f_v_mu + 1.0).abs() > NORMAL_FORM_TOL {
        return Err(normal(format!("d2f/dv d{mu} = {f_v_mu} at the origin, expected -1")));
    }
    let at_zero = c.with_param(mu, ParamValue::Value(0.0)).sources_as_submersions();
    Ok(Prepared { bif, at_zero, f_i, f_v_mu })
}

/// Checks the topological (T1, T2) and device (D1, D2, D3) hypotheses and
/// the two eigenvalue conditions at the origin.
pub fn check_bifurcation(c: &Circuit, branch: &str, mu: &str) -> Result<BifurcationReport, BifurcationError> {
    let prep = prepare(c, branch, mu)?;
    let cz = &prep.at_zero;
    let bif = prep.bif;
    let origin = origin_point(cz);

    let mut t1_witness = Vec::new();
    let mut t1_detail = Vec::new();
    for kind in [BranchKind::Capacitor, BranchKind::Inductor] {
        if let Some(l) = homogeneous_loop(cz, kind) {
            t1_detail.push(format!("{kind} loop"));
            t1_witness.extend(names(cz, &l));
        }
        if let Some(k) = homogeneous_cutset(cz, kind) {
            t1_detail.push(format!("{kind} cutset"));
            t1_witness.extend(names(cz, &k));
        }
    }
    let t1 = if t1_witness.is_empty() {
        Check::pass("no single-kind reactive loop or cutset")
    } else {
        Check::fail(t1_witness, t1_detail.join(", "))
    };

    let t2 = match loop_avoiding(cz, bif, BranchKind::Capacitor) {
        None => Check::pass(format!("{branch} forms a cutset with capacitors")),
        Some(l) => Check::fail(
            names(cz, &l),
            format!("{branch} is not a bridge once capacitors are removed; loop without capacitors"),
        ),
    };

    let mut d1_bad = Vec::new();
    let mut d2_bad = Vec::new();
    for (j, b) in cz.branches().iter().enumerate() {
        let bind = {
            let mut x = cz.bindings();
            x.extend(&Bindings::from_pairs([("i", 0.0), ("v", 0.0)]));
            x
        };
        let expr = b.expr.as_ref().ok_or(AnalysisError::MissingExpression { branch: b.name.clone(), key: b.kind.key() })?;
        let eval_err = |source| BifurcationError::Eval { branch: b.name.clone(), source };
        match b.kind {
            BranchKind::Resistor => {
                if expr.eval(&bind).map_err(eval_err)?.abs() > NORMAL_FORM_TOL {
                    d1_bad.push(b.name.clone());
                }
                if j != bif && !is_strictly_locally_passive(expr, &bind).map_err(eval_err)? {
                    d2_bad.push(b.name.clone());
                }
            }
            BranchKind::Capacitor | BranchKind::Inductor => {
                if !(expr.eval(&bind).map_err(eval_err)? > 0.0) {
                    d2_bad.push(b.name.clone());
                }
            }
            _ => unreachable!("sources converted, memristors rejected"),
        }
    }
    let d1 = if d1_bad.is_empty() {
        Check::pass("all resistor characteristics meet the origin")
    } else {
        Check::fail(d1_bad, "characteristic misses the origin")
    };
    let d2 = if d2_bad.is_empty() {
        Check::pass("other devices strictly locally passive, C and L positive")
    } else {
        Check::fail(d2_bad, "not strictly locally passive (or nonpositive C/L) at the origin")
    };

    let lin = linearize(cz, &origin)?;
    let trees = spanning_trees(cz);
    let is_kind = |k: BranchKind| move |j: usize| cz.branch(j).kind == k;
    let proper: Vec<SpanningTree> =
        trees_with(&trees, is_kind(BranchKind::Capacitor), is_kind(BranchKind::Inductor)).cloned().collect();
    let d3_factors: Vec<(Rational, Rational)> = lin
        .iter()
        .map(|d| match *d {
            DeviceLin::Resistive(h) => (exact(h.p), exact(-h.q)),
            _ => (Rational::from_integer(1.into()), Rational::from_integer(1.into())),
        })
        .collect();
    let proper_sum = to_f64(&tree_sum_rational(&proper, &d3_factors));
    let d3 = if proper_sum.abs() > NORMAL_FORM_TOL {
        Check::pass(format!("proper-tree sum {proper_sum} over {} trees", proper.len()))
    } else {
        Check::fail(Vec::new(), format!("proper-tree sum {proper_sum} over {} trees", proper.len()))
    };

    // char poly at the origin with the bifurcating P linear in μ
    let mu_sym = PolySymbol::param(mu);
    let mut factors = analysis::numeric_factors(&lin);
    factors[bif] = (
        MultiPoly::symbol(mu_sym.clone()).scale(&exact(prep.f_v_mu)),
        MultiPoly::constant(exact(-prep.f_i)),
    );
    let cp = tree_sum(&trees, &factors);
    let coeffs = cp.lambda_coefficients();
    let independent_term = coeffs[0].clone();
    let mu_monomial = Monomial::var(mu_sym.clone());
    let k = match independent_term.terms().collect::<Vec<_>>().as_slice() {
        [(m, c)] if **m == mu_monomial => Some(to_f64(c)),
        _ => None,
    };
    let zero_mu = std::collections::BTreeMap::from([(mu_sym.clone(), Rational::zero())]);
    let lambda1_at_zero = coeffs
        .get(1)
        .map(|c1| c1.partial_eval(&zero_mu).as_constant().map(|x| to_f64(&x)).unwrap_or(f64::NAN))
        .unwrap_or(0.0);

    let linearity_residual = linearity_residual(c, mu, k.unwrap_or(0.0))?;

    let condition_i = match k {
        Some(k) if lambda1_at_zero != 0.0 => {
            Check::pass(format!("independent term {k}*{mu}, lambda coefficient {lambda1_at_zero} at {mu} = 0"))
        }
        Some(_) => Check::fail(Vec::new(), format!("lambda coefficient vanishes at {mu} = 0")),
        None => Check::fail(Vec::new(), format!("independent term {independent_term} is not k*{mu}")),
    };

    // trees with all inductors and no capacitors carry the independent term
    let dual: Vec<&SpanningTree> = trees_with(&trees, is_kind(BranchKind::Inductor), is_kind(BranchKind::Capacitor)).collect();
    let missing = dual.iter().find(|t| !t.contains(bif));
    let condition_ii = match (k, missing) {
        (Some(_), None) => Check::pass(format!("{branch} lies in every tree of the independent term ({})", dual.len())),
        (_, Some(t)) => Check::fail(names(cz, t.twigs()), format!("tree without {branch}")),
        (None, None) => Check::fail(Vec::new(), format!("independent term {independent_term} is not k*{mu}")),
    };

    let same_sign = {
        let signs: Vec<bool> = dual
            .iter()
            .map(|t| {
                factors
                    .iter()
                    .enumerate()
                    .map(|(j, (tw, ch))| if t.contains(j) { tw.clone() } else { ch.clone() })
                    .product::<MultiPoly>()
            })
            .filter_map(|term| {
                let c = term.lambda_coefficients()[0].coefficient(&mu_monomial);
                (!c.is_zero()).then(|| c.is_positive())
            })
            .collect();
        signs.windows(2).all(|w| w[0] == w[1])
    };

    let hypotheses_hold = [&t1, &t2, &d1, &d2, &d3].iter().all(|c| c.passed);
    let overall = if !hypotheses_hold {
        Overall::RefutedWithWitness
    } else if condition_i.passed && condition_ii.passed {
        Overall::Certified
    } else {
        Overall::Inconclusive
    };
    Ok(BifurcationReport {
        branch: branch.to_string(),
        mu: mu.to_string(),
        t1,
        t2,
        d1,
        d2,
        d3,
        proper_tree_sum: proper_sum,
        independent_term,
        k,
        linearity_residual,
        lambda1_at_zero,
        independent_term_same_sign: same_sign,
        condition_i,
        condition_ii,
        overall,
    })
}

fn linearity_residual(c: &Circuit, mu: &str, k: f64) -> Result<f64, BifurcationError> {
    let mut worst: f64 = 0.0;
    for m in LINEARITY_SAMPLES {
        let cm = c.with_param(mu, ParamValue::Value(m));
        let lin = linearize(&cm, &origin_point(&cm))?;
        let c0 = tree_sum(&spanning_trees(&cm), &analysis::numeric_factors(&lin)).lambda_coefficients()[0]
            .as_constant()
            .map(|x| to_f64(&x))
            .unwrap_or(f64::NAN);
        worst = worst.max((c0 - k * m).abs());
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeRow {
    pub mu: f64,
    /// Voltage of the bifurcating branch at this equilibrium.
    pub branch_voltage: f64,
    pub coefficients: Vec<f64>,
    pub constant_term: Rational,
    /// Real root closest to zero.
    pub nearest_real_root: Option<f64>,
    /// Sign of that root: −1, 0 or +1.
    pub sign: i8,
}

/// Equilibria near the origin for each `μ`, found from seeds
/// `v ∈ {0, ±|μ|, ±2|μ|}` on the bifurcating branch, and the real root of
/// the characteristic polynomial nearest zero at each.
pub fn eigen_exchange_probe(
    c: &Circuit,
    branch: &str,
    mu: &str,
    mu_values: &[f64],
) -> Result<Vec<ProbeRow>, BifurcationError> {
    let bif = c.branch_index(branch).ok_or_else(|| BifurcationError::UnknownBranch(branch.to_string()))?;
    if !c.params().contains_key(mu) {
        return Err(BifurcationError::UnknownParameter(mu.to_string()));
    }
    let mut rows = Vec::new();
    for &m in mu_values {
        let cm = c.with_param(mu, ParamValue::Value(m));
        let mut found: Vec<OperatingPoint> = Vec::new();
        for seed in [0.0, m.abs(), -m.abs(), 2.0 * m.abs(), -2.0 * m.abs()] {
            let mut guess = origin_point(&cm);
            guess.state_mut(bif).v = seed;
            let op = analysis::solve_equilibrium(&cm, &guess, &analysis::SolverOptions { tol: 1e-12, max_iter: 100 })?;
            if !found.iter().any(|p| (p.state(bif).v - op.state(bif).v).abs() <= 1e-6) {
                found.push(op);
            }
        }
        found.sort_by(|a, b| a.state(bif).v.total_cmp(&b.state(bif).v));
        for op in found {
            let cp = analysis::char_poly_numeric(&cm, &op, 1e-8)?;
            let exact_coeffs = cp.coefficients().expect("numeric polynomial");
            let coefficients: Vec<f64> = exact_coeffs.iter().map(to_f64).collect();
            let scale = coefficients.iter().fold(0.0f64, |a, x| a.max(x.abs()));
            let nearest = roots(&coefficients)
                .into_iter()
                .filter(|(_, im)| im.abs() <= 1e-9 * scale.max(1.0))
                .map(|(re, _)| re)
                .min_by(|a, b| a.abs().total_cmp(&b.abs()));
            let constant_term = exact_coeffs[0].clone();
            let sign = match nearest {
                _ if constant_term.is_zero() => 0,
                Some(r) if r > 0.0 => 1,
                Some(r) if r < 0.0 => -1,
                _ => 0,
            };
            rows.push(ProbeRow {
                mu: m,
                branch_voltage: op.state(bif).v,
                coefficients,
                constant_term,
                nearest_real_root: nearest,
                sign,
            });
        }
    }
    Ok(rows)
}
