//! Line-oriented netlist format and the [`Circuit`] it describes.
//!
//! ```text
//! # transcritical example
//! .param mu=sym
//! R1 a b f="i - mu*v - v^2"
//! C1 b c c="1"
//! L1 a c l="1"
//! R2 a c f="i - v"
//! ```
//!
//! Branch current flows tail to head; branch voltage is the potential of the
//! tail minus the potential of the head. Branch order in the file is the
//! canonical branch order used by every matrix and polynomial.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::expr::{parse_expr, Bindings, Expr, ParseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BranchKind {
    Resistor,
    Capacitor,
    Inductor,
    Memristor,
    VoltageSource,
    CurrentSource,
}

impl BranchKind {
    pub fn from_prefix(c: char) -> Option<BranchKind> {
        Some(match c.to_ascii_uppercase() {
            'R' => BranchKind::Resistor,
            'C' => BranchKind::Capacitor,
            'L' => BranchKind::Inductor,
            'M' => BranchKind::Memristor,
            'V' => BranchKind::VoltageSource,
            'I' => BranchKind::CurrentSource,
            _ => return None,
        })
    }

    /// Variables an expression of this kind may reference.
    pub fn allowed_variables(self) -> &'static [&'static str] {
        match self {
            BranchKind::Resistor => &["i", "v"],
            BranchKind::Memristor => &["sigma", "phi"],
            BranchKind::Capacitor => &["v"],
            BranchKind::Inductor => &["i"],
            BranchKind::VoltageSource | BranchKind::CurrentSource => &[],
        }
    }

    /// Netlist key holding the branch expression.
    pub fn key(self) -> &'static str {
        match self {
            BranchKind::Resistor | BranchKind::Memristor => "f",
            BranchKind::Capacitor => "c",
            BranchKind::Inductor => "l",
            BranchKind::VoltageSource | BranchKind::CurrentSource => "dc",
        }
    }

    pub fn is_reactive(self) -> bool {
        matches!(self, BranchKind::Capacitor | BranchKind::Inductor)
    }

    pub fn is_source(self) -> bool {
        matches!(self, BranchKind::VoltageSource | BranchKind::CurrentSource)
    }

    /// Resistors and sources: devices described by an implicit `f(i, v)`.
    pub fn is_resistive(self) -> bool {
        matches!(
            self,
            BranchKind::Resistor | BranchKind::VoltageSource | BranchKind::CurrentSource
        )
    }
}

impl fmt::Display for BranchKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BranchKind::Resistor => "resistor",
            BranchKind::Capacitor => "capacitor",
            BranchKind::Inductor => "inductor",
            BranchKind::Memristor => "memristor",
            BranchKind::VoltageSource => "voltage source",
            BranchKind::CurrentSource => "current source",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub name: String,
    pub tail: usize,
    pub head: usize,
    pub kind: BranchKind,
    /// Characteristic `f`, reactance `C(v)`/`L(i)`, or source value.
    /// Symbolic analyses do not need it.
    pub expr: Option<Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParamValue {
    Value(f64),
    /// Left unbound for symbolic runs.
    Symbolic,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetlistError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown branch prefix in `{name}`")]
    UnknownPrefix { line: usize, name: String },
    #[error("line {line}: duplicate branch name `{name}`")]
    DuplicateBranch { line: usize, name: String },
    #[error("line {line}: branch `{branch}` is a self-loop")]
    SelfLoop { line: usize, branch: String },
    #[error("line {line}: branch `{branch}` references `{variable}`, not allowed for a {kind}")]
    DisallowedVariable { line: usize, branch: String, variable: String, kind: BranchKind },
    #[error("line {line}: branch `{branch}` references undeclared parameter `{name}`")]
    UndeclaredParameter { line: usize, branch: String, name: String },
    #[error("line {line}: branch `{branch}`: {source}")]
    Expression { line: usize, branch: String, source: ParseError },
    #[error("circuit is not connected: node `{node}` unreachable from `{root}`")]
    Disconnected { root: String, node: String },
    #[error("netlist has no branches")]
    Empty,
}

/// Directed multigraph of typed branches plus a parameter table.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    nodes: Vec<String>,
    branches: Vec<Branch>,
    params: BTreeMap<String, ParamValue>,
}

impl Circuit {
    /// Validated construction. Diagnostics number branches from 1.
    pub fn new(
        nodes: Vec<String>,
        branches: Vec<Branch>,
        params: BTreeMap<String, ParamValue>,
    ) -> Result<Circuit, NetlistError> {
        Self::validated(nodes, branches, params, None)
    }

    fn validated(
        nodes: Vec<String>,
        branches: Vec<Branch>,
        params: BTreeMap<String, ParamValue>,
        lines: Option<&[usize]>,
    ) -> Result<Circuit, NetlistError> {
        if branches.is_empty() {
            return Err(NetlistError::Empty);
        }
        let line_of = |k: usize| lines.map_or(k + 1, |l| l[k]);
        let mut seen = BTreeSet::new();
        for (k, b) in branches.iter().enumerate() {
            let line = line_of(k);
            if !seen.insert(b.name.as_str()) {
                return Err(NetlistError::DuplicateBranch { line, name: b.name.clone() });
            }
            if b.tail == b.head {
                return Err(NetlistError::SelfLoop { line, branch: b.name.clone() });
            }
            assert!(b.tail < nodes.len() && b.head < nodes.len(), "node index out of range");
            if let Some(e) = &b.expr {
                let allowed = b.kind.allowed_variables();
                for var in e.variables() {
                    if !allowed.contains(&var.as_str()) {
                        return Err(NetlistError::DisallowedVariable {
                            line,
                            branch: b.name.clone(),
                            variable: var,
                            kind: b.kind,
                        });
                    }
                }
                for p in e.parameters() {
                    if !params.contains_key(&p) {
                        return Err(NetlistError::UndeclaredParameter {
                            line,
                            branch: b.name.clone(),
                            name: p,
                        });
                    }
                }
            }
        }
        let c = Circuit { nodes, branches, params };
        if let Some(node) = c.first_unreachable_node() {
            return Err(NetlistError::Disconnected {
                root: c.nodes[0].clone(),
                node: c.nodes[node].clone(),
            });
        }
        Ok(c)
    }

    fn first_unreachable_node(&self) -> Option<usize> {
        let n = self.nodes.len();
        let mut adj = vec![Vec::new(); n];
        for b in &self.branches {
            adj[b.tail].push(b.head);
            adj[b.head].push(b.tail);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.iter().position(|s| !s)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn branch(&self, index: usize) -> &Branch {
        &self.branches[index]
    }

    pub fn branch_index(&self, name: &str) -> Option<usize> {
        self.branches.iter().position(|b| b.name == name)
    }

    pub fn params(&self) -> &BTreeMap<String, ParamValue> {
        &self.params
    }

    pub fn count(&self, kind: BranchKind) -> usize {
        self.branches.iter().filter(|b| b.kind == kind).count()
    }

    /// Number of fundamental loops, m - n + 1.
    pub fn nullity(&self) -> usize {
        self.branches.len() + 1 - self.nodes.len()
    }

    /// Numeric parameters as bindings; symbolic ones are left out.
    pub fn bindings(&self) -> Bindings {
        let mut b = Bindings::new();
        for (k, v) in &self.params {
            if let ParamValue::Value(x) = v {
                b.set(k, *x);
            }
        }
        b
    }

    pub fn symbolic_params(&self) -> Vec<&str> {
        self.params
            .iter()
            .filter(|(_, v)| matches!(v, ParamValue::Symbolic))
            .map(|(k, _)| k.as_str())
            .collect()
    }

    /// Copy with one parameter rebound.
    pub fn with_param(&self, name: &str, value: ParamValue) -> Circuit {
        let mut c = self.clone();
        c.params.insert(name.to_string(), value);
        c
    }

    /// Copy with one branch expression replaced (validated).
    pub fn with_branch_expr(&self, index: usize, expr: Expr) -> Result<Circuit, NetlistError> {
        let mut branches = self.branches.clone();
        branches[index].expr = Some(expr);
        Circuit::new(self.nodes.clone(), branches, self.params.clone())
    }

    /// Same graph where each voltage source `dc=E` becomes a resistor with
    /// `f = v - E` and each current source `dc=I` a resistor with `f = i - I`.
    /// A source without a value is taken as `dc=0`.
    pub fn sources_as_submersions(&self) -> Circuit {
        let mut c = self.clone();
        for b in &mut c.branches {
            let var = match b.kind {
                BranchKind::VoltageSource => "v",
                BranchKind::CurrentSource => "i",
                _ => continue,
            };
            let value = b.expr.take().unwrap_or_else(|| Expr::num(0));
            b.expr = Some(if value.is_zero() { Expr::var(var) } else { Expr::var(var) - value });
            b.kind = BranchKind::Resistor;
        }
        c
    }
}

/// Parse netlist text into a validated [`Circuit`].
pub fn parse_netlist(text: &str) -> Result<Circuit, NetlistError> {
    let mut nodes: Vec<String> = Vec::new();
    let mut node_index: HashMap<String, usize> = HashMap::new();
    let mut branches = Vec::new();
    let mut lines = Vec::new();
    let mut params = BTreeMap::new();
    let mut raw: Vec<(usize, Vec<(String, String)>)> = Vec::new();

    for (k, raw_line) in text.lines().enumerate() {
        let line = k + 1;
        let content = strip_comment(raw_line).trim();
        if content.is_empty() {
            continue;
        }
        let tokens = tokenize(content).map_err(|message| NetlistError::Syntax { line, message })?;
        if content.starts_with('.') {
            parse_directive(&tokens, line, &mut params)?;
            continue;
        }
        if tokens.len() < 3 {
            return Err(NetlistError::Syntax {
                line,
                message: "expected `<name> <tail> <head> [key=value]`".into(),
            });
        }
        let name = tokens[0].clone();
        let kind = name
            .chars()
            .next()
            .and_then(BranchKind::from_prefix)
            .ok_or_else(|| NetlistError::UnknownPrefix { line, name: name.clone() })?;
        let mut ends = [0usize; 2];
        for (slot, tok) in ends.iter_mut().zip(&tokens[1..3]) {
            if tok.contains('=') {
                return Err(NetlistError::Syntax { line, message: format!("expected node name, found `{tok}`") });
            }
            *slot = *node_index.entry(tok.clone()).or_insert_with(|| {
                nodes.push(tok.clone());
                nodes.len() - 1
            });
        }
        let mut kv = Vec::new();
        for tok in &tokens[3..] {
            let (key, value) = split_kv(tok).ok_or_else(|| NetlistError::Syntax {
                line,
                message: format!("expected key=value, found `{tok}`"),
            })?;
            kv.push((key, value));
        }
        raw.push((line, kv.clone()));
        branches.push(Branch { name, tail: ends[0], head: ends[1], kind, expr: None });
        lines.push(line);
    }

    // expressions are parsed once all `.param` lines are known
    for (b, (line, kv)) in branches.iter_mut().zip(&raw) {
        for (key, value) in kv {
            if key != b.kind.key() {
                return Err(NetlistError::Syntax {
                    line: *line,
                    message: format!("unexpected key `{key}` for {} `{}`", b.kind, b.name),
                });
            }
            let e = parse_expr(value).map_err(|source| NetlistError::Expression {
                line: *line,
                branch: b.name.clone(),
                source,
            })?;
            b.expr = Some(e);
        }
    }
    Circuit::validated(nodes, branches, params, Some(&lines))
}

fn parse_directive(
    tokens: &[String],
    line: usize,
    params: &mut BTreeMap<String, ParamValue>,
) -> Result<(), NetlistError> {
    if tokens[0] != ".param" {
        return Err(NetlistError::Syntax { line, message: format!("unknown directive `{}`", tokens[0]) });
    }
    for tok in &tokens[1..] {
        let (name, value) = split_kv(tok)
            .ok_or_else(|| NetlistError::Syntax { line, message: format!("expected name=value, found `{tok}`") })?;
        let value = if value == "sym" {
            ParamValue::Symbolic
        } else {
            let e = parse_expr(&value).map_err(|source| NetlistError::Expression {
                line,
                branch: name.clone(),
                source,
            })?;
            let x = e.eval(&Bindings::new()).map_err(|err| NetlistError::Syntax {
                line,
                message: format!("parameter `{name}`: {err}"),
            })?;
            ParamValue::Value(x)
        };
        params.insert(name, value);
    }
    Ok(())
}

fn strip_comment(line: &str) -> &str {
    let mut in_quotes = false;
    for (k, c) in line.char_indices() {
        match c {
            '"' => in_quotes = !in_quotes,
            '#' if !in_quotes => return &line[..k],
            _ => {}
        }
    }
    line
}

/// Whitespace split that keeps quoted segments together; quotes are removed.
fn tokenize(line: &str) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut in_quotes = false;
    for c in line.chars() {
        match c {
            '"' => in_quotes = !in_quotes,
            c if c.is_whitespace() && !in_quotes => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if in_quotes {
        return Err("unterminated quote".into());
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    Ok(out)
}

fn split_kv(tok: &str) -> Option<(String, String)> {
    let (k, v) = tok.split_once('=')?;
    if k.is_empty() || v.is_empty() {
        return None;
    }
    Some((k.to_string(), v.to_string()))
}

/// Serializes back to netlist text.
impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, value) in &self.params {
            match value {
                ParamValue::Symbolic => writeln!(f, ".param {name}=sym")?,
                ParamValue::Value(x) => writeln!(f, ".param {name}={x:?}")?,
            }
        }
        for b in &self.branches {
            write!(f, "{} {} {}", b.name, self.nodes[b.tail], self.nodes[b.head])?;
            if let Some(e) = &b.expr {
                write!(f, " {}=\"{e}\"", b.kind.key())?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
