//! Tree sums over a circuit and their determinant oracles: the Kirchhoff
//! polynomial, the resistive nondegeneracy sum and the characteristic
//! polynomial at an equilibrium.

mod charpoly;
mod equilibrium;
mod kirchhoff;

use std::fmt;

use num_traits::ToPrimitive;
use thiserror::Error;

use crate::expr::{Bindings, EvalError, Expr};
use crate::graph::{fundamental_matrices, reference_tree, SpanningTree};
use crate::netlist::{BranchKind, Circuit};
use crate::operating_point::OperatingPoint;
use crate::poly::MultiPoly;
use crate::projective::{homog_pair, HomogPair, ProjectiveError};
use crate::Rational;

pub use charpoly::{
    char_poly, char_poly_memristive, char_poly_numeric, char_poly_symbolic, numeric_factors, pencil_oracle,
    proportionality, CharPoly, Mode, Proportionality,
};
pub use equilibrium::{solve_equilibrium, SolverOptions};
pub use kirchhoff::{
    det_oracle_kirchhoff, det_oracle_kirchhoff_f64, kirchhoff_poly, nondegeneracy_oracle,
    nondegeneracy_sum, Nondegeneracy,
};

/// Default ∞-norm tolerance for accepting an operating point.
pub const RESIDUAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("branch `{branch}` has no `{key}=` expression")]
    MissingExpression { branch: String, key: &'static str },
    #[error("branch `{branch}`: {source}")]
    Eval { branch: String, source: EvalError },
    #[error("branch `{branch}` is not a submersion at its operating point")]
    Degenerate { branch: String },
    #[error("{analysis} does not accept {kind} `{branch}`")]
    Unsupported { analysis: &'static str, branch: String, kind: BranchKind },
    #[error("branch `{branch}`: value {value} is not finite")]
    NonFinite { branch: String, value: f64 },
    #[error("operating point rejected (tolerance {tol:e}):\n{residuals}")]
    Residual { residuals: Residuals, tol: f64 },
    #[error("Jacobian is singular at iteration {0}")]
    SingularJacobian(usize),
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("pencil determinant vanishes at every sample point")]
    StructurallySingular,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualEntry {
    pub label: String,
    pub value: f64,
}

/// Labelled residuals of an operating point.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Residuals {
    pub entries: Vec<ResidualEntry>,
}

impl Residuals {
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|e| e.value.abs()).fold(0.0, f64::max)
    }

    pub fn exceeding(&self, tol: f64) -> impl Iterator<Item = &ResidualEntry> {
        self.entries.iter().filter(move |e| !(e.value.abs() <= tol))
    }

    fn push(&mut self, label: String, value: f64) {
        self.entries.push(ResidualEntry { label, value });
    }
}

impl fmt::Display for Residuals {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(f, "  {:<16} {:e}", e.label, e.value)?;
        }
        Ok(())
    }
}

/// Small-signal description of one branch at an operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeviceLin {
    /// Resistor or source: `(f_v : −f_i)`.
    Resistive(HomogPair),
    /// `(f_φ : −f_σ)`.
    Memristive(HomogPair),
    Capacitance(f64),
    Inductance(f64),
}

fn expr_of<'a>(c: &'a Circuit, j: usize) -> Result<&'a Expr, AnalysisError> {
    let b = c.branch(j);
    b.expr.as_ref().ok_or_else(|| AnalysisError::MissingExpression { branch: b.name.clone(), key: b.kind.key() })
}

fn branch_bindings(c: &Circuit, op: &OperatingPoint, j: usize) -> Bindings {
    let mut b = c.bindings();
    b.extend(&op.state(j).bindings(c.branch(j).kind));
    b
}

fn eval_err(c: &Circuit, j: usize) -> impl Fn(EvalError) -> AnalysisError + '_ {
    move |source| AnalysisError::Eval { branch: c.branch(j).name.clone(), source }
}

/// Value of a branch's own expression at the operating point (`f`, `C(v)`
/// or `L(i)`). Sources must already be converted.
pub(crate) fn branch_value(c: &Circuit, op: &OperatingPoint, j: usize) -> Result<f64, AnalysisError> {
    expr_of(c, j)?.eval(&branch_bindings(c, op, j)).map_err(eval_err(c, j))
}

/// Linearizes every branch of `c` (sources are converted first).
pub fn linearize(c: &Circuit, op: &OperatingPoint) -> Result<Vec<DeviceLin>, AnalysisError> {
    let c = c.sources_as_submersions();
    (0..c.branch_count())
        .map(|j| {
            let b = c.branch(j);
            let f = expr_of(&c, j)?;
            let at = branch_bindings(&c, op, j);
            let pair = |x: &str, y: &str| {
                homog_pair(f, x, y, &at).map_err(|e| match e {
                    ProjectiveError::Eval(source) => AnalysisError::Eval { branch: b.name.clone(), source },
                    _ => AnalysisError::Degenerate { branch: b.name.clone() },
                })
            };
            let lin = match b.kind {
                BranchKind::Memristor => DeviceLin::Memristive(pair("sigma", "phi")?),
                BranchKind::Capacitor => DeviceLin::Capacitance(f.eval(&at).map_err(eval_err(&c, j))?),
                BranchKind::Inductor => DeviceLin::Inductance(f.eval(&at).map_err(eval_err(&c, j))?),
                _ => DeviceLin::Resistive(pair("i", "v")?),
            };
            check_finite(&c, j, &lin)?;
            Ok(lin)
        })
        .collect()
}

fn check_finite(c: &Circuit, j: usize, lin: &DeviceLin) -> Result<(), AnalysisError> {
    let values = match lin {
        DeviceLin::Resistive(h) | DeviceLin::Memristive(h) => [h.p, h.q],
        DeviceLin::Capacitance(x) | DeviceLin::Inductance(x) => [*x, 0.0],
    };
    match values.iter().find(|x| !x.is_finite()) {
        Some(&value) => Err(AnalysisError::NonFinite { branch: c.branch(j).name.clone(), value }),
        None => Ok(()),
    }
}

/// Exact rational image of a finite float.
pub fn exact(x: f64) -> Rational {
    Rational::from_float(x).expect("finite value")
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Residuals of `op` on `c`: each device characteristic, the cut and loop
/// laws, and the equilibrium conditions `i = 0` on capacitors and
/// memristors, `v = 0` on inductors and memristors.
pub fn residuals(c: &Circuit, op: &OperatingPoint) -> Result<Residuals, AnalysisError> {
    let c = c.sources_as_submersions();
    let mut r = Residuals::default();
    for (j, b) in c.branches().iter().enumerate() {
        let s = op.state(j);
        match b.kind {
            BranchKind::Capacitor => r.push(format!("i({})", b.name), s.i),
            BranchKind::Inductor => r.push(format!("v({})", b.name), s.v),
            BranchKind::Memristor => {
                r.push(format!("f({})", b.name), branch_value(&c, op, j)?);
                r.push(format!("i({})", b.name), s.i);
                r.push(format!("v({})", b.name), s.v);
            }
            _ => r.push(format!("f({})", b.name), branch_value(&c, op, j)?),
        }
    }
    let t = reference_tree(&c);
    let m = fundamental_matrices(&c, &t);
    let (i, v) = (op.currents(), op.voltages());
    for (row, &tw) in m.cut.iter().zip(t.twigs()) {
        r.push(format!("cut({})", c.branch(tw).name), dot(row, &i));
    }
    for (row, ch) in m.cycle.iter().zip(t.chords()) {
        r.push(format!("loop({})", c.branch(ch).name), dot(row, &v));
    }
    Ok(r)
}

fn dot(row: &[i64], x: &[f64]) -> f64 {
    row.iter().zip(x).map(|(a, b)| *a as f64 * b).sum()
}

/// Residuals, or an error listing them when any exceeds `tol`.
pub fn check_operating_point(c: &Circuit, op: &OperatingPoint, tol: f64) -> Result<Residuals, AnalysisError> {
    let r = residuals(c, op)?;
    if r.exceeding(tol).next().is_some() {
        return Err(AnalysisError::Residual { residuals: r, tol });
    }
    Ok(r)
}

/// `Σ_T ∏_{twigs} factors[j].0 · ∏_{chords} factors[j].1`.
pub fn tree_sum(trees: &[SpanningTree], factors: &[(MultiPoly, MultiPoly)]) -> MultiPoly {
    trees
        .iter()
        .map(|t| {
            factors
                .iter()
                .enumerate()
                .map(|(j, (twig, chord))| if t.contains(j) { twig.clone() } else { chord.clone() })
                .product::<MultiPoly>()
        })
        .sum()
}

/// Same as [`tree_sum`] over exact numbers.
pub fn tree_sum_rational(trees: &[SpanningTree], factors: &[(Rational, Rational)]) -> Rational {
    trees
        .iter()
        .map(|t| {
            factors
                .iter()
                .enumerate()
                .map(|(j, (twig, chord))| if t.contains(j) { twig } else { chord })
                .product::<Rational>()
        })
        .sum()
}
