use nalgebra::{DMatrix, DVector};

use super::{branch_value, expr_of, AnalysisError, Residuals};
use crate::expr::{Bindings, Expr};
use crate::graph::{fundamental_matrices, reference_tree};
use crate::netlist::{BranchKind, Circuit};
use crate::operating_point::OperatingPoint;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Target ∞-norm of the residual.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: 1e-10, max_iter: 100 }
    }
}

const MAX_HALVINGS: usize = 20;

enum Row {
    Device { f: Expr, fi: Expr, fv: Expr, params: Bindings },
    Current,
    Voltage,
}

struct System {
    cut: Vec<Vec<i64>>,
    cycle: Vec<Vec<i64>>,
    /// `(branch, equation)` pairs; memristors contribute two.
    rows: Vec<(usize, Row)>,
    m: usize,
}

impl System {
    fn new(c: &Circuit) -> Result<Self, AnalysisError> {
        let t = reference_tree(c);
        let mats = fundamental_matrices(c, &t);
        let mut rows = Vec::new();
        for (j, b) in c.branches().iter().enumerate() {
            match b.kind {
                BranchKind::Capacitor => rows.push((j, Row::Current)),
                BranchKind::Inductor => rows.push((j, Row::Voltage)),
                BranchKind::Memristor => {
                    rows.push((j, Row::Current));
                    rows.push((j, Row::Voltage));
                }
                _ => {
                    let f = expr_of(c, j)?.clone();
                    rows.push((j, Row::Device { fi: f.diff("i"), fv: f.diff("v"), f, params: c.bindings() }));
                }
            }
        }
        Ok(System { cut: mats.cut, cycle: mats.cycle, rows, m: c.branch_count() })
    }

    fn residual(&self, c: &Circuit, x: &DVector<f64>) -> Result<DVector<f64>, AnalysisError> {
        let m = self.m;
        let mut out = Vec::with_capacity(2 * m + self.rows.len());
        for row in &self.cut {
            out.push(row.iter().enumerate().map(|(j, a)| *a as f64 * x[j]).sum());
        }
        for row in &self.cycle {
            out.push(row.iter().enumerate().map(|(j, b)| *b as f64 * x[m + j]).sum());
        }
        for (j, row) in &self.rows {
            out.push(match row {
                Row::Device { f, params, .. } => f
                    .eval(&params.with("i", x[*j]).with("v", x[m + j]))
                    .map_err(|source| AnalysisError::Eval { branch: c.branch(*j).name.clone(), source })?,
                Row::Current => x[*j],
                Row::Voltage => x[m + j],
            });
        }
        Ok(DVector::from_vec(out))
    }

    fn jacobian(&self, c: &Circuit, x: &DVector<f64>) -> Result<DMatrix<f64>, AnalysisError> {
        let m = self.m;
        let n_rows = self.cut.len() + self.cycle.len() + self.rows.len();
        let mut jac = DMatrix::zeros(n_rows, 2 * m);
        let mut r = 0;
        for row in &self.cut {
            for (j, a) in row.iter().enumerate() {
                jac[(r, j)] = *a as f64;
            }
            r += 1;
        }
        for row in &self.cycle {
            for (j, b) in row.iter().enumerate() {
                jac[(r, m + j)] = *b as f64;
            }
            r += 1;
        }
        for (j, row) in &self.rows {
            match row {
                Row::Device { fi, fv, params, .. } => {
                    let at = params.with("i", x[*j]).with("v", x[m + j]);
                    let err = |source| AnalysisError::Eval { branch: c.branch(*j).name.clone(), source };
                    jac[(r, *j)] = fi.eval(&at).map_err(err)?;
                    jac[(r, m + j)] = fv.eval(&at).map_err(err)?;
                }
                Row::Current => jac[(r, *j)] = 1.0,
                Row::Voltage => jac[(r, m + j)] = 1.0,
            }
            r += 1;
        }
        Ok(jac)
    }
}

/// Damped Newton (Gauss–Newton when memristors make the system
/// overdetermined) on the cut and loop laws, the device characteristics and
/// the equilibrium conditions. Memristor states `(σ, φ)` are taken from
/// `guess` and held fixed; their characteristic must already vanish there.
pub fn solve_equilibrium(
    c: &Circuit,
    guess: &OperatingPoint,
    opts: &SolverOptions,
) -> Result<OperatingPoint, AnalysisError> {
    let cc = c.sources_as_submersions();
    let mut frozen = Residuals::default();
    for (j, b) in cc.branches().iter().enumerate() {
        if b.kind == BranchKind::Memristor {
            frozen.push(format!("f({})", b.name), branch_value(&cc, guess, j)?);
        }
    }
    if frozen.exceeding(opts.tol).next().is_some() {
        return Err(AnalysisError::Residual { residuals: frozen, tol: opts.tol });
    }

    let sys = System::new(&cc)?;
    let m = cc.branch_count();
    let mut x = DVector::from_iterator(2 * m, guess.currents().into_iter().chain(guess.voltages()));
    let mut r = sys.residual(&cc, &x)?;
    for iter in 0..opts.max_iter {
        if r.amax() <= opts.tol {
            return Ok(to_point(guess, &x, m));
        }
        let jac = sys.jacobian(&cc, &x)?;
        let svd = jac.svd(true, true);
        let smax = svd.singular_values.max();
        if svd.singular_values.min() <= 1e-13 * smax.max(1.0) {
            return Err(AnalysisError::SingularJacobian(iter));
        }
        let step = svd.solve(&(-&r), 0.0).map_err(|_| AnalysisError::SingularJacobian(iter))?;
        let norm = r.norm();
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial = &x + &step * t;
            if let Ok(rt) = sys.residual(&cc, &trial) {
                if rt.norm() < norm || rt.amax() <= opts.tol {
                    accepted = Some((trial, rt));
                    break;
                }
            }
            t /= 2.0;
        }
        match accepted {
            Some((nx, nr)) => {
                x = nx;
                r = nr;
            }
            None => return Err(AnalysisError::NoConvergence { iterations: iter + 1, residual: r.amax() }),
        }
    }
    if r.amax() <= opts.tol {
        return Ok(to_point(guess, &x, m));
    }
    Err(AnalysisError::NoConvergence { iterations: opts.max_iter, residual: r.amax() })
}

fn to_point(guess: &OperatingPoint, x: &DVector<f64>, m: usize) -> OperatingPoint {
    let mut op = guess.clone();
    for j in 0..m {
        let s = op.state_mut(j);
        s.i = x[j];
        s.v = x[m + j];
    }
    op
}
