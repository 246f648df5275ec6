//! Homogeneous incremental pairs, strict local passivity and the
//! associate test for planar submersions.
//!
//! ```
//! use implicit_circuits::expr::{parse_expr, Bindings};
//! use implicit_circuits::projective::homog_resistance;
//!
//! let f = parse_expr("i - mu*v - v^2").unwrap();
//! let at = Bindings::from_pairs([("i", 0.0), ("v", 0.0), ("mu", 0.5)]);
//! let h = homog_resistance(&f, &at).unwrap();
//! assert_eq!((h.p, h.q), (-0.5, -1.0));
//! ```

use thiserror::Error;

use crate::expr::{Bindings, EvalError, Expr};
use crate::poly::Control;

/// Below this magnitude a partial derivative counts as zero.
pub const DERIVATIVE_EPS: f64 = 1e-12;
/// Default threshold for `|γ|` to count as nonvanishing.
pub const GAMMA_TOL: f64 = 1e-8;

/// `(p : q)`, compared projectively.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomogPair {
    pub p: f64,
    pub q: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProjectiveError {
    #[error("not a submersion at ({0}, {1}): both partial derivatives vanish")]
    Degenerate(f64, f64),
    #[error("pair ({p} : {q}) lies outside the {control:?}-controlled patch")]
    NotInPatch { p: f64, q: f64, control: Control },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("grid must have at least 8 cells per side, got {0}")]
    GridTooSmall(usize),
}

impl HomogPair {
    pub fn new(p: f64, q: f64) -> Self {
        HomogPair { p, q }
    }

    pub fn scale(&self) -> f64 {
        self.p.abs().max(self.q.abs())
    }

    /// `p₁q₂ − p₂q₁ ≈ 0` relative to the product of scales.
    pub fn projectively_eq(&self, other: &HomogPair, rel_tol: f64) -> bool {
        let cross = self.p * other.q - other.p * self.q;
        cross.abs() <= rel_tol * self.scale() * other.scale()
    }

    /// Resistance `q/p` under current control, conductance `p/q` under
    /// voltage control.
    pub fn dehomogenize(&self, control: Control) -> Result<f64, ProjectiveError> {
        let (num, den) = match control {
            Control::Current => (self.q, self.p),
            Control::Voltage => (self.p, self.q),
        };
        if den.abs() <= DERIVATIVE_EPS {
            return Err(ProjectiveError::NotInPatch { p: self.p, q: self.q, control });
        }
        Ok(num / den)
    }
}

/// `(∂f/∂y : −∂f/∂x)` at a point; `x` is the current-like variable.
pub fn homog_pair(f: &Expr, x: &str, y: &str, at: &Bindings) -> Result<HomogPair, ProjectiveError> {
    let fx = f.diff(x).eval(at)?;
    let fy = f.diff(y).eval(at)?;
    if fx.abs() <= DERIVATIVE_EPS && fy.abs() <= DERIVATIVE_EPS {
        return Err(ProjectiveError::Degenerate(
            at.get(x).unwrap_or(f64::NAN),
            at.get(y).unwrap_or(f64::NAN),
        ));
    }
    Ok(HomogPair::new(fy, -fx))
}

/// `(f_v : −f_i)`.
pub fn homog_resistance(f: &Expr, at: &Bindings) -> Result<HomogPair, ProjectiveError> {
    homog_pair(f, "i", "v", at)
}

/// `(f_φ : −f_σ)`.
pub fn homog_memristance(f: &Expr, at: &Bindings) -> Result<HomogPair, ProjectiveError> {
    homog_pair(f, "sigma", "phi", at)
}

/// Both partials nonzero with opposite signs. A degenerate differential
/// reads as not passive.
pub fn is_strictly_locally_passive(f: &Expr, at: &Bindings) -> Result<bool, EvalError> {
    let fi = f.diff("i").eval(at)?;
    let fv = f.diff("v").eval(at)?;
    Ok(fi.abs() > DERIVATIVE_EPS && fv.abs() > DERIVATIVE_EPS && fi * fv < 0.0)
}

/// Two expressions in the same pair of plane variables, with parameters.
#[derive(Debug, Clone)]
pub struct PlanePair<'a> {
    pub f1: &'a Expr,
    pub f2: &'a Expr,
    pub vars: [&'a str; 2],
    pub params: &'a Bindings,
}

struct Local {
    value: f64,
    grad: [f64; 2],
}

impl PlanePair<'_> {
    fn point(&self, x: [f64; 2]) -> Bindings {
        self.params.with(self.vars[0], x[0]).with(self.vars[1], x[1])
    }

    fn local(&self, f: &Expr, x: [f64; 2]) -> Result<Local, EvalError> {
        let b = self.point(x);
        Ok(Local {
            value: f.eval(&b)?,
            grad: [f.diff(self.vars[0]).eval(&b)?, f.diff(self.vars[1]).eval(&b)?],
        })
    }

    /// `γ = f1/f2` off the zero set of `f2`; on it, the ratio of partials
    /// along the variable where `f2` varies most.
    pub fn gamma_at(&self, x: [f64; 2]) -> Result<f64, ProjectiveError> {
        let l2 = self.local(self.f2, x)?;
        if l2.value.abs() > zero_eps(&l2) {
            return Ok(self.f1.eval(&self.point(x))? / l2.value);
        }
        self.gamma_on_zero_set(x)
    }

    fn gamma_on_zero_set(&self, x: [f64; 2]) -> Result<f64, ProjectiveError> {
        let l1 = self.local(self.f1, x)?;
        let l2 = self.local(self.f2, x)?;
        if is_degenerate(&l2) {
            return Err(ProjectiveError::Degenerate(x[0], x[1]));
        }
        let w = if l2.grad[0].abs() >= l2.grad[1].abs() { 0 } else { 1 };
        Ok(l1.grad[w] / l2.grad[w])
    }

    /// Grid sampling of zero-set agreement and of `γ` over the rectangle
    /// `vars[0] ∈ [a, b]`, `vars[1] ∈ [c, d]`.
    pub fn check_associates(
        &self,
        domain: [f64; 4],
        grid: usize,
        tol: f64,
    ) -> Result<AssociatesReport, ProjectiveError> {
        if grid < 8 {
            return Err(ProjectiveError::GridTooSmall(grid));
        }
        let [a, b, c, d] = domain;
        let n = grid + 1;
        let coord = |k: usize, j: usize| {
            [a + (b - a) * k as f64 / grid as f64, c + (d - c) * j as f64 / grid as f64]
        };
        let mut nodes = Vec::with_capacity(n * n);
        for k in 0..n {
            for j in 0..n {
                let x = coord(k, j);
                let l1 = self.local(self.f1, x)?;
                let l2 = self.local(self.f2, x)?;
                nodes.push(Node { x, z1: is_zero(&l1), z2: is_zero(&l2), l1, l2 });
            }
        }
        let at = |k: usize, j: usize| &nodes[k * n + j];

        // zero points first: a degenerate differential there is an error
        let mut zero_points: Vec<[f64; 2]> =
            nodes.iter().filter(|nd| nd.z1 && nd.z2).map(|nd| nd.x).collect();
        let mut edges = Vec::new();
        for k in 0..n {
            for j in 0..n {
                if k + 1 < n {
                    edges.push((at(k, j), at(k + 1, j)));
                }
                if j + 1 < n {
                    edges.push((at(k, j), at(k, j + 1)));
                }
            }
        }
        let mut mismatches = Vec::new();
        for node in &nodes {
            if node.z1 != node.z2 {
                mismatches.push(ZeroSetMismatch { from: node.x, to: node.x });
            }
        }
        for (u, w) in &edges {
            let s1 = sign_change(u.z1, u.l1.value, w.z1, w.l1.value);
            let s2 = sign_change(u.z2, u.l2.value, w.z2, w.l2.value);
            if s1 != s2 {
                mismatches.push(ZeroSetMismatch { from: u.x, to: w.x });
            } else if s1 {
                zero_points.push(self.bisect(u.x, u.l1.value, w.x)?);
            }
        }
        for &x in &zero_points {
            let l1 = self.local(self.f1, x)?;
            let l2 = self.local(self.f2, x)?;
            if is_degenerate(&l1) || is_degenerate(&l2) {
                return Err(ProjectiveError::Degenerate(x[0], x[1]));
            }
        }

        let mut gammas = Vec::new();
        for &x in &zero_points {
            gammas.push(self.gamma_on_zero_set(x)?);
        }
        for node in nodes.iter().filter(|nd| !nd.z1 && !nd.z2) {
            gammas.push(node.l1.value / node.l2.value);
        }
        let min_abs = gammas.iter().map(|g| g.abs()).fold(f64::INFINITY, f64::min);
        let min = gammas.iter().copied().fold(f64::INFINITY, f64::min);
        let max = gammas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let sign_consistent = gammas.iter().all(|g| *g > 0.0) || gammas.iter().all(|g| *g < 0.0);
        Ok(AssociatesReport {
            associates: mismatches.is_empty() && min_abs > tol && sign_consistent,
            gamma_min_abs: min_abs,
            gamma_range: (min, max),
            gamma_sign_consistent: sign_consistent,
            zero_points: zero_points.len(),
            samples: gammas.len(),
            zero_set_mismatches: mismatches,
        })
    }

    /// 50 bisection steps along a segment where `f1` changes sign.
    fn bisect(&self, mut lo: [f64; 2], mut f_lo: f64, mut hi: [f64; 2]) -> Result<[f64; 2], EvalError> {
        for _ in 0..50 {
            let mid = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
            let fm = self.f1.eval(&self.point(mid))?;
            if fm == 0.0 {
                return Ok(mid);
            }
            if (fm > 0.0) == (f_lo > 0.0) {
                lo = mid;
                f_lo = fm;
            } else {
                hi = mid;
            }
        }
        Ok([(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0])
    }
}

struct Node {
    x: [f64; 2],
    l1: Local,
    l2: Local,
    z1: bool,
    z2: bool,
}

fn zero_eps(l: &Local) -> f64 {
    1e-9 * (1.0 + l.grad[0].hypot(l.grad[1]))
}

fn is_zero(l: &Local) -> bool {
    l.value.abs() <= zero_eps(l)
}

fn is_degenerate(l: &Local) -> bool {
    l.grad[0].abs() <= DERIVATIVE_EPS && l.grad[1].abs() <= DERIVATIVE_EPS
}

/// Strict sign change between two nonzero endpoint values.
fn sign_change(z_a: bool, a: f64, z_b: bool, b: f64) -> bool {
    !z_a && !z_b && (a > 0.0) != (b > 0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSetMismatch {
    /// Grid edge endpoints (equal for a node-level mismatch).
    pub from: [f64; 2],
    pub to: [f64; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssociatesReport {
    pub associates: bool,
    pub gamma_min_abs: f64,
    pub gamma_range: (f64, f64),
    pub gamma_sign_consistent: bool,
    pub zero_points: usize,
    pub samples: usize,
    pub zero_set_mismatches: Vec<ZeroSetMismatch>,
}

/// `γ` at a point of the `(i, v)` plane.
pub fn gamma_at(f1: &Expr, f2: &Expr, params: &Bindings, x: [f64; 2]) -> Result<f64, ProjectiveError> {
    PlanePair { f1, f2, vars: ["i", "v"], params }.gamma_at(x)
}

/// Associate check in the `(i, v)` plane.
pub fn check_associates(
    f1: &Expr,
    f2: &Expr,
    params: &Bindings,
    domain: [f64; 4],
    grid: usize,
    tol: f64,
) -> Result<AssociatesReport, ProjectiveError> {
    PlanePair { f1, f2, vars: ["i", "v"], params }.check_associates(domain, grid, tol)
}
