use num_traits::{One, Zero};

use super::{check_operating_point, exact, linearize, to_f64, tree_sum, AnalysisError, DeviceLin};
use crate::graph::{fundamental_matrices, reference_tree, spanning_trees};
use crate::linalg::{det_rational, interpolate_rational, sample_points};
use crate::netlist::{BranchKind, Circuit};
use crate::operating_point::OperatingPoint;
use crate::poly::{MultiPoly, PolySymbol};
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Symbolic,
    Numeric,
}

/// Characteristic polynomial, determined up to a nonvanishing factor.
#[derive(Debug, Clone, PartialEq)]
pub struct CharPoly {
    pub poly: MultiPoly,
    pub mode: Mode,
    /// Each memristor contributes a factor `λ`.
    pub memristors: usize,
}

impl CharPoly {
    /// Coefficients of powers of `λ`, lowest first, when no other symbol is
    /// left.
    pub fn coefficients(&self) -> Option<Vec<Rational>> {
        self.poly.lambda_coefficients().iter().map(MultiPoly::as_constant).collect()
    }

    pub fn coefficients_f64(&self) -> Option<Vec<f64>> {
        self.coefficients().map(|c| c.iter().map(to_f64).collect())
    }
}

fn lambda() -> MultiPoly {
    MultiPoly::symbol(PolySymbol::lambda())
}

/// Tree factors with symbolic device parameters. Sources enter with their
/// fixed pairs: `(1 : 0)` for a voltage source, `(0 : 1)` for a current
/// source.
pub fn char_poly_symbolic(c: &Circuit) -> CharPoly {
    let factors: Vec<(MultiPoly, MultiPoly)> = c
        .branches()
        .iter()
        .map(|b| {
            let sym = |s: PolySymbol| MultiPoly::symbol(s);
            match b.kind {
                BranchKind::Resistor | BranchKind::Memristor => (sym(PolySymbol::p(&b.name)), sym(PolySymbol::q(&b.name))),
                BranchKind::VoltageSource => (MultiPoly::one(), MultiPoly::zero()),
                BranchKind::CurrentSource => (MultiPoly::zero(), MultiPoly::one()),
                BranchKind::Capacitor => (&lambda() * &sym(PolySymbol::cap(&b.name)), MultiPoly::one()),
                BranchKind::Inductor => (MultiPoly::one(), &lambda() * &sym(PolySymbol::ind(&b.name))),
            }
        })
        .collect();
    finish(c, &factors, Mode::Symbolic)
}

fn finish(c: &Circuit, factors: &[(MultiPoly, MultiPoly)], mode: Mode) -> CharPoly {
    let memristors = c.count(BranchKind::Memristor);
    let poly = &tree_sum(&spanning_trees(c), factors) * &lambda().pow(memristors as u32);
    CharPoly { poly, mode, memristors }
}

/// Numeric tree factors from a linearization: `P`/`Q` on resistive and
/// memristive branches, `λC`/`λL` on twig capacitors and chord inductors.
pub fn numeric_factors(lin: &[DeviceLin]) -> Vec<(MultiPoly, MultiPoly)> {
    let k = |x: f64| MultiPoly::constant(exact(x));
    lin.iter()
        .map(|d| match *d {
            DeviceLin::Resistive(h) | DeviceLin::Memristive(h) => (k(h.p), k(h.q)),
            DeviceLin::Capacitance(x) => (&lambda() * &k(x), MultiPoly::one()),
            DeviceLin::Inductance(x) => (MultiPoly::one(), &lambda() * &k(x)),
        })
        .collect()
}

/// Characteristic polynomial at an equilibrium, with device values taken
/// from the linearization at `op`.
pub fn char_poly_numeric(c: &Circuit, op: &OperatingPoint, tol: f64) -> Result<CharPoly, AnalysisError> {
    check_operating_point(c, op, tol)?;
    let lin = linearize(c, op)?;
    Ok(finish(c, &numeric_factors(&lin), Mode::Numeric))
}

fn reject_memristors(c: &Circuit) -> Result<(), AnalysisError> {
    match c.branches().iter().find(|b| b.kind == BranchKind::Memristor) {
        Some(b) => Err(AnalysisError::Unsupported {
            analysis: "RLC characteristic polynomial",
            branch: b.name.clone(),
            kind: b.kind,
        }),
        None => Ok(()),
    }
}

/// RLC circuits only; see [`char_poly_memristive`].
pub fn char_poly(c: &Circuit, op: Option<&OperatingPoint>, tol: f64) -> Result<CharPoly, AnalysisError> {
    reject_memristors(c)?;
    char_poly_memristive(c, op, tol)
}

/// Symbolic when `op` is `None`, numeric otherwise.
pub fn char_poly_memristive(c: &Circuit, op: Option<&OperatingPoint>, tol: f64) -> Result<CharPoly, AnalysisError> {
    match op {
        None => Ok(char_poly_symbolic(c)),
        Some(op) => char_poly_numeric(c, op, tol),
    }
}

/// `det(λE − J)` of the full linearized circuit equations, computed exactly
/// by evaluation at integer `λ` and interpolation.
///
/// Unknowns are the branch currents and voltages (twigs first) followed by
/// `(σ, φ)` per memristor. Rows are the cut and loop laws, then one device
/// row per branch (three per memristor: `λσ = i`, `λφ = v`, and the
/// linearized characteristic).
pub fn pencil_oracle(c: &Circuit, op: &OperatingPoint, tol: f64) -> Result<Vec<Rational>, AnalysisError> {
    check_operating_point(c, op, tol)?;
    let lin = linearize(c, op)?;
    let t = reference_tree(c);
    let order = t.twig_first_order();
    let mats = fundamental_matrices(c, &t);
    let m = order.len();
    let memristors: Vec<usize> = order.iter().copied().filter(|&j| matches!(lin[j], DeviceLin::Memristive(_))).collect();
    let size = 2 * m + 2 * memristors.len();
    let reactive = lin.iter().filter(|d| matches!(d, DeviceLin::Capacitance(_) | DeviceLin::Inductance(_))).count();
    let degree_bound = reactive + 2 * memristors.len();

    let build = |lam: &Rational| -> Vec<Vec<Rational>> {
        let mut rows = Vec::with_capacity(size);
        let int = |x: i64| Rational::from_integer(x.into());
        for row in &mats.cut {
            let mut r = vec![Rational::zero(); size];
            for (k, &j) in order.iter().enumerate() {
                r[k] = int(row[j]);
            }
            rows.push(r);
        }
        for row in &mats.cycle {
            let mut r = vec![Rational::zero(); size];
            for (k, &j) in order.iter().enumerate() {
                r[m + k] = int(row[j]);
            }
            rows.push(r);
        }
        let mut extra = 2 * m;
        for (k, &j) in order.iter().enumerate() {
            let (ci, cv) = (k, m + k);
            let mut r = vec![Rational::zero(); size];
            match lin[j] {
                DeviceLin::Resistive(h) => {
                    r[ci] = exact(-h.q);
                    r[cv] = exact(h.p);
                }
                DeviceLin::Capacitance(x) => {
                    r[ci] = -Rational::one();
                    r[cv] = lam * exact(x);
                }
                DeviceLin::Inductance(x) => {
                    r[ci] = lam * exact(x);
                    r[cv] = -Rational::one();
                }
                DeviceLin::Memristive(h) => {
                    let (cs, cp) = (extra, extra + 1);
                    extra += 2;
                    r[ci] = -Rational::one();
                    r[cs] = lam.clone();
                    let mut r2 = vec![Rational::zero(); size];
                    r2[cv] = -Rational::one();
                    r2[cp] = lam.clone();
                    let mut r3 = vec![Rational::zero(); size];
                    r3[cs] = exact(-h.q);
                    r3[cp] = exact(h.p);
                    rows.push(r);
                    rows.push(r2);
                    rows.push(r3);
                    continue;
                }
            }
            rows.push(r);
        }
        rows
    };

    let xs: Vec<Rational> = sample_points(degree_bound + 1).into_iter().map(|x| Rational::from_integer(x.into())).collect();
    let ys: Vec<Rational> = xs.iter().map(|x| det_rational(&build(x))).collect();
    if ys.iter().all(Zero::is_zero) {
        return Err(AnalysisError::StructurallySingular);
    }
    let mut coeffs = interpolate_rational(&xs, &ys);
    while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
        coeffs.pop();
    }
    Ok(coeffs)
}

/// Best single ratio `r` with `a ≈ r·b` and the worst deviation relative to
/// the largest coefficient of `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Proportionality {
    pub ratio: f64,
    pub deviation: f64,
}

pub fn proportionality(a: &[f64], b: &[f64]) -> Proportionality {
    let n = a.len().max(b.len());
    let at = |v: &[f64], k: usize| v.get(k).copied().unwrap_or(0.0);
    let ab: f64 = (0..n).map(|k| at(a, k) * at(b, k)).sum();
    let bb: f64 = (0..n).map(|k| at(b, k) * at(b, k)).sum();
    let ratio = if bb == 0.0 { 0.0 } else { ab / bb };
    let scale = (0..n).map(|k| at(a, k).abs()).fold(0.0, f64::max);
    let worst = (0..n).map(|k| (at(a, k) - ratio * at(b, k)).abs()).fold(0.0, f64::max);
    let deviation = if scale == 0.0 { if worst == 0.0 { 0.0 } else { f64::INFINITY } } else { worst / scale };
    Proportionality { ratio, deviation }
}
