use num_traits::Zero;

use super::{check_operating_point, exact, linearize, tree_sum, tree_sum_rational, AnalysisError, DeviceLin};
use crate::graph::{fundamental_matrices, reference_tree, spanning_trees, CutCycleMatrices};
use crate::linalg::{det_f64, det_rational};
use crate::netlist::Circuit;
use crate::operating_point::OperatingPoint;
use crate::poly::{MultiPoly, PolySymbol};
use crate::Rational;

/// `Σ_T ∏ twig P_j · ∏ chord Q_k` over all spanning trees.
pub fn kirchhoff_poly(c: &Circuit) -> MultiPoly {
    let factors: Vec<(MultiPoly, MultiPoly)> = c
        .branches()
        .iter()
        .map(|b| (MultiPoly::symbol(PolySymbol::p(&b.name)), MultiPoly::symbol(PolySymbol::q(&b.name))))
        .collect();
    tree_sum(&spanning_trees(c), &factors)
}

/// Reference-tree matrices with columns in twigs-first order.
fn twig_first(c: &Circuit) -> (CutCycleMatrices, Vec<usize>) {
    let t = reference_tree(c);
    let order = t.twig_first_order();
    (fundamental_matrices(c, &t), order)
}

fn int(x: i64) -> Rational {
    Rational::from_integer(x.into())
}

/// `det (A·P ; B·Q)` with `A`, `B` from the reference tree, columns in
/// twigs-first order.
pub fn det_oracle_kirchhoff(c: &Circuit, p: &[Rational], q: &[Rational]) -> Rational {
    let (m, order) = twig_first(c);
    let mut rows = Vec::with_capacity(order.len());
    for row in &m.cut {
        rows.push(order.iter().map(|&j| int(row[j]) * &p[j]).collect());
    }
    for row in &m.cycle {
        rows.push(order.iter().map(|&j| int(row[j]) * &q[j]).collect());
    }
    det_rational(&rows)
}

pub fn det_oracle_kirchhoff_f64(c: &Circuit, p: &[f64], q: &[f64]) -> f64 {
    let (m, order) = twig_first(c);
    let rows: Vec<Vec<f64>> = m
        .cut
        .iter()
        .map(|row| order.iter().map(|&j| row[j] as f64 * p[j]).collect())
        .chain(m.cycle.iter().map(|row| order.iter().map(|&j| row[j] as f64 * q[j]).collect()))
        .collect();
    det_f64(&rows)
}

/// Partials `(f_i, f_v)` of every branch of a resistive circuit, exactly.
fn resistive_partials(c: &Circuit, op: &OperatingPoint) -> Result<Vec<(Rational, Rational)>, AnalysisError> {
    linearize(c, op)?
        .into_iter()
        .enumerate()
        .map(|(j, lin)| match lin {
            DeviceLin::Resistive(h) => Ok((exact(-h.q), exact(h.p))),
            _ => Err(AnalysisError::Unsupported {
                analysis: "nondegeneracy test",
                branch: c.branch(j).name.clone(),
                kind: c.branch(j).kind,
            }),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Nondegeneracy {
    /// `Σ_T ∏ twig f_v · ∏ chord f_i`.
    pub sum: Rational,
    pub nondegenerate: bool,
}

/// Tree sum deciding whether a solution of a resistive circuit is
/// nondegenerate. The operating point must pass the residual checks.
pub fn nondegeneracy_sum(c: &Circuit, op: &OperatingPoint, tol: f64) -> Result<Nondegeneracy, AnalysisError> {
    check_operating_point(c, op, tol)?;
    let d = resistive_partials(c, op)?;
    let factors: Vec<(Rational, Rational)> = d.into_iter().map(|(fi, fv)| (fv, fi)).collect();
    let sum = tree_sum_rational(&spanning_trees(c), &factors);
    Ok(Nondegeneracy { nondegenerate: !sum.is_zero(), sum })
}

/// `det [[A, 0], [0, B], [diag f_i, diag f_v]]` in twigs-first order,
/// scaled by `(−1)^{m−n+1}` so that it matches the tree sum.
pub fn nondegeneracy_oracle(c: &Circuit, op: &OperatingPoint) -> Result<Rational, AnalysisError> {
    let d = resistive_partials(c, op)?;
    let (m, order) = twig_first(c);
    let b = order.len();
    let zero = || vec![Rational::zero(); b];
    let mut rows = Vec::with_capacity(2 * b);
    for row in &m.cut {
        let mut r: Vec<Rational> = order.iter().map(|&j| int(row[j])).collect();
        r.extend(zero());
        rows.push(r);
    }
    for row in &m.cycle {
        let mut r = zero();
        r.extend(order.iter().map(|&j| int(row[j])));
        rows.push(r);
    }
    for (k, &j) in order.iter().enumerate() {
        let mut r = vec![Rational::zero(); 2 * b];
        r[k] = d[j].0.clone();
        r[b + k] = d[j].1.clone();
        rows.push(r);
    }
    let det = det_rational(&rows);
    Ok(if c.nullity() % 2 == 1 { -det } else { det })
}
