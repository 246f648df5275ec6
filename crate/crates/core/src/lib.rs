//! Tree-based analysis of nonlinear circuits whose devices are given by
//! implicit characteristics `f(i, v) = 0` or `f(σ, φ) = 0`.
//!
//! Every device enters the analysis through a homogeneous pair: `(f_v : −f_i)`
//! for resistors and sources, `(f_φ : −f_σ)` for memristors. Sums over the
//! spanning trees of the circuit graph then give
//!
//! - the Kirchhoff polynomial ([`analysis::kirchhoff_poly`]),
//! - the nondegeneracy sum of a resistive operating point
//!   ([`analysis::nondegeneracy_sum`]),
//! - the characteristic polynomial at an equilibrium ([`analysis::char_poly`]),
//!
//! each checked against a determinant built from the fundamental cutset and
//! cycle matrices. [`bifurcation`] builds a transcritical bifurcation test
//! on top of these.
//!
//! ```
//! use implicit_circuits::analysis::kirchhoff_poly;
//! use implicit_circuits::netlist::parse_netlist;
//!
//! let c = parse_netlist("R1 a b f=\"v - 2*i\"\nR2 b a f=\"i - v\"\n").unwrap();
//! assert_eq!(kirchhoff_poly(&c).to_string(), "P_R1*Q_R2 + P_R2*Q_R1");
//! ```

pub mod analysis;
pub mod bifurcation;
pub mod expr;
pub mod graph;
pub mod linalg;
pub mod netlist;
pub mod operating_point;
pub mod poly;
pub mod projective;

/// Exact rational numbers used for literals and polynomial coefficients.
pub type Rational = num_rational::BigRational;
