//! Sparse multivariate polynomials with exact rational coefficients over
//! branch symbols (`P_j`, `Q_j`, `C_j`, `L_j`), named parameters and `λ`.
//!
//! ```
//! use implicit_circuits::poly::{MultiPoly, PolySymbol};
//!
//! let p1 = MultiPoly::symbol(PolySymbol::p("R1"));
//! let q2 = MultiPoly::symbol(PolySymbol::q("R2"));
//! let lam = MultiPoly::symbol(PolySymbol::lambda());
//! let f = &(&p1 * &q2) + &(&lam * &p1);
//! assert_eq!(f.to_string(), "P_R1*Q_R2 + P_R1*lambda");
//! ```

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::Rational;

/// Symbol roles, in printing order. `Lambda` sorts last.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Ind,
    Cap,
    P,
    Q,
    Param,
    Lambda,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PolySymbol {
    pub role: Role,
    /// Branch name for `P`/`Q`/`Cap`/`Ind`, parameter name for `Param`,
    /// empty for `Lambda`.
    pub name: String,
}

impl PolySymbol {
    pub fn new(role: Role, name: impl Into<String>) -> Self {
        PolySymbol { role, name: name.into() }
    }

    pub fn p(branch: &str) -> Self {
        Self::new(Role::P, branch)
    }

    pub fn q(branch: &str) -> Self {
        Self::new(Role::Q, branch)
    }

    pub fn cap(branch: &str) -> Self {
        Self::new(Role::Cap, branch)
    }

    pub fn ind(branch: &str) -> Self {
        Self::new(Role::Ind, branch)
    }

    pub fn param(name: &str) -> Self {
        Self::new(Role::Param, name)
    }

    pub fn lambda() -> Self {
        Self::new(Role::Lambda, "")
    }
}

impl fmt::Display for PolySymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.role {
            Role::P => write!(f, "P_{}", self.name),
            Role::Q => write!(f, "Q_{}", self.name),
            Role::Cap => write!(f, "C_{}", self.name),
            Role::Ind => write!(f, "L_{}", self.name),
            Role::Param => f.write_str(&self.name),
            Role::Lambda => f.write_str("lambda"),
        }
    }
}

/// Exponent map with no zero entries.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(BTreeMap<PolySymbol, u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(s: PolySymbol) -> Self {
        Monomial(BTreeMap::from([(s, 1)]))
    }

    pub fn from_powers(powers: impl IntoIterator<Item = (PolySymbol, u32)>) -> Self {
        let mut m = Monomial::one();
        for (s, k) in powers {
            if k > 0 {
                *m.0.entry(s).or_insert(0) += k;
            }
        }
        m
    }

    pub fn degree(&self) -> u32 {
        self.0.values().sum()
    }

    pub fn exponent(&self, s: &PolySymbol) -> u32 {
        self.0.get(s).copied().unwrap_or(0)
    }

    pub fn powers(&self) -> impl Iterator<Item = (&PolySymbol, u32)> {
        self.0.iter().map(|(s, &k)| (s, k))
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    fn times(&self, other: &Monomial) -> Monomial {
        let mut out = self.clone();
        for (s, &k) in &other.0 {
            *out.0.entry(s.clone()).or_insert(0) += k;
        }
        out
    }

    fn without(&self, s: &PolySymbol) -> Monomial {
        let mut out = self.clone();
        out.0.remove(s);
        out
    }

    /// Graded lexicographic order, largest first.
    fn grlex_desc(&self, other: &Monomial) -> Ordering {
        other.degree().cmp(&self.degree()).then_with(|| {
            let mut a = self.0.iter().peekable();
            let mut b = other.0.iter().peekable();
            loop {
                match (a.peek(), b.peek()) {
                    (None, None) => return Ordering::Equal,
                    (Some(_), None) => return Ordering::Less,
                    (None, Some(_)) => return Ordering::Greater,
                    (Some((sa, ka)), Some((sb, kb))) => match sa.cmp(sb) {
                        Ordering::Less => return Ordering::Less,
                        Ordering::Greater => return Ordering::Greater,
                        Ordering::Equal => {
                            if ka != kb {
                                return kb.cmp(ka);
                            }
                            a.next();
                            b.next();
                        }
                    },
                }
            }
        })
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        for (n, (s, k)) in self.0.iter().enumerate() {
            if n > 0 {
                f.write_str("*")?;
            }
            if *k == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{k}")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("symbol `{0}` is unbound")]
    Unbound(String),
    #[error("polynomial is not homogeneous of degree one in (P_{0}, Q_{0})")]
    NotMultihomogeneous(String),
}

/// Sparse polynomial: monomial to nonzero coefficient.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    terms: BTreeMap<Monomial, Rational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    /// Divide by `P_j`; `Q_j/P_j` becomes `R_j` (or `M_j` for a memristor).
    Current,
    /// Divide by `Q_j`; `P_j/Q_j` becomes `G_j` (or `W_j`).
    Voltage,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DehomChoice {
    pub branch: String,
    pub control: Control,
    pub memristor: bool,
}

impl DehomChoice {
    pub fn new(branch: &str, control: Control, memristor: bool) -> Self {
        DehomChoice { branch: branch.to_string(), control, memristor }
    }

    /// Name of the parameter replacing the surviving symbol.
    pub fn param_name(&self) -> String {
        let prefix = match (self.control, self.memristor) {
            (Control::Current, false) => "R",
            (Control::Voltage, false) => "G",
            (Control::Current, true) => "M",
            (Control::Voltage, true) => "W",
        };
        format!("{prefix}_{}", self.branch)
    }
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn int(c: i64) -> Self {
        Self::constant(Rational::from_integer(c.into()))
    }

    pub fn symbol(s: PolySymbol) -> Self {
        Self::term(Monomial::var(s), Rational::one())
    }

    pub fn term(m: Monomial, c: Rational) -> Self {
        let mut p = MultiPoly::zero();
        p.add_term(m, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// The constant value, if the polynomial has no symbols.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero();
        }
        MultiPoly { terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    pub fn pow(&self, k: u32) -> MultiPoly {
        (0..k).fold(MultiPoly::one(), |acc, _| &acc * self)
    }

    /// Highest exponent of `s` over all terms.
    pub fn degree_in(&self, s: &PolySymbol) -> u32 {
        self.terms.keys().map(|m| m.exponent(s)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Every symbol that occurs.
    pub fn symbols(&self) -> Vec<PolySymbol> {
        let mut out: Vec<PolySymbol> =
            self.terms.keys().flat_map(|m| m.0.keys().cloned()).collect();
        out.sort();
        out.dedup();
        out
    }

    /// Coefficients of powers of `s`, lowest first, trailing zeros trimmed.
    pub fn coefficients_in(&self, s: &PolySymbol) -> Vec<MultiPoly> {
        let mut out = vec![MultiPoly::zero(); self.degree_in(s) as usize + 1];
        for (m, c) in &self.terms {
            out[m.exponent(s) as usize].add_term(m.without(s), c.clone());
        }
        while out.len() > 1 && out.last().is_some_and(MultiPoly::is_zero) {
            out.pop();
        }
        out
    }

    pub fn lambda_coefficients(&self) -> Vec<MultiPoly> {
        self.coefficients_in(&PolySymbol::lambda())
    }

    /// Replaces `s` by the polynomial `by`.
    pub fn substitute(&self, s: &PolySymbol, by: &MultiPoly) -> MultiPoly {
        let coeffs = self.coefficients_in(s);
        let mut out = MultiPoly::zero();
        let mut power = MultiPoly::one();
        for (k, c) in coeffs.iter().enumerate() {
            if k > 0 {
                power = &power * by;
            }
            out = &out + &(c * &power);
        }
        out
    }

    /// Substitutes every bound symbol by its value; unbound ones remain.
    pub fn partial_eval(&self, values: &BTreeMap<PolySymbol, Rational>) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut rest = Monomial::one();
            for (s, &k) in &m.0 {
                match values.get(s) {
                    Some(x) => coeff *= num_traits::pow(x.clone(), k as usize),
                    None => {
                        rest.0.insert(s.clone(), k);
                    }
                }
            }
            out.add_term(rest, coeff);
        }
        out
    }

    pub fn eval(&self, values: &BTreeMap<PolySymbol, Rational>) -> Result<Rational, PolyError> {
        let reduced = self.partial_eval(values);
        reduced.as_constant().ok_or_else(|| unbound(&reduced))
    }

    /// Coefficient vector in `λ` after binding every other symbol.
    pub fn eval_lambda(
        &self,
        values: &BTreeMap<PolySymbol, Rational>,
    ) -> Result<Vec<Rational>, PolyError> {
        self.partial_eval(values)
            .lambda_coefficients()
            .into_iter()
            .map(|c| c.as_constant().ok_or_else(|| unbound(&c)))
            .collect()
    }

    pub fn eval_f64(&self, values: &BTreeMap<PolySymbol, f64>) -> Result<f64, PolyError> {
        let mut sum = 0.0;
        for (m, c) in &self.terms {
            let mut t = c.to_f64().unwrap_or(f64::NAN);
            for (s, &k) in &m.0 {
                let x = values.get(s).ok_or_else(|| PolyError::Unbound(s.to_string()))?;
                t *= x.powi(k as i32);
            }
            sum += t;
        }
        Ok(sum)
    }

    /// Divides out `P_j` or `Q_j` for each choice and renames the survivor
    /// to the corresponding parameter.
    pub fn dehomogenize(&self, choices: &[DehomChoice]) -> Result<MultiPoly, PolyError> {
        let mut p = self.clone();
        for choice in choices {
            let (ps, qs) = (PolySymbol::p(&choice.branch), PolySymbol::q(&choice.branch));
            let homogeneous = p.terms.keys().all(|m| m.exponent(&ps) + m.exponent(&qs) == 1);
            if !homogeneous || p.is_zero() {
                return Err(PolyError::NotMultihomogeneous(choice.branch.clone()));
            }
            let param = MultiPoly::symbol(PolySymbol::param(&choice.param_name()));
            let (unit, renamed) = match choice.control {
                Control::Current => (ps, qs),
                Control::Voltage => (qs, ps),
            };
            p = p.substitute(&unit, &MultiPoly::one()).substitute(&renamed, &param);
        }
        Ok(p)
    }

    /// Whether every term has total degree exactly one in the given symbols.
    pub fn is_homogeneous_of_degree_one_in(&self, symbols: &[PolySymbol]) -> bool {
        self.terms.keys().all(|m| symbols.iter().map(|s| m.exponent(s)).sum::<u32>() == 1)
    }

    /// Terms in canonical (graded lexicographic, largest first) order.
    pub fn sorted_terms(&self) -> Vec<(&Monomial, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| a.0.grlex_desc(b.0));
        v
    }
}

fn unbound(p: &MultiPoly) -> PolyError {
    let s = p.symbols().into_iter().next().map(|s| s.to_string()).unwrap_or_default();
    PolyError::Unbound(s)
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self + &(-rhs)
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.times(mb), ca * cb);
            }
        }
        out
    }
}

impl Add for MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: MultiPoly) -> MultiPoly {
        &self + &rhs
    }
}

impl Sub for MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: MultiPoly) -> MultiPoly {
        &self - &rhs
    }
}

impl Mul for MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: MultiPoly) -> MultiPoly {
        &self * &rhs
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

macro_rules! mixed_ops {
    ($($trait:ident $method:ident),*) => {$(
        impl $trait<&MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: &MultiPoly) -> MultiPoly {
                (&self).$method(rhs)
            }
        }

        impl $trait<MultiPoly> for &MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: MultiPoly) -> MultiPoly {
                self.$method(&rhs)
            }
        }
    )*};
}

mixed_ops!(Add add, Sub sub, Mul mul);

impl std::iter::Sum for MultiPoly {
    fn sum<I: Iterator<Item = MultiPoly>>(iter: I) -> MultiPoly {
        iter.fold(MultiPoly::zero(), |acc, p| &acc + &p)
    }
}

impl std::iter::Product for MultiPoly {
    fn product<I: Iterator<Item = MultiPoly>>(iter: I) -> MultiPoly {
        iter.fold(MultiPoly::one(), |acc, p| &acc * &p)
    }
}

pub(crate) fn fmt_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (n, (m, c)) in self.sorted_terms().into_iter().enumerate() {
            let mag = c.abs();
            match (n, c.is_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if m.is_one() {
                f.write_str(&fmt_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", fmt_rational(&mag))?;
            }
        }
        Ok(())
    }
}
