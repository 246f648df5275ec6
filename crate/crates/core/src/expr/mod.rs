//! Scalar expressions used as device characteristics.
//!
//! An [`Expr`] is a small AST over named variables (`i`, `v`, `sigma`, `phi`
//! by default) and parameters. Numeric literals are kept as exact rationals,
//! so a characteristic such as `i - 0.5*v` carries the coefficient `1/2`
//! exactly. Expressions can be evaluated in double precision and
//! differentiated symbolically.
//!
//! ```
//! use implicit_circuits::expr::{parse_expr, Bindings};
//!
//! let f = parse_expr("i - mu*v - v^2").unwrap();
//! let df_dv = f.diff("v");
//! let b = Bindings::from_pairs([("i", 0.0), ("v", 1.0), ("mu", 0.5)]);
//! assert_eq!(df_dv.eval(&b).unwrap(), -2.5);
//! ```

mod diff;
mod parse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::Rational;

pub use parse::{parse_expr, parse_expr_with, ParseError, DEFAULT_VARIABLES};

/// Elementary functions accepted in function-call syntax.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Tanh,
    Ln,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Tanh => "tanh",
            Func::Ln => "ln",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "tanh" => Func::Tanh,
            "ln" => Func::Ln,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }
}

/// Expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(Rational),
    Var(String),
    Param(String),
    Neg(Box<Expr>),
    Call(Func, Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    /// Integer power. Negative exponents are allowed.
    Pow(Box<Expr>, i32),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound name `{0}`")]
    Unbound(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("ln of non-positive value {0}")]
    LnDomain(f64),
}

/// Values for variables and parameters, keyed by name.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Bindings {
    values: BTreeMap<String, f64>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<'a, I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (&'a str, f64)>,
    {
        let mut b = Bindings::new();
        for (k, v) in pairs {
            b.set(k, v);
        }
        b
    }

    pub fn set(&mut self, name: &str, value: f64) {
        self.values.insert(name.to_string(), value);
    }

    /// Copy with one extra (or replaced) binding.
    pub fn with(&self, name: &str, value: f64) -> Self {
        let mut b = self.clone();
        b.set(name, value);
        b
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }

    pub fn extend(&mut self, other: &Bindings) {
        for (k, v) in &other.values {
            self.values.insert(k.clone(), *v);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

impl Expr {
    pub fn num(value: i64) -> Expr {
        Expr::Num(Rational::from_integer(value.into()))
    }

    pub fn rational(value: Rational) -> Expr {
        Expr::Num(value)
    }

    /// Exact rational image of a finite double.
    pub fn from_f64(value: f64) -> Expr {
        Expr::Num(Rational::from_float(value).expect("finite value"))
    }

    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    pub fn param(name: &str) -> Expr {
        Expr::Param(name.to_string())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Num(r) if r.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Expr::Num(r) if r.is_one())
    }

    pub fn eval(&self, b: &Bindings) -> Result<f64, EvalError> {
        Ok(match self {
            Expr::Num(r) => rational_to_f64(r),
            Expr::Var(n) | Expr::Param(n) => b.get(n).ok_or_else(|| EvalError::Unbound(n.clone()))?,
            Expr::Neg(a) => -a.eval(b)?,
            Expr::Call(f, a) => {
                let x = a.eval(b)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Tanh => x.tanh(),
                    Func::Ln => {
                        if x <= 0.0 {
                            return Err(EvalError::LnDomain(x));
                        }
                        x.ln()
                    }
                }
            }
            Expr::Bin(op, l, r) => {
                let (x, y) = (l.eval(b)?, r.eval(b)?);
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        if y == 0.0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        x / y
                    }
                }
            }
            Expr::Pow(a, k) => {
                let x = a.eval(b)?;
                if *k < 0 && x == 0.0 {
                    return Err(EvalError::DivisionByZero);
                }
                x.powi(*k)
            }
        })
    }

    /// Exact symbolic partial derivative with respect to `name`, which may
    /// be a variable or a parameter.
    pub fn diff(&self, name: &str) -> Expr {
        diff::diff(self, name)
    }

    /// All variable names referenced.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |e| {
            if let Expr::Var(n) = e {
                out.insert(n.clone());
            }
        });
        out
    }

    /// All parameter names referenced.
    pub fn parameters(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |e| {
            if let Expr::Param(n) = e {
                out.insert(n.clone());
            }
        });
        out
    }

    pub fn references(&self, name: &str) -> bool {
        let mut found = false;
        self.walk(&mut |e| match e {
            Expr::Var(n) | Expr::Param(n) if n == name => found = true,
            _ => {}
        });
        found
    }

    fn walk(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Num(_) | Expr::Var(_) | Expr::Param(_) => {}
            Expr::Neg(a) | Expr::Call(_, a) | Expr::Pow(a, _) => a.walk(f),
            Expr::Bin(_, l, r) => {
                l.walk(f);
                r.walk(f);
            }
        }
    }

    /// Replace every reference to `name` (variable or parameter) by `with`.
    pub fn substitute(&self, name: &str, with: &Expr) -> Expr {
        match self {
            Expr::Var(n) | Expr::Param(n) if n == name => with.clone(),
            Expr::Num(_) | Expr::Var(_) | Expr::Param(_) => self.clone(),
            Expr::Neg(a) => Expr::Neg(Box::new(a.substitute(name, with))),
            Expr::Call(f, a) => Expr::Call(*f, Box::new(a.substitute(name, with))),
            Expr::Pow(a, k) => Expr::Pow(Box::new(a.substitute(name, with)), *k),
            Expr::Bin(op, l, r) => Expr::Bin(
                *op,
                Box::new(l.substitute(name, with)),
                Box::new(r.substitute(name, with)),
            ),
        }
    }

    /// Re-tag names: those in `variables` become [`Expr::Var`], all others
    /// [`Expr::Param`].
    pub fn reclassify(&self, variables: &[&str]) -> Expr {
        match self {
            Expr::Var(n) | Expr::Param(n) => {
                if variables.contains(&n.as_str()) {
                    Expr::Var(n.clone())
                } else {
                    Expr::Param(n.clone())
                }
            }
            Expr::Num(_) => self.clone(),
            Expr::Neg(a) => Expr::Neg(Box::new(a.reclassify(variables))),
            Expr::Call(f, a) => Expr::Call(*f, Box::new(a.reclassify(variables))),
            Expr::Pow(a, k) => Expr::Pow(Box::new(a.reclassify(variables)), *k),
            Expr::Bin(op, l, r) => Expr::Bin(
                *op,
                Box::new(l.reclassify(variables)),
                Box::new(r.reclassify(variables)),
            ),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Expr::Num(_) | Expr::Var(_) | Expr::Param(_) => 1,
            Expr::Neg(a) | Expr::Call(_, a) | Expr::Pow(a, _) => 1 + a.depth(),
            Expr::Bin(_, l, r) => 1 + l.depth().max(r.depth()),
        }
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::Bin(BinOp::Add, Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::Bin(BinOp::Sub, Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::Bin(BinOp::Mul, Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::Bin(BinOp::Div, Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

pub(crate) fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // numerator/denominator too large for a direct conversion
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Decimal text of `r` when its denominator has only factors 2 and 5.
fn finite_decimal(r: &Rational) -> Option<String> {
    let mut den = r.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0u32, 0u32);
    while den.is_even() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return None;
    }
    let k = twos.max(fives);
    let scale = num_traits::pow(BigInt::from(10), k as usize) / r.denom();
    let digits = (r.numer().abs() * scale).to_string();
    let sign = if r.is_negative() { "-" } else { "" };
    if k == 0 {
        return Some(format!("{sign}{digits}"));
    }
    let k = k as usize;
    let padded = format!("{digits:0>width$}", width = k + 1);
    let (int, frac) = padded.split_at(padded.len() - k);
    Some(format!("{sign}{int}.{frac}"))
}

fn fmt_number(r: &Rational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match finite_decimal(&r.abs()) {
        Some(s) if r.is_negative() => write!(f, "(-{s})"),
        Some(s) => write!(f, "{s}"),
        None if r.is_negative() => write!(f, "(-({} / {}))", r.numer().abs(), r.denom()),
        None => write!(f, "({} / {})", r.numer(), r.denom()),
    }
}

/// Fully parenthesized canonical form; parses back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(r) => fmt_number(r, f),
            Expr::Var(n) | Expr::Param(n) => write!(f, "{n}"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
            Expr::Bin(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
            Expr::Pow(a, k) => write!(f, "({a} ^ {k})"),
        }
    }
}
