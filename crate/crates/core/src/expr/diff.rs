use num_traits::{One, Zero};

use super::{BinOp, Expr, Func};
use crate::Rational;

pub(super) fn diff(e: &Expr, x: &str) -> Expr {
    match e {
        Expr::Num(_) => zero(),
        Expr::Var(n) | Expr::Param(n) => {
            if n == x {
                Expr::num(1)
            } else {
                zero()
            }
        }
        Expr::Neg(a) => neg(diff(a, x)),
        Expr::Bin(BinOp::Add, l, r) => add(diff(l, x), diff(r, x)),
        Expr::Bin(BinOp::Sub, l, r) => sub(diff(l, x), diff(r, x)),
        Expr::Bin(BinOp::Mul, l, r) => add(
            mul(diff(l, x), (**r).clone()),
            mul((**l).clone(), diff(r, x)),
        ),
        Expr::Bin(BinOp::Div, l, r) => {
            let (dl, dr) = (diff(l, x), diff(r, x));
            if dr.is_zero() {
                return div(dl, (**r).clone());
            }
            div(
                sub(mul(dl, (**r).clone()), mul((**l).clone(), dr)),
                pow((**r).clone(), 2),
            )
        }
        Expr::Pow(a, k) => {
            if *k == 0 {
                return zero();
            }
            mul(mul(Expr::num(*k as i64), pow((**a).clone(), k - 1)), diff(a, x))
        }
        Expr::Call(f, a) => {
            let da = diff(a, x);
            if da.is_zero() {
                return zero();
            }
            let a = (**a).clone();
            let outer = match f {
                Func::Sin => Expr::Call(Func::Cos, Box::new(a)),
                Func::Cos => neg(Expr::Call(Func::Sin, Box::new(a))),
                Func::Exp => Expr::Call(Func::Exp, Box::new(a)),
                Func::Tanh => sub(Expr::num(1), pow(Expr::Call(Func::Tanh, Box::new(a)), 2)),
                Func::Ln => return div(da, a),
            };
            mul(outer, da)
        }
    }
}

fn zero() -> Expr {
    Expr::Num(Rational::zero())
}

// Smart constructors: fold constants and drop additive/multiplicative
// identities so derivatives stay readable. No further simplification.

fn num_pair(a: &Expr, b: &Expr) -> Option<(Rational, Rational)> {
    match (a, b) {
        (Expr::Num(x), Expr::Num(y)) => Some((x.clone(), y.clone())),
        _ => None,
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    if let Some((x, y)) = num_pair(&a, &b) {
        return Expr::Num(x + y);
    }
    if a.is_zero() {
        b
    } else if b.is_zero() {
        a
    } else {
        a + b
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    if let Some((x, y)) = num_pair(&a, &b) {
        return Expr::Num(x - y);
    }
    if b.is_zero() {
        a
    } else if a.is_zero() {
        neg(b)
    } else {
        a - b
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    if let Some((x, y)) = num_pair(&a, &b) {
        return Expr::Num(x * y);
    }
    if a.is_zero() || b.is_zero() {
        zero()
    } else if a.is_one() {
        b
    } else if b.is_one() {
        a
    } else {
        a * b
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    if a.is_zero() {
        zero()
    } else if b.is_one() {
        a
    } else {
        a / b
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Num(x) => Expr::Num(-x),
        Expr::Neg(inner) => *inner,
        other => -other,
    }
}

fn pow(a: Expr, k: i32) -> Expr {
    match k {
        0 => Expr::Num(Rational::one()),
        1 => a,
        _ => Expr::Pow(Box::new(a), k),
    }
}
