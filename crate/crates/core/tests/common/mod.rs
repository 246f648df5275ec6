#![allow(dead_code)]

use proptest::prelude::*;

use implicit_circuits::expr::{BinOp, Expr, Func};
use implicit_circuits::Rational;

/// Connected multigraph without self-loops: `(nodes, edges)`.
pub fn multigraph(max_nodes: usize, max_extra: usize) -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (2..=max_nodes)
        .prop_flat_map(move |n| {
            let parents: Vec<_> = (1..n).map(|k| (0..k, any::<bool>())).collect();
            (Just(n), parents, prop::collection::vec((0..n, 0..n), 0..=max_extra))
        })
        .prop_map(|(n, parents, extra)| {
            let mut edges: Vec<(usize, usize)> = parents
                .into_iter()
                .enumerate()
                .map(|(k, (p, flip))| if flip { (p, k + 1) } else { (k + 1, p) })
                .collect();
            edges.extend(extra.into_iter().filter(|(a, b)| a != b));
            (n, edges)
        })
}

/// Netlist text with the given branch prefixes and attribute strings.
pub fn netlist(edges: &[(usize, usize)], branches: &[(char, String)]) -> String {
    edges
        .iter()
        .zip(branches)
        .enumerate()
        .map(|(j, ((a, b), (prefix, attr)))| format!("{prefix}{} n{a} n{b} {attr}\n", j + 1))
        .collect()
}

pub fn expr_tree() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        Just(Expr::var("i")),
        Just(Expr::var("v")),
        Just(Expr::param("mu")),
        (0i64..=20, prop::sample::select(vec![1i64, 2, 4, 5, 8, 10])).prop_map(|(n, d)| Expr::rational(Rational::new(n.into(), d.into()))),
    ];
    // literals as the parser yields them: nonnegative finite decimals
    leaf.prop_recursive(5, 48, 2, |inner| {
        let bin = |op| (inner.clone(), inner.clone()).prop_map(move |(a, b)| Expr::Bin(op, Box::new(a), Box::new(b)));
        prop_oneof![
            bin(BinOp::Add),
            bin(BinOp::Sub),
            bin(BinOp::Mul),
            bin(BinOp::Div),
            inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
            (inner.clone(), prop_oneof![Just(Func::Sin), Just(Func::Cos), Just(Func::Tanh), Just(Func::Exp), Just(Func::Ln)])
                .prop_map(|(a, f)| Expr::Call(f, Box::new(a))),
            (inner, -3i32..=4).prop_map(|(a, k)| Expr::Pow(Box::new(a), k)),
        ]
    })
}
