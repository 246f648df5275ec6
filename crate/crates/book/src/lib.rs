//! Code listings from the guide in `book/src`, one module per chapter so that
//! `cargo test --doc` runs them.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/netlists.md")]
pub mod netlists {}
#[doc = include_str!("../../../book/src/expressions.md")]
pub mod expressions {}
#[doc = include_str!("../../../book/src/projective.md")]
pub mod projective {}
#[doc = include_str!("../../../book/src/kirchhoff.md")]
pub mod kirchhoff {}
#[doc = include_str!("../../../book/src/charpoly.md")]
pub mod charpoly {}
#[doc = include_str!("../../../book/src/bifurcation.md")]
pub mod bifurcation {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
