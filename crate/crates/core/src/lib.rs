//! Maximal δ in the ε–δ definition of continuity.
//!
//! For a real function `f`, a point `x` and a tolerance `ε > 0`, the
//! continuity function `Π(x, ε)` is the largest δ such that `|y - x| < δ`
//! implies `|f(y) - f(x)| < ε`. This crate computes it numerically.
//!
//! With the Leibniz ratio `L(y) = |f(x) - f(y)| / |x - y|` and
//! `Γ(δ) = sup { L(y) : |y - x| ≤ δ }`, the maximal δ is the root of
//! `ε = δ·Γ(δ)`. [`solver::solve`] brackets that root, finds it by bisection,
//! and evaluates `Γ` at each step by ternary search.
//!
//! ```
//! use epsdelta::{catalog, solver};
//!
//! let f = catalog::entry_exponential().function;
//! let window = solver::default_window(&f, 1.0, 1.0).unwrap();
//! let report = solver::solve(&f, 1.0, 0.2, 1e-6, window).unwrap();
//! assert!((report.delta - (1.0 + (0.2 + (-1.0f64).exp()).ln())).abs() < 2e-6);
//! ```

pub mod catalog;
pub mod diff;
pub mod error;
pub mod expr;
pub mod manifold;
pub mod numerics;
pub mod solver;
pub mod validate;

pub use error::{Error, Result, Stage};
pub use expr::Expression;
pub use numerics::{Domain, Interval, RealFunction};
pub use solver::{solve, SolveReport};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/expressions.md")]
    mod expressions {}
    #[doc = include_str!("../../../book/src/leibniz-ratio.md")]
    mod leibniz_ratio {}
    #[doc = include_str!("../../../book/src/solving.md")]
    mod solving {}
    #[doc = include_str!("../../../book/src/catalog.md")]
    mod catalog {}
    #[doc = include_str!("../../../book/src/manifold.md")]
    mod manifold {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
