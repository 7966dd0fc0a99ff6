//! The composed ε–δ solver.
//!
//! [`solve`] estimates the constants of an [`ErrorBudget`] on a window around
//! `x`, brackets the root of `Δ(δ) = ε` between `ε/L` and `ε/Γ(0)`, and runs
//! bisection with `Δ` evaluated by ternary search. Both stages take a number
//! of steps logarithmic in their tolerance, so the whole solve is
//! polylogarithmic in `1/omega_sol`.

mod bisection;
mod budget;
mod hypotheses;

use serde::Serialize;

use crate::error::{Error, Result, Stage};
use crate::numerics::{DeltaMap, Interval, RealFunction, DEFAULT_TERNARY_MAX_ITERS};

pub use bisection::{binary_search_root, binary_search_root_uncached, RootResult, DEFAULT_BINARY_MAX_ITERS};
pub use budget::{
    bracket_from_bounds, make_budget, max_slope, slope_bounds, Bracket, ErrorBudget, DERIVATIVE_TOLERANCE,
    MAX_BRACKET_EXPANSIONS, OMEGA_DELTA_RATIO, SLOPE_SAFETY,
};
pub use hypotheses::{check_hypotheses, HypothesisReport};

/// Default tolerance on the returned δ.
pub const DEFAULT_OMEGA_SOL: f64 = 1e-6;

/// Fraction of the distance to the nearest domain obstruction that the
/// default window may cover.
pub const WINDOW_MARGIN: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    /// The computed δ, within `omega_sol` of the maximal suitable δ.
    pub delta: f64,
    /// `|Δ(delta) - ε|` as evaluated by the search.
    pub residual: f64,
    pub bracket: Bracket,
    pub binary_iterations: usize,
    pub ternary_iterations_total: usize,
    pub budget: ErrorBudget,
    /// Sampled hypotheses that failed. The result may still be correct.
    pub warnings: Vec<String>,
}

/// Sampling densities and iteration caps used by [`Solver`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Grid size for estimating `L` and `M` on the window.
    pub constant_samples: usize,
    /// Grid size for the hypothesis checks; `0` skips them.
    pub hypothesis_samples: usize,
    pub binary_max_iters: usize,
    pub ternary_max_iters: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            constant_samples: 256,
            hypothesis_samples: 128,
            binary_max_iters: DEFAULT_BINARY_MAX_ITERS,
            ternary_max_iters: DEFAULT_TERNARY_MAX_ITERS,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Solver {
    pub options: SolverOptions,
}

impl Solver {
    pub fn new(options: SolverOptions) -> Self {
        Solver { options }
    }

    pub fn solve(
        &self,
        f: &RealFunction,
        x: f64,
        epsilon: f64,
        omega_sol: f64,
        window: Interval,
    ) -> Result<SolveReport> {
        if !f.domain().contains(x) {
            return Err(Error::OutsideDomain {
                label: f.label().to_owned(),
                y: x,
            });
        }
        if !window.contains(x) {
            return Err(Error::InvalidInput(format!(
                "window [{}, {}] does not contain x = {x}",
                window.lo(),
                window.hi()
            )));
        }
        let budget = make_budget(f, x, epsilon, omega_sol, window, self.options.constant_samples)
            .map_err(|e| e.at(Stage::Budget))?;

        let warnings = if self.options.hypothesis_samples > 0 {
            check_hypotheses(f, x, window, self.options.hypothesis_samples).diagnostics
        } else {
            Vec::new()
        };

        let map = DeltaMap::new(f, x, &budget)
            .map_err(|e| e.at(Stage::Bracket))?
            .with_max_iters(self.options.ternary_max_iters);
        let bracket = bracket_from_bounds(epsilon, &budget, |d| map.eval(d)).map_err(|e| e.at(Stage::Bracket))?;
        let root = binary_search_root(
            |d| map.eval(d),
            epsilon,
            bracket,
            omega_sol,
            self.options.binary_max_iters,
        )
        .map_err(|e| e.at(Stage::RootSearch))?;

        Ok(SolveReport {
            delta: root.delta,
            residual: root.residual,
            bracket,
            binary_iterations: root.iterations,
            ternary_iterations_total: map.ternary_iterations(),
            budget,
            warnings,
        })
    }
}

/// Maximal δ with `|y - x| < δ ⇒ |f(y) - f(x)| < ε`, to within `omega_sol`,
/// using default [`SolverOptions`].
///
/// ```
/// use epsdelta::{catalog, numerics::Interval, solver::solve};
///
/// let exp1 = catalog::entry_exponential();
/// let window = Interval::centered(0.0, 1.0).unwrap();
/// let report = solve(&exp1.function, 0.0, 0.5, 1e-6, window).unwrap();
/// assert!((report.delta - 1.5f64.ln()).abs() < 1e-6);
/// ```
pub fn solve(f: &RealFunction, x: f64, epsilon: f64, omega_sol: f64, window: Interval) -> Result<SolveReport> {
    Solver::default().solve(f, x, epsilon, omega_sol, window)
}

/// `[x - r, x + r]` with `r = min(radius, 0.9 × distance to the nearest
/// boundary or excluded point)`.
pub fn default_window(f: &RealFunction, x: f64, radius: f64) -> Result<Interval> {
    if !f.domain().contains(x) {
        return Err(Error::OutsideDomain {
            label: f.label().to_owned(),
            y: x,
        });
    }
    let r = radius.min(WINDOW_MARGIN * f.domain().distance_to_boundary(x));
    Interval::centered(x, r)
}
