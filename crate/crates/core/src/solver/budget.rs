use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{estimate_lipschitz_m, gamma_at_zero, Interval, RealFunction};

/// `|f'(x)|` at or below this counts as a vanishing derivative.
pub const DERIVATIVE_TOLERANCE: f64 = 1e-9;

/// `ω_Δ = ω_sol / OMEGA_DELTA_RATIO`.
pub const OMEGA_DELTA_RATIO: f64 = 100.0;

/// Safety factor on the sampled maximum of `|f'|`.
pub const SLOPE_SAFETY: f64 = 1.05;

/// Maximum number of ×2 bracket expansions.
pub const MAX_BRACKET_EXPANSIONS: usize = 8;

/// Tolerances and constants driving both searches for one `(f, x, ε)`.
///
/// `omega_sol` bounds the error of the returned δ, `omega_delta` the error of
/// each `Δ(δ)` evaluation and `omega_sup` the error of each supremum. They are
/// coupled through `omega_sup < omega_delta·Γ(0)/ε`, which keeps
/// `δ·omega_sup < omega_delta` for every `δ ≤ ε/Γ(0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorBudget {
    pub epsilon: f64,
    pub omega_sol: f64,
    pub omega_delta: f64,
    pub omega_sup: f64,
    /// Lipschitz constant of the Leibniz ratio on the window.
    pub lipschitz_m: f64,
    /// Upper bound of `|f'|` on the window, possibly infinite.
    pub lipschitz_l: f64,
    /// `Γ(0) = |f'(x)|`.
    pub gamma0: f64,
}

impl ErrorBudget {
    /// Checks the invariants that tie the tolerances together.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("epsilon", self.epsilon),
            ("omega_sol", self.omega_sol),
            ("omega_delta", self.omega_delta),
            ("omega_sup", self.omega_sup),
            ("M", self.lipschitz_m),
            ("L", self.lipschitz_l),
            ("gamma0", self.gamma0),
        ];
        if let Some((name, v)) = positive.iter().find(|(_, v)| v.is_nan() || *v <= 0.0) {
            return Err(Error::InvalidInput(format!("{name} must be positive, got {v}")));
        }
        if self.omega_delta > self.omega_sol / OMEGA_DELTA_RATIO {
            return Err(Error::InvalidInput(format!(
                "omega_delta = {} exceeds omega_sol / {OMEGA_DELTA_RATIO}",
                self.omega_delta
            )));
        }
        if self.omega_sup >= self.omega_delta * self.gamma0 / self.epsilon {
            return Err(Error::InvalidInput(format!(
                "omega_sup = {} violates omega_sup < omega_delta·Γ(0)/ε",
                self.omega_sup
            )));
        }
        Ok(())
    }
}

/// Samples `|f'|` on `window` and returns a safe upper bound for it.
/// A constant derivative is returned as is; otherwise the maximum is inflated
/// by [`SLOPE_SAFETY`]. A non-finite derivative yields `+∞`.
pub fn max_slope(f: &RealFunction, window: Interval, samples: usize) -> Result<f64> {
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for y in window.grid(samples.max(2)) {
        match f.derivative(y) {
            Ok(d) => {
                lo = lo.min(d.abs());
                hi = hi.max(d.abs());
            }
            Err(Error::NonFinite { .. }) => return Ok(f64::INFINITY),
            Err(e) => return Err(e),
        }
    }
    if hi - lo <= 1e-12 * hi {
        Ok(hi)
    } else {
        Ok(hi * SLOPE_SAFETY)
    }
}

/// Builds the [`ErrorBudget`] for solving at `(x, ε)` with target precision
/// `omega_sol`, estimating `L` and `M` on `window`.
pub fn make_budget(
    f: &RealFunction,
    x: f64,
    epsilon: f64,
    omega_sol: f64,
    window: Interval,
    samples: usize,
) -> Result<ErrorBudget> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidInput(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(omega_sol > 0.0 && omega_sol.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "omega_sol must be positive, got {omega_sol}"
        )));
    }
    let gamma0 = gamma_at_zero(f, x)?;
    if gamma0 <= DERIVATIVE_TOLERANCE {
        return Err(Error::ZeroDerivative { x, derivative: gamma0 });
    }
    let lipschitz_l = max_slope(f, window, samples)?;
    let lipschitz_m = estimate_lipschitz_m(f, x, window, samples)?;
    let omega_delta = omega_sol / OMEGA_DELTA_RATIO;
    let omega_sup = 0.5 * omega_delta * gamma0 / epsilon;
    let budget = ErrorBudget {
        epsilon,
        omega_sol,
        omega_delta,
        omega_sup,
        lipschitz_m,
        lipschitz_l,
        gamma0,
    };
    budget.validate()?;
    Ok(budget)
}

/// Closed interval `[a, b]`, `0 <= a < b`, of candidate δ values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bracket {
    a: f64,
    b: f64,
}

impl Bracket {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if a >= 0.0 && a < b && b.is_finite() {
            Ok(Bracket { a, b })
        } else {
            Err(Error::InvalidInterval { a, b })
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }
}

/// The a priori bounds `ε/L ≤ δ* ≤ ε/Γ(0)`. With unbounded `L` the lower end
/// becomes a tiny positive fraction of the upper one.
pub fn slope_bounds(epsilon: f64, budget: &ErrorBudget) -> (f64, f64) {
    let b = epsilon / budget.gamma0;
    let a = if budget.lipschitz_l.is_finite() {
        epsilon / budget.lipschitz_l
    } else {
        b * f64::EPSILON.sqrt()
    };
    (a, b)
}

/// Starts from [`slope_bounds`] and checks `Δ(a) ≤ ε ≤ Δ(b)`. While the
/// check fails (or the bounds coincide) the bracket grows to `[a/2, 2b]`, at
/// most [`MAX_BRACKET_EXPANSIONS`] times.
pub fn bracket_from_bounds<F>(epsilon: f64, budget: &ErrorBudget, mut delta_map: F) -> Result<Bracket>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = slope_bounds(epsilon, budget);
    for expansion in 0..=MAX_BRACKET_EXPANSIONS {
        if a < b && delta_map(a)? <= epsilon && delta_map(b)? >= epsilon {
            return Bracket::new(a, b);
        }
        if expansion < MAX_BRACKET_EXPANSIONS {
            a /= 2.0;
            b *= 2.0;
        }
    }
    Err(Error::BracketInvalid {
        epsilon,
        a,
        b,
        expansions: MAX_BRACKET_EXPANSIONS,
    })
}
