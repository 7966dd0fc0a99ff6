//! Leibniz ratio, its supremum `Γ(δ)` over a δ-ball and the map
//! `Δ(δ) = δ·Γ(δ)`.
//!
//! For a point `x`, the Leibniz ratio `L_x f(y) = |f(x) - f(y)| / |x - y|`
//! measures the steepest secant through `(x, f(x))`. Its supremum over the
//! punctured closed ball of radius `δ` is `Γ(δ)`, and the maximal suitable
//! `δ` for a tolerance `ε` solves `ε = δ·Γ(δ)`.

mod function;
mod ternary;

use std::cell::Cell;

use crate::error::{Error, Result};
use crate::solver::ErrorBudget;

pub use function::{Domain, EvalCounter, Interval, RealFunction};
pub use ternary::{ternary_search_sup, ternary_search_sup_traced, SupremumResult, DEFAULT_TERNARY_MAX_ITERS};

/// Returned by [`estimate_lipschitz_m`] when the ratio is constant on the window.
pub const LIPSCHITZ_FLOOR: f64 = 1e-12;

/// Safety factor applied to the sampled maximum slope in [`estimate_lipschitz_m`].
pub const LIPSCHITZ_SAFETY: f64 = 2.0;

/// `|x - y|` below which the two points count as coincident.
pub fn coincidence_threshold(x: f64) -> f64 {
    4.0 * f64::EPSILON * x.abs().max(1.0)
}

/// `|f(x) - f(y)| / |x - y|`.
pub fn leibniz_ratio(f: &RealFunction, x: f64, y: f64) -> Result<f64> {
    if (x - y).abs() < coincidence_threshold(x) {
        return Err(Error::CoincidentPoints { x, y });
    }
    Ok((f.eval(x)? - f.eval(y)?).abs() / (x - y).abs())
}

/// `Γ(0) = |f'(x)|`, the limit of the Leibniz ratio as `y → x`.
pub fn gamma_at_zero(f: &RealFunction, x: f64) -> Result<f64> {
    Ok(f.derivative(x)?.abs())
}

/// The Leibniz ratio around a fixed `x`, extended continuously to `y = x`
/// by `Γ(0)`. Caches `f(x)`.
#[derive(Debug, Clone)]
pub struct LeibnizRatio<'f> {
    f: &'f RealFunction,
    x: f64,
    fx: f64,
    gamma0: f64,
}

impl<'f> LeibnizRatio<'f> {
    pub fn new(f: &'f RealFunction, x: f64) -> Result<Self> {
        let gamma0 = gamma_at_zero(f, x)?;
        Self::with_gamma0(f, x, gamma0)
    }

    pub fn with_gamma0(f: &'f RealFunction, x: f64, gamma0: f64) -> Result<Self> {
        Ok(LeibnizRatio {
            f,
            x,
            fx: f.eval(x)?,
            gamma0,
        })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    pub fn at(&self, y: f64) -> Result<f64> {
        if (y - self.x).abs() < coincidence_threshold(self.x) {
            Ok(self.gamma0)
        } else {
            Ok((self.fx - self.f.eval(y)?).abs() / (self.x - y).abs())
        }
    }

    /// The search interval `[x - δ, x + δ]` cut back to the piece of the
    /// domain containing `x`, staying a few ulps clear of open ends.
    pub fn ball(&self, delta: f64) -> Result<(f64, f64)> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "ball radius must be positive, got {delta}"
            )));
        }
        let (left, right) = self.f.domain().component(self.x).ok_or_else(|| Error::OutsideDomain {
            label: self.f.label().to_owned(),
            y: self.x,
        })?;
        let lo = (self.x - delta).max(left + coincidence_threshold(left));
        let hi = (self.x + delta).min(right - coincidence_threshold(right));
        if lo < hi {
            Ok((lo, hi))
        } else {
            Err(Error::InvalidInterval { a: lo, b: hi })
        }
    }

    /// `Γ(δ)` by ternary search over [`LeibnizRatio::ball`].
    pub fn sup_over_ball(&self, delta: f64, tol: f64, lipschitz: f64, max_iters: usize) -> Result<SupremumResult> {
        let (lo, hi) = self.ball(delta)?;
        ternary_search_sup(|y| self.at(y), lo, hi, tol, lipschitz, max_iters)
    }
}

/// Lipschitz constant of the Leibniz ratio on `window`.
///
/// Samples `g(y) = (f(y) - f(x)) / (y - x)` (with `g(x) = f'(x)`) on a
/// uniform grid, takes the largest slope between neighbouring samples and
/// doubles it. When every slope is within rounding noise of zero the ratio is
/// treated as constant and [`LIPSCHITZ_FLOOR`] is returned.
pub fn estimate_lipschitz_m(f: &RealFunction, x: f64, window: Interval, samples: usize) -> Result<f64> {
    if samples < 16 {
        return Err(Error::InvalidInput(format!("need at least 16 samples, got {samples}")));
    }
    if !window.contains(x) {
        return Err(Error::InvalidInput(format!(
            "window [{}, {}] does not contain x = {x}",
            window.lo(),
            window.hi()
        )));
    }
    if !f.domain().contains_interval(window.lo(), window.hi()) {
        return Err(Error::OutsideDomain {
            label: f.label().to_owned(),
            y: if f.domain().contains(window.lo()) {
                window.hi()
            } else {
                window.lo()
            },
        });
    }
    let fx = f.eval(x)?;
    let d1 = f.derivative(x)?;
    let pitch = window.width() / (samples - 1) as f64;

    let mut f_scale = fx.abs();
    let mut nearest = f64::INFINITY;
    let mut g = Vec::with_capacity(samples);
    for y in window.grid(samples) {
        let dy = y - x;
        if dy.abs() < coincidence_threshold(x) {
            g.push(d1);
        } else {
            let fy = f.eval(y)?;
            f_scale = f_scale.max(fy.abs());
            nearest = nearest.min(dy.abs());
            g.push((fy - fx) / dy);
        }
    }
    let raw = g.windows(2).map(|w| (w[1] - w[0]).abs() / pitch).fold(0.0, f64::max);

    // Worst-case rounding error of a single g sample, then of a slope.
    let g_noise = 4.0 * f64::EPSILON * f_scale.max(1.0) / nearest;
    let slope_noise = 2.0 * g_noise / pitch;
    if raw <= slope_noise {
        Ok(LIPSCHITZ_FLOOR)
    } else {
        Ok(LIPSCHITZ_SAFETY * raw)
    }
}

/// `Γ(δ)`: the supremum of the Leibniz ratio around `x` over the closed
/// δ-ball (clipped to the domain), accurate to `tol`.
///
/// ```
/// use epsdelta::numerics::{gamma, Domain, RealFunction};
///
/// let f = RealFunction::new("1-exp(-y)", Domain::real_line(), |y| 1.0 - (-y).exp())
///     .with_derivatives(|y| (-y).exp(), |y| -(-y).exp());
/// let g = gamma(&f, 0.0, 1.0, 1e-9, 2.0).unwrap();
/// assert!((g - (std::f64::consts::E - 1.0)).abs() < 1e-9);
/// ```
pub fn gamma(f: &RealFunction, x: f64, delta: f64, tol: f64, lipschitz: f64) -> Result<f64> {
    let ratio = LeibnizRatio::new(f, x)?;
    Ok(ratio
        .sup_over_ball(delta, tol, lipschitz, DEFAULT_TERNARY_MAX_ITERS)?
        .value)
}

/// `Δ(δ) = δ·Γ(δ)` with the ternary tolerance and Lipschitz constant taken
/// from `budget`.
pub fn delta_map(f: &RealFunction, x: f64, delta: f64, budget: &ErrorBudget) -> Result<f64> {
    DeltaMap::new(f, x, budget)?.eval(delta)
}

/// Reusable evaluator of `Δ(δ)` for a fixed `(f, x, budget)` that tallies the
/// ternary iterations spent.
#[derive(Debug)]
pub struct DeltaMap<'f> {
    ratio: LeibnizRatio<'f>,
    tol: f64,
    lipschitz: f64,
    max_iters: usize,
    ternary_iterations: Cell<usize>,
}

impl<'f> DeltaMap<'f> {
    pub fn new(f: &'f RealFunction, x: f64, budget: &ErrorBudget) -> Result<Self> {
        Ok(DeltaMap {
            ratio: LeibnizRatio::with_gamma0(f, x, budget.gamma0)?,
            tol: budget.omega_sup,
            lipschitz: budget.lipschitz_m,
            max_iters: DEFAULT_TERNARY_MAX_ITERS,
            ternary_iterations: Cell::new(0),
        })
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn eval(&self, delta: f64) -> Result<f64> {
        let sup = self
            .ratio
            .sup_over_ball(delta, self.tol, self.lipschitz, self.max_iters)?;
        self.ternary_iterations
            .set(self.ternary_iterations.get() + sup.iterations);
        Ok(delta * sup.value)
    }

    pub fn ternary_iterations(&self) -> usize {
        self.ternary_iterations.get()
    }
}
