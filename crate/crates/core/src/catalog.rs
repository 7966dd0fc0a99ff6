//! Built-in functions with analytic derivatives and, where known, the
//! closed form of their continuity function `Π(x, ε)`.
//!
//! | name         | f(y)          | Π(x, ε)                                   |
//! |--------------|---------------|-------------------------------------------|
//! | `log`        | `ln y`        | `x(1 - e^{-ε})`                           |
//! | `exp1`       | `1 - e^{-y}`  | `x + ln(ε + e^{-x})`                      |
//! | `rational30` | `1/(y - 30)`  | `ε(x-30)² / (1 ∓ ε(x-30))` for `x ≶ 30`   |
//! | `affine21`   | `2y + 1`      | `ε/2`                                     |
//! | `quad11`     | `y² + 11y`    | unknown                                   |
//!
//! [`brute_force_delta`] is an independent grid-search reference for the
//! maximal δ. It only evaluates `f` and shares nothing with the solver.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::{Domain, Interval, RealFunction};

type ClosedFormFn = dyn Fn(f64, f64) -> f64 + Send + Sync;

/// Where a closed form is valid.
#[derive(Clone)]
pub struct Validity {
    pub description: &'static str,
    region: fn(f64, f64) -> bool,
}

impl Validity {
    pub fn contains(&self, x: f64, epsilon: f64) -> bool {
        epsilon > 0.0 && (self.region)(x, epsilon)
    }
}

impl fmt::Debug for Validity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.description)
    }
}

#[derive(Clone)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub function: RealFunction,
    closed_form: Option<Arc<ClosedFormFn>>,
    pub validity: Validity,
}

impl fmt::Debug for CatalogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CatalogEntry")
            .field("name", &self.name)
            .field("function", &self.function)
            .field("has_closed_form", &self.closed_form.is_some())
            .field("validity", &self.validity)
            .finish()
    }
}

impl CatalogEntry {
    pub fn has_closed_form(&self) -> bool {
        self.closed_form.is_some()
    }

    /// `Π(x, ε)` from the closed form, if there is one. `None` outside the
    /// validity region.
    pub fn closed_form_pi(&self, x: f64, epsilon: f64) -> Option<f64> {
        let pi = self.closed_form.as_ref()?;
        self.validity.contains(x, epsilon).then(|| pi(x, epsilon))
    }

    /// Replaces the closed form. Used to inject faults when exercising the
    /// validation path.
    pub fn with_closed_form(mut self, pi: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.closed_form = Some(Arc::new(pi));
        self
    }
}

pub const NAMES: [&str; 5] = ["log", "exp1", "rational30", "affine21", "quad11"];

pub fn all() -> Vec<CatalogEntry> {
    vec![
        entry_log(),
        entry_exponential(),
        entry_rational(),
        entry_affine(),
        entry_quadratic(),
    ]
}

pub fn by_name(name: &str) -> Option<CatalogEntry> {
    match name {
        "log" => Some(entry_log()),
        "exp1" => Some(entry_exponential()),
        "rational30" => Some(entry_rational()),
        "affine21" => Some(entry_affine()),
        "quad11" => Some(entry_quadratic()),
        _ => None,
    }
}

fn positive_reals() -> Domain {
    Domain::new(0.0, f64::INFINITY, Vec::new()).expect("valid domain")
}

/// `f(y) = ln y` on `(0, ∞)`; `Π(x, ε) = x(1 - e^{-ε})`. The binding side is
/// `y = x - δ`, and δ can approach but never reach `x`.
pub fn entry_log() -> CatalogEntry {
    CatalogEntry {
        name: "log",
        function: RealFunction::new("ln(y)", positive_reals(), f64::ln)
            .with_derivatives(|y| 1.0 / y, |y| -1.0 / (y * y)),
        closed_form: Some(Arc::new(|x: f64, eps: f64| -x * (-eps).exp_m1())),
        validity: Validity {
            description: "x > 0, ε > 0",
            region: |x, _| x > 0.0,
        },
    }
}

/// `f(y) = 1 - e^{-y}`; `Π(x, ε) = x + ln(ε + e^{-x})`.
pub fn entry_exponential() -> CatalogEntry {
    CatalogEntry {
        name: "exp1",
        function: RealFunction::new("1-exp(-y)", Domain::real_line(), |y| -(-y).exp_m1())
            .with_derivatives(|y| (-y).exp(), |y| -(-y).exp()),
        closed_form: Some(Arc::new(|x: f64, eps: f64| x + (eps + (-x).exp()).ln())),
        validity: Validity {
            description: "all x, ε > 0",
            region: |x, _| x.is_finite(),
        },
    }
}

/// `f(y) = 1/(y - 30)` on `ℝ ∖ {30}`. With `u = x - 30`,
/// `Π(x, ε) = εu² / (1 - εu)` for `x < 30` and `εu² / (1 + εu)` for `x > 30`;
/// both read `ε|u|² / (1 + ε|u|)`.
pub fn entry_rational() -> CatalogEntry {
    let domain = Domain::new(f64::NEG_INFINITY, f64::INFINITY, vec![30.0]).expect("valid domain");
    CatalogEntry {
        name: "rational30",
        function: RealFunction::new("1/(y-30)", domain, |y| 1.0 / (y - 30.0)).with_derivatives(
            |y| -1.0 / ((y - 30.0) * (y - 30.0)),
            |y| 2.0 / ((y - 30.0) * (y - 30.0) * (y - 30.0)),
        ),
        closed_form: Some(Arc::new(|x: f64, eps: f64| {
            let u = x - 30.0;
            if u < 0.0 {
                eps * u * u / (1.0 - eps * u)
            } else {
                eps * u * u / (1.0 + eps * u)
            }
        })),
        validity: Validity {
            description: "x ≠ 30, ε > 0",
            region: |x, _| x.is_finite() && x != 30.0,
        },
    }
}

/// `f(30 - t) + f(30 + t)`, identically zero for the rational entry.
pub fn rational_shifted_parity(t: f64) -> f64 {
    let f = |y: f64| 1.0 / (y - 30.0);
    f(30.0 - t) + f(30.0 + t)
}

/// `f(y) = 2y + 1`; `Π(x, ε) = ε/2` for every `x`. Fails `f'' ≠ 0`, yet the
/// solver still recovers it.
pub fn entry_affine() -> CatalogEntry {
    CatalogEntry {
        name: "affine21",
        function: RealFunction::new("2y+1", Domain::real_line(), |y| 2.0 * y + 1.0).with_derivatives(|_| 2.0, |_| 0.0),
        closed_form: Some(Arc::new(|_x: f64, eps: f64| eps / 2.0)),
        validity: Validity {
            description: "all x, ε > 0",
            region: |x, _| x.is_finite(),
        },
    }
}

/// `f(y) = y² + 11y`. No closed form is known. `f'(x)f''(x)` vanishes only
/// at `x = -11/2`, so the entry is meant for `x ∈ [-5, 5]`.
pub fn entry_quadratic() -> CatalogEntry {
    CatalogEntry {
        name: "quad11",
        function: RealFunction::new("y^2+11y", Domain::real_line(), |y| y * y + 11.0 * y)
            .with_derivatives(|y| 2.0 * y + 11.0, |_| 2.0),
        closed_form: None,
        validity: Validity {
            description: "x in [-5, 5], ε > 0",
            region: |x, _| (-5.0..=5.0).contains(&x),
        },
    }
}

/// Minimum grid for [`brute_force_delta`].
pub const MIN_ORACLE_GRID: usize = 10_000;

/// Reference maximal δ by direct search.
///
/// Candidate radii are `k·h` with `h = R/grid`, where `R` is the largest
/// radius around `x` that fits in `window`. Radius `k·h` passes when every
/// sample `x ± j·h`, `j < k`, satisfies `|f(y) - f(x)| < ε`. The result is the
/// largest passing radius, which overestimates the true δ by less than `h`.
/// Each candidate reuses the checks of the smaller ones, so the scan stops at
/// the first failing sample. If nothing fails the result is `R`.
pub fn brute_force_delta(f: &RealFunction, x: f64, epsilon: f64, window: Interval, grid: usize) -> Result<f64> {
    if grid < MIN_ORACLE_GRID {
        return Err(Error::InvalidInput(format!(
            "oracle grid must be at least {MIN_ORACLE_GRID}, got {grid}"
        )));
    }
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidInput(format!("epsilon must be positive, got {epsilon}")));
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
            y: window.lo(),
        });
    }
    let radius = (x - window.lo()).min(window.hi() - x);
    let pitch = radius / grid as f64;
    let fx = f.eval(x)?;
    let suitable = |y: f64| matches!(f.eval(y), Ok(v) if (v - fx).abs() < epsilon);
    for j in 1..grid {
        let d = j as f64 * pitch;
        if !(suitable(x - d) && suitable(x + d)) {
            return Ok(d);
        }
    }
    Ok(radius)
}
