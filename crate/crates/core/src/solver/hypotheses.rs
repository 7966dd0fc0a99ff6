use serde::Serialize;

use crate::error::Result;
use crate::numerics::{coincidence_threshold, Interval, LeibnizRatio, RealFunction};

use super::budget::DERIVATIVE_TOLERANCE;

/// Sampled check of the conditions under which the solver is guaranteed to
/// work: `f'(x)·f''(x) ≠ 0`, finitely many secant/tangent coincidences, and a
/// single-peaked Leibniz ratio on the window. These are grid heuristics, not
/// proofs; `diagnostics` explains every `false`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub f1_at_x: f64,
    pub f2_at_x: f64,
    pub lagrange_ok: bool,
    pub transversal_ok: bool,
    pub unimodal_ok: bool,
    pub diagnostics: Vec<String>,
}

impl HypothesisReport {
    pub fn all_ok(&self) -> bool {
        self.lagrange_ok && self.transversal_ok && self.unimodal_ok
    }
}

pub fn check_hypotheses(f: &RealFunction, x: f64, window: Interval, samples: usize) -> HypothesisReport {
    let samples = samples.max(2);
    let mut diagnostics = Vec::new();

    let f1 = f.derivative(x);
    let f2 = f.second_derivative(x);
    let lagrange_ok = match (&f1, &f2) {
        (Ok(d1), Ok(d2)) => {
            let ok = d1.abs() > DERIVATIVE_TOLERANCE && d2.abs() > DERIVATIVE_TOLERANCE;
            if !ok {
                diagnostics.push(format!("f'(x)·f''(x) vanishes at x = {x}: f' = {d1:e}, f'' = {d2:e}"));
            }
            ok
        }
        (Err(e), _) | (_, Err(e)) => {
            diagnostics.push(format!("derivatives unavailable at x = {x}: {e}"));
            false
        }
    };

    let transversal_ok = match transversality(f, x, window, samples) {
        Ok(None) => true,
        Ok(Some(why)) => {
            diagnostics.push(why);
            false
        }
        Err(e) => {
            diagnostics.push(format!("transversality scan failed: {e}"));
            false
        }
    };

    let unimodal_ok = match unimodality(f, x, window, samples) {
        Ok(None) => true,
        Ok(Some(why)) => {
            diagnostics.push(why);
            false
        }
        Err(e) => {
            diagnostics.push(format!("unimodality scan failed: {e}"));
            false
        }
    };

    HypothesisReport {
        f1_at_x: f1.unwrap_or(f64::NAN),
        f2_at_x: f2.unwrap_or(f64::NAN),
        lagrange_ok,
        transversal_ok,
        unimodal_ok,
        diagnostics,
    }
}

// Relative accuracy of f' used to decide when h(y) is indistinguishable from 0.
fn derivative_accuracy(f: &RealFunction) -> f64 {
    if f.has_analytic_derivatives() {
        64.0 * f64::EPSILON
    } else {
        1e-6
    }
}

/// Counts sign changes of `h(y) = f'(y)(y - x) - (f(y) - f(x))`, whose roots
/// are the points where the secant from `x` is tangent to `f`.
fn transversality(f: &RealFunction, x: f64, window: Interval, samples: usize) -> Result<Option<String>> {
    let fx = f.eval(x)?;
    let mut values = Vec::with_capacity(samples);
    let mut scale: f64 = 1.0;
    for y in window.grid(samples) {
        let slope_term = f.derivative(y)? * (y - x);
        let rise = f.eval(y)? - fx;
        scale = scale.max(slope_term.abs()).max(rise.abs()).max(fx.abs());
        values.push(slope_term - rise);
    }
    let tol = derivative_accuracy(f) * scale;
    let signs: Vec<bool> = values.iter().filter(|h| h.abs() > tol).map(|&h| h > 0.0).collect();
    if signs.is_empty() {
        return Ok(Some(format!(
            "secant matches tangent everywhere on [{}, {}] (infinitely many solutions)",
            window.lo(),
            window.hi()
        )));
    }
    let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
    if changes > samples / 8 {
        Ok(Some(format!(
            "secant matches tangent at {changes} grid cells, more than {} allowed",
            samples / 8
        )))
    } else {
        Ok(None)
    }
}

/// Walks outward from the grid maximum of the Leibniz ratio: once the values
/// start to fall on a side they must not rise again on that side.
fn unimodality(f: &RealFunction, x: f64, window: Interval, samples: usize) -> Result<Option<String>> {
    let ratio = LeibnizRatio::new(f, x)?;
    let fx = f.eval(x)?;
    let mut points = Vec::with_capacity(samples);
    let mut f_scale = fx.abs().max(1.0);
    for y in window.grid(samples) {
        points.push((y, ratio.at(y)?));
        if (y - x).abs() >= coincidence_threshold(x) {
            f_scale = f_scale.max(f.eval(y)?.abs());
        }
    }
    let noise = |y: f64, value: f64| {
        let gap = (y - x).abs().max(coincidence_threshold(x));
        4.0 * f64::EPSILON * f_scale / gap + 1e-12 * value.abs()
    };
    let peak = points
        .iter()
        .enumerate()
        .max_by(|l, r| l.1 .1.total_cmp(&r.1 .1))
        .map(|(i, _)| i)
        .unwrap_or(0);

    let side_ok = |path: &mut dyn Iterator<Item = (f64, f64)>| {
        let mut prev: Option<(f64, f64)> = None;
        let mut falling = false;
        for (y, v) in path {
            if let Some((py, pv)) = prev {
                let tol = noise(y, v).max(noise(py, pv));
                if v < pv - tol {
                    falling = true;
                } else if falling && v > pv + tol {
                    return Some(y);
                }
            }
            prev = Some((y, v));
        }
        None
    };
    let right = side_ok(&mut points[peak..].iter().copied());
    let left = side_ok(&mut points[..=peak].iter().rev().copied());
    match right.or(left) {
        None => Ok(None),
        Some(y) => Ok(Some(format!(
            "Leibniz ratio rises again near y = {y} after falling from its peak at y = {}",
            points[peak].0
        ))),
    }
}
