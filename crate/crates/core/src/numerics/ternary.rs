use crate::error::{Error, Result};

/// Iteration cap for [`ternary_search_sup`]. `(2/3)^200` is far below the
/// relative resolution of any finite bracket.
pub const DEFAULT_TERNARY_MAX_ITERS: usize = 200;

/// Outcome of [`ternary_search_sup`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupremumResult {
    /// `max(Lf(a), Lf(b))` over the final interval `[a, b]`.
    pub value: f64,
    /// The endpoint of the final interval that produced `value`.
    pub argmax_estimate: f64,
    pub iterations: usize,
    pub interval_width_final: f64,
}

/// Ternary search for the supremum of a unimodal, `lipschitz`-Lipschitz
/// function on `[a, b]`.
///
/// Each pass probes the thirds `p = a + (b-a)/3`, `q = b - (b-a)/3` and keeps
/// `[p, b]` when `Lf(p) < Lf(q)`, `[a, q]` when `Lf(p) > Lf(q)` and `[p, q]`
/// on exact equality, so the maximiser never leaves the interval and each
/// pass keeps at most 2/3 of the width. The loop stops once
/// `|b - a| < tol / lipschitz` and returns the larger endpoint value, which
/// is within `tol` of the supremum.
///
/// The returned value can sit below the true supremum (never above it, for
/// exact `Lf`) when the maximiser is interior to the final interval.
///
/// ```
/// use epsdelta::numerics::ternary_search_sup;
///
/// let peak = |y: f64| Ok(5.0 - (y - 1.0) * (y - 1.0));
/// let r = ternary_search_sup(peak, 0.0, 2.0, 1e-6, 2.0, 200).unwrap();
/// assert!((r.value - 5.0).abs() < 1e-6);
/// assert!((r.argmax_estimate - 1.0).abs() < 1e-3);
/// ```
pub fn ternary_search_sup<F>(
    lf: F,
    a: f64,
    b: f64,
    tol: f64,
    lipschitz: f64,
    max_iters: usize,
) -> Result<SupremumResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    ternary_search_inner(lf, a, b, tol, lipschitz, max_iters, |_, _| {})
}

/// [`ternary_search_sup`] that also returns every interval `[a, b]` visited,
/// starting with the initial one.
pub fn ternary_search_sup_traced<F>(
    lf: F,
    a: f64,
    b: f64,
    tol: f64,
    lipschitz: f64,
    max_iters: usize,
) -> Result<(SupremumResult, Vec<(f64, f64)>)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut trace = vec![(a, b)];
    let result = ternary_search_inner(lf, a, b, tol, lipschitz, max_iters, |lo, hi| trace.push((lo, hi)))?;
    Ok((result, trace))
}

fn ternary_search_inner<F, O>(
    mut lf: F,
    mut a: f64,
    mut b: f64,
    tol: f64,
    lipschitz: f64,
    max_iters: usize,
    mut on_step: O,
) -> Result<SupremumResult>
where
    F: FnMut(f64) -> Result<f64>,
    O: FnMut(f64, f64),
{
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::InvalidInterval { a, b });
    }
    if !(tol > 0.0 && lipschitz > 0.0) {
        return Err(Error::InvalidInput(format!(
            "ternary search needs positive tolerance and Lipschitz constant, got {tol} and {lipschitz}"
        )));
    }
    let stop_width = tol / lipschitz;
    let mut iterations = 0;
    // Below a few ulps the thirds collapse onto the endpoints and the
    // interval can no longer shrink.
    while (a - b).abs() >= stop_width && (b - a) > 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(1.0) {
        if iterations == max_iters {
            let best = lf(a)?.max(lf(b)?);
            return Err(Error::IterationLimit {
                iterations,
                best,
                width: b - a,
            });
        }
        let p = a + (b - a) / 3.0;
        let q = b - (b - a) / 3.0;
        let gamma_p = lf(p)?;
        let gamma_q = lf(q)?;
        if gamma_p < gamma_q {
            a = p;
        } else if gamma_p > gamma_q {
            b = q;
        } else {
            a = p;
            b = q;
        }
        iterations += 1;
        on_step(a, b);
    }
    let (value_a, value_b) = (lf(a)?, lf(b)?);
    let (value, argmax_estimate) = if value_a >= value_b { (value_a, a) } else { (value_b, b) };
    Ok(SupremumResult {
        value,
        argmax_estimate,
        iterations,
        interval_width_final: b - a,
    })
}
