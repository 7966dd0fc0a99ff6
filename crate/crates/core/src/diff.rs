//! Central finite differences.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeOrder {
    First,
    Second,
}

/// Step size balancing truncation against rounding error: `cbrt(eps)` for the
/// first derivative and `eps^(1/4)` for the second, scaled by `max(1, |y|)`.
pub fn step_size(y: f64, order: DerivativeOrder) -> f64 {
    let base = match order {
        DerivativeOrder::First => f64::EPSILON.cbrt(),
        DerivativeOrder::Second => f64::EPSILON.powf(0.25),
    };
    base * y.abs().max(1.0)
}

/// Central difference of `f` at `y`. Errors raised by `f` anywhere on the
/// stencil are returned unchanged.
pub fn central_difference<F, E>(f: F, y: f64, order: DerivativeOrder) -> Result<f64, E>
where
    F: Fn(f64) -> Result<f64, E>,
{
    let h = step_size(y, order);
    // exact representable step so that (y + h) - (y - h) == 2h
    let h = (y + h) - y;
    let forward = f(y + h)?;
    let backward = f(y - h)?;
    Ok(match order {
        DerivativeOrder::First => (forward - backward) / (2.0 * h),
        DerivativeOrder::Second => (forward - 2.0 * f(y)? + backward) / (h * h),
    })
}
