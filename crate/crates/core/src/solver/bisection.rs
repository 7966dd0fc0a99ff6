use crate::error::{Error, Result};

use super::Bracket;

/// Iteration cap for [`binary_search_root`].
pub const DEFAULT_BINARY_MAX_ITERS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootResult {
    pub delta: f64,
    pub iterations: usize,
    /// `|Δ(delta) - ε|`.
    pub residual: f64,
}

/// Bisection for `Δ(δ) = ε` on `bracket`.
///
/// Halves `[a, b]` keeping the half where `(Δ(a) - ε)(Δ(m) - ε) <= 0`, until
/// `|b - a| < omega_sol`, then returns whichever endpoint has the smaller
/// residual. `Δ(a)` and `Δ(b)` are carried across iterations instead of being
/// recomputed; [`binary_search_root_uncached`] gives the same answer bit for
/// bit while re-evaluating every pass.
///
/// ```
/// use epsdelta::solver::{binary_search_root, Bracket};
///
/// let bracket = Bracket::new(0.25, 1.0).unwrap();
/// let root = binary_search_root(|d| Ok(2.0 * d), 1.0, bracket, 1e-6, 200).unwrap();
/// assert!((root.delta - 0.5).abs() < 1e-6);
/// ```
pub fn binary_search_root<F>(
    mut delta_map: F,
    epsilon: f64,
    bracket: Bracket,
    omega_sol: f64,
    max_iters: usize,
) -> Result<RootResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    check_tolerance(omega_sol)?;
    let (mut a, mut b) = (bracket.a(), bracket.b());
    let mut gamma_a = delta_map(a)?;
    let mut gamma_b = delta_map(b)?;
    check_sign_change(a, b, gamma_a, gamma_b, epsilon)?;

    let mut iterations = 0;
    while !converged(a, b, omega_sol) {
        if iterations == max_iters {
            return Err(limit(iterations, a, b));
        }
        let m = (a + b) / 2.0;
        let gamma_m = delta_map(m)?;
        if (gamma_a - epsilon) * (gamma_m - epsilon) <= 0.0 {
            b = m;
            gamma_b = gamma_m;
        } else {
            a = m;
            gamma_a = gamma_m;
        }
        iterations += 1;
    }
    Ok(pick_endpoint(a, b, gamma_a, gamma_b, epsilon, iterations))
}

/// Literal form of [`binary_search_root`]: evaluates `Δ(a)`, `Δ(b)` and
/// `Δ(m)` on every pass and both endpoints again at the end.
pub fn binary_search_root_uncached<F>(
    mut delta_map: F,
    epsilon: f64,
    bracket: Bracket,
    omega_sol: f64,
    max_iters: usize,
) -> Result<RootResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    check_tolerance(omega_sol)?;
    let (mut a, mut b) = (bracket.a(), bracket.b());
    check_sign_change(a, b, delta_map(a)?, delta_map(b)?, epsilon)?;

    let mut iterations = 0;
    while !converged(a, b, omega_sol) {
        if iterations == max_iters {
            return Err(limit(iterations, a, b));
        }
        let m = (a + b) / 2.0;
        let gamma_a = delta_map(a)?;
        let _gamma_b = delta_map(b)?;
        let gamma_m = delta_map(m)?;
        if (gamma_a - epsilon) * (gamma_m - epsilon) <= 0.0 {
            b = m;
        } else {
            a = m;
        }
        iterations += 1;
    }
    let (gamma_a, gamma_b) = (delta_map(a)?, delta_map(b)?);
    Ok(pick_endpoint(a, b, gamma_a, gamma_b, epsilon, iterations))
}

fn check_tolerance(omega_sol: f64) -> Result<()> {
    if omega_sol > 0.0 && omega_sol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "omega_sol must be positive, got {omega_sol}"
        )))
    }
}

fn check_sign_change(a: f64, b: f64, fa: f64, fb: f64, epsilon: f64) -> Result<()> {
    if (fa - epsilon) * (fb - epsilon) <= 0.0 {
        Ok(())
    } else {
        Err(Error::NoSignChange { a, b, fa, fb })
    }
}

// Also stops once the midpoint is no longer representable between a and b.
fn converged(a: f64, b: f64, omega_sol: f64) -> bool {
    let m = (a + b) / 2.0;
    (a - b).abs() < omega_sol || m <= a || m >= b
}

fn limit(iterations: usize, a: f64, b: f64) -> Error {
    Error::IterationLimit {
        iterations,
        best: (a + b) / 2.0,
        width: b - a,
    }
}

fn pick_endpoint(a: f64, b: f64, gamma_a: f64, gamma_b: f64, epsilon: f64, iterations: usize) -> RootResult {
    let (ra, rb) = ((gamma_a - epsilon).abs(), (gamma_b - epsilon).abs());
    if ra < rb {
        RootResult {
            delta: a,
            iterations,
            residual: ra,
        }
    } else {
        RootResult {
            delta: b,
            iterations,
            residual: rb,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_root() {
        let br = Bracket::new(0.25, 1.0).unwrap();
        let r = binary_search_root(|d| Ok(2.0 * d), 1.0, br, 1e-6, 200).unwrap();
        assert!((r.delta - 0.5).abs() < 1e-6);
    }

    #[test]
    fn exponential_root_and_iteration_count() {
        let br = Bracket::new(0.175, 0.5).unwrap();
        let r = binary_search_root(|d: f64| Ok(d.exp_m1()), 0.5, br, 1e-6, 200).unwrap();
        assert!((r.delta - 1.5f64.ln()).abs() < 1e-6);
        // ceil(log2(0.325 / 1e-6)) + 1
        assert!(r.iterations <= 20, "{}", r.iterations);
        assert!(r.residual < 1e-6);
    }

    #[test]
    fn cached_matches_uncached_bitwise() {
        let map = |d: f64| Ok((d * 1.3).sin() + d * d);
        for eps in [0.1, 0.4, 0.77] {
            let br = Bracket::new(0.01, 1.0).unwrap();
            let fast = binary_search_root(map, eps, br, 1e-9, 200).unwrap();
            let slow = binary_search_root_uncached(map, eps, br, 1e-9, 200).unwrap();
            assert_eq!(fast.delta.to_bits(), slow.delta.to_bits());
            assert_eq!(fast.iterations, slow.iterations);
            assert_eq!(fast.residual.to_bits(), slow.residual.to_bits());
        }
    }

    #[test]
    fn no_sign_change() {
        let br = Bracket::new(0.0, 1.0).unwrap();
        let err = binary_search_root(Ok, 5.0, br, 1e-6, 200).unwrap_err();
        assert!(matches!(err, Error::NoSignChange { .. }));
    }

    #[test]
    fn iteration_limit() {
        let br = Bracket::new(0.0, 1.0).unwrap();
        let err = binary_search_root(Ok, 0.3, br, 1e-9, 5).unwrap_err();
        assert!(matches!(err, Error::IterationLimit { iterations: 5, .. }));
    }

    #[test]
    fn tolerance_below_resolution_terminates() {
        let br = Bracket::new(1.0, 2.0).unwrap();
        let r = binary_search_root(Ok, 1.5, br, 1e-300, 200).unwrap();
        assert_eq!(r.delta, 1.5);
    }
}
