use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use epsdelta::catalog::{self, brute_force_delta};
use epsdelta::numerics::{delta_map, leibniz_ratio, ternary_search_sup, Interval, RealFunction};
use epsdelta::solver::{binary_search_root, default_window, make_budget, slope_bounds, solve, Bracket};

fn entry_strategy() -> impl Strategy<Value = &'static str> {
    prop::sample::select(catalog::NAMES.to_vec())
}

// A point inside the entry's usual region.
fn point(name: &str, t: f64) -> f64 {
    match name {
        "log" => 0.2 + 4.0 * t,
        "exp1" => -2.0 + 4.0 * t,
        "rational30" => {
            if t < 0.5 {
                26.0 + 7.0 * t
            } else {
                30.5 + 7.0 * (t - 0.5)
            }
        }
        "affine21" => -100.0 + 200.0 * t,
        _ => -5.0 + 10.0 * t,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn leibniz_ratio_is_symmetric_and_nonnegative(name in entry_strategy(), s in 0.0..1.0f64, t in 0.0..1.0f64) {
        let f = catalog::by_name(name).unwrap().function;
        let (x, y) = (point(name, s), point(name, t));
        prop_assume!(x != y && f.domain().contains(x) && f.domain().contains(y));
        let xy = leibniz_ratio(&f, x, y).unwrap();
        let yx = leibniz_ratio(&f, y, x).unwrap();
        prop_assert_eq!(xy.to_bits(), yx.to_bits());
        prop_assert!(xy >= 0.0);
    }

    #[test]
    fn delta_map_is_monotone(name in entry_strategy(), s in 0.05..0.95f64, d1 in 0.01..0.4f64, d2 in 0.01..0.4f64) {
        let entry = catalog::by_name(name).unwrap();
        let x = point(name, s);
        prop_assume!(entry.function.domain().contains(x) && (x + 5.5).abs() > 0.1);
        let window = default_window(&entry.function, x, 1.0).unwrap();
        let budget = make_budget(&entry.function, x, 0.1, 1e-6, window, 256).unwrap();
        let (lo, hi) = if d1 < d2 { (d1, d2) } else { (d2, d1) };
        let a = delta_map(&entry.function, x, lo, &budget).unwrap();
        let b = delta_map(&entry.function, x, hi, &budget).unwrap();
        prop_assert!(a <= b + 2.0 * budget.omega_delta, "Δ({lo})={a} > Δ({hi})={b}");
    }

    #[test]
    fn ternary_finds_the_peak(c in -3.0..3.0f64, h in -5.0..5.0f64, s in 0.1..4.0f64, tol_exp in -9.0..-2.0f64) {
        let tol = 10f64.powf(tol_exp);
        let r = ternary_search_sup(|y| Ok(h - s * (y - c).abs()), -4.0, 4.0, tol, s, 200).unwrap();
        prop_assert!(r.value <= h && h - r.value <= tol);
        prop_assert!(r.interval_width_final < tol / s);
        let bound = ((8.0 * s / tol).ln() / 1.5f64.ln()).ceil() as usize + 1;
        prop_assert!(r.iterations <= bound);
    }

    #[test]
    fn bisection_iteration_bound(root in 0.1..5.0f64, k in 0.1..10.0f64, lo_frac in 0.0..0.99f64, hi_mul in 1.01..4.0f64, w_exp in -10.0..-2.0f64) {
        let omega = 10f64.powf(w_exp);
        let bracket = Bracket::new(root * lo_frac, root * hi_mul).unwrap();
        let r = binary_search_root(|d| Ok(k * d), k * root, bracket, omega, 200).unwrap();
        prop_assert!((r.delta - root).abs() < omega);
        let bound = (bracket.width() / omega).log2().ceil() as usize + 1;
        prop_assert!(r.iterations <= bound);
    }

    #[test]
    fn solve_stays_inside_the_slope_bounds(name in entry_strategy(), s in 0.05..0.95f64, eps in 1e-4..1e-2f64) {
        let entry = catalog::by_name(name).unwrap();
        let x = point(name, s);
        prop_assume!(entry.function.domain().contains(x) && (x + 5.5).abs() > 0.1);
        let window = default_window(&entry.function, x, 1.0).unwrap();
        let r = solve(&entry.function, x, eps, 1e-6, window).unwrap();
        let (lower, upper) = slope_bounds(eps, &r.budget);
        prop_assert!(lower - 1e-6 <= r.delta && r.delta <= upper + 1e-6, "{lower} <= {} <= {upper}", r.delta);
    }
}

#[test]
fn delta_map_accuracy_on_the_exponential() {
    // Δ(δ) = e^δ - 1 at x = 0
    let f = catalog::entry_exponential().function;
    let window = Interval::centered(0.0, 1.0).unwrap();
    let budget = make_budget(&f, 0.0, 0.5, 1e-6, window, 256).unwrap();
    for k in 1..=32 {
        let d = k as f64 / 32.0 * 0.9;
        let got = delta_map(&f, 0.0, d, &budget).unwrap();
        assert!((got - d.exp_m1()).abs() < budget.omega_delta, "δ={d}: {got}");
    }
}

#[test]
fn numeric_derivatives_match_analytic() {
    for entry in catalog::all() {
        let analytic = &entry.function;
        let numeric = RealFunction::new("numeric", analytic.domain().clone(), {
            let f = analytic.clone();
            move |y| f.eval(y).unwrap_or(f64::NAN)
        });
        for k in 0..50 {
            let y = point(entry.name, (k as f64 + 0.5) / 50.0);
            if !analytic.domain().contains(y) || analytic.domain().distance_to_boundary(y) < 0.1 {
                continue;
            }
            let scale = analytic.derivative(y).unwrap().abs().max(1.0);
            assert_abs_diff_eq!(
                numeric.derivative(y).unwrap(),
                analytic.derivative(y).unwrap(),
                epsilon = 1e-6 * scale
            );
            let scale2 = analytic.second_derivative(y).unwrap().abs().max(1.0);
            assert_abs_diff_eq!(
                numeric.second_derivative(y).unwrap(),
                analytic.second_derivative(y).unwrap(),
                epsilon = 1e-3 * scale2
            );
        }
    }
}

#[test]
fn oracle_equivalence_across_the_catalog() {
    let grid = 10_000;
    for entry in catalog::all() {
        let f = &entry.function;
        for i in 0..10 {
            let x = point(entry.name, (i as f64 + 0.5) / 10.0);
            if !f.domain().contains(x) || (x + 5.5).abs() < 0.1 {
                continue;
            }
            let window = default_window(f, x, 1.0).unwrap();
            let radius = (x - window.lo()).min(window.hi() - x);
            for j in 0..10 {
                let eps = 0.01 + 0.05 * j as f64;
                let reference = brute_force_delta(f, x, eps, window, grid).unwrap();
                if reference >= radius {
                    // the true δ reaches past the window
                    continue;
                }
                let r = solve(f, x, eps, 1e-6, window).unwrap();
                let pitch = radius / grid as f64;
                assert!(
                    (r.delta - reference).abs() <= 1e-6 + pitch,
                    "{} x={x} eps={eps}: {} vs {reference}",
                    entry.name,
                    r.delta
                );
            }
        }
    }
}

#[test]
fn ternary_work_per_delta_evaluation_grows_by_a_constant() {
    // halving ω_sup adds log(2)/log(3/2) ≈ 1.7 passes to each Δ evaluation
    let f = catalog::entry_exponential().function;
    let window = Interval::centered(0.0, 1.0).unwrap();
    let mut omega = 1e-3;
    let mut prev: Option<f64> = None;
    while omega >= 1e-9 {
        let r = solve(&f, 0.0, 0.5, omega, window).unwrap();
        // two endpoint evaluations plus one per bisection step
        let per_call = r.ternary_iterations_total as f64 / (r.binary_iterations + 2) as f64;
        if let Some(p) = prev {
            let growth = per_call - p;
            assert!((0.0..=4.0).contains(&growth), "ω={omega:e}: {p} -> {per_call}");
        }
        prev = Some(per_call);
        omega /= 2.0;
    }
}
