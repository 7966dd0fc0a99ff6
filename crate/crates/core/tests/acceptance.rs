//! Acceptance gate. Runs every criterion at its stated tolerance and prints
//! one PASS/FAIL line each; exits non-zero if any criterion fails.

use std::panic;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use epsdelta::catalog::{self, brute_force_delta, CatalogEntry};
use epsdelta::manifold::{sample_manifold_with_workers, write_csv, GridSpec};
use epsdelta::numerics::{delta_map, ternary_search_sup_traced, Interval};
use epsdelta::solver::{binary_search_root, default_window, solve, Bracket, SolveReport};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn solve_at(entry: &CatalogEntry, x: f64, eps: f64, omega: f64) -> Result<(SolveReport, Interval), String> {
    let f = &entry.function;
    let window = default_window(f, x, 1.0).map_err(|e| e.to_string())?;
    let report = solve(f, x, eps, omega, window).map_err(|e| format!("{} x={x} eps={eps}: {e}", entry.name))?;
    Ok((report, window))
}

fn closed_form_sweep(entry: &CatalogEntry, xs: &[f64], epsilons: &[f64], tol: f64) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for &x in xs {
        for &eps in epsilons {
            let want = entry
                .closed_form_pi(x, eps)
                .ok_or(format!("no closed form at x={x} eps={eps}"))?;
            let (r, _) = solve_at(entry, x, eps, 1e-6)?;
            let dev = (r.delta - want).abs();
            worst = worst.max(dev);
            ensure(dev < tol, || {
                format!("x={x} eps={eps}: delta {} vs {want} (dev {dev:e})", r.delta)
            })?;
        }
    }
    Ok(worst)
}

fn exponential_closed_form() -> Outcome {
    let xs = [-1.0, -0.5, 0.0, 0.5, 1.0];
    let eps = [0.1, 0.25, 0.5, 0.75, 1.0];
    let worst = closed_form_sweep(&catalog::entry_exponential(), &xs, &eps, 2e-6)?;
    Ok(format!("25 points, max deviation {worst:.2e} < 2e-6"))
}

fn rational_closed_form() -> Outcome {
    let entry = catalog::entry_rational();
    let worst = closed_form_sweep(&entry, &[27.0, 29.0, 31.0, 33.0], &[0.1, 0.25], 2e-6)?;
    let mut worst_sym: f64 = 0.0;
    for t in [1.0, 3.0] {
        for eps in [0.1, 0.25] {
            let (l, _) = solve_at(&entry, 30.0 - t, eps, 1e-6)?;
            let (r, _) = solve_at(&entry, 30.0 + t, eps, 1e-6)?;
            let d = (l.delta - r.delta).abs();
            worst_sym = worst_sym.max(d);
            ensure(d < 4e-6, || {
                format!("symmetry t={t} eps={eps}: {} vs {}", l.delta, r.delta)
            })?;
        }
    }
    Ok(format!(
        "8 points, max deviation {worst:.2e} < 2e-6; symmetry gap {worst_sym:.2e} < 4e-6"
    ))
}

fn affine_uniformity() -> Outcome {
    let entry = catalog::entry_affine();
    let mut worst: f64 = 0.0;
    for x in [-1e6, 0.0, 1e6] {
        for eps in [0.01, 1.0, 10.0] {
            let (r, _) = solve_at(&entry, x, eps, 1e-6)?;
            let dev = (r.delta - eps / 2.0).abs();
            worst = worst.max(dev);
            ensure(dev < 2e-6, || format!("x={x} eps={eps}: delta {}", r.delta))?;
            ensure(!r.warnings.is_empty(), || {
                format!("x={x} eps={eps}: no hypothesis warning")
            })?;
        }
    }
    Ok(format!("9 points, max deviation {worst:.2e} < 2e-6, warnings raised"))
}

fn log_closed_form() -> Outcome {
    let worst = closed_form_sweep(&catalog::entry_log(), &[0.5, 1.0, 2.0], &[0.1, 1.0], 2e-6)?;
    Ok(format!("6 points, max deviation {worst:.2e} < 2e-6"))
}

fn quadratic_oracle() -> Outcome {
    let entry = catalog::entry_quadratic();
    let grid = 100_000;
    let mut worst: f64 = 0.0;
    for x in [-4.0, -2.0, 0.0, 2.0, 4.0] {
        for eps in [0.05, 0.1, 0.5] {
            let (r, window) = solve_at(&entry, x, eps, 1e-6)?;
            let reference = brute_force_delta(&entry.function, x, eps, window, grid).map_err(|e| e.to_string())?;
            let tol = 1e-6 + 2.0 * (window.width() / 2.0) / grid as f64;
            let dev = (r.delta - reference).abs();
            worst = worst.max(dev);
            ensure(dev < tol, || {
                format!("x={x} eps={eps}: {} vs oracle {reference}", r.delta)
            })?;
        }
    }
    Ok(format!("15 points, max deviation from oracle {worst:.2e} < 2.1e-5"))
}

fn polylog_runtime() -> Outcome {
    let entry = catalog::entry_exponential();
    let (f, counter) = entry.function.counted();
    let window = Interval::centered(0.0, 1.0).unwrap();
    let mut omegas = Vec::new();
    let mut omega = 1e-3;
    while omega >= 1e-9 {
        omegas.push(omega);
        omega /= 2.0;
    }
    let mut iters = Vec::new();
    let mut evals = Vec::new();
    let mut slowest = Duration::ZERO;
    for &w in &omegas {
        counter.reset();
        let start = Instant::now();
        let r = solve(&f, 0.0, 0.5, w, window).map_err(|e| e.to_string())?;
        slowest = slowest.max(start.elapsed());
        iters.push(r.binary_iterations as i64);
        evals.push(counter.get() as f64);
    }
    for (k, pair) in iters.windows(2).enumerate() {
        let step = pair[1] - pair[0];
        ensure((0..=2).contains(&step), || {
            format!(
                "binary iterations went {} -> {} at omega {:e}",
                pair[0],
                pair[1],
                omegas[k + 1]
            )
        })?;
    }
    let xs: Vec<f64> = omegas.iter().map(|w| (1.0 / w).ln()).collect();
    let ys: Vec<f64> = evals.iter().map(|e| e.ln()).collect();
    let slope = least_squares_slope(&xs, &ys);
    ensure(slope < 0.1, || {
        format!(
            "evaluation growth exponent {slope:.3} >= 0.1 (evals {} -> {})",
            evals[0],
            evals[evals.len() - 1]
        )
    })?;
    ensure(slowest < Duration::from_millis(50), || {
        format!("slowest solve took {slowest:?}")
    })?;
    Ok(format!(
        "{} halvings, binary iterations {} -> {}, eval exponent {slope:.3} < 0.1, slowest solve {:.1} ms",
        omegas.len() - 1,
        iters[0],
        iters[iters.len() - 1],
        slowest.as_secs_f64() * 1e3
    ))
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

// (x range, ε range) sampled for the property suite.
fn property_region(name: &str, rng: &mut ChaCha8Rng) -> (f64, f64) {
    match name {
        "log" => (rng.gen_range(0.5..3.0), rng.gen_range(0.05..1.0)),
        "exp1" => (rng.gen_range(-1.0..1.0), rng.gen_range(0.05..1.0)),
        "rational30" => {
            let side = if rng.gen_bool(0.5) { -1.0 } else { 1.0 };
            (30.0 + side * rng.gen_range(0.5..3.0), rng.gen_range(0.05..0.5))
        }
        "affine21" => (rng.gen_range(-1e3..1e3), rng.gen_range(0.01..1.5)),
        "quad11" => (rng.gen_range(-5.0..5.0), rng.gen_range(0.01..0.5)),
        other => panic!("no region for {other}"),
    }
}

fn property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    let omega = 1e-6;
    let mut cases = 0;
    let mut near_max_checked = 0;
    for entry in catalog::all() {
        let f = &entry.function;
        for _ in 0..40 {
            let (x, eps) = property_region(entry.name, &mut rng);
            let (r, window) = solve_at(&entry, x, eps, omega)?;
            let fx = f.eval(x).map_err(|e| e.to_string())?;

            let inner = r.delta - omega;
            for k in 0..1024 {
                let y = x - inner + 2.0 * inner * (k as f64 + 0.5) / 1024.0;
                let gap = (f.eval(y).map_err(|e| e.to_string())? - fx).abs();
                ensure(gap < eps, || {
                    format!("{} x={x} eps={eps}: |f(y)-f(x)|={gap} at y={y}", entry.name)
                })?;
            }

            let probe = r.delta + 2.0 * omega;
            if window.contains(x - probe) && window.contains(x + probe) {
                let d = delta_map(f, x, probe, &r.budget).map_err(|e| e.to_string())?;
                ensure(d > eps - r.budget.omega_delta, || {
                    format!("{} x={x} eps={eps}: Δ(δ+2ω)={d} not above ε-ω_Δ", entry.name)
                })?;
                near_max_checked += 1;
            }

            let smaller = eps * rng.gen_range(0.3..0.95);
            let (r_small, _) = solve_at(&entry, x, smaller, omega)?;
            ensure(r_small.delta <= r.delta + 2.0 * omega, || {
                format!(
                    "{} x={x}: δ({smaller})={} > δ({eps})={}",
                    entry.name, r_small.delta, r.delta
                )
            })?;
            cases += 1;
        }
    }
    Ok(format!(
        "{cases} cases: suitability, monotonicity; near-maximality on {near_max_checked} inside the window"
    ))
}

fn search_contracts() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    for case in 0..20 {
        let a = rng.gen_range(-5.0..0.0);
        let b = a + rng.gen_range(0.5..5.0);
        let c = rng.gen_range(a..b);
        let height = rng.gen_range(-2.0..2.0);
        let s = rng.gen_range(0.1..3.0);
        let tol = 10f64.powf(rng.gen_range(-9.0..-3.0));
        let (lf, m): (Box<dyn Fn(f64) -> f64>, f64) = if case % 2 == 0 {
            (Box::new(move |y| height - s * (y - c).abs()), s)
        } else {
            (Box::new(move |y| height - s * (y - c) * (y - c)), 2.0 * s * (b - a))
        };
        let (r, trace) = ternary_search_sup_traced(|y| Ok(lf(y)), a, b, tol, m, 200).map_err(|e| e.to_string())?;
        // new endpoints are rounded at the magnitude of a and b
        let ulps = 4.0 * f64::EPSILON * a.abs().max(b.abs());
        for w in trace.windows(2) {
            let (w0, w1) = (w[0].1 - w[0].0, w[1].1 - w[1].0);
            ensure(w1 <= w0 * 2.0 / 3.0 + ulps, || {
                format!("ternary case {case}: {w0} -> {w1}")
            })?;
        }
        let stop = tol / m;
        ensure(r.interval_width_final < stop, || {
            format!("ternary case {case}: final width {}", r.interval_width_final)
        })?;
        let bound = (((b - a) / stop).ln() / 1.5f64.ln()).ceil() as usize + 1;
        ensure(r.iterations <= bound, || {
            format!("ternary case {case}: {} > {bound} iterations", r.iterations)
        })?;
        ensure((r.value - height).abs() <= tol, || {
            format!("ternary case {case}: {} vs {height}", r.value)
        })?;
    }

    for case in 0..20 {
        let slope = rng.gen_range(0.2..5.0);
        let root = rng.gen_range(0.1..2.0);
        let lo = root * rng.gen_range(0.1..0.9);
        let hi = root * rng.gen_range(1.1..3.0);
        let omega = 10f64.powf(rng.gen_range(-10.0..-3.0));
        let eps = slope * root;
        let mut mids = Vec::new();
        let bracket = Bracket::new(lo, hi).map_err(|e| e.to_string())?;
        let r = binary_search_root(
            |d| {
                mids.push(d);
                Ok(slope * d)
            },
            eps,
            bracket,
            omega,
            200,
        )
        .map_err(|e| e.to_string())?;
        // the first two calls are the endpoints
        let mids = &mids[2..];
        let width = hi - lo;
        for (k, pair) in mids.windows(2).enumerate() {
            let step = (pair[1] - pair[0]).abs();
            let want = width / 2f64.powi(k as i32 + 2);
            ensure((step - want).abs() <= 1e-9 * width, || {
                format!("bisection case {case}: step {step} vs {want}")
            })?;
        }
        let final_width = width / 2f64.powi(r.iterations as i32);
        ensure(final_width < omega, || {
            format!("bisection case {case}: final width {final_width}")
        })?;
        let bound = (width / omega).log2().ceil() as usize + 1;
        ensure(r.iterations <= bound, || {
            format!("bisection case {case}: {} > {bound}", r.iterations)
        })?;
        ensure((r.delta - root).abs() < omega, || {
            format!("bisection case {case}: {} vs {root}", r.delta)
        })?;
    }
    Ok("20 ternary cases (contraction <= 2/3, width < tol/M) and 20 bisection cases (halving, width < omega)".into())
}

fn manifold_determinism() -> Outcome {
    let f = catalog::entry_exponential().function;
    let grid = GridSpec::new(-1.0, 1.0, 50, 0.02, 1.0, 50).map_err(|e| e.to_string())?;
    let mut slowest = Duration::ZERO;
    let mut render = |workers| -> Result<Vec<u8>, String> {
        let start = Instant::now();
        let samples = sample_manifold_with_workers(&f, &grid, 1e-6, workers).map_err(|e| e.to_string())?;
        ensure(samples.iter().all(|s| s.is_ok()), || {
            "skipped samples in exp1 sweep".into()
        })?;
        let mut out = Vec::new();
        write_csv(&samples, &mut out).map_err(|e| e.to_string())?;
        slowest = slowest.max(start.elapsed());
        Ok(out)
    };
    let first = render(1)?;
    let second = render(1)?;
    let parallel = render(4)?;
    ensure(first == second, || "two single-worker runs differ".into())?;
    ensure(first == parallel, || "1-worker and 4-worker output differ".into())?;
    ensure(slowest < Duration::from_secs(30), || {
        format!("slowest sweep took {slowest:?}")
    })?;
    let rows = first.iter().filter(|&&b| b == b'\n').count() - 1;
    Ok(format!(
        "{rows} rows byte-identical across runs and workers {{1, 4}}, slowest sweep {:.1} s",
        slowest.as_secs_f64()
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("exponential closed form", exponential_closed_form),
        ("rational closed form and symmetry", rational_closed_form),
        ("affine uniformity", affine_uniformity),
        ("log closed form", log_closed_form),
        ("quadratic vs brute-force oracle", quadratic_oracle),
        ("polylogarithmic runtime", polylog_runtime),
        ("property suites", property_suites),
        ("ternary and bisection contracts", search_contracts),
        ("manifold determinism", manifold_determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {}. {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {}. {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
