//! Sampling `(x, ε) ↦ Π(x, ε)` over a rectangular grid.
//!
//! Each grid point is an independent [`solve`](crate::solver::solve) with its
//! own window, so points can run in any order on any number of threads. The
//! output is always in row-major order, `x` outer and `ε` inner.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numerics::RealFunction;
use crate::solver::{default_window, Solver};

/// Largest window radius used for a grid point.
pub const MANIFOLD_WINDOW_RADIUS: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub x_count: usize,
    pub eps_min: f64,
    pub eps_max: f64,
    pub eps_count: usize,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, x_count: usize, eps_min: f64, eps_max: f64, eps_count: usize) -> Result<Self> {
        let grid = GridSpec {
            x_min,
            x_max,
            x_count,
            eps_min,
            eps_max,
            eps_count,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.x_min, self.x_max, self.eps_min, self.eps_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidInput("grid bounds must be finite".into()));
        }
        if self.x_min >= self.x_max {
            return Err(Error::InvalidInput(format!(
                "x_min must be below x_max, got [{}, {}]",
                self.x_min, self.x_max
            )));
        }
        if !(0.0 < self.eps_min && self.eps_min < self.eps_max) {
            return Err(Error::InvalidInput(format!(
                "need 0 < eps_min < eps_max, got [{}, {}]",
                self.eps_min, self.eps_max
            )));
        }
        if self.x_count < 2 || self.eps_count < 2 {
            return Err(Error::InvalidInput(format!(
                "grid counts must be at least 2, got {} x {}",
                self.x_count, self.eps_count
            )));
        }
        Ok(())
    }

    pub fn xs(&self) -> Vec<f64> {
        linspace(self.x_min, self.x_max, self.x_count)
    }

    pub fn epsilons(&self) -> Vec<f64> {
        linspace(self.eps_min, self.eps_max, self.eps_count)
    }

    pub fn len(&self) -> usize {
        self.x_count * self.eps_count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + i as f64 * step })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SampleStatus {
    Ok,
    Skipped(String),
}

impl fmt::Display for SampleStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SampleStatus::Ok => f.write_str("ok"),
            SampleStatus::Skipped(reason) => write!(f, "skipped:{reason}"),
        }
    }
}

impl Serialize for SampleStatus {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ManifoldSample {
    pub x: f64,
    pub epsilon: f64,
    pub delta: Option<f64>,
    pub status: SampleStatus,
}

impl ManifoldSample {
    pub fn is_ok(&self) -> bool {
        self.status == SampleStatus::Ok
    }
}

/// Samples on rayon's global pool.
pub fn sample_manifold(f: &RealFunction, grid: &GridSpec, omega_sol: f64) -> Result<Vec<ManifoldSample>> {
    grid.validate()?;
    check_omega(omega_sol)?;
    Ok(sample_all(f, grid, omega_sol))
}

/// Samples on a dedicated pool of `workers` threads. The result does not
/// depend on `workers`.
pub fn sample_manifold_with_workers(
    f: &RealFunction,
    grid: &GridSpec,
    omega_sol: f64,
    workers: usize,
) -> Result<Vec<ManifoldSample>> {
    grid.validate()?;
    check_omega(omega_sol)?;
    if workers == 0 {
        return Err(Error::InvalidInput("worker count must be positive".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidInput(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| sample_all(f, grid, omega_sol)))
}

fn check_omega(omega_sol: f64) -> Result<()> {
    if omega_sol > 0.0 && omega_sol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "omega_sol must be positive, got {omega_sol}"
        )))
    }
}

fn sample_all(f: &RealFunction, grid: &GridSpec, omega_sol: f64) -> Vec<ManifoldSample> {
    let xs = grid.xs();
    let eps = grid.epsilons();
    let n_eps = eps.len();
    (0..xs.len() * n_eps)
        .into_par_iter()
        .map(|k| sample_point(f, xs[k / n_eps], eps[k % n_eps], omega_sol))
        .collect()
}

fn sample_point(f: &RealFunction, x: f64, epsilon: f64, omega_sol: f64) -> ManifoldSample {
    let skipped = |reason: &str| ManifoldSample {
        x,
        epsilon,
        delta: None,
        status: SampleStatus::Skipped(reason.to_owned()),
    };
    if f.domain().excluded().contains(&x) {
        return skipped("excluded-point");
    }
    let outcome = default_window(f, x, MANIFOLD_WINDOW_RADIUS)
        .and_then(|window| Solver::default().solve(f, x, epsilon, omega_sol, window));
    match outcome {
        Ok(report) => ManifoldSample {
            x,
            epsilon,
            delta: Some(report.delta),
            status: SampleStatus::Ok,
        },
        Err(e) => skipped(e.reason()),
    }
}

/// Writes `x,epsilon,delta,status` rows. Numbers use the shortest decimal
/// that reads back to the same `f64`.
///
/// ```
/// use epsdelta::manifold::{write_csv, ManifoldSample, SampleStatus};
///
/// let rows = [
///     ManifoldSample { x: 0.0, epsilon: 0.5, delta: Some(1.5f64.ln()), status: SampleStatus::Ok },
///     ManifoldSample { x: -5.5, epsilon: 0.1, delta: None, status: SampleStatus::Skipped("zero-derivative".into()) },
/// ];
/// let mut out = Vec::new();
/// write_csv(&rows, &mut out).unwrap();
/// assert_eq!(
///     String::from_utf8(out).unwrap(),
///     "x,epsilon,delta,status\n0,0.5,0.4054651081081644,ok\n-5.5,0.1,,skipped:zero-derivative\n"
/// );
/// ```
pub fn write_csv<W: Write>(samples: &[ManifoldSample], mut out: W) -> std::io::Result<()> {
    out.write_all(b"x,epsilon,delta,status\n")?;
    for s in samples {
        match s.delta {
            Some(d) => writeln!(out, "{},{},{},{}", s.x, s.epsilon, d, s.status)?,
            None => writeln!(out, "{},{},,{}", s.x, s.epsilon, s.status)?,
        }
    }
    out.flush()
}

/// Writes a JSON array of `{x, epsilon, delta, status}` objects, `delta`
/// being `null` for skipped points.
pub fn write_json<W: Write>(samples: &[ManifoldSample], mut out: W) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut out, samples)?;
    out.write_all(b"\n")?;
    out.flush()
}
