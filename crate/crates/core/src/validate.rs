//! Regression of the solver against the catalog's closed forms, and against
//! the brute-force oracle where no closed form exists.

use serde::Serialize;

use crate::catalog::{self, brute_force_delta, CatalogEntry};
use crate::solver::{default_window, solve};

/// Oracle grid used for entries without a closed form.
pub const ORACLE_GRID: usize = 100_000;

/// Window radius for every fixture.
pub const FIXTURE_RADIUS: f64 = 1.0;

/// Fixture `(x values, ε values)` for a catalog entry.
pub fn fixture(name: &str) -> Option<(Vec<f64>, Vec<f64>)> {
    let set = match name {
        "log" => (vec![0.5, 1.0, 2.0], vec![0.1, 1.0]),
        "exp1" => (vec![-1.0, -0.5, 0.0, 0.5, 1.0], vec![0.1, 0.25, 0.5, 0.75, 1.0]),
        "rational30" => (vec![27.0, 29.0, 31.0, 33.0], vec![0.1, 0.25]),
        "affine21" => (vec![-1e6, 0.0, 1e6], vec![0.01, 1.0, 10.0]),
        "quad11" => (vec![-4.0, -2.0, 0.0, 2.0, 4.0], vec![0.05, 0.1, 0.5]),
        _ => return None,
    };
    Some(set)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reference {
    ClosedForm,
    BruteForce,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationCase {
    pub entry: &'static str,
    pub x: f64,
    pub epsilon: f64,
    pub reference: Reference,
    pub expected: f64,
    pub actual: f64,
    pub deviation: f64,
    pub tolerance: f64,
    pub error: Option<String>,
}

impl ValidationCase {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.deviation < self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntrySummary {
    pub entry: &'static str,
    pub cases: usize,
    pub failures: usize,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub omega_sol: f64,
    pub entries: Vec<EntrySummary>,
    pub cases: Vec<ValidationCase>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.failures == 0)
    }
}

/// Allowed deviation from a closed form. The floor covers binary64 noise in
/// the ratio when `omega_sol` approaches machine resolution.
pub fn closed_form_tolerance(omega_sol: f64) -> f64 {
    2.0 * omega_sol + 1e-9
}

/// Allowed deviation from the brute-force oracle on a window of `radius`.
pub fn oracle_tolerance(omega_sol: f64, radius: f64) -> f64 {
    omega_sol.max(1e-6) + 2.0 * radius / ORACLE_GRID as f64
}

/// Runs the fixture of every catalog entry.
pub fn run(omega_sol: f64) -> ValidationReport {
    run_entries(&catalog::all(), omega_sol)
}

pub fn run_entries(entries: &[CatalogEntry], omega_sol: f64) -> ValidationReport {
    let mut cases = Vec::new();
    let mut summaries = Vec::new();
    for entry in entries {
        let (xs, epsilons) = fixture(entry.name).unwrap_or_default();
        let start = cases.len();
        for &x in &xs {
            for &eps in &epsilons {
                cases.push(check_point(entry, x, eps, omega_sol));
            }
        }
        let mine = &cases[start..];
        summaries.push(EntrySummary {
            entry: entry.name,
            cases: mine.len(),
            failures: mine.iter().filter(|c| !c.passed()).count(),
            max_deviation: mine.iter().map(|c| c.deviation).fold(0.0, f64::max),
        });
    }
    ValidationReport {
        omega_sol,
        entries: summaries,
        cases,
    }
}

/// Solves at one point and compares with the entry's reference.
pub fn check_point(entry: &CatalogEntry, x: f64, epsilon: f64, omega_sol: f64) -> ValidationCase {
    let f = &entry.function;
    let mut case = ValidationCase {
        entry: entry.name,
        x,
        epsilon,
        reference: Reference::ClosedForm,
        expected: f64::NAN,
        actual: f64::NAN,
        deviation: f64::INFINITY,
        tolerance: closed_form_tolerance(omega_sol),
        error: None,
    };
    let window = match default_window(f, x, FIXTURE_RADIUS) {
        Ok(w) => w,
        Err(e) => {
            case.error = Some(e.to_string());
            return case;
        }
    };
    let expected = match entry.closed_form_pi(x, epsilon) {
        Some(pi) => Ok(pi),
        None => {
            case.reference = Reference::BruteForce;
            case.tolerance = oracle_tolerance(omega_sol, (x - window.lo()).min(window.hi() - x));
            brute_force_delta(f, x, epsilon, window, ORACLE_GRID)
        }
    };
    let outcome = expected.and_then(|want| solve(f, x, epsilon, omega_sol, window).map(|r| (want, r.delta)));
    match outcome {
        Ok((want, got)) => {
            case.expected = want;
            case.actual = got;
            case.deviation = (got - want).abs();
        }
        Err(e) => case.error = Some(e.to_string()),
    }
    case
}
