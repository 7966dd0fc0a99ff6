use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use crate::diff::{central_difference, DerivativeOrder};
use crate::error::{Error, Result};
use crate::expr::Expression;

type ScalarFn = dyn Fn(f64) -> Result<f64> + Send + Sync;

/// Open subset of the real line: `(lower, upper)` minus finitely many points.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    lower: f64,
    upper: f64,
    excluded: Vec<f64>,
}

impl Domain {
    pub fn real_line() -> Self {
        Domain {
            lower: f64::NEG_INFINITY,
            upper: f64::INFINITY,
            excluded: Vec::new(),
        }
    }

    pub fn new(lower: f64, upper: f64, mut excluded: Vec<f64>) -> Result<Self> {
        if lower.is_nan() || upper.is_nan() || lower >= upper {
            return Err(Error::InvalidInterval { a: lower, b: upper });
        }
        excluded.sort_by(f64::total_cmp);
        excluded.dedup();
        if let Some(&p) = excluded.iter().find(|&&p| !(lower < p && p < upper)) {
            return Err(Error::InvalidInput(format!(
                "excluded point {p} is not inside ({lower}, {upper})"
            )));
        }
        Ok(Domain { lower, upper, excluded })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn excluded(&self) -> &[f64] {
        &self.excluded
    }

    pub fn contains(&self, y: f64) -> bool {
        self.lower < y && y < self.upper && !self.excluded.contains(&y)
    }

    /// Open bounds of the connected piece of the domain that holds `x`.
    pub fn component(&self, x: f64) -> Option<(f64, f64)> {
        if !self.contains(x) {
            return None;
        }
        let left = self
            .excluded
            .iter()
            .rev()
            .find(|&&p| p < x)
            .copied()
            .unwrap_or(self.lower);
        let right = self.excluded.iter().find(|&&p| p > x).copied().unwrap_or(self.upper);
        Some((left, right))
    }

    /// Distance from `x` to the nearest boundary or excluded point; infinite
    /// on the whole real line and zero outside the domain.
    pub fn distance_to_boundary(&self, x: f64) -> f64 {
        match self.component(x) {
            Some((left, right)) => (x - left).min(right - x),
            None => 0.0,
        }
    }

    /// Whether the closed interval `[lo, hi]` lies inside the domain.
    pub fn contains_interval(&self, lo: f64, hi: f64) -> bool {
        self.lower < lo && hi < self.upper && !self.excluded.iter().any(|&p| lo <= p && p <= hi)
    }
}

/// Closed interval `[lo, hi]` with `lo < hi`. Used for search windows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_finite() && hi.is_finite() && lo < hi {
            Ok(Interval { lo, hi })
        } else {
            Err(Error::InvalidInterval { a: lo, b: hi })
        }
    }

    pub fn centered(x: f64, radius: f64) -> Result<Self> {
        Interval::new(x - radius, x + radius)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, y: f64) -> bool {
        self.lo <= y && y <= self.hi
    }

    /// `n >= 2` equally spaced points including both ends.
    pub fn grid(&self, n: usize) -> impl Iterator<Item = f64> + '_ {
        let step = self.width() / (n - 1) as f64;
        (0..n).map(move |i| if i + 1 == n { self.hi } else { self.lo + i as f64 * step })
    }
}

/// A real function of one real variable on a [`Domain`], with optional
/// analytic first and second derivatives. Missing derivatives fall back to
/// central differences.
#[derive(Clone)]
pub struct RealFunction {
    label: String,
    domain: Domain,
    eval: Arc<ScalarFn>,
    d1: Option<Arc<ScalarFn>>,
    d2: Option<Arc<ScalarFn>>,
}

impl fmt::Debug for RealFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RealFunction")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .field("analytic_d1", &self.d1.is_some())
            .field("analytic_d2", &self.d2.is_some())
            .finish()
    }
}

fn infallible(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Arc<ScalarFn> {
    Arc::new(move |y| Ok(f(y)))
}

impl RealFunction {
    pub fn new(label: impl Into<String>, domain: Domain, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        RealFunction {
            label: label.into(),
            domain,
            eval: infallible(f),
            d1: None,
            d2: None,
        }
    }

    /// Attaches analytic derivatives `f'` and `f''`.
    pub fn with_derivatives(
        mut self,
        d1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.d1 = Some(infallible(d1));
        self.d2 = Some(infallible(d2));
        self
    }

    /// Wraps a parsed expression. The domain is the whole line; poles show up
    /// as evaluation errors.
    pub fn from_expression(expr: Expression) -> Self {
        let label = expr.source().to_owned();
        RealFunction {
            label,
            domain: Domain::real_line(),
            eval: Arc::new(move |y| expr.evaluate(y).map_err(Error::from)),
            d1: None,
            d2: None,
        }
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn has_analytic_derivatives(&self) -> bool {
        self.d1.is_some() && self.d2.is_some()
    }

    fn checked(&self, g: &ScalarFn, y: f64) -> Result<f64> {
        if !self.domain.contains(y) {
            return Err(Error::OutsideDomain {
                label: self.label.clone(),
                y,
            });
        }
        let value = g(y)?;
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::NonFinite {
                label: self.label.clone(),
                y,
            })
        }
    }

    pub fn eval(&self, y: f64) -> Result<f64> {
        self.checked(&*self.eval, y)
    }

    pub fn derivative(&self, y: f64) -> Result<f64> {
        match &self.d1 {
            Some(d1) => self.checked(&**d1, y),
            None => central_difference(|t| self.eval(t), y, DerivativeOrder::First),
        }
    }

    pub fn second_derivative(&self, y: f64) -> Result<f64> {
        match &self.d2 {
            Some(d2) => self.checked(&**d2, y),
            None => central_difference(|t| self.eval(t), y, DerivativeOrder::Second),
        }
    }

    /// A copy of this function that counts every call to `f`, `f'` and `f''`.
    pub fn counted(&self) -> (RealFunction, EvalCounter) {
        let counter = EvalCounter::default();
        let wrap = |g: &Arc<ScalarFn>| -> Arc<ScalarFn> {
            let g = Arc::clone(g);
            let hits = Arc::clone(&counter.0);
            Arc::new(move |y| {
                hits.fetch_add(1, Ordering::Relaxed);
                g(y)
            })
        };
        let counted = RealFunction {
            label: self.label.clone(),
            domain: self.domain.clone(),
            eval: wrap(&self.eval),
            d1: self.d1.as_ref().map(wrap),
            d2: self.d2.as_ref().map(wrap),
        };
        (counted, counter)
    }
}

/// Shared evaluation counter handed out by [`RealFunction::counted`].
#[derive(Debug, Clone, Default)]
pub struct EvalCounter(Arc<AtomicUsize>);

impl EvalCounter {
    pub fn get(&self) -> usize {
        self.0.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.0.store(0, Ordering::Relaxed);
    }
}
