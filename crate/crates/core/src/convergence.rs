//! Limit estimation by window doubling.

use serde::{Deserialize, Serialize};

/// Outcome of a limit computation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Verdict {
    Converged,
    NotConverged,
    /// The limit is the exact rational `numerator / denominator` (lowest terms).
    ExactPeriodic {
        numerator: i64,
        denominator: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub value: f64,
    pub error_bound: f64,
    pub iterations: usize,
    pub verdict: Verdict,
    /// Averages at the last two checkpoints `n/2` and `n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub last_windows: Option<(f64, f64)>,
    /// Period of the base orbit, when one was detected.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<usize>,
    /// `θ'(ĝⁿ(x̂))/n` for a primitive `θ'` that is not fiber-equivariant.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gk_variant: Option<f64>,
    /// Invariance residual of the measure (mean translation numbers only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invariance_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub non_invariant: bool,
}

impl ConvergenceReport {
    pub fn converged(value: f64, error_bound: f64, iterations: usize) -> Self {
        Self {
            value,
            error_bound,
            iterations,
            verdict: Verdict::Converged,
            last_windows: None,
            period: None,
            gk_variant: None,
            invariance_residual: None,
            non_invariant: false,
        }
    }

    pub fn exact(numerator: i64, denominator: u64, iterations: usize) -> Self {
        let g = num_integer::gcd(numerator.unsigned_abs(), denominator).max(1);
        let (num, den) = (numerator / g as i64, denominator / g);
        Self {
            value: num as f64 / den as f64,
            error_bound: 0.0,
            iterations,
            verdict: Verdict::ExactPeriodic {
                numerator: num,
                denominator: den,
            },
            last_windows: None,
            period: None,
            gk_variant: None,
            invariance_residual: None,
            non_invariant: false,
        }
    }

    pub fn is_converged(&self) -> bool {
        !matches!(self.verdict, Verdict::NotConverged)
    }
}

/// Compensated (Neumaier) summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::default();
        for v in iter {
            s.add(v);
        }
        s
    }
}

/// Smallest `2n` at which the window test may declare convergence. Orbits of
/// period below this are caught by periodic detection first.
pub const MIN_CONVERGENCE_WINDOW: usize = 16;

/// Running mean of `Σ_{i<n} f_i / n` checked at `n = 1, 2, 4, …`.
#[derive(Clone, Debug)]
pub(crate) struct WindowedMean {
    sum: CompensatedSum,
    n: usize,
    next_check: usize,
    prev_avg: Option<f64>,
    last_windows: Option<(f64, f64)>,
    tolerance: f64,
}

impl WindowedMean {
    pub(crate) fn new(tolerance: f64) -> Self {
        Self {
            sum: CompensatedSum::default(),
            n: 0,
            next_check: 1,
            prev_avg: None,
            last_windows: None,
            tolerance,
        }
    }

    pub(crate) fn count(&self) -> usize {
        self.n
    }

    pub(crate) fn total(&self) -> f64 {
        self.sum.value()
    }

    /// Push one term; returns a converged report when the doubling test passes.
    pub(crate) fn push(&mut self, v: f64) -> Option<ConvergenceReport> {
        self.sum.add(v);
        self.n += 1;
        if self.n != self.next_check {
            return None;
        }
        self.next_check *= 2;
        let avg = self.sum.value() / self.n as f64;
        let prev = self.prev_avg.replace(avg);
        if let Some(p) = prev {
            self.last_windows = Some((p, avg));
            let diff = (avg - p).abs();
            if self.n >= MIN_CONVERGENCE_WINDOW && diff < self.tolerance {
                let mut rep = ConvergenceReport::converged(avg, diff, self.n);
                rep.last_windows = self.last_windows;
                return Some(rep);
            }
        }
        None
    }

    /// Report after the iteration budget ran out.
    pub(crate) fn exhausted(&self) -> ConvergenceReport {
        let avg = if self.n == 0 {
            0.0
        } else {
            self.sum.value() / self.n as f64
        };
        let windows = match (self.prev_avg, self.n == self.next_check / 2) {
            (Some(p), false) => Some((p, avg)),
            _ => self.last_windows,
        };
        let error = windows.map_or(f64::INFINITY, |(p, q)| (p - q).abs());
        let mut rep = ConvergenceReport::converged(avg, error, self.n);
        rep.verdict = Verdict::NotConverged;
        rep.last_windows = windows;
        rep
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_sequence_converges_at_min_window() {
        let mut w = WindowedMean::new(1e-9);
        let mut out = None;
        for _ in 0..100 {
            if let Some(r) = w.push(0.25) {
                out = Some(r);
                break;
            }
        }
        let r = out.unwrap();
        assert_eq!(r.iterations, MIN_CONVERGENCE_WINDOW);
        assert_eq!(r.value, 0.25);
        assert_eq!(r.last_windows, Some((0.25, 0.25)));
    }

    #[test]
    fn exhausted_reports_last_windows() {
        let mut w = WindowedMean::new(1e-15);
        for i in 0..10 {
            assert!(w.push(i as f64).is_none());
        }
        let r = w.exhausted();
        assert_eq!(r.verdict, Verdict::NotConverged);
        assert_eq!(r.iterations, 10);
        // checkpoint 8 had mean 3.5, final mean 4.5
        assert_eq!(r.last_windows, Some((3.5, 4.5)));
    }

    #[test]
    fn exact_reduces_fraction() {
        let r = ConvergenceReport::exact(4, 6, 6);
        assert_eq!(
            r.verdict,
            Verdict::ExactPeriodic {
                numerator: 2,
                denominator: 3
            }
        );
        assert_eq!(r.value, 2.0 / 3.0);
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let s: CompensatedSum = [1e16, 1.0, -1e16].into_iter().collect();
        assert_eq!(s.value(), 1.0);
    }
}
