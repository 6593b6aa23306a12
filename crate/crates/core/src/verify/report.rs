use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::Grid;

/// Tolerance on fitted log-log slopes.
pub const SLOPE_TOL: f64 = 0.15;
/// Largest accepted max/min ratio of a lemma envelope across its ladder.
pub const STABILITY_LIMIT: f64 = 10.0;
/// Additive slack of the exact (constant one) inequalities.
pub const EXACT_SLACK: f64 = 1e-12;

/// Horizon ladder `2^-hi, ..., 2^-lo`, increasing.
pub fn dyadic_ladder(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).rev().map(|j| 2f64.powi(-j)).collect()
}

/// Sampling sizes and randomness shared by all verifiers.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyOptions {
    pub n: usize,
    pub steps: usize,
    pub trials: usize,
    pub seed: u64,
    /// Adds single-mode probes to the random ensemble where a verifier
    /// supports them.
    pub probes: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { n: 16, steps: 32, trials: 20, seed: 0, probes: true }
    }
}

impl VerifyOptions {
    pub fn grid(&self) -> Result<Grid> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be positive".into()));
        }
        if self.steps < 8 {
            return Err(Error::InvalidConfig(format!("need at least 8 time steps, got {}", self.steps)));
        }
        Grid::periodic(self.n)
    }

    /// Random stream of one trial; `salt` separates verifiers.
    pub(crate) fn trial_rng(&self, salt: u64, trial: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream((salt << 32) ^ trial as u64);
        rng
    }
}

/// How a report turns its measurements into a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum VerdictRule {
    /// Finite envelope and fitted slope at least `alpha - SLOPE_TOL`.
    Slope,
    /// Finite envelope, max/min across the ladder at most `STABILITY_LIMIT`,
    /// and no violated side check.
    Stable,
    /// Constant-one inequality: no row above `1 + EXACT_SLACK` relative.
    Exact,
    /// Finite envelope.
    Bounded,
}

/// One measured ratio.
#[derive(Clone, Debug, Serialize)]
pub struct RatioRow {
    pub t: f64,
    pub trial: usize,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / (t^alpha rhs)`
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LadderPoint {
    pub t: f64,
    /// Largest `lhs / (t^alpha rhs)` at this rung.
    pub envelope: f64,
    /// Largest `lhs / rhs` at this rung; the slope is fitted to these.
    pub raw_envelope: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EstimateReport {
    pub name: String,
    /// Parameters of this instance, e.g. `r=1,s=0.3`.
    pub instance: String,
    pub expected_alpha: f64,
    pub rule: VerdictRule,
    pub rows: Vec<RatioRow>,
    pub ladder: Vec<LadderPoint>,
    pub envelope_constant: f64,
    pub fitted_slope: Option<f64>,
    /// max/min of the envelope across the ladder.
    pub stability: Option<f64>,
    pub skipped: usize,
    pub violations: usize,
    pub verdict: bool,
    pub runtime_seconds: f64,
}

impl EstimateReport {
    /// One line summary.
    pub fn summary(&self) -> String {
        let opt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.4}"));
        format!(
            "{} [{}] {}: envelope {:.4e}, slope {} (alpha {:.4}), stability {}, skipped {}, violations {}",
            self.name,
            self.instance,
            if self.verdict { "pass" } else { "FAIL" },
            self.envelope_constant,
            opt(self.fitted_slope),
            self.expected_alpha,
            opt(self.stability),
            self.skipped,
            self.violations
        )
    }
}

/// Least-squares slope of `log y` against `log x`; `None` with fewer than two
/// usable points.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0 && a.is_finite() && b.is_finite())
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Accumulates rows and turns them into a report.
pub(crate) struct ReportBuilder {
    name: String,
    instance: String,
    alpha: f64,
    rule: VerdictRule,
    rows: Vec<RatioRow>,
    skipped: usize,
    violations: usize,
    started: Instant,
}

impl ReportBuilder {
    pub(crate) fn new(name: impl Into<String>, instance: impl Into<String>, alpha: f64, rule: VerdictRule) -> Self {
        Self {
            name: name.into(),
            instance: instance.into(),
            alpha,
            rule,
            rows: Vec::new(),
            skipped: 0,
            violations: 0,
            started: Instant::now(),
        }
    }

    /// Records `lhs / rhs`, or counts a skip when the denominator vanishes.
    pub(crate) fn push(&mut self, t: f64, trial: usize, lhs: f64, rhs: f64) {
        if !(rhs > 0.0) || !rhs.is_finite() {
            self.skipped += 1;
            return;
        }
        let scale = if self.alpha == 0.0 { 1.0 } else { t.powf(self.alpha) };
        if self.rule == VerdictRule::Exact && lhs > rhs * (1.0 + EXACT_SLACK) + EXACT_SLACK {
            self.violations += 1;
        }
        self.rows.push(RatioRow { t, trial, lhs, rhs, ratio: lhs / (scale * rhs) });
    }

    /// Measures runtime from `start` instead of from construction.
    pub(crate) fn since(mut self, start: Instant) -> Self {
        self.started = start;
        self
    }

    pub(crate) fn skip(&mut self) {
        self.skipped += 1;
    }

    pub(crate) fn violation(&mut self) {
        self.violations += 1;
    }

    pub(crate) fn finish(self) -> EstimateReport {
        let mut ts: Vec<f64> = self.rows.iter().map(|r| r.t).collect();
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        let ladder: Vec<LadderPoint> = ts
            .iter()
            .map(|&t| {
                let at = self.rows.iter().filter(|r| r.t == t);
                let envelope = at.clone().map(|r| r.ratio).fold(0.0, f64::max);
                let raw_envelope = at.map(|r| r.lhs / r.rhs).fold(0.0, f64::max);
                LadderPoint { t, envelope, raw_envelope }
            })
            .collect();
        let envelope_constant = self
            .rows
            .iter()
            .map(|r| r.ratio)
            .fold(0.0, |m: f64, v| if m.is_nan() || v.is_nan() { f64::NAN } else { m.max(v) });
        let finite = envelope_constant.is_finite() && !self.rows.is_empty();
        let fitted_slope = if ladder.len() >= 2 {
            let x: Vec<f64> = ladder.iter().map(|p| p.t).collect();
            let y: Vec<f64> = ladder.iter().map(|p| p.raw_envelope).collect();
            loglog_slope(&x, &y)
        } else {
            None
        };
        let stability = (ladder.len() >= 2).then(|| {
            let max = ladder.iter().map(|p| p.envelope).fold(0.0, f64::max);
            let min = ladder.iter().map(|p| p.envelope).fold(f64::INFINITY, f64::min);
            max / min
        });
        let verdict = finite
            && match self.rule {
                VerdictRule::Slope => fitted_slope.is_some_and(|k| k >= self.alpha - SLOPE_TOL),
                VerdictRule::Stable => {
                    stability.is_none_or(|q| q <= STABILITY_LIMIT) && self.violations == 0
                }
                VerdictRule::Exact => self.violations == 0,
                VerdictRule::Bounded => true,
            };
        EstimateReport {
            name: self.name,
            instance: self.instance,
            expected_alpha: self.alpha,
            rule: self.rule,
            rows: self.rows,
            ladder,
            envelope_constant,
            fitted_slope,
            stability,
            skipped: self.skipped,
            violations: self.violations,
            verdict,
            runtime_seconds: self.started.elapsed().as_secs_f64(),
        }
    }
}

/// Evaluates `f` for every trial index, in parallel when enabled, returning
/// results in trial order.
pub(crate) fn run_trials<T: Send>(count: usize, f: impl Fn(usize) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..count).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let x = dyadic_ladder(1, 6);
        let y: Vec<f64> = x.iter().map(|t| 3.0 * t.powf(0.35)).collect();
        assert!((loglog_slope(&x, &y).unwrap() - 0.35).abs() < 1e-12);
        assert_eq!(loglog_slope(&x[..1], &y[..1]), None);
    }

    #[test]
    fn ladder_is_increasing() {
        let l = dyadic_ladder(1, 3);
        assert_eq!(l, vec![0.125, 0.25, 0.5]);
    }

    #[test]
    fn zero_denominator_is_skipped() {
        let mut b = ReportBuilder::new("x", "", 0.0, VerdictRule::Bounded);
        b.push(1.0, 0, 0.0, 0.0);
        b.push(1.0, 1, 1.0, 2.0);
        let r = b.finish();
        assert_eq!(r.skipped, 1);
        assert_eq!(r.rows.len(), 1);
        assert!(r.verdict);
        assert_eq!(r.envelope_constant, 0.5);
    }

    #[test]
    fn slope_rule_uses_raw_envelope() {
        let mut b = ReportBuilder::new("x", "", 0.5, VerdictRule::Slope);
        for t in dyadic_ladder(1, 8) {
            b.push(t, 0, t.powf(0.4), 1.0);
        }
        let r = b.finish();
        assert!((r.fitted_slope.unwrap() - 0.4).abs() < 1e-12);
        assert!(r.verdict);
        let mut b = ReportBuilder::new("x", "", 0.6, VerdictRule::Slope);
        for t in dyadic_ladder(1, 8) {
            b.push(t, 0, t.powf(0.4), 1.0);
        }
        assert!(!b.finish().verdict);
    }

    #[test]
    fn exact_rule_counts_violations() {
        let mut b = ReportBuilder::new("x", "", 0.0, VerdictRule::Exact);
        b.push(1.0, 0, 1.0, 1.0);
        b.push(1.0, 1, 1.1, 1.0);
        let r = b.finish();
        assert_eq!(r.violations, 1);
        assert!(!r.verdict);
    }
}
