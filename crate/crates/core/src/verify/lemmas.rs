//! Smoothing of the heat semigroup, the three Duhamel bounds and the
//! frequency-split bound.

use num_complex::Complex64;
use std::time::Instant;

use rand::Rng;

use super::report::{dyadic_ladder, run_trials, EstimateReport, ReportBuilder, VerdictRule, VerifyOptions};
use crate::error::{Error, Result};
use crate::heat::{choose_r_eps, duhamel_trajectory, frequency_split, heat_apply, Trajectory};
use crate::picard::{trajectory_norm, TimeNorm};
use crate::spectral::{gen_random_field, hdot, hnorm, Grid, NormOrder, SpectralField, SpectralScalar};

/// Relative slack of side checks that hold with constant one in the
/// continuum and are evaluated by high-order quadrature.
const QUADRATURE_SLACK: f64 = 1e-9;

/// Time ladder of the smoothing check, `2^-13 .. 1`.
pub fn smoothing_ladder() -> Vec<f64> {
    dyadic_ladder(0, 13)
}

/// Horizon ladder of the Duhamel and split checks, `2^-9 .. 2^-1`.
pub fn lemma_ladder() -> Vec<f64> {
    dyadic_ladder(1, 9)
}

/// Fractions of `||f||_{\dot H^{s1}}` used as `epsilon` by the split check.
pub const SPLIT_EPSILONS: [f64; 3] = [0.5, 0.1, 0.02];

fn random_scalar(options: &VerifyOptions, salt: u64, trial: usize, grid: &Grid) -> SpectralScalar {
    let mut rng = options.trial_rng(salt, trial);
    let slope = rng.random_range(0.5..3.5);
    let weight = 10f64.powf(rng.random_range(-1.0..1.0));
    gen_random_field(rng.random(), slope, grid).scaled(weight)
}

/// Axis and diagonal single modes below the Nyquist row.
fn probe_fields(grid: &Grid) -> Vec<SpectralScalar> {
    let top = grid.n() as i64 / 2 - 1;
    let one = Complex64::new(1.0, 0.0);
    let mut out = Vec::new();
    for m in 1..=top {
        out.push(SpectralScalar::single_mode(grid, [m, 0, 0], one));
        out.push(SpectralScalar::single_mode(grid, [m, m, m], one));
    }
    out
}

/// Random fields followed, when enabled, by single-mode probes.
fn ensemble(options: &VerifyOptions, salt: u64, grid: &Grid) -> Vec<SpectralScalar> {
    let mut fields: Vec<SpectralScalar> =
        (0..options.trials).map(|i| random_scalar(options, salt, i, grid)).collect();
    if options.probes {
        fields.extend(probe_fields(grid));
    }
    fields
}

/// Envelope of `||e^{t Laplacian} f||_{H^{s1+s2}} / ((1 + t^{-s2/2}) ||f||_{H^{s1}})`
/// over [`smoothing_ladder`] and random plus single-mode `f`.
pub fn verify_heat_smoothing(s1: f64, s2: f64, options: &VerifyOptions) -> Result<EstimateReport> {
    let start = Instant::now();
    if !(s2 >= 0.0) {
        return Err(Error::BadExponentRange(format!("smoothing order must be >= 0, got {s2}")));
    }
    let grid = options.grid()?;
    let fields = ensemble(options, 1, &grid);
    let ladder = smoothing_ladder();
    let rows = run_trials(fields.len(), |i| {
        let f = &fields[i];
        let base = hnorm(f, s1);
        ladder
            .iter()
            .map(|&t| {
                let lhs = hnorm(&heat_apply(f, t)?, s1 + s2);
                Ok((t, lhs, (1.0 + t.powf(-s2 / 2.0)) * base))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut b = ReportBuilder::new("heat-smoothing", format!("s1={s1},s2={s2}"), 0.0, VerdictRule::Stable).since(start);
    for (i, per_t) in rows.into_iter().enumerate() {
        for (t, lhs, rhs) in per_t {
            b.push(t, i, lhs, rhs);
        }
    }
    Ok(b.finish())
}

/// Which Duhamel bound to measure, for `F = int_0^t e^{(t-tau) Laplacian} f`.
fn duhamel_lhs(point: u8, s1: f64, s2: f64) -> Result<(NormOrder, TimeNorm, &'static str)> {
    match point {
        1 => Ok((NormOrder::homogeneous(s1 + 1.0), TimeNorm::Sup, "duhamel-gradient")),
        2 => Ok((NormOrder::homogeneous(s1 + 2.0), TimeNorm::Lp(2.0), "duhamel-laplacian")),
        3 => {
            if !(s2 > 1.0 && s2 < 2.0) {
                return Err(Error::BadExponentRange(format!("point 3 needs 1 < s2 < 2, got {s2}")));
            }
            Ok((NormOrder::homogeneous(s1 + s2), TimeNorm::Lp(2.0 / (s2 - 1.0)), "duhamel-lebesgue"))
        }
        other => Err(Error::BadExponentRange(format!("Duhamel point must be 1, 2 or 3, got {other}"))),
    }
}

/// Envelope of a Duhamel bound over `||f||_{L^2_t \dot H^{s1}}` on
/// [`lemma_ladder`]:
///
/// - point 1: `sup_t ||F(t)||_{\dot H^{s1+1}}`
/// - point 2: `||F||_{L^2_t \dot H^{s1+2}}`
/// - point 3: `||F||_{L^p_t \dot H^{s1+s2}}`, `p = 2/(s2-1)`, `1 < s2 < 2`
///
/// Forcings are heat flows of random data and constant single modes.
pub fn verify_duhamel_bounds(point: u8, s1: f64, s2: f64, options: &VerifyOptions) -> Result<EstimateReport> {
    let start = Instant::now();
    let (order, time, name) = duhamel_lhs(point, s1, s2)?;
    let grid = options.grid()?;
    let random: Vec<SpectralScalar> = (0..options.trials).map(|i| random_scalar(options, 2, i, &grid)).collect();
    let probes = if options.probes { probe_fields(&grid) } else { Vec::new() };
    let ladder = lemma_ladder();
    let count = random.len() + probes.len();
    let rows = run_trials(count, |i| {
        ladder
            .iter()
            .map(|&t| {
                let forcing = if i < random.len() {
                    Trajectory::heat_flow(&random[i], t, options.steps)?
                } else {
                    Trajectory::constant(&probes[i - random.len()], t, options.steps)?
                };
                let rhs = trajectory_norm(&forcing, NormOrder::homogeneous(s1), TimeNorm::Lp(2.0))?;
                let lhs = trajectory_norm(&duhamel_trajectory(&forcing), order, time)?;
                Ok((t, lhs, rhs))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let instance = if point == 3 { format!("s1={s1},s2={s2}") } else { format!("s1={s1}") };
    let mut b = ReportBuilder::new(name, instance, 0.0, VerdictRule::Stable).since(start);
    for (i, per_t) in rows.into_iter().enumerate() {
        for (t, lhs, rhs) in per_t {
            b.push(t, i, lhs, rhs);
        }
    }
    Ok(b.finish())
}

/// Five-point Gauss-Legendre nodes and weights on `[-1, 1]`.
const GAUSS_NODES: [f64; 5] =
    [-0.906_179_845_938_664, -0.538_469_310_105_683_1, 0.0, 0.538_469_310_105_683_1, 0.906_179_845_938_664];
const GAUSS_WEIGHTS: [f64; 5] =
    [0.236_926_885_056_189_1, 0.478_628_670_499_366_5, 0.568_888_888_888_888_9, 0.478_628_670_499_366_5, 0.236_926_885_056_189_1];
/// Dyadic subintervals `[T 2^-j-1, T 2^-j]` of the graded rule.
const GRADED_LEVELS: i32 = 40;
/// Equal Gauss panels per dyadic subinterval.
const PANELS: usize = 4;

/// `||e^{t Laplacian} f||_{L^p(0, T; \dot H^order)}` in continuous time.
///
/// The integrand is a sum of decaying exponentials, one per shell `|k|^2`, so
/// it is evaluated exactly at any `t` and integrated by Gauss-Legendre on
/// dyadically graded subintervals; fast modes are resolved regardless of `T`.
pub fn heat_flow_lp_norm<F: SpectralField>(f: &F, order: f64, p: f64, horizon: f64) -> Result<f64> {
    if !(horizon > 0.0) {
        return Err(Error::NegativeTime(horizon));
    }
    if !(p >= 1.0) {
        return Err(Error::BadExponentRange(format!("time exponent must be >= 1, got {p}")));
    }
    if order < 0.0 {
        hdot(f, order)?;
    }
    let grid = f.grid();
    let w = grid.weights(order, true);
    let mut shells: Vec<(f64, f64)> = grid
        .k2()
        .iter()
        .enumerate()
        .filter(|&(i, _)| w[i] != 0.0)
        .map(|(i, &k2)| (k2, w[i] * (0..F::COMPONENTS).map(|c| f.component(c)[i].norm_sqr()).sum::<f64>()))
        .filter(|&(_, a)| a > 0.0)
        .collect();
    shells.sort_by(|a, b| a.0.total_cmp(&b.0));
    shells.dedup_by(|next, kept| {
        if next.0 == kept.0 {
            kept.1 += next.1;
            true
        } else {
            false
        }
    });
    let volume = grid.volume();
    let squared = |t: f64| volume * shells.iter().map(|&(k2, a)| a * (-2.0 * t * k2).exp()).sum::<f64>();
    if p.is_infinite() {
        return Ok(squared(0.0).sqrt());
    }
    let integrand = |t: f64| squared(t).max(0.0).powf(p / 2.0);
    let gauss = |a: f64, b: f64| {
        let width = (b - a) / PANELS as f64;
        (0..PANELS)
            .map(|j| {
                let half = 0.5 * width;
                let mid = a + (j as f64 + 0.5) * width;
                half * GAUSS_NODES.iter().zip(&GAUSS_WEIGHTS).map(|(x, w)| w * integrand(mid + half * x)).sum::<f64>()
            })
            .sum::<f64>()
    };
    let mut total = 0.0;
    let mut hi = horizon;
    for _ in 0..GRADED_LEVELS {
        total += gauss(0.5 * hi, hi);
        hi *= 0.5;
    }
    total += gauss(0.0, hi);
    Ok(total.powf(1.0 / p))
}

/// Frequency-split bound on [`lemma_ladder`] with `epsilon` taken as
/// [`SPLIT_EPSILONS`] fractions of `||f||_{\dot H^{s1}}`, `p = 2/(s2-s1)`.
///
/// Rows carry the low-frequency ratio
/// `||e^{t Laplacian} f_low||_{L^p \dot H^{s2}} / ((R^2 T)^{1/p} ||f||_{\dot H^{s1}})`;
/// trial index `j * count + i` encodes epsilon `j` and field `i`. Two side
/// checks with constant one count as violations when they fail:
/// `||e^{t Laplacian} f_high||_{L^p \dot H^{s2}} <= ||f_high||_{\dot H^{s1}}` and the
/// full bound `||e^{t Laplacian} f|| <= epsilon/2 + (R^2 T)^{1/p} ||f||`.
pub fn verify_split_bound(s1: f64, s2: f64, epsilons: &[f64], options: &VerifyOptions) -> Result<EstimateReport> {
    let start = Instant::now();
    if !(s1 < s2 && s2 < s1 + 1.0) {
        return Err(Error::BadExponentRange(format!("split bound needs s1 < s2 < s1 + 1, got ({s1}, {s2})")));
    }
    if epsilons.is_empty() || epsilons.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::InvalidConfig("epsilon fractions must be positive".into()));
    }
    let p = 2.0 / (s2 - s1);
    let grid = options.grid()?;
    let fields = ensemble(options, 3, &grid);
    let ladder = lemma_ladder();
    let count = fields.len();
    struct Outcome {
        rows: Vec<(f64, f64, f64)>,
        violations: usize,
    }
    let outcomes = run_trials(count * epsilons.len(), |idx| {
        let (j, i) = (idx / count, idx % count);
        let f = &fields[i];
        let norm = hdot(f, s1)?;
        let eps = epsilons[j] * norm;
        let split = choose_r_eps(f, s1, eps)?;
        let (high, low) = frequency_split(f, split);
        let high_norm = hdot(&high, s1)?;
        let mut out = Outcome { rows: Vec::with_capacity(ladder.len()), violations: 0 };
        for &t in &ladder {
            let rhs = (split.cutoff * split.cutoff * t).powf(1.0 / p) * norm;
            let low_lhs = heat_flow_lp_norm(&low, s2, p, t)?;
            let high_lhs = heat_flow_lp_norm(&high, s2, p, t)?;
            let full = heat_flow_lp_norm(f, s2, p, t)?;
            if high_lhs > high_norm * (1.0 + QUADRATURE_SLACK) {
                out.violations += 1;
            }
            if full > (0.5 * eps + rhs) * (1.0 + QUADRATURE_SLACK) {
                out.violations += 1;
            }
            out.rows.push((t, low_lhs, rhs));
        }
        Ok(out)
    })?;
    let mut b = ReportBuilder::new("split-bound", format!("s1={s1},s2={s2},p={p}"), 0.0, VerdictRule::Stable).since(start);
    for (idx, o) in outcomes.into_iter().enumerate() {
        for _ in 0..o.violations {
            b.violation();
        }
        for (t, lhs, rhs) in o.rows {
            if lhs == 0.0 {
                // band-limited below the cutoff's complement: nothing to bound
                b.skip();
                continue;
            }
            b.push(t, idx, lhs, rhs);
        }
    }
    Ok(b.finish())
}
