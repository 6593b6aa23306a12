use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::admissibility::SobolevParams;
use super::norms::{fourth_space_exponent, WorkingNorm};
use super::solver::{check_data, ConditionsReport, PicardConfig, TailCertificate, TailTerm};
use crate::boussinesq::{apply_b, apply_l, StatePair};
use crate::error::{Error, Result};
use crate::heat::{choose_r_eps, frequency_split};
use crate::spectral::{
    gen_random_field, gen_random_velocity, hdot, Grid, SpectralField, SpectralScalar, SpectralVector,
};

/// Exponents `j` of the horizon ladder `T = 2^-j`.
pub const LADDER_EXPONENTS: std::ops::RangeInclusive<i32> = 1..=20;

/// Heat flow of random data with a random spectral slope and random relative
/// weights of the two components.
pub(crate) fn random_state(grid: &Grid, horizon: f64, steps: usize, rng: &mut ChaCha8Rng) -> Result<StatePair> {
    let slope = rng.random_range(0.5..3.5);
    let wu = 10f64.powf(rng.random_range(-1.0..1.0));
    let wt = 10f64.powf(rng.random_range(-1.0..1.0));
    let u = gen_random_velocity(rng.random(), slope, grid).scaled(wu);
    let t = gen_random_field(rng.random(), slope, grid).scaled(wt);
    StatePair::heat_flow(&u, &t, horizon, steps)
}

/// Randomized suprema `C_B = sup ||B(e, f)|| / (||e|| ||f||)` and
/// `C_L = sup ||L(e)|| / ||theta part of e||` over heat flows of random data
/// on the configured horizon, plus `delta = ||heat flow of the data||`, all in
/// the working norm. The temperature part bounds `||e||` from below, so the
/// `C_L` ratio dominates `||L(e)|| / ||e||`.
pub fn estimate_constants(
    u0: &SpectralVector,
    theta0: &SpectralScalar,
    config: &PicardConfig,
    trials: usize,
    seed: u64,
) -> Result<ConditionsReport> {
    if trials < 10 {
        return Err(Error::InvalidConfig(format!("need at least 10 trials, got {trials}")));
    }
    config.validate()?;
    check_data(u0, theta0, &config.grid)?;
    let norm = WorkingNorm::for_params(&config.params)?;
    let e0 = StatePair::heat_flow(u0, theta0, config.horizon, config.steps)?;
    let delta_parts = norm.parts(&e0)?;
    drop(e0);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c_b = 0.0f64;
    let mut c_l = 0.0f64;
    for _ in 0..trials {
        let e = random_state(&config.grid, config.horizon, config.steps, &mut rng)?;
        let f = random_state(&config.grid, config.horizon, config.steps, &mut rng)?;
        let (ne, nf) = (norm.eval(&e)?, norm.eval(&f)?);
        let b = apply_b(&e, &f)?;
        c_b = c_b.max(norm.eval(&b)? / (ne * nf));
        drop(b);
        let l = apply_l(&e)?;
        let theta_part = norm.temperature.eval(e.temperature())?;
        c_l = c_l.max(norm.velocity.eval(l.velocity())? / theta_part);
    }
    Ok(ConditionsReport::new(c_b, c_l, delta_parts))
}

/// Frequency-split certificate that the heat flow of the data is smaller
/// than `epsilon = 1 / (9 C_B)` in the fourth-power norm.
pub fn tail_certificate(
    u0: &SpectralVector,
    theta0: &SpectralScalar,
    params: &SobolevParams,
    horizon: f64,
    c_b: f64,
) -> Result<TailCertificate> {
    let epsilon = 1.0 / (9.0 * c_b);
    let mut instances: Vec<(bool, f64, f64)> = vec![(true, 0.5, 1.0), (false, -0.5, 0.0)];
    if !params.is_limit_point() {
        let r = params.r;
        fourth_space_exponent(r)?;
        instances.push((true, r, r + 0.5));
        instances.push((false, -0.5, r - 1.0));
    }
    let share = epsilon / instances.len() as f64;
    let mut terms = Vec::with_capacity(instances.len());
    for (is_velocity, s1, s2) in instances {
        let p = 2.0 / (s2 - s1);
        let (split, data_norm, high_norm) = if is_velocity {
            let split = choose_r_eps(u0, s1, share)?;
            (split, hdot(u0, s1)?, hdot(&frequency_split(u0, split).0, s1)?)
        } else {
            let split = choose_r_eps(theta0, s1, share)?;
            (split, hdot(theta0, s1)?, hdot(&frequency_split(theta0, split).0, s1)?)
        };
        let low_bound = (split.cutoff * split.cutoff * horizon).powf(1.0 / p) * data_norm;
        terms.push(TailTerm { s1, s2, p, cutoff: split.cutoff, high_norm, data_norm, low_bound });
    }
    let tail_total = terms.iter().map(|t| t.high_norm).sum();
    let low_total: f64 = terms.iter().map(|t| t.low_bound).sum();
    Ok(TailCertificate { epsilon, terms, tail_total, low_total, holds: low_total < epsilon / 2.0 })
}

/// Horizon search settings.
#[derive(Clone, Debug)]
pub struct SelectOptions {
    pub steps: usize,
    pub trials: usize,
    pub seed: u64,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for SelectOptions {
    fn default() -> Self {
        Self { steps: 32, trials: 10, seed: 0, max_iter: 60, tol: 1e-10 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LadderProbe {
    pub horizon: f64,
    pub accepted: bool,
    pub report: ConditionsReport,
}

#[derive(Clone, Debug)]
pub struct T0Selection {
    pub horizon: f64,
    pub config: PicardConfig,
    /// Every probe of the search, in evaluation order.
    pub trace: Vec<LadderProbe>,
}

/// Largest horizon on the ladder `2^-1, ..., 2^-20` whose measured constants
/// satisfy every smallness condition (in the limit case also the
/// frequency-split certificate). Acceptance is assumed monotone in the
/// horizon, so the ladder is bisected.
pub fn select_t0(
    u0: &SpectralVector,
    theta0: &SpectralScalar,
    params: &SobolevParams,
    grid: &Grid,
    options: &SelectOptions,
) -> Result<T0Selection> {
    if !params.is_admissible() {
        return Err(Error::Inadmissible { r: params.r, s: params.s });
    }
    let ladder: Vec<f64> = LADDER_EXPONENTS.map(|j| 2f64.powi(-j)).collect();
    let mut trace = Vec::new();
    let mut probe = |horizon: f64| -> Result<(bool, PicardConfig)> {
        let mut config = PicardConfig::new(*params, grid.clone(), horizon, options.steps)?;
        config.max_iter = options.max_iter;
        config.tol = options.tol;
        let mut report = estimate_constants(u0, theta0, &config, options.trials, options.seed)?;
        if params.case == super::admissibility::AdmissibilityCase::Case2Limit {
            report.tail = Some(tail_certificate(u0, theta0, params, horizon, report.c_b)?);
        }
        let accepted = report.all_hold();
        trace.push(LadderProbe { horizon, accepted, report: report.clone() });
        config.conditions = Some(report);
        Ok((accepted, config))
    };

    // smallest index whose probe passes
    let (mut lo, mut hi) = (0usize, ladder.len());
    let mut best: Option<PicardConfig> = None;
    while lo < hi {
        let mid = (lo + hi) / 2;
        let (ok, config) = probe(ladder[mid])?;
        if ok {
            hi = mid;
            best = Some(config);
        } else {
            lo = mid + 1;
        }
    }
    match best {
        Some(config) if lo < ladder.len() => Ok(T0Selection { horizon: config.horizon, config, trace }),
        _ => {
            let blocking = trace
                .last()
                .and_then(|p| p.report.blocking())
                .unwrap_or_else(|| "no probe passed".into());
            Err(Error::NoAdmissibleT { smallest_t: ladder[ladder.len() - 1], blocking })
        }
    }
}
