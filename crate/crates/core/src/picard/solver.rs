use serde::Serialize;

use super::admissibility::SobolevParams;
use super::norms::{WorkingNorm, WorkingNormKind};
use crate::boussinesq::{nonlinear_map, StatePair};
use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralField, SpectralScalar, SpectralVector};

/// Outcome of the smallness conditions `C_L < 1/3`, `9 C_B delta < 1` and
/// `C_L + 6 C_B delta < 1` for measured constants.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionsReport {
    pub c_b: f64,
    pub c_l: f64,
    pub delta: f64,
    /// `[velocity part, temperature part]` of `delta`.
    pub delta_parts: [f64; 2],
    pub linear_ok: bool,
    pub bilinear_ok: bool,
    pub combined_ok: bool,
    /// The third condition is implied by the first two; recorded for every
    /// evaluation rather than assumed.
    pub combined_implied: bool,
    /// Constructive smallness certificate for the limit case.
    pub tail: Option<TailCertificate>,
}

impl ConditionsReport {
    pub fn new(c_b: f64, c_l: f64, delta_parts: [f64; 2]) -> Self {
        let delta = delta_parts[0] + delta_parts[1];
        let linear_ok = c_l < 1.0 / 3.0;
        let bilinear_ok = 9.0 * c_b * delta < 1.0;
        let combined_ok = c_l + 6.0 * c_b * delta < 1.0;
        Self {
            c_b,
            c_l,
            delta,
            delta_parts,
            linear_ok,
            bilinear_ok,
            combined_ok,
            combined_implied: !(linear_ok && bilinear_ok) || combined_ok,
            tail: None,
        }
    }

    pub fn all_hold(&self) -> bool {
        self.linear_ok
            && self.bilinear_ok
            && self.combined_ok
            && self.tail.as_ref().is_none_or(|t| t.holds)
    }

    /// First failing condition, or `None`.
    pub fn blocking(&self) -> Option<String> {
        if !self.linear_ok {
            Some(format!("C_L = {:.4e} is not below 1/3", self.c_l))
        } else if !self.bilinear_ok {
            Some(format!("9 C_B delta = {:.4e} is not below 1", 9.0 * self.c_b * self.delta))
        } else if !self.combined_ok {
            Some(format!("C_L + 6 C_B delta = {:.4e} is not below 1", self.c_l + 6.0 * self.c_b * self.delta))
        } else {
            match &self.tail {
                Some(t) if !t.holds => Some(format!(
                    "low-frequency bound {:.4e} is not below epsilon / 2 = {:.4e}",
                    t.low_total,
                    t.epsilon / 2.0
                )),
                _ => None,
            }
        }
    }
}

/// One frequency-split bound `||e^{t Lap} f||_{L^p \dot H^{s2}} <= tail + (R^2 T)^{1/p} ||f||_{\dot H^{s1}}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailTerm {
    pub s1: f64,
    pub s2: f64,
    pub p: f64,
    pub cutoff: f64,
    pub high_norm: f64,
    pub data_norm: f64,
    pub low_bound: f64,
}

/// Certified `delta < epsilon = 1 / (9 C_B)`: every high-frequency part is
/// at most `epsilon / (2 J)` and the low-frequency bounds sum below `epsilon / 2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailCertificate {
    pub epsilon: f64,
    pub terms: Vec<TailTerm>,
    pub tail_total: f64,
    pub low_total: f64,
    pub holds: bool,
}

/// Parameters of one fixed-point solve.
#[derive(Clone, Debug)]
pub struct PicardConfig {
    pub params: SobolevParams,
    pub grid: Grid,
    pub horizon: f64,
    pub steps: usize,
    pub max_iter: usize,
    /// Relative stopping tolerance on successive differences.
    pub tol: f64,
    /// Measured constants, when known.
    pub conditions: Option<ConditionsReport>,
}

impl PicardConfig {
    pub fn new(params: SobolevParams, grid: Grid, horizon: f64, steps: usize) -> Result<Self> {
        let cfg = Self { params, grid, horizon, steps, max_iter: 60, tol: 1e-10, conditions: None };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.params.is_admissible() {
            return Err(Error::Inadmissible { r: self.params.r, s: self.params.s });
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::InvalidConfig(format!("horizon must be positive, got {}", self.horizon)));
        }
        if self.steps < 8 {
            return Err(Error::InvalidConfig(format!("need at least 8 time steps, got {}", self.steps)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

/// Iteration history and post-solve checks of one Picard run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PicardDiagnostics {
    pub working_norm: WorkingNormKind,
    pub delta: f64,
    pub delta_parts: [f64; 2],
    /// Working norm of every iterate, starting with the heat flow of the data.
    pub iterate_norms: Vec<f64>,
    /// Working norm of `e^{n+1} - e^n`, one entry per iteration.
    pub difference_norms: Vec<f64>,
    pub converged: bool,
    /// Working norm of `e - e0 - B(e, e) - L(e)` for the returned iterate.
    pub residual: f64,
    pub residual_ok: bool,
    pub solution_norm: f64,
    pub solution_norm_ok: bool,
    /// `[E1, E2]` norms of the returned iterate, for every case.
    pub energy_norms: [f64; 2],
    pub tol: f64,
    pub conditions: Option<ConditionsReport>,
}

impl PicardDiagnostics {
    pub fn iterations(&self) -> usize {
        self.difference_norms.len()
    }

    /// Ratios of successive difference norms.
    pub fn contraction_ratios(&self) -> Vec<f64> {
        self.difference_norms.windows(2).filter(|w| w[0] > 0.0).map(|w| w[1] / w[0]).collect()
    }

    /// Largest ratio over the second half of the iteration, ignoring
    /// differences already at roundoff level.
    pub fn tail_contraction_ratio(&self) -> Option<f64> {
        let floor = 1e-13 * self.delta.max(f64::MIN_POSITIVE);
        let ratios: Vec<f64> = self
            .difference_norms
            .windows(2)
            .filter(|w| w[0] > floor && w[1] > floor)
            .map(|w| w[1] / w[0])
            .collect();
        if ratios.is_empty() {
            return None;
        }
        let start = ratios.len() / 2;
        Some(ratios[start..].iter().fold(0.0, |m: f64, r| m.max(*r)))
    }
}

pub(crate) fn check_data(u0: &SpectralVector, theta0: &SpectralScalar, grid: &Grid) -> Result<()> {
    if u0.grid() != grid || theta0.grid() != grid {
        return Err(Error::GridMismatch);
    }
    u0.require_divergence_free()?;
    if !theta0.is_zero_mean() {
        return Err(Error::NegativeOrderNonZeroMean { order: -0.5 });
    }
    Ok(())
}

/// Fixed-point map `e -> e0 + B(e, e) + L(e)`.
pub fn fixed_point_map(e0: &StatePair, e: &StatePair) -> Result<StatePair> {
    let mut next = nonlinear_map(e, 1.0, 1.0)?;
    next.axpy(1.0, e0)?;
    Ok(next)
}

/// Picard iteration from the heat flow of `(u0, theta0)` on `[0, T]`.
///
/// Stops once the working norm of `e^{n+1} - e^n` drops below
/// `tol * max(delta, ||e^n||)`. Returns [`Error::NotConverged`] with the full
/// history if that does not happen within `max_iter` iterations.
pub fn run_picard(
    u0: &SpectralVector,
    theta0: &SpectralScalar,
    config: &PicardConfig,
) -> Result<(StatePair, PicardDiagnostics)> {
    config.validate()?;
    check_data(u0, theta0, &config.grid)?;
    let norm = WorkingNorm::for_params(&config.params)?;
    let energy = WorkingNorm::energy(config.params.r, config.params.s);
    let e0 = StatePair::heat_flow(u0, theta0, config.horizon, config.steps)?;
    let delta_parts = norm.parts(&e0)?;
    let delta = delta_parts[0] + delta_parts[1];
    let mut diag = PicardDiagnostics {
        working_norm: norm.kind,
        delta,
        delta_parts,
        iterate_norms: vec![delta],
        difference_norms: Vec::new(),
        converged: false,
        residual: 0.0,
        residual_ok: true,
        solution_norm: 0.0,
        solution_norm_ok: true,
        energy_norms: [0.0, 0.0],
        tol: config.tol,
        conditions: config.conditions.clone(),
    };

    if e0.is_zero() {
        diag.iterate_norms.push(0.0);
        diag.difference_norms.push(0.0);
        diag.converged = true;
        return Ok((e0, diag));
    }

    let mut e = e0.clone();
    for _ in 0..config.max_iter {
        let next = fixed_point_map(&e0, &e)?;
        let diff = norm.eval_difference(&next, &e)?;
        let previous = *diag.iterate_norms.last().expect("history starts non-empty");
        e = next;
        diag.difference_norms.push(diff);
        diag.iterate_norms.push(norm.eval(&e)?);
        if !diff.is_finite() {
            break;
        }
        if diff < config.tol * delta.max(previous) {
            diag.converged = true;
            break;
        }
    }

    let image = fixed_point_map(&e0, &e)?;
    diag.residual = norm.eval_difference(&e, &image)?;
    diag.residual_ok = diag.residual <= 2.0 * config.tol * delta;
    diag.solution_norm = *diag.iterate_norms.last().expect("history starts non-empty");
    diag.solution_norm_ok = diag.solution_norm <= 3.0 * delta * (1.0 + config.tol);
    diag.energy_norms = energy.parts(&e)?;

    if !diag.converged {
        return Err(Error::NotConverged(Box::new(diag)));
    }
    Ok((e, diag))
}
