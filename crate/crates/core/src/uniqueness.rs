//! Energy functionals of the difference of two solutions in
//! `\dot H^{1/2} x \dot H^{-1/2}`, the integrated Groenwall comparison and
//! perturbation experiments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::boussinesq::StatePair;
use crate::error::{Error, Result};
use crate::picard::{cumulative_trapezoid, run_picard, AdmissibilityCase, PicardConfig, PicardDiagnostics, TermSet};
use crate::spectral::{
    gen_random_field, gen_random_velocity, gradient, hdot, lebesgue_norm, SpectralField, SpectralScalar,
    SpectralVector,
};

/// Relative slack of the Groenwall comparison, in units of `max N`.
pub const GRONWALL_SLACK: f64 = 1e-12;
/// `N` counts as zero below this multiple of the squared run scale.
pub const ZERO_ENERGY_TOL: f64 = 1e-10;
/// Spectral slope of the random perturbation direction.
pub const PERTURBATION_SLOPE: f64 = 3.0;

/// Energy functionals of `v = u1 - u2`, `eta = theta1 - theta2` at every sample.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyTrace {
    pub times: Vec<f64>,
    /// `||v||^2_{\dot H^{1/2}} + ||eta||^2_{\dot H^{-1/2}}`
    pub e1: Vec<f64>,
    /// `||grad (x) v||^2_{\dot H^{1/2}} + ||grad eta||^2_{\dot H^{-1/2}}`
    pub e2: Vec<f64>,
    /// `E1(t) + int_0^t E2`
    pub n: Vec<f64>,
    /// `||u1||^4_{\dot H^1} + ||u2||^4_{\dot H^1} + ||theta2||^2_{\dot W^{1,3}} + 1`
    pub gronwall_coeff: Vec<f64>,
    /// Largest `N` of either run measured against zero; the squared scale of
    /// the runs.
    pub scale_sq: f64,
}

fn gradient_energy(v: &SpectralVector, order: f64) -> Result<f64> {
    v.components().iter().map(|c| Ok(hdot(&gradient(c), order)?.powi(2))).sum()
}

fn energies(u: &SpectralVector, theta: &SpectralScalar) -> Result<(f64, f64)> {
    let e1 = hdot(u, 0.5)?.powi(2) + hdot(theta, -0.5)?.powi(2);
    let e2 = gradient_energy(u, 0.5)? + hdot(&gradient(theta), -0.5)?.powi(2);
    Ok((e1, e2))
}

/// `||grad theta||_{L^3}` of the pointwise Euclidean magnitude, rectangle rule.
pub fn w13_seminorm(theta: &SpectralScalar) -> Result<f64> {
    lebesgue_norm(&gradient(theta), 3.0)
}

/// Energy traces of the difference `run1 - run2`.
pub fn energy_traces(run1: &StatePair, run2: &StatePair) -> Result<EnergyTrace> {
    if !run1.same_times(run2) || run1.grid() != run2.grid() {
        return Err(Error::MismatchedTrajectories);
    }
    let (u1, t1) = (run1.velocity().samples(), run1.temperature().samples());
    let (u2, t2) = (run2.velocity().samples(), run2.temperature().samples());
    let dt = run1.dt();
    let mut e1 = Vec::with_capacity(u1.len());
    let mut e2 = Vec::with_capacity(u1.len());
    let mut coeff = Vec::with_capacity(u1.len());
    let mut own = [Vec::new(), Vec::new()];
    for m in 0..u1.len() {
        let (a, b) = energies(&u1[m].sub(&u2[m]), &t1[m].sub(&t2[m]))?;
        e1.push(a);
        e2.push(b);
        coeff.push(hdot(&u1[m], 1.0)?.powi(4) + hdot(&u2[m], 1.0)?.powi(4) + w13_seminorm(&t2[m])?.powi(2) + 1.0);
        own[0].push(energies(&u1[m], &t1[m])?);
        own[1].push(energies(&u2[m], &t2[m])?);
    }
    let n = self_n(&e1, &e2, dt);
    let scale_sq = own
        .iter()
        .map(|run| {
            let (a, b): (Vec<f64>, Vec<f64>) = run.iter().copied().unzip();
            self_n(&a, &b, dt).into_iter().fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    Ok(EnergyTrace { times: run1.velocity().times(), e1, e2, n, gronwall_coeff: coeff, scale_sq })
}

fn self_n(e1: &[f64], e2: &[f64], dt: f64) -> Vec<f64> {
    e1.iter().zip(cumulative_trapezoid(e2, dt)).map(|(a, b)| a + b).collect()
}

/// Outcome of the integrated comparison `N(t) <= N(0) exp(C int_0^t g)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GronwallReport {
    /// Smallest admissible `C`; zero when `N(0) = 0`.
    pub fitted_c: f64,
    pub verdict: bool,
    /// `N(0) exp(C int_0^t g)` at every sample.
    pub bound: Vec<f64>,
    pub max_n: f64,
    /// `N(0) = 0` branch: uniqueness asks for `N` to stay at roundoff level.
    pub zero_start: bool,
    /// Largest discrete `(dE1/dt + E2) / (g E1)` over the sample intervals;
    /// a diagnostic only.
    pub differential_ratio: Option<f64>,
}

/// Fits the Groenwall constant of a trace.
pub fn gronwall_check(trace: &EnergyTrace) -> GronwallReport {
    let n0 = trace.n[0];
    let max_n = trace.n.iter().fold(0.0, |m: f64, v| m.max(*v));
    let dt = trace.times.get(1).map_or(0.0, |t| t - trace.times[0]);
    let g_int = cumulative_trapezoid(&trace.gronwall_coeff, dt);
    let differential_ratio = differential_ratio(trace, dt);
    if n0 == 0.0 {
        let verdict = max_n <= ZERO_ENERGY_TOL * trace.scale_sq;
        return GronwallReport {
            fitted_c: 0.0,
            verdict,
            bound: vec![0.0; trace.n.len()],
            max_n,
            zero_start: true,
            differential_ratio,
        };
    }
    let slack = GRONWALL_SLACK * max_n;
    // log-domain: C >= ln((N(t) - slack) / N(0)) / G(t)
    let fitted_c = trace
        .n
        .iter()
        .zip(&g_int)
        .skip(1)
        .filter(|(n, _)| **n - slack > n0)
        .map(|(n, g)| ((n - slack) / n0).ln() / g)
        .fold(0.0, f64::max);
    let bound = g_int.iter().map(|g| n0 * (fitted_c * g).exp()).collect();
    GronwallReport {
        fitted_c,
        verdict: fitted_c.is_finite() && n0.is_finite(),
        bound,
        max_n,
        zero_start: false,
        differential_ratio,
    }
}

fn differential_ratio(trace: &EnergyTrace, dt: f64) -> Option<f64> {
    if dt <= 0.0 {
        return None;
    }
    let ratios: Vec<f64> = (0..trace.e1.len().saturating_sub(1))
        .filter_map(|m| {
            let growth = (trace.e1[m + 1] - trace.e1[m]) / dt + 0.5 * (trace.e2[m] + trace.e2[m + 1]);
            let base = 0.25 * (trace.gronwall_coeff[m] + trace.gronwall_coeff[m + 1]) * (trace.e1[m] + trace.e1[m + 1]);
            (base > 0.0).then(|| growth / base)
        })
        .collect();
    (!ratios.is_empty()).then(|| ratios.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v)))
}

/// Norms entering the uniqueness hypotheses for one run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HypothesisNorms {
    pub velocity_l4_h1: f64,
    pub temperature_sup_hm_half: f64,
    pub temperature_l2_h_half: f64,
    pub temperature_l2_w13: f64,
    pub all_finite: bool,
}

pub fn hypothesis_norms(run: &StatePair) -> Result<HypothesisNorms> {
    use crate::picard::{lp_time_norm, trajectory_norm, TimeNorm};
    use crate::spectral::NormOrder;
    let theta = run.temperature();
    let velocity_l4_h1 = TermSet::limit_velocity().eval(run.velocity())?;
    let temperature_sup_hm_half = trajectory_norm(theta, NormOrder::homogeneous(-0.5), TimeNorm::Sup)?;
    let temperature_l2_h_half = trajectory_norm(theta, NormOrder::homogeneous(0.5), TimeNorm::Lp(2.0))?;
    let w13 = theta.samples().iter().map(w13_seminorm).collect::<Result<Vec<_>>>()?;
    let temperature_l2_w13 = lp_time_norm(&w13, theta.dt(), 2.0);
    let all_finite = [velocity_l4_h1, temperature_sup_hm_half, temperature_l2_h_half, temperature_l2_w13]
        .iter()
        .all(|v| v.is_finite());
    Ok(HypothesisNorms {
        velocity_l4_h1,
        temperature_sup_hm_half,
        temperature_l2_h_half,
        temperature_l2_w13,
        all_finite,
    })
}

/// Result of solving from the data and from perturbed data.
#[derive(Clone, Debug, Serialize)]
pub struct PerturbationReport {
    pub eps: f64,
    pub trace: EnergyTrace,
    pub gronwall: GronwallReport,
    pub hypotheses: [HypothesisNorms; 2],
    /// `max_t E1(t) / eps^2`; `None` for `eps = 0`.
    pub continuity_constant: Option<f64>,
    pub diagnostics: [PicardDiagnostics; 2],
}

/// Random zero-mean perturbation direction with unit `\dot H^{1/2}` velocity
/// part and unit `\dot H^{-1/2}` temperature part.
pub fn perturbation_direction(grid: &crate::spectral::Grid, seed: u64) -> Result<(SpectralVector, SpectralScalar)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = gen_random_velocity(rng.random(), PERTURBATION_SLOPE, grid);
    let t = gen_random_field(rng.random(), PERTURBATION_SLOPE, grid);
    let (nu, nt) = (hdot(&u, 0.5)?, hdot(&t, -0.5)?);
    Ok((u.scaled(1.0 / nu), t.scaled(1.0 / nt)))
}

/// Solves from `(u0, theta0)` and from `(u0, theta0) + eps * direction`,
/// where the direction comes from [`perturbation_direction`], so that
/// `E1(0) = 2 eps^2`.
pub fn perturbation_experiment(
    u0: &SpectralVector,
    theta0: &SpectralScalar,
    eps: f64,
    config: &PicardConfig,
    seed: u64,
) -> Result<PerturbationReport> {
    if config.params.case != AdmissibilityCase::Case2Limit {
        return Err(Error::InvalidConfig(format!(
            "perturbation experiments need s = 1/2 and 1/2 <= r <= 1, got ({}, {})",
            config.params.r, config.params.s
        )));
    }
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::InvalidConfig(format!("eps must be >= 0, got {eps}")));
    }
    let (run1, d1) = run_picard(u0, theta0, config)?;
    let (du, dt) = perturbation_direction(&config.grid, seed)?;
    let u2 = u0.add(&du.scaled(eps));
    let t2 = theta0.add(&dt.scaled(eps));
    let (run2, d2) = run_picard(&u2, &t2, config)?;
    let trace = energy_traces(&run1, &run2)?;
    let gronwall = gronwall_check(&trace);
    let hypotheses = [hypothesis_norms(&run1)?, hypothesis_norms(&run2)?];
    let continuity_constant = (eps > 0.0).then(|| trace.e1.iter().fold(0.0, |m: f64, v| m.max(*v)) / (eps * eps));
    Ok(PerturbationReport { eps, trace, gronwall, hypotheses, continuity_constant, diagnostics: [d1, d2] })
}
