//! Horizon dependence of the linear and bilinear bounds behind the fixed
//! point, measured through the actual operators on `[0, T]`.

use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use super::report::{dyadic_ladder, run_trials, EstimateReport, ReportBuilder, VerdictRule, VerifyOptions};
use crate::boussinesq::{apply_b, apply_l, StatePair};
use crate::error::{Error, Result};
use crate::picard::{AdmissibilityCase, SobolevParams, TermSet};
use crate::spectral::{gen_random_field, gen_random_velocity, SpectralField, SpectralScalar, SpectralVector};

/// The nine horizon-scaling estimates. Labels are the command-line names.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ScalingEstimate {
    /// Buoyancy Duhamel term, `E2 -> E1`.
    BuoyancyEnergy,
    /// Temperature transport, `E1 x E2 -> E2`.
    TransportEnergy,
    /// Velocity convection, `E1 x E1 -> E1`.
    ConvectionEnergy,
    /// Buoyancy, `L^4 L^2 -> L^4 \dot H^1`.
    BuoyancyLimit,
    /// Transport, `L^4 \dot H^1 x L^4 L^2 -> L^4 L^2`.
    TransportLimit,
    /// Convection, `L^4 \dot H^1 x L^4 \dot H^1 -> L^4 \dot H^1`.
    ConvectionLimit,
    /// Convection in `F1`.
    ConvectionFourth,
    /// Buoyancy, `F2 -> F1`.
    BuoyancyFourth,
    /// Transport, `F1 x F2 -> F2`.
    TransportFourth,
}

impl ScalingEstimate {
    pub const ALL: [Self; 9] = [
        Self::BuoyancyEnergy,
        Self::TransportEnergy,
        Self::ConvectionEnergy,
        Self::BuoyancyLimit,
        Self::TransportLimit,
        Self::ConvectionLimit,
        Self::ConvectionFourth,
        Self::BuoyancyFourth,
        Self::TransportFourth,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Self::BuoyancyEnergy => "Linear1",
            Self::TransportEnergy => "Bilinear",
            Self::ConvectionEnergy => "Bilinear-N-S",
            Self::BuoyancyLimit => "Linear1-limit-case",
            Self::TransportLimit => "Bilinear-limit-case",
            Self::ConvectionLimit => "Bilinear-N-S2",
            Self::ConvectionFourth => "Bilinear-N-S3",
            Self::BuoyancyFourth => "Linear-2",
            Self::TransportFourth => "Bilinear-2",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.label().eq_ignore_ascii_case(label))
    }

    /// Energy estimates need `Case1`, the limit ones `r = s = 1/2`, the
    /// fourth-power ones `s = 1/2 < r <= 1`.
    pub fn applies_to(self, params: &SobolevParams) -> bool {
        match self {
            Self::BuoyancyEnergy | Self::TransportEnergy | Self::ConvectionEnergy => {
                params.case == AdmissibilityCase::Case1
            }
            Self::BuoyancyLimit | Self::TransportLimit | Self::ConvectionLimit => {
                params.case == AdmissibilityCase::Case2Limit && params.is_limit_point()
            }
            Self::ConvectionFourth | Self::BuoyancyFourth | Self::TransportFourth => {
                params.case == AdmissibilityCase::Case2Limit && !params.is_limit_point()
            }
        }
    }

    /// Power of `T` in the bound for `T <= 1`.
    pub fn expected_exponent(self, r: f64, s: f64) -> f64 {
        match self {
            Self::BuoyancyEnergy => (0.5 * (2.0 - (r + s))).min(1.0),
            Self::TransportEnergy => -s / 4.0 + 0.125,
            Self::ConvectionEnergy => (2.0 * r - 1.0).min(1.0) / 4.0,
            Self::BuoyancyLimit => 0.5,
            Self::TransportLimit | Self::ConvectionLimit | Self::ConvectionFourth => 0.0,
            Self::BuoyancyFourth => (0.5f64).min((3.0 - 2.0 * r) / 4.0),
            Self::TransportFourth => (2.0 * r - 1.0) / 4.0,
        }
    }

    fn kind(self) -> Kind {
        match self {
            Self::BuoyancyEnergy | Self::BuoyancyLimit | Self::BuoyancyFourth => Kind::Buoyancy,
            Self::TransportEnergy | Self::TransportLimit | Self::TransportFourth => Kind::Transport,
            Self::ConvectionEnergy | Self::ConvectionLimit | Self::ConvectionFourth => Kind::Convection,
        }
    }

    /// `(velocity norm, temperature norm)` of source and target spaces.
    fn norms(self, params: &SobolevParams) -> Result<(TermSet, TermSet)> {
        let (r, s) = (params.r, params.s);
        Ok(match self {
            Self::BuoyancyEnergy | Self::TransportEnergy | Self::ConvectionEnergy => {
                (TermSet::energy_velocity(r), TermSet::energy_temperature(s))
            }
            Self::BuoyancyLimit | Self::TransportLimit | Self::ConvectionLimit => {
                (TermSet::limit_velocity(), TermSet::limit_temperature())
            }
            Self::ConvectionFourth | Self::BuoyancyFourth | Self::TransportFourth => {
                (TermSet::fourth_velocity(r), TermSet::fourth_temperature(r)?)
            }
        })
    }
}

#[derive(Clone, Copy)]
enum Kind {
    Buoyancy,
    Transport,
    Convection,
}

/// Horizon ladder of the scaling checks, `2^-10 .. 2^-1`.
pub fn scaling_ladder() -> Vec<f64> {
    dyadic_ladder(1, 10)
}

/// One scaling experiment.
#[derive(Clone, Debug)]
pub struct EstimateSpec {
    pub estimate: ScalingEstimate,
    pub params: SobolevParams,
    pub expected_exponent: f64,
    pub ladder: Vec<f64>,
    pub options: VerifyOptions,
}

impl EstimateSpec {
    pub fn new(estimate: ScalingEstimate, params: SobolevParams, options: VerifyOptions) -> Result<Self> {
        if !estimate.applies_to(&params) {
            return Err(Error::InvalidConfig(format!(
                "{} does not apply to (r, s) = ({}, {})",
                estimate.label(),
                params.r,
                params.s
            )));
        }
        if params.case == AdmissibilityCase::Inadmissible {
            return Err(Error::Inadmissible { r: params.r, s: params.s });
        }
        Ok(Self {
            estimate,
            expected_exponent: estimate.expected_exponent(params.r, params.s),
            params,
            ladder: scaling_ladder(),
            options,
        })
    }
}

struct TrialData {
    u: SpectralVector,
    v: SpectralVector,
    theta: SpectralScalar,
}

fn trial_data(options: &VerifyOptions, trial: usize, grid: &crate::spectral::Grid) -> TrialData {
    let mut rng = options.trial_rng(10, trial);
    let slope = rng.random_range(0.5..3.5);
    let mut weight = || 10f64.powf(rng.random_range(-1.0..1.0));
    let (wu, wv, wt) = (weight(), weight(), weight());
    TrialData {
        u: gen_random_velocity(rng.random(), slope, grid).scaled(wu),
        v: gen_random_velocity(rng.random(), slope, grid).scaled(wv),
        theta: gen_random_field(rng.random(), slope, grid).scaled(wt),
    }
}

/// For every horizon of the ladder and every random trial, the operator is
/// applied to heat flows of random data on `[0, T]` and its target norm is
/// compared with the product of source norms. The verdict requires the
/// log-log slope of the per-horizon envelope of `lhs / rhs` to be at least
/// `alpha - 0.15`.
pub fn verify_t_scaling(spec: &EstimateSpec) -> Result<EstimateReport> {
    let start = Instant::now();
    let options = &spec.options;
    let grid = options.grid()?;
    let (vel_norm, temp_norm) = spec.estimate.norms(&spec.params)?;
    let kind = spec.estimate.kind();
    let zero_u = SpectralVector::zeros(&grid);
    let zero_t = SpectralScalar::zeros(&grid);
    let rows = run_trials(options.trials, |trial| {
        let d = trial_data(options, trial, &grid);
        spec.ladder
            .iter()
            .map(|&t| {
                let m = options.steps;
                let (lhs, rhs) = match kind {
                    Kind::Buoyancy => {
                        let e = StatePair::heat_flow(&zero_u, &d.theta, t, m)?;
                        let l = apply_l(&e)?;
                        (vel_norm.eval(l.velocity())?, temp_norm.eval(e.temperature())?)
                    }
                    Kind::Transport => {
                        let e = StatePair::heat_flow(&d.u, &zero_t, t, m)?;
                        let f = StatePair::heat_flow(&zero_u, &d.theta, t, m)?;
                        let b = apply_b(&e, &f)?;
                        let rhs = vel_norm.eval(e.velocity())? * temp_norm.eval(f.temperature())?;
                        (temp_norm.eval(b.temperature())?, rhs)
                    }
                    Kind::Convection => {
                        let e = StatePair::heat_flow(&d.u, &zero_t, t, m)?;
                        let f = StatePair::heat_flow(&d.v, &zero_t, t, m)?;
                        let b = apply_b(&e, &f)?;
                        let rhs = vel_norm.eval(e.velocity())? * vel_norm.eval(f.velocity())?;
                        (vel_norm.eval(b.velocity())?, rhs)
                    }
                };
                Ok((t, lhs, rhs))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut b = ReportBuilder::new(
        spec.estimate.label(),
        format!("r={},s={}", spec.params.r, spec.params.s),
        spec.expected_exponent,
        VerdictRule::Slope,
    ).since(start);
    for (trial, per_t) in rows.into_iter().enumerate() {
        for (t, lhs, rhs) in per_t {
            b.push(t, trial, lhs, rhs);
        }
    }
    Ok(b.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::picard::check_admissibility;

    #[test]
    fn labels_round_trip() {
        for e in ScalingEstimate::ALL {
            assert_eq!(ScalingEstimate::from_label(e.label()), Some(e));
        }
        assert_eq!(ScalingEstimate::from_label("nope"), None);
    }

    #[test]
    fn exponent_table() {
        let e = ScalingEstimate::BuoyancyEnergy.expected_exponent(1.0, 0.3);
        assert!((e - 0.35).abs() < 1e-15);
        assert_eq!(ScalingEstimate::TransportEnergy.expected_exponent(1.0, 0.0), 0.125);
        assert_eq!(ScalingEstimate::ConvectionLimit.expected_exponent(0.5, 0.5), 0.0);
        assert_eq!(ScalingEstimate::BuoyancyFourth.expected_exponent(1.0, 0.5), 0.25);
        assert_eq!(ScalingEstimate::ConvectionEnergy.expected_exponent(1.0, 0.3), 0.25);
    }

    #[test]
    fn applicability_by_case() {
        let case1 = check_admissibility(1.0, 0.3);
        let limit = check_admissibility(0.5, 0.5);
        let fourth = check_admissibility(0.75, 0.5);
        let count = |p: &SobolevParams| ScalingEstimate::ALL.iter().filter(|e| e.applies_to(p)).count();
        assert_eq!((count(&case1), count(&limit), count(&fourth)), (3, 3, 3));
        assert!(EstimateSpec::new(ScalingEstimate::BuoyancyLimit, case1, VerifyOptions::default()).is_err());
    }

    #[test]
    fn ratio_carries_horizon_power() {
        let params = check_admissibility(1.0, 0.3);
        let options = VerifyOptions { n: 8, steps: 8, trials: 2, seed: 1, probes: false };
        let mut spec = EstimateSpec::new(ScalingEstimate::BuoyancyEnergy, params, options).unwrap();
        spec.ladder = dyadic_ladder(2, 3);
        let r = verify_t_scaling(&spec).unwrap();
        assert_eq!(r.rows.len(), 4);
        assert!(r.rows.iter().all(|row| (row.ratio - row.lhs / (row.t.powf(0.35) * row.rhs)).abs() < 1e-12));
    }
}
