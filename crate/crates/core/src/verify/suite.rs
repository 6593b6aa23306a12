use super::inequalities::{verify_embeddings, verify_initial_data, verify_interpolation, verify_product_law};
use super::lemmas::{verify_duhamel_bounds, verify_heat_smoothing, verify_split_bound, SPLIT_EPSILONS};
use super::report::{EstimateReport, VerifyOptions};
use super::scaling::{verify_t_scaling, EstimateSpec, ScalingEstimate};
use crate::error::Result;
use crate::picard::{check_admissibility, SobolevParams};

/// Regularity pairs swept by the full suite: two in the energy case, two
/// fourth-power pairs and the limit point.
pub const STANDARD_PAIRS: [(f64, f64); 5] = [(1.0, 0.3), (0.75, 0.3), (1.0, 0.5), (0.75, 0.5), (0.5, 0.5)];

/// `r` of the fourth-power split instances.
pub const SPLIT_R: f64 = 0.75;

/// Lemma instances: smoothing `(-s, r + s)` for the energy pairs, the
/// Duhamel bounds (points 1 and 2 at `s1 = 0`, point 3 at `(-1/2, 3/2)`) and
/// the split bound at `(1/2, 1)`, `(-1/2, 0)`, `(r, r + 1/2)`, `(-1/2, r - 1)`.
pub fn lemma_suite(options: &VerifyOptions) -> Result<Vec<EstimateReport>> {
    let mut out = Vec::new();
    for params in standard_params().iter().filter(|p| p.case == crate::picard::AdmissibilityCase::Case1) {
        out.push(verify_heat_smoothing(-params.s, params.r + params.s, options)?);
    }
    out.push(verify_duhamel_bounds(1, 0.0, 0.0, options)?);
    out.push(verify_duhamel_bounds(2, 0.0, 0.0, options)?);
    out.push(verify_duhamel_bounds(3, -0.5, 1.5, options)?);
    for (s1, s2) in [(0.5, 1.0), (-0.5, 0.0), (SPLIT_R, SPLIT_R + 0.5), (-0.5, SPLIT_R - 1.0)] {
        out.push(verify_split_bound(s1, s2, &SPLIT_EPSILONS, options)?);
    }
    Ok(out)
}

pub fn standard_params() -> Vec<SobolevParams> {
    STANDARD_PAIRS.iter().map(|&(r, s)| check_admissibility(r, s)).collect()
}

/// Every applicable scaling estimate for `params`.
pub fn scaling_suite(params: &SobolevParams, options: &VerifyOptions) -> Result<Vec<EstimateReport>> {
    ScalingEstimate::ALL
        .into_iter()
        .filter(|e| e.applies_to(params))
        .map(|e| verify_t_scaling(&EstimateSpec::new(e, *params, options.clone())?))
        .collect()
}

/// Lemmas, all scaling estimates over [`STANDARD_PAIRS`], the product law at
/// `s = 0.3`, interpolation, embeddings and the initial-data bound for the
/// energy pairs.
pub fn verify_all(options: &VerifyOptions) -> Result<Vec<EstimateReport>> {
    let mut out = lemma_suite(options)?;
    for params in standard_params() {
        out.extend(scaling_suite(&params, options)?);
    }
    out.push(verify_product_law(0.3, options)?);
    out.push(verify_interpolation(options)?);
    out.push(verify_embeddings(options)?);
    for params in standard_params().iter().filter(|p| p.case == crate::picard::AdmissibilityCase::Case1) {
        out.push(verify_initial_data(params, options)?);
    }
    Ok(out)
}
