//! Randomized checks of the inequalities behind the existence proof: each
//! bound becomes a bounded ratio, or a fitted power of the horizon, over
//! random data and a dyadic horizon ladder.

mod inequalities;
mod lemmas;
mod report;
mod scaling;
mod suite;

pub use inequalities::{verify_embeddings, verify_initial_data, verify_interpolation, verify_product_law};
pub use lemmas::{
    heat_flow_lp_norm, lemma_ladder, smoothing_ladder, verify_duhamel_bounds, verify_heat_smoothing,
    verify_split_bound, SPLIT_EPSILONS,
};
pub use report::{
    dyadic_ladder, loglog_slope, EstimateReport, LadderPoint, RatioRow, VerdictRule, VerifyOptions,
    EXACT_SLACK, SLOPE_TOL, STABILITY_LIMIT,
};
pub use scaling::{scaling_ladder, verify_t_scaling, EstimateSpec, ScalingEstimate};
pub use suite::{lemma_suite, scaling_suite, standard_params, verify_all, SPLIT_R, STANDARD_PAIRS};
