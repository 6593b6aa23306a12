//! Fixed-point construction of mild solutions: admissibility of the
//! regularity pair, space-time norms, measured contraction constants, the
//! Picard driver and an independent time-stepping oracle.

mod admissibility;
mod constants;
mod norms;
mod reference;
mod solver;

pub use admissibility::{check_admissibility, AdmissibilityCase, SobolevParams, BOUNDARY_TOL};
pub use constants::{
    estimate_constants, select_t0, tail_certificate, LadderProbe, SelectOptions, T0Selection,
    LADDER_EXPONENTS,
};
pub use norms::{
    fourth_space_exponent, lp_time_norm, traj_norm_e1, traj_norm_e2, traj_norm_f,
    traj_norm_f_limit, trajectory_norm, TermSet, TimeNorm, WorkingNorm, WorkingNormKind,
};
pub use reference::{reference_integrator, ReferenceOptions, MAX_GROWTH};
pub use solver::{
    fixed_point_map, run_picard, ConditionsReport, PicardConfig, PicardDiagnostics,
    TailCertificate, TailTerm,
};

pub(crate) use norms::cumulative_trapezoid;
