use serde::Serialize;

/// Slack used when comparing `(r, s)` against the boundaries of the region.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AdmissibilityCase {
    /// `s < 1/2 < r` and `1 <= s + r < 2`: solved in the energy spaces.
    Case1,
    /// `s = 1/2` and `1/2 <= r <= 1`: solved in the fourth-power spaces.
    Case2Limit,
    Inadmissible,
}

/// Regularity of the data: velocity in `H^r`, temperature in `\dot H^{-s}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SobolevParams {
    pub r: f64,
    pub s: f64,
    pub case: AdmissibilityCase,
}

impl SobolevParams {
    pub fn is_admissible(&self) -> bool {
        self.case != AdmissibilityCase::Inadmissible
    }

    /// Time exponent `(2 - (r + s)) / 2` of the buoyancy estimate (Case1 only).
    pub fn linear_exponent(&self) -> Option<f64> {
        (self.case == AdmissibilityCase::Case1).then(|| (2.0 - (self.r + self.s)) / 2.0)
    }

    /// Time exponent `-s/4 + 1/8` of the transport estimate (Case1 only).
    pub fn bilinear_exponent(&self) -> Option<f64> {
        (self.case == AdmissibilityCase::Case1).then(|| -self.s / 4.0 + 0.125)
    }

    /// True when `r` sits on `1/2`, where the fourth-power spaces reduce to
    /// `L^4 \dot H^1 x L^4 L^2`.
    pub fn is_limit_point(&self) -> bool {
        (self.r - 0.5).abs() <= BOUNDARY_TOL
    }
}

/// Classifies `(r, s)` against the existence region.
pub fn check_admissibility(r: f64, s: f64) -> SobolevParams {
    let tol = BOUNDARY_TOL;
    let case = if !(r.is_finite() && s.is_finite()) || s < -tol {
        AdmissibilityCase::Inadmissible
    } else if (s - 0.5).abs() <= tol {
        if r >= 0.5 - tol && r <= 1.0 + tol {
            AdmissibilityCase::Case2Limit
        } else {
            AdmissibilityCase::Inadmissible
        }
    } else if s < 0.5 && r > 0.5 + tol && s + r >= 1.0 - tol && s + r < 2.0 - tol {
        AdmissibilityCase::Case1
    } else {
        AdmissibilityCase::Inadmissible
    };
    SobolevParams { r, s, case }
}
