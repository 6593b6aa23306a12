use serde::Serialize;

use super::admissibility::{AdmissibilityCase, SobolevParams, BOUNDARY_TOL};
use crate::boussinesq::StatePair;
use crate::error::{Error, Result};
use crate::heat::Trajectory;
use crate::spectral::{sobolev_norm, NormOrder, SpectralField, SpectralScalar, SpectralVector};

/// How the spatial norms of the samples are combined in time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum TimeNorm {
    /// Maximum over samples.
    Sup,
    /// `(trapezoid of |v|^p)^(1/p)`.
    Lp(f64),
}

/// Discrete `L^p` norm in time of sampled values by the trapezoid rule;
/// `p = inf` is the maximum.
pub fn lp_time_norm(values: &[f64], dt: f64, p: f64) -> f64 {
    if p.is_infinite() {
        return values.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    let pow: Vec<f64> = values.iter().map(|v| v.abs().powf(p)).collect();
    trapezoid(&pow, dt).powf(1.0 / p)
}

pub(crate) fn trapezoid(values: &[f64], dt: f64) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => 0.0,
        n => dt * (values[1..n - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[n - 1])),
    }
}

/// Running trapezoid integrals `int_0^{t_m}` at every sample.
pub(crate) fn cumulative_trapezoid(values: &[f64], dt: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in values.windows(2) {
        acc += 0.5 * dt * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

fn aggregate(values: &[f64], dt: f64, time: TimeNorm) -> f64 {
    match time {
        TimeNorm::Sup => lp_time_norm(values, dt, f64::INFINITY),
        TimeNorm::Lp(p) => lp_time_norm(values, dt, p),
    }
}

/// Space-time norm of a trajectory with one spatial order.
pub fn trajectory_norm<F: SpectralField>(
    traj: &Trajectory<F>,
    order: NormOrder,
    time: TimeNorm,
) -> Result<f64> {
    let values = traj.samples().iter().map(|f| sobolev_norm(f, order)).collect::<Result<Vec<_>>>()?;
    Ok(aggregate(&values, traj.dt(), time))
}

/// `sup_t ||u||_{H^r} + ||u||_{L^2_t \dot H^{r+1}}`
pub fn traj_norm_e1(u: &Trajectory<SpectralVector>, r: f64) -> Result<f64> {
    TermSet::energy_velocity(r).eval(u)
}

/// `sup_t ||theta||_{\dot H^{-s}} + ||theta||_{L^2_t \dot H^{1-s}}`
pub fn traj_norm_e2(theta: &Trajectory<SpectralScalar>, s: f64) -> Result<f64> {
    TermSet::energy_temperature(s).eval(theta)
}

/// Fourth-power space norms for `1/2 < r <= 1`:
/// `F1 = ||u||_{L^4 \dot H^1} + ||u||_{L^4 \dot H^{r+1/2}}`,
/// `F2 = ||theta||_{L^4 L^2} + ||theta||_{L^{4/(2r-1)} \dot H^{r-1}}`.
pub fn traj_norm_f(e: &StatePair, r: f64) -> Result<(f64, f64)> {
    let f1 = TermSet::fourth_velocity(r).eval(e.velocity())?;
    let f2 = TermSet::fourth_temperature(r)?.eval(e.temperature())?;
    Ok((f1, f2))
}

/// The `r = 1/2` reduction `(||u||_{L^4 \dot H^1}, ||theta||_{L^4 L^2})`.
pub fn traj_norm_f_limit(e: &StatePair) -> Result<(f64, f64)> {
    let f1 = TermSet::limit_velocity().eval(e.velocity())?;
    let f2 = TermSet::limit_temperature().eval(e.temperature())?;
    Ok((f1, f2))
}

/// Time exponent `4 / (2r - 1)` of the second temperature term.
pub fn fourth_space_exponent(r: f64) -> Result<f64> {
    if (r - 0.5).abs() <= BOUNDARY_TOL {
        return Err(Error::DegenerateExponent { r });
    }
    if !(r > 0.5 && r <= 1.0 + BOUNDARY_TOL) {
        return Err(Error::BadExponentRange(format!("fourth-power spaces need 1/2 < r <= 1, got {r}")));
    }
    Ok(4.0 / (2.0 * r - 1.0))
}

/// Sum of space-time terms of one component.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TermSet {
    pub terms: Vec<(NormOrder, TimeNorm)>,
}

impl TermSet {
    /// `sup_t ||u||_{H^r} + ||u||_{L^2_t \dot H^{r+1}}`
    pub fn energy_velocity(r: f64) -> Self {
        Self {
            terms: vec![
                (NormOrder::inhomogeneous(r), TimeNorm::Sup),
                (NormOrder::homogeneous(r + 1.0), TimeNorm::Lp(2.0)),
            ],
        }
    }

    /// `sup_t ||theta||_{\dot H^{-s}} + ||theta||_{L^2_t \dot H^{1-s}}`
    pub fn energy_temperature(s: f64) -> Self {
        Self {
            terms: vec![
                (NormOrder::homogeneous(-s), TimeNorm::Sup),
                (NormOrder::homogeneous(1.0 - s), TimeNorm::Lp(2.0)),
            ],
        }
    }

    pub fn fourth_velocity(r: f64) -> Self {
        Self {
            terms: vec![
                (NormOrder::homogeneous(1.0), TimeNorm::Lp(4.0)),
                (NormOrder::homogeneous(r + 0.5), TimeNorm::Lp(4.0)),
            ],
        }
    }

    pub fn fourth_temperature(r: f64) -> Result<Self> {
        let p = fourth_space_exponent(r)?;
        Ok(Self {
            terms: vec![
                (NormOrder::homogeneous(0.0), TimeNorm::Lp(4.0)),
                (NormOrder::homogeneous(r - 1.0), TimeNorm::Lp(p)),
            ],
        })
    }

    /// `||u||_{L^4_t \dot H^1}`
    pub fn limit_velocity() -> Self {
        Self { terms: vec![(NormOrder::homogeneous(1.0), TimeNorm::Lp(4.0))] }
    }

    /// `||theta||_{L^4_t L^2}`
    pub fn limit_temperature() -> Self {
        Self { terms: vec![(NormOrder::homogeneous(0.0), TimeNorm::Lp(4.0))] }
    }

    fn spatial(&self, f: &impl SpectralField) -> Result<Vec<f64>> {
        self.terms.iter().map(|(o, _)| sobolev_norm(f, *o)).collect()
    }

    fn combine(&self, per_sample: &[Vec<f64>], dt: f64) -> f64 {
        self.terms
            .iter()
            .enumerate()
            .map(|(j, (_, time))| {
                let v: Vec<f64> = per_sample.iter().map(|s| s[j]).collect();
                aggregate(&v, dt, *time)
            })
            .sum()
    }

    pub fn eval<F: SpectralField>(&self, traj: &Trajectory<F>) -> Result<f64> {
        let per = traj.samples().iter().map(|f| self.spatial(f)).collect::<Result<Vec<_>>>()?;
        Ok(self.combine(&per, traj.dt()))
    }

    /// Norm of `a - b` without materializing the difference trajectory.
    pub fn eval_difference<F: SpectralField>(&self, a: &Trajectory<F>, b: &Trajectory<F>) -> Result<f64> {
        if !a.same_times(b) {
            return Err(Error::MismatchedTrajectories);
        }
        let per = a
            .samples()
            .iter()
            .zip(b.samples())
            .map(|(x, y)| self.spatial(&x.sub(y)))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.combine(&per, a.dt()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WorkingNormKind {
    /// `E1 + E2` (sup plus square-integrable in time).
    Energy,
    /// `L^4 \dot H^1 + L^4 L^2` at `r = 1/2`.
    LimitFourth,
    /// `F1 + F2` for `1/2 < r <= 1`.
    Fourth,
}

/// Norm on state pairs in which the fixed point is closed: a velocity part
/// plus a temperature part.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WorkingNorm {
    pub kind: WorkingNormKind,
    pub velocity: TermSet,
    pub temperature: TermSet,
}

impl WorkingNorm {
    pub fn for_params(params: &SobolevParams) -> Result<Self> {
        match params.case {
            AdmissibilityCase::Case1 => Ok(Self::energy(params.r, params.s)),
            AdmissibilityCase::Case2Limit if params.is_limit_point() => Ok(Self {
                kind: WorkingNormKind::LimitFourth,
                velocity: TermSet::limit_velocity(),
                temperature: TermSet::limit_temperature(),
            }),
            AdmissibilityCase::Case2Limit => Ok(Self {
                kind: WorkingNormKind::Fourth,
                velocity: TermSet::fourth_velocity(params.r),
                temperature: TermSet::fourth_temperature(params.r)?,
            }),
            AdmissibilityCase::Inadmissible => Err(Error::Inadmissible { r: params.r, s: params.s }),
        }
    }

    pub fn energy(r: f64, s: f64) -> Self {
        Self {
            kind: WorkingNormKind::Energy,
            velocity: TermSet::energy_velocity(r),
            temperature: TermSet::energy_temperature(s),
        }
    }

    /// `[velocity part, temperature part]`
    pub fn parts(&self, e: &StatePair) -> Result<[f64; 2]> {
        Ok([self.velocity.eval(e.velocity())?, self.temperature.eval(e.temperature())?])
    }

    pub fn eval(&self, e: &StatePair) -> Result<f64> {
        let [a, b] = self.parts(e)?;
        Ok(a + b)
    }

    pub fn eval_difference(&self, a: &StatePair, b: &StatePair) -> Result<f64> {
        Ok(self.velocity.eval_difference(a.velocity(), b.velocity())?
            + self.temperature.eval_difference(a.temperature(), b.temperature())?)
    }
}
