use super::solver::check_data;
use crate::boussinesq::{state_forcing, StatePair};
use crate::error::{Error, Result};
use crate::heat::{phi1, phi2, Trajectory};
use crate::spectral::{hdot, Grid, SpectralField, SpectralScalar, SpectralVector};

/// Growth factor of the state norm that aborts the reference integrator.
pub const MAX_GROWTH: f64 = 1e6;

/// Switches for the reference time stepper.
#[derive(Clone, Copy, Debug)]
pub struct ReferenceOptions {
    /// Factor on the advection terms; 0 disables them.
    pub nonlinear: f64,
    /// Factor on the buoyancy coupling; 0 disables it.
    pub coupling: f64,
    /// Keep every `output_every`-th step in the returned trajectory.
    pub output_every: usize,
}

impl Default for ReferenceOptions {
    fn default() -> Self {
        Self { nonlinear: 1.0, coupling: 1.0, output_every: 1 }
    }
}

struct EtdWeights {
    decay: Vec<f64>,
    first: Vec<f64>,
    second: Vec<f64>,
}

fn combine<F: SpectralField>(out: &mut F, base: &F, decay: &[f64], forcing: &F, weight: &[f64]) {
    for c in 0..F::COMPONENTS {
        let (b, f) = (base.component(c), forcing.component(c));
        for (i, o) in out.component_mut(c).iter_mut().enumerate() {
            *o = b[i] * decay[i] + f[i] * weight[i];
        }
    }
}

fn correct<F: SpectralField>(state: &mut F, new: &F, old: &F, weight: &[f64]) {
    for c in 0..F::COMPONENTS {
        let (n, o) = (new.component(c), old.component(c));
        for (i, v) in state.component_mut(c).iter_mut().enumerate() {
            *v += (n[i] - o[i]) * weight[i];
        }
    }
}

fn state_size(u: &SpectralVector, theta: &SpectralScalar) -> Result<f64> {
    Ok(hdot(u, 0.0)? + hdot(theta, 0.0)?)
}

/// Second-order exponential time differencing (Cox-Matthews ETD2RK) of the
/// differential form of the system, independent of the Picard machinery:
/// `a = e^{hL} y + h phi1 N(y)`, `y+ = a + h phi2 (N(a) - N(y))`.
pub fn reference_integrator(
    u0: &SpectralVector,
    theta0: &SpectralScalar,
    grid: &Grid,
    horizon: f64,
    steps: usize,
    options: ReferenceOptions,
) -> Result<StatePair> {
    check_data(u0, theta0, grid)?;
    let every = options.output_every;
    if every == 0 || !steps.is_multiple_of(every) || steps / every < 2 {
        return Err(Error::InvalidConfig(format!(
            "output_every = {every} must divide {steps} steps and leave at least 2 intervals"
        )));
    }
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::InvalidConfig(format!("horizon must be positive, got {horizon}")));
    }
    let h = horizon / steps as f64;
    let mut w = EtdWeights { decay: Vec::new(), first: Vec::new(), second: Vec::new() };
    for &k2 in grid.k2() {
        let z = -h * k2;
        w.decay.push(z.exp());
        w.first.push(h * phi1(z));
        w.second.push(h * phi2(z));
    }

    let initial = state_size(u0, theta0)?;
    let (mut u, mut theta) = (u0.clone(), theta0.clone());
    let mut us = vec![u.clone()];
    let mut ts = vec![theta.clone()];
    let (mut au, mut at) = (SpectralVector::zeros(grid), SpectralScalar::zeros(grid));
    for step in 0..steps {
        let (nu, nt) = state_forcing(&u, &theta, options.nonlinear, options.coupling);
        combine(&mut au, &u, &w.decay, &nu, &w.first);
        combine(&mut at, &theta, &w.decay, &nt, &w.first);
        let (nau, nat) = state_forcing(&au, &at, options.nonlinear, options.coupling);
        u.clone_from(&au);
        theta.clone_from(&at);
        correct(&mut u, &nau, &nu, &w.second);
        correct(&mut theta, &nat, &nt, &w.second);

        let size = state_size(&u, &theta)?;
        if !size.is_finite() || (initial > 0.0 && size > MAX_GROWTH * initial) {
            return Err(Error::StepUnstable { step: step + 1, growth: size / initial });
        }
        if (step + 1) % every == 0 {
            us.push(u.clone());
            ts.push(theta.clone());
        }
    }
    let dt = h * every as f64;
    Ok(StatePair::new_unchecked(Trajectory::new(dt, us)?, Trajectory::new(dt, ts)?))
}
