//! Heat semigroup, exact-in-time Duhamel quadrature and frequency splitting.

use crate::error::{Error, Result};
use crate::spectral::{hdot, Grid, SpectralField};

/// Below this `|z|` the phi functions switch to their Taylor series.
const SERIES_THRESHOLD: f64 = 1e-4;

/// `(e^z - 1) / z`
pub fn phi1(z: f64) -> f64 {
    if z.abs() < SERIES_THRESHOLD {
        1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0
    } else {
        z.exp_m1() / z
    }
}

/// `(e^z - 1 - z) / z^2`
pub fn phi2(z: f64) -> f64 {
    if z.abs() < SERIES_THRESHOLD {
        0.5 + z / 6.0 + z * z / 24.0 + z * z * z / 120.0
    } else {
        (z.exp_m1() - z) / (z * z)
    }
}

/// `e^{t Laplacian} f`, i.e. every mode times `exp(-t |k|^2)`.
pub fn heat_apply<F: SpectralField>(f: &F, t: f64) -> Result<F> {
    let mut out = f.clone();
    heat_apply_in_place(&mut out, t)?;
    Ok(out)
}

pub(crate) fn heat_apply_in_place<F: SpectralField>(f: &mut F, t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    if t == 0.0 {
        return Ok(());
    }
    let decay: Vec<f64> = f.grid().k2().iter().map(|k2| (-t * k2).exp()).collect();
    f.apply_real_multiplier(&decay);
    Ok(())
}

/// Fields sampled at `t_m = m dt`, `m = 0..=M`, on one grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<F> {
    dt: f64,
    samples: Vec<F>,
}

impl<F: SpectralField> Trajectory<F> {
    pub fn new(dt: f64, samples: Vec<F>) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidTrajectory(format!("time step must be positive, got {dt}")));
        }
        if samples.len() < 3 {
            return Err(Error::InvalidTrajectory(format!(
                "need at least 2 steps, got {}",
                samples.len().saturating_sub(1)
            )));
        }
        let grid = samples[0].grid();
        if samples.iter().any(|f| f.grid() != grid) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { dt, samples })
    }

    /// Samples of `e^{t Laplacian} f` on `[0, horizon]` with `steps` intervals.
    pub fn heat_flow(f: &F, horizon: f64, steps: usize) -> Result<Self> {
        let dt = step_size(horizon, steps)?;
        let decay: Vec<f64> = f.grid().k2().iter().map(|k2| (-dt * k2).exp()).collect();
        let mut samples = Vec::with_capacity(steps + 1);
        samples.push(f.clone());
        for m in 0..steps {
            let mut next = samples[m].clone();
            next.apply_real_multiplier(&decay);
            samples.push(next);
        }
        Self::new(dt, samples)
    }

    pub fn constant(f: &F, horizon: f64, steps: usize) -> Result<Self> {
        let dt = step_size(horizon, steps)?;
        Self::new(dt, vec![f.clone(); steps + 1])
    }

    pub fn zeros(grid: &Grid, horizon: f64, steps: usize) -> Result<Self> {
        Self::constant(&F::zeros(grid), horizon, steps)
    }

    /// Builds a trajectory from a function of the sample time.
    pub fn from_fn(horizon: f64, steps: usize, mut f: impl FnMut(f64) -> F) -> Result<Self> {
        let dt = step_size(horizon, steps)?;
        Self::new(dt, (0..=steps).map(|m| f(m as f64 * dt)).collect())
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of intervals `M`.
    pub fn steps(&self) -> usize {
        self.samples.len() - 1
    }

    pub fn horizon(&self) -> f64 {
        self.dt * self.steps() as f64
    }

    pub fn time(&self, m: usize) -> f64 {
        self.dt * m as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.samples.len()).map(|m| self.time(m)).collect()
    }

    pub fn grid(&self) -> &Grid {
        self.samples[0].grid()
    }

    pub fn samples(&self) -> &[F] {
        &self.samples
    }

    pub fn sample(&self, m: usize) -> Result<&F> {
        self.samples.get(m).ok_or(Error::IndexOutOfRange { index: m, max: self.steps() })
    }

    pub fn first(&self) -> &F {
        &self.samples[0]
    }

    pub fn last(&self) -> &F {
        &self.samples[self.samples.len() - 1]
    }

    pub fn into_samples(self) -> Vec<F> {
        self.samples
    }

    /// Same grid, step and number of samples.
    pub fn same_times<G: SpectralField>(&self, other: &Trajectory<G>) -> bool {
        self.dt == other.dt && self.samples.len() == other.samples.len() && self.grid() == other.grid()
    }

    pub fn map<G: SpectralField>(&self, f: impl FnMut(&F) -> Result<G>) -> Result<Trajectory<G>> {
        let samples = self.samples.iter().map(f).collect::<Result<Vec<_>>>()?;
        Trajectory::new(self.dt, samples)
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self { dt: self.dt, samples: self.samples.iter().map(|f| f.scaled(a)).collect() }
    }

    /// `self += a * other`
    pub fn axpy(&mut self, a: f64, other: &Self) -> Result<()> {
        if !self.same_times(other) {
            return Err(Error::MismatchedTrajectories);
        }
        for (x, y) in self.samples.iter_mut().zip(&other.samples) {
            x.axpy(a, y);
        }
        Ok(())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(-1.0, other)?;
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.samples.iter().all(|f| f.is_zero())
    }

    /// Keeps the samples `0, every, 2 every, ...`; `every` must divide `M`.
    pub fn subsample(&self, every: usize) -> Result<Self> {
        if every == 0 || !self.steps().is_multiple_of(every) {
            return Err(Error::InvalidTrajectory(format!(
                "subsampling factor {every} does not divide {} steps",
                self.steps()
            )));
        }
        let samples = self.samples.iter().step_by(every).cloned().collect();
        Self::new(self.dt * every as f64, samples)
    }

    /// Restriction to the first `steps` intervals.
    pub fn truncate(&self, steps: usize) -> Result<Self> {
        if steps > self.steps() {
            return Err(Error::IndexOutOfRange { index: steps, max: self.steps() });
        }
        Self::new(self.dt, self.samples[..=steps].to_vec())
    }
}

fn step_size(horizon: f64, steps: usize) -> Result<f64> {
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::InvalidTrajectory(format!("horizon must be positive, got {horizon}")));
    }
    if steps < 2 {
        return Err(Error::InvalidTrajectory(format!("need at least 2 steps, got {steps}")));
    }
    Ok(horizon / steps as f64)
}

/// Per-mode weights of one quadrature interval of length `h`:
/// `F_{j+1} = decay F_j + w_old f_j + w_new f_{j+1}`.
struct IntervalWeights {
    decay: Vec<f64>,
    w_old: Vec<f64>,
    w_new: Vec<f64>,
}

impl IntervalWeights {
    fn new(grid: &Grid, h: f64) -> Self {
        let len = grid.len();
        let mut decay = Vec::with_capacity(len);
        let mut w_old = Vec::with_capacity(len);
        let mut w_new = Vec::with_capacity(len);
        for &k2 in grid.k2() {
            let z = -h * k2;
            let (p1, p2) = (phi1(z), phi2(z));
            decay.push(z.exp());
            w_old.push(h * (p1 - p2));
            w_new.push(h * p2);
        }
        Self { decay, w_old, w_new }
    }

    fn step<F: SpectralField>(&self, acc: &mut F, old: &F, new: &F) {
        for c in 0..F::COMPONENTS {
            let (a, b) = (old.component(c), new.component(c));
            for (i, v) in acc.component_mut(c).iter_mut().enumerate() {
                *v = *v * self.decay[i] + a[i] * self.w_old[i] + b[i] * self.w_new[i];
            }
        }
    }
}

/// `F(t_m) = int_0^{t_m} e^{(t_m - tau) Laplacian} f(tau) dtau` at every sample,
/// integrating the piecewise-linear interpolant of the forcing exactly.
pub fn duhamel_trajectory<F: SpectralField>(forcing: &Trajectory<F>) -> Trajectory<F> {
    let weights = IntervalWeights::new(forcing.grid(), forcing.dt);
    let mut samples = Vec::with_capacity(forcing.samples.len());
    let mut acc = F::zeros(forcing.grid());
    samples.push(acc.clone());
    for pair in forcing.samples.windows(2) {
        weights.step(&mut acc, &pair[0], &pair[1]);
        samples.push(acc.clone());
    }
    Trajectory { dt: forcing.dt, samples }
}

/// Duhamel integral evaluated at the single sample `t_index`.
pub fn duhamel_integral<F: SpectralField>(forcing: &Trajectory<F>, t_index: usize) -> Result<F> {
    if t_index > forcing.steps() {
        return Err(Error::IndexOutOfRange { index: t_index, max: forcing.steps() });
    }
    let weights = IntervalWeights::new(forcing.grid(), forcing.dt);
    let mut acc = F::zeros(forcing.grid());
    for pair in forcing.samples[..=t_index].windows(2) {
        weights.step(&mut acc, &pair[0], &pair[1]);
    }
    Ok(acc)
}

/// Cutoff `kappa` separating high (`|k| >= kappa`) from low frequencies, and
/// the tolerance it was chosen for.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrequencySplit {
    pub cutoff: f64,
    pub epsilon: f64,
}

/// `(high, low)` with `high + low = f`.
pub fn frequency_split<F: SpectralField>(f: &F, split: FrequencySplit) -> (F, F) {
    let k2 = f.grid().k2();
    let cut2 = split.cutoff * split.cutoff;
    let high_mask: Vec<f64> = k2.iter().map(|&v| if v >= cut2 { 1.0 } else { 0.0 }).collect();
    let low_mask: Vec<f64> = high_mask.iter().map(|m| 1.0 - m).collect();
    let mut high = f.clone();
    high.apply_real_multiplier(&high_mask);
    let mut low = f.clone();
    low.apply_real_multiplier(&low_mask);
    (high, low)
}

/// Dyadic cutoffs `2^j * 2 pi / L`, `j = 0, 1, ...`, up to the first one beyond
/// every mode of the grid.
pub fn dyadic_cutoffs(grid: &Grid) -> Vec<f64> {
    let mut out = Vec::new();
    let mut kappa = grid.fundamental();
    loop {
        out.push(kappa);
        if kappa > grid.k_corner() {
            return out;
        }
        kappa *= 2.0;
    }
}

/// Smallest dyadic cutoff whose high part has `\dot H^{s1}` norm at most `eps / 2`.
pub fn choose_r_eps<F: SpectralField>(f: &F, s1: f64, eps: f64) -> Result<FrequencySplit> {
    if !(eps > 0.0) {
        return Err(Error::InvalidConfig(format!("epsilon must be positive, got {eps}")));
    }
    // Norm of the tail |k| >= kappa for every dyadic kappa from one pass over the modes.
    let cutoffs = dyadic_cutoffs(f.grid());
    let w = f.grid().weights(s1, true);
    if s1 < 0.0 {
        hdot(f, s1)?;
    }
    let mut shell = vec![0.0; cutoffs.len()];
    let k2 = f.grid().k2();
    for i in 1..k2.len() {
        let energy: f64 = (0..F::COMPONENTS).map(|c| f.component(c)[i].norm_sqr()).sum();
        if energy == 0.0 {
            continue;
        }
        let k = k2[i].sqrt();
        // last cutoff <= |k|
        let j = cutoffs.iter().rposition(|&c| c <= k).unwrap_or(0);
        shell[j] += w[i] * energy;
    }
    let volume = f.grid().volume();
    let mut tail = 0.0;
    let mut tails = vec![0.0; cutoffs.len()];
    for j in (0..cutoffs.len()).rev() {
        tail += shell[j];
        tails[j] = (volume * tail).sqrt();
    }
    let j = tails.iter().position(|&t| t <= eps / 2.0).unwrap_or(cutoffs.len() - 1);
    Ok(FrequencySplit { cutoff: cutoffs[j], epsilon: eps })
}
