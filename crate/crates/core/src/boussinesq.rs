//! Nonlinear and coupling terms of the Boussinesq system and the bilinear /
//! linear Duhamel operators built from them.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::heat::{duhamel_trajectory, Trajectory};
use crate::spectral::{
    forward_dealiased, gradient_potential, inverse_batch, leray_project_in_place, Grid,
    SpectralField, SpectralScalar, SpectralVector,
};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Velocity and temperature trajectories on a shared time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct StatePair {
    velocity: Trajectory<SpectralVector>,
    temperature: Trajectory<SpectralScalar>,
}

impl StatePair {
    /// Checks the shared time grid, divergence-free velocity and zero-mean
    /// temperature at every sample.
    pub fn new(
        velocity: Trajectory<SpectralVector>,
        temperature: Trajectory<SpectralScalar>,
    ) -> Result<Self> {
        if !velocity.same_times(&temperature) {
            return Err(Error::MismatchedTrajectories);
        }
        for u in velocity.samples() {
            u.require_divergence_free()?;
        }
        if temperature.samples().iter().any(|t| !t.is_zero_mean()) {
            return Err(Error::InvalidTrajectory("temperature must have zero mean".into()));
        }
        Ok(Self { velocity, temperature })
    }

    pub(crate) fn new_unchecked(
        velocity: Trajectory<SpectralVector>,
        temperature: Trajectory<SpectralScalar>,
    ) -> Self {
        debug_assert!(velocity.same_times(&temperature));
        Self { velocity, temperature }
    }

    /// Heat flow of the data `(u0, theta0)` on `[0, horizon]`.
    pub fn heat_flow(
        u0: &SpectralVector,
        theta0: &SpectralScalar,
        horizon: f64,
        steps: usize,
    ) -> Result<Self> {
        if u0.grid() != theta0.grid() {
            return Err(Error::GridMismatch);
        }
        Self::new(
            Trajectory::heat_flow(u0, horizon, steps)?,
            Trajectory::heat_flow(theta0, horizon, steps)?,
        )
    }

    pub fn zeros(grid: &Grid, horizon: f64, steps: usize) -> Result<Self> {
        Ok(Self {
            velocity: Trajectory::zeros(grid, horizon, steps)?,
            temperature: Trajectory::zeros(grid, horizon, steps)?,
        })
    }

    pub fn velocity(&self) -> &Trajectory<SpectralVector> {
        &self.velocity
    }

    pub fn temperature(&self) -> &Trajectory<SpectralScalar> {
        &self.temperature
    }

    pub fn into_parts(self) -> (Trajectory<SpectralVector>, Trajectory<SpectralScalar>) {
        (self.velocity, self.temperature)
    }

    pub fn grid(&self) -> &Grid {
        self.velocity.grid()
    }

    pub fn dt(&self) -> f64 {
        self.velocity.dt()
    }

    pub fn steps(&self) -> usize {
        self.velocity.steps()
    }

    pub fn horizon(&self) -> f64 {
        self.velocity.horizon()
    }

    pub fn same_times(&self, other: &Self) -> bool {
        self.velocity.same_times(&other.velocity)
    }

    pub fn is_zero(&self) -> bool {
        self.velocity.is_zero() && self.temperature.is_zero()
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self { velocity: self.velocity.scaled(a), temperature: self.temperature.scaled(a) }
    }

    /// `self += a * other`
    pub fn axpy(&mut self, a: f64, other: &Self) -> Result<()> {
        self.velocity.axpy(a, &other.velocity)?;
        self.temperature.axpy(a, &other.temperature)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(-1.0, other)?;
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(1.0, other)?;
        Ok(out)
    }

    pub fn subsample(&self, every: usize) -> Result<Self> {
        Ok(Self {
            velocity: self.velocity.subsample(every)?,
            temperature: self.temperature.subsample(every)?,
        })
    }

    pub fn truncate(&self, steps: usize) -> Result<Self> {
        Ok(Self {
            velocity: self.velocity.truncate(steps)?,
            temperature: self.temperature.truncate(steps)?,
        })
    }
}

/// `sum_j i k_j P_{j}` for the six or nine entries of a flux tensor.
fn divergence_of_columns(grid: &Grid, flux: [[&SpectralScalar; 3]; 3]) -> SpectralVector {
    // flux[i][j] is the (j-derivative, i-component) entry: out_i = sum_j d_j flux[i][j]
    let kd = grid.deriv_wavenumbers();
    let n = grid.n();
    let mut out = SpectralVector::zeros(grid);
    for (i, row) in flux.iter().enumerate() {
        let (a, b, c) = (row[0].coeffs(), row[1].coeffs(), row[2].coeffs());
        for (idx, o) in out.component_mut(i).iter_mut().enumerate() {
            let m = [idx / (n * n), (idx / n) % n, idx % n];
            *o = I * (a[idx] * kd[m[0]] + b[idx] * kd[m[1]] + c[idx] * kd[m[2]]);
        }
    }
    out
}

fn scalar_divergence(grid: &Grid, flux: [&SpectralScalar; 3]) -> SpectralScalar {
    let kd = grid.deriv_wavenumbers();
    let n = grid.n();
    let mut out = SpectralScalar::zeros(grid);
    let (a, b, c) = (flux[0].coeffs(), flux[1].coeffs(), flux[2].coeffs());
    for (idx, o) in out.coeffs_mut().iter_mut().enumerate() {
        let m = [idx / (n * n), (idx / n) % n, idx % n];
        *o = I * (a[idx] * kd[m[0]] + b[idx] * kd[m[1]] + c[idx] * kd[m[2]]);
    }
    out
}

fn products(a: &[Vec<f64>], pairs: &[(usize, usize)]) -> Vec<Vec<f64>> {
    pairs
        .iter()
        .map(|&(p, q)| a[p].iter().zip(&a[q]).map(|(x, y)| x * y).collect())
        .collect()
}

/// `div(u (x) w)` dealiased, not projected.
fn flux_divergence(u: &SpectralVector, w: &SpectralVector) -> SpectralVector {
    let grid = u.grid();
    if std::ptr::eq(u, w) {
        let phys = inverse_batch(grid, &[u.component(0), u.component(1), u.component(2)]);
        let sym = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];
        let f = forward_dealiased(grid, &products(&phys, &sym));
        let (xx, xy, xz, yy, yz, zz) = (&f[0], &f[1], &f[2], &f[3], &f[4], &f[5]);
        divergence_of_columns(grid, [[xx, xy, xz], [xy, yy, yz], [xz, yz, zz]])
    } else {
        let phys = inverse_batch(
            grid,
            &[u.component(0), u.component(1), u.component(2), w.component(0), w.component(1), w.component(2)],
        );
        // entry (i, j) = u_j w_i
        let pairs: Vec<(usize, usize)> =
            (0..3).flat_map(|i| (0..3).map(move |j| (j, 3 + i))).collect();
        let f = forward_dealiased(grid, &products(&phys, &pairs));
        divergence_of_columns(
            grid,
            [[&f[0], &f[1], &f[2]], [&f[3], &f[4], &f[5]], [&f[6], &f[7], &f[8]]],
        )
    }
}

/// `P div(u (x) w)`, which equals `P((u . grad) w)` for divergence-free `u`.
pub fn convective_term(u: &SpectralVector, w: &SpectralVector) -> Result<SpectralVector> {
    if u.grid() != w.grid() {
        return Err(Error::GridMismatch);
    }
    u.require_divergence_free()?;
    // Packed transforms leak roundoff between the two halves; keep B(0, f) = 0 exact.
    if u.is_zero() || w.is_zero() {
        return Ok(SpectralVector::zeros(u.grid()));
    }
    let mut out = flux_divergence(u, w);
    leray_project_in_place(&mut out);
    Ok(out)
}

/// `div(theta u)`, which equals `u . grad theta` for divergence-free `u`.
pub fn transport_term(u: &SpectralVector, theta: &SpectralScalar) -> Result<SpectralScalar> {
    if u.grid() != theta.grid() {
        return Err(Error::GridMismatch);
    }
    u.require_divergence_free()?;
    if u.is_zero() || theta.is_zero() {
        return Ok(SpectralScalar::zeros(u.grid()));
    }
    let grid = u.grid();
    let phys = inverse_batch(grid, &[u.component(0), u.component(1), u.component(2), theta.coeffs()]);
    let f = forward_dealiased(grid, &products(&phys, &[(0, 3), (1, 3), (2, 3)]));
    Ok(scalar_divergence(grid, [&f[0], &f[1], &f[2]]))
}

/// `P(theta e_3)`
pub fn buoyancy_term(theta: &SpectralScalar) -> SpectralVector {
    let grid = theta.grid();
    let mut out = SpectralVector::zeros(grid);
    out.component_mut(2).copy_from_slice(theta.coeffs());
    leray_project_in_place(&mut out);
    out
}

/// Both nonlinear terms of one state `(u, theta)` with shared transforms:
/// `(P div(u (x) u), div(theta u))`.
fn self_interaction(u: &SpectralVector, theta: &SpectralScalar) -> (SpectralVector, SpectralScalar) {
    let grid = u.grid();
    let phys = inverse_batch(grid, &[u.component(0), u.component(1), u.component(2), theta.coeffs()]);
    let pairs = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2), (0, 3), (1, 3), (2, 3)];
    let f = forward_dealiased(grid, &products(&phys, &pairs));
    let (xx, xy, xz, yy, yz, zz) = (&f[0], &f[1], &f[2], &f[3], &f[4], &f[5]);
    let mut conv = divergence_of_columns(grid, [[xx, xy, xz], [xy, yy, yz], [xz, yz, zz]]);
    leray_project_in_place(&mut conv);
    let transport = scalar_divergence(grid, [&f[6], &f[7], &f[8]]);
    (conv, transport)
}

fn map_samples<T: Send>(steps: usize, f: impl Fn(usize) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..=steps).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..=steps).map(f).collect()
    }
}

fn check_inputs(e: &StatePair, f: &StatePair) -> Result<()> {
    if !e.same_times(f) {
        return Err(Error::MismatchedTrajectories);
    }
    Ok(())
}

/// `B(e, f) = -(Duhamel of P div(u_e (x) u_f), Duhamel of div(theta_f u_e))`.
pub fn apply_b(e: &StatePair, f: &StatePair) -> Result<StatePair> {
    check_inputs(e, f)?;
    let (ue, uf, tf) = (e.velocity.samples(), f.velocity.samples(), f.temperature.samples());
    let same = std::ptr::eq(e, f);
    let forcing = map_samples(e.steps(), |m| {
        ue[m].require_divergence_free()?;
        if same && !ue[m].is_zero() && !tf[m].is_zero() {
            Ok(self_interaction(&ue[m], &tf[m]))
        } else {
            Ok((convective_term(&ue[m], &uf[m])?, transport_term(&ue[m], &tf[m])?))
        }
    })?;
    let (vel, temp): (Vec<_>, Vec<_>) = forcing.into_iter().unzip();
    let vel = duhamel_trajectory(&Trajectory::new(e.dt(), vel)?).scaled(-1.0);
    let temp = duhamel_trajectory(&Trajectory::new(e.dt(), temp)?).scaled(-1.0);
    Ok(StatePair::new_unchecked(vel, temp))
}

/// `L(e) = (Duhamel of P(theta e_3), 0)`.
pub fn apply_l(e: &StatePair) -> Result<StatePair> {
    let buoy = e.temperature.map(|t| Ok(buoyancy_term(t)))?;
    let vel = duhamel_trajectory(&buoy);
    let temp = Trajectory::zeros(e.grid(), e.horizon(), e.steps())?;
    Ok(StatePair::new_unchecked(vel, temp))
}

/// `B(e, e) + L(e)` sharing one Duhamel pass; `coupling` scales the buoyancy
/// and `nonlinear` scales the bilinear part.
pub(crate) fn nonlinear_map(e: &StatePair, nonlinear: f64, coupling: f64) -> Result<StatePair> {
    let (u, t) = (e.velocity.samples(), e.temperature.samples());
    let forcing = map_samples(e.steps(), |m| Ok(state_forcing(&u[m], &t[m], nonlinear, coupling)))?;
    let (vel, temp): (Vec<_>, Vec<_>) = forcing.into_iter().unzip();
    let vel = duhamel_trajectory(&Trajectory::new(e.dt(), vel)?);
    let temp = duhamel_trajectory(&Trajectory::new(e.dt(), temp)?);
    Ok(StatePair::new_unchecked(vel, temp))
}

/// Right-hand side `(P(c theta e_3) - a P div(u (x) u), -a div(theta u))` of the
/// differential system minus the Laplacian.
pub(crate) fn state_forcing(
    u: &SpectralVector,
    theta: &SpectralScalar,
    nonlinear: f64,
    coupling: f64,
) -> (SpectralVector, SpectralScalar) {
    let mut vel = SpectralVector::zeros(u.grid());
    let mut temp = SpectralScalar::zeros(u.grid());
    if nonlinear != 0.0 && !u.is_zero() {
        // packed transforms would leak roundoff into an exactly zero temperature
        let (conv, transport) = if theta.is_zero() {
            let mut conv = flux_divergence(u, u);
            leray_project_in_place(&mut conv);
            (conv, SpectralScalar::zeros(u.grid()))
        } else {
            self_interaction(u, theta)
        };
        vel.axpy(-nonlinear, &conv);
        temp.axpy(-nonlinear, &transport);
    }
    if coupling != 0.0 {
        vel.axpy(coupling, &buoyancy_term(theta));
    }
    (vel, temp)
}

/// Zero-mean pressure with `grad P = (I - P)(theta e_3 - div(u (x) u))`.
pub fn pressure_recover(u: &SpectralVector, theta: &SpectralScalar) -> Result<SpectralScalar> {
    if u.grid() != theta.grid() {
        return Err(Error::GridMismatch);
    }
    u.require_divergence_free()?;
    let mut rhs = flux_divergence(u, u).scaled(-1.0);
    rhs.component_mut(2).iter_mut().zip(theta.coeffs()).for_each(|(r, t)| *r += t);
    Ok(gradient_potential(&rhs))
}
