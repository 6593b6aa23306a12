use std::sync::atomic::{AtomicBool, Ordering};

use num_complex::Complex64;

use super::grid::Grid;
use crate::error::{Error, Result};

/// Relative tolerance of the per-mode divergence-free test.
pub const DIVERGENCE_TOL: f64 = 1e-12;

static DETERMINISTIC: AtomicBool = AtomicBool::new(true);

/// Selects fixed-order (bit reproducible) or parallel mode sums in norm
/// reductions. Fixed order is the default.
pub fn set_deterministic_reductions(on: bool) {
    DETERMINISTIC.store(on, Ordering::Relaxed);
}

pub fn deterministic_reductions() -> bool {
    DETERMINISTIC.load(Ordering::Relaxed)
}

/// Sum of `f(i)` over `0..len` honoring the reduction mode.
pub(crate) fn mode_sum(len: usize, f: impl Fn(usize) -> f64 + Sync + Send) -> f64 {
    #[cfg(feature = "parallel")]
    {
        if !deterministic_reductions() {
            use rayon::prelude::*;
            return (0..len).into_par_iter().map(f).sum();
        }
    }
    (0..len).map(f).sum()
}

/// Order of a Sobolev norm or Fourier multiplier.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct NormOrder {
    pub order: f64,
    pub homogeneous: bool,
}

impl NormOrder {
    /// `\dot H^order`: weight `|k|^order`, zero mode excluded.
    pub fn homogeneous(order: f64) -> Self {
        Self { order, homogeneous: true }
    }

    /// `H^order`: weight `(1 + |k|^2)^(order/2)`, zero mode included.
    pub fn inhomogeneous(order: f64) -> Self {
        Self { order, homogeneous: false }
    }
}

/// Common interface of scalar and vector spectral fields: a fixed number of
/// complex coefficient arrays over one grid.
pub trait SpectralField: Clone + Send + Sync + std::fmt::Debug {
    const COMPONENTS: usize;

    fn grid(&self) -> &Grid;
    fn zeros(grid: &Grid) -> Self;
    fn component(&self, c: usize) -> &[Complex64];
    fn component_mut(&mut self, c: usize) -> &mut [Complex64];

    /// `self += a * other`
    fn axpy(&mut self, a: f64, other: &Self) {
        for c in 0..Self::COMPONENTS {
            let src = other.component(c);
            for (d, s) in self.component_mut(c).iter_mut().zip(src) {
                *d += s * a;
            }
        }
    }

    fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.scale(a);
        out
    }

    fn scale(&mut self, a: f64) {
        for c in 0..Self::COMPONENTS {
            for v in self.component_mut(c) {
                *v *= a;
            }
        }
    }

    fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(1.0, other);
        out
    }

    /// Multiplies every mode by a real, mode-dependent factor.
    fn apply_real_multiplier(&mut self, mult: &[f64]) {
        for c in 0..Self::COMPONENTS {
            for (v, m) in self.component_mut(c).iter_mut().zip(mult) {
                *v *= *m;
            }
        }
    }

    /// Zero mode of every component is exactly zero.
    fn is_zero_mean(&self) -> bool {
        (0..Self::COMPONENTS).all(|c| self.component(c)[0] == Complex64::default())
    }

    fn is_zero(&self) -> bool {
        (0..Self::COMPONENTS).all(|c| self.component(c).iter().all(|v| *v == Complex64::default()))
    }

    fn max_abs_coeff(&self) -> f64 {
        (0..Self::COMPONENTS)
            .flat_map(|c| self.component(c).iter().map(|v| v.norm()))
            .fold(0.0, f64::max)
    }

    /// `L^3 * sum_k weight(k) * |f(k)|^2` summed over components.
    fn weighted_energy(&self, weight: &[f64]) -> f64 {
        let comps: Vec<&[Complex64]> = (0..Self::COMPONENTS).map(|c| self.component(c)).collect();
        let sum = mode_sum(weight.len(), |i| {
            let w = weight[i];
            if w == 0.0 {
                0.0
            } else {
                w * comps.iter().map(|c| c[i].norm_sqr()).sum::<f64>()
            }
        });
        self.grid().volume() * sum
    }
}

/// Real scalar field stored by its Fourier coefficients
/// `f(x) = sum_k f_k exp(i k x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralScalar {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralScalar {
    pub fn from_coeffs(grid: &Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        Ok(Self { grid: grid.clone(), coeffs })
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn coeff(&self, m: [i64; 3]) -> Complex64 {
        self.coeffs[self.grid.index_of(m)]
    }

    /// Real cosine/sine mode `amp * exp(i k x) + conj` at integer mode `m`.
    pub fn single_mode(grid: &Grid, m: [i64; 3], amplitude: Complex64) -> Self {
        let mut f = Self::zeros(grid);
        let i = grid.index_of(m);
        let j = grid.conjugate_index(i);
        if i == j {
            f.coeffs[i] = Complex64::new(amplitude.re, 0.0);
        } else {
            f.coeffs[i] = amplitude;
            f.coeffs[j] = amplitude.conj();
        }
        f
    }

    pub fn constant(grid: &Grid, value: f64) -> Self {
        let mut f = Self::zeros(grid);
        f.coeffs[0] = Complex64::new(value, 0.0);
        f
    }

    /// Largest violation of `f(-k) = conj(f(k))`.
    pub fn hermitian_defect(&self) -> f64 {
        (0..self.coeffs.len())
            .map(|i| (self.coeffs[self.grid.conjugate_index(i)] - self.coeffs[i].conj()).norm())
            .fold(0.0, f64::max)
    }
}

impl SpectralField for SpectralScalar {
    const COMPONENTS: usize = 1;

    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn zeros(grid: &Grid) -> Self {
        Self { grid: grid.clone(), coeffs: vec![Complex64::default(); grid.len()] }
    }

    fn component(&self, _c: usize) -> &[Complex64] {
        &self.coeffs
    }

    fn component_mut(&mut self, _c: usize) -> &mut [Complex64] {
        &mut self.coeffs
    }
}

/// Real vector field with three scalar components on a shared grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralVector {
    comps: [SpectralScalar; 3],
}

impl SpectralVector {
    pub fn from_components(comps: [SpectralScalar; 3]) -> Result<Self> {
        if comps[0].grid != comps[1].grid || comps[0].grid != comps[2].grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self { comps })
    }

    pub fn components(&self) -> &[SpectralScalar; 3] {
        &self.comps
    }

    pub fn into_components(self) -> [SpectralScalar; 3] {
        self.comps
    }

    pub fn get(&self, c: usize) -> &SpectralScalar {
        &self.comps[c]
    }

    pub fn get_mut(&mut self, c: usize) -> &mut SpectralScalar {
        &mut self.comps[c]
    }

    pub(crate) fn component_slices_mut(&mut self) -> [&mut [Complex64]; 3] {
        let [a, b, c] = &mut self.comps;
        [&mut a.coeffs, &mut b.coeffs, &mut c.coeffs]
    }

    /// Largest per-mode value of `|k.v(k)| / (|k| |v(k)|)`, ignoring modes
    /// whose amplitude is below roundoff of the field's largest coefficient.
    pub fn divergence_defect(&self) -> f64 {
        let grid = self.grid();
        let floor = 1e-14 * self.max_abs_coeff();
        let mut worst = 0.0f64;
        for i in 1..grid.len() {
            let k = grid.deriv_wavevector(i);
            let kk = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
            if kk == 0.0 {
                continue;
            }
            let v = [self.comps[0].coeffs[i], self.comps[1].coeffs[i], self.comps[2].coeffs[i]];
            let vn = (v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr()).sqrt();
            if vn <= floor {
                continue;
            }
            let dot = v[0] * k[0] + v[1] * k[1] + v[2] * k[2];
            worst = worst.max(dot.norm() / (kk * vn));
        }
        worst
    }

    /// Per-mode divergence-free test at relative tolerance [`DIVERGENCE_TOL`]
    /// (zero mode unconstrained).
    pub fn is_divergence_free(&self) -> bool {
        self.divergence_defect() <= DIVERGENCE_TOL
    }

    pub(crate) fn require_divergence_free(&self) -> Result<()> {
        let defect = self.divergence_defect();
        if defect > DIVERGENCE_TOL {
            return Err(Error::NotDivergenceFree { defect });
        }
        Ok(())
    }
}

impl SpectralField for SpectralVector {
    const COMPONENTS: usize = 3;

    fn grid(&self) -> &Grid {
        &self.comps[0].grid
    }

    fn zeros(grid: &Grid) -> Self {
        Self {
            comps: [SpectralScalar::zeros(grid), SpectralScalar::zeros(grid), SpectralScalar::zeros(grid)],
        }
    }

    fn component(&self, c: usize) -> &[Complex64] {
        &self.comps[c].coeffs
    }

    fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        &mut self.comps[c].coeffs
    }
}
