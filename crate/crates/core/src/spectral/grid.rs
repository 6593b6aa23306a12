use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Norm weights keyed by (order bits, homogeneous).
type WeightCache = Mutex<HashMap<(u64, bool), Arc<Vec<f64>>>>;

/// Periodic box `[0, L)^3` sampled with `n` points per axis.
///
/// Mode `(m0, m1, m2)` with signed integers in `-n/2..n/2` is stored at flat
/// index `(i0 * n + i1) * n + i2`, `i = m mod n`, and carries the wave vector
/// `k = (2 pi / L) m`. Derived tables (|k|^2, dealiasing mask, FFT plans,
/// Sobolev weights) are built once and shared between clones.
#[derive(Clone)]
pub struct Grid {
    inner: Arc<GridInner>,
}

struct GridInner {
    n: usize,
    box_length: f64,
    wavenumber: Vec<f64>,
    deriv_wavenumber: Vec<f64>,
    k2: Vec<f64>,
    retained: Vec<bool>,
    conjugate: Vec<u32>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    weights: WeightCache,
}

impl Grid {
    pub fn new(n_per_axis: usize, box_length: f64) -> Result<Self> {
        if n_per_axis < 8 || !n_per_axis.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "n_per_axis must be even and >= 8, got {n_per_axis}"
            )));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "box_length must be positive, got {box_length}"
            )));
        }
        let n = n_per_axis;
        let base = 2.0 * PI / box_length;
        let signed: Vec<i64> = (0..n).map(|i| signed_index(i, n)).collect();
        let wavenumber: Vec<f64> = signed.iter().map(|&m| base * m as f64).collect();
        // Odd-order operators see the Nyquist row as having no derivative.
        let deriv_wavenumber: Vec<f64> = signed
            .iter()
            .map(|&m| if m == -(n as i64) / 2 { 0.0 } else { base * m as f64 })
            .collect();

        let total = n * n * n;
        let mut k2 = Vec::with_capacity(total);
        let mut retained = Vec::with_capacity(total);
        // 2/3 rule: drop any mode with |k_j| >= (2/3) * (pi n / L), i.e. 3|m_j| >= n.
        let keep = |m: i64| 3 * m.unsigned_abs() < n as u64;
        for i0 in 0..n {
            for i1 in 0..n {
                for i2 in 0..n {
                    let (a, b, c) = (wavenumber[i0], wavenumber[i1], wavenumber[i2]);
                    k2.push(a * a + b * b + c * c);
                    retained.push(keep(signed[i0]) && keep(signed[i1]) && keep(signed[i2]));
                }
            }
        }

        let wrap = |m: i64| m.rem_euclid(n as i64) as usize;
        let conjugate: Vec<u32> = (0..total)
            .map(|idx| {
                let (i0, i1, i2) = (idx / (n * n), (idx / n) % n, idx % n);
                let c = (wrap(-signed[i0]) * n + wrap(-signed[i1])) * n + wrap(-signed[i2]);
                c as u32
            })
            .collect();

        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);

        Ok(Self {
            inner: Arc::new(GridInner {
                n,
                box_length,
                wavenumber,
                deriv_wavenumber,
                k2,
                retained,
                conjugate,
                forward,
                inverse,
                weights: Mutex::new(HashMap::new()),
            }),
        })
    }

    /// `2 pi`-periodic box with `n` points per axis.
    pub fn periodic(n_per_axis: usize) -> Result<Self> {
        Self::new(n_per_axis, 2.0 * PI)
    }

    pub fn n(&self) -> usize {
        self.inner.n
    }

    pub fn box_length(&self) -> f64 {
        self.inner.box_length
    }

    pub fn volume(&self) -> f64 {
        self.inner.box_length.powi(3)
    }

    pub fn len(&self) -> usize {
        self.inner.k2.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Smallest positive wave number `2 pi / L`.
    pub fn fundamental(&self) -> f64 {
        2.0 * PI / self.inner.box_length
    }

    /// Nyquist wave number `pi n / L`.
    pub fn k_max(&self) -> f64 {
        PI * self.inner.n as f64 / self.inner.box_length
    }

    /// Largest |k| present on the grid (the Nyquist corner).
    pub fn k_corner(&self) -> f64 {
        self.k_max() * 3f64.sqrt()
    }

    pub fn k2(&self) -> &[f64] {
        &self.inner.k2
    }

    pub fn retained(&self) -> &[bool] {
        &self.inner.retained
    }

    pub fn split_index(&self, idx: usize) -> [usize; 3] {
        let n = self.inner.n;
        [idx / (n * n), (idx / n) % n, idx % n]
    }

    pub fn signed_mode(&self, idx: usize) -> [i64; 3] {
        let n = self.inner.n;
        self.split_index(idx).map(|i| signed_index(i, n))
    }

    /// Flat index of the signed integer mode `m` (taken modulo `n`).
    pub fn index_of(&self, m: [i64; 3]) -> usize {
        let n = self.inner.n as i64;
        let w = |v: i64| v.rem_euclid(n) as usize;
        (w(m[0]) * self.inner.n + w(m[1])) * self.inner.n + w(m[2])
    }

    /// Index of `-k`.
    pub fn conjugate_index(&self, idx: usize) -> usize {
        self.inner.conjugate[idx] as usize
    }

    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        self.split_index(idx).map(|i| self.inner.wavenumber[i])
    }

    /// Wave vector used by gradient, divergence and the Leray projector;
    /// Nyquist components are zeroed so that these operators map real fields
    /// to real fields.
    pub fn deriv_wavevector(&self, idx: usize) -> [f64; 3] {
        self.split_index(idx).map(|i| self.inner.deriv_wavenumber[i])
    }

    pub(crate) fn deriv_wavenumbers(&self) -> &[f64] {
        &self.inner.deriv_wavenumber
    }

    /// Sobolev weight table `w(k)^(2 * order)`; homogeneous weights vanish at
    /// the zero mode.
    pub(crate) fn weights(&self, order: f64, homogeneous: bool) -> Arc<Vec<f64>> {
        let key = (order.to_bits(), homogeneous);
        let mut cache = self.inner.weights.lock().expect("weight cache poisoned");
        if let Some(w) = cache.get(&key) {
            return Arc::clone(w);
        }
        let table: Vec<f64> = self
            .inner
            .k2
            .iter()
            .map(|&k2| {
                if homogeneous {
                    if k2 == 0.0 {
                        0.0
                    } else if order == 0.0 {
                        1.0
                    } else {
                        k2.powf(order)
                    }
                } else {
                    (1.0 + k2).powf(order)
                }
            })
            .collect();
        let table = Arc::new(table);
        cache.insert(key, Arc::clone(&table));
        table
    }

    /// In-place forward 3D DFT (unnormalized, `exp(-i k x)` kernel).
    pub(crate) fn fft_forward(&self, data: &mut [Complex64]) {
        self.fft3(data, &*self.inner.forward);
    }

    /// In-place inverse 3D DFT (unnormalized, `exp(+i k x)` kernel).
    pub(crate) fn fft_inverse(&self, data: &mut [Complex64]) {
        self.fft3(data, &*self.inner.inverse);
    }

    fn fft3(&self, data: &mut [Complex64], fft: &dyn Fft<f64>) {
        let n = self.inner.n;
        let plane = n * n;
        debug_assert_eq!(data.len(), plane * n);
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        // contiguous axis: all n^2 lines in one batched call
        fft.process_with_scratch(data, &mut scratch);

        let mut lines = vec![Complex64::default(); plane];
        // middle axis, one i0-plane at a time
        for i0 in 0..n {
            let base = i0 * plane;
            for i1 in 0..n {
                for i2 in 0..n {
                    lines[i2 * n + i1] = data[base + i1 * n + i2];
                }
            }
            fft.process_with_scratch(&mut lines, &mut scratch);
            for i1 in 0..n {
                for i2 in 0..n {
                    data[base + i1 * n + i2] = lines[i2 * n + i1];
                }
            }
        }
        // slow axis, one i1-slab at a time
        for i1 in 0..n {
            for i0 in 0..n {
                let row = (i0 * n + i1) * n;
                for i2 in 0..n {
                    lines[i2 * n + i0] = data[row + i2];
                }
            }
            fft.process_with_scratch(&mut lines, &mut scratch);
            for i0 in 0..n {
                let row = (i0 * n + i1) * n;
                for i2 in 0..n {
                    data[row + i2] = lines[i2 * n + i0];
                }
            }
        }
    }
}

fn signed_index(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.n == other.inner.n && self.inner.box_length == other.inner.box_length)
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n_per_axis", &self.inner.n)
            .field("box_length", &self.inner.box_length)
            .finish()
    }
}
