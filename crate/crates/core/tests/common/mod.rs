#![allow(dead_code)]

use boussinesq_mild::spectral::{from_physical, Grid, SpectralField, SpectralScalar, SpectralVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Field with every mode populated, Nyquist planes included.
pub fn full_spectrum_field(seed: u64, grid: &Grid) -> SpectralScalar {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<f64> = (0..grid.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut f = from_physical(grid, &values);
    f.coeffs_mut()[0] = Complex64::default();
    f
}

pub fn full_spectrum_vector(seed: u64, grid: &Grid) -> SpectralVector {
    let comps = [0, 1, 2].map(|c| full_spectrum_field(seed.wrapping_mul(3).wrapping_add(c), grid));
    SpectralVector::from_components(comps).unwrap()
}

/// Discrete circular convolution `c_k = sum_{p + q = k mod n} a_p b_q`,
/// truncated to the 2/3-rule band, by direct summation over all pairs.
pub fn brute_force_product(a: &SpectralScalar, b: &SpectralScalar) -> Vec<Complex64> {
    let grid = a.grid();
    let n = grid.n() as i64;
    let len = grid.len();
    let mut out = vec![Complex64::default(); len];
    for (k, o) in out.iter_mut().enumerate() {
        let mk = grid.signed_mode(k);
        if mk.iter().any(|m| 3 * m.abs() >= n) {
            continue;
        }
        let mut acc = Complex64::default();
        for p in 0..len {
            let mp = grid.signed_mode(p);
            let q = grid.index_of([0, 1, 2].map(|c| (mk[c] - mp[c]).rem_euclid(n)));
            acc += a.coeffs()[p] * b.coeffs()[q];
        }
        *o = acc;
    }
    out
}

pub fn max_abs(v: &[Complex64]) -> f64 {
    v.iter().fold(0.0, |m, c| m.max(c.norm()))
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

/// Largest coefficient difference of two fields over the largest coefficient of the second.
pub fn rel_diff<F: SpectralField>(a: &F, b: &F) -> f64 {
    let scale = b.max_abs_coeff().max(f64::MIN_POSITIVE);
    a.sub(b).max_abs_coeff() / scale
}

/// Forcing `sum_j sin(w_j t + p_j) g_j` with three random fields `g_j`.
pub fn smooth_forcing(seed: u64, grid: &Grid, horizon: f64, steps: usize) -> boussinesq_mild::heat::Trajectory<SpectralScalar> {
    use boussinesq_mild::spectral::gen_random_field;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let parts: Vec<(f64, f64, SpectralScalar)> = (0..3)
        .map(|_| {
            let w = rng.random_range(1.0..4.0);
            let p = rng.random_range(0.0..std::f64::consts::TAU);
            (w, p, gen_random_field(rng.random(), 1.0, grid))
        })
        .collect();
    boussinesq_mild::heat::Trajectory::from_fn(horizon, steps, |t| {
        let mut f = SpectralScalar::zeros(grid);
        for (w, p, g) in &parts {
            f.axpy((w * t + p).sin(), g);
        }
        f
    })
    .unwrap()
}

/// Errors of the Duhamel integral at the horizon for each step count, each
/// against its own 16x finer solve, and the fitted log-log order.
pub fn duhamel_self_convergence(seed: u64, grid: &Grid, horizon: f64, steps: &[usize]) -> (Vec<f64>, f64) {
    use boussinesq_mild::heat::duhamel_integral;
    use boussinesq_mild::spectral::hdot;
    let errors: Vec<f64> = steps
        .iter()
        .map(|&m| {
            let coarse = duhamel_integral(&smooth_forcing(seed, grid, horizon, m), m).unwrap();
            let fine = duhamel_integral(&smooth_forcing(seed, grid, horizon, 16 * m), 16 * m).unwrap();
            hdot(&coarse.sub(&fine), 0.0).unwrap()
        })
        .collect();
    let dts: Vec<f64> = steps.iter().map(|&m| horizon / m as f64).collect();
    let slope = boussinesq_mild::verify::loglog_slope(&dts, &errors).unwrap();
    (errors, slope)
}

/// `f(x - a)`: every mode picks up `e^{-i k.a}`.
pub fn translate<F: SpectralField>(f: &F, shift: [f64; 3]) -> F {
    let grid = f.grid().clone();
    let mut out = f.clone();
    for c in 0..F::COMPONENTS {
        for (i, v) in out.component_mut(c).iter_mut().enumerate() {
            let k = grid.wavevector(i);
            let phase = -(k[0] * shift[0] + k[1] * shift[1] + k[2] * shift[2]);
            *v *= Complex64::from_polar(1.0, phase);
        }
    }
    out
}

/// `sum_i i k_i c_i` per mode, with the derivative wave vector.
pub fn oracle_divergence(grid: &Grid, cols: [&[Complex64]; 3]) -> Vec<Complex64> {
    let i = Complex64::new(0.0, 1.0);
    (0..grid.len())
        .map(|idx| {
            let k = grid.deriv_wavevector(idx);
            i * (k[0] * cols[0][idx] + k[1] * cols[1][idx] + k[2] * cols[2][idx])
        })
        .collect()
}

/// `v - k (k.v) / |k|^2` per mode.
pub fn oracle_leray(grid: &Grid, v: [Vec<Complex64>; 3]) -> [Vec<Complex64>; 3] {
    let mut out = v.clone();
    for idx in 0..grid.len() {
        let k = grid.deriv_wavevector(idx);
        let kk = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if kk == 0.0 {
            continue;
        }
        let dot = k[0] * v[0][idx] + k[1] * v[1][idx] + k[2] * v[2][idx];
        for c in 0..3 {
            out[c][idx] = v[c][idx] - k[c] * dot / kk;
        }
    }
    out
}
