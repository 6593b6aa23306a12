use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::field::{mode_sum, NormOrder, SpectralField, SpectralScalar, SpectralVector};
use super::grid::Grid;
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn require_zero_mean<F: SpectralField>(f: &F, order: f64) -> Result<()> {
    if order < 0.0 && !f.is_zero_mean() {
        return Err(Error::NegativeOrderNonZeroMean { order });
    }
    Ok(())
}

/// Sobolev norm `(L^3 sum_k w(k)^(2s) |f_k|^2)^(1/2)`.
///
/// Homogeneous orders use `w = |k|` and skip the zero mode; inhomogeneous
/// orders use `w = (1 + |k|^2)^(1/2)`. Vector fields sum their components.
pub fn sobolev_norm<F: SpectralField>(f: &F, order: NormOrder) -> Result<f64> {
    if !order.order.is_finite() {
        return Err(Error::NonFinite("sobolev order"));
    }
    if order.homogeneous {
        require_zero_mean(f, order.order)?;
    }
    let w = f.grid().weights(order.order, order.homogeneous);
    let e = f.weighted_energy(&w);
    if !e.is_finite() {
        return Err(Error::NonFinite("sobolev_norm"));
    }
    Ok(e.sqrt())
}

/// Shorthand for the homogeneous norm `\dot H^s`.
pub fn hdot<F: SpectralField>(f: &F, s: f64) -> Result<f64> {
    sobolev_norm(f, NormOrder::homogeneous(s))
}

/// Shorthand for the inhomogeneous norm `H^s`.
pub fn hnorm<F: SpectralField>(f: &F, s: f64) -> f64 {
    sobolev_norm(f, NormOrder::inhomogeneous(s)).expect("inhomogeneous norms are always defined")
}

/// Homogeneous inner product `L^3 sum_{k != 0} |k|^(2 order) Re(f_k conj(g_k))`.
pub fn sobolev_inner<F: SpectralField>(f: &F, g: &F, order: f64) -> Result<f64> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch);
    }
    require_zero_mean(f, order)?;
    require_zero_mean(g, order)?;
    let w = f.grid().weights(order, true);
    let fc: Vec<&[Complex64]> = (0..F::COMPONENTS).map(|c| f.component(c)).collect();
    let gc: Vec<&[Complex64]> = (0..F::COMPONENTS).map(|c| g.component(c)).collect();
    let sum = mode_sum(w.len(), |i| {
        if w[i] == 0.0 {
            return 0.0;
        }
        let dot: f64 = fc.iter().zip(&gc).map(|(a, b)| (a[i] * b[i].conj()).re).sum();
        w[i] * dot
    });
    Ok(f.grid().volume() * sum)
}

/// Rectangle-rule `L^p` norm over the grid nodes; `p = inf` gives the nodal
/// maximum of the pointwise (Euclidean) magnitude.
pub fn lebesgue_norm<F: SpectralField>(f: &F, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::BadExponentRange(format!("Lebesgue exponent p = {p} < 1")));
    }
    let mag2 = pointwise_magnitude_sq(f);
    let value = if p.is_infinite() {
        mag2.iter().fold(0.0f64, |m, v| m.max(*v)).sqrt()
    } else {
        let cell = (f.grid().box_length() / f.grid().n() as f64).powi(3);
        let sum = mode_sum(mag2.len(), |i| mag2[i].powf(p / 2.0));
        (sum * cell).powf(1.0 / p)
    };
    if !value.is_finite() {
        return Err(Error::NonFinite("lebesgue_norm"));
    }
    Ok(value)
}

fn pointwise_magnitude_sq<F: SpectralField>(f: &F) -> Vec<f64> {
    let grid = f.grid();
    let mut out = vec![0.0; grid.len()];
    let mut c = 0;
    while c < F::COMPONENTS {
        if c + 1 < F::COMPONENTS {
            let (a, b) = inverse_pair(grid, f.component(c), f.component(c + 1));
            for ((o, x), y) in out.iter_mut().zip(&a).zip(&b) {
                *o += x * x + y * y;
            }
            c += 2;
        } else {
            let a = inverse_real(grid, f.component(c));
            for (o, x) in out.iter_mut().zip(&a) {
                *o += x * x;
            }
            c += 1;
        }
    }
    out
}

/// Multiplier `|k|^alpha` with the zero mode sent to zero.
pub fn fractional_laplacian<F: SpectralField>(f: &F, alpha: f64) -> Result<F> {
    require_zero_mean(f, alpha)?;
    let w = f.grid().weights(alpha / 2.0, true);
    let mut out = f.clone();
    out.apply_real_multiplier(&w);
    Ok(out)
}

pub fn gradient(f: &SpectralScalar) -> SpectralVector {
    let grid = f.grid();
    let kd = grid.deriv_wavenumbers();
    let n = grid.n();
    let mut comps = [SpectralScalar::zeros(grid), SpectralScalar::zeros(grid), SpectralScalar::zeros(grid)];
    for (i, v) in f.coeffs().iter().enumerate() {
        let idx = [i / (n * n), (i / n) % n, i % n];
        for (c, comp) in comps.iter_mut().enumerate() {
            comp.coeffs_mut()[i] = I * kd[idx[c]] * v;
        }
    }
    SpectralVector::from_components(comps).expect("components share a grid")
}

/// `div v`; the result has zero mean.
pub fn divergence(v: &SpectralVector) -> SpectralScalar {
    let grid = v.grid();
    let kd = grid.deriv_wavenumbers();
    let n = grid.n();
    let mut out = SpectralScalar::zeros(grid);
    let (a, b, c) = (v.get(0).coeffs(), v.get(1).coeffs(), v.get(2).coeffs());
    for (i, o) in out.coeffs_mut().iter_mut().enumerate() {
        let idx = [i / (n * n), (i / n) % n, i % n];
        *o = I * (a[i] * kd[idx[0]] + b[i] * kd[idx[1]] + c[i] * kd[idx[2]]);
    }
    out
}

/// Leray projector `v - k (k.v) / |k|^2`, zero mode passed through.
pub fn leray_project(v: &SpectralVector) -> SpectralVector {
    let mut out = v.clone();
    leray_project_in_place(&mut out);
    out
}

pub(crate) fn leray_project_in_place(v: &mut SpectralVector) {
    let grid = v.grid().clone();
    let kd = grid.deriv_wavenumbers();
    let n = grid.n();
    let [a, b, c] = v.component_slices_mut();
    for i in 0..grid.len() {
        let idx = [i / (n * n), (i / n) % n, i % n];
        let k = [kd[idx[0]], kd[idx[1]], kd[idx[2]]];
        let kk = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if kk == 0.0 {
            continue;
        }
        let dot = (a[i] * k[0] + b[i] * k[1] + c[i] * k[2]) / kk;
        a[i] -= dot * k[0];
        b[i] -= dot * k[1];
        c[i] -= dot * k[2];
    }
}

/// Non-solenoidal part `k (k.v) / |k|^2` expressed as a potential `P` with
/// `grad P = (I - Leray) v`.
pub(crate) fn gradient_potential(v: &SpectralVector) -> SpectralScalar {
    let grid = v.grid();
    let kd = grid.deriv_wavenumbers();
    let n = grid.n();
    let mut out = SpectralScalar::zeros(grid);
    let (a, b, c) = (v.get(0).coeffs(), v.get(1).coeffs(), v.get(2).coeffs());
    for (i, o) in out.coeffs_mut().iter_mut().enumerate() {
        let idx = [i / (n * n), (i / n) % n, i % n];
        let k = [kd[idx[0]], kd[idx[1]], kd[idx[2]]];
        let kk = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if kk == 0.0 {
            continue;
        }
        // i k P = k (k.v)/|k|^2  =>  P = -i (k.v)/|k|^2
        *o = -I * (a[i] * k[0] + b[i] * k[1] + c[i] * k[2]) / kk;
    }
    out
}

/// Zero every mode outside the 2/3-rule band.
pub fn dealias<F: SpectralField>(f: &mut F) {
    let keep = f.grid().retained().to_vec();
    for c in 0..F::COMPONENTS {
        for (v, k) in f.component_mut(c).iter_mut().zip(&keep) {
            if !k {
                *v = Complex64::default();
            }
        }
    }
}

/// Pointwise product evaluated on the grid, transformed back and truncated
/// by the 2/3 rule.
pub fn dealiased_product(f: &SpectralScalar, g: &SpectralScalar) -> Result<SpectralScalar> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = f.grid();
    let (a, b) = inverse_pair(grid, f.coeffs(), g.coeffs());
    let prod: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
    let mut out = from_physical(grid, &prod);
    dealias(&mut out);
    Ok(out)
}

/// Nodal values `f(x_j)`, `x_j = j L / n`.
pub fn to_physical(f: &SpectralScalar) -> Vec<f64> {
    inverse_real(f.grid(), f.coeffs())
}

pub fn from_physical(grid: &Grid, values: &[f64]) -> SpectralScalar {
    let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    grid.fft_forward(&mut data);
    let scale = 1.0 / grid.len() as f64;
    for v in &mut data {
        *v *= scale;
    }
    SpectralScalar::from_coeffs(grid, data).expect("length matches grid")
}

pub(crate) fn inverse_real(grid: &Grid, coeffs: &[Complex64]) -> Vec<f64> {
    let mut data = coeffs.to_vec();
    grid.fft_inverse(&mut data);
    data.iter().map(|v| v.re).collect()
}

/// Two real fields through one complex transform: `a + i b`.
pub(crate) fn inverse_pair(grid: &Grid, a: &[Complex64], b: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
    let mut data: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x + I * y).collect();
    grid.fft_inverse(&mut data);
    let re = data.iter().map(|v| v.re).collect();
    let im = data.iter().map(|v| v.im).collect();
    (re, im)
}

/// Forward transform of two real arrays packed as `a + i b`, separated with
/// the Hermitian symmetry of each.
pub(crate) fn forward_pair(grid: &Grid, a: &[f64], b: &[f64]) -> (SpectralScalar, SpectralScalar) {
    let mut data: Vec<Complex64> = a.iter().zip(b).map(|(&x, &y)| Complex64::new(x, y)).collect();
    grid.fft_forward(&mut data);
    let scale = 0.5 / grid.len() as f64;
    let mut fa = vec![Complex64::default(); grid.len()];
    let mut fb = vec![Complex64::default(); grid.len()];
    for i in 0..grid.len() {
        let z = data[i];
        let zc = data[grid.conjugate_index(i)].conj();
        fa[i] = (z + zc) * scale;
        fb[i] = (z - zc) * (-I * scale);
    }
    (
        SpectralScalar::from_coeffs(grid, fa).expect("length matches grid"),
        SpectralScalar::from_coeffs(grid, fb).expect("length matches grid"),
    )
}

/// Forward-transforms a batch of nodal arrays (two per FFT) and dealiases.
pub(crate) fn forward_dealiased(grid: &Grid, arrays: &[Vec<f64>]) -> Vec<SpectralScalar> {
    let mut out = Vec::with_capacity(arrays.len());
    let mut chunks = arrays.chunks(2);
    for chunk in &mut chunks {
        if chunk.len() == 2 {
            let (mut a, mut b) = forward_pair(grid, &chunk[0], &chunk[1]);
            dealias(&mut a);
            dealias(&mut b);
            out.push(a);
            out.push(b);
        } else {
            let mut a = from_physical(grid, &chunk[0]);
            dealias(&mut a);
            out.push(a);
        }
    }
    out
}

/// Inverse-transforms a batch of spectral coefficient arrays (two per FFT).
pub(crate) fn inverse_batch(grid: &Grid, fields: &[&[Complex64]]) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(fields.len());
    for chunk in fields.chunks(2) {
        if chunk.len() == 2 {
            let (a, b) = inverse_pair(grid, chunk[0], chunk[1]);
            out.push(a);
            out.push(b);
        } else {
            out.push(inverse_real(grid, chunk[0]));
        }
    }
    out
}

fn random_coeffs(rng: &mut ChaCha8Rng, beta: f64, grid: &Grid) -> Vec<Complex64> {
    let cutoff = 0.5 * grid.k_max();
    let mut coeffs = vec![Complex64::default(); grid.len()];
    for i in 1..grid.len() {
        let j = grid.conjugate_index(i);
        if j <= i {
            continue;
        }
        let k = grid.k2()[i].sqrt();
        if k > cutoff * (1.0 + 1e-12) {
            continue;
        }
        let phase: f64 = rng.random_range(0.0..2.0 * PI);
        let c = Complex64::from_polar(k.powf(-beta), phase);
        coeffs[i] = c;
        coeffs[j] = c.conj();
    }
    coeffs
}

/// Random real zero-mean field with `|f_k| = |k|^-beta` on `0 < |k| <= k_max/2`
/// and uniformly random phases, deterministic in `seed`.
pub fn gen_random_field(seed: u64, spectral_slope: f64, grid: &Grid) -> SpectralScalar {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SpectralScalar::from_coeffs(grid, random_coeffs(&mut rng, spectral_slope, grid))
        .expect("length matches grid")
}

/// Leray projection of a vector of three independent random fields.
pub fn gen_random_velocity(seed: u64, spectral_slope: f64, grid: &Grid) -> SpectralVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let comps = [(); 3].map(|_| {
        SpectralScalar::from_coeffs(grid, random_coeffs(&mut rng, spectral_slope, grid))
            .expect("length matches grid")
    });
    let v = SpectralVector::from_components(comps).expect("components share a grid");
    leray_project(&v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::field::SpectralField;

    fn grid8() -> Grid {
        Grid::periodic(8).unwrap()
    }

    #[test]
    fn zero_field_has_zero_norms() {
        let g = grid8();
        let z = SpectralScalar::zeros(&g);
        for s in [-1.0, 0.0, 0.5, 2.0] {
            assert_eq!(hdot(&z, s).unwrap(), 0.0);
            assert_eq!(hnorm(&z, s), 0.0);
        }
        for p in [1.0, 2.0, 3.0, f64::INFINITY] {
            assert_eq!(lebesgue_norm(&z, p).unwrap(), 0.0);
        }
    }

    #[test]
    fn single_mode_norm_is_one_term_parseval() {
        let g = grid8();
        let a = 0.7;
        let f = SpectralScalar::single_mode(&g, [1, 2, 0], Complex64::new(a, 0.0));
        let k = 5f64.sqrt();
        for s in [-0.5, 0.0, 1.0, 1.5] {
            let expect = a * k.powf(s) * (2.0 * g.volume()).sqrt();
            assert!((hdot(&f, s).unwrap() - expect).abs() < 1e-12 * expect);
        }
    }

    #[test]
    fn negative_order_needs_zero_mean() {
        let g = grid8();
        let f = SpectralScalar::constant(&g, 1.0);
        assert!(matches!(hdot(&f, -0.5), Err(Error::NegativeOrderNonZeroMean { .. })));
        assert!(fractional_laplacian(&f, -1.0).is_err());
        assert!(hdot(&f, 0.5).is_ok());
    }

    #[test]
    fn constant_field_l3_norm() {
        let g = grid8();
        let c = -1.3;
        let f = SpectralScalar::constant(&g, c);
        let got = lebesgue_norm(&f, 3.0).unwrap();
        let expect = c.abs() * g.volume().powf(1.0 / 3.0);
        assert!((got - expect).abs() < 1e-12 * expect);
        assert!((lebesgue_norm(&f, f64::INFINITY).unwrap() - c.abs()).abs() < 1e-14);
    }

    #[test]
    fn sine_l2_matches_order_zero_norm() {
        let g = Grid::periodic(16).unwrap();
        // sin(x1) = (e^{ix} - e^{-ix}) / 2i
        let f = SpectralScalar::single_mode(&g, [1, 0, 0], Complex64::new(0.0, -0.5));
        let l2 = lebesgue_norm(&f, 2.0).unwrap();
        let expect = (g.volume() / 2.0).sqrt();
        assert!((l2 - expect).abs() < 1e-12 * expect);
        assert!((hdot(&f, 0.0).unwrap() - l2).abs() < 1e-12 * expect);
    }

    #[test]
    fn fractional_laplacian_identities() {
        let g = grid8();
        let f = gen_random_field(3, 1.0, &g);
        let id = fractional_laplacian(&f, 0.0).unwrap();
        assert!(id.sub(&f).max_abs_coeff() < 1e-15);

        let m = SpectralScalar::single_mode(&g, [1, 1, 2], Complex64::new(1.0, 0.5));
        let lap = fractional_laplacian(&m, 2.0).unwrap();
        let k2 = 6.0;
        assert!(lap.sub(&m.scaled(k2)).max_abs_coeff() < 1e-13);
        let div_grad = divergence(&gradient(&m));
        assert!(div_grad.add(&lap).max_abs_coeff() < 1e-13);

        let back = fractional_laplacian(&fractional_laplacian(&f, 0.7).unwrap(), -0.7).unwrap();
        assert!(back.sub(&f).max_abs_coeff() < 1e-13 * f.max_abs_coeff());
    }

    #[test]
    fn gradient_of_constant_vanishes() {
        let g = grid8();
        assert!(gradient(&SpectralScalar::constant(&g, 2.0)).is_zero());
    }

    #[test]
    fn leray_annihilates_gradients_and_is_idempotent() {
        let g = grid8();
        let phi = gen_random_field(11, 1.5, &g);
        let grad = gradient(&phi);
        assert!(leray_project(&grad).max_abs_coeff() < 1e-12 * grad.max_abs_coeff());

        let v = gen_random_velocity(5, 1.0, &g);
        let again = leray_project(&v);
        assert!(again.sub(&v).max_abs_coeff() < 1e-13 * v.max_abs_coeff());
        assert!(divergence(&v).max_abs_coeff() < 1e-12 * v.max_abs_coeff());
    }

    #[test]
    fn product_with_one_truncates_spectrum() {
        let g = grid8();
        let mut f = gen_random_field(1, 0.0, &g);
        f.coeffs_mut()[g.index_of([2, 2, 0])] = Complex64::new(0.1, 0.0);
        f.coeffs_mut()[g.index_of([-2, -2, 0])] = Complex64::new(0.1, 0.0);
        let one = SpectralScalar::constant(&g, 1.0);
        let p = dealiased_product(&f, &one).unwrap();
        let mut expect = f.clone();
        dealias(&mut expect);
        assert!(p.sub(&expect).max_abs_coeff() < 1e-14);
    }

    #[test]
    fn two_mode_product_gives_sum_and_difference_modes() {
        let g = Grid::periodic(16).unwrap();
        let a = SpectralScalar::single_mode(&g, [1, 0, 0], Complex64::new(1.0, 0.0));
        let b = SpectralScalar::single_mode(&g, [0, 2, 0], Complex64::new(0.0, 1.0));
        let p = dealiased_product(&a, &b).unwrap();
        // (e^{ix} + e^{-ix}) (i e^{2iy} - i e^{-2iy})
        let expect_modes = [
            ([1, 2, 0], Complex64::new(0.0, 1.0)),
            ([-1, 2, 0], Complex64::new(0.0, 1.0)),
            ([1, -2, 0], Complex64::new(0.0, -1.0)),
            ([-1, -2, 0], Complex64::new(0.0, -1.0)),
        ];
        let mut expect = SpectralScalar::zeros(&g);
        for (m, v) in expect_modes {
            expect.coeffs_mut()[g.index_of(m)] = v;
        }
        assert!(p.sub(&expect).max_abs_coeff() < 1e-14);
    }

    #[test]
    fn pair_transforms_match_single_transforms() {
        let g = grid8();
        let f = gen_random_field(1, 1.0, &g);
        let h = gen_random_field(2, 0.5, &g);
        let (a, b) = inverse_pair(&g, f.coeffs(), h.coeffs());
        let a1 = to_physical(&f);
        let b1 = to_physical(&h);
        for i in 0..g.len() {
            assert!((a[i] - a1[i]).abs() < 1e-13);
            assert!((b[i] - b1[i]).abs() < 1e-13);
        }
        let (fa, fb) = forward_pair(&g, &a, &b);
        assert!(fa.sub(&f).max_abs_coeff() < 1e-14);
        assert!(fb.sub(&h).max_abs_coeff() < 1e-14);
    }

    #[test]
    fn random_field_is_deterministic_with_fixed_modulus() {
        let g = Grid::periodic(16).unwrap();
        let a = gen_random_field(42, 2.0, &g);
        let b = gen_random_field(42, 2.0, &g);
        let c = gen_random_field(43, 2.0, &g);
        assert_eq!(a, b);
        assert_ne!(a, c);
        for i in 0..g.len() {
            assert!((a.coeffs()[i].norm() - c.coeffs()[i].norm()).abs() < 1e-15);
        }
        assert!(a.is_zero_mean());
        assert!(a.hermitian_defect() < 1e-15);
    }
}
