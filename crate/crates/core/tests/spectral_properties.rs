mod common;

use boussinesq_mild::spectral::*;
use common::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn grid8() -> Grid {
    Grid::periodic(8).unwrap()
}

#[test]
fn dealiased_product_matches_direct_convolution() {
    let g = grid8();
    for seed in 0..4 {
        let a = full_spectrum_field(2 * seed, &g);
        let b = full_spectrum_field(2 * seed + 1, &g);
        let fast = dealiased_product(&a, &b).unwrap();
        let slow = brute_force_product(&a, &b);
        let err = max_diff(fast.coeffs(), &slow);
        assert!(err <= 1e-12 * max_abs(&slow), "seed {seed}: {err:e}");
    }
}

#[test]
fn band_limited_product_has_no_aliasing() {
    // inputs within |m| <= n/4 multiply into |m| <= n/2 - 1, no wraparound at n = 8
    let g = grid8();
    let a = gen_random_field(3, 1.0, &g);
    let b = gen_random_field(4, 1.0, &g);
    let fast = dealiased_product(&a, &b).unwrap();
    let slow = brute_force_product(&a, &b);
    assert!(max_diff(fast.coeffs(), &slow) <= 1e-13 * max_abs(&slow));
}

#[test]
fn random_field_order_one_norm_matches_modulus_sum() {
    let g = Grid::periodic(32).unwrap();
    let beta = 10.0;
    let f = gen_random_field(17, beta, &g);
    let cutoff = 0.5 * g.k_max();
    let mut sum = 0.0;
    for i in 1..g.len() {
        let k2 = g.k2()[i];
        if k2.sqrt() <= cutoff * (1.0 + 1e-12) {
            sum += k2 * k2.powf(-beta);
        }
    }
    let expect = (g.volume() * sum).sqrt();
    assert!((hdot(&f, 1.0).unwrap() / expect - 1.0).abs() < 0.01);
    let h = gen_random_field(18, beta, &g);
    assert_ne!(f.coeffs(), h.coeffs());
    for (x, y) in f.coeffs().iter().zip(h.coeffs()) {
        assert!((x.norm() - y.norm()).abs() < 1e-15);
    }
}

#[test]
fn sine_parseval() {
    let g = Grid::periodic(16).unwrap();
    let n = g.n();
    let h = g.box_length() / n as f64;
    let values: Vec<f64> = (0..g.len()).map(|i| ((i / (n * n)) as f64 * h).sin()).collect();
    let f = from_physical(&g, &values);
    let expect = (g.volume() / 2.0).sqrt();
    assert!((lebesgue_norm(&f, 2.0).unwrap() - expect).abs() < 1e-12 * expect);
    assert!((hdot(&f, 0.0).unwrap() - expect).abs() < 1e-12 * expect);
}

#[test]
fn divergence_of_gradient_is_minus_laplacian() {
    let g = Grid::periodic(16).unwrap();
    let f = gen_random_field(5, 1.5, &g);
    let lhs = divergence(&gradient(&f));
    let rhs = fractional_laplacian(&f, 2.0).unwrap().scaled(-1.0);
    assert!(rel_diff(&lhs, &rhs) < 1e-13);
}

fn arb_field(n: usize) -> impl Strategy<Value = SpectralScalar> {
    (any::<u64>(), 0.0f64..4.0, any::<bool>()).prop_map(move |(seed, beta, full)| {
        let g = Grid::periodic(n).unwrap();
        if full {
            full_spectrum_field(seed, &g)
        } else {
            gen_random_field(seed, beta, &g)
        }
    })
}

fn arb_vector(n: usize) -> impl Strategy<Value = SpectralVector> {
    any::<u64>().prop_map(move |seed| full_spectrum_vector(seed, &Grid::periodic(n).unwrap()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parseval_cross_check(f in arb_field(16)) {
        let a = lebesgue_norm(&f, 2.0).unwrap();
        let b = hdot(&f, 0.0).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * b);
    }

    #[test]
    fn log_convexity(f in arb_field(8), a in -2.0f64..3.0, b in -2.0f64..3.0, sigma in 0.0f64..=1.0) {
        let f = f.scaled(1.0 / hdot(&f, 0.0).unwrap());
        let mid = hdot(&f, sigma * a + (1.0 - sigma) * b).unwrap();
        let bound = hdot(&f, a).unwrap().powf(sigma) * hdot(&f, b).unwrap().powf(1.0 - sigma);
        prop_assert!(mid <= bound * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn leray_is_idempotent_and_solenoidal(v in arb_vector(8)) {
        let p = leray_project(&v);
        prop_assert!(rel_diff(&leray_project(&p), &p) <= 1e-12);
        prop_assert!(p.divergence_defect() <= 1e-12);
        let d = divergence(&p);
        prop_assert!(d.max_abs_coeff() <= 1e-12 * v.max_abs_coeff());
    }

    #[test]
    fn leray_annihilates_gradients(f in arb_field(8)) {
        let grad = gradient(&f);
        let p = leray_project(&grad);
        prop_assert!(p.max_abs_coeff() <= 1e-12 * grad.max_abs_coeff().max(f64::MIN_POSITIVE));
    }

    #[test]
    fn norms_scale_linearly(f in arb_field(8), lambda in 1e-3f64..1e3, order in -1.5f64..2.5) {
        let g = f.scaled(lambda);
        let a = hdot(&g, order).unwrap();
        let b = lambda * hdot(&f, order).unwrap();
        prop_assert!((a - b).abs() <= 1e-13 * b);
        let a = hnorm(&g, order);
        let b = lambda * hnorm(&f, order);
        prop_assert!((a - b).abs() <= 1e-13 * b);
    }

    #[test]
    fn fractional_laplacian_inverts(f in arb_field(8), alpha in -3.0f64..3.0) {
        let back = fractional_laplacian(&fractional_laplacian(&f, alpha).unwrap(), -alpha).unwrap();
        prop_assert!(rel_diff(&back, &f) <= 1e-13);
    }

    #[test]
    fn product_is_symmetric_and_bilinear(seed in any::<u64>(), lambda in -3.0f64..3.0) {
        let g = grid8();
        let a = full_spectrum_field(seed, &g);
        let b = full_spectrum_field(seed ^ 0x9e37, &g);
        let ab = dealiased_product(&a, &b).unwrap();
        let ba = dealiased_product(&b, &a).unwrap();
        prop_assert!(rel_diff(&ab, &ba) <= 1e-14);
        let scaled = dealiased_product(&a.scaled(lambda), &b).unwrap();
        prop_assert!(scaled.sub(&ab.scaled(lambda)).max_abs_coeff() <= 1e-13 * ab.max_abs_coeff());
        prop_assert!(ab.hermitian_defect() <= 1e-14 * ab.max_abs_coeff());
    }

    #[test]
    fn random_fields_are_real_and_zero_mean(seed in any::<u64>(), beta in -1.0f64..5.0) {
        let g = grid8();
        let f = gen_random_field(seed, beta, &g);
        prop_assert!(f.is_zero_mean());
        prop_assert_eq!(f.coeffs()[0], Complex64::default());
        prop_assert_eq!(f.hermitian_defect(), 0.0);
        let again = gen_random_field(seed, beta, &g);
        prop_assert_eq!(f.coeffs(), again.coeffs());
        let u = gen_random_velocity(seed, beta, &g);
        prop_assert!(u.divergence_defect() <= 1e-12);
    }
}
