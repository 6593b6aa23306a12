mod common;

use boussinesq_mild::boussinesq::StatePair;
use boussinesq_mild::picard::*;
use boussinesq_mild::spectral::*;
use boussinesq_mild::Error;
use num_complex::Complex64;
use proptest::prelude::*;

fn grid(n: usize) -> Grid {
    Grid::periodic(n).unwrap()
}

fn small_data(g: &Grid, seed: u64, scale: f64) -> (SpectralVector, SpectralScalar) {
    (gen_random_velocity(seed, 3.0, g).scaled(scale), gen_random_field(seed + 1, 3.0, g).scaled(scale))
}

fn rel_l2(a: &StatePair, b: &StatePair, m_a: usize, m_b: usize) -> f64 {
    let du = a.velocity().samples()[m_a].sub(&b.velocity().samples()[m_b]);
    let dt = a.temperature().samples()[m_a].sub(&b.temperature().samples()[m_b]);
    let num = hdot(&du, 0.0).unwrap().powi(2) + hdot(&dt, 0.0).unwrap().powi(2);
    let den = hdot(&b.velocity().samples()[m_b], 0.0).unwrap().powi(2)
        + hdot(&b.temperature().samples()[m_b], 0.0).unwrap().powi(2);
    (num / den).sqrt()
}

/// Region membership on integer coordinates `r = ri / d`, `s = si / d`.
fn region_oracle(ri: i64, si: i64, d: i64) -> AdmissibilityCase {
    let half = d; // 1/2 is d / (2d) after doubling
    let (r2, s2) = (2 * ri, 2 * si);
    if s2 < 0 {
        AdmissibilityCase::Inadmissible
    } else if s2 == half {
        if r2 >= half && r2 <= 2 * half {
            AdmissibilityCase::Case2Limit
        } else {
            AdmissibilityCase::Inadmissible
        }
    } else if s2 < half && r2 > half && ri + si >= d && ri + si < 2 * d {
        AdmissibilityCase::Case1
    } else {
        AdmissibilityCase::Inadmissible
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn admissibility_matches_exact_region(ri in 0i64..500, si in 0i64..160, d in prop::sample::select(vec![20i64, 40, 100, 200])) {
        let p = check_admissibility(ri as f64 / d as f64, si as f64 / d as f64);
        prop_assert_eq!(p.case, region_oracle(ri, si, d));
    }
}

#[test]
fn admissibility_boundary_behaviors() {
    use AdmissibilityCase::*;
    assert_eq!(check_admissibility(0.7, 0.3).case, Case1);
    assert_eq!(check_admissibility(1.7, 0.3).case, Inadmissible);
    assert_eq!(check_admissibility(0.5, 0.5).case, Case2Limit);
    assert_eq!(check_admissibility(1.0, 0.5).case, Case2Limit);
    assert_eq!(check_admissibility(1.0 + 1e-6, 0.5).case, Inadmissible);
    assert_eq!(check_admissibility(0.5, 0.49).case, Inadmissible);
}

#[test]
fn energy_norm_of_single_mode_heat_flow() {
    let g = grid(8);
    let mut u0 = SpectralVector::zeros(&g);
    *u0.get_mut(0) = SpectralScalar::single_mode(&g, [0, 2, 1], Complex64::new(0.3, 0.1));
    let (horizon, r) = (0.4, 1.0);
    let k2: f64 = 5.0;
    let traj = boussinesq_mild::heat::Trajectory::heat_flow(&u0, horizon, 64).unwrap();
    let integral = ((1.0 - (-2.0 * horizon * k2).exp()) / (2.0 * k2)).sqrt();
    let want = hnorm(&u0, r) + hdot(&u0, r + 1.0).unwrap() * integral;
    let got = traj_norm_e1(&traj, r).unwrap();
    assert!((got - want).abs() < 1e-3 * want, "{got} vs {want}");
}

#[test]
fn first_iterate_from_pure_temperature_data() {
    // u0 = 0, theta0 one mode with k perpendicular to e3: u^1 = e3 theta_k t e^{-t |k|^2};
    // the quadrature interpolates the forcing linearly, so agreement is second order
    let g = grid(8);
    let mode = [1, 1, 0];
    let amp = Complex64::new(0.2, -0.5);
    let theta0 = SpectralScalar::single_mode(&g, mode, amp);
    let worst = |steps: usize| {
        let e0 = StatePair::heat_flow(&SpectralVector::zeros(&g), &theta0, 0.5, steps).unwrap();
        let e1 = fixed_point_map(&e0, &e0).unwrap();
        assert_eq!(e1.temperature().samples(), e0.temperature().samples());
        (0..=steps)
            .map(|m| {
                let t = e1.velocity().time(m);
                let want = amp * t * (-2.0 * t).exp();
                (e1.velocity().samples()[m].get(2).coeff(mode) - want).norm()
            })
            .fold(0.0, f64::max)
    };
    let (coarse, fine) = (worst(16), worst(32));
    assert!(fine < 1e-3 * amp.norm(), "{fine}");
    assert!((coarse / fine - 4.0).abs() < 0.8, "{coarse} {fine}");
}

#[test]
fn zero_data_converges_immediately() {
    let g = grid(8);
    let cfg = PicardConfig::new(check_admissibility(1.0, 0.3), g.clone(), 0.5, 8).unwrap();
    let (sol, diag) = run_picard(&SpectralVector::zeros(&g), &SpectralScalar::zeros(&g), &cfg).unwrap();
    assert!(sol.is_zero());
    assert_eq!(diag.iterations(), 1);
    assert!(diag.converged && diag.residual_ok && diag.solution_norm_ok);
}

#[test]
fn reference_pure_heat_flow_is_exact() {
    let g = grid(8);
    let (u0, t0) = small_data(&g, 3, 1.0);
    let opts = ReferenceOptions { nonlinear: 0.0, coupling: 0.0, output_every: 1 };
    let run = reference_integrator(&u0, &t0, &g, 0.3, 12, opts).unwrap();
    let exact = StatePair::heat_flow(&u0, &t0, 0.3, 12).unwrap();
    for m in 0..=12 {
        assert!(common::rel_diff(&run.velocity().samples()[m], &exact.velocity().samples()[m]) < 1e-13);
        assert!(common::rel_diff(&run.temperature().samples()[m], &exact.temperature().samples()[m]) < 1e-13);
    }
}

#[test]
fn reference_integrator_is_second_order() {
    let g = grid(8);
    let (u0, t0) = small_data(&g, 5, 2.0);
    let horizon = 0.5;
    let steps = [8usize, 16, 32];
    let errors: Vec<f64> = steps
        .iter()
        .map(|&m| {
            let opts = ReferenceOptions::default();
            let coarse = reference_integrator(&u0, &t0, &g, horizon, m, opts).unwrap();
            let fine = reference_integrator(&u0, &t0, &g, horizon, 16 * m, opts).unwrap();
            rel_l2(&coarse, &fine, m, 16 * m)
        })
        .collect();
    let dts: Vec<f64> = steps.iter().map(|&m| horizon / m as f64).collect();
    let slope = boussinesq_mild::verify::loglog_slope(&dts, &errors).unwrap();
    assert!((slope - 2.0).abs() <= 0.2, "slope {slope}, errors {errors:?}");
}

#[test]
fn navier_stokes_reduction_matches_reference() {
    let g = grid(16);
    let mut u0 = SpectralVector::zeros(&g);
    *u0.get_mut(0) = SpectralScalar::single_mode(&g, [0, 1, 1], Complex64::new(0.05, 0.0));
    *u0.get_mut(1) = SpectralScalar::single_mode(&g, [1, 0, 1], Complex64::new(0.0, 0.04));
    let theta0 = SpectralScalar::zeros(&g);
    let cfg = PicardConfig::new(check_admissibility(1.0, 0.3), g.clone(), 0.25, 32).unwrap();
    let (sol, diag) = run_picard(&u0, &theta0, &cfg).unwrap();
    assert!(diag.converged);
    let opts = ReferenceOptions { output_every: 16, ..Default::default() };
    let reference = reference_integrator(&u0, &theta0, &g, 0.25, 32 * 16, opts).unwrap();
    let err = rel_l2(&sol, &reference, 32, 32);
    assert!(err <= 1e-4, "{err}");
    assert!(sol.temperature().is_zero());
}

#[test]
fn restart_matches_single_interval() {
    let g = grid(16);
    let (u0, t0) = small_data(&g, 11, 0.05);
    let params = check_admissibility(1.0, 0.3);
    let full_cfg = PicardConfig::new(params, g.clone(), 0.25, 32).unwrap();
    let half_cfg = PicardConfig::new(params, g.clone(), 0.125, 16).unwrap();
    let (full, _) = run_picard(&u0, &t0, &full_cfg).unwrap();
    let (first, _) = run_picard(&u0, &t0, &half_cfg).unwrap();
    let (second, _) = run_picard(first.velocity().last(), first.temperature().last(), &half_cfg).unwrap();
    for j in 0..=16 {
        let err = rel_l2(&second, &full, j, 16 + j);
        assert!(err < 1e-6, "sample {j}: {err}");
    }
}

#[test]
fn contraction_signature_and_membership() {
    let g = grid(16);
    let (u0, t0) = small_data(&g, 13, 0.05);
    let params = check_admissibility(1.0, 0.3);
    let sel = select_t0(&u0, &t0, &params, &g, &SelectOptions::default()).unwrap();
    let report = sel.config.conditions.clone().unwrap();
    assert!(report.all_hold());
    let (_, diag) = run_picard(&u0, &t0, &sel.config).unwrap();
    let bound = report.c_l + 6.0 * report.c_b * 3.0 * diag.delta + 0.1;
    assert!(diag.tail_contraction_ratio().unwrap() <= bound);
    assert!(diag.residual_ok && diag.solution_norm_ok);
    assert_eq!(diag.difference_norms.len(), diag.iterations());
    assert_eq!(diag.iterate_norms.len(), diag.iterations() + 1);
    assert!(diag.energy_norms.iter().all(|v| v.is_finite()));
}

#[test]
fn limit_case_solution_has_finite_energy_norms() {
    let g = grid(16);
    let u0 = gen_random_velocity(21, 3.0, &g).scaled(0.05);
    let t0 = gen_random_field(22, 2.1, &g).scaled(0.05);
    for r in [0.5, 1.0] {
        let params = check_admissibility(r, 0.5);
        let sel = select_t0(&u0, &t0, &params, &g, &SelectOptions::default()).unwrap();
        assert!(sel.config.conditions.as_ref().unwrap().tail.as_ref().unwrap().holds);
        let (sol, diag) = run_picard(&u0, &t0, &sel.config).unwrap();
        assert!(diag.converged && diag.residual_ok);
        assert!(traj_norm_e1(sol.velocity(), r).unwrap().is_finite());
        assert!(traj_norm_e2(sol.temperature(), 0.5).unwrap().is_finite());
    }
}

#[test]
fn constants_are_deterministic_and_shrink_with_horizon() {
    let g = grid(8);
    let (u0, t0) = small_data(&g, 17, 0.1);
    let params = check_admissibility(1.0, 0.3);
    let at = |horizon: f64| {
        let cfg = PicardConfig::new(params, g.clone(), horizon, 16).unwrap();
        estimate_constants(&u0, &t0, &cfg, 10, 4).unwrap()
    };
    let (a, b) = (at(0.25), at(0.25));
    assert_eq!((a.c_b, a.c_l, a.delta), (b.c_b, b.c_l, b.delta));
    assert!(at(0.125).c_l < a.c_l);
}

#[test]
fn larger_data_never_gets_a_longer_horizon() {
    let g = grid(8);
    let (u0, t0) = small_data(&g, 19, 1.0);
    let params = check_admissibility(1.0, 0.3);
    let opts = SelectOptions { steps: 16, ..Default::default() };
    let base = select_t0(&u0, &t0, &params, &g, &opts).unwrap().horizon;
    let big = select_t0(&u0.scaled(10.0), &t0.scaled(10.0), &params, &g, &opts).unwrap().horizon;
    assert!(big <= base);
}

#[test]
fn non_convergence_keeps_history() {
    let g = grid(8);
    let (u0, t0) = small_data(&g, 23, 1.0);
    let mut cfg = PicardConfig::new(check_admissibility(1.0, 0.3), g, 0.5, 16).unwrap();
    cfg.max_iter = 2;
    match run_picard(&u0, &t0, &cfg) {
        Err(Error::NotConverged(diag)) => assert_eq!(diag.difference_norms.len(), 2),
        other => panic!("expected non-convergence, got {:?}", other.map(|r| r.1.iterations())),
    }
}
