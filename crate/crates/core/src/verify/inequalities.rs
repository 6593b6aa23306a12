//! Product law, interpolation, embeddings of the energy spaces and the
//! bound on heat flows of the initial data.

use num_complex::Complex64;
use std::time::Instant;

use rand::Rng;

use super::report::{dyadic_ladder, run_trials, EstimateReport, ReportBuilder, VerdictRule, VerifyOptions};
use crate::boussinesq::StatePair;
use crate::error::{Error, Result};
use crate::picard::{SobolevParams, TermSet};
use crate::spectral::{
    dealiased_product, gen_random_field, gen_random_velocity, hdot, hnorm, Grid, SpectralField, SpectralScalar,
};

/// `||theta u||_{\dot H^{-s}} <= C ||theta||_{\dot H^{3/4-s/2}} ||u||_{\dot H^{3/4-s/2}}`
/// over random zero-mean pairs and, when enabled, pairs of equal single
/// modes. The zero mode of the dealiased product is dropped before taking
/// the negative-order norm.
pub fn verify_product_law(s: f64, options: &VerifyOptions) -> Result<EstimateReport> {
    let start = Instant::now();
    if !(0.0..0.5).contains(&s) {
        return Err(Error::BadExponentRange(format!("product law needs 0 <= s < 1/2, got {s}")));
    }
    let grid = options.grid()?;
    let sigma = 0.75 - 0.5 * s;
    let mut pairs: Vec<(SpectralScalar, SpectralScalar)> = (0..options.trials)
        .map(|i| {
            let mut rng = options.trial_rng(20, i);
            let a = gen_random_field(rng.random(), rng.random_range(0.5..3.5), &grid);
            let b = gen_random_field(rng.random(), rng.random_range(0.5..3.5), &grid);
            (a, b)
        })
        .collect();
    if options.probes {
        // the product of a mode with itself stays resolved while 2m is retained
        let one = Complex64::new(1.0, 0.0);
        let retained = (grid.n() as i64 - 1) / 3;
        for m in 1..=retained / 2 {
            let f = SpectralScalar::single_mode(&grid, [m, 0, 0], one);
            pairs.push((f.clone(), f));
        }
    }
    let rows = run_trials(pairs.len(), |i| {
        let (a, b) = &pairs[i];
        if a.is_zero() || b.is_zero() {
            return Ok(None);
        }
        let mut prod = dealiased_product(a, b)?;
        prod.coeffs_mut()[0] = Complex64::default();
        Ok(Some((hdot(&prod, -s)?, hdot(a, sigma)? * hdot(b, sigma)?)))
    })?;
    let mut rep = ReportBuilder::new("product-law", format!("s={s}"), 0.0, VerdictRule::Bounded).since(start);
    for (i, row) in rows.into_iter().enumerate() {
        match row {
            Some((lhs, rhs)) => rep.push(0.0, i, lhs, rhs),
            None => rep.skip(),
        }
    }
    Ok(rep.finish())
}

/// Log-convexity of homogeneous norms:
/// `||f||_{\dot H^{sigma a + (1-sigma) b}} <= ||f||_{\dot H^a}^sigma ||f||_{\dot H^b}^{1-sigma}`
/// with `a, b` uniform in `[-2, 3]`, `sigma` uniform in `[0, 1]` and `f`
/// random, normalized to unit `L^2` norm so that the additive slack is
/// meaningful. Every row above the bound plus slack is a violation.
pub fn verify_interpolation(options: &VerifyOptions) -> Result<EstimateReport> {
    let start = Instant::now();
    let grid = options.grid()?;
    let rows = run_trials(options.trials, |i| {
        let mut rng = options.trial_rng(21, i);
        let f = gen_random_field(rng.random(), rng.random_range(0.0..4.0), &grid);
        let f = f.scaled(1.0 / hdot(&f, 0.0)?);
        let a = rng.random_range(-2.0..3.0);
        let b = rng.random_range(-2.0..3.0);
        let sigma: f64 = rng.random_range(0.0..=1.0);
        let lhs = hdot(&f, sigma * a + (1.0 - sigma) * b)?;
        let rhs = hdot(&f, a)?.powf(sigma) * hdot(&f, b)?.powf(1.0 - sigma);
        Ok((lhs, rhs))
    })?;
    let mut rep = ReportBuilder::new("interpolation", "", 0.0, VerdictRule::Exact).since(start);
    for (i, (lhs, rhs)) in rows.into_iter().enumerate() {
        rep.push(0.0, i, lhs, rhs);
    }
    Ok(rep.finish())
}

fn random_state(options: &VerifyOptions, salt: u64, trial: usize, grid: &Grid, horizon: f64) -> Result<StatePair> {
    let mut rng = options.trial_rng(salt, trial);
    let slope = rng.random_range(0.5..3.5);
    let wu = 10f64.powf(rng.random_range(-1.0..1.0));
    let wt = 10f64.powf(rng.random_range(-1.0..1.0));
    let u = gen_random_velocity(rng.random(), slope, grid).scaled(wu);
    let t = gen_random_field(rng.random(), slope, grid).scaled(wt);
    StatePair::heat_flow(&u, &t, horizon, options.steps)
}

/// Embedding of the limit energy spaces into the fourth-power ones,
/// `||u||_{L^4 \dot H^1} + ||theta||_{L^4 L^2} <= E1(u) + E2(theta)` at
/// `r = s = 1/2`, on heat flows of random data over the scaling ladder.
/// Interpolation and Hoelder give constant one (even for the discrete time
/// norms), so rows above it count as violations.
pub fn verify_embeddings(options: &VerifyOptions) -> Result<EstimateReport> {
    let start = Instant::now();
    let grid = options.grid()?;
    let ladder = dyadic_ladder(1, 10);
    let (small_u, small_t) = (TermSet::limit_velocity(), TermSet::limit_temperature());
    let (big_u, big_t) = (TermSet::energy_velocity(0.5), TermSet::energy_temperature(0.5));
    let rows = run_trials(options.trials, |i| {
        ladder
            .iter()
            .map(|&t| {
                let e = random_state(options, 22, i, &grid, t)?;
                let lhs = small_u.eval(e.velocity())? + small_t.eval(e.temperature())?;
                let rhs = big_u.eval(e.velocity())? + big_t.eval(e.temperature())?;
                Ok((t, lhs, rhs))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut rep = ReportBuilder::new("embeddings", "r=0.5,s=0.5", 0.0, VerdictRule::Exact).since(start);
    for (i, per_t) in rows.into_iter().enumerate() {
        for (t, lhs, rhs) in per_t {
            rep.push(t, i, lhs, rhs);
        }
    }
    Ok(rep.finish())
}

/// `E1(e^{t Laplacian} u0) + E2(e^{t Laplacian} theta0) <= C (||u0||_{H^r} + ||theta0||_{\dot H^{-s}})`
/// over the scaling ladder; a horizon-independent constant is expected.
pub fn verify_initial_data(params: &SobolevParams, options: &VerifyOptions) -> Result<EstimateReport> {
    let start = Instant::now();
    if !params.is_admissible() {
        return Err(Error::Inadmissible { r: params.r, s: params.s });
    }
    let grid = options.grid()?;
    let ladder = dyadic_ladder(1, 10);
    let (r, s) = (params.r, params.s);
    let (nu, nt) = (TermSet::energy_velocity(r), TermSet::energy_temperature(s));
    let rows = run_trials(options.trials, |i| {
        ladder
            .iter()
            .map(|&t| {
                let e = random_state(options, 23, i, &grid, t)?;
                let rhs = hnorm(e.velocity().first(), r) + hdot(e.temperature().first(), -s)?;
                Ok((t, nu.eval(e.velocity())? + nt.eval(e.temperature())?, rhs))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut rep = ReportBuilder::new("initial-data", format!("r={r},s={s}"), 0.0, VerdictRule::Stable).since(start);
    for (i, per_t) in rows.into_iter().enumerate() {
        for (t, lhs, rhs) in per_t {
            rep.push(t, i, lhs, rhs);
        }
    }
    Ok(rep.finish())
}
