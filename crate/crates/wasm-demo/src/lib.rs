//! Browser bindings: the admissibility map, a small Picard solve with its
//! contraction history, and the norm curves of an exact single-mode flow.
//!
//! Results cross the boundary as flat `f64`/`u8` arrays or short JSON
//! strings, so the page needs no glue beyond the generated module.

use boussinesq_mild::picard::{check_admissibility, run_picard, AdmissibilityCase, PicardConfig};
use boussinesq_mild::spectral::{gen_random_field, gen_random_velocity, hdot, hnorm, Grid, SpectralField, SpectralScalar};
use boussinesq_mild::Error;
use num_complex::Complex64;
use wasm_bindgen::prelude::*;

/// Case codes of [`admissibility_map`].
pub const INADMISSIBLE: u8 = 0;
pub const CASE1: u8 = 1;
pub const CASE2_LIMIT: u8 = 2;

fn code(case: AdmissibilityCase) -> u8 {
    match case {
        AdmissibilityCase::Inadmissible => INADMISSIBLE,
        AdmissibilityCase::Case1 => CASE1,
        AdmissibilityCase::Case2Limit => CASE2_LIMIT,
    }
}

/// Row-major `rows x cols` classification of `r` in `[r_lo, r_hi]` (columns)
/// and `s` in `[s_lo, s_hi]` (rows, top row is `s_hi`).
#[wasm_bindgen]
pub fn admissibility_map(cols: usize, rows: usize, r_lo: f64, r_hi: f64, s_lo: f64, s_hi: f64) -> Vec<u8> {
    let at = |lo: f64, hi: f64, i: usize, count: usize| {
        if count < 2 { lo } else { lo + (hi - lo) * i as f64 / (count - 1) as f64 }
    };
    let mut out = Vec::with_capacity(rows * cols);
    for j in 0..rows {
        let s = at(s_hi, s_lo, j, rows);
        for i in 0..cols {
            out.push(code(check_admissibility(at(r_lo, r_hi, i, cols), s).case));
        }
    }
    out
}

/// One-line verdict for `(r, s)`.
#[wasm_bindgen]
pub fn classify(r: f64, s: f64) -> String {
    let p = check_admissibility(r, s);
    let name = match p.case {
        AdmissibilityCase::Case1 => "energy case",
        AdmissibilityCase::Case2Limit => "limit case s = 1/2",
        AdmissibilityCase::Inadmissible => "not admissible",
    };
    match (p.linear_exponent(), p.bilinear_exponent()) {
        (Some(a), Some(b)) => format!("({r:.3}, {s:.3}): {name}; buoyancy gains T^{a:.3}, transport T^{b:.3}"),
        _ => format!("({r:.3}, {s:.3}): {name}"),
    }
}

/// Picard iteration on an 8^3 grid for random data of the given size.
///
/// Returns `[converged (0/1), delta, d_1, d_2, ...]` with `d_k` the working
/// norm of successive differences; errors become a JS exception.
#[wasm_bindgen]
pub fn picard_history(r: f64, s: f64, scale: f64, horizon: f64, seed: u32) -> Result<Vec<f64>, JsError> {
    picard_history_impl(r, s, scale, horizon, seed as u64).map_err(|e| JsError::new(&e.to_string()))
}

fn picard_history_impl(r: f64, s: f64, scale: f64, horizon: f64, seed: u64) -> Result<Vec<f64>, Error> {
    let grid = Grid::periodic(8)?;
    let u0 = gen_random_velocity(seed, 3.0, &grid).scaled(scale);
    let theta0 = gen_random_field(seed + 1, 3.0, &grid).scaled(scale);
    let mut config = PicardConfig::new(check_admissibility(r, s), grid, horizon, 16)?;
    config.max_iter = 40;
    let diag = match run_picard(&u0, &theta0, &config) {
        Ok((_, d)) => d,
        Err(Error::NotConverged(d)) => *d,
        Err(e) => return Err(e),
    };
    let mut out = vec![if diag.converged { 1.0 } else { 0.0 }, diag.delta];
    out.extend(diag.difference_norms.iter().map(|d| if d.is_finite() { *d } else { f64::MAX }));
    Ok(out)
}

/// Exact flow from `theta0 = amplitude cos(m x)`, `u0 = 0`: the temperature
/// decays as `e^{-m^2 t}` and drives `u = t e^{-m^2 t} theta0 e_3`.
///
/// Returns `samples + 1` rows of `[t, ||u||_{H^r}, ||theta||_{\dot H^{-s}}]`,
/// flattened, computed from the spectral fields.
#[wasm_bindgen]
pub fn single_mode_curves(m: i32, amplitude: f64, r: f64, s: f64, horizon: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    single_mode_impl(m, amplitude, r, s, horizon, samples).map_err(|e| JsError::new(&e.to_string()))
}

fn single_mode_impl(m: i32, amplitude: f64, r: f64, s: f64, horizon: f64, samples: usize) -> Result<Vec<f64>, Error> {
    if !(1..=2).contains(&m) {
        return Err(Error::InvalidConfig(format!("mode must be 1 or 2 on the demo grid, got {m}")));
    }
    let grid = Grid::periodic(8)?;
    let theta0 = SpectralScalar::single_mode(&grid, [m as i64, 0, 0], Complex64::new(0.5 * amplitude, 0.0));
    let k2 = (m * m) as f64;
    let samples = samples.max(1);
    let mut out = Vec::with_capacity(3 * (samples + 1));
    for j in 0..=samples {
        let t = horizon * j as f64 / samples as f64;
        let theta = theta0.scaled((-k2 * t).exp());
        // u = t theta e3 is already solenoidal since the mode is horizontal
        let u_norm = t * hnorm(&theta, r);
        out.extend([t, u_norm, hdot(&theta, -s)?]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_marks_the_regions() {
        let map = admissibility_map(3, 3, 0.4, 1.6, 0.0, 0.5);
        // top row s = 0.5: r = 0.4 outside, r = 1.0 limit, r = 1.6 outside
        assert_eq!(&map[0..3], &[INADMISSIBLE, CASE2_LIMIT, INADMISSIBLE]);
        // middle row s = 0.25: r = 1.0 energy case
        assert_eq!(map[4], CASE1);
        assert!(classify(1.0, 0.3).contains("T^0.350"));
    }

    #[test]
    fn small_data_converges() {
        let h = picard_history_impl(1.0, 0.3, 0.05, 0.25, 3).unwrap();
        assert_eq!(h[0], 1.0);
        assert!(h.len() > 3);
        assert!(h[h.len() - 1] < 1e-6 * h[1]);
    }

    #[test]
    fn inadmissible_pair_is_an_error() {
        assert!(picard_history_impl(1.9, 0.4, 0.05, 0.25, 3).is_err());
    }

    #[test]
    fn single_mode_curves_match_formula() {
        let (amp, r, s) = (0.4, 1.0, 0.3);
        let c = single_mode_impl(1, amp, r, s, 1.0, 4).unwrap();
        let base = ((2.0 * std::f64::consts::PI).powi(3) * 2.0 * (0.5 * amp) * (0.5 * amp)).sqrt();
        for row in c.chunks(3) {
            let t = row[0];
            assert!((row[2] - (-t).exp() * base).abs() < 1e-12 * base);
            assert!((row[1] - t * (-t).exp() * 2f64.powf(r / 2.0) * base).abs() < 1e-12 * base);
        }
    }
}
