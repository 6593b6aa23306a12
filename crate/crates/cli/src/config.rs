//! Run configuration: an optional JSON document overlaid by flags.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use boussinesq_mild::picard::{check_admissibility, SobolevParams};
use boussinesq_mild::spectral::{gen_random_field, gen_random_velocity, Grid, SpectralField, SpectralScalar, SpectralVector};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer};

use crate::CliError;

/// Solve horizon: fixed, or chosen by the dyadic ladder search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Horizon {
    Auto,
    Fixed(f64),
}

impl std::str::FromStr for Horizon {
    type Err = String;

    fn from_str(text: &str) -> Result<Self, String> {
        if text.eq_ignore_ascii_case("auto") {
            return Ok(Self::Auto);
        }
        text.parse::<f64>().map(Self::Fixed).map_err(|_| format!("expected a number or \"auto\", got {text:?}"))
    }
}

impl<'de> Deserialize<'de> for Horizon {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(de)? {
            Raw::Number(t) => Ok(Self::Fixed(t)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SingleModeParams {
    /// Integer wave vector of the mode.
    pub mode: [i64; 3],
    pub theta_amplitude: f64,
    /// Velocity along a fixed direction orthogonal to the mode.
    pub u_amplitude: f64,
}

impl Default for SingleModeParams {
    fn default() -> Self {
        Self { mode: [1, 0, 0], theta_amplitude: 0.1, u_amplitude: 0.0 }
    }
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct RandomParams {
    /// Defaults to the run seed.
    pub u_seed: Option<u64>,
    /// Defaults to the run seed plus one.
    pub theta_seed: Option<u64>,
    pub u_slope: Option<f64>,
    pub theta_slope: Option<f64>,
    pub u_scale: Option<f64>,
    pub theta_scale: Option<f64>,
}

/// `{"kind": "single_mode" | "random", "parameters": {...}}`; the parameters
/// may be omitted.
#[derive(Clone, Debug, PartialEq)]
pub enum DataSpec {
    SingleMode(SingleModeParams),
    Random(RandomParams),
}

impl<'de> Deserialize<'de> for DataSpec {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            kind: String,
            #[serde(default)]
            parameters: Option<serde_json::Value>,
        }
        let raw = Raw::deserialize(de)?;
        let params = raw.parameters.unwrap_or_else(|| serde_json::json!({}));
        match raw.kind.as_str() {
            "single_mode" => serde_json::from_value(params).map(Self::SingleMode).map_err(D::Error::custom),
            "random" => serde_json::from_value(params).map(Self::Random).map_err(D::Error::custom),
            other => Err(D::Error::custom(format!("unknown data kind {other:?}, expected single_mode or random"))),
        }
    }
}

impl Default for DataSpec {
    fn default() -> Self {
        Self::Random(RandomParams::default())
    }
}

impl DataSpec {
    pub fn build(&self, grid: &Grid, seed: u64) -> Result<(SpectralVector, SpectralScalar), CliError> {
        match self {
            Self::SingleMode(p) => {
                if p.mode == [0, 0, 0] {
                    return Err(CliError::Usage("single_mode needs a non-zero mode".into()));
                }
                let half = grid.n() as i64 / 2;
                if p.mode.iter().any(|m| 3 * m.abs() >= grid.n() as i64 || *m >= half) {
                    return Err(CliError::Usage(format!("mode {:?} is outside the dealiased band", p.mode)));
                }
                let theta = SpectralScalar::single_mode(grid, p.mode, Complex64::new(p.theta_amplitude, 0.0));
                let dir = orthogonal_direction(p.mode);
                let comps = dir.map(|d| SpectralScalar::single_mode(grid, p.mode, Complex64::new(p.u_amplitude * d, 0.0)));
                let u = SpectralVector::from_components(comps)?;
                Ok((u, theta))
            }
            Self::Random(p) => {
                let u = gen_random_velocity(p.u_seed.unwrap_or(seed), p.u_slope.unwrap_or(3.0), grid)
                    .scaled(p.u_scale.unwrap_or(0.05));
                let theta = gen_random_field(p.theta_seed.unwrap_or(seed.wrapping_add(1)), p.theta_slope.unwrap_or(3.0), grid)
                    .scaled(p.theta_scale.unwrap_or(0.05));
                Ok((u, theta))
            }
        }
    }
}

/// Unit vector orthogonal to `m`: the cross product with the axis least
/// aligned with it.
fn orthogonal_direction(m: [i64; 3]) -> [f64; 3] {
    let m = m.map(|v| v as f64);
    let axis = (0..3).min_by(|&a, &b| m[a].abs().total_cmp(&m[b].abs())).unwrap_or(0);
    let mut e = [0.0; 3];
    e[axis] = 1.0;
    let c = [m[1] * e[2] - m[2] * e[1], m[2] * e[0] - m[0] * e[2], m[0] * e[1] - m[1] * e[0]];
    let len = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
    c.map(|v| v / len)
}

/// The configuration document. Every key is optional; flags win.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub r: Option<f64>,
    pub s: Option<f64>,
    pub n: Option<usize>,
    pub box_length: Option<f64>,
    #[serde(rename = "T")]
    pub horizon: Option<Horizon>,
    pub steps: Option<usize>,
    pub max_iter: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub data: Option<DataSpec>,
    pub output: Option<PathBuf>,
    pub deterministic_reductions: Option<bool>,
    /// Perturbation size of the uniqueness experiment.
    pub eps: Option<f64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
    }

    /// Keys set in `other` replace ours.
    pub fn overlay(mut self, other: RunConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(r, s, n, box_length, horizon, steps, max_iter, tol, seed, trials, data, output, deterministic_reductions, eps);
        self
    }
}

/// Defaults that differ between subcommands.
pub struct Defaults {
    pub r: f64,
    pub s: f64,
    pub trials: usize,
}

/// A validated configuration.
#[derive(Clone, Debug)]
pub struct Settings {
    pub params: SobolevParams,
    pub grid: Grid,
    pub horizon: Horizon,
    pub steps: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
    pub trials: usize,
    pub data: DataSpec,
    pub output: Option<PathBuf>,
    pub deterministic: bool,
    pub eps: f64,
}

impl Settings {
    /// Checks shape and ranges first, admissibility last; nothing is computed
    /// before both pass.
    pub fn resolve(cfg: RunConfig, defaults: Defaults) -> Result<Self, CliError> {
        let n = cfg.n.unwrap_or(16);
        if !n.is_multiple_of(2) {
            return Err(CliError::Usage(format!("n must be even, got {n}")));
        }
        let grid = Grid::new(n, cfg.box_length.unwrap_or(2.0 * PI)).map_err(|e| CliError::Usage(e.to_string()))?;
        let horizon = cfg.horizon.unwrap_or(Horizon::Auto);
        if let Horizon::Fixed(t) = horizon {
            if !(t.is_finite() && t > 0.0) {
                return Err(CliError::Usage(format!("T must be positive, got {t}")));
            }
        }
        let tol = cfg.tol.unwrap_or(1e-10);
        if !(tol.is_finite() && tol > 0.0) {
            return Err(CliError::Usage(format!("tol must be positive, got {tol}")));
        }
        let steps = cfg.steps.unwrap_or(32);
        if steps < 8 {
            return Err(CliError::Usage(format!("steps must be at least 8, got {steps}")));
        }
        let max_iter = cfg.max_iter.unwrap_or(60);
        if max_iter == 0 {
            return Err(CliError::Usage("max_iter must be at least 1".into()));
        }
        let trials = cfg.trials.unwrap_or(defaults.trials);
        if trials == 0 {
            return Err(CliError::Usage("trials must be positive".into()));
        }
        let eps = cfg.eps.unwrap_or(1e-3);
        if !(eps.is_finite() && eps >= 0.0) {
            return Err(CliError::Usage(format!("eps must be >= 0, got {eps}")));
        }
        let (r, s) = (cfg.r.unwrap_or(defaults.r), cfg.s.unwrap_or(defaults.s));
        let params = check_admissibility(r, s);
        if !params.is_admissible() {
            return Err(CliError::Inadmissible { r, s });
        }
        Ok(Self {
            params,
            grid,
            horizon,
            steps,
            max_iter,
            tol,
            seed: cfg.seed.unwrap_or(0),
            trials,
            data: cfg.data.unwrap_or_default(),
            output: cfg.output,
            deterministic: cfg.deterministic_reductions.unwrap_or(false),
            eps,
        })
    }
}
