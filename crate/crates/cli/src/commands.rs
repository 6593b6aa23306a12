//! Subcommand bodies. Runtime goes to stderr only, so the files they write
//! depend on nothing but the configuration.

use std::f64::consts::PI;
use std::path::Path;
use std::time::Instant;

use boussinesq_mild::boussinesq::StatePair;
use boussinesq_mild::picard::{
    check_admissibility, estimate_constants, fixed_point_map, run_picard, select_t0, tail_certificate,
    AdmissibilityCase, LadderProbe, PicardConfig, PicardDiagnostics, SelectOptions, WorkingNorm,
};
use boussinesq_mild::spectral::{hdot, hnorm, set_deterministic_reductions, SpectralScalar, SpectralVector};
use boussinesq_mild::uniqueness::perturbation_experiment;
use boussinesq_mild::verify::{
    lemma_suite, standard_params, verify_all, verify_duhamel_bounds, verify_embeddings, verify_heat_smoothing,
    verify_initial_data, verify_interpolation, verify_product_law, verify_split_bound, verify_t_scaling,
    EstimateReport, EstimateSpec, ScalingEstimate, VerifyOptions, SPLIT_EPSILONS,
};
use boussinesq_mild::Error;
use serde_json::{json, Value};

use crate::config::{Defaults, Horizon, RunConfig, Settings};
use crate::output::{num, summary_path, write_csv, write_summary};
use crate::CliError;

/// Names accepted by `verify --estimate`, besides the scaling labels.
pub const ESTIMATE_LABELS: [&str; 10] = [
    "heat-smoothing",
    "duhamel-1",
    "duhamel-2",
    "duhamel-3",
    "split",
    "product-law",
    "interpolation",
    "embeddings",
    "initial-data",
    "lemmas",
];

fn case_name(case: AdmissibilityCase) -> &'static str {
    match case {
        AdmissibilityCase::Case1 => "Case1",
        AdmissibilityCase::Case2Limit => "Case2Limit",
        AdmissibilityCase::Inadmissible => "Inadmissible",
    }
}

pub fn admissibility(r: f64, s: f64, as_json: bool) -> Result<(), CliError> {
    let p = check_admissibility(r, s);
    let estimates: Vec<Value> = ScalingEstimate::ALL
        .into_iter()
        .filter(|e| e.applies_to(&p))
        .map(|e| json!({"name": e.label(), "expected_alpha": e.expected_exponent(r, s)}))
        .collect();
    let working = WorkingNorm::for_params(&p).ok().map(|w| w.kind);
    if as_json {
        let doc = json!({
            "r": r,
            "s": s,
            "case": case_name(p.case),
            "admissible": p.is_admissible(),
            "working_norm": working,
            "linear_exponent": p.linear_exponent(),
            "bilinear_exponent": p.bilinear_exponent(),
            "estimates": estimates,
        });
        println!("{}", serde_json::to_string_pretty(&doc).expect("plain values serialize"));
    } else {
        println!("(r, s) = ({r}, {s}): {}", case_name(p.case));
        if let Some(k) = working {
            println!("working norm: {k:?}");
        }
        if let (Some(a), Some(b)) = (p.linear_exponent(), p.bilinear_exponent()) {
            println!("buoyancy exponent (2 - (r + s)) / 2 = {a}");
            println!("transport exponent -s/4 + 1/8 = {b}");
        }
        for e in &estimates {
            println!("estimate {} expects T^{}", e["name"].as_str().unwrap_or(""), e["expected_alpha"]);
        }
    }
    if p.is_admissible() {
        Ok(())
    } else {
        Err(CliError::Inadmissible { r, s })
    }
}

/// Picard config for the settings: ladder search for `T = auto`, otherwise
/// the given horizon with freshly measured constants.
fn prepare(
    st: &Settings,
    u0: &SpectralVector,
    theta0: &SpectralScalar,
) -> Result<(PicardConfig, Option<Vec<LadderProbe>>), CliError> {
    match st.horizon {
        Horizon::Auto => {
            let opts = SelectOptions { steps: st.steps, trials: st.trials, seed: st.seed, max_iter: st.max_iter, tol: st.tol };
            let sel = select_t0(u0, theta0, &st.params, &st.grid, &opts)?;
            Ok((sel.config, Some(sel.trace)))
        }
        Horizon::Fixed(t) => {
            let mut config = PicardConfig::new(st.params, st.grid.clone(), t, st.steps)?;
            config.max_iter = st.max_iter;
            config.tol = st.tol;
            let mut report = estimate_constants(u0, theta0, &config, st.trials, st.seed)?;
            if st.params.case == AdmissibilityCase::Case2Limit {
                report.tail = Some(tail_certificate(u0, theta0, &st.params, t, report.c_b)?);
            }
            config.conditions = Some(report);
            Ok((config, None))
        }
    }
}

fn run_header(command: &str, st: &Settings, config: &PicardConfig, ladder: &Option<Vec<LadderProbe>>) -> serde_json::Map<String, Value> {
    let cond = config.conditions.as_ref();
    let mut m = serde_json::Map::new();
    m.insert("command".into(), json!(command));
    m.insert("r".into(), json!(st.params.r));
    m.insert("s".into(), json!(st.params.s));
    m.insert("case".into(), json!(case_name(st.params.case)));
    m.insert("n".into(), json!(st.grid.n()));
    m.insert("box_length".into(), json!(st.grid.box_length()));
    m.insert("steps".into(), json!(config.steps));
    m.insert("seed".into(), json!(st.seed));
    m.insert("T_mode".into(), json!(if ladder.is_some() { "auto" } else { "fixed" }));
    m.insert("T0".into(), json!(config.horizon));
    m.insert("C_B".into(), json!(cond.map(|c| c.c_b)));
    m.insert("C_L".into(), json!(cond.map(|c| c.c_l)));
    m.insert("conditions".into(), json!(cond));
    if let Some(trace) = ladder {
        m.insert("ladder".into(), json!(trace));
    }
    m
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum SolveView {
    /// Norm time series of the solution.
    Series,
    /// One row per Picard iteration.
    Iterations,
}

fn iteration_rows(d: &PicardDiagnostics) -> Vec<Vec<String>> {
    let mut rows = vec![vec!["0".into(), num(d.iterate_norms[0]), String::new(), String::new()]];
    for (k, diff) in d.difference_norms.iter().enumerate() {
        let ratio = match k {
            0 => String::new(),
            _ => num(diff / d.difference_norms[k - 1]),
        };
        rows.push(vec![(k + 1).to_string(), num(d.iterate_norms[k + 1]), num(*diff), ratio]);
    }
    rows
}

fn series_rows(st: &Settings, sol: &StatePair, e0: &StatePair) -> Result<Vec<Vec<String>>, CliError> {
    let (r, s) = (st.params.r, st.params.s);
    let defect = sol.sub(&fixed_point_map(e0, sol)?)?;
    let count = if sol.is_zero() { 1 } else { sol.steps() + 1 };
    let dt = sol.dt();
    let (mut sup_u, mut sup_t, mut int_u, mut int_t) = (0.0f64, 0.0f64, 0.0, 0.0);
    let mut prev: Option<(f64, f64)> = None;
    let mut rows = Vec::with_capacity(count);
    for m in 0..count {
        let u = &sol.velocity().samples()[m];
        let theta = &sol.temperature().samples()[m];
        let hr_u = hnorm(u, r);
        let h_rp1 = hdot(u, r + 1.0)?;
        let h_ms = hdot(theta, -s)?;
        let h_1ms = hdot(theta, 1.0 - s)?;
        sup_u = sup_u.max(hr_u);
        sup_t = sup_t.max(h_ms);
        if let Some((pu, pt)) = prev {
            int_u += 0.5 * dt * (pu * pu + h_rp1 * h_rp1);
            int_t += 0.5 * dt * (pt * pt + h_1ms * h_1ms);
        }
        prev = Some((h_rp1, h_1ms));
        let residual = hnorm(&defect.velocity().samples()[m], r) + hdot(&defect.temperature().samples()[m], -s)?;
        rows.push(vec![
            num(m as f64 * dt),
            num(hr_u),
            num(h_rp1),
            num(h_ms),
            num(h_1ms),
            num(sup_u + int_u.sqrt()),
            num(sup_t + int_t.sqrt()),
            num(residual),
        ]);
    }
    Ok(rows)
}

const SERIES_HEADER: [&str; 8] =
    ["t", "Hr_u", "Hdot_rp1_u", "Hdot_ms_theta", "Hdot_1ms_theta", "E1_running", "E2_running", "residual"];
const ITERATION_HEADER: [&str; 4] = ["iteration", "iterate_norm", "difference_norm", "contraction_ratio"];

fn diagnostics_fields(m: &mut serde_json::Map<String, Value>, d: &PicardDiagnostics) {
    m.insert("iterations".into(), json!(d.iterations()));
    m.insert("converged".into(), json!(d.converged));
    m.insert("delta".into(), json!(d.delta));
    m.insert("tail_contraction_ratio".into(), json!(d.tail_contraction_ratio()));
    m.insert("diagnostics".into(), json!(d));
}

pub fn solve(cfg: RunConfig, summary: Option<&Path>, view: SolveView) -> Result<(), CliError> {
    let st = Settings::resolve(cfg, Defaults { r: 1.0, s: 0.3, trials: 10 })?;
    set_deterministic_reductions(st.deterministic);
    let start = Instant::now();
    let (u0, theta0) = st.data.build(&st.grid, st.seed)?;
    let (config, ladder) = prepare(&st, &u0, &theta0)?;
    let command = if view == SolveView::Series { "solve" } else { "picard-diagnostics" };
    let mut head = run_header(command, &st, &config, &ladder);
    let csv_path = st.output.as_deref();
    let json_path = summary_path(summary, csv_path);

    let (sol, diag) = match run_picard(&u0, &theta0, &config) {
        Ok(v) => v,
        Err(Error::NotConverged(d)) => {
            if view == SolveView::Iterations {
                write_csv(csv_path, &ITERATION_HEADER, &iteration_rows(&d))?;
            }
            diagnostics_fields(&mut head, &d);
            write_summary(json_path.as_deref(), &Value::Object(head))?;
            return Err(CliError::NotConverged(format!(
                "Picard iteration did not converge after {} iterations; diagnostics written",
                d.iterations()
            )));
        }
        Err(e) => return Err(e.into()),
    };
    match view {
        SolveView::Series => {
            let e0 = StatePair::heat_flow(&u0, &theta0, config.horizon, config.steps)?;
            write_csv(csv_path, &SERIES_HEADER, &series_rows(&st, &sol, &e0)?)?;
        }
        SolveView::Iterations => write_csv(csv_path, &ITERATION_HEADER, &iteration_rows(&diag))?,
    }
    diagnostics_fields(&mut head, &diag);
    write_summary(json_path.as_deref(), &Value::Object(head))?;
    eprintln!("T0 = {}, {} iterations, runtime {:.2} s", config.horizon, diag.iterations(), start.elapsed().as_secs_f64());
    Ok(())
}

fn verify_reports(
    label: &str,
    st: &Settings,
    pinned: bool,
    opts: &VerifyOptions,
    s1: Option<f64>,
    s2: Option<f64>,
) -> Result<Vec<EstimateReport>, CliError> {
    let (r, s) = (st.params.r, st.params.s);
    if let Some(est) = ScalingEstimate::from_label(label) {
        let params = if pinned {
            vec![st.params]
        } else {
            standard_params().into_iter().filter(|p| est.applies_to(p)).collect()
        };
        return params
            .into_iter()
            .map(|p| Ok(verify_t_scaling(&EstimateSpec::new(est, p, opts.clone())?)?))
            .collect();
    }
    let one = |rep: boussinesq_mild::Result<EstimateReport>| -> Result<Vec<EstimateReport>, CliError> { Ok(vec![rep?]) };
    match label.to_ascii_lowercase().as_str() {
        "heat-smoothing" => one(verify_heat_smoothing(s1.unwrap_or(-s), s2.unwrap_or(r + s), opts)),
        "duhamel-1" => one(verify_duhamel_bounds(1, s1.unwrap_or(0.0), s2.unwrap_or(0.0), opts)),
        "duhamel-2" => one(verify_duhamel_bounds(2, s1.unwrap_or(0.0), s2.unwrap_or(0.0), opts)),
        "duhamel-3" => one(verify_duhamel_bounds(3, s1.unwrap_or(-0.5), s2.unwrap_or(1.5), opts)),
        "split" => one(verify_split_bound(s1.unwrap_or(0.5), s2.unwrap_or(1.0), &SPLIT_EPSILONS, opts)),
        "product-law" => one(verify_product_law(s, opts)),
        "interpolation" => one(verify_interpolation(opts)),
        "embeddings" => one(verify_embeddings(opts)),
        "initial-data" => one(verify_initial_data(&st.params, opts)),
        "lemmas" => Ok(lemma_suite(opts)?),
        _ => {
            let scaling: Vec<&str> = ScalingEstimate::ALL.iter().map(|e| e.label()).collect();
            Err(CliError::Usage(format!(
                "unknown estimate {label:?}; expected one of {}, {}",
                ESTIMATE_LABELS.join(", "),
                scaling.join(", ")
            )))
        }
    }
}

pub fn verify(
    cfg: RunConfig,
    summary: Option<&Path>,
    selection: Option<Vec<String>>,
    s1: Option<f64>,
    s2: Option<f64>,
) -> Result<(), CliError> {
    let pinned = cfg.r.is_some() || cfg.s.is_some();
    if cfg.box_length.is_some_and(|l| (l - 2.0 * PI).abs() > 1e-12) {
        return Err(CliError::Usage("the verifiers run on the 2 pi box only".into()));
    }
    let st = Settings::resolve(cfg, Defaults { r: 1.0, s: 0.3, trials: 20 })?;
    set_deterministic_reductions(st.deterministic);
    let start = Instant::now();
    let opts = VerifyOptions { n: st.grid.n(), steps: st.steps, trials: st.trials, seed: st.seed, probes: true };
    let reports = match &selection {
        None => verify_all(&opts)?,
        Some(labels) => {
            let mut out = Vec::new();
            for label in labels {
                out.extend(verify_reports(label, &st, pinned, &opts, s1, s2)?);
            }
            out
        }
    };

    let mut rows = Vec::new();
    for rep in &reports {
        for row in &rep.rows {
            rows.push(vec![
                rep.name.clone(),
                rep.instance.clone(),
                num(row.t),
                row.trial.to_string(),
                num(row.lhs),
                num(row.rhs),
                num(row.ratio),
                num(rep.expected_alpha),
                num(rep.envelope_constant),
            ]);
        }
    }
    let header = ["name", "instance", "T", "trial", "lhs", "rhs", "ratio", "expected_alpha", "envelope"];
    let csv_path = st.output.as_deref();
    write_csv(csv_path, &header, &rows)?;

    let entries: Vec<Value> = reports
        .iter()
        .map(|r| {
            json!({
                "name": r.name,
                "instance": r.instance,
                "expected_alpha": r.expected_alpha,
                "rule": r.rule,
                "envelope_constant": r.envelope_constant,
                "fitted_slope": r.fitted_slope,
                "stability": r.stability,
                "skipped": r.skipped,
                "violations": r.violations,
                "verdict": r.verdict,
                "ladder": r.ladder,
            })
        })
        .collect();
    let passed = reports.iter().filter(|r| r.verdict).count();
    let doc = json!({
        "command": "verify",
        "n": opts.n,
        "steps": opts.steps,
        "trials": opts.trials,
        "seed": opts.seed,
        "passed": passed,
        "total": reports.len(),
        "reports": entries,
    });
    write_summary(summary_path(summary, csv_path).as_deref(), &doc)?;
    for r in &reports {
        eprintln!("{}", r.summary());
    }
    eprintln!("{passed} of {} passed, runtime {:.2} s", reports.len(), start.elapsed().as_secs_f64());
    Ok(())
}

pub fn uniqueness(cfg: RunConfig, summary: Option<&Path>) -> Result<(), CliError> {
    let st = Settings::resolve(cfg, Defaults { r: 0.5, s: 0.5, trials: 10 })?;
    if st.params.case != AdmissibilityCase::Case2Limit {
        return Err(CliError::Usage(format!(
            "uniqueness experiments need s = 1/2 and 1/2 <= r <= 1, got ({}, {})",
            st.params.r, st.params.s
        )));
    }
    set_deterministic_reductions(st.deterministic);
    let start = Instant::now();
    let (u0, theta0) = st.data.build(&st.grid, st.seed)?;
    let (config, ladder) = prepare(&st, &u0, &theta0)?;
    let mut head = run_header("uniqueness", &st, &config, &ladder);
    head.insert("eps".into(), json!(st.eps));
    let csv_path = st.output.as_deref();
    let json_path = summary_path(summary, csv_path);

    let rep = match perturbation_experiment(&u0, &theta0, st.eps, &config, st.seed) {
        Ok(rep) => rep,
        Err(Error::NotConverged(d)) => {
            diagnostics_fields(&mut head, &d);
            write_summary(json_path.as_deref(), &Value::Object(head))?;
            return Err(CliError::NotConverged(format!(
                "Picard iteration did not converge after {} iterations; diagnostics written",
                d.iterations()
            )));
        }
        Err(e) => return Err(e.into()),
    };
    let t = &rep.trace;
    let g = &rep.gronwall;
    let rows: Vec<Vec<String>> = (0..t.times.len())
        .map(|m| {
            vec![num(t.times[m]), num(t.e1[m]), num(t.e2[m]), num(t.n[m]), num(t.gronwall_coeff[m]), num(g.bound[m])]
        })
        .collect();
    write_csv(csv_path, &["t", "E1", "E2", "N", "gronwall_coeff", "bound"], &rows)?;

    head.insert("fitted_C".into(), json!(g.fitted_c));
    head.insert("verdict".into(), json!(if g.verdict { "pass" } else { "fail" }));
    head.insert("zero_start".into(), json!(g.zero_start));
    head.insert("max_N".into(), json!(g.max_n));
    head.insert("differential_ratio".into(), json!(g.differential_ratio));
    head.insert("continuity_constant".into(), json!(rep.continuity_constant));
    head.insert("hypotheses".into(), json!(rep.hypotheses));
    head.insert("iterations".into(), json!([rep.diagnostics[0].iterations(), rep.diagnostics[1].iterations()]));
    head.insert("converged".into(), json!(rep.diagnostics.iter().all(|d| d.converged)));
    write_summary(json_path.as_deref(), &Value::Object(head))?;
    eprintln!(
        "fitted_C = {}, verdict {}, runtime {:.2} s",
        g.fitted_c,
        if g.verdict { "pass" } else { "fail" },
        start.elapsed().as_secs_f64()
    );
    Ok(())
}
