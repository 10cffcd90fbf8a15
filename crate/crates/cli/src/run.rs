//! Experiment runners: one per kind, all deterministic in (config, seed).
//!
//! Every stream is derived from the master seed, a trial index, and a
//! purpose tag, so trial-level parallelism cannot change any emitted
//! number; rows are collected in index order and written by one writer.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::{json, Value};

use polyfloat_core::bodies::closed_form_floating_body;
use polyfloat_core::error::Error as CoreError;
use polyfloat_core::floating::{
    axis_directions, estimate_floating_body, uniform_direction_pairs, uniform_directions,
};
use polyfloat_core::inclusion::{
    boundary_sweep, certify_points, scaling_exponent_fit, HullVariant,
};
use polyfloat_core::mat::norm2;
use polyfloat_core::recovery::{
    nsp_constant, run_recovery_trial, RecoveryMode, DEFAULT_NSP_BUDGET,
};
use polyfloat_core::rng::derive_stream;
use polyfloat_core::samplers::sample_matrix;
use polyfloat_core::{assumptions, StarBody};

use crate::config::{
    ExperimentConfig, ExperimentKind, HullKind, NoiseKind, RecoveryModeKind, SCHEMA_VERSION,
};

#[derive(Debug)]
pub enum RunError {
    /// Config semantics problems: exit code 2.
    Validation(String),
    /// Explicit budget refusals, surfaced verbatim: exit code 3.
    Budget(String),
    /// Everything else: exit code 1.
    Failure(String),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Validation(m) => write!(f, "validation error: {m}"),
            RunError::Budget(m) => write!(f, "budget refusal: {m}"),
            RunError::Failure(m) => write!(f, "{m}"),
        }
    }
}

fn lift(err: CoreError) -> RunError {
    match err {
        CoreError::BudgetExceeded { .. } | CoreError::SizeBudget { .. } => {
            RunError::Budget(err.to_string())
        }
        CoreError::Solver(_) => RunError::Failure(err.to_string()),
        other => RunError::Validation(other.to_string()),
    }
}

pub struct RunOutcome {
    pub out_dir: PathBuf,
    pub files: Vec<String>,
}

struct Csv {
    text: String,
}

impl Csv {
    fn new(header: &[&str]) -> Self {
        Csv {
            text: format!("{}\n", header.join(",")),
        }
    }

    fn push(&mut self, fields: &[String]) {
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }
}

fn f(x: f64) -> String {
    x.to_string()
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

fn hull_variant(kind: Option<HullKind>) -> HullVariant {
    match kind {
        Some(HullKind::OneSided) => HullVariant::OneSided,
        _ => HullVariant::Absconv,
    }
}

/// Execute the experiment and write `rows.csv`, `summary.json`,
/// `manifest.json` (plus kind-specific extras) under `out_dir`.
pub fn run(config: &ExperimentConfig, out_dir: &Path) -> Result<RunOutcome, RunError> {
    config
        .validate()
        .map_err(|e| RunError::Validation(e.to_string()))?;
    let (rows, summary, extras) = match config.kind {
        ExperimentKind::FloatingBody => run_floating_body(config)?,
        ExperimentKind::InclusionSweep => run_inclusion_sweep(config)?,
        ExperimentKind::Certify => run_certify(config)?,
        ExperimentKind::ScalingFit => run_scaling_fit(config)?,
        ExperimentKind::Assumptions => run_assumptions(config)?,
        ExperimentKind::Nsp => run_nsp(config)?,
        ExperimentKind::Recovery => run_recovery(config)?,
        ExperimentKind::Domination => run_domination(config)?,
    };

    fs::create_dir_all(out_dir)
        .map_err(|e| RunError::Failure(format!("cannot create {}: {e}", out_dir.display())))?;
    let mut files = vec!["rows.csv".to_string(), "summary.json".to_string()];
    let write = |name: &str, bytes: &[u8]| -> Result<(), RunError> {
        fs::write(out_dir.join(name), bytes)
            .map_err(|e| RunError::Failure(format!("cannot write {name}: {e}")))
    };
    write("rows.csv", rows.text.as_bytes())?;
    let summary_text =
        serde_json::to_string_pretty(&summary).map_err(|e| RunError::Failure(e.to_string()))?;
    write("summary.json", summary_text.as_bytes())?;
    for (name, bytes) in &extras {
        write(name, bytes)?;
        files.push(name.clone());
    }
    files.push("manifest.json".to_string());
    let canonical = serde_json::to_string(config).map_err(|e| RunError::Failure(e.to_string()))?;
    let manifest = json!({
        "schema_version": SCHEMA_VERSION,
        "kind": config.kind.as_str(),
        "seed": config.seed,
        "config_hash": format!("{:016x}", fnv1a64(canonical.as_bytes())),
        "tool_version": env!("CARGO_PKG_VERSION"),
        "files": files,
    });
    let manifest_text =
        serde_json::to_string_pretty(&manifest).map_err(|e| RunError::Failure(e.to_string()))?;
    write("manifest.json", manifest_text.as_bytes())?;
    Ok(RunOutcome {
        out_dir: out_dir.to_path_buf(),
        files,
    })
}

type KindOutput = (Csv, Value, Vec<(String, Vec<u8>)>);

fn run_floating_body(cfg: &ExperimentConfig) -> Result<KindOutput, RunError> {
    let p = cfg.resolved_p().expect("validated");
    let pairs = cfg.directions.expect("validated");
    let m = cfg.samples.expect("validated");
    let dirs = uniform_direction_pairs(cfg.dist.dim, pairs, derive_stream(cfg.seed, 0, "fb-dirs"));
    let est = estimate_floating_body(
        &cfg.dist,
        p,
        &dirs,
        m,
        derive_stream(cfg.seed, 0, "fb-body"),
    )
    .map_err(lift)?;
    let mut header: Vec<String> = vec!["dir_index".into()];
    header.extend((1..=cfg.dist.dim).map(|i| format!("theta_{i}")));
    header.extend(["r", "ci_lo", "ci_hi"].map(String::from));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut rows = Csv::new(&header_refs);
    let table = est.body.table().expect("empirical body");
    for (idx, ((theta, r), rad)) in table.iter().zip(&est.radials).enumerate() {
        let mut fields = vec![idx.to_string()];
        fields.extend(theta.iter().map(|x| f(*x)));
        fields.push(f(*r));
        fields.push(f(rad.ci_lo));
        fields.push(f(rad.ci_hi));
        rows.push(&fields);
    }
    let values: Vec<f64> = est.radials.iter().map(|r| r.value).collect();
    let summary = json!({
        "directions": values.len(),
        "p": p,
        "samples": m,
        "min_radial": values.iter().cloned().fold(f64::INFINITY, f64::min),
        "max_radial": values.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        "mean_radial": values.iter().sum::<f64>() / values.len() as f64,
    });
    let mut body_csv = Vec::new();
    est.write_csv(&mut body_csv)
        .map_err(|e| RunError::Failure(e.to_string()))?;
    Ok((rows, summary, vec![("body.csv".to_string(), body_csv)]))
}

fn closed_form_body(cfg: &ExperimentConfig, p: f64) -> Result<StarBody, RunError> {
    Ok(closed_form_floating_body(&cfg.dist, p).map_err(lift)?.body)
}

fn run_inclusion_sweep(cfg: &ExperimentConfig) -> Result<KindOutput, RunError> {
    let p = cfg.resolved_p().expect("validated");
    let n_vectors = cfg.n_vectors.expect("validated");
    let trials = cfg.trials.expect("validated");
    let m_dirs = cfg.directions.expect("validated");
    let threshold = cfg.threshold.unwrap_or(0.5);
    let hull = hull_variant(cfg.hull);
    let body = closed_form_body(cfg, p)?;
    let reports: Vec<_> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let gamma = sample_matrix(
                &cfg.dist,
                n_vectors,
                derive_stream(cfg.seed, trial, "sweep-matrix"),
            )?;
            boundary_sweep(
                &gamma,
                &body,
                m_dirs,
                threshold,
                derive_stream(cfg.seed, trial, "sweep-dirs"),
                hull,
            )
        })
        .collect::<Result<_, _>>()
        .map_err(lift)?;
    let mut rows = Csv::new(&[
        "trial",
        "seed",
        "n",
        "n_vectors",
        "p",
        "c",
        "min_sup_norm",
        "pass",
    ]);
    for (trial, rep) in reports.iter().enumerate() {
        rows.push(&[
            trial.to_string(),
            cfg.seed.to_string(),
            cfg.dist.dim.to_string(),
            n_vectors.to_string(),
            f(p),
            f(threshold),
            f(rep.min_sup_norm.unwrap_or(f64::NAN)),
            rep.pass.to_string(),
        ]);
    }
    let passes = reports.iter().filter(|r| r.pass).count();
    let summary = json!({
        "trials": trials,
        "p": p,
        "threshold": threshold,
        "pass_rate": passes as f64 / trials as f64,
        "worst_min_sup_norm": reports
            .iter()
            .filter_map(|r| r.min_sup_norm)
            .fold(f64::INFINITY, f64::min),
    });
    Ok((rows, summary, Vec::new()))
}

fn run_certify(cfg: &ExperimentConfig) -> Result<KindOutput, RunError> {
    let p = cfg.resolved_p().expect("validated");
    let n_vectors = cfg.n_vectors.expect("validated");
    let trials = cfg.trials.expect("validated");
    let m_dirs = cfg.directions.expect("validated");
    let scale = cfg.threshold.unwrap_or(0.5);
    let hull = hull_variant(cfg.hull);
    let tol = cfg.tolerances();
    let body = closed_form_body(cfg, p)?;
    let reports: Vec<_> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let gamma = sample_matrix(
                &cfg.dist,
                n_vectors,
                derive_stream(cfg.seed, trial, "certify-matrix"),
            )?;
            certify_points(
                &gamma,
                &body,
                scale,
                m_dirs,
                derive_stream(cfg.seed, trial, "certify-dirs"),
                hull,
                &tol,
            )
        })
        .collect::<Result<_, _>>()
        .map_err(lift)?;
    let mut rows = Csv::new(&[
        "trial",
        "seed",
        "n",
        "n_vectors",
        "p",
        "c",
        "points",
        "failures",
        "max_quotient",
        "pass",
    ]);
    for (trial, rep) in reports.iter().enumerate() {
        rows.push(&[
            trial.to_string(),
            cfg.seed.to_string(),
            cfg.dist.dim.to_string(),
            n_vectors.to_string(),
            f(p),
            f(scale),
            rep.directions_sampled.to_string(),
            rep.failures.len().to_string(),
            f(rep.max_quotient.unwrap_or(f64::NAN)),
            rep.pass.to_string(),
        ]);
    }
    let passes = reports.iter().filter(|r| r.pass).count();
    let summary = json!({
        "trials": trials,
        "p": p,
        "scale": scale,
        "pass_rate": passes as f64 / trials as f64,
        "max_quotient": reports
            .iter()
            .filter_map(|r| r.max_quotient)
            .fold(0.0f64, f64::max),
    });
    Ok((rows, summary, Vec::new()))
}

fn run_scaling_fit(cfg: &ExperimentConfig) -> Result<KindOutput, RunError> {
    let fit = scaling_exponent_fit(
        cfg.stable_q.expect("validated"),
        cfg.alpha.expect("validated"),
        cfg.ratios.as_ref().expect("validated"),
        cfg.dist.dim,
        cfg.trials.expect("validated"),
        derive_stream(cfg.seed, 0, "scaling"),
        &cfg.tolerances(),
    )
    .map_err(lift)?;
    let mut rows = Csv::new(&[
        "ratio",
        "n_vectors",
        "p",
        "polar_radius",
        "trial",
        "critical_scale",
    ]);
    for cal in &fit.calibrations {
        for (trial, crit) in cal.critical.iter().enumerate() {
            rows.push(&[
                f(cal.ratio),
                cal.n_vectors.to_string(),
                f(cal.p),
                f(cal.polar_radius),
                trial.to_string(),
                f(*crit),
            ]);
        }
    }
    let summary = json!({
        "slope": fit.slope,
        "intercept": fit.intercept,
        "monotone": fit.monotone,
        "residuals": fit.residuals,
        "c_star": fit
            .calibrations
            .iter()
            .map(|c| json!({"ratio": c.ratio, "c_star": c.c_star}))
            .collect::<Vec<_>>(),
    });
    Ok((rows, summary, Vec::new()))
}

fn run_assumptions(cfg: &ExperimentConfig) -> Result<KindOutput, RunError> {
    let m = cfg.samples.expect("validated");
    let gamma = cfg.gamma.expect("validated");
    let r_moment = cfg.r_moment.expect("validated");
    let norm_q = cfg.working_norm.unwrap_or(2.0);
    // Default grid: uniform sphere directions plus the signed axes (the
    // axes are extremal for unconditional laws).
    let mut dirs = uniform_directions(
        cfg.dist.dim,
        cfg.directions.expect("validated"),
        derive_stream(cfg.seed, 0, "as-dirs"),
    );
    dirs.extend(axis_directions(cfg.dist.dim));
    let sb = assumptions::estimate_small_ball(
        &cfg.dist,
        norm_q,
        gamma,
        &dirs,
        m,
        derive_stream(cfg.seed, 1, "as-smallball"),
    )
    .map_err(lift)?;
    let lr = assumptions::estimate_lr(
        &cfg.dist,
        norm_q,
        r_moment,
        &dirs,
        m,
        derive_stream(cfg.seed, 2, "as-lr"),
    )
    .map_err(lift)?;
    let reg = match &cfg.q_grid {
        None => None,
        Some(grid) => Some(
            assumptions::regularity_constant(
                &cfg.dist,
                grid,
                &dirs,
                m,
                derive_stream(cfg.seed, 3, "as-regularity"),
            )
            .map_err(lift)?,
        ),
    };

    let grid_len = cfg.q_grid.as_ref().map_or(0, Vec::len);
    let mut header = vec![
        "dir_index".to_string(),
        "small_ball".into(),
        "lr_norm".into(),
    ];
    if let Some(grid) = &cfg.q_grid {
        header.extend(grid.iter().map(|q| format!("regularity_q{q}")));
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut rows = Csv::new(&header_refs);
    for idx in 0..dirs.len() {
        let mut fields = vec![
            idx.to_string(),
            f(sb.per_direction[idx]),
            f(lr.per_direction[idx]),
        ];
        if let Some(reg) = &reg {
            for qi in 0..grid_len {
                fields.push(f(reg.ratios[idx * grid_len + qi]));
            }
        }
        rows.push(&fields);
    }
    let summary = json!({
        "gamma": gamma,
        "working_norm": norm_q,
        "delta_hat": sb.delta_hat,
        "delta_half_width": sb.half_width,
        "r": r_moment,
        "l_hat": lr.l_hat,
        "d_hat": reg.as_ref().map(|r| r.d_hat),
        "directions": dirs.len(),
        "samples": m,
    });
    Ok((rows, summary, Vec::new()))
}

fn run_nsp(cfg: &ExperimentConfig) -> Result<KindOutput, RunError> {
    let n_vectors = cfg.n_vectors.expect("validated");
    let s = cfg.sparsity.expect("validated");
    let trials = cfg.trials.expect("validated");
    let budget = cfg.lp_budget.unwrap_or(DEFAULT_NSP_BUDGET);
    let mut rows = Csv::new(&["trial", "rho", "kernel_dim", "lp_count"]);
    let mut finite_max = 0.0f64;
    let mut below_one = 0usize;
    let mut infinite = 0usize;
    for trial in 0..trials as u64 {
        let gamma = sample_matrix(
            &cfg.dist,
            n_vectors,
            derive_stream(cfg.seed, trial, "nsp-matrix"),
        )
        .map_err(lift)?;
        let rep = nsp_constant(&gamma.design(), s, budget).map_err(lift)?;
        if rep.rho.is_finite() {
            finite_max = finite_max.max(rep.rho);
            if rep.rho < 1.0 {
                below_one += 1;
            }
        } else {
            infinite += 1;
        }
        rows.push(&[
            trial.to_string(),
            f(rep.rho),
            rep.kernel_dim.to_string(),
            rep.lp_count.to_string(),
        ]);
    }
    let summary = json!({
        "trials": trials,
        "sparsity": s,
        "frac_rho_below_one": below_one as f64 / trials as f64,
        "max_finite_rho": finite_max,
        "infinite_rho_trials": infinite,
    });
    Ok((rows, summary, Vec::new()))
}

fn run_recovery(cfg: &ExperimentConfig) -> Result<KindOutput, RunError> {
    let n_vectors = cfg.n_vectors.expect("validated");
    let s = cfg.sparsity.expect("validated");
    let trials = cfg.trials.expect("validated");
    let levels = cfg.noise_levels.clone().expect("validated");
    let noise_kind = cfg.noise_kind.unwrap_or(NoiseKind::Isotropic);
    let mode_kind = cfg.recovery_mode.unwrap_or(RecoveryModeKind::Blind);
    let tol = cfg.tolerances();
    let dim = cfg.dist.dim;
    // Gauge body, when the family has a closed form at a resolvable level.
    let body = cfg
        .resolved_p()
        .and_then(|p| closed_form_floating_body(&cfg.dist, p).ok())
        .map(|b| b.body);

    let trial_rows: Vec<Vec<Vec<String>>> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| -> Result<Vec<Vec<String>>, CoreError> {
            let gamma = sample_matrix(
                &cfg.dist,
                n_vectors,
                derive_stream(cfg.seed, trial, "rec-matrix"),
            )?;
            let a = gamma.design();
            let mut rng = derive_stream(cfg.seed, trial, "rec-signal").rng();
            let mut x = vec![0.0; n_vectors];
            let mut placed = 0usize;
            while placed < s.min(n_vectors) {
                let idx = (rng.next_u64() % n_vectors as u64) as usize;
                if x[idx] == 0.0 {
                    x[idx] = rng.normal();
                    placed += 1;
                }
            }
            let mut out = Vec::with_capacity(levels.len());
            for (li, &level) in levels.iter().enumerate() {
                let w: Vec<f64> = match noise_kind {
                    _ if level == 0.0 => vec![0.0; dim],
                    NoiseKind::Isotropic => {
                        let mut rng_w =
                            derive_stream(cfg.seed, trial, &format!("rec-noise-{li}")).rng();
                        let mut w: Vec<f64> = (0..dim).map(|_| rng_w.normal()).collect();
                        let scale = level / norm2(&w);
                        w.iter_mut().for_each(|v| *v *= scale);
                        w
                    }
                    NoiseKind::Adversarial => {
                        let mut w = vec![0.0; dim];
                        w[0] = level;
                        w
                    }
                };
                let mode = match mode_kind {
                    RecoveryModeKind::Blind => RecoveryMode::Blind,
                    RecoveryModeKind::Informed => RecoveryMode::Informed { eta: level },
                };
                let rep = run_recovery_trial(&a, &x, &w, mode, s, body.as_ref(), None, &tol)?;
                let bound_proxy = rep.sigma_s + level * (s as f64 / dim as f64).sqrt();
                out.push(vec![
                    trial.to_string(),
                    li.to_string(),
                    f(level),
                    f(rep.err_l1),
                    f(rep.sigma_s),
                    rep.noise_gauge.map(f).unwrap_or_default(),
                    rep.empirical_c.map(f).unwrap_or_default(),
                    if bound_proxy > 0.0 {
                        f(rep.err_l1 / bound_proxy)
                    } else {
                        String::new()
                    },
                    format!("{:?}", rep.solver_status),
                ]);
            }
            Ok(out)
        })
        .collect::<Result<_, _>>()
        .map_err(lift)?;

    let mut rows = Csv::new(&[
        "trial",
        "noise_index",
        "noise_l2",
        "err_l1",
        "sigma_s",
        "noise_gauge",
        "empirical_c",
        "err_over_bound",
        "status",
    ]);
    for trial in &trial_rows {
        for row in trial {
            rows.push(row);
        }
    }
    let mut per_level = Vec::new();
    for (li, &level) in levels.iter().enumerate() {
        let mut errs: Vec<f64> = trial_rows
            .iter()
            .map(|t| t[li][3].parse::<f64>().unwrap())
            .collect();
        errs.sort_unstable_by(f64::total_cmp);
        let median = errs[errs.len() / 2];
        let mut ratios: Vec<f64> = trial_rows
            .iter()
            .filter_map(|t| t[li][7].parse::<f64>().ok())
            .collect();
        ratios.sort_unstable_by(f64::total_cmp);
        let p95 = if ratios.is_empty() {
            None
        } else {
            let idx = ((0.95 * ratios.len() as f64).ceil() as usize).clamp(1, ratios.len());
            Some(ratios[idx - 1])
        };
        per_level.push(json!({
            "noise_l2": level,
            "median_err": median,
            "p95_err_over_bound": p95,
        }));
    }
    let summary = json!({
        "trials": trials,
        "sparsity": s,
        "mode": mode_kind,
        "levels": per_level,
    });
    Ok((rows, summary, Vec::new()))
}

fn run_domination(cfg: &ExperimentConfig) -> Result<KindOutput, RunError> {
    let dirs = uniform_directions(
        cfg.dist.dim,
        cfg.directions.expect("validated"),
        derive_stream(cfg.seed, 0, "dom-dirs"),
    );
    let report = assumptions::domination_check(
        &cfg.dist,
        cfg.dist_y.as_ref().expect("validated"),
        cfg.lambda1.expect("validated"),
        cfg.lambda2.expect("validated"),
        &dirs,
        cfg.u_grid.as_ref().expect("validated"),
        cfg.samples.expect("validated"),
        derive_stream(cfg.seed, 1, "dom-check"),
    )
    .map_err(lift)?;
    let mut rows = Csv::new(&[
        "dir_index",
        "u",
        "p_x",
        "p_y",
        "margin",
        "confident_violation",
    ]);
    for cell in &report.cells {
        rows.push(&[
            cell.direction.to_string(),
            f(cell.u),
            f(cell.p_x),
            f(cell.p_y),
            f(cell.margin),
            cell.confident.to_string(),
        ]);
    }
    let summary = json!({
        "cells": report.cells.len(),
        "confident_violations": report.confident_violations,
        "half_width": report.half_width,
    });
    Ok((rows, summary, Vec::new()))
}
