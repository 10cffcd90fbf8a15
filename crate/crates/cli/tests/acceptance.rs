//! Criterion: every experiment kind, re-run with identical config and
//! seed, produces byte-identical row CSVs. Exercised through the real
//! binary, plus the exit-code contract.

use std::path::PathBuf;
use std::process::Command;
use std::sync::atomic::{AtomicU64, Ordering};

static DIR_COUNTER: AtomicU64 = AtomicU64::new(0);

fn scratch_dir(tag: &str) -> PathBuf {
    let id = DIR_COUNTER.fetch_add(1, Ordering::Relaxed);
    let dir = std::env::temp_dir().join(format!("polyfloat-acc-{}-{tag}-{id}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn run_cli(kind: &str, config_json: &str, out: &PathBuf) -> std::process::Output {
    let dir = scratch_dir("cfg");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg_path = dir.join("config.json");
    std::fs::write(&cfg_path, config_json).unwrap();
    Command::new(env!("CARGO_BIN_EXE_polyfloat"))
        .args([
            kind,
            "--config",
            cfg_path.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .expect("binary runs")
}

fn tiny_configs() -> Vec<(&'static str, String)> {
    vec![
        (
            "floating-body",
            r#"{"version":1,"kind":"floating-body","dist":{"family":"gaussian","dim":3},
                "p":2.0,"directions":4,"samples":2000,"seed":7}"#
                .to_string(),
        ),
        (
            "inclusion-sweep",
            r#"{"version":1,"kind":"inclusion-sweep","dist":{"family":"gaussian","dim":4},
                "n_vectors":50,"alpha":0.5,"trials":3,"directions":16,"seed":7}"#
                .to_string(),
        ),
        (
            "certify",
            r#"{"version":1,"kind":"certify","dist":{"family":"gaussian","dim":3},
                "n_vectors":30,"alpha":0.5,"trials":2,"directions":5,"threshold":0.4,"seed":7}"#
                .to_string(),
        ),
        (
            "scaling-fit",
            r#"{"version":1,"kind":"scaling-fit","dist":{"family":"stable","params":{"q":1.0},"dim":4},
                "stable_q":1.0,"alpha":0.5,"ratios":[4.0,8.0],"trials":3,"seed":7}"#
                .to_string(),
        ),
        (
            "assumptions",
            r#"{"version":1,"kind":"assumptions","dist":{"family":"gaussian","dim":3},
                "gamma":0.5,"r_moment":2.0,"q_grid":[2.0],"directions":6,"samples":5000,"seed":7}"#
                .to_string(),
        ),
        (
            "nsp",
            r#"{"version":1,"kind":"nsp","dist":{"family":"gaussian","dim":3},
                "n_vectors":5,"sparsity":1,"trials":2,"seed":7}"#
                .to_string(),
        ),
        (
            "recovery",
            r#"{"version":1,"kind":"recovery","dist":{"family":"gaussian","dim":6},
                "n_vectors":10,"sparsity":1,"trials":3,"noise_levels":[0.0,0.1],
                "alpha":0.5,"seed":7}"#
                .to_string(),
        ),
        (
            "domination",
            r#"{"version":1,"kind":"domination","dist":{"family":"gaussian","dim":2},
                "dist_y":{"family":"gaussian","dim":2},"lambda1":1.0,"lambda2":1.0,
                "directions":4,"u_grid":[0.5,1.0],"samples":5000,"seed":7}"#
                .to_string(),
        ),
    ]
}

#[test]
fn acceptance_10_artifact_determinism() {
    let mut pass = true;
    let mut detail = String::new();
    for (kind, cfg) in tiny_configs() {
        let out_a = scratch_dir(&format!("{kind}-a"));
        let out_b = scratch_dir(&format!("{kind}-b"));
        let run_a = run_cli(kind, &cfg, &out_a);
        let run_b = run_cli(kind, &cfg, &out_b);
        if !run_a.status.success() || !run_b.status.success() {
            pass = false;
            detail = format!(
                "{kind}: run failed: {}{}",
                String::from_utf8_lossy(&run_a.stderr),
                String::from_utf8_lossy(&run_b.stderr)
            );
            break;
        }
        for file in ["rows.csv", "summary.json", "manifest.json"] {
            let a = std::fs::read(out_a.join(file)).unwrap();
            let b = std::fs::read(out_b.join(file)).unwrap();
            if a != b {
                pass = false;
                detail = format!("{kind}: {file} differs between identical runs");
                break;
            }
        }
        let _ = std::fs::remove_dir_all(&out_a);
        let _ = std::fs::remove_dir_all(&out_b);
        if !pass {
            break;
        }
    }
    println!(
        "ACCEPTANCE 10 artifact-determinism: {} ({})",
        if pass { "PASS" } else { "FAIL" },
        if detail.is_empty() {
            "8 experiment kinds, byte-identical rows/summary/manifest on re-run"
        } else {
            &detail
        }
    );
    assert!(pass, "{detail}");
}

#[test]
fn seed_override_changes_rows() {
    let (kind, cfg) = &tiny_configs()[1];
    let out_a = scratch_dir("seed-a");
    let out_b = scratch_dir("seed-b");
    let dir = scratch_dir("seed-cfg");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg_path = dir.join("config.json");
    std::fs::write(&cfg_path, cfg).unwrap();
    let base = Command::new(env!("CARGO_BIN_EXE_polyfloat"))
        .args([
            *kind,
            "--config",
            cfg_path.to_str().unwrap(),
            "--out",
            out_a.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    let other = Command::new(env!("CARGO_BIN_EXE_polyfloat"))
        .args([
            *kind,
            "--config",
            cfg_path.to_str().unwrap(),
            "--seed",
            "8",
            "--out",
            out_b.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(base.status.success() && other.status.success());
    let a = std::fs::read(out_a.join("rows.csv")).unwrap();
    let b = std::fs::read(out_b.join("rows.csv")).unwrap();
    assert_ne!(a, b, "different seeds must change the rows");
    let _ = std::fs::remove_dir_all(&out_a);
    let _ = std::fs::remove_dir_all(&out_b);
}

#[test]
fn validation_errors_exit_2() {
    // alpha out of range.
    let cfg = r#"{"version":1,"kind":"inclusion-sweep","dist":{"family":"gaussian","dim":4},
        "n_vectors":50,"alpha":1.2,"trials":3,"directions":16,"seed":7}"#;
    let out = scratch_dir("val");
    let result = run_cli("inclusion-sweep", cfg, &out);
    assert_eq!(result.status.code(), Some(2), "{result:?}");

    // Unknown config field (fail-closed schema).
    let cfg = r#"{"version":1,"kind":"nsp","dist":{"family":"gaussian","dim":3},
        "n_vectors":5,"sparsity":1,"trials":1,"seed":7,"zzz":1}"#;
    let out = scratch_dir("unknown");
    let result = run_cli("nsp", cfg, &out);
    assert_eq!(result.status.code(), Some(2), "{result:?}");

    // Kind mismatch between command line and config.
    let cfg = r#"{"version":1,"kind":"nsp","dist":{"family":"gaussian","dim":3},
        "n_vectors":5,"sparsity":1,"trials":1,"seed":7}"#;
    let out = scratch_dir("mismatch");
    let result = run_cli("recovery", cfg, &out);
    assert_eq!(result.status.code(), Some(2), "{result:?}");
}

#[test]
fn budget_refusal_exits_3() {
    let cfg = r#"{"version":1,"kind":"nsp","dist":{"family":"gaussian","dim":6},
        "n_vectors":30,"sparsity":10,"trials":1,"lp_budget":500,"seed":7}"#;
    let out = scratch_dir("budget");
    let result = run_cli("nsp", cfg, &out);
    assert_eq!(result.status.code(), Some(3), "{result:?}");
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.contains("budget"), "stderr: {stderr}");
}

#[test]
fn summary_numbers_recompute_from_rows() {
    // The inclusion-sweep pass rate must equal the fraction of true rows.
    let (kind, cfg) = &tiny_configs()[1];
    let out = scratch_dir("recompute");
    let result = run_cli(kind, cfg, &out);
    assert!(result.status.success());
    let rows = std::fs::read_to_string(out.join("rows.csv")).unwrap();
    let passes = rows
        .lines()
        .skip(1)
        .filter(|l| l.ends_with(",true"))
        .count();
    let total = rows.lines().skip(1).count();
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    let rate = summary["pass_rate"].as_f64().unwrap();
    assert!((rate - passes as f64 / total as f64).abs() < 1e-12);
    let _ = std::fs::remove_dir_all(&out);
}
