use std::path::PathBuf;
use std::process::ExitCode;

use polyfloat_cli::config::{ExperimentConfig, ExperimentKind};
use polyfloat_cli::run::{run, RunError};

const USAGE: &str =
    "usage: polyfloat <experiment-kind> --config FILE [--seed S] [--jobs J] [--out DIR]

experiment kinds: floating-body | inclusion-sweep | certify | scaling-fit |
                  assumptions | nsp | recovery | domination

exit codes: 0 success, 2 validation error, 3 budget refusal";

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(RunError::Validation(msg)) => {
            eprintln!("validation error: {msg}");
            ExitCode::from(2)
        }
        Err(RunError::Budget(msg)) => {
            eprintln!("budget refusal: {msg}");
            ExitCode::from(3)
        }
        Err(RunError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

fn real_main() -> Result<(), RunError> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() || args[0] == "--help" || args[0] == "-h" {
        println!("{USAGE}");
        return if args.is_empty() {
            Err(RunError::Validation("missing experiment kind".into()))
        } else {
            Ok(())
        };
    }
    let kind = ExperimentKind::parse(&args[0]).ok_or_else(|| {
        RunError::Validation(format!("unknown experiment kind '{}'\n{USAGE}", args[0]))
    })?;

    let mut config_path: Option<PathBuf> = None;
    let mut seed_override: Option<u64> = None;
    let mut jobs: Option<usize> = None;
    let mut out_override: Option<PathBuf> = None;
    let mut it = args[1..].iter();
    while let Some(flag) = it.next() {
        let mut value = |name: &str| -> Result<String, RunError> {
            it.next()
                .cloned()
                .ok_or_else(|| RunError::Validation(format!("{name} needs a value\n{USAGE}")))
        };
        match flag.as_str() {
            "--config" => config_path = Some(PathBuf::from(value("--config")?)),
            "--seed" => {
                seed_override = Some(
                    value("--seed")?
                        .parse()
                        .map_err(|e| RunError::Validation(format!("--seed: {e}")))?,
                )
            }
            "--jobs" => {
                jobs = Some(
                    value("--jobs")?
                        .parse()
                        .map_err(|e| RunError::Validation(format!("--jobs: {e}")))?,
                )
            }
            "--out" => out_override = Some(PathBuf::from(value("--out")?)),
            other => {
                return Err(RunError::Validation(format!(
                    "unknown flag '{other}'\n{USAGE}"
                )))
            }
        }
    }
    let config_path = config_path
        .ok_or_else(|| RunError::Validation(format!("--config is required\n{USAGE}")))?;
    let text = std::fs::read_to_string(&config_path)
        .map_err(|e| RunError::Validation(format!("cannot read {}: {e}", config_path.display())))?;
    let mut config: ExperimentConfig = serde_json::from_str(&text)
        .map_err(|e| RunError::Validation(format!("{}: {e}", config_path.display())))?;
    if config.kind != kind {
        return Err(RunError::Validation(format!(
            "kind mismatch: command line says '{}', config says '{}'",
            kind.as_str(),
            config.kind.as_str()
        )));
    }
    if let Some(seed) = seed_override {
        config.seed = seed;
    }
    if let Some(j) = jobs {
        // Ignore the error if a pool already exists (repeated invocation
        // inside one process, e.g. tests).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global();
    }
    let out_dir = out_override
        .or_else(|| config.out_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(format!("out-{}", config.kind.as_str())));

    let outcome = run(&config, &out_dir)?;
    println!(
        "wrote {} to {}",
        outcome.files.join(", "),
        outcome.out_dir.display()
    );
    Ok(())
}
