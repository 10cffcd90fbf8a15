//! Experiment configuration: a versioned JSON schema, fail-closed against
//! unknown fields so that recorded experiments stay auditable.

use serde::{Deserialize, Serialize};

use polyfloat_core::l1opt::Tolerances;
use polyfloat_core::samplers::DistributionSpec;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    FloatingBody,
    InclusionSweep,
    Certify,
    ScalingFit,
    Assumptions,
    Nsp,
    Recovery,
    Domination,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::FloatingBody => "floating-body",
            ExperimentKind::InclusionSweep => "inclusion-sweep",
            ExperimentKind::Certify => "certify",
            ExperimentKind::ScalingFit => "scaling-fit",
            ExperimentKind::Assumptions => "assumptions",
            ExperimentKind::Nsp => "nsp",
            ExperimentKind::Recovery => "recovery",
            ExperimentKind::Domination => "domination",
        }
    }

    pub fn parse(s: &str) -> Option<ExperimentKind> {
        serde_json::from_value(serde_json::Value::String(s.to_string())).ok()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HullKind {
    Absconv,
    OneSided,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    /// Normalized Gaussian direction, scaled to the requested norm.
    Isotropic,
    /// A fixed direction (the first measurement axis), scaled likewise.
    Adversarial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecoveryModeKind {
    Blind,
    /// Inequality-constrained with eta equal to the true noise norm.
    Informed,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolerancesConfig {
    pub feas: f64,
    pub dual: f64,
    pub gap: f64,
}

impl TolerancesConfig {
    pub fn to_tolerances(self) -> Tolerances {
        Tolerances {
            feas: self.feas,
            dual: self.dual,
            gap: self.gap,
        }
    }
}

/// One experiment: which module to drive and with what parameters.
/// Fields irrelevant to the chosen kind must be absent; validation is
/// per-kind and fail-closed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub kind: ExperimentKind,
    pub dist: DistributionSpec,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dist_y: Option<DistributionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_vectors: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directions: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hull: Option<HullKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sparsity: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_levels: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_kind: Option<NoiseKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recovery_mode: Option<RecoveryModeKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratios: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stable_q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_moment: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lp_budget: Option<u64>,
    /// Working-norm exponent for the assumptions kind (default 2.0).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub working_norm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<TolerancesConfig>,
}

pub struct ValidationError {
    /// `field: message` pairs.
    pub issues: Vec<String>,
}

impl std::fmt::Display for ValidationError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for issue in &self.issues {
            writeln!(f, "config error: {issue}")?;
        }
        Ok(())
    }
}

impl ExperimentConfig {
    pub fn tolerances(&self) -> Tolerances {
        self.tolerances
            .map(TolerancesConfig::to_tolerances)
            .unwrap_or_default()
    }

    /// The working level: explicit `p`, or the rule `p = alpha log(eN/n)`.
    pub fn resolved_p(&self) -> Option<f64> {
        match (self.p, self.alpha, self.n_vectors) {
            (Some(p), None, _) => Some(p),
            (None, Some(alpha), Some(n_vectors)) => {
                Some(alpha * (std::f64::consts::E * n_vectors as f64 / self.dist.dim as f64).ln())
            }
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        let mut issues = Vec::new();
        if self.version != SCHEMA_VERSION {
            issues.push(format!(
                "version: expected {SCHEMA_VERSION}, got {}",
                self.version
            ));
        }
        if let Err(e) = self.dist.validate() {
            issues.push(format!("dist: {e}"));
        }
        if let Some(ref y) = self.dist_y {
            if let Err(e) = y.validate() {
                issues.push(format!("dist_y: {e}"));
            }
        }
        if let Some(alpha) = self.alpha {
            if !(alpha > 0.0 && alpha < 1.0) {
                issues.push(format!("alpha: must lie in (0, 1), got {alpha}"));
            }
            if self.p.is_some() {
                issues.push("p: give either p or alpha, not both".into());
            }
            // Scaling-fit applies alpha per ratio; everywhere else the
            // rule p = alpha log(eN/n) needs N.
            if self.kind != ExperimentKind::ScalingFit && self.n_vectors.is_none() {
                issues.push("n_vectors: required when alpha drives the level rule".into());
            }
        }
        if let Some(p) = self.p {
            if !(p > 0.0) {
                issues.push(format!("p: must be positive, got {p}"));
            }
        }
        for (name, value) in [
            ("trials", self.trials),
            ("directions", self.directions),
            ("samples", self.samples),
            ("n_vectors", self.n_vectors),
        ] {
            if value == Some(0) {
                issues.push(format!("{name}: must be positive"));
            }
        }

        let need = |cond: bool, field: &str, issues: &mut Vec<String>| {
            if !cond {
                issues.push(format!("{field}: required for kind {}", self.kind.as_str()));
            }
        };
        match self.kind {
            ExperimentKind::FloatingBody => {
                need(self.directions.is_some(), "directions", &mut issues);
                need(self.samples.is_some(), "samples", &mut issues);
                need(
                    self.resolved_p().is_some(),
                    "p (or alpha + n_vectors)",
                    &mut issues,
                );
            }
            ExperimentKind::InclusionSweep | ExperimentKind::Certify => {
                need(self.n_vectors.is_some(), "n_vectors", &mut issues);
                need(self.trials.is_some(), "trials", &mut issues);
                need(self.directions.is_some(), "directions", &mut issues);
                need(
                    self.resolved_p().is_some(),
                    "p (or alpha + n_vectors)",
                    &mut issues,
                );
            }
            ExperimentKind::ScalingFit => {
                need(self.ratios.is_some(), "ratios", &mut issues);
                need(self.stable_q.is_some(), "stable_q", &mut issues);
                need(self.alpha.is_some(), "alpha", &mut issues);
                need(self.trials.is_some(), "trials", &mut issues);
                if let Some(ref ratios) = self.ratios {
                    if ratios.len() < 2 {
                        issues.push("ratios: need at least two values".into());
                    }
                }
            }
            ExperimentKind::Assumptions => {
                need(self.gamma.is_some(), "gamma", &mut issues);
                need(self.r_moment.is_some(), "r_moment", &mut issues);
                need(self.directions.is_some(), "directions", &mut issues);
                need(self.samples.is_some(), "samples", &mut issues);
            }
            ExperimentKind::Nsp => {
                need(self.n_vectors.is_some(), "n_vectors", &mut issues);
                need(self.sparsity.is_some(), "sparsity", &mut issues);
                need(self.trials.is_some(), "trials", &mut issues);
            }
            ExperimentKind::Recovery => {
                need(self.n_vectors.is_some(), "n_vectors", &mut issues);
                need(self.sparsity.is_some(), "sparsity", &mut issues);
                need(self.trials.is_some(), "trials", &mut issues);
                need(self.noise_levels.is_some(), "noise_levels", &mut issues);
            }
            ExperimentKind::Domination => {
                need(self.dist_y.is_some(), "dist_y", &mut issues);
                need(self.lambda1.is_some(), "lambda1", &mut issues);
                need(self.lambda2.is_some(), "lambda2", &mut issues);
                need(self.directions.is_some(), "directions", &mut issues);
                need(self.u_grid.is_some(), "u_grid", &mut issues);
                need(self.samples.is_some(), "samples", &mut issues);
            }
        }
        if let Some(l1) = self.lambda1 {
            if !(l1 > 0.0 && l1 <= 1.0) {
                issues.push(format!("lambda1: must lie in (0, 1], got {l1}"));
            }
        }
        if let Some(l2) = self.lambda2 {
            if !(l2 > 0.0) {
                issues.push(format!("lambda2: must be positive, got {l2}"));
            }
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(ValidationError { issues })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_sweep() -> ExperimentConfig {
        serde_json::from_str(
            r#"{
                "version": 1,
                "kind": "inclusion-sweep",
                "dist": {"family": "gaussian", "dim": 20},
                "n_vectors": 2000,
                "alpha": 0.5,
                "trials": 50,
                "directions": 1000,
                "seed": 1
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn round_trip_preserves_config() {
        let cfg = minimal_sweep();
        let json = serde_json::to_string(&cfg).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let bad = r#"{
            "version": 1,
            "kind": "nsp",
            "dist": {"family": "gaussian", "dim": 4},
            "seed": 1,
            "n_vectors": 8,
            "sparsity": 1,
            "trials": 1,
            "surprise": true
        }"#;
        assert!(serde_json::from_str::<ExperimentConfig>(bad).is_err());
    }

    #[test]
    fn level_rule_is_exact() {
        let cfg = minimal_sweep();
        let expected = 0.5 * (std::f64::consts::E * 2000.0 / 20.0).ln();
        assert_eq!(cfg.resolved_p(), Some(expected));
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn alpha_out_of_range_rejected() {
        let mut cfg = minimal_sweep();
        cfg.alpha = Some(1.2);
        let err = cfg.validate().unwrap_err();
        assert!(err.issues.iter().any(|i| i.starts_with("alpha")));
    }
}
