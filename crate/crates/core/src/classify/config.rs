use serde::{Deserialize, Serialize};

/// Relative thresholds. A residual passes when it is at most the tolerance;
/// every residual is already normalized by `1 + scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Ricci eigenvalues closer than `cluster·(1 + max|λ|)` are merged.
    pub cluster: f64,
    /// Label residual threshold.
    pub label: f64,
    /// `|K̄ − K⊥|` (and `|K − K⊥|`) must exceed `distinct·(1 + |K̄| + |K⊥|)`.
    pub distinct: f64,
    /// Constant-type verdict: `max|L − mean L| ≤ constant·(1 + |mean L|)`.
    pub constant: f64,
    /// Curvature-dependence cutoff for plane pairs, relative to `1 + ‖R‖`.
    pub dep: f64,
    /// Residual threshold for the numeric theorem checks.
    pub check: f64,
}

impl Tolerances {
    /// For metrics with analytic components from the catalog.
    pub const CATALOG: Tolerances = Tolerances {
        cluster: 1e-6,
        label: 1e-8,
        distinct: 1e-6,
        constant: 1e-7,
        dep: 1e-7,
        check: 1e-7,
    };

    /// For user-supplied metric files.
    pub const USER: Tolerances = Tolerances {
        label: 1e-5,
        ..Tolerances::CATALOG
    };

    pub fn validate(&self) -> Result<(), String> {
        let all = [
            ("cluster", self.cluster),
            ("label", self.label),
            ("distinct", self.distinct),
            ("constant", self.constant),
            ("dep", self.dep),
            ("check", self.check),
        ];
        for (name, v) in all {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("tolerance `{name}` must be positive, got {v}"));
            }
        }
        Ok(())
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances::CATALOG
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifyConfig {
    pub tol: Tolerances,
    /// Random planes used to validate the quasi-constant-curvature model;
    /// half as many plane pairs sample the double sectional curvature.
    pub planes: usize,
    pub seed: u64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            tol: Tolerances::CATALOG,
            planes: 200,
            seed: 42,
        }
    }
}

impl ClassifyConfig {
    pub fn with_tolerances(tol: Tolerances) -> Self {
        ClassifyConfig {
            tol,
            ..Default::default()
        }
    }
}
