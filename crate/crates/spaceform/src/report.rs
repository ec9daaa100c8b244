//! Machine-readable outcomes: named checks with residuals, and the per-trial
//! report emitted by every randomized suite.

use serde::{Deserialize, Serialize};

use crate::algebra::SpaceFormKind;
use crate::frenet::CurvatureProfile;
use crate::geodesic::BundleKind;

/// The fixed registry of check names. Reports never invent names outside
/// this list, so downstream tooling can key on them.
pub mod checks {
    pub const TABLE16: &str = "table16";
    pub const TABLE20: &str = "table20";
    pub const IDENTITIES21: &str = "identities21";
    pub const PROP31_SQUARED: &str = "prop31_squared";
    pub const PROP31_UNSQUARED: &str = "prop31_unsquared";
    pub const T_CUBIC: &str = "t_cubic";
    pub const LEMMA11: &str = "lemma11";
    pub const LEMMA12: &str = "lemma12";
    pub const LEMMA13: &str = "lemma13";
    pub const EQ6: &str = "eq6";
    pub const EQ10: &str = "eq10";
    pub const EQ14: &str = "eq14";
    pub const VANISHING_TAIL: &str = "vanishing_tail";
    pub const CONSTANCY: &str = "constancy";
    pub const RANK_BOUND: &str = "rank_bound";
    pub const CONSERVATION: &str = "conservation";
    pub const ODE_VS_CLOSED_FORM: &str = "ode_vs_closed_form";

    pub const ALL: &[&str] = &[
        TABLE16,
        TABLE20,
        IDENTITIES21,
        PROP31_SQUARED,
        PROP31_UNSQUARED,
        T_CUBIC,
        LEMMA11,
        LEMMA12,
        LEMMA13,
        EQ6,
        EQ10,
        EQ14,
        VANISHING_TAIL,
        CONSTANCY,
        RANK_BOUND,
        CONSERVATION,
        ODE_VS_CLOSED_FORM,
    ];
}

/// One named check: `pass` holds exactly when `residual` is within the
/// tolerance the check was configured with.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub residual: f64,
    pub pass: bool,
}

impl CheckResult {
    pub fn new(name: &str, residual: f64, tol: f64) -> Self {
        debug_assert!(checks::ALL.contains(&name), "unregistered check {name}");
        Self {
            name: name.to_string(),
            residual,
            pass: residual <= tol,
        }
    }
}

/// Outcome of one randomized trial.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialReport {
    pub trial_id: usize,
    pub kind: SpaceFormKind,
    pub bundle: Option<BundleKind>,
    pub dim: usize,
    pub curvature: f64,
    pub rho: Option<f64>,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub profile: Option<CurvatureProfile>,
}

impl TrialReport {
    /// Whether the trial passes.
    ///
    /// Every check must pass except the quintic tail-coefficient pair
    /// (`prop31_squared` / `prop31_unsquared`): the two candidate
    /// coefficients are mutually exclusive on generic data, so the pair
    /// counts as satisfied when at least one variant holds; both residuals
    /// stay in the report to document which one it was.
    pub fn all_pass(&self) -> bool {
        let mut squared: Option<bool> = None;
        let mut unsquared: Option<bool> = None;
        let mut rest = true;
        for c in &self.checks {
            match c.name.as_str() {
                checks::PROP31_SQUARED => squared = Some(c.pass),
                checks::PROP31_UNSQUARED => unsquared = Some(c.pass),
                _ => rest &= c.pass,
            }
        }
        let pair = match (squared, unsquared) {
            (None, None) => true,
            (a, b) => a.unwrap_or(false) || b.unwrap_or(false),
        };
        rest && pair
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(checks: Vec<CheckResult>) -> TrialReport {
        TrialReport {
            trial_id: 0,
            kind: SpaceFormKind::Quaternionic,
            bundle: None,
            dim: 8,
            curvature: 1.0,
            rho: None,
            seed: 0,
            checks,
            profile: None,
        }
    }

    #[test]
    fn variant_pair_counts_as_at_least_one() {
        let r = report(vec![
            CheckResult::new(checks::PROP31_SQUARED, 1e-14, 1e-10),
            CheckResult::new(checks::PROP31_UNSQUARED, 0.3, 1e-10),
            CheckResult::new(checks::TABLE20, 1e-15, 1e-10),
        ]);
        assert!(r.all_pass());
        let r = report(vec![
            CheckResult::new(checks::PROP31_SQUARED, 0.5, 1e-10),
            CheckResult::new(checks::PROP31_UNSQUARED, 0.3, 1e-10),
        ]);
        assert!(!r.all_pass());
    }

    #[test]
    fn ordinary_check_failure_fails_the_trial() {
        let r = report(vec![CheckResult::new(checks::TABLE20, 1e-3, 1e-10)]);
        assert!(!r.all_pass());
    }
}
