//! Tri-state rules turning a truncated sequence into evidence for or against
//! an infinite-index condition. Every rule is a pure function of the sequence
//! and the configuration.

use serde::{Deserialize, Serialize};

/// Relative slack for "non-increasing" comparisons, absorbing roundoff.
const MONOTONE_SLACK: f64 = 1e-12;
/// Terms at most this fraction of the running total count as exact zeros.
const NEGLIGIBLE: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    EvidenceHolds,
    EvidenceFails,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeuristicConfig {
    /// Number of trailing grades examined.
    pub window: usize,
    /// Growth across the whole sequence that signals divergence.
    pub growth_factor: f64,
    /// Relative change below which a window counts as a plateau.
    pub plateau_tolerance: f64,
    /// Values below this count as numerically zero for limits.
    pub eps_report: f64,
    /// Summability needs a power-law decay exponent of at least `1 + margin`.
    pub summability_margin: f64,
    /// Minimum log-log decay slope accepted as evidence of a zero limit.
    pub decay_slope: f64,
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        HeuristicConfig {
            window: 5,
            growth_factor: 2.0,
            plateau_tolerance: 0.01,
            eps_report: 1e-3,
            summability_margin: 0.1,
            decay_slope: 0.25,
        }
    }
}

impl HeuristicConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.window < 2 {
            return Err(format!("heuristic window must be at least 2, got {}", self.window));
        }
        let positive = [
            ("growth_factor", self.growth_factor - 1.0),
            ("plateau_tolerance", self.plateau_tolerance),
            ("eps_report", self.eps_report),
            ("summability_margin", self.summability_margin),
            ("decay_slope", self.decay_slope),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(format!("heuristic parameter {name} is out of range"));
            }
        }
        Ok(())
    }
}

/// Outcome of a rule plus the fitted trend it was based on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleOutcome {
    pub status: Status,
    /// Log-log decay exponent over the window, when one was fitted.
    pub exponent: Option<f64>,
}

impl RuleOutcome {
    fn plain(status: Status) -> Self {
        RuleOutcome { status, exponent: None }
    }
}

/// `-Δ ln t / Δ ln(grade + 2)` between the ends of a window.
pub fn power_law_exponent(first_grade: i64, values: &[f64], start: usize, end: usize) -> Option<f64> {
    let (a, b) = (values[start], values[end]);
    if !(a > 0.0 && b > 0.0) {
        return None;
    }
    let xa = (first_grade + start as i64 + 2) as f64;
    let xb = (first_grade + end as i64 + 2) as f64;
    if !(xa > 0.0 && xb > xa) {
        return None;
    }
    Some(-(b / a).ln() / (xb / xa).ln())
}

/// Evidence that `sup_k t_k < ∞`.
///
/// Holds when the trailing window never exceeds the earlier maximum by more
/// than the plateau tolerance. Fails when the window is strictly increasing
/// and has grown past `growth_factor` times the first value.
pub fn boundedness_rule(values: &[f64], cfg: &HeuristicConfig) -> RuleOutcome {
    let w = cfg.window;
    if values.len() < w + 1 {
        return RuleOutcome::plain(Status::Inconclusive);
    }
    let split = values.len() - w;
    let (earlier, window) = values.split_at(split);
    let prior = earlier.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let recent = window.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if recent <= (1.0 + cfg.plateau_tolerance) * prior {
        return RuleOutcome::plain(Status::EvidenceHolds);
    }
    let increasing = window.windows(2).all(|p| p[1] > p[0]);
    if increasing && recent >= cfg.growth_factor * values[0].abs() {
        return RuleOutcome::plain(Status::EvidenceFails);
    }
    RuleOutcome::plain(Status::Inconclusive)
}

/// Evidence that `t_k → 0`.
///
/// Holds when the window is non-increasing and either ends below
/// `eps_report` or decays with log-log slope at least `decay_slope`. Fails
/// when the window ends above `eps_report` without having dropped by more
/// than the plateau tolerance.
pub fn vanishing_rule(first_grade: i64, values: &[f64], cfg: &HeuristicConfig) -> RuleOutcome {
    let w = cfg.window;
    if values.len() < w + 1 {
        return RuleOutcome::plain(Status::Inconclusive);
    }
    let start = values.len() - w;
    let end = values.len() - 1;
    let window = &values[start..];
    let exponent = power_law_exponent(first_grade, values, start, end);
    let non_increasing = window.windows(2).all(|p| p[1] <= p[0] + MONOTONE_SLACK * p[0].abs());
    let last = window[w - 1];
    let first = window[0];
    let status = if non_increasing && (last < cfg.eps_report || exponent.is_some_and(|a| a >= cfg.decay_slope)) {
        Status::EvidenceHolds
    } else if last > cfg.eps_report && last >= first * (1.0 - cfg.plateau_tolerance) {
        Status::EvidenceFails
    } else {
        Status::Inconclusive
    };
    RuleOutcome { status, exponent }
}

/// Evidence that `Σ_k t_k < ∞` for nonnegative terms.
///
/// Fits a power law `t_k ~ (k+2)^{-a}` across the window: `a ≥ 1 + margin`
/// holds, `a ≤ 1` fails, anything between is inconclusive. A window of
/// negligible terms holds outright.
pub fn summability_rule(first_grade: i64, terms: &[f64], cfg: &HeuristicConfig) -> RuleOutcome {
    let w = cfg.window;
    if terms.len() < w + 1 {
        return RuleOutcome::plain(Status::Inconclusive);
    }
    let start = terms.len() - w;
    let end = terms.len() - 1;
    let total: f64 = terms.iter().map(|t| t.abs()).sum();
    if terms[start..].iter().all(|t| t.abs() <= NEGLIGIBLE * total) {
        return RuleOutcome::plain(Status::EvidenceHolds);
    }
    let exponent = power_law_exponent(first_grade, terms, start, end);
    let status = match exponent {
        Some(a) if a >= 1.0 + cfg.summability_margin => Status::EvidenceHolds,
        Some(a) if a <= 1.0 => Status::EvidenceFails,
        _ => Status::Inconclusive,
    };
    RuleOutcome { status, exponent }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> HeuristicConfig {
        HeuristicConfig::default()
    }

    #[test]
    fn boundedness_cases() {
        assert_eq!(boundedness_rule(&[1.0; 20], &cfg()).status, Status::EvidenceHolds);
        let decreasing: Vec<f64> = (0..20).map(|k| 1.0 / (k as f64 + 1.0)).collect();
        assert_eq!(boundedness_rule(&decreasing, &cfg()).status, Status::EvidenceHolds);
        let linear: Vec<f64> = (0..52).map(|j| 2.0 * j as f64 + 1.0).collect();
        assert_eq!(boundedness_rule(&linear, &cfg()).status, Status::EvidenceFails);
        assert_eq!(boundedness_rule(&[1.0; 3], &cfg()).status, Status::Inconclusive);
        // A late jump that is not a sustained trend.
        let mut bump = vec![1.0; 20];
        bump[17] = 1.5;
        assert_eq!(boundedness_rule(&bump, &cfg()).status, Status::Inconclusive);
    }

    #[test]
    fn vanishing_cases() {
        let disc: Vec<f64> = (-1..=50).map(|k| 1.0 / ((k as f64 + 2.0) * (k as f64 + 3.0))).collect();
        assert_eq!(vanishing_rule(-1, &disc, &cfg()).status, Status::EvidenceHolds);
        let slow: Vec<f64> = (-1..=30).map(|k| 1.0 / (k as f64 + 3.0)).collect();
        let out = vanishing_rule(-1, &slow, &cfg());
        assert_eq!(out.status, Status::EvidenceHolds);
        assert!(out.exponent.unwrap() > 0.9);
        assert_eq!(vanishing_rule(-1, &[1.0; 40], &cfg()).status, Status::EvidenceFails);
        let growing: Vec<f64> = (0..40).map(|k| k as f64).collect();
        assert_eq!(vanishing_rule(0, &growing, &cfg()).status, Status::EvidenceFails);
    }

    #[test]
    fn summability_cases() {
        let sq: Vec<f64> = (-1..=50).map(|k| 1.0 / ((k as f64 + 2.0) * (k as f64 + 3.0))).collect();
        assert_eq!(summability_rule(-1, &sq, &cfg()).status, Status::EvidenceHolds);
        let harmonic: Vec<f64> = sq.iter().map(|t| t.sqrt()).collect();
        assert_eq!(summability_rule(-1, &harmonic, &cfg()).status, Status::EvidenceFails);
        assert_eq!(summability_rule(-1, &[1.0; 52], &cfg()).status, Status::EvidenceFails);
        let geometric: Vec<f64> = (0..40).map(|k| 0.5f64.powi(k)).collect();
        assert_eq!(summability_rule(0, &geometric, &cfg()).status, Status::EvidenceHolds);
        let borderline: Vec<f64> = (0..40).map(|k| (k as f64 + 2.0).powf(-1.05)).collect();
        assert_eq!(summability_rule(0, &borderline, &cfg()).status, Status::Inconclusive);
        let mut zeros = vec![1.0; 10];
        zeros.extend([0.0; 6]);
        assert_eq!(summability_rule(0, &zeros, &cfg()).status, Status::EvidenceHolds);
    }

    #[test]
    fn rules_are_deterministic() {
        let v: Vec<f64> = (0..30).map(|k| ((k * 7919) % 13) as f64 + 0.5).collect();
        for _ in 0..3 {
            assert_eq!(boundedness_rule(&v, &cfg()), boundedness_rule(&v, &cfg()));
            assert_eq!(vanishing_rule(0, &v, &cfg()), vanishing_rule(0, &v, &cfg()));
            assert_eq!(summability_rule(0, &v, &cfg()), summability_rule(0, &v, &cfg()));
        }
    }

    #[test]
    fn config_validation() {
        assert!(cfg().validate().is_ok());
        assert!(HeuristicConfig { window: 1, ..cfg() }.validate().is_err());
        assert!(HeuristicConfig { growth_factor: 1.0, ..cfg() }.validate().is_err());
        assert!(HeuristicConfig { eps_report: f64::NAN, ..cfg() }.validate().is_err());
    }
}
