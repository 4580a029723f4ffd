//! The four model selection rules.
//!
//! Every rule maps sample statistics to a three-valued decision: M0
//! (marginal independence), M1 (conditional independence), or BOTH when the
//! data cannot distinguish them at the requested level. BOTH is an ordinary
//! outcome, not an error.
//!
//! * `uniform` compares λ against ±(the ρ = 1 envelope quantile), a single
//!   number for each α (3.19 at α = 0.05, 5.97 at α = 0.01).
//! * `adaptive` uses the same shape with the envelope quantile at the
//!   plug-in ρ̂ = max(|ρ̂13|, |ρ̂23|), interpolated from a table.
//! * `naive` takes the sign of λ (the AIC/BIC choice); no error control.
//! * `interval` builds Fisher-z confidence intervals on ρ12 and ρ12·3.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::cov::SampleStats;
use crate::envelope::{p_value, EnvelopeTable, McConfig};
use crate::error::{Error, Result};
use crate::likelihood::lambda01;

/// Which model a rule selected; `Both` means the union M0 ∪ M1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelChoice {
    M0,
    M1,
    #[serde(rename = "BOTH")]
    Both,
}

/// Identifier of a selection rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleKind {
    Uniform,
    Adaptive,
    Naive,
    Interval,
}

impl RuleKind {
    pub fn name(&self) -> &'static str {
        match self {
            RuleKind::Uniform => "uniform",
            RuleKind::Adaptive => "adaptive",
            RuleKind::Naive => "naive",
            RuleKind::Interval => "interval",
        }
    }
}

/// Outcome of a selection rule, with the quantities it was based on.
/// Serializes to `{rule, alpha, lambda, rho_hat, p_value, decision}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub rule: RuleKind,
    pub alpha: Option<f64>,
    pub lambda: f64,
    pub rho_hat: Option<f64>,
    pub p_value: Option<f64>,
    pub decision: ModelChoice,
}

/// A two-sided confidence interval on the correlation scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FisherInterval {
    pub lo: f64,
    pub hi: f64,
    pub level: f64,
}

impl FisherInterval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Plug-in estimate ρ̂ = max(|ρ̂13|, |ρ̂23|), the MLE for the strong-edge
/// magnitude |ρ|.
pub fn rho_hat(stats: &SampleStats) -> f64 {
    let c = stats.cov().correlations();
    c.rho13.abs().max(c.rho23.abs())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 0.5 {
        Ok(())
    } else {
        Err(Error::ConfigError(format!("alpha={alpha} outside (0, 1/2)")))
    }
}

/// Three-way classification of λ against a positive threshold.
pub(crate) fn classify(lambda: f64, threshold: f64) -> ModelChoice {
    if lambda > threshold {
        ModelChoice::M0
    } else if lambda < -threshold {
        ModelChoice::M1
    } else {
        ModelChoice::Both
    }
}

/// The uniform rule: thresholds ±(−F̄₁⁻¹(α)) from the ρ = 1 row of the
/// table. Attaches the conservative p-value F̄₁(−|λ|).
pub fn decide_uniform(
    stats: &SampleStats,
    alpha: f64,
    table: &EnvelopeTable,
) -> Result<Decision> {
    check_alpha(alpha)?;
    let lambda = lambda01(stats);
    let threshold = table.neg_quantile(1.0, alpha)?;
    let p = p_value(lambda, 1.0, &McConfig::default())?;
    Ok(Decision {
        rule: RuleKind::Uniform,
        alpha: Some(alpha),
        lambda,
        rho_hat: None,
        p_value: Some(p),
        decision: classify(lambda, threshold),
    })
}

/// The adaptive rule: thresholds ±(−F̄_ρ̂⁻¹(α)) interpolated from the table
/// at ρ̂. Attaches the conservative p-value F̄_ρ̂(−|λ|).
pub fn decide_adaptive(
    stats: &SampleStats,
    alpha: f64,
    table: &EnvelopeTable,
) -> Result<Decision> {
    check_alpha(alpha)?;
    let lambda = lambda01(stats);
    let rho = rho_hat(stats);
    let threshold = table.neg_quantile(rho, alpha)?;
    let p = p_value(lambda, rho.min(1.0), &McConfig::default())?;
    Ok(Decision {
        rule: RuleKind::Adaptive,
        alpha: Some(alpha),
        lambda,
        rho_hat: Some(rho),
        p_value: Some(p),
        decision: classify(lambda, threshold),
    })
}

/// The naive rule: pick whichever model fits better (sign of λ). The exact
/// tie λ = 0 (reachable through diagonal fixtures) yields `Both` rather
/// than an arbitrary model.
pub fn decide_naive(stats: &SampleStats) -> Decision {
    let lambda = lambda01(stats);
    let decision = if lambda > 0.0 {
        ModelChoice::M0
    } else if lambda < 0.0 {
        ModelChoice::M1
    } else {
        ModelChoice::Both
    };
    Decision {
        rule: RuleKind::Naive,
        alpha: None,
        lambda,
        rho_hat: None,
        p_value: None,
        decision,
    }
}

/// Fisher-z confidence interval for a correlation estimated with `k`
/// conditioning variables: tanh(atanh r ± z_{α/2} / √(n − 3 − k)).
pub fn fisher_ci(r: f64, n: usize, k: usize, alpha: f64) -> Result<FisherInterval> {
    check_alpha(alpha)?;
    if !(-1.0..1.0).contains(&r) {
        return Err(Error::DomainError(format!("correlation {r} outside (-1,1)")));
    }
    if n <= k + 3 {
        return Err(Error::TooFewSamples { need: k + 4, got: n });
    }
    let z = Normal::new(0.0, 1.0).unwrap().inverse_cdf(1.0 - alpha / 2.0);
    let half = z / ((n - 3 - k) as f64).sqrt();
    let c = r.atanh();
    Ok(FisherInterval {
        lo: (c - half).tanh(),
        hi: (c + half).tanh(),
        level: 1.0 - alpha,
    })
}

/// The interval rule with non-simultaneous Fisher-z intervals on ρ12 and
/// ρ12·3: select M0 when 0 ∈ CI(ρ12) and 0 ∉ CI(ρ12·3), M1 in the reverse
/// case, and BOTH otherwise (including both-in and both-out).
pub fn decide_interval(stats: &SampleStats, alpha: f64) -> Result<Decision> {
    decide_interval_conditioned(stats, alpha, 0)
}

/// [`decide_interval`] for statistics produced by conditioning on
/// `conditioners` extra covariates (Schur complement or regression
/// residuals); those enter the Fisher-z degrees of freedom.
pub fn decide_interval_conditioned(
    stats: &SampleStats,
    alpha: f64,
    conditioners: usize,
) -> Result<Decision> {
    check_alpha(alpha)?;
    let c = stats.cov().correlations();
    let r12_3 = stats.cov().partial_corr_12_given_3();
    let ci_marginal = fisher_ci(c.rho12, stats.n(), conditioners, alpha)?;
    let ci_partial = fisher_ci(r12_3, stats.n(), conditioners + 1, alpha)?;
    let decision = match (ci_marginal.contains(0.0), ci_partial.contains(0.0)) {
        (true, false) => ModelChoice::M0,
        (false, true) => ModelChoice::M1,
        _ => ModelChoice::Both,
    };
    Ok(Decision {
        rule: RuleKind::Interval,
        alpha: Some(alpha),
        lambda: lambda01(stats),
        rho_hat: None,
        p_value: None,
        decision,
    })
}
