//! Deciding between marginal and conditional independence in a trivariate
//! Gaussian.
//!
//! Given zero-mean Gaussian data (X1, X2, X3), this crate contrasts
//!
//! * **M0**: X1 ⊥ X2 (σ12 = 0), against
//! * **M1**: X1 ⊥ X2 | X3 (σ12 σ33 = σ13 σ23),
//!
//! assuming at least one holds. This is the situation faced when orienting
//! an unshielded triple X1 - X3 - X2 in constraint-based structure learning.
//! The likelihood-ratio contrast λ = 2(ℓ^(0) − ℓ^(1)) is available in closed
//! form; its limiting law near the model intersection depends on nuisance
//! parameters that cannot be estimated consistently, so thresholds come from
//! *envelope distributions* (suprema of the asymptotic CDFs), which yield
//! decision rules with uniform error control and a third outcome, BOTH, for
//! data that cannot tell the models apart.
//!
//! The crate is organized around the pipeline:
//!
//! 1. [`cov`]: validated covariances and sufficient statistics, including
//!    conditioning a larger covariance onto a triple (Schur complement);
//! 2. [`likelihood`]: closed-form MLE projections and [`lambda01`];
//! 3. [`laws`]: local-alternative constructions, samplers for the limiting
//!    laws of λ, and information-theoretic power bounds;
//! 4. [`envelope`]: analytic and Monte Carlo envelope quantiles, the
//!    quantile table, and conservative p-values;
//! 5. [`rules`]: the uniform, adaptive, naive and interval selection rules;
//! 6. [`sim`]: a reproducible size/power simulation harness.
//!
//! ```
//! use trigauss::{Cov3, SampleStats, lambda01};
//!
//! // A covariance satisfying the M1 constraint exactly: λ favors M1 or ties.
//! let cov = Cov3::new(1.0, 0.12, 0.3, 1.0, 0.4, 1.0).unwrap();
//! let stats = SampleStats::new(cov, 500).unwrap();
//! assert!(lambda01(&stats) <= 0.0);
//! ```

pub mod cov;
pub mod envelope;
mod error;
pub mod laws;
pub mod likelihood;
pub mod rules;
mod seeding;
pub mod sim;

pub use cov::{condition_on, sample_covariance, CorrTriple, Cov3, SampleStats};
pub use envelope::{
    bessel_density, build_envelope_table, cdf_ww_envelope, envelope_quantile, mc_law_quantile,
    p_value, ww_envelope_neg_quantile, EnvelopeTable, McConfig,
};
pub use error::{Error, Result};
pub use laws::{
    hellinger_sq, make_local_cov, optimal_power_band, sample_ws_limit, sample_ww_limit, Regime,
    TruthSide,
};
pub use likelihood::{lambda01, loglik, loglik_m0, loglik_m1, loglik_sat, mle_m0, mle_m1};
pub use rules::{
    decide_adaptive, decide_interval, decide_interval_conditioned, decide_naive, decide_uniform,
    fisher_ci, rho_hat, Decision, FisherInterval, ModelChoice, RuleKind,
};
pub use sim::{
    append_csv_rows, binomial_ci_half_width, make_truth, regression_residual_stats, run_scenario,
    sample_mvn, sample_mvn3, sample_wishart, RuleTally, ScenarioKind, ScenarioSpec,
    SizePowerRecord, TruthDraw, CSV_HEADER,
};

// The guide's code blocks compile and run as doc-tests, so the book and
// the library cannot drift apart.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/likelihood.md")]
    mod likelihood {}
    #[doc = include_str!("../../../book/src/regimes.md")]
    mod regimes {}
    #[doc = include_str!("../../../book/src/envelopes.md")]
    mod envelopes {}
    #[doc = include_str!("../../../book/src/decision-rules.md")]
    mod decision_rules {}
    #[doc = include_str!("../../../book/src/simulations.md")]
    mod simulations {}
}
