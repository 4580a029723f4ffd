//! Size/power simulation harness.
//!
//! Reproduces the three study designs: local alternatives in either regime,
//! projected-Wishart covariances, and regression with covariates where the
//! rules run on the least-squares residual covariance. Each scenario draws
//! `reps` replicated data sets, applies the requested rules, and tallies the
//! three-way outcomes into size (wrong single model), power (true model) and
//! the BOTH rate, with binomial confidence half-widths and, for the local
//! kinds, Hellinger-based bounds on the optimal power.
//!
//! Replicates are independent and run in parallel; replicate `i` owns the
//! RNG substream `mix_seed(seed, i)`, so results are bit-reproducible and
//! independent of the thread schedule.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{ChiSquared, StandardNormal, StudentT};
use rayon::prelude::*;

use crate::cov::{sample_covariance, Cov3, SampleStats};
use crate::envelope::EnvelopeTable;
use crate::error::{Error, Result};
use crate::laws::{hellinger_sq, make_local_cov, optimal_power_band, Regime, TruthSide};
use crate::likelihood::{lambda01, mle_m0, mle_m1};
use crate::rules::{classify, decide_interval_conditioned, rho_hat, ModelChoice, RuleKind};
use crate::seeding::mix_seed;

/// Which study design a scenario follows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScenarioKind {
    /// Weak-strong local alternative with fixed truth.
    LocalWs { rho: f64, gamma: f64, side: TruthSide },
    /// Weak-weak local alternative with fixed truth.
    LocalWw { delta: f64, split: f64, side: TruthSide },
    /// Truth redrawn per replicate: Wishart draw (scale (−1/2)^{|i−j|},
    /// normalized by df) projected onto the side's model.
    Wishart { df: usize, side: TruthSide },
    /// Truth redrawn per replicate: projected-Wishart error covariance and
    /// t₄ regression coefficients on `covariates` standard-normal columns;
    /// rules run on the residual covariance.
    Regression { covariates: usize, wishart_df: usize, side: TruthSide },
}

impl ScenarioKind {
    pub fn side(&self) -> TruthSide {
        match *self {
            ScenarioKind::LocalWs { side, .. }
            | ScenarioKind::LocalWw { side, .. }
            | ScenarioKind::Wishart { side, .. }
            | ScenarioKind::Regression { side, .. } => side,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::LocalWs { .. } => "local-ws",
            ScenarioKind::LocalWw { .. } => "local-ww",
            ScenarioKind::Wishart { .. } => "wishart",
            ScenarioKind::Regression { .. } => "regression",
        }
    }
}

/// Declarative description of one simulation setting.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    pub rules: Vec<RuleKind>,
    pub alpha: f64,
}

impl ScenarioSpec {
    fn validate(&self) -> Result<()> {
        if self.reps < 100 {
            return Err(Error::ConfigError(format!(
                "reps={} (need at least 100)",
                self.reps
            )));
        }
        if self.n < 10 {
            return Err(Error::ConfigError(format!("n={} (need at least 10)", self.n)));
        }
        if self.rules.is_empty() {
            return Err(Error::ConfigError("no rules requested".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 0.5) {
            return Err(Error::ConfigError(format!(
                "alpha={} outside (0, 1/2)",
                self.alpha
            )));
        }
        if let ScenarioKind::Regression { covariates, .. } = self.kind {
            if self.n <= covariates + 3 {
                return Err(Error::ConfigError("n too small for the covariate count".into()));
            }
        }
        Ok(())
    }
}

/// Outcome counts for one rule within a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleTally {
    pub rule: RuleKind,
    pub m0: usize,
    pub m1: usize,
    pub both: usize,
}

impl RuleTally {
    fn rate(&self, count: usize, reps: usize) -> f64 {
        count as f64 / reps as f64
    }

    /// Probability of selecting the wrong single model.
    pub fn size(&self, side: TruthSide, reps: usize) -> f64 {
        match side {
            TruthSide::UnderM0 => self.rate(self.m1, reps),
            TruthSide::UnderM1 => self.rate(self.m0, reps),
        }
    }

    /// Probability of selecting the true model.
    pub fn power(&self, side: TruthSide, reps: usize) -> f64 {
        match side {
            TruthSide::UnderM0 => self.rate(self.m0, reps),
            TruthSide::UnderM1 => self.rate(self.m1, reps),
        }
    }

    pub fn both_rate(&self, reps: usize) -> f64 {
        self.rate(self.both, reps)
    }
}

/// 95% binomial half-width for a rate estimated from `reps` replicates.
pub fn binomial_ci_half_width(rate: f64, reps: usize) -> f64 {
    1.96 * (rate * (1.0 - rate) / reps as f64).sqrt()
}

/// Results of one scenario: per-rule tallies plus the optimal-power band
/// when the design admits one (local kinds).
#[derive(Debug, Clone, PartialEq)]
pub struct SizePowerRecord {
    pub spec: ScenarioSpec,
    pub tallies: Vec<RuleTally>,
    /// (lower, upper) bounds on the optimal power from n·H².
    pub opt_band: Option<(f64, f64)>,
    /// Replicates that had to be redrawn for degeneracy.
    pub retries: usize,
}

/// Draw n rows from N(0, Σ) for a trivariate covariance.
pub fn sample_mvn3<R: Rng + ?Sized>(cov: &Cov3, n: usize, rng: &mut R) -> Vec<[f64; 3]> {
    let l = cov.cholesky_lower();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let z: [f64; 3] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        out.push([
            l[0][0] * z[0],
            l[1][0] * z[0] + l[1][1] * z[1],
            l[2][0] * z[0] + l[2][1] * z[1] + l[2][2] * z[2],
        ]);
    }
    out
}

/// Draw n rows from N(0, Σ) for a general k×k covariance.
pub fn sample_mvn<R: Rng + ?Sized>(cov: &DMatrix<f64>, n: usize, rng: &mut R) -> Result<DMatrix<f64>> {
    let chol = cov
        .clone()
        .cholesky()
        .ok_or_else(|| Error::NotPositiveDefinite("mvn covariance".into()))?;
    let k = cov.nrows();
    let z = DMatrix::from_fn(n, k, |_, _| rng.sample::<f64, _>(StandardNormal));
    Ok(z * chol.l().transpose())
}

/// One Wishart(scale, df) draw via the Bartlett decomposition.
pub fn sample_wishart<R: Rng + ?Sized>(
    scale: &DMatrix<f64>,
    df: usize,
    rng: &mut R,
) -> Result<DMatrix<f64>> {
    let k = scale.nrows();
    if df < k {
        return Err(Error::ConfigError(format!("wishart df={df} below dimension {k}")));
    }
    let chol = scale
        .clone()
        .cholesky()
        .ok_or_else(|| Error::NotPositiveDefinite("wishart scale".into()))?;
    let mut t = DMatrix::zeros(k, k);
    for i in 0..k {
        let chi = ChiSquared::new((df - i) as f64).expect("positive dof");
        t[(i, i)] = rng.sample::<f64, _>(chi).sqrt();
        for j in 0..i {
            t[(i, j)] = rng.sample(StandardNormal);
        }
    }
    let a = chol.l() * t;
    Ok(&a * a.transpose())
}

/// The Wishart scale σ_ij = (−1/2)^{|i−j|} used by the projected-Wishart
/// design.
pub fn wishart_scale3() -> DMatrix<f64> {
    DMatrix::from_fn(3, 3, |i, j| (-0.5f64).powi((i as i32 - j as i32).abs()))
}

/// A freshly drawn truth for one replicate.
#[derive(Debug, Clone)]
pub enum TruthDraw {
    Plain(Cov3),
    Regression { error_cov: Cov3, beta: DMatrix<f64> },
}

fn projected_wishart<R: Rng + ?Sized>(df: usize, side: TruthSide, rng: &mut R) -> Result<Cov3> {
    let w = sample_wishart(&wishart_scale3(), df, rng)?;
    // normalize by df so variances stay O(1); lambda is scale-invariant
    let m = [
        [w[(0, 0)] / df as f64, w[(0, 1)] / df as f64, w[(0, 2)] / df as f64],
        [w[(1, 0)] / df as f64, w[(1, 1)] / df as f64, w[(1, 2)] / df as f64],
        [w[(2, 0)] / df as f64, w[(2, 1)] / df as f64, w[(2, 2)] / df as f64],
    ];
    let raw = Cov3::new(m[0][0], m[0][1], m[0][2], m[1][1], m[1][2], m[2][2])?;
    let st = SampleStats::new(raw, 1)?;
    Ok(match side {
        TruthSide::UnderM0 => mle_m0(&st),
        TruthSide::UnderM1 => mle_m1(&st),
    })
}

/// Draw the truth for one replicate of a scenario. Local kinds are
/// deterministic; Wishart and Regression kinds consume the RNG.
pub fn make_truth<R: Rng + ?Sized>(spec: &ScenarioSpec, rng: &mut R) -> Result<TruthDraw> {
    match spec.kind {
        ScenarioKind::LocalWs { rho, gamma, side } => Ok(TruthDraw::Plain(make_local_cov(
            Regime::WeakStrong { rho, gamma },
            side,
            spec.n,
            [1.0, 1.0, 1.0],
        )?)),
        ScenarioKind::LocalWw { delta, split, side } => Ok(TruthDraw::Plain(make_local_cov(
            Regime::WeakWeak { delta, split },
            side,
            spec.n,
            [1.0, 1.0, 1.0],
        )?)),
        ScenarioKind::Wishart { df, side } => {
            Ok(TruthDraw::Plain(projected_wishart(df, side, rng)?))
        }
        ScenarioKind::Regression { covariates, wishart_df, side } => {
            let error_cov = projected_wishart(wishart_df, side, rng)?;
            let t4 = StudentT::new(4.0).expect("valid dof");
            let beta = DMatrix::from_fn(covariates, 3, |_, _| rng.sample(t4));
            Ok(TruthDraw::Regression { error_cov, beta })
        }
    }
}

/// Residual covariance of Y (n×3) after least-squares regression on X
/// (n×p): (YᵀY − YᵀX(XᵀX)⁻¹XᵀY)/n, with the sample size carried unchanged.
pub fn regression_residual_stats(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<SampleStats> {
    let n = y.nrows();
    let p = x.ncols();
    if x.nrows() != n {
        return Err(Error::BadIndices("X and Y row counts differ".into()));
    }
    if n <= p + 3 {
        return Err(Error::TooFewSamples { need: p + 4, got: n });
    }
    let cross = if p == 0 {
        y.transpose() * y
    } else {
        let xtx = x.transpose() * x;
        let chol = xtx.cholesky().ok_or(Error::RankDeficient)?;
        let xty = x.transpose() * y;
        let solved = chol.solve(&xty);
        y.transpose() * y - xty.transpose() * solved
    };
    let inv = 1.0 / n as f64;
    let cov = Cov3::new(
        cross[(0, 0)] * inv,
        0.5 * (cross[(0, 1)] + cross[(1, 0)]) * inv,
        0.5 * (cross[(0, 2)] + cross[(2, 0)]) * inv,
        cross[(1, 1)] * inv,
        0.5 * (cross[(1, 2)] + cross[(2, 1)]) * inv,
        cross[(2, 2)] * inv,
    )?;
    SampleStats::new(cov, n)
}

struct Accum {
    counts: Vec<[usize; 3]>,
    retries: usize,
}

impl Accum {
    fn new(rules: usize) -> Self {
        Self { counts: vec![[0; 3]; rules], retries: 0 }
    }

    fn merge(mut self, other: Accum) -> Self {
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            a[0] += b[0];
            a[1] += b[1];
            a[2] += b[2];
        }
        self.retries += other.retries;
        self
    }

    fn record(&mut self, rule_idx: usize, choice: ModelChoice) {
        let slot = match choice {
            ModelChoice::M0 => 0,
            ModelChoice::M1 => 1,
            ModelChoice::Both => 2,
        };
        self.counts[rule_idx][slot] += 1;
    }
}

fn replicate_stats(
    spec: &ScenarioSpec,
    rng: &mut ChaCha12Rng,
) -> Result<(SampleStats, usize)> {
    match make_truth(spec, rng)? {
        TruthDraw::Plain(truth) => {
            let data = sample_mvn3(&truth, spec.n, rng);
            Ok((sample_covariance(&data, false)?, 0))
        }
        TruthDraw::Regression { error_cov, beta } => {
            let p = beta.nrows();
            let x = DMatrix::from_fn(spec.n, p, |_, _| rng.sample(StandardNormal));
            let e = sample_mvn3(&error_cov, spec.n, rng);
            let mut y = DMatrix::zeros(spec.n, 3);
            let xb = &x * &beta;
            for i in 0..spec.n {
                for j in 0..3 {
                    y[(i, j)] = xb[(i, j)] + e[i][j];
                }
            }
            Ok((regression_residual_stats(&x, &y)?, p))
        }
    }
}

/// Run one scenario: draw `reps` replicates, apply every requested rule,
/// and tally outcomes. Deterministic given `spec` and `table`; aborts with
/// [`Error::DegenerateScenario`] if more than 1% of replicates needed
/// redrawing.
pub fn run_scenario(spec: &ScenarioSpec, table: &EnvelopeTable) -> Result<SizePowerRecord> {
    spec.validate()?;
    let uniform_threshold = if spec.rules.contains(&RuleKind::Uniform) {
        Some(table.neg_quantile(1.0, spec.alpha)?)
    } else {
        None
    };
    // Fail fast on impossible local parameters / unknown alpha before the
    // parallel loop.
    if spec.rules.contains(&RuleKind::Adaptive) {
        table.neg_quantile(0.0, spec.alpha)?;
    }
    let mut probe = ChaCha12Rng::seed_from_u64(mix_seed(spec.seed, 0));
    make_truth(spec, &mut probe)?;

    let opt_band = match spec.kind {
        ScenarioKind::LocalWs { rho, gamma, .. } => {
            let regime = Regime::WeakStrong { rho, gamma };
            let p = make_local_cov(regime, TruthSide::UnderM0, spec.n, [1.0; 3])?;
            let q = make_local_cov(regime, TruthSide::UnderM1, spec.n, [1.0; 3])?;
            let h = spec.n as f64 * hellinger_sq(&p, &q);
            Some(optimal_power_band(h, spec.alpha))
        }
        ScenarioKind::LocalWw { delta, split, .. } => {
            let regime = Regime::WeakWeak { delta, split };
            let p = make_local_cov(regime, TruthSide::UnderM0, spec.n, [1.0; 3])?;
            let q = make_local_cov(regime, TruthSide::UnderM1, spec.n, [1.0; 3])?;
            let h = spec.n as f64 * hellinger_sq(&p, &q);
            Some(optimal_power_band(h, spec.alpha))
        }
        _ => None,
    };

    let result: Result<Accum> = (0..spec.reps)
        .into_par_iter()
        .try_fold(
            || Accum::new(spec.rules.len()),
            |mut acc, i| {
                let mut rng = ChaCha12Rng::seed_from_u64(mix_seed(spec.seed, i as u64));
                let mut attempts = 0usize;
                let (stats, conditioners) = loop {
                    match replicate_stats(spec, &mut rng) {
                        Ok(v) => break v,
                        Err(_) if attempts < 1000 => {
                            attempts += 1;
                        }
                        Err(e) => return Err(e),
                    }
                };
                acc.retries += attempts;
                let lambda = lambda01(&stats);
                for (ri, rule) in spec.rules.iter().enumerate() {
                    let choice = match rule {
                        RuleKind::Uniform => classify(lambda, uniform_threshold.unwrap()),
                        RuleKind::Adaptive => {
                            let thr = table.neg_quantile(rho_hat(&stats), spec.alpha)?;
                            classify(lambda, thr)
                        }
                        RuleKind::Naive => {
                            if lambda > 0.0 {
                                ModelChoice::M0
                            } else if lambda < 0.0 {
                                ModelChoice::M1
                            } else {
                                ModelChoice::Both
                            }
                        }
                        RuleKind::Interval => {
                            decide_interval_conditioned(&stats, spec.alpha, conditioners)?
                                .decision
                        }
                    };
                    acc.record(ri, choice);
                }
                Ok(acc)
            },
        )
        .try_reduce(|| Accum::new(spec.rules.len()), |a, b| Ok(a.merge(b)));
    let acc = result?;

    if acc.retries * 100 > spec.reps {
        return Err(Error::DegenerateScenario { retries: acc.retries, reps: spec.reps });
    }
    let tallies = spec
        .rules
        .iter()
        .zip(&acc.counts)
        .map(|(&rule, c)| RuleTally { rule, m0: c[0], m1: c[1], both: c[2] })
        .collect();
    Ok(SizePowerRecord {
        spec: spec.clone(),
        tallies,
        opt_band,
        retries: acc.retries,
    })
}

/// Header of the plot-ready CSV emitted by [`append_csv_rows`].
pub const CSV_HEADER: &str =
    "scenario,rule,side,param1,param2,n,reps,size,size_ci,power,power_ci,both_rate,opt_lo,opt_hi,seed";

/// Append one CSV row per rule of a [`SizePowerRecord`].
pub fn append_csv_rows(out: &mut String, rec: &SizePowerRecord) {
    let side = rec.spec.kind.side();
    let side_str = match side {
        TruthSide::UnderM0 => "m0",
        TruthSide::UnderM1 => "m1",
    };
    let (p1, p2) = match rec.spec.kind {
        ScenarioKind::LocalWs { rho, gamma, .. } => (format!("{rho}"), format!("{gamma}")),
        ScenarioKind::LocalWw { delta, split, .. } => (format!("{delta}"), format!("{split}")),
        ScenarioKind::Wishart { df, .. } => (format!("{df}"), String::new()),
        ScenarioKind::Regression { covariates, wishart_df, .. } => {
            (format!("{covariates}"), format!("{wishart_df}"))
        }
    };
    let (opt_lo, opt_hi) = match rec.opt_band {
        Some((lo, hi)) => (format!("{lo:.6}"), format!("{hi:.6}")),
        None => (String::new(), String::new()),
    };
    let reps = rec.spec.reps;
    for t in &rec.tallies {
        let size = t.size(side, reps);
        let power = t.power(side, reps);
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{},{},{}\n",
            rec.spec.kind.name(),
            t.rule.name(),
            side_str,
            p1,
            p2,
            rec.spec.n,
            reps,
            size,
            binomial_ci_half_width(size, reps),
            power,
            binomial_ci_half_width(power, reps),
            t.both_rate(reps),
            opt_lo,
            opt_hi,
            rec.spec.seed,
        ));
    }
}
