//! Envelope distributions of the likelihood-ratio statistic.
//!
//! The limiting law of λ depends on an unidentifiable local parameter, so
//! thresholds are taken from *envelope* distributions: pointwise suprema of
//! the asymptotic CDFs over that parameter. For ρ = 0 (the weak-weak regime)
//! the envelope is analytic: an equal mixture of −χ²₁ and a point mass at
//! zero. For ρ = 1 it is the law of Z1² − Z2² (a K-form Bessel density). In
//! between there is no closed form and quantiles are computed by Monte Carlo
//! over a grid of the local parameter, with common random numbers shared
//! across the grid so the minimum is smooth.
//!
//! The Monte Carlo family is parametrized by the intercept γ:
//!
//! ```text
//! X_ρ(γ) = γ² + 2γW + ρ(Z1² − Z2²),   W = √((1+ρ)/2)·Z1 − √((1−ρ)/2)·Z2,
//! ```
//!
//! which at ρ = 0 is exactly the weak-weak family γ² + 2γZ and at ρ ∈ (0,1]
//! sweeps the weak-strong laws. Under this parametrization the envelope
//! maximizer stays below ≈ 2.4 for every tabulated level, so the default
//! grid [0, 10] is conservative.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::seeding::mix_seed;

/// Monte Carlo configuration for envelope quantiles and p-values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub gamma_lo: f64,
    pub gamma_hi: f64,
    pub gamma_step: f64,
    /// Number of (Z1, Z2) draws shared across the γ grid.
    #[serde(rename = "N")]
    pub samples: usize,
    pub seed: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            gamma_lo: 0.0,
            gamma_hi: 10.0,
            gamma_step: 0.05,
            samples: 1_000_000,
            seed: 42,
        }
    }
}

impl McConfig {
    fn validate(&self) -> Result<()> {
        if self.gamma_step <= 0.0 || self.gamma_hi < self.gamma_lo {
            return Err(Error::ConfigError("empty gamma grid".into()));
        }
        if self.gamma_hi < 10.0 {
            return Err(Error::ConfigError(
                "gamma grid must reach at least 10 to cover the envelope maximizer".into(),
            ));
        }
        if self.samples < 100_000 {
            return Err(Error::ConfigError(
                "need at least 1e5 Monte Carlo samples".into(),
            ));
        }
        Ok(())
    }

    fn grid(&self) -> Vec<f64> {
        let mut g = Vec::new();
        let mut i = 0u64;
        loop {
            let v = self.gamma_lo + i as f64 * self.gamma_step;
            if v > self.gamma_hi + 1e-12 {
                break;
            }
            g.push(v);
            i += 1;
        }
        g
    }
}

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).unwrap()
}

/// CDF of the weak-weak envelope Ḡ: `Φ(−√(−x))` for x < 0 and 1 for x ≥ 0
/// (equal-probability mixture of −χ²₁ and a point mass at zero; only the
/// negative part matters for decisions).
pub fn cdf_ww_envelope(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        std_normal().cdf(-(-x).sqrt())
    }
}

/// Negated α-quantile of the weak-weak envelope, analytic:
/// −Ḡ⁻¹(α) = (Φ⁻¹(1−α))², the (1−2α)-quantile of χ²₁.
pub fn ww_envelope_neg_quantile(alpha: f64) -> f64 {
    let z = std_normal().inverse_cdf(1.0 - alpha);
    z * z
}

/// Density of the ρ = 1 envelope (law of Z1² − Z2²):
/// `p_B(u) = K₀(|u|/2) / (2π)`. Diverges logarithmically at u = 0.
pub fn bessel_density(u: f64) -> Result<f64> {
    if u == 0.0 {
        return Err(Error::DomainError("bessel density diverges at 0".into()));
    }
    Ok(bessel_k0(u.abs() / 2.0) / (2.0 * std::f64::consts::PI))
}

/// Modified Bessel function of the second kind K₀, by the classical
/// polynomial approximations (absolute error below 2e-7).
fn bessel_k0(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x <= 2.0 {
        let t = x * x / 4.0;
        let i0 = {
            let u = (x / 3.75) * (x / 3.75);
            1.0 + u
                * (3.5156229
                    + u * (3.0899424
                        + u * (1.2067492 + u * (0.2659732 + u * (0.0360768 + u * 0.0045813)))))
        };
        -(x / 2.0).ln() * i0
            + (-0.57721566
                + t * (0.42278420
                    + t * (0.23069756
                        + t * (0.03488590 + t * (0.00262698 + t * (0.00010750 + t * 0.00000740))))))
    } else {
        let t = 2.0 / x;
        let poly = 1.25331414
            + t * (-0.07832358
                + t * (0.02189568
                    + t * (-0.01062446 + t * (0.00587872 + t * (-0.00251540 + t * 0.00053208)))));
        (-x).exp() / x.sqrt() * poly
    }
}

/// Bank of common random numbers for one ρ: `a = ρ(Z1²−Z2²)` and the unit
/// normal combination `w`, shared by every γ on the grid.
struct Bank {
    a: Vec<f64>,
    w: Vec<f64>,
}

fn fill_bank(rho: f64, n: usize, seed: u64) -> Bank {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let c1 = ((1.0 + rho) / 2.0).sqrt();
    let c2 = ((1.0 - rho) / 2.0).sqrt();
    let mut a = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    for _ in 0..n {
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        a.push(rho * (z1 * z1 - z2 * z2));
        w.push(c1 * z1 - c2 * z2);
    }
    Bank { a, w }
}

fn fill_member(bank: &Bank, gamma: f64, out: &mut [f64]) {
    let g2 = gamma * gamma;
    let tg = 2.0 * gamma;
    for ((o, &w), &a) in out.iter_mut().zip(&bank.w).zip(&bank.a) {
        *o = g2 + tg * w + a;
    }
}

/// 0-based index of the empirical α-quantile (the ⌈αN⌉-th order statistic).
fn order_stat_index(alpha: f64, n: usize) -> usize {
    ((alpha * n as f64).ceil() as usize).clamp(1, n) - 1
}

/// Order statistics at several (descending) indices in one pass of nested
/// selections.
fn select_many(xs: &mut [f64], ks_desc: &[usize], out: &mut [f64]) {
    let mut upper = xs.len();
    for (slot, &k) in ks_desc.iter().enumerate() {
        let (_, v, _) = xs[..upper].select_nth_unstable_by(k, f64::total_cmp);
        out[slot] = *v;
        upper = k + 1;
    }
}

/// Empirical α-quantile of `n_samples` draws from the weak-strong family
/// member X_ρ(γ). Deterministic given the caller's RNG state.
pub fn mc_law_quantile<R: Rng + ?Sized>(
    rho: f64,
    gamma: f64,
    alpha: f64,
    n_samples: usize,
    rng: &mut R,
) -> f64 {
    assert!(rho > 0.0 && rho <= 1.0, "rho must lie in (0, 1]");
    assert!(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
    assert!(n_samples >= 10_000, "need at least 1e4 samples");
    let c1 = ((1.0 + rho) / 2.0).sqrt();
    let c2 = ((1.0 - rho) / 2.0).sqrt();
    let g2 = gamma * gamma;
    let tg = 2.0 * gamma;
    let mut xs = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        xs.push(g2 + tg * (c1 * z1 - c2 * z2) + rho * (z1 * z1 - z2 * z2));
    }
    let k = order_stat_index(alpha, n_samples);
    let (_, v, _) = xs.select_nth_unstable_by(k, f64::total_cmp);
    *v
}

fn envelope_quantiles_from_bank(bank: &Bank, grid: &[f64], alphas: &[f64]) -> Vec<f64> {
    let n = bank.a.len();
    // descending order-statistic indices so nested selection works
    let mut order: Vec<usize> = (0..alphas.len()).collect();
    order.sort_by(|&i, &j| {
        order_stat_index(alphas[j], n).cmp(&order_stat_index(alphas[i], n))
    });
    let ks: Vec<usize> = order.iter().map(|&i| order_stat_index(alphas[i], n)).collect();
    let mut best = vec![f64::INFINITY; alphas.len()];
    let mut xs = vec![0.0f64; n];
    let mut qs = vec![0.0f64; alphas.len()];
    for &g in grid {
        fill_member(bank, g, &mut xs);
        select_many(&mut xs, &ks, &mut qs);
        for (slot, &ai) in order.iter().enumerate() {
            if qs[slot] < best[ai] {
                best[ai] = qs[slot];
            }
        }
    }
    best
}

/// α-quantile of the envelope F̄_ρ (a negative number for α < 1/2).
///
/// Uses the identity F̄⁻¹(α) = inf over the γ grid of the member quantiles,
/// with common random numbers across the grid. At ρ = 0 the analytic
/// weak-weak value −(Φ⁻¹(1−α))² is returned and no sampling happens.
/// Deterministic given `cfg.seed`.
pub fn envelope_quantile(rho: f64, alpha: f64, cfg: &McConfig) -> Result<f64> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::ConfigError(format!("rho={rho} outside [0,1]")));
    }
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::ConfigError(format!("alpha={alpha} outside (0, 1/2)")));
    }
    if rho == 0.0 {
        return Ok(-ww_envelope_neg_quantile(alpha));
    }
    cfg.validate()?;
    let bank = fill_bank(rho, cfg.samples, cfg.seed);
    Ok(envelope_quantiles_from_bank(&bank, &cfg.grid(), &[alpha])[0])
}

/// Conservative p-value F̄_ρ(−|λ|): the maximum over the γ grid of the
/// empirical CDF at −|λ|, clamped to [0, 1/2]. Exactly 0.5 at λ = 0; at
/// ρ = 0 the analytic weak-weak envelope is used.
pub fn p_value(lambda: f64, rho: f64, cfg: &McConfig) -> Result<f64> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::ConfigError(format!("rho={rho} outside [0,1]")));
    }
    if lambda == 0.0 {
        return Ok(0.5);
    }
    let x = -lambda.abs();
    if rho == 0.0 {
        return Ok(cdf_ww_envelope(x));
    }
    cfg.validate()?;
    let bank = fill_bank(rho, cfg.samples, cfg.seed);
    let n = bank.a.len();
    let mut best = 0usize;
    for g in cfg.grid() {
        let g2 = g * g;
        let tg = 2.0 * g;
        let mut count = 0usize;
        for i in 0..n {
            if g2 + tg * bank.w[i] + bank.a[i] <= x {
                count += 1;
            }
        }
        best = best.max(count);
    }
    Ok((best as f64 / n as f64).min(0.5))
}

/// Grid of negated envelope quantiles −F̄_ρ⁻¹(α) with its Monte Carlo
/// provenance. Serializes to CSV (`rho,alpha,neg_quantile,mc_samples,seed`)
/// plus a JSON metadata sidecar.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeTable {
    rho_grid: Vec<f64>,
    alphas: Vec<f64>,
    /// values[rho_idx][alpha_idx], all positive
    values: Vec<Vec<f64>>,
    mc_samples: usize,
    seed: u64,
    gamma_lo: f64,
    gamma_hi: f64,
    gamma_step: f64,
}

fn round_decimals(x: f64, digits: i32) -> f64 {
    let p = 10f64.powi(digits);
    (x * p).round() / p
}

impl EnvelopeTable {
    /// Tabulated ρ grid (sorted, within [0, 1]).
    pub fn rho_grid(&self) -> &[f64] {
        &self.rho_grid
    }

    /// Tabulated levels.
    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn mc_samples(&self) -> usize {
        self.mc_samples
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Negated envelope quantile −F̄_ρ⁻¹(α), piecewise-linear in ρ between
    /// grid nodes and exact at them. ρ is clamped into the grid range
    /// (ρ̂ > 1 cannot occur for a correlation, so clamping is defensive).
    pub fn neg_quantile(&self, rho: f64, alpha: f64) -> Result<f64> {
        let ai = self
            .alphas
            .iter()
            .position(|a| (a - alpha).abs() < 1e-9)
            .ok_or(Error::UnknownAlpha(alpha))?;
        let lo = *self.rho_grid.first().unwrap();
        let hi = *self.rho_grid.last().unwrap();
        let r = rho.clamp(lo, hi);
        let pos = self.rho_grid.partition_point(|&g| g < r);
        if pos < self.rho_grid.len() && (self.rho_grid[pos] - r).abs() < 1e-12 {
            return Ok(self.values[pos][ai]);
        }
        if pos == 0 {
            return Ok(self.values[0][ai]);
        }
        let (r0, r1) = (self.rho_grid[pos - 1], self.rho_grid[pos]);
        let (v0, v1) = (self.values[pos - 1][ai], self.values[pos][ai]);
        let t = (r - r0) / (r1 - r0);
        Ok(v0 + t * (v1 - v0))
    }

    /// CSV serialization with the header
    /// `rho,alpha,neg_quantile,mc_samples,seed`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rho,alpha,neg_quantile,mc_samples,seed\n");
        for (ri, &rho) in self.rho_grid.iter().enumerate() {
            for (ai, &alpha) in self.alphas.iter().enumerate() {
                out.push_str(&format!(
                    "{rho:.6},{alpha:.6},{:.9},{},{}\n",
                    self.values[ri][ai], self.mc_samples, self.seed
                ));
            }
        }
        out
    }

    /// Sidecar metadata JSON: `{gamma_lo, gamma_hi, gamma_step, N, seed}`.
    pub fn metadata_json(&self) -> String {
        serde_json::to_string(&McConfig {
            gamma_lo: self.gamma_lo,
            gamma_hi: self.gamma_hi,
            gamma_step: self.gamma_step,
            samples: self.mc_samples,
            seed: self.seed,
        })
        .expect("metadata serializes")
    }

    /// Parse a table written by [`EnvelopeTable::to_csv`]; `meta_json`, when
    /// available, restores the γ-grid provenance.
    pub fn from_csv(csv: &str, meta_json: Option<&str>) -> Result<Self> {
        let mut rho_grid: Vec<f64> = Vec::new();
        let mut alphas: Vec<f64> = Vec::new();
        let mut values: Vec<Vec<f64>> = Vec::new();
        let mut mc_samples = 0usize;
        let mut seed = 0u64;
        let mut first = true;
        for (lineno, line) in csv.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if lineno == 0 {
                if !line.starts_with("rho,") {
                    return Err(Error::ParseError("missing header row".into()));
                }
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 5 {
                return Err(Error::ParseError(format!("line {}: want 5 fields", lineno + 1)));
            }
            let parse = |s: &str| -> Result<f64> {
                s.parse::<f64>()
                    .map_err(|_| Error::ParseError(format!("bad number {s:?}")))
            };
            let rho = parse(fields[0])?;
            let alpha = parse(fields[1])?;
            let q = parse(fields[2])?;
            let n: usize = fields[3]
                .parse()
                .map_err(|_| Error::ParseError("bad mc_samples".into()))?;
            let s: u64 = fields[4]
                .parse()
                .map_err(|_| Error::ParseError("bad seed".into()))?;
            if first {
                mc_samples = n;
                seed = s;
                first = false;
            } else if n != mc_samples || s != seed {
                return Err(Error::ParseError("inconsistent mc_samples/seed".into()));
            }
            let is_new_rho = rho_grid.last().is_none_or(|&r| r != rho);
            if is_new_rho {
                if rho_grid.contains(&rho) {
                    return Err(Error::ParseError("rho values out of order".into()));
                }
                rho_grid.push(rho);
                values.push(Vec::new());
            }
            let ri = rho_grid.len() - 1;
            if ri == 0 {
                alphas.push(alpha);
            } else {
                let ai = values[ri].len();
                if ai >= alphas.len() || (alphas[ai] - alpha).abs() > 1e-12 {
                    return Err(Error::ParseError("ragged alpha grid".into()));
                }
            }
            values[ri].push(q);
        }
        if rho_grid.is_empty() {
            return Err(Error::ParseError("empty table".into()));
        }
        if values.iter().any(|row| row.len() != alphas.len()) {
            return Err(Error::ParseError("ragged table".into()));
        }
        if !rho_grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::ParseError("rho grid not sorted".into()));
        }
        let cfg: McConfig = match meta_json {
            Some(j) => serde_json::from_str(j)
                .map_err(|e| Error::ParseError(format!("metadata: {e}")))?,
            None => McConfig {
                samples: mc_samples,
                seed,
                ..McConfig::default()
            },
        };
        Ok(Self {
            rho_grid,
            alphas,
            values,
            mc_samples,
            seed,
            gamma_lo: cfg.gamma_lo,
            gamma_hi: cfg.gamma_hi,
            gamma_step: cfg.gamma_step,
        })
    }
}

/// Build an envelope quantile table over `rho_grid` × `alpha_list`.
///
/// Rows are computed in parallel; each ρ owns an RNG stream derived from
/// `hash(cfg.seed, rho_index)`, so the result is independent of scheduling
/// and bit-identical across reruns with the same configuration. Stored
/// quantiles are rounded to 9 decimals so the CSV round-trips exactly.
pub fn build_envelope_table(
    rho_grid: &[f64],
    alpha_list: &[f64],
    cfg: &McConfig,
) -> Result<EnvelopeTable> {
    if rho_grid.is_empty() {
        return Err(Error::ConfigError("empty rho grid".into()));
    }
    if alpha_list.is_empty() {
        return Err(Error::ConfigError("empty alpha list".into()));
    }
    if !rho_grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::ConfigError("rho grid must be strictly increasing".into()));
    }
    if rho_grid.iter().any(|&r| !(0.0..=1.0).contains(&r)) {
        return Err(Error::ConfigError("rho grid must lie within [0,1]".into()));
    }
    if alpha_list.iter().any(|&a| !(a > 0.0 && a < 0.5)) {
        return Err(Error::ConfigError("alpha levels must lie in (0, 1/2)".into()));
    }
    cfg.validate()?;
    let grid = cfg.grid();
    let values: Vec<Vec<f64>> = rho_grid
        .par_iter()
        .enumerate()
        .map(|(idx, &rho)| {
            let qs: Vec<f64> = if rho == 0.0 {
                alpha_list.iter().map(|&a| ww_envelope_neg_quantile(a)).collect()
            } else {
                let bank = fill_bank(rho, cfg.samples, mix_seed(cfg.seed, idx as u64));
                envelope_quantiles_from_bank(&bank, &grid, alpha_list)
                    .into_iter()
                    .map(|q| -q)
                    .collect()
            };
            qs.into_iter().map(|q| round_decimals(q, 9)).collect()
        })
        .collect();
    Ok(EnvelopeTable {
        rho_grid: rho_grid.iter().map(|&r| round_decimals(r, 6)).collect(),
        alphas: alpha_list.iter().map(|&a| round_decimals(a, 6)).collect(),
        values,
        mc_samples: cfg.samples,
        seed: cfg.seed,
        gamma_lo: cfg.gamma_lo,
        gamma_hi: cfg.gamma_hi,
        gamma_step: cfg.gamma_step,
    })
}
