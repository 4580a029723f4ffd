//! Acceptance suite: one test per criterion, each printing a pass line.
//! Shared Monte Carlo artifacts (the quantile table, the simulation grids)
//! are computed once and reused across criteria.

mod support;

use std::sync::OnceLock;

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use trigauss::*;

/// Published reference values of −F̄_ρ⁻¹(α) on ρ = 0.0(0.1)1.0
/// (MC s.e. ≤ 0.01).
const TABLE_ALPHA_05: [f64; 11] = [2.71, 2.71, 2.68, 2.65, 2.58, 2.48, 2.42, 2.39, 2.58, 2.90, 3.19];
const TABLE_ALPHA_01: [f64; 11] = [5.41, 5.41, 5.40, 5.34, 5.27, 5.21, 5.11, 5.05, 5.02, 5.40, 5.97];

const REPS: usize = 4000;
const ALPHA: f64 = 0.05;

fn binomial_se(alpha: f64, reps: usize) -> f64 {
    (alpha * (1.0 - alpha) / reps as f64).sqrt()
}

fn reference_table() -> &'static EnvelopeTable {
    static TABLE: OnceLock<EnvelopeTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let rho_grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let cfg = McConfig {
            samples: 1_000_000,
            seed: 42,
            ..McConfig::default()
        };
        build_envelope_table(&rho_grid, &[0.05, 0.01], &cfg).expect("table builds")
    })
}

fn blau_duncan_stats() -> SampleStats {
    let m = support::blau_duncan_matrix();
    let full = DMatrix::from_fn(5, 5, |i, j| m[i][j]);
    // path V-W-Y conditioned on (U, X): tested pair (V, Y), collider W
    condition_on(&full, 20_700, [0, 4, 3], &[2, 1]).expect("conditioning works")
}

// ---------------------------------------------------------------------
// Criterion 1: reproduce the published quantile table at N = 1e6,
// γ-grid [0,10] step 0.05.
// ---------------------------------------------------------------------
#[test]
fn criterion_1_table_reproduction() {
    let t = reference_table();
    for (i, &rho) in t.rho_grid().iter().enumerate() {
        let got05 = t.neg_quantile(rho, 0.05).unwrap();
        let got01 = t.neg_quantile(rho, 0.01).unwrap();
        assert!(
            (got05 - TABLE_ALPHA_05[i]).abs() <= 0.05,
            "rho={rho} alpha=0.05: {got05} vs {}",
            TABLE_ALPHA_05[i]
        );
        assert!(
            (got01 - TABLE_ALPHA_01[i]).abs() <= 0.05,
            "rho={rho} alpha=0.01: {got01} vs {}",
            TABLE_ALPHA_01[i]
        );
    }
    println!("criterion 1 (published quantile table, 22 entries within ±0.05): PASS");
}

// ---------------------------------------------------------------------
// Criterion 2: the occupational-structure example end to end.
// ---------------------------------------------------------------------
#[test]
fn criterion_2_blau_duncan() {
    let stats = blau_duncan_stats();

    // cross-check the conditioning against an independent Gaussian
    // elimination solve
    let oracle = support::schur_complement_gauss(
        &support::blau_duncan_matrix(),
        &[0, 4, 3],
        &[2, 1],
    );
    let m = stats.cov().to_matrix();
    for i in 0..3 {
        for j in 0..3 {
            assert!(
                (m[i][j] - oracle[i][j]).abs() < 1e-12,
                "schur mismatch at ({i},{j})"
            );
        }
    }

    let lambda = lambda01(&stats);
    assert!((lambda - 3.72).abs() <= 0.01, "lambda {lambda}");

    let d05 = decide_adaptive(&stats, 0.05, reference_table()).unwrap();
    let d01 = decide_adaptive(&stats, 0.01, reference_table()).unwrap();
    assert_eq!(d05.decision, ModelChoice::M0, "alpha=0.05 selects M0");
    assert_eq!(d01.decision, ModelChoice::Both, "alpha=0.01 keeps both");
    let p = d05.p_value.unwrap();
    assert!((p - 0.026).abs() <= 0.005, "p-value {p}");
    assert_eq!(d01.p_value.unwrap(), p, "p-value does not depend on alpha");
    println!(
        "criterion 2 (Blau–Duncan: lambda={lambda:.4}, p={p:.4}, M0@0.05, BOTH@0.01): PASS"
    );
}

// ---------------------------------------------------------------------
// Criterion 3: analytic weak-weak envelope vs incomplete-gamma inversion.
// ---------------------------------------------------------------------
#[test]
fn criterion_3_analytic_ww_envelope() {
    let got = ww_envelope_neg_quantile(0.05);
    let oracle = support::chi2_1_quantile(0.90);
    assert!((oracle - 2.70554).abs() < 1e-4, "oracle sanity: {oracle}");
    assert!((got - oracle).abs() < 1e-4, "{got} vs {oracle}");
    // consistent with the tabulated rho = 0 entry (2.71)
    let table_entry = reference_table().neg_quantile(0.0, 0.05).unwrap();
    assert!((table_entry - 2.71).abs() < 0.005);
    // same agreement at alpha = 0.01
    let got01 = ww_envelope_neg_quantile(0.01);
    let oracle01 = support::chi2_1_quantile(0.98);
    assert!((got01 - oracle01).abs() < 1e-4);
    println!("criterion 3 (analytic weak-weak envelope = chi²₁ inversion to 1e-4): PASS");
}

// ---------------------------------------------------------------------
// Criterion 4: finite-sample weak-weak law matches N(δ², (2δ)²).
// ---------------------------------------------------------------------
#[test]
fn criterion_4_weak_weak_law_moments() {
    let n = 10_000;
    let reps = 5000;
    let delta = 2.0;
    let truth = make_local_cov(
        Regime::weak_weak(delta),
        TruthSide::UnderM0,
        n,
        [1.0, 1.0, 1.0],
    )
    .unwrap();
    let mut lams: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha12Rng::seed_from_u64(140_000 + i as u64);
            let data = sample_mvn3(&truth, n, &mut rng);
            lambda01(&sample_covariance(&data, false).unwrap())
        })
        .collect();
    let mean = lams.iter().sum::<f64>() / reps as f64;
    let var = lams.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (reps - 1) as f64;
    assert!((mean - 4.0).abs() <= 0.25, "mean {mean}");
    assert!((var - 16.0).abs() <= 1.5, "var {var}");

    let mut rng = ChaCha12Rng::seed_from_u64(77);
    let mut limit: Vec<f64> = (0..reps)
        .map(|_| sample_ww_limit(delta, TruthSide::UnderM0, &mut rng))
        .collect();
    let (d, p) = support::ks_two_sample(&mut lams, &mut limit);
    assert!(p > 0.01, "KS d={d}, p={p}");
    println!(
        "criterion 4 (weak-weak law: mean={mean:.3}, var={var:.2}, KS p={p:.3}): PASS"
    );
}

// ---------------------------------------------------------------------
// Criteria 5 and 6 share the simulation grids of the two studies.
// ---------------------------------------------------------------------
fn standard_rules() -> Vec<RuleKind> {
    vec![RuleKind::Adaptive, RuleKind::Uniform, RuleKind::Interval]
}

fn ws_grid() -> &'static Vec<SizePowerRecord> {
    static GRID: OnceLock<Vec<SizePowerRecord>> = OnceLock::new();
    GRID.get_or_init(|| {
        let mut out = Vec::new();
        let mut seed = 0x5150;
        for &rho in &[0.2, 0.5, 0.8] {
            for &gamma in &[0.0, 2.0, 4.0, 8.0] {
                for side in [TruthSide::UnderM0, TruthSide::UnderM1] {
                    seed += 1;
                    let spec = ScenarioSpec {
                        kind: ScenarioKind::LocalWs { rho, gamma, side },
                        n: 1000,
                        reps: REPS,
                        seed,
                        rules: standard_rules(),
                        alpha: ALPHA,
                    };
                    out.push(run_scenario(&spec, reference_table()).unwrap());
                }
            }
        }
        out
    })
}

fn ww_grid() -> &'static Vec<SizePowerRecord> {
    static GRID: OnceLock<Vec<SizePowerRecord>> = OnceLock::new();
    GRID.get_or_init(|| {
        let mut out = Vec::new();
        let mut seed = 0xABBA;
        for &delta in &[0.5, 1.0, 2.0] {
            for &split in &[0.2, 0.25, 0.3] {
                for side in [TruthSide::UnderM0, TruthSide::UnderM1] {
                    seed += 1;
                    let mut rules = standard_rules();
                    rules.push(RuleKind::Naive);
                    let spec = ScenarioSpec {
                        kind: ScenarioKind::LocalWw { delta, split, side },
                        n: 10_000,
                        reps: REPS,
                        seed,
                        rules,
                        alpha: ALPHA,
                    };
                    out.push(run_scenario(&spec, reference_table()).unwrap());
                }
            }
        }
        out
    })
}

fn wishart_grid() -> &'static Vec<SizePowerRecord> {
    static GRID: OnceLock<Vec<SizePowerRecord>> = OnceLock::new();
    GRID.get_or_init(|| {
        let mut out = Vec::new();
        let mut seed = 0xD1CE;
        for &df in &[10usize, 50, 200] {
            for side in [TruthSide::UnderM0, TruthSide::UnderM1] {
                seed += 1;
                let spec = ScenarioSpec {
                    kind: ScenarioKind::Wishart { df, side },
                    n: 1000,
                    reps: REPS,
                    seed,
                    rules: standard_rules(),
                    alpha: ALPHA,
                };
                out.push(run_scenario(&spec, reference_table()).unwrap());
            }
        }
        out
    })
}

fn tally_for(rec: &SizePowerRecord, rule: RuleKind) -> &RuleTally {
    rec.tallies.iter().find(|t| t.rule == rule).unwrap()
}

#[test]
fn criterion_5_uniform_error_control() {
    let bound = ALPHA + 3.0 * binomial_se(ALPHA, REPS);
    let mut points = 0;
    for rec in ws_grid().iter().chain(wishart_grid()).chain(ww_grid()) {
        let side = rec.spec.kind.side();
        for rule in [RuleKind::Adaptive, RuleKind::Uniform, RuleKind::Interval] {
            let size = tally_for(rec, rule).size(side, rec.spec.reps);
            assert!(
                size <= bound,
                "{:?} {:?}: size {size} > {bound}",
                rec.spec.kind,
                rule
            );
            points += 1;
        }
    }

    // the naive rule does not control error: at delta = 1 its size is
    // Φ(−1/2) ≈ 0.309
    let phi_half = 0.30853753872598694;
    for rec in ww_grid() {
        if let ScenarioKind::LocalWw { delta, split, .. } = rec.spec.kind {
            let size = tally_for(rec, RuleKind::Naive).size(rec.spec.kind.side(), rec.spec.reps);
            if delta == 1.0 {
                assert!((size - phi_half).abs() <= 0.03, "naive size {size} at a={split}");
            }
            if delta <= 1.0 {
                assert!(
                    size > ALPHA + 10.0 * binomial_se(ALPHA, REPS),
                    "naive size {size} unexpectedly controlled at delta={delta}"
                );
            }
        }
    }

    // consistency regime: fixed correlations (0.3, 0.5) at n = 1e4. The
    // likelihood-based rules pick the true model essentially always; the
    // interval rule's correct rate converges to its CI coverage 1 − α, not
    // to 1, so it is held to that limit instead.
    for side in [TruthSide::UnderM0, TruthSide::UnderM1] {
        let spec = ScenarioSpec {
            kind: ScenarioKind::LocalWs { rho: 0.5, gamma: 30.0, side },
            n: 10_000,
            reps: 1000,
            seed: 0xF1DE,
            rules: vec![
                RuleKind::Adaptive,
                RuleKind::Uniform,
                RuleKind::Interval,
                RuleKind::Naive,
            ],
            alpha: ALPHA,
        };
        let rec = run_scenario(&spec, reference_table()).unwrap();
        for t in &rec.tallies {
            let power = t.power(side, spec.reps);
            let floor = if t.rule == RuleKind::Interval {
                1.0 - ALPHA - 2.0 * binomial_se(ALPHA, spec.reps)
            } else {
                0.99
            };
            assert!(power >= floor, "{:?} power {power} under {side:?}", t.rule);
        }
    }
    println!("criterion 5 (size ≤ α+3se at all {points} grid checks; naive fails as expected): PASS");
}

#[test]
fn criterion_6_power_ordering_and_bands() {
    // adaptive ≥ uniform holds pointwise (threshold dominance). The
    // uniform ≥ interval leg is an aggregate observation; it
    // provably inverts where the models are barely distinguishable (at
    // ρ = 0.2, γ ∈ {2, 4} the true asymptotic powers are ~0.004 vs ~0.03,
    // all below 0.1), so that leg is asserted pointwise wherever the
    // optimal-power upper bound reaches 1/2, and per power curve (summed
    // over the γ grid) everywhere.
    let mut ordered = 0;
    let mut banded = 0;
    let mut curves: std::collections::BTreeMap<(u64, u8), [f64; 3]> =
        std::collections::BTreeMap::new();
    for rec in ws_grid().iter().chain(ww_grid()) {
        let side = rec.spec.kind.side();
        let reps = rec.spec.reps;
        let ada = tally_for(rec, RuleKind::Adaptive).power(side, reps);
        let se = |p: f64| (p * (1.0 - p) / reps as f64).sqrt();
        let (_, upper) = rec.opt_band.expect("local kinds carry a band");
        if let ScenarioKind::LocalWs { rho, gamma, .. } = rec.spec.kind {
            let uni = tally_for(rec, RuleKind::Uniform).power(side, reps);
            let int = tally_for(rec, RuleKind::Interval).power(side, reps);
            assert!(
                ada >= uni - 2.0 * se(0.5 * (ada + uni)).max(1e-12),
                "{:?}: adaptive {ada} < uniform {uni}",
                rec.spec.kind
            );
            if gamma > 0.0 && upper >= 0.5 {
                assert!(
                    uni >= int - 2.0 * se(0.5 * (uni + int)).max(1e-12),
                    "{:?}: uniform {uni} < interval {int}",
                    rec.spec.kind
                );
                ordered += 1;
            }
            let key = (rho.to_bits(), side as u8);
            let e = curves.entry(key).or_insert([0.0; 3]);
            e[0] += ada;
            e[1] += uni;
            e[2] += int;
        }
        assert!(
            ada <= upper + 2.0 * se(ada).max(1e-12),
            "{:?}: adaptive power {ada} above optimal bound {upper}",
            rec.spec.kind
        );
        banded += 1;
    }
    // curve-level ordering across the whole grid, four γ points per curve
    let se_sum = 2.0 * (4.0 * 0.25 / REPS as f64).sqrt();
    for (key, sums) in &curves {
        assert!(
            sums[0] >= sums[1] - se_sum && sums[1] >= sums[2] - se_sum,
            "curve rho bits {:?}: adaptive {} uniform {} interval {}",
            key,
            sums[0],
            sums[1],
            sums[2]
        );
    }
    println!(
        "criterion 6 (power ordering: {} curves + {ordered} identifiable points, bands at {banded} points): PASS",
        curves.len()
    );
}

// ---------------------------------------------------------------------
// Criterion 7: core invariants on 1000 random PD matrices.
// ---------------------------------------------------------------------
#[test]
fn criterion_7_core_invariants() {
    let mut rng = ChaCha12Rng::seed_from_u64(0xC0DE);
    let n = 37;

    // random members of each model for the dominance check
    let random_m0 = |rng: &mut ChaCha12Rng| -> Cov3 {
        loop {
            let r13: f64 = rng.random_range(-0.9..0.9);
            let r23: f64 = rng.random_range(-0.9..0.9);
            let v: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.2..3.0));
            if let Ok(c) = Cov3::new(
                v[0],
                0.0,
                r13 * (v[0] * v[2]).sqrt(),
                v[1],
                r23 * (v[1] * v[2]).sqrt(),
                v[2],
            ) {
                return c;
            }
        }
    };
    let random_m1 = |rng: &mut ChaCha12Rng| -> Cov3 {
        loop {
            let r13: f64 = rng.random_range(-0.9..0.9);
            let r23: f64 = rng.random_range(-0.9..0.9);
            let v: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.2..3.0));
            if let Ok(c) = Cov3::new(
                v[0],
                r13 * r23 * (v[0] * v[1]).sqrt(),
                r13 * (v[0] * v[2]).sqrt(),
                v[1],
                r23 * (v[1] * v[2]).sqrt(),
                v[2],
            ) {
                return c;
            }
        }
    };

    for trial in 0..1000 {
        let s = support::random_pd(&mut rng, 8);
        let stats = SampleStats::new(s, n).unwrap();
        let l0 = loglik_m0(&stats);
        let l1 = loglik_m1(&stats);
        let sat = loglik_sat(&stats);

        // constraint exactness
        let m0 = mle_m0(&stats);
        assert_eq!(m0.s12(), 0.0, "trial {trial}: m0 constraint");
        let m1 = mle_m1(&stats);
        let gap = m1.s12() * m1.s33() - m1.s13() * m1.s23();
        assert!(
            gap.abs() <= 1e-12 * (m1.s13() * m1.s23()).abs().max(1e-300),
            "trial {trial}: m1 constraint {gap:e}"
        );

        // closed-form / plug-in agreement and saturated dominance
        assert!((l0 - loglik(&m0, &stats)).abs() <= 1e-9 * l0.abs());
        assert!((l1 - loglik(&m1, &stats)).abs() <= 1e-9 * l1.abs());
        assert!(sat >= l0 - 1e-9 * sat.abs() && sat >= l1 - 1e-9 * sat.abs());

        // projection optimality against random model members
        for _ in 0..100 {
            let cand0 = random_m0(&mut rng);
            assert!(
                loglik(&cand0, &stats) <= l0 + 1e-9 * l0.abs(),
                "trial {trial}: m0 candidate beats the closed form"
            );
            let cand1 = random_m1(&mut rng);
            assert!(
                loglik(&cand1, &stats) <= l1 + 1e-9 * l1.abs(),
                "trial {trial}: m1 candidate beats the closed form"
            );
        }

        // scale invariance
        let lam = lambda01(&stats);
        let d: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.05..5.0));
        let scaled = Cov3::new(
            s.s11() * d[0] * d[0],
            s.s12() * d[0] * d[1],
            s.s13() * d[0] * d[2],
            s.s22() * d[1] * d[1],
            s.s23() * d[1] * d[2],
            s.s33() * d[2] * d[2],
        )
        .unwrap();
        let lam_scaled = lambda01(&SampleStats::new(scaled, n).unwrap());
        assert!(
            (lam - lam_scaled).abs() <= 1e-10 * lam.abs().max(1.0),
            "trial {trial}: scale invariance {lam} vs {lam_scaled}"
        );
    }

    // numeric-optimizer oracle on a subsample: Nelder–Mead over the free
    // parameters of each model reaches the closed-form optimum
    for trial in 0..25 {
        let s = support::random_pd(&mut rng, 8);
        let stats = SampleStats::new(s, n).unwrap();
        let neg_m0 = |p: &[f64]| -> f64 {
            match Cov3::new(p[0], 0.0, p[3], p[1], p[4], p[2]) {
                Ok(c) => -loglik(&c, &stats),
                Err(_) => 1e12,
            }
        };
        let neg_m1 = |p: &[f64]| -> f64 {
            match Cov3::new(p[0], p[3] * p[4] / p[2], p[3], p[1], p[4], p[2]) {
                Ok(c) => -loglik(&c, &stats),
                Err(_) => 1e12,
            }
        };
        let x0 = [s.s11(), s.s22(), s.s33(), s.s13(), s.s23()];
        let mut best0 = f64::INFINITY;
        let mut best1 = f64::INFINITY;
        for scale in [0.05, 0.2, 0.4] {
            best0 = best0.min(support::nelder_mead(neg_m0, &x0, scale, 4000).1);
            best1 = best1.min(support::nelder_mead(neg_m1, &x0, scale, 4000).1);
        }
        let l0 = loglik_m0(&stats);
        let l1 = loglik_m1(&stats);
        assert!(
            (l0 + best0).abs() <= 1e-6 * l0.abs(),
            "trial {trial}: optimizer m0 {best0} vs closed {l0}"
        );
        assert!(
            (l1 + best1).abs() <= 1e-6 * l1.abs(),
            "trial {trial}: optimizer m1 {best1} vs closed {l1}"
        );
    }

    // diagonal fixtures tie exactly and yield BOTH under every rule
    let diag = Cov3::new(2.0, 0.0, 0.0, 1.0, 0.0, 0.5).unwrap();
    let stats = SampleStats::new(diag, 500).unwrap();
    assert_eq!(lambda01(&stats), 0.0);
    assert_eq!(
        decide_uniform(&stats, ALPHA, reference_table()).unwrap().decision,
        ModelChoice::Both
    );
    assert_eq!(
        decide_adaptive(&stats, ALPHA, reference_table()).unwrap().decision,
        ModelChoice::Both
    );
    assert_eq!(decide_naive(&stats).decision, ModelChoice::Both);
    assert_eq!(
        decide_interval(&stats, ALPHA).unwrap().decision,
        ModelChoice::Both
    );
    println!("criterion 7 (1000-matrix invariant suite + optimizer oracle): PASS");
}

// ---------------------------------------------------------------------
// Criterion 8: structural properties of the envelope family.
// ---------------------------------------------------------------------
#[test]
fn criterion_8_envelope_structure() {
    let n_mc = 4_000_000;

    // (a) positive part of the envelope is the positive part of
    // ρ(Z1²−Z2²): on the positive axis the grid minimum of member
    // quantiles is attained at γ = 0 and matches an independent draw of
    // the γ = 0 law.
    for &rho in &[0.3, 0.7] {
        for &level in &[0.75, 0.9] {
            let mut grid_min = f64::INFINITY;
            let mut arg_min = f64::NAN;
            let mut g = 0.0;
            while g <= 10.0 + 1e-9 {
                let mut rng = ChaCha12Rng::seed_from_u64(0xE0E0);
                let q = mc_law_quantile(rho, g, level, n_mc, &mut rng);
                if q < grid_min {
                    grid_min = q;
                    arg_min = g;
                }
                g += 0.05;
            }
            assert_eq!(arg_min, 0.0, "positive-part supremum away from γ=0");
            // independent oracle: sorted draws of ρ(Z1²−Z2²)
            let mut rng = ChaCha12Rng::seed_from_u64(0x0D0D);
            let mut draws: Vec<f64> = (0..n_mc)
                .map(|_| {
                    let z1: f64 = rng.sample(rand_distr::StandardNormal);
                    let z2: f64 = rng.sample(rand_distr::StandardNormal);
                    rho * (z1 * z1 - z2 * z2)
                })
                .collect();
            draws.sort_by(f64::total_cmp);
            let k = ((level * n_mc as f64).ceil() as usize).clamp(1, n_mc) - 1;
            let oracle = draws[k];
            // 2× the combined MC standard error of the two quantile
            // estimates (density estimated from the oracle sample)
            let h = 4000;
            let dens = (2.0 * h as f64 / n_mc as f64) / (draws[k + h] - draws[k - h]);
            let se = (level * (1.0 - level) / n_mc as f64).sqrt() / dens;
            let tol = 2.0 * (2.0f64).sqrt() * se;
            assert!(
                grid_min > 0.0,
                "upper quantile should be positive at level {level}"
            );
            assert!(
                (grid_min - oracle).abs() <= tol,
                "rho={rho} level={level}: {grid_min} vs {oracle} (tol {tol})"
            );
        }
    }

    // (b) envelope of envelopes: the ρ = 1 (Bessel) quantiles dominate
    // every row within twice the MC standard error (≤ 0.02 at N = 1e6).
    let t = reference_table();
    for &alpha in &[0.05, 0.01] {
        let bessel = t.neg_quantile(1.0, alpha).unwrap();
        for &rho in t.rho_grid() {
            let v = t.neg_quantile(rho, alpha).unwrap();
            assert!(
                v <= bessel + 0.04,
                "rho={rho} alpha={alpha}: {v} exceeds Bessel {bessel}"
            );
        }
    }

    // (c) continuity at ρ = 0: the MC envelope just above zero approaches
    // the analytic weak-weak envelope.
    let cfg = McConfig {
        samples: n_mc,
        seed: 4242,
        ..McConfig::default()
    };
    for &alpha in &[0.05, 0.01] {
        let near = envelope_quantile(0.05, alpha, &cfg).unwrap();
        let at0 = envelope_quantile(0.0, alpha, &cfg).unwrap();
        assert!(
            (near - at0).abs() < 0.05,
            "alpha={alpha}: envelope jumps at 0 ({near} vs {at0})"
        );
    }
    println!("criterion 8 (positive part, envelope of envelopes, continuity at 0): PASS");
}
