//! Local alternative sequences and the limiting laws of λ.
//!
//! Two boundary regimes govern how hard the models are to tell apart. In the
//! *weak-strong* regime one of ρ13, ρ23 shrinks at rate n^{−1/2} (local
//! parameter γ) while the other tends to a nonzero ρ; λ then converges to a
//! scaled difference of noncentral χ²₁ variables. In the *weak-weak* regime
//! both correlations shrink with √n·ρ13·ρ23 → δ, and λ converges to
//! N((−1)^i δ², (2δ)²) depending on which model holds.
//!
//! This module builds the covariance sequences exactly inside their model,
//! samples the limiting laws, and computes the Hellinger-based bounds on the
//! optimal power of any selection procedure.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::cov::Cov3;
use crate::error::Result;

/// Which boundary regime a local sequence follows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regime {
    /// One edge shrinks as γ/√n, the other stays at ρ ∈ (−1,1)\{0}.
    WeakStrong { rho: f64, gamma: f64 },
    /// Both edges shrink with √n·ρ13·ρ23 → δ ≠ 0; `split` is the exponent
    /// a ∈ (0, 1/2) with ρ13 ∝ n^{−a}, ρ23 ∝ n^{−(1/2−a)}. The limit law
    /// does not depend on `split`.
    WeakWeak { delta: f64, split: f64 },
}

impl Regime {
    /// Weak-weak regime with the symmetric split a = 1/4.
    pub fn weak_weak(delta: f64) -> Self {
        Regime::WeakWeak { delta, split: 0.25 }
    }
}

/// Which of the two models the truth lies in (strictly).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruthSide {
    UnderM0,
    UnderM1,
}

/// Construct the local covariance Σ_n^(i) for a regime, truth side, sample
/// size and variance triple.
///
/// The returned matrix lies exactly in M0\M1 (`UnderM0`, σ12 = 0) or M1\M0
/// (`UnderM1`, σ12 σ33 = σ13 σ23 by construction); the M1-side matrix is the
/// MLE projection of the M0-side one. Fails with `NotPositiveDefinite` when
/// the local parameters are too large for the given n.
pub fn make_local_cov(
    regime: Regime,
    side: TruthSide,
    n: usize,
    variances: [f64; 3],
) -> Result<Cov3> {
    let (rho13, rho23) = match regime {
        Regime::WeakStrong { rho, gamma } => (gamma / (n as f64).sqrt(), rho),
        Regime::WeakWeak { delta, split } => {
            let nf = n as f64;
            let r13 = delta.signum() * delta.abs().sqrt() * nf.powf(-split);
            let r23 = delta.abs().sqrt() * nf.powf(-(0.5 - split));
            (r13, r23)
        }
    };
    let [v1, v2, v3] = variances;
    let rho12 = match side {
        TruthSide::UnderM0 => 0.0,
        TruthSide::UnderM1 => rho13 * rho23,
    };
    Cov3::new(
        v1,
        rho12 * (v1 * v2).sqrt(),
        rho13 * (v1 * v3).sqrt(),
        v2,
        rho23 * (v2 * v3).sqrt(),
        v3,
    )
}

/// One draw from the weak-strong limit law of λ.
///
/// Under the M0 side the law is ρ[(Z1 + γ/√(2(1−ρ)))² − (Z2 + γ/√(2(1+ρ)))²]
/// (positive mean for ρ > 0); under the M1 side the noncentralities are
/// γ√((1−ρ)/2) and γ√((1+ρ)/2). The law depends on ρ and γ only through
/// their absolute values.
pub fn sample_ws_limit<R: Rng + ?Sized>(rho: f64, gamma: f64, side: TruthSide, rng: &mut R) -> f64 {
    let r = rho.abs();
    let g = gamma.abs();
    let (a, b) = match side {
        TruthSide::UnderM0 => (g / (2.0 * (1.0 - r)).sqrt(), g / (2.0 * (1.0 + r)).sqrt()),
        TruthSide::UnderM1 => (g * ((1.0 - r) / 2.0).sqrt(), g * ((1.0 + r) / 2.0).sqrt()),
    };
    let z1: f64 = rng.sample(StandardNormal);
    let z2: f64 = rng.sample(StandardNormal);
    r * ((z1 + a) * (z1 + a) - (z2 + b) * (z2 + b))
}

/// One draw from the weak-weak limit law δ(2Z + (−1)^i δ), i.e.
/// N(+δ², (2δ)²) under the M0 side and N(−δ², (2δ)²) under the M1 side.
pub fn sample_ww_limit<R: Rng + ?Sized>(delta: f64, side: TruthSide, rng: &mut R) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    let sign = match side {
        TruthSide::UnderM0 => 1.0,
        TruthSide::UnderM1 => -1.0,
    };
    sign * delta * delta + 2.0 * delta * z
}

/// Squared Hellinger distance between two trivariate Gaussians with
/// covariances `p` and `q`:
///
/// ```text
/// H² = 1 − |P|^{1/4} |Q|^{1/4} / |(P+Q)/2|^{1/2}.
/// ```
///
/// Symmetric in its arguments bit-exactly; 0 iff the entries coincide.
pub fn hellinger_sq(p: &Cov3, q: &Cov3) -> f64 {
    let avg = Cov3::new_unchecked(
        0.5 * (p.s11() + q.s11()),
        0.5 * (p.s12() + q.s12()),
        0.5 * (p.s13() + q.s13()),
        0.5 * (p.s22() + q.s22()),
        0.5 * (p.s23() + q.s23()),
        0.5 * (p.s33() + q.s33()),
    );
    let h2 = 1.0 - (0.25 * p.det().ln() + 0.25 * q.det().ln() - 0.5 * avg.det().ln()).exp();
    h2.clamp(0.0, 1.0)
}

/// Bounds on the optimal asymptotic power of an α-level procedure when
/// n·H² → h:
///
/// ```text
/// 1 − e^{−h}  ≤  optimal power  ≤  α + √(1 − e^{−2h})   (capped at 1).
/// ```
pub fn optimal_power_band(h: f64, alpha: f64) -> (f64, f64) {
    assert!(h >= 0.0, "h must be nonnegative");
    assert!(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1)");
    let lower = 1.0 - (-h).exp();
    let upper = (alpha + (1.0 - (-2.0 * h).exp()).sqrt()).min(1.0);
    (lower, upper)
}
