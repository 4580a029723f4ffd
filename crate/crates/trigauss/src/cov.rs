//! Trivariate covariance matrices and sufficient statistics.
//!
//! Everything downstream (likelihoods, decision rules, simulations) consumes
//! a validated 3×3 positive definite covariance [`Cov3`] together with a
//! sample size, bundled as [`SampleStats`]. The sample covariance here is the
//! scatter matrix divided by `n` (mean assumed zero unless centering is
//! requested), which is the convention the likelihood formulas expect.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Relative tolerance for symmetry checks on raw input matrices.
const SYM_RTOL: f64 = 1e-12;

/// Leading principal minors must exceed this times the product of the
/// corresponding diagonal entries. Near-singular input is rejected rather
/// than regularized.
const PD_RTOL: f64 = 1e-12;

/// A validated symmetric positive definite 3×3 covariance matrix.
///
/// Only the upper triangle is stored; the matrix is symmetric by
/// construction. Instances are immutable, so sharing across threads is safe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cov3 {
    s11: f64,
    s12: f64,
    s13: f64,
    s22: f64,
    s23: f64,
    s33: f64,
}

impl Cov3 {
    /// Validate the six entries of a symmetric matrix and construct a `Cov3`.
    ///
    /// Fails with [`Error::NotPositiveDefinite`] unless all three leading
    /// principal minors are strictly positive (relative to the scale of the
    /// diagonal), and with [`Error::NotSymmetric`] on non-finite entries.
    pub fn new(s11: f64, s12: f64, s13: f64, s22: f64, s23: f64, s33: f64) -> Result<Self> {
        for (name, v) in [
            ("s11", s11),
            ("s12", s12),
            ("s13", s13),
            ("s22", s22),
            ("s23", s23),
            ("s33", s33),
        ] {
            if !v.is_finite() {
                return Err(Error::NotSymmetric(format!("entry {name} is not finite")));
            }
        }
        let m1 = s11;
        let m2 = s11 * s22 - s12 * s12;
        let m3 = det3(s11, s12, s13, s22, s23, s33);
        if m1 <= PD_RTOL * s11.abs().max(1.0) {
            return Err(Error::NotPositiveDefinite("s11 <= 0".into()));
        }
        if m2 <= PD_RTOL * (s11 * s22).abs() {
            return Err(Error::NotPositiveDefinite(format!(
                "2nd leading minor {m2:e} not positive"
            )));
        }
        if m3 <= PD_RTOL * (s11 * s22 * s33).abs() {
            return Err(Error::NotPositiveDefinite(format!(
                "determinant {m3:e} not positive"
            )));
        }
        Ok(Self {
            s11,
            s12,
            s13,
            s22,
            s23,
            s33,
        })
    }

    /// Validate a raw 3×3 matrix: finite, symmetric within relative
    /// tolerance 1e-12, positive definite. The upper triangle is mirrored
    /// exactly.
    #[allow(clippy::needless_range_loop)]
    pub fn from_matrix(m: &[[f64; 3]; 3]) -> Result<Self> {
        for i in 0..3 {
            for j in (i + 1)..3 {
                let (a, b) = (m[i][j], m[j][i]);
                if !a.is_finite() || !b.is_finite() {
                    return Err(Error::NotSymmetric("non-finite entry".into()));
                }
                if (a - b).abs() > SYM_RTOL * a.abs().max(b.abs()).max(f64::MIN_POSITIVE) {
                    return Err(Error::NotSymmetric(format!(
                        "m[{i}][{j}]={a} vs m[{j}][{i}]={b}"
                    )));
                }
            }
        }
        Self::new(m[0][0], m[0][1], m[0][2], m[1][1], m[1][2], m[2][2])
    }

    /// The 3×3 identity matrix.
    pub fn identity() -> Self {
        Self {
            s11: 1.0,
            s12: 0.0,
            s13: 0.0,
            s22: 1.0,
            s23: 0.0,
            s33: 1.0,
        }
    }

    /// Construct without re-validating. Only for entries already known to be
    /// PD (e.g. MLE projections, which are PD whenever their input is).
    pub(crate) fn new_unchecked(
        s11: f64,
        s12: f64,
        s13: f64,
        s22: f64,
        s23: f64,
        s33: f64,
    ) -> Self {
        debug_assert!(det3(s11, s12, s13, s22, s23, s33) > 0.0);
        Self {
            s11,
            s12,
            s13,
            s22,
            s23,
            s33,
        }
    }

    pub fn s11(&self) -> f64 {
        self.s11
    }
    pub fn s12(&self) -> f64 {
        self.s12
    }
    pub fn s13(&self) -> f64 {
        self.s13
    }
    pub fn s22(&self) -> f64 {
        self.s22
    }
    pub fn s23(&self) -> f64 {
        self.s23
    }
    pub fn s33(&self) -> f64 {
        self.s33
    }

    /// Dense 3×3 form.
    pub fn to_matrix(&self) -> [[f64; 3]; 3] {
        [
            [self.s11, self.s12, self.s13],
            [self.s12, self.s22, self.s23],
            [self.s13, self.s23, self.s33],
        ]
    }

    /// Determinant.
    pub fn det(&self) -> f64 {
        det3(self.s11, self.s12, self.s13, self.s22, self.s23, self.s33)
    }

    /// Lower-triangular Cholesky factor L with Σ = L Lᵀ.
    pub fn cholesky_lower(&self) -> [[f64; 3]; 3] {
        let l11 = self.s11.sqrt();
        let l21 = self.s12 / l11;
        let l31 = self.s13 / l11;
        let l22 = (self.s22 - l21 * l21).sqrt();
        let l32 = (self.s23 - l31 * l21) / l22;
        let l33 = (self.s33 - l31 * l31 - l32 * l32).sqrt();
        [[l11, 0.0, 0.0], [l21, l22, 0.0], [l31, l32, l33]]
    }

    /// The three correlation coefficients.
    pub fn correlations(&self) -> CorrTriple {
        let d1 = self.s11.sqrt();
        let d2 = self.s22.sqrt();
        let d3 = self.s33.sqrt();
        CorrTriple {
            rho12: self.s12 / (d1 * d2),
            rho13: self.s13 / (d1 * d3),
            rho23: self.s23 / (d2 * d3),
        }
    }

    /// Partial correlation of (X1, X2) given X3:
    /// ρ12·3 = (ρ12 − ρ13ρ23) / √((1−ρ13²)(1−ρ23²)).
    pub fn partial_corr_12_given_3(&self) -> f64 {
        let c = self.correlations();
        (c.rho12 - c.rho13 * c.rho23)
            / ((1.0 - c.rho13 * c.rho13) * (1.0 - c.rho23 * c.rho23)).sqrt()
    }
}

/// Determinant of a symmetric 3×3 given its six entries.
pub(crate) fn det3(s11: f64, s12: f64, s13: f64, s22: f64, s23: f64, s33: f64) -> f64 {
    s11 * s22 * s33 + 2.0 * s12 * s23 * s13 - s11 * s23 * s23 - s13 * s13 * s22 - s12 * s12 * s33
}

/// The three sample correlations of a [`Cov3`]. All lie in (−1, 1) when the
/// source matrix is positive definite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrTriple {
    pub rho12: f64,
    pub rho13: f64,
    pub rho23: f64,
}

/// Sample covariance plus sample size: the sufficient statistic for every
/// operation in this crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleStats {
    cov: Cov3,
    n: usize,
}

impl SampleStats {
    /// Bundle a validated covariance with a sample size (n ≥ 1).
    pub fn new(cov: Cov3, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::TooFewSamples { need: 1, got: 0 });
        }
        Ok(Self { cov, n })
    }

    pub fn cov(&self) -> &Cov3 {
        &self.cov
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// Sample covariance of an n×3 data matrix.
///
/// With `center = false` (the default convention) this is XᵀX/n, i.e. the
/// scatter matrix about zero divided by `n`. With `center = true` the column
/// means are subtracted first; the divisor stays `n`, not `n − 1`.
///
/// Requires n ≥ 4 so that downstream Fisher intervals are defined; collinear
/// columns surface as [`Error::NotPositiveDefinite`].
pub fn sample_covariance(data: &[[f64; 3]], center: bool) -> Result<SampleStats> {
    let n = data.len();
    if n < 4 {
        return Err(Error::TooFewSamples { need: 4, got: n });
    }
    let mut mean = [0.0f64; 3];
    if center {
        for row in data {
            for j in 0..3 {
                mean[j] += row[j];
            }
        }
        for m in &mut mean {
            *m /= n as f64;
        }
    }
    let mut acc = [0.0f64; 6]; // s11 s12 s13 s22 s23 s33
    for row in data {
        let x = [row[0] - mean[0], row[1] - mean[1], row[2] - mean[2]];
        acc[0] += x[0] * x[0];
        acc[1] += x[0] * x[1];
        acc[2] += x[0] * x[2];
        acc[3] += x[1] * x[1];
        acc[4] += x[1] * x[2];
        acc[5] += x[2] * x[2];
    }
    let inv = 1.0 / n as f64;
    let cov = Cov3::new(
        acc[0] * inv,
        acc[1] * inv,
        acc[2] * inv,
        acc[3] * inv,
        acc[4] * inv,
        acc[5] * inv,
    )?;
    SampleStats::new(cov, n)
}

/// Condition a k×k covariance on a subset of coordinates.
///
/// Returns the Schur complement Σ_AA − Σ_AB Σ_BB⁻¹ Σ_BA over the three
/// indices in `triple` (taken positionally as (X1, X2, X3)), conditioning on
/// the indices in `cond`. The sample size is carried through unchanged; the
/// Fisher-z interval rule adjusts its degrees of freedom separately.
pub fn condition_on(
    full: &DMatrix<f64>,
    n: usize,
    triple: [usize; 3],
    cond: &[usize],
) -> Result<SampleStats> {
    let k = full.nrows();
    if full.ncols() != k {
        return Err(Error::BadIndices("matrix is not square".into()));
    }
    for i in 0..k {
        for j in (i + 1)..k {
            let (a, b) = (full[(i, j)], full[(j, i)]);
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::NotSymmetric("non-finite entry".into()));
            }
            if (a - b).abs() > SYM_RTOL * a.abs().max(b.abs()).max(f64::MIN_POSITIVE) {
                return Err(Error::NotSymmetric(format!("entries ({i},{j})/({j},{i})")));
            }
        }
    }
    let mut seen = vec![false; k];
    for &idx in triple.iter().chain(cond.iter()) {
        if idx >= k {
            return Err(Error::BadIndices(format!("index {idx} out of range 0..{k}")));
        }
        if seen[idx] {
            return Err(Error::BadIndices(format!("index {idx} selected twice")));
        }
        seen[idx] = true;
    }
    if n <= k {
        return Err(Error::TooFewSamples { need: k + 1, got: n });
    }

    let sub = |rows: &[usize], cols: &[usize]| {
        DMatrix::from_fn(rows.len(), cols.len(), |i, j| full[(rows[i], cols[j])])
    };
    let a = sub(&triple, &triple);
    let schur = if cond.is_empty() {
        a
    } else {
        let b = sub(&triple, cond);
        let c = sub(cond, cond);
        let chol = c
            .cholesky()
            .ok_or_else(|| Error::NotPositiveDefinite("conditioning block".into()))?;
        let solved = chol.solve(&b.transpose()); // Σ_BB⁻¹ Σ_BA
        &a - &b * solved
    };
    // Symmetrize exactly before validation; the solve can leave ~1e-16 skew.
    let m = [
        [
            schur[(0, 0)],
            0.5 * (schur[(0, 1)] + schur[(1, 0)]),
            0.5 * (schur[(0, 2)] + schur[(2, 0)]),
        ],
        [0.0, schur[(1, 1)], 0.5 * (schur[(1, 2)] + schur[(2, 1)])],
        [0.0, 0.0, schur[(2, 2)]],
    ];
    let cov = Cov3::new(m[0][0], m[0][1], m[0][2], m[1][1], m[1][2], m[2][2])?;
    SampleStats::new(cov, n)
}
