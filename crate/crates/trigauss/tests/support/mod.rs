//! Independent numerical oracles for the acceptance suite. Nothing here
//! calls back into the library's computation paths.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha12Rng;

/// ln Γ(x) by the Lanczos approximation.
pub fn ln_gamma(x: f64) -> f64 {
    const G: [f64; 6] = [
        76.18009172947146,
        -86.50532032941677,
        24.01409824083091,
        -1.231739572450155,
        0.1208650973866179e-2,
        -0.5395239384953e-5,
    ];
    let mut y = x;
    let tmp = x + 5.5;
    let tmp = tmp - (x + 0.5) * tmp.ln();
    let mut ser = 1.000000000190015;
    for g in G {
        y += 1.0;
        ser += g / y;
    }
    -tmp + (2.5066282746310005 * ser / x).ln()
}

/// Regularized lower incomplete gamma P(a, x), by power series for
/// x < a + 1 and the Lentz continued fraction otherwise.
pub fn reg_lower_gamma(a: f64, x: f64) -> f64 {
    assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        // series expansion
        let mut ap = a;
        let mut sum = 1.0 / a;
        let mut del = sum;
        for _ in 0..500 {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if del.abs() < sum.abs() * 1e-16 {
                break;
            }
        }
        sum * (-x + a * x.ln() - ln_gamma(a)).exp()
    } else {
        // continued fraction for Q(a, x)
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        let q = (-x + a * x.ln() - ln_gamma(a)).exp() * h;
        1.0 - q
    }
}

/// Quantile of the χ²₁ distribution by bisection on the regularized
/// incomplete gamma.
pub fn chi2_1_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0);
    let cdf = |x: f64| reg_lower_gamma(0.5, x / 2.0);
    let (mut lo, mut hi) = (0.0f64, 200.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Survival function of the Kolmogorov distribution,
/// Q(x) = 2 Σ (−1)^{k−1} exp(−2k²x²).
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..101 {
        let term = (-2.0 * (k as f64) * (k as f64) * x * x).exp();
        sum += sign * term;
        if term < 1e-12 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Two-sample Kolmogorov–Smirnov statistic and asymptotic p-value.
pub fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> (f64, f64) {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let x = a[i].min(b[j]);
        while i < n && a[i] <= x {
            i += 1;
        }
        while j < m && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let en = ((n as f64 * m as f64) / (n as f64 + m as f64)).sqrt();
    let p = kolmogorov_sf(d * (en + 0.12 + 0.11 / en));
    (d, p)
}

/// One-sample KS statistic against a reference CDF; `xs` must be sorted.
pub fn ks_one_sample(xs: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - f).abs());
    }
    d
}

/// Nelder–Mead minimization, enough for smooth 5-dimensional problems.
pub fn nelder_mead(f: impl Fn(&[f64]) -> f64, x0: &[f64], scale: f64, iters: usize) -> (Vec<f64>, f64) {
    let dim = x0.len();
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..dim {
        let mut v = x0.to_vec();
        v[i] += scale * x0[i].abs().max(0.1);
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    for _ in 0..iters {
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        let best = order[0];
        let worst = order[dim];
        let second_worst = order[dim - 1];
        if (values[worst] - values[best]).abs()
            <= 1e-14 * (values[best].abs() + values[worst].abs()).max(1e-14)
        {
            break;
        }
        let mut centroid = vec![0.0; dim];
        for &idx in &order[..dim] {
            for k in 0..dim {
                centroid[k] += simplex[idx][k] / dim as f64;
            }
        }
        let point = |t: f64| -> Vec<f64> {
            (0..dim)
                .map(|k| centroid[k] + t * (simplex[worst][k] - centroid[k]))
                .collect()
        };
        let refl = point(-1.0);
        let f_refl = f(&refl);
        if f_refl < values[best] {
            let exp = point(-2.0);
            let f_exp = f(&exp);
            if f_exp < f_refl {
                simplex[worst] = exp;
                values[worst] = f_exp;
            } else {
                simplex[worst] = refl;
                values[worst] = f_refl;
            }
        } else if f_refl < values[second_worst] {
            simplex[worst] = refl;
            values[worst] = f_refl;
        } else {
            let contr = point(0.5);
            let f_contr = f(&contr);
            if f_contr < values[worst] {
                simplex[worst] = contr;
                values[worst] = f_contr;
            } else {
                let best_pt = simplex[best].clone();
                for idx in 0..=dim {
                    if idx == best {
                        continue;
                    }
                    for k in 0..dim {
                        simplex[idx][k] = 0.5 * (simplex[idx][k] + best_pt[k]);
                    }
                    values[idx] = f(&simplex[idx]);
                }
            }
        }
    }
    let mut best = 0;
    for i in 1..values.len() {
        if values[i] < values[best] {
            best = i;
        }
    }
    (simplex[best].clone(), values[best])
}

/// Schur complement over `keep` given `cond`, using plain Gaussian
/// elimination with partial pivoting (independent of nalgebra).
#[allow(clippy::needless_range_loop)]
pub fn schur_complement_gauss(full: &[Vec<f64>], keep: &[usize], cond: &[usize]) -> Vec<Vec<f64>> {
    let kb = cond.len();
    let ka = keep.len();
    let mut a: Vec<Vec<f64>> = keep
        .iter()
        .map(|&i| keep.iter().map(|&j| full[i][j]).collect())
        .collect();
    if kb == 0 {
        return a;
    }
    // solve C X = B^T for X (kb × ka), C = cond block, B = keep×cond block
    let mut aug: Vec<Vec<f64>> = cond
        .iter()
        .map(|&i| {
            cond.iter()
                .map(|&j| full[i][j])
                .chain(keep.iter().map(|&j| full[i][j]))
                .collect()
        })
        .collect();
    for col in 0..kb {
        let pivot = (col..kb)
            .max_by(|&r1, &r2| aug[r1][col].abs().total_cmp(&aug[r2][col].abs()))
            .unwrap();
        aug.swap(col, pivot);
        let p = aug[col][col];
        assert!(p.abs() > 1e-14, "singular conditioning block");
        for r in 0..kb {
            if r == col {
                continue;
            }
            let factor = aug[r][col] / p;
            for c in col..(kb + ka) {
                aug[r][c] -= factor * aug[col][c];
            }
        }
    }
    // x[r][j] = solution row r, rhs column j
    let x: Vec<Vec<f64>> = (0..kb)
        .map(|r| (0..ka).map(|j| aug[r][kb + j] / aug[r][r]).collect())
        .collect();
    for i in 0..ka {
        for j in 0..ka {
            let mut dot = 0.0;
            for r in 0..kb {
                dot += full[keep[i]][cond[r]] * x[r][j];
            }
            a[i][j] -= dot;
        }
    }
    a
}

/// Adaptive Simpson quadrature.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
    }
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let left = simpson(f, a, m);
        let right = simpson(f, m, b);
        if depth == 0 || (left + right - whole).abs() < 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            recurse(f, a, m, left, tol / 2.0, depth - 1)
                + recurse(f, m, b, right, tol / 2.0, depth - 1)
        }
    }
    recurse(f, a, b, simpson(f, a, b), tol, 40)
}

/// Random PD covariance as a scatter of m standard-normal rows.
pub fn random_pd(rng: &mut ChaCha12Rng, rows: usize) -> trigauss::Cov3 {
    loop {
        let mut acc = [0.0f64; 6];
        for _ in 0..rows {
            let x: [f64; 3] = [
                rng.sample(rand_distr::StandardNormal),
                rng.sample(rand_distr::StandardNormal),
                rng.sample(rand_distr::StandardNormal),
            ];
            acc[0] += x[0] * x[0];
            acc[1] += x[0] * x[1];
            acc[2] += x[0] * x[2];
            acc[3] += x[1] * x[1];
            acc[4] += x[1] * x[2];
            acc[5] += x[2] * x[2];
        }
        let m = rows as f64;
        if let Ok(c) = trigauss::Cov3::new(
            acc[0] / m,
            acc[1] / m,
            acc[2] / m,
            acc[3] / m,
            acc[4] / m,
            acc[5] / m,
        ) {
            return c;
        }
    }
}

/// The 5×5 correlation matrix of (V, X, U, W, Y) from the occupational
/// mobility study.
pub fn blau_duncan_matrix() -> Vec<Vec<f64>> {
    vec![
        vec![1.000, 0.516, 0.453, 0.332, 0.322],
        vec![0.516, 1.000, 0.438, 0.417, 0.405],
        vec![0.453, 0.438, 1.000, 0.538, 0.596],
        vec![0.332, 0.417, 0.538, 1.000, 0.541],
        vec![0.322, 0.405, 0.596, 0.541, 1.000],
    ]
}
