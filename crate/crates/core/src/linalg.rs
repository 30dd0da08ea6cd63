//! Small numerical helpers shared by the analysis modules.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Deterministic generator used everywhere a seed is accepted.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `C(n, k)` as a float, saturating to infinity instead of overflowing.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// Number of subsets of `[n]` with at most `k` elements.
pub fn subsets_up_to(n: usize, k: usize) -> f64 {
    (0..=k.min(n)).map(|j| binomial(n, j)).sum()
}

pub fn norm1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// `Σ |v_j|^τ`. For `τ = 2` this is the squared Euclidean norm.
pub fn ltau_pow(v: &[f64], tau: f64) -> f64 {
    if tau == 1.0 {
        return norm1(v);
    }
    v.iter()
        .filter(|x| **x != 0.0)
        .map(|x| x.abs().powf(tau))
        .sum()
}

/// `(Σ |v_j|^τ)^{1/τ}`.
pub fn ltau_norm(v: &[f64], tau: f64) -> f64 {
    if tau == 1.0 {
        return norm1(v);
    }
    ltau_pow(v, tau).powf(1.0 / tau)
}

/// Sign with the convention `sign(0) = +1` (so `-0.0` is also `+1`).
pub fn sign_or_one(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Singular values in descending order.
pub fn singular_values_desc(a: &DMatrix<f64>) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = a.clone().singular_values().iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

/// Minimum-norm least-squares solution of `a x ≈ b` and its residual norm.
pub fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> (DVector<f64>, f64) {
    if a.ncols() == 0 {
        return (DVector::zeros(0), b.norm());
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let eps = (a.nrows().max(a.ncols()) as f64) * f64::EPSILON * smax;
    let x = svd
        .solve(b, eps)
        .expect("u and v were requested from the decomposition");
    let residual = (b - a * &x).norm();
    (x, residual)
}

/// Columns of `a` listed in `support`, in that order.
pub fn columns(a: &DMatrix<f64>, support: &[usize]) -> DMatrix<f64> {
    a.select_columns(support)
}

/// Embed coefficients living on `support` into a length-`n` vector.
pub fn scatter(n: usize, support: &[usize], values: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for (&j, &v) in support.iter().zip(values) {
        out[j] = v;
    }
    out
}

pub fn to_dvector(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}

/// Random `k`-subset of `0..n`, sorted ascending.
pub fn sample_support<R: rand::Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    let mut s = rand::seq::index::sample(rng, n, k).into_vec();
    s.sort_unstable();
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_small_values() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(16, 8), 12870.0);
        assert_eq!(binomial(3, 5), 0.0);
        assert_eq!(subsets_up_to(4, 2), 11.0);
    }

    #[test]
    fn ltau_pow_matches_definition() {
        let v = [3.0, -4.0, 0.0];
        assert_eq!(ltau_pow(&v, 1.0), 7.0);
        assert!((ltau_pow(&v, 2.0) - 25.0).abs() < 1e-12);
        assert!((ltau_pow(&v, 0.5) - (3f64.sqrt() + 2.0)).abs() < 1e-12);
        assert!((ltau_norm(&v, 2.0) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn sign_convention() {
        assert_eq!(sign_or_one(0.0), 1.0);
        assert_eq!(sign_or_one(-0.0), 1.0);
        assert_eq!(sign_or_one(-2.0), -1.0);
    }

    #[test]
    fn lstsq_recovers_consistent_system() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let b = DVector::from_column_slice(&[1.0, 2.0, 3.0]);
        let (x, r) = lstsq(&a, &b);
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
        assert!(r < 1e-12);
    }
}
