//! Bernstein-type constants: empirical lower bounds on
//! `sup ‖Φc‖_{ℓ^τ(Φ)} / (m^{1/τ−1/2} ‖Φc‖)` over `m`-sparse `c`, and the
//! null-vector functionals that bound them from above and below.

mod null_vector;

pub use null_vector::{
    b_z_support_value, c1_constant, c2_constant, divergence_witness, gamma_m, gamma_ratio,
    null_vector_stats, prop_a_sufficient, sandwich_check, tail_dominance_constant, C1Report,
    C2Report, DivergenceRow, DivergenceWitness, GammaM, NullVectorMRow, NullVectorStats,
    PropAReport, SandwichReport, SupportOptimum,
};

use itertools::Itertools;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::dictionary::{null_space, Dictionary};
use crate::error::{Error, Result};
use crate::linalg;
use crate::sparse_norms::{SparsityNorm, VertexOptions};
use crate::DEFAULT_SUPPORT_CAP;

#[derive(Debug, Clone, Serialize)]
pub struct BernsteinRow {
    pub m: usize,
    pub worst_ratio: f64,
    pub witness_support: Vec<usize>,
    /// Coefficients on `witness_support`.
    pub witness_coefficients: Vec<f64>,
    pub supports_examined: usize,
    /// All `C(N, m)` supports were visited.
    pub exhaustive: bool,
}

/// Lower bound on the Bernstein constant, one row per sparsity level.
#[derive(Debug, Clone, Serialize)]
pub struct BernsteinReport {
    pub tau: f64,
    /// `r = 1/τ − 1/2`.
    pub r: f64,
    pub per_m: Vec<BernsteinRow>,
    pub sup_ratio: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct BernsteinOptions {
    /// Supports are enumerated when `C(N, m)` is at most this.
    pub support_cap: f64,
    /// Supports drawn per level otherwise.
    pub sampled_supports: usize,
    /// Points of the `λ`-grid in the structured candidates.
    pub lambda_points: usize,
    pub vertex: VertexOptions,
}

impl Default for BernsteinOptions {
    fn default() -> Self {
        Self {
            support_cap: DEFAULT_SUPPORT_CAP,
            sampled_supports: 200,
            lambda_points: 25,
            vertex: VertexOptions::default(),
        }
    }
}

/// `‖Φc‖_{ℓ^τ(Φ)} / (m^{1/τ−1/2} ‖Φc‖)`; `None` when `Φc` vanishes.
pub fn bernstein_ratio(
    dict: &Dictionary,
    norm: &SparsityNorm,
    tau: f64,
    m: usize,
    coefficients: &[f64],
) -> Result<Option<f64>> {
    let f = dict.synthesize(coefficients);
    let fnorm = linalg::norm2(&f);
    if fnorm <= 1e-12 * linalg::norm2(coefficients) || fnorm == 0.0 {
        return Ok(None);
    }
    let r = 1.0 / tau - 0.5;
    Ok(Some(norm.norm(&f)? / ((m as f64).powf(r) * fnorm)))
}

/// For each `m ≤ mmax` and each size-`m` support, maximizes the ratio over
/// `trials` Gaussian coefficient vectors and the structured candidates
/// `c = −z_I`, `c = −[z_I + λ·sign(z_I)]` for every kernel basis vector `z`.
pub fn bernstein_ratio_empirical(
    dict: &Dictionary,
    tau: f64,
    mmax: usize,
    trials: usize,
    seed: u64,
    opts: &BernsteinOptions,
) -> Result<BernsteinReport> {
    let norm = SparsityNorm::new(dict, tau, opts.vertex)?;
    let n = dict.atom_count();
    if mmax == 0 {
        return Err(Error::invalid("mmax must be at least 1"));
    }
    let kernel = null_space(dict);
    let kernel_vectors: Vec<Vec<f64>> = (0..kernel.dim()).map(|i| kernel.vector(i)).collect();

    let mut per_m = Vec::new();
    let mut counter: u64 = 0;
    for m in 1..=mmax.min(n) {
        let exhaustive = linalg::binomial(n, m) <= opts.support_cap;
        let supports: Vec<Vec<usize>> = if exhaustive {
            (0..n).combinations(m).collect()
        } else {
            let mut rng = linalg::seeded_rng(seed.wrapping_add(m as u64));
            (0..opts.sampled_supports)
                .map(|_| linalg::sample_support(&mut rng, n, m))
                .collect()
        };
        let mut row = BernsteinRow {
            m,
            worst_ratio: 0.0,
            witness_support: Vec::new(),
            witness_coefficients: Vec::new(),
            supports_examined: supports.len(),
            exhaustive,
        };
        for support in supports {
            counter += 1;
            let mut candidates: Vec<Vec<f64>> = Vec::new();
            for z in &kernel_vectors {
                let zi: Vec<f64> = support.iter().map(|&j| z[j]).collect();
                candidates.push(zi.iter().map(|x| -x).collect());
                let scale = linalg::norm_inf(&zi).max(linalg::norm_inf(z));
                for p in 0..opts.lambda_points {
                    let e = -3.0 + 6.0 * p as f64 / (opts.lambda_points.max(2) - 1) as f64;
                    let lambda = scale * 10f64.powf(e);
                    candidates.push(
                        zi.iter()
                            .map(|x| -(x + lambda * linalg::sign_or_one(*x)))
                            .collect(),
                    );
                }
            }
            let mut rng = linalg::seeded_rng(seed ^ counter.wrapping_mul(0x9e37_79b9_7f4a_7c15));
            for _ in 0..trials {
                candidates.push((0..m).map(|_| StandardNormal.sample(&mut rng)).collect());
            }
            for c in candidates {
                let full = linalg::scatter(n, &support, &c);
                if let Some(v) = bernstein_ratio(dict, &norm, tau, m, &full)? {
                    if v > row.worst_ratio {
                        row.worst_ratio = v;
                        row.witness_support = support.clone();
                        row.witness_coefficients = c;
                    }
                }
            }
        }
        per_m.push(row);
    }
    let sup_ratio = per_m.iter().map(|r| r.worst_ratio).fold(0.0, f64::max);
    Ok(BernsteinReport {
        tau,
        r: 1.0 / tau - 0.5,
        per_m,
        sup_ratio,
    })
}

#[cfg(test)]
mod tests;
