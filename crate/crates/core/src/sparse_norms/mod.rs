//! Best `k`-term approximation, sparse representations and the norms built
//! on them.

mod kfunctional;
mod vertex;

pub use kfunctional::{
    interpolation_norm, k_functional, k_functional_with, InterpolationNorm, KFunctionalOptions,
    KFunctionalValue,
};
pub use vertex::{
    min_l2_representation, min_ltau_representation, MinL2Solver, SparseRepresentation, SparsityNorm,
    VertexOptions, VertexOracle, RANGE_TOL,
};

use itertools::Itertools;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::dictionary::Dictionary;
use crate::error::{Error, Result};
use crate::linalg;
use crate::DEFAULT_ENUMERATION_CAP;

/// Relative slack under which two residuals are treated as equal.
const TIE_TOL: f64 = 1e-12;

/// A best (or greedy) `k`-term approximation `Φ_I c` of a signal.
#[derive(Debug, Clone, Serialize)]
pub struct KTermApproximation {
    pub k: usize,
    /// Ascending atom indices.
    pub support: Vec<usize>,
    /// Coefficients aligned with `support`.
    pub coefficients: Vec<f64>,
    /// `‖f − Φ_I c‖`.
    pub residual: f64,
}

impl KTermApproximation {
    /// Coefficients embedded in a length-`n` vector.
    pub fn full_coefficients(&self, n: usize) -> Vec<f64> {
        linalg::scatter(n, &self.support, &self.coefficients)
    }
}

fn check_signal(dict: &Dictionary, signal: &[f64]) -> Result<()> {
    if signal.len() != dict.rows() {
        return Err(Error::DimensionMismatch {
            expected: dict.rows(),
            got: signal.len(),
        });
    }
    if signal.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("signal has non-finite entries"));
    }
    Ok(())
}

fn project(dict: &Dictionary, signal: &[f64], support: &[usize]) -> (Vec<f64>, f64) {
    let f = linalg::to_dvector(signal);
    let sub = linalg::columns(dict.atoms(), support);
    let (x, r) = linalg::lstsq(&sub, &f);
    (x.iter().copied().collect(), r)
}

/// Global best `k`-term approximation, default enumeration cap.
pub fn best_k_term_exhaustive(dict: &Dictionary, signal: &[f64], k: usize) -> Result<KTermApproximation> {
    best_k_term_exhaustive_with_cap(dict, signal, k, DEFAULT_ENUMERATION_CAP)
}

/// Enumerates every size-`k` support and keeps the smallest least-squares
/// residual; ties go to the lexicographically smallest support.
pub fn best_k_term_exhaustive_with_cap(
    dict: &Dictionary,
    signal: &[f64],
    k: usize,
    cap: f64,
) -> Result<KTermApproximation> {
    check_signal(dict, signal)?;
    let n = dict.atom_count();
    if k > n {
        return Err(Error::invalid(format!("k = {k} exceeds the number of atoms {n}")));
    }
    let count = linalg::binomial(n, k);
    if count > cap {
        return Err(Error::CapExceeded {
            what: "best k-term supports",
            count,
            cap,
        });
    }
    let scale = linalg::norm2(signal);
    let mut best: Option<KTermApproximation> = None;
    for support in (0..n).combinations(k) {
        let (coefficients, residual) = project(dict, signal, &support);
        let better = match &best {
            None => true,
            Some(b) => residual < b.residual - TIE_TOL * scale,
        };
        if better {
            best = Some(KTermApproximation {
                k,
                support,
                coefficients,
                residual,
            });
        }
    }
    Ok(best.expect("at least one support of size k <= n"))
}

/// Orthogonal matching pursuit: pick the atom with the largest normalized
/// correlation with the residual, then re-project on the whole support.
pub fn best_k_term_greedy(dict: &Dictionary, signal: &[f64], k: usize) -> Result<KTermApproximation> {
    check_signal(dict, signal)?;
    let (m, n) = (dict.rows(), dict.atom_count());
    if k > m.min(n) {
        return Err(Error::invalid(format!("greedy k = {k} exceeds min(m, N) = {}", m.min(n))));
    }
    let norms = dict.column_norms();
    let fnorm = linalg::norm2(signal);
    let mut support: Vec<usize> = Vec::with_capacity(k);
    let mut coefficients = Vec::new();
    let mut residual_vec = signal.to_vec();
    let mut residual = fnorm;
    for _ in 0..k {
        if residual <= 1e-14 * fnorm || residual == 0.0 {
            break;
        }
        let corr = dict.analyze(&residual_vec);
        let pick = (0..n)
            .filter(|j| !support.contains(j) && norms[*j] > 0.0)
            .map(|j| (j, corr[j].abs() / norms[j]))
            .fold(None::<(usize, f64)>, |acc, (j, v)| match acc {
                Some((_, bv)) if v <= bv => acc,
                _ => Some((j, v)),
            });
        let Some((j, _)) = pick else { break };
        support.push(j);
        support.sort_unstable();
        let (c, r) = project(dict, signal, &support);
        let approx = dict.synthesize(&linalg::scatter(n, &support, &c));
        residual_vec = signal.iter().zip(&approx).map(|(a, b)| a - b).collect();
        coefficients = c;
        residual = r;
    }
    Ok(KTermApproximation {
        k,
        support,
        coefficients,
        residual,
    })
}

/// `σ_0, …, σ_kmax`; `k` beyond `N` reuses `σ_N`. Returned as a running
/// minimum so round-off never breaks monotonicity.
pub fn sigma_profile(dict: &Dictionary, signal: &[f64], kmax: usize) -> Result<Vec<f64>> {
    sigma_profile_with_cap(dict, signal, kmax, DEFAULT_ENUMERATION_CAP)
}

pub fn sigma_profile_with_cap(
    dict: &Dictionary,
    signal: &[f64],
    kmax: usize,
    cap: f64,
) -> Result<Vec<f64>> {
    check_signal(dict, signal)?;
    let n = dict.atom_count();
    let count = linalg::subsets_up_to(n, kmax);
    if count > cap {
        return Err(Error::CapExceeded {
            what: "sigma profile supports",
            count,
            cap,
        });
    }
    let mut out = Vec::with_capacity(kmax + 1);
    let mut running = f64::INFINITY;
    for k in 0..=kmax {
        if k <= n {
            running = running.min(best_k_term_exhaustive_with_cap(dict, signal, k, cap)?.residual);
        }
        out.push(running);
    }
    Ok(out)
}

/// Dyadic approximation norm `‖f‖ + (Σ_{j≤J} [2^{js} σ_{2^j}]^q)^{1/q}`.
#[derive(Debug, Clone, Serialize)]
pub struct ApproxNorm {
    pub value: f64,
    pub signal_norm: f64,
    /// `J = ⌊log₂ kmax⌋`.
    pub dyadic_levels: usize,
    /// `σ_{2^j}` for `j = 0..=J`.
    pub dyadic_sigmas: Vec<f64>,
}

pub fn approx_norm(dict: &Dictionary, signal: &[f64], s: f64, q: f64, kmax: usize) -> Result<ApproxNorm> {
    approx_norm_with_cap(dict, signal, s, q, kmax, DEFAULT_ENUMERATION_CAP)
}

pub fn approx_norm_with_cap(
    dict: &Dictionary,
    signal: &[f64],
    s: f64,
    q: f64,
    kmax: usize,
    cap: f64,
) -> Result<ApproxNorm> {
    check_signal(dict, signal)?;
    if kmax < 2 {
        return Err(Error::invalid("approx_norm requires kmax >= 2"));
    }
    if !(q > 0.0 && q.is_finite()) || !s.is_finite() {
        return Err(Error::invalid(format!("need finite s and q > 0, got s = {s}, q = {q}")));
    }
    let levels = kmax.ilog2() as usize;
    let n = dict.atom_count();
    let mut sigmas = Vec::with_capacity(levels + 1);
    let mut running = f64::INFINITY;
    for j in 0..=levels {
        let k = (1usize << j).min(n);
        running = running.min(best_k_term_exhaustive_with_cap(dict, signal, k, cap)?.residual);
        sigmas.push(running);
    }
    let sum: f64 = sigmas
        .iter()
        .enumerate()
        .map(|(j, sig)| (2f64.powf(j as f64 * s) * sig).powf(q))
        .sum();
    let fnorm = linalg::norm2(signal);
    Ok(ApproxNorm {
        value: fnorm + sum.powf(1.0 / q),
        signal_norm: fnorm,
        dyadic_levels: levels,
        dyadic_sigmas: sigmas,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceSample {
    pub approx_norm: f64,
    pub ltau_norm: f64,
    /// `approx_norm / ltau_norm`.
    pub ratio: f64,
}

/// Two-sided comparison of the approximation-space norm with the sparsity
/// norm over random signals in the range of `Φ`.
#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub tau: f64,
    /// `r = 1/τ − 1/2`.
    pub rate: f64,
    pub kmax: usize,
    pub dyadic_levels: usize,
    pub samples: Vec<EquivalenceSample>,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// `max_ratio / min_ratio`.
    pub spread: f64,
    pub spread_limit: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct EquivalenceOptions {
    pub seed: u64,
    /// Spread above this raises `flagged`.
    pub spread_limit: f64,
    pub enumeration_cap: f64,
    pub vertex: VertexOptions,
}

impl Default for EquivalenceOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            spread_limit: 1e3,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
            vertex: VertexOptions::default(),
        }
    }
}

/// Samples `f = Φc` with standard Gaussian `c`. The `ℓ^τ` side uses the exact
/// vertex oracle for `τ ≤ 1` and the minimum-`ℓ²` representation for `τ = 2`.
pub fn theorem1_equivalence_check(
    dict: &Dictionary,
    tau: f64,
    sample_count: usize,
    kmax: usize,
    opts: EquivalenceOptions,
) -> Result<EquivalenceReport> {
    if !(tau > 0.0 && (tau <= 1.0 || tau == 2.0)) {
        return Err(Error::invalid(format!("tau must lie in (0,1] or equal 2, got {tau}")));
    }
    if sample_count == 0 {
        return Err(Error::invalid("sample_count must be positive"));
    }
    let rate = 1.0 / tau - 0.5;
    let oracle = if tau <= 1.0 {
        Some(VertexOracle::new(dict, opts.vertex)?)
    } else {
        None
    };
    let mut rng = linalg::seeded_rng(opts.seed);
    let n = dict.atom_count();
    let mut samples = Vec::with_capacity(sample_count);
    let mut levels = 0;
    while samples.len() < sample_count {
        let c: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let f = dict.synthesize(&c);
        if linalg::norm2(&f) == 0.0 {
            continue;
        }
        let a = approx_norm_with_cap(dict, &f, rate, tau, kmax, opts.enumeration_cap)?;
        levels = a.dyadic_levels;
        let l = match &oracle {
            Some(o) => o.minimize(&f, tau)?.norm_value,
            None => min_l2_representation(dict, &f)?.norm_value,
        };
        samples.push(EquivalenceSample {
            approx_norm: a.value,
            ltau_norm: l,
            ratio: a.value / l,
        });
    }
    let min_ratio = samples.iter().map(|s| s.ratio).fold(f64::INFINITY, f64::min);
    let max_ratio = samples.iter().map(|s| s.ratio).fold(0.0, f64::max);
    let spread = max_ratio / min_ratio;
    Ok(EquivalenceReport {
        tau,
        rate,
        kmax,
        dyadic_levels: levels,
        samples,
        min_ratio,
        max_ratio,
        spread,
        spread_limit: opts.spread_limit,
        flagged: !(spread.is_finite() && spread <= opts.spread_limit),
    })
}
