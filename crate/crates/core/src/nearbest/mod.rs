//! When is the minimum-`ℓ¹` representation also a near-best `ℓ^τ`
//! representation?
//!
//! With `s = sign(c)` and `Λ = supp(s)`, the kernel vector `z` splits `Λ` into
//! `Λ⁺ = {s_k z_k > 0}` and `Λ⁻ = {s_k z_k < 0}`. Writing `P_τ = ‖z_{Λ⁺}‖_τ^τ`
//! and `M_τ = ‖z_{Λ⁻}‖_τ^τ`, `c` is `ℓ¹`-optimal iff
//! `max(P₁, M₁) ≤ ‖z‖₁/2` for all kernel `z`, and it is within the factor
//! `ε^{τ−1}` of the best `ℓ^τ` representation iff
//! `‖z‖_τ^τ ≥ (1 + ε^{1−τ})·max(P_τ, M_τ) + (1 − (1−ε)^{1−τ})·min(P_τ, M_τ)`.

use nalgebra::DVector;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::dictionary::{Dictionary, NullSpaceBasis};
use crate::error::{Error, Result};
use crate::linalg;
use crate::sparse_norms::{VertexOptions, VertexOracle};

/// A vector in `{−1, 0, +1}^N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignPattern {
    pub s: Vec<i8>,
}

impl SignPattern {
    pub fn new(s: Vec<i8>) -> Result<Self> {
        if s.iter().any(|v| !(-1..=1).contains(v)) {
            return Err(Error::invalid("sign pattern entries must lie in {-1, 0, 1}"));
        }
        Ok(Self { s })
    }

    /// Signs of a coefficient vector (`0` stays `0`).
    pub fn of(c: &[f64]) -> Self {
        Self {
            s: c.iter().map(|x| if *x > 0.0 { 1 } else if *x < 0.0 { -1 } else { 0 }).collect(),
        }
    }

    /// `Λ = {j : s_j ≠ 0}`.
    pub fn support(&self) -> Vec<usize> {
        (0..self.s.len()).filter(|&j| self.s[j] != 0).collect()
    }
}

/// `Λ⁺`, `Λ⁻`, the zeros of `z` on `Λ`, and `Λ̄`. Entries with `z_k = 0`
/// belong to neither `Λ⁺` nor `Λ⁻`.
#[derive(Debug, Clone, Serialize)]
pub struct LambdaPartition {
    pub plus: Vec<usize>,
    pub minus: Vec<usize>,
    pub zero_on_lambda: Vec<usize>,
    pub complement: Vec<usize>,
}

impl LambdaPartition {
    pub fn new(s: &SignPattern, z: &[f64]) -> Result<Self> {
        if s.s.len() != z.len() {
            return Err(Error::DimensionMismatch {
                expected: z.len(),
                got: s.s.len(),
            });
        }
        let mut p = Self {
            plus: Vec::new(),
            minus: Vec::new(),
            zero_on_lambda: Vec::new(),
            complement: Vec::new(),
        };
        for (k, (&sk, &zk)) in s.s.iter().zip(z).enumerate() {
            let prod = f64::from(sk) * zk;
            if sk == 0 {
                p.complement.push(k);
            } else if prod > 0.0 {
                p.plus.push(k);
            } else if prod < 0.0 {
                p.minus.push(k);
            } else {
                p.zero_on_lambda.push(k);
            }
        }
        Ok(p)
    }

    fn sums(&self, z: &[f64], tau: f64) -> (f64, f64) {
        let pick = |idx: &[usize]| -> Vec<f64> { idx.iter().map(|&k| z[k]).collect() };
        (
            linalg::ltau_pow(&pick(&self.plus), tau),
            linalg::ltau_pow(&pick(&self.minus), tau),
        )
    }
}

fn check_eps_tau(eps: f64, tau: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::invalid(format!("epsilon must lie in (0,1], got {eps}")));
    }
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::invalid(format!("tau must lie in (0,1), got {tau}")));
    }
    Ok(())
}

/// `sup_{c>0} ε^{1−τ}c^τ − |c+a|^τ`.
pub fn sup_f_given_a(a: f64, eps: f64, tau: f64) -> Result<f64> {
    check_eps_tau(eps, tau)?;
    Ok(if a < 0.0 {
        eps.powf(1.0 - tau) * a.abs().powf(tau)
    } else {
        -(1.0 - eps).powf(1.0 - tau) * a.abs().powf(tau)
    })
}

/// Both bracket coefficients of the `ℓ^τ` condition.
fn coefficients(eps: f64, tau: f64) -> (f64, f64) {
    (1.0 + eps.powf(1.0 - tau), 1.0 - (1.0 - eps).powf(1.0 - tau))
}

fn ltau_holds(total: f64, p: f64, m: f64, eps: f64, tau: f64) -> bool {
    let (hi, lo) = coefficients(eps, tau);
    // relative slack absorbs round-off in the partial sums
    total * (1.0 + 1e-12) >= hi * p.max(m) + lo * p.min(m)
}

/// The near-best `ℓ^τ` condition for one pattern and one kernel vector.
pub fn condition_ltau(s: &SignPattern, z: &[f64], eps: f64, tau: f64) -> Result<bool> {
    check_eps_tau(eps, tau)?;
    let part = LambdaPartition::new(s, z)?;
    let (p, m) = part.sums(z, tau);
    Ok(ltau_holds(linalg::ltau_pow(z, tau), p, m, eps, tau))
}

/// `max(‖z_{Λ⁺}‖₁, ‖z_{Λ⁻}‖₁) ≤ ‖z‖₁/2`.
pub fn condition_l1(s: &SignPattern, z: &[f64]) -> Result<bool> {
    let part = LambdaPartition::new(s, z)?;
    let (p, m) = part.sums(z, 1.0);
    Ok(p.max(m) <= linalg::norm1(z) / 2.0 * (1.0 + 1e-12))
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimalityCheck {
    pub holds: bool,
    /// Exact for `d ≤ 1`; sampled otherwise.
    pub certified: bool,
    pub kernel_vectors_checked: usize,
}

/// `|⟨s, z⟩| ≤ ‖z_{Λ̄}‖₁` over the kernel: exact on `±z₀` when `d = 1`
/// (both sides are 1-homogeneous), sampled when `d > 1`.
pub fn l1_optimality_condition(
    s: &SignPattern,
    kernel: &NullSpaceBasis,
    samples: usize,
    seed: u64,
) -> Result<OptimalityCheck> {
    if s.s.len() != kernel.ambient() {
        return Err(Error::DimensionMismatch {
            expected: kernel.ambient(),
            got: s.s.len(),
        });
    }
    let check = |z: &[f64]| {
        let inner: f64 = s.s.iter().zip(z).map(|(a, b)| f64::from(*a) * b).sum();
        let off: f64 = s.s.iter().zip(z).filter(|(a, _)| **a == 0).map(|(_, b)| b.abs()).sum();
        inner.abs() <= off + 1e-12 * linalg::norm1(z)
    };
    let d = kernel.dim();
    let mut vectors: Vec<Vec<f64>> = Vec::new();
    for i in 0..d {
        let v = kernel.vector(i);
        vectors.push(v.iter().map(|x| -x).collect());
        vectors.push(v);
    }
    if d > 1 {
        let mut rng = linalg::seeded_rng(seed);
        for _ in 0..samples {
            let g = DVector::from_iterator(d, (0..d).map(|_| StandardNormal.sample(&mut rng)));
            let z = &kernel.basis * g;
            let n = z.norm();
            vectors.push(z.iter().map(|x| x / n).collect());
        }
    }
    Ok(OptimalityCheck {
        holds: vectors.iter().all(|z| check(z)),
        certified: d <= 1,
        kernel_vectors_checked: vectors.len(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FeasibleEpsilon {
    /// Largest `ε` (within `tol`, from below) for which every `ℓ¹`-admissible
    /// pattern passes the `ℓ^τ` condition.
    pub epsilon: f64,
    /// `ε^{τ−1}`.
    pub near_best_constant: f64,
    /// Only patterns with `Λ ∩ supp z = ∅` pass the `ℓ¹` condition.
    pub vacuous: bool,
    pub tau: f64,
    pub tol: f64,
    /// Patterns visited by the pruned enumeration (zero entries of `z` are
    /// not branched on; their sign never matters).
    pub patterns_visited: u64,
    pub patterns_passing_l1: u64,
    /// Distinct `(max, min)` pairs of `(P_τ, M_τ)` that constrain `ε`.
    pub binding_pairs: usize,
}

/// Bisection for `ε*` on a one-dimensional kernel. Both orientations `±z₀`
/// give the same conditions (`Λ⁺` and `Λ⁻` swap), so one is enumerated.
pub fn max_feasible_epsilon(
    kernel: &NullSpaceBasis,
    tau: f64,
    pattern_cap: f64,
    tol: f64,
) -> Result<FeasibleEpsilon> {
    if kernel.dim() != 1 {
        return Err(Error::invalid(format!(
            "max_feasible_epsilon needs a one-dimensional kernel, got d = {}",
            kernel.dim()
        )));
    }
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::invalid(format!("tau must lie in (0,1), got {tau}")));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tol must be positive"));
    }
    let n = kernel.ambient();
    let count = 3f64.powi(n as i32);
    if count > pattern_cap {
        return Err(Error::CapExceeded {
            what: "sign patterns",
            count,
            cap: pattern_cap,
        });
    }
    let z = kernel.vector(0);
    let half = linalg::norm1(&z) / 2.0 * (1.0 + 1e-12);
    let abs1: Vec<f64> = z.iter().map(|x| x.abs()).collect();
    let abst: Vec<f64> = z.iter().map(|x| x.abs().powf(tau)).collect();

    // (max, min) of (P_τ, M_τ) over l1-admissible patterns
    let mut pairs: Vec<(f64, f64)> = Vec::new();
    let mut visited = 0u64;
    let mut passing = 0u64;
    #[allow(clippy::too_many_arguments)]
    fn dfs(
        j: usize,
        sums: [f64; 4],
        abs1: &[f64],
        abst: &[f64],
        half: f64,
        pairs: &mut Vec<(f64, f64)>,
        visited: &mut u64,
        passing: &mut u64,
    ) {
        if j == abs1.len() {
            *visited += 1;
            *passing += 1;
            let (p, m) = (sums[2], sums[3]);
            pairs.push((p.max(m), p.min(m)));
            return;
        }
        dfs(j + 1, sums, abs1, abst, half, pairs, visited, passing);
        if abs1[j] == 0.0 {
            return;
        }
        // s_j z_j > 0 adds to Λ⁺, s_j z_j < 0 to Λ⁻
        for side in [0usize, 1] {
            let mut next = sums;
            next[side] += abs1[j];
            next[side + 2] += abst[j];
            if next[side] > half {
                *visited += 1;
                continue;
            }
            dfs(j + 1, next, abs1, abst, half, pairs, visited, passing);
        }
    }
    dfs(0, [0.0; 4], &abs1, &abst, half, &mut pairs, &mut visited, &mut passing);

    // keep the Pareto-maximal pairs: the condition is monotone in both
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(b.1.total_cmp(&a.1)));
    let mut front: Vec<(f64, f64)> = Vec::new();
    for p in pairs {
        if front.last().is_none_or(|last| p.1 > last.1) {
            front.push(p);
        }
    }
    let vacuous = front.iter().all(|&(hi, _)| hi == 0.0);
    let total: f64 = abst.iter().sum();
    let feasible = |eps: f64| front.iter().all(|&(hi, lo)| ltau_holds(total, hi, lo, eps, tau));

    let epsilon = if feasible(1.0) {
        1.0
    } else {
        let (mut lo, mut hi) = (0.0, 1.0);
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if feasible(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    Ok(FeasibleEpsilon {
        epsilon,
        near_best_constant: epsilon.powf(tau - 1.0),
        vacuous,
        tau,
        tol,
        patterns_visited: visited,
        patterns_passing_l1: passing,
        binding_pairs: front.len(),
    })
}

fn check_p_tau(p: u32, tau: f64) -> Result<()> {
    if p < 2 {
        return Err(Error::invalid(format!("p must be at least 2, got {p}")));
    }
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::invalid(format!("tau must lie in (0,1), got {tau}")));
    }
    Ok(())
}

/// Sufficient `ε` for patterns avoiding the DC atom, Dirac+DC with `m = p²`:
/// `1 / (1 + (1 + 2(1 − p^{τ−1})/(p − 1))^{1/(1−τ)})`.
pub fn dirac_dc_case1_threshold(p: u32, tau: f64) -> Result<f64> {
    check_p_tau(p, tau)?;
    let pf = f64::from(p);
    let base = 1.0 + 2.0 * (1.0 - pf.powf(tau - 1.0)) / (pf - 1.0);
    Ok(1.0 / (1.0 + base.powf(1.0 / (1.0 - tau))))
}

/// Right side `(p+1)/(p+1+2(p^{τ−1}−1))` of the DC-atom case.
fn case2_rhs(pf: f64, tau: f64) -> f64 {
    (pf + 1.0) / (pf + 1.0 + 2.0 * (pf.powf(tau - 1.0) - 1.0))
}

/// `((1−ε)/ε)^{1−τ} ≥ (p+1)/(p+1+2(p^{τ−1}−1))`.
pub fn dirac_dc_case2_condition(p: u32, tau: f64, eps: f64) -> Result<bool> {
    check_p_tau(p, tau)?;
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::invalid(format!("epsilon must lie in (0,1], got {eps}")));
    }
    Ok(((1.0 - eps) / eps).powf(1.0 - tau) >= case2_rhs(f64::from(p), tau))
}

/// The largest `ε` satisfying the DC-atom case condition.
pub fn dirac_dc_case2_max_epsilon(p: u32, tau: f64) -> Result<f64> {
    check_p_tau(p, tau)?;
    let r = case2_rhs(f64::from(p), tau);
    Ok(1.0 / (1.0 + r.powf(1.0 / (1.0 - tau))))
}

#[derive(Debug, Clone, Serialize)]
pub struct NearBestFactor {
    /// `(‖c_l1‖_τ / ‖c_τ‖_τ)^τ`.
    pub c_observed: f64,
    pub c_l1: Vec<f64>,
    pub c_tau: Vec<f64>,
    /// Other `ℓ¹` minimizers tie with `c_l1` (the guarantee assumes uniqueness).
    pub l1_ties: usize,
}

pub fn near_best_factor(dict: &Dictionary, signal: &[f64], tau: f64) -> Result<NearBestFactor> {
    near_best_factor_with(&VertexOracle::new(dict, VertexOptions::default())?, signal, tau)
}

/// As [`near_best_factor`], reusing a prepared oracle.
pub fn near_best_factor_with(oracle: &VertexOracle, signal: &[f64], tau: f64) -> Result<NearBestFactor> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::invalid(format!("tau must lie in (0,1], got {tau}")));
    }
    let l1 = oracle.minimize(signal, 1.0)?;
    let lt = oracle.minimize(signal, tau)?;
    let num = linalg::ltau_pow(&l1.coefficients, tau);
    let den = lt.norm_pow();
    let c_observed = if den == 0.0 { 1.0 } else { num / den };
    Ok(NearBestFactor {
        c_observed,
        c_l1: l1.coefficients,
        c_tau: lt.coefficients,
        l1_ties: l1.alternative_minimizers,
    })
}

#[cfg(test)]
mod tests;
