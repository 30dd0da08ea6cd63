//! Restricted isometry constants by support enumeration, and the constant
//! that turns a lower RIP plus a frame bound into a Bernstein inequality.

mod lemma;

pub use lemma::{verify_lemma_ripbineq, LemmaOptions, LemmaVerification, ProbeWitness};

use itertools::Itertools;
use serde::Serialize;

use crate::dictionary::Dictionary;
use crate::error::{Error, Result};
use crate::linalg;
use crate::DEFAULT_SUPPORT_CAP;

/// Extreme squared singular values over size-`k` supports.
#[derive(Debug, Clone, Serialize)]
pub struct RipEntry {
    pub k: usize,
    /// `1 − min_I σ_min(Φ_I)²`.
    pub delta_lower: f64,
    /// `max_I σ_max(Φ_I)² − 1`.
    pub delta_upper: f64,
    pub worst_support_lower: Vec<usize>,
    pub worst_support_upper: Vec<usize>,
    pub supports_examined: usize,
    /// Every support was enumerated.
    pub certified: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RipReport {
    pub per_k: Vec<RipEntry>,
    pub certified: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct RipOptions {
    /// Enumerate supports when `C(N, k)` is at most this.
    pub cap: f64,
    /// Supports drawn otherwise.
    pub samples: usize,
    pub seed: u64,
}

impl Default for RipOptions {
    fn default() -> Self {
        Self {
            cap: DEFAULT_SUPPORT_CAP,
            samples: 10_000,
            seed: 0,
        }
    }
}

/// `(σ_min², σ_max²)` of `Φ_I`.
pub fn support_extremes(dict: &Dictionary, support: &[usize]) -> (f64, f64) {
    let sub = linalg::columns(dict.atoms(), support);
    let sv = linalg::singular_values_desc(&sub);
    let smax = sv[0];
    // more columns than rows: the k-th singular value is zero
    let smin = if support.len() > dict.rows() {
        0.0
    } else {
        *sv.last().expect("nonempty support")
    };
    (smin * smin, smax * smax)
}

/// Two-sided RIP constants at order `k`; sampled (and flagged) above the cap.
pub fn rip_constant(dict: &Dictionary, k: usize, opts: &RipOptions) -> Result<RipEntry> {
    let n = dict.atom_count();
    if k == 0 || k > n {
        return Err(Error::invalid(format!("need 1 <= k <= N = {n}, got k = {k}")));
    }
    let certified = linalg::binomial(n, k) <= opts.cap;
    let supports: Box<dyn Iterator<Item = Vec<usize>>> = if certified {
        Box::new((0..n).combinations(k))
    } else {
        let mut rng = linalg::seeded_rng(opts.seed.wrapping_add(k as u64));
        let v: Vec<Vec<usize>> = (0..opts.samples)
            .map(|_| linalg::sample_support(&mut rng, n, k))
            .collect();
        Box::new(v.into_iter())
    };
    let mut lo = (f64::INFINITY, Vec::new());
    let mut hi = (f64::NEG_INFINITY, Vec::new());
    let mut examined = 0;
    for s in supports {
        examined += 1;
        let (a, b) = support_extremes(dict, &s);
        if a < lo.0 {
            lo = (a, s.clone());
        }
        if b > hi.0 {
            hi = (b, s);
        }
    }
    Ok(RipEntry {
        k,
        delta_lower: 1.0 - lo.0,
        delta_upper: hi.0 - 1.0,
        worst_support_lower: lo.1,
        worst_support_upper: hi.1,
        supports_examined: examined,
        certified,
    })
}

/// Lower RIP constant `δ` at order `k` and its witness support.
pub fn lrip_constant(dict: &Dictionary, k: usize, opts: &RipOptions) -> Result<(f64, Vec<usize>, bool)> {
    let e = rip_constant(dict, k, opts)?;
    Ok((e.delta_lower, e.worst_support_lower, e.certified))
}

pub fn rip_report(dict: &Dictionary, kmax: usize, opts: &RipOptions) -> Result<RipReport> {
    let per_k = (1..=kmax.min(dict.atom_count()))
        .map(|k| rip_constant(dict, k, opts))
        .collect::<Result<Vec<_>>>()?;
    let certified = per_k.iter().all(|e| e.certified);
    Ok(RipReport { per_k, certified })
}

/// `max{(1−δ)^{−1/2}, A^{−1/2} κ^{1/2−1/τ}}`.
pub fn bernstein_constant_from_rip(a: f64, delta: f64, kappa: f64, tau: f64) -> Result<f64> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::invalid(format!("frame bound A must be positive, got {a}")));
    }
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::invalid(format!("delta must lie in [0,1), got {delta}")));
    }
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(Error::invalid(format!("kappa must lie in (0,1), got {kappa}")));
    }
    if !(tau > 0.0 && tau <= 2.0) {
        return Err(Error::invalid(format!("tau must lie in (0,2], got {tau}")));
    }
    Ok((1.0 - delta)
        .powf(-0.5)
        .max(a.powf(-0.5) * kappa.powf(0.5 - 1.0 / tau)))
}
