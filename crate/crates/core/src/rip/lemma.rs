//! Probing `‖Φc‖_{ℓ^τ(Φ)} ≤ C·k^{1/τ−1/2}·‖Φc‖` over `k`-sparse `c`, with `C`
//! built from the measured lower frame bound and lower RIP constant.

use itertools::Itertools;
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::{bernstein_constant_from_rip, lrip_constant, RipOptions};
use crate::dictionary::{frame_bounds, Dictionary};
use crate::error::{Error, Result};
use crate::linalg;
use crate::sparse_norms::{SparsityNorm, VertexOptions};
use crate::DEFAULT_SUPPORT_CAP;

const MAGNITUDES: [f64; 3] = [1.0, 0.5, 0.25];

#[derive(Debug, Clone, Copy)]
pub struct LemmaOptions {
    /// Sign/magnitude grid probes on every support of size `≤` this.
    pub exhaustive_kmax: usize,
    pub support_cap: f64,
    pub vertex: VertexOptions,
    /// Additive slack, scaled by `max(1, rhs)`.
    pub slack: f64,
}

impl Default for LemmaOptions {
    fn default() -> Self {
        Self {
            exhaustive_kmax: 4,
            support_cap: DEFAULT_SUPPORT_CAP,
            vertex: VertexOptions::default(),
            slack: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeWitness {
    pub support: Vec<usize>,
    pub coefficients: Vec<f64>,
    /// Left side (or its certified upper bound) over the right side.
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaVerification {
    pub tau: f64,
    pub kappa: f64,
    /// `⌈κN⌉`.
    pub k0: usize,
    pub delta: f64,
    pub delta_certified: bool,
    pub frame_lower: f64,
    /// `None` when the hypotheses `A > 0`, `δ < 1` fail.
    pub constant: Option<f64>,
    pub hypotheses_met: bool,
    /// Left side from the exact oracle (otherwise from explicit representations).
    pub exact_oracle: bool,
    pub exhaustive_probes: usize,
    pub random_probes: usize,
    pub violations: usize,
    /// Upper bound too weak to decide (only without the exact oracle).
    pub undecided: usize,
    pub max_ratio: f64,
    pub worst: Option<ProbeWitness>,
    /// `‖Φ⁺Φc‖₂ ≤ A^{−1/2}‖Φc‖` on probes with `k > κN`.
    pub dual_frame_checks: usize,
    pub dual_frame_violations: usize,
}

impl LemmaVerification {
    pub fn passed(&self) -> bool {
        self.hypotheses_met && self.violations == 0 && self.undecided == 0 && self.dual_frame_violations == 0
    }
}

/// Sign/magnitude grid modulo global scaling: first sign `+1`, at least one
/// magnitude equal to `1`.
fn grid_patterns(k: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let mags = (0..k).map(|_| MAGNITUDES.iter().copied()).multi_cartesian_product();
    let mags: Vec<Vec<f64>> = if k == 0 { vec![vec![]] } else { mags.collect() };
    for mag in mags.into_iter().filter(|m| m.contains(&1.0)) {
        for bits in 0u32..(1 << k.saturating_sub(1)) {
            let c = mag
                .iter()
                .enumerate()
                .map(|(i, v)| if i > 0 && bits & (1 << (i - 1)) != 0 { -v } else { *v })
                .collect();
            out.push(c);
        }
    }
    out
}

struct Checker<'a> {
    dict: &'a Dictionary,
    tau: f64,
    r: f64,
    constant: f64,
    frame_lower: f64,
    kappa_n: f64,
    norm: Option<SparsityNorm>,
    /// `Φ⁺Φ`: coefficients ↦ canonical dual-frame coefficients of `Φc`.
    projector: DMatrix<f64>,
    slack: f64,
    report: LemmaVerification,
    fbuf: Vec<f64>,
}

impl Checker<'_> {
    fn probe(&mut self, support: &[usize], values: &[f64]) -> Result<()> {
        let n = self.dict.atom_count();
        let atoms = self.dict.atoms();
        // Φc accumulated column by column; probes are sparse
        let mut f = std::mem::take(&mut self.fbuf);
        f.iter_mut().for_each(|x| *x = 0.0);
        for (&j, &v) in support.iter().zip(values) {
            for (o, a) in f.iter_mut().zip(atoms.column(j).iter()) {
                *o += v * a;
            }
        }
        let result = self.judge(support, values, &f, n);
        self.fbuf = f;
        result
    }

    fn judge(&mut self, support: &[usize], values: &[f64], f: &[f64], n: usize) -> Result<()> {
        let fnorm = linalg::norm2(f);
        if fnorm <= 1e-12 * linalg::norm2(values) {
            return Ok(());
        }
        let k = support.len();
        let rhs = self.constant * (k as f64).powf(self.r) * fnorm;
        let tol = self.slack * rhs.max(1.0);

        let dual = || -> Vec<f64> {
            let mut out = vec![0.0; n];
            for (&j, &v) in support.iter().zip(values) {
                for (i, o) in out.iter_mut().enumerate() {
                    *o += self.projector[(i, j)] * v;
                }
            }
            out
        };
        let lhs = match &self.norm {
            Some(norm) => {
                let v = norm.norm(f)?;
                if v > rhs + tol {
                    self.report.violations += 1;
                }
                v
            }
            None => {
                let direct = linalg::ltau_norm(values, self.tau);
                if direct <= rhs + tol {
                    direct
                } else {
                    let v = direct.min(linalg::ltau_norm(&dual(), self.tau));
                    if v > rhs + tol {
                        self.report.undecided += 1;
                    }
                    v
                }
            }
        };
        let ratio = lhs / rhs;
        if ratio > self.report.max_ratio {
            self.report.max_ratio = ratio;
            self.report.worst = Some(ProbeWitness {
                support: support.to_vec(),
                coefficients: values.to_vec(),
                ratio,
            });
        }
        if k as f64 > self.kappa_n {
            self.report.dual_frame_checks += 1;
            let d2 = linalg::norm2(&dual());
            if d2 > fnorm / self.frame_lower.sqrt() * (1.0 + self.slack) {
                self.report.dual_frame_violations += 1;
            }
        }
        Ok(())
    }
}

/// Measures `A` and `δ(⌈κN⌉)`, builds the constant, and probes the
/// inequality with grid probes (`k ≤ exhaustive_kmax`) and `trials` random
/// Gaussian probes of uniformly drawn sparsity.
pub fn verify_lemma_ripbineq(
    dict: &Dictionary,
    tau: f64,
    kappa: f64,
    trials: usize,
    seed: u64,
    opts: &LemmaOptions,
) -> Result<LemmaVerification> {
    if !(tau == 2.0 || (tau > 0.0 && tau <= 1.0)) {
        return Err(Error::invalid(format!("tau must lie in (0,1] or equal 2, got {tau}")));
    }
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(Error::invalid(format!("kappa must lie in (0,1), got {kappa}")));
    }
    let n = dict.atom_count();
    let kappa_n = kappa * n as f64;
    let k0 = (kappa_n.ceil() as usize).clamp(1, n);
    let rip_opts = RipOptions {
        cap: opts.support_cap,
        seed,
        ..RipOptions::default()
    };
    let (delta, _, delta_certified) = lrip_constant(dict, k0, &rip_opts)?;
    let frame_lower = frame_bounds(dict).lower;
    let hypotheses_met = frame_lower > 0.0 && delta < 1.0;
    let constant = if hypotheses_met {
        Some(bernstein_constant_from_rip(frame_lower, delta.max(0.0), kappa, tau)?)
    } else {
        None
    };
    let mut report = LemmaVerification {
        tau,
        kappa,
        k0,
        delta,
        delta_certified,
        frame_lower,
        constant,
        hypotheses_met,
        exact_oracle: false,
        exhaustive_probes: 0,
        random_probes: 0,
        violations: 0,
        undecided: 0,
        max_ratio: 0.0,
        worst: None,
        dual_frame_checks: 0,
        dual_frame_violations: 0,
    };
    let Some(constant) = constant else {
        return Ok(report);
    };

    let norm = match SparsityNorm::new(dict, tau, opts.vertex) {
        Ok(nrm) => Some(nrm),
        Err(Error::CapExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    report.exact_oracle = norm.is_some();
    let smax = linalg::singular_values_desc(dict.atoms())[0];
    let pinv = dict
        .atoms()
        .clone()
        .pseudo_inverse(dict.default_rank_tol() * smax)
        .map_err(|e| Error::RankDeficient(e.to_string()))?;
    let projector = pinv * dict.atoms();

    let mut checker = Checker {
        dict,
        tau,
        r: 1.0 / tau - 0.5,
        constant,
        frame_lower,
        kappa_n,
        norm,
        projector,
        slack: opts.slack,
        report,
        fbuf: vec![0.0; dict.rows()],
    };

    for k in 1..=opts.exhaustive_kmax.min(n) {
        if linalg::binomial(n, k) > opts.support_cap {
            continue;
        }
        let patterns = grid_patterns(k);
        for support in (0..n).combinations(k) {
            for values in &patterns {
                checker.probe(&support, values)?;
                checker.report.exhaustive_probes += 1;
            }
        }
    }
    let mut rng = linalg::seeded_rng(seed);
    for _ in 0..trials {
        let k = rng.random_range(1..=n);
        let support = linalg::sample_support(&mut rng, n, k);
        let values: Vec<f64> = (0..k).map(|_| StandardNormal.sample(&mut rng)).collect();
        checker.probe(&support, &values)?;
        checker.report.random_probes += 1;
    }
    Ok(checker.report)
}
