//! Closed-form bounds for Gaussian dictionaries (entries `N(0, 1/m)`): lower
//! RIP and frame bounds with their failure probabilities, the redundancy
//! threshold `t(R)` with the derived `γ(R)`, `m(R)`, and a Monte-Carlo
//! comparison of the bounds with sampled dictionaries.

use serde::Serialize;

use crate::dictionary::{build_gaussian, frame_bounds};
use crate::error::{Error, Result};
use crate::rip::{lrip_constant, RipOptions};

/// `c = 8√2·e`.
pub const C_CONST: f64 = 8.0 * std::f64::consts::SQRT_2 * std::f64::consts::E;

/// `R₀ = (1 + 4/c)²`, beyond which `γ(R) = 2t(R)(1 + log R)`.
pub fn r0() -> f64 {
    (1.0 + 4.0 / C_CONST).powi(2)
}

/// `√(k/m)·(1 + (1+ε)√(2(1 + log(N/k))))`.
pub fn eta(k: usize, m: usize, n: usize, eps: f64) -> Result<f64> {
    if k == 0 || m == 0 || k > n {
        return Err(Error::invalid(format!("need 1 <= k <= N and m >= 1, got k={k}, m={m}, N={n}")));
    }
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::invalid(format!("eps must be nonnegative, got {eps}")));
    }
    let (k, m, n) = (k as f64, m as f64, n as f64);
    Ok((k / m).sqrt() * (1.0 + (1.0 + eps) * (2.0 * (1.0 + (n / k).ln())).sqrt()))
}

/// `exp(−2εk(1 + log(N/k)))`.
pub fn lrip_failure_probability(k: usize, n: usize, eps: f64) -> Result<f64> {
    if k == 0 || k > n {
        return Err(Error::invalid(format!("need 1 <= k <= N, got k={k}, N={n}")));
    }
    if !(eps > 0.0) {
        return Err(Error::invalid(format!("eps must be positive, got {eps}")));
    }
    let (k, n) = (k as f64, n as f64);
    Ok((-2.0 * eps * k * (1.0 + (n / k).ln())).exp().min(1.0))
}

#[derive(Debug, Clone, Serialize)]
pub struct FrameBoundEstimates {
    /// `(√(N/m) − 1 − ε)²`, or `0` when the base is negative.
    pub a_lower: f64,
    /// `(√(N/m) + 1 + ε)²`.
    pub b_upper: f64,
    /// `exp(−ε²m/2)`, for each bound separately.
    pub fail_probability: f64,
    /// The lower bound was clamped to zero.
    pub a_vacuous: bool,
}

pub fn frame_bound_estimates(m: usize, n: usize, eps: f64) -> Result<FrameBoundEstimates> {
    if m == 0 || n <= m {
        return Err(Error::invalid(format!("need N > m >= 1, got m={m}, N={n}")));
    }
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::invalid(format!("eps must be nonnegative, got {eps}")));
    }
    let root = (n as f64 / m as f64).sqrt();
    let base = root - 1.0 - eps;
    Ok(FrameBoundEstimates {
        a_lower: if base > 0.0 { base * base } else { 0.0 },
        b_upper: (root + 1.0 + eps).powi(2),
        fail_probability: (-eps * eps * m as f64 / 2.0).exp().min(1.0),
        a_vacuous: base <= 0.0,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct GaussianBoundSet {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub eps: f64,
    pub eta: f64,
    pub lrip_fail_prob: f64,
    /// `1 − η ≤ 0`: the LRIP bound says nothing.
    pub lrip_vacuous: bool,
    pub frame_eps: f64,
    pub frame_a_lb: f64,
    pub frame_b_ub: f64,
    pub frame_fail_prob: f64,
    pub frame_a_vacuous: bool,
}

/// All bounds at once; the RIP `ε` and the frame `ε` are independent.
pub fn gaussian_bound_set(m: usize, n: usize, k: usize, eps: f64, frame_eps: f64) -> Result<GaussianBoundSet> {
    let e = eta(k, m, n, eps)?;
    let f = frame_bound_estimates(m, n, frame_eps)?;
    Ok(GaussianBoundSet {
        m,
        n,
        k,
        eps,
        eta: e,
        lrip_fail_prob: lrip_failure_probability(k, n, eps)?,
        lrip_vacuous: e >= 1.0,
        frame_eps,
        frame_a_lb: f.a_lower,
        frame_b_ub: f.b_upper,
        frame_fail_prob: f.fail_probability,
        frame_a_vacuous: f.a_vacuous,
    })
}

fn check_r(r: f64) -> Result<()> {
    if !(r > 1.0 && r.is_finite()) {
        return Err(Error::invalid(format!("redundancy R must exceed 1, got {r}")));
    }
    Ok(())
}

/// `t(R) = [c²(1 + log R)]^{−1−1/log R}`.
pub fn t_of_r(r: f64) -> Result<f64> {
    check_r(r)?;
    let l = r.ln();
    Ok((C_CONST * C_CONST * (1.0 + l)).powf(-1.0 - 1.0 / l))
}

/// `min(2t(R)(1 + log R), (√R − 1)²/8, 1/2)`.
pub fn gamma_of_r(r: f64) -> Result<f64> {
    let t = t_of_r(r)?;
    Ok((2.0 * t * (1.0 + r.ln()))
        .min((r.sqrt() - 1.0).powi(2) / 8.0)
        .min(0.5))
}

/// `m(R) = 2/t(R)`.
pub fn m_of_r(r: f64) -> Result<f64> {
    Ok(2.0 / t_of_r(r)?)
}

/// `max(2, 2(√R − 1)^{−1}[t(R)/(2R)]^{1/2−1/τ})`.
pub fn bernstein_constant_gaussian(r: f64, tau: f64) -> Result<f64> {
    if !(tau > 0.0 && tau <= 2.0) {
        return Err(Error::invalid(format!("tau must lie in (0,2], got {tau}")));
    }
    let t = t_of_r(r)?;
    Ok((2.0 / (r.sqrt() - 1.0) * (t / (2.0 * r)).powf(0.5 - 1.0 / tau)).max(2.0))
}

/// `η(t) = √t(1 + 2√2·√(log(eR/t)))`: the RIP constant at `ε = 1` as a
/// function of `t = k/m`.
pub fn eta_of_ratio(t: f64, r: f64) -> f64 {
    let a = 2.0 * std::f64::consts::SQRT_2;
    let b = std::f64::consts::E * r;
    t.sqrt() * (1.0 + a * (b / t).ln().sqrt())
}

#[derive(Debug, Clone, Serialize)]
pub struct RedundancyConstants {
    pub r: f64,
    pub t_r: f64,
    pub gamma_r: f64,
    pub m_r: f64,
    pub c_const: f64,
    /// `2t(R)(1 + log R)`.
    pub two_t_log: f64,
    /// `η(t(R))`; the threshold is built so that this is `≤ 1/2`.
    pub eta_at_t_r: f64,
    pub eta_bound_holds: bool,
}

impl RedundancyConstants {
    pub fn new(r: f64) -> Result<Self> {
        let t = t_of_r(r)?;
        let e = eta_of_ratio(t, r);
        Ok(Self {
            r,
            t_r: t,
            gamma_r: gamma_of_r(r)?,
            m_r: 2.0 / t,
            c_const: C_CONST,
            two_t_log: 2.0 * t * (1.0 + r.ln()),
            eta_at_t_r: e,
            eta_bound_holds: e <= 0.5,
        })
    }

    /// Bernstein constant of the Gaussian dictionary at this redundancy.
    pub fn bernstein_bound(&self, tau: f64) -> Result<f64> {
        bernstein_constant_gaussian(self.r, tau)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundCheck {
    pub label: &'static str,
    pub bound_probability: f64,
    pub violations: usize,
    pub trials: usize,
    /// `bound + 3√(bound(1−bound)/trials)`, as a fraction of trials.
    pub allowed_fraction: f64,
    pub observed_fraction: f64,
    pub vacuous: bool,
    pub consistent: bool,
}

impl BoundCheck {
    fn new(label: &'static str, p: f64, violations: usize, trials: usize, vacuous: bool) -> Self {
        let sd = (p * (1.0 - p) / trials as f64).sqrt();
        let allowed = p + 3.0 * sd;
        let observed = violations as f64 / trials as f64;
        Self {
            label,
            bound_probability: p,
            violations,
            trials,
            allowed_fraction: allowed,
            observed_fraction: observed,
            vacuous,
            consistent: observed <= allowed,
        }
    }
}

/// Statistical comparison of sampled dictionaries with the bounds. This is a
/// soft check: a failure means the bounds and the sampler disagree beyond
/// three binomial standard deviations, not a proof of anything.
#[derive(Debug, Clone, Serialize)]
pub struct MonteCarloReport {
    pub bounds: GaussianBoundSet,
    pub lrip: BoundCheck,
    pub frame_lower: BoundCheck,
    pub frame_upper: BoundCheck,
    /// Every per-trial LRIP constant came from full support enumeration.
    pub exact_delta: bool,
    pub seed: u64,
}

/// Trial `i` uses dictionary seed `seed + i`. The RIP and frame checks share
/// `eps`.
pub fn monte_carlo_consistency(
    m: usize,
    n: usize,
    k: usize,
    eps: f64,
    trials: usize,
    seed: u64,
    rip: &RipOptions,
) -> Result<MonteCarloReport> {
    if trials == 0 {
        return Err(Error::invalid("trials must be positive"));
    }
    let bounds = gaussian_bound_set(m, n, k, eps, eps)?;
    let threshold = 1.0 - bounds.eta;
    let mut lrip_bad = 0;
    let mut low_bad = 0;
    let mut high_bad = 0;
    let mut exact = true;
    for i in 0..trials {
        let d = build_gaussian(m, n, seed.wrapping_add(i as u64))?;
        let (delta, _, certified) = lrip_constant(&d, k, rip)?;
        exact &= certified;
        let smin = (1.0 - delta).max(0.0).sqrt();
        if smin < threshold {
            lrip_bad += 1;
        }
        let fb = frame_bounds(&d);
        if fb.lower < bounds.frame_a_lb {
            low_bad += 1;
        }
        if fb.upper > bounds.frame_b_ub {
            high_bad += 1;
        }
    }
    Ok(MonteCarloReport {
        lrip: BoundCheck::new("lower RIP", bounds.lrip_fail_prob, lrip_bad, trials, bounds.lrip_vacuous),
        frame_lower: BoundCheck::new(
            "lower frame bound",
            bounds.frame_fail_prob,
            low_bad,
            trials,
            bounds.frame_a_vacuous,
        ),
        frame_upper: BoundCheck::new("upper frame bound", bounds.frame_fail_prob, high_bad, trials, false),
        bounds,
        exact_delta: exact,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent evaluation of `t(R)` through `exp`/`ln` of the exponent.
    fn t_direct(r: f64) -> f64 {
        let c2 = 128.0 * std::f64::consts::E.powi(2);
        let l = r.ln();
        (-(1.0 + 1.0 / l) * (c2 * (1.0 + l)).ln()).exp()
    }

    #[test]
    fn constants() {
        assert!((C_CONST * C_CONST - 128.0 * std::f64::consts::E.powi(2)).abs() < 1e-10);
        let two_c = 2.0 / (C_CONST * C_CONST);
        let target = 2f64.powi(-6) * (-2.0f64).exp();
        assert!((two_c - target).abs() <= 1e-15 * target);
        let r0_alt = (1.0 + 1.0 / (8f64.sqrt() * std::f64::consts::E)).powi(2);
        assert!((r0() - r0_alt).abs() < 1e-15);
        assert!((r0() - 1.277).abs() < 1e-3);
    }

    #[test]
    fn eta_examples() {
        assert!((eta(5, 5, 5, 0.0).unwrap() - (1.0 + 2f64.sqrt())).abs() < 1e-15);
        let mut prev = 0.0;
        for k in 1..=20 {
            let v = eta(k, 20, 40, 0.5).unwrap();
            assert!(v > prev);
            prev = v;
        }
        assert!(eta(3, 10, 40, 1.0).unwrap() > eta(3, 10, 20, 1.0).unwrap());
        assert!(eta(0, 10, 20, 1.0).is_err());
    }

    #[test]
    fn probability_examples() {
        assert!((lrip_failure_probability(3, 9, 1e-14).unwrap() - 1.0).abs() < 1e-12);
        let p = lrip_failure_probability(7, 7, 0.3).unwrap();
        assert!((p - (-2.0f64 * 0.3 * 7.0).exp()).abs() < 1e-15);
        let p = lrip_failure_probability(4, 16, 1.0).unwrap();
        assert!((p - (-8.0 * (1.0 + 4f64.ln())).exp()).abs() < 1e-18);

        let f = frame_bound_estimates(8, 32, 0.0).unwrap();
        assert!((f.a_lower - 1.0).abs() < 1e-15 && (f.b_upper - 9.0).abs() < 1e-14);
        let f = frame_bound_estimates(8, 32, 1.0).unwrap();
        assert!(f.a_vacuous && f.a_lower == 0.0);
        let f = frame_bound_estimates(32, 64, 1.0).unwrap();
        assert!((f.fail_probability - (-16.0f64).exp()).abs() < 1e-20);
        assert!(frame_bound_estimates(8, 8, 1.0).is_err());
    }

    #[test]
    fn threshold_formulas_match_direct_evaluation() {
        for r in [1.1, 1.28, 1.5, 2.0, 10.0, 100.0, 1e6] {
            let t = t_of_r(r).unwrap();
            assert!(t > 0.0 && t < 1.0);
            assert!((t - t_direct(r)).abs() <= 1e-12 * t, "R = {r}");
            assert!((m_of_r(r).unwrap() * t - 2.0).abs() <= 4.0 * f64::EPSILON);
            let g = gamma_of_r(r).unwrap();
            let expect = (2.0 * t_direct(r) * (1.0 + r.ln()))
                .min((r.sqrt() - 1.0).powi(2) / 8.0)
                .min(0.5);
            assert!((g - expect).abs() <= 1e-12 * expect);
        }
        assert!(t_of_r(1.0).is_err());
    }

    #[test]
    fn two_t_log_is_increasing_and_gamma_matches_it_beyond_r0() {
        let mut prev = 0.0;
        let mut prev_gamma = 0.0;
        for i in 0..400 {
            let r = 1.3 * (1e6f64 / 1.3).powf(i as f64 / 399.0);
            let c = RedundancyConstants::new(r).unwrap();
            assert!(c.two_t_log > prev);
            assert!(c.gamma_r >= prev_gamma);
            assert_eq!(c.gamma_r, c.two_t_log);
            assert!(c.eta_bound_holds, "R = {r}");
            prev = c.two_t_log;
            prev_gamma = c.gamma_r;
        }
    }

    #[test]
    fn bernstein_constant_examples() {
        for r in [1.5, 4.0, 30.0] {
            let v = bernstein_constant_gaussian(r, 2.0).unwrap();
            assert!((v - (2.0f64).max(2.0 / (r.sqrt() - 1.0))).abs() < 1e-15);
            let mut prev = f64::INFINITY;
            for i in 1..=40 {
                let tau = 2.0 * i as f64 / 40.0;
                let b = bernstein_constant_gaussian(r, tau).unwrap();
                assert!(b >= 2.0 && b <= prev);
                prev = b;
            }
        }
        assert!(bernstein_constant_gaussian(2.0, 0.0).is_err());
    }

    #[test]
    fn monte_carlo_small_case_is_deterministic() {
        let opts = RipOptions::default();
        let a = monte_carlo_consistency(8, 16, 2, 1.0, 20, 5, &opts).unwrap();
        let b = monte_carlo_consistency(8, 16, 2, 1.0, 20, 5, &opts).unwrap();
        assert_eq!(serde_json_like(&a), serde_json_like(&b));
        assert!(a.exact_delta);
        assert_eq!(a.lrip.violations, 0);
    }

    fn serde_json_like(r: &MonteCarloReport) -> (usize, usize, usize) {
        (r.lrip.violations, r.frame_lower.violations, r.frame_upper.violations)
    }
}
