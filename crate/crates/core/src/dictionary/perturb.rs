//! Block-plateau perturbation of a null vector.
//!
//! Starting from `z ∈ ℓ^p`, keep the head `z_1..z_{m₀}` and replace each block
//! `(m_ℓ, m_{ℓ+1}]` by the constant `γ_ℓ = C (m_{ℓ+1} - m_ℓ)^{-β}`, with `C`
//! chosen so the perturbed tail carries the same `ℓ^p` mass as the original
//! one. With fast-growing blocks the result is `ε`-close to `z` in `ℓ^p` yet
//! its tail ratios `‖z̃_{I^c}‖₁ / ‖z̃_{I^c}‖₂` blow up.
//!
//! Indices in this module are 1-based positions, matching the block
//! boundaries supplied by the caller: entry `j` lives at `z[j - 1]`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;

#[derive(Debug, Clone, Serialize)]
pub struct PerturbedNullVector {
    /// Perturbed vector, truncated after the last block boundary.
    pub z_tilde: Vec<f64>,
    /// `m₀ < m₁ < …` (`block_boundaries[0]` is `m₀`).
    pub block_boundaries: Vec<usize>,
    /// Plateau height of block `(m_ℓ, m_{ℓ+1}]`.
    pub gamma_values: Vec<f64>,
    /// Normalization constant `C` of the plateau heights.
    pub c_step3: f64,
    /// Smallest admissible `m₀` for the requested `ε`.
    pub m0_required: usize,
    pub p: f64,
    pub beta: f64,
    pub epsilon: f64,
    /// `‖z - z̃‖_p^p`, always `< ε`.
    pub distance_pow: f64,
}

impl PerturbedNullVector {
    pub fn m0(&self) -> usize {
        self.block_boundaries[0]
    }
}

/// Builds `z̃` from `z`, the caller's block boundaries `blocks = (m₀, m₁, …)`.
pub fn perturb_null_vector(
    z: &[f64],
    epsilon: f64,
    p: f64,
    beta: f64,
    blocks: &[usize],
) -> Result<PerturbedNullVector> {
    if !(epsilon > 0.0) {
        return Err(Error::invalid("epsilon must be positive"));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::invalid(format!("p must lie in (0,1], got {p}")));
    }
    if !(beta > 1.0 / p) {
        return Err(Error::invalid(format!("beta must exceed 1/p = {}", 1.0 / p)));
    }
    if blocks.len() < 2 {
        return Err(Error::invalid("need at least two block boundaries"));
    }
    if blocks[0] < 2 {
        return Err(Error::invalid("m0 must be at least 2"));
    }
    if blocks.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("block boundaries must be strictly increasing"));
    }
    let ratios: Vec<f64> = blocks
        .windows(2)
        .map(|w| w[1] as f64 / w[0] as f64)
        .collect();
    if ratios.windows(2).any(|r| r[1] <= r[0]) {
        return Err(Error::invalid(
            "block growth ratios m_{l+1}/m_l must be strictly increasing",
        ));
    }
    let last = *blocks.last().expect("len >= 2");
    if z.len() < last {
        return Err(Error::invalid(format!(
            "truncation of length {} is too short to host blocks up to {last}",
            z.len()
        )));
    }

    let abs_p: Vec<f64> = z.iter().map(|x| x.abs().powf(p)).collect();
    // tail[j] = Σ_{i ≥ j} |z_i|^p over 0-based i
    let mut tail = vec![0.0; abs_p.len() + 1];
    for i in (0..abs_p.len()).rev() {
        tail[i] = tail[i + 1] + abs_p[i];
    }
    let m0_required = (2..=z.len())
        .find(|&m0| tail[m0 - 1] < epsilon / 2.0)
        .ok_or_else(|| Error::invalid("no m0 within the truncation satisfies the tail condition"))?;
    let m0 = blocks[0];
    if m0 < m0_required {
        return Err(Error::invalid(format!(
            "first block boundary {m0} is below the required m0 = {m0_required}"
        )));
    }

    let rhs = tail[m0];
    if rhs == 0.0 {
        return Err(Error::invalid(
            "normalization has zero right-hand side (z vanishes beyond m0)",
        ));
    }
    let widths: Vec<f64> = blocks.windows(2).map(|w| (w[1] - w[0]) as f64).collect();
    let denom: f64 = widths.iter().map(|w| w.powf(1.0 - p * beta)).sum();
    let c = (rhs / denom).powf(1.0 / p);
    let gammas: Vec<f64> = widths.iter().map(|w| c * w.powf(-beta)).collect();

    let mut z_tilde = z[..m0].to_vec();
    for (w, g) in blocks.windows(2).zip(&gammas) {
        z_tilde.extend(std::iter::repeat_n(*g, w[1] - w[0]));
    }
    debug_assert_eq!(z_tilde.len(), last);

    let distance_pow: f64 = z
        .iter()
        .enumerate()
        .map(|(i, zi)| {
            let t = z_tilde.get(i).copied().unwrap_or(0.0);
            (zi - t).abs().powf(p)
        })
        .sum();
    if !(distance_pow < epsilon) {
        return Err(Error::invalid(format!(
            "perturbation distance {distance_pow} is not below epsilon {epsilon}"
        )));
    }

    Ok(PerturbedNullVector {
        z_tilde,
        block_boundaries: blocks.to_vec(),
        gamma_values: gammas,
        c_step3: c,
        m0_required,
        p,
        beta,
        epsilon,
        distance_pow,
    })
}

/// `‖v‖₁² / ‖v‖₂²` of the entries after position `head` (1-based cut).
pub(crate) fn tail_l1_l2_sq(v: &[f64], head: usize) -> f64 {
    let t = &v[head.min(v.len())..];
    let l1 = linalg::norm1(t);
    let l2 = linalg::norm2(t);
    l1 * l1 / (l2 * l2)
}
