//! Exact minimum-`ℓ^τ` representations by vertex enumeration.
//!
//! The solutions of `Φc = f` form the affine set `c₀ + ker Φ` of dimension
//! `d`. For `0 < τ ≤ 1`, `c ↦ Σ|c_j|^τ` is concave on every closed orthant,
//! and each orthant cuts the affine set in a pointed polyhedron, so the
//! minimum over that piece sits at one of its vertices. A vertex has at least
//! `d` vanishing coordinates. Enumerating every `d`-subset `S`, forcing
//! `c_S = 0` and solving for the kernel coordinates visits all of them: the
//! global minimum is exact after `C(N, d)` small linear solves.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::dictionary::{null_space, Dictionary, NullSpaceBasis};
use crate::error::{Error, Result};
use crate::linalg;
use crate::{DEFAULT_ENUMERATION_CAP, DEFAULT_VERTEX_DIM_CAP};

/// Relative residual accepted for `f ∈ range(Φ)`.
pub const RANGE_TOL: f64 = 1e-9;
/// Kernel blocks `Z_S` with smallest singular value below this are skipped.
const PIVOT_TOL: f64 = 1e-10;
/// Relative gap under which two candidate values count as tied.
const TIE_TOL: f64 = 1e-9;

/// A coefficient vector `c` with `Φc = f`, together with its `ℓ^τ` norm.
#[derive(Debug, Clone, Serialize)]
pub struct SparseRepresentation {
    pub coefficients: Vec<f64>,
    pub tau: f64,
    /// `(Σ|c_j|^τ)^{1/τ}`.
    pub norm_value: f64,
    /// Produced by an exact oracle (vertex enumeration or closed form).
    pub exact: bool,
    /// Other distinct vertices attaining the same value (ties).
    pub alternative_minimizers: usize,
}

impl SparseRepresentation {
    /// `Σ|c_j|^τ`.
    pub fn norm_pow(&self) -> f64 {
        linalg::ltau_pow(&self.coefficients, self.tau)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VertexOptions {
    /// Largest kernel dimension handled.
    pub dim_cap: usize,
    /// Largest number of `d`-subsets enumerated.
    pub enumeration_cap: f64,
}

impl Default for VertexOptions {
    fn default() -> Self {
        Self {
            dim_cap: DEFAULT_VERTEX_DIM_CAP,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

/// Precomputed pseudo-inverse, kernel basis and invertible kernel blocks of
/// one dictionary, reusable across many signals.
#[derive(Debug, Clone)]
pub struct VertexOracle {
    atoms: DMatrix<f64>,
    pinv: DMatrix<f64>,
    kernel: NullSpaceBasis,
    /// `(S, -Z_S^{-1})` for every `d`-subset with a well-conditioned block.
    blocks: Vec<(Vec<usize>, DMatrix<f64>)>,
}

impl VertexOracle {
    pub fn new(dict: &Dictionary, opts: VertexOptions) -> Result<Self> {
        let kernel = null_space(dict);
        let (n, d) = (dict.atom_count(), kernel.dim());
        if d > opts.dim_cap {
            return Err(Error::CapExceeded {
                what: "vertex oracle kernel dimension",
                count: d as f64,
                cap: opts.dim_cap as f64,
            });
        }
        let count = linalg::binomial(n, d);
        if count > opts.enumeration_cap {
            return Err(Error::CapExceeded {
                what: "vertex oracle subsets",
                count,
                cap: opts.enumeration_cap,
            });
        }
        let smax = linalg::singular_values_desc(dict.atoms())[0];
        let pinv = dict
            .atoms()
            .clone()
            .pseudo_inverse(dict.default_rank_tol() * smax)
            .map_err(|e| Error::RankDeficient(e.to_string()))?;

        let mut blocks = Vec::new();
        if d > 0 {
            for subset in (0..n).combinations(d) {
                let zs = kernel.basis.select_rows(&subset);
                let sv = linalg::singular_values_desc(&zs);
                if *sv.last().expect("d > 0") < PIVOT_TOL {
                    continue;
                }
                if let Some(inv) = zs.try_inverse() {
                    blocks.push((subset, -inv));
                }
            }
        }
        Ok(Self {
            atoms: dict.atoms().clone(),
            pinv,
            kernel,
            blocks,
        })
    }

    pub fn kernel(&self) -> &NullSpaceBasis {
        &self.kernel
    }

    /// Minimum-`ℓ²` solution `Φ⁺f`, after checking `f ∈ range(Φ)`.
    pub fn particular(&self, signal: &[f64]) -> Result<DVector<f64>> {
        if signal.len() != self.atoms.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.atoms.nrows(),
                got: signal.len(),
            });
        }
        let f = linalg::to_dvector(signal);
        let c0 = &self.pinv * &f;
        let fnorm = f.norm();
        let resid = (&self.atoms * &c0 - &f).norm();
        if resid > RANGE_TOL * fnorm.max(f64::MIN_POSITIVE) && resid > 0.0 {
            return Err(Error::NotInRange {
                residual: resid / fnorm.max(f64::MIN_POSITIVE),
            });
        }
        Ok(c0)
    }

    /// Every vertex of the solution set (in subset order). With `d = 0` this
    /// is the unique solution.
    pub fn candidates(&self, signal: &[f64]) -> Result<Vec<Vec<f64>>> {
        let c0 = self.particular(signal)?;
        if self.kernel.dim() == 0 {
            return Ok(vec![c0.iter().copied().collect()]);
        }
        Ok(self
            .blocks
            .iter()
            .map(|(subset, neg_inv)| self.vertex(&c0, subset, neg_inv))
            .collect())
    }

    fn vertex(&self, c0: &DVector<f64>, subset: &[usize], neg_inv: &DMatrix<f64>) -> Vec<f64> {
        let rhs = DVector::from_iterator(subset.len(), subset.iter().map(|&j| c0[j]));
        let lambda = neg_inv * rhs;
        let mut c: Vec<f64> = (c0 + &self.kernel.basis * lambda).iter().copied().collect();
        for &j in subset {
            c[j] = 0.0;
        }
        let scale = linalg::norm_inf(&c);
        for x in c.iter_mut() {
            if x.abs() <= 1e-13 * scale {
                *x = 0.0;
            }
        }
        c
    }

    /// Exact `argmin ‖c‖_τ` subject to `Φc = f`, `0 < τ ≤ 1`.
    ///
    /// Ties are resolved in favour of the lexicographically first subset.
    pub fn minimize(&self, signal: &[f64], tau: f64) -> Result<SparseRepresentation> {
        if !(tau > 0.0 && tau <= 1.0) {
            return Err(Error::invalid(format!("tau must lie in (0,1], got {tau}")));
        }
        let c0 = self.particular(signal)?;
        if self.kernel.dim() == 0 {
            let c: Vec<f64> = c0.iter().copied().collect();
            return Ok(representation(c, tau, 0));
        }

        let mut best: Option<(f64, Vec<f64>)> = None;
        let mut near: Vec<(f64, Vec<f64>)> = Vec::new();
        for (subset, neg_inv) in &self.blocks {
            let c = self.vertex(&c0, subset, neg_inv);
            let value = linalg::ltau_pow(&c, tau);
            match &best {
                Some((bv, _)) if value >= *bv - TIE_TOL * bv.abs() => {
                    if value <= *bv + TIE_TOL * bv.abs() {
                        near.push((value, c));
                    }
                }
                _ => {
                    if let Some((bv, bc)) = best.take() {
                        near.push((bv, bc));
                    }
                    near.retain(|(v, _)| *v <= value + TIE_TOL * value.abs());
                    best = Some((value, c));
                }
            }
        }
        let (bv, bc) = best.ok_or_else(|| {
            Error::RankDeficient("no invertible kernel block; solution set has no vertex".into())
        })?;
        let scale = linalg::norm_inf(&bc).max(f64::MIN_POSITIVE);
        let mut distinct: Vec<&Vec<f64>> = Vec::new();
        for (v, c) in &near {
            if (*v - bv).abs() > TIE_TOL * bv.abs().max(f64::MIN_POSITIVE) {
                continue;
            }
            let differs = |a: &Vec<f64>, b: &Vec<f64>| {
                a.iter().zip(b).any(|(x, y)| (x - y).abs() > 1e-9 * scale)
            };
            if differs(c, &bc) && distinct.iter().all(|d| differs(c, d)) {
                distinct.push(c);
            }
        }
        Ok(representation(bc, tau, distinct.len()))
    }
}

fn representation(c: Vec<f64>, tau: f64, ties: usize) -> SparseRepresentation {
    let norm_value = linalg::ltau_norm(&c, tau);
    SparseRepresentation {
        coefficients: c,
        tau,
        norm_value,
        exact: true,
        alternative_minimizers: ties,
    }
}

/// `‖f‖_{ℓ^τ(Φ)}` and its minimizer, `0 < τ ≤ 1`, with default caps.
pub fn min_ltau_representation(
    dict: &Dictionary,
    signal: &[f64],
    tau: f64,
) -> Result<SparseRepresentation> {
    VertexOracle::new(dict, VertexOptions::default())?.minimize(signal, tau)
}

/// Minimum-`ℓ²` coefficients `Φᵀ(ΦΦᵀ)^{-1} f`, i.e. the canonical dual-frame
/// coefficients `⟨f, φ̃_j⟩`.
pub fn min_l2_representation(dict: &Dictionary, signal: &[f64]) -> Result<SparseRepresentation> {
    MinL2Solver::new(dict)?.solve(signal)
}

/// `Φᵀ(ΦΦᵀ)^{-1}`, factored once and applied to many signals.
#[derive(Debug, Clone)]
pub struct MinL2Solver {
    dual: DMatrix<f64>,
}

impl MinL2Solver {
    pub fn new(dict: &Dictionary) -> Result<Self> {
        let phi = dict.atoms();
        let sv = linalg::singular_values_desc(phi);
        if dict.atom_count() < dict.rows()
            || *sv.last().expect("non-empty") <= dict.default_rank_tol() * sv[0]
        {
            return Err(Error::RankDeficient("ΦΦᵀ is singular (no lower frame bound)".into()));
        }
        let chol = (phi * phi.transpose())
            .cholesky()
            .ok_or_else(|| Error::RankDeficient("ΦΦᵀ is not positive definite".into()))?;
        let inv = chol.inverse();
        Ok(Self {
            dual: phi.transpose() * inv,
        })
    }

    pub fn solve(&self, signal: &[f64]) -> Result<SparseRepresentation> {
        if signal.len() != self.dual.ncols() {
            return Err(Error::DimensionMismatch {
                expected: self.dual.ncols(),
                got: signal.len(),
            });
        }
        let c: Vec<f64> = (&self.dual * linalg::to_dvector(signal)).iter().copied().collect();
        let norm_value = linalg::norm2(&c);
        Ok(SparseRepresentation {
            coefficients: c,
            tau: 2.0,
            norm_value,
            exact: true,
            alternative_minimizers: 0,
        })
    }
}

/// Evaluates `‖f‖_{ℓ^τ(Φ)}` for one dictionary: the vertex oracle for
/// `τ ≤ 1`, the minimum-`ℓ²` representation for `τ = 2`.
#[derive(Debug, Clone)]
pub enum SparsityNorm {
    Vertex(VertexOracle, f64),
    MinL2(MinL2Solver),
}

impl SparsityNorm {
    pub fn new(dict: &Dictionary, tau: f64, opts: VertexOptions) -> Result<Self> {
        if tau > 0.0 && tau <= 1.0 {
            Ok(Self::Vertex(VertexOracle::new(dict, opts)?, tau))
        } else if tau == 2.0 {
            Ok(Self::MinL2(MinL2Solver::new(dict)?))
        } else {
            Err(Error::invalid(format!("tau must lie in (0,1] or equal 2, got {tau}")))
        }
    }

    pub fn representation(&self, signal: &[f64]) -> Result<SparseRepresentation> {
        match self {
            Self::Vertex(oracle, tau) => oracle.minimize(signal, *tau),
            Self::MinL2(solver) => solver.solve(signal),
        }
    }

    pub fn norm(&self, signal: &[f64]) -> Result<f64> {
        Ok(self.representation(signal)?.norm_value)
    }
}
