//! Finite dictionaries: construction, frame bounds and kernel analysis.
//!
//! A dictionary is a dense `m × N` matrix whose columns are the atoms.
//! Everything here is a pure function of its inputs (plus a seed for the
//! random constructions).

mod io;
pub(crate) mod perturb;

pub use io::{format_matrix, load_matrix, load_vector, parse_matrix, parse_vector, save_matrix};
pub use perturb::{perturb_null_vector, PerturbedNullVector};

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;

/// Dense real dictionary `Φ` (atoms are columns).
#[derive(Debug, Clone, PartialEq)]
pub struct Dictionary {
    atoms: DMatrix<f64>,
    label: String,
}

impl Dictionary {
    /// Wraps a matrix, checking that it is non-empty, finite, and has no
    /// zero columns.
    pub fn new(atoms: DMatrix<f64>, label: impl Into<String>) -> Result<Self> {
        if atoms.nrows() == 0 || atoms.ncols() == 0 {
            return Err(Error::invalid("dictionary must have at least one row and one atom"));
        }
        if let Some(idx) = atoms.iter().position(|x| !x.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite entry at column-major offset {idx}"
            )));
        }
        for (j, col) in atoms.column_iter().enumerate() {
            if col.norm() == 0.0 {
                return Err(Error::invalid(format!("atom {j} has zero norm")));
            }
        }
        Ok(Self {
            atoms,
            label: label.into(),
        })
    }

    pub fn atoms(&self) -> &DMatrix<f64> {
        &self.atoms
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Ambient dimension `m`.
    pub fn rows(&self) -> usize {
        self.atoms.nrows()
    }

    /// Number of atoms `N`.
    pub fn atom_count(&self) -> usize {
        self.atoms.ncols()
    }

    pub fn atom(&self, j: usize) -> Vec<f64> {
        self.atoms.column(j).iter().copied().collect()
    }

    /// `Φ c`.
    pub fn synthesize(&self, coefficients: &[f64]) -> Vec<f64> {
        assert_eq!(coefficients.len(), self.atom_count(), "coefficient length");
        let c = linalg::to_dvector(coefficients);
        (&self.atoms * c).iter().copied().collect()
    }

    /// `Φᵀ f`.
    pub fn analyze(&self, signal: &[f64]) -> Vec<f64> {
        assert_eq!(signal.len(), self.rows(), "signal length");
        let f = linalg::to_dvector(signal);
        self.atoms.tr_mul(&f).iter().copied().collect()
    }

    pub fn column_norms(&self) -> Vec<f64> {
        self.atoms.column_iter().map(|c| c.norm()).collect()
    }

    /// Quasi-normalization diagnostic: atoms whose norm leaves `[0.1, 10]`.
    pub fn quasi_normalization(&self) -> QuasiNormalization {
        let norms = self.column_norms();
        let outside: Vec<usize> = norms
            .iter()
            .enumerate()
            .filter(|(_, n)| !(QUASI_NORM_LOW..=QUASI_NORM_HIGH).contains(*n))
            .map(|(j, _)| j)
            .collect();
        QuasiNormalization {
            min_norm: norms.iter().copied().fold(f64::INFINITY, f64::min),
            max_norm: norms.iter().copied().fold(0.0, f64::max),
            outside,
        }
    }

    /// Default relative rank tolerance `max(m, N) · ε_machine`.
    pub fn default_rank_tol(&self) -> f64 {
        self.rows().max(self.atom_count()) as f64 * f64::EPSILON
    }
}

const QUASI_NORM_LOW: f64 = 0.1;
const QUASI_NORM_HIGH: f64 = 10.0;

#[derive(Debug, Clone, Serialize)]
pub struct QuasiNormalization {
    pub min_norm: f64,
    pub max_norm: f64,
    /// Atoms whose norm falls outside `[0.1, 10]`.
    pub outside: Vec<usize>,
}

impl QuasiNormalization {
    pub fn ok(&self) -> bool {
        self.outside.is_empty()
    }
}

/// Lower and upper frame bounds `A ≤ B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
}

/// `A = σ_min(Φ)²`, `B = σ_max(Φ)²` over the `m` singular values of `Φ`.
///
/// `A` is reported as zero when `Φ` is not of full row rank at the default
/// relative tolerance (in particular whenever `N < m`).
pub fn frame_bounds(dict: &Dictionary) -> FrameBounds {
    let sv = linalg::singular_values_desc(dict.atoms());
    let smax = sv[0];
    let upper = smax * smax;
    let lower = if dict.atom_count() < dict.rows() {
        0.0
    } else {
        let smin = *sv.last().expect("non-empty");
        if smin <= dict.default_rank_tol() * smax {
            0.0
        } else {
            smin * smin
        }
    };
    FrameBounds { lower, upper }
}

/// Orthonormal basis of `ker Φ`, stored as the columns of an `N × d` matrix.
#[derive(Debug, Clone)]
pub struct NullSpaceBasis {
    pub basis: DMatrix<f64>,
    /// Relative tolerance: singular values `≤ tol · σ_max` count as zero.
    pub tol: f64,
    pub rank: usize,
}

impl NullSpaceBasis {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient(&self) -> usize {
        self.basis.nrows()
    }

    pub fn vector(&self, i: usize) -> Vec<f64> {
        self.basis.column(i).iter().copied().collect()
    }
}

/// Kernel basis from the right singular vectors of `Φ` (zero-padded to a
/// square matrix when `m < N` so that the full `V` is available).
pub fn null_space_basis(dict: &Dictionary, tol: f64) -> Result<NullSpaceBasis> {
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("rank tolerance must be positive, got {tol}")));
    }
    let (m, n) = (dict.rows(), dict.atom_count());
    let padded = if m < n {
        let mut p = DMatrix::zeros(n, n);
        p.view_mut((0, 0), (m, n)).copy_from(dict.atoms());
        p
    } else {
        dict.atoms().clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let smax = svd.singular_values.max();
    let threshold = tol * smax;

    let mut null_rows: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s <= threshold)
        .map(|(i, _)| i)
        .collect();
    // m > N leaves V square already; nothing else can be in the kernel.
    null_rows.sort_unstable();
    let d = null_rows.len();
    let mut basis = DMatrix::zeros(n, d);
    for (col, &row) in null_rows.iter().enumerate() {
        for j in 0..n {
            basis[(j, col)] = v_t[(row, j)];
        }
    }
    Ok(NullSpaceBasis {
        basis,
        tol,
        rank: n - d,
    })
}

/// Convenience wrapper using [`Dictionary::default_rank_tol`].
pub fn null_space(dict: &Dictionary) -> NullSpaceBasis {
    null_space_basis(dict, dict.default_rank_tol()).expect("default tolerance is positive")
}

/// `[I_m | 1/√m · 1_m]`: Dirac basis plus the normalized DC vector.
pub fn build_dirac_dc(m: usize) -> Result<Dictionary> {
    if m == 0 {
        return Err(Error::invalid("dirac+dc requires m >= 1"));
    }
    let mut a = DMatrix::zeros(m, m + 1);
    let dc = 1.0 / (m as f64).sqrt();
    for i in 0..m {
        a[(i, i)] = 1.0;
        a[(i, m)] = dc;
    }
    Dictionary::new(a, format!("dirac-dc({m})"))
}

/// `[I_n | g]` with `g_k = -a^k`, `k = 1..n`. The extra atom is not normalized.
pub fn build_dirac_geometric(n: usize, a: f64) -> Result<Dictionary> {
    if n == 0 {
        return Err(Error::invalid("dirac+geometric requires n >= 1"));
    }
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::invalid(format!("geometric ratio must lie in (0,1), got {a}")));
    }
    let mut mat = DMatrix::zeros(n, n + 1);
    let mut pow = 1.0;
    for k in 0..n {
        mat[(k, k)] = 1.0;
        pow *= a;
        mat[(k, n)] = -pow;
    }
    Dictionary::new(mat, format!("dirac-geometric({n},{a})"))
}

/// i.i.d. `N(0, 1/m)` entries, generated column by column from `seed`.
pub fn build_gaussian(m: usize, n: usize, seed: u64) -> Result<Dictionary> {
    if m == 0 || n == 0 {
        return Err(Error::invalid("gaussian dictionary needs m, N >= 1"));
    }
    let mut rng = linalg::seeded_rng(seed);
    let scale = 1.0 / (m as f64).sqrt();
    let data: Vec<f64> = (0..m * n)
        .map(|_| {
            let g: f64 = StandardNormal.sample(&mut rng);
            g * scale
        })
        .collect();
    Dictionary::new(
        DMatrix::from_vec(m, n, data),
        format!("gaussian({m}x{n},seed={seed})"),
    )
}

/// `(N-1) × N` dictionary with orthonormal rows whose kernel is `span{z}`.
///
/// The rows are the last `N-1` rows of the Householder reflection that maps
/// `z/‖z‖` onto a multiple of `e₁`.
pub fn dictionary_from_null_vector(z: &[f64]) -> Result<Dictionary> {
    let n = z.len();
    if n < 2 {
        return Err(Error::invalid("null vector needs at least two entries"));
    }
    if z.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("null vector has non-finite entries"));
    }
    let norm = linalg::norm2(z);
    if norm == 0.0 {
        return Err(Error::invalid("null vector must be nonzero"));
    }
    let mut v = DVector::from_iterator(n, z.iter().map(|x| x / norm));
    v[0] += linalg::sign_or_one(v[0]);
    let vv = v.dot(&v);
    let mut h = DMatrix::<f64>::identity(n, n);
    h -= (&v * v.transpose()) * (2.0 / vv);
    let rows = h.rows(1, n - 1).into_owned();
    // z ∝ e_j leaves atom j identically zero; that is the intended kernel, so
    // the zero-column check is skipped here.
    if rows.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("null vector dictionary has non-finite entries"));
    }
    Ok(Dictionary {
        atoms: rows,
        label: format!("null-vector({n})"),
    })
}
