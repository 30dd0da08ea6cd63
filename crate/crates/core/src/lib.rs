//! Desk-scale oracles for nonlinear sparse approximation in finite
//! dictionaries.
//!
//! The crate computes, exactly where combinatorics allows, the quantities
//! that tie best `k`-term approximation to sparse representations:
//!
//! * [`dictionary`]: frame bounds, kernels, named example dictionaries.
//! * [`sparse_norms`]: best `k`-term errors, minimum `ℓ^τ` representations by
//!   vertex enumeration, approximation seminorms, the `K`-functional.
//! * [`bernstein`]: Bernstein-type ratios and the null-vector constants that
//!   control them.
//! * [`rip`]: restricted isometry constants by support enumeration and the
//!   RIP-to-Bernstein constant.
//! * [`gaussian_bounds`]: closed-form probabilistic bounds for Gaussian
//!   dictionaries and Monte-Carlo consistency checks.
//! * [`nearbest`]: when the minimum `ℓ¹` representation is also near-optimal
//!   in `ℓ^τ`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bernstein;
pub mod dictionary;
pub mod error;
pub mod gaussian_bounds;
pub mod linalg;
pub mod nearbest;
pub mod rip;
pub mod sparse_norms;

pub use dictionary::{
    build_dirac_dc, build_dirac_geometric, build_gaussian, dictionary_from_null_vector,
    frame_bounds, null_space, null_space_basis, Dictionary, FrameBounds, NullSpaceBasis,
};
pub use error::{Error, Result};

/// Default cap on the number of supports enumerated by best `k`-term search.
pub const DEFAULT_ENUMERATION_CAP: f64 = 1e7;
/// Default cap on exhaustive support enumeration in Bernstein/RIP searches.
pub const DEFAULT_SUPPORT_CAP: f64 = 1e6;
/// Default cap on the kernel dimension handled by the vertex oracle.
pub const DEFAULT_VERTEX_DIM_CAP: usize = 4;
