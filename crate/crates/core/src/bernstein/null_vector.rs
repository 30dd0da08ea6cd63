//! Functionals of a single null vector `z`: tail ratios `γ_I^z`, the
//! constants `C₁(z)`, `C₂(z)`, the per-support optimum `B_z`, tail
//! dominance, and the block-growth witness for perturbed null vectors.

use itertools::Itertools;
use serde::Serialize;

use crate::dictionary::perturb::tail_l1_l2_sq;
use crate::dictionary::PerturbedNullVector;
use crate::error::{Error, Result};
use crate::linalg;

fn complement(n: usize, support: &[usize]) -> Vec<usize> {
    (0..n).filter(|j| !support.contains(j)).collect()
}

fn gather(z: &[f64], idx: &[usize]) -> Vec<f64> {
    idx.iter().map(|&j| z[j]).collect()
}

fn nnz(z: &[f64]) -> usize {
    z.iter().filter(|x| **x != 0.0).count()
}

/// `|z|` sorted in decreasing order.
fn sorted_abs(z: &[f64]) -> Vec<f64> {
    let mut a: Vec<f64> = z.iter().map(|x| x.abs()).collect();
    a.sort_by(|x, y| y.total_cmp(x));
    a
}

/// `‖z_{I^c}‖₁ / ‖z_{I^c}‖₂`; `+∞` when the complement vanishes.
pub fn gamma_ratio(z: &[f64], support: &[usize]) -> f64 {
    let rest = gather(z, &complement(z.len(), support));
    let l2 = linalg::norm2(&rest);
    if l2 == 0.0 {
        return f64::INFINITY;
    }
    linalg::norm1(&rest) / l2
}

#[derive(Debug, Clone, Serialize)]
pub struct GammaM {
    pub m: usize,
    /// `sup_{|I| ≤ m} γ_I^z`, `+∞` when some admissible `I` covers the support.
    pub value: f64,
    pub witness: Vec<usize>,
    /// Exhaustive enumeration (otherwise sampled plus the top-`m` removal).
    pub certified: bool,
}

/// `γ_m^z`, exact when `Σ_{k≤m} C(N,k) ≤ cap`.
pub fn gamma_m(z: &[f64], m: usize, cap: f64) -> GammaM {
    let n = z.len();
    if m >= nnz(z) {
        let witness: Vec<usize> = (0..n).filter(|&j| z[j] != 0.0).collect();
        return GammaM {
            m,
            value: f64::INFINITY,
            witness,
            certified: true,
        };
    }
    let mut best = (f64::NEG_INFINITY, Vec::new());
    let mut consider = |support: Vec<usize>| {
        let g = gamma_ratio(z, &support);
        if g > best.0 {
            best = (g, support);
        }
    };
    let certified = linalg::subsets_up_to(n, m) <= cap;
    if certified {
        for k in 0..=m.min(n) {
            (0..n).combinations(k).for_each(&mut consider);
        }
    } else {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| z[b].abs().total_cmp(&z[a].abs()).then(a.cmp(&b)));
        let mut top = order[..m].to_vec();
        top.sort_unstable();
        consider(top);
        let mut rng = linalg::seeded_rng(m as u64);
        for _ in 0..(cap.min(1e4) as usize) {
            consider(linalg::sample_support(&mut rng, n, m));
        }
    }
    GammaM {
        m,
        value: best.0,
        witness: best.1,
        certified,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PropAReport {
    /// `sup_m γ_m^z / √m` over admissible `m`.
    pub value: f64,
    pub holds: bool,
    pub per_m: Vec<GammaM>,
    /// `m ≥ nnz(z)`: the complement can vanish, excluded from the sup.
    pub excluded_m: Vec<usize>,
    pub certified: bool,
}

/// The sufficient condition of the general-frame analysis, on `1 ≤ m ≤ mmax`.
pub fn prop_a_sufficient(z: &[f64], mmax: usize, cap: f64) -> Result<PropAReport> {
    nonzero(z)?;
    let mut per_m = Vec::new();
    let mut excluded_m = Vec::new();
    let mut value: f64 = 0.0;
    for m in 1..=mmax.min(z.len()) {
        if m >= nnz(z) {
            excluded_m.push(m);
            continue;
        }
        let g = gamma_m(z, m, cap);
        value = value.max(g.value / (m as f64).sqrt());
        per_m.push(g);
    }
    let certified = per_m.iter().all(|g| g.certified);
    Ok(PropAReport {
        value,
        holds: value.is_finite(),
        per_m,
        excluded_m,
        certified,
    })
}

fn nonzero(z: &[f64]) -> Result<()> {
    if z.is_empty() || z.iter().all(|x| *x == 0.0) {
        return Err(Error::invalid("null vector must be nonzero"));
    }
    if z.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("null vector has non-finite entries"));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct C1Report {
    /// `sup ‖z_m‖₁ / (√m σ_m(z)₂)` over `1 ≤ m < nnz(z)`, `m ≤ mmax`; `0`
    /// when no `m` is admissible.
    pub value: f64,
    pub argmax_m: Option<usize>,
    pub terms: Vec<(usize, f64)>,
    pub excluded_m: Vec<usize>,
    /// No admissible `m` (e.g. `z` has a single nonzero entry).
    pub degenerate: bool,
}

pub fn c1_constant(z: &[f64], mmax: usize) -> Result<C1Report> {
    nonzero(z)?;
    let a = sorted_abs(z);
    let k = nnz(z);
    let mut terms = Vec::new();
    let mut excluded_m = Vec::new();
    for m in 1..=mmax.min(z.len()) {
        if m >= k {
            excluded_m.push(m);
            continue;
        }
        let head = linalg::norm1(&a[..m]);
        let sigma2 = linalg::norm2(&a[m..]);
        terms.push((m, head / ((m as f64).sqrt() * sigma2)));
    }
    let best = terms.iter().copied().fold(None::<(usize, f64)>, |acc, t| match acc {
        Some(b) if b.1 >= t.1 => Some(b),
        _ => Some(t),
    });
    Ok(C1Report {
        value: best.map_or(0.0, |b| b.1),
        argmax_m: best.map(|b| b.0),
        degenerate: terms.is_empty(),
        terms,
        excluded_m,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct C2Report {
    /// `sup_m sup_{|I|≤m} min(‖z_I‖₁, ‖z_{I^c}‖₁) / (√m ‖z_{I^c}‖₂)`.
    pub value: f64,
    pub witness: Vec<usize>,
    /// `min(‖z_m‖₁, σ_m(z)₁) / (√m σ_m(z)₂)` for admissible `m`.
    pub lower_form: Vec<(usize, f64)>,
    pub certified: bool,
}

/// For a fixed `I` the term decreases in `m`, so `m = |I|` is optimal and
/// the double sup reduces to one over `1 ≤ |I| ≤ mmax`.
pub fn c2_constant(z: &[f64], mmax: usize, cap: f64) -> Result<C2Report> {
    nonzero(z)?;
    let n = z.len();
    let mmax = mmax.min(n);
    let term = |support: &[usize]| -> Option<f64> {
        let rest = gather(z, &complement(n, support));
        let l2 = linalg::norm2(&rest);
        if l2 == 0.0 || support.is_empty() {
            return None;
        }
        let head = linalg::norm1(&gather(z, support));
        Some(head.min(linalg::norm1(&rest)) / ((support.len() as f64).sqrt() * l2))
    };
    let mut best = (0.0, Vec::new());
    let certified = linalg::subsets_up_to(n, mmax) <= cap;
    let mut consider = |support: Vec<usize>| {
        if let Some(v) = term(&support) {
            if v > best.0 {
                best = (v, support);
            }
        }
    };
    if certified {
        for k in 1..=mmax {
            (0..n).combinations(k).for_each(&mut consider);
        }
    } else {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| z[b].abs().total_cmp(&z[a].abs()).then(a.cmp(&b)));
        let mut rng = linalg::seeded_rng(0xc2);
        for k in 1..=mmax {
            let mut top = order[..k].to_vec();
            top.sort_unstable();
            consider(top);
            for _ in 0..(cap.min(1e4) as usize / mmax.max(1)) {
                consider(linalg::sample_support(&mut rng, n, k));
            }
        }
    }
    let a = sorted_abs(z);
    let lower_form = (1..=mmax)
        .filter(|&m| m < nnz(z))
        .map(|m| {
            let head = linalg::norm1(&a[..m]);
            let s1 = linalg::norm1(&a[m..]);
            let s2 = linalg::norm2(&a[m..]);
            (m, head.min(s1) / ((m as f64).sqrt() * s2))
        })
        .collect();
    Ok(C2Report {
        value: best.0,
        witness: best.1,
        lower_form,
        certified,
    })
}

/// Optimum of `‖c‖₁ / (√m √(‖c + z_I‖₂² + ‖z_{I^c}‖₂²))` over the family
/// `c = −[z_I + λ·sign(z_I)]`, `λ ≥ 0`, with `m = |I|`.
#[derive(Debug, Clone, Serialize)]
pub struct SupportOptimum {
    pub m: usize,
    /// Dense-grid value (or the `λ → ∞` limit `1` when that is larger).
    pub grid_value: f64,
    pub grid_lambda: f64,
    /// `false` when the supremum is only approached as `λ → ∞`.
    pub attained: bool,
    /// `√(1 + ‖z_I‖₁² / (m ‖z_{I^c}‖₂²))`.
    pub closed_form: f64,
    /// `√((1 + ‖z_I‖₁² / ‖z_{I^c}‖₂²) / m)`, the display with `λ²m²`.
    pub closed_form_printed: f64,
}

pub fn b_z_support_value(z: &[f64], support: &[usize]) -> Result<SupportOptimum> {
    let n = z.len();
    if support.is_empty() {
        return Err(Error::invalid("support must be nonempty"));
    }
    if support.iter().any(|&j| j >= n) {
        return Err(Error::invalid("support index out of range"));
    }
    let zi = gather(z, support);
    let rest = gather(z, &complement(n, support));
    let t = linalg::norm2(&rest);
    if t == 0.0 {
        return Err(Error::invalid("complement of the support is identically zero"));
    }
    let m = support.len();
    let mf = m as f64;
    let ratio = |lambda: f64| -> f64 {
        let c: Vec<f64> = zi.iter().map(|x| -(x + lambda * linalg::sign_or_one(*x))).collect();
        let shift: f64 = c.iter().zip(&zi).map(|(a, b)| (a + b).powi(2)).sum();
        linalg::norm1(&c) / (mf.sqrt() * (shift + t * t).sqrt())
    };

    let scale = linalg::norm_inf(z);
    let points = 2000;
    let (lo, hi) = ((scale * 1e-10).log10(), (scale * 1e10).log10());
    let mut best = (ratio(0.0), 0.0);
    let mut best_i = None;
    for i in 0..points {
        let x = lo + (hi - lo) * i as f64 / (points - 1) as f64;
        let v = ratio(10f64.powf(x));
        if v > best.0 {
            best = (v, 10f64.powf(x));
            best_i = Some(i);
        }
    }
    if let Some(i) = best_i {
        let h = (hi - lo) / (points - 1) as f64;
        let (mut a, mut b) = (lo + h * (i as f64 - 1.0), lo + h * (i as f64 + 1.0));
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..200 {
            let x1 = b - g * (b - a);
            let x2 = a + g * (b - a);
            if ratio(10f64.powf(x1)) > ratio(10f64.powf(x2)) {
                b = x2;
            } else {
                a = x1;
            }
        }
        let x = 0.5 * (a + b);
        let v = ratio(10f64.powf(x));
        if v > best.0 {
            best = (v, 10f64.powf(x));
        }
    }
    let s1 = linalg::norm1(&zi);
    // with z_I = 0 the ratio increases monotonically towards its limit 1
    let attained = s1 > 0.0;
    Ok(SupportOptimum {
        m,
        grid_value: best.0.max(1.0),
        grid_lambda: if attained { best.1 } else { f64::INFINITY },
        attained,
        closed_form: (1.0 + s1 * s1 / (mf * t * t)).sqrt(),
        closed_form_printed: ((1.0 + s1 * s1 / (t * t)) / mf).sqrt(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    pub c1: f64,
    /// `sup` of the per-support optimum over `1 ≤ |I| ≤ mmax`, `|I| < nnz(z)`.
    pub b_sup: f64,
    pub witness: Vec<usize>,
    pub lower_holds: bool,
    pub upper_holds: bool,
    /// Largest `|grid − closed form|` over the per-size witnesses.
    pub closed_form_max_deviation: f64,
    pub certified: bool,
}

/// `C₁(z) ≤ B_sup ≤ C₁(z) + 1` with relative slack `slack`.
///
/// Every admissible support is scored with the closed form; the best support
/// of each size is then re-evaluated on the `λ`-grid, which is what `b_sup`
/// reports.
pub fn sandwich_check(z: &[f64], mmax: usize, cap: f64, slack: f64) -> Result<SandwichReport> {
    let c1 = c1_constant(z, mmax)?;
    let n = z.len();
    let top = mmax.min(nnz(z).saturating_sub(1)).min(n);
    let certified = linalg::subsets_up_to(n, top) <= cap;
    let mut b_sup: f64 = 0.0;
    let mut witness = Vec::new();
    let mut deviation: f64 = 0.0;
    for k in 1..=top {
        let score = |s: &[usize]| {
            let head = linalg::norm1(&gather(z, s));
            let t = linalg::norm2(&gather(z, &complement(n, s)));
            head / t
        };
        let best = if certified {
            (0..n)
                .combinations(k)
                .map(|s| (score(&s), s))
                .fold(None::<(f64, Vec<usize>)>, |acc, c| match acc {
                    Some(b) if b.0 >= c.0 => Some(b),
                    _ => Some(c),
                })
        } else {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| z[b].abs().total_cmp(&z[a].abs()).then(a.cmp(&b)));
            let mut s = order[..k].to_vec();
            s.sort_unstable();
            Some((score(&s), s))
        };
        let Some((_, s)) = best else { continue };
        let opt = b_z_support_value(z, &s)?;
        deviation = deviation.max((opt.grid_value - opt.closed_form).abs());
        if opt.grid_value > b_sup {
            b_sup = opt.grid_value;
            witness = s;
        }
    }
    let tol = slack * c1.value.max(1.0);
    Ok(SandwichReport {
        c1: c1.value,
        b_sup,
        witness,
        lower_holds: c1.value <= b_sup + tol,
        upper_holds: b_sup <= c1.value + 1.0 + tol,
        closed_form_max_deviation: deviation,
        certified,
    })
}

/// `max_k Σ_{j≥k}|z_j| / |z_k|` up to the last nonzero entry; `+∞` if some
/// `z_k = 0` precedes a nonzero tail. The zero vector gives `0`.
pub fn tail_dominance_constant(z: &[f64]) -> f64 {
    let Some(last) = z.iter().rposition(|x| *x != 0.0) else {
        return 0.0;
    };
    let mut tail = 0.0;
    let mut worst: f64 = 0.0;
    for k in (0..=last).rev() {
        tail += z[k].abs();
        if z[k] == 0.0 {
            return f64::INFINITY;
        }
        worst = worst.max(tail / z[k].abs());
    }
    worst
}

#[derive(Debug, Clone, Serialize)]
pub struct DivergenceRow {
    pub ell: usize,
    pub m_ell: usize,
    pub m_next: usize,
    /// `‖z̃_{I^c}‖₁² / (m_ℓ ‖z̃_{I^c}‖₂²)` for `I = [1, m_ℓ]`.
    pub lhs1: f64,
    /// `‖z̃_I‖₁² / (m_ℓ ‖z̃_{I^c}‖₂²)`.
    pub lhs2: f64,
    /// `m_{ℓ+1}/m_ℓ − 1`.
    pub lower_bound: f64,
    pub holds: bool,
    /// `min(‖z̃_I‖₁, ‖z̃_{I^c}‖₁) / (√m_ℓ ‖z̃_{I^c}‖₂)`, a witness for `C₂(z̃)`.
    pub c2_term: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DivergenceWitness {
    pub rows: Vec<DivergenceRow>,
    pub lhs1_strictly_increasing: bool,
    pub all_hold: bool,
}

/// Block-by-block growth of the tail ratios of a perturbed null vector. The
/// bound at the last retained block can be an equality, so it is checked
/// with relative slack `1e-12`.
pub fn divergence_witness(pz: &PerturbedNullVector) -> Result<DivergenceWitness> {
    let b = &pz.block_boundaries;
    if b.len() < 2 {
        return Err(Error::invalid("divergence witness needs at least two blocks"));
    }
    let v = &pz.z_tilde;
    let rows: Vec<DivergenceRow> = (0..b.len() - 1)
        .map(|ell| {
            let (ml, mn) = (b[ell], b[ell + 1]);
            let head = linalg::norm1(&v[..ml]);
            let tail1 = linalg::norm1(&v[ml..]);
            let tail2 = linalg::norm2(&v[ml..]);
            let mlf = ml as f64;
            let lhs1 = tail_l1_l2_sq(v, ml) / mlf;
            let lower_bound = mn as f64 / mlf - 1.0;
            DivergenceRow {
                ell,
                m_ell: ml,
                m_next: mn,
                lhs1,
                lhs2: head * head / (mlf * tail2 * tail2),
                lower_bound,
                holds: lhs1 >= lower_bound * (1.0 - 1e-12),
                c2_term: head.min(tail1) / (mlf.sqrt() * tail2),
            }
        })
        .collect();
    Ok(DivergenceWitness {
        lhs1_strictly_increasing: rows.windows(2).all(|w| w[1].lhs1 > w[0].lhs1),
        all_hold: rows.iter().all(|r| r.holds),
        rows,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct NullVectorMRow {
    pub m: usize,
    /// `‖z_m‖₁`, the `m` largest entries.
    pub head_l1: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub gamma_m: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct NullVectorStats {
    pub z: Vec<f64>,
    pub per_m: Vec<NullVectorMRow>,
    pub c1: f64,
    pub c2: f64,
    pub tail_constant: f64,
}

/// Per-`m` statistics for `m = 0..=mmax` (capped at `N`).
pub fn null_vector_stats(z: &[f64], mmax: usize, cap: f64) -> Result<NullVectorStats> {
    nonzero(z)?;
    let a = sorted_abs(z);
    let per_m = (0..=mmax.min(z.len()))
        .map(|m| NullVectorMRow {
            m,
            head_l1: linalg::norm1(&a[..m]),
            sigma1: linalg::norm1(&a[m..]),
            sigma2: linalg::norm2(&a[m..]),
            gamma_m: gamma_m(z, m, cap).value,
        })
        .collect();
    Ok(NullVectorStats {
        z: z.to_vec(),
        per_m,
        c1: c1_constant(z, mmax)?.value,
        c2: c2_constant(z, mmax, cap)?.value,
        tail_constant: tail_dominance_constant(z),
    })
}
