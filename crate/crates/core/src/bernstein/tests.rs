use rand::Rng;

use super::*;
use crate::dictionary::{
    build_dirac_geometric, dictionary_from_null_vector, perturb_null_vector,
};

fn geometric(a: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|k| a.powi(k as i32)).collect()
}

/// Brute-force `γ_m^z` over bitmasks.
fn gamma_m_brute(z: &[f64], m: usize) -> f64 {
    let n = z.len();
    let mut best: f64 = 0.0;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize > m {
            continue;
        }
        let rest: Vec<f64> = (0..n).filter(|j| mask & (1 << j) == 0).map(|j| z[j]).collect();
        let l2 = linalg::norm2(&rest);
        best = best.max(if l2 == 0.0 { f64::INFINITY } else { linalg::norm1(&rest) / l2 });
    }
    best
}

#[test]
fn gamma_ratio_examples() {
    assert_eq!(gamma_ratio(&[5.0, -2.0, 7.0], &[0, 2]), 1.0);
    let z = [9.0, 0.5, -0.5, 0.5, 0.5];
    assert!((gamma_ratio(&z, &[0]) - 2.0).abs() < 1e-15);
    assert!((gamma_ratio(&[3.0, 4.0], &[]) - 1.4).abs() < 1e-15);
    assert!(gamma_ratio(&[3.0, 0.0], &[0]).is_infinite());
}

#[test]
fn gamma_m_matches_bitmask_enumeration() {
    let mut rng = linalg::seeded_rng(3);
    for _ in 0..30 {
        let n = rng.random_range(3..=12);
        let z: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
        for m in 0..n {
            let g = gamma_m(&z, m, 1e6);
            assert!(g.certified);
            let b = gamma_m_brute(&z, m);
            assert!((g.value - b).abs() <= 1e-12 * b, "n={n} m={m}: {} vs {b}", g.value);
            assert!((gamma_ratio(&z, &g.witness) - g.value).abs() <= 1e-12 * b);
        }
    }
    let z = [1.0, 2.0, 0.0];
    assert!((gamma_m(&z, 0, 1e6).value - 3.0 / 5f64.sqrt()).abs() < 1e-15);
    assert!(gamma_m(&z, 2, 1e6).value.is_infinite());
}

#[test]
fn prop_a_on_geometric_and_constant_vectors() {
    let z = geometric(0.5, 10);
    let r = prop_a_sufficient(&z, 10, 1e6).unwrap();
    assert!(r.holds && r.certified);
    assert!(r.value <= 2.0, "{}", r.value);
    assert_eq!(r.excluded_m, vec![10]);

    let n = 6;
    let c = vec![1.0; n];
    let last: Vec<usize> = (0..n - 1).collect();
    assert_eq!(gamma_ratio(&c, &last), 1.0);

    // truncating the tail of a geometric vector cannot raise the value
    let mut prev = f64::INFINITY;
    for cut in (3..=10).rev() {
        let mut t = z.clone();
        t[cut..].iter_mut().for_each(|x| *x = 0.0);
        let v = prop_a_sufficient(&t, 10, 1e6).unwrap().value;
        assert!(v <= prev + 1e-12, "cut {cut}");
        prev = v;
    }
}

#[test]
fn c1_examples() {
    let e1 = c1_constant(&[1.0, 0.0, 0.0], 3).unwrap();
    assert!(e1.degenerate);
    assert_eq!(e1.value, 0.0);
    assert_eq!(c1_constant(&[1.0, 1.0], 2).unwrap().value, 1.0);
    assert!(c1_constant(&[0.0, 0.0], 2).is_err());

    let z = geometric(0.5, 8);
    let c1 = c1_constant(&z, 8).unwrap();
    // brute force: m largest entries are the first m
    let brute = (1..8)
        .map(|m| {
            let head: f64 = z[..m].iter().sum();
            let tail = linalg::norm2(&z[m..]);
            head / ((m as f64).sqrt() * tail)
        })
        .fold(0.0, f64::max);
    assert!((c1.value - brute).abs() < 1e-12);
    assert!(c1.value.is_finite());
}

#[test]
fn c2_examples_and_lower_chain() {
    assert_eq!(c2_constant(&[1.0, 1.0], 1, 1e6).unwrap().value, 1.0);
    let mut rng = linalg::seeded_rng(4);
    for _ in 0..20 {
        let n = rng.random_range(3..=9);
        let z: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
        let c2 = c2_constant(&z, n, 1e6).unwrap();
        assert!(c2.certified);
        for (m, v) in &c2.lower_form {
            assert!(*v <= c2.value + 1e-12, "m = {m}");
        }
    }
}

#[test]
fn support_optimum_examples() {
    let o = b_z_support_value(&[1.0, 1.0], &[0]).unwrap();
    assert!((o.grid_value - 2f64.sqrt()).abs() < 1e-9);
    assert!(o.attained);
    assert!((o.grid_lambda - 1.0).abs() < 1e-4);

    let o = b_z_support_value(&[0.0, 0.0, 1.0], &[0, 1]).unwrap();
    assert_eq!(o.grid_value, 1.0);
    assert!(!o.attained);

    assert!(b_z_support_value(&[1.0, 0.0], &[0]).is_err());
}

#[test]
fn corrected_closed_form_matches_grid() {
    let mut rng = linalg::seeded_rng(5);
    for _ in 0..100 {
        let n = rng.random_range(2..=10);
        let z: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let k = rng.random_range(1..n);
        let support = linalg::sample_support(&mut rng, n, k);
        let o = b_z_support_value(&z, &support).unwrap();
        assert!((o.grid_value - o.closed_form).abs() <= 1e-6 * o.closed_form);
    }
}

#[test]
fn sandwich_cases() {
    let z = geometric(0.5, 8);
    let s = sandwich_check(&z, 8, 1e6, 1e-8).unwrap();
    assert!(s.lower_holds && s.upper_holds, "{s:?}");
    assert!(s.closed_form_max_deviation < 1e-6);

    let mut d = vec![1.0];
    d.extend(std::iter::repeat_n(1e-6, 6));
    let s = sandwich_check(&d, 7, 1e6, 1e-8).unwrap();
    assert!(s.lower_holds && s.upper_holds);

    let scaled: Vec<f64> = z.iter().map(|x| 10.0 * x).collect();
    let t = sandwich_check(&scaled, 8, 1e6, 1e-8).unwrap();
    let base = sandwich_check(&z, 8, 1e6, 1e-8).unwrap();
    assert!((t.c1 - base.c1).abs() < 1e-12 * base.c1);
    assert!((t.b_sup - base.b_sup).abs() < 1e-9 * base.b_sup);
}

#[test]
fn tail_dominance_examples() {
    let z = geometric(0.5, 8);
    let t = tail_dominance_constant(&z);
    assert!((t - (1.0 - 0.5f64.powi(8)) / 0.5).abs() < 1e-15);
    assert!(t <= 2.0);
    assert!((tail_dominance_constant(&geometric(0.5, 60)) - 2.0).abs() < 1e-15);
    assert!(tail_dominance_constant(&[1.0, 0.0, 1.0]).is_infinite());
    assert_eq!(tail_dominance_constant(&[1.0, 0.0, 0.0]), 1.0);
}

#[test]
fn divergence_witness_on_three_blocks() {
    let z: Vec<f64> = (1..=16).map(|j| 0.5f64.powi(j)).collect();
    let pz = perturb_null_vector(&z, 2.0, 1.0, 2.0, &[2, 4, 16]).unwrap();
    let w = divergence_witness(&pz).unwrap();
    let bounds: Vec<f64> = w.rows.iter().map(|r| r.lower_bound).collect();
    assert_eq!(bounds, vec![1.0, 3.0]);
    assert!(w.all_hold && w.lhs1_strictly_increasing);

    let mut scaled = pz.clone();
    scaled.z_tilde.iter_mut().for_each(|x| *x *= -7.0);
    let s = divergence_witness(&scaled).unwrap();
    for (a, b) in w.rows.iter().zip(&s.rows) {
        assert!((a.lhs1 - b.lhs1).abs() < 1e-12 * a.lhs1);
        assert!((a.lhs2 - b.lhs2).abs() < 1e-12 * a.lhs2);
    }
}

#[test]
fn orthonormal_basis_ratios_stay_below_one() {
    let q = Dictionary::new(nalgebra::DMatrix::identity(4, 4), "id").unwrap();
    let r = bernstein_ratio_empirical(&q, 1.0, 4, 20, 1, &BernsteinOptions::default()).unwrap();
    assert!(r.sup_ratio <= 1.0 + 1e-12);
    assert!(r.per_m.iter().all(|row| row.exhaustive));
}

#[test]
fn report_is_monotone_in_trials_and_recomputable() {
    let d = build_dirac_geometric(5, 0.5).unwrap();
    let opts = BernsteinOptions::default();
    let small = bernstein_ratio_empirical(&d, 1.0, 3, 5, 9, &opts).unwrap();
    let big = bernstein_ratio_empirical(&d, 1.0, 3, 40, 9, &opts).unwrap();
    assert!(big.sup_ratio >= small.sup_ratio);
    let norm = SparsityNorm::new(&d, 1.0, VertexOptions::default()).unwrap();
    for row in &big.per_m {
        let c = linalg::scatter(d.atom_count(), &row.witness_support, &row.witness_coefficients);
        let v = bernstein_ratio(&d, &norm, 1.0, row.m, &c).unwrap().unwrap();
        assert!((v - row.worst_ratio).abs() <= 1e-8 * v);
    }
}

#[test]
fn prop_a_bound_controls_tight_frame_ratios() {
    let mut rng = linalg::seeded_rng(6);
    for _ in 0..5 {
        let z: Vec<f64> = (0..7).map(|_| rng.random::<f64>() - 0.5).collect();
        let d = dictionary_from_null_vector(&z).unwrap();
        let v = prop_a_sufficient(&z, 6, 1e6).unwrap().value;
        let r = bernstein_ratio_empirical(&d, 1.0, 6, 10, 2, &BernsteinOptions::default()).unwrap();
        assert!(r.sup_ratio <= 2f64.sqrt() * v.max(1.0) + 1e-6, "{} vs {v}", r.sup_ratio);
    }
}

#[test]
fn dirac_geometric_ratio_against_sandwich() {
    let n = 8;
    let d = build_dirac_geometric(n, 0.5).unwrap();
    let z = null_space(&d).vector(0);
    let s = sandwich_check(&z, n, 1e6, 1e-8).unwrap();
    let r = bernstein_ratio_empirical(&d, 1.0, n, 10, 3, &BernsteinOptions::default()).unwrap();
    assert!(r.sup_ratio.is_finite());
    assert!(r.sup_ratio <= s.c1 + 1.0, "{} vs {}", r.sup_ratio, s.c1 + 1.0);
}
