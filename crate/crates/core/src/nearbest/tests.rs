use super::*;
use crate::dictionary::{build_dirac_dc, build_gaussian, dictionary_from_null_vector, null_space};
use rand::Rng;

/// Coarse grid over `c ∈ (0, 100]` followed by zooms around the best point.
fn sup_f_grid(a: f64, eps: f64, tau: f64, points: usize) -> f64 {
    let f = |c: f64| eps.powf(1.0 - tau) * c.powf(tau) - (c + a).abs().powf(tau);
    let (mut lo, mut hi) = (0.0f64, 100.0f64);
    let mut best = f64::NEG_INFINITY;
    for _ in 0..8 {
        let h = (hi - lo) / points as f64;
        let mut arg = lo;
        for i in 1..=points {
            let c = lo + h * i as f64;
            let v = f(c);
            if v > best {
                best = v;
                arg = c;
            }
        }
        lo = (arg - 2.0 * h).max(0.0);
        hi = arg + 2.0 * h;
    }
    best
}

#[test]
fn sup_f_matches_grid_oracle() {
    for &tau in &[0.3, 0.5, 0.8] {
        for &eps in &[0.1, 0.25, 0.5, 0.9] {
            for i in 0..=12 {
                let a = -3.0 + 0.5 * i as f64;
                let exact = sup_f_given_a(a, eps, tau).unwrap();
                let grid = sup_f_grid(a, eps, tau, 20_000);
                assert!(
                    (exact - grid).abs() <= 1e-4 * (1.0 + exact.abs()),
                    "a={a} eps={eps} tau={tau}: {exact} vs {grid}"
                );
                // the grid never beats a true supremum
                assert!(grid <= exact + 1e-12);
            }
        }
    }
}

#[test]
fn sup_f_domain() {
    assert!(sup_f_given_a(1.0, 0.0, 0.5).is_err());
    assert!(sup_f_given_a(1.0, 0.5, 1.0).is_err());
    assert_eq!(sup_f_given_a(2.0, 1.0, 0.5).unwrap(), 0.0);
    assert_eq!(sup_f_given_a(0.0, 0.3, 0.5).unwrap(), 0.0);
}

#[test]
fn partition_classifies_entries() {
    let s = SignPattern::new(vec![1, -1, 1, 0, -1]).unwrap();
    let z = [1.0, 1.0, 0.0, 5.0, -2.0];
    let p = LambdaPartition::new(&s, &z).unwrap();
    assert_eq!(p.plus, vec![0, 4]);
    assert_eq!(p.minus, vec![1]);
    assert_eq!(p.zero_on_lambda, vec![2]);
    assert_eq!(p.complement, vec![3]);
    assert!(SignPattern::new(vec![2]).is_err());
    assert!(LambdaPartition::new(&s, &z[..3]).is_err());
}

#[test]
fn l1_optimality_on_dirac_dc() {
    let dict = build_dirac_dc(4).unwrap();
    let ns = null_space(&dict);
    // z ∝ (1,1,1,1,-2): a single Dirac sign is optimal, four are not
    let one = SignPattern::new(vec![1, 0, 0, 0, 0]).unwrap();
    let four = SignPattern::new(vec![1, 1, 1, 1, 0]).unwrap();
    let r = l1_optimality_condition(&one, &ns, 0, 0).unwrap();
    assert!(r.holds && r.certified);
    assert!(!l1_optimality_condition(&four, &ns, 0, 0).unwrap().holds);
    // the DC atom alone: |−2| ≤ 4
    let dc = SignPattern::new(vec![0, 0, 0, 0, 1]).unwrap();
    assert!(l1_optimality_condition(&dc, &ns, 0, 0).unwrap().holds);
}

/// Good-sign criterion agrees with the split form for every pattern.
#[test]
fn l1_conditions_agree_exhaustively() {
    let mut rng = linalg::seeded_rng(11);
    for n in 2..=8usize {
        for trial in 0..3 {
            let z: Vec<f64> = if trial == 0 {
                null_space(&build_dirac_dc(n - 1).unwrap()).vector(0)
            } else {
                (0..n).map(|_| rng.random_range(-2.0..2.0)).collect()
            };
            let ns = null_space(&dictionary_from_null_vector(&z).unwrap());
            let z0 = ns.vector(0);
            let total = 3usize.pow(n as u32);
            for code in 0..total {
                let mut c = code;
                let s: Vec<i8> = (0..n)
                    .map(|_| {
                        let v = (c % 3) as i8 - 1;
                        c /= 3;
                        v
                    })
                    .collect();
                let s = SignPattern::new(s).unwrap();
                let good = l1_optimality_condition(&s, &ns, 0, 0).unwrap().holds;
                let split = condition_l1(&s, &z0).unwrap();
                let flipped: Vec<f64> = z0.iter().map(|x| -x).collect();
                assert_eq!(good, split, "n={n} s={:?}", s.s);
                assert_eq!(split, condition_l1(&s, &flipped).unwrap());
            }
        }
    }
}

#[test]
fn ltau_condition_is_orientation_symmetric_and_monotone() {
    let mut rng = linalg::seeded_rng(5);
    for _ in 0..200 {
        let z: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
        let s = SignPattern::new((0..6).map(|_| rng.random_range(-1i8..=1)).collect()).unwrap();
        let neg: Vec<f64> = z.iter().map(|x| -x).collect();
        let tau = 0.5;
        let mut last = true;
        for k in 1..=20 {
            let eps = k as f64 / 20.0;
            let h = condition_ltau(&s, &z, eps, tau).unwrap();
            assert_eq!(h, condition_ltau(&s, &neg, eps, tau).unwrap());
            // once it fails, larger ε keeps failing
            assert!(last || !h);
            last = h;
        }
    }
}

#[test]
fn ltau_condition_small_example() {
    // z = (1, -1), s = (1, 0): P = 1, M = 0, total = 2
    let s = SignPattern::new(vec![1, 0]).unwrap();
    let z = [1.0, -1.0];
    // 2 ≥ 1 + ε^{1/2}  holds for every ε ≤ 1
    assert!(condition_ltau(&s, &z, 1.0, 0.5).unwrap());
    let s2 = SignPattern::new(vec![1, 1]).unwrap();
    // P = M = 1: 2 ≥ 2 + ε^{1/2} − (1−ε)^{1/2}, holds iff ε ≤ 1/2
    assert!(condition_ltau(&s2, &z, 0.49, 0.5).unwrap());
    assert!(!condition_ltau(&s2, &z, 0.51, 0.5).unwrap());
}

fn brute_force_epsilon(z: &[f64], tau: f64) -> f64 {
    let n = z.len();
    let patterns: Vec<SignPattern> = (0..3usize.pow(n as u32))
        .map(|code| {
            let mut c = code;
            SignPattern::new(
                (0..n)
                    .map(|_| {
                        let v = (c % 3) as i8 - 1;
                        c /= 3;
                        v
                    })
                    .collect(),
            )
            .unwrap()
        })
        .filter(|s| condition_l1(s, z).unwrap())
        .collect();
    let ok = |eps: f64| patterns.iter().all(|s| condition_ltau(s, z, eps, tau).unwrap());
    // scan on a fine grid, then bisect in the last bracket
    let mut lo = 0.0;
    for k in 1..=1000 {
        let e = k as f64 / 1000.0;
        if ok(e) {
            lo = e;
        } else {
            let mut hi = e;
            for _ in 0..40 {
                let mid = 0.5 * (lo + hi);
                if ok(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return lo;
        }
    }
    1.0
}

#[test]
fn feasible_epsilon_matches_brute_force() {
    let mut rng = linalg::seeded_rng(21);
    for n in [3usize, 5, 7] {
        let z: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let ns = null_space(&dictionary_from_null_vector(&z).unwrap());
        for &tau in &[0.3, 0.5, 0.8] {
            let r = max_feasible_epsilon(&ns, tau, 1e7, 1e-10).unwrap();
            let b = brute_force_epsilon(&ns.vector(0), tau);
            assert!((r.epsilon - b).abs() < 1e-8, "n={n} tau={tau}: {} vs {b}", r.epsilon);
            assert!((r.near_best_constant - r.epsilon.powf(tau - 1.0)).abs() < 1e-12);
        }
    }
}

#[test]
fn dirac_dc_epsilon_and_case_bounds() {
    for p in [2u32, 3] {
        let m = (p * p) as usize;
        let ns = null_space(&build_dirac_dc(m).unwrap());
        for &tau in &[0.3, 0.5, 0.8] {
            let r = max_feasible_epsilon(&ns, tau, 1e7, 1e-10).unwrap();
            let c1 = dirac_dc_case1_threshold(p, tau).unwrap();
            let c2 = dirac_dc_case2_max_epsilon(p, tau).unwrap();
            assert!(r.epsilon >= c1.min(c2) - 1e-9, "p={p} tau={tau}");
            assert!(!r.vacuous);
        }
    }
    let ns = null_space(&build_dirac_dc(9).unwrap());
    let r = max_feasible_epsilon(&ns, 0.5, 1e7, 1e-12).unwrap();
    assert!((r.epsilon - 0.38348).abs() < 1e-4, "{}", r.epsilon);
}

#[test]
fn case_formulas() {
    let c1 = dirac_dc_case1_threshold(3, 0.5).unwrap();
    // base = 1 + 2(1 − 3^{-1/2})/2, threshold = 1/(1 + base²)
    let base = 2.0 - 1.0 / 3f64.sqrt();
    assert!((c1 - 1.0 / (1.0 + base * base)).abs() < 1e-15);
    // p → ∞ pushes the threshold to 1/2
    assert!((dirac_dc_case1_threshold(1_000_000, 0.5).unwrap() - 0.5).abs() < 1e-3);
    let c2 = dirac_dc_case2_max_epsilon(3, 0.5).unwrap();
    assert!(dirac_dc_case2_condition(3, 0.5, c2 * (1.0 - 1e-9)).unwrap());
    assert!(!dirac_dc_case2_condition(3, 0.5, c2 * (1.0 + 1e-6)).unwrap());
    assert!(!dirac_dc_case2_condition(3, 0.5, 0.5).unwrap());
    assert!(dirac_dc_case1_threshold(1, 0.5).is_err());
    assert!(dirac_dc_case2_condition(3, 1.0, 0.2).is_err());
}

#[test]
fn feasible_epsilon_edge_cases() {
    // kernel spanned by e₁: every admissible pattern avoids it
    let ns = null_space(&dictionary_from_null_vector(&[1.0, 0.0, 0.0]).unwrap());
    let r = max_feasible_epsilon(&ns, 0.5, 1e7, 1e-9).unwrap();
    assert!(r.vacuous);
    assert_eq!(r.epsilon, 1.0);
    assert_eq!(r.near_best_constant, 1.0);
    // scaling of z is irrelevant
    let a = null_space(&dictionary_from_null_vector(&[1.0, 2.0, -3.0, 0.5]).unwrap());
    let b = null_space(&dictionary_from_null_vector(&[-10.0, -20.0, 30.0, -5.0]).unwrap());
    let ea = max_feasible_epsilon(&a, 0.5, 1e7, 1e-10).unwrap().epsilon;
    let eb = max_feasible_epsilon(&b, 0.5, 1e7, 1e-10).unwrap().epsilon;
    assert!((ea - eb).abs() < 1e-9);
    // errors
    let g = null_space(&build_gaussian(3, 6, 1).unwrap());
    assert!(max_feasible_epsilon(&g, 0.5, 1e7, 1e-9).is_err());
    assert!(max_feasible_epsilon(&a, 0.5, 10.0, 1e-9).is_err());
    assert!(max_feasible_epsilon(&a, 1.0, 1e7, 1e-9).is_err());
}

#[test]
fn near_best_factor_respects_feasible_constant() {
    let dict = build_dirac_dc(9).unwrap();
    let ns = null_space(&dict);
    let bound = max_feasible_epsilon(&ns, 0.5, 1e7, 1e-12).unwrap().near_best_constant;
    let oracle = VertexOracle::new(&dict, VertexOptions::default()).unwrap();
    let mut rng = linalg::seeded_rng(3);
    for _ in 0..20 {
        let f: Vec<f64> = (0..9).map(|_| StandardNormal.sample(&mut rng)).collect();
        let r = near_best_factor_with(&oracle, &f, 0.5).unwrap();
        assert!(r.c_observed >= 1.0 - 1e-9);
        assert!(r.c_observed <= bound + 1e-6, "{} > {bound}", r.c_observed);
    }
}

#[test]
fn near_best_factor_trivial_cases() {
    // square invertible dictionary: one representation
    let dict = Dictionary::new(nalgebra::DMatrix::identity(3, 3), "id").unwrap();
    let r = near_best_factor(&dict, &[1.0, -2.0, 0.5], 0.5).unwrap();
    assert!((r.c_observed - 1.0).abs() < 1e-12);
    let r = near_best_factor(&dict, &[0.0, 0.0, 0.0], 0.5).unwrap();
    assert_eq!(r.c_observed, 1.0);
    assert!(near_best_factor(&dict, &[1.0, 0.0, 0.0], 0.0).is_err());
}
