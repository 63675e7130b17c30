use ncfun_core::linalg::{inverse, operator_norm, power_iteration_norm, NormPolicy};
use ncfun_core::ncderiv::{delta_k, dk_diag, dk_fd, dk_iterated, dk_multilinear, jet1};
use ncfun_core::ncfun::{from_poly, from_realization};
use ncfun_core::realization::{
    contractivity_scan, delta_polydisk, eval_delta, resolvent_norm, scalar_neumann_coefficients,
};
use ncfun_core::sample::SampleRng;
use ncfun_core::taylor::{tail_bound, taylor_expand};
use ncfun_core::tuple::{direct_sum, MatrixTuple};
use ncfun_core::verify::{check_direct_sum, relative_gap};
use ncfun_core::{ComplexMatrix, Domain, FreePoly, Realization, Word, C64};
use proptest::prelude::*;

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(48)
}

fn poly_case(seed: u64) -> (FreePoly, SampleRng) {
    let mut rng = SampleRng::new(seed);
    let d = 1 + rng.index(3);
    (rng.poly(d, 4, 0.5), rng)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn trie_evaluation_matches_naive(seed in any::<u64>(), n in 1usize..5) {
        let (p, mut rng) = poly_case(seed);
        let x = rng.tuple(p.arity(), n, 0.7);
        let gap = relative_gap(&p.evaluate(&x).unwrap(), &p.evaluate_naive(&x).unwrap());
        prop_assert!(gap < 1e-12);
    }

    #[test]
    fn evaluation_is_an_algebra_map(seed in any::<u64>(), n in 1usize..4) {
        let (p, mut rng) = poly_case(seed);
        let q = rng.poly(p.arity(), 3, 0.5);
        let x = rng.tuple(p.arity(), n, 0.6);
        let (px, qx) = (p.evaluate(&x).unwrap(), q.evaluate(&x).unwrap());
        prop_assert!(relative_gap(&(&p * &q).evaluate(&x).unwrap(), &(&px * &qx)) < 1e-12);
        prop_assert!(relative_gap(&(&p + &q).evaluate(&x).unwrap(), &(&px + &qx)) < 1e-12);
    }

    #[test]
    fn word_order_is_graded(a in proptest::collection::vec(0usize..3, 0..5),
                            b in proptest::collection::vec(0usize..3, 0..5)) {
        let (wa, wb) = (Word::new(a.clone()), Word::new(b.clone()));
        if a.len() < b.len() {
            prop_assert!(wa < wb);
        }
        prop_assert_eq!(wa.cmp(&wb), wb.cmp(&wa).reverse());
    }

    #[test]
    fn direct_sums_split(seed in any::<u64>(), n in 1usize..4, m in 1usize..4) {
        let (p, mut rng) = poly_case(seed);
        let f = from_poly(p.clone(), Domain::polydisk(1.0).unwrap());
        let xs = [rng.tuple_with_norm(p.arity(), n, 0.5).unwrap(), rng.tuple_with_norm(p.arity(), m, 0.5).unwrap()];
        prop_assert!(check_direct_sum(&f, &xs, 1e-10).unwrap().passed);
        prop_assert_eq!(direct_sum(&xs).unwrap().dim(), n + m);
    }

    #[test]
    fn delta_is_linear_in_each_direction(seed in any::<u64>(), k in 1usize..4, n in 1usize..3) {
        let (p, mut rng) = poly_case(seed);
        let d = p.arity();
        let f = from_poly(p, Domain::polydisk(1.0).unwrap());
        let xs: Vec<_> = (0..=k).map(|_| rng.tuple_with_norm(d, n, 0.4).unwrap()).collect();
        let hs: Vec<_> = (0..k).map(|_| rng.tuple_with_norm(d, n, 1.0).unwrap()).collect();
        let slot = rng.index(k);
        let c = rng.complex_gaussian();
        let mut scaled = hs.clone();
        scaled[slot] = hs[slot].scale(c);
        let base = delta_k(&f, &xs, &hs).unwrap().delta;
        let got = delta_k(&f, &xs, &scaled).unwrap().delta;
        prop_assert!(relative_gap(&got, &base.scale(c)) < 1e-10);
    }

    #[test]
    fn finite_differences_are_exact_on_shifted_points(seed in any::<u64>(), k in 1usize..4, lambda in 0.05f64..1.0) {
        let (p, mut rng) = poly_case(seed);
        let d = p.arity();
        let f = from_poly(p, Domain::polydisk(4.0).unwrap());
        let x = rng.tuple_with_norm(d, 2, 0.3).unwrap();
        let h = rng.tuple_with_norm(d, 2, 0.3).unwrap();
        let xs: Vec<_> = (0..=k).map(|j| x.try_add(&h.scale_real(j as f64 * lambda)).unwrap()).collect();
        let factorial: f64 = (1..=k).map(|i| i as f64).product();
        let shifted = delta_k(&f, &xs, &vec![h.clone(); k]).unwrap().delta.scale_real(factorial);
        prop_assert!(relative_gap(&shifted, &dk_fd(&f, &x, &h, k, lambda).unwrap()) < 1e-8);
    }

    #[test]
    fn derivative_routes_agree(seed in any::<u64>(), k in 1usize..4) {
        let (p, mut rng) = poly_case(seed);
        let d = p.arity();
        let f = from_poly(p, Domain::polydisk(1.0).unwrap());
        let x = rng.tuple_with_norm(d, 2, 0.3).unwrap();
        let h = rng.tuple_with_norm(d, 2, 1.0).unwrap();
        let diag = dk_diag(&f, &x, &h, k).unwrap();
        let hs = vec![h.clone(); k];
        prop_assert!(relative_gap(&dk_multilinear(&f, &x, &hs).unwrap(), &diag) < 1e-9);
        prop_assert!(relative_gap(&dk_iterated(&f, &x, &hs).unwrap(), &diag) < 1e-9);
        if k == 1 {
            prop_assert!(relative_gap(&jet1(&f, &x, &h).unwrap().derivative, &diag) < 1e-12);
        }
    }

    #[test]
    fn taylor_round_trip(seed in any::<u64>()) {
        let (p, _) = poly_case(seed);
        let f = from_poly(p.clone(), Domain::polydisk(1.0).unwrap());
        let t = taylor_expand(&f, 4).unwrap();
        prop_assert!(t.polynomial().max_coeff_distance(&p) < 1e-8);
        for (k, part) in t.parts.iter().enumerate() {
            prop_assert!(part.is_homogeneous(k));
        }
    }

    #[test]
    fn norm_bounds(seed in any::<u64>(), r in 1usize..7, c in 1usize..7) {
        let mut rng = SampleRng::new(seed);
        let a = rng.matrix(r, c, 1.0);
        let norm = operator_norm(&a).unwrap();
        prop_assert!(norm <= a.norm_fro() * (1.0 + 1e-12));
        prop_assert!(norm >= a.max_abs() * (1.0 - 1e-12));
        let u = rng.unitary(r);
        prop_assert!((operator_norm(&(&u * &a)).unwrap() - norm).abs() <= 1e-10 * norm.max(1.0));
        let power = power_iteration_norm(&a, NormPolicy::default()).unwrap();
        prop_assert!(power <= norm * (1.0 + 1e-10));
    }

    #[test]
    fn inverse_of_perturbed_identity(seed in any::<u64>(), n in 1usize..8) {
        let mut rng = SampleRng::new(seed);
        let a = &ComplexMatrix::identity(n) + &rng.matrix_with_norm(n, 0.5).unwrap();
        let prod = &a * &inverse(&a).unwrap();
        prop_assert!((&prod - &ComplexMatrix::identity(n)).max_abs() < 1e-12);
    }

    #[test]
    fn realization_taylor_matches_neumann(seed in any::<u64>(), m in 1usize..4) {
        let mut rng = SampleRng::new(seed);
        let r = Realization::from_colligation(delta_polydisk(1), m, &rng.unitary(1 + m)).unwrap();
        let t = taylor_expand(&from_realization(r.clone()), 4).unwrap();
        let neumann = scalar_neumann_coefficients(&r, 4).unwrap();
        for (k, c) in neumann.iter().enumerate() {
            prop_assert!((t.parts[k].coefficient(&Word::new(vec![0; k])) - c).norm() < 1e-8);
        }
    }

    #[test]
    fn resolvent_is_bounded(seed in any::<u64>(), n in 1usize..4) {
        let mut rng = SampleRng::new(seed);
        let r = Realization::from_colligation(delta_polydisk(2), 2, &rng.unitary(5)).unwrap();
        let norm = 0.8 * rng.uniform();
        let x = rng.tuple_with_norm(2, n, norm).unwrap();
        let level = operator_norm(&eval_delta(r.delta(), &x).unwrap()).unwrap();
        let bound = 1.0 / (1.0 - level);
        prop_assert!(resolvent_norm(&r, &x).unwrap() <= 1.1 * bound);
    }

    #[test]
    fn scans_of_unitary_colligations_pass(seed in any::<u64>()) {
        let mut rng = SampleRng::new(seed);
        let r = Realization::from_colligation(delta_polydisk(2), 1, &rng.unitary(3)).unwrap();
        let report = contractivity_scan(&r, 2, 20, seed).unwrap();
        prop_assert!(report.passed);
        prop_assert_eq!(report, contractivity_scan(&r, 2, 20, seed).unwrap());
    }

    #[test]
    fn tail_bound_decreases(m in 0.0f64..10.0, r in 1.01f64..10.0, k in 0usize..30) {
        prop_assert!(tail_bound(m, r, k + 1).unwrap() <= tail_bound(m, r, k).unwrap());
    }

    #[test]
    fn scalar_points_give_scalars(seed in any::<u64>(), n in 2usize..5) {
        let (p, mut rng) = poly_case(seed);
        let values: Vec<C64> = (0..p.arity()).map(|_| rng.unit_disk()).collect();
        let v = p.evaluate(&MatrixTuple::scalar(&values, n)).unwrap();
        prop_assert!(ncfun_core::ncfun::scalarity_residual(&v) < 1e-12);
    }
}
