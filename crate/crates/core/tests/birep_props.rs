use proptest::prelude::*;
use singpencil::birep::{solve_system, sym_detrep, sym_detrep_cubic, BivarPoly, Placement, RootOptions};
use singpencil::C64;

fn cubic() -> impl Strategy<Value = [f64; 10]> {
    prop::array::uniform10(-5i32..=5).prop_map(|a| a.map(f64::from))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn determinant_identity(c in cubic(), off in any::<bool>(), seed in any::<u64>()) {
        prop_assume!(c.iter().any(|&x| x != 0.0));
        let p = BivarPoly::cubic(c).unwrap();
        let placement = if off { Placement::OffDiagonal } else { Placement::Diagonal };
        prop_assert!(sym_detrep_cubic(&p, placement).unwrap().det_error(&p, 12, seed) <= 1e-8);
        prop_assert!(sym_detrep(&p).unwrap().det_error(&p, 12, seed) <= 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn roots_are_roots(c1 in cubic(), c2 in cubic(), seed in 0u64..1000) {
        prop_assume!(c1[6..].iter().any(|&x| x != 0.0) && c2[6..].iter().any(|&x| x != 0.0));
        let p1 = BivarPoly::cubic(c1).unwrap();
        let p2 = BivarPoly::cubic(c2).unwrap();
        let Ok(set) = solve_system(&p1, &p2, &RootOptions { seed, ..Default::default() }) else {
            return Ok(());
        };
        prop_assert!(set.roots.len() <= 9);
        let amax = p1.max_abs_coeff().max(p2.max_abs_coeff());
        for r in &set.roots {
            let (l, m) = (r.lambda(), r.mu());
            let bound = 1e-6 * amax * 1f64.max(l.norm()).max(m.norm()).powi(3);
            prop_assert!(p1.eval(l, m).norm() <= bound && p2.eval(l, m).norm() <= bound);
        }
    }
}

#[test]
fn circle_and_line() {
    // λ² + μ² = 1 and λ = μ.
    let circle = BivarPoly::new([(2, 0, 1.0), (0, 2, 1.0), (0, 0, -1.0)]).unwrap();
    let line = BivarPoly::new([(1, 0, 1.0), (0, 1, -1.0)]).unwrap();
    let set = solve_system(&circle, &line, &RootOptions::default()).unwrap();
    let h = 0.5f64.sqrt();
    assert_eq!(set.roots.len(), 2);
    for (r, want) in set.roots.iter().zip([-h, h]) {
        assert!((r.lambda() - C64::new(want, 0.0)).norm() < 1e-10);
        assert!((r.mu() - C64::new(want, 0.0)).norm() < 1e-10);
    }
}

#[test]
fn lambda_multiset_splits_into_roots_and_infinite() {
    let p1 = BivarPoly::cubic([1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0]).unwrap();
    let p2 = BivarPoly::cubic([10.0, 9.0, 8.0, 7.0, 6.0, 5.0, 4.0, 3.0, 2.0, 1.0]).unwrap();
    let set = solve_system(&p1, &p2, &RootOptions::default()).unwrap();
    let ls = &set.lambda_solve;
    assert_eq!(ls.n_finite_true + ls.n_infinite_true, ls.counts.n_true);
    assert_eq!(ls.n_finite_true, set.roots.len());
    for r in &set.roots {
        assert!(ls.finite_true.iter().any(|z| (C64::new(z[0], z[1]) - r.lambda()).norm() < 1e-6));
    }
}
