use proptest::prelude::*;
use singpencil::linalg::{random_unitary, seeded_rng};
use singpencil::sign::{group_triplets, sign_characteristic, signs_of_group, DEFAULT_GROUP_TOL};
use singpencil::solver::{solve, SolveOptions};
use singpencil::testgen::{block_z, CongruenceKind, Sign, ThompsonSpec};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn signs_ignore_basis_choice_and_congruence(seed in 0u64..1_000_000) {
        let mut spec = ThompsonSpec::random(seed, 24, 2, 3, CongruenceKind::RealOrthogonalScaled);
        let opts = SolveOptions { seed, ..Default::default() };
        let (p, _) = spec.assemble().unwrap();
        let sol = solve(&p, &opts).unwrap();
        let report = sign_characteristic(&sol.regularized, &sol.spectrum, DEFAULT_GROUP_TOL).unwrap();

        let groups = group_triplets(
            sol.spectrum.of_class(singpencil::EigenClass::True).map(|e| &e.triplet),
            DEFAULT_GROUP_TOL,
        );
        let mut rng = seeded_rng(seed);
        for mut g in groups {
            let before = signs_of_group(&sol.regularized, &g).unwrap();
            let q = random_unitary(g.vectors.ncols(), &mut rng);
            g.vectors = &g.vectors * q;
            let after = signs_of_group(&sol.regularized, &g).unwrap();
            prop_assert_eq!(before.signs, after.signs);
        }

        spec.congruence_kind = CongruenceKind::ComplexRandom;
        let (p2, _) = spec.assemble().unwrap();
        let sol2 = solve(&p2, &opts).unwrap();
        let report2 = sign_characteristic(&sol2.regularized, &sol2.spectrum, DEFAULT_GROUP_TOL).unwrap();
        prop_assert_eq!(report.entries.len(), report2.entries.len());
        for e in &report.entries {
            let other = report2.find(&e.eigenvalue, 1e-6);
            prop_assert_eq!(Some(&e.signs), other.map(|o| &o.signs));
        }
    }

    #[test]
    fn scaling_a_scalar_block(mu in -10.0f64..10.0, c in prop_oneof![0.1f64..10.0, -10.0f64..-0.1]) {
        let p = block_z(mu, 1).scaled(c);
        let t = singpencil::solve_regular(p.a(), p.b(), &Default::default()).unwrap();
        let g = group_triplets(&t, DEFAULT_GROUP_TOL);
        let e = signs_of_group(&p, &g[0]).unwrap();
        prop_assert_eq!(e.signs, vec![Sign::of(c)]);
    }
}
