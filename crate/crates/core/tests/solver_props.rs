use proptest::prelude::*;
use singpencil::solver::perturb::classify_perturbed_lenient;
use singpencil::solver::{default_prescribed, solve, PerturbationSpec, SolveOptions};
use singpencil::testgen::{CongruenceKind, ThompsonSpec};
use singpencil::{ClassTol, EigenClass, HomogEigenvalue, RegularOptions};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn perturbation_counts_and_pairs(seed in 0u64..1_000_000) {
        let spec = ThompsonSpec::random(seed, 30, 3, 6, CongruenceKind::ComplexRandom);
        let (p, truth) = spec.assemble().unwrap();
        let gammas = default_prescribed(truth.k, seed);
        let s = PerturbationSpec::random(p.n(), truth.k, &gammas, 1.0, seed).unwrap();
        let c = classify_perturbed_lenient(&p, &s, ClassTol::Auto, &RegularOptions::default()).unwrap();
        prop_assert_eq!(c.counts.n_true, truth.n - 2 * truth.m_total - truth.k);
        prop_assert_eq!(c.counts.n_random, 2 * truth.m_total);

        let tol = c.class_tol;
        let randoms: Vec<_> = c.of_class(EigenClass::Random).collect();
        for r in &randoms {
            let z = r.triplet.value.value().unwrap();
            prop_assert!(z.im.abs() > 1e-6);
            // Its conjugate is also random, with the small flag on the other side.
            let partner = randoms.iter().find(|q| {
                q.triplet.value.value().is_some_and(|w| (w - z.conj()).norm() < 1e-8)
            });
            prop_assert!(partner.is_some());
            let q = partner.unwrap();
            prop_assert_eq!(r.ux_norm < tol, q.uy_norm < tol);
            prop_assert_eq!(r.uy_norm < tol, q.ux_norm < tol);
        }

        let presc = c.values(EigenClass::Prescribed);
        prop_assert_eq!(presc.len(), truth.k);
        for g in &gammas {
            let want = HomogEigenvalue::real(*g);
            prop_assert!(presc.iter().any(|v| v.distance(&want) < 1e-8));
        }
    }

    #[test]
    fn solve_is_deterministic(seed in 0u64..1_000_000) {
        let (p, _) = ThompsonSpec::random(seed, 20, 2, 3, CongruenceKind::RealOrthogonalScaled).assemble().unwrap();
        let opts = SolveOptions { seed, ..Default::default() };
        let a = serde_json::to_string(&solve(&p, &opts).unwrap().spectrum).unwrap();
        let b = serde_json::to_string(&solve(&p, &opts).unwrap().spectrum).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn explicit_k_out_of_range_is_rejected() {
    let (p, _) = ThompsonSpec::random(1, 10, 1, 1, CongruenceKind::Identity).assemble().unwrap();
    for k in [0, p.n()] {
        let opts = SolveOptions { k: Some(k), ..Default::default() };
        assert!(solve(&p, &opts).is_err());
    }
}
