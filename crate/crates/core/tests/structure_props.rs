use singpencil::pencil::{HermitianPencil, DEFAULT_HERM_TOL};
use singpencil::solver::{solve, SolveOptions};
use singpencil::structures::{solve_structured, StructuredKind, StructuredPencil};
use singpencil::testgen::{CongruenceKind, ThompsonSpec};

#[test]
fn reduction_keeps_hermitian_tolerance_and_counts() {
    for (i, kind) in StructuredKind::ALL.into_iter().enumerate() {
        let (p, _) = ThompsonSpec::random(40 + i as u64, 20, 2, 3, CongruenceKind::ComplexRandom)
            .assemble()
            .unwrap();
        let sp = StructuredPencil::from_hermitian(kind, &p);
        // Re-validate the structured input from its raw matrices.
        let sp = StructuredPencil::new(kind, sp.a().clone(), sp.b().clone(), 1e-12).unwrap();
        let (h, _) = sp.to_hermitian().unwrap();
        HermitianPencil::new(h.a().clone(), h.b().clone(), DEFAULT_HERM_TOL).unwrap();

        let opts = SolveOptions { seed: 5, ..Default::default() };
        let structured = solve_structured(&sp, &opts).unwrap();
        let direct = solve(&h, &opts).unwrap();
        assert_eq!(structured.spectrum.counts, direct.spectrum.counts, "{kind}");
    }
}
