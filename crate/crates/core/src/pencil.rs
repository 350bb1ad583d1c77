//! The Hermitian pencil type and the transformations that preserve its structure.

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::homog::HomogEigenvalue;
use crate::linalg::{self, asymmetry, hermitize, max_abs, seeded_rng};
use crate::{CMat, Error, Result, C64};

/// Default asymmetry tolerance accepted by [`HermitianPencil::new`].
pub const DEFAULT_HERM_TOL: f64 = 1e-12;

/// Pencil `A − λB` with `A = A*` and `B = B*`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianPencil {
    a: CMat,
    b: CMat,
}

impl HermitianPencil {
    /// Checks squareness and near-Hermitian structure, then stores `(M + M*)/2`.
    pub fn new(a: CMat, b: CMat, herm_tol: f64) -> Result<Self> {
        if !a.is_square() || !b.is_square() || a.shape() != b.shape() {
            return Err(Error::DimensionMismatch(format!(
                "A is {}x{}, B is {}x{}; both must be square of equal size",
                a.nrows(),
                a.ncols(),
                b.nrows(),
                b.ncols()
            )));
        }
        for (which, m) in [("A", &a), ("B", &b)] {
            let asym = asymmetry(m);
            let tolerance = herm_tol * max_abs(m);
            if asym > tolerance {
                return Err(Error::NotHermitian {
                    which,
                    asymmetry: asym,
                    tolerance,
                });
            }
        }
        Ok(Self {
            a: hermitize(&a),
            b: hermitize(&b),
        })
    }

    pub fn from_real(a: &DMatrix<f64>, b: &DMatrix<f64>, herm_tol: f64) -> Result<Self> {
        Self::new(linalg::to_complex(a), linalg::to_complex(b), herm_tol)
    }

    /// Hermitizes without checking; used for results of exact Hermitian algebra.
    pub(crate) fn from_parts(a: &CMat, b: &CMat) -> Self {
        Self {
            a: hermitize(a),
            b: hermitize(b),
        }
    }

    pub fn a(&self) -> &CMat {
        &self.a
    }

    pub fn b(&self) -> &CMat {
        &self.b
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    /// `max_ζ rank(A + ζB)` over `n_samples` seeded random shifts.
    ///
    /// `rank_tol` is relative to the largest singular value and defaults to
    /// `n·ε`.
    pub fn normal_rank(&self, rank_tol: Option<f64>, n_samples: usize, seed: u64) -> usize {
        assert!(n_samples >= 3, "normal_rank needs at least 3 samples");
        let n = self.n();
        if n == 0 {
            return 0;
        }
        let tol = rank_tol.unwrap_or(n as f64 * f64::EPSILON);
        let (na, nb) = (self.a.norm(), self.b.norm());
        let scale = if nb > 0.0 && na > 0.0 { na / nb } else { 1.0 };
        let mut rng = seeded_rng(seed);
        let radius = Uniform::new(0.0f64, 1.0).expect("valid range");
        let mut best = 0;
        for _ in 0..n_samples {
            let g = C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng));
            let r: f64 = radius.sample(&mut rng);
            // Bounded away from zero so B is always present in the sample.
            let zeta = g / g.norm().max(f64::MIN_POSITIVE) * (0.25 + r) * scale;
            let m = &self.a + &self.b * zeta;
            best = best.max(linalg::numerical_rank(&m, tol));
            if best == n {
                break;
            }
        }
        best
    }

    /// `(ζ₁A + ζ₂B) − μ(ζ₁B − ζ₂A)`.
    pub fn moebius(&self, m: &MoebiusParams) -> Self {
        let (z1, z2) = (C64::new(m.zeta1, 0.0), C64::new(m.zeta2, 0.0));
        let a = &self.a * z1 + &self.b * z2;
        let b = &self.b * z1 - &self.a * z2;
        Self::from_parts(&a, &b)
    }

    /// Undoes [`moebius`](Self::moebius) with the same parameters.
    pub fn moebius_inverse(&self, m: &MoebiusParams) -> Self {
        self.moebius(&m.inverse())
    }

    /// `(S A S*, S B S*)`.
    pub fn congruence(&self, s: &CMat) -> Result<Self> {
        let n = self.n();
        if s.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "congruence matrix is {}x{}, pencil is {n}x{n}",
                s.nrows(),
                s.ncols()
            )));
        }
        let condition = linalg::condition_number(s);
        if n > 0 && condition * (n as f64 * f64::EPSILON) > 1.0 {
            return Err(Error::SingularTransform { condition });
        }
        let sh = s.adjoint();
        Ok(Self::from_parts(&(s * &self.a * &sh), &(s * &self.b * &sh)))
    }

    /// Scales both coefficients by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        let c = C64::new(c, 0.0);
        Self::from_parts(&(&self.a * c), &(&self.b * c))
    }
}

/// Real Möbius parameters with `ζ₁² + ζ₂² = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MoebiusParams {
    zeta1: f64,
    zeta2: f64,
}

impl MoebiusParams {
    pub fn new(zeta1: f64, zeta2: f64) -> Result<Self> {
        let defect = (zeta1 * zeta1 + zeta2 * zeta2 - 1.0).abs();
        if !(defect <= 1e-14) {
            return Err(Error::InvalidEigenvalue(format!(
                "Moebius parameters ({zeta1}, {zeta2}) are not on the unit circle"
            )));
        }
        Ok(Self { zeta1, zeta2 })
    }

    pub fn from_angle(theta: f64) -> Self {
        Self {
            zeta1: theta.cos(),
            zeta2: theta.sin(),
        }
    }

    pub fn identity() -> Self {
        Self { zeta1: 1.0, zeta2: 0.0 }
    }

    pub fn zeta1(&self) -> f64 {
        self.zeta1
    }

    pub fn zeta2(&self) -> f64 {
        self.zeta2
    }

    pub fn inverse(&self) -> Self {
        Self {
            zeta1: self.zeta1,
            zeta2: -self.zeta2,
        }
    }

    /// Maps an eigenvalue `μ` of the transformed pencil back to `λ`:
    /// `λ = (ζ₁μ − ζ₂)/(ζ₁ + ζ₂μ)`.
    pub fn pull_back(&self, mu: &HomogEigenvalue) -> HomogEigenvalue {
        mu.transform(&self.pull_back_matrix())
            .expect("rotation of a nonzero pair is nonzero")
    }

    /// Maps an eigenvalue `λ` of the original pencil to `μ`.
    pub fn push_forward(&self, lambda: &HomogEigenvalue) -> HomogEigenvalue {
        lambda
            .transform(&self.inverse().pull_back_matrix())
            .expect("rotation of a nonzero pair is nonzero")
    }

    pub(crate) fn pull_back_matrix(&self) -> [[C64; 2]; 2] {
        let (z1, z2) = (C64::new(self.zeta1, 0.0), C64::new(self.zeta2, 0.0));
        [[z1, -z2], [z2, z1]]
    }

    /// Picks among 8 seeded angles the one maximizing `σ_min(ζ₁B − ζ₂A)`,
    /// so that the transformed pencil has no eigenvalue at `∞`.
    pub fn avoiding_infinity(p: &HermitianPencil, seed: u64) -> Self {
        let mut rng = seeded_rng(seed);
        let angle = Uniform::new(0.0, std::f64::consts::PI).expect("valid range");
        let mut best = (Self::identity(), f64::NEG_INFINITY);
        for _ in 0..8 {
            let m = Self::from_angle(angle.sample(&mut rng));
            let lead = p.b() * C64::new(m.zeta1, 0.0) - p.a() * C64::new(m.zeta2, 0.0);
            let smin = linalg::singular_values(&lead).last().copied().unwrap_or(0.0);
            if smin > best.1 {
                best = (m, smin);
            }
        }
        best.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::complex_gaussian;
    use crate::regular::{solve_regular, RegularOptions};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_hermitian(n: usize, seed: u64) -> HermitianPencil {
        let mut rng = seeded_rng(seed);
        let a = complex_gaussian(n, n, &mut rng);
        let b = complex_gaussian(n, n, &mut rng);
        HermitianPencil::from_parts(&(&a + a.adjoint()), &(&b + b.adjoint()))
    }

    #[test]
    fn scalar_pencil_is_valid() {
        let one = CMat::from_element(1, 1, c(1.0, 0.0));
        let p = HermitianPencil::new(one.clone(), one, DEFAULT_HERM_TOL).unwrap();
        assert_eq!(p.n(), 1);
    }

    #[test]
    fn skew_matrix_rejected() {
        let a = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let b = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(0.0, 0.0)]);
        let err = HermitianPencil::new(a, b, DEFAULT_HERM_TOL).unwrap_err();
        assert!(matches!(err, Error::NotHermitian { which: "B", .. }));
    }

    #[test]
    fn size_mismatch_rejected() {
        let err = HermitianPencil::new(CMat::zeros(2, 2), CMat::zeros(3, 3), 1e-12).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)));
    }

    #[test]
    fn tiny_asymmetry_is_hermitized() {
        let a = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(2.0 + 1e-15, 0.0), c(3.0, 1e-16)]);
        let p = HermitianPencil::new(a, CMat::identity(2, 2), DEFAULT_HERM_TOL).unwrap();
        assert_eq!(asymmetry(p.a()), 0.0);
    }

    #[test]
    fn identity_pair_has_full_normal_rank() {
        let p = HermitianPencil::new(CMat::identity(2, 2), CMat::identity(2, 2), 1e-12).unwrap();
        assert_eq!(p.normal_rank(None, 5, 0), 2);
    }

    #[test]
    fn moebius_identity_and_quarter_turn() {
        let p = random_hermitian(4, 3);
        assert_eq!(p.moebius(&MoebiusParams::identity()), p);
        let q = p.moebius(&MoebiusParams::new(0.0, 1.0).unwrap());
        assert!(max_abs(&(q.a() - p.b())) < 1e-15);
        assert!(max_abs(&(q.b() + p.a())) < 1e-15);
    }

    #[test]
    fn moebius_round_trip() {
        let p = random_hermitian(5, 9);
        let m = MoebiusParams::from_angle(0.7);
        let back = p.moebius(&m).moebius_inverse(&m);
        assert!(max_abs(&(back.a() - p.a())) < 1e-13);
        assert!(max_abs(&(back.b() - p.b())) < 1e-13);
    }

    #[test]
    fn moebius_eigenvalue_map_on_diagonal_pencil() {
        let a = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(2.0, 0.0)]));
        let p = HermitianPencil::new(a, CMat::identity(2, 2), 1e-12).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let m = MoebiusParams::new(s, s).unwrap();
        let q = p.moebius(&m);
        let mut mapped: Vec<C64> = solve_regular(q.a(), q.b(), &RegularOptions::default())
            .unwrap()
            .iter()
            .map(|t| m.pull_back(&t.value).value().unwrap())
            .collect();
        mapped.sort_by(|x, y| x.re.total_cmp(&y.re));
        assert!((mapped[0] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((mapped[1] - c(2.0, 0.0)).norm() < 1e-12);
        // Direct evaluation: the transformed eigenvalue of λ = 1 is μ = (λ+1)/(1−λ) = ∞.
        assert!(m.push_forward(&HomogEigenvalue::real(1.0)).is_infinite());
    }

    #[test]
    fn pull_back_of_infinity() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let m = MoebiusParams::new(s, s).unwrap();
        let lambda = m.pull_back(&HomogEigenvalue::infinite());
        assert!((lambda.value().unwrap() - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn bad_moebius_params() {
        assert!(MoebiusParams::new(1.0, 0.1).is_err());
    }

    #[test]
    fn congruence_identity_and_singular() {
        let p = random_hermitian(3, 4);
        assert_eq!(p.congruence(&CMat::identity(3, 3)).unwrap(), p);
        let mut s = CMat::identity(3, 3);
        s[(2, 2)] = c(0.0, 0.0);
        assert!(matches!(p.congruence(&s), Err(Error::SingularTransform { .. })));
    }

    #[test]
    fn congruence_keeps_eigenvalues() {
        let d = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(-2.0, 0.0), c(5.0, 0.0)]));
        let p = HermitianPencil::new(d, CMat::identity(3, 3), 1e-12).unwrap();
        let mut rng = seeded_rng(8);
        let s = complex_gaussian(3, 3, &mut rng);
        let q = p.congruence(&s).unwrap();
        let mut ev: Vec<f64> = solve_regular(q.a(), q.b(), &RegularOptions::default())
            .unwrap()
            .iter()
            .map(|t| t.value.value().unwrap().re)
            .collect();
        ev.sort_by(f64::total_cmp);
        for (got, want) in ev.iter().zip([-2.0, 1.0, 5.0]) {
            assert!((got - want).abs() < 1e-10);
        }
        let scale = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]));
        let r = p.congruence(&scale).unwrap();
        assert!((r.a()[(0, 0)] - c(4.0, 0.0)).norm() < 1e-15);
        assert!((r.b()[(0, 0)] - c(4.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn avoiding_infinity_regularizes_leading_matrix() {
        // B singular: (I, diag(1,0)) has an eigenvalue at ∞.
        let mut b = CMat::identity(2, 2);
        b[(1, 1)] = c(0.0, 0.0);
        let p = HermitianPencil::new(CMat::identity(2, 2), b, 1e-12).unwrap();
        let m = MoebiusParams::avoiding_infinity(&p, 1);
        let q = p.moebius(&m);
        assert!(linalg::singular_values(q.b()).last().unwrap() > &1e-3);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(32))]

        #[test]
        fn moebius_stays_hermitian(seed in 0u64..1000, theta in 0.0f64..6.3) {
            let p = random_hermitian(4, seed);
            let m = MoebiusParams::from_angle(theta);
            let z1 = C64::new(m.zeta1(), 0.0);
            let z2 = C64::new(m.zeta2(), 0.0);
            let raw = p.a() * z1 + p.b() * z2;
            proptest::prop_assert!(asymmetry(&raw) < 1e-15 * (1.0 + max_abs(&raw)));
        }

        #[test]
        fn pull_back_inverts_push_forward(theta in 0.0f64..6.3, re in -4.0f64..4.0, im in -4.0f64..4.0) {
            let m = MoebiusParams::from_angle(theta);
            let l = HomogEigenvalue::finite(C64::new(re, im));
            let back = m.pull_back(&m.push_forward(&l));
            proptest::prop_assert!(back.chordal_distance(&l) < 1e-14);
        }
    }
}
