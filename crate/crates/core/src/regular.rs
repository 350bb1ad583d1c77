//! Eigentriplets of regular pencils.

use serde::Serialize;

use crate::homog::HomogEigenvalue;
use crate::qz::qz;
use crate::{CMat, CVec, Error, Result, C64};

#[derive(Clone, Copy, Debug)]
pub struct RegularOptions {
    /// Relative residual tolerance of the eigentriplet contract.
    pub res_tol: f64,
    /// `β` is set to zero when `|β| < inf_tol · (|α| + |β|)`.
    pub inf_tol: f64,
}

impl Default for RegularOptions {
    fn default() -> Self {
        Self {
            res_tol: 1e-10,
            inf_tol: 1e-8,
        }
    }
}

/// Eigenvalue with unit right and left eigenvectors.
#[derive(Clone, Debug, Serialize)]
pub struct EigenTriplet {
    /// Canonical value, snapped to `∞` when `β` is negligible.
    pub value: HomogEigenvalue,
    /// Normalized pair before snapping; residuals refer to this one.
    #[serde(skip)]
    pub raw: HomogEigenvalue,
    #[serde(skip)]
    pub x: CVec,
    #[serde(skip)]
    pub y: CVec,
    pub right_residual: f64,
    pub left_residual: f64,
}

impl EigenTriplet {
    /// Largest of the two residuals relative to `|β|‖A‖_F + |α|‖B‖_F`.
    pub fn relative_residual(&self, a: &CMat, b: &CMat) -> f64 {
        let scale = self.raw.beta().norm() * a.norm() + self.raw.alpha().norm() * b.norm();
        self.right_residual.max(self.left_residual) / scale.max(f64::MIN_POSITIVE)
    }
}

/// `(βA − αB) x` for a homogeneous pair.
pub fn apply_homog(a: &CMat, b: &CMat, e: &HomogEigenvalue, x: &CVec) -> CVec {
    a * x * e.beta() - b * x * e.alpha()
}

/// Solves the generalized eigenproblem `βAx = αBx` of a square pencil.
///
/// Returns `n` triplets in no particular order. Residual blow-ups or
/// simultaneously tiny `α` and `β` make the call fail with
/// [`Error::SuspectSingular`].
pub fn solve_regular(a: &CMat, b: &CMat, opts: &RegularOptions) -> Result<Vec<EigenTriplet>> {
    let n = a.nrows();
    if !a.is_square() || a.shape() != b.shape() {
        return Err(Error::DimensionMismatch(format!(
            "A is {}x{}, B is {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    let schur = qz(a, b).map_err(Error::BackendFailure)?;
    let (na, nb) = (a.norm(), b.norm());
    let zero_tol = 1e3 * (n.max(1) as f64) * f64::EPSILON;
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let (alpha, beta) = schur.pair(j);
        let small_a = alpha.norm() <= zero_tol * na.max(f64::MIN_POSITIVE);
        let small_b = beta.norm() <= zero_tol * nb.max(f64::MIN_POSITIVE);
        if small_a && small_b {
            return Err(Error::SuspectSingular(format!(
                "Schur pair {j} has |alpha| = {:.2e}, |beta| = {:.2e}",
                alpha.norm(),
                beta.norm()
            )));
        }
        let raw = HomogEigenvalue::new(alpha, beta)?;
        let x = schur.right_eigenvector(j);
        let y = schur.left_eigenvector(j);
        let right_residual = apply_homog(a, b, &raw, &x).norm();
        let left = y.adjoint() * a * raw.beta() - y.adjoint() * b * raw.alpha();
        let left_residual = left.norm();
        let scale = raw.beta().norm() * na + raw.alpha().norm() * nb;
        let worst = right_residual.max(left_residual);
        if worst > 1e3 * opts.res_tol * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::SuspectSingular(format!(
                "eigentriplet residual {worst:.2e} exceeds {:.2e}",
                1e3 * opts.res_tol * scale
            )));
        }
        out.push(EigenTriplet {
            value: raw.snap_infinite(opts.inf_tol),
            raw,
            x,
            y,
            right_residual,
            left_residual,
        });
    }
    Ok(out)
}

/// Sorts triplets finite-first by real then imaginary part.
pub fn sort_triplets(t: &mut [EigenTriplet]) {
    t.sort_by(|p, q| p.value.sort_cmp(&q.value));
}

/// Unit vector with a one at `i`.
pub fn unit(n: usize, i: usize) -> CVec {
    let mut v = CVec::zeros(n);
    v[i] = C64::new(1.0, 0.0);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{complex_gaussian, seeded_rng};
    use nalgebra::DVector;

    fn diag(v: &[f64]) -> CMat {
        CMat::from_diagonal(&DVector::from_iterator(v.len(), v.iter().map(|&x| C64::new(x, 0.0))))
    }

    #[test]
    fn diagonal_pencil() {
        let mut t = solve_regular(&diag(&[1.0, 2.0]), &CMat::identity(2, 2), &Default::default()).unwrap();
        sort_triplets(&mut t);
        for (i, tr) in t.iter().enumerate() {
            assert!((tr.value.value().unwrap() - C64::new(i as f64 + 1.0, 0.0)).norm() < 1e-15);
            // Eigenvectors are standard basis vectors up to a phase.
            assert!((tr.x[i].norm() - 1.0).abs() < 1e-15);
            assert!((tr.y[i].norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_beta_row_is_infinite() {
        let mut t = solve_regular(&CMat::identity(2, 2), &diag(&[1.0, 0.0]), &Default::default()).unwrap();
        sort_triplets(&mut t);
        assert!((t[0].value.value().unwrap() - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(t[1].value.is_infinite());
    }

    #[test]
    fn singular_pencil_is_flagged() {
        // det(A − λB) ≡ 0: shared null vector.
        let a = diag(&[1.0, 2.0, 0.0]);
        let b = diag(&[1.0, 1.0, 0.0]);
        assert!(matches!(
            solve_regular(&a, &b, &Default::default()),
            Err(Error::SuspectSingular(_))
        ));
    }

    #[test]
    fn residual_contract_on_random_pencils() {
        let mut rng = seeded_rng(21);
        for n in [3, 10, 25] {
            let a = complex_gaussian(n, n, &mut rng);
            let b = complex_gaussian(n, n, &mut rng);
            let t = solve_regular(&a, &b, &Default::default()).unwrap();
            assert_eq!(t.len(), n);
            for tr in &t {
                assert!((tr.x.norm() - 1.0).abs() < 1e-12 && (tr.y.norm() - 1.0).abs() < 1e-12);
                assert!(tr.relative_residual(&a, &b) < 1e-10);
            }
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(24))]

        #[test]
        fn hermitian_spectrum_is_conjugation_closed(seed in 0u64..10_000, n in 2usize..9) {
            let mut rng = seeded_rng(seed);
            let a = complex_gaussian(n, n, &mut rng);
            let b = complex_gaussian(n, n, &mut rng);
            let (a, b) = (&a + a.adjoint(), &b + b.adjoint());
            let t = solve_regular(&a, &b, &Default::default()).unwrap();
            proptest::prop_assert_eq!(t.len(), n);
            let vals: Vec<_> = t.iter().map(|tr| tr.raw).collect();
            for v in &vals {
                let c = v.conj();
                let nearest = vals.iter().map(|w| w.chordal_distance(&c)).fold(f64::INFINITY, f64::min);
                proptest::prop_assert!(nearest < 1e-8, "no conjugate partner for {}", v);
            }
        }
    }
}
