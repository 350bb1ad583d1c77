//! Bordered augmentation `[[A, U D_A], [D_A* U*, 0]] − λ[[B, U D_B], [D_B* U*, 0]]`.

use crate::homog::HomogEigenvalue;
use crate::linalg::{complex_gaussian, max_abs, orthonormalize, seeded_rng};
use crate::pencil::HermitianPencil;
use crate::regular::{solve_regular, RegularOptions};
use crate::{CMat, Error, Result, C64};

use super::classify::{
    ambiguity_warning, flag_class, resolve_threshold, ClassTol, ClassifiedEntry, ClassifiedSpectrum, EigenClass,
};
use super::Method;

/// Border data `(U, D_A, D_B)` with complex diagonal `D_A`, `D_B`.
#[derive(Clone, Debug)]
pub struct AugmentationSpec {
    u: CMat,
    d_a: Vec<C64>,
    d_b: Vec<C64>,
}

impl AugmentationSpec {
    pub fn new(u: CMat, d_a: Vec<C64>, d_b: Vec<C64>) -> Result<Self> {
        let k = u.ncols();
        if d_a.len() != k || d_b.len() != k {
            return Err(Error::DimensionMismatch(format!(
                "U has {k} columns but D_A, D_B have {} and {} entries",
                d_a.len(),
                d_b.len()
            )));
        }
        if k == 0 || k > u.nrows() {
            return Err(Error::BadK {
                k,
                n: u.nrows(),
                reason: "augmentation needs 1 <= k <= n".into(),
            });
        }
        let defect = max_abs(&(u.adjoint() * &u - CMat::identity(k, k)));
        if defect > 1e-12 {
            return Err(Error::DimensionMismatch(format!(
                "U does not have orthonormal columns (defect {defect:.2e})"
            )));
        }
        let spec = Self { u, d_a, d_b };
        let g = spec.prescribed_checked()?;
        // Values must be simple and no two may be conjugate to each other.
        for i in 0..k {
            if g[i].is_real(1e-12) {
                return Err(Error::BadPrescribed(format!("border value {} is real", g[i])));
            }
            for j in 0..i {
                if g[i].chordal_distance(&g[j]) < 1e-12 || g[i].chordal_distance(&g[j].conj()) < 1e-12 {
                    return Err(Error::BadPrescribed(format!(
                        "border values {} and {} coincide up to conjugation",
                        g[i], g[j]
                    )));
                }
            }
        }
        Ok(spec)
    }

    /// Seeded `U`, `γ_j = 2 + j/k + i(1 + j/(2k))` for `j = 1..=k`, `D_B = I`.
    pub fn random(n: usize, k: usize, seed: u64) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::BadK {
                k,
                n,
                reason: "augmentation needs 1 <= k <= n".into(),
            });
        }
        let u = orthonormalize(complex_gaussian(n, k, &mut seeded_rng(seed)));
        let kf = k as f64;
        let d_a = (1..=k)
            .map(|j| C64::new(2.0 + j as f64 / kf, 1.0 + j as f64 / (2.0 * kf)))
            .collect();
        Self::new(u, d_a, vec![C64::new(1.0, 0.0); k])
    }

    pub fn u(&self) -> &CMat {
        &self.u
    }

    pub fn k(&self) -> usize {
        self.u.ncols()
    }

    pub fn n(&self) -> usize {
        self.u.nrows()
    }

    /// `γ_j = (D_A)_jj / (D_B)_jj`.
    pub fn prescribed(&self) -> Vec<HomogEigenvalue> {
        self.prescribed_checked().expect("validated on construction")
    }

    fn prescribed_checked(&self) -> Result<Vec<HomogEigenvalue>> {
        self.d_a
            .iter()
            .zip(&self.d_b)
            .map(|(&a, &b)| {
                HomogEigenvalue::new(a, b)
                    .map_err(|_| Error::BadPrescribed(format!("D_A - lambda D_B is singular ({a}, {b})")))
            })
            .collect()
    }

    /// The `(n+k) × (n+k)` bordered pencil.
    pub fn apply(&self, p: &HermitianPencil) -> Result<HermitianPencil> {
        let (n, k) = (self.n(), self.k());
        if p.n() != n {
            return Err(Error::DimensionMismatch(format!(
                "pencil is {0}x{0}, U has {n} rows",
                p.n()
            )));
        }
        let border = |core: &CMat, d: &[C64]| {
            let ud = CMat::from_fn(n, k, |i, j| self.u[(i, j)] * d[j]);
            let mut m = CMat::zeros(n + k, n + k);
            m.view_mut((0, 0), (n, n)).copy_from(core);
            m.view_mut((0, n), (n, k)).copy_from(&ud);
            m.view_mut((n, 0), (k, n)).copy_from(&ud.adjoint());
            m
        };
        Ok(HermitianPencil::from_parts(&border(p.a(), &self.d_a), &border(p.b(), &self.d_b)))
    }
}

/// Builds the bordered pencil from a seeded spec.
pub fn augment(p: &HermitianPencil, k: usize, seed: u64) -> Result<(HermitianPencil, AugmentationSpec)> {
    let spec = AugmentationSpec::random(p.n(), k, seed)?;
    Ok((spec.apply(p)?, spec))
}

/// Classifies the eigenvalues of the bordered pencil.
///
/// With eigenvectors split as `(x; z)` and `(y; w)`, the test residuals are
/// `‖[U*x; z]‖` and `‖[U*y; w]‖`: every eigenvalue other than `conj(γ_j)`
/// already has `U*x = 0`, and the border part `z` is what separates true
/// eigenvalues from the rest. Among both-large entries the ones near `γ_j`
/// are prescribed and the ones near `conj(γ_j)` are conjugates.
pub fn classify_augmented(
    p: &HermitianPencil,
    spec: &AugmentationSpec,
    class_tol: ClassTol,
    opts: &RegularOptions,
) -> Result<ClassifiedSpectrum> {
    classify_augmented_lenient(p, spec, class_tol, opts)?.into_strict()
}

pub fn classify_augmented_lenient(
    p: &HermitianPencil,
    spec: &AugmentationSpec,
    class_tol: ClassTol,
    opts: &RegularOptions,
) -> Result<ClassifiedSpectrum> {
    let augmented = spec.apply(p)?;
    let triplets = solve_regular(augmented.a(), augmented.b(), opts)?;
    let (n, k) = (spec.n(), spec.k());
    let uh = spec.u().adjoint();
    let split_norm = |v: &crate::CVec| {
        let top = &uh * v.rows(0, n);
        (top.norm_squared() + v.rows(n, k).norm_squared()).sqrt()
    };
    let residuals: Vec<(f64, f64)> = triplets.iter().map(|t| (split_norm(&t.x), split_norm(&t.y))).collect();
    let pooled: Vec<f64> = residuals.iter().flat_map(|&(a, b)| [a, b]).collect();
    let (threshold, closest) = resolve_threshold(&pooled, class_tol);
    let gammas = spec.prescribed();
    let entries = triplets
        .into_iter()
        .zip(residuals)
        .map(|(triplet, (ux, uy))| {
            let mut class = flag_class(ux, uy, threshold);
            if class == EigenClass::Prescribed {
                let near = |g: &HomogEigenvalue| triplet.value.chordal_distance(g);
                let direct = gammas.iter().map(near).fold(f64::INFINITY, f64::min);
                let conj = gammas.iter().map(|g| near(&g.conj())).fold(f64::INFINITY, f64::min);
                if conj < direct {
                    class = EigenClass::PrescribedConjugate;
                }
            }
            ClassifiedEntry {
                triplet,
                class,
                ux_norm: ux,
                uy_norm: uy,
            }
        })
        .collect();
    Ok(ClassifiedSpectrum::build(
        Method::Augment,
        entries,
        k,
        threshold,
        ambiguity_warning(threshold, closest),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bordered_shape() {
        let p = HermitianPencil::from_parts(&CMat::zeros(2, 2), &CMat::zeros(2, 2));
        let u = CMat::from_column_slice(2, 1, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let spec = AugmentationSpec::new(u, vec![C64::new(2.0, 1.0)], vec![C64::new(1.0, 0.0)]).unwrap();
        let q = spec.apply(&p).unwrap();
        assert_eq!(q.n(), 3);
        assert_eq!(q.a()[(0, 2)], C64::new(2.0, 1.0));
        assert_eq!(q.a()[(2, 0)], C64::new(2.0, -1.0));
        assert_eq!(q.b()[(0, 2)], C64::new(1.0, 0.0));
        assert_eq!(q.a()[(2, 2)], C64::new(0.0, 0.0));
        assert_eq!(q.a()[(1, 2)], C64::new(0.0, 0.0));
    }

    #[test]
    fn default_border_values_are_upper_half_plane() {
        let s = AugmentationSpec::random(6, 3, 1).unwrap();
        assert!(s.prescribed().iter().all(|g| g.value().unwrap().im > 0.0));
    }

    #[test]
    fn real_border_rejected() {
        let u = CMat::from_column_slice(1, 1, &[C64::new(1.0, 0.0)]);
        assert!(AugmentationSpec::new(u, vec![C64::new(2.0, 0.0)], vec![C64::new(1.0, 0.0)]).is_err());
    }
}
