//! Hermitian rank-completing perturbation `Ã − λB̃ = A − λB + τU(D_A − λD_B)U*`.

use crate::homog::HomogEigenvalue;
use crate::linalg::{complex_gaussian, max_abs, orthonormalize, seeded_rng};
use crate::pencil::HermitianPencil;
use crate::regular::{solve_regular, RegularOptions};
use crate::{CMat, Error, Result, C64};

use super::classify::{ambiguity_warning, flag_class, resolve_threshold, ClassTol, ClassifiedEntry, ClassifiedSpectrum};
use super::Method;

/// `(U, D_A, D_B, τ)` with `U` an `n × k` isometry and real diagonal `D_A`, `D_B`.
#[derive(Clone, Debug)]
pub struct PerturbationSpec {
    u: CMat,
    d_a: Vec<f64>,
    d_b: Vec<f64>,
    tau: f64,
}

impl PerturbationSpec {
    pub fn new(u: CMat, d_a: Vec<f64>, d_b: Vec<f64>, tau: f64) -> Result<Self> {
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
                reason: "need 1 <= k <= n".into(),
            });
        }
        let defect = max_abs(&(u.adjoint() * &u - CMat::identity(k, k)));
        if defect > 1e-12 {
            return Err(Error::DimensionMismatch(format!(
                "U does not have orthonormal columns (defect {defect:.2e})"
            )));
        }
        if !(tau != 0.0 && tau.is_finite()) {
            return Err(Error::BadTau(tau));
        }
        let spec = Self { u, d_a, d_b, tau };
        let gammas = spec.prescribed_checked()?;
        for i in 0..k {
            for j in 0..i {
                if gammas[i].chordal_distance(&gammas[j]) < 1e-12 {
                    return Err(Error::BadPrescribed(format!(
                        "prescribed values {} and {} coincide",
                        gammas[i], gammas[j]
                    )));
                }
            }
        }
        Ok(spec)
    }

    /// Seeded `U` from the QR factor of a complex Gaussian matrix, `D_A =
    /// diag(prescribed)`, `D_B = I`.
    pub fn random(n: usize, k: usize, prescribed: &[f64], tau: f64, seed: u64) -> Result<Self> {
        if prescribed.len() != k {
            return Err(Error::BadPrescribed(format!(
                "{} prescribed values given for k = {k}",
                prescribed.len()
            )));
        }
        if k == 0 || k > n {
            return Err(Error::BadK {
                k,
                n,
                reason: "need 1 <= k <= n".into(),
            });
        }
        if prescribed.iter().any(|g| !g.is_finite()) {
            return Err(Error::BadPrescribed(format!("non-finite value in {prescribed:?}")));
        }
        let mut rng = seeded_rng(seed);
        let u = orthonormalize(complex_gaussian(n, k, &mut rng));
        Self::new(u, prescribed.to_vec(), vec![1.0; k], tau)
    }

    /// As [`random`](Self::random) but insisting on `τ > 0`; with `D_B = I`
    /// positive definite a semidefinite `B` yields a definite `B̃`.
    pub fn definite(n: usize, k: usize, prescribed: &[f64], tau: f64, seed: u64) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(Error::BadTau(tau));
        }
        Self::random(n, k, prescribed, tau, seed)
    }

    pub fn u(&self) -> &CMat {
        &self.u
    }

    pub fn d_a(&self) -> &[f64] {
        &self.d_a
    }

    pub fn d_b(&self) -> &[f64] {
        &self.d_b
    }

    pub fn tau(&self) -> f64 {
        self.tau
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
                HomogEigenvalue::new(C64::new(a, 0.0), C64::new(b, 0.0)).map_err(|_| {
                    Error::BadPrescribed(format!("D_A - lambda D_B is singular ({a}, {b})"))
                })
            })
            .collect()
    }

    /// `(A + τ U D_A U*, B + τ U D_B U*)`.
    pub fn apply(&self, p: &HermitianPencil) -> Result<HermitianPencil> {
        if p.n() != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "pencil is {0}x{0}, U has {1} rows",
                p.n(),
                self.n()
            )));
        }
        let low_rank = |d: &[f64]| {
            let scaled = CMat::from_fn(self.n(), self.k(), |i, j| self.u[(i, j)] * (self.tau * d[j]));
            scaled * self.u.adjoint()
        };
        let a = p.a() + low_rank(&self.d_a);
        let b = p.b() + low_rank(&self.d_b);
        Ok(HermitianPencil::from_parts(&a, &b))
    }
}

/// Solves the perturbed pencil and sorts its eigenvalues by `‖U*x‖`, `‖U*y‖`.
pub fn classify_perturbed(
    p: &HermitianPencil,
    s: &PerturbationSpec,
    class_tol: ClassTol,
    opts: &RegularOptions,
) -> Result<ClassifiedSpectrum> {
    classify_perturbed_lenient(p, s, class_tol, opts)?.into_strict()
}

/// As [`classify_perturbed`] with soft errors reported as warnings.
pub fn classify_perturbed_lenient(
    p: &HermitianPencil,
    s: &PerturbationSpec,
    class_tol: ClassTol,
    opts: &RegularOptions,
) -> Result<ClassifiedSpectrum> {
    let perturbed = s.apply(p)?;
    let triplets = solve_regular(perturbed.a(), perturbed.b(), opts)?;
    let uh = s.u().adjoint();
    let residuals: Vec<(f64, f64)> = triplets
        .iter()
        .map(|t| ((&uh * &t.x).norm(), (&uh * &t.y).norm()))
        .collect();
    let pooled: Vec<f64> = residuals.iter().flat_map(|&(a, b)| [a, b]).collect();
    let (threshold, closest) = resolve_threshold(&pooled, class_tol);
    let entries = triplets
        .into_iter()
        .zip(residuals)
        .map(|(triplet, (ux, uy))| ClassifiedEntry {
            triplet,
            class: flag_class(ux, uy, threshold),
            ux_norm: ux,
            uy_norm: uy,
        })
        .collect();
    Ok(ClassifiedSpectrum::build(
        Method::Perturb,
        entries,
        s.k(),
        threshold,
        ambiguity_warning(threshold, closest),
    ))
}
