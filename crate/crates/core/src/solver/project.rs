//! Projection onto the normal rank, `W*(A − λB)W`.

use crate::linalg::{max_abs, random_unitary, seeded_rng};
use crate::pencil::HermitianPencil;
use crate::regular::{solve_regular, RegularOptions};
use crate::{CMat, Error, Result};

use super::classify::{ambiguity_warning, resolve_threshold, ClassTol, ClassifiedEntry, ClassifiedSpectrum, EigenClass};
use super::Method;

/// `W` (`n × (n−k)`) and `W⊥` (`n × k`) with `[W W⊥]` unitary.
#[derive(Clone, Debug)]
pub struct ProjectionSpec {
    w: CMat,
    w_perp: CMat,
}

impl ProjectionSpec {
    pub fn new(w: CMat, w_perp: CMat) -> Result<Self> {
        let n = w.nrows();
        if w_perp.nrows() != n || w.ncols() + w_perp.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "W is {}x{}, W_perp is {}x{}; together they must be square",
                w.nrows(),
                w.ncols(),
                w_perp.nrows(),
                w_perp.ncols()
            )));
        }
        let mut full = CMat::zeros(n, n);
        full.columns_mut(0, w.ncols()).copy_from(&w);
        full.columns_mut(w.ncols(), w_perp.ncols()).copy_from(&w_perp);
        let defect = max_abs(&(full.adjoint() * &full - CMat::identity(n, n)));
        if defect > 1e-12 {
            return Err(Error::DimensionMismatch(format!(
                "[W W_perp] is not unitary (defect {defect:.2e})"
            )));
        }
        Ok(Self { w, w_perp })
    }

    /// Splits the columns of a seeded random unitary matrix.
    pub fn random(n: usize, k: usize, seed: u64) -> Result<Self> {
        if k == 0 || k >= n {
            return Err(Error::BadK {
                k,
                n,
                reason: "projection needs 1 <= k < n".into(),
            });
        }
        let q = random_unitary(n, &mut seeded_rng(seed));
        Self::new(q.columns(0, n - k).into_owned(), q.columns(n - k, k).into_owned())
    }

    pub fn w(&self) -> &CMat {
        &self.w
    }

    pub fn w_perp(&self) -> &CMat {
        &self.w_perp
    }

    pub fn k(&self) -> usize {
        self.w_perp.ncols()
    }

    /// `(W*AW, W*BW)`.
    pub fn apply(&self, p: &HermitianPencil) -> Result<HermitianPencil> {
        if p.n() != self.w.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "pencil is {0}x{0}, W has {1} rows",
                p.n(),
                self.w.nrows()
            )));
        }
        let wh = self.w.adjoint();
        Ok(HermitianPencil::from_parts(
            &(&wh * p.a() * &self.w),
            &(&wh * p.b() * &self.w),
        ))
    }
}

/// Seeded projection with its projected `(n−k) × (n−k)` pencil.
pub fn project(p: &HermitianPencil, k: usize, seed: u64) -> Result<(ProjectionSpec, HermitianPencil)> {
    let spec = ProjectionSpec::random(p.n(), k, seed)?;
    let projected = spec.apply(p)?;
    Ok((spec, projected))
}

/// Solves the projected pencil; an eigenvalue is true iff both coupling
/// residuals `W⊥*(βA − αB)Wx` and `y*W*(βA − αB)W⊥` vanish.
pub fn classify_projected(
    p: &HermitianPencil,
    spec: &ProjectionSpec,
    class_tol: ClassTol,
    opts: &RegularOptions,
) -> Result<ClassifiedSpectrum> {
    classify_projected_lenient(p, spec, class_tol, opts)?.into_strict()
}

pub fn classify_projected_lenient(
    p: &HermitianPencil,
    spec: &ProjectionSpec,
    class_tol: ClassTol,
    opts: &RegularOptions,
) -> Result<ClassifiedSpectrum> {
    let projected = spec.apply(p)?;
    let triplets = solve_regular(projected.a(), projected.b(), opts)?;
    let (na, nb) = (p.a().norm(), p.b().norm());
    let w = spec.w();
    let wp = spec.w_perp();
    let residuals: Vec<(f64, f64)> = triplets
        .iter()
        .map(|t| {
            let (alpha, beta) = (t.raw.alpha(), t.raw.beta());
            let m: CMat = p.a() * beta - p.b() * alpha;
            let scale = (beta.norm() * na + alpha.norm() * nb).max(f64::MIN_POSITIVE);
            let right = wp.adjoint() * (&m * (w * &t.x));
            let left = (t.y.adjoint() * w.adjoint()) * &m * wp;
            (right.norm() / scale, left.norm() / scale)
        })
        .collect();
    let pooled: Vec<f64> = residuals.iter().flat_map(|&(a, b)| [a, b]).collect();
    let (threshold, closest) = resolve_threshold(&pooled, class_tol);
    let entries = triplets
        .into_iter()
        .zip(residuals)
        .map(|(triplet, (tr, tl))| ClassifiedEntry {
            triplet,
            class: if tr < threshold && tl < threshold {
                EigenClass::True
            } else {
                EigenClass::Random
            },
            ux_norm: tr,
            uy_norm: tl,
        })
        .collect();
    let mut spectrum = ClassifiedSpectrum::build(
        Method::Project,
        entries,
        spec.k(),
        threshold,
        ambiguity_warning(threshold, closest),
    );
    // Random eigenvalues of a projection need not pair up.
    spectrum
        .warnings
        .retain(|w| !matches!(w, super::classify::Warning::OddRandomCount { .. }));
    Ok(spectrum)
}
