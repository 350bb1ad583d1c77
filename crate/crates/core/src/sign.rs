//! Sign characteristic of real and infinite semisimple true eigenvalues.
//!
//! For a group of eigenvectors `X` of a real eigenvalue of the regularized
//! pencil, the signs are the inertia of `X*B̃X`; for `∞` the inertia of
//! `X*ÃX` is used.

use serde::Serialize;

use crate::homog::HomogEigenvalue;
use crate::linalg::{hermitian_eigenvalues, orthonormalize, singular_values, smallest_right_singular_vectors};
use crate::pencil::HermitianPencil;
use crate::regular::EigenTriplet;
use crate::solver::{ClassifiedSpectrum, EigenClass};
use crate::testgen::Sign;
use crate::{CMat, Error, Result};

pub const DEFAULT_GROUP_TOL: f64 = 1e-6;
/// Relative size below which an inertia eigenvalue counts as zero.
pub const ZERO_INERTIA_TOL: f64 = 1e-8;
/// Imaginary parts below this (relative) make a true eigenvalue real.
const REAL_TOL: f64 = 1e-8;

/// True eigenvectors belonging to one real or infinite eigenvalue.
#[derive(Clone, Debug)]
pub struct EigenGroup {
    pub value: HomogEigenvalue,
    /// Columns are the right eigenvectors.
    pub vectors: CMat,
    /// Largest distance between two members.
    pub diameter: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SignEntry {
    pub eigenvalue: HomogEigenvalue,
    pub multiplicity: usize,
    /// Sorted, `Minus` first.
    pub signs: Vec<Sign>,
    pub inertia_eigenvalues: Vec<f64>,
}

impl SignEntry {
    pub fn inertia(&self) -> (usize, usize) {
        let pos = self.signs.iter().filter(|&&s| s == Sign::Plus).count();
        (pos, self.signs.len() - pos)
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SignReport {
    pub entries: Vec<SignEntry>,
    pub warnings: Vec<String>,
}

impl SignReport {
    /// Entry whose eigenvalue is within `tol` of `value`.
    pub fn find(&self, value: &HomogEigenvalue, tol: f64) -> Option<&SignEntry> {
        self.entries.iter().find(|e| e.eigenvalue.distance(value) < tol)
    }
}

/// Groups the real and infinite triplets by proximity: `|λ_i − λ_j| <
/// group_tol · max(1, |λ|)`, chained. Values with `|Im λ|` below the same
/// bound count as real, so a split Jordan block still lands in one group.
pub fn group_triplets<'a>(triplets: impl IntoIterator<Item = &'a EigenTriplet>, group_tol: f64) -> Vec<EigenGroup> {
    let mut finite: Vec<(f64, &EigenTriplet)> = Vec::new();
    let mut infinite: Vec<&EigenTriplet> = Vec::new();
    for t in triplets {
        match t.value.value() {
            None => infinite.push(t),
            Some(v) if t.value.is_real(REAL_TOL) || v.im.abs() < group_tol * v.re.abs().max(1.0) => {
                finite.push((v.re, t))
            }
            Some(_) => {}
        }
    }
    finite.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut groups = Vec::new();
    let mut start = 0;
    for i in 1..=finite.len() {
        let split = i == finite.len() || {
            let (prev, cur) = (finite[i - 1].0, finite[i].0);
            (cur - prev) >= group_tol * prev.abs().max(cur.abs()).max(1.0)
        };
        if split {
            let members = &finite[start..i];
            let mean = members.iter().map(|m| m.0).sum::<f64>() / members.len() as f64;
            groups.push(EigenGroup {
                value: HomogEigenvalue::real(mean),
                vectors: stack(members.iter().map(|m| m.1)),
                diameter: members.last().unwrap().0 - members[0].0,
            });
            start = i;
        }
    }
    if !infinite.is_empty() {
        groups.push(EigenGroup {
            value: HomogEigenvalue::infinite(),
            vectors: stack(infinite.into_iter()),
            diameter: 0.0,
        });
    }
    groups
}

fn stack<'a>(ts: impl Iterator<Item = &'a EigenTriplet>) -> CMat {
    let cols: Vec<_> = ts.map(|t| t.x.clone()).collect();
    CMat::from_columns(&cols)
}

/// Inertia of `X*B̃X` (or `X*ÃX` at `∞`) for one group.
pub fn signs_of_group(pencil: &HermitianPencil, group: &EigenGroup) -> Result<SignEntry> {
    let g = group.vectors.ncols();
    if g == 0 {
        return Err(Error::EmptyGroup);
    }
    let basis = eigenspace_basis(pencil, group)?;
    let form = if group.value.is_infinite() { pencil.a() } else { pencil.b() };
    let h = basis.adjoint() * form * &basis;
    let ev = hermitian_eigenvalues(&h);
    let scale = ev.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(&small) = ev.iter().find(|x| x.abs() <= ZERO_INERTIA_TOL * scale) {
        return Err(Error::NotSemisimple {
            eigenvalue: group.value.to_string(),
            smallest: small,
        });
    }
    let mut signs: Vec<Sign> = ev.iter().map(|&x| Sign::of(x)).collect();
    signs.sort();
    Ok(SignEntry {
        eigenvalue: group.value,
        multiplicity: g,
        signs,
        inertia_eigenvalues: ev,
    })
}

/// Orthonormal basis of the group's eigenspace; falls back to the null space
/// of `βÃ − αB̃` when the computed eigenvectors are nearly dependent.
///
/// A null space of smaller dimension than the group means a Jordan block.
fn eigenspace_basis(pencil: &HermitianPencil, group: &EigenGroup) -> Result<CMat> {
    let g = group.vectors.ncols();
    let sv = singular_values(&group.vectors);
    let independent = sv.last().copied().unwrap_or(0.0) > 1e-6 * sv[0];
    if independent {
        return Ok(orthonormalize(group.vectors.clone()));
    }
    let (alpha, beta) = (group.value.alpha(), group.value.beta());
    let m = pencil.a() * beta - pencil.b() * alpha;
    let (basis, values) = smallest_right_singular_vectors(&m, g);
    let largest = values.last().copied().unwrap_or(0.0);
    if largest > 1e-6 * m.norm() {
        return Err(Error::NotSemisimple {
            eigenvalue: group.value.to_string(),
            smallest: largest,
        });
    }
    Ok(basis)
}

/// Signs of every real or infinite true eigenvalue of a classified spectrum.
///
/// `regularized` must be the pencil the spectrum was computed from.
pub fn sign_characteristic(
    regularized: &HermitianPencil,
    spectrum: &ClassifiedSpectrum,
    group_tol: f64,
) -> Result<SignReport> {
    let groups = group_triplets(spectrum.of_class(EigenClass::True).map(|e| &e.triplet), group_tol);
    let mut report = SignReport::default();
    for group in &groups {
        if group.diameter > group_tol / 10.0 {
            report.warnings.push(format!(
                "eigenvalue group at {:.6} has diameter {:.2e}; distinct eigenvalues may be merged",
                group.value, group.diameter
            ));
        }
        match signs_of_group(regularized, group) {
            Ok(entry) => report.entries.push(entry),
            Err(Error::NotSemisimple { smallest, .. }) => report.warnings.push(format!(
                "eigenvalue {:.6} is not semisimple (residual {smallest:.2e}); no signs reported",
                group.value
            )),
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regular::{solve_regular, RegularOptions};
    use crate::testgen::block_z;

    fn groups_of(p: &HermitianPencil) -> Vec<EigenGroup> {
        let t = solve_regular(p.a(), p.b(), &RegularOptions::default()).unwrap();
        group_triplets(&t, DEFAULT_GROUP_TOL)
    }

    #[test]
    fn scalar_block_sign() {
        for (sigma, want) in [(1.0, Sign::Plus), (-1.0, Sign::Minus)] {
            let p = block_z(4.0, 1).scaled(sigma);
            let g = groups_of(&p);
            assert_eq!(g.len(), 1);
            let e = signs_of_group(&p, &g[0]).unwrap();
            assert_eq!(e.signs, vec![want]);
        }
    }

    #[test]
    fn infinite_sign_uses_a() {
        let p = crate::testgen::block_n(1).scaled(-1.0);
        let g = groups_of(&p);
        assert!(g[0].value.is_infinite());
        assert_eq!(signs_of_group(&p, &g[0]).unwrap().signs, vec![Sign::Minus]);
    }

    #[test]
    fn jordan_block_is_not_semisimple() {
        let p = block_z(1.0, 2);
        let t = solve_regular(p.a(), p.b(), &RegularOptions::default()).unwrap();
        let g = group_triplets(&t, 1e-4);
        assert_eq!(g.len(), 1);
        assert!(matches!(signs_of_group(&p, &g[0]), Err(Error::NotSemisimple { .. })));
    }

    #[test]
    fn jordan_block_in_report_is_a_warning() {
        let (p, _) = crate::testgen::ThompsonSpec {
            real_blocks: vec![
                crate::testgen::RealBlock { mu: 1.0, size: 1, sigma: Sign::Plus },
                crate::testgen::RealBlock { mu: 2.0, size: 2, sigma: Sign::Minus },
            ],
            minimal_indices: vec![1],
            congruence_seed: 3,
            ..Default::default()
        }
        .assemble()
        .unwrap();
        let sol = crate::solver::solve(&p, &Default::default()).unwrap();
        let r = sign_characteristic(&sol.regularized, &sol.spectrum, DEFAULT_GROUP_TOL).unwrap();
        assert_eq!(r.entries.len(), 1);
        assert!(r.warnings.iter().any(|w| w.contains("not semisimple")));
    }

    #[test]
    fn empty_group() {
        let p = block_z(1.0, 1);
        let g = EigenGroup {
            value: HomogEigenvalue::real(1.0),
            vectors: CMat::zeros(1, 0),
            diameter: 0.0,
        };
        assert!(matches!(signs_of_group(&p, &g), Err(Error::EmptyGroup)));
    }
}
