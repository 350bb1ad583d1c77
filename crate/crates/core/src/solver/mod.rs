//! Eigenvalues of singular Hermitian pencils through regularization.

pub mod augment;
pub mod classify;
pub mod perturb;
pub mod project;

use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use serde::Serialize;

use crate::homog::HomogEigenvalue;
use crate::linalg::seeded_rng;
use crate::pencil::HermitianPencil;
use crate::regular::RegularOptions;
use crate::{Error, Result};

pub use augment::{augment, classify_augmented, AugmentationSpec};
pub use classify::{ClassCounts, ClassTol, ClassifiedEntry, ClassifiedSpectrum, EigenClass, Warning};
pub use perturb::{classify_perturbed, PerturbationSpec};
pub use project::{classify_projected, project, ProjectionSpec};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Perturb,
    Project,
    Augment,
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "perturb" => Ok(Method::Perturb),
            "project" => Ok(Method::Project),
            "augment" => Ok(Method::Augment),
            _ => Err(format!("unknown method {s:?}; expected perturb, project or augment")),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Perturb => "perturb",
            Method::Project => "project",
            Method::Augment => "augment",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub method: Method,
    /// Rank deficiency; `None` means `n − normal_rank`.
    pub k: Option<usize>,
    pub tau: f64,
    /// Prescribed eigenvalues for the perturbation; `None` draws defaults.
    pub prescribed: Option<Vec<f64>>,
    pub seed: u64,
    pub class_tol: ClassTol,
    pub regular: RegularOptions,
    /// Require `τ > 0` with positive definite `D_B`.
    pub definite: bool,
    pub rank_tol: Option<f64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            method: Method::Perturb,
            k: None,
            tau: 1.0,
            prescribed: None,
            seed: 0,
            class_tol: ClassTol::Auto,
            regular: RegularOptions::default(),
            definite: false,
            rank_tol: None,
        }
    }
}

/// A classified spectrum with the regularized pencil it came from and all
/// resolved parameters.
#[derive(Clone, Debug)]
pub struct Solution {
    pub spectrum: ClassifiedSpectrum,
    /// Perturbed, projected or augmented pencil.
    pub regularized: HermitianPencil,
    pub k: usize,
    pub tau: f64,
    /// Prescribed values actually used (`γ_j`, complex for augmentation).
    pub prescribed: Vec<HomogEigenvalue>,
    pub seed: u64,
}

/// Rejects degenerate sizes: a regular pencil (`k = 0`) or one with normal rank 0.
pub fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::BadK {
            k,
            n,
            reason: "the pencil is regular; no regularization needed".into(),
        });
    }
    if k >= n {
        return Err(Error::BadK {
            k,
            n,
            reason: "normal rank would be zero; there is no regular part".into(),
        });
    }
    Ok(())
}

/// `k` distinct values in `[1.5, 2.5]`, one per subinterval with seeded jitter.
pub fn default_prescribed(k: usize, seed: u64) -> Vec<f64> {
    let mut rng = seeded_rng(seed ^ 0x9e37_79b9_7f4a_7c15);
    (0..k)
        .map(|j| {
            let u: f64 = rng.random();
            1.5 + (j as f64 + 0.5 + 0.4 * (u - 0.5)) / k as f64
        })
        .collect()
}

/// Runs one method end to end; soft errors are kept as warnings.
///
/// When the prescribed values were drawn automatically and one lands within
/// `1e-3` of a detected true eigenvalue, they are re-drawn once.
pub fn solve(p: &HermitianPencil, opts: &SolveOptions) -> Result<Solution> {
    let n = p.n();
    let k = match opts.k {
        Some(k) => k,
        None => n - p.normal_rank(opts.rank_tol, 5, opts.seed),
    };
    check_k(n, k)?;
    match opts.method {
        Method::Perturb => {
            let first = opts
                .prescribed
                .clone()
                .unwrap_or_else(|| default_prescribed(k, opts.seed));
            let mut sol = solve_perturbed(p, k, &first, opts)?;
            if opts.prescribed.is_none() && too_close(&sol.spectrum, &first) {
                let second = default_prescribed(k, opts.seed.wrapping_add(1));
                let mut again = solve_perturbed(p, k, &second, opts)?;
                again.spectrum.warnings.push(Warning::PrescribedRedrawn {
                    old: first,
                    new: second,
                });
                sol = again;
            }
            Ok(sol)
        }
        Method::Project => {
            let spec = ProjectionSpec::random(n, k, opts.seed)?;
            let spectrum = project::classify_projected_lenient(p, &spec, opts.class_tol, &opts.regular)?;
            Ok(Solution {
                regularized: spec.apply(p)?,
                spectrum,
                k,
                tau: opts.tau,
                prescribed: Vec::new(),
                seed: opts.seed,
            })
        }
        Method::Augment => {
            let spec = AugmentationSpec::random(n, k, opts.seed)?;
            let spectrum = augment::classify_augmented_lenient(p, &spec, opts.class_tol, &opts.regular)?;
            Ok(Solution {
                regularized: spec.apply(p)?,
                spectrum,
                k,
                tau: opts.tau,
                prescribed: spec.prescribed(),
                seed: opts.seed,
            })
        }
    }
}

fn solve_perturbed(p: &HermitianPencil, k: usize, prescribed: &[f64], opts: &SolveOptions) -> Result<Solution> {
    let spec = if opts.definite {
        PerturbationSpec::definite(p.n(), k, prescribed, opts.tau, opts.seed)?
    } else {
        PerturbationSpec::random(p.n(), k, prescribed, opts.tau, opts.seed)?
    };
    let spectrum = perturb::classify_perturbed_lenient(p, &spec, opts.class_tol, &opts.regular)?;
    Ok(Solution {
        regularized: spec.apply(p)?,
        spectrum,
        k,
        tau: opts.tau,
        prescribed: spec.prescribed(),
        seed: opts.seed,
    })
}

fn too_close(spectrum: &ClassifiedSpectrum, prescribed: &[f64]) -> bool {
    spectrum.of_class(EigenClass::True).any(|e| {
        prescribed
            .iter()
            .any(|&g| e.triplet.value.distance(&HomogEigenvalue::real(g)) < 1e-3)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_prescribed_values() {
        for k in 1..5 {
            let g = default_prescribed(k, 7);
            assert_eq!(g.len(), k);
            assert!(g.iter().all(|&x| (1.5..=2.5).contains(&x)));
            for w in g.windows(2) {
                assert!(w[1] - w[0] > 0.5 / k as f64);
            }
        }
    }

    #[test]
    fn method_parsing() {
        assert_eq!("augment".parse::<Method>().unwrap(), Method::Augment);
        assert!("qz".parse::<Method>().is_err());
        assert_eq!(Method::Project.to_string(), "project");
    }

    #[test]
    fn degenerate_k() {
        assert!(check_k(3, 0).is_err());
        assert!(check_k(1, 1).is_err());
        assert!(check_k(3, 1).is_ok());
    }
}
