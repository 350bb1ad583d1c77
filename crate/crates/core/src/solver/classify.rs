//! Threshold selection and the spectrum container shared by the three methods.

use std::fmt;

use serde::Serialize;

use crate::homog::HomogEigenvalue;
use crate::regular::EigenTriplet;
use crate::{Error, Result};

use super::Method;

/// Fallback threshold when residuals show no clear gap.
pub const FALLBACK_CLASS_TOL: f64 = 1e-8;
/// Minimum ratio across a gap for it to count as a separation.
pub const MIN_GAP_RATIO: f64 = 1e4;

/// Threshold between "zero" and "nonzero" residuals.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum ClassTol {
    /// Placed in the widest gap of the sorted residuals.
    #[default]
    Auto,
    Fixed(f64),
}

impl std::str::FromStr for ClassTol {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(ClassTol::Auto);
        }
        match s.parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(ClassTol::Fixed(v)),
            _ => Err(format!("class tolerance must be 'auto' or a positive number, got {s:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenClass {
    /// Eigenvalue of the regular part of the original pencil.
    True,
    /// Eigenvalue of the prescribed pencil.
    Prescribed,
    /// Conjugate of a prescribed value, only produced by augmentation.
    PrescribedConjugate,
    /// Artefact of the regularization of the singular part.
    Random,
}

impl fmt::Display for EigenClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EigenClass::True => "True",
            EigenClass::Prescribed => "Prescribed",
            EigenClass::PrescribedConjugate => "PrescribedConj",
            EigenClass::Random => "Random",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassifiedEntry {
    pub triplet: EigenTriplet,
    pub class: EigenClass,
    /// Right test residual (`‖U*x‖`, or its projected analogue).
    pub ux_norm: f64,
    /// Left test residual.
    pub uy_norm: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ClassCounts {
    pub n_true: usize,
    pub n_prescribed: usize,
    pub n_random: usize,
    /// Conjugates of prescribed values (augmentation only).
    pub n_extra: usize,
}

/// Conditions that leave a complete but questionable result.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warning {
    OddRandomCount { n_random: usize },
    ThresholdAmbiguous { class_tol: f64, ratio: f64 },
    PrescribedRedrawn { old: Vec<f64>, new: Vec<f64> },
}

impl Warning {
    /// Whether the strict API reports this as an error.
    pub fn is_soft_error(&self) -> bool {
        !matches!(self, Warning::PrescribedRedrawn { .. })
    }
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::OddRandomCount { n_random } => {
                write!(f, "odd number of random eigenvalues ({n_random})")
            }
            Warning::ThresholdAmbiguous { class_tol, ratio } => write!(
                f,
                "a residual lies within a factor {ratio:.2} of the threshold {class_tol:.3e}"
            ),
            Warning::PrescribedRedrawn { old, new } => write!(
                f,
                "prescribed values {old:?} were too close to a true eigenvalue; re-drawn as {new:?}"
            ),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassifiedSpectrum {
    pub method: Method,
    pub entries: Vec<ClassifiedEntry>,
    pub counts: ClassCounts,
    pub k: usize,
    /// `M`, inferred as half the number of random eigenvalues.
    pub m: usize,
    pub class_tol: f64,
    pub warnings: Vec<Warning>,
}

impl ClassifiedSpectrum {
    pub(crate) fn build(
        method: Method,
        mut entries: Vec<ClassifiedEntry>,
        k: usize,
        class_tol: f64,
        mut warnings: Vec<Warning>,
    ) -> Self {
        entries.sort_by(|p, q| {
            class_rank(p.class)
                .cmp(&class_rank(q.class))
                .then(p.triplet.value.sort_cmp(&q.triplet.value))
        });
        let mut counts = ClassCounts::default();
        for e in &entries {
            match e.class {
                EigenClass::True => counts.n_true += 1,
                EigenClass::Prescribed => counts.n_prescribed += 1,
                EigenClass::Random => counts.n_random += 1,
                EigenClass::PrescribedConjugate => counts.n_extra += 1,
            }
        }
        if counts.n_random % 2 == 1 {
            warnings.push(Warning::OddRandomCount {
                n_random: counts.n_random,
            });
        }
        Self {
            method,
            entries,
            counts,
            k,
            m: counts.n_random / 2,
            class_tol,
            warnings,
        }
    }

    pub fn of_class(&self, class: EigenClass) -> impl Iterator<Item = &ClassifiedEntry> {
        self.entries.iter().filter(move |e| e.class == class)
    }

    pub fn values(&self, class: EigenClass) -> Vec<HomogEigenvalue> {
        self.of_class(class).map(|e| e.triplet.value).collect()
    }

    pub fn is_clean(&self) -> bool {
        !self.warnings.iter().any(Warning::is_soft_error)
    }

    /// Turns the first soft warning into the matching error.
    pub fn into_strict(self) -> Result<Self> {
        let first = self.warnings.iter().find(|w| w.is_soft_error()).cloned();
        match first {
            None => Ok(self),
            Some(Warning::OddRandomCount { n_random }) => Err(Error::OddRandomCount {
                n_random,
                spectrum: Box::new(self),
            }),
            Some(Warning::ThresholdAmbiguous { class_tol, ratio }) => Err(Error::ThresholdAmbiguous {
                class_tol,
                ratio,
                spectrum: Box::new(self),
            }),
            Some(Warning::PrescribedRedrawn { .. }) => unreachable!("not a soft error"),
        }
    }
}

fn class_rank(c: EigenClass) -> u8 {
    match c {
        EigenClass::True => 0,
        EigenClass::Random => 1,
        EigenClass::Prescribed => 2,
        EigenClass::PrescribedConjugate => 3,
    }
}

/// Residuals above this are never the lower side of a separating gap.
const GAP_CEILING: f64 = 1e-10;
const FLOOR: f64 = 1e-300;

/// Resolves the threshold and, if some residual sits within a factor 10 of
/// it, the closest such ratio (`≥ 1`).
pub fn resolve_threshold(residuals: &[f64], tol: ClassTol) -> (f64, Option<f64>) {
    let threshold = match tol {
        ClassTol::Fixed(t) => t,
        ClassTol::Auto => gap_threshold(residuals).unwrap_or(FALLBACK_CLASS_TOL),
    };
    let closest = residuals
        .iter()
        .map(|&r| {
            let r = r.max(FLOOR);
            if r > threshold {
                r / threshold
            } else {
                threshold / r
            }
        })
        .fold(f64::INFINITY, f64::min);
    (threshold, (closest < 10.0).then_some(closest))
}

/// Geometric mean across the widest log-gap of the sorted residuals whose
/// upper end is above [`GAP_CEILING`], if its ratio exceeds [`MIN_GAP_RATIO`].
fn gap_threshold(residuals: &[f64]) -> Option<f64> {
    let mut sorted: Vec<f64> = residuals.iter().map(|r| r.max(FLOOR)).collect();
    sorted.sort_by(f64::total_cmp);
    sorted
        .windows(2)
        .filter(|w| w[1] > GAP_CEILING)
        .map(|w| (w[1] / w[0], (w[0] * w[1]).sqrt()))
        .filter(|(ratio, _)| *ratio > MIN_GAP_RATIO)
        .max_by(|p, q| p.0.total_cmp(&q.0))
        .map(|(_, t)| t)
}

pub(crate) fn ambiguity_warning(threshold: f64, closest: Option<f64>) -> Vec<Warning> {
    closest
        .map(|ratio| Warning::ThresholdAmbiguous {
            class_tol: threshold,
            ratio,
        })
        .into_iter()
        .collect()
}

/// Three-way flag table: both small ⇒ true, both large ⇒ prescribed,
/// otherwise random.
pub(crate) fn flag_class(ux: f64, uy: f64, threshold: f64) -> EigenClass {
    match (ux < threshold, uy < threshold) {
        (true, true) => EigenClass::True,
        (false, false) => EigenClass::Prescribed,
        _ => EigenClass::Random,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_between_clusters() {
        let r = [1e-14, 3e-15, 2e-13, 0.1, 0.05, 1e-2];
        let (t, amb) = resolve_threshold(&r, ClassTol::Auto);
        assert!((t - (2e-13f64 * 1e-2).sqrt()).abs() < 1e-20);
        assert!(amb.is_none());
    }

    #[test]
    fn no_gap_falls_back() {
        let r = [1e-14, 2e-14, 0.0, 5e-15];
        let (t, amb) = resolve_threshold(&r, ClassTol::Auto);
        assert_eq!(t, FALLBACK_CLASS_TOL);
        assert!(amb.is_none());
        let (t, amb) = resolve_threshold(&[1e-3, 2e-3], ClassTol::Auto);
        assert_eq!(t, FALLBACK_CLASS_TOL);
        assert!(amb.is_none());
    }

    #[test]
    fn ambiguous_fixed_threshold() {
        let (_, amb) = resolve_threshold(&[1e-14, 3e-8], ClassTol::Fixed(1e-8));
        assert!((amb.unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn flag_table() {
        assert_eq!(flag_class(1e-14, 1e-13, 1e-8), EigenClass::True);
        assert_eq!(flag_class(0.1, 0.2, 1e-8), EigenClass::Prescribed);
        assert_eq!(flag_class(1e-14, 0.2, 1e-8), EigenClass::Random);
        assert_eq!(flag_class(0.1, 1e-15, 1e-8), EigenClass::Random);
    }

    #[test]
    fn parse_class_tol() {
        assert_eq!("auto".parse::<ClassTol>().unwrap(), ClassTol::Auto);
        assert_eq!("1e-6".parse::<ClassTol>().unwrap(), ClassTol::Fixed(1e-6));
        assert!("-1".parse::<ClassTol>().is_err());
    }
}
