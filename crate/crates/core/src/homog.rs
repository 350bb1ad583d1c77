//! Homogeneous eigenvalues `(α, β)` representing `λ = α/β`, with `β = 0` for `∞`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result, C64};

/// Eigenvalue of a pencil in homogeneous coordinates.
///
/// The pair is kept canonical: `|α|² + |β|² = 1`, `β` real and nonnegative,
/// and `α = 1` when `β = 0`. Two canonical pairs describe the same point of
/// the Riemann sphere iff they are equal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HomogEigenvalue {
    alpha: C64,
    beta: C64,
}

impl HomogEigenvalue {
    pub fn new(alpha: C64, beta: C64) -> Result<Self> {
        let norm = alpha.norm().hypot(beta.norm());
        if !(norm.is_finite()) || norm == 0.0 {
            return Err(Error::InvalidEigenvalue(format!(
                "homogeneous pair ({alpha}, {beta}) is zero or not finite"
            )));
        }
        let (mut alpha, mut beta) = (alpha / norm, beta / norm);
        if beta.norm() > 0.0 {
            let phase = beta / beta.norm();
            alpha *= phase.conj();
            beta = C64::new(beta.norm(), 0.0);
        } else {
            alpha = C64::new(1.0, 0.0);
            beta = C64::new(0.0, 0.0);
        }
        Ok(Self { alpha, beta })
    }

    pub fn finite(lambda: C64) -> Self {
        Self::new(lambda, C64::new(1.0, 0.0)).expect("finite eigenvalue")
    }

    pub fn real(lambda: f64) -> Self {
        Self::finite(C64::new(lambda, 0.0))
    }

    pub fn infinite() -> Self {
        Self {
            alpha: C64::new(1.0, 0.0),
            beta: C64::new(0.0, 0.0),
        }
    }

    pub fn alpha(&self) -> C64 {
        self.alpha
    }

    pub fn beta(&self) -> C64 {
        self.beta
    }

    pub fn is_infinite(&self) -> bool {
        self.beta.re == 0.0
    }

    /// `α/β`, or `None` for `∞`.
    pub fn value(&self) -> Option<C64> {
        (!self.is_infinite()).then(|| self.alpha / self.beta)
    }

    pub fn conj(&self) -> Self {
        Self {
            alpha: self.alpha.conj(),
            beta: self.beta,
        }
    }

    /// Chordal distance `|α₁β₂ − α₂β₁|`, bounded by 1 and well defined at `∞`.
    pub fn chordal_distance(&self, other: &Self) -> f64 {
        (self.alpha * other.beta - other.alpha * self.beta).norm()
    }

    /// Plain distance `|λ₁ − λ₂|` for finite values, `0` between two
    /// infinities and `+∞` otherwise.
    pub fn distance(&self, other: &Self) -> f64 {
        match (self.value(), other.value()) {
            (Some(a), Some(b)) => (a - b).norm(),
            (None, None) => 0.0,
            _ => f64::INFINITY,
        }
    }

    /// Real (or infinite) up to `tol` relative to `max(1, |λ|)`.
    pub fn is_real(&self, tol: f64) -> bool {
        match self.value() {
            Some(v) => v.im.abs() <= tol * v.norm().max(1.0),
            None => true,
        }
    }

    /// Replaces `β` by zero when `|β| < inf_tol · (|α| + |β|)`.
    pub fn snap_infinite(&self, inf_tol: f64) -> Self {
        if self.beta.norm() < inf_tol * (self.alpha.norm() + self.beta.norm()) {
            Self::infinite()
        } else {
            *self
        }
    }

    /// Applies a linear map on homogeneous coordinates: `(α', β') = M (α, β)`.
    pub fn transform(&self, m: &[[C64; 2]; 2]) -> Result<Self> {
        Self::new(
            m[0][0] * self.alpha + m[0][1] * self.beta,
            m[1][0] * self.alpha + m[1][1] * self.beta,
        )
    }

    /// Ordering used for reports: finite before infinite, then by real and
    /// imaginary part.
    pub fn sort_cmp(&self, other: &Self) -> Ordering {
        match (self.value(), other.value()) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Greater,
            (Some(_), None) => Ordering::Less,
            (Some(a), Some(b)) => a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)),
        }
    }
}

/// Matches two eigenvalue multisets one-to-one by greedy nearest neighbour.
///
/// Returns the largest matched distance ([`HomogEigenvalue::distance`]), or
/// `None` if the sizes differ.
pub fn multiset_distance(a: &[HomogEigenvalue], b: &[HomogEigenvalue]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let (idx, d) = b
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, y)| (i, x.distance(y)))
            .min_by(|p, q| p.1.total_cmp(&q.1))?;
        used[idx] = true;
        worst = worst.max(d);
    }
    Some(worst)
}

impl fmt::Display for HomogEigenvalue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            None => write!(f, "inf"),
            Some(v) => {
                let sign = if v.im.is_sign_negative() { '-' } else { '+' };
                match f.precision() {
                    Some(p) => write!(f, "{:.*}{}{:.*}i", p, v.re, sign, p, v.im.abs()),
                    None => write!(f, "{}{}{}i", v.re, sign, v.im.abs()),
                }
            }
        }
    }
}

/// Serialized as `"inf"` or `[re, im]`.
impl Serialize for HomogEigenvalue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.value() {
            None => s.serialize_str("inf"),
            Some(v) => [v.re, v.im].serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for HomogEigenvalue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Tag(String),
            Pair([f64; 2]),
        }
        match Repr::deserialize(d)? {
            Repr::Tag(t) if t == "inf" => Ok(Self::infinite()),
            Repr::Tag(t) => Err(serde::de::Error::custom(format!("unknown eigenvalue tag {t:?}"))),
            Repr::Pair([re, im]) => Ok(Self::finite(C64::new(re, im))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_pair_rejected() {
        assert!(HomogEigenvalue::new(C64::new(0.0, 0.0), C64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn canonical_form() {
        let e = HomogEigenvalue::new(C64::new(0.0, 2.0), C64::new(0.0, 1.0)).unwrap();
        assert!((e.value().unwrap() - C64::new(2.0, 0.0)).norm() < 1e-15);
        assert_eq!(e.beta().im, 0.0);
        assert!(e.beta().re > 0.0);
        let norm = e.alpha().norm_sqr() + e.beta().norm_sqr();
        assert!((norm - 1.0).abs() < 1e-15);
        let inf = HomogEigenvalue::new(C64::new(-3.0, 1.0), C64::new(0.0, 0.0)).unwrap();
        assert!(inf.is_infinite());
        assert_eq!(inf, HomogEigenvalue::infinite());
    }

    #[test]
    fn snap_and_distance() {
        let big = HomogEigenvalue::new(C64::new(1.0, 0.0), C64::new(1e-12, 0.0)).unwrap();
        assert!(!big.is_infinite());
        assert!(big.snap_infinite(1e-8).is_infinite());
        let a = HomogEigenvalue::real(1.0);
        let b = HomogEigenvalue::real(1.0 + 1e-9);
        assert!(a.distance(&b) < 2e-9);
        assert_eq!(a.distance(&HomogEigenvalue::infinite()), f64::INFINITY);
        assert!(a.chordal_distance(&b) < 1e-9);
    }

    #[test]
    fn multiset_matching() {
        let a = [HomogEigenvalue::real(1.0), HomogEigenvalue::real(1.0), HomogEigenvalue::infinite()];
        let b = [HomogEigenvalue::infinite(), HomogEigenvalue::real(1.0 + 1e-12), HomogEigenvalue::real(1.0)];
        assert!(multiset_distance(&a, &b).unwrap() < 1e-11);
        let c = [HomogEigenvalue::real(1.0), HomogEigenvalue::real(2.0), HomogEigenvalue::infinite()];
        assert!(multiset_distance(&a, &c).unwrap() > 0.5);
        assert!(multiset_distance(&a, &c[..2]).is_none());
    }

    #[test]
    fn serde_forms() {
        let v = vec![HomogEigenvalue::infinite(), HomogEigenvalue::finite(C64::new(1.5, -2.0))];
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(json, r#"["inf",[1.5,-2.0]]"#);
        let back: Vec<HomogEigenvalue> = serde_json::from_str(&json).unwrap();
        assert_eq!(back[0], v[0]);
        assert!(back[1].distance(&v[1]) < 1e-15);
    }

    proptest::proptest! {
        #[test]
        fn canonicalization_is_idempotent(
            ar in -5.0f64..5.0, ai in -5.0f64..5.0, br in -5.0f64..5.0, bi in -5.0f64..5.0
        ) {
            proptest::prop_assume!(ar.abs() + ai.abs() + br.abs() + bi.abs() > 1e-3);
            let e = HomogEigenvalue::new(C64::new(ar, ai), C64::new(br, bi)).unwrap();
            let again = HomogEigenvalue::new(e.alpha(), e.beta()).unwrap();
            proptest::prop_assert!((again.alpha() - e.alpha()).norm() < 1e-15);
            proptest::prop_assert!((again.beta() - e.beta()).norm() < 1e-15);
        }
    }
}
