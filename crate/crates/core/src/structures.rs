//! Even, odd, skew-Hermitian, palindromic and anti-palindromic pencils,
//! reduced to Hermitian ones.
//!
//! Each reduction multiplies coefficients by `i`, after a real Möbius
//! transformation with `ζ₁ = ζ₂ = 1/√2` for the palindromic kinds. An
//! [`EigenMap`] carries the exact relation between the eigenvalues.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::homog::HomogEigenvalue;
use crate::linalg::max_abs;
use crate::pencil::{HermitianPencil, MoebiusParams, DEFAULT_HERM_TOL};
use crate::solver::{solve, ClassifiedSpectrum, SolveOptions, Solution};
use crate::{CMat, Error, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StructuredKind {
    /// `A = A*`, `B = −B*`.
    Even,
    /// `A = −A*`, `B = B*`.
    Odd,
    /// `A = −A*`, `B = −B*`.
    SkewHermitian,
    /// `B = A*`.
    Palindromic,
    /// `B = −A*`.
    AntiPalindromic,
}

impl StructuredKind {
    pub const ALL: [StructuredKind; 5] = [
        StructuredKind::Even,
        StructuredKind::Odd,
        StructuredKind::SkewHermitian,
        StructuredKind::Palindromic,
        StructuredKind::AntiPalindromic,
    ];
}

impl FromStr for StructuredKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "even" => Ok(Self::Even),
            "odd" => Ok(Self::Odd),
            "skew" | "skew-hermitian" => Ok(Self::SkewHermitian),
            "palindromic" => Ok(Self::Palindromic),
            "anti-palindromic" => Ok(Self::AntiPalindromic),
            _ => Err(format!("unknown structure {s:?}")),
        }
    }
}

impl fmt::Display for StructuredKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Even => "even",
            Self::Odd => "odd",
            Self::SkewHermitian => "skew",
            Self::Palindromic => "palindromic",
            Self::AntiPalindromic => "anti-palindromic",
        })
    }
}

/// Linear map on homogeneous coordinates sending an eigenvalue `μ` of the
/// Hermitian pencil to the eigenvalue `λ` of the structured one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenMap {
    matrix: [[C64; 2]; 2],
}

impl EigenMap {
    pub fn matrix(&self) -> [[C64; 2]; 2] {
        self.matrix
    }

    pub fn pull_back(&self, mu: &HomogEigenvalue) -> HomogEigenvalue {
        mu.transform(&self.matrix).expect("map is invertible")
    }

    pub fn push_forward(&self, lambda: &HomogEigenvalue) -> HomogEigenvalue {
        let [[a, b], [c, d]] = self.matrix;
        let det = a * d - b * c;
        let inv = [[d / det, -b / det], [-c / det, a / det]];
        lambda.transform(&inv).expect("map is invertible")
    }
}

fn mat_mul(p: [[C64; 2]; 2], q: [[C64; 2]; 2]) -> [[C64; 2]; 2] {
    let mut out = [[C64::new(0.0, 0.0); 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = p[i][0] * q[0][j] + p[i][1] * q[1][j];
        }
    }
    out
}

const I: C64 = C64::new(0.0, 1.0);
const ONE: C64 = C64::new(1.0, 0.0);
const ZERO: C64 = C64::new(0.0, 0.0);

fn cayley() -> MoebiusParams {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    MoebiusParams::new(s, s).expect("on the unit circle")
}

impl StructuredKind {
    /// Eigenvalue map of the reduction.
    pub fn eigen_map(self) -> EigenMap {
        let times_i = [[I, ZERO], [ZERO, ONE]];
        let times_minus_i = [[-I, ZERO], [ZERO, ONE]];
        let matrix = match self {
            Self::Even => times_i,
            Self::Odd => times_minus_i,
            Self::SkewHermitian => [[ONE, ZERO], [ZERO, ONE]],
            Self::Palindromic => mat_mul(cayley().pull_back_matrix(), times_i),
            Self::AntiPalindromic => mat_mul(cayley().pull_back_matrix(), times_minus_i),
        };
        EigenMap { matrix }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StructuredPencil {
    kind: StructuredKind,
    a: CMat,
    b: CMat,
}

fn deviation(m: &CMat, sign: f64) -> f64 {
    max_abs(&(m - m.adjoint() * C64::new(sign, 0.0)))
}

impl StructuredPencil {
    /// Validates the structure to `tol` relative to the largest entry.
    pub fn new(kind: StructuredKind, a: CMat, b: CMat, tol: f64) -> Result<Self> {
        if !a.is_square() || a.shape() != b.shape() {
            return Err(Error::DimensionMismatch(format!(
                "A is {}x{}, B is {}x{}",
                a.nrows(),
                a.ncols(),
                b.nrows(),
                b.ncols()
            )));
        }
        let scale = max_abs(&a).max(max_abs(&b));
        let (what, dev) = match kind {
            StructuredKind::Even => ("A = A*, B = -B*", deviation(&a, 1.0).max(deviation(&b, -1.0))),
            StructuredKind::Odd => ("A = -A*, B = B*", deviation(&a, -1.0).max(deviation(&b, 1.0))),
            StructuredKind::SkewHermitian => ("A = -A*, B = -B*", deviation(&a, -1.0).max(deviation(&b, -1.0))),
            StructuredKind::Palindromic => ("B = A*", max_abs(&(&b - a.adjoint()))),
            StructuredKind::AntiPalindromic => ("B = -A*", max_abs(&(&b + a.adjoint()))),
        };
        if dev > tol * scale {
            return Err(Error::StructureViolation(format!(
                "{kind} pencil needs {what}; deviation {dev:.2e} exceeds {:.2e}",
                tol * scale
            )));
        }
        Ok(Self { kind, a, b })
    }

    /// `A − λA*` or `A + λA*`.
    pub fn palindromic(a: CMat, anti: bool) -> Result<Self> {
        let (kind, b) = if anti {
            (StructuredKind::AntiPalindromic, -a.adjoint())
        } else {
            (StructuredKind::Palindromic, a.adjoint())
        };
        Self::new(kind, a, b, 0.0)
    }

    pub fn kind(&self) -> StructuredKind {
        self.kind
    }

    pub fn a(&self) -> &CMat {
        &self.a
    }

    pub fn b(&self) -> &CMat {
        &self.b
    }

    /// Hermitian pencil whose eigenvalues map onto ours through the returned map.
    pub fn to_hermitian(&self) -> Result<(HermitianPencil, EigenMap)> {
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let (ha, hb) = match self.kind {
            StructuredKind::Even => (self.a.clone(), &self.b * I),
            StructuredKind::Odd => (&self.a * I, self.b.clone()),
            StructuredKind::SkewHermitian => (&self.a * I, &self.b * I),
            StructuredKind::Palindromic => {
                // Möbius image ((A + A*)/√2, (A* − A)/√2) is even.
                let ea = (&self.a + &self.b) * s;
                let eb = (&self.b - &self.a) * s;
                (ea, eb * I)
            }
            StructuredKind::AntiPalindromic => {
                // Möbius image is odd.
                let oa = (&self.a + &self.b) * s;
                let ob = (&self.b - &self.a) * s;
                (oa * I, ob)
            }
        };
        let p = HermitianPencil::new(ha, hb, DEFAULT_HERM_TOL)?;
        Ok((p, self.kind.eigen_map()))
    }

    /// Inverse of [`to_hermitian`](Self::to_hermitian): the structured pencil
    /// of the given kind whose reduction is `p`.
    pub fn from_hermitian(kind: StructuredKind, p: &HermitianPencil) -> Self {
        let (ha, hb) = (p.a(), p.b());
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let (a, b) = match kind {
            StructuredKind::Even => (ha.clone(), hb * -I),
            StructuredKind::Odd => (ha * -I, hb.clone()),
            StructuredKind::SkewHermitian => (ha * -I, hb * -I),
            StructuredKind::Palindromic => {
                let (ea, eb) = (ha.clone(), hb * -I);
                let a = (&ea - &eb) * s;
                let b = (&eb + &ea) * s;
                (a, b)
            }
            StructuredKind::AntiPalindromic => {
                let (oa, ob) = (ha * -I, hb.clone());
                let a = (&oa - &ob) * s;
                let b = (&ob + &oa) * s;
                (a, b)
            }
        };
        Self { kind, a, b }
    }
}

/// Hermitian solve of a structured pencil with eigenvalues mapped back.
#[derive(Clone, Debug)]
pub struct StructuredSolution {
    /// Classes and residuals of the Hermitian solve, eigenvalues pulled back.
    pub spectrum: ClassifiedSpectrum,
    /// The underlying Hermitian solution; its signs are reported as is.
    pub hermitian: Solution,
    pub map: EigenMap,
}

/// Reduces, solves with the Hermitian machinery and pulls the eigenvalues back.
///
/// The Hermitian prescribed pencil corresponds to one of the same structure
/// as the input under the inverse reduction.
pub fn solve_structured(sp: &StructuredPencil, opts: &SolveOptions) -> Result<StructuredSolution> {
    let (p, map) = sp.to_hermitian()?;
    let hermitian = solve(&p, opts)?;
    let mut spectrum = hermitian.spectrum.clone();
    for e in &mut spectrum.entries {
        e.triplet.value = map.pull_back(&e.triplet.value);
        e.triplet.raw = map.pull_back(&e.triplet.raw);
    }
    Ok(StructuredSolution {
        spectrum,
        hermitian,
        map,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{complex_gaussian, seeded_rng};
    use crate::regular::{solve_regular, RegularOptions};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_hermitian(n: usize, seed: u64) -> HermitianPencil {
        let mut rng = seeded_rng(seed);
        let a = complex_gaussian(n, n, &mut rng);
        let b = complex_gaussian(n, n, &mut rng);
        HermitianPencil::new(&a + a.adjoint(), &b + b.adjoint(), 1e-12).unwrap()
    }

    #[test]
    fn trivial_even_pencil() {
        let a = CMat::from_element(1, 1, c(1.0, 0.0));
        let b = CMat::from_element(1, 1, c(0.0, 0.0));
        let sp = StructuredPencil::new(StructuredKind::Even, a, b, 1e-12).unwrap();
        let (p, map) = sp.to_hermitian().unwrap();
        assert_eq!(p.b()[(0, 0)], c(0.0, 0.0));
        assert!(map.pull_back(&HomogEigenvalue::infinite()).is_infinite());
    }

    #[test]
    fn violations_rejected() {
        let a = CMat::from_element(1, 1, c(1.0, 0.0));
        let b = CMat::from_element(1, 1, c(1.0, 0.0));
        assert!(matches!(
            StructuredPencil::new(StructuredKind::Even, a.clone(), b.clone(), 1e-12),
            Err(Error::StructureViolation(_))
        ));
        let b = CMat::from_element(1, 1, c(2.0, 0.0));
        assert!(StructuredPencil::new(StructuredKind::Palindromic, a, b, 1e-12).is_err());
    }

    #[test]
    fn reduction_round_trip_all_kinds() {
        let p = random_hermitian(4, 5);
        for kind in StructuredKind::ALL {
            let sp = StructuredPencil::from_hermitian(kind, &p);
            let sp = StructuredPencil::new(kind, sp.a().clone(), sp.b().clone(), 1e-12).unwrap();
            let (q, _) = sp.to_hermitian().unwrap();
            assert!(max_abs(&(q.a() - p.a())) < 1e-13, "{kind}");
            assert!(max_abs(&(q.b() - p.b())) < 1e-13, "{kind}");
        }
    }

    #[test]
    fn eigenvalues_map_exactly() {
        let p = random_hermitian(5, 8);
        let mu: Vec<_> = solve_regular(p.a(), p.b(), &RegularOptions::default())
            .unwrap()
            .into_iter()
            .map(|t| t.value)
            .collect();
        for kind in StructuredKind::ALL {
            let sp = StructuredPencil::from_hermitian(kind, &p);
            let lam: Vec<_> = solve_regular(sp.a(), sp.b(), &RegularOptions::default())
                .unwrap()
                .into_iter()
                .map(|t| t.value)
                .collect();
            let mapped: Vec<_> = mu.iter().map(|m| kind.eigen_map().pull_back(m)).collect();
            let worst = lam
                .iter()
                .map(|l| mapped.iter().map(|m| l.chordal_distance(m)).fold(f64::INFINITY, f64::min))
                .fold(0.0, f64::max);
            assert!(worst < 1e-10, "{kind}: {worst}");
        }
    }

    #[test]
    fn skew_scaling_keeps_spectrum() {
        let p = random_hermitian(3, 2);
        let sp = StructuredPencil::new(StructuredKind::SkewHermitian, p.a() * I, p.b() * I, 1e-12).unwrap();
        let (q, map) = sp.to_hermitian().unwrap();
        assert!(max_abs(&(q.a() + p.a())) < 1e-15);
        let x = HomogEigenvalue::finite(c(0.3, -2.0));
        assert_eq!(map.pull_back(&x), x);
    }

    #[test]
    fn palindromic_map_sends_real_line_to_unit_circle() {
        let map = StructuredKind::Palindromic.eigen_map();
        for mu in [-3.0, -0.5, 0.0, 1.0, 7.0] {
            let l = map.pull_back(&HomogEigenvalue::real(mu)).value().unwrap();
            assert!((l.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn kind_parsing() {
        for kind in StructuredKind::ALL {
            assert_eq!(kind.to_string().parse::<StructuredKind>().unwrap(), kind);
        }
    }

    proptest::proptest! {
        #[test]
        fn map_round_trip(re in -50.0f64..50.0, im in -50.0f64..50.0, which in 0usize..5) {
            let kind = StructuredKind::ALL[which];
            let map = kind.eigen_map();
            let l = HomogEigenvalue::finite(C64::new(re, im));
            proptest::prop_assert!(map.push_forward(&map.pull_back(&l)).chordal_distance(&l) < 1e-13);
            proptest::prop_assert!(map.pull_back(&map.push_forward(&l)).chordal_distance(&l) < 1e-13);
        }
    }
}
