//! Structure-preserving eigenvalue computation for singular Hermitian pencils.
//!
//! A singular Hermitian pencil `A - λB` (with `A = A*`, `B = B*` and
//! `det(A - λB) ≡ 0`) still has a well-defined regular part whose eigenvalues
//! are the ones of interest. This crate recovers them with three techniques
//! that keep the Hermitian structure intact:
//!
//! * a Hermitian rank-completing perturbation `A - λB + τ U (D_A - λ D_B) U*`
//!   ([`solver::perturb`]),
//! * a projection onto the normal rank `W* (A - λB) W` ([`solver::project`]),
//! * a bordered augmentation of size `n + k` ([`solver::augment`]).
//!
//! Each method produces a regular pencil whose eigenvalues are sorted into
//! true, prescribed and random eigenvalues from eigenvector orthogonality
//! tests. Because the regularized pencil is still Hermitian, the sign
//! characteristic of real and infinite true eigenvalues can be read off
//! from it ([`sign`]).
//!
//! Other modules cover test-pencil generation with known canonical structure
//! ([`testgen`]), reductions of even/odd/skew/palindromic pencils
//! ([`structures`]), symmetric determinantal representations for cubic
//! bivariate systems ([`birep`]), and file formats ([`io`]).

pub mod birep;
pub mod error;
pub mod homog;
pub mod io;
pub mod linalg;
pub mod pencil;
mod qz;
pub mod regular;
pub mod sign;
pub mod solver;
pub mod structures;
pub mod testgen;

pub use error::{Error, Result};
pub use homog::HomogEigenvalue;
pub use pencil::{HermitianPencil, MoebiusParams};
pub use regular::{solve_regular, EigenTriplet, RegularOptions};
pub use solver::{ClassTol, ClassifiedSpectrum, EigenClass, Method};

/// Complex double.
pub type C64 = nalgebra::Complex<f64>;
/// Dense complex matrix.
pub type CMat = nalgebra::DMatrix<C64>;
/// Dense complex vector.
pub type CVec = nalgebra::DVector<C64>;
