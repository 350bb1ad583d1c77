//! Dense linear-algebra helpers shared by the solvers.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::{CMat, CVec, C64};

pub type Rng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian entries, `(g₁ + i g₂)/√2`.
pub fn complex_gaussian(rows: usize, cols: usize, rng: &mut Rng) -> CMat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(s * re, s * im)
    })
}

pub fn real_gaussian(rows: usize, cols: usize, rng: &mut Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

pub fn to_complex(m: &DMatrix<f64>) -> CMat {
    m.map(|x| C64::new(x, 0.0))
}

/// Isometric factor of a thin QR decomposition.
pub fn orthonormalize(m: CMat) -> CMat {
    let cols = m.ncols();
    let q = m.qr().q();
    q.columns(0, cols).into_owned()
}

/// Haar-like random unitary matrix from the QR factor of a complex Gaussian.
pub fn random_unitary(n: usize, rng: &mut Rng) -> CMat {
    orthonormalize(complex_gaussian(n, n, rng))
}

pub fn hermitize(m: &CMat) -> CMat {
    let mut h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    for i in 0..h.nrows().min(h.ncols()) {
        h[(i, i)].im = 0.0;
    }
    h
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// `max |m - m*|` entrywise.
pub fn asymmetry(m: &CMat) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// Singular values in decreasing order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Number of singular values above `rel_tol · σ_max`.
pub fn numerical_rank(m: &CMat, rel_tol: f64) -> usize {
    let sv = singular_values(m);
    match sv.first() {
        None => 0,
        Some(&0.0) => 0,
        Some(&smax) => sv.iter().filter(|&&s| s > rel_tol * smax).count(),
    }
}

/// Default relative rank tolerance `max(rows, cols) · ε`.
pub fn default_rank_tol(m: &CMat) -> f64 {
    m.nrows().max(m.ncols()) as f64 * f64::EPSILON
}

/// 2-norm condition number; `∞` for singular input.
pub fn condition_number(m: &CMat) -> f64 {
    let sv = singular_values(m);
    match (sv.first(), sv.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

/// Eigenvalues of a Hermitian matrix in increasing order.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(hermitize(m))
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Orthonormal basis of the right singular subspace belonging to the `dim`
/// smallest singular values, together with those singular values.
pub fn smallest_right_singular_vectors(m: &CMat, dim: usize) -> (CMat, Vec<f64>) {
    let n = m.ncols();
    // A thin SVD of a wide matrix drops part of the null space; pad with zero rows.
    if m.nrows() < n {
        let padded = m.clone().resize_vertically(n, C64::new(0.0, 0.0));
        return smallest_right_singular_vectors(&padded, dim);
    }
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    let mut basis = CMat::zeros(n, dim);
    let mut values = Vec::with_capacity(dim);
    for (c, &idx) in order.iter().take(dim).enumerate() {
        let row = v_t.row(idx);
        for r in 0..n {
            basis[(r, c)] = row[r].conj();
        }
        values.push(svd.singular_values[idx]);
    }
    (basis, values)
}

pub fn normalized(v: CVec) -> CVec {
    let norm = v.norm();
    if norm > 0.0 {
        v / C64::new(norm, 0.0)
    } else {
        v
    }
}

/// Block-diagonal assembly of square complex blocks.
pub fn block_diag(blocks: &[CMat]) -> CMat {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMat::zeros(n, n);
    let mut off = 0;
    for b in blocks {
        out.view_mut((off, off), (b.nrows(), b.ncols())).copy_from(b);
        off += b.nrows();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitary_is_orthonormal() {
        let mut rng = seeded_rng(7);
        let q = random_unitary(9, &mut rng);
        let err = max_abs(&(q.adjoint() * &q - CMat::identity(9, 9)));
        assert!(err < 1e-13, "{err}");
    }

    #[test]
    fn rank_of_outer_product() {
        let mut rng = seeded_rng(1);
        let u = complex_gaussian(6, 2, &mut rng);
        let v = complex_gaussian(2, 6, &mut rng);
        let m = &u * &v;
        assert_eq!(numerical_rank(&m, default_rank_tol(&m)), 2);
    }

    #[test]
    fn null_vectors() {
        let mut rng = seeded_rng(2);
        let u = complex_gaussian(5, 3, &mut rng);
        let v = complex_gaussian(3, 5, &mut rng);
        let m = &u * &v;
        let (basis, values) = smallest_right_singular_vectors(&m, 2);
        assert!(values.iter().all(|&s| s < 1e-12));
        assert!(max_abs(&(&m * &basis)) < 1e-12);
        assert!(max_abs(&(basis.adjoint() * &basis - CMat::identity(2, 2))) < 1e-12);
    }

    #[test]
    fn hermitian_spectrum() {
        let m = to_complex(&DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]));
        let ev = hermitian_eigenvalues(&m);
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);
    }
}
