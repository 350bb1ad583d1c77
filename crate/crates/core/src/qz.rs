//! Complex QZ algorithm.
//!
//! Reduces a pencil `(A, B)` to generalized Schur form `A = Q S Zᴴ`,
//! `B = Q T Zᴴ` with `S`, `T` upper triangular, using a Hessenberg-triangular
//! reduction followed by single-shift implicit QZ sweeps. Infinite
//! eigenvalues are deflated by chasing zeros on the diagonal of `T` to the
//! bottom of the active block.

use std::ops::Range;

use crate::{CMat, CVec, C64};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Plane rotation `G = [[c, s], [-s̄, c]]` with real `c`.
#[derive(Clone, Copy, Debug)]
struct Rotation {
    c: f64,
    s: C64,
}

impl Rotation {
    /// Rotation with `G [f; g] = [r; 0]`. Returns `(G, r)`.
    fn zeroing(f: C64, g: C64) -> (Self, C64) {
        if g == ZERO {
            return (Self { c: 1.0, s: ZERO }, f);
        }
        if f == ZERO {
            let gn = g.norm();
            return (Self { c: 0.0, s: g.conj() / gn }, C64::new(gn, 0.0));
        }
        let fn_ = f.norm();
        let norm = fn_.hypot(g.norm());
        let phase = f / fn_;
        (
            Self {
                c: fn_ / norm,
                s: phase * g.conj() / norm,
            },
            phase * norm,
        )
    }

    /// Rows `(i, j)` ← `G · rows` over the given columns.
    fn apply_left(&self, m: &mut CMat, i: usize, j: usize, cols: Range<usize>) {
        for k in cols {
            let (x, y) = (m[(i, k)], m[(j, k)]);
            m[(i, k)] = x * self.c + self.s * y;
            m[(j, k)] = -self.s.conj() * x + y * self.c;
        }
    }

    /// Columns `(i, j)` ← `columns · Gᴴ` over the given rows.
    fn apply_right(&self, m: &mut CMat, i: usize, j: usize, rows: Range<usize>) {
        for k in rows {
            let (x, y) = (m[(k, i)], m[(k, j)]);
            m[(k, i)] = x * self.c + self.s.conj() * y;
            m[(k, j)] = -self.s * x + y * self.c;
        }
    }
}

/// Generalized Schur decomposition of a square pencil.
#[derive(Clone, Debug)]
pub(crate) struct GeneralizedSchur {
    pub s: CMat,
    pub t: CMat,
    pub q: CMat,
    pub z: CMat,
}

struct Work {
    s: CMat,
    t: CMat,
    q: CMat,
    z: CMat,
    n: usize,
}

impl Work {
    /// Rotates rows `(i, i+1)` of `S`, `T` so that `G [f; g] = [r; 0]`.
    fn rotate_rows(&mut self, i: usize, f: C64, g: C64) -> Rotation {
        let (rot, _) = Rotation::zeroing(f, g);
        let n = self.n;
        rot.apply_left(&mut self.s, i, i + 1, 0..n);
        rot.apply_left(&mut self.t, i, i + 1, 0..n);
        rot.apply_right(&mut self.q, i, i + 1, 0..n);
        rot
    }

    /// Column rotation on `(keep, kill)` that annihilates `m[(row, kill)]`
    /// for `m` = `S` (if `in_s`) or `T`, applied to both matrices.
    fn rotate_cols(&mut self, row: usize, keep: usize, kill: usize, in_s: bool) {
        let src = if in_s { &self.s } else { &self.t };
        let (rot, _) = Rotation::zeroing(src[(row, keep)].conj(), src[(row, kill)].conj());
        let n = self.n;
        rot.apply_right(&mut self.s, keep, kill, 0..n);
        rot.apply_right(&mut self.t, keep, kill, 0..n);
        rot.apply_right(&mut self.z, keep, kill, 0..n);
        if in_s {
            self.s[(row, kill)] = ZERO;
        } else {
            self.t[(row, kill)] = ZERO;
        }
    }

    fn hessenberg_triangular(&mut self) {
        let n = self.n;
        // QR of T by Givens rotations.
        for j in 0..n {
            for i in (j + 1..n).rev() {
                if self.t[(i, j)] != ZERO {
                    let (f, g) = (self.t[(i - 1, j)], self.t[(i, j)]);
                    self.rotate_rows(i - 1, f, g);
                    self.t[(i, j)] = ZERO;
                }
            }
        }
        // Reduce S to Hessenberg form while keeping T triangular.
        for j in 0..n.saturating_sub(2) {
            for i in (j + 2..n).rev() {
                if self.s[(i, j)] == ZERO {
                    continue;
                }
                let (f, g) = (self.s[(i - 1, j)], self.s[(i, j)]);
                self.rotate_rows(i - 1, f, g);
                self.s[(i, j)] = ZERO;
                if self.t[(i, i - 1)] != ZERO {
                    self.rotate_cols(i, i, i - 1, false);
                }
            }
        }
    }

    /// Moves a zero at `T[j, j]` down to `T[last, last]`.
    fn chase_infinite_zero(&mut self, j: usize, first: usize, last: usize) {
        for jch in j..last {
            let (f, g) = (self.t[(jch, jch + 1)], self.t[(jch + 1, jch + 1)]);
            self.rotate_rows(jch, f, g);
            self.t[(jch + 1, jch + 1)] = ZERO;
            self.t[(jch + 1, jch)] = ZERO;
            if jch > first {
                // Fill-in at S[jch+1, jch-1].
                self.rotate_cols(jch + 1, jch, jch - 1, true);
                self.t[(jch, jch - 1)] = ZERO;
            }
        }
    }

    /// Splits off an infinite eigenvalue at `last` once `T[last, last] = 0`.
    fn deflate_infinite(&mut self, last: usize) {
        self.rotate_cols(last, last, last - 1, true);
        self.t[(last, last - 1)] = ZERO;
    }

    fn wilkinson_shift(&self, last: usize) -> C64 {
        let (i, j) = (last - 1, last);
        let (a11, a12, a21, a22) = (self.s[(i, i)], self.s[(i, j)], self.s[(j, i)], self.s[(j, j)]);
        let (b11, b12, b22) = (self.t[(i, i)], self.t[(i, j)], self.t[(j, j)]);
        // M = T⁻¹ S restricted to the trailing 2×2 block.
        let m11 = (a11 - b12 / b22 * a21) / b11;
        let m12 = (a12 - b12 / b22 * a22) / b11;
        let m21 = a21 / b22;
        let m22 = a22 / b22;
        let half_tr = (m11 + m22) * 0.5;
        let det = m11 * m22 - m12 * m21;
        let disc = (half_tr * half_tr - det).sqrt();
        let (l1, l2) = (half_tr + disc, half_tr - disc);
        if (l1 - m22).norm() <= (l2 - m22).norm() {
            l1
        } else {
            l2
        }
    }

    fn sweep(&mut self, first: usize, last: usize, shift: C64) {
        let f = self.s[(first, first)] - shift * self.t[(first, first)];
        let g = self.s[(first + 1, first)];
        self.rotate_rows(first, f, g);
        for j in first..last {
            // T fill at (j+1, j).
            self.rotate_cols(j + 1, j + 1, j, false);
            if j + 2 <= last {
                // S bulge at (j+2, j).
                let (f, g) = (self.s[(j + 1, j)], self.s[(j + 2, j)]);
                self.rotate_rows(j + 1, f, g);
                self.s[(j + 2, j)] = ZERO;
            }
        }
    }

    fn iterate(&mut self) -> Result<(), String> {
        let n = self.n;
        if n <= 1 {
            return Ok(());
        }
        let ulp = f64::EPSILON;
        let atol = ulp * self.s.norm();
        let btol = ulp * self.t.norm();
        let max_iter = 40 * n + 40;
        let mut last = n - 1;
        let mut since_deflation = 0usize;
        let mut exceptional = ZERO;
        let mut total = 0usize;

        while last > 0 {
            total += 1;
            if total > max_iter {
                return Err(format!("QZ iteration did not converge after {max_iter} sweeps"));
            }
            let negligible = |s: &CMat, j: usize| {
                s[(j, j - 1)].norm() <= atol.max(ulp * (s[(j, j)].norm() + s[(j - 1, j - 1)].norm()))
            };

            if negligible(&self.s, last) {
                self.s[(last, last - 1)] = ZERO;
                last -= 1;
                since_deflation = 0;
                exceptional = ZERO;
                continue;
            }
            if self.t[(last, last)].norm() <= btol {
                self.t[(last, last)] = ZERO;
                self.deflate_infinite(last);
                last -= 1;
                since_deflation = 0;
                exceptional = ZERO;
                continue;
            }

            let mut first = last - 1;
            while first > 0 && !negligible(&self.s, first) {
                first -= 1;
            }
            if first > 0 {
                self.s[(first, first - 1)] = ZERO;
            }

            if let Some(j) = (first..last).find(|&j| self.t[(j, j)].norm() <= btol) {
                self.t[(j, j)] = ZERO;
                self.chase_infinite_zero(j, first, last);
                continue;
            }

            since_deflation += 1;
            let shift = if since_deflation.is_multiple_of(10) {
                exceptional += self.s[(last, last - 1)] / self.t[(last - 1, last - 1)];
                self.s[(last, last)] / self.t[(last, last)] + exceptional
            } else {
                self.wilkinson_shift(last)
            };
            if !(shift.re.is_finite() && shift.im.is_finite()) {
                return Err("non-finite shift in QZ sweep".into());
            }
            self.sweep(first, last, shift);
        }
        Ok(())
    }
}

pub(crate) fn qz(a: &CMat, b: &CMat) -> Result<GeneralizedSchur, String> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n || b.ncols() != n {
        return Err("QZ needs two square matrices of equal size".into());
    }
    if a.iter().chain(b.iter()).any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err("non-finite matrix entries".into());
    }
    let mut w = Work {
        s: a.clone(),
        t: b.clone(),
        q: CMat::identity(n, n),
        z: CMat::identity(n, n),
        n,
    };
    w.hessenberg_triangular();
    w.iterate()?;
    // Clean the strictly lower parts left by rounding.
    for j in 0..n {
        for i in j + 1..n {
            w.s[(i, j)] = ZERO;
            w.t[(i, j)] = ZERO;
        }
    }
    Ok(GeneralizedSchur {
        s: w.s,
        t: w.t,
        q: w.q,
        z: w.z,
    })
}

impl GeneralizedSchur {
    pub fn n(&self) -> usize {
        self.s.nrows()
    }

    pub fn pair(&self, j: usize) -> (C64, C64) {
        (self.s[(j, j)], self.t[(j, j)])
    }

    fn dmin(&self, alpha: C64, beta: C64) -> f64 {
        f64::EPSILON * (beta.norm() * self.s.norm() + alpha.norm() * self.t.norm()) + f64::MIN_POSITIVE
    }

    /// Right eigenvector for the `j`-th diagonal pair, `(βA − αB) x = 0`.
    pub fn right_eigenvector(&self, j: usize) -> CVec {
        let (alpha, beta) = self.pair(j);
        let dmin = self.dmin(alpha, beta);
        let n = self.n();
        let mut v = CVec::zeros(n);
        v[j] = ONE;
        for i in (0..j).rev() {
            let mut sum = ZERO;
            for k in i + 1..=j {
                sum += (beta * self.s[(i, k)] - alpha * self.t[(i, k)]) * v[k];
            }
            let mut d = beta * self.s[(i, i)] - alpha * self.t[(i, i)];
            if d.norm() < dmin {
                d = C64::new(dmin, 0.0);
            }
            v[i] = -sum / d;
            rescale_if_large(&mut v);
        }
        crate::linalg::normalized(&self.z * v)
    }

    /// Left eigenvector for the `j`-th diagonal pair, `yᴴ(βA − αB) = 0`.
    pub fn left_eigenvector(&self, j: usize) -> CVec {
        let (alpha, beta) = self.pair(j);
        let dmin = self.dmin(alpha, beta);
        let n = self.n();
        // u = conj(w) with uᵀ(βS − αT) = 0.
        let mut u = CVec::zeros(n);
        u[j] = ONE;
        for i in j + 1..n {
            let mut sum = ZERO;
            for k in j..i {
                sum += u[k] * (beta * self.s[(k, i)] - alpha * self.t[(k, i)]);
            }
            let mut d = beta * self.s[(i, i)] - alpha * self.t[(i, i)];
            if d.norm() < dmin {
                d = C64::new(dmin, 0.0);
            }
            u[i] = -sum / d;
            rescale_if_large(&mut u);
        }
        let w = u.map(|z| z.conj());
        crate::linalg::normalized(&self.q * w)
    }
}

fn rescale_if_large(v: &mut CVec) {
    let big = v.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if big > 1e100 {
        *v /= C64::new(big, 0.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{complex_gaussian, max_abs, seeded_rng};

    fn check_decomposition(a: &CMat, b: &CMat, f: &GeneralizedSchur) {
        let n = a.nrows();
        let scale = a.norm() + b.norm() + 1.0;
        assert!(max_abs(&(&f.q * &f.s * f.z.adjoint() - a)) < 1e-12 * scale);
        assert!(max_abs(&(&f.q * &f.t * f.z.adjoint() - b)) < 1e-12 * scale);
        assert!(max_abs(&(f.q.adjoint() * &f.q - CMat::identity(n, n))) < 1e-12);
        assert!(max_abs(&(f.z.adjoint() * &f.z - CMat::identity(n, n))) < 1e-12);
    }

    #[test]
    fn random_pencil_schur_form() {
        let mut rng = seeded_rng(11);
        for n in [1, 2, 3, 7, 20] {
            let a = complex_gaussian(n, n, &mut rng);
            let b = complex_gaussian(n, n, &mut rng);
            let f = qz(&a, &b).unwrap();
            check_decomposition(&a, &b, &f);
            for j in 0..n {
                let (al, be) = f.pair(j);
                let x = f.right_eigenvector(j);
                let y = f.left_eigenvector(j);
                let r = (&a * &x) * be - (&b * &x) * al;
                let l = (y.adjoint() * &a) * be - (y.adjoint() * &b) * al;
                let scale = be.norm() * a.norm() + al.norm() * b.norm();
                assert!(r.norm() < 1e-12 * scale, "right residual {}", r.norm());
                assert!(l.norm() < 1e-12 * scale, "left residual {}", l.norm());
            }
        }
    }

    #[test]
    fn singular_b_gives_infinite_eigenvalues() {
        let mut rng = seeded_rng(5);
        let n = 6;
        let a = complex_gaussian(n, n, &mut rng);
        let mut b = complex_gaussian(n, n, &mut rng);
        // Rank-4 B: two infinite eigenvalues.
        let u = complex_gaussian(n, 4, &mut rng);
        let v = complex_gaussian(4, n, &mut rng);
        b = &u * &v + b * C64::new(0.0, 0.0);
        let f = qz(&a, &b).unwrap();
        check_decomposition(&a, &b, &f);
        let n_inf = (0..n)
            .filter(|&j| {
                let (al, be) = f.pair(j);
                be.norm() < 1e-10 * al.norm()
            })
            .count();
        assert_eq!(n_inf, 2);
    }

    #[test]
    fn exact_zero_diagonal_chase() {
        // B with a zero at the top of the diagonal after triangularization.
        let a = CMat::from_fn(3, 3, |i, j| C64::new((i + 2 * j + 1) as f64, (i * j) as f64));
        let b = CMat::from_fn(3, 3, |i, j| if i == j && i > 0 { ONE } else { ZERO });
        let f = qz(&a, &b).unwrap();
        check_decomposition(&a, &b, &f);
        let n_inf = (0..3).filter(|&j| f.pair(j).1 == ZERO).count();
        assert_eq!(n_inf, 1);
    }
}
