//! Symmetric determinantal representations of bivariate polynomials of
//! degree at most three, and roots of two such polynomials from the
//! eigenvalues of the associated Δ-pencils.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::Rng as _;
use serde::Serialize;

use crate::linalg::{numerical_rank, seeded_rng, to_complex};
use crate::pencil::HermitianPencil;
use crate::regular::solve_regular;
use crate::solver::{solve, ClassCounts, ClassTol, EigenClass, Method, SolveOptions};
use crate::{CMat, Error, Result, C64};

/// `p(λ, μ) = Σ a_ij λ^i μ^j` with real coefficients.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BivarPoly {
    coeffs: BTreeMap<(usize, usize), f64>,
}

impl BivarPoly {
    /// Collects `(i, j, a_ij)` triples, summing repeated exponents and
    /// dropping zeros.
    pub fn new(terms: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for (i, j, a) in terms {
            *coeffs.entry((i, j)).or_insert(0.0) += a;
        }
        coeffs.retain(|_, a| *a != 0.0);
        if coeffs.is_empty() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(Self { coeffs })
    }

    /// Dense cubic from coefficients in the order
    /// `a00, a10, a01, a20, a11, a02, a30, a21, a12, a03`.
    pub fn cubic(c: [f64; 10]) -> Result<Self> {
        const EXPONENTS: [(usize, usize); 10] =
            [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0), (2, 1), (1, 2), (0, 3)];
        Self::new(EXPONENTS.iter().zip(c).map(|(&(i, j), a)| (i, j, a)))
    }

    pub fn degree(&self) -> usize {
        self.coeffs.keys().map(|(i, j)| i + j).max().unwrap_or(0)
    }

    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        self.coeffs.get(&(i, j)).copied().unwrap_or(0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.values().fold(0.0, |m, a| m.max(a.abs()))
    }

    pub fn eval(&self, lambda: C64, mu: C64) -> C64 {
        self.coeffs
            .iter()
            .map(|(&(i, j), &a)| lambda.powu(i as u32) * mu.powu(j as u32) * a)
            .sum()
    }
}

/// Real symmetric `A`, `B`, `C` with `p(λ, μ) = det(A + λB + μC)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DetRep {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
}

impl DetRep {
    pub fn size(&self) -> usize {
        self.a.nrows()
    }

    pub fn eval(&self, lambda: C64, mu: C64) -> CMat {
        to_complex(&self.a) + to_complex(&self.b) * lambda + to_complex(&self.c) * mu
    }

    pub fn det(&self, lambda: C64, mu: C64) -> C64 {
        self.eval(lambda, mu).determinant()
    }

    /// Largest `|det − p| / max(1, |p|)` over seeded points in the unit box.
    pub fn det_error(&self, p: &BivarPoly, n_points: usize, seed: u64) -> f64 {
        let mut rng = seeded_rng(seed);
        let mut draw = || C64::new(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5));
        (0..n_points)
            .map(|_| {
                let (l, m) = (draw(), draw());
                let want = p.eval(l, m);
                (self.det(l, m) - want).norm() / want.norm().max(1.0)
            })
            .fold(0.0, f64::max)
    }
}

/// Where the `λ²` coefficient goes in the 5×5 pattern.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Placement {
    /// `a20` on the diagonal in position (2, 2).
    #[default]
    Diagonal,
    /// `½ a20 λ` in positions (1, 2) and (2, 1).
    OffDiagonal,
}

/// The 5×5 symmetric representation of a polynomial of degree at most 3.
///
/// Missing coefficients are zero; the determinant identity holds for every
/// coefficient choice, so lower degrees need no special treatment.
pub fn sym_detrep_cubic(p: &BivarPoly, placement: Placement) -> Result<DetRep> {
    let d = p.degree();
    if d > 3 {
        return Err(Error::DegreeTooHigh(d));
    }
    let a_ = |i, j| p.coeff(i, j);
    let mut a = DMatrix::zeros(5, 5);
    let mut b = DMatrix::zeros(5, 5);
    let mut c = DMatrix::zeros(5, 5);
    let sym = |m: &mut DMatrix<f64>, i: usize, j: usize, v: f64| {
        m[(i, j)] = v;
        m[(j, i)] = v;
    };
    a[(0, 0)] = a_(0, 0);
    b[(0, 0)] = a_(1, 0);
    c[(0, 0)] = a_(0, 1);
    sym(&mut c, 0, 1, 0.5 * a_(1, 1));
    match placement {
        Placement::Diagonal => a[(1, 1)] = a_(2, 0),
        Placement::OffDiagonal => sym(&mut b, 0, 1, 0.5 * a_(2, 0)),
    }
    b[(1, 1)] = a_(3, 0);
    c[(1, 1)] = a_(2, 1);
    sym(&mut b, 0, 2, -1.0);
    sym(&mut a, 1, 2, 1.0);
    a[(3, 3)] = a_(0, 2);
    b[(3, 3)] = a_(1, 2);
    c[(3, 3)] = a_(0, 3);
    sym(&mut a, 3, 4, 1.0);
    sym(&mut c, 0, 4, -1.0);
    Ok(DetRep { a, b, c })
}

/// Smallest available representation: `1×1` for degree ≤ 1, else 5×5.
pub fn sym_detrep(p: &BivarPoly) -> Result<DetRep> {
    if p.degree() <= 1 {
        let one = |v: f64| DMatrix::from_element(1, 1, v);
        return Ok(DetRep {
            a: one(p.coeff(0, 0)),
            b: one(p.coeff(1, 0)),
            c: one(p.coeff(0, 1)),
        });
    }
    sym_detrep_cubic(p, Placement::Diagonal)
}

#[derive(Clone, Debug)]
pub struct DeltaPencils {
    pub delta0: DMatrix<f64>,
    pub delta1: DMatrix<f64>,
    pub delta2: DMatrix<f64>,
    /// Largest entrywise asymmetry over the three matrices.
    pub asymmetry: f64,
}

impl DeltaPencils {
    /// `(Δ₁, Δ₀)`, whose eigenvalues are the `λ`-components of the roots.
    pub fn lambda_pencil(&self) -> Result<HermitianPencil> {
        HermitianPencil::from_real(&self.delta1, &self.delta0, 1e-12)
    }

    /// `(Δ₂, Δ₀)`, whose eigenvalues are the `μ`-components.
    pub fn mu_pencil(&self) -> Result<HermitianPencil> {
        HermitianPencil::from_real(&self.delta2, &self.delta0, 1e-12)
    }
}

/// `Δ₀ = B₁⊗C₂ − C₁⊗B₂`, `Δ₁ = C₁⊗A₂ − A₁⊗C₂`, `Δ₂ = A₁⊗B₂ − B₁⊗A₂`.
pub fn delta_pencils(r1: &DetRep, r2: &DetRep) -> DeltaPencils {
    let delta0 = r1.b.kronecker(&r2.c) - r1.c.kronecker(&r2.b);
    let delta1 = r1.c.kronecker(&r2.a) - r1.a.kronecker(&r2.c);
    let delta2 = r1.a.kronecker(&r2.b) - r1.b.kronecker(&r2.a);
    let asym = |m: &DMatrix<f64>| (m - m.transpose()).abs().max();
    let asymmetry = asym(&delta0).max(asym(&delta1)).max(asym(&delta2));
    DeltaPencils {
        delta0,
        delta1,
        delta2,
        asymmetry,
    }
}

#[derive(Clone, Debug)]
pub struct RootOptions {
    pub seed: u64,
    /// Acceptance bound on `max(|p₁|, |p₂|) / (max|a_ij| · max(1, |λ|, |μ|)³)`.
    pub root_tol: f64,
    /// Components this close to the real axis are reported as real.
    pub snap_tol: f64,
    pub class_tol: ClassTol,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            root_tol: 1e-6,
            snap_tol: 1e-8,
            class_tol: ClassTol::Auto,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Root {
    /// `[re, im]`.
    pub lambda: [f64; 2],
    pub mu: [f64; 2],
    /// `|p₁(λ, μ)|`, `|p₂(λ, μ)|`.
    pub residuals: [f64; 2],
}

impl Root {
    pub fn lambda(&self) -> C64 {
        C64::new(self.lambda[0], self.lambda[1])
    }

    pub fn mu(&self) -> C64 {
        C64::new(self.mu[0], self.mu[1])
    }
}

/// Classification summary of one Δ-pencil solve.
#[derive(Clone, Debug, Serialize)]
pub struct DeltaSolveSummary {
    pub size: usize,
    pub normal_rank: usize,
    pub k: usize,
    pub counts: ClassCounts,
    pub n_finite_true: usize,
    pub n_infinite_true: usize,
    /// Finite true eigenvalues, `[re, im]`.
    pub finite_true: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RootSet {
    pub roots: Vec<Root>,
    pub lambda_solve: DeltaSolveSummary,
    pub mu_solve: DeltaSolveSummary,
}

/// Relative size of `|y*Δ̃₀x|` below which a true eigenvalue is infinite.
const FINITE_TOL: f64 = 1e-8;

/// Finite candidates of one Δ-pencil: true eigenvalues with `|y*Δ̃₀x|`
/// clearly nonzero.
fn finite_candidates(p: &HermitianPencil, opts: &RootOptions) -> Result<(Vec<C64>, DeltaSolveSummary)> {
    let n = p.n();
    let nrank = p.normal_rank(None, 5, opts.seed);
    let k = n - nrank;
    let mut candidates = Vec::new();
    let mut n_infinite = 0;
    let counts;
    if k == 0 {
        let triplets = solve_regular(p.a(), p.b(), &Default::default())?;
        let bn = p.b().norm();
        for t in &triplets {
            let coupling = (t.y.adjoint() * p.b() * &t.x)[(0, 0)].norm();
            match t.value.value() {
                Some(v) if coupling > FINITE_TOL * bn => candidates.push(v),
                _ => n_infinite += 1,
            }
        }
        counts = ClassCounts {
            n_true: triplets.len(),
            ..Default::default()
        };
    } else {
        let sol = solve(
            p,
            &SolveOptions {
                method: Method::Perturb,
                k: Some(k),
                seed: opts.seed,
                class_tol: opts.class_tol,
                ..Default::default()
            },
        )?;
        let bt = sol.regularized.b();
        let bn = bt.norm();
        for e in sol.spectrum.of_class(EigenClass::True) {
            let t = &e.triplet;
            let coupling = (t.y.adjoint() * bt * &t.x)[(0, 0)].norm();
            match t.value.value() {
                Some(v) if coupling > FINITE_TOL * bn => candidates.push(v),
                _ => n_infinite += 1,
            }
        }
        counts = sol.spectrum.counts;
    }
    let summary = DeltaSolveSummary {
        size: n,
        normal_rank: nrank,
        k,
        counts,
        n_finite_true: candidates.len(),
        n_infinite_true: n_infinite,
        finite_true: candidates.iter().map(|z| [z.re, z.im]).collect(),
    };
    Ok((candidates, summary))
}

fn scaled_residual(p1: &BivarPoly, p2: &BivarPoly, l: C64, m: C64) -> (f64, [f64; 2]) {
    let r = [p1.eval(l, m).norm(), p2.eval(l, m).norm()];
    let scale = p1.max_abs_coeff().max(p2.max_abs_coeff()) * 1f64.max(l.norm()).max(m.norm()).powi(3);
    (r[0].max(r[1]) / scale, r)
}

fn snap(z: C64, tol: f64) -> C64 {
    if z.im.abs() <= tol * z.norm().max(1.0) {
        C64::new(z.re, 0.0)
    } else {
        z
    }
}

/// Roots of `p₁ = p₂ = 0` from the two Δ-pencils.
///
/// `λ`- and `μ`-candidates are the finite true eigenvalues of `(Δ₁, Δ₀)` and
/// `(Δ₂, Δ₀)`; they are paired greedily by smallest scaled residual.
pub fn solve_system(p1: &BivarPoly, p2: &BivarPoly, opts: &RootOptions) -> Result<RootSet> {
    let deltas = delta_pencils(&sym_detrep(p1)?, &sym_detrep(p2)?);
    let lp = deltas.lambda_pencil()?;
    let mp = deltas.mu_pencil()?;
    let (lambda_side, mu_side) = std::thread::scope(|s| {
        let l = s.spawn(|| finite_candidates(&lp, opts));
        let m = s.spawn(|| finite_candidates(&mp, opts));
        (
            l.join().expect("lambda solve panicked"),
            m.join().expect("mu solve panicked"),
        )
    });
    let (lambdas, lambda_solve) = lambda_side?;
    let (mus, mu_solve) = mu_side?;

    let grid: Vec<Vec<(f64, [f64; 2])>> = lambdas
        .iter()
        .map(|&l| mus.iter().map(|&m| scaled_residual(p1, p2, l, m)).collect())
        .collect();
    let mut used_l = vec![false; lambdas.len()];
    let mut used_m = vec![false; mus.len()];
    let mut roots = Vec::new();
    loop {
        let best = (0..lambdas.len())
            .filter(|&i| !used_l[i])
            .flat_map(|i| (0..mus.len()).filter(|&j| !used_m[j]).map(move |j| (i, j)))
            .min_by(|&(a, b), &(c, d)| grid[a][b].0.total_cmp(&grid[c][d].0));
        let Some((i, j)) = best else { break };
        let (res, raw) = grid[i][j];
        if res > opts.root_tol {
            break;
        }
        check_ambiguity(&lambdas, &mus, &grid, &used_l, &used_m, i, j, opts.root_tol)?;
        used_l[i] = true;
        used_m[j] = true;
        let (l, m) = (snap(lambdas[i], opts.snap_tol), snap(mus[j], opts.snap_tol));
        roots.push(Root {
            lambda: [l.re, l.im],
            mu: [m.re, m.im],
            residuals: raw,
        });
    }
    if roots.is_empty() {
        return Err(Error::NoFiniteRoots);
    }
    roots.sort_by(|a, b| a.lambda[0].total_cmp(&b.lambda[0]).then(a.lambda[1].total_cmp(&b.lambda[1])));
    Ok(RootSet {
        roots,
        lambda_solve,
        mu_solve,
    })
}

/// A second `μ` fitting `λ_i` almost as well is ambiguous unless another
/// unused `λ` coincides with `λ_i` (two roots sharing a component) or the
/// two `μ` values coincide.
#[allow(clippy::too_many_arguments)]
fn check_ambiguity(
    lambdas: &[C64],
    mus: &[C64],
    grid: &[Vec<(f64, [f64; 2])>],
    used_l: &[bool],
    used_m: &[bool],
    i: usize,
    j: usize,
    root_tol: f64,
) -> Result<()> {
    let close = |a: C64, b: C64| (a - b).norm() <= 1e-6 * a.norm().max(1.0);
    let best = grid[i][j].0;
    let rival = (0..mus.len()).any(|jj| {
        jj != j && !used_m[jj] && !close(mus[jj], mus[j]) && {
            let r = grid[i][jj].0;
            r < root_tol && r <= 10.0 * best
        }
    });
    let shared = (0..lambdas.len()).any(|ii| ii != i && !used_l[ii] && close(lambdas[ii], lambdas[i]));
    if rival && !shared {
        return Err(Error::PairingAmbiguous {
            lambda: format!("{:.6}{:+.6}i", lambdas[i].re, lambdas[i].im),
        });
    }
    Ok(())
}

/// Numerical ranks of `Δ₀`, `Δ₁`, `Δ₂` at the default relative tolerance.
pub fn delta_ranks(d: &DeltaPencils) -> [usize; 3] {
    let rank = |m: &DMatrix<f64>| numerical_rank(&to_complex(m), m.nrows() as f64 * f64::EPSILON);
    [rank(&d.delta0), rank(&d.delta1), rank(&d.delta2)]
}
