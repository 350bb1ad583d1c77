//! Singular Hermitian test pencils with known canonical structure.
//!
//! A pencil is assembled block-diagonally from Thompson canonical blocks and
//! then hidden behind a seeded congruence. The [`GroundTruth`] records what
//! any correct solver has to recover.

use nalgebra::DMatrix;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::homog::HomogEigenvalue;
use crate::linalg::{self, block_diag, complex_gaussian, real_gaussian, seeded_rng, to_complex, Rng};
use crate::pencil::HermitianPencil;
use crate::{CMat, Error, Result, C64};

/// Sign `±1` of a real or infinite block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn of(x: f64) -> Self {
        if x < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;
    fn try_from(v: i8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => Err(format!("sign must be 1 or -1, got {v}")),
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        match s {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealBlock {
    pub mu: f64,
    pub size: usize,
    pub sigma: Sign,
}

/// Block pair for `λ₀` and `conj(λ₀)`, `Im λ₀ > 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexPair {
    /// `[re, im]`.
    pub lambda0: [f64; 2],
    pub size: usize,
    /// Use a single Jordan block instead of a diagonal `J`.
    #[serde(default)]
    pub jordan: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfBlock {
    pub size: usize,
    pub sigma: Sign,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CongruenceKind {
    Identity,
    /// Real orthogonal factor times a diagonal scaling in `[10^-0.5, 10^0.5]`.
    #[default]
    RealOrthogonalScaled,
    /// Complex Gaussian with its condition number clipped at `1e3`.
    ComplexRandom,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ThompsonSpec {
    #[serde(default)]
    pub real_blocks: Vec<RealBlock>,
    #[serde(default)]
    pub complex_pairs: Vec<ComplexPair>,
    #[serde(default)]
    pub inf_blocks: Vec<InfBlock>,
    #[serde(default)]
    pub minimal_indices: Vec<usize>,
    #[serde(default)]
    pub congruence_seed: u64,
    #[serde(default)]
    pub congruence_kind: CongruenceKind,
}

/// One distinct eigenvalue of the regular part.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrueEigenvalue {
    pub value: HomogEigenvalue,
    /// Sizes of the Jordan blocks; the algebraic multiplicity is their sum.
    pub block_sizes: Vec<usize>,
    /// One sign per block for real and infinite eigenvalues, sorted.
    pub signs: Vec<Sign>,
}

impl TrueEigenvalue {
    pub fn multiplicity(&self) -> usize {
        self.block_sizes.iter().sum()
    }

    pub fn is_semisimple(&self) -> bool {
        self.block_sizes.iter().all(|&s| s == 1)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub n: usize,
    pub normal_rank: usize,
    pub k: usize,
    /// `M = Σ m_i`.
    pub m_total: usize,
    pub minimal_indices: Vec<usize>,
    pub eigenvalues: Vec<TrueEigenvalue>,
}

impl GroundTruth {
    /// `r = n − 2M − k`.
    pub fn r(&self) -> usize {
        self.n - 2 * self.m_total - self.k
    }

    /// All true eigenvalues repeated by algebraic multiplicity.
    pub fn expanded(&self) -> Vec<HomogEigenvalue> {
        self.eigenvalues
            .iter()
            .flat_map(|e| std::iter::repeat_n(e.value, e.multiplicity()))
            .collect()
    }
}

fn flip(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| if i + j + 1 == n { 1.0 } else { 0.0 })
}

/// `Z_{μ,n}`: `μ` on the anti-diagonal and `1` just below it in the constant
/// part; the flip matrix in the `λ` part. Eigenvalue `μ` with one Jordan
/// block of size `n`.
pub fn block_z(mu: f64, n: usize) -> HermitianPencil {
    assert!(n >= 1, "block size must be positive");
    let a = DMatrix::from_fn(n, n, |i, j| match i + j + 1 {
        s if s == n => mu,
        s if s == n + 1 => 1.0,
        _ => 0.0,
    });
    HermitianPencil::from_parts(&to_complex(&a), &to_complex(&flip(n)))
}

/// `N_n`: flip matrix in the constant part, `1` just below the anti-diagonal
/// in the `λ` part. Eigenvalue `∞` with one block of size `n`.
pub fn block_n(n: usize) -> HermitianPencil {
    assert!(n >= 1, "block size must be positive");
    let b = DMatrix::from_fn(n, n, |i, j| if i + j == n { 1.0 } else { 0.0 });
    HermitianPencil::from_parts(&to_complex(&flip(n)), &to_complex(&b))
}

/// `L_η(λ) = G − λH` with `G = [0 I_η]`, `H = [I_η 0]`, both `η × (η+1)`.
pub fn block_l(eta: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let g = DMatrix::from_fn(eta, eta + 1, |i, j| if j == i + 1 { 1.0 } else { 0.0 });
    let h = DMatrix::from_fn(eta, eta + 1, |i, j| if j == i { 1.0 } else { 0.0 });
    (g, h)
}

/// `[[0, L_η], [L_ηᵀ, 0]]`, of size `2η + 1`.
pub fn singular_block(eta: usize) -> HermitianPencil {
    let (g, h) = block_l(eta);
    let bordered = |m: &DMatrix<f64>| {
        let n = 2 * eta + 1;
        let mut out = DMatrix::zeros(n, n);
        out.view_mut((0, eta), (eta, eta + 1)).copy_from(m);
        out.view_mut((eta, 0), (eta + 1, eta)).copy_from(&m.transpose());
        to_complex(&out)
    };
    HermitianPencil::from_parts(&bordered(&g), &bordered(&h))
}

/// `[[0, J − λI], [J* − λI, 0]]` with `J = λ₀I` or a Jordan block.
pub fn complex_pair_block(lambda0: C64, size: usize, jordan: bool) -> HermitianPencil {
    let j = CMat::from_fn(size, size, |r, c| {
        if r == c {
            lambda0
        } else if jordan && c == r + 1 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let n = 2 * size;
    let mut a = CMat::zeros(n, n);
    let mut b = CMat::zeros(n, n);
    a.view_mut((0, size), (size, size)).copy_from(&j);
    a.view_mut((size, 0), (size, size)).copy_from(&j.adjoint());
    let id = CMat::identity(size, size);
    b.view_mut((0, size), (size, size)).copy_from(&id);
    b.view_mut((size, 0), (size, size)).copy_from(&id);
    HermitianPencil::from_parts(&a, &b)
}

fn signed(p: HermitianPencil, sigma: Sign) -> HermitianPencil {
    p.scaled(sigma.value())
}

impl ThompsonSpec {
    pub fn size(&self) -> usize {
        self.real_blocks.iter().map(|b| b.size).sum::<usize>()
            + 2 * self.complex_pairs.iter().map(|b| b.size).sum::<usize>()
            + self.inf_blocks.iter().map(|b| b.size).sum::<usize>()
            + self.minimal_indices.iter().map(|m| 2 * m + 1).sum::<usize>()
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::SpecInvalid(msg));
        if self.size() == 0 {
            return bad("spec describes an empty pencil".into());
        }
        for b in &self.real_blocks {
            if b.size == 0 || !b.mu.is_finite() {
                return bad(format!("real block mu = {}, size = {} is invalid", b.mu, b.size));
            }
        }
        for c in &self.complex_pairs {
            if c.size == 0 || !(c.lambda0[1] > 0.0) || !c.lambda0[0].is_finite() || !c.lambda0[1].is_finite() {
                return bad(format!(
                    "complex pair {:?} with size {} needs positive size and Im > 0",
                    c.lambda0, c.size
                ));
            }
        }
        if self.inf_blocks.iter().any(|b| b.size == 0) {
            return bad("infinite block of size 0".into());
        }
        Ok(())
    }

    fn canonical_blocks(&self) -> Vec<HermitianPencil> {
        let mut blocks = Vec::new();
        for b in &self.real_blocks {
            blocks.push(signed(block_z(b.mu, b.size), b.sigma));
        }
        for c in &self.complex_pairs {
            blocks.push(complex_pair_block(C64::new(c.lambda0[0], c.lambda0[1]), c.size, c.jordan));
        }
        for b in &self.inf_blocks {
            blocks.push(signed(block_n(b.size), b.sigma));
        }
        for &m in &self.minimal_indices {
            blocks.push(singular_block(m));
        }
        blocks
    }

    fn ground_truth(&self) -> GroundTruth {
        let n = self.size();
        let k = self.minimal_indices.len();
        let m_total = self.minimal_indices.iter().sum();
        let mut eigenvalues: Vec<TrueEigenvalue> = Vec::new();
        let mut add = |value: HomogEigenvalue, size: usize, sign: Option<Sign>| {
            if let Some(e) = eigenvalues.iter_mut().find(|e| e.value == value) {
                e.block_sizes.push(size);
                e.signs.extend(sign);
                e.signs.sort();
            } else {
                eigenvalues.push(TrueEigenvalue {
                    value,
                    block_sizes: vec![size],
                    signs: sign.into_iter().collect(),
                });
            }
        };
        for b in &self.real_blocks {
            add(HomogEigenvalue::real(b.mu), b.size, Some(b.sigma));
        }
        for c in &self.complex_pairs {
            let l = HomogEigenvalue::finite(C64::new(c.lambda0[0], c.lambda0[1]));
            let blocks = if c.jordan { vec![c.size] } else { vec![1; c.size] };
            for s in blocks {
                add(l, s, None);
                add(l.conj(), s, None);
            }
        }
        for b in &self.inf_blocks {
            add(HomogEigenvalue::infinite(), b.size, Some(b.sigma));
        }
        GroundTruth {
            n,
            normal_rank: n - k,
            k,
            m_total,
            minimal_indices: self.minimal_indices.clone(),
            eigenvalues,
        }
    }

    /// Canonical pencil before the congruence.
    pub fn canonical(&self) -> Result<HermitianPencil> {
        self.validate()?;
        let blocks = self.canonical_blocks();
        let a: Vec<CMat> = blocks.iter().map(|b| b.a().clone()).collect();
        let b: Vec<CMat> = blocks.iter().map(|b| b.b().clone()).collect();
        Ok(HermitianPencil::from_parts(&block_diag(&a), &block_diag(&b)))
    }

    /// Block-diagonal Thompson pencil hidden behind the seeded congruence.
    pub fn assemble(&self) -> Result<(HermitianPencil, GroundTruth)> {
        let canonical = self.canonical()?;
        let n = canonical.n();
        let s = congruence_matrix(n, self.congruence_kind, self.congruence_seed);
        let p = canonical.congruence(&s)?;
        Ok((p, self.ground_truth()))
    }

    /// Canonical blocks of the singular 24×24 pencil of the first experiment.
    pub fn experiment_one(congruence_seed: u64) -> Self {
        let real = |mu: f64, sigma: Sign| RealBlock { mu, size: 1, sigma };
        let pair = |re: f64, im: f64| ComplexPair {
            lambda0: [re, im],
            size: 1,
            jordan: false,
        };
        Self {
            real_blocks: vec![
                real(1.0, Sign::Plus),
                real(2.0, Sign::Plus),
                real(2.0, Sign::Minus),
                real(3.0, Sign::Minus),
            ],
            complex_pairs: vec![
                pair(0.0, 1.0),
                pair(1.0, 1.0),
                pair(2.0, 1.0),
                pair(0.0, 2.0),
                pair(1.0, 2.0),
                pair(2.0, 2.0),
            ],
            inf_blocks: vec![],
            minimal_indices: vec![1, 2],
            congruence_seed,
            congruence_kind: CongruenceKind::RealOrthogonalScaled,
        }
    }

    /// Random spec with semisimple eigenvalues drawn from a coarse grid, so
    /// repeated eigenvalues occur and distinct ones stay well separated.
    ///
    /// `k` is in `1..=max_k`, `M ≤ max_m` and the size is at most `max_n`.
    pub fn random(seed: u64, max_n: usize, max_k: usize, max_m: usize, kind: CongruenceKind) -> Self {
        let mut rng = seeded_rng(seed ^ 0x005e_ed0f_7e57);
        let k = rng.random_range(1..=max_k.max(1));
        let mut minimal_indices = Vec::with_capacity(k);
        let mut m_left = max_m;
        for _ in 0..k {
            let m = rng.random_range(0..=m_left.min(3));
            m_left -= m;
            minimal_indices.push(m);
        }
        let singular_size: usize = minimal_indices.iter().map(|m| 2 * m + 1).sum();
        let budget = max_n.saturating_sub(singular_size);
        let target = rng.random_range(budget.min(2)..=budget);
        let mut spec = Self {
            minimal_indices,
            congruence_seed: rng.random(),
            congruence_kind: kind,
            ..Default::default()
        };
        let mut used = 0;
        while used < target {
            let choice = rng.random_range(0..10);
            if choice < 5 {
                let mu = rng.random_range(-6..=6) as f64 * 0.5 + 0.25;
                let sigma = if rng.random_bool(0.5) { Sign::Plus } else { Sign::Minus };
                spec.real_blocks.push(RealBlock { mu, size: 1, sigma });
                used += 1;
            } else if choice < 8 && used + 2 <= target {
                let re = rng.random_range(-4..=4) as f64 * 0.5;
                let im = rng.random_range(1..=4) as f64 * 0.5;
                spec.complex_pairs.push(ComplexPair {
                    lambda0: [re, im],
                    size: 1,
                    jordan: false,
                });
                used += 2;
            } else if choice >= 8 {
                let sigma = if rng.random_bool(0.5) { Sign::Plus } else { Sign::Minus };
                spec.inf_blocks.push(InfBlock { size: 1, sigma });
                used += 1;
            }
        }
        spec
    }
}

/// Seeded nonsingular matrix of the requested kind.
pub fn congruence_matrix(n: usize, kind: CongruenceKind, seed: u64) -> CMat {
    let mut rng = seeded_rng(seed);
    match kind {
        CongruenceKind::Identity => CMat::identity(n, n),
        CongruenceKind::RealOrthogonalScaled => {
            let q = real_gaussian(n, n, &mut rng).qr().q();
            let scale: Vec<f64> = (0..n).map(|_| 10f64.powf(rng.random_range(-0.5..=0.5))).collect();
            let qs = DMatrix::from_fn(n, n, |i, j| q[(i, j)] * scale[j]);
            to_complex(&qs)
        }
        CongruenceKind::ComplexRandom => clipped_gaussian(n, &mut rng, 1e3),
    }
}

fn clipped_gaussian(n: usize, rng: &mut Rng, max_condition: f64) -> CMat {
    let g = complex_gaussian(n, n, rng);
    let svd = g.svd(true, true);
    let (u, v_t) = (svd.u.expect("u requested"), svd.v_t.expect("v_t requested"));
    let smax = svd.singular_values.max();
    let clipped = svd.singular_values.map(|s| C64::new(s.max(smax / max_condition), 0.0));
    u * CMat::from_diagonal(&clipped) * v_t
}

/// The 24×24 pencil of the first experiment, built from its printed regular
/// blocks `R_A − λR_E` and two singular blocks of minimal indices 1 and 2,
/// followed by a seeded real orthogonal-times-scaling congruence.
pub fn experiment_one(seed: u64) -> (HermitianPencil, GroundTruth) {
    let mut ra: Vec<CMat> = [1.0, 2.0, -2.0, -3.0].iter().map(|&x| scalar(x)).collect();
    let mut re: Vec<CMat> = [1.0, 1.0, -1.0, -1.0].iter().map(|&x| scalar(x)).collect();
    let swap = to_complex(&DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
    for (a, b) in [(1.0, 0.0), (1.0, 1.0), (1.0, 2.0), (2.0, 0.0), (2.0, 1.0), (2.0, 2.0)] {
        ra.push(to_complex(&DMatrix::from_row_slice(2, 2, &[a, b, b, -a])));
        re.push(swap.clone());
    }
    for eta in [1, 2] {
        let s = singular_block(eta);
        ra.push(s.a().clone());
        re.push(s.b().clone());
    }
    let canonical = HermitianPencil::from_parts(&block_diag(&ra), &block_diag(&re));
    let s = congruence_matrix(24, CongruenceKind::RealOrthogonalScaled, seed);
    let p = canonical.congruence(&s).expect("well-conditioned congruence");
    let truth = ThompsonSpec::experiment_one(seed).ground_truth();
    (p, truth)
}

fn scalar(x: f64) -> CMat {
    CMat::from_element(1, 1, C64::new(x, 0.0))
}

/// 2-norm condition number of the seeded congruence.
pub fn congruence_condition(n: usize, kind: CongruenceKind, seed: u64) -> f64 {
    linalg::condition_number(&congruence_matrix(n, kind, seed))
}
