//! The discretised generalised Bhat–Skeide semigroup.
//!
//! For a commuting tuple `S_1, …, S_d` of contractions on `ℂ^dim` and a grid
//! resolution `N`, [`DiscretizedSemigroup`] evaluates
//!
//! ```text
//! T^(N)(t) (δ_{t′} ⊗ ξ) = δ_{t + t′ mod 1} ⊗ (∏_i S_i^{κ(t_i, t′_i)}) ξ
//! ```
//!
//! on `ℓ²(T_N^d) ⊗ ℂ^dim`, basis index `grid_index · dim + component`. The
//! operator is a permutation of grid points carrying one `dim x dim` block
//! per source point, which [`BlockPermutation`] stores directly.

mod blend;
mod suite;

use alloc::vec::Vec;

use crate::error::{input_err, Result};
use crate::linalg::{op_norm, CMatrix, Tolerance};
use crate::math;
use crate::torus::{kappa, GridTime, TorusGrid};
use crate::DEFAULT_MAX_ENTRIES;

pub use blend::{
    approx_error_sweep, scaled_blend, uniform_time_grid, weakly_decreasing, Blend, BlendWeights,
    LatticeSamples, SweepRow,
};
pub use suite::{property_suite, PropertyReport, PropertyThresholds};

/// A validated commuting tuple of contractions on a common space.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionTuple {
    mats: Vec<CMatrix>,
    dim: usize,
    tol: Tolerance,
}

impl ContractionTuple {
    /// Checks `‖S_i‖ ≤ 1 + tol` and `‖S_iS_j − S_jS_i‖ ≤ tol`.
    pub fn new(mats: Vec<CMatrix>, tol: Tolerance) -> Result<Self> {
        let first = mats
            .first()
            .ok_or_else(|| input_err!("a contraction tuple needs d >= 1 operators"))?;
        let dim = first.rows();
        for (i, m) in mats.iter().enumerate() {
            if !m.is_square() || m.rows() != dim {
                return Err(input_err!(
                    "operator {i} is {}x{}, expected {dim}x{dim}",
                    m.rows(),
                    m.cols()
                ));
            }
            let norm = op_norm(m)?;
            if norm > 1.0 + tol.eps() {
                return Err(input_err!("operator {i} has norm {norm} > 1 + {}", tol.eps()));
            }
        }
        let tuple = ContractionTuple { mats, dim, tol };
        let (dev, i, j) = tuple.max_commutator()?;
        if dev > tol.eps() {
            return Err(input_err!(
                "operators {i} and {j} do not commute: ‖S_iS_j − S_jS_i‖ = {dev:e}"
            ));
        }
        Ok(tuple)
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.mats.len()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn mats(&self) -> &[CMatrix] {
        &self.mats
    }

    #[inline]
    pub fn tol(&self) -> Tolerance {
        self.tol
    }

    pub fn into_mats(self) -> Vec<CMatrix> {
        self.mats
    }

    /// Largest commutator norm and the pair attaining it.
    pub fn max_commutator(&self) -> Result<(f64, usize, usize)> {
        let mut worst = (0.0, 0, 0);
        for i in 0..self.d() {
            for j in i + 1..self.d() {
                let a = &self.mats[i];
                let b = &self.mats[j];
                let dev = op_norm(&(&(a * b) - &(b * a)))?;
                if dev > worst.0 {
                    worst = (dev, i, j);
                }
            }
        }
        Ok(worst)
    }

    /// `∏_i S_i^{n_i}`, factors in axis order.
    pub fn monomial(&self, exps: &[usize]) -> CMatrix {
        PowerTable::new(self, exps.iter().copied().max().unwrap_or(0)).product(exps)
    }
}

/// Memoised powers `S_i^k`, `k ≤ max_exp`, of every operator in a tuple.
#[derive(Debug, Clone)]
pub struct PowerTable {
    powers: Vec<Vec<CMatrix>>,
    dim: usize,
}

impl PowerTable {
    pub fn new(tuple: &ContractionTuple, max_exp: usize) -> Self {
        let powers = tuple
            .mats()
            .iter()
            .map(|s| {
                let mut row = Vec::with_capacity(max_exp + 1);
                row.push(CMatrix::identity(tuple.dim()));
                for k in 1..=max_exp {
                    let next = &row[k - 1] * s;
                    row.push(next);
                }
                row
            })
            .collect();
        PowerTable { powers, dim: tuple.dim() }
    }

    pub fn max_exp(&self) -> usize {
        self.powers[0].len() - 1
    }

    #[inline]
    pub fn power(&self, axis: usize, k: usize) -> &CMatrix {
        &self.powers[axis][k]
    }

    /// `∏_i S_i^{e_i}` in axis order; identity factors are skipped.
    pub fn product(&self, exps: &[usize]) -> CMatrix {
        let mut acc: Option<CMatrix> = None;
        for (axis, &e) in exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let p = self.power(axis, e);
            acc = Some(match acc {
                None => p.clone(),
                Some(a) => &a * p,
            });
        }
        acc.unwrap_or_else(|| CMatrix::identity(self.dim))
    }
}

/// An operator on `ℓ²(grid) ⊗ ℂ^dim` sending `δ_j ⊗ ξ` to
/// `δ_{targets[j]} ⊗ blocks[j] ξ`, with `targets` a permutation.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockPermutation {
    dim: usize,
    targets: Vec<usize>,
    blocks: Vec<CMatrix>,
}

impl BlockPermutation {
    pub fn new(dim: usize, targets: Vec<usize>, blocks: Vec<CMatrix>) -> Result<Self> {
        let len = targets.len();
        if blocks.len() != len {
            return Err(input_err!("{} blocks for {len} grid points", blocks.len()));
        }
        let mut seen = alloc::vec![false; len];
        for &t in &targets {
            if t >= len || core::mem::replace(&mut seen[t], true) {
                return Err(input_err!("targets do not form a permutation"));
            }
        }
        if blocks.iter().any(|b| b.rows() != dim || b.cols() != dim) {
            return Err(input_err!("every block must be {dim}x{dim}"));
        }
        Ok(BlockPermutation { dim, targets, blocks })
    }

    #[inline]
    pub fn grid_len(&self) -> usize {
        self.targets.len()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    #[inline]
    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn to_dense(&self) -> CMatrix {
        let n = self.grid_len() * self.dim;
        let mut out = CMatrix::zeros(n, n);
        for (src, (&dst, block)) in self.targets.iter().zip(&self.blocks).enumerate() {
            out.set_block(dst * self.dim, src * self.dim, block);
        }
        out
    }

    /// The product `self · rhs`.
    pub fn compose(&self, rhs: &BlockPermutation) -> BlockPermutation {
        assert_eq!(self.grid_len(), rhs.grid_len(), "grid size mismatch");
        assert_eq!(self.dim, rhs.dim, "block size mismatch");
        let (targets, blocks) = rhs
            .targets
            .iter()
            .zip(&rhs.blocks)
            .map(|(&mid, b)| (self.targets[mid], &self.blocks[mid] * b))
            .unzip();
        BlockPermutation { dim: self.dim, targets, blocks }
    }

    /// Operator norm: the largest block norm, since the grid part is a
    /// permutation.
    pub fn op_norm(&self) -> Result<f64> {
        let mut top = 0.0f64;
        for b in &self.blocks {
            top = top.max(op_norm(b)?);
        }
        Ok(top)
    }

    /// Upper bound on `‖self − other‖`: the largest blockwise Frobenius
    /// norm of the difference when both share the permutation, otherwise
    /// the exact dense operator norm.
    pub fn distance_bound(&self, other: &BlockPermutation) -> Result<f64> {
        if self.targets == other.targets {
            let mut worst = 0.0f64;
            for (a, b) in self.blocks.iter().zip(&other.blocks) {
                let mut s = 0.0;
                for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
                    s += (x - y).norm_sqr();
                }
                worst = worst.max(s);
            }
            Ok(math::sqrt(worst))
        } else {
            op_norm(&(&self.to_dense() - &other.to_dense()))
        }
    }
}

/// The pair (tuple, N) defining `T^(N)` on `ℓ²(T_N^d) ⊗ ℂ^dim`.
#[derive(Debug, Clone)]
pub struct DiscretizedSemigroup {
    base: ContractionTuple,
    grid: TorusGrid,
    max_entries: usize,
}

impl DiscretizedSemigroup {
    pub fn new(base: ContractionTuple, n: usize) -> Result<Self> {
        Self::with_cap(base, n, DEFAULT_MAX_ENTRIES)
    }

    /// Rejects resolutions whose dense matrices would exceed `max_entries`.
    pub fn with_cap(base: ContractionTuple, n: usize, max_entries: usize) -> Result<Self> {
        let grid = TorusGrid::new(n, base.d())?;
        let total = grid
            .len()
            .checked_mul(base.dim())
            .ok_or_else(|| input_err!("total dimension overflows"))?;
        crate::linalg::check_size(total, max_entries)?;
        Ok(DiscretizedSemigroup { base, grid, max_entries })
    }

    #[inline]
    pub fn base(&self) -> &ContractionTuple {
        &self.base
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.grid.n()
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.base.d()
    }

    #[inline]
    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn max_entries(&self) -> usize {
        self.max_entries
    }

    /// `N^d · dim`, the side of the dense operator.
    pub fn total_dim(&self) -> usize {
        self.grid.len() * self.base.dim()
    }

    fn check_time(&self, t: &GridTime) -> Result<()> {
        if t.denom() != self.n() {
            return Err(input_err!(
                "grid time {t} has denominator {}, semigroup uses N = {}",
                t.denom(),
                self.n()
            ));
        }
        if t.dim() != self.d() {
            return Err(input_err!("grid time {t} has {} coordinates, expected d = {}", t.dim(), self.d()));
        }
        Ok(())
    }

    /// Powers needed to evaluate at `t`: `κ ≤ ⌊t_i⌋ + 1`.
    pub fn power_table(&self, t: &GridTime) -> PowerTable {
        let max_exp = (0..t.dim()).map(|i| t.floor(i) + 1).max().unwrap_or(1);
        PowerTable::new(&self.base, max_exp)
    }

    /// Structured evaluation of `T^(N)(t)`.
    pub fn eval_blocks(&self, t: &GridTime) -> Result<BlockPermutation> {
        self.check_time(t)?;
        let powers = self.power_table(t);
        Ok(self.eval_blocks_with(t, &powers))
    }

    /// As [`Self::eval_blocks`] with a caller-owned power table, which must
    /// reach `⌊t_i⌋ + 1` on every axis.
    pub fn eval_blocks_with(&self, t: &GridTime, powers: &PowerTable) -> BlockPermutation {
        let n = self.n();
        let d = self.d();
        let len = self.grid.len();
        let mut targets = Vec::with_capacity(len);
        let mut blocks = Vec::with_capacity(len);
        let mut exps = alloc::vec![0usize; d];
        for src in 0..len {
            for (axis, e) in exps.iter_mut().enumerate() {
                *e = kappa(n, t.nums()[axis], self.grid.coord(src, axis));
            }
            targets.push(self.grid.translate(src, t.nums()));
            blocks.push(powers.product(&exps));
        }
        BlockPermutation { dim: self.base.dim(), targets, blocks }
    }

    /// The dense `N^d·dim` square matrix of `T^(N)(t)`.
    pub fn eval(&self, t: &GridTime) -> Result<CMatrix> {
        Ok(self.eval_blocks(t)?.to_dense())
    }

    /// `v_N^* T^(N)(t) v_N` with `v_N ξ = N^{-d/2} 𝟏 ⊗ ξ`: the mean of the
    /// source blocks, since each source lands on exactly one target.
    pub fn compress(&self, t: &GridTime) -> Result<CMatrix> {
        let op = self.eval_blocks(t)?;
        Ok(compress_blocks(&op))
    }
}

pub(crate) fn compress_blocks(op: &BlockPermutation) -> CMatrix {
    let dim = op.dim();
    let mut acc = CMatrix::zeros(dim, dim);
    for b in op.blocks() {
        acc = &acc + b;
    }
    acc.scale_real(1.0 / op.grid_len() as f64)
}

/// `∏_i ((1−{t_i}) S_i^{⌊t_i⌋} + {t_i} S_i^{⌊t_i⌋+1})`, factors in axis
/// order. Accepts arbitrary nonnegative reals.
pub fn multilinear_compress(tuple: &ContractionTuple, t: &[f64]) -> Result<CMatrix> {
    if t.len() != tuple.d() {
        return Err(input_err!("time has {} coordinates, expected d = {}", t.len(), tuple.d()));
    }
    if let Some(x) = t.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(input_err!("times must be finite and nonnegative, got {x}"));
    }
    let mut acc = CMatrix::identity(tuple.dim());
    for (s, &ti) in tuple.mats().iter().zip(t) {
        let (whole, frac) = math::floor_frac(ti);
        let low = s.pow(whole);
        let factor = if frac == 0.0 {
            low
        } else {
            let high = &low * s;
            &low.scale_real(1.0 - frac) + &high.scale_real(frac)
        };
        acc = &acc * &factor;
    }
    Ok(acc)
}

/// Checks that a block permutation's blocks have no nonzero imaginary part
/// and no negative real part.
pub fn blocks_entrywise_nonneg(op: &BlockPermutation) -> bool {
    op.blocks()
        .iter()
        .all(|b| b.as_slice().iter().all(|z| z.im == 0.0 && z.re >= 0.0))
}
