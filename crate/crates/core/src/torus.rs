//! Operators on the discretised torus `ℓ²(T_N^d)`.
//!
//! A grid point is a coordinate vector `(m_1, …, m_d)` with `0 ≤ m_i < N`,
//! standing for `(e^{i2πm_1/N}, …)`. Basis vectors are enumerated
//! lexicographically with the first axis slowest, so index
//! `Σ m_i N^{d-1-i}`. Axes are 0-based throughout the Rust API.
//!
//! Every matrix built here has entries in `{0, 1}` and all identities are
//! checked exactly.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{input_err, Error, Result};
use crate::linalg::{check_size, op_norm, CMatrix, C64, ONE};
use crate::DEFAULT_MAX_ENTRIES;

/// A point of `((1/N)ℕ₀)^d`: numerators over one shared denominator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridTime {
    denom: usize,
    nums: Vec<usize>,
}

impl GridTime {
    pub fn new(denom: usize, nums: Vec<usize>) -> Result<Self> {
        if denom == 0 {
            return Err(input_err!("grid denominator must be at least 1"));
        }
        if nums.is_empty() {
            return Err(input_err!("grid time needs at least one coordinate"));
        }
        Ok(GridTime { denom, nums })
    }

    pub fn zero(denom: usize, d: usize) -> Result<Self> {
        Self::new(denom, vec![0; d])
    }

    /// `k/N` along `axis`, zero elsewhere.
    pub fn along_axis(denom: usize, d: usize, axis: usize, k: usize) -> Result<Self> {
        if axis >= d {
            return Err(input_err!("axis {axis} out of range for d = {d}"));
        }
        let mut nums = vec![0; d];
        nums[axis] = k;
        Self::new(denom, nums)
    }

    /// Parses `"k1/N,k2/N,…"`. Every coordinate must carry the same
    /// denominator `N`, which must equal `denom`; a bare integer `n` is
    /// read as the whole time `n = nN/N`.
    pub fn parse_with_denom(s: &str, denom: usize) -> Result<Self> {
        let mut nums = Vec::new();
        for part in s.split(',') {
            let part = part.trim();
            let k = match part.split_once('/') {
                Some((num, den)) => {
                    let den: usize = den
                        .trim()
                        .parse()
                        .map_err(|_| input_err!("bad denominator in grid time '{part}'"))?;
                    if den != denom {
                        return Err(input_err!(
                            "grid time '{part}' has denominator {den}, expected {denom}"
                        ));
                    }
                    num.trim()
                        .parse::<usize>()
                        .map_err(|_| input_err!("bad numerator in grid time '{part}'"))?
                }
                None => {
                    let n: usize = part
                        .parse()
                        .map_err(|_| input_err!("bad grid time coordinate '{part}'"))?;
                    n.checked_mul(denom)
                        .ok_or_else(|| input_err!("grid time '{part}' overflows"))?
                }
            };
            nums.push(k);
        }
        Self::new(denom, nums)
    }

    #[inline]
    pub fn denom(&self) -> usize {
        self.denom
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.nums.len()
    }

    #[inline]
    pub fn nums(&self) -> &[usize] {
        &self.nums
    }

    /// `⌊t_i⌋`
    #[inline]
    pub fn floor(&self, axis: usize) -> usize {
        self.nums[axis] / self.denom
    }

    /// Numerator of `{t_i}` over the shared denominator.
    #[inline]
    pub fn frac_num(&self, axis: usize) -> usize {
        self.nums[axis] % self.denom
    }

    pub fn frac(&self, axis: usize) -> f64 {
        self.frac_num(axis) as f64 / self.denom as f64
    }

    pub fn to_reals(&self) -> Vec<f64> {
        self.nums
            .iter()
            .map(|&k| k as f64 / self.denom as f64)
            .collect()
    }

    /// Indices `i` with `t_i ≠ 0`.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.nums.iter().enumerate().filter(|(_, &k)| k != 0).map(|(i, _)| i)
    }

    pub fn checked_add(&self, other: &GridTime) -> Result<GridTime> {
        if self.denom != other.denom || self.dim() != other.dim() {
            return Err(input_err!(
                "cannot add grid times with shapes ({}, {}) and ({}, {})",
                self.denom,
                self.dim(),
                other.denom,
                other.dim()
            ));
        }
        let nums = self
            .nums
            .iter()
            .zip(&other.nums)
            .map(|(a, b)| a.checked_add(*b).ok_or_else(|| input_err!("grid time overflow")))
            .collect::<Result<Vec<_>>>()?;
        Ok(GridTime { denom: self.denom, nums })
    }

    /// All grid times with numerators in `0..bound` on every axis, first
    /// axis slowest.
    pub fn enumerate(denom: usize, d: usize, bound: usize) -> Result<Vec<GridTime>> {
        let count = bound
            .checked_pow(d as u32)
            .ok_or_else(|| input_err!("{bound}^{d} grid times overflow"))?;
        let mut out = Vec::with_capacity(count);
        let mut nums = vec![0usize; d];
        for _ in 0..count {
            out.push(GridTime::new(denom, nums.clone())?);
            for slot in nums.iter_mut().rev() {
                *slot += 1;
                if *slot < bound {
                    break;
                }
                *slot = 0;
            }
        }
        Ok(out)
    }
}

impl fmt::Display for GridTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, k) in self.nums.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}/{}", k, self.denom)?;
        }
        Ok(())
    }
}

impl FromStr for GridTime {
    type Err = Error;

    /// Parses `"k1/N,…"`, taking `N` from the first coordinate.
    fn from_str(s: &str) -> Result<Self> {
        let first = s.split(',').next().unwrap_or("");
        let denom = first
            .split_once('/')
            .and_then(|(_, d)| d.trim().parse::<usize>().ok())
            .ok_or_else(|| input_err!("grid time '{s}' must be written as k1/N,k2/N,…"))?;
        Self::parse_with_denom(s, denom)
    }
}

/// `κ(t, t′) = ⌊t⌋ + 𝟙[{t} + {t′} ≥ 1]` for `t = k/N`, `t′ = k′/N`, in exact
/// integer arithmetic. The tie `{t} + {t′} = 1` counts as `≥ 1`.
#[inline]
pub fn kappa(denom: usize, k: usize, k_prime: usize) -> usize {
    k / denom + usize::from(k % denom + k_prime % denom >= denom)
}

/// Index arithmetic for the basis `δ_z`, `z ∈ T_N^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TorusGrid {
    n: usize,
    d: usize,
    len: usize,
}

impl TorusGrid {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(input_err!("torus grid needs N >= 1 and d >= 1, got N = {n}, d = {d}"));
        }
        let len = n
            .checked_pow(d as u32)
            .ok_or_else(|| input_err!("N^d = {n}^{d} overflows"))?;
        Ok(TorusGrid { n, d, len })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of grid points, `N^d`.
    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, coords: &[usize]) -> usize {
        debug_assert_eq!(coords.len(), self.d);
        coords.iter().fold(0, |acc, &m| acc * self.n + m % self.n)
    }

    pub fn coords(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.d];
        for slot in out.iter_mut().rev() {
            *slot = idx % self.n;
            idx /= self.n;
        }
        out
    }

    /// Stride of `axis` in the flat index.
    #[inline]
    fn stride(&self, axis: usize) -> usize {
        self.n.pow((self.d - 1 - axis) as u32)
    }

    /// Coordinate of `idx` along `axis`.
    #[inline]
    pub fn coord(&self, idx: usize, axis: usize) -> usize {
        (idx / self.stride(axis)) % self.n
    }

    /// Index of the point reached from `idx` by adding `k` (mod N) on `axis`.
    pub fn shift(&self, idx: usize, axis: usize, k: usize) -> usize {
        let stride = self.stride(axis);
        let m = (idx / stride) % self.n;
        let m2 = (m + k % self.n) % self.n;
        idx - m * stride + m2 * stride
    }

    /// Index of the point `z + t` with `t` given by grid numerators.
    pub fn translate(&self, idx: usize, nums: &[usize]) -> usize {
        nums.iter()
            .enumerate()
            .fold(idx, |acc, (axis, &k)| self.shift(acc, axis, k))
    }

    fn checked(n: usize, d: usize, axis: usize, max_entries: usize) -> Result<Self> {
        let grid = TorusGrid::new(n, d)?;
        if axis >= d {
            return Err(input_err!("axis {axis} out of range for d = {d}"));
        }
        check_size(grid.len, max_entries)?;
        Ok(grid)
    }
}

/// Koopman shift `U_axis(k/N)`: the permutation `δ_m ↦ δ_{m + k e_axis}`.
pub fn koopman_u(n: usize, d: usize, axis: usize, k: usize) -> Result<CMatrix> {
    koopman_u_capped(n, d, axis, k, DEFAULT_MAX_ENTRIES)
}

pub fn koopman_u_capped(n: usize, d: usize, axis: usize, k: usize, max_entries: usize) -> Result<CMatrix> {
    let grid = TorusGrid::checked(n, d, axis, max_entries)?;
    let mut u = CMatrix::zeros(grid.len(), grid.len());
    for src in 0..grid.len() {
        u[(grid.shift(src, axis, k), src)] = ONE;
    }
    Ok(u)
}

/// Indicator projection `P_axis(k/N)`: keeps `δ_m` iff
/// `m_axis < N − (k mod N)`, the grid form of `𝟙_{[0, 1−{t})}`.
pub fn projector_p(n: usize, d: usize, axis: usize, k: usize) -> Result<CMatrix> {
    projector_p_capped(n, d, axis, k, DEFAULT_MAX_ENTRIES)
}

pub fn projector_p_capped(n: usize, d: usize, axis: usize, k: usize, max_entries: usize) -> Result<CMatrix> {
    let grid = TorusGrid::checked(n, d, axis, max_entries)?;
    let cutoff = n - k % n;
    let mut p = CMatrix::zeros(grid.len(), grid.len());
    for idx in 0..grid.len() {
        if grid.coord(idx, axis) < cutoff {
            p[(idx, idx)] = ONE;
        }
    }
    Ok(p)
}

/// The right-hand correction `Q(s, t)` with `P(s)U(t) = U(t)Q(s, t)`.
fn bscr_q(n: usize, s_num: usize, t_num: usize) -> Result<CMatrix> {
    let p_t = projector_p(n, 1, 0, t_num)?;
    let p_st = projector_p(n, 1, 0, s_num + t_num)?;
    Ok(if s_num % n + t_num % n < n {
        &CMatrix::identity(n) - &(&p_t - &p_st)
    } else {
        &p_st - &p_t
    })
}

/// `‖P(s)U(t) − U(t)Q(s,t)‖` on `ℓ²(T_N)` for `s = s_num/N`, `t = t_num/N`.
/// Both sides are 0/1 matrices, so a correct relation gives exactly 0.
pub fn bscr_check(n: usize, s_num: usize, t_num: usize) -> Result<f64> {
    let u = koopman_u(n, 1, 0, t_num)?;
    let lhs = &projector_p(n, 1, 0, s_num)? * &u;
    let rhs = &u * &bscr_q(n, s_num, t_num)?;
    op_norm(&(&lhs - &rhs))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub theta: f64,
    pub value: C64,
}

/// Samples `U(t)^* P(s) U(t) f` on the grid `θ_m = 2πm/N`.
///
/// For `{s} + {t} < 1` the output vanishes on `[2π(1−{s+t}), 2π(1−{t}))`;
/// otherwise it is supported only on `[2π(1−{t}), 2π(1−{s+t}))`.
pub fn bscr_trace(n: usize, s_num: usize, t_num: usize, f: &[C64]) -> Result<Vec<TracePoint>> {
    if f.len() != n {
        return Err(input_err!("signal has length {}, expected N = {n}", f.len()));
    }
    let u = koopman_u(n, 1, 0, t_num)?;
    let p = projector_p(n, 1, 0, s_num)?;
    let op = &(&u.adjoint() * &p) * &u;
    let values = op.apply(f);
    Ok(values
        .into_iter()
        .enumerate()
        .map(|(m, value)| TracePoint {
            theta: 2.0 * core::f64::consts::PI * m as f64 / n as f64,
            value,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ZERO;
    use alloc::string::ToString;

    #[test]
    fn grid_time_floor_and_frac() {
        let t = GridTime::new(4, vec![7, 4, 0]).unwrap();
        assert_eq!((t.floor(0), t.frac_num(0)), (1, 3));
        assert_eq!((t.floor(1), t.frac_num(1)), (1, 0));
        assert_eq!(t.to_reals(), vec![1.75, 1.0, 0.0]);
        assert_eq!(t.support().collect::<Vec<_>>(), vec![0, 1]);
        for k in 0..20 {
            let t = GridTime::new(4, vec![k]).unwrap();
            assert_eq!(t.floor(0) * 4 + t.frac_num(0), k);
        }
    }

    #[test]
    fn grid_time_parse_and_display() {
        let t: GridTime = "3/4,1/4".parse().unwrap();
        assert_eq!(t.nums(), &[3, 1]);
        assert_eq!(t.to_string(), "3/4,1/4");
        let t = GridTime::parse_with_denom("2, 1/3", 3).unwrap();
        assert_eq!(t.nums(), &[6, 1]);
        assert!(GridTime::parse_with_denom("1/2,1/3", 3).is_err());
        assert!("1,2".parse::<GridTime>().is_err());
        assert!(GridTime::parse_with_denom("x/3", 3).is_err());
        assert!(GridTime::new(0, vec![1]).is_err());
    }

    #[test]
    fn kappa_examples() {
        // κ(0, anything) = 0
        for kp in 0..8 {
            assert_eq!(kappa(4, 0, kp), 0);
        }
        // κ(3/2, 3/4) = 2
        assert_eq!(kappa(4, 6, 3), 2);
        // κ(2, t') = 2 for any t'
        assert_eq!(kappa(10, 20, 3), 2);
        // tie {t} + {t'} = 1 takes the upper branch
        assert_eq!(kappa(4, 1, 3), 1);
    }

    #[test]
    fn enumerate_grid_times() {
        let all = GridTime::enumerate(3, 2, 3).unwrap();
        assert_eq!(all.len(), 9);
        assert_eq!(all[0].nums(), &[0, 0]);
        assert_eq!(all[1].nums(), &[0, 1]);
        assert_eq!(all[8].nums(), &[2, 2]);
    }

    #[test]
    fn torus_index_roundtrip() {
        let g = TorusGrid::new(3, 3).unwrap();
        assert_eq!(g.len(), 27);
        for idx in 0..27 {
            assert_eq!(g.index(&g.coords(idx)), idx);
        }
        assert_eq!(g.index(&[1, 0, 0]), 9);
        assert_eq!(g.shift(g.index(&[2, 1, 0]), 0, 2), g.index(&[1, 1, 0]));
        assert_eq!(g.translate(0, &[1, 2, 4]), g.index(&[1, 2, 1]));
    }

    #[test]
    fn koopman_examples() {
        assert_eq!(koopman_u(3, 2, 1, 0).unwrap(), CMatrix::identity(9));
        let swap = CMatrix::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        assert_eq!(koopman_u(2, 1, 0, 1).unwrap(), swap);
        // U(1/N)^N = I exactly
        for (n, d) in [(2, 1), (3, 2), (4, 2)] {
            for axis in 0..d {
                let u = koopman_u(n, d, axis, 1).unwrap();
                assert_eq!(u.pow(n), CMatrix::identity(n.pow(d as u32)));
            }
        }
        // periodicity U(k) = U(k mod N)
        assert_eq!(koopman_u(4, 1, 0, 7).unwrap(), koopman_u(4, 1, 0, 3).unwrap());
        assert!(koopman_u(2, 1, 1, 0).is_err());
        assert!(koopman_u_capped(32, 3, 0, 1, 1 << 20).is_err());
    }

    #[test]
    fn koopman_is_unitary_exactly() {
        let u = koopman_u(4, 2, 0, 3).unwrap();
        assert_eq!(u.adjoint_mul(&u), CMatrix::identity(16));
        assert_eq!(&u * &u.adjoint(), CMatrix::identity(16));
    }

    #[test]
    fn projector_examples() {
        for k in [0, 3, 6] {
            assert_eq!(projector_p(3, 2, 0, k).unwrap(), CMatrix::identity(9));
        }
        assert_eq!(projector_p(2, 1, 0, 1).unwrap(), CMatrix::diag_real(&[1.0, 0.0]));
        for k in 0..8 {
            let p = projector_p(4, 2, 1, k).unwrap();
            assert_eq!(&p * &p, p);
            assert_eq!(p.adjoint(), p);
        }
    }

    #[test]
    fn axis_operators_commute_exactly() {
        let (n, d) = (3, 2);
        for k in 0..2 * n {
            for l in 0..2 * n {
                let ops_i = [koopman_u(n, d, 0, k).unwrap(), projector_p(n, d, 0, k).unwrap()];
                let ops_j = [koopman_u(n, d, 1, l).unwrap(), projector_p(n, d, 1, l).unwrap()];
                for a in &ops_i {
                    for b in &ops_j {
                        assert_eq!(a * b, b * a);
                    }
                }
            }
        }
    }

    #[test]
    fn bscr_integer_times() {
        for n in [2, 3, 5] {
            for a in 0..3 {
                for b in 0..3 {
                    assert_eq!(bscr_check(n, a * n, b * n).unwrap(), 0.0);
                }
            }
        }
    }

    #[test]
    fn bscr_half_half_by_hand() {
        // N = 2, s = t = 1/2: U = swap, P(1/2) = diag(1,0),
        // P(s)U(t) = [[0,1],[0,0]] and the {s}+{t} >= 1 branch gives
        // U(P(1) - P(1/2)) = swap·diag(0,1) = [[0,1],[0,0]].
        let expected = CMatrix::from_real(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let lhs = &projector_p(2, 1, 0, 1).unwrap() * &koopman_u(2, 1, 0, 1).unwrap();
        let rhs = &koopman_u(2, 1, 0, 1).unwrap() * &bscr_q(2, 1, 1).unwrap();
        assert_eq!(lhs, expected);
        assert_eq!(rhs, expected);
        assert_eq!(bscr_check(2, 1, 1).unwrap(), 0.0);
    }

    #[test]
    fn bscr_exhaustive_n4() {
        for s in 0..8 {
            for t in 0..8 {
                assert_eq!(bscr_check(4, s, t).unwrap(), 0.0, "s={s} t={t}");
            }
        }
    }

    #[test]
    fn trace_with_trivial_projection_is_identity() {
        let f: Vec<C64> = (0..6).map(|m| C64::new(m as f64, -(m as f64))).collect();
        let rows = bscr_trace(6, 0, 4, &f).unwrap();
        assert_eq!(rows.iter().map(|r| r.value).collect::<Vec<_>>(), f);
        assert!(bscr_trace(6, 0, 4, &f[..5]).is_err());
    }

    #[test]
    fn trace_window_below_one() {
        // N = 8, s = 2/8, t = 3/8: {s}+{t} = 5/8 < 1, zeros on
        // [2π(1 − 5/8), 2π(1 − 3/8)) i.e. grid points m = 3, 4.
        let ones = vec![ONE; 8];
        let rows = bscr_trace(8, 2, 3, &ones).unwrap();
        for (m, r) in rows.iter().enumerate() {
            let expect = if (3..5).contains(&m) { ZERO } else { ONE };
            assert_eq!(r.value, expect, "m = {m}");
        }
    }

    #[test]
    fn trace_window_above_one() {
        // N = 8, s = 6/8, t = 5/8: {s}+{t} = 11/8 >= 1, {s+t} = 3/8;
        // support is [2π(1 − 5/8), 2π(1 − 3/8)) i.e. m = 3, 4.
        let ones = vec![ONE; 8];
        let rows = bscr_trace(8, 6, 5, &ones).unwrap();
        let u = koopman_u(8, 1, 0, 5).unwrap();
        let q = bscr_q(8, 6, 5).unwrap();
        // Q = U^* P(s) U, read off from the relation itself
        let rhs = q.apply(&ones);
        for (m, r) in rows.iter().enumerate() {
            let expect = if (3..5).contains(&m) { ONE } else { ZERO };
            assert_eq!(r.value, expect, "m = {m}");
            assert_eq!(r.value, rhs[m]);
        }
        assert_eq!(u.rows(), 8);
    }
}
