//! Dense complex matrix arithmetic.
//!
//! [`CMatrix`] stores entries row-major as binary64 complex pairs. The
//! arithmetic operators panic on shape mismatch (the same contract as slice
//! indexing); the fallible entry points validate and return [`Error`].

mod eigen;
mod expm;

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::error::{input_err, Error, Result};
use crate::math;
use crate::DEFAULT_MAX_ENTRIES;

pub use eigen::{hermitian_eigen, op_norm, psd_sqrt, HermitianEigen};
pub use expm::{matrix_exp, MAX_EXP_NORM};

pub type C64 = num_complex::Complex<f64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

#[inline]
pub fn cabs(z: C64) -> f64 {
    math::hypot(z.re, z.im)
}

/// Comparison threshold shared by the predicates and validators.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Tolerance(f64);

impl Tolerance {
    pub const DEFAULT: Tolerance = Tolerance(1e-10);
    pub const EXACT: Tolerance = Tolerance(0.0);

    pub fn new(eps: f64) -> Result<Self> {
        if eps.is_finite() && eps >= 0.0 {
            Ok(Tolerance(eps))
        } else {
            Err(input_err!("tolerance must be finite and nonnegative, got {eps}"))
        }
    }

    #[inline]
    pub fn eps(self) -> f64 {
        self.0
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::DEFAULT
    }
}

#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    /// Builds a matrix from row-major entries, rejecting bad shapes and
    /// non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(input_err!("matrix dimensions must be positive, got {rows}x{cols}"));
        }
        let len = rows
            .checked_mul(cols)
            .ok_or_else(|| input_err!("matrix dimensions {rows}x{cols} overflow"))?;
        if data.len() != len {
            return Err(input_err!(
                "expected {len} entries for a {rows}x{cols} matrix, got {}",
                data.len()
            ));
        }
        if let Some(pos) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(input_err!(
                "entry ({}, {}) is not finite",
                pos / cols,
                pos % cols
            ));
        }
        Ok(CMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(input_err!("ragged rows"));
        }
        Self::new(r, c, rows.iter().flatten().copied().collect())
    }

    /// Real-valued convenience constructor, mostly for fixtures.
    pub fn from_real(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(input_err!("ragged rows"));
        }
        let data = rows
            .iter()
            .flat_map(|row| row.iter().map(|&x| C64::new(x, 0.0)))
            .collect();
        Self::new(r, c, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        CMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn diag(entries: &[C64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn diag_real(entries: &[f64]) -> Self {
        let v: Vec<C64> = entries.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::diag(&v)
    }

    /// Elementary matrix `E_ij` (0-indexed) of size `n x n`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = ONE;
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn scale(&self, z: C64) -> Self {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| a * z).collect(),
        }
    }

    pub fn scale_real(&self, x: f64) -> Self {
        self.scale(C64::new(x, 0.0))
    }

    /// Matrix product; skips zero entries of `self`, which keeps products of
    /// permutation-structured operators cheap.
    pub fn try_mul(&self, rhs: &CMatrix) -> Result<CMatrix> {
        if self.cols != rhs.rows {
            return Err(input_err!(
                "cannot multiply {}x{} by {}x{}",
                self.rows,
                self.cols,
                rhs.rows,
                rhs.cols
            ));
        }
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        let n = rhs.cols;
        for i in 0..self.rows {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * n..(k + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self^* rhs` without materialising the adjoint.
    pub fn adjoint_mul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.rows, rhs.rows, "adjoint_mul shape mismatch");
        let mut out = CMatrix::zeros(self.cols, rhs.cols);
        let n = rhs.cols;
        for r in 0..self.rows {
            let rhs_row = &rhs.data[r * n..(r + 1) * n];
            for i in 0..self.cols {
                let a = self.data[r * self.cols + i].conj();
                if a == ZERO {
                    continue;
                }
                let out_row = &mut out.data[i * n..(i + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn pow(&self, k: usize) -> CMatrix {
        assert!(self.is_square(), "pow of a non-square matrix");
        let mut result = CMatrix::identity(self.rows);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        math::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|&z| cabs(z)).fold(0.0, f64::max)
    }

    /// Largest absolute row sum; an upper bound for the operator norm
    /// together with [`CMatrix::norm_one`].
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|&z| cabs(z)).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn norm_one(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| cabs(self[(i, j)])).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&z| z == ZERO)
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> CMatrix {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols, "block out of range");
        let mut out = CMatrix::zeros(rows, cols);
        for i in 0..rows {
            out.data[i * cols..(i + 1) * cols]
                .copy_from_slice(&self.data[(r0 + i) * self.cols + c0..(r0 + i) * self.cols + c0 + cols]);
        }
        out
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, block: &CMatrix) {
        assert!(
            r0 + block.rows <= self.rows && c0 + block.cols <= self.cols,
            "block out of range"
        );
        for i in 0..block.rows {
            let dst = (r0 + i) * self.cols + c0;
            self.data[dst..dst + block.cols].copy_from_slice(block.row(i));
        }
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of range");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of range");
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        match self.try_mul(rhs) {
            Ok(m) => m,
            Err(e) => panic!("{e}"),
        }
    }
}

fn zip_with(a: &CMatrix, b: &CMatrix, f: impl Fn(C64, C64) -> C64) -> CMatrix {
    assert!(
        a.rows == b.rows && a.cols == b.cols,
        "shape mismatch: {}x{} vs {}x{}",
        a.rows,
        a.cols,
        b.rows,
        b.cols
    );
    CMatrix {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().zip(&b.data).map(|(&x, &y)| f(x, y)).collect(),
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        zip_with(self, rhs, |x, y| x + y)
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        zip_with(self, rhs, |x, y| x - y)
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.scale_real(-1.0)
    }
}

/// Kronecker product with the default entry cap.
pub fn kron(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    kron_capped(a, b, DEFAULT_MAX_ENTRIES)
}

/// Kronecker product `A ⊗ B`; entry `(i·rows_B + k, j·cols_B + l)` is
/// `A[i,j]·B[k,l]`.
pub fn kron_capped(a: &CMatrix, b: &CMatrix, max_entries: usize) -> Result<CMatrix> {
    let rows = a.rows.checked_mul(b.rows);
    let cols = a.cols.checked_mul(b.cols);
    let (rows, cols) = match (rows, cols) {
        (Some(r), Some(c)) if r.checked_mul(c).is_some_and(|n| n <= max_entries) => (r, c),
        _ => {
            return Err(input_err!(
                "kron of {}x{} and {}x{} exceeds the cap of {max_entries} entries",
                a.rows,
                a.cols,
                b.rows,
                b.cols
            ))
        }
    };
    let mut out = CMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let x = a[(i, j)];
            if x == ZERO {
                continue;
            }
            for k in 0..b.rows {
                let dst = (i * b.rows + k) * cols + j * b.cols;
                for (o, &y) in out.data[dst..dst + b.cols].iter_mut().zip(b.row(k)) {
                    *o = x * y;
                }
            }
        }
    }
    Ok(out)
}

/// Checks that a square matrix of side `n` fits in `max_entries`.
pub fn check_size(n: usize, max_entries: usize) -> Result<()> {
    match n.checked_mul(n) {
        Some(e) if e <= max_entries => Ok(()),
        _ => Err(Error::Input(alloc::format!(
            "a {n}x{n} matrix exceeds the cap of {max_entries} entries; reduce N, d or dim"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn rejects_non_finite_and_bad_shapes() {
        assert!(CMatrix::new(1, 1, vec![c(f64::NAN, 0.0)]).is_err());
        assert!(CMatrix::new(2, 2, vec![ZERO; 3]).is_err());
        assert!(CMatrix::new(0, 2, vec![]).is_err());
        assert!(Tolerance::new(-1.0).is_err());
        assert_eq!(Tolerance::default().eps(), 1e-10);
    }

    #[test]
    fn kron_identity() {
        let i2 = CMatrix::identity(2);
        assert_eq!(kron(&i2, &i2).unwrap(), CMatrix::identity(4));
    }

    #[test]
    fn kron_unit_index_arithmetic() {
        let e21 = CMatrix::unit(2, 1, 0);
        let k = kron(&e21, &e21).unwrap();
        assert_eq!(k, CMatrix::unit(4, 3, 0));
    }

    #[test]
    fn kron_cap_is_enforced() {
        let a = CMatrix::identity(64);
        assert!(kron_capped(&a, &a, 1000).is_err());
        assert!(kron_capped(&a, &CMatrix::identity(2), 1 << 20).is_ok());
    }

    #[test]
    fn pow_matches_repeated_product() {
        let a = CMatrix::from_rows(&[vec![c(0.3, 0.1), c(-0.2, 0.0)], vec![c(0.5, 0.4), c(0.1, -0.7)]]).unwrap();
        let mut expected = CMatrix::identity(2);
        for k in 0..7 {
            let got = a.pow(k);
            assert!((&got - &expected).max_abs() < 1e-14);
            expected = &expected * &a;
        }
    }

    #[test]
    fn adjoint_mul_matches_explicit() {
        let a = CMatrix::from_rows(&[vec![c(1.0, 2.0), c(0.0, -1.0), c(3.0, 0.5)], vec![c(-1.0, 0.0), c(2.0, 2.0), c(0.0, 0.0)]]).unwrap();
        let b = CMatrix::from_rows(&[vec![c(0.5, 0.0), c(1.0, 1.0)], vec![c(0.0, -2.0), c(1.0, 0.0)]]).unwrap();
        let direct = &a.adjoint() * &b;
        assert!((&direct - &a.adjoint_mul(&b)).max_abs() < 1e-15);
    }

    fn small_matrix(n: usize) -> impl Strategy<Value = CMatrix> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n)
            .prop_map(move |v| CMatrix::new(n, n, v.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap())
    }

    // Gaussian-integer entries keep every triple product exact, so the
    // re-indexing claim can be checked with `==`.
    fn int_matrix(n: usize) -> impl Strategy<Value = CMatrix> {
        prop::collection::vec((-4i32..5, -4i32..5), n * n).prop_map(move |v| {
            CMatrix::new(n, n, v.into_iter().map(|(a, b)| c(a as f64, b as f64)).collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn kron_mixed_product(a in small_matrix(2), b in small_matrix(2), cc in small_matrix(2), d in small_matrix(2)) {
            // (A⊗B)(C⊗D) = (AC)⊗(BD), checked by direct multiplication
            let lhs = &kron(&a, &b).unwrap() * &kron(&cc, &d).unwrap();
            let rhs = kron(&(&a * &cc), &(&b * &d)).unwrap();
            prop_assert!((&lhs - &rhs).max_abs() < 1e-10);
        }

        #[test]
        fn kron_is_associative(a in int_matrix(2), b in int_matrix(3), cc in int_matrix(2)) {
            let left = kron(&kron(&a, &b).unwrap(), &cc).unwrap();
            let right = kron(&a, &kron(&b, &cc).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }
    }
}
