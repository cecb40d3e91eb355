//! Hermitian eigendecomposition by cyclic complex Jacobi rotations, and the
//! operator norm and PSD square root built on it.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{cabs, CMatrix, Tolerance, C64, ZERO};
use crate::error::{input_err, Error, Result};
use crate::math;

const MAX_SWEEPS: usize = 80;

/// Eigenvalues in ascending order with matching unit eigenvectors stored as
/// the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

fn hermitian_defect(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max(cabs(a[(i, j)] - a[(j, i)].conj()));
        }
    }
    worst
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    math::sqrt(s)
}

/// Runs Jacobi sweeps in place. On return `a` is diagonal up to rounding and,
/// when requested, `vecs` holds the accumulated unitary.
fn jacobi_in_place(a: &mut CMatrix, mut vecs: Option<&mut CMatrix>) -> Result<()> {
    let n = a.rows();
    let frob = a.frobenius_norm();
    if frob == 0.0 || n == 1 {
        return Ok(());
    }
    let mut last_off = f64::INFINITY;
    for sweep in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(a);
        if off <= f64::EPSILON * 1e-2 * frob || (off >= last_off && off <= 1e-14 * frob) {
            return Ok(());
        }
        last_off = off;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let g = a[(p, q)];
                let abs_g = cabs(g);
                if abs_g == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Once the sweep count is past the quadratic phase, entries
                // below the diagonal resolution are dropped outright.
                if sweep > 3
                    && abs_g <= f64::EPSILON * 1e-2 * math::abs(app)
                    && abs_g <= f64::EPSILON * 1e-2 * math::abs(aqq)
                {
                    a[(p, q)] = ZERO;
                    a[(q, p)] = ZERO;
                    continue;
                }
                let phase = g / abs_g;
                let d = phase.conj();
                let theta = (aqq - app) / (2.0 * abs_g);
                let t = {
                    let t = 1.0 / (math::abs(theta) + math::sqrt(theta * theta + 1.0));
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / math::sqrt(t * t + 1.0);
                let s = t * c;
                let wpp = C64::new(c, 0.0);
                let wpq = C64::new(s, 0.0);
                let wqp = d * (-s);
                let wqq = d * c;

                // A <- A W
                for r in 0..n {
                    let x = a[(r, p)];
                    let y = a[(r, q)];
                    a[(r, p)] = x * wpp + y * wqp;
                    a[(r, q)] = x * wpq + y * wqq;
                }
                // A <- W^* A
                for col in 0..n {
                    let x = a[(p, col)];
                    let y = a[(q, col)];
                    a[(p, col)] = wpp.conj() * x + wqp.conj() * y;
                    a[(q, col)] = wpq.conj() * x + wqq.conj() * y;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;

                if let Some(v) = vecs.as_deref_mut() {
                    for r in 0..n {
                        let x = v[(r, p)];
                        let y = v[(r, q)];
                        v[(r, p)] = x * wpp + y * wqp;
                        v[(r, q)] = x * wpq + y * wqq;
                    }
                }
            }
        }
    }
    let off = off_diagonal_norm(a);
    if off <= 1e-13 * frob {
        return Ok(());
    }
    Err(Error::Numerical(format!(
        "Jacobi iteration did not converge after {MAX_SWEEPS} sweeps on a {n}x{n} matrix \
         (off-diagonal norm {off:e}, Frobenius norm {frob:e})"
    )))
}

/// Eigendecomposition of a Hermitian matrix. The input is symmetrised first;
/// it must be Hermitian to `tol` entrywise.
pub fn hermitian_eigen(a: &CMatrix, tol: Tolerance) -> Result<HermitianEigen> {
    if !a.is_square() {
        return Err(input_err!("eigendecomposition needs a square matrix, got {}x{}", a.rows(), a.cols()));
    }
    let defect = hermitian_defect(a);
    if defect > tol.eps() {
        return Err(input_err!("matrix is not Hermitian: max |a_ij - conj(a_ji)| = {defect:e}"));
    }
    let n = a.rows();
    let mut work = symmetrise(a);
    let mut vecs = CMatrix::identity(n);
    jacobi_in_place(&mut work, Some(&mut vecs))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| work[(i, i)].re.total_cmp(&work[(j, j)].re));
    let values = order.iter().map(|&i| work[(i, i)].re).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for r in 0..n {
            vectors[(r, dst)] = vecs[(r, src)];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

fn symmetrise(a: &CMatrix) -> CMatrix {
    let n = a.rows();
    let mut out = a.clone();
    for i in 0..n {
        out[(i, i)] = C64::new(a[(i, i)].re, 0.0);
        for j in i + 1..n {
            let z = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            out[(i, j)] = z;
            out[(j, i)] = z.conj();
        }
    }
    out
}

/// Groups the indices of a Hermitian matrix into the connected components of
/// its nonzero pattern. The matrix is block diagonal under the induced
/// permutation, so its spectrum is the union of the component spectra.
fn pattern_components(g: &CMatrix) -> Vec<Vec<usize>> {
    let n = g.rows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for j in i + 1..n {
            if g[(i, j)] != ZERO || g[(j, i)] != ZERO {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let r = find(&mut parent, i);
        groups[r].push(i);
    }
    groups.retain(|g| !g.is_empty());
    groups
}

/// Largest singular value: square root of the top eigenvalue of `A^*A`.
///
/// `A^*A` is split into the connected components of its sparsity pattern
/// before the eigen solve, which makes block-permutation operators (the
/// discretised semigroup, Koopman shifts) cost only their block size.
pub fn op_norm(a: &CMatrix) -> Result<f64> {
    let gram = if a.rows() >= a.cols() {
        a.adjoint_mul(a)
    } else {
        let ad = a.adjoint();
        ad.adjoint_mul(&ad)
    };
    let mut top = 0.0f64;
    for comp in pattern_components(&gram) {
        let lambda = if comp.len() == 1 {
            gram[(comp[0], comp[0])].re
        } else {
            let k = comp.len();
            let mut sub = CMatrix::zeros(k, k);
            for (i, &gi) in comp.iter().enumerate() {
                for (j, &gj) in comp.iter().enumerate() {
                    sub[(i, j)] = gram[(gi, gj)];
                }
            }
            let mut work = symmetrise(&sub);
            jacobi_in_place(&mut work, None)?;
            (0..k).map(|i| work[(i, i)].re).fold(f64::NEG_INFINITY, f64::max)
        };
        top = top.max(lambda);
    }
    Ok(math::sqrt(top.max(0.0)))
}

/// Hermitian PSD square root. Eigenvalues in `[-eps, 0)` are clamped to 0.
pub fn psd_sqrt(a: &CMatrix, tol: Tolerance) -> Result<CMatrix> {
    let eig = hermitian_eigen(a, tol)?;
    let n = a.rows();
    let mut roots = Vec::with_capacity(n);
    for &lambda in &eig.values {
        if lambda < -tol.eps() {
            return Err(input_err!("matrix is not positive semidefinite: eigenvalue {lambda:e}"));
        }
        roots.push(math::sqrt(lambda.max(0.0)));
    }
    let v = &eig.vectors;
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = ZERO;
            for (k, &r) in roots.iter().enumerate() {
                if r != 0.0 {
                    acc += v[(i, k)] * v[(j, k)].conj() * r;
                }
            }
            out[(i, j)] = acc;
        }
    }
    Ok(symmetrise(&out))
}
