//! Power dilations: Parrott tuples, block unitary dilations of a single
//! contraction, and the finite check `∏ S_i^{n_i} = r^* (∏ V_i^{n_i}) r`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{input_err, Error, Result};
use crate::interp::ContractionTuple;
use crate::linalg::{hermitian_eigen, kron, op_norm, CMatrix, Tolerance};
use crate::math;

/// Which hypotheses [`parrott_tuple`] enforces on `R_2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParrottMode {
    /// Both `R_1` and `R_2` unitary.
    #[default]
    Strict,
    /// `R_1` unitary, `R_2` only a contraction.
    RelaxedSecond,
}

/// `(R_1 ⊗ E_21, R_2 ⊗ E_21, 𝟙 ⊗ E_21)` on `ℂ^n ⊗ ℂ^2`.
///
/// When `R_1` and `R_2` are unitaries that do not commute, this tuple of
/// commuting contractions has no power dilation. That is a theorem about the
/// construction; nothing here attempts to verify it numerically. What is
/// checked is the algebra: every pairwise product is exactly zero.
#[derive(Debug, Clone)]
pub struct ParrottTuple {
    pub tuple: ContractionTuple,
    /// Set when `R_1` and `R_2` commute to `tol`, in which case the
    /// non-dilatability hypothesis fails.
    pub inputs_commute: bool,
    pub input_commutator: f64,
}

fn unitarity_defect(u: &CMatrix) -> Result<f64> {
    let n = u.rows();
    let id = CMatrix::identity(n);
    let a = op_norm(&(&u.adjoint_mul(u) - &id))?;
    let b = op_norm(&(&(u * &u.adjoint()) - &id))?;
    Ok(a.max(b))
}

pub fn parrott_tuple(r1: &CMatrix, r2: &CMatrix, mode: ParrottMode, tol: Tolerance) -> Result<ParrottTuple> {
    if !r1.is_square() || !r2.is_square() || r1.rows() != r2.rows() {
        return Err(input_err!(
            "R1 and R2 must be square of equal size, got {}x{} and {}x{}",
            r1.rows(),
            r1.cols(),
            r2.rows(),
            r2.cols()
        ));
    }
    let d1 = unitarity_defect(r1)?;
    if d1 > tol.eps() {
        return Err(input_err!("R1 is not unitary: defect {d1:e}"));
    }
    match mode {
        ParrottMode::Strict => {
            let d2 = unitarity_defect(r2)?;
            if d2 > tol.eps() {
                return Err(input_err!("R2 is not unitary: defect {d2:e}"));
            }
        }
        ParrottMode::RelaxedSecond => {
            let norm = op_norm(r2)?;
            if norm > 1.0 + tol.eps() {
                return Err(input_err!("R2 is not a contraction: norm {norm}"));
            }
        }
    }
    let input_commutator = op_norm(&(&(r1 * r2) - &(r2 * r1)))?;
    let e21 = CMatrix::unit(2, 1, 0);
    let n = r1.rows();
    let mats = vec![kron(r1, &e21)?, kron(r2, &e21)?, kron(&CMatrix::identity(n), &e21)?];
    let tuple = ContractionTuple::new(mats, tol)?;
    Ok(ParrottTuple { tuple, inputs_commute: input_commutator <= tol.eps(), input_commutator })
}

/// Commuting unitaries `V_i` on `ℂ^{dim'}` with an embedding `r: ℂ^dim →
/// ℂ^{dim'}`. Fields are public so that foreign or deliberately broken
/// candidates can be measured; [`DilationCandidate::validate`] checks the
/// defining hypotheses.
#[derive(Debug, Clone, PartialEq)]
pub struct DilationCandidate {
    pub unitaries: Vec<CMatrix>,
    pub embedding: CMatrix,
    pub n_max: usize,
}

impl DilationCandidate {
    /// Builds a candidate and checks it with [`Self::validate`].
    pub fn new(unitaries: Vec<CMatrix>, embedding: CMatrix, n_max: usize, tol: Tolerance) -> Result<Self> {
        let cand = DilationCandidate { unitaries, embedding, n_max };
        cand.validate(tol)?;
        Ok(cand)
    }

    /// Unitarity of each `V_i`, pairwise commutation, and `r^*r = I`.
    pub fn validate(&self, tol: Tolerance) -> Result<()> {
        let big = self.embedding.rows();
        if self.unitaries.is_empty() {
            return Err(input_err!("a dilation needs at least one unitary"));
        }
        if self.n_max == 0 {
            return Err(input_err!("n_max must be positive"));
        }
        for (i, v) in self.unitaries.iter().enumerate() {
            if !v.is_square() || v.rows() != big {
                return Err(input_err!("V_{i} is {}x{}, expected {big}x{big}", v.rows(), v.cols()));
            }
            let dev = unitarity_defect(v)?;
            if dev > tol.eps() {
                return Err(input_err!("V_{i} is not unitary: defect {dev:e}"));
            }
        }
        for i in 0..self.unitaries.len() {
            for j in i + 1..self.unitaries.len() {
                let (a, b) = (&self.unitaries[i], &self.unitaries[j]);
                let dev = op_norm(&(&(a * b) - &(b * a)))?;
                if dev > tol.eps() {
                    return Err(input_err!("V_{i} and V_{j} do not commute: {dev:e}"));
                }
            }
        }
        let rr = self.embedding.adjoint_mul(&self.embedding);
        let dev = op_norm(&(&rr - &CMatrix::identity(self.embedding.cols())))?;
        if dev > tol.eps() {
            return Err(input_err!("embedding is not an isometry: ‖r*r − I‖ = {dev:e}"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DilationReport {
    pub max_deviation: f64,
    /// Multi-index attaining `max_deviation`.
    pub worst_index: Vec<usize>,
    pub indices_checked: usize,
    pub tol: f64,
    pub pass: bool,
}

fn power_lists(mats: &[CMatrix], n_max: usize) -> Vec<Vec<CMatrix>> {
    mats.iter()
        .map(|m| {
            let mut row = vec![CMatrix::identity(m.rows())];
            for k in 1..=n_max {
                let next = &row[k - 1] * m;
                row.push(next);
            }
            row
        })
        .collect()
}

fn product(powers: &[Vec<CMatrix>], idx: &[usize], dim: usize) -> CMatrix {
    let mut acc = CMatrix::identity(dim);
    for (axis, &k) in idx.iter().enumerate() {
        if k > 0 {
            acc = &acc * &powers[axis][k];
        }
    }
    acc
}

/// Largest `‖∏S_i^{n_i} − r^*(∏V_i^{n_i})r‖` over `n ∈ {0..n_max}^d`.
pub fn power_dilation_verify(s: &ContractionTuple, cand: &DilationCandidate, tol: Tolerance) -> Result<DilationReport> {
    let d = s.d();
    let dim = s.dim();
    let r = &cand.embedding;
    if cand.unitaries.len() != d {
        return Err(input_err!("candidate has {} unitaries for a {d}-tuple", cand.unitaries.len()));
    }
    if r.cols() != dim {
        return Err(input_err!("embedding has {} columns, tuple acts on dimension {dim}", r.cols()));
    }
    let big = r.rows();
    if cand.unitaries.iter().any(|v| !v.is_square() || v.rows() != big) {
        return Err(input_err!("unitaries must be {big}x{big} to match the embedding"));
    }
    let sp = power_lists(s.mats(), cand.n_max);
    let vp = power_lists(&cand.unitaries, cand.n_max);
    let mut idx = vec![0usize; d];
    let mut report = DilationReport {
        max_deviation: 0.0,
        worst_index: idx.clone(),
        indices_checked: 0,
        tol: tol.eps(),
        pass: false,
    };
    loop {
        let lhs = product(&sp, &idx, dim);
        let rhs = r.adjoint_mul(&(&product(&vp, &idx, big) * r));
        let dev = op_norm(&(&lhs - &rhs))?;
        if dev > report.max_deviation {
            report.max_deviation = dev;
            report.worst_index = idx.clone();
        }
        report.indices_checked += 1;
        // odometer, last axis fastest
        let mut axis = d;
        loop {
            if axis == 0 {
                report.pass = report.max_deviation <= tol.eps();
                return Ok(report);
            }
            axis -= 1;
            idx[axis] += 1;
            if idx[axis] <= cand.n_max {
                break;
            }
            idx[axis] = 0;
        }
    }
}

/// `(I − A)^{1/2}` for `A = X^*X` or `XX^*`, with eigenvalues of `I − A`
/// at rounding level set to zero so that defects of norm-one operators
/// vanish exactly on the top singular directions.
fn defect(a: &CMatrix, tol: Tolerance) -> Result<CMatrix> {
    let n = a.rows();
    let eig = hermitian_eigen(&(&CMatrix::identity(n) - a), Tolerance::new(tol.eps().max(1e-12))?)?;
    let floor = 64.0 * f64::EPSILON * n as f64;
    let v = &eig.vectors;
    let mut out = CMatrix::zeros(n, n);
    for (k, &lambda) in eig.values.iter().enumerate() {
        if lambda < -tol.eps() {
            return Err(input_err!("operator is not a contraction: I − S*S has eigenvalue {lambda:e}"));
        }
        if lambda <= floor {
            continue;
        }
        let root = math::sqrt(lambda);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += v[(i, k)] * v[(j, k)].conj() * root;
            }
        }
    }
    Ok(out)
}

/// Unitary dilation of one contraction valid for powers up to `m`.
///
/// On `(ℂ^dim)^{m+1}`:
///
/// ```text
///     [ S    0  …  0  D_{S*} ]
///     [ D_S  0  …  0  −S*    ]
/// V = [ 0    I         0     ]
///     [        ⋱             ]
///     [ 0       …   I  0     ]
/// ```
///
/// with `r` the inclusion of the first block. The candidate is checked with
/// [`power_dilation_verify`] for `n ≤ m` before it is returned.
pub fn egervary_dilation(s: &CMatrix, m: usize, tol: Tolerance) -> Result<DilationCandidate> {
    if !s.is_square() {
        return Err(input_err!("dilation needs a square matrix, got {}x{}", s.rows(), s.cols()));
    }
    if m == 0 {
        return Err(input_err!("m must be positive"));
    }
    let norm = op_norm(s)?;
    if norm > 1.0 + tol.eps() {
        return Err(input_err!("S is not a contraction: norm {norm}"));
    }
    let n = s.rows();
    let big = n * (m + 1);
    crate::linalg::check_size(big, crate::DEFAULT_MAX_ENTRIES)?;
    let sa = s.adjoint();
    let d_s = defect(&s.adjoint_mul(s), tol)?;
    let d_sa = defect(&(s * &sa), tol)?;

    let mut v = CMatrix::zeros(big, big);
    v.set_block(0, 0, s);
    v.set_block(0, m * n, &d_sa);
    v.set_block(n, 0, &d_s);
    v.set_block(n, m * n, &-&sa);
    for k in 2..=m {
        v.set_block(k * n, (k - 1) * n, &CMatrix::identity(n));
    }
    let mut r = CMatrix::zeros(big, n);
    r.set_block(0, 0, &CMatrix::identity(n));

    let cand = DilationCandidate { unitaries: vec![v], embedding: r, n_max: m };
    let single = ContractionTuple::new(vec![s.clone()], tol)?;
    let check = Tolerance::new(tol.eps().max(1e-10))?;
    let report = power_dilation_verify(&single, &cand, check)?;
    if !report.pass {
        return Err(Error::Construction(alloc::format!(
            "dilation fails its power check: deviation {:e} at n = {:?}",
            report.max_deviation, report.worst_index
        )));
    }
    let dev = unitarity_defect(&cand.unitaries[0])?;
    if dev > check.eps() {
        return Err(Error::Construction(alloc::format!("dilation is not unitary: defect {dev:e}")));
    }
    Ok(cand)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{C64, ZERO};
    use crate::structure::structure_report;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn parrott_products_vanish_exactly() {
        let r1 = CMatrix::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let r2 = CMatrix::from_real(&[&[1.0, 0.0], &[0.0, -1.0]]).unwrap();
        let p = parrott_tuple(&r1, &r2, ParrottMode::Strict, Tolerance::default()).unwrap();
        assert!(!p.inputs_commute);
        let mats = p.tuple.mats();
        assert_eq!(p.tuple.dim(), 4);
        for a in mats {
            assert!((op_norm(a).unwrap() - 1.0).abs() < 1e-15);
            for b in mats {
                assert!((a * b).is_zero());
            }
        }
    }

    #[test]
    fn parrott_flags_commuting_inputs() {
        let id = CMatrix::identity(2);
        let p = parrott_tuple(&id, &id, ParrottMode::Strict, Tolerance::default()).unwrap();
        assert!(p.inputs_commute);
    }

    #[test]
    fn parrott_rejects_non_unitary() {
        let r1 = CMatrix::identity(2);
        let half = CMatrix::diag_real(&[0.5, 1.0]);
        assert!(parrott_tuple(&r1, &half, ParrottMode::Strict, Tolerance::default()).is_err());
        assert!(parrott_tuple(&half, &r1, ParrottMode::RelaxedSecond, Tolerance::default()).is_err());
        let p = parrott_tuple(&r1, &half, ParrottMode::RelaxedSecond, Tolerance::default()).unwrap();
        assert_eq!(p.tuple.d(), 3);
        assert!(parrott_tuple(&r1, &CMatrix::identity(3), ParrottMode::Strict, Tolerance::default()).is_err());
    }

    #[test]
    fn unitary_tuple_dilates_itself() {
        let u = CMatrix::diag(&[c(0.6, 0.8), c(0.0, 1.0)]);
        let w = CMatrix::diag(&[c(-1.0, 0.0), c(0.8, -0.6)]);
        let tuple = ContractionTuple::new(vec![u.clone(), w.clone()], Tolerance::default()).unwrap();
        let cand = DilationCandidate::new(vec![u, w], CMatrix::identity(2), 3, Tolerance::default()).unwrap();
        let report = power_dilation_verify(&tuple, &cand, Tolerance::default()).unwrap();
        assert!(report.pass);
        assert_eq!(report.max_deviation, 0.0);
        assert_eq!(report.indices_checked, 16);
    }

    #[test]
    fn corrupted_embedding_fails() {
        let u = CMatrix::diag(&[c(0.6, 0.8), c(0.0, 1.0)]);
        let tuple = ContractionTuple::new(vec![u.clone()], Tolerance::default()).unwrap();
        let mut r = CMatrix::identity(2);
        r[(1, 1)] = ZERO;
        let cand = DilationCandidate { unitaries: vec![u], embedding: r, n_max: 2 };
        assert!(cand.validate(Tolerance::default()).is_err());
        let report = power_dilation_verify(&tuple, &cand, Tolerance::default()).unwrap();
        assert!(!report.pass);
        assert!(report.max_deviation >= 1.0 - 1e-10);
    }

    #[test]
    fn nilpotent_dilation_passes() {
        let s = CMatrix::from_real(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let cand = egervary_dilation(&s, 4, Tolerance::default()).unwrap();
        assert_eq!(cand.unitaries[0].rows(), 10);
        let tuple = ContractionTuple::new(vec![s], Tolerance::default()).unwrap();
        let report = power_dilation_verify(&tuple, &cand, Tolerance::default()).unwrap();
        assert!(report.pass && report.max_deviation <= 1e-10);
        assert!(structure_report(&cand.unitaries[0], Tolerance::default()).unwrap().is_unitary);
    }

    #[test]
    fn zero_dilates_to_cyclic_shift() {
        let s = CMatrix::zeros(1, 1);
        let cand = egervary_dilation(&s, 3, Tolerance::default()).unwrap();
        let v = &cand.unitaries[0];
        let expect = CMatrix::from_real(&[
            &[0.0, 0.0, 0.0, 1.0],
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
        ])
        .unwrap();
        assert_eq!(v, &expect);
        for n in 1..=3 {
            assert_eq!(v.pow(n)[(0, 0)], ZERO);
        }
    }

    #[test]
    fn unitary_input_has_vanishing_defects() {
        let u = CMatrix::from_rows(&[vec![c(0.0, 1.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(0.6, 0.8)]]).unwrap();
        for m in 1..5 {
            let cand = egervary_dilation(&u, m, Tolerance::default()).unwrap();
            let v = &cand.unitaries[0];
            assert!(v.block(0, m * 2, 2, 2).is_zero());
            assert!(v.block(2, 0, 2, 2).is_zero());
        }
    }

    #[test]
    fn non_contraction_is_rejected() {
        let s = CMatrix::diag_real(&[1.1]);
        assert!(matches!(egervary_dilation(&s, 2, Tolerance::default()), Err(Error::Input(_))));
    }

    fn contraction(n: usize) -> impl Strategy<Value = CMatrix> {
        (prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n), 0.2f64..=1.0).prop_map(move |(v, target)| {
            let m = CMatrix::new(n, n, v.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap();
            let norm = op_norm(&m).unwrap();
            if norm == 0.0 {
                m
            } else {
                m.scale_real(target / norm)
            }
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn random_contractions_dilate(s in (1usize..=4).prop_flat_map(contraction), m in 1usize..=6) {
            let cand = egervary_dilation(&s, m, Tolerance::default()).unwrap();
            let rep = structure_report(&cand.unitaries[0], Tolerance::default()).unwrap();
            prop_assert!(rep.is_unitary, "{:?}", rep.deviations);
        }
    }
}
