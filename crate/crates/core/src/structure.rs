//! Operator class predicates on the canonical basis and the check that the
//! discretised semigroup inherits each class from its base tuple.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{input_err, Result};
use crate::interp::{blocks_entrywise_nonneg, ContractionTuple, DiscretizedSemigroup};
use crate::linalg::{op_norm, CMatrix, Tolerance, C64, ONE};
use crate::math;
use crate::torus::GridTime;

/// Class flags of one matrix with the deviations they were decided on.
///
/// Deviation keys: `contraction` (`max(‖A‖ − 1, 0)`), `isometry`
/// (`‖A^*A − I‖`), `unitary` (adds `‖AA^* − I‖`), `hermitian`
/// (`‖A − A^*‖`), `projection` (`max(‖A² − A‖, hermitian)`),
/// `entrywise_nonneg`, `unity` (`‖A𝟏 − 𝟏‖`), `adjoint_unity`
/// (`‖A^*𝟏 − 𝟏‖`).
#[derive(Debug, Clone, PartialEq)]
pub struct StructureReport {
    pub is_contraction: bool,
    pub is_isometry: bool,
    pub is_unitary: bool,
    pub is_projection: bool,
    pub is_entrywise_nonneg: bool,
    pub preserves_unity: bool,
    pub adjoint_preserves_unity: bool,
    pub deviations: BTreeMap<&'static str, f64>,
}

impl StructureReport {
    pub fn is_bimarkov(&self) -> bool {
        self.is_entrywise_nonneg && self.preserves_unity && self.adjoint_preserves_unity
    }

    pub fn has(&self, class: OperatorClass) -> bool {
        match class {
            OperatorClass::Contraction => self.is_contraction,
            OperatorClass::Isometry => self.is_isometry,
            OperatorClass::Unitary => self.is_unitary,
            OperatorClass::EntrywiseNonneg => self.is_entrywise_nonneg,
            OperatorClass::UnityPreserving => self.preserves_unity,
            OperatorClass::AdjointUnityPreserving => self.adjoint_preserves_unity,
            OperatorClass::BiMarkov => self.is_bimarkov(),
        }
    }
}

fn vec_dist_to_ones(v: &[C64]) -> f64 {
    math::sqrt(v.iter().map(|z| (z - ONE).norm_sqr()).sum())
}

fn nonneg_deviation(a: &CMatrix) -> f64 {
    a.as_slice()
        .iter()
        .map(|z| (-z.re).max(math::abs(z.im)))
        .fold(0.0, f64::max)
}

pub fn structure_report(a: &CMatrix, tol: Tolerance) -> Result<StructureReport> {
    if !a.is_square() {
        return Err(input_err!("structure checks need a square matrix, got {}x{}", a.rows(), a.cols()));
    }
    let n = a.rows();
    let eps = tol.eps();
    let id = CMatrix::identity(n);
    let ad = a.adjoint();
    let ones = vec![ONE; n];

    let contraction = (op_norm(a)? - 1.0).max(0.0);
    let isometry = op_norm(&(&a.adjoint_mul(a) - &id))?;
    let co_isometry = op_norm(&(&(a * &ad) - &id))?;
    let unitary = isometry.max(co_isometry);
    let hermitian = op_norm(&(a - &ad))?;
    let projection = op_norm(&(&(a * a) - a))?.max(hermitian);
    let nonneg = nonneg_deviation(a);
    let unity = vec_dist_to_ones(&a.apply(&ones));
    let adjoint_unity = vec_dist_to_ones(&ad.apply(&ones));

    let is_unitary = unitary <= eps;
    let is_isometry = is_unitary || isometry <= eps;
    let is_contraction = is_isometry || contraction <= eps;
    let deviations = BTreeMap::from([
        ("contraction", contraction),
        ("isometry", isometry),
        ("unitary", unitary),
        ("hermitian", hermitian),
        ("projection", projection),
        ("entrywise_nonneg", nonneg),
        ("unity", unity),
        ("adjoint_unity", adjoint_unity),
    ]);
    Ok(StructureReport {
        is_contraction,
        is_isometry,
        is_unitary,
        is_projection: projection <= eps,
        is_entrywise_nonneg: nonneg <= eps,
        preserves_unity: unity <= eps,
        adjoint_preserves_unity: adjoint_unity <= eps,
        deviations,
    })
}

/// Entrywise nonnegative with `A𝟏 = 𝟏` and `A^*𝟏 = 𝟏`, all to `tol`.
/// Non-square input is not bi-Markov.
pub fn bimarkov_check(a: &CMatrix, tol: Tolerance) -> bool {
    if !a.is_square() {
        return false;
    }
    let eps = tol.eps();
    let ones = vec![ONE; a.rows()];
    nonneg_deviation(a) <= eps
        && vec_dist_to_ones(&a.apply(&ones)) <= eps
        && vec_dist_to_ones(&a.adjoint().apply(&ones)) <= eps
}

/// Alternately rescales rows and columns of an entrywise positive real
/// matrix until both sums are 1 to `tol`.
pub fn sinkhorn_balance(a: &CMatrix, tol: Tolerance, max_iter: usize) -> Result<CMatrix> {
    if !a.is_square() {
        return Err(input_err!("Sinkhorn balancing needs a square matrix"));
    }
    if a.as_slice().iter().any(|z| z.im != 0.0 || !(z.re > 0.0) || !z.re.is_finite()) {
        return Err(input_err!("Sinkhorn balancing needs finite positive real entries"));
    }
    let n = a.rows();
    let mut m = a.clone();
    for _ in 0..max_iter {
        for i in 0..n {
            let s: f64 = (0..n).map(|j| m[(i, j)].re).sum();
            for j in 0..n {
                m[(i, j)] = C64::new(m[(i, j)].re / s, 0.0);
            }
        }
        let mut worst = 0.0f64;
        for j in 0..n {
            let s: f64 = (0..n).map(|i| m[(i, j)].re).sum();
            worst = worst.max(math::abs(s - 1.0));
            for i in 0..n {
                m[(i, j)] = C64::new(m[(i, j)].re / s, 0.0);
            }
        }
        if worst <= tol.eps() {
            return Ok(m);
        }
    }
    Err(crate::Error::Numerical(alloc::format!(
        "Sinkhorn balancing did not converge in {max_iter} iterations"
    )))
}

/// Classes whose inheritance from `S_i` to `T^(N)(t)` is checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum OperatorClass {
    Contraction,
    Isometry,
    Unitary,
    EntrywiseNonneg,
    UnityPreserving,
    AdjointUnityPreserving,
    BiMarkov,
}

impl OperatorClass {
    pub const ALL: [OperatorClass; 7] = [
        OperatorClass::Contraction,
        OperatorClass::Isometry,
        OperatorClass::Unitary,
        OperatorClass::EntrywiseNonneg,
        OperatorClass::UnityPreserving,
        OperatorClass::AdjointUnityPreserving,
        OperatorClass::BiMarkov,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OperatorClass::Contraction => "contraction",
            OperatorClass::Isometry => "isometry",
            OperatorClass::Unitary => "unitary",
            OperatorClass::EntrywiseNonneg => "entrywise_nonneg",
            OperatorClass::UnityPreserving => "unity",
            OperatorClass::AdjointUnityPreserving => "adjoint_unity",
            OperatorClass::BiMarkov => "bimarkov",
        }
    }

    /// The deviation entry deciding the class.
    fn deviation(self, r: &StructureReport) -> f64 {
        let get = |k: &str| r.deviations.get(k).copied().unwrap_or(0.0);
        match self {
            OperatorClass::BiMarkov => get("entrywise_nonneg").max(get("unity")).max(get("adjoint_unity")),
            c => get(c.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassOutcome {
    pub class: OperatorClass,
    /// Every `S_i` is in the class.
    pub base_in_class: bool,
    /// Every checked `T^(N)(t)` is in the class. Only meaningful when
    /// `base_in_class`.
    pub preserved: bool,
    pub worst_deviation: f64,
    /// Class membership of `T^(N)(e_i)` matches that of `S_i` on every axis.
    pub converse_consistent: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreservationReport {
    pub n: usize,
    pub times_checked: usize,
    pub classes: Vec<ClassOutcome>,
    /// With an entrywise nonnegative base, every block of every `T^(N)(t)`
    /// is nonnegative with no tolerance at all.
    pub exact_nonneg: Option<bool>,
}

impl PreservationReport {
    pub fn passes(&self) -> bool {
        self.classes.iter().all(|c| (!c.base_in_class || c.preserved) && c.converse_consistent)
            && self.exact_nonneg != Some(false)
    }

    pub fn outcome(&self, class: OperatorClass) -> Option<&ClassOutcome> {
        self.classes.iter().find(|c| c.class == class)
    }
}

/// Checks at every time in `times` that `T^(N)(t)` lies in each class that
/// all the `S_i` share, and that `T^(N)(e_i) = 𝟙 ⊗ S_i` reproduces the
/// class membership of `S_i`.
pub fn preservation_suite(
    tuple: &ContractionTuple,
    n: usize,
    times: &[GridTime],
    tol: Tolerance,
) -> Result<PreservationReport> {
    let sg = DiscretizedSemigroup::new(tuple.clone(), n)?;
    let base: Vec<StructureReport> = tuple.mats().iter().map(|s| structure_report(s, tol)).collect::<Result<_>>()?;
    let mut evals = Vec::with_capacity(times.len());
    for t in times {
        let blocks = sg.eval_blocks(t)?;
        let report = structure_report(&blocks.to_dense(), tol)?;
        evals.push((blocks, report));
    }
    let mut unit_steps = Vec::with_capacity(tuple.d());
    for axis in 0..tuple.d() {
        let t = GridTime::along_axis(n, tuple.d(), axis, n)?;
        unit_steps.push(structure_report(&sg.eval(&t)?, tol)?);
    }

    let classes = OperatorClass::ALL
        .iter()
        .map(|&class| {
            let base_in_class = base.iter().all(|r| r.has(class));
            let preserved = evals.iter().all(|(_, r)| r.has(class));
            let worst_deviation = evals.iter().map(|(_, r)| class.deviation(r)).fold(0.0, f64::max);
            let converse_consistent = base.iter().zip(&unit_steps).all(|(b, u)| b.has(class) == u.has(class));
            ClassOutcome { class, base_in_class, preserved, worst_deviation, converse_consistent }
        })
        .collect();

    let exact_nonneg = tuple
        .mats()
        .iter()
        .all(|s| s.as_slice().iter().all(|z| z.im == 0.0 && z.re >= 0.0))
        .then(|| evals.iter().all(|(b, _)| blocks_entrywise_nonneg(b)));

    Ok(PreservationReport { n, times_checked: times.len(), classes, exact_nonneg })
}
