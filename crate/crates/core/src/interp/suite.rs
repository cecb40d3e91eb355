//! Exhaustive grid checks of the semigroup laws of `T^(N)`.

use alloc::vec::Vec;

use super::{compress_blocks, multilinear_compress, DiscretizedSemigroup, PowerTable};
use crate::error::Result;
use crate::linalg::op_norm;
use crate::torus::GridTime;

/// Acceptance thresholds for [`PropertyReport::passes`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropertyThresholds {
    pub homomorphism: f64,
    pub commutation: f64,
    pub contractivity_slack: f64,
    pub interpolation: f64,
    pub compression: f64,
}

impl Default for PropertyThresholds {
    fn default() -> Self {
        PropertyThresholds {
            homomorphism: 1e-10,
            commutation: 1e-10,
            contractivity_slack: 1e-10,
            interpolation: 1e-12,
            compression: 1e-12,
        }
    }
}

/// Worst deviations found by [`property_suite`]. Homomorphism and
/// commutation deviations are blockwise Frobenius upper bounds on the
/// operator-norm deviation; the others are operator norms.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyReport {
    pub max_num: usize,
    pub times_checked: usize,
    pub pairs_checked: usize,
    /// `max ‖T(s)T(t) − T(s+t)‖`
    pub homomorphism: f64,
    /// `max ‖T(s e_i)T(t e_j) − T(t e_j)T(s e_i)‖`
    pub commutation: f64,
    /// `max ‖T(t)‖`
    pub max_norm: f64,
    /// `max ‖T(n e_i) − 𝟙 ⊗ S_i^n‖`, `n ≤ 2N`
    pub interpolation: f64,
    /// `max ‖v_N^* T(t) v_N − multilinear(t)‖`
    pub compression: f64,
}

impl PropertyReport {
    pub fn passes(&self, th: &PropertyThresholds) -> bool {
        self.homomorphism <= th.homomorphism
            && self.commutation <= th.commutation
            && self.max_norm <= 1.0 + th.contractivity_slack
            && self.interpolation <= th.interpolation
            && self.compression <= th.compression
    }
}

/// Runs every law over all grid times with numerators `< max_num` on each
/// axis, and the interpolation identity for whole times `n ≤ 2N`.
pub fn property_suite(sg: &DiscretizedSemigroup, max_num: usize) -> Result<PropertyReport> {
    let n = sg.n();
    let d = sg.d();
    let max_num = max_num.max(1);
    // sums of two checked times reach 2(max_num − 1); interpolation reaches 2N
    let top_num = (2 * (max_num - 1)).max(2 * n * n);
    let probe = GridTime::new(n, alloc::vec![top_num; d])?;
    let powers = sg.power_table(&probe);
    let times = GridTime::enumerate(n, d, max_num)?;
    let evals: Vec<_> = times.iter().map(|t| sg.eval_blocks_with(t, &powers)).collect();

    let mut report = PropertyReport {
        max_num,
        times_checked: times.len(),
        pairs_checked: 0,
        homomorphism: 0.0,
        commutation: 0.0,
        max_norm: 0.0,
        interpolation: 0.0,
        compression: 0.0,
    };

    for (t, op) in times.iter().zip(&evals) {
        report.max_norm = report.max_norm.max(op.op_norm()?);
        let ml = multilinear_compress(sg.base(), &t.to_reals())?;
        report.compression = report.compression.max(op_norm(&(&compress_blocks(op) - &ml))?);
    }

    for (s, op_s) in times.iter().zip(&evals) {
        for (t, op_t) in times.iter().zip(&evals) {
            let sum = s.checked_add(t)?;
            let direct = sg.eval_blocks_with(&sum, &powers);
            let product = op_s.compose(op_t);
            report.homomorphism = report.homomorphism.max(product.distance_bound(&direct)?);
            report.pairs_checked += 1;
        }
    }

    report.commutation = commutation_deviation(sg, max_num, &powers)?;
    report.interpolation = interpolation_deviation(sg, &powers)?;
    Ok(report)
}

fn commutation_deviation(sg: &DiscretizedSemigroup, max_num: usize, powers: &PowerTable) -> Result<f64> {
    let (n, d) = (sg.n(), sg.d());
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in i + 1..d {
            for a in 0..max_num {
                let op_a = sg.eval_blocks_with(&GridTime::along_axis(n, d, i, a)?, powers);
                for b in 0..max_num {
                    let op_b = sg.eval_blocks_with(&GridTime::along_axis(n, d, j, b)?, powers);
                    let ab = op_a.compose(&op_b);
                    let ba = op_b.compose(&op_a);
                    worst = worst.max(ab.distance_bound(&ba)?);
                }
            }
        }
    }
    Ok(worst)
}

fn interpolation_deviation(sg: &DiscretizedSemigroup, powers: &PowerTable) -> Result<f64> {
    let (n, d) = (sg.n(), sg.d());
    let mut worst = 0.0f64;
    for axis in 0..d {
        for whole in 0..=2 * n {
            let t = GridTime::along_axis(n, d, axis, whole * n)?;
            let op = sg.eval_blocks_with(&t, powers);
            let target = powers.power(axis, whole);
            // 𝟙 ⊗ S^n: identity permutation with the same block everywhere
            for (src, (&dst, block)) in op.targets().iter().zip(op.blocks()).enumerate() {
                if dst != src {
                    return Ok(f64::INFINITY);
                }
                worst = worst.max(op_norm(&(block - target))?);
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::ContractionTuple;
    use crate::linalg::{CMatrix, Tolerance, C64};
    use alloc::vec;

    #[test]
    fn suite_passes_on_commuting_pair() {
        let a = CMatrix::from_rows(&[
            vec![C64::new(0.5, 0.1), C64::new(0.2, -0.1)],
            vec![C64::new(0.0, 0.0), C64::new(-0.4, 0.3)],
        ])
        .unwrap();
        let b = &(&a * &a) + &a.scale_real(0.3);
        let nb = crate::linalg::op_norm(&b).unwrap();
        let b = b.scale_real(1.0 / nb);
        let tuple = ContractionTuple::new(vec![a, b], Tolerance::default()).unwrap();
        let sg = DiscretizedSemigroup::new(tuple, 3).unwrap();
        let report = property_suite(&sg, 6).unwrap();
        assert_eq!(report.times_checked, 36);
        assert_eq!(report.pairs_checked, 36 * 36);
        assert!(report.passes(&PropertyThresholds::default()), "{report:?}");
    }

    #[test]
    fn suite_flags_non_contractive_blocks() {
        // validation is bypassed by a loose tolerance; the suite still reports the norm
        let s = CMatrix::diag_real(&[1.2, 0.5]);
        let tuple = ContractionTuple::new(vec![s], Tolerance::new(0.5).unwrap()).unwrap();
        let sg = DiscretizedSemigroup::new(tuple, 2).unwrap();
        let report = property_suite(&sg, 4).unwrap();
        assert!(report.max_norm > 1.0);
        assert!(!report.passes(&PropertyThresholds::default()));
    }
}
