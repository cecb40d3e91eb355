//! Time-scaled blends of lattice samples and their approximation error.
//!
//! Given samples `T(kε)` of a `d`-parameter semigroup on the lattice
//! `(εℕ₀)^d`, the blend at `t` is
//!
//! ```text
//! Σ_{e ∈ {0,1}^d} ν_e(t) · T(t^(e)),   t^(e)_i = (⌊t_i/ε⌋ + e_i) ε,
//! ν_e(t) = ∏_i (e_i ? {t_i/ε} : 1 − {t_i/ε}).
//! ```

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{input_err, Result};
use crate::linalg::{matrix_exp, op_norm, CMatrix, Tolerance};
use crate::math;

/// Source of lattice samples `T(kε)` keyed by the multi-index `k`.
pub trait LatticeSamples {
    fn sample(&self, k: &[usize]) -> Option<&CMatrix>;
}

impl LatticeSamples for BTreeMap<Vec<usize>, CMatrix> {
    fn sample(&self, k: &[usize]) -> Option<&CMatrix> {
        self.get(k)
    }
}

/// One corner `e` of the blend with its weight `ν_e(t)` and lattice time
/// `t^(e)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlendWeights {
    pub e: Vec<u8>,
    pub weight: f64,
    pub shifted: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Blend {
    pub value: CMatrix,
    pub weights: Vec<BlendWeights>,
}

/// Lattice floor and fractional part of `t/ε` per axis.
fn lattice_coords(eps: f64, t: &[f64]) -> Result<Vec<(usize, f64)>> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(input_err!("lattice spacing must be positive, got {eps}"));
    }
    if t.is_empty() {
        return Err(input_err!("time needs at least one coordinate"));
    }
    t.iter()
        .map(|&ti| {
            if ti.is_finite() && ti >= 0.0 {
                Ok(math::floor_frac(ti / eps))
            } else {
                Err(input_err!("times must be finite and nonnegative, got {ti}"))
            }
        })
        .collect()
}

/// Corners `e ∈ {0,1}^d` in binary order, first axis most significant.
fn corners(d: usize) -> impl Iterator<Item = Vec<u8>> {
    (0..1usize << d).map(move |bits| (0..d).map(|i| ((bits >> (d - 1 - i)) & 1) as u8).collect())
}

/// Blend of lattice samples at `t`. Corners with zero weight are skipped, so
/// only samples that actually contribute must be present.
pub fn scaled_blend<S: LatticeSamples + ?Sized>(samples: &S, eps: f64, t: &[f64]) -> Result<Blend> {
    let coords = lattice_coords(eps, t)?;
    let d = coords.len();
    let mut value: Option<CMatrix> = None;
    let mut weights = Vec::with_capacity(1 << d);
    let mut k = vec![0usize; d];
    for e in corners(d) {
        let mut weight = 1.0;
        for (i, (&(fl, fr), &ei)) in coords.iter().zip(&e).enumerate() {
            weight *= if ei == 1 { fr } else { 1.0 - fr };
            k[i] = fl + ei as usize;
        }
        let shifted = k.iter().map(|&ki| ki as f64 * eps).collect();
        if weight != 0.0 {
            let sample = samples
                .sample(&k)
                .ok_or_else(|| input_err!("missing lattice sample at k = {k:?}"))?;
            let term = sample.scale_real(weight);
            value = Some(match value {
                None => term,
                Some(v) => {
                    if v.rows() != term.rows() || v.cols() != term.cols() {
                        return Err(input_err!("lattice samples have inconsistent shapes"));
                    }
                    &v + &term
                }
            });
        }
        weights.push(BlendWeights { e, weight, shifted });
    }
    // at least one corner has weight >= 2^-d, so value is set
    let value = value.ok_or_else(|| input_err!("blend has no contributing corner"))?;
    Ok(Blend { value, weights })
}

/// Product grid `{0, h, …, steps·h}^d` with `h = tmax/steps`.
pub fn uniform_time_grid(d: usize, tmax: f64, steps: usize) -> Result<Vec<Vec<f64>>> {
    if d == 0 || steps == 0 || !(tmax.is_finite() && tmax >= 0.0) {
        return Err(input_err!("time grid needs d >= 1, steps >= 1 and finite tmax >= 0"));
    }
    let axis: Vec<f64> = (0..=steps).map(|j| tmax * j as f64 / steps as f64).collect();
    let count = (steps + 1).pow(d as u32);
    let mut out = Vec::with_capacity(count);
    let mut idx = vec![0usize; d];
    for _ in 0..count {
        out.push(idx.iter().map(|&j| axis[j]).collect());
        for slot in idx.iter_mut().rev() {
            *slot += 1;
            if *slot <= steps {
                break;
            }
            *slot = 0;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub eps: f64,
    pub sup_error: f64,
}

/// True when errors do not grow as `ε` shrinks, up to `slack`.
pub fn weakly_decreasing(rows: &[SweepRow], slack: f64) -> bool {
    let mut sorted: Vec<SweepRow> = rows.to_vec();
    sorted.sort_by(|a, b| b.eps.total_cmp(&a.eps));
    sorted.windows(2).all(|w| w[1].sup_error <= w[0].sup_error + slack)
}

fn sum_scaled(generators: &[CMatrix], coeffs: &[f64]) -> CMatrix {
    let n = generators[0].rows();
    generators
        .iter()
        .zip(coeffs)
        .fold(CMatrix::zeros(n, n), |acc, (a, &c)| &acc + &a.scale_real(c))
}

/// Sup over `time_grid` of `‖blend_ε(t) − exp(Σ t_i A_i)‖` for each `ε`,
/// with lattice samples `T(kε) = exp(Σ k_i ε A_i)`.
///
/// The generators must commute to `tol` and `exp(t_max A_i)` must be a
/// contraction to `tol`, `t_max` being the largest grid coordinate.
pub fn approx_error_sweep(
    generators: &[CMatrix],
    eps_list: &[f64],
    time_grid: &[Vec<f64>],
    tol: Tolerance,
) -> Result<Vec<SweepRow>> {
    let d = generators.len();
    let first = generators.first().ok_or_else(|| input_err!("need at least one generator"))?;
    let n = first.rows();
    if generators.iter().any(|a| !a.is_square() || a.rows() != n) {
        return Err(input_err!("generators must be square of a common size"));
    }
    for i in 0..d {
        for j in i + 1..d {
            let (a, b) = (&generators[i], &generators[j]);
            let dev = op_norm(&(&(a * b) - &(b * a)))?;
            if dev > tol.eps() {
                return Err(input_err!("generators {i} and {j} do not commute: {dev:e}"));
            }
        }
    }
    if let Some(bad) = time_grid.iter().find(|t| t.len() != d) {
        return Err(input_err!("time point {bad:?} does not have d = {d} coordinates"));
    }
    let t_max = time_grid.iter().flatten().copied().fold(0.0, f64::max);
    for (i, a) in generators.iter().enumerate() {
        let norm = op_norm(&matrix_exp(a, t_max)?)?;
        if norm > 1.0 + tol.eps() {
            return Err(input_err!(
                "generator {i} is not contractive on the grid: ‖exp({t_max}·A)‖ = {norm}"
            ));
        }
    }

    let truth: Vec<CMatrix> = time_grid
        .iter()
        .map(|t| matrix_exp(&sum_scaled(generators, t), 1.0))
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let mut samples: BTreeMap<Vec<usize>, CMatrix> = BTreeMap::new();
        let mut sup_error = 0.0f64;
        for (t, exact) in time_grid.iter().zip(&truth) {
            let coords = lattice_coords(eps, t)?;
            for e in corners(d) {
                let k: Vec<usize> = coords.iter().zip(&e).map(|(&(fl, _), &ei)| fl + ei as usize).collect();
                if !samples.contains_key(&k) {
                    let at: Vec<f64> = k.iter().map(|&ki| ki as f64 * eps).collect();
                    let value = matrix_exp(&sum_scaled(generators, &at), 1.0)?;
                    samples.insert(k, value);
                }
            }
            let blend = scaled_blend(&samples, eps, t)?;
            sup_error = sup_error.max(op_norm(&(&blend.value - exact))?);
        }
        rows.push(SweepRow { eps, sup_error });
    }
    Ok(rows)
}
