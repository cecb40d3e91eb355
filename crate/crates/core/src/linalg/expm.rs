use super::{op_norm, CMatrix};
use crate::error::{input_err, Result};

/// Largest `‖tA‖` accepted by [`matrix_exp`].
pub const MAX_EXP_NORM: f64 = 50.0;

const MAX_TERMS: usize = 30;

/// `exp(tA)` by scaling and squaring a truncated Taylor series.
///
/// The argument is halved until its 1-norm is at most 1/2, the series is
/// summed until the next term drops below rounding, and the result is
/// squared back.
pub fn matrix_exp(a: &CMatrix, t: f64) -> Result<CMatrix> {
    if !a.is_square() {
        return Err(input_err!("matrix_exp needs a square matrix, got {}x{}", a.rows(), a.cols()));
    }
    if !t.is_finite() {
        return Err(input_err!("time {t} is not finite"));
    }
    let ta = a.scale_real(t);
    let norm = op_norm(&ta)?;
    if norm > MAX_EXP_NORM {
        return Err(input_err!(
            "‖tA‖ = {norm} exceeds the supported bound {MAX_EXP_NORM}"
        ));
    }
    let n = a.rows();
    let mut squarings = 0u32;
    let mut scaled_norm = ta.norm_one();
    while scaled_norm > 0.5 {
        scaled_norm *= 0.5;
        squarings += 1;
    }
    let x = ta.scale_real(libm::ldexp(1.0, -(squarings as i32)));

    let mut sum = CMatrix::identity(n);
    let mut term = CMatrix::identity(n);
    for k in 1..=MAX_TERMS {
        term = (&term * &x).scale_real(1.0 / k as f64);
        sum = &sum + &term;
        if term.max_abs() <= f64::EPSILON * 1e-2 * sum.max_abs() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    Ok(sum)
}
