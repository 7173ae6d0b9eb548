//! Smooth cutoffs selecting which local quotient absorbs the error term.

use num_complex::Complex64;

use crate::error::{HoloError, Result};
use crate::smooth::transition;

pub const CUTOFF_LO: f64 = 1.0 / 3.0;
pub const CUTOFF_HI: f64 = 2.0 / 3.0;

/// `chi(a1, a2)`: 1 when `|a1| > 2/3 |a2|`, 0 when `|a1| < 1/3 |a2|`, smooth in `|a1| / |a2|`.
pub fn chi(a1: Complex64, a2: Complex64) -> Result<f64> {
    let (n1, n2) = (a1.norm(), a2.norm());
    if n1 == 0.0 && n2 == 0.0 {
        return Err(HoloError::BothArgumentsZero);
    }
    if n2 == 0.0 {
        return Ok(1.0);
    }
    Ok(transition(n1 / n2, CUTOFF_LO, CUTOFF_HI))
}

/// `(chi_1, chi_2)` for arguments `f_l rho^{i_l} / P_l = Q_l rho^{i_l}`.
pub fn cutoffs(q1: Complex64, q2: Complex64, rho_abs: f64, i1: usize, i2: usize) -> Result<(f64, f64)> {
    let a1 = q1 * rho_abs.powi(i1 as i32);
    let a2 = q2 * rho_abs.powi(i2 as i32);
    let c1 = chi(a1, a2)?;
    Ok((c1, 1.0 - c1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::c;

    #[test]
    fn cutoff_values() {
        assert_eq!(chi(c(1.0, 0.0), c(0.0, 1.0)).unwrap(), 1.0);
        assert_eq!(chi(c(0.2, 0.0), c(1.0, 0.0)).unwrap(), 0.0);
        let (a, b) = cutoffs(c(0.5, 0.0), c(1.0, 0.0), 0.1, 1, 1).unwrap();
        assert!(a > 0.0 && a < 1.0);
        assert_eq!(a + b, 1.0);
        assert_eq!(chi(c(0.0, 0.0), c(0.0, 0.0)), Err(HoloError::BothArgumentsZero));
        assert_eq!(chi(c(1e-300, 0.0), c(0.0, 0.0)).unwrap(), 1.0);
    }
}
