//! Newton interpolants along the retained root curves.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::divided_differences::table::{check_distinct, newton_eval, DividedDiffTable};
use crate::error::{HoloError, Result};

/// Relative displacement used to separate coincident nodes.
pub const NODE_JITTER: f64 = 1e-7;

/// Newton form of an interpolant on one fiber.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewtonTable {
    pub z1s: Complex64,
    pub nodes: Vec<Complex64>,
    pub coefficients: Vec<Complex64>,
    pub jittered: bool,
}

impl NewtonTable {
    pub fn empty(z1s: Complex64) -> Self {
        NewtonTable { z1s, nodes: Vec::new(), coefficients: Vec::new(), jittered: false }
    }

    pub fn eval(&self, z2s: Complex64) -> Complex64 {
        if self.nodes.is_empty() {
            return Complex64::new(0.0, 0.0);
        }
        newton_eval(&self.coefficients, &self.nodes, z2s)
    }
}

/// Separates coincident nodes by displacements of size `NODE_JITTER * scale` in distinct directions.
pub fn node_jitter(nodes: &[Complex64], scale: f64) -> Result<(Vec<Complex64>, bool)> {
    if check_distinct(nodes).is_ok() {
        return Ok((nodes.to_vec(), false));
    }
    let n = nodes.len();
    let out: Vec<Complex64> = nodes
        .iter()
        .enumerate()
        .map(|(i, &x)| x + Complex64::from_polar(NODE_JITTER * scale, std::f64::consts::TAU * i as f64 / n as f64))
        .collect();
    check_distinct(&out).map_err(|_| HoloError::ConfluentNodes)?;
    Ok((out, true))
}

/// Interpolates `h / p` at `nodes`, where `p` must not vanish at the nodes.
/// `p_scale` is the size of `p` on the contour, used to decide whether a node hits the other variety.
pub fn newton_interpolant<H, P>(z1s: Complex64, h: H, p: P, nodes: &[Complex64], scale: f64, p_scale: f64) -> Result<NewtonTable>
where
    H: Fn(Complex64) -> Complex64,
    P: Fn(Complex64) -> Complex64,
{
    if nodes.is_empty() {
        return Ok(NewtonTable::empty(z1s));
    }
    let (nodes, jittered) = node_jitter(nodes, scale)?;
    let mut values = Vec::with_capacity(nodes.len());
    for &x in &nodes {
        let d = p(x);
        if d.norm() <= 1e-13 * p_scale {
            return Err(HoloError::SingularNodeValue { value: d.norm() });
        }
        values.push(h(x) / d);
    }
    let table = DividedDiffTable::from_values(&nodes, &values)?;
    Ok(NewtonTable { z1s, coefficients: table.newton_coefficients(), nodes, jittered })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::c;

    #[test]
    fn interpolant_matches_at_nodes() {
        let nodes = [c(0.1, 0.0), c(-0.05, 0.02), c(0.0, -0.07)];
        let h = |x: Complex64| (x * 3.0).exp();
        let p = |x: Complex64| x - c(0.5, 0.0);
        let t = newton_interpolant(c(0.0, 0.0), h, p, &nodes, 0.1, 1.0).unwrap();
        assert!(!t.jittered);
        for &x in &nodes {
            assert!((t.eval(x) - h(x) / p(x)).norm() < 1e-12);
        }
    }

    #[test]
    fn empty_nodes_give_zero() {
        let t = newton_interpolant(c(0.0, 0.0), |_| c(1.0, 0.0), |_| c(1.0, 0.0), &[], 1.0, 1.0).unwrap();
        assert_eq!(t.eval(c(0.3, 0.1)), c(0.0, 0.0));
    }

    #[test]
    fn double_node_is_jittered() {
        let t = newton_interpolant(c(0.0, 0.0), |x| x, |_| c(1.0, 0.0), &[c(0.0, 0.0), c(0.0, 0.0)], 0.1, 1.0).unwrap();
        assert!(t.jittered);
        assert!((t.eval(c(0.05, 0.0)) - c(0.05, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn node_on_other_variety_is_reported() {
        let r = newton_interpolant(c(0.0, 0.0), |_| c(1.0, 0.0), |x| x, &[c(0.0, 0.0)], 0.1, 1.0);
        assert!(matches!(r, Err(HoloError::SingularNodeValue { .. })));
    }
}
