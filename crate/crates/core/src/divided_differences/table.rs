//! Newton divided differences on complex nodes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HoloError, Result};
use crate::poly::Holomorphic;
use crate::types::{c, C2};

/// Relative node separation below which nodes count as duplicates.
pub const NODE_GAP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DividedDiffTable {
    pub nodes: Vec<Complex64>,
    pub values: Vec<Complex64>,
    /// `table[k][i] = h[lambda_i, ..., lambda_{i+k}]`.
    pub table: Vec<Vec<Complex64>>,
}

pub fn check_distinct(nodes: &[Complex64]) -> Result<()> {
    let scale = nodes.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let mut gap = f64::INFINITY;
    for i in 0..nodes.len() {
        for j in (i + 1)..nodes.len() {
            gap = gap.min((nodes[i] - nodes[j]).norm());
        }
    }
    if nodes.len() > 1 && !(gap > NODE_GAP * scale) {
        return Err(HoloError::DuplicateNodes { gap });
    }
    Ok(())
}

impl DividedDiffTable {
    pub fn from_values(nodes: &[Complex64], values: &[Complex64]) -> Result<Self> {
        assert_eq!(nodes.len(), values.len());
        check_distinct(nodes)?;
        let n = nodes.len();
        let mut table = vec![values.to_vec()];
        for k in 1..n {
            let prev = &table[k - 1];
            let row: Vec<Complex64> = (0..n - k)
                .map(|i| (prev[i] - prev[i + 1]) / (nodes[i] - nodes[i + k]))
                .collect();
            table.push(row);
        }
        Ok(DividedDiffTable { nodes: nodes.to_vec(), values: values.to_vec(), table })
    }

    /// Table of `lambda -> h(lambda)`.
    pub fn from_fn<F: Fn(Complex64) -> Complex64>(h: F, nodes: &[Complex64]) -> Result<Self> {
        let values: Vec<Complex64> = nodes.iter().map(|&x| h(x)).collect();
        Self::from_values(nodes, &values)
    }

    /// Table of `h_{z,v}[.]`, i.e. of `lambda -> h(z + lambda v)`.
    pub fn on_line<H: Holomorphic + ?Sized>(h: &H, z: C2, v: C2, nodes: &[Complex64]) -> Result<Self> {
        Self::from_fn(|l| h.eval(z + v * l), nodes)
    }

    /// `h[lambda_i, ..., lambda_j]`, inclusive indices.
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.table[j - i][i]
    }

    /// Highest-order entry `h[lambda_1, ..., lambda_n]`.
    pub fn top(&self) -> Complex64 {
        self.table.last().map(|r| r[0]).unwrap_or(c(0.0, 0.0))
    }

    /// Newton coefficients `h[lambda_1..lambda_k]`, `k = 1..n`.
    pub fn newton_coefficients(&self) -> Vec<Complex64> {
        self.table.iter().map(|r| r[0]).collect()
    }

    /// Newton interpolant at `x`.
    pub fn interpolate(&self, x: Complex64) -> Complex64 {
        newton_eval(&self.newton_coefficients(), &self.nodes, x)
    }
}

/// `sum_k coef[k] prod_{i<k} (x - nodes[i])` by Horner's scheme.
pub fn newton_eval(coef: &[Complex64], nodes: &[Complex64], x: Complex64) -> Complex64 {
    let mut acc = c(0.0, 0.0);
    for k in (0..coef.len()).rev() {
        acc = acc * (x - nodes[k]) + coef[k];
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeibnizResidual {
    pub residual: f64,
    /// Largest `sum_k |alpha[..]| |beta[..]|`, the natural size of the identity's terms.
    pub scale: f64,
}

/// Checks `(a b)[z_1..z_m] = sum_k a[z_1..z_k] b[z_k..z_m]` for every prefix length `m`.
pub fn leibniz_check<A, B>(alpha: A, beta: B, nodes: &[Complex64]) -> Result<LeibnizResidual>
where
    A: Fn(Complex64) -> Complex64,
    B: Fn(Complex64) -> Complex64,
{
    let ta = DividedDiffTable::from_fn(&alpha, nodes)?;
    let tb = DividedDiffTable::from_fn(&beta, nodes)?;
    let tp = DividedDiffTable::from_fn(|x| alpha(x) * beta(x), nodes)?;
    let mut out = LeibnizResidual { residual: 0.0, scale: 0.0 };
    for m in 0..nodes.len() {
        let mut s = c(0.0, 0.0);
        let mut mag = 0.0;
        for k in 0..=m {
            let t = ta.entry(0, k) * tb.entry(k, m);
            s += t;
            mag += t.norm();
        }
        out.residual = out.residual.max((tp.entry(0, m) - s).norm());
        out.scale = out.scale.max(mag.max(tp.entry(0, m).norm()));
    }
    Ok(out)
}
