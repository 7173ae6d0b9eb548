//! Univariate root extraction: companion-matrix eigenvalues, Newton polish, multiplicity grouping.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use crate::error::{HoloError, Result};
use crate::geometry::KoranyiFrame;
use crate::poly::{HoloPoly, UniPoly};
use crate::types::c;

/// Relative size below which leading coefficients are treated as zero.
pub const LEADING_TOL: f64 = 1e-13;

/// Roots of `p` with repetition. Leading coefficients below `LEADING_TOL * max|a_k|` are dropped.
pub fn poly_roots(p: &UniPoly) -> Vec<Complex64> {
    let t = p.trimmed(LEADING_TOL);
    let n = match t.degree() {
        None | Some(0) => return Vec::new(),
        Some(n) => n,
    };
    // Factor out exact zero roots first; the companion matrix handles the rest.
    let lowest = t.coeffs.iter().position(|a| *a != c(0.0, 0.0)).unwrap();
    let core = UniPoly::new(t.coeffs[lowest..].to_vec());
    let m = n - lowest;
    let mut roots = vec![c(0.0, 0.0); lowest];
    if m == 1 {
        roots.push(-core.coeffs[0] / core.coeffs[1]);
    } else if m > 1 {
        let lead = core.coeffs[m];
        let comp = DMatrix::from_fn(m, m, |i, j| {
            if i == 0 {
                -core.coeffs[m - 1 - j] / lead
            } else if i == j + 1 {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let eig = Schur::try_new(comp, f64::EPSILON, 100_000)
            .and_then(|s| s.eigenvalues())
            .map(|v| v.iter().cloned().collect::<Vec<_>>())
            .unwrap_or_else(|| durand_kerner(&core));
        roots.extend(eig);
    }
    polish(&t, roots)
}

/// Fallback simultaneous iteration used only if the QR iteration fails.
fn durand_kerner(p: &UniPoly) -> Vec<Complex64> {
    let n = p.degree().unwrap_or(0);
    let lead = p.coeffs[n];
    let monic = UniPoly::new(p.coeffs.iter().map(|a| a / lead).collect());
    let r = 1.0 + monic.coeffs[..n].iter().map(|a| a.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(r, 0.4 + std::f64::consts::TAU * k as f64 / n as f64))
        .collect();
    for _ in 0..500 {
        let prev = z.clone();
        for i in 0..n {
            let zi = z[i];
            let mut den = c(1.0, 0.0);
            for (j, zj) in prev.iter().enumerate() {
                if j != i {
                    den *= zi - zj;
                }
            }
            z[i] = zi - monic.eval(zi) / den;
        }
    }
    z
}

/// Groups roots into multiple roots; see [`group_roots`].
pub fn polish(p: &UniPoly, roots: Vec<Complex64>) -> Vec<Complex64> {
    let groups = group_roots(p, &roots);
    let dp = p.derivative();
    let mut out = Vec::with_capacity(roots.len());
    for (value, mult) in groups {
        if mult > 1 {
            out.extend(std::iter::repeat_n(value, mult));
            continue;
        }
        let mut x = value;
        let mut fx = p.eval(x).norm();
        for _ in 0..4 {
            let d = dp.eval(x);
            if d.norm() == 0.0 {
                break;
            }
            let y = x - p.eval(x) / d;
            let fy = p.eval(y).norm();
            if fy < fx {
                x = y;
                fx = fy;
            } else {
                break;
            }
        }
        out.push(x);
    }
    out
}

/// Multiple-root grouping: roots within a loose linkage radius are replaced by their mean
/// when the mean is a root of `p` to backward accuracy; otherwise they stay separate.
pub fn group_roots(p: &UniPoly, roots: &[Complex64]) -> Vec<(Complex64, usize)> {
    let n = roots.len();
    let mut comp: Vec<usize> = (0..n).collect();
    fn find(comp: &mut Vec<usize>, i: usize) -> usize {
        let mut r = i;
        while comp[r] != r {
            r = comp[r];
        }
        comp[i] = r;
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let link = 1e-3 * roots[i].norm().max(roots[j].norm());
            if (roots[i] - roots[j]).norm() <= link {
                let (a, b) = (find(&mut comp, i), find(&mut comp, j));
                comp[a] = b;
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut ids: Vec<usize> = Vec::new();
    for i in 0..n {
        let r = find(&mut comp, i);
        match ids.iter().position(|&x| x == r) {
            Some(k) => groups[k].push(i),
            None => {
                ids.push(r);
                groups.push(vec![i]);
            }
        }
    }
    let mut out = Vec::new();
    for g in groups {
        if g.len() == 1 {
            out.push((roots[g[0]], 1));
            continue;
        }
        let mean = g.iter().map(|&i| roots[i]).sum::<Complex64>() / g.len() as f64;
        if is_multiple_root(p, mean, g.len()) {
            out.push((mean, g.len()));
        } else {
            out.extend(g.iter().map(|&i| (roots[i], 1)));
        }
    }
    out
}

/// `x` is an m-fold root when `p, p', ..., p^(m-1)` all vanish at `x` to backward accuracy.
fn is_multiple_root(p: &UniPoly, x: Complex64, m: usize) -> bool {
    let mut d = p.clone();
    for k in 0..m {
        let scale = d.magnitude(x);
        if d.eval(x).norm() > 1e-13 * scale.max(1e-300) * (k + 1) as f64 {
            return false;
        }
        d = d.derivative();
    }
    true
}

/// Roots of `f` along `frame.v` at normal offset `z1s`, restricted to `|lambda| < window`.
pub fn fiber_roots(f: &HoloPoly, frame: &KoranyiFrame, z1s: Complex64, window: f64) -> Result<Vec<Complex64>> {
    let p = fiber_poly(f, frame, z1s)?;
    Ok(poly_roots(&p).into_iter().filter(|r| r.norm() < window).collect())
}

/// Restriction of `f` to the fiber line `{base + z1s eta + lambda v}`.
pub fn fiber_poly(f: &HoloPoly, frame: &KoranyiFrame, z1s: Complex64) -> Result<UniPoly> {
    let base = frame.point(z1s, c(0.0, 0.0));
    let p = f.restrict_to_line(base, frame.v);
    let scale = line_scale(f, base, frame.v);
    if p.coeffs.iter().all(|a| a.norm() <= 1e-13 * scale) {
        return Err(HoloError::IdenticallyZeroFiber);
    }
    Ok(p)
}

/// Size of the summands in the line restriction; zero tests are relative to it.
pub fn line_scale(f: &HoloPoly, base: crate::C2, dir: crate::C2) -> f64 {
    let r1 = base.z1.norm() + dir.z1.norm();
    let r2 = base.z2.norm() + dir.z2.norm();
    f.terms()
        .map(|(i, j, a)| a.norm() * r1.powi(i as i32) * r2.powi(j as i32))
        .sum::<f64>()
        .max(f64::MIN_POSITIVE)
}

/// Multiplicity summary of a root list: distinct values and their counts.
pub fn multiplicities(roots: &[Complex64]) -> Vec<(Complex64, usize)> {
    let mut out: Vec<(Complex64, usize)> = Vec::new();
    for &r in roots {
        match out.iter_mut().find(|(v, _)| *v == r) {
            Some((_, m)) => *m += 1,
            None => out.push((r, 1)),
        }
    }
    out
}
