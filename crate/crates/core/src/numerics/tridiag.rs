use crate::error::{Error, Result};

use super::first_lobe_sign;

/// Symmetric tridiagonal matrix. `spacing` is the weight used when
/// normalizing eigenvectors (`sum v_i^2 * spacing = 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSym {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
    pub spacing: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: Vec<f64>,
}

impl TridiagonalSym {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        Self::with_spacing(diag, offdiag, 1.0)
    }

    pub fn with_spacing(diag: Vec<f64>, offdiag: Vec<f64>, spacing: f64) -> Result<Self> {
        if diag.is_empty() || offdiag.len() + 1 != diag.len() {
            return Err(Error::InvalidParameter(format!(
                "tridiagonal shape mismatch: {} diagonal, {} off-diagonal",
                diag.len(),
                offdiag.len()
            )));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::InvalidParameter(format!("bad spacing {spacing}")));
        }
        Ok(Self { diag, offdiag, spacing })
    }

    /// `-(1/h^2) [1 -2 1] + diag(potential)`.
    pub fn from_potential(h: f64, potential: &[f64]) -> Result<Self> {
        let inv = 1.0 / (h * h);
        let diag = potential.iter().map(|v| 2.0 * inv + v).collect();
        let offdiag = vec![-inv; potential.len().saturating_sub(1)];
        Self::with_spacing(diag, offdiag, h)
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.offdiag[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.offdiag[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
                if i > 0 {
                    s += self.offdiag[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += self.offdiag[i] * v[i + 1];
                }
                s
            })
            .collect()
    }
}

/// Number of eigenvalues strictly below `x` (LDL^T pivot signs).
pub fn sturm_count(t: &TridiagonalSym, x: f64) -> usize {
    let guard = f64::MIN_POSITIVE.sqrt();
    let mut count = 0;
    let mut d = t.diag[0] - x;
    for i in 0..t.dim() {
        if i > 0 {
            let e = t.offdiag[i - 1];
            d = t.diag[i] - x - e * e / d;
        }
        if d == 0.0 {
            d = -guard;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

const MAX_BISECTIONS: usize = 400;

/// Bisects down to rounding level: `floor` is the absolute resolution of
/// the Sturm count, about `eps` times the spectral scale.
fn bisect(t: &TridiagonalSym, k: usize, mut lo: f64, mut hi: f64, floor: f64) -> Result<f64> {
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        let tol = floor.max(4.0 * f64::EPSILON * lo.abs().max(hi.abs()));
        if hi - lo <= tol || mid == lo || mid == hi {
            return Ok(mid);
        }
        if sturm_count(t, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(Error::NoConvergence)
}

/// Solves `(T - shift I) x = b` by Gaussian elimination with partial
/// pivoting on the tridiagonal band.
fn shifted_solve(t: &TridiagonalSym, shift: f64, b: &[f64]) -> Vec<f64> {
    let n = t.dim();
    let tiny = f64::EPSILON * t.gershgorin().1.abs().max(t.gershgorin().0.abs()).max(1.0);
    let mut dl: Vec<f64> = t.offdiag.clone();
    let mut d: Vec<f64> = t.diag.iter().map(|v| v - shift).collect();
    let mut du: Vec<f64> = t.offdiag.clone();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let mut x = b.to_vec();
    for i in 0..n.saturating_sub(1) {
        if d[i].abs() >= dl[i].abs() {
            let piv = if d[i] == 0.0 { tiny } else { d[i] };
            d[i] = piv;
            let l = dl[i] / piv;
            d[i + 1] -= l * du[i];
            x[i + 1] -= l * x[i];
            dl[i] = 0.0;
        } else {
            let l = d[i] / dl[i];
            d[i] = dl[i];
            let tmp = d[i + 1];
            d[i + 1] = du[i] - l * tmp;
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] *= -l;
            }
            du[i] = tmp;
            x.swap(i, i + 1);
            x[i + 1] -= l * x[i];
        }
    }
    if d[n - 1] == 0.0 {
        d[n - 1] = tiny;
    }
    x[n - 1] /= d[n - 1];
    if n >= 2 {
        x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    }
    x
}

fn weighted_normalize(v: &mut [f64], w: f64) {
    let s = (v.iter().map(|a| a * a).sum::<f64>() * w).sqrt();
    if s > 0.0 {
        v.iter_mut().for_each(|a| *a /= s);
    }
}

/// The `count` smallest eigenpairs, ascending. Eigenvalues by Sturm
/// bisection to rounding level (well inside `1e-12` of the Gershgorin
/// scale); eigenvectors by two steps of inverse iteration, orthogonalized
/// against the lower ones, normalized with weight `spacing` and signed so
/// the first lobe is positive.
pub fn eigen_lowest(t: &TridiagonalSym, count: usize) -> Result<Vec<Eigenpair>> {
    let n = t.dim();
    if count == 0 || count > n {
        return Err(Error::InvalidParameter(format!(
            "requested {count} eigenpairs of a {n}x{n} matrix"
        )));
    }
    if t.diag.iter().chain(&t.offdiag).any(|v| !v.is_finite()) {
        return Err(Error::NoConvergence);
    }
    let (lo, hi) = t.gershgorin();
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    let floor = f64::EPSILON * scale;
    let tol = 1e-12 * scale;
    let mut out: Vec<Eigenpair> = Vec::with_capacity(count);
    for k in 0..count {
        let value = bisect(t, k, lo - tol, hi + tol, floor)?;
        // deterministic, generic start vector
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i as f64) * 0.618_034).sin()).collect();
        for _ in 0..2 {
            v = shifted_solve(t, value, &v);
            for p in &out {
                let dot: f64 = p.vector.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() * t.spacing;
                v.iter_mut().zip(&p.vector).for_each(|(a, b)| *a -= dot * b);
            }
            weighted_normalize(&mut v, t.spacing);
        }
        if v.iter().any(|a| !a.is_finite()) {
            return Err(Error::NoConvergence);
        }
        let s = first_lobe_sign(&v);
        v.iter_mut().for_each(|a| *a *= s);
        out.push(Eigenpair { value, vector: v });
    }
    Ok(out)
}
