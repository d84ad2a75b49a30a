//! Truncated Taylor series of the closed forms.
//!
//! Ladder chains differentiate the same function several times. Doing that
//! by finite differences amplifies rounding like `eps / h^k`; propagating
//! Taylor coefficients of the closed forms keeps every derivative exact to
//! rounding.

use crate::error::{Error, Result};
use crate::families::{Family, FamilyKind};
use crate::riccati::{ExtendedReal, SignClass};

/// `c_j = f^(j)(x0) / j!` for `j = 0..len`.
#[derive(Debug, Clone, PartialEq)]
pub struct Taylor(pub Vec<f64>);

impl Taylor {
    pub fn constant(v: f64, len: usize) -> Self {
        let mut c = vec![0.0; len];
        c[0] = v;
        Taylor(c)
    }

    /// `x - a` expanded at `x0`.
    pub fn shifted_variable(x0: f64, a: f64, len: usize) -> Self {
        let mut c = vec![0.0; len];
        c[0] = x0 - a;
        if len > 1 {
            c[1] = 1.0;
        }
        Taylor(c)
    }

    /// `v e^{r (x - x0)}`.
    pub fn exponential(v: f64, r: f64, len: usize) -> Self {
        let mut c = Vec::with_capacity(len);
        let mut t = v;
        for j in 0..len {
            c.push(t);
            t *= r / (j + 1) as f64;
        }
        Taylor(c)
    }

    /// `(sin, cos)` of `u0 + r (x - x0)`.
    pub fn sin_cos(u0: f64, r: f64, len: usize) -> (Self, Self) {
        let (s0, c0) = u0.sin_cos();
        let mut s = Vec::with_capacity(len);
        let mut c = Vec::with_capacity(len);
        let mut fact = 1.0;
        for j in 0..len {
            // d^j sin = sin(u + j pi/2)
            let (sj, cj) = match j % 4 {
                0 => (s0, c0),
                1 => (c0, -s0),
                2 => (-s0, -c0),
                _ => (-c0, s0),
            };
            let rj = r.powi(j as i32) / fact;
            s.push(sj * rj);
            c.push(cj * rj);
            fact *= (j + 1) as f64;
        }
        (Taylor(s), Taylor(c))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }

    pub fn add(&self, o: &Taylor) -> Taylor {
        Taylor(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, s: f64) -> Taylor {
        Taylor(self.0.iter().map(|a| s * a).collect())
    }

    pub fn mul(&self, o: &Taylor) -> Taylor {
        let n = self.len().min(o.len());
        Taylor((0..n).map(|j| (0..=j).map(|i| self.0[i] * o.0[j - i]).sum()).collect())
    }

    pub fn div(&self, o: &Taylor, x: f64) -> Result<Taylor> {
        let n = self.len().min(o.len());
        let d0 = o.0[0];
        if d0 == 0.0 || !d0.is_finite() {
            return Err(Error::Pole { x });
        }
        let mut q: Vec<f64> = Vec::with_capacity(n);
        for j in 0..n {
            let s: f64 = (1..=j).map(|i| o.0[i] * q[j - i]).sum();
            q.push((self.0[j] - s) / d0);
        }
        Ok(Taylor(q))
    }

    /// Derivative; one coefficient shorter.
    pub fn derivative(&self) -> Taylor {
        Taylor((1..self.len()).map(|j| j as f64 * self.0[j]).collect())
    }

    pub fn truncate(&self, len: usize) -> Taylor {
        Taylor(self.0[..len.min(self.len())].to_vec())
    }
}

/// `(f, h)` of the family basis expanded at `x`.
pub fn basis_taylor(sign: SignClass, center: f64, selector: ExtendedReal, x: f64, len: usize) -> Result<(Taylor, Taylor)> {
    let y = x - center;
    match (sign, selector) {
        (SignClass::PositiveA { c }, ExtendedReal::Finite(b)) => {
            // scaled by e^{-|u|}: see the value-level basis functions
            let u = c * y;
            let sg = if u >= 0.0 { 1.0 } else { -1.0 };
            let scale = Taylor::exponential((-u.abs()).exp(), -sg * c, len);
            let e2 = Taylor::exponential((-2.0 * u.abs()).exp(), -2.0 * sg * c, len);
            let one = Taylor::constant(1.0, len);
            let (p, m) = if u >= 0.0 {
                (one.scale(b - 1.0), e2.scale(b + 1.0))
            } else {
                (e2.scale(b - 1.0), one.scale(b + 1.0))
            };
            let den = p.add(&m).scale(0.5);
            let num = p.add(&m.scale(-1.0)).scale(0.5);
            Ok((num.div(&den, x)?, scale.div(&den, x)?))
        }
        (SignClass::PositiveA { c }, ExtendedReal::Infinity) => {
            let u = c * y;
            let sg = if u >= 0.0 { 1.0 } else { -1.0 };
            // tanh = (1 - e^{-2|u|}) / (1 + e^{-2|u|}) sg, sech = 2 e^{-|u|} / (1 + e^{-2|u|})
            let e2 = Taylor::exponential((-2.0 * u.abs()).exp(), -2.0 * sg * c, len);
            let e1 = Taylor::exponential((-u.abs()).exp(), -sg * c, len);
            let one = Taylor::constant(1.0, len);
            let den = one.add(&e2);
            let f = one.add(&e2.scale(-1.0)).scale(sg).div(&den, x)?;
            let h = e1.scale(2.0).div(&den, x)?;
            Ok((f, h))
        }
        (SignClass::ZeroA, ExtendedReal::Finite(b)) => {
            let yv = Taylor::shifted_variable(x, center, len);
            let den = Taylor::constant(1.0, len).add(&yv.scale(b));
            let num_h = yv.mul(&yv).scale(0.5 * b).add(&yv);
            Ok((Taylor::constant(1.0, len).div(&den, x)?, num_h.div(&den, x)?))
        }
        (SignClass::ZeroA, ExtendedReal::Infinity) => {
            let yv = Taylor::shifted_variable(x, center, len);
            Ok((Taylor::constant(1.0, len).div(&yv, x)?, yv.scale(0.5)))
        }
        (SignClass::NegativeA { c }, sel) => {
            let (s, co) = Taylor::sin_cos(c * y, c, len);
            match sel {
                ExtendedReal::Finite(b) => {
                    let den = co.scale(b).add(&s.scale(-1.0));
                    let num = s.scale(b).add(&co);
                    Ok((num.div(&den, x)?, Taylor::constant(1.0, len).div(&den, x)?))
                }
                ExtendedReal::Infinity => {
                    Ok((s.div(&co, x)?, Taylor::constant(1.0, len).div(&co, x)?))
                }
            }
        }
    }
}

/// `k(., m)` of a family expanded at `x` with `len` coefficients.
pub fn k_taylor(family: &Family, x: f64, m: f64, len: usize) -> Result<Taylor> {
    let p = family.params();
    if family.kind() == FamilyKind::InversePower && m == 0.0 {
        return Err(Error::ZeroParameter);
    }
    let (f, h) = basis_taylor(p.sign, p.center, p.selector, x, len)?;
    let k1 = match (p.sign, p.selector) {
        (SignClass::PositiveA { c }, _) => f.scale(c),
        (SignClass::ZeroA, ExtendedReal::Finite(b)) => f.scale(b),
        (SignClass::ZeroA, ExtendedReal::Infinity) => f.clone(),
        (SignClass::NegativeA { c }, _) => f.scale(-c),
    };
    let k0 = match family.kind() {
        FamilyKind::InversePower => Taylor::constant(p.q / m, len),
        FamilyKind::Affine => match p.sign {
            SignClass::PositiveA { c } | SignClass::NegativeA { c } => {
                f.scale(p.forcing / c).add(&h.scale(p.amplitude))
            }
            SignClass::ZeroA => h.scale(p.forcing).add(&f.scale(p.amplitude)),
        },
    };
    Ok(k0.add(&k1.scale(m)))
}
