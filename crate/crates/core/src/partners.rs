//! Superpotentials, partner potentials and shape invariance.
//!
//! `V - d = W^2 - W'` and `Vt - d = W^2 + W'`, so `H = A^dagger A + d` and
//! `Ht = A A^dagger + d` with `A = d/dx + W`. Shape invariance means
//! `Vt(x, m) = V(x, m - 1) + R(m - 1)`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::basis::Jet;
use crate::error::{Error, Result};
use crate::families::{Family, FamilyKind};
use crate::riccati::{basis_kappa, basis_pair, ExtendedReal, SignClass};

pub type CustomSuperpotential = Arc<dyn Fn(f64, f64) -> Result<Jet> + Send + Sync>;

/// `W(x, m)` with an exact x-derivative.
#[derive(Clone)]
pub enum Superpotential {
    Family(Family),
    /// User-supplied `(x, m) -> (W, dW/dx)`.
    Custom(CustomSuperpotential),
}

impl fmt::Debug for Superpotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Superpotential::Family(fam) => f.debug_tuple("Family").field(fam).finish(),
            Superpotential::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl From<Family> for Superpotential {
    fn from(f: Family) -> Self {
        Superpotential::Family(f)
    }
}

impl Superpotential {
    pub fn custom(w: impl Fn(f64, f64) -> Result<Jet> + Send + Sync + 'static) -> Self {
        Superpotential::Custom(Arc::new(w))
    }

    pub fn jet(&self, x: f64, m: f64) -> Result<Jet> {
        match self {
            Superpotential::Family(f) => f.k(x, m),
            Superpotential::Custom(w) => w(x, m),
        }
    }

    pub fn value(&self, x: f64, m: f64) -> Result<f64> {
        Ok(self.jet(x, m)?.value)
    }

    pub fn derivative_x(&self, x: f64, m: f64) -> Result<f64> {
        Ok(self.jet(x, m)?.deriv)
    }

    pub fn family(&self) -> Option<&Family> {
        match self {
            Superpotential::Family(f) => Some(f),
            Superpotential::Custom(_) => None,
        }
    }

    /// Poles inside `(lo, hi)`; unknown (empty) for custom superpotentials.
    pub fn singularities(&self, m: f64, lo: f64, hi: f64) -> Vec<f64> {
        self.family().map_or_else(Vec::new, |f| f.singularities(m, lo, hi))
    }
}

/// `V(x, m) = W^2 - W' + d`.
pub fn potential_v(w: &Superpotential, d: f64, x: f64, m: f64) -> Result<f64> {
    let j = w.jet(x, m)?;
    Ok(j.value * j.value - j.deriv + d)
}

/// `Vt(x, m) = W^2 + W' + d`.
pub fn potential_vtilde(w: &Superpotential, d: f64, x: f64, m: f64) -> Result<f64> {
    let j = w.jet(x, m)?;
    Ok(j.value * j.value + j.deriv + d)
}

/// Partner potentials generated by one superpotential.
#[derive(Debug, Clone)]
pub struct PotentialPair {
    pub w: Superpotential,
    pub d: f64,
}

impl PotentialPair {
    pub fn new(w: Superpotential, d: f64) -> Self {
        Self { w, d }
    }

    /// The pair of a family, with its own energy reference.
    pub fn of_family(f: &Family) -> Self {
        Self { w: Superpotential::Family(*f), d: f.params().d }
    }

    pub fn v(&self, x: f64, m: f64) -> Result<f64> {
        potential_v(&self.w, self.d, x, m)
    }

    pub fn vtilde(&self, x: f64, m: f64) -> Result<f64> {
        potential_vtilde(&self.w, self.d, x, m)
    }

    /// `Vt(x, m) - V(x, m - 1) - r(m - 1)`.
    pub fn shape_invariance_residual(
        &self,
        r: impl Fn(f64) -> Result<f64>,
        m: f64,
        x: f64,
    ) -> Result<f64> {
        Ok(self.vtilde(x, m)? - self.v(x, m - 1.0)? - r(m - 1.0)?)
    }
}

/// Shape-invariance residual of a family with its own `R`.
pub fn shape_invariance_residual(f: &Family, m: f64, x: f64) -> Result<f64> {
    PotentialPair::of_family(f).shape_invariance_residual(|u| f.R(u), m, x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisTag {
    /// `f, h` are the finite-`B` functions.
    Generic,
    /// `B = inf`: `f, h` are the limit functions (`tanh, sech`, ...).
    Limit,
}

/// `f2 f^2 + fh f h + h2 h^2 + f f + const` in the basis of the family.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Coefficients {
    pub f2: f64,
    pub fh: f64,
    pub h2: f64,
    pub f: f64,
    #[serde(rename = "const")]
    pub konst: f64,
}

impl Coefficients {
    fn eval(&self, f: f64, h: f64) -> f64 {
        self.f2 * f * f + self.fh * f * h + self.h2 * h * h + self.f * f + self.konst
    }
}

/// Closed-form `V - d` and `Vt - d` at one `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientRecord {
    pub basis: BasisTag,
    #[serde(rename = "V")]
    pub v: Coefficients,
    #[serde(rename = "Vtilde")]
    pub vtilde: Coefficients,
    #[serde(rename = "R_at_m")]
    pub r_at_m: f64,
}

impl CoefficientRecord {
    /// `(V - d, Vt - d)` at `x`.
    pub fn eval(&self, family: &Family, x: f64) -> Result<(f64, f64)> {
        let p = family.params();
        let b = basis_pair(p.sign, p.center, p.selector, x)?;
        Ok((self.v.eval(b.f.value, b.h.value), self.vtilde.eval(b.f.value, b.h.value)))
    }
}

/// The closed-form potentials of a library family.
pub fn closed_form_potentials(family: &Family, m: f64) -> Result<CoefficientRecord> {
    let p = family.params();
    let basis = match p.selector {
        ExtendedReal::Finite(_) => BasisTag::Generic,
        ExtendedReal::Infinity => BasisTag::Limit,
    };
    let kappa = basis_kappa(p.sign, p.selector);
    let a = family.a();
    let (dd, b) = (p.amplitude, p.forcing);
    let zero = Coefficients::default();
    let (v, vtilde) = match (family.kind(), p.sign) {
        (FamilyKind::Affine, SignClass::PositiveA { c } | SignClass::NegativeA { c }) => {
            let beta = b + m * a;
            let v = Coefficients {
                f2: beta * beta / (c * c),
                fh: dd / c * (2.0 * beta + a),
                h2: dd * dd - kappa * beta,
                ..zero
            };
            let vt = Coefficients {
                f2: beta * beta / (c * c),
                fh: dd / c * (2.0 * beta - a),
                h2: dd * dd + kappa * beta,
                ..zero
            };
            (v, vt)
        }
        (FamilyKind::Affine, SignClass::ZeroA) => {
            let g = |j: f64| dd + (m + j) * kappa;
            let v = Coefficients {
                h2: b * b,
                f2: g(0.0) * g(1.0),
                fh: 2.0 * b * g(0.5),
                konst: -b,
                ..zero
            };
            let vt = Coefficients {
                h2: b * b,
                f2: g(0.0) * g(-1.0),
                fh: 2.0 * b * g(-0.5),
                konst: b,
                ..zero
            };
            (v, vt)
        }
        (FamilyKind::InversePower, sign) => {
            if m == 0.0 {
                return Err(Error::ZeroParameter);
            }
            let q = p.q;
            let q2 = q * q / (m * m);
            match sign {
                SignClass::PositiveA { c } => {
                    let s = c * c * kappa;
                    (
                        Coefficients { konst: q2 + m * m * c * c, f: 2.0 * q * c, h2: -m * (m + 1.0) * s, ..zero },
                        Coefficients { konst: q2 + m * m * c * c, f: 2.0 * q * c, h2: -m * (m - 1.0) * s, ..zero },
                    )
                }
                SignClass::NegativeA { c } => {
                    let s = c * c * kappa;
                    (
                        Coefficients { konst: q2 - m * m * c * c, f: -2.0 * q * c, h2: m * (m + 1.0) * s, ..zero },
                        Coefficients { konst: q2 - m * m * c * c, f: -2.0 * q * c, h2: m * (m - 1.0) * s, ..zero },
                    )
                }
                SignClass::ZeroA => {
                    let k2 = kappa * kappa;
                    (
                        Coefficients { konst: q2, f: 2.0 * q * kappa, f2: m * (m + 1.0) * k2, ..zero },
                        Coefficients { konst: q2, f: 2.0 * q * kappa, f2: m * (m - 1.0) * k2, ..zero },
                    )
                }
            }
        }
    };
    Ok(CoefficientRecord { basis, v, vtilde, r_at_m: family.R(m)? })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LSequenceClass {
    Decreasing,
    Increasing,
    Other,
}

/// Monotonicity of `L(m0 - j)`, `j = 0..=steps`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LSequence {
    pub class: LSequenceClass,
    pub orbit: Vec<f64>,
}

pub fn classify_l_sequence(family: &Family, m0: f64, steps: usize) -> Result<LSequence> {
    if steps == 0 {
        return Err(Error::InvalidParameter("steps must be positive".into()));
    }
    let orbit = (0..=steps).map(|j| family.L(m0 - j as f64)).collect::<Result<Vec<_>>>()?;
    let dec = orbit.windows(2).all(|w| w[1] < w[0]);
    let inc = orbit.windows(2).all(|w| w[1] > w[0]);
    let class = if dec {
        LSequenceClass::Decreasing
    } else if inc {
        LSequenceClass::Increasing
    } else {
        LSequenceClass::Other
    };
    Ok(LSequence { class, orbit })
}

/// `(r1, r2)` with `r(x, m) = -(V(x, m) - d) - L(m)`:
/// `r1 = r(m) + r(m-1) + 2 k^2(m) + 2 L(m)`, `r2 = r(m) - r(m-1) - 2 k'(m)`.
pub fn factorization_residuals(family: &Family, m: f64, x: f64) -> Result<(f64, f64)> {
    factorization_residuals_with_shift(family, m, x, 0.0)
}

/// As [`factorization_residuals`] with `V` replaced by `V + v_shift` while
/// `L` is kept. A nonzero shift must break `r1`.
pub fn factorization_residuals_with_shift(
    family: &Family,
    m: f64,
    x: f64,
    v_shift: f64,
) -> Result<(f64, f64)> {
    let w = Superpotential::Family(*family);
    let r = |mm: f64| -> Result<f64> {
        Ok(-(potential_v(&w, 0.0, x, mm)? + v_shift) - family.L(mm)?)
    };
    let k = family.k(x, m)?;
    let (rm, rp) = (r(m)?, r(m - 1.0)?);
    let l = family.L(m)?;
    Ok((rm + rp + 2.0 * k.value * k.value + 2.0 * l, rm - rp - 2.0 * k.deriv))
}
