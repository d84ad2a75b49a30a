//! Building blocks of the closed-form superpotentials.
//!
//! With `u = c (x - A)` the generic functions are
//!
//! ```text
//! f+ = (B sinh u - cosh u) / (B cosh u - sinh u)    h+ = 1 / (B cosh u - sinh u)
//! f0 = 1 / (1 + B (x - A))                         h0 = (B/2 (x - A)^2 + x - A) / (1 + B (x - A))
//! f- = (B sin u + cos u) / (B cos u - sin u)        h- = 1 / (B cos u - sin u)
//! ```
//!
//! Every function returns its value together with its x-derivative. The
//! derivatives are obtained with the quotient rule on the raw numerators and
//! denominators, so the algebraic identities between them (for instance
//! `f+' = c (1 - f+^2)`) are genuine checks rather than tautologies.

use crate::error::{Error, Result};

/// Value and first derivative of a real function at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub deriv: f64,
}

impl Jet {
    pub const ZERO: Jet = Jet { value: 0.0, deriv: 0.0 };

    pub fn new(value: f64, deriv: f64) -> Self {
        Self { value, deriv }
    }

    pub fn constant(value: f64) -> Self {
        Self { value, deriv: 0.0 }
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(s * self.value, s * self.deriv)
    }

    pub fn add(self, other: Jet) -> Self {
        Self::new(self.value + other.value, self.deriv + other.deriv)
    }

    pub fn mul(self, other: Jet) -> Self {
        Self::new(
            self.value * other.value,
            self.deriv * other.value + self.value * other.deriv,
        )
    }
}

/// True when `den` cannot be distinguished from zero given the magnitude of
/// the terms it was computed from.
pub(crate) fn is_pole(den: f64, scale: f64) -> bool {
    !den.is_finite() || den.abs() <= 8.0 * f64::EPSILON * scale.max(f64::MIN_POSITIVE)
}

fn check(x: f64, jet: Jet) -> Result<Jet> {
    if jet.value.is_finite() && jet.deriv.is_finite() {
        Ok(jet)
    } else {
        Err(Error::Pole { x })
    }
}

struct HypParts {
    num: f64,
    den: f64,
    /// Common factor divided out of `num` and `den`, so `h = scale / den`.
    scale: f64,
}

// B sinh u - cosh u = ((B-1) e^u - (B+1) e^-u)/2 and
// B cosh u - sinh u = ((B-1) e^u + (B+1) e^-u)/2, both scaled by e^-|u|.
// This form has no cancellation near B = +-1 and no overflow for large |u|.
fn hyperbolic_parts(x: f64, a: f64, b: f64, c: f64) -> Result<HypParts> {
    let u = c * (x - a);
    let scale = (-u.abs()).exp();
    let e2 = scale * scale;
    let (p, m) = if u >= 0.0 { (b - 1.0, (b + 1.0) * e2) } else { ((b - 1.0) * e2, b + 1.0) };
    let den = 0.5 * (p + m);
    if is_pole(den, 0.5 * (p.abs() + m.abs())) {
        return Err(Error::Pole { x });
    }
    Ok(HypParts { num: 0.5 * (p - m), den, scale })
}

fn trig_parts(x: f64, a: f64, b: f64, c: f64) -> Result<HypParts> {
    let u = c * (x - a);
    let (s, co) = u.sin_cos();
    let den = b * co - s;
    if is_pole(den, (b * co).abs() + s.abs()) {
        return Err(Error::Pole { x });
    }
    Ok(HypParts { num: b * s + co, den, scale: 1.0 })
}

/// `f+(x; A, B, c)` with derivative.
pub fn f_plus(x: f64, a: f64, b: f64, c: f64) -> Result<Jet> {
    let p = hyperbolic_parts(x, a, b, c)?;
    let f = p.num / p.den;
    // num' = c den, den' = c num
    check(x, Jet::new(f, c * (1.0 - f) * (1.0 + f)))
}

/// `h+(x; A, B, c)` with derivative.
pub fn h_plus(x: f64, a: f64, b: f64, c: f64) -> Result<Jet> {
    let p = hyperbolic_parts(x, a, b, c)?;
    let h = p.scale / p.den;
    check(x, Jet::new(h, -c * (p.num / p.den) * h))
}

/// `f-(x; A, B, c)` with derivative.
pub fn f_minus(x: f64, a: f64, b: f64, c: f64) -> Result<Jet> {
    let p = trig_parts(x, a, b, c)?;
    // num' = c (B cos - sin) = c den, den' = -c (B sin + cos) = -c num
    let deriv = c * (p.den * p.den + p.num * p.num) / (p.den * p.den);
    check(x, Jet::new(p.num / p.den, deriv))
}

/// `h-(x; A, B, c)` with derivative.
pub fn h_minus(x: f64, a: f64, b: f64, c: f64) -> Result<Jet> {
    let p = trig_parts(x, a, b, c)?;
    check(x, Jet::new(1.0 / p.den, c * p.num / (p.den * p.den)))
}

fn zero_den(x: f64, a: f64, b: f64) -> Result<f64> {
    let den = 1.0 + b * (x - a);
    if is_pole(den, 1.0 + (b * (x - a)).abs()) {
        return Err(Error::Pole { x });
    }
    Ok(den)
}

/// `f0(x; A, B)` with derivative.
pub fn f_zero(x: f64, a: f64, b: f64) -> Result<Jet> {
    let den = zero_den(x, a, b)?;
    check(x, Jet::new(1.0 / den, -b / (den * den)))
}

/// `h0(x; A, B)` with derivative.
pub fn h_zero(x: f64, a: f64, b: f64) -> Result<Jet> {
    let den = zero_den(x, a, b)?;
    let y = x - a;
    let num = 0.5 * b * y * y + y;
    let dnum = b * y + 1.0;
    check(x, Jet::new(num / den, (dnum * den - num * b) / (den * den)))
}

/// The `B -> Infinity` limit functions that replace `(f, h)` in each sign
/// class: `(tanh u, sech u)`, `(1/(x - A), (x - A)/2)` and `(tan u, sec u)`.
/// For the hyperbolic and trigonometric classes `h` is the limit of `B h`,
/// for the rational class `f` is the limit of `B f0`.
pub mod limit {
    use super::{check, is_pole, Jet};
    use crate::error::{Error, Result};

    pub fn f_plus(x: f64, a: f64, c: f64) -> Result<Jet> {
        let t = (c * (x - a)).tanh();
        check(x, Jet::new(t, c * (1.0 - t * t)))
    }

    pub fn h_plus(x: f64, a: f64, c: f64) -> Result<Jet> {
        let u = c * (x - a);
        let sech = 1.0 / u.cosh();
        check(x, Jet::new(sech, -c * sech * u.tanh()))
    }

    pub fn f_zero(x: f64, a: f64) -> Result<Jet> {
        let y = x - a;
        if is_pole(y, x.abs() + a.abs()) {
            return Err(Error::Pole { x });
        }
        check(x, Jet::new(1.0 / y, -1.0 / (y * y)))
    }

    pub fn h_zero(x: f64, a: f64) -> Result<Jet> {
        Ok(Jet::new(0.5 * (x - a), 0.5))
    }

    pub fn f_minus(x: f64, a: f64, c: f64) -> Result<Jet> {
        let u = c * (x - a);
        let (s, co) = u.sin_cos();
        if is_pole(co, 1.0) {
            return Err(Error::Pole { x });
        }
        check(x, Jet::new(s / co, c / (co * co)))
    }

    pub fn h_minus(x: f64, a: f64, c: f64) -> Result<Jet> {
        let u = c * (x - a);
        let (s, co) = u.sin_cos();
        if is_pole(co, 1.0) {
            return Err(Error::Pole { x });
        }
        check(x, Jet::new(1.0 / co, c * s / (co * co)))
    }
}
