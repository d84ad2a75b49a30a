//! Constant-coefficient Riccati equations.
//!
//! Covers the general solution of `y' = a - y^2` in each sign class of `a`,
//! the companion linear equation `y z + z' = b`, the cross-ratio
//! superposition of three particular solutions, the two linearizing changes
//! of variable and a solver for the resulting first-order linear problems.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::basis::{self, is_pole, Jet};
use crate::error::{Error, Result};

/// A real number or the explicit point at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    Infinity,
}

impl ExtendedReal {
    pub fn is_infinite(self) -> bool {
        matches!(self, ExtendedReal::Infinity)
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(v),
            ExtendedReal::Infinity => None,
        }
    }
}

impl From<f64> for ExtendedReal {
    fn from(v: f64) -> Self {
        ExtendedReal::Finite(v)
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(v) => write!(f, "{v}"),
            ExtendedReal::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtendedReal::Finite(v) => s.serialize_f64(*v),
            ExtendedReal::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) if v.is_finite() => Ok(ExtendedReal::Finite(v)),
            Raw::Num(_) => Err(serde::de::Error::custom("B must be finite or \"inf\"")),
            Raw::Str(s) if s == "inf" => Ok(ExtendedReal::Infinity),
            Raw::Str(s) => Err(serde::de::Error::custom(format!(
                "expected a number or \"inf\", got \"{s}\""
            ))),
        }
    }
}

/// `dy/dx = a2 y^2 + a1 y + a0` with constant coefficients and `a2 != 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstRiccati {
    a2: f64,
    a1: f64,
    a0: f64,
}

impl ConstRiccati {
    pub fn new(a2: f64, a1: f64, a0: f64) -> Result<Self> {
        if a2 == 0.0 || !a2.is_finite() {
            return Err(Error::InvalidParameter(
                "a2 must be nonzero (the equation would be linear)".into(),
            ));
        }
        if !a1.is_finite() || !a0.is_finite() {
            return Err(Error::InvalidParameter("coefficients must be finite".into()));
        }
        Ok(Self { a2, a1, a0 })
    }

    /// The equation `y^2 + y' = a`, i.e. `y' = -y^2 + a`.
    pub fn shifted_square(a: f64) -> Self {
        Self { a2: -1.0, a1: 0.0, a0: a }
    }

    pub fn a2(&self) -> f64 {
        self.a2
    }
    pub fn a1(&self) -> f64 {
        self.a1
    }
    pub fn a0(&self) -> f64 {
        self.a0
    }

    /// Right-hand side `a2 y^2 + a1 y + a0`.
    pub fn rhs(&self, y: f64) -> f64 {
        (self.a2 * y + self.a1) * y + self.a0
    }
}

pub fn discriminant(eq: &ConstRiccati) -> f64 {
    eq.a1 * eq.a1 - 4.0 * eq.a0 * eq.a2
}

/// Real roots of `a2 y^2 + a1 y + a0 = 0`, ascending.
pub fn constant_solutions(eq: &ConstRiccati) -> Vec<f64> {
    let delta = discriminant(eq);
    if delta < 0.0 {
        return Vec::new();
    }
    if delta == 0.0 {
        return vec![-eq.a1 / (2.0 * eq.a2)];
    }
    // q = -(a1 + sgn(a1) sqrt(delta)) / 2 avoids cancellation
    let sgn = if eq.a1 >= 0.0 { 1.0 } else { -1.0 };
    let q = -0.5 * (eq.a1 + sgn * delta.sqrt());
    let (r1, r2) = (q / eq.a2, eq.a0 / q);
    let mut roots = vec![r1, r2];
    roots.sort_by(f64::total_cmp);
    roots
}

/// A real function of one variable with a closed-form derivative.
pub trait RealFn: Send + Sync {
    fn value(&self, x: f64) -> Result<f64>;
    fn derivative(&self, x: f64) -> Result<f64>;

    fn jet(&self, x: f64) -> Result<Jet> {
        Ok(Jet::new(self.value(x)?, self.derivative(x)?))
    }

    /// `Some(c)` when the function is known to be identically `c`.
    fn constant_value(&self) -> Option<f64> {
        None
    }
}

/// The constant function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constant(pub f64);

impl RealFn for Constant {
    fn value(&self, _x: f64) -> Result<f64> {
        Ok(self.0)
    }
    fn derivative(&self, _x: f64) -> Result<f64> {
        Ok(0.0)
    }
    fn constant_value(&self) -> Option<f64> {
        Some(self.0)
    }
}

/// A function assembled from a value closure and a derivative closure.
pub struct FnPair<F, G> {
    pub value: F,
    pub derivative: G,
}

impl<F, G> RealFn for FnPair<F, G>
where
    F: Fn(f64) -> f64 + Send + Sync,
    G: Fn(f64) -> f64 + Send + Sync,
{
    fn value(&self, x: f64) -> Result<f64> {
        finite(x, (self.value)(x))
    }
    fn derivative(&self, x: f64) -> Result<f64> {
        finite(x, (self.derivative)(x))
    }
}

fn finite(x: f64, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Pole { x })
    }
}

/// Qualitative regime of `y^2 + y' = a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SignClass {
    /// `a = c^2 > 0`, hyperbolic solutions.
    PositiveA { c: f64 },
    /// `a = 0`, rational solutions.
    ZeroA,
    /// `a = -c^2 < 0`, trigonometric solutions.
    NegativeA { c: f64 },
}

impl SignClass {
    pub fn positive(c: f64) -> Result<Self> {
        Self::check_c(c).map(|c| SignClass::PositiveA { c })
    }

    pub fn negative(c: f64) -> Result<Self> {
        Self::check_c(c).map(|c| SignClass::NegativeA { c })
    }

    fn check_c(c: f64) -> Result<f64> {
        if c > 0.0 && c.is_finite() {
            Ok(c)
        } else {
            Err(Error::InvalidParameter(format!("c must be > 0, got {c}")))
        }
    }

    /// Sign class of a given `a`.
    pub fn from_a(a: f64) -> Self {
        if a > 0.0 {
            SignClass::PositiveA { c: a.sqrt() }
        } else if a < 0.0 {
            SignClass::NegativeA { c: (-a).sqrt() }
        } else {
            SignClass::ZeroA
        }
    }

    pub fn a(&self) -> f64 {
        match *self {
            SignClass::PositiveA { c } => c * c,
            SignClass::ZeroA => 0.0,
            SignClass::NegativeA { c } => -c * c,
        }
    }

    pub fn c(&self) -> Option<f64> {
        match *self {
            SignClass::PositiveA { c } | SignClass::NegativeA { c } => Some(c),
            SignClass::ZeroA => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SignClass::PositiveA { c } | SignClass::NegativeA { c } => Self::check_c(c).map(|_| ()),
            SignClass::ZeroA => Ok(()),
        }
    }
}

/// The pair of basis functions `(f, h)` attached to a sign class and
/// selector, evaluated at one point.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BasisPair {
    pub f: Jet,
    pub h: Jet,
}

/// Constant in the basis identities: `B^2 - 1`, `B` or `B^2 + 1` for a
/// finite selector and `1` in the limit basis.
pub(crate) fn basis_kappa(sign: SignClass, selector: ExtendedReal) -> f64 {
    match (sign, selector) {
        (_, ExtendedReal::Infinity) => 1.0,
        (SignClass::PositiveA { .. }, ExtendedReal::Finite(b)) => b * b - 1.0,
        (SignClass::ZeroA, ExtendedReal::Finite(b)) => b,
        (SignClass::NegativeA { .. }, ExtendedReal::Finite(b)) => b * b + 1.0,
    }
}

pub(crate) fn basis_pair(sign: SignClass, center: f64, selector: ExtendedReal, x: f64) -> Result<BasisPair> {
    let a = center;
    Ok(match (sign, selector) {
        (SignClass::PositiveA { c }, ExtendedReal::Finite(b)) => BasisPair {
            f: basis::f_plus(x, a, b, c)?,
            h: basis::h_plus(x, a, b, c)?,
        },
        (SignClass::PositiveA { c }, ExtendedReal::Infinity) => BasisPair {
            f: basis::limit::f_plus(x, a, c)?,
            h: basis::limit::h_plus(x, a, c)?,
        },
        (SignClass::ZeroA, ExtendedReal::Finite(b)) => BasisPair {
            f: basis::f_zero(x, a, b)?,
            h: basis::h_zero(x, a, b)?,
        },
        (SignClass::ZeroA, ExtendedReal::Infinity) => BasisPair {
            f: basis::limit::f_zero(x, a)?,
            h: basis::limit::h_zero(x, a)?,
        },
        (SignClass::NegativeA { c }, ExtendedReal::Finite(b)) => BasisPair {
            f: basis::f_minus(x, a, b, c)?,
            h: basis::h_minus(x, a, b, c)?,
        },
        (SignClass::NegativeA { c }, ExtendedReal::Infinity) => BasisPair {
            f: basis::limit::f_minus(x, a, c)?,
            h: basis::limit::h_minus(x, a, c)?,
        },
    })
}

/// Denominator zeros of the closed forms for `(sign, A, B)` inside the open
/// window `(lo, hi)`, ascending.
pub(crate) fn closed_form_poles(sign: SignClass, center: f64, selector: ExtendedReal, lo: f64, hi: f64) -> Vec<f64> {
    let mut poles = Vec::new();
    match (sign, selector) {
        (SignClass::PositiveA { .. }, ExtendedReal::Infinity) => {}
        (SignClass::PositiveA { c }, ExtendedReal::Finite(b)) => {
            if b.abs() < 1.0 {
                poles.push(center + b.atanh() / c);
            }
        }
        (SignClass::ZeroA, ExtendedReal::Infinity) => poles.push(center),
        (SignClass::ZeroA, ExtendedReal::Finite(b)) => {
            if b != 0.0 {
                poles.push(center - 1.0 / b);
            }
        }
        (SignClass::NegativeA { c }, sel) => {
            let phase = match sel {
                ExtendedReal::Finite(b) => b.atan(),
                ExtendedReal::Infinity => 0.5 * PI,
            };
            // u = phase + n pi
            let n_lo = ((c * (lo - center) - phase) / PI).floor() as i64 - 1;
            let n_hi = ((c * (hi - center) - phase) / PI).ceil() as i64 + 1;
            for n in n_lo..=n_hi {
                poles.push(center + (phase + n as f64 * PI) / c);
            }
        }
    }
    let mut out: Vec<f64> = poles
        .into_iter()
        .map(|p| polish_pole(sign, center, selector, p))
        .filter(|&p| p > lo && p < hi)
        .collect();
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// One Newton step on the denominator.
fn polish_pole(sign: SignClass, center: f64, selector: ExtendedReal, x: f64) -> f64 {
    let (den, dden) = match (sign, selector) {
        (SignClass::PositiveA { c }, ExtendedReal::Finite(b)) => {
            let u = c * (x - center);
            (b * u.cosh() - u.sinh(), c * (b * u.sinh() - u.cosh()))
        }
        (SignClass::NegativeA { c }, ExtendedReal::Finite(b)) => {
            let u = c * (x - center);
            let (s, co) = u.sin_cos();
            (b * co - s, -c * (b * s + co))
        }
        (SignClass::NegativeA { c }, ExtendedReal::Infinity) => {
            let u = c * (x - center);
            (u.cos(), -c * u.sin())
        }
        // rational denominators are linear; the closed form is exact
        _ => return x,
    };
    if dden != 0.0 && dden.is_finite() {
        x - den / dden
    } else {
        x
    }
}

/// General solution of `y^2 + y' = a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiccatiSolution {
    pub sign_class: SignClass,
    /// Translation constant `A`.
    pub center: f64,
    /// Selection constant `B`.
    pub selector: ExtendedReal,
}

pub fn general_solution(a: f64, center: f64, selector: ExtendedReal) -> RiccatiSolution {
    RiccatiSolution {
        sign_class: SignClass::from_a(a),
        center,
        selector,
    }
}

impl RiccatiSolution {
    pub fn new(sign_class: SignClass, center: f64, selector: ExtendedReal) -> Result<Self> {
        sign_class.validate()?;
        Ok(Self { sign_class, center, selector })
    }

    pub fn a(&self) -> f64 {
        self.sign_class.a()
    }

    pub fn eval_jet(&self, x: f64) -> Result<Jet> {
        let p = basis_pair(self.sign_class, self.center, self.selector, x)?;
        Ok(match self.sign_class {
            SignClass::PositiveA { c } => p.f.scale(c),
            SignClass::ZeroA => match self.selector {
                ExtendedReal::Finite(b) => p.f.scale(b),
                ExtendedReal::Infinity => p.f,
            },
            SignClass::NegativeA { c } => p.f.scale(-c),
        })
    }

    /// Poles inside the open window `(lo, hi)`.
    pub fn poles(&self, lo: f64, hi: f64) -> Vec<f64> {
        closed_form_poles(self.sign_class, self.center, self.selector, lo, hi)
    }
}

impl RealFn for RiccatiSolution {
    fn value(&self, x: f64) -> Result<f64> {
        Ok(self.eval_jet(x)?.value)
    }
    fn derivative(&self, x: f64) -> Result<f64> {
        Ok(self.eval_jet(x)?.deriv)
    }
    fn jet(&self, x: f64) -> Result<Jet> {
        self.eval_jet(x)
    }
    fn constant_value(&self) -> Option<f64> {
        match (self.sign_class, self.selector) {
            (SignClass::PositiveA { c }, ExtendedReal::Finite(b)) if b == 1.0 => Some(-c),
            (SignClass::PositiveA { c }, ExtendedReal::Finite(b)) if b == -1.0 => Some(c),
            (SignClass::ZeroA, ExtendedReal::Finite(b)) if b == 0.0 => Some(0.0),
            _ => None,
        }
    }
}

/// Solution of `y z + z' = b` for a general solution `y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZSolution {
    pub y: RiccatiSolution,
    pub forcing: f64,
    /// Integration constant `D`. In the `B = Infinity` limit it multiplies
    /// the limit basis function (`sech`, `1/(x - A)` or `sec`).
    pub amplitude: f64,
}

/// Closed-form `z` with `y z + z' = b`.
pub fn solve_z(b: f64, y: &RiccatiSolution, d: f64) -> ZSolution {
    ZSolution { y: *y, forcing: b, amplitude: d }
}

impl ZSolution {
    pub fn eval_jet(&self, x: f64) -> Result<Jet> {
        let y = &self.y;
        let p = basis_pair(y.sign_class, y.center, y.selector, x)?;
        let (b, d) = (self.forcing, self.amplitude);
        Ok(match y.sign_class {
            SignClass::PositiveA { c } | SignClass::NegativeA { c } => {
                p.f.scale(b / c).add(p.h.scale(d))
            }
            SignClass::ZeroA => p.h.scale(b).add(p.f.scale(d)),
        })
    }
}

impl RealFn for ZSolution {
    fn value(&self, x: f64) -> Result<f64> {
        Ok(self.eval_jet(x)?.value)
    }
    fn derivative(&self, x: f64) -> Result<f64> {
        Ok(self.eval_jet(x)?.deriv)
    }
    fn jet(&self, x: f64) -> Result<Jet> {
        self.eval_jet(x)
    }
    fn constant_value(&self) -> Option<f64> {
        (self.forcing == 0.0 && self.amplitude == 0.0).then_some(0.0)
    }
}

/// Cross-ratio superposition of three particular solutions of one Riccati
/// equation with constant `k`.
pub struct Superposition<Y1, Y2, Y3> {
    pub y1: Y1,
    pub y2: Y2,
    pub y3: Y3,
    pub k: ExtendedReal,
}

pub fn superpose<Y1, Y2, Y3>(y1: Y1, y2: Y2, y3: Y3, k: ExtendedReal) -> Superposition<Y1, Y2, Y3>
where
    Y1: RealFn,
    Y2: RealFn,
    Y3: RealFn,
{
    Superposition { y1, y2, y3, k }
}

impl<Y1: RealFn, Y2: RealFn, Y3: RealFn> Superposition<Y1, Y2, Y3> {
    fn eval(&self, x: f64) -> Result<Jet> {
        let k = match self.k {
            ExtendedReal::Infinity => return self.y2.jet(x),
            ExtendedReal::Finite(k) => k,
        };
        let (p, q, r) = (self.y1.jet(x)?, self.y2.jet(x)?, self.y3.jet(x)?);
        let num = q.value * (r.value - p.value) * k + p.value * (q.value - r.value);
        let den = (r.value - p.value) * k + q.value - r.value;
        let scale = ((r.value - p.value) * k).abs() + q.value.abs() + r.value.abs();
        if is_pole(den, scale) {
            return Err(Error::Pole { x });
        }
        let dnum = k * (q.deriv * (r.value - p.value) + q.value * (r.deriv - p.deriv))
            + p.deriv * (q.value - r.value)
            + p.value * (q.deriv - r.deriv);
        let dden = k * (r.deriv - p.deriv) + q.deriv - r.deriv;
        Ok(Jet::new(num / den, (dnum * den - num * dden) / (den * den)))
    }
}

impl<Y1: RealFn, Y2: RealFn, Y3: RealFn> RealFn for Superposition<Y1, Y2, Y3> {
    fn value(&self, x: f64) -> Result<f64> {
        Ok(self.eval(x)?.value)
    }
    fn derivative(&self, x: f64) -> Result<f64> {
        Ok(self.eval(x)?.deriv)
    }
    fn jet(&self, x: f64) -> Result<Jet> {
        self.eval(x)
    }
}

type CoeffFn = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;

/// A coefficient of a linear first-order equation.
#[derive(Clone)]
pub enum Coeff {
    Const(f64),
    Func(CoeffFn),
}

impl Coeff {
    pub fn func(f: impl Fn(f64) -> Result<f64> + Send + Sync + 'static) -> Self {
        Coeff::Func(Arc::new(f))
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        match self {
            Coeff::Const(v) => Ok(*v),
            Coeff::Func(f) => f(x),
        }
    }

    pub fn as_const(&self) -> Option<f64> {
        match self {
            Coeff::Const(v) => Some(*v),
            Coeff::Func(_) => None,
        }
    }
}

impl fmt::Debug for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coeff::Const(v) => write!(f, "Const({v})"),
            Coeff::Func(_) => f.write_str("Func(..)"),
        }
    }
}

/// `v' = a(x) v + b(x)` with integration constant `E`.
#[derive(Debug, Clone)]
pub struct LinearFirstOrderProblem {
    pub coeff_a: Coeff,
    pub coeff_b: Coeff,
    pub e: f64,
}

impl LinearFirstOrderProblem {
    pub fn with_constant(mut self, e: f64) -> Self {
        self.e = e;
        self
    }
}

/// Change of variable `u = 1/(y1 - y)`: `u' = -(2 a2 y1 + a1) u + a2`.
pub fn reduce_standard(eq: &ConstRiccati, y1: Arc<dyn RealFn>) -> LinearFirstOrderProblem {
    let (a2, a1) = (eq.a2, eq.a1);
    let coeff_a = match y1.constant_value() {
        Some(v) => Coeff::Const(-(2.0 * a2 * v + a1)),
        None => Coeff::func(move |x| Ok(-(2.0 * a2 * y1.value(x)? + a1))),
    };
    LinearFirstOrderProblem { coeff_a, coeff_b: Coeff::Const(a2), e: 0.0 }
}

/// Inverse of the standard change: `y = y1 - 1/u`.
pub fn invert_standard(y1: f64, u: f64) -> f64 {
    y1 - 1.0 / u
}

/// Change of variable `u = y y1 / (y1 - y)`: `u' = (2 a0 / y1 + a1) u + a0`.
///
/// `y1` must not vanish on `domain`; it is sampled densely to check.
pub fn reduce_alternative(
    eq: &ConstRiccati,
    y1: Arc<dyn RealFn>,
    domain: (f64, f64),
) -> Result<LinearFirstOrderProblem> {
    let (a0, a1) = (eq.a0, eq.a1);
    if let Some(v) = y1.constant_value() {
        if v == 0.0 {
            return Err(Error::InvalidParameter("y1 vanishes identically".into()));
        }
        return Ok(LinearFirstOrderProblem {
            coeff_a: Coeff::Const(2.0 * a0 / v + a1),
            coeff_b: Coeff::Const(a0),
            e: 0.0,
        });
    }
    let (lo, hi) = domain;
    const SAMPLES: usize = 2048;
    let mut prev: Option<f64> = None;
    for i in 0..=SAMPLES {
        let x = lo + (hi - lo) * i as f64 / SAMPLES as f64;
        let v = y1.value(x)?;
        if v == 0.0 || prev.is_some_and(|p| p.signum() != v.signum()) {
            return Err(Error::InvalidParameter(format!(
                "y1 has a zero in [{lo}, {hi}] near x = {x}"
            )));
        }
        prev = Some(v);
    }
    let coeff_a = if a0 == 0.0 {
        Coeff::Const(a1)
    } else {
        Coeff::func(move |x| Ok(2.0 * a0 / y1.value(x)? + a1))
    };
    Ok(LinearFirstOrderProblem { coeff_a, coeff_b: Coeff::Const(a0), e: 0.0 })
}

/// Inverse of the alternative change: `y = u y1 / (u + y1)`.
pub fn invert_alternative(y1: f64, u: f64) -> f64 {
    u * y1 / (u + y1)
}

/// Panels used by the quadrature path of [`LinearSolution`].
pub const LINEAR_QUADRATURE_PANELS: usize = 10_000;

/// Solution of a [`LinearFirstOrderProblem`] anchored at `x0`, so that
/// `v(x0) = E`.
#[derive(Debug, Clone)]
pub struct LinearSolution {
    problem: LinearFirstOrderProblem,
    x0: f64,
    panels: usize,
}

pub fn solve_linear_first_order(p: LinearFirstOrderProblem, x0: f64) -> LinearSolution {
    LinearSolution { problem: p, x0, panels: LINEAR_QUADRATURE_PANELS }
}

impl LinearSolution {
    pub fn with_panels(mut self, panels: usize) -> Self {
        self.panels = panels.max(2) + panels % 2;
        self
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        let p = &self.problem;
        let dx = x - self.x0;
        if let (Some(a), Some(b)) = (p.coeff_a.as_const(), p.coeff_b.as_const()) {
            // v = E e^{a dx} + b (e^{a dx} - 1) / a
            if a == 0.0 {
                return Ok(p.e + b * dx);
            }
            let g = (a * dx).exp_m1();
            return Ok(p.e * (1.0 + g) + b * g / a);
        }
        if dx == 0.0 {
            return Ok(p.e);
        }
        let n = self.panels;
        let h = dx / n as f64;
        let mut a_vals = Vec::with_capacity(n + 1);
        let mut b_vals = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let xi = self.x0 + h * i as f64;
            a_vals.push(p.coeff_a.eval(xi)?);
            b_vals.push(p.coeff_b.eval(xi)?);
        }
        let big_a = crate::numerics::cumulative_integral(&a_vals, h, 0);
        let integrand: Vec<f64> = b_vals
            .iter()
            .zip(&big_a)
            .map(|(b, ia)| b * (-ia).exp())
            .collect();
        let outer = crate::numerics::simpson(&integrand, h);
        let ia_end = big_a[n];
        Ok((outer + p.e) * ia_end.exp())
    }

    /// `v'(x) = a(x) v(x) + b(x)`.
    pub fn derivative(&self, x: f64) -> Result<f64> {
        let v = self.value(x)?;
        Ok(self.problem.coeff_a.eval(x)? * v + self.problem.coeff_b.eval(x)?)
    }
}

/// Residual `y' + y^2 - a` of a solution of `y^2 + y' = a`.
pub fn riccati_residual(y: &dyn RealFn, a: f64, x: f64) -> Result<f64> {
    let j = y.jet(x)?;
    Ok(j.deriv + j.value * j.value - a)
}

/// Residual `y z + z' - b`.
pub fn z_residual(y: &dyn RealFn, z: &dyn RealFn, b: f64, x: f64) -> Result<f64> {
    let (jy, jz) = (y.jet(x)?, z.jet(x)?);
    Ok(jy.value * jz.value + jz.deriv - b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discriminant_examples() {
        assert_eq!(discriminant(&ConstRiccati::shifted_square(1.0)), 4.0);
        assert_eq!(discriminant(&ConstRiccati::new(-1.0, 0.0, 0.0).unwrap()), 0.0);
        assert_eq!(discriminant(&ConstRiccati::new(1.0, 2.0, 1.0).unwrap()), 0.0);
    }

    #[test]
    fn linear_equation_rejected() {
        assert!(ConstRiccati::new(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn constant_solution_examples() {
        assert_eq!(constant_solutions(&ConstRiccati::shifted_square(1.0)), vec![-1.0, 1.0]);
        assert!(constant_solutions(&ConstRiccati::shifted_square(-1.0)).is_empty());
        assert_eq!(constant_solutions(&ConstRiccati::new(1.0, -2.0, 1.0).unwrap()), vec![1.0]);
        let r = constant_solutions(&ConstRiccati::new(2.0, 3.0, -5.0).unwrap());
        assert!((r[0] + 2.5).abs() < 1e-15 && (r[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn general_solution_examples() {
        let y = general_solution(1.0, 0.0, ExtendedReal::Infinity);
        let t = general_solution(-1.0, 0.0, ExtendedReal::Infinity);
        let z = general_solution(0.0, 0.0, ExtendedReal::Finite(0.0));
        for &x in &[-1.1, -0.3, 0.0, 0.4, 1.2] {
            assert!((y.value(x).unwrap() - x.tanh()).abs() < 1e-15);
            assert!((t.value(x).unwrap() + x.tan()).abs() < 1e-14);
            assert_eq!(z.value(x).unwrap(), 0.0);
        }
    }

    #[test]
    fn superposition_specializations() {
        let y1 = general_solution(1.0, 0.0, ExtendedReal::Infinity);
        for (k, expect) in [(ExtendedReal::Finite(0.0), 0), (ExtendedReal::Finite(1.0), 2), (ExtendedReal::Infinity, 1)] {
            let s = superpose(y1, Constant(1.0), Constant(-1.0), k);
            for &x in &[-2.0f64, -0.5, 0.7, 1.9] {
                let want = [x.tanh(), 1.0, -1.0][expect];
                assert!((s.value(x).unwrap() - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn superposition_rejects_coincident_inputs() {
        let s = superpose(Constant(1.0), Constant(1.0), Constant(1.0), ExtendedReal::Finite(0.5));
        assert!(matches!(s.value(0.0), Err(Error::Pole { .. })));
    }

    #[test]
    fn standard_reduction_examples() {
        let eq = ConstRiccati::shifted_square(1.0);
        let p = reduce_standard(&eq, Arc::new(Constant(1.0)));
        assert_eq!(p.coeff_a.as_const(), Some(2.0));
        assert_eq!(p.coeff_b.as_const(), Some(-1.0));

        let eq0 = ConstRiccati::new(-1.0, 0.0, 0.0).unwrap();
        let p = reduce_standard(&eq0, Arc::new(Constant(0.0)));
        assert_eq!((p.coeff_a.as_const(), p.coeff_b.as_const()), (Some(0.0), Some(-1.0)));

        let eq1 = ConstRiccati::new(1.0, 0.0, 0.0).unwrap();
        let p = reduce_standard(&eq1, Arc::new(Constant(0.0)));
        assert_eq!((p.coeff_a.as_const(), p.coeff_b.as_const()), (Some(0.0), Some(1.0)));
    }

    #[test]
    fn standard_reduction_round_trip_constant() {
        // u' = 2u - 1 with u(0) = E maps back through y = 1 - 1/u
        let eq = ConstRiccati::shifted_square(1.0);
        let p = reduce_standard(&eq, Arc::new(Constant(1.0))).with_constant(2.0);
        let sol = solve_linear_first_order(p, 0.0);
        for &x in &[-0.5, 0.0, 0.3, 1.0] {
            let u = sol.value(x).unwrap();
            let du = sol.derivative(x).unwrap();
            let y = invert_standard(1.0, u);
            let dy = du / (u * u);
            assert!((dy + y * y - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn alternative_reduction_examples() {
        let eq = ConstRiccati::shifted_square(1.0);
        let p = reduce_alternative(&eq, Arc::new(Constant(1.0)), (0.0, 1.0)).unwrap();
        assert_eq!((p.coeff_a.as_const(), p.coeff_b.as_const()), (Some(2.0), Some(1.0)));

        let eq0 = ConstRiccati::new(-1.0, 0.0, 0.0).unwrap();
        let y1 = general_solution(0.0, 0.0, ExtendedReal::Infinity);
        let p = reduce_alternative(&eq0, Arc::new(y1), (0.5, 3.0)).unwrap();
        assert_eq!((p.coeff_a.as_const(), p.coeff_b.as_const()), (Some(0.0), Some(0.0)));

        let eq2 = ConstRiccati::new(1.0, 3.0, 0.0).unwrap();
        let p = reduce_alternative(&eq2, Arc::new(Constant(-3.0)), (0.0, 1.0)).unwrap();
        assert_eq!(p.coeff_a.as_const(), Some(3.0));
    }

    #[test]
    fn alternative_reduction_rejects_zero() {
        let eq = ConstRiccati::shifted_square(1.0);
        let tanh = general_solution(1.0, 0.0, ExtendedReal::Infinity);
        assert!(reduce_alternative(&eq, Arc::new(tanh), (-1.0, 1.0)).is_err());
        assert!(reduce_alternative(&eq, Arc::new(tanh), (0.1, 1.0)).is_ok());
    }

    #[test]
    fn linear_solver_trivial_cases() {
        let p = LinearFirstOrderProblem { coeff_a: Coeff::Const(0.0), coeff_b: Coeff::Const(1.0), e: 0.0 };
        let s = solve_linear_first_order(p, 0.0);
        assert!((s.value(2.5).unwrap() - 2.5).abs() < 1e-15);

        let p = LinearFirstOrderProblem { coeff_a: Coeff::Const(1.0), coeff_b: Coeff::Const(0.0), e: 1.0 };
        let s = solve_linear_first_order(p, 0.0);
        assert!((s.value(1.3).unwrap() - 1.3f64.exp()).abs() < 1e-14);
    }

    #[test]
    fn quadrature_path_matches_closed_form() {
        let closed = LinearFirstOrderProblem { coeff_a: Coeff::Const(2.0), coeff_b: Coeff::Const(-1.0), e: 1.0 };
        let quad = LinearFirstOrderProblem {
            coeff_a: Coeff::func(|_| Ok(2.0)),
            coeff_b: Coeff::func(|_| Ok(-1.0)),
            e: 1.0,
        };
        let (s1, s2) = (solve_linear_first_order(closed, 0.0), solve_linear_first_order(quad, 0.0));
        for &x in &[-1.0, 0.25, 1.5] {
            let (a, b) = (s1.value(x).unwrap(), s2.value(x).unwrap());
            assert!((a - b).abs() < 1e-10 * a.abs().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn z_examples() {
        let y0 = general_solution(0.0, 0.0, ExtendedReal::Finite(0.0));
        let z = solve_z(1.5, &y0, 0.7);
        let zero = solve_z(0.0, &general_solution(-2.0, 0.3, ExtendedReal::Finite(0.4)), 0.0);
        let yt = general_solution(1.0, 0.0, ExtendedReal::Infinity);
        let zt = solve_z(0.8, &yt, -0.6);
        for &x in &[-1.0, 0.2, 0.9] {
            assert!((z.value(x).unwrap() - (1.5 * x + 0.7)).abs() < 1e-15);
            assert_eq!(zero.value(x).unwrap(), 0.0);
            let want = 0.8 * x.tanh() - 0.6 / x.cosh();
            assert!((zt.value(x).unwrap() - want).abs() < 1e-15);
        }
    }

    #[test]
    fn poles_of_trigonometric_solution() {
        let y = general_solution(-1.0, 0.0, ExtendedReal::Finite(0.0));
        let p = y.poles(-0.5, 3.5);
        assert_eq!(p.len(), 2);
        assert!(p[0].abs() < 1e-12 && (p[1] - PI).abs() < 1e-12);
    }

    #[test]
    fn extended_real_json() {
        let v: ExtendedReal = serde_json::from_str("\"inf\"").unwrap();
        assert_eq!(v, ExtendedReal::Infinity);
        let v: ExtendedReal = serde_json::from_str("-2.5").unwrap();
        assert_eq!(v, ExtendedReal::Finite(-2.5));
        assert!(serde_json::from_str::<ExtendedReal>("\"oo\"").is_err());
        assert_eq!(serde_json::to_string(&ExtendedReal::Infinity).unwrap(), "\"inf\"");
    }
}
