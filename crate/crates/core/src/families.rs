//! Shape-invariant superpotential families.
//!
//! `k1` solves `k1^2 + k1' = a` and `k0` solves `k1 k0 + k0' = b`. The
//! affine ansatz is `k(x, m) = k0 + m k1` with `L(m) = -a m^2 - 2 b m + t`;
//! the inverse-power ansatz is `k(x, m) = q/m + m k1` with
//! `L(m) = -a m^2 - q^2/m^2 + t`. In both cases `R(u) = L(u) - L(u + 1)`.
//!
//! The constant `D` is the amplitude of [`solve_z`]. With a finite selector
//! it multiplies `h` (or `f0` when `a = 0`); with `B = inf` it multiplies
//! the limit function (`sech`, `1/(x - A)` or `sec`).

use serde::{Deserialize, Serialize};

use crate::basis::Jet;
use crate::error::{Error, Result};
use crate::riccati::{solve_z, ExtendedReal, RealFn, RiccatiSolution, SignClass};

pub use crate::basis::{f_minus, f_plus, f_zero, h_minus, h_plus, h_zero};

/// Constants of a family. `t` only shifts `L` and `d` only shifts both
/// potentials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyParams {
    pub sign: SignClass,
    /// `A`, translation.
    pub center: f64,
    /// `B`, selects the member of the general Riccati solution.
    pub selector: ExtendedReal,
    /// `b`, forcing of the `k0` equation.
    pub forcing: f64,
    /// `D`, integration constant of `k0`.
    pub amplitude: f64,
    pub q: f64,
    pub t: f64,
    /// Energy reference.
    pub d: f64,
}

impl FamilyParams {
    pub fn new(sign: SignClass, center: f64, selector: ExtendedReal) -> Self {
        Self { sign, center, selector, forcing: 0.0, amplitude: 0.0, q: 0.0, t: 0.0, d: 0.0 }
    }

    pub fn riccati(&self) -> RiccatiSolution {
        RiccatiSolution { sign_class: self.sign, center: self.center, selector: self.selector }
    }

    /// `k1` is constant (`B = +-1` with `a > 0`, `B = 0` with `a = 0`).
    pub fn k1_is_constant(&self) -> bool {
        self.riccati().constant_value().is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    /// `k = k0 + m k1`.
    Affine,
    /// `k = q/m + m k1`.
    #[serde(rename = "inverse")]
    InversePower,
}

/// `k1` with its derivative.
pub fn k1(x: f64, p: &FamilyParams) -> Result<Jet> {
    p.riccati().eval_jet(x)
}

/// `k0` with its derivative.
pub fn k0(x: f64, p: &FamilyParams) -> Result<Jet> {
    solve_z(p.forcing, &p.riccati(), p.amplitude).eval_jet(x)
}

/// A validated family: constants plus ansatz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Family {
    params: FamilyParams,
    kind: FamilyKind,
}

impl Family {
    pub fn new(params: FamilyParams, kind: FamilyKind) -> Result<Self> {
        params.sign.validate()?;
        let finite = [params.center, params.forcing, params.amplitude, params.q, params.t, params.d];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("family constants must be finite".into()));
        }
        if let ExtendedReal::Finite(b) = params.selector {
            if !b.is_finite() {
                return Err(Error::InvalidParameter("B must be finite or inf".into()));
            }
        }
        if kind == FamilyKind::InversePower && params.q == 0.0 {
            return Err(Error::InvalidParameter("inverse-power families need q != 0".into()));
        }
        Ok(Self { params, kind })
    }

    pub fn params(&self) -> &FamilyParams {
        &self.params
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn a(&self) -> f64 {
        self.params.sign.a()
    }

    /// Inverse-power member whose `k1` is constant: it reduces to a trivial
    /// `x`-independent superpotential.
    pub fn is_trivial(&self) -> bool {
        self.kind == FamilyKind::InversePower && self.params.k1_is_constant()
    }

    /// Rejects the trivial inverse-power members.
    pub fn require_nontrivial(self) -> Result<Self> {
        if self.is_trivial() {
            return Err(Error::InvalidParameter(
                "inverse-power family with constant k1 is trivial".into(),
            ));
        }
        Ok(self)
    }

    fn check_m(&self, m: f64) -> Result<()> {
        if self.kind == FamilyKind::InversePower && m == 0.0 {
            return Err(Error::ZeroParameter);
        }
        Ok(())
    }

    /// `k(x, m)` with its x-derivative.
    pub fn k(&self, x: f64, m: f64) -> Result<Jet> {
        self.check_m(m)?;
        let k1 = k1(x, &self.params)?.scale(m);
        match self.kind {
            FamilyKind::Affine => Ok(k0(x, &self.params)?.add(k1)),
            FamilyKind::InversePower => Ok(k1.add(Jet::constant(self.params.q / m))),
        }
    }

    #[allow(non_snake_case)]
    pub fn L(&self, m: f64) -> Result<f64> {
        self.check_m(m)?;
        let a = self.a();
        let p = &self.params;
        Ok(match self.kind {
            FamilyKind::Affine => -a * m * m - 2.0 * p.forcing * m + p.t,
            FamilyKind::InversePower => -a * m * m - p.q * p.q / (m * m) + p.t,
        })
    }

    /// `R(u) = L(u) - L(u + 1)`.
    #[allow(non_snake_case)]
    pub fn R(&self, u: f64) -> Result<f64> {
        let a = self.a();
        let p = &self.params;
        match self.kind {
            // expanded so t cancels exactly
            FamilyKind::Affine => Ok(2.0 * (p.forcing + u * a) + a),
            FamilyKind::InversePower => {
                self.check_m(u)?;
                self.check_m(u + 1.0)?;
                let q2 = p.q * p.q;
                Ok(a * (2.0 * u + 1.0) + q2 / ((u + 1.0) * (u + 1.0)) - q2 / (u * u))
            }
        }
    }

    /// Denominator zeros of `k(., m)` in the open window, ascending.
    pub fn singularities(&self, _m: f64, lo: f64, hi: f64) -> Vec<f64> {
        self.params.riccati().poles(lo, hi)
    }

    /// Maximal open interval around `anchor` free of singularities, clipped
    /// to the window.
    pub fn natural_domain(&self, m: f64, anchor: f64, lo: f64, hi: f64) -> Result<(f64, f64)> {
        if !(lo < anchor && anchor < hi) {
            return Err(Error::InvalidParameter(format!(
                "anchor {anchor} outside window ({lo}, {hi})"
            )));
        }
        let poles = self.singularities(m, lo, hi);
        let scale = 1e-12 * (1.0 + anchor.abs());
        if poles.iter().any(|p| (p - anchor).abs() <= scale) {
            return Err(Error::Pole { x: anchor });
        }
        let left = poles.iter().copied().filter(|p| *p < anchor).fold(lo, f64::max);
        let right = poles.iter().copied().filter(|p| *p > anchor).fold(hi, f64::min);
        Ok((left, right))
    }

    pub fn descriptor(&self) -> FamilyDescriptor {
        FamilyDescriptor::from(self)
    }
}

/// The named limiting members.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    TypeA,
    TypeBReal,
    TypeC,
    TypeD,
    TypeE,
    TypeF,
    HyperbolicTanh,
    HyperbolicCoth,
}

/// Free constants filled into a preset. Slots a preset fixes are ignored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeConstants {
    pub c: f64,
    pub center: f64,
    pub forcing: f64,
    pub amplitude: f64,
    pub q: f64,
    pub t: f64,
    pub d: f64,
}

impl Default for FreeConstants {
    fn default() -> Self {
        Self { c: 1.0, center: 0.0, forcing: 0.0, amplitude: 0.0, q: 1.0, t: 0.0, d: 0.0 }
    }
}

impl Preset {
    pub const ALL: [Preset; 8] = [
        Preset::TypeA,
        Preset::TypeBReal,
        Preset::TypeC,
        Preset::TypeD,
        Preset::TypeE,
        Preset::TypeF,
        Preset::HyperbolicTanh,
        Preset::HyperbolicCoth,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::TypeA => "A",
            Preset::TypeBReal => "B_real",
            Preset::TypeC => "C",
            Preset::TypeD => "D",
            Preset::TypeE => "E",
            Preset::TypeF => "F",
            Preset::HyperbolicTanh => "HyperbolicTanh",
            Preset::HyperbolicCoth => "HyperbolicCoth",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(name) || p.long_name().eq_ignore_ascii_case(name))
            .ok_or_else(|| {
                let names: Vec<_> = Preset::ALL.iter().map(|p| p.name()).collect();
                Error::InvalidParameter(format!(
                    "unknown preset '{name}'; valid names: {}",
                    names.join(", ")
                ))
            })
    }

    fn long_name(self) -> &'static str {
        match self {
            Preset::TypeA => "TypeA",
            Preset::TypeBReal => "TypeB_real",
            Preset::TypeC => "TypeC",
            Preset::TypeD => "TypeD",
            Preset::TypeE => "TypeE",
            Preset::TypeF => "TypeF",
            p => p.name(),
        }
    }

    pub fn kind(self) -> FamilyKind {
        match self {
            Preset::TypeE | Preset::TypeF => FamilyKind::InversePower,
            _ => FamilyKind::Affine,
        }
    }

    pub fn sign_label(self) -> &'static str {
        match self {
            Preset::TypeA | Preset::TypeE => "neg",
            Preset::TypeC | Preset::TypeD | Preset::TypeF => "zero",
            Preset::TypeBReal | Preset::HyperbolicTanh | Preset::HyperbolicCoth => "pos",
        }
    }

    pub fn selector(self) -> ExtendedReal {
        match self {
            Preset::TypeA | Preset::TypeD | Preset::TypeE | Preset::HyperbolicCoth => {
                ExtendedReal::Finite(0.0)
            }
            Preset::TypeBReal => ExtendedReal::Finite(1.0),
            Preset::TypeC | Preset::TypeF | Preset::HyperbolicTanh => ExtendedReal::Infinity,
        }
    }

    /// Constants the user may set for this preset.
    pub fn free_slots(self) -> &'static [&'static str] {
        match self {
            Preset::TypeA | Preset::TypeBReal | Preset::HyperbolicTanh | Preset::HyperbolicCoth => {
                &["c", "A", "b", "D", "t", "d"]
            }
            Preset::TypeC | Preset::TypeD => &["A", "b", "D", "t", "d"],
            Preset::TypeE => &["c", "A", "q", "t", "d"],
            Preset::TypeF => &["A", "q", "t", "d"],
        }
    }

    pub fn family(self, free: &FreeConstants) -> Result<Family> {
        let sign = match self.sign_label() {
            "pos" => SignClass::positive(free.c)?,
            "neg" => SignClass::negative(free.c)?,
            _ => SignClass::ZeroA,
        };
        let inverse = self.kind() == FamilyKind::InversePower;
        let params = FamilyParams {
            sign,
            center: free.center,
            selector: self.selector(),
            forcing: if inverse { 0.0 } else { free.forcing },
            amplitude: if inverse { 0.0 } else { free.amplitude },
            q: if inverse { free.q } else { 0.0 },
            t: free.t,
            d: free.d,
        };
        Family::new(params, self.kind())
    }
}

/// JSON form of a family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct FamilyDescriptor {
    pub kind: FamilyKind,
    pub sign: SignLabel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default)]
    pub A: f64,
    #[serde(default = "finite_zero")]
    pub B: ExtendedReal,
    #[serde(default)]
    pub b: f64,
    #[serde(default)]
    pub D: f64,
    #[serde(default)]
    pub q: f64,
    #[serde(default)]
    pub t: f64,
    #[serde(default)]
    pub d: f64,
}

fn finite_zero() -> ExtendedReal {
    ExtendedReal::Finite(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignLabel {
    Pos,
    Zero,
    Neg,
}

impl From<&Family> for FamilyDescriptor {
    fn from(f: &Family) -> Self {
        let p = f.params;
        let (sign, c) = match p.sign {
            SignClass::PositiveA { c } => (SignLabel::Pos, Some(c)),
            SignClass::ZeroA => (SignLabel::Zero, None),
            SignClass::NegativeA { c } => (SignLabel::Neg, Some(c)),
        };
        FamilyDescriptor {
            kind: f.kind,
            sign,
            c,
            A: p.center,
            B: p.selector,
            b: p.forcing,
            D: p.amplitude,
            q: p.q,
            t: p.t,
            d: p.d,
        }
    }
}

impl FamilyDescriptor {
    pub fn to_family(&self) -> Result<Family> {
        let need_c = || {
            self.c.ok_or_else(|| Error::InvalidParameter("sign pos/neg requires c".into()))
        };
        let sign = match self.sign {
            SignLabel::Pos => SignClass::positive(need_c()?)?,
            SignLabel::Neg => SignClass::negative(need_c()?)?,
            SignLabel::Zero => SignClass::ZeroA,
        };
        let params = FamilyParams {
            sign,
            center: self.A,
            selector: self.B,
            forcing: self.b,
            amplitude: self.D,
            q: self.q,
            t: self.t,
            d: self.d,
        };
        Family::new(params, self.kind)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn fam(sign: SignClass, b_sel: ExtendedReal, kind: FamilyKind, b: f64, d: f64, q: f64) -> Family {
        let mut p = FamilyParams::new(sign, 0.0, b_sel);
        p.forcing = b;
        p.amplitude = d;
        p.q = q;
        Family::new(p, kind).unwrap()
    }

    #[test]
    fn building_block_centers() {
        assert!((f_plus(1.3, 1.3, 2.0, 0.7).unwrap().value + 0.5).abs() < 1e-15);
        assert_eq!(h_zero(0.4, 0.4, 3.0).unwrap().value, 0.0);
        assert!((f_minus(-2.0, -2.0, 4.0, 1.5).unwrap().value - 0.25).abs() < 1e-15);
    }

    #[test]
    fn k1_limits() {
        let pos = SignClass::positive(1.0).unwrap();
        let neg = SignClass::negative(1.0).unwrap();
        let tanh = FamilyParams::new(pos, 0.0, ExtendedReal::Infinity);
        let cot = FamilyParams::new(neg, 0.0, 0.0.into());
        let zero = FamilyParams::new(SignClass::ZeroA, 0.0, 0.0.into());
        for x in [-1.2, 0.3, 0.9, 2.5] {
            assert!((k1(x, &tanh).unwrap().value - x.tanh()).abs() < 1e-14);
            assert!((k1(x, &cot).unwrap().value - 1.0 / x.tan()).abs() < 1e-13);
            assert_eq!(k1(x, &zero).unwrap().value, 0.0);
        }
    }

    #[test]
    fn k0_limits() {
        let mut zero = FamilyParams::new(SignClass::ZeroA, 0.0, 0.0.into());
        zero.forcing = 1.5;
        zero.amplitude = -0.4;
        let mut neg = FamilyParams::new(SignClass::negative(1.0).unwrap(), 0.0, 0.0.into());
        neg.forcing = 0.8;
        neg.amplitude = 0.6;
        for x in [0.3, 0.9, 2.5] {
            assert!((k0(x, &zero).unwrap().value - (1.5 * x - 0.4)).abs() < 1e-14);
            // the sign of D is the solve_z convention: D multiplies h-
            let want = -0.8 / x.tan() - 0.6 / x.sin();
            assert!((k0(x, &neg).unwrap().value - want).abs() < 1e-13);
        }
        let mut none = neg;
        none.forcing = 0.0;
        none.amplitude = 0.0;
        assert_eq!(k0(1.0, &none).unwrap(), Jet::ZERO);
    }

    #[test]
    fn k_of_examples() {
        let d = fam(SignClass::ZeroA, 0.0.into(), FamilyKind::Affine, 1.0, 0.0, 0.0);
        assert!((d.k(0.7, 3.0).unwrap().value - 0.7).abs() < 1e-15);
        let e = fam(SignClass::negative(1.0).unwrap(), 0.0.into(), FamilyKind::InversePower, 0.0, 0.0, 2.0);
        let x = 0.8;
        assert!((e.k(x, 2.0).unwrap().value - (1.0 + 2.0 / x.tan())).abs() < 1e-14);
        assert_eq!(e.k(x, 0.0), Err(Error::ZeroParameter));
        let a = fam(SignClass::negative(1.0).unwrap(), 0.5.into(), FamilyKind::Affine, 0.3, 0.2, 0.0);
        assert_eq!(a.k(x, 0.0).unwrap(), k0(x, a.params()).unwrap());
    }

    #[test]
    fn l_and_r_examples() {
        let d = fam(SignClass::ZeroA, 0.0.into(), FamilyKind::Affine, 1.0, 0.0, 0.0);
        assert_eq!(d.L(2.5).unwrap(), -5.0);
        assert_eq!(d.R(1.7).unwrap(), 2.0);
        let a = fam(SignClass::negative(1.0).unwrap(), 0.0.into(), FamilyKind::Affine, 0.0, 0.0, 0.0);
        assert_eq!(a.L(3.0).unwrap(), 9.0);
        let f = fam(SignClass::ZeroA, ExtendedReal::Infinity, FamilyKind::InversePower, 0.0, 0.0, 1.0);
        assert_eq!(f.L(2.0).unwrap(), -0.25);
        assert!((f.R(2.0).unwrap() - (1.0 / 9.0 - 0.25)).abs() < 1e-15);
        assert_eq!(f.L(0.0), Err(Error::ZeroParameter));
        let c = 0.7;
        let pos = fam(SignClass::positive(c).unwrap(), 2.0.into(), FamilyKind::Affine, 0.4, 0.0, 0.0);
        let m = 1.3;
        assert!((pos.R(m).unwrap() - (2.0 * (0.4 + m * c * c) + c * c)).abs() < 1e-14);
        for fam in [d, a, f, pos] {
            for m in [1.0, 2.5, 3.7] {
                let l = fam.L(m).unwrap() - fam.L(m + 1.0).unwrap();
                assert!((fam.R(m).unwrap() - l).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn r_is_independent_of_t() {
        let mut p = FamilyParams::new(SignClass::positive(1.2).unwrap(), 0.1, 0.4.into());
        p.q = 0.9;
        p.forcing = 0.3;
        for kind in [FamilyKind::Affine, FamilyKind::InversePower] {
            let f1 = Family::new(p, kind).unwrap();
            let f2 = Family::new(FamilyParams { t: p.t + 17.3, ..p }, kind).unwrap();
            for m in [1.0, 2.2, 4.5] {
                assert_eq!(f1.R(m).unwrap(), f2.R(m).unwrap());
            }
        }
    }

    #[test]
    fn singularity_examples() {
        let a = fam(SignClass::negative(1.0).unwrap(), 0.0.into(), FamilyKind::Affine, 0.0, 0.0, 0.0);
        let s = a.singularities(2.0, -0.5, 3.5);
        assert_eq!(s.len(), 2);
        assert!(s[0].abs() < 1e-12 && (s[1] - PI).abs() < 1e-12);
        let z = fam(SignClass::ZeroA, 1.0.into(), FamilyKind::Affine, 0.0, 0.0, 0.0);
        assert_eq!(z.singularities(1.0, -3.0, 3.0), vec![-1.0]);
        let p = fam(SignClass::positive(1.0).unwrap(), 2.0.into(), FamilyKind::Affine, 0.0, 0.0, 0.0);
        assert!(p.singularities(1.0, -3.0, 3.0).is_empty());
        // dense sampling confirms no sign change of B cosh - sinh
        assert!((0..=6000).all(|i| {
            let u = -3.0 + i as f64 * 1e-3;
            2.0 * u.cosh() - u.sinh() > 0.0
        }));
        let p = fam(SignClass::positive(2.0).unwrap(), 0.5.into(), FamilyKind::Affine, 0.0, 0.0, 0.0);
        let s = p.singularities(1.0, -3.0, 3.0);
        assert_eq!(s.len(), 1);
        assert!((s[0] - 0.5f64.atanh() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn natural_domain_examples() {
        let a = Preset::TypeA.family(&FreeConstants::default()).unwrap();
        let (l, r) = a.natural_domain(2.0, FRAC_PI_2, -10.0, 10.0).unwrap();
        assert!(l.abs() < 1e-12 && (r - PI).abs() < 1e-12);
        let d = Preset::TypeD.family(&FreeConstants { forcing: 1.0, ..Default::default() }).unwrap();
        assert_eq!(d.natural_domain(1.0, 0.0, -10.0, 10.0).unwrap(), (-10.0, 10.0));
        let z = fam(SignClass::ZeroA, 1.0.into(), FamilyKind::Affine, 0.0, 0.0, 0.0);
        assert_eq!(z.natural_domain(1.0, 0.0, -10.0, 10.0).unwrap(), (-1.0, 10.0));
        assert!(matches!(z.natural_domain(1.0, -1.0, -10.0, 10.0), Err(Error::Pole { .. })));
    }

    #[test]
    fn presets() {
        let free = FreeConstants { forcing: 1.0, q: 2.0, ..Default::default() };
        let d = Preset::TypeD.family(&free).unwrap();
        for x in [-2.0, 0.5] {
            assert!((d.k(x, 4.0).unwrap().value - x).abs() < 1e-15);
        }
        assert_eq!(d.L(3.0).unwrap(), -6.0);
        let e = Preset::TypeE.family(&free).unwrap();
        assert!((e.k(1.1, 3.0).unwrap().value - (2.0 / 3.0 + 3.0 / 1.1f64.tan())).abs() < 1e-13);
        let c = Preset::TypeC.family(&FreeConstants { amplitude: 0.3, ..free }).unwrap();
        let x = 1.7;
        assert!((k1(x, c.params()).unwrap().value - 1.0 / x).abs() < 1e-15);
        assert!((k0(x, c.params()).unwrap().value - (0.5 * x + 0.3 / x)).abs() < 1e-15);
        assert!(Preset::TypeE.family(&FreeConstants { q: 0.0, ..free }).is_err());
        assert!(Preset::TypeF.family(&FreeConstants { q: 0.0, ..free }).is_err());
        // Morse-type: k = -(b/c + m c) + D e^{c x}
        let b = Preset::TypeBReal.family(&FreeConstants { amplitude: 0.5, ..free }).unwrap();
        let x: f64 = 0.4;
        let want: f64 = -(1.0 + 2.0) + 0.5 * x.exp();
        assert!((b.k(x, 2.0).unwrap().value - want).abs() < 1e-14);
        assert_eq!(Preset::from_name("b_real").unwrap(), Preset::TypeBReal);
        assert_eq!(Preset::from_name("TypeA").unwrap(), Preset::TypeA);
        assert!(Preset::from_name("Z").is_err());
    }

    #[test]
    fn trivial_inverse_is_flagged() {
        let t = fam(SignClass::positive(1.0).unwrap(), 1.0.into(), FamilyKind::InversePower, 0.0, 0.0, 1.0);
        assert!(t.is_trivial());
        assert!(t.require_nontrivial().is_err());
        let e = Preset::TypeE.family(&FreeConstants::default()).unwrap();
        assert!(!e.is_trivial());
    }

    #[test]
    fn limit_recovery_small_b() {
        let neg = SignClass::negative(1.3).unwrap();
        let pos = SignClass::positive(0.8).unwrap();
        for sign in [neg, pos, SignClass::ZeroA] {
            let mut p0 = FamilyParams::new(sign, 0.2, 0.0.into());
            p0.forcing = 0.7;
            p0.amplitude = -0.3;
            let p1 = FamilyParams { selector: 1e-8.into(), ..p0 };
            for x in [0.6, 1.1, 1.9] {
                let (a, b) = (k1(x, &p0).unwrap(), k1(x, &p1).unwrap());
                assert!((a.value - b.value).abs() < 1e-6);
                let (a, b) = (k0(x, &p0).unwrap(), k0(x, &p1).unwrap());
                assert!((a.value - b.value).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn descriptor_round_trip() {
        let f = Preset::HyperbolicTanh.family(&FreeConstants { c: 1.5, forcing: 0.2, ..Default::default() }).unwrap();
        let json = serde_json::to_string(&f.descriptor()).unwrap();
        assert!(json.contains("\"B\":\"inf\""));
        let back: FamilyDescriptor = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_family().unwrap(), f);
        let bad: FamilyDescriptor = serde_json::from_str(r#"{"kind":"affine","sign":"neg"}"#).unwrap();
        assert!(bad.to_family().is_err());
    }
}
