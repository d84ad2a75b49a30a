//! Run configuration: the JSON file, flag overrides and grid resolution.

use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;

use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use shapeinv_core::partners::{classify_l_sequence, LSequenceClass};
use shapeinv_core::spectra::check_normalizable;
use shapeinv_core::{
    ChainDirection, Error, ExtendedReal, Family, FamilyDescriptor, FreeConstants, Grid, Preset,
    Superpotential,
};

use crate::report::CliError;

pub const DEFAULT_N: usize = 2001;
pub const DEFAULT_POLE_MARGIN: f64 = 1e-3;
pub const DEFAULT_KMAX: usize = 3;
/// `|Delta E|` tolerance of `spectrum both` when none is configured.
pub const DEFAULT_SPECTRUM_TOL: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectionChoice {
    #[default]
    Auto,
    Decreasing,
    Increasing,
}

impl DirectionChoice {
    pub fn fixed(self) -> Option<ChainDirection> {
        match self {
            DirectionChoice::Auto => None,
            DirectionChoice::Decreasing => Some(ChainDirection::DecreasingL),
            DirectionChoice::Increasing => Some(ChainDirection::IncreasingL),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// `"auto"` when every field is absent. Missing bounds are filled from the
/// natural domain, a missing `n` by [`DEFAULT_N`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GridChoice {
    pub xmin: Option<f64>,
    pub xmax: Option<f64>,
    pub n: Option<usize>,
}

impl GridChoice {
    pub fn explicit(xmin: f64, xmax: f64, n: usize) -> Self {
        Self { xmin: Some(xmin), xmax: Some(xmax), n: Some(n) }
    }

    pub fn is_auto(&self) -> bool {
        self.xmin.is_none() && self.xmax.is_none() && self.n.is_none()
    }
}

impl Serialize for GridChoice {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.is_auto() {
            return s.serialize_str("auto");
        }
        let mut map = s.serialize_map(None)?;
        if let Some(v) = self.xmin {
            map.serialize_entry("xmin", &v)?;
        }
        if let Some(v) = self.xmax {
            map.serialize_entry("xmax", &v)?;
        }
        if let Some(v) = self.n {
            map.serialize_entry("n", &v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for GridChoice {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = GridChoice;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("\"auto\" or {xmin, xmax, n}")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<GridChoice, E> {
                if v == "auto" {
                    Ok(GridChoice::default())
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
            fn visit_map<M: MapAccess<'de>>(self, mut m: M) -> Result<GridChoice, M::Error> {
                let mut g = GridChoice::default();
                while let Some(key) = m.next_key::<String>()? {
                    match key.as_str() {
                        "xmin" => g.xmin = Some(m.next_value()?),
                        "xmax" => g.xmax = Some(m.next_value()?),
                        "n" => g.n = Some(m.next_value()?),
                        other => return Err(de::Error::unknown_field(other, &["xmin", "xmax", "n"])),
                    }
                }
                Ok(g)
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

fn default_kmax() -> usize {
    DEFAULT_KMAX
}

fn default_margin() -> f64 {
    DEFAULT_POLE_MARGIN
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyDescriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(default)]
    pub direction: DirectionChoice,
    #[serde(default)]
    pub grid: GridChoice,
    #[serde(default = "default_kmax")]
    pub kmax: usize,
    /// Replaces the family's `d` when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default = "default_margin")]
    pub pole_margin: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            family: None,
            m: None,
            direction: DirectionChoice::Auto,
            grid: GridChoice::default(),
            kmax: DEFAULT_KMAX,
            d: None,
            tol: None,
            output: OutputSpec::default(),
            pole_margin: DEFAULT_POLE_MARGIN,
        }
    }
}

/// Field-mirroring overrides collected from the command line.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// Preset whose fixed slots seed the family descriptor.
    #[arg(long, global = true)]
    pub preset: Option<String>,
    #[arg(long, global = true, value_parser = ["affine", "inverse"])]
    pub kind: Option<String>,
    #[arg(long, global = true, value_parser = ["pos", "zero", "neg"])]
    pub sign: Option<String>,
    #[arg(long, global = true)]
    pub c: Option<f64>,
    #[arg(long = "A", global = true, allow_negative_numbers = true)]
    pub center: Option<f64>,
    /// A number or `inf`.
    #[arg(long = "B", global = true, allow_negative_numbers = true)]
    pub selector: Option<String>,
    #[arg(long = "b", global = true, allow_negative_numbers = true)]
    pub forcing: Option<f64>,
    #[arg(long = "D", global = true, allow_negative_numbers = true)]
    pub amplitude: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub q: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub t: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub d: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub m: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub direction: Option<DirectionArg>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub xmin: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub xmax: Option<f64>,
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub kmax: Option<usize>,
    #[arg(long = "pole-margin", global = true)]
    pub pole_margin: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum DirectionArg {
    Auto,
    Decreasing,
    Increasing,
}

impl From<DirectionArg> for DirectionChoice {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::Auto => DirectionChoice::Auto,
            DirectionArg::Decreasing => DirectionChoice::Decreasing,
            DirectionArg::Increasing => DirectionChoice::Increasing,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::usage(msg)
}

fn parse_selector(s: &str) -> Result<ExtendedReal, CliError> {
    if s.eq_ignore_ascii_case("inf") {
        return Ok(ExtendedReal::Infinity);
    }
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .map(ExtendedReal::Finite)
        .ok_or_else(|| usage(format!("--B expects a number or inf, got '{s}'")))
}

fn preset_descriptor(name: &str, o: &Overrides) -> Result<FamilyDescriptor, CliError> {
    let preset = Preset::from_name(name).map_err(CliError::from_core)?;
    let mut free = FreeConstants::default();
    let slots = preset.free_slots();
    let set = |slot: &str, v: Option<f64>, target: &mut f64| -> Result<(), CliError> {
        if let Some(v) = v {
            if !slots.contains(&slot) {
                return Err(usage(format!(
                    "preset {} fixes {slot}; free slots are {}",
                    preset.name(),
                    slots.join(", ")
                )));
            }
            *target = v;
        }
        Ok(())
    };
    set("c", o.c, &mut free.c)?;
    set("A", o.center, &mut free.center)?;
    set("b", o.forcing, &mut free.forcing)?;
    set("D", o.amplitude, &mut free.amplitude)?;
    set("q", o.q, &mut free.q)?;
    set("t", o.t, &mut free.t)?;
    if o.kind.is_some() || o.sign.is_some() || o.selector.is_some() {
        return Err(usage("--kind, --sign and --B cannot be combined with --preset"));
    }
    Ok(preset.family(&free).map_err(CliError::from_core)?.descriptor())
}

impl Overrides {
    fn touches_family(&self) -> bool {
        self.kind.is_some()
            || self.sign.is_some()
            || self.c.is_some()
            || self.center.is_some()
            || self.selector.is_some()
            || self.forcing.is_some()
            || self.amplitude.is_some()
            || self.q.is_some()
            || self.t.is_some()
    }

    /// Applies the overrides on top of `cfg`.
    pub fn apply(&self, mut cfg: RunConfig) -> Result<RunConfig, CliError> {
        if let Some(name) = &self.preset {
            cfg.family = Some(preset_descriptor(name, self)?);
        } else if self.touches_family() {
            let mut fam = match cfg.family.take() {
                Some(f) => f,
                None => {
                    let (Some(kind), Some(sign)) = (&self.kind, &self.sign) else {
                        return Err(usage("a family needs --preset, or --kind and --sign"));
                    };
                    let json = serde_json::json!({ "kind": kind, "sign": sign });
                    serde_json::from_value(json).map_err(|e| usage(e.to_string()))?
                }
            };
            if let Some(k) = &self.kind {
                fam.kind = serde_json::from_value(serde_json::json!(k)).map_err(|e| usage(e.to_string()))?;
            }
            if let Some(s) = &self.sign {
                fam.sign = serde_json::from_value(serde_json::json!(s)).map_err(|e| usage(e.to_string()))?;
            }
            if let Some(v) = self.c {
                fam.c = Some(v);
            }
            if let Some(v) = self.center {
                fam.A = v;
            }
            if let Some(s) = &self.selector {
                fam.B = parse_selector(s)?;
            }
            if let Some(v) = self.forcing {
                fam.b = v;
            }
            if let Some(v) = self.amplitude {
                fam.D = v;
            }
            if let Some(v) = self.q {
                fam.q = v;
            }
            if let Some(v) = self.t {
                fam.t = v;
            }
            cfg.family = Some(fam);
        }
        if self.d.is_some() {
            cfg.d = self.d;
        }
        if self.m.is_some() {
            cfg.m = self.m;
        }
        if let Some(d) = self.direction {
            cfg.direction = d.into();
        }
        if self.xmin.is_some() {
            cfg.grid.xmin = self.xmin;
        }
        if self.xmax.is_some() {
            cfg.grid.xmax = self.xmax;
        }
        if self.n.is_some() {
            cfg.grid.n = self.n;
        }
        if let Some(k) = self.kmax {
            cfg.kmax = k;
        }
        if let Some(p) = self.pole_margin {
            cfg.pole_margin = p;
        }
        Ok(cfg)
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| usage(format!("invalid config: {e}")))
    }

    /// Checks everything that can be checked without computing.
    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(f) = &self.family {
            f.to_family().map_err(CliError::from_core)?;
        }
        if let Some(m) = self.m {
            if !m.is_finite() {
                return Err(usage("m must be finite"));
            }
        }
        if !(self.pole_margin > 0.0 && self.pole_margin.is_finite()) {
            return Err(usage("pole_margin must be positive"));
        }
        if let Some(t) = self.tol {
            if !(t > 0.0) {
                return Err(usage("tol must be positive"));
            }
        }
        if self.grid.xmin.is_some() != self.grid.xmax.is_some() {
            return Err(usage("grid needs both xmin and xmax, or neither"));
        }
        if let (Some(a), Some(b)) = (self.grid.xmin, self.grid.xmax) {
            if !(a < b) {
                return Err(usage(format!("grid xmin {a} must be below xmax {b}")));
            }
        }
        Ok(())
    }

    /// The configured family with the top-level `d` applied.
    pub fn family(&self) -> Result<Family, CliError> {
        let mut desc = self
            .family
            .clone()
            .ok_or_else(|| usage("no family configured: use --config or --preset"))?;
        if let Some(d) = self.d {
            desc.d = d;
        }
        desc.to_family().map_err(CliError::from_core)
    }

    pub fn m(&self) -> Result<f64, CliError> {
        self.m.ok_or_else(|| usage("no m configured: use --m or the config field m"))
    }

    pub fn n(&self) -> usize {
        self.grid.n.unwrap_or(DEFAULT_N)
    }
}

/// Grid bounds without a point count: explicit ones, or the natural
/// domain of `family` at `m` shrunk by the pole margin at singular ends
/// and extended to `max(8, 6/sqrt|W'|)` at free ends.
pub fn resolve_interval(cfg: &RunConfig, family: &Family, m: f64) -> Result<(f64, f64), CliError> {
    if let (Some(a), Some(b)) = (cfg.grid.xmin, cfg.grid.xmax) {
        return Ok((a, b));
    }
    let p = family.params();
    let a = p.center;
    let s = p.sign.c().unwrap_or(1.0);
    let span = 50.0 / s;
    let poles = family.singularities(m, a - span, a + span);
    let w = Superpotential::Family(*family);
    let reach = |x: f64| -> f64 {
        match w.derivative_x(x, m) {
            Ok(wp) if wp.abs() > 0.0 => (6.0 / wp.abs().sqrt()).clamp(8.0, span),
            _ => 8.0,
        }
    };
    let left = poles.iter().copied().filter(|x| *x <= a).last();
    let right = poles.iter().copied().find(|x| *x > a);
    let margin = cfg.pole_margin;
    let (lo, hi) = match (left, right) {
        (None, None) => {
            let l = reach(a);
            (a - l, a + l)
        }
        (Some(l), Some(r)) => (l + margin, r - margin),
        (Some(l), None) => (l + margin, l + reach(l + 1.0 / s)),
        (None, Some(r)) => (r - reach(r - 1.0 / s), r - margin),
    };
    if !(lo < hi) {
        return Err(usage(format!("natural domain ({lo}, {hi}) is empty after the pole margin")));
    }
    Ok((lo, hi))
}

pub fn resolve_grid(cfg: &RunConfig, family: &Family, m: f64) -> Result<Grid, CliError> {
    let (lo, hi) = resolve_interval(cfg, family, m)?;
    Grid::new(lo, hi, cfg.n()).map_err(CliError::from_core)
}

/// Poles of `W(., m)` in the closed interval.
pub fn poles_in(family: &Family, m: f64, lo: f64, hi: f64) -> Vec<f64> {
    let w = Superpotential::Family(*family);
    let scale = 1e-9 * (hi - lo);
    let mut poles = family.singularities(m, lo - scale, hi + scale);
    for x in [lo, hi] {
        if w.value(x, m).is_err() && !poles.iter().any(|p| (p - x).abs() <= scale) {
            poles.push(x);
        }
    }
    poles.sort_by(f64::total_cmp);
    poles
}

/// Direction of the chain on `probe`. `auto` prefers the normalizability
/// screen: `exp(-int W(m))` for increasing, `exp(+int W(m+1))` for
/// decreasing. When both pass, the monotonicity of `L` decides.
pub fn resolve_direction(
    choice: DirectionChoice,
    family: &Family,
    m: f64,
    probe: (f64, f64),
) -> Result<ChainDirection, CliError> {
    if let Some(d) = choice.fixed() {
        return Ok(d);
    }
    let w = Superpotential::Family(*family);
    let screen = |m: f64, dir: ChainDirection| -> Result<bool, CliError> {
        Ok(check_normalizable(&w, m, dir, probe).map_err(CliError::from_core)?.normalizable)
    };
    let inc = screen(m, ChainDirection::IncreasingL)?;
    let dec = screen(m + 1.0, ChainDirection::DecreasingL)?;
    match (inc, dec) {
        (true, false) => Ok(ChainDirection::IncreasingL),
        (false, true) => Ok(ChainDirection::DecreasingL),
        (true, true) => {
            let l = classify_l_sequence(family, m, 4).map_err(CliError::from_core)?;
            match l.class {
                LSequenceClass::Decreasing => Ok(ChainDirection::DecreasingL),
                _ => Ok(ChainDirection::IncreasingL),
            }
        }
        (false, false) => Err(CliError::from_core(Error::NotNormalizable {
            m,
            end: shapeinv_core::DivergentEnd::Both,
        })
        .with_message(format!(
            "neither exp(-int W({m})) nor exp(+int W({})) is normalizable on ({}, {})",
            m + 1.0,
            probe.0,
            probe.1
        ))),
    }
}

/// A reference run: the oscillator, trigonometric and hyperbolic
/// cross-check configurations.
#[derive(Debug, Clone)]
pub struct ReferenceCase {
    pub name: &'static str,
    pub config: RunConfig,
}

pub fn reference_cases() -> Vec<ReferenceCase> {
    let desc = |p: Preset, free: FreeConstants| p.family(&free).expect("reference family").descriptor();
    let base = RunConfig::default();
    vec![
        ReferenceCase {
            name: "oscillator",
            config: RunConfig {
                family: Some(desc(Preset::TypeD, FreeConstants { forcing: 1.0, ..Default::default() })),
                m: Some(1.0),
                direction: DirectionChoice::Increasing,
                grid: GridChoice::explicit(-8.0, 8.0, 2001),
                kmax: 3,
                ..base.clone()
            },
        },
        ReferenceCase {
            name: "trigonometric",
            config: RunConfig {
                family: Some(desc(Preset::TypeA, FreeConstants::default())),
                m: Some(2.0),
                direction: DirectionChoice::Decreasing,
                grid: GridChoice::explicit(1e-3, PI - 1e-3, 4001),
                kmax: 2,
                ..base.clone()
            },
        },
        ReferenceCase {
            name: "hyperbolic",
            config: RunConfig {
                family: Some(desc(Preset::HyperbolicTanh, FreeConstants::default())),
                m: Some(3.0),
                direction: DirectionChoice::Increasing,
                grid: GridChoice::explicit(-12.0, 12.0, 4001),
                kmax: 2,
                ..base
            },
        },
    ]
}
