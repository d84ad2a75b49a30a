//! Analytic spectra from ladder chains.
//!
//! `DecreasingL`: `exp(+int W(m))` is annihilated by `A^dagger(m)` and is
//! the ground state of `Ht(m)` at energy `d`. Level `k` of `H(m)` is
//! `A(m+1) ... A(m+k) exp(+int W(m+k+1))` with
//! `E_k = d - sum_{r=0..=k} R(m + r)`.
//!
//! `IncreasingL`: `exp(-int W(m))` is annihilated by `A(m)` and is the
//! ground state of `H(m)` at energy `d`. Level `k` of `H(m)` is
//! `A^dagger(m) ... A^dagger(m-k+1) exp(-int W(m-k))` with
//! `E_k = d + sum_{r=1..=k} R(m - r)`.

use serde::{Deserialize, Serialize};

use crate::error::{DivergentEnd, Error, Result};
use crate::families::Family;
use crate::numerics::{
    count_nodes, cumulative_integral, derivative, first_lobe_sign, norm, Grid, GridFunction,
};
use crate::partners::Superpotential;
use crate::taylor::{k_taylor, Taylor};

/// Largest admissible `h max|W|` on the support of a function a ladder
/// operator is applied to.
pub const COARSENESS_LIMIT: f64 = 0.5;

/// Relative threshold defining the support in the coarseness check.
const SUPPORT_FLOOR: f64 = 1e-4;

/// Relative change under refinement below which a probe integral counts as
/// converged.
const PROBE_RTOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChainDirection {
    #[serde(rename = "decreasing")]
    DecreasingL,
    #[serde(rename = "increasing")]
    IncreasingL,
}

impl ChainDirection {
    /// Sign `s` of the ground state `exp(s int W)`.
    pub fn ground_sign(self) -> f64 {
        match self {
            ChainDirection::DecreasingL => 1.0,
            ChainDirection::IncreasingL => -1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ChainDirection::DecreasingL => "decreasing",
            ChainDirection::IncreasingL => "increasing",
        }
    }
}

/// `A = d/dx + W` lowers, `A^dagger = -d/dx + W` raises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LadderOp {
    #[serde(rename = "A")]
    Lower,
    #[serde(rename = "A_dagger")]
    Raise,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderStep {
    pub op: LadderOp,
    pub m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Level {
    pub k: usize,
    #[serde(rename = "E")]
    pub energy: f64,
    /// Parameter of the seed ground state.
    pub seed_m: f64,
    /// Ladder operators in the order they are applied to the seed.
    pub recipe: Vec<LadderStep>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Truncation {
    pub requested: usize,
    /// Number of admissible levels.
    pub available: usize,
    pub reason: String,
}

/// Levels of `H(m)` and of its partner `Ht(m)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralChain {
    pub m: f64,
    pub direction: ChainDirection,
    pub d: f64,
    pub levels: Vec<Level>,
    /// `(k, E)` of `Ht(m)`.
    pub partner_levels: Vec<(usize, f64)>,
    pub truncation: Option<Truncation>,
}

/// A sampled state with its metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    pub psi: GridFunction,
    pub k: Option<usize>,
    pub energy: Option<f64>,
    pub normalized: bool,
}

impl WaveFunction {
    pub fn unnormalized(psi: GridFunction) -> Self {
        Self { psi, k: None, energy: None, normalized: false }
    }

    /// Scales to unit norm and fixes the sign of the first lobe.
    pub fn normalize(mut self) -> Result<Self> {
        let n = norm(&self.psi);
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Verification("cannot normalize a zero state".into()));
        }
        let s = first_lobe_sign(self.psi.values()) / n;
        self.psi = self.psi.scaled(s)?;
        self.normalized = true;
        Ok(self)
    }

    pub fn nodes(&self) -> usize {
        count_nodes(&self.psi)
    }

    pub fn norm(&self) -> f64 {
        norm(&self.psi)
    }

    pub fn grid(&self) -> &Grid {
        self.psi.grid()
    }
}

// ---------------------------------------------------------------- screening

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum EndKind {
    /// Extended outward from the probe edge.
    Free,
    /// Approached up to a shrinking gap.
    Pole { at: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EndProbe {
    pub kind: EndKind,
    /// `ln int exp(2 s int W)` over the half, for each refinement.
    pub log_integrals: Vec<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizabilityReport {
    pub m: f64,
    pub direction: ChainDirection,
    pub normalizable: bool,
    pub divergent: Option<DivergentEnd>,
    pub left: EndProbe,
    pub right: EndProbe,
}

impl NormalizabilityReport {
    pub fn into_result(self) -> Result<()> {
        match self.divergent {
            None => Ok(()),
            Some(end) => Err(Error::NotNormalizable { m: self.m, end }),
        }
    }
}

fn log_sum_exp(terms: impl Iterator<Item = f64>) -> f64 {
    let terms: Vec<f64> = terms.collect();
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// Log of the Simpson sum of `exp(l_j) dt` over `j = 0..=end` (`end` even).
fn log_simpson(l: &[f64], dt: f64, end: usize) -> f64 {
    let w = |j: usize| -> f64 {
        if j == 0 || j == end {
            1.0
        } else if j % 2 == 1 {
            4.0
        } else {
            2.0
        }
    };
    log_sum_exp((0..=end).map(|j| l[j] + w(j).ln())) + (dt / 3.0).ln()
}

/// Samples `x(t)`, `dx/dt` along a half, `t` uniform from 0.
struct HalfPath {
    x: Vec<f64>,
    jac: Vec<f64>,
    dt: f64,
    checkpoints: [usize; 3],
}

const INTERVALS_PER_DECADE: usize = 400;

fn pole_path(mid: f64, pole: f64) -> HalfPath {
    // x = pole - sigma D e^{-t}; gaps 1e-8, 1e-9, 1e-10 of D
    let sigma = (pole - mid).signum();
    let dist = (pole - mid).abs();
    let dt = std::f64::consts::LN_10 / INTERVALS_PER_DECADE as f64;
    let n = 10 * INTERVALS_PER_DECADE;
    let (mut x, mut jac) = (Vec::with_capacity(n + 1), Vec::with_capacity(n + 1));
    for j in 0..=n {
        let e = dist * (-(j as f64) * dt).exp();
        x.push(pole - sigma * e);
        jac.push(sigma * e);
    }
    HalfPath { x, jac, dt, checkpoints: [8 * INTERVALS_PER_DECADE, 9 * INTERVALS_PER_DECADE, n] }
}

fn free_path(mid: f64, edge: f64, extension: f64) -> HalfPath {
    let sigma = (edge - mid).signum();
    let far = (edge - mid).abs() + 4.0 * extension;
    let near = (edge - mid).abs();
    let n = ((far / 0.004).ceil() as usize).clamp(4000, 400_000);
    let n = n + n % 2;
    let dt = far / n as f64;
    let idx = |len: f64| -> usize {
        let i = (len / dt).round() as usize;
        (i - i % 2).min(n)
    };
    let x: Vec<f64> = (0..=n).map(|j| mid + sigma * j as f64 * dt).collect();
    HalfPath {
        x,
        jac: vec![sigma; n + 1],
        dt,
        checkpoints: [idx(near + extension), idx(near + 2.0 * extension), n],
    }
}

fn probe_half(w: &Superpotential, m: f64, s: f64, path: &HalfPath) -> Result<Vec<f64>> {
    let integrand = path
        .x
        .iter()
        .zip(&path.jac)
        .map(|(x, j)| Ok(w.value(*x, m)? * j))
        .collect::<Result<Vec<f64>>>()?;
    let phi = cumulative_integral(&integrand, path.dt, 0);
    let l: Vec<f64> = phi.iter().zip(&path.jac).map(|(p, j)| 2.0 * s * p + j.abs().ln()).collect();
    Ok(path.checkpoints.iter().map(|&e| log_simpson(&l, path.dt, e)).collect())
}

/// Screens `exp(s int W(m))` (`s` from the direction) for square
/// integrability on `probe`. Each half of the probe is paired with its
/// outward end: the nearest pole of `W` if one lies within four probe
/// widths, otherwise a free end extended by one, two and four widths.
pub fn check_normalizable(
    w: &Superpotential,
    m: f64,
    direction: ChainDirection,
    probe: (f64, f64),
) -> Result<NormalizabilityReport> {
    let (lo, hi) = probe;
    if !(lo < hi) {
        return Err(Error::InvalidParameter(format!("empty probe ({lo}, {hi})")));
    }
    let mid = 0.5 * (lo + hi);
    let width = hi - lo;
    let s = direction.ground_sign();
    let end = |edge: f64| -> Result<EndProbe> {
        let reach = edge + (edge - mid).signum() * 4.0 * width;
        let (a, b) = if edge > mid { (mid, reach) } else { (reach, mid) };
        let poles = w.singularities(m, a, b);
        let nearest = if edge > mid { poles.first() } else { poles.last() };
        let (kind, path) = match nearest {
            Some(&p) => (EndKind::Pole { at: p }, pole_path(mid, p)),
            None => (EndKind::Free, free_path(mid, edge, width)),
        };
        let log_integrals = probe_half(w, m, s, &path)?;
        let n = log_integrals.len();
        let change = (log_integrals[n - 1] - log_integrals[n - 2]).exp_m1().abs();
        let converged = log_integrals.iter().all(|v| v.is_finite()) && change < PROBE_RTOL;
        Ok(EndProbe { kind, log_integrals, converged })
    };
    let left = end(lo)?;
    let right = end(hi)?;
    let divergent = match (left.converged, right.converged) {
        (true, true) => None,
        (false, true) => Some(DivergentEnd::Left),
        (true, false) => Some(DivergentEnd::Right),
        (false, false) => Some(DivergentEnd::Both),
    };
    Ok(NormalizabilityReport { m, direction, normalizable: divergent.is_none(), divergent, left, right })
}

// ------------------------------------------------------------ construction

/// `exp(s int W(m))` on `grid`, anchored at the grid midpoint and
/// normalized, after the normalizability screen on the grid interval.
pub fn ground_state(
    w: &Superpotential,
    m: f64,
    direction: ChainDirection,
    grid: &Grid,
) -> Result<WaveFunction> {
    check_normalizable(w, m, direction, (grid.x0(), grid.x1()))?.into_result()?;
    let wv = GridFunction::from_fn(*grid, |x| w.value(x, m))?;
    let phi = cumulative_integral(wv.values(), grid.spacing(), grid.mid_index());
    let s = direction.ground_sign();
    let max = phi.iter().map(|p| s * p).fold(f64::NEG_INFINITY, f64::max);
    let values = phi.iter().map(|p| (s * p - max).exp()).collect();
    WaveFunction::unnormalized(GridFunction::new(*grid, values)?).normalize()
}

/// `h max|W(m)|` over the support `|psi| >= 1e-4 max|psi|`.
pub fn coarseness(w: &Superpotential, m: f64, psi: &GridFunction) -> Result<f64> {
    let floor = SUPPORT_FLOOR * psi.max_abs();
    let mut max_w = 0.0f64;
    for (x, v) in psi.grid().points().zip(psi.values()) {
        if v.abs() >= floor && *v != 0.0 {
            max_w = max_w.max(w.value(x, m)?.abs());
        }
    }
    Ok(psi.grid().spacing() * max_w)
}

/// `(+-d/dx + W(m)) psi`: `Lower` is `A`, `Raise` is `A^dagger`.
pub fn ladder_apply(w: &Superpotential, m: f64, op: LadderOp, psi: &GridFunction) -> Result<GridFunction> {
    let ratio = coarseness(w, m, psi)?;
    if ratio > COARSENESS_LIMIT {
        return Err(Error::GridTooCoarse { ratio, limit: COARSENESS_LIMIT });
    }
    let sign = match op {
        LadderOp::Lower => 1.0,
        LadderOp::Raise => -1.0,
    };
    let dpsi = derivative(psi)?;
    let wv = GridFunction::from_fn(*psi.grid(), |x| w.value(x, m))?;
    let values = dpsi
        .values()
        .iter()
        .zip(wv.values().iter().zip(psi.values()))
        .map(|(d, (w, p))| sign * d + w * p)
        .collect();
    GridFunction::new(*psi.grid(), values)
}

fn violation(step: usize, m: f64, reason: impl Into<String>) -> Error {
    Error::OrbitViolation { step, m, reason: reason.into() }
}

fn checked_r(family: &Family, step: usize, u: f64, want_positive: bool) -> Result<f64> {
    let r = family.R(u).map_err(|e| violation(step, u, e.to_string()))?;
    let ok = if want_positive { r > 0.0 } else { r < 0.0 };
    if !ok {
        let need = if want_positive { "positive" } else { "negative" };
        return Err(violation(step, u, format!("R = {r} is not {need}")));
    }
    Ok(r)
}

/// `E_k` of `H(m)`.
pub fn energy_level(family: &Family, m: f64, k: usize, direction: ChainDirection, d: f64) -> Result<f64> {
    match direction {
        ChainDirection::DecreasingL => {
            let mut sum = 0.0;
            for r in 0..=k {
                sum += checked_r(family, r, m + r as f64, false)?;
            }
            Ok(d - sum)
        }
        ChainDirection::IncreasingL => {
            let mut sum = 0.0;
            for r in 1..=k {
                sum += checked_r(family, r, m - r as f64, true)?;
            }
            if family.kind() == crate::families::FamilyKind::InversePower && m - k as f64 == 0.0 {
                return Err(violation(k, 0.0, "seed parameter is zero"));
            }
            Ok(d + sum)
        }
    }
}

/// Seed parameter and ladder recipe of level `k`.
pub fn recipe(m: f64, k: usize, direction: ChainDirection) -> (f64, Vec<LadderStep>) {
    match direction {
        ChainDirection::DecreasingL => (
            m + (k + 1) as f64,
            (1..=k).rev().map(|j| LadderStep { op: LadderOp::Lower, m: m + j as f64 }).collect(),
        ),
        ChainDirection::IncreasingL => (
            m - k as f64,
            (0..k).rev().map(|j| LadderStep { op: LadderOp::Raise, m: m - j as f64 }).collect(),
        ),
    }
}

fn finish_state(psi: GridFunction, k: usize, energy: f64) -> Result<WaveFunction> {
    let mut wf = WaveFunction::unnormalized(psi).normalize()?;
    wf.k = Some(k);
    wf.energy = Some(energy);
    let nodes = wf.nodes();
    if nodes != k {
        return Err(Error::Verification(format!("level {k} has {nodes} nodes")));
    }
    Ok(wf)
}

/// The `k`-th state of `H(m)`, built from the seed ground state upward.
///
/// The seed `exp(s int W)` comes from quadrature on the grid. Writing each
/// intermediate state as `g psi_seed`, a ladder step maps
/// `g -> +-g' + (W(m_j) +- s W_seed) g`; the prefactor `g` is propagated on
/// Taylor coefficients of the closed forms, so no grid derivative is taken.
/// The grid must still pass the coarseness check of [`ladder_apply`].
pub fn excited_state(
    family: &Family,
    m: f64,
    k: usize,
    direction: ChainDirection,
    grid: &Grid,
) -> Result<WaveFunction> {
    let energy = energy_level(family, m, k, direction, family.params().d)?;
    let w = Superpotential::Family(*family);
    let (seed, steps) = recipe(m, k, direction);
    let seed_psi = ground_state(&w, seed, direction, grid)?.psi;
    for step in &steps {
        let ratio = coarseness(&w, step.m, &seed_psi)?;
        if ratio > COARSENESS_LIMIT {
            return Err(Error::GridTooCoarse { ratio, limit: COARSENESS_LIMIT });
        }
    }
    let s = direction.ground_sign();
    let len = steps.len() + 1;
    let mut values = Vec::with_capacity(grid.len());
    for (x, p) in grid.points().zip(seed_psi.values()) {
        let ws = k_taylor(family, x, seed, len)?.scale(s);
        let mut g = Taylor::constant(1.0, len);
        for step in &steps {
            let n = g.len() - 1;
            let wm = k_taylor(family, x, step.m, len)?;
            g = match step.op {
                LadderOp::Lower => g.derivative().add(&wm.add(&ws).mul(&g).truncate(n)),
                LadderOp::Raise => g.derivative().scale(-1.0).add(&wm.add(&ws.scale(-1.0)).mul(&g).truncate(n)),
            };
        }
        values.push(g.value() * p);
    }
    finish_state(GridFunction::new(*grid, values)?, k, energy)
}

/// [`excited_state`] with every ladder step applied by [`ladder_apply`] to
/// the sampled state. Rounding grows like `eps / h^k`, so this is a
/// cross-check for low levels only.
pub fn excited_state_fd(
    family: &Family,
    m: f64,
    k: usize,
    direction: ChainDirection,
    grid: &Grid,
) -> Result<WaveFunction> {
    let energy = energy_level(family, m, k, direction, family.params().d)?;
    let w = Superpotential::Family(*family);
    let (seed, steps) = recipe(m, k, direction);
    let mut psi = ground_state(&w, seed, direction, grid)?.psi;
    for step in &steps {
        psi = ladder_apply(&w, step.m, step.op, &psi)?;
    }
    finish_state(psi, k, energy)
}

/// Levels `0..=kmax` of `H(m)` and of its partner. Stops early at the first
/// orbit violation or, when a probe interval is given, at the first seed
/// ground state that fails the normalizability screen.
pub fn spectrum_analytic(
    family: &Family,
    m: f64,
    kmax: usize,
    direction: ChainDirection,
    d: f64,
    probe: Option<(f64, f64)>,
) -> Result<SpectralChain> {
    let w = Superpotential::Family(*family);
    let mut levels = Vec::new();
    let mut truncation = None;
    for k in 0..=kmax {
        let energy = match energy_level(family, m, k, direction, d) {
            Ok(e) => e,
            Err(e) => {
                truncation = Some(Truncation { requested: kmax + 1, available: k, reason: e.to_string() });
                break;
            }
        };
        let (seed_m, steps) = recipe(m, k, direction);
        if let Some(p) = probe {
            if let Err(e) = check_normalizable(&w, seed_m, direction, p)?.into_result() {
                truncation = Some(Truncation { requested: kmax + 1, available: k, reason: e.to_string() });
                break;
            }
        }
        levels.push(Level { k, energy, seed_m, recipe: steps });
    }
    let partner_levels = match direction {
        ChainDirection::IncreasingL => levels.iter().skip(1).map(|l| (l.k - 1, l.energy)).collect(),
        ChainDirection::DecreasingL => {
            let ground_ok = match probe {
                Some(p) => check_normalizable(&w, m, direction, p)?.normalizable,
                None => true,
            };
            let mut v: Vec<(usize, f64)> = if ground_ok { vec![(0, d)] } else { Vec::new() };
            let off = v.len();
            v.extend(levels.iter().map(|l| (l.k + off, l.energy)));
            v
        }
    };
    Ok(SpectralChain { m, direction, d, levels, partner_levels, truncation })
}
