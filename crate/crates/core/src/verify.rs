//! Residual suites over every closed form, with a pass/fail record per
//! check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::{Family, FamilyKind, FamilyParams, FreeConstants, Preset};
use crate::numerics::{
    apply_hamiltonian, adjointness_defect, inner_product, norm, spectrum_numeric, Grid, GridFunction,
};
use crate::partners::{
    closed_form_potentials, factorization_residuals, shape_invariance_residual, PotentialPair,
    Superpotential,
};
use crate::riccati::{
    riccati_residual, solve_z, superpose, z_residual, ExtendedReal, RealFn, RiccatiSolution,
    SignClass,
};
use crate::spectra::{
    excited_state, ground_state, ladder_apply, spectrum_analytic, ChainDirection, LadderOp,
};
use crate::taylor::basis_taylor;

/// Seed of the parameter draws unless one is given.
pub const DEFAULT_SEED: u64 = 0x5eed_2024;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridMeta {
    pub xmin: f64,
    pub xmax: f64,
    pub n: usize,
}

impl From<&Grid> for GridMeta {
    fn from(g: &Grid) -> Self {
        Self { xmin: g.x0(), xmax: g.x1(), n: g.len() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// `null` in JSON when the check could not be evaluated.
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Number of sample points or items that entered the maximum.
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridMeta>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl VerifyReport {
    pub fn new(suite: impl Into<String>) -> Self {
        Self { suite: suite.into(), checks: Vec::new(), pass: true }
    }

    pub fn push(&mut self, check: Check) {
        self.pass &= check.pass;
        self.checks.push(check);
    }

    pub fn merge(&mut self, other: VerifyReport) {
        for c in other.checks {
            self.push(c);
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn max_residual(&self, prefix: &str) -> f64 {
        self.checks
            .iter()
            .filter(|c| c.name.starts_with(prefix))
            .map(|c| c.max_residual)
            .fold(0.0, f64::max)
    }
}

/// Running maximum of absolute residuals; the first error is kept as the
/// diagnostic and fails the check.
#[derive(Debug, Default)]
struct Sweep {
    max: f64,
    samples: usize,
    error: Option<String>,
}

impl Sweep {
    fn add(&mut self, r: Result<f64>) {
        match r {
            Ok(v) => {
                self.samples += 1;
                if v.is_nan() {
                    self.max = f64::NAN;
                } else if !self.max.is_nan() {
                    self.max = self.max.max(v.abs());
                }
            }
            Err(e) => {
                if self.error.is_none() {
                    self.error = Some(e.to_string());
                }
            }
        }
    }

    fn finish(self, name: impl Into<String>, tolerance: f64, grid: Option<GridMeta>) -> Check {
        let pass = self.error.is_none() && self.samples > 0 && self.max <= tolerance;
        let diagnostic = self.error.or_else(|| (self.samples == 0).then(|| "no samples".to_string()));
        Check {
            name: name.into(),
            max_residual: if diagnostic.is_some() && self.samples == 0 { f64::NAN } else { self.max },
            tolerance,
            pass,
            samples: self.samples,
            grid,
            diagnostic,
        }
    }
}

fn failed(name: impl Into<String>, tolerance: f64, grid: Option<GridMeta>, e: &Error) -> Check {
    Check {
        name: name.into(),
        max_residual: f64::NAN,
        tolerance,
        pass: false,
        samples: 0,
        grid,
        diagnostic: Some(e.to_string()),
    }
}

fn far_from(x: f64, poles: &[f64], gap: f64) -> bool {
    poles.iter().all(|p| (x - p).abs() >= gap)
}

// ----------------------------------------------------------------- riccati

/// Tolerance of the closed-form ODE residuals.
pub const RICCATI_TOL: f64 = 1e-9;

/// Distance from any pole, in units of `1/c`, below which a point is not
/// sampled.
const POLE_GAP: f64 = 0.05;

/// Magnitude above which a superposed value counts as near its own pole.
const SUPERPOSITION_CAP: f64 = 100.0;

#[derive(Debug, Clone, Copy)]
struct Draw {
    sign: SignClass,
    center: f64,
    selector: ExtendedReal,
    forcing: f64,
    amplitude: f64,
}

impl Draw {
    fn scale(&self) -> f64 {
        self.sign.c().unwrap_or(1.0)
    }

    fn window(&self) -> (f64, f64) {
        let r = 4.0 / self.scale();
        (self.center - r, self.center + r)
    }
}

fn draw_sign(rng: &mut ChaCha8Rng, i: usize) -> SignClass {
    let c = rng.gen_range(0.3..2.5);
    match i % 3 {
        0 => SignClass::PositiveA { c },
        1 => SignClass::ZeroA,
        _ => SignClass::NegativeA { c },
    }
}

fn draw_selector(rng: &mut ChaCha8Rng) -> ExtendedReal {
    if rng.gen_bool(0.15) {
        ExtendedReal::Infinity
    } else {
        ExtendedReal::Finite(rng.gen_range(-3.0..3.0))
    }
}

fn draw(rng: &mut ChaCha8Rng, i: usize) -> Draw {
    Draw {
        sign: draw_sign(rng, i),
        center: rng.gen_range(-2.0..2.0),
        selector: draw_selector(rng),
        forcing: rng.gen_range(-3.0..3.0),
        amplitude: rng.gen_range(-3.0..3.0),
    }
}

/// Regular sample points of a draw.
fn regular_points(rng: &mut ChaCha8Rng, d: &Draw, poles: &[f64], count: usize) -> Vec<f64> {
    let (lo, hi) = d.window();
    let gap = POLE_GAP / d.scale();
    let mut out = Vec::with_capacity(count);
    let mut tries = 0;
    while out.len() < count && tries < 20 * count {
        tries += 1;
        let x = rng.gen_range(lo..hi);
        if far_from(x, poles, gap) {
            out.push(x);
        }
    }
    out
}

/// `y' + y^2 - a` and `y z + z' - b` over `draws` random parameter sets
/// cycling through the three sign classes, plus the superposition and
/// basis derivative identities.
pub fn riccati_suite(seed: u64, draws: usize, points: usize) -> VerifyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = VerifyReport::new("riccati");
    let mut y_sweep: [Sweep; 3] = Default::default();
    let mut z_sweep: [Sweep; 3] = Default::default();
    for i in 0..draws {
        let d = draw(&mut rng, i);
        let y = RiccatiSolution { sign_class: d.sign, center: d.center, selector: d.selector };
        let z = solve_z(d.forcing, &y, d.amplitude);
        let (lo, hi) = d.window();
        let poles = y.poles(lo - 1.0, hi + 1.0);
        for x in regular_points(&mut rng, &d, &poles, points) {
            y_sweep[i % 3].add(riccati_residual(&y, y.a(), x));
            z_sweep[i % 3].add(z_residual(&y, &z, d.forcing, x));
        }
    }
    let labels = ["pos", "zero", "neg"];
    for (s, l) in y_sweep.into_iter().zip(labels) {
        report.push(s.finish(format!("riccati_y/{l}"), RICCATI_TOL, None));
    }
    for (s, l) in z_sweep.into_iter().zip(labels) {
        report.push(s.finish(format!("riccati_z/{l}"), RICCATI_TOL, None));
    }
    report.merge(superposition_suite(&mut rng, draws, points));
    report.merge(identity_suite(&mut rng, draws, points));
    report
}

fn superposition_suite(rng: &mut ChaCha8Rng, draws: usize, points: usize) -> VerifyReport {
    let mut report = VerifyReport::new("superposition");
    let mut ends = Sweep::default();
    let mut generic = Sweep::default();
    for i in 0..draws {
        let sign = draw_sign(rng, i);
        let center = rng.gen_range(-2.0..2.0);
        let mut sel = || ExtendedReal::Finite(rng.gen_range(-3.0..3.0));
        let ys = [sel(), sel(), sel()].map(|b| RiccatiSolution { sign_class: sign, center, selector: b });
        let k = rng.gen_range(-3.0..3.0);
        let d = Draw { sign, center, selector: ExtendedReal::Infinity, forcing: 0.0, amplitude: 0.0 };
        let (lo, hi) = d.window();
        let poles: Vec<f64> = ys.iter().flat_map(|y| y.poles(lo - 1.0, hi + 1.0)).collect();
        let at = |k: ExtendedReal| superpose(ys[0], ys[1], ys[2], k);
        for x in regular_points(rng, &d, &poles, points) {
            for (kk, want) in [(0.0.into(), 0), (1.0.into(), 2), (ExtendedReal::Infinity, 1)] {
                ends.add(at(kk).value(x).and_then(|v| Ok(v - ys[want].value(x)?)));
            }
            let s = at(ExtendedReal::Finite(k));
            match s.value(x) {
                Ok(v) if v.abs() <= SUPERPOSITION_CAP => generic.add(riccati_residual(&s, sign.a(), x)),
                _ => {}
            }
        }
    }
    report.push(ends.finish("superposition_endpoints", RICCATI_TOL, None));
    report.push(generic.finish("superposition_generic", RICCATI_TOL, None));
    report
}

/// Derivative identities of the basis pairs, with the derivative taken
/// from Taylor arithmetic on the defining exponentials, sines and
/// polynomials:
/// `f+' = c(1 - f+^2)`, `h+' = -c f+ h+`, `f0' = -kappa f0^2`,
/// `h0' = 1 - kappa f0 h0`, `f-' = c(1 + f-^2)`, `h-' = c f- h-`.
fn identity_suite(rng: &mut ChaCha8Rng, draws: usize, points: usize) -> VerifyReport {
    let mut report = VerifyReport::new("identities");
    let mut sweeps: [Sweep; 6] = Default::default();
    for i in 0..draws {
        let mut d = draw(rng, i);
        if d.selector.is_infinite() {
            d.selector = ExtendedReal::Finite(rng.gen_range(-3.0..3.0));
        }
        let y = RiccatiSolution { sign_class: d.sign, center: d.center, selector: d.selector };
        let (lo, hi) = d.window();
        let poles = y.poles(lo - 1.0, hi + 1.0);
        let kappa = crate::riccati::basis_kappa(d.sign, d.selector);
        let slot = 2 * (i % 3);
        for x in regular_points(rng, &d, &poles, points) {
            let pair = basis_taylor(d.sign, d.center, d.selector, x, 2);
            let (f, h) = match pair {
                Ok((f, h)) => (f, h),
                Err(e) => {
                    sweeps[slot].add(Err(e));
                    continue;
                }
            };
            let (fv, hv, df, dh) = (f.0[0], h.0[0], f.0[1], h.0[1]);
            let (rf, rh) = match d.sign {
                SignClass::PositiveA { c } => (df - c * (1.0 - fv * fv), dh + c * fv * hv),
                SignClass::ZeroA => (df + kappa * fv * fv, dh - (1.0 - kappa * fv * hv)),
                SignClass::NegativeA { c } => (df - c * (1.0 + fv * fv), dh - c * fv * hv),
            };
            sweeps[slot].add(Ok(rf));
            sweeps[slot + 1].add(Ok(rh));
        }
    }
    let names = ["f_plus", "h_plus", "f_zero", "h_zero", "f_minus", "h_minus"];
    for (s, n) in sweeps.into_iter().zip(names) {
        report.push(s.finish(format!("identity/{n}"), RICCATI_TOL, None));
    }
    report
}

// ------------------------------------------------------------------- shape

/// Tolerance of the potential-level identities.
pub const SHAPE_TOL: f64 = 1e-8;

/// Parameters at which the shape-invariance checks run.
pub const SHAPE_PARAMETERS: [f64; 3] = [2.0, 3.0, 4.5];

/// The six kind and sign combinations at a generic finite selector, the
/// same six in the `B = Infinity` limit, and every preset.
pub fn shape_families() -> Vec<(String, Family)> {
    let mut out = Vec::new();
    let signs = [
        ("pos", SignClass::PositiveA { c: 1.2 }),
        ("zero", SignClass::ZeroA),
        ("neg", SignClass::NegativeA { c: 0.9 }),
    ];
    for kind in [FamilyKind::Affine, FamilyKind::InversePower] {
        for (label, sign) in signs {
            for (sel_label, selector) in [("B=0.4", ExtendedReal::Finite(0.4)), ("B=inf", ExtendedReal::Infinity)] {
                let params = FamilyParams {
                    sign,
                    center: 0.3,
                    selector,
                    forcing: 0.7,
                    amplitude: -0.35,
                    q: 0.8,
                    t: 0.5,
                    d: 0.25,
                };
                let kind_label = match kind {
                    FamilyKind::Affine => "affine",
                    FamilyKind::InversePower => "inverse",
                };
                let f = Family::new(params, kind).expect("fixed parameters are valid");
                out.push((format!("{kind_label}/{label}/{sel_label}"), f));
            }
        }
    }
    let free = FreeConstants { forcing: 0.6, amplitude: 0.3, q: 0.8, t: 0.5, d: 0.25, ..Default::default() };
    for p in Preset::ALL {
        out.push((format!("preset/{}", p.name()), p.family(&free).expect("preset defaults are valid")));
    }
    out
}

fn shape_points(family: &Family, count: usize) -> Vec<f64> {
    let a = family.params().center;
    let (lo, hi) = (a - 3.0, a + 3.0);
    let poles = family.singularities(0.0, lo - 1.0, hi + 1.0);
    let gap = POLE_GAP / family.params().sign.c().unwrap_or(1.0);
    (0..count)
        .map(|i| lo + (hi - lo) * (i as f64 + 0.5) / count as f64)
        .filter(|x| far_from(*x, &poles, gap))
        .collect()
}

/// Shape invariance, closed-form coefficient records, the
/// differential-difference equation and the factorization residuals.
pub fn shape_suite(points: usize) -> VerifyReport {
    let mut report = VerifyReport::new("shape");
    for (name, f) in shape_families() {
        let pair = PotentialPair::of_family(&f);
        let xs = shape_points(&f, points);
        let (mut shape, mut records, mut functional, mut fact) =
            (Sweep::default(), Sweep::default(), Sweep::default(), Sweep::default());
        for &m in &SHAPE_PARAMETERS {
            let record = closed_form_potentials(&f, m);
            for &x in &xs {
                shape.add(shape_invariance_residual(&f, m, x));
                match &record {
                    Ok(rec) => {
                        let d = f.params().d;
                        let r = rec.eval(&f, x).and_then(|(v, vt)| {
                            let dv = v + d - pair.v(x, m)?;
                            Ok(dv.abs().max((vt + d - pair.vtilde(x, m)?).abs()))
                        });
                        records.add(r);
                    }
                    Err(e) => records.add(Err(e.clone())),
                }
                functional.add(functional_residual(&f, m, x));
                fact.add(factorization_residuals(&f, m, x).map(|(a, b)| a.abs().max(b.abs())));
            }
        }
        report.push(shape.finish(format!("shape_invariance/{name}"), SHAPE_TOL, None));
        report.push(records.finish(format!("records/{name}"), SHAPE_TOL, None));
        report.push(functional.finish(format!("functional_equation/{name}"), SHAPE_TOL, None));
        report.push(fact.finish(format!("factorization/{name}"), SHAPE_TOL, None));
    }
    report
}

/// `k(m+1)^2 - k(m)^2 + k'(m+1) + k'(m) - (L(m) - L(m+1))`.
pub fn functional_residual(f: &Family, m: f64, x: f64) -> Result<f64> {
    let (k0, k1) = (f.k(x, m)?, f.k(x, m + 1.0)?);
    Ok(k1.value * k1.value - k0.value * k0.value + k1.deriv + k0.deriv - (f.L(m)? - f.L(m + 1.0)?))
}

// ----------------------------------------------------------------- adjoint

/// Tolerance of the discrete adjointness defect.
pub const ADJOINT_TOL: f64 = 1e-6;

fn gaussian(grid: &Grid, center: f64, width: f64, odd: bool) -> Result<GridFunction> {
    let g = GridFunction::from_fn(*grid, |x| {
        let u = (x - center) / width;
        Ok(if odd { u } else { 1.0 } * (-0.5 * u * u).exp())
    })?;
    g.scaled(1.0 / norm(&g))
}

/// `<phi, A psi> - <A^dagger phi, psi>` for two Gaussian bumps inside
/// `grid`, and the refusal when `phi psi` does not vanish at the ends.
pub fn adjoint_suite(w: &Superpotential, m: f64, grid: &Grid) -> VerifyReport {
    let mut report = VerifyReport::new("adjoint");
    let meta = Some(GridMeta::from(grid));
    let mid = 0.5 * (grid.x0() + grid.x1());
    let width = (grid.x1() - grid.x0()) / 16.0;
    let mut sweep = Sweep::default();
    let pair = gaussian(grid, mid - 0.3 * width, width, false)
        .and_then(|phi| Ok((phi, gaussian(grid, mid + 0.2 * width, width, true)?)));
    match pair {
        Ok((phi, psi)) => {
            sweep.add(adjointness_defect(w, m, &phi, &psi));
            sweep.add(adjointness_defect(w, m, &psi, &phi));
        }
        Err(e) => sweep.add(Err(e)),
    }
    report.push(sweep.finish("adjoint_defect", ADJOINT_TOL, meta));
    let one = GridFunction::from_fn(*grid, |_| Ok(1.0));
    let guard = match one.map(|one| adjointness_defect(w, m, &one, &one)) {
        Ok(Err(Error::Hypothesis(msg))) => Check {
            name: "adjoint_hypothesis_guard".into(),
            max_residual: 0.0,
            tolerance: 0.0,
            pass: true,
            samples: 1,
            grid: meta,
            diagnostic: Some(msg),
        },
        Ok(other) => Check {
            name: "adjoint_hypothesis_guard".into(),
            max_residual: f64::NAN,
            tolerance: 0.0,
            pass: false,
            samples: 1,
            grid: meta,
            diagnostic: Some(format!("expected a hypothesis error, got {other:?}")),
        },
        Err(e) => failed("adjoint_hypothesis_guard", 0.0, meta, &e),
    };
    report.push(guard);
    report
}

// ------------------------------------------------------------------ ladder

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LadderTolerances {
    /// Analytic against finite-difference energies, for `H` and `Ht`.
    pub energy: f64,
    /// `||H psi - E psi||` of a unit-norm state.
    pub eigen_residual: f64,
    /// `|<psi_j, psi_k>|`, `j != k`.
    pub orthogonality: f64,
    /// `||A psi_0|| / ||psi_0||` for the annihilated ground state.
    pub kernel: f64,
    /// `||(Ht A - A H) psi|| / ||psi||`.
    pub intertwining: f64,
}

impl Default for LadderTolerances {
    fn default() -> Self {
        Self { energy: 5e-3, eigen_residual: 1e-3, orthogonality: 1e-3, kernel: 1e-4, intertwining: 5e-3 }
    }
}

/// `exp(1 - 1/(1 - r^2))` on the middle half of the grid, zero outside.
pub fn compact_bump(grid: &Grid) -> Result<GridFunction> {
    let mid = 0.5 * (grid.x0() + grid.x1());
    let half = 0.25 * (grid.x1() - grid.x0());
    GridFunction::from_fn(*grid, |x| {
        let r = (x - mid) / half;
        Ok(if r.abs() < 1.0 { (1.0 - 1.0 / (1.0 - r * r)).exp() } else { 0.0 })
    })
}

fn rel_norm(a: &GridFunction, b: &GridFunction) -> f64 {
    norm(a) / norm(b)
}

/// Ladder and partner checks of `H(m)` for a family on `grid`: analytic
/// against numeric levels of `H` and `Ht`, the analytic level shift,
/// eigenvector residuals, node counts, orthogonality, the annihilated
/// ground state, and the intertwining `Ht A = A H` on a compact bump.
pub fn ladder_suite(
    family: &Family,
    m: f64,
    direction: ChainDirection,
    grid: &Grid,
    kmax: usize,
    tol: LadderTolerances,
) -> VerifyReport {
    let mut report = VerifyReport::new("ladder");
    let meta = Some(GridMeta::from(grid));
    let w = Superpotential::Family(*family);
    let pair = PotentialPair::of_family(family);
    let v = |x: f64| pair.v(x, m);
    let vt = |x: f64| pair.vtilde(x, m);
    let d = family.params().d;

    let chain = match spectrum_analytic(family, m, kmax, direction, d, Some((grid.x0(), grid.x1()))) {
        Ok(c) if !c.levels.is_empty() => c,
        Ok(_) => {
            let e = Error::Verification("no admissible level".into());
            report.push(failed("analytic_levels", 0.0, meta, &e));
            return report;
        }
        Err(e) => {
            report.push(failed("analytic_levels", 0.0, meta, &e));
            return report;
        }
    };

    let mut energies = Sweep::default();
    match spectrum_numeric(&v, grid, chain.levels.len()) {
        Ok(num) => {
            for (l, n) in chain.levels.iter().zip(&num) {
                energies.add(Ok(l.energy - n.energy));
            }
        }
        Err(e) => energies.add(Err(e)),
    }
    report.push(energies.finish("energies", tol.energy, meta));

    let mut shift = Sweep::default();
    let expected: Vec<f64> = match direction {
        ChainDirection::IncreasingL => chain.levels.iter().skip(1).map(|l| l.energy).collect(),
        ChainDirection::DecreasingL => {
            std::iter::once(d).chain(chain.levels.iter().map(|l| l.energy)).collect()
        }
    };
    if expected.len() != chain.partner_levels.len() {
        shift.add(Err(Error::Verification(format!(
            "{} partner levels for {} expected",
            chain.partner_levels.len(),
            expected.len()
        ))));
    }
    for (want, (_, got)) in expected.iter().zip(&chain.partner_levels) {
        shift.add(Ok(want - got));
    }
    report.push(shift.finish("partner_analytic", 0.0, None));

    let mut partner = Sweep::default();
    if !chain.partner_levels.is_empty() {
        match spectrum_numeric(&vt, grid, chain.partner_levels.len()) {
            Ok(num) => {
                for ((_, e), n) in chain.partner_levels.iter().zip(&num) {
                    partner.add(Ok(e - n.energy));
                }
            }
            Err(e) => partner.add(Err(e)),
        }
    }
    report.push(partner.finish("partner_numeric", tol.energy, meta));

    let (mut residual, mut nodes, mut ortho) = (Sweep::default(), Sweep::default(), Sweep::default());
    let mut states: Vec<GridFunction> = Vec::new();
    for l in &chain.levels {
        match excited_state(family, m, l.k, direction, grid) {
            Ok(wf) => {
                nodes.add(Ok(wf.nodes() as f64 - l.k as f64));
                residual.add(
                    apply_hamiltonian(&v, &wf.psi)
                        .and_then(|hp| hp.zip_with(&wf.psi, |a, b| a - l.energy * b))
                        .map(|r| norm(&r)),
                );
                for s in &states {
                    ortho.add(inner_product(s, &wf.psi));
                }
                states.push(wf.psi);
            }
            Err(e) => {
                residual.add(Err(e.clone()));
                nodes.add(Err(e));
            }
        }
    }
    report.push(residual.finish("eigen_residual", tol.eigen_residual, meta));
    report.push(nodes.finish("nodes", 0.0, meta));
    if states.len() > 1 {
        report.push(ortho.finish("orthogonality", tol.orthogonality, meta));
    }

    // A(m) annihilates exp(-int W(m)), A^dagger(m) annihilates exp(+int W(m))
    let op = match direction {
        ChainDirection::IncreasingL => LadderOp::Lower,
        ChainDirection::DecreasingL => LadderOp::Raise,
    };
    let mut kernel = Sweep::default();
    kernel.add(ground_state(&w, m, direction, grid).and_then(|g| {
        let out = ladder_apply(&w, m, op, &g.psi)?;
        Ok(rel_norm(&out, &g.psi))
    }));
    report.push(kernel.finish("kernel", tol.kernel, meta));

    let mut inter = Sweep::default();
    inter.add(compact_bump(grid).and_then(|psi| {
        let a_psi = ladder_apply(&w, m, LadderOp::Lower, &psi)?;
        let lhs = apply_hamiltonian(&vt, &a_psi)?;
        let h_psi = apply_hamiltonian(&v, &psi)?;
        let rhs = ladder_apply(&w, m, LadderOp::Lower, &h_psi)?;
        // the end samples of H psi are not defined; trim two points per side
        let n = grid.len();
        let diff: Vec<f64> = (0..n)
            .map(|i| if i < 2 || i + 2 >= n { 0.0 } else { lhs.values()[i] - rhs.values()[i] })
            .collect();
        Ok(rel_norm(&GridFunction::new(*grid, diff)?, &psi))
    }));
    report.push(inter.finish("intertwining", tol.intertwining, meta));
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn riccati_suite_passes() {
        let r = riccati_suite(DEFAULT_SEED, 60, 40);
        for c in &r.checks {
            assert!(c.pass, "{c:?}");
            assert!(c.samples > 0);
        }
    }

    #[test]
    fn shape_suite_passes() {
        let r = shape_suite(50);
        assert!(r.pass, "{:?}", r.failures().collect::<Vec<_>>());
        assert_eq!(r.checks.len(), 4 * 20);
    }

    #[test]
    fn adjoint_suite_passes_and_guards() {
        let w = Superpotential::custom(|x, _| Ok(crate::Jet::new(x, 1.0)));
        let g = Grid::new(-8.0, 8.0, 2001).unwrap();
        let r = adjoint_suite(&w, 0.0, &g);
        assert!(r.pass, "{:?}", r.checks);
    }

    #[test]
    fn ladder_suite_on_trig_family() {
        let f = Preset::TypeA.family(&FreeConstants::default()).unwrap();
        let g = Grid::new(1e-3, PI - 1e-3, 4001).unwrap();
        let r = ladder_suite(&f, 2.0, ChainDirection::DecreasingL, &g, 2, LadderTolerances::default());
        assert!(r.pass, "{:#?}", r.checks);
    }

    #[test]
    fn ladder_suite_refuses_coarse_grid() {
        let f = Preset::TypeD.family(&FreeConstants { forcing: 1.0, ..Default::default() }).unwrap();
        let g = Grid::new(-8.0, 8.0, 64).unwrap();
        let r = ladder_suite(&f, 1.0, ChainDirection::IncreasingL, &g, 3, LadderTolerances::default());
        assert!(!r.pass);
        assert!(r.failures().any(|c| c.diagnostic.as_deref().is_some_and(|d| d.contains("coarse"))));
    }

    #[test]
    fn sweep_keeps_first_error() {
        let mut s = Sweep::default();
        s.add(Ok(1e-12));
        s.add(Err(Error::Pole { x: 1.0 }));
        let c = s.finish("x", 1.0, None);
        assert!(!c.pass && c.diagnostic.is_some());
    }
}
