use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use shapeinv_core::numerics::{spectrum_numeric, NumericLevel};
use shapeinv_core::partners::{closed_form_potentials, Superpotential};
use shapeinv_core::spectra::{check_normalizable, excited_state, recipe, spectrum_analytic, Truncation};
use shapeinv_core::verify::{
    adjoint_suite, ladder_suite, riccati_suite, shape_suite, GridMeta, LadderTolerances, VerifyReport,
};
use shapeinv_core::{ChainDirection, Error, Family, FamilyKind, Grid, PotentialPair, Preset};

use crate::config::{
    poles_in, reference_cases, resolve_direction, resolve_grid, resolve_interval, Format, RunConfig,
    DEFAULT_SPECTRUM_TOL,
};
use crate::report::{CliError, ExitCode};

pub const GENERATED_BY: &str = concat!("shapeinv ", env!("CARGO_PKG_VERSION"));

/// Draws of the Riccati suite.
pub const RICCATI_DRAWS: usize = 200;
/// Sample points per draw, and per family in the shape suite.
pub const SUITE_POINTS: usize = 200;

/// What a command produced: the data document and, on a soft failure, the
/// error to report after the data is written.
pub struct Outcome {
    pub body: String,
    pub sidecar: Option<String>,
    pub failure: Option<CliError>,
}

impl Outcome {
    fn ok(body: String) -> Self {
        Self { body, sidecar: None, failure: None }
    }
}

/// Doubles in shortest round-trip form.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn write_outcome(outcome: &Outcome, out: Option<&Path>, stdout: &mut dyn std::io::Write) -> Result<(), CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, &outcome.body).map_err(|e| CliError::io(path, e))?;
            if let Some(side) = &outcome.sidecar {
                let p = sidecar_path(path);
                std::fs::write(&p, side).map_err(|e| CliError::io(&p, e))?;
            }
        }
        None => {
            stdout.write_all(outcome.body.as_bytes()).map_err(|e| CliError::io(Path::new("<stdout>"), e))?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- families

#[derive(Serialize)]
struct PresetEntry {
    name: &'static str,
    kind: &'static str,
    sign: &'static str,
    #[serde(rename = "B")]
    selector: shapeinv_core::ExtendedReal,
    free_slots: &'static [&'static str],
}

fn kind_label(k: FamilyKind) -> &'static str {
    match k {
        FamilyKind::Affine => "affine",
        FamilyKind::InversePower => "inverse",
    }
}

pub fn families(query: Option<&str>, format: Option<Format>) -> Result<Outcome, CliError> {
    let mut presets: Vec<Preset> = match query {
        Some(name) => vec![Preset::from_name(name)?],
        None => Preset::ALL.to_vec(),
    };
    presets.sort_by_key(|p| p.name());
    let entries: Vec<PresetEntry> = presets
        .iter()
        .map(|p| PresetEntry {
            name: p.name(),
            kind: kind_label(p.kind()),
            sign: p.sign_label(),
            selector: p.selector(),
            free_slots: p.free_slots(),
        })
        .collect();
    let body = match format {
        Some(Format::Json) => to_json(&entries),
        Some(Format::Csv) => {
            let mut s = String::from("name,kind,sign,B,free_slots\n");
            for e in &entries {
                writeln!(s, "{},{},{},{},{}", e.name, e.kind, e.sign, e.selector, e.free_slots.join(";")).unwrap();
            }
            s
        }
        None => {
            let mut s = format!("{:<16}{:<9}{:<6}{:<5}free slots\n", "name", "kind", "sign", "B");
            for e in &entries {
                writeln!(
                    s,
                    "{:<16}{:<9}{:<6}{:<5}{}",
                    e.name,
                    e.kind,
                    e.sign,
                    e.selector.to_string(),
                    e.free_slots.join(", ")
                )
                .unwrap();
            }
            s
        }
    };
    Ok(Outcome::ok(body))
}

// -------------------------------------------------------------------- eval

fn pole_error(poles: &[f64], lo: f64, hi: f64) -> CliError {
    CliError::new(
        ExitCode::Pole,
        "pole",
        format!("W has {} pole(s) inside [{lo}, {hi}]", poles.len()),
    )
    .with_details(json!({ "poles": poles }))
}

fn check_poles(family: &Family, m: f64, lo: f64, hi: f64) -> Result<(), CliError> {
    let poles = poles_in(family, m, lo, hi);
    if poles.is_empty() {
        Ok(())
    } else {
        Err(pole_error(&poles, lo, hi))
    }
}

#[derive(Serialize)]
struct EvalReport {
    m: f64,
    d: f64,
    x: Vec<f64>,
    #[serde(rename = "W")]
    w: Vec<f64>,
    #[serde(rename = "V")]
    v: Vec<f64>,
    #[serde(rename = "Vtilde")]
    vtilde: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    record: Option<shapeinv_core::partners::CoefficientRecord>,
}

pub fn eval(cfg: &RunConfig, format: Option<Format>) -> Result<Outcome, CliError> {
    let family = cfg.family()?;
    let m = cfg.m()?;
    let (lo, hi) = resolve_interval(cfg, &family, m)?;
    let n = cfg.n();
    if n < 2 {
        return Err(CliError::usage("eval needs n >= 2"));
    }
    check_poles(&family, m, lo, hi)?;
    let pair = PotentialPair::of_family(&family);
    let h = (hi - lo) / (n - 1) as f64;
    let mut rep = EvalReport {
        m,
        d: family.params().d,
        x: Vec::with_capacity(n),
        w: Vec::with_capacity(n),
        v: Vec::with_capacity(n),
        vtilde: Vec::with_capacity(n),
        record: closed_form_potentials(&family, m).ok(),
    };
    for i in 0..n {
        let x = if i + 1 == n { hi } else { lo + i as f64 * h };
        rep.x.push(x);
        rep.w.push(family.k(x, m)?.value);
        rep.v.push(pair.v(x, m)?);
        rep.vtilde.push(pair.vtilde(x, m)?);
    }
    let body = match format.unwrap_or(Format::Csv) {
        Format::Json => to_json(&rep),
        Format::Csv => {
            let mut s = String::from("x,W,V,Vtilde\n");
            for i in 0..n {
                writeln!(s, "{},{},{},{}", fmt_f64(rep.x[i]), fmt_f64(rep.w[i]), fmt_f64(rep.v[i]), fmt_f64(rep.vtilde[i]))
                    .unwrap();
            }
            s
        }
    };
    Ok(Outcome::ok(body))
}

// ---------------------------------------------------------------- spectrum

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SpectrumMode {
    Analytic,
    Numeric,
    Both,
}

#[derive(Serialize)]
struct LevelOut {
    k: usize,
    #[serde(rename = "E")]
    energy: f64,
    #[serde(rename = "E_numeric", skip_serializing_if = "Option::is_none")]
    numeric: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    abs_diff: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    richardson_error: Option<f64>,
}

#[derive(Serialize)]
struct SpectrumReport {
    m: f64,
    direction: &'static str,
    mode: &'static str,
    d: f64,
    grid: GridMeta,
    levels: Vec<LevelOut>,
    partner_levels: Vec<LevelOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    truncation: Option<Truncation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_abs_diff: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tol: Option<f64>,
}

fn numeric_levels(v: &dyn Fn(f64) -> shapeinv_core::Result<f64>, grid: &Grid, count: usize) -> Result<Vec<NumericLevel>, CliError> {
    if count == 0 {
        return Ok(Vec::new());
    }
    Ok(spectrum_numeric(v, grid, count)?)
}

/// Seed of level 0 must pass the screen, otherwise there is no chain.
fn require_ground(family: &Family, m: f64, direction: ChainDirection, grid: &Grid) -> Result<(), CliError> {
    let (seed, _) = recipe(m, 0, direction);
    let w = Superpotential::Family(*family);
    check_normalizable(&w, seed, direction, (grid.x0(), grid.x1()))?.into_result()?;
    Ok(())
}

pub fn spectrum(cfg: &RunConfig, mode: SpectrumMode, format: Option<Format>) -> Result<Outcome, CliError> {
    let family = cfg.family()?;
    let m = cfg.m()?;
    let grid = resolve_grid(cfg, &family, m)?;
    check_poles(&family, m, grid.x0(), grid.x1())?;
    let d = family.params().d;
    let pair = PotentialPair::of_family(&family);
    let v = |x: f64| pair.v(x, m);
    let vt = |x: f64| pair.vtilde(x, m);
    let tol = cfg.tol.unwrap_or(DEFAULT_SPECTRUM_TOL);
    let count = cfg.kmax + 1;

    let mut report = SpectrumReport {
        m,
        direction: "auto",
        mode: match mode {
            SpectrumMode::Analytic => "analytic",
            SpectrumMode::Numeric => "numeric",
            SpectrumMode::Both => "both",
        },
        d,
        grid: GridMeta::from(&grid),
        levels: Vec::new(),
        partner_levels: Vec::new(),
        truncation: None,
        max_abs_diff: None,
        tol: None,
    };
    let mut failure = None;
    if mode == SpectrumMode::Numeric {
        for (l, out) in [(numeric_levels(&v, &grid, count)?, &mut report.levels), (numeric_levels(&vt, &grid, count)?, &mut report.partner_levels)] {
            out.extend(l.into_iter().map(|n| LevelOut {
                k: n.k,
                energy: n.energy,
                numeric: None,
                abs_diff: None,
                richardson_error: Some(n.richardson_error),
            }));
        }
        if let Some(dir) = cfg.direction.fixed() {
            report.direction = dir.label();
        }
    } else {
        let direction = resolve_direction(cfg.direction, &family, m, (grid.x0(), grid.x1()))?;
        report.direction = direction.label();
        require_ground(&family, m, direction, &grid)?;
        let chain = spectrum_analytic(&family, m, cfg.kmax, direction, d, Some((grid.x0(), grid.x1())))?;
        report.truncation = chain.truncation.clone();
        let analytic: Vec<(usize, f64)> = chain.levels.iter().map(|l| (l.k, l.energy)).collect();
        let sides = [(analytic, &v as &dyn Fn(f64) -> _, 0usize), (chain.partner_levels.clone(), &vt, 1)];
        let mut max_diff = 0.0f64;
        for (levels, pot, side) in sides {
            let numeric = if mode == SpectrumMode::Both { numeric_levels(pot, &grid, levels.len())? } else { Vec::new() };
            let out: Vec<LevelOut> = levels
                .iter()
                .enumerate()
                .map(|(i, &(k, e))| {
                    let n = numeric.get(i);
                    let diff = n.map(|n| (e - n.energy).abs());
                    if let Some(dd) = diff {
                        max_diff = max_diff.max(dd);
                    }
                    LevelOut { k, energy: e, numeric: n.map(|n| n.energy), abs_diff: diff, richardson_error: n.map(|n| n.richardson_error) }
                })
                .collect();
            if side == 0 {
                report.levels = out;
            } else {
                report.partner_levels = out;
            }
        }
        if mode == SpectrumMode::Both {
            report.max_abs_diff = Some(max_diff);
            report.tol = Some(tol);
            if !(max_diff <= tol) {
                failure = Some(
                    CliError::new(ExitCode::Tolerance, "tolerance", format!("max |Delta E| = {max_diff:e} exceeds tol = {tol:e}"))
                        .with_details(json!({ "max_abs_diff": max_diff, "tol": tol })),
                );
            }
        }
    }
    let body = match format.unwrap_or(Format::Json) {
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut s = String::from("operator,k,E,E_numeric,abs_diff,richardson_error\n");
            let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
            for (name, levels) in [("H", &report.levels), ("Htilde", &report.partner_levels)] {
                for l in levels {
                    writeln!(s, "{name},{},{},{},{},{}", l.k, fmt_f64(l.energy), opt(l.numeric), opt(l.abs_diff), opt(l.richardson_error)).unwrap();
                }
            }
            s
        }
    };
    Ok(Outcome { body, sidecar: None, failure })
}

// ------------------------------------------------------------------ verify

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Riccati,
    Shape,
    Adjoint,
    Ladder,
    All,
}

struct Case {
    name: String,
    family: Family,
    m: f64,
    grid: Grid,
    direction: shapeinv_core::Result<ChainDirection>,
    kmax: usize,
}

fn cases(cfg: &RunConfig) -> Result<Vec<Case>, CliError> {
    let configs: Vec<(String, RunConfig)> = if cfg.family.is_some() {
        vec![("config".to_string(), cfg.clone())]
    } else {
        reference_cases().into_iter().map(|c| (c.name.to_string(), c.config)).collect()
    };
    configs
        .into_iter()
        .map(|(name, c)| {
            let family = c.family()?;
            let m = c.m()?;
            let grid = resolve_grid(&c, &family, m)?;
            let direction = resolve_direction(c.direction, &family, m, (grid.x0(), grid.x1()))
                .map_err(|e| Error::Verification(e.message));
            Ok(Case { name, family, m, grid, direction, kmax: c.kmax })
        })
        .collect()
}

fn prefixed(mut r: VerifyReport, prefix: &str) -> VerifyReport {
    for c in &mut r.checks {
        c.name = format!("{prefix}/{}", c.name);
    }
    r
}

pub fn verify(cfg: &RunConfig, suite: Suite, seed: u64, format: Option<Format>) -> Result<Outcome, CliError> {
    let name = match suite {
        Suite::Riccati => "riccati",
        Suite::Shape => "shape",
        Suite::Adjoint => "adjoint",
        Suite::Ladder => "ladder",
        Suite::All => "all",
    };
    let mut report = VerifyReport::new(name);
    if matches!(suite, Suite::Riccati | Suite::All) {
        report.merge(riccati_suite(seed, RICCATI_DRAWS, SUITE_POINTS));
    }
    if matches!(suite, Suite::Shape | Suite::All) {
        report.merge(shape_suite(SUITE_POINTS));
    }
    if matches!(suite, Suite::Adjoint | Suite::Ladder | Suite::All) {
        let tol = LadderTolerances { energy: cfg.tol.unwrap_or(LadderTolerances::default().energy), ..Default::default() };
        for case in cases(cfg)? {
            let w = Superpotential::Family(case.family);
            if matches!(suite, Suite::Adjoint | Suite::All) {
                report.merge(prefixed(adjoint_suite(&w, case.m, &case.grid), &case.name));
            }
            if matches!(suite, Suite::Ladder | Suite::All) {
                match case.direction {
                    Ok(dir) => {
                        let r = ladder_suite(&case.family, case.m, dir, &case.grid, case.kmax, tol);
                        report.merge(prefixed(r, &case.name));
                    }
                    Err(e) => {
                        let mut r = VerifyReport::new("ladder");
                        r.push(shapeinv_core::verify::Check {
                            name: "direction".into(),
                            max_residual: f64::NAN,
                            tolerance: 0.0,
                            pass: false,
                            samples: 0,
                            grid: Some(GridMeta::from(&case.grid)),
                            diagnostic: Some(e.to_string()),
                        });
                        report.merge(prefixed(r, &case.name));
                    }
                }
            }
        }
    }
    let failure = (!report.pass).then(|| {
        let failed: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
        CliError::new(ExitCode::VerifyFail, "verify_failed", format!("{} check(s) failed", failed.len()))
            .with_details(json!({ "failed": failed }))
    });
    let body = match format.unwrap_or(Format::Json) {
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut s = String::from("name,max_residual,tolerance,pass\n");
            for c in &report.checks {
                writeln!(s, "{},{},{},{}", c.name, fmt_f64(c.max_residual), fmt_f64(c.tolerance), c.pass).unwrap();
            }
            s
        }
    };
    Ok(Outcome { body, sidecar: None, failure })
}

// ------------------------------------------------------------ wavefunction

#[derive(Serialize)]
struct WaveMeta {
    k: usize,
    #[serde(rename = "E")]
    energy: f64,
    nodes: usize,
    norm: f64,
    m: f64,
    direction: &'static str,
    grid: GridMeta,
    generated_by: &'static str,
}

pub fn wavefunction(cfg: &RunConfig, k: usize, format: Option<Format>) -> Result<Outcome, CliError> {
    let family = cfg.family()?;
    let m = cfg.m()?;
    let grid = resolve_grid(cfg, &family, m)?;
    check_poles(&family, m, grid.x0(), grid.x1())?;
    let direction = resolve_direction(cfg.direction, &family, m, (grid.x0(), grid.x1()))?;
    require_ground(&family, m, direction, &grid)?;
    let chain = spectrum_analytic(&family, m, k, direction, family.params().d, Some((grid.x0(), grid.x1())))?;
    if chain.levels.len() <= k {
        let t = chain.truncation.as_ref();
        let reason = t.map(|t| t.reason.clone()).unwrap_or_default();
        return Err(CliError::new(
            ExitCode::Truncation,
            "truncation",
            format!("level {k} requested but the chain has {} bound level(s): {reason}", chain.levels.len()),
        )
        .with_details(json!({ "requested_k": k, "available": chain.levels.len(), "reason": reason })));
    }
    let wf = excited_state(&family, m, k, direction, &grid)?;
    let meta = WaveMeta {
        k,
        energy: wf.energy.unwrap_or(chain.levels[k].energy),
        nodes: wf.nodes(),
        norm: wf.norm(),
        m,
        direction: direction.label(),
        grid: GridMeta::from(&grid),
        generated_by: GENERATED_BY,
    };
    let xs: Vec<f64> = grid.points().collect();
    match format.unwrap_or(Format::Csv) {
        Format::Json => {
            let mut doc = serde_json::to_value(&meta).expect("meta serializes");
            doc["x"] = json!(xs);
            doc["psi"] = json!(wf.psi.values());
            Ok(Outcome::ok(to_json(&doc)))
        }
        Format::Csv => {
            let mut s = String::from("x,psi\n");
            for (x, p) in xs.iter().zip(wf.psi.values()) {
                writeln!(s, "{},{}", fmt_f64(*x), fmt_f64(*p)).unwrap();
            }
            Ok(Outcome { body: s, sidecar: Some(to_json(&meta)), failure: None })
        }
    }
}
