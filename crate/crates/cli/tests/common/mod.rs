#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub const CASES: [&str; 3] = ["oscillator", "trigonometric", "hyperbolic"];

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

pub fn config_path(case: &str) -> PathBuf {
    golden_dir().join(format!("{case}.json"))
}

pub fn shapeinv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shapeinv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn bless() -> bool {
    std::env::var_os("SHAPEINV_BLESS").is_some()
}

fn compare(name: &str, got: &[u8]) -> Result<(), String> {
    let path = golden_dir().join(name);
    if bless() {
        std::fs::write(&path, got).map_err(|e| e.to_string())?;
        return Ok(());
    }
    let want = std::fs::read(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if want == got {
        Ok(())
    } else {
        let line = want
            .split(|b| *b == b'\n')
            .zip(got.split(|b| *b == b'\n'))
            .position(|(a, b)| a != b)
            .map(|i| i + 1)
            .unwrap_or(0);
        Err(format!("{name} differs from golden file (first differing line {line})"))
    }
}

fn expect_code(out: &Output, code: i32, what: &str) -> Result<(), String> {
    if out.status.code() == Some(code) {
        Ok(())
    } else {
        Err(format!(
            "{what}: exit {:?}, expected {code}; stderr: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ))
    }
}

/// The data files of one cross-check configuration match the golden files
/// and are identical across repeated runs.
pub fn golden_case(case: &str, scratch: &Path) -> Result<(), String> {
    let cfg = config_path(case);
    let cfg = cfg.to_str().unwrap();

    let spectrum = shapeinv(&["spectrum", "both", "--config", cfg]);
    expect_code(&spectrum, 0, "spectrum both")?;
    compare(&format!("{case}.spectrum.json"), &spectrum.stdout)?;
    let again = shapeinv(&["spectrum", "both", "--config", cfg]);
    if again.stdout != spectrum.stdout {
        return Err("spectrum output is not byte-stable".into());
    }

    let eval = shapeinv(&["eval", "--config", cfg, "--n", "21"]);
    expect_code(&eval, 0, "eval")?;
    compare(&format!("{case}.eval.csv"), &eval.stdout)?;

    let mut first: Option<(Vec<u8>, Vec<u8>)> = None;
    for run in 0..2 {
        let out = scratch.join(format!("{case}.{run}.psi.csv"));
        let o = shapeinv(&["wavefunction", "--config", cfg, "--k", "1", "--out", out.to_str().unwrap()]);
        expect_code(&o, 0, "wavefunction")?;
        let csv = std::fs::read(&out).map_err(|e| e.to_string())?;
        let side = std::fs::read(scratch.join(format!("{case}.{run}.psi.csv.json"))).map_err(|e| e.to_string())?;
        if !csv.starts_with(b"x,psi\n") {
            return Err("wavefunction CSV header".into());
        }
        match &first {
            None => first = Some((csv, side)),
            Some((c, s)) => {
                if *c != csv || *s != side {
                    return Err("wavefunction output is not byte-stable".into());
                }
            }
        }
    }
    compare(&format!("{case}.psi1.json"), &first.unwrap().1)?;
    Ok(())
}

/// `(description, args, expected exit code)`.
pub fn exit_matrix() -> Vec<(&'static str, Vec<String>, i32)> {
    let osc = config_path("oscillator").to_str().unwrap().to_string();
    let trig = config_path("trigonometric").to_str().unwrap().to_string();
    let hyp = config_path("hyperbolic").to_str().unwrap().to_string();
    let s = |v: &[&str]| v.iter().map(|a| a.to_string()).collect::<Vec<_>>();
    vec![
        ("families", s(&["families"]), 0),
        ("unknown flag", s(&["spectrum", "--frobnicate"]), 1),
        ("unknown preset", s(&["families", "--preset", "Z"]), 1),
        ("missing family", s(&["eval", "--m", "1"]), 1),
        ("pole in grid", s(&["eval", "--preset", "A", "--m", "2", "--xmin", "-1", "--xmax", "1", "--n", "11"]), 2),
        ("tolerance", s(&["spectrum", "both", "--config", &osc, "--tol", "1e-9"]), 3),
        ("wrong direction", s(&["spectrum", "--config", &trig, "--direction", "increasing"]), 4),
        ("coarse ladder", s(&["verify", "ladder", "--config", &osc, "--n", "64"]), 5),
        ("beyond bound states", s(&["wavefunction", "--config", &hyp, "--k", "3"]), 6),
    ]
}

/// Runs the matrix; every failure must also leave a JSON document with the
/// same exit code on standard error.
pub fn check_exit_matrix() -> Result<(), String> {
    for (what, args, code) in exit_matrix() {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = shapeinv(&args);
        expect_code(&out, code, what)?;
        if code != 0 {
            let text = String::from_utf8_lossy(&out.stderr);
            let last = text.lines().last().unwrap_or_default();
            let v: serde_json::Value =
                serde_json::from_str(last).map_err(|e| format!("{what}: stderr is not JSON ({e}): {text}"))?;
            if v["exit_code"] != code {
                return Err(format!("{what}: diagnostic carries exit code {}", v["exit_code"]));
            }
        }
    }
    Ok(())
}
