mod common;

use shapeinv_cli::config::{reference_cases, RunConfig};

#[test]
fn golden_files_match_and_are_stable() {
    let dir = tempfile::tempdir().unwrap();
    for case in common::CASES {
        common::golden_case(case, dir.path()).unwrap_or_else(|e| panic!("{case}: {e}"));
    }
}

#[test]
fn exit_code_matrix() {
    common::check_exit_matrix().unwrap();
}

#[test]
fn golden_configs_are_the_reference_cases() {
    for r in reference_cases() {
        let text = std::fs::read_to_string(common::config_path(r.name)).unwrap();
        let mut cfg = RunConfig::from_json(&text).unwrap();
        cfg.tol = None;
        assert_eq!(cfg, r.config, "{}", r.name);
    }
}

#[test]
fn dump_config_re_parses_identically() {
    for case in common::CASES {
        let cfg = common::config_path(case);
        let out = common::shapeinv(&["spectrum", "--config", cfg.to_str().unwrap(), "--dump-config"]);
        assert_eq!(out.status.code(), Some(0));
        let dumped = RunConfig::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
        let original = RunConfig::from_json(&std::fs::read_to_string(&cfg).unwrap()).unwrap();
        assert_eq!(dumped, original);
    }
}
