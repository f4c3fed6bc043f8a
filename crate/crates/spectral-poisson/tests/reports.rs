use std::collections::BTreeMap;

use spectral_poisson::config::{resolve_suites, SuiteConfig, SuiteParams, Tolerances};
use spectral_poisson::report::{Check, Report, SCHEMA, VERSION};
use spectral_poisson::suites;

#[test]
fn empty_report_is_valid() {
    let dir = tempfile::tempdir().unwrap();
    let r = Report::new("jacobi", 3, BTreeMap::new(), vec![]);
    assert!(r.pass);
    let (json, csv) = r.emit(dir.path()).unwrap();
    assert_eq!(json.file_name().unwrap(), "jacobi-3.json");
    assert_eq!(csv.file_name().unwrap(), "jacobi-3.csv");
    let back: Report = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(back, r);
    assert_eq!(back.schema, SCHEMA);
    assert_eq!(back.version, env!("CARGO_PKG_VERSION"));
    assert_eq!(std::fs::read_to_string(csv).unwrap().lines().count(), 1);
}

#[test]
fn check_judgement() {
    assert_eq!(Check::below("a", 1e-7, 1e-6).pass, Some(true));
    assert_eq!(Check::below("a", f64::NAN, 1e-6).pass, Some(false));
    assert_eq!(Check::above("a", 1e-2, 1e-3).pass, Some(true));
    assert_eq!(Check::info_only("a", 5.0).pass, None);
    let failed = Report::new("x", 1, BTreeMap::new(), vec![Check::info_only("a", 1.0), Check::below("b", 2.0, 1.0)]);
    assert!(!failed.pass);
    assert_eq!(failed.failures().count(), 1);

    let err = Check::errored("c", Some(1.0), "boom");
    let text = serde_json::to_string(&err).unwrap();
    assert!(text.contains("\"value\":null"));
    let back: Check = serde_json::from_str(&text).unwrap();
    assert!(back.value.is_nan() && back.failed());
}

#[test]
fn same_seed_gives_identical_bytes() {
    let params = SuiteParams { powers: vec![0, 1], sizes: vec![2], states: 2, ..SuiteParams::default() };
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let (ja, ca) = suites::run("jacobi", &params).unwrap().emit(a.path()).unwrap();
    let (jb, cb) = suites::run("jacobi", &params).unwrap().emit(b.path()).unwrap();
    assert_eq!(std::fs::read(ja).unwrap(), std::fs::read(jb).unwrap());
    assert_eq!(std::fs::read(ca).unwrap(), std::fs::read(cb).unwrap());

    let other = SuiteParams { seed: params.seed + 1, ..params.clone() };
    let r = suites::run("jacobi", &other).unwrap();
    assert_eq!(r.seed, params.seed + 1);
    assert_eq!(r.json_name(), format!("jacobi-{}.json", params.seed + 1));
}

#[test]
fn reports_carry_convention_flags() {
    let r = suites::run("compat", &SuiteParams { powers: vec![0, 1], sizes: vec![2], ..SuiteParams::default() }).unwrap();
    for key in ["pole_circle_orientation", "ch_const_term", "flaschka", "compare_n", "phi1_weight"] {
        assert!(r.flags.contains_key(key), "{key}");
    }
    assert_eq!(r.flags["pole_circle_orientation"], "clockwise");
    assert_eq!(r.version, VERSION);
    assert_eq!(r.checks.len(), 5);
    assert!(r.pass);
}

#[test]
fn config_parsing_and_validation() {
    let cfg = SuiteConfig::from_toml(
        "seed = 11\nsuites = [\"jacobi\", \"toda\"]\noutput_dir = \"out\"\n[tolerances]\njacobi = 1e-7\n",
    )
    .unwrap();
    assert_eq!(cfg.seed, 11);
    assert_eq!(cfg.output_dir, std::path::PathBuf::from("out"));
    let tol = Tolerances::default().overridden(&cfg.tolerances).unwrap();
    assert_eq!(tol.jacobi, 1e-7);
    assert_eq!(tol.casimir, 1e-5);

    assert!(SuiteConfig::from_toml("suites = [\"nope\"]").is_err());
    assert!(SuiteConfig::from_toml("[tolerances]\nmystery = 1.0").is_err());
    assert!(SuiteConfig::from_toml("[tolerances]\njacobi = -1.0").is_err());
    assert!(SuiteConfig::from_toml("colour = 3").is_err());

    assert_eq!(resolve_suites(&["all".into()]).unwrap().len(), 5);
    let e = resolve_suites(&["jacobi".into(), "kdvv".into()]).unwrap_err();
    assert_eq!(e.exit_code(), 2);
}

#[test]
fn tampered_suites_fail() {
    let params = SuiteParams { powers: vec![0, 1], sizes: vec![2], states: 1, tamper: true, ..SuiteParams::default() };
    for suite in ["jacobi", "compat", "ch", "toda"] {
        let r = suites::run(suite, &params).unwrap();
        assert!(!r.pass, "{suite}");
    }
}
