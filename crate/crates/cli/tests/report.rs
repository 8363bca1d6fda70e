use std::collections::BTreeSet;
use std::path::PathBuf;

use proptest::prelude::*;

use dynr_cli::config::{AlgebraChoice, CompactInvariant, SuiteConfig};
use dynr_cli::report::{CheckRecord, Expectation, ResidualReport, Verdict};
use dynr_cli::suite::{run_suite, SuiteError, SuiteName};

fn repo_file(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(rel)
}

fn schema() -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(repo_file("../../schema/report.schema.json")).unwrap()).unwrap()
}

fn keys(v: &serde_json::Value) -> BTreeSet<String> {
    v.as_object().unwrap().keys().cloned().collect()
}

/// Required keys present and no keys outside `properties`, recursively for
/// the config and check objects.
fn conforms(report: &serde_json::Value) {
    let s = schema();
    let check = |value: &serde_json::Value, def: &serde_json::Value| {
        let have = keys(value);
        for r in def["required"].as_array().unwrap() {
            assert!(have.contains(r.as_str().unwrap()), "missing {r}");
        }
        let allowed = keys(&def["properties"]);
        for k in &have {
            assert!(allowed.contains(k), "unexpected key {k}");
        }
    };
    check(report, &s);
    check(&report["config"], &s["$defs"]["config"]);
    for c in report["checks"].as_array().unwrap() {
        check(c, &s["$defs"]["check"]);
    }
    assert_eq!(report["schema_version"], s["properties"]["schema_version"]["const"]);
}

fn golden_config() -> SuiteConfig {
    SuiteConfig::new(AlgebraChoice::Sl2).with_param(0.35)
}

#[test]
fn golden_cdybe_report() {
    let body = run_suite(SuiteName::Cdybe, &golden_config()).unwrap().to_json();
    let path = repo_file("tests/golden/cdybe_sl2_nu0.35_seed42.json");
    if std::env::var_os("DYNR_BLESS").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, &body).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap();
    assert_eq!(body, want);
}

#[test]
fn reports_conform_to_schema() {
    for (suite, cfg) in [
        (SuiteName::Cdybe, golden_config().with_samples(3)),
        (SuiteName::All, SuiteConfig::new(AlgebraChoice::Su2).with_samples(2)),
    ] {
        let mut r = run_suite(suite, &cfg).unwrap();
        conforms(&serde_json::from_str(&r.to_json()).unwrap());
        r.wall_clock_seconds = Some(1.5);
        conforms(&serde_json::from_str(&r.to_json()).unwrap());
    }
}

#[test]
fn schedule_does_not_change_bytes() {
    let cfg = SuiteConfig::new(AlgebraChoice::Su2).with_samples(12);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_suite(SuiteName::All, &cfg).unwrap().to_json())
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn empty_report_passes() {
    let r = ResidualReport::new("cdybe", golden_config(), vec![]);
    assert_eq!(r.verdict, Verdict::Pass);
    assert_eq!(ResidualReport::from_json(&r.to_json()).unwrap(), r);
    conforms(&serde_json::from_str(&r.to_json()).unwrap());
}

#[test]
fn verdict_is_conjunction_of_records() {
    let good = CheckRecord::new("a", "x", &[1e-12, 2e-12], 0, 1e-8, Expectation::Pass);
    let control = CheckRecord::new("b", "x", &[0.3, 0.001], 0, 1e-3, Expectation::Fail);
    let bad = CheckRecord::new("c", "x", &[1e-12, 1e-7], 0, 1e-8, Expectation::Pass);
    let nan = CheckRecord::new("d", "x", &[f64::NAN], 0, 1e-8, Expectation::Pass);
    assert!(good.passed && control.passed && !bad.passed && !nan.passed);
    assert!((good.mean_residual - 1.5e-12).abs() < 1e-24);
    let cfg = golden_config();
    assert!(ResidualReport::new("x", cfg.clone(), vec![good.clone(), control.clone()]).passed());
    assert!(!ResidualReport::new("x", cfg, vec![good, control, bad]).passed());
}

#[test]
fn text_table_is_fixed_width() {
    let r = run_suite(SuiteName::Momentum, &golden_config().with_samples(2)).unwrap();
    let text = r.to_text();
    let rows: Vec<&str> = text.lines().skip(1).take(r.checks.len() + 1).collect();
    let col = rows[0].find("anchor").unwrap();
    for (row, rec) in rows[1..].iter().zip(&r.checks) {
        assert_eq!(&row[col..], rec.anchor);
    }
    assert!(text.ends_with("verdict: pass\n"));
}

#[test]
fn config_errors() {
    let bad = |cfg: SuiteConfig, suite| match run_suite(suite, &cfg) {
        Err(SuiteError::Config(_)) => {}
        other => panic!("expected a config error, got {other:?}"),
    };
    bad(SuiteConfig::new(AlgebraChoice::Sl2).with_samples(0), SuiteName::Cdybe);
    bad(SuiteConfig::new(AlgebraChoice::Sl3), SuiteName::Compact);
    let mut c = SuiteConfig::new(AlgebraChoice::Su2);
    c.nu = Some(0.3);
    bad(c, SuiteName::Cdybe);
    let mut c = SuiteConfig::new(AlgebraChoice::Sl2);
    c.compact_theta = Some(0.3);
    bad(c, SuiteName::Cdybe);
    let mut c = SuiteConfig::new(AlgebraChoice::Sl2);
    c.domain_radius = 0.5;
    bad(c, SuiteName::Cdybe);
    let mut c = SuiteConfig::new(AlgebraChoice::Sl2);
    c.fd_step = 1e-2;
    bad(c, SuiteName::Cdybe);
    let mut c = SuiteConfig::new(AlgebraChoice::Sl2);
    c.tolerances.insert("no_such_check".into(), 1.0);
    bad(c, SuiteName::Cdybe);
}

#[test]
fn tolerance_override_applies() {
    let mut cfg = golden_config().with_samples(3);
    cfg.tolerances.insert("pl_cdybe.k_nu".into(), 1e-30);
    let r = run_suite(SuiteName::Cdybe, &cfg).unwrap();
    let rec = r.checks.iter().find(|c| c.id == "pl_cdybe.k_nu").unwrap();
    assert_eq!(rec.tolerance, 1e-30);
    assert!(!rec.passed);
    assert!(!r.passed());
}

#[test]
fn stated_compact_invariant_is_selectable() {
    let mut cfg = SuiteConfig::new(AlgebraChoice::Su2).with_samples(3);
    cfg.compact_invariant = CompactInvariant::Stated;
    let r = run_suite(SuiteName::Cdybe, &cfg).unwrap();
    let rec = r.checks.iter().find(|c| c.id == "pl_cdybe.compact").unwrap();
    assert!(rec.max_residual > 1e-2);
}

fn record() -> impl Strategy<Value = CheckRecord> {
    (
        "[a-z_.]{1,20}",
        "[ -~]{0,40}",
        prop::collection::vec(0.0f64..1e3, 1..20),
        0u32..50,
        0.0f64..1.0,
        prop::bool::ANY,
    )
        .prop_map(|(id, anchor, res, k, tol, control)| {
            let e = if control { Expectation::Fail } else { Expectation::Pass };
            CheckRecord::new(&id, &anchor, &res, k, tol, e)
        })
}

proptest! {
    #[test]
    fn json_round_trip(
        recs in prop::collection::vec(record(), 0..6),
        seed in any::<u64>(),
        nu in 0.01f64..0.49,
        timing in prop::option::of(0.0f64..100.0),
    ) {
        let mut cfg = SuiteConfig::new(AlgebraChoice::Sl3).with_param(nu);
        cfg.seed = seed;
        let mut r = ResidualReport::new("groupoid", cfg, recs);
        r.wall_clock_seconds = timing;
        let back = ResidualReport::from_json(&r.to_json()).unwrap();
        prop_assert_eq!(back.to_json(), r.to_json());
        prop_assert_eq!(back, r);
    }
}

#[test]
fn schema_records_the_default_tolerances() {
    use dynr_cli::suite::*;
    let s = schema();
    let d = &s["x-default-tolerances"];
    for (key, value) in [
        ("exact", TOL_EXACT),
        ("finite_difference", TOL_FD),
        ("k_vanishing_branch", TOL_K_ZERO),
        ("poisson_map", TOL_POISSON_MAP),
        ("linear_algebra", TOL_LINEAR_ALGEBRA),
        ("derivative_transfer", TOL_TRANSFER),
        ("flow", TOL_FLOW),
        ("iwasawa", TOL_IWASAWA),
        ("cartan_coordinates", TOL_CARTAN),
        ("route_agreement", dynr::rmatrix::ROUTE_AGREEMENT),
        ("control_perturbed_k", CONTROL_K),
        ("control_wrong_exponent", CONTROL_EXPONENT),
    ] {
        assert_eq!(d[key].as_f64(), Some(value), "{key}");
    }
    let cfg = SuiteConfig::new(AlgebraChoice::Sl2);
    assert_eq!(cfg.domain_radius, 0.3);
    assert_eq!(cfg.fd_step, 1e-5);
    assert_eq!(cfg.samples, 100);
}
