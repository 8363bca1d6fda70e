use std::process::{Command, Output};

use dynr_cli::report::ResidualReport;

fn verify(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_verify")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(code(&verify(&["momentum", "--algebra", "sl2", "--samples", "5"])), 0);
    assert_eq!(
        code(&verify(&["cdybe", "--samples", "5", "--tol", "pl_cdybe.k_nu=0"])),
        1
    );
    for bad in [
        &["compact", "--algebra", "sl2"][..],
        &["cdybe", "--algebra", "su2", "--nu", "0.3"],
        &["cdybe", "--algebra", "sl2", "--compact-theta", "0.3"],
        &["cdybe", "--domain-radius", "0.7"],
        &["cdybe", "--fd-step", "0.1"],
        &["cdybe", "--samples", "0"],
        &["cdybe", "--tol", "missing_equals"],
        &["cdybe", "--tol", "unknown=1e-3"],
        &["nonsense"],
        &["cdybe", "--algebra", "so3"],
    ] {
        let o = verify(bad);
        assert_eq!(code(&o), 2, "{bad:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn json_out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let args = [
        "cdybe",
        "--algebra",
        "su2",
        "--compact-theta",
        "0.7",
        "--samples",
        "4",
        "--format",
        "json",
    ];
    let o = verify(&[&args[..], &["--out", path.to_str().unwrap()]].concat());
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let file = std::fs::read_to_string(&path).unwrap();
    let stdout = String::from_utf8(verify(&args).stdout).unwrap();
    assert_eq!(file, stdout);
    let r = ResidualReport::from_json(&file).unwrap();
    assert_eq!(r.config.compact_theta, Some(0.7));
    assert!(r.wall_clock_seconds.is_none());
}

#[test]
fn timing_is_opt_in() {
    let o = verify(&["momentum", "--samples", "2", "--format", "json", "--timing"]);
    let r = ResidualReport::from_json(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert!(r.wall_clock_seconds.unwrap() >= 0.0);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    std::fs::write(
        &path,
        r#"{"algebra": "sl3", "nu": 0.25, "samples": 3, "seed": 9, "domain_radius": 0.2,
            "fd_step": 1e-5, "compact_invariant": "derived", "tolerances": {"abelian_limit": 1e-9}}"#,
    )
    .unwrap();
    let o = verify(&[
        "momentum",
        "--config",
        path.to_str().unwrap(),
        "--seed",
        "10",
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = ResidualReport::from_json(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(r.config.seed, 10);
    assert_eq!(r.config.nu, Some(0.25));
    assert_eq!(r.config.samples, 3);
    let a = r.checks.iter().find(|c| c.id == "abelian_limit").unwrap();
    assert_eq!(a.tolerance, 1e-9);

    std::fs::write(&path, "{ not json").unwrap();
    assert_eq!(code(&verify(&["momentum", "--config", path.to_str().unwrap()])), 2);
}

#[test]
fn text_output_lists_every_check() {
    let o = verify(&["groupoid", "--samples", "2"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("suite groupoid  algebra sl2"));
    assert!(text.contains("groupoid_isomorphism.flipped_k"));
    assert!(text.contains("jacobi.canonical_groupoid"));
}
