use std::path::PathBuf;
use std::sync::Arc;

use dynr::liealg::{AlgebraDescriptor, LieAlgebra, ScalarField};
use dynr::linalg;
use dynr::poisson::{build_chart, ChartKind, ChartParams};

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

/// Compares with the committed file; DYNR_BLESS=1 rewrites it.
fn check_golden(name: &str, body: &str) {
    let path = golden(name);
    if std::env::var_os("DYNR_BLESS").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, body).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(body, want, "{name} differs from the golden file");
}

fn schema(name: &str) -> serde_json::Value {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../schema")
        .join(name);
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn algebra_descriptors_match_golden() {
    for (file, alg) in [
        ("sl2.json", LieAlgebra::sl(2, ScalarField::Real).unwrap()),
        ("su2.json", LieAlgebra::su(2).unwrap()),
        ("borel2.json", LieAlgebra::borel(2).unwrap()),
    ] {
        let desc = alg.descriptor();
        let body = serde_json::to_string_pretty(&desc).unwrap() + "\n";
        check_golden(file, &body);
        let back: AlgebraDescriptor = serde_json::from_str(&body).unwrap();
        assert_eq!(back, desc);
    }
}

#[test]
fn chart_descriptors_match_golden() {
    let sl2 = Arc::new(LieAlgebra::sl(2, ScalarField::Real).unwrap());
    let su2 = Arc::new(LieAlgebra::su(2).unwrap());
    let charts = [
        build_chart(ChartKind::Heisenberg, sl2.clone(), ChartParams::at_identity(0.35, 2)).unwrap(),
        build_chart(ChartKind::WznwGroupoid, sl2, ChartParams::at_identity(0.35, 2)).unwrap(),
        build_chart(
            ChartKind::CompactGroupoid,
            su2,
            ChartParams::new(0.3, linalg::identity(2)),
        )
        .unwrap(),
    ];
    let all: Vec<_> = charts.iter().map(|c| c.descriptor()).collect();
    check_golden("charts.json", &(serde_json::to_string_pretty(&all).unwrap() + "\n"));
}

#[test]
fn descriptors_carry_the_schema_version() {
    let s = schema("algebra.schema.json");
    let version = s["properties"]["schema_version"]["const"].as_u64().unwrap();
    let desc = LieAlgebra::sl(3, ScalarField::Real).unwrap().descriptor();
    assert_eq!(desc.schema_version as u64, version);
    let value = serde_json::to_value(&desc).unwrap();
    for key in s["required"].as_array().unwrap() {
        assert!(value.get(key.as_str().unwrap()).is_some(), "missing {key}");
    }
}
