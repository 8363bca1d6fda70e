//! Acceptance criteria 1 to 9.
//!
//! Each test prints one `criterion N: PASS|FAIL` line (written past the
//! capture, so it shows up in plain `cargo test` output) and then asserts.
//! Bounds are written out here rather than taken from the suite defaults.

use std::io::Write;
use std::process::Command;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use dynr_cli::config::{AlgebraChoice, CompactInvariant, SuiteConfig};
use dynr_cli::report::{CheckRecord, ResidualReport};
use dynr_cli::suite::{run_suite, SuiteName};

use AlgebraChoice::{Sl2, Sl3, Su2, Su3};

/// The criteria time themselves; running them one at a time keeps the
/// measurements honest.
static SERIAL: Mutex<()> = Mutex::new(());

const SAMPLES: usize = 100;

enum Bound {
    AtMost(f64),
    AtLeast(f64),
}

struct Item {
    label: String,
    value: f64,
    bound: Bound,
}

impl Item {
    fn ok(&self) -> bool {
        self.value.is_finite()
            && match self.bound {
                Bound::AtMost(b) => self.value <= b,
                Bound::AtLeast(b) => self.value >= b,
            }
    }

    fn describe(&self) -> String {
        match self.bound {
            Bound::AtMost(b) => format!("{} = {:.3e} (need <= {:.0e})", self.label, self.value, b),
            Bound::AtLeast(b) => format!("{} = {:.3e} (need >= {:.0e})", self.label, self.value, b),
        }
    }
}

struct Criterion {
    number: u32,
    title: &'static str,
    items: Vec<Item>,
}

impl Criterion {
    fn new(number: u32, title: &'static str) -> Self {
        Criterion {
            number,
            title,
            items: Vec::new(),
        }
    }

    fn at_most(&mut self, label: impl Into<String>, value: f64, bound: f64) {
        self.items.push(Item {
            label: label.into(),
            value,
            bound: Bound::AtMost(bound),
        });
    }

    fn at_least(&mut self, label: impl Into<String>, value: f64, bound: f64) {
        self.items.push(Item {
            label: label.into(),
            value,
            bound: Bound::AtLeast(bound),
        });
    }

    fn seconds(&mut self, label: impl Into<String>, t: Duration, limit: f64) {
        self.at_most(format!("{} seconds", label.into()), t.as_secs_f64(), limit);
    }

    /// Prints the verdict line (and one line per failed item) and asserts.
    fn finish(self) {
        let failed: Vec<&Item> = self.items.iter().filter(|i| !i.ok()).collect();
        let verdict = if failed.is_empty() { "PASS" } else { "FAIL" };
        let mut out = format!(
            "criterion {}: {verdict}  {} ({} of {} items within bounds)\n",
            self.number,
            self.title,
            self.items.len() - failed.len(),
            self.items.len()
        );
        for i in &failed {
            out.push_str(&format!("    failed: {}\n", i.describe()));
        }
        let mut stdout = std::io::stdout().lock();
        let _ = stdout.write_all(out.as_bytes());
        let _ = stdout.flush();
        assert!(!self.items.is_empty());
        assert!(failed.is_empty(), "{out}");
    }
}

fn config(alg: AlgebraChoice, p: f64) -> SuiteConfig {
    SuiteConfig::new(alg).with_param(p).with_samples(SAMPLES)
}

fn run(suite: SuiteName, cfg: &SuiteConfig) -> (ResidualReport, Duration) {
    let t = Instant::now();
    let r = run_suite(suite, cfg).unwrap_or_else(|e| panic!("{suite} on {}: {e}", cfg.algebra));
    (r, t.elapsed())
}

fn record<'a>(r: &'a ResidualReport, id: &str) -> &'a CheckRecord {
    let rec = r
        .checks
        .iter()
        .find(|c| c.id == id)
        .unwrap_or_else(|| panic!("no record {id}"));
    assert_eq!(rec.samples, r.config.samples, "{id}");
    rec
}

fn lock() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

#[test]
fn criterion_1_pl_cdybe() {
    let _g = lock();
    let mut c = Criterion::new(1, "PL-CDYBE for K^nu against (1/4 - nu^2) f^ on sl2, sl3");
    for alg in [Sl2, Sl3] {
        for nu in [0.25, 0.35, 0.5] {
            let (r, t) = run(SuiteName::Cdybe, &config(alg, nu));
            let bound = if nu == 0.5 { 1e-12 } else { 1e-8 };
            c.at_most(
                format!("{alg} nu={nu} residual"),
                record(&r, "pl_cdybe.k_nu").max_residual,
                bound,
            );
            c.seconds(format!("{alg} nu={nu}"), t, 10.0);
        }
    }
    c.finish();
}

#[test]
fn criterion_2_compact_pl_cdybe() {
    let _g = lock();
    let mut c = Criterion::new(2, "compact PL-CDYBE against (1/(16 theta^2) - 3/4) f^ on su2, su3");
    for alg in [Su2, Su3] {
        for theta in [0.1, 0.3, 0.7] {
            let mut cfg = config(alg, theta);
            cfg.compact_invariant = CompactInvariant::Stated;
            let (r, _) = run(SuiteName::Cdybe, &cfg);
            c.at_most(
                format!("{alg} theta={theta} residual"),
                record(&r, "pl_cdybe.compact").max_residual,
                1e-8,
            );
        }
    }
    c.finish();
}

#[test]
fn criterion_3_momentum_map() {
    let _g = lock();
    let mut c = Criterion::new(3, "M -> M^(2 nu) is a Poisson map; wrong exponent is not");
    for alg in [Sl2, Sl3] {
        for nu in [0.25, 0.35] {
            let (r, _) = run(SuiteName::Momentum, &config(alg, nu));
            c.at_most(
                format!("{alg} nu={nu} map"),
                record(&r, "momentum_map.exponent").max_residual,
                1e-9,
            );
            c.at_least(
                format!("{alg} nu={nu} wrong exponent"),
                record(&r, "momentum_map.wrong_exponent").max_residual,
                1e-2,
            );
        }
    }
    c.finish();
}

#[test]
fn criterion_4_compact_momentum_map() {
    let _g = lock();
    let mut c = Criterion::new(4, "omega = theta m is a Poisson map; momentum generation on the double");
    for alg in [Su2, Su3] {
        for theta in [0.1, 0.3, 0.7] {
            let (r, _) = run(SuiteName::Momentum, &config(alg, theta));
            c.at_most(
                format!("{alg} theta={theta} map"),
                record(&r, "momentum_map.compact").max_residual,
                1e-9,
            );
        }
    }
    for alg in [Sl2, Sl3] {
        let (r, _) = run(SuiteName::Momentum, &config(alg, 0.35));
        c.at_most(
            format!("{alg} momentum generation"),
            record(&r, "momentum_generation").max_residual,
            1e-8,
        );
    }
    c.finish();
}

#[test]
fn criterion_5_groupoid_isomorphism() {
    let _g = lock();
    let mut c = Criterion::new(5, "groupoid isomorphism on sl2, nu = 0.35; sign-flipped K control");
    let (r, _) = run(SuiteName::Groupoid, &config(Sl2, 0.35));
    c.at_most("isomorphism", record(&r, "groupoid_isomorphism").max_residual, 1e-8);
    c.at_least(
        "flipped K",
        record(&r, "groupoid_isomorphism.flipped_k").max_residual,
        1e-3,
    );
    c.finish();
}

#[test]
fn criterion_6_jacobi() {
    let _g = lock();
    let mut c = Criterion::new(6, "Jacobi identity of every chart kind; perturbed-K controls");
    let mut kinds = std::collections::BTreeSet::new();
    for (alg, p) in [(Sl2, 0.35), (Sl3, 0.35), (Su2, 0.3), (Su3, 0.3)] {
        let (r, _) = run(SuiteName::Groupoid, &config(alg, p));
        for rec in r.checks.iter().filter(|x| x.id.starts_with("jacobi.")) {
            if rec.id.ends_with(".perturbed_k") {
                c.at_least(format!("{alg} {}", rec.id), rec.max_residual, 1e-3);
            } else {
                kinds.insert(rec.id.clone());
                c.at_most(format!("{alg} {}", rec.id), rec.max_residual, 1e-6);
            }
        }
    }
    c.at_least("distinct chart kinds", kinds.len() as f64, 7.0);
    c.finish();
}

#[test]
fn criterion_7_compact_identities() {
    let _g = lock();
    let mut c = Criterion::new(
        7,
        "compact identities, two-route brackets, derivative transfer, Borel derivatives",
    );
    for alg in [Su2, Su3] {
        let (r, _) = run(SuiteName::Compact, &config(alg, 0.3));
        for rec in &r.checks {
            let bound = if rec.id.starts_with("appendix.") {
                1e-10
            } else if rec.id.starts_with("coordinate_brackets.") {
                1e-6
            } else if rec.id == "derivative_transfer" || rec.id.starts_with("borel_derivatives.") {
                1e-7
            } else {
                continue;
            };
            c.at_most(format!("{alg} {}", rec.id), rec.max_residual, bound);
        }
    }
    assert_eq!(c.items.len(), 2 * (5 + 4 + 1 + 2));
    c.finish();
}

#[test]
fn criterion_8_abelian_limit() {
    let _g = lock();
    let mut c = Criterion::new(8, "Abelian limit {m_a, m_b} = -f_ab^c m_c");
    for (alg, p) in [(Sl2, 0.35), (Sl3, 0.35), (Su2, 0.3), (Su3, 0.3)] {
        let (r, _) = run(SuiteName::Momentum, &config(alg, p));
        c.at_most(format!("{alg}"), record(&r, "abelian_limit").max_residual, 1e-10);
    }
    c.finish();
}

#[test]
fn criterion_9_runtime_and_determinism() {
    let _g = lock();
    let mut c = Criterion::new(9, "`verify all` runtime and byte-for-byte determinism");
    let dir = tempfile::tempdir().unwrap();
    for (alg, limit) in [("su2", 60.0), ("sl2", 60.0), ("su3", 300.0), ("sl3", 300.0)] {
        let mut bodies = Vec::new();
        for k in 0..2 {
            let out = dir.path().join(format!("{alg}-{k}.json"));
            let t = Instant::now();
            let status = Command::new(env!("CARGO_BIN_EXE_verify"))
                .args(["all", "--algebra", alg, "--format", "json", "--out"])
                .arg(&out)
                .status()
                .unwrap();
            let elapsed = t.elapsed();
            // exit 1 (a failing record) still counts as a completed run
            assert!(matches!(status.code(), Some(0) | Some(1)), "{alg}: {status}");
            if k == 0 {
                c.seconds(format!("verify all {alg}"), elapsed, limit);
            }
            bodies.push(std::fs::read(&out).unwrap());
        }
        c.at_most(
            format!("{alg} differing runs"),
            (bodies[0] != bodies[1]) as u8 as f64,
            0.0,
        );
    }
    c.finish();
}

/// Not a numbered criterion: the grid of criterion 2 against -f^/(4 theta^2),
/// the invariant the compact equation takes.
#[test]
fn compact_pl_cdybe_derived_invariant() {
    let _g = lock();
    let mut worst: f64 = 0.0;
    for alg in [Su2, Su3] {
        for theta in [0.1, 0.3, 0.7] {
            let (r, _) = run(SuiteName::Cdybe, &config(alg, theta));
            worst = worst.max(record(&r, "pl_cdybe.compact").max_residual);
        }
    }
    let line = format!(
        "reference: compact PL-CDYBE against -f^/(4 theta^2), max residual {worst:.3e} over the criterion 2 grid\n"
    );
    let _ = std::io::stdout().lock().write_all(line.as_bytes());
    assert!(worst <= 1e-8, "{line}");
}
