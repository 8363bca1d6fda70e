//! The verification suites.
//!
//! A check evaluates one or more residuals at each sample index. Samples run
//! in parallel; each draws from its own stream keyed by check id and index,
//! and the records are assembled in index order.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;

use dynr::compact::{self, AppendixIdentity, AppendixInputs, CompactSetting, Probe};
use dynr::liealg::{GroupKind, LieAlgebra, ScalarField};
use dynr::linalg::{self, c, frob, frob_real, CMat, CVec, C64, I};
use dynr::matfun::{self, AdCalculus, ScalarFunction};
use dynr::poisson::{
    abelian_limit_residual, build_chart, jacobiator_residual, momentum_generation_residual, poisson_map_residual,
    Block, ChartKind, ChartParams, PoissonChart, SmoothMap,
};
use dynr::rmatrix::{self, cdybe_residual, constant_r, CdybeForm, ConstantKind, DynamicalRMatrix, ROUTE_AGREEMENT};
use dynr::sampling::{sample_in_domain, stream, uniform, Sample};
use dynr::Error;

use crate::config::{CompactInvariant, SuiteConfig};
use crate::report::{CheckRecord, Expectation, ResidualReport};

/// Exact-route checks.
pub const TOL_EXACT: f64 = 1e-8;
/// Finite-difference checks.
pub const TOL_FD: f64 = 1e-6;
pub const TOL_K_ZERO: f64 = 1e-12;
pub const TOL_POISSON_MAP: f64 = 1e-9;
pub const TOL_LINEAR_ALGEBRA: f64 = 1e-10;
pub const TOL_TRANSFER: f64 = 1e-7;
pub const TOL_FLOW: f64 = 1e-9;
pub const TOL_IWASAWA: f64 = 1e-11;
pub const TOL_CARTAN: f64 = 1e-12;
pub const TOL_RI_REALIZATIONS: f64 = 1e-12;
pub const TOL_CHI_PATH: f64 = 1e-13;
pub const MAX_BIJECTION_COND: f64 = 1e3;
/// Perturbed-K controls must reach at least this residual.
pub const CONTROL_K: f64 = 1e-3;
/// Wrong-exponent controls must reach at least this residual.
pub const CONTROL_EXPONENT: f64 = 1e-2;
/// Multiplier on K in the perturbed-K controls.
pub const K_PERTURBATION: f64 = 1.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteName {
    Cdybe,
    Momentum,
    Groupoid,
    Compact,
    All,
}

impl SuiteName {
    pub fn as_str(&self) -> &'static str {
        match self {
            SuiteName::Cdybe => "cdybe",
            SuiteName::Momentum => "momentum",
            SuiteName::Groupoid => "groupoid",
            SuiteName::Compact => "compact",
            SuiteName::All => "all",
        }
    }
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SuiteName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "cdybe" => Ok(SuiteName::Cdybe),
            "momentum" => Ok(SuiteName::Momentum),
            "groupoid" => Ok(SuiteName::Groupoid),
            "compact" => Ok(SuiteName::Compact),
            "all" => Ok(SuiteName::All),
            other => Err(format!("unknown suite {other:?}")),
        }
    }
}

#[derive(Debug)]
pub enum SuiteError {
    /// Exit status 2.
    Config(String),
    /// Exit status 3.
    Internal(String),
}

impl fmt::Display for SuiteError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SuiteError::Config(m) => write!(f, "configuration error: {m}"),
            SuiteError::Internal(m) => write!(f, "internal fault: {m}"),
        }
    }
}

impl std::error::Error for SuiteError {}

impl SuiteError {
    pub fn exit_code(&self) -> i32 {
        match self {
            SuiteError::Config(_) => 2,
            SuiteError::Internal(_) => 3,
        }
    }
}

/// One record produced by a check.
#[derive(Debug, Clone)]
pub struct Output {
    pub id: String,
    pub anchor: String,
    pub tolerance: f64,
    pub expect: Expectation,
}

fn genuine(id: &str, anchor: &str, tolerance: f64) -> Output {
    Output {
        id: id.to_string(),
        anchor: anchor.to_string(),
        tolerance,
        expect: Expectation::Pass,
    }
}

fn control(id: &str, anchor: &str, threshold: f64) -> Output {
    Output {
        id: id.to_string(),
        anchor: anchor.to_string(),
        tolerance: threshold,
        expect: Expectation::Fail,
    }
}

type SampleFn = Box<dyn Fn(usize) -> dynr::Result<(Vec<f64>, u32)> + Send + Sync>;

pub struct Check {
    pub outputs: Vec<Output>,
    /// Number of sample points; 1 for checks without a random argument.
    pub samples: usize,
    run: SampleFn,
}

impl Check {
    fn new(
        outputs: Vec<Output>,
        samples: usize,
        run: impl Fn(usize) -> dynr::Result<(Vec<f64>, u32)> + Send + Sync + 'static,
    ) -> Self {
        Check {
            outputs,
            samples,
            run: Box::new(run),
        }
    }
}

/// Shared state of a suite run.
#[derive(Clone)]
struct Ctx {
    seed: u64,
    radius: f64,
    h: f64,
    samples: usize,
    p: f64,
    alg: Arc<LieAlgebra>,
    invariant: CompactInvariant,
}

impl Ctx {
    fn draw(
        &self,
        id: &str,
        i: usize,
        dim: usize,
        ratio: impl Fn(&[f64]) -> dynr::Result<f64>,
    ) -> dynr::Result<Sample> {
        sample_in_domain(self.seed, id, i, dim, self.radius, ratio)
    }
}

fn ad_ratio(alg: &LieAlgebra, x: &[f64], f: &ScalarFunction) -> f64 {
    AdCalculus::new(&alg.to_matrix_real(x)).pole_ratio(f)
}

fn cvec(x: &[f64]) -> CVec {
    CVec::from_iterator(x.len(), x.iter().map(|v| c(*v)))
}

/// Checks of a suite for the configured algebra.
pub fn build_checks(name: SuiteName, cfg: &SuiteConfig) -> Result<Vec<Check>, SuiteError> {
    cfg.validate().map_err(SuiteError::Config)?;
    let n = cfg.algebra.n();
    let compact = cfg.algebra.is_compact();
    if name == SuiteName::Compact && !compact {
        return Err(SuiteError::Config(format!(
            "the compact suite needs su2 or su3, got {}",
            cfg.algebra
        )));
    }
    let alg = if compact {
        LieAlgebra::su(n)
    } else {
        LieAlgebra::sl(n, ScalarField::Real)
    }
    .map_err(|e| SuiteError::Internal(e.to_string()))?;
    let ctx = Ctx {
        seed: cfg.seed,
        radius: cfg.domain_radius,
        h: cfg.fd_step,
        samples: cfg.samples,
        p: cfg.parameter(),
        alg: Arc::new(alg),
        invariant: cfg.compact_invariant,
    };
    let internal = |e: Error| SuiteError::Internal(e.to_string());
    let mut checks = Vec::new();
    let want = |s: SuiteName| name == s || name == SuiteName::All;
    if want(SuiteName::Cdybe) {
        if compact {
            checks.extend(compact_cdybe_checks(&ctx).map_err(internal)?);
        } else {
            checks.extend(split_cdybe_checks(&ctx).map_err(internal)?);
        }
    }
    if want(SuiteName::Momentum) {
        checks.extend(momentum_checks(&ctx, compact).map_err(internal)?);
    }
    if want(SuiteName::Groupoid) {
        checks.extend(groupoid_checks(&ctx, compact).map_err(internal)?);
    }
    if want(SuiteName::Compact) && compact {
        checks.extend(compact_checks(&ctx).map_err(internal)?);
    }
    let known: Vec<&str> = checks
        .iter()
        .flat_map(|c| c.outputs.iter().map(|o| o.id.as_str()))
        .collect();
    for k in cfg.tolerances.keys() {
        if !known.contains(&k.as_str()) {
            return Err(SuiteError::Config(format!("--tol names unknown check {k:?}")));
        }
    }
    Ok(checks)
}

/// Runs a suite and assembles its report.
pub fn run_suite(name: SuiteName, cfg: &SuiteConfig) -> Result<ResidualReport, SuiteError> {
    let checks = build_checks(name, cfg)?;
    let mut records = Vec::new();
    for check in &checks {
        let results: Vec<(Vec<f64>, u32)> = (0..check.samples)
            .into_par_iter()
            .map(|i| (check.run)(i).map_err(|e| (i, e)))
            .collect::<Result<_, _>>()
            .map_err(|(i, e)| SuiteError::Internal(format!("{} sample {i}: {e}", check.outputs[0].id)))?;
        let contractions = results.iter().map(|r| r.1).sum();
        for (k, out) in check.outputs.iter().enumerate() {
            let values: Vec<f64> = results.iter().map(|r| r.0[k]).collect();
            let tol = cfg.tolerances.get(&out.id).copied().unwrap_or(out.tolerance);
            records.push(CheckRecord::new(
                &out.id,
                &out.anchor,
                &values,
                contractions,
                tol,
                out.expect,
            ));
        }
    }
    Ok(ResidualReport::new(name.as_str(), cfg.clone(), records))
}

fn split_cdybe_checks(ctx: &Ctx) -> dynr::Result<Vec<Check>> {
    let alg = ctx.alg.clone();
    let nu = ctx.p;
    let d = alg.dim();
    let mut out = Vec::new();
    let k_zero = (nu - 0.5).abs() < 1e-15;

    let r_nu = constant_r(&alg, ConstantKind::StandardSplit, c(2.0 * nu))?;
    let rhs = rmatrix::pl_cdybe_rhs(&alg, c(nu))?;
    let k_tol = if k_zero { TOL_K_ZERO } else { TOL_EXACT };
    let mut variants = vec![(
        "pl_cdybe.k_nu",
        "PL-CDYBE for K^nu with rhs (1/4 - nu^2) f^",
        1.0,
        k_tol,
    )];
    if !k_zero {
        variants.push((
            "pl_cdybe.k_nu.perturbed_k",
            "PL-CDYBE with K^nu scaled by 1.1 (control)",
            K_PERTURBATION,
            CONTROL_K,
        ));
    }
    for (id, anchor, scale, tol) in variants {
        let k = DynamicalRMatrix::k_nu(alg.clone(), c(nu)).with_prefactor(c(scale));
        let (r_nu, rhs, ctx2, alg2) = (r_nu.clone(), rhs.clone(), ctx.clone(), alg.clone());
        let f = k.function;
        let outputs = if scale == 1.0 {
            vec![
                genuine(id, anchor, tol),
                genuine(
                    &format!("{id}.route_gap"),
                    "exact and group-curve derivatives of K^nu",
                    ROUTE_AGREEMENT,
                ),
            ]
        } else {
            vec![control(id, anchor, tol)]
        };
        let genuine_run = scale == 1.0;
        out.push(Check::new(outputs, ctx.samples, move |i| {
            let s = ctx2.draw(id, i, d, |m| Ok(ad_ratio(&alg2, m, &f)))?;
            let x = linalg::expm(&alg2.to_matrix_real(&s.point));
            let o = cdybe_residual(CdybeForm::PlCdybeWz, &r_nu, &k, &x, &rhs, ctx2.h)?;
            let v = if genuine_run {
                vec![o.residual.norm(), o.route_gap]
            } else {
                vec![o.residual.norm()]
            };
            Ok((v, s.contractions))
        }));
    }

    {
        let id = "g_cdybe.exchange_r";
        let k = DynamicalRMatrix::k_nu(alg.clone(), c(nu));
        let rhs = rmatrix::f_hat(&alg)?.scaled(c(-0.25));
        let (r_nu, ctx2, alg2) = (r_nu.clone(), ctx.clone(), alg.clone());
        let f = k.function;
        out.push(Check::new(
            vec![
                genuine(
                    id,
                    "G-CDYBE for the exchange r-matrix R^nu + K^nu with rhs -f^/4",
                    TOL_EXACT,
                ),
                genuine(
                    &format!("{id}.route_gap"),
                    "exact and group-curve derivatives of r",
                    ROUTE_AGREEMENT,
                ),
            ],
            ctx.samples,
            move |i| {
                let s = ctx2.draw(id, i, d, |m| Ok(ad_ratio(&alg2, m, &f)))?;
                let x = linalg::expm(&alg2.to_matrix_real(&s.point));
                let o = cdybe_residual(CdybeForm::GCdybe, &r_nu, &k, &x, &rhs, ctx2.h)?;
                Ok((vec![o.residual.norm(), o.route_gap], s.contractions))
            },
        ));
    }

    {
        let id = "pl_cdybe.canonical";
        let k = DynamicalRMatrix::k_can(alg.clone(), c(nu));
        let r = constant_r(&alg, ConstantKind::StandardSplit, c(1.0))?;
        let rhs = rmatrix::canonical_invariant(&alg, c(nu))?;
        let (ctx2, alg2) = (ctx.clone(), alg.clone());
        let f = k.function;
        out.push(Check::new(
            vec![
                genuine(
                    id,
                    "canonical PL-CDYBE for K = -f_{1/(4 nu)}(ad omega) with invariant -f^/(16 nu^2)",
                    TOL_EXACT,
                ),
                genuine(
                    &format!("{id}.route_gap"),
                    "exact and group-curve derivatives of K",
                    ROUTE_AGREEMENT,
                ),
            ],
            ctx.samples,
            move |i| {
                let s = ctx2.draw(id, i, d, |m| Ok(ad_ratio(&alg2, m, &f)))?;
                let x = linalg::expm(&alg2.to_matrix_real(&s.point));
                let o = cdybe_residual(CdybeForm::PlCdybeCan, &r, &k, &x, &rhs, ctx2.h)?;
                Ok((vec![o.residual.norm(), o.route_gap], s.contractions))
            },
        ));
    }
    Ok(out)
}

fn compact_rhs(alg: &Arc<LieAlgebra>, theta: f64, which: CompactInvariant) -> dynr::Result<rmatrix::ThreeTensor> {
    match which {
        CompactInvariant::Derived => rmatrix::compact_invariant_derived(alg, theta),
        CompactInvariant::Stated => rmatrix::compact_invariant_stated(alg, theta),
    }
}

fn invariant_label(which: CompactInvariant) -> &'static str {
    match which {
        CompactInvariant::Derived => "invariant -f^/(4 theta^2)",
        CompactInvariant::Stated => "stated invariant (1/(16 theta^2) - 3/4) f^",
    }
}

fn compact_cdybe_checks(ctx: &Ctx) -> dynr::Result<Vec<Check>> {
    let alg = ctx.alg.clone();
    let theta = ctx.p;
    let d = alg.dim();
    let ri = constant_r(&alg, ConstantKind::CompactRi, c(1.0))?;
    let rhs = compact_rhs(&alg, theta, ctx.invariant)?;
    let mut out = Vec::new();
    let genuine_anchor = format!(
        "compact PL-CDYBE for K(Omega) = (1/theta) f_(i theta), {}",
        invariant_label(ctx.invariant)
    );
    for (id, scale) in [
        ("pl_cdybe.compact", 1.0),
        ("pl_cdybe.compact.perturbed_k", K_PERTURBATION),
    ] {
        let k = DynamicalRMatrix::k_compact(alg.clone(), theta).with_prefactor(c(scale));
        let f = k.function;
        let (ri, rhs, ctx2, alg2) = (ri.clone(), rhs.clone(), ctx.clone(), alg.clone());
        let genuine_run = scale == 1.0;
        let outputs = if genuine_run {
            vec![
                genuine(id, &genuine_anchor, TOL_EXACT),
                genuine(
                    &format!("{id}.route_gap"),
                    "exact and group-curve derivatives of K",
                    ROUTE_AGREEMENT,
                ),
            ]
        } else {
            vec![control(
                id,
                "compact PL-CDYBE with K scaled by 1.1 (control)",
                CONTROL_K,
            )]
        };
        out.push(Check::new(outputs, ctx.samples, move |i| {
            let s = ctx2.draw(id, i, d, |w| Ok(ad_ratio(&alg2, w, &f)))?;
            let big_omega = linalg::expm(&(alg2.to_matrix_real(&s.point) * (I * 2.0)));
            let o = cdybe_residual(CdybeForm::PlCdybeCompact, &ri, &k, &big_omega, &rhs, ctx2.h)?;
            let v = if genuine_run {
                vec![o.residual.norm(), o.route_gap]
            } else {
                vec![o.residual.norm()]
            };
            Ok((v, s.contractions))
        }));
    }
    Ok(out)
}

/// Poisson-map check between two charts related by a block scaling, plus a
/// control with a wrong factor.
fn scaling_check(
    ctx: &Ctx,
    id: &'static str,
    source: PoissonChart,
    target: PoissonChart,
    blocks: Vec<Block>,
    factor: f64,
    output: Output,
) -> Check {
    let ctx2 = ctx.clone();
    Check::new(vec![output], ctx.samples, move |i| {
        let dim = source.dimension();
        let d = source.algebra.dim();
        let offsets: Vec<usize> = blocks.iter().filter_map(|b| source.offset(*b)).collect();
        let scaled = |x: &[f64]| -> Vec<f64> {
            let mut y = x.to_vec();
            for o in &offsets {
                y[*o..*o + d].iter_mut().for_each(|v| *v *= factor);
            }
            y
        };
        let s = ctx2.draw(id, i, dim, |x| {
            Ok(source.pole_ratio(x)?.max(target.pole_ratio(&scaled(x))?))
        })?;
        let factors: Vec<(Block, f64)> = blocks.iter().map(|b| (*b, factor)).collect();
        let map = SmoothMap::block_scaling(&source, &target, &factors)?;
        Ok((vec![frob_real(&poisson_map_residual(&map, &s.point)?)], s.contractions))
    })
}

fn momentum_checks(ctx: &Ctx, compact: bool) -> dynr::Result<Vec<Check>> {
    let alg = ctx.alg.clone();
    let n = alg.n;
    let d = alg.dim();
    let p = ctx.p;
    let mut out = Vec::new();
    let source = build_chart(ChartKind::WznwMonodromy, alg.clone(), ChartParams::at_identity(p, n))?;
    if compact {
        let target = build_chart(
            ChartKind::CompactHeisenberg,
            alg.clone(),
            ChartParams::at_identity(p, n),
        )?
        .log_sector()?;
        out.push(scaling_check(
            ctx,
            "momentum_map.compact",
            source.clone(),
            target.clone(),
            vec![Block::Log],
            p,
            genuine(
                "momentum_map.compact",
                "M -> exp(2 i theta m): monodromy bracket onto the compact omega bracket",
                TOL_POISSON_MAP,
            ),
        ));
        out.push(scaling_check(
            ctx,
            "momentum_map.compact.wrong_factor",
            source,
            target,
            vec![Block::Log],
            2.0 * p,
            control(
                "momentum_map.compact.wrong_factor",
                "omega = 2 theta m (control)",
                CONTROL_EXPONENT,
            ),
        ));
    } else {
        let target = build_chart(ChartKind::StsLog, alg.clone(), ChartParams::at_identity(p, n))?;
        out.push(scaling_check(
            ctx,
            "momentum_map.exponent",
            source.clone(),
            target.clone(),
            vec![Block::Log],
            2.0 * p,
            genuine(
                "momentum_map.exponent",
                "M -> M^(2 nu): monodromy bracket onto the STS bracket",
                TOL_POISSON_MAP,
            ),
        ));
        out.push(scaling_check(
            ctx,
            "momentum_map.wrong_exponent",
            source,
            target,
            vec![Block::Log],
            p,
            control("momentum_map.wrong_exponent", "M -> M^nu (control)", CONTROL_EXPONENT),
        ));

        let id = "momentum_generation";
        let chart = build_chart(ChartKind::Heisenberg, alg.clone(), ChartParams::at_identity(p, n))?;
        let ctx2 = ctx.clone();
        out.push(Check::new(
            vec![genuine(
                id,
                "Heisenberg double: the momentum variables generate the right action",
                TOL_EXACT,
            )],
            ctx.samples,
            move |i| {
                let s = ctx2.draw(id, i, chart.dimension(), |x| chart.pole_ratio(x))?;
                let t = uniform(&mut stream(ctx2.seed, "momentum_generation.t", i), d, 1.0);
                let r = momentum_generation_residual(&chart, &s.point, &cvec(&t))?;
                Ok((vec![r.norm()], s.contractions))
            },
        ));
    }

    let id = "abelian_limit";
    let chart = build_chart(ChartKind::WznwMonodromy, alg.clone(), ChartParams::at_identity(0.0, n))?;
    let ctx2 = ctx.clone();
    out.push(Check::new(
        vec![genuine(
            id,
            "Abelian limit nu = 0, R = 0: {m_a, m_b} = -f_ab^c m_c",
            TOL_LINEAR_ALGEBRA,
        )],
        ctx.samples,
        move |i| {
            let s = ctx2.draw(id, i, d, |x| chart.pole_ratio(x))?;
            Ok((
                vec![frob_real(&abelian_limit_residual(&chart, &s.point)?)],
                s.contractions,
            ))
        },
    ));
    Ok(out)
}

fn jacobi_check(ctx: &Ctx, kind: ChartKind, k_scale: f64) -> dynr::Result<Check> {
    let alg = ctx.alg.clone();
    let d = alg.dim();
    // a generic base point for the group block
    let base = linalg::expm(&alg.to_matrix_real(&uniform(&mut stream(ctx.seed, "jacobi.base", 0), d, 1.0)));
    let chart = build_chart(kind, alg.clone(), ChartParams::new(ctx.p, base).with_k_scale(k_scale))?;
    let genuine_run = k_scale == 1.0;
    let id: &'static str = Box::leak(
        if genuine_run {
            format!("jacobi.{}", kind.name())
        } else {
            format!("jacobi.{}.perturbed_k", kind.name())
        }
        .into_boxed_str(),
    );
    let output = if genuine_run {
        genuine(id, &format!("Jacobi identity of the {} bracket", kind.name()), TOL_FD)
    } else {
        control(
            id,
            &format!(
                "Jacobi identity of the {} bracket with K scaled by 1.1 (control)",
                kind.name()
            ),
            CONTROL_K,
        )
    };
    let ctx2 = ctx.clone();
    Ok(Check::new(vec![output], ctx.samples, move |i| {
        let s = ctx2.draw(id, i, chart.dimension(), |x| chart.pole_ratio(x))?;
        Ok((
            vec![jacobiator_residual(&chart, &s.point, ctx2.h)?.norm()],
            s.contractions,
        ))
    }))
}

fn groupoid_checks(ctx: &Ctx, compact: bool) -> dynr::Result<Vec<Check>> {
    let alg = ctx.alg.clone();
    let n = alg.n;
    let p = ctx.p;
    let mut out = Vec::new();
    if !compact {
        let source = build_chart(ChartKind::WznwGroupoid, alg.clone(), ChartParams::at_identity(p, n))?;
        let target = build_chart(
            ChartKind::CanonicalGroupoid,
            alg.clone(),
            ChartParams::at_identity(p, n),
        )?;
        let flipped = build_chart(
            ChartKind::CanonicalGroupoid,
            alg.clone(),
            ChartParams::at_identity(p, n).with_k_scale(-1.0),
        )?;
        out.push(scaling_check(
            ctx,
            "groupoid_isomorphism",
            source.clone(),
            target,
            vec![Block::TildeLog, Block::Log],
            2.0 * p,
            genuine(
                "groupoid_isomorphism",
                "(M~, g, M) -> (M~^(2 nu), g, M^(2 nu)) onto the canonical groupoid",
                TOL_EXACT,
            ),
        ));
        out.push(scaling_check(
            ctx,
            "groupoid_isomorphism.flipped_k",
            source,
            flipped,
            vec![Block::TildeLog, Block::Log],
            2.0 * p,
            control(
                "groupoid_isomorphism.flipped_k",
                "the same map onto the canonical groupoid with K -> -K (control)",
                CONTROL_K,
            ),
        ));
    }
    let kind = if compact {
        dynr::liealg::AlgebraKind::SuCompact
    } else {
        dynr::liealg::AlgebraKind::SlSplit
    };
    for chart in ChartKind::ALL {
        if !chart.supports(kind) {
            continue;
        }
        out.push(jacobi_check(ctx, chart, 1.0)?);
        if chart.has_dynamical_part() && chart != ChartKind::WznwMonodromy {
            out.push(jacobi_check(ctx, chart, K_PERTURBATION)?);
        }
    }
    Ok(out)
}

fn random_sl_c(rng: &mut impl Rng, n: usize, radius: f64) -> CMat {
    let m = CMat::from_fn(n, n, |_, _| {
        C64::new(rng.gen_range(-radius..=radius), rng.gen_range(-radius..=radius))
    });
    let traceless = &m - linalg::identity(n) * (m.trace() / c(n as f64));
    linalg::expm(&traceless)
}

fn compact_checks(ctx: &Ctx) -> dynr::Result<Vec<Check>> {
    let set = Arc::new(CompactSetting::new(ctx.alg.n)?);
    let theta = ctx.p;
    let n = ctx.alg.n;
    let d = ctx.alg.dim();
    let su = set.su().clone();
    let mut out = Vec::new();

    {
        let id = "iwasawa";
        let (ctx2, su2) = (ctx.clone(), su.clone());
        out.push(Check::new(
            vec![
                genuine(
                    id,
                    "Iwasawa decompositions a = g^-1 b~ = b g~ and their uniqueness",
                    TOL_IWASAWA,
                ),
                genuine(
                    "cartan_coordinates",
                    "Omega = a a^dagger = b b^dagger = exp(2 i omega), omega in su(n)",
                    TOL_CARTAN,
                ),
            ],
            ctx.samples,
            move |i| {
                let a = random_sl_c(&mut stream(ctx2.seed, id, i), n, ctx2.radius);
                let (f, cart) = compact::iwasawa_cartan(&su2, &a)?;
                // refactoring b g~ must reproduce the same factors
                let (f2, _) = compact::iwasawa_cartan(&su2, &(&f.b * &f.g_tilde))?;
                let unique = frob(&(&f2.b - &f.b))
                    .max(frob(&(&f2.g_tilde - &f.g_tilde)))
                    .max(frob(&(&f2.g - &f.g)))
                    .max(frob(&(&f2.b_tilde - &f.b_tilde)));
                let groups = [
                    (GroupKind::Su, &f.g),
                    (GroupKind::Su, &f.g_tilde),
                    (GroupKind::Borel, &f.b),
                    (GroupKind::Borel, &f.b_tilde),
                ];
                let mut invalid = 0.0;
                for (k, m) in groups {
                    if dynr::liealg::GroupElement::new(k, m.clone()).is_err() {
                        invalid = f64::INFINITY;
                    }
                }
                let iw = f.reconstruction_error().max(unique).max(invalid);
                let om = &cart.omega;
                let cartan = frob(&(linalg::expm(&(om * (I * 2.0))) - &cart.big_omega))
                    .max(frob(&(&f.b * f.b.adjoint() - &cart.big_omega)))
                    .max(frob(&(om + om.adjoint())))
                    .max(om.trace().norm())
                    .max((linalg::det(&cart.big_omega) - c(1.0)).norm())
                    .max(frob(&(&cart.big_omega - cart.big_omega.adjoint())));
                Ok((vec![iw, cartan], 0))
            },
        ));
    }

    for ident in AppendixIdentity::ALL {
        let id: &'static str = Box::leak(format!("appendix.{}", ident.name()).into_boxed_str());
        let (ctx2, set2) = (ctx.clone(), set.clone());
        out.push(Check::new(
            vec![genuine(id, ident.anchor(), TOL_LINEAR_ALGEBRA)],
            ctx.samples,
            move |i| {
                let inputs = AppendixInputs::random(&set2, &mut stream(ctx2.seed, id, i), ctx2.radius);
                Ok((vec![compact::appendix_identity_residual(ident, &set2, &inputs)?], 0))
            },
        ));
    }

    {
        let id = "coordinate_brackets";
        let (ctx2, set2) = (ctx.clone(), set.clone());
        out.push(Check::new(
            vec![
                genuine(
                    "coordinate_brackets.group_omega",
                    "bracket of a g-entry and <omega, T>: double bracket against the (g, omega) chart",
                    TOL_FD,
                ),
                genuine(
                    "coordinate_brackets.omega_omega",
                    "bracket of <omega, T> and <omega, T'>: double bracket against the (g, omega) chart",
                    TOL_FD,
                ),
                genuine(
                    "coordinate_brackets.group_group",
                    "bracket of two g-entries: double bracket against the (g, omega) chart",
                    TOL_FD,
                ),
                genuine(
                    "coordinate_brackets.sklyanin",
                    "bracket of two g-entries: double bracket against theta [g (x) g, R^i]",
                    TOL_FD,
                ),
            ],
            ctx.samples,
            move |i| {
                let mut rng = stream(ctx2.seed, id, i);
                let a = random_sl_c(&mut rng, n, ctx2.radius);
                let entry = |rng: &mut rand_chacha::ChaCha8Rng| Probe::GroupEntry {
                    row: rng.gen_range(0..n),
                    col: rng.gen_range(0..n),
                    imag: rng.gen_bool(0.5),
                };
                let e1 = entry(&mut rng);
                let e2 = entry(&mut rng);
                let w1 = Probe::OmegaLinear(uniform(&mut rng, d, 1.0));
                let w2 = Probe::OmegaLinear(uniform(&mut rng, d, 1.0));
                let h = ctx2.h;
                let mixed = compact::coordinate_bracket_residual(&set2, theta, &a, &e1, &w1, h)?;
                let oo = compact::coordinate_bracket_residual(&set2, theta, &a, &w1, &w2, h)?;
                let gg = compact::coordinate_bracket_residual(&set2, theta, &a, &e1, &e2, h)?;
                let (fac, _) = compact::iwasawa_cartan(set2.su(), &a)?;
                let sk = compact::sklyanin_probe_bracket(&set2, theta, &fac.g, &e1, &e2)?;
                Ok((
                    vec![
                        mixed.difference(),
                        oo.difference(),
                        gg.difference(),
                        (gg.direct - sk).abs(),
                    ],
                    0,
                ))
            },
        ));
    }

    {
        let id = "borel_derivatives";
        let (ctx2, set2) = (ctx.clone(), set.clone());
        out.push(Check::new(
            vec![
                genuine(
                    "borel_derivatives.left",
                    "D_b f = (-R^i ad_omega + chi(i ad_omega)) d f~ by finite differences on B",
                    TOL_TRANSFER,
                ),
                genuine(
                    "borel_derivatives.right",
                    "b (D'_b f) b^-1 = i [omega, d f~] + chi(i ad_omega) d f~ by finite differences on B",
                    TOL_TRANSFER,
                ),
                genuine(
                    "derivative_transfer",
                    "derivative along Omega_t^X equals the left derivative along -2Y on B",
                    TOL_TRANSFER,
                ),
                genuine(
                    "derivative_transfer.flow",
                    "Omega_t^X = b_t b_t^dagger with b_t = exp(-2Yt) b at t = 0.1",
                    TOL_FLOW,
                ),
            ],
            ctx.samples,
            move |i| {
                let mut rng = stream(ctx2.seed, id, i);
                let w = uniform(&mut rng, d, ctx2.radius);
                let b = linalg::reverse_cholesky(&linalg::expm(&(su_matrix(&set2, &w) * (I * 2.0))))?;
                let t = uniform(&mut rng, d, 1.0);
                let x = su_matrix(&set2, &uniform(&mut rng, d, 1.0));
                let (l, r) = compact::borel_derivative_residuals(&set2, &b, &t, ctx2.h)?;
                let tr = compact::derivative_transfer_residual(&set2, &t, &b, &x, ctx2.h)?;
                let flow = compact::flow_consistency_residual(&set2, &b, &x, 0.1)?;
                Ok((vec![l, r, tr, flow], 0))
            },
        ));
    }

    let rhs = compact_rhs(&su, theta, ctx.invariant)?;
    let f = ScalarFunction::f_nu_compact(theta);
    for (id, scale) in [
        ("natural_pl_cdybe", 1.0),
        ("natural_pl_cdybe.perturbed_k", K_PERTURBATION),
    ] {
        let output = if scale == 1.0 {
            genuine(
                id,
                &format!(
                    "compact PL-CDYBE on the Borel group, K~(b) = K(b b^dagger), {}",
                    invariant_label(ctx.invariant)
                ),
                TOL_FD,
            )
        } else {
            control(
                id,
                "compact PL-CDYBE on the Borel group with K~ scaled by 1.1 (control)",
                CONTROL_K,
            )
        };
        let (ctx2, set2, rhs2, su2) = (ctx.clone(), set.clone(), rhs.clone(), su.clone());
        out.push(Check::new(vec![output], ctx.samples, move |i| {
            let s = ctx2.draw(id, i, d, |w| Ok(ad_ratio(&su2, w, &f)))?;
            let b = linalg::reverse_cholesky(&linalg::expm(&(su_matrix(&set2, &s.point) * (I * 2.0))))?;
            let r = compact::natural_plcdybe_residual(&set2, theta, &b, &rhs2, scale, ctx2.h)?;
            Ok((vec![r.norm()], s.contractions))
        }));
    }

    {
        let set2 = set.clone();
        out.push(Check::new(
            vec![
                genuine(
                    "ri_realizations",
                    "R^i as a coefficient tensor and as X -> pi_g(-i X)",
                    TOL_RI_REALIZATIONS,
                ),
                genuine(
                    "borel_to_compact.condition",
                    "Y -> i(Y + Y^dagger) from the Borel algebra onto su(n): condition number",
                    MAX_BIJECTION_COND,
                ),
            ],
            1,
            move |_| {
                let agree = linalg::frob_real(&(set2.ri_from_projection()? - &set2.ri));
                let m = set2.dbl.compact_from_borel_matrix()?;
                let sv = m.svd(false, false).singular_values;
                let hi = sv.iter().copied().fold(0.0, f64::max);
                let lo = sv.iter().copied().fold(f64::INFINITY, f64::min);
                Ok((vec![agree, hi / lo], 0))
            },
        ));
    }

    {
        let id = "chi_imaginary";
        let ctx2 = ctx.clone();
        out.push(Check::new(
            vec![genuine(
                id,
                "chi(i z) = z cot z against chi(w) = w coth w at w = i z",
                TOL_CHI_PATH,
            )],
            ctx.samples,
            move |i| {
                let z = stream(ctx2.seed, id, i).gen_range(-1.5..=1.5);
                let direct = matfun::chi_imaginary(z);
                let via = matfun::chi_closed(I * z);
                Ok((vec![(c(direct) - via).norm()], 0))
            },
        ));
    }
    Ok(out)
}

fn su_matrix(set: &CompactSetting, w: &[f64]) -> CMat {
    set.su().to_matrix_real(w)
}
