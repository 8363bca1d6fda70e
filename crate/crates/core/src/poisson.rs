//! Poisson bivectors on coordinate charts.
//!
//! Every bracket is written in real coordinates. Group factors use
//! exponential coordinates g = g0 exp(xi^a T_a) around a base point g0, and
//! the dual-group or monodromy factors use logarithmic coordinates. The
//! bivector entries come from the matrix form of the brackets by exact
//! contraction with the differentials of these coordinates:
//!
//! * right translation g -> g e^{tX} moves xi by lambda(ad_xi / 2) X,
//! * left and right translation of e^x move x by lambda(-ad_x / 2) and
//!   lambda(ad_x / 2), lambda(w) = w e^w / sinh w.
//!
//! Only [`jacobiator_residual`] differentiates numerically.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::liealg::{adjoint_matrix, AlgebraKind, GroupElement, GroupKind, LieAlgebra};
use crate::linalg::{self, c, CMat, CVec, RMat, C64, I};
use crate::matfun::{self, AdCalculus, ScalarFunction};
use crate::rmatrix::{self, constant_r, ConstantKind, DynamicalRMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartKind {
    /// Sklyanin bracket on G in exponential coordinates.
    Sklyanin,
    /// Semenov-Tian-Shansky bracket on the dual group, omega = log Omega.
    StsLog,
    /// Heisenberg double (xi, omega).
    Heisenberg,
    /// Monodromy sector of the WZNW bracket, m = log M.
    WznwMonodromy,
    /// (m~, xi, m) with the exchange r-matrix.
    WznwGroupoid,
    /// (omega~, xi, omega) with the canonical dynamical r-matrix.
    CanonicalGroupoid,
    /// Compact Heisenberg double in the (g, omega) model, Omega = e^{2 i omega}.
    CompactHeisenberg,
    /// (omega~, xi, omega) for the compact case.
    CompactGroupoid,
}

impl ChartKind {
    pub const ALL: [ChartKind; 8] = [
        ChartKind::Sklyanin,
        ChartKind::StsLog,
        ChartKind::Heisenberg,
        ChartKind::WznwMonodromy,
        ChartKind::WznwGroupoid,
        ChartKind::CanonicalGroupoid,
        ChartKind::CompactHeisenberg,
        ChartKind::CompactGroupoid,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ChartKind::Sklyanin => "sklyanin",
            ChartKind::StsLog => "sts_log",
            ChartKind::Heisenberg => "heisenberg",
            ChartKind::WznwMonodromy => "wznw_monodromy",
            ChartKind::WznwGroupoid => "wznw_groupoid",
            ChartKind::CanonicalGroupoid => "canonical_groupoid",
            ChartKind::CompactHeisenberg => "compact_heisenberg",
            ChartKind::CompactGroupoid => "compact_groupoid",
        }
    }

    /// Whether the kind is defined on a split algebra, a compact one, or both.
    pub fn supports(&self, kind: AlgebraKind) -> bool {
        match self {
            ChartKind::Sklyanin | ChartKind::WznwMonodromy | ChartKind::WznwGroupoid => {
                matches!(kind, AlgebraKind::SlSplit | AlgebraKind::SuCompact)
            }
            ChartKind::StsLog | ChartKind::Heisenberg | ChartKind::CanonicalGroupoid => kind == AlgebraKind::SlSplit,
            ChartKind::CompactHeisenberg | ChartKind::CompactGroupoid => kind == AlgebraKind::SuCompact,
        }
    }

    pub fn has_dynamical_part(&self) -> bool {
        matches!(
            self,
            ChartKind::WznwMonodromy
                | ChartKind::WznwGroupoid
                | ChartKind::CanonicalGroupoid
                | ChartKind::CompactGroupoid
        )
    }

    fn blocks(&self) -> Vec<Block> {
        match self {
            ChartKind::Sklyanin => vec![Block::Group],
            ChartKind::StsLog | ChartKind::WznwMonodromy => vec![Block::Log],
            ChartKind::Heisenberg | ChartKind::CompactHeisenberg => vec![Block::Group, Block::Log],
            ChartKind::WznwGroupoid | ChartKind::CanonicalGroupoid | ChartKind::CompactGroupoid => {
                vec![Block::TildeLog, Block::Group, Block::Log]
            }
        }
    }
}

/// A block of dim(g) coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Block {
    /// Log coordinates of the left momentum / monodromy variable.
    TildeLog,
    /// Exponential coordinates of g around the base point.
    Group,
    /// Log coordinates of the right momentum / monodromy variable.
    Log,
}

impl Block {
    pub fn describe(&self, kind: ChartKind) -> &'static str {
        let monodromy = matches!(kind, ChartKind::WznwMonodromy | ChartKind::WznwGroupoid);
        match (self, monodromy) {
            (Block::Group, _) => "xi: exponential coordinates of g around the base point",
            (Block::Log, true) => "m = log M",
            (Block::TildeLog, true) => "m~ = log M~",
            (Block::Log, false) => match kind {
                ChartKind::CompactHeisenberg | ChartKind::CompactGroupoid => "omega with Omega = exp(2 i omega)",
                _ => "omega = log Omega",
            },
            (Block::TildeLog, false) => match kind {
                ChartKind::CompactGroupoid => "omega~ with Omega~ = exp(2 i omega~)",
                _ => "omega~ = log Omega~",
            },
        }
    }
}

/// Parameters of a chart.
#[derive(Debug, Clone)]
pub struct ChartParams {
    /// nu on split algebras, theta on compact ones.
    pub param: f64,
    /// Multiplier on the dynamical part (1 for the genuine bracket).
    pub k_scale: f64,
    pub base: CMat,
}

impl ChartParams {
    pub fn new(param: f64, base: CMat) -> Self {
        ChartParams {
            param,
            k_scale: 1.0,
            base,
        }
    }

    pub fn at_identity(param: f64, n: usize) -> Self {
        Self::new(param, linalg::identity(n))
    }

    pub fn with_k_scale(mut self, s: f64) -> Self {
        self.k_scale = s;
        self
    }
}

/// Constant plus optional scaled dynamical part, as coefficient tensors.
#[derive(Debug, Clone)]
struct RPart {
    constant: CMat,
    dynamical: Option<(DynamicalRMatrix, C64)>,
}

impl RPart {
    fn constant(r: CMat) -> Self {
        RPart {
            constant: r,
            dynamical: None,
        }
    }

    fn at(&self, x: &CVec) -> Result<CMat> {
        let mut r = self.constant.clone();
        if let Some((k, s)) = &self.dynamical {
            r += k.dynamical_at(x)?.coeffs * *s;
        }
        Ok(r)
    }

    fn pole_ratio(&self, calc: &AdCalculus) -> f64 {
        self.dynamical
            .as_ref()
            .map_or(0.0, |(k, _)| calc.pole_ratio(&k.function))
    }
}

/// The bracket of a log variable x with itself and with the group variable.
#[derive(Debug, Clone)]
enum Sector {
    /// Matrix form {X1,X2} = X1X2 r + r X1X2 - X1 r_- X2 - X2 r_+ X1 and
    /// {g1, X2} = g1 (X2 r_+ - r_- X2) with r_pm = r +- w Casimir.
    LogForm { r: RPart, weight: C64 },
    /// Closed form p(-R o ad_x + chi(s ad_x)) for the cross block and
    /// p(-ad_x o R + chi(s ad_x)) ad_x for the log block.
    Closed { prefactor: C64, r_op: CMat, scale: C64 },
}

impl Sector {
    /// (cross, block): cross[a][c] = {theta^a, x^c} with theta the
    /// right-trivialized group coordinate, block[c][d] = {x^c, x^d}.
    fn blocks(&self, alg: &LieAlgebra, x: &CVec) -> Result<(CMat, CMat)> {
        let gi = linalg::complexify(alg.form_inverse()?);
        match self {
            Sector::LogForm { r, weight } => {
                let rx = matfun::analytic_of_ad_coeffs(alg, &ScalarFunction::Lambda { scale: c(0.5) }, x)?;
                let lx = matfun::analytic_of_ad_coeffs(alg, &ScalarFunction::Lambda { scale: c(-0.5) }, x)?;
                let r = r.at(x)?;
                let rp = &r + &gi * *weight;
                let rm = &r - &gi * *weight;
                let cross = &rp * rx.transpose() - &rm * lx.transpose();
                let block = &rx * &r * rx.transpose() + &lx * &r * lx.transpose()
                    - &rx * &rm * lx.transpose()
                    - &lx * &rp * rx.transpose();
                Ok((cross, block))
            }
            Sector::Closed { prefactor, r_op, scale } => {
                let ad = alg.ad(x);
                let chi = matfun::analytic_of_ad_coeffs(alg, &ScalarFunction::Chi { scale: *scale }, x)?;
                let cross = (-(r_op * &ad) + &chi) * &gi * *prefactor;
                let block = (-(&ad * r_op) + &chi) * &ad * &gi * *prefactor;
                Ok((cross, block))
            }
        }
    }

    fn pole_ratio(&self, calc: &AdCalculus) -> f64 {
        match self {
            Sector::LogForm { r, .. } => calc
                .pole_ratio(&ScalarFunction::Lambda { scale: c(0.5) })
                .max(r.pole_ratio(calc)),
            Sector::Closed { scale, .. } => calc.pole_ratio(&ScalarFunction::Chi { scale: *scale }),
        }
    }
}

/// Serializable summary of a chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartDescriptor {
    pub kind: ChartKind,
    pub algebra: String,
    pub dimension: usize,
    pub blocks: Vec<BlockDescriptor>,
    pub param: f64,
    pub k_scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockDescriptor {
    pub block: Block,
    pub offset: usize,
    pub meaning: String,
}

/// A Poisson bivector on a coordinate chart.
#[derive(Debug, Clone)]
pub struct PoissonChart {
    pub kind: ChartKind,
    pub algebra: Arc<LieAlgebra>,
    pub blocks: Vec<Block>,
    pub params: ChartParams,
    gg: Option<RPart>,
    sector: Option<Sector>,
}

/// Builds one of the bivectors on `algebra`.
pub fn build_chart(kind: ChartKind, algebra: Arc<LieAlgebra>, params: ChartParams) -> Result<PoissonChart> {
    if !kind.supports(algebra.kind) {
        return Err(Error::Unsupported(format!("{} chart on {}", kind.name(), algebra.name)));
    }
    let n = algebra.n;
    if params.base.nrows() != n || params.base.ncols() != n {
        return Err(Error::ParentMismatch(format!(
            "base point of size {} for {}",
            params.base.nrows(),
            algebra.name
        )));
    }
    let group = match algebra.kind {
        AlgebraKind::SuCompact => GroupKind::Su,
        _ => GroupKind::Sl,
    };
    GroupElement::new(group, params.base.clone())?;

    let compact = algebra.kind == AlgebraKind::SuCompact;
    let p = params.param;
    let ks = c(params.k_scale);
    // R^nu together with nu itself: 2 nu R on split algebras, theta R^i with nu = i theta
    let (r_nu, nu) = if compact {
        (constant_r(&algebra, ConstantKind::CompactRi, c(p))?.coeffs, I * p)
    } else {
        (
            constant_r(&algebra, ConstantKind::StandardSplit, c(2.0 * p))?.coeffs,
            c(p),
        )
    };
    let wznw_r = || RPart {
        constant: r_nu.clone(),
        dynamical: Some((DynamicalRMatrix::k_nu(algebra.clone(), nu), ks)),
    };
    let sts = || Sector::LogForm {
        r: RPart::constant(r_nu.clone()),
        weight: nu,
    };
    let compact_sector = || -> Result<Sector> {
        let ri = constant_r(&algebra, ConstantKind::CompactRi, c(1.0))?;
        Ok(Sector::Closed {
            prefactor: c(p),
            r_op: ri.to_operator()?,
            scale: I,
        })
    };
    let nonzero = |what: &str| -> Result<()> {
        if p == 0.0 {
            Err(Error::Domain(format!("{what} requires a nonzero parameter")))
        } else {
            Ok(())
        }
    };

    let (gg, sector) = match kind {
        ChartKind::Sklyanin => (Some(RPart::constant(r_nu.clone())), None),
        ChartKind::StsLog => {
            nonzero("sts_log")?;
            (None, Some(sts()))
        }
        ChartKind::Heisenberg => {
            nonzero("heisenberg")?;
            (Some(RPart::constant(r_nu.clone())), Some(sts()))
        }
        ChartKind::WznwMonodromy => (
            None,
            Some(Sector::LogForm {
                r: wznw_r(),
                weight: c(0.5),
            }),
        ),
        ChartKind::WznwGroupoid => (
            Some(wznw_r()),
            Some(Sector::LogForm {
                r: wznw_r(),
                weight: c(0.5),
            }),
        ),
        ChartKind::CanonicalGroupoid => {
            nonzero("canonical_groupoid")?;
            let gg = RPart {
                constant: r_nu.clone(),
                dynamical: Some((DynamicalRMatrix::k_can(algebra.clone(), nu), ks * (nu * 2.0))),
            };
            (Some(gg), Some(sts()))
        }
        ChartKind::CompactHeisenberg => {
            nonzero("compact_heisenberg")?;
            (Some(RPart::constant(r_nu.clone())), Some(compact_sector()?))
        }
        ChartKind::CompactGroupoid => {
            nonzero("compact_groupoid")?;
            let gg = RPart {
                constant: r_nu.clone(),
                dynamical: Some((DynamicalRMatrix::k_compact(algebra.clone(), p), ks * p)),
            };
            (Some(gg), Some(compact_sector()?))
        }
    };
    Ok(PoissonChart {
        kind,
        algebra,
        blocks: kind.blocks(),
        params,
        gg,
        sector,
    })
}

impl PoissonChart {
    pub fn dimension(&self) -> usize {
        self.blocks.len() * self.algebra.dim()
    }

    pub fn offset(&self, block: Block) -> Option<usize> {
        let d = self.algebra.dim();
        self.blocks.iter().position(|b| *b == block).map(|i| i * d)
    }

    pub fn descriptor(&self) -> ChartDescriptor {
        let d = self.algebra.dim();
        ChartDescriptor {
            kind: self.kind,
            algebra: self.algebra.name.clone(),
            dimension: self.dimension(),
            blocks: self
                .blocks
                .iter()
                .enumerate()
                .map(|(i, b)| BlockDescriptor {
                    block: *b,
                    offset: i * d,
                    meaning: b.describe(self.kind).to_string(),
                })
                .collect(),
            param: self.params.param,
            k_scale: self.params.k_scale,
        }
    }

    /// The same bracket restricted to the log block, which closes on itself.
    pub fn log_sector(&self) -> Result<PoissonChart> {
        if self.sector.is_none() {
            return Err(Error::Unsupported(format!("{} has no log block", self.kind.name())));
        }
        Ok(PoissonChart {
            blocks: vec![Block::Log],
            gg: None,
            ..self.clone()
        })
    }

    fn block_coords(&self, x: &[f64], block: Block) -> Option<CVec> {
        let d = self.algebra.dim();
        self.offset(block)
            .map(|o| CVec::from_iterator(d, x[o..o + d].iter().map(|v| c(*v))))
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dimension() {
            return Err(Error::Domain(format!(
                "{} coordinates for a chart of dimension {}",
                x.len(),
                self.dimension()
            )));
        }
        Ok(())
    }

    /// g = g0 exp(xi) for the group block.
    pub fn group_element(&self, x: &[f64]) -> Result<CMat> {
        self.check_len(x)?;
        let xi = self
            .block_coords(x, Block::Group)
            .ok_or_else(|| Error::Unsupported(format!("{} has no group block", self.kind.name())))?;
        Ok(&self.params.base * linalg::expm(&self.algebra.to_matrix(&xi)))
    }

    /// Largest ratio |s z| / pi over every analytic function evaluated at x;
    /// the nearest pole or branch point is at ratio 1.
    pub fn pole_ratio(&self, x: &[f64]) -> Result<f64> {
        self.check_len(x)?;
        let mut worst: f64 = 0.0;
        for block in &self.blocks {
            let v = self.block_coords(x, *block).unwrap();
            let calc = AdCalculus::new(&self.algebra.to_matrix(&v));
            let r = match block {
                Block::Group => {
                    let own = calc.pole_ratio(&ScalarFunction::Lambda { scale: c(0.5) });
                    let dynamic = self.gg.as_ref().map_or(0.0, |g| g.pole_ratio(&calc));
                    own.max(dynamic)
                }
                _ => {
                    let s = self.sector.as_ref().map_or(0.0, |s| s.pole_ratio(&calc));
                    s.max(self.gg.as_ref().map_or(0.0, |g| g.pole_ratio(&calc)))
                }
            };
            worst = worst.max(r);
        }
        Ok(worst)
    }

    /// Complex bivector; real up to rounding for the supported algebras.
    pub fn bivector_complex(&self, x: &[f64]) -> Result<CMat> {
        self.check_len(x)?;
        let alg = &self.algebra;
        let d = alg.dim();
        let n = self.dimension();
        let mut p = CMat::zeros(n, n);
        let log = self.block_coords(x, Block::Log);
        let tilde = self.block_coords(x, Block::TildeLog);
        let zero = CVec::zeros(d);

        let put = |p: &mut CMat, i: usize, j: usize, m: &CMat| {
            p.view_mut((i, j), (d, d)).copy_from(m);
            if i != j {
                p.view_mut((j, i), (d, d)).copy_from(&(-m.transpose()));
            }
        };

        let sector_at = |v: &CVec| -> Result<(CMat, CMat)> { self.sector.as_ref().unwrap().blocks(alg, v) };
        let log_blocks = match (&log, &self.sector) {
            (Some(v), Some(_)) => Some(sector_at(v)?),
            _ => None,
        };
        let tilde_blocks = match (&tilde, &self.sector) {
            (Some(v), Some(_)) => Some(sector_at(v)?),
            _ => None,
        };

        if let Some(og) = self.offset(Block::Group) {
            let xi = self.block_coords(x, Block::Group).unwrap();
            let g = &self.params.base * linalg::expm(&alg.to_matrix(&xi));
            let a = adjoint_matrix(alg, &linalg::inverse(&g)?)?;
            let rxi = matfun::analytic_of_ad_coeffs(alg, &ScalarFunction::Lambda { scale: c(0.5) }, &xi)?;
            let gg = self.gg.as_ref().unwrap();
            let right = gg.at(log.as_ref().unwrap_or(&zero))?;
            let left = gg.at(tilde.as_ref().or(log.as_ref()).unwrap_or(&zero))?;
            let tt = right - &a * left * a.transpose();
            put(&mut p, og, og, &(&rxi * tt * rxi.transpose()));
            if let (Some(ol), Some((cross, _))) = (self.offset(Block::Log), &log_blocks) {
                put(&mut p, og, ol, &(&rxi * cross));
            }
            if let (Some(ot), Some((cross, _))) = (self.offset(Block::TildeLog), &tilde_blocks) {
                put(&mut p, og, ot, &(&rxi * &a * cross));
            }
        }
        if let (Some(ol), Some((_, block))) = (self.offset(Block::Log), &log_blocks) {
            put(&mut p, ol, ol, block);
        }
        if let (Some(ot), Some((_, block))) = (self.offset(Block::TildeLog), &tilde_blocks) {
            put(&mut p, ot, ot, &(-block));
        }
        Ok(p)
    }

    /// The real bivector Pi^{ij}(x) = {x^i, x^j}.
    pub fn bivector(&self, x: &[f64]) -> Result<RMat> {
        let p = self.bivector_complex(x)?;
        let scale = linalg::frob(&p).max(1.0);
        let im = linalg::max_imag(&p);
        if im > 1e-10 * scale {
            return Err(Error::Numerical(format!(
                "{} bivector has imaginary part {im:e}",
                self.kind.name()
            )));
        }
        Ok(linalg::real_part(&p))
    }

    /// Right-trivialized cross block {theta^a, x^c} at the log variable.
    pub fn cross_block(&self, v: &CVec) -> Result<CMat> {
        let s = self
            .sector
            .as_ref()
            .ok_or_else(|| Error::Unsupported(format!("{} has no log block", self.kind.name())))?;
        Ok(s.blocks(&self.algebra, v)?.0)
    }
}

/// Totally antisymmetric Jacobiator of a bivector field.
#[derive(Debug, Clone)]
pub struct Jacobiator {
    pub dim: usize,
    pub data: Vec<f64>,
}

impl Jacobiator {
    pub fn get(&self, a: usize, b: usize, cc: usize) -> f64 {
        self.data[(a * self.dim + b) * self.dim + cc]
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Deviation from total antisymmetry (zero by construction up to rounding).
    pub fn antisymmetry_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                for cc in 0..n {
                    let v = self.get(a, b, cc);
                    worst = worst.max((v + self.get(b, a, cc)).abs());
                    worst = worst.max((v - self.get(b, cc, a)).abs());
                }
            }
        }
        worst
    }
}

/// J^{abc} = sum_d Pi^{ad} d_d Pi^{bc} + cyclic, with central differences of step h.
pub fn jacobiator_residual(chart: &PoissonChart, x: &[f64], h: f64) -> Result<Jacobiator> {
    jacobiator_of(|y| chart.bivector(y), x, h)
}

/// Jacobiator of an arbitrary bivector field.
pub fn jacobiator_of(field: impl Fn(&[f64]) -> Result<RMat>, x: &[f64], h: f64) -> Result<Jacobiator> {
    if !(h > 0.0) {
        return Err(Error::Domain(format!("finite-difference step {h}")));
    }
    let n = x.len();
    let pi = field(x)?;
    let mut dpi = Vec::with_capacity(n);
    let mut y = x.to_vec();
    for d in 0..n {
        y[d] = x[d] + h;
        let plus = field(&y)?;
        y[d] = x[d] - h;
        let minus = field(&y)?;
        y[d] = x[d];
        dpi.push((plus - minus) / (2.0 * h));
    }
    let term = |a: usize, b: usize, cc: usize| -> f64 { (0..n).map(|d| pi[(a, d)] * dpi[d][(b, cc)]).sum() };
    let mut data = vec![0.0; n * n * n];
    for a in 0..n {
        for b in 0..n {
            for cc in 0..n {
                data[(a * n + b) * n + cc] = term(a, b, cc) + term(b, cc, a) + term(cc, a, b);
            }
        }
    }
    Ok(Jacobiator { dim: n, data })
}

/// A smooth map between charts.
pub struct SmoothMap<'a> {
    pub source: &'a PoissonChart,
    pub target: &'a PoissonChart,
    forward: MapForm,
}

enum MapForm {
    /// x -> L x with exact Jacobian L.
    Linear(RMat),
    /// General map; Jacobian by central differences of step h.
    General {
        f: Box<dyn Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync>,
        h: f64,
    },
}

impl<'a> SmoothMap<'a> {
    pub fn linear(source: &'a PoissonChart, target: &'a PoissonChart, l: RMat) -> Result<Self> {
        if l.nrows() != target.dimension() || l.ncols() != source.dimension() {
            return Err(Error::ParentMismatch(format!(
                "{}x{} Jacobian between charts of dimension {} and {}",
                l.nrows(),
                l.ncols(),
                source.dimension(),
                target.dimension()
            )));
        }
        Ok(SmoothMap {
            source,
            target,
            forward: MapForm::Linear(l),
        })
    }

    pub fn identity(chart: &'a PoissonChart) -> Self {
        SmoothMap {
            source: chart,
            target: chart,
            forward: MapForm::Linear(RMat::identity(chart.dimension(), chart.dimension())),
        }
    }

    /// Block-diagonal scaling: every coordinate of block `b` is multiplied by
    /// the factor given for it.
    pub fn block_scaling(source: &'a PoissonChart, target: &'a PoissonChart, factors: &[(Block, f64)]) -> Result<Self> {
        if source.blocks != target.blocks {
            return Err(Error::ParentMismatch("charts with different block layouts".into()));
        }
        let d = source.algebra.dim();
        let mut l = RMat::identity(source.dimension(), source.dimension());
        for (block, f) in factors {
            if let Some(o) = source.offset(*block) {
                for i in o..o + d {
                    l[(i, i)] = *f;
                }
            }
        }
        Self::linear(source, target, l)
    }

    pub fn general(
        source: &'a PoissonChart,
        target: &'a PoissonChart,
        f: impl Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync + 'static,
        h: f64,
    ) -> Self {
        SmoothMap {
            source,
            target,
            forward: MapForm::General { f: Box::new(f), h },
        }
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        match &self.forward {
            MapForm::Linear(l) => Ok((l * nalgebra::DVector::from_column_slice(x)).as_slice().to_vec()),
            MapForm::General { f, .. } => f(x),
        }
    }

    pub fn jacobian(&self, x: &[f64]) -> Result<RMat> {
        match &self.forward {
            MapForm::Linear(l) => Ok(l.clone()),
            MapForm::General { f, h } => {
                let m = self.target.dimension();
                let mut jac = RMat::zeros(m, x.len());
                let mut y = x.to_vec();
                for j in 0..x.len() {
                    y[j] = x[j] + h;
                    let p = f(&y)?;
                    y[j] = x[j] - h;
                    let q = f(&y)?;
                    y[j] = x[j];
                    for i in 0..m {
                        jac[(i, j)] = (p[i] - q[i]) / (2.0 * h);
                    }
                }
                Ok(jac)
            }
        }
    }
}

/// Pi_target(phi(x)) - J Pi_source(x) J^T.
pub fn poisson_map_residual(map: &SmoothMap, x: &[f64]) -> Result<RMat> {
    let y = map.apply(x)?;
    let j = map.jacobian(x)?;
    let pt = map.target.bivector(&y)?;
    let ps = map.source.bivector(x)?;
    Ok(pt - &j * ps * j.transpose())
}

/// Closed-form blocks of a Heisenberg-type sector, p(-R o ad_x + chi(s ad_x))
/// and p(-ad_x o R + chi(s ad_x)) ad_x, each composed with g^-1 so that they
/// are directly comparable with bivector blocks.
pub fn closed_form_blocks(alg: &LieAlgebra, prefactor: C64, r_op: &CMat, scale: C64, x: &CVec) -> Result<(CMat, CMat)> {
    Sector::Closed {
        prefactor,
        r_op: r_op.clone(),
        scale,
    }
    .blocks(alg, x)
}

/// Discrepancies of the momentum map property on the Heisenberg double.
#[derive(Debug, Clone)]
pub struct MomentumResidual {
    /// <<(T,T), {g_ij, (O+,O-)} (O+,O-)^-1>> - (gT)_ij
    pub group: CMat,
    /// <<(T,T), {Omega_ij, (O+,O-)} (O+,O-)^-1>> - [Omega,T]_ij
    pub omega: CMat,
}

impl MomentumResidual {
    pub fn norm(&self) -> f64 {
        linalg::frob(&self.group).max(linalg::frob(&self.omega))
    }
}

/// Infinitesimal generation of the right action by the momentum variables on
/// a Heisenberg chart, evaluated with the bivector of the chart and the Gauss
/// factorization of Omega = exp(omega).
pub fn momentum_generation_residual(chart: &PoissonChart, x: &[f64], t: &CVec) -> Result<MomentumResidual> {
    if chart.kind != ChartKind::Heisenberg {
        return Err(Error::Unsupported(format!(
            "momentum generation on a {} chart",
            chart.kind.name()
        )));
    }
    let alg = &chart.algebra;
    let d = alg.dim();
    let nu = chart.params.param;
    let og = chart.offset(Block::Group).unwrap();
    let ol = chart.offset(Block::Log).unwrap();
    let pi = linalg::complexify(&chart.bivector(x)?);
    let xi = chart.block_coords(x, Block::Group).unwrap();
    let omega = chart.block_coords(x, Block::Log).unwrap();
    let g = chart.group_element(x)?;
    let om_mat = alg.to_matrix(&omega);
    let big_omega = linalg::expm(&om_mat);
    let (plus, minus) = rmatrix::factorize_g_star(&big_omega)?;
    let plus_inv = linalg::inverse(&plus)?;
    let minus_inv = linalg::inverse(&minus)?;
    let tm = alg.to_matrix(t);

    // d/d omega^c of Omega = Omega (lambda(ad_omega / 2)^-1 e_c)
    let r_om = matfun::analytic_of_ad_coeffs(alg, &ScalarFunction::Lambda { scale: c(0.5) }, &omega)?;
    let r_om_inv = linalg::inverse(&r_om)?;
    let d_omega: Vec<CMat> = (0..d)
        .map(|cc| &big_omega * alg.to_matrix(&r_om_inv.column(cc).into_owned()))
        .collect();
    // pairing of (T,T) with the right-trivialized variation of (O+, O-)
    let mut pair = Vec::with_capacity(d);
    for dom in &d_omega {
        let (xp, xm) = rmatrix::factorization_derivative(&plus, &minus, dom)?;
        let yp = &plus * xp * &plus_inv;
        let ym = &minus * xm * &minus_inv;
        let v = ((&tm * yp).trace() - (&tm * ym).trace()) / (2.0 * nu);
        pair.push(v);
    }

    // {g, omega^c} = sum_a dg/dxi^a Pi^{xi_a omega_c}, dg/dxi^a = g T(lambda(ad_xi/2)^-1 e_a)
    let r_xi = matfun::analytic_of_ad_coeffs(alg, &ScalarFunction::Lambda { scale: c(0.5) }, &xi)?;
    let r_xi_inv = linalg::inverse(&r_xi)?;
    let n = alg.n;
    let mut group = CMat::zeros(n, n);
    for (cc, pc) in pair.iter().enumerate() {
        let col = &r_xi_inv * pi.view((og, ol + cc), (d, 1)).into_owned();
        let col = CVec::from_iterator(d, col.iter().copied());
        group += &g * alg.to_matrix(&col) * *pc;
    }
    group -= &g * &tm;

    let mut omega_res = CMat::zeros(n, n);
    for (cc, pc) in pair.iter().enumerate() {
        for (dd, dom) in d_omega.iter().enumerate() {
            let w = pi[(ol + dd, ol + cc)];
            if w != c(0.0) {
                omega_res += dom * (w * *pc);
            }
        }
    }
    omega_res -= &big_omega * &tm - &tm * &big_omega;
    Ok(MomentumResidual {
        group,
        omega: omega_res,
    })
}

/// Lowered M-sector bracket g Pi g + f_ab^c (g m)_c, which vanishes in the
/// Abelian limit nu = 0, R = 0.
pub fn abelian_limit_residual(chart: &PoissonChart, x: &[f64]) -> Result<RMat> {
    if chart.kind != ChartKind::WznwMonodromy || chart.params.param != 0.0 {
        return Err(Error::Unsupported(
            "the Abelian limit needs a wznw_monodromy chart at nu = 0".into(),
        ));
    }
    let alg = &chart.algebra;
    let g = alg.form()?;
    let d = alg.dim();
    let pi = chart.bivector(x)?;
    let m = nalgebra::DVector::from_column_slice(x);
    let m_low = g * m;
    let mut want = RMat::zeros(d, d);
    for a in 0..d {
        for b in 0..d {
            want[(a, b)] = -(0..d)
                .map(|cc| alg.structure_constant(a, b, cc) * m_low[cc])
                .sum::<f64>();
        }
    }
    Ok(g * pi * g - want)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::ScalarField;

    fn sl(n: usize) -> Arc<LieAlgebra> {
        Arc::new(LieAlgebra::sl(n, ScalarField::Real).unwrap())
    }

    fn su(n: usize) -> Arc<LieAlgebra> {
        Arc::new(LieAlgebra::su(n).unwrap())
    }

    fn point(d: usize, seed: u64) -> Vec<f64> {
        // small deterministic pseudo-random coordinates
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (0..d)
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((s >> 11) as f64 / (1u64 << 53) as f64 - 0.5) * 0.5
            })
            .collect()
    }

    #[test]
    fn sts_vanishes_at_origin() {
        let alg = sl(2);
        let ch = build_chart(ChartKind::StsLog, alg, ChartParams::at_identity(0.35, 2)).unwrap();
        assert_eq!(linalg::frob_real(&ch.bivector(&[0.0; 3]).unwrap()), 0.0);
    }

    #[test]
    fn sklyanin_vanishes_at_identity() {
        let ch = build_chart(ChartKind::Sklyanin, sl(3), ChartParams::at_identity(0.35, 3)).unwrap();
        assert!(linalg::frob_real(&ch.bivector(&[0.0; 8]).unwrap()) < 1e-15);
    }

    #[test]
    fn monodromy_blocks_decouple() {
        let alg = sl(2);
        let ch = build_chart(ChartKind::WznwGroupoid, alg, ChartParams::at_identity(0.35, 2)).unwrap();
        let x = point(9, 3);
        let p = ch.bivector(&x).unwrap();
        let block = p.view((0, 6), (3, 3));
        assert_eq!(block.iter().fold(0.0f64, |m, v| m.max(v.abs())), 0.0);
    }

    #[test]
    fn bivectors_are_antisymmetric() {
        for kind in ChartKind::ALL {
            let alg = if kind.supports(AlgebraKind::SlSplit) {
                sl(2)
            } else {
                su(2)
            };
            let ch = build_chart(kind, alg, ChartParams::at_identity(0.35, 2)).unwrap();
            let x = point(ch.dimension(), 7);
            let p = ch.bivector(&x).unwrap();
            assert!(linalg::frob_real(&(&p + p.transpose())) < 1e-13, "{kind:?}");
        }
    }

    #[test]
    fn constant_bivector_has_zero_jacobiator() {
        let c0 = RMat::from_row_slice(3, 3, &[0.0, 1.0, -2.0, -1.0, 0.0, 0.5, 2.0, -0.5, 0.0]);
        let j = jacobiator_of(|_| Ok(c0.clone()), &[0.1, 0.2, 0.3], 1e-5).unwrap();
        assert_eq!(j.norm(), 0.0);
    }

    #[test]
    fn sts_jacobi_on_sl2() {
        let ch = build_chart(ChartKind::StsLog, sl(2), ChartParams::at_identity(0.35, 2)).unwrap();
        let j = jacobiator_residual(&ch, &point(3, 11), 1e-5).unwrap();
        assert!(j.norm() < 1e-6, "{}", j.norm());
        assert!(j.antisymmetry_defect() < 1e-8);
    }

    #[test]
    fn identity_map_has_zero_residual() {
        let ch = build_chart(ChartKind::Heisenberg, sl(2), ChartParams::at_identity(0.35, 2)).unwrap();
        let map = SmoothMap::identity(&ch);
        let r = poisson_map_residual(&map, &point(6, 5)).unwrap();
        assert_eq!(linalg::frob_real(&r), 0.0);
    }

    #[test]
    fn log_form_matches_closed_formulas() {
        // the STS sector equals 2 nu (-R ad + chi(ad/2)) in closed form
        let alg = sl(3);
        let nu = 0.35;
        let ch = build_chart(ChartKind::StsLog, alg.clone(), ChartParams::at_identity(nu, 3)).unwrap();
        let x = point(8, 2);
        let v = CVec::from_iterator(8, x.iter().map(|t| c(*t)));
        let r_op = constant_r(&alg, ConstantKind::StandardSplit, c(1.0))
            .unwrap()
            .to_operator()
            .unwrap();
        let (cross, block) = closed_form_blocks(&alg, c(2.0 * nu), &r_op, c(0.5), &v).unwrap();
        let (cross_log, block_log) = ch.sector.as_ref().unwrap().blocks(&alg, &v).unwrap();
        assert!(linalg::frob(&(cross - cross_log)) < 1e-12);
        assert!(linalg::frob(&(block - block_log)) < 1e-12);
    }

    #[test]
    fn momentum_at_identity_omega() {
        let alg = sl(2);
        let ch = build_chart(ChartKind::Heisenberg, alg.clone(), ChartParams::at_identity(0.35, 2)).unwrap();
        let mut x = point(6, 9);
        x[3..].iter_mut().for_each(|v| *v = 0.0);
        let t = CVec::from_vec(vec![c(0.3), c(-0.2), c(0.7)]);
        let res = momentum_generation_residual(&ch, &x, &t).unwrap();
        assert!(res.norm() < 1e-9, "{}", res.norm());
        let zero = momentum_generation_residual(&ch, &x, &CVec::zeros(3)).unwrap();
        assert_eq!(zero.norm(), 0.0);
    }

    #[test]
    fn unsupported_combinations() {
        assert!(build_chart(ChartKind::StsLog, su(2), ChartParams::at_identity(0.3, 2)).is_err());
        assert!(build_chart(ChartKind::CompactHeisenberg, sl(2), ChartParams::at_identity(0.3, 2)).is_err());
    }
}
