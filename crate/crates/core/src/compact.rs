//! The compact case: sl(n,C) as a real double of su(n) and the Borel algebra.
//!
//! A point a of SL(n,C) is written a = g^-1 b~ = b g~ with g, g~ in SU(n) and
//! b, b~ upper triangular with positive diagonal, and Omega = a a^dagger =
//! b b^dagger = exp(2 i omega). Pairings: <X,Y> = tr(XY) on su(n) and
//! <<X,Y>> = Im tr(XY) (theta = 1) on the double.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::liealg::{GroupElement, GroupKind, LieAlgebra, RealifiedDouble};
use crate::linalg::{self, c, commutator, frob, CMat, CVec, RMat, C64, I};
use crate::matfun::{AdCalculus, ScalarFunction};
use crate::poisson::{build_chart, poisson_map_residual, Block, ChartKind, ChartParams, SmoothMap};
use crate::rmatrix::{
    bracket_12_23, constant_r, first_slot_dual, ConstantKind, DynamicalRMatrix, ThreeTensor, TwoTensor,
};

/// Factors of the two Iwasawa decompositions of a.
#[derive(Debug, Clone)]
pub struct IwasawaFactors {
    pub a: CMat,
    pub g: CMat,
    pub b_tilde: CMat,
    pub b: CMat,
    pub g_tilde: CMat,
}

impl IwasawaFactors {
    /// max(|a - g^-1 b~|, |a - b g~|).
    pub fn reconstruction_error(&self) -> f64 {
        let left = frob(&(&self.a - self.g.adjoint() * &self.b_tilde));
        let right = frob(&(&self.a - &self.b * &self.g_tilde));
        left.max(right)
    }
}

#[derive(Debug, Clone)]
pub struct CartanCoords {
    pub big_omega: CMat,
    /// omega in su(n), as a matrix.
    pub omega: CMat,
    /// omega in the su(n) basis.
    pub coords: Vec<f64>,
}

/// Largest condition number accepted by [`iwasawa_cartan`].
pub const IWASAWA_COND_LIMIT: f64 = 1e12;

/// Both Iwasawa decompositions of a and its Cartan coordinates.
pub fn iwasawa_cartan(su: &LieAlgebra, a: &CMat) -> Result<(IwasawaFactors, CartanCoords)> {
    GroupElement::new(GroupKind::RealifiedDouble, a.clone())?;
    let k = linalg::cond(a);
    if !(k < IWASAWA_COND_LIMIT) {
        return Err(Error::Numerical(format!(
            "Iwasawa decomposition at condition number {k:e}"
        )));
    }
    let (q, r) = linalg::qr_positive(a)?;
    let big_omega = a * a.adjoint();
    let b = linalg::reverse_cholesky(&big_omega)?;
    let g_tilde = linalg::inverse(&b)? * a;
    let omega = linalg::hermitian_log(&big_omega)? * (-I * 0.5);
    let coords = su.coords_real(&omega)?;
    Ok((
        IwasawaFactors {
            a: a.clone(),
            g: q.adjoint(),
            b_tilde: r,
            b,
            g_tilde,
        },
        CartanCoords {
            big_omega,
            omega,
            coords,
        },
    ))
}

/// omega = -(i/2) log Omega in the su(n) basis, for Omega in exp(i su(n)).
pub fn omega_of(su: &LieAlgebra, big_omega: &CMat) -> Result<Vec<f64>> {
    su.coords_real(&(linalg::hermitian_log(big_omega)? * (-I * 0.5)))
}

/// The compact double together with the operators used below.
#[derive(Debug, Clone)]
pub struct CompactSetting {
    pub dbl: Arc<RealifiedDouble>,
    /// R^i on su(n) coordinates, from the coefficient tensor.
    pub ri: RMat,
    /// Gram matrix of tr(XY) on the su(n) basis.
    pub gram: RMat,
    /// <<Y_k, T_c>> with Y_k the Borel basis and T_c the su(n) basis.
    pub cross: RMat,
}

impl CompactSetting {
    pub fn new(n: usize) -> Result<Self> {
        let dbl = Arc::new(RealifiedDouble::new(n, 1.0)?);
        let su = dbl.compact.clone();
        let ri = linalg::real_part(&constant_r(&su, ConstantKind::CompactRi, c(1.0))?.to_operator()?);
        let gram = su.form()?.clone();
        let d = su.dim();
        let cross = RMat::from_fn(d, d, |k, cc| {
            dbl.pairing_matrices(dbl.borel.basis_matrix(k), su.basis_matrix(cc))
        });
        Ok(CompactSetting { dbl, ri, gram, cross })
    }

    pub fn su(&self) -> &Arc<LieAlgebra> {
        &self.dbl.compact
    }

    pub fn n(&self) -> usize {
        self.su().n
    }

    /// R^i applied to a matrix of su(n).
    pub fn apply_ri(&self, x: &CMat) -> Result<CMat> {
        let v = nalgebra::DVector::from_vec(self.su().coords_real(x)?);
        Ok(self.su().to_matrix_real((&self.ri * v).as_slice()))
    }

    /// X -> pi_g(-i X) on su(n) coordinates.
    pub fn ri_from_projection(&self) -> Result<RMat> {
        let su = self.su();
        let d = su.dim();
        let mut m = RMat::zeros(d, d);
        for cc in 0..d {
            let img = self.dbl.project_compact(&(su.basis_matrix(cc) * (-I)))?;
            let col = su.coords_real(&img)?;
            for (r, v) in col.into_iter().enumerate() {
                m[(r, cc)] = v;
            }
        }
        Ok(m)
    }

    /// Element of su(n) whose tr-pairing with T_c is grad[c].
    fn gradient_in_g(&self, grad: &[f64]) -> Result<CMat> {
        let v = solve(&self.gram, grad)?;
        Ok(self.su().to_matrix_real(&v))
    }

    /// Element D of su(n) with <<D, Y_k>> = grad[k] over the Borel basis.
    fn dual_in_g(&self, grad: &[f64]) -> Result<CMat> {
        // <<T_c, Y_k>> = cross[k][c]
        let v = solve(&self.cross, grad)?;
        Ok(self.su().to_matrix_real(&v))
    }

    /// Element D of the Borel algebra with <<D, T_c>> = grad[c] over su(n).
    fn dual_in_b(&self, grad: &[f64]) -> Result<CMat> {
        let v = solve(&self.cross.transpose(), grad)?;
        Ok(self.dbl.borel.to_matrix_real(&v))
    }
}

fn solve(m: &RMat, rhs: &[f64]) -> Result<Vec<f64>> {
    let x = m
        .clone()
        .lu()
        .solve(&nalgebra::DVector::from_column_slice(rhs))
        .ok_or_else(|| Error::Numerical("singular pairing matrix".into()))?;
    Ok(x.as_slice().to_vec())
}

/// Fourth-order central difference of a real function of t.
fn fd(f: impl Fn(f64) -> Result<f64>, h: f64) -> Result<f64> {
    Ok((8.0 * (f(h)? - f(-h)?) - (f(2.0 * h)? - f(-2.0 * h)?)) / (12.0 * h))
}

fn fd_matrix(f: impl Fn(f64) -> Result<CMat>, h: f64) -> Result<CMat> {
    Ok(((f(h)? - f(-h)?) * c(8.0) - (f(2.0 * h)? - f(-2.0 * h)?)) / c(12.0 * h))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AppendixIdentity {
    /// R^i(i(Y + Y^dagger)) = Y^dagger - Y.
    RiOnBorelImage,
    /// D_g phi = i grad phi + R^i grad phi (and the primed version).
    GroupDerivativeSplit,
    /// 4 <<alpha, g beta g^-1>> in terms of the trace form.
    ConjugatedPairing,
    /// i lambda(-ad_{i omega}) Y + i lambda(ad_{i omega}) Y^dagger.
    LambdaChiIdentity,
    /// R^i(X) = pi_g(-i X).
    RiAsProjection,
}

impl AppendixIdentity {
    pub const ALL: [AppendixIdentity; 5] = [
        AppendixIdentity::RiOnBorelImage,
        AppendixIdentity::GroupDerivativeSplit,
        AppendixIdentity::ConjugatedPairing,
        AppendixIdentity::LambdaChiIdentity,
        AppendixIdentity::RiAsProjection,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            AppendixIdentity::RiOnBorelImage => "ri_on_borel_image",
            AppendixIdentity::GroupDerivativeSplit => "group_derivative_split",
            AppendixIdentity::ConjugatedPairing => "conjugated_pairing",
            AppendixIdentity::LambdaChiIdentity => "lambda_chi_identity",
            AppendixIdentity::RiAsProjection => "ri_as_projection",
        }
    }

    pub fn anchor(&self) -> &'static str {
        match self {
            AppendixIdentity::RiOnBorelImage => "R^i on i(Y + Y^dagger)",
            AppendixIdentity::GroupDerivativeSplit => "Borel derivative of a group function",
            AppendixIdentity::ConjugatedPairing => "conjugated Borel pairing",
            AppendixIdentity::LambdaChiIdentity => "lambda-chi identity on the Borel algebra",
            AppendixIdentity::RiAsProjection => "R^i as compact projection",
        }
    }
}

/// Inputs of the appendix identities; each identity reads the fields it needs.
#[derive(Debug, Clone)]
pub struct AppendixInputs {
    /// Y, also alpha in the conjugated pairing; in the Borel algebra.
    pub y: CMat,
    /// beta in the Borel algebra.
    pub beta: CMat,
    /// g in SU(n).
    pub g: CMat,
    /// omega in su(n).
    pub omega: CMat,
    /// phi(g) = Re tr(P g) for the group derivative check.
    pub p: CMat,
}

impl AppendixInputs {
    /// Random inputs with coordinates uniform in [-radius, radius].
    pub fn random(set: &CompactSetting, rng: &mut impl Rng, radius: f64) -> Self {
        let n = set.n();
        let su = set.su();
        let borel = &set.dbl.borel;
        let mut draw = |d: usize| -> Vec<f64> { (0..d).map(|_| rng.gen_range(-radius..=radius)).collect() };
        let y = borel.to_matrix_real(&draw(borel.dim()));
        let beta = borel.to_matrix_real(&draw(borel.dim()));
        let g = linalg::expm(&su.to_matrix_real(&draw(su.dim()).iter().map(|v| v * 4.0).collect::<Vec<_>>()));
        let omega = su.to_matrix_real(&draw(su.dim()));
        let pv = draw(2 * n * n);
        let p = CMat::from_fn(n, n, |i, j| C64::new(pv[i * n + j], pv[n * n + i * n + j]));
        AppendixInputs { y, beta, g, omega, p }
    }
}

/// Difference of the two sides of an appendix identity (Frobenius norm).
pub fn appendix_identity_residual(id: AppendixIdentity, set: &CompactSetting, x: &AppendixInputs) -> Result<f64> {
    set.dbl.borel.coords_real(&x.y)?;
    match id {
        AppendixIdentity::RiOnBorelImage => {
            let lhs = set.apply_ri(&((&x.y + x.y.adjoint()) * I))?;
            Ok(frob(&(lhs - (x.y.adjoint() - &x.y))))
        }
        AppendixIdentity::GroupDerivativeSplit => group_derivative_residual(set, &x.g, &x.p),
        AppendixIdentity::ConjugatedPairing => {
            set.dbl.borel.coords_real(&x.beta)?;
            GroupElement::new(GroupKind::Su, x.g.clone())?;
            let (alpha, beta, g) = (&x.y, &x.beta, &x.g);
            let gi = g.adjoint();
            let lhs = 4.0 * set.dbl.pairing_matrices(alpha, &(g * beta * &gi));
            let t1 = ((beta + beta.adjoint()) * I * (&gi * (alpha.adjoint() - alpha) * g)).trace();
            let t2 = ((alpha + alpha.adjoint()) * I * (g * (beta.adjoint() - beta) * &gi)).trace();
            Ok((c(lhs) - t1 - t2).norm())
        }
        AppendixIdentity::LambdaChiIdentity => {
            set.su().coords_real(&x.omega)?;
            let y = &x.y;
            let xx = (y + y.adjoint()) * I;
            let calc = AdCalculus::new(&(&x.omega * I));
            let lam = |s: f64, m: &CMat| calc.apply(&ScalarFunction::Lambda { scale: c(s) }, m);
            let lhs = lam(-1.0, y)? * I + lam(1.0, &y.adjoint())? * I;
            let rhs = -commutator(&x.omega, &set.apply_ri(&xx)?) + calc.apply(&ScalarFunction::chi(), &xx)?;
            Ok(frob(&(lhs - rhs)))
        }
        AppendixIdentity::RiAsProjection => {
            let xx = (&x.y + x.y.adjoint()) * I;
            let lhs = set.apply_ri(&xx)?;
            let rhs = set.dbl.project_compact(&(&xx * (-I)))?;
            Ok(frob(&(lhs - rhs)))
        }
    }
}

/// D_g phi - (i grad + R^i grad) and its primed analogue for phi = Re tr(P g),
/// all derivatives exact.
fn group_derivative_residual(set: &CompactSetting, g: &CMat, p: &CMat) -> Result<f64> {
    GroupElement::new(GroupKind::Su, g.clone())?;
    let su = set.su();
    let d = su.dim();
    let mut worst: f64 = 0.0;
    for left in [true, false] {
        let grad: Vec<f64> = (0..d)
            .map(|cc| {
                let t = su.basis_matrix(cc);
                let moved = if left { t * g } else { g * t };
                (p * moved).trace().re
            })
            .collect();
        let nabla = set.gradient_in_g(&grad)?;
        let dphi = set.dual_in_b(&grad)?;
        let want = &nabla * I + set.apply_ri(&nabla)?;
        worst = worst.max(frob(&(dphi - want)));
    }
    Ok(worst)
}

/// Residuals of the closed forms of D_b f and b (D'_b f) b^-1 for
/// f(b) = <omega(b), T>, with the Borel derivatives taken by finite
/// differences of step h.
pub fn borel_derivative_residuals(set: &CompactSetting, b: &CMat, t: &[f64], h: f64) -> Result<(f64, f64)> {
    GroupElement::new(GroupKind::Borel, b.clone())?;
    let su = set.su();
    let borel = &set.dbl.borel;
    let d = su.dim();
    let tm = su.to_matrix_real(t);
    let f = |m: &CMat| -> Result<f64> { Ok(omega_pairing(set, &omega_of(su, &(m * m.adjoint()))?, t)) };
    let mut left = vec![0.0; d];
    let mut right = vec![0.0; d];
    for k in 0..d {
        let y = borel.basis_matrix(k);
        left[k] = fd(|s| f(&(linalg::expm(&(y * c(s))) * b)), h)?;
        right[k] = fd(|s| f(&(b * linalg::expm(&(y * c(s))))), h)?;
    }
    let db = set.dual_in_g(&left)?;
    let db_prime = set.dual_in_g(&right)?;
    let omega = su.to_matrix_real(&omega_of(su, &(b * b.adjoint()))?);
    let calc = AdCalculus::new(&(&omega * I));
    let chi_t = calc.apply(&ScalarFunction::chi(), &tm)?;
    let a20 = -set.apply_ri(&commutator(&omega, &tm))? + &chi_t;
    let a21 = commutator(&omega, &tm) * I + &chi_t;
    let conj = b * db_prime * linalg::inverse(b)?;
    Ok((frob(&(db - a20)), frob(&(conj - a21))))
}

/// Real probe functions on SL(n,C) in the coordinates (g, omega).
#[derive(Debug, Clone, PartialEq)]
pub enum Probe {
    /// Real or imaginary part of the (row, col) entry of g.
    GroupEntry { row: usize, col: usize, imag: bool },
    /// <omega, T> = tr(omega T) for T in su(n), given by its coordinates.
    OmegaLinear(Vec<f64>),
}

impl Probe {
    pub fn eval(&self, set: &CompactSetting, a: &CMat) -> Result<f64> {
        let (fac, cart) = iwasawa_cartan(set.su(), a)?;
        Ok(match self {
            Probe::GroupEntry { row, col, imag } => {
                let z = fac.g[(*row, *col)];
                if *imag {
                    z.im
                } else {
                    z.re
                }
            }
            Probe::OmegaLinear(t) => omega_pairing(set, &cart.coords, t),
        })
    }

    /// Gradient in the compact_heisenberg chart (xi, omega) at xi = 0.
    fn chart_gradient(&self, set: &CompactSetting, g: &CMat) -> Vec<f64> {
        let su = set.su();
        let d = su.dim();
        let mut out = vec![0.0; 2 * d];
        match self {
            Probe::GroupEntry { row, col, imag } => {
                for cc in 0..d {
                    let z = (g * su.basis_matrix(cc))[(*row, *col)];
                    out[cc] = if *imag { z.im } else { z.re };
                }
            }
            Probe::OmegaLinear(t) => {
                let gt = &set.gram * nalgebra::DVector::from_column_slice(t);
                out[d..].copy_from_slice(gt.as_slice());
            }
        }
        out
    }
}

fn omega_pairing(set: &CompactSetting, w: &[f64], t: &[f64]) -> f64 {
    let gt = &set.gram * nalgebra::DVector::from_column_slice(t);
    w.iter().zip(gt.iter()).map(|(x, y)| x * y).sum()
}

/// The two brackets of a probe pair and their difference.
#[derive(Debug, Clone, Copy)]
pub struct BracketRoutes {
    /// From the bracket on SL(n,C) with finite-difference D, D'.
    pub direct: f64,
    /// From the compact_heisenberg chart.
    pub chart: f64,
}

impl BracketRoutes {
    pub fn difference(&self) -> f64 {
        (self.direct - self.chart).abs()
    }
}

/// Gradients of a probe along e^{tX} a and a e^{tX} over the double basis.
fn double_gradients(set: &CompactSetting, probe: &Probe, a: &CMat, h: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let basis = set.dbl.double.basis();
    let mut left = Vec::with_capacity(basis.len());
    let mut right = Vec::with_capacity(basis.len());
    for x in basis {
        left.push(fd(|s| probe.eval(set, &(linalg::expm(&(x * c(s))) * a)), h)?);
        right.push(fd(|s| probe.eval(set, &(a * linalg::expm(&(x * c(s))))), h)?);
    }
    Ok((left, right))
}

/// Bracket -theta <<D Phi, rho D Psi>> - theta <<D' Phi, rho D' Psi>> from
/// finite-difference gradients.
pub fn double_bracket(set: &CompactSetting, theta: f64, a: &CMat, phi: &Probe, psi: &Probe, h: f64) -> Result<f64> {
    let d = set.su().dim();
    let g1 = set.dbl.double.form()?;
    let g1_inv = g1
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Numerical("degenerate pairing on the double".into()))?;
    let rho = RMat::from_fn(2 * d, 2 * d, |i, j| {
        if i != j {
            0.0
        } else if i < d {
            0.5
        } else {
            -0.5
        }
    });
    let (lp, rp) = double_gradients(set, phi, a, h)?;
    let (lq, rq) = double_gradients(set, psi, a, h)?;
    let form = |u: &[f64], v: &[f64]| -> f64 {
        let u = nalgebra::DVector::from_column_slice(u);
        let v = nalgebra::DVector::from_column_slice(v);
        (u.transpose() * &rho * &g1_inv * v)[(0, 0)]
    };
    Ok(-theta * (form(&lp, &lq) + form(&rp, &rq)))
}

/// Bracket of two probes through the compact_heisenberg chart at (g(a), omega(a)).
pub fn chart_bracket(set: &CompactSetting, theta: f64, a: &CMat, phi: &Probe, psi: &Probe) -> Result<f64> {
    let (fac, cart) = iwasawa_cartan(set.su(), a)?;
    let chart = build_chart(
        ChartKind::CompactHeisenberg,
        set.su().clone(),
        ChartParams::new(theta, fac.g.clone()),
    )?;
    let d = set.su().dim();
    let mut x = vec![0.0; 2 * d];
    x[d..].copy_from_slice(&cart.coords);
    let pi = chart.bivector(&x)?;
    let u = nalgebra::DVector::from_vec(phi.chart_gradient(set, &fac.g));
    let v = nalgebra::DVector::from_vec(psi.chart_gradient(set, &fac.g));
    Ok((u.transpose() * pi * v)[(0, 0)])
}

/// Both routes to the bracket of a probe pair at a.
pub fn coordinate_bracket_residual(
    set: &CompactSetting,
    theta: f64,
    a: &CMat,
    phi: &Probe,
    psi: &Probe,
    h: f64,
) -> Result<BracketRoutes> {
    Ok(BracketRoutes {
        direct: double_bracket(set, theta, a, phi, psi, h)?,
        chart: chart_bracket(set, theta, a, phi, psi)?,
    })
}

/// theta sum r^{cd} [(g T_c)(g T_d) - (T_c g)(T_d g)] for two entry probes:
/// the Sklyanin bracket theta [g (x) g, R^i] read off on real probes.
pub fn sklyanin_probe_bracket(set: &CompactSetting, theta: f64, g: &CMat, phi: &Probe, psi: &Probe) -> Result<f64> {
    let su = set.su();
    let r = constant_r(su, ConstantKind::CompactRi, c(1.0))?.coeffs;
    let d = su.dim();
    let entry = |p: &Probe, m: &CMat| -> Result<f64> {
        match p {
            Probe::GroupEntry { row, col, imag } => {
                let z = m[(*row, *col)];
                Ok(if *imag { z.im } else { z.re })
            }
            Probe::OmegaLinear(_) => Err(Error::Unsupported("Sklyanin value of an omega probe".into())),
        }
    };
    let mut s = 0.0;
    for a in 0..d {
        for b in 0..d {
            let w = r[(a, b)].re;
            if w == 0.0 {
                continue;
            }
            let (ta, tb) = (su.basis_matrix(a), su.basis_matrix(b));
            s +=
                w * (entry(phi, &(g * ta))? * entry(psi, &(g * tb))? - entry(phi, &(ta * g))? * entry(psi, &(tb * g))?);
        }
    }
    Ok(theta * s)
}

/// Omega_t^X = exp(t(iX + R^i X)) Omega exp(t(iX - R^i X)).
pub fn omega_flow(set: &CompactSetting, big_omega: &CMat, x: &CMat, t: f64) -> Result<CMat> {
    let rx = set.apply_ri(x)?;
    let l = linalg::expm(&((x * I + &rx) * c(t)));
    let r = linalg::expm(&((x * I - &rx) * c(t)));
    Ok(l * big_omega * r)
}

/// d/dt F(Omega_t^X) - d/dt F~(e^{-2Yt} b) at t = 0 for F(Omega) = <omega, T>,
/// F~(b) = F(b b^dagger) and X = i(Y + Y^dagger), with matched steps h.
pub fn derivative_transfer_residual(set: &CompactSetting, t: &[f64], b: &CMat, x: &CMat, h: f64) -> Result<f64> {
    GroupElement::new(GroupKind::Borel, b.clone())?;
    let su = set.su();
    let y = set.dbl.borel_preimage(x)?;
    let big_omega = b * b.adjoint();
    let f = |om: &CMat| -> Result<f64> { Ok(omega_pairing(set, &omega_of(su, om)?, t)) };
    let lhs = fd(|s| f(&omega_flow(set, &big_omega, x, s)?), h)?;
    let rhs = fd(
        |s| {
            let bt = linalg::expm(&(&y * c(-2.0 * s))) * b;
            f(&(&bt * bt.adjoint()))
        },
        h,
    )?;
    Ok((lhs - rhs).abs())
}

/// |Omega_t^X - b_t b_t^dagger| with b_t = e^{-2Yt} b.
pub fn flow_consistency_residual(set: &CompactSetting, b: &CMat, x: &CMat, t: f64) -> Result<f64> {
    let y = set.dbl.borel_preimage(x)?;
    let flow = omega_flow(set, &(b * b.adjoint()), x, t)?;
    let bt = linalg::expm(&(&y * c(-2.0 * t))) * b;
    Ok(frob(&(flow - &bt * bt.adjoint())))
}

/// LHS - rhs of the compact PL-CDYBE written on the Borel group:
/// [R^i + K~, R^i + K~] + T^a (x) L_{T*_a} K~ + cycl, with K~(b) = k_scale K(b b^dagger),
/// T*_a = -2 Y_a and derivatives along e^{t T*_a} b by central differences.
pub fn natural_plcdybe_residual(
    set: &CompactSetting,
    theta: f64,
    b: &CMat,
    rhs: &ThreeTensor,
    k_scale: f64,
    h: f64,
) -> Result<ThreeTensor> {
    GroupElement::new(GroupKind::Borel, b.clone())?;
    let su = set.su();
    let d = su.dim();
    let k = DynamicalRMatrix::k_compact(su.clone(), theta);
    let k_tilde = |m: &CMat| -> Result<CMat> {
        let w = omega_of(su, &(m * m.adjoint()))?;
        let v = CVec::from_iterator(d, w.iter().map(|x| c(*x)));
        Ok(k.dynamical_at(&v)?.coeffs * c(k_scale))
    };
    let ri = constant_r(su, ConstantKind::CompactRi, c(1.0))?;
    let full = TwoTensor::new(su.clone(), ri.coeffs.clone() + k_tilde(b)?)?;
    let mut parts = Vec::with_capacity(d);
    for a in 0..d {
        let t_star = set.dbl.borel_preimage(su.basis_matrix(a))? * c(-2.0);
        parts.push(fd_matrix(|s| k_tilde(&(linalg::expm(&(&t_star * c(s))) * b)), h)?);
    }
    let lhs = bracket_12_23(&full, &full)
        .plus(&first_slot_dual(su, &parts)?)
        .cyclic_sum();
    Ok(lhs.minus(rhs))
}

/// Poisson-map residual of m -> factor * m from the compact wznw_monodromy
/// bivector to the omega sector of compact_heisenberg (factor = theta in the
/// genuine check).
pub fn compact_momentum_map_residual(su: &Arc<LieAlgebra>, theta: f64, m: &[f64], factor: f64) -> Result<RMat> {
    let n = su.n;
    let source = build_chart(ChartKind::WznwMonodromy, su.clone(), ChartParams::at_identity(theta, n))?;
    let target = build_chart(
        ChartKind::CompactHeisenberg,
        su.clone(),
        ChartParams::at_identity(theta, n),
    )?
    .log_sector()?;
    let map = SmoothMap::block_scaling(&source, &target, &[(Block::Log, factor)])?;
    poisson_map_residual(&map, m)
}
