//! Scalar functions chi, lambda, f_nu and their application to ad operators.
//!
//! Functions of `ad_m` are evaluated in the defining representation: with
//! m = V diag(mu) V^-1 one has f(ad_m) X = V [F o (V^-1 X V)] V^-1 where
//! F_pq = f(mu_p - mu_q) and `o` is the entrywise product. When V is badly
//! conditioned the truncated Taylor series in repeated commutators is used.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::liealg::{AlgebraElement, GroupElement, LieAlgebra, ScalarField};
use crate::linalg::{self, c, commutator, frob, CMat, CVec, C64, I};

/// Below this |scale * z| the Taylor branch is used.
pub const SERIES_RADIUS: f64 = 0.5;
const SERIES_TERMS: usize = 24;
const COND_LIMIT: f64 = 1e8;
const POLE_MARGIN: f64 = 1e-3;

/// Taylor coefficients of chi(w) = w coth w = sum_k c_k w^(2k).
///
/// From w chi' = chi - chi^2 + w^2 one gets (2k+1) c_k = [k = 1] - sum_{j=1}^{k-1} c_j c_{k-j}.
pub fn chi_coefficients(n: usize) -> Vec<f64> {
    let mut cs = vec![1.0];
    for k in 1..n {
        let s: f64 = (1..k).map(|j| cs[j] * cs[k - j]).sum();
        let delta = if k == 1 { 1.0 } else { 0.0 };
        cs.push((delta - s) / (2 * k + 1) as f64);
    }
    cs
}

fn coeffs() -> &'static [f64] {
    use std::sync::OnceLock;
    static C: OnceLock<Vec<f64>> = OnceLock::new();
    C.get_or_init(|| chi_coefficients(SERIES_TERMS + 1))
}

pub fn chi_series(w: C64) -> C64 {
    let w2 = w * w;
    let mut acc = c(0.0);
    for &ck in coeffs().iter().rev() {
        acc = acc * w2 + ck;
    }
    acc
}

pub fn chi_closed(w: C64) -> C64 {
    w / w.tanh()
}

/// chi(i z) = z cot z for real z.
pub fn chi_imaginary(z: f64) -> f64 {
    if z.abs() < 1e-3 {
        let z2 = z * z;
        1.0 - z2 / 3.0 - z2 * z2 / 45.0 - 2.0 * z2 * z2 * z2 / 945.0
    } else {
        z / z.tan()
    }
}

/// chi'(w) from the series sum 2k c_k w^(2k-1).
fn chi_prime_series(w: C64) -> C64 {
    let w2 = w * w;
    let cs = coeffs();
    let mut acc = c(0.0);
    for k in (1..cs.len()).rev() {
        acc = acc * w2 + 2.0 * k as f64 * cs[k];
    }
    acc * w
}

fn chi_prime_closed(w: C64) -> C64 {
    let y = chi_closed(w);
    (y - y * y + w * w) / w
}

fn chi_value(w: C64) -> C64 {
    if w.norm() < SERIES_RADIUS {
        chi_series(w)
    } else {
        chi_closed(w)
    }
}

fn chi_prime(w: C64) -> C64 {
    if w.norm() < SERIES_RADIUS {
        chi_prime_series(w)
    } else {
        chi_prime_closed(w)
    }
}

/// The analytic functions used by the dynamical r-matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalarFunction {
    /// chi(s z) with chi(w) = w coth w.
    Chi { scale: C64 },
    /// lambda(s z) with lambda(w) = w e^w / sinh w = chi(w) + w.
    Lambda { scale: C64 },
    /// [chi(a z) - chi(b z)] / z.
    ChiDifference { a: C64, b: C64 },
}

impl ScalarFunction {
    pub fn chi() -> Self {
        ScalarFunction::Chi { scale: c(1.0) }
    }

    pub fn lambda() -> Self {
        ScalarFunction::Lambda { scale: c(1.0) }
    }

    /// f_nu(z) = z^-1 [chi(z/2) - chi(nu z)].
    pub fn f_nu(nu: C64) -> Self {
        ScalarFunction::ChiDifference { a: c(0.5), b: nu }
    }

    /// (1/theta) f_{i theta}(z / theta), the compact dynamical r-matrix as a
    /// function of ad_omega.
    pub fn f_nu_compact(theta: f64) -> Self {
        ScalarFunction::ChiDifference {
            a: c(0.5 / theta),
            b: I,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ScalarFunction::Chi { .. } => "chi",
            ScalarFunction::Lambda { .. } => "lambda",
            ScalarFunction::ChiDifference { .. } => "f_nu",
        }
    }

    fn scales(&self) -> Vec<C64> {
        match *self {
            ScalarFunction::Chi { scale } | ScalarFunction::Lambda { scale } => vec![scale],
            ScalarFunction::ChiDifference { a, b } => vec![a, b],
        }
    }

    /// Rejects z within the guard margin of a pole z = i pi k / s (k != 0).
    pub fn check_poles(&self, z: C64) -> Result<()> {
        for s in self.scales() {
            if s.norm() == 0.0 {
                continue;
            }
            let w = s * z;
            let k = (w.im / std::f64::consts::PI).round();
            if k == 0.0 {
                continue;
            }
            let pole = I * (std::f64::consts::PI * k) / s;
            let distance = (z - pole).norm();
            if distance < POLE_MARGIN * (1.0 + pole.norm()) {
                return Err(Error::PoleProximity {
                    function: self.name().into(),
                    arg: z,
                    pole,
                    distance,
                });
            }
        }
        Ok(())
    }

    /// max |s z| / pi over the scales; the nearest pole sits at ratio 1.
    pub fn pole_ratio(&self, z: C64) -> f64 {
        self.scales()
            .iter()
            .map(|s| (s * z).norm() / std::f64::consts::PI)
            .fold(0.0, f64::max)
    }

    fn max_scale(&self) -> f64 {
        self.scales().iter().map(|s| s.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        self.check_poles(z)?;
        Ok(self.eval_unchecked(z))
    }

    fn eval_unchecked(&self, z: C64) -> C64 {
        match *self {
            ScalarFunction::Chi { scale } => chi_value(scale * z),
            ScalarFunction::Lambda { scale } => chi_value(scale * z) + scale * z,
            ScalarFunction::ChiDifference { a, b } => {
                if z.norm() * self.max_scale() < SERIES_RADIUS {
                    self.difference_series(z)
                } else {
                    (chi_value(a * z) - chi_value(b * z)) / z
                }
            }
        }
    }

    fn difference_series(&self, z: C64) -> C64 {
        let ScalarFunction::ChiDifference { a, b } = *self else {
            unreachable!()
        };
        let (a2, b2, z2) = (a * a, b * b, z * z);
        let cs = coeffs();
        let mut acc = c(0.0);
        for k in (1..cs.len()).rev() {
            acc = acc * z2 + cs[k] * (a2.powu(k as u32) - b2.powu(k as u32));
        }
        acc * z
    }

    /// Value with the closed-form branch forced (for crossover tests).
    pub fn eval_closed(&self, z: C64) -> C64 {
        match *self {
            ScalarFunction::Chi { scale } => chi_closed(scale * z),
            ScalarFunction::Lambda { scale } => chi_closed(scale * z) + scale * z,
            ScalarFunction::ChiDifference { a, b } => (chi_closed(a * z) - chi_closed(b * z)) / z,
        }
    }

    /// Value with the Taylor branch forced (for crossover tests).
    pub fn eval_series(&self, z: C64) -> C64 {
        match *self {
            ScalarFunction::Chi { scale } => chi_series(scale * z),
            ScalarFunction::Lambda { scale } => chi_series(scale * z) + scale * z,
            ScalarFunction::ChiDifference { .. } => self.difference_series(z),
        }
    }

    pub fn derivative(&self, z: C64) -> C64 {
        match *self {
            ScalarFunction::Chi { scale } => scale * chi_prime(scale * z),
            ScalarFunction::Lambda { scale } => scale * (chi_prime(scale * z) + 1.0),
            ScalarFunction::ChiDifference { a, b } => {
                if z.norm() * self.max_scale() < SERIES_RADIUS {
                    let (a2, b2, z2) = (a * a, b * b, z * z);
                    let cs = coeffs();
                    let mut acc = c(0.0);
                    for k in (1..cs.len()).rev() {
                        acc = acc * z2 + cs[k] * (2 * k - 1) as f64 * (a2.powu(k as u32) - b2.powu(k as u32));
                    }
                    acc
                } else {
                    let h = self.eval_unchecked(z);
                    (a * chi_prime(a * z) - b * chi_prime(b * z)) / z - h / z
                }
            }
        }
    }

    /// Power-series coefficients p_j with f(z) = sum_j p_j z^j.
    pub fn taylor(&self, n: usize) -> Vec<C64> {
        let cs = chi_coefficients(n / 2 + 2);
        let mut p = vec![c(0.0); n];
        match *self {
            ScalarFunction::Chi { scale } | ScalarFunction::Lambda { scale } => {
                for (k, ck) in cs.iter().enumerate() {
                    if 2 * k < n {
                        p[2 * k] = ck * scale.powu(2 * k as u32);
                    }
                }
                if let ScalarFunction::Lambda { .. } = self {
                    if n > 1 {
                        p[1] += scale;
                    }
                }
            }
            ScalarFunction::ChiDifference { a, b } => {
                for (k, ck) in cs.iter().enumerate().skip(1) {
                    if 2 * k - 1 < n {
                        p[2 * k - 1] = ck * (a.powu(2 * k as u32) - b.powu(2 * k as u32));
                    }
                }
            }
        }
        p
    }

    /// Divided difference f[x, y]; f'(x) on the diagonal.
    pub fn divided_difference(&self, x: C64, y: C64) -> C64 {
        let d = x - y;
        if d.norm() >= 0.1 {
            return (self.eval_unchecked(x) - self.eval_unchecked(y)) / d;
        }
        // integral of f' over the segment, 8-point Gauss-Legendre on [0, 1]
        const NODES: [(f64, f64); 4] = [
            (0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
            (0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
            (0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
            (0.960_289_856_497_536_3, 0.101_228_536_290_376_3),
        ];
        let mut acc = c(0.0);
        for (t, w) in NODES {
            for s in [t, -t] {
                let u = 0.5 * (1.0 + s);
                acc += self.derivative(y + d * u) * (0.5 * w);
            }
        }
        acc
    }
}

/// Principal logarithm of a group element expressed in `alg`.
pub fn mat_log_principal(alg: &Arc<LieAlgebra>, m: &GroupElement) -> Result<AlgebraElement> {
    let coeffs = log_coeffs(alg, &m.matrix)?;
    if alg.field == ScalarField::Real && !LieAlgebra::is_real_coeffs(&coeffs, 1e-10) {
        return Err(Error::NotInAlgebra {
            algebra: alg.name.clone(),
            residual: coeffs.iter().map(|z| z.im.abs()).fold(0.0, f64::max),
        });
    }
    AlgebraElement::new(alg.clone(), coeffs)
}

/// Coefficients of log M in the complexified basis of `alg`.
pub fn log_coeffs(alg: &LieAlgebra, m: &CMat) -> Result<CVec> {
    let l = linalg::logm(m)?;
    let back = linalg::expm(&l);
    let err = frob(&(back - m));
    if err > 1e-11 * frob(m).max(1.0) {
        return Err(Error::Numerical(format!("exp(log M) defect {err:e}")));
    }
    alg.coords(&l)
}

/// Precomputed eigendecomposition of m in the defining representation.
#[derive(Debug, Clone)]
pub struct AdCalculus {
    m: CMat,
    eig: Option<linalg::Eigen>,
}

impl AdCalculus {
    pub fn new(m: &CMat) -> Self {
        let e = linalg::eigen(m);
        let eig = if e.cond.is_finite() && e.cond < COND_LIMIT {
            Some(e)
        } else {
            None
        };
        AdCalculus { m: m.clone(), eig }
    }

    pub fn uses_series(&self) -> bool {
        self.eig.is_none()
    }

    /// Eigenvalues mu_p - mu_q of ad_m on gl(n).
    fn differences(&self) -> Option<CMat> {
        let e = self.eig.as_ref()?;
        let n = e.values.len();
        Some(CMat::from_fn(n, n, |p, q| e.values[p] - e.values[q]))
    }

    pub fn check_poles(&self, f: &ScalarFunction) -> Result<()> {
        match self.differences() {
            Some(d) => d.iter().try_for_each(|z| f.check_poles(*z)),
            None => linalg::eigenvalues(&self.m)
                .iter()
                .flat_map(|a| linalg::eigenvalues(&self.m).into_iter().map(move |b| a - b))
                .try_for_each(|z| f.check_poles(z)),
        }
    }

    /// Largest pole ratio of `f` over the spectrum of ad_m.
    pub fn pole_ratio(&self, f: &ScalarFunction) -> f64 {
        let mu = match &self.eig {
            Some(e) => e.values.clone(),
            None => linalg::eigenvalues(&self.m),
        };
        let mut worst: f64 = 0.0;
        for a in &mu {
            for b in &mu {
                worst = worst.max(f.pole_ratio(a - b));
            }
        }
        worst
    }

    /// f(ad_m) X on matrices.
    pub fn apply(&self, f: &ScalarFunction, x: &CMat) -> Result<CMat> {
        self.check_poles(f)?;
        match (&self.eig, self.differences()) {
            (Some(e), Some(d)) => {
                let xp = &e.inverse * x * &e.vectors;
                let fx = CMat::from_fn(xp.nrows(), xp.ncols(), |p, q| f.eval_unchecked(d[(p, q)]) * xp[(p, q)]);
                Ok(&e.vectors * fx * &e.inverse)
            }
            _ => self.apply_series(f, x),
        }
    }

    fn apply_series(&self, f: &ScalarFunction, x: &CMat) -> Result<CMat> {
        let p = f.taylor(80);
        let mut y = x.clone();
        let mut acc = &y * p[0];
        let scale = frob(x).max(1e-300);
        for (j, pj) in p.iter().enumerate().skip(1) {
            y = commutator(&self.m, &y);
            let term = &y * *pj;
            acc += &term;
            if j > 8 && frob(&term) < 1e-17 * scale && frob(&y) < 1e-17 * scale {
                return Ok(acc);
            }
        }
        let last = frob(&(&y * p[p.len() - 1]));
        if last > 1e-13 * scale {
            return Err(Error::Fallback(format!(
                "Taylor series of {} did not converge (last term {last:e})",
                f.name()
            )));
        }
        Ok(acc)
    }

    /// d/dt f(ad_{m + t delta}) X at t = 0.
    pub fn derivative(&self, f: &ScalarFunction, delta: &CMat, x: &CMat) -> Result<CMat> {
        self.check_poles(f)?;
        match &self.eig {
            Some(e) => {
                let n = e.values.len();
                let dp = &e.inverse * delta * &e.vectors;
                let xp = &e.inverse * x * &e.vectors;
                let mu = &e.values;
                let mut out = CMat::zeros(n, n);
                for p in 0..n {
                    for q in 0..n {
                        let zpq = mu[p] - mu[q];
                        let mut s = c(0.0);
                        for k in 0..n {
                            s += f.divided_difference(zpq, mu[k] - mu[q]) * dp[(p, k)] * xp[(k, q)];
                            s -= f.divided_difference(zpq, mu[p] - mu[k]) * xp[(p, k)] * dp[(k, q)];
                        }
                        out[(p, q)] = s;
                    }
                }
                Ok(&e.vectors * out * &e.inverse)
            }
            None => self.derivative_series(f, delta, x),
        }
    }

    fn derivative_series(&self, f: &ScalarFunction, delta: &CMat, x: &CMat) -> Result<CMat> {
        let p = f.taylor(80);
        let mut y = x.clone();
        let mut z = CMat::zeros(x.nrows(), x.ncols());
        let mut acc = CMat::zeros(x.nrows(), x.ncols());
        let scale = frob(x).max(1e-300) * frob(delta).max(1e-300);
        for (j, pj) in p.iter().enumerate().skip(1) {
            z = commutator(delta, &y) + commutator(&self.m, &z);
            y = commutator(&self.m, &y);
            let term = &z * *pj;
            acc += &term;
            if j > 8 && frob(&term) < 1e-17 * scale && frob(&z) < 1e-17 * scale {
                return Ok(acc);
            }
        }
        Ok(acc)
    }
}

/// f(ad_m) as a dim x dim operator matrix on coefficients.
pub fn analytic_of_ad(f: &ScalarFunction, m: &AlgebraElement) -> Result<CMat> {
    analytic_of_ad_coeffs(&m.algebra, f, &m.coeffs)
}

pub fn analytic_of_ad_coeffs(alg: &LieAlgebra, f: &ScalarFunction, m: &CVec) -> Result<CMat> {
    let calc = AdCalculus::new(&alg.to_matrix(m));
    operator_matrix(alg, |x| calc.apply(f, x))
}

/// Matrix of the Frechet derivative of m -> f(ad_m) in direction delta.
pub fn analytic_of_ad_derivative(alg: &LieAlgebra, f: &ScalarFunction, m: &CVec, delta: &CVec) -> Result<CMat> {
    let calc = AdCalculus::new(&alg.to_matrix(m));
    let dm = alg.to_matrix(delta);
    operator_matrix(alg, |x| calc.derivative(f, &dm, x))
}

/// Collects the dim x dim matrix of a linear map given on basis matrices.
pub fn operator_matrix(alg: &LieAlgebra, mut op: impl FnMut(&CMat) -> Result<CMat>) -> Result<CMat> {
    let d = alg.dim();
    let mut out = CMat::zeros(d, d);
    for b in 0..d {
        let img = op(alg.basis_matrix(b))?;
        out.set_column(b, &alg.coords(&img)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Derivative of log along e^{tX} M (left) or M e^{tX} (right), M = e^m.
pub fn dlog_directional(m: &AlgebraElement, x: &AlgebraElement, side: Side) -> Result<AlgebraElement> {
    let s = match side {
        Side::Left => -0.5,
        Side::Right => 0.5,
    };
    let f = ScalarFunction::Lambda { scale: c(s) };
    let calc = AdCalculus::new(&m.matrix());
    let out = calc.apply(&f, &x.matrix())?;
    AlgebraElement::from_matrix(m.algebra.clone(), &out)
}

/// Derivative of log along the curve e^{tA} e^m e^{tB} as a matrix.
pub fn dlog_curve(m: &CMat, a: &CMat, b: &CMat) -> Result<CMat> {
    let calc = AdCalculus::new(m);
    let left = calc.apply(&ScalarFunction::Lambda { scale: c(-0.5) }, a)?;
    let right = calc.apply(&ScalarFunction::Lambda { scale: c(0.5) }, b)?;
    Ok(left + right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{GroupKind, LieAlgebra};

    #[test]
    fn chi_coefficients_match_bernoulli() {
        let cs = chi_coefficients(4);
        assert_eq!(cs[0], 1.0);
        assert!((cs[1] - 1.0 / 3.0).abs() < 1e-16);
        assert!((cs[2] + 1.0 / 45.0).abs() < 1e-17);
        assert!((cs[3] - 2.0 / 945.0).abs() < 1e-17);
    }

    #[test]
    fn removable_singularities() {
        assert_eq!(ScalarFunction::chi().eval(c(0.0)).unwrap(), c(1.0));
        assert_eq!(ScalarFunction::lambda().eval(c(0.0)).unwrap(), c(1.0));
    }

    #[test]
    fn f_half_vanishes() {
        let f = ScalarFunction::f_nu(c(0.5));
        for z in [c(0.3), C64::new(1.2, -0.7), c(3.0)] {
            assert_eq!(f.eval(z).unwrap(), c(0.0));
        }
    }

    #[test]
    fn f_zero_at_one() {
        let v = ScalarFunction::f_nu(c(0.0)).eval(c(1.0)).unwrap();
        let oracle = 0.5 / (0.5f64).tanh() - 1.0;
        assert!((v.re - oracle).abs() < 1e-15);
        assert!((v.re - 0.081_976_706_869_326_5).abs() < 1e-15);
    }

    #[test]
    fn pole_is_reported() {
        let f = ScalarFunction::chi();
        let err = f.eval(C64::new(0.0, std::f64::consts::PI + 1e-6)).unwrap_err();
        assert!(matches!(err, Error::PoleProximity { .. }));
    }

    #[test]
    fn branches_agree_at_crossover() {
        for f in [
            ScalarFunction::chi(),
            ScalarFunction::lambda(),
            ScalarFunction::f_nu(c(0.35)),
            ScalarFunction::f_nu_compact(0.3),
        ] {
            for z in [c(1e-2), C64::new(0.0, 1e-2), C64::new(0.3, 0.2), c(0.45)] {
                let d = (f.eval_series(z) - f.eval_closed(z)).norm();
                assert!(d < 1e-12, "{f:?} at {z}: {d:e}");
            }
        }
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let f = ScalarFunction::f_nu(C64::new(0.35, 0.0));
        for z in [c(0.2), c(1.7), C64::new(0.4, 0.9)] {
            let h = 1e-6;
            let fd = (f.eval(z + h).unwrap() - f.eval(z - h).unwrap()) / (2.0 * h);
            assert!((fd - f.derivative(z)).norm() < 1e-8);
        }
    }

    #[test]
    fn ad_function_on_su2_spectrum() {
        let alg = Arc::new(LieAlgebra::su(2).unwrap());
        let m = AlgebraElement::from_real(alg.clone(), &[0.0, 0.0, 0.2]).unwrap();
        let f = ScalarFunction::f_nu(c(0.35));
        let op = analytic_of_ad(&f, &m).unwrap();
        // iH has ad-eigenvalues 0, +-0.4i on su(2)
        let mut got = linalg::eigenvalues(&op);
        let mut want = vec![
            f.eval(c(0.0)).unwrap(),
            f.eval(C64::new(0.0, 0.4)).unwrap(),
            f.eval(C64::new(0.0, -0.4)).unwrap(),
        ];
        let key = |z: &C64| (z.re * 1e6).round() as i64 * 1_000_000 + (z.im * 1e6).round() as i64;
        got.sort_by_key(key);
        want.sort_by_key(key);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).norm() < 1e-12);
        }
    }

    #[test]
    fn series_fallback_matches_eigen_route() {
        let alg = LieAlgebra::sl(2, ScalarField::Real).unwrap();
        let m = alg.to_matrix_real(&[0.2, 0.1, -0.15]);
        let x = alg.to_matrix_real(&[0.3, -0.2, 0.5]);
        let d = alg.to_matrix_real(&[-0.1, 0.25, 0.05]);
        let f = ScalarFunction::f_nu(c(0.35));
        let calc = AdCalculus::new(&m);
        assert!(!calc.uses_series());
        let a = calc.apply(&f, &x).unwrap();
        let b = calc.apply_series(&f, &x).unwrap();
        assert!(frob(&(a - b)) < 1e-14);
        let da = calc.derivative(&f, &d, &x).unwrap();
        let db = calc.derivative_series(&f, &d, &x).unwrap();
        assert!(frob(&(da - db)) < 1e-13);
    }

    #[test]
    fn nilpotent_m_uses_series() {
        let alg = LieAlgebra::sl(2, ScalarField::Real).unwrap();
        let m = alg.to_matrix_real(&[0.3, 0.0, 0.0]);
        let calc = AdCalculus::new(&m);
        assert!(calc.uses_series());
        let x = alg.to_matrix_real(&[0.0, 0.0, 1.0]);
        // chi(ad_E) F = F + (1/3)[E,[E,F]] = F - (2/3)(0.09) E
        let y = calc.apply(&ScalarFunction::chi(), &x).unwrap();
        let want = alg.to_matrix_real(&[-2.0 * 0.09 / 3.0, 0.0, 1.0]);
        assert!(frob(&(y - want)) < 1e-15);
    }

    #[test]
    fn log_round_trip_and_branch_cut() {
        let alg = Arc::new(LieAlgebra::sl(2, ScalarField::Real).unwrap());
        let id = GroupElement::identity(GroupKind::Sl, 2);
        assert_eq!(mat_log_principal(&alg, &id).unwrap().norm(), 0.0);
        let minus = GroupElement {
            group: GroupKind::Sl,
            matrix: linalg::identity(2) * c(-1.0),
        };
        assert!(matches!(mat_log_principal(&alg, &minus), Err(Error::BranchCut(_))));
    }

    #[test]
    fn dlog_at_zero_is_identity() {
        let alg = Arc::new(LieAlgebra::sl(3, ScalarField::Real).unwrap());
        let m = AlgebraElement::zero(alg.clone());
        let x = AlgebraElement::from_real(alg, &[0.1, -0.2, 0.3, 0.4, 0.0, 0.5, -0.6, 0.7]).unwrap();
        for side in [Side::Left, Side::Right] {
            let y = dlog_directional(&m, &x, side).unwrap();
            assert!((y.coeffs - &x.coeffs).norm() < 1e-15);
        }
    }
}
