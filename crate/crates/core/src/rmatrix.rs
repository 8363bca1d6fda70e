//! Two- and three-tensors over a Lie algebra, constant and dynamical
//! r-matrices, and residuals of the Yang-Baxter type equations.
//!
//! A two-tensor r = r^{ab} T_a (x) T_b is identified with the operator
//! Z -> r^{ab} T_a <T_b, Z>, whose matrix on coefficients is r g.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::liealg::{adjoint_matrix, positive_roots, AlgebraKind, GroupElement, LieAlgebra};
use crate::linalg::{self, c, CMat, CVec, C64, I};
use crate::matfun::{self, AdCalculus, ScalarFunction};

#[derive(Debug, Clone)]
pub struct TwoTensor {
    pub algebra: Arc<LieAlgebra>,
    pub coeffs: CMat,
}

impl TwoTensor {
    pub fn zeros(algebra: Arc<LieAlgebra>) -> Self {
        let d = algebra.dim();
        TwoTensor {
            algebra,
            coeffs: CMat::zeros(d, d),
        }
    }

    pub fn new(algebra: Arc<LieAlgebra>, coeffs: CMat) -> Result<Self> {
        let d = algebra.dim();
        if coeffs.nrows() != d || coeffs.ncols() != d {
            return Err(Error::ParentMismatch(format!(
                "{}x{} coefficients for {} (dim {d})",
                coeffs.nrows(),
                coeffs.ncols(),
                algebra.name
            )));
        }
        Ok(TwoTensor { algebra, coeffs })
    }

    /// The Casimir T_a (x) T^a, coefficients g^-1.
    pub fn casimir(algebra: Arc<LieAlgebra>) -> Result<Self> {
        let gi = linalg::complexify(algebra.form_inverse()?);
        Ok(TwoTensor { algebra, coeffs: gi })
    }

    /// Tensor of an operator given by its matrix on coefficients.
    pub fn from_operator(algebra: Arc<LieAlgebra>, op: &CMat) -> Result<Self> {
        let gi = linalg::complexify(algebra.form_inverse()?);
        Ok(TwoTensor {
            algebra,
            coeffs: op * gi,
        })
    }

    pub fn to_operator(&self) -> Result<CMat> {
        Ok(&self.coeffs * linalg::complexify(self.algebra.form()?))
    }

    pub fn antisymmetry_residual(&self) -> f64 {
        linalg::frob(&(&self.coeffs + self.coeffs.transpose()))
    }

    pub fn norm(&self) -> f64 {
        linalg::frob(&self.coeffs)
    }

    pub fn scaled(&self, s: C64) -> Self {
        TwoTensor {
            algebra: self.algebra.clone(),
            coeffs: &self.coeffs * s,
        }
    }

    pub fn plus(&self, other: &TwoTensor) -> Self {
        TwoTensor {
            algebra: self.algebra.clone(),
            coeffs: &self.coeffs + &other.coeffs,
        }
    }

    /// r + s/2 Casimir, i.e. r^+ for s = 1 and r^- for s = -1.
    pub fn shifted(&self, s: f64) -> Result<Self> {
        let gi = linalg::complexify(self.algebra.form_inverse()?);
        Ok(TwoTensor {
            algebra: self.algebra.clone(),
            coeffs: &self.coeffs + gi * c(0.5 * s),
        })
    }

    /// (A (x) A) r for a coefficient-space map A.
    pub fn conjugated(&self, a: &CMat) -> Self {
        TwoTensor {
            algebra: self.algebra.clone(),
            coeffs: a * &self.coeffs * a.transpose(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ThreeTensor {
    pub algebra: Arc<LieAlgebra>,
    data: Vec<C64>,
}

impl ThreeTensor {
    pub fn zeros(algebra: Arc<LieAlgebra>) -> Self {
        let d = algebra.dim();
        ThreeTensor {
            algebra,
            data: vec![c(0.0); d * d * d],
        }
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    #[inline]
    fn idx(&self, a: usize, b: usize, cc: usize) -> usize {
        let d = self.dim();
        (a * d + b) * d + cc
    }

    pub fn get(&self, a: usize, b: usize, cc: usize) -> C64 {
        self.data[self.idx(a, b, cc)]
    }

    pub fn set(&mut self, a: usize, b: usize, cc: usize, v: C64) {
        let i = self.idx(a, b, cc);
        self.data[i] = v;
    }

    pub fn add_at(&mut self, a: usize, b: usize, cc: usize, v: C64) {
        let i = self.idx(a, b, cc);
        self.data[i] += v;
    }

    pub fn values(&self) -> &[C64] {
        &self.data
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_imag(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.im.abs()))
    }

    pub fn scaled(&self, s: C64) -> Self {
        ThreeTensor {
            algebra: self.algebra.clone(),
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn plus(&self, other: &ThreeTensor) -> Self {
        ThreeTensor {
            algebra: self.algebra.clone(),
            data: self.data.iter().zip(&other.data).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn minus(&self, other: &ThreeTensor) -> Self {
        self.plus(&other.scaled(c(-1.0)))
    }

    /// Moves slot 1 to slot 2, slot 2 to slot 3 and slot 3 to slot 1:
    /// Y^{abc} T_a T_b T_c -> Y^{abc} T_c T_a T_b.
    pub fn cyclic_permutation(&self) -> Self {
        let d = self.dim();
        let mut out = ThreeTensor::zeros(self.algebra.clone());
        for a in 0..d {
            for b in 0..d {
                for cc in 0..d {
                    out.set(cc, a, b, self.get(a, b, cc));
                }
            }
        }
        out
    }

    /// Y + P Y + P^2 Y.
    pub fn cyclic_sum(&self) -> Self {
        let p = self.cyclic_permutation();
        let pp = p.cyclic_permutation();
        self.plus(&p).plus(&pp)
    }

    /// Applies a coefficient-space map to every slot.
    pub fn transformed(&self, a: &CMat) -> Self {
        let d = self.dim();
        let mut step = self.clone();
        for slot in 0..3 {
            let mut out = ThreeTensor::zeros(self.algebra.clone());
            for x in 0..d {
                for y in 0..d {
                    for z in 0..d {
                        let v = step.get(x, y, z);
                        if v == c(0.0) {
                            continue;
                        }
                        for k in 0..d {
                            let w = a[(k, [x, y, z][slot])];
                            if w == c(0.0) {
                                continue;
                            }
                            match slot {
                                0 => out.add_at(k, y, z, w * v),
                                1 => out.add_at(x, k, z, w * v),
                                _ => out.add_at(x, y, k, w * v),
                            }
                        }
                    }
                }
            }
            step = out;
        }
        step
    }

    /// Max over basis X of |(ad_X (x) 1 (x) 1 + 1 (x) ad_X (x) 1 + 1 (x) 1 (x) ad_X) Y|.
    pub fn invariance_residual(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for x in 0..d {
            let mut e = CVec::zeros(d);
            e[x] = c(1.0);
            let ad = self.algebra.ad(&e);
            let mut total = 0.0;
            for a in 0..d {
                for b in 0..d {
                    for cc in 0..d {
                        let mut s = c(0.0);
                        for k in 0..d {
                            s += ad[(a, k)] * self.get(k, b, cc)
                                + ad[(b, k)] * self.get(a, k, cc)
                                + ad[(cc, k)] * self.get(a, b, k);
                        }
                        total += s.norm_sqr();
                    }
                }
            }
            worst = worst.max(total.sqrt());
        }
        worst
    }
}

/// f_hat = f_ab^c T^a (x) T^b (x) T_c.
pub fn f_hat(algebra: &Arc<LieAlgebra>) -> Result<ThreeTensor> {
    let gi = algebra.form_inverse()?;
    let d = algebra.dim();
    let mut out = ThreeTensor::zeros(algebra.clone());
    for a in 0..d {
        for b in 0..d {
            for z in 0..d {
                let f = algebra.structure_constant(a, b, z);
                if f == 0.0 {
                    continue;
                }
                for x in 0..d {
                    for y in 0..d {
                        let w = f * gi[(a, x)] * gi[(b, y)];
                        if w != 0.0 {
                            out.add_at(x, y, z, c(w));
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// [r_12, s_23] = r^{ab} s^{cd} T_a (x) [T_b, T_c] (x) T_d.
pub fn bracket_12_23(r: &TwoTensor, s: &TwoTensor) -> ThreeTensor {
    let alg = &r.algebra;
    let d = alg.dim();
    let mut out = ThreeTensor::zeros(alg.clone());
    for b in 0..d {
        for cc in 0..d {
            for e in 0..d {
                let f = alg.structure_constant(b, cc, e);
                if f == 0.0 {
                    continue;
                }
                for a in 0..d {
                    let rab = r.coeffs[(a, b)];
                    if rab == c(0.0) {
                        continue;
                    }
                    for dd in 0..d {
                        out.add_at(a, e, dd, rab * s.coeffs[(cc, dd)] * f);
                    }
                }
            }
        }
    }
    out
}

/// Cyclic sum of [r_12, r_23], i.e. [r12,r13] + [r12,r23] + [r13,r23].
pub fn cybe(r: &TwoTensor) -> ThreeTensor {
    bracket_12_23(r, r).cyclic_sum()
}

/// sum_a T^a (x) X_a for two-tensors X_a.
pub fn first_slot_dual(algebra: &Arc<LieAlgebra>, parts: &[CMat]) -> Result<ThreeTensor> {
    let gi = algebra.form_inverse()?;
    let d = algebra.dim();
    let mut out = ThreeTensor::zeros(algebra.clone());
    for (a, part) in parts.iter().enumerate() {
        for e in 0..d {
            let w = gi[(a, e)];
            if w == 0.0 {
                continue;
            }
            for b in 0..d {
                for cc in 0..d {
                    out.add_at(e, b, cc, part[(b, cc)] * w);
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstantKind {
    StandardSplit,
    CompactRi,
}

/// The standard r-matrix R = sum_a (|a|^2/4)(E_a (x) E_-a - E_-a (x) E_a) on a
/// split algebra, or R^i = sum_a (|a|^2/4)(E_a - E_-a) ^ i(E_a + E_-a) on the
/// compact form, times `scale`.
pub fn constant_r(algebra: &Arc<LieAlgebra>, kind: ConstantKind, scale: C64) -> Result<TwoTensor> {
    let n = algebra.n;
    let roots = positive_roots(n);
    let nr = roots.len();
    let d = algebra.dim();
    let mut coeffs = CMat::zeros(d, d);
    match (kind, algebra.kind) {
        (ConstantKind::StandardSplit, AlgebraKind::SlSplit) => {
            for (k, r) in roots.iter().enumerate() {
                let w = r.length_sq() / 4.0;
                let (e, f) = (k, nr + (n - 1) + k);
                coeffs[(e, f)] += c(w);
                coeffs[(f, e)] -= c(w);
            }
        }
        (ConstantKind::CompactRi, AlgebraKind::SuCompact) => {
            for (k, r) in roots.iter().enumerate() {
                let w = r.length_sq() / 4.0;
                // basis: i(E+F) at k, (E-F) at nr + k
                let (x1, x2) = (k, nr + k);
                coeffs[(x2, x1)] += c(w);
                coeffs[(x1, x2)] -= c(w);
            }
        }
        (k, a) => {
            return Err(Error::Unsupported(format!("{k:?} r-matrix on a {a:?} algebra")));
        }
    }
    Ok(TwoTensor {
        algebra: algebra.clone(),
        coeffs: coeffs * scale,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DynamicalKind {
    /// K^nu(M) = f_nu(ad_m), m = log M.
    KNuOfM,
    /// K(Omega) = -f_{1/(4 nu)}(ad_omega), omega = log Omega.
    KCanOfOmega,
    /// K(Omega) = (1/theta) f_{i theta}(ad_omega / theta), Omega = e^{2 i omega}.
    KCompactOfOmega,
    /// r(M) = R^nu + f_nu(ad_m).
    ExchangeR,
}

/// A dynamical r-matrix prefactor * f(ad_x) + constant, where x is the
/// logarithmic variable log_scale * log X of the group argument X.
#[derive(Debug, Clone)]
pub struct DynamicalRMatrix {
    pub kind: DynamicalKind,
    pub algebra: Arc<LieAlgebra>,
    pub function: ScalarFunction,
    pub prefactor: C64,
    pub log_scale: C64,
    pub constant: Option<TwoTensor>,
}

impl DynamicalRMatrix {
    pub fn k_nu(algebra: Arc<LieAlgebra>, nu: C64) -> Self {
        DynamicalRMatrix {
            kind: DynamicalKind::KNuOfM,
            algebra,
            function: ScalarFunction::f_nu(nu),
            prefactor: c(1.0),
            log_scale: c(1.0),
            constant: None,
        }
    }

    pub fn k_can(algebra: Arc<LieAlgebra>, nu: C64) -> Self {
        DynamicalRMatrix {
            kind: DynamicalKind::KCanOfOmega,
            algebra,
            function: ScalarFunction::f_nu(0.25 / nu),
            prefactor: c(-1.0),
            log_scale: c(1.0),
            constant: None,
        }
    }

    pub fn k_compact(algebra: Arc<LieAlgebra>, theta: f64) -> Self {
        DynamicalRMatrix {
            kind: DynamicalKind::KCompactOfOmega,
            algebra,
            function: ScalarFunction::f_nu_compact(theta),
            prefactor: c(1.0),
            log_scale: c(1.0) / (I * 2.0),
            constant: None,
        }
    }

    /// r(M) = R^nu + K^nu(M) with R^nu = 2 nu R.
    pub fn exchange_r(algebra: Arc<LieAlgebra>, r_nu: TwoTensor, nu: C64) -> Self {
        DynamicalRMatrix {
            kind: DynamicalKind::ExchangeR,
            algebra,
            function: ScalarFunction::f_nu(nu),
            prefactor: c(1.0),
            log_scale: c(1.0),
            constant: Some(r_nu),
        }
    }

    pub fn with_prefactor(mut self, s: C64) -> Self {
        self.prefactor *= s;
        self
    }

    pub fn with_function(mut self, f: ScalarFunction) -> Self {
        self.function = f;
        self
    }

    /// Log variable x of a group argument.
    pub fn log_variable(&self, x: &CMat) -> Result<CVec> {
        let l = matfun::log_coeffs(&self.algebra, x)?;
        Ok(l * self.log_scale)
    }

    /// The dynamical part as a function of the log variable.
    pub fn dynamical_at(&self, x: &CVec) -> Result<TwoTensor> {
        let op = matfun::analytic_of_ad_coeffs(&self.algebra, &self.function, x)?;
        Ok(TwoTensor::from_operator(self.algebra.clone(), &op)?.scaled(self.prefactor))
    }

    /// Full value (constant part included) at the log variable.
    pub fn at_log(&self, x: &CVec) -> Result<TwoTensor> {
        let k = self.dynamical_at(x)?;
        Ok(match &self.constant {
            Some(r) => k.plus(r),
            None => k,
        })
    }

    /// Full value at a group argument.
    pub fn eval(&self, x: &GroupElement) -> Result<TwoTensor> {
        self.at_log(&self.log_variable(&x.matrix)?)
    }

    /// Derivative of the dynamical part along e^{tA} X e^{tB}, exact route.
    pub fn curve_derivative(&self, x: &CMat, a: &CMat, b: &CMat) -> Result<CMat> {
        let l = linalg::logm(x)?;
        let dl = matfun::dlog_curve(&l, a, b)?;
        let xv = self.algebra.coords(&l)? * self.log_scale;
        let dv = self.algebra.coords(&dl)? * self.log_scale;
        let op = matfun::analytic_of_ad_derivative(&self.algebra, &self.function, &xv, &dv)?;
        let gi = linalg::complexify(self.algebra.form_inverse()?);
        Ok(op * gi * self.prefactor)
    }

    /// Same derivative by central differences along the group curve.
    pub fn curve_derivative_fd(&self, x: &CMat, a: &CMat, b: &CMat, h: f64) -> Result<CMat> {
        let at = |t: f64| -> Result<CMat> {
            let y = linalg::expm(&(a * c(t))) * x * linalg::expm(&(b * c(t)));
            Ok(self.dynamical_at(&self.log_variable(&y)?)?.coeffs)
        };
        let d1 = at(h)? - at(-h)?;
        let d2 = at(2.0 * h)? - at(-2.0 * h)?;
        Ok((d1 * c(8.0) - d2) / c(12.0 * h))
    }
}

/// The equations whose residuals are computed by [`cdybe_residual`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CdybeForm {
    /// [r12, r23] + T^a (D^+_a / 2 + r_a^b D^-_b) r23 + cycl.
    GCdybe,
    /// [K12, K23] - T^a D^+_a K23 / 2 + cycl.
    PlCdybeWz,
    /// [R + K, R + K] + T^a (D^+_{T_a} / 2 - D^-_{R T_a}) K + cycl.
    PlCdybeCan,
    /// [R^i + K, R^i + K] + T^a (D^+_{i T_a} - D^-_{R^i T_a}) K + cycl.
    PlCdybeCompact,
}

/// Which way the mixed index of r_a^b is read in the G-CDYBE.
pub const GCDYBE_ORIENTATION: f64 = 1.0;

#[derive(Debug, Clone)]
pub struct CdybeOutcome {
    pub residual: ThreeTensor,
    /// Largest entrywise gap between the exact and finite-difference derivatives.
    pub route_gap: f64,
}

pub const ROUTE_AGREEMENT: f64 = 1e-7;
pub const ROUTE_FAULT: f64 = 1e-6;

/// LHS - rhs of the chosen equation at the group argument X.
///
/// `constant` is the constant r-matrix of the form (R^nu, R or R^i; ignored
/// by the WZNW form). The exact derivative route is authoritative; the finite
/// difference route is evaluated with step `h` and a gap above 1e-6 is an
/// error.
pub fn cdybe_residual(
    form: CdybeForm,
    constant: &TwoTensor,
    k: &DynamicalRMatrix,
    x: &CMat,
    rhs: &ThreeTensor,
    h: f64,
) -> Result<CdybeOutcome> {
    let alg = &k.algebra;
    let d = alg.dim();
    let kval = k.dynamical_at(&k.log_variable(x)?)?;
    let g = linalg::complexify(alg.form()?);
    let full = match form {
        CdybeForm::PlCdybeWz => kval.clone(),
        _ => kval.plus(constant),
    };
    let rop = constant.to_operator()?;
    let full_lower = &g * &full.coeffs;
    let mut exact = Vec::with_capacity(d);
    let mut gap: f64 = 0.0;
    for a in 0..d {
        let ta = alg.basis_matrix(a).clone();
        let col = |m: &CMat, j: usize| -> CVec { m.column(j).into_owned() };
        let (left, right, weight) = match form {
            CdybeForm::GCdybe => {
                let row: CVec = full_lower.row(a).transpose() * c(GCDYBE_ORIENTATION);
                let rt = alg.to_matrix(&row);
                (&ta * c(0.5) - &rt, &ta * c(0.5) + &rt, c(1.0))
            }
            CdybeForm::PlCdybeWz => (ta.clone(), ta.clone(), c(-0.5)),
            CdybeForm::PlCdybeCan => {
                let rt = alg.to_matrix(&col(&rop, a));
                (&ta * c(0.5) + &rt, &ta * c(0.5) - &rt, c(1.0))
            }
            CdybeForm::PlCdybeCompact => {
                let rt = alg.to_matrix(&col(&rop, a));
                (&ta * I + &rt, &ta * I - &rt, c(1.0))
            }
        };
        let de = k.curve_derivative(x, &left, &right)?;
        let dfd = k.curve_derivative_fd(x, &left, &right, h)?;
        gap = gap.max((&de - &dfd).iter().fold(0.0, |m, z| m.max(z.norm())));
        exact.push(de * weight);
    }
    if gap > ROUTE_FAULT {
        return Err(Error::RouteDisagreement(gap));
    }
    let lhs = bracket_12_23(&full, &full)
        .plus(&first_slot_dual(alg, &exact)?)
        .cyclic_sum();
    Ok(CdybeOutcome {
        residual: lhs.minus(rhs),
        route_gap: gap,
    })
}

/// (1/4 - nu^2) f^, the right-hand side of the PL-CDYBE for K^nu.
pub fn pl_cdybe_rhs(algebra: &Arc<LieAlgebra>, nu: C64) -> Result<ThreeTensor> {
    Ok(f_hat(algebra)?.scaled(c(0.25) - nu * nu))
}

/// -mu^2 f^ for K = -f_mu(ad_omega) in the canonical form, mu = 1/(4 nu).
pub fn canonical_invariant(algebra: &Arc<LieAlgebra>, nu: C64) -> Result<ThreeTensor> {
    let mu = c(0.25) / nu;
    Ok(f_hat(algebra)?.scaled(-(mu * mu)))
}

/// The stated invariant element (1/(16 theta^2) - 3/4) f^ of the compact form.
pub fn compact_invariant_stated(algebra: &Arc<LieAlgebra>, theta: f64) -> Result<ThreeTensor> {
    Ok(f_hat(algebra)?.scaled(c(1.0 / (16.0 * theta * theta) - 0.75)))
}

/// -f^ / (4 theta^2): the value the compact form actually takes for K from
/// f_{i theta} with R^i normalized by [R^i, R^i] + cycl = f^.
pub fn compact_invariant_derived(algebra: &Arc<LieAlgebra>, theta: f64) -> Result<ThreeTensor> {
    Ok(f_hat(algebra)?.scaled(c(-0.25 / (theta * theta))))
}

/// Gauss factorization Omega = Omega^+ (Omega^-)^-1 for the standard split R,
/// with Omega^+ upper and Omega^- lower triangular and reciprocal diagonals.
pub fn factorize_g_star(omega: &CMat) -> Result<(CMat, CMat)> {
    let (u, dvec, l) = linalg::udl(omega)?;
    let n = omega.nrows();
    let sq = CVec::from_iterator(n, dvec.iter().map(|z| z.sqrt()));
    let plus = u * CMat::from_diagonal(&sq);
    let inv_sq = CVec::from_iterator(n, sq.iter().map(|z| z.inv()));
    let minus = linalg::inverse(&l)? * CMat::from_diagonal(&inv_sq);
    Ok((plus, minus))
}

/// Left-trivialized derivatives (Omega^+)^-1 dOmega^+ and (Omega^-)^-1 dOmega^-
/// induced by a variation dOmega.
pub fn factorization_derivative(plus: &CMat, minus: &CMat, d_omega: &CMat) -> Result<(CMat, CMat)> {
    let cm = linalg::inverse(plus)? * d_omega * minus;
    let half_diag = linalg::diagonal_part(&cm) * c(0.5);
    let xp = linalg::strict_upper(&cm) + &half_diag;
    let xm = -(linalg::strict_lower(&cm) + half_diag);
    Ok((xp, xm))
}

/// Ad(q) on coefficients, re-exported for equivariance checks.
pub fn ad_action(algebra: &LieAlgebra, q: &CMat) -> Result<CMat> {
    adjoint_matrix(algebra, q)
}

/// Convenience: f(ad) evaluation context for a log variable.
pub fn calculus(algebra: &LieAlgebra, x: &CVec) -> AdCalculus {
    AdCalculus::new(&algebra.to_matrix(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::ScalarField;

    fn sl(n: usize) -> Arc<LieAlgebra> {
        Arc::new(LieAlgebra::sl(n, ScalarField::Real).unwrap())
    }

    #[test]
    fn standard_r_on_sl2() {
        let alg = sl(2);
        let r = constant_r(&alg, ConstantKind::StandardSplit, c(1.0)).unwrap();
        let mut want = CMat::zeros(3, 3);
        want[(0, 2)] = c(0.5);
        want[(2, 0)] = c(-0.5);
        assert_eq!(r.coeffs, want);
        // as an operator: (pi_+ - pi_-)/2
        let op = r.to_operator().unwrap();
        assert_eq!(op[(0, 0)], c(0.5));
        assert_eq!(op[(2, 2)], c(-0.5));
        assert_eq!(op[(1, 1)], c(0.0));
    }

    #[test]
    fn cyclic_permutation_by_hand() {
        let alg = sl(2);
        let mut y = ThreeTensor::zeros(alg);
        y.set(0, 1, 2, c(1.0));
        let p = y.cyclic_permutation();
        assert_eq!(p.get(2, 0, 1), c(1.0));
        assert_eq!(p.norm(), 1.0);
        let pp = p.cyclic_permutation();
        assert_eq!(pp.get(1, 2, 0), c(1.0));
        assert_eq!(pp.cyclic_permutation().get(0, 1, 2), c(1.0));
    }

    #[test]
    fn f_hat_is_invariant_and_antisymmetric() {
        for alg in [sl(2), sl(3), Arc::new(LieAlgebra::su(2).unwrap())] {
            let f = f_hat(&alg).unwrap();
            assert!(f.invariance_residual() < 1e-13);
            let p = f.cyclic_permutation();
            assert!(f.minus(&p).norm() < 1e-13);
        }
    }

    #[test]
    fn f_hat_sl2_components() {
        let alg = sl(2);
        let f = f_hat(&alg).unwrap();
        // T^E = F, T^F = E, T^H = H/2; [E,F] = H gives f_hat^{FEH} = 1
        assert_eq!(f.get(2, 0, 1), c(1.0));
        assert_eq!(f.get(0, 2, 1), c(-1.0));
        // [H,E] = 2E: T^H (x) T^E (x) E = (H/2) (x) F (x) E with weight 2
        assert_eq!(f.get(1, 2, 0), c(1.0));
    }

    #[test]
    fn modified_cybe_for_standard_r() {
        for n in [2, 3] {
            let alg = sl(n);
            let f = f_hat(&alg).unwrap();
            for nu in [0.25, 0.5, 1.0] {
                let r = constant_r(&alg, ConstantKind::StandardSplit, c(2.0 * nu)).unwrap();
                let res = cybe(&r).plus(&f.scaled(c(nu * nu)));
                assert!(res.norm() < 1e-12, "n={n} nu={nu}: {}", res.norm());
            }
        }
    }

    #[test]
    fn compact_ri_normalization() {
        for n in [2, 3] {
            let alg = Arc::new(LieAlgebra::su(n).unwrap());
            let f = f_hat(&alg).unwrap();
            let theta = 0.3;
            let r = constant_r(&alg, ConstantKind::CompactRi, c(theta)).unwrap();
            // nu = i theta: -nu^2 = theta^2
            let res = cybe(&r).minus(&f.scaled(c(theta * theta)));
            assert!(res.norm() < 1e-12);
            assert!(r.antisymmetry_residual() == 0.0);
        }
    }

    #[test]
    fn dynamical_k_vanishes_at_identity() {
        let alg = sl(2);
        let id = GroupElement::identity(crate::liealg::GroupKind::Sl, 2);
        for k in [
            DynamicalRMatrix::k_nu(alg.clone(), c(0.35)),
            DynamicalRMatrix::k_can(alg.clone(), c(0.35)),
        ] {
            assert_eq!(k.eval(&id).unwrap().norm(), 0.0);
        }
    }

    #[test]
    fn factorization_examples() {
        let (p, m) = factorize_g_star(&linalg::identity(3)).unwrap();
        assert_eq!(p, linalg::identity(3));
        assert_eq!(m, linalg::identity(3));
        let d = 2.5f64;
        let om = CMat::from_diagonal(&CVec::from_vec(vec![c(d), c(1.0 / d)]));
        let (p, m) = factorize_g_star(&om).unwrap();
        assert!((p[(0, 0)] - c(d.sqrt())).norm() < 1e-15);
        assert!((p[(1, 1)] - c(1.0 / d.sqrt())).norm() < 1e-15);
        assert!((m[(0, 0)] - c(1.0 / d.sqrt())).norm() < 1e-15);
        assert!((m[(1, 1)] - c(d.sqrt())).norm() < 1e-15);
    }
    fn point(alg: &LieAlgebra, seed: u64) -> CMat {
        let mut s = seed;
        let v: Vec<f64> = (0..alg.dim())
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((s >> 11) as f64 / (1u64 << 53) as f64 - 0.5) * 0.6
            })
            .collect();
        alg.to_matrix_real(&v)
    }

    #[test]
    fn pl_cdybe_and_g_cdybe_on_sl3() {
        let alg = sl(3);
        let nu = c(0.35);
        let x = linalg::expm(&point(&alg, 4));
        let r_nu = constant_r(&alg, ConstantKind::StandardSplit, nu * 2.0).unwrap();
        let k = DynamicalRMatrix::k_nu(alg.clone(), nu);
        let wz = cdybe_residual(
            CdybeForm::PlCdybeWz,
            &r_nu,
            &k,
            &x,
            &pl_cdybe_rhs(&alg, nu).unwrap(),
            1e-4,
        )
        .unwrap();
        assert!(wz.residual.norm() < 1e-10, "{}", wz.residual.norm());
        assert!(wz.route_gap < ROUTE_AGREEMENT);
        let rhs = f_hat(&alg).unwrap().scaled(c(-0.25));
        let g = cdybe_residual(CdybeForm::GCdybe, &r_nu, &k, &x, &rhs, 1e-4).unwrap();
        assert!(g.residual.norm() < 1e-10, "{}", g.residual.norm());
    }

    #[test]
    fn canonical_form() {
        let alg = sl(3);
        let nu = c(0.35);
        let x = linalg::expm(&point(&alg, 8));
        let r = constant_r(&alg, ConstantKind::StandardSplit, c(1.0)).unwrap();
        let k = DynamicalRMatrix::k_can(alg.clone(), nu);
        let out = cdybe_residual(
            CdybeForm::PlCdybeCan,
            &r,
            &k,
            &x,
            &canonical_invariant(&alg, nu).unwrap(),
            1e-4,
        )
        .unwrap();
        assert!(out.residual.norm() < 1e-10, "{}", out.residual.norm());
    }

    #[test]
    fn compact_form_takes_derived_invariant() {
        let alg = Arc::new(LieAlgebra::su(2).unwrap());
        let ri = constant_r(&alg, ConstantKind::CompactRi, c(1.0)).unwrap();
        for theta in [0.3, 0.7] {
            let k = DynamicalRMatrix::k_compact(alg.clone(), theta);
            let omega = linalg::expm(&(point(&alg, 2) * (I * 0.5)));
            let derived = compact_invariant_derived(&alg, theta).unwrap();
            let out = cdybe_residual(CdybeForm::PlCdybeCompact, &ri, &k, &omega, &derived, 1e-4).unwrap();
            assert!(out.residual.norm() < 1e-10, "{}", out.residual.norm());
            let stated = compact_invariant_stated(&alg, theta).unwrap();
            assert!(stated.minus(&derived).norm() > 1e-1);
        }
    }

    #[test]
    fn k_vanishes_at_half() {
        let alg = sl(2);
        let k = DynamicalRMatrix::k_nu(alg.clone(), c(0.5));
        let x = linalg::expm(&point(&alg, 1));
        assert!(
            k.eval(&GroupElement::new(crate::liealg::GroupKind::Sl, x).unwrap())
                .unwrap()
                .norm()
                < 1e-14
        );
    }
}
