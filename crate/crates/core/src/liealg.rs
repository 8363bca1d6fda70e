//! Lie algebras in a defining representation.
//!
//! Each algebra is specified by a list of n x n basis matrices; structure
//! constants and the invariant form are computed from those matrices once and
//! frozen. Basis orders are fixed:
//!
//! * `sl(n)` split: positive roots E_ij (i < j) by height, then the Cartan
//!   elements H_k = e_kk - e_(k+1)(k+1), then negative roots in the same order.
//! * `su(n)` compact: all i(E_a + E_-a), then all (E_a - E_-a), then all i H_k.
//! * Borel: all E_a, then all i E_a, then all H_k.
//! * realified double: the compact basis followed by the Borel basis.
//!
//! The invariant form of `sl(n)`/`su(n)` is the trace form of the defining
//! representation, for which every root is long with length sqrt 2 and
//! <E_a, E_-a> = 1. The realified double carries (1/theta) Im tr(XY).

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, frob, CMat, CVec, RMat, C64, I};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalarField {
    Real,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgebraKind {
    SlSplit,
    SuCompact,
    Borel,
    RealifiedDouble,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pairing {
    Killing,
    ImaginaryTheta,
}

/// A positive root e_i - e_j (i < j) of sl(n), stored 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Root {
    pub i: usize,
    pub j: usize,
}

impl Root {
    pub fn height(&self) -> usize {
        self.j - self.i
    }

    /// |alpha|^2 in the trace-form normalization.
    pub fn length_sq(&self) -> f64 {
        2.0
    }
}

pub fn positive_roots(n: usize) -> Vec<Root> {
    let mut roots = Vec::new();
    for h in 1..n {
        for i in 0..(n - h) {
            roots.push(Root { i, j: i + h });
        }
    }
    roots
}

fn unit(n: usize, i: usize, j: usize) -> CMat {
    let mut m = CMat::zeros(n, n);
    m[(i, j)] = c(1.0);
    m
}

fn cartan(n: usize, k: usize) -> CMat {
    let mut m = CMat::zeros(n, n);
    m[(k, k)] = c(1.0);
    m[(k + 1, k + 1)] = c(-1.0);
    m
}

fn root_label(n: usize, r: &Root, prefix: &str) -> String {
    if n == 2 {
        prefix.to_string()
    } else {
        format!("{prefix}{}{}", r.i + 1, r.j + 1)
    }
}

fn cartan_label(n: usize, k: usize) -> String {
    if n == 2 {
        "H".to_string()
    } else {
        format!("H{}", k + 1)
    }
}

/// Finite-dimensional Lie algebra over R or C with a basis of matrices.
#[derive(Debug, Clone)]
pub struct LieAlgebra {
    pub name: String,
    pub kind: AlgebraKind,
    pub field: ScalarField,
    pub n: usize,
    pub basis_labels: Vec<String>,
    basis: Vec<CMat>,
    /// f[a][b][c] with [T_a, T_b] = f[a][b][c] T_c, flattened as a*d*d + b*d + c.
    structure: Vec<f64>,
    form: Option<RMat>,
    form_inv: Option<RMat>,
    /// Real least-squares map from (Re, Im) of the entries to real coefficients.
    real_solver: RMat,
    /// Complex least-squares map from entries to complex coefficients, when the
    /// basis is C-linearly independent.
    complex_solver: Option<CMat>,
}

impl PartialEq for LieAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.basis == other.basis
    }
}

fn vectorize_real(m: &CMat) -> Vec<f64> {
    let mut v = Vec::with_capacity(2 * m.len());
    v.extend(m.iter().map(|z| z.re));
    v.extend(m.iter().map(|z| z.im));
    v
}

fn pseudo_inverse_real(cols: &RMat) -> Result<RMat> {
    let gram = cols.transpose() * cols;
    let inv = gram
        .try_inverse()
        .ok_or_else(|| Error::Unsupported("linearly dependent basis".into()))?;
    Ok(inv * cols.transpose())
}

fn pseudo_inverse_complex(cols: &CMat) -> Option<CMat> {
    let gram = cols.adjoint() * cols;
    let inv = gram.try_inverse()?;
    let cond = frob(&(cols.adjoint() * cols)) * frob(&inv);
    if cond > 1e10 {
        return None;
    }
    Some(inv * cols.adjoint())
}

/// How the invariant form of a new algebra is obtained from its matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FormSpec {
    Trace,
    ImaginaryTrace { theta: f64 },
    None,
}

impl LieAlgebra {
    /// Builds an algebra from basis matrices; the defining representation is
    /// the source of truth for the bracket and the form.
    pub fn from_matrices(
        name: impl Into<String>,
        kind: AlgebraKind,
        field: ScalarField,
        labels: Vec<String>,
        basis: Vec<CMat>,
        form_spec: FormSpec,
    ) -> Result<Self> {
        let name = name.into();
        let d = basis.len();
        if d == 0 || labels.len() != d {
            return Err(Error::Unsupported(format!("{name}: empty basis or label mismatch")));
        }
        let n = basis[0].nrows();
        let real_cols = RMat::from_fn(2 * n * n, d, |r, col| vectorize_real(&basis[col])[r]);
        let real_solver = pseudo_inverse_real(&real_cols)?;
        let complex_cols = CMat::from_fn(n * n, d, |r, col| basis[col][(r % n, r / n)]);
        let complex_solver = pseudo_inverse_complex(&complex_cols);
        let (form, form_inv) = match form_spec {
            FormSpec::None => (None, None),
            FormSpec::Trace | FormSpec::ImaginaryTrace { .. } => {
                let g = RMat::from_fn(d, d, |a, b| {
                    let t = (&basis[a] * &basis[b]).trace();
                    match form_spec {
                        FormSpec::ImaginaryTrace { theta } => t.im / theta,
                        _ => t.re,
                    }
                });
                let inv = g
                    .clone()
                    .try_inverse()
                    .ok_or_else(|| Error::Normalization(format!("{name}: invariant form is degenerate")))?;
                (Some(g), Some(inv))
            }
        };
        let mut alg = LieAlgebra {
            name,
            kind,
            field,
            n,
            basis_labels: labels,
            basis,
            structure: vec![0.0; d * d * d],
            form,
            form_inv,
            real_solver,
            complex_solver,
        };
        for a in 0..d {
            for b in 0..d {
                let br = linalg::commutator(&alg.basis[a], &alg.basis[b]);
                let coeffs = alg.coords_real(&br)?;
                for cc in 0..d {
                    alg.structure[(a * d + b) * d + cc] = coeffs[cc];
                }
            }
        }
        Ok(alg)
    }

    pub fn sl(n: usize, field: ScalarField) -> Result<Self> {
        if n < 2 {
            return Err(Error::Unsupported(format!("sl({n}) needs n >= 2")));
        }
        let roots = positive_roots(n);
        let mut labels = Vec::new();
        let mut basis = Vec::new();
        for r in &roots {
            labels.push(root_label(n, r, "E"));
            basis.push(unit(n, r.i, r.j));
        }
        for k in 0..(n - 1) {
            labels.push(cartan_label(n, k));
            basis.push(cartan(n, k));
        }
        for r in &roots {
            labels.push(root_label(n, r, "F"));
            basis.push(unit(n, r.j, r.i));
        }
        let name = match field {
            ScalarField::Real => format!("sl({n},R)"),
            ScalarField::Complex => format!("sl({n},C)"),
        };
        let alg = Self::from_matrices(name, AlgebraKind::SlSplit, field, labels, basis, FormSpec::Trace)?;
        alg.check_normalization()?;
        Ok(alg)
    }

    pub fn su(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Unsupported(format!("su({n}) needs n >= 2")));
        }
        let roots = positive_roots(n);
        let mut labels = Vec::new();
        let mut basis = Vec::new();
        for r in &roots {
            let e = root_label(n, r, "E");
            let f = root_label(n, r, "F");
            labels.push(format!("i({e}+{f})"));
            basis.push((unit(n, r.i, r.j) + unit(n, r.j, r.i)) * I);
        }
        for r in &roots {
            let e = root_label(n, r, "E");
            let f = root_label(n, r, "F");
            labels.push(format!("{e}-{f}"));
            basis.push(unit(n, r.i, r.j) - unit(n, r.j, r.i));
        }
        for k in 0..(n - 1) {
            labels.push(format!("i{}", cartan_label(n, k)));
            basis.push(cartan(n, k) * I);
        }
        let alg = Self::from_matrices(
            format!("su({n})"),
            AlgebraKind::SuCompact,
            ScalarField::Real,
            labels,
            basis,
            FormSpec::Trace,
        )?;
        alg.check_normalization()?;
        Ok(alg)
    }

    /// The Borel subalgebra span_R{E_a, i E_a, H_k}; the trace form is
    /// degenerate there, so no form is attached.
    pub fn borel(n: usize) -> Result<Self> {
        let (labels, basis) = borel_basis(n)?;
        Self::from_matrices(
            format!("b({n})"),
            AlgebraKind::Borel,
            ScalarField::Real,
            labels,
            basis,
            FormSpec::None,
        )
    }

    /// <E_a, E_-a> = 2/|a|^2 and the Jacobi/antisymmetry self-checks.
    fn check_normalization(&self) -> Result<()> {
        if self.kind == AlgebraKind::SlSplit {
            for r in positive_roots(self.n) {
                let val = (unit(self.n, r.i, r.j) * unit(self.n, r.j, r.i)).trace().re;
                if (val - 2.0 / r.length_sq()).abs() > 1e-14 {
                    return Err(Error::Normalization(format!("{}: <E_a, E_-a> = {val}", self.name)));
                }
            }
        }
        let jac = self.jacobi_residual();
        let anti = self.antisymmetry_residual();
        if jac > 1e-13 || anti > 1e-13 {
            return Err(Error::Normalization(format!(
                "{}: Jacobi residual {jac:e}, antisymmetry residual {anti:e}",
                self.name
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[CMat] {
        &self.basis
    }

    pub fn basis_matrix(&self, a: usize) -> &CMat {
        &self.basis[a]
    }

    pub fn structure_constant(&self, a: usize, b: usize, cc: usize) -> f64 {
        let d = self.dim();
        self.structure[(a * d + b) * d + cc]
    }

    pub fn form(&self) -> Result<&RMat> {
        self.form.as_ref().ok_or_else(|| Error::PairingUnavailable {
            pairing: "killing".into(),
            algebra: self.name.clone(),
        })
    }

    pub fn form_inverse(&self) -> Result<&RMat> {
        self.form_inv.as_ref().ok_or_else(|| Error::PairingUnavailable {
            pairing: "killing".into(),
            algebra: self.name.clone(),
        })
    }

    pub fn has_form(&self) -> bool {
        self.form.is_some()
    }

    /// Max over a,b,c,e of the Jacobi tensor.
    pub fn jacobi_residual(&self) -> f64 {
        let d = self.dim();
        let f = |a, b, c| self.structure_constant(a, b, c);
        let mut worst: f64 = 0.0;
        for a in 0..d {
            for b in 0..d {
                for cc in 0..d {
                    for e in 0..d {
                        let mut s = 0.0;
                        for x in 0..d {
                            s += f(a, b, x) * f(x, cc, e) + f(b, cc, x) * f(x, a, e) + f(cc, a, x) * f(x, b, e);
                        }
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    pub fn antisymmetry_residual(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for a in 0..d {
            for b in 0..d {
                for cc in 0..d {
                    worst = worst.max((self.structure_constant(a, b, cc) + self.structure_constant(b, a, cc)).abs());
                }
            }
        }
        worst
    }

    /// Max over basis triples of <[x,y],z> + <y,[x,z]>.
    pub fn form_invariance_residual(&self) -> Result<f64> {
        let g = self.form()?;
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for x in 0..d {
            for y in 0..d {
                for z in 0..d {
                    let mut s = 0.0;
                    for w in 0..d {
                        s +=
                            self.structure_constant(x, y, w) * g[(w, z)] + g[(y, w)] * self.structure_constant(x, z, w);
                    }
                    worst = worst.max(s.abs());
                }
            }
        }
        Ok(worst)
    }

    /// Matrix of an element with (possibly complex) coefficients.
    pub fn to_matrix(&self, coeffs: &CVec) -> CMat {
        let mut m = CMat::zeros(self.n, self.n);
        for (a, b) in self.basis.iter().enumerate() {
            if coeffs[a] != c(0.0) {
                m += b * coeffs[a];
            }
        }
        m
    }

    pub fn to_matrix_real(&self, coeffs: &[f64]) -> CMat {
        let mut m = CMat::zeros(self.n, self.n);
        for (a, b) in self.basis.iter().enumerate() {
            m += b * c(coeffs[a]);
        }
        m
    }

    /// Real coefficients of a matrix lying in the real span of the basis.
    pub fn coords_real(&self, m: &CMat) -> Result<Vec<f64>> {
        let v = nalgebra::DVector::from_vec(vectorize_real(m));
        let coeffs = &self.real_solver * &v;
        let back = self.to_matrix_real(coeffs.as_slice());
        let residual = frob(&(back - m));
        if residual > 1e-9 * (1.0 + frob(m)) {
            return Err(Error::NotInAlgebra {
                algebra: self.name.clone(),
                residual,
            });
        }
        Ok(coeffs.iter().copied().collect())
    }

    /// Coefficients in the complex span of the basis (the complexification).
    ///
    /// For the realified double, whose basis is not C-independent, this falls
    /// back to real coefficients.
    pub fn coords(&self, m: &CMat) -> Result<CVec> {
        match &self.complex_solver {
            Some(solver) => {
                let v = CVec::from_iterator(m.len(), m.iter().copied());
                let coeffs = solver * v;
                let residual = frob(&(self.to_matrix(&coeffs) - m));
                if residual > 1e-9 * (1.0 + frob(m)) {
                    return Err(Error::NotInAlgebra {
                        algebra: self.name.clone(),
                        residual,
                    });
                }
                Ok(coeffs)
            }
            None => {
                let r = self.coords_real(m)?;
                Ok(CVec::from_iterator(r.len(), r.into_iter().map(c)))
            }
        }
    }

    /// ad(x) as a dim x dim matrix: ad(x)[c][b] = sum_a x_a f[a][b][c].
    pub fn ad(&self, coeffs: &CVec) -> CMat {
        let d = self.dim();
        let mut m = CMat::zeros(d, d);
        for a in 0..d {
            let xa = coeffs[a];
            if xa == c(0.0) {
                continue;
            }
            for b in 0..d {
                for cc in 0..d {
                    let f = self.structure_constant(a, b, cc);
                    if f != 0.0 {
                        m[(cc, b)] += xa * f;
                    }
                }
            }
        }
        m
    }

    pub fn bracket_coeffs(&self, x: &CVec, y: &CVec) -> CVec {
        self.ad(x) * y
    }

    /// Bilinear form sum x_a g_ab y_b (no conjugation).
    pub fn form_value(&self, x: &CVec, y: &CVec) -> Result<C64> {
        let g = self.form()?;
        let mut s = c(0.0);
        for a in 0..self.dim() {
            for b in 0..self.dim() {
                if g[(a, b)] != 0.0 {
                    s += x[a] * g[(a, b)] * y[b];
                }
            }
        }
        Ok(s)
    }

    /// Raise an index: coefficients of T^a = sum_b (g^-1)_{ab} T_b.
    pub fn dual_basis_coeffs(&self, a: usize) -> Result<CVec> {
        let gi = self.form_inverse()?;
        Ok(CVec::from_iterator(self.dim(), (0..self.dim()).map(|b| c(gi[(a, b)]))))
    }

    pub fn is_real_coeffs(coeffs: &CVec, tol: f64) -> bool {
        coeffs.iter().all(|z| z.im.abs() <= tol)
    }

    /// Serializable descriptor: labels, structure constants, form.
    pub fn descriptor(&self) -> AlgebraDescriptor {
        let d = self.dim();
        let mut constants = Vec::new();
        for a in 0..d {
            for b in 0..d {
                for cc in 0..d {
                    let f = self.structure_constant(a, b, cc);
                    if f.abs() > 1e-14 {
                        constants.push(StructureConstant {
                            a,
                            b,
                            c: cc,
                            value: clean(f),
                        });
                    }
                }
            }
        }
        AlgebraDescriptor {
            schema_version: 1,
            name: self.name.clone(),
            kind: self.kind,
            field: self.field,
            dim: d,
            basis_labels: self.basis_labels.clone(),
            structure_constants: constants,
            bilinear_form: self
                .form
                .as_ref()
                .map(|g| (0..d).map(|a| (0..d).map(|b| clean(g[(a, b)])).collect()).collect()),
        }
    }
}

fn clean(x: f64) -> f64 {
    let r = (x * 1e12).round() / 1e12;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureConstant {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub value: f64,
}

/// JSON form of an algebra (see `schema/algebra.schema.json`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraDescriptor {
    pub schema_version: u32,
    pub name: String,
    pub kind: AlgebraKind,
    pub field: ScalarField,
    pub dim: usize,
    pub basis_labels: Vec<String>,
    pub structure_constants: Vec<StructureConstant>,
    pub bilinear_form: Option<Vec<Vec<f64>>>,
}

fn borel_basis(n: usize) -> Result<(Vec<String>, Vec<CMat>)> {
    if n < 2 {
        return Err(Error::Unsupported(format!("Borel subalgebra of sl({n})")));
    }
    let roots = positive_roots(n);
    let mut labels = Vec::new();
    let mut basis = Vec::new();
    for r in &roots {
        labels.push(root_label(n, r, "E"));
        basis.push(unit(n, r.i, r.j));
    }
    for r in &roots {
        labels.push(format!("i{}", root_label(n, r, "E")));
        basis.push(unit(n, r.i, r.j) * I);
    }
    for k in 0..(n - 1) {
        labels.push(cartan_label(n, k));
        basis.push(cartan(n, k));
    }
    Ok((labels, basis))
}

/// sl(n,C) regarded as a real Lie algebra, split as su(n) + b(n).
#[derive(Debug, Clone)]
pub struct RealifiedDouble {
    pub theta: f64,
    pub complex_algebra: Arc<LieAlgebra>,
    pub compact: Arc<LieAlgebra>,
    pub borel: Arc<LieAlgebra>,
    /// 2d-dimensional real algebra: compact basis then Borel basis, with form
    /// (1/theta) Im tr(XY).
    pub double: Arc<LieAlgebra>,
}

impl RealifiedDouble {
    pub fn new(n: usize, theta: f64) -> Result<Self> {
        if theta == 0.0 || !theta.is_finite() {
            return Err(Error::Unsupported("realified double needs a nonzero theta".into()));
        }
        let compact = LieAlgebra::su(n)?;
        let borel = LieAlgebra::borel(n)?;
        let mut labels = compact.basis_labels.clone();
        labels.extend(borel.basis_labels.iter().cloned());
        let mut basis = compact.basis().to_vec();
        basis.extend(borel.basis().iter().cloned());
        let double = LieAlgebra::from_matrices(
            format!("sl({n},C)_R"),
            AlgebraKind::RealifiedDouble,
            ScalarField::Real,
            labels,
            basis,
            FormSpec::ImaginaryTrace { theta },
        )?;
        let dbl = RealifiedDouble {
            theta,
            complex_algebra: Arc::new(LieAlgebra::sl(n, ScalarField::Complex)?),
            compact: Arc::new(compact),
            borel: Arc::new(borel),
            double: Arc::new(double),
        };
        let (iso, nondeg) = dbl.isotropy_residuals()?;
        if iso > 1e-12 || nondeg < 1e-6 {
            return Err(Error::Normalization(format!(
                "realified double: isotropy {iso:e}, cross-block determinant {nondeg:e}"
            )));
        }
        Ok(dbl)
    }

    pub fn half_dim(&self) -> usize {
        self.compact.dim()
    }

    /// (max |<<x,y>>| on g x g and b x b, |det| of the g x b block).
    pub fn isotropy_residuals(&self) -> Result<(f64, f64)> {
        let g = self.double.form()?;
        let d = self.half_dim();
        let mut iso: f64 = 0.0;
        for a in 0..d {
            for b in 0..d {
                iso = iso.max(g[(a, b)].abs()).max(g[(d + a, d + b)].abs());
            }
        }
        let cross = g.view((0, d), (d, d)).clone_owned();
        Ok((iso, cross.determinant().abs()))
    }

    /// <<X, Y>>_theta = (1/theta) Im tr(XY) on matrices.
    pub fn pairing_matrices(&self, x: &CMat, y: &CMat) -> f64 {
        (x * y).trace().im / self.theta
    }

    /// Splits X in sl(n,C) as (su(n) part, Borel part), both as matrices.
    pub fn split(&self, x: &CMat) -> Result<(CMat, CMat)> {
        let coeffs = self.double.coords_real(x)?;
        let d = self.half_dim();
        let gpart = self.compact.to_matrix_real(&coeffs[..d]);
        let bpart = self.borel.to_matrix_real(&coeffs[d..]);
        Ok((gpart, bpart))
    }

    pub fn project_compact(&self, x: &CMat) -> Result<CMat> {
        Ok(self.split(x)?.0)
    }

    pub fn project_borel(&self, x: &CMat) -> Result<CMat> {
        Ok(self.split(x)?.1)
    }

    /// rho = (pi_g - pi_b)/2.
    pub fn rho(&self, x: &CMat) -> Result<CMat> {
        let (g, b) = self.split(x)?;
        Ok((g - b) * c(0.5))
    }

    /// The unique Y in b with i(Y + Y^dagger) = X, for X in su(n).
    pub fn borel_preimage(&self, x: &CMat) -> Result<CMat> {
        let m = self.compact_from_borel_matrix()?;
        let target = self.compact.coords_real(x)?;
        let lu = m.lu();
        let y = lu
            .solve(&nalgebra::DVector::from_vec(target))
            .ok_or_else(|| Error::Numerical("Y -> i(Y + Y^dagger) is singular".into()))?;
        Ok(self.borel.to_matrix_real(y.as_slice()))
    }

    /// Real matrix of Y -> i(Y + Y^dagger) from b to su(n) in the two bases.
    pub fn compact_from_borel_matrix(&self) -> Result<RMat> {
        let d = self.half_dim();
        let mut m = RMat::zeros(d, d);
        for k in 0..d {
            let y = self.borel.basis_matrix(k);
            let x = (y + y.adjoint()) * I;
            let col = self.compact.coords_real(&x)?;
            for (r, v) in col.into_iter().enumerate() {
                m[(r, k)] = v;
            }
        }
        Ok(m)
    }
}

/// Result of [`build_algebra`].
#[derive(Debug, Clone)]
pub enum BuiltAlgebra {
    Lie(Arc<LieAlgebra>),
    Double(Arc<RealifiedDouble>),
}

/// Constructs one of the supported algebras; `rank` is n - 1.
///
/// The realified double is built with theta = 1; use
/// [`RealifiedDouble::new`] for other values.
pub fn build_algebra(kind: AlgebraKind, rank: usize, field: ScalarField) -> Result<BuiltAlgebra> {
    if rank == 0 {
        return Err(Error::Unsupported("rank must be at least 1".into()));
    }
    let n = rank + 1;
    match (kind, field) {
        (AlgebraKind::SlSplit, f) => Ok(BuiltAlgebra::Lie(Arc::new(LieAlgebra::sl(n, f)?))),
        (AlgebraKind::SuCompact, ScalarField::Real) => Ok(BuiltAlgebra::Lie(Arc::new(LieAlgebra::su(n)?))),
        (AlgebraKind::Borel, ScalarField::Real) => Ok(BuiltAlgebra::Lie(Arc::new(LieAlgebra::borel(n)?))),
        (AlgebraKind::RealifiedDouble, ScalarField::Real) => {
            Ok(BuiltAlgebra::Double(Arc::new(RealifiedDouble::new(n, 1.0)?)))
        }
        (k, f) => Err(Error::Unsupported(format!("{k:?} over {f:?}"))),
    }
}

/// Element of a Lie algebra (or of its complexification).
#[derive(Debug, Clone)]
pub struct AlgebraElement {
    pub algebra: Arc<LieAlgebra>,
    pub coeffs: CVec,
}

impl AlgebraElement {
    pub fn new(algebra: Arc<LieAlgebra>, coeffs: CVec) -> Result<Self> {
        if coeffs.len() != algebra.dim() {
            return Err(Error::ParentMismatch(format!(
                "{} coefficients for {} (dim {})",
                coeffs.len(),
                algebra.name,
                algebra.dim()
            )));
        }
        Ok(AlgebraElement { algebra, coeffs })
    }

    pub fn from_real(algebra: Arc<LieAlgebra>, coeffs: &[f64]) -> Result<Self> {
        let v = CVec::from_iterator(coeffs.len(), coeffs.iter().copied().map(c));
        Self::new(algebra, v)
    }

    pub fn zero(algebra: Arc<LieAlgebra>) -> Self {
        let d = algebra.dim();
        AlgebraElement {
            algebra,
            coeffs: CVec::zeros(d),
        }
    }

    pub fn basis(algebra: Arc<LieAlgebra>, a: usize) -> Self {
        let mut e = Self::zero(algebra);
        e.coeffs[a] = c(1.0);
        e
    }

    pub fn from_matrix(algebra: Arc<LieAlgebra>, m: &CMat) -> Result<Self> {
        let coeffs = algebra.coords(m)?;
        Ok(AlgebraElement { algebra, coeffs })
    }

    pub fn matrix(&self) -> CMat {
        self.algebra.to_matrix(&self.coeffs)
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.norm()
    }

    fn check_parent(&self, other: &AlgebraElement) -> Result<()> {
        if Arc::ptr_eq(&self.algebra, &other.algebra) || *self.algebra == *other.algebra {
            Ok(())
        } else {
            Err(Error::ParentMismatch(format!(
                "{} vs {}",
                self.algebra.name, other.algebra.name
            )))
        }
    }
}

/// Lie bracket in the basis.
pub fn bracket(x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
    x.check_parent(y)?;
    Ok(AlgebraElement {
        algebra: x.algebra.clone(),
        coeffs: x.algebra.bracket_coeffs(&x.coeffs, &y.coeffs),
    })
}

/// Killing (trace) pairing, or (1/theta) Im tr on the realified double.
pub fn pairing(x: &AlgebraElement, y: &AlgebraElement, which: Pairing) -> Result<C64> {
    x.check_parent(y)?;
    let alg = &x.algebra;
    match which {
        Pairing::Killing => {
            if alg.kind == AlgebraKind::RealifiedDouble {
                return Ok((x.matrix() * y.matrix()).trace());
            }
            alg.form_value(&x.coeffs, &y.coeffs)
        }
        Pairing::ImaginaryTheta => {
            if alg.kind != AlgebraKind::RealifiedDouble {
                return Err(Error::PairingUnavailable {
                    pairing: "imaginary_theta".into(),
                    algebra: alg.name.clone(),
                });
            }
            alg.form_value(&x.coeffs, &y.coeffs)
        }
    }
}

pub fn ad_matrix(x: &AlgebraElement) -> CMat {
    x.algebra.ad(&x.coeffs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKind {
    Sl,
    Su,
    Borel,
    RealifiedDouble,
}

/// Square matrix constrained to SL(n), SU(n), the Borel group, or SL(n,C)
/// regarded as a real group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    pub group: GroupKind,
    pub matrix: CMat,
}

pub const GROUP_TOL: f64 = 1e-12;

impl GroupElement {
    pub fn new(group: GroupKind, matrix: CMat) -> Result<Self> {
        let g = GroupElement { group, matrix };
        g.validate(GROUP_TOL)?;
        Ok(g)
    }

    pub fn identity(group: GroupKind, n: usize) -> Self {
        GroupElement {
            group,
            matrix: linalg::identity(n),
        }
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        let fail = |reason: String| Error::InvalidGroupElement {
            group: format!("{:?}", self.group),
            reason,
        };
        let m = &self.matrix;
        let scale = frob(m).max(1.0);
        let det = linalg::det(m);
        if (det - c(1.0)).norm() > tol * scale.powi(m.nrows() as i32) {
            return Err(fail(format!("determinant {det}")));
        }
        match self.group {
            GroupKind::Sl | GroupKind::RealifiedDouble => Ok(()),
            GroupKind::Su => {
                let dev = frob(&(m.adjoint() * m - linalg::identity(m.nrows())));
                if dev > tol * scale {
                    Err(fail(format!("unitarity defect {dev:e}")))
                } else {
                    Ok(())
                }
            }
            GroupKind::Borel => {
                let lower = frob(&linalg::strict_lower(m));
                if lower > tol * scale {
                    return Err(fail(format!("lower-triangular part {lower:e}")));
                }
                for i in 0..m.nrows() {
                    let d = m[(i, i)];
                    if d.re <= 0.0 || d.im.abs() > tol * scale {
                        return Err(fail(format!("diagonal entry {d}")));
                    }
                }
                Ok(())
            }
        }
    }

    pub fn inverse(&self) -> Result<GroupElement> {
        Ok(GroupElement {
            group: self.group,
            matrix: linalg::inverse(&self.matrix)?,
        })
    }

    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        GroupElement {
            group: self.group,
            matrix: &self.matrix * &other.matrix,
        }
    }
}

/// exp of an algebra element through the defining representation.
pub fn exp(x: &AlgebraElement, group: GroupKind) -> GroupElement {
    GroupElement {
        group,
        matrix: linalg::expm(&x.matrix()),
    }
}

/// Ad(g) x = g x g^-1 re-expressed in the basis.
pub fn adjoint_action(g: &GroupElement, x: &AlgebraElement) -> Result<AlgebraElement> {
    let m = &g.matrix * x.matrix() * linalg::inverse(&g.matrix)?;
    AlgebraElement::from_matrix(x.algebra.clone(), &m)
}

/// Ad(g) as a dim x dim matrix acting on coefficients.
pub fn adjoint_matrix(alg: &LieAlgebra, g: &CMat) -> Result<CMat> {
    let gi = linalg::inverse(g)?;
    let d = alg.dim();
    let mut out = CMat::zeros(d, d);
    for b in 0..d {
        let col = alg.coords(&(g * alg.basis_matrix(b) * &gi))?;
        out.set_column(b, &col);
    }
    Ok(out)
}

/// Minus the Cartan involution on an element of the realified double (or of
/// su(n)/b(n) viewed inside it): X -> X^dagger.
pub fn dagger_element(dbl: &RealifiedDouble, x: &AlgebraElement) -> Result<AlgebraElement> {
    let m = x.matrix().adjoint();
    let coeffs = dbl.double.coords_real(&m)?;
    AlgebraElement::from_real(dbl.double.clone(), &coeffs)
}

pub fn dagger_group(g: &GroupElement) -> GroupElement {
    GroupElement {
        group: g.group,
        matrix: g.matrix.adjoint(),
    }
}
