//! Small dense complex linear algebra used throughout the crate.
//!
//! Everything here works on `DMatrix<Complex64>` of size n x n with n the
//! dimension of a defining representation (2 or 3 in practice), so the
//! routines favour clarity over asymptotic efficiency.

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;
pub type RMat = DMatrix<f64>;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

#[inline]
pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn frob(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn frob_real(a: &RMat) -> f64 {
    a.iter().map(|z| z * z).sum::<f64>().sqrt()
}

pub fn max_imag(a: &CMat) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.im.abs()))
}

pub fn real_part(a: &CMat) -> RMat {
    a.map(|z| z.re)
}

pub fn complexify(a: &RMat) -> CMat {
    a.map(c)
}

pub fn dagger(a: &CMat) -> CMat {
    a.adjoint()
}

/// Reversal permutation J with J_{i, n-1-i} = 1.
pub fn reversal(n: usize) -> CMat {
    CMat::from_fn(n, n, |i, j| if i + j + 1 == n { c(1.0) } else { c(0.0) })
}

pub fn inverse(a: &CMat) -> Result<CMat> {
    a.clone()
        .try_inverse()
        .ok_or_else(|| Error::Numerical("singular matrix".into()))
}

pub fn det(a: &CMat) -> C64 {
    a.clone().determinant()
}

/// Frobenius condition number ||A|| ||A^-1||.
pub fn cond(a: &CMat) -> f64 {
    match a.clone().try_inverse() {
        Some(inv) => frob(a) * frob(&inv),
        None => f64::INFINITY,
    }
}

pub fn eigenvalues(a: &CMat) -> Vec<C64> {
    let (_, t) = Schur::new(a.clone()).unpack();
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

/// Eigendecomposition A = V diag(values) V^-1 of a general complex matrix.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<C64>,
    pub vectors: CMat,
    pub inverse: CMat,
    pub cond: f64,
}

/// Computes eigenvectors from the complex Schur form by back substitution.
///
/// Tiny denominators are clamped (as in LAPACK's trevc), so a defective or
/// nearly defective input shows up as a huge `cond` rather than a NaN.
pub fn eigen(a: &CMat) -> Eigen {
    let n = a.nrows();
    let (q, t) = Schur::new(a.clone()).unpack();
    let scale = frob(&t).max(1.0);
    let small = f64::EPSILON * scale;
    let mut x = CMat::zeros(n, n);
    for k in 0..n {
        let lk = t[(k, k)];
        x[(k, k)] = c(1.0);
        for i in (0..k).rev() {
            let mut s = C64::new(0.0, 0.0);
            for j in (i + 1)..=k {
                s += t[(i, j)] * x[(j, k)];
            }
            let mut d = t[(i, i)] - lk;
            if d.norm() < small {
                d = c(small);
            }
            x[(i, k)] = -s / d;
        }
        let nrm = x.column(k).norm();
        x.column_mut(k).unscale_mut(nrm);
    }
    let vectors = q * x;
    let values = (0..n).map(|i| t[(i, i)]).collect();
    match vectors.clone().try_inverse() {
        Some(inverse) => {
            let cond = frob(&vectors) * frob(&inverse);
            Eigen {
                values,
                vectors,
                inverse,
                cond,
            }
        }
        None => Eigen {
            values,
            inverse: CMat::zeros(n, n),
            vectors,
            cond: f64::INFINITY,
        },
    }
}

pub fn expm(a: &CMat) -> CMat {
    a.exp()
}

/// Principal square root by the Denman-Beavers iteration.
pub fn sqrtm(a: &CMat) -> Result<CMat> {
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = identity(n);
    for _ in 0..100 {
        let yi = inverse(&y)?;
        let zi = inverse(&z)?;
        let y_next = (&y + zi) * c(0.5);
        let z_next = (&z + yi) * c(0.5);
        let delta = frob(&(&y_next - &y));
        y = y_next;
        z = z_next;
        if delta <= 1e-15 * frob(&y).max(1.0) {
            return Ok(y);
        }
    }
    Err(Error::Numerical("square root iteration did not converge".into()))
}

/// Principal matrix logarithm by inverse scaling and squaring.
pub fn logm(a: &CMat) -> Result<CMat> {
    let n = a.nrows();
    for lam in eigenvalues(a) {
        if lam.re <= 0.0 && lam.im.abs() <= 1e-12 * (1.0 + lam.norm()) {
            return Err(Error::BranchCut(lam));
        }
    }
    let id = identity(n);
    let mut x = a.clone();
    let mut k = 0u32;
    while frob(&(&x - &id)) > 0.25 {
        x = sqrtm(&x)?;
        k += 1;
        if k > 64 {
            return Err(Error::Numerical("logarithm scaling did not terminate".into()));
        }
    }
    // log X = 2 atanh(Z), Z = (X - I)(X + I)^-1
    let z = (&x - &id) * inverse(&(&x + &id))?;
    let z2 = &z * &z;
    let mut term = z.clone();
    let mut sum = z.clone();
    let mut j = 1u32;
    loop {
        term = &term * &z2;
        let coeff = 1.0 / f64::from(2 * j + 1);
        let contrib = &term * c(coeff);
        sum += &contrib;
        j += 1;
        if frob(&contrib) < 1e-18 || j > 200 {
            break;
        }
    }
    Ok(sum * c(2f64.powi(k as i32 + 1)))
}

/// Eigendecomposition of a Hermitian matrix: (real eigenvalues, unitary U).
pub fn hermitian_eigen(h: &CMat) -> (Vec<f64>, CMat) {
    let sym = (h + h.adjoint()) * c(0.5);
    let e = SymmetricEigen::new(sym);
    (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
}

pub fn hermitian_apply(h: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, u) = hermitian_eigen(h);
    let d = CMat::from_diagonal(&CVec::from_iterator(vals.len(), vals.iter().map(|&v| c(f(v)))));
    &u * d * u.adjoint()
}

/// Logarithm of a Hermitian positive-definite matrix.
pub fn hermitian_log(h: &CMat) -> Result<CMat> {
    let (vals, _) = hermitian_eigen(h);
    if let Some(v) = vals.iter().find(|v| **v <= 0.0) {
        return Err(Error::Domain(format!(
            "Hermitian logarithm needs a positive-definite matrix (eigenvalue {v:e})"
        )));
    }
    Ok(hermitian_apply(h, f64::ln))
}

/// QR factorization A = Q R with R upper triangular and a positive real diagonal.
pub fn qr_positive(a: &CMat) -> Result<(CMat, CMat)> {
    let n = a.nrows();
    let qr = a.clone().qr();
    let mut q = qr.q();
    let mut r = qr.r();
    for i in 0..n {
        let d = r[(i, i)];
        let nrm = d.norm();
        if nrm < 1e-300 {
            return Err(Error::Numerical("rank-deficient matrix in QR".into()));
        }
        let phase = d / nrm;
        // Q' = Q diag(phase), R' = diag(conj phase) R
        for row in 0..n {
            q[(row, i)] *= phase;
        }
        for col in 0..n {
            r[(i, col)] *= phase.conj();
        }
        r[(i, i)] = c(r[(i, i)].re);
    }
    Ok((q, r))
}

/// Upper-triangular b with positive diagonal and b b^dagger = omega.
pub fn reverse_cholesky(omega: &CMat) -> Result<CMat> {
    let n = omega.nrows();
    let j = reversal(n);
    let flipped = &j * omega * &j;
    let herm = (&flipped + flipped.adjoint()) * c(0.5);
    let chol = herm
        .cholesky()
        .ok_or_else(|| Error::Domain("matrix is not Hermitian positive definite".into()))?;
    let l = chol.l();
    Ok(&j * l * &j)
}

/// Gauss factorization A = U D L with U unit upper, D diagonal, L unit lower.
///
/// Exists iff every trailing principal minor of A is nonzero.
pub fn udl(a: &CMat) -> Result<(CMat, CVec, CMat)> {
    let n = a.nrows();
    let j = reversal(n);
    let flipped = &j * a * &j;
    let (l, d, u) = ldu(&flipped)?;
    let d_rev = CVec::from_iterator(n, (0..n).map(|i| d[n - 1 - i]));
    Ok((&j * l * &j, d_rev, &j * u * &j))
}

/// Doolittle LDU without pivoting.
pub fn ldu(a: &CMat) -> Result<(CMat, CVec, CMat)> {
    let n = a.nrows();
    let scale = frob(a).max(1e-300);
    let mut work = a.clone();
    let mut l = identity(n);
    for k in 0..n {
        let pivot = work[(k, k)];
        if pivot.norm() < 1e-13 * scale {
            return Err(Error::NotFactorizable { order: k + 1 });
        }
        for i in (k + 1)..n {
            let factor = work[(i, k)] / pivot;
            l[(i, k)] = factor;
            for col in k..n {
                let v = work[(k, col)];
                work[(i, col)] -= factor * v;
            }
        }
    }
    let d = CVec::from_iterator(n, (0..n).map(|i| work[(i, i)]));
    let mut u = work;
    for i in 0..n {
        let di = d[i];
        for col in 0..n {
            u[(i, col)] = if col < i { c(0.0) } else { u[(i, col)] / di };
        }
    }
    Ok((l, d, u))
}

pub fn strict_upper(a: &CMat) -> CMat {
    CMat::from_fn(a.nrows(), a.ncols(), |i, j| if j > i { a[(i, j)] } else { c(0.0) })
}

pub fn strict_lower(a: &CMat) -> CMat {
    CMat::from_fn(a.nrows(), a.ncols(), |i, j| if j < i { a[(i, j)] } else { c(0.0) })
}

pub fn diagonal_part(a: &CMat) -> CMat {
    CMat::from_fn(a.nrows(), a.ncols(), |i, j| if i == j { a[(i, j)] } else { c(0.0) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CMat {
        CMat::from_row_slice(
            3,
            3,
            &[
                C64::new(1.1, 0.2),
                C64::new(0.3, -0.1),
                C64::new(0.0, 0.4),
                C64::new(-0.2, 0.1),
                C64::new(0.9, 0.0),
                C64::new(0.25, 0.0),
                C64::new(0.1, -0.3),
                C64::new(0.05, 0.2),
                C64::new(1.2, -0.1),
            ],
        )
    }

    #[test]
    fn eigen_reconstructs() {
        let a = sample();
        let e = eigen(&a);
        let d = CMat::from_diagonal(&CVec::from_vec(e.values.clone()));
        let back = &e.vectors * d * &e.inverse;
        assert!(frob(&(back - a)) < 1e-12);
    }

    #[test]
    fn eigen_of_defective_matrix_is_flagged() {
        let a = CMat::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
        assert!(eigen(&a).cond > 1e8);
    }

    #[test]
    fn log_exp_round_trip() {
        let a = sample();
        let l = logm(&a).unwrap();
        assert!(frob(&(expm(&l) - a)) < 1e-12);
    }

    #[test]
    fn log_rejects_negative_eigenvalue() {
        let a = CMat::from_row_slice(2, 2, &[c(-1.0), c(0.0), c(0.0), c(-1.0)]);
        assert!(matches!(logm(&a), Err(Error::BranchCut(_))));
    }

    #[test]
    fn qr_has_positive_diagonal() {
        let a = sample();
        let (q, r) = qr_positive(&a).unwrap();
        assert!(frob(&(&q * &r - &a)) < 1e-13);
        assert!(frob(&(q.adjoint() * &q - identity(3))) < 1e-13);
        for i in 0..3 {
            assert!(r[(i, i)].re > 0.0 && r[(i, i)].im == 0.0);
            for j in 0..i {
                assert!(r[(i, j)].norm() < 1e-14);
            }
        }
    }

    #[test]
    fn udl_reconstructs() {
        let a = sample();
        let (u, d, l) = udl(&a).unwrap();
        let back = &u * CMat::from_diagonal(&d) * &l;
        assert!(frob(&(back - &a)) < 1e-13);
        assert!(frob(&strict_lower(&u)) == 0.0);
        assert!(frob(&strict_upper(&l)) == 0.0);
    }

    #[test]
    fn udl_detects_vanishing_trailing_minor() {
        let a = CMat::from_row_slice(2, 2, &[c(0.0), c(1.0), c(-1.0), c(0.0)]);
        assert!(matches!(udl(&a), Err(Error::NotFactorizable { order: 1 })));
    }

    #[test]
    fn reverse_cholesky_is_upper() {
        let a = sample();
        let h = &a * a.adjoint();
        let b = reverse_cholesky(&h).unwrap();
        assert!(frob(&(&b * b.adjoint() - &h)) < 1e-13);
        assert!(frob(&strict_lower(&b)) < 1e-15);
    }
}
