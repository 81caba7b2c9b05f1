//! Dense complex matrices and the handful of linear-algebra kernels the rank
//! analysis needs: Kronecker products, adjoints, SVD and numerical rank.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use faer::Mat;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative threshold on singular values used for every rank decision.
pub const RANK_TOL: f64 = 1e-9;

/// Absolute tolerance on the max-entry deviation for exact identities.
pub const IDENTITY_TOL: f64 = 1e-12;

const SVD_RECONSTRUCT_TOL: f64 = 1e-10;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub(crate) fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// A dense complex matrix stored row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("matrix"));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from nested rows. Panics on ragged input, so it is
    /// meant for literals.
    pub fn from_rows<R: AsRef<[C64]>>(rows: &[R]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows[0].as_ref().len();
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for row in rows {
            assert_eq!(row.as_ref().len(), n_cols, "ragged matrix literal");
            data.extend_from_slice(row.as_ref());
        }
        Self::from_vec(n_rows, n_cols, data).expect("invalid matrix literal")
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Self {
        Self::from_vec(rows, cols, data.iter().map(|&x| r(x)).collect())
            .expect("invalid real matrix literal")
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = r(1.0);
        }
        m
    }

    /// `|i><j|` in dimension `n`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = r(1.0);
        m
    }

    pub fn diag(entries: &[C64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(r(s))
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = Self::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.data[k * other.cols + j];
                }
            }
        }
        Ok(out)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Trace inner product `tr(self† other)`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation; infinite when the shapes differ.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dims() != other.dims() {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    /// `‖M M† − I‖_max`; infinite for non-square input.
    pub fn unitarity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let prod = self.matmul(&self.dagger()).expect("square");
        prod.max_abs_diff(&Self::identity(self.rows))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_faer(&self) -> Mat<C64> {
        Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)])
    }

    pub fn from_faer(m: &Mat<C64>) -> Self {
        let mut out = Self::zeros(m.nrows(), m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                out[(i, j)] = m[(i, j)];
            }
        }
        out
    }

    /// Thin singular value decomposition.
    pub fn svd(&self) -> Result<Svd> {
        svd(self)
    }

    pub fn numerical_rank(&self, tol: f64) -> Result<usize> {
        numerical_rank(self, tol)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dims(), rhs.dims(), "shape mismatch in add");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dims(), rhs.dims(), "shape mismatch in sub");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// Panics on a shape mismatch; use [`ComplexMatrix::matmul`] for a
    /// fallible product.
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("shape mismatch in mul")
    }
}

impl fmt::Display for ComplexMatrix {
    /// Entries rounded to six significant digits.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| fmt_complex(self[(i, j)])).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let s = format!("{:.*e}", 5, x);
    // Prefer plain notation for moderate magnitudes.
    let mag = x.abs().log10().floor() as i32;
    if (-4..6).contains(&mag) {
        let decimals = (5 - mag).max(0) as usize;
        let plain = format!("{:.*}", decimals, x);
        let plain = if plain.contains('.') {
            plain
                .trim_end_matches('0')
                .trim_end_matches('.')
                .to_string()
        } else {
            plain
        };
        if plain == "-0" {
            return "0".to_string();
        }
        return plain;
    }
    s
}

/// Formats a complex number with six significant digits per part, snapping
/// parts below 1e-12 to zero.
pub fn fmt_complex(z: C64) -> String {
    let re = if z.re.abs() < IDENTITY_TOL { 0.0 } else { z.re };
    let im = if z.im.abs() < IDENTITY_TOL { 0.0 } else { z.im };
    match (re == 0.0, im == 0.0) {
        (_, true) => fmt_sig(re),
        (true, false) => format!("{}i", fmt_sig(im)),
        (false, false) => {
            let sign = if im < 0.0 { '-' } else { '+' };
            format!("{}{}{}i", fmt_sig(re), sign, fmt_sig(im.abs()))
        }
    }
}

/// Kronecker product of two matrices.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

/// Kronecker product of a sequence of factors, left to right.
pub fn kron_all<'a, I>(factors: I) -> ComplexMatrix
where
    I: IntoIterator<Item = &'a ComplexMatrix>,
{
    factors
        .into_iter()
        .fold(ComplexMatrix::identity(1), |acc, f| acc.kron(f))
}

/// Conjugate transpose.
pub fn dagger(a: &ComplexMatrix) -> ComplexMatrix {
    a.dagger()
}

/// Thin SVD `a = u · diag(s) · v†` with `s` sorted in descending order.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let k = self.singular_values.len();
        let mut us = self.u.clone();
        for i in 0..us.rows() {
            for j in 0..k {
                us[(i, j)] *= self.singular_values[j];
            }
        }
        &us * &self.v.dagger()
    }
}

/// Computes the thin SVD. Deterministic for a fixed input.
pub fn svd(a: &ComplexMatrix) -> Result<Svd> {
    let dec = a
        .to_faer()
        .thin_svd()
        .map_err(|_| Error::SvdNoConvergence)?;
    let (u, v) = (dec.U(), dec.V());
    let s = dec.S().column_vector();
    let k = s.nrows();
    let mut u_out = ComplexMatrix::zeros(a.rows(), k);
    let mut v_out = ComplexMatrix::zeros(a.cols(), k);
    let mut s_out = Vec::with_capacity(k);
    for j in 0..k {
        s_out.push(s[j].re);
        for i in 0..a.rows() {
            u_out[(i, j)] = u[(i, j)];
        }
        for i in 0..a.cols() {
            v_out[(i, j)] = v[(i, j)];
        }
    }
    let out = Svd {
        u: u_out,
        singular_values: s_out,
        v: v_out,
    };
    if out.reconstruct().max_abs_diff(a) > SVD_RECONSTRUCT_TOL * a.max_abs().max(1.0) {
        return Err(Error::SvdNoConvergence);
    }
    Ok(out)
}

/// Number of singular values above `tol · max(s)`; zero for the zero matrix.
pub fn numerical_rank(a: &ComplexMatrix, tol: f64) -> Result<usize> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "rank tolerance must be positive, got {tol}"
        )));
    }
    let s = svd(a)?.singular_values;
    Ok(rank_from_singular_values(&s, tol))
}

pub(crate) fn rank_from_singular_values(s: &[f64], tol: f64) -> usize {
    let max = s.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > tol * max).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cnot() -> ComplexMatrix {
        ComplexMatrix::from_real(
            4,
            4,
            &[
                1., 0., 0., 0., //
                0., 1., 0., 0., //
                0., 0., 0., 1., //
                0., 0., 1., 0.,
            ],
        )
    }

    #[test]
    fn kron_identities() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));

        let s0 = ComplexMatrix::unit(2, 0, 0);
        let s3 = ComplexMatrix::unit(2, 1, 1);
        let d = kron(&s0, &s3);
        assert_eq!(d, ComplexMatrix::diag(&[r(0.), r(1.), r(0.), r(0.)]));
    }

    #[test]
    fn kron_builds_cnot() {
        let x = ComplexMatrix::from_real(2, 2, &[0., 1., 1., 0.]);
        let i2 = ComplexMatrix::identity(2);
        let t =
            &kron(&ComplexMatrix::unit(2, 0, 0), &i2) + &kron(&ComplexMatrix::unit(2, 1, 1), &x);
        assert_eq!(t, cnot());
    }

    #[test]
    fn dagger_examples() {
        assert_eq!(
            dagger(&ComplexMatrix::identity(4)),
            ComplexMatrix::identity(4)
        );
        assert_eq!(
            dagger(&ComplexMatrix::unit(2, 0, 1)),
            ComplexMatrix::unit(2, 1, 0)
        );
        let h = ComplexMatrix::from_real(2, 2, &[1., 1., 1., -1.]).scale_real(0.5f64.sqrt());
        assert_eq!(dagger(&h), h);
        let m = ComplexMatrix::from_rows(&[[c(1., 2.), c(0., -1.)]]);
        assert_eq!(
            m.dagger(),
            ComplexMatrix::from_rows(&[[c(1., -2.)], [c(0., 1.)]])
        );
    }

    #[test]
    fn svd_diag() {
        let a = ComplexMatrix::diag(&[r(1.), r(3.)]);
        let s = svd(&a).unwrap();
        assert!((s.singular_values[0] - 3.0).abs() < 1e-14);
        assert!((s.singular_values[1] - 1.0).abs() < 1e-14);
        assert!(s.reconstruct().approx_eq(&a, 1e-12));
    }

    #[test]
    fn svd_rectangular_reconstructs() {
        let a = ComplexMatrix::from_rows(&[
            [c(1., 0.5), c(0., 2.), c(-1., 0.)],
            [c(0.3, 0.), c(2., -1.), c(0., 0.)],
        ]);
        let s = svd(&a).unwrap();
        assert_eq!(s.singular_values.len(), 2);
        assert!(s.singular_values[0] >= s.singular_values[1]);
        assert!(s.reconstruct().max_abs_diff(&a) <= 1e-12 * a.frobenius_norm());
        let t = a.transpose();
        let st = svd(&t).unwrap();
        assert!(st.reconstruct().max_abs_diff(&t) <= 1e-12 * a.frobenius_norm());
    }

    // Mode-1 flattening of (I + iXXX + iZZZ)·√3: three equal singular values.
    #[test]
    fn svd_degenerate_complex_flattening() {
        let mut a = ComplexMatrix::zeros(4, 16);
        let (p, m) = (c(1., 1.), c(1., -1.));
        for (col, z0, z3) in [(0, p, m), (3, m, p), (12, m, p), (15, p, m)] {
            a[(0, col)] = z0;
            a[(3, col)] = z3;
        }
        for col in [5, 6, 9, 10] {
            a[(1, col)] = c(0., 1.);
            a[(2, col)] = c(0., 1.);
        }
        let s = svd(&a).unwrap();
        for x in &s.singular_values[..3] {
            assert!((x - 8f64.sqrt()).abs() <= 1e-12, "{:?}", s.singular_values);
        }
        assert!(s.singular_values[3] <= 1e-12);
        assert!(s.reconstruct().max_abs_diff(&a) <= 1e-12);
    }

    #[test]
    fn numerical_rank_examples() {
        assert_eq!(
            numerical_rank(&ComplexMatrix::zeros(4, 4), RANK_TOL).unwrap(),
            0
        );
        assert_eq!(
            numerical_rank(&ComplexMatrix::identity(4), RANK_TOL).unwrap(),
            4
        );
        assert!(numerical_rank(&ComplexMatrix::identity(2), 0.0).is_err());
    }

    #[test]
    fn from_vec_rejects_bad_input() {
        assert!(ComplexMatrix::from_vec(2, 2, vec![r(0.); 3]).is_err());
        assert!(ComplexMatrix::from_vec(0, 2, vec![]).is_err());
        assert!(ComplexMatrix::from_vec(1, 1, vec![r(f64::NAN)]).is_err());
    }

    #[test]
    fn complex_formatting() {
        assert_eq!(fmt_complex(r(0.5f64.sqrt())), "0.707107");
        assert_eq!(fmt_complex(c(0., -1.)), "-1i");
        assert_eq!(fmt_complex(c(1., -2.)), "1-2i");
        assert_eq!(fmt_complex(r(1e-15)), "0");
        assert_eq!(fmt_complex(r(-1.0)), "-1");
    }
}
