//! Small dense complex linear algebra for per-PRB receiver math.
//!
//! Matrices here are tiny (N_R x N_T with N_R, N_T <= 8), so everything is
//! row-major `Vec` storage with straightforward loops.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

pub type CVector = Vec<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major data.
    ///
    /// Panics if `data.len() != rows * cols`.
    pub fn from_row_slice(rows: usize, cols: usize, data: &[Complex64]) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        Self { rows, cols, data: data.to_vec() }
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        Self { rows, cols, data: data.iter().map(|&x| Complex64::new(x, 0.0)).collect() }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn column(&self, c: usize) -> CVector {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    /// `self * v`, scaled by a real factor.
    pub fn mul_vec_scaled(&self, v: &[Complex64], scale: f64) -> CVector {
        debug_assert_eq!(v.len(), self.cols);
        self.data
            .chunks_exact(self.cols)
            .map(|row| row.iter().zip(v).fold(ZERO, |acc, (a, b)| acc + a * b) * scale)
            .collect()
    }

    /// `self^H * self` (cols x cols).
    pub fn gram(&self) -> CMatrix {
        let n = self.cols;
        let mut g = CMatrix::zeros(n, n);
        for row in self.data.chunks_exact(n) {
            for i in 0..n {
                let ci = row[i].conj();
                for j in i..n {
                    g.data[i * n + j] += ci * row[j];
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                g.data[i * n + j] = g.data[j * n + i].conj();
            }
        }
        g
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl core::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl core::ops::IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

pub fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

pub fn norm(v: &[Complex64]) -> f64 {
    libm::sqrt(norm_sqr(v))
}

/// Accumulates `scale * v v^H` into the Hermitian matrix `acc`.
pub fn add_outer(acc: &mut CMatrix, v: &[Complex64], scale: f64) {
    let n = acc.rows;
    debug_assert_eq!(v.len(), n);
    for i in 0..n {
        let vi = v[i] * scale;
        for j in 0..n {
            acc.data[i * n + j] += vi * v[j].conj();
        }
    }
}

/// Lower-triangular Cholesky factor `L` of a Hermitian positive definite
/// matrix, `R = L L^H`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    l: Vec<Complex64>,
}

impl Cholesky {
    /// Returns `None` if a pivot is not strictly positive.
    pub fn new(r: &CMatrix) -> Option<Self> {
        let n = r.rows;
        debug_assert_eq!(n, r.cols);
        let mut l = vec![ZERO; n * n];
        for j in 0..n {
            let mut diag = r[(j, j)].re;
            for k in 0..j {
                diag -= l[j * n + k].norm_sqr();
            }
            if !(diag > 0.0) {
                return None;
            }
            let d = libm::sqrt(diag);
            l[j * n + j] = Complex64::new(d, 0.0);
            for i in (j + 1)..n {
                let mut s = r[(i, j)];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = s / d;
            }
        }
        Some(Self { n, l })
    }

    /// `v^H R^{-1} v`, computed as `||L^{-1} v||^2` by forward substitution.
    pub fn quad_inverse(&self, v: &[Complex64]) -> f64 {
        let n = self.n;
        debug_assert_eq!(v.len(), n);
        let mut y = [ZERO; 16];
        let mut heap;
        let y: &mut [Complex64] = if n <= 16 {
            &mut y[..n]
        } else {
            heap = vec![ZERO; n];
            &mut heap
        };
        let mut acc = 0.0;
        for i in 0..n {
            let mut s = v[i];
            for k in 0..i {
                s -= self.l[i * n + k] * y[k];
            }
            y[i] = s / self.l[i * n + i].re;
            acc += y[i].norm_sqr();
        }
        acc
    }
}
