//! Dense complex linear algebra: Householder reduction to Hessenberg form,
//! shifted QR eigenvalues, and log-determinants of small Hermitian matrices.

mod qr;

pub use qr::{eigenvalues, eigenvalues_hessenberg, EigenOptions};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major data, rejecting non-finite entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "expected {} entries for {rows}x{cols}, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("matrix has non-finite entries".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// True when every entry below the first subdiagonal is exactly zero.
    pub fn is_upper_hessenberg(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i <= j + 1 || self[(i, j)] == Complex64::new(0.0, 0.0)))
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// `z / |z|`, accurate for subnormal `z`.
#[inline]
pub(crate) fn unit_phase(z: Complex64) -> Complex64 {
    let scale = z.re.abs().max(z.im.abs());
    let w = z / scale;
    w / w.norm()
}

/// Reduces a square matrix to upper Hessenberg form by Householder
/// similarity transforms. Entries below the subdiagonal are set to exact zero.
pub fn hessenberg(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::Shape(format!("hessenberg needs a square matrix, got {}x{}", a.rows, a.cols)));
    }
    let n = a.rows;
    let mut h = a.clone();
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n.saturating_sub(2) {
        let xnorm = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { unit_phase(x0) };
        let alpha = -phase * xnorm;
        // v = x - alpha e1, normalised to unit length.
        for i in k + 1..n {
            v[i] = h[(i, k)];
        }
        v[k + 1] -= alpha;
        let vnorm = (k + 1..n).map(|i| v[i].norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for vi in &mut v[k + 1..n] {
            *vi /= vnorm;
        }
        // Left: rows k+1.., columns k+1.. (column k is set directly).
        for wj in &mut w[k + 1..n] {
            *wj = Complex64::new(0.0, 0.0);
        }
        for i in k + 1..n {
            let vc = v[i].conj();
            let row = &h.data[i * n..(i + 1) * n];
            for j in k + 1..n {
                w[j] += vc * row[j];
            }
        }
        for i in k + 1..n {
            let s = v[i] * 2.0;
            let row = &mut h.data[i * n..(i + 1) * n];
            for j in k + 1..n {
                row[j] -= s * w[j];
            }
        }
        h[(k + 1, k)] = alpha;
        for i in k + 2..n {
            h[(i, k)] = Complex64::new(0.0, 0.0);
        }
        // Right: all rows, columns k+1..
        for i in 0..n {
            let row = &mut h.data[i * n..(i + 1) * n];
            let mut s = Complex64::new(0.0, 0.0);
            for j in k + 1..n {
                s += row[j] * v[j];
            }
            s *= 2.0;
            for j in k + 1..n {
                row[j] -= s * v[j].conj();
            }
        }
    }
    Ok(h)
}

/// Sign and log-magnitude of a determinant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogDet {
    /// +1, -1, or 0 for a singular matrix.
    pub sign: f64,
    /// log|det|; `-inf` when singular.
    pub log_abs: f64,
}

/// Log-determinant of a Hermitian matrix (size at most 16) by partially
/// pivoted LU.
pub fn hermitian_logdet(m: &ComplexMatrix) -> Result<LogDet> {
    if !m.is_square() {
        return Err(Error::Shape("hermitian_logdet needs a square matrix".into()));
    }
    let n = m.rows;
    if n > 16 {
        return Err(Error::InvalidInput(format!("hermitian_logdet supports size <= 16, got {n}")));
    }
    let scale = m.data.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for i in 0..n {
        for j in 0..=i {
            if (m[(i, j)] - m[(j, i)].conj()).norm() > 1e-10 * scale.max(f64::MIN_POSITIVE) {
                return Err(Error::InvalidInput("matrix is not Hermitian within 1e-10".into()));
            }
        }
    }
    if n == 0 {
        return Ok(LogDet { sign: 1.0, log_abs: 0.0 });
    }
    let mut a = m.clone();
    let mut phase = Complex64::new(1.0, 0.0);
    let mut log_abs = 0.0;
    for k in 0..n {
        let (p, pmax) = (k..n)
            .map(|i| (i, a[(i, k)].norm()))
            .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if pmax == 0.0 {
            return Ok(LogDet { sign: 0.0, log_abs: f64::NEG_INFINITY });
        }
        if p != k {
            for j in 0..n {
                a.data.swap(k * n + j, p * n + j);
            }
            phase = -phase;
        }
        let piv = a[(k, k)];
        phase *= piv / pmax;
        log_abs += pmax.ln();
        for i in k + 1..n {
            let f = a[(i, k)] / piv;
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in k + 1..n {
                let t = a[(k, j)];
                a[(i, j)] -= f * t;
            }
        }
    }
    Ok(LogDet { sign: if phase.re >= 0.0 { 1.0 } else { -1.0 }, log_abs })
}
