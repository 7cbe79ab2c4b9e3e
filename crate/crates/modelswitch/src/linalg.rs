//! Small dense matrix type and the symmetric positive-definite solver used
//! by the ridge machinery. Dimensions stay in the tens throughout the crate,
//! so everything is plain row-major `Vec<f64>` with no BLAS.

use crate::error::{Error, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let k = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(n * k);
        for r in &rows {
            if r.len() != k {
                return Err(Error::DimensionMismatch(format!(
                    "ragged rows: expected {k} columns, got {}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix {
            rows: n,
            cols: k,
            data,
        })
    }

    /// Identity matrix, mostly for tests and small oracles.
    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// X'X of the matrix, K x K.
    pub fn gram(&self) -> Matrix {
        let k = self.cols;
        let mut g = Matrix::zeros(k, k);
        for t in 0..self.rows {
            let x = self.row(t);
            for i in 0..k {
                let xi = x[i];
                if xi == 0.0 {
                    continue;
                }
                for j in i..k {
                    g[(i, j)] += xi * x[j];
                }
            }
        }
        for i in 0..k {
            for j in 0..i {
                g[(i, j)] = g[(j, i)];
            }
        }
        g
    }

    /// X'y of the matrix with a response vector.
    pub fn t_vec(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "X'y: {} rows vs {} responses",
                self.rows,
                y.len()
            )));
        }
        let mut out = vec![0.0; self.cols];
        for (t, yt) in y.iter().enumerate() {
            let x = self.row(t);
            for (o, xi) in out.iter_mut().zip(x) {
                *o += xi * yt;
            }
        }
        Ok(out)
    }

    /// X b, row-wise dot products.
    pub fn vec_mul(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "Xb: {} columns vs {} coefficients",
                self.cols,
                b.len()
            )));
        }
        Ok((0..self.rows).map(|t| dot(self.row(t), b)).collect())
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Lower Cholesky factor of a symmetric positive-definite matrix, in place.
/// On failure returns the pivot index where positive-definiteness broke.
pub fn cholesky(a: &mut Matrix) -> std::result::Result<(), usize> {
    let n = a.n_rows();
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= a[(j, k)] * a[(j, k)];
        }
        if d.is_nan() || d <= 0.0 || !d.is_finite() {
            return Err(j);
        }
        let d = d.sqrt();
        a[(j, j)] = d;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= a[(i, k)] * a[(j, k)];
            }
            a[(i, j)] = s / d;
        }
        for i in 0..j {
            a[(i, j)] = 0.0;
        }
    }
    Ok(())
}

/// Solve L L' x = b given the lower factor from [`cholesky`].
pub fn cholesky_solve(l: &Matrix, b: &[f64]) -> Vec<f64> {
    let n = l.n_rows();
    let mut x = b.to_vec();
    for i in 0..n {
        let mut s = x[i];
        for k in 0..i {
            s -= l[(i, k)] * x[k];
        }
        x[i] = s / l[(i, i)];
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in (i + 1)..n {
            s -= l[(k, i)] * x[k];
        }
        x[i] = s / l[(i, i)];
    }
    x
}
