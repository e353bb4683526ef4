//! Small dense matrix kernel: row-major storage, Householder QR,
//! Cholesky factorization, and a Jacobi eigensolver for symmetric matrices.
//! Sized for regression designs (hundreds of rows, tens of columns) and
//! the tiny symmetric problems that show up in rank testing.

use crate::error::{Error, Result};

/// Dense row-major matrix of f64.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Builds a matrix from equal-length column vectors.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Matrix> {
        if columns.is_empty() {
            return Err(Error::input("matrix needs at least one column"));
        }
        let rows = columns[0].len();
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::input("columns must all have the same length"));
        }
        let mut m = Matrix::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, *v);
            }
        }
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Matrix> {
        if rows.is_empty() {
            return Err(Error::input("matrix needs at least one row"));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::input("rows must all have the same length"));
        }
        let mut m = Matrix::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, *v);
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::input(format!(
                "matmul shape mismatch: {}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if self.cols != v.len() {
            return Err(Error::input("matvec shape mismatch"));
        }
        let mut out = vec![0.0; self.rows];
        for i in 0..self.rows {
            let mut acc = 0.0;
            for j in 0..self.cols {
                acc += self.get(i, j) * v[j];
            }
            out[i] = acc;
        }
        Ok(out)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let scale = self
            .data
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(1.0);
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if (self.get(i, j) - self.get(j, i)).abs() > tol * scale {
                    return false;
                }
            }
        }
        true
    }
}

/// QR factorization of a tall matrix by Householder reflections.
///
/// Returns the upper-triangular factor `R` (k by k) and `Q'y` for the
/// supplied right-hand side, which is what least squares needs.
pub fn qr_solve_prep(x: &Matrix, y: &[f64]) -> Result<(Matrix, Vec<f64>)> {
    let n = x.rows();
    let k = x.cols();
    if y.len() != n {
        return Err(Error::input("response length must match design rows"));
    }
    if n < k {
        return Err(Error::input(format!(
            "need at least as many rows ({n}) as columns ({k})"
        )));
    }
    let mut a = x.clone();
    let mut qty = y.to_vec();
    for j in 0..k {
        // Householder vector for column j below the diagonal.
        let mut norm = 0.0;
        for i in j..n {
            norm += a.get(i, j) * a.get(i, j);
        }
        norm = norm.sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if a.get(j, j) >= 0.0 { -norm } else { norm };
        let mut v = vec![0.0; n - j];
        v[0] = a.get(j, j) - alpha;
        for i in (j + 1)..n {
            v[i - j] = a.get(i, j);
        }
        let vnorm2: f64 = v.iter().map(|t| t * t).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        a.set(j, j, alpha);
        for i in (j + 1)..n {
            a.set(i, j, 0.0);
        }
        // Apply the reflection to the remaining columns and to y.
        for c in (j + 1)..k {
            let mut dot = 0.0;
            for i in j..n {
                dot += v[i - j] * a.get(i, c);
            }
            let scale = 2.0 * dot / vnorm2;
            for i in j..n {
                let val = a.get(i, c) - scale * v[i - j];
                a.set(i, c, val);
            }
        }
        let mut dot = 0.0;
        for i in j..n {
            dot += v[i - j] * qty[i];
        }
        let scale = 2.0 * dot / vnorm2;
        for i in j..n {
            qty[i] -= scale * v[i - j];
        }
    }
    let mut r = Matrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            r.set(i, j, a.get(i, j));
        }
    }
    Ok((r, qty))
}

/// Back substitution for an upper-triangular system `R b = z`.
pub fn solve_upper(r: &Matrix, z: &[f64]) -> Result<Vec<f64>> {
    let k = r.rows();
    let mut b = vec![0.0; k];
    for i in (0..k).rev() {
        let mut acc = z[i];
        for j in (i + 1)..k {
            acc -= r.get(i, j) * b[j];
        }
        let d = r.get(i, i);
        if d == 0.0 {
            return Err(Error::numeric(format!(
                "singular triangular system at row {i}"
            )));
        }
        b[i] = acc / d;
    }
    Ok(b)
}

/// Inverse of an upper-triangular matrix by repeated back substitution.
pub fn invert_upper(r: &Matrix) -> Result<Matrix> {
    let k = r.rows();
    let mut inv = Matrix::zeros(k, k);
    for j in 0..k {
        let mut e = vec![0.0; k];
        e[j] = 1.0;
        let col = solve_upper(r, &e)?;
        for i in 0..k {
            inv.set(i, j, col[i]);
        }
    }
    Ok(inv)
}

/// Cholesky factor L (lower triangular) of a symmetric positive definite matrix.
pub fn cholesky(a: &Matrix) -> Result<Matrix> {
    if a.rows() != a.cols() {
        return Err(Error::input("cholesky needs a square matrix"));
    }
    let n = a.rows();
    let mut l = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a.get(i, j);
            for k in 0..j {
                sum -= l.get(i, k) * l.get(j, k);
            }
            if i == j {
                if sum <= 0.0 {
                    return Err(Error::numeric(format!(
                        "matrix not positive definite at pivot {i}"
                    )));
                }
                l.set(i, j, sum.sqrt());
            } else {
                l.set(i, j, sum / l.get(j, j));
            }
        }
    }
    Ok(l)
}

/// Solves A x = b given the Cholesky factor L of A.
pub fn cholesky_solve(l: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = l.rows();
    if b.len() != n {
        return Err(Error::input("cholesky_solve shape mismatch"));
    }
    // Forward then backward substitution.
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut acc = b[i];
        for j in 0..i {
            acc -= l.get(i, j) * y[j];
        }
        y[i] = acc / l.get(i, i);
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = y[i];
        for j in (i + 1)..n {
            acc -= l.get(j, i) * x[j];
        }
        x[i] = acc / l.get(i, i);
    }
    Ok(x)
}

/// Inverse of a symmetric positive definite matrix via its Cholesky factor.
pub fn spd_inverse(a: &Matrix) -> Result<Matrix> {
    let l = cholesky(a)?;
    let n = a.rows();
    let mut inv = Matrix::zeros(n, n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let col = cholesky_solve(&l, &e)?;
        for i in 0..n {
            inv.set(i, j, col[i]);
        }
    }
    Ok(inv)
}

/// Eigenvalues and eigenvectors of a symmetric matrix via cyclic Jacobi
/// rotations. Returns values in descending order with matching columns.
pub fn jacobi_eigen_sym(a: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    if a.rows() != a.cols() {
        return Err(Error::input("eigensolver needs a square matrix"));
    }
    let n = a.rows();
    let mut m = a.clone();
    let mut v = Matrix::identity(n);
    let max_sweeps = 60;
    for _ in 0..max_sweeps {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m.get(i, j) * m.get(i, j);
            }
        }
        if off.sqrt() < 1e-14 * (1.0 + frobenius(&m)) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m.set(k, p, c * mkp - s * mkq);
                    m.set(k, q, s * mkp + c * mkq);
                }
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m.set(p, k, c * mpk - s * mqk);
                    m.set(q, k, s * mpk + c * mqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    let mut pairs: Vec<(f64, usize)> = (0..n).map(|i| (m.get(i, i), i)).collect();
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let values: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (newcol, (_, oldcol)) in pairs.iter().enumerate() {
        for i in 0..n {
            vectors.set(i, newcol, v.get(i, *oldcol));
        }
    }
    Ok((values, vectors))
}

fn frobenius(m: &Matrix) -> f64 {
    m.data.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matmul_identity_roundtrip() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let i = Matrix::identity(2);
        assert_eq!(a.matmul(&i).unwrap(), a);
    }

    #[test]
    fn cholesky_reconstructs() {
        let a = Matrix::from_rows(&[
            vec![4.0, 2.0, 0.6],
            vec![2.0, 5.0, 1.2],
            vec![0.6, 1.2, 3.0],
        ])
        .unwrap();
        let l = cholesky(&a).unwrap();
        let back = l.matmul(&l.transpose()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((back.get(i, j) - a.get(i, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(cholesky(&a).is_err());
    }

    #[test]
    fn jacobi_diagonal_matrix() {
        let a = Matrix::from_rows(&[
            vec![3.0, 0.0, 0.0],
            vec![0.0, -1.0, 0.0],
            vec![0.0, 0.0, 7.0],
        ])
        .unwrap();
        let (vals, _) = jacobi_eigen_sym(&a).unwrap();
        assert!((vals[0] - 7.0).abs() < 1e-12);
        assert!((vals[1] - 3.0).abs() < 1e-12);
        assert!((vals[2] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn jacobi_eigenpairs_satisfy_definition() {
        let a = Matrix::from_rows(&[
            vec![2.0, 1.0, 0.3],
            vec![1.0, 2.5, -0.4],
            vec![0.3, -0.4, 1.8],
        ])
        .unwrap();
        let (vals, vecs) = jacobi_eigen_sym(&a).unwrap();
        for j in 0..3 {
            let v = vecs.column(j);
            let av = a.matvec(&v).unwrap();
            for i in 0..3 {
                assert!(
                    (av[i] - vals[j] * v[i]).abs() < 1e-10,
                    "eigenpair {j} violated at row {i}"
                );
            }
        }
    }

    #[test]
    fn qr_solves_exact_system() {
        let x = Matrix::from_columns(&[vec![1.0; 4], vec![1.0, 2.0, 3.0, 4.0]]).unwrap();
        let y = vec![3.0, 5.0, 7.0, 9.0];
        let (r, qty) = qr_solve_prep(&x, &y).unwrap();
        let beta = solve_upper(&r, &qty[..2]).unwrap();
        assert!((beta[0] - 1.0).abs() < 1e-12);
        assert!((beta[1] - 2.0).abs() < 1e-12);
    }
}
