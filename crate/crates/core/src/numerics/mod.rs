//! Shared numerical kernel: least squares, quasi-Newton minimization,
//! finite differences, a small generalized eigensolver, and distribution
//! functions. Everything here is deterministic and allocation-light.

pub mod dist;
pub mod mat;
mod ols;
mod optimize;

pub use dist::{chi2_cdf, dist_cdf, f_cdf, normal_cdf, normal_two_sided_p, quantile_by_bisection, Dist};
pub use mat::{spd_inverse, Matrix};
pub use ols::{ols, OlsFit};
pub use optimize::{fd_gradient, fd_hessian, minimize, MinimizeOptions, Optimum};

use crate::error::{Error, Result};
use mat::{cholesky, jacobi_eigen_sym, solve_upper};

/// Solves the generalized symmetric eigenproblem `A v = lambda B v` for
/// small matrices (at most 4 by 4), with `B` positive definite.
///
/// Returns eigenvalues in descending order and the matching eigenvectors
/// as columns, normalized so that `v' B v = 1`.
pub fn gen_eigen_sym(a: &Matrix, b: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    let k = a.rows();
    if a.cols() != k || b.rows() != k || b.cols() != k {
        return Err(Error::input("gen_eigen_sym needs square matrices of equal size"));
    }
    if k == 0 || k > 4 {
        return Err(Error::input(format!("gen_eigen_sym supports sizes 1 through 4, got {k}")));
    }
    if !a.is_symmetric(1e-8) || !b.is_symmetric(1e-8) {
        return Err(Error::input("gen_eigen_sym needs symmetric matrices"));
    }
    // Reduce to a standard problem: with B = L L', solve
    // (L^{-1} A L^{-T}) w = lambda w and map back v = L^{-T} w.
    let l = cholesky(b).map_err(|_| Error::numeric("matrix B is not positive definite"))?;

    // C = L^{-1} A L^{-T}, built column by column with triangular solves.
    let mut linv_a = Matrix::zeros(k, k);
    for j in 0..k {
        let col = a.column(j);
        let solved = forward_solve(&l, &col)?;
        for i in 0..k {
            linv_a.set(i, j, solved[i]);
        }
    }
    let mut c = Matrix::zeros(k, k);
    for i in 0..k {
        let row: Vec<f64> = (0..k).map(|j| linv_a.get(i, j)).collect();
        let solved = forward_solve(&l, &row)?;
        for j in 0..k {
            c.set(i, j, solved[j]);
        }
    }
    // Symmetrize against rounding before the Jacobi sweep.
    for i in 0..k {
        for j in (i + 1)..k {
            let avg = 0.5 * (c.get(i, j) + c.get(j, i));
            c.set(i, j, avg);
            c.set(j, i, avg);
        }
    }
    let (values, w) = jacobi_eigen_sym(&c)?;
    // v = L^{-T} w, an upper-triangular solve with L'.
    let lt = l.transpose();
    let mut vectors = Matrix::zeros(k, k);
    for j in 0..k {
        let col = w.column(j);
        let solved = solve_upper(&lt, &col)?;
        for i in 0..k {
            vectors.set(i, j, solved[i]);
        }
    }
    Ok((values, vectors))
}

fn forward_solve(l: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = l.rows();
    let mut x = vec![0.0; n];
    for i in 0..n {
        let mut acc = b[i];
        for j in 0..i {
            acc -= l.get(i, j) * x[j];
        }
        let d = l.get(i, i);
        if d == 0.0 {
            return Err(Error::numeric("singular triangular factor"));
        }
        x[i] = acc / d;
    }
    Ok(x)
}
