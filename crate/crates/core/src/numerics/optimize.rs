//! Unconstrained minimization: BFGS with finite-difference gradients,
//! falling back to a Nelder-Mead restart when the line search stalls.
//! The objective may return +infinity to reject a trial point; NaN is
//! treated as an error. Identical inputs produce identical iterates.

use crate::error::{Error, Result};
use crate::numerics::mat::Matrix;

/// Tuning knobs for [`minimize`].
#[derive(Debug, Clone)]
pub struct MinimizeOptions {
    /// Stop when the max-norm of the finite-difference gradient drops below this.
    pub grad_tol: f64,
    /// Iteration cap across BFGS cycles.
    pub max_iter: usize,
    /// Base step for finite-difference gradients.
    pub fd_step: f64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions {
            grad_tol: 1e-6,
            max_iter: 600,
            fd_step: 1e-5,
        }
    }
}

/// Result of a minimization run.
#[derive(Debug, Clone)]
pub struct Optimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub n_evals: usize,
    pub converged: bool,
    pub gradient_norm: f64,
}

/// Central-difference gradient with per-component step
/// `h_i = max(step, 1e-7 |x_i|)`. Errors if any evaluation is non-finite.
pub fn fd_gradient<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x: &[f64],
    step: f64,
) -> Result<Vec<f64>> {
    let mut g = vec![0.0; x.len()];
    let mut xp = x.to_vec();
    for i in 0..x.len() {
        let h = step.max(1e-7 * x[i].abs());
        xp[i] = x[i] + h;
        let fp = f(&xp);
        xp[i] = x[i] - h;
        let fm = f(&xp);
        xp[i] = x[i];
        if !fp.is_finite() || !fm.is_finite() {
            return Err(Error::numeric(format!(
                "non-finite objective near component {i} of {x:?}"
            )));
        }
        g[i] = (fp - fm) / (2.0 * h);
    }
    Ok(g)
}

/// Central second differences; returns the symmetric Hessian matrix.
pub fn fd_hessian<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x: &[f64],
    step: f64,
) -> Result<Matrix> {
    let n = x.len();
    let h: Vec<f64> = x.iter().map(|xi| step.max(1e-6 * xi.abs())).collect();
    let f0 = f(x);
    if !f0.is_finite() {
        return Err(Error::numeric("non-finite objective at expansion point"));
    }
    let mut hess = Matrix::zeros(n, n);
    let mut xp = x.to_vec();
    for i in 0..n {
        xp[i] = x[i] + h[i];
        let fp = f(&xp);
        xp[i] = x[i] - h[i];
        let fm = f(&xp);
        xp[i] = x[i];
        if !fp.is_finite() || !fm.is_finite() {
            return Err(Error::numeric(format!("non-finite objective at diagonal {i}")));
        }
        hess.set(i, i, (fp - 2.0 * f0 + fm) / (h[i] * h[i]));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            xp[i] = x[i] + h[i];
            xp[j] = x[j] + h[j];
            let fpp = f(&xp);
            xp[j] = x[j] - h[j];
            let fpm = f(&xp);
            xp[i] = x[i] - h[i];
            xp[j] = x[j] + h[j];
            let fmp = f(&xp);
            xp[j] = x[j] - h[j];
            let fmm = f(&xp);
            xp[i] = x[i];
            xp[j] = x[j];
            if ![fpp, fpm, fmp, fmm].iter().all(|v| v.is_finite()) {
                return Err(Error::numeric(format!(
                    "non-finite objective at off-diagonal ({i}, {j})"
                )));
            }
            let v = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
            hess.set(i, j, v);
            hess.set(j, i, v);
        }
    }
    Ok(hess)
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Minimizes `f` starting from `x0`.
///
/// Runs BFGS with an Armijo backtracking line search. If the line search
/// cannot make progress the search restarts from the incumbent with a
/// small Nelder-Mead polish, then resumes BFGS. The returned optimum
/// carries the finite-difference gradient norm at the final point.
pub fn minimize<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    opts: &MinimizeOptions,
) -> Result<Optimum> {
    fn eval<F: FnMut(&[f64]) -> f64>(
        f: &mut F,
        x: &[f64],
        n_evals: &mut usize,
    ) -> Result<f64> {
        *n_evals += 1;
        let v = f(x);
        if v.is_nan() {
            return Err(Error::numeric(format!("objective returned NaN at {x:?}")));
        }
        Ok(v)
    }

    if x0.is_empty() {
        return Err(Error::input("minimize needs at least one variable"));
    }
    let mut n_evals = 0usize;
    let fx0 = eval(&mut f, x0, &mut n_evals)?;
    if !fx0.is_finite() {
        return Err(Error::numeric(format!(
            "objective not finite at starting point {x0:?}"
        )));
    }

    let n = x0.len();
    let mut x = x0.to_vec();
    let mut fx = fx0;
    let mut iterations = 0usize;
    let mut restarts_left = 2usize;
    let mut stalled = 0usize;

    'outer: loop {
        let mut g = match fd_gradient(
            |p| {
                n_evals += 1;
                f(p)
            },
            &x,
            opts.fd_step,
        ) {
            Ok(g) => g,
            Err(_) if restarts_left > 0 => {
                restarts_left -= 1;
                let (nx, nfx, ne) = nelder_mead(&mut f, &x, fx, 0.25, 200 * n);
                n_evals += ne;
                if nfx < fx {
                    x = nx;
                    fx = nfx;
                }
                continue 'outer;
            }
            Err(e) => return Err(e),
        };
        let mut h_inv = Matrix::identity(n);

        loop {
            let gnorm = max_norm(&g);
            if gnorm <= opts.grad_tol {
                return Ok(Optimum {
                    point: x,
                    value: fx,
                    iterations,
                    n_evals,
                    converged: true,
                    gradient_norm: gnorm,
                });
            }
            if iterations >= opts.max_iter {
                return Ok(Optimum {
                    point: x,
                    value: fx,
                    iterations,
                    n_evals,
                    converged: false,
                    gradient_norm: gnorm,
                });
            }
            iterations += 1;

            let mut dir = h_inv.matvec(&g).unwrap();
            for d in dir.iter_mut() {
                *d = -*d;
            }
            let mut slope: f64 = dir.iter().zip(&g).map(|(d, gi)| d * gi).sum();
            if !(slope < 0.0) {
                // Not a descent direction; reset the curvature model.
                h_inv = Matrix::identity(n);
                dir = g.iter().map(|gi| -gi).collect();
                slope = -g.iter().map(|gi| gi * gi).sum::<f64>();
            }

            // Armijo backtracking.
            let mut t = 1.0;
            let mut accepted: Option<(Vec<f64>, f64)> = None;
            for _ in 0..50 {
                let cand: Vec<f64> =
                    x.iter().zip(&dir).map(|(xi, di)| xi + t * di).collect();
                let fc = eval(&mut f, &cand, &mut n_evals)?;
                if fc.is_finite() && fc <= fx + 1e-4 * t * slope {
                    accepted = Some((cand, fc));
                    break;
                }
                t *= 0.5;
            }

            let (x_new, fx_new) = match accepted {
                Some(p) => p,
                None => {
                    // Line search stalled: polish with a simplex restart.
                    if restarts_left == 0 {
                        return Ok(Optimum {
                            point: x,
                            value: fx,
                            iterations,
                            n_evals,
                            converged: gnorm <= opts.grad_tol,
                            gradient_norm: gnorm,
                        });
                    }
                    restarts_left -= 1;
                    let (nx, nfx, ne) = nelder_mead(&mut f, &x, fx, 0.05, 300 * n);
                    n_evals += ne;
                    if nfx < fx - 1e-15 * (1.0 + fx.abs()) {
                        x = nx;
                        fx = nfx;
                        continue 'outer;
                    }
                    let gn = max_norm(&g);
                    return Ok(Optimum {
                        point: x,
                        value: fx,
                        iterations,
                        n_evals,
                        converged: gn <= opts.grad_tol,
                        gradient_norm: gn,
                    });
                }
            };

            let g_new = fd_gradient(
                |p| {
                    n_evals += 1;
                    f(p)
                },
                &x_new,
                opts.fd_step,
            )?;

            // Accepted steps that no longer move the objective mean the
            // iterate is creeping along the finite-difference noise floor.
            // Stop early only once the gradient is within a couple of
            // orders of the requested tolerance; a flat stretch with a
            // large gradient still deserves more iterations, up to a cap.
            if fx - fx_new <= 1e-12 * (1.0 + fx.abs()) {
                stalled += 1;
            } else {
                stalled = 0;
            }
            let gn_new = max_norm(&g_new);
            if (stalled >= 5 && gn_new <= 20.0 * opts.grad_tol) || stalled >= 50 {
                return Ok(Optimum {
                    point: x_new,
                    value: fx_new,
                    iterations,
                    n_evals,
                    converged: gn_new <= opts.grad_tol,
                    gradient_norm: gn_new,
                });
            }

            // BFGS inverse-Hessian update.
            let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
            let yv: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
            let sy: f64 = s.iter().zip(&yv).map(|(a, b)| a * b).sum();
            if sy > 1e-12 * max_norm(&s).max(1e-30) * max_norm(&yv).max(1e-30) {
                let rho = 1.0 / sy;
                // H <- (I - rho s y') H (I - rho y s') + rho s s'
                let hy = h_inv.matvec(&yv).unwrap();
                let yhy: f64 = yv.iter().zip(&hy).map(|(a, b)| a * b).sum();
                for i in 0..n {
                    for j in 0..n {
                        let v = h_inv.get(i, j)
                            - rho * (s[i] * hy[j] + hy[i] * s[j])
                            + rho * rho * yhy * s[i] * s[j]
                            + rho * s[i] * s[j];
                        h_inv.set(i, j, v);
                    }
                }
            }
            x = x_new;
            fx = fx_new;
            g = g_new;
        }
    }
}

/// Plain Nelder-Mead used both as a line-search fallback and as a polish
/// step. Returns the best point, its value, and the evaluation count.
fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    f: &mut F,
    x0: &[f64],
    fx0: f64,
    scale: f64,
    max_iter: usize,
) -> (Vec<f64>, f64, usize) {
    let n = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), fx0));
    for i in 0..n {
        let mut p = x0.to_vec();
        let delta = if p[i] != 0.0 {
            scale * p[i].abs()
        } else {
            scale * 0.1
        };
        p[i] += delta;
        let fp = eval(&p, &mut evals);
        simplex.push((p, fp));
    }
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        let best = simplex[0].1;
        let worst = simplex[n].1;
        if (worst - best).abs() <= 1e-12 * (1.0 + best.abs()) {
            break;
        }
        let mut centroid = vec![0.0; n];
        for (p, _) in simplex.iter().take(n) {
            for i in 0..n {
                centroid[i] += p[i] / n as f64;
            }
        }
        let reflect: Vec<f64> = centroid
            .iter()
            .zip(&simplex[n].0)
            .map(|(c, w)| c + alpha * (c - w))
            .collect();
        let fr = eval(&reflect, &mut evals);
        if fr < simplex[0].1 {
            let expand: Vec<f64> = centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + gamma * (c - w))
                .collect();
            let fe = eval(&expand, &mut evals);
            simplex[n] = if fe < fr { (expand, fe) } else { (reflect, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (reflect, fr);
        } else {
            let contract: Vec<f64> = centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + rho * (w - c))
                .collect();
            let fc = eval(&contract, &mut evals);
            if fc < simplex[n].1 {
                simplex[n] = (contract, fc);
            } else {
                let best_point = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let shrunk: Vec<f64> = best_point
                        .iter()
                        .zip(&entry.0)
                        .map(|(b, p)| b + sigma * (p - b))
                        .collect();
                    let fs = eval(&shrunk, &mut evals);
                    *entry = (shrunk, fs);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    (simplex[0].0.clone(), simplex[0].1, evals)
}
