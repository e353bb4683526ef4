//! Seeded data-generating processes used as parameter-recovery oracles.
//! Every generator is a pure function of its arguments: the same seed
//! always yields the same path, on every platform.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

/// Fresh deterministic generator for the given seed.
pub fn rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Independent standard normal draws.
pub fn gaussian(n: usize, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    (0..n).map(|_| StandardNormal.sample(&mut r)).collect()
}

/// Pure random walk driven by standard normal innovations, starting at zero.
pub fn random_walk(n: usize, seed: u64) -> Vec<f64> {
    let mut level = 0.0;
    gaussian(n, seed)
        .into_iter()
        .map(|e| {
            level += e;
            level
        })
        .collect()
}

/// Stationary AR(1) with coefficient `phi`, started at zero.
pub fn ar1(phi: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut x = 0.0;
    gaussian(n, seed)
        .into_iter()
        .map(|e| {
            x = phi * x + e;
            x
        })
        .collect()
}

/// A cointegrated pair: `x` is a random walk and `y = intercept + slope x + u`
/// with `u` a stationary AR(1) disturbance.
pub fn cointegrated_pair(
    intercept: f64,
    slope: f64,
    u_phi: f64,
    n: usize,
    seed: u64,
) -> (Vec<f64>, Vec<f64>) {
    let x = random_walk(n, seed);
    let u = ar1(u_phi, n, seed.wrapping_add(0x9e3779b97f4a7c15));
    let y = x
        .iter()
        .zip(&u)
        .map(|(xi, ui)| intercept + slope * xi + ui)
        .collect();
    (y, x)
}

/// An error-correction system. `x` is a random walk; `y` adjusts toward the
/// equilibrium `y = x` with loading `adjustment` (negative for stability)
/// while also tracking `dx_loading` of the contemporaneous change in `x`.
/// `noise_sd` of zero gives an exactly deterministic relation. Returns
/// `(y, x)` levels.
pub fn ecm_system(
    adjustment: f64,
    dx_loading: f64,
    noise_sd: f64,
    n: usize,
    seed: u64,
) -> (Vec<f64>, Vec<f64>) {
    let ex = gaussian(n, seed);
    let ey = gaussian(n, seed.wrapping_add(0x517cc1b727220a95));
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    for t in 1..n {
        let dx = ex[t];
        x[t] = x[t - 1] + dx;
        let equilibrium_gap = y[t - 1] - x[t - 1];
        let dy = dx_loading * dx + adjustment * equilibrium_gap + noise_sd * ey[t];
        y[t] = y[t - 1] + dy;
    }
    (y, x)
}

/// A one-directional causal pair: `x` is AR(1) and `y` loads on lagged `x`.
/// Returns `(y, x)`.
pub fn causal_pair(x_phi: f64, y_phi: f64, loading: f64, n: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let ex = gaussian(n, seed);
    let ey = gaussian(n, seed.wrapping_add(0x2545f4914f6cdd1d));
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    for t in 1..n {
        x[t] = x_phi * x[t - 1] + ex[t];
        y[t] = y_phi * y[t - 1] + loading * x[t - 1] + ey[t];
    }
    (y, x)
}

/// A two-directional system in which each variable loads on the other at
/// `lag`. Used to exercise feedback detection. Returns `(y, x)`.
pub fn feedback_pair(loading: f64, lag: usize, n: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let ex = gaussian(n, seed);
    let ey = gaussian(n, seed.wrapping_add(0x6c62272e07bb0142));
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    for t in 1..n {
        let (xl, yl) = if t >= lag { (x[t - lag], y[t - lag]) } else { (0.0, 0.0) };
        x[t] = 0.2 * x[t - 1] + loading * yl + ex[t];
        y[t] = 0.2 * y[t - 1] + loading * xl + ey[t];
    }
    (y, x)
}
