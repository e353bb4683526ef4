//! Sequential vs parallel execution of the two batch-shaped workloads:
//! Monte Carlo GARCH fitting and the Granger lag scan. With the `parallel`
//! feature disabled both arms run the same sequential code path, so the
//! bench doubles as a regression check on the fallback.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use voltlab_core::causality::granger_scan;
use voltlab_core::exec::{run_batch, ExecMode};
use voltlab_core::sim;
use voltlab_core::volatility::{self, VolModelSpec, VolParams};

fn simulated_batch(n_series: usize, t_len: usize) -> Vec<Vec<f64>> {
    let spec = VolModelSpec::garch(1, 1).unwrap().without_mean_constant();
    let truth = VolParams::garch(0.05, vec![0.05], vec![0.90]);
    (0..n_series)
        .map(|i| volatility::simulate_values(&spec, &truth, t_len, 300, 7_000 + i as u64).unwrap())
        .collect()
}

fn bench_batch_garch_fits(c: &mut Criterion) {
    let spec = VolModelSpec::garch(1, 1).unwrap().without_mean_constant();
    let batch = simulated_batch(8, 1500);
    let mut group = c.benchmark_group("batch_garch_fits");
    group.sample_size(10);
    for mode in [ExecMode::Sequential, ExecMode::Parallel] {
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{mode:?}")),
            &mode,
            |b, &mode| {
                b.iter(|| {
                    let fits = run_batch(mode, batch.len(), |i| {
                        volatility::fit(&spec, &batch[i]).unwrap()
                    });
                    fits.iter().map(|f| f.log_likelihood).sum::<f64>()
                })
            },
        );
    }
    group.finish();
}

fn bench_granger_lag_scan(c: &mut Criterion) {
    let (y, x) = sim::causal_pair(0.3, 0.5, 0.8, 3000, 11);
    let mut group = c.benchmark_group("granger_lag_scan");
    for mode in [ExecMode::Sequential, ExecMode::Parallel] {
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{mode:?}")),
            &mode,
            |b, &mode| b.iter(|| granger_scan(&y, &x, 10, mode).unwrap()),
        );
    }
    group.finish();
}

criterion_group!(benches, bench_batch_garch_fits, bench_granger_lag_scan);
criterion_main!(benches);
