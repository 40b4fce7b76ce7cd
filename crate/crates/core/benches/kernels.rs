//! Kernel benchmarks comparing the rayon data-parallel build against the
//! sequential fallback.
//!
//! Run both and diff the groups:
//!
//! ```text
//!   cargo bench -p nls-core                          # parallel/...
//!   cargo bench -p nls-core --no-default-features    # sequential/...
//! ```
//!
//! Group names carry the mode so the two sets of results land side by side
//! in criterion's report directory.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use nls_core::diagnostics::decay_ratio_curve;
use nls_core::exec;
use nls_core::exponents::{exponent_set, PhysParams};
use nls_core::propagator::{evolve, strang_step, StepperConfig};
use nls_core::{Field, Grid, SpectralEngine};

const MODE: &str = if cfg!(feature = "parallel") { "parallel" } else { "sequential" };

fn bench_fft(c: &mut Criterion) {
    let mut group = c.benchmark_group(format!("{MODE}/fft_roundtrip"));
    for m in [4096usize, 16384] {
        let grid = Grid::new_1d(m, 40.0).unwrap();
        let eng = SpectralEngine::new(grid.clone());
        let f = Field::gaussian(grid, 1.0, 1.0).unwrap();
        group.bench_with_input(BenchmarkId::new("1d", m), &f, |b, f| {
            b.iter(|| {
                let mut vals = f.values().to_vec();
                eng.forward_values(&mut vals);
                eng.inverse_values(&mut vals);
                vals
            })
        });
    }
    let grid = Grid::new_2d(256, 30.0).unwrap();
    let eng = SpectralEngine::new(grid.clone());
    let f = Field::gaussian(grid, 1.0, 1.0).unwrap();
    group.bench_function("2d_256", |b| {
        b.iter(|| {
            let mut vals = f.values().to_vec();
            eng.forward_values(&mut vals);
            eng.inverse_values(&mut vals);
            vals
        })
    });
    group.finish();
}

fn bench_strang_step(c: &mut Criterion) {
    let mut group = c.benchmark_group(format!("{MODE}/strang_step"));
    let params = PhysParams::focusing(1, 4.0).unwrap();
    for m in [4096usize, 16384] {
        let grid = Grid::new_1d(m, 80.0).unwrap();
        let eng = SpectralEngine::new(grid.clone());
        let f = Field::gaussian(grid, 1.0, 1.0).unwrap();
        group.bench_with_input(BenchmarkId::new("1d", m), &f, |b, f| {
            b.iter(|| strang_step(f, 1e-3, &params, &eng).unwrap())
        });
    }
    let params2 = PhysParams::focusing(2, 2.7).unwrap();
    let grid = Grid::new_2d(256, 30.0).unwrap();
    let eng = SpectralEngine::new(grid.clone());
    let f = Field::gaussian(grid, 1.0, 1.0).unwrap();
    group.bench_function("2d_256", |b| {
        b.iter(|| strang_step(&f, 1e-3, &params2, &eng).unwrap())
    });
    group.finish();
}

fn bench_probe_batch(c: &mut Criterion) {
    // four independent short evolutions, the shape of a sweep stage
    let mut group = c.benchmark_group(format!("{MODE}/probe_batch"));
    group.sample_size(10);
    let params = PhysParams::focusing(1, 4.0).unwrap();
    let grid = Grid::new_1d(1024, 40.0).unwrap();
    let amps = [0.2, 0.4, 0.6, 0.8];
    group.bench_function("evolve_x4", |b| {
        b.iter(|| {
            exec::map_ordered(&amps, |&a| {
                let eng = SpectralEngine::new(grid.clone());
                let f = Field::gaussian(grid.clone(), a, 1.0).unwrap();
                let cfg = StepperConfig {
                    dt: 1e-3,
                    t_final: 1.0,
                    snapshot_stride: 200,
                    ..Default::default()
                };
                evolve(&f, &cfg, &params, &eng, |_, _, _| {}).unwrap().final_time()
            })
        })
    });
    group.finish();
}

fn bench_decay_curve(c: &mut Criterion) {
    let mut group = c.benchmark_group(format!("{MODE}/decay_curve"));
    group.sample_size(10);
    let params = PhysParams::focusing(1, 4.0).unwrap();
    let exps = exponent_set(&params).unwrap();
    let grid = Grid::new_1d(8192, 320.0).unwrap();
    let eng = SpectralEngine::new(grid.clone());
    let f = Field::gaussian(grid, 1.0, 1.0).unwrap();
    let ts: Vec<f64> = (0..64).map(|i| 0.5 + i as f64 * 0.5).collect();
    group.bench_function("gaussian_64pts", |b| {
        b.iter(|| decay_ratio_curve(&f, &exps, &ts, &eng).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_fft, bench_strang_step, bench_probe_batch, bench_decay_curve);
criterion_main!(benches);
