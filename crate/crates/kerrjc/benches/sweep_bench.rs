//! Grid-evaluation throughput: serial vs data-parallel paths of
//! `sweep::evaluate_grid` on the two heaviest per-point workloads, the
//! numeric decoherence factor and exact transfer-probability propagation.
//!
//! Run with `cargo bench -p kerrjc`. Building with
//! `--no-default-features` removes the rayon path, in which case the
//! "parallel" rows measure the sequential fallback.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use kerrjc::decoherence::BranchEvolution;
use kerrjc::fock::{FockSpace, StateVector};
use kerrjc::model::{self, CompositeSpace, SystemParams};
use kerrjc::numerics::Propagator;
use kerrjc::sweep::{evaluate_grid, ExecMode};
use kerrjc::C64;

const GRID_POINTS: usize = 512;

fn time_grid() -> Vec<f64> {
    (0..GRID_POINTS)
        .map(|i| 8.0 * std::f64::consts::PI * i as f64 / (GRID_POINTS - 1) as f64)
        .collect()
}

fn modes() -> [(ExecMode, &'static str); 2] {
    [
        (ExecMode::Serial, "serial"),
        (ExecMode::Parallel, "parallel"),
    ]
}

fn bench_decoherence_grid(c: &mut Criterion) {
    let mut group = c.benchmark_group("decoherence_factor_grid");
    group.sample_size(10);
    let grid = time_grid();
    for &dim in &[64usize, 256] {
        let space = FockSpace::new(dim).unwrap();
        let params = SystemParams::resonant(1.0, 0.2, 0.02).unwrap();
        let engine = BranchEvolution::new(&params, space).unwrap();
        for (mode, name) in modes() {
            group.bench_with_input(BenchmarkId::new(name, dim), &dim, |b, _| {
                b.iter(|| evaluate_grid(&grid, |t| engine.decoherence_factor(t), mode).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_transfer_oracle_grid(c: &mut Criterion) {
    let mut group = c.benchmark_group("transfer_oracle_grid");
    group.sample_size(10);
    let grid = time_grid();
    for &dim in &[32usize, 128] {
        let cs = CompositeSpace::new(FockSpace::new(dim).unwrap());
        let params = SystemParams::resonant(1.0, 0.2, 0.02).unwrap();
        let prop = Propagator::new(&model::rwa_hamiltonian(&params, &cs));
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        let psi0 = cs
            .product_state(
                C64::new(inv_sqrt2, 0.0),
                C64::new(inv_sqrt2, 0.0),
                &StateVector::vacuum(cs.resonator()),
            )
            .unwrap();
        for (mode, name) in modes() {
            group.bench_with_input(BenchmarkId::new(name, dim), &dim, |b, _| {
                b.iter(|| {
                    evaluate_grid(
                        &grid,
                        |t| {
                            let psi_t = prop.propagate(t, &psi0)?;
                            Ok(psi_t.amplitude(cs.index(0, 0)).norm_sqr()
                                + psi_t.amplitude(cs.index(0, 1)).norm_sqr())
                        },
                        mode,
                    )
                    .unwrap()
                })
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_decoherence_grid, bench_transfer_oracle_grid);
criterion_main!(benches);
