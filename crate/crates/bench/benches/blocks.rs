use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use chiral_blocks::blocks::conformal_block_dim;
use chiral_blocks::fock::{invariant_functional_dim, InvarianceMode, WFin};
use chiral_blocks::spectra::assemble_w;
use chiral_blocks::GaussScalar;

fn units(m: usize) -> Vec<Vec<GaussScalar>> {
    (0..m).map(|a| (0..m).map(|b| GaussScalar::from_i64((a == b) as i64)).collect()).collect()
}

fn blocks(c: &mut Criterion) {
    let w = WFin::from_basis(&assemble_w(1, 1).unwrap());
    let gens = units(w.dim());
    let mut group = c.benchmark_group("invariance");
    group.sample_size(10);
    for mode in [InvarianceMode::Group, InvarianceMode::Infinitesimal] {
        group.bench_function(format!("k=1 N=1 D=3 {mode:?}"), |b| {
            b.iter(|| invariant_functional_dim(&w, black_box(3), &gens, mode).unwrap())
        });
    }
    // the spectral data is cached after the first call; this times the solver path
    group.bench_function("conformal_block_dim(0, 0, 4, 5)", |b| {
        b.iter(|| conformal_block_dim(0, 0, 4, black_box(5)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, blocks);
criterion_main!(benches);
