use std::sync::Arc;

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use fractalcss::code::{css_from_complex, logical_count, CssCode, PauliType};
use fractalcss::complex::{build_fractal, FractalSpec};
use fractalcss::distance::{dx_min_cut, dz_shortest_path, exhaustive_low_weight};
use fractalcss::gates::{build_vasmer_browne_stack, check_transversal_ccz};
use fractalcss::gf2::Gf2Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Gf2Matrix {
    let supports: Vec<Vec<usize>> = (0..rows)
        .map(|_| (0..cols).filter(|_| rng.gen_bool(0.5)).collect())
        .collect();
    Gf2Matrix::from_supports(cols, &supports)
}

fn fc_code(level: usize) -> CssCode {
    let c = build_fractal(&FractalSpec::new(3, 3, 1, level), 1).unwrap();
    css_from_complex(Arc::new(c), 1).unwrap()
}

fn rank(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut g = c.benchmark_group("rank");
    for size in [128, 512, 1024] {
        let m = random_matrix(size, size, &mut rng);
        g.bench_with_input(BenchmarkId::from_parameter(size), &m, |b, m| {
            b.iter(|| black_box(m.rank()))
        });
    }
    g.finish();
}

fn distances(c: &mut Criterion) {
    let mut g = c.benchmark_group("distance");
    g.sample_size(10);
    for level in [1, 2] {
        let code = fc_code(level);
        g.bench_with_input(BenchmarkId::new("logical_count", level), &code, |b, q| {
            b.iter(|| logical_count(q))
        });
        g.bench_with_input(
            BenchmarkId::new("dz_shortest_path", level),
            &code,
            |b, q| b.iter(|| dz_shortest_path(q).unwrap()),
        );
        g.bench_with_input(BenchmarkId::new("dx_min_cut", level), &code, |b, q| {
            b.iter(|| dx_min_cut(q).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("exhaustive_z_w3", level), &code, |b, q| {
            b.iter(|| exhaustive_low_weight(q, PauliType::Z, 3).unwrap())
        });
    }
    g.finish();
}

fn gates(c: &mut Criterion) {
    let mut g = c.benchmark_group("gates");
    g.sample_size(10);
    for side in [2, 3] {
        let st = build_vasmer_browne_stack(side, None).unwrap();
        g.bench_with_input(BenchmarkId::new("ccz_conditions", side), &st, |b, st| {
            b.iter(|| {
                check_transversal_ccz(&st.codes[0], &st.codes[1], &st.codes[2], &st.align).unwrap()
            })
        });
    }
    g.finish();
}

criterion_group!(benches, rank, distances, gates);
criterion_main!(benches);
