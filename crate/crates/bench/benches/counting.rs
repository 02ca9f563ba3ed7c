use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ecag_core::chars::{char_sum_profile, char_sum_profile_naive};
use ecag_core::scan::select_curves;
use ecag_core::ssp::count_subset_sums_indices;
use ecag_core::{Field, GroupStructure};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn curve_over(q: u32) -> GroupStructure {
    let field = Field::of_order(q).unwrap();
    select_curves(&field, q as usize + 4, Some(1), 7).unwrap().remove(0)
}

fn random_subset(gs: &GroupStructure, n: usize, seed: u64) -> Vec<usize> {
    let mut pool: Vec<usize> = (1..gs.order()).collect();
    pool.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    pool.truncate(n);
    pool.sort_unstable();
    pool
}

fn subset_sum_dp(c: &mut Criterion) {
    let mut g = c.benchmark_group("subset_sum_dp");
    for q in [16u32, 64] {
        let gs = curve_over(q);
        let d = random_subset(&gs, q as usize + 2, 1);
        for k in [6, (q as usize + 2) / 2] {
            g.bench_with_input(BenchmarkId::new(format!("q{q}"), k), &k, |b, &k| {
                b.iter(|| count_subset_sums_indices(gs.group(), black_box(&d), k).unwrap())
            });
        }
    }
    g.finish();
}

fn character_profile(c: &mut Criterion) {
    let mut g = c.benchmark_group("character_profile");
    let gs = curve_over(181);
    let d = random_subset(&gs, gs.order() / 2, 2);
    g.bench_function("dft", |b| {
        b.iter(|| char_sum_profile(gs.group(), black_box(&d)).unwrap())
    });
    g.bench_function("naive", |b| {
        b.iter(|| char_sum_profile_naive(gs.group(), black_box(&d)).unwrap())
    });
    g.finish();
}

fn group_structure(c: &mut Criterion) {
    let mut g = c.benchmark_group("group_structure");
    for q in [64u32, 256] {
        let curve = curve_over(q).curve().clone();
        g.bench_function(BenchmarkId::from_parameter(q), |b| {
            b.iter(|| GroupStructure::new(black_box(&curve)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, subset_sum_dp, character_profile, group_structure);
criterion_main!(benches);
