use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use gridarb::lp::solve;
use gridarb::market::{solve_horizon, Mode};
use gridarb_bench::{daily_problem, random_lp};

fn bench_daily_horizons(c: &mut Criterion) {
    let arbitrage = daily_problem(Mode::Arbitrage);
    c.bench_function("daily_arbitrage_24h", |b| {
        b.iter(|| solve_horizon(black_box(&arbitrage)).unwrap())
    });
    let joint = daily_problem(Mode::Joint);
    c.bench_function("daily_joint_24h", |b| {
        b.iter(|| solve_horizon(black_box(&joint)).unwrap())
    });
}

fn bench_random_lp(c: &mut Criterion) {
    for n in [20usize, 60, 100] {
        let p = random_lp(n, 7);
        c.bench_function(&format!("random_lp_{n}_vars"), |b| {
            b.iter(|| solve(black_box(&p)).unwrap())
        });
    }
}

criterion_group!(benches, bench_daily_horizons, bench_random_lp);
criterion_main!(benches);
