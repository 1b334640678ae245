//! Compares the rayon fan-out against the sequential fallback on a
//! representative Monte Carlo batch: draw a channel pair, allocate power for
//! identity coding, and evaluate the link metrics.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use secwave::channel::ChannelRealization;
use secwave::exec;
use secwave::power::{allocate, BisectionConfig};
use secwave::sigproc::ComplexVector;
use secwave::waveform::{evaluate_link, SecureCodingMatrix};

const N: usize = 16;

fn draw_channel(seed: u64, scale: f64) -> ChannelRealization {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let taps = ComplexVector::from_fn(4, |i| {
        let amp = if i == 0 { 0.9 } else { 0.18 };
        Complex64::new(
            scale * amp * rng.gen_range(0.5..1.0),
            scale * amp * rng.gen_range(-1.0..1.0),
        )
    });
    ChannelRealization::from_taps(taps, N, 0.05).unwrap()
}

fn one_draw(i: usize) -> f64 {
    let bob = draw_channel(2 * i as u64, 1.0);
    let eve = draw_channel(2 * i as u64 + 1, 0.56);
    let m = SecureCodingMatrix::identity(N);
    let cfg = BisectionConfig::new(0.4, 1e-3, 200, 2.0).unwrap();
    let alloc = allocate(&eve, &m, &cfg).unwrap();
    evaluate_link(&bob, &eve, &m, &alloc.power)
        .unwrap()
        .sum_secrecy_rate
}

fn bench_monte_carlo(c: &mut Criterion) {
    let mut group = c.benchmark_group("monte_carlo_draws");
    for draws in [64usize, 256] {
        group.bench_with_input(BenchmarkId::new("sequential", draws), &draws, |b, &d| {
            b.iter(|| {
                exec::map_indexed_sequential(d, one_draw)
                    .iter()
                    .sum::<f64>()
            })
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("parallel", draws), &draws, |b, &d| {
            b.iter(|| exec::map_indexed_parallel(d, one_draw).iter().sum::<f64>())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_monte_carlo);
criterion_main!(benches);
