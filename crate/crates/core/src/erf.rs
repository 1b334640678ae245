//! Complementary error function, accurate to better than 1e-12 relative.
//!
//! Taylor series of `erf` for small arguments, Lentz continued fraction for
//! the tail. Self-contained so the SER path has no external special-function
//! dependency.

const SQRT_PI: f64 = 1.7724538509055160272981674833411452;

/// `erfc(x) = 1 - erf(x)` for all finite real `x`.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x == 0.0 {
        return 1.0;
    }
    if x >= 27.0 {
        // erfc(27) ~ 1e-318: below the smallest positive normal f64.
        return 0.0;
    }
    if x < 2.0 {
        1.0 - erf_series(x)
    } else {
        erfc_continued_fraction(x)
    }
}

/// Taylor series: `erf(x) = (2/sqrt(pi)) sum (-1)^n x^(2n+1) / (n! (2n+1))`.
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 1.0;
    loop {
        term *= -x2 / n;
        let contrib = term / (2.0 * n + 1.0);
        sum += contrib;
        if contrib.abs() < 1e-18 * sum.abs() || n > 200.0 {
            break;
        }
        n += 1.0;
    }
    2.0 / SQRT_PI * sum
}

/// Modified Lentz evaluation of
/// `erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))`.
fn erfc_continued_fraction(x: f64) -> f64 {
    let tiny = 1e-300;
    let mut f = x.max(tiny);
    let mut c = f;
    let mut d = 0.0;
    let mut k = 1.0;
    for _ in 0..300 {
        let a = 0.5 * k; // numerators 1/2, 1, 3/2, 2, ...
        let b = x;
        d = b + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
        k += 1.0;
    }
    (-x * x).exp() / (SQRT_PI * f)
}
