//! Secure coding applied to source symbols, reception at Bob and Eve, and
//! per-subcarrier SINR, SER, and secrecy-rate metrics.
//!
//! Power accounting uses the row energy `E_k = sum_n |M_{k,n}|^2` by default
//! (the expected transmit power per subcarrier for independent unit-power
//! symbols); the coherent `|sum_n M_{k,n}|^2` form stays selectable via
//! [`PowerConvention`].

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::channel::ChannelRealization;
use crate::erf::erfc;
use crate::sigproc::{ComplexMatrix, ComplexVector, SymbolVector};
use crate::{Error, Result};

/// Which per-row quantity the per-subcarrier power budget divides by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PowerConvention {
    /// `E_k = sum_n |M_{k,n}|^2` (expected symbol power).
    #[default]
    RowEnergy,
    /// `|sum_n M_{k,n}|^2` (coherent transcription).
    Coherent,
}

/// The N x N secure coding matrix.
#[derive(Debug, Clone)]
pub struct SecureCodingMatrix {
    m: ComplexMatrix,
}

impl SecureCodingMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::DimensionMismatch {
                context: "SecureCodingMatrix",
                expected: m.rows(),
                actual: m.cols(),
            });
        }
        Ok(Self { m })
    }

    /// Identity coding: no inter-carrier mixing.
    pub fn identity(n: usize) -> Self {
        Self {
            m: ComplexMatrix::identity(n),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.m
    }

    pub fn n(&self) -> usize {
        self.m.rows()
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.m.get(r, c)
    }

    /// Row energy `sum_n |M_{k,n}|^2`.
    pub fn row_energy(&self, k: usize) -> f64 {
        (0..self.n()).map(|n| self.m.get(k, n).norm_sqr()).sum()
    }

    /// Interference energy `sum_{n != k} |M_{k,n}|^2`.
    pub fn row_interference(&self, k: usize) -> f64 {
        self.row_energy(k) - self.m.get(k, k).norm_sqr()
    }

    /// Budget denominator for row `k` under the given convention.
    pub fn row_budget(&self, k: usize, convention: PowerConvention) -> f64 {
        match convention {
            PowerConvention::RowEnergy => self.row_energy(k),
            PowerConvention::Coherent => (0..self.n())
                .fold(Complex64::new(0.0, 0.0), |acc, n| acc + self.m.get(k, n))
                .norm_sqr(),
        }
    }

    /// Checks `p_k * budget_k <= P_S (1 + 1e-9)` for every row.
    pub fn satisfies_power_budget(
        &self,
        p: &PowerAllocation,
        p_s: f64,
        convention: PowerConvention,
    ) -> bool {
        (0..self.n()).all(|k| p.get(k) * self.row_budget(k, convention) <= p_s * (1.0 + 1e-9))
    }
}

/// Per-subcarrier transmit powers, watts.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerAllocation {
    p: Vec<f64>,
}

impl PowerAllocation {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidArgument {
                context: "PowerAllocation",
                reason: "length must be positive".into(),
            });
        }
        if !p.iter().all(|v| v.is_finite() && *v >= 0.0) {
            return Err(Error::InvalidArgument {
                context: "PowerAllocation",
                reason: "powers must be finite and nonnegative".into(),
            });
        }
        Ok(Self { p })
    }

    pub fn uniform(n: usize, value: f64) -> Self {
        Self::new(vec![value; n]).expect("uniform power is valid")
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, k: usize) -> f64 {
        self.p[k]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    pub fn total(&self) -> f64 {
        self.p.iter().sum()
    }
}

/// Metrics for one channel pair under a given coding and power allocation.
#[derive(Debug, Clone)]
pub struct LinkMetrics {
    /// Per-subcarrier SINR at Bob, linear.
    pub sinr_bob: Vec<f64>,
    /// Per-subcarrier SINR at Eve, linear.
    pub sinr_eve: Vec<f64>,
    /// SER at Bob from the subcarrier-averaged SINR.
    pub ser_bob: f64,
    /// SER at Eve from the subcarrier-averaged SINR.
    pub ser_eve: f64,
    /// Per-subcarrier secrecy rates, bits/s/Hz, clamped at zero.
    pub secrecy_rates: Vec<f64>,
    /// Sum of the per-subcarrier secrecy rates.
    pub sum_secrecy_rate: f64,
}

/// `X_k = sqrt(p_k) sum_n M_{k,n} S_n` — the frequency-domain coded symbols.
pub fn encode_transmit(
    s: &SymbolVector,
    m: &SecureCodingMatrix,
    p: &PowerAllocation,
) -> Result<ComplexVector> {
    let n = m.n();
    if s.len() != n || p.len() != n {
        return Err(Error::DimensionMismatch {
            context: "encode_transmit",
            expected: n,
            actual: s.len().min(p.len()),
        });
    }
    let mixed = m.matrix().matvec(s.symbols())?;
    ComplexVector::new(
        mixed
            .iter()
            .enumerate()
            .map(|(k, z)| z * p.get(k).sqrt())
            .collect(),
    )
}

/// `Y_k = H_k X_k + N_k` with complex Gaussian noise of the channel's
/// configured per-subcarrier power.
pub fn receive(
    x: &ComplexVector,
    ch: &ChannelRealization,
    rng: &mut impl Rng,
) -> Result<ComplexVector> {
    let n = ch.num_subcarriers();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            context: "receive",
            expected: n,
            actual: x.len(),
        });
    }
    let sigma = (ch.noise_power() / 2.0).sqrt();
    ComplexVector::new(
        x.iter()
            .zip(ch.freq_gains().iter())
            .map(|(xk, hk)| {
                let re: f64 = <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng);
                let im: f64 = <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng);
                hk * xk + Complex64::new(sigma * re, sigma * im)
            })
            .collect(),
    )
}

/// Per-subcarrier SINR in expectation over unit-power symbols:
/// `gamma_k = p_k |H_k M_{k,k}|^2 / (p_k |H_k|^2 sum_{n != k} |M_{k,n}|^2 + delta^2)`.
pub fn sinr_per_subcarrier(
    ch: &ChannelRealization,
    m: &SecureCodingMatrix,
    p: &PowerAllocation,
) -> Result<Vec<f64>> {
    let n = m.n();
    if ch.num_subcarriers() != n || p.len() != n {
        return Err(Error::DimensionMismatch {
            context: "sinr_per_subcarrier",
            expected: n,
            actual: ch.num_subcarriers().min(p.len()),
        });
    }
    Ok((0..n)
        .map(|k| {
            let h2 = ch.freq_gains()[k].norm_sqr();
            let pk = p.get(k);
            let signal = pk * h2 * m.get(k, k).norm_sqr();
            let interference = pk * h2 * m.row_interference(k);
            signal / (interference + ch.noise_power())
        })
        .collect())
}

/// QPSK SER approximation `(1/2) erfc(sqrt(mean_sinr))`.
pub fn ser_qpsk(mean_sinr: f64) -> Result<f64> {
    if mean_sinr.is_nan() || mean_sinr < 0.0 {
        return Err(Error::InvalidArgument {
            context: "ser_qpsk",
            reason: format!("mean SINR must be nonnegative, got {mean_sinr}"),
        });
    }
    Ok(0.5 * erfc(mean_sinr.sqrt()))
}

/// Per-subcarrier SER: the same approximation applied to each SINR.
pub fn ser_per_subcarrier(sinrs: &[f64]) -> Result<Vec<f64>> {
    sinrs.iter().map(|&g| ser_qpsk(g)).collect()
}

/// `max(0, log2(1 + gamma_b) - log2(1 + gamma_e))`.
pub fn secrecy_rate(gamma_bob: f64, gamma_eve: f64) -> f64 {
    ((1.0 + gamma_bob).log2() - (1.0 + gamma_eve).log2()).max(0.0)
}

/// Full metric evaluation for one channel pair.
pub fn evaluate_link(
    ch_bob: &ChannelRealization,
    ch_eve: &ChannelRealization,
    m: &SecureCodingMatrix,
    p: &PowerAllocation,
) -> Result<LinkMetrics> {
    let sinr_bob = sinr_per_subcarrier(ch_bob, m, p)?;
    let sinr_eve = sinr_per_subcarrier(ch_eve, m, p)?;
    let n = sinr_bob.len() as f64;
    let mean_bob = sinr_bob.iter().sum::<f64>() / n;
    let mean_eve = sinr_eve.iter().sum::<f64>() / n;
    let secrecy_rates: Vec<f64> = sinr_bob
        .iter()
        .zip(sinr_eve.iter())
        .map(|(&b, &e)| secrecy_rate(b, e))
        .collect();
    let sum_secrecy_rate = secrecy_rates.iter().sum();
    Ok(LinkMetrics {
        ser_bob: ser_qpsk(mean_bob)?,
        ser_eve: ser_qpsk(mean_eve)?,
        sinr_bob,
        sinr_eve,
        secrecy_rates,
        sum_secrecy_rate,
    })
}
