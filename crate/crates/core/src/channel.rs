//! Satellite-to-ground channel realizations for the legitimate and wiretap
//! links: deterministic geometry terms, stochastic fading, and
//! frequency-domain diagonalization.
//!
//! Samplers take an explicit generator handle; independent generators per
//! worker give embarrassingly parallel Monte Carlo.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::PI;

use crate::bessel;
use crate::sigproc::{dft, ComplexVector};
use crate::{Error, Result};

/// Deterministic link geometry for one receiver.
#[derive(Debug, Clone, Copy)]
pub struct LinkGeometry {
    /// Carrier wavelength in meters.
    pub wavelength_m: f64,
    /// Horizontal distance from the sub-satellite point, meters.
    pub horizontal_distance_m: f64,
    /// Satellite altitude, meters.
    pub altitude_m: f64,
    /// Angle between beam boresight and the receiver direction, radians.
    pub elevation_offset_rad: f64,
    /// 3 dB beamwidth, radians.
    pub beamwidth_3db_rad: f64,
    /// Maximum antenna gain (linear).
    pub max_gain: f64,
}

impl LinkGeometry {
    pub fn validate(&self) -> Result<()> {
        let ok = self.wavelength_m > 0.0
            && self.altitude_m > 0.0
            && self.horizontal_distance_m >= 0.0
            && self.elevation_offset_rad >= 0.0
            && self.beamwidth_3db_rad > 0.0
            && self.beamwidth_3db_rad < PI / 2.0
            && self.max_gain > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument {
                context: "LinkGeometry",
                reason: format!("{self:?} violates geometry invariants"),
            })
        }
    }
}

/// Beam-gain bracket variant; see [`beam_gain`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BeamGainMode {
    /// `(J1(u)/(2u) + 36 J3(u)/u^3)^2` — peaks at boresight.
    #[default]
    Literature,
    /// `(J1(u)/(2u) - 36 J3(u)/u^2)^2` — transcribed form, kept selectable.
    PaperLiteral,
}

/// Stochastic fading parameters.
#[derive(Debug, Clone, Copy)]
pub struct FadingParams {
    /// Mean of `ln(beta_dB)` for the rain term.
    pub rain_mu: f64,
    /// Standard deviation of `ln(beta_dB)`.
    pub rain_sigma: f64,
    /// Rician K factor in dB (line-of-sight to scattered power).
    pub rician_k_db: f64,
    /// Number of time-domain taps, `>= 1`.
    pub num_taps: usize,
}

impl FadingParams {
    pub fn validate(&self) -> Result<()> {
        if self.rain_sigma >= 0.0 && self.num_taps >= 1 && self.rician_k_db.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidArgument {
                context: "FadingParams",
                reason: format!("{self:?} violates fading invariants"),
            })
        }
    }
}

/// One draw of a link: time-domain taps and the diagonal frequency gains.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    taps: ComplexVector,
    freq_gains: ComplexVector,
    noise_power: f64,
}

impl ChannelRealization {
    /// Builds the realization from time-domain taps, diagonalizing via the
    /// convolution theorem: `freq_gains = sqrt(N) * dft(taps zero-padded)`.
    pub fn from_taps(taps: ComplexVector, n: usize, noise_power: f64) -> Result<Self> {
        if n < taps.len() {
            return Err(Error::InvalidArgument {
                context: "ChannelRealization",
                reason: format!("subcarrier count {n} is below tap count {}", taps.len()),
            });
        }
        if noise_power <= 0.0 || !noise_power.is_finite() {
            return Err(Error::InvalidArgument {
                context: "ChannelRealization",
                reason: format!("noise power must be positive and finite, got {noise_power}"),
            });
        }
        let padded = taps.zero_padded(n)?;
        let freq_gains = dft(&padded).scale(Complex64::new((n as f64).sqrt(), 0.0));
        debug_assert!(diagonalization_holds(&taps, &freq_gains));
        Ok(Self {
            taps,
            freq_gains,
            noise_power,
        })
    }

    /// Flat channel with a single tap; handy for tests and baselines.
    pub fn flat(gain: Complex64, n: usize, noise_power: f64) -> Result<Self> {
        Self::from_taps(ComplexVector::new(vec![gain])?, n, noise_power)
    }

    pub fn taps(&self) -> &ComplexVector {
        &self.taps
    }

    pub fn freq_gains(&self) -> &ComplexVector {
        &self.freq_gains
    }

    pub fn num_subcarriers(&self) -> usize {
        self.freq_gains.len()
    }

    pub fn noise_power(&self) -> f64 {
        self.noise_power
    }
}

fn diagonalization_holds(taps: &ComplexVector, freq_gains: &ComplexVector) -> bool {
    let n = freq_gains.len();
    let padded = taps.zero_padded(n).expect("n >= taps checked");
    let expected = dft(&padded).scale(Complex64::new((n as f64).sqrt(), 0.0));
    freq_gains
        .iter()
        .zip(expected.iter())
        .all(|(a, b)| (a - b).norm() <= 1e-12 * b.norm().max(1.0))
}

/// Free-space path loss `(lambda / 4 pi)^2 / (d^2 + l^2)`.
pub fn path_loss(geom: &LinkGeometry) -> f64 {
    let num = geom.wavelength_m / (4.0 * PI);
    num * num
        / (geom.horizontal_distance_m * geom.horizontal_distance_m
            + geom.altitude_m * geom.altitude_m)
}

/// Antenna beam gain at the configured off-boresight angle.
///
/// `u0 = 2.07123 sin(alpha) / sin(alpha_3dB)`; the `Literature` bracket is
/// `J1(u0)/(2 u0) + 36 J3(u0)/u0^3`, which tends to 1 as `u0 -> 0` and to
/// 1/2 squared at the 3 dB point.
pub fn beam_gain(geom: &LinkGeometry, mode: BeamGainMode) -> f64 {
    let u0 = 2.07123 * geom.elevation_offset_rad.sin() / geom.beamwidth_3db_rad.sin();
    let bracket = match mode {
        BeamGainMode::Literature => 0.5 * bessel::j1_over_u(u0) + 36.0 * bessel::j3_over_u3(u0),
        BeamGainMode::PaperLiteral => {
            // 36 J3(u)/u^2 = 36 u * (J3(u)/u^3); finite at u = 0.
            0.5 * bessel::j1_over_u(u0) - 36.0 * u0 * bessel::j3_over_u3(u0)
        }
    };
    geom.max_gain * bracket * bracket
}

/// Draws the rain-induced fade `beta`: `z ~ N(mu, sigma^2)`, `beta_dB = e^z`,
/// `beta = 10^(beta_dB / 10)`. Always `> 1` since `e^z > 0`.
pub fn sample_rain_fade(params: &FadingParams, rng: &mut impl Rng) -> f64 {
    let z: f64 = params.rain_mu
        + params.rain_sigma * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng);
    let beta_db = z.exp();
    10f64.powf(beta_db / 10.0)
}

/// Draws `L` Rician multipath taps with unit total mean power.
///
/// Tap 0 is the line-of-sight component with deterministic magnitude and a
/// phase uniform on `[0, 2 pi)`; taps `1..L` are zero-mean complex Gaussian.
/// The LoS-to-scattered power ratio equals the configured K factor. With
/// `L = 1` the single tap is pure LoS with unit magnitude.
pub fn sample_multipath(params: &FadingParams, rng: &mut impl Rng) -> ComplexVector {
    let l = params.num_taps;
    let theta = rng.gen_range(0.0..2.0 * PI);
    if l == 1 {
        return ComplexVector::new(vec![Complex64::from_polar(1.0, theta)])
            .expect("single LoS tap is finite");
    }
    let k_lin = 10f64.powf(params.rician_k_db / 10.0);
    let los_power = k_lin / (k_lin + 1.0);
    let scatter_power_per_tap = 1.0 / ((k_lin + 1.0) * (l - 1) as f64);
    let sigma = (scatter_power_per_tap / 2.0).sqrt();
    let mut taps = Vec::with_capacity(l);
    taps.push(Complex64::from_polar(los_power.sqrt(), theta));
    for _ in 1..l {
        let re: f64 = <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng);
        let im: f64 = <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng);
        taps.push(Complex64::new(sigma * re, sigma * im));
    }
    ComplexVector::new(taps).expect("gaussian taps are finite")
}

/// Draws one channel realization: multipath taps scaled by
/// `sqrt(path_loss * beam_gain * beta)`, then diagonalized.
pub fn realize_channel(
    geom: &LinkGeometry,
    fading: &FadingParams,
    mode: BeamGainMode,
    n: usize,
    noise_power: f64,
    rng: &mut impl Rng,
) -> Result<ChannelRealization> {
    geom.validate()?;
    fading.validate()?;
    if n < fading.num_taps {
        return Err(Error::InvalidArgument {
            context: "realize_channel",
            reason: format!(
                "subcarrier count {n} must be at least the tap count {}",
                fading.num_taps
            ),
        });
    }
    let beta = sample_rain_fade(fading, rng);
    let large_scale = path_loss(geom) * beam_gain(geom, mode) * beta;
    let taps = sample_multipath(fading, rng).scale(Complex64::new(large_scale.sqrt(), 0.0));
    ChannelRealization::from_taps(taps, n, noise_power)
}
