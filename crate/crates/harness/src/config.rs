//! Scenario configuration: a flat key-value document with explicit units in
//! the key names. Unknown keys are rejected to prevent silent typos.
//!
//! Carrier wavelength and the noise floors are placeholders (Ka-band
//! downlink, noise chosen so the anti-intercept constraint starts binding
//! within the default power sweep); the experiment suite checks trends, not
//! absolute values.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;

use secwave::channel::{BeamGainMode, FadingParams, LinkGeometry};
use secwave::joint::JointConfig;
use secwave::power::BisectionConfig;
use secwave::waveform::PowerConvention;

use crate::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BeamGainModeCfg {
    Literature,
    PaperLiteral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerConventionCfg {
    Energy,
    Coherent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrainingMode {
    /// Retrain the network on every channel draw (the default).
    PerDraw,
    /// Train once on a dedicated draw and reuse the parameters.
    Amortized,
}

/// Full scenario description; every field has a default and can be
/// overridden from a TOML file or CLI flags.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    /// Subcarrier count.
    pub n: usize,
    /// Per-subcarrier transmit power cap, watts.
    pub p_s_w: f64,
    /// Target Eve SER.
    pub epsilon_e: f64,
    /// Bisection stopping-band half-width.
    pub delta: f64,
    /// Bisection iteration cap per subcarrier.
    pub max_iterations: usize,
    /// Per-subcarrier noise power at Bob, watts.
    pub noise_bob_w: f64,
    /// Per-subcarrier noise power at Eve, watts.
    pub noise_eve_w: f64,
    /// Carrier wavelength, meters.
    pub wavelength_m: f64,
    /// Orbit altitude, kilometers.
    pub altitude_km: f64,
    /// Bob is drawn uniformly on a disk of this radius, kilometers.
    pub bob_radius_km: f64,
    /// Eve is drawn uniformly on a disk of this radius, kilometers.
    pub eve_radius_km: f64,
    /// 3 dB beamwidth, radians.
    pub beamwidth_3db_rad: f64,
    /// Mean channel power gain to Bob at the 1 m reference distance, dB.
    pub mean_gain_bob_db: f64,
    /// Mean channel power gain to Eve at the 1 m reference distance, dB.
    pub mean_gain_eve_db: f64,
    /// Mean of ln(beta_dB) for the rain fade.
    pub rain_mu: f64,
    /// Standard deviation of ln(beta_dB).
    pub rain_sigma: f64,
    /// Rician K factor, dB.
    pub rician_k_db: f64,
    /// Multipath tap count.
    pub num_taps: usize,
    /// Monte Carlo draw count per scenario point.
    pub num_draws: usize,
    /// Master seed for all sampling.
    pub seed: u64,
    /// Training epoch budget per draw.
    pub epochs: usize,
    /// Adam learning rate.
    pub learning_rate: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
    /// LeakyReLU negative slope.
    pub leaky_slope: f64,
    pub beam_gain_mode: BeamGainModeCfg,
    pub power_convention: PowerConventionCfg,
    pub training_mode: TrainingMode,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            n: 16,
            p_s_w: 2.0,
            epsilon_e: 0.4,
            delta: 1e-3,
            max_iterations: 200,
            noise_bob_w: 1e-11,
            noise_eve_w: 1e-11,
            wavelength_m: 0.015,
            altitude_km: 600.0,
            bob_radius_km: 800.0,
            eve_radius_km: 1000.0,
            beamwidth_3db_rad: 0.7,
            mean_gain_bob_db: 10.0,
            mean_gain_eve_db: 5.0,
            rain_mu: 0.0,
            rain_sigma: 0.5,
            rician_k_db: 10.0,
            num_taps: 4,
            num_draws: 100,
            seed: 1,
            epochs: 500,
            learning_rate: 1e-3,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_epsilon: 1e-8,
            leaky_slope: 0.01,
            beam_gain_mode: BeamGainModeCfg::Literature,
            power_convention: PowerConventionCfg::Energy,
            training_mode: TrainingMode::PerDraw,
        }
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(body: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(body)
            .map_err(|e| HarnessError::Config(format!("failed to parse config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let body = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&body)
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.n < 2 {
            problems.push("n must be at least 2");
        }
        if self.p_s_w.is_nan() || self.p_s_w <= 0.0 {
            problems.push("p_s_w must be positive");
        }
        if self.epsilon_e.is_nan() || self.epsilon_e <= 0.0 || self.epsilon_e > 0.5 {
            problems.push("epsilon_e must lie in (0, 0.5]");
        }
        if self.delta.is_nan() || self.delta <= 0.0 || self.delta >= self.epsilon_e {
            problems.push("delta must lie in (0, epsilon_e)");
        }
        if self.num_draws < 1 {
            problems.push("num_draws must be at least 1");
        }
        if self.epochs < 1 {
            problems.push("epochs must be at least 1");
        }
        if self.noise_bob_w.is_nan()
            || self.noise_bob_w <= 0.0
            || self.noise_eve_w.is_nan()
            || self.noise_eve_w <= 0.0
        {
            problems.push("noise powers must be positive");
        }
        if self.wavelength_m.is_nan()
            || self.wavelength_m <= 0.0
            || self.altitude_km.is_nan()
            || self.altitude_km <= 0.0
        {
            problems.push("wavelength and altitude must be positive");
        }
        if self.beamwidth_3db_rad.is_nan()
            || self.beamwidth_3db_rad <= 0.0
            || self.beamwidth_3db_rad >= PI / 2.0
        {
            problems.push("beamwidth_3db_rad must lie in (0, pi/2)");
        }
        if self.num_taps < 1 || self.num_taps > self.n {
            problems.push("num_taps must lie in [1, n]");
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(HarnessError::Config(problems.join("; ")))
        }
    }

    pub fn beam_gain_mode(&self) -> BeamGainMode {
        match self.beam_gain_mode {
            BeamGainModeCfg::Literature => BeamGainMode::Literature,
            BeamGainModeCfg::PaperLiteral => BeamGainMode::PaperLiteral,
        }
    }

    pub fn power_convention(&self) -> PowerConvention {
        match self.power_convention {
            PowerConventionCfg::Energy => PowerConvention::RowEnergy,
            PowerConventionCfg::Coherent => PowerConvention::Coherent,
        }
    }

    /// Antenna max gain calibrated so the mean power gain at the 1 m
    /// reference distance equals the configured value: the free-space term
    /// at 1 m is `(lambda / 4 pi)^2`, so `G0 = g_ref (4 pi / lambda)^2`.
    pub fn max_gain(&self, mean_gain_db: f64) -> f64 {
        10f64.powf(mean_gain_db / 10.0) * (4.0 * PI / self.wavelength_m).powi(2)
    }

    /// Geometry for a receiver at horizontal distance `d_km` from the
    /// sub-satellite point; the boresight points straight down.
    pub fn geometry(&self, d_km: f64, mean_gain_db: f64) -> LinkGeometry {
        let altitude_m = self.altitude_km * 1e3;
        let d_m = d_km * 1e3;
        LinkGeometry {
            wavelength_m: self.wavelength_m,
            horizontal_distance_m: d_m,
            altitude_m,
            elevation_offset_rad: (d_m / altitude_m).atan(),
            beamwidth_3db_rad: self.beamwidth_3db_rad,
            max_gain: self.max_gain(mean_gain_db),
        }
    }

    pub fn fading(&self) -> FadingParams {
        FadingParams {
            rain_mu: self.rain_mu,
            rain_sigma: self.rain_sigma,
            rician_k_db: self.rician_k_db,
            num_taps: self.num_taps,
        }
    }

    pub fn bisection(&self) -> Result<BisectionConfig> {
        let mut cfg =
            BisectionConfig::new(self.epsilon_e, self.delta, self.max_iterations, self.p_s_w)?;
        cfg.convention = self.power_convention();
        Ok(cfg)
    }

    pub fn joint(&self) -> Result<JointConfig> {
        let mut cfg = JointConfig::new(self.bisection()?, self.epochs);
        cfg.learning_rate = self.learning_rate;
        cfg.adam_beta1 = self.adam_beta1;
        cfg.adam_beta2 = self.adam_beta2;
        cfg.adam_epsilon = self.adam_epsilon;
        cfg.leaky_slope = self.leaky_slope;
        Ok(cfg)
    }
}
