//! Monte Carlo scenario runner: draws channel pairs, runs the proposed
//! train-and-infer pipeline and the two baselines, and aggregates metrics.
//!
//! Draw `i` derives its generator from `(master seed, i)` via a dedicated
//! ChaCha stream, so draws are independent of scheduling and identical
//! across axis values — sweeps see the same channels at every point.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use secwave::channel::{realize_channel, ChannelRealization};
use secwave::cmlp::NetParams;
use secwave::exec;
use secwave::joint::{infer, train, Inference, JointConfig};
use secwave::power::{allocate, check_constraint};
use secwave::sigproc::ComplexMatrix;
use secwave::waveform::{evaluate_link, LinkMetrics, PowerAllocation, SecureCodingMatrix};

use crate::config::{ScenarioConfig, TrainingMode};
use crate::{HarnessError, Result};

/// Transmission schemes compared in the sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Proposed,
    Unencrypted,
    Mrt,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Proposed, Scheme::Unencrypted, Scheme::Mrt];

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Proposed => "proposed",
            Scheme::Unencrypted => "unencrypted",
            Scheme::Mrt => "mrt",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "proposed" => Ok(Scheme::Proposed),
            "unencrypted" => Ok(Scheme::Unencrypted),
            "mrt" => Ok(Scheme::Mrt),
            other => Err(HarnessError::Config(format!("unknown scheme '{other}'"))),
        }
    }
}

/// One draw's outcome for one scheme.
#[derive(Debug, Clone)]
pub struct DrawResult {
    pub metrics: LinkMetrics,
    /// Anti-intercept audit: allocator converged and the per-subcarrier Eve
    /// SER constraint holds. Baselines carry `true` (no constraint applies).
    pub audit_pass: bool,
}

/// Aggregated row for one (axis value, scheme) pair; the serialized fields
/// mirror the CSV columns plus the audit flag.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis_name: String,
    pub axis_value: f64,
    pub scheme: Scheme,
    pub n: usize,
    pub epsilon_e: f64,
    pub mean_sinr_bob_db: f64,
    pub mean_sinr_eve_db: f64,
    pub mean_ser_eve: f64,
    pub mean_secrecy_rate: f64,
    pub stderr_secrecy_rate: f64,
    pub num_draws: usize,
    pub seed: u64,
    /// True when every draw passed the anti-intercept audit.
    pub anti_intercept_audit_pass: bool,
}

/// Channel pair for draw `i` under the master seed.
pub fn draw_channels(
    cfg: &ScenarioConfig,
    draw: usize,
) -> Result<(ChannelRealization, ChannelRealization)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(draw as u64);
    let mode = cfg.beam_gain_mode();
    let fading = cfg.fading();

    // Uniform on a disk: r = R sqrt(u).
    let r_bob = cfg.bob_radius_km * rng.gen_range(0.0..1.0f64).sqrt();
    let r_eve = cfg.eve_radius_km * rng.gen_range(0.0..1.0f64).sqrt();

    let bob = realize_channel(
        &cfg.geometry(r_bob, cfg.mean_gain_bob_db),
        &fading,
        mode,
        cfg.n,
        cfg.noise_bob_w,
        &mut rng,
    )?;
    let eve = realize_channel(
        &cfg.geometry(r_eve, cfg.mean_gain_eve_db),
        &fading,
        mode,
        cfg.n,
        cfg.noise_eve_w,
        &mut rng,
    )?;
    Ok((bob, eve))
}

fn net_seed(master: u64, draw: usize) -> u64 {
    master
        .rotate_left(17)
        .wrapping_add((draw as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Proposed scheme on one draw: train on the pair (or reuse amortized
/// parameters), then run the inference pipeline on the same pair.
pub fn run_proposed(
    cfg: &ScenarioConfig,
    joint_cfg: &JointConfig,
    shared_params: Option<&NetParams>,
    bob: &ChannelRealization,
    eve: &ChannelRealization,
    draw: usize,
) -> Result<Inference> {
    let inference = match shared_params {
        Some(params) => infer(params, bob, eve, joint_cfg)?,
        None => {
            let outcome = train(bob, eve, joint_cfg, net_seed(cfg.seed, draw))?;
            infer(&outcome.params, bob, eve, joint_cfg)?
        }
    };
    Ok(inference)
}

/// Unencrypted baseline: identity coding, full per-subcarrier power, no
/// anti-intercept constraint.
pub fn baseline_unencrypted(
    cfg: &ScenarioConfig,
    bob: &ChannelRealization,
    eve: &ChannelRealization,
) -> Result<LinkMetrics> {
    let m = SecureCodingMatrix::identity(cfg.n);
    let p = PowerAllocation::uniform(cfg.n, cfg.p_s_w);
    Ok(evaluate_link(bob, eve, &m, &p)?)
}

/// MRT baseline: diagonal coding with conjugate phases of the legitimate
/// gains and power proportional to `|H_k|^2`, normalized so the strongest
/// subcarrier sits at the per-subcarrier cap.
pub fn baseline_mrt(
    cfg: &ScenarioConfig,
    bob: &ChannelRealization,
    eve: &ChannelRealization,
) -> Result<LinkMetrics> {
    let n = cfg.n;
    let diag: Vec<Complex64> = bob
        .freq_gains()
        .iter()
        .map(|h| {
            let mag = h.norm();
            if mag > 0.0 {
                h.conj() / mag
            } else {
                Complex64::new(1.0, 0.0)
            }
        })
        .collect();
    let m = SecureCodingMatrix::new(ComplexMatrix::diagonal(diag)?)?;
    let max_gain = bob
        .freq_gains()
        .iter()
        .map(|h| h.norm_sqr())
        .fold(0.0f64, f64::max);
    let p = if max_gain > 0.0 {
        PowerAllocation::new(
            bob.freq_gains()
                .iter()
                .map(|h| cfg.p_s_w * h.norm_sqr() / max_gain)
                .collect(),
        )?
    } else {
        PowerAllocation::uniform(n, 0.0)
    };
    Ok(evaluate_link(bob, eve, &m, &p)?)
}

/// Runs one scheme on one draw.
pub fn run_draw(
    cfg: &ScenarioConfig,
    joint_cfg: &JointConfig,
    shared_params: Option<&NetParams>,
    scheme: Scheme,
    draw: usize,
) -> Result<DrawResult> {
    let (bob, eve) = draw_channels(cfg, draw)?;
    match scheme {
        Scheme::Proposed => {
            let inf = run_proposed(cfg, joint_cfg, shared_params, &bob, &eve, draw)?;
            let (constraint_ok, _) =
                check_constraint(&inf.power, &eve, &inf.coding, &joint_cfg.bisection)?;
            Ok(DrawResult {
                metrics: inf.metrics,
                audit_pass: inf.allocation_converged && constraint_ok,
            })
        }
        Scheme::Unencrypted => Ok(DrawResult {
            metrics: baseline_unencrypted(cfg, &bob, &eve)?,
            audit_pass: true,
        }),
        Scheme::Mrt => Ok(DrawResult {
            metrics: baseline_mrt(cfg, &bob, &eve)?,
            audit_pass: true,
        }),
    }
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for v in values {
        sum += v;
        count += 1;
    }
    sum / count as f64
}

/// Aggregates per-draw outcomes into one row.
pub fn aggregate(
    cfg: &ScenarioConfig,
    scheme: Scheme,
    axis_name: &str,
    axis_value: f64,
    draws: &[DrawResult],
) -> SweepRow {
    let mean_sinr_bob = mean(
        draws
            .iter()
            .map(|d| mean(d.metrics.sinr_bob.iter().copied())),
    );
    let mean_sinr_eve = mean(
        draws
            .iter()
            .map(|d| mean(d.metrics.sinr_eve.iter().copied())),
    );
    let rates: Vec<f64> = draws.iter().map(|d| d.metrics.sum_secrecy_rate).collect();
    let mean_rate = mean(rates.iter().copied());
    let var = if rates.len() > 1 {
        rates.iter().map(|r| (r - mean_rate).powi(2)).sum::<f64>() / (rates.len() - 1) as f64
    } else {
        0.0
    };
    SweepRow {
        axis_name: axis_name.to_string(),
        axis_value,
        scheme,
        n: cfg.n,
        epsilon_e: cfg.epsilon_e,
        mean_sinr_bob_db: 10.0 * mean_sinr_bob.log10(),
        mean_sinr_eve_db: 10.0 * mean_sinr_eve.log10(),
        mean_ser_eve: mean(draws.iter().map(|d| d.metrics.ser_eve)),
        mean_secrecy_rate: mean_rate,
        stderr_secrecy_rate: (var / rates.len() as f64).sqrt(),
        num_draws: draws.len(),
        seed: cfg.seed,
        anti_intercept_audit_pass: draws.iter().all(|d| d.audit_pass),
    }
}

/// Trains the amortized network on a dedicated draw stream when the config
/// asks for it.
pub fn amortized_params(
    cfg: &ScenarioConfig,
    joint_cfg: &JointConfig,
) -> Result<Option<NetParams>> {
    match cfg.training_mode {
        TrainingMode::PerDraw => Ok(None),
        TrainingMode::Amortized => {
            // The training pair comes from a stream no sweep draw uses.
            let (bob, eve) = draw_channels(cfg, usize::MAX >> 1)?;
            let outcome = train(&bob, &eve, joint_cfg, net_seed(cfg.seed, usize::MAX >> 1))?;
            Ok(Some(outcome.params))
        }
    }
}

/// Runs `num_draws` Monte Carlo draws of one scheme at one scenario point.
pub fn run_scenario(
    cfg: &ScenarioConfig,
    scheme: Scheme,
    axis_name: &str,
    axis_value: f64,
) -> Result<SweepRow> {
    cfg.validate()?;
    let joint_cfg = cfg.joint()?;
    let shared = amortized_params(cfg, &joint_cfg)?;
    let results: Vec<Result<DrawResult>> = exec::map_indexed(cfg.num_draws, |draw| {
        run_draw(cfg, &joint_cfg, shared.as_ref(), scheme, draw)
    });
    let mut draws = Vec::with_capacity(cfg.num_draws);
    for r in results {
        draws.push(r?);
    }
    Ok(aggregate(cfg, scheme, axis_name, axis_value, &draws))
}

/// Sweep axes exposed by the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    PowerCap,
    EpsilonE,
    Subcarriers,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::PowerCap => "p_s",
            SweepAxis::EpsilonE => "epsilon_e",
            SweepAxis::Subcarriers => "n",
        }
    }

    pub fn apply(&self, cfg: &ScenarioConfig, value: f64) -> Result<ScenarioConfig> {
        let mut cfg = cfg.clone();
        match self {
            SweepAxis::PowerCap => cfg.p_s_w = value,
            SweepAxis::EpsilonE => cfg.epsilon_e = value,
            SweepAxis::Subcarriers => {
                if value.fract() != 0.0 || value < 2.0 {
                    return Err(HarnessError::Config(format!(
                        "subcarrier axis values must be integers >= 2, got {value}"
                    )));
                }
                cfg.n = value as usize;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "p_s" => Ok(SweepAxis::PowerCap),
            "epsilon_e" => Ok(SweepAxis::EpsilonE),
            "n" => Ok(SweepAxis::Subcarriers),
            other => Err(HarnessError::Config(format!(
                "unknown sweep axis '{other}' (expected p_s, epsilon_e, or n)"
            ))),
        }
    }
}

/// Runs every scheme at every axis value; rows are ordered by axis value,
/// then scheme.
pub fn sweep(cfg: &ScenarioConfig, axis: SweepAxis, values: &[f64]) -> Result<Vec<SweepRow>> {
    if values.len() < 2 {
        return Err(HarnessError::Config(
            "a sweep needs at least two axis values".into(),
        ));
    }
    let mut rows = Vec::with_capacity(values.len() * Scheme::ALL.len());
    for &value in values {
        let point_cfg = axis.apply(cfg, value)?;
        for scheme in Scheme::ALL {
            rows.push(run_scenario(&point_cfg, scheme, axis.name(), value)?);
        }
    }
    Ok(rows)
}

/// Identity-coding run through the same power-allocation procedure as the
/// proposed scheme; the alternation should track this reference.
pub fn identity_under_allocation(
    cfg: &ScenarioConfig,
    bob: &ChannelRealization,
    eve: &ChannelRealization,
) -> Result<LinkMetrics> {
    let m = SecureCodingMatrix::identity(cfg.n);
    let alloc = allocate(eve, &m, &cfg.bisection()?)?;
    Ok(evaluate_link(bob, eve, &m, &alloc.power)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fast_cfg() -> ScenarioConfig {
        ScenarioConfig {
            num_draws: 4,
            epochs: 30,
            ..ScenarioConfig::default()
        }
    }

    #[test]
    fn draws_are_reproducible_and_stream_independent() {
        let cfg = fast_cfg();
        let (b1, e1) = draw_channels(&cfg, 3).unwrap();
        let (b2, e2) = draw_channels(&cfg, 3).unwrap();
        for k in 0..cfg.n {
            assert_eq!(b1.freq_gains()[k], b2.freq_gains()[k]);
            assert_eq!(e1.freq_gains()[k], e2.freq_gains()[k]);
        }
        // A different draw index gives different channels.
        let (b3, _) = draw_channels(&cfg, 4).unwrap();
        assert!((0..cfg.n).any(|k| b1.freq_gains()[k] != b3.freq_gains()[k]));
    }

    #[test]
    fn unencrypted_baseline_has_no_interference() {
        let cfg = fast_cfg();
        let (bob, eve) = draw_channels(&cfg, 0).unwrap();
        let metrics = baseline_unencrypted(&cfg, &bob, &eve).unwrap();
        for k in 0..cfg.n {
            let expected = cfg.p_s_w * bob.freq_gains()[k].norm_sqr() / cfg.noise_bob_w;
            let rel = (metrics.sinr_bob[k] - expected).abs() / expected;
            assert!(rel < 1e-12, "subcarrier {k}");
        }
    }

    #[test]
    fn unencrypted_identical_channels_zero_secrecy() {
        let cfg = fast_cfg();
        let (bob, _) = draw_channels(&cfg, 0).unwrap();
        let metrics = baseline_unencrypted(&cfg, &bob, &bob).unwrap();
        assert_eq!(metrics.sum_secrecy_rate, 0.0);
    }

    #[test]
    fn unencrypted_secrecy_saturates_in_power() {
        // High-SNR limit: the secrecy rate depends only on the gain gap, so
        // scaling the cap leaves it nearly unchanged.
        let mut cfg = fast_cfg();
        let (bob, eve) = draw_channels(&cfg, 1).unwrap();
        cfg.p_s_w = 1e3;
        let low = baseline_unencrypted(&cfg, &bob, &eve).unwrap();
        cfg.p_s_w = 1e6;
        let high = baseline_unencrypted(&cfg, &bob, &eve).unwrap();
        let rel =
            (high.sum_secrecy_rate - low.sum_secrecy_rate).abs() / low.sum_secrecy_rate.max(1e-12);
        assert!(rel < 0.02, "relative change {rel}");
    }

    #[test]
    fn mrt_aligns_phases_and_caps_power() {
        let cfg = fast_cfg();
        let (bob, eve) = draw_channels(&cfg, 2).unwrap();
        let diag: Vec<Complex64> = bob
            .freq_gains()
            .iter()
            .map(|h| h.conj() / h.norm())
            .collect();
        for (h, d) in bob.freq_gains().iter().zip(diag.iter()) {
            let aligned = h * d;
            assert!(aligned.im.abs() < 1e-12 * aligned.re.abs().max(1e-30));
            assert!(aligned.re >= 0.0);
        }
        let metrics = baseline_mrt(&cfg, &bob, &eve).unwrap();
        assert!(metrics.sum_secrecy_rate.is_finite());
    }

    #[test]
    fn mrt_flat_channel_reduces_to_unencrypted() {
        let cfg = ScenarioConfig {
            num_taps: 1, // single tap: flat magnitude across subcarriers
            ..fast_cfg()
        };
        let (bob, eve) = draw_channels(&cfg, 0).unwrap();
        let mrt = baseline_mrt(&cfg, &bob, &eve).unwrap();
        let unenc = baseline_unencrypted(&cfg, &bob, &eve).unwrap();
        let rel = (mrt.sum_secrecy_rate - unenc.sum_secrecy_rate).abs()
            / unenc.sum_secrecy_rate.max(1e-12);
        assert!(rel < 1e-9, "relative gap {rel}");
    }

    #[test]
    fn scenario_row_is_deterministic() {
        let cfg = ScenarioConfig {
            num_draws: 2,
            epochs: 10,
            ..ScenarioConfig::default()
        };
        let a = run_scenario(&cfg, Scheme::Proposed, "p_s", cfg.p_s_w).unwrap();
        let b = run_scenario(&cfg, Scheme::Proposed, "p_s", cfg.p_s_w).unwrap();
        assert_eq!(a.mean_secrecy_rate.to_bits(), b.mean_secrecy_rate.to_bits());
        assert_eq!(a.mean_sinr_bob_db.to_bits(), b.mean_sinr_bob_db.to_bits());
    }

    #[test]
    fn sweep_needs_two_values() {
        let cfg = fast_cfg();
        assert!(sweep(&cfg, SweepAxis::PowerCap, &[1.0]).is_err());
    }

    #[test]
    fn subcarrier_axis_rejects_fractional_values() {
        let cfg = fast_cfg();
        assert!(SweepAxis::Subcarriers.apply(&cfg, 12.5).is_err());
        assert!(SweepAxis::Subcarriers.apply(&cfg, 16.0).is_ok());
    }
}
