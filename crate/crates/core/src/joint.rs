//! Alternating optimization: per epoch the network proposes a secure coding
//! matrix, the bisection allocator fixes the power factors under the
//! anti-intercept constraint, and the coding loss (with those factors held
//! constant) drives one Adam update. Inference runs the same pipeline once,
//! with the hard mask safeguard on the emitted matrix.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channel::ChannelRealization;
use crate::cmlp::{
    adam_step, apply_mask, backward, forward, forward_traced, loss, AdamState, NetParams,
};
use crate::power::{allocate, BisectionConfig};
use crate::waveform::{
    evaluate_link, ser_per_subcarrier, LinkMetrics, PowerAllocation, SecureCodingMatrix,
};
use crate::{Error, Result};

/// Training hyperparameters and the shared bisection setup.
#[derive(Debug, Clone)]
pub struct JointConfig {
    pub bisection: BisectionConfig,
    pub hidden_dims: Vec<usize>,
    pub leaky_slope: f64,
    pub learning_rate: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
    pub epochs: usize,
    /// Window length for the mean-loss convergence check.
    pub convergence_window: usize,
    /// Relative change of the windowed mean loss that counts as converged.
    pub convergence_tol: f64,
}

impl JointConfig {
    pub fn new(bisection: BisectionConfig, epochs: usize) -> Self {
        Self {
            bisection,
            hidden_dims: crate::cmlp::DEFAULT_HIDDEN_DIMS.to_vec(),
            leaky_slope: 0.01,
            learning_rate: 1e-3,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_epsilon: 1e-8,
            epochs,
            convergence_window: 20,
            convergence_tol: 1e-4,
        }
    }
}

/// Per-epoch observability row.
#[derive(Debug, Clone)]
pub struct TrainRecord {
    pub epoch: usize,
    pub loss: f64,
    pub sum_secrecy_rate: f64,
    pub min_eve_ser: f64,
    pub constraint_satisfied: bool,
}

/// Output of one training run.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub params: NetParams,
    pub power: PowerAllocation,
    pub trace: Vec<TrainRecord>,
}

/// One-shot inference result.
#[derive(Debug, Clone)]
pub struct Inference {
    pub coding: SecureCodingMatrix,
    pub power: PowerAllocation,
    pub metrics: LinkMetrics,
    /// Whether the allocator met the SER band.
    pub allocation_converged: bool,
}

fn thresholds_from_power(p: &PowerAllocation, p_s: f64) -> Vec<f64> {
    p.as_slice()
        .iter()
        .map(|&pk| if pk > 1e-300 { p_s / pk } else { f64::INFINITY })
        .collect()
}

fn min_eve_ser(metrics: &LinkMetrics) -> Result<f64> {
    Ok(ser_per_subcarrier(&metrics.sinr_eve)?
        .into_iter()
        .fold(f64::INFINITY, f64::min))
}

/// Trains a scenario-specific network on one fixed channel pair.
///
/// Per epoch: forward (projection thresholds from the latest power factors,
/// starting from `p = 1`), bisection power allocation, loss with those
/// factors held constant, backward, Adam step. Training stops early when the
/// windowed mean loss stops moving. Non-convergent allocations fall back to
/// the last constraint-satisfying power vector and are flagged in the trace.
pub fn train(
    ch_bob: &ChannelRealization,
    ch_eve: &ChannelRealization,
    cfg: &JointConfig,
    seed: u64,
) -> Result<TrainOutcome> {
    let n = ch_bob.num_subcarriers();
    if ch_eve.num_subcarriers() != n {
        return Err(Error::DimensionMismatch {
            context: "joint::train",
            expected: n,
            actual: ch_eve.num_subcarriers(),
        });
    }
    if cfg.epochs == 0 {
        return Err(Error::InvalidArgument {
            context: "joint::train",
            reason: "epochs must be at least 1".into(),
        });
    }
    cfg.bisection.validate()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params = NetParams::new(n, &cfg.hidden_dims, cfg.leaky_slope, &mut rng)?;
    let mut adam = AdamState::new(
        cfg.learning_rate,
        cfg.adam_beta1,
        cfg.adam_beta2,
        cfg.adam_epsilon,
        params.param_count(),
    )?;

    let mut current_power = PowerAllocation::uniform(n, 1.0);
    let mut trace = Vec::with_capacity(cfg.epochs);
    let mut losses = Vec::with_capacity(cfg.epochs);

    for epoch in 0..cfg.epochs {
        let thresholds = thresholds_from_power(&current_power, cfg.bisection.p_s);
        let (m, fwd_trace) = forward_traced(
            &params,
            ch_bob.freq_gains(),
            ch_eve.freq_gains(),
            &thresholds,
        )?;
        let alloc = allocate(ch_eve, &m, &cfg.bisection)?;
        let p_used = if alloc.converged {
            alloc.power.clone()
        } else {
            current_power.clone()
        };

        let epoch_loss = loss(&m, ch_bob, &p_used)?;
        let grads = backward(&params, &fwd_trace, &m, ch_bob, &p_used)?;
        adam_step(&mut adam, &mut params, &grads)?;

        let metrics = evaluate_link(ch_bob, ch_eve, &m, &p_used)?;
        let min_ser = min_eve_ser(&metrics)?;
        trace.push(TrainRecord {
            epoch,
            loss: epoch_loss,
            sum_secrecy_rate: metrics.sum_secrecy_rate,
            min_eve_ser: min_ser,
            constraint_satisfied: alloc.converged
                && min_ser >= cfg.bisection.epsilon_e - cfg.bisection.delta,
        });
        losses.push(epoch_loss);
        if alloc.converged {
            current_power = alloc.power;
        }

        let w = cfg.convergence_window;
        if w > 0 && losses.len() >= 2 * w {
            let recent: f64 = losses[losses.len() - w..].iter().sum::<f64>() / w as f64;
            let earlier: f64 = losses[losses.len() - 2 * w..losses.len() - w]
                .iter()
                .sum::<f64>()
                / w as f64;
            if (recent - earlier).abs() <= cfg.convergence_tol * earlier.abs().max(1e-12) {
                break;
            }
        }
    }

    Ok(TrainOutcome {
        params,
        power: current_power,
        trace,
    })
}

/// One-shot inference with trained parameters: forward with unit-power
/// thresholds, hard mask safeguard, power allocation, metric evaluation.
pub fn infer(
    params: &NetParams,
    ch_bob: &ChannelRealization,
    ch_eve: &ChannelRealization,
    cfg: &JointConfig,
) -> Result<Inference> {
    let n = params.n();
    if ch_bob.num_subcarriers() != n || ch_eve.num_subcarriers() != n {
        return Err(Error::DimensionMismatch {
            context: "joint::infer",
            expected: n,
            actual: ch_bob.num_subcarriers().min(ch_eve.num_subcarriers()),
        });
    }
    let thresholds = vec![cfg.bisection.p_s; n];
    let m = forward(
        params,
        ch_bob.freq_gains(),
        ch_eve.freq_gains(),
        &thresholds,
    )?;
    let m = apply_mask(&m, cfg.bisection.p_s)?;
    let alloc = allocate(ch_eve, &m, &cfg.bisection)?;
    let metrics = evaluate_link(ch_bob, ch_eve, &m, &alloc.power)?;
    Ok(Inference {
        coding: m,
        power: alloc.power,
        metrics,
        allocation_converged: alloc.converged,
    })
}
