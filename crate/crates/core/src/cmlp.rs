//! Complex-valued multilayer perceptron that maps channel state to a secure
//! coding matrix.
//!
//! Each layer holds a pair of real weight matrices emulating one complex
//! linear map; hidden layers use a split LeakyReLU on the real and imaginary
//! parts. The output head emits `N^2` complex values reshaped row-major to
//! `N x N`, then each row is projected onto its power budget. Gradients are
//! propagated by hand through the projection, the activations, and the
//! complex-linear layers; Adam does the parameter updates.
//!
//! Training is single-threaded and deterministic per seed. Trained
//! parameters are immutable afterwards and safe to share read-only across
//! inference workers.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;
use std::path::Path;

use crate::channel::ChannelRealization;
use crate::sigproc::{ComplexMatrix, ComplexVector};
use crate::waveform::{sinr_per_subcarrier, PowerAllocation, SecureCodingMatrix};
use crate::{Error, Result};

/// Hidden layer widths used when none are specified.
pub const DEFAULT_HIDDEN_DIMS: [usize; 3] = [128, 64, 16];

const CHECKPOINT_VERSION: u32 = 1;

/// Row-major real matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    #[cfg(test)]
    fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    fn glorot(rows: usize, cols: usize, rng: &mut impl Rng) -> Self {
        let sigma = (1.0 / (rows + cols) as f64).sqrt();
        Self {
            rows,
            cols,
            data: (0..rows * cols)
                .map(|_| {
                    sigma * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng)
                })
                .collect(),
        }
    }

    fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }
}

/// One complex linear layer: `y = (W_re + i W_im)(x_re + i x_im) + b`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplexLinearLayer {
    w_re: RealMatrix,
    w_im: RealMatrix,
    b_re: Vec<f64>,
    b_im: Vec<f64>,
}

impl ComplexLinearLayer {
    fn glorot(in_dim: usize, out_dim: usize, rng: &mut impl Rng) -> Self {
        Self {
            w_re: RealMatrix::glorot(out_dim, in_dim, rng),
            w_im: RealMatrix::glorot(out_dim, in_dim, rng),
            b_re: vec![0.0; out_dim],
            b_im: vec![0.0; out_dim],
        }
    }

    pub fn in_dim(&self) -> usize {
        self.w_re.cols
    }

    pub fn out_dim(&self) -> usize {
        self.w_re.rows
    }

    /// Forward map: `y_re = W_re x_re - W_im x_im + b_re`,
    /// `y_im = W_re x_im + W_im x_re + b_im`.
    pub fn forward(&self, x_re: &[f64], x_im: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        if x_re.len() != self.in_dim() || x_im.len() != self.in_dim() {
            return Err(Error::DimensionMismatch {
                context: "complex_linear_forward",
                expected: self.in_dim(),
                actual: x_re.len().min(x_im.len()),
            });
        }
        let out = self.out_dim();
        let mut y_re = Vec::with_capacity(out);
        let mut y_im = Vec::with_capacity(out);
        for o in 0..out {
            let row_re = self.w_re.row(o);
            let row_im = self.w_im.row(o);
            let mut acc_re = self.b_re[o];
            let mut acc_im = self.b_im[o];
            for i in 0..x_re.len() {
                acc_re += row_re[i] * x_re[i] - row_im[i] * x_im[i];
                acc_im += row_re[i] * x_im[i] + row_im[i] * x_re[i];
            }
            y_re.push(acc_re);
            y_im.push(acc_im);
        }
        Ok((y_re, y_im))
    }
}

/// Split LeakyReLU applied elementwise to the real and imaginary channels.
pub fn leaky_relu_complex(y_re: &[f64], y_im: &[f64], slope: f64) -> (Vec<f64>, Vec<f64>) {
    let f = |v: f64| if v > 0.0 { v } else { slope * v };
    (
        y_re.iter().map(|&v| f(v)).collect(),
        y_im.iter().map(|&v| f(v)).collect(),
    )
}

/// The network: three hidden complex layers plus the `N^2` output head.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetParams {
    layers: Vec<ComplexLinearLayer>,
    n: usize,
    leaky_slope: f64,
}

impl NetParams {
    /// Glorot-initialized network for `n` subcarriers. The input is the
    /// concatenated diagonals of H and G (2n complex values); the output head
    /// emits `n^2` values.
    pub fn new(
        n: usize,
        hidden_dims: &[usize],
        leaky_slope: f64,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument {
                context: "NetParams::new",
                reason: "subcarrier count must be positive".into(),
            });
        }
        if !(0.01..=0.1).contains(&leaky_slope) {
            return Err(Error::InvalidArgument {
                context: "NetParams::new",
                reason: format!("leaky slope {leaky_slope} outside [0.01, 0.1]"),
            });
        }
        if hidden_dims.contains(&0) {
            return Err(Error::InvalidArgument {
                context: "NetParams::new",
                reason: "hidden dimensions must be positive".into(),
            });
        }
        let mut dims = vec![2 * n];
        dims.extend_from_slice(hidden_dims);
        dims.push(n * n);
        let layers = dims
            .windows(2)
            .map(|w| ComplexLinearLayer::glorot(w[0], w[1], rng))
            .collect();
        Ok(Self {
            layers,
            n,
            leaky_slope,
        })
    }

    pub fn with_default_dims(n: usize, leaky_slope: f64, rng: &mut impl Rng) -> Result<Self> {
        Self::new(n, &DEFAULT_HIDDEN_DIMS, leaky_slope, rng)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn leaky_slope(&self) -> f64 {
        self.leaky_slope
    }

    pub fn layers(&self) -> &[ComplexLinearLayer] {
        &self.layers
    }

    /// Total number of real scalar parameters.
    pub fn param_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| 2 * l.w_re.data.len() + 2 * l.b_re.len())
            .sum()
    }

    /// Reads one parameter by flat index (layer-major: `w_re`, `w_im`,
    /// `b_re`, `b_im`). Used by finite-difference checks and Adam.
    pub fn get_param(&self, index: usize) -> f64 {
        let (l, off) = self.locate(index);
        let layer = &self.layers[l];
        let nw = layer.w_re.data.len();
        let nb = layer.b_re.len();
        if off < nw {
            layer.w_re.data[off]
        } else if off < 2 * nw {
            layer.w_im.data[off - nw]
        } else if off < 2 * nw + nb {
            layer.b_re[off - 2 * nw]
        } else {
            layer.b_im[off - 2 * nw - nb]
        }
    }

    pub fn set_param(&mut self, index: usize, value: f64) {
        let (l, off) = self.locate(index);
        let layer = &mut self.layers[l];
        let nw = layer.w_re.data.len();
        let nb = layer.b_re.len();
        if off < nw {
            layer.w_re.data[off] = value;
        } else if off < 2 * nw {
            layer.w_im.data[off - nw] = value;
        } else if off < 2 * nw + nb {
            layer.b_re[off - 2 * nw] = value;
        } else {
            layer.b_im[off - 2 * nw - nb] = value;
        }
    }

    fn locate(&self, mut index: usize) -> (usize, usize) {
        for (l, layer) in self.layers.iter().enumerate() {
            let size = 2 * layer.w_re.data.len() + 2 * layer.b_re.len();
            if index < size {
                return (l, index);
            }
            index -= size;
        }
        panic!("parameter index out of range");
    }

    /// Zeroes every weight and bias; handy in tests.
    pub fn zero(&mut self) {
        for layer in &mut self.layers {
            layer.w_re.data.iter_mut().for_each(|v| *v = 0.0);
            layer.w_im.data.iter_mut().for_each(|v| *v = 0.0);
            layer.b_re.iter_mut().for_each(|v| *v = 0.0);
            layer.b_im.iter_mut().for_each(|v| *v = 0.0);
        }
    }
}

/// Which projection branch each row took during the forward pass.
#[derive(Debug, Clone, Copy, PartialEq)]
enum RowBranch {
    Interior,
    /// Row energy exceeded the threshold; `scale = sqrt(T / E)`.
    Scaled {
        scale: f64,
        energy: f64,
    },
}

/// Cached intermediate values for one forward pass.
#[derive(Debug, Clone)]
pub struct ForwardTrace {
    /// Input of each layer (real, imaginary).
    layer_inputs: Vec<(Vec<f64>, Vec<f64>)>,
    /// Pre-activation of each hidden layer.
    pre_activations: Vec<(Vec<f64>, Vec<f64>)>,
    /// Raw output head values, length `n^2` each.
    raw_re: Vec<f64>,
    raw_im: Vec<f64>,
    branches: Vec<RowBranch>,
}

/// Projects each row of `m_raw` onto its energy budget: row `k` is unchanged
/// when `||M_k||^2 <= T_k`, otherwise scaled by `sqrt(T_k)/||M_k||` so the
/// post-projection energy equals `T_k` exactly.
pub fn project_rows(m_raw: &ComplexMatrix, thresholds: &[f64]) -> Result<SecureCodingMatrix> {
    let (m, _) = project_rows_with_branches(m_raw, thresholds)?;
    Ok(m)
}

fn project_rows_with_branches(
    m_raw: &ComplexMatrix,
    thresholds: &[f64],
) -> Result<(SecureCodingMatrix, Vec<RowBranch>)> {
    let n = m_raw.rows();
    if thresholds.len() != n || m_raw.cols() != n {
        return Err(Error::DimensionMismatch {
            context: "project_rows",
            expected: n,
            actual: thresholds.len().min(m_raw.cols()),
        });
    }
    if thresholds.iter().any(|&t| t.is_nan() || t <= 0.0) {
        return Err(Error::InvalidArgument {
            context: "project_rows",
            reason: "thresholds must be positive".into(),
        });
    }
    let mut out = ComplexMatrix::zeros(n, n);
    let mut branches = Vec::with_capacity(n);
    for (k, &threshold) in thresholds.iter().enumerate() {
        let energy: f64 = (0..n).map(|j| m_raw.get(k, j).norm_sqr()).sum();
        if energy <= threshold {
            for j in 0..n {
                out.set(k, j, m_raw.get(k, j));
            }
            branches.push(RowBranch::Interior);
        } else {
            let scale = (threshold / energy).sqrt();
            for j in 0..n {
                out.set(k, j, m_raw.get(k, j) * scale);
            }
            branches.push(RowBranch::Scaled { scale, energy });
        }
    }
    Ok((SecureCodingMatrix::new(out)?, branches))
}

/// Hard safeguard applied after projection at inference:
/// `mask_k = max(1, ||M_k||^2 / P_S)` and row `k` is divided by `mask_k`.
pub fn apply_mask(m: &SecureCodingMatrix, p_s: f64) -> Result<SecureCodingMatrix> {
    if p_s.is_nan() || p_s <= 0.0 {
        return Err(Error::InvalidArgument {
            context: "apply_mask",
            reason: format!("power budget must be positive, got {p_s}"),
        });
    }
    let n = m.n();
    let mut out = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        let mask = (m.row_energy(k) / p_s).max(1.0);
        for j in 0..n {
            out.set(k, j, m.get(k, j) / mask);
        }
    }
    SecureCodingMatrix::new(out)
}

fn input_from_channels(
    n: usize,
    h_diag: &ComplexVector,
    g_diag: &ComplexVector,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if h_diag.len() != n || g_diag.len() != n {
        return Err(Error::DimensionMismatch {
            context: "cmlp::forward",
            expected: n,
            actual: h_diag.len().min(g_diag.len()),
        });
    }
    let mut x_re = Vec::with_capacity(2 * n);
    let mut x_im = Vec::with_capacity(2 * n);
    for z in h_diag.iter().chain(g_diag.iter()) {
        x_re.push(z.re);
        x_im.push(z.im);
    }
    Ok((x_re, x_im))
}

/// Inference-path forward pass: hidden layers with LeakyReLU, linear output
/// head, reshape to `N x N`, then the row projection.
pub fn forward(
    params: &NetParams,
    h_diag: &ComplexVector,
    g_diag: &ComplexVector,
    thresholds: &[f64],
) -> Result<SecureCodingMatrix> {
    let (m, _) = forward_traced(params, h_diag, g_diag, thresholds)?;
    Ok(m)
}

/// Forward pass that records everything [`backward`] needs.
pub fn forward_traced(
    params: &NetParams,
    h_diag: &ComplexVector,
    g_diag: &ComplexVector,
    thresholds: &[f64],
) -> Result<(SecureCodingMatrix, ForwardTrace)> {
    let n = params.n;
    let (mut x_re, mut x_im) = input_from_channels(n, h_diag, g_diag)?;
    let num_layers = params.layers.len();
    let mut layer_inputs = Vec::with_capacity(num_layers);
    let mut pre_activations = Vec::with_capacity(num_layers - 1);
    for (idx, layer) in params.layers.iter().enumerate() {
        layer_inputs.push((x_re.clone(), x_im.clone()));
        let (z_re, z_im) = layer.forward(&x_re, &x_im)?;
        if idx + 1 < num_layers {
            let (a_re, a_im) = leaky_relu_complex(&z_re, &z_im, params.leaky_slope);
            pre_activations.push((z_re, z_im));
            x_re = a_re;
            x_im = a_im;
        } else {
            x_re = z_re;
            x_im = z_im;
        }
    }
    let raw = ComplexMatrix::dense(
        n,
        n,
        (0..n * n)
            .map(|i| Complex64::new(x_re[i], x_im[i]))
            .collect(),
    )?;
    let (m, branches) = project_rows_with_branches(&raw, thresholds)?;
    Ok((
        m,
        ForwardTrace {
            layer_inputs,
            pre_activations,
            raw_re: x_re,
            raw_im: x_im,
            branches,
        },
    ))
}

/// Training objective: `-sum_k log2(1 + gamma_k^b)` with the supplied power
/// factors held constant.
pub fn loss(
    m: &SecureCodingMatrix,
    ch_bob: &ChannelRealization,
    p: &PowerAllocation,
) -> Result<f64> {
    let sinrs = sinr_per_subcarrier(ch_bob, m, p)?;
    Ok(-sinrs.iter().map(|&g| (1.0 + g).log2()).sum::<f64>())
}

/// Per-layer parameter gradients in the same flat order as
/// [`NetParams::get_param`].
#[derive(Debug, Clone)]
pub struct Gradients {
    flat: Vec<f64>,
}

impl Gradients {
    pub fn as_slice(&self) -> &[f64] {
        &self.flat
    }

    pub fn get(&self, index: usize) -> f64 {
        self.flat[index]
    }

    pub fn max_abs(&self) -> f64 {
        self.flat.iter().fold(0.0, |a, &b| a.max(b.abs()))
    }
}

/// Gradient of [`loss`] with respect to every network parameter, propagated
/// through the projection branch Jacobians, the LeakyReLU activations, and
/// the complex-linear layers. Power factors are treated as constants.
pub fn backward(
    params: &NetParams,
    trace: &ForwardTrace,
    m: &SecureCodingMatrix,
    ch_bob: &ChannelRealization,
    p: &PowerAllocation,
) -> Result<Gradients> {
    let n = params.n;
    if m.n() != n || ch_bob.num_subcarriers() != n || p.len() != n {
        return Err(Error::DimensionMismatch {
            context: "cmlp::backward",
            expected: n,
            actual: m.n().min(ch_bob.num_subcarriers()).min(p.len()),
        });
    }

    // Gradient of the loss with respect to the projected matrix entries.
    let mut gm_re = vec![0.0f64; n * n];
    let mut gm_im = vec![0.0f64; n * n];
    for k in 0..n {
        let a = p.get(k) * ch_bob.freq_gains()[k].norm_sqr();
        if a == 0.0 {
            continue;
        }
        let d = m.get(k, k).norm_sqr();
        let interference = m.row_interference(k);
        let denom = a * interference + ch_bob.noise_power();
        let gamma = a * d / denom;
        let dl_dgamma = -1.0 / ((1.0 + gamma) * LN_2);
        let diag_coef = dl_dgamma * a / denom;
        let off_coef = -dl_dgamma * a * a * d / (denom * denom);
        for j in 0..n {
            let entry = m.get(k, j);
            let coef = if j == k { diag_coef } else { off_coef };
            gm_re[k * n + j] = coef * 2.0 * entry.re;
            gm_im[k * n + j] = coef * 2.0 * entry.im;
        }
    }

    // Through the projection: identity on the interior branch; the scaled
    // branch applies s * (I - u u^T / E) in the 2n real coordinates of the
    // raw row.
    let mut graw_re = vec![0.0f64; n * n];
    let mut graw_im = vec![0.0f64; n * n];
    for k in 0..n {
        let idx = k * n;
        match trace.branches[k] {
            RowBranch::Interior => {
                graw_re[idx..idx + n].copy_from_slice(&gm_re[idx..idx + n]);
                graw_im[idx..idx + n].copy_from_slice(&gm_im[idx..idx + n]);
            }
            RowBranch::Scaled { scale, energy } => {
                let mut dot = 0.0;
                for j in 0..n {
                    dot += gm_re[idx + j] * trace.raw_re[idx + j]
                        + gm_im[idx + j] * trace.raw_im[idx + j];
                }
                let correction = scale * dot / energy;
                for j in 0..n {
                    graw_re[idx + j] = scale * gm_re[idx + j] - correction * trace.raw_re[idx + j];
                    graw_im[idx + j] = scale * gm_im[idx + j] - correction * trace.raw_im[idx + j];
                }
            }
        }
    }

    // Through the layers, last to first.
    let mut gz_re = graw_re;
    let mut gz_im = graw_im;
    let num_layers = params.layers.len();
    let mut layer_grads: Vec<Vec<f64>> = vec![Vec::new(); num_layers];
    for l in (0..num_layers).rev() {
        let layer = &params.layers[l];
        let (x_re, x_im) = &trace.layer_inputs[l];
        let in_dim = layer.in_dim();
        let out_dim = layer.out_dim();

        let mut flat = vec![0.0f64; 2 * out_dim * in_dim + 2 * out_dim];
        let (gw_re, rest) = flat.split_at_mut(out_dim * in_dim);
        let (gw_im, rest) = rest.split_at_mut(out_dim * in_dim);
        let (gb_re, gb_im) = rest.split_at_mut(out_dim);

        let mut gx_re = vec![0.0f64; in_dim];
        let mut gx_im = vec![0.0f64; in_dim];
        for o in 0..out_dim {
            let gre = gz_re[o];
            let gim = gz_im[o];
            gb_re[o] = gre;
            gb_im[o] = gim;
            let row_re = layer.w_re.row(o);
            let row_im = layer.w_im.row(o);
            let base = o * in_dim;
            for i in 0..in_dim {
                gw_re[base + i] = gre * x_re[i] + gim * x_im[i];
                gw_im[base + i] = -gre * x_im[i] + gim * x_re[i];
                gx_re[i] += row_re[i] * gre + row_im[i] * gim;
                gx_im[i] += -row_im[i] * gre + row_re[i] * gim;
            }
        }
        layer_grads[l] = flat;

        if l > 0 {
            // The layer input was the activation of the previous hidden
            // layer; apply the LeakyReLU derivative at its pre-activation.
            let (z_re, z_im) = &trace.pre_activations[l - 1];
            for i in 0..in_dim {
                if z_re[i] <= 0.0 {
                    gx_re[i] *= params.leaky_slope;
                }
                if z_im[i] <= 0.0 {
                    gx_im[i] *= params.leaky_slope;
                }
            }
            gz_re = gx_re;
            gz_im = gx_im;
        }
    }

    Ok(Gradients {
        flat: layer_grads.concat(),
    })
}

/// Adam accumulator state.
#[derive(Debug, Clone)]
pub struct AdamState {
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    t: u64,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl AdamState {
    pub fn new(
        alpha: f64,
        beta1: f64,
        beta2: f64,
        epsilon: f64,
        param_count: usize,
    ) -> Result<Self> {
        if !(alpha > 0.0
            && epsilon > 0.0
            && (0.0..1.0).contains(&beta1)
            && (0.0..1.0).contains(&beta2))
        {
            return Err(Error::InvalidArgument {
                context: "AdamState::new",
                reason: format!("invalid hyperparameters alpha={alpha} beta1={beta1} beta2={beta2} eps={epsilon}"),
            });
        }
        Ok(Self {
            alpha,
            beta1,
            beta2,
            epsilon,
            t: 0,
            m: vec![0.0; param_count],
            v: vec![0.0; param_count],
        })
    }

    pub fn with_defaults(param_count: usize) -> Self {
        Self::new(1e-3, 0.9, 0.999, 1e-8, param_count).expect("default hyperparameters are valid")
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }
}

/// One Adam update:
/// `m <- b1 m + (1-b1) g`, `v <- b2 v + (1-b2) g^2`, bias-corrected, then
/// `theta <- theta - alpha * m_hat / (sqrt(v_hat) + eps)`.
pub fn adam_step(state: &mut AdamState, params: &mut NetParams, grads: &Gradients) -> Result<()> {
    let count = params.param_count();
    if grads.flat.len() != count || state.m.len() != count {
        return Err(Error::DimensionMismatch {
            context: "adam_step",
            expected: count,
            actual: grads.flat.len().min(state.m.len()),
        });
    }
    state.t += 1;
    let bc1 = 1.0 - state.beta1.powi(state.t as i32);
    let bc2 = 1.0 - state.beta2.powi(state.t as i32);
    for i in 0..count {
        let g = grads.flat[i];
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
        let m_hat = state.m[i] / bc1;
        let v_hat = state.v[i] / bc2;
        let theta = params.get_param(i);
        params.set_param(
            i,
            theta - state.alpha * m_hat / (v_hat.sqrt() + state.epsilon),
        );
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    version: u32,
    params: NetParams,
}

/// Writes a versioned JSON checkpoint; floats round-trip exactly.
pub fn save_checkpoint(params: &NetParams, path: &Path) -> Result<()> {
    let body = serde_json::to_string_pretty(&Checkpoint {
        version: CHECKPOINT_VERSION,
        params: params.clone(),
    })?;
    std::fs::write(path, body)?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<NetParams> {
    let body = std::fs::read_to_string(path)?;
    let ckpt: Checkpoint = serde_json::from_str(&body)?;
    if ckpt.version != CHECKPOINT_VERSION {
        return Err(Error::CheckpointVersion {
            found: ckpt.version,
            expected: CHECKPOINT_VERSION,
        });
    }
    Ok(ckpt.params)
}
