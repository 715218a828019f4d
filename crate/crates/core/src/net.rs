//! The BowTie network: a cascade of dense layers over a sparse input row,
//! inverted dropout after the last hidden layer, and a sigmoid output.
//!
//! Weights are stored row-major with shape `(inputs, outputs)`, so the first
//! layer's forward pass gathers one contiguous row per nonzero input column.
//!
//! Loss is mean binary cross-entropy plus `l2_weight * sum ||W||^2` over all
//! weight matrices (biases are not penalized). Gradients are derived by hand.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::encode::SparseExample;
use crate::error::{Error, Result};
use crate::math;
use crate::seed;

/// Probabilities are clamped to `[PROB_CLAMP, 1 - PROB_CLAMP]` before logs.
pub const PROB_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Activation {
    /// Identity; the cascade is a linear network.
    None,
    Rectifier,
}

impl Activation {
    #[inline]
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::None => z,
            Activation::Rectifier => z.max(0.0),
        }
    }

    #[inline]
    fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::None => 1.0,
            Activation::Rectifier => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Activation::None => "none",
            Activation::Rectifier => "relu",
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" | "linear" => Ok(Activation::None),
            "relu" | "rectifier" => Ok(Activation::Rectifier),
            other => Err(Error::InvalidConfig(format!("unknown activation {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub input_width: usize,
    /// Output widths of each dense layer; the last must be 1.
    pub hidden_widths: Vec<usize>,
    pub activation: Activation,
    pub dropout_rate: f64,
    pub l2_weight: f64,
    pub discriminator: f64,
    pub init_seed: u64,
}

impl ModelConfig {
    pub const DEFAULT_HIDDEN: [usize; 3] = [16, 8, 1];

    /// Defaults: `[16, 8, 1]`, linear, dropout 0.2, L2 0.019, threshold 0.5.
    pub fn new(input_width: usize) -> Self {
        Self {
            input_width,
            hidden_widths: Self::DEFAULT_HIDDEN.to_vec(),
            activation: Activation::None,
            dropout_rate: 0.2,
            l2_weight: 0.019,
            discriminator: 0.5,
            init_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_width == 0 {
            return Err(Error::InvalidConfig("input width must be positive".into()));
        }
        match self.hidden_widths.last() {
            None => return Err(Error::InvalidConfig("at least one layer is required".into())),
            Some(&w) if w != 1 => {
                return Err(Error::InvalidConfig(format!("final layer width must be 1, got {w}")));
            }
            _ => {}
        }
        if self.hidden_widths.contains(&0) {
            return Err(Error::InvalidConfig("layer widths must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return Err(Error::InvalidConfig(format!(
                "dropout rate {} outside [0, 1)",
                self.dropout_rate
            )));
        }
        if !(self.l2_weight >= 0.0 && self.l2_weight.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "l2 weight {} must be >= 0",
                self.l2_weight
            )));
        }
        if !(0.0..=1.0).contains(&self.discriminator) {
            return Err(Error::InvalidConfig(format!(
                "discriminator {} outside [0, 1]",
                self.discriminator
            )));
        }
        Ok(())
    }

    fn shapes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let ins = core::iter::once(self.input_width).chain(self.hidden_widths.iter().copied());
        ins.zip(self.hidden_widths.iter().copied())
    }
}

/// One dense layer, `weights[i * outputs + j]` connects input `i` to output `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    inputs: usize,
    outputs: usize,
    weights: Vec<f64>,
    bias: Vec<f64>,
}

impl Dense {
    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub(crate) fn params_mut(&mut self) -> (&mut [f64], &mut [f64]) {
        (&mut self.weights, &mut self.bias)
    }

    pub fn weight(&self, input: usize, output: usize) -> f64 {
        self.weights[input * self.outputs + output]
    }

    fn param_count(&self) -> usize {
        self.weights.len() + self.bias.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BowTieModel {
    config: ModelConfig,
    layers: Vec<Dense>,
}

/// How dropout is handled during a forward pass.
#[derive(Debug, Clone, Copy)]
pub enum Mode<'m> {
    Inference,
    /// Samples a fresh mask from the given seed.
    Training {
        dropout_seed: u64,
    },
    /// Reuses a mask from an earlier pass (`batch * width` scale factors).
    FrozenMask(&'m [f64]),
}

/// Intermediates of a batch forward pass, kept for backpropagation.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardCache<'a> {
    batch: &'a [SparseExample],
    /// Per hidden layer, `batch * outputs` pre-activations.
    pre: Vec<Vec<f64>>,
    /// Per hidden layer, activations before dropout.
    post: Vec<Vec<f64>>,
    /// Dropout scale factors on the last hidden layer, if a mask was used.
    mask: Option<Vec<f64>>,
    /// Input to the final layer (last hidden activations after dropout).
    final_input: Vec<f64>,
    logits: Vec<f64>,
    probs: Vec<f64>,
}

impl ForwardCache<'_> {
    pub fn batch_size(&self) -> usize {
        self.batch.len()
    }

    /// Clamped probabilities, each strictly inside (0, 1).
    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn logits(&self) -> &[f64] {
        &self.logits
    }

    pub fn mask(&self) -> Option<&[f64]> {
        self.mask.as_deref()
    }

    /// Activations of the last hidden layer before dropout, `batch * width`.
    pub fn last_hidden(&self) -> Option<&[f64]> {
        self.post.last().map(Vec::as_slice)
    }

    /// Activations of the last hidden layer as seen by the final layer.
    pub fn final_input(&self) -> &[f64] {
        &self.final_input
    }
}

/// Per-layer `(dW, db)` with the model's shapes.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    layers: Vec<(Vec<f64>, Vec<f64>)>,
}

impl Gradients {
    pub fn zeros_like(model: &BowTieModel) -> Self {
        Self {
            layers: model
                .layers
                .iter()
                .map(|l| (vec![0.0; l.weights.len()], vec![0.0; l.bias.len()]))
                .collect(),
        }
    }

    pub fn layers(&self) -> &[(Vec<f64>, Vec<f64>)] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [(Vec<f64>, Vec<f64>)] {
        &mut self.layers
    }

    /// Gradient at a flat parameter coordinate (same order as [`BowTieModel::param`]).
    pub fn get(&self, coord: usize) -> f64 {
        let mut c = coord;
        for (dw, db) in &self.layers {
            if c < dw.len() {
                return dw[c];
            }
            c -= dw.len();
            if c < db.len() {
                return db[c];
            }
            c -= db.len();
        }
        panic!("gradient coordinate {coord} out of range");
    }

    pub fn len(&self) -> usize {
        self.layers.iter().map(|(w, b)| w.len() + b.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.layers.iter().flat_map(|(w, b)| w.iter().chain(b.iter()).copied())
    }

    fn matches(&self, model: &BowTieModel) -> bool {
        self.layers.len() == model.layers.len()
            && self
                .layers
                .iter()
                .zip(&model.layers)
                .all(|((w, b), l)| w.len() == l.weights.len() && b.len() == l.bias.len())
    }
}

impl BowTieModel {
    /// Glorot-uniform weights with bound `sqrt(6 / (in + out))`, zero biases.
    pub fn init(config: ModelConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = seed::rng(config.init_seed);
        let layers = config
            .shapes()
            .map(|(inputs, outputs)| {
                let bound = math::sqrt(6.0 / (inputs + outputs) as f64);
                let weights = (0..inputs * outputs).map(|_| rng.gen_range(-bound..bound)).collect();
                Dense {
                    inputs,
                    outputs,
                    weights,
                    bias: vec![0.0; outputs],
                }
            })
            .collect();
        Ok(Self { config, layers })
    }

    /// All-zero parameters; predicts exactly 0.5 for every input.
    pub fn zeros(config: ModelConfig) -> Result<Self> {
        config.validate()?;
        let layers = config
            .shapes()
            .map(|(inputs, outputs)| Dense {
                inputs,
                outputs,
                weights: vec![0.0; inputs * outputs],
                bias: vec![0.0; outputs],
            })
            .collect();
        Ok(Self { config, layers })
    }

    /// Rebuilds a model from the flat parameter order of [`BowTieModel::parameters`].
    pub fn from_parameters(config: ModelConfig, params: &[f64]) -> Result<Self> {
        let mut model = Self::zeros(config)?;
        if params.len() != model.param_count() {
            return Err(Error::LengthMismatch {
                what: "parameter vector",
                expected: model.param_count(),
                found: params.len(),
            });
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite("parameter"));
        }
        let mut off = 0;
        for layer in &mut model.layers {
            let nw = layer.weights.len();
            layer.weights.copy_from_slice(&params[off..off + nw]);
            off += nw;
            let nb = layer.bias.len();
            layer.bias.copy_from_slice(&params[off..off + nb]);
            off += nb;
        }
        Ok(model)
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn layers(&self) -> &[Dense] {
        &self.layers
    }

    pub(crate) fn layers_mut(&mut self) -> &mut [Dense] {
        &mut self.layers
    }

    pub fn set_discriminator(&mut self, delta: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::InvalidConfig(format!("discriminator {delta} outside [0, 1]")));
        }
        self.config.discriminator = delta;
        Ok(())
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(Dense::param_count).sum()
    }

    /// Flat view: per layer, weights (row-major) then biases.
    pub fn parameters(&self) -> impl Iterator<Item = f64> + '_ {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(l.bias.iter()).copied())
    }

    pub fn param(&self, coord: usize) -> f64 {
        *self.locate(coord)
    }

    pub fn set_param(&mut self, coord: usize, value: f64) {
        *self.locate_mut(coord) = value;
    }

    fn locate(&self, coord: usize) -> &f64 {
        let mut c = coord;
        for l in &self.layers {
            if c < l.weights.len() {
                return &l.weights[c];
            }
            c -= l.weights.len();
            if c < l.bias.len() {
                return &l.bias[c];
            }
            c -= l.bias.len();
        }
        panic!("parameter coordinate {coord} out of range");
    }

    fn locate_mut(&mut self, coord: usize) -> &mut f64 {
        let mut c = coord;
        for l in &mut self.layers {
            if c < l.weights.len() {
                return &mut l.weights[c];
            }
            c -= l.weights.len();
            if c < l.bias.len() {
                return &mut l.bias[c];
            }
            c -= l.bias.len();
        }
        panic!("parameter coordinate {coord} out of range");
    }

    /// `sum_l ||W_l||_F^2`, biases excluded.
    pub fn squared_weight_norm(&self) -> f64 {
        self.layers
            .iter()
            .map(|l| l.weights.iter().map(|w| w * w).sum::<f64>())
            .sum()
    }

    fn check_width(&self, ex: &SparseExample) -> Result<()> {
        if ex.width() != self.config.input_width {
            return Err(Error::WidthMismatch {
                expected: self.config.input_width,
                found: ex.width(),
            });
        }
        Ok(())
    }

    /// Batch forward pass.
    ///
    /// `training` samples an inverted-dropout mask from `dropout_seed`;
    /// inference mode applies no mask and no scaling.
    pub fn forward<'a>(
        &self,
        batch: &'a [SparseExample],
        training: bool,
        dropout_seed: u64,
    ) -> Result<ForwardCache<'a>> {
        let mode = if training {
            Mode::Training { dropout_seed }
        } else {
            Mode::Inference
        };
        self.forward_with(batch, mode)
    }

    pub fn forward_with<'a>(&self, batch: &'a [SparseExample], mode: Mode<'_>) -> Result<ForwardCache<'a>> {
        for ex in batch {
            self.check_width(ex)?;
        }
        let n = batch.len();
        let hidden = self.layers.len() - 1;
        let mut pre: Vec<Vec<f64>> = Vec::with_capacity(hidden);
        let mut post: Vec<Vec<f64>> = Vec::with_capacity(hidden);

        for (l, layer) in self.layers[..hidden].iter().enumerate() {
            let mut z = vec![0.0; n * layer.outputs];
            if l == 0 {
                sparse_affine(layer, batch, &mut z);
            } else {
                dense_affine(layer, &post[l - 1], &mut z);
            }
            if z.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("activation"));
            }
            let a = z.iter().map(|&v| self.config.activation.apply(v)).collect();
            pre.push(z);
            post.push(a);
        }

        let (mask, final_input) = match post.last() {
            Some(last) => {
                let mask = self.dropout_mask(mode, last.len())?;
                let dropped = match &mask {
                    Some(m) => last.iter().zip(m).map(|(a, s)| a * s).collect(),
                    None => last.clone(),
                };
                (mask, dropped)
            }
            None => (None, Vec::new()),
        };

        let out = &self.layers[hidden];
        let mut logits = vec![0.0; n];
        if hidden == 0 {
            sparse_affine(out, batch, &mut logits);
        } else {
            dense_affine(out, &final_input, &mut logits);
        }
        if logits.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("activation"));
        }
        let probs = logits.iter().map(|&z| clamp_prob(math::sigmoid(z))).collect();

        Ok(ForwardCache {
            batch,
            pre,
            post,
            mask,
            final_input,
            logits,
            probs,
        })
    }

    fn dropout_mask(&self, mode: Mode<'_>, len: usize) -> Result<Option<Vec<f64>>> {
        match mode {
            Mode::Inference => Ok(None),
            Mode::FrozenMask(m) => {
                if m.len() != len {
                    return Err(Error::ShapeMismatch("dropout mask"));
                }
                Ok(Some(m.to_vec()))
            }
            Mode::Training { dropout_seed } => {
                let rate = self.config.dropout_rate;
                if rate == 0.0 {
                    return Ok(None);
                }
                let keep = 1.0 - rate;
                let scale = 1.0 / keep;
                let mut rng = seed::rng(dropout_seed);
                Ok(Some(
                    (0..len)
                        .map(|_| if rng.gen::<f64>() < keep { scale } else { 0.0 })
                        .collect(),
                ))
            }
        }
    }

    /// Mean binary cross-entropy and `bce + l2 * sum ||W||^2`.
    pub fn loss(&self, cache: &ForwardCache<'_>, labels: &[u8]) -> Result<(f64, f64)> {
        let bce = bce(cache.probabilities(), labels)?;
        Ok((bce, bce + self.config.l2_weight * self.squared_weight_norm()))
    }

    pub fn backward(&self, cache: &ForwardCache<'_>, labels: &[u8]) -> Result<Gradients> {
        let mut grads = Gradients::zeros_like(self);
        self.backward_into(cache, labels, &mut grads)?;
        Ok(grads)
    }

    /// Gradient of the total loss, written into `grads` (overwritten).
    pub fn backward_into(&self, cache: &ForwardCache<'_>, labels: &[u8], grads: &mut Gradients) -> Result<()> {
        let n = cache.batch.len();
        let hidden = self.layers.len() - 1;
        if labels.len() != n {
            return Err(Error::LengthMismatch {
                what: "labels",
                expected: n,
                found: labels.len(),
            });
        }
        if !grads.matches(self) {
            return Err(Error::ShapeMismatch("gradient buffers"));
        }
        let stale = cache.pre.len() != hidden
            || cache.logits.len() != n
            || cache
                .pre
                .iter()
                .zip(&self.layers)
                .any(|(z, l)| z.len() != n * l.outputs)
            || (hidden > 0 && cache.final_input.len() != n * self.layers[hidden - 1].outputs);
        if stale {
            return Err(Error::ShapeMismatch("forward cache"));
        }
        if let Some(&bad) = labels.iter().find(|&&y| y > 1) {
            return Err(Error::InvalidLabel(bad));
        }

        let inv_n = if n == 0 { 0.0 } else { 1.0 / n as f64 };
        let mut delta: Vec<f64> = cache
            .logits
            .iter()
            .zip(labels)
            .map(|(&z, &y)| (math::sigmoid(z) - f64::from(y)) * inv_n)
            .collect();
        let two_l2 = 2.0 * self.config.l2_weight;

        for l in (0..self.layers.len()).rev() {
            let layer = &self.layers[l];
            let (dw, db) = &mut grads.layers[l];
            for (g, &w) in dw.iter_mut().zip(&layer.weights) {
                *g = two_l2 * w;
            }
            db.fill(0.0);
            let outs = layer.outputs;
            for b in 0..n {
                let d = &delta[b * outs..(b + 1) * outs];
                for (acc, &v) in db.iter_mut().zip(d) {
                    *acc += v;
                }
            }

            if l == 0 {
                for (b, ex) in cache.batch.iter().enumerate() {
                    let d = &delta[b * outs..(b + 1) * outs];
                    for &(k, x) in ex.entries() {
                        let row = &mut dw[k as usize * outs..(k as usize + 1) * outs];
                        for (g, &v) in row.iter_mut().zip(d) {
                            *g += x * v;
                        }
                    }
                }
                break;
            }

            let input = if l == hidden {
                &cache.final_input
            } else {
                &cache.post[l - 1]
            };
            let ins = layer.inputs;
            for b in 0..n {
                let d = &delta[b * outs..(b + 1) * outs];
                let a = &input[b * ins..(b + 1) * ins];
                for (i, &ai) in a.iter().enumerate() {
                    if ai == 0.0 {
                        continue;
                    }
                    let row = &mut dw[i * outs..(i + 1) * outs];
                    for (g, &v) in row.iter_mut().zip(d) {
                        *g += ai * v;
                    }
                }
            }

            // propagate to the previous layer's pre-activations
            let mut next = vec![0.0; n * ins];
            for b in 0..n {
                let d = &delta[b * outs..(b + 1) * outs];
                let out = &mut next[b * ins..(b + 1) * ins];
                for (i, o) in out.iter_mut().enumerate() {
                    let row = &layer.weights[i * outs..(i + 1) * outs];
                    *o = row.iter().zip(d).map(|(w, v)| w * v).sum();
                }
            }
            if l == hidden {
                if let Some(mask) = &cache.mask {
                    for (v, s) in next.iter_mut().zip(mask) {
                        *v *= s;
                    }
                }
            }
            for (v, &z) in next.iter_mut().zip(&cache.pre[l - 1]) {
                *v *= self.config.activation.derivative(z);
            }
            delta = next;
        }
        Ok(())
    }

    /// Inference-mode probability for a single example.
    pub fn predict_proba(&self, example: &SparseExample) -> Result<f64> {
        self.check_width(example)?;
        let hidden = self.layers.len() - 1;
        let mut act: Vec<f64> = Vec::new();
        for (l, layer) in self.layers.iter().enumerate() {
            let mut z = layer.bias.clone();
            if l == 0 {
                gather_row(layer, example, &mut z);
            } else {
                dense_row(layer, &act, &mut z);
            }
            if l < hidden {
                for v in &mut z {
                    *v = self.config.activation.apply(*v);
                }
            }
            act = z;
        }
        let logit = act[0];
        if !logit.is_finite() {
            return Err(Error::NonFinite("activation"));
        }
        Ok(clamp_prob(math::sigmoid(logit)))
    }

    /// Probability and category; `p >= discriminator` is positive.
    pub fn predict(&self, example: &SparseExample) -> Result<(f64, u8)> {
        let p = self.predict_proba(example)?;
        Ok((p, self.categorize(p)))
    }

    pub fn categorize(&self, p: f64) -> u8 {
        u8::from(p >= self.config.discriminator)
    }
}

/// `z[b, :] = bias + sum_k x[b, k] * W[k, :]` over the nonzeros of each row.
fn sparse_affine(layer: &Dense, batch: &[SparseExample], z: &mut [f64]) {
    let outs = layer.outputs;
    for (ex, out) in batch.iter().zip(z.chunks_exact_mut(outs)) {
        out.copy_from_slice(&layer.bias);
        gather_row(layer, ex, out);
    }
}

#[inline]
fn gather_row(layer: &Dense, ex: &SparseExample, out: &mut [f64]) {
    let outs = layer.outputs;
    for &(k, x) in ex.entries() {
        let row = &layer.weights[k as usize * outs..(k as usize + 1) * outs];
        for (o, &w) in out.iter_mut().zip(row) {
            *o += x * w;
        }
    }
}

fn dense_affine(layer: &Dense, input: &[f64], z: &mut [f64]) {
    let (ins, outs) = (layer.inputs, layer.outputs);
    for (a, out) in input.chunks_exact(ins).zip(z.chunks_exact_mut(outs)) {
        out.copy_from_slice(&layer.bias);
        dense_row(layer, a, out);
    }
}

#[inline]
fn dense_row(layer: &Dense, a: &[f64], out: &mut [f64]) {
    let outs = layer.outputs;
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0.0 {
            continue;
        }
        let row = &layer.weights[i * outs..(i + 1) * outs];
        for (o, &w) in out.iter_mut().zip(row) {
            *o += ai * w;
        }
    }
}

#[inline]
fn clamp_prob(p: f64) -> f64 {
    p.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP)
}

/// Mean binary cross-entropy over clamped probabilities.
pub fn bce(probs: &[f64], labels: &[u8]) -> Result<f64> {
    if probs.len() != labels.len() {
        return Err(Error::LengthMismatch {
            what: "labels",
            expected: probs.len(),
            found: labels.len(),
        });
    }
    if probs.is_empty() {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    for (&p, &y) in probs.iter().zip(labels) {
        sum += example_bce(p, y)?;
    }
    Ok(sum / probs.len() as f64)
}

#[inline]
pub fn example_bce(p: f64, y: u8) -> Result<f64> {
    let p = clamp_prob(p);
    match y {
        1 => Ok(-math::ln(p)),
        0 => Ok(-math::ln(1.0 - p)),
        other => Err(Error::InvalidLabel(other)),
    }
}

/// `(f(x + h) - f(x - h)) / 2h`.
pub fn central_difference<F: FnMut(f64) -> Result<f64>>(mut f: F, x: f64, h: f64) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "finite-difference step {h} must be positive"
        )));
    }
    Ok((f(x + h)? - f(x - h)?) / (2.0 * h))
}

/// Central-difference estimate of `d total / d param[coord]`.
///
/// Dropout is off unless a frozen `mask` from an earlier training pass is given.
pub fn finite_difference_grad(
    model: &BowTieModel,
    batch: &[SparseExample],
    labels: &[u8],
    coord: usize,
    h: f64,
    mask: Option<&[f64]>,
) -> Result<f64> {
    let mut probe = model.clone();
    let x = model.param(coord);
    central_difference(
        |v| {
            probe.set_param(coord, v);
            let mode = mask.map_or(Mode::Inference, Mode::FrozenMask);
            let cache = probe.forward_with(batch, mode)?;
            Ok(probe.loss(&cache, labels)?.1)
        },
        x,
        h,
    )
}
