//! Parameter update rules.
//!
//! `Sgd` is the plain step `w <- w - lr * g`. The adaptive rules keep per-
//! parameter moment estimates in a [`MomentState`] shaped like the model.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::math;
use crate::net::{BowTieModel, Gradients};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    Sgd,
    Adam,
    Nadam,
    RmsProp,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule::Sgd => "sgd",
            Rule::Adam => "adam",
            Rule::Nadam => "nadam",
            Rule::RmsProp => "rmsprop",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sgd" => Ok(Rule::Sgd),
            "adam" => Ok(Rule::Adam),
            "nadam" => Ok(Rule::Nadam),
            "rmsprop" => Ok(Rule::RmsProp),
            other => Err(Error::InvalidConfig(format!("unknown optimizer {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerSpec {
    pub rule: Rule,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    /// Decay of the RMSProp squared-gradient average.
    pub rho_decay: f64,
    pub epsilon: f64,
}

impl OptimizerSpec {
    /// Defaults: lr 0.001, betas (0.9, 0.999), RMSProp decay 0.9, epsilon 1e-7.
    pub fn new(rule: Rule) -> Self {
        Self {
            rule,
            learning_rate: 0.001,
            beta1: 0.9,
            beta2: 0.999,
            rho_decay: 0.9,
            epsilon: 1e-7,
        }
    }

    pub fn with_learning_rate(mut self, lr: f64) -> Self {
        self.learning_rate = lr;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "learning rate {} must be positive",
                self.learning_rate
            )));
        }
        self.validate_moments()
    }

    fn validate_moments(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "epsilon {} must be positive",
                self.epsilon
            )));
        }
        for (name, v) in [
            ("beta1", self.beta1),
            ("beta2", self.beta2),
            ("rho_decay", self.rho_decay),
        ] {
            if !(0.0..1.0).contains(&v) {
                return Err(Error::InvalidConfig(format!("{name} {v} outside [0, 1)")));
            }
        }
        Ok(())
    }
}

impl Default for OptimizerSpec {
    fn default() -> Self {
        Self::new(Rule::Nadam)
    }
}

/// First and second moment accumulators, one buffer per parameter group
/// (each layer's weights, then its biases).
#[derive(Debug, Clone, PartialEq)]
pub struct MomentState {
    first: Vec<Vec<f64>>,
    second: Vec<Vec<f64>>,
    step: u64,
}

impl MomentState {
    pub fn new(model: &BowTieModel) -> Self {
        let shapes: Vec<usize> = model
            .layers()
            .iter()
            .flat_map(|l| [l.weights().len(), l.bias().len()])
            .collect();
        Self {
            first: shapes.iter().map(|&n| vec![0.0; n]).collect(),
            second: shapes.iter().map(|&n| vec![0.0; n]).collect(),
            step: 0,
        }
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn second_moments(&self) -> impl Iterator<Item = f64> + '_ {
        self.second.iter().flatten().copied()
    }

    pub fn first_moments(&self) -> impl Iterator<Item = f64> + '_ {
        self.first.iter().flatten().copied()
    }
}

/// Per-step scalars shared by every parameter in one update.
#[derive(Clone, Copy)]
struct StepFactors {
    spec: OptimizerSpec,
    /// 1 - beta1^t
    bc1: f64,
    /// 1 - beta2^t
    bc2: f64,
}

impl StepFactors {
    fn new(spec: OptimizerSpec, t: u64) -> Self {
        let t = i32::try_from(t).unwrap_or(i32::MAX);
        Self {
            spec,
            bc1: 1.0 - math::powi(spec.beta1, t),
            bc2: 1.0 - math::powi(spec.beta2, t),
        }
    }

    #[inline]
    fn apply(&self, w: &mut [f64], g: &[f64], m: &mut [f64], v: &mut [f64]) {
        let s = &self.spec;
        let lr = s.learning_rate;
        match s.rule {
            Rule::Sgd => {
                for (w, &g) in w.iter_mut().zip(g) {
                    *w -= lr * g;
                }
            }
            Rule::RmsProp => {
                for ((w, &g), v) in w.iter_mut().zip(g).zip(v.iter_mut()) {
                    *v = s.rho_decay * *v + (1.0 - s.rho_decay) * g * g;
                    *w -= lr * g / (math::sqrt(*v) + s.epsilon);
                }
            }
            Rule::Adam => {
                for (((w, &g), m), v) in w.iter_mut().zip(g).zip(m.iter_mut()).zip(v.iter_mut()) {
                    *m = s.beta1 * *m + (1.0 - s.beta1) * g;
                    *v = s.beta2 * *v + (1.0 - s.beta2) * g * g;
                    let m_hat = *m / self.bc1;
                    let v_hat = *v / self.bc2;
                    *w -= lr * m_hat / (math::sqrt(v_hat) + s.epsilon);
                }
            }
            Rule::Nadam => {
                for (((w, &g), m), v) in w.iter_mut().zip(g).zip(m.iter_mut()).zip(v.iter_mut()) {
                    *m = s.beta1 * *m + (1.0 - s.beta1) * g;
                    *v = s.beta2 * *v + (1.0 - s.beta2) * g * g;
                    let m_hat = *m / self.bc1;
                    let v_hat = *v / self.bc2;
                    let lookahead = s.beta1 * m_hat + (1.0 - s.beta1) * g / self.bc1;
                    *w -= lr * lookahead / (math::sqrt(v_hat) + s.epsilon);
                }
            }
        }
    }
}

/// One optimizer step over every parameter of `model`; increments the step counter.
pub fn apply_update(
    spec: &OptimizerSpec,
    state: &mut MomentState,
    model: &mut BowTieModel,
    grads: &Gradients,
) -> Result<()> {
    spec.validate()?;
    let layers = grads.layers();
    if layers.len() != model.layers().len()
        || state.first.len() != 2 * layers.len()
        || model.layers().iter().zip(layers).enumerate().any(|(i, (l, (dw, db)))| {
            l.weights().len() != dw.len()
                || l.bias().len() != db.len()
                || state.first[2 * i].len() != dw.len()
                || state.first[2 * i + 1].len() != db.len()
        })
    {
        return Err(Error::ShapeMismatch("optimizer update"));
    }
    if grads.iter().any(|g| !g.is_finite()) {
        return Err(Error::NonFinite("gradient"));
    }

    state.step += 1;
    let factors = StepFactors::new(*spec, state.step);
    let (first, second) = (&mut state.first, &mut state.second);
    for (i, (layer, (dw, db))) in model.layers_mut().iter_mut().zip(layers).enumerate() {
        let (w, b) = layer.params_mut();
        let (m_pair, v_pair) = (&mut first[2 * i..2 * i + 2], &mut second[2 * i..2 * i + 2]);
        let (mw, mb) = m_pair.split_at_mut(1);
        let (vw, vb) = v_pair.split_at_mut(1);
        factors.apply(w, dw, &mut mw[0], &mut vw[0]);
        factors.apply(b, db, &mut mb[0], &mut vb[0]);
    }
    if model.parameters().any(|p| !p.is_finite()) {
        return Err(Error::NonFinite("parameter update"));
    }
    Ok(())
}

/// Iterations needed to drive `w` from 5 to `|w| < 1e-3` on `f(w) = w^2`.
pub fn minimize_quadratic_selftest(spec: &OptimizerSpec) -> Result<usize> {
    const MAX_ITERS: usize = 100_000;
    if !(spec.learning_rate >= 0.0 && spec.learning_rate.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "learning rate {} must be non-negative",
            spec.learning_rate
        )));
    }
    spec.validate_moments()?;
    let (mut w, mut m, mut v) = ([5.0], [0.0], [0.0]);
    for k in 1..=MAX_ITERS {
        let g = [2.0 * w[0]];
        StepFactors::new(*spec, k as u64).apply(&mut w, &g, &mut m, &mut v);
        if !w[0].is_finite() {
            return Err(Error::NonFinite("self-test iterate"));
        }
        if w[0].abs() < 1e-3 {
            return Ok(k);
        }
    }
    Err(Error::NoConvergence(MAX_ITERS))
}
