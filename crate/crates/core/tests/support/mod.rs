//! Independent dense reference implementations used as test oracles.
//!
//! Nothing here calls into the sparse kernels under test: inputs are expanded
//! to dense rows and every layer is a plain matrix-vector product.
#![allow(dead_code)]

use bowtie_core::net::{Activation, BowTieModel};
use bowtie_core::{LabeledBag, ModelConfig, PolarityTable, SparseExample};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn dense_row(ex: &SparseExample) -> Vec<f64> {
    let mut row = vec![0.0; ex.width()];
    for &(k, v) in ex.entries() {
        row[k as usize] = v;
    }
    row
}

/// Dense multi-hot row built by walking the bag.
pub fn dense_multi_hot(bag: &LabeledBag, width: usize) -> Vec<f64> {
    let mut row = vec![0.0; width];
    for &(k, _) in bag.counts() {
        row[k as usize] = 1.0;
    }
    row
}

/// Dense `polarity ⊙ counts` row.
pub fn dense_weighted(bag: &LabeledBag, polarity: &PolarityTable, width: usize) -> Vec<f64> {
    let mut counts = vec![0.0; width];
    for &(k, c) in bag.counts() {
        counts[k as usize] = f64::from(c);
    }
    (0..width).map(|k| polarity.rating(k) * counts[k]).collect()
}

/// Layer matrices as `w[i][j]` nested vectors.
pub fn dense_layers(model: &BowTieModel) -> Vec<(Vec<Vec<f64>>, Vec<f64>)> {
    model
        .layers()
        .iter()
        .map(|l| {
            let w = (0..l.inputs())
                .map(|i| (0..l.outputs()).map(|j| l.weight(i, j)).collect())
                .collect();
            (w, l.bias().to_vec())
        })
        .collect()
}

/// Inference-mode probability from a dense forward pass.
pub fn dense_forward(model: &BowTieModel, ex: &SparseExample) -> f64 {
    let cfg = model.config();
    let layers = dense_layers(model);
    let mut a = dense_row(ex);
    let last = layers.len() - 1;
    for (l, (w, b)) in layers.iter().enumerate() {
        let mut z = b.clone();
        for (i, row) in w.iter().enumerate() {
            for (j, wij) in row.iter().enumerate() {
                z[j] += a[i] * wij;
            }
        }
        if l < last && cfg.activation == Activation::Rectifier {
            for v in &mut z {
                *v = v.max(0.0);
            }
        }
        a = z;
    }
    1.0 / (1.0 + (-a[0]).exp())
}

pub fn random_example(rng: &mut ChaCha8Rng, width: usize, scale: f64) -> SparseExample {
    let mut entries = Vec::new();
    for k in 0..width {
        if rng.gen_bool(0.3) {
            let v: f64 = rng.gen_range(-scale..scale);
            if v != 0.0 {
                entries.push((k as u32, v));
            }
        }
    }
    SparseExample::new(entries, width, rng.gen_range(0..2)).unwrap()
}

pub fn random_bag(rng: &mut ChaCha8Rng, width: usize) -> LabeledBag {
    let pairs = (0..rng.gen_range(0..width))
        .map(|_| (rng.gen_range(0..width as u32), rng.gen_range(1..5)))
        .collect::<Vec<_>>();
    LabeledBag::from_unsorted(pairs, rng.gen_range(0..2)).unwrap()
}

/// Random architecture: 1-3 hidden layers of width <= `max_hidden`, then the output unit.
pub fn random_config(rng: &mut ChaCha8Rng, input_width: usize, max_hidden: usize) -> ModelConfig {
    let depth = rng.gen_range(1..=3);
    let mut hidden: Vec<usize> = (0..depth).map(|_| rng.gen_range(1..=max_hidden)).collect();
    hidden.push(1);
    ModelConfig {
        input_width,
        hidden_widths: hidden,
        activation: if rng.gen_bool(0.5) {
            Activation::None
        } else {
            Activation::Rectifier
        },
        dropout_rate: rng.gen_range(0.0..0.5),
        l2_weight: if rng.gen_bool(0.5) { 0.0 } else { 0.019 },
        discriminator: 0.5,
        init_seed: rng.gen(),
    }
}

/// Model with Glorot weights and small random biases, so bias gradients are exercised off zero.
pub fn random_model(rng: &mut ChaCha8Rng, config: ModelConfig) -> BowTieModel {
    let mut m = BowTieModel::init(config).unwrap();
    let mut coord = 0;
    for l in m.layers().to_vec() {
        coord += l.weights().len();
        for _ in 0..l.bias().len() {
            m.set_param(coord, rng.gen_range(-0.3..0.3));
            coord += 1;
        }
    }
    m
}

pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    let denom = analytic.abs() + numeric.abs();
    if denom < 1e-8 {
        (analytic - numeric).abs()
    } else {
        (analytic - numeric).abs() / denom
    }
}
