//! Input-delay neural network: a single-hidden-layer feed-forward classifier
//! over flattened windows or feature vectors, trained full-batch by resilient
//! backpropagation.
//!
//! Two hidden-unit kinds are supported: `tanh(w.x + b)` and Gaussian RBF
//! `exp(-|x - c|^2 / (2 sigma^2))`. The output unit is always `tanh`, so
//! scores live in (-1, 1) and match the +/-1 label encoding; the decision
//! threshold is 0.
//!
//! The trainer adapts one step size per parameter from the gradient sign
//! alone (steps grow by 1.2 on sign agreement, shrink by 0.5 on a flip,
//! clamped to [1e-6, 50]) and keeps the best-loss parameters seen, so the
//! returned model never ends worse than it started. `eta` sets the initial
//! step. Weight decay `lambda` penalizes connection weights (hidden weight
//! matrix and output weights for the tanh kind, output weights only for the
//! RBF kind); biases, centers, and widths are not decayed. A plain
//! gradient-descent trainer using `eta` as learning rate and `alpha` as
//! momentum is provided as well.
//!
//! Training canonicalizes the example order internally, so the trained model
//! does not depend on how the caller ordered the batch.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{Label, LabeledVector};
use crate::error::{Error, Result};

/// Default number of training epochs.
pub const DEFAULT_EPOCHS: usize = 1000;

/// Rprop step-size bounds and adaptation factors.
pub const RPROP_STEP_MIN: f64 = 1e-6;
pub const RPROP_STEP_MAX: f64 = 50.0;
pub const RPROP_GROW: f64 = 1.2;
pub const RPROP_SHRINK: f64 = 0.5;

/// Floor applied to RBF widths after each update step.
const MIN_RBF_WIDTH: f64 = 1e-4;

/// Magnitude of the uniform weight initialization.
const INIT_SCALE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HiddenKind {
    Sigmoid,
    Rbf,
}

/// Hyperparameters of one network plus its training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdnnConfig {
    pub n_in: usize,
    pub n_hidden: usize,
    pub hidden_kind: HiddenKind,
    /// Initial Rprop step size (learning rate under plain gradient descent).
    pub eta: f64,
    /// Momentum, used only by the plain gradient-descent trainer.
    pub alpha: f64,
    /// L2 weight decay on connection weights.
    pub lambda: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl IdnnConfig {
    pub fn new(n_in: usize, n_hidden: usize, hidden_kind: HiddenKind) -> Self {
        IdnnConfig {
            n_in,
            n_hidden,
            hidden_kind,
            eta: 0.1,
            alpha: 0.0,
            lambda: 0.0,
            epochs: DEFAULT_EPOCHS,
            seed: crate::DEFAULT_SEED,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_in < 1 || self.n_hidden < 1 {
            return Err(Error::Argument(
                "n_in and n_hidden must be at least 1".into(),
            ));
        }
        if !(self.eta > 0.0) {
            return Err(Error::Argument(format!("eta must be > 0, got {}", self.eta)));
        }
        if !(self.alpha >= 0.0) || !(self.lambda >= 0.0) {
            return Err(Error::Argument("alpha and lambda must be >= 0".into()));
        }
        Ok(())
    }
}

/// Trained (or freshly initialized) network parameters.
///
/// Parameters sit in one flat vector: the hidden matrix (weights or RBF
/// centers, row per hidden unit), one scalar per hidden unit (bias or RBF
/// width), the output weights, and the output bias.
#[derive(Debug, Clone, PartialEq)]
pub struct IdnnModel {
    n_in: usize,
    n_hidden: usize,
    hidden_kind: HiddenKind,
    params: Vec<f64>,
}

impl IdnnModel {
    pub fn from_parts(
        n_in: usize,
        n_hidden: usize,
        hidden_kind: HiddenKind,
        hidden_matrix: Vec<f64>,
        hidden_scalars: Vec<f64>,
        output_weights: Vec<f64>,
        output_bias: f64,
    ) -> Result<Self> {
        if hidden_matrix.len() != n_in * n_hidden
            || hidden_scalars.len() != n_hidden
            || output_weights.len() != n_hidden
        {
            return Err(Error::Argument("parameter array sizes disagree with dims".into()));
        }
        let mut params = hidden_matrix;
        params.extend(hidden_scalars);
        params.extend(output_weights);
        params.push(output_bias);
        if !params.iter().all(|p| p.is_finite()) {
            return Err(Error::Argument("non-finite parameter".into()));
        }
        if hidden_kind == HiddenKind::Rbf {
            let model = IdnnModel {
                n_in,
                n_hidden,
                hidden_kind,
                params,
            };
            if model.hidden_scalars().iter().any(|&s| !(s > 0.0)) {
                return Err(Error::Argument("rbf widths must be > 0".into()));
            }
            return Ok(model);
        }
        Ok(IdnnModel {
            n_in,
            n_hidden,
            hidden_kind,
            params,
        })
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_hidden(&self) -> usize {
        self.n_hidden
    }

    pub fn hidden_kind(&self) -> HiddenKind {
        self.hidden_kind
    }

    /// Hidden weight matrix (tanh kind) or center matrix (RBF kind), row-major.
    pub fn hidden_matrix(&self) -> &[f64] {
        &self.params[..self.n_in * self.n_hidden]
    }

    /// Hidden biases (tanh kind) or RBF widths.
    pub fn hidden_scalars(&self) -> &[f64] {
        let base = self.n_in * self.n_hidden;
        &self.params[base..base + self.n_hidden]
    }

    pub fn output_weights(&self) -> &[f64] {
        let base = self.n_in * self.n_hidden + self.n_hidden;
        &self.params[base..base + self.n_hidden]
    }

    pub fn output_bias(&self) -> f64 {
        *self.params.last().unwrap()
    }

    fn param_count(&self) -> usize {
        self.params.len()
    }

    fn scalar_offset(&self) -> usize {
        self.n_in * self.n_hidden
    }

    fn out_w_offset(&self) -> usize {
        self.n_in * self.n_hidden + self.n_hidden
    }

    fn hidden_row(&self, j: usize) -> &[f64] {
        &self.params[j * self.n_in..(j + 1) * self.n_in]
    }

    fn hidden_activations(&self, x: &[f64], h: &mut [f64]) {
        match self.hidden_kind {
            HiddenKind::Sigmoid => {
                for j in 0..self.n_hidden {
                    let row = self.hidden_row(j);
                    let a: f64 = row.iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>()
                        + self.hidden_scalars()[j];
                    h[j] = a.tanh();
                }
            }
            HiddenKind::Rbf => {
                for j in 0..self.n_hidden {
                    let row = self.hidden_row(j);
                    let d2: f64 = row.iter().zip(x).map(|(c, xi)| (xi - c) * (xi - c)).sum();
                    let sigma = self.hidden_scalars()[j];
                    h[j] = (-d2 / (2.0 * sigma * sigma)).exp();
                }
            }
        }
    }

    /// Network score in (-1, 1).
    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n_in {
            return Err(Error::Argument(format!(
                "input has {} values, model expects {}",
                x.len(),
                self.n_in
            )));
        }
        let mut h = vec![0.0; self.n_hidden];
        self.hidden_activations(x, &mut h);
        let z: f64 = self
            .output_weights()
            .iter()
            .zip(&h)
            .map(|(v, hj)| v * hj)
            .sum::<f64>()
            + self.output_bias();
        Ok(z.tanh())
    }

    pub fn predict(&self, x: &[f64]) -> Result<Label> {
        Ok(Label::from_score(self.forward(x)?))
    }

    /// True for indices subject to weight decay.
    fn decayed(&self, idx: usize) -> bool {
        let in_out_w = idx >= self.out_w_offset() && idx + 1 < self.param_count();
        match self.hidden_kind {
            HiddenKind::Sigmoid => idx < self.scalar_offset() || in_out_w,
            HiddenKind::Rbf => in_out_w,
        }
    }

    /// Regularized mean squared error over a batch.
    pub fn loss(&self, batch: &[LabeledVector], lambda: f64) -> Result<f64> {
        if batch.is_empty() {
            return Err(Error::Argument("loss needs a non-empty batch".into()));
        }
        let mut sum = 0.0;
        for ex in batch {
            let e = self.forward(&ex.values)? - ex.label.as_f64();
            sum += e * e;
        }
        let mut penalty = 0.0;
        for (idx, p) in self.params.iter().enumerate() {
            if self.decayed(idx) {
                penalty += p * p;
            }
        }
        Ok(sum / batch.len() as f64 + lambda * penalty)
    }

    /// Analytic gradient of [`IdnnModel::loss`] with respect to every
    /// parameter, in flat parameter order.
    pub fn gradient(&self, batch: &[LabeledVector], lambda: f64) -> Result<Vec<f64>> {
        if batch.is_empty() {
            return Err(Error::Argument("gradient needs a non-empty batch".into()));
        }
        let n = batch.len() as f64;
        let mut grad = vec![0.0; self.param_count()];
        let mut h = vec![0.0; self.n_hidden];
        let scalar_off = self.scalar_offset();
        let out_w_off = self.out_w_offset();
        let out_b_idx = self.param_count() - 1;
        for ex in batch {
            let x = ex.values.as_slice();
            if x.len() != self.n_in {
                return Err(Error::Argument(format!(
                    "input has {} values, model expects {}",
                    x.len(),
                    self.n_in
                )));
            }
            self.hidden_activations(x, &mut h);
            let z: f64 = self
                .output_weights()
                .iter()
                .zip(&h)
                .map(|(v, hj)| v * hj)
                .sum::<f64>()
                + self.output_bias();
            let f = z.tanh();
            let dz = 2.0 / n * (f - ex.label.as_f64()) * (1.0 - f * f);
            grad[out_b_idx] += dz;
            for j in 0..self.n_hidden {
                grad[out_w_off + j] += dz * h[j];
                let coef = dz * self.output_weights()[j];
                match self.hidden_kind {
                    HiddenKind::Sigmoid => {
                        let da = coef * (1.0 - h[j] * h[j]);
                        grad[scalar_off + j] += da;
                        let row = j * self.n_in;
                        for (i, xi) in x.iter().enumerate() {
                            grad[row + i] += da * xi;
                        }
                    }
                    HiddenKind::Rbf => {
                        let sigma = self.hidden_scalars()[j];
                        let gh = coef * h[j];
                        let row = j * self.n_in;
                        let mut d2 = 0.0;
                        for (i, xi) in x.iter().enumerate() {
                            let diff = xi - self.params[row + i];
                            d2 += diff * diff;
                            grad[row + i] += gh * diff / (sigma * sigma);
                        }
                        grad[scalar_off + j] += gh * d2 / (sigma * sigma * sigma);
                    }
                }
            }
        }
        for (idx, g) in grad.iter_mut().enumerate() {
            if self.decayed(idx) {
                *g += 2.0 * lambda * self.params[idx];
            }
        }
        Ok(grad)
    }
}

/// A trained model plus its loss trace. `loss_trace[e]` is the best training
/// loss reached within the first `e` epochs (entry 0 is the initial loss),
/// which is the loss of the model the trainer would return after that epoch.
#[derive(Debug, Clone)]
pub struct IdnnTraining {
    pub model: IdnnModel,
    pub loss_trace: Vec<f64>,
}

fn canonical_order(data: &[LabeledVector]) -> Vec<&LabeledVector> {
    let mut refs: Vec<&LabeledVector> = data.iter().collect();
    refs.sort_by(|a, b| {
        for (x, y) in a.values.iter().zip(&b.values) {
            let c = x.total_cmp(y);
            if c != std::cmp::Ordering::Equal {
                return c;
            }
        }
        a.values
            .len()
            .cmp(&b.values.len())
            .then_with(|| a.label.as_f64().total_cmp(&b.label.as_f64()))
    });
    refs
}

fn check_trainable(cfg: &IdnnConfig, data: &[LabeledVector]) -> Result<()> {
    cfg.validate()?;
    if data.len() < 2 {
        return Err(Error::Training("need at least 2 examples".into()));
    }
    if !(data.iter().any(|d| d.label.is_positive()) && data.iter().any(|d| !d.label.is_positive()))
    {
        return Err(Error::Training("training data has a single class".into()));
    }
    if let Some(bad) = data.iter().find(|d| d.values.len() != cfg.n_in) {
        return Err(Error::Training(format!(
            "example has {} values, config expects {}",
            bad.values.len(),
            cfg.n_in
        )));
    }
    Ok(())
}

fn init_model(cfg: &IdnnConfig, ordered: &[&LabeledVector], rng: &mut ChaCha8Rng) -> IdnnModel {
    let (n_in, n_hidden) = (cfg.n_in, cfg.n_hidden);
    let mut matrix = vec![0.0; n_in * n_hidden];
    let mut scalars = vec![0.0; n_hidden];
    match cfg.hidden_kind {
        HiddenKind::Sigmoid => {
            for w in matrix.iter_mut().chain(scalars.iter_mut()) {
                *w = rng.random_range(-INIT_SCALE..INIT_SCALE);
            }
        }
        HiddenKind::Rbf => {
            // centers are distinct training examples (cycled when the batch
            // is smaller than the hidden layer)
            let picks = rand::seq::index::sample(rng, ordered.len(), n_hidden.min(ordered.len()));
            for j in 0..n_hidden {
                let src = &ordered[picks.index(j % picks.len())].values;
                matrix[j * n_in..(j + 1) * n_in].copy_from_slice(src);
            }
            // shared initial width: median pairwise distance between centers
            let mut dists = Vec::new();
            for a in 0..n_hidden {
                for b in (a + 1)..n_hidden {
                    let d: f64 = (0..n_in)
                        .map(|i| {
                            let diff = matrix[a * n_in + i] - matrix[b * n_in + i];
                            diff * diff
                        })
                        .sum::<f64>()
                        .sqrt();
                    dists.push(d);
                }
            }
            dists.sort_by(f64::total_cmp);
            let width = match dists.get(dists.len() / 2) {
                Some(&d) if d > 0.0 => d,
                _ => 1.0,
            };
            scalars.fill(width);
        }
    }
    let out_w: Vec<f64> = (0..n_hidden)
        .map(|_| rng.random_range(-INIT_SCALE..INIT_SCALE))
        .collect();
    let out_b = rng.random_range(-INIT_SCALE..INIT_SCALE);
    IdnnModel::from_parts(n_in, n_hidden, cfg.hidden_kind, matrix, scalars, out_w, out_b)
        .expect("init produces consistent parameter arrays")
}

fn clamp_rbf_widths(model: &mut IdnnModel) {
    if model.hidden_kind == HiddenKind::Rbf {
        let off = model.scalar_offset();
        for j in 0..model.n_hidden {
            let p = &mut model.params[off + j];
            if *p < MIN_RBF_WIDTH {
                *p = MIN_RBF_WIDTH;
            }
        }
    }
}

fn run_training(
    cfg: &IdnnConfig,
    data: &[LabeledVector],
    mut update: impl FnMut(&mut IdnnModel, &[f64]),
) -> Result<IdnnTraining> {
    check_trainable(cfg, data)?;
    let ordered = canonical_order(data);
    let batch: Vec<LabeledVector> = ordered.iter().map(|&d| d.clone()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut model = init_model(cfg, &ordered, &mut rng);

    let mut best = model.clone();
    let mut best_loss = model.loss(&batch, cfg.lambda)?;
    let mut trace = Vec::with_capacity(cfg.epochs + 1);
    trace.push(best_loss);
    for _ in 0..cfg.epochs {
        let grad = model.gradient(&batch, cfg.lambda)?;
        update(&mut model, &grad);
        clamp_rbf_widths(&mut model);
        let loss = model.loss(&batch, cfg.lambda)?;
        if loss < best_loss {
            best_loss = loss;
            best = model.clone();
        }
        trace.push(best_loss);
    }
    Ok(IdnnTraining {
        model: best,
        loss_trace: trace,
    })
}

/// Full-batch Rprop training (sign-based per-parameter step adaptation).
pub fn train_rprop(cfg: &IdnnConfig, data: &[LabeledVector]) -> Result<IdnnTraining> {
    let mut steps: Vec<f64> = Vec::new();
    let mut prev: Vec<f64> = Vec::new();
    run_training(cfg, data, move |model, grad| {
        if steps.is_empty() {
            steps = vec![cfg.eta; grad.len()];
            prev = vec![0.0; grad.len()];
        }
        for (idx, &g) in grad.iter().enumerate() {
            let agree = g * prev[idx];
            if agree > 0.0 {
                steps[idx] = (steps[idx] * RPROP_GROW).min(RPROP_STEP_MAX);
            } else if agree < 0.0 {
                steps[idx] = (steps[idx] * RPROP_SHRINK).max(RPROP_STEP_MIN);
            }
            if g > 0.0 {
                model.params[idx] -= steps[idx];
            } else if g < 0.0 {
                model.params[idx] += steps[idx];
            }
            prev[idx] = g;
        }
    })
}

/// Plain full-batch gradient descent with learning rate `eta` and momentum
/// `alpha`. Kept alongside Rprop for completeness; Rprop is the default.
pub fn train_gd(cfg: &IdnnConfig, data: &[LabeledVector]) -> Result<IdnnTraining> {
    let mut velocity: Vec<f64> = Vec::new();
    run_training(cfg, data, move |model, grad| {
        if velocity.is_empty() {
            velocity = vec![0.0; grad.len()];
        }
        for (idx, &g) in grad.iter().enumerate() {
            velocity[idx] = cfg.alpha * velocity[idx] - cfg.eta * g;
            model.params[idx] += velocity[idx];
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ex(values: Vec<f64>, label: Label) -> LabeledVector {
        LabeledVector { values, label }
    }

    fn xor_data() -> Vec<LabeledVector> {
        vec![
            ex(vec![-1.0, -1.0], Label::Negative),
            ex(vec![-1.0, 1.0], Label::Positive),
            ex(vec![1.0, -1.0], Label::Positive),
            ex(vec![1.0, 1.0], Label::Negative),
        ]
    }

    #[test]
    fn zero_model_scores_zero_and_predicts_positive() {
        let m = IdnnModel::from_parts(
            3,
            2,
            HiddenKind::Sigmoid,
            vec![0.0; 6],
            vec![0.0; 2],
            vec![0.0; 2],
            0.0,
        )
        .unwrap();
        let score = m.forward(&[0.5, -0.5, 1.0]).unwrap();
        assert_eq!(score, 0.0);
        assert_eq!(m.predict(&[0.5, -0.5, 1.0]).unwrap(), Label::Positive);
    }

    #[test]
    fn rbf_unit_at_its_center_outputs_one() {
        let center = vec![0.3, -0.7];
        let m = IdnnModel::from_parts(
            2,
            1,
            HiddenKind::Rbf,
            center.clone(),
            vec![0.5],
            vec![1.0],
            0.0,
        )
        .unwrap();
        // score = tanh(1.0) because the single unit is exactly at its center
        assert_relative_eq!(m.forward(&center).unwrap(), 1.0f64.tanh(), epsilon = 1e-15);
    }

    #[test]
    fn hand_built_2_2_1_network_matches_traced_arithmetic() {
        let m = IdnnModel::from_parts(
            2,
            2,
            HiddenKind::Sigmoid,
            vec![1.0, 1.0, 1.0, 1.0],
            vec![1.0, 1.0],
            vec![1.0, 1.0],
            1.0,
        )
        .unwrap();
        let h = 1.0f64.tanh(); // each hidden unit: tanh(1*1 + 1*(-1) + 1)
        let expected = (2.0 * h + 1.0).tanh();
        assert_relative_eq!(m.forward(&[1.0, -1.0]).unwrap(), expected, max_relative = 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_argument_error() {
        let m = IdnnModel::from_parts(
            2,
            1,
            HiddenKind::Sigmoid,
            vec![0.1, 0.2],
            vec![0.0],
            vec![0.3],
            0.0,
        )
        .unwrap();
        assert!(matches!(m.forward(&[1.0]), Err(Error::Argument(_))));
    }

    #[test]
    fn zero_error_batch_has_zero_gradient_without_decay() {
        // a large output bias saturates tanh to exactly 1.0, so scores equal
        // the +1 targets and the loss sits at its minimum
        let m = IdnnModel::from_parts(
            1,
            1,
            HiddenKind::Sigmoid,
            vec![0.5],
            vec![0.1],
            vec![0.2],
            25.0,
        )
        .unwrap();
        let batch = vec![ex(vec![1.0], Label::Positive), ex(vec![-2.0], Label::Positive)];
        assert_eq!(m.loss(&batch, 0.0).unwrap(), 0.0);
        let grad = m.gradient(&batch, 0.0).unwrap();
        for g in grad {
            assert_eq!(g, 0.0);
        }
    }

    #[test]
    fn decay_gradient_is_two_lambda_times_weights() {
        // same cancelling batch as above, so the data term vanishes and only
        // the penalty remains
        let m = IdnnModel::from_parts(
            1,
            2,
            HiddenKind::Sigmoid,
            vec![0.0, 0.0],
            vec![0.0, 0.0],
            vec![0.25, -0.5],
            0.0,
        )
        .unwrap();
        let batch = vec![ex(vec![1.0], Label::Positive), ex(vec![1.0], Label::Negative)];
        let lambda = 0.01;
        let grad = m.gradient(&batch, lambda).unwrap();
        let out_w_off = 2 + 2;
        assert_relative_eq!(grad[out_w_off], 2.0 * lambda * 0.25, epsilon = 1e-15);
        assert_relative_eq!(grad[out_w_off + 1], 2.0 * lambda * -0.5, epsilon = 1e-15);
        // bias gradient carries no decay
        assert_relative_eq!(grad[out_w_off + 2], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn default_epochs_is_1000() {
        let cfg = IdnnConfig::new(2, 2, HiddenKind::Sigmoid);
        assert_eq!(cfg.epochs, DEFAULT_EPOCHS);
        assert_eq!(DEFAULT_EPOCHS, 1000);
    }

    #[test]
    fn rprop_solves_xor() {
        let mut cfg = IdnnConfig::new(2, 5, HiddenKind::Sigmoid);
        cfg.seed = 7;
        let run = train_rprop(&cfg, &xor_data()).unwrap();
        let final_loss = *run.loss_trace.last().unwrap();
        assert!(final_loss < 0.05, "XOR MSE stayed at {final_loss}");
        for d in xor_data() {
            assert_eq!(run.model.predict(&d.values).unwrap(), d.label);
        }
    }

    #[test]
    fn loss_trace_never_increases() {
        let mut cfg = IdnnConfig::new(2, 3, HiddenKind::Rbf);
        cfg.epochs = 50;
        let run = train_rprop(&cfg, &xor_data()).unwrap();
        assert_eq!(run.loss_trace.len(), 51);
        for pair in run.loss_trace.windows(2) {
            assert!(pair[1] <= pair[0]);
        }
        assert!(run.loss_trace.last().unwrap() <= run.loss_trace.first().unwrap());
    }

    #[test]
    fn training_rejects_single_class() {
        let cfg = IdnnConfig::new(2, 2, HiddenKind::Sigmoid);
        let data = vec![ex(vec![0.0, 0.0], Label::Positive), ex(vec![1.0, 1.0], Label::Positive)];
        assert!(matches!(train_rprop(&cfg, &data), Err(Error::Training(_))));
    }

    #[test]
    fn training_is_invariant_to_example_order() {
        let mut cfg = IdnnConfig::new(2, 4, HiddenKind::Sigmoid);
        cfg.epochs = 120;
        let data = xor_data();
        let mut reversed = data.clone();
        reversed.reverse();
        let a = train_rprop(&cfg, &data).unwrap();
        let b = train_rprop(&cfg, &reversed).unwrap();
        assert_eq!(a.model, b.model);

        let mut rbf_cfg = IdnnConfig::new(2, 3, HiddenKind::Rbf);
        rbf_cfg.epochs = 60;
        let a = train_rprop(&rbf_cfg, &data).unwrap();
        let b = train_rprop(&rbf_cfg, &reversed).unwrap();
        assert_eq!(a.model, b.model);
    }

    #[test]
    fn gd_trainer_reduces_loss() {
        let mut cfg = IdnnConfig::new(2, 5, HiddenKind::Sigmoid);
        cfg.eta = 0.05;
        cfg.alpha = 0.9;
        cfg.epochs = 400;
        let run = train_gd(&cfg, &xor_data()).unwrap();
        assert!(run.loss_trace.last().unwrap() < run.loss_trace.first().unwrap());
    }
}
