//! Leaky echo state network for per-timestep stream classification.
//!
//! A fixed random reservoir (sparse recurrent weights rescaled to a target
//! spectral radius, dense 4-input weights) is driven by the raw stream; only
//! the linear readout is trained, by closed-form ridge regression on the
//! reservoir states collected after a washout period. The state update is
//! the standard leaky integrator
//!
//! ```text
//! x' = (1 - a) * x + a * tanh(W_in u + W x)
//! ```
//!
//! which the reservoir literature pairs with a spectral radius below 1 for
//! the echo state property; the default here is 0.9.

use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{Label, TimeSeries, CHANNEL_COUNT};
use crate::error::{Error, Result};

/// Default steps excluded from readout fitting (1 s at 25 Hz).
pub const DEFAULT_WASHOUT: usize = 25;

/// Default target spectral radius of the recurrent weights.
pub const DEFAULT_SPECTRAL_RADIUS: f64 = 0.9;

/// Default readout regularizer.
pub const DEFAULT_RIDGE_BETA: f64 = 1e-6;

/// Reservoir and readout hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EsnConfig {
    pub n_reservoir: usize,
    pub input_scaling: f64,
    /// Leak rate `a` in (0, 1].
    pub leaky: f64,
    /// Fraction of nonzero recurrent weights in (0, 1].
    pub connectivity: f64,
    pub spectral_radius: f64,
    pub ridge_beta: f64,
    pub washout: usize,
    pub seed: u64,
}

impl EsnConfig {
    /// Defaults matching the selected stream classifier: input scaling 0.01,
    /// leak rate 0.5, connectivity 0.5%.
    pub fn new(n_reservoir: usize) -> Self {
        EsnConfig {
            n_reservoir,
            input_scaling: 0.01,
            leaky: 0.5,
            connectivity: 0.005,
            spectral_radius: DEFAULT_SPECTRAL_RADIUS,
            ridge_beta: DEFAULT_RIDGE_BETA,
            washout: DEFAULT_WASHOUT,
            seed: crate::DEFAULT_SEED,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_reservoir < 1 {
            return Err(Error::Argument("reservoir needs at least 1 unit".into()));
        }
        if !(self.leaky > 0.0 && self.leaky <= 1.0) {
            return Err(Error::Argument(format!(
                "leak rate must lie in (0, 1], got {}",
                self.leaky
            )));
        }
        if !(self.connectivity > 0.0 && self.connectivity <= 1.0) {
            return Err(Error::Argument(format!(
                "connectivity must lie in (0, 1], got {}",
                self.connectivity
            )));
        }
        if !(self.spectral_radius > 0.0) {
            return Err(Error::Argument(format!(
                "spectral radius must be > 0, got {}",
                self.spectral_radius
            )));
        }
        if !(self.input_scaling > 0.0) {
            return Err(Error::Argument(format!(
                "input scaling must be > 0, got {}",
                self.input_scaling
            )));
        }
        if !(self.ridge_beta >= 0.0) {
            return Err(Error::Argument(format!(
                "ridge beta must be >= 0, got {}",
                self.ridge_beta
            )));
        }
        Ok(())
    }

    /// Number of recurrent weights: `max(n, round(connectivity * n^2))`, so
    /// even tiny reservoirs keep one nonzero per row on average.
    pub fn nnz(&self) -> usize {
        let n = self.n_reservoir;
        let wanted = (self.connectivity * (n * n) as f64).round() as usize;
        wanted.max(n)
    }
}

/// Linear readout over reservoir states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Readout {
    pub weights: Vec<f64>,
    pub bias: f64,
}

/// Reservoir weights plus (once fitted) the readout.
#[derive(Debug, Clone, PartialEq)]
pub struct EsnModel {
    config: EsnConfig,
    /// Dense input weights, row-major `n_reservoir x 4`.
    w_in: Vec<f64>,
    /// Sparse recurrent weights as (row, col, value), sorted by position.
    w: Vec<(usize, usize, f64)>,
    readout: Option<Readout>,
}

impl EsnModel {
    pub fn config(&self) -> &EsnConfig {
        &self.config
    }

    pub fn w_in(&self) -> &[f64] {
        &self.w_in
    }

    pub fn w(&self) -> &[(usize, usize, f64)] {
        &self.w
    }

    pub fn readout(&self) -> Option<&Readout> {
        self.readout.as_ref()
    }

    /// Rebuilds a model from stored weights (artifact loading, tests).
    pub fn from_parts(
        config: EsnConfig,
        w_in: Vec<f64>,
        w: Vec<(usize, usize, f64)>,
        readout: Option<Readout>,
    ) -> Result<Self> {
        config.validate()?;
        let n = config.n_reservoir;
        if w_in.len() != n * CHANNEL_COUNT {
            return Err(Error::Argument(format!(
                "w_in must hold {} values, got {}",
                n * CHANNEL_COUNT,
                w_in.len()
            )));
        }
        if w.iter().any(|&(r, c, _)| r >= n || c >= n) {
            return Err(Error::Argument("recurrent weight index out of range".into()));
        }
        if let Some(ro) = &readout {
            if ro.weights.len() != n {
                return Err(Error::Argument(format!(
                    "readout must hold {n} weights, got {}",
                    ro.weights.len()
                )));
            }
        }
        Ok(EsnModel {
            config,
            w_in,
            w,
            readout,
        })
    }

    /// One leaky-integrator update. `state` must hold `n_reservoir` values
    /// and `input` the 4 channel values of one timestep.
    pub fn step(&self, state: &[f64], input: &[f64]) -> Result<Vec<f64>> {
        let n = self.config.n_reservoir;
        if state.len() != n {
            return Err(Error::Argument(format!(
                "state has {} values, reservoir has {n}",
                state.len()
            )));
        }
        if input.len() != CHANNEL_COUNT {
            return Err(Error::Argument(format!(
                "input has {} values, expected {CHANNEL_COUNT}",
                input.len()
            )));
        }
        let mut next = vec![0.0; n];
        self.step_into(state, input, &mut next);
        Ok(next)
    }

    fn step_into(&self, state: &[f64], input: &[f64], next: &mut [f64]) {
        let n = self.config.n_reservoir;
        let a = self.config.leaky;
        for (i, nx) in next.iter_mut().enumerate().take(n) {
            let mut pre = 0.0;
            let row = &self.w_in[i * CHANNEL_COUNT..(i + 1) * CHANNEL_COUNT];
            for (w, u) in row.iter().zip(input) {
                pre += w * u;
            }
            *nx = pre;
        }
        for &(r, c, v) in &self.w {
            next[r] += v * state[c];
        }
        for (nx, x) in next.iter_mut().zip(state) {
            *nx = (1.0 - a) * x + a * nx.tanh();
        }
    }

    /// Runs the reservoir from a zero state over a whole stream and returns
    /// the state after each timestep.
    pub fn run_states(&self, series: &TimeSeries) -> Vec<Vec<f64>> {
        let n = self.config.n_reservoir;
        let mut state = vec![0.0; n];
        let mut next = vec![0.0; n];
        let mut states = Vec::with_capacity(series.len());
        for sample in series.samples() {
            self.step_into(&state, &sample.channels(), &mut next);
            std::mem::swap(&mut state, &mut next);
            states.push(state.clone());
        }
        states
    }

    /// Fits the readout on one stream by ridge regression against the +/-1
    /// labels, skipping the first `washout` states. Reservoir weights are
    /// never modified.
    pub fn fit_readout(&self, series: &TimeSeries) -> Result<EsnModel> {
        self.fit_readout_multi(std::slice::from_ref(series))
    }

    /// Fits the readout on several independent streams: each stream is run
    /// from a fresh zero state, its first `washout` states are dropped, and
    /// the surviving states are pooled into one ridge solve.
    pub fn fit_readout_multi(&self, streams: &[TimeSeries]) -> Result<EsnModel> {
        let washout = self.config.washout;
        let n = self.config.n_reservoir;
        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut targets: Vec<f64> = Vec::new();
        for series in streams {
            if series.len() <= washout {
                return Err(Error::Training(format!(
                    "stream of {} samples is not longer than the washout of {washout}",
                    series.len()
                )));
            }
            let states = self.run_states(series);
            for (state, sample) in states.into_iter().zip(series.samples()).skip(washout) {
                rows.push(state);
                targets.push(sample.label.as_f64());
            }
        }
        if rows.len() <= n {
            return Err(Error::Training(format!(
                "{} usable states cannot determine {n} readout weights; stream length must \
                 exceed washout + reservoir size",
                rows.len()
            )));
        }
        let (weights, bias) = ridge_fit(&rows, &targets, self.config.ridge_beta)?;
        Ok(EsnModel {
            config: self.config.clone(),
            w_in: self.w_in.clone(),
            w: self.w.clone(),
            readout: Some(Readout { weights, bias }),
        })
    }

    /// Per-timestep readout scores across a stream, state threaded with no
    /// resets. One score per input timestep.
    pub fn score_stream(&self, series: &TimeSeries) -> Result<Vec<f64>> {
        let readout = self
            .readout
            .as_ref()
            .ok_or_else(|| Error::State("readout has not been fitted".into()))?;
        Ok(self
            .run_states(series)
            .into_iter()
            .map(|x| {
                readout
                    .weights
                    .iter()
                    .zip(&x)
                    .map(|(w, xi)| w * xi)
                    .sum::<f64>()
                    + readout.bias
            })
            .collect())
    }

    /// Per-timestep labels: `sign(w.x + b)` with 0 mapped to positive.
    pub fn classify_stream(&self, series: &TimeSeries) -> Result<Vec<Label>> {
        Ok(self
            .score_stream(series)?
            .into_iter()
            .map(Label::from_score)
            .collect())
    }
}

/// Builds the random reservoir for `cfg` (readout unset). Input weights are
/// uniform in `[-input_scaling, input_scaling]`; recurrent weights occupy
/// `cfg.nnz()` distinct positions with uniform `[-1, 1]` values rescaled so
/// the measured spectral radius equals `cfg.spectral_radius`. Deterministic
/// given the seed: a nilpotent draw (spectral radius 0) is discarded and
/// redrawn from the same generator stream.
pub fn init(cfg: &EsnConfig) -> Result<EsnModel> {
    cfg.validate()?;
    let n = cfg.n_reservoir;
    let nnz = cfg.nnz();
    if nnz > n * n {
        return Err(Error::Argument(format!(
            "{nnz} nonzeros exceed the {} cells of the reservoir",
            n * n
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let w_in: Vec<f64> = (0..n * CHANNEL_COUNT)
        .map(|_| rng.random_range(-cfg.input_scaling..cfg.input_scaling))
        .collect();

    for _attempt in 0..100 {
        let mut positions = rand::seq::index::sample(&mut rng, n * n, nnz).into_vec();
        positions.sort_unstable();
        let mut w: Vec<(usize, usize, f64)> = positions
            .into_iter()
            .map(|p| (p / n, p % n, rng.random_range(-1.0..1.0)))
            .collect();
        let rho = spectral_radius(n, &w);
        if rho > 1e-9 {
            let scale = cfg.spectral_radius / rho;
            for entry in &mut w {
                entry.2 *= scale;
            }
            return EsnModel::from_parts(cfg.clone(), w_in, w, None);
        }
    }
    Err(Error::Numerical(
        "reservoir sampling kept producing a nilpotent matrix".into(),
    ))
}

/// Spectral radius (largest eigenvalue magnitude) of a sparse square matrix.
pub fn spectral_radius(n: usize, triples: &[(usize, usize, f64)]) -> f64 {
    let mut dense = DMatrix::<f64>::zeros(n, n);
    for &(r, c, v) in triples {
        dense[(r, c)] = v;
    }
    dense
        .complex_eigenvalues()
        .iter()
        .map(|ev| ev.norm())
        .fold(0.0, f64::max)
}

/// Closed-form ridge regression of `targets` on `rows` with an intercept:
/// minimizes `sum (w.x + b - y)^2 + beta |w|^2` (the intercept is not
/// penalized). Fails on a singular normal matrix, which with `beta = 0`
/// means the states are rank-deficient and a positive `ridge_beta` is needed.
pub fn ridge_fit(rows: &[Vec<f64>], targets: &[f64], beta: f64) -> Result<(Vec<f64>, f64)> {
    if rows.is_empty() || rows.len() != targets.len() {
        return Err(Error::Argument(
            "ridge regression needs matching, non-empty rows and targets".into(),
        ));
    }
    let dim = rows[0].len();
    let aug = dim + 1;
    // normal equations over [x, 1]
    let mut gram = DMatrix::<f64>::zeros(aug, aug);
    let mut rhs = DVector::<f64>::zeros(aug);
    for (row, &y) in rows.iter().zip(targets) {
        debug_assert_eq!(row.len(), dim);
        for i in 0..dim {
            for j in i..dim {
                gram[(i, j)] += row[i] * row[j];
            }
            gram[(i, aug - 1)] += row[i];
            rhs[i] += row[i] * y;
        }
        gram[(aug - 1, aug - 1)] += 1.0;
        rhs[aug - 1] += y;
    }
    for i in 0..aug {
        for j in 0..i {
            gram[(i, j)] = gram[(j, i)];
        }
    }
    for i in 0..dim {
        gram[(i, i)] += beta;
    }
    let solution = gram
        .clone()
        .cholesky()
        .map(|ch| ch.solve(&rhs))
        .or_else(|| gram.lu().solve(&rhs))
        .ok_or_else(|| {
            Error::Numerical(if beta == 0.0 {
                "normal matrix is singular; set ridge_beta > 0".into()
            } else {
                "normal matrix could not be solved".into()
            })
        })?;
    let mut weights: Vec<f64> = solution.iter().copied().collect();
    let bias = weights.pop().unwrap();
    Ok((weights, bias))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{synthesize, SynthConfig};
    use approx::assert_relative_eq;

    #[test]
    fn selected_config_defaults() {
        let cfg = EsnConfig::new(5);
        assert_eq!(cfg.n_reservoir, 5);
        assert_eq!(cfg.input_scaling, 0.01);
        assert_eq!(cfg.leaky, 0.5);
        assert_eq!(cfg.connectivity, 0.005);
        assert_eq!(cfg.washout, DEFAULT_WASHOUT);
    }

    #[test]
    fn nnz_floors_at_reservoir_size() {
        let cfg = EsnConfig::new(5);
        assert_eq!(cfg.nnz(), 5); // round(0.005 * 25) = 0, floored to n
        let mut dense = EsnConfig::new(10);
        dense.connectivity = 1.0;
        assert_eq!(dense.nnz(), 100);
    }

    #[test]
    fn init_hits_target_spectral_radius() {
        for units in [5, 20, 50] {
            let mut cfg = EsnConfig::new(units);
            cfg.connectivity = 0.1;
            let model = init(&cfg).unwrap();
            let rho = spectral_radius(units, model.w());
            assert_relative_eq!(rho, cfg.spectral_radius, epsilon = 1e-6);
            assert_eq!(model.w().len(), cfg.nnz());
        }
    }

    #[test]
    fn init_is_deterministic() {
        let cfg = EsnConfig::new(12);
        let a = init(&cfg).unwrap();
        let b = init(&cfg).unwrap();
        assert_eq!(a.w_in(), b.w_in());
        assert_eq!(a.w(), b.w());
    }

    #[test]
    fn step_with_full_leak_is_pure_tanh_update() {
        let mut cfg = EsnConfig::new(4);
        cfg.leaky = 1.0;
        cfg.input_scaling = 0.5;
        let model = init(&cfg).unwrap();
        let state = vec![0.1, -0.2, 0.3, 0.0];
        let input = [1.0, 0.5, -0.5, 2.0];
        let next = model.step(&state, &input).unwrap();
        // recompute by hand from the stored weights
        for i in 0..4 {
            let mut pre = 0.0;
            for k in 0..CHANNEL_COUNT {
                pre += model.w_in()[i * CHANNEL_COUNT + k] * input[k];
            }
            for &(r, c, v) in model.w() {
                if r == i {
                    pre += v * state[c];
                }
            }
            assert_relative_eq!(next[i], pre.tanh(), epsilon = 1e-15);
        }
    }

    #[test]
    fn zero_state_zero_input_is_fixed_point() {
        let model = init(&EsnConfig::new(6)).unwrap();
        let next = model.step(&vec![0.0; 6], &[0.0; 4]).unwrap();
        assert!(next.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn echo_state_property_two_states_converge() {
        let mut cfg = EsnConfig::new(20);
        cfg.connectivity = 0.2;
        cfg.input_scaling = 0.1;
        let model = init(&cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut a: Vec<f64> = (0..20).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut b: Vec<f64> = (0..20).map(|_| rng.random_range(-1.0..1.0)).collect();
        for _ in 0..500 {
            let u: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
            a = model.step(&a, &u).unwrap();
            b = model.step(&b, &u).unwrap();
        }
        let dist: f64 = a
            .iter()
            .zip(&b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt();
        assert!(dist < 1e-6, "states stayed {dist} apart");
    }

    #[test]
    fn ridge_recovers_exact_linear_teacher() {
        let model = init(&EsnConfig::new(8)).unwrap();
        let series = synthesize(&SynthConfig {
            duration_s: 20.0,
            ..SynthConfig::default()
        })
        .unwrap();
        let rows: Vec<Vec<f64>> = model.run_states(&series).into_iter().skip(25).collect();
        let teacher_w: Vec<f64> = (0..8).map(|i| 0.3 * (i as f64 + 1.0)).collect();
        let teacher_b = -0.7;
        let targets: Vec<f64> = rows
            .iter()
            .map(|x| teacher_w.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + teacher_b)
            .collect();
        let (w, b) = ridge_fit(&rows, &targets, 1e-12).unwrap();
        for (got, want) in w.iter().zip(&teacher_w) {
            assert_relative_eq!(got, want, epsilon = 1e-6);
        }
        assert_relative_eq!(b, teacher_b, epsilon = 1e-6);
    }

    #[test]
    fn least_squares_residual_is_orthogonal_to_states() {
        let mut cfg = EsnConfig::new(10);
        cfg.connectivity = 0.3;
        cfg.input_scaling = 0.2;
        let model = init(&cfg).unwrap();
        let series = synthesize(&SynthConfig {
            duration_s: 30.0,
            ..SynthConfig::default()
        })
        .unwrap();
        let rows: Vec<Vec<f64>> = model.run_states(&series).into_iter().skip(25).collect();
        let targets: Vec<f64> = series
            .samples()
            .iter()
            .skip(25)
            .map(|s| s.label.as_f64())
            .collect();
        let (w, b) = ridge_fit(&rows, &targets, 0.0).unwrap();
        let mut worst: f64 = 0.0;
        let mut bias_dot = 0.0;
        for i in 0..10 {
            let mut d = 0.0;
            for (row, &y) in rows.iter().zip(&targets) {
                let r = w.iter().zip(row).map(|(wi, xi)| wi * xi).sum::<f64>() + b - y;
                d += r * row[i];
            }
            worst = worst.max(d.abs());
        }
        for (row, &y) in rows.iter().zip(&targets) {
            bias_dot += w.iter().zip(row).map(|(wi, xi)| wi * xi).sum::<f64>() + b - y;
        }
        assert!(worst < 1e-6, "residual correlation {worst}");
        assert!(bias_dot.abs() < 1e-6);
    }

    #[test]
    fn singular_states_need_positive_beta() {
        // two identical columns make the normal matrix singular
        let rows: Vec<Vec<f64>> = (0..6)
            .map(|i| {
                let v = i as f64;
                vec![v, v, 1.0 + v]
            })
            .collect();
        let targets = vec![0.0, 1.0, 0.5, -1.0, 2.0, 0.25];
        let err = ridge_fit(&rows, &targets, 0.0).unwrap_err();
        match err {
            Error::Numerical(msg) => assert!(msg.contains("ridge_beta")),
            other => panic!("expected numerical error, got {other:?}"),
        }
        assert!(ridge_fit(&rows, &targets, 1e-8).is_ok());
    }

    #[test]
    fn too_short_stream_is_training_error() {
        let model = init(&EsnConfig::new(5)).unwrap();
        let series = synthesize(&SynthConfig {
            duration_s: 1.0, // 25 samples, not longer than washout 25
            ..SynthConfig::default()
        })
        .unwrap();
        assert!(matches!(model.fit_readout(&series), Err(Error::Training(_))));
    }

    #[test]
    fn classify_requires_trained_readout_and_is_causal() {
        let model = init(&EsnConfig::new(5)).unwrap();
        let series = synthesize(&SynthConfig {
            duration_s: 30.0,
            ..SynthConfig::default()
        })
        .unwrap();
        assert!(matches!(model.classify_stream(&series), Err(Error::State(_))));
        let trained = model.fit_readout(&series).unwrap();
        let labels = trained.classify_stream(&series).unwrap();
        assert_eq!(labels.len(), series.len());
        // replay determinism
        assert_eq!(labels, trained.classify_stream(&series).unwrap());
        // causality: a prefix reproduces the first T outputs exactly
        let t = 200;
        let prefix = TimeSeries::new(series.rate(), series.samples()[..t].to_vec()).unwrap();
        let prefix_labels = trained.classify_stream(&prefix).unwrap();
        assert_eq!(prefix_labels[..], labels[..t]);
    }

    #[test]
    fn fit_never_modifies_reservoir_weights() {
        let model = init(&EsnConfig::new(5)).unwrap();
        let series = synthesize(&SynthConfig {
            duration_s: 20.0,
            ..SynthConfig::default()
        })
        .unwrap();
        let trained = model.fit_readout(&series).unwrap();
        assert_eq!(model.w_in(), trained.w_in());
        assert_eq!(model.w(), trained.w());
        assert!(trained.readout().is_some());
    }
}
