//! The validation schema: metrics, k-fold cross-validation, grid-search
//! model selection, and averaging over random stratified splits.
//!
//! Window and feature datasets are collections of labeled vectors. Stream
//! datasets are collections of stream chunks; a chunk's class for
//! stratification purposes is its majority label, and accuracies over
//! streams count every timestep. Selection re-runs the full grid search
//! inside every split, and identical split seeds can be reused across model
//! families so comparisons are paired.

use rayon::prelude::*;
use serde::Serialize;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::artifact::{Family, ModelArtifact};
use crate::budget;
use crate::data::{Label, LabeledVector, TimeSeries};
use crate::error::{Error, Result};
use crate::esn::{self, EsnConfig};
use crate::features::Standardizer;
use crate::idnn::{self, HiddenKind, IdnnConfig};
use crate::svm::{self, KernelSpec};
use crate::windowing::label_window;

/// Default cross-validation folds.
pub const DEFAULT_FOLDS: usize = 10;

/// Default number of random train/test splits.
pub const DEFAULT_SPLITS: usize = 5;

/// Default train fraction of a split.
pub const DEFAULT_TRAIN_RATIO: f64 = 0.7;

/// Default chunk length when a stream is cut into CV examples, seconds.
pub const DEFAULT_CHUNK_S: f64 = 30.0;

// ---------------------------------------------------------------------------
// metrics

/// Binary confusion counts. Positive means prey handling.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ConfusionMatrix {
    pub true_pos: usize,
    pub true_neg: usize,
    pub false_pos: usize,
    pub false_neg: usize,
}

impl ConfusionMatrix {
    pub fn add(&mut self, truth: Label, predicted: Label) {
        match (truth.is_positive(), predicted.is_positive()) {
            (true, true) => self.true_pos += 1,
            (false, false) => self.true_neg += 1,
            (false, true) => self.false_pos += 1,
            (true, false) => self.false_neg += 1,
        }
    }

    pub fn merge(&mut self, other: &ConfusionMatrix) {
        self.true_pos += other.true_pos;
        self.true_neg += other.true_neg;
        self.false_pos += other.false_pos;
        self.false_neg += other.false_neg;
    }

    pub fn total(&self) -> usize {
        self.true_pos + self.true_neg + self.false_pos + self.false_neg
    }
}

/// Accuracy, precision, recall, and F1 of a confusion matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Computes the standard metrics; undefined ratios (zero denominators) are 0.
/// F1 is the harmonic mean `2PR / (P + R)`.
pub fn metrics(cm: &ConfusionMatrix) -> Result<Metrics> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::Argument("confusion matrix is empty".into()));
    }
    let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let accuracy = (cm.true_pos + cm.true_neg) as f64 / total as f64;
    let precision = ratio(cm.true_pos, cm.true_pos + cm.false_pos);
    let recall = ratio(cm.true_pos, cm.true_pos + cm.false_neg);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(Metrics {
        accuracy,
        precision,
        recall,
        f1,
    })
}

// ---------------------------------------------------------------------------
// splits

/// Splits `0..n` into `k` disjoint folds whose sizes differ by at most one,
/// shuffled by a ChaCha8 generator. The fold-size profile depends only on
/// `n` and `k`; the seed changes membership only.
pub fn kfold_split(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 || k > n {
        return Err(Error::Argument(format!(
            "fold count must lie in [2, {n}], got {k}"
        )));
    }
    let mut indices: Vec<usize> = (0..n).collect();
    indices.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let base = n / k;
    let extra = n % k;
    let mut folds = Vec::with_capacity(k);
    let mut at = 0;
    for f in 0..k {
        let size = base + usize::from(f < extra);
        folds.push(indices[at..at + size].to_vec());
        at += size;
    }
    Ok(folds)
}

/// Stratified train/test split: each class is shuffled independently and
/// `round(ratio * count)` of it goes to the train side (clamped so neither
/// side loses a class entirely). Requires at least two examples per class.
pub fn stratified_split(
    classes: &[Label],
    train_ratio: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(train_ratio > 0.0 && train_ratio < 1.0) {
        return Err(Error::Argument(format!(
            "train ratio must lie in (0, 1), got {train_ratio}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for positive in [false, true] {
        let mut members: Vec<usize> = classes
            .iter()
            .enumerate()
            .filter(|(_, l)| l.is_positive() == positive)
            .map(|(i, _)| i)
            .collect();
        if members.len() < 2 {
            return Err(Error::Training(format!(
                "need at least 2 examples of each class, one class has {}",
                members.len()
            )));
        }
        members.shuffle(&mut rng);
        let take = ((train_ratio * members.len() as f64).round() as usize)
            .clamp(1, members.len() - 1);
        train.extend_from_slice(&members[..take]);
        test.extend_from_slice(&members[take..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

// ---------------------------------------------------------------------------
// datasets

/// What a vector dataset holds; feature rows are standardized before
/// training, raw window rows are used as-is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VectorKind {
    RawWindows,
    Features,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorDataset {
    pub examples: Vec<LabeledVector>,
    pub kind: VectorKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StreamDataset {
    pub chunks: Vec<TimeSeries>,
}

impl StreamDataset {
    /// Cuts a stream into complete fixed-length chunks that then act as the
    /// examples for folds and splits.
    pub fn from_series(series: &TimeSeries, chunk_s: f64) -> Result<StreamDataset> {
        if !(chunk_s > 0.0) {
            return Err(Error::Argument(format!("chunk length must be > 0, got {chunk_s}")));
        }
        let chunk_samples = (chunk_s * series.rate()).round() as usize;
        if chunk_samples == 0 {
            return Err(Error::Argument("chunk spans no samples".into()));
        }
        let mut chunks = Vec::new();
        let samples = series.samples();
        let mut at = 0;
        while at + chunk_samples <= samples.len() {
            chunks.push(TimeSeries::new(
                series.rate(),
                samples[at..at + chunk_samples].to_vec(),
            )?);
            at += chunk_samples;
        }
        if chunks.is_empty() {
            return Err(Error::Argument(format!(
                "stream of {} samples yields no complete {chunk_samples}-sample chunk",
                samples.len()
            )));
        }
        Ok(StreamDataset { chunks })
    }
}

/// A dataset of examples: labeled vectors for window/feature classifiers,
/// stream chunks for the stream classifier.
#[derive(Debug, Clone, PartialEq)]
pub enum Dataset {
    Vectors(VectorDataset),
    Streams(StreamDataset),
}

impl Dataset {
    pub fn len(&self) -> usize {
        match self {
            Dataset::Vectors(v) => v.examples.len(),
            Dataset::Streams(s) => s.chunks.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Class of example `i`; a stream chunk's class is its majority label.
    pub fn class_of(&self, i: usize) -> Label {
        match self {
            Dataset::Vectors(v) => v.examples[i].label,
            Dataset::Streams(s) => {
                label_window(s.chunks[i].samples().iter().map(|x| x.label))
                    .expect("chunks are never empty")
            }
        }
    }

    pub fn classes(&self) -> Vec<Label> {
        (0..self.len()).map(|i| self.class_of(i)).collect()
    }

    pub fn has_both_classes(&self) -> bool {
        let classes = self.classes();
        classes.iter().any(|l| l.is_positive()) && classes.iter().any(|l| !l.is_positive())
    }

    pub fn subset(&self, indices: &[usize]) -> Dataset {
        match self {
            Dataset::Vectors(v) => Dataset::Vectors(VectorDataset {
                examples: indices.iter().map(|&i| v.examples[i].clone()).collect(),
                kind: v.kind,
            }),
            Dataset::Streams(s) => Dataset::Streams(StreamDataset {
                chunks: indices.iter().map(|&i| s.chunks[i].clone()).collect(),
            }),
        }
    }

    /// Whether training should standardize inputs: feature rows yes, raw
    /// windows and streams no.
    pub fn default_standardize(&self) -> bool {
        matches!(
            self,
            Dataset::Vectors(VectorDataset {
                kind: VectorKind::Features,
                ..
            })
        )
    }
}

// ---------------------------------------------------------------------------
// grids

/// One hyperparameter combination of one family.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Candidate {
    Idnn {
        n_hidden: usize,
        hidden_kind: HiddenKind,
        eta: f64,
        alpha: f64,
        lambda: f64,
    },
    Svm {
        kernel: KernelSpec,
        c: f64,
    },
    Esn {
        n_reservoir: usize,
        input_scaling: f64,
        leaky: f64,
    },
}

impl Candidate {
    pub fn family(&self) -> Family {
        match self {
            Candidate::Idnn { .. } => Family::Idnn,
            Candidate::Svm { .. } => Family::Svm,
            Candidate::Esn { .. } => Family::Esn,
        }
    }

    /// Comma-free description used in report tables.
    pub fn describe(&self) -> String {
        match self {
            Candidate::Idnn {
                n_hidden,
                hidden_kind,
                eta,
                alpha,
                lambda,
            } => format!(
                "kind={} hidden={n_hidden} eta={eta} alpha={alpha} lambda={lambda}",
                hidden_kind.name()
            ),
            Candidate::Svm { kernel, c } => format!("kernel={} C={c}", kernel.describe()),
            Candidate::Esn {
                n_reservoir,
                input_scaling,
                leaky,
            } => format!("units={n_reservoir} scaling={input_scaling} leaky={leaky}"),
        }
    }
}

/// Candidate lists per family. `candidates()` enumerates the cartesian
/// product in a fixed documented order, which also defines the final
/// tie-break of the selection.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum GridSpec {
    /// Order: kind, hidden, eta, alpha, lambda (outermost to innermost).
    Idnn {
        kinds: Vec<HiddenKind>,
        hidden: Vec<usize>,
        etas: Vec<f64>,
        alphas: Vec<f64>,
        lambdas: Vec<f64>,
        epochs: usize,
    },
    /// Order: kernel, C.
    Svm {
        kernels: Vec<KernelSpec>,
        cs: Vec<f64>,
    },
    /// Order: units, scaling, leaky. The remaining reservoir parameters are
    /// fixed per grid.
    Esn {
        units: Vec<usize>,
        scalings: Vec<f64>,
        leakies: Vec<f64>,
        connectivity: f64,
        spectral_radius: f64,
        ridge_beta: f64,
        washout: usize,
    },
}

impl GridSpec {
    /// Full sweep: hidden {1,2,3,4,5,50,100}, eta {0.1,0.01,0.001,0.0001},
    /// alpha and lambda {0,0.0001,0.001,0.01,0.1}, both unit kinds — 1400
    /// combinations.
    pub fn idnn_default() -> GridSpec {
        GridSpec::Idnn {
            kinds: vec![HiddenKind::Sigmoid, HiddenKind::Rbf],
            hidden: vec![1, 2, 3, 4, 5, 50, 100],
            etas: vec![0.1, 0.01, 0.001, 0.0001],
            alphas: vec![0.0, 0.0001, 0.001, 0.01, 0.1],
            lambdas: vec![0.0, 0.0001, 0.001, 0.01, 0.1],
            epochs: idnn::DEFAULT_EPOCHS,
        }
    }

    /// Linear, RBF (sigma 1), and cubic kernels, C in {100, 10, 1, 0.5}.
    pub fn svm_default() -> GridSpec {
        GridSpec::Svm {
            kernels: vec![KernelSpec::Linear, KernelSpec::rbf(), KernelSpec::poly3()],
            cs: vec![100.0, 10.0, 1.0, 0.5],
        }
    }

    /// Discretization of the continuous sweep ranges: scaling {0.01,0.1,0.5,1},
    /// leaky {0.1,0.3,0.5,0.7,1}, units {5,10,50,100}.
    pub fn esn_default() -> GridSpec {
        GridSpec::Esn {
            units: vec![5, 10, 50, 100],
            scalings: vec![0.01, 0.1, 0.5, 1.0],
            leakies: vec![0.1, 0.3, 0.5, 0.7, 1.0],
            connectivity: 0.005,
            spectral_radius: esn::DEFAULT_SPECTRAL_RADIUS,
            ridge_beta: esn::DEFAULT_RIDGE_BETA,
            washout: esn::DEFAULT_WASHOUT,
        }
    }

    pub fn family(&self) -> Family {
        match self {
            GridSpec::Idnn { .. } => Family::Idnn,
            GridSpec::Svm { .. } => Family::Svm,
            GridSpec::Esn { .. } => Family::Esn,
        }
    }

    pub fn candidates(&self) -> Vec<Candidate> {
        let mut cells = Vec::new();
        match self {
            GridSpec::Idnn {
                kinds,
                hidden,
                etas,
                alphas,
                lambdas,
                ..
            } => {
                for &kind in kinds {
                    for &h in hidden {
                        for &eta in etas {
                            for &alpha in alphas {
                                for &lambda in lambdas {
                                    cells.push(Candidate::Idnn {
                                        n_hidden: h,
                                        hidden_kind: kind,
                                        eta,
                                        alpha,
                                        lambda,
                                    });
                                }
                            }
                        }
                    }
                }
            }
            GridSpec::Svm { kernels, cs } => {
                for &kernel in kernels {
                    for &c in cs {
                        cells.push(Candidate::Svm { kernel, c });
                    }
                }
            }
            GridSpec::Esn {
                units,
                scalings,
                leakies,
                ..
            } => {
                for &u in units {
                    for &s in scalings {
                        for &l in leakies {
                            cells.push(Candidate::Esn {
                                n_reservoir: u,
                                input_scaling: s,
                                leaky: l,
                            });
                        }
                    }
                }
            }
        }
        cells
    }
}

// ---------------------------------------------------------------------------
// fitting one candidate

/// Trains `candidate` on the listed examples and returns the artifact.
pub fn fit_candidate(
    candidate: &Candidate,
    grid: &GridSpec,
    data: &Dataset,
    train_idx: &[usize],
    standardize: bool,
    seed: u64,
) -> Result<ModelArtifact> {
    match (candidate, data) {
        (
            Candidate::Idnn {
                n_hidden,
                hidden_kind,
                eta,
                alpha,
                lambda,
            },
            Dataset::Vectors(v),
        ) => {
            let epochs = match grid {
                GridSpec::Idnn { epochs, .. } => *epochs,
                _ => idnn::DEFAULT_EPOCHS,
            };
            let (rows, std) = gather_rows(v, train_idx, standardize)?;
            let n_in = rows
                .first()
                .map(|r| r.values.len())
                .ok_or_else(|| Error::Training("empty training subset".into()))?;
            let cfg = IdnnConfig {
                n_in,
                n_hidden: *n_hidden,
                hidden_kind: *hidden_kind,
                eta: *eta,
                alpha: *alpha,
                lambda: *lambda,
                epochs,
                seed,
            };
            let run = idnn::train_rprop(&cfg, &rows)?;
            Ok(ModelArtifact::Idnn {
                model: run.model,
                config: cfg,
                standardizer: std,
            })
        }
        (Candidate::Svm { kernel, c }, Dataset::Vectors(v)) => {
            let (rows, std) = gather_rows(v, train_idx, standardize)?;
            let model = svm::train_smo(&rows, kernel, *c)?;
            Ok(ModelArtifact::Svm {
                model,
                standardizer: std,
            })
        }
        (
            Candidate::Esn {
                n_reservoir,
                input_scaling,
                leaky,
            },
            Dataset::Streams(s),
        ) => {
            let (connectivity, spectral_radius, ridge_beta, washout) = match grid {
                GridSpec::Esn {
                    connectivity,
                    spectral_radius,
                    ridge_beta,
                    washout,
                    ..
                } => (*connectivity, *spectral_radius, *ridge_beta, *washout),
                _ => (0.005, esn::DEFAULT_SPECTRAL_RADIUS, esn::DEFAULT_RIDGE_BETA, esn::DEFAULT_WASHOUT),
            };
            let cfg = EsnConfig {
                n_reservoir: *n_reservoir,
                input_scaling: *input_scaling,
                leaky: *leaky,
                connectivity,
                spectral_radius,
                ridge_beta,
                washout,
                seed,
            };
            let chunks: Vec<TimeSeries> =
                train_idx.iter().map(|&i| s.chunks[i].clone()).collect();
            let model = esn::init(&cfg)?.fit_readout_multi(&chunks)?;
            Ok(ModelArtifact::Esn { model })
        }
        _ => Err(Error::Config(
            "candidate family does not match the dataset format".into(),
        )),
    }
}

fn gather_rows(
    v: &VectorDataset,
    idx: &[usize],
    standardize: bool,
) -> Result<(Vec<LabeledVector>, Option<Standardizer>)> {
    if idx.is_empty() {
        return Err(Error::Training("empty training subset".into()));
    }
    if standardize {
        let std = Standardizer::fit(idx.iter().map(|&i| v.examples[i].values.as_slice()))?;
        let rows = idx
            .iter()
            .map(|&i| LabeledVector {
                values: std.transform(&v.examples[i].values),
                label: v.examples[i].label,
            })
            .collect();
        Ok((rows, Some(std)))
    } else {
        Ok((idx.iter().map(|&i| v.examples[i].clone()).collect(), None))
    }
}

/// Scores an artifact on the listed examples. Vector models count one
/// decision per example; stream models count every timestep of every chunk.
pub fn score_artifact(
    artifact: &ModelArtifact,
    data: &Dataset,
    test_idx: &[usize],
) -> Result<ConfusionMatrix> {
    let mut cm = ConfusionMatrix::default();
    match (artifact, data) {
        (ModelArtifact::Esn { model }, Dataset::Streams(s)) => {
            for &i in test_idx {
                let chunk = &s.chunks[i];
                let labels = model.classify_stream(chunk)?;
                for (sample, predicted) in chunk.samples().iter().zip(labels) {
                    cm.add(sample.label, predicted);
                }
            }
        }
        (_, Dataset::Vectors(v)) => {
            for &i in test_idx {
                let ex = &v.examples[i];
                cm.add(ex.label, artifact.predict_vector(&ex.values)?);
            }
        }
        _ => {
            return Err(Error::Config(
                "artifact family does not match the dataset format".into(),
            ))
        }
    }
    Ok(cm)
}

// ---------------------------------------------------------------------------
// grid search

/// Cross-validation outcome of one grid cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellOutcome {
    pub candidate: Candidate,
    /// Mean validation accuracy over the folds that trained successfully;
    /// `None` when every fold failed.
    pub mean_val_accuracy: Option<f64>,
    pub folds_ok: usize,
    /// Mean footprint of the fold models, used as the selection tie-break.
    pub mean_footprint_kb: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSearchResult {
    pub best_index: usize,
    pub best: Candidate,
    pub best_mean_val_accuracy: f64,
    pub table: Vec<CellOutcome>,
}

/// Evaluates every grid cell by k-fold cross-validation on `data` and picks
/// the cell with the highest mean validation accuracy; ties fall to the
/// smaller footprint, then to grid order. Cells run in parallel.
pub fn grid_search(
    grid: &GridSpec,
    data: &Dataset,
    k: usize,
    seed: u64,
    standardize: bool,
) -> Result<GridSearchResult> {
    if !data.has_both_classes() {
        return Err(Error::Training("dataset has a single class".into()));
    }
    let folds = kfold_split(data.len(), k, seed)?;
    let cells = grid.candidates();
    let table: Vec<CellOutcome> = cells
        .into_par_iter()
        .map(|candidate| evaluate_cell(candidate, grid, data, &folds, seed, standardize))
        .collect();
    let best_index = pick_best(&table)?;
    Ok(GridSearchResult {
        best_index,
        best: table[best_index].candidate.clone(),
        best_mean_val_accuracy: table[best_index].mean_val_accuracy.unwrap(),
        table,
    })
}

fn evaluate_cell(
    candidate: Candidate,
    grid: &GridSpec,
    data: &Dataset,
    folds: &[Vec<usize>],
    seed: u64,
    standardize: bool,
) -> CellOutcome {
    let n = data.len();
    let mut accuracies = Vec::new();
    let mut footprints = Vec::new();
    let mut last_error = None;
    for (fi, fold) in folds.iter().enumerate() {
        let mut held_out = vec![false; n];
        for &i in fold {
            held_out[i] = true;
        }
        let train_idx: Vec<usize> = (0..n).filter(|&i| !held_out[i]).collect();
        let outcome = fit_candidate(
            &candidate,
            grid,
            data,
            &train_idx,
            standardize,
            seed.wrapping_add(fi as u64),
        )
        .and_then(|artifact| {
            let cm = score_artifact(&artifact, data, fold)?;
            let fp = budget::footprint(&artifact)?;
            Ok((metrics(&cm)?.accuracy, fp.footprint_kb))
        });
        match outcome {
            Ok((acc, fp)) => {
                accuracies.push(acc);
                footprints.push(fp);
            }
            Err(e) => last_error = Some(e.to_string()),
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    CellOutcome {
        candidate,
        mean_val_accuracy: (!accuracies.is_empty()).then(|| mean(&accuracies)),
        folds_ok: accuracies.len(),
        mean_footprint_kb: (!footprints.is_empty()).then(|| mean(&footprints)),
        error: last_error,
    }
}

/// Index of the winning cell: highest mean validation accuracy, ties broken
/// by smaller mean footprint, then by grid order. Errors when every cell
/// failed on every fold.
pub fn pick_best(table: &[CellOutcome]) -> Result<usize> {
    let mut best: Option<usize> = None;
    for (i, cell) in table.iter().enumerate() {
        let Some(acc) = cell.mean_val_accuracy else {
            continue;
        };
        match best {
            None => best = Some(i),
            Some(b) => {
                let best_acc = table[b].mean_val_accuracy.unwrap();
                let better = acc > best_acc
                    || (acc == best_acc
                        && cell.mean_footprint_kb.unwrap() < table[b].mean_footprint_kb.unwrap());
                if better {
                    best = Some(i);
                }
            }
        }
    }
    best.ok_or_else(|| Error::Training("every grid cell failed on every fold".into()))
}

// ---------------------------------------------------------------------------
// split averaging

/// Result of one random split: the re-selected configuration, its validation
/// score, and its held-out test metrics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitOutcome {
    pub seed: u64,
    pub selected: Candidate,
    pub mean_val_accuracy: f64,
    pub test: Metrics,
    pub footprint_kb: f64,
    pub cv_table: Vec<CellOutcome>,
}

/// Aggregated outcome over all splits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub family: Family,
    pub folds: usize,
    pub train_ratio: f64,
    pub splits: Vec<SplitOutcome>,
    /// Most frequently selected configuration across splits (earliest split
    /// on ties).
    pub selected: Candidate,
    /// Footprint of the retrained model from the first split that selected
    /// the headline configuration.
    pub footprint_kb: f64,
    pub accuracy_mean: f64,
    pub accuracy_std: f64,
    pub f1_mean: f64,
    pub f1_std: f64,
}

/// Runs the full validation schema: for every seed, a stratified
/// `train_ratio` split, a grid search on the train side (k-fold CV), a
/// retrain of the winner on the whole train side, and a test-side
/// evaluation. Test accuracy and F1 are averaged over the splits.
pub fn split_average(
    grid: &GridSpec,
    data: &Dataset,
    k: usize,
    seeds: &[u64],
    train_ratio: f64,
    standardize: bool,
) -> Result<EvaluationReport> {
    if seeds.is_empty() {
        return Err(Error::Argument("need at least one split seed".into()));
    }
    if !data.has_both_classes() {
        return Err(Error::Training("dataset has a single class".into()));
    }
    let classes = data.classes();
    let mut splits = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let (train_idx, test_idx) = stratified_split(&classes, train_ratio, seed)?;
        let train_ds = data.subset(&train_idx);
        let search = grid_search(grid, &train_ds, k, seed, standardize)?;
        let artifact = fit_candidate(&search.best, grid, data, &train_idx, standardize, seed)?;
        let cm = score_artifact(&artifact, data, &test_idx)?;
        let test = metrics(&cm)?;
        let footprint = budget::footprint(&artifact)?;
        splits.push(SplitOutcome {
            seed,
            selected: search.best,
            mean_val_accuracy: search.best_mean_val_accuracy,
            test,
            footprint_kb: footprint.footprint_kb,
            cv_table: search.table,
        });
    }

    let accs: Vec<f64> = splits.iter().map(|s| s.test.accuracy).collect();
    let f1s: Vec<f64> = splits.iter().map(|s| s.test.f1).collect();
    let (accuracy_mean, accuracy_std) = mean_std(&accs);
    let (f1_mean, f1_std) = mean_std(&f1s);

    // headline configuration: the mode of the per-split selections
    let mut head = 0;
    let mut head_count = 0;
    for (i, s) in splits.iter().enumerate() {
        let count = splits.iter().filter(|o| o.selected == s.selected).count();
        if count > head_count {
            head = i;
            head_count = count;
        }
    }

    Ok(EvaluationReport {
        family: grid.family(),
        folds: k,
        train_ratio,
        selected: splits[head].selected.clone(),
        footprint_kb: splits[head].footprint_kb,
        splits,
        accuracy_mean,
        accuracy_std,
        f1_mean,
        f1_std,
    })
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

// ---------------------------------------------------------------------------
// report emission

fn fmt(v: f64) -> String {
    format!("{v:.6}")
}

/// One-row summary CSV of an evaluation report.
pub fn report_to_csv(report: &EvaluationReport) -> String {
    let mean_val: f64 = report
        .splits
        .iter()
        .map(|s| s.mean_val_accuracy)
        .sum::<f64>()
        / report.splits.len() as f64;
    let mut out = String::from(
        "family,hyperparameters,mean_val_acc,test_acc,test_f1,acc_std,f1_std,footprint_kb\n",
    );
    out.push_str(&format!(
        "{},{},{},{},{},{},{},{}\n",
        report.family.name(),
        report.selected.describe(),
        fmt(mean_val),
        fmt(report.accuracy_mean),
        fmt(report.f1_mean),
        fmt(report.accuracy_std),
        fmt(report.f1_std),
        fmt(report.footprint_kb),
    ));
    out
}

/// Per-split detail CSV.
pub fn splits_to_csv(report: &EvaluationReport) -> String {
    let mut out =
        String::from("split,seed,family,hyperparameters,mean_val_acc,test_acc,test_f1,footprint_kb\n");
    for (i, s) in report.splits.iter().enumerate() {
        out.push_str(&format!(
            "{i},{},{},{},{},{},{},{}\n",
            s.seed,
            report.family.name(),
            s.selected.describe(),
            fmt(s.mean_val_accuracy),
            fmt(s.test.accuracy),
            fmt(s.test.f1),
            fmt(s.footprint_kb),
        ));
    }
    out
}

/// Full cross-validation table CSV, one row per split and grid cell.
pub fn cv_table_to_csv(report: &EvaluationReport) -> String {
    let mut out = String::from(
        "split,family,hyperparameters,mean_val_acc,folds_ok,mean_footprint_kb,error\n",
    );
    for (i, s) in report.splits.iter().enumerate() {
        for cell in &s.cv_table {
            out.push_str(&format!(
                "{i},{},{},{},{},{},{}\n",
                report.family.name(),
                cell.candidate.describe(),
                cell.mean_val_accuracy.map(fmt).unwrap_or_default(),
                cell.folds_ok,
                cell.mean_footprint_kb.map(fmt).unwrap_or_default(),
                cell.error.as_deref().unwrap_or_default().replace(',', ";"),
            ));
        }
    }
    out
}
