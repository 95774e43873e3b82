//! Soft-margin binary SVM: kernel functions, a sequential minimal
//! optimization trainer, and the decision function.
//!
//! The trainer is the classic two-multiplier coordinate ascent on the dual
//! with an error cache and the second-choice heuristic. It is fully
//! deterministic: candidate sweeps run in index order, so identical inputs
//! give identical models. Optimization stops when no example violates the
//! KKT conditions by more than `tol` (default 1e-3); exceeding the pass
//! limit is an error carrying the pass count.

use serde::{Deserialize, Serialize};

use crate::data::{Label, LabeledVector};
use crate::error::{Error, Result};

/// KKT tolerance the trainer drives violations below.
pub const DEFAULT_TOL: f64 = 1e-3;

/// Outer-loop sweep limit.
pub const DEFAULT_MAX_PASSES: usize = 10_000;

/// Dual coefficients below this are dropped from the trained model.
const ALPHA_CUTOFF: f64 = 1e-8;

/// Minimum relative progress of a pair step.
const STEP_EPS: f64 = 1e-10;

/// Kernel family and its parameters.
///
/// The RBF kernel is `exp(-|x-y|^2 / (2 sigma^2))` (sigma parameterization,
/// not gamma). The cubic kernel is the inhomogeneous `(x.y + c)^3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum KernelSpec {
    Linear,
    Rbf { sigma: f64 },
    Poly3 { c: f64 },
}

impl KernelSpec {
    /// RBF with the default width of 1.
    pub fn rbf() -> Self {
        KernelSpec::Rbf { sigma: 1.0 }
    }

    /// Cubic kernel with the default constant of 1.
    pub fn poly3() -> Self {
        KernelSpec::Poly3 { c: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if let KernelSpec::Rbf { sigma } = self {
            if !(*sigma > 0.0) {
                return Err(Error::Argument(format!("rbf sigma must be > 0, got {sigma}")));
            }
        }
        Ok(())
    }

    /// Kernel value, checking dimensions.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if x.len() != y.len() {
            return Err(Error::Argument(format!(
                "kernel arguments differ in dimension: {} vs {}",
                x.len(),
                y.len()
            )));
        }
        Ok(self.eval_unchecked(x, y))
    }

    fn eval_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        match *self {
            KernelSpec::Linear => dot(x, y),
            KernelSpec::Rbf { sigma } => {
                let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                (-d2 / (2.0 * sigma * sigma)).exp()
            }
            KernelSpec::Poly3 { c } => {
                let base = dot(x, y) + c;
                base * base * base
            }
        }
    }
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// One retained training example with its dual coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportVector {
    pub x: Vec<f64>,
    pub y: f64,
    pub alpha: f64,
}

/// Trained SVM. Support vectors are stored in a canonical sort order so the
/// decision function is byte-stable no matter how the model was assembled.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    support: Vec<SupportVector>,
    bias: f64,
    kernel: KernelSpec,
    c: f64,
}

impl SvmModel {
    pub fn from_parts(
        mut support: Vec<SupportVector>,
        bias: f64,
        kernel: KernelSpec,
        c: f64,
    ) -> Result<Self> {
        kernel.validate()?;
        if support.is_empty() {
            return Err(Error::Argument("model needs at least one support vector".into()));
        }
        if !(c > 0.0) {
            return Err(Error::Argument(format!("C must be > 0, got {c}")));
        }
        let dim = support[0].x.len();
        for sv in &support {
            if sv.x.len() != dim {
                return Err(Error::Argument("support vectors differ in dimension".into()));
            }
            if !(sv.alpha > 0.0 && sv.alpha <= c) {
                return Err(Error::Argument(format!(
                    "alpha must lie in (0, C], got {}",
                    sv.alpha
                )));
            }
            if sv.y != 1.0 && sv.y != -1.0 {
                return Err(Error::Argument(format!("targets must be +/-1, got {}", sv.y)));
            }
        }
        if !bias.is_finite() {
            return Err(Error::Argument("bias must be finite".into()));
        }
        canonical_sort(&mut support);
        Ok(SvmModel {
            support,
            bias,
            kernel,
            c,
        })
    }

    pub fn support(&self) -> &[SupportVector] {
        &self.support
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn dim(&self) -> usize {
        self.support[0].x.len()
    }

    /// Decision score `sum_i alpha_i y_i k(x_i, x) + b`.
    pub fn decide(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::Argument(format!(
                "input has {} values, support vectors have {}",
                x.len(),
                self.dim()
            )));
        }
        let mut score = self.bias;
        for sv in &self.support {
            score += sv.alpha * sv.y * self.kernel.eval_unchecked(&sv.x, x);
        }
        Ok(score)
    }

    pub fn predict(&self, x: &[f64]) -> Result<Label> {
        Ok(Label::from_score(self.decide(x)?))
    }

    /// Signed sum of dual coefficients; ~0 for trained models.
    pub fn alpha_balance(&self) -> f64 {
        self.support.iter().map(|sv| sv.alpha * sv.y).sum()
    }
}

fn canonical_sort(support: &mut [SupportVector]) {
    support.sort_by(|a, b| {
        for (x, y) in a.x.iter().zip(&b.x) {
            let c = x.total_cmp(y);
            if c != std::cmp::Ordering::Equal {
                return c;
            }
        }
        a.y.total_cmp(&b.y).then(a.alpha.total_cmp(&b.alpha))
    });
}

/// Dual objective `sum alpha - 1/2 sum_ij alpha_i alpha_j y_i y_j k_ij` of a
/// trained model (examples with alpha = 0 contribute nothing).
pub fn dual_objective(model: &SvmModel) -> f64 {
    let svs = &model.support;
    let mut obj: f64 = svs.iter().map(|sv| sv.alpha).sum();
    for (i, a) in svs.iter().enumerate() {
        for (j, b) in svs.iter().enumerate() {
            if j > i {
                break;
            }
            let term =
                a.alpha * b.alpha * a.y * b.y * model.kernel.eval_unchecked(&a.x, &b.x);
            obj -= if i == j { 0.5 * term } else { term };
        }
    }
    obj
}

/// Largest KKT violation of the trained solution over its training set.
/// `alpha` must be the full dual vector aligned with `data`.
pub fn max_kkt_violation(
    model: &SvmModel,
    data: &[LabeledVector],
    alpha: &[f64],
) -> Result<f64> {
    let mut worst = 0.0f64;
    for (ex, &a) in data.iter().zip(alpha) {
        let yf = ex.label.as_f64() * model.decide(&ex.values)?;
        let v = if a <= ALPHA_CUTOFF {
            1.0 - yf // must have margin >= 1
        } else if a >= model.c - ALPHA_CUTOFF {
            yf - 1.0 // must lie on or inside the margin
        } else {
            (yf - 1.0).abs() // must sit exactly on the margin
        };
        worst = worst.max(v);
    }
    Ok(worst)
}

/// Trained model plus solver details used by audits.
#[derive(Debug, Clone)]
pub struct SmoRun {
    pub model: SvmModel,
    /// Full dual vector aligned with the training data order.
    pub alpha: Vec<f64>,
    /// Outer-loop sweeps performed.
    pub passes: usize,
}

/// Trains with the default tolerance and pass limit.
pub fn train_smo(data: &[LabeledVector], kernel: &KernelSpec, c: f64) -> Result<SvmModel> {
    Ok(train_smo_detailed(data, kernel, c, DEFAULT_TOL, DEFAULT_MAX_PASSES)?.model)
}

/// Trains and returns the full dual vector and pass count.
pub fn train_smo_detailed(
    data: &[LabeledVector],
    kernel: &KernelSpec,
    c: f64,
    tol: f64,
    max_passes: usize,
) -> Result<SmoRun> {
    kernel.validate()?;
    if !(c > 0.0) {
        return Err(Error::Argument(format!("C must be > 0, got {c}")));
    }
    if data.len() < 2 {
        return Err(Error::Training("need at least 2 examples".into()));
    }
    let dim = data[0].values.len();
    if data.iter().any(|d| d.values.len() != dim) {
        return Err(Error::Argument("examples differ in dimension".into()));
    }
    if !(data.iter().any(|d| d.label.is_positive()) && data.iter().any(|d| !d.label.is_positive()))
    {
        return Err(Error::Training("training data has a single class".into()));
    }

    let mut solver = Solver::new(data, kernel, c, tol);
    let passes = solver.run(max_passes)?;

    let mut support = Vec::new();
    for (i, &a) in solver.alpha.iter().enumerate() {
        if a > ALPHA_CUTOFF {
            support.push(SupportVector {
                x: data[i].values.clone(),
                y: solver.ys[i],
                alpha: a.min(c),
            });
        }
    }
    let model = SvmModel::from_parts(support, solver.b, *kernel, c)?;
    Ok(SmoRun {
        model,
        alpha: solver.alpha,
        passes,
    })
}

struct Solver<'a> {
    data: &'a [LabeledVector],
    ys: Vec<f64>,
    kernel: &'a KernelSpec,
    c: f64,
    tol: f64,
    alpha: Vec<f64>,
    b: f64,
    /// E_i = f(x_i) - y_i, maintained incrementally for every example.
    errors: Vec<f64>,
    diag: Vec<f64>,
    steps_since_refresh: usize,
}

impl<'a> Solver<'a> {
    fn new(data: &'a [LabeledVector], kernel: &'a KernelSpec, c: f64, tol: f64) -> Self {
        let ys: Vec<f64> = data.iter().map(|d| d.label.as_f64()).collect();
        let errors = ys.iter().map(|y| -y).collect(); // f = 0 initially
        let diag = data
            .iter()
            .map(|d| kernel.eval_unchecked(&d.values, &d.values))
            .collect();
        Solver {
            data,
            ys,
            kernel,
            c,
            tol,
            alpha: vec![0.0; data.len()],
            b: 0.0,
            errors,
            diag,
            steps_since_refresh: 0,
        }
    }

    fn k(&self, i: usize, j: usize) -> f64 {
        self.kernel
            .eval_unchecked(&self.data[i].values, &self.data[j].values)
    }

    fn run(&mut self, max_passes: usize) -> Result<usize> {
        let n = self.data.len();
        let mut passes = 0usize;
        let mut examine_all = true;
        let mut num_changed = 1usize;
        while num_changed > 0 || examine_all {
            passes += 1;
            if passes > max_passes {
                return Err(Error::Convergence { passes: passes - 1 });
            }
            num_changed = 0;
            for i in 0..n {
                let non_bound = self.alpha[i] > 0.0 && self.alpha[i] < self.c;
                if examine_all || non_bound {
                    num_changed += self.examine(i) as usize;
                }
            }
            if examine_all {
                examine_all = false;
            } else if num_changed == 0 {
                examine_all = true;
            }
        }
        Ok(passes)
    }

    fn examine(&mut self, i2: usize) -> bool {
        let y2 = self.ys[i2];
        let a2 = self.alpha[i2];
        let e2 = self.errors[i2];
        let r2 = e2 * y2;
        let violates = (r2 < -self.tol && a2 < self.c) || (r2 > self.tol && a2 > 0.0);
        if !violates {
            return false;
        }
        let n = self.data.len();
        let non_bound: Vec<usize> = (0..n)
            .filter(|&i| self.alpha[i] > 0.0 && self.alpha[i] < self.c)
            .collect();
        // second-choice heuristic: the partner with the largest |E1 - E2|
        if non_bound.len() > 1 {
            let mut best = None;
            let mut best_gap = -1.0;
            for &i in &non_bound {
                let gap = (self.errors[i] - e2).abs();
                if gap > best_gap {
                    best_gap = gap;
                    best = Some(i);
                }
            }
            if let Some(i1) = best {
                if self.take_step(i1, i2) {
                    return true;
                }
            }
        }
        // then all non-bound, then everything, sweeping from a fixed offset
        let start = (i2 + 1) % n;
        for &i1 in non_bound.iter() {
            if self.take_step(i1, i2) {
                return true;
            }
        }
        for off in 0..n {
            let i1 = (start + off) % n;
            if self.take_step(i1, i2) {
                return true;
            }
        }
        false
    }

    fn take_step(&mut self, i1: usize, i2: usize) -> bool {
        if i1 == i2 {
            return false;
        }
        let (y1, y2) = (self.ys[i1], self.ys[i2]);
        let (a1, a2) = (self.alpha[i1], self.alpha[i2]);
        let (e1, e2) = (self.errors[i1], self.errors[i2]);
        let s = y1 * y2;
        let (lo, hi) = if s < 0.0 {
            ((a2 - a1).max(0.0), (self.c + a2 - a1).min(self.c))
        } else {
            ((a1 + a2 - self.c).max(0.0), (a1 + a2).min(self.c))
        };
        if lo >= hi {
            return false;
        }
        let k11 = self.diag[i1];
        let k22 = self.diag[i2];
        let k12 = self.k(i1, i2);
        let curvature = k11 + k22 - 2.0 * k12;
        let a2_new = if curvature > 1e-15 {
            (a2 + y2 * (e1 - e2) / curvature).clamp(lo, hi)
        } else {
            // flat direction: move to whichever box corner improves the dual
            let gamma = a1 + s * a2;
            let v1 = (e1 + y1) - self.b - a1 * y1 * k11 - a2 * y2 * k12;
            let v2 = (e2 + y2) - self.b - a1 * y1 * k12 - a2 * y2 * k22;
            let objective = |a2c: f64| {
                let a1c = gamma - s * a2c;
                a1c + a2c
                    - 0.5 * k11 * a1c * a1c
                    - 0.5 * k22 * a2c * a2c
                    - s * k12 * a1c * a2c
                    - y1 * a1c * v1
                    - y2 * a2c * v2
            };
            let (obj_lo, obj_hi) = (objective(lo), objective(hi));
            if obj_lo > obj_hi + 1e-12 {
                lo
            } else if obj_hi > obj_lo + 1e-12 {
                hi
            } else {
                return false;
            }
        };
        if (a2_new - a2).abs() < STEP_EPS * (a2_new + a2 + STEP_EPS) {
            return false;
        }
        let a1_new = (a1 + s * (a2 - a2_new)).clamp(0.0, self.c);

        let d1 = y1 * (a1_new - a1);
        let d2 = y2 * (a2_new - a2);
        let db1 = -e1 - d1 * k11 - d2 * k12;
        let db2 = -e2 - d1 * k12 - d2 * k22;
        let db = if a1_new > 0.0 && a1_new < self.c {
            db1
        } else if a2_new > 0.0 && a2_new < self.c {
            db2
        } else {
            0.5 * (db1 + db2)
        };
        self.alpha[i1] = a1_new;
        self.alpha[i2] = a2_new;
        self.b += db;

        self.steps_since_refresh += 1;
        if self.steps_since_refresh >= 2000 {
            self.refresh_errors();
        } else {
            let x1 = &self.data[i1].values;
            let x2 = &self.data[i2].values;
            for i in 0..self.data.len() {
                let xi = &self.data[i].values;
                self.errors[i] += d1 * self.kernel.eval_unchecked(x1, xi)
                    + d2 * self.kernel.eval_unchecked(x2, xi)
                    + db;
            }
        }
        true
    }

    fn refresh_errors(&mut self) {
        self.steps_since_refresh = 0;
        for i in 0..self.data.len() {
            let mut f = self.b;
            for j in 0..self.data.len() {
                if self.alpha[j] > 0.0 {
                    f += self.alpha[j] * self.ys[j] * self.k(j, i);
                }
            }
            self.errors[i] = f - self.ys[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ex(values: Vec<f64>, label: Label) -> LabeledVector {
        LabeledVector { values, label }
    }

    fn separable_fixture() -> Vec<LabeledVector> {
        vec![
            ex(vec![0.0, 0.0], Label::Negative),
            ex(vec![1.0, 0.0], Label::Negative),
            ex(vec![0.0, 3.0], Label::Positive),
            ex(vec![1.0, 3.0], Label::Positive),
        ]
    }

    #[test]
    fn kernel_identities() {
        let x = vec![0.5, -1.5, 2.0];
        assert_eq!(KernelSpec::rbf().eval(&x, &x).unwrap(), 1.0);
        assert_relative_eq!(
            KernelSpec::Linear.eval(&x, &x).unwrap(),
            0.25 + 2.25 + 4.0,
            epsilon = 1e-15
        );
        // dot = 1 with the default constant gives (1 + 1)^3 = 8
        let a = vec![1.0, 0.0];
        let b = vec![1.0, 5.0];
        assert_relative_eq!(KernelSpec::poly3().eval(&a, &b).unwrap(), 8.0, epsilon = 1e-12);
    }

    #[test]
    fn kernel_dimension_mismatch() {
        assert!(matches!(
            KernelSpec::Linear.eval(&[1.0], &[1.0, 2.0]),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn single_class_training_fails() {
        let data = vec![ex(vec![0.0], Label::Positive), ex(vec![1.0], Label::Positive)];
        assert!(matches!(
            train_smo(&data, &KernelSpec::Linear, 1.0),
            Err(Error::Training(_))
        ));
    }

    #[test]
    fn single_support_vector_score() {
        let s = vec![3.0, 4.0];
        let model = SvmModel::from_parts(
            vec![SupportVector {
                x: s.clone(),
                y: 1.0,
                alpha: 1.0,
            }],
            0.0,
            KernelSpec::Linear,
            10.0,
        )
        .unwrap();
        assert_relative_eq!(model.decide(&s).unwrap(), 25.0, epsilon = 1e-12);
        assert_eq!(model.predict(&s).unwrap(), Label::Positive);
    }

    #[test]
    fn bias_shift_shifts_scores_exactly() {
        let data = separable_fixture();
        let model = train_smo(&data, &KernelSpec::Linear, 10.0).unwrap();
        let delta = 0.75;
        let shifted = SvmModel::from_parts(
            model.support().to_vec(),
            model.bias() + delta,
            *model.kernel(),
            model.c(),
        )
        .unwrap();
        for d in &data {
            let base = model.decide(&d.values).unwrap();
            let moved = shifted.decide(&d.values).unwrap();
            assert_relative_eq!(moved - base, delta, epsilon = 1e-12);
        }
    }

    #[test]
    fn trained_separable_fixture_classifies_training_points() {
        let data = separable_fixture();
        let run = train_smo_detailed(&data, &KernelSpec::Linear, 10.0, DEFAULT_TOL, DEFAULT_MAX_PASSES)
            .unwrap();
        for d in &data {
            assert_eq!(run.model.predict(&d.values).unwrap(), d.label);
        }
        // dual feasibility
        for sv in run.model.support() {
            assert!(sv.alpha > 0.0 && sv.alpha <= 10.0);
        }
        assert!(run.model.alpha_balance().abs() < 1e-6);
        let viol = max_kkt_violation(&run.model, &data, &run.alpha).unwrap();
        assert!(viol <= DEFAULT_TOL, "kkt violation {viol}");
    }

    #[test]
    fn decide_is_invariant_to_support_vector_order() {
        let data = separable_fixture();
        let model = train_smo(&data, &KernelSpec::rbf(), 1.0).unwrap();
        let mut reversed = model.support().to_vec();
        reversed.reverse();
        let rebuilt =
            SvmModel::from_parts(reversed, model.bias(), *model.kernel(), model.c()).unwrap();
        let probe = vec![0.3, 1.7];
        assert_eq!(
            model.decide(&probe).unwrap().to_bits(),
            rebuilt.decide(&probe).unwrap().to_bits()
        );
    }
}
