//! Statistical feature extraction: each window maps to a 30-value vector of
//! per-channel summary statistics plus pairwise channel correlations.
//!
//! Per channel (heave, surge, sway, depth) the vector carries mean,
//! standard deviation, minimum, maximum, skew, and kurtosis, in that order —
//! 24 values — followed by the six Pearson correlations over the channel
//! pairs (heave-surge, heave-sway, heave-depth, surge-sway, surge-depth,
//! sway-depth).
//!
//! Conventions, fixed for reproducibility: moments are population moments
//! (divide by n), kurtosis is excess kurtosis, and a constant channel gets
//! skew 0, kurtosis 0, and correlation 0 with every other channel.

use serde::{Deserialize, Serialize};

use crate::csvio;
use crate::data::{Label, CHANNEL_COUNT};
use crate::error::{Error, Result};
use crate::windowing::Window;

/// Length of every feature vector.
pub const FEATURE_COUNT: usize = 30;

/// Statistics per channel before the correlation block.
pub const STATS_PER_CHANNEL: usize = 6;

/// One extracted feature vector with the label carried over from its window.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    values: Vec<f64>,
    label: Label,
}

impl FeatureVector {
    pub fn new(values: Vec<f64>, label: Label) -> Result<Self> {
        if values.len() != FEATURE_COUNT {
            return Err(Error::Argument(format!(
                "feature vector must have {FEATURE_COUNT} values, got {}",
                values.len()
            )));
        }
        Ok(FeatureVector { values, label })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn label(&self) -> Label {
        self.label
    }
}

/// Extracts the 30-value summary of one window.
///
/// Fails if a channel holds fewer than two samples.
pub fn extract(window: &Window) -> Result<FeatureVector> {
    let per_channel = window.samples_per_channel();
    if per_channel < 2 {
        return Err(Error::Argument(format!(
            "need at least 2 samples per channel, got {per_channel}"
        )));
    }
    let mut values = Vec::with_capacity(FEATURE_COUNT);
    for ch in 0..CHANNEL_COUNT {
        let stats = ChannelStats::of(window.channel(ch));
        values.extend_from_slice(&[
            stats.mean,
            stats.std,
            stats.min,
            stats.max,
            stats.skew,
            stats.kurtosis,
        ]);
    }
    for a in 0..CHANNEL_COUNT {
        for b in (a + 1)..CHANNEL_COUNT {
            values.push(pearson(window.channel(a), window.channel(b)));
        }
    }
    FeatureVector::new(values, window.label())
}

struct ChannelStats {
    mean: f64,
    std: f64,
    min: f64,
    max: f64,
    skew: f64,
    kurtosis: f64,
}

impl ChannelStats {
    fn of(xs: &[f64]) -> ChannelStats {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if min == max {
            // constant channel: degenerate moments are zeroed by convention
            return ChannelStats {
                mean,
                std: 0.0,
                min,
                max,
                skew: 0.0,
                kurtosis: 0.0,
            };
        }
        let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
        for &x in xs {
            let d = x - mean;
            let d2 = d * d;
            m2 += d2;
            m3 += d2 * d;
            m4 += d2 * d2;
        }
        m2 /= n;
        m3 /= n;
        m4 /= n;
        ChannelStats {
            mean,
            std: m2.sqrt(),
            min,
            max,
            skew: m3 / m2.powf(1.5),
            kurtosis: m4 / (m2 * m2) - 3.0,
        }
    }
}

/// Population Pearson correlation, 0 when either input is constant.
pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len(), "correlation needs equal lengths");
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let constant =
        |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min) == v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if constant(xs) || constant(ys) {
        return 0.0;
    }
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - mx;
        let dy = y - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0)
}

impl From<&FeatureVector> for crate::data::LabeledVector {
    fn from(f: &FeatureVector) -> Self {
        crate::data::LabeledVector {
            values: f.values.clone(),
            label: f.label,
        }
    }
}

/// Per-column mean/std transform fitted on a training set and reused on test
/// data. Columns with zero variance pass through centered only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    mean: Vec<f64>,
    std: Vec<f64>,
}

impl Standardizer {
    pub fn fit<'a>(rows: impl Iterator<Item = &'a [f64]> + Clone) -> Result<Standardizer> {
        let width = rows
            .clone()
            .next()
            .ok_or_else(|| Error::Argument("cannot standardize an empty set".into()))?
            .len();
        let mut mean = vec![0.0; width];
        let mut count = 0usize;
        for row in rows.clone() {
            assert_eq!(row.len(), width, "ragged rows");
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
            count += 1;
        }
        let n = count as f64;
        for m in &mut mean {
            *m /= n;
        }
        let mut var = vec![0.0; width];
        for row in rows {
            for ((s, v), m) in var.iter_mut().zip(row).zip(&mean) {
                let d = v - m;
                *s += d * d;
            }
        }
        let std = var
            .into_iter()
            .map(|s| {
                let sd = (s / n).sqrt();
                if sd > 0.0 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Ok(Standardizer { mean, std })
    }

    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.mean.len(), "dimension mismatch");
        x.iter()
            .zip(&self.mean)
            .zip(&self.std)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    }
}

/// Writes feature vectors as `label,f1,...,f30` rows.
pub fn features_to_csv(features: &[FeatureVector]) -> String {
    csvio::emit_labeled(
        features.iter().map(|f| (f.label, f.values.as_slice())),
        'f',
        FEATURE_COUNT,
    )
}

/// Parses the feature CSV layout produced by [`features_to_csv`].
pub fn features_from_csv(text: &str) -> Result<Vec<FeatureVector>> {
    let (rows, width) = csvio::parse_labeled(text, 'f')?;
    if width != FEATURE_COUNT {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected {FEATURE_COUNT} feature columns, got {width}"),
        });
    }
    rows.into_iter()
        .map(|(label, values)| FeatureVector::new(values, label))
        .collect()
}
