//! Fixed-length overlapping windows over labeled streams.
//!
//! A window flattens its slice channel-major: all heave samples, then surge,
//! then sway, then depth. With 25 Hz input a 1 s window therefore carries
//! 100 values and a 0.4 s window 40. The window label is the majority of the
//! per-timestep labels, ties going to the positive class.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::csvio;
use crate::data::{Label, TimeSeries, CHANNEL_COUNT};
use crate::error::{Error, Result};

/// Relative tolerance when comparing a series rate against a config rate.
const RATE_TOL: f64 = 1e-9;

/// Window geometry in seconds plus the sampling rate it applies to.
///
/// The sample counts are derived as `window_samples = round(window_s * rate)`
/// and `overlap_samples = floor(overlap_s * rate)`; flooring keeps the
/// half-window overlap as close as an integer hop allows (1 s / 0.5 s at
/// 25 Hz gives overlap 12, hop 13).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowConfig {
    pub window_s: f64,
    pub overlap_s: f64,
    pub rate_hz: f64,
}

impl WindowConfig {
    pub fn new(window_s: f64, overlap_s: f64, rate_hz: f64) -> Result<Self> {
        let cfg = WindowConfig {
            window_s,
            overlap_s,
            rate_hz,
        };
        if !(rate_hz > 0.0) {
            return Err(Error::Config(format!("rate must be > 0, got {rate_hz}")));
        }
        if !(overlap_s >= 0.0 && overlap_s < window_s) {
            return Err(Error::Config(format!(
                "need 0 <= overlap < window, got overlap {overlap_s} window {window_s}"
            )));
        }
        if cfg.window_samples() < 1 {
            return Err(Error::Config("window spans no samples".into()));
        }
        if cfg.overlap_samples() >= cfg.window_samples() {
            return Err(Error::Config(
                "overlap leaves no hop between consecutive windows".into(),
            ));
        }
        Ok(cfg)
    }

    pub fn window_samples(&self) -> usize {
        (self.window_s * self.rate_hz).round() as usize
    }

    pub fn overlap_samples(&self) -> usize {
        // epsilon guards against products like 0.2 * 25 landing just below
        // their integer value
        (self.overlap_s * self.rate_hz + 1e-9).floor() as usize
    }

    /// Samples between consecutive window starts.
    pub fn hop(&self) -> usize {
        self.window_samples() - self.overlap_samples()
    }
}

/// One flattened window with its class label.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    values: Vec<f64>,
    label: Label,
}

impl Window {
    pub fn new(values: Vec<f64>, label: Label) -> Result<Self> {
        if values.is_empty() || values.len() % CHANNEL_COUNT != 0 {
            return Err(Error::Argument(format!(
                "window length must be a positive multiple of {CHANNEL_COUNT}, got {}",
                values.len()
            )));
        }
        Ok(Window { values, label })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn label(&self) -> Label {
        self.label
    }

    /// Samples per channel.
    pub fn samples_per_channel(&self) -> usize {
        self.values.len() / CHANNEL_COUNT
    }

    /// The contiguous block of one channel (0 heave, 1 surge, 2 sway, 3 depth).
    pub fn channel(&self, idx: usize) -> &[f64] {
        let w = self.samples_per_channel();
        &self.values[idx * w..(idx + 1) * w]
    }
}

/// Splits a stream into overlapping windows.
///
/// Windows start at sample indices `0, h, 2h, ...` with `h = cfg.hop()`; only
/// complete windows are emitted, so a stream shorter than one window yields
/// none.
pub fn segment(series: &TimeSeries, cfg: &WindowConfig) -> Result<Vec<Window>> {
    let rate_diff = (series.rate() - cfg.rate_hz).abs();
    if rate_diff > RATE_TOL * series.rate().max(cfg.rate_hz).max(1.0) {
        return Err(Error::Config(format!(
            "series rate {} does not match window config rate {}",
            series.rate(),
            cfg.rate_hz
        )));
    }
    let w = cfg.window_samples();
    let h = cfg.hop();
    let n = series.len();
    let samples = series.samples();
    let mut windows = Vec::new();
    if n < w {
        return Ok(windows);
    }
    let mut start = 0;
    while start + w <= n {
        let slice = &samples[start..start + w];
        let mut values = Vec::with_capacity(CHANNEL_COUNT * w);
        for ch in 0..CHANNEL_COUNT {
            values.extend(slice.iter().map(|s| s.channels()[ch]));
        }
        let label = label_window(slice.iter().map(|s| s.label))?;
        windows.push(Window { values, label });
        start += h;
    }
    Ok(windows)
}

/// Majority vote over per-timestep labels; an exact tie is positive.
pub fn label_window(step_labels: impl IntoIterator<Item = Label>) -> Result<Label> {
    let mut pos = 0usize;
    let mut total = 0usize;
    for l in step_labels {
        total += 1;
        if l.is_positive() {
            pos += 1;
        }
    }
    if total == 0 {
        return Err(Error::Argument("cannot label an empty window".into()));
    }
    Ok(if 2 * pos >= total {
        Label::Positive
    } else {
        Label::Negative
    })
}

/// Balances classes by randomly undersampling the majority class to the
/// minority count and shuffling, all driven by a ChaCha8 generator.
pub fn balance(windows: &[Window], seed: u64) -> Result<Vec<Window>> {
    let mut pos: Vec<usize> = Vec::new();
    let mut neg: Vec<usize> = Vec::new();
    for (i, w) in windows.iter().enumerate() {
        if w.label.is_positive() {
            pos.push(i);
        } else {
            neg.push(i);
        }
    }
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::Balance(
            "both classes must be present to balance".into(),
        ));
    }
    let keep = pos.len().min(neg.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    pos.shuffle(&mut rng);
    neg.shuffle(&mut rng);
    pos.truncate(keep);
    neg.truncate(keep);
    let mut picked: Vec<usize> = pos.into_iter().chain(neg).collect();
    picked.shuffle(&mut rng);
    Ok(picked.into_iter().map(|i| windows[i].clone()).collect())
}

impl From<&Window> for crate::data::LabeledVector {
    fn from(w: &Window) -> Self {
        crate::data::LabeledVector {
            values: w.values.clone(),
            label: w.label,
        }
    }
}

/// Writes windows as `label,v1,...,v4W` rows under a matching header.
pub fn windows_to_csv(windows: &[Window]) -> String {
    let width = windows.first().map_or(CHANNEL_COUNT, |w| w.values.len());
    csvio::emit_labeled(windows.iter().map(|w| (w.label, w.values.as_slice())), 'v', width)
}

/// Parses the window CSV layout produced by [`windows_to_csv`].
pub fn windows_from_csv(text: &str) -> Result<Vec<Window>> {
    let (rows, _) = csvio::parse_labeled(text, 'v')?;
    rows.into_iter()
        .map(|(label, values)| Window::new(values, label))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{synthesize, SensorSample, SynthConfig};

    fn series_of(n: usize, rate: f64, label: Label) -> TimeSeries {
        let samples = (0..n)
            .map(|i| SensorSample {
                t: i as f64 / rate,
                heave: i as f64,
                surge: 100.0 + i as f64,
                sway: 200.0 + i as f64,
                depth: 300.0 + i as f64,
                label,
            })
            .collect();
        TimeSeries::new(rate, samples).unwrap()
    }

    #[test]
    fn one_second_window_at_25hz_has_100_values() {
        let ts = synthesize(&SynthConfig {
            duration_s: 10.0,
            ..SynthConfig::default()
        })
        .unwrap();
        let cfg = WindowConfig::new(1.0, 0.5, 25.0).unwrap();
        let windows = segment(&ts, &cfg).unwrap();
        assert!(!windows.is_empty());
        assert!(windows.iter().all(|w| w.values().len() == 100));
        assert!(windows.iter().all(|w| w.samples_per_channel() == 25));
    }

    #[test]
    fn half_window_overlap_floors_to_12_samples() {
        let cfg = WindowConfig::new(1.0, 0.5, 25.0).unwrap();
        assert_eq!(cfg.window_samples(), 25);
        assert_eq!(cfg.overlap_samples(), 12);
        assert_eq!(cfg.hop(), 13);
        let short = WindowConfig::new(0.4, 0.2, 25.0).unwrap();
        assert_eq!(short.window_samples(), 10);
        assert_eq!(short.overlap_samples(), 5);
        assert_eq!(short.hop(), 5);
    }

    #[test]
    fn too_short_series_yields_no_windows() {
        let ts = series_of(20, 25.0, Label::Negative);
        let cfg = WindowConfig::new(1.0, 0.5, 25.0).unwrap();
        assert_eq!(segment(&ts, &cfg).unwrap().len(), 0);
    }

    #[test]
    fn window_counts_match_hop_formula() {
        // 100 samples, window 25, overlap 12 (hop 13) -> 6 windows
        let ts = series_of(100, 25.0, Label::Negative);
        let cfg = WindowConfig::new(1.0, 0.48, 25.0).unwrap();
        assert_eq!(cfg.hop(), 13);
        assert_eq!(segment(&ts, &cfg).unwrap().len(), 6);
        // 100 samples, window 10, hop 5 -> 19 windows
        let cfg = WindowConfig::new(0.4, 0.2, 25.0).unwrap();
        assert_eq!(segment(&ts, &cfg).unwrap().len(), 19);
    }

    #[test]
    fn consecutive_windows_share_overlap_per_channel() {
        let ts = series_of(60, 25.0, Label::Negative);
        let cfg = WindowConfig::new(1.0, 0.5, 25.0).unwrap();
        let windows = segment(&ts, &cfg).unwrap();
        let (w, h, ov) = (25, 13, 12);
        for pair in windows.windows(2) {
            for ch in 0..CHANNEL_COUNT {
                let a = pair[0].channel(ch);
                let b = pair[1].channel(ch);
                assert_eq!(&a[h..], &b[..ov]);
                assert_eq!(a.len(), w);
            }
        }
    }

    #[test]
    fn rate_mismatch_is_config_error() {
        let ts = series_of(100, 25.0, Label::Negative);
        let cfg = WindowConfig::new(1.0, 0.5, 50.0).unwrap();
        assert!(matches!(segment(&ts, &cfg), Err(Error::Config(_))));
    }

    #[test]
    fn majority_label_rules() {
        let all_pos = vec![Label::Positive; 7];
        assert_eq!(label_window(all_pos).unwrap(), Label::Positive);
        let all_neg = vec![Label::Negative; 7];
        assert_eq!(label_window(all_neg).unwrap(), Label::Negative);
        // 13 of 25 positive -> positive
        let mut mixed = vec![Label::Positive; 13];
        mixed.extend(vec![Label::Negative; 12]);
        assert_eq!(label_window(mixed).unwrap(), Label::Positive);
        // exact tie -> positive
        let tie = vec![Label::Positive, Label::Negative];
        assert_eq!(label_window(tie).unwrap(), Label::Positive);
        assert!(matches!(
            label_window(std::iter::empty()),
            Err(Error::Argument(_))
        ));
    }

    fn tiny_window(v: f64, label: Label) -> Window {
        Window::new(vec![v; CHANNEL_COUNT], label).unwrap()
    }

    #[test]
    fn balance_undersamples_majority() {
        let mut windows: Vec<Window> = (0..10).map(|i| tiny_window(i as f64, Label::Negative)).collect();
        windows.extend((0..4).map(|i| tiny_window(100.0 + i as f64, Label::Positive)));
        let balanced = balance(&windows, 7).unwrap();
        assert_eq!(balanced.len(), 8);
        assert_eq!(balanced.iter().filter(|w| w.label().is_positive()).count(), 4);
    }

    #[test]
    fn balance_keeps_already_balanced_multiset() {
        let windows: Vec<Window> = (0..6)
            .map(|i| {
                tiny_window(
                    i as f64,
                    if i % 2 == 0 { Label::Positive } else { Label::Negative },
                )
            })
            .collect();
        let balanced = balance(&windows, 3).unwrap();
        assert_eq!(balanced.len(), windows.len());
        let mut orig: Vec<f64> = windows.iter().map(|w| w.values()[0]).collect();
        let mut got: Vec<f64> = balanced.iter().map(|w| w.values()[0]).collect();
        orig.sort_by(f64::total_cmp);
        got.sort_by(f64::total_cmp);
        assert_eq!(orig, got);
    }

    #[test]
    fn balance_is_deterministic_and_rejects_single_class() {
        let mut windows: Vec<Window> = (0..9).map(|i| tiny_window(i as f64, Label::Negative)).collect();
        assert!(matches!(balance(&windows, 1), Err(Error::Balance(_))));
        windows.push(tiny_window(99.0, Label::Positive));
        assert_eq!(balance(&windows, 11).unwrap(), balance(&windows, 11).unwrap());
    }

    #[test]
    fn window_csv_round_trips() {
        let windows = vec![
            Window::new(vec![0.5, -1.25, 3.0, 0.0], Label::Positive).unwrap(),
            Window::new(vec![1.0, 2.0, 3.0, 4.0], Label::Negative).unwrap(),
        ];
        let text = windows_to_csv(&windows);
        assert!(text.starts_with("label,v1,v2,v3,v4\n"));
        assert_eq!(windows_from_csv(&text).unwrap(), windows);
    }
}
