//! Labeled sensor streams: CSV ingest/emit and a seedable synthetic generator.
//!
//! A stream is a 4-channel (heave, surge, sway, depth) time series sampled at a
//! fixed rate, with a per-timestep class label: `+1` for prey handling, `-1`
//! otherwise. The only ingest format is the CSV schema documented on
//! [`CSV_HEADER`]; public datasets must be converted to it by the user.
//!
//! All randomness flows through explicit seeds feeding ChaCha8 generators, so
//! every operation here is a pure function of its inputs.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of sensor channels (heave, surge, sway, depth).
pub const CHANNEL_COUNT: usize = 4;

/// Sampling rate assumed when a stream is too short to infer one.
pub const DEFAULT_RATE_HZ: f64 = 25.0;

/// Tolerated deviation, in seconds, between consecutive timestamp spacing
/// and the nominal sample period.
pub const SPACING_TOL_S: f64 = 1e-6;

/// Exact header line of the stream CSV schema.
pub const CSV_HEADER: &str = "t,heave,surge,sway,depth,label";

/// Binary class label. Positive means prey handling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    /// Maps a classifier score to a label: `sign(score)`, with 0 mapped to positive.
    pub fn from_score(score: f64) -> Label {
        if score < 0.0 {
            Label::Negative
        } else {
            Label::Positive
        }
    }

    /// Parses the CSV literal `-1` or `1`.
    pub fn from_csv(field: &str) -> Option<Label> {
        match field {
            "-1" => Some(Label::Negative),
            "1" => Some(Label::Positive),
            _ => None,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Label::Negative => -1.0,
            Label::Positive => 1.0,
        }
    }

    pub fn as_csv(self) -> &'static str {
        match self {
            Label::Negative => "-1",
            Label::Positive => "1",
        }
    }

    pub fn is_positive(self) -> bool {
        self == Label::Positive
    }
}

/// One training example: a flattened value vector with its class label.
/// Windows and feature vectors both reduce to this for the classifiers.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledVector {
    pub values: Vec<f64>,
    pub label: Label,
}

/// One labeled 4-channel reading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorSample {
    /// Time in seconds, strictly increasing within a series.
    pub t: f64,
    /// Vertical acceleration, g.
    pub heave: f64,
    /// Fore-aft acceleration, g.
    pub surge: f64,
    /// Lateral acceleration, g.
    pub sway: f64,
    /// Pressure-derived depth, meters.
    pub depth: f64,
    pub label: Label,
}

impl SensorSample {
    /// Channel values in canonical order: heave, surge, sway, depth.
    pub fn channels(&self) -> [f64; CHANNEL_COUNT] {
        [self.heave, self.surge, self.sway, self.depth]
    }

    fn all_finite(&self) -> bool {
        self.t.is_finite()
            && self.heave.is_finite()
            && self.surge.is_finite()
            && self.sway.is_finite()
            && self.depth.is_finite()
    }
}

/// An ordered, fixed-rate, labeled sensor stream.
///
/// Immutable after construction. Construction validates that timestamps are
/// strictly increasing with spacing within [`SPACING_TOL_S`] of `1/rate` and
/// that every numeric field is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    rate: f64,
    samples: Vec<SensorSample>,
}

impl TimeSeries {
    pub fn new(rate: f64, samples: Vec<SensorSample>) -> Result<Self> {
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(Error::Argument(format!("rate must be positive, got {rate}")));
        }
        let period = 1.0 / rate;
        for (i, s) in samples.iter().enumerate() {
            if !s.all_finite() {
                return Err(Error::Argument(format!("non-finite field in sample {i}")));
            }
            if i > 0 {
                let dt = s.t - samples[i - 1].t;
                if dt <= 0.0 {
                    return Err(Error::Ordering {
                        line: i + 1,
                        message: format!("timestamps not strictly increasing (dt = {dt})"),
                    });
                }
                if (dt - period).abs() > SPACING_TOL_S {
                    return Err(Error::Ordering {
                        line: i + 1,
                        message: format!(
                            "spacing {dt} deviates from period {period} by more than {SPACING_TOL_S} s"
                        ),
                    });
                }
            }
        }
        Ok(TimeSeries { rate, samples })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn samples(&self) -> &[SensorSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// True if both classes occur in the stream.
    pub fn has_both_classes(&self) -> bool {
        let mut pos = false;
        let mut neg = false;
        for s in &self.samples {
            match s.label {
                Label::Positive => pos = true,
                Label::Negative => neg = true,
            }
        }
        pos && neg
    }

    /// Parses the stream CSV schema (see [`CSV_HEADER`]).
    ///
    /// The sampling rate is inferred from the median timestamp spacing so an
    /// odd first pair cannot skew it; fewer than two rows fall back to
    /// [`DEFAULT_RATE_HZ`].
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, header)) if header.trim_end_matches('\r') == CSV_HEADER => {}
            Some((_, header)) => {
                return Err(Error::Parse {
                    line: 1,
                    message: format!("expected header `{CSV_HEADER}`, got `{header}`"),
                })
            }
            None => {
                return Err(Error::Parse {
                    line: 1,
                    message: "empty input, missing header".into(),
                })
            }
        }

        let mut samples: Vec<SensorSample> = Vec::new();
        for (idx, raw) in lines {
            let line = idx + 1; // 1-based
            let row = raw.trim_end_matches('\r');
            let fields: Vec<&str> = row.split(',').collect();
            if fields.len() != 6 {
                return Err(Error::Parse {
                    line,
                    message: format!("expected 6 fields, got {}", fields.len()),
                });
            }
            let mut nums = [0.0f64; 5];
            for (k, field) in fields[..5].iter().enumerate() {
                let v: f64 = field.parse().map_err(|_| Error::Parse {
                    line,
                    message: format!("non-numeric field `{field}`"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        line,
                        message: format!("non-finite field `{field}`"),
                    });
                }
                nums[k] = v;
            }
            let label = Label::from_csv(fields[5]).ok_or_else(|| Error::Parse {
                line,
                message: format!("label must be `-1` or `1`, got `{}`", fields[5]),
            })?;
            if let Some(prev) = samples.last() {
                if nums[0] <= prev.t {
                    return Err(Error::Ordering {
                        line,
                        message: format!("timestamp {} not greater than previous {}", nums[0], prev.t),
                    });
                }
            }
            samples.push(SensorSample {
                t: nums[0],
                heave: nums[1],
                surge: nums[2],
                sway: nums[3],
                depth: nums[4],
                label,
            });
        }

        let rate = infer_rate(&samples);
        TimeSeries::new(rate, samples)
    }

    /// Emits the stream CSV schema. Floats use shortest round-trip formatting,
    /// so `parse_csv(to_csv(s))` reproduces every sample bit-exactly.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(32 * (self.samples.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for s in &self.samples {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                s.t,
                s.heave,
                s.surge,
                s.sway,
                s.depth,
                s.label.as_csv()
            ));
        }
        out
    }
}

fn infer_rate(samples: &[SensorSample]) -> f64 {
    if samples.len() < 2 {
        return DEFAULT_RATE_HZ;
    }
    let mut diffs: Vec<f64> = samples.windows(2).map(|w| w[1].t - w[0].t).collect();
    diffs.sort_by(f64::total_cmp);
    1.0 / diffs[diffs.len() / 2]
}

/// Parameters of the synthetic two-class stream generator.
///
/// The generator alternates swimming segments (stroke-frequency oscillation
/// on heave/surge, slowly varying dive depth, label `-1`) with prey-handling
/// bouts (posture shift plus high-variance bursts on the acceleration axes
/// and a frozen depth plateau, label `+1`). Segment durations are uniform in
/// `[bout_min_s, 2 * bout_mean_s - bout_min_s]`. All draws come from a
/// ChaCha8 generator seeded with `seed`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthConfig {
    pub seed: u64,
    pub duration_s: f64,
    pub rate_hz: f64,
    /// Mean duration of one segment (both classes), seconds.
    pub bout_mean_s: f64,
    /// Minimum duration of one segment, seconds. Must cover at least one sample.
    pub bout_min_s: f64,
    /// Swimming stroke frequency, Hz.
    pub osc_freq_hz: f64,
    /// Standard deviation of prey-handling bursts on surge, g.
    pub burst_amp_g: f64,
    /// Standard deviation of baseline sensor noise, g.
    pub noise_std_g: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: crate::DEFAULT_SEED,
            duration_s: 600.0,
            rate_hz: DEFAULT_RATE_HZ,
            bout_mean_s: 15.0,
            bout_min_s: 3.0,
            osc_freq_hz: 1.2,
            burst_amp_g: 1.2,
            noise_std_g: 0.12,
        }
    }
}

impl SynthConfig {
    fn validate(&self) -> Result<()> {
        if !(self.duration_s >= 0.0) {
            return Err(Error::Argument(format!(
                "duration must be >= 0, got {}",
                self.duration_s
            )));
        }
        if !(self.rate_hz > 0.0) {
            return Err(Error::Argument(format!("rate must be > 0, got {}", self.rate_hz)));
        }
        if !(self.noise_std_g >= 0.0) {
            return Err(Error::Argument(format!(
                "noise std must be >= 0, got {}",
                self.noise_std_g
            )));
        }
        if !(self.bout_min_s * self.rate_hz >= 1.0) {
            return Err(Error::Argument(
                "minimum bout must span at least one sample".into(),
            ));
        }
        if !(self.bout_mean_s >= self.bout_min_s) {
            return Err(Error::Argument(
                "mean bout duration must be >= minimum bout duration".into(),
            ));
        }
        if !(self.osc_freq_hz >= 0.0) || !(self.burst_amp_g >= 0.0) {
            return Err(Error::Argument(
                "oscillation frequency and burst amplitude must be >= 0".into(),
            ));
        }
        Ok(())
    }
}

// Fixed signal-shape constants of the generator. Magnitudes are in g except
// the dive numbers (meters / seconds).
const SWIM_HEAVE_AMP_G: f64 = 0.25;
const SWIM_SURGE_AMP_G: f64 = 0.10;
const PREY_HEAVE_SHIFT_G: f64 = -0.3;
const PREY_SURGE_SHIFT_G: f64 = 0.4;
const PREY_HEAVE_BURST_FRAC: f64 = 0.6;
const PREY_SWAY_BURST_FRAC: f64 = 0.8;
const DIVE_MID_M: f64 = 3.0;
const DIVE_AMP_M: f64 = 2.5;
const DIVE_PERIOD_S: f64 = 60.0;
const DEPTH_NOISE_FRAC: f64 = 0.5;

/// Generates a deterministic synthetic labeled stream from `cfg`.
///
/// Identical configs produce bit-identical series. The output contains both
/// classes whenever `duration_s >= 2 * bout_mean_s`.
pub fn synthesize(cfg: &SynthConfig) -> Result<TimeSeries> {
    cfg.validate()?;
    let n = (cfg.duration_s * cfg.rate_hz).floor() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut samples = Vec::with_capacity(n);

    let dive_phase_step = 2.0 * std::f64::consts::PI / (DIVE_PERIOD_S * cfg.rate_hz);
    let mut dive_phase: f64 = rng.random_range(0.0..2.0 * std::f64::consts::PI);

    let dur_lo = cfg.bout_min_s;
    let dur_hi = 2.0 * cfg.bout_mean_s - cfg.bout_min_s;
    let mut draw_segment_samples = |rng: &mut ChaCha8Rng| -> usize {
        let dur_s = if dur_hi > dur_lo {
            rng.random_range(dur_lo..dur_hi)
        } else {
            cfg.bout_mean_s
        };
        ((dur_s * cfg.rate_hz).round() as usize).max(1)
    };

    let mut prey = false; // streams start swimming
    let mut remaining_in_segment = 0usize;
    for i in 0..n {
        if remaining_in_segment == 0 {
            if i > 0 {
                prey = !prey;
            }
            remaining_in_segment = draw_segment_samples(&mut rng);
        }
        remaining_in_segment -= 1;

        let t = i as f64 / cfg.rate_hz;
        let z: [f64; CHANNEL_COUNT] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let sigma = cfg.noise_std_g;
        let (heave, surge, sway);
        if prey {
            let heave_std = (PREY_HEAVE_BURST_FRAC * cfg.burst_amp_g).hypot(sigma);
            let surge_std = cfg.burst_amp_g.hypot(sigma);
            let sway_std = (PREY_SWAY_BURST_FRAC * cfg.burst_amp_g).hypot(sigma);
            heave = PREY_HEAVE_SHIFT_G + heave_std * z[0];
            surge = PREY_SURGE_SHIFT_G + surge_std * z[1];
            sway = sway_std * z[2];
            // depth plateau: the dive phase is frozen during a bout
        } else {
            let stroke = 2.0 * std::f64::consts::PI * cfg.osc_freq_hz * t;
            heave = SWIM_HEAVE_AMP_G * stroke.sin() + sigma * z[0];
            surge = SWIM_SURGE_AMP_G * stroke.cos() + sigma * z[1];
            sway = sigma * z[2];
            dive_phase += dive_phase_step;
        }
        let depth = DIVE_MID_M + DIVE_AMP_M * dive_phase.sin() + DEPTH_NOISE_FRAC * sigma * z[3];
        samples.push(SensorSample {
            t,
            heave,
            surge,
            sway,
            depth,
            label: if prey { Label::Positive } else { Label::Negative },
        });
    }

    TimeSeries::new(cfg.rate_hz, samples)
}
