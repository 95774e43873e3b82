//! Memory-footprint accounting for trained models and storage-autonomy
//! arithmetic for the on-board logging scenario.
//!
//! Footprints count stored parameter entries at a configurable width
//! (default 8 bytes). The calibrated convention counts weight-matrix entries
//! only: an IDNN contributes its hidden matrix plus output weights (no
//! biases or RBF widths), an SVM one slot per support-vector component plus
//! one per coefficient plus the bias, and an ESN its stored input weights,
//! recurrent nonzeros, readout weights, and readout bias.

use serde::{Deserialize, Serialize};

use crate::artifact::ModelArtifact;
use crate::error::{Error, Result};
use crate::esn::EsnConfig;
use crate::windowing::WindowConfig;

/// Default storage width of one parameter, bytes.
pub const DEFAULT_BYTES_PER_PARAM: usize = 8;

/// Default on-board storage: 8 MiB.
pub const DEFAULT_CAPACITY_BYTES: u64 = 8 * 1024 * 1024;

/// Parameter count and derived size of one model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FootprintReport {
    pub parameter_count: usize,
    pub bytes_per_param: usize,
    pub footprint_kb: f64,
}

impl FootprintReport {
    pub fn new(parameter_count: usize, bytes_per_param: usize) -> Self {
        FootprintReport {
            parameter_count,
            bytes_per_param,
            footprint_kb: (parameter_count * bytes_per_param) as f64 / 1024.0,
        }
    }
}

/// Parameter slots of an `n_in -> n_hidden -> 1` network.
pub fn idnn_parameter_count(n_in: usize, n_hidden: usize) -> usize {
    n_in * n_hidden + n_hidden
}

/// Parameter slots of an SVM with `n_sv` support vectors of `dim` components.
pub fn svm_parameter_count(n_sv: usize, dim: usize) -> usize {
    n_sv * (dim + 1) + 1
}

/// Parameter slots of a reservoir built from `cfg` (dense input weights,
/// sampled recurrent nonzeros, readout weights and bias).
pub fn esn_parameter_count(cfg: &EsnConfig) -> usize {
    let n = cfg.n_reservoir;
    n * crate::data::CHANNEL_COUNT + cfg.nnz() + n + 1
}

/// Footprint of a trained model at the default 8 bytes per parameter.
pub fn footprint(artifact: &ModelArtifact) -> Result<FootprintReport> {
    footprint_with(artifact, DEFAULT_BYTES_PER_PARAM)
}

/// Footprint at an explicit parameter width.
pub fn footprint_with(artifact: &ModelArtifact, bytes_per_param: usize) -> Result<FootprintReport> {
    let count = match artifact {
        ModelArtifact::Idnn { model, .. } => idnn_parameter_count(model.n_in(), model.n_hidden()),
        ModelArtifact::Svm { model, .. } => {
            svm_parameter_count(model.support().len(), model.dim())
        }
        ModelArtifact::Esn { model } => {
            if model.readout().is_none() {
                return Err(Error::State("model has no trained readout".into()));
            }
            model.w_in().len() + model.w().len() + model.config().n_reservoir + 1
        }
    };
    Ok(FootprintReport::new(count, bytes_per_param))
}

/// What fills the on-board storage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum LoggingMode {
    /// Raw sample logging at a byte rate.
    RawLogging { bytes_per_s: f64 },
    /// On-board classification emitting a bit rate of decisions.
    Classified { bits_per_s: f64 },
}

/// Storage capacity plus the fill mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StorageScenario {
    pub capacity_bytes: u64,
    pub mode: LoggingMode,
}

impl StorageScenario {
    pub fn raw(bytes_per_s: f64) -> Self {
        StorageScenario {
            capacity_bytes: DEFAULT_CAPACITY_BYTES,
            mode: LoggingMode::RawLogging { bytes_per_s },
        }
    }

    pub fn classified(bits_per_s: f64) -> Self {
        StorageScenario {
            capacity_bytes: DEFAULT_CAPACITY_BYTES,
            mode: LoggingMode::Classified { bits_per_s },
        }
    }
}

/// Time until the storage fills.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Autonomy {
    pub seconds: f64,
    pub hours: f64,
    pub days: f64,
}

/// Computes how long a scenario runs before its storage is full.
pub fn autonomy(scenario: &StorageScenario) -> Result<Autonomy> {
    if scenario.capacity_bytes == 0 {
        return Err(Error::Argument("capacity must be > 0".into()));
    }
    let seconds = match scenario.mode {
        LoggingMode::RawLogging { bytes_per_s } => {
            if !(bytes_per_s > 0.0) {
                return Err(Error::Argument(format!(
                    "byte rate must be > 0, got {bytes_per_s}"
                )));
            }
            scenario.capacity_bytes as f64 / bytes_per_s
        }
        LoggingMode::Classified { bits_per_s } => {
            if !(bits_per_s > 0.0) {
                return Err(Error::Argument(format!(
                    "bit rate must be > 0, got {bits_per_s}"
                )));
            }
            scenario.capacity_bytes as f64 * 8.0 / bits_per_s
        }
    };
    Ok(Autonomy {
        seconds,
        hours: seconds / 3600.0,
        days: seconds / 86400.0,
    })
}

/// How the classifier produces outputs over time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassifierCadence {
    /// One decision per window hop.
    Windowed(WindowConfig),
    /// One decision per sample.
    PerSample { rate_hz: f64 },
}

/// Decisions emitted per second. Windowed cadence uses the nominal
/// (unrounded) hop `window_s - overlap_s`, so 1 s / 0.5 s gives 2 per second
/// and 0.4 s / 0.2 s gives 5.
pub fn classification_rate(cadence: &ClassifierCadence) -> f64 {
    match cadence {
        ClassifierCadence::Windowed(cfg) => 1.0 / (cfg.window_s - cfg.overlap_s),
        ClassifierCadence::PerSample { rate_hz } => *rate_hz,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn idnn_footprints_match_published_table() {
        let kb = |n_in, n_hidden| FootprintReport::new(idnn_parameter_count(n_in, n_hidden), 8).footprint_kb;
        assert!((kb(100, 50) - 39.45).abs() < 0.02);
        assert!((kb(30, 50) - 12.11).abs() < 0.02);
        assert!((kb(40, 50) - 16.02).abs() < 0.02);
        assert!((kb(30, 5) - 1.21).abs() < 0.02);
    }

    #[test]
    fn dense_five_unit_reservoir_is_about_04_kb() {
        // 20 input weights + 25 recurrent + 5 readout + bias = 51 params
        let mut cfg = EsnConfig::new(5);
        cfg.connectivity = 1.0;
        let count = esn_parameter_count(&cfg);
        assert_eq!(count, 51);
        let kb = FootprintReport::new(count, 8).footprint_kb;
        assert!((kb - 0.4).abs() / 0.4 < 0.05, "got {kb} KB");
    }

    #[test]
    fn raw_logging_autonomy() {
        let a = autonomy(&StorageScenario::raw(400.0)).unwrap();
        assert_relative_eq!(a.seconds, 20_971.52, epsilon = 1e-9);
        assert!((a.seconds - 20_971.3).abs() / 20_971.3 < 0.002);
        assert_eq!(a.hours.round(), 6.0);
    }

    #[test]
    fn classified_autonomy() {
        let two_bits = autonomy(&StorageScenario::classified(2.0)).unwrap();
        assert!((two_bits.hours - 9320.0).abs() / 9320.0 < 0.001);
        assert!(two_bits.days >= 388.0);
        let five_bits = autonomy(&StorageScenario::classified(5.0)).unwrap();
        assert!((five_bits.hours - 3728.2).abs() / 3728.2 < 0.001);
        assert_eq!(five_bits.days.round(), 155.0);
    }

    #[test]
    fn zero_rate_is_argument_error() {
        assert!(matches!(
            autonomy(&StorageScenario::raw(0.0)),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn classification_rates() {
        let one_s = WindowConfig::new(1.0, 0.5, 25.0).unwrap();
        assert_relative_eq!(
            classification_rate(&ClassifierCadence::Windowed(one_s)),
            2.0,
            epsilon = 1e-12
        );
        let short = WindowConfig::new(0.4, 0.2, 25.0).unwrap();
        assert_relative_eq!(
            classification_rate(&ClassifierCadence::Windowed(short)),
            5.0,
            epsilon = 1e-9
        );
        let no_overlap = WindowConfig::new(1.0, 0.0, 25.0).unwrap();
        assert_relative_eq!(
            classification_rate(&ClassifierCadence::Windowed(no_overlap)),
            1.0,
            epsilon = 1e-12
        );
        assert_eq!(
            classification_rate(&ClassifierCadence::PerSample { rate_hz: 25.0 }),
            25.0
        );
    }

    #[test]
    fn footprint_grows_with_every_dimension() {
        assert!(idnn_parameter_count(101, 50) > idnn_parameter_count(100, 50));
        assert!(idnn_parameter_count(100, 51) > idnn_parameter_count(100, 50));
        assert!(svm_parameter_count(11, 30) > svm_parameter_count(10, 30));
        assert!(svm_parameter_count(10, 31) > svm_parameter_count(10, 30));
        let mut small = EsnConfig::new(5);
        small.connectivity = 1.0;
        let mut large = EsnConfig::new(6);
        large.connectivity = 1.0;
        assert!(esn_parameter_count(&large) > esn_parameter_count(&small));
    }

    #[test]
    fn autonomy_scales_linearly() {
        let base = autonomy(&StorageScenario::raw(400.0)).unwrap();
        let double_cap = autonomy(&StorageScenario {
            capacity_bytes: 2 * DEFAULT_CAPACITY_BYTES,
            mode: LoggingMode::RawLogging { bytes_per_s: 400.0 },
        })
        .unwrap();
        assert_relative_eq!(double_cap.seconds, 2.0 * base.seconds, epsilon = 1e-9);
        let double_rate = autonomy(&StorageScenario::raw(800.0)).unwrap();
        assert_relative_eq!(double_rate.seconds, base.seconds / 2.0, epsilon = 1e-9);
    }
}
