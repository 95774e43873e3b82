//! Serializable model artifacts: the trained parameters of exactly one
//! classifier family, as a structured JSON document. Loading re-validates
//! every invariant through the family constructors.

use serde::{Deserialize, Serialize};

use crate::data::Label;
use crate::error::{Error, Result};
use crate::esn::{EsnConfig, EsnModel, Readout};
use crate::features::Standardizer;
use crate::idnn::{HiddenKind, IdnnConfig, IdnnModel};
use crate::svm::{KernelSpec, SupportVector, SvmModel};

/// Classifier family tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Idnn,
    Svm,
    Esn,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Idnn => "idnn",
            Family::Svm => "svm",
            Family::Esn => "esn",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "idnn" => Ok(Family::Idnn),
            "svm" => Ok(Family::Svm),
            "esn" => Ok(Family::Esn),
            other => Err(Error::Argument(format!(
                "unknown family `{other}`, expected idnn, svm, or esn"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct IdnnDims {
    n_in: usize,
    n_hidden: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct IdnnDoc {
    dims: IdnnDims,
    hidden_kind: HiddenKind,
    hidden_matrix: Vec<f64>,
    hidden_scalars: Vec<f64>,
    output_weights: Vec<f64>,
    output_bias: f64,
    config: IdnnConfig,
    seed: u64,
    standardizer: Option<Standardizer>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SvmDoc {
    kernel: KernelSpec,
    c: f64,
    support_vectors: Vec<Vec<f64>>,
    alpha: Vec<f64>,
    y: Vec<f64>,
    b: f64,
    standardizer: Option<Standardizer>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct EsnDoc {
    config: EsnConfig,
    /// Dense input weights, one 4-value row per reservoir unit.
    w_in: Vec<Vec<f64>>,
    /// Sparse recurrent weights as (row, col, value) triples.
    w: Vec<(usize, usize, f64)>,
    readout: Option<Readout>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum ArtifactDoc {
    Idnn(IdnnDoc),
    Svm(SvmDoc),
    Esn(EsnDoc),
}

/// A trained model of one family, plus the input standardizer when the
/// training pipeline used one.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelArtifact {
    Idnn {
        model: IdnnModel,
        config: IdnnConfig,
        standardizer: Option<Standardizer>,
    },
    Svm {
        model: SvmModel,
        standardizer: Option<Standardizer>,
    },
    Esn {
        model: EsnModel,
    },
}

impl ModelArtifact {
    pub fn family(&self) -> Family {
        match self {
            ModelArtifact::Idnn { .. } => Family::Idnn,
            ModelArtifact::Svm { .. } => Family::Svm,
            ModelArtifact::Esn { .. } => Family::Esn,
        }
    }

    /// Classifies one flattened vector (window or feature row), applying the
    /// stored standardizer first when present. Not available for ESN models,
    /// which classify streams.
    pub fn predict_vector(&self, x: &[f64]) -> Result<Label> {
        match self {
            ModelArtifact::Idnn {
                model, standardizer, ..
            } => match standardizer {
                Some(s) => model.predict(&s.transform(x)),
                None => model.predict(x),
            },
            ModelArtifact::Svm { model, standardizer } => match standardizer {
                Some(s) => model.predict(&s.transform(x)),
                None => model.predict(x),
            },
            ModelArtifact::Esn { .. } => Err(Error::State(
                "stream models classify streams, not single vectors".into(),
            )),
        }
    }

    pub fn to_json(&self) -> String {
        let doc = match self {
            ModelArtifact::Idnn {
                model,
                config,
                standardizer,
            } => ArtifactDoc::Idnn(IdnnDoc {
                dims: IdnnDims {
                    n_in: model.n_in(),
                    n_hidden: model.n_hidden(),
                },
                hidden_kind: model.hidden_kind(),
                hidden_matrix: model.hidden_matrix().to_vec(),
                hidden_scalars: model.hidden_scalars().to_vec(),
                output_weights: model.output_weights().to_vec(),
                output_bias: model.output_bias(),
                config: config.clone(),
                seed: config.seed,
                standardizer: standardizer.clone(),
            }),
            ModelArtifact::Svm { model, standardizer } => ArtifactDoc::Svm(SvmDoc {
                kernel: *model.kernel(),
                c: model.c(),
                support_vectors: model.support().iter().map(|sv| sv.x.clone()).collect(),
                alpha: model.support().iter().map(|sv| sv.alpha).collect(),
                y: model.support().iter().map(|sv| sv.y).collect(),
                b: model.bias(),
                standardizer: standardizer.clone(),
            }),
            ModelArtifact::Esn { model } => ArtifactDoc::Esn(EsnDoc {
                config: model.config().clone(),
                w_in: model
                    .w_in()
                    .chunks(crate::data::CHANNEL_COUNT)
                    .map(|row| row.to_vec())
                    .collect(),
                w: model.w().to_vec(),
                readout: model.readout().cloned(),
            }),
        };
        serde_json::to_string_pretty(&doc).expect("artifact serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ArtifactDoc =
            serde_json::from_str(text).map_err(|e| Error::Artifact(e.to_string()))?;
        match doc {
            ArtifactDoc::Idnn(d) => {
                let model = IdnnModel::from_parts(
                    d.dims.n_in,
                    d.dims.n_hidden,
                    d.hidden_kind,
                    d.hidden_matrix,
                    d.hidden_scalars,
                    d.output_weights,
                    d.output_bias,
                )?;
                Ok(ModelArtifact::Idnn {
                    model,
                    config: d.config,
                    standardizer: d.standardizer,
                })
            }
            ArtifactDoc::Svm(d) => {
                if d.support_vectors.len() != d.alpha.len() || d.alpha.len() != d.y.len() {
                    return Err(Error::Artifact(
                        "support_vectors, alpha, and y lengths disagree".into(),
                    ));
                }
                let support = d
                    .support_vectors
                    .into_iter()
                    .zip(d.alpha)
                    .zip(d.y)
                    .map(|((x, alpha), y)| SupportVector { x, y, alpha })
                    .collect();
                let model = SvmModel::from_parts(support, d.b, d.kernel, d.c)?;
                Ok(ModelArtifact::Svm {
                    model,
                    standardizer: d.standardizer,
                })
            }
            ArtifactDoc::Esn(d) => {
                let w_in = d.w_in.into_iter().flatten().collect();
                let model = EsnModel::from_parts(d.config, w_in, d.w, d.readout)?;
                Ok(ModelArtifact::Esn { model })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::LabeledVector;
    use crate::svm::train_smo;

    #[test]
    fn svm_artifact_round_trips() {
        let data = vec![
            LabeledVector {
                values: vec![0.0, 0.0],
                label: Label::Negative,
            },
            LabeledVector {
                values: vec![0.2, 0.1],
                label: Label::Negative,
            },
            LabeledVector {
                values: vec![2.0, 2.0],
                label: Label::Positive,
            },
            LabeledVector {
                values: vec![2.2, 1.9],
                label: Label::Positive,
            },
        ];
        let model = train_smo(&data, &KernelSpec::rbf(), 10.0).unwrap();
        let artifact = ModelArtifact::Svm {
            model,
            standardizer: None,
        };
        let json = artifact.to_json();
        assert!(json.contains("\"kind\": \"svm\""));
        let back = ModelArtifact::from_json(&json).unwrap();
        assert_eq!(back, artifact);
        assert_eq!(
            back.predict_vector(&[2.0, 2.0]).unwrap(),
            Label::Positive
        );
    }

    #[test]
    fn idnn_artifact_round_trips() {
        let cfg = IdnnConfig::new(2, 3, HiddenKind::Rbf);
        let model = IdnnModel::from_parts(
            2,
            3,
            HiddenKind::Rbf,
            vec![0.1; 6],
            vec![1.0; 3],
            vec![0.2; 3],
            -0.1,
        )
        .unwrap();
        let artifact = ModelArtifact::Idnn {
            model,
            config: cfg,
            standardizer: None,
        };
        let back = ModelArtifact::from_json(&artifact.to_json()).unwrap();
        assert_eq!(back, artifact);
    }

    #[test]
    fn esn_artifact_round_trips() {
        let model = crate::esn::init(&EsnConfig::new(5)).unwrap();
        let artifact = ModelArtifact::Esn { model };
        let back = ModelArtifact::from_json(&artifact.to_json()).unwrap();
        assert_eq!(back, artifact);
    }

    #[test]
    fn malformed_artifact_is_artifact_error() {
        assert!(matches!(
            ModelArtifact::from_json("{\"kind\":\"idnn\"}"),
            Err(Error::Artifact(_))
        ));
    }
}
