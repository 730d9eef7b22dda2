//! Versioned JSON model files: configuration plus every automaton counter.
//!
//! Serialization is deterministic, so two identical models produce
//! byte-identical files.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::clause::{ClassBank, Clause, Polarity};
use crate::config::TMConfig;
use crate::data::BinarizerSpec;
use crate::error::{Error, Result};
use crate::regression::RegressionHead;
use crate::trainer::MultiClassTM;

pub const MODEL_FORMAT: &str = "paratm-model";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct StoredClause {
    polarity: Polarity,
    counters: Vec<u16>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "lowercase")]
enum StoredHead {
    Classify { n_classes: usize },
    Regress { y_min: f64, y_max: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct StoredModel {
    format: String,
    version: u32,
    config: TMConfig,
    n_features: usize,
    head: StoredHead,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    binarizer: Option<BinarizerSpec>,
    banks: Vec<Vec<StoredClause>>,
}

/// A trained machine of either task.
#[derive(Debug, Clone)]
pub enum Model {
    Classifier(MultiClassTM),
    Regressor(RegressionHead),
}

impl Model {
    pub fn config(&self) -> &TMConfig {
        match self {
            Model::Classifier(tm) => tm.config(),
            Model::Regressor(h) => h.config(),
        }
    }

    pub fn n_features(&self) -> usize {
        match self {
            Model::Classifier(tm) => tm.n_features(),
            Model::Regressor(h) => h.n_features(),
        }
    }
}

/// A model together with the binarizer that produced its inputs, if any.
#[derive(Debug, Clone)]
pub struct ModelFile {
    pub model: Model,
    pub binarizer: Option<BinarizerSpec>,
}

fn store_banks(banks: &[ClassBank]) -> Vec<Vec<StoredClause>> {
    banks
        .iter()
        .map(|b| {
            b.clauses()
                .iter()
                .map(|c| StoredClause {
                    polarity: c.polarity(),
                    counters: c.counters(),
                })
                .collect()
        })
        .collect()
}

fn load_banks(
    stored: &[Vec<StoredClause>],
    n_features: usize,
    depth: u16,
) -> Result<Vec<ClassBank>> {
    stored
        .iter()
        .map(|b| {
            let clauses = b
                .iter()
                .map(|c| Clause::from_counters(c.polarity, n_features, depth, &c.counters))
                .collect::<Result<Vec<_>>>()?;
            Ok(ClassBank::from_clauses(clauses))
        })
        .collect()
}

impl ModelFile {
    pub fn new(model: Model) -> Self {
        Self {
            model,
            binarizer: None,
        }
    }

    pub fn with_binarizer(model: Model, binarizer: Option<BinarizerSpec>) -> Self {
        Self { model, binarizer }
    }

    pub fn to_json(&self) -> Result<String> {
        let (config, n_features, head, banks) = match &self.model {
            Model::Classifier(tm) => (
                tm.config().clone(),
                tm.n_features(),
                StoredHead::Classify {
                    n_classes: tm.n_classes(),
                },
                store_banks(tm.banks()),
            ),
            Model::Regressor(h) => {
                let (y_min, y_max) = h.range();
                (
                    h.config().clone(),
                    h.n_features(),
                    StoredHead::Regress { y_min, y_max },
                    store_banks(std::slice::from_ref(h.bank())),
                )
            }
        };
        let stored = StoredModel {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            config,
            n_features,
            head,
            binarizer: self.binarizer.clone(),
            banks,
        };
        Ok(serde_json::to_string(&stored)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let stored: StoredModel = serde_json::from_str(text)?;
        if stored.format != MODEL_FORMAT {
            return Err(Error::Format(format!(
                "not a model file: format {:?}",
                stored.format
            )));
        }
        if stored.version != MODEL_VERSION {
            return Err(Error::Format(format!(
                "model version {} is not supported (expected {MODEL_VERSION})",
                stored.version
            )));
        }
        let config = stored.config;
        let o = stored.n_features;
        let banks = load_banks(&stored.banks, o, config.states)?;
        if banks.iter().any(|b| b.len() != config.clauses) {
            return Err(Error::Format(format!(
                "every bank must hold {} clauses",
                config.clauses
            )));
        }
        let model = match stored.head {
            StoredHead::Classify { n_classes } => {
                config.validate()?;
                let single = banks.len() == 1 && n_classes == 2;
                if !single && banks.len() != n_classes {
                    return Err(Error::Format(format!(
                        "{} banks for {n_classes} classes",
                        banks.len()
                    )));
                }
                Model::Classifier(MultiClassTM::from_parts(config, o, n_classes, banks))
            }
            StoredHead::Regress { y_min, y_max } => {
                config.validate_regression()?;
                let mut banks = banks;
                if banks.len() != 1 || !(y_max > y_min) {
                    return Err(Error::Format(
                        "regression model needs one bank and a non-empty range".into(),
                    ));
                }
                Model::Regressor(RegressionHead::from_parts(
                    config,
                    o,
                    banks.remove(0),
                    y_min,
                    y_max,
                ))
            }
        };
        Ok(Self {
            model,
            binarizer: stored.binarizer,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}
