//! Repeated random-split evaluation: per-trial accuracy, mean and sample
//! standard deviation, the sense-1 and most-frequent baselines, and
//! single-knowledge-source ablation runs.
//!
//! Every random choice derives from the run seed: the trial index keys the
//! train/test split, the instance id keys the tie-breaking source. Results
//! are therefore byte-identical across runs and thread counts.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifier::{ModelError, TrainedModel};
use crate::corpus::{Dataset, Instance};
use crate::features::{FeatureError, FeatureSchema, FeatureSources, KnowledgeSource, SchemaParams};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("prediction list has {predictions} entries, gold list has {gold}")]
    LengthMismatch { predictions: usize, gold: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("empty training set")]
    EmptyTraining,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Parameters of one evaluation run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub n_trials: usize,
    pub test_size: usize,
    pub seed: u64,
    pub sources: FeatureSources,
    pub params: SchemaParams,
}

impl Default for TrialConfig {
    fn default() -> Self {
        TrialConfig {
            n_trials: 100,
            test_size: 600,
            seed: 0,
            sources: FeatureSources::ALL,
            params: SchemaParams::default(),
        }
    }
}

impl TrialConfig {
    pub fn validate(&self, dataset: &Dataset) -> Result<(), EvalError> {
        if self.n_trials == 0 {
            return Err(EvalError::Config("n_trials must be positive".to_string()));
        }
        if self.test_size == 0 {
            return Err(EvalError::Config("test_size must be positive".to_string()));
        }
        if self.test_size >= dataset.len() {
            return Err(EvalError::Config(format!(
                "test_size {} must be smaller than the dataset ({} instances)",
                self.test_size,
                dataset.len()
            )));
        }
        if self.sources.is_empty() {
            return Err(EvalError::Config("feature source set is empty".to_string()));
        }
        Ok(())
    }
}

/// Accuracies over all trials plus the averaged baselines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub accuracies: Vec<f64>,
    pub mean: f64,
    pub stddev: f64,
    pub baseline_sense1: f64,
    pub baseline_most_frequent: f64,
}

impl TrialReport {
    /// One `trial<TAB>accuracy` line per trial, then the summary lines, all
    /// reals with four decimals.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (i, acc) in self.accuracies.iter().enumerate() {
            out.push_str(&format!("{}\t{acc:.4}\n", i + 1));
        }
        out.push_str(&format!("mean\t{:.4}\n", self.mean));
        out.push_str(&format!("stddev\t{:.4}\n", self.stddev));
        out.push_str(&format!("baseline_sense1\t{:.4}\n", self.baseline_sense1));
        out.push_str(&format!(
            "baseline_most_frequent\t{:.4}\n",
            self.baseline_most_frequent
        ));
        out
    }
}

/// Everything one trial produced. `predictions` pairs each test instance id
/// with its predicted sense, in test order.
#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub trial: usize,
    pub accuracy: f64,
    pub baseline_sense1: f64,
    pub baseline_most_frequent: f64,
    pub predictions: Vec<(String, String)>,
    pub schema: FeatureSchema,
}

/// Fraction of exact matches between predictions and gold labels.
pub fn accuracy<A: AsRef<str>, B: AsRef<str>>(
    predictions: &[A],
    gold: &[B],
) -> Result<f64, EvalError> {
    if predictions.len() != gold.len() {
        return Err(EvalError::LengthMismatch {
            predictions: predictions.len(),
            gold: gold.len(),
        });
    }
    if predictions.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let hits = predictions
        .iter()
        .zip(gold)
        .filter(|(p, g)| p.as_ref() == g.as_ref())
        .count();
    Ok(hits as f64 / predictions.len() as f64)
}

/// Random source for one trial's train/test split.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&trial.to_le_bytes());
    key[16] = 1;
    ChaCha8Rng::from_seed(key)
}

/// Random source owned by one test instance, keyed by its id so results do
/// not depend on classification order.
pub fn instance_rng(seed: u64, id: &str) -> ChaCha8Rng {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in id.as_bytes() {
        hash ^= u64::from(*byte);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&hash.to_le_bytes());
    key[16] = 2;
    ChaCha8Rng::from_seed(key)
}

/// Draw `test_size` instance indices without replacement; the rest train.
/// Both halves come back in dataset order.
pub fn trial_split(n: usize, seed: u64, trial: u64, test_size: usize) -> (Vec<usize>, Vec<usize>) {
    let mut rng = trial_rng(seed, trial);
    let mut in_test = vec![false; n];
    for i in rand::seq::index::sample(&mut rng, n, test_size) {
        in_test[i] = true;
    }
    let (mut train, mut test) = (
        Vec::with_capacity(n - test_size),
        Vec::with_capacity(test_size),
    );
    for (i, &t) in in_test.iter().enumerate() {
        if t {
            test.push(i);
        } else {
            train.push(i);
        }
    }
    (train, test)
}

/// Run one trial: split, induce the schema on the training half only,
/// train, classify the held-out half.
pub fn run_single_trial(
    dataset: &Dataset,
    config: &TrialConfig,
    trial: usize,
) -> Result<TrialOutcome, EvalError> {
    let (train_idx, test_idx) =
        trial_split(dataset.len(), config.seed, trial as u64, config.test_size);
    let train: Vec<&Instance> = train_idx.iter().map(|&i| &dataset.instances[i]).collect();
    let test: Vec<&Instance> = test_idx.iter().map(|&i| &dataset.instances[i]).collect();

    let schema = FeatureSchema::induce(
        &dataset.word,
        dataset.pos,
        &dataset.senses,
        &train,
        config.params,
        config.sources,
    )?;
    let examples = train
        .iter()
        .map(|inst| schema.encode(inst))
        .collect::<Result<Vec<_>, _>>()?;
    let model = TrainedModel::train(schema.clone(), examples)?;

    let mut predictions = Vec::with_capacity(test.len());
    let mut gold = Vec::with_capacity(test.len());
    for inst in &test {
        let encoded = model.schema.encode(inst)?;
        let mut rng = instance_rng(config.seed, &inst.id);
        let got = model.classify(&encoded, &mut rng)?;
        predictions.push((inst.id.clone(), got.sense));
        gold.push(inst.sense.as_str());
    }
    let predicted: Vec<&str> = predictions.iter().map(|(_, s)| s.as_str()).collect();
    Ok(TrialOutcome {
        trial,
        accuracy: accuracy(&predicted, &gold)?,
        baseline_sense1: baseline_sense1(&test, &dataset.senses)?,
        baseline_most_frequent: baseline_most_frequent(&train, &test, &dataset.senses)?,
        predictions,
        schema,
    })
}

/// The full trial protocol. Trials run in parallel; the report is
/// assembled in trial order.
pub fn run_trials(dataset: &Dataset, config: &TrialConfig) -> Result<TrialReport, EvalError> {
    config.validate(dataset)?;
    let outcomes: Vec<TrialOutcome> = (0..config.n_trials)
        .into_par_iter()
        .map(|t| run_single_trial(dataset, config, t))
        .collect::<Result<_, _>>()?;

    let accuracies: Vec<f64> = outcomes.iter().map(|o| o.accuracy).collect();
    let (mean, stddev) = mean_and_sample_stddev(&accuracies);
    let n = outcomes.len() as f64;
    Ok(TrialReport {
        mean,
        stddev,
        baseline_sense1: outcomes.iter().map(|o| o.baseline_sense1).sum::<f64>() / n,
        baseline_most_frequent: outcomes
            .iter()
            .map(|o| o.baseline_most_frequent)
            .sum::<f64>()
            / n,
        accuracies,
    })
}

/// Arithmetic mean and sample (n-1) standard deviation; a single value has
/// deviation zero.
pub fn mean_and_sample_stddev(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Accuracy of always predicting the inventory's first-listed sense.
pub fn baseline_sense1(test: &[&Instance], senses: &[String]) -> Result<f64, EvalError> {
    if test.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let first = senses
        .first()
        .ok_or_else(|| EvalError::Config("empty sense inventory".to_string()))?;
    let hits = test.iter().filter(|inst| &inst.sense == first).count();
    Ok(hits as f64 / test.len() as f64)
}

/// The most frequent training sense, ties broken by sense-list order.
pub fn modal_sense<'a>(train: &[&Instance], senses: &'a [String]) -> Result<&'a str, EvalError> {
    if train.is_empty() {
        return Err(EvalError::EmptyTraining);
    }
    let index: HashMap<&str, usize> = senses
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let mut counts = vec![0usize; senses.len()];
    for inst in train {
        if let Some(&i) = index.get(inst.sense.as_str()) {
            counts[i] += 1;
        }
    }
    let best = counts
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
        .ok_or_else(|| EvalError::Config("empty sense inventory".to_string()))?;
    Ok(&senses[best])
}

/// Accuracy of predicting the modal training sense for every test instance.
pub fn baseline_most_frequent(
    train: &[&Instance],
    test: &[&Instance],
    senses: &[String],
) -> Result<f64, EvalError> {
    let mode = modal_sense(train, senses)?;
    if test.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let hits = test.iter().filter(|inst| inst.sense == mode).count();
    Ok(hits as f64 / test.len() as f64)
}

/// Re-run the trial protocol once per knowledge source, each run restricted
/// to that source alone. Results come back in fixed source order.
pub fn ablate(
    dataset: &Dataset,
    config: &TrialConfig,
) -> Result<Vec<(KnowledgeSource, TrialReport)>, EvalError> {
    KnowledgeSource::ALL
        .into_iter()
        .map(|source| {
            let single = TrialConfig {
                sources: FeatureSources::only(source),
                ..*config
            };
            Ok((source, run_trials(dataset, &single)?))
        })
        .collect()
}
