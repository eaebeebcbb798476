//! Exemplar-based classification with the value-difference metric.
//!
//! The distance between two symbolic values of one feature is the L1
//! distance between their conditional sense distributions estimated from
//! training counts; the distance between two examples is the sum over all
//! feature positions. A test example is classified by the sense of its
//! nearest stored exemplar, ties broken by one uniform draw from a
//! caller-supplied random source.

use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::CoarsePos;
use crate::features::{ExampleVector, FeatureSchema};

/// Format tag embedded in every model file and checked on load.
pub const MODEL_FORMAT_VERSION: &str = "wsd-model/1";

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("cannot train on an empty example list")]
    EmptyTraining,
    #[error("example arity {got} does not match expected arity {expected}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("training example {index} has no sense label")]
    MissingLabel { index: usize },
    #[error("sense `{sense}` is outside the model's sense inventory")]
    UnknownSense { sense: String },
    #[error("model file is version `{found}`, this build reads `{expected}`")]
    VersionMismatch { found: String, expected: String },
    #[error("corrupt model: {0}")]
    CorruptModel(String),
}

/// Training counts for one feature value: how often it occurred with each
/// sense, and in total.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueDistribution {
    pub counts: Vec<u32>,
    pub total: u32,
}

impl ValueDistribution {
    fn probability(&self, sense: usize) -> f64 {
        f64::from(self.counts[sense]) / f64::from(self.total)
    }
}

/// Per-position count tables over the observed feature values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceModel {
    pub tables: Vec<BTreeMap<String, ValueDistribution>>,
    pub n_senses: usize,
}

impl DistanceModel {
    /// Count value/sense co-occurrences over uniform-arity rows.
    pub fn fit(
        rows: &[Vec<String>],
        senses: &[usize],
        n_senses: usize,
    ) -> Result<Self, ModelError> {
        if rows.is_empty() {
            return Err(ModelError::EmptyTraining);
        }
        assert_eq!(rows.len(), senses.len());
        let arity = rows[0].len();
        let mut tables: Vec<BTreeMap<String, ValueDistribution>> = vec![BTreeMap::new(); arity];
        for (row, &sense) in rows.iter().zip(senses) {
            if row.len() != arity {
                return Err(ModelError::ArityMismatch {
                    expected: arity,
                    got: row.len(),
                });
            }
            for (table, value) in tables.iter_mut().zip(row) {
                let dist = table
                    .entry(value.clone())
                    .or_insert_with(|| ValueDistribution {
                        counts: vec![0; n_senses],
                        total: 0,
                    });
                dist.counts[sense] += 1;
                dist.total += 1;
            }
        }
        Ok(DistanceModel { tables, n_senses })
    }

    pub fn arity(&self) -> usize {
        self.tables.len()
    }

    /// Distance between two values of the feature at `position`: the L1
    /// distance between their conditional sense distributions. Values never
    /// seen in training take the uniform distribution; equal values are at
    /// distance zero regardless.
    pub fn value_distance(&self, position: usize, v1: &str, v2: &str) -> f64 {
        if v1 == v2 {
            return 0.0;
        }
        let table = &self.tables[position];
        let d1 = table.get(v1);
        let d2 = table.get(v2);
        let uniform = 1.0 / self.n_senses as f64;
        let mut sum = 0.0;
        for sense in 0..self.n_senses {
            let p1 = d1.map_or(uniform, |d| d.probability(sense));
            let p2 = d2.map_or(uniform, |d| d.probability(sense));
            sum += (p1 - p2).abs();
        }
        sum
    }

    /// Sum of per-position value distances.
    pub fn example_distance(&self, a: &[String], b: &[String]) -> Result<f64, ModelError> {
        if a.len() != self.arity() || b.len() != self.arity() {
            return Err(ModelError::ArityMismatch {
                expected: self.arity(),
                got: if a.len() != self.arity() {
                    a.len()
                } else {
                    b.len()
                },
            });
        }
        let mut sum = 0.0;
        for (position, (va, vb)) in a.iter().zip(b).enumerate() {
            sum += self.value_distance(position, va, vb);
        }
        Ok(sum)
    }

    fn validate(&self) -> Result<(), ModelError> {
        for table in &self.tables {
            for (value, dist) in table {
                let sum: u32 = dist.counts.iter().sum();
                if dist.counts.len() != self.n_senses || dist.total == 0 || sum != dist.total {
                    return Err(ModelError::CorruptModel(format!(
                        "inconsistent distribution for value `{value}`"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A classification outcome over raw rows: sense index, index of the
/// chosen exemplar, and its distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowMatch {
    pub sense: usize,
    pub exemplar: usize,
    pub distance: f64,
}

/// Interned per-position lookup: value ids plus the precomputed pairwise
/// distance matrix. The extra trailing id stands for unseen test values.
#[derive(Debug)]
struct PositionTable {
    ids: HashMap<String, u32>,
    /// (k+1) x (k+1) distances, row-major; identical to what
    /// `DistanceModel::value_distance` computes value by value.
    dist: Vec<f64>,
    width: usize,
}

impl PositionTable {
    fn id_of(&self, value: &str) -> usize {
        self.ids.get(value).map_or(self.width - 1, |&i| i as usize)
    }

    fn row(&self, value: &str) -> &[f64] {
        let id = self.id_of(value);
        &self.dist[id * self.width..(id + 1) * self.width]
    }
}

/// Nearest-neighbor search over flattened symbolic rows.
#[derive(Debug)]
pub struct NearestNeighbors {
    distances: DistanceModel,
    senses: Vec<usize>,
    positions: Vec<PositionTable>,
    /// Exemplar rows, interned, row-major.
    rows: Vec<u32>,
    n_rows: usize,
}

impl NearestNeighbors {
    /// Fit distance tables on the rows and index them for search.
    pub fn fit(
        rows: Vec<Vec<String>>,
        senses: Vec<usize>,
        n_senses: usize,
    ) -> Result<Self, ModelError> {
        let distances = DistanceModel::fit(&rows, &senses, n_senses)?;
        Self::from_parts(distances, &rows, senses)
    }

    /// Index pre-fitted distance tables over the given exemplar rows.
    pub fn from_parts(
        distances: DistanceModel,
        rows: &[Vec<String>],
        senses: Vec<usize>,
    ) -> Result<Self, ModelError> {
        if rows.is_empty() {
            return Err(ModelError::EmptyTraining);
        }
        let arity = distances.arity();
        for row in rows {
            if row.len() != arity {
                return Err(ModelError::ArityMismatch {
                    expected: arity,
                    got: row.len(),
                });
            }
        }
        let uniform = 1.0 / distances.n_senses as f64;
        let positions = (0..arity)
            .map(|p| {
                let table = &distances.tables[p];
                let ids: HashMap<String, u32> = table
                    .keys()
                    .enumerate()
                    .map(|(i, v)| (v.clone(), i as u32))
                    .collect();
                let values: Vec<&String> = table.keys().collect();
                let width = values.len() + 1;
                let mut dist = vec![0.0; width * width];
                for (i, vi) in values.iter().enumerate() {
                    for (j, vj) in values.iter().enumerate() {
                        dist[i * width + j] = distances.value_distance(p, vi, vj);
                    }
                }
                // Unseen-vs-seen distances; unseen-vs-unseen stays zero.
                let unseen = width - 1;
                for (j, vj) in values.iter().enumerate() {
                    let dj = &table[*vj];
                    let mut d = 0.0;
                    for sense in 0..distances.n_senses {
                        d += (uniform - dj.probability(sense)).abs();
                    }
                    dist[unseen * width + j] = d;
                    dist[j * width + unseen] = d;
                }
                PositionTable { ids, dist, width }
            })
            .collect::<Vec<_>>();
        let mut flat = Vec::with_capacity(rows.len() * arity);
        for row in rows {
            for (p, value) in row.iter().enumerate() {
                let id = positions[p].ids.get(value).copied().ok_or_else(|| {
                    ModelError::CorruptModel(format!(
                        "exemplar value `{value}` is missing from the distance tables"
                    ))
                })?;
                flat.push(id);
            }
        }
        Ok(NearestNeighbors {
            distances,
            senses,
            positions,
            rows: flat,
            n_rows: rows.len(),
        })
    }

    pub fn distances(&self) -> &DistanceModel {
        &self.distances
    }

    pub fn n_exemplars(&self) -> usize {
        self.n_rows
    }

    pub fn sense_of(&self, exemplar: usize) -> usize {
        self.senses[exemplar]
    }

    /// The minimum distance over all exemplars and every exemplar index
    /// attaining it, in storage order.
    pub fn nearest_set(&self, test: &[String]) -> Result<(f64, Vec<usize>), ModelError> {
        let arity = self.distances.arity();
        if test.len() != arity {
            return Err(ModelError::ArityMismatch {
                expected: arity,
                got: test.len(),
            });
        }
        let rows: Vec<&[f64]> = self
            .positions
            .iter()
            .zip(test)
            .map(|(pos, value)| pos.row(value))
            .collect();
        let mut best = f64::INFINITY;
        let mut ties: Vec<usize> = Vec::new();
        for e in 0..self.n_rows {
            let ids = &self.rows[e * arity..(e + 1) * arity];
            let mut d = 0.0;
            for (p, &id) in ids.iter().enumerate() {
                d += rows[p][id as usize];
            }
            if d < best {
                best = d;
                ties.clear();
                ties.push(e);
            } else if d == best {
                ties.push(e);
            }
        }
        Ok((best, ties))
    }

    /// Scan all exemplars; when several share the exact minimum distance,
    /// one uniform draw from `rng` picks the winner.
    pub fn classify<R: Rng>(&self, test: &[String], rng: &mut R) -> Result<RowMatch, ModelError> {
        let (distance, ties) = self.nearest_set(test)?;
        let exemplar = if ties.len() == 1 {
            ties[0]
        } else {
            ties[rng.gen_range(0..ties.len())]
        };
        Ok(RowMatch {
            sense: self.senses[exemplar],
            exemplar,
            distance,
        })
    }
}

/// A classification outcome: predicted sense label, the chosen exemplar's
/// index, and its distance to the test example.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub sense: String,
    pub exemplar: usize,
    pub distance: f64,
}

/// A trained per-word classifier: the induced schema, the value-difference
/// tables, and every training exemplar verbatim.
#[derive(Debug, Serialize, Deserialize)]
pub struct TrainedModel {
    pub word: String,
    pub pos: CoarsePos,
    pub senses: Vec<String>,
    pub schema: FeatureSchema,
    pub distances: DistanceModel,
    pub exemplars: Vec<ExampleVector>,
    #[serde(skip)]
    index: OnceLock<NearestNeighbors>,
}

impl Clone for TrainedModel {
    fn clone(&self) -> Self {
        TrainedModel {
            word: self.word.clone(),
            pos: self.pos,
            senses: self.senses.clone(),
            schema: self.schema.clone(),
            distances: self.distances.clone(),
            exemplars: self.exemplars.clone(),
            index: OnceLock::new(),
        }
    }
}

impl TrainedModel {
    /// Build distance tables from labeled examples and store them all as
    /// exemplars.
    pub fn train(
        schema: FeatureSchema,
        examples: Vec<ExampleVector>,
    ) -> Result<TrainedModel, ModelError> {
        if examples.is_empty() {
            return Err(ModelError::EmptyTraining);
        }
        let mut rows = Vec::with_capacity(examples.len());
        let mut senses = Vec::with_capacity(examples.len());
        for (index, ex) in examples.iter().enumerate() {
            check_arity(&schema, ex)?;
            let label = ex
                .sense
                .as_deref()
                .ok_or(ModelError::MissingLabel { index })?;
            let sense = schema
                .senses
                .iter()
                .position(|s| s == label)
                .ok_or_else(|| ModelError::UnknownSense {
                    sense: label.to_string(),
                })?;
            rows.push(ex.flatten(schema.sources));
            senses.push(sense);
        }
        let distances = DistanceModel::fit(&rows, &senses, schema.senses.len())?;
        let model = TrainedModel {
            word: schema.word.clone(),
            pos: schema.pos,
            senses: schema.senses.clone(),
            schema,
            distances,
            exemplars: examples,
            index: OnceLock::new(),
        };
        model.ensure_index()?;
        Ok(model)
    }

    fn build_index(&self) -> Result<NearestNeighbors, ModelError> {
        let rows: Vec<Vec<String>> = self
            .exemplars
            .iter()
            .map(|ex| ex.flatten(self.schema.sources))
            .collect();
        let senses = self
            .exemplars
            .iter()
            .map(|ex| {
                let label = ex.sense.as_deref().unwrap_or("");
                self.senses.iter().position(|s| s == label).ok_or_else(|| {
                    ModelError::UnknownSense {
                        sense: label.to_string(),
                    }
                })
            })
            .collect::<Result<Vec<usize>, ModelError>>()?;
        NearestNeighbors::from_parts(self.distances.clone(), &rows, senses)
    }

    fn ensure_index(&self) -> Result<(), ModelError> {
        if self.index.get().is_none() {
            let built = self.build_index()?;
            let _ = self.index.set(built);
        }
        Ok(())
    }

    fn index(&self) -> &NearestNeighbors {
        // Warmed by train() and load(); the fallback only runs for models
        // deserialized outside those paths.
        self.index.get_or_init(|| {
            self.build_index()
                .expect("stored exemplars match the stored tables")
        })
    }

    /// Nearest-exemplar classification with seeded tie-breaking.
    pub fn classify<R: Rng>(
        &self,
        test: &ExampleVector,
        rng: &mut R,
    ) -> Result<Classification, ModelError> {
        check_arity(&self.schema, test)?;
        let row = test.flatten(self.schema.sources);
        let m = self.index().classify(&row, rng)?;
        Ok(Classification {
            sense: self.senses[m.sense].clone(),
            exemplar: m.exemplar,
            distance: m.distance,
        })
    }

    /// Minimum distance and all exemplar indices attaining it.
    pub fn nearest_set(&self, test: &ExampleVector) -> Result<(f64, Vec<usize>), ModelError> {
        check_arity(&self.schema, test)?;
        self.index().nearest_set(&test.flatten(self.schema.sources))
    }

    pub fn example_distance(
        &self,
        a: &ExampleVector,
        b: &ExampleVector,
    ) -> Result<f64, ModelError> {
        check_arity(&self.schema, a)?;
        check_arity(&self.schema, b)?;
        self.distances.example_distance(
            &a.flatten(self.schema.sources),
            &b.flatten(self.schema.sources),
        )
    }

    /// Serialize to the versioned model container.
    pub fn save(&self) -> Vec<u8> {
        let file = ModelFile {
            format_version: MODEL_FORMAT_VERSION.to_string(),
            model: self,
        };
        serde_json::to_vec(&file).expect("model serialization cannot fail")
    }

    /// Load a model container, checking its format tag before decoding.
    pub fn load(bytes: &[u8]) -> Result<TrainedModel, ModelError> {
        let value: serde_json::Value =
            serde_json::from_slice(bytes).map_err(|e| ModelError::CorruptModel(e.to_string()))?;
        let version = value
            .get("format_version")
            .and_then(|v| v.as_str())
            .ok_or_else(|| ModelError::CorruptModel("missing format_version".to_string()))?;
        if version != MODEL_FORMAT_VERSION {
            return Err(ModelError::VersionMismatch {
                found: version.to_string(),
                expected: MODEL_FORMAT_VERSION.to_string(),
            });
        }
        let file: ModelFile<TrainedModel> =
            serde_json::from_value(value).map_err(|e| ModelError::CorruptModel(e.to_string()))?;
        let model = file.model;
        if model.exemplars.is_empty() {
            return Err(ModelError::CorruptModel(
                "model has no exemplars".to_string(),
            ));
        }
        if model.distances.arity() != model.schema.arity()
            || model.distances.n_senses != model.senses.len()
        {
            return Err(ModelError::CorruptModel(
                "distance tables do not match the schema".to_string(),
            ));
        }
        model.distances.validate()?;
        for ex in &model.exemplars {
            if ex.keyword_bits.len() != model.schema.keywords.len() || ex.sense.is_none() {
                return Err(ModelError::CorruptModel(
                    "malformed stored exemplar".to_string(),
                ));
            }
        }
        model.ensure_index()?;
        Ok(model)
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile<T> {
    format_version: String,
    model: T,
}

fn check_arity(schema: &FeatureSchema, ex: &ExampleVector) -> Result<(), ModelError> {
    if schema.sources.surrounding_words && ex.keyword_bits.len() != schema.keywords.len() {
        return Err(ModelError::ArityMismatch {
            expected: schema.keywords.len(),
            got: ex.keyword_bits.len(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests;
