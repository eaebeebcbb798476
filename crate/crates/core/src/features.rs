//! Feature schema induction and instance encoding.
//!
//! A schema is induced per word from training instances only. It fixes the
//! selected keywords, the per-offset collocation vocabularies, and the
//! predictive verbs; encoding then maps any instance of the word onto a
//! symbolic vector over those closed vocabularies.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{CoarsePos, Instance, MorphForm, Sentence};

/// Sentinel POS value for window positions outside the sentence.
pub const NULL_POS: &str = "NULL-POS";
/// Reserved feature value for collocations and verbs not in the schema.
/// Schema values are lowercase, so the uppercase sentinel cannot collide.
pub const NIL: &str = "NIL";
/// Sentinel standing in for positions before the sentence start inside a
/// collocation string.
pub const SENT_START: &str = "<s>";
/// Sentinel for positions past the sentence end.
pub const SENT_END: &str = "</s>";

/// The nine collocation windows as (left, right) offsets around the target,
/// in feature order C1..C9.
pub const COLLOCATION_OFFSETS: [(i32, i32); 9] = [
    (-1, -1),
    (1, 1),
    (-2, -1),
    (-1, 1),
    (1, 2),
    (-3, -1),
    (-2, 1),
    (-1, 2),
    (1, 3),
];

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("cannot induce a schema from an empty training set")]
    EmptyTraining,
    #[error("instance `{id}` targets `{word}`/{pos}, schema is for `{schema_word}`/{schema_pos}")]
    SchemaMismatch {
        id: String,
        word: String,
        pos: CoarsePos,
        schema_word: String,
        schema_pos: CoarsePos,
    },
    #[error("instance `{id}` has sense `{sense}` outside the sense inventory")]
    UnknownSense { id: String, sense: String },
}

/// Selection thresholds: minimum conditional probability, minimum per-sense
/// co-occurrence count, and the per-sense cap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemaParams {
    pub m1: f64,
    pub m2: u32,
    pub m3: u32,
}

impl Default for SchemaParams {
    fn default() -> Self {
        SchemaParams {
            m1: 0.8,
            m2: 5,
            m3: 5,
        }
    }
}

/// One of the four knowledge sources a schema can draw on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KnowledgeSource {
    PosMorph,
    SurroundingWords,
    Collocations,
    VerbObject,
}

impl KnowledgeSource {
    pub const ALL: [KnowledgeSource; 4] = [
        KnowledgeSource::PosMorph,
        KnowledgeSource::SurroundingWords,
        KnowledgeSource::Collocations,
        KnowledgeSource::VerbObject,
    ];

    /// Short name used by the `--features` flag.
    pub fn flag(&self) -> &'static str {
        match self {
            KnowledgeSource::PosMorph => "pos",
            KnowledgeSource::SurroundingWords => "words",
            KnowledgeSource::Collocations => "colloc",
            KnowledgeSource::VerbObject => "verb",
        }
    }

    pub fn from_flag(flag: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.flag() == flag)
    }
}

impl fmt::Display for KnowledgeSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.flag())
    }
}

/// The subset of knowledge sources active in a schema.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSources {
    pub pos_morph: bool,
    pub surrounding_words: bool,
    pub collocations: bool,
    pub verb_object: bool,
}

impl Default for FeatureSources {
    fn default() -> Self {
        Self::ALL
    }
}

impl FeatureSources {
    pub const ALL: FeatureSources = FeatureSources {
        pos_morph: true,
        surrounding_words: true,
        collocations: true,
        verb_object: true,
    };

    pub fn only(source: KnowledgeSource) -> Self {
        let mut s = FeatureSources {
            pos_morph: false,
            surrounding_words: false,
            collocations: false,
            verb_object: false,
        };
        s.set(source, true);
        s
    }

    pub fn set(&mut self, source: KnowledgeSource, on: bool) {
        match source {
            KnowledgeSource::PosMorph => self.pos_morph = on,
            KnowledgeSource::SurroundingWords => self.surrounding_words = on,
            KnowledgeSource::Collocations => self.collocations = on,
            KnowledgeSource::VerbObject => self.verb_object = on,
        }
    }

    pub fn contains(&self, source: KnowledgeSource) -> bool {
        match source {
            KnowledgeSource::PosMorph => self.pos_morph,
            KnowledgeSource::SurroundingWords => self.surrounding_words,
            KnowledgeSource::Collocations => self.collocations,
            KnowledgeSource::VerbObject => self.verb_object,
        }
    }

    pub fn is_empty(&self) -> bool {
        KnowledgeSource::ALL.iter().all(|s| !self.contains(*s))
    }

    /// Parse a comma-separated flag list such as `pos,colloc`.
    pub fn parse_flags(list: &str) -> Result<Self, String> {
        let mut s = FeatureSources {
            pos_morph: false,
            surrounding_words: false,
            collocations: false,
            verb_object: false,
        };
        for flag in list.split(',') {
            let flag = flag.trim();
            let source = KnowledgeSource::from_flag(flag).ok_or_else(|| {
                format!("unknown feature source `{flag}` (expected pos, words, colloc, verb)")
            })?;
            s.set(source, true);
        }
        if s.is_empty() {
            return Err("feature source list is empty".to_string());
        }
        Ok(s)
    }

    pub fn flags(&self) -> String {
        KnowledgeSource::ALL
            .iter()
            .filter(|s| self.contains(**s))
            .map(|s| s.flag())
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// The induced per-word feature space: everything encoding needs, fixed at
/// training time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub word: String,
    pub pos: CoarsePos,
    pub senses: Vec<String>,
    pub params: SchemaParams,
    pub sources: FeatureSources,
    /// Selected keywords, lexicographically sorted and distinct.
    pub keywords: Vec<String>,
    /// Selected collocation strings per offset window.
    pub colloc_values: [BTreeSet<String>; 9],
    /// Selected verb-object lemmas.
    pub verbs: BTreeSet<String>,
}

/// One instance encoded over a schema's vocabularies. `sense` is present on
/// training examples and absent on test examples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleVector {
    /// POS tags at offsets -3..-1, +1..+3 (order L3, L2, L1, R1, R2, R3).
    pub pos_window: [String; 6],
    pub morph: MorphForm,
    pub keyword_bits: Vec<bool>,
    /// Collocation string per offset if selected in the schema, else NIL.
    pub collocs: [Option<String>; 9],
    pub verb: Option<String>,
    pub sense: Option<String>,
}

impl ExampleVector {
    /// Flatten to symbolic values in feature order, keeping only positions
    /// belonging to active sources.
    pub fn flatten(&self, sources: FeatureSources) -> Vec<String> {
        let mut out = Vec::new();
        if sources.pos_morph {
            out.extend(self.pos_window.iter().cloned());
            out.push(self.morph.as_str().to_string());
        }
        if sources.surrounding_words {
            out.extend(
                self.keyword_bits
                    .iter()
                    .map(|b| if *b { "1" } else { "0" }.to_string()),
            );
        }
        if sources.collocations {
            out.extend(
                self.collocs
                    .iter()
                    .map(|c| c.clone().unwrap_or_else(|| NIL.to_string())),
            );
        }
        if sources.verb_object {
            out.push(self.verb.clone().unwrap_or_else(|| NIL.to_string()));
        }
        out
    }
}

impl FeatureSchema {
    /// Induce a schema from training instances. Selection sees only the
    /// given instances; the sense inventory is the dataset's full list.
    pub fn induce(
        word: &str,
        pos: CoarsePos,
        senses: &[String],
        train: &[&Instance],
        params: SchemaParams,
        sources: FeatureSources,
    ) -> Result<FeatureSchema, FeatureError> {
        if train.is_empty() {
            return Err(FeatureError::EmptyTraining);
        }
        for inst in train {
            check_instance(inst, word, pos)?;
        }
        let keywords = if sources.surrounding_words {
            select_keywords(train, senses, &params)?
        } else {
            Vec::new()
        };
        let colloc_values = if sources.collocations {
            select_collocations(train, senses, &params)?
        } else {
            Default::default()
        };
        let verbs = if sources.verb_object {
            select_verbs(train, senses, &params)?
        } else {
            BTreeSet::new()
        };
        Ok(FeatureSchema {
            word: word.to_string(),
            pos,
            senses: senses.to_vec(),
            params,
            sources,
            keywords,
            colloc_values,
            verbs,
        })
    }

    /// Number of active feature positions.
    pub fn arity(&self) -> usize {
        let mut n = 0;
        if self.sources.pos_morph {
            n += 7;
        }
        if self.sources.surrounding_words {
            n += self.keywords.len();
        }
        if self.sources.collocations {
            n += 9;
        }
        if self.sources.verb_object {
            n += 1;
        }
        n
    }

    /// Human-readable label per active feature position.
    pub fn position_labels(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.sources.pos_morph {
            out.extend(["L3", "L2", "L1", "R1", "R2", "R3", "M"].map(String::from));
        }
        if self.sources.surrounding_words {
            out.extend(
                self.keywords
                    .iter()
                    .enumerate()
                    .map(|(i, k)| format!("K{}({k})", i + 1)),
            );
        }
        if self.sources.collocations {
            out.extend(
                COLLOCATION_OFFSETS
                    .iter()
                    .enumerate()
                    .map(|(j, (l, r))| format!("C{}({l},{r})", j + 1)),
            );
        }
        if self.sources.verb_object {
            out.push("V".to_string());
        }
        out
    }

    /// Encode an instance over this schema's closed vocabularies.
    pub fn encode(&self, inst: &Instance) -> Result<ExampleVector, FeatureError> {
        check_instance(inst, &self.word, self.pos)?;
        let sent = &inst.sentence;
        let t = inst.target_index as i32;
        let n = sent.tokens.len() as i32;

        let mut pos_window: [String; 6] = Default::default();
        for (slot, offset) in [-3i32, -2, -1, 1, 2, 3].into_iter().enumerate() {
            let i = t + offset;
            pos_window[slot] = if i < 0 || i >= n {
                NULL_POS.to_string()
            } else {
                sent.tokens[i as usize].pos.clone()
            };
        }

        let present = surrounding_word_set(inst);
        let keyword_bits = self
            .keywords
            .iter()
            .map(|k| present.contains(k.as_str()))
            .collect();

        let mut collocs: [Option<String>; 9] = Default::default();
        for (j, &(l, r)) in COLLOCATION_OFFSETS.iter().enumerate() {
            let s = collocation_string(sent, inst.target_index, l, r);
            collocs[j] = self.colloc_values[j].contains(&s).then_some(s);
        }

        let verb = extract_verb_object(inst)
            .filter(|v| self.verbs.contains(*v))
            .map(str::to_string);

        Ok(ExampleVector {
            pos_window,
            morph: inst.morph,
            keyword_bits,
            collocs,
            verb,
            sense: Some(inst.sense.clone()),
        })
    }
}

fn check_instance(inst: &Instance, word: &str, pos: CoarsePos) -> Result<(), FeatureError> {
    if inst.target_lemma != word || inst.target_pos != pos {
        return Err(FeatureError::SchemaMismatch {
            id: inst.id.clone(),
            word: inst.target_lemma.clone(),
            pos: inst.target_pos,
            schema_word: word.to_string(),
            schema_pos: pos,
        });
    }
    Ok(())
}

/// Lowercased surfaces co-occurring with the target in its sentence. The
/// target position itself is excluded; other occurrences of the same form
/// count.
fn surrounding_word_set(inst: &Instance) -> BTreeSet<String> {
    inst.sentence
        .tokens
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != inst.target_index)
        .map(|(_, tok)| tok.surface.to_lowercase())
        .collect()
}

/// The lowercased surfaces at offsets `left..=right` around `target`
/// (offset 0, the target itself, excluded), joined by single spaces.
/// Positions outside the sentence contribute the boundary sentinels.
pub fn collocation_string(sentence: &Sentence, target: usize, left: i32, right: i32) -> String {
    debug_assert!(COLLOCATION_OFFSETS.contains(&(left, right)));
    let n = sentence.tokens.len() as i32;
    let t = target as i32;
    let mut parts: Vec<String> = Vec::with_capacity((right - left + 1) as usize);
    for offset in left..=right {
        if offset == 0 {
            continue;
        }
        let i = t + offset;
        parts.push(if i < 0 {
            SENT_START.to_string()
        } else if i >= n {
            SENT_END.to_string()
        } else {
            sentence.tokens[i as usize].surface.to_lowercase()
        });
    }
    parts.join(" ")
}

/// The verb taking a noun target as its object, via noun-group bracketing:
/// the target must sit at the end of a span whose opening bracket is
/// immediately preceded by a verb-tagged token. Verb targets yield None.
pub fn extract_verb_object(inst: &Instance) -> Option<&str> {
    if inst.target_pos != CoarsePos::Noun {
        return None;
    }
    let (start, _) = inst.sentence.noun_group_ending_at(inst.target_index)?;
    if start == 0 {
        return None;
    }
    let prev = &inst.sentence.tokens[start - 1];
    let is_verb = prev
        .pos
        .chars()
        .next()
        .is_some_and(|c| c.eq_ignore_ascii_case(&'V'));
    is_verb.then_some(prev.lemma.as_str())
}

/// Keywords predictive of some sense, selected by the conditional
/// probability criteria and capped per sense; sorted and distinct.
pub fn select_keywords(
    train: &[&Instance],
    senses: &[String],
    params: &SchemaParams,
) -> Result<Vec<String>, FeatureError> {
    let observations = observations(train, senses, surrounding_word_set)?;
    Ok(select_predictive(&observations, senses.len(), params)
        .into_iter()
        .collect())
}

/// Per-offset collocation vocabularies, each offset selected independently.
pub fn select_collocations(
    train: &[&Instance],
    senses: &[String],
    params: &SchemaParams,
) -> Result<[BTreeSet<String>; 9], FeatureError> {
    let mut out: [BTreeSet<String>; 9] = Default::default();
    for (j, &(l, r)) in COLLOCATION_OFFSETS.iter().enumerate() {
        let observations = observations(train, senses, |inst| {
            BTreeSet::from([collocation_string(&inst.sentence, inst.target_index, l, r)])
        })?;
        out[j] = select_predictive(&observations, senses.len(), params);
    }
    Ok(out)
}

/// Verb lemmas predictive of some sense of a noun target.
pub fn select_verbs(
    train: &[&Instance],
    senses: &[String],
    params: &SchemaParams,
) -> Result<BTreeSet<String>, FeatureError> {
    let observations = observations(train, senses, |inst| {
        extract_verb_object(inst)
            .map(str::to_string)
            .into_iter()
            .collect()
    })?;
    Ok(select_predictive(&observations, senses.len(), params))
}

/// Pair each training instance's sense index with its observed value set.
fn observations<F>(
    train: &[&Instance],
    senses: &[String],
    mut values_of: F,
) -> Result<Vec<(usize, BTreeSet<String>)>, FeatureError>
where
    F: FnMut(&Instance) -> BTreeSet<String>,
{
    if train.is_empty() {
        return Err(FeatureError::EmptyTraining);
    }
    let index: HashMap<&str, usize> = senses
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    train
        .iter()
        .map(|inst| {
            let sense =
                *index
                    .get(inst.sense.as_str())
                    .ok_or_else(|| FeatureError::UnknownSense {
                        id: inst.id.clone(),
                        sense: inst.sense.clone(),
                    })?;
            Ok((sense, values_of(inst)))
        })
        .collect()
}

/// The shared selection core: a value qualifies for sense `i` when its
/// conditional probability of `i` reaches `m1` and it co-occurs with `i` at
/// least `m2` times; each sense keeps at most `m3` qualifiers, preferring
/// frequent ones and breaking ties lexicographically.
fn select_predictive(
    observations: &[(usize, BTreeSet<String>)],
    n_senses: usize,
    params: &SchemaParams,
) -> BTreeSet<String> {
    struct Counts {
        total: u32,
        per_sense: Vec<u32>,
    }
    let mut counts: BTreeMap<&str, Counts> = BTreeMap::new();
    for (sense, values) in observations {
        for value in values {
            let entry = counts.entry(value.as_str()).or_insert_with(|| Counts {
                total: 0,
                per_sense: vec![0; n_senses],
            });
            entry.total += 1;
            entry.per_sense[*sense] += 1;
        }
    }

    let mut selected = BTreeSet::new();
    for sense in 0..n_senses {
        let mut qualifying: Vec<(&str, u32)> = counts
            .iter()
            .filter_map(|(value, c)| {
                let n_ik = c.per_sense[sense];
                let cp = f64::from(n_ik) / f64::from(c.total);
                (cp >= params.m1 && n_ik >= params.m2).then_some((*value, n_ik))
            })
            .collect();
        qualifying.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
        qualifying.truncate(params.m3 as usize);
        selected.extend(qualifying.into_iter().map(|(value, _)| value.to_string()));
    }
    selected
}
