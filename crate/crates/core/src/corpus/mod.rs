//! Sense-tagged corpus model and the instance file format.
//!
//! A dataset holds every tagged occurrence of one target word in one part of
//! speech. The text format is line-oriented: a `%%` header per record, one
//! tab-separated line per token (`surface<TAB>pos<TAB>lemma`, lemma optional),
//! optional `%NG start end` noun-group spans, and a blank line between
//! records.

mod lemma;

pub use lemma::lemmatize_fallback;

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: duplicate instance id `{id}`")]
    DuplicateId { line: usize, id: String },
    #[error("line {line}: target mismatch: {message}")]
    TargetMismatch { line: usize, message: String },
}

impl CorpusError {
    fn parse(line: usize, message: impl Into<String>) -> Self {
        CorpusError::Parse {
            line,
            message: message.into(),
        }
    }
}

/// Coarse part of speech of a target word. Senses attach to (lemma, pos)
/// pairs, and the morphological value set depends on this.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CoarsePos {
    Noun,
    Verb,
}

impl CoarsePos {
    pub fn as_str(&self) -> &'static str {
        match self {
            CoarsePos::Noun => "N",
            CoarsePos::Verb => "V",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "N" => Some(CoarsePos::Noun),
            "V" => Some(CoarsePos::Verb),
            _ => None,
        }
    }
}

impl fmt::Display for CoarsePos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Morphological form of the target occurrence. Nouns take the two number
/// values, verbs the five inflection values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MorphForm {
    Singular,
    Plural,
    Infinitive,
    Present3sg,
    Past,
    PresentParticiple,
    PastParticiple,
}

impl MorphForm {
    pub fn as_str(&self) -> &'static str {
        match self {
            MorphForm::Singular => "singular",
            MorphForm::Plural => "plural",
            MorphForm::Infinitive => "infinitive",
            MorphForm::Present3sg => "present-3sg",
            MorphForm::Past => "past",
            MorphForm::PresentParticiple => "present-participle",
            MorphForm::PastParticiple => "past-participle",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "singular" => Some(MorphForm::Singular),
            "plural" => Some(MorphForm::Plural),
            "infinitive" => Some(MorphForm::Infinitive),
            "present-3sg" => Some(MorphForm::Present3sg),
            "past" => Some(MorphForm::Past),
            "present-participle" => Some(MorphForm::PresentParticiple),
            "past-participle" => Some(MorphForm::PastParticiple),
            _ => None,
        }
    }

    /// Whether the value is legal for a target of the given coarse POS.
    pub fn valid_for(&self, pos: CoarsePos) -> bool {
        match pos {
            CoarsePos::Noun => matches!(self, MorphForm::Singular | MorphForm::Plural),
            CoarsePos::Verb => !matches!(self, MorphForm::Singular | MorphForm::Plural),
        }
    }
}

impl fmt::Display for MorphForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One token of a tagged sentence. The POS tag is an opaque string; no
/// tagset is assumed beyond the convention that verb tags start with `V`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub pos: String,
    /// Root form, always lowercase.
    pub lemma: String,
}

/// A tagged sentence with optional noun-group bracketing. Spans are
/// inclusive token index ranges and may not overlap.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Sentence {
    pub tokens: Vec<Token>,
    pub noun_groups: Vec<(usize, usize)>,
}

impl Sentence {
    /// The noun-group span ending exactly at `index`, if any.
    pub fn noun_group_ending_at(&self, index: usize) -> Option<(usize, usize)> {
        self.noun_groups
            .iter()
            .copied()
            .find(|&(_, end)| end == index)
    }
}

/// One sense-tagged occurrence of the target word: the unit of training
/// and testing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub id: String,
    pub sentence: Sentence,
    pub target_index: usize,
    pub target_lemma: String,
    pub target_pos: CoarsePos,
    pub morph: MorphForm,
    pub sense: String,
}

/// Every tagged occurrence of one word/POS pair, with its sense inventory
/// in first-appearance order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub word: String,
    pub pos: CoarsePos,
    pub senses: Vec<String>,
    pub instances: Vec<Instance>,
}

impl Dataset {
    /// Parse a dataset from the instance file format.
    pub fn parse(text: &str) -> Result<Dataset, CorpusError> {
        Parser::new(text).run()
    }

    /// Serialize back to the instance file format. `parse` of the output
    /// reproduces this dataset exactly.
    pub fn write(&self) -> String {
        let mut out = String::new();
        for inst in &self.instances {
            out.push_str(&format!(
                "%% id={} word={} pos={} target={} sense={} morph={}\n",
                inst.id,
                inst.target_lemma,
                inst.target_pos,
                inst.target_index,
                inst.sense,
                inst.morph
            ));
            for tok in &inst.sentence.tokens {
                out.push_str(&format!("{}\t{}\t{}\n", tok.surface, tok.pos, tok.lemma));
            }
            for &(start, end) in &inst.sentence.noun_groups {
                out.push_str(&format!("%NG {start} {end}\n"));
            }
            out.push('\n');
        }
        out
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    /// Index of a sense label in the inventory.
    pub fn sense_index(&self, sense: &str) -> Option<usize> {
        self.senses.iter().position(|s| s == sense)
    }
}

struct Parser<'a> {
    lines: Vec<&'a str>,
    pos: usize,
    /// Line number of the most recent record header, for errors raised
    /// after the record body has been consumed.
    header_line: usize,
}

struct Header {
    line: usize,
    id: String,
    word: String,
    pos: CoarsePos,
    target: usize,
    sense: String,
    morph: MorphForm,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            lines: text.lines().collect(),
            pos: 0,
            header_line: 0,
        }
    }

    fn run(mut self) -> Result<Dataset, CorpusError> {
        let mut word: Option<(String, CoarsePos)> = None;
        let mut senses: Vec<String> = Vec::new();
        let mut instances: Vec<Instance> = Vec::new();
        let mut seen_ids: HashSet<String> = HashSet::new();

        loop {
            while self.pos < self.lines.len() && self.lines[self.pos].trim().is_empty() {
                self.pos += 1;
            }
            if self.pos >= self.lines.len() {
                break;
            }
            let inst = self.record()?;
            match &word {
                None => word = Some((inst.target_lemma.clone(), inst.target_pos)),
                Some((w, p)) => {
                    if *w != inst.target_lemma || *p != inst.target_pos {
                        return Err(CorpusError::parse(
                            self.header_line,
                            format!(
                                "record word/pos `{}`/{} differs from dataset word/pos `{}`/{}",
                                inst.target_lemma, inst.target_pos, w, p
                            ),
                        ));
                    }
                }
            }
            if !seen_ids.insert(inst.id.clone()) {
                return Err(CorpusError::DuplicateId {
                    line: self.header_line,
                    id: inst.id,
                });
            }
            if !senses.contains(&inst.sense) {
                senses.push(inst.sense.clone());
            }
            instances.push(inst);
        }

        match word {
            None => Err(CorpusError::parse(1, "no record header found")),
            Some((word, pos)) => Ok(Dataset {
                word,
                pos,
                senses,
                instances,
            }),
        }
    }

    fn record(&mut self) -> Result<Instance, CorpusError> {
        let header = self.header()?;
        self.header_line = header.line;

        let mut tokens: Vec<Token> = Vec::new();
        let mut noun_groups: Vec<(usize, usize)> = Vec::new();
        let mut in_spans = false;

        while self.pos < self.lines.len() {
            let lineno = self.pos + 1;
            let line = self.lines[self.pos];
            if line.trim().is_empty() {
                self.pos += 1;
                break;
            }
            if line.starts_with("%%") {
                // Next record header: tolerate a missing blank separator.
                break;
            }
            self.pos += 1;
            if let Some(rest) = line.strip_prefix("%NG") {
                in_spans = true;
                noun_groups.push(parse_span(lineno, rest, tokens.len())?);
            } else {
                if in_spans {
                    return Err(CorpusError::parse(lineno, "token line after %NG line"));
                }
                tokens.push(parse_token(lineno, line)?);
            }
        }

        if tokens.is_empty() {
            return Err(CorpusError::parse(header.line, "record has no tokens"));
        }
        check_spans_disjoint(header.line, &noun_groups)?;
        if header.target >= tokens.len() {
            return Err(CorpusError::parse(
                header.line,
                format!(
                    "target index {} out of range for {}-token sentence",
                    header.target,
                    tokens.len()
                ),
            ));
        }
        let target_tok = &tokens[header.target];
        if target_tok.lemma != header.word {
            return Err(CorpusError::TargetMismatch {
                line: header.line,
                message: format!(
                    "header word `{}` but target token lemma is `{}`",
                    header.word, target_tok.lemma
                ),
            });
        }
        // The tagset is opaque, so the coarse check only fires when the
        // tag's first letter is decisively N or V.
        let coarse = match target_tok
            .pos
            .chars()
            .next()
            .map(|c| c.to_ascii_uppercase())
        {
            Some('N') => Some(CoarsePos::Noun),
            Some('V') => Some(CoarsePos::Verb),
            _ => None,
        };
        if let Some(c) = coarse {
            if c != header.pos {
                return Err(CorpusError::TargetMismatch {
                    line: header.line,
                    message: format!(
                        "header pos {} but target token is tagged `{}`",
                        header.pos, target_tok.pos
                    ),
                });
            }
        }

        Ok(Instance {
            id: header.id,
            sentence: Sentence {
                tokens,
                noun_groups,
            },
            target_index: header.target,
            target_lemma: header.word,
            target_pos: header.pos,
            morph: header.morph,
            sense: header.sense,
        })
    }

    fn header(&mut self) -> Result<Header, CorpusError> {
        let lineno = self.pos + 1;
        let line = self.lines[self.pos];
        let body = line.strip_prefix("%%").ok_or_else(|| {
            CorpusError::parse(lineno, format!("expected `%%` record header, got `{line}`"))
        })?;
        self.pos += 1;

        let mut id = None;
        let mut word = None;
        let mut pos = None;
        let mut target = None;
        let mut sense = None;
        let mut morph = None;
        for field in body.split_whitespace() {
            let (key, value) = field.split_once('=').ok_or_else(|| {
                CorpusError::parse(lineno, format!("malformed header field `{field}`"))
            })?;
            if value.is_empty() {
                return Err(CorpusError::parse(
                    lineno,
                    format!("empty value for header key `{key}`"),
                ));
            }
            let slot = match key {
                "id" => &mut id,
                "word" => &mut word,
                "pos" => &mut pos,
                "target" => &mut target,
                "sense" => &mut sense,
                "morph" => &mut morph,
                _ => {
                    return Err(CorpusError::parse(
                        lineno,
                        format!("unknown header key `{key}`"),
                    ))
                }
            };
            if slot.replace(value).is_some() {
                return Err(CorpusError::parse(
                    lineno,
                    format!("duplicate header key `{key}`"),
                ));
            }
        }
        let require = |slot: Option<&str>, key: &str| {
            slot.map(str::to_owned)
                .ok_or_else(|| CorpusError::parse(lineno, format!("missing header key `{key}`")))
        };
        let id = require(id, "id")?;
        let word = require(word, "word")?.to_lowercase();
        let pos_s = require(pos, "pos")?;
        let target_s = require(target, "target")?;
        let sense = require(sense, "sense")?;
        let morph_s = require(morph, "morph")?;

        let pos = CoarsePos::parse(&pos_s).ok_or_else(|| {
            CorpusError::parse(lineno, format!("pos must be N or V, got `{pos_s}`"))
        })?;
        let target: usize = target_s.parse().map_err(|_| {
            CorpusError::parse(
                lineno,
                format!("target must be a non-negative integer, got `{target_s}`"),
            )
        })?;
        let morph = MorphForm::parse(&morph_s)
            .ok_or_else(|| CorpusError::parse(lineno, format!("unknown morph form `{morph_s}`")))?;
        if !morph.valid_for(pos) {
            return Err(CorpusError::parse(
                lineno,
                format!("morph `{morph}` is not valid for pos {pos}"),
            ));
        }
        Ok(Header {
            line: lineno,
            id,
            word,
            pos,
            target,
            sense,
            morph,
        })
    }
}

fn parse_token(lineno: usize, line: &str) -> Result<Token, CorpusError> {
    let mut parts = line.split('\t');
    let surface = parts.next().unwrap_or("");
    let pos = parts.next().ok_or_else(|| {
        CorpusError::parse(lineno, "token line needs `surface<TAB>pos[<TAB>lemma]`")
    })?;
    let lemma = parts.next().unwrap_or("");
    if parts.next().is_some() {
        return Err(CorpusError::parse(lineno, "too many columns in token line"));
    }
    if surface.is_empty() {
        return Err(CorpusError::parse(lineno, "empty token surface"));
    }
    if pos.is_empty() {
        return Err(CorpusError::parse(lineno, "empty POS tag"));
    }
    let lemma = if lemma.is_empty() {
        lemmatize_fallback(surface, pos).0
    } else {
        if lemma.contains(char::is_whitespace) {
            return Err(CorpusError::parse(
                lineno,
                format!("lemma `{lemma}` contains whitespace"),
            ));
        }
        lemma.to_lowercase()
    };
    Ok(Token {
        surface: surface.to_string(),
        pos: pos.to_string(),
        lemma,
    })
}

fn parse_span(lineno: usize, rest: &str, n_tokens: usize) -> Result<(usize, usize), CorpusError> {
    let parts: Vec<&str> = rest.split_whitespace().collect();
    let [start, end] = parts.as_slice() else {
        return Err(CorpusError::parse(
            lineno,
            "%NG line needs exactly two indices",
        ));
    };
    let start: usize = start
        .parse()
        .map_err(|_| CorpusError::parse(lineno, format!("bad span start `{start}`")))?;
    let end: usize = end
        .parse()
        .map_err(|_| CorpusError::parse(lineno, format!("bad span end `{end}`")))?;
    if start > end || end >= n_tokens {
        return Err(CorpusError::parse(
            lineno,
            format!("span {start}..{end} out of range for {n_tokens} tokens"),
        ));
    }
    Ok((start, end))
}

fn check_spans_disjoint(lineno: usize, spans: &[(usize, usize)]) -> Result<(), CorpusError> {
    let mut sorted = spans.to_vec();
    sorted.sort_unstable();
    for pair in sorted.windows(2) {
        if pair[1].0 <= pair[0].1 {
            return Err(CorpusError::parse(
                lineno,
                format!(
                    "noun-group spans {}..{} and {}..{} overlap",
                    pair[0].0, pair[0].1, pair[1].0, pair[1].1
                ),
            ));
        }
    }
    Ok(())
}
