//! Traditional (surface) and lexical features, assembled into a fixed-order
//! 15-value vector.
//!
//! Index layout:
//!
//! | idx | name                   | set  |
//! |-----|------------------------|------|
//! | 0   | avg_sentence_length    | TRAD |
//! | 1   | avg_token_length       | TRAD |
//! | 2   | sentence_count         | TRAD |
//! | 3   | word_count             | TRAD |
//! | 4   | phrase_count           | TRAD |
//! | 5   | avg_syllables_per_word | TRAD |
//! | 6   | polysyllabic_count     | TRAD |
//! | 7   | noun_token_ratio       | LEX  |
//! | 8   | verb_token_ratio       | LEX  |
//! | 9   | ttr                    | LEX  |
//! | 10  | root_ttr               | LEX  |
//! | 11  | corr_ttr               | LEX  |
//! | 12  | bilog_ttr              | LEX  |
//! | 13  | lexical_density        | LEX  |
//! | 14  | foreign_ratio          | LEX  |
//!
//! The TTR family and lexical density are measured on a seeded sample of
//! sentences (five by default); the noun/verb ratios and the foreign ratio
//! use the whole document.

use std::collections::HashSet;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use rand::seq::index;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pos::{LexicalCategory, TaggedDocument, TaggedToken};
use crate::seed::{derive_seed, rng_from_seed};
use crate::text::{Document, Sentence, Token, DEFAULT_POLYSYLLABIC_THRESHOLD};

pub const FEATURE_COUNT: usize = 15;
pub const TRAD_COUNT: usize = 7;
pub const LEX_COUNT: usize = 8;
pub const DEFAULT_SAMPLE_SIZE: usize = 5;

pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "avg_sentence_length",
    "avg_token_length",
    "sentence_count",
    "word_count",
    "phrase_count",
    "avg_syllables_per_word",
    "polysyllabic_count",
    "noun_token_ratio",
    "verb_token_ratio",
    "ttr",
    "root_ttr",
    "corr_ttr",
    "bilog_ttr",
    "lexical_density",
    "foreign_ratio",
];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FeatureError {
    #[error("empty input")]
    EmptyInput,
    #[error("document {0:?} has no sentences")]
    EmptyDocument(String),
    #[error("sample size must be at least 1")]
    InvalidSampleSize,
    #[error("unknown feature set {0:?} (expected trad, lex or both)")]
    UnknownFeatureSet(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureSet {
    Trad,
    Lex,
    Both,
}

impl FeatureSet {
    pub fn indices(self) -> Range<usize> {
        match self {
            FeatureSet::Trad => 0..TRAD_COUNT,
            FeatureSet::Lex => TRAD_COUNT..FEATURE_COUNT,
            FeatureSet::Both => 0..FEATURE_COUNT,
        }
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(self) -> usize {
        self.indices().len()
    }

    pub fn names(self) -> &'static [&'static str] {
        &FEATURE_NAMES[self.indices()]
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureSet::Trad => "trad",
            FeatureSet::Lex => "lex",
            FeatureSet::Both => "both",
        }
    }

    /// Selects this set's columns out of a full 15-value row.
    pub fn select(self, full: &[f64]) -> Vec<f64> {
        full[self.indices()].to_vec()
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureSet {
    type Err = FeatureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "trad" => Ok(FeatureSet::Trad),
            "lex" => Ok(FeatureSet::Lex),
            "both" | "trad+lex" => Ok(FeatureSet::Both),
            _ => Err(FeatureError::UnknownFeatureSet(s.to_string())),
        }
    }
}

/// TRAD or LEX, for a single feature name.
pub fn feature_group(name: &str) -> Option<FeatureSet> {
    let idx = FEATURE_NAMES.iter().position(|n| *n == name)?;
    Some(if idx < TRAD_COUNT {
        FeatureSet::Trad
    } else {
        FeatureSet::Lex
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TradFeatures {
    pub avg_sentence_length: f64,
    pub avg_token_length: f64,
    pub sentence_count: usize,
    pub word_count: usize,
    pub phrase_count: usize,
    pub avg_syllables_per_word: f64,
    pub polysyllabic_count: usize,
}

impl TradFeatures {
    pub fn to_array(&self) -> [f64; TRAD_COUNT] {
        [
            self.avg_sentence_length,
            self.avg_token_length,
            self.sentence_count as f64,
            self.word_count as f64,
            self.phrase_count as f64,
            self.avg_syllables_per_word,
            self.polysyllabic_count as f64,
        ]
    }
}

/// Surface statistics of a document. An empty document yields all zeros.
pub fn extract_trad(doc: &Document, polysyllabic_threshold: usize) -> TradFeatures {
    let sentence_count = doc.sentences.len();
    let word_count = doc.word_count();
    if sentence_count == 0 || word_count == 0 {
        return TradFeatures::default();
    }
    let (letters, syllables, polysyllabic) = doc.tokens().fold((0usize, 0usize, 0usize), |(l, s, p), t| {
        (
            l + t.char_length,
            s + t.syllable_count,
            p + usize::from(t.is_polysyllabic(polysyllabic_threshold)),
        )
    });
    let words = word_count as f64;
    TradFeatures {
        avg_sentence_length: words / sentence_count as f64,
        avg_token_length: letters as f64 / words,
        sentence_count,
        word_count,
        phrase_count: doc.sentences.iter().map(|s| s.phrase_count).sum(),
        avg_syllables_per_word: syllables as f64 / words,
        polysyllabic_count: polysyllabic,
    }
}

/// Picks `min(k, n)` distinct sentence indices uniformly without replacement,
/// returned in document order.
pub fn sample_sentence_indices(sentence_count: usize, k: usize, seed: u64) -> Result<Vec<usize>, FeatureError> {
    if k == 0 {
        return Err(FeatureError::InvalidSampleSize);
    }
    if sentence_count == 0 {
        return Err(FeatureError::EmptyInput);
    }
    if k >= sentence_count {
        return Ok((0..sentence_count).collect());
    }
    let mut rng = rng_from_seed(seed);
    let mut picked = index::sample(&mut rng, sentence_count, k).into_vec();
    picked.sort_unstable();
    Ok(picked)
}

pub fn sample_sentences(doc: &Document, k: usize, seed: u64) -> Result<Vec<&Sentence>, FeatureError> {
    let picked = sample_sentence_indices(doc.sentences.len(), k, seed).map_err(|e| match e {
        FeatureError::EmptyInput => FeatureError::EmptyDocument(doc.id.clone()),
        other => other,
    })?;
    Ok(picked.into_iter().map(|i| &doc.sentences[i]).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TtrFamily {
    pub ttr: f64,
    pub root_ttr: f64,
    pub corr_ttr: f64,
    pub bilog_ttr: f64,
}

/// Type-token ratio and its length-corrected variants. Types are distinct
/// lowercased surfaces.
pub fn compute_ttr_family<'a, I>(tokens: I) -> Result<TtrFamily, FeatureError>
where
    I: IntoIterator<Item = &'a Token>,
{
    let mut types = HashSet::new();
    let mut n = 0usize;
    for token in tokens {
        types.insert(token.normalized.as_str());
        n += 1;
    }
    if n == 0 {
        return Err(FeatureError::EmptyInput);
    }
    let t = types.len() as f64;
    let n_f = n as f64;
    let root_ttr = t / n_f.sqrt();
    let bilog_ttr = if n <= 1 || types.len() == n {
        1.0
    } else {
        t.ln() / n_f.ln()
    };
    Ok(TtrFamily {
        ttr: t / n_f,
        root_ttr,
        corr_ttr: root_ttr / std::f64::consts::SQRT_2,
        bilog_ttr,
    })
}

fn category_ratio<'a, I, F>(tagged: I, pred: F) -> Result<f64, FeatureError>
where
    I: IntoIterator<Item = &'a TaggedToken>,
    F: Fn(&TaggedToken) -> bool,
{
    let (hits, total) = tagged
        .into_iter()
        .fold((0usize, 0usize), |(h, n), t| (h + usize::from(pred(t)), n + 1));
    if total == 0 {
        return Err(FeatureError::EmptyInput);
    }
    Ok(hits as f64 / total as f64)
}

/// Share of tokens that are nouns, verbs, adjectives or adverbs.
pub fn lexical_density<'a, I>(tagged: I) -> Result<f64, FeatureError>
where
    I: IntoIterator<Item = &'a TaggedToken>,
{
    category_ratio(tagged, |t| t.category.is_content())
}

/// Share of tokens in one category.
pub fn lexical_variation<'a, I>(tagged: I, category: LexicalCategory) -> Result<f64, FeatureError>
where
    I: IntoIterator<Item = &'a TaggedToken>,
{
    category_ratio(tagged, |t| t.category == category)
}

pub fn foreign_ratio<'a, I>(tagged: I) -> Result<f64, FeatureError>
where
    I: IntoIterator<Item = &'a TaggedToken>,
{
    category_ratio(tagged, TaggedToken::is_foreign)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LexFeatures {
    pub noun_token_ratio: f64,
    pub verb_token_ratio: f64,
    pub ttr: f64,
    pub root_ttr: f64,
    pub corr_ttr: f64,
    pub bilog_ttr: f64,
    pub lexical_density: f64,
    pub foreign_ratio: f64,
}

impl LexFeatures {
    pub fn to_array(&self) -> [f64; LEX_COUNT] {
        [
            self.noun_token_ratio,
            self.verb_token_ratio,
            self.ttr,
            self.root_ttr,
            self.corr_ttr,
            self.bilog_ttr,
            self.lexical_density,
            self.foreign_ratio,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexOptions {
    pub sample_size: usize,
    /// Measure lexical density on the sample as well (otherwise whole document).
    pub sample_density: bool,
}

impl Default for LexOptions {
    fn default() -> Self {
        LexOptions {
            sample_size: DEFAULT_SAMPLE_SIZE,
            sample_density: true,
        }
    }
}

pub fn extract_lex(doc: &TaggedDocument, options: LexOptions, seed: u64) -> Result<LexFeatures, FeatureError> {
    let picked = sample_sentence_indices(doc.tagged.len(), options.sample_size, seed).map_err(|e| match e {
        FeatureError::EmptyInput => FeatureError::EmptyDocument(doc.id().to_string()),
        other => other,
    })?;
    let sampled: Vec<&TaggedToken> = picked.iter().flat_map(|&i| doc.tagged[i].iter()).collect();
    let ttr = compute_ttr_family(sampled.iter().map(|t| &t.token))?;
    let density = if options.sample_density {
        lexical_density(sampled.iter().copied())?
    } else {
        lexical_density(doc.tagged_tokens())?
    };
    Ok(LexFeatures {
        noun_token_ratio: lexical_variation(doc.tagged_tokens(), LexicalCategory::Noun)?,
        verb_token_ratio: lexical_variation(doc.tagged_tokens(), LexicalCategory::Verb)?,
        ttr: ttr.ttr,
        root_ttr: ttr.root_ttr,
        corr_ttr: ttr.corr_ttr,
        bilog_ttr: ttr.bilog_ttr,
        lexical_density: density,
        foreign_ratio: foreign_ratio(doc.tagged_tokens())?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractOptions {
    pub polysyllabic_threshold: usize,
    pub lex: LexOptions,
    /// Global seed; each document samples with `derive_seed(seed, doc_id)`.
    pub seed: u64,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions {
            polysyllabic_threshold: DEFAULT_POLYSYLLABIC_THRESHOLD,
            lex: LexOptions::default(),
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub doc_id: String,
    pub values: Vec<f64>,
    pub feature_set: FeatureSet,
}

impl FeatureVector {
    pub fn names(&self) -> &'static [&'static str] {
        self.feature_set.names()
    }
}

/// Extracts the full 15-value row for a document.
pub fn extract_all(doc: &TaggedDocument, options: &ExtractOptions) -> Result<[f64; FEATURE_COUNT], FeatureError> {
    let trad = extract_trad(&doc.document, options.polysyllabic_threshold);
    let lex = extract_lex(doc, options.lex, derive_seed(options.seed, doc.id()))?;
    let mut out = [0.0; FEATURE_COUNT];
    out[..TRAD_COUNT].copy_from_slice(&trad.to_array());
    out[TRAD_COUNT..].copy_from_slice(&lex.to_array());
    Ok(out)
}

pub fn build_feature_vector(
    doc: &TaggedDocument,
    feature_set: FeatureSet,
    options: &ExtractOptions,
) -> Result<FeatureVector, FeatureError> {
    let values = if feature_set == FeatureSet::Trad {
        extract_trad(&doc.document, options.polysyllabic_threshold)
            .to_array()
            .to_vec()
    } else {
        feature_set.select(&extract_all(doc, options)?)
    };
    Ok(FeatureVector {
        doc_id: doc.id().to_string(),
        values,
        feature_set,
    })
}
