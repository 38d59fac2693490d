//! Seeded synthetic corpus generator producing tagged documents.

use std::fs;
use std::path::{Path, PathBuf};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Poisson};
use serde::{Deserialize, Serialize};

use super::{CorpusError, CorpusManifest, DocFormat, ManifestEntry};
use crate::dataset::is_valid_level;
use crate::seed::{derive_seed, rng_from_seed};

/// Generation targets for one readability level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelParams {
    pub level: u8,
    pub documents: usize,
    pub mean_sentences: f64,
    /// Mean word tokens per sentence, punctuation excluded.
    pub mean_sentence_length: f64,
    /// Per-slot probability of a polysyllabic word; see `polysyllable_slots`.
    pub polysyllable_rate: f64,
    /// Probability that a token is a noun, verb, adjective or adverb.
    pub content_density: f64,
    /// Probability that a token is a foreign word.
    pub foreign_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    pub levels: Vec<LevelParams>,
    /// Each document draws Binomial(slots, rate) polysyllabic words.
    pub polysyllable_slots: u64,
    pub comma_rate: f64,
    /// Draw every word class from one syllable-length distribution, so word
    /// composition is invisible to length-based statistics.
    pub length_matched: bool,
    pub seed: u64,
}

impl Default for SynthParams {
    /// Document counts and length profile of the reference corpus: 29/30/30
    /// documents, with sentence counts and lengths growing by level.
    fn default() -> Self {
        let level = |level,
                     documents,
                     mean_sentences,
                     mean_sentence_length,
                     polysyllable_rate,
                     content_density,
                     foreign_rate| {
            LevelParams {
                level,
                documents,
                mean_sentences,
                mean_sentence_length,
                polysyllable_rate,
                content_density,
                foreign_rate,
            }
        };
        SynthParams {
            levels: vec![
                level(1, 29, 1059.0 / 29.0, 6561.0 / 1059.0, 0.1, 0.52, 0.02),
                level(2, 30, 1610.0 / 30.0, 13604.0 / 1610.0, 0.2, 0.56, 0.03),
                level(3, 30, 3330.0 / 30.0, 36018.0 / 3330.0, 0.3, 0.60, 0.04),
            ],
            polysyllable_slots: 80,
            comma_rate: 0.06,
            length_matched: false,
            seed: 7,
        }
    }
}

impl SynthParams {
    /// Corpus where surface length separates level 1 from the rest and
    /// vocabulary separates level 3 from the rest, so neither feature group
    /// alone can tell all three levels apart.
    pub fn synergy() -> Self {
        let level = |level, mean_sentences, content_density, foreign_rate| LevelParams {
            level,
            documents: 30,
            mean_sentences,
            mean_sentence_length: 8.0,
            polysyllable_rate: 0.1,
            content_density,
            foreign_rate,
        };
        SynthParams {
            levels: vec![
                level(1, 15.0, 0.45, 0.01),
                level(2, 40.0, 0.45, 0.01),
                level(3, 40.0, 0.65, 0.06),
            ],
            polysyllable_slots: 80,
            comma_rate: 0.06,
            length_matched: true,
            seed: 7,
        }
    }

    pub fn named(preset: &str) -> Option<Self> {
        match preset {
            "default" | "reference" => Some(Self::default()),
            "synergy" => Some(Self::synergy()),
            _ => None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_documents_per_level(mut self, documents: usize) -> Self {
        self.levels.iter_mut().for_each(|l| l.documents = documents);
        self
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        let bad = |msg: String| Err(CorpusError::InvalidParams(msg));
        if self.levels.is_empty() {
            return bad("no levels".into());
        }
        if !(0.0..1.0).contains(&self.comma_rate) {
            return bad(format!("comma_rate {} outside [0, 1)", self.comma_rate));
        }
        for (i, l) in self.levels.iter().enumerate() {
            if !is_valid_level(l.level) || self.levels[..i].iter().any(|o| o.level == l.level) {
                return bad(format!("level {} invalid or repeated", l.level));
            }
            let probs = [l.polysyllable_rate, l.content_density, l.foreign_rate];
            if probs.iter().any(|p| !(0.0..=1.0).contains(p)) || l.content_density + l.foreign_rate > 1.0 {
                return bad(format!(
                    "level {}: rates must be probabilities summing to at most 1",
                    l.level
                ));
            }
            if !(l.mean_sentences >= 1.0 && l.mean_sentence_length >= 1.0) {
                return bad(format!("level {}: means must be at least 1", l.level));
            }
        }
        Ok(())
    }
}

/// A generated document in tagged format.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthDocument {
    pub file_name: String,
    pub level: u8,
    pub text: String,
}

const ONSETS: [&str; 14] = ["b", "d", "g", "h", "k", "l", "m", "n", "p", "r", "s", "t", "w", "y"];
const FOREIGN_ONSETS: [&str; 7] = ["c", "f", "j", "q", "v", "x", "z"];
const VOWELS: [&str; 5] = ["a", "e", "i", "o", "u"];
const VERB_PREFIXES: [&str; 3] = ["nag", "mag", "um"];

const FUNCTION_WORDS: [(&str, &str); 16] = [
    ("ang", "DTC"),
    ("ng", "CCB"),
    ("sa", "CCP"),
    ("at", "CCA"),
    ("ay", "LM"),
    ("si", "DTP"),
    ("mga", "DTCP"),
    ("na", "CCP"),
    ("kay", "CCR"),
    ("para", "CCR"),
    ("siya", "PRS"),
    ("ito", "PRI"),
    ("kami", "PRP"),
    ("sila", "PRP"),
    ("niya", "PRSP"),
    ("iyon", "PRI"),
];

// At most five vowels each, so none counts as polysyllabic.
const FOREIGN_WORDS: [&str; 20] = [
    "computer",
    "video",
    "school",
    "teacher",
    "birthday",
    "cake",
    "family",
    "okay",
    "basketball",
    "jeep",
    "chocolate",
    "television",
    "party",
    "cellphone",
    "internet",
    "zoo",
    "taxi",
    "pizza",
    "box",
    "project",
];

struct Vocabulary {
    nouns: Vec<String>,
    verbs: Vec<String>,
    adjectives: Vec<String>,
    adverbs: Vec<String>,
    long_words: Vec<String>,
    function_words: Vec<(String, &'static str)>,
    foreign_words: Vec<String>,
    /// Rank-frequency weights for the four content lists; uniform when absent.
    zipf: Option<[WeightedIndex<f64>; 4]>,
}

fn syllable(rng: &mut ChaCha8Rng, onsets: &[&str]) -> String {
    let mut s = String::new();
    s.push_str(onsets[rng.random_range(0..onsets.len())]);
    s.push_str(VOWELS[rng.random_range(0..VOWELS.len())]);
    if rng.random_bool(0.25) {
        s.push_str(["n", "ng", "s", "t", "l"][rng.random_range(0..5)]);
    }
    s
}

fn word_list(
    rng: &mut ChaCha8Rng,
    count: usize,
    syllables: (usize, usize),
    prefixes: &[&str],
    onsets: &[&str],
) -> Vec<String> {
    let mut words = Vec::with_capacity(count);
    while words.len() < count {
        let n = rng.random_range(syllables.0..=syllables.1);
        let prefix = if prefixes.is_empty() {
            ""
        } else {
            prefixes[rng.random_range(0..prefixes.len())]
        };
        let w: String = std::iter::once(prefix.to_string())
            .chain((0..n).map(|_| syllable(rng, onsets)))
            .collect();
        if !words.contains(&w) {
            words.push(w);
        }
    }
    words
}

fn zipf(n: usize) -> WeightedIndex<f64> {
    WeightedIndex::new((1..=n).map(|r| 1.0 / r as f64)).expect("non-empty positive weights")
}

impl Vocabulary {
    fn new(seed: u64, length_matched: bool) -> Self {
        let mut rng = rng_from_seed(derive_seed(seed, "vocabulary"));
        let long_words = word_list(&mut rng, 200, (7, 9), &[], &ONSETS);
        if length_matched {
            let span = (1, 4);
            let mut list = |count, onsets: &[&str]| word_list(&mut rng, count, span, &[], onsets);
            let nouns = list(600, &ONSETS);
            let verbs = list(300, &ONSETS);
            let adjectives = list(150, &ONSETS);
            let adverbs = list(80, &ONSETS);
            let function_words = list(FUNCTION_WORDS.len(), &ONSETS)
                .into_iter()
                .zip(FUNCTION_WORDS.iter().map(|(_, tag)| *tag))
                .collect();
            let foreign_words = list(FOREIGN_WORDS.len(), &FOREIGN_ONSETS);
            return Vocabulary {
                nouns,
                verbs,
                adjectives,
                adverbs,
                long_words,
                function_words,
                foreign_words,
                zipf: None,
            };
        }
        let nouns = word_list(&mut rng, 600, (1, 4), &[], &ONSETS);
        let verbs = word_list(&mut rng, 300, (1, 3), &VERB_PREFIXES, &ONSETS);
        let adjectives = word_list(&mut rng, 150, (1, 4), &["ma"], &ONSETS);
        let adverbs = word_list(&mut rng, 80, (1, 3), &[], &ONSETS);
        let zipf = [
            zipf(nouns.len()),
            zipf(verbs.len()),
            zipf(adjectives.len()),
            zipf(adverbs.len()),
        ];
        Vocabulary {
            nouns,
            verbs,
            adjectives,
            adverbs,
            long_words,
            function_words: FUNCTION_WORDS.iter().map(|(w, t)| (w.to_string(), *t)).collect(),
            foreign_words: FOREIGN_WORDS.iter().map(|w| w.to_string()).collect(),
            zipf: Some(zipf),
        }
    }

    fn content(&self, rng: &mut ChaCha8Rng) -> (String, &'static str) {
        let u: f64 = rng.random();
        let (list, class, tag) = if u < 0.5 {
            (&self.nouns, 0, "NNC")
        } else if u < 0.8 {
            (&self.verbs, 1, "VBTS")
        } else if u < 0.92 {
            (&self.adjectives, 2, "JJD")
        } else {
            (&self.adverbs, 3, "RBW")
        };
        let idx = match &self.zipf {
            Some(dists) => dists[class].sample(rng),
            None => rng.random_range(0..list.len()),
        };
        (list[idx].clone(), tag)
    }
}

struct Item {
    surface: String,
    tag: &'static str,
}

fn generate_document(vocab: &Vocabulary, params: &SynthParams, level: &LevelParams, rng: &mut ChaCha8Rng) -> String {
    let sentence_count = 1 + Poisson::new(level.mean_sentences - 1.0).map_or(0, |d| d.sample(rng) as usize);
    let length_dist = Poisson::new(level.mean_sentence_length - 1.0).ok();

    let mut sentences: Vec<Vec<Item>> = Vec::with_capacity(sentence_count);
    for _ in 0..sentence_count {
        let len = 1 + length_dist.as_ref().map_or(0, |d| d.sample(rng) as usize);
        let mut words = Vec::with_capacity(len);
        for _ in 0..len {
            let u: f64 = rng.random();
            let item = if u < level.foreign_rate {
                Item {
                    surface: vocab.foreign_words[rng.random_range(0..vocab.foreign_words.len())].clone(),
                    tag: "FW",
                }
            } else if u < level.foreign_rate + level.content_density {
                let (surface, tag) = vocab.content(rng);
                Item { surface, tag }
            } else {
                let (surface, tag) = &vocab.function_words[rng.random_range(0..vocab.function_words.len())];
                Item {
                    surface: surface.clone(),
                    tag,
                }
            };
            words.push(item);
        }
        sentences.push(words);
    }

    // Polysyllabic words overwrite randomly chosen native tokens.
    let slots: Vec<(usize, usize)> = sentences
        .iter()
        .enumerate()
        .flat_map(|(s, words)| {
            words
                .iter()
                .enumerate()
                .filter(|(_, w)| w.tag != "FW")
                .map(move |(i, _)| (s, i))
        })
        .collect();
    let wanted =
        Binomial::new(params.polysyllable_slots, level.polysyllable_rate).map_or(0, |d| d.sample(rng)) as usize;
    for idx in sample(rng, slots.len(), wanted.min(slots.len())).into_vec() {
        let (s, i) = slots[idx];
        sentences[s][i] = Item {
            surface: vocab.long_words[rng.random_range(0..vocab.long_words.len())].clone(),
            tag: "NNC",
        };
    }

    let mut out = String::new();
    for words in &sentences {
        let mut line = Vec::with_capacity(words.len() * 2 + 1);
        for (i, w) in words.iter().enumerate() {
            let surface = if i == 0 {
                capitalize(&w.surface)
            } else {
                w.surface.clone()
            };
            line.push(format!("{surface}|{}", w.tag));
            if i + 1 < words.len() && rng.random_bool(params.comma_rate) {
                line.push(",|PMC".to_string());
            }
        }
        line.push(".|PMP".to_string());
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Generates every document in memory. Each document draws from its own
/// seed, so output does not depend on generation order.
pub fn synthesize(params: &SynthParams) -> Result<Vec<SynthDocument>, CorpusError> {
    params.validate()?;
    let vocab = Vocabulary::new(params.seed, params.length_matched);
    let mut docs = Vec::new();
    for level in &params.levels {
        for i in 1..=level.documents {
            let file_name = format!("L{}_{i:03}.txt", level.level);
            let mut rng = rng_from_seed(derive_seed(params.seed, &file_name));
            docs.push(SynthDocument {
                text: generate_document(&vocab, params, level, &mut rng),
                file_name,
                level: level.level,
            });
        }
    }
    Ok(docs)
}

/// Writes the documents and a `manifest.csv` into `out_dir`; returns the
/// manifest path.
pub fn generate_synthetic(params: &SynthParams, out_dir: &Path) -> Result<PathBuf, CorpusError> {
    let docs = synthesize(params)?;
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CorpusError::Io { path, source }
    };
    fs::create_dir_all(out_dir).map_err(io(out_dir))?;
    let mut manifest = CorpusManifest::default();
    for doc in &docs {
        let path = out_dir.join(&doc.file_name);
        fs::write(&path, &doc.text).map_err(io(&path))?;
        manifest.entries.push(ManifestEntry {
            path: doc.file_name.clone(),
            level: Some(doc.level),
            format: DocFormat::Tagged,
        });
    }
    let manifest_path = out_dir.join("manifest.csv");
    fs::write(&manifest_path, manifest.to_csv()).map_err(io(&manifest_path))?;
    Ok(manifest_path)
}
