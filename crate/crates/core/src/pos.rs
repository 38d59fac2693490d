//! Part-of-speech layer: tagged-text ingestion, tag-to-category mapping,
//! foreign-word detection and a small rule-based fallback tagger.
//!
//! Tagged text follows the word/tag convention of the Stanford-based Filipino
//! tagger: one sentence per line, whitespace-separated `word|TAG` items.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::{segment_phrases, Document, Sentence, Token};

pub const DEFAULT_SEPARATOR: char = '|';

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LexicalCategory {
    Noun,
    Verb,
    Adjective,
    Adverb,
    Pronoun,
    Foreign,
    Other,
}

impl LexicalCategory {
    /// Information-carrying categories counted by lexical density.
    pub fn is_content(self) -> bool {
        matches!(
            self,
            LexicalCategory::Noun | LexicalCategory::Verb | LexicalCategory::Adjective | LexicalCategory::Adverb
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LexicalCategory::Noun => "Noun",
            LexicalCategory::Verb => "Verb",
            LexicalCategory::Adjective => "Adjective",
            LexicalCategory::Adverb => "Adverb",
            LexicalCategory::Pronoun => "Pronoun",
            LexicalCategory::Foreign => "Foreign",
            LexicalCategory::Other => "Other",
        }
    }
}

impl fmt::Display for LexicalCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LexicalCategory {
    type Err = PosError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "noun" => Ok(LexicalCategory::Noun),
            "verb" => Ok(LexicalCategory::Verb),
            "adjective" => Ok(LexicalCategory::Adjective),
            "adverb" => Ok(LexicalCategory::Adverb),
            "pronoun" => Ok(LexicalCategory::Pronoun),
            "foreign" => Ok(LexicalCategory::Foreign),
            "other" => Ok(LexicalCategory::Other),
            _ => Err(PosError::UnknownCategory(s.trim().to_string())),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PosError {
    #[error("line {line}, item {item}: malformed tagged item {text:?}")]
    MalformedItem { line: usize, item: usize, text: String },
    #[error("unknown lexical category {0:?}")]
    UnknownCategory(String),
    #[error("tagset mapping line {line}: {reason}")]
    MalformedMapping { line: usize, reason: String },
}

/// Prefix table translating raw tags into lexical categories.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagsetMapping {
    rules: Vec<(String, LexicalCategory)>,
    default_category: LexicalCategory,
}

impl Default for TagsetMapping {
    fn default() -> Self {
        TagsetMapping::new(
            vec![
                ("NN".into(), LexicalCategory::Noun),
                ("VB".into(), LexicalCategory::Verb),
                ("JJ".into(), LexicalCategory::Adjective),
                ("RB".into(), LexicalCategory::Adverb),
                ("PR".into(), LexicalCategory::Pronoun),
                ("FW".into(), LexicalCategory::Foreign),
            ],
            LexicalCategory::Other,
        )
    }
}

impl TagsetMapping {
    pub fn new(rules: Vec<(String, LexicalCategory)>, default_category: LexicalCategory) -> Self {
        let mut rules = rules;
        // longest prefix first; ties keep declaration order
        rules.sort_by_key(|r| std::cmp::Reverse(r.0.len()));
        TagsetMapping {
            rules,
            default_category,
        }
    }

    /// Parses a `prefix=Category` file. A `default=Category` line sets the
    /// fallback; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self, PosError> {
        let mut rules = Vec::new();
        let mut default_category = LexicalCategory::Other;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| PosError::MalformedMapping {
                line: idx + 1,
                reason: format!("expected prefix=Category, got {line:?}"),
            })?;
            let key = key.trim();
            let category = value
                .parse::<LexicalCategory>()
                .map_err(|e| PosError::MalformedMapping {
                    line: idx + 1,
                    reason: e.to_string(),
                })?;
            if key.is_empty() {
                return Err(PosError::MalformedMapping {
                    line: idx + 1,
                    reason: "empty prefix".into(),
                });
            }
            if key == "default" {
                default_category = category;
            } else {
                rules.push((key.to_string(), category));
            }
        }
        Ok(TagsetMapping::new(rules, default_category))
    }

    pub fn map(&self, tag: &str) -> LexicalCategory {
        map_category(tag, self)
    }

    pub fn rules(&self) -> &[(String, LexicalCategory)] {
        &self.rules
    }

    pub fn default_category(&self) -> LexicalCategory {
        self.default_category
    }
}

/// Longest matching prefix wins; unmatched tags take the default category.
pub fn map_category(tag: &str, mapping: &TagsetMapping) -> LexicalCategory {
    mapping
        .rules
        .iter()
        .find(|(prefix, _)| tag.starts_with(prefix.as_str()))
        .map_or(mapping.default_category, |(_, cat)| *cat)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaggedToken {
    pub token: Token,
    pub tag: String,
    pub category: LexicalCategory,
}

impl TaggedToken {
    pub fn is_foreign(&self) -> bool {
        detect_foreign(self)
    }
}

/// True iff the token's category is `Foreign`.
pub fn detect_foreign(tagged: &TaggedToken) -> bool {
    tagged.category == LexicalCategory::Foreign
}

/// Parses tagged text into sentences of tagged items. Items without letters
/// (punctuation) are kept so the text can be re-serialized verbatim.
pub fn parse_tagged(text: &str, separator: char, mapping: &TagsetMapping) -> Result<Vec<Vec<TaggedToken>>, PosError> {
    let mut sentences = Vec::new();
    for (line_idx, line) in text.lines().enumerate() {
        let mut items = Vec::new();
        for (item_idx, item) in line.split_whitespace().enumerate() {
            let malformed = || PosError::MalformedItem {
                line: line_idx + 1,
                item: item_idx + 1,
                text: item.to_string(),
            };
            let (word, tag) = item.rsplit_once(separator).ok_or_else(malformed)?;
            if word.is_empty() || tag.is_empty() {
                return Err(malformed());
            }
            items.push(TaggedToken {
                token: Token::new(word),
                tag: tag.to_string(),
                category: mapping.map(tag),
            });
        }
        if !items.is_empty() {
            sentences.push(items);
        }
    }
    Ok(sentences)
}

/// Writes sentences back out in `word<sep>TAG` form, one sentence per line.
pub fn serialize_tagged(sentences: &[Vec<TaggedToken>], separator: char) -> String {
    let mut out = String::new();
    for sentence in sentences {
        let line: Vec<String> = sentence
            .iter()
            .map(|t| format!("{}{}{}", t.token.surface, separator, t.tag))
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

const NON_NATIVE_LETTERS: [char; 7] = ['c', 'f', 'j', 'q', 'v', 'x', 'z'];

const DEFAULT_NATIVE_EXCEPTIONS: &[&str] = &[
    "juan",
    "jose",
    "josefa",
    "jesus",
    "maria",
    "filipino",
    "filipina",
    "pilipinas",
    "kapitan",
];

/// Function words the fallback tagger should not count as content.
const DEFAULT_LEXICON: &[(&str, LexicalCategory)] = &[
    ("ang", LexicalCategory::Other),
    ("ng", LexicalCategory::Other),
    ("mga", LexicalCategory::Other),
    ("sa", LexicalCategory::Other),
    ("si", LexicalCategory::Other),
    ("sina", LexicalCategory::Other),
    ("ni", LexicalCategory::Other),
    ("nina", LexicalCategory::Other),
    ("kay", LexicalCategory::Other),
    ("at", LexicalCategory::Other),
    ("ay", LexicalCategory::Other),
    ("na", LexicalCategory::Other),
    ("pa", LexicalCategory::Other),
    ("din", LexicalCategory::Other),
    ("rin", LexicalCategory::Other),
    ("lang", LexicalCategory::Other),
    ("para", LexicalCategory::Other),
    ("pero", LexicalCategory::Other),
    ("kung", LexicalCategory::Other),
    ("dahil", LexicalCategory::Other),
    ("ako", LexicalCategory::Pronoun),
    ("ikaw", LexicalCategory::Pronoun),
    ("ka", LexicalCategory::Pronoun),
    ("siya", LexicalCategory::Pronoun),
    ("kami", LexicalCategory::Pronoun),
    ("tayo", LexicalCategory::Pronoun),
    ("kayo", LexicalCategory::Pronoun),
    ("sila", LexicalCategory::Pronoun),
    ("ko", LexicalCategory::Pronoun),
    ("mo", LexicalCategory::Pronoun),
    ("niya", LexicalCategory::Pronoun),
    ("namin", LexicalCategory::Pronoun),
    ("natin", LexicalCategory::Pronoun),
    ("ninyo", LexicalCategory::Pronoun),
    ("nila", LexicalCategory::Pronoun),
    ("ito", LexicalCategory::Pronoun),
    ("iyan", LexicalCategory::Pronoun),
    ("iyon", LexicalCategory::Pronoun),
];

const VERB_PREFIXES: [&str; 6] = ["nag", "mag", "um", "na", "ma", "i"];
const VERB_SUFFIXES: [&str; 2] = ["in", "an"];
const MIN_STEM_LETTERS: usize = 3;

/// Rule-based fallback tagger for untagged text. Approximate by construction:
/// lexicon lookup, then the non-native-letter foreign heuristic, then verb
/// affix patterns, then Noun.
#[derive(Debug, Clone)]
pub struct HeuristicTagger {
    lexicon: HashMap<String, LexicalCategory>,
    native_exceptions: HashSet<String>,
}

impl Default for HeuristicTagger {
    fn default() -> Self {
        HeuristicTagger {
            lexicon: DEFAULT_LEXICON.iter().map(|(w, c)| (w.to_string(), *c)).collect(),
            native_exceptions: DEFAULT_NATIVE_EXCEPTIONS.iter().map(|w| w.to_string()).collect(),
        }
    }
}

impl HeuristicTagger {
    /// A tagger with no lexicon and no native exceptions.
    pub fn bare() -> Self {
        HeuristicTagger {
            lexicon: HashMap::new(),
            native_exceptions: HashSet::new(),
        }
    }

    pub fn with_lexicon_entry(mut self, word: &str, category: LexicalCategory) -> Self {
        self.lexicon.insert(word.to_lowercase(), category);
        self
    }

    pub fn with_native_exception(mut self, word: &str) -> Self {
        self.native_exceptions.insert(word.to_lowercase());
        self
    }

    pub fn looks_foreign(&self, token: &Token) -> bool {
        if self.native_exceptions.contains(&token.normalized) {
            return false;
        }
        token.normalized.chars().any(|c| NON_NATIVE_LETTERS.contains(&c))
    }

    pub fn categorize(&self, token: &Token) -> (LexicalCategory, &'static str) {
        if let Some(&cat) = self.lexicon.get(&token.normalized) {
            return (cat, "LEX");
        }
        if self.looks_foreign(token) {
            return (LexicalCategory::Foreign, "FW");
        }
        if has_verb_affix(&token.normalized) {
            return (LexicalCategory::Verb, "VB");
        }
        (LexicalCategory::Noun, "NN")
    }

    pub fn tag(&self, tokens: &[Token]) -> Vec<TaggedToken> {
        heuristic_tag(tokens, self)
    }
}

fn letters_in(s: &str) -> usize {
    s.chars().filter(|c| c.is_alphabetic()).count()
}

fn has_verb_affix(word: &str) -> bool {
    let prefixed = VERB_PREFIXES.iter().any(|p| {
        word.strip_prefix(p)
            .map(|stem| letters_in(stem) >= MIN_STEM_LETTERS)
            .unwrap_or(false)
    });
    prefixed
        || VERB_SUFFIXES.iter().any(|s| {
            word.strip_suffix(s)
                .map(|stem| letters_in(stem) >= MIN_STEM_LETTERS)
                .unwrap_or(false)
        })
}

/// Tags tokens with the fallback rules. The raw tag records which rule fired.
pub fn heuristic_tag(tokens: &[Token], tagger: &HeuristicTagger) -> Vec<TaggedToken> {
    tokens
        .iter()
        .map(|token| {
            let (category, tag) = tagger.categorize(token);
            TaggedToken {
                token: token.clone(),
                tag: tag.to_string(),
                category,
            }
        })
        .collect()
}

/// A segmented document whose word tokens all carry a category.
///
/// `tagged[i]` holds the word tokens of `document.sentences[i]`, in order.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggedDocument {
    pub document: Document,
    pub tagged: Vec<Vec<TaggedToken>>,
}

impl TaggedDocument {
    pub fn id(&self) -> &str {
        &self.document.id
    }

    /// Builds a document from tagged text. Each line is one sentence; its
    /// phrase count comes from the punctuation items on that line.
    pub fn from_tagged_text(
        id: impl Into<String>,
        text: &str,
        separator: char,
        mapping: &TagsetMapping,
    ) -> Result<Self, PosError> {
        let parsed = parse_tagged(text, separator, mapping)?;
        let mut sentences = Vec::with_capacity(parsed.len());
        let mut tagged = Vec::with_capacity(parsed.len());
        for items in parsed {
            let words: Vec<TaggedToken> = items.iter().filter(|t| t.token.is_word()).cloned().collect();
            if words.is_empty() {
                continue;
            }
            let line = items
                .iter()
                .map(|t| t.token.surface.as_str())
                .collect::<Vec<_>>()
                .join(" ");
            sentences.push(Sentence {
                phrase_count: segment_phrases(&line),
                tokens: words.iter().map(|t| t.token.clone()).collect(),
                text: line,
            });
            tagged.push(words);
        }
        Ok(TaggedDocument {
            document: Document {
                id: id.into(),
                raw_text: text.to_string(),
                sentences,
            },
            tagged,
        })
    }

    /// Segments plain text and tags it with the fallback tagger.
    pub fn from_plain_text(id: impl Into<String>, text: &str, tagger: &HeuristicTagger) -> Self {
        let document = Document::from_text(id, text);
        let tagged = document.sentences.iter().map(|s| tagger.tag(&s.tokens)).collect();
        TaggedDocument { document, tagged }
    }

    pub fn tagged_tokens(&self) -> impl Iterator<Item = &TaggedToken> {
        self.tagged.iter().flatten()
    }
}
