//! Sentence segmentation, tokenization, phrase counting and syllable counting.
//!
//! Everything here is a pure function of its input string. Filipino
//! orthography is close to phonemic, so syllables are counted as vowel
//! letters with every vowel treated as its own nucleus (`paano` is
//! `pa-a-no`).

use serde::{Deserialize, Serialize};

/// Default polysyllabic threshold: a word is polysyllabic when it has
/// strictly more syllables than this.
pub const DEFAULT_POLYSYLLABIC_THRESHOLD: usize = 6;

const SENTENCE_TERMINATORS: [char; 3] = ['.', '!', '?'];
const PHRASE_DELIMITERS: [char; 5] = [',', ';', ':', '\u{2014}', '\u{2013}'];

/// A single word unit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub normalized: String,
    pub syllable_count: usize,
    /// Number of letters, joiners excluded.
    pub char_length: usize,
}

impl Token {
    pub fn new(surface: impl Into<String>) -> Self {
        let surface = surface.into();
        let normalized = surface.to_lowercase();
        let char_length = surface.chars().filter(|c| c.is_alphabetic()).count();
        let syllable_count = count_syllables_str(&surface);
        Token {
            surface,
            normalized,
            syllable_count,
            char_length,
        }
    }

    /// Whether the token carries at least one letter. Punctuation items that
    /// arrive through tagged input are tokens without letters.
    pub fn is_word(&self) -> bool {
        self.char_length > 0
    }

    pub fn is_polysyllabic(&self, threshold: usize) -> bool {
        is_polysyllabic(self, threshold)
    }
}

/// One sentence: its source text, its word tokens and its phrase count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sentence {
    pub text: String,
    pub tokens: Vec<Token>,
    pub phrase_count: usize,
}

impl Sentence {
    /// Builds a sentence from its text. Returns `None` when the text holds no
    /// word at all (digits or punctuation only).
    pub fn from_text(text: &str) -> Option<Self> {
        let tokens = tokenize(text);
        if tokens.is_empty() {
            return None;
        }
        Some(Sentence {
            text: text.to_string(),
            phrase_count: segment_phrases(text),
            tokens,
        })
    }

    pub fn word_count(&self) -> usize {
        self.tokens.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub raw_text: String,
    pub sentences: Vec<Sentence>,
}

impl Document {
    pub fn from_text(id: impl Into<String>, raw_text: impl Into<String>) -> Self {
        let raw_text = raw_text.into();
        let sentences = segment_sentences(&raw_text);
        Document {
            id: id.into(),
            raw_text,
            sentences,
        }
    }

    pub fn tokens(&self) -> impl Iterator<Item = &Token> {
        self.sentences.iter().flat_map(|s| s.tokens.iter())
    }

    pub fn word_count(&self) -> usize {
        self.sentences.iter().map(Sentence::word_count).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }
}

/// Splits text into raw sentence strings.
///
/// A boundary is a run of one or more terminators (`.` `!` `?`) followed by
/// whitespace or the end of input. The run stays attached to the sentence it
/// closes. Unterminated trailing text forms the last sentence.
pub fn split_sentence_texts(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut chars = text.char_indices().peekable();

    while let Some((idx, c)) = chars.next() {
        if !SENTENCE_TERMINATORS.contains(&c) {
            continue;
        }
        let mut end = idx + c.len_utf8();
        while let Some(&(j, next)) = chars.peek() {
            if SENTENCE_TERMINATORS.contains(&next) {
                end = j + next.len_utf8();
                chars.next();
            } else {
                break;
            }
        }
        let at_boundary = match chars.peek() {
            None => true,
            Some(&(_, next)) => next.is_whitespace(),
        };
        if at_boundary {
            let piece = text[start..end].trim();
            if !piece.is_empty() {
                out.push(piece);
            }
            start = end;
        }
    }

    let tail = text[start..].trim();
    if !tail.is_empty() {
        out.push(tail);
    }
    out
}

/// Segments text into sentences. Pieces that contain no word are dropped so
/// every returned sentence has at least one token.
pub fn segment_sentences(text: &str) -> Vec<Sentence> {
    split_sentence_texts(text)
        .into_iter()
        .filter_map(Sentence::from_text)
        .collect()
}

fn is_joiner(c: char) -> bool {
    matches!(c, '-' | '\'' | '\u{2019}' | '\u{2010}')
}

/// Splits one sentence into word tokens.
///
/// A token is a maximal run of letters; a hyphen or apostrophe is kept only
/// when it sits between two letters, so `mag-aral` stays one word. Digits and
/// every other symbol separate tokens and are dropped.
pub fn tokenize(sentence_text: &str) -> Vec<Token> {
    let chars: Vec<(usize, char)> = sentence_text.char_indices().collect();
    let mut tokens = Vec::new();
    let mut i = 0;

    while i < chars.len() {
        if !chars[i].1.is_alphabetic() {
            i += 1;
            continue;
        }
        let begin = chars[i].0;
        let mut j = i + 1;
        loop {
            if j < chars.len() && chars[j].1.is_alphabetic() {
                j += 1;
            } else if j + 1 < chars.len() && is_joiner(chars[j].1) && chars[j + 1].1.is_alphabetic() {
                j += 2;
            } else {
                break;
            }
        }
        let end = chars.get(j).map_or(sentence_text.len(), |&(b, _)| b);
        tokens.push(Token::new(&sentence_text[begin..end]));
        i = j;
    }
    tokens
}

/// Counts punctuation-delimited phrases in a sentence.
///
/// Phrases are the segments between `,` `;` `:` and en/em dashes that contain
/// at least one token. A sentence with words always has at least one phrase.
pub fn segment_phrases(sentence_text: &str) -> usize {
    let filled = sentence_text
        .split(|c: char| PHRASE_DELIMITERS.contains(&c))
        .filter(|segment| !tokenize(segment).is_empty())
        .count();
    filled.max(1)
}

fn is_vowel(c: char) -> bool {
    matches!(
        c.to_lowercase().next().unwrap_or(c),
        'a' | 'e'
            | 'i'
            | 'o'
            | 'u'
            | 'á'
            | 'à'
            | 'â'
            | 'é'
            | 'è'
            | 'ê'
            | 'í'
            | 'ì'
            | 'î'
            | 'ó'
            | 'ò'
            | 'ô'
            | 'ú'
            | 'ù'
            | 'û'
    )
}

fn count_syllables_str(word: &str) -> usize {
    let letters = word.chars().filter(|c| c.is_alphabetic()).count();
    if letters == 0 {
        return 0;
    }
    word.chars().filter(|&c| is_vowel(c)).count().max(1)
}

/// Number of syllables in a token: one per vowel letter, with a floor of one
/// for vowel-less words such as `mga`.
pub fn count_syllables(token: &Token) -> usize {
    count_syllables_str(&token.surface)
}

/// True when the token has strictly more syllables than `threshold`.
pub fn is_polysyllabic(token: &Token, threshold: usize) -> bool {
    token.syllable_count > threshold
}
