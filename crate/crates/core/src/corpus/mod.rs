//! Corpus manifests, document loading and the features CSV.

mod synth;

use std::collections::HashSet;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{is_valid_level, LabeledDataset};
use crate::features::{extract_all, ExtractOptions, FeatureError, FeatureSet, FEATURE_COUNT, FEATURE_NAMES};
use crate::pos::{HeuristicTagger, PosError, TaggedDocument, TagsetMapping, DEFAULT_SEPARATOR};

pub use synth::{generate_synthetic, synthesize, LevelParams, SynthDocument, SynthParams};

pub const MANIFEST_HEADER: [&str; 3] = ["path", "level", "format"];

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("manifest row {row}: file {path} not found")]
    MissingFile { row: usize, path: PathBuf },
    #[error("manifest row {row}: {reason}")]
    MalformedManifestRow { row: usize, reason: String },
    #[error("{path}: {source}")]
    MalformedItem {
        path: PathBuf,
        #[source]
        source: PosError,
    },
    #[error("{doc_id}: {source}")]
    Feature {
        doc_id: String,
        #[source]
        source: FeatureError,
    },
    #[error("features file line {line}: {reason}")]
    MalformedFeatures { line: usize, reason: String },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("invalid synthetic-corpus parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DocFormat {
    Plain,
    Tagged,
}

impl DocFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            DocFormat::Plain => "plain",
            DocFormat::Tagged => "tagged",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Path as written in the manifest, relative to the manifest's directory.
    pub path: String,
    pub level: Option<u8>,
    pub format: DocFormat,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub entries: Vec<ManifestEntry>,
}

/// A manifest plus the rows that failed validation.
#[derive(Debug, Default)]
pub struct ParsedManifest {
    pub manifest: CorpusManifest,
    pub errors: Vec<CorpusError>,
}

impl CorpusManifest {
    /// Parses manifest CSV. A missing or wrong header is fatal; bad rows are
    /// collected and skipped. Row numbers count the header as row 1.
    pub fn parse<R: Read>(reader: R) -> Result<ParsedManifest, CorpusError> {
        let mut rdr = csv::ReaderBuilder::new()
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let header = rdr.headers()?.clone();
        if header.iter().collect::<Vec<_>>() != MANIFEST_HEADER {
            return Err(CorpusError::MalformedManifestRow {
                row: 1,
                reason: format!(
                    "expected header path,level,format, found {:?}",
                    header.iter().collect::<Vec<_>>()
                ),
            });
        }
        let mut parsed = ParsedManifest::default();
        let mut seen = HashSet::new();
        for (idx, record) in rdr.records().enumerate() {
            let row = idx + 2;
            let record = match record {
                Ok(r) => r,
                Err(e) => {
                    parsed.errors.push(CorpusError::MalformedManifestRow {
                        row,
                        reason: e.to_string(),
                    });
                    continue;
                }
            };
            match parse_manifest_row(&record) {
                Ok(entry) if !seen.insert(entry.path.clone()) => {
                    parsed.errors.push(CorpusError::MalformedManifestRow {
                        row,
                        reason: format!("duplicate path {}", entry.path),
                    });
                }
                Ok(entry) => parsed.manifest.entries.push(entry),
                Err(reason) => parsed.errors.push(CorpusError::MalformedManifestRow { row, reason }),
            }
        }
        Ok(parsed)
    }

    pub fn to_csv(&self) -> String {
        let mut out = MANIFEST_HEADER.join(",");
        out.push('\n');
        for e in &self.entries {
            let level = e.level.map_or(String::new(), |l| l.to_string());
            out.push_str(&format!("{},{},{}\n", e.path, level, e.format.as_str()));
        }
        out
    }
}

fn parse_manifest_row(record: &csv::StringRecord) -> Result<ManifestEntry, String> {
    if record.len() != 3 {
        return Err(format!("expected 3 fields, found {}", record.len()));
    }
    let path = record[0].to_string();
    if path.is_empty() {
        return Err("empty path".into());
    }
    let level = match &record[1] {
        "" => None,
        raw => {
            let level: u8 = raw.parse().map_err(|_| format!("level {raw:?} is not a number"))?;
            if !is_valid_level(level) {
                return Err(format!("level {level} outside 1-3"));
            }
            Some(level)
        }
    };
    let format = match record[2].to_ascii_lowercase().as_str() {
        "plain" => DocFormat::Plain,
        "tagged" => DocFormat::Tagged,
        other => return Err(format!("unknown format {other:?}")),
    };
    Ok(ManifestEntry { path, level, format })
}

/// How documents are turned into tagged documents.
#[derive(Debug, Clone)]
pub struct LoadOptions {
    pub separator: char,
    pub mapping: TagsetMapping,
    pub tagger: HeuristicTagger,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            separator: DEFAULT_SEPARATOR,
            mapping: TagsetMapping::default(),
            tagger: HeuristicTagger::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LabeledDocument {
    pub level: Option<u8>,
    pub doc: TaggedDocument,
}

/// Documents that loaded, in manifest order, plus per-row failures.
#[derive(Debug, Default)]
pub struct LoadedCorpus {
    pub documents: Vec<LabeledDocument>,
    pub errors: Vec<CorpusError>,
}

pub fn load_document(
    path: &Path,
    id: &str,
    format: DocFormat,
    options: &LoadOptions,
) -> Result<TaggedDocument, CorpusError> {
    let text = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    match format {
        DocFormat::Plain => Ok(TaggedDocument::from_plain_text(id, &text, &options.tagger)),
        DocFormat::Tagged => {
            TaggedDocument::from_tagged_text(id, &text, options.separator, &options.mapping).map_err(|source| {
                CorpusError::MalformedItem {
                    path: path.to_path_buf(),
                    source,
                }
            })
        }
    }
}

/// Loads every document named by a manifest. Only an unreadable or
/// header-less manifest is fatal; everything else is recorded per row.
pub fn load_corpus(manifest_path: &Path, options: &LoadOptions) -> Result<LoadedCorpus, CorpusError> {
    let file = fs::File::open(manifest_path).map_err(|source| CorpusError::Io {
        path: manifest_path.to_path_buf(),
        source,
    })?;
    let parsed = CorpusManifest::parse(file)?;
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let mut corpus = LoadedCorpus {
        documents: Vec::new(),
        errors: parsed.errors,
    };
    for (idx, entry) in parsed.manifest.entries.iter().enumerate() {
        let path = base.join(&entry.path);
        if !path.is_file() {
            corpus.errors.push(CorpusError::MissingFile { row: idx + 2, path });
            continue;
        }
        match load_document(&path, &entry.path, entry.format, options) {
            Ok(doc) => corpus.documents.push(LabeledDocument {
                level: entry.level,
                doc,
            }),
            Err(e) => corpus.errors.push(e),
        }
    }
    Ok(corpus)
}

/// One line of the features file: all 15 canonical values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRow {
    pub doc_id: String,
    pub level: Option<u8>,
    pub values: Vec<f64>,
}

/// Extracts feature rows for every loaded document, collecting failures.
pub fn extract_rows(corpus: &LoadedCorpus, options: &ExtractOptions) -> (Vec<FeatureRow>, Vec<CorpusError>) {
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for labeled in &corpus.documents {
        match extract_all(&labeled.doc, options) {
            Ok(values) => rows.push(FeatureRow {
                doc_id: labeled.doc.id().to_string(),
                level: labeled.level,
                values: values.to_vec(),
            }),
            Err(source) => errors.push(CorpusError::Feature {
                doc_id: labeled.doc.id().to_string(),
                source,
            }),
        }
    }
    (rows, errors)
}

pub fn features_header() -> Vec<&'static str> {
    let mut header = vec!["doc_id", "level"];
    header.extend(FEATURE_NAMES);
    header
}

/// Writes the features CSV. Floats use Rust's shortest round-trip formatting,
/// so reading the file back gives bit-identical values.
pub fn write_features_csv<W: Write>(writer: W, rows: &[FeatureRow]) -> Result<(), CorpusError> {
    let mut wtr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    wtr.write_record(features_header())?;
    for row in rows {
        let mut record = vec![row.doc_id.clone(), row.level.map_or(String::new(), |l| l.to_string())];
        record.extend(row.values.iter().map(|v| v.to_string()));
        wtr.write_record(&record)?;
    }
    wtr.flush().map_err(|e| CorpusError::Csv(e.into()))?;
    Ok(())
}

pub fn read_features_csv<R: Read>(reader: R) -> Result<Vec<FeatureRow>, CorpusError> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != features_header() {
        return Err(CorpusError::MalformedFeatures {
            line: 1,
            reason: "header must be doc_id,level followed by the 15 canonical feature names".into(),
        });
    }
    let mut rows = Vec::new();
    for (idx, record) in rdr.records().enumerate() {
        let line = idx + 2;
        let record = record?;
        let bad = |reason: String| CorpusError::MalformedFeatures { line, reason };
        if record.len() != FEATURE_COUNT + 2 {
            return Err(bad(format!(
                "expected {} fields, found {}",
                FEATURE_COUNT + 2,
                record.len()
            )));
        }
        let level = match &record[1] {
            "" => None,
            raw => match raw.parse::<u8>() {
                Ok(l) if is_valid_level(l) => Some(l),
                _ => return Err(bad(format!("invalid level {raw:?}"))),
            },
        };
        let values = record
            .iter()
            .skip(2)
            .map(|v| v.parse::<f64>().map_err(|_| bad(format!("invalid number {v:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(FeatureRow {
            doc_id: record[0].to_string(),
            level,
            values,
        });
    }
    Ok(rows)
}

/// Turns labeled feature rows into a training dataset restricted to one
/// feature set. Every row must carry a level.
pub fn rows_to_dataset(rows: &[FeatureRow], feature_set: FeatureSet) -> Result<LabeledDataset, CorpusError> {
    let mut labels = Vec::with_capacity(rows.len());
    for (idx, row) in rows.iter().enumerate() {
        match row.level {
            Some(l) => labels.push(l),
            None => {
                return Err(CorpusError::MalformedFeatures {
                    line: idx + 2,
                    reason: format!("document {} has no level", row.doc_id),
                })
            }
        }
    }
    let ids = rows.iter().map(|r| r.doc_id.clone()).collect();
    let full: Vec<Vec<f64>> = rows.iter().map(|r| r.values.clone()).collect();
    Ok(LabeledDataset::from_full_rows(ids, &full, labels, feature_set))
}
