//! Task files: JSON with an explicit `schema_version`, optionally pointing at
//! plain-text sentence files (one sentence per line, blank lines skipped).
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "id": "d30001",
//!   "documents": [["First sentence.", "Second sentence."]],
//!   "references": [["A reference sentence."]],
//!   "n": 1,
//!   "l_max": 100,
//!   "preprocessing": { "stemming": true }
//! }
//! ```
//!
//! Paths in `document_files`, `reference_files` and
//! `preprocessing.stopword_file` are relative to the task file.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use oracle_summ_core::{Budget, LengthMode, OracleProblem, PreprocessConfig, Preprocessor, ReferenceScope};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskFile {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    /// Each document is a list of raw sentences.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub documents: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub document_files: Vec<PathBuf>,
    /// Each reference summary is a list of raw sentences.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub references: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reference_files: Vec<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_max: Option<usize>,
    #[serde(default)]
    pub preprocessing: Preprocessing,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Preprocessing {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stemming: Option<bool>,
    /// Defaults to on for unigrams and off otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stopword_removal: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lowercase: Option<bool>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stopwords: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stopword_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<LengthSetting>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_ngrams: Option<ScopeSetting>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthSetting {
    RawWords,
    RetainedTokens,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScopeSetting {
    PerSentence,
    WholeSummary,
}

/// Command-line overrides applied on top of a task file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub n: Option<usize>,
    pub l_max: Option<usize>,
    pub stopword_file: Option<PathBuf>,
    pub no_stem: bool,
    pub keep_stopwords: bool,
    pub remove_stopwords: bool,
    /// Score against each reference on its own, one sub-task per reference.
    pub per_reference: bool,
}

/// A task ready to search.
#[derive(Debug, Clone)]
pub struct PreparedTask {
    pub name: String,
    pub n: usize,
    pub budget: Budget,
    pub problem: OracleProblem,
    pub sentences: Vec<String>,
}

impl TaskFile {
    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let file: TaskFile = serde_path_to_error::deserialize(de).map_err(|e| {
            let inner = e.inner();
            CliError::validation(format!(
                "line {} column {}, field `{}`: {}",
                inner.line(),
                inner.column(),
                e.path(),
                strip_position(&inner.to_string())
            ))
        })?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(CliError::validation(format!(
                "field `schema_version`: unsupported version {} (expected {SCHEMA_VERSION})",
                file.schema_version
            )));
        }
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| e.in_task(&path.display().to_string()))
    }
}

fn strip_position(msg: &str) -> &str {
    msg.find(" at line ").map_or(msg, |i| &msg[..i])
}

/// Reads a plain-text sentence file: one sentence per line, blank lines skipped.
pub fn read_sentence_file(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect())
}

/// Reads a stopword list: one word per line, `#` starts a comment line.
pub fn read_stopword_file(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect())
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Turns a task file into one problem, or one per reference when asked.
pub fn prepare(file: &TaskFile, name: &str, base_dir: &Path, overrides: &Overrides) -> Result<Vec<PreparedTask>> {
    let n = overrides.n.or(file.n).unwrap_or(1);
    if n == 0 {
        return Err(CliError::validation("field `n`: gram order must be at least 1"));
    }
    let l_max = overrides
        .l_max
        .or(file.l_max)
        .ok_or_else(|| CliError::validation("field `l_max`: missing (set it in the task or pass --lmax)"))?;
    let budget =
        Budget::new(l_max).ok_or_else(|| CliError::validation("field `l_max`: budget must be at least 1 word"))?;

    let mut sentences: Vec<String> = file.documents.iter().flatten().cloned().collect();
    for p in &file.document_files {
        sentences.extend(read_sentence_file(&resolve(base_dir, p))?);
    }
    let mut references = file.references.clone();
    for p in &file.reference_files {
        references.push(read_sentence_file(&resolve(base_dir, p))?);
    }
    if sentences.is_empty() {
        return Err(CliError::validation(
            "field `documents`: at least one document sentence is required",
        ));
    }
    if references.is_empty() {
        return Err(CliError::validation(
            "field `references`: at least one reference summary is required",
        ));
    }

    let config = build_config(n, &file.preprocessing, base_dir, overrides)?;
    if config.stopword_removal && config.stopwords.is_empty() {
        log::warn!("{name}: stopword removal is on but the stopword list is empty");
    }
    let pre = Preprocessor::new(config).map_err(|e| CliError::validation(e.to_string()))?;
    let docs = pre
        .documents(sentences.iter().map(String::as_str))
        .map_err(|e| CliError::validation(format!("field `documents`: {e}")))?;
    let refs = references
        .iter()
        .enumerate()
        .map(|(k, r)| pre.reference(k, r.iter().map(String::as_str)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::validation(format!("field `references`: {e}")))?;

    let groups: Vec<(String, Vec<_>)> = if overrides.per_reference {
        refs.iter()
            .enumerate()
            .map(|(k, r)| (format!("{name}#ref{k}"), vec![r.clone()]))
            .collect()
    } else {
        vec![(name.to_string(), refs)]
    };
    groups
        .into_iter()
        .map(|(name, refs)| {
            let problem =
                OracleProblem::from_text(&pre, &docs, &refs).map_err(|e| CliError::validation(e.to_string()))?;
            Ok(PreparedTask {
                name,
                n,
                budget,
                problem,
                sentences: sentences.clone(),
            })
        })
        .collect()
}

fn build_config(
    n: usize,
    settings: &Preprocessing,
    base_dir: &Path,
    overrides: &Overrides,
) -> Result<PreprocessConfig> {
    let mut config = PreprocessConfig::for_order(n);
    if let Some(s) = settings.stemming {
        config.stemming = s;
    }
    if overrides.no_stem {
        config.stemming = false;
    }
    if let Some(s) = settings.stopword_removal {
        config.stopword_removal = s;
    }
    if overrides.keep_stopwords {
        config.stopword_removal = false;
    }
    if overrides.remove_stopwords {
        config.stopword_removal = true;
    }
    if let Some(l) = settings.lowercase {
        config.lowercase = l;
    }
    config.length_mode = match settings.length.unwrap_or(LengthSetting::RawWords) {
        LengthSetting::RawWords => LengthMode::RawWords,
        LengthSetting::RetainedTokens => LengthMode::RetainedTokens,
    };
    config.reference_scope = match settings.reference_ngrams.unwrap_or(ScopeSetting::PerSentence) {
        ScopeSetting::PerSentence => ReferenceScope::PerSentence,
        ScopeSetting::WholeSummary => ReferenceScope::WholeSummary,
    };

    let mut words: BTreeSet<String> = settings.stopwords.iter().cloned().collect();
    let file = overrides
        .stopword_file
        .clone()
        .or_else(|| settings.stopword_file.as_ref().map(|p| resolve(base_dir, p)));
    if let Some(path) = file {
        words.extend(read_stopword_file(&path)?);
    }
    Ok(config.with_stopwords(words))
}

/// Loads a task from disk; the task name is its `id` or the file stem.
pub fn load_task(path: &Path, overrides: &Overrides) -> Result<Vec<PreparedTask>> {
    let file = TaskFile::load(path)?;
    let name = file.id.clone().unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string())
    });
    let base = path.parent().unwrap_or(Path::new("."));
    prepare(&file, &name, base, overrides).map_err(|e| e.in_task(&name))
}

/// Expands directories into their `*.json` files, sorted by name.
pub fn expand_inputs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut files: Vec<PathBuf> = fs::read_dir(input)
                .map_err(|e| CliError::io(input, e))?
                .filter_map(|entry| entry.ok().map(|e| e.path()))
                .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
                .collect();
            files.sort();
            out.extend(files);
        } else {
            out.push(input.clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_field_reports_line_and_path() {
        let text = "{\n  \"schema_version\": 1,\n  \"preprocessing\": {\n    \"stem\": true\n  }\n}";
        let err = TaskFile::parse(text).unwrap_err().to_string();
        assert!(err.contains("line 4"), "{err}");
        assert!(err.contains("preprocessing.stem"), "{err}");
    }

    #[test]
    fn wrong_schema_version() {
        let err = TaskFile::parse(r#"{"schema_version": 7}"#).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn missing_references_is_validation_error() {
        let file = TaskFile::parse(r#"{"schema_version": 1, "documents": [["a b"]], "l_max": 3}"#).unwrap();
        let err = prepare(&file, "t", Path::new("."), &Overrides::default()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("references"));
    }

    #[test]
    fn per_reference_splits() {
        let file = TaskFile::parse(
            r#"{"schema_version": 1, "documents": [["a b", "c"]], "references": [["a"], ["c"]], "l_max": 3}"#,
        )
        .unwrap();
        let ov = Overrides {
            per_reference: true,
            ..Overrides::default()
        };
        let tasks = prepare(&file, "t", Path::new("."), &ov).unwrap();
        assert_eq!(tasks.len(), 2);
        assert_eq!(tasks[1].name, "t#ref1");
        assert_eq!(tasks[0].problem.bank().denominator(), 1);
    }
}
