//! Turns C source files into code-comment pairs.
//!
//! Each comment becomes one [`CodeCommentPair`] whose code context is the
//! code sharing the comment's lines plus up to `context_lines` following
//! non-blank, non-comment lines, stopping at the first blank line.

mod lexer;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

pub use lexer::{lex, physical_lines, Diagnostic, Lexed, LexedComment, LineInfo};

use crate::dataset::{Label, Source};
use crate::fsutil::sha256_fields;
use crate::ingest::SourceFile;
use crate::par::{self, Execution};

pub const DEFAULT_CONTEXT_LINES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CommentKind {
    #[serde(rename = "single")]
    SingleLine,
    #[serde(rename = "multi")]
    MultiLine,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawComment {
    pub kind: CommentKind,
    /// Comment body with delimiters removed; block comments also lose the
    /// per-line `*` gutter.
    pub text: String,
    /// 1-based.
    pub line_start: usize,
    /// 1-based, inclusive.
    pub line_end: usize,
    pub trailing: bool,
}

/// One comment with the code it documents. The unit of labeling and
/// classification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeCommentPair {
    pub id: String,
    pub repo_id: String,
    pub path: String,
    pub comment: RawComment,
    pub code_context: String,
    pub label: Option<Label>,
    pub source: Source,
    /// Name of the generator for `Source::Generated` pairs.
    pub generator: Option<String>,
}

impl CodeCommentPair {
    /// Digest over repo, path, first line, comment text and context.
    pub fn compute_id(
        repo_id: &str,
        path: &str,
        line_start: usize,
        text: &str,
        context: &str,
    ) -> String {
        let line = line_start.to_string();
        sha256_fields([
            repo_id.as_bytes(),
            path.as_bytes(),
            line.as_bytes(),
            text.as_bytes(),
            context.as_bytes(),
        ])
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Extraction {
    #[serde(skip)]
    pub pairs: Vec<CodeCommentPair>,
    pub diagnostics: Vec<Diagnostic>,
    /// Comments whose text was empty after cleanup (e.g. `/**/`).
    pub dropped_empty: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtractOptions {
    pub context_lines: usize,
    /// Merge runs of whole-line `//` comments separated by at most this many
    /// blank lines. `None` disables merging.
    pub merge_gap: Option<usize>,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        Self {
            context_lines: DEFAULT_CONTEXT_LINES,
            merge_gap: Some(0),
        }
    }
}

/// Cleans a lexed comment into its classifiable text.
pub fn comment_text(c: &LexedComment) -> String {
    match c.kind {
        CommentKind::SingleLine => {
            let mut parts = Vec::new();
            for (i, seg) in c.segments.iter().enumerate() {
                let s = if i == 0 {
                    seg.trim_start_matches('/')
                } else {
                    seg.as_str()
                };
                let s = s.trim();
                if !s.is_empty() {
                    parts.push(s);
                }
            }
            parts.join(" ")
        }
        CommentKind::MultiLine => {
            let lines: Vec<&str> = c
                .segments
                .iter()
                .map(|seg| {
                    let s = seg.trim_start();
                    s.strip_prefix('*').unwrap_or(s).trim()
                })
                .collect();
            let first = lines.iter().position(|l| !l.is_empty());
            let last = lines.iter().rposition(|l| !l.is_empty());
            match (first, last) {
                (Some(a), Some(b)) => lines[a..=b].join("\n"),
                _ => String::new(),
            }
        }
    }
}

/// Code on the comment's own lines followed by up to `context_lines`
/// subsequent code lines. Comment-only lines are skipped; a blank line ends
/// the window.
pub fn code_context(lines: &[LineInfo], start: usize, end: usize, context_lines: usize) -> String {
    let mut parts: Vec<&str> = Vec::new();
    if let Some(l) = lines.get(start) {
        if !l.code.is_empty() {
            parts.push(&l.code);
        }
    }
    if end != start {
        if let Some(l) = lines.get(end) {
            if !l.code.is_empty() {
                parts.push(&l.code);
            }
        }
    }
    let mut taken = 0;
    for l in lines.iter().skip(end + 1) {
        if taken >= context_lines || l.blank {
            break;
        }
        if l.code.is_empty() {
            continue;
        }
        parts.push(&l.code);
        taken += 1;
    }
    parts.join("\n")
}

fn build_pairs(
    file: &SourceFile,
    lexed: &Lexed,
    comments: &[(RawComment, bool)],
    context_lines: usize,
) -> Vec<CodeCommentPair> {
    let mut seen = HashSet::new();
    comments
        .iter()
        .map(|(c, _)| {
            let ctx = code_context(
                &lexed.lines,
                c.line_start - 1,
                c.line_end - 1,
                context_lines,
            );
            let mut id =
                CodeCommentPair::compute_id(&file.repo_id, &file.path, c.line_start, &c.text, &ctx);
            let mut n = 1;
            while !seen.insert(id.clone()) {
                id = CodeCommentPair::compute_id(
                    &file.repo_id,
                    &file.path,
                    c.line_start,
                    &format!("{}#{n}", c.text),
                    &ctx,
                );
                n += 1;
            }
            CodeCommentPair {
                id,
                repo_id: file.repo_id.clone(),
                path: file.path.clone(),
                comment: c.clone(),
                code_context: ctx,
                label: None,
                source: Source::Seed,
                generator: None,
            }
        })
        .collect()
}

fn cleaned(lexed: &Lexed) -> (Vec<(RawComment, bool)>, usize) {
    let mut dropped = 0;
    let mut out = Vec::new();
    for c in &lexed.comments {
        let text = comment_text(c);
        if text.is_empty() {
            dropped += 1;
            continue;
        }
        out.push((
            RawComment {
                kind: c.kind,
                text,
                line_start: c.start + 1,
                line_end: c.end + 1,
                trailing: c.trailing,
            },
            c.unterminated,
        ));
    }
    (out, dropped)
}

/// Every comment of `file` as one pair, ordered by position. Never fails:
/// malformed input is reported through [`Extraction::diagnostics`].
pub fn extract_pairs(file: &SourceFile, context_lines: usize) -> Extraction {
    let lexed = lex(&file.content);
    let (comments, dropped_empty) = cleaned(&lexed);
    Extraction {
        pairs: build_pairs(file, &lexed, &comments, context_lines),
        diagnostics: lexed.diagnostics.clone(),
        dropped_empty,
    }
}

/// Joins runs of whole-line `//` comments on consecutive lines (at most
/// `max_gap` blank lines between them) into single pairs. Trailing comments
/// never merge. The merged pair's context is recomputed from its last line.
pub fn merge_adjacent(
    file: &SourceFile,
    pairs: &[CodeCommentPair],
    max_gap: usize,
    context_lines: usize,
) -> Vec<CodeCommentPair> {
    let lexed = lex(&file.content);
    let mut runs: Vec<(RawComment, bool)> = Vec::with_capacity(pairs.len());
    for p in pairs {
        let c = &p.comment;
        if let Some((prev, _)) = runs.last_mut() {
            let mergeable = prev.kind == CommentKind::SingleLine
                && c.kind == CommentKind::SingleLine
                && !prev.trailing
                && !c.trailing
                && c.line_start > prev.line_end
                && c.line_start - prev.line_end - 1 <= max_gap
                && lexed.lines[prev.line_end..c.line_start - 1]
                    .iter()
                    .all(|l| l.blank);
            if mergeable {
                prev.text.push('\n');
                prev.text.push_str(&c.text);
                prev.line_end = c.line_end;
                continue;
            }
        }
        runs.push((c.clone(), false));
    }
    let mut merged = build_pairs(file, &lexed, &runs, context_lines);
    for (m, p) in merged.iter_mut().zip(runs.iter()) {
        // carry over label/source from the first member of the run
        if let Some(orig) = pairs
            .iter()
            .find(|q| q.comment.line_start == p.0.line_start)
        {
            m.label = orig.label;
            m.source = orig.source;
            m.generator = orig.generator.clone();
        }
    }
    merged
}

/// Extraction with the configured merge step applied.
pub fn extract_file(file: &SourceFile, opts: &ExtractOptions) -> Extraction {
    let mut ex = extract_pairs(file, opts.context_lines);
    if let Some(gap) = opts.merge_gap {
        ex.pairs = merge_adjacent(file, &ex.pairs, gap, opts.context_lines);
    }
    ex
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct FileDiagnostics {
    pub repo_id: String,
    pub path: String,
    pub diagnostics: Vec<Diagnostic>,
    pub dropped_empty: usize,
}

#[derive(Debug, Clone, Default)]
pub struct CorpusExtraction {
    pub pairs: Vec<CodeCommentPair>,
    pub files: Vec<FileDiagnostics>,
}

/// Extracts every file, in parallel when `exec` allows, and orders the
/// result by (repo, path, line_start).
pub fn extract_corpus(
    files: &[SourceFile],
    opts: &ExtractOptions,
    exec: Execution,
) -> CorpusExtraction {
    let extracted = par::map(exec, files, |f| extract_file(f, opts));
    let mut per_file: Vec<(&SourceFile, Extraction)> = files.iter().zip(extracted).collect();
    per_file.sort_by(|a, b| (&a.0.repo_id, &a.0.path).cmp(&(&b.0.repo_id, &b.0.path)));
    let mut out = CorpusExtraction::default();
    for (f, ex) in per_file {
        out.files.push(FileDiagnostics {
            repo_id: f.repo_id.clone(),
            path: f.path.clone(),
            diagnostics: ex.diagnostics,
            dropped_empty: ex.dropped_empty,
        });
        out.pairs.extend(ex.pairs);
    }
    out
}

impl PartialEq for Extraction {
    fn eq(&self, other: &Self) -> bool {
        self.pairs == other.pairs
            && self.diagnostics == other.diagnostics
            && self.dropped_empty == other.dropped_empty
    }
}
