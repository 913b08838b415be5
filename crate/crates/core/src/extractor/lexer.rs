//! Single-pass, line-oriented C comment lexer.
//!
//! Recognizes `//` and `/* */` comments while skipping string and character
//! literals (with `\` escapes). Backslash-newline continues `//` comments and
//! string/char literals onto the next physical line. No trigraphs, digraphs or
//! preprocessing: comments inside `#if 0` are still reported.

use serde::{Deserialize, Serialize};

use super::CommentKind;

/// A comment as found in the source, before text cleanup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexedComment {
    pub kind: CommentKind,
    /// Raw body segments, one per physical line, delimiters removed.
    pub segments: Vec<String>,
    /// 0-based physical line of the opening delimiter.
    pub start: usize,
    /// 0-based physical line holding the last character of the comment.
    pub end: usize,
    /// Code (non-whitespace) precedes the comment on its first line.
    pub trailing: bool,
    /// Block comment ran into end of file.
    pub unterminated: bool,
}

/// Per-line view used to attach code context.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LineInfo {
    /// The line holds only whitespace.
    pub blank: bool,
    /// The line's characters outside comments, each comment replaced by one
    /// space, trimmed.
    pub code: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Diagnostic {
    /// `/*` without a matching `*/`; the partial comment is still emitted.
    UnterminatedComment { line: usize },
    /// String or char literal not closed before end of line.
    UnterminatedString { line: usize },
}

#[derive(Debug, Clone, Default)]
pub struct Lexed {
    pub lines: Vec<LineInfo>,
    pub comments: Vec<LexedComment>,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum State {
    Code,
    LineComment,
    BlockComment,
    Str(char),
}

/// Splits into physical lines; `\r\n` and `\n` terminators are accepted.
pub fn physical_lines(content: &str) -> Vec<&str> {
    if content.is_empty() {
        return Vec::new();
    }
    let mut lines: Vec<&str> = content
        .split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .collect();
    if content.ends_with('\n') {
        lines.pop();
    }
    lines
}

pub fn lex(content: &str) -> Lexed {
    let raw_lines = physical_lines(content);
    let mut out = Lexed {
        lines: Vec::with_capacity(raw_lines.len()),
        ..Lexed::default()
    };
    let mut state = State::Code;
    let mut open: Option<LexedComment> = None;

    for (ln, line) in raw_lines.iter().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let continued = chars.last() == Some(&'\\');
        let mut code = String::new();
        let mut j = 0;

        match state {
            State::LineComment => {
                let c = open.as_mut().expect("open line comment");
                let body = if continued {
                    &chars[..chars.len() - 1]
                } else {
                    &chars[..]
                };
                c.segments.push(body.iter().collect());
                c.end = ln;
                j = chars.len();
                if !continued {
                    out.comments.push(open.take().unwrap());
                    state = State::Code;
                }
                code.push(' ');
            }
            State::BlockComment => {
                j = scan_block_body(&chars, 0, ln, &mut open, &mut out.comments, &mut state);
                code.push(' ');
            }
            _ => {}
        }

        while j < chars.len() {
            let c = chars[j];
            match state {
                State::Code => {
                    let next = chars.get(j + 1).copied();
                    if c == '"' || c == '\'' {
                        state = State::Str(c);
                        code.push(c);
                        j += 1;
                    } else if c == '/' && next == Some('/') {
                        let trailing = !code.trim().is_empty();
                        let body_end = if continued {
                            chars.len() - 1
                        } else {
                            chars.len()
                        };
                        let body: String = chars[(j + 2).min(body_end)..body_end].iter().collect();
                        let comment = LexedComment {
                            kind: CommentKind::SingleLine,
                            segments: vec![body],
                            start: ln,
                            end: ln,
                            trailing,
                            unterminated: false,
                        };
                        code.push(' ');
                        if continued {
                            open = Some(comment);
                            state = State::LineComment;
                        } else {
                            out.comments.push(comment);
                        }
                        j = chars.len();
                    } else if c == '/' && next == Some('*') {
                        let trailing = !code.trim().is_empty();
                        open = Some(LexedComment {
                            kind: CommentKind::MultiLine,
                            segments: Vec::new(),
                            start: ln,
                            end: ln,
                            trailing,
                            unterminated: false,
                        });
                        state = State::BlockComment;
                        code.push(' ');
                        j = scan_block_body(
                            &chars,
                            j + 2,
                            ln,
                            &mut open,
                            &mut out.comments,
                            &mut state,
                        );
                    } else {
                        code.push(c);
                        j += 1;
                    }
                }
                State::Str(quote) => {
                    code.push(c);
                    if c == '\\' {
                        if let Some(&n) = chars.get(j + 1) {
                            code.push(n);
                        }
                        j += 2;
                    } else {
                        if c == quote {
                            state = State::Code;
                        }
                        j += 1;
                    }
                }
                State::LineComment | State::BlockComment => unreachable!("handled above"),
            }
        }

        if let State::Str(_) = state {
            if !continued {
                out.diagnostics
                    .push(Diagnostic::UnterminatedString { line: ln + 1 });
                state = State::Code;
            }
        }

        out.lines.push(LineInfo {
            blank: line.trim().is_empty(),
            code: code.trim().to_string(),
        });
    }

    if let Some(mut c) = open.take() {
        if state == State::BlockComment {
            c.unterminated = true;
            out.diagnostics
                .push(Diagnostic::UnterminatedComment { line: c.start + 1 });
        }
        out.comments.push(c);
    }
    out
}

/// Consumes block-comment text from `from`; returns the index just past the
/// closing `*/`, or the line length if the comment continues.
fn scan_block_body(
    chars: &[char],
    from: usize,
    ln: usize,
    open: &mut Option<LexedComment>,
    done: &mut Vec<LexedComment>,
    state: &mut State,
) -> usize {
    let c = open.as_mut().expect("open block comment");
    c.end = ln;
    let mut k = from;
    while k + 1 < chars.len() {
        if chars[k] == '*' && chars[k + 1] == '/' {
            c.segments.push(chars[from.min(k)..k].iter().collect());
            done.push(open.take().unwrap());
            *state = State::Code;
            return k + 2;
        }
        k += 1;
    }
    c.segments
        .push(chars[from.min(chars.len())..].iter().collect());
    chars.len()
}
