#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::OnceLock;

use commentum::extractor::{extract_file, ExtractOptions};
use commentum::ingest::SourceFile;
use commentum::CodeCommentPair;
use regex::Regex;
use serde_json::{json, Value};

pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("test-data")
}

pub fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_commentum"))
}

pub fn run_cli(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .env_remove("COMMENTUM_GITHUB_TOKEN")
        .output()
        .expect("spawn commentum")
}

pub struct Fixture {
    pub name: String,
    pub source: PathBuf,
    pub content: String,
    pub golden: Vec<Value>,
    pub diagnostics: Option<Value>,
}

/// Every `NN_name.c` in the extraction fixture directory with its golden
/// output, sorted by name.
pub fn extraction_fixtures() -> Vec<Fixture> {
    let dir = data_dir().join("extract");
    let mut names: Vec<PathBuf> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "c"))
        .collect();
    names.sort();
    names
        .into_iter()
        .map(|source| {
            let stem = source.file_stem().unwrap().to_string_lossy().into_owned();
            let golden_text = std::fs::read_to_string(dir.join(format!("{stem}.golden.jsonl")))
                .unwrap_or_else(|_| panic!("missing golden for {stem}"));
            let golden = golden_text
                .lines()
                .filter(|l| !l.trim().is_empty())
                .map(|l| serde_json::from_str(l).unwrap())
                .collect();
            let diagnostics = std::fs::read_to_string(dir.join(format!("{stem}.diagnostics.json")))
                .ok()
                .map(|t| serde_json::from_str(&t).unwrap());
            let content = String::from_utf8(std::fs::read(&source).unwrap()).unwrap();
            Fixture {
                name: stem,
                source,
                content,
                golden,
                diagnostics,
            }
        })
        .collect()
}

pub fn golden_view(p: &CodeCommentPair) -> Value {
    json!({
        "kind": p.comment.kind,
        "line_start": p.comment.line_start,
        "line_end": p.comment.line_end,
        "trailing": p.comment.trailing,
        "comment": p.comment.text,
        "code_context": p.code_context,
    })
}

/// Compares one fixture against its golden file; returns a description of
/// the first mismatch.
pub fn check_fixture(f: &Fixture) -> Result<(), String> {
    let file = SourceFile::new("", &format!("{}.c", f.name), f.content.clone());
    let ex = extract_file(&file, &ExtractOptions::default());
    let got: Vec<Value> = ex.pairs.iter().map(golden_view).collect();
    if got != f.golden {
        return Err(format!(
            "{}: pairs differ\n  got:    {}\n  golden: {}",
            f.name,
            serde_json::to_string(&got).unwrap(),
            serde_json::to_string(&f.golden).unwrap()
        ));
    }
    let diags = serde_json::to_value(&ex.diagnostics).unwrap();
    let expected = f.diagnostics.clone().unwrap_or(json!([]));
    if diags != expected {
        return Err(format!("{}: diagnostics {diags} != {expected}", f.name));
    }
    Ok(())
}

/// A comment found by the reference tokenizer: 1-based start line and kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefComment {
    pub line: usize,
    pub block: bool,
}

fn token_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(concat!(
            r#"(?P<block>/\*(?s:.*?)(?:\*/|\z))"#,
            r#"|(?P<line>//(?:\\\r?\n|[^\n])*)"#,
            r#"|(?P<str>"(?:\\\r?\n|\\\\\r?\n|\\[^\n]|[^"\\\n])*"?)"#,
            r#"|(?P<chr>'(?:\\\r?\n|\\\\\r?\n|\\[^\n]|[^'\\\n])*'?)"#,
            r#"|(?s:.)"#,
        ))
        .unwrap()
    })
}

/// Independent regex-based C tokenizer that only reports comments. A
/// literal whose line ends in a backslash continues on the next line.
pub fn reference_comments(src: &str) -> Vec<RefComment> {
    let mut out = Vec::new();
    for caps in token_re().captures_iter(src) {
        let (m, block) = match (caps.name("block"), caps.name("line")) {
            (Some(m), _) => (m, true),
            (None, Some(m)) => (m, false),
            _ => continue,
        };
        let line = src[..m.start()].matches('\n').count() + 1;
        out.push(RefComment { line, block });
    }
    out
}

pub fn synthetic_dir() -> PathBuf {
    data_dir().join("synthetic")
}

pub fn assert_ok(o: &Output, what: &str) {
    assert!(
        o.status.success(),
        "{what} exited {:?}\nstdout: {}\nstderr: {}",
        o.status.code(),
        String::from_utf8_lossy(&o.stdout),
        String::from_utf8_lossy(&o.stderr)
    );
}

/// Outputs of one full offline pipeline run.
pub struct PipelineRun {
    pub pairs: Vec<u8>,
    pub report_json: Vec<u8>,
    pub report_md: Vec<u8>,
}

/// extract -> label --import -> train (nb, logreg, svm, tree) -> compare,
/// all through the binary, inside `work`.
pub fn run_pipeline(work: &Path) -> Result<PipelineRun, String> {
    let syn = synthetic_dir();
    let run_dir = work.join("run");
    let pairs = run_dir.join("pairs.jsonl");
    let generated = work.join("generated.jsonl");
    std::fs::create_dir_all(&run_dir).map_err(|e| e.to_string())?;
    std::fs::copy(syn.join("generated.jsonl"), &generated).map_err(|e| e.to_string())?;
    let s = |p: &Path| p.to_str().unwrap().to_string();

    let step = |args: Vec<String>| -> Result<(), String> {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let o = run_cli(&refs);
        if o.status.success() {
            Ok(())
        } else {
            Err(format!(
                "`commentum {}` exited {:?}: {}",
                args.join(" "),
                o.status.code(),
                String::from_utf8_lossy(&o.stderr)
            ))
        }
    };

    step(vec![
        "extract".into(),
        "--in".into(),
        s(&syn.join("corpus")),
        "--out".into(),
        s(&pairs),
    ])?;
    let unlabeled = std::fs::read(&pairs).map_err(|e| e.to_string())?;
    step(vec![
        "label".into(),
        "--dataset".into(),
        s(&pairs),
        "--import".into(),
        s(&syn.join("labels.jsonl")),
    ])?;
    for alg in ["nb", "logreg", "svm", "tree"] {
        step(vec![
            "train".into(),
            "--dataset".into(),
            s(&pairs),
            "--algorithm".into(),
            alg.into(),
            "--out".into(),
            s(&work.join(format!("models/{alg}.json"))),
        ])?;
    }
    let report = work.join("reports/report.json");
    step(vec![
        "compare".into(),
        "--seed".into(),
        s(&pairs),
        "--generated".into(),
        s(&generated),
        "--algorithms".into(),
        "nb,logreg,svm,tree".into(),
        "--seed-rng".into(),
        "42".into(),
        "--out".into(),
        s(&report),
    ])?;
    Ok(PipelineRun {
        pairs: unlabeled,
        report_json: std::fs::read(&report).map_err(|e| e.to_string())?,
        report_md: std::fs::read(report.with_extension("md")).map_err(|e| e.to_string())?,
    })
}
