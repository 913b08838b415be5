mod common;

use commentum::dataset::{split, Dataset, Label, Source};
use commentum::eval::{confusion, metrics, ConfusionMatrix};
use commentum::extractor::{extract_file, extract_pairs, ExtractOptions};
use commentum::features::{tokenize, vectorize_tokens, Scheme, Vocabulary};
use commentum::ingest::SourceFile;
use commentum::{CodeCommentPair, CommentKind, RawComment};
use proptest::prelude::*;

fn c_like() -> impl Strategy<Value = String> {
    let atoms = prop::sample::select(vec![
        "/", "*", "\"", "'", "\\", "\n", "\r\n", "a", " ", "x;", "{", "}", "é",
    ]);
    prop::collection::vec(atoms, 0..60).prop_map(|v| v.concat())
}

fn pair(i: usize, comment: String, ctx: String, label: Option<Label>) -> CodeCommentPair {
    CodeCommentPair {
        id: format!("id{i:04}"),
        repo_id: "o/r".into(),
        path: "a.c".into(),
        comment: RawComment {
            kind: CommentKind::MultiLine,
            text: comment,
            line_start: i + 1,
            line_end: i + 2,
            trailing: i.is_multiple_of(2),
        },
        code_context: ctx,
        label,
        source: Source::Seed,
        generator: None,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn comment_count_matches_reference(src in c_like()) {
        let file = SourceFile::new("", "p.c", src.clone());
        let ex = extract_pairs(&file, 3);
        prop_assert_eq!(ex.pairs.len() + ex.dropped_empty, common::reference_comments(&src).len());
    }

    #[test]
    fn extracted_lines_are_in_range(src in c_like()) {
        let file = SourceFile::new("", "p.c", src.clone());
        let n = commentum::extractor::physical_lines(&src).len();
        for p in extract_file(&file, &ExtractOptions::default()).pairs {
            prop_assert!(p.comment.line_start >= 1);
            prop_assert!(p.comment.line_start <= p.comment.line_end);
            prop_assert!(p.comment.line_end <= n.max(1));
            prop_assert!(!p.comment.text.is_empty());
        }
    }

    #[test]
    fn jsonl_round_trip(
        rows in prop::collection::vec((".{0,20}", ".{0,20}", prop::option::of(any::<bool>())), 0..12)
    ) {
        let pairs = rows
            .into_iter()
            .enumerate()
            .map(|(i, (c, x, l))| pair(i, c, x, l.map(Label::from_bool)))
            .collect();
        let ds = Dataset::new("d", pairs).unwrap();
        let text = ds.to_jsonl();
        let back = Dataset::from_jsonl("d", text.as_bytes()).unwrap();
        prop_assert_eq!(back.pairs, ds.pairs);
    }

    #[test]
    fn split_partitions_and_is_deterministic(
        useful in 2usize..60,
        not_useful in 2usize..60,
        unlabeled in 0usize..5,
        ratio in 0.05f64..0.95,
        seed in any::<u64>(),
    ) {
        let mut pairs = Vec::new();
        for i in 0..useful + not_useful + unlabeled {
            let label = if i < useful {
                Some(Label::Useful)
            } else if i < useful + not_useful {
                Some(Label::NotUseful)
            } else {
                None
            };
            pairs.push(pair(i, format!("c{i}"), String::new(), label));
        }
        let ds = Dataset::new("s", pairs).unwrap();
        let a = split(&ds, ratio, seed).unwrap();
        let b = split(&ds, ratio, seed).unwrap();
        prop_assert_eq!(&a, &b);
        let n = useful + not_useful;
        prop_assert_eq!(a.train_ids.len() + a.test_ids.len(), n);
        prop_assert_eq!(a.test_ids.len(), (ratio * n as f64 + 0.5 + 1e-9).floor() as usize);
        let test = a.test_set();
        prop_assert!(a.train_ids.iter().all(|id| !test.contains(id.as_str())));
        for (class, size) in [(Label::Useful, useful), (Label::NotUseful, not_useful)] {
            let k = ds.pairs.iter().filter(|p| p.label == Some(class) && test.contains(p.id.as_str())).count();
            prop_assert!((k as f64 - ratio * size as f64).abs() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn metrics_are_bounded(preds in prop::collection::vec(any::<(bool, bool)>(), 1..100)) {
        let (p, y): (Vec<Label>, Vec<Label>) =
            preds.iter().map(|&(a, b)| (Label::from_bool(a), Label::from_bool(b))).unzip();
        let cm: ConfusionMatrix = confusion(&p, &y).unwrap();
        prop_assert_eq!(cm.total() as usize, preds.len());
        let m = metrics(&cm).unwrap();
        for v in [m.accuracy, m.precision, m.recall, m.f1] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        prop_assert!(m.f1 <= m.precision.max(m.recall) + 1e-12);
        prop_assert!(m.f1 >= m.precision.min(m.recall) - 1e-12 || m.f1 == 0.0);
    }

    #[test]
    fn vectors_are_sorted_and_nonnegative(
        docs in prop::collection::vec("[a-c]{2,4}( [a-c]{0,5}){0,3}", 1..10),
        probe in "[a-d ]{0,20}",
    ) {
        let tokenized: Vec<Vec<String>> = docs.iter().map(|d| tokenize(d)).collect();
        let vocab = Vocabulary::build(&tokenized, 1, 100).unwrap();
        let toks = tokenize(&probe);
        for scheme in [Scheme::Count, Scheme::TfIdf] {
            let v = vectorize_tokens(&toks, &vocab, scheme);
            prop_assert!(v.indices.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(v.values.iter().all(|x| *x >= 0.0 && x.is_finite()));
            prop_assert!(v.indices.iter().all(|&i| (i as usize) < vocab.len()));
        }
    }
}
