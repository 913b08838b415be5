use std::path::Path;

use commentum::dataset::{split, Dataset};
use commentum::eval::{metrics, ConfusionMatrix};
use commentum::extractor::{extract_corpus, ExtractOptions};
use commentum::features::{build_vocab, vectorize_batch, FeatureConfig};
use commentum::ingest::{scan_local, ScanOptions, SourceFile};
use commentum::models::{train_forest, train_knn, ForestConfig, TrainingSet};
use commentum::par::{self, Execution};
use commentum::pipeline::{import_labels, read_labels};
use commentum::Label;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn synthetic() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("test-data/synthetic")
}

/// The synthetic corpus repeated under `copies` distinct repo names; the
/// first copy keeps the original names.
fn corpus(copies: usize) -> Vec<SourceFile> {
    let opts = ScanOptions {
        repo_depth: 2,
        ..ScanOptions::default()
    };
    let base = scan_local(&synthetic().join("corpus"), &opts)
        .unwrap()
        .files;
    (0..copies)
        .flat_map(|k| {
            base.iter().map(move |f| {
                let mut f = f.clone();
                if k > 0 {
                    f.repo_id = format!("{}-{k}", f.repo_id);
                }
                f
            })
        })
        .collect()
}

fn labeled() -> Dataset {
    let files = corpus(1);
    let ex = extract_corpus(&files, &ExtractOptions::default(), Execution::Sequential);
    let ds = Dataset::new("pairs", ex.pairs).unwrap();
    let path = synthetic().join("labels.jsonl");
    let labels = read_labels(
        std::io::BufReader::new(std::fs::File::open(&path).unwrap()),
        &path,
    )
    .unwrap();
    import_labels(&ds, &labels, false).unwrap().0
}

fn bench_extraction(c: &mut Criterion) {
    let files = corpus(50);
    let opts = ExtractOptions::default();
    let mut g = c.benchmark_group("extract_corpus");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| extract_corpus(&files, &opts, exec))
        });
    }
    g.finish();
}

fn bench_models(c: &mut Criterion) {
    let ds = labeled();
    let s = split(&ds, 0.2, 42).unwrap();
    let train_ids = s.train_set();
    let train: Vec<_> = ds
        .pairs
        .iter()
        .filter(|p| train_ids.contains(p.id.as_str()))
        .collect();
    let features = FeatureConfig::default();
    let vocab = build_vocab(&train, features.min_df, features.max_terms).unwrap();
    let train_set = vectorize_batch(&train, &vocab, features.scheme, Execution::Sequential);
    let labels: Vec<Label> = train.iter().map(|p| p.label.unwrap()).collect();
    let data = TrainingSet::new(&train_set.vectors, &labels, train_set.dim);

    let all: Vec<_> = ds.pairs.iter().cycle().take(4000).collect();
    let queries = vectorize_batch(&all, &vocab, features.scheme, Execution::Sequential);
    let mut knn = train_knn(&data, 5).unwrap();
    knn.vocab_digest = Some(vocab.digest());

    let mut g = c.benchmark_group("knn_predict_batch");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| knn.predict_batch(&queries, exec).unwrap())
        });
    }
    g.finish();

    let cfg = ForestConfig {
        n_trees: 50,
        seed: 7,
        ..ForestConfig::default()
    };
    let mut g = c.benchmark_group("train_forest");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| train_forest(&data, &cfg, exec).unwrap())
        });
    }
    g.finish();
}

fn bench_metric_sweep(c: &mut Criterion) {
    let mut g = c.benchmark_group("metric_sweep");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                par::map_range(exec, 21 * 21 * 21, |i| {
                    let (tp, fp, fn_) = ((i / 441) as u64, (i / 21 % 21) as u64, (i % 21) as u64);
                    (0..=20u64)
                        .filter_map(|tn| metrics(&ConfusionMatrix { tp, fp, fn_, tn }).ok())
                        .map(|m| m.f1)
                        .sum::<f64>()
                })
            })
        });
    }
    g.finish();
}

criterion_group!(benches, bench_extraction, bench_models, bench_metric_sweep);
criterion_main!(benches);
