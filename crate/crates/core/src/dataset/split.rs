use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Dataset, DatasetError};

pub const DEFAULT_RATIO: f64 = 0.2;

/// Train/test partition of the labeled pairs. Ids are listed in dataset
/// order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitAssignment {
    pub seed: u64,
    pub ratio: f64,
    pub train_ids: Vec<String>,
    pub test_ids: Vec<String>,
}

impl SplitAssignment {
    pub fn test_set(&self) -> HashSet<&str> {
        self.test_ids.iter().map(String::as_str).collect()
    }

    pub fn train_set(&self) -> HashSet<&str> {
        self.train_ids.iter().map(String::as_str).collect()
    }
}

fn round_half_up(x: f64) -> usize {
    (x + 0.5 + 1e-9).floor().max(0.0) as usize
}

/// Test-set size per class: the total is `round(ratio * n)` (half up) and is
/// shared out by largest remainder, so each class deviates from
/// `ratio * n_class` by less than one pair.
pub fn stratified_test_counts(class_sizes: &[usize], ratio: f64) -> Vec<usize> {
    let n: usize = class_sizes.iter().sum();
    let total = round_half_up(ratio * n as f64);
    let exact: Vec<f64> = class_sizes.iter().map(|&c| ratio * c as f64).collect();
    let mut counts: Vec<usize> = exact.iter().map(|e| (e + 1e-9).floor() as usize).collect();
    let mut remaining = total.saturating_sub(counts.iter().sum());
    let mut order: Vec<usize> = (0..class_sizes.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = exact[a] - counts[a] as f64;
        let fb = exact[b] - counts[b] as f64;
        fb.partial_cmp(&fa).unwrap().then(a.cmp(&b))
    });
    for &k in order.iter().cycle().take(order.len() * 2) {
        if remaining == 0 {
            break;
        }
        if counts[k] < class_sizes[k] {
            counts[k] += 1;
            remaining -= 1;
        }
    }
    counts
}

/// Stratified, seed-deterministic split of the labeled pairs.
pub fn split(dataset: &Dataset, ratio: f64, seed: u64) -> Result<SplitAssignment, DatasetError> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(DatasetError::BadRatio(ratio));
    }
    let mut by_class: [Vec<&str>; 2] = [Vec::new(), Vec::new()];
    for p in dataset.labeled() {
        by_class[p.label.unwrap().as_u8() as usize].push(&p.id);
    }
    let [not_useful, useful] = &by_class;
    if not_useful.len() < 2 || useful.len() < 2 {
        return Err(DatasetError::InsufficientLabels {
            needed: 2,
            useful: useful.len(),
            not_useful: not_useful.len(),
        });
    }
    let counts = stratified_test_counts(&[not_useful.len(), useful.len()], ratio);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut test: HashSet<&str> = HashSet::new();
    for (class, k) in by_class.iter_mut().zip(counts) {
        class.shuffle(&mut rng);
        test.extend(class.iter().take(k).copied());
    }
    let (mut train_ids, mut test_ids) = (Vec::new(), Vec::new());
    for p in dataset.labeled() {
        if test.contains(p.id.as_str()) {
            test_ids.push(p.id.clone());
        } else {
            train_ids.push(p.id.clone());
        }
    }
    Ok(SplitAssignment {
        seed,
        ratio,
        train_ids,
        test_ids,
    })
}

#[cfg(test)]
mod tests {
    use super::super::testutil::pair;
    use super::super::{Label, Source};
    use super::*;

    fn labeled(useful: usize, not: usize, unlabeled: usize) -> Dataset {
        let mut pairs = Vec::new();
        for i in 0..useful {
            pairs.push(pair(
                &format!("u{i}"),
                "c",
                "",
                Some(Label::Useful),
                Source::Seed,
            ));
        }
        for i in 0..not {
            pairs.push(pair(
                &format!("n{i}"),
                "c",
                "",
                Some(Label::NotUseful),
                Source::Seed,
            ));
        }
        for i in 0..unlabeled {
            pairs.push(pair(&format!("x{i}"), "c", "", None, Source::Seed));
        }
        Dataset::new("t", pairs).unwrap()
    }

    #[test]
    fn ten_pairs_one_per_class() {
        let d = labeled(6, 4, 0);
        let s = split(&d, 0.2, 7).unwrap();
        assert_eq!(s.test_ids.len(), 2);
        assert_eq!(s.train_ids.len(), 8);
        assert_eq!(s.test_ids.iter().filter(|i| i.starts_with('u')).count(), 1);
    }

    #[test]
    fn counts_for_large_dataset() {
        for useful in [1, 100, 4524, 6000, 9000 - 2] {
            let c = stratified_test_counts(&[9048 - useful, useful], 0.2);
            assert_eq!(c.iter().sum::<usize>(), 1810, "useful={useful}");
        }
    }

    #[test]
    fn seeds_differ_sizes_equal() {
        let d = labeled(30, 20, 5);
        let a = split(&d, 0.2, 1).unwrap();
        let b = split(&d, 0.2, 2).unwrap();
        assert_ne!(a.test_ids, b.test_ids);
        assert_eq!(a.test_ids.len(), b.test_ids.len());
        assert_eq!(a, split(&d, 0.2, 1).unwrap());
        assert_eq!(a.train_ids.len() + a.test_ids.len(), 50);
    }

    #[test]
    fn insufficient_and_bad_ratio() {
        assert!(matches!(
            split(&labeled(5, 1, 0), 0.2, 0),
            Err(DatasetError::InsufficientLabels { .. })
        ));
        assert!(matches!(
            split(&labeled(5, 5, 0), 1.0, 0),
            Err(DatasetError::BadRatio(_))
        ));
        assert!(matches!(
            split(&labeled(5, 5, 0), 0.0, 0),
            Err(DatasetError::BadRatio(_))
        ));
    }
}
