use super::{Algorithm, ModelError, ModelParams, TrainedModel, TrainingSet};
use crate::dataset::Label;
use crate::features::FeatureVector;

pub const DEFAULT_K: usize = 5;

/// Stores the training set; prediction is a majority vote of the `k`
/// nearest points under Euclidean distance.
pub fn train_knn(data: &TrainingSet<'_>, k: usize) -> Result<TrainedModel, ModelError> {
    if k == 0 {
        return Err(ModelError::InvalidConfig("k must be >= 1".into()));
    }
    data.require_both_classes()?;
    Ok(TrainedModel {
        algorithm: Algorithm::Knn,
        vocab_digest: None,
        train_config: None,
        parameters: ModelParams::Knn {
            k,
            vectors: data.vectors.to_vec(),
            labels: data.labels.to_vec(),
        },
    })
}

/// (useful votes - not-useful votes) / k over the nearest neighbours;
/// distance ties go to the earlier training point.
pub(crate) fn score(
    k: usize,
    vectors: &[FeatureVector],
    labels: &[Label],
    x: &FeatureVector,
) -> f64 {
    let mut dist: Vec<(f64, usize)> = vectors.iter().map(|v| v.sq_distance(x)).zip(0..).collect();
    let k = k.min(dist.len());
    if k == 0 {
        return 0.0;
    }
    let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if k < dist.len() {
        dist.select_nth_unstable_by(k - 1, cmp);
    }
    let votes: f64 = dist[..k]
        .iter()
        .map(|&(_, i)| match labels[i] {
            Label::Useful => 1.0,
            Label::NotUseful => -1.0,
        })
        .sum();
    votes / k as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data() -> (Vec<FeatureVector>, Vec<Label>) {
        (
            vec![
                FeatureVector::from_dense(&[1.0, 0.0]),
                FeatureVector::from_dense(&[0.0, 1.0]),
                FeatureVector::from_dense(&[0.9, 0.1]),
                FeatureVector::from_dense(&[0.1, 0.9]),
            ],
            vec![
                Label::Useful,
                Label::NotUseful,
                Label::Useful,
                Label::NotUseful,
            ],
        )
    }

    #[test]
    fn k1_returns_identical_points_label() {
        let (xs, ys) = data();
        let m = train_knn(&TrainingSet::new(&xs, &ys, 2), 1).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert_eq!(m.predict("", x).unwrap().label, *y);
        }
    }

    #[test]
    fn even_vote_ties_to_not_useful() {
        let (xs, ys) = data();
        let m = train_knn(&TrainingSet::new(&xs, &ys, 2), 4).unwrap();
        let p = m
            .predict("", &FeatureVector::from_dense(&[0.5, 0.5]))
            .unwrap();
        assert_eq!(p.score, 0.0);
        assert_eq!(p.label, Label::NotUseful);
    }

    #[test]
    fn k_larger_than_training_set() {
        let (xs, ys) = data();
        let m = train_knn(&TrainingSet::new(&xs, &ys, 2), 50).unwrap();
        assert_eq!(m.predict("", &xs[0]).unwrap().score, 0.0);
        assert!(train_knn(&TrainingSet::new(&xs, &ys, 2), 0).is_err());
    }
}
