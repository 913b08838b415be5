//! Multinomial naive Bayes with additive (Laplace) smoothing.

use super::{Algorithm, ModelError, ModelParams, TrainedModel, TrainingSet};
use crate::features::FeatureVector;

pub const DEFAULT_ALPHA: f64 = 1.0;

/// Smallest per-term probability; keeps scores finite when `alpha == 0`.
const MIN_PROB: f64 = 1e-300;

pub fn train_nb(data: &TrainingSet<'_>, alpha: f64) -> Result<TrainedModel, ModelError> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(ModelError::InvalidConfig(format!(
            "alpha must be >= 0, got {alpha}"
        )));
    }
    let counts = data.require_both_classes()?;
    let n = data.len() as f64;
    let log_prior = [(counts[0] as f64 / n).ln(), (counts[1] as f64 / n).ln()];

    let mut term_mass = [vec![0.0; data.dim], vec![0.0; data.dim]];
    for (x, y) in data.vectors.iter().zip(data.labels) {
        let row = &mut term_mass[y.as_u8() as usize];
        for (i, v) in x.iter() {
            row[i] += v;
        }
    }
    let v = data.dim as f64;
    let log_likelihood = term_mass.map(|row| {
        let total: f64 = row.iter().sum();
        let denom = total + alpha * v;
        row.iter()
            .map(|&c| {
                let p = if denom > 0.0 {
                    (c + alpha) / denom
                } else {
                    1.0 / v
                };
                p.max(MIN_PROB).ln()
            })
            .collect()
    });
    Ok(TrainedModel {
        algorithm: Algorithm::NaiveBayes,
        vocab_digest: None,
        train_config: None,
        parameters: ModelParams::NaiveBayes {
            log_prior,
            log_likelihood,
        },
    })
}

/// Log-posterior difference, class 1 minus class 0.
pub(crate) fn score(
    log_prior: &[f64; 2],
    log_likelihood: &[Vec<f64>; 2],
    x: &FeatureVector,
) -> f64 {
    let class =
        |c: usize| log_prior[c] + x.iter().map(|(i, v)| v * log_likelihood[c][i]).sum::<f64>();
    class(1) - class(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Label;

    #[test]
    fn hand_posterior() {
        // vocab {good, clear, bad}; class 1 doc "good clear", class 0 doc "bad"
        let xs = vec![
            FeatureVector::from_dense(&[1.0, 1.0, 0.0]),
            FeatureVector::from_dense(&[0.0, 0.0, 1.0]),
        ];
        let ys = vec![Label::Useful, Label::NotUseful];
        let m = train_nb(&TrainingSet::new(&xs, &ys, 3), 1.0).unwrap();
        let q = FeatureVector::from_dense(&[1.0, 0.0, 0.0]);
        let p = m.predict("", &q).unwrap();
        let expected = (0.5f64 * 2.0 / 5.0).ln() - (0.5f64 * 1.0 / 4.0).ln();
        assert!((p.score - expected).abs() < 1e-12);
        assert_eq!(p.label, Label::Useful);
    }

    #[test]
    fn empty_vector_uses_prior() {
        let xs = vec![
            FeatureVector::from_dense(&[1.0, 0.0]),
            FeatureVector::from_dense(&[1.0, 0.0]),
            FeatureVector::from_dense(&[0.0, 1.0]),
        ];
        let ys = vec![Label::NotUseful, Label::NotUseful, Label::Useful];
        let m = train_nb(&TrainingSet::new(&xs, &ys, 2), 1.0).unwrap();
        let p = m.predict("", &FeatureVector::default()).unwrap();
        assert_eq!(p.label, Label::NotUseful);
        assert!((p.score - ((1.0f64 / 3.0).ln() - (2.0f64 / 3.0).ln())).abs() < 1e-12);
    }

    #[test]
    fn symmetric_tie_goes_to_not_useful() {
        let xs = vec![
            FeatureVector::from_dense(&[1.0, 0.0]),
            FeatureVector::from_dense(&[0.0, 1.0]),
        ];
        let ys = vec![Label::Useful, Label::NotUseful];
        let m = train_nb(&TrainingSet::new(&xs, &ys, 2), 1.0).unwrap();
        let p = m
            .predict("", &FeatureVector::from_dense(&[1.0, 1.0]))
            .unwrap();
        assert_eq!(p.score, 0.0);
        assert_eq!(p.label, Label::NotUseful);
    }

    #[test]
    fn zero_alpha_stays_finite() {
        let xs = vec![
            FeatureVector::from_dense(&[1.0, 0.0]),
            FeatureVector::from_dense(&[0.0, 1.0]),
        ];
        let ys = vec![Label::Useful, Label::NotUseful];
        let m = train_nb(&TrainingSet::new(&xs, &ys, 2), 0.0).unwrap();
        let p = m
            .predict("", &FeatureVector::from_dense(&[3.0, 1.0]))
            .unwrap();
        assert!(p.score.is_finite());
        assert!(train_nb(&TrainingSet::new(&xs, &ys, 2), -1.0).is_err());
    }
}
