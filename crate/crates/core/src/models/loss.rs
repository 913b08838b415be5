use super::ModelError;
use crate::dataset::Label;

/// Probabilities are clamped to `[PROB_CLAMP, 1 - PROB_CLAMP]` before the log.
pub const PROB_CLAMP: f64 = 1e-12;

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Mean binary cross-entropy of sigmoid(score) against the labels.
pub fn cross_entropy_loss(scores: &[f64], labels: &[Label]) -> Result<f64, ModelError> {
    if scores.len() != labels.len() {
        return Err(ModelError::LengthMismatch {
            scores: scores.len(),
            labels: labels.len(),
        });
    }
    if scores.is_empty() {
        return Err(ModelError::EmptyBatch);
    }
    let total: f64 = scores
        .iter()
        .zip(labels)
        .map(|(&s, &y)| {
            // probability assigned to the true class
            let p = match y {
                Label::Useful => sigmoid(s),
                Label::NotUseful => sigmoid(-s),
            };
            -p.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP).ln()
        })
        .sum();
    Ok(total / scores.len() as f64)
}

/// Inverse of the sigmoid, for building scores from probabilities.
pub fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn half_probability() {
        let l = cross_entropy_loss(&[0.0], &[Label::Useful]).unwrap();
        assert!((l - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn saturated_agreement_is_near_zero() {
        let l = cross_entropy_loss(&[40.0], &[Label::Useful]).unwrap();
        assert!(l <= 1e-12 + f64::EPSILON);
    }

    #[test]
    fn two_sample_mean() {
        let scores = [logit(0.9), logit(0.2)];
        let l = cross_entropy_loss(&scores, &[Label::Useful, Label::NotUseful]).unwrap();
        let expected = -0.5 * (0.9f64.ln() + 0.8f64.ln());
        assert!((l - expected).abs() < 1e-12);
        assert!((l - 0.164252).abs() < 1e-6);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            cross_entropy_loss(&[0.0], &[]),
            Err(ModelError::LengthMismatch { .. })
        ));
        assert!(matches!(
            cross_entropy_loss(&[], &[]),
            Err(ModelError::EmptyBatch)
        ));
    }

    #[test]
    fn sigmoid_is_stable() {
        assert_eq!(sigmoid(-1000.0), 0.0);
        assert_eq!(sigmoid(1000.0), 1.0);
        assert_eq!(sigmoid(0.0), 0.5);
    }

    proptest! {
        #[test]
        fn loss_non_negative_and_finite(pairs in prop::collection::vec((-800.0f64..800.0, any::<bool>()), 1..20)) {
            let scores: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let labels: Vec<Label> = pairs.iter().map(|p| Label::from_bool(p.1)).collect();
            let l = cross_entropy_loss(&scores, &labels).unwrap();
            prop_assert!(l >= 0.0 && l.is_finite());
            prop_assert!(l <= -(PROB_CLAMP.ln()) + 1e-9);
        }
    }
}
