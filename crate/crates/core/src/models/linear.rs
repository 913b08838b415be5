//! Logistic regression and linear SVM trained by mini-batch (sub)gradient
//! descent with gradient accumulation.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::loss::{cross_entropy_loss, sigmoid};
use super::{Algorithm, ModelError, ModelParams, TrainConfig, TrainedModel, TrainingSet};
use crate::dataset::Label;
use crate::features::FeatureVector;

pub(crate) fn score(weights: &[f64], bias: f64, x: &FeatureVector) -> f64 {
    x.dot_dense(weights) + bias
}

fn signed(y: Label) -> f64 {
    match y {
        Label::Useful => 1.0,
        Label::NotUseful => -1.0,
    }
}

fn l2_penalty(w: &[f64], l2: f64) -> f64 {
    0.5 * l2 * w.iter().map(|v| v * v).sum::<f64>()
}

/// Mean cross-entropy over the batch plus `l2 * |w|^2 / 2` (bias excluded).
pub fn logreg_objective(w: &[f64], b: f64, xs: &[FeatureVector], ys: &[Label], l2: f64) -> f64 {
    let scores: Vec<f64> = xs.iter().map(|x| score(w, b, x)).collect();
    cross_entropy_loss(&scores, ys).expect("non-empty aligned batch") + l2_penalty(w, l2)
}

/// Analytic gradient of [`logreg_objective`] (unclamped region).
pub fn logreg_gradient(
    w: &[f64],
    b: f64,
    xs: &[FeatureVector],
    ys: &[Label],
    l2: f64,
) -> (Vec<f64>, f64) {
    let mut g: Vec<f64> = w.iter().map(|v| l2 * v).collect();
    let gb = accumulate_logreg(
        w,
        b,
        xs.iter().zip(ys.iter()),
        1.0 / xs.len() as f64,
        &mut g,
    );
    (g, gb)
}

/// Adds `scale * sum (sigmoid(s) - y) x` into `g`; returns the bias part.
fn accumulate_logreg<'a>(
    w: &[f64],
    b: f64,
    batch: impl Iterator<Item = (&'a FeatureVector, &'a Label)>,
    scale: f64,
    g: &mut [f64],
) -> f64 {
    let mut gb = 0.0;
    for (x, &y) in batch {
        let r = (sigmoid(score(w, b, x)) - y.as_u8() as f64) * scale;
        for (i, v) in x.iter() {
            g[i] += r * v;
        }
        gb += r;
    }
    gb
}

/// Mean hinge loss `max(0, 1 - y (w.x + b))`, y in {-1, +1}, plus
/// `l2 * |w|^2 / 2`.
pub fn svm_objective(w: &[f64], b: f64, xs: &[FeatureVector], ys: &[Label], l2: f64) -> f64 {
    let hinge: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, &y)| (1.0 - signed(y) * score(w, b, x)).max(0.0))
        .sum();
    hinge / xs.len() as f64 + l2_penalty(w, l2)
}

/// Sub-gradient of [`svm_objective`]; exact away from margin kinks.
pub fn svm_gradient(
    w: &[f64],
    b: f64,
    xs: &[FeatureVector],
    ys: &[Label],
    l2: f64,
) -> (Vec<f64>, f64) {
    let mut g: Vec<f64> = w.iter().map(|v| l2 * v).collect();
    let gb = accumulate_svm(
        w,
        b,
        xs.iter().zip(ys.iter()),
        1.0 / xs.len() as f64,
        &mut g,
    );
    (g, gb)
}

fn accumulate_svm<'a>(
    w: &[f64],
    b: f64,
    batch: impl Iterator<Item = (&'a FeatureVector, &'a Label)>,
    scale: f64,
    g: &mut [f64],
) -> f64 {
    let mut gb = 0.0;
    for (x, &y) in batch {
        let ys = signed(y);
        if ys * score(w, b, x) < 1.0 {
            for (i, v) in x.iter() {
                g[i] -= ys * v * scale;
            }
            gb -= ys * scale;
        }
    }
    gb
}

fn fit<F>(data: &TrainingSet<'_>, cfg: &TrainConfig, accumulate: F) -> (Vec<f64>, f64)
where
    F: Fn(&[f64], f64, &[usize], f64, &mut [f64]) -> f64,
{
    let mut w = vec![0.0; data.dim];
    let mut b = 0.0;
    let mut grad = vec![0.0; data.dim];
    let mut grad_b = 0.0;
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut pending = 0;
        for batch in order.chunks(cfg.batch_size) {
            grad_b += accumulate(&w, b, batch, 1.0 / batch.len() as f64, &mut grad);
            pending += 1;
            if pending == cfg.grad_accum {
                apply(&mut w, &mut b, &mut grad, &mut grad_b, pending, cfg);
                pending = 0;
            }
        }
        if pending > 0 {
            apply(&mut w, &mut b, &mut grad, &mut grad_b, pending, cfg);
        }
    }
    (w, b)
}

/// One step along the averaged accumulated gradient. The L2 term is added
/// here: `w` is constant across the accumulated batches, so its average
/// equals `l2 * w`.
fn apply(
    w: &mut [f64],
    b: &mut f64,
    grad: &mut [f64],
    grad_b: &mut f64,
    pending: usize,
    cfg: &TrainConfig,
) {
    let inv = 1.0 / pending as f64;
    for (wi, gi) in w.iter_mut().zip(grad.iter_mut()) {
        *wi -= cfg.learning_rate * (*gi * inv + cfg.l2 * *wi);
        *gi = 0.0;
    }
    *b -= cfg.learning_rate * *grad_b * inv;
    *grad_b = 0.0;
}

pub fn train_logreg(data: &TrainingSet<'_>, cfg: &TrainConfig) -> Result<TrainedModel, ModelError> {
    cfg.validate()?;
    data.require_both_classes()?;
    let (weights, bias) = fit(data, cfg, |w, b, batch, scale, g| {
        let it = batch.iter().map(|&i| (&data.vectors[i], &data.labels[i]));
        accumulate_logreg(w, b, it, scale, g)
    });
    Ok(linear_model(Algorithm::LogReg, weights, bias))
}

pub fn train_svm(data: &TrainingSet<'_>, cfg: &TrainConfig) -> Result<TrainedModel, ModelError> {
    cfg.validate()?;
    data.require_both_classes()?;
    let (weights, bias) = fit(data, cfg, |w, b, batch, scale, g| {
        let it = batch.iter().map(|&i| (&data.vectors[i], &data.labels[i]));
        accumulate_svm(w, b, it, scale, g)
    });
    Ok(linear_model(Algorithm::LinearSvm, weights, bias))
}

fn linear_model(algorithm: Algorithm, weights: Vec<f64>, bias: f64) -> TrainedModel {
    TrainedModel {
        algorithm,
        vocab_digest: None,
        train_config: None,
        parameters: ModelParams::Linear { weights, bias },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_d() -> (Vec<FeatureVector>, Vec<Label>) {
        // feature 0 carries +x, feature 1 carries -x (values must be positive)
        (
            vec![
                FeatureVector::from_dense(&[0.0, 1.0]),
                FeatureVector::from_dense(&[1.0, 0.0]),
            ],
            vec![Label::NotUseful, Label::Useful],
        )
    }

    #[test]
    fn separable_pair_logreg() {
        let (xs, ys) = one_d();
        let data = TrainingSet::new(&xs, &ys, 2);
        let cfg = TrainConfig {
            epochs: 200,
            ..TrainConfig::practical()
        };
        let m = train_logreg(&data, &cfg).unwrap();
        let ModelParams::Linear { weights, .. } = &m.parameters else {
            unreachable!()
        };
        assert!(weights[0] > 0.0 && weights[1] < 0.0);
        assert_eq!(m.predict("", &xs[0]).unwrap().label, Label::NotUseful);
        assert_eq!(m.predict("", &xs[1]).unwrap().label, Label::Useful);
    }

    #[test]
    fn separable_pair_svm() {
        let (xs, ys) = one_d();
        let data = TrainingSet::new(&xs, &ys, 2);
        let m = train_svm(&data, &TrainConfig::practical()).unwrap();
        assert!(m.predict("", &xs[0]).unwrap().score < 0.0);
        assert!(m.predict("", &xs[1]).unwrap().score > 0.0);
    }

    #[test]
    fn single_class_rejected() {
        let xs = vec![FeatureVector::from_dense(&[1.0])];
        let ys = vec![Label::Useful];
        let data = TrainingSet::new(&xs, &ys, 1);
        assert!(matches!(
            train_logreg(&data, &TrainConfig::practical()),
            Err(ModelError::SingleClassTrainingSet { .. })
        ));
        assert!(train_svm(&data, &TrainConfig::practical()).is_err());
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let xs: Vec<FeatureVector> = (0..40)
            .map(|i| FeatureVector::from_dense(&[(i % 7) as f64, (i % 3) as f64, 1.0]))
            .collect();
        let ys: Vec<Label> = (0..40).map(|i| Label::from_bool(i % 7 > 2)).collect();
        let data = TrainingSet::new(&xs, &ys, 3);
        let cfg = TrainConfig {
            seed: 9,
            epochs: 5,
            ..TrainConfig::practical()
        };
        let a = train_logreg(&data, &cfg).unwrap();
        let b = train_logreg(&data, &cfg).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let c = train_logreg(&data, &TrainConfig { seed: 10, ..cfg }).unwrap();
        assert_ne!(a.to_json(), c.to_json());
    }
}
