//! Artificial-label generation.
//!
//! Given a predicted class distribution this module derives the hard pseudo
//! label (argmax), the complementary label (argmin, the class the sample
//! most likely does *not* belong to), threshold-truncated multi-hot labels,
//! temperature sharpening, and the entropy-based confidence weight
//! `w = 1 - H(p) / log C` that scales each artificial label's influence.

use crate::error::{Error, Result};
use crate::nn::{NetworkParams, ProbDist};

/// Pseudo and complementary label for one unlabeled sample from one network,
/// together with the confidence weight of the prediction they came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArtificialLabel {
    pub pseudo_class: usize,
    pub complementary_class: usize,
    /// Entropy-based confidence, in `[0, 1]`.
    pub weight: f64,
    /// Which of the two networks produced the label (1 or 2).
    pub network_id: u8,
}

/// Threshold-truncated multi-hot label; bit `j` is set iff `p[j] >= gamma`.
/// May be all-zero when no class clears the threshold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiHotLabel {
    pub bits: Vec<u8>,
}

/// Index of the largest probability; ties break to the lowest index.
pub fn pseudo_label(p: &ProbDist) -> usize {
    let probs = p.as_slice();
    let mut best = 0;
    for (j, &v) in probs.iter().enumerate().skip(1) {
        if v > probs[best] {
            best = j;
        }
    }
    best
}

/// Index of the smallest probability; ties break to the lowest index.
pub fn complementary_label(p: &ProbDist) -> usize {
    let probs = p.as_slice();
    let mut best = 0;
    for (j, &v) in probs.iter().enumerate().skip(1) {
        if v < probs[best] {
            best = j;
        }
    }
    best
}

/// Multi-hot truncation at confidence threshold `gamma` (inclusive).
pub fn threshold_multi_hot(p: &ProbDist, gamma: f64) -> Result<MultiHotLabel> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::config(format!("threshold gamma {gamma} not in [0,1]")));
    }
    Ok(MultiHotLabel { bits: p.as_slice().iter().map(|&v| u8::from(v >= gamma)).collect() })
}

/// Temperature sharpening: `p^(1/epsilon)` renormalized.
///
/// `epsilon = 1` is the identity; as `epsilon -> 0` the output approaches a
/// hard one-hot at the argmax. Argmax and argmin indices are preserved for
/// every positive temperature.
pub fn sharpen(p: &ProbDist, epsilon: f64) -> Result<ProbDist> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::config(format!("sharpening temperature {epsilon} must be positive")));
    }
    let inv = 1.0 / epsilon;
    let powered: Vec<f64> = p.as_slice().iter().map(|&v| v.powf(inv)).collect();
    let sum: f64 = powered.iter().sum();
    if !(sum > 0.0) || !sum.is_finite() {
        return Err(Error::numeric(format!("sharpening underflowed (sum {sum})")));
    }
    ProbDist::new(powered.iter().map(|&v| v / sum).collect())
}

/// Entropy-based confidence weight `w = 1 - H(p) / log C`.
///
/// Natural-log entropy with the `0 * log 0 = 0` convention; `w = 0` at the
/// uniform distribution and `w = 1` at a one-hot.
pub fn sample_weight(p: &ProbDist) -> Result<f64> {
    let c = p.len();
    if c < 2 {
        return Err(Error::config("sample weight needs at least 2 classes (log C = 0 otherwise)"));
    }
    let entropy: f64 =
        p.as_slice().iter().map(|&v| if v > 0.0 { -v * v.ln() } else { 0.0 }).sum();
    let w = 1.0 - entropy / (c as f64).ln();
    // Entropy rounding can push w a hair outside [0, 1].
    Ok(w.clamp(0.0, 1.0))
}

/// Run one network on an already weak-augmented sample and package its
/// artificial labels. Targets are constants: nothing here participates in
/// any gradient.
pub fn generate_labels(
    params: &NetworkParams,
    x_weak: &[f64],
    network_id: u8,
) -> Result<ArtificialLabel> {
    let p = params.forward(x_weak)?;
    Ok(ArtificialLabel {
        pseudo_class: pseudo_label(&p),
        complementary_class: complementary_label(&p),
        weight: sample_weight(&p)?,
        network_id,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dist(v: &[f64]) -> ProbDist {
        ProbDist::new(v.to_vec()).unwrap()
    }

    #[test]
    fn argmax_argmin_with_ties() {
        assert_eq!(pseudo_label(&dist(&[0.1, 0.7, 0.2])), 1);
        assert_eq!(pseudo_label(&dist(&[0.5, 0.5])), 0);
        assert_eq!(complementary_label(&dist(&[0.1, 0.7, 0.2])), 0);
        let third = 1.0 / 3.0;
        assert_eq!(complementary_label(&dist(&[third, third, third])), 0);
        assert_eq!(pseudo_label(&dist(&[third, third, third])), 0);
    }

    #[test]
    fn multi_hot_threshold_is_inclusive() {
        let label = threshold_multi_hot(&dist(&[0.95, 0.05]), 0.95).unwrap();
        assert_eq!(label.bits, vec![1, 0]);
        let label = threshold_multi_hot(&dist(&[0.1, 0.7, 0.2]), 0.5).unwrap();
        assert_eq!(label.bits, vec![0, 1, 0]);
        let label = threshold_multi_hot(&dist(&[0.1, 0.7, 0.2]), 0.0).unwrap();
        assert_eq!(label.bits, vec![1, 1, 1]);
        assert!(threshold_multi_hot(&dist(&[0.5, 0.5]), 1.5).is_err());
    }

    #[test]
    fn sharpen_identity_and_errors() {
        let p = dist(&[0.3, 0.2, 0.5]);
        let s = sharpen(&p, 1.0).unwrap();
        for (a, b) in p.as_slice().iter().zip(s.as_slice()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(sharpen(&p, 0.0).is_err());
        assert!(sharpen(&p, -1.0).is_err());
    }

    #[test]
    fn weight_needs_two_classes() {
        assert!(sample_weight(&dist(&[1.0])).is_err());
    }

    #[test]
    fn weight_extremes() {
        assert!((sample_weight(&dist(&[0.5, 0.5])).unwrap()).abs() < 1e-12);
        assert!((sample_weight(&dist(&[1.0, 0.0])).unwrap() - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn pseudo_and_complementary_differ_on_non_uniform(raw in proptest::collection::vec(0.05f64..1.0, 2..8)) {
            let sum: f64 = raw.iter().sum();
            let probs: Vec<f64> = raw.iter().map(|v| v / sum).collect();
            let p = ProbDist::new(probs.clone()).unwrap();
            let uniform = probs.iter().all(|&v| (v - 1.0 / probs.len() as f64).abs() < 1e-15);
            prop_assume!(!uniform);
            prop_assert_ne!(pseudo_label(&p), complementary_label(&p));
        }

        #[test]
        fn weight_is_permutation_invariant(raw in proptest::collection::vec(0.01f64..1.0, 2..8), shift in 0usize..8) {
            let sum: f64 = raw.iter().sum();
            let probs: Vec<f64> = raw.iter().map(|v| v / sum).collect();
            let mut rotated = probs.clone();
            rotated.rotate_left(shift % probs.len());
            let w1 = sample_weight(&ProbDist::new(probs).unwrap()).unwrap();
            let w2 = sample_weight(&ProbDist::new(rotated).unwrap()).unwrap();
            prop_assert!((w1 - w2).abs() < 1e-12);
        }

        #[test]
        fn weight_is_bounded(raw in proptest::collection::vec(0.0f64..1.0, 2..8)) {
            let sum: f64 = raw.iter().sum();
            prop_assume!(sum > 1e-9);
            let probs: Vec<f64> = raw.iter().map(|v| v / sum).collect();
            let w = sample_weight(&ProbDist::new(probs).unwrap()).unwrap();
            prop_assert!((0.0..=1.0).contains(&w));
        }

        #[test]
        fn sharpen_preserves_extrema(raw in proptest::collection::vec(0.01f64..1.0, 2..8), eps in 0.05f64..4.0) {
            let sum: f64 = raw.iter().sum();
            let probs: Vec<f64> = raw.iter().map(|v| v / sum).collect();
            let p = ProbDist::new(probs).unwrap();
            let s = sharpen(&p, eps).unwrap();
            prop_assert_eq!(pseudo_label(&p), pseudo_label(&s));
            prop_assert_eq!(complementary_label(&p), complementary_label(&s));
        }

        #[test]
        fn high_threshold_sets_at_most_one_bit(raw in proptest::collection::vec(0.01f64..1.0, 2..8), gamma in 0.5f64..1.0) {
            prop_assume!(gamma > 0.5);
            let sum: f64 = raw.iter().sum();
            let probs: Vec<f64> = raw.iter().map(|v| v / sum).collect();
            let label = threshold_multi_hot(&ProbDist::new(probs).unwrap(), gamma).unwrap();
            let set: u32 = label.bits.iter().map(|&b| u32::from(b)).sum();
            prop_assert!(set <= 1);
        }

        #[test]
        fn sharpening_raises_confidence(raw in proptest::collection::vec(0.01f64..1.0, 2..6), eps in 0.1f64..1.0) {
            let sum: f64 = raw.iter().sum();
            let probs: Vec<f64> = raw.iter().map(|v| v / sum).collect();
            let uniform = probs.iter().all(|&v| (v - 1.0 / probs.len() as f64).abs() < 1e-12);
            prop_assume!(!uniform && eps < 1.0);
            let p = ProbDist::new(probs).unwrap();
            let w_before = sample_weight(&p).unwrap();
            let w_after = sample_weight(&sharpen(&p, eps).unwrap()).unwrap();
            prop_assert!(w_after >= w_before - 1e-12, "{w_after} < {w_before}");
        }
    }
}
