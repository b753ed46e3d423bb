//! Weak and strong stochastic perturbations for feature vectors.
//!
//! Labels are generated from weak views and applied to strong views, so the
//! strong policy must dominate the weak one. For low-dimensional features
//! the weak policy is small additive Gaussian noise; the strong policy
//! stacks larger noise, per-feature dropout, and a global scale jitter.

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::gauss;

/// Magnitudes of both perturbation policies. `strong_noise_std` must be at
/// least `weak_noise_std` so that strong dominates weak by construction.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AugmentPolicy {
    pub weak_noise_std: f64,
    pub strong_noise_std: f64,
    pub strong_feature_dropout_prob: f64,
    pub strong_scale_jitter: f64,
}

impl AugmentPolicy {
    pub fn new(
        weak_noise_std: f64,
        strong_noise_std: f64,
        strong_feature_dropout_prob: f64,
        strong_scale_jitter: f64,
    ) -> Result<Self> {
        if weak_noise_std < 0.0 || strong_noise_std < 0.0 || strong_scale_jitter < 0.0 {
            return Err(Error::config("augmentation magnitudes must be non-negative"));
        }
        if strong_noise_std < weak_noise_std {
            return Err(Error::config(format!(
                "strong noise std {strong_noise_std} must be >= weak noise std {weak_noise_std}"
            )));
        }
        if !(0.0..=1.0).contains(&strong_feature_dropout_prob) {
            return Err(Error::config(format!(
                "dropout probability {strong_feature_dropout_prob} not in [0,1]"
            )));
        }
        Ok(AugmentPolicy {
            weak_noise_std,
            strong_noise_std,
            strong_feature_dropout_prob,
            strong_scale_jitter,
        })
    }
}

/// Weak view: `x + N(0, weak_noise_std^2)` per feature.
pub fn weak_augment<R: Rng>(x: &[f64], policy: &AugmentPolicy, rng: &mut R) -> Vec<f64> {
    x.iter().map(|&v| v + policy.weak_noise_std * gauss(rng)).collect()
}

/// Strong view: Gaussian noise, then per-feature dropout, then a global
/// scale jitter `x * (1 + u)` with `u ~ U[-jitter, +jitter]`.
pub fn strong_augment<R: Rng>(x: &[f64], policy: &AugmentPolicy, rng: &mut R) -> Vec<f64> {
    let mut out: Vec<f64> = x.iter().map(|&v| v + policy.strong_noise_std * gauss(rng)).collect();
    for v in &mut out {
        if rng.gen::<f64>() < policy.strong_feature_dropout_prob {
            *v = 0.0;
        }
    }
    let u = if policy.strong_scale_jitter > 0.0 {
        rng.gen_range(-policy.strong_scale_jitter..=policy.strong_scale_jitter)
    } else {
        0.0
    };
    for v in &mut out {
        *v *= 1.0 + u;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn policy(weak: f64, strong: f64, drop: f64, jitter: f64) -> AugmentPolicy {
        AugmentPolicy::new(weak, strong, drop, jitter).unwrap()
    }

    #[test]
    fn zero_magnitudes_are_identity() {
        let mut rng = stream(1, 2);
        let x = vec![0.4, -1.3, 2.0];
        assert_eq!(weak_augment(&x, &policy(0.0, 0.0, 0.0, 0.0), &mut rng), x);
        assert_eq!(strong_augment(&x, &policy(0.0, 0.0, 0.0, 0.0), &mut rng), x);
    }

    #[test]
    fn fixed_rng_state_reproduces() {
        let p = policy(0.1, 0.3, 0.2, 0.2);
        let x = vec![0.4, -1.3];
        let mut a = stream(5, 2);
        let mut b = stream(5, 2);
        assert_eq!(weak_augment(&x, &p, &mut a), weak_augment(&x, &p, &mut b));
        assert_eq!(strong_augment(&x, &p, &mut a), strong_augment(&x, &p, &mut b));
    }

    #[test]
    fn dimension_is_preserved() {
        let p = policy(0.1, 0.3, 0.2, 0.2);
        let mut rng = stream(9, 2);
        for i in 1..100 {
            let x: Vec<f64> = (0..(i % 7) + 1).map(|k| k as f64 * 0.3).collect();
            assert_eq!(weak_augment(&x, &p, &mut rng).len(), x.len());
            assert_eq!(strong_augment(&x, &p, &mut rng).len(), x.len());
        }
    }

    #[test]
    fn full_dropout_zeroes_everything() {
        let p = policy(0.0, 0.0, 1.0, 0.2);
        let mut rng = stream(3, 2);
        let out = strong_augment(&[1.0, -2.0, 3.0], &p, &mut rng);
        assert!(out.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn invalid_policy_is_rejected() {
        assert!(AugmentPolicy::new(0.3, 0.1, 0.0, 0.0).is_err());
        assert!(AugmentPolicy::new(0.1, 0.3, 1.5, 0.0).is_err());
        assert!(AugmentPolicy::new(-0.1, 0.3, 0.0, 0.0).is_err());
    }

    #[test]
    fn strong_displaces_more_than_weak() {
        // Monte-Carlo estimate of mean squared displacement per feature.
        let p = policy(0.05, 0.2, 0.2, 0.2);
        let x = vec![0.8, -0.4];
        let mut rng = stream(11, 2);
        let n = 10_000;
        let mut weak_ms = 0.0;
        let mut strong_ms = 0.0;
        for _ in 0..n {
            let w = weak_augment(&x, &p, &mut rng);
            let s = strong_augment(&x, &p, &mut rng);
            weak_ms += w.iter().zip(&x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
            strong_ms += s.iter().zip(&x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        }
        assert!(strong_ms > weak_ms, "strong {strong_ms} <= weak {weak_ms}");
    }

    #[test]
    fn weak_and_strong_draws_are_independent() {
        // Same sample, same iteration: consecutive draws from one stream must
        // not replay each other.
        let p = policy(0.1, 0.1, 0.0, 0.0);
        let x = vec![0.5, 0.5, 0.5];
        let mut rng = stream(21, 2);
        let w = weak_augment(&x, &p, &mut rng);
        let s = strong_augment(&x, &p, &mut rng);
        assert_ne!(w, s);
    }
}
