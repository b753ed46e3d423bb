//! Evaluation and cross-labeling diagnostics.

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::labeling::{complementary_label, pseudo_label, sample_weight};
use crate::losses::LossBreakdown;
use crate::nn::{param_distance, NetworkParams};

/// One evaluation snapshot, emitted as a JSONL row by the harness.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MetricsRecord {
    pub iteration: usize,
    /// Learning rate of the most recent step.
    pub lr: f64,
    pub test_acc_net1: f64,
    pub test_acc_net2: f64,
    pub test_acc_mean: f64,
    pub test_acc_ema: f64,
    /// Fraction of the diagnostics pool where the two networks agree on the
    /// pseudo label.
    pub pl_overlap: f64,
    /// Same for the complementary label.
    pub nl_overlap: f64,
    /// Fraction of the pool whose confidence weight clears the exchange
    /// gate, averaged over both directions.
    pub exchange_ratio: f64,
    pub dist_theta1_theta2: f64,
    pub dist_theta1_ema: f64,
    /// Loss breakdown of the most recent step (absent at iteration 0, and
    /// absent for network 2 in single-network variants).
    pub loss_net1: Option<LossBreakdown>,
    pub loss_net2: Option<LossBreakdown>,
}

/// Fraction of argmax-correct predictions on a test set; argmax ties break
/// to the lowest class index.
pub fn evaluate(params: &NetworkParams, test: &Dataset) -> Result<f64> {
    if test.is_empty() {
        return Err(Error::config("cannot evaluate on an empty test set"));
    }
    let mut correct = 0usize;
    for (x, &y) in test.features.iter().zip(&test.labels) {
        let p = params.forward(x)?;
        if pseudo_label(&p) == y {
            correct += 1;
        }
    }
    Ok(correct as f64 / test.len() as f64)
}

/// The pool-level diagnostics of one evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsFragment {
    pub pl_overlap: f64,
    pub nl_overlap: f64,
    pub exchange_ratio: f64,
    pub dist_theta1_theta2: f64,
    pub dist_theta1_ema: f64,
}

/// Label agreement, exchange rate, and parameter distances over a fixed
/// unlabeled pool, using clean (augmentation-free) forward passes.
///
/// An empty pool yields zero ratios; the parameter distances are always
/// computed.
pub fn diagnostics(
    params1: &NetworkParams,
    params2: &NetworkParams,
    ema1: &NetworkParams,
    pool: &[Vec<f64>],
    tau: f64,
) -> Result<DiagnosticsFragment> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::config(format!("tau {tau} not in [0,1]")));
    }
    let mut pl_agree = 0usize;
    let mut nl_agree = 0usize;
    let mut pass1 = 0usize;
    let mut pass2 = 0usize;
    for x in pool {
        let p1 = params1.forward(x)?;
        let p2 = params2.forward(x)?;
        if pseudo_label(&p1) == pseudo_label(&p2) {
            pl_agree += 1;
        }
        if complementary_label(&p1) == complementary_label(&p2) {
            nl_agree += 1;
        }
        if sample_weight(&p1)? > tau {
            pass1 += 1;
        }
        if sample_weight(&p2)? > tau {
            pass2 += 1;
        }
    }
    let n = pool.len() as f64;
    let ratio = |count: usize| if pool.is_empty() { 0.0 } else { count as f64 / n };
    Ok(DiagnosticsFragment {
        pl_overlap: ratio(pl_agree),
        nl_overlap: ratio(nl_agree),
        exchange_ratio: 0.5 * (ratio(pass1) + ratio(pass2)),
        dist_theta1_theta2: param_distance(params1, params2),
        dist_theta1_ema: param_distance(params1, ema1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::SplitTag;
    use crate::nn::{init_network, NetworkParams};

    fn test_set(features: Vec<Vec<f64>>, labels: Vec<usize>, c: usize) -> Dataset {
        Dataset { features, labels, class_count: c, tag: SplitTag::Test }
    }

    #[test]
    fn uniform_predictor_resolves_ties_to_class_zero() {
        let net = NetworkParams::zeros(&[2, 2]).unwrap();
        let test = test_set(vec![vec![0.0, 1.0], vec![1.0, 0.0], vec![2.0, 2.0], vec![3.0, 1.0]], vec![0, 0, 1, 1], 2);
        // Exactly uniform output -> every prediction is class 0.
        assert_eq!(evaluate(&net, &test).unwrap(), 0.5);
    }

    #[test]
    fn perfect_predictor_scores_one() {
        // One linear layer that copies the two features into the two logits:
        // argmax = index of the larger feature.
        let mut net = NetworkParams::zeros(&[2, 2]).unwrap();
        net.layers_mut()[0].weights.copy_from_slice(&[1.0, 0.0, 0.0, 1.0]);
        let test = test_set(vec![vec![3.0, -1.0], vec![-2.0, 5.0]], vec![0, 1], 2);
        assert_eq!(evaluate(&net, &test).unwrap(), 1.0);
    }

    #[test]
    fn single_sample_accuracy_is_zero_or_one() {
        let net = init_network(&[2, 4, 2], 3).unwrap();
        let test = test_set(vec![vec![0.3, 0.4]], vec![1], 2);
        let acc = evaluate(&net, &test).unwrap();
        assert!(acc == 0.0 || acc == 1.0);
        let empty = test_set(vec![], vec![], 2);
        assert!(evaluate(&net, &empty).is_err());
    }

    #[test]
    fn identical_networks_overlap_fully() {
        let net = init_network(&[2, 4, 3], 8).unwrap();
        let pool: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64 * 0.1, -0.2]).collect();
        let d = diagnostics(&net, &net, &net, &pool, 0.85).unwrap();
        assert_eq!(d.pl_overlap, 1.0);
        assert_eq!(d.nl_overlap, 1.0);
        assert_eq!(d.dist_theta1_theta2, 0.0);
        assert_eq!(d.dist_theta1_ema, 0.0);
    }

    #[test]
    fn empty_pool_yields_zero_ratios() {
        let a = init_network(&[2, 4, 3], 8).unwrap();
        let b = init_network(&[2, 4, 3], 9).unwrap();
        let d = diagnostics(&a, &b, &a, &[], 0.85).unwrap();
        assert_eq!(d.pl_overlap, 0.0);
        assert!(d.dist_theta1_theta2 > 0.0);
    }
}
