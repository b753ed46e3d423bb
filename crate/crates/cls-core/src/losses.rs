//! Loss functions and their analytical gradients.
//!
//! Four ingredients combine into the mixed training objective:
//!
//! - weighted positive cross-entropy `-w * log p[pseudo]`,
//! - weighted negative cross-entropy `-w * log(1 - p[complementary])`
//!   (negative learning: push mass off the complementary class),
//! - the self-labeling loss: both terms on strong augmentations, using the
//!   network's **own** labels generated from weak augmentations,
//! - the co-labeling loss: the same form using the **other** network's
//!   labels, gated by `weight > tau` so only confident labels are exchanged,
//!
//! plus a standard supervised NLL on the labeled batch. The mixed loss is
//! `L = L_sup + lambda1 * L_self + lambda2 * L_co`.
//!
//! Labels are detached constants: gradients flow only through the
//! predictions on the training views, never into label generation.

use crate::error::{Error, Result};
use crate::labeling::ArtificialLabel;
use crate::nn::{backward, clamp_prob, softmax_backward, Gradients, NetworkParams, ProbDist, PROB_FLOOR};

/// Per-component decomposition of the mixed loss for one batch.
///
/// `total = sup + lambda1 * (self_pos + self_neg) + lambda2 * (co_pos + co_neg)`;
/// the component fields are stored without their lambda factors.
#[derive(Debug, Clone, Default, serde::Serialize, serde::Deserialize, PartialEq)]
pub struct LossBreakdown {
    pub total: f64,
    pub sup: f64,
    pub self_pos: f64,
    pub self_neg: f64,
    pub co_pos: f64,
    pub co_neg: f64,
    /// Number of unlabeled samples whose peer label passed the tau gate.
    pub exchanged_count: usize,
}

/// Knobs of the mixed objective. The ablation variants are expressed by
/// toggling these rather than by separate loss implementations.
#[derive(Debug, Clone, Copy)]
pub struct MixedLossConfig {
    pub lambda1: f64,
    pub lambda2: f64,
    /// Exchange threshold; a peer label is used only when `weight > tau`
    /// (strict).
    pub tau: f64,
    /// Include the negative (complementary-label) terms.
    pub use_negative: bool,
    /// Force unit weights inside the cross-entropy terms. The tau gate still
    /// reads the true entropy weight.
    pub unit_weight: bool,
}

impl Default for MixedLossConfig {
    fn default() -> Self {
        MixedLossConfig { lambda1: 1.0, lambda2: 1.0, tau: 0.85, use_negative: true, unit_weight: false }
    }
}

/// `-ln(clamp(p))` and its derivative w.r.t. `p` (zero where the clamp is
/// active, so analytical gradients match the clamped value exactly).
fn pos_term(p: f64) -> (f64, f64) {
    let c = clamp_prob(p);
    let d = if (PROB_FLOOR..=1.0 - PROB_FLOOR).contains(&p) { -1.0 / c } else { 0.0 };
    (-c.ln(), d)
}

/// `-ln(1 - clamp(p))` and its derivative w.r.t. `p`.
fn neg_term(p: f64) -> (f64, f64) {
    let c = clamp_prob(p);
    let d = if (PROB_FLOOR..=1.0 - PROB_FLOOR).contains(&p) { 1.0 / (1.0 - c) } else { 0.0 };
    (-(1.0 - c).ln(), d)
}

fn check_class(class: usize, c: usize) -> Result<()> {
    if class >= c {
        return Err(Error::shape(format!("class index {class} out of range for {c} classes")));
    }
    Ok(())
}

/// Weighted positive cross-entropy `-w * log p[pseudo_class]`.
pub fn positive_ce(p: &ProbDist, pseudo_class: usize, w: f64) -> Result<f64> {
    check_class(pseudo_class, p.len())?;
    Ok(w * pos_term(p.as_slice()[pseudo_class]).0)
}

/// Weighted negative cross-entropy `-w * log(1 - p[complementary_class])`.
pub fn negative_ce(p: &ProbDist, complementary_class: usize, w: f64) -> Result<f64> {
    check_class(complementary_class, p.len())?;
    Ok(w * neg_term(p.as_slice()[complementary_class]).0)
}

/// Self-labeling loss: batch mean of `positive_ce + negative_ce` on the
/// strong views, using the same network's labels and weights.
pub fn self_labeling_loss(
    params: &NetworkParams,
    strong_batch: &[Vec<f64>],
    labels: &[ArtificialLabel],
) -> Result<f64> {
    if strong_batch.is_empty() {
        return Err(Error::shape("self-labeling loss needs a non-empty batch"));
    }
    if strong_batch.len() != labels.len() {
        return Err(Error::shape(format!(
            "batch has {} samples but {} labels",
            strong_batch.len(),
            labels.len()
        )));
    }
    let mut sum = 0.0;
    for (x, label) in strong_batch.iter().zip(labels) {
        let p = params.forward(x)?;
        sum += positive_ce(&p, label.pseudo_class, label.weight)?;
        sum += negative_ce(&p, label.complementary_class, label.weight)?;
    }
    Ok(sum / strong_batch.len() as f64)
}

/// Co-labeling loss: gated mean over the full batch using the *other*
/// network's labels. Returns the loss and how many samples passed the gate.
pub fn co_labeling_loss(
    params: &NetworkParams,
    strong_batch: &[Vec<f64>],
    labels_other: &[ArtificialLabel],
    tau: f64,
) -> Result<(f64, usize)> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::config(format!("exchange threshold tau {tau} not in [0,1]")));
    }
    if strong_batch.len() != labels_other.len() {
        return Err(Error::shape(format!(
            "batch has {} samples but {} peer labels",
            strong_batch.len(),
            labels_other.len()
        )));
    }
    if strong_batch.is_empty() {
        return Err(Error::shape("co-labeling loss needs a non-empty batch"));
    }
    let mut sum = 0.0;
    let mut exchanged = 0usize;
    for (x, label) in strong_batch.iter().zip(labels_other) {
        if label.weight > tau {
            exchanged += 1;
            let p = params.forward(x)?;
            sum += positive_ce(&p, label.pseudo_class, label.weight)?;
            sum += negative_ce(&p, label.complementary_class, label.weight)?;
        }
    }
    Ok((sum / strong_batch.len() as f64, exchanged))
}

/// Supervised loss: mean negative log-likelihood over the labeled batch.
pub fn supervised_loss(params: &NetworkParams, xs: &[Vec<f64>], ys: &[usize]) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::shape("supervised loss needs a non-empty batch"));
    }
    if xs.len() != ys.len() {
        return Err(Error::shape(format!("{} samples but {} labels", xs.len(), ys.len())));
    }
    let mut sum = 0.0;
    for (x, &y) in xs.iter().zip(ys) {
        let p = params.forward(x)?;
        if y >= p.len() {
            return Err(Error::data(format!("label {y} out of range for {} classes", p.len())));
        }
        sum += pos_term(p.as_slice()[y]).0;
    }
    Ok(sum / xs.len() as f64)
}

/// The mixed objective for one network on one step's batches (value only).
///
/// The labeled batch contributes the supervised mean; the unlabeled strong
/// batch contributes the self-labeling terms (own labels) and, when peer
/// labels are supplied, the gated co-labeling terms. Each unlabeled sum is
/// normalized by the unlabeled batch's own size.
pub fn mixed_loss(
    params: &NetworkParams,
    labeled_xs: &[Vec<f64>],
    labeled_ys: &[usize],
    unlabeled_strong: &[Vec<f64>],
    own_labels: Option<&[ArtificialLabel]>,
    other_labels: Option<&[ArtificialLabel]>,
    cfg: &MixedLossConfig,
) -> Result<LossBreakdown> {
    eval_mixed(params, labeled_xs, labeled_ys, unlabeled_strong, own_labels, other_labels, cfg, false)
        .map(|(bd, _)| bd)
}

/// [`mixed_loss`] plus the exact parameter gradient of `total`.
pub fn mixed_loss_with_grad(
    params: &NetworkParams,
    labeled_xs: &[Vec<f64>],
    labeled_ys: &[usize],
    unlabeled_strong: &[Vec<f64>],
    own_labels: Option<&[ArtificialLabel]>,
    other_labels: Option<&[ArtificialLabel]>,
    cfg: &MixedLossConfig,
) -> Result<(LossBreakdown, Gradients)> {
    eval_mixed(params, labeled_xs, labeled_ys, unlabeled_strong, own_labels, other_labels, cfg, true)
        .map(|(bd, g)| (bd, g.expect("gradient requested")))
}

#[allow(clippy::too_many_arguments)]
fn eval_mixed(
    params: &NetworkParams,
    labeled_xs: &[Vec<f64>],
    labeled_ys: &[usize],
    unlabeled_strong: &[Vec<f64>],
    own_labels: Option<&[ArtificialLabel]>,
    other_labels: Option<&[ArtificialLabel]>,
    cfg: &MixedLossConfig,
    want_grad: bool,
) -> Result<(LossBreakdown, Option<Gradients>)> {
    if !(0.0..=1.0).contains(&cfg.tau) {
        return Err(Error::config(format!("exchange threshold tau {} not in [0,1]", cfg.tau)));
    }
    if labeled_xs.len() != labeled_ys.len() {
        return Err(Error::shape(format!(
            "{} labeled samples but {} labels",
            labeled_xs.len(),
            labeled_ys.len()
        )));
    }
    if let Some(own) = own_labels {
        if own.len() != unlabeled_strong.len() {
            return Err(Error::shape(format!(
                "{} unlabeled samples but {} own labels",
                unlabeled_strong.len(),
                own.len()
            )));
        }
    }
    if let Some(other) = other_labels {
        if other.len() != unlabeled_strong.len() {
            return Err(Error::shape(format!(
                "{} unlabeled samples but {} peer labels",
                unlabeled_strong.len(),
                other.len()
            )));
        }
    }

    let c = params.class_count();
    let mut bd = LossBreakdown::default();
    let mut caches = Vec::new();
    let mut dlogits = Vec::new();

    let b_l = labeled_xs.len() as f64;
    for (x, &y) in labeled_xs.iter().zip(labeled_ys) {
        if y >= c {
            return Err(Error::data(format!("label {y} out of range for {c} classes")));
        }
        let (probs, cache) = params.forward_cached(x)?;
        let (v, d) = pos_term(probs.as_slice()[y]);
        bd.sup += v / b_l;
        if want_grad {
            let mut dprobs = vec![0.0; c];
            dprobs[y] = d / b_l;
            dlogits.push(softmax_backward(probs.as_slice(), &dprobs));
            caches.push(cache);
        }
    }

    let b_u = unlabeled_strong.len() as f64;
    for (i, x) in unlabeled_strong.iter().enumerate() {
        let (probs, cache) = params.forward_cached(x)?;
        let p = probs.as_slice();
        let mut dprobs = vec![0.0; c];

        if let Some(own) = own_labels {
            let label = &own[i];
            check_class(label.pseudo_class, c)?;
            check_class(label.complementary_class, c)?;
            let w = if cfg.unit_weight { 1.0 } else { label.weight };
            let (v, d) = pos_term(p[label.pseudo_class]);
            bd.self_pos += w * v / b_u;
            let coeff = cfg.lambda1 * w / b_u;
            if coeff > 0.0 {
                dprobs[label.pseudo_class] += coeff * d;
            }
            if cfg.use_negative {
                let (v, d) = neg_term(p[label.complementary_class]);
                bd.self_neg += w * v / b_u;
                if coeff > 0.0 {
                    dprobs[label.complementary_class] += coeff * d;
                }
            }
        }

        if let Some(other) = other_labels {
            let label = &other[i];
            check_class(label.pseudo_class, c)?;
            check_class(label.complementary_class, c)?;
            // Strict gate on the peer's true confidence weight.
            if label.weight > cfg.tau {
                bd.exchanged_count += 1;
                let w = if cfg.unit_weight { 1.0 } else { label.weight };
                let (v, d) = pos_term(p[label.pseudo_class]);
                bd.co_pos += w * v / b_u;
                let coeff = cfg.lambda2 * w / b_u;
                if coeff > 0.0 {
                    dprobs[label.pseudo_class] += coeff * d;
                }
                if cfg.use_negative {
                    let (v, d) = neg_term(p[label.complementary_class]);
                    bd.co_neg += w * v / b_u;
                    if coeff > 0.0 {
                        dprobs[label.complementary_class] += coeff * d;
                    }
                }
            }
        }

        if want_grad {
            dlogits.push(softmax_backward(p, &dprobs));
            caches.push(cache);
        }
    }

    bd.total = bd.sup
        + cfg.lambda1 * (bd.self_pos + bd.self_neg)
        + cfg.lambda2 * (bd.co_pos + bd.co_neg);

    let grads = if want_grad { Some(backward(params, &caches, &dlogits)?) } else { None };
    Ok((bd, grads))
}

// ---------------------------------------------------------------------------
// Single-loss gradient entry points (used by the gradient-check suites)
// ---------------------------------------------------------------------------

/// Positive cross-entropy of one sample, composed with the forward pass.
pub fn positive_ce_grad(
    params: &NetworkParams,
    x: &[f64],
    pseudo_class: usize,
    w: f64,
) -> Result<(f64, Gradients)> {
    let c = params.class_count();
    check_class(pseudo_class, c)?;
    let (probs, cache) = params.forward_cached(x)?;
    let (v, d) = pos_term(probs.as_slice()[pseudo_class]);
    let mut dprobs = vec![0.0; c];
    dprobs[pseudo_class] = w * d;
    let dz = softmax_backward(probs.as_slice(), &dprobs);
    Ok((w * v, backward(params, &[cache], &[dz])?))
}

/// Negative cross-entropy of one sample, composed with the forward pass.
pub fn negative_ce_grad(
    params: &NetworkParams,
    x: &[f64],
    complementary_class: usize,
    w: f64,
) -> Result<(f64, Gradients)> {
    let c = params.class_count();
    check_class(complementary_class, c)?;
    let (probs, cache) = params.forward_cached(x)?;
    let (v, d) = neg_term(probs.as_slice()[complementary_class]);
    let mut dprobs = vec![0.0; c];
    dprobs[complementary_class] = w * d;
    let dz = softmax_backward(probs.as_slice(), &dprobs);
    Ok((w * v, backward(params, &[cache], &[dz])?))
}

/// Supervised loss with gradient.
pub fn supervised_loss_grad(
    params: &NetworkParams,
    xs: &[Vec<f64>],
    ys: &[usize],
) -> Result<(f64, Gradients)> {
    let cfg = MixedLossConfig { lambda1: 0.0, lambda2: 0.0, ..MixedLossConfig::default() };
    let (bd, grads) = mixed_loss_with_grad(params, xs, ys, &[], None, None, &cfg)?;
    Ok((bd.sup, grads))
}

/// Self-labeling loss with gradient.
pub fn self_labeling_loss_grad(
    params: &NetworkParams,
    strong_batch: &[Vec<f64>],
    labels: &[ArtificialLabel],
) -> Result<(f64, Gradients)> {
    let cfg = MixedLossConfig { lambda1: 1.0, lambda2: 0.0, ..MixedLossConfig::default() };
    let (bd, grads) =
        mixed_loss_with_grad(params, &[], &[], strong_batch, Some(labels), None, &cfg)?;
    Ok((bd.self_pos + bd.self_neg, grads))
}

/// Co-labeling loss with gradient and exchange count.
pub fn co_labeling_loss_grad(
    params: &NetworkParams,
    strong_batch: &[Vec<f64>],
    labels_other: &[ArtificialLabel],
    tau: f64,
) -> Result<(f64, usize, Gradients)> {
    let cfg = MixedLossConfig { lambda1: 0.0, lambda2: 1.0, tau, ..MixedLossConfig::default() };
    let (bd, grads) =
        mixed_loss_with_grad(params, &[], &[], strong_batch, None, Some(labels_other), &cfg)?;
    Ok((bd.co_pos + bd.co_neg, bd.exchanged_count, grads))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labeling::ArtificialLabel;
    use crate::nn::{init_network, sgd_nesterov_step, NetworkParams, OptimizerState};
    use proptest::prelude::*;

    fn dist(v: &[f64]) -> ProbDist {
        ProbDist::new(v.to_vec()).unwrap()
    }

    fn label(pseudo: usize, comp: usize, w: f64) -> ArtificialLabel {
        ArtificialLabel { pseudo_class: pseudo, complementary_class: comp, weight: w, network_id: 1 }
    }

    #[test]
    fn positive_ce_basics() {
        let p = dist(&[0.5, 0.5]);
        assert_eq!(positive_ce(&p, 0, 0.0).unwrap(), 0.0);
        assert!((positive_ce(&p, 0, 1.0).unwrap() - std::f64::consts::LN_2).abs() < 1e-12);
        assert!(positive_ce(&p, 5, 1.0).is_err());
    }

    #[test]
    fn negative_ce_basics() {
        let p = dist(&[0.5, 0.5]);
        assert!((negative_ce(&p, 0, 1.0).unwrap() - std::f64::consts::LN_2).abs() < 1e-12);
        let p = dist(&[0.9, 0.1]);
        assert!((negative_ce(&p, 0, 1.0).unwrap() - (-(0.1f64).ln())).abs() < 1e-12);
        assert!(negative_ce(&dist(&[0.5, 0.5]), 3, 1.0).is_err());
    }

    #[test]
    fn co_labeling_tau_one_exchanges_nothing() {
        let net = init_network(&[2, 4, 3], 9).unwrap();
        let batch = vec![vec![0.1, 0.2], vec![-0.3, 0.4]];
        let labels = vec![label(0, 2, 0.99), label(1, 0, 0.97)];
        let (loss, count) = co_labeling_loss(&net, &batch, &labels, 1.0).unwrap();
        assert_eq!(loss, 0.0);
        assert_eq!(count, 0);
        assert!(co_labeling_loss(&net, &batch, &labels, 1.5).is_err());
    }

    #[test]
    fn co_labeling_open_gate_matches_self_form() {
        let net = init_network(&[2, 4, 3], 9).unwrap();
        let batch = vec![vec![0.1, 0.2], vec![-0.3, 0.4]];
        let labels = vec![label(0, 2, 0.9), label(1, 0, 0.9)];
        let (co, count) = co_labeling_loss(&net, &batch, &labels, 0.85).unwrap();
        let selfed = self_labeling_loss(&net, &batch, &labels).unwrap();
        assert_eq!(count, 2);
        assert!((co - selfed).abs() < 1e-12);
    }

    #[test]
    fn mixed_reduces_to_supervised_when_lambdas_zero() {
        let net = init_network(&[2, 4, 3], 1).unwrap();
        let xs = vec![vec![0.5, -0.5], vec![1.0, 0.3]];
        let ys = vec![0, 2];
        let unl = vec![vec![0.2, 0.2]];
        let own = vec![label(1, 0, 0.5)];
        let cfg = MixedLossConfig { lambda1: 0.0, lambda2: 0.0, ..MixedLossConfig::default() };
        let bd = mixed_loss(&net, &xs, &ys, &unl, Some(&own), None, &cfg).unwrap();
        let sup = supervised_loss(&net, &xs, &ys).unwrap();
        assert!((bd.total - sup).abs() < 1e-12);
    }

    #[test]
    fn mixed_total_matches_component_composition() {
        let net = init_network(&[2, 6, 3], 12).unwrap();
        let xs = vec![vec![0.5, -0.5], vec![1.0, 0.3]];
        let ys = vec![0, 2];
        let unl = vec![vec![0.2, 0.2], vec![-0.7, 0.9], vec![0.0, 1.0], vec![0.4, -0.1]];
        let own = vec![label(1, 0, 0.5), label(0, 2, 0.9), label(2, 1, 0.2), label(1, 2, 0.7)];
        let other = vec![label(2, 0, 0.95), label(0, 1, 0.5), label(1, 0, 0.9), label(2, 1, 0.1)];
        let cfg = MixedLossConfig { lambda1: 2.0, lambda2: 1.0, tau: 0.85, ..MixedLossConfig::default() };
        let bd = mixed_loss(&net, &xs, &ys, &unl, Some(&own), Some(&other), &cfg).unwrap();

        // Independent composition through the three standalone losses.
        let sup = supervised_loss(&net, &xs, &ys).unwrap();
        let selfed = self_labeling_loss(&net, &unl, &own).unwrap();
        let (co, count) = co_labeling_loss(&net, &unl, &other, 0.85).unwrap();
        assert!((bd.total - (sup + 2.0 * selfed + co)).abs() < 1e-9);
        assert_eq!(bd.exchanged_count, count);
        assert!((bd.total - (bd.sup + 2.0 * (bd.self_pos + bd.self_neg) + (bd.co_pos + bd.co_neg))).abs() < 1e-9);
    }

    #[test]
    fn all_zero_weights_kill_loss_and_gradient() {
        let net = init_network(&[2, 4, 3], 4).unwrap();
        let batch = vec![vec![0.1, 0.2], vec![-0.3, 0.4]];
        let labels = vec![label(0, 2, 0.0), label(1, 0, 0.0)];
        let (loss, grads) = self_labeling_loss_grad(&net, &batch, &labels).unwrap();
        assert_eq!(loss, 0.0);
        assert!(grads.flatten().iter().all(|&g| g == 0.0));
    }

    #[test]
    fn positive_step_raises_pseudo_probability() {
        let mut net = init_network(&[2, 6, 3], 77).unwrap();
        let x = [0.4, -0.8];
        let before = net.forward(&x).unwrap().as_slice()[1];
        let (_, grads) = positive_ce_grad(&net, &x, 1, 0.8).unwrap();
        let mut state = OptimizerState::new(&net, 0.0, 0.0).unwrap();
        sgd_nesterov_step(&mut net, &grads, &mut state, 1e-3).unwrap();
        let after = net.forward(&x).unwrap().as_slice()[1];
        assert!(after > before, "{after} <= {before}");
    }

    #[test]
    fn negative_step_lowers_complementary_probability() {
        let mut net = init_network(&[2, 6, 3], 78).unwrap();
        let x = [0.4, -0.8];
        let before = net.forward(&x).unwrap().as_slice()[2];
        let (_, grads) = negative_ce_grad(&net, &x, 2, 0.8).unwrap();
        let mut state = OptimizerState::new(&net, 0.0, 0.0).unwrap();
        sgd_nesterov_step(&mut net, &grads, &mut state, 1e-3).unwrap();
        let after = net.forward(&x).unwrap().as_slice()[2];
        assert!(after < before, "{after} >= {before}");
    }

    #[test]
    fn length_mismatches_are_shape_errors() {
        let net = init_network(&[2, 3], 1).unwrap();
        let batch = vec![vec![0.0, 0.0]];
        let labels = vec![label(0, 1, 0.5), label(1, 0, 0.5)];
        assert!(matches!(self_labeling_loss(&net, &batch, &labels), Err(Error::Shape(_))));
    }

    #[test]
    fn supervised_rejects_out_of_range_label() {
        let net = init_network(&[2, 3], 1).unwrap();
        let r = supervised_loss(&net, &[vec![0.0, 0.0]], &[3]);
        assert!(matches!(r, Err(Error::Data(_))));
    }

    proptest! {
        #[test]
        fn losses_scale_linearly_in_weight(scale in 0.0f64..4.0, seed in 0u64..500) {
            let net = init_network(&[2, 4, 3], seed).unwrap();
            let batch = vec![vec![0.3, -0.1], vec![0.9, 0.4], vec![-0.5, 0.2]];
            let base = vec![label(0, 2, 0.5), label(1, 0, 0.25), label(2, 1, 0.75)];
            let scaled: Vec<ArtificialLabel> = base
                .iter()
                .map(|l| ArtificialLabel { weight: l.weight * scale, ..*l })
                .collect();
            let l1 = self_labeling_loss(&net, &batch, &base).unwrap();
            let l2 = self_labeling_loss(&net, &batch, &scaled).unwrap();
            prop_assert!((l2 - scale * l1).abs() < 1e-9 * (1.0 + l1.abs()));
        }

        #[test]
        fn components_are_non_negative(seed in 0u64..500) {
            let net = init_network(&[2, 5, 4], seed).unwrap();
            let xs = vec![vec![0.5, -0.5]];
            let ys = vec![seed as usize % 4];
            let unl = vec![vec![0.2, 0.8], vec![-0.4, 0.1]];
            let own = vec![label(0, 3, 0.6), label(2, 1, 0.4)];
            let other = vec![label(1, 2, 0.9), label(3, 0, 0.86)];
            let cfg = MixedLossConfig { lambda1: 2.0, lambda2: 1.0, tau: 0.85, ..MixedLossConfig::default() };
            let bd = mixed_loss(&net, &xs, &ys, &unl, Some(&own), Some(&other), &cfg).unwrap();
            prop_assert!(bd.sup >= 0.0);
            prop_assert!(bd.self_pos >= 0.0 && bd.self_neg >= 0.0);
            prop_assert!(bd.co_pos >= 0.0 && bd.co_neg >= 0.0);
            prop_assert!(bd.total >= 0.0);
        }

        #[test]
        fn exchange_count_is_monotone_in_tau(seed in 0u64..200) {
            let net = init_network(&[2, 4, 3], seed).unwrap();
            let batch = vec![vec![0.3, -0.1], vec![0.9, 0.4], vec![-0.5, 0.2], vec![0.1, 0.1]];
            let labels = vec![label(0, 2, 0.95), label(1, 0, 0.5), label(2, 1, 0.86), label(0, 1, 0.1)];
            let mut prev = usize::MAX;
            for tau in [0.0, 0.25, 0.5, 0.85, 0.9, 1.0] {
                let (_, count) = co_labeling_loss(&net, &batch, &labels, tau).unwrap();
                prop_assert!(count <= prev);
                prev = count;
            }
        }

        #[test]
        fn duplicating_batch_preserves_mean_losses(seed in 0u64..200) {
            let net = init_network(&[2, 4, 3], seed).unwrap();
            let batch = vec![vec![0.3, -0.1], vec![0.9, 0.4]];
            let labels = vec![label(0, 2, 0.7), label(1, 0, 0.9)];
            let mut doubled_batch = batch.clone();
            doubled_batch.extend_from_slice(&batch);
            let mut doubled_labels = labels.clone();
            doubled_labels.extend_from_slice(&labels);
            let l1 = self_labeling_loss(&net, &batch, &labels).unwrap();
            let l2 = self_labeling_loss(&net, &doubled_batch, &doubled_labels).unwrap();
            prop_assert!((l1 - l2).abs() < 1e-12);
            let (c1, n1) = co_labeling_loss(&net, &batch, &labels, 0.85).unwrap();
            let (c2, n2) = co_labeling_loss(&net, &doubled_batch, &doubled_labels, 0.85).unwrap();
            prop_assert!((c1 - c2).abs() < 1e-12);
            prop_assert_eq!(n2, 2 * n1);
        }
    }

    #[test]
    fn breakdown_arithmetic() {
        // lambda1 = 2, lambda2 = 1 over component sums 1.0 / 0.5 / 0.25.
        let bd = LossBreakdown {
            total: 1.0 + 2.0 * 0.5 + 1.0 * 0.25,
            sup: 1.0,
            self_pos: 0.3,
            self_neg: 0.2,
            co_pos: 0.15,
            co_neg: 0.10,
            exchanged_count: 1,
        };
        let recomposed = bd.sup + 2.0 * (bd.self_pos + bd.self_neg) + (bd.co_pos + bd.co_neg);
        assert!((bd.total - recomposed).abs() < 1e-12);
        assert!((bd.total - 2.25).abs() < 1e-12);
    }

    #[test]
    fn zero_net_uniform_self_loss_is_two_ln_two() {
        let net = NetworkParams::zeros(&[2, 2]).unwrap();
        let batch = vec![vec![0.7, -0.7]];
        let labels = vec![label(0, 1, 1.0)];
        let loss = self_labeling_loss(&net, &batch, &labels).unwrap();
        assert!((loss - 2.0 * std::f64::consts::LN_2).abs() < 1e-12);
    }
}
