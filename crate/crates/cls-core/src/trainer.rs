//! The training loop: dual-network cross labeling plus its ablations and the
//! single-network threshold baseline family.
//!
//! Each iteration draws one labeled batch of size `B` and one unlabeled
//! batch of size `mu * B`, lets both networks generate artificial labels
//! from weak views of the unlabeled batch, snapshots those labels, and then
//! trains each network on strong views with the mixed loss: its own labels
//! drive the self-labeling terms and the peer's snapshot drives the
//! tau-gated co-labeling terms. Both parameter updates use pre-step labels,
//! so neither network sees the other's new weights within an iteration.
//!
//! Determinism contract: network `b` owns `stream(seed_b, INIT)` and
//! `stream(seed_b, AUGMENT)`; batch sampling owns
//! `stream(data_seed, SAMPLE_*)`. Within one iteration worker `b` consumes
//! its augmentation stream in a fixed order: weak unlabeled views, weak
//! labeled views (when labeled augmentation is on), strong unlabeled views.
//! Swapping `(seed1, seed2)` therefore swaps the two networks' trajectories
//! exactly, and with `lambda2 = 0` (or `tau = 1`) network 1's trajectory is
//! independent of everything network 2 does.

use std::fmt;
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;

use crate::augment::{strong_augment, weak_augment, AugmentPolicy};
use crate::data::{diagnostic_pool, feature_std, BatchSampler, Dataset, UnlabeledSet};
use crate::error::{Error, Result};
use crate::labeling::{generate_labels, pseudo_label, sample_weight, threshold_multi_hot, ArtificialLabel};
use crate::losses::{mixed_loss_with_grad, LossBreakdown, MixedLossConfig};
use crate::metrics::{diagnostics, evaluate, MetricsRecord};
use crate::nn::{cosine_lr, init_network, sgd_nesterov_step, NetworkParams, OptimizerState};
use crate::rng::{purpose, stream};

/// Cap on the size of the fixed diagnostics pool.
pub const DIAG_POOL_CAP: usize = 1024;

// ---------------------------------------------------------------------------
// Variants
// ---------------------------------------------------------------------------

/// Training variant: the full method, its ablations, and the single-network
/// baseline family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Full dual-network cross labeling.
    Cls,
    /// Complementary-label (negative learning) terms removed.
    ClsNoNl,
    /// Entropy re-weighting removed: unit weights in the loss, true weights
    /// still drive the exchange gate.
    ClsNoRw,
    /// Label exchange removed (`lambda2` forced to 0).
    ClsNoCross,
    /// Single network, hard confidence gate `max(p) >= gamma`, pseudo labels
    /// only.
    Fixmatch,
    /// `fixmatch` plus complementary-label terms.
    FixmatchNl,
    /// `fixmatch` with the hard gate replaced by the entropy weight.
    FixmatchRw,
    /// Both modifications at once.
    FixmatchNlRw,
    /// Labeled data only; the unlabeled set is never touched.
    SupervisedOnly,
}

impl Variant {
    pub const ALL: [Variant; 9] = [
        Variant::Cls,
        Variant::ClsNoNl,
        Variant::ClsNoRw,
        Variant::ClsNoCross,
        Variant::Fixmatch,
        Variant::FixmatchNl,
        Variant::FixmatchRw,
        Variant::FixmatchNlRw,
        Variant::SupervisedOnly,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Cls => "cls",
            Variant::ClsNoNl => "cls_no_nl",
            Variant::ClsNoRw => "cls_no_rw",
            Variant::ClsNoCross => "cls_no_cross",
            Variant::Fixmatch => "fixmatch",
            Variant::FixmatchNl => "fixmatch_nl",
            Variant::FixmatchRw => "fixmatch_rw",
            Variant::FixmatchNlRw => "fixmatch_nl_rw",
            Variant::SupervisedOnly => "supervised_only",
        }
    }

    /// Whether both networks train (the cross-labeling family) or only
    /// network 1 does.
    pub fn is_dual(&self) -> bool {
        matches!(self, Variant::Cls | Variant::ClsNoNl | Variant::ClsNoRw | Variant::ClsNoCross)
    }

    pub fn is_fixmatch_family(&self) -> bool {
        matches!(
            self,
            Variant::Fixmatch | Variant::FixmatchNl | Variant::FixmatchRw | Variant::FixmatchNlRw
        )
    }

    pub fn uses_unlabeled(&self) -> bool {
        !matches!(self, Variant::SupervisedOnly)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .iter()
            .find(|v| v.as_str() == s)
            .copied()
            .ok_or_else(|| {
                let names: Vec<&str> = Variant::ALL.iter().map(Variant::as_str).collect();
                Error::config(format!("unknown variant {s:?}; valid variants: {}", names.join(", ")))
            })
    }
}

/// Augmentation applied to labeled samples before the supervised loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabeledAug {
    None,
    Weak,
}

impl FromStr for LabeledAug {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(LabeledAug::None),
            "weak" => Ok(LabeledAug::Weak),
            other => Err(Error::config(format!(
                "unknown labeled_aug {other:?}; valid values: none, weak"
            ))),
        }
    }
}

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

/// Every knob of a training run.
///
/// `weak_noise` / `strong_noise` are multiples of the mean per-feature
/// standard deviation of the training features; the absolute policy is
/// derived once at the start of `train`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrainConfig {
    /// Base learning rate.
    pub alpha: f64,
    /// Unlabeled-to-labeled batch size ratio.
    pub mu: usize,
    /// Labeled batch size.
    pub batch: usize,
    /// Total training iterations.
    pub t_total: usize,
    /// Exchange threshold: peer labels are used only when `weight > tau`.
    pub tau: f64,
    /// Self-labeling loss coefficient.
    pub lambda1: f64,
    /// Co-labeling loss coefficient.
    pub lambda2: f64,
    /// Confidence threshold of the single-network baseline gate.
    pub gamma: f64,
    /// Sharpening temperature (exposed for the sharpening utility; the hard
    /// label paths do not consume it).
    pub epsilon: f64,
    pub variant: Variant,
    pub seed1: u64,
    pub seed2: u64,
    /// Seed of the batch-sampling and diagnostics-pool streams (independent
    /// of the two network seeds).
    pub data_seed: u64,
    /// Hidden layer widths; the full architecture is `[D, hidden.., C]`.
    pub hidden: Vec<usize>,
    pub momentum: f64,
    pub weight_decay: f64,
    pub weak_noise: f64,
    pub strong_noise: f64,
    pub dropout_prob: f64,
    pub scale_jitter: f64,
    pub labeled_aug: LabeledAug,
    /// Evaluate every this many iterations (plus iteration 0 and the end).
    pub eval_every: usize,
    /// Decay of the diagnostic EMA of network 1.
    pub ema_decay: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            alpha: 0.03,
            mu: 8,
            batch: 64,
            t_total: 300,
            tau: 0.85,
            lambda1: 2.0,
            lambda2: 1.0,
            gamma: 0.95,
            epsilon: 0.5,
            variant: Variant::Cls,
            seed1: 1,
            seed2: 2,
            data_seed: 0,
            hidden: vec![32, 32],
            momentum: 0.9,
            weight_decay: 5e-4,
            weak_noise: 0.05,
            strong_noise: 0.2,
            dropout_prob: 0.2,
            scale_jitter: 0.2,
            labeled_aug: LabeledAug::Weak,
            eval_every: 50,
            ema_decay: 0.999,
        }
    }
}

impl TrainConfig {
    /// Check ranges and return a normalized copy (variant-specific
    /// constraints applied, e.g. `cls_no_cross` forces `lambda2 = 0`).
    pub fn validated(&self) -> Result<TrainConfig> {
        let mut cfg = self.clone();
        if !(cfg.alpha > 0.0) || !cfg.alpha.is_finite() {
            return Err(Error::config(format!("alpha {} must be positive", cfg.alpha)));
        }
        if cfg.mu < 1 {
            return Err(Error::config("mu must be at least 1"));
        }
        if cfg.batch < 1 {
            return Err(Error::config("batch size must be at least 1"));
        }
        if !(0.0..=1.0).contains(&cfg.tau) {
            return Err(Error::config(format!("tau {} not in [0,1]", cfg.tau)));
        }
        if cfg.lambda1 < 0.0 || cfg.lambda2 < 0.0 {
            return Err(Error::config("loss coefficients must be non-negative"));
        }
        if !(0.0..=1.0).contains(&cfg.gamma) {
            return Err(Error::config(format!("gamma {} not in [0,1]", cfg.gamma)));
        }
        if !(cfg.epsilon > 0.0) {
            return Err(Error::config(format!("epsilon {} must be positive", cfg.epsilon)));
        }
        if cfg.hidden.iter().any(|&h| h == 0) {
            return Err(Error::config("hidden layer widths must be positive"));
        }
        if !(0.0..1.0).contains(&cfg.momentum) {
            return Err(Error::config(format!("momentum {} not in [0,1)", cfg.momentum)));
        }
        if cfg.weight_decay < 0.0 {
            return Err(Error::config("weight decay must be non-negative"));
        }
        if cfg.eval_every < 1 {
            return Err(Error::config("eval_every must be at least 1"));
        }
        if !(0.0..1.0).contains(&cfg.ema_decay) {
            return Err(Error::config(format!("ema_decay {} not in [0,1)", cfg.ema_decay)));
        }
        if cfg.variant.is_dual() && cfg.seed1 == cfg.seed2 {
            return Err(Error::config(
                "dual-network variants need two different seeds (seed1 != seed2)",
            ));
        }
        // Augmentation sanity; absolute magnitudes are derived later.
        AugmentPolicy::new(cfg.weak_noise, cfg.strong_noise, cfg.dropout_prob, cfg.scale_jitter)?;
        if cfg.variant == Variant::ClsNoCross {
            cfg.lambda2 = 0.0;
        }
        Ok(cfg)
    }
}

// ---------------------------------------------------------------------------
// State
// ---------------------------------------------------------------------------

/// Mutable state of a run.
pub struct TrainState {
    pub t: usize,
    pub params1: NetworkParams,
    pub params2: NetworkParams,
    pub opt1: OptimizerState,
    pub opt2: OptimizerState,
    /// Diagnostic EMA of network 1; never used as a training signal.
    pub ema1: NetworkParams,
    pub aug_rng1: ChaCha8Rng,
    pub aug_rng2: ChaCha8Rng,
    pub policy: AugmentPolicy,
    labeled_sampler: BatchSampler,
    unlabeled_sampler: Option<BatchSampler>,
    pub consumed_labeled: usize,
    pub consumed_unlabeled: usize,
    pub last_loss1: Option<LossBreakdown>,
    pub last_loss2: Option<LossBreakdown>,
}

impl TrainState {
    /// Fresh state for a validated config and datasets.
    pub fn new(cfg: &TrainConfig, labeled: &Dataset, unlabeled: &UnlabeledSet) -> Result<Self> {
        let d = labeled.feature_dim();
        let c = labeled.class_count;
        let mut arch = Vec::with_capacity(cfg.hidden.len() + 2);
        arch.push(d);
        arch.extend_from_slice(&cfg.hidden);
        arch.push(c);
        let params1 = init_network(&arch, cfg.seed1)?;
        let params2 = init_network(&arch, cfg.seed2)?;
        let opt1 = OptimizerState::new(&params1, cfg.momentum, cfg.weight_decay)?;
        let opt2 = OptimizerState::new(&params2, cfg.momentum, cfg.weight_decay)?;
        // Noise scale comes from the features the variant actually trains
        // on; supervised-only must not read the unlabeled set at all.
        let std = if cfg.variant.uses_unlabeled() {
            feature_std(labeled, unlabeled)
        } else {
            feature_std(labeled, &UnlabeledSet { features: vec![] })
        };
        let policy = AugmentPolicy::new(
            cfg.weak_noise * std,
            cfg.strong_noise * std,
            cfg.dropout_prob,
            cfg.scale_jitter,
        )?;
        let unlabeled_sampler = if cfg.variant.uses_unlabeled() {
            Some(BatchSampler::new(unlabeled.len(), cfg.data_seed, purpose::SAMPLE_UNLABELED)?)
        } else {
            None
        };
        Ok(TrainState {
            t: 0,
            ema1: params1.clone(),
            params1,
            params2,
            opt1,
            opt2,
            aug_rng1: stream(cfg.seed1, purpose::AUGMENT),
            aug_rng2: stream(cfg.seed2, purpose::AUGMENT),
            policy,
            labeled_sampler: BatchSampler::new(labeled.len(), cfg.data_seed, purpose::SAMPLE_LABELED)?,
            unlabeled_sampler,
            consumed_labeled: 0,
            consumed_unlabeled: 0,
            last_loss1: None,
            last_loss2: None,
        })
    }
}

/// Diagnostic EMA update: `ema <- decay * ema + (1 - decay) * params`.
pub fn ema_update(ema: &mut NetworkParams, params: &NetworkParams, decay: f64) -> Result<()> {
    if !(0.0..1.0).contains(&decay) {
        return Err(Error::config(format!("ema decay {decay} not in [0,1)")));
    }
    if !ema.same_shape(params) {
        return Err(Error::shape("EMA/parameter shape mismatch"));
    }
    for (e, p) in ema.layers_mut().iter_mut().zip(params.layers()) {
        for (ew, pw) in e.weights.iter_mut().zip(&p.weights) {
            *ew = decay * *ew + (1.0 - decay) * pw;
        }
        for (eb, pb) in e.bias.iter_mut().zip(&p.bias) {
            *eb = decay * *eb + (1.0 - decay) * pb;
        }
    }
    Ok(())
}

fn mixed_cfg(cfg: &TrainConfig) -> MixedLossConfig {
    MixedLossConfig {
        lambda1: cfg.lambda1,
        lambda2: cfg.lambda2,
        tau: cfg.tau,
        use_negative: !matches!(
            cfg.variant,
            Variant::ClsNoNl | Variant::Fixmatch | Variant::FixmatchRw
        ),
        unit_weight: cfg.variant == Variant::ClsNoRw,
    }
}

/// Gate weight of the single-network baseline: 1/0 from the `gamma`
/// threshold on the pseudo class, or the entropy weight for the reweighted
/// variants.
pub fn fixmatch_weight(
    p: &crate::nn::ProbDist,
    variant: Variant,
    gamma: f64,
) -> Result<f64> {
    match variant {
        Variant::Fixmatch | Variant::FixmatchNl => {
            let hot = threshold_multi_hot(p, gamma)?;
            Ok(f64::from(hot.bits[pseudo_label(p)]))
        }
        Variant::FixmatchRw | Variant::FixmatchNlRw => sample_weight(p),
        other => Err(Error::config(format!("{other} is not a fixmatch-family variant"))),
    }
}

fn generate_phase(
    params: &NetworkParams,
    unl_xs: &[&Vec<f64>],
    policy: &AugmentPolicy,
    rng: &mut ChaCha8Rng,
    network_id: u8,
) -> Result<Vec<ArtificialLabel>> {
    unl_xs
        .iter()
        .map(|x| {
            let weak = weak_augment(x, policy, rng);
            generate_labels(params, &weak, network_id)
        })
        .collect()
}

fn view_phase(
    labeled_xs: &[&Vec<f64>],
    unl_xs: &[&Vec<f64>],
    cfg: &TrainConfig,
    policy: &AugmentPolicy,
    rng: &mut ChaCha8Rng,
) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let labeled_views = match cfg.labeled_aug {
        LabeledAug::Weak => labeled_xs.iter().map(|x| weak_augment(x, policy, rng)).collect(),
        LabeledAug::None => labeled_xs.iter().map(|x| (*x).clone()).collect(),
    };
    let strong_views = unl_xs.iter().map(|x| strong_augment(x, policy, rng)).collect();
    (labeled_views, strong_views)
}

/// One cross-labeling iteration over already drawn batches. Both label sets
/// are generated from pre-update parameters, both losses use the snapshots,
/// and both updates apply afterwards.
pub fn train_step(
    state: &mut TrainState,
    cfg: &TrainConfig,
    labeled_xs: &[&Vec<f64>],
    labeled_ys: &[usize],
    unl_xs: &[&Vec<f64>],
    lr: f64,
) -> Result<()> {
    let policy = state.policy;

    // Label generation, both networks, pre-update parameters.
    let labels1 = generate_phase(&state.params1, unl_xs, &policy, &mut state.aug_rng1, 1)?;
    let labels2 = generate_phase(&state.params2, unl_xs, &policy, &mut state.aug_rng2, 2)?;

    let ml = mixed_cfg(cfg);

    let (labeled1, strong1) = view_phase(labeled_xs, unl_xs, cfg, &policy, &mut state.aug_rng1);
    let (bd1, g1) = mixed_loss_with_grad(
        &state.params1,
        &labeled1,
        labeled_ys,
        &strong1,
        Some(&labels1),
        Some(&labels2),
        &ml,
    )?;

    let (labeled2, strong2) = view_phase(labeled_xs, unl_xs, cfg, &policy, &mut state.aug_rng2);
    let (bd2, g2) = mixed_loss_with_grad(
        &state.params2,
        &labeled2,
        labeled_ys,
        &strong2,
        Some(&labels2),
        Some(&labels1),
        &ml,
    )?;

    if !bd1.total.is_finite() || !bd2.total.is_finite() {
        return Err(Error::numeric(format!(
            "non-finite loss (net1 {}, net2 {})",
            bd1.total, bd2.total
        )));
    }

    sgd_nesterov_step(&mut state.params1, &g1, &mut state.opt1, lr)?;
    sgd_nesterov_step(&mut state.params2, &g2, &mut state.opt2, lr)?;
    ema_update(&mut state.ema1, &state.params1, cfg.ema_decay)?;
    state.last_loss1 = Some(bd1);
    state.last_loss2 = Some(bd2);
    Ok(())
}

/// One single-network baseline iteration: weak views produce pseudo (and
/// optionally complementary) labels whose weight comes from
/// [`fixmatch_weight`]; network 2 is untouched. The breakdown's
/// `exchanged_count` reports how many unlabeled samples carried a nonzero
/// gate weight.
pub fn fixmatch_step(
    state: &mut TrainState,
    cfg: &TrainConfig,
    labeled_xs: &[&Vec<f64>],
    labeled_ys: &[usize],
    unl_xs: &[&Vec<f64>],
    lr: f64,
) -> Result<()> {
    let policy = state.policy;
    let mut labels = Vec::with_capacity(unl_xs.len());
    for x in unl_xs {
        let weak = weak_augment(x, &policy, &mut state.aug_rng1);
        let p = state.params1.forward(&weak)?;
        let w = fixmatch_weight(&p, cfg.variant, cfg.gamma)?;
        labels.push(ArtificialLabel {
            pseudo_class: pseudo_label(&p),
            complementary_class: crate::labeling::complementary_label(&p),
            weight: w,
            network_id: 1,
        });
    }
    let ml = MixedLossConfig { lambda2: 0.0, ..mixed_cfg(cfg) };
    let (labeled1, strong1) = view_phase(labeled_xs, unl_xs, cfg, &policy, &mut state.aug_rng1);
    let (mut bd, grads) = mixed_loss_with_grad(
        &state.params1,
        &labeled1,
        labeled_ys,
        &strong1,
        Some(&labels),
        None,
        &ml,
    )?;
    bd.exchanged_count = labels.iter().filter(|l| l.weight > 0.0).count();
    if !bd.total.is_finite() {
        return Err(Error::numeric(format!("non-finite loss {}", bd.total)));
    }
    sgd_nesterov_step(&mut state.params1, &grads, &mut state.opt1, lr)?;
    ema_update(&mut state.ema1, &state.params1, cfg.ema_decay)?;
    state.last_loss1 = Some(bd);
    state.last_loss2 = None;
    Ok(())
}

fn supervised_step(
    state: &mut TrainState,
    cfg: &TrainConfig,
    labeled_xs: &[&Vec<f64>],
    labeled_ys: &[usize],
    lr: f64,
) -> Result<()> {
    let policy = state.policy;
    let ml = MixedLossConfig { lambda1: 0.0, lambda2: 0.0, ..mixed_cfg(cfg) };
    let (labeled1, _) = view_phase(labeled_xs, &[], cfg, &policy, &mut state.aug_rng1);
    let (bd, grads) =
        mixed_loss_with_grad(&state.params1, &labeled1, labeled_ys, &[], None, None, &ml)?;
    if !bd.total.is_finite() {
        return Err(Error::numeric(format!("non-finite loss {}", bd.total)));
    }
    sgd_nesterov_step(&mut state.params1, &grads, &mut state.opt1, lr)?;
    ema_update(&mut state.ema1, &state.params1, cfg.ema_decay)?;
    state.last_loss1 = Some(bd);
    state.last_loss2 = None;
    Ok(())
}

// ---------------------------------------------------------------------------
// Full runs
// ---------------------------------------------------------------------------

/// Everything a finished run returns.
#[derive(Debug, Clone)]
pub struct TrainOutput {
    pub params1: NetworkParams,
    pub params2: NetworkParams,
    pub ema1: NetworkParams,
    pub metrics: Vec<MetricsRecord>,
    pub consumed_labeled: usize,
    pub consumed_unlabeled: usize,
}

fn lr_for_row(cfg: &TrainConfig, iteration: usize) -> Result<f64> {
    if cfg.t_total == 0 {
        return Ok(cfg.alpha);
    }
    cosine_lr(iteration.saturating_sub(1), cfg.t_total, cfg.alpha)
}

/// Run the configured variant for `t_total` iterations.
///
/// Evaluates at iteration 0, every `eval_every` iterations, and at the end;
/// returns both networks, the diagnostic EMA, and the full metrics log.
pub fn train(
    config: &TrainConfig,
    labeled: &Dataset,
    unlabeled: &UnlabeledSet,
    test: &Dataset,
) -> Result<TrainOutput> {
    let cfg = config.validated()?;
    if labeled.is_empty() {
        return Err(Error::config("labeled set is empty"));
    }
    if test.is_empty() {
        return Err(Error::config("test set is empty"));
    }
    if cfg.variant.uses_unlabeled() && unlabeled.is_empty() {
        return Err(Error::config(format!(
            "variant {} needs unlabeled data, but the unlabeled set is empty",
            cfg.variant
        )));
    }
    let d = labeled.feature_dim();
    if test.feature_dim() != d {
        return Err(Error::config(format!(
            "test feature dim {} != training feature dim {d}",
            test.feature_dim()
        )));
    }
    if let Some(row) = unlabeled.features.first() {
        if row.len() != d {
            return Err(Error::config(format!(
                "unlabeled feature dim {} != labeled feature dim {d}",
                row.len()
            )));
        }
    }
    if test.class_count != labeled.class_count {
        return Err(Error::config(format!(
            "test has {} classes, labeled set has {}",
            test.class_count, labeled.class_count
        )));
    }

    let mut state = TrainState::new(&cfg, labeled, unlabeled)?;
    let pool = diagnostic_pool(unlabeled, DIAG_POOL_CAP, cfg.data_seed);
    let mut metrics = Vec::new();
    metrics.push(record_metrics(&state, &cfg, test, &pool, 0)?);

    for t in 1..=cfg.t_total {
        let lr = cosine_lr(t - 1, cfg.t_total, cfg.alpha)?;
        let labeled_idx = state.labeled_sampler.next_batch(cfg.batch);
        let labeled_xs: Vec<&Vec<f64>> = labeled_idx.iter().map(|&i| &labeled.features[i]).collect();
        let labeled_ys: Vec<usize> = labeled_idx.iter().map(|&i| labeled.labels[i]).collect();
        state.consumed_labeled += labeled_xs.len();

        let step = if cfg.variant.uses_unlabeled() {
            let unl_idx = state
                .unlabeled_sampler
                .as_mut()
                .expect("unlabeled sampler exists for SSL variants")
                .next_batch(cfg.mu * cfg.batch);
            let unl_xs: Vec<&Vec<f64>> = unl_idx.iter().map(|&i| &unlabeled.features[i]).collect();
            state.consumed_unlabeled += unl_xs.len();
            if cfg.variant.is_dual() {
                train_step(&mut state, &cfg, &labeled_xs, &labeled_ys, &unl_xs, lr)
            } else {
                fixmatch_step(&mut state, &cfg, &labeled_xs, &labeled_ys, &unl_xs, lr)
            }
        } else {
            supervised_step(&mut state, &cfg, &labeled_xs, &labeled_ys, lr)
        };
        step.map_err(|e| match e {
            Error::Numeric(msg) => Error::numeric(format!("iteration {t}: {msg}")),
            other => other,
        })?;
        state.t = t;

        if t % cfg.eval_every == 0 || t == cfg.t_total {
            metrics.push(record_metrics(&state, &cfg, test, &pool, t)?);
        }
    }

    Ok(TrainOutput {
        params1: state.params1,
        params2: state.params2,
        ema1: state.ema1,
        metrics,
        consumed_labeled: state.consumed_labeled,
        consumed_unlabeled: state.consumed_unlabeled,
    })
}

fn record_metrics(
    state: &TrainState,
    cfg: &TrainConfig,
    test: &Dataset,
    pool: &[Vec<f64>],
    iteration: usize,
) -> Result<MetricsRecord> {
    let acc1 = evaluate(&state.params1, test)?;
    let acc2 = evaluate(&state.params2, test)?;
    let acc_ema = evaluate(&state.ema1, test)?;
    let diag = diagnostics(&state.params1, &state.params2, &state.ema1, pool, cfg.tau)?;
    Ok(MetricsRecord {
        iteration,
        lr: lr_for_row(cfg, iteration)?,
        test_acc_net1: acc1,
        test_acc_net2: acc2,
        test_acc_mean: 0.5 * (acc1 + acc2),
        test_acc_ema: acc_ema,
        pl_overlap: diag.pl_overlap,
        nl_overlap: diag.nl_overlap,
        exchange_ratio: diag.exchange_ratio,
        dist_theta1_theta2: diag.dist_theta1_theta2,
        dist_theta1_ema: diag.dist_theta1_ema,
        loss_net1: state.last_loss1.clone(),
        loss_net2: state.last_loss2.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{make_two_moons, split_ssl};
    use crate::nn::NetworkParams;

    fn tiny_setup() -> (Dataset, UnlabeledSet, Dataset) {
        let source = make_two_moons(120, 0.1, 5).unwrap();
        let (labeled, unlabeled, _) = split_ssl(&source, 8, 3).unwrap();
        let test = make_two_moons(40, 0.1, 6).unwrap();
        (labeled, unlabeled, test)
    }

    fn tiny_config(variant: Variant) -> TrainConfig {
        TrainConfig {
            variant,
            t_total: 12,
            batch: 8,
            mu: 2,
            hidden: vec![8],
            eval_every: 4,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn variant_names_round_trip() {
        for v in Variant::ALL {
            assert_eq!(Variant::from_str(v.as_str()).unwrap(), v);
        }
        let err = Variant::from_str("bogus").unwrap_err().to_string();
        assert!(err.contains("cls_no_cross") && err.contains("supervised_only"), "{err}");
    }

    #[test]
    fn no_cross_forces_lambda2_zero() {
        let cfg = tiny_config(Variant::ClsNoCross).validated().unwrap();
        assert_eq!(cfg.lambda2, 0.0);
    }

    #[test]
    fn dual_variants_reject_equal_seeds() {
        let cfg = TrainConfig { seed1: 3, seed2: 3, ..tiny_config(Variant::Cls) };
        assert!(cfg.validated().is_err());
        let cfg = TrainConfig { seed1: 3, seed2: 3, ..tiny_config(Variant::SupervisedOnly) };
        assert!(cfg.validated().is_ok());
    }

    #[test]
    fn zero_iterations_returns_initial_params() {
        let (labeled, unlabeled, test) = tiny_setup();
        let cfg = TrainConfig { t_total: 0, ..tiny_config(Variant::Cls) };
        let out = train(&cfg, &labeled, &unlabeled, &test).unwrap();
        let arch = [2, 8, 2];
        assert_eq!(out.params1, init_network(&arch, cfg.seed1).unwrap());
        assert_eq!(out.params2, init_network(&arch, cfg.seed2).unwrap());
        assert_eq!(out.metrics.len(), 1);
        assert_eq!(out.metrics[0].iteration, 0);
        assert_eq!(out.consumed_labeled, 0);
    }

    #[test]
    fn training_is_deterministic() {
        let (labeled, unlabeled, test) = tiny_setup();
        let cfg = tiny_config(Variant::Cls);
        let a = train(&cfg, &labeled, &unlabeled, &test).unwrap();
        let b = train(&cfg, &labeled, &unlabeled, &test).unwrap();
        assert_eq!(a.params1, b.params1);
        assert_eq!(a.params2, b.params2);
        assert_eq!(a.metrics, b.metrics);
    }

    #[test]
    fn batch_accounting_is_exact() {
        let (labeled, unlabeled, test) = tiny_setup();
        let cfg = tiny_config(Variant::Cls);
        let out = train(&cfg, &labeled, &unlabeled, &test).unwrap();
        assert_eq!(out.consumed_labeled, cfg.batch * cfg.t_total);
        assert_eq!(out.consumed_unlabeled, cfg.mu * cfg.batch * cfg.t_total);
    }

    #[test]
    fn supervised_only_ignores_unlabeled_data() {
        let (labeled, unlabeled, test) = tiny_setup();
        let other_unlabeled =
            UnlabeledSet { features: unlabeled.features.iter().map(|r| vec![r[0] + 5.0, r[1]]).collect() };
        let cfg = tiny_config(Variant::SupervisedOnly);
        let a = train(&cfg, &labeled, &unlabeled, &test).unwrap();
        let b = train(&cfg, &labeled, &other_unlabeled, &test).unwrap();
        assert_eq!(a.params1, b.params1);
        assert_eq!(a.consumed_unlabeled, 0);
        assert!(a.metrics.iter().all(|m| m.loss_net2.is_none()));
    }

    #[test]
    fn ssl_variants_need_unlabeled_data() {
        let (labeled, _, test) = tiny_setup();
        let empty = UnlabeledSet { features: vec![] };
        let err = train(&tiny_config(Variant::Cls), &labeled, &empty, &test).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        assert!(train(&tiny_config(Variant::SupervisedOnly), &labeled, &empty, &test).is_ok());
    }

    #[test]
    fn ema_update_edge_cases() {
        let params = init_network(&[2, 3, 2], 1).unwrap();
        let mut ema = NetworkParams::zeros(&[2, 3, 2]).unwrap();
        ema_update(&mut ema, &params, 0.0).unwrap();
        assert_eq!(ema, params);

        let mut ema = NetworkParams::zeros(&[1, 1]).unwrap();
        let mut one = NetworkParams::zeros(&[1, 1]).unwrap();
        one.layers_mut()[0].weights[0] = 1.0;
        ema_update(&mut ema, &one, 0.999).unwrap();
        assert!((ema.layers()[0].weights[0] - 0.001).abs() < 1e-15);

        assert!(ema_update(&mut ema, &one, 1.0).is_err());
        let wrong = NetworkParams::zeros(&[2, 1]).unwrap();
        assert!(ema_update(&mut ema, &wrong, 0.5).is_err());
    }

    #[test]
    fn fixmatch_weight_variants() {
        let p = crate::nn::ProbDist::new(vec![0.96, 0.04]).unwrap();
        assert_eq!(fixmatch_weight(&p, Variant::Fixmatch, 0.95).unwrap(), 1.0);
        assert_eq!(fixmatch_weight(&p, Variant::Fixmatch, 0.97).unwrap(), 0.0);
        assert_eq!(fixmatch_weight(&p, Variant::Fixmatch, 0.0).unwrap(), 1.0);
        let uniform = crate::nn::ProbDist::new(vec![0.5, 0.5]).unwrap();
        assert!(fixmatch_weight(&uniform, Variant::FixmatchRw, 0.95).unwrap().abs() < 1e-12);
        assert!(fixmatch_weight(&p, Variant::Cls, 0.95).is_err());
    }

    #[test]
    fn gamma_one_never_contributes_unlabeled_loss() {
        let (labeled, unlabeled, test) = tiny_setup();
        let cfg = TrainConfig { gamma: 1.0, ..tiny_config(Variant::Fixmatch) };
        let out = train(&cfg, &labeled, &unlabeled, &test).unwrap();
        for m in &out.metrics {
            if let Some(bd) = &m.loss_net1 {
                assert_eq!(bd.self_pos, 0.0);
                assert_eq!(bd.self_neg, 0.0);
                assert_eq!(bd.exchanged_count, 0);
            }
        }
    }

    #[test]
    fn gamma_zero_passes_every_sample() {
        let (labeled, unlabeled, test) = tiny_setup();
        let cfg = TrainConfig { gamma: 0.0, t_total: 2, eval_every: 1, ..tiny_config(Variant::Fixmatch) };
        let out = train(&cfg, &labeled, &unlabeled, &test).unwrap();
        let bd = out.metrics.last().unwrap().loss_net1.as_ref().unwrap();
        assert_eq!(bd.exchanged_count, cfg.mu * cfg.batch);
    }

    #[test]
    fn lr_trace_matches_schedule() {
        let (labeled, unlabeled, test) = tiny_setup();
        let cfg = tiny_config(Variant::Cls);
        let out = train(&cfg, &labeled, &unlabeled, &test).unwrap();
        for m in &out.metrics {
            let expected =
                cosine_lr(m.iteration.saturating_sub(1), cfg.t_total, cfg.alpha).unwrap();
            assert_eq!(m.lr, expected, "iteration {}", m.iteration);
        }
    }
}
