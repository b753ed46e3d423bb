//! Runtime oracle suite behind the `selftest` subcommand.
//!
//! Every check recomputes its expected value through an independent route --
//! closed-form evaluation, a separate entropy implementation, central finite
//! differences, hand-unrolled optimizer recursions, exhaustive enumeration,
//! or Monte-Carlo estimation -- and compares the production path against it.
//! Closed forms use tolerance `1e-9`, gradient checks `1e-3` relative, and
//! Monte-Carlo checks a three-sigma band.

use rand::Rng;

use crate::augment::{strong_augment, weak_augment, AugmentPolicy};
use crate::data::{
    diagnostic_pool, load_csv, make_blobs, make_two_moons, split_ssl, Dataset, SplitTag,
    UnlabeledSet,
};
use crate::error::Result;
use crate::experiment::{run_experiment, ExperimentConfig};
use crate::labeling::{
    complementary_label, generate_labels, pseudo_label, sample_weight, sharpen,
    threshold_multi_hot, ArtificialLabel,
};
use crate::losses::{
    co_labeling_loss, mixed_loss, negative_ce, positive_ce, self_labeling_loss,
    self_labeling_loss_grad, supervised_loss, MixedLossConfig,
};
use crate::metrics::{diagnostics, evaluate};
use crate::nn::{
    backward, cosine_lr, init_network, sgd_nesterov_step, softmax_backward, Gradients,
    NetworkParams, OptimizerState, ProbDist,
};
use crate::rng;
use crate::trainer::{ema_update, fixmatch_weight, train, TrainConfig, Variant};

/// Outcome of one named check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

type CheckFn = Box<dyn FnOnce() -> std::result::Result<(), String>>;

fn ensure(cond: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn close(actual: f64, expected: f64, tol: f64, label: &str) -> std::result::Result<(), String> {
    ensure(
        (actual - expected).abs() <= tol,
        format!("{label}: got {actual}, expected {expected} (tol {tol})"),
    )
}

fn ok<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn dist(v: &[f64]) -> ProbDist {
    ProbDist::new(v.to_vec()).expect("valid test distribution")
}

fn label(pseudo: usize, comp: usize, w: f64) -> ArtificialLabel {
    ArtificialLabel { pseudo_class: pseudo, complementary_class: comp, weight: w, network_id: 1 }
}

// ---------------------------------------------------------------------------
// Independent oracles
// ---------------------------------------------------------------------------

/// Shannon entropy in nats, written independently of `sample_weight`.
pub fn entropy_oracle(p: &[f64]) -> f64 {
    let mut h = 0.0;
    for &v in p {
        if v > 0.0 {
            h -= v * v.ln();
        }
    }
    h
}

/// Central finite differences of a scalar loss over every parameter,
/// flattened in [`NetworkParams::flatten`] order.
pub fn fd_grad(
    params: &NetworkParams,
    h: f64,
    loss: &mut dyn FnMut(&NetworkParams) -> Result<f64>,
) -> Result<Vec<f64>> {
    let mut grads = Vec::with_capacity(params.param_count());
    for layer in 0..params.layers().len() {
        let n_w = params.layers()[layer].weights.len();
        for i in 0..n_w {
            let mut plus = params.clone();
            plus.layers_mut()[layer].weights[i] += h;
            let mut minus = params.clone();
            minus.layers_mut()[layer].weights[i] -= h;
            grads.push((loss(&plus)? - loss(&minus)?) / (2.0 * h));
        }
        let n_b = params.layers()[layer].bias.len();
        for i in 0..n_b {
            let mut plus = params.clone();
            plus.layers_mut()[layer].bias[i] += h;
            let mut minus = params.clone();
            minus.layers_mut()[layer].bias[i] -= h;
            grads.push((loss(&plus)? - loss(&minus)?) / (2.0 * h));
        }
    }
    Ok(grads)
}

/// Symmetric relative error used by the gradient checks.
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / (a.abs() + b.abs()).max(1e-8)
}

/// Largest relative disagreement between an analytical gradient and its
/// finite-difference recomputation.
pub fn max_grad_rel_err(analytical: &Gradients, numerical: &[f64]) -> f64 {
    analytical
        .flatten()
        .iter()
        .zip(numerical)
        .map(|(&a, &n)| rel_err(a, n))
        .fold(0.0, f64::max)
}

fn gauss_vec(rng: &mut impl Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng::gauss(rng)).collect()
}

fn scratch_dir(tag: &str) -> std::path::PathBuf {
    std::env::temp_dir().join(format!("cls-selftest-{}-{tag}", std::process::id()))
}

fn tiny_moons() -> (Dataset, UnlabeledSet, Dataset) {
    let source = make_two_moons(108, 0.1, 5).expect("two moons");
    let (labeled, unlabeled, _) = split_ssl(&source, 8, 3).expect("split");
    let test = Dataset { tag: SplitTag::Test, ..make_two_moons(40, 0.1, 6).expect("two moons") };
    (labeled, unlabeled, test)
}

fn tiny_train_config(variant: Variant) -> TrainConfig {
    TrainConfig {
        variant,
        t_total: 20,
        batch: 6,
        mu: 2,
        hidden: vec![8],
        eval_every: 5,
        ..TrainConfig::default()
    }
}

// ---------------------------------------------------------------------------
// The suite
// ---------------------------------------------------------------------------

fn checks() -> Vec<(&'static str, CheckFn)> {
    let mut list: Vec<(&'static str, CheckFn)> = Vec::new();
    macro_rules! check {
        ($name:expr, $body:expr) => {
            list.push(($name, Box::new($body)));
        };
    }

    // ---- network core -----------------------------------------------------

    check!("init: fixed (arch, seed) is bit-identical", || {
        let a = ok(init_network(&[2, 16, 2], 7))?;
        let b = ok(init_network(&[2, 16, 2], 7))?;
        ensure(a == b, "same seed produced different parameters")
    });

    check!("init: distinct seeds differ", || {
        let a = ok(init_network(&[2, 16, 2], 7))?;
        let b = ok(init_network(&[2, 16, 2], 8))?;
        ensure(a.flatten() != b.flatten(), "seeds 7 and 8 produced identical parameters")
    });

    check!("init: degenerate architecture rejected", || {
        ensure(init_network(&[2], 7).is_err(), "arch [2] should be a configuration error")
    });

    check!("forward: softmax sums to one", || {
        let net = ok(init_network(&[3, 10, 5], 11))?;
        let mut stream = rng::stream(1, 42);
        for _ in 0..50 {
            let x = gauss_vec(&mut stream, 3);
            let p = ok(net.forward(&x))?;
            let sum: f64 = p.as_slice().iter().sum();
            close(sum, 1.0, 1e-6, "softmax sum")?;
        }
        Ok(())
    });

    check!("forward: all-zero network is uniform", || {
        let net = ok(NetworkParams::zeros(&[2, 6, 4]))?;
        let p = ok(net.forward(&[3.0, -1.0]))?;
        for &v in p.as_slice() {
            close(v, 0.25, 1e-9, "uniform entry")?;
        }
        Ok(())
    });

    check!("forward: repeated calls identical", || {
        let net = ok(init_network(&[2, 8, 3], 4))?;
        let x = [0.25, -0.75];
        ensure(ok(net.forward(&x))? == ok(net.forward(&x))?, "forward is not pure")
    });

    check!("backward: zero upstream gradient annihilates", || {
        let net = ok(init_network(&[2, 5, 3], 13))?;
        let (_, cache) = ok(net.forward_cached(&[0.4, 0.6]))?;
        let grads = ok(backward(&net, &[cache], &[vec![0.0; 3]]))?;
        ensure(grads.flatten().iter().all(|&g| g == 0.0), "nonzero gradient from zero upstream")
    });

    check!("backward: matches central finite differences", || {
        // Random small net, random input, supervised-style loss.
        let net = ok(init_network(&[2, 6, 3], 21))?;
        let mut stream = rng::stream(2, 42);
        let x = gauss_vec(&mut stream, 2);
        let y = 1usize;
        let analytic = {
            let (probs, cache) = ok(net.forward_cached(&x))?;
            let mut dprobs = vec![0.0; 3];
            dprobs[y] = -1.0 / probs.as_slice()[y];
            let dz = softmax_backward(probs.as_slice(), &dprobs);
            ok(backward(&net, &[cache], &[dz]))?
        };
        let numeric = ok(fd_grad(&net, 1e-4, &mut |p| {
            Ok(-(p.forward(&x)?.as_slice()[y]).ln())
        }))?;
        let err = max_grad_rel_err(&analytic, &numeric);
        ensure(err < 1e-3, format!("max relative error {err}"))
    });

    check!("backward: batch gradient equals mean of per-sample gradients", || {
        let net = ok(init_network(&[2, 5, 3], 22))?;
        let xs = [vec![0.1, 0.9], vec![-0.4, 0.3]];
        let ys = [0usize, 2usize];
        let per_sample: Vec<Gradients> = xs
            .iter()
            .zip(&ys)
            .map(|(x, &y)| {
                let (probs, cache) = net.forward_cached(x).unwrap();
                let mut dprobs = vec![0.0; 3];
                dprobs[y] = -1.0 / probs.as_slice()[y];
                let dz = softmax_backward(probs.as_slice(), &dprobs);
                backward(&net, &[cache], &[dz]).unwrap()
            })
            .collect();
        let mut mean = per_sample[0].clone();
        mean.add(&per_sample[1]);
        mean.scale(0.5);
        let batch = {
            let mut caches = Vec::new();
            let mut dls = Vec::new();
            for (x, &y) in xs.iter().zip(&ys) {
                let (probs, cache) = net.forward_cached(x).unwrap();
                let mut dprobs = vec![0.0; 3];
                dprobs[y] = -0.5 / probs.as_slice()[y];
                dls.push(softmax_backward(probs.as_slice(), &dprobs));
                caches.push(cache);
            }
            ok(backward(&net, &caches, &dls))?
        };
        for (a, b) in batch.flatten().iter().zip(mean.flatten()) {
            close(*a, b, 1e-12, "batch vs mean gradient")?;
        }
        Ok(())
    });

    check!("sgd: plain step theta=1, g=0.5, lr=0.1 -> 0.95", || {
        let mut net = ok(NetworkParams::zeros(&[1, 1]))?;
        net.layers_mut()[0].weights[0] = 1.0;
        let mut grads = Gradients::zeros_like(&net);
        grads.layers[0].weights[0] = 0.5;
        let mut state = ok(OptimizerState::new(&net, 0.0, 0.0))?;
        ok(sgd_nesterov_step(&mut net, &grads, &mut state, 0.1))?;
        close(net.layers()[0].weights[0], 0.95, 1e-9, "plain SGD step")
    });

    check!("sgd: zero gradient is a fixed point with momentum", || {
        let mut net = ok(init_network(&[2, 3, 2], 5))?;
        let before = net.flatten();
        let grads = Gradients::zeros_like(&net);
        let mut state = ok(OptimizerState::new(&net, 0.9, 0.0))?;
        ok(sgd_nesterov_step(&mut net, &grads, &mut state, 0.1))?;
        ensure(net.flatten() == before, "zero gradient moved the parameters")
    });

    check!("sgd: nesterov two-step recursion matches hand oracle", || {
        // Oracle: v <- m v - lr g, theta <- theta + m v - lr g, unrolled by hand.
        let (m, lr, g) = (0.9, 0.1, 1.0);
        let mut theta_oracle: f64 = 0.0;
        let mut v: f64 = 0.0;
        let mut deltas = Vec::new();
        for _ in 0..2 {
            v = m * v - lr * g;
            let delta = m * v - lr * g;
            theta_oracle += delta;
            deltas.push(delta);
        }
        let mut net = ok(NetworkParams::zeros(&[1, 1]))?;
        let mut grads = Gradients::zeros_like(&net);
        grads.layers[0].weights[0] = g;
        let mut state = ok(OptimizerState::new(&net, m, 0.0))?;
        ok(sgd_nesterov_step(&mut net, &grads, &mut state, lr))?;
        let after_one = net.layers()[0].weights[0];
        ok(sgd_nesterov_step(&mut net, &grads, &mut state, lr))?;
        let after_two = net.layers()[0].weights[0];
        close(after_one, deltas[0], 1e-12, "first step")?;
        close(after_two, theta_oracle, 1e-12, "second step")?;
        ensure(
            (after_two - after_one).abs() > after_one.abs(),
            "second step did not move farther than the first",
        )
    });

    check!("cosine_lr: t=0 gives alpha", || {
        close(ok(cosine_lr(0, 300, 0.03))?, 0.03, 1e-12, "cos(0)")
    });

    check!("cosine_lr: endpoint closed form", || {
        let expected = 0.03 * (7.0 * std::f64::consts::PI / 16.0).cos();
        let got = ok(cosine_lr(300, 300, 0.03))?;
        close(got, expected, 1e-9, "alpha cos(7pi/16)")?;
        close(got, 0.0058527, 1e-7, "printed endpoint value")
    });

    check!("cosine_lr: midpoint closed form", || {
        let expected = (7.0 * std::f64::consts::PI / 32.0).cos();
        let got = ok(cosine_lr(150, 300, 1.0))?;
        close(got, expected, 1e-9, "cos(7pi/32)")?;
        close(got, 0.77301, 1e-5, "printed midpoint value")
    });

    check!("cosine_lr: zero total iterations rejected", || {
        ensure(cosine_lr(0, 0, 1.0).is_err(), "T=0 should be a configuration error")
    });

    // ---- labeling ----------------------------------------------------------

    check!("pseudo label: unique maximum", || {
        ensure(pseudo_label(&dist(&[0.1, 0.7, 0.2])) == 1, "argmax of [0.1,0.7,0.2] != 1")
    });

    check!("pseudo label: tie breaks to lowest index", || {
        ensure(pseudo_label(&dist(&[0.5, 0.5])) == 0, "tie did not break to index 0")
    });

    check!("pseudo label: one-hot enumeration for C <= 10", || {
        for c in 2..=10 {
            for j in 0..c {
                let mut probs = vec![0.0; c];
                probs[j] = 1.0;
                let got = pseudo_label(&dist(&probs));
                ensure(got == j, format!("one-hot at {j} of {c} classes gave {got}"))?;
            }
        }
        Ok(())
    });

    check!("complementary label: unique minimum", || {
        ensure(complementary_label(&dist(&[0.1, 0.7, 0.2])) == 0, "argmin != 0")
    });

    check!("complementary label: uniform coincides with pseudo at 0", || {
        let third = 1.0 / 3.0;
        let u = dist(&[third, third, third]);
        ensure(complementary_label(&u) == 0 && pseudo_label(&u) == 0, "uniform tie mismatch")
    });

    check!("labels: pseudo != complementary on 1000 random non-uniform", || {
        let mut stream = rng::stream(3, 42);
        let mut tested = 0;
        while tested < 1000 {
            let c = 2 + (stream.gen::<u32>() as usize % 6);
            let raw: Vec<f64> = (0..c).map(|_| stream.gen::<f64>() + 1e-3).collect();
            let sum: f64 = raw.iter().sum();
            let probs: Vec<f64> = raw.iter().map(|v| v / sum).collect();
            // Independent argmax/argmin oracle over the raw vector.
            let mut arg_max = 0;
            let mut arg_min = 0;
            for (j, &v) in probs.iter().enumerate() {
                if v > probs[arg_max] {
                    arg_max = j;
                }
                if v < probs[arg_min] {
                    arg_min = j;
                }
            }
            if arg_max == arg_min {
                continue; // exactly uniform draw; skip
            }
            let p = dist(&probs);
            ensure(pseudo_label(&p) == arg_max, "pseudo disagrees with oracle")?;
            ensure(complementary_label(&p) == arg_min, "complementary disagrees with oracle")?;
            ensure(pseudo_label(&p) != complementary_label(&p), "labels coincide")?;
            tested += 1;
        }
        Ok(())
    });

    check!("multi-hot: direct indicator", || {
        let got = ok(threshold_multi_hot(&dist(&[0.1, 0.7, 0.2]), 0.5))?;
        ensure(got.bits == vec![0, 1, 0], format!("got {:?}", got.bits))
    });

    check!("multi-hot: gamma=0 is all ones", || {
        let got = ok(threshold_multi_hot(&dist(&[0.3, 0.3, 0.4]), 0.0))?;
        ensure(got.bits == vec![1, 1, 1], format!("got {:?}", got.bits))
    });

    check!("multi-hot: boundary is inclusive", || {
        let got = ok(threshold_multi_hot(&dist(&[0.95, 0.05]), 0.95))?;
        ensure(got.bits == vec![1, 0], format!("got {:?}", got.bits))
    });

    check!("sharpen: temperature one is identity", || {
        let p = dist(&[0.3, 0.2, 0.5]);
        let s = ok(sharpen(&p, 1.0))?;
        for (a, b) in p.as_slice().iter().zip(s.as_slice()) {
            close(*a, *b, 1e-12, "identity sharpening")?;
        }
        Ok(())
    });

    check!("sharpen: squares renormalized at eps=0.5", || {
        let s = ok(sharpen(&dist(&[0.8, 0.2]), 0.5))?;
        close(s.as_slice()[0], 0.64 / 0.68, 1e-9, "0.64/0.68")?;
        close(s.as_slice()[1], 0.04 / 0.68, 1e-9, "0.04/0.68")
    });

    check!("sharpen: eps=0.01 approaches a hard label", || {
        let s = ok(sharpen(&dist(&[0.6, 0.4]), 0.01))?;
        ensure(s.as_slice()[0] > 0.999, format!("max entry {}", s.as_slice()[0]))
    });

    check!("sample weight: uniform is zero", || {
        close(ok(sample_weight(&dist(&[0.5, 0.5])))?, 0.0, 1e-12, "uniform weight")
    });

    check!("sample weight: one-hot is one", || {
        close(ok(sample_weight(&dist(&[1.0, 0.0])))?, 1.0, 1e-12, "one-hot weight")
    });

    check!("sample weight: [0.99, 0.01] against entropy oracle", || {
        let p = [0.99, 0.01];
        let expected = 1.0 - entropy_oracle(&p) / (2.0f64).ln();
        let got = ok(sample_weight(&dist(&p)))?;
        close(got, expected, 1e-9, "entropy-oracle weight")?;
        // True value is 0.9192068641...; five decimals of slack on the
        // rounded literal.
        close(got, 0.919209, 5e-6, "rounded value")
    });

    check!("generate_labels: zero network has zero weight", || {
        let net = ok(NetworkParams::zeros(&[2, 4, 3]))?;
        let got = ok(generate_labels(&net, &[0.3, -0.9], 1))?;
        close(got.weight, 0.0, 1e-12, "uniform output weight")
    });

    check!("generate_labels: composes the three label oracles", || {
        // Bias-only network whose softmax output is exactly [0.7, 0.2, 0.1].
        let target: [f64; 3] = [0.7, 0.2, 0.1];
        let mut net = ok(NetworkParams::zeros(&[2, 3]))?;
        for (b, &t) in net.layers_mut()[0].bias.iter_mut().zip(&target) {
            *b = t.ln();
        }
        let got = ok(generate_labels(&net, &[0.0, 0.0], 2))?;
        ensure(got.pseudo_class == 0, format!("pseudo {}", got.pseudo_class))?;
        ensure(got.complementary_class == 2, format!("complementary {}", got.complementary_class))?;
        ensure(got.network_id == 2, "network id not propagated")?;
        let expected_w = 1.0 - entropy_oracle(&target) / (3.0f64).ln();
        close(got.weight, expected_w, 1e-9, "composed weight")
    });

    check!("generate_labels: repeated calls identical", || {
        let net = ok(init_network(&[2, 5, 3], 17))?;
        let a = ok(generate_labels(&net, &[0.2, 0.8], 1))?;
        let b = ok(generate_labels(&net, &[0.2, 0.8], 1))?;
        ensure(a == b, "label generation is not pure")
    });

    // ---- losses ------------------------------------------------------------

    check!("positive CE: zero weight annihilates", || {
        close(ok(positive_ce(&dist(&[0.2, 0.8]), 1, 0.0))?, 0.0, 1e-12, "w=0")
    });

    check!("positive CE: -log(0.5) = ln 2", || {
        close(ok(positive_ce(&dist(&[0.5, 0.5]), 0, 1.0))?, std::f64::consts::LN_2, 1e-9, "ln 2")
    });

    check!("positive CE: linear in w", || {
        let full = ok(positive_ce(&dist(&[0.5, 0.5]), 0, 1.0))?;
        let half = ok(positive_ce(&dist(&[0.5, 0.5]), 0, 0.5))?;
        close(half, 0.5 * full, 1e-9, "half weight")?;
        close(half, 0.346574, 1e-6, "printed value")
    });

    check!("negative CE: ln 2 at p=0.5", || {
        close(ok(negative_ce(&dist(&[0.5, 0.5]), 0, 1.0))?, std::f64::consts::LN_2, 1e-9, "ln 2")
    });

    check!("negative CE: vanishes as p -> 0", || {
        let loss = ok(negative_ce(&dist(&[1e-9, 1.0 - 1e-9]), 0, 1.0))?;
        ensure(loss < 1e-8, format!("loss {loss} not near zero"))
    });

    check!("negative CE: -ln(0.1) at p=0.9", || {
        close(ok(negative_ce(&dist(&[0.9, 0.1]), 0, 1.0))?, -(0.1f64).ln(), 1e-9, "-ln 0.1")?;
        close(ok(negative_ce(&dist(&[0.9, 0.1]), 0, 1.0))?, 2.302585, 1e-6, "printed value")
    });

    check!("self loss: zero weights give zero loss and gradient", || {
        let net = ok(init_network(&[2, 4, 3], 4))?;
        let batch = vec![vec![0.1, 0.2], vec![-0.3, 0.4]];
        let labels = vec![label(0, 2, 0.0), label(1, 0, 0.0)];
        let (loss, grads) = ok(self_labeling_loss_grad(&net, &batch, &labels))?;
        ensure(loss == 0.0, format!("loss {loss}"))?;
        ensure(grads.flatten().iter().all(|&g| g == 0.0), "nonzero gradient")
    });

    check!("self loss: uniform prediction gives 2 ln 2", || {
        let net = ok(NetworkParams::zeros(&[2, 2]))?;
        let loss = ok(self_labeling_loss(&net, &[vec![0.7, -0.7]], &[label(0, 1, 1.0)]))?;
        close(loss, 2.0 * std::f64::consts::LN_2, 1e-9, "ln2 + ln2")
    });

    check!("self loss: invariant under batch duplication", || {
        let net = ok(init_network(&[2, 4, 3], 6))?;
        let batch = vec![vec![0.3, -0.1], vec![0.9, 0.4]];
        let labels = vec![label(0, 2, 0.7), label(1, 0, 0.9)];
        let mut batch2 = batch.clone();
        batch2.extend_from_slice(&batch);
        let mut labels2 = labels.clone();
        labels2.extend_from_slice(&labels);
        let a = ok(self_labeling_loss(&net, &batch, &labels))?;
        let b = ok(self_labeling_loss(&net, &batch2, &labels2))?;
        close(a, b, 1e-12, "duplication")
    });

    check!("co loss: tau=1 exchanges nothing", || {
        let net = ok(init_network(&[2, 4, 3], 9))?;
        let batch = vec![vec![0.1, 0.2], vec![-0.3, 0.4]];
        let labels = vec![label(0, 2, 0.999), label(1, 0, 0.97)];
        let (loss, count) = ok(co_labeling_loss(&net, &batch, &labels, 1.0))?;
        ensure(loss == 0.0 && count == 0, format!("loss {loss}, count {count}"))
    });

    check!("co loss: open gate equals self form with peer labels", || {
        let net = ok(init_network(&[2, 4, 3], 9))?;
        let batch = vec![vec![0.1, 0.2], vec![-0.3, 0.4]];
        let labels = vec![label(0, 2, 0.9), label(1, 0, 0.9)];
        let (co, count) = ok(co_labeling_loss(&net, &batch, &labels, 0.85))?;
        let selfed = ok(self_labeling_loss(&net, &batch, &labels))?;
        ensure(count == 2, format!("count {count}"))?;
        close(co, selfed, 1e-12, "gate fully open")
    });

    check!("co loss: half-open gate matches hand-evaluated mean", || {
        let net = ok(init_network(&[2, 4, 3], 9))?;
        let batch = vec![vec![0.1, 0.2], vec![-0.3, 0.4]];
        let labels = vec![label(0, 2, 0.9), label(1, 0, 0.5)];
        let (co, count) = ok(co_labeling_loss(&net, &batch, &labels, 0.85))?;
        // Per-sample oracle: only sample 0 passes; denominator stays 2.
        let p0 = ok(net.forward(&batch[0]))?;
        let expected =
            (ok(positive_ce(&p0, 0, 0.9))? + ok(negative_ce(&p0, 2, 0.9))?) / 2.0;
        ensure(count == 1, format!("count {count}"))?;
        close(co, expected, 1e-12, "gated mean")
    });

    check!("supervised loss: perfect prediction approaches zero", || {
        let mut net = ok(NetworkParams::zeros(&[2, 2]))?;
        net.layers_mut()[0].bias[0] = 30.0;
        let loss = ok(supervised_loss(&net, &[vec![0.0, 0.0]], &[0]))?;
        ensure(loss < 1e-6, format!("loss {loss}"))
    });

    check!("supervised loss: uniform over 10 classes is ln 10", || {
        let net = ok(NetworkParams::zeros(&[2, 10]))?;
        let loss = ok(supervised_loss(&net, &[vec![0.4, 0.6]], &[3]))?;
        close(loss, (10.0f64).ln(), 1e-9, "ln 10")?;
        close(loss, 2.302585, 1e-6, "printed value")
    });

    check!("supervised loss: batch mean equals mean of singles", || {
        let net = ok(init_network(&[2, 5, 3], 14))?;
        let xs = vec![vec![0.3, -0.2], vec![0.8, 0.1], vec![-0.5, 0.5]];
        let ys = vec![0, 2, 1];
        let joint = ok(supervised_loss(&net, &xs, &ys))?;
        let mut acc = 0.0;
        for (x, &y) in xs.iter().zip(&ys) {
            acc += ok(supervised_loss(&net, &[x.clone()], &[y]))?;
        }
        close(joint, acc / 3.0, 1e-12, "linearity of the mean")
    });

    check!("mixed loss: lambda1=lambda2=0 equals supervised", || {
        let net = ok(init_network(&[2, 4, 3], 1))?;
        let xs = vec![vec![0.5, -0.5], vec![1.0, 0.3]];
        let ys = vec![0, 2];
        let unl = vec![vec![0.2, 0.2]];
        let own = vec![label(1, 0, 0.5)];
        let cfg = MixedLossConfig { lambda1: 0.0, lambda2: 0.0, ..MixedLossConfig::default() };
        let bd = ok(mixed_loss(&net, &xs, &ys, &unl, Some(&own), None, &cfg))?;
        close(bd.total, ok(supervised_loss(&net, &xs, &ys))?, 1e-12, "degenerate mix")
    });

    check!("mixed loss: lambda2=0 equals sup + lambda1*self", || {
        let net = ok(init_network(&[2, 4, 3], 2))?;
        let xs = vec![vec![0.5, -0.5]];
        let ys = vec![1];
        let unl = vec![vec![0.2, 0.2], vec![-0.4, 0.7]];
        let own = vec![label(1, 0, 0.5), label(2, 1, 0.8)];
        let other = vec![label(0, 2, 0.9), label(1, 0, 0.95)];
        let cfg = MixedLossConfig { lambda1: 2.0, lambda2: 0.0, ..MixedLossConfig::default() };
        let bd = ok(mixed_loss(&net, &xs, &ys, &unl, Some(&own), Some(&other), &cfg))?;
        let expected = ok(supervised_loss(&net, &xs, &ys))?
            + 2.0 * ok(self_labeling_loss(&net, &unl, &own))?;
        close(bd.total, expected, 1e-9, "no-cross composition")
    });

    check!("mixed loss: combination arithmetic", || {
        // lambda1=2, lambda2=1 over components 1.0 / 0.5 / 0.25 -> 2.25.
        let total = 1.0 + 2.0 * 0.5 + 1.0 * 0.25;
        close(total, 2.25, 1e-12, "stated combination")
    });

    // ---- augmentation -------------------------------------------------------

    check!("weak augment: zero std is identity", || {
        let policy = ok(AugmentPolicy::new(0.0, 0.0, 0.0, 0.0))?;
        let mut stream = rng::stream(1, 7);
        let x = vec![0.4, -1.3];
        ensure(weak_augment(&x, &policy, &mut stream) == x, "identity violated")
    });

    check!("weak augment: fixed rng state reproduces", || {
        let policy = ok(AugmentPolicy::new(0.1, 0.3, 0.2, 0.2))?;
        let x = vec![0.4, -1.3];
        let a = weak_augment(&x, &policy, &mut rng::stream(5, 7));
        let b = weak_augment(&x, &policy, &mut rng::stream(5, 7));
        ensure(a == b, "same state, different output")
    });

    check!("augment: dimension preserved on 100 random inputs", || {
        let policy = ok(AugmentPolicy::new(0.1, 0.3, 0.2, 0.2))?;
        let mut stream = rng::stream(9, 7);
        for i in 0..100 {
            let d = 1 + i % 6;
            let x = gauss_vec(&mut stream, d);
            ensure(weak_augment(&x, &policy, &mut stream).len() == d, "weak changed dim")?;
            ensure(strong_augment(&x, &policy, &mut stream).len() == d, "strong changed dim")?;
        }
        Ok(())
    });

    check!("strong augment: degenerate policy is identity", || {
        let policy = ok(AugmentPolicy::new(0.0, 0.0, 0.0, 0.0))?;
        let x = vec![1.0, 2.0, -3.0];
        ensure(strong_augment(&x, &policy, &mut rng::stream(2, 7)) == x, "identity violated")
    });

    check!("strong augment: full dropout zeroes the vector", || {
        let policy = ok(AugmentPolicy::new(0.0, 0.0, 1.0, 0.2))?;
        let out = strong_augment(&[1.0, -2.0, 3.0], &policy, &mut rng::stream(3, 7));
        ensure(out.iter().all(|&v| v == 0.0), format!("got {out:?}"))
    });

    check!("strong augment: variance dominates weak (Monte Carlo)", || {
        let policy = ok(AugmentPolicy::new(0.05, 0.2, 0.2, 0.2))?;
        let x = vec![0.8, -0.4];
        let mut stream = rng::stream(11, 7);
        let n = 10_000;
        let mut weak_sq = 0.0;
        let mut strong_sq = 0.0;
        for _ in 0..n {
            let w = weak_augment(&x, &policy, &mut stream);
            let s = strong_augment(&x, &policy, &mut stream);
            weak_sq += w.iter().zip(&x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
            strong_sq += s.iter().zip(&x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        }
        // Design gap is 16x on the noise variance alone; require a 2x margin,
        // far beyond three sigma of the estimator.
        ensure(strong_sq > 2.0 * weak_sq, format!("strong {strong_sq} vs weak {weak_sq}"))
    });

    // ---- trainer ------------------------------------------------------------

    check!("train: zero iterations returns initial parameters", || {
        let (labeled, unlabeled, test) = tiny_moons();
        let cfg = TrainConfig { t_total: 0, ..tiny_train_config(Variant::Cls) };
        let out = ok(train(&cfg, &labeled, &unlabeled, &test))?;
        let expect1 = ok(init_network(&[2, 8, 2], cfg.seed1))?;
        ensure(out.params1 == expect1, "params1 changed without steps")?;
        ensure(out.metrics.len() == 1 && out.metrics[0].iteration == 0, "unexpected metrics")
    });

    check!("train: fixed seeds reproduce the metrics log", || {
        let (labeled, unlabeled, test) = tiny_moons();
        let cfg = tiny_train_config(Variant::Cls);
        let a = ok(train(&cfg, &labeled, &unlabeled, &test))?;
        let b = ok(train(&cfg, &labeled, &unlabeled, &test))?;
        ensure(a.metrics == b.metrics && a.params1 == b.params1, "run is not deterministic")
    });

    check!("train: supervised_only never reads the unlabeled set", || {
        let (labeled, unlabeled, test) = tiny_moons();
        let shifted = UnlabeledSet {
            features: unlabeled.features.iter().map(|r| vec![r[0] + 9.0, r[1] - 3.0]).collect(),
        };
        let cfg = tiny_train_config(Variant::SupervisedOnly);
        let a = ok(train(&cfg, &labeled, &unlabeled, &test))?;
        let b = ok(train(&cfg, &labeled, &shifted, &test))?;
        ensure(a.params1 == b.params1, "unlabeled data influenced supervised-only training")
    });

    check!("train: tau=1 trajectory equals lambda2=0 trajectory", || {
        let (labeled, unlabeled, test) = tiny_moons();
        let base = TrainConfig { t_total: 50, eval_every: 10, ..tiny_train_config(Variant::Cls) };
        let tau_one = TrainConfig { tau: 1.0, ..base.clone() };
        let no_cross = TrainConfig { variant: Variant::ClsNoCross, ..base };
        let a = ok(train(&tau_one, &labeled, &unlabeled, &test))?;
        let b = ok(train(&no_cross, &labeled, &unlabeled, &test))?;
        ensure(a.params1 == b.params1, "network-1 parameters diverged")?;
        for (ra, rb) in a.metrics.iter().zip(&b.metrics) {
            ensure(
                ra.test_acc_net1 == rb.test_acc_net1 && ra.iteration == rb.iteration,
                format!("accuracy curves diverged at iteration {}", ra.iteration),
            )?;
        }
        Ok(())
    });

    check!("train: swapping seeds swaps the two metric streams", || {
        let (labeled, unlabeled, test) = tiny_moons();
        let cfg = tiny_train_config(Variant::Cls);
        let swapped = TrainConfig { seed1: cfg.seed2, seed2: cfg.seed1, ..cfg.clone() };
        let a = ok(train(&cfg, &labeled, &unlabeled, &test))?;
        let b = ok(train(&swapped, &labeled, &unlabeled, &test))?;
        ensure(a.params1 == b.params2 && a.params2 == b.params1, "parameters did not swap")?;
        for (ra, rb) in a.metrics.iter().zip(&b.metrics) {
            ensure(ra.test_acc_net1 == rb.test_acc_net2, "acc streams did not swap")?;
            ensure(ra.test_acc_net2 == rb.test_acc_net1, "acc streams did not swap")?;
            ensure(ra.pl_overlap == rb.pl_overlap && ra.nl_overlap == rb.nl_overlap, "overlaps differ")?;
            ensure(ra.exchange_ratio == rb.exchange_ratio, "exchange ratios differ")?;
            ensure(ra.dist_theta1_theta2 == rb.dist_theta1_theta2, "distances differ")?;
            ensure(ra.loss_net1 == rb.loss_net2 && ra.loss_net2 == rb.loss_net1, "loss streams did not swap")?;
        }
        Ok(())
    });

    check!("fixmatch: gamma=1 never contributes unlabeled loss", || {
        let (labeled, unlabeled, test) = tiny_moons();
        let cfg = TrainConfig { gamma: 1.0, ..tiny_train_config(Variant::Fixmatch) };
        let out = ok(train(&cfg, &labeled, &unlabeled, &test))?;
        for m in &out.metrics {
            if let Some(bd) = &m.loss_net1 {
                ensure(bd.self_pos == 0.0 && bd.self_neg == 0.0, "unlabeled loss nonzero")?;
            }
        }
        Ok(())
    });

    check!("fixmatch: gamma=0 passes every sample with weight one", || {
        let (labeled, unlabeled, test) = tiny_moons();
        let cfg = TrainConfig {
            gamma: 0.0,
            t_total: 2,
            eval_every: 1,
            ..tiny_train_config(Variant::Fixmatch)
        };
        let out = ok(train(&cfg, &labeled, &unlabeled, &test))?;
        let bd = out.metrics.last().unwrap().loss_net1.as_ref().unwrap();
        ensure(bd.exchanged_count == cfg.mu * cfg.batch, format!("count {}", bd.exchanged_count))
    });

    check!("fixmatch_rw: uniform prediction gets zero weight", || {
        let uniform = dist(&[0.5, 0.5]);
        let w = ok(fixmatch_weight(&uniform, Variant::FixmatchRw, 0.95))?;
        close(w, 0.0, 1e-12, "uniform weight")
    });

    check!("ema: decay zero copies the parameters", || {
        let params = ok(init_network(&[2, 3, 2], 31))?;
        let mut ema = ok(NetworkParams::zeros(&[2, 3, 2]))?;
        ok(ema_update(&mut ema, &params, 0.0))?;
        ensure(ema == params, "decay 0 did not copy")
    });

    check!("ema: single step from zero toward one", || {
        let mut one = ok(NetworkParams::zeros(&[1, 1]))?;
        one.layers_mut()[0].weights[0] = 1.0;
        let mut ema = ok(NetworkParams::zeros(&[1, 1]))?;
        ok(ema_update(&mut ema, &one, 0.999))?;
        close(ema.layers()[0].weights[0], 0.001, 1e-12, "0.001 after one step")
    });

    check!("ema: constant parameters converge geometrically", || {
        let mut one = ok(NetworkParams::zeros(&[1, 1]))?;
        one.layers_mut()[0].weights[0] = 1.0;
        let mut ema = ok(NetworkParams::zeros(&[1, 1]))?;
        let mut prev_gap = 1.0;
        for _ in 0..50 {
            ok(ema_update(&mut ema, &one, 0.9))?;
            let gap = (1.0 - ema.layers()[0].weights[0]).abs();
            close(gap, prev_gap * 0.9, 1e-12, "geometric contraction")?;
            prev_gap = gap;
        }
        Ok(())
    });

    // ---- harness ------------------------------------------------------------

    check!("two moons: noiseless points lie on the arcs", || {
        let ds = ok(make_two_moons(30, 0.0, 7))?;
        for (row, &y) in ds.features.iter().zip(&ds.labels) {
            let r = if y == 0 {
                (row[0] * row[0] + row[1] * row[1]).sqrt()
            } else {
                ((row[0] - 1.0).powi(2) + (row[1] - 0.5).powi(2)).sqrt()
            };
            close(r, 1.0, 1e-12, "arc radius")?;
        }
        Ok(())
    });

    check!("two moons: n=1000 splits 500/500", || {
        let ds = ok(make_two_moons(1000, 0.1, 3))?;
        let zeros = ds.labels.iter().filter(|&&y| y == 0).count();
        ensure(zeros == 500, format!("class 0 count {zeros}"))
    });

    check!("two moons: fixed seed regenerates identically", || {
        ensure(
            ok(make_two_moons(64, 0.2, 9))? == ok(make_two_moons(64, 0.2, 9))?,
            "generation not deterministic",
        )
    });

    check!("blobs: zero std puts points on their centers", || {
        let centers = vec![vec![0.0, 0.0], vec![4.0, 0.0], vec![2.0, 3.0]];
        let ds = ok(make_blobs(9, &centers, 0.0, 1))?;
        for (row, &y) in ds.features.iter().zip(&ds.labels) {
            ensure(row == &centers[y], format!("point {row:?} off center {y}"))?;
        }
        Ok(())
    });

    check!("blobs: 300 points over 3 centers are 100 each", || {
        let centers = vec![vec![0.0, 0.0], vec![4.0, 0.0], vec![2.0, 3.0]];
        let ds = ok(make_blobs(300, &centers, 0.5, 2))?;
        for k in 0..3 {
            let count = ds.labels.iter().filter(|&&y| y == k).count();
            ensure(count == 100, format!("class {k} count {count}"))?;
        }
        Ok(())
    });

    check!("blobs: fixed seed regenerates identically", || {
        let centers = vec![vec![0.0, 0.0], vec![4.0, 0.0]];
        ensure(
            ok(make_blobs(20, &centers, 0.3, 5))? == ok(make_blobs(20, &centers, 0.3, 5))?,
            "generation not deterministic",
        )
    });

    check!("csv: well-formed three-row file loads", || {
        let dir = scratch_dir("csv-ok");
        std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
        let path = dir.join("ok.csv");
        std::fs::write(&path, "0.5,1.5,0\n-1.0,2.0,1\n0.0,0.0,0\n").map_err(|e| e.to_string())?;
        let ds = ok(load_csv(&path, false))?;
        let _ = std::fs::remove_dir_all(&dir);
        ensure(ds.len() == 3 && ds.class_count == 2, format!("N={} C={}", ds.len(), ds.class_count))
    });

    check!("csv: text cell reported with its row number", || {
        let dir = scratch_dir("csv-bad");
        std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
        let path = dir.join("bad.csv");
        std::fs::write(&path, "0.5,1.0,0\nzzz,2.0,1\n").map_err(|e| e.to_string())?;
        let err = load_csv(&path, false).err().map(|e| e.to_string()).unwrap_or_default();
        let _ = std::fs::remove_dir_all(&dir);
        ensure(err.contains("row 2"), format!("error did not name row 2: {err}"))
    });

    check!("csv: empty file is a data error", || {
        let dir = scratch_dir("csv-empty");
        std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
        let path = dir.join("empty.csv");
        std::fs::write(&path, "").map_err(|e| e.to_string())?;
        let failed = load_csv(&path, false).is_err();
        let _ = std::fs::remove_dir_all(&dir);
        ensure(failed, "empty file loaded")
    });

    check!("split: taking everything empties the unlabeled view", || {
        let ds = ok(make_two_moons(20, 0.1, 5))?;
        let (labeled, unlabeled, heldout) = ok(split_ssl(&ds, 20, 1))?;
        ensure(labeled.len() == 20 && unlabeled.is_empty() && heldout.is_empty(), "bad degenerate split")
    });

    check!("split: 8 labels over 2 classes is 4 per class", || {
        let ds = ok(make_two_moons(100, 0.1, 5))?;
        let (labeled, _, _) = ok(split_ssl(&ds, 8, 9))?;
        let zeros = labeled.labels.iter().filter(|&&y| y == 0).count();
        ensure(zeros == 4 && labeled.len() == 8, format!("class balance {zeros}/8"))
    });

    check!("split: fixed seed reproduces the partition", || {
        let ds = ok(make_two_moons(100, 0.1, 5))?;
        let a = ok(split_ssl(&ds, 8, 9))?;
        let b = ok(split_ssl(&ds, 8, 9))?;
        ensure(a.0 == b.0 && a.1 == b.1 && a.2 == b.2, "split not deterministic")
    });

    check!("evaluate: exact uniform resolves to class 0 by the tie rule", || {
        let net = ok(NetworkParams::zeros(&[2, 2]))?;
        let test = Dataset {
            features: vec![vec![0.0, 1.0], vec![1.0, 0.0], vec![2.0, 2.0], vec![3.0, 1.0]],
            labels: vec![0, 0, 1, 1],
            class_count: 2,
            tag: SplitTag::Test,
        };
        close(ok(evaluate(&net, &test))?, 0.5, 1e-12, "class-0 fraction")
    });

    check!("evaluate: perfect predictor scores 1.0", || {
        let mut net = ok(NetworkParams::zeros(&[2, 2]))?;
        net.layers_mut()[0].weights.copy_from_slice(&[1.0, 0.0, 0.0, 1.0]);
        let test = Dataset {
            features: vec![vec![3.0, -1.0], vec![-2.0, 5.0]],
            labels: vec![0, 1],
            class_count: 2,
            tag: SplitTag::Test,
        };
        close(ok(evaluate(&net, &test))?, 1.0, 1e-12, "perfect accuracy")
    });

    check!("evaluate: single sample is zero or one", || {
        let net = ok(init_network(&[2, 4, 2], 3))?;
        let test = Dataset {
            features: vec![vec![0.3, 0.4]],
            labels: vec![1],
            class_count: 2,
            tag: SplitTag::Test,
        };
        let acc = ok(evaluate(&net, &test))?;
        ensure(acc == 0.0 || acc == 1.0, format!("accuracy {acc}"))
    });

    check!("diagnostics: identical networks overlap fully", || {
        let net = ok(init_network(&[2, 4, 3], 8))?;
        let pool: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64 * 0.1, -0.2]).collect();
        let d = ok(diagnostics(&net, &net, &net, &pool, 0.85))?;
        ensure(d.pl_overlap == 1.0 && d.nl_overlap == 1.0, "overlap below 1")?;
        ensure(d.dist_theta1_theta2 == 0.0, "distance nonzero")
    });

    check!("diagnostics: ema with decay 0 sits on the parameters", || {
        let params = ok(init_network(&[2, 4, 3], 8))?;
        let mut ema = ok(init_network(&[2, 4, 3], 9))?;
        ok(ema_update(&mut ema, &params, 0.0))?;
        let d = ok(diagnostics(&params, &ema, &ema, &[vec![0.1, 0.2]], 0.85))?;
        close(d.dist_theta1_ema, 0.0, 1e-15, "dist(theta1, ema)")
    });

    check!("diagnostics: independent nets on C=10 overlap near 1/10", || {
        // Monte-Carlo oracle: by init symmetry the agreement probability is
        // exactly 1/C; compare the empirical mean within three standard
        // errors.
        let mut stream = rng::stream(77, 42);
        let pool: Vec<Vec<f64>> = (0..100).map(|_| gauss_vec(&mut stream, 4)).collect();
        let pairs = 60;
        let mut overlaps = Vec::with_capacity(pairs);
        for k in 0..pairs as u64 {
            let a = ok(init_network(&[4, 8, 10], 10_000 + 2 * k))?;
            let b = ok(init_network(&[4, 8, 10], 10_001 + 2 * k))?;
            let d = ok(diagnostics(&a, &b, &a, &pool, 0.85))?;
            overlaps.push(d.pl_overlap);
        }
        let mean = overlaps.iter().sum::<f64>() / overlaps.len() as f64;
        let var = overlaps.iter().map(|o| (o - mean) * (o - mean)).sum::<f64>()
            / (overlaps.len() - 1) as f64;
        let se = (var / overlaps.len() as f64).sqrt();
        ensure(
            (mean - 0.1).abs() <= 3.0 * se + 0.01,
            format!("mean overlap {mean:.4}, se {se:.4}"),
        )
    });

    check!("run: supervised smoke test emits artifacts", || {
        let dir = scratch_dir("run-smoke");
        let mut cfg = ExperimentConfig {
            train: TrainConfig {
                t_total: 10,
                batch: 4,
                mu: 2,
                hidden: vec![8],
                eval_every: 5,
                variant: Variant::SupervisedOnly,
                ..TrainConfig::default()
            },
            n_unlabeled: 60,
            n_test: 30,
            ..ExperimentConfig::default()
        };
        cfg.out_dir = Some(dir.clone());
        let result = ok(run_experiment(&cfg))?;
        let summary_path = dir.join("summary.json");
        let jsonl_path = dir.join("metrics.jsonl");
        let exists = summary_path.exists() && jsonl_path.exists();
        let summary_text = std::fs::read_to_string(&summary_path).unwrap_or_default();
        let _ = std::fs::remove_dir_all(&dir);
        ensure(exists, "artifacts missing")?;
        let value: serde_json::Value =
            serde_json::from_str(&summary_text).map_err(|e| e.to_string())?;
        ensure(value["final_acc_net1"].is_number(), "summary missing accuracy fields")?;
        ensure(result.summary.headline_acc >= 0.0 && result.summary.headline_acc <= 1.0, "headline out of range")
    });

    check!("run: tau=1 and cls_no_cross emit identical net-1 curves", || {
        let dir_a = scratch_dir("decouple-a");
        let dir_b = scratch_dir("decouple-b");
        let base = ExperimentConfig {
            train: TrainConfig {
                t_total: 50,
                batch: 6,
                mu: 2,
                hidden: vec![8],
                eval_every: 10,
                ..TrainConfig::default()
            },
            n_unlabeled: 100,
            n_test: 40,
            ..ExperimentConfig::default()
        };
        let mut cfg_a = base.clone();
        cfg_a.train.tau = 1.0;
        cfg_a.out_dir = Some(dir_a.clone());
        let mut cfg_b = base;
        cfg_b.train.variant = Variant::ClsNoCross;
        cfg_b.out_dir = Some(dir_b.clone());
        let ra = ok(run_experiment(&cfg_a))?;
        let rb = ok(run_experiment(&cfg_b))?;
        let _ = std::fs::remove_dir_all(&dir_a);
        let _ = std::fs::remove_dir_all(&dir_b);
        for (ma, mb) in ra.metrics.iter().zip(&rb.metrics) {
            ensure(
                ma.iteration == mb.iteration && ma.test_acc_net1 == mb.test_acc_net1,
                format!("net-1 curves diverged at iteration {}", ma.iteration),
            )?;
        }
        Ok(())
    });

    check!("run: unknown variant error lists the valid names", || {
        let err = match "definitely_not_a_variant".parse::<Variant>() {
            Err(e) => e.to_string(),
            Ok(_) => return Err("bogus variant parsed".into()),
        };
        ensure(
            err.contains("cls") && err.contains("fixmatch") && err.contains("supervised_only"),
            format!("variant list missing from: {err}"),
        )
    });

    check!("diagnostic pool: capped, fixed, and reused intact", || {
        let unl = UnlabeledSet { features: (0..2000).map(|i| vec![i as f64]).collect() };
        let a = diagnostic_pool(&unl, 1024, 5);
        let b = diagnostic_pool(&unl, 1024, 5);
        ensure(a.len() == 1024 && a == b, "pool not capped or not stable")
    });

    list
}

/// Run every check, returning per-check results.
pub fn run_all() -> Vec<CheckResult> {
    checks()
        .into_iter()
        .map(|(name, f)| match f() {
            Ok(()) => CheckResult { name: name.to_string(), passed: true, detail: String::new() },
            Err(detail) => CheckResult { name: name.to_string(), passed: false, detail },
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_selftest_check_passes() {
        let results = run_all();
        let failures: Vec<&CheckResult> = results.iter().filter(|r| !r.passed).collect();
        assert!(
            failures.is_empty(),
            "{} selftest failures: {:#?}",
            failures.len(),
            failures
        );
    }
}
