//! Minimal feed-forward classifier with hand-written gradients.
//!
//! The network is a plain MLP: dense layers with ReLU activations on every
//! hidden layer and a softmax on the final logits. Everything is `f64`, and
//! forward/backward are written out by hand for this fixed family so the
//! gradient of every loss in [`crate::losses`] is exact and checkable
//! against finite differences.

use crate::error::{Error, Result};
use crate::rng;

/// Probabilities below this floor (or above `1 - floor`) are clamped before
/// any logarithm; `-log(1 - p)` is undefined at `p = 1`.
pub const PROB_FLOOR: f64 = 1e-12;

/// Clamp a probability into `[PROB_FLOOR, 1 - PROB_FLOOR]`.
pub fn clamp_prob(p: f64) -> f64 {
    p.clamp(PROB_FLOOR, 1.0 - PROB_FLOOR)
}

// ---------------------------------------------------------------------------
// ProbDist
// ---------------------------------------------------------------------------

/// A categorical distribution over `C` classes.
///
/// Entries are non-negative and sum to 1 within `1e-6`. Distributions
/// produced by [`ProbDist::softmax`] have every entry strictly inside
/// `(0, 1)` for finite logits.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbDist {
    probs: Vec<f64>,
}

impl ProbDist {
    /// Build a distribution from raw probabilities, validating the invariants.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::shape("probability vector must be non-empty"));
        }
        let mut sum = 0.0;
        for (j, &p) in probs.iter().enumerate() {
            if !p.is_finite() || !(0.0..=1.0).contains(&p) {
                return Err(Error::shape(format!("probability {p} at index {j} not in [0,1]")));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > 1e-6 {
            return Err(Error::shape(format!("probabilities sum to {sum}, expected 1")));
        }
        Ok(ProbDist { probs })
    }

    /// Numerically stable softmax (max-subtraction) of a logit vector.
    pub fn softmax(logits: &[f64]) -> Result<Self> {
        if logits.is_empty() {
            return Err(Error::shape("logit vector must be non-empty"));
        }
        let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return Err(Error::numeric("non-finite logits in softmax"));
        }
        let exps: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
        let sum: f64 = exps.iter().sum();
        Ok(ProbDist { probs: exps.iter().map(|&e| e / sum).collect() })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.probs
    }
}

// ---------------------------------------------------------------------------
// Network parameters
// ---------------------------------------------------------------------------

/// One dense layer: `z = W x + b`, weights row-major with shape
/// `(out_dim, in_dim)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    pub in_dim: usize,
    pub out_dim: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl DenseLayer {
    fn zeros(in_dim: usize, out_dim: usize) -> Self {
        DenseLayer { in_dim, out_dim, weights: vec![0.0; in_dim * out_dim], bias: vec![0.0; out_dim] }
    }

    /// `z = W x + b`.
    fn affine(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        for o in 0..self.out_dim {
            let row = &self.weights[o * self.in_dim..(o + 1) * self.in_dim];
            let mut z = self.bias[o];
            for (w, xi) in row.iter().zip(x.iter()) {
                z += w * xi;
            }
            out.push(z);
        }
    }
}

/// All trainable weights and biases of one classifier.
///
/// Layer shapes chain: the input dimension of layer `k+1` equals the output
/// dimension of layer `k`. A run trains two independently initialized
/// instances of this type.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams {
    layers: Vec<DenseLayer>,
}

impl NetworkParams {
    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [DenseLayer] {
        &mut self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim
    }

    /// Number of classes (width of the final layer).
    pub fn class_count(&self) -> usize {
        self.layers[self.layers.len() - 1].out_dim
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum()
    }

    /// A network of the given architecture with every weight and bias zero.
    pub fn zeros(arch: &[usize]) -> Result<Self> {
        validate_arch(arch)?;
        let layers = arch.windows(2).map(|w| DenseLayer::zeros(w[0], w[1])).collect();
        Ok(NetworkParams { layers })
    }

    /// Flatten all parameters into one vector (weights then bias per layer).
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for l in &self.layers {
            out.extend_from_slice(&l.weights);
            out.extend_from_slice(&l.bias);
        }
        out
    }

    /// Structural compatibility check (same layer shapes).
    pub fn same_shape(&self, other: &NetworkParams) -> bool {
        self.layers.len() == other.layers.len()
            && self
                .layers
                .iter()
                .zip(&other.layers)
                .all(|(a, b)| a.in_dim == b.in_dim && a.out_dim == b.out_dim)
    }
}

fn validate_arch(arch: &[usize]) -> Result<()> {
    if arch.len() < 2 {
        return Err(Error::config(format!(
            "architecture needs at least input and output sizes, got {arch:?}"
        )));
    }
    if let Some(zero) = arch.iter().position(|&s| s == 0) {
        return Err(Error::config(format!("layer width 0 at position {zero} in {arch:?}")));
    }
    Ok(())
}

/// Initialize a network from `arch = [input, hidden..., classes]`.
///
/// Weights are zero-mean Gaussian scaled by `sqrt(2 / fan_in)` (He init for
/// the ReLU hidden stack); biases start at zero. The same `(arch, seed)`
/// pair yields bit-identical parameters.
pub fn init_network(arch: &[usize], seed: u64) -> Result<NetworkParams> {
    validate_arch(arch)?;
    let mut stream = rng::stream(seed, rng::purpose::INIT);
    let mut layers = Vec::with_capacity(arch.len() - 1);
    for w in arch.windows(2) {
        let (fan_in, fan_out) = (w[0], w[1]);
        let std = (2.0 / fan_in as f64).sqrt();
        let weights = (0..fan_in * fan_out).map(|_| std * rng::gauss(&mut stream)).collect();
        layers.push(DenseLayer { in_dim: fan_in, out_dim: fan_out, weights, bias: vec![0.0; fan_out] });
    }
    Ok(NetworkParams { layers })
}

// ---------------------------------------------------------------------------
// Forward
// ---------------------------------------------------------------------------

/// Per-layer inputs recorded during a forward pass, consumed by [`backward`].
///
/// `inputs[k]` is the vector fed into layer `k`; for `k >= 1` it is the
/// post-ReLU output of layer `k-1`, which doubles as the ReLU mask.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    inputs: Vec<Vec<f64>>,
}

impl NetworkParams {
    /// Class probabilities for one input: ReLU hidden stack, softmax head.
    pub fn forward(&self, x: &[f64]) -> Result<ProbDist> {
        self.forward_cached(x).map(|(p, _)| p)
    }

    /// Forward pass that also records the activations needed by [`backward`].
    pub fn forward_cached(&self, x: &[f64]) -> Result<(ProbDist, ForwardCache)> {
        if x.len() != self.input_dim() {
            return Err(Error::shape(format!(
                "input has {} features, network expects {}",
                x.len(),
                self.input_dim()
            )));
        }
        let n = self.layers.len();
        let mut inputs: Vec<Vec<f64>> = Vec::with_capacity(n);
        let mut cur = x.to_vec();
        let mut z = Vec::new();
        for (k, layer) in self.layers.iter().enumerate() {
            layer.affine(&cur, &mut z);
            inputs.push(std::mem::replace(&mut cur, Vec::new()));
            if k + 1 < n {
                cur = z.iter().map(|&v| v.max(0.0)).collect();
            } else {
                cur = z.clone();
            }
        }
        let probs = ProbDist::softmax(&cur)?;
        Ok((probs, ForwardCache { inputs }))
    }
}

// ---------------------------------------------------------------------------
// Backward
// ---------------------------------------------------------------------------

/// Parameter gradients, shaped exactly like [`NetworkParams`].
#[derive(Debug, Clone)]
pub struct Gradients {
    pub layers: Vec<DenseLayer>,
}

impl Gradients {
    pub fn zeros_like(params: &NetworkParams) -> Self {
        Gradients {
            layers: params.layers.iter().map(|l| DenseLayer::zeros(l.in_dim, l.out_dim)).collect(),
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for l in &mut self.layers {
            for w in &mut l.weights {
                *w *= factor;
            }
            for b in &mut l.bias {
                *b *= factor;
            }
        }
    }

    pub fn add(&mut self, other: &Gradients) {
        for (a, b) in self.layers.iter_mut().zip(&other.layers) {
            for (x, y) in a.weights.iter_mut().zip(&b.weights) {
                *x += y;
            }
            for (x, y) in a.bias.iter_mut().zip(&b.bias) {
                *x += y;
            }
        }
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for l in &self.layers {
            out.extend_from_slice(&l.weights);
            out.extend_from_slice(&l.bias);
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weights.iter().all(|w| w.is_finite()) && l.bias.iter().all(|b| b.is_finite()))
    }
}

/// Map a gradient w.r.t. softmax outputs to a gradient w.r.t. logits.
///
/// `dz_k = p_k * (dp_k - sum_j dp_j * p_j)`.
pub fn softmax_backward(probs: &[f64], dprobs: &[f64]) -> Vec<f64> {
    let dot: f64 = dprobs.iter().zip(probs.iter()).map(|(d, p)| d * p).sum();
    probs.iter().zip(dprobs.iter()).map(|(&p, &d)| p * (d - dot)).collect()
}

/// Accumulate parameter gradients for a batch.
///
/// `dlogits[i]` is the gradient of the (already reduced) batch loss with
/// respect to sample `i`'s final-layer logits; the result is the sum of the
/// per-sample parameter gradients. Caches must come from forward passes over
/// the same parameters.
pub fn backward(
    params: &NetworkParams,
    caches: &[ForwardCache],
    dlogits: &[Vec<f64>],
) -> Result<Gradients> {
    if caches.len() != dlogits.len() {
        return Err(Error::shape(format!(
            "{} caches but {} logit gradients",
            caches.len(),
            dlogits.len()
        )));
    }
    let n = params.layers.len();
    let mut grads = Gradients::zeros_like(params);
    for (cache, dz_out) in caches.iter().zip(dlogits) {
        if cache.inputs.len() != n {
            return Err(Error::internal(format!(
                "stale forward cache: {} layers cached, network has {n}",
                cache.inputs.len()
            )));
        }
        if dz_out.len() != params.class_count() {
            return Err(Error::shape(format!(
                "logit gradient has {} entries, network has {} classes",
                dz_out.len(),
                params.class_count()
            )));
        }
        let mut delta = dz_out.clone();
        for k in (0..n).rev() {
            let layer = &params.layers[k];
            let input = &cache.inputs[k];
            if input.len() != layer.in_dim {
                return Err(Error::internal(format!(
                    "stale forward cache: layer {k} input has {} entries, expects {}",
                    input.len(),
                    layer.in_dim
                )));
            }
            let g = &mut grads.layers[k];
            for o in 0..layer.out_dim {
                let d = delta[o];
                g.bias[o] += d;
                let row = &mut g.weights[o * layer.in_dim..(o + 1) * layer.in_dim];
                for (gw, xi) in row.iter_mut().zip(input.iter()) {
                    *gw += d * xi;
                }
            }
            if k > 0 {
                // Propagate through W^T, then the ReLU mask of layer k-1.
                // inputs[k] is that layer's post-ReLU output: positive where
                // the unit was active.
                let mut prev = vec![0.0; layer.in_dim];
                for o in 0..layer.out_dim {
                    let d = delta[o];
                    let row = &layer.weights[o * layer.in_dim..(o + 1) * layer.in_dim];
                    for (p, w) in prev.iter_mut().zip(row.iter()) {
                        *p += d * w;
                    }
                }
                for (p, &a) in prev.iter_mut().zip(input.iter()) {
                    if a <= 0.0 {
                        *p = 0.0;
                    }
                }
                delta = prev;
            }
        }
    }
    Ok(grads)
}

// ---------------------------------------------------------------------------
// Optimizer
// ---------------------------------------------------------------------------

/// SGD-with-Nesterov-momentum state: one velocity buffer per parameter.
#[derive(Debug, Clone)]
pub struct OptimizerState {
    velocity: Vec<DenseLayer>,
    pub momentum: f64,
    pub weight_decay: f64,
}

impl OptimizerState {
    pub fn new(params: &NetworkParams, momentum: f64, weight_decay: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&momentum) {
            return Err(Error::config(format!("momentum {momentum} not in [0,1)")));
        }
        if weight_decay < 0.0 || !weight_decay.is_finite() {
            return Err(Error::config(format!("weight decay {weight_decay} must be >= 0")));
        }
        Ok(OptimizerState {
            velocity: params.layers.iter().map(|l| DenseLayer::zeros(l.in_dim, l.out_dim)).collect(),
            momentum,
            weight_decay,
        })
    }
}

/// One Nesterov-momentum update.
///
/// With `g' = g + wd * theta`:
///   `v <- m * v - lr * g'` and `theta <- theta + m * v - lr * g'`
/// (the second term uses the updated velocity). With `m = 0` and `wd = 0`
/// this reduces to `theta <- theta - lr * g`.
pub fn sgd_nesterov_step(
    params: &mut NetworkParams,
    grads: &Gradients,
    state: &mut OptimizerState,
    lr: f64,
) -> Result<()> {
    if !(lr > 0.0) || !lr.is_finite() {
        return Err(Error::config(format!("learning rate {lr} must be positive and finite")));
    }
    if !grads.is_finite() {
        return Err(Error::numeric("non-finite gradient entry in optimizer step"));
    }
    if grads.layers.len() != params.layers.len() {
        return Err(Error::shape("gradient/parameter layer count mismatch"));
    }
    let m = state.momentum;
    let wd = state.weight_decay;
    for ((layer, grad), vel) in params.layers.iter_mut().zip(&grads.layers).zip(&mut state.velocity) {
        if grad.weights.len() != layer.weights.len() || grad.bias.len() != layer.bias.len() {
            return Err(Error::shape("gradient/parameter shape mismatch"));
        }
        for i in 0..layer.weights.len() {
            let g = grad.weights[i] + wd * layer.weights[i];
            let v = m * vel.weights[i] - lr * g;
            vel.weights[i] = v;
            layer.weights[i] += m * v - lr * g;
        }
        for i in 0..layer.bias.len() {
            let g = grad.bias[i] + wd * layer.bias[i];
            let v = m * vel.bias[i] - lr * g;
            vel.bias[i] = v;
            layer.bias[i] += m * v - lr * g;
        }
    }
    Ok(())
}

/// Cosine learning-rate decay: `alpha * cos(7 pi t / (16 T))`.
///
/// Non-increasing in `t` and strictly positive on `[0, T]`.
pub fn cosine_lr(t: usize, t_total: usize, alpha: f64) -> Result<f64> {
    if t_total == 0 {
        return Err(Error::config("total iteration count must be positive"));
    }
    if !(alpha > 0.0) {
        return Err(Error::config(format!("base learning rate {alpha} must be positive")));
    }
    if t > t_total {
        return Err(Error::config(format!("iteration {t} exceeds total {t_total}")));
    }
    Ok(alpha * (7.0 * std::f64::consts::PI * t as f64 / (16.0 * t_total as f64)).cos())
}

/// Euclidean distance between two parameter sets, flattened.
pub fn param_distance(a: &NetworkParams, b: &NetworkParams) -> f64 {
    let fa = a.flatten();
    let fb = b.flatten();
    debug_assert_eq!(fa.len(), fb.len());
    fa.iter().zip(fb.iter()).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn init_is_deterministic_per_seed() {
        let a = init_network(&[2, 16, 2], 7).unwrap();
        let b = init_network(&[2, 16, 2], 7).unwrap();
        assert_eq!(a, b);
        let c = init_network(&[2, 16, 2], 8).unwrap();
        assert_ne!(a.flatten(), c.flatten());
    }

    #[test]
    fn degenerate_arch_is_rejected() {
        assert!(matches!(init_network(&[2], 7), Err(Error::Config(_))));
        assert!(matches!(init_network(&[], 7), Err(Error::Config(_))));
        assert!(matches!(init_network(&[2, 0, 2], 7), Err(Error::Config(_))));
    }

    #[test]
    fn forward_is_normalized_and_pure() {
        let net = init_network(&[3, 8, 4], 42).unwrap();
        let x = [0.3, -1.2, 0.7];
        let p1 = net.forward(&x).unwrap();
        let p2 = net.forward(&x).unwrap();
        assert_eq!(p1, p2);
        let sum: f64 = p1.as_slice().iter().sum();
        assert!((sum - 1.0).abs() < 1e-6);
        assert!(p1.as_slice().iter().all(|&p| p > 0.0 && p < 1.0));
    }

    #[test]
    fn zero_network_is_uniform() {
        let net = NetworkParams::zeros(&[2, 5, 4]).unwrap();
        let p = net.forward(&[1.0, -2.0]).unwrap();
        for &v in p.as_slice() {
            assert!((v - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn forward_rejects_bad_input_dim() {
        let net = init_network(&[3, 4, 2], 1).unwrap();
        assert!(matches!(net.forward(&[1.0, 2.0]), Err(Error::Shape(_))));
    }

    #[test]
    fn zero_upstream_gradient_gives_zero_grads() {
        let net = init_network(&[2, 4, 3], 5).unwrap();
        let (_, cache) = net.forward_cached(&[0.5, -0.5]).unwrap();
        let grads = backward(&net, &[cache], &[vec![0.0; 3]]).unwrap();
        assert!(grads.flatten().iter().all(|&g| g == 0.0));
    }

    #[test]
    fn batch_backward_is_sum_of_per_sample() {
        let net = init_network(&[2, 4, 3], 5).unwrap();
        let xs = [vec![0.5, -0.5], vec![-1.0, 2.0]];
        let dls = [vec![0.1, -0.3, 0.2], vec![-0.2, 0.05, 0.15]];
        let mut caches = Vec::new();
        for x in &xs {
            caches.push(net.forward_cached(x).unwrap().1);
        }
        let joint = backward(&net, &caches, &dls.to_vec()).unwrap();
        let mut summed = backward(&net, &caches[..1], &dls[..1].to_vec()).unwrap();
        summed.add(&backward(&net, &caches[1..], &dls[1..].to_vec()).unwrap());
        for (a, b) in joint.flatten().iter().zip(summed.flatten()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn plain_sgd_step() {
        let mut net = NetworkParams::zeros(&[1, 1]).unwrap();
        net.layers_mut()[0].weights[0] = 1.0;
        let mut grads = Gradients::zeros_like(&net);
        grads.layers[0].weights[0] = 0.5;
        let mut state = OptimizerState::new(&net, 0.0, 0.0).unwrap();
        sgd_nesterov_step(&mut net, &grads, &mut state, 0.1).unwrap();
        assert!((net.layers()[0].weights[0] - 0.95).abs() < 1e-15);
    }

    #[test]
    fn zero_gradient_is_fixed_point() {
        let mut net = init_network(&[2, 3, 2], 3).unwrap();
        let before = net.flatten();
        let grads = Gradients::zeros_like(&net);
        let mut state = OptimizerState::new(&net, 0.9, 0.0).unwrap();
        sgd_nesterov_step(&mut net, &grads, &mut state, 0.1).unwrap();
        assert_eq!(net.flatten(), before);
    }

    #[test]
    fn non_finite_gradient_is_an_error() {
        let mut net = init_network(&[2, 2], 3).unwrap();
        let mut grads = Gradients::zeros_like(&net);
        grads.layers[0].weights[0] = f64::NAN;
        let mut state = OptimizerState::new(&net, 0.9, 0.0).unwrap();
        assert!(matches!(
            sgd_nesterov_step(&mut net, &grads, &mut state, 0.1),
            Err(Error::Numeric(_))
        ));
    }

    #[test]
    fn cosine_lr_shape() {
        assert!((cosine_lr(0, 100, 0.5).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(cosine_lr(0, 0, 0.5), Err(Error::Config(_))));
        let mut prev = f64::INFINITY;
        for t in 0..=100 {
            let lr = cosine_lr(t, 100, 0.03).unwrap();
            assert!(lr > 0.0);
            assert!(lr <= prev);
            prev = lr;
        }
    }
}
