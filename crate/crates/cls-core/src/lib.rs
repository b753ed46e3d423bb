//! Dual-network semi-supervised classification via cross labeling.
//!
//! Two identically structured, differently initialized MLP classifiers train
//! side by side. Each iteration both networks read weak augmentations of an
//! unlabeled batch and emit *artificial labels*: a pseudo label (argmax), a
//! complementary label (argmin), and an entropy-based confidence weight.
//! Each network then trains on strong augmentations of the same batch with a
//! mixed loss: a supervised term on labeled data, a self-labeling term using
//! its own labels, and a co-labeling term using the peer's labels gated by a
//! confidence threshold. Exchanging only confident labels gives each network
//! an outside training signal, which keeps it from compounding its own
//! labeling mistakes.
//!
//! The crate is organized as:
//!
//! - [`nn`] -- the f64 MLP substrate: forward, hand-written backward, SGD
//!   with Nesterov momentum, cosine learning-rate decay.
//! - [`labeling`] -- pseudo/complementary labels, threshold multi-hot
//!   labels, sharpening, entropy weights.
//! - [`losses`] -- weighted positive/negative cross-entropy, the
//!   self/co-labeling losses, the supervised loss, and the mixed objective
//!   with exact gradients.
//! - [`augment`] -- weak and strong feature-space perturbation policies.
//! - [`trainer`] -- the iteration loop, its ablation variants, and the
//!   single-network threshold baseline family.
//! - [`data`] / [`metrics`] / [`experiment`] -- datasets, evaluation,
//!   diagnostics, and the run/sweep drivers behind the CLI.
//! - [`selftest`] -- the runtime oracle suite (`cls selftest`).

pub mod augment;
pub mod data;
pub mod error;
pub mod experiment;
pub mod labeling;
pub mod losses;
pub mod metrics;
pub mod nn;
pub mod rng;
pub mod selftest;
pub mod trainer;

pub use error::{Error, Result};
