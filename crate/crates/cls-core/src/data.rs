//! Datasets, synthetic generators, CSV ingestion, and the SSL split.
//!
//! The split deliberately produces two different types: the labeled/test
//! views keep their labels, while [`UnlabeledSet`] carries features only.
//! The training path receives an `UnlabeledSet`, so ground-truth labels of
//! unlabeled samples are unreachable from training by construction; the
//! held-out truth is returned separately for diagnostics.

use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng;

/// Which view of the data a [`Dataset`] represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum SplitTag {
    Source,
    Labeled,
    Test,
}

/// A labeled dataset: `N x D` features plus one class index per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub class_count: usize,
    pub tag: SplitTag,
}

/// The unlabeled training view: features only, no label field exists.
#[derive(Debug, Clone, PartialEq)]
pub struct UnlabeledSet {
    pub features: Vec<Vec<f64>>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn feature_dim(&self) -> usize {
        self.features.first().map_or(0, Vec::len)
    }

    fn validate(&self) -> Result<()> {
        if self.features.is_empty() {
            return Err(Error::data("dataset has no rows"));
        }
        if self.features.len() != self.labels.len() {
            return Err(Error::data(format!(
                "{} feature rows but {} labels",
                self.features.len(),
                self.labels.len()
            )));
        }
        let d = self.features[0].len();
        for (i, row) in self.features.iter().enumerate() {
            if row.len() != d {
                return Err(Error::data(format!("row {i} has {} features, expected {d}", row.len())));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::data(format!("row {i} has a non-finite feature")));
            }
        }
        for (i, &y) in self.labels.iter().enumerate() {
            if y >= self.class_count {
                return Err(Error::data(format!(
                    "row {i} has label {y}, expected < {}",
                    self.class_count
                )));
            }
        }
        Ok(())
    }
}

impl UnlabeledSet {
    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }
}

/// Two interleaving half-circles with Gaussian noise; classes are balanced
/// within one sample for odd `n`.
pub fn make_two_moons(n: usize, noise_std: f64, seed: u64) -> Result<Dataset> {
    if n < 2 {
        return Err(Error::config(format!("two-moons needs at least 2 points, got {n}")));
    }
    if noise_std < 0.0 {
        return Err(Error::config("noise std must be non-negative"));
    }
    let n0 = n / 2 + n % 2;
    let n1 = n - n0;
    let mut stream = rng::stream(seed, 0xD5);
    let mut features = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    let arc = |i: usize, count: usize| {
        if count == 1 {
            0.0
        } else {
            std::f64::consts::PI * i as f64 / (count - 1) as f64
        }
    };
    for i in 0..n0 {
        let t = arc(i, n0);
        features.push(vec![t.cos(), t.sin()]);
        labels.push(0);
    }
    for i in 0..n1 {
        let t = arc(i, n1);
        features.push(vec![1.0 - t.cos(), 0.5 - t.sin()]);
        labels.push(1);
    }
    if noise_std > 0.0 {
        for row in &mut features {
            for v in row.iter_mut() {
                *v += noise_std * rng::gauss(&mut stream);
            }
        }
    }
    let ds = Dataset { features, labels, class_count: 2, tag: SplitTag::Source };
    ds.validate()?;
    Ok(ds)
}

/// Isotropic Gaussian blobs around the given centers; point `i` is generated
/// from (and labeled as) center `i % K`, so classes are balanced within one
/// sample.
pub fn make_blobs(n: usize, centers: &[Vec<f64>], cluster_std: f64, seed: u64) -> Result<Dataset> {
    if centers.len() < 2 {
        return Err(Error::config(format!("blobs need at least 2 centers, got {}", centers.len())));
    }
    if n < centers.len() {
        return Err(Error::config(format!(
            "blobs need at least one point per center ({} centers, n = {n})",
            centers.len()
        )));
    }
    if cluster_std < 0.0 {
        return Err(Error::config("cluster std must be non-negative"));
    }
    let d = centers[0].len();
    if d == 0 {
        return Err(Error::config("blob centers must have at least one dimension"));
    }
    for (i, c) in centers.iter().enumerate() {
        if c.len() != d {
            return Err(Error::config(format!("center {i} has {} dims, expected {d}", c.len())));
        }
        for (j, other) in centers.iter().enumerate().take(i) {
            if c == other {
                return Err(Error::config(format!("centers {j} and {i} are identical")));
            }
        }
    }
    let mut stream = rng::stream(seed, 0xB1);
    let mut features = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let k = i % centers.len();
        let point: Vec<f64> =
            centers[k].iter().map(|&c| c + cluster_std * rng::gauss(&mut stream)).collect();
        features.push(point);
        labels.push(k);
    }
    let ds = Dataset { features, labels, class_count: centers.len(), tag: SplitTag::Source };
    ds.validate()?;
    Ok(ds)
}

/// Load a dataset from CSV: `D` numeric feature columns followed by one
/// 0-indexed integer label column. Malformed content is reported with its
/// row number.
pub fn load_csv(path: &Path, has_header: bool) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::data(format!("cannot open {}: {e}", path.display())))?;
    let mut features = Vec::new();
    let mut labels = Vec::new();
    let mut width = None;
    let offset = usize::from(has_header);
    for (idx, record) in reader.records().enumerate() {
        let row_no = idx + 1 + offset;
        let record = record.map_err(|e| Error::data(format!("row {row_no}: {e}")))?;
        if record.len() < 2 {
            return Err(Error::data(format!(
                "row {row_no}: needs at least one feature column and one label column"
            )));
        }
        match width {
            None => width = Some(record.len()),
            Some(w) if w != record.len() => {
                return Err(Error::data(format!(
                    "row {row_no}: has {} columns, expected {w}",
                    record.len()
                )));
            }
            _ => {}
        }
        let mut row = Vec::with_capacity(record.len() - 1);
        for cell in record.iter().take(record.len() - 1) {
            let v: f64 = cell.parse().map_err(|_| {
                Error::data(format!("row {row_no}: feature cell {cell:?} is not numeric"))
            })?;
            if !v.is_finite() {
                return Err(Error::data(format!("row {row_no}: non-finite feature {cell:?}")));
            }
            row.push(v);
        }
        let label_cell = record.get(record.len() - 1).unwrap_or("");
        let label_f: f64 = label_cell.parse().map_err(|_| {
            Error::data(format!("row {row_no}: label cell {label_cell:?} is not numeric"))
        })?;
        if label_f.fract() != 0.0 || label_f < 0.0 {
            return Err(Error::data(format!(
                "row {row_no}: label {label_cell:?} must be a non-negative integer"
            )));
        }
        features.push(row);
        labels.push(label_f as usize);
    }
    if features.is_empty() {
        return Err(Error::data(format!("{}: no data rows", path.display())));
    }
    let class_count = labels.iter().max().copied().unwrap_or(0) + 1;
    let ds = Dataset { features, labels, class_count, tag: SplitTag::Source };
    ds.validate()?;
    Ok(ds)
}

/// Class-balanced labeled/unlabeled split.
///
/// Picks `n_labeled / C` samples per class uniformly at random (so
/// `n_labeled` must be divisible by the class count); everything else
/// becomes the unlabeled view. Returns the labeled view, the label-free
/// unlabeled view, and the unlabeled samples' true labels for diagnostics
/// only.
pub fn split_ssl(
    dataset: &Dataset,
    n_labeled: usize,
    seed: u64,
) -> Result<(Dataset, UnlabeledSet, Vec<usize>)> {
    dataset.validate()?;
    let c = dataset.class_count;
    if n_labeled == 0 || n_labeled % c != 0 {
        return Err(Error::config(format!(
            "n_labeled = {n_labeled} must be a positive multiple of the class count {c}"
        )));
    }
    if n_labeled > dataset.len() {
        return Err(Error::config(format!(
            "n_labeled = {n_labeled} exceeds dataset size {}",
            dataset.len()
        )));
    }
    let per_class = n_labeled / c;
    let mut by_class: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &y) in dataset.labels.iter().enumerate() {
        by_class.entry(y).or_default().push(i);
    }
    let mut stream = rng::stream(seed, 0x5B);
    let mut chosen = Vec::with_capacity(n_labeled);
    for class in 0..c {
        let indices = by_class.get(&class).map(Vec::as_slice).unwrap_or(&[]);
        if indices.len() < per_class {
            return Err(Error::config(format!(
                "class {class} has only {} samples, needs {per_class} for the labeled split",
                indices.len()
            )));
        }
        let mut pool = indices.to_vec();
        pool.shuffle(&mut stream);
        chosen.extend_from_slice(&pool[..per_class]);
    }
    chosen.sort_unstable();
    let mut is_labeled = vec![false; dataset.len()];
    for &i in &chosen {
        is_labeled[i] = true;
    }
    let labeled = Dataset {
        features: chosen.iter().map(|&i| dataset.features[i].clone()).collect(),
        labels: chosen.iter().map(|&i| dataset.labels[i]).collect(),
        class_count: c,
        tag: SplitTag::Labeled,
    };
    let mut unl_features = Vec::with_capacity(dataset.len() - n_labeled);
    let mut heldout = Vec::with_capacity(dataset.len() - n_labeled);
    for i in 0..dataset.len() {
        if !is_labeled[i] {
            unl_features.push(dataset.features[i].clone());
            heldout.push(dataset.labels[i]);
        }
    }
    Ok((labeled, UnlabeledSet { features: unl_features }, heldout))
}

/// Mean per-feature standard deviation over labeled plus unlabeled features;
/// calibrates the augmentation noise scale.
pub fn feature_std(labeled: &Dataset, unlabeled: &UnlabeledSet) -> f64 {
    let rows: Vec<&Vec<f64>> = labeled.features.iter().chain(unlabeled.features.iter()).collect();
    if rows.is_empty() {
        return 0.0;
    }
    let d = rows[0].len();
    let n = rows.len() as f64;
    let mut acc = 0.0;
    for j in 0..d {
        let mean = rows.iter().map(|r| r[j]).sum::<f64>() / n;
        let var = rows.iter().map(|r| (r[j] - mean) * (r[j] - mean)).sum::<f64>() / n;
        acc += var.sqrt();
    }
    acc / d as f64
}

/// Up-to-`cap` random subsample of the unlabeled features (the diagnostics
/// pool, fixed once per run).
pub fn diagnostic_pool(unlabeled: &UnlabeledSet, cap: usize, seed: u64) -> Vec<Vec<f64>> {
    if unlabeled.len() <= cap {
        return unlabeled.features.clone();
    }
    let mut stream = rng::stream(seed, rng::purpose::DIAG_POOL);
    let mut indices: Vec<usize> = (0..unlabeled.len()).collect();
    indices.shuffle(&mut stream);
    indices.truncate(cap);
    indices.sort_unstable();
    indices.into_iter().map(|i| unlabeled.features[i].clone()).collect()
}

/// Endless shuffled-epoch sampler over `0..n`; reshuffles on exhaustion so
/// every epoch is a fresh permutation and batches may span epoch boundaries.
#[derive(Debug, Clone)]
pub struct BatchSampler {
    order: Vec<usize>,
    cursor: usize,
    stream: rand_chacha::ChaCha8Rng,
}

impl BatchSampler {
    pub fn new(n: usize, seed: u64, purpose: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::config("cannot sample batches from an empty set"));
        }
        let mut stream = rng::stream(seed, purpose);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut stream);
        Ok(BatchSampler { order, cursor: 0, stream })
    }

    pub fn next_batch(&mut self, size: usize) -> Vec<usize> {
        let mut batch = Vec::with_capacity(size);
        for _ in 0..size {
            if self.cursor == self.order.len() {
                self.order.shuffle(&mut self.stream);
                self.cursor = 0;
            }
            batch.push(self.order[self.cursor]);
            self.cursor += 1;
        }
        batch
    }
}

// Keep the unused-import lint honest: Rng is pulled in for gen_range in
// augment but SliceRandom covers everything here.
#[allow(unused)]
fn _rng_assert<R: Rng>(_r: &mut R) {}
