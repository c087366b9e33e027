//! Downstream node-classification evaluation with a linear probe.
//!
//! The probe is a fixed-budget multinomial logistic regression: 300
//! full-batch gradient steps at learning rate 0.1 with an L2 weight penalty
//! of 1e-4. The budget is pinned so reported accuracies are reproducible;
//! per-repeat seeds only vary the probe's initialization.

use crate::error::{Result, UgclError};
use crate::graph::UNLABELED;
use crate::linalg::{xavier_init, DenseMatrix};
use crate::rng::SplitMix64;

pub const PROBE_ITERATIONS: usize = 300;
pub const PROBE_LEARNING_RATE: f64 = 0.1;
pub const PROBE_L2_PENALTY: f64 = 1e-4;

/// Node role in evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitRole {
    Train,
    Val,
    Test,
    None,
}

impl SplitRole {
    pub fn parse(s: &str) -> Result<SplitRole> {
        Ok(match s {
            "train" => SplitRole::Train,
            "val" => SplitRole::Val,
            "test" => SplitRole::Test,
            "none" => SplitRole::None,
            other => {
                return Err(UgclError::InvalidArgument(format!(
                    "unknown split token `{other}` (expected train, val, test, none)"
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            SplitRole::Train => "train",
            SplitRole::Val => "val",
            SplitRole::Test => "test",
            SplitRole::None => "none",
        }
    }
}

/// Disjoint train/validation/test node sets.
#[derive(Debug, Clone)]
pub struct Split {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

impl Split {
    pub fn from_roles(roles: &[SplitRole]) -> Split {
        let mut s = Split {
            train: vec![],
            val: vec![],
            test: vec![],
        };
        for (i, r) in roles.iter().enumerate() {
            match r {
                SplitRole::Train => s.train.push(i),
                SplitRole::Val => s.val.push(i),
                SplitRole::Test => s.test.push(i),
                SplitRole::None => {}
            }
        }
        s
    }

    pub fn validate(&self, num_nodes: usize) -> Result<()> {
        let mut seen = vec![false; num_nodes];
        for (name, set) in [("train", &self.train), ("val", &self.val), ("test", &self.test)] {
            for &i in set {
                if i >= num_nodes {
                    return Err(UgclError::InvalidArgument(format!(
                        "{name} index {i} out of range for {num_nodes} nodes"
                    )));
                }
                if seen[i] {
                    return Err(UgclError::InvalidArgument(format!(
                        "node {i} assigned to more than one split"
                    )));
                }
                seen[i] = true;
            }
        }
        if self.train.is_empty() {
            return Err(UgclError::InvalidArgument("train split is empty".into()));
        }
        Ok(())
    }
}

/// Uniform random disjoint split; nodes not drawn into train/val become test.
pub fn make_random_split(
    num_nodes: usize,
    train_frac: f64,
    val_frac: f64,
    seed: u64,
) -> Result<Split> {
    if !(train_frac > 0.0 && val_frac > 0.0 && train_frac + val_frac < 1.0) {
        return Err(UgclError::InvalidArgument(format!(
            "fractions must be positive and sum below 1, got {train_frac} + {val_frac}"
        )));
    }
    let mut order: Vec<usize> = (0..num_nodes).collect();
    SplitMix64::new(seed).shuffle(&mut order);
    let n_train = ((num_nodes as f64) * train_frac).floor() as usize;
    let n_val = ((num_nodes as f64) * val_frac).floor() as usize;
    let mut train: Vec<usize> = order[..n_train].to_vec();
    let mut val: Vec<usize> = order[n_train..n_train + n_val].to_vec();
    let mut test: Vec<usize> = order[n_train + n_val..].to_vec();
    train.sort_unstable();
    val.sort_unstable();
    test.sort_unstable();
    Ok(Split { train, val, test })
}

/// Accuracy over repeated probe trainings.
#[derive(Debug, Clone)]
pub struct EvalReport {
    pub accuracies: Vec<f64>,
    pub accuracy_mean: f64,
    pub accuracy_std: f64,
    pub repeats: usize,
    /// Classes present in test labels but absent from the train set.
    pub missing_train_classes: Vec<usize>,
}

/// Train the probe `repeats` times on frozen embeddings and report test
/// accuracy. Unlabeled nodes are skipped in both fitting and scoring.
pub fn linear_probe(
    h: &DenseMatrix,
    labels: &[i64],
    split: &Split,
    repeats: usize,
    seed: u64,
) -> Result<EvalReport> {
    if labels.len() != h.rows() {
        return Err(UgclError::DimensionMismatch(format!(
            "{} labels for {} embedding rows",
            labels.len(),
            h.rows()
        )));
    }
    if repeats == 0 {
        return Err(UgclError::InvalidArgument("repeats must be >= 1".into()));
    }
    split.validate(h.rows())?;
    if !h.is_finite() {
        return Err(UgclError::InvalidArgument(
            "embeddings contain non-finite entries".into(),
        ));
    }

    let train: Vec<usize> = split
        .train
        .iter()
        .copied()
        .filter(|&i| labels[i] != UNLABELED)
        .collect();
    let test: Vec<usize> = split
        .test
        .iter()
        .copied()
        .filter(|&i| labels[i] != UNLABELED)
        .collect();
    if train.is_empty() || test.is_empty() {
        return Err(UgclError::InvalidArgument(
            "need labeled train and test nodes".into(),
        ));
    }

    let num_classes = labels
        .iter()
        .filter(|&&l| l != UNLABELED)
        .map(|&l| l as usize + 1)
        .max()
        .expect("labeled nodes exist");

    let mut present = vec![false; num_classes];
    for &i in &train {
        present[labels[i] as usize] = true;
    }
    let missing_train_classes: Vec<usize> = test
        .iter()
        .map(|&i| labels[i] as usize)
        .filter(|&c| !present[c])
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();

    let mut probe_seeds = SplitMix64::new(seed);
    let mut accuracies = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let mut init_rng = probe_seeds.fork();
        let acc = fit_and_score(h, labels, &train, &test, num_classes, &mut init_rng)?;
        accuracies.push(acc);
    }

    let mean = accuracies.iter().sum::<f64>() / repeats as f64;
    let var = accuracies
        .iter()
        .map(|a| (a - mean) * (a - mean))
        .sum::<f64>()
        / repeats as f64;
    Ok(EvalReport {
        accuracy_mean: mean,
        accuracy_std: var.sqrt(),
        accuracies,
        repeats,
        missing_train_classes,
    })
}

/// Predicted classes for every row under a freshly trained probe; exposed so
/// invariance tests can compare argmax decisions directly.
pub fn probe_predictions(
    h: &DenseMatrix,
    labels: &[i64],
    train: &[usize],
    num_classes: usize,
    init_rng: &mut SplitMix64,
) -> Result<Vec<usize>> {
    let (w, b) = fit(h, labels, train, num_classes, init_rng)?;
    Ok((0..h.rows()).map(|i| predict_row(h.row(i), &w, &b)).collect())
}

fn fit_and_score(
    h: &DenseMatrix,
    labels: &[i64],
    train: &[usize],
    test: &[usize],
    num_classes: usize,
    init_rng: &mut SplitMix64,
) -> Result<f64> {
    let (w, b) = fit(h, labels, train, num_classes, init_rng)?;
    let correct = test
        .iter()
        .filter(|&&i| predict_row(h.row(i), &w, &b) == labels[i] as usize)
        .count();
    Ok(correct as f64 / test.len() as f64)
}

/// Full-batch softmax regression with L2 penalty on the weights.
fn fit(
    h: &DenseMatrix,
    labels: &[i64],
    train: &[usize],
    num_classes: usize,
    init_rng: &mut SplitMix64,
) -> Result<(DenseMatrix, Vec<f64>)> {
    let dim = h.cols();
    let m = train.len() as f64;
    let mut w = xavier_init(dim, num_classes, init_rng);
    let mut b = vec![0.0; num_classes];

    let mut grad_w = DenseMatrix::zeros(dim, num_classes);
    let mut grad_b = vec![0.0; num_classes];
    let mut probs = vec![0.0; num_classes];

    for _ in 0..PROBE_ITERATIONS {
        grad_w.data_mut().fill(0.0);
        grad_b.fill(0.0);

        for &i in train {
            let x = h.row(i);
            softmax_into(x, &w, &b, &mut probs);
            probs[labels[i] as usize] -= 1.0;
            for (k, &xk) in x.iter().enumerate() {
                if xk == 0.0 {
                    continue;
                }
                let row = grad_w.row_mut(k);
                for (g, &p) in row.iter_mut().zip(&probs) {
                    *g += xk * p;
                }
            }
            for (g, &p) in grad_b.iter_mut().zip(&probs) {
                *g += p;
            }
        }

        let inv_m = 1.0 / m;
        for (gw, &wv) in grad_w.data_mut().iter_mut().zip(w.data()) {
            *gw = *gw * inv_m + PROBE_L2_PENALTY * wv;
        }
        for g in &mut grad_b {
            *g *= inv_m;
        }

        for (wv, &g) in w.data_mut().iter_mut().zip(grad_w.data()) {
            *wv -= PROBE_LEARNING_RATE * g;
        }
        for (bv, &g) in b.iter_mut().zip(&grad_b) {
            *bv -= PROBE_LEARNING_RATE * g;
        }
    }
    Ok((w, b))
}

fn softmax_into(x: &[f64], w: &DenseMatrix, b: &[f64], out: &mut [f64]) {
    out.copy_from_slice(b);
    for (k, &xk) in x.iter().enumerate() {
        if xk == 0.0 {
            continue;
        }
        for (o, &wv) in out.iter_mut().zip(w.row(k)) {
            *o += xk * wv;
        }
    }
    let max = out.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut z = 0.0;
    for o in out.iter_mut() {
        *o = (*o - max).exp();
        z += *o;
    }
    let inv = 1.0 / z;
    for o in out.iter_mut() {
        *o *= inv;
    }
}

fn predict_row(x: &[f64], w: &DenseMatrix, b: &[f64]) -> usize {
    let c = b.len();
    let mut best = 0usize;
    let mut best_logit = f64::NEG_INFINITY;
    for class in 0..c {
        let mut logit = b[class];
        for (k, &xk) in x.iter().enumerate() {
            logit += xk * w.get(k, class);
        }
        // ties break toward the lowest class index
        if logit > best_logit {
            best_logit = logit;
            best = class;
        }
    }
    best
}

/// Row-wise L2 normalization; turns a global rescaling of the embedding
/// matrix into a no-op for the probe.
pub fn normalize_rows_l2(h: &DenseMatrix) -> DenseMatrix {
    let mut out = h.clone();
    for r in 0..out.rows() {
        let norm = out.row(r).iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            let inv = 1.0 / norm;
            for v in out.row_mut(r) {
                *v *= inv;
            }
        }
    }
    out
}
