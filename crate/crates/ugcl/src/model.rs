//! Forward/backward computation: paired one-layer graph-convolution
//! encoders, contextual-view construction by adjacency powers, and the
//! cross-view contrastive loss with exact analytic gradients.

use std::time::{Duration, Instant};

use crate::error::{Result, UgclError};
use crate::graph::NormalizedAdjacency;
use crate::linalg::{power_apply, spmm, xavier_init, DenseMatrix};
use crate::rng::SplitMix64;

/// Power used by the oversmoothing ablation: enough applications that every
/// connected component collapses to its shared subspace.
pub const OVERSMOOTH_POWER: usize = 100;

/// How the contextual view is built from the auxiliary embeddings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContextMode {
    /// Multiply by the `n`-th adjacency power (the main method).
    Power,
    /// Replace every row by the whole-matrix column mean, ignoring
    /// components (mean-pooling ablation).
    MeanPool,
    /// Fixed large power ([`OVERSMOOTH_POWER`]) so components saturate.
    Oversmooth,
}

/// Whether the contextual view gets its own encoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EncoderMode {
    /// Main encoder for the patch view, auxiliary encoder for the context.
    Dual,
    /// One shared encoder (single-encoder ablation).
    Single,
}

/// Model hyperparameters shared by training and inference.
#[derive(Debug, Clone)]
pub struct ModelConfig {
    /// Adjacency power for the contextual view.
    pub power_n: usize,
    pub hidden_dim: usize,
    /// Softens the cosine similarities; 1.0 recovers the plain loss.
    pub temperature: f64,
    pub context_mode: ContextMode,
    pub encoder_mode: EncoderMode,
    pub use_bias: bool,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            power_n: 2,
            hidden_dim: 256,
            temperature: 1.0,
            context_mode: ContextMode::Power,
            encoder_mode: EncoderMode::Dual,
            use_bias: true,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.temperature <= 0.0 || !self.temperature.is_finite() {
            return Err(UgclError::InvalidArgument(format!(
                "temperature must be positive, got {}",
                self.temperature
            )));
        }
        if self.hidden_dim == 0 {
            return Err(UgclError::InvalidArgument("hidden_dim must be >= 1".into()));
        }
        Ok(())
    }
}

/// Weights of one graph-convolution encoder.
#[derive(Debug, Clone)]
pub struct EncoderParams {
    /// D x D' input-to-hidden weights.
    pub weight: DenseMatrix,
    /// Length D' bias.
    pub bias: Vec<f64>,
    /// Learnable negative-branch slope of the parametric rectifier.
    pub prelu_slope: f64,
}

impl EncoderParams {
    /// Xavier weights, zero bias, slope 0.25.
    pub fn init(in_dim: usize, out_dim: usize, rng: &mut SplitMix64) -> Self {
        EncoderParams {
            weight: xavier_init(in_dim, out_dim, rng),
            bias: vec![0.0; out_dim],
            prelu_slope: 0.25,
        }
    }

    pub fn in_dim(&self) -> usize {
        self.weight.rows()
    }

    pub fn out_dim(&self) -> usize {
        self.weight.cols()
    }
}

/// Parameter-space gradients for one encoder.
#[derive(Debug, Clone)]
pub struct EncoderGrads {
    pub weight: DenseMatrix,
    pub bias: Vec<f64>,
    pub prelu_slope: f64,
}

/// Intermediate activations kept for the backward pass.
struct GcnCache {
    /// Pre-activation `Â (X W) + b`.
    pre_activation: DenseMatrix,
}

/// One-layer graph convolution:
/// `H = prelu(Â (X W) + b)` with `prelu(z) = z` for `z >= 0`, else `slope * z`.
pub fn gcn_forward(
    a: &NormalizedAdjacency,
    x: &DenseMatrix,
    params: &EncoderParams,
) -> Result<DenseMatrix> {
    let (h, _) = gcn_forward_cached(a, x, params, true)?;
    Ok(h)
}

fn gcn_forward_cached(
    a: &NormalizedAdjacency,
    x: &DenseMatrix,
    params: &EncoderParams,
    use_bias: bool,
) -> Result<(DenseMatrix, GcnCache)> {
    if x.cols() != params.in_dim() {
        return Err(UgclError::DimensionMismatch(format!(
            "features are {}-dimensional but encoder expects {}",
            x.cols(),
            params.in_dim()
        )));
    }
    let projected = x.matmul(&params.weight)?;
    let mut pre = spmm(a, &projected)?;
    if use_bias {
        for r in 0..pre.rows() {
            for (z, b) in pre.row_mut(r).iter_mut().zip(&params.bias) {
                *z += b;
            }
        }
    }
    let mut h = pre.clone();
    let slope = params.prelu_slope;
    for z in h.data_mut() {
        if *z < 0.0 {
            *z *= slope;
        }
    }
    Ok((h, GcnCache { pre_activation: pre }))
}

/// Backpropagate `grad_out = dL/dH` through the convolution.
fn gcn_backward(
    a: &NormalizedAdjacency,
    x: &DenseMatrix,
    params: &EncoderParams,
    cache: &GcnCache,
    grad_out: &DenseMatrix,
    use_bias: bool,
) -> Result<EncoderGrads> {
    let slope = params.prelu_slope;
    let pre = &cache.pre_activation;

    // through the rectifier
    let mut grad_pre = grad_out.clone();
    let mut grad_slope = 0.0;
    for (gz, &z) in grad_pre.data_mut().iter_mut().zip(pre.data()) {
        if z < 0.0 {
            grad_slope += *gz * z;
            *gz *= slope;
        }
    }

    // bias picks up column sums of grad_pre
    let mut grad_bias = vec![0.0; params.out_dim()];
    if use_bias {
        for r in 0..grad_pre.rows() {
            for (b, &g) in grad_bias.iter_mut().zip(grad_pre.row(r)) {
                *b += g;
            }
        }
    }

    // through Â (symmetric, so its transpose is itself) and the projection
    let grad_projected = spmm(a, &grad_pre)?;
    let grad_weight = x.transpose_matmul(&grad_projected)?;

    Ok(EncoderGrads {
        weight: grad_weight,
        bias: grad_bias,
        prelu_slope: grad_slope,
    })
}

/// Contextual view of the auxiliary embeddings.
pub fn contextual_view(
    a: &NormalizedAdjacency,
    h: &DenseMatrix,
    cfg: &ModelConfig,
) -> Result<DenseMatrix> {
    match cfg.context_mode {
        ContextMode::Power => power_apply(a, h, cfg.power_n),
        ContextMode::Oversmooth => power_apply(a, h, OVERSMOOTH_POWER),
        ContextMode::MeanPool => Ok(broadcast_col_means(h)),
    }
}

/// Pull `dL/d(contextual view)` back to the pre-view embeddings. Both the
/// power operator and mean-pooling are symmetric, so each is its own adjoint.
fn contextual_backward(
    a: &NormalizedAdjacency,
    grad: &DenseMatrix,
    cfg: &ModelConfig,
) -> Result<DenseMatrix> {
    match cfg.context_mode {
        ContextMode::Power => power_apply(a, grad, cfg.power_n),
        ContextMode::Oversmooth => power_apply(a, grad, OVERSMOOTH_POWER),
        ContextMode::MeanPool => Ok(broadcast_col_means(grad)),
    }
}

fn broadcast_col_means(m: &DenseMatrix) -> DenseMatrix {
    let means = m.col_means();
    let mut out = DenseMatrix::zeros(m.rows(), m.cols());
    for r in 0..m.rows() {
        out.row_mut(r).copy_from_slice(&means);
    }
    out
}

/// Loss value and its gradients with respect to both views.
#[derive(Debug, Clone)]
pub struct LossOutput {
    pub loss: f64,
    /// dL/d(patch view), S x D'.
    pub grad_patch: DenseMatrix,
    /// dL/d(contextual view), S x D'.
    pub grad_context: DenseMatrix,
}

/// Cross-view contrastive loss.
///
/// For each anchor `v` the positive is the cosine between its patch row and
/// its contextual row; the negatives are all other patch rows:
///
/// ```text
/// L = -(1/S) * sum_v [ cos(h_v, h̃_v)/τ - log sum_{u != v} exp(cos(h_v, h_u)/τ) ]
/// ```
///
/// At `τ = 1` this is exactly the log-ratio form with the positive's `exp`
/// and `log` cancelled. Gradients are exact analytic derivatives.
pub fn contrastive_loss(
    h_patch: &DenseMatrix,
    h_context: &DenseMatrix,
    temperature: f64,
) -> Result<LossOutput> {
    let s = h_patch.rows();
    let d = h_patch.cols();
    if h_context.rows() != s || h_context.cols() != d {
        return Err(UgclError::DimensionMismatch(format!(
            "views disagree: {}x{} vs {}x{}",
            s,
            d,
            h_context.rows(),
            h_context.cols()
        )));
    }
    if s < 2 {
        return Err(UgclError::NoNegatives(s));
    }
    if temperature <= 0.0 {
        return Err(UgclError::InvalidArgument(
            "temperature must be positive".into(),
        ));
    }

    let patch_norms = row_norms(h_patch)?;
    let context_norms = row_norms(h_context)?;
    let patch_hat = normalize_rows(h_patch, &patch_norms);
    let context_hat = normalize_rows(h_context, &context_norms);

    // positives: cos(h_v, h̃_v)
    let mut positives = vec![0.0; s];
    for v in 0..s {
        positives[v] = dot(patch_hat.row(v), context_hat.row(v));
    }

    // pairwise patch cosines
    let mut cos = vec![0.0; s * s];
    for v in 0..s {
        for u in (v + 1)..s {
            let c = dot(patch_hat.row(v), patch_hat.row(u));
            cos[v * s + u] = c;
            cos[u * s + v] = c;
        }
    }

    // per-anchor softmax weights over negatives, with the usual max shift
    let inv_t = 1.0 / temperature;
    let mut loss = 0.0;
    let mut weights = vec![0.0; s * s]; // sigma[v][u], zero diagonal
    for v in 0..s {
        let mut m = f64::NEG_INFINITY;
        for u in 0..s {
            if u != v {
                m = m.max(cos[v * s + u] * inv_t);
            }
        }
        let mut z = 0.0;
        for u in 0..s {
            if u != v {
                z += (cos[v * s + u] * inv_t - m).exp();
            }
        }
        loss += m + z.ln() - positives[v] * inv_t;
        let inv_z = 1.0 / z;
        for u in 0..s {
            if u != v {
                weights[v * s + u] = (cos[v * s + u] * inv_t - m).exp() * inv_z;
            }
        }
    }
    loss /= s as f64;
    let scale = 1.0 / (s as f64 * temperature);

    // gradient wrt normalized patch rows:
    //   ghat_v = scale * [ sum_{u != v} (sigma_vu + sigma_uv) p̂_u - ĉ_v ]
    let mut grad_patch_hat = DenseMatrix::zeros(s, d);
    for v in 0..s {
        let row = grad_patch_hat.row_mut(v);
        for (x, c) in row.iter_mut().zip(context_hat.row(v)) {
            *x = -scale * c;
        }
    }
    for v in 0..s {
        for u in 0..s {
            if u == v {
                continue;
            }
            let w = scale * (weights[v * s + u] + weights[u * s + v]);
            for (x, y) in grad_patch_hat.row_mut(v).iter_mut().zip(patch_hat.row(u)) {
                *x += w * y;
            }
        }
    }

    // chain through row normalization: g = (ghat - (ghat . r̂) r̂) / |r|
    let grad_patch = normalize_backward(&grad_patch_hat, &patch_hat, &patch_norms);

    let mut grad_context_hat = DenseMatrix::zeros(s, d);
    for v in 0..s {
        let row = grad_context_hat.row_mut(v);
        for (x, p) in row.iter_mut().zip(patch_hat.row(v)) {
            *x = -scale * p;
        }
    }
    let grad_context = normalize_backward(&grad_context_hat, &context_hat, &context_norms);

    Ok(LossOutput {
        loss,
        grad_patch,
        grad_context,
    })
}

fn row_norms(m: &DenseMatrix) -> Result<Vec<f64>> {
    let mut norms = Vec::with_capacity(m.rows());
    for r in 0..m.rows() {
        let n = dot(m.row(r), m.row(r)).sqrt();
        if n < 1e-12 {
            return Err(UgclError::DegenerateEmbedding { row: r, norm: n });
        }
        norms.push(n);
    }
    Ok(norms)
}

fn normalize_rows(m: &DenseMatrix, norms: &[f64]) -> DenseMatrix {
    let mut out = m.clone();
    for r in 0..out.rows() {
        let inv = 1.0 / norms[r];
        for x in out.row_mut(r) {
            *x *= inv;
        }
    }
    out
}

/// Adjoint of row normalization: project the upstream gradient onto the
/// tangent of the unit sphere, then rescale.
fn normalize_backward(grad_hat: &DenseMatrix, hat: &DenseMatrix, norms: &[f64]) -> DenseMatrix {
    let mut out = DenseMatrix::zeros(grad_hat.rows(), grad_hat.cols());
    for r in 0..grad_hat.rows() {
        let g = grad_hat.row(r);
        let h = hat.row(r);
        let along = dot(g, h);
        let inv = 1.0 / norms[r];
        let row = out.row_mut(r);
        for ((o, &gi), &hi) in row.iter_mut().zip(g).zip(h) {
            *o = (gi - along * hi) * inv;
        }
    }
    out
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Everything one optimization step needs from the forward/backward pass.
pub struct StepOutput {
    pub loss: f64,
    pub grad_theta: EncoderGrads,
    /// Absent in single-encoder mode.
    pub grad_phi: Option<EncoderGrads>,
    /// Wall time spent applying the adjacency power on the forward pass.
    pub power_time: Duration,
}

/// Full forward and backward pass on one (sub)graph.
///
/// The patch view always comes from `theta`. In dual mode the contextual
/// view is built from `phi`'s embeddings; in single mode `theta` serves both
/// roles and `grad_phi` is `None`.
pub fn forward_backward(
    a: &NormalizedAdjacency,
    x: &DenseMatrix,
    theta: &EncoderParams,
    phi: &EncoderParams,
    cfg: &ModelConfig,
) -> Result<StepOutput> {
    cfg.validate()?;
    let (h_patch, cache_theta) = gcn_forward_cached(a, x, theta, cfg.use_bias)?;

    let (h_base, cache_phi) = match cfg.encoder_mode {
        EncoderMode::Dual => {
            let (h, c) = gcn_forward_cached(a, x, phi, cfg.use_bias)?;
            (h, Some(c))
        }
        EncoderMode::Single => (h_patch.clone(), None),
    };

    let started = Instant::now();
    let h_context = contextual_view(a, &h_base, cfg)?;
    let power_time = started.elapsed();

    let out = contrastive_loss(&h_patch, &h_context, cfg.temperature)?;
    let grad_base = contextual_backward(a, &out.grad_context, cfg)?;

    match cfg.encoder_mode {
        EncoderMode::Dual => {
            let grad_theta =
                gcn_backward(a, x, theta, &cache_theta, &out.grad_patch, cfg.use_bias)?;
            let cache_phi = cache_phi.expect("dual mode caches phi");
            let grad_phi = gcn_backward(a, x, phi, &cache_phi, &grad_base, cfg.use_bias)?;
            Ok(StepOutput {
                loss: out.loss,
                grad_theta,
                grad_phi: Some(grad_phi),
                power_time,
            })
        }
        EncoderMode::Single => {
            // both paths feed the shared encoder
            let mut upstream = out.grad_patch.clone();
            upstream.add_assign(&grad_base)?;
            let grad_theta = gcn_backward(a, x, theta, &cache_theta, &upstream, cfg.use_bias)?;
            Ok(StepOutput {
                loss: out.loss,
                grad_theta,
                grad_phi: None,
                power_time,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::synth;

    fn identity_adjacency(n: usize, d: usize) -> NormalizedAdjacency {
        Graph::from_edges(n, &[], DenseMatrix::zeros(n, d), None)
            .unwrap()
            .normalize_augmented()
    }

    #[test]
    fn gcn_zero_weights_give_zero_output() {
        let g = synth::erdos_renyi_features(6, 0.4, 3, 1);
        let a = g.normalize_augmented();
        let p = EncoderParams {
            weight: DenseMatrix::zeros(3, 4),
            bias: vec![0.0; 4],
            prelu_slope: 0.25,
        };
        let h = gcn_forward(&a, g.features(), &p).unwrap();
        assert!(h.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn gcn_single_node_hand_value() {
        let a = identity_adjacency(1, 2);
        let x = DenseMatrix::from_rows(&[vec![1.0, 0.0]]).unwrap();
        let p = EncoderParams {
            weight: DenseMatrix::from_rows(&[vec![2.0], vec![5.0]]).unwrap(),
            bias: vec![0.0],
            prelu_slope: 0.25,
        };
        let h = gcn_forward(&a, &x, &p).unwrap();
        assert_eq!(h.data(), &[2.0]);
    }

    #[test]
    fn gcn_dimension_mismatch_errors() {
        let a = identity_adjacency(2, 3);
        let x = DenseMatrix::zeros(2, 3);
        let p = EncoderParams::init(4, 2, &mut SplitMix64::new(0));
        assert!(gcn_forward(&a, &x, &p).is_err());
    }

    #[test]
    fn contextual_power_zero_is_identity() {
        let g = synth::erdos_renyi_features(5, 0.5, 2, 2);
        let a = g.normalize_augmented();
        let h = xavier_init(5, 3, &mut SplitMix64::new(1));
        let cfg = ModelConfig {
            power_n: 0,
            ..ModelConfig::default()
        };
        let out = contextual_view(&a, &h, &cfg).unwrap();
        assert_eq!(out.data(), h.data());
    }

    #[test]
    fn contextual_power_one_equals_single_spmm() {
        let g = synth::erdos_renyi_features(7, 0.4, 2, 3);
        let a = g.normalize_augmented();
        let h = xavier_init(7, 3, &mut SplitMix64::new(2));
        let cfg = ModelConfig {
            power_n: 1,
            ..ModelConfig::default()
        };
        let out = contextual_view(&a, &h, &cfg).unwrap();
        let direct = spmm(&a, &h).unwrap();
        assert_eq!(out.data(), direct.data());
    }

    #[test]
    fn mean_pool_hand_value() {
        let a = identity_adjacency(2, 1);
        let h = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let cfg = ModelConfig {
            context_mode: ContextMode::MeanPool,
            ..ModelConfig::default()
        };
        let out = contextual_view(&a, &h, &cfg).unwrap();
        assert_eq!(out.data(), &[2.0, 3.0, 2.0, 3.0]);
    }

    #[test]
    fn oversmooth_regular_components_collapse_separately() {
        // two regular components (a triangle and a 4-cycle): every node in a
        // component has the same augmented degree, so repeated smoothing
        // drives rows within a component together while the component limits
        // stay distinct.
        let edges = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (5, 6), (3, 6)];
        let mut rng = SplitMix64::new(11);
        let feat = xavier_init(7, 3, &mut rng);
        let g = Graph::from_edges(7, &edges, feat, None).unwrap();
        let a = g.normalize_augmented();
        let cfg = ModelConfig {
            context_mode: ContextMode::Oversmooth,
            ..ModelConfig::default()
        };
        let out = contextual_view(&a, g.features(), &cfg).unwrap();
        for pair in [(0, 1), (1, 2), (3, 4), (4, 6)] {
            let diff: f64 = out
                .row(pair.0)
                .iter()
                .zip(out.row(pair.1))
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            assert!(diff < 1e-6, "rows {:?} differ by {diff}", pair);
        }
        let across: f64 = out
            .row(0)
            .iter()
            .zip(out.row(3))
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(across > 1e-4, "components should keep distinct limits");
    }

    #[test]
    fn loss_hand_value_orthonormal_pair() {
        let h = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let out = contrastive_loss(&h, &h, 1.0).unwrap();
        // positives cos = 1, single negative cos = 0 per anchor:
        // L = -(1/2) * 2 * (1 - ln e^0) = -1
        assert!((out.loss + 1.0).abs() < 1e-12, "loss {}", out.loss);
    }

    #[test]
    fn loss_rejects_degenerate_rows_and_tiny_batches() {
        let one = DenseMatrix::from_rows(&[vec![1.0, 0.0]]).unwrap();
        assert!(matches!(
            contrastive_loss(&one, &one, 1.0),
            Err(UgclError::NoNegatives(1))
        ));
        let zero_row = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let ok = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(
            contrastive_loss(&zero_row, &ok, 1.0),
            Err(UgclError::DegenerateEmbedding { row: 1, .. })
        ));
    }

    #[test]
    fn loss_invariant_to_row_rescaling() {
        let mut rng = SplitMix64::new(3);
        let p = xavier_init(5, 4, &mut rng);
        let c = xavier_init(5, 4, &mut rng);
        let base = contrastive_loss(&p, &c, 0.7).unwrap();
        for (row, factor) in [(0usize, 3.0), (2, 0.25), (4, 17.5)] {
            let mut scaled = p.clone();
            for x in scaled.row_mut(row) {
                *x *= factor;
            }
            let out = contrastive_loss(&scaled, &c, 0.7).unwrap();
            assert!(
                (out.loss - base.loss).abs() < 1e-10,
                "scaling row {row} by {factor} moved the loss"
            );
        }
    }

    #[test]
    fn loss_gradients_match_finite_differences() {
        let mut rng = SplitMix64::new(9);
        let p = xavier_init(5, 4, &mut rng);
        let c = xavier_init(5, 4, &mut rng);
        let out = contrastive_loss(&p, &c, 0.8).unwrap();
        let step = 1e-6;
        let mut worst = 0.0f64;
        for which in 0..2u8 {
            let analytic = if which == 0 {
                &out.grad_patch
            } else {
                &out.grad_context
            };
            for r in 0..5 {
                for k in 0..4 {
                    let eval = |delta: f64| {
                        let mut pp = p.clone();
                        let mut cc = c.clone();
                        let target = if which == 0 { &mut pp } else { &mut cc };
                        target.row_mut(r)[k] += delta;
                        contrastive_loss(&pp, &cc, 0.8).unwrap().loss
                    };
                    let fd = (eval(step) - eval(-step)) / (2.0 * step);
                    let a = analytic.get(r, k);
                    let rel = (a - fd).abs() / a.abs().max(fd.abs()).max(1e-6);
                    worst = worst.max(rel);
                }
            }
        }
        assert!(worst < 1e-6, "worst relative gradient error {worst}");
    }

    #[test]
    fn gcn_gradient_matches_finite_differences() {
        let g = synth::erdos_renyi_features(6, 0.5, 3, 21);
        let a = g.normalize_augmented();
        let x = g.features();
        let mut rng = SplitMix64::new(5);
        let mut params = EncoderParams::init(3, 2, &mut rng);
        for b in &mut params.bias {
            *b = rng.next_symmetric(0.3);
        }

        // objective: sum of outputs (upstream gradient of ones)
        let (h, cache) = gcn_forward_cached(&a, x, &params, true).unwrap();
        let ones =
            DenseMatrix::from_vec(h.rows(), h.cols(), vec![1.0; h.rows() * h.cols()]).unwrap();
        let grads = gcn_backward(&a, x, &params, &cache, &ones, true).unwrap();

        let objective =
            |p: &EncoderParams| -> f64 { gcn_forward(&a, x, p).unwrap().data().iter().sum() };
        let step = 1e-6;
        let mut worst = 0.0f64;
        for r in 0..3 {
            for k in 0..2 {
                let mut plus = params.clone();
                plus.weight.set(r, k, plus.weight.get(r, k) + step);
                let mut minus = params.clone();
                minus.weight.set(r, k, minus.weight.get(r, k) - step);
                let fd = (objective(&plus) - objective(&minus)) / (2.0 * step);
                let a_ = grads.weight.get(r, k);
                worst = worst.max((a_ - fd).abs() / a_.abs().max(fd.abs()).max(1e-6));
            }
        }
        for k in 0..2 {
            let mut plus = params.clone();
            plus.bias[k] += step;
            let mut minus = params.clone();
            minus.bias[k] -= step;
            let fd = (objective(&plus) - objective(&minus)) / (2.0 * step);
            worst = worst.max((grads.bias[k] - fd).abs() / grads.bias[k].abs().max(1e-6));
        }
        {
            let mut plus = params.clone();
            plus.prelu_slope += step;
            let mut minus = params.clone();
            minus.prelu_slope -= step;
            let fd = (objective(&plus) - objective(&minus)) / (2.0 * step);
            worst =
                worst.max((grads.prelu_slope - fd).abs() / grads.prelu_slope.abs().max(1e-6));
        }
        assert!(worst < 1e-6, "worst relative gradient error {worst}");
    }

    #[test]
    fn single_mode_ignores_phi() {
        let g = synth::erdos_renyi_features(8, 0.4, 3, 31);
        let a = g.normalize_augmented();
        let mut rng = SplitMix64::new(14);
        let theta = EncoderParams::init(3, 4, &mut rng);
        let phi_a = EncoderParams::init(3, 4, &mut rng);
        let phi_b = EncoderParams::init(3, 4, &mut rng);
        let cfg = ModelConfig {
            power_n: 2,
            hidden_dim: 4,
            encoder_mode: EncoderMode::Single,
            ..ModelConfig::default()
        };
        let out_a = forward_backward(&a, g.features(), &theta, &phi_a, &cfg).unwrap();
        let out_b = forward_backward(&a, g.features(), &theta, &phi_b, &cfg).unwrap();
        assert!(out_a.grad_phi.is_none());
        assert_eq!(out_a.loss.to_bits(), out_b.loss.to_bits());
    }

    #[test]
    fn loss_invariant_under_node_permutation() {
        let g = synth::erdos_renyi_features(10, 0.35, 4, 55);
        let mut rng = SplitMix64::new(6);
        let theta = EncoderParams::init(4, 3, &mut rng);
        let phi = EncoderParams::init(4, 3, &mut rng);
        let cfg = ModelConfig {
            power_n: 2,
            hidden_dim: 3,
            ..ModelConfig::default()
        };
        let a = g.normalize_augmented();
        let base = forward_backward(&a, g.features(), &theta, &phi, &cfg).unwrap();

        // relabel nodes by a fixed permutation
        let n = g.num_nodes();
        let mut perm: Vec<usize> = (0..n).collect();
        SplitMix64::new(77).shuffle(&mut perm);
        let mut edges = Vec::new();
        for u in 0..n {
            for &v in g.neighbors(u) {
                if v > u {
                    edges.push((perm[u], perm[v]));
                }
            }
        }
        let mut feat = DenseMatrix::zeros(n, 4);
        for u in 0..n {
            feat.row_mut(perm[u]).copy_from_slice(g.features().row(u));
        }
        let permuted = Graph::from_edges(n, &edges, feat, None).unwrap();
        let ap = permuted.normalize_augmented();
        let out = forward_backward(&ap, permuted.features(), &theta, &phi, &cfg).unwrap();
        assert!(
            (out.loss - base.loss).abs() < 1e-10,
            "permutation moved loss: {} vs {}",
            out.loss,
            base.loss
        );
    }

    #[test]
    fn component_independence_of_contextual_view() {
        // zeroing the features of component B must not change any
        // component-A row of the contextual view, bitwise
        let g = synth::two_component(6, 5, 0.5, 3, 91);
        let a = g.normalize_augmented();
        let mut rng = SplitMix64::new(8);
        let phi = EncoderParams::init(3, 4, &mut rng);
        for n in [0usize, 1, 2, 5, 17] {
            let cfg = ModelConfig {
                power_n: n,
                hidden_dim: 4,
                ..ModelConfig::default()
            };
            let base_emb = gcn_forward(&a, g.features(), &phi).unwrap();
            let base = contextual_view(&a, &base_emb, &cfg).unwrap();

            let mut zeroed = g.features().clone();
            for u in 6..11 {
                for x in zeroed.row_mut(u) {
                    *x = 0.0;
                }
            }
            let z_emb = gcn_forward(&a, &zeroed, &phi).unwrap();
            let z = contextual_view(&a, &z_emb, &cfg).unwrap();
            for u in 0..6 {
                for (x, y) in base.row(u).iter().zip(z.row(u)) {
                    assert_eq!(x.to_bits(), y.to_bits(), "row {u} changed at power {n}");
                }
            }
        }
    }
}
