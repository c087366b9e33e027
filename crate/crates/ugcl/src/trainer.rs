//! End-to-end training loop (per-epoch subsampling, Adam updates) and
//! inference-time embedding aggregation.

use std::time::Instant;

use crate::error::{Result, UgclError};
use crate::graph::Graph;
use crate::linalg::{power_apply, AdamHyper, AdamState, DenseMatrix};
use crate::model::{
    forward_backward, gcn_forward, ContextMode, EncoderMode, EncoderParams, ModelConfig,
};
use crate::rng::SplitMix64;

/// Ablation switches; `None` is the full method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Ablation {
    #[default]
    None,
    /// Contextual view replaced by whole-matrix mean pooling.
    MeanPool,
    /// Contextual view built with a fixed large power.
    Oversmooth,
    /// One shared encoder for both views.
    SingleEncoder,
    /// Train on the full graph every epoch.
    NoSubsample,
    /// Contextual view without the power mechanism (power 0).
    NoPower,
}

impl Ablation {
    pub fn parse(s: &str) -> Result<Ablation> {
        Ok(match s {
            "none" => Ablation::None,
            "mean_pool" => Ablation::MeanPool,
            "oversmooth" => Ablation::Oversmooth,
            "single_encoder" => Ablation::SingleEncoder,
            "no_subsample" => Ablation::NoSubsample,
            "no_power" => Ablation::NoPower,
            other => {
                return Err(UgclError::InvalidArgument(format!(
                    "unknown ablation `{other}` (expected none, mean_pool, oversmooth, single_encoder, no_subsample, no_power)"
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Ablation::None => "none",
            Ablation::MeanPool => "mean_pool",
            Ablation::Oversmooth => "oversmooth",
            Ablation::SingleEncoder => "single_encoder",
            Ablation::NoSubsample => "no_subsample",
            Ablation::NoPower => "no_power",
        }
    }
}

/// Training hyperparameters.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub epochs: usize,
    pub sample_size: usize,
    pub power_n: usize,
    pub hidden_dim: usize,
    pub learning_rate: f64,
    pub temperature: f64,
    pub seed: u64,
    pub ablation: Ablation,
    pub use_bias: bool,
    /// Console-print cadence used by the CLI; the loss log always records
    /// every epoch.
    pub log_every: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 300,
            sample_size: 1000,
            power_n: 2,
            hidden_dim: 256,
            learning_rate: 1e-3,
            temperature: 1.0,
            seed: 42,
            ablation: Ablation::None,
            use_bias: true,
            log_every: 50,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(UgclError::InvalidArgument("epochs must be >= 1".into()));
        }
        if self.sample_size < 2 {
            return Err(UgclError::InvalidArgument(
                "sample_size must be >= 2".into(),
            ));
        }
        if self.learning_rate <= 0.0 || !self.learning_rate.is_finite() {
            return Err(UgclError::InvalidArgument(
                "learning_rate must be positive".into(),
            ));
        }
        if self.temperature <= 0.0 || !self.temperature.is_finite() {
            return Err(UgclError::InvalidArgument(
                "temperature must be positive".into(),
            ));
        }
        Ok(())
    }

    /// The per-step model configuration implied by the ablation switches.
    pub fn model_config(&self) -> ModelConfig {
        let mut cfg = ModelConfig {
            power_n: self.power_n,
            hidden_dim: self.hidden_dim,
            temperature: self.temperature,
            context_mode: ContextMode::Power,
            encoder_mode: EncoderMode::Dual,
            use_bias: self.use_bias,
        };
        match self.ablation {
            Ablation::None | Ablation::NoSubsample => {}
            Ablation::MeanPool => cfg.context_mode = ContextMode::MeanPool,
            Ablation::Oversmooth => cfg.context_mode = ContextMode::Oversmooth,
            Ablation::SingleEncoder => cfg.encoder_mode = EncoderMode::Single,
            Ablation::NoPower => cfg.power_n = 0,
        }
        cfg
    }

    /// Power used when aggregating final embeddings.
    pub fn aggregation_power(&self) -> usize {
        self.model_config().power_n
    }
}

/// Per-run training record.
#[derive(Debug, Clone)]
pub struct TrainReport {
    pub loss_history: Vec<f64>,
    /// Mean seconds per epoch, wall clock.
    pub wall_time_per_epoch: f64,
    /// Mean seconds per epoch spent applying the adjacency power.
    pub power_time_per_epoch: f64,
    pub final_loss: f64,
}

/// Trained encoder pair.
#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub theta: EncoderParams,
    pub phi: EncoderParams,
    pub config: TrainConfig,
}

/// Train on `g`; deterministic given `(g, cfg, cfg.seed)`.
pub fn train(g: &Graph, cfg: &TrainConfig) -> Result<(TrainedModel, TrainReport)> {
    train_with_progress(g, cfg, |_, _, _| {})
}

/// Like [`train`], calling `progress(epoch, loss, epoch_seconds)` after
/// every epoch.
pub fn train_with_progress<F>(
    g: &Graph,
    cfg: &TrainConfig,
    mut progress: F,
) -> Result<(TrainedModel, TrainReport)>
where
    F: FnMut(usize, f64, f64),
{
    cfg.validate()?;
    let n = g.num_nodes();
    if n < 2 {
        return Err(UgclError::InvalidSampleSize {
            requested: cfg.sample_size,
            available: n,
        });
    }
    let full_graph = cfg.ablation == Ablation::NoSubsample;
    let sample_size = if full_graph {
        n
    } else {
        if cfg.sample_size > n {
            return Err(UgclError::InvalidSampleSize {
                requested: cfg.sample_size,
                available: n,
            });
        }
        cfg.sample_size
    };

    let mut master = SplitMix64::new(cfg.seed);
    let mut theta_rng = master.fork();
    let mut phi_rng = master.fork();
    let mut sampler = master.fork();

    let d = g.feature_dim();
    let mut theta = EncoderParams::init(d, cfg.hidden_dim, &mut theta_rng);
    let mut phi = EncoderParams::init(d, cfg.hidden_dim, &mut phi_rng);

    let hyper = AdamHyper {
        learning_rate: cfg.learning_rate,
        ..AdamHyper::default()
    };
    let shapes = [d * cfg.hidden_dim, cfg.hidden_dim, 1];
    let mut theta_state = AdamState::new(&shapes, hyper);
    let mut phi_state = AdamState::new(&shapes, hyper);

    let model_cfg = cfg.model_config();
    let dual = model_cfg.encoder_mode == EncoderMode::Dual;

    // full-graph mode reuses one normalization for every epoch
    let full_norm = full_graph.then(|| g.normalize_augmented());

    let mut loss_history = Vec::with_capacity(cfg.epochs);
    let mut wall_total = 0.0;
    let mut power_total = 0.0;

    for epoch in 0..cfg.epochs {
        let epoch_started = Instant::now();

        let step = if let Some(a) = &full_norm {
            forward_backward(a, g.features(), &theta, &phi, &model_cfg)?
        } else {
            let sub = g.induced_subsample(sample_size, &mut sampler)?;
            let a = sub.normalize_augmented();
            forward_backward(&a, sub.features(), &theta, &phi, &model_cfg)?
        };

        if !step.loss.is_finite() {
            return Err(UgclError::DivergentLoss {
                epoch,
                value: step.loss,
            });
        }

        apply_grads(&mut theta, &mut theta_state, &step.grad_theta)?;
        if dual {
            let grad_phi = step.grad_phi.as_ref().expect("dual mode returns phi grads");
            apply_grads(&mut phi, &mut phi_state, grad_phi)?;
        }

        let wall = epoch_started.elapsed().as_secs_f64();
        wall_total += wall;
        power_total += step.power_time.as_secs_f64();
        loss_history.push(step.loss);
        progress(epoch, step.loss, wall);
    }

    let final_loss = *loss_history.last().expect("epochs >= 1");
    let epochs = cfg.epochs as f64;
    Ok((
        TrainedModel {
            theta,
            phi,
            config: cfg.clone(),
        },
        TrainReport {
            loss_history,
            wall_time_per_epoch: wall_total / epochs,
            power_time_per_epoch: power_total / epochs,
            final_loss,
        },
    ))
}

fn apply_grads(
    params: &mut EncoderParams,
    state: &mut AdamState,
    grads: &crate::model::EncoderGrads,
) -> Result<()> {
    let mut slope = [params.prelu_slope];
    state.step(
        &mut [params.weight.data_mut(), &mut params.bias, &mut slope],
        &[grads.weight.data(), &grads.bias, &[grads.prelu_slope]],
    )?;
    params.prelu_slope = slope[0];
    Ok(())
}

/// Final embeddings on the full graph: `H = H_theta + Â^n H_theta`,
/// both terms from the main encoder.
pub fn embed(g: &Graph, theta: &EncoderParams, n: usize) -> Result<DenseMatrix> {
    let a = g.normalize_augmented();
    let h = gcn_forward(&a, g.features(), theta)?;
    let mut out = power_apply(&a, &h, n)?;
    out.add_assign(&h)?;
    Ok(out)
}

/// Median seconds for one `Â^n` application on `g`, over `repeats` timed
/// runs against a seeded random dense block of `width` columns.
pub fn measure_power_time(g: &Graph, n: usize, repeats: usize, width: usize) -> Result<f64> {
    if repeats == 0 {
        return Err(UgclError::InvalidArgument("repeats must be >= 1".into()));
    }
    let a = g.normalize_augmented();
    let h = crate::linalg::xavier_init(g.num_nodes(), width.max(1), &mut SplitMix64::new(17));
    let mut times = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let started = Instant::now();
        let out = power_apply(&a, &h, n)?;
        let elapsed = started.elapsed().as_secs_f64();
        std::hint::black_box(out);
        times.push(elapsed);
    }
    times.sort_by(|x, y| x.partial_cmp(y).expect("finite times"));
    Ok(times[times.len() / 2])
}
