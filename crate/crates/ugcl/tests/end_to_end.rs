//! In-process end-to-end training quality on synthetic community graphs.

use ugcl::eval::{linear_probe, make_random_split};
use ugcl::synth;
use ugcl::trainer::{embed, train, Ablation, TrainConfig};

#[test]
fn sbm_communities_are_linearly_recoverable() {
    // Two 100-node communities with a weak feature shift: after contrastive
    // training plus power aggregation the probe should separate them almost
    // perfectly.
    let g = synth::two_block_sbm(200, 0.15, 0.01, 8, 0.6, 21);
    let cfg = TrainConfig {
        epochs: 120,
        sample_size: 100,
        power_n: 3,
        hidden_dim: 16,
        learning_rate: 5e-3,
        temperature: 1.0,
        seed: 13,
        ablation: Ablation::None,
        use_bias: true,
        log_every: 0,
    };
    let (model, report) = train(&g, &cfg).unwrap();
    assert!(report.final_loss < report.loss_history[0]);

    let h = embed(&g, &model.theta, cfg.aggregation_power()).unwrap();
    let split = make_random_split(g.num_nodes(), 0.1, 0.1, 3).unwrap();
    let eval = linear_probe(&h, g.labels().unwrap(), &split, 5, 17).unwrap();
    assert!(
        eval.accuracy_mean >= 0.9,
        "SBM accuracy {} below 0.9",
        eval.accuracy_mean
    );
}

#[test]
fn loss_trend_on_small_benchmark() {
    let g = synth::two_block_sbm(100, 0.15, 0.02, 8, 0.8, 3);
    let cfg = TrainConfig {
        epochs: 200,
        sample_size: 50,
        power_n: 2,
        hidden_dim: 16,
        learning_rate: 5e-3,
        seed: 11,
        log_every: 0,
        ..TrainConfig::default()
    };
    let (_, report) = train(&g, &cfg).unwrap();
    let lead: f64 = report.loss_history[..50].iter().sum::<f64>() / 50.0;
    let trail: f64 = report.loss_history[150..].iter().sum::<f64>() / 50.0;
    assert!(trail < lead, "loss did not trend down: {lead} -> {trail}");
}

#[test]
fn ablations_all_train_to_completion() {
    let g = synth::two_block_sbm(60, 0.2, 0.03, 6, 0.5, 5);
    for ablation in [
        Ablation::None,
        Ablation::MeanPool,
        Ablation::Oversmooth,
        Ablation::SingleEncoder,
        Ablation::NoSubsample,
        Ablation::NoPower,
    ] {
        let cfg = TrainConfig {
            epochs: 15,
            sample_size: 30,
            power_n: 2,
            hidden_dim: 8,
            seed: 2,
            ablation,
            log_every: 0,
            ..TrainConfig::default()
        };
        let (model, report) = train(&g, &cfg).unwrap();
        assert_eq!(report.loss_history.len(), 15, "{:?}", ablation);
        assert!(model.theta.weight.is_finite());
        let h = embed(&g, &model.theta, cfg.aggregation_power()).unwrap();
        assert!(h.is_finite());
    }
}
