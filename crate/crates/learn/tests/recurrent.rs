mod common;

use common::synthetic;
use cup_learn::lstm::Lstm;
use cup_learn::{
    ablate_horizon, build_dataset, evaluate, train_recurrent, LearnError, Model, ModelFile, Normalization, SeqDataset, SplitOptions, TrainConfig,
    Variant,
};
use ndarray::Array2;
use pneuma_sim::Execution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tiny() -> TrainConfig {
    TrainConfig { epochs: 3, batch_size: 4, hidden: 8, ..Default::default() }
}

#[test]
fn declared_architecture_parameter_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let net: Lstm<f32> = Lstm::new(10, 200, 2, 4, &mut rng);
    let layer = |input: usize| input * 800 + 200 * 800 + 800;
    assert_eq!(net.param_count(), layer(10) + layer(200) + 200 * 4 + 4);
    for (v, w) in [(Variant::Vac, 4), (Variant::Ft, 6), (Variant::FtVac, 10)] {
        assert_eq!(v.width(), w);
    }
}

#[test]
fn variant_sets_input_width_and_one_step_gives_four_outputs() {
    let ds = build_dataset(&synthetic(10, 20, 1), SplitOptions::default()).unwrap();
    for v in [Variant::Vac, Variant::Ft, Variant::FtVac] {
        let (m, _) = train_recurrent(&ds, v, 30.0, &TrainConfig { epochs: 1, ..tiny() }).unwrap();
        assert_eq!(m.net.input_width(), v.width());
        let x = Array2::zeros((1, v.width()));
        let y = m.predict_many(&[&x]).unwrap();
        assert_eq!(y.len(), 1);
        assert_eq!(y[0].len(), 1);
        let wrong = Array2::zeros((1, v.width() + 1));
        assert!(matches!(m.predict_many(&[&wrong]), Err(LearnError::WidthMismatch { .. })));
    }
}

fn single_trial(inputs: Array2<f64>, targets: Array2<f64>) -> SeqDataset {
    SeqDataset {
        trials: vec![cup_learn::Trial { id: 0, inputs, targets }],
        normalization: Normalization::identity(),
        split: cup_learn::data::Split { train: vec![0], val: vec![], test: vec![0] },
    }
}

#[test]
fn memorizes_a_constant() {
    let x = Array2::from_shape_fn((60, 10), |(i, j)| ((i * 7 + j * 3) % 11) as f64 / 11.0 - 0.5);
    let ds = single_trial(x, Array2::from_elem((60, 4), 0.7));
    let cfg = TrainConfig { epochs: 500, batch_size: 1, hidden: 16, learning_rate: 1e-2, ..Default::default() };
    let (m, rep) = train_recurrent(&ds, Variant::FtVac, 0.0, &cfg).unwrap();
    let r = evaluate(&Model::Recurrent(m), &ds, &[0], &[0.5]).unwrap();
    assert!(r.mse < 1e-4, "mse {} after {} epochs", r.mse, rep.best_epoch);
}

#[test]
fn non_finite_loss_names_epoch_and_batch() {
    let mut x = Array2::zeros((5, 10));
    x[[2, 3]] = f64::NAN;
    let ds = single_trial(x, Array2::zeros((5, 4)));
    assert!(matches!(train_recurrent(&ds, Variant::FtVac, 0.0, &tiny()), Err(LearnError::NonFinite { epoch: 0, batch: 0 })));
}

#[test]
fn bad_configuration_is_rejected() {
    let ds = build_dataset(&synthetic(10, 20, 2), SplitOptions::default()).unwrap();
    assert!(matches!(train_recurrent(&ds, Variant::Vac, 31.0, &tiny()), Err(LearnError::BadHorizon(_))));
    assert!(matches!(train_recurrent(&ds, Variant::Vac, 30.0, &TrainConfig { epochs: 0, ..tiny() }), Err(LearnError::Config(_))));
}

#[test]
fn recurrent_outputs_align_with_the_horizon() {
    let ds = build_dataset(&synthetic(10, 3, 3), SplitOptions::default()).unwrap();
    let (m, _) = train_recurrent(&ds, Variant::Vac, 6.0, &TrainConfig { epochs: 1, ..tiny() }).unwrap();
    let m = Model::Recurrent(m);
    let t = &ds.trials[0];
    let p = m.predict(t).unwrap();
    assert_eq!((p.start, p.values.len()), (0, 3));
    let y = |i: usize| -> [f64; 4] { std::array::from_fn(|k| t.targets[[i, k]]) };
    assert_eq!(m.aligned_truth(t, &p).unwrap(), vec![y(1), y(2), y(2)]);
}

#[test]
fn training_is_deterministic_per_seed() {
    let ds = build_dataset(&synthetic(12, 30, 4), SplitOptions::default()).unwrap();
    let (a, ra) = train_recurrent(&ds, Variant::FtVac, 30.0, &tiny()).unwrap();
    let (b, rb) = train_recurrent(&ds, Variant::FtVac, 30.0, &tiny()).unwrap();
    assert_eq!(a, b);
    assert_eq!(ra, rb);
    let (c, _) = train_recurrent(&ds, Variant::FtVac, 30.0, &TrainConfig { seed: 1, ..tiny() }).unwrap();
    assert_ne!(a, c);
}

#[test]
fn test_noise_leaves_training_predictions_unchanged() {
    let recs = synthetic(12, 30, 5);
    let ds = build_dataset(&recs, SplitOptions::default()).unwrap();
    let mut noisy = recs.clone();
    for &i in &ds.split.test {
        for (j, f) in noisy[i].ft.iter_mut().enumerate() {
            *f = [j as f64 * 1e3; 6];
        }
    }
    let dn = build_dataset(&noisy, SplitOptions::default()).unwrap();
    let (a, _) = train_recurrent(&ds, Variant::FtVac, 30.0, &tiny()).unwrap();
    let (b, _) = train_recurrent(&dn, Variant::FtVac, 30.0, &tiny()).unwrap();
    let (a, b) = (Model::Recurrent(a), Model::Recurrent(b));
    for &i in &ds.split.train {
        assert_eq!(a.predict(&ds.trials[i]).unwrap(), b.predict(&dn.trials[i]).unwrap());
    }
}

#[test]
fn model_file_round_trip() {
    let ds = build_dataset(&synthetic(10, 20, 6), SplitOptions::default()).unwrap();
    let (m, _) = train_recurrent(&ds, Variant::Ft, 12.0, &TrainConfig { epochs: 1, ..tiny() }).unwrap();
    let file = ModelFile::new(Model::Recurrent(m), ds.normalization.clone());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    file.save(&path).unwrap();
    let back = ModelFile::load(&path).unwrap();
    assert_eq!(back, file);
    assert_eq!(back.model.predict(&ds.trials[0]).unwrap(), file.model.predict(&ds.trials[0]).unwrap());

    let text = std::fs::read_to_string(&path).unwrap().replacen("\"version\":1", "\"version\":99", 1);
    std::fs::write(&path, text).unwrap();
    assert!(matches!(ModelFile::load(&path), Err(LearnError::Version(99))));
}

#[test]
fn ablation_rows_and_error_context() {
    let ds = build_dataset(&synthetic(10, 40, 7), SplitOptions::default()).unwrap();
    let cfg = TrainConfig { epochs: 1, ..tiny() };
    let a = ablate_horizon(&ds, Variant::Vac, &[30.0, 90.0], &cfg, &[0.5], Execution::Sequential).unwrap();
    assert_eq!(a.rows.iter().map(|r| r.horizon_ms).collect::<Vec<_>>(), vec![30.0, 90.0]);
    assert!(a.slope_per_60ms.is_finite());
    let p = ablate_horizon(&ds, Variant::Vac, &[30.0, 90.0], &cfg, &[0.5], Execution::Parallel).unwrap();
    assert_eq!(a.rows.iter().map(|r| r.mse).collect::<Vec<_>>(), p.rows.iter().map(|r| r.mse).collect::<Vec<_>>());
    match ablate_horizon(&ds, Variant::Vac, &[30.0, 33.0], &cfg, &[0.5], Execution::Sequential) {
        Err(LearnError::Horizon { h, source }) => {
            assert_eq!(h, 33.0);
            assert!(matches!(*source, LearnError::BadHorizon(_)));
        }
        other => panic!("{other:?}"),
    }
}
