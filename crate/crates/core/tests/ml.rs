use asp_core::ml::{hinge_objective, train_svm};
use asp_core::problems::ProblemKind;
use asp_core::{Calibration, Error, LinearModel, ModelFile, TrainConfig, TrainingExample};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn blobs(n: usize, sep: f64, pos_fraction: f64, seed: u64) -> Vec<TrainingExample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let label = u8::from(rng.gen::<f64>() < pos_fraction);
            let c = if label == 1 { sep } else { -sep };
            TrainingExample { features: vec![c + gaussian(&mut rng), c + gaussian(&mut rng)], label }
        })
        .collect()
}

fn accuracy(m: &LinearModel, data: &[TrainingExample]) -> f64 {
    let ok = data.iter().filter(|ex| (m.score(&ex.features) > 0.0) == (ex.label == 1)).count();
    ok as f64 / data.len() as f64
}

/// Best accuracy of any separator on a grid of directions and offsets.
fn grid_oracle(data: &[TrainingExample]) -> f64 {
    let mut best: f64 = 0.0;
    for a in 0..180 {
        let theta = a as f64 * std::f64::consts::PI / 90.0;
        let w = vec![theta.cos(), theta.sin()];
        for k in -40..=40 {
            let m = LinearModel { w: w.clone(), b: k as f64 / 10.0 };
            best = best.max(accuracy(&m, data));
        }
    }
    best
}

fn misclassified_positives(m: &LinearModel, data: &[TrainingExample]) -> usize {
    data.iter().filter(|ex| ex.label == 1 && m.score(&ex.features) <= 0.0).count()
}

#[test]
fn separates_gaussian_blobs() {
    for seed in 0..3 {
        let train = blobs(400, 2.0, 0.5, seed);
        let test = blobs(400, 2.0, 0.5, seed + 100);
        let cfg = TrainConfig { epochs: 100, eta0: 0.05, seed, ..TrainConfig::default() };
        let m = train_svm(&train, &cfg).unwrap();
        let acc = accuracy(&m, &test);
        let oracle = grid_oracle(&test);
        assert!(acc >= 0.95, "accuracy {acc}");
        assert!(acc >= oracle - 0.02, "accuracy {acc} vs grid {oracle}");
    }
}

#[test]
fn heavier_positive_penalty_misses_fewer_positives() {
    let data = blobs(600, 0.5, 0.2, 7);
    let mut prev = usize::MAX;
    for r_plus in [1.0, 2.0, 4.0, 8.0] {
        let cfg = TrainConfig { r_plus, epochs: 150, eta0: 0.02, seed: 3, ..TrainConfig::default() };
        let m = train_svm(&data, &cfg).unwrap();
        let missed = misclassified_positives(&m, &data);
        assert!(missed <= prev, "r_plus {r_plus}: {missed} > {prev}");
        prev = missed;
    }
}

#[test]
fn single_class_is_rejected() {
    let data: Vec<TrainingExample> = (0..5).map(|i| TrainingExample { features: vec![i as f64], label: 1 }).collect();
    assert!(matches!(train_svm(&data, &TrainConfig::default()), Err(Error::EmptyClass)));
}

#[test]
fn truncated_model_file_is_rejected() {
    let m = LinearModel { w: vec![0.5; 6], b: -0.1 };
    let cal = Calibration::new(2.0, 0.3).unwrap();
    let text = ModelFile::new(ProblemKind::Mwcp, &m, &cal).to_json().unwrap();
    let back = ModelFile::from_json(&text).unwrap();
    assert_eq!(back.model(), m);
    assert_eq!(back.calibration(), cal);
    for cut in [1, text.len() / 3, text.len() / 2, text.len() - 2] {
        assert!(ModelFile::from_json(&text[..cut]).is_err(), "cut at {cut} parsed");
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    std::fs::write(&path, &text[..text.len() / 2]).unwrap();
    assert!(ModelFile::load(&path).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn trained_objective_not_above_zero_model(seed in any::<u64>(), sep in 0.0f64..3.0, r_plus in 0.5f64..5.0) {
        let data = blobs(60, sep, 0.4, seed);
        let pos = data.iter().filter(|e| e.label == 1).count();
        prop_assume!(pos > 0 && pos < data.len());
        let cfg = TrainConfig { r_plus, epochs: 20, seed, ..TrainConfig::default() };
        match train_svm(&data, &cfg) {
            Ok(m) => {
                let zero = LinearModel { w: vec![0.0; 2], b: 0.0 };
                prop_assert!(hinge_objective(&m, &data, r_plus, 1.0) <= hinge_objective(&zero, &data, r_plus, 1.0) + 1e-12);
            }
            Err(e) => prop_assert!(matches!(e, Error::DegenerateModel)),
        }
    }
}
