use medq::data::{gen_linear_separable, Example};
use medq::model::{build_medq, build_reuploading_baseline};
use medq::training::{train, GradientMethod, TrainConfig};

#[test]
fn medq_three_layers_halves_loss_on_small_separable_set() {
    let data = gen_linear_separable(2, 20, 0.05, 3).unwrap();
    let spec = build_medq(1, 2, 2).unwrap();
    let out = train(&spec, &TrainConfig::default(), &data.examples(), &[]).unwrap();
    let (first, last) = (out.loss_trace[0], *out.loss_trace.last().unwrap());
    assert!(last < 0.5 * first, "loss {first} -> {last}");
}

#[test]
fn single_sample_descent() {
    let x = [0.7, -0.3];
    let set = [Example { x: &x, label: 1 }];
    let spec = build_reuploading_baseline(2, 2, 1).unwrap();
    let cfg = TrainConfig {
        max_epochs: 200,
        seed: 4,
        ..TrainConfig::default()
    };
    let out = train(&spec, &cfg, &set, &[]).unwrap();
    assert!(out.loss_trace.last().unwrap() < &out.loss_trace[0]);
}

#[test]
fn seeded_runs_are_bitwise_identical() {
    let data = gen_linear_separable(3, 30, 0.05, 8).unwrap();
    let val = gen_linear_separable(3, 10, 0.05, 9).unwrap();
    let spec = build_medq(1, 3, 2).unwrap();
    for method in [GradientMethod::Adjoint, GradientMethod::ParameterShift] {
        let cfg = TrainConfig {
            max_epochs: 8,
            batch_size: Some(7),
            seed: 12,
            gradient_method: method,
            ..TrainConfig::default()
        };
        let a = train(&spec, &cfg, &data.examples(), &val.examples()).unwrap();
        let b = train(&spec, &cfg, &data.examples(), &val.examples()).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn gradient_methods_train_identically_up_to_rounding() {
    let data = gen_linear_separable(2, 12, 0.05, 5).unwrap();
    let spec = build_medq(1, 2, 2).unwrap();
    let run = |m| {
        let cfg = TrainConfig {
            max_epochs: 5,
            gradient_method: m,
            ..TrainConfig::default()
        };
        train(&spec, &cfg, &data.examples(), &[]).unwrap().loss_trace
    };
    let a = run(GradientMethod::Adjoint);
    let b = run(GradientMethod::ParameterShift);
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-9);
    }
}
