use super::*;
use crate::corpus::MorphForm;
use crate::features::{FeatureSources, SchemaParams};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

fn rows(values: &[&str]) -> Vec<Vec<String>> {
    values.iter().map(|v| vec![v.to_string()]).collect()
}

#[test]
fn fit_counts_values_per_sense() {
    let model = DistanceModel::fit(&rows(&["a", "a", "b"]), &[0, 0, 1], 2).unwrap();
    let table = &model.tables[0];
    assert_eq!(table.len(), 2);
    assert_eq!(
        table["a"],
        ValueDistribution {
            counts: vec![2, 0],
            total: 2
        }
    );
    assert_eq!(
        table["b"],
        ValueDistribution {
            counts: vec![0, 1],
            total: 1
        }
    );
}

#[test]
fn fit_single_example_gives_singleton_tables() {
    let row = vec![vec!["x".to_string(), "y".to_string(), "z".to_string()]];
    let model = DistanceModel::fit(&row, &[0], 3).unwrap();
    for table in &model.tables {
        assert_eq!(table.len(), 1);
        assert!(table.values().all(|d| d.total == 1));
    }
}

#[test]
fn fit_rejects_empty_or_ragged_input() {
    assert!(matches!(
        DistanceModel::fit(&[], &[], 2),
        Err(ModelError::EmptyTraining)
    ));
    let ragged = vec![
        vec!["a".to_string()],
        vec!["a".to_string(), "b".to_string()],
    ];
    assert!(matches!(
        DistanceModel::fit(&ragged, &[0, 1], 2),
        Err(ModelError::ArityMismatch {
            expected: 1,
            got: 2
        })
    ));
}

#[test]
fn value_distance_hand_computed() {
    // a: {s1: 3}, b: {s1: 1, s2: 1} over two senses.
    let model = DistanceModel::fit(&rows(&["a", "a", "a", "b", "b"]), &[0, 0, 0, 0, 1], 2).unwrap();
    assert_eq!(model.value_distance(0, "a", "a"), 0.0);
    assert!((model.value_distance(0, "a", "b") - 1.0).abs() < 1e-12);

    // Disjoint supports reach the maximum of 2.
    let model = DistanceModel::fit(
        &rows(&["a", "a", "a", "a", "a", "c", "c", "c", "c", "c"]),
        &[0, 0, 0, 0, 0, 1, 1, 1, 1, 1],
        2,
    )
    .unwrap();
    assert_eq!(model.value_distance(0, "a", "c"), 2.0);
}

#[test]
fn unseen_values_take_the_uniform_distribution() {
    let model = DistanceModel::fit(&rows(&["a", "a"]), &[0, 0], 2).unwrap();
    // d(unseen, a) = |0.5 - 1| + |0.5 - 0| = 1.
    assert!((model.value_distance(0, "zz", "a") - 1.0).abs() < 1e-12);
    // Two distinct unseen values share the uniform distribution.
    assert_eq!(model.value_distance(0, "zz", "ww"), 0.0);
    // Equal unseen values are identical values.
    assert_eq!(model.value_distance(0, "zz", "zz"), 0.0);
}

#[test]
fn example_distance_sums_positions() {
    let data = vec![
        vec!["a".to_string(), "x".to_string()],
        vec!["a".to_string(), "x".to_string()],
        vec!["a".to_string(), "x".to_string()],
        vec!["b".to_string(), "x".to_string()],
        vec!["b".to_string(), "x".to_string()],
    ];
    let model = DistanceModel::fit(&data, &[0, 0, 0, 0, 1], 2).unwrap();
    let e1 = vec!["a".to_string(), "x".to_string()];
    let e2 = vec!["b".to_string(), "x".to_string()];
    assert_eq!(model.example_distance(&e1, &e1).unwrap(), 0.0);
    // Only the first position differs, with d = 1.
    assert!((model.example_distance(&e1, &e2).unwrap() - 1.0).abs() < 1e-12);
    assert!(matches!(
        model.example_distance(&e1, &["a".to_string()]),
        Err(ModelError::ArityMismatch { .. })
    ));
}

#[test]
fn example_distance_is_bounded_by_twice_arity() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let arity = rng.gen_range(1..5);
        let n_senses = rng.gen_range(2..5);
        let n = rng.gen_range(2..20);
        let data: Vec<Vec<String>> = (0..n)
            .map(|_| {
                (0..arity)
                    .map(|_| format!("v{}", rng.gen_range(0..4)))
                    .collect()
            })
            .collect();
        let senses: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n_senses)).collect();
        let model = DistanceModel::fit(&data, &senses, n_senses).unwrap();
        for a in &data {
            for b in &data {
                let d = model.example_distance(a, b).unwrap();
                assert!(d >= 0.0 && d <= 2.0 * arity as f64 + 1e-9);
            }
        }
    }
}

#[test]
fn classify_single_exemplar_model() {
    let nn = NearestNeighbors::fit(rows(&["a"]), vec![0], 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let m = nn
        .classify(&["completely-new".to_string()], &mut rng)
        .unwrap();
    assert_eq!(m.sense, 0);
    assert_eq!(m.exemplar, 0);
}

#[test]
fn classify_exact_match_wins_at_distance_zero() {
    let nn = NearestNeighbors::fit(rows(&["a", "a", "b"]), vec![0, 0, 1], 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let m = nn.classify(&["b".to_string()], &mut rng).unwrap();
    assert_eq!(m.sense, 1);
    assert_eq!(m.exemplar, 2);
    assert_eq!(m.distance, 0.0);
}

#[test]
fn tie_break_consumes_exactly_one_draw() {
    // Two identical exemplars with different senses force a tie.
    let nn = NearestNeighbors::fit(rows(&["a", "a"]), vec![0, 1], 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut replay = ChaCha8Rng::seed_from_u64(42);
    let m = nn.classify(&["a".to_string()], &mut rng).unwrap();
    let expected = replay.gen_range(0..2usize);
    assert_eq!(m.exemplar, expected);
    assert_eq!(rng.gen::<u64>(), replay.gen::<u64>(), "rng states diverged");

    // A unique minimum consumes nothing.
    let nn = NearestNeighbors::fit(rows(&["a", "a", "b"]), vec![0, 0, 1], 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut untouched = ChaCha8Rng::seed_from_u64(7);
    nn.classify(&["b".to_string()], &mut rng).unwrap();
    assert_eq!(rng.gen::<u64>(), untouched.gen::<u64>());
}

#[test]
fn nearest_set_returns_all_minimum_distance_exemplars() {
    let nn = NearestNeighbors::fit(rows(&["a", "a", "b"]), vec![0, 1, 1], 2).unwrap();
    let (d, ties) = nn.nearest_set(&["a".to_string()]).unwrap();
    assert_eq!(d, 0.0);
    assert_eq!(ties, vec![0, 1]);
}

#[test]
fn value_distance_is_a_pseudo_metric() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..200 {
        let n_senses = rng.gen_range(2..12);
        let n_values = rng.gen_range(1..7);
        let n = rng.gen_range(1..40);
        let data: Vec<Vec<String>> = (0..n)
            .map(|_| vec![format!("v{}", rng.gen_range(0..n_values))])
            .collect();
        let senses: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n_senses)).collect();
        let model = DistanceModel::fit(&data, &senses, n_senses).unwrap();
        let mut values: Vec<String> = (0..n_values).map(|v| format!("v{v}")).collect();
        values.push("unseen".to_string());
        for a in &values {
            assert_eq!(model.value_distance(0, a, a), 0.0);
            for b in &values {
                let dab = model.value_distance(0, a, b);
                let dba = model.value_distance(0, b, a);
                assert_eq!(dab, dba);
                assert!((0.0..=2.0 + 1e-9).contains(&dab));
                for c in &values {
                    let dac = model.value_distance(0, a, c);
                    let dcb = model.value_distance(0, c, b);
                    assert!(dab <= dac + dcb + 1e-9);
                }
            }
        }
    }
}

#[test]
fn renaming_senses_preserves_distances() {
    let mut rng = ChaCha8Rng::seed_from_u64(123);
    for _ in 0..50 {
        let n_senses = rng.gen_range(2..6);
        let n = rng.gen_range(2..30);
        let data: Vec<Vec<String>> = (0..n)
            .map(|_| vec![format!("v{}", rng.gen_range(0..5))])
            .collect();
        let senses: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n_senses)).collect();
        // Rotate the label space.
        let permuted: Vec<usize> = senses.iter().map(|s| (s + 1) % n_senses).collect();
        let model = DistanceModel::fit(&data, &senses, n_senses).unwrap();
        let renamed = DistanceModel::fit(&data, &permuted, n_senses).unwrap();
        for a in 0..5 {
            for b in 0..5 {
                let d1 = model.value_distance(0, &format!("v{a}"), &format!("v{b}"));
                let d2 = renamed.value_distance(0, &format!("v{a}"), &format!("v{b}"));
                assert!((d1 - d2).abs() < 1e-9, "{d1} vs {d2}");
            }
        }
    }
}

fn toy_schema(keywords: &[&str]) -> FeatureSchema {
    FeatureSchema {
        word: "interest".to_string(),
        pos: CoarsePos::Noun,
        senses: vec!["1".to_string(), "2".to_string()],
        params: SchemaParams::default(),
        sources: FeatureSources::ALL,
        keywords: keywords.iter().map(|k| k.to_string()).collect(),
        colloc_values: Default::default(),
        verbs: BTreeSet::new(),
    }
}

fn toy_example(bits: &[bool], sense: Option<&str>) -> ExampleVector {
    ExampleVector {
        pos_window: std::array::from_fn(|_| "NN".to_string()),
        morph: MorphForm::Singular,
        keyword_bits: bits.to_vec(),
        collocs: Default::default(),
        verb: None,
        sense: sense.map(String::from),
    }
}

#[test]
fn train_and_classify_round_trip_through_vectors() {
    let schema = toy_schema(&["rate", "bank"]);
    let examples = vec![
        toy_example(&[true, false], Some("1")),
        toy_example(&[true, false], Some("1")),
        toy_example(&[false, true], Some("2")),
    ];
    let model = TrainedModel::train(schema, examples).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let got = model
        .classify(&toy_example(&[false, true], None), &mut rng)
        .unwrap();
    assert_eq!(got.sense, "2");
    assert_eq!(got.exemplar, 2);
    assert_eq!(got.distance, 0.0);
}

#[test]
fn train_validates_labels_and_arity() {
    let schema = toy_schema(&["rate"]);
    assert!(matches!(
        TrainedModel::train(schema.clone(), vec![]),
        Err(ModelError::EmptyTraining)
    ));
    assert!(matches!(
        TrainedModel::train(schema.clone(), vec![toy_example(&[true], None)]),
        Err(ModelError::MissingLabel { index: 0 })
    ));
    assert!(matches!(
        TrainedModel::train(schema.clone(), vec![toy_example(&[true, false], Some("1"))]),
        Err(ModelError::ArityMismatch { .. })
    ));
    assert!(matches!(
        TrainedModel::train(schema, vec![toy_example(&[true], Some("9"))]),
        Err(ModelError::UnknownSense { .. })
    ));
}

#[test]
fn stored_exemplars_self_classify_at_distance_zero() {
    let schema = toy_schema(&["rate", "bank"]);
    let examples = vec![
        toy_example(&[true, false], Some("1")),
        toy_example(&[true, false], Some("2")), // duplicate values, other sense
        toy_example(&[false, true], Some("2")),
    ];
    let model = TrainedModel::train(schema, examples.clone()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for ex in &examples {
        let got = model.classify(ex, &mut rng).unwrap();
        assert_eq!(got.distance, 0.0);
        let (d, ties) = model.nearest_set(ex).unwrap();
        assert_eq!(d, 0.0);
        let tie_senses: Vec<&str> = ties
            .iter()
            .map(|&i| examples[i].sense.as_deref().unwrap())
            .collect();
        assert!(tie_senses.contains(&got.sense.as_str()));
    }
}

#[test]
fn save_load_round_trip() {
    let schema = toy_schema(&["rate", "bank"]);
    let examples = vec![
        toy_example(&[true, false], Some("1")),
        toy_example(&[false, true], Some("2")),
        toy_example(&[false, false], Some("1")),
    ];
    let model = TrainedModel::train(schema, examples).unwrap();
    let bytes = model.save();
    let loaded = TrainedModel::load(&bytes).unwrap();
    assert_eq!(
        serde_json::to_string(&model).unwrap(),
        serde_json::to_string(&loaded).unwrap()
    );
    // Both classify identically.
    let test = toy_example(&[true, true], None);
    let mut r1 = ChaCha8Rng::seed_from_u64(9);
    let mut r2 = ChaCha8Rng::seed_from_u64(9);
    assert_eq!(
        model.classify(&test, &mut r1).unwrap(),
        loaded.classify(&test, &mut r2).unwrap()
    );
}

#[test]
fn truncated_model_is_corrupt() {
    let schema = toy_schema(&["rate"]);
    let model = TrainedModel::train(schema, vec![toy_example(&[true], Some("1"))]).unwrap();
    let bytes = model.save();
    for cut in [0, 1, bytes.len() / 2, bytes.len() - 1] {
        match TrainedModel::load(&bytes[..cut]) {
            Err(ModelError::CorruptModel(_)) => {}
            other => panic!("expected corrupt model at cut {cut}, got {other:?}"),
        }
    }
}

#[test]
fn future_version_tag_is_rejected() {
    let schema = toy_schema(&["rate"]);
    let model = TrainedModel::train(schema, vec![toy_example(&[true], Some("1"))]).unwrap();
    let text = String::from_utf8(model.save()).unwrap();
    let bumped = text.replace("wsd-model/1", "wsd-model/2");
    match TrainedModel::load(bumped.as_bytes()) {
        Err(ModelError::VersionMismatch { found, .. }) => assert_eq!(found, "wsd-model/2"),
        other => panic!("expected version mismatch, got {other:?}"),
    }
}

#[test]
fn classify_checks_test_arity() {
    let schema = toy_schema(&["rate", "bank"]);
    let model = TrainedModel::train(
        schema,
        vec![
            toy_example(&[true, false], Some("1")),
            toy_example(&[false, true], Some("2")),
        ],
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    assert!(matches!(
        model.classify(&toy_example(&[true], None), &mut rng),
        Err(ModelError::ArityMismatch { .. })
    ));
}
