use std::collections::{BTreeSet, HashSet};

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polyfeat::dataset::{
    f_value, read_labels_csv, split, standardize, write_labels_csv, LabelRecord, LabelledCorpus,
    DEFAULT_TRAIN_FRACTION,
};
use polyfeat::features::{evaluate_matrix, feature_specs, BaseReading, FeatureMatrix};
use polyfeat::heuristics::{
    projection_set, read_predictions, sotd, write_predictions, PredictionRecord, SotdMode, SOTD_MAX_VARS,
};
use polyfeat::ml::{
    assign_targets, evaluate_method, knn_predict_standardized, knn_train, read_timings_csv, validate_limits,
    write_timings_csv, KnnConfig, KnnModel, LimitSchedule, ProblemTimings, Status, TimingTable,
};
use polyfeat::ordering::{natural_sort, Ordering};
use polyfeat::poly::parse_polynomial;
use polyfeat::problem::parse_corpus_jsonl;
use polyfeat::{Polynomial, ProblemInstance, Rational, VariableSet};

fn problem(vars: &[&str], polys: &[&str]) -> ProblemInstance {
    let vs = VariableSet::new(vars.iter().copied()).unwrap();
    let ps = polys.iter().map(|p| parse_polynomial(p, &vs).unwrap()).collect();
    ProblemInstance::new(vs, ps).unwrap()
}

fn poly(vars: &[&str], text: &str) -> Polynomial {
    parse_polynomial(text, &VariableSet::new(vars.iter().copied()).unwrap()).unwrap()
}

fn timings(id: &str, times: &[f64]) -> ProblemTimings {
    ProblemTimings {
        id: id.into(),
        names: vec!["x1".into(), "x2".into(), "x3".into()],
        times: times.to_vec(),
        status: vec![Status::Ok; times.len()],
    }
}

#[test]
fn split_sizes_and_partition() {
    let (train, test) = split(6117, DEFAULT_TRAIN_FRACTION, 0).unwrap();
    assert_eq!((train.len(), test.len()), (4612, 1505));
    let (a, b) = split(10, 0.8, 3).unwrap();
    assert_eq!((a.len(), b.len()), (8, 2));
    assert_eq!(split(10, 0.8, 3).unwrap(), (a.clone(), b.clone()));
    let all: BTreeSet<usize> = a.iter().chain(&b).copied().collect();
    assert_eq!(all, (0..10).collect());
    assert!(split(10, 1.0, 0).is_err());
    assert!(split(10, 0.0, 0).is_err());
}

#[test]
fn split_keeps_label_multiset() {
    let ids: Vec<String> = (0..20).map(|i| format!("p{i}")).collect();
    let m = FeatureMatrix::new(
        ids.clone(),
        vec![1],
        (0..20).map(|i| vec![Rational::from_integer(BigInt::from(i))]).collect(),
    );
    let labels: Vec<LabelRecord> = ids
        .iter()
        .enumerate()
        .map(|(i, id)| {
            let class = i % 6 + 1;
            LabelRecord {
                problem_id: id.clone(),
                class,
                ordering: Ordering::from_class(3, class).unwrap().to_string(),
            }
        })
        .collect();
    let corpus = LabelledCorpus::new(m, &labels, 3).unwrap();
    let (train, test) = corpus.split(0.75, 9).unwrap();
    let mut joined: Vec<usize> = train.labels.iter().chain(&test.labels).copied().collect();
    joined.sort_unstable();
    let mut original = corpus.labels.clone();
    original.sort_unstable();
    assert_eq!(joined, original);
}

#[test]
fn standardize_is_a_fixed_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let rows: Vec<Vec<Rational>> = (0..15)
        .map(|_| (0..4).map(|_| Rational::from_integer(BigInt::from(rng.gen_range(-9..10)))).collect())
        .collect();
    let ids: Vec<String> = (0..15).map(|i| format!("r{i}")).collect();
    let m = FeatureMatrix::new(ids.clone(), vec![1, 2, 3, 4], rows);
    let z = standardize(&m, &m).unwrap();
    for j in 0..4 {
        let col: Vec<f64> = z.iter().map(|r| r[j]).collect();
        let mean = col.iter().sum::<f64>() / col.len() as f64;
        let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / col.len() as f64;
        assert!(mean.abs() < 1e-12 && (var - 1.0).abs() < 1e-12);
    }
    let two = FeatureMatrix::new(
        vec!["a".into(), "b".into()],
        vec![7],
        vec![vec![Rational::from_integer(0.into())], vec![Rational::from_integer(2.into())]],
    );
    assert_eq!(standardize(&two, &two).unwrap(), vec![vec![-1.0], vec![1.0]]);
}

#[test]
fn f_value_affine_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let n = rng.gen_range(6..40);
        let labels: Vec<usize> = (0..n).map(|i| if i < 3 { i + 1 } else { rng.gen_range(1..=3) }).collect();
        let values: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let f = f_value(&values, &labels).unwrap();
        let (a, b) = (rng.gen_range(0.5..3.0) * if rng.gen() { -1.0 } else { 1.0 }, rng.gen_range(-10.0..10.0));
        let moved: Vec<f64> = values.iter().map(|v| a * v + b).collect();
        let g = f_value(&moved, &labels).unwrap();
        assert!((f - g).abs() <= 1e-9 * f.abs().max(1.0), "{f} vs {g}");
    }
}

#[test]
fn separated_column_outranks_noise() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut wins = 0;
    for _ in 0..100 {
        let labels: Vec<usize> = (0..30).map(|i| i % 2 + 1).collect();
        let separated: Vec<f64> = labels.iter().map(|&l| l as f64 * 3.0 + rng.gen_range(-1.0..1.0)).collect();
        let noise: Vec<f64> = (0..30).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if f_value(&separated, &labels).unwrap() > f_value(&noise, &labels).unwrap() {
            wins += 1;
        }
    }
    assert_eq!(wins, 100);
}

#[test]
fn feature_csv_and_labels_round_trip() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../cli/tests/data/corpus.jsonl")).unwrap();
    let corpus = parse_corpus_jsonl(&text).unwrap();
    let m = evaluate_matrix(&corpus[..6], &feature_specs(3, true), BaseReading::Formula).unwrap();
    assert_eq!(m.ncols(), 1730);
    // values are written as decimals, so the text is what must be stable
    let text = m.to_csv_string();
    let back = FeatureMatrix::read_csv(text.as_bytes()).unwrap();
    assert_eq!((back.ids(), back.serials()), (m.ids(), m.serials()));
    assert_eq!(back.to_csv_string(), text);

    let labels = vec![
        LabelRecord {
            problem_id: "p01".into(),
            class: 2,
            ordering: "x1>x3>x2".into(),
        },
        LabelRecord {
            problem_id: "p02".into(),
            class: 6,
            ordering: "x3>x2>x1".into(),
        },
    ];
    let mut buf = Vec::new();
    write_labels_csv(&labels, &mut buf).unwrap();
    assert_eq!(read_labels_csv(buf.as_slice()).unwrap(), labels);
}

#[test]
fn projection_examples() {
    let v = ["x", "a", "b", "c"];
    let got: HashSet<Polynomial> = projection_set(&[poly(&v, "a*x^2 + b*x + c")], 0).into_iter().collect();
    let want: HashSet<Polynomial> = ["a", "b", "c", "a*(4*a*c - b^2)"]
        .iter()
        .map(|t| poly(&v, t).monic())
        .collect();
    assert_eq!(got, want);

    assert!(projection_set(&[poly(&["x1"], "x1 + 1")], 0).is_empty());

    let xy = ["x", "y"];
    let got = projection_set(&[poly(&xy, "x - y"), poly(&xy, "x + y")], 0);
    assert_eq!(got, vec![poly(&xy, "y")]);
}

#[test]
fn projection_has_no_constants_or_repeats() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let vars = VariableSet::generic(3);
    for _ in 0..100 {
        let polys: Vec<Polynomial> = (0..rng.gen_range(1..4))
            .map(|_| {
                let text = (0..rng.gen_range(1..4))
                    .map(|_| format!("{}*x1^{}*x2^{}*x3^{}", rng.gen_range(1..5), rng.gen_range(0..3), rng.gen_range(0..3), rng.gen_range(0..3)))
                    .collect::<Vec<_>>()
                    .join(" + ");
                parse_polynomial(&text, &vars).unwrap()
            })
            .collect();
        let out = projection_set(&polys, rng.gen_range(0..3));
        let distinct: HashSet<&Polynomial> = out.iter().collect();
        assert_eq!(distinct.len(), out.len());
        assert!(out.iter().all(|p| !p.is_constant()));
    }
}

#[test]
fn sotd_examples() {
    let pr = problem(&["x1", "x2", "x3"], &["x1^4 + x2", "x2^2 + x3"]);
    let set = sotd(&pr, SotdMode::Deduplicate, SOTD_MAX_VARS).unwrap();
    assert_eq!(set.scores.len(), 6);
    let best = set.scores.values().copied().fold(f64::INFINITY, f64::min);
    let argmin: BTreeSet<&Ordering> = set.scores.iter().filter(|(_, &s)| s == best).map(|(o, _)| o).collect();
    assert_eq!(argmin, set.orderings.iter().collect());

    let scaled = problem(&["x1", "x2", "x3"], &["7*x1^4 + 3*x2", "-2*x2^2 + 1/5*x3"]);
    assert_eq!(sotd(&scaled, SotdMode::Deduplicate, SOTD_MAX_VARS).unwrap(), set);

    let many = problem(&["a", "b", "c", "d", "e", "f", "g"], &["a + b + c + d + e + f + g"]);
    assert!(sotd(&many, SotdMode::Deduplicate, SOTD_MAX_VARS).is_err());

    // counting with multiplicity never scores lower
    let multi = sotd(&pr, SotdMode::Multiplicity, SOTD_MAX_VARS).unwrap();
    for (o, s) in &set.scores {
        assert!(multi.scores[o] >= *s);
    }
}

#[test]
fn predictions_round_trip() {
    let pr = problem(&["x", "y"], &["x^2 + y", "y^3 - x"]);
    let set = sotd(&pr, SotdMode::Deduplicate, SOTD_MAX_VARS).unwrap();
    let records = vec![PredictionRecord::new("q", "sotd", &set, pr.variables().names())];
    let mut buf = Vec::new();
    write_predictions(&records, &mut buf).unwrap();
    assert_eq!(read_predictions(buf.as_slice()).unwrap(), records);
}

#[test]
fn targets_and_timing_csv() {
    let table = TimingTable {
        problems: vec![
            timings("a", &[1.0, 2.0, 2.0, 4.0, 8.0, 16.0]),
            ProblemTimings {
                status: vec![Status::Timeout; 6],
                ..timings("b", &[128.0; 6])
            },
        ],
    };
    let targets = assign_targets(&table);
    assert_eq!(targets[0].targets, vec!["x1>x2>x3"]);
    assert_eq!(targets[0].min_time_s, 1.0);
    assert_eq!(targets[1].targets.len(), 6);
    assert_eq!(targets[1].single_class(), 1);
    validate_limits(&table, LimitSchedule::Fixed(128.0)).unwrap();
    assert!(validate_limits(&table, LimitSchedule::Fixed(64.0)).is_err());

    let mut buf = Vec::new();
    write_timings_csv(&table, &mut buf).unwrap();
    assert_eq!(read_timings_csv(buf.as_slice(), None).unwrap(), table);
}

#[test]
fn timing_names_sort_naturally() {
    let mut names: Vec<String> = ["x10", "x2", "x1"].iter().map(|s| s.to_string()).collect();
    natural_sort(&mut names);
    assert_eq!(names, ["x1", "x2", "x10"]);
}

#[test]
fn evaluation_scales_with_time() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let table = TimingTable {
        problems: (0..10)
            .map(|i| timings(&format!("p{i}"), &(0..6).map(|_| f64::from(rng.gen_range(1..20))).collect::<Vec<_>>()))
            .collect(),
    };
    let preds: Vec<(String, Vec<Ordering>)> = table
        .problems
        .iter()
        .map(|p| {
            let mut all = Ordering::all(3);
            all.shuffle(&mut rng);
            all.truncate(rng.gen_range(1..4));
            (p.id.clone(), all)
        })
        .collect();
    let base = evaluate_method("m", &preds, &table).unwrap();
    let scaled_table = TimingTable {
        problems: table
            .problems
            .iter()
            .map(|p| ProblemTimings {
                times: p.times.iter().map(|t| t * 4.0).collect(),
                ..p.clone()
            })
            .collect(),
    };
    let scaled = evaluate_method("m", &preds, &scaled_table).unwrap();
    assert_eq!(scaled.accuracy_percent, base.accuracy_percent);
    assert_eq!(scaled.total_time_s, base.total_time_s * 4.0);
    assert_eq!(scaled.histogram, base.histogram);
}

#[test]
fn knn_tie_breaks() {
    let points = vec![vec![-1.0], vec![1.0]];
    // equidistant query: lower class wins
    assert_eq!(knn_predict_standardized(&points, &[5, 2], 2, &[0.0]), 2);
    // k = 1 picks the nearest point
    assert_eq!(knn_predict_standardized(&points, &[5, 2], 1, &[-0.9]), 5);
    // a query on a training point takes its class
    assert_eq!(knn_predict_standardized(&points, &[5, 2], 2, &[1.0]), 2);
}

#[test]
fn knn_separable_selects_smallest_k() {
    let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![if i < 10 { f64::from(i) } else { 100.0 + f64::from(i) }]).collect();
    let classes: Vec<usize> = (0..20).map(|i| if i < 10 { 1 } else { 2 }).collect();
    let config = KnnConfig {
        grid: (1..=5).collect(),
        folds: 5,
        seed: 0,
    };
    let model = knn_train(&rows, &classes, &[1], 3, &config).unwrap();
    assert_eq!(model.k, 1);
    assert!(model.cv_scores.iter().all(|&(_, s)| s == 1.0));
    let back = KnnModel::from_json(&model.to_json()).unwrap();
    assert_eq!(back, model);
    assert!(model.predict_row(&[1.0, 2.0]).is_err());
}
