mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unselect::dataset::{DataTable, Discretizer, FeatureSubset, Strategy as Binning};
use unselect::eval::{
    cross_validate, run_benchmark, BenchConfig, ClassifierKind, CvOptions, DecisionTable, FoldPlan,
    GaussianNb, Knn,
};
use unselect::selectors::Method;

fn labels_strategy() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "d"]), 10..80)
        .prop_map(|v| v.into_iter().map(String::from).collect())
}

fn noisy_table(rng: &mut ChaCha8Rng, n: usize) -> DataTable {
    let labels: Vec<String> = (0..n).map(|i| ["p", "q", "r"][i % 3].to_string()).collect();
    let rows = (0..n)
        .map(|i| {
            let c = (i % 3) as f64;
            vec![
                c + rng.random_range(-0.8..0.8),
                rng.random_range(-1.0..1.0),
                c * 2.0 + rng.random_range(-2.0..2.0),
            ]
        })
        .collect();
    DataTable::from_rows(rows)
        .unwrap()
        .with_labels(Some(labels))
        .unwrap()
}

proptest! {
    #[test]
    fn folds_are_stratified(labels in labels_strategy(), k in 2usize..10, seed in any::<u64>()) {
        prop_assume!(k <= labels.len());
        let plan = FoldPlan::stratified(&labels, k, seed).unwrap();
        let sizes = plan.fold_sizes();
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        let mut per: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, l) in labels.iter().enumerate() {
            per.entry(l).or_insert_with(|| vec![0; k])[plan.assignments[i]] += 1;
        }
        for (class, counts) in per {
            let total: usize = counts.iter().sum();
            let share = total as f64 / k as f64;
            for c in counts {
                prop_assert!((c as f64 - share).abs() <= 1.0, "{} {}", class, c);
            }
        }
        prop_assert_eq!(plan, FoldPlan::stratified(&labels, k, seed).unwrap());
    }

    #[test]
    fn nb_log_scores_stay_finite(t in common::real_table(12, 4), q in prop::collection::vec(-1e6f64..1e6, 4)) {
        let labels: Vec<String> = (0..t.n_objects()).map(|i| (i % 2).to_string()).collect();
        let t = t.with_labels(Some(labels)).unwrap();
        let m = GaussianNb::fit(&t).unwrap();
        prop_assert!(m.log_scores(&q[..t.n_attributes()]).iter().all(|s| s.is_finite()));
    }
}

#[test]
fn accuracy_equals_weighted_fold_mean() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let t = noisy_table(&mut rng, 97);
    let plan = FoldPlan::stratified(t.labels().unwrap(), 10, 1).unwrap();
    for c in ClassifierKind::ALL {
        let r =
            cross_validate(&t, &FeatureSubset::all(3), c, &plan, &CvOptions::default()).unwrap();
        let weighted: f64 = r
            .fold_accuracies
            .iter()
            .zip(&r.fold_sizes)
            .map(|(a, s)| a * *s as f64)
            .sum::<f64>()
            / r.fold_sizes.iter().sum::<usize>() as f64;
        assert!((weighted - r.accuracy).abs() < 1e-9, "{c}");
        assert_eq!(r.total, 97);
    }
}

#[test]
fn noise_in_one_fold_only_reaches_its_own_predictions() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let t = noisy_table(&mut rng, 60);
    let plan = FoldPlan::stratified(t.labels().unwrap(), 5, 1).unwrap();
    let f = 2;
    let test = plan.test_indices(f);
    let rows: Vec<Vec<f64>> = (0..60)
        .map(|i| {
            if test.contains(&i) {
                (0..3).map(|_| rng.random_range(-50.0..50.0)).collect()
            } else {
                t.row(i).to_vec()
            }
        })
        .collect();
    let noisy = DataTable::from_rows(rows)
        .unwrap()
        .with_labels(t.labels().map(<[String]>::to_vec))
        .unwrap();
    let labels = noisy.labels().unwrap();
    let train = noisy.select_rows(&plan.train_indices(f)).unwrap();
    // fold f's model must be the one fitted on its (clean) training rows alone
    let knn = Knn::fit(&train, 3).unwrap();
    let cuts = Discretizer::fit(&train, Binning::EqualFrequency, 3).unwrap();
    let table = DecisionTable::fit(&cuts.apply(&train).unwrap()).unwrap();
    let expect = |pred: &dyn Fn(&[f64]) -> String| {
        let hits = test
            .iter()
            .filter(|&&i| pred(noisy.row(i)) == labels[i])
            .count();
        100.0 * hits as f64 / test.len() as f64
    };
    let knn_acc = expect(&|r| knn.predict(r).to_string());
    let dt_acc = expect(&|r| {
        let codes: Vec<u32> = r
            .iter()
            .enumerate()
            .map(|(j, &x)| cuts.code(j, x))
            .collect();
        table.predict(&codes).to_string()
    });
    let opts = CvOptions::default();
    let all = FeatureSubset::all(3);
    let got_knn = cross_validate(&noisy, &all, ClassifierKind::Knn(3), &plan, &opts).unwrap();
    let got_dt = cross_validate(&noisy, &all, ClassifierKind::DecisionTable, &plan, &opts).unwrap();
    assert_eq!(got_knn.fold_accuracies[f], knn_acc);
    assert_eq!(got_dt.fold_accuracies[f], dt_acc);
}

#[test]
fn benchmark_reports_are_deterministic_and_complete() {
    let reg = common::registry();
    let names = vec!["diabetes".to_string(), "ecoli".to_string()];
    let cfg = BenchConfig::default();
    let a = run_benchmark(&reg, &names, &Method::ALL, &ClassifierKind::ALL, &cfg).unwrap();
    let b = run_benchmark(&reg, &names, &Method::ALL, &ClassifierKind::ALL, &cfg).unwrap();
    assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    assert_eq!(a.rows.len(), 2 * 4 * 3);
    assert!(a.errors.is_empty());
    let one = run_benchmark(
        &reg,
        &names[..1],
        &[Method::Edr],
        &[ClassifierKind::NaiveBayes],
        &cfg,
    )
    .unwrap();
    assert_eq!(one.rows.len(), 1);
    assert!(a
        .render_table()
        .contains("CLASSIFICATION ACCURACY FOR DIABETES"));
}

#[test]
fn unknown_dataset_is_reported_not_fatal() {
    let reg = common::registry();
    let names = vec!["nonexistent".to_string(), "ecoli".to_string()];
    let r = run_benchmark(
        &reg,
        &names,
        &[Method::Edr],
        &[ClassifierKind::NaiveBayes],
        &BenchConfig::default(),
    )
    .unwrap();
    assert_eq!(r.errors.len(), 1);
    assert_eq!(r.errors[0].dataset, "nonexistent");
    assert_eq!(r.rows.len(), 1);
}

#[test]
fn majority_baseline_is_about_half_on_balanced_data() {
    // one constant feature: every classifier falls back to the prior
    let labels: Vec<String> = (0..40)
        .map(|i| if i % 2 == 0 { "x" } else { "y" }.to_string())
        .collect();
    let t = DataTable::from_rows(vec![vec![1.0]; 40])
        .unwrap()
        .with_labels(Some(labels))
        .unwrap();
    let plan = FoldPlan::stratified(t.labels().unwrap(), 10, 1).unwrap();
    let r = cross_validate(
        &t,
        &FeatureSubset::all(1),
        ClassifierKind::DecisionTable,
        &plan,
        &CvOptions::default(),
    )
    .unwrap();
    assert!((r.accuracy - 50.0).abs() <= 10.0, "{}", r.accuracy);
}
