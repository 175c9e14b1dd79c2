mod common;

use common::gaussian_matrix;
use rand_distr::{Distribution, StandardNormal};
use subset_select::eval::{
    correlation_study, frechet_proxy, generate_synthetic, generate_test_set,
    nearest_centroid_accuracy, norm_histogram, subset_accuracy, SyntheticSpec,
};
use subset_select::{
    compute_norms, select, FeatureMatrix, NormType, SeededRng, SelectionConfig, Strategy,
};

#[test]
fn tiny_noise_puts_every_clean_example_on_the_sphere() {
    let spec = SyntheticSpec {
        noise_sigma: 1e-9,
        corrupted_fraction: 0.0,
        per_class: 20,
        seed: 4,
        ..SyntheticSpec::default()
    };
    let data = generate_synthetic(&spec).unwrap();
    let slack = 10.0 * spec.noise_sigma * (spec.n_dims as f64).sqrt();
    for n in compute_norms(&data.set.features, NormType::L2) {
        assert!((n - spec.centroid_radius).abs() <= slack, "{n}");
    }
}

#[test]
fn shrunk_examples_have_small_norms() {
    let spec = SyntheticSpec {
        centroid_radius: 20.0,
        noise_sigma: 0.5,
        seed: 9,
        ..SyntheticSpec::default()
    };
    let data = generate_synthetic(&spec).unwrap();
    let norms = compute_norms(&data.set.features, NormType::L2);
    let mean = |want: bool| {
        let v: Vec<f64> = norms
            .iter()
            .zip(&data.corrupted)
            .filter(|(_, &c)| c == want)
            .map(|(n, _)| *n)
            .collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    assert!(mean(true) < 0.5 * mean(false));
}

#[test]
fn generation_is_deterministic() {
    let spec = SyntheticSpec {
        seed: 3,
        per_class: 30,
        ..SyntheticSpec::default()
    };
    assert_eq!(
        generate_synthetic(&spec).unwrap(),
        generate_synthetic(&spec).unwrap()
    );
    assert_eq!(
        generate_test_set(&spec, 5).unwrap(),
        generate_test_set(&spec, 5).unwrap()
    );
}

/// Direct nearest-centroid classification with an exhaustive distance table.
fn brute_force_accuracy(
    train: &FeatureMatrix,
    train_labels: &[usize],
    test: &FeatureMatrix,
    test_labels: &[usize],
) -> f64 {
    let classes = train_labels.iter().max().unwrap() + 1;
    let d = train.n_dims();
    let mut centroids = vec![None::<Vec<f64>>; classes];
    for k in 0..classes {
        let members: Vec<usize> = (0..train_labels.len())
            .filter(|&i| train_labels[i] == k)
            .collect();
        if members.is_empty() {
            continue;
        }
        let c = (0..d)
            .map(|a| members.iter().map(|&i| train.row(i)[a]).sum::<f64>() / members.len() as f64)
            .collect();
        centroids[k] = Some(c);
    }
    let mut hits = 0;
    for (i, &label) in test_labels.iter().enumerate() {
        let x = test.row(i);
        let dists: Vec<(f64, usize)> = centroids
            .iter()
            .enumerate()
            .filter_map(|(k, c)| {
                c.as_ref().map(|c| {
                    (
                        x.iter().zip(c).map(|(a, b)| (a - b).powi(2)).sum::<f64>(),
                        k,
                    )
                })
            })
            .collect();
        let best = dists.iter().fold(
            (f64::INFINITY, 0),
            |acc, &(dd, k)| if dd < acc.0 { (dd, k) } else { acc },
        );
        if best.1 == label {
            hits += 1;
        }
    }
    hits as f64 / test_labels.len() as f64
}

#[test]
fn probe_matches_brute_force() {
    let spec = SyntheticSpec {
        per_class: 20,
        seed: 12,
        ..SyntheticSpec::default()
    };
    let pool = generate_synthetic(&spec).unwrap().set;
    let test = generate_test_set(&spec, 100).unwrap();
    let acc = nearest_centroid_accuracy(&pool.features, &pool.labels, &test.features, &test.labels)
        .unwrap();
    let oracle = brute_force_accuracy(&pool.features, &pool.labels, &test.features, &test.labels);
    assert_eq!(acc, oracle);
    assert!(acc > 0.5);
}

#[test]
fn single_class_subset_scores_one_over_c() {
    let spec = SyntheticSpec {
        per_class: 10,
        corrupted_fraction: 0.0,
        seed: 2,
        ..SyntheticSpec::default()
    };
    let pool = generate_synthetic(&spec).unwrap().set;
    let test = generate_test_set(&spec, 10).unwrap();
    let acc = subset_accuracy(&pool, &[0, 1, 2], &test).unwrap();
    assert!((acc - 0.1).abs() < 1e-12);
}

#[test]
fn probe_accuracy_is_scale_invariant() {
    let spec = SyntheticSpec {
        per_class: 20,
        seed: 5,
        ..SyntheticSpec::default()
    };
    let pool = generate_synthetic(&spec).unwrap().set;
    let test = generate_test_set(&spec, 30).unwrap();
    let a = nearest_centroid_accuracy(&pool.features, &pool.labels, &test.features, &test.labels)
        .unwrap();
    let b = nearest_centroid_accuracy(
        &pool.features.scaled(3.7).unwrap(),
        &pool.labels,
        &test.features.scaled(3.7).unwrap(),
        &test.labels,
    )
    .unwrap();
    assert_eq!(a, b);
}

#[test]
fn corrupted_mixture_correlation_is_positive() {
    let spec = SyntheticSpec {
        seed: 1,
        ..SyntheticSpec::default()
    };
    let pool = generate_synthetic(&spec).unwrap().set;
    let test = generate_test_set(&spec, 100).unwrap();
    let report = correlation_study(&pool, &test, 50, 100, 1).unwrap();
    assert!(report.fit.slope > 0.0);
    assert!(report.fit.pearson_r > 0.2, "r = {}", report.fit.pearson_r);
    assert_eq!(report.points.len(), 100);
    assert!(correlation_study(&pool, &test, 50, 9, 1).is_err());
}

#[test]
fn histogram_conserves_counts() {
    let f = gaussian_matrix(10_000, 4, 8);
    let h = norm_histogram(&f, NormType::L2, 50).unwrap();
    assert_eq!(h.counts.len(), 50);
    assert_eq!(h.edges.len(), 51);
    assert_eq!(h.counts.iter().sum::<usize>(), 10_000);
    let norms = compute_norms(&f, NormType::L2);
    let max = norms.iter().copied().fold(f64::MIN, f64::max);
    assert_eq!(*h.edges.last().unwrap(), max);
    assert!(*h.counts.last().unwrap() >= 1);
}

#[test]
fn frechet_symmetric_and_zero_on_identity() {
    let a = gaussian_matrix(200, 5, 1);
    let b = gaussian_matrix(300, 5, 2).scaled(1.5).unwrap();
    assert!(frechet_proxy(&a, &a).unwrap() < 1e-6);
    let ab = frechet_proxy(&a, &b).unwrap();
    let ba = frechet_proxy(&b, &a).unwrap();
    assert!(ab > 0.0);
    assert!((ab - ba).abs() <= 1e-8 * ab);
}

#[test]
fn frechet_shifted_gaussians_approach_delta_squared() {
    let d = 8;
    let delta: f64 = 3.0;
    let mut rng = SeededRng::new(21);
    let mut draw = |shift: f64| {
        let data: Vec<f64> = (0..10_000 * d)
            .map(|k| {
                let z: f64 = StandardNormal.sample(&mut rng);
                if k % d == 0 {
                    z + shift
                } else {
                    z
                }
            })
            .collect();
        FeatureMatrix::new(10_000, d, data).unwrap()
    };
    let a = draw(0.0);
    let b = draw(delta);
    let score = frechet_proxy(&a, &b).unwrap();
    assert!(
        (score - delta * delta).abs() <= 0.05 * delta * delta,
        "{score}"
    );
}

#[test]
fn frechet_of_norm_and_uniform_subsets_is_finite() {
    let spec = SyntheticSpec {
        seed: 1,
        ..SyntheticSpec::default()
    };
    let pool = generate_synthetic(&spec).unwrap().set;
    for strategy in [Strategy::NormWeighted, Strategy::Uniform] {
        let picked = select(
            &pool.features,
            &SelectionConfig::new(strategy, 200).with_seed(3),
            None,
        )
        .unwrap()
        .indices;
        let rest: Vec<usize> = (0..pool.len()).filter(|i| !picked.contains(i)).collect();
        let score = frechet_proxy(
            &pool.features.select_rows(&picked).unwrap(),
            &pool.features.select_rows(&rest).unwrap(),
        )
        .unwrap();
        assert!(score.is_finite() && score >= 0.0);
    }
}
