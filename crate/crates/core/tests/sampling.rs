mod common;

use common::frequencies;
use subset_select::{normalize, sample_index, SeededRng, WeightVector};

/// Upper 1e-6 tail of chi-square with 9 degrees of freedom (scipy
/// `chi2.isf(1e-6, 9)`).
const CHI2_9DF_1E6: f64 = 44.81093787068782;

#[test]
fn fair_coin_frequency() {
    let mut rng = SeededRng::new(42);
    let freq = frequencies((0..100_000).map(|_| sample_index(&[0.5, 0.5], &mut rng)), 2);
    assert!((freq[0] - 0.5).abs() <= 0.01, "{freq:?}");
}

#[test]
fn three_bin_frequencies() {
    let probs = [0.2, 0.3, 0.5];
    let mut rng = SeededRng::new(5);
    let freq = frequencies((0..100_000).map(|_| sample_index(&probs, &mut rng)), 3);
    for (f, p) in freq.iter().zip(probs) {
        assert!((f - p).abs() <= 0.01, "{freq:?}");
    }
}

#[test]
fn chi_square_ten_bins() {
    let weights: Vec<f64> = (1..=10).map(|i| (i * i) as f64).collect();
    let probs = normalize(&WeightVector::all_active(weights).unwrap()).unwrap();
    assert!((probs.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    for seed in [1, 2, 3] {
        let mut rng = SeededRng::new(seed);
        let n = 100_000;
        let mut counts = [0usize; 10];
        for _ in 0..n {
            counts[sample_index(&probs, &mut rng)] += 1;
        }
        let stat: f64 = counts
            .iter()
            .zip(&probs)
            .map(|(&c, &p)| {
                let e = p * n as f64;
                (c as f64 - e).powi(2) / e
            })
            .sum();
        assert!(stat < CHI2_9DF_1E6, "seed {seed}: chi2 = {stat}");
    }
}

#[test]
fn normalized_output_sums_to_one() {
    let mut rng = SeededRng::new(8);
    for _ in 0..200 {
        let m = 1 + (rng.next_f64() * 50.0) as usize;
        let w: Vec<f64> = (0..m).map(|_| rng.next_f64() * 1e6).collect();
        let active: Vec<bool> = (0..m).map(|_| rng.next_f64() < 0.7).collect();
        let Ok(p) = normalize(&WeightVector::new(w, active.clone()).unwrap()) else {
            assert!(active.iter().all(|a| !a));
            continue;
        };
        assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        assert!(p.iter().zip(&active).all(|(&x, &a)| a || x == 0.0));
    }
}
