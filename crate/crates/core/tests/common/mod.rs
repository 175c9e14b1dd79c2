#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};
use subset_select::{FeatureMatrix, SeededRng};

pub fn gaussian_matrix(n: usize, d: usize, seed: u64) -> FeatureMatrix {
    let mut rng = SeededRng::new(seed);
    let data = (0..n * d)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    FeatureMatrix::new(n, d, data).unwrap()
}

/// Residual of `target` after least-squares fit on the columns `basis`,
/// solved through an SVD with a relative rank cutoff.
pub fn least_squares_residual(basis: &[&[f64]], target: &[f64]) -> Vec<f64> {
    let d = target.len();
    if basis.is_empty() {
        return target.to_vec();
    }
    let a = DMatrix::from_fn(d, basis.len(), |r, c| basis[c][r]);
    let b = DVector::from_column_slice(target);
    let svd = a.clone().svd(true, true);
    let cutoff = 1e-10 * svd.singular_values.max();
    let x = svd.solve(&b, cutoff).unwrap();
    (b - a * x).iter().copied().collect()
}

pub fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Frequencies of each value in `0..n` over `draws`.
pub fn frequencies(draws: impl IntoIterator<Item = usize>, n: usize) -> Vec<f64> {
    let mut counts = vec![0usize; n];
    let mut total = 0usize;
    for i in draws {
        counts[i] += 1;
        total += 1;
    }
    counts.iter().map(|&c| c as f64 / total as f64).collect()
}

/// Sequential weighted sampling without replacement: rescan the remaining
/// weights for every pick.
pub fn brute_force_sequential(weights: &[f64], s: usize, rng: &mut SeededRng) -> Vec<usize> {
    let mut remaining: Vec<usize> = (0..weights.len()).collect();
    let mut picked = Vec::with_capacity(s);
    for _ in 0..s {
        let total: f64 = remaining.iter().map(|&i| weights[i]).sum();
        let target = rng.next_f64() * total;
        let mut acc = 0.0;
        let mut chosen = remaining.len() - 1;
        for (pos, &i) in remaining.iter().enumerate() {
            acc += weights[i];
            if target < acc {
                chosen = pos;
                break;
            }
        }
        picked.push(remaining.remove(chosen));
    }
    picked
}
