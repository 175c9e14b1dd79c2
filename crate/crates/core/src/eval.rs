//! Desk-scale evaluation harness.
//!
//! Neural-network training is replaced by a nearest-centroid probe on a
//! synthetic Gaussian mixture. The mixture has a "corrupted" component:
//! examples shrunk toward the origin and relabeled at random, so that low
//! feature norm goes together with label noise. This is a qualitative
//! stand-in for pre-trained embeddings, not a model of any real dataset.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{compute_norms, FeatureMatrix, NormType};
use crate::sampling::SeededRng;
use crate::strategies::{select, SelectionConfig, Strategy};

/// Regularization added to both covariances in [`frechet_proxy`].
pub const FRECHET_RIDGE: f64 = 1e-6;

/// Offset mixed into the mixture seed for the clean test draw.
const TEST_STREAM_OFFSET: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n_classes: usize,
    pub per_class: usize,
    pub n_dims: usize,
    /// Distance of every class centroid from the origin.
    pub centroid_radius: f64,
    pub noise_sigma: f64,
    /// Fraction of examples shrunk toward the origin and relabeled uniformly.
    pub corrupted_fraction: f64,
    pub shrink: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            n_classes: 10,
            per_class: 500,
            n_dims: 32,
            centroid_radius: 6.0,
            noise_sigma: 1.0,
            corrupted_fraction: 0.3,
            shrink: 0.2,
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.n_classes < 2 {
            return bad("need at least 2 classes");
        }
        if self.per_class == 0 || self.n_dims == 0 {
            return bad("per_class and n_dims must be positive");
        }
        if !(self.centroid_radius > 0.0 && self.centroid_radius.is_finite()) {
            return bad("centroid_radius must be positive");
        }
        if !(self.noise_sigma > 0.0 && self.noise_sigma.is_finite()) {
            return bad("noise_sigma must be positive");
        }
        if !(0.0..1.0).contains(&self.corrupted_fraction) {
            return bad("corrupted_fraction must lie in [0, 1)");
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return bad("shrink must lie in (0, 1)");
        }
        Ok(())
    }

    pub fn n_examples(&self) -> usize {
        self.n_classes * self.per_class
    }
}

/// Features with integer class labels in `[0, n_classes)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledSet {
    pub features: FeatureMatrix,
    pub labels: Vec<usize>,
}

impl LabeledSet {
    pub fn new(features: FeatureMatrix, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != features.n_examples() {
            return Err(Error::ShapeMismatch(format!(
                "{} labels for {} examples",
                labels.len(),
                features.n_examples()
            )));
        }
        Ok(Self { features, labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticData {
    pub set: LabeledSet,
    /// Which examples were shrunk and relabeled.
    pub corrupted: Vec<bool>,
}

fn centroids(spec: &SyntheticSpec, rng: &mut SeededRng) -> Vec<Vec<f64>> {
    (0..spec.n_classes)
        .map(|_| loop {
            let v: Vec<f64> = (0..spec.n_dims)
                .map(|_| StandardNormal.sample(rng))
                .collect();
            let norm = NormType::L2.of(&v);
            if norm > 0.0 {
                break v.iter().map(|x| x * spec.centroid_radius / norm).collect();
            }
        })
        .collect()
}

fn draw_clean(
    spec: &SyntheticSpec,
    centers: &[Vec<f64>],
    per_class: usize,
    rng: &mut SeededRng,
) -> (Vec<f64>, Vec<usize>) {
    let mut data = Vec::with_capacity(spec.n_classes * per_class * spec.n_dims);
    let mut labels = Vec::with_capacity(spec.n_classes * per_class);
    for (k, c) in centers.iter().enumerate() {
        for _ in 0..per_class {
            for &ci in c {
                let z: f64 = StandardNormal.sample(rng);
                data.push(ci + spec.noise_sigma * z);
            }
            labels.push(k);
        }
    }
    (data, labels)
}

/// Draws the training pool. Rows are grouped by class before corruption;
/// exactly `round(corrupted_fraction * N)` rows are corrupted.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<SyntheticData> {
    spec.validate()?;
    let mut rng = SeededRng::new(spec.seed);
    let centers = centroids(spec, &mut rng);
    let (mut data, mut labels) = draw_clean(spec, &centers, spec.per_class, &mut rng);

    let n = spec.n_examples();
    let n_corrupt = (spec.corrupted_fraction * n as f64).round() as usize;
    let mut corrupted = vec![false; n];
    for i in rand::seq::index::sample(&mut rng, n, n_corrupt) {
        corrupted[i] = true;
    }
    for i in (0..n).filter(|&i| corrupted[i]) {
        for v in &mut data[i * spec.n_dims..(i + 1) * spec.n_dims] {
            *v *= spec.shrink;
        }
        labels[i] = rng.random_range(0..spec.n_classes);
    }
    let features = FeatureMatrix::new(n, spec.n_dims, data)?;
    Ok(SyntheticData {
        set: LabeledSet::new(features, labels)?,
        corrupted,
    })
}

/// Clean, balanced draw around the same centroids as [`generate_synthetic`]
/// with an independent noise stream.
pub fn generate_test_set(spec: &SyntheticSpec, per_class: usize) -> Result<LabeledSet> {
    spec.validate()?;
    if per_class == 0 {
        return Err(Error::InvalidConfig(
            "test per_class must be positive".into(),
        ));
    }
    let centers = centroids(spec, &mut SeededRng::new(spec.seed));
    let mut rng = SeededRng::new(spec.seed ^ TEST_STREAM_OFFSET);
    let (data, labels) = draw_clean(spec, &centers, per_class, &mut rng);
    let features = FeatureMatrix::new(spec.n_classes * per_class, spec.n_dims, data)?;
    LabeledSet::new(features, labels)
}

// ---------------------------------------------------------------------------
// Nearest-centroid probe

struct Centroids {
    classes: Vec<usize>,
    means: Vec<Vec<f64>>,
}

impl Centroids {
    fn fit<'a>(rows: impl Iterator<Item = (&'a [f64], usize)>) -> Result<Self> {
        let mut sums: BTreeMap<usize, (Vec<f64>, usize)> = BTreeMap::new();
        for (row, label) in rows {
            let entry = sums
                .entry(label)
                .or_insert_with(|| (vec![0.0; row.len()], 0));
            for (s, v) in entry.0.iter_mut().zip(row) {
                *s += v;
            }
            entry.1 += 1;
        }
        if sums.is_empty() {
            return Err(Error::EmptyTrainingSet);
        }
        let (classes, means) = sums
            .into_iter()
            .map(|(k, (sum, count))| (k, sum.into_iter().map(|s| s / count as f64).collect()))
            .unzip();
        Ok(Self { classes, means })
    }

    /// Nearest centroid in L2; ties go to the lowest class index.
    fn predict(&self, x: &[f64]) -> usize {
        let mut best = (f64::INFINITY, usize::MAX);
        for (k, m) in self.classes.iter().zip(&self.means) {
            let dist: f64 = x.iter().zip(m).map(|(a, b)| (a - b) * (a - b)).sum();
            if dist < best.0 {
                best = (dist, *k);
            }
        }
        best.1
    }

    fn accuracy(&self, test: &LabeledSet) -> f64 {
        let hits = test
            .features
            .rows()
            .zip(&test.labels)
            .filter(|(row, &label)| self.predict(row) == label)
            .count();
        hits as f64 / test.len() as f64
    }
}

/// Fits one centroid per class present in the training rows and reports the
/// fraction of test rows whose nearest centroid carries their label. Classes
/// absent from training are never predicted.
pub fn nearest_centroid_accuracy(
    train_features: &FeatureMatrix,
    train_labels: &[usize],
    test_features: &FeatureMatrix,
    test_labels: &[usize],
) -> Result<f64> {
    let train = LabeledSet::new(train_features.clone(), train_labels.to_vec())?;
    let test = LabeledSet::new(test_features.clone(), test_labels.to_vec())?;
    let all: Vec<usize> = (0..train.len()).collect();
    subset_accuracy(&train, &all, &test)
}

/// Nearest-centroid accuracy using only the rows `subset` of `pool` for
/// training.
pub fn subset_accuracy(pool: &LabeledSet, subset: &[usize], test: &LabeledSet) -> Result<f64> {
    if pool.features.n_dims() != test.features.n_dims() {
        return Err(Error::ShapeMismatch(format!(
            "train has {} dims, test has {}",
            pool.features.n_dims(),
            test.features.n_dims()
        )));
    }
    if let Some(&bad) = subset.iter().find(|&&i| i >= pool.len()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            len: pool.len(),
        });
    }
    let model = Centroids::fit(
        subset
            .iter()
            .map(|&i| (pool.features.row(i), pool.labels[i])),
    )?;
    Ok(model.accuracy(test))
}

// ---------------------------------------------------------------------------
// Statistics

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub pearson_r: f64,
}

/// Least-squares line through `(x, y)` points. `r` is reported as 0 when `y`
/// is constant.
pub fn linear_fit(points: &[(f64, f64)]) -> Result<LinearFit> {
    if points.len() < 2 {
        return Err(Error::TooFewRows {
            needed: 2,
            got: points.len(),
        });
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::DegenerateVariance);
    }
    let slope = sxy / sxx;
    let pearson_r = if syy == 0.0 {
        0.0
    } else {
        sxy / (sxx * syy).sqrt()
    };
    Ok(LinearFit {
        slope,
        intercept: my - slope * mx,
        pearson_r,
    })
}

/// Mean and standard error (sample stddev over sqrt(n)); the error is 0 for
/// a single value.
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub subset_size: usize,
    pub n_trials: usize,
    pub seed: u64,
    pub fit: LinearFit,
    /// `(mean L2 norm of the subset, probe accuracy)` per trial.
    pub points: Vec<(f64, f64)>,
}

/// Draws `n_trials` uniform subsets (trial `t` seeded with `seed + t`) and
/// regresses probe accuracy on the subset's mean L2 feature norm.
pub fn correlation_study(
    pool: &LabeledSet,
    test: &LabeledSet,
    subset_size: usize,
    n_trials: usize,
    seed: u64,
) -> Result<CorrelationReport> {
    if n_trials < 10 {
        return Err(Error::InvalidConfig(format!(
            "correlation study needs at least 10 trials, got {n_trials}"
        )));
    }
    let norms = compute_norms(&pool.features, NormType::L2);
    let mut points = Vec::with_capacity(n_trials);
    for t in 0..n_trials {
        let config = SelectionConfig::new(Strategy::Uniform, subset_size)
            .with_seed(seed.wrapping_add(t as u64));
        let picked = select(&pool.features, &config, None)?.indices;
        let mean_norm = picked.iter().map(|&i| norms[i]).sum::<f64>() / picked.len() as f64;
        points.push((mean_norm, subset_accuracy(pool, &picked, test)?));
    }
    Ok(CorrelationReport {
        subset_size,
        n_trials,
        seed,
        fit: linear_fit(&points)?,
        points,
    })
}

// ---------------------------------------------------------------------------
// Histograms

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// `n_bins + 1` edges from the minimum to the maximum value.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    /// Equal-width bins over `[min, max]`; the last bin is closed on the
    /// right. When all values are equal they land in the last bin.
    pub fn from_values(values: &[f64], n_bins: usize) -> Result<Self> {
        if n_bins == 0 {
            return Err(Error::InvalidConfig("need at least one bin".into()));
        }
        if values.is_empty() {
            return Err(Error::TooFewRows { needed: 1, got: 0 });
        }
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let width = (max - min) / n_bins as f64;
        let mut edges: Vec<f64> = (0..n_bins).map(|i| min + i as f64 * width).collect();
        edges.push(max);
        let mut counts = vec![0; n_bins];
        for &v in values {
            let bin = if width > 0.0 {
                (((v - min) / width).floor() as usize).min(n_bins - 1)
            } else {
                n_bins - 1
            };
            counts[bin] += 1;
        }
        Ok(Self { edges, counts })
    }

    /// Two columns: left bin edge and count, with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_left_edge,count\n");
        for (edge, count) in self.edges.iter().zip(&self.counts) {
            out.push_str(&format!("{edge:?},{count}\n"));
        }
        out
    }
}

pub fn norm_histogram(
    features: &FeatureMatrix,
    norm: NormType,
    n_bins: usize,
) -> Result<Histogram> {
    Histogram::from_values(&compute_norms(features, norm), n_bins)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormSummary {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub median: f64,
}

impl NormSummary {
    pub fn from_values(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::TooFewRows { needed: 1, got: 0 });
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let median = if n % 2 == 1 {
            sorted[n / 2]
        } else {
            0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
        };
        Ok(Self {
            min: sorted[0],
            max: sorted[n - 1],
            mean: values.iter().sum::<f64>() / n as f64,
            median,
        })
    }
}

// ---------------------------------------------------------------------------
// Fréchet proxy

/// First and second moment sums of a set of rows, so that the moments of a
/// remainder can be obtained by subtraction.
#[derive(Clone, Debug)]
struct MomentSums {
    count: usize,
    sum: DVector<f64>,
    outer: DMatrix<f64>,
}

impl MomentSums {
    fn zeros(d: usize) -> Self {
        Self {
            count: 0,
            sum: DVector::zeros(d),
            outer: DMatrix::zeros(d, d),
        }
    }

    fn add_row(&mut self, row: &[f64]) {
        let d = row.len();
        self.count += 1;
        for a in 0..d {
            self.sum[a] += row[a];
            for b in 0..d {
                self.outer[(a, b)] += row[a] * row[b];
            }
        }
    }

    fn of<'a>(d: usize, rows: impl Iterator<Item = &'a [f64]>) -> Self {
        let mut m = Self::zeros(d);
        rows.for_each(|r| m.add_row(r));
        m
    }

    fn minus(&self, other: &Self) -> Self {
        Self {
            count: self.count - other.count,
            sum: &self.sum - &other.sum,
            outer: &self.outer - &other.outer,
        }
    }

    /// Mean and unbiased covariance.
    fn gaussian(&self) -> (DVector<f64>, DMatrix<f64>) {
        let n = self.count as f64;
        let mean = &self.sum / n;
        let cov = (&self.outer - &mean * mean.transpose() * n) / (n - 1.0);
        (mean, cov)
    }
}

fn psd_sqrt(m: &DMatrix<f64>) -> DMatrix<f64> {
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let root = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
    &eig.eigenvectors * DMatrix::from_diagonal(&root) * eig.eigenvectors.transpose()
}

fn frechet_from_moments(a: &MomentSums, b: &MomentSums) -> f64 {
    let d = a.sum.len();
    let ridge = DMatrix::identity(d, d) * FRECHET_RIDGE;
    let (mu1, cov1) = a.gaussian();
    let (mu2, cov2) = b.gaussian();
    let cov1 = cov1 + &ridge;
    let cov2 = cov2 + &ridge;

    // tr((S1 S2)^1/2) = tr((S1^1/2 S2 S1^1/2)^1/2), the latter symmetric PSD
    let root1 = psd_sqrt(&cov1);
    let inner = &root1 * &cov2 * &root1;
    let inner = (&inner + inner.transpose()) * 0.5;
    let tr_sqrt: f64 = SymmetricEigen::new(inner)
        .eigenvalues
        .iter()
        .map(|l| l.max(0.0).sqrt())
        .sum();

    let diff = &mu1 - &mu2;
    let score = diff.dot(&diff) + cov1.trace() + cov2.trace() - 2.0 * tr_sqrt;
    score.max(0.0)
}

fn check_rows(rows: usize, d: usize) -> Result<()> {
    if rows < d + 1 {
        return Err(Error::TooFewRows {
            needed: d + 1,
            got: rows,
        });
    }
    Ok(())
}

/// Fréchet distance between Gaussian fits of two row sets:
/// `|mu1 - mu2|^2 + tr(S1 + S2 - 2 (S1 S2)^1/2)`, with `1e-6 I` added to
/// each covariance. Each set needs at least `d + 1` rows.
pub fn frechet_proxy(subset: &FeatureMatrix, remainder: &FeatureMatrix) -> Result<f64> {
    let d = subset.n_dims();
    if remainder.n_dims() != d {
        return Err(Error::ShapeMismatch(format!(
            "sets have {} and {} dims",
            d,
            remainder.n_dims()
        )));
    }
    check_rows(subset.n_examples(), d)?;
    check_rows(remainder.n_examples(), d)?;
    Ok(frechet_from_moments(
        &MomentSums::of(d, subset.rows()),
        &MomentSums::of(d, remainder.rows()),
    ))
}

// ---------------------------------------------------------------------------
// Strategy comparison

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyStats {
    pub strategy: Strategy,
    pub budget: usize,
    pub mean_accuracy: f64,
    pub stderr: f64,
    pub mean_subset_norm: f64,
    /// Mean Fréchet proxy between subset and remainder; absent when the
    /// budget is below `d + 1`.
    pub frechet: Option<f64>,
    pub accuracies: Vec<f64>,
}

impl StrategyStats {
    /// `sqrt(se_a^2 + se_b^2)`.
    pub fn pooled_stderr(&self, other: &StrategyStats) -> f64 {
        self.stderr.hypot(other.stderr)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub n_trials: usize,
    pub seed: u64,
    pub norm: NormType,
    pub budgets: Vec<usize>,
    pub results: Vec<StrategyStats>,
}

impl ComparisonReport {
    pub fn get(&self, strategy: Strategy, budget: usize) -> Option<&StrategyStats> {
        self.results
            .iter()
            .find(|r| r.strategy == strategy && r.budget == budget)
    }
}

/// Runs every strategy at every budget for `n_trials` trials on a fixed
/// pool. Trial `t` uses selection seed `seed + t`, shared across strategies.
/// Norm-filter is not accepted since it needs an external candidate ordering.
pub fn compare_strategies(
    pool: &LabeledSet,
    test: &LabeledSet,
    strategies: &[Strategy],
    budgets: &[usize],
    n_trials: usize,
    seed: u64,
    norm: NormType,
) -> Result<ComparisonReport> {
    compare_with(strategies, budgets, n_trials, seed, norm, |_| {
        Ok((pool.clone(), test.clone()))
    })
}

/// Like [`compare_strategies`], but trial `t` also draws a fresh mixture
/// (pool and clean test set) from `spec` with seed `spec.seed + t`, so the
/// deterministic strategies get a spread over datasets as well.
pub fn compare_on_synthetic(
    spec: &SyntheticSpec,
    test_per_class: usize,
    strategies: &[Strategy],
    budgets: &[usize],
    n_trials: usize,
    seed: u64,
    norm: NormType,
) -> Result<ComparisonReport> {
    compare_with(strategies, budgets, n_trials, seed, norm, |t| {
        let trial_spec = SyntheticSpec {
            seed: spec.seed.wrapping_add(t as u64),
            ..spec.clone()
        };
        Ok((
            generate_synthetic(&trial_spec)?.set,
            generate_test_set(&trial_spec, test_per_class)?,
        ))
    })
}

#[derive(Default)]
struct Accumulator {
    accuracies: Vec<f64>,
    norm_sum: f64,
    frechet_sum: f64,
}

fn compare_with(
    strategies: &[Strategy],
    budgets: &[usize],
    n_trials: usize,
    seed: u64,
    norm: NormType,
    mut trial_data: impl FnMut(usize) -> Result<(LabeledSet, LabeledSet)>,
) -> Result<ComparisonReport> {
    if n_trials == 0 {
        return Err(Error::InvalidConfig("need at least one trial".into()));
    }
    if strategies.contains(&Strategy::NormFilter) {
        return Err(Error::InvalidConfig(
            "norm-filter needs candidates and cannot be compared here".into(),
        ));
    }
    let cells: Vec<(usize, Strategy)> = budgets
        .iter()
        .flat_map(|&b| strategies.iter().map(move |&s| (b, s)))
        .collect();
    let mut acc: Vec<Accumulator> = cells.iter().map(|_| Accumulator::default()).collect();
    let mut with_frechet = vec![false; cells.len()];

    // trials in ascending order so the aggregate never depends on scheduling
    for t in 0..n_trials {
        let (pool, test) = trial_data(t)?;
        let d = pool.features.n_dims();
        let l2 = compute_norms(&pool.features, NormType::L2);
        let full = MomentSums::of(d, pool.features.rows());
        for (k, &(budget, strategy)) in cells.iter().enumerate() {
            let config = SelectionConfig::new(strategy, budget)
                .with_norm(norm)
                .with_seed(seed.wrapping_add(t as u64));
            let picked = select(&pool.features, &config, None)?.indices;
            let cell = &mut acc[k];
            cell.accuracies
                .push(subset_accuracy(&pool, &picked, &test)?);
            cell.norm_sum += picked.iter().map(|&i| l2[i]).sum::<f64>() / budget as f64;
            with_frechet[k] = budget > d && pool.len() - budget > d;
            if with_frechet[k] {
                let sub = MomentSums::of(d, picked.iter().map(|&i| pool.features.row(i)));
                cell.frechet_sum += frechet_from_moments(&sub, &full.minus(&sub));
            }
        }
    }

    let results = cells
        .into_iter()
        .zip(acc)
        .zip(with_frechet)
        .map(|(((budget, strategy), cell), frechet)| {
            let (mean_accuracy, stderr) = mean_stderr(&cell.accuracies);
            StrategyStats {
                strategy,
                budget,
                mean_accuracy,
                stderr,
                mean_subset_norm: cell.norm_sum / n_trials as f64,
                frechet: frechet.then(|| cell.frechet_sum / n_trials as f64),
                accuracies: cell.accuracies,
            }
        })
        .collect();
    Ok(ComparisonReport {
        n_trials,
        seed,
        norm,
        budgets: budgets.to_vec(),
        results,
    })
}

pub const EVAL_SCHEMA_VERSION: u32 = 1;

/// Everything an `eval` run produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub seed: u64,
    pub synthetic: Option<SyntheticSpec>,
    pub comparison: Option<ComparisonReport>,
    pub correlation: Option<CorrelationReport>,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line_fit() {
        let pts: Vec<_> = (0..10).map(|i| (i as f64, 2.0 * i as f64 + 1.0)).collect();
        let fit = linear_fit(&pts).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.intercept - 1.0).abs() < 1e-12);
        assert!((fit.pearson_r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_accuracy_fit() {
        let pts: Vec<_> = (0..10).map(|i| (i as f64, 0.7)).collect();
        let fit = linear_fit(&pts).unwrap();
        assert_eq!(fit.slope, 0.0);
        assert_eq!(fit.pearson_r, 0.0);
    }

    #[test]
    fn identical_x_is_degenerate() {
        let pts = vec![(1.0, 0.1), (1.0, 0.5), (1.0, 0.9)];
        assert!(matches!(linear_fit(&pts), Err(Error::DegenerateVariance)));
        assert!(matches!(
            linear_fit(&pts[..1]),
            Err(Error::TooFewRows { .. })
        ));
    }

    #[test]
    fn histogram_arithmetic() {
        let h = Histogram::from_values(&[0.0, 1.0, 2.0, 3.0], 2).unwrap();
        assert_eq!(h.edges, vec![0.0, 1.5, 3.0]);
        assert_eq!(h.counts, vec![2, 2]);
        assert_eq!(h.to_csv(), "bin_left_edge,count\n0.0,2\n1.5,2\n");
    }

    #[test]
    fn histogram_of_equal_values() {
        let h = Histogram::from_values(&[2.5; 7], 4).unwrap();
        assert_eq!(h.counts.iter().filter(|&&c| c > 0).count(), 1);
        assert_eq!(h.counts.iter().sum::<usize>(), 7);
        assert!(Histogram::from_values(&[1.0], 0).is_err());
    }

    #[test]
    fn summary_stats() {
        let s = NormSummary::from_values(&[3.0, 1.0, 2.0, 10.0]).unwrap();
        assert_eq!((s.min, s.max, s.mean, s.median), (1.0, 10.0, 4.0, 2.5));
        let s = NormSummary::from_values(&[5.0, 1.0, 3.0]).unwrap();
        assert_eq!(s.median, 3.0);
    }

    #[test]
    fn two_point_probe() {
        let train = FeatureMatrix::from_rows(&[[1.0, 0.0], [-1.0, 0.0]]).unwrap();
        let acc = nearest_centroid_accuracy(&train, &[0, 1], &train, &[0, 1]).unwrap();
        assert_eq!(acc, 1.0);
    }

    #[test]
    fn single_class_training_gives_one_over_c() {
        let pool = LabeledSet::new(
            FeatureMatrix::from_rows(&[[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]]).unwrap(),
            vec![0, 1, 2],
        )
        .unwrap();
        let test = pool.clone();
        let acc = subset_accuracy(&pool, &[1], &test).unwrap();
        assert!((acc - 1.0 / 3.0).abs() < 1e-15);
        assert!(matches!(
            subset_accuracy(&pool, &[], &test),
            Err(Error::EmptyTrainingSet)
        ));
    }

    #[test]
    fn probe_ties_go_to_lowest_class() {
        let pool = LabeledSet::new(
            FeatureMatrix::from_rows(&[[1.0], [-1.0]]).unwrap(),
            vec![3, 1],
        )
        .unwrap();
        let test = LabeledSet::new(FeatureMatrix::from_rows(&[[0.0]]).unwrap(), vec![1]).unwrap();
        assert_eq!(subset_accuracy(&pool, &[0, 1], &test).unwrap(), 1.0);
    }

    #[test]
    fn frechet_requires_enough_rows() {
        let a = FeatureMatrix::new(2, 2, vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        let b = FeatureMatrix::new(3, 2, vec![0.0, 1.0, 2.0, 3.0, 1.0, 1.0]).unwrap();
        assert!(matches!(
            frechet_proxy(&a, &b),
            Err(Error::TooFewRows { needed: 3, got: 2 })
        ));
    }

    #[test]
    fn synthetic_spec_validation() {
        let mut spec = SyntheticSpec::default();
        assert!(spec.validate().is_ok());
        spec.n_classes = 1;
        assert!(spec.validate().is_err());
        let spec = SyntheticSpec {
            shrink: 1.0,
            ..SyntheticSpec::default()
        };
        assert!(spec.validate().is_err());
        let spec = SyntheticSpec {
            corrupted_fraction: 1.0,
            ..SyntheticSpec::default()
        };
        assert!(spec.validate().is_err());
    }

    #[test]
    fn corrupted_count_is_exact() {
        let spec = SyntheticSpec {
            per_class: 50,
            ..SyntheticSpec::default()
        };
        let data = generate_synthetic(&spec).unwrap();
        assert_eq!(data.corrupted.iter().filter(|&&c| c).count(), 150);
        assert!(data.set.labels.iter().all(|&l| l < 10));
    }

    #[test]
    fn moments_subtraction_matches_direct() {
        let m = FeatureMatrix::new(6, 2, (0..12).map(|i| (i * i) as f64 * 0.1).collect()).unwrap();
        let full = MomentSums::of(2, m.rows());
        let head = MomentSums::of(2, m.rows().take(2));
        let tail = MomentSums::of(2, m.rows().skip(2));
        let diff = full.minus(&head);
        assert_eq!(diff.count, tail.count);
        assert!((diff.outer - tail.outer).abs().max() < 1e-12);
    }
}
