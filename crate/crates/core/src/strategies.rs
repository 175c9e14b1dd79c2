//! Selection strategies.
//!
//! All strategies pick examples one at a time without replacement. The
//! randomized ones consume exactly one uniform draw per pick, which makes the
//! realized selection invariant under positive rescaling of the features for
//! a fixed seed. The argmax ablations consume no randomness at all.
//!
//! | strategy      | weight of example `j`                         | pick rule |
//! |---------------|-----------------------------------------------|-----------|
//! | `uniform`     | 1                                             | sample    |
//! | `norm`        | `||F_j||`                                     | sample    |
//! | `gs`          | `||F~_j||` (0 once the residual is exhausted) | sample    |
//! | `max-norm`    | `||F_j||`                                     | argmax    |
//! | `gs-argmax`   | `||F~_j||`                                    | argmax    |
//! | `norm-filter` | `||F_j||` restricted to a candidate prefix    | sample    |

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{compute_norms, FeatureMatrix, NormType, ResidualState};
use crate::sampling::{normalize, sample_index, SeededRng, WeightVector};

pub const DEFAULT_EPSILON_REL: f64 = 1e-9;
pub const DEFAULT_CANDIDATE_MULTIPLIER: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Strategy {
    #[serde(rename = "uniform")]
    Uniform,
    #[serde(rename = "norm")]
    NormWeighted,
    #[serde(rename = "gs")]
    GramSchmidt,
    #[serde(rename = "max-norm")]
    MaxNorm,
    #[serde(rename = "gs-argmax")]
    GramSchmidtArgmax,
    #[serde(rename = "norm-filter")]
    NormFilter,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::Uniform,
        Strategy::NormWeighted,
        Strategy::GramSchmidt,
        Strategy::MaxNorm,
        Strategy::GramSchmidtArgmax,
        Strategy::NormFilter,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Uniform => "uniform",
            Strategy::NormWeighted => "norm",
            Strategy::GramSchmidt => "gs",
            Strategy::MaxNorm => "max-norm",
            Strategy::GramSchmidtArgmax => "gs-argmax",
            Strategy::NormFilter => "norm-filter",
        }
    }

    /// Whether the strategy draws from the RNG.
    pub fn is_randomized(self) -> bool {
        !matches!(self, Strategy::MaxNorm | Strategy::GramSchmidtArgmax)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.as_str() == s)
            .ok_or_else(|| Error::ParseError(format!("unknown strategy '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionConfig {
    pub strategy: Strategy,
    pub budget: usize,
    pub norm: NormType,
    pub seed: u64,
    pub epsilon_rel: f64,
    pub candidate_multiplier: usize,
}

impl SelectionConfig {
    pub fn new(strategy: Strategy, budget: usize) -> Self {
        Self {
            strategy,
            budget,
            norm: NormType::L2,
            seed: 0,
            epsilon_rel: DEFAULT_EPSILON_REL,
            candidate_multiplier: DEFAULT_CANDIDATE_MULTIPLIER,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_norm(mut self, norm: NormType) -> Self {
        self.norm = norm;
        self
    }

    pub fn with_epsilon_rel(mut self, epsilon_rel: f64) -> Self {
        self.epsilon_rel = epsilon_rel;
        self
    }

    pub fn with_candidate_multiplier(mut self, m: usize) -> Self {
        self.candidate_multiplier = m;
        self
    }

    /// Checks the configuration against a population of `n` examples.
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::InvalidConfig("budget must be at least 1".into()));
        }
        if self.candidate_multiplier == 0 {
            return Err(Error::InvalidConfig(
                "candidate multiplier must be at least 1".into(),
            ));
        }
        if !(self.epsilon_rel > 0.0 && self.epsilon_rel < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "epsilon_rel must lie in (0, 1), got {}",
                self.epsilon_rel
            )));
        }
        if self.budget > n {
            return Err(Error::BudgetExceedsPopulation {
                budget: self.budget,
                population: n,
            });
        }
        Ok(())
    }
}

/// Diagnostics recorded at the moment an example was picked.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepDiagnostic {
    /// Weight of the picked example under the configured norm: the feature
    /// norm, or the residual norm for the Gram-Schmidt strategies.
    pub norm: f64,
    /// Probability the pick had when it was made (1 for argmax picks).
    pub probability: f64,
    /// Set when no remaining example carried any weight.
    pub fallback: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SelectionResult {
    pub config: SelectionConfig,
    pub indices: Vec<usize>,
    pub steps: Vec<StepDiagnostic>,
}

/// Ranked output of an external selector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateOrdering {
    ranked: Vec<usize>,
}

impl CandidateOrdering {
    /// Validates that indices are unique and below `n_examples`.
    pub fn new(ranked: Vec<usize>, n_examples: usize) -> Result<Self> {
        let mut seen = HashSet::with_capacity(ranked.len());
        for &i in &ranked {
            if i >= n_examples {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    len: n_examples,
                });
            }
            if !seen.insert(i) {
                return Err(Error::DuplicateIndex(i));
            }
        }
        Ok(Self { ranked })
    }

    pub fn ranked(&self) -> &[usize] {
        &self.ranked
    }

    pub fn len(&self) -> usize {
        self.ranked.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranked.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum PickRule {
    Sample,
    Argmax,
}

struct Pick {
    index: usize,
    probability: f64,
    fallback: bool,
}

/// Picks one active position. Falls back to a uniform draw when every active
/// weight is zero (argmax then takes the lowest active position).
fn pick(weights: &[f64], active: &[bool], rule: PickRule, rng: &mut SeededRng) -> Result<Pick> {
    let any_weight = weights.iter().zip(active).any(|(&w, &a)| a && w > 0.0);
    match rule {
        PickRule::Sample => {
            let probs = normalize(&WeightVector::new(weights.to_vec(), active.to_vec())?)?;
            let index = sample_index(&probs, rng);
            Ok(Pick {
                index,
                probability: probs[index],
                fallback: !any_weight,
            })
        }
        PickRule::Argmax => {
            let mut best: Option<usize> = None;
            for (i, (&w, &a)) in weights.iter().zip(active).enumerate() {
                if a && best.is_none_or(|b| w > weights[b]) {
                    best = Some(i);
                }
            }
            let index = best.ok_or(Error::NoActiveEntries)?;
            Ok(Pick {
                index,
                probability: 1.0,
                fallback: !any_weight,
            })
        }
    }
}

/// Sequential picks without replacement from fixed weights.
fn select_by_fixed_weights(
    weights: &[f64],
    budget: usize,
    rule: PickRule,
    rng: &mut SeededRng,
) -> Result<(Vec<usize>, Vec<StepDiagnostic>)> {
    let mut active = vec![true; weights.len()];
    let mut indices = Vec::with_capacity(budget);
    let mut steps = Vec::with_capacity(budget);
    for _ in 0..budget {
        let p = pick(weights, &active, rule, rng)?;
        active[p.index] = false;
        indices.push(p.index);
        steps.push(StepDiagnostic {
            norm: weights[p.index],
            probability: p.probability,
            fallback: p.fallback,
        });
    }
    Ok((indices, steps))
}

fn finish(
    config: &SelectionConfig,
    (indices, steps): (Vec<usize>, Vec<StepDiagnostic>),
) -> SelectionResult {
    SelectionResult {
        config: config.clone(),
        indices,
        steps,
    }
}

fn expect_strategy(config: &SelectionConfig, allowed: &[Strategy]) -> Result<()> {
    if allowed.contains(&config.strategy) {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "strategy '{}' is not handled here",
            config.strategy
        )))
    }
}

/// `budget` distinct indices drawn uniformly without replacement.
pub fn select_uniform(
    features: &FeatureMatrix,
    config: &SelectionConfig,
) -> Result<SelectionResult> {
    config.validate(features.n_examples())?;
    let mut rng = SeededRng::new(config.seed);
    let norms = compute_norms(features, config.norm);
    let mut active = vec![true; features.n_examples()];
    let ones = vec![1.0; features.n_examples()];
    let mut indices = Vec::with_capacity(config.budget);
    let mut steps = Vec::with_capacity(config.budget);
    for _ in 0..config.budget {
        let p = pick(&ones, &active, PickRule::Sample, &mut rng)?;
        active[p.index] = false;
        indices.push(p.index);
        steps.push(StepDiagnostic {
            norm: norms[p.index],
            probability: p.probability,
            fallback: false,
        });
    }
    Ok(finish(config, (indices, steps)))
}

/// Each pick has probability proportional to its feature norm among the
/// examples not yet picked.
pub fn select_norm_weighted(
    features: &FeatureMatrix,
    config: &SelectionConfig,
) -> Result<SelectionResult> {
    config.validate(features.n_examples())?;
    let mut rng = SeededRng::new(config.seed);
    let norms = compute_norms(features, config.norm);
    let picks = select_by_fixed_weights(&norms, config.budget, PickRule::Sample, &mut rng)?;
    Ok(finish(config, picks))
}

/// Randomized Gram-Schmidt selection.
///
/// Each step samples an unselected, non-exhausted example with probability
/// proportional to the norm of its current residual, then projects the
/// picked residual out of all remaining residuals. The configured norm only
/// sets the sampling weight; the projection is always Euclidean. Once every
/// remaining residual is exhausted the rest of the budget is filled
/// uniformly.
pub fn select_gram_schmidt(
    features: &FeatureMatrix,
    config: &SelectionConfig,
) -> Result<SelectionResult> {
    config.validate(features.n_examples())?;
    gram_schmidt(features, config, PickRule::Sample)
}

/// Deterministic ablations: `MaxNorm` and `GramSchmidtArgmax` replace the
/// weighted draw with an argmax (ties to the lowest index).
pub fn select_argmax_variant(
    features: &FeatureMatrix,
    config: &SelectionConfig,
) -> Result<SelectionResult> {
    expect_strategy(config, &[Strategy::MaxNorm, Strategy::GramSchmidtArgmax])?;
    config.validate(features.n_examples())?;
    match config.strategy {
        Strategy::MaxNorm => {
            let mut rng = SeededRng::new(config.seed);
            let norms = compute_norms(features, config.norm);
            let picks = select_by_fixed_weights(&norms, config.budget, PickRule::Argmax, &mut rng)?;
            Ok(finish(config, picks))
        }
        _ => gram_schmidt(features, config, PickRule::Argmax),
    }
}

fn gram_schmidt(
    features: &FeatureMatrix,
    config: &SelectionConfig,
    rule: PickRule,
) -> Result<SelectionResult> {
    let n = features.n_examples();
    let mut rng = SeededRng::new(config.seed);
    let mut state = ResidualState::new(features, config.epsilon_rel);
    let mut selected = vec![false; n];
    let mut weights = vec![0.0; n];
    let mut active = vec![false; n];
    let mut indices = Vec::with_capacity(config.budget);
    let mut steps = Vec::with_capacity(config.budget);

    for _ in 0..config.budget {
        for j in 0..n {
            active[j] = !selected[j] && !state.is_exhausted(j);
            weights[j] = if !active[j] {
                0.0
            } else if config.norm == NormType::L2 {
                state.residual_norm(j)
            } else {
                config.norm.of(state.residual(j))
            };
        }

        // Once the span is exhausted every remaining weight is zero: the
        // sampled variant draws uniformly, the argmax variant takes the
        // lowest remaining index.
        let spanned = !active.iter().any(|&a| a);
        let p = if spanned {
            for j in 0..n {
                active[j] = !selected[j];
            }
            let ones = vec![1.0; n];
            let p = pick(&ones, &active, rule, &mut rng)?;
            Pick {
                fallback: true,
                ..p
            }
        } else {
            pick(&weights, &active, rule, &mut rng)?
        };

        let i = p.index;
        steps.push(StepDiagnostic {
            norm: config.norm.of(state.residual(i)),
            probability: p.probability,
            fallback: p.fallback,
        });
        selected[i] = true;
        indices.push(i);
        if !spanned {
            state.project_out(i)?;
        }
    }
    Ok(finish(config, (indices, steps)))
}

/// Keeps the first `m * budget` candidates and samples `budget` of them
/// sequentially with probability proportional to feature norm.
pub fn norm_filter(
    features: &FeatureMatrix,
    candidates: &CandidateOrdering,
    config: &SelectionConfig,
) -> Result<SelectionResult> {
    expect_strategy(config, &[Strategy::NormFilter])?;
    config.validate(features.n_examples())?;
    let needed = config.candidate_multiplier * config.budget;
    if candidates.len() < needed {
        return Err(Error::InsufficientCandidates {
            needed,
            available: candidates.len(),
        });
    }
    let pool = &candidates.ranked()[..needed];
    if let Some(&bad) = pool.iter().find(|&&i| i >= features.n_examples()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            len: features.n_examples(),
        });
    }
    let norms: Vec<f64> = pool
        .iter()
        .map(|&i| config.norm.of(features.row(i)))
        .collect();
    let mut rng = SeededRng::new(config.seed);
    let (positions, steps) =
        select_by_fixed_weights(&norms, config.budget, PickRule::Sample, &mut rng)?;
    let indices = positions.into_iter().map(|p| pool[p]).collect();
    Ok(finish(config, (indices, steps)))
}

/// Dispatches on `config.strategy`. `candidates` is required for
/// `NormFilter` and ignored otherwise.
pub fn select(
    features: &FeatureMatrix,
    config: &SelectionConfig,
    candidates: Option<&CandidateOrdering>,
) -> Result<SelectionResult> {
    match config.strategy {
        Strategy::Uniform => select_uniform(features, config),
        Strategy::NormWeighted => select_norm_weighted(features, config),
        Strategy::GramSchmidt => select_gram_schmidt(features, config),
        Strategy::MaxNorm | Strategy::GramSchmidtArgmax => select_argmax_variant(features, config),
        Strategy::NormFilter => {
            let candidates = candidates.ok_or_else(|| {
                Error::InvalidConfig("norm-filter needs a candidate ordering".into())
            })?;
            norm_filter(features, candidates, config)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[f64]]) -> FeatureMatrix {
        FeatureMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn strategy_names_round_trip() {
        for s in Strategy::ALL {
            assert_eq!(s.as_str().parse::<Strategy>().unwrap(), s);
            let json = serde_json::to_string(&s).unwrap();
            assert_eq!(json, format!("\"{}\"", s.as_str()));
        }
        assert!("bogus".parse::<Strategy>().is_err());
    }

    #[test]
    fn config_validation() {
        let f = mat(&[&[1.0], &[2.0]]);
        let c = SelectionConfig::new(Strategy::Uniform, 3);
        assert!(matches!(
            select_uniform(&f, &c),
            Err(Error::BudgetExceedsPopulation {
                budget: 3,
                population: 2
            })
        ));
        let c = SelectionConfig::new(Strategy::Uniform, 0);
        assert!(matches!(c.validate(2), Err(Error::InvalidConfig(_))));
        let c = SelectionConfig::new(Strategy::Uniform, 1).with_epsilon_rel(1.0);
        assert!(c.validate(2).is_err());
        let c = SelectionConfig::new(Strategy::NormFilter, 1).with_candidate_multiplier(0);
        assert!(c.validate(2).is_err());
    }

    #[test]
    fn uniform_full_budget_is_permutation() {
        let f = FeatureMatrix::new(5, 1, vec![1.0; 5]).unwrap();
        let r =
            select_uniform(&f, &SelectionConfig::new(Strategy::Uniform, 5).with_seed(3)).unwrap();
        let mut sorted = r.indices.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 1, 2, 3, 4]);
        assert_eq!(r.steps[0].probability, 0.2);
        assert_eq!(r.steps[4].probability, 1.0);
    }

    #[test]
    fn single_nonzero_norm_wins() {
        let f = mat(&[&[10.0, 0.0], &[0.0, 0.0], &[0.0, 0.0]]);
        for seed in 0..20 {
            let c = SelectionConfig::new(Strategy::NormWeighted, 1).with_seed(seed);
            let r = select_norm_weighted(&f, &c).unwrap();
            assert_eq!(r.indices, vec![0]);
            assert_eq!(r.steps[0].probability, 1.0);
            assert_eq!(r.steps[0].norm, 10.0);
        }
    }

    #[test]
    fn norm_weighted_all_zero_falls_back() {
        let f = FeatureMatrix::new(3, 2, vec![0.0; 6]).unwrap();
        let c = SelectionConfig::new(Strategy::NormWeighted, 3).with_seed(1);
        let r = select_norm_weighted(&f, &c).unwrap();
        assert!(r.steps.iter().all(|s| s.fallback));
        let mut sorted = r.indices.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 1, 2]);
    }

    #[test]
    fn collinear_twin_is_never_second() {
        let f = mat(&[&[1.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        for seed in 0..200 {
            let c = SelectionConfig::new(Strategy::GramSchmidt, 2).with_seed(seed);
            let r = select_gram_schmidt(&f, &c).unwrap();
            if r.indices[0] != 2 {
                assert_eq!(r.indices[1], 2, "seed {seed}: {:?}", r.indices);
            }
        }
    }

    #[test]
    fn max_norm_ties_go_to_lowest_index() {
        let f = mat(&[&[3.0], &[9.0], &[-9.0], &[1.0]]);
        let r = select_argmax_variant(&f, &SelectionConfig::new(Strategy::MaxNorm, 2)).unwrap();
        assert_eq!(r.indices, vec![1, 2]);
        assert!(r.steps.iter().all(|s| s.probability == 1.0));
    }

    #[test]
    fn gs_argmax_hand_example() {
        let f = mat(&[&[1.0, 0.0], &[0.9, 0.1], &[0.0, 1.0]]);
        let c = SelectionConfig::new(Strategy::GramSchmidtArgmax, 2);
        let r = select_argmax_variant(&f, &c).unwrap();
        assert_eq!(r.indices, vec![0, 2]);
        assert!((r.steps[1].norm - 1.0).abs() < 1e-15);
    }

    #[test]
    fn argmax_ignores_seed() {
        let f = mat(&[&[1.0, 2.0], &[3.0, -1.0], &[0.5, 0.5], &[2.0, 2.0]]);
        for strategy in [Strategy::MaxNorm, Strategy::GramSchmidtArgmax] {
            let a = select(&f, &SelectionConfig::new(strategy, 4).with_seed(1), None).unwrap();
            let b = select(&f, &SelectionConfig::new(strategy, 4).with_seed(2), None).unwrap();
            assert_eq!(a.indices, b.indices);
        }
    }

    #[test]
    fn gs_argmax_fills_exhausted_span_by_lowest_index() {
        let f = mat(&[&[1.0, 0.0], &[0.0, 0.5], &[2.0, 0.0], &[0.3, 0.3]]);
        let c = SelectionConfig::new(Strategy::GramSchmidtArgmax, 4);
        let r = select_argmax_variant(&f, &c).unwrap();
        assert_eq!(r.indices, vec![2, 1, 0, 3]);
        assert_eq!(
            r.steps.iter().map(|s| s.fallback).collect::<Vec<_>>(),
            vec![false, false, true, true]
        );
    }

    #[test]
    fn argmax_variant_rejects_other_strategies() {
        let f = mat(&[&[1.0]]);
        let c = SelectionConfig::new(Strategy::Uniform, 1);
        assert!(matches!(
            select_argmax_variant(&f, &c),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn gs_with_one_dimension_falls_back_after_first_pick() {
        let f = mat(&[&[1.0], &[2.0], &[-3.0], &[0.5]]);
        let c = SelectionConfig::new(Strategy::GramSchmidt, 4).with_seed(11);
        let r = select_gram_schmidt(&f, &c).unwrap();
        assert!(!r.steps[0].fallback);
        assert!(r.steps[1..].iter().all(|s| s.fallback));
        assert!(r.steps[1..].iter().all(|s| s.norm < 1e-12));
    }

    #[test]
    fn norm_filter_zero_norm_candidate_is_skipped() {
        let mut rows = vec![vec![1.0, 1.0]; 10];
        rows[4] = vec![0.0, 0.0];
        rows[7] = vec![3.0, 4.0];
        let f = FeatureMatrix::from_rows(&rows).unwrap();
        let cands = CandidateOrdering::new(vec![4, 7, 1, 2], 10).unwrap();
        for seed in 0..50 {
            let c = SelectionConfig::new(Strategy::NormFilter, 1).with_seed(seed);
            let r = norm_filter(&f, &cands, &c).unwrap();
            assert_eq!(r.indices, vec![7]);
        }
    }

    #[test]
    fn norm_filter_errors() {
        let f = FeatureMatrix::new(10, 1, vec![1.0; 10]).unwrap();
        let cands = CandidateOrdering::new(vec![1, 2, 3], 10).unwrap();
        let c = SelectionConfig::new(Strategy::NormFilter, 2);
        assert!(matches!(
            norm_filter(&f, &cands, &c),
            Err(Error::InsufficientCandidates {
                needed: 4,
                available: 3
            })
        ));
        assert!(matches!(select(&f, &c, None), Err(Error::InvalidConfig(_))));
        let small = FeatureMatrix::new(2, 1, vec![1.0; 2]).unwrap();
        let c = SelectionConfig::new(Strategy::NormFilter, 1);
        assert!(matches!(
            norm_filter(&small, &cands, &c),
            Err(Error::IndexOutOfRange { index: 2, len: 2 })
        ));
    }

    #[test]
    fn candidate_ordering_validation() {
        assert!(matches!(
            CandidateOrdering::new(vec![3, 3], 10),
            Err(Error::DuplicateIndex(3))
        ));
        assert!(matches!(
            CandidateOrdering::new(vec![10], 10),
            Err(Error::IndexOutOfRange { index: 10, len: 10 })
        ));
        assert_eq!(
            CandidateOrdering::new(vec![3, 0, 7], 10).unwrap().ranked(),
            &[3, 0, 7]
        );
    }
}
