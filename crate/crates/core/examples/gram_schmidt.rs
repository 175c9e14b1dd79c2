//! Gram-Schmidt selection on data with heavy near-duplicates: once one copy
//! is picked, its twins lose their weight and the budget spreads out.

use rand_distr::{Distribution, Normal};
use subset_select::{select, FeatureMatrix, SeededRng, SelectionConfig, Strategy};

fn main() -> subset_select::Result<()> {
    // three directions, 40 noisy copies of each
    let mut rng = SeededRng::new(3);
    let jitter = Normal::new(0.0, 0.01).unwrap();
    let anchors = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let mut data = Vec::new();
    for anchor in &anchors {
        for _ in 0..40 {
            data.extend(anchor.iter().map(|a| a + jitter.sample(&mut rng)));
        }
    }
    let features = FeatureMatrix::new(120, 3, data)?;

    for strategy in [Strategy::NormWeighted, Strategy::GramSchmidt] {
        let result = select(
            &features,
            &SelectionConfig::new(strategy, 3).with_seed(11),
            None,
        )?;
        let groups: Vec<usize> = result.indices.iter().map(|i| i / 40).collect();
        println!(
            "{:<5} picks {:?} from groups {:?}",
            strategy.as_str(),
            result.indices,
            groups
        );
    }

    // asking for more than the rank triggers the uniform fill
    let result = select(
        &features,
        &SelectionConfig::new(Strategy::GramSchmidt, 5).with_seed(11),
        None,
    )?;
    for (i, step) in result.indices.iter().zip(&result.steps) {
        println!(
            "pick {i:>3}: residual norm {:.4}, fallback {}",
            step.norm, step.fallback
        );
    }
    Ok(())
}
