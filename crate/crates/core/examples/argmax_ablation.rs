//! The deterministic ablations pick the largest (residual) norm every step,
//! so the seed has no effect on them.

use subset_select::{select, FeatureMatrix, SelectionConfig, Strategy};

fn main() -> subset_select::Result<()> {
    let features =
        FeatureMatrix::from_rows(&[[3.0, 0.0], [2.9, 0.1], [0.0, 1.0], [0.5, 0.5], [3.0, 0.0]])?;
    for strategy in [Strategy::MaxNorm, Strategy::GramSchmidtArgmax] {
        for seed in [1, 2] {
            let config = SelectionConfig::new(strategy, 3).with_seed(seed);
            let picked = select(&features, &config, None)?.indices;
            println!("{:<9} seed {seed}: {picked:?}", strategy.as_str());
        }
    }
    Ok(())
}
