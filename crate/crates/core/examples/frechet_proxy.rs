//! Fréchet distance between Gaussian fits of a selected subset and the rest
//! of the pool, for a few strategies.

use subset_select::eval::{frechet_proxy, generate_synthetic, SyntheticSpec};
use subset_select::{select, SelectionConfig, Strategy};

fn main() -> subset_select::Result<()> {
    let pool = generate_synthetic(&SyntheticSpec {
        seed: 2,
        ..SyntheticSpec::default()
    })?
    .set;
    let features = &pool.features;
    for strategy in [
        Strategy::Uniform,
        Strategy::NormWeighted,
        Strategy::GramSchmidt,
        Strategy::MaxNorm,
    ] {
        let picked = select(
            features,
            &SelectionConfig::new(strategy, 200).with_seed(7),
            None,
        )?
        .indices;
        let mut in_subset = vec![false; pool.len()];
        picked.iter().for_each(|&i| in_subset[i] = true);
        let rest: Vec<usize> = (0..pool.len()).filter(|&i| !in_subset[i]).collect();
        let score = frechet_proxy(
            &features.select_rows(&picked)?,
            &features.select_rows(&rest)?,
        )?;
        println!("{:<9} frechet to remainder: {score:.3}", strategy.as_str());
    }
    Ok(())
}
