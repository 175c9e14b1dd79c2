//! Draw a budget with probability proportional to feature norm and show how
//! often large-norm examples are picked compared with uniform sampling.

use subset_select::{select, FeatureMatrix, SelectionConfig, Strategy};

fn main() -> subset_select::Result<()> {
    // ten examples whose norms grow linearly
    let rows: Vec<[f64; 2]> = (1..=10).map(|k| [k as f64, 0.0]).collect();
    let features = FeatureMatrix::from_rows(&rows)?;

    let runs = 20_000;
    for strategy in [Strategy::Uniform, Strategy::NormWeighted] {
        let mut hits = [0usize; 10];
        for seed in 0..runs {
            let config = SelectionConfig::new(strategy, 3).with_seed(seed);
            for i in select(&features, &config, None)?.indices {
                hits[i] += 1;
            }
        }
        let freq: Vec<String> = hits
            .iter()
            .map(|&h| format!("{:.2}", h as f64 / runs as f64))
            .collect();
        println!(
            "{:<8} inclusion by norm 1..10: {}",
            strategy.as_str(),
            freq.join(" ")
        );
    }

    let one = select(
        &features,
        &SelectionConfig::new(Strategy::NormWeighted, 3).with_seed(42),
        None,
    )?;
    for (i, step) in one.indices.iter().zip(&one.steps) {
        println!(
            "picked {i} (norm {:.1}, probability {:.3})",
            step.norm, step.probability
        );
    }
    Ok(())
}
