//! Compare strategies on a corrupted Gaussian mixture with a nearest-centroid
//! probe. Each trial draws a fresh mixture.

use subset_select::eval::{compare_on_synthetic, SyntheticSpec};
use subset_select::{NormType, Strategy};

fn main() -> subset_select::Result<()> {
    let spec = SyntheticSpec {
        seed: 1,
        ..SyntheticSpec::default()
    };
    let strategies = [
        Strategy::Uniform,
        Strategy::NormWeighted,
        Strategy::GramSchmidt,
        Strategy::MaxNorm,
        Strategy::GramSchmidtArgmax,
    ];
    let report = compare_on_synthetic(&spec, 100, &strategies, &[10, 20, 40], 20, 1, NormType::L2)?;
    println!(
        "{:<10} {:>6} {:>9} {:>8} {:>10}",
        "strategy", "budget", "accuracy", "stderr", "mean norm"
    );
    for r in &report.results {
        println!(
            "{:<10} {:>6} {:>9.4} {:>8.4} {:>10.3}",
            r.strategy.as_str(),
            r.budget,
            r.mean_accuracy,
            r.stderr,
            r.mean_subset_norm
        );
    }
    Ok(())
}
