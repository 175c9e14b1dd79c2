//! Summarize the feature-norm distribution of a mixture, where the corrupted
//! examples form a low-norm bump.

use subset_select::eval::{generate_synthetic, norm_histogram, NormSummary, SyntheticSpec};
use subset_select::{compute_norms, NormType};

fn main() -> subset_select::Result<()> {
    let data = generate_synthetic(&SyntheticSpec::default())?;
    let features = &data.set.features;
    for norm in NormType::ALL {
        let s = NormSummary::from_values(&compute_norms(features, norm))?;
        println!(
            "{:<4} min {:.3} median {:.3} mean {:.3} max {:.3}",
            norm.as_str(),
            s.min,
            s.median,
            s.mean,
            s.max
        );
    }
    let hist = norm_histogram(features, NormType::L2, 12)?;
    let peak = *hist.counts.iter().max().unwrap_or(&1);
    for (edge, &count) in hist.edges.iter().zip(&hist.counts) {
        println!("{edge:>7.3} | {}", "#".repeat(count * 50 / peak));
    }
    Ok(())
}
