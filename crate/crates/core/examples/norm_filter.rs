//! Re-rank an external candidate list: keep the first 2x budget entries and
//! norm-sample the final budget from them.

use subset_select::{norm_filter, CandidateOrdering, FeatureMatrix, SelectionConfig, Strategy};

fn main() -> subset_select::Result<()> {
    let rows: Vec<[f64; 1]> = (1..=12).map(|k| [k as f64]).collect();
    let features = FeatureMatrix::from_rows(&rows)?;

    // some other selector ranked the pool like this
    let candidates = CandidateOrdering::new(vec![0, 11, 3, 7, 5, 9, 1, 2, 4, 6, 8, 10], 12)?;
    let config = SelectionConfig::new(Strategy::NormFilter, 3).with_seed(5);
    let result = norm_filter(&features, &candidates, &config)?;
    println!("eligible: {:?}", &candidates.ranked()[..6]);
    println!("selected: {:?}", result.indices);

    let wide = config.clone().with_candidate_multiplier(4);
    println!(
        "with multiplier 4: {:?}",
        norm_filter(&features, &candidates, &wide)?.indices
    );
    Ok(())
}
