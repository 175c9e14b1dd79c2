//! Random subsets of a corrupted mixture: does a larger mean feature norm go
//! with higher probe accuracy?

use subset_select::eval::{
    correlation_study, generate_synthetic, generate_test_set, SyntheticSpec,
};

fn main() -> subset_select::Result<()> {
    let spec = SyntheticSpec {
        seed: 1,
        ..SyntheticSpec::default()
    };
    let data = generate_synthetic(&spec)?;
    let corrupted = data.corrupted.iter().filter(|&&c| c).count();
    println!("pool of {} examples, {corrupted} corrupted", data.set.len());

    let test = generate_test_set(&spec, 100)?;
    let report = correlation_study(&data.set, &test, 50, 100, 1)?;
    println!(
        "slope {:.4}, intercept {:.4}, pearson r {:.3}",
        report.fit.slope, report.fit.intercept, report.fit.pearson_r
    );
    Ok(())
}
