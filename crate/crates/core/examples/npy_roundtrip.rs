//! Write features in each supported format, read them back, run a selection
//! and persist the result record with its index sidecar.

use subset_select::ingest::{
    load_features, load_result, sha256_hex, write_csv, write_npy, write_raw_f64, write_result,
    Dtype, LoadOptions, ResultRecord,
};
use subset_select::{select, FeatureMatrix, SelectionConfig, Strategy};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("subset-select-roundtrip");
    std::fs::create_dir_all(&dir)?;
    let features = FeatureMatrix::from_rows(&[
        [1.0, 2.0, 3.0],
        [0.1, -0.2, 0.3],
        [4.0, 0.0, -1.5],
        [1e-3, 1e3, 0.0],
    ])?;

    let npy = dir.join("features.npy");
    write_npy(&npy, &features, Dtype::F64)?;
    write_csv(dir.join("features.csv"), &features)?;
    write_raw_f64(dir.join("features.f64"), &features)?;
    for name in ["features.npy", "features.csv", "features.f64"] {
        let back = load_features(dir.join(name), &LoadOptions::default())?;
        println!(
            "{name}: {}x{} exact={}",
            back.n_examples(),
            back.n_dims(),
            back == features
        );
    }

    let normalized = load_features(
        &npy,
        &LoadOptions {
            normalize_rows: true,
            center: false,
        },
    )?;
    println!(
        "row norms after normalization: {:?}",
        normalized.norms(subset_select::NormType::L2)
    );

    let result = select(
        &features,
        &SelectionConfig::new(Strategy::GramSchmidt, 2).with_seed(1),
        None,
    )?;
    let record = ResultRecord::from_result(&result, Some(sha256_hex(&std::fs::read(&npy)?)));
    let sidecar = write_result(&record, dir.join("result.json"))?;
    println!(
        "indices {:?} -> {}",
        load_result(dir.join("result.json"))?.indices,
        sidecar.display()
    );
    Ok(())
}
