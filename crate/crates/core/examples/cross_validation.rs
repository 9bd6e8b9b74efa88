//! Stratified 10-fold accuracy of each classifier on a fixed subset.
//!
//! `cargo run --example cross_validation [-- dataset-name subset]`

use std::path::PathBuf;

use unselect::dataset::{FeatureSubset, Registry};
use unselect::eval::{cross_validate, ClassifierKind, CvOptions, FoldPlan};

fn main() -> unselect::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "diabetes".into());
    let subset = args.next().unwrap_or_else(|| "3,4,6,2".into());
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data");
    let reg = Registry::load(data.join("registry.txt"))?;
    let entry = reg
        .get(&name)
        .ok_or_else(|| unselect::Error::InvalidParameter(format!("unknown dataset {name}")))?;
    let t = entry.load()?;
    let s = FeatureSubset::parse_one_based(&subset)?;
    let plan = FoldPlan::stratified(t.labels().unwrap_or(&[]), 10, 1)?;
    println!("fold sizes {:?}", plan.fold_sizes());

    for c in ClassifierKind::ALL {
        let r = cross_validate(&t, &s, c, &plan, &CvOptions::default())?;
        println!(
            "{:<14} {:7.4}%  ({}/{})",
            c.title(),
            r.accuracy,
            r.correct,
            r.total
        );
    }
    Ok(())
}
