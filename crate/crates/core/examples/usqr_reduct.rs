//! Unsupervised quick reduct over each discretization setting.
//!
//! `cargo run --example usqr_reduct [-- dataset-name]`

use std::path::PathBuf;

use unselect::dataset::{discretize, Registry, Strategy};
use unselect::roughset::{is_superreduct, mean_dependency};
use unselect::selectors::usqr;

fn main() -> unselect::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "ecoli".into());
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data");
    let reg = Registry::load(data.join("registry.txt"))?;
    let entry = reg
        .get(&name)
        .ok_or_else(|| unselect::Error::InvalidParameter(format!("unknown dataset {name}")))?;
    let t = entry.load()?;

    for strategy in [Strategy::EqualWidth, Strategy::EqualFrequency] {
        for bins in 3..=5 {
            let coded = discretize(&t, strategy, bins)?;
            let r = usqr(&coded);
            println!(
                "{strategy} x{bins}: {:<20} mean dependency {:.4} superreduct {}",
                r.to_string(),
                mean_dependency(&coded, &r)?.value(),
                is_superreduct(&coded, &r)?
            );
        }
    }
    Ok(())
}
