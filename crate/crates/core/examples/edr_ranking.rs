//! Empirical-distribution ranking: F_n(mean) for every attribute.
//!
//! `cargo run --example edr_ranking [-- dataset-name [k]]`

use std::path::PathBuf;

use unselect::dataset::Registry;
use unselect::selectors::{edr_scores, edr_select};

fn main() -> unselect::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "heart".into());
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data");
    let reg = Registry::load(data.join("registry.txt"))?;
    let entry = reg
        .get(&name)
        .ok_or_else(|| unselect::Error::InvalidParameter(format!("unknown dataset {name}")))?;
    let k = args
        .next()
        .and_then(|s| s.parse().ok())
        .or(entry.edr_k)
        .unwrap_or(4);
    let t = entry.load()?;

    for (j, score) in edr_scores(&t).entries() {
        println!("{:>3} {:<10} {score:.4}", j + 1, t.attr_names()[*j]);
    }
    println!("top {k}: {}", edr_select(&t, k)?);
    Ok(())
}
