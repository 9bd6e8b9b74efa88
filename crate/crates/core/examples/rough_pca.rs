//! Rough-PCA step by step next to the one-call selector.
//!
//! `cargo run --example rough_pca [-- dataset-name]`

use std::path::PathBuf;

use unselect::dataset::{discretize, project, zscore_normalize, Registry};
use unselect::pca::{fit_pca, loading_scores, retain_count, PcaMethod};
use unselect::selectors::{rough_pca_select, usqr, SelectorConfig};

fn main() -> unselect::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "diabetes".into());
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data");
    let reg = Registry::load(data.join("registry.txt"))?;
    let entry = reg
        .get(&name)
        .ok_or_else(|| unselect::Error::InvalidParameter(format!("unknown dataset {name}")))?;
    let t = entry.load()?;
    let cfg = SelectorConfig::default();

    let z = zscore_normalize(&t)?;
    let model = fit_pca(&z, PcaMethod::Svd)?;
    let r = retain_count(&model, cfg.pc_policy)?;
    let pre = loading_scores(&model, r)?.top(r)?;
    println!("{} keeps {r} PCs, preselected {pre}", cfg.pc_policy);
    let coded = discretize(&project(&z, &pre)?, cfg.strategy, cfg.bins)?;
    let reduct = pre.compose(&usqr(&coded))?;
    println!("reduct      {reduct}");
    println!("selector    {}", rough_pca_select(&t, &cfg)?);
    Ok(())
}
