//! Fits PCA on the z-scored diabetes data and prints the spectrum,
//! the retained component count and the loading-based ranking.
//!
//! `cargo run --example pca_loadings [-- path/to/data.arff]`

use std::path::PathBuf;

use unselect::dataset::{load, zscore_normalize, LabelColumn, LoadOptions};
use unselect::pca::{fit_pca, loading_scores, retain_count, PcaMethod, RetainPolicy};

fn main() -> unselect::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/diabetes.arff")
        });
    let opts = LoadOptions {
        label: LabelColumn::Last,
        ..LoadOptions::default()
    };
    let t = zscore_normalize(&load(&path, &opts)?)?;
    let model = fit_pca(&t, PcaMethod::Svd)?;

    let mut cum = 0.0;
    for (i, (ev, ratio)) in model
        .eigenvalues()
        .iter()
        .zip(&model.explained_ratio)
        .enumerate()
    {
        cum += ratio;
        println!(
            "PC{:<2} eigenvalue {ev:8.4}  ratio {ratio:.4}  cumulative {cum:.4}",
            i + 1
        );
    }
    for policy in ["var:0.90", "kaiser", "fixed:3"] {
        let p: RetainPolicy = policy.parse()?;
        let k = retain_count(&model, p)?;
        println!(
            "{policy:<9} keeps {k} -> ranking {}",
            loading_scores(&model, k)?
        );
    }
    Ok(())
}
