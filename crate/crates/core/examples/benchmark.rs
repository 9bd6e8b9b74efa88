//! Full selector x classifier benchmark over the bundled registry, printed
//! as accuracy tables. Missing datasets show up as FAILED lines.
//!
//! `cargo run --release --example benchmark`

use std::path::PathBuf;

use unselect::dataset::Registry;
use unselect::eval::{run_benchmark, BenchConfig, ClassifierKind};
use unselect::selectors::Method;

fn main() -> unselect::Result<()> {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data");
    let reg = Registry::load(data.join("registry.txt"))?;
    let report = run_benchmark(
        &reg,
        &[],
        &Method::ALL,
        &ClassifierKind::ALL,
        &BenchConfig::default(),
    )?;
    print!("{}", report.render_table());
    Ok(())
}
