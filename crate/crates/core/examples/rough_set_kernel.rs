//! Partitions, approximations and dependency degrees on a small table.
//!
//! `cargo run --example rough_set_kernel`

use unselect::dataset::{DiscreteTable, FeatureSubset};
use unselect::roughset::{
    brute_force_min_reducts, gamma, indiscernibility_partition, lower_approximation,
    mean_dependency, positive_region, upper_approximation,
};

fn main() -> unselect::Result<()> {
    let rows = vec![
        vec![0, 1, 0, 1],
        vec![0, 1, 1, 1],
        vec![1, 0, 0, 0],
        vec![1, 0, 0, 1],
        vec![2, 1, 1, 0],
        vec![2, 0, 1, 0],
    ];
    let t = DiscreteTable::from_rows(&rows)?;
    let a = FeatureSubset::new(vec![0])?;
    let b = FeatureSubset::new(vec![1])?;
    let d = FeatureSubset::new(vec![3])?;

    let ind_a = indiscernibility_partition(&t, &a)?;
    let ind_d = indiscernibility_partition(&t, &d)?;
    println!("IND(a1)      {:?}", ind_a.blocks());
    println!("IND(a4)      {:?}", ind_d.blocks());

    let x = [0, 1, 3];
    println!("lower(X)     {:?}", lower_approximation(&ind_a, &x));
    println!("upper(X)     {:?}", upper_approximation(&ind_a, &x));
    println!("POS_a1(a4)   {:?}", positive_region(&ind_a, &ind_d)?);
    println!("gamma a1->a4 {}", gamma(&t, &a, &d)?);
    println!("gamma a2->a4 {}", gamma(&t, &b, &d)?);
    println!(
        "mean dep C   {}",
        mean_dependency(&t, &FeatureSubset::all(4))?
    );
    for r in brute_force_min_reducts(&t)? {
        println!("min reduct   {r}");
    }
    Ok(())
}
