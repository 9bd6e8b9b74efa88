//! Helpers shared by the integration tests: dataset access and
//! brute-force rough-set oracles written against the definitions, without
//! reusing any library internals.

#![allow(dead_code)]

use std::path::PathBuf;

use proptest::prelude::*;
use rand::Rng;
use unselect::dataset::{DataTable, DiscreteTable, Registry};

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn registry() -> Registry {
    Registry::parse(
        &std::fs::read_to_string(data_dir().join("registry.txt")).expect("registry.txt"),
        &data_dir(),
    )
    .expect("registry parses")
}

/// Loads a bundled dataset, or `None` when its file is absent.
pub fn dataset(name: &str) -> Option<DataTable> {
    let reg = registry();
    let entry = reg.get(name)?;
    entry
        .path
        .is_file()
        .then(|| entry.load().expect("bundled dataset loads"))
}

fn agree(t: &DiscreteTable, i: usize, j: usize, attrs: &[usize]) -> bool {
    attrs.iter().all(|&a| t.code(i, a) == t.code(j, a))
}

/// Blocks of IND(attrs) by pairwise comparison, in canonical order.
pub fn oracle_partition(t: &DiscreteTable, attrs: &[usize]) -> Vec<Vec<usize>> {
    let n = t.n_objects();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        match blocks.iter_mut().find(|b| agree(t, b[0], i, attrs)) {
            Some(b) => b.push(i),
            None => blocks.push(vec![i]),
        }
    }
    blocks
}

/// |POS_P(Q)|: objects whose every P-indiscernible peer is also
/// Q-indiscernible.
pub fn oracle_pos(t: &DiscreteTable, p: &[usize], q: &[usize]) -> u64 {
    let n = t.n_objects();
    (0..n)
        .filter(|&i| (0..n).all(|j| !agree(t, i, j, p) || agree(t, i, j, q)))
        .count() as u64
}

/// Mean dependency as (Σ_y |POS_R({y})|, d·n).
pub fn oracle_mean(t: &DiscreteTable, r: &[usize]) -> (u64, u64) {
    let d = t.n_attributes();
    let sum = (0..d).map(|y| oracle_pos(t, r, &[y])).sum();
    (sum, (d * t.n_objects()) as u64)
}

/// Minimum-cardinality non-empty superreducts by bitmask enumeration,
/// each sorted ascending, the list sorted lexicographically.
pub fn oracle_min_reducts(t: &DiscreteTable) -> Vec<Vec<usize>> {
    let d = t.n_attributes();
    let all: Vec<usize> = (0..d).collect();
    let full = oracle_mean(t, &all);
    let mut hits: Vec<Vec<usize>> = (1u32..1 << d)
        .map(|mask| (0..d).filter(|b| mask >> b & 1 == 1).collect::<Vec<_>>())
        .filter(|s| oracle_mean(t, s) == full)
        .collect();
    let min = hits.iter().map(Vec::len).min().expect("full set qualifies");
    hits.retain(|s| s.len() == min);
    hits.sort();
    hits
}

pub fn random_discrete(
    rng: &mut impl Rng,
    max_n: usize,
    max_d: usize,
    max_bins: u32,
) -> DiscreteTable {
    let n = rng.random_range(1..=max_n);
    let d = rng.random_range(1..=max_d);
    let bins = rng.random_range(1..=max_bins);
    let rows: Vec<Vec<u32>> = (0..n)
        .map(|_| (0..d).map(|_| rng.random_range(0..bins)).collect())
        .collect();
    DiscreteTable::from_rows(&rows).expect("valid codes")
}

pub fn discrete_table(
    max_n: usize,
    max_d: usize,
    max_bins: u32,
) -> impl Strategy<Value = DiscreteTable> {
    (1..=max_n, 1..=max_d, 1..=max_bins).prop_flat_map(|(n, d, bins)| {
        prop::collection::vec(prop::collection::vec(0..bins, d), n)
            .prop_map(|rows| DiscreteTable::from_rows(&rows).expect("valid codes"))
    })
}

pub fn real_table(max_n: usize, max_d: usize) -> impl Strategy<Value = DataTable> {
    (2..=max_n, 1..=max_d).prop_flat_map(|(n, d)| {
        prop::collection::vec(prop::collection::vec(-100.0f64..100.0, d), n)
            .prop_map(|rows| DataTable::from_rows(rows).expect("finite values"))
    })
}
