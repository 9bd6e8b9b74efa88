//! Rough set kernel: indiscernibility partitions, approximations, positive
//! regions and dependency degrees over a [`DiscreteTable`].
//!
//! Dependencies are kept as exact integer ratios so that reduct checks
//! compare counts rather than floats.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use crate::dataset::{DiscreteTable, FeatureSubset};
use crate::error::{Error, Result};

/// Largest attribute count [`brute_force_min_reducts`] will enumerate.
pub const BRUTE_FORCE_LIMIT: usize = 20;

/// Disjoint, non-empty blocks of object indices covering `0..universe_size`.
///
/// Always canonical: members ascending, blocks ordered by smallest member.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    universe_size: usize,
}

impl Partition {
    pub fn from_blocks(mut blocks: Vec<Vec<usize>>, universe_size: usize) -> Result<Self> {
        let mut seen = vec![false; universe_size];
        for b in &mut blocks {
            if b.is_empty() {
                return Err(Error::invalid("partition block is empty"));
            }
            b.sort_unstable();
            for &x in b.iter() {
                if x >= universe_size || seen[x] {
                    return Err(Error::invalid(format!(
                        "object {x} is out of range or in two blocks"
                    )));
                }
                seen[x] = true;
            }
        }
        if let Some(x) = seen.iter().position(|s| !s) {
            return Err(Error::invalid(format!("object {x} is in no block")));
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(Partition {
            blocks,
            universe_size,
        })
    }

    /// Groups objects by key; objects with equal keys share a block.
    pub fn from_keys<K: Eq + std::hash::Hash>(keys: &[K]) -> Self {
        let ids = dense_ids(keys.iter());
        Self::from_block_ids(&ids)
    }

    pub fn coarsest(universe_size: usize) -> Self {
        let blocks = if universe_size == 0 {
            vec![]
        } else {
            vec![(0..universe_size).collect()]
        };
        Partition {
            blocks,
            universe_size,
        }
    }

    pub fn discrete(universe_size: usize) -> Self {
        Partition {
            blocks: (0..universe_size).map(|i| vec![i]).collect(),
            universe_size,
        }
    }

    // ids must be dense and assigned in first-occurrence order
    fn from_block_ids(ids: &[usize]) -> Self {
        let count = ids.iter().copied().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); count];
        for (i, &b) in ids.iter().enumerate() {
            blocks[b].push(i);
        }
        Partition {
            blocks,
            universe_size: ids.len(),
        }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn universe_size(&self) -> usize {
        self.universe_size
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Block index of every object.
    pub fn block_ids(&self) -> Vec<usize> {
        let mut ids = vec![0; self.universe_size];
        for (b, block) in self.blocks.iter().enumerate() {
            for &x in block {
                ids[x] = b;
            }
        }
        ids
    }

    /// Blockwise intersection `{X ∩ Y : X ∈ self, Y ∈ other, X ∩ Y ≠ ∅}`.
    pub fn intersect(&self, other: &Partition) -> Result<Partition> {
        check_universe(self, other)?;
        let a = self.block_ids();
        let b = other.block_ids();
        let pairs: Vec<(usize, usize)> = a.into_iter().zip(b).collect();
        Ok(Self::from_keys(&pairs))
    }

    /// True when every block of `self` lies inside some block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        if self.universe_size != coarser.universe_size {
            return false;
        }
        let ids = coarser.block_ids();
        self.blocks
            .iter()
            .all(|b| b.iter().all(|&x| ids[x] == ids[b[0]]))
    }
}

/// Debug text form, e.g. `{0,1}|{2,3}`.
impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, b) in self.blocks.iter().enumerate() {
            if k > 0 {
                f.write_str("|")?;
            }
            f.write_str("{")?;
            for (m, x) in b.iter().enumerate() {
                if m > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str("}")?;
        }
        Ok(())
    }
}

fn dense_ids<'a, K: Eq + std::hash::Hash + 'a>(keys: impl Iterator<Item = &'a K>) -> Vec<usize> {
    let mut map: HashMap<&K, usize> = HashMap::new();
    keys.map(|k| {
        let next = map.len();
        *map.entry(k).or_insert(next)
    })
    .collect()
}

fn check_universe(a: &Partition, b: &Partition) -> Result<()> {
    if a.universe_size != b.universe_size {
        return Err(Error::UniverseMismatch {
            left: a.universe_size,
            right: b.universe_size,
        });
    }
    Ok(())
}

/// Exact dependency degree `count / total`.
///
/// For a single dependency `count` is |POS| and `total` is |U|; for a mean
/// over `d` pseudo-decisions the counts are summed and `total` is `d·|U|`.
#[derive(Debug, Clone, Copy)]
pub struct DependencyValue {
    pub count: u64,
    pub total: u64,
}

impl DependencyValue {
    pub fn new(count: u64, total: u64) -> Self {
        debug_assert!(total > 0 && count <= total);
        DependencyValue { count, total }
    }

    pub fn value(&self) -> f64 {
        self.count as f64 / self.total as f64
    }
}

impl fmt::Display for DependencyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{} ({:.4})", self.count, self.total, self.value())
    }
}

impl PartialEq for DependencyValue {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for DependencyValue {}

impl PartialOrd for DependencyValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Compares the rationals: `1/2 == 2/4`.
impl Ord for DependencyValue {
    fn cmp(&self, other: &Self) -> Ordering {
        let l = self.count as u128 * other.total as u128;
        let r = other.count as u128 * self.total as u128;
        l.cmp(&r)
    }
}

/// U/IND(P): objects share a block iff they agree on every attribute in `p`.
/// An empty `p` yields the single-block partition.
pub fn indiscernibility_partition(table: &DiscreteTable, p: &FeatureSubset) -> Result<Partition> {
    p.check_bounds(table.n_attributes())?;
    Ok(Partition::from_block_ids(&block_ids(table, p.indices())))
}

// Dense first-occurrence block ids of IND(attrs), refined one attribute at a time.
pub(crate) fn block_ids(table: &DiscreteTable, attrs: &[usize]) -> Vec<usize> {
    let mut ids = vec![0usize; table.n_objects()];
    for &a in attrs {
        ids = refine_ids(&ids, table.column(a));
    }
    ids
}

pub(crate) fn refine_ids(ids: &[usize], codes: &[u32]) -> Vec<usize> {
    let pairs: Vec<(usize, u32)> = ids.iter().copied().zip(codes.iter().copied()).collect();
    dense_ids(pairs.iter())
}

fn membership(universe: usize, x: &[usize]) -> Vec<bool> {
    let mut mask = vec![false; universe];
    for &i in x {
        debug_assert!(i < universe, "object {i} outside universe of {universe}");
        if i < universe {
            mask[i] = true;
        }
    }
    mask
}

fn union_of<'a>(blocks: impl Iterator<Item = &'a Vec<usize>>) -> Vec<usize> {
    let mut out: Vec<usize> = blocks.flatten().copied().collect();
    out.sort_unstable();
    out
}

/// Union of the blocks entirely inside `x`. Returned ascending.
pub fn lower_approximation(p: &Partition, x: &[usize]) -> Vec<usize> {
    let mask = membership(p.universe_size, x);
    union_of(p.blocks.iter().filter(|b| b.iter().all(|&i| mask[i])))
}

/// Union of the blocks that meet `x`. Returned ascending.
pub fn upper_approximation(p: &Partition, x: &[usize]) -> Vec<usize> {
    let mask = membership(p.universe_size, x);
    union_of(p.blocks.iter().filter(|b| b.iter().any(|&i| mask[i])))
}

/// POS: objects whose `cond` block lies inside a single `dec` block.
pub fn positive_region(cond: &Partition, dec: &Partition) -> Result<Vec<usize>> {
    check_universe(cond, dec)?;
    let dec_ids = dec.block_ids();
    Ok(union_of(cond.blocks.iter().filter(|b| {
        b.iter().all(|&i| dec_ids[i] == dec_ids[b[0]])
    })))
}

// |POS| of a partition given by dense block ids against one attribute's codes.
pub(crate) fn pos_count(cond_ids: &[usize], n_blocks: usize, decision: &[u32]) -> u64 {
    const UNSET: u32 = u32::MAX;
    let mut first = vec![UNSET; n_blocks];
    let mut consistent = vec![true; n_blocks];
    let mut size = vec![0u64; n_blocks];
    for (&b, &c) in cond_ids.iter().zip(decision) {
        size[b] += 1;
        if first[b] == UNSET {
            first[b] = c;
        } else if first[b] != c {
            consistent[b] = false;
        }
    }
    size.iter()
        .zip(&consistent)
        .filter(|(_, &ok)| ok)
        .map(|(s, _)| *s)
        .sum()
}

/// γ_P(Q) = |POS_P(Q)| / |U|.
pub fn gamma(
    table: &DiscreteTable,
    p: &FeatureSubset,
    q: &FeatureSubset,
) -> Result<DependencyValue> {
    if q.is_empty() {
        return Err(Error::EmptyDecision);
    }
    let d = table.n_attributes();
    p.check_bounds(d)?;
    q.check_bounds(d)?;
    let cond = indiscernibility_partition(table, p)?;
    let dec = indiscernibility_partition(table, q)?;
    let pos = positive_region(&cond, &dec)?;
    Ok(DependencyValue::new(
        pos.len() as u64,
        table.n_objects() as u64,
    ))
}

/// Mean of γ_R({y}) over every attribute y of the table, members of R
/// included.
pub fn mean_dependency(table: &DiscreteTable, r: &FeatureSubset) -> Result<DependencyValue> {
    if r.is_empty() {
        return Err(Error::EmptySubset);
    }
    r.check_bounds(table.n_attributes())?;
    Ok(mean_dependency_of(table, r.indices()))
}

// Accepts an empty attribute list (coarsest partition).
pub(crate) fn mean_dependency_of(table: &DiscreteTable, attrs: &[usize]) -> DependencyValue {
    let ids = block_ids(table, attrs);
    mean_dependency_from_ids(table, &ids)
}

pub(crate) fn mean_dependency_from_ids(table: &DiscreteTable, ids: &[usize]) -> DependencyValue {
    let n_blocks = ids.iter().copied().max().map_or(0, |m| m + 1);
    let d = table.n_attributes();
    let count = (0..d)
        .map(|y| pos_count(ids, n_blocks, table.column(y)))
        .sum();
    DependencyValue::new(count, (d * table.n_objects()) as u64)
}

/// True iff R preserves the full attribute set's mean dependency (exact
/// comparison). Accepts the empty set.
pub fn is_superreduct(table: &DiscreteTable, r: &FeatureSubset) -> Result<bool> {
    r.check_bounds(table.n_attributes())?;
    let full: Vec<usize> = (0..table.n_attributes()).collect();
    Ok(mean_dependency_of(table, r.indices()) == mean_dependency_of(table, &full))
}

/// Every non-empty superreduct of minimum cardinality, in lexicographic
/// order. Exponential; refuses tables wider than [`BRUTE_FORCE_LIMIT`].
pub fn brute_force_min_reducts(table: &DiscreteTable) -> Result<Vec<FeatureSubset>> {
    let d = table.n_attributes();
    if d > BRUTE_FORCE_LIMIT {
        return Err(Error::TooManyAttributes {
            attributes: d,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let full: Vec<usize> = (0..d).collect();
    let target = mean_dependency_of(table, &full);
    for size in 1..=d {
        let mut found = Vec::new();
        for combo in Combinations::new(d, size) {
            if mean_dependency_of(table, &combo) == target {
                found.push(FeatureSubset::new(combo)?);
            }
        }
        if !found.is_empty() {
            return Ok(found);
        }
    }
    unreachable!("the full attribute set is always a superreduct")
}

/// k-combinations of `0..n` in lexicographic order.
struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            current: (k <= n).then(|| (0..k).collect()),
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let cur = self.current.as_mut().unwrap();
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if cur[i] < self.n - k + i {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(cols: &[&[u32]]) -> DiscreteTable {
        let n = cols[0].len();
        let rows: Vec<Vec<u32>> = (0..n)
            .map(|i| cols.iter().map(|c| c[i]).collect())
            .collect();
        DiscreteTable::from_rows(&rows).unwrap()
    }

    fn subset(ix: &[usize]) -> FeatureSubset {
        FeatureSubset::new(ix.to_vec()).unwrap()
    }

    fn blocks(b: &[&[usize]], n: usize) -> Partition {
        Partition::from_blocks(b.iter().map(|x| x.to_vec()).collect(), n).unwrap()
    }

    #[test]
    fn partition_single_attribute() {
        let t = table(&[&[1, 1, 2, 2]]);
        let p = indiscernibility_partition(&t, &subset(&[0])).unwrap();
        assert_eq!(p.to_string(), "{0,1}|{2,3}");
    }

    #[test]
    fn partition_empty_set_is_coarsest() {
        let t = table(&[&[1, 1, 2, 2]]);
        let p = indiscernibility_partition(&t, &FeatureSubset::empty()).unwrap();
        assert_eq!(p.to_string(), "{0,1,2,3}");
    }

    #[test]
    fn partition_two_attributes_intersect() {
        let t = table(&[&[1, 1, 2, 2], &[1, 2, 1, 2]]);
        let p = indiscernibility_partition(&t, &subset(&[0, 1])).unwrap();
        assert_eq!(p, Partition::discrete(4));
        let a = indiscernibility_partition(&t, &subset(&[0])).unwrap();
        let b = indiscernibility_partition(&t, &subset(&[1])).unwrap();
        assert_eq!(a.intersect(&b).unwrap(), p);
    }

    #[test]
    fn canonical_form_orders_blocks() {
        let p = blocks(&[&[3, 2], &[1, 0]], 4);
        assert_eq!(p.blocks(), &[vec![0, 1], vec![2, 3]]);
        assert!(Partition::from_blocks(vec![vec![0], vec![0, 1]], 2).is_err());
        assert!(Partition::from_blocks(vec![vec![0]], 2).is_err());
    }

    #[test]
    fn lower_approximation_examples() {
        let p = blocks(&[&[0, 1], &[2, 3]], 4);
        assert_eq!(lower_approximation(&p, &[0, 1, 2]), vec![0, 1]);
        assert_eq!(lower_approximation(&p, &[0, 1, 2, 3]), vec![0, 1, 2, 3]);
        assert!(lower_approximation(&p, &[]).is_empty());
    }

    #[test]
    fn upper_approximation_examples() {
        let p = blocks(&[&[0, 1], &[2, 3]], 4);
        assert_eq!(upper_approximation(&p, &[0]), vec![0, 1]);
        assert!(upper_approximation(&p, &[]).is_empty());
        assert_eq!(
            upper_approximation(&Partition::discrete(4), &[3, 1]),
            vec![1, 3]
        );
    }

    #[test]
    fn positive_region_examples() {
        let dec = blocks(&[&[0, 1, 2], &[3]], 4);
        assert_eq!(
            positive_region(&Partition::discrete(4), &dec).unwrap(),
            vec![0, 1, 2, 3]
        );
        assert!(positive_region(&Partition::coarsest(4), &dec)
            .unwrap()
            .is_empty());
        // {0,1} ⊆ {0,1,2}, {2} ⊆ {0,1,2}, {3} ⊆ {3}
        let cond = blocks(&[&[0, 1], &[2], &[3]], 4);
        assert_eq!(positive_region(&cond, &dec).unwrap(), vec![0, 1, 2, 3]);
        assert!(matches!(
            positive_region(&cond, &Partition::coarsest(3)),
            Err(Error::UniverseMismatch { left: 4, right: 3 })
        ));
    }

    #[test]
    fn gamma_examples() {
        let t = table(&[&[1, 1, 2, 2], &[1, 1, 1, 2]]);
        assert_eq!(
            gamma(&t, &subset(&[1]), &subset(&[1])).unwrap().value(),
            1.0
        );
        assert_eq!(
            gamma(&t, &FeatureSubset::empty(), &subset(&[0]))
                .unwrap()
                .value(),
            0.0
        );
        // {0,1} ⊆ b-class {0,1,2}; {2,3} straddles both classes
        let g = gamma(&t, &subset(&[0]), &subset(&[1])).unwrap();
        assert_eq!((g.count, g.total), (2, 4));
        assert!(matches!(
            gamma(&t, &subset(&[0]), &FeatureSubset::empty()),
            Err(Error::EmptyDecision)
        ));
    }

    #[test]
    fn mean_dependency_examples() {
        let t = table(&[&[1, 1, 2, 2], &[1, 1, 1, 2]]);
        assert_eq!(mean_dependency(&t, &subset(&[0, 1])).unwrap().value(), 1.0);
        // (γ(a→a) + γ(a→b)) / 2 = (1 + 0.5) / 2
        assert_eq!(mean_dependency(&t, &subset(&[0])).unwrap().value(), 0.75);
        let single = table(&[&[0, 1, 1]]);
        assert_eq!(
            mean_dependency(&single, &subset(&[0])).unwrap().value(),
            1.0
        );
        assert!(matches!(
            mean_dependency(&t, &FeatureSubset::empty()),
            Err(Error::EmptySubset)
        ));
    }

    #[test]
    fn superreduct_examples() {
        let t = table(&[&[0, 1, 1, 2], &[0, 1, 1, 2], &[5, 5, 6, 6]]);
        assert!(is_superreduct(&t, &FeatureSubset::all(3)).unwrap());
        // column 1 duplicates column 0
        assert!(is_superreduct(&t, &subset(&[0, 2])).unwrap());
        // objects 1 and 2 are separated only by column 2
        let t = table(&[&[0, 1, 1], &[0, 0, 0], &[0, 0, 1]]);
        assert!(!is_superreduct(&t, &subset(&[0, 1])).unwrap());
        assert!(is_superreduct(&t, &subset(&[0, 2])).unwrap());
    }

    #[test]
    fn brute_force_examples() {
        let t = table(&[&[0, 0, 0, 0], &[0, 1, 2, 1], &[3, 3, 3, 3]]);
        assert_eq!(brute_force_min_reducts(&t).unwrap(), vec![subset(&[1])]);
        let t = table(&[&[0, 1, 0, 1], &[0, 1, 0, 1], &[0, 0, 0, 0]]);
        assert_eq!(
            brute_force_min_reducts(&t).unwrap(),
            vec![subset(&[0]), subset(&[1])]
        );
    }

    #[test]
    fn brute_force_refuses_wide_tables() {
        let row: Vec<u32> = vec![0; 21];
        let t = DiscreteTable::from_rows(&[row.clone(), row]).unwrap();
        assert!(matches!(
            brute_force_min_reducts(&t),
            Err(Error::TooManyAttributes {
                attributes: 21,
                limit: 20
            })
        ));
    }

    #[test]
    fn combinations_lexicographic() {
        let c: Vec<Vec<usize>> = Combinations::new(4, 2).collect();
        assert_eq!(
            c,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(Combinations::new(3, 3).count(), 1);
        assert_eq!(Combinations::new(2, 3).count(), 0);
    }

    #[test]
    fn dependency_ordering_is_rational() {
        let a = DependencyValue::new(1, 2);
        let b = DependencyValue::new(2, 4);
        assert_eq!(a, b);
        assert!(DependencyValue::new(2, 3) > a);
    }
}
