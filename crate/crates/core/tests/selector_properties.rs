mod common;

use proptest::prelude::*;
use unselect::dataset::{zscore_normalize, DataTable};
use unselect::pca::{fit_pca, loading_scores, retain_count, PcaMethod, RetainPolicy};
use unselect::roughset::is_superreduct;
use unselect::selectors::{
    edr_scores, edr_select, rough_pca_select, select, usqr, Method, SelectorConfig,
};

fn permuted(t: &DataTable, shift: usize) -> DataTable {
    let n = t.n_objects();
    // a stride coprime to n visits every row once
    let stride = (1..=n).rev().find(|s| gcd(*s, n) == 1).unwrap_or(1);
    let order: Vec<usize> = (0..n).map(|i| (i * stride + shift) % n).collect();
    t.select_rows(&order).unwrap()
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

proptest! {
    #[test]
    fn edr_scores_in_unit_interval_and_prefix(t in common::real_table(15, 6)) {
        let s = edr_scores(&t);
        prop_assert_eq!(s.len(), t.n_attributes());
        prop_assert!(s.entries().iter().all(|e| (0.0..=1.0).contains(&e.1)));
        for k in 1..t.n_attributes() {
            let a = edr_select(&t, k).unwrap();
            let b = edr_select(&t, k + 1).unwrap();
            prop_assert_eq!(a.indices(), &b.indices()[..k]);
        }
    }

    #[test]
    fn edr_respects_positive_affine_maps(t in common::real_table(15, 5), a in 0.1f64..10.0, b in -10.0f64..10.0) {
        let moved = DataTable::from_rows(t.rows().map(|r| r.iter().map(|x| a * x + b).collect()).collect()).unwrap();
        prop_assert_eq!(edr_scores(&t), edr_scores(&moved));
    }

    #[test]
    fn selectors_are_deterministic_and_row_order_free(t in common::real_table(14, 5), shift in 0usize..14) {
        prop_assume!(t.n_attributes() >= 2);
        let cfg = SelectorConfig::default();
        let p = permuted(&t, shift);
        for m in [Method::Pca, Method::RoughPca] {
            let k = Some(t.n_attributes().min(2));
            let a = select(m, &t, &cfg, k).unwrap().subset;
            prop_assert_eq!(&a, &select(m, &t, &cfg, k).unwrap().subset);
            prop_assert_eq!(a, select(m, &p, &cfg, k).unwrap().subset);
        }
        for m in [Method::Edr, Method::Usqr] {
            let k = Some(1);
            prop_assert_eq!(select(m, &t, &cfg, k).unwrap(), select(m, &t, &cfg, k).unwrap());
        }
    }

    #[test]
    fn rough_pca_stays_inside_preselection(t in common::real_table(14, 6)) {
        prop_assume!(t.n_attributes() >= 2);
        let cfg = SelectorConfig { pc_policy: RetainPolicy::Fixed(3), ..SelectorConfig::default() };
        let z = zscore_normalize(&t).unwrap();
        let m = fit_pca(&z, PcaMethod::Svd).unwrap();
        let r = retain_count(&m, cfg.pc_policy).unwrap();
        let pre = loading_scores(&m, r).unwrap().top(r).unwrap();
        let got = rough_pca_select(&t, &cfg).unwrap();
        prop_assert!(got.indices().iter().all(|i| pre.contains(*i)));
    }

    #[test]
    fn usqr_output_is_superreduct(t in common::discrete_table(10, 8, 3)) {
        prop_assert!(is_superreduct(&t, &usqr(&t)).unwrap());
    }
}

#[test]
fn pca_select_full_width_returns_everything() {
    let t = DataTable::from_rows(vec![
        vec![1.0, 3.0, 2.0],
        vec![2.0, 1.0, 0.0],
        vec![4.0, 0.0, 1.0],
        vec![0.0, 2.0, 5.0],
    ])
    .unwrap();
    let s = select(Method::Pca, &t, &SelectorConfig::default(), Some(3))
        .unwrap()
        .subset;
    assert_eq!(s.sorted(), vec![0, 1, 2]);
}

#[test]
fn bundled_edr_selections() {
    for (name, k, want) in [
        ("diabetes", 4, "3,4,6,2"),
        ("heart", 4, "2,8,11,1"),
        ("ecoli", 4, "1,5,6,2"),
    ] {
        let t = common::dataset(name).expect("bundled dataset");
        assert_eq!(edr_select(&t, k).unwrap().to_string(), want, "{name}");
    }
}
