use std::collections::BTreeSet;

use cqa_core::solve::{
    alpha_size, enumerate_maximal_is, enumerate_maximum_is, in_all_maximum_is, in_some_maximum_is,
    min_hitting_set, tau,
};
use cqa_core::{Hypergraph, SolveBudget, VertexSet};
use proptest::prelude::*;

fn hypergraph() -> impl Strategy<Value = Hypergraph> {
    (1u32..=9).prop_flat_map(|n| {
        let edge = proptest::collection::btree_set(0..n, 1..=3)
            .prop_map(|e| e.into_iter().collect::<Vec<_>>());
        proptest::collection::vec(edge, 0..=10).prop_map(move |edges| Hypergraph::new(0..n, edges))
    })
}

fn independent_subsets(h: &Hypergraph) -> Vec<VertexSet> {
    let n = h.vertex_count() as u32;
    (0u32..1 << n)
        .map(|m| (0..n).filter(|v| m & (1 << v) != 0).collect::<VertexSet>())
        .filter(|s| h.is_independent(s))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn alpha_plus_tau_is_vertex_count(h in hypergraph()) {
        let b = SolveBudget::default();
        prop_assert_eq!(alpha_size(&h, &b).unwrap() + tau(&h, &b).unwrap(), h.vertex_count());
        let hs = min_hitting_set(&h, h.vertex_count()).unwrap();
        prop_assert_eq!(hs.size, tau(&h, &b).unwrap());
    }

    #[test]
    fn enumerations_match_subset_scan(h in hypergraph()) {
        let b = SolveBudget::default();
        let ind = independent_subsets(&h);
        let maximal: BTreeSet<VertexSet> = ind
            .iter()
            .filter(|s| !ind.iter().any(|t| t.len() > s.len() && s.is_subset(t)))
            .cloned()
            .collect();
        let best = ind.iter().map(BTreeSet::len).max().unwrap();
        let maximum: BTreeSet<VertexSet> = ind.iter().filter(|s| s.len() == best).cloned().collect();
        prop_assert_eq!(enumerate_maximal_is(&h, &b).unwrap().into_iter().collect::<BTreeSet<_>>(), maximal);
        prop_assert_eq!(enumerate_maximum_is(&h, &b).unwrap().into_iter().collect::<BTreeSet<_>>(), maximum.clone());
        for &v in h.vertices() {
            prop_assert_eq!(in_all_maximum_is(&h, v, &b).unwrap(), maximum.iter().all(|s| s.contains(&v)));
            prop_assert_eq!(in_some_maximum_is(&h, v, &b).unwrap(), maximum.iter().any(|s| s.contains(&v)));
        }
    }
}
