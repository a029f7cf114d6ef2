mod common;

use meta_unsup::clusterers::{agglomerative, single_linkage_threshold, Linkage};
use meta_unsup::data_model::{Partition, WeightedGraph};
use meta_unsup::erm_meta::{fit_threshold_bruteforce, fit_threshold_kruskal};
use meta_unsup::metrics::clustering_loss;
use meta_unsup::seed::rng;
use proptest::prelude::*;
use rand::Rng as _;

fn refines(fine: &Partition, coarse: &Partition) -> bool {
    let c = coarse.membership();
    fine.parts().iter().all(|p| p.iter().all(|&i| c[i] == c[p[0]]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn kruskal_equals_bruteforce(seed in any::<u64>()) {
        let mut r = rng(seed);
        let train = common::random_collection(&mut r, 8, 20);
        let fast = fit_threshold_kruskal(&train).unwrap();
        let slow = fit_threshold_bruteforce(&train).unwrap();
        prop_assert_eq!(&fast, &slow);
        let min = fast.profile.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        prop_assert_eq!(fast.min_mean_loss, min);
        let first = fast.profile.iter().find(|p| p.1 == min).unwrap().0;
        prop_assert_eq!(fast.r_star, first);
    }

    #[test]
    fn profile_matches_graph_search(seed in any::<u64>()) {
        let mut r = rng(seed);
        let train = common::random_collection(&mut r, 4, 12);
        let fit = fit_threshold_kruskal(&train).unwrap();
        for &(t, loss) in &fit.profile {
            let mean = train
                .iter()
                .map(|(g, y)| common::pair_loss(g.n_vertices(), y, &Partition::from_assignment(&common::threshold_components(g, t, false))))
                .sum::<f64>()
                / train.len() as f64;
            prop_assert!((mean - loss).abs() < 1e-12);
        }
    }

    #[test]
    fn threshold_is_monotone(seed in any::<u64>(), a in 0.0f64..3.0, b in 0.0f64..3.0) {
        let mut r = rng(seed);
        let n = r.random_range(2..20);
        let g = common::random_graph(&mut r, n);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(refines(&single_linkage_threshold(&g, lo, false), &single_linkage_threshold(&g, hi, false)));
        prop_assert!(refines(&single_linkage_threshold(&g, lo, true), &single_linkage_threshold(&g, lo, false)));
    }

    #[test]
    fn consistency_perturbation(seed in any::<u64>(), r0 in 0.5f64..2.5) {
        let mut r = rng(seed);
        let n = r.random_range(2..20);
        let g = common::random_graph(&mut r, n);
        let out = single_linkage_threshold(&g, r0, false);
        let m = out.membership();
        let perturbed = g
            .map_weights(|u, v, w| if m[u] == m[v] { w * r.random_range(0.0..=1.0) } else { w * r.random_range(1.0..4.0) })
            .unwrap();
        prop_assert!(single_linkage_threshold(&perturbed, r0, false).same_clustering(&out));
    }

    #[test]
    fn richness_construction(seed in any::<u64>(), r0 in 0.1f64..10.0) {
        let mut r = rng(seed);
        let n = r.random_range(1..16);
        let k = r.random_range(1..=n);
        let target = Partition::from_assignment(&common::surjective_labels(&mut r, n, k));
        let m = target.membership();
        let g = WeightedGraph::complete_from_fn(n, |u, v| {
            if m[u] == m[v] { r0 * r.random_range(0.0..0.99) } else { r0 * r.random_range(1.01..3.0) }
        })
        .unwrap();
        prop_assert!(single_linkage_threshold(&g, r0, false).same_clustering(&target));
    }
}

#[test]
fn single_linkage_agrees_with_threshold_at_merge_heights() {
    let mut r = rng(11);
    for _ in 0..60 {
        let n = r.random_range(3..30);
        let x = common::random_points(&mut r, n, 2);
        let g = WeightedGraph::complete_from_points(&x);
        let mut weights: Vec<f64> = g.edges().iter().map(|e| e.2).collect();
        weights.sort_by(f64::total_cmp);
        // weights at which the component count drops, from n parts down to 1
        let mut merges = Vec::new();
        let mut parts = n;
        for &w in &weights {
            let c = common::threshold_components(&g, w, false);
            let now = c.iter().max().unwrap() + 1;
            if now < parts {
                merges.push(w);
                parts = now;
            }
        }
        for k in 2..n.min(6) {
            let agg = agglomerative(&x, k, Linkage::Single).unwrap().partition;
            let cut = merges[n - k];
            assert!(single_linkage_threshold(&g, cut, true).same_clustering(&agg));
        }
    }
}

#[test]
fn path_example_profile() {
    let g = WeightedGraph::new(4, vec![(0, 1, 1.0), (1, 2, 1.0), (2, 3, 5.0)]).unwrap();
    let y = Partition::new(4, vec![vec![0, 1, 2], vec![3]]).unwrap();
    let fit = fit_threshold_kruskal(&[(g.clone(), y.clone())]).unwrap();
    assert_eq!(fit.profile, vec![(0.5, 0.5), (1.0, 0.0), (5.0, 1.0)]);
    assert_eq!(fit.r_star, 1.0);
    let twice = fit_threshold_kruskal(&[(g.clone(), y.clone()), (g.clone(), y.clone())]).unwrap();
    assert_eq!(twice, fit);
    let whole = single_linkage_threshold(&g, 5.0, false);
    assert_eq!(clustering_loss(4, &y, &whole), 1.0);
}
