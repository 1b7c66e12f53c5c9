use proptest::prelude::*;
use rgspec_core::spectrum::{exact_spectrum, DEFAULT_BUDGET};
use rgspec_core::walker::*;
use rgspec_core::{Graph, VertexSet};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn degree_interval_matches_spectrum(n in 2usize..=13, p in 0.1f64..0.9, s in any::<u64>()) {
        let g = Graph::gnp(n, p, s).unwrap();
        let (start, len) = degree_interval(&g);
        let sp = exact_spectrum(&g, n - 1, DEFAULT_BUDGET).unwrap();
        // Dropping v leaves e(G) - deg(v) edges.
        let mut degs: Vec<u64> = sp.counts.iter().map(|c| g.edge_count() - c).collect();
        degs.sort_unstable();
        prop_assert_eq!(len, sp.mu);
        let run = rgspec_core::spectrum::longest_run(&degs).unwrap();
        prop_assert_eq!(len, run.1);
        prop_assert!(degs.contains(&start));
    }

    #[test]
    fn neighbor_search_hits_are_exact(n in 4usize..60, s in any::<u64>(), mask in any::<u64>()) {
        let g = Graph::gnp(n, 0.5, s).unwrap();
        let set: VertexSet = (0..n).filter(|&i| i < 64 && mask >> i & 1 == 1).take(n - 1).collect();
        let targets: Vec<i64> = (-1..n as i64 + 1).collect();
        let hits = exact_neighbor_search(&g, &set, &targets).unwrap();
        let rest = set.complement(n);
        for (t, h) in targets.iter().zip(hits) {
            let qualifying = rest.iter().find(|&z| {
                rest.iter().filter(|&w| g.has_edge(z, w)).count() as i64 == *t
            });
            prop_assert_eq!(h, qualifying);
        }
    }

    #[test]
    fn mu_bound_is_certified_on_small_graphs(n in 5usize..=12, s in any::<u64>(), k in 1usize..12) {
        let g = Graph::gnp(n, 0.5, s).unwrap();
        let k = k.min(n - 1);
        let est = mu_lower_bound(&g, k, 0.5, &WalkerConfig::default()).unwrap();
        prop_assert_eq!(est.method, MuMethod::Exact);
        prop_assert_eq!(est.mu_lower, exact_spectrum(&g, k, DEFAULT_BUDGET).unwrap().mu);
    }
}

fn recount_chain(chain: &WalkChain, value: impl Fn(&VertexSet) -> i64) {
    for step in &chain.steps {
        assert_eq!(step.set.len(), chain.k);
        assert_eq!(step.value, value(&step.set));
    }
    let gap = chain
        .steps
        .windows(2)
        .map(|w| w[0].value.abs_diff(w[1].value))
        .max()
        .unwrap_or(0);
    assert_eq!(gap, chain.max_step_gap);
}

#[test]
fn removal_chain_recounts() {
    for seed in 0..3 {
        let g = Graph::gnp(600, 0.5, seed).unwrap();
        let rc = removal_chain(&g, 450, 0.5, &WalkerConfig::default()).unwrap();
        assert_eq!(rc.chain.k, 450 + 14);
        recount_chain(&rc.chain, |s| g.induced_edges(s).unwrap() as i64);
        assert!(rc.strict_ok <= rc.slack_ok);
        let values = fill_gaps(&g, &rc.chain).unwrap();
        for w in rc.chain.steps.windows(2) {
            let (hi, lo) = (w[0].value.max(w[1].value) as u64, w[0].value.min(w[1].value) as u64);
            if rc.success {
                assert!((lo..=hi).all(|v| values.binary_search(&v).is_ok()));
            }
        }
    }
}

#[test]
fn degree_walk_recounts_and_descends() {
    for seed in 0..3 {
        let g = Graph::gnp(800, 0.5, seed).unwrap();
        let w = degree_walk(&g, 3, 0.5).unwrap();
        recount_chain(&w.chain, |s| g.set_degree(s).unwrap() as i64);
        assert!(w.chain.steps.windows(2).all(|p| p[1].value <= p[0].value));
        assert!(w.delta0.windows(2).all(|p| p[1] <= p[0]));
        let n = 800f64;
        let cap = n.powf(0.25) * n.ln() * n.ln();
        assert!(w.delta0.windows(2).all(|p| (p[0] - p[1]).abs() < cap));
    }
}

#[test]
fn multiplicity_report_is_consistent() {
    let g = Graph::gnp(1000, 0.5, 1).unwrap();
    let r = degree_multiplicity_check(&g, 0.5).unwrap();
    let total: usize = r.counts.iter().map(|c| c.1).sum();
    assert!(total <= 1000);
    for (d, c) in &r.counts {
        assert_eq!(*c, g.degrees().iter().filter(|&&x| x as i64 == *d).count());
        assert_eq!(r.flagged.contains(d), *c < r.threshold);
    }
    let empty = Graph::empty(100).unwrap();
    let r = degree_multiplicity_check(&empty, 0.5).unwrap();
    assert_eq!(r.flagged.len(), r.counts.len());
}
