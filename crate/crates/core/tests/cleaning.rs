mod common;

use std::collections::BTreeSet;

use common::{gnp, planted, rng};
use rand::Rng;
use triadic::clean::{clean, clean_exact, clean_passes, unclean_edges_exact};
use triadic::graph::EdgeId;
use triadic::{enumerate_triangles, CleanConfig, CleanLedger, Graph, TriangleIndex};

/// Largest clean edge set, found by removing every unclean edge at once
/// until none remains, with triangle weights recomputed from scratch.
fn naive_clean(g: &Graph, eps: f64) -> (BTreeSet<EdgeId>, f64) {
    let tris = enumerate_triangles(g);
    let mut live: BTreeSet<EdgeId> = (0..g.edge_count() as EdgeId).collect();
    let mut destroyed = 0.0;
    loop {
        let alive = |t: &triadic::Triangle, live: &BTreeSet<EdgeId>| {
            t.pairs().iter().all(|&(a, b)| live.contains(&g.edge_id(a, b).unwrap()))
        };
        let mut weight = vec![0.0; g.edge_count()];
        for t in tris.iter().filter(|t| alive(t, &live)) {
            for (a, b) in t.pairs() {
                weight[g.edge_id(a, b).unwrap() as usize] += t.weight(g);
            }
        }
        let bad: Vec<EdgeId> = live
            .iter()
            .copied()
            .filter(|&e| weight[e as usize] < eps * g.edge_weight(e))
            .collect();
        if bad.is_empty() {
            return (live, destroyed);
        }
        let before: Vec<_> = tris.iter().filter(|t| alive(t, &live)).copied().collect();
        for e in bad {
            live.remove(&e);
        }
        destroyed += before
            .iter()
            .filter(|t| !alive(t, &live))
            .map(|t| t.weight(g))
            .sum::<f64>();
    }
}

fn graphs(seed: u64, count: usize) -> Vec<Graph> {
    let mut r = rng(seed);
    (0..count)
        .map(|i| match i % 3 {
            0 => gnp(r.gen_range(8..24), r.gen_range(0.1..0.6), &mut r),
            1 => planted(r.gen_range(2..6), 9, r.gen_range(0.2..1.5), &mut r),
            _ => planted(r.gen_range(3..8), 6, 0.3, &mut r),
        })
        .collect()
}

#[test]
fn exact_cleaning_reaches_the_naive_fixpoint() {
    for (i, g) in graphs(10, 80).iter().enumerate() {
        for eps in [0.07, 0.13, 0.29, 0.47] {
            let mut idx = TriangleIndex::build(g, enumerate_triangles(g)).unwrap();
            let mut ledger = CleanLedger::default();
            clean_exact(&mut idx, &CleanConfig::exact(eps), &mut ledger);
            let (expected, destroyed) = naive_clean(g, eps);
            let got: BTreeSet<EdgeId> = idx.live_edges().collect();
            assert_eq!(got, expected, "graph {i} eps {eps}");
            assert!((ledger.triangle_weight_removed() - destroyed).abs() <= 1e-12);
            assert!(unclean_edges_exact(&idx, eps).is_empty());
            assert!(ledger.triangle_weight_removed() <= eps * ledger.edge_weight_removed() + 1e-15);
        }
    }
}

#[test]
fn unbounded_passes_match_exact_mode() {
    for g in graphs(11, 60) {
        for eps in [0.13, 0.29] {
            let mut exact = TriangleIndex::build(&g, enumerate_triangles(&g)).unwrap();
            clean_exact(&mut exact, &CleanConfig::exact(eps), &mut CleanLedger::default());
            let mut passes = TriangleIndex::build(&g, enumerate_triangles(&g)).unwrap();
            clean_passes(
                &mut passes,
                &CleanConfig::passes(eps, usize::MAX),
                &mut CleanLedger::default(),
            );
            assert_eq!(
                exact.live_edges().collect::<Vec<_>>(),
                passes.live_edges().collect::<Vec<_>>()
            );
        }
    }
}

#[test]
fn passes_mode_never_removes_more_than_exact() {
    for g in graphs(12, 40) {
        let mut exact = TriangleIndex::build(&g, enumerate_triangles(&g)).unwrap();
        clean(&mut exact, &CleanConfig::exact(0.2), &mut CleanLedger::default());
        for budget in 1..4 {
            let mut passes = TriangleIndex::build(&g, enumerate_triangles(&g)).unwrap();
            clean(
                &mut passes,
                &CleanConfig::passes(0.2, budget),
                &mut CleanLedger::default(),
            );
            assert!(exact.live_edges().all(|e| passes.is_edge_live(e)));
        }
    }
}

#[test]
fn per_removal_destruction_stays_below_threshold() {
    for g in graphs(13, 40) {
        let mut idx = TriangleIndex::build(&g, enumerate_triangles(&g)).unwrap();
        let mut ledger = CleanLedger::default();
        clean_exact(&mut idx, &CleanConfig::exact(0.3), &mut ledger);
        assert!(ledger.worst_removal_ratio() < 1.0 + 1e-12);
    }
}
