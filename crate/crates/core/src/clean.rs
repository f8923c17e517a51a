//! Removal of unclean edges.
//!
//! An edge `e` of `H` is clean when `wt(T_H(e)) >= epsilon * wt(e)`. Removal
//! only ever lowers the incident triangle weight of other edges, so an edge
//! that becomes unclean stays unclean; the exact mode therefore reaches the
//! unique largest clean subgraph.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::EdgeId;
use crate::index::{EdgeUpdate, TriangleIndex};
use crate::sum::CompensatedSum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CleanMode {
    /// Worklist cleaning to a fixpoint.
    Exact,
    /// A bounded number of sweeps against weights frozen at sweep start.
    Passes,
}

impl std::str::FromStr for CleanMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(CleanMode::Exact),
            "passes" => Ok(CleanMode::Passes),
            other => Err(Error::Config(format!("unknown clean mode {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CleanConfig {
    pub epsilon: f64,
    pub mode: CleanMode,
    pub max_passes: usize,
}

impl Default for CleanConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.1,
            mode: CleanMode::Exact,
            max_passes: 3,
        }
    }
}

impl CleanConfig {
    pub fn exact(epsilon: f64) -> Self {
        Self {
            epsilon,
            mode: CleanMode::Exact,
            ..Self::default()
        }
    }

    pub fn passes(epsilon: f64, max_passes: usize) -> Self {
        Self {
            epsilon,
            mode: CleanMode::Passes,
            max_passes,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Config(format!(
                "epsilon must lie in (0, 1), got {}",
                self.epsilon
            )));
        }
        if self.max_passes == 0 {
            return Err(Error::Config("max_passes must be at least 1".into()));
        }
        Ok(())
    }
}

/// Running totals for everything cleaning has destroyed.
#[derive(Clone, Debug, Default)]
pub struct CleanLedger {
    edges_removed: usize,
    triangle_weight: CompensatedSum,
    edge_weight: CompensatedSum,
    /// Largest `destroyed / (epsilon * wt(e))` seen on a single removal.
    worst_removal_ratio: f64,
}

impl CleanLedger {
    pub fn edges_removed(&self) -> usize {
        self.edges_removed
    }

    /// Weight of triangles destroyed by cleaning (`wt(T_C)`).
    pub fn triangle_weight_removed(&self) -> f64 {
        self.triangle_weight.value()
    }

    pub fn edge_weight_removed(&self) -> f64 {
        self.edge_weight.value()
    }

    pub fn worst_removal_ratio(&self) -> f64 {
        self.worst_removal_ratio
    }
}

#[inline]
pub fn is_unclean(index: &TriangleIndex<'_>, e: EdgeId, epsilon: f64) -> bool {
    index.tri_weight(e) < epsilon * index.graph().edge_weight(e)
}

fn remove(
    index: &mut TriangleIndex<'_>,
    e: EdgeId,
    epsilon: f64,
    ledger: &mut CleanLedger,
    updates: &mut Vec<EdgeUpdate>,
) {
    let wt = index.graph().edge_weight(e);
    let mut destroyed = CompensatedSum::new();
    if index.delete_edge_with(e, &mut |_, w| destroyed.add(w), updates) {
        let destroyed = destroyed.value();
        ledger.edges_removed += 1;
        ledger.triangle_weight.add(destroyed);
        ledger.edge_weight.add(wt);
        let ratio = destroyed / (epsilon * wt);
        ledger.worst_removal_ratio = ledger.worst_removal_ratio.max(ratio);
        debug_assert!(
            ratio <= 1.0 + 1e-9,
            "removal of edge {e} destroyed {destroyed} >= eps * wt(e)"
        );
    }
}

/// Worklist cleaning over every live edge.
pub fn clean_exact(index: &mut TriangleIndex<'_>, config: &CleanConfig, ledger: &mut CleanLedger) {
    let seeds: Vec<EdgeId> = index.live_edges().collect();
    clean_exact_from(index, config, ledger, seeds);
}

/// Worklist cleaning where only `candidates` (and whatever their removal
/// touches) can be unclean. Candidates are examined in ascending id order;
/// edges that become unclean are appended in discovery order.
pub fn clean_exact_from(
    index: &mut TriangleIndex<'_>,
    config: &CleanConfig,
    ledger: &mut CleanLedger,
    mut candidates: Vec<EdgeId>,
) {
    let eps = config.epsilon;
    candidates.sort_unstable();
    candidates.dedup();
    let mut queued = vec![false; index.graph().edge_count()];
    let mut worklist: VecDeque<EdgeId> = VecDeque::new();
    for e in candidates {
        if index.is_edge_live(e) && is_unclean(index, e, eps) {
            queued[e as usize] = true;
            worklist.push_back(e);
        }
    }
    let mut updates = Vec::new();
    while let Some(e) = worklist.pop_front() {
        updates.clear();
        remove(index, e, eps, ledger, &mut updates);
        for u in &updates {
            let ei = u.edge as usize;
            if !queued[ei] && index.is_edge_live(u.edge) && is_unclean(index, u.edge, eps) {
                queued[ei] = true;
                worklist.push_back(u.edge);
            }
        }
    }
}

/// Up to `max_passes` sweeps. Each sweep selects the unclean edges using the
/// weights as they stood when the sweep began, then removes them in id order.
/// Stops early once a sweep finds nothing; returns the number of sweeps that
/// removed at least one edge.
pub fn clean_passes(index: &mut TriangleIndex<'_>, config: &CleanConfig, ledger: &mut CleanLedger) -> usize {
    let eps = config.epsilon;
    let mut productive = 0;
    let mut updates = Vec::new();
    for _ in 0..config.max_passes {
        let unclean: Vec<EdgeId> = index.live_edges().filter(|&e| is_unclean(index, e, eps)).collect();
        if unclean.is_empty() {
            break;
        }
        productive += 1;
        for e in unclean {
            updates.clear();
            remove(index, e, eps, ledger, &mut updates);
        }
    }
    productive
}

/// Dispatches on `config.mode`.
pub fn clean(index: &mut TriangleIndex<'_>, config: &CleanConfig, ledger: &mut CleanLedger) {
    match config.mode {
        CleanMode::Exact => clean_exact(index, config, ledger),
        CleanMode::Passes => {
            clean_passes(index, config, ledger);
        }
    }
}

/// Live edges that fail the clean test when recomputed exactly.
pub fn unclean_edges_exact(index: &TriangleIndex<'_>, epsilon: f64) -> Vec<EdgeId> {
    index
        .live_edges()
        .filter(|&e| index.exact_tri_weight(e) < epsilon * index.graph().edge_weight(e))
        .collect()
}
