//! Graph edit distance: exact search, threshold verification, and cheap
//! upper/lower bounds.
//!
//! All arithmetic happens on integers scaled by [`ScaledCosts::scale`];
//! results are converted back to [`Rational`] at the boundary.

mod bounds;
mod exact;

pub use bounds::{assignment_ub, branch_lb, label_multiset_lb, pair_bounds, BoundConfig};
pub use exact::{exact_ged, exact_ged_with, ged_within, ged_within_with, ExactConfig, ExactOutcome, WithinOutcome};

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::cost::{CostModel, Rational, ScaledCosts};
use crate::error::{Error, Result};
use crate::graph::LabeledGraph;

const NO_EDGE: u32 = u32::MAX;

/// A node mapping from `g1` to `g2`. `None` entries are deletions; `g2`
/// nodes outside the image are insertions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EditMapping {
    pub node_map: Vec<Option<usize>>,
    pub inserted: Vec<usize>,
}

impl EditMapping {
    pub fn from_node_map(node_map: Vec<Option<usize>>, g2_nodes: usize) -> Self {
        let mut hit = vec![false; g2_nodes];
        for t in node_map.iter().flatten() {
            hit[*t] = true;
        }
        let inserted = (0..g2_nodes).filter(|&j| !hit[j]).collect();
        EditMapping { node_map, inserted }
    }

    /// The same edit path read from `g2` to `g1`.
    pub fn inverse(&self, g2_nodes: usize) -> Self {
        let mut back = vec![None; g2_nodes];
        for (i, t) in self.node_map.iter().enumerate() {
            if let Some(j) = t {
                back[*j] = Some(i);
            }
        }
        Self::from_node_map(back, self.node_map.len())
    }

    /// Total over `g1`, injective, and consistent with `inserted`.
    pub fn is_valid_for(&self, g1: &LabeledGraph, g2: &LabeledGraph) -> bool {
        if self.node_map.len() != g1.node_count() {
            return false;
        }
        let mut hit = vec![false; g2.node_count()];
        for t in self.node_map.iter().flatten() {
            if *t >= hit.len() || hit[*t] {
                return false;
            }
            hit[*t] = true;
        }
        let expected: Vec<usize> = (0..hit.len()).filter(|&j| !hit[j]).collect();
        expected == self.inserted
    }
}

/// Cost of the edit path induced by `mapping`.
pub fn induced_cost(
    g1: &LabeledGraph,
    g2: &LabeledGraph,
    cost: &CostModel,
    mapping: &EditMapping,
) -> Result<Rational> {
    if !mapping.is_valid_for(g1, g2) {
        return Err(Error::InvalidArgument("mapping does not fit the graph pair".into()));
    }
    let pair = PairContext::new(g1, g2, cost.scaled()?);
    Ok(pair.costs.to_rational(pair.induced(&mapping.node_map)))
}

/// Both graphs of a pair with labels interned to dense ids and dense
/// adjacency matrices holding edge-label ids.
pub(crate) struct PairContext {
    pub costs: ScaledCosts,
    pub n1: usize,
    pub n2: usize,
    pub node_labels: usize,
    pub edge_labels: usize,
    pub nl1: Vec<u32>,
    pub nl2: Vec<u32>,
    pub adj1: Vec<u32>,
    pub adj2: Vec<u32>,
    pub edges1: Vec<(usize, usize, u32)>,
    pub edges2: Vec<(usize, usize, u32)>,
}

impl PairContext {
    pub fn new(g1: &LabeledGraph, g2: &LabeledGraph, costs: ScaledCosts) -> Self {
        let mut node_ids: HashMap<&str, u32> = HashMap::new();
        let mut edge_ids: HashMap<&str, u32> = HashMap::new();
        let intern = |map: &mut HashMap<_, u32>, s| {
            let next = map.len() as u32;
            *map.entry(s).or_insert(next)
        };
        let nl1 = g1.node_labels.iter().map(|l| intern(&mut node_ids, l.as_str())).collect();
        let nl2 = g2.node_labels.iter().map(|l| intern(&mut node_ids, l.as_str())).collect();
        let (n1, n2) = (g1.node_count(), g2.node_count());
        let mut adj1 = vec![NO_EDGE; n1 * n1];
        let mut adj2 = vec![NO_EDGE; n2 * n2];
        let mut edges1 = Vec::with_capacity(g1.edge_count());
        let mut edges2 = Vec::with_capacity(g2.edge_count());
        for (g, adj, edges, n) in [(g1, &mut adj1, &mut edges1, n1), (g2, &mut adj2, &mut edges2, n2)] {
            for e in &g.edges {
                let l = intern(&mut edge_ids, e.label.as_str());
                adj[e.u * n + e.v] = l;
                adj[e.v * n + e.u] = l;
                edges.push((e.u, e.v, l));
            }
        }
        PairContext {
            costs,
            n1,
            n2,
            node_labels: node_ids.len(),
            edge_labels: edge_ids.len(),
            nl1,
            nl2,
            adj1,
            adj2,
            edges1,
            edges2,
        }
    }

    #[inline]
    pub fn edge1(&self, a: usize, b: usize) -> Option<u32> {
        let l = self.adj1[a * self.n1 + b];
        (l != NO_EDGE).then_some(l)
    }

    #[inline]
    pub fn edge2(&self, a: usize, b: usize) -> Option<u32> {
        let l = self.adj2[a * self.n2 + b];
        (l != NO_EDGE).then_some(l)
    }

    #[inline]
    pub fn node_cost(&self, i: usize, j: usize) -> i64 {
        if self.nl1[i] == self.nl2[j] {
            0
        } else {
            self.costs.node_sub
        }
    }

    #[inline]
    pub fn edge_pair_cost(&self, a: Option<u32>, b: Option<u32>) -> i64 {
        match (a, b) {
            (Some(x), Some(y)) if x == y => 0,
            (Some(_), Some(_)) => self.costs.edge_sub,
            (Some(_), None) => self.costs.edge_del,
            (None, Some(_)) => self.costs.edge_ins,
            (None, None) => 0,
        }
    }

    /// Scaled induced cost of a total node map from `g1`.
    pub fn induced(&self, node_map: &[Option<usize>]) -> i64 {
        let c = &self.costs;
        let mut total = 0;
        let mut mapped = 0;
        for (i, t) in node_map.iter().enumerate() {
            match t {
                Some(j) => {
                    total += self.node_cost(i, *j);
                    mapped += 1;
                }
                None => total += c.node_del,
            }
        }
        total += (self.n2 - mapped) as i64 * c.node_ins;
        let mut matched_edges = 0;
        for &(u, v, l) in &self.edges1 {
            match (node_map[u], node_map[v]) {
                (Some(a), Some(b)) => match self.edge2(a, b) {
                    Some(l2) => {
                        matched_edges += 1;
                        if l2 != l {
                            total += c.edge_sub;
                        }
                    }
                    None => total += c.edge_del,
                },
                _ => total += c.edge_del,
            }
        }
        total += (self.edges2.len() - matched_edges) as i64 * c.edge_ins;
        total
    }

    pub fn node_label_counts(&self) -> (Vec<u32>, Vec<u32>) {
        let mut a = vec![0; self.node_labels];
        let mut b = vec![0; self.node_labels];
        self.nl1.iter().for_each(|&l| a[l as usize] += 1);
        self.nl2.iter().for_each(|&l| b[l as usize] += 1);
        (a, b)
    }

    pub fn edge_label_counts(&self) -> (Vec<u32>, Vec<u32>) {
        let mut a = vec![0; self.edge_labels];
        let mut b = vec![0; self.edge_labels];
        self.edges1.iter().for_each(|e| a[e.2 as usize] += 1);
        self.edges2.iter().for_each(|e| b[e.2 as usize] += 1);
        (a, b)
    }

    /// Per-node histogram of incident edge labels.
    pub fn incident_counts(&self) -> (Vec<Vec<u32>>, Vec<Vec<u32>>) {
        let mut a = vec![vec![0; self.edge_labels]; self.n1];
        let mut b = vec![vec![0; self.edge_labels]; self.n2];
        for &(u, v, l) in &self.edges1 {
            a[u][l as usize] += 1;
            a[v][l as usize] += 1;
        }
        for &(u, v, l) in &self.edges2 {
            b[u][l as usize] += 1;
            b[v][l as usize] += 1;
        }
        (a, b)
    }

    pub fn node_multiset(&self, a: &[u32], b: &[u32]) -> i64 {
        let c = &self.costs;
        c.multiset_cost(a, b, c.node_sub, c.node_del, c.node_ins)
    }

    pub fn edge_multiset(&self, a: &[u32], b: &[u32]) -> i64 {
        let c = &self.costs;
        c.multiset_cost(a, b, c.edge_sub, c.edge_del, c.edge_ins)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::rational;
    use crate::graph::Edge;

    fn path(id: &str, n: usize) -> LabeledGraph {
        LabeledGraph::new(id, vec!["C"; n], (1..n).map(|i| Edge::new(i - 1, i, "1"))).unwrap()
    }

    #[test]
    fn induced_cost_of_identity_is_zero() {
        let g = path("p", 4);
        let m = EditMapping::from_node_map((0..4).map(Some).collect(), 4);
        assert_eq!(induced_cost(&g, &g, &CostModel::unit(), &m).unwrap(), rational(0));
    }

    #[test]
    fn induced_cost_counts_every_edit() {
        let g1 = path("a", 2);
        let g2 = path("b", 3);
        let m = EditMapping::from_node_map(vec![Some(0), Some(1)], 3);
        assert_eq!(m.inserted, vec![2]);
        assert_eq!(induced_cost(&g1, &g2, &CostModel::unit(), &m).unwrap(), rational(2));
        // map onto the two path ends: edge (0,2) does not exist in g2
        let m = EditMapping::from_node_map(vec![Some(0), Some(2)], 3);
        assert_eq!(induced_cost(&g1, &g2, &CostModel::unit(), &m).unwrap(), rational(4));
        let m = EditMapping::from_node_map(vec![None, None], 3);
        assert_eq!(induced_cost(&g1, &g2, &CostModel::unit(), &m).unwrap(), rational(8));
    }

    #[test]
    fn rejects_non_injective_mapping() {
        let g = path("p", 2);
        let m = EditMapping { node_map: vec![Some(0), Some(0)], inserted: vec![1] };
        assert!(induced_cost(&g, &g, &CostModel::unit(), &m).is_err());
    }

    #[test]
    fn inverse_round_trips() {
        let m = EditMapping::from_node_map(vec![Some(2), None, Some(0)], 4);
        let inv = m.inverse(4);
        assert_eq!(inv.node_map, vec![Some(2), None, Some(0), None]);
        assert_eq!(inv.inserted, vec![1]);
        assert_eq!(inv.inverse(3), m);
    }
}
