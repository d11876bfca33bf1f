//! Depth-first branch and bound over node mappings.
//!
//! Nodes of `g1` are processed in descending degree order. At every partial
//! mapping the remaining cost is bounded below by the larger of two
//! admissible estimates over the unprocessed `g1` part and the unused `g2`
//! part: the label-multiset distance (nodes, plus every edge with at least
//! one endpoint still open), and an anchor-aware assignment bound that
//! prices edges into the already mapped part exactly. The assignment bound
//! is only solved for children the multiset bound fails to prune. Surviving children are tried in
//! ascending order of the combined estimate, which does not depend on the
//! pruning cutoff, so threshold verification walks a subsequence of the
//! exact search's traversal.

use serde::{Deserialize, Serialize};

use super::bounds::upper_scaled;
use super::{EditMapping, PairContext};
use crate::cost::{CostModel, Rational};
use crate::error::{Error, Result};
use crate::graph::LabeledGraph;
use crate::lsap::min_total_rect;

/// Seed refinement used for the initial incumbent of the exact search.
const SEED_PASSES: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactConfig {
    /// Largest node count either graph may have.
    pub node_cap: usize,
}

impl Default for ExactConfig {
    fn default() -> Self {
        ExactConfig { node_cap: 16 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactOutcome {
    pub distance: Rational,
    pub mapping: EditMapping,
    /// Partial mappings entered by the search.
    pub expanded: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WithinOutcome {
    pub within: bool,
    pub expanded: u64,
}

pub fn exact_ged(g1: &LabeledGraph, g2: &LabeledGraph, cost: &CostModel) -> Result<(Rational, EditMapping)> {
    let out = exact_ged_with(g1, g2, cost, &ExactConfig::default())?;
    Ok((out.distance, out.mapping))
}

pub fn exact_ged_with(
    g1: &LabeledGraph,
    g2: &LabeledGraph,
    cost: &CostModel,
    config: &ExactConfig,
) -> Result<ExactOutcome> {
    guard(g1, g2, config)?;
    let pair = PairContext::new(g1, g2, cost.scaled()?);
    let (seed_cost, seed_map) = upper_scaled(&pair, SEED_PASSES);
    let mut search = Search::new(&pair);
    let mut best = Incumbent { cost: seed_cost, map: seed_map };
    search.minimize(0, 0, &mut best);
    Ok(ExactOutcome {
        distance: pair.costs.to_rational(best.cost),
        mapping: EditMapping::from_node_map(best.map, pair.n2),
        expanded: search.expanded,
    })
}

/// True iff GED ≤ `threshold`.
pub fn ged_within(g1: &LabeledGraph, g2: &LabeledGraph, threshold: Rational, cost: &CostModel) -> Result<bool> {
    Ok(ged_within_with(g1, g2, threshold, cost, &ExactConfig::default())?.within)
}

/// Threshold verification. Runs the same traversal as
/// [`exact_ged_with`] but prunes against the threshold and stops at the
/// first mapping within it, so it never enters a partial mapping the exact
/// search would skip.
pub fn ged_within_with(
    g1: &LabeledGraph,
    g2: &LabeledGraph,
    threshold: Rational,
    cost: &CostModel,
    config: &ExactConfig,
) -> Result<WithinOutcome> {
    if threshold < Rational::from_integer(0) {
        return Err(Error::NegativeRadius);
    }
    guard(g1, g2, config)?;
    let pair = PairContext::new(g1, g2, cost.scaled()?);
    let (seed_cost, _) = upper_scaled(&pair, SEED_PASSES);
    let limit = pair.costs.floor_scaled(threshold);
    if seed_cost <= limit {
        return Ok(WithinOutcome { within: true, expanded: 0 });
    }
    let mut search = Search::new(&pair);
    let within = search.within(0, 0, limit);
    Ok(WithinOutcome { within, expanded: search.expanded })
}

fn guard(g1: &LabeledGraph, g2: &LabeledGraph, config: &ExactConfig) -> Result<()> {
    let nodes = g1.node_count().max(g2.node_count());
    if nodes > config.node_cap {
        return Err(Error::ResourceGuard { nodes, cap: config.node_cap });
    }
    Ok(())
}

struct Incumbent {
    cost: i64,
    map: Vec<Option<usize>>,
}

struct Search<'a> {
    pair: &'a PairContext,
    order: Vec<usize>,
    map: Vec<Option<usize>>,
    used: Vec<bool>,
    rem_nodes1: Vec<u32>,
    rem_nodes2: Vec<u32>,
    open_edges1: Vec<u32>,
    open_edges2: Vec<u32>,
    unused2: usize,
    expanded: u64,
    /// `position[i]` is the depth at which `g1` node `i` is assigned.
    position: Vec<usize>,
    scratch: Vec<i64>,
}

impl<'a> Search<'a> {
    fn new(pair: &'a PairContext) -> Self {
        let mut deg = vec![0usize; pair.n1];
        for &(u, v, _) in &pair.edges1 {
            deg[u] += 1;
            deg[v] += 1;
        }
        let mut order: Vec<usize> = (0..pair.n1).collect();
        order.sort_by_key(|&i| (std::cmp::Reverse(deg[i]), i));
        let mut position = vec![0; pair.n1];
        for (d, &i) in order.iter().enumerate() {
            position[i] = d;
        }
        let (rem_nodes1, rem_nodes2) = pair.node_label_counts();
        let (open_edges1, open_edges2) = pair.edge_label_counts();
        Search {
            pair,
            order,
            map: vec![None; pair.n1],
            used: vec![false; pair.n2],
            rem_nodes1,
            rem_nodes2,
            open_edges1,
            open_edges2,
            unused2: pair.n2,
            expanded: 0,
            position,
            scratch: Vec::new(),
        }
    }

    fn remaining(&self) -> i64 {
        self.pair.node_multiset(&self.rem_nodes1, &self.rem_nodes2)
            + self.pair.edge_multiset(&self.open_edges1, &self.open_edges2)
    }

    /// Anchor-aware bound over nodes still open after `depth` is assigned.
    ///
    /// Edges from an open node to an already mapped one are priced exactly
    /// for each candidate target; edges with both endpoints open are priced
    /// at half their incident-label multiset cost on each side. Open nodes
    /// are then matched by a rectangular assignment over the gain of
    /// substituting instead of deleting and inserting.
    fn anchored_remaining(&mut self, depth: usize) -> i64 {
        let p = self.pair;
        let c = &p.costs;
        let done = &self.order[..=depth];
        let rows: Vec<usize> = self.order[depth + 1..].to_vec();
        let cols: Vec<usize> = (0..p.n2).filter(|&a| !self.used[a]).collect();

        // histograms of edges whose both endpoints are open
        let open_hist = |n: usize, labels: usize, edges: &[(usize, usize, u32)], open: &dyn Fn(usize) -> bool| {
            let mut h = vec![vec![0u32; labels]; n];
            for &(u, v, l) in edges {
                if open(u) && open(v) {
                    h[u][l as usize] += 1;
                    h[v][l as usize] += 1;
                }
            }
            h
        };
        let hist1 = open_hist(p.n1, p.edge_labels, &p.edges1, &|u| self.position[u] > depth);
        let hist2 = open_hist(p.n2, p.edge_labels, &p.edges2, &|a| !self.used[a]);
        let hdeg = |h: &[u32]| h.iter().sum::<u32>() as i64;
        let del: Vec<i64> = rows
            .iter()
            .map(|&i| {
                c.node_del
                    + done.iter().filter(|&&j| p.edge1(i, j).is_some()).count() as i64 * c.edge_del
                    + hdeg(&hist1[i]) * c.edge_del / 2
            })
            .collect();
        let ins: Vec<i64> = cols
            .iter()
            .map(|&a| {
                let anchored = done.iter().filter_map(|&j| self.map[j]).filter(|&b| p.edge2(a, b).is_some()).count();
                c.node_ins + anchored as i64 * c.edge_ins + hdeg(&hist2[a]) * c.edge_ins / 2
            })
            .collect();
        let mut total: i64 = del.iter().sum::<i64>() + ins.iter().sum::<i64>();

        let (r, k) = (rows.len(), cols.len());
        if r > 0 && k > 0 {
            let transpose = r > k;
            let (nr, nc) = if transpose { (k, r) } else { (r, k) };
            self.scratch.clear();
            self.scratch.resize(nr * nc, 0);
            for (x, &i) in rows.iter().enumerate() {
                for (y, &a) in cols.iter().enumerate() {
                    let mut cost = p.node_cost(i, a) + p.edge_multiset(&hist1[i], &hist2[a]) / 2;
                    for &j in done {
                        let e2 = self.map[j].and_then(|b| p.edge2(a, b));
                        cost += p.edge_pair_cost(p.edge1(i, j), e2);
                    }
                    // matching is only worth it below delete-plus-insert
                    let gain = (cost - del[x] - ins[y]).min(0);
                    let at = if transpose { y * nc + x } else { x * nc + y };
                    self.scratch[at] = gain;
                }
            }
            total += min_total_rect(&self.scratch, nr, nc);
        }

        total
    }

    /// Maps `order[depth]` to `target` and returns the cost this resolves.
    fn assign(&mut self, depth: usize, target: Option<usize>) -> i64 {
        let p = self.pair;
        let i = self.order[depth];
        self.rem_nodes1[p.nl1[i] as usize] -= 1;
        let mut delta = match target {
            Some(a) => {
                self.rem_nodes2[p.nl2[a] as usize] -= 1;
                self.used[a] = true;
                self.unused2 -= 1;
                p.node_cost(i, a)
            }
            None => p.costs.node_del,
        };
        for &j in &self.order[..depth] {
            let e1 = p.edge1(i, j);
            if let Some(l) = e1 {
                self.open_edges1[l as usize] -= 1;
            }
            let e2 = match (target, self.map[j]) {
                (Some(a), Some(b)) => p.edge2(a, b),
                _ => None,
            };
            if let Some(l) = e2 {
                self.open_edges2[l as usize] -= 1;
            }
            delta += p.edge_pair_cost(e1, e2);
        }
        self.map[i] = target;
        delta
    }

    fn unassign(&mut self, depth: usize) {
        let p = self.pair;
        let i = self.order[depth];
        let target = self.map[i].take();
        self.rem_nodes1[p.nl1[i] as usize] += 1;
        if let Some(a) = target {
            self.rem_nodes2[p.nl2[a] as usize] += 1;
            self.used[a] = false;
            self.unused2 += 1;
        }
        for &j in &self.order[..depth] {
            if let Some(l) = p.edge1(i, j) {
                self.open_edges1[l as usize] += 1;
            }
            if let (Some(a), Some(b)) = (target, self.map[j]) {
                if let Some(l) = p.edge2(a, b) {
                    self.open_edges2[l as usize] += 1;
                }
            }
        }
    }

    /// Children whose estimate `g + h` is below `cutoff`, as
    /// `(g + h, g, target)`, best first.
    fn children(&mut self, depth: usize, cost_so_far: i64, cutoff: i64) -> Vec<(i64, i64, Option<usize>)> {
        let mut out = Vec::with_capacity(self.unused2 + 1);
        let targets: Vec<Option<usize>> =
            (0..self.pair.n2).filter(|&a| !self.used[a]).map(Some).chain(std::iter::once(None)).collect();
        for t in targets {
            let g = cost_so_far + self.assign(depth, t);
            let mut f = g + self.remaining();
            if f < cutoff && depth + 1 < self.order.len() {
                f = f.max(g + self.anchored_remaining(depth));
            }
            self.unassign(depth);
            if f < cutoff {
                out.push((f, g, t));
            }
        }
        // stable: ties keep ascending target order with deletion last
        out.sort_by_key(|c| c.0);
        out
    }

    /// At a complete mapping the remaining bound is exact: only insertions
    /// of unused `g2` nodes and open `g2` edges are left.
    fn minimize(&mut self, depth: usize, cost_so_far: i64, best: &mut Incumbent) {
        if depth == self.order.len() {
            let total = cost_so_far + self.remaining();
            if total < best.cost {
                best.cost = total;
                best.map.clone_from(&self.map);
            }
            return;
        }
        for (f, g, t) in self.children(depth, cost_so_far, best.cost) {
            if f >= best.cost {
                break;
            }
            self.expanded += 1;
            self.assign(depth, t);
            self.minimize(depth + 1, g, best);
            self.unassign(depth);
        }
    }

    fn within(&mut self, depth: usize, cost_so_far: i64, limit: i64) -> bool {
        if depth == self.order.len() {
            return cost_so_far + self.remaining() <= limit;
        }
        for (_, g, t) in self.children(depth, cost_so_far, limit + 1) {
            self.expanded += 1;
            self.assign(depth, t);
            let hit = self.within(depth + 1, g, limit);
            self.unassign(depth);
            if hit {
                return true;
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::rational;
    use crate::ged::induced_cost;
    use crate::graph::Edge;

    fn graph(nodes: &[&str], edges: &[(usize, usize)]) -> LabeledGraph {
        LabeledGraph::new("g", nodes.iter().copied(), edges.iter().map(|&(u, v)| Edge::new(u, v, "1"))).unwrap()
    }

    #[test]
    fn identity_is_zero() {
        let g = graph(&["C", "N", "O", "C"], &[(0, 1), (1, 2), (2, 3), (0, 3)]);
        let (d, m) = exact_ged(&g, &g, &CostModel::unit()).unwrap();
        assert_eq!(d, rational(0));
        assert_eq!(induced_cost(&g, &g, &CostModel::unit(), &m).unwrap(), rational(0));
        assert!(ged_within(&g, &g, rational(0), &CostModel::unit()).unwrap());
    }

    #[test]
    fn empty_to_three_nodes_two_edges() {
        let e = LabeledGraph::empty("e");
        let g = graph(&["C", "C", "C"], &[(0, 1), (1, 2)]);
        assert_eq!(exact_ged(&e, &g, &CostModel::unit()).unwrap().0, rational(5));
        assert_eq!(exact_ged(&g, &e, &CostModel::unit()).unwrap().0, rational(5));
        assert!(!ged_within(&e, &g, rational(4), &CostModel::unit()).unwrap());
        assert!(ged_within(&e, &g, rational(5), &CostModel::unit()).unwrap());
    }

    #[test]
    fn short_paths() {
        let p2 = graph(&["C", "C"], &[(0, 1)]);
        let p3 = graph(&["C", "C", "C"], &[(0, 1), (1, 2)]);
        assert_eq!(exact_ged(&p2, &p3, &CostModel::unit()).unwrap().0, rational(2));
        assert!(ged_within(&p2, &p3, rational(2), &CostModel::unit()).unwrap());
        assert!(!ged_within(&p2, &p3, Rational::new(3, 2), &CostModel::unit()).unwrap());
    }

    #[test]
    fn resource_guard() {
        let big = graph(&["C"; 17], &[]);
        let small = graph(&["C"], &[]);
        assert!(matches!(
            exact_ged(&big, &small, &CostModel::unit()),
            Err(Error::ResourceGuard { nodes: 17, cap: 16 })
        ));
        let cfg = ExactConfig { node_cap: 20 };
        assert!(exact_ged_with(&big, &small, &CostModel::unit(), &cfg).is_ok());
    }

    #[test]
    fn negative_threshold_rejected() {
        let g = graph(&["C"], &[]);
        assert!(ged_within(&g, &g, rational(-1), &CostModel::unit()).is_err());
    }

    #[test]
    fn fractional_costs() {
        let cost: CostModel = "1,1,1/2,1/3,1/3,1/3".parse().unwrap();
        let a = graph(&["C", "N"], &[(0, 1)]);
        let b = graph(&["C", "O"], &[]);
        let (d, m) = exact_ged(&a, &b, &cost).unwrap();
        assert_eq!(d, Rational::new(5, 6));
        assert_eq!(induced_cost(&a, &b, &cost, &m).unwrap(), d);
    }
}
