use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{EditMapping, PairContext};
use crate::cost::{CostModel, Rational};
use crate::error::Result;
use crate::graph::LabeledGraph;
use crate::lsap::solve_scaled;
use crate::metric::DistanceInterval;

/// Refinement passes applied to the assignment-based upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoundConfig {
    pub refine_iterations: usize,
}

impl Default for BoundConfig {
    fn default() -> Self {
        BoundConfig { refine_iterations: 1 }
    }
}

/// Node-label plus edge-label multiset distance; never exceeds GED.
pub fn label_multiset_lb(g1: &LabeledGraph, g2: &LabeledGraph, cost: &CostModel) -> Result<Rational> {
    let pair = PairContext::new(g1, g2, cost.scaled()?);
    Ok(pair.costs.to_rational(multiset_scaled(&pair)))
}

pub(crate) fn multiset_scaled(pair: &PairContext) -> i64 {
    let (a, b) = pair.node_label_counts();
    let (ea, eb) = pair.edge_label_counts();
    pair.node_multiset(&a, &b) + pair.edge_multiset(&ea, &eb)
}

/// Assignment lower bound with halved incident-edge costs.
pub fn branch_lb(g1: &LabeledGraph, g2: &LabeledGraph, cost: &CostModel) -> Result<Rational> {
    let pair = PairContext::new(g1, g2, cost.scaled()?);
    Ok(pair.costs.to_rational(branch_scaled(&pair)))
}

pub(crate) fn branch_scaled(pair: &PairContext) -> i64 {
    let matrix = bipartite_matrix(pair, true);
    solve_scaled(&matrix, pair.n1 + pair.n2).1
}

/// The (n1+n2)² ε-augmented cost matrix. With `halve_edges` the
/// incident-edge terms are halved, giving a lower bound; otherwise they are
/// taken in full to seed a good mapping.
pub(crate) fn bipartite_matrix(pair: &PairContext, halve_edges: bool) -> Vec<i64> {
    let (n1, n2) = (pair.n1, pair.n2);
    let n = n1 + n2;
    let c = &pair.costs;
    let div = if halve_edges { 2 } else { 1 };
    let (inc1, inc2) = pair.incident_counts();
    let deg = |h: &[u32]| h.iter().sum::<u32>() as i64;
    let mut m = vec![0i64; n * n];
    for i in 0..n1 {
        for j in 0..n2 {
            m[i * n + j] = pair.node_cost(i, j) + pair.edge_multiset(&inc1[i], &inc2[j]) / div;
        }
        let del = c.node_del + deg(&inc1[i]) * c.edge_del / div;
        for k in n2..n {
            m[i * n + k] = del;
        }
    }
    for (j, h) in inc2.iter().enumerate() {
        let ins = c.node_ins + deg(h) * c.edge_ins / div;
        for k in n1..n {
            m[k * n + j] = ins;
        }
    }
    m
}

/// Upper bound from the edit path induced by an assignment, refined by
/// pairwise swaps.
pub fn assignment_ub(
    g1: &LabeledGraph,
    g2: &LabeledGraph,
    cost: &CostModel,
    config: &BoundConfig,
) -> Result<(Rational, EditMapping)> {
    let scaled = cost.scaled()?;
    if cost.is_symmetric() && structural_order(g2, g1) == Ordering::Less {
        let pair = PairContext::new(g2, g1, scaled);
        let (ub, map) = upper_scaled(&pair, config.refine_iterations);
        let mapping = EditMapping::from_node_map(map, g1.node_count()).inverse(g1.node_count());
        return Ok((scaled.to_rational(ub), mapping));
    }
    let pair = PairContext::new(g1, g2, scaled);
    let (ub, map) = upper_scaled(&pair, config.refine_iterations);
    Ok((scaled.to_rational(ub), EditMapping::from_node_map(map, g2.node_count())))
}

/// Content order that ignores ids, so a pair is processed the same way
/// whichever side it is given on.
fn structural_order(a: &LabeledGraph, b: &LabeledGraph) -> Ordering {
    fn key(g: &LabeledGraph) -> (usize, usize, &[String], Vec<&crate::graph::Edge>) {
        let mut e: Vec<_> = g.edges.iter().collect();
        e.sort_unstable();
        (g.node_count(), g.edge_count(), &g.node_labels, e)
    }
    key(a).cmp(&key(b))
}

pub(crate) fn upper_scaled(pair: &PairContext, passes: usize) -> (i64, Vec<Option<usize>>) {
    let (n1, n2) = (pair.n1, pair.n2);
    let n = n1 + n2;
    let matrix = bipartite_matrix(pair, false);
    let (mut perm, _) = solve_scaled(&matrix, n);
    let to_map = |perm: &[usize]| -> Vec<Option<usize>> {
        perm[..n1].iter().map(|&j| (j < n2).then_some(j)).collect()
    };
    let mut best = pair.induced(&to_map(&perm));
    for _ in 0..passes {
        let mut improved = false;
        for a in 0..n {
            for b in (a + 1)..n {
                let rows_eps = a >= n1 && b >= n1;
                let cols_eps = perm[a] >= n2 && perm[b] >= n2;
                if rows_eps || cols_eps {
                    continue;
                }
                perm.swap(a, b);
                let c = pair.induced(&to_map(&perm));
                if c < best {
                    best = c;
                    improved = true;
                } else {
                    perm.swap(a, b);
                }
            }
        }
        if !improved {
            break;
        }
    }
    (best, to_map(&perm))
}

/// Lower and upper bound on GED for one pair.
pub fn pair_bounds(
    g1: &LabeledGraph,
    g2: &LabeledGraph,
    cost: &CostModel,
    config: &BoundConfig,
) -> Result<DistanceInterval<Rational>> {
    let scaled = cost.scaled()?;
    let pair = PairContext::new(g1, g2, scaled);
    let lower = multiset_scaled(&pair).max(branch_scaled(&pair));
    let (upper, _) = assignment_ub(g1, g2, cost, config)?;
    let lower = scaled.to_rational(lower);
    assert!(lower <= upper, "bound inversion {lower} > {upper} for {} / {}", g1.id, g2.id);
    Ok(DistanceInterval { lower, upper })
}
