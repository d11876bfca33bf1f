//! Reference implementations shared by the integration tests. None of them
//! call into the search or bound code they are used to check.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use gedcmt::{CostModel, Edge, LabeledGraph, Rational};
use proptest::prelude::*;

pub const NODE_LABELS: [&str; 3] = ["C", "N", "O"];
pub const EDGE_LABELS: [&str; 2] = ["1", "2"];

pub fn r(n: i64) -> Rational {
    Rational::from_integer(n)
}

/// Cost of the edit path induced by `map` (`map[i]` is the image of `g1`
/// node `i`), computed directly from the edit definitions.
pub fn path_cost(g1: &LabeledGraph, g2: &LabeledGraph, c: &CostModel, map: &[Option<usize>]) -> Rational {
    let mut total = r(0);
    let mut hit = vec![false; g2.node_count()];
    for (i, m) in map.iter().enumerate() {
        match m {
            None => total += c.node_del,
            Some(j) => {
                hit[*j] = true;
                if g1.node_labels[i] != g2.node_labels[*j] {
                    total += c.node_sub;
                }
            }
        }
    }
    total += c.node_ins * r(hit.iter().filter(|h| !**h).count() as i64);

    let e2: HashMap<(usize, usize), &str> = g2.edges.iter().map(|e| ((e.u, e.v), e.label.as_str())).collect();
    let mut covered = BTreeSet::new();
    for e in &g1.edges {
        let image = match (map[e.u], map[e.v]) {
            (Some(a), Some(b)) => Some((a.min(b), a.max(b))),
            _ => None,
        };
        match image.and_then(|k| e2.get(&k).map(|l| (k, *l))) {
            Some((k, l)) => {
                covered.insert(k);
                if l != e.label {
                    total += c.edge_sub;
                }
            }
            None => total += c.edge_del,
        }
    }
    total += c.edge_ins * r((g2.edges.len() - covered.len()) as i64);
    total
}

/// Minimum induced cost over every injective partial mapping.
pub fn brute_ged(g1: &LabeledGraph, g2: &LabeledGraph, c: &CostModel) -> Rational {
    fn go(
        i: usize,
        map: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
        g1: &LabeledGraph,
        g2: &LabeledGraph,
        c: &CostModel,
        best: &mut Option<Rational>,
    ) {
        if i == g1.node_count() {
            let cost = path_cost(g1, g2, c, map);
            if best.is_none_or(|b| cost < b) {
                *best = Some(cost);
            }
            return;
        }
        map.push(None);
        go(i + 1, map, used, g1, g2, c, best);
        map.pop();
        for j in 0..g2.node_count() {
            if !used[j] {
                used[j] = true;
                map.push(Some(j));
                go(i + 1, map, used, g1, g2, c, best);
                map.pop();
                used[j] = false;
            }
        }
    }
    let mut best = None;
    go(0, &mut Vec::new(), &mut vec![false; g2.node_count()], g1, g2, c, &mut best);
    best.expect("at least one mapping exists")
}

/// Minimum total over all permutations.
pub fn brute_lsap(m: &[Vec<Rational>]) -> Rational {
    fn go(row: usize, used: &mut Vec<bool>, acc: Rational, m: &[Vec<Rational>], best: &mut Option<Rational>) {
        if row == m.len() {
            if best.is_none_or(|b| acc < b) {
                *best = Some(acc);
            }
            return;
        }
        for col in 0..m.len() {
            if !used[col] {
                used[col] = true;
                go(row + 1, used, acc + m[row][col], m, best);
                used[col] = false;
            }
        }
    }
    let mut best = None;
    go(0, &mut vec![false; m.len()], r(0), m, &mut best);
    best.unwrap_or_else(|| r(0))
}

/// Random labelled graph with at most `max_nodes` nodes.
pub fn arb_graph(max_nodes: usize) -> impl Strategy<Value = LabeledGraph> {
    (0..=max_nodes).prop_flat_map(|n| {
        (
            proptest::collection::vec(0..NODE_LABELS.len(), n),
            proptest::collection::vec((any::<u16>(), any::<u16>(), 0..EDGE_LABELS.len()), 0..=2 * n),
        )
            .prop_map(move |(labels, raw)| {
                let mut seen = BTreeSet::new();
                let mut edges = Vec::new();
                for (a, b, l) in raw {
                    let (u, v) = (a as usize % n, b as usize % n);
                    if u != v && seen.insert((u.min(v), u.max(v))) {
                        edges.push(Edge::new(u, v, EDGE_LABELS[l]));
                    }
                }
                LabeledGraph::new("p", labels.into_iter().map(|l| NODE_LABELS[l]), edges).unwrap()
            })
    })
}

/// Cost models under which graph edit distance is a metric.
pub fn metric_costs() -> Vec<CostModel> {
    ["1,1,1,1,1,1", "2,2,1,1,1,1", "1,1,1/2,1,1,1/2", "3/2,3/2,2,1/2,1/2,1", "1,1,2,1,1,2"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect()
}

/// Metric cost models plus asymmetric ones.
pub fn any_costs() -> Vec<CostModel> {
    let mut v = metric_costs();
    v.push("1,2,1,1,1,1".parse().unwrap());
    v.push("1,1,1,2,1/2,1".parse().unwrap());
    v
}

pub fn arb_metric_cost() -> impl Strategy<Value = CostModel> {
    proptest::sample::select(metric_costs())
}

pub fn arb_any_cost() -> impl Strategy<Value = CostModel> {
    proptest::sample::select(any_costs())
}
