//! Cascading metric tree.
//!
//! Every node keeps, for each pivot on its root path (its own included),
//! the `[min, max]` of exact distances from its items to that pivot. Leaves
//! keep each member's exact distance to every pivot on the path. A query
//! needs one bound evaluation per pivot it touches and combines it with
//! every stored interval below, so pruning tightens as it cascades down.

mod query;
mod serialize;

pub use query::{QueryResult, QueryStats};

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::metric::{Distance, DistanceInterval, MetricSpec, OpCounts};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CmtConfig {
    pub branching: usize,
    pub leaf_capacity: usize,
    pub pivot_seed: u64,
}

impl Default for CmtConfig {
    fn default() -> Self {
        CmtConfig { branching: 2, leaf_capacity: 8, pivot_seed: 0 }
    }
}

impl CmtConfig {
    pub fn check(&self) -> Result<()> {
        if self.branching < 2 {
            return Err(Error::InvalidArgument("branching must be at least 2".into()));
        }
        if self.leaf_capacity < 1 {
            return Err(Error::InvalidArgument("leaf capacity must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeafMember<D> {
    pub item: usize,
    /// Exact distance to each pivot on the root path, root first.
    pub pivot_distances: Vec<D>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeKind<D> {
    Internal(Vec<CmtNode<D>>),
    Leaf(Vec<LeafMember<D>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CmtNode<D> {
    pub pivot: usize,
    /// One interval per pivot on the root path, root first; the last is
    /// this node's own pivot.
    pub intervals: Vec<DistanceInterval<D>>,
    pub kind: NodeKind<D>,
}

impl<D> CmtNode<D> {
    pub fn for_each_item(&self, f: &mut impl FnMut(usize)) {
        match &self.kind {
            NodeKind::Internal(children) => children.iter().for_each(|c| c.for_each_item(f)),
            NodeKind::Leaf(members) => members.iter().for_each(|m| f(m.item)),
        }
    }

    pub fn node_count(&self) -> usize {
        match &self.kind {
            NodeKind::Internal(children) => 1 + children.iter().map(CmtNode::node_count).sum::<usize>(),
            NodeKind::Leaf(_) => 1,
        }
    }

    pub fn depth(&self) -> usize {
        match &self.kind {
            NodeKind::Internal(children) => 1 + children.iter().map(CmtNode::depth).max().unwrap_or(0),
            NodeKind::Leaf(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildStats {
    pub ops: OpCounts,
    pub nodes: usize,
    pub wall_time: Duration,
}

/// A built index. Owns the items it was built over.
#[derive(Debug, Clone)]
pub struct CmtTree<I, D> {
    pub config: CmtConfig,
    pub metric_key: String,
    pub items: Vec<I>,
    pub keys: Vec<String>,
    pub checksum: String,
    pub root: CmtNode<D>,
    pub build_stats: BuildStats,
}

impl<I, D> CmtTree<I, D> {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn key(&self, item: usize) -> &str {
        &self.keys[item]
    }
}

pub(crate) fn collection_checksum<M: MetricSpec>(metric: &M, items: &[M::Item]) -> String {
    let mut h = Sha256::new();
    h.update(metric.index_key().as_bytes());
    for item in items {
        let bytes = metric.fingerprint(item);
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(&bytes);
    }
    hex::encode(h.finalize())
}

pub(crate) fn item_keys<M: MetricSpec>(metric: &M, items: &[M::Item]) -> Result<Vec<String>> {
    let keys: Vec<String> = items.iter().enumerate().map(|(i, it)| metric.item_key(it, i)).collect();
    let mut seen = std::collections::HashSet::new();
    for k in &keys {
        if !seen.insert(k.as_str()) {
            return Err(Error::DuplicateId(k.clone()));
        }
    }
    Ok(keys)
}

impl<I: Send + Sync, D: Distance> CmtTree<I, D> {
    /// Builds the tree with exact distances. Deterministic in the item
    /// order and `config`; distance batches run in parallel.
    pub fn build<M>(items: Vec<I>, metric: &M, config: CmtConfig) -> Result<Self>
    where
        M: MetricSpec<Item = I, Dist = D>,
    {
        config.check()?;
        if items.is_empty() {
            return Err(Error::EmptyInput);
        }
        let start = Instant::now();
        let keys = item_keys(metric, &items)?;
        let checksum = collection_checksum(metric, &items);
        let mut rng = ChaCha8Rng::seed_from_u64(config.pivot_seed);
        let mut ops = OpCounts::default();
        let members: Vec<(usize, Vec<D>)> = (0..items.len()).map(|i| (i, Vec::new())).collect();
        let root = build_node(&items, metric, &config, members, &mut rng, &mut ops)?;
        let build_stats = BuildStats { ops, nodes: root.node_count(), wall_time: start.elapsed() };
        Ok(CmtTree { config, metric_key: metric.index_key(), items, keys, checksum, root, build_stats })
    }
}

fn build_node<M: MetricSpec>(
    items: &[M::Item],
    metric: &M,
    config: &CmtConfig,
    mut members: Vec<(usize, Vec<M::Dist>)>,
    rng: &mut ChaCha8Rng,
    ops: &mut OpCounts,
) -> Result<CmtNode<M::Dist>> {
    let pivot = members[rng.gen_range(0..members.len() as u32) as usize].0;
    let distances: Vec<(M::Dist, OpCounts)> = members
        .par_iter()
        .map(|(item, _)| {
            let mut local = OpCounts::default();
            if *item == pivot {
                return Ok((M::Dist::zero(), local));
            }
            let d = metric.exact(&items[pivot], &items[*item], &mut local)?;
            Ok((d, local))
        })
        .collect::<Result<_>>()?;
    for ((_, path), (d, local)) in members.iter_mut().zip(distances) {
        path.push(d);
        *ops += local;
    }

    let levels = members[0].1.len();
    let intervals = (0..levels)
        .map(|k| {
            let mut iv = DistanceInterval::exact(members[0].1[k]);
            for (_, path) in &members[1..] {
                iv.lower = iv.lower.min_of(path[k]);
                iv.upper = iv.upper.max_of(path[k]);
            }
            iv
        })
        .collect();

    if members.len() <= config.leaf_capacity {
        let leaf = members.into_iter().map(|(item, pivot_distances)| LeafMember { item, pivot_distances }).collect();
        return Ok(CmtNode { pivot, intervals, kind: NodeKind::Leaf(leaf) });
    }

    // ties in distance fall back to item order
    members.sort_by(|a, b| {
        let (da, db) = (a.1[levels - 1], b.1[levels - 1]);
        da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal).then(a.0.cmp(&b.0))
    });
    let n = members.len();
    let (base, extra) = (n / config.branching, n % config.branching);
    let mut rest = members.into_iter();
    let mut children = Vec::with_capacity(config.branching);
    for g in 0..config.branching {
        let size = base + usize::from(g < extra);
        if size == 0 {
            continue;
        }
        let group: Vec<_> = rest.by_ref().take(size).collect();
        children.push(build_node(items, metric, config, group, rng, ops)?);
    }
    Ok(CmtNode { pivot, intervals, kind: NodeKind::Internal(children) })
}
