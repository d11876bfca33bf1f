//! Versioned JSON persistence for built trees.
//!
//! Items themselves are not stored: the document names them by key and
//! carries a checksum of the collection it was built over, which must be
//! supplied again on load.

use std::collections::HashMap;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{collection_checksum, item_keys, BuildStats, CmtConfig, CmtNode, CmtTree, LeafMember, NodeKind};
use crate::error::{Error, Result};
use crate::metric::{Distance, DistanceInterval, MetricSpec};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Serialize, Deserialize)]
#[serde(bound = "D: Distance")]
struct Document<D> {
    format_version: u64,
    metric: String,
    config: CmtConfig,
    item_count: usize,
    checksum: String,
    root: WireNode<D>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "D: Distance", deny_unknown_fields)]
struct WireNode<D> {
    pivot: String,
    intervals: Vec<(D, D)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    children: Option<Vec<WireNode<D>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    members: Option<Vec<WireMember<D>>>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "D: Distance", deny_unknown_fields)]
struct WireMember<D> {
    item: String,
    distances: Vec<D>,
}

#[derive(Deserialize)]
struct VersionProbe {
    format_version: u64,
}

impl<I: Send + Sync, D: Distance> CmtTree<I, D> {
    pub fn to_json(&self) -> String {
        let doc = Document {
            format_version: FORMAT_VERSION,
            metric: self.metric_key.clone(),
            config: self.config,
            item_count: self.items.len(),
            checksum: self.checksum.clone(),
            root: self.wire(&self.root),
        };
        serde_json::to_string(&doc).expect("index serialization is infallible")
    }

    fn wire(&self, node: &CmtNode<D>) -> WireNode<D> {
        let intervals = node.intervals.iter().map(|iv| (iv.lower, iv.upper)).collect();
        let (children, members) = match &node.kind {
            NodeKind::Internal(c) => (Some(c.iter().map(|c| self.wire(c)).collect()), None),
            NodeKind::Leaf(ms) => (
                None,
                Some(
                    ms.iter()
                        .map(|m| WireMember { item: self.keys[m.item].clone(), distances: m.pivot_distances.clone() })
                        .collect(),
                ),
            ),
        };
        WireNode { pivot: self.keys[node.pivot].clone(), intervals, children, members }
    }

    /// Loads a document written by [`CmtTree::to_json`], checking it against
    /// the supplied items and metric.
    pub fn from_json<M>(text: &str, items: Vec<I>, metric: &M) -> Result<Self>
    where
        M: MetricSpec<Item = I, Dist = D>,
    {
        let probe: VersionProbe = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        if probe.format_version != FORMAT_VERSION {
            return Err(Error::VersionMismatch { found: probe.format_version, expected: FORMAT_VERSION });
        }
        let doc: Document<D> = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        doc.config.check().map_err(|e| Error::Malformed(e.to_string()))?;
        if doc.metric != metric.index_key() {
            return Err(Error::Mismatch(format!("index built for `{}`, loaded with `{}`", doc.metric, metric.index_key())));
        }
        if doc.item_count != items.len() {
            return Err(Error::ChecksumMismatch(format!(
                "index covers {} items, collection has {}",
                doc.item_count,
                items.len()
            )));
        }
        let keys = item_keys(metric, &items)?;
        let lookup: HashMap<&str, usize> = keys.iter().enumerate().map(|(i, k)| (k.as_str(), i)).collect();
        let mut seen = vec![false; items.len()];
        let root = unwire(&doc.root, 1, &lookup, &mut seen)?;
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::Malformed(format!("item `{}` is not stored in any leaf", keys[missing])));
        }
        let checksum = collection_checksum(metric, &items);
        if checksum != doc.checksum {
            return Err(Error::ChecksumMismatch("collection checksum differs from the one recorded in the index".into()));
        }
        let build_stats = BuildStats { nodes: root.node_count(), wall_time: Duration::ZERO, ..Default::default() };
        Ok(CmtTree { config: doc.config, metric_key: doc.metric, items, keys, checksum, root, build_stats })
    }
}

fn resolve(key: &str, lookup: &HashMap<&str, usize>) -> Result<usize> {
    lookup
        .get(key)
        .copied()
        .ok_or_else(|| Error::ChecksumMismatch(format!("index references unknown item `{key}`")))
}

fn unwire<D: Distance>(
    node: &WireNode<D>,
    depth: usize,
    lookup: &HashMap<&str, usize>,
    seen: &mut [bool],
) -> Result<CmtNode<D>> {
    let pivot = resolve(&node.pivot, lookup)?;
    if node.intervals.len() != depth {
        return Err(Error::Malformed(format!(
            "node at depth {depth} has {} intervals",
            node.intervals.len()
        )));
    }
    let mut intervals = Vec::with_capacity(depth);
    for &(lower, upper) in &node.intervals {
        if !(D::zero() <= lower && lower <= upper) {
            return Err(Error::Malformed(format!("invalid interval [{lower}, {upper}]")));
        }
        intervals.push(DistanceInterval { lower, upper });
    }
    let kind = match (&node.children, &node.members) {
        (Some(children), None) if !children.is_empty() => NodeKind::Internal(
            children.iter().map(|c| unwire(c, depth + 1, lookup, seen)).collect::<Result<_>>()?,
        ),
        (None, Some(members)) if !members.is_empty() => {
            let mut out = Vec::with_capacity(members.len());
            for m in members {
                let item = resolve(&m.item, lookup)?;
                if seen[item] {
                    return Err(Error::Malformed(format!("item `{}` stored twice", m.item)));
                }
                seen[item] = true;
                if m.distances.len() != depth {
                    return Err(Error::Malformed(format!("member `{}` has {} distances", m.item, m.distances.len())));
                }
                out.push(LeafMember { item, pivot_distances: m.distances.clone() });
            }
            NodeKind::Leaf(out)
        }
        _ => return Err(Error::Malformed("node must have either children or members".into())),
    };
    Ok(CmtNode { pivot, intervals, kind })
}
