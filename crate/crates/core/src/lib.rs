//! Graph similarity range search under graph edit distance.
//!
//! Two query strategies are provided over the same [`metric::MetricSpec`]:
//! a cascading metric tree ([`cmt::CmtTree`]) that prunes with cached
//! pivot bounds, and the linear [`search::filter_verify_scan`]. Both return
//! exactly `{ g : d(q, g) <= r }`; [`bench`] compares how much work each
//! spends getting there.

pub mod bench;
pub mod cmt;
pub mod cost;
pub mod error;
pub mod ged;
pub mod graph;
pub mod lsap;
pub mod metric;
pub mod search;
pub mod selftest;

pub use cmt::{CmtConfig, CmtTree, QueryResult, QueryStats};
pub use cost::{CostModel, Rational};
pub use error::{Error, Result};
pub use ged::{BoundConfig, EditMapping, ExactConfig};
pub use graph::{Edge, GraphCollection, GraphGenerator, LabeledGraph};
pub use metric::{DistanceInterval, EuclideanMetric, EuclideanPoint, GedMetric, MetricSpec, OpCounts};
