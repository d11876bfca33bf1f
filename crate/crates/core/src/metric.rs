//! Distances the search structures are generic over.
//!
//! A [`MetricSpec`] supplies an exact metric, a cheap certified bracket
//! around it, and a threshold test. The GED instance is the production
//! metric; the Euclidean instance exists to exercise the tree with a metric
//! whose ground truth is trivial to compute.

use std::fmt::{Debug, Display};
use std::ops::{Add, Sub};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cost::{CostModel, Rational};
use crate::error::{Error, Result};
use crate::ged::{self, BoundConfig, ExactConfig};
use crate::graph::LabeledGraph;

/// Numeric type of a distance.
pub trait Distance:
    Copy + PartialOrd + Debug + Display + Send + Sync + Serialize + DeserializeOwned + Add<Output = Self> + Sub<Output = Self>
{
    fn zero() -> Self;

    /// Absolute slack applied to bounds derived arithmetically from stored
    /// distances. Zero for exact types.
    fn slack() -> Self;

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl Distance for Rational {
    fn zero() -> Self {
        Rational::from_integer(0)
    }

    fn slack() -> Self {
        Rational::from_integer(0)
    }
}

/// Floating-point distances carry a 1e-9 absolute tolerance on derived
/// bounds.
impl Distance for f64 {
    fn zero() -> Self {
        0.0
    }

    fn slack() -> Self {
        1e-9
    }
}

/// A certified `[lower, upper]` bracket on a true distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceInterval<D> {
    pub lower: D,
    pub upper: D,
}

impl<D: Distance> DistanceInterval<D> {
    pub fn exact(d: D) -> Self {
        DistanceInterval { lower: d, upper: d }
    }

    pub fn contains(&self, d: D) -> bool {
        self.lower <= d && d <= self.upper
    }

    pub fn intersect(&self, other: &Self) -> Self {
        DistanceInterval { lower: self.lower.max_of(other.lower), upper: self.upper.min_of(other.upper) }
    }
}

/// Per-call operation counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounts {
    pub exact_calls: u64,
    pub bound_calls: u64,
    pub lsap_calls: u64,
    pub verify_calls: u64,
}

impl std::ops::AddAssign for OpCounts {
    fn add_assign(&mut self, o: Self) {
        self.exact_calls += o.exact_calls;
        self.bound_calls += o.bound_calls;
        self.lsap_calls += o.lsap_calls;
        self.verify_calls += o.verify_calls;
    }
}

impl OpCounts {
    /// Calls that dominate query cost.
    pub fn work(&self) -> u64 {
        self.exact_calls + self.bound_calls + self.verify_calls
    }
}

pub trait MetricSpec: Sync {
    type Item: Send + Sync;
    type Dist: Distance;

    fn name(&self) -> String;

    /// Identifies what the exact distances depend on. An index built under
    /// one key cannot be queried under another.
    fn index_key(&self) -> String;

    fn exact(&self, a: &Self::Item, b: &Self::Item, ops: &mut OpCounts) -> Result<Self::Dist>;

    fn bounds(&self, a: &Self::Item, b: &Self::Item, ops: &mut OpCounts) -> Result<DistanceInterval<Self::Dist>>;

    /// Decides `exact(a, b) <= radius`.
    fn within(&self, a: &Self::Item, b: &Self::Item, radius: Self::Dist, ops: &mut OpCounts) -> Result<bool>;

    /// Stable external name of an item at `position` in its collection.
    fn item_key(&self, item: &Self::Item, position: usize) -> String;

    /// Canonical bytes of an item, for checksums.
    fn fingerprint(&self, item: &Self::Item) -> Vec<u8>;
}

pub fn fingerprint_hex<M: MetricSpec>(metric: &M, item: &M::Item) -> String {
    hex::encode(Sha256::digest(metric.fingerprint(item)))
}

/// Graph edit distance with assignment-based bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct GedMetric {
    pub cost: CostModel,
    pub bounds: BoundConfig,
    pub exact: ExactConfig,
}

pub fn ged_metric(cost: CostModel, config: BoundConfig) -> Result<GedMetric> {
    GedMetric::new(cost, config, ExactConfig::default())
}

impl GedMetric {
    /// Rejects cost models under which GED is not a metric.
    pub fn new(cost: CostModel, bounds: BoundConfig, exact: ExactConfig) -> Result<Self> {
        cost.check_metric()?;
        Ok(GedMetric { cost, bounds, exact })
    }

    pub fn unit() -> Self {
        GedMetric { cost: CostModel::unit(), bounds: BoundConfig::default(), exact: ExactConfig::default() }
    }
}

impl MetricSpec for GedMetric {
    type Item = LabeledGraph;
    type Dist = Rational;

    fn name(&self) -> String {
        format!("ged(cost={}, refine={})", self.cost, self.bounds.refine_iterations)
    }

    fn index_key(&self) -> String {
        format!("ged:{}", self.cost)
    }

    fn exact(&self, a: &LabeledGraph, b: &LabeledGraph, ops: &mut OpCounts) -> Result<Rational> {
        ops.exact_calls += 1;
        ops.lsap_calls += 1;
        Ok(ged::exact_ged_with(a, b, &self.cost, &self.exact)?.distance)
    }

    fn bounds(&self, a: &LabeledGraph, b: &LabeledGraph, ops: &mut OpCounts) -> Result<DistanceInterval<Rational>> {
        ops.bound_calls += 1;
        ops.lsap_calls += 2;
        ged::pair_bounds(a, b, &self.cost, &self.bounds)
    }

    fn within(&self, a: &LabeledGraph, b: &LabeledGraph, radius: Rational, ops: &mut OpCounts) -> Result<bool> {
        ops.verify_calls += 1;
        ops.lsap_calls += 1;
        Ok(ged::ged_within_with(a, b, radius, &self.cost, &self.exact)?.within)
    }

    fn item_key(&self, item: &LabeledGraph, _position: usize) -> String {
        item.id.clone()
    }

    fn fingerprint(&self, item: &LabeledGraph) -> Vec<u8> {
        item.to_json_line().into_bytes()
    }
}

/// A point in d-dimensional space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EuclideanPoint {
    pub coords: Vec<f64>,
}

impl EuclideanPoint {
    pub fn new(coords: impl Into<Vec<f64>>) -> Self {
        EuclideanPoint { coords: coords.into() }
    }
}

/// Euclidean distance with bounds deliberately widened by `fuzz` on each
/// side, so a positive fuzz produces uncertain candidates.
#[derive(Debug, Clone, PartialEq)]
pub struct EuclideanMetric {
    pub dimension: usize,
    pub fuzz: f64,
}

pub fn euclidean_metric(dimension: usize, fuzz: f64) -> Result<EuclideanMetric> {
    if dimension == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    if !(fuzz >= 0.0 && fuzz.is_finite()) {
        return Err(Error::InvalidArgument("fuzz must be a finite non-negative number".into()));
    }
    Ok(EuclideanMetric { dimension, fuzz })
}

impl EuclideanMetric {
    pub fn distance(&self, a: &EuclideanPoint, b: &EuclideanPoint) -> Result<f64> {
        for p in [a, b] {
            if p.coords.len() != self.dimension {
                return Err(Error::DimensionMismatch { expected: self.dimension, got: p.coords.len() });
            }
        }
        Ok(a.coords.iter().zip(&b.coords).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt())
    }
}

impl MetricSpec for EuclideanMetric {
    type Item = EuclideanPoint;
    type Dist = f64;

    fn name(&self) -> String {
        format!("euclidean(d={}, fuzz={})", self.dimension, self.fuzz)
    }

    fn index_key(&self) -> String {
        format!("euclidean:{}", self.dimension)
    }

    fn exact(&self, a: &EuclideanPoint, b: &EuclideanPoint, ops: &mut OpCounts) -> Result<f64> {
        ops.exact_calls += 1;
        self.distance(a, b)
    }

    fn bounds(&self, a: &EuclideanPoint, b: &EuclideanPoint, ops: &mut OpCounts) -> Result<DistanceInterval<f64>> {
        ops.bound_calls += 1;
        let d = self.distance(a, b)?;
        Ok(DistanceInterval { lower: (d - self.fuzz).max(0.0), upper: d + self.fuzz })
    }

    fn within(&self, a: &EuclideanPoint, b: &EuclideanPoint, radius: f64, ops: &mut OpCounts) -> Result<bool> {
        ops.verify_calls += 1;
        Ok(self.distance(a, b)? <= radius)
    }

    fn item_key(&self, _item: &EuclideanPoint, position: usize) -> String {
        format!("p{position}")
    }

    fn fingerprint(&self, item: &EuclideanPoint) -> Vec<u8> {
        item.coords.iter().flat_map(|c| c.to_le_bytes()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::rational;

    #[test]
    fn euclidean_examples() {
        let m = euclidean_metric(2, 0.0).unwrap();
        let (a, b) = (EuclideanPoint::new([0.0, 0.0]), EuclideanPoint::new([3.0, 4.0]));
        let mut ops = OpCounts::default();
        assert_eq!(m.exact(&a, &b, &mut ops).unwrap(), 5.0);
        assert_eq!(m.bounds(&a, &b, &mut ops).unwrap(), DistanceInterval { lower: 5.0, upper: 5.0 });
        let m = euclidean_metric(2, 1.0).unwrap();
        assert_eq!(m.bounds(&a, &b, &mut ops).unwrap(), DistanceInterval { lower: 4.0, upper: 6.0 });
        assert_eq!(ops, OpCounts { exact_calls: 1, bound_calls: 2, ..Default::default() });
        let c = EuclideanPoint::new([1.0, 2.0, 3.0]);
        assert!(matches!(m.exact(&a, &c, &mut ops), Err(Error::DimensionMismatch { expected: 2, got: 3 })));
        assert!(euclidean_metric(0, 0.0).is_err());
    }

    #[test]
    fn ged_metric_rejects_asymmetric_costs() {
        let asym: CostModel = "1,2,1,1,1,1".parse().unwrap();
        assert!(matches!(ged_metric(asym, BoundConfig::default()), Err(Error::InvalidCostModel(_))));
        let m = ged_metric(CostModel::unit(), BoundConfig::default()).unwrap();
        let g = crate::graph::random_graph(5, (4, 6), &["C", "N"], &["1"], 0.5).unwrap();
        let mut ops = OpCounts::default();
        assert_eq!(m.exact(&g, &g, &mut ops).unwrap(), rational(0));
    }
}
