use std::collections::{BTreeSet, HashMap};
use std::time::{Duration, Instant};

use super::{CmtNode, CmtTree, NodeKind};
use crate::error::{Error, Result};
use crate::metric::{fingerprint_hex, Distance, DistanceInterval, MetricSpec, OpCounts};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QueryStats {
    pub ops: OpCounts,
    pub nodes_visited: u64,
    pub subtrees_confirmed: u64,
    pub subtrees_pruned: u64,
    pub wall_time: Duration,
}

impl QueryStats {
    /// Everything except wall time, for determinism checks.
    pub fn counters(&self) -> (OpCounts, u64, u64, u64) {
        (self.ops, self.nodes_visited, self.subtrees_confirmed, self.subtrees_pruned)
    }
}

/// Items are referred to by their position in the indexed collection.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryResult<D> {
    pub confirmed: BTreeSet<usize>,
    pub suspected: BTreeSet<usize>,
    pub answers: BTreeSet<usize>,
    pub stats: QueryStats,
    pub radius: D,
    pub query_fingerprint: String,
    pub metric_key: String,
}

struct Walk<'a, M: MetricSpec> {
    metric: &'a M,
    items: &'a [M::Item],
    query: &'a M::Item,
    radius: M::Dist,
    cache: HashMap<usize, DistanceInterval<M::Dist>>,
    path: Vec<usize>,
    confirmed: BTreeSet<usize>,
    suspected: BTreeSet<usize>,
    stats: QueryStats,
}

enum Verdict {
    Prune,
    Confirm,
    Open,
}

impl<'a, M: MetricSpec> Walk<'a, M> {
    fn query_bounds(&mut self, item: usize) -> Result<DistanceInterval<M::Dist>> {
        if let Some(b) = self.cache.get(&item) {
            return Ok(*b);
        }
        let b = self.metric.bounds(self.query, &self.items[item], &mut self.stats.ops)?;
        self.cache.insert(item, b);
        Ok(b)
    }

    /// Bracket on d(q, x) for every x whose distance to the pivot lies in
    /// `stored`, given the query's bracket `q` to that pivot.
    fn cascade(q: &DistanceInterval<M::Dist>, stored: &DistanceInterval<M::Dist>) -> DistanceInterval<M::Dist> {
        let zero = M::Dist::zero();
        let slack = M::Dist::slack();
        let lower = (q.lower - stored.upper).max_of(stored.lower - q.upper) - slack;
        DistanceInterval { lower: lower.max_of(zero), upper: q.upper + stored.upper + slack }
    }

    /// Combines every stored interval whose pivot bound is already cached.
    fn subtree_verdict(&self, node: &CmtNode<M::Dist>) -> Verdict {
        let mut lower = M::Dist::zero();
        let mut upper: Option<M::Dist> = None;
        for (pivot, stored) in self.path.iter().zip(&node.intervals) {
            let Some(q) = self.cache.get(pivot) else { continue };
            let c = Self::cascade(q, stored);
            lower = lower.max_of(c.lower);
            upper = Some(upper.map_or(c.upper, |u| u.min_of(c.upper)));
        }
        if lower > self.radius {
            Verdict::Prune
        } else if upper.is_some_and(|u| u <= self.radius) {
            Verdict::Confirm
        } else {
            Verdict::Open
        }
    }

    fn visit(&mut self, node: &CmtNode<M::Dist>) -> Result<()> {
        self.stats.nodes_visited += 1;
        self.path.push(node.pivot);
        let mut verdict = self.subtree_verdict(node);
        if matches!(verdict, Verdict::Open) && !self.cache.contains_key(&node.pivot) {
            self.query_bounds(node.pivot)?;
            verdict = self.subtree_verdict(node);
        }
        match verdict {
            Verdict::Prune => self.stats.subtrees_pruned += 1,
            Verdict::Confirm => {
                self.stats.subtrees_confirmed += 1;
                let confirmed = &mut self.confirmed;
                node.for_each_item(&mut |i| {
                    confirmed.insert(i);
                });
            }
            Verdict::Open => match &node.kind {
                NodeKind::Internal(children) => {
                    for child in children {
                        self.visit(child)?;
                    }
                }
                NodeKind::Leaf(members) => {
                    for m in members {
                        self.classify(m.item, &m.pivot_distances)?;
                    }
                }
            },
        }
        self.path.pop();
        Ok(())
    }

    fn classify(&mut self, item: usize, pivot_distances: &[M::Dist]) -> Result<()> {
        let mut lower = M::Dist::zero();
        let mut upper: Option<M::Dist> = None;
        for (pivot, d) in self.path.iter().zip(pivot_distances) {
            let q = self.cache[pivot];
            let c = Self::cascade(&q, &DistanceInterval::exact(*d));
            lower = lower.max_of(c.lower);
            upper = Some(upper.map_or(c.upper, |u| u.min_of(c.upper)));
        }
        let r = self.radius;
        if lower > r {
            return Ok(());
        }
        let mut bracket = DistanceInterval { lower, upper: upper.expect("leaf has a pivot path") };
        if bracket.upper > r {
            bracket = bracket.intersect(&self.query_bounds(item)?);
        }
        if bracket.upper <= r {
            self.confirmed.insert(item);
        } else if bracket.lower <= r {
            self.suspected.insert(item);
        }
        Ok(())
    }
}

impl<I: Send + Sync, D: Distance> CmtTree<I, D> {
    fn check_query<M: MetricSpec<Item = I, Dist = D>>(&self, radius: D, metric: &M) -> Result<()> {
        if radius < D::zero() {
            return Err(Error::NegativeRadius);
        }
        if metric.index_key() != self.metric_key {
            return Err(Error::Mismatch(format!(
                "index built for `{}`, queried with `{}`",
                self.metric_key,
                metric.index_key()
            )));
        }
        Ok(())
    }

    /// Range query with bounds only: `confirmed` holds items certified
    /// within `radius`, `suspected` those the bounds cannot decide.
    /// `answers` is left equal to `confirmed`; see
    /// [`CmtTree::verify_suspected`].
    pub fn range_query<M>(&self, query: &I, radius: D, metric: &M) -> Result<QueryResult<D>>
    where
        M: MetricSpec<Item = I, Dist = D>,
    {
        self.check_query(radius, metric)?;
        let start = Instant::now();
        let mut walk = Walk {
            metric,
            items: &self.items,
            query,
            radius,
            cache: HashMap::new(),
            path: Vec::new(),
            confirmed: BTreeSet::new(),
            suspected: BTreeSet::new(),
            stats: QueryStats::default(),
        };
        walk.visit(&self.root)?;
        let mut stats = walk.stats;
        stats.wall_time = start.elapsed();
        Ok(QueryResult {
            answers: walk.confirmed.clone(),
            confirmed: walk.confirmed,
            suspected: walk.suspected,
            stats,
            radius,
            query_fingerprint: fingerprint_hex(metric, query),
            metric_key: self.metric_key.clone(),
        })
    }

    /// Resolves the suspected set with the metric's threshold test.
    pub fn verify_suspected<M>(&self, result: &QueryResult<D>, query: &I, radius: D, metric: &M) -> Result<QueryResult<D>>
    where
        M: MetricSpec<Item = I, Dist = D>,
    {
        self.check_query(radius, metric)?;
        if result.radius != radius
            || result.metric_key != metric.index_key()
            || result.query_fingerprint != fingerprint_hex(metric, query)
        {
            return Err(Error::Mismatch("result was produced for a different query, radius, or metric".into()));
        }
        let start = Instant::now();
        let mut out = result.clone();
        for &item in &result.suspected {
            if metric.within(query, &self.items[item], radius, &mut out.stats.ops)? {
                out.answers.insert(item);
            }
        }
        out.stats.wall_time += start.elapsed();
        Ok(out)
    }

    /// [`CmtTree::range_query`] followed by [`CmtTree::verify_suspected`].
    pub fn search<M>(&self, query: &I, radius: D, metric: &M) -> Result<QueryResult<D>>
    where
        M: MetricSpec<Item = I, Dist = D>,
    {
        let partial = self.range_query(query, radius, metric)?;
        self.verify_suspected(&partial, query, radius, metric)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmt::CmtConfig;
    use crate::cost::rational;
    use crate::graph::GraphGenerator;
    use crate::metric::{euclidean_metric, EuclideanPoint, GedMetric};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn points(seed: u64, n: usize) -> Vec<EuclideanPoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| EuclideanPoint::new([rng.gen::<f64>(), rng.gen::<f64>()])).collect()
    }

    fn truth(pts: &[EuclideanPoint], q: &EuclideanPoint, r: f64) -> BTreeSet<usize> {
        let m = euclidean_metric(2, 0.0).unwrap();
        (0..pts.len()).filter(|&i| m.distance(q, &pts[i]).unwrap() <= r).collect()
    }

    #[test]
    fn huge_radius_confirms_everything() {
        let pts = points(1, 50);
        let m = euclidean_metric(2, 0.0).unwrap();
        let t = CmtTree::build(pts.clone(), &m, CmtConfig::default()).unwrap();
        let res = t.range_query(&pts[3], 2.0, &m).unwrap();
        assert_eq!(res.confirmed.len(), 50);
        assert!(res.suspected.is_empty());
    }

    #[test]
    fn zero_radius_finds_the_point_itself() {
        let pts = points(2, 50);
        let m = euclidean_metric(2, 0.0).unwrap();
        let t = CmtTree::build(pts.clone(), &m, CmtConfig::default()).unwrap();
        let res = t.range_query(&pts[17], 0.0, &m).unwrap();
        assert_eq!(res.confirmed, BTreeSet::from([17]));
        assert!(res.suspected.is_empty());
    }

    #[test]
    fn fuzzed_bounds_are_sound_and_complete() {
        let pts = points(3, 400);
        let m = euclidean_metric(2, 0.05).unwrap();
        let t = CmtTree::build(pts.clone(), &m, CmtConfig { branching: 3, leaf_capacity: 6, pivot_seed: 5 }).unwrap();
        let qs = points(4, 20);
        for (i, q) in qs.iter().enumerate() {
            let r = 0.05 + 0.02 * i as f64;
            let res = t.range_query(q, r, &m).unwrap();
            let want = truth(&pts, q, r);
            assert!(res.confirmed.is_subset(&want));
            let union: BTreeSet<_> = res.confirmed.union(&res.suspected).copied().collect();
            assert!(want.is_subset(&union));
            assert!(res.confirmed.is_disjoint(&res.suspected));
            let done = t.verify_suspected(&res, q, r, &m).unwrap();
            assert_eq!(done.answers, want);
            assert_eq!(done.stats.ops.verify_calls, res.suspected.len() as u64);
        }
    }

    #[test]
    fn empty_suspected_means_no_verification() {
        let pts = points(5, 60);
        let m = euclidean_metric(2, 0.0).unwrap();
        let t = CmtTree::build(pts.clone(), &m, CmtConfig::default()).unwrap();
        let res = t.search(&pts[0], 0.3, &m).unwrap();
        assert!(res.suspected.is_empty());
        assert_eq!(res.answers, res.confirmed);
        assert_eq!(res.stats.ops.verify_calls, 0);
    }

    #[test]
    fn ged_answers_match_exhaustive_scan() {
        let db = GraphGenerator::default().collection(8, 60).unwrap();
        let m = GedMetric::unit();
        let t = CmtTree::build(db.graphs.clone(), &m, CmtConfig::default()).unwrap();
        let q = &db.graphs[5];
        let res = t.search(q, rational(2), &m).unwrap();
        let mut ops = OpCounts::default();
        let want: BTreeSet<usize> = (0..db.len())
            .filter(|&i| m.exact(q, &db.graphs[i], &mut ops).unwrap() <= rational(2))
            .collect();
        assert_eq!(res.answers, want);
        assert!(res.answers.contains(&5));
    }

    #[test]
    fn rejects_mismatches() {
        let pts = points(6, 10);
        let m = euclidean_metric(2, 0.0).unwrap();
        let t = CmtTree::build(pts.clone(), &m, CmtConfig::default()).unwrap();
        assert!(matches!(t.range_query(&pts[0], -1.0, &m), Err(Error::NegativeRadius)));
        let m3 = euclidean_metric(3, 0.0).unwrap();
        assert!(matches!(t.range_query(&pts[0], 1.0, &m3), Err(Error::Mismatch(_))));
        let res = t.range_query(&pts[0], 0.5, &m).unwrap();
        assert!(t.verify_suspected(&res, &pts[0], 0.6, &m).is_err());
        assert!(t.verify_suspected(&res, &pts[1], 0.5, &m).is_err());
    }
}
