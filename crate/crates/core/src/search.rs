//! Linear strategies: the filter-verify baseline and the exhaustive exact
//! scan used as ground truth.

use std::collections::BTreeSet;
use std::time::Instant;

use crate::cmt::QueryStats;
use crate::error::{Error, Result};
use crate::metric::{Distance, MetricSpec, OpCounts};

/// Bounds every item against the query: discards on `lower > r`, accepts on
/// `upper <= r`, and resolves the rest with the metric's threshold test.
pub fn filter_verify_scan<M: MetricSpec>(
    db: &[M::Item],
    query: &M::Item,
    radius: M::Dist,
    metric: &M,
) -> Result<(BTreeSet<usize>, QueryStats)> {
    if radius < M::Dist::zero() {
        return Err(Error::NegativeRadius);
    }
    let start = Instant::now();
    let mut stats = QueryStats::default();
    let mut answers = BTreeSet::new();
    for (i, g) in db.iter().enumerate() {
        let b = metric.bounds(query, g, &mut stats.ops)?;
        if b.lower > radius {
            continue;
        }
        if b.upper <= radius || metric.within(query, g, radius, &mut stats.ops)? {
            answers.insert(i);
        }
    }
    stats.wall_time = start.elapsed();
    Ok((answers, stats))
}

/// Exact distance from the query to every item, in order.
pub fn exact_distances<M: MetricSpec>(db: &[M::Item], query: &M::Item, metric: &M) -> Result<Vec<M::Dist>> {
    let mut ops = OpCounts::default();
    db.iter().map(|g| metric.exact(query, g, &mut ops)).collect()
}

/// `{ i : exact(q, db[i]) <= r }` with no shortcuts.
pub fn linear_oracle<M: MetricSpec>(db: &[M::Item], query: &M::Item, radius: M::Dist, metric: &M) -> Result<BTreeSet<usize>> {
    Ok(within_radius(&exact_distances(db, query, metric)?, radius))
}

pub fn within_radius<D: Distance>(distances: &[D], radius: D) -> BTreeSet<usize> {
    distances.iter().enumerate().filter(|(_, d)| **d <= radius).map(|(i, _)| i).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::rational;
    use crate::graph::{GraphGenerator, LabeledGraph};
    use crate::metric::GedMetric;

    #[test]
    fn zero_radius_finds_identical_graph() {
        let db = GraphGenerator::default().collection(31, 20).unwrap();
        let m = GedMetric::unit();
        let q = LabeledGraph { id: "q".into(), ..db.graphs[4].clone() };
        let (answers, stats) = filter_verify_scan(&db.graphs, &q, rational(0), &m).unwrap();
        assert!(answers.contains(&4));
        assert_eq!(answers, linear_oracle(&db.graphs, &q, rational(0), &m).unwrap());
        assert_eq!(stats.ops.bound_calls, 20);
        assert!(stats.ops.verify_calls <= 20);
    }

    #[test]
    fn huge_radius_takes_everything() {
        let db = GraphGenerator::default().collection(32, 15).unwrap();
        let m = GedMetric::unit();
        let (answers, stats) = filter_verify_scan(&db.graphs, &db.graphs[0], rational(1000), &m).unwrap();
        assert_eq!(answers.len(), 15);
        assert_eq!(stats.ops.verify_calls, 0);
    }

    #[test]
    fn matches_oracle_on_random_db() {
        let db = GraphGenerator::default().collection(33, 60).unwrap();
        let m = GedMetric::unit();
        for qi in [0, 17, 42] {
            let d = exact_distances(&db.graphs, &db.graphs[qi], &m).unwrap();
            for r in 1..=3 {
                let (answers, _) = filter_verify_scan(&db.graphs, &db.graphs[qi], rational(r), &m).unwrap();
                assert_eq!(answers, within_radius(&d, rational(r)));
            }
        }
    }

    #[test]
    fn empty_db() {
        let m = GedMetric::unit();
        let q = LabeledGraph::empty("q");
        assert!(linear_oracle(&[], &q, rational(3), &m).unwrap().is_empty());
        assert!(filter_verify_scan(&[], &q, rational(-1), &m).is_err());
    }
}
