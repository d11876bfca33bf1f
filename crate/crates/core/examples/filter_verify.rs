//! The linear filter-verify baseline against the exhaustive exact scan.
//!
//! cargo run --example filter_verify

use gedcmt::search::{filter_verify_scan, linear_oracle};
use gedcmt::{GedMetric, GraphGenerator, Rational};

fn main() -> gedcmt::Result<()> {
    let generator = GraphGenerator::default();
    let db = generator.collection(5, 60)?;
    let metric = GedMetric::unit();
    let query = generator.perturb(&db.graphs[0], "q", 1, 1)?;
    for r in 1..=3 {
        let radius = Rational::from_integer(r);
        let (answers, stats) = filter_verify_scan(&db.graphs, &query, radius, &metric)?;
        let truth = linear_oracle(&db.graphs, &query, radius, &metric)?;
        assert_eq!(answers, truth);
        println!(
            "r={r}: {} answers, {} bound calls, {} threshold verifications, agrees with exact scan",
            answers.len(),
            stats.ops.bound_calls,
            stats.ops.verify_calls
        );
    }
    Ok(())
}
