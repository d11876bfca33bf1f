//! Build a tree over random molecules and answer range queries, showing how
//! the answer splits into confirmed and verified suspects.
//!
//! cargo run --example build_and_query

use gedcmt::{CmtConfig, CmtTree, GedMetric, GraphGenerator, Rational};

fn main() -> gedcmt::Result<()> {
    let generator = GraphGenerator::default().with_nodes(4, 10);
    let db = generator.collection(11, 300)?;
    let metric = GedMetric::unit();
    let tree = CmtTree::build(db.graphs.clone(), &metric, CmtConfig { branching: 3, leaf_capacity: 8, pivot_seed: 0 })?;
    println!(
        "built over {} graphs: {} nodes, depth {}, {} exact distances",
        tree.len(),
        tree.root.node_count(),
        tree.root.depth(),
        tree.build_stats.ops.exact_calls
    );

    let query = generator.perturb(&db.graphs[42], "q", 5, 2)?;
    for r in [0, 1, 2, 3, 5] {
        let radius = Rational::from_integer(r);
        let pre = tree.range_query(&query, radius, &metric)?;
        let done = tree.verify_suspected(&pre, &query, radius, &metric)?;
        let names: Vec<&str> = done.answers.iter().map(|&i| tree.key(i)).collect();
        println!(
            "r={r}: {} confirmed, {} suspected -> {} answers {:?}",
            pre.confirmed.len(),
            pre.suspected.len(),
            done.answers.len(),
            names
        );
    }
    Ok(())
}
