//! Save an index as JSON, reload it against the same collection, and check
//! that it answers identically. Reloading against a different collection
//! fails the checksum.
//!
//! cargo run --example index_round_trip

use gedcmt::{CmtConfig, CmtTree, GedMetric, GraphGenerator, Rational};

fn main() -> gedcmt::Result<()> {
    let generator = GraphGenerator::default();
    let db = generator.collection(8, 80)?;
    let metric = GedMetric::unit();
    let tree = CmtTree::build(db.graphs.clone(), &metric, CmtConfig::default())?;

    let json = tree.to_json();
    let dir = std::env::temp_dir().join("gedcmt-index-example.json");
    std::fs::write(&dir, &json)?;
    println!("wrote {} bytes to {}", json.len(), dir.display());

    let loaded = CmtTree::from_json(&std::fs::read_to_string(&dir)?, db.graphs.clone(), &metric)?;
    assert_eq!(loaded.to_json(), json);
    let q = &db.graphs[3];
    let r = Rational::from_integer(2);
    assert_eq!(tree.search(q, r, &metric)?.answers, loaded.search(q, r, &metric)?.answers);
    println!("reloaded index re-serializes byte-identically and answers the same");

    let other = generator.collection(9, 80)?;
    match CmtTree::from_json(&json, other.graphs, &metric) {
        Err(e) => println!("loading against another collection: {e}"),
        Ok(_) => unreachable!(),
    }
    std::fs::remove_file(&dir)?;
    Ok(())
}
