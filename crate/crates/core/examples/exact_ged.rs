//! Exact graph edit distance between two small molecules, with the optimal
//! node mapping and a non-unit cost model.
//!
//! cargo run --example exact_ged

use gedcmt::ged::{exact_ged, exact_ged_with, induced_cost};
use gedcmt::{CostModel, Edge, ExactConfig, LabeledGraph};

fn main() -> gedcmt::Result<()> {
    // Ethanol-like C-C-O against acetic-acid-like C-C(=O)-O.
    let ethanol = LabeledGraph::new("ethanol", ["C", "C", "O"], vec![Edge::new(0, 1, "1"), Edge::new(1, 2, "1")])?;
    let acid = LabeledGraph::new(
        "acid",
        ["C", "C", "O", "O"],
        vec![Edge::new(0, 1, "1"), Edge::new(1, 2, "2"), Edge::new(1, 3, "1")],
    )?;

    let (d, mapping) = exact_ged(&ethanol, &acid, &CostModel::unit())?;
    println!("unit costs: GED = {d}");
    for (i, target) in mapping.node_map.iter().enumerate() {
        match target {
            Some(j) => println!("  {}#{i} -> {}#{j}", ethanol.node_labels[i], acid.node_labels[*j]),
            None => println!("  {}#{i} deleted", ethanol.node_labels[i]),
        }
    }
    for j in &mapping.inserted {
        println!("  insert {}#{j}", acid.node_labels[*j]);
    }
    assert_eq!(induced_cost(&ethanol, &acid, &CostModel::unit(), &mapping)?, d);

    // Relabelling a bond costs half as much as removing it.
    let cheap_sub: CostModel = "1,1,1,1,1,1/2".parse()?;
    let out = exact_ged_with(&ethanol, &acid, &cheap_sub, &ExactConfig::default())?;
    println!("cost model {cheap_sub}: GED = {} after expanding {} partial mappings", out.distance, out.expanded);
    Ok(())
}

