//! Cheap lower and upper bounds bracketing the exact distance, and the
//! effect of more refinement passes on the upper bound.
//!
//! cargo run --example bounds

use gedcmt::ged::{assignment_ub, branch_lb, exact_ged, label_multiset_lb, pair_bounds};
use gedcmt::{BoundConfig, CostModel, GraphGenerator};

fn main() -> gedcmt::Result<()> {
    let cost = CostModel::unit();
    let generator = GraphGenerator::default().with_nodes(7, 10);
    for seed in 0..5 {
        let a = generator.generate(format!("a{seed}"), seed)?;
        let b = generator.generate(format!("b{seed}"), seed + 100)?;
        let exact = exact_ged(&a, &b, &cost)?.0;
        let multiset = label_multiset_lb(&a, &b, &cost)?;
        let branch = branch_lb(&a, &b, &cost)?;
        let uppers: Vec<String> = [0, 1, 4]
            .iter()
            .map(|&k| assignment_ub(&a, &b, &cost, &BoundConfig { refine_iterations: k }).map(|u| u.0.to_string()))
            .collect::<gedcmt::Result<_>>()?;
        let interval = pair_bounds(&a, &b, &cost, &BoundConfig::default())?;
        println!(
            "pair {seed}: multiset {multiset} <= branch {branch} <= exact {exact} <= upper (K=0,1,4) {} | interval [{}, {}]",
            uppers.join(","),
            interval.lower,
            interval.upper
        );
    }
    Ok(())
}
