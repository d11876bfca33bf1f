//! The tree on points in the plane. With exact bounds nothing is left
//! uncertain; widening the bounds by a fuzz term leaves suspects that the
//! verification pass resolves.
//!
//! cargo run --example euclidean_debug

use gedcmt::metric::euclidean_metric;
use gedcmt::{CmtConfig, CmtTree, EuclideanPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> gedcmt::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let points: Vec<EuclideanPoint> = (0..1000).map(|_| EuclideanPoint::new(vec![rng.gen(), rng.gen()])).collect();
    let query = EuclideanPoint::new(vec![0.5, 0.5]);
    let radius = 0.1;

    for fuzz in [0.0, 0.05, 0.5] {
        let metric = euclidean_metric(2, fuzz)?;
        let tree = CmtTree::build(points.clone(), &metric, CmtConfig { leaf_capacity: 16, ..Default::default() })?;
        let res = tree.search(&query, radius, &metric)?;
        println!(
            "fuzz {fuzz}: confirmed {} suspected {} answers {} (bound calls {}, verify calls {}, subtrees pruned {})",
            res.confirmed.len(),
            res.suspected.len(),
            res.answers.len(),
            res.stats.ops.bound_calls,
            res.stats.ops.verify_calls,
            res.stats.subtrees_pruned
        );
    }
    Ok(())
}
