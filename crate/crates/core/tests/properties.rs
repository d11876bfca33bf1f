mod common;

use common::*;
use gedcmt::ged::{
    assignment_ub, branch_lb, exact_ged_with, ged_within_with, induced_cost, label_multiset_lb, pair_bounds,
};
use gedcmt::lsap::solve_lsap;
use gedcmt::metric::euclidean_metric;
use gedcmt::{
    BoundConfig, CmtConfig, CmtTree, EuclideanPoint, ExactConfig, GedMetric, GraphCollection, GraphGenerator,
    Rational,
};
use proptest::prelude::*;

fn exact(a: &gedcmt::LabeledGraph, b: &gedcmt::LabeledGraph, c: &gedcmt::CostModel) -> gedcmt::ged::ExactOutcome {
    exact_ged_with(a, b, c, &ExactConfig::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn exact_matches_enumeration(a in arb_graph(5), b in arb_graph(5), c in arb_any_cost()) {
        let out = exact(&a, &b, &c);
        prop_assert_eq!(out.distance, brute_ged(&a, &b, &c));
    }

    #[test]
    fn witness_mapping_realizes_distance(a in arb_graph(6), b in arb_graph(6), c in arb_any_cost()) {
        let out = exact(&a, &b, &c);
        prop_assert!(out.mapping.is_valid_for(&a, &b));
        prop_assert_eq!(induced_cost(&a, &b, &c, &out.mapping).unwrap(), out.distance);
        prop_assert_eq!(path_cost(&a, &b, &c, &out.mapping.node_map), out.distance);
    }

    #[test]
    fn upper_bound_witness_realizes_bound(a in arb_graph(7), b in arb_graph(7), c in arb_any_cost(), k in 0usize..4) {
        let (ub, mapping) = assignment_ub(&a, &b, &c, &BoundConfig { refine_iterations: k }).unwrap();
        prop_assert!(mapping.is_valid_for(&a, &b));
        prop_assert_eq!(path_cost(&a, &b, &c, &mapping.node_map), ub);
    }

    #[test]
    fn bounds_sandwich_exact(a in arb_graph(7), b in arb_graph(7), c in arb_any_cost(), k in 0usize..4) {
        let d = exact(&a, &b, &c).distance;
        prop_assert!(label_multiset_lb(&a, &b, &c).unwrap() <= d);
        prop_assert!(branch_lb(&a, &b, &c).unwrap() <= d);
        let iv = pair_bounds(&a, &b, &c, &BoundConfig { refine_iterations: k }).unwrap();
        prop_assert!(iv.lower <= d && d <= iv.upper);
    }

    #[test]
    fn refinement_never_loosens(a in arb_graph(8), b in arb_graph(8), c in arb_any_cost()) {
        let mut prev = None;
        for k in 0..5 {
            let (ub, _) = assignment_ub(&a, &b, &c, &BoundConfig { refine_iterations: k }).unwrap();
            if let Some(p) = prev {
                prop_assert!(ub <= p, "K={} gave {} after {}", k, ub, p);
            }
            prev = Some(ub);
        }
    }

    #[test]
    fn symmetric_costs_give_symmetric_values(a in arb_graph(6), b in arb_graph(6), c in arb_metric_cost()) {
        prop_assert_eq!(exact(&a, &b, &c).distance, exact(&b, &a, &c).distance);
        prop_assert_eq!(label_multiset_lb(&a, &b, &c).unwrap(), label_multiset_lb(&b, &a, &c).unwrap());
        prop_assert_eq!(branch_lb(&a, &b, &c).unwrap(), branch_lb(&b, &a, &c).unwrap());
        let cfg = BoundConfig::default();
        prop_assert_eq!(assignment_ub(&a, &b, &c, &cfg).unwrap().0, assignment_ub(&b, &a, &c, &cfg).unwrap().0);
    }

    #[test]
    fn triangle_inequality(a in arb_graph(5), b in arb_graph(5), x in arb_graph(5), c in arb_metric_cost()) {
        let d = |p, q| exact(p, q, &c).distance;
        prop_assert!(d(&a, &x) <= d(&a, &b) + d(&b, &x));
        prop_assert_eq!(d(&a, &a), Rational::from_integer(0));
    }

    #[test]
    fn within_agrees_and_expands_no_more(a in arb_graph(7), b in arb_graph(7), c in arb_any_cost(), t in 0i64..12) {
        let tau = Rational::new(t, 2);
        let full = exact(&a, &b, &c);
        let w = ged_within_with(&a, &b, tau, &c, &ExactConfig::default()).unwrap();
        prop_assert_eq!(w.within, full.distance <= tau);
        prop_assert!(w.expanded <= full.expanded);
    }

    #[test]
    fn lsap_matches_permutations(
        m in (1usize..=6).prop_flat_map(|n| proptest::collection::vec(proptest::collection::vec((0i64..30, 1i64..4), n), n))
    ) {
        let m: Vec<Vec<Rational>> = m.into_iter().map(|row| row.into_iter().map(|(a, b)| Rational::new(a, b)).collect()).collect();
        let out = solve_lsap(&m).unwrap();
        let mut cols = out.rows.clone();
        cols.sort_unstable();
        prop_assert_eq!(cols, (0..m.len()).collect::<Vec<_>>());
        let sum: Rational = out.rows.iter().enumerate().map(|(i, &j)| m[i][j]).sum();
        prop_assert_eq!(sum, out.total);
        prop_assert_eq!(out.total, brute_lsap(&m));
    }

    #[test]
    fn jsonl_round_trip(graphs in proptest::collection::vec(arb_graph(6), 0..8)) {
        let graphs: Vec<_> = graphs.into_iter().enumerate().map(|(i, mut g)| { g.id = format!("x{i}"); g }).collect();
        let db = GraphCollection::new(graphs, "mem").unwrap();
        let back = GraphCollection::parse(&db.to_jsonl(), "mem").unwrap();
        prop_assert_eq!(back.graphs, db.graphs);
    }

    #[test]
    fn generator_output_is_valid(seed in any::<u64>(), lo in 0usize..6, span in 0usize..6, density in 0.0f64..=1.0) {
        let g = GraphGenerator { edge_density: density, ..GraphGenerator::default() }.with_nodes(lo, lo + span);
        let db = g.collection(seed, 10).unwrap();
        prop_assert_eq!(db.len(), 10);
        for (i, graph) in db.graphs.iter().enumerate() {
            prop_assert_eq!(&graph.id, &format!("g{i}"));
            prop_assert!(graph.validate().is_ok());
            prop_assert!((lo..=lo + span).contains(&graph.node_count()));
            prop_assert!(graph.node_labels.iter().all(|l| NODE_LABELS.contains(&l.as_str())));
            prop_assert!(graph.edges.iter().all(|e| EDGE_LABELS.contains(&e.label.as_str())));
        }
        prop_assert_eq!(g.collection(seed, 10).unwrap().graphs, db.graphs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn tree_answers_equal_scan(seed in any::<u64>(), branching in 2usize..5, leaf in 1usize..10, radius in 0i64..8) {
        let generator = GraphGenerator::default().with_nodes(2, 7);
        let db = generator.collection(seed, 40).unwrap();
        let metric = GedMetric::unit();
        let cfg = CmtConfig { branching, leaf_capacity: leaf, pivot_seed: seed };
        let tree = CmtTree::build(db.graphs.clone(), &metric, cfg).unwrap();
        let q = generator.perturb(&db.graphs[0], "q", seed, 2).unwrap();
        let radius = Rational::new(radius, 2);
        let truth: std::collections::BTreeSet<usize> = db.graphs.iter().enumerate()
            .filter(|(_, g)| brute_ged(&q, g, &metric.cost) <= radius).map(|(i, _)| i).collect();
        let res = tree.search(&q, radius, &metric).unwrap();
        prop_assert!(res.confirmed.is_subset(&truth));
        prop_assert!(truth.iter().all(|i| res.confirmed.contains(i) || res.suspected.contains(i)));
        prop_assert_eq!(res.answers, truth);
    }

    #[test]
    fn euclidean_tree_is_sound(seed in any::<u64>(), fuzz in 0.0f64..1.0, radius in 0.0f64..0.6, leaf in 1usize..12) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<EuclideanPoint> = (0..200).map(|_| EuclideanPoint::new(vec![rng.gen(), rng.gen(), rng.gen()])).collect();
        let metric = euclidean_metric(3, fuzz).unwrap();
        let tree = CmtTree::build(pts.clone(), &metric, CmtConfig { leaf_capacity: leaf, ..Default::default() }).unwrap();
        let q = EuclideanPoint::new(vec![rng.gen(), rng.gen(), rng.gen()]);
        let dist = |p: &EuclideanPoint| p.coords.iter().zip(&q.coords).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let truth: std::collections::BTreeSet<usize> = pts.iter().enumerate().filter(|(_, p)| dist(p) <= radius).map(|(i, _)| i).collect();
        let res = tree.search(&q, radius, &metric).unwrap();
        prop_assert!(res.confirmed.is_subset(&truth));
        prop_assert_eq!(res.answers, truth);
    }

    #[test]
    fn index_json_round_trip(seed in any::<u64>(), branching in 2usize..5, leaf in 1usize..10) {
        let db = GraphGenerator::default().collection(seed, 30).unwrap();
        let metric = GedMetric::unit();
        let tree = CmtTree::build(db.graphs.clone(), &metric, CmtConfig { branching, leaf_capacity: leaf, pivot_seed: seed }).unwrap();
        let text = tree.to_json();
        let back = CmtTree::from_json(&text, db.graphs.clone(), &metric).unwrap();
        prop_assert_eq!(back.to_json(), text);
        let q = &db.graphs[seed as usize % 30];
        let r = Rational::from_integer(3);
        prop_assert_eq!(tree.search(q, r, &metric).unwrap().answers, back.search(q, r, &metric).unwrap().answers);
    }
}

#[test]
fn generator_output_is_frozen() {
    use sha2::{Digest, Sha256};
    let db = GraphGenerator::default().collection(1, 100).unwrap();
    let text = db.to_jsonl();
    assert_eq!(text.lines().next().unwrap(), FIRST_LINE);
    assert_eq!(hex::encode(Sha256::digest(text.as_bytes())), COLLECTION_SHA256);
}

const FIRST_LINE: &str = r#"{"id":"g0","nodes":["N","C","O","N","C","N","N","O","C","N"],"edges":[[0,5,"1"],[1,2,"2"],[1,5,"1"],[1,6,"2"],[2,4,"1"],[3,4,"2"],[4,7,"2"],[5,6,"1"],[5,8,"2"],[6,8,"2"],[7,9,"1"]]}"#;
const COLLECTION_SHA256: &str = "532ce5860a0e5524470edf276307b79587030cb2c92232f732e011afb0ee6478";

#[test]
fn frozen_distances() {
    let db = GraphGenerator::default().with_nodes(3, 6).collection(1, 6).unwrap();
    let c = gedcmt::CostModel::unit();
    let got: Vec<Rational> = (1..6).map(|j| exact(&db.graphs[0], &db.graphs[j], &c).distance).collect();
    let want: Vec<Rational> = (1..6).map(|j| brute_ged(&db.graphs[0], &db.graphs[j], &c)).collect();
    assert_eq!(got, want);
    assert_eq!(got, FROZEN_G0.iter().map(|&v| Rational::from_integer(v)).collect::<Vec<_>>());
}

/// Unit-cost distances from `g0` to `g1..g5` of the seed-1 collection with
/// 3 to 6 nodes.
const FROZEN_G0: [i64; 5] = [4, 5, 5, 3, 4];
