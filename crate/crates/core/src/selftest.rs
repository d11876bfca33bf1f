//! Property suites behind the `selftest` subcommand.
//!
//! Each suite draws seeded random inputs, checks an invariant against a
//! brute-force reference, and reports the number of cases and the first
//! counterexample if any.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cmt::{CmtConfig, CmtTree};
use crate::cost::{rational, CostModel, Rational};
use crate::error::Result;
use crate::ged::{
    assignment_ub, branch_lb, exact_ged_with, ged_within_with, label_multiset_lb, BoundConfig, ExactConfig,
};
use crate::graph::{mix_seed, random_graph, GraphGenerator, LabeledGraph};
use crate::lsap::solve_lsap;
use crate::metric::{euclidean_metric, EuclideanPoint, GedMetric, MetricSpec};
use crate::search::{filter_verify_scan, linear_oracle};

const NODE_LABELS: [&str; 3] = ["C", "N", "O"];
const EDGE_LABELS: [&str; 2] = ["1", "2"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    /// Case counts of the acceptance suites.
    Full,
    /// Roughly a tenth of the full case counts.
    Quick,
}

impl Scale {
    fn cases(self, full: usize) -> usize {
        match self {
            Scale::Full => full,
            Scale::Quick => full.div_ceil(10),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub failure: Option<String>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

impl fmt::Display for SuiteOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.failure {
            None => write!(f, "PASS {} ({} cases)", self.name, self.cases),
            Some(why) => write!(f, "FAIL {} ({} cases): {why}", self.name, self.cases),
        }
    }
}

type Check = fn(Scale, u64) -> Result<(usize, Option<String>)>;

const SUITES: [(&str, Check); 7] = [
    ("oracle equivalence", oracle_equivalence),
    ("bound sandwich", bound_sandwich),
    ("metric axioms", metric_axioms),
    ("lsap exactness", lsap_exactness),
    ("euclidean debug path", euclidean_debug),
    ("threshold verification", threshold_consistency),
    ("index round trip", index_round_trip),
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|(n, _)| *n).collect()
}

/// Runs every suite, calling `report` as each one finishes.
pub fn run_selftest(scale: Scale, seed: u64, mut report: impl FnMut(&SuiteOutcome)) -> Vec<SuiteOutcome> {
    SUITES
        .iter()
        .map(|(name, check)| {
            let out = match check(scale, seed) {
                Ok((cases, failure)) => SuiteOutcome { name, cases, failure },
                Err(e) => SuiteOutcome { name, cases: 0, failure: Some(format!("error: {e}")) },
            };
            report(&out);
            out
        })
        .collect()
}

fn small_graph(rng: &mut ChaCha8Rng, max_nodes: usize) -> Result<LabeledGraph> {
    random_graph(rng.gen(), (0, max_nodes), &NODE_LABELS, &EDGE_LABELS, 0.4)
}

fn oracle_equivalence(scale: Scale, seed: u64) -> Result<(usize, Option<String>)> {
    let metric = GedMetric::unit();
    let generator = GraphGenerator::default().with_nodes(4, 10);
    let radii = [1, 2, 3, 5].map(rational);
    let mut cases = 0;
    for d in 0..scale.cases(50) as u64 {
        let db = generator.collection(mix_seed(seed, d), 100)?;
        let tree = CmtTree::build(db.graphs.clone(), &metric, CmtConfig { pivot_seed: d, ..CmtConfig::default() })?;
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed ^ 0xACCE, d));
        for k in 0..10 {
            let base = &db.graphs[rng.gen_range(0..db.len())];
            let q = generator.perturb(base, format!("q{k}"), rng.gen(), rng.gen_range(0..=3))?;
            for &r in &radii {
                cases += 1;
                let truth = linear_oracle(&db.graphs, &q, r, &metric)?;
                let cmt = tree.search(&q, r, &metric)?.answers;
                let (fv, _) = filter_verify_scan(&db.graphs, &q, r, &metric)?;
                if cmt != truth || fv != truth {
                    return Ok((cases, Some(format!("dataset {d} query {k} radius {r}: oracle {truth:?} cmt {cmt:?} filter_verify {fv:?}"))));
                }
            }
        }
    }
    Ok((cases, None))
}

fn bound_sandwich(scale: Scale, seed: u64) -> Result<(usize, Option<String>)> {
    let cost = CostModel::unit();
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 2));
    let n = scale.cases(1000);
    for i in 0..n {
        let (a, b) = (small_graph(&mut rng, 8)?, small_graph(&mut rng, 8)?);
        let d = exact_ged_with(&a, &b, &cost, &ExactConfig::default())?.distance;
        let lm = label_multiset_lb(&a, &b, &cost)?;
        let br = branch_lb(&a, &b, &cost)?;
        let (ub, _) = assignment_ub(&a, &b, &cost, &BoundConfig::default())?;
        if !(lm <= d && br <= d && d <= ub) {
            return Ok((i + 1, Some(format!("{} vs {}: multiset {lm} branch {br} exact {d} upper {ub}", a.id, b.id))));
        }
    }
    Ok((n, None))
}

fn metric_axioms(scale: Scale, seed: u64) -> Result<(usize, Option<String>)> {
    let metric = GedMetric::unit();
    let mut ops = Default::default();
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 3));
    let n = scale.cases(300);
    for i in 0..n {
        let g = (0..3).map(|_| small_graph(&mut rng, 6)).collect::<Result<Vec<_>>>()?;
        let mut d = |x: usize, y: usize| metric.exact(&g[x], &g[y], &mut ops);
        let (ab, ba, bc, ac) = (d(0, 1)?, d(1, 0)?, d(1, 2)?, d(0, 2)?);
        if ab != ba || ac > ab + bc {
            return Ok((i + 1, Some(format!("d(a,b)={ab} d(b,a)={ba} d(b,c)={bc} d(a,c)={ac}"))));
        }
    }
    Ok((n, None))
}

/// Minimum over all permutations by Heap's algorithm.
fn brute_lsap(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let total = |p: &[usize]| p.iter().enumerate().map(|(i, &j)| m[i][j]).sum::<Rational>();
    let mut best = total(&perm);
    let mut c = vec![0; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            perm.swap(if i % 2 == 0 { 0 } else { c[i] }, i);
            best = best.min(total(&perm));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    best
}

fn lsap_exactness(scale: Scale, seed: u64) -> Result<(usize, Option<String>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 4));
    let n = scale.cases(200);
    for i in 0..n {
        let size = rng.gen_range(1..=7);
        let m: Vec<Vec<Rational>> = (0..size)
            .map(|_| (0..size).map(|_| Rational::new(rng.gen_range(0..40), rng.gen_range(1..4))).collect())
            .collect();
        let got = solve_lsap(&m)?.total;
        let want = brute_lsap(&m);
        if got != want {
            return Ok((i + 1, Some(format!("{size}x{size} matrix: solver {got}, brute force {want}"))));
        }
    }
    Ok((n, None))
}

fn euclidean_debug(scale: Scale, seed: u64) -> Result<(usize, Option<String>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 5));
    let pts: Vec<EuclideanPoint> =
        (0..scale.cases(1000)).map(|_| EuclideanPoint::new(vec![rng.gen::<f64>(), rng.gen::<f64>()])).collect();
    let mut cases = 0;
    for fuzz in [0.0, 0.5] {
        let metric = euclidean_metric(2, fuzz)?;
        let tree = CmtTree::build(pts.clone(), &metric, CmtConfig::default())?;
        for _ in 0..20 {
            let q = EuclideanPoint::new(vec![rng.gen::<f64>(), rng.gen::<f64>()]);
            let r = rng.gen_range(0.0..0.3);
            cases += 1;
            let truth: BTreeSet<usize> =
                pts.iter().enumerate().filter(|(_, p)| metric.distance(&q, p).unwrap() <= r).map(|(i, _)| i).collect();
            let res = tree.search(&q, r, &metric)?;
            let union: BTreeSet<usize> = res.confirmed.union(&res.suspected).copied().collect();
            let ok = res.confirmed.is_subset(&truth)
                && truth.is_subset(&union)
                && res.answers == truth
                && (fuzz > 0.0 || res.suspected.is_empty());
            if !ok {
                return Ok((cases, Some(format!("fuzz {fuzz} radius {r}: confirmed {} suspected {} answers {} truth {}", res.confirmed.len(), res.suspected.len(), res.answers.len(), truth.len()))));
            }
        }
    }
    Ok((cases, None))
}

fn threshold_consistency(scale: Scale, seed: u64) -> Result<(usize, Option<String>)> {
    let cost = CostModel::unit();
    let config = ExactConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 6));
    let mut cases = 0;
    for _ in 0..scale.cases(500) {
        let (a, b) = (small_graph(&mut rng, 7)?, small_graph(&mut rng, 7)?);
        let exact = exact_ged_with(&a, &b, &cost, &config)?;
        for tau in [0, 1, 2, 3, 5].map(rational) {
            cases += 1;
            let w = ged_within_with(&a, &b, tau, &cost, &config)?;
            if w.within != (exact.distance <= tau) || w.expanded > exact.expanded {
                return Ok((cases, Some(format!("{} vs {} tau {tau}: within {} ({} expanded), exact {} ({} expanded)", a.id, b.id, w.within, w.expanded, exact.distance, exact.expanded))));
            }
        }
    }
    Ok((cases, None))
}

fn index_round_trip(scale: Scale, seed: u64) -> Result<(usize, Option<String>)> {
    let metric = GedMetric::unit();
    let generator = GraphGenerator::default().with_nodes(3, 7);
    let n = scale.cases(20);
    for i in 0..n as u64 {
        let db = generator.collection(mix_seed(seed ^ 0x1DE, i), 40)?;
        let config = CmtConfig { branching: 2 + i as usize % 3, leaf_capacity: 2 + i as usize % 7, pivot_seed: i };
        let tree = CmtTree::build(db.graphs.clone(), &metric, config)?;
        let text = tree.to_json();
        let back = CmtTree::from_json(&text, db.graphs.clone(), &metric)?;
        if back.to_json() != text {
            return Ok((i as usize + 1, Some(format!("index {i}: re-serialization differs"))));
        }
        for (k, q) in db.graphs.iter().step_by(13).enumerate() {
            let r = rational(k as i64 % 4);
            let (a, b) = (tree.search(q, r, &metric)?, back.search(q, r, &metric)?);
            if a.answers != b.answers || a.confirmed != b.confirmed || a.suspected != b.suspected {
                return Ok((i as usize + 1, Some(format!("index {i}: query {} radius {r} differs after reload", q.id))));
            }
        }
    }
    Ok((n, None))
}
