//! Benchmark runner comparing the tree against filter-verify.
//!
//! Every cell generates a dataset, builds one tree, and runs both methods on
//! identical queries. Method answers must agree exactly; any disagreement
//! aborts the run. Output is machine-independent by default: wall time is
//! only recorded when `wall_clock` is set.

use std::fmt;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize};

use crate::cmt::{CmtConfig, CmtTree, QueryStats};
use crate::cost::{rational, CostModel, Rational};
use crate::error::{Error, Result};
use crate::ged::{BoundConfig, ExactConfig};
use crate::graph::{mix_seed, GraphGenerator};
use crate::metric::GedMetric;
use crate::search::{exact_distances, filter_verify_scan, within_radius};

pub const CSV_HEADER: &str = "dataset_size,avg_graph_nodes,radius,method,result_count,exact_calls,bound_calls,lsap_calls,verify_calls,nodes_visited,wall_ms,seed";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub node_ranges: Vec<(usize, usize)>,
    #[serde(deserialize_with = "radii_from_json", serialize_with = "radii_to_json")]
    pub radii: Vec<Rational>,
    pub queries: usize,
    pub seeds: Vec<u64>,
    #[serde(with = "cost_as_string")]
    pub cost_model: CostModel,
    pub refine_iterations: usize,
    pub cmt: CmtConfig,
    pub node_alphabet: Vec<String>,
    pub edge_alphabet: Vec<String>,
    pub edge_density: f64,
    /// Upper end of the number of random edits applied to a sampled
    /// database graph to form a query.
    pub query_edits: usize,
    pub node_cap: usize,
    /// Also compare every cell against an exhaustive exact scan.
    pub check_oracle: bool,
    /// Record measured wall time; otherwise `wall_ms` is written as 0 and the
    /// CSV is byte-reproducible.
    pub wall_clock: bool,
    pub output: Option<PathBuf>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        let g = GraphGenerator::default();
        BenchConfig {
            sizes: vec![50, 100, 200, 500],
            node_ranges: vec![(4, 8), (8, 12)],
            radii: [1, 2, 3, 5].map(rational).to_vec(),
            queries: 5,
            seeds: vec![1],
            cost_model: CostModel::unit(),
            refine_iterations: BoundConfig::default().refine_iterations,
            cmt: CmtConfig::default(),
            node_alphabet: g.node_alphabet,
            edge_alphabet: g.edge_alphabet,
            edge_density: g.edge_density,
            query_edits: 2,
            node_cap: ExactConfig::default().node_cap,
            check_oracle: false,
            wall_clock: false,
            output: None,
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RadiusRepr {
    Int(i64),
    Text(String),
}

fn radii_from_json<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
    let raw = Vec::<RadiusRepr>::deserialize(d)?;
    raw.into_iter()
        .map(|r| match r {
            RadiusRepr::Int(i) => Ok(rational(i)),
            RadiusRepr::Text(s) => s.parse::<Rational>().map_err(serde::de::Error::custom),
        })
        .collect()
}

fn radii_to_json<S: serde::Serializer>(radii: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(radii.iter().map(ToString::to_string))
}

mod cost_as_string {
    use super::CostModel;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(c: &CostModel, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(c)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CostModel, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

impl BenchConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: BenchConfig = serde_json::from_str(text)?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn check(&self) -> Result<()> {
        let invalid = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if self.sizes.is_empty() || self.node_ranges.is_empty() || self.radii.is_empty() || self.seeds.is_empty() {
            return invalid("sizes, node_ranges, radii and seeds must be non-empty");
        }
        if self.queries == 0 {
            return invalid("queries must be at least 1");
        }
        if self.sizes.contains(&0) {
            return invalid("dataset sizes must be positive");
        }
        if self.radii.iter().any(|r| *r < rational(0)) {
            return Err(Error::NegativeRadius);
        }
        self.cost_model.check_metric()?;
        self.cmt.check()?;
        for &(lo, hi) in &self.node_ranges {
            self.generator(lo, hi).check()?;
            if hi > self.node_cap {
                return Err(Error::Infeasible(format!(
                    "node range {lo}..{hi} exceeds the exact-search cap of {}",
                    self.node_cap
                )));
            }
        }
        Ok(())
    }

    fn generator(&self, lo: usize, hi: usize) -> GraphGenerator {
        GraphGenerator {
            min_nodes: lo,
            max_nodes: hi,
            node_alphabet: self.node_alphabet.clone(),
            edge_alphabet: self.edge_alphabet.clone(),
            edge_density: self.edge_density,
        }
    }

    pub fn metric(&self) -> Result<GedMetric> {
        GedMetric::new(
            self.cost_model,
            BoundConfig { refine_iterations: self.refine_iterations },
            ExactConfig { node_cap: self.node_cap },
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Method {
    Cmt,
    FilterVerify,
    CmtBuild,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Cmt => "cmt",
            Method::FilterVerify => "filter_verify",
            Method::CmtBuild => "cmt_build",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub dataset_size: usize,
    pub avg_graph_nodes: f64,
    pub radius: Rational,
    pub method: Method,
    pub result_count: usize,
    pub exact_calls: u64,
    pub bound_calls: u64,
    pub lsap_calls: u64,
    pub verify_calls: u64,
    pub nodes_visited: u64,
    pub wall_ms: f64,
    pub seed: u64,
}

impl BenchRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{:.2},{},{},{},{},{},{},{},{},{:.3},{}",
            self.dataset_size,
            self.avg_graph_nodes,
            self.radius,
            self.method,
            self.result_count,
            self.exact_calls,
            self.bound_calls,
            self.lsap_calls,
            self.verify_calls,
            self.nodes_visited,
            self.wall_ms,
            self.seed
        )
    }

    pub fn work(&self) -> u64 {
        self.exact_calls + self.bound_calls + self.verify_calls
    }
}

/// Per (dataset, radius) comparison of total work over all queries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellSummary {
    pub dataset_size: usize,
    pub node_range: (usize, usize),
    pub seed: u64,
    pub radius: Rational,
    pub cmt_work: u64,
    pub filter_verify_work: u64,
}

impl CellSummary {
    pub fn fewer(&self) -> &'static str {
        match self.cmt_work.cmp(&self.filter_verify_work) {
            std::cmp::Ordering::Less => "cmt",
            std::cmp::Ordering::Greater => "filter_verify",
            std::cmp::Ordering::Equal => "tie",
        }
    }
}

impl fmt::Display for CellSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "size={} nodes={}..{} seed={} radius={}: cmt work={} filter_verify work={} -> fewer: {}",
            self.dataset_size,
            self.node_range.0,
            self.node_range.1,
            self.seed,
            self.radius,
            self.cmt_work,
            self.filter_verify_work,
            self.fewer()
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub build_rows: Vec<BenchRow>,
    pub cells: Vec<CellSummary>,
}

fn to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_line());
        out.push('\n');
    }
    out
}

impl BenchReport {
    /// Query rows, one per (method, query).
    pub fn csv(&self) -> String {
        to_csv(&self.rows)
    }

    /// Build rows, one per dataset.
    pub fn build_csv(&self) -> String {
        to_csv(&self.build_rows)
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.cells {
            writeln!(out, "{c}").unwrap();
        }
        let cmt = self.cells.iter().filter(|c| c.fewer() == "cmt").count();
        let fv = self.cells.iter().filter(|c| c.fewer() == "filter_verify").count();
        writeln!(
            out,
            "{} cells: cmt did less work in {cmt}, filter_verify in {fv}, tied in {}",
            self.cells.len(),
            self.cells.len() - cmt - fv
        )
        .unwrap();
        out
    }

    /// Writes `<path>`, `<stem>.build.csv` and `<stem>.report.txt`.
    pub fn write(&self, path: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::write(path, self.csv())?;
        let build = path.with_extension("build.csv");
        let report = path.with_extension("report.txt");
        std::fs::write(&build, self.build_csv())?;
        std::fs::write(&report, self.summary())?;
        Ok((build, report))
    }
}

struct Cell {
    size: usize,
    range: (usize, usize),
    seed: u64,
}

struct CellOutput {
    rows: Vec<BenchRow>,
    build: BenchRow,
    summaries: Vec<CellSummary>,
}

pub fn run_bench(config: &BenchConfig) -> Result<BenchReport> {
    config.check()?;
    let metric = config.metric()?;
    let mut cells = Vec::new();
    for &size in &config.sizes {
        for &range in &config.node_ranges {
            for &seed in &config.seeds {
                cells.push(Cell { size, range, seed });
            }
        }
    }
    let outputs = cells
        .par_iter()
        .map(|cell| run_cell(config, &metric, cell))
        .collect::<Result<Vec<_>>>()?;
    let mut report = BenchReport::default();
    for out in outputs {
        report.rows.extend(out.rows);
        report.build_rows.push(out.build);
        report.cells.extend(out.summaries);
    }
    Ok(report)
}

fn ms(stats: &QueryStats, enabled: bool) -> f64 {
    if enabled {
        stats.wall_time.as_secs_f64() * 1e3
    } else {
        0.0
    }
}

fn run_cell(config: &BenchConfig, metric: &GedMetric, cell: &Cell) -> Result<CellOutput> {
    let (lo, hi) = cell.range;
    let dataset_seed = mix_seed(mix_seed(cell.seed, cell.size as u64), ((lo as u64) << 32) | hi as u64);
    let generator = config.generator(lo, hi);
    let db = generator.collection(dataset_seed, cell.size)?;
    let avg_nodes = db.graphs.iter().map(|g| g.node_count()).sum::<usize>() as f64 / db.len() as f64;
    let label = format!("size={} nodes={lo}..{hi} seed={}", cell.size, cell.seed);

    let tree = CmtTree::build(db.graphs.clone(), metric, config.cmt)?;
    let build = BenchRow {
        dataset_size: cell.size,
        avg_graph_nodes: avg_nodes,
        radius: rational(0),
        method: Method::CmtBuild,
        result_count: tree.len(),
        exact_calls: tree.build_stats.ops.exact_calls,
        bound_calls: tree.build_stats.ops.bound_calls,
        lsap_calls: tree.build_stats.ops.lsap_calls,
        verify_calls: tree.build_stats.ops.verify_calls,
        nodes_visited: tree.build_stats.nodes as u64,
        wall_ms: if config.wall_clock { tree.build_stats.wall_time.as_secs_f64() * 1e3 } else { 0.0 },
        seed: cell.seed,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(dataset_seed, 0x0051_5545_5259));
    let mut queries = Vec::with_capacity(config.queries);
    for k in 0..config.queries {
        let base = &db.graphs[rng.gen_range(0..cell.size as u32) as usize];
        let edits = rng.gen_range(0..=config.query_edits as u32) as usize;
        queries.push(generator.perturb(base, format!("q{k}"), rng.gen(), edits)?);
    }
    let truth = if config.check_oracle {
        Some(queries.iter().map(|q| exact_distances(&db.graphs, q, metric)).collect::<Result<Vec<_>>>()?)
    } else {
        None
    };

    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for &radius in &config.radii {
        let mut summary = CellSummary {
            dataset_size: cell.size,
            node_range: cell.range,
            seed: cell.seed,
            radius,
            cmt_work: 0,
            filter_verify_work: 0,
        };
        for (k, q) in queries.iter().enumerate() {
            let cmt = tree.search(q, radius, metric)?;
            let (fv, fv_stats) = filter_verify_scan(&db.graphs, q, radius, metric)?;
            let mismatch = |detail: String| Error::AnswerMismatch {
                dataset: label.clone(),
                query: q.id.clone(),
                radius: radius.to_string(),
                detail,
            };
            if cmt.answers != fv {
                return Err(mismatch(format!("cmt {:?} vs filter_verify {:?}", cmt.answers, fv)));
            }
            if let Some(truth) = &truth {
                let want = within_radius(&truth[k], radius);
                if want != fv {
                    return Err(mismatch(format!("methods {:?} vs exact scan {:?}", fv, want)));
                }
            }
            let row = |method, stats: &QueryStats| BenchRow {
                dataset_size: cell.size,
                avg_graph_nodes: avg_nodes,
                radius,
                method,
                result_count: fv.len(),
                exact_calls: stats.ops.exact_calls,
                bound_calls: stats.ops.bound_calls,
                lsap_calls: stats.ops.lsap_calls,
                verify_calls: stats.ops.verify_calls,
                nodes_visited: stats.nodes_visited,
                wall_ms: ms(stats, config.wall_clock),
                seed: cell.seed,
            };
            let a = row(Method::Cmt, &cmt.stats);
            let b = row(Method::FilterVerify, &fv_stats);
            summary.cmt_work += a.work();
            summary.filter_verify_work += b.work();
            rows.push(a);
            rows.push(b);
        }
        summaries.push(summary);
    }
    Ok(CellOutput { rows, build, summaries })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> BenchConfig {
        BenchConfig {
            sizes: vec![20],
            node_ranges: vec![(3, 6)],
            radii: vec![rational(1)],
            queries: 1,
            check_oracle: true,
            ..Default::default()
        }
    }

    #[test]
    fn one_query_gives_two_rows() {
        let report = run_bench(&small()).unwrap();
        assert_eq!(report.rows.len(), 2);
        assert_eq!(report.rows[0].result_count, report.rows[1].result_count);
        assert_eq!(report.rows[0].method, Method::Cmt);
        assert_eq!(report.rows[1].method, Method::FilterVerify);
        assert_eq!(report.build_rows.len(), 1);
        assert_eq!(report.cells.len(), 1);
    }

    #[test]
    fn csv_is_deterministic() {
        let cfg = BenchConfig { queries: 3, radii: vec![rational(1), rational(2)], ..small() };
        let a = run_bench(&cfg).unwrap();
        let b = run_bench(&cfg).unwrap();
        assert_eq!(a.csv(), b.csv());
        assert_eq!(a.build_csv(), b.build_csv());
        assert!(a.csv().starts_with(&format!("{CSV_HEADER}\n")));
        assert_eq!(a.csv().lines().count(), 1 + 12);
    }

    #[test]
    fn config_json_round_trip_and_defaults() {
        let cfg = BenchConfig::from_json(r#"{"sizes":[10],"radii":[1,"3/2"],"cost_model":"1,1,1,1,1,1"}"#).unwrap();
        assert_eq!(cfg.radii, vec![rational(1), Rational::new(3, 2)]);
        assert_eq!(cfg.node_ranges, vec![(4, 8), (8, 12)]);
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(BenchConfig::from_json(&text).unwrap(), cfg);
    }

    #[test]
    fn invalid_configs() {
        assert!(BenchConfig::from_json(r#"{"sizes":[]}"#).is_err());
        assert!(BenchConfig::from_json(r#"{"bogus":1}"#).is_err());
        assert!(matches!(BenchConfig::from_json(r#"{"node_ranges":[[4,20]]}"#), Err(Error::Infeasible(_))));
        assert!(BenchConfig::from_json(r#"{"cost_model":"1,2,1,1,1,1"}"#).is_err());
    }
}
