use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gedcmt::bench::{run_bench, BenchConfig};
use gedcmt::search::filter_verify_scan;
use gedcmt::selftest::{run_selftest, Scale};
use gedcmt::{
    BoundConfig, CmtConfig, CmtTree, CostModel, Error, ExactConfig, GedMetric, GraphCollection, GraphGenerator,
    LabeledGraph, QueryStats, Rational, Result,
};

#[derive(Parser)]
#[command(name = "gedcmt", version, about = "Graph edit distance range search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random graph collection as JSONL.
    Gen(GenArgs),
    /// Build an index over a collection and write it as JSON.
    Build(BuildArgs),
    /// Run one range query against a collection or a saved index.
    Query(QueryArgs),
    /// Run the benchmark sweep described by a JSON config.
    Bench(BenchArgs),
    /// Run the property suites.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    count: usize,
    /// Inclusive node-count range, `MIN..MAX`.
    #[arg(long, default_value = "4..10", value_parser = parse_range)]
    nodes: (usize, usize),
    /// Comma-separated node labels.
    #[arg(long, default_value = "C,N,O")]
    node_labels: String,
    /// Comma-separated edge labels.
    #[arg(long, default_value = "1,2")]
    edge_labels: String,
    #[arg(long, default_value_t = 0.3)]
    density: f64,
    #[arg(long)]
    out: PathBuf,
}

/// Metric and tree options. Unset values fall back to the defaults, or to the
/// bench config for `bench`.
#[derive(Args, Default)]
struct TuningArgs {
    /// Six costs: node ins, node del, node sub, edge ins, edge del, edge sub.
    #[arg(long, value_parser = parse_cost)]
    cost_model: Option<CostModel>,
    /// Swap-refinement passes for the upper bound.
    #[arg(long = "refine-iters", value_name = "K")]
    refine_iters: Option<usize>,
    #[arg(long)]
    branching: Option<usize>,
    #[arg(long)]
    leaf_capacity: Option<usize>,
    /// Largest graph the exact search accepts.
    #[arg(long)]
    node_cap: Option<usize>,
}

impl TuningArgs {
    fn metric(&self) -> Result<GedMetric> {
        GedMetric::new(
            self.cost_model.unwrap_or_default(),
            BoundConfig { refine_iterations: self.refine_iters.unwrap_or(BoundConfig::default().refine_iterations) },
            ExactConfig { node_cap: self.node_cap.unwrap_or(ExactConfig::default().node_cap) },
        )
    }

    fn cmt(&self, seed: u64) -> CmtConfig {
        let d = CmtConfig::default();
        CmtConfig {
            branching: self.branching.unwrap_or(d.branching),
            leaf_capacity: self.leaf_capacity.unwrap_or(d.leaf_capacity),
            pivot_seed: seed,
        }
    }
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long)]
    db: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Pivot selection seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    tuning: TuningArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Cmt,
    FilterVerify,
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long)]
    db: PathBuf,
    /// Saved index over `--db`; built in memory when absent.
    #[arg(long)]
    index: Option<PathBuf>,
    /// Id of the query graph.
    #[arg(long)]
    query_id: String,
    /// Collection holding the query graph; defaults to `--db`.
    #[arg(long)]
    queries: Option<PathBuf>,
    /// Non-negative integer or fraction such as `3/2`.
    #[arg(long, value_parser = parse_radius)]
    radius: Rational,
    #[arg(long, value_enum, default_value = "cmt")]
    method: Method,
    /// Pivot selection seed for an in-memory build.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    tuning: TuningArgs,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV destination; overrides the config's `output`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replaces the config's seed list with this single seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Record measured wall time in the CSV.
    #[arg(long)]
    wall_clock: bool,
    #[command(flatten)]
    tuning: TuningArgs,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Run about a tenth of the cases.
    #[arg(long)]
    quick: bool,
}

fn parse_range(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected MIN..MAX, got `{s}`"))?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let lo = a.trim().parse().map_err(|e| format!("`{a}`: {e}"))?;
    let hi = b.trim().parse().map_err(|e| format!("`{b}`: {e}"))?;
    Ok((lo, hi))
}

fn parse_cost(s: &str) -> std::result::Result<CostModel, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_radius(s: &str) -> std::result::Result<Rational, String> {
    let r: Rational = s.trim().parse().map_err(|e| format!("`{s}`: {e}"))?;
    if r < Rational::from_integer(0) {
        return Err("radius must be non-negative".into());
    }
    Ok(r)
}

fn labels(s: &str) -> Vec<String> {
    s.split(',').map(|p| p.trim().to_string()).filter(|p| !p.is_empty()).collect()
}

fn gen(args: GenArgs) -> Result<()> {
    let generator = GraphGenerator {
        min_nodes: args.nodes.0,
        max_nodes: args.nodes.1,
        node_alphabet: labels(&args.node_labels),
        edge_alphabet: labels(&args.edge_labels),
        edge_density: args.density,
    };
    let db = generator.collection(args.seed, args.count)?;
    std::fs::write(&args.out, db.to_jsonl())?;
    println!("wrote {} graphs to {}", db.len(), args.out.display());
    Ok(())
}

fn build(args: BuildArgs) -> Result<()> {
    let metric = args.tuning.metric()?;
    let db = GraphCollection::read(&args.db)?;
    let tree = CmtTree::build(db.graphs, &metric, args.tuning.cmt(args.seed))?;
    std::fs::write(&args.out, tree.to_json())?;
    let s = tree.build_stats;
    println!(
        "indexed {} graphs: {} tree nodes, depth {}, exact_calls={}",
        tree.len(),
        s.nodes,
        tree.root.depth(),
        s.ops.exact_calls
    );
    println!("wrote {}", args.out.display());
    Ok(())
}

fn ids(db: &[LabeledGraph], set: &std::collections::BTreeSet<usize>) -> String {
    set.iter().map(|&i| db[i].id.as_str()).collect::<Vec<_>>().join(" ")
}

fn print_stats(stats: &QueryStats) {
    let o = stats.ops;
    println!(
        "stats: exact_calls={} bound_calls={} lsap_calls={} verify_calls={} nodes_visited={} subtrees_confirmed={} subtrees_pruned={} wall_ms={:.3}",
        o.exact_calls,
        o.bound_calls,
        o.lsap_calls,
        o.verify_calls,
        stats.nodes_visited,
        stats.subtrees_confirmed,
        stats.subtrees_pruned,
        stats.wall_time.as_secs_f64() * 1e3
    );
}

fn query(args: QueryArgs) -> Result<()> {
    let metric = args.tuning.metric()?;
    let db = GraphCollection::read(&args.db)?;
    let q = match &args.queries {
        Some(path) => GraphCollection::read(path)?.get(&args.query_id).cloned(),
        None => db.get(&args.query_id).cloned(),
    }
    .ok_or_else(|| Error::InvalidArgument(format!("no graph with id `{}`", args.query_id)))?;

    if let Method::FilterVerify = args.method {
        let (answers, stats) = filter_verify_scan(&db.graphs, &q, args.radius, &metric)?;
        println!("answers ({}): {}", answers.len(), ids(&db.graphs, &answers));
        print_stats(&stats);
        return Ok(());
    }
    let tree = match &args.index {
        Some(path) => CmtTree::from_json(&std::fs::read_to_string(path)?, db.graphs.clone(), &metric)?,
        None => CmtTree::build(db.graphs.clone(), &metric, args.tuning.cmt(args.seed))?,
    };
    let res = tree.search(&q, args.radius, &metric)?;
    println!("confirmed ({}): {}", res.confirmed.len(), ids(&db.graphs, &res.confirmed));
    println!("suspected ({}): {}", res.suspected.len(), ids(&db.graphs, &res.suspected));
    println!("answers ({}): {}", res.answers.len(), ids(&db.graphs, &res.answers));
    print_stats(&res.stats);
    Ok(())
}

fn bench(args: BenchArgs) -> Result<()> {
    let mut config = match &args.config {
        Some(path) => BenchConfig::from_json(&std::fs::read_to_string(path)?)?,
        None => BenchConfig::default(),
    };
    let t = &args.tuning;
    if let Some(c) = t.cost_model {
        config.cost_model = c;
    }
    if let Some(k) = t.refine_iters {
        config.refine_iterations = k;
    }
    if let Some(b) = t.branching {
        config.cmt.branching = b;
    }
    if let Some(l) = t.leaf_capacity {
        config.cmt.leaf_capacity = l;
    }
    if let Some(c) = t.node_cap {
        config.node_cap = c;
    }
    if let Some(s) = args.seed {
        config.seeds = vec![s];
    }
    config.wall_clock |= args.wall_clock;
    if let Some(out) = args.out {
        config.output = Some(out);
    }
    let out = config.output.clone().unwrap_or_else(|| PathBuf::from("results.csv"));
    let report = run_bench(&config)?;
    let (build, summary) = report.write(Path::new(&out))?;
    print!("{}", report.summary());
    println!("wrote {} ({} rows), {}, {}", out.display(), report.rows.len(), build.display(), summary.display());
    Ok(())
}

fn selftest(args: SelftestArgs) -> Result<bool> {
    let scale = if args.quick { Scale::Quick } else { Scale::Full };
    let outs = run_selftest(scale, args.seed, |o| println!("{o}"));
    let failed = outs.iter().filter(|o| !o.passed()).count();
    println!("{} of {} suites passed", outs.len() - failed, outs.len());
    Ok(failed == 0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => gen(a).map(|_| true),
        Command::Build(a) => build(a).map(|_| true),
        Command::Query(a) => query(a).map(|_| true),
        Command::Bench(a) => bench(a).map(|_| true),
        Command::Selftest(a) => selftest(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
