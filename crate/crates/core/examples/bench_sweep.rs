//! A small benchmark sweep printed as CSV, followed by the per-cell
//! comparison of total work.
//!
//! cargo run --release --example bench_sweep

use gedcmt::bench::{run_bench, BenchConfig};
use gedcmt::Rational;

fn main() -> gedcmt::Result<()> {
    let config = BenchConfig {
        sizes: vec![50, 100],
        node_ranges: vec![(4, 8)],
        radii: vec![Rational::from_integer(1), Rational::from_integer(3)],
        queries: 3,
        check_oracle: true,
        ..Default::default()
    };
    let report = run_bench(&config)?;
    print!("{}", report.csv());
    println!();
    print!("{}", report.build_csv());
    println!();
    print!("{}", report.summary());
    Ok(())
}
