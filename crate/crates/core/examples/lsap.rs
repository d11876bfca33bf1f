//! The assignment solver behind the bounds, on a small rational matrix.
//!
//! cargo run --example lsap

use gedcmt::lsap::solve_lsap;
use gedcmt::Rational;

fn main() -> gedcmt::Result<()> {
    let r = |n, d| Rational::new(n, d);
    let costs = vec![
        vec![r(4, 1), r(1, 1), r(3, 1)],
        vec![r(2, 1), r(0, 1), r(5, 1)],
        vec![r(3, 1), r(2, 1), r(5, 2)],
    ];
    let a = solve_lsap(&costs)?;
    for (row, col) in a.rows.iter().enumerate() {
        println!("row {row} -> column {col} (cost {})", costs[row][*col]);
    }
    println!("total {}", a.total);

    match solve_lsap(&[vec![r(1, 1), r(2, 1)]]) {
        Err(e) => println!("non-square input rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
