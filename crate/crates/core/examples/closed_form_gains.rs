//! Optimal gain tables for a few uncertainty sets.
//!
//! ```text
//! cargo run --example closed_form_gains
//! ```

use robust_kelly::controller::robust_optimal;
use robust_kelly::UncertaintySet;

fn print_table(pset: &UncertaintySet, n: usize) -> robust_kelly::Result<()> {
    let table = robust_optimal(pset, n)?;
    println!("P = {pset}, n = {n} ({} gains)", table.len());
    for (k, row) in table.rows().iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|g| format!("{g:+.4}")).collect();
        println!("  stage {k}: {}", cells.join("  "));
    }
    println!();
    Ok(())
}

fn main() -> robust_kelly::Result<()> {
    // Nothing known: skip the first bet, then follow the first flip.
    print_table(&UncertaintySet::unit(), 2)?;
    print_table(&"0.25:0.95".parse()?, 3)?;
    // A coin that is either clearly biased to tails or clearly to heads.
    print_table(&"0.1:0.3,0.7:0.9".parse()?, 5)?;
    Ok(())
}
