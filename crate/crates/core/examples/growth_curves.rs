//! Expected log growth over the whole of `[0, 1]` for the perfect-information
//! optimum, the robust controller and the best static gain. Writes CSV to
//! stdout, ready for plotting.
//!
//! ```text
//! cargo run --example growth_curves > curves.csv
//! ```

use robust_kelly::elg::compare;
use robust_kelly::UncertaintySet;

fn main() -> robust_kelly::Result<()> {
    let pset = UncertaintySet::interval(0.25, 0.95)?;
    let cmp = compare(&pset, 3, 41)?;
    print!("{}", cmp.to_csv());

    let inside = cmp
        .grid
        .iter()
        .enumerate()
        .filter(|(_, p)| pset.contains(**p));
    let (mut robust_wins, mut total) = (0, 0);
    for (i, _) in inside {
        total += 1;
        robust_wins += usize::from(cmp.robust[i] > cmp.static_linear[i]);
    }
    eprintln!("robust above static at {robust_wins} of {total} grid points inside P");
    Ok(())
}
