//! As the uncertainty set shrinks to a point the robust gains collapse onto
//! the Kelly fraction `2p - 1` at every node.

use robust_kelly::controller::robust_optimal;
use robust_kelly::UncertaintySet;

fn main() -> robust_kelly::Result<()> {
    let p = 0.7;
    let n = 6;
    for width in [0.4, 0.1, 1e-2, 1e-4, 1e-6] {
        let pset = UncertaintySet::interval(p - width / 2.0, p + width / 2.0)?;
        let table = robust_optimal(&pset, n)?;
        let spread = table
            .entries()
            .map(|(_, _, g)| (g - (2.0 * p - 1.0)).abs())
            .fold(0.0, f64::max);
        println!("width {width:<8e} max |K - (2p-1)| = {spread:.3e}");
    }
    Ok(())
}
