//! Parsing and normalizing uncertainty sets, and the static gain each implies.

use robust_kelly::controller::static_linear_optimal;
use robust_kelly::UncertaintySet;

fn main() -> robust_kelly::Result<()> {
    for text in [
        "0:1",
        "0.25:0.95",
        "0.7:0.9, 0.1:0.3",
        "0.2:0.5,0.4:0.6",
        "0.6:0.6000001",
    ] {
        let pset: UncertaintySet = text.parse()?;
        let gain = static_linear_optimal(&pset).stage_gain(0, 0).unwrap_or(0.0);
        println!(
            "{text:>18} -> {pset:<20} measure {:.6}  centroid {:.6}  static gain {gain:+.6}",
            pset.measure(),
            pset.centroid()
        );
    }

    // Zero-measure sets are rejected.
    match "0.5:0.5".parse::<UncertaintySet>() {
        Ok(p) => println!("unexpectedly accepted {p}"),
        Err(e) => println!("0.5:0.5 rejected: {e}"),
    }
    Ok(())
}
