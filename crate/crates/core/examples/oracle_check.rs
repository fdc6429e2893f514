//! Brute-force checks of the closed-form gains: per-node golden-section
//! search, random-start coordinate ascent and the structural audit.

use robust_kelly::verify::verify;
use robust_kelly::UncertaintySet;

fn main() -> robust_kelly::Result<()> {
    let cases = [
        ("0:1", 2),
        ("0.25:0.95", 3),
        ("0.1:0.2,0.5:0.55,0.9:1", 4),
        ("0.3:0.7", 10),
    ];
    for (text, n) in cases {
        let pset: UncertaintySet = text.parse()?;
        let report = verify(&pset, n, 1e-10, 1)?;
        print!("{}", report.to_text());
        println!();
    }
    Ok(())
}
