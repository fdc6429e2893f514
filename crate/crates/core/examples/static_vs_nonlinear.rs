//! How much the history-dependent controller gains over the best static gain
//! as the number of flips grows, measured on the integrated objective and on
//! the regret against perfect information.

use robust_kelly::controller::{robust_optimal, static_linear_optimal};
use robust_kelly::elg::{err_integral, integrated_elg};
use robust_kelly::{Controller, UncertaintySet};

fn main() -> robust_kelly::Result<()> {
    for text in ["0:1", "0.25:0.95", "0.05:0.2,0.8:0.95"] {
        let pset: UncertaintySet = text.parse()?;
        let fixed = static_linear_optimal(&pset);
        println!("P = {pset}");
        println!(
            "{:>4} {:>12} {:>12} {:>12} {:>12}",
            "n", "robust", "static", "regret R", "regret S"
        );
        for n in [1, 2, 4, 8, 16, 32] {
            let robust = Controller::from(robust_optimal(&pset, n)?);
            println!(
                "{n:>4} {:>12.6} {:>12.6} {:>12.6} {:>12.6}",
                integrated_elg(&robust, n, &pset)?,
                integrated_elg(&fixed, n, &pset)?,
                err_integral(&robust, n, &pset)?,
                err_integral(&fixed, n, &pset)?
            );
        }
        println!();
    }
    Ok(())
}
