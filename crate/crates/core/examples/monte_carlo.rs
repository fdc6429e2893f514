//! Seeded Monte Carlo runs of the wealth recursion against the exact
//! expected log growth.

use robust_kelly::controller::{self, kelly_perfect, static_linear_optimal};
use robust_kelly::elg::elg_at;
use robust_kelly::simulate::{run_simulation, SimConfig};
use robust_kelly::{Controller, UncertaintySet};

fn main() -> robust_kelly::Result<()> {
    let pset = UncertaintySet::interval(0.25, 0.95)?;
    let n = 3;
    let controllers = [
        Controller::from(controller::robust_optimal(&pset, n)?),
        static_linear_optimal(&pset),
        kelly_perfect(0.75)?,
    ];
    for c in &controllers {
        for p_true in [0.3, 0.75] {
            let mut cfg = SimConfig::new(c.clone(), n, p_true);
            cfg.trials = 200_000;
            cfg.seed = 7;
            let report = run_simulation(&cfg)?;
            let exact = elg_at(c, n, p_true)?;
            println!(
                "{:<14} p={p_true:<4} simulated {:+.5} ± {:.5}  exact {:+.5}  wealth in [{:.3}, {:.3}]",
                c.label(),
                report.mean_log_growth,
                report.stderr_log_growth,
                exact,
                report.min_final_wealth,
                report.max_final_wealth
            );
        }
    }
    Ok(())
}
