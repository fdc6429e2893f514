//! Plays one game bet by bet, asking the robust controller for each stake as
//! the flips come in.
//!
//! ```text
//! cargo run --example bet_advisor -- HHTHTHHH
//! ```

use robust_kelly::controller::robust_optimal;
use robust_kelly::{Controller, Flip, UncertaintySet};

fn main() -> robust_kelly::Result<()> {
    let flips = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "HHTHTHHH".to_string());
    let flips = Flip::parse_history(&flips)?;
    let pset = UncertaintySet::interval(0.4, 0.9)?;
    let c = Controller::from(robust_optimal(&pset, flips.len())?);

    let mut wealth = 100.0;
    for k in 0..flips.len() {
        let gain = c.gain_at(&flips[..k])?;
        let side = if gain >= 0.0 { "heads" } else { "tails" };
        let stake = gain.abs() * wealth;
        wealth += gain * wealth * flips[k].sign();
        println!(
            "stage {k}: stake {stake:>8.2} on {side:<5} -> {} -> wealth {wealth:>8.2}",
            Flip::history_string(&flips[k..=k])
        );
    }
    Ok(())
}
