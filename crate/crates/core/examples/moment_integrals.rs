//! Moment integrals `I(a, b) = ∫_P p^a (1-p)^b dp`, exact by Gauss–Legendre
//! and cross-checked against adaptive quadrature.

use robust_kelly::moments::MomentTable;
use robust_kelly::quadrature::integrate_adaptive;
use robust_kelly::UncertaintySet;

fn main() -> robust_kelly::Result<()> {
    let pset: UncertaintySet = "0.1:0.3,0.6:0.95".parse()?;
    let table = MomentTable::new(&pset, 6);
    println!("P = {pset}");
    println!(
        "{:>3} {:>3} {:>22} {:>12}",
        "a", "b", "I(a,b)", "adaptive err"
    );
    for ((a, b), exact) in table.iter().filter(|((a, b), _)| a + b == 6) {
        let adaptive: f64 = pset
            .intervals()
            .iter()
            .map(|iv| {
                let f = |p: f64| p.powi(a as i32) * (1.0 - p).powi(b as i32);
                integrate_adaptive(f, iv.lo, iv.hi, 1e-13).value
            })
            .sum();
        println!(
            "{a:>3} {b:>3} {exact:>22.16e} {:>12.2e}",
            (exact - adaptive).abs()
        );
    }
    Ok(())
}
