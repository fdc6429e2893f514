//! Robust nonlinear Kelly betting for repeated even-money coin flips.
//!
//! The heads probability `p` is not known exactly; it is only known to lie in
//! an [`UncertaintySet`] `P ⊆ [0, 1]`. Among all causal controllers that bet a
//! fraction `K_k(X) ∈ [-1, 1]` of current wealth at each stage, the one that
//! maximizes the expected logarithmic growth integrated over `P` depends on
//! the flip history only through the stage `k` and the number of heads `q`
//! seen so far:
//!
//! ```text
//! K[k][q] = (α - β) / (α + β),   α = ∫_P p^(q+1) (1-p)^(k-q) dp,
//!                                β = ∫_P p^q (1-p)^(k-q+1) dp
//! ```
//!
//! so an `n`-flip game needs `n(n+1)/2` gains instead of `2^n - 1`.
//!
//! ```
//! use robust_kelly::{controller, UncertaintySet};
//!
//! let pset = UncertaintySet::new(&[(0.0, 1.0)]).unwrap();
//! let table = controller::robust_optimal(&pset, 2).unwrap();
//! assert_eq!(table.gain(0, 0), 0.0);
//! assert!((table.gain(1, 1) - 1.0 / 3.0).abs() < 1e-12);
//! ```

pub mod cli;
pub mod controller;
pub mod elg;
mod error;
pub mod format;
pub mod moments;
pub mod quadrature;
pub mod reference;
pub mod simulate;
pub mod uncertainty;
pub mod verify;

pub use controller::{Controller, ExplicitTree, Flip, GainTable};
pub use error::{Error, Result};
pub use moments::MomentTable;
pub use uncertainty::UncertaintySet;
