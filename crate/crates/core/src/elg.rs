//! Expected logarithmic growth.
//!
//! `ELG_K(p) = (1/n) Σ_X P(X) Σ_k ln(1 + K_k(X) X_k)` over all `2^n` flip
//! sequences, with `P(X) = p^heads (1-p)^tails`. Values are plain `f64`s in
//! which `-∞` is a legitimate result (a full-wealth bet that can lose);
//! a zero-probability term contributes zero even when its logarithm is `-∞`.
//!
//! Controllers whose gains depend only on `(k, q)` are evaluated by
//! aggregating the `C(k, q)` histories that share a gain, which costs
//! `O(n²)` instead of `O(2^n)`. Integrals over the uncertainty set use the
//! exact moment integrals, except for the perfect-information bound, which
//! is integrated adaptively.

use crate::controller;
use crate::controller::{Controller, ExplicitTree};
use crate::error::{Error, Result};
use crate::format;
use crate::moments::MomentTable;
use crate::quadrature::integrate_adaptive;
use crate::uncertainty::UncertaintySet;

/// Absolute tolerance for adaptive integrals over the uncertainty set.
pub const QUADRATURE_TOL: f64 = 1e-10;

/// `weight · ln(arg)` with `0 · (-∞) = 0`.
pub fn weighted_log(weight: f64, arg: f64) -> f64 {
    if weight == 0.0 {
        0.0
    } else {
        weight * arg.ln()
    }
}

/// One-stage expected log return of betting `gain` at heads probability `p`.
pub fn stage_growth(p: f64, gain: f64) -> f64 {
    weighted_log(p, 1.0 + gain) + weighted_log(1.0 - p, 1.0 - gain)
}

fn check_probability(p: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(Error::InvalidProbability(p))
    }
}

/// Rows of Pascal's triangle `C(k, 0..=k)` for `k < n`.
fn binomial_rows(n: usize) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    for k in 0..n {
        let row = match rows.last() {
            None => vec![1.0],
            Some(prev) => (0..=k)
                .map(|q| {
                    let left = if q > 0 { prev[q - 1] } else { 0.0 };
                    let right = if q < k { prev[q] } else { 0.0 };
                    left + right
                })
                .collect(),
        };
        rows.push(row);
    }
    rows
}

/// `ELG_K(p)` for an `n`-flip game.
pub fn elg_at(c: &Controller, n: usize, p: f64) -> Result<f64> {
    check_probability(p)?;
    c.check_horizon(n)?;
    match c {
        Controller::StaticLinear { gain } => Ok(stage_growth(p, *gain)),
        Controller::PerfectKelly { p: known } => Ok(stage_growth(p, 2.0 * known - 1.0)),
        Controller::RobustTable(_) => Ok(elg_aggregated(c, n, p)),
        Controller::ExplicitTree(tree) => Ok(elg_tree(tree, n, p)),
    }
}

fn elg_aggregated(c: &Controller, n: usize, p: f64) -> f64 {
    let binom = binomial_rows(n);
    let mut total = 0.0;
    for (k, row) in binom.iter().enumerate() {
        for (q, &count) in row.iter().enumerate() {
            let reach = count * p.powi(q as i32) * (1.0 - p).powi((k - q) as i32);
            let gain = c.stage_gain(k, q).expect("stage-structured controller");
            total +=
                weighted_log(reach * p, 1.0 + gain) + weighted_log(reach * (1.0 - p), 1.0 - gain);
        }
    }
    total / n as f64
}

fn elg_tree(tree: &ExplicitTree, n: usize, p: f64) -> f64 {
    let gains = tree.gains();
    let mut total = 0.0;
    for path in 0..(1usize << n) {
        let heads = path.count_ones() as i32;
        let prob = p.powi(heads) * (1.0 - p).powi(n as i32 - heads);
        if prob == 0.0 {
            continue;
        }
        let mut logs = 0.0;
        for k in 0..n {
            let node = (1usize << k) - 1 + (path >> (n - k));
            let x = if (path >> (n - 1 - k)) & 1 == 1 {
                1.0
            } else {
                -1.0
            };
            logs += (1.0 + gains[node] * x).ln();
        }
        total += prob * logs;
    }
    total / n as f64
}

/// `ELG_K(p)` by enumerating all `2^n` sample paths, whatever the controller.
pub fn elg_at_enumerated(c: &Controller, n: usize, p: f64) -> Result<f64> {
    check_probability(p)?;
    let tree = c.as_explicit_tree(n)?;
    Ok(elg_tree(&tree, n, p))
}

/// Perfect-information optimum `p ln(2p) + (1-p) ln(2(1-p))`.
pub fn elg_star(p: f64) -> f64 {
    weighted_log(p, 2.0 * p) + weighted_log(1.0 - p, 2.0 * (1.0 - p))
}

/// `∫_P ELG_K(p) dp`, exact via moment integrals.
pub fn integrated_elg(c: &Controller, n: usize, pset: &UncertaintySet) -> Result<f64> {
    c.check_horizon(n)?;
    let moments = MomentTable::new(pset, n);
    Ok(integrated_elg_with(c, n, &moments))
}

/// [`integrated_elg`] against precomputed moments of degree at least `n`.
pub fn integrated_elg_with(c: &Controller, n: usize, moments: &MomentTable) -> f64 {
    let node_term = |k: usize, q: usize, gain: f64| {
        let (alpha, beta) = controller::node_weights(moments, k, q);
        weighted_log(alpha, 1.0 + gain) + weighted_log(beta, 1.0 - gain)
    };
    match c {
        Controller::StaticLinear { .. } | Controller::PerfectKelly { .. } => {
            let gain = c.stage_gain(0, 0).expect("static gain");
            node_term(0, 0, gain)
        }
        Controller::RobustTable(_) => {
            let binom = binomial_rows(n);
            let mut total = 0.0;
            for (k, row) in binom.iter().enumerate() {
                for (q, &count) in row.iter().enumerate() {
                    total += count * node_term(k, q, c.stage_gain(k, q).expect("table gain"));
                }
            }
            total / n as f64
        }
        Controller::ExplicitTree(tree) => {
            let mut total = 0.0;
            for k in 0..n {
                for bits in 0..(1usize << k) {
                    let q = bits.count_ones() as usize;
                    total += node_term(k, q, tree.gains()[(1usize << k) - 1 + bits]);
                }
            }
            total / n as f64
        }
    }
}

/// `∫_P ELG_K(p) dp` by adaptive quadrature of [`elg_at`]; an independent
/// route to [`integrated_elg`].
pub fn integrated_elg_numeric(c: &Controller, n: usize, pset: &UncertaintySet) -> Result<f64> {
    c.check_horizon(n)?;
    let mut total = 0.0;
    let tol = QUADRATURE_TOL / pset.intervals().len() as f64;
    for iv in pset.intervals() {
        let mid = elg_at(c, n, 0.5 * (iv.lo + iv.hi))?;
        if mid == f64::NEG_INFINITY {
            return Ok(f64::NEG_INFINITY);
        }
        let f = |p: f64| elg_at(c, n, p).expect("probability inside [0, 1]");
        total += integrate_adaptive(f, iv.lo, iv.hi, tol).value;
    }
    Ok(total)
}

/// `∫_P ELG*(p) dp` by adaptive Gauss–Kronrod quadrature.
pub fn integrated_elg_star(pset: &UncertaintySet) -> f64 {
    let tol = QUADRATURE_TOL / pset.intervals().len() as f64;
    pset.intervals()
        .iter()
        .map(|iv| integrate_adaptive(elg_star, iv.lo, iv.hi, tol).value)
        .sum()
}

/// Integrated regret `Err(K) = ∫_P (ELG*(p) - ELG_K(p)) dp`; `+∞` when the
/// controller's integrated growth is `-∞`.
pub fn err_integral(c: &Controller, n: usize, pset: &UncertaintySet) -> Result<f64> {
    let achieved = integrated_elg(c, n, pset)?;
    Ok(integrated_elg_star(pset) - achieved)
}

/// `size` equally spaced points covering `[0, 1]` inclusive.
pub fn uniform_grid(size: usize) -> Result<Vec<f64>> {
    if size < 2 {
        return Err(Error::InvalidConfig(format!(
            "grid needs at least 2 points, got {size}"
        )));
    }
    let last = (size - 1) as f64;
    Ok((0..size).map(|i| i as f64 / last).collect())
}

/// `p ↦ ELG_K(p)` sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ElgCurve {
    pub controller: String,
    pub pset: Option<UncertaintySet>,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl ElgCurve {
    /// CSV with header `p,elg`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if let Some(p) = &self.pset {
            out.push_str(&format!("# pset={p} controller={}\n", self.controller));
        }
        out.push_str("p,elg\n");
        for (p, v) in self.grid.iter().zip(&self.values) {
            out.push_str(&format!("{},{}\n", format::number(*p), format::number(*v)));
        }
        out
    }
}

pub fn elg_curve(c: &Controller, n: usize, grid_size: usize) -> Result<ElgCurve> {
    let grid = uniform_grid(grid_size)?;
    let values = grid
        .iter()
        .map(|&p| elg_at(c, n, p))
        .collect::<Result<Vec<_>>>()?;
    let pset = match c {
        Controller::RobustTable(t) => t.pset().cloned(),
        _ => None,
    };
    Ok(ElgCurve {
        controller: c.label(),
        pset,
        grid,
        values,
    })
}

/// Perfect-information, robust-optimal and static-optimal growth side by side.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub pset: UncertaintySet,
    pub n: usize,
    pub static_gain: f64,
    pub grid: Vec<f64>,
    pub star: Vec<f64>,
    pub robust: Vec<f64>,
    pub static_linear: Vec<f64>,
}

impl Comparison {
    /// CSV `p,elg_star,elg_robust,elg_static` after a `# pset=...` comment line.
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# pset={} n={} static_gain={}\n",
            self.pset,
            self.n,
            format::number(self.static_gain)
        );
        out.push_str("p,elg_star,elg_robust,elg_static\n");
        for i in 0..self.grid.len() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                format::number(self.grid[i]),
                format::number(self.star[i]),
                format::number(self.robust[i]),
                format::number(self.static_linear[i])
            ));
        }
        out
    }
}

/// Samples the three growth curves on a uniform grid over `[0, 1]`.
pub fn compare(pset: &UncertaintySet, n: usize, grid_size: usize) -> Result<Comparison> {
    let robust = Controller::from(controller::robust_optimal(pset, n)?);
    let fixed = controller::static_linear_optimal(pset);
    let grid = uniform_grid(grid_size)?;
    let eval = |c: &Controller| {
        grid.iter()
            .map(|&p| elg_at(c, n, p))
            .collect::<Result<Vec<_>>>()
    };
    Ok(Comparison {
        pset: pset.clone(),
        n,
        static_gain: fixed.stage_gain(0, 0).expect("static gain"),
        star: grid.iter().map(|&p| elg_star(p)).collect(),
        robust: eval(&robust)?,
        static_linear: eval(&fixed)?,
        grid,
    })
}
