//! Brute-force checks of the closed-form optimum.
//!
//! The oracles here never evaluate `(α - β)/(α + β)`. Node weights come from
//! enumerating every full sample path and integrating its probability over
//! the uncertainty set; each node's gain is then found by golden-section
//! search on `α ln(1 + x) + β ln(1 - x)`. A second, generic check runs
//! coordinate ascent on the full enumerated objective from random starts.

use std::fmt;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::controller::{self, Controller, ExplicitTree};
use crate::elg;
use crate::error::{Error, Result};
use crate::format;
use crate::moments::MomentTable;
use crate::reference;
use crate::uncertainty::UncertaintySet;

/// Search interval shrink: gains are searched on `[-1 + ε, 1 - ε]`.
pub const EPSILON: f64 = 1e-12;
/// Largest horizon for full-tree oracles.
pub const MAX_ORACLE_HORIZON: usize = 4;
/// Largest horizon for coordinate ascent on the full objective.
pub const MAX_ASCENT_HORIZON: usize = 3;
/// Largest horizon for the structural audit.
pub const MAX_AUDIT_HORIZON: usize = 12;

/// Per-gain agreement required between oracle and closed form.
pub const GAIN_GAP_TOL: f64 = 1e-7;
/// Relative objective agreement required between oracle and closed form.
pub const OBJECTIVE_GAP_TOL: f64 = 1e-10;
/// Single-gain perturbation size for the local-optimality check.
pub const PERTURBATION: f64 = 1e-3;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoldenSection {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
    /// False if an interior probe ever fell below both of its neighbours,
    /// which a unimodal function cannot do.
    pub unimodal: bool,
}

/// Maximizes `f` on `[lo, hi]` until the bracket is narrower than `tol`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> GoldenSection {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    let mut unimodal = true;
    let mut iterations = 0;
    // Near the peak the values agree to rounding, so only a dip clearly
    // above that noise counts against unimodality.
    let dips = |left: f64, mid: f64, right: f64| {
        let noise = 1e-12 * (1.0 + mid.abs());
        mid < left - noise && mid < right - noise
    };

    while b - a > tol && iterations < 10_000 {
        iterations += 1;
        if dips(fa, f1, f2) || dips(f1, f2, fb) {
            unimodal = false;
        }
        if f1 < f2 {
            a = x1;
            fa = f1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            fb = f2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        }
        if x1 >= x2 {
            break;
        }
    }
    let (x, value) = [(a, fa), (x1, f1), (x2, f2), (b, fb)]
        .into_iter()
        .max_by(|p, q| p.1.total_cmp(&q.1))
        .expect("four candidates");
    GoldenSection {
        x,
        value,
        iterations,
        unimodal,
    }
}

fn check_oracle_horizon(n: usize, max: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::ZeroHorizon);
    }
    if n > max {
        return Err(Error::InvalidConfig(format!(
            "horizon {n} exceeds the brute-force limit {max}"
        )));
    }
    Ok(())
}

/// Integrated probability of each full path, indexed by the path read as a
/// binary number (heads = 1, first flip most significant).
fn path_weights(pset: &UncertaintySet, n: usize) -> Vec<f64> {
    let moments = MomentTable::new(pset, n);
    (0..1usize << n)
        .map(|path| {
            let heads = path.count_ones() as usize;
            moments.get(heads, n - heads)
        })
        .collect()
}

/// `(α, β)` for every tree node, accumulated path by path.
pub fn node_weights_by_enumeration(pset: &UncertaintySet, n: usize) -> Vec<(f64, f64)> {
    let weights = path_weights(pset, n);
    let mut nodes = vec![(0.0, 0.0); ExplicitTree::node_count(n)];
    for (path, &w) in weights.iter().enumerate() {
        for k in 0..n {
            let node = (1usize << k) - 1 + (path >> (n - k));
            if (path >> (n - 1 - k)) & 1 == 1 {
                nodes[node].0 += w;
            } else {
                nodes[node].1 += w;
            }
        }
    }
    nodes
}

/// `∫_P ELG_K(p) dp` by enumerating all `2^n` paths.
pub fn oracle_objective(tree: &ExplicitTree, pset: &UncertaintySet) -> f64 {
    let n = tree.horizon();
    let weights = path_weights(pset, n);
    oracle_objective_with(tree, &weights)
}

fn oracle_objective_with(tree: &ExplicitTree, weights: &[f64]) -> f64 {
    let n = tree.horizon();
    let gains = tree.gains();
    let mut total = 0.0;
    for (path, &w) in weights.iter().enumerate() {
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
        if w != 0.0 {
            total += w * logs;
        }
    }
    total / n as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub best_gains: ExplicitTree,
    pub best_objective: f64,
    pub closed_form_objective: f64,
    /// Largest per-node `|oracle - closed form|`.
    pub max_gain_gap: f64,
    /// `|f(oracle) - f(closed form)| / max(|f(closed form)|, μ(P))`.
    pub objective_gap: f64,
    pub iterations: usize,
    pub unimodal: bool,
}

/// Per-node golden-section optimum of the integrated growth.
pub fn oracle_optimize(pset: &UncertaintySet, n: usize, tol: f64) -> Result<OracleResult> {
    check_oracle_horizon(n, MAX_ORACLE_HORIZON)?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let mut gains = Vec::with_capacity(ExplicitTree::node_count(n));
    let mut iterations = 0;
    let mut unimodal = true;
    for (alpha, beta) in node_weights_by_enumeration(pset, n) {
        let scale = alpha + beta;
        let g = |x: f64| (alpha * (1.0 + x).ln() + beta * (1.0 - x).ln()) / scale;
        let search = golden_section_max(g, -1.0 + EPSILON, 1.0 - EPSILON, tol.min(1e-9));
        iterations += search.iterations;
        unimodal &= search.unimodal;
        gains.push(search.x);
    }
    let best_gains = ExplicitTree::new(n, gains)?;

    let closed = Controller::from(controller::robust_optimal(pset, n)?).as_explicit_tree(n)?;
    let weights = path_weights(pset, n);
    let best_objective = oracle_objective_with(&best_gains, &weights);
    let closed_form_objective = oracle_objective_with(&closed, &weights);
    let max_gain_gap = best_gains
        .gains()
        .iter()
        .zip(closed.gains())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let scale = closed_form_objective.abs().max(pset.measure());
    Ok(OracleResult {
        best_gains,
        best_objective,
        closed_form_objective,
        max_gain_gap,
        objective_gap: (best_objective - closed_form_objective).abs() / scale,
        iterations,
        unimodal,
    })
}

/// Coordinate ascent on the full path-enumerated objective, starting from
/// `start`, golden-section on one node gain at a time.
pub fn coordinate_ascent(
    pset: &UncertaintySet,
    start: &ExplicitTree,
    tol: f64,
    max_sweeps: usize,
) -> Result<ExplicitTree> {
    let n = start.horizon();
    check_oracle_horizon(n, MAX_ASCENT_HORIZON)?;
    let weights = path_weights(pset, n);
    let mut current = start.clone();
    for _ in 0..max_sweeps {
        let mut largest_move: f64 = 0.0;
        for node in 0..current.gains().len() {
            let before = current.gains()[node];
            let objective = |x: f64| {
                let mut trial = current.clone();
                trial
                    .set_gain(node, x)
                    .expect("search stays inside [-1, 1]");
                oracle_objective_with(&trial, &weights)
            };
            let best = golden_section_max(objective, -1.0 + EPSILON, 1.0 - EPSILON, tol);
            current.set_gain(node, best.x)?;
            largest_move = largest_move.max((best.x - before).abs());
        }
        if largest_move < tol {
            break;
        }
    }
    Ok(current)
}

/// True if moving any single closed-form gain by `±delta` lowers the
/// enumerated objective.
pub fn perturbation_check(pset: &UncertaintySet, n: usize, delta: f64) -> Result<bool> {
    check_oracle_horizon(n, MAX_AUDIT_HORIZON)?;
    let weights = path_weights(pset, n);
    let tree = Controller::from(controller::robust_optimal(pset, n)?).as_explicit_tree(n)?;
    let best = oracle_objective_with(&tree, &weights);
    for node in 0..tree.gains().len() {
        for step in [-delta, delta] {
            let mut moved = tree.clone();
            moved.set_gain(node, (tree.gains()[node] + step).clamp(-1.0, 1.0))?;
            if oracle_objective_with(&moved, &weights) >= best {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// One named pass/fail line.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} {}: {}", self.name, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub n: usize,
    pub table_entries: usize,
    pub tree_nodes: usize,
    /// Distinct gain values seen at each stage of the expanded tree.
    pub stage_distinct: Vec<usize>,
    pub checks: Vec<Check>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Expands the optimal table into the full tree and checks that it holds
/// only `n(n+1)/2` distinct gains, shared exactly within each `(k, q)` class.
pub fn structural_audit(pset: &UncertaintySet, n: usize) -> Result<AuditReport> {
    check_oracle_horizon(n, MAX_AUDIT_HORIZON)?;
    let table = controller::robust_optimal(pset, n)?;
    let tree = Controller::from(table.clone()).as_explicit_tree(n)?;

    let mut stage_distinct = Vec::with_capacity(n);
    let mut classes_exact = true;
    for k in 0..n {
        let mut distinct: Vec<u64> = Vec::new();
        let mut class_gain: Vec<Option<f64>> = vec![None; k + 1];
        for bits in 0..(1usize << k) {
            let g = tree.gains()[(1usize << k) - 1 + bits];
            let q = bits.count_ones() as usize;
            match class_gain[q] {
                None => class_gain[q] = Some(g),
                Some(prev) => classes_exact &= prev.to_bits() == g.to_bits(),
            }
            if !distinct.contains(&g.to_bits()) {
                distinct.push(g.to_bits());
            }
        }
        stage_distinct.push(distinct.len());
    }

    let expected = n * (n + 1) / 2;
    let per_stage_ok = stage_distinct.iter().enumerate().all(|(k, &d)| d <= k + 1);
    let static_gain = controller::static_linear_optimal(pset)
        .stage_gain(0, 0)
        .expect("static gain");
    let stage0_gap = (table.gain(0, 0) - static_gain).abs();
    let counts: Vec<String> = stage_distinct.iter().map(usize::to_string).collect();

    let checks = vec![
        Check::new(
            "table size",
            table.len() == expected,
            format!("{} entries, expected n(n+1)/2 = {expected}", table.len()),
        ),
        Check::new(
            "distinct gains per stage",
            per_stage_ok,
            format!("({}) against at most k+1 at stage k", counts.join(",")),
        ),
        Check::new(
            "equal head counts share gains",
            classes_exact,
            format!("{} tree nodes checked bit-for-bit", tree.gains().len()),
        ),
        Check::new(
            "stage 0 equals static optimum",
            stage0_gap < 1e-12,
            format!("gap {}", format::number(stage0_gap)),
        ),
    ];
    Ok(AuditReport {
        n,
        table_entries: table.len(),
        tree_nodes: tree.gains().len(),
        stage_distinct,
        checks,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub pset: UncertaintySet,
    pub n: usize,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("# pset={} n={}\n", self.pset, self.n);
        for c in &self.checks {
            out.push_str(&format!("{c}\n"));
        }
        out.push_str(if self.passed() {
            "result: pass\n"
        } else {
            "result: fail\n"
        });
        out
    }
}

fn uniform_in(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let unit = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    lo + (hi - lo) * unit
}

/// Random starting tree with gains uniform in `(-0.9, 0.9)`.
pub fn random_tree(n: usize, rng: &mut ChaCha8Rng) -> Result<ExplicitTree> {
    let gains = (0..ExplicitTree::node_count(n))
        .map(|_| uniform_in(rng, -0.9, 0.9))
        .collect();
    ExplicitTree::new(n, gains)
}

/// Runs every check that applies to `(pset, n)`: the structural audit, the
/// cross-evaluator check and the nonlinear-beats-static inequality always;
/// the golden-section oracle and perturbation test for `n <= 4`; random-start
/// coordinate ascent for `n <= 3`; the published-gain comparison when
/// `(pset, n)` is a reference case.
pub fn verify(pset: &UncertaintySet, n: usize, tol: f64, seed: u64) -> Result<VerifyReport> {
    let audit = structural_audit(pset, n)?;
    let mut checks = audit.checks;
    let num = format::number;

    let table = controller::robust_optimal(pset, n)?;
    let robust = Controller::from(table);
    let tree = robust.as_explicit_tree(n)?;
    let f_robust = elg::integrated_elg(&robust, n, pset)?;
    let f_enum = oracle_objective(&tree, pset);
    let eval_gap = (f_robust - f_enum).abs();
    checks.push(Check::new(
        "aggregated vs enumerated objective",
        eval_gap < 1e-10,
        format!("|{} - {}| = {}", num(f_robust), num(f_enum), num(eval_gap)),
    ));

    let f_static = elg::integrated_elg(&controller::static_linear_optimal(pset), n, pset)?;
    let (passed, relation) = if n > 1 {
        (f_robust > f_static, "robust > static")
    } else {
        ((f_robust - f_static).abs() < 1e-12, "robust = static")
    };
    checks.push(Check::new(
        "nonlinear vs static objective",
        passed,
        format!("{relation}: {} vs {}", num(f_robust), num(f_static)),
    ));

    if n <= MAX_ORACLE_HORIZON {
        let oracle = oracle_optimize(pset, n, tol)?;
        let gain_tol = tol.max(GAIN_GAP_TOL);
        checks.push(Check::new(
            "golden-section oracle gains",
            oracle.max_gain_gap < gain_tol,
            format!(
                "max gap {} (limit {})",
                num(oracle.max_gain_gap),
                num(gain_tol)
            ),
        ));
        checks.push(Check::new(
            "golden-section oracle objective",
            oracle.objective_gap < OBJECTIVE_GAP_TOL,
            format!("relative gap {}", num(oracle.objective_gap)),
        ));
        checks.push(Check::new(
            "per-node objective unimodal",
            oracle.unimodal,
            format!("{} golden-section iterations", oracle.iterations),
        ));
        let local = perturbation_check(pset, n, PERTURBATION)?;
        checks.push(Check::new(
            "single-gain perturbations lower objective",
            local,
            format!(
                "±{} on each of {} nodes",
                num(PERTURBATION),
                tree.gains().len()
            ),
        ));
    }

    if n <= MAX_ASCENT_HORIZON {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..3 {
            let start = random_tree(n, &mut rng)?;
            let found = coordinate_ascent(pset, &start, 1e-10, 5)?;
            let gap = found
                .gains()
                .iter()
                .zip(tree.gains())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            worst = worst.max(gap);
        }
        checks.push(Check::new(
            "coordinate ascent from random starts",
            worst < 1e-6,
            format!("max gap {} over 3 starts (seed {seed})", num(worst)),
        ));
    }

    if let Some(case) = reference::lookup(pset, n) {
        let gap = case.max_gap(&robust);
        let mut detail = format!(
            "{}: max gap {} (limit {})",
            case.name,
            num(gap),
            num(case.tolerance)
        );
        for e in case.errata {
            detail.push_str(&format!(
                "; {} compared with {} instead of printed {} ({})",
                e.history,
                num(e.corrected),
                num(e.printed),
                e.note
            ));
        }
        checks.push(Check::new("published gains", gap < case.tolerance, detail));
    }

    Ok(VerifyReport {
        pset: pset.clone(),
        n,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(pairs: &[(f64, f64)]) -> UncertaintySet {
        UncertaintySet::new(pairs).unwrap()
    }

    #[test]
    fn golden_section_on_parabola() {
        let r = golden_section_max(|x| -(x - 0.3) * (x - 0.3), -1.0, 1.0, 1e-10);
        assert!((r.x - 0.3).abs() < 1e-8);
        assert!(r.unimodal);
    }

    #[test]
    fn golden_section_flags_two_peaks() {
        let bimodal =
            |x: f64| (-(x + 0.8).powi(2) * 50.0).exp() + 0.5 * (-(x - 0.7).powi(2) * 50.0).exp();
        let r = golden_section_max(bimodal, -1.0, 1.0, 1e-9);
        assert!(!r.unimodal);
    }

    #[test]
    fn unit_interval_oracle() {
        let r = oracle_optimize(&UncertaintySet::unit(), 2, 1e-9).unwrap();
        let g = r.best_gains.gains();
        assert!(g[0].abs() < 1e-7);
        assert!((g[1] + 1.0 / 3.0).abs() < 1e-7);
        assert!((g[2] - 1.0 / 3.0).abs() < 1e-7);
        assert!(r.max_gain_gap < 1e-7);
        assert!(r.objective_gap < 1e-10);
        assert!(r.best_objective <= r.closed_form_objective + 1e-15);
    }

    #[test]
    fn wide_interval_oracle_matches_references() {
        let p = set(&[(0.25, 0.95)]);
        let r = oracle_optimize(&p, 3, 1e-9).unwrap();
        let c = Controller::from(r.best_gains.clone());
        assert!(reference::WIDE_THREE_FLIPS.max_gap(&c) < 5e-4);
    }

    #[test]
    fn symmetric_single_flip() {
        let r = oracle_optimize(&set(&[(0.4, 0.6)]), 1, 1e-9).unwrap();
        assert!(r.best_gains.gains()[0].abs() < 1e-7);
    }

    #[test]
    fn oracle_objective_values() {
        let zero = ExplicitTree::new(2, vec![0.0; 3]).unwrap();
        assert_eq!(oracle_objective(&zero, &UncertaintySet::unit()), 0.0);

        let tree =
            Controller::from(controller::robust_optimal(&UncertaintySet::unit(), 2).unwrap())
                .as_explicit_tree(2)
                .unwrap();
        let v = oracle_objective(&tree, &UncertaintySet::unit());
        assert!((v - 0.5 / 3.0 * (32.0f64 / 27.0).ln()).abs() < 1e-15);
    }

    #[test]
    fn enumerated_node_weights_match_moments() {
        let p = set(&[(0.1, 0.3), (0.6, 0.95)]);
        let m = MomentTable::new(&p, 4);
        let nodes = node_weights_by_enumeration(&p, 4);
        for k in 0..4 {
            for bits in 0..(1usize << k) {
                let q = bits.count_ones() as usize;
                let (a, b) = nodes[(1 << k) - 1 + bits];
                let (ea, eb) = controller::node_weights(&m, k, q);
                assert!((a - ea).abs() < 1e-15 && (b - eb).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn coordinate_ascent_converges() {
        let p = set(&[(0.2, 0.5), (0.7, 0.9)]);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let start = random_tree(3, &mut rng).unwrap();
        let found = coordinate_ascent(&p, &start, 1e-10, 5).unwrap();
        let closed = Controller::from(controller::robust_optimal(&p, 3).unwrap())
            .as_explicit_tree(3)
            .unwrap();
        for (a, b) in found.gains().iter().zip(closed.gains()) {
            assert!((a - b).abs() < 1e-6);
        }
        assert!(coordinate_ascent(&p, &random_tree(4, &mut rng).unwrap(), 1e-9, 1).is_err());
    }

    #[test]
    fn audit_counts() {
        let a = structural_audit(&set(&[(0.25, 0.95)]), 3).unwrap();
        assert!(a.passed());
        assert_eq!(a.table_entries, 6);
        assert_eq!(a.stage_distinct, vec![1, 2, 3]);

        let one = structural_audit(&set(&[(0.25, 0.95)]), 1).unwrap();
        assert_eq!(one.table_entries, 1);
        assert!(one.passed());

        let ten = structural_audit(&UncertaintySet::unit(), 10).unwrap();
        assert_eq!(ten.table_entries, 55);
        assert_eq!(ten.tree_nodes, 1023);
        assert!(ten.passed());

        assert!(structural_audit(&UncertaintySet::unit(), 13).is_err());
    }

    #[test]
    fn horizon_limits() {
        assert!(oracle_optimize(&UncertaintySet::unit(), 5, 1e-9).is_err());
        assert!(oracle_optimize(&UncertaintySet::unit(), 0, 1e-9).is_err());
        assert!(oracle_optimize(&UncertaintySet::unit(), 2, 0.0).is_err());
    }

    #[test]
    fn full_verification_passes() {
        for (p, n) in [
            (UncertaintySet::unit(), 2),
            (set(&[(0.25, 0.95)]), 3),
            (set(&[(0.0, 0.2), (0.5, 0.6)]), 6),
        ] {
            let r = verify(&p, n, 1e-9, 1).unwrap();
            assert!(r.passed(), "{}", r.to_text());
        }
        let r = verify(&set(&[(0.25, 0.95)]), 3, 1e-9, 1).unwrap();
        assert!(r
            .checks
            .iter()
            .any(|c| c.name == "published gains" && c.passed));
    }
}
