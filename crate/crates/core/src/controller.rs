//! Admissible betting controllers.
//!
//! A controller maps the flips observed so far to a gain `K ∈ [-1, 1]`; the
//! bet at stage `k` is `K_k · V_k`, positive meaning heads and negative
//! meaning tails. Causality is structural here: every variant looks up its
//! gain from the observed prefix and nothing else.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format;
use crate::moments::MomentTable;
use crate::uncertainty::UncertaintySet;

/// One coin outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flip {
    Heads,
    Tails,
}

impl Flip {
    /// `+1` for heads, `-1` for tails.
    pub fn sign(self) -> f64 {
        match self {
            Flip::Heads => 1.0,
            Flip::Tails => -1.0,
        }
    }

    pub fn is_heads(self) -> bool {
        self == Flip::Heads
    }

    /// Parses a history string such as `"HTH"`; the empty string is the empty history.
    pub fn parse_history(s: &str) -> Result<Vec<Flip>> {
        s.chars()
            .map(|c| match c {
                'H' | 'h' => Ok(Flip::Heads),
                'T' | 't' => Ok(Flip::Tails),
                _ => Err(Error::ParseHistory(s.to_string())),
            })
            .collect()
    }

    pub fn history_string(history: &[Flip]) -> String {
        history
            .iter()
            .map(|f| if f.is_heads() { 'H' } else { 'T' })
            .collect()
    }
}

fn heads_in(history: &[Flip]) -> usize {
    history.iter().filter(|f| f.is_heads()).count()
}

fn check_gain(g: f64) -> Result<f64> {
    if g.is_finite() && g.abs() <= 1.0 {
        Ok(g)
    } else {
        Err(Error::InvalidGain(g))
    }
}

/// Gains `K[k][q]` for stages `0 <= k < n` and head counts `0 <= q <= k`.
#[derive(Debug, Clone, PartialEq)]
pub struct GainTable {
    n: usize,
    rows: Vec<Vec<f64>>,
    pset: Option<UncertaintySet>,
}

impl GainTable {
    /// Builds a table from rows; row `k` must hold `k + 1` gains in `[-1, 1]`.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::ZeroHorizon);
        }
        for (k, row) in rows.iter().enumerate() {
            if row.len() != k + 1 {
                return Err(Error::InvalidConfig(format!(
                    "gain table row {k} has {} entries, expected {}",
                    row.len(),
                    k + 1
                )));
            }
            for &g in row {
                check_gain(g)?;
            }
        }
        Ok(Self {
            n: rows.len(),
            rows,
            pset: None,
        })
    }

    /// Attaches the uncertainty set the table was built for.
    pub fn with_pset(mut self, pset: UncertaintySet) -> Self {
        self.pset = Some(pset);
        self
    }

    pub fn horizon(&self) -> usize {
        self.n
    }

    pub fn pset(&self) -> Option<&UncertaintySet> {
        self.pset.as_ref()
    }

    /// Number of stored gains, `n(n+1)/2`.
    pub fn len(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn gain(&self, k: usize, q: usize) -> f64 {
        self.rows[k][q]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// `(k, q, gain)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(k, row)| row.iter().enumerate().map(move |(q, &g)| (k, q, g)))
    }

    /// CSV with header `k,q,gain`, preceded by a `# pset=... n=...` comment line.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if let Some(p) = &self.pset {
            out.push_str(&format!("# pset={p} n={}\n", self.n));
        }
        out.push_str("k,q,gain\n");
        for (k, q, g) in self.entries() {
            out.push_str(&format!("{k},{q},{}\n", format::number(g)));
        }
        out
    }

    /// `{"n": .., "pset": "lo:hi,..", "gains": [[K00], [K10, K11], ..]}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&GainTableJson {
            n: self.n,
            pset: self.pset.clone(),
            gains: self.rows.clone(),
        })
        .expect("finite gains serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let wire: GainTableJson =
            serde_json::from_str(s).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        if wire.n != wire.gains.len() {
            return Err(Error::InvalidConfig(format!(
                "n = {} but {} gain rows",
                wire.n,
                wire.gains.len()
            )));
        }
        let table = Self::new(wire.gains)?;
        Ok(match wire.pset {
            Some(p) => table.with_pset(p),
            None => table,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct GainTableJson {
    n: usize,
    pset: Option<UncertaintySet>,
    gains: Vec<Vec<f64>>,
}

/// One gain per node of the depth-`n` history tree, `2^n - 1` in all.
///
/// Nodes are stored breadth-first. The stage-`k` node for a prefix sits at
/// `2^k - 1 + b`, where `b` reads the prefix as a binary number with heads
/// as `1` and the first flip as the most significant bit.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplicitTree {
    n: usize,
    gains: Vec<f64>,
}

impl ExplicitTree {
    pub fn new(n: usize, gains: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroHorizon);
        }
        let expected = Self::node_count(n);
        if gains.len() != expected {
            return Err(Error::InvalidConfig(format!(
                "tree of horizon {n} needs {expected} gains, got {}",
                gains.len()
            )));
        }
        for &g in &gains {
            check_gain(g)?;
        }
        Ok(Self { n, gains })
    }

    /// Fills every node by calling `f(prefix)`.
    pub fn from_fn<F: FnMut(&[Flip]) -> f64>(n: usize, mut f: F) -> Result<Self> {
        let mut gains = Vec::with_capacity(Self::node_count(n));
        for k in 0..n {
            for bits in 0..(1usize << k) {
                gains.push(f(&Self::prefix_of(k, bits)));
            }
        }
        Self::new(n, gains)
    }

    pub fn node_count(n: usize) -> usize {
        (1usize << n) - 1
    }

    /// Prefix of length `k` whose binary reading is `bits`.
    pub fn prefix_of(k: usize, bits: usize) -> Vec<Flip> {
        (0..k)
            .map(|i| {
                if (bits >> (k - 1 - i)) & 1 == 1 {
                    Flip::Heads
                } else {
                    Flip::Tails
                }
            })
            .collect()
    }

    pub fn node_index(prefix: &[Flip]) -> usize {
        let k = prefix.len();
        let bits = prefix
            .iter()
            .fold(0usize, |acc, f| (acc << 1) | usize::from(f.is_heads()));
        (1usize << k) - 1 + bits
    }

    pub fn horizon(&self) -> usize {
        self.n
    }

    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    pub fn gain(&self, prefix: &[Flip]) -> Result<f64> {
        if prefix.len() >= self.n {
            return Err(Error::HistoryTooLong {
                len: prefix.len(),
                horizon: self.n,
            });
        }
        Ok(self.gains[Self::node_index(prefix)])
    }

    /// Mutable access by node index, for perturbation experiments.
    pub fn set_gain(&mut self, index: usize, gain: f64) -> Result<()> {
        self.gains[index] = check_gain(gain)?;
        Ok(())
    }
}

/// A betting policy.
#[derive(Debug, Clone, PartialEq)]
pub enum Controller {
    /// Constant gain, independent of the history.
    StaticLinear { gain: f64 },
    /// Kelly's perfect-information gain `2p - 1` for a known `p`.
    PerfectKelly { p: f64 },
    /// Gain depends on the stage and the number of heads seen.
    RobustTable(GainTable),
    /// Arbitrary causal controller, one gain per history-tree node.
    ExplicitTree(ExplicitTree),
}

impl Controller {
    pub fn static_linear(gain: f64) -> Result<Self> {
        Ok(Controller::StaticLinear {
            gain: check_gain(gain)?,
        })
    }

    /// Number of stages the controller is defined for; `None` means any horizon.
    pub fn horizon(&self) -> Option<usize> {
        match self {
            Controller::StaticLinear { .. } | Controller::PerfectKelly { .. } => None,
            Controller::RobustTable(t) => Some(t.horizon()),
            Controller::ExplicitTree(t) => Some(t.horizon()),
        }
    }

    /// Errors unless the controller covers at least `n` stages.
    pub fn check_horizon(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::ZeroHorizon);
        }
        match self.horizon() {
            Some(available) if available < n => Err(Error::HorizonMismatch {
                available,
                requested: n,
            }),
            _ => Ok(()),
        }
    }

    /// Gain for stage `k = prefix.len()` after observing `prefix`.
    pub fn gain_at(&self, prefix: &[Flip]) -> Result<f64> {
        let k = prefix.len();
        if let Some(n) = self.horizon() {
            if k >= n {
                return Err(Error::HistoryTooLong { len: k, horizon: n });
            }
        }
        Ok(match self {
            Controller::StaticLinear { gain } => *gain,
            Controller::PerfectKelly { p } => 2.0 * p - 1.0,
            Controller::RobustTable(t) => t.gain(k, heads_in(prefix)),
            Controller::ExplicitTree(t) => t.gain(prefix)?,
        })
    }

    /// The gain as a function of `(k, q)` when the controller has that
    /// structure; `None` for explicit trees.
    pub fn stage_gain(&self, k: usize, q: usize) -> Option<f64> {
        match self {
            Controller::StaticLinear { gain } => Some(*gain),
            Controller::PerfectKelly { p } => Some(2.0 * p - 1.0),
            Controller::RobustTable(t) => Some(t.gain(k, q)),
            Controller::ExplicitTree(_) => None,
        }
    }

    /// Expands to one gain per node of the depth-`n` tree.
    pub fn as_explicit_tree(&self, n: usize) -> Result<ExplicitTree> {
        self.check_horizon(n)?;
        let mut err = None;
        let tree = ExplicitTree::from_fn(n, |prefix| {
            self.gain_at(prefix).unwrap_or_else(|e| {
                err = Some(e);
                0.0
            })
        })?;
        match err {
            Some(e) => Err(e),
            None => Ok(tree),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Controller::StaticLinear { gain } => format!("static({})", format::number(*gain)),
            Controller::PerfectKelly { p } => format!("kelly({})", format::number(*p)),
            Controller::RobustTable(t) => format!("robust(n={})", t.horizon()),
            Controller::ExplicitTree(t) => format!("tree(n={})", t.horizon()),
        }
    }
}

impl From<GainTable> for Controller {
    fn from(t: GainTable) -> Self {
        Controller::RobustTable(t)
    }
}

impl From<ExplicitTree> for Controller {
    fn from(t: ExplicitTree) -> Self {
        Controller::ExplicitTree(t)
    }
}

/// Kelly's perfect-information controller, gain `2p - 1`.
pub fn kelly_perfect(p: f64) -> Result<Controller> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    Ok(Controller::PerfectKelly { p })
}

/// Best constant gain for the integrated growth over `pset`: `2·centroid - 1`.
pub fn static_linear_optimal(pset: &UncertaintySet) -> Controller {
    Controller::StaticLinear {
        gain: (2.0 * pset.centroid() - 1.0).clamp(-1.0, 1.0),
    }
}

/// The integrated-growth-optimal nonlinear controller for an `n`-flip game.
pub fn robust_optimal(pset: &UncertaintySet, n: usize) -> Result<GainTable> {
    if n == 0 {
        return Err(Error::ZeroHorizon);
    }
    let moments = MomentTable::new(pset, n);
    Ok(robust_optimal_from_moments(&moments, n))
}

/// Same as [`robust_optimal`] with the moments already computed; the table
/// must cover degree `n`.
pub fn robust_optimal_from_moments(moments: &MomentTable, n: usize) -> GainTable {
    assert!(n >= 1 && moments.max_degree() >= n);
    let rows = (0..n)
        .map(|k| {
            (0..=k)
                .map(|q| {
                    let (alpha, beta) = node_weights(moments, k, q);
                    let g = (alpha - beta) / (alpha + beta);
                    debug_assert!(g.abs() < 1.0, "optimal gain must be interior: {g}");
                    g.clamp(-1.0, 1.0)
                })
                .collect()
        })
        .collect();
    GainTable {
        n,
        rows,
        pset: Some(moments.pset().clone()),
    }
}

/// Integrated probabilities of winning (`α`) and losing (`β`) a heads bet
/// at a stage-`k` node with `q` heads observed.
pub fn node_weights(moments: &MomentTable, k: usize, q: usize) -> (f64, f64) {
    (moments.get(q + 1, k - q), moments.get(q, k - q + 1))
}

impl fmt::Display for Controller {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// `robust`, `static` or `kelly:<p>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ControllerKind {
    Robust,
    Static,
    Kelly(f64),
}

impl ControllerKind {
    pub fn build(self, pset: &UncertaintySet, n: usize) -> Result<Controller> {
        match self {
            ControllerKind::Robust => robust_optimal(pset, n).map(Controller::from),
            ControllerKind::Static => Ok(static_linear_optimal(pset)),
            ControllerKind::Kelly(p) => kelly_perfect(p),
        }
    }
}

impl FromStr for ControllerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "robust" => Ok(ControllerKind::Robust),
            "static" => Ok(ControllerKind::Static),
            _ => {
                let p = s
                    .strip_prefix("kelly:")
                    .and_then(|p| p.parse::<f64>().ok())
                    .ok_or_else(|| {
                        Error::InvalidConfig(format!(
                            "unknown controller {s:?}; expected robust, static or kelly:<p>"
                        ))
                    })?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::InvalidProbability(p));
                }
                Ok(ControllerKind::Kelly(p))
            }
        }
    }
}
