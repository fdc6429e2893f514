//! Monte Carlo simulation of the wealth recursion `V_{k+1} = (1 + K_k X_k) V_k`.
//!
//! Trial `t` draws its flips from its own ChaCha8 stream: the key is
//! `seed_from_u64(seed)` and the stream number is `t`, so every trial is
//! reproducible on its own regardless of how trials are scheduled. A 64-bit
//! draw `v` is heads iff `v / 2^64 < p_true`, evaluated exactly.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::controller::{Controller, Flip};
use crate::error::{Error, Result};
use crate::format;
use crate::uncertainty::UncertaintySet;

/// Identifies the generator and the seed/trial mapping in reports.
pub const GENERATOR: &str =
    "chacha8 (rand_chacha 0.3): key = seed_from_u64(seed), stream = trial index";

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub controller: Controller,
    pub n: usize,
    pub p_true: f64,
    pub trials: u64,
    pub v0: f64,
    pub seed: u64,
    /// Keep per-trial outcomes in the report.
    pub keep_trials: bool,
}

impl SimConfig {
    pub fn new(controller: Controller, n: usize, p_true: f64) -> Self {
        Self {
            controller,
            n,
            p_true,
            trials: 10_000,
            v0: 1.0,
            seed: 0,
            keep_trials: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p_true) {
            return Err(Error::InvalidProbability(self.p_true));
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if !(self.v0.is_finite() && self.v0 > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "initial wealth must be positive, got {}",
                self.v0
            )));
        }
        self.controller.check_horizon(self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub trial: u64,
    pub final_wealth: f64,
    #[serde(serialize_with = "extended")]
    pub log_growth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub generator: &'static str,
    pub seed: u64,
    pub controller: String,
    /// Set the controller was built for, when known.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pset: Option<UncertaintySet>,
    pub n: usize,
    pub p_true: f64,
    pub v0: f64,
    pub trials: u64,
    /// Mean of `(1/n) ln(V_n / V_0)`; `-∞` as soon as one trial is ruined.
    #[serde(serialize_with = "extended")]
    pub mean_log_growth: f64,
    /// Mean over the trials that were not ruined; `None` if all were.
    pub mean_log_growth_survivors: Option<f64>,
    /// Standard error of the survivors' mean.
    pub stderr_log_growth: f64,
    pub min_final_wealth: f64,
    pub max_final_wealth: f64,
    pub ruin_count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcomes: Option<Vec<TrialOutcome>>,
}

fn extended<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_str(&format::number(*x))
    }
}

impl SimReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human-readable summary, one `key: value` per line.
    pub fn to_text(&self) -> String {
        let num = format::number;
        let mut out = String::new();
        out.push_str(&format!("generator: {}\n", self.generator));
        out.push_str(&format!("seed: {}\n", self.seed));
        out.push_str(&format!("controller: {}\n", self.controller));
        out.push_str(&format!("n: {}\n", self.n));
        out.push_str(&format!("p_true: {}\n", num(self.p_true)));
        out.push_str(&format!("v0: {}\n", num(self.v0)));
        out.push_str(&format!("trials: {}\n", self.trials));
        out.push_str(&format!("mean_log_growth: {}\n", num(self.mean_log_growth)));
        let survivors = self
            .mean_log_growth_survivors
            .map(num)
            .unwrap_or_else(|| "none".into());
        out.push_str(&format!("mean_log_growth_survivors: {survivors}\n"));
        out.push_str(&format!(
            "stderr_log_growth: {}\n",
            num(self.stderr_log_growth)
        ));
        out.push_str(&format!(
            "min_final_wealth: {}\n",
            num(self.min_final_wealth)
        ));
        out.push_str(&format!(
            "max_final_wealth: {}\n",
            num(self.max_final_wealth)
        ));
        out.push_str(&format!("ruin_count: {}\n", self.ruin_count));
        out
    }

    /// Per-trial CSV `trial,final_wealth,log_growth`; empty body unless
    /// outcomes were kept.
    pub fn trials_csv(&self) -> String {
        let mut out = String::from("trial,final_wealth,log_growth\n");
        for o in self.outcomes.iter().flatten() {
            out.push_str(&format!(
                "{},{},{}\n",
                o.trial,
                format::number(o.final_wealth),
                format::number(o.log_growth)
            ));
        }
        out
    }
}

/// Bernoulli draw: heads iff `v / 2^64 < p`, compared without rounding.
fn is_heads(v: u64, p: f64) -> bool {
    // p·2^64 is exact in f64; v < t  <=>  v < ceil(t) for integer v.
    let threshold = (p * 18_446_744_073_709_551_616.0).ceil() as u128;
    (v as u128) < threshold
}

/// Neumaier-compensated running sum.
#[derive(Default)]
struct Sum {
    total: f64,
    comp: f64,
}

impl Sum {
    fn add(&mut self, x: f64) {
        let t = self.total + x;
        if self.total.abs() >= x.abs() {
            self.comp += (self.total - t) + x;
        } else {
            self.comp += (x - t) + self.total;
        }
        self.total = t;
    }

    fn value(&self) -> f64 {
        self.total + self.comp
    }
}

/// Plays one trial; returns `(final wealth, per-flip log growth)`.
fn play_trial(cfg: &SimConfig, rng: &mut ChaCha8Rng, prefix: &mut Vec<Flip>) -> (f64, f64) {
    prefix.clear();
    let mut wealth = cfg.v0;
    let mut logs = 0.0;
    let mut ruined = false;
    for _ in 0..cfg.n {
        let flip = if is_heads(rng.next_u64(), cfg.p_true) {
            Flip::Heads
        } else {
            Flip::Tails
        };
        if !ruined {
            let gain = cfg
                .controller
                .gain_at(prefix)
                .expect("horizon checked in validate");
            let stake = gain * wealth;
            debug_assert!(stake.abs() <= wealth, "budget constraint");
            let factor = 1.0 + gain * flip.sign();
            if factor <= 0.0 {
                ruined = true;
                wealth = 0.0;
                logs = f64::NEG_INFINITY;
            } else {
                wealth *= factor;
                logs += factor.ln();
            }
        }
        prefix.push(flip);
    }
    (wealth, logs / cfg.n as f64)
}

pub fn run_simulation(cfg: &SimConfig) -> Result<SimReport> {
    cfg.validate()?;
    let base = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut prefix = Vec::with_capacity(cfg.n);
    let mut outcomes = cfg
        .keep_trials
        .then(|| Vec::with_capacity(cfg.trials as usize));

    let mut sum = Sum::default();
    let mut sum_sq = Sum::default();
    let mut survivors = 0u64;
    let mut ruin_count = 0u64;
    let mut min_wealth = f64::INFINITY;
    let mut max_wealth = f64::NEG_INFINITY;

    for trial in 0..cfg.trials {
        let mut rng = base.clone();
        rng.set_stream(trial);
        let (wealth, growth) = play_trial(cfg, &mut rng, &mut prefix);
        min_wealth = min_wealth.min(wealth);
        max_wealth = max_wealth.max(wealth);
        if growth.is_finite() {
            survivors += 1;
            sum.add(growth);
            sum_sq.add(growth * growth);
        } else {
            ruin_count += 1;
        }
        if let Some(out) = outcomes.as_mut() {
            out.push(TrialOutcome {
                trial,
                final_wealth: wealth,
                log_growth: growth,
            });
        }
    }

    let (mean_survivors, stderr) = if survivors > 0 {
        let m = survivors as f64;
        let mean = sum.value() / m;
        let var = if survivors > 1 {
            ((sum_sq.value() - m * mean * mean) / (m - 1.0)).max(0.0)
        } else {
            0.0
        };
        (Some(mean), (var / m).sqrt())
    } else {
        (None, 0.0)
    };
    let mean_log_growth = if ruin_count > 0 {
        f64::NEG_INFINITY
    } else {
        mean_survivors.expect("no ruin implies survivors")
    };

    Ok(SimReport {
        generator: GENERATOR,
        seed: cfg.seed,
        controller: cfg.controller.label(),
        pset: match &cfg.controller {
            Controller::RobustTable(t) => t.pset().cloned(),
            _ => None,
        },
        n: cfg.n,
        p_true: cfg.p_true,
        v0: cfg.v0,
        trials: cfg.trials,
        mean_log_growth,
        mean_log_growth_survivors: mean_survivors,
        stderr_log_growth: stderr,
        min_final_wealth: min_wealth,
        max_final_wealth: max_wealth,
        ruin_count,
        outcomes,
    })
}

/// Wealth trajectory `V_0, ..., V_n` along a fixed flip sequence.
pub fn single_path(c: &Controller, v0: f64, path: &[Flip]) -> Result<Vec<f64>> {
    if !(v0.is_finite() && v0 > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "initial wealth must be positive, got {v0}"
        )));
    }
    c.check_horizon(path.len())?;
    let mut trajectory = Vec::with_capacity(path.len() + 1);
    let mut wealth = v0;
    trajectory.push(wealth);
    for k in 0..path.len() {
        let gain = c.gain_at(&path[..k])?;
        wealth = (wealth * (1.0 + gain * path[k].sign())).max(0.0);
        trajectory.push(wealth);
    }
    Ok(trajectory)
}
