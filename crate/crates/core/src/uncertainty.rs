//! The set `P ⊆ [0, 1]` known to contain the heads probability.
//!
//! Only finite unions of closed intervals are represented. Input intervals
//! that overlap or touch are merged, so every stored set is sorted, pairwise
//! disjoint and has strictly positive Lebesgue measure.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A closed interval `[lo, hi]` with `0 <= lo < hi <= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UncertaintySet {
    intervals: Vec<Interval>,
}

impl UncertaintySet {
    /// Builds a normalized set from `(lo, hi)` pairs.
    ///
    /// Rejects an empty list and any pair that is not `0 <= lo < hi <= 1`.
    /// Overlapping or touching pairs are merged.
    pub fn new(pairs: &[(f64, f64)]) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut intervals = Vec::with_capacity(pairs.len());
        for &(lo, hi) in pairs {
            let valid = lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi && hi <= 1.0;
            if !valid {
                return Err(Error::InvalidInterval { lo, hi });
            }
            intervals.push(Interval { lo, hi });
        }
        intervals.sort_by(|a, b| a.lo.total_cmp(&b.lo));

        let mut merged: Vec<Interval> = Vec::with_capacity(intervals.len());
        for iv in intervals {
            match merged.last_mut() {
                Some(last) if iv.lo <= last.hi => last.hi = last.hi.max(iv.hi),
                _ => merged.push(iv),
            }
        }
        Ok(Self { intervals: merged })
    }

    /// A single interval `[lo, hi]`.
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new(&[(lo, hi)])
    }

    /// The whole unit interval.
    pub fn unit() -> Self {
        Self {
            intervals: vec![Interval { lo: 0.0, hi: 1.0 }],
        }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn pairs(&self) -> Vec<(f64, f64)> {
        self.intervals.iter().map(|iv| (iv.lo, iv.hi)).collect()
    }

    /// Lebesgue measure `μ(P)`.
    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(Interval::len).sum()
    }

    /// Mean of `p` under the uniform distribution on the set, `(1/μ(P)) ∫_P p dp`.
    pub fn centroid(&self) -> f64 {
        let first: f64 = self
            .intervals
            .iter()
            .map(|iv| (iv.hi - iv.lo) * (iv.hi + iv.lo) / 2.0)
            .sum();
        (first / self.measure()).clamp(self.p_min(), self.p_max())
    }

    pub fn p_min(&self) -> f64 {
        self.intervals[0].lo
    }

    pub fn p_max(&self) -> f64 {
        self.intervals[self.intervals.len() - 1].hi
    }

    pub fn contains(&self, p: f64) -> bool {
        self.intervals.iter().any(|iv| iv.lo <= p && p <= iv.hi)
    }

    /// Reflection `{1 - p : p ∈ P}`.
    pub fn mirrored(&self) -> Self {
        let pairs: Vec<_> = self
            .intervals
            .iter()
            .map(|iv| (1.0 - iv.hi, 1.0 - iv.lo))
            .collect();
        Self::new(&pairs).expect("reflection of a valid set is valid")
    }
}

/// Text form `lo:hi[,lo:hi...]`, e.g. `0.25:0.95` or `0:0.2,0.8:1`.
impl FromStr for UncertaintySet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let fail = |reason: String| Error::ParseSet {
            input: s.to_string(),
            reason,
        };
        if compact.is_empty() {
            return Err(fail("empty input".into()));
        }
        let mut pairs = Vec::new();
        for part in compact.split(',') {
            let (lo, hi) = part
                .split_once(':')
                .ok_or_else(|| fail(format!("expected lo:hi, found {part:?}")))?;
            let parse = |t: &str| {
                t.parse::<f64>()
                    .map_err(|_| fail(format!("{t:?} is not a decimal number")))
            };
            pairs.push((parse(lo)?, parse(hi)?));
        }
        Self::new(&pairs)
    }
}

impl fmt::Display for UncertaintySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, iv) in self.intervals.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}:{}", iv.lo, iv.hi)?;
        }
        Ok(())
    }
}

impl Serialize for UncertaintySet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for UncertaintySet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
