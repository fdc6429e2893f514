//! Polynomial moment integrals `I(a, b) = ∫_P p^a (1-p)^b dp`.
//!
//! The integrand is a polynomial of degree `a + b`, so a per-interval
//! Gauss–Legendre rule with `⌈(a+b+2)/2⌉` nodes is exact up to rounding.
//! Expanding `(1-p)^b` binomially would cancel catastrophically for large `b`.

use crate::quadrature::GaussLegendre;
use crate::uncertainty::UncertaintySet;

/// `∫_P p^a (1-p)^b dp`.
pub fn moment(pset: &UncertaintySet, a: u32, b: u32) -> f64 {
    let rule = GaussLegendre::exact_for_degree((a + b) as usize);
    moment_with_rule(&rule, pset, a, b)
}

fn moment_with_rule(rule: &GaussLegendre, pset: &UncertaintySet, a: u32, b: u32) -> f64 {
    pset.intervals()
        .iter()
        .map(|iv| {
            rule.integrate(iv.lo, iv.hi, |p| {
                p.powi(a as i32) * (1.0 - p).powi(b as i32)
            })
        })
        .sum()
}

/// All moments `I(a, b)` with `a + b <= max_degree`, precomputed.
///
/// Stored triangularly by total degree `d = a + b`, so entry `(a, b)` lives at
/// `d(d+1)/2 + a`.
#[derive(Debug, Clone)]
pub struct MomentTable {
    pset: UncertaintySet,
    max_degree: usize,
    values: Vec<f64>,
}

impl MomentTable {
    /// Table covering every `a + b <= max_degree`. A gain table for an
    /// `n`-flip game needs `max_degree = n`.
    pub fn new(pset: &UncertaintySet, max_degree: usize) -> Self {
        let rule = GaussLegendre::exact_for_degree(max_degree);
        let mut values = Vec::with_capacity((max_degree + 1) * (max_degree + 2) / 2);
        for d in 0..=max_degree {
            for a in 0..=d {
                values.push(moment_with_rule(&rule, pset, a as u32, (d - a) as u32));
            }
        }
        Self {
            pset: pset.clone(),
            max_degree,
            values,
        }
    }

    pub fn pset(&self) -> &UncertaintySet {
        &self.pset
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// `I(a, b)`; panics if `a + b` exceeds the table's degree.
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.try_get(a, b).unwrap_or_else(|| {
            panic!(
                "moment ({a}, {b}) outside table of degree {}",
                self.max_degree
            )
        })
    }

    pub fn try_get(&self, a: usize, b: usize) -> Option<f64> {
        let d = a + b;
        (d <= self.max_degree).then(|| self.values[d * (d + 1) / 2 + a])
    }

    /// Iterates `((a, b), I(a, b))` in storage order.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        (0..=self.max_degree)
            .flat_map(|d| (0..=d).map(move |a| (a, d - a)))
            .zip(self.values.iter().copied())
    }
}
