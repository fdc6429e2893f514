//! Numerical integration on finite intervals.
//!
//! [`GaussLegendre`] integrates polynomials exactly (an `m`-node rule is exact
//! up to degree `2m - 1`). [`integrate_adaptive`] handles the non-polynomial
//! integrands, such as the perfect-information growth rate, by bisecting
//! the worst 7/15-point Gauss–Kronrod panel until the summed error estimate
//! drops below tolerance.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

const NEWTON_TOL: f64 = 1e-15;
const NEWTON_MAX_ITER: usize = 100;

impl GaussLegendre {
    /// Builds the `m`-node rule by Newton iteration on the roots of `P_m`.
    pub fn new(m: usize) -> Self {
        assert!(m >= 1, "a quadrature rule needs at least one node");
        let mut nodes = vec![0.0; m];
        let mut weights = vec![0.0; m];
        let half = m.div_ceil(2);
        for i in 0..half {
            // Tricomi's initial guess for the i-th largest root.
            let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
            let mut deriv = 0.0;
            for _ in 0..NEWTON_MAX_ITER {
                let (value, d) = legendre_with_derivative(m, x);
                deriv = d;
                let step = value / d;
                x -= step;
                if step.abs() < NEWTON_TOL {
                    break;
                }
            }
            // Refresh the derivative at the converged root.
            let (_, d) = legendre_with_derivative(m, x);
            if d.is_finite() && d != 0.0 {
                deriv = d;
            }
            let w = 2.0 / ((1.0 - x * x) * deriv * deriv);
            nodes[i] = -x;
            nodes[m - 1 - i] = x;
            weights[i] = w;
            weights[m - 1 - i] = w;
        }
        if m % 2 == 1 {
            nodes[m / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Smallest rule that integrates every polynomial of `degree` exactly.
    pub fn exact_for_degree(degree: usize) -> Self {
        Self::new((degree + 2).div_ceil(2))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫_a^b f(x) dx` with the nodes mapped affinely onto `[a, b]`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let sum: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum();
        half * sum
    }
}

/// `(P_m(x), P_m'(x))` by the three-term recurrence.
fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if m == 0 {
        return (1.0, 0.0);
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

// Kronrod abscissae (descending) and weights; odd indices are the 7-point Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(mid);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(mid - dx) + f(mid + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Panel {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Adaptive {
    pub value: f64,
    pub error_estimate: f64,
    pub panels: usize,
}

const MAX_PANELS: usize = 10_000;

/// Adaptive Gauss–Kronrod integration of `f` over `[a, b]` to absolute
/// tolerance `tol`. The integrand is never evaluated at `a` or `b`.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Adaptive {
    if a == b {
        return Adaptive {
            value: 0.0,
            error_estimate: 0.0,
            panels: 0,
        };
    }
    let mut panels = vec![kronrod_panel(&f, a, b)];
    loop {
        let total_err: f64 = panels.iter().map(|p| p.error).sum();
        if total_err <= tol || panels.len() >= MAX_PANELS {
            break;
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("at least one panel");
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            // Panel can no longer be split in floating point; accept it.
            panels.push(Panel { error: 0.0, ..p });
            continue;
        }
        panels.push(kronrod_panel(&f, p.a, mid));
        panels.push(kronrod_panel(&f, mid, p.b));
    }
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    Adaptive {
        value: panels.iter().map(|p| p.value).sum(),
        error_estimate: panels.iter().map(|p| p.error).sum(),
        panels: panels.len(),
    }
}
