//! Error metrics and the ingredients of the a priori error bounds.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::covering::Covering;
use crate::error::{Error, Result};
use crate::grid::continuity_intervals;
use crate::local_fit::{lebesgue_constant, nodal_polynomial_abs};
use crate::quasi_interp::QuasiInterpolant;
use crate::scalar::{ln_factorial, Scalar};
use crate::shepard::f_mu_bound;

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Scalar> GaussLegendre<T> {
    /// Nodes by Newton iteration on `P_n`, followed by a self-check of the
    /// weight sum and, from order 2 on, of the exactness on `x^2`.
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidParameter("quadrature order must be >= 1".into()));
        }
        let tol = T::lit(1e-15).max(T::lit(4.0) * T::epsilon());
        let nn = T::from_usize_lossy(order);
        let mut nodes = vec![T::zero(); order];
        let mut weights = vec![T::zero(); order];
        for i in 0..order.div_ceil(2) {
            let guess = T::PI() * (T::from_usize_lossy(i + 1) - T::lit(0.25)) / (nn + T::lit(0.5));
            let mut x = guess.cos();
            let mut dp = T::one();
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(order, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= tol {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(order, x);
            if d != T::zero() {
                dp = d;
            }
            let w = T::lit(2.0) / ((T::one() - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[order - 1 - i] = x;
            weights[i] = w;
            weights[order - 1 - i] = w;
        }
        if order % 2 == 1 {
            nodes[order / 2] = T::zero();
        }
        let rule = Self { nodes, weights };
        let check = T::lit(1e-12).max(T::lit(64.0) * T::epsilon());
        let sum = rule.weights.iter().fold(T::zero(), |s, &w| s + w);
        let second = if order >= 2 {
            rule.integrate(|x| x * x, -T::one(), T::one())
        } else {
            T::lit(2.0 / 3.0)
        };
        if (sum - T::lit(2.0)).abs() > check || (second - T::lit(2.0 / 3.0)).abs() > check {
            return Err(Error::InvalidParameter(format!(
                "Gauss-Legendre self-check failed for order {order}"
            )));
        }
        Ok(rule)
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn integrate(&self, f: impl Fn(T) -> T, lo: T, hi: T) -> T {
        let half = (hi - lo) / T::lit(2.0);
        let mid = (hi + lo) / T::lit(2.0);
        let s = self
            .nodes
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |s, (&t, &w)| s + w * f(mid + half * t));
        s * half
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_with_derivative<T: Scalar>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    if n == 0 {
        return (T::one(), T::zero());
    }
    for k in 2..=n {
        let kk = T::from_usize_lossy(k);
        let p2 = ((T::lit(2.0) * kk - T::one()) * x * p1 - (kk - T::one()) * p0) / kk;
        p0 = p1;
        p1 = p2;
    }
    let nn = T::from_usize_lossy(n);
    let dp = nn * (x * p1 - p0) / (x * x - T::one());
    (p1, dp)
}

/// `x_i = a + (b - a) i / n_e`, `i = 0..=n_e`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvaluationGrid<T> {
    pub a: T,
    pub b: T,
    pub n_e: usize,
}

impl<T: Scalar> EvaluationGrid<T> {
    pub fn new(a: T, b: T, n_e: usize) -> Result<Self> {
        if n_e == 0 || !(a < b) {
            return Err(Error::InvalidParameter(
                "evaluation grid needs n_e >= 1 and a < b".into(),
            ));
        }
        Ok(Self { a, b, n_e })
    }

    pub fn points(&self) -> Vec<T> {
        let n = T::from_usize_lossy(self.n_e);
        (0..=self.n_e)
            .map(|i| {
                if i == self.n_e {
                    self.b
                } else {
                    self.a + (self.b - self.a) * T::from_usize_lossy(i) / n
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaxError<T> {
    pub value: T,
    pub argmax: T,
    pub in_gap: bool,
}

/// Largest `|f - Q|` over the given points; ties resolve to the first point.
pub fn e_max_at<T: Scalar>(
    q: &QuasiInterpolant<T>,
    f: impl Fn(T) -> T + Sync,
    points: &[T],
) -> MaxError<T> {
    let values = q.eval_many(points);
    let mut best = MaxError {
        value: T::zero(),
        argmax: points.first().copied().unwrap_or_else(T::nan),
        in_gap: false,
    };
    for (&x, &v) in points.iter().zip(&values) {
        let err = (f(x) - v).abs();
        if err > best.value || err.is_nan() {
            best.value = err;
            best.argmax = x;
            if err.is_nan() {
                break;
            }
        }
    }
    best.in_gap = q.in_gap(best.argmax);
    best
}

pub fn e_max<T: Scalar>(
    q: &QuasiInterpolant<T>,
    f: impl Fn(T) -> T + Sync,
    grid: &EvaluationGrid<T>,
) -> MaxError<T> {
    e_max_at(q, f, &grid.points())
}

/// Composite Gauss-Legendre approximation of `int_a^b |f - Q|`.
///
/// `breakpoints` must be increasing and span `[a, b]`; `None` uses the nodes.
pub fn e_l1<T: Scalar>(
    q: &QuasiInterpolant<T>,
    f: impl Fn(T) -> T + Sync,
    breakpoints: Option<&[T]>,
    order: usize,
) -> Result<T> {
    let rule = GaussLegendre::new(order)?;
    let bps = breakpoints.unwrap_or(q.signal().nodes());
    if bps.len() < 2 || bps.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter(
            "panel breakpoints must be increasing with at least two entries".into(),
        ));
    }
    let panels: Vec<T> = bps
        .par_windows(2)
        .map(|w| rule.integrate(|x| (f(x) - q.eval(x)).abs(), w[0], w[1]))
        .collect();
    Ok(panels.into_iter().fold(T::zero(), |s, v| s + v))
}

/// Union of blend-point spans, one closed piece per continuity interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XiDomain<T> {
    pub pieces: Vec<(T, T)>,
}

impl<T: Scalar> XiDomain<T> {
    pub fn contains(&self, x: T) -> bool {
        self.pieces.iter().any(|&(lo, hi)| lo <= x && x <= hi)
    }

    /// `count` equispaced points per piece, endpoints included.
    pub fn sample(&self, count: usize) -> Vec<T> {
        let mut out = Vec::with_capacity(count * self.pieces.len());
        for &(lo, hi) in &self.pieces {
            if count == 1 {
                out.push((lo + hi) / T::lit(2.0));
                continue;
            }
            let steps = T::from_usize_lossy(count - 1);
            out.extend((0..count - 1).map(|i| lo + (hi - lo) * T::from_usize_lossy(i) / steps));
            out.push(hi);
        }
        out
    }
}

pub fn xi_domain<T: Scalar>(covering: &Covering<T>) -> Result<XiDomain<T>> {
    if covering.k == 0 {
        return Err(Error::InvalidParameter("covering has no blend points".into()));
    }
    let pieces = (0..covering.counts.len())
        .map(|l| {
            let pts = covering.slice(l).iter().flat_map(|u| u.blend_points.iter().copied());
            pts.fold((T::infinity(), T::neg_infinity()), |(lo, hi), p| {
                (lo.min(p), hi.max(p))
            })
        })
        .collect();
    Ok(XiDomain { pieces })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundIngredients<T> {
    pub n_max: usize,
    pub m_f: T,
    pub m_h: usize,
    pub lebesgue_max: T,
    pub h_s_min: Option<T>,
    pub c1: T,
    pub c2: T,
    pub e1: T,
    pub e2: T,
}

impl<T: Scalar> BoundIngredients<T> {
    pub fn total(&self) -> T {
        self.e1 + self.e2
    }
}

/// Largest number of blend sets meeting a half-open window `(y - h, y + h]`, `y` in `[a, b]`.
pub fn blend_set_multiplicity<T: Scalar>(covering: &Covering<T>, a: T, b: T) -> usize {
    let h = covering.width;
    let sets: Vec<Vec<T>> = covering
        .intervals
        .iter()
        .map(|u| {
            let mut s = u.blend_points.clone();
            s.sort_by(|x, y| x.partial_cmp(y).unwrap());
            s
        })
        .collect();
    // the count is right-continuous in y and only rises at y = p - h
    let mut candidates: Vec<T> = sets
        .iter()
        .flatten()
        .map(|&p| (p - h).max(a))
        .filter(|&y| y <= b)
        .collect();
    candidates.push(a);
    candidates
        .iter()
        .map(|&y| {
            sets.iter()
                .filter(|s| {
                    let i = s.partition_point(|&p| p <= y - h);
                    i < s.len() && s[i] <= y + h
                })
                .count()
        })
        .max()
        .unwrap_or(0)
}

/// `sum_{theta >= 2} (theta + 1)^(n + 1) / (theta - 1/2)^(K mu)`.
fn tail_series<T: Scalar>(n_max: usize, k: usize, mu: u32) -> T {
    let p = T::from_usize_lossy(n_max + 1);
    let q = T::from_usize_lossy(k) * T::from_u32(mu).unwrap();
    let mut sum = T::zero();
    for theta in 2..2_000_000usize {
        let t = T::from_usize_lossy(theta);
        let term = (p * (t + T::one()).ln() - q * (t - T::lit(0.5)).ln()).exp();
        sum += term;
        if term < T::lit(1e-16) * sum {
            break;
        }
    }
    sum
}

/// Inputs to [`bound_terms`] that the samples cannot provide.
pub struct BoundInputs<F> {
    /// `order -> sup |f^(order)|` over all continuity intervals.
    pub derivative_sup: F,
    /// `sup |f|`; defaults to the largest sample magnitude.
    pub f_sup: Option<f64>,
    /// Probe points per cover interval for the Lebesgue constants.
    pub lebesgue_probes: usize,
}

pub fn bound_terms<T: Scalar, F: Fn(usize) -> T>(
    q: &QuasiInterpolant<T>,
    inputs: &BoundInputs<F>,
) -> Result<BoundIngredients<T>> {
    let cov = q.covering();
    let mu = q.basis().mu();
    let k = cov.k;
    let n_max = cov.n_max();
    let threshold = (n_max + 2) as f64 / k as f64;
    if !(mu as f64 > threshold) {
        return Err(Error::BoundHypothesis { mu, threshold });
    }
    let signal = q.signal();
    let h = cov.width;

    let mut orders: Vec<usize> = cov.intervals.iter().map(|u| u.node_count() + 1).collect();
    orders.sort_unstable();
    orders.dedup();
    let m_f = orders
        .iter()
        .map(|&o| (inputs.derivative_sup)(o))
        .fold(T::zero(), T::max);
    let m_h = blend_set_multiplicity(cov, signal.a(), signal.b());

    let series = tail_series::<T>(n_max, k, mu);
    let two = T::lit(2.0);
    let c1 = m_f
        * T::from_usize_lossy(m_h)
        * (T::one() + two * two.powi(n_max as i32 + 1) + two * series);
    let e1_factor = cov
        .intervals
        .iter()
        .map(|u| {
            let c = u.node_count() + 1;
            (T::from_usize_lossy(c) * (two * h).ln() - ln_factorial::<T>(c)).exp()
        })
        .fold(T::zero(), T::max);
    let e1 = c1 * e1_factor;

    let continuity = continuity_intervals(signal, q.gaps())?;
    let x = signal.nodes();
    let h_s_min = q
        .gaps()
        .indices()
        .iter()
        .map(|&a| x[a + 1] - x[a])
        .fold(None, |acc: Option<T>, w| Some(acc.map_or(w, |m| m.min(w))));

    let (lebesgue_max, c2, e2) = match h_s_min {
        None => (T::zero(), T::zero(), T::zero()),
        Some(gap) => {
            // with at least one gap every cover interval misses some continuity interval
            debug_assert!(continuity.intervals.len() > 1);
            let probes = inputs.lebesgue_probes;
            let lebesgue_max = cov
                .intervals
                .par_iter()
                .map(|u| lebesgue_constant(u, signal, probes, None))
                .collect::<Result<Vec<T>>>()?
                .into_iter()
                .fold(T::zero(), T::max);
            let f_sup = match inputs.f_sup {
                Some(v) => T::lit(v),
                None => signal.values().iter().fold(T::zero(), |m, &v| m.max(v.abs())),
            };
            let c2 = two * T::from_usize_lossy(cov.len()) * f_sup * (T::one() + lebesgue_max);
            let f = f_mu_bound(gap, h, k - 1, k, mu)?;
            (lebesgue_max, c2, c2 * f)
        }
    };

    Ok(BoundIngredients {
        n_max,
        m_f,
        m_h,
        lebesgue_max,
        h_s_min,
        c1,
        c2,
        e1,
        e2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointwiseBound<T> {
    pub local_term: T,
    pub leakage_term: T,
}

impl<T: Scalar> PointwiseBound<T> {
    pub fn total(&self) -> T {
        self.local_term + self.leakage_term
    }
}

/// Two-term pointwise error bound at `x` in the Xi domain.
///
/// `derivative_sup(order, lo, hi)` must bound `|f^(order)|` on `[lo, hi]`; it is
/// queried on the intersection of the cover intervals containing `x`.
pub fn pointwise_bound<T: Scalar>(
    q: &QuasiInterpolant<T>,
    x: T,
    f_value: T,
    derivative_sup: impl Fn(usize, T, T) -> T,
) -> Result<PointwiseBound<T>> {
    let cov = q.covering();
    let xi = xi_domain(cov)?;
    if !xi.contains(x) {
        return Err(Error::OutsideXi { x: x.to_f64_lossy() });
    }
    let signal = q.signal();
    let containing: Vec<usize> = (0..cov.len()).filter(|&i| cov.intervals[i].contains(x)).collect();

    let (lo, hi) = containing.iter().fold((T::neg_infinity(), T::infinity()), |(lo, hi), &i| {
        (lo.max(cov.intervals[i].a), hi.min(cov.intervals[i].b))
    });
    let local_term = containing
        .iter()
        .map(|&i| {
            let u = &cov.intervals[i];
            let order = u.node_count() + 1;
            let sup = derivative_sup(order, lo, hi);
            sup * (nodal_polynomial_abs(u, signal, x).ln() - ln_factorial::<T>(order)).exp()
        })
        .fold(T::zero(), T::max);

    let outside: Vec<usize> = (0..cov.len()).filter(|&i| !cov.intervals[i].contains(x)).collect();
    let leakage_term = if outside.is_empty() {
        T::zero()
    } else {
        let k = cov.k;
        let mu = q.basis().mu();
        let p_max = outside
            .iter()
            .map(|&i| q.models()[i].eval(x).abs())
            .fold(T::zero(), T::max);
        let mut f_max = T::zero();
        for &i in &outside {
            // spacing to the neighbours; overlapping windows count as touching
            let mut spacings = Vec::with_capacity(2);
            if i + 1 < cov.len() {
                spacings.push(cov.intervals[i + 1].a - cov.intervals[i].b);
            }
            if i > 0 {
                spacings.push(cov.intervals[i].a - cov.intervals[i - 1].b);
            }
            for s in spacings {
                f_max = f_max.max(f_mu_bound(s.max(T::zero()), cov.width, k - 1, k, mu)?);
            }
        }
        T::from_usize_lossy(cov.len()) * (f_value.abs() + p_max) * f_max
    };

    Ok(PointwiseBound {
        local_term,
        leakage_term,
    })
}
