//! Multinode Shepard weights.
//!
//! `B_i(x) = P_i(x)^-mu / sum_t P_t(x)^-mu` with `P_i(x) = prod_k |x - xi_ik|`.
//! Evaluation works with `L_i = ln P_i` shifted by `min_i L_i`, which is the
//! same quotient without overflow. At an exact blend point the singular factor
//! is cancelled and the limit is returned.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{ln_factorial, log_add_exp, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShepardBasis<T> {
    blend_sets: Vec<Vec<T>>,
    mu: u32,
}

/// Shepard weights at one abscissa, one entry per blend set.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector<T> {
    pub weights: Vec<T>,
}

impl<T: Scalar> WeightVector<T> {
    pub fn sum(&self) -> T {
        self.weights.iter().fold(T::zero(), |s, &w| s + w)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Indices with nonzero weight.
    pub fn active(&self) -> impl Iterator<Item = usize> + '_ {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > T::zero())
            .map(|(i, _)| i)
    }
}

pub(crate) fn check_mu(mu: u32) -> Result<()> {
    if mu == 0 || !mu.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "mu must be a positive even integer, got {mu}"
        )));
    }
    Ok(())
}

/// `ln prod |x - p|` accumulated with occasional rescaling. Exact hits are
/// skipped and counted.
fn log_distance_product<T: Scalar>(points: &[T], x: T) -> (T, usize) {
    let lo = T::min_positive_value().sqrt();
    let hi = T::max_value().sqrt();
    let mut acc = T::zero();
    let mut prod = T::one();
    let mut hits = 0;
    for &p in points {
        let dist = (x - p).abs();
        if dist == T::zero() {
            hits += 1;
            continue;
        }
        prod *= dist;
        if prod < lo || prod > hi {
            acc += prod.ln();
            prod = T::one();
        }
    }
    (acc + prod.ln(), hits)
}

impl<T: Scalar> ShepardBasis<T> {
    pub fn new(mut blend_sets: Vec<Vec<T>>, mu: u32) -> Result<Self> {
        check_mu(mu)?;
        if blend_sets.is_empty() {
            return Err(Error::InvalidParameter("no blend sets".into()));
        }
        for (i, set) in blend_sets.iter_mut().enumerate() {
            if set.is_empty() {
                return Err(Error::InvalidParameter(format!("blend set {i} is empty")));
            }
            if set.iter().any(|p| !p.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "blend set {i} has a non-finite point"
                )));
            }
            set.sort_by(|a, b| a.partial_cmp(b).unwrap());
            if set.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidParameter(format!(
                    "blend set {i} repeats a point"
                )));
            }
        }
        Ok(Self { blend_sets, mu })
    }

    pub fn mu(&self) -> u32 {
        self.mu
    }

    pub fn len(&self) -> usize {
        self.blend_sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blend_sets.is_empty()
    }

    pub fn blend_sets(&self) -> &[Vec<T>] {
        &self.blend_sets
    }

    /// Unnormalized log-weights `-mu ln P_i(x)`; `None` marks a set that gets
    /// weight zero because another set has a blend point at `x`.
    fn log_weights(&self, x: T) -> Vec<Option<T>> {
        let mu = T::from_u32(self.mu).unwrap();
        let logs: Vec<(T, usize)> = self
            .blend_sets
            .iter()
            .map(|set| log_distance_product(set, x))
            .collect();
        let max_hits = logs.iter().map(|&(_, h)| h).max().unwrap_or(0);
        logs.into_iter()
            .map(|(l, h)| (h == max_hits).then(|| -mu * l))
            .collect()
    }

    pub fn eval(&self, x: T) -> WeightVector<T> {
        let mut weights = Vec::with_capacity(self.len());
        self.eval_into(x, &mut weights);
        WeightVector { weights }
    }

    /// Writes the weights at `x` into `out`, replacing its contents.
    pub fn eval_into(&self, x: T, out: &mut Vec<T>) {
        out.clear();
        let logs = self.log_weights(x);
        let top = logs
            .iter()
            .flatten()
            .copied()
            .fold(T::neg_infinity(), T::max);
        out.extend(
            logs.iter()
                .map(|l| l.map_or(T::zero(), |v| (v - top).exp())),
        );
        normalize(out);
        let flush = T::flush_threshold();
        if out.iter().any(|&w| w > T::zero() && w < flush) {
            for w in out.iter_mut() {
                if *w < flush {
                    *w = T::zero();
                }
            }
            normalize(out);
        }
    }
}

fn normalize<T: Scalar>(w: &mut [T]) {
    let s = w.iter().fold(T::zero(), |s, &v| s + v);
    for v in w.iter_mut() {
        *v /= s;
    }
}

/// Natural log of the leakage bound `F_mu(gap, h, k, K)`.
pub fn log_f_mu_bound<T: Scalar>(gap: T, h: T, k: usize, big_k: usize, mu: u32) -> Result<T> {
    check_mu(mu)?;
    if big_k < 2 || k == 0 || k >= big_k {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= k <= K - 1 and K >= 2, got k = {k}, K = {big_k}"
        )));
    }
    if !(gap >= T::zero()) || !(h > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "need gap >= 0 and h > 0, got gap = {gap}, h = {h}"
        )));
    }
    let numerator: T = ln_factorial::<T>(k) + ln_factorial::<T>(big_k - k);
    let product = (1..=big_k).fold(T::zero(), |s, kappa| {
        s + T::from_usize_lossy(big_k - k + kappa).ln()
    });
    let kk = T::from_usize_lossy(big_k);
    let spread = if gap == T::zero() {
        T::neg_infinity()
    } else {
        kk * ((kk + T::one()).ln() + (gap / h).ln())
    };
    let denominator = log_add_exp(product, spread);
    Ok(T::from_u32(mu).unwrap() * (numerator - denominator))
}

/// `F_mu(gap, h, k, K) = (k!(K-k)! / (prod_{j=1..K}(K-k+j) + (K+1)^K (gap/h)^K))^mu`,
/// evaluated in log space; underflow returns 0.
pub fn f_mu_bound<T: Scalar>(gap: T, h: T, k: usize, big_k: usize, mu: u32) -> Result<T> {
    Ok(log_f_mu_bound(gap, h, k, big_k, mu)?.exp())
}

/// Two equal-width windows `[alpha, beta]`, `[gamma, delta]` with `K`
/// equispaced blend points each.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaGeometry<T> {
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
    pub delta: T,
    pub k: usize,
    pub mu: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaReport<T> {
    /// Largest `B_2 / F_mu(gap, h, k, K)` for `x` between left blend points.
    pub max_ratio_left: T,
    /// Largest `B_1 / F_mu(gap, h, K - k, K)` for `x` between right blend points.
    pub max_ratio_right: T,
    pub samples: usize,
}

impl<T: Scalar> LemmaReport<T> {
    pub fn max_ratio(&self) -> T {
        self.max_ratio_left.max(self.max_ratio_right)
    }
}

/// Samples the leakage of each window's weight into the other one and compares
/// it with the closed-form bound slot by slot.
pub fn verify_lemma_bound<T: Scalar>(
    geometry: &LemmaGeometry<T>,
    samples_per_slot: usize,
) -> Result<LemmaReport<T>> {
    let LemmaGeometry {
        alpha,
        beta,
        gamma,
        delta,
        k: big_k,
        mu,
    } = *geometry;
    check_mu(mu)?;
    let h = beta - alpha;
    let tol = T::lit(1e-12) * h.abs().max(T::one());
    if !(alpha < beta && beta <= gamma && gamma < delta) || ((delta - gamma) - h).abs() > tol {
        return Err(Error::InvalidParameter(
            "lemma geometry needs alpha < beta <= gamma < delta with equal widths".into(),
        ));
    }
    if big_k < 2 || samples_per_slot == 0 {
        return Err(Error::InvalidParameter("need K >= 2 and at least one sample".into()));
    }
    let left = crate::covering::open_equispaced(alpha, beta, big_k);
    let right = crate::covering::open_equispaced(gamma, delta, big_k);
    let gap = gamma - beta;
    let mu_t = T::from_u32(mu).unwrap();
    let n_s = T::from_usize_lossy(samples_per_slot);

    // ln B_other at x, with B_other = P_other^-mu / (P_own^-mu + P_other^-mu)
    let log_leak = |own: &[T], other: &[T], x: T| -> T {
        let (l_own, _) = log_distance_product(own, x);
        let (l_other, _) = log_distance_product(other, x);
        -mu_t * l_other - log_add_exp(-mu_t * l_own, -mu_t * l_other)
    };

    let mut report = LemmaReport {
        max_ratio_left: T::zero(),
        max_ratio_right: T::zero(),
        samples: 0,
    };
    for slot in 1..big_k {
        let log_f_left = log_f_mu_bound(gap, h, slot, big_k, mu)?;
        let log_f_right = log_f_mu_bound(gap, h, big_k - slot, big_k, mu)?;
        for j in 0..samples_per_slot {
            let frac = (T::from_usize_lossy(j) + T::lit(0.5)) / n_s;
            let xl = left[slot - 1] + (left[slot] - left[slot - 1]) * frac;
            let xr = right[slot - 1] + (right[slot] - right[slot - 1]) * frac;
            let rl = (log_leak(&left, &right, xl) - log_f_left).exp();
            let rr = (log_leak(&right, &left, xr) - log_f_right).exp();
            report.max_ratio_left = report.max_ratio_left.max(rl);
            report.max_ratio_right = report.max_ratio_right.max(rr);
            report.samples += 2;
        }
    }
    Ok(report)
}
