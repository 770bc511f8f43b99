//! Local polynomial models attached to cover intervals.
//!
//! Models live in a local frame mapping the cover interval onto `[-1, 1]`.
//! Interpolants use the Newton form on Leja-ordered nodes; least-squares fits
//! use a Legendre basis solved by Householder QR.

use serde::{Deserialize, Serialize};

use crate::covering::CoverInterval;
use crate::error::{Error, Result};
use crate::grid::SampledSignal;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Interpolating,
    LeastSquares,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "basis", rename_all = "snake_case")]
enum Representation<T> {
    Newton { abscissas: Vec<T>, coefficients: Vec<T> },
    Legendre { coefficients: Vec<T> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalModel<T> {
    center: T,
    half_width: T,
    kind: ModelKind,
    #[serde(flatten)]
    repr: Representation<T>,
}

impl<T: Scalar> LocalModel<T> {
    fn to_frame(&self, x: T) -> T {
        (x - self.center) / self.half_width
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn degree(&self) -> usize {
        match &self.repr {
            Representation::Newton { coefficients, .. } => coefficients.len() - 1,
            Representation::Legendre { coefficients } => coefficients.len() - 1,
        }
    }

    pub fn coefficients(&self) -> &[T] {
        match &self.repr {
            Representation::Newton { coefficients, .. } => coefficients,
            Representation::Legendre { coefficients } => coefficients,
        }
    }

    pub fn eval(&self, x: T) -> T {
        let t = self.to_frame(x);
        match &self.repr {
            Representation::Newton {
                abscissas,
                coefficients,
            } => {
                let last = coefficients.len() - 1;
                let mut acc = coefficients[last];
                for j in (0..last).rev() {
                    acc = acc * (t - abscissas[j]) + coefficients[j];
                }
                acc
            }
            Representation::Legendre { coefficients } => {
                let mut acc = coefficients[0];
                let (mut p_prev, mut p) = (T::one(), t);
                for (k, &c) in coefficients.iter().enumerate().skip(1) {
                    acc += c * p;
                    let kk = T::from_usize_lossy(k);
                    let next = ((kk + kk + T::one()) * t * p - kk * p_prev) / (kk + T::one());
                    p_prev = p;
                    p = next;
                }
                acc
            }
        }
    }
}

fn frame_of<T: Scalar>(cover: &CoverInterval<T>) -> (T, T) {
    let two = T::lit(2.0);
    ((cover.a + cover.b) / two, (cover.b - cover.a) / two)
}

fn local_data<T: Scalar>(cover: &CoverInterval<T>, signal: &SampledSignal<T>) -> (Vec<T>, Vec<T>) {
    let r = cover.node_indices();
    (
        signal.nodes()[r.clone()].to_vec(),
        signal.values()[r].to_vec(),
    )
}

/// Greedy Leja order: start at the largest magnitude, then maximize the
/// product of distances to the points already chosen.
fn leja_order<T: Scalar>(t: &[T]) -> Vec<usize> {
    let n = t.len();
    let mut order = Vec::with_capacity(n);
    let mut used = vec![false; n];
    let first = (0..n)
        .max_by(|&i, &j| t[i].abs().partial_cmp(&t[j].abs()).unwrap())
        .unwrap();
    order.push(first);
    used[first] = true;
    // log-products of distances to the chosen set
    let mut score: Vec<T> = t.iter().map(|&v| (v - t[first]).abs().ln()).collect();
    while order.len() < n {
        let next = (0..n)
            .filter(|&i| !used[i])
            .max_by(|&i, &j| score[i].partial_cmp(&score[j]).unwrap())
            .unwrap();
        used[next] = true;
        order.push(next);
        for i in 0..n {
            if !used[i] {
                score[i] += (t[i] - t[next]).abs().ln();
            }
        }
    }
    order
}

/// The lowest-degree polynomial through the samples on the nodes of `cover`.
pub fn interpolating_model<T: Scalar>(
    cover: &CoverInterval<T>,
    signal: &SampledSignal<T>,
) -> LocalModel<T> {
    let (center, half_width) = frame_of(cover);
    let (xs, ys) = local_data(cover, signal);
    let t: Vec<T> = xs.iter().map(|&x| (x - center) / half_width).collect();
    let order = leja_order(&t);
    let abscissas: Vec<T> = order.iter().map(|&i| t[i]).collect();
    let mut coefficients: Vec<T> = order.iter().map(|&i| ys[i]).collect();
    let n = abscissas.len();
    for level in 1..n {
        for i in (level..n).rev() {
            coefficients[i] =
                (coefficients[i] - coefficients[i - 1]) / (abscissas[i] - abscissas[i - level]);
        }
    }
    LocalModel {
        center,
        half_width,
        kind: ModelKind::Interpolating,
        repr: Representation::Newton {
            abscissas,
            coefficients,
        },
    }
}

fn legendre_row<T: Scalar>(t: T, degree: usize) -> Vec<T> {
    let mut row = Vec::with_capacity(degree + 1);
    row.push(T::one());
    if degree >= 1 {
        row.push(t);
    }
    for k in 1..degree {
        let kk = T::from_usize_lossy(k);
        let next = ((kk + kk + T::one()) * t * row[k] - kk * row[k - 1]) / (kk + T::one());
        row.push(next);
    }
    row
}

/// Least-squares solution of the dense system `a c = y` (`a` is rows x cols,
/// row-major, rows >= cols, full column rank) by Householder QR.
fn householder_lstsq<T: Scalar>(mut a: Vec<Vec<T>>, mut y: Vec<T>) -> Vec<T> {
    let rows = a.len();
    let cols = a[0].len();
    for j in 0..cols {
        let norm = (j..rows).map(|i| a[i][j] * a[i][j]).fold(T::zero(), |s, v| s + v).sqrt();
        if norm == T::zero() {
            continue;
        }
        let alpha = if a[j][j] > T::zero() { -norm } else { norm };
        let mut v: Vec<T> = (j..rows).map(|i| a[i][j]).collect();
        v[0] -= alpha;
        let vnorm2 = v.iter().fold(T::zero(), |s, &e| s + e * e);
        if vnorm2 == T::zero() {
            continue;
        }
        let two = T::lit(2.0);
        for c in j..cols {
            let dot = (j..rows).fold(T::zero(), |s, i| s + v[i - j] * a[i][c]);
            let f = two * dot / vnorm2;
            for i in j..rows {
                a[i][c] -= f * v[i - j];
            }
        }
        let dot = (j..rows).fold(T::zero(), |s, i| s + v[i - j] * y[i]);
        let f = two * dot / vnorm2;
        for i in j..rows {
            y[i] -= f * v[i - j];
        }
    }
    let mut c = vec![T::zero(); cols];
    for j in (0..cols).rev() {
        let s = ((j + 1)..cols).fold(y[j], |s, k| s - a[j][k] * c[k]);
        c[j] = s / a[j][j];
    }
    c
}

/// Degree-`degree` polynomial minimizing the squared residuals on the nodes of `cover`.
pub fn least_squares_model<T: Scalar>(
    cover: &CoverInterval<T>,
    signal: &SampledSignal<T>,
    degree: usize,
) -> Result<LocalModel<T>> {
    let count = cover.node_count();
    if degree + 1 > count {
        return Err(Error::DegreeTooHigh {
            index: cover.first_node,
            degree,
            max: count - 1,
        });
    }
    let (center, half_width) = frame_of(cover);
    let (xs, ys) = local_data(cover, signal);
    let a: Vec<Vec<T>> = xs
        .iter()
        .map(|&x| legendre_row((x - center) / half_width, degree))
        .collect();
    let coefficients = householder_lstsq(a, ys);
    Ok(LocalModel {
        center,
        half_width,
        kind: ModelKind::LeastSquares,
        repr: Representation::Legendre { coefficients },
    })
}

/// `prod |x - x_i|` over the nodes of `cover`; summed in log space past 30 factors.
pub fn nodal_polynomial_abs<T: Scalar>(cover: &CoverInterval<T>, signal: &SampledSignal<T>, x: T) -> T {
    let nodes = &signal.nodes()[cover.node_indices()];
    if nodes.len() > 30 {
        let mut log_sum = T::zero();
        for &xi in nodes {
            let dist = (x - xi).abs();
            if dist == T::zero() {
                return T::zero();
            }
            log_sum += dist.ln();
        }
        log_sum.exp()
    } else {
        nodes.iter().fold(T::one(), |p, &xi| p * (x - xi).abs())
    }
}

/// Lebesgue function `sum_i |l_i(y)|` of Lagrange interpolation on the nodes of `cover`.
pub fn lebesgue_function<T: Scalar>(cover: &CoverInterval<T>, signal: &SampledSignal<T>, y: T) -> T {
    let (center, half_width) = frame_of(cover);
    let t: Vec<T> = signal.nodes()[cover.node_indices()]
        .iter()
        .map(|&x| (x - center) / half_width)
        .collect();
    let s = (y - center) / half_width;
    let mut total = T::zero();
    for (i, &ti) in t.iter().enumerate() {
        let mut l = T::one();
        for (j, &tj) in t.iter().enumerate() {
            if i != j {
                l = l * (s - tj) / (ti - tj);
            }
        }
        total += l.abs();
    }
    total
}

/// Largest Lebesgue function value over a uniform probe grid on `domain`
/// (default: the whole signal range). A lower estimate of the true constant.
pub fn lebesgue_constant<T: Scalar>(
    cover: &CoverInterval<T>,
    signal: &SampledSignal<T>,
    probe_grid_size: usize,
    domain: Option<(T, T)>,
) -> Result<T> {
    if probe_grid_size < 2 {
        return Err(Error::InvalidParameter(
            "probe grid needs at least 2 points".into(),
        ));
    }
    let (lo, hi) = domain.unwrap_or((signal.a(), signal.b()));
    let steps = T::from_usize_lossy(probe_grid_size - 1);
    Ok((0..probe_grid_size)
        .map(|i| lo + (hi - lo) * T::from_usize_lossy(i) / steps)
        .map(|y| lebesgue_function(cover, signal, y))
        .fold(T::zero(), T::max))
}
