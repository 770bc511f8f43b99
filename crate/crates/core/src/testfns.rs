//! Benchmark functions on `[-1, 1]`, their jumps, derivative bounds and noisy sampling.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{equispaced_nodes, write_signal_csv, GapSpec, SampledSignal};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestFunction {
    F1,
    F2,
    F3,
    F4,
    F5,
    F6,
}

/// A jump at `at`; `left_closed` tells whether `at` itself belongs to the left piece.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    pub at: f64,
    pub left_closed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Standard deviation of the additive Gaussian noise.
    pub amplitude: f64,
    pub seed: u64,
}

const OMEGA1: f64 = 17.0 * std::f64::consts::PI / 8.0;
const OMEGA6: f64 = 20.0 * std::f64::consts::PI;

impl TestFunction {
    pub const ALL: [TestFunction; 6] = [Self::F1, Self::F2, Self::F3, Self::F4, Self::F5, Self::F6];

    pub fn name(self) -> &'static str {
        match self {
            Self::F1 => "f1",
            Self::F2 => "f2",
            Self::F3 => "f3",
            Self::F4 => "f4",
            Self::F5 => "f5",
            Self::F6 => "f6",
        }
    }

    pub fn jumps(self) -> &'static [Jump] {
        const AT_ZERO: [Jump; 1] = [Jump { at: 0.0, left_closed: true }];
        const F4: [Jump; 3] = [
            Jump { at: -0.5, left_closed: true },
            Jump { at: 0.0, left_closed: false },
            Jump { at: 0.5, left_closed: false },
        ];
        match self {
            Self::F1 | Self::F2 | Self::F3 => &AT_ZERO,
            Self::F4 => &F4,
            Self::F5 | Self::F6 => &[],
        }
    }

    fn piecewise(self) -> bool {
        !self.jumps().is_empty()
    }

    /// Value at `x`; piecewise functions reject `x` outside `[-1, 1]`.
    pub fn eval<T: Scalar>(self, x: T) -> Result<T> {
        if self.piecewise() && !(x >= -T::one() && x <= T::one()) {
            return Err(Error::InvalidParameter(format!(
                "{} is defined on [-1, 1], got x = {x}",
                self.name()
            )));
        }
        Ok(self.value(x))
    }

    /// Like [`eval`](Self::eval) but returns NaN outside the domain.
    pub fn value<T: Scalar>(self, x: T) -> T {
        let one = T::one();
        let half = T::lit(0.5);
        if self.piecewise() && !(x >= -one && x <= one) {
            return T::nan();
        }
        match self {
            Self::F1 => {
                let s = (T::lit(OMEGA1) * x).sin();
                if x <= T::zero() {
                    s
                } else {
                    half * s + T::lit(10.0)
                }
            }
            Self::F2 => {
                if x <= T::zero() {
                    half * x.powi(5) - x * x
                } else {
                    x.powi(6) - x.powi(4) + x * x - T::lit(2.0)
                }
            }
            Self::F3 => {
                let u = x + one;
                if x <= T::zero() {
                    (u / T::lit(2.0)).exp()
                } else {
                    one + (u * u / T::lit(4.0)).exp()
                }
            }
            Self::F4 => {
                if x.abs() >= half {
                    let t = x / T::lit(4.0);
                    T::lit(5.0) / (t * t + one)
                } else if x < T::zero() {
                    T::lit(1.5)
                } else {
                    T::lit(0.25)
                }
            }
            Self::F5 => one / (one + T::lit(25.0) * x * x),
            Self::F6 => (T::lit(OMEGA6) * x).cos(),
        }
    }

    /// Upper bound for `sup |f^(order)|` over every continuity piece in `[-1, 1]`.
    ///
    /// Exact for f1, f2, f3 and f6; f4 and f5 use the Cauchy-type bound
    /// `k! / c^(k+2)` for `1 / (x^2 + c^2)`.
    pub fn derivative_sup(self, order: usize) -> f64 {
        self.piece_sups(order).into_iter().fold(0.0, f64::max)
    }

    /// Like [`derivative_sup`](Self::derivative_sup) restricted to the pieces meeting `[lo, hi]`.
    pub fn derivative_sup_on(self, order: usize, lo: f64, hi: f64) -> f64 {
        let sups = self.piece_sups(order);
        let mut edges = vec![-1.0];
        edges.extend(self.jumps().iter().map(|j| j.at));
        edges.push(1.0);
        let mut best = 0.0f64;
        for (i, s) in sups.iter().enumerate() {
            let (plo, phi) = if sups.len() == 1 { (-1.0, 1.0) } else { (edges[i], edges[i + 1]) };
            if lo <= phi && hi >= plo {
                best = best.max(*s);
            }
        }
        best
    }

    fn piece_sups(self, k: usize) -> Vec<f64> {
        let kf = k as i32;
        let fact = (1..=k).map(|j| j as f64).product::<f64>();
        match self {
            Self::F1 => {
                let w = OMEGA1.powi(kf);
                vec![w, if k == 0 { 10.5 } else { 0.5 * w }]
            }
            Self::F2 => {
                const LEFT: [f64; 6] = [1.5, 4.5, 12.0, 30.0, 60.0, 60.0];
                const RIGHT: [f64; 7] = [2.0, 4.0, 20.0, 96.0, 336.0, 720.0, 720.0];
                vec![
                    LEFT.get(k).copied().unwrap_or(0.0),
                    RIGHT.get(k).copied().unwrap_or(0.0),
                ]
            }
            Self::F3 => {
                let left = 0.5f64.powi(kf) * 0.5f64.exp();
                // d^k/du^k e^(u^2/4) = P_k(u) e^(u^2/4), P_{k+1} = P_k' + (u/2) P_k;
                // P_k has non-negative coefficients, so the sup sits at u = 2
                let mut p = vec![1.0f64];
                for _ in 0..k {
                    let mut next = vec![0.0; p.len() + 1];
                    for (j, &c) in p.iter().enumerate() {
                        if j > 0 {
                            next[j - 1] += c * j as f64;
                        }
                        next[j + 1] += 0.5 * c;
                    }
                    p = next;
                }
                let at_two: f64 = p.iter().enumerate().map(|(j, &c)| c * 2f64.powi(j as i32)).sum();
                let right = at_two * 1f64.exp() + if k == 0 { 1.0 } else { 0.0 };
                vec![left, right]
            }
            Self::F4 => {
                let outer = 5.0 * fact / 4f64.powi(kf);
                let (ml, mr) = if k == 0 { (1.5, 0.25) } else { (0.0, 0.0) };
                vec![outer, ml, mr, outer]
            }
            Self::F5 => vec![fact * 5f64.powi(kf)],
            Self::F6 => vec![OMEGA6.powi(kf)],
        }
    }

    /// Gap indices of the jumps on the equispaced grid with `n` steps.
    pub fn gaps(self, n: usize) -> Result<GapSpec> {
        let nodes: Vec<f64> = equispaced_nodes(-1.0, 1.0, n);
        let indices = self
            .jumps()
            .iter()
            .map(|j| {
                let p = if j.left_closed {
                    nodes.partition_point(|&x| x <= j.at)
                } else {
                    nodes.partition_point(|&x| x < j.at)
                };
                p.saturating_sub(1)
            })
            .collect();
        let gaps = GapSpec::new(indices);
        gaps.validate(n).map_err(|e| {
            Error::InvalidGaps(format!("{} at n = {n}: {e}", self.name()))
        })?;
        Ok(gaps)
    }

    /// Samples on `n + 1` equispaced nodes of `[-1, 1]`, with optional noise.
    pub fn sample<T: Scalar>(
        self,
        n: usize,
        noise: Option<NoiseSpec>,
    ) -> Result<(SampledSignal<T>, GapSpec)> {
        if n < 2 {
            return Err(Error::InvalidParameter("need n >= 2".into()));
        }
        let gaps = self.gaps(n)?;
        let nodes: Vec<T> = equispaced_nodes(-T::one(), T::one(), n);
        let mut values: Vec<T> = nodes.iter().map(|&x| self.value(x)).collect();
        if let Some(spec) = noise {
            if !(spec.amplitude >= 0.0) || !spec.amplitude.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "noise amplitude must be finite and >= 0, got {}",
                    spec.amplitude
                )));
            }
            if spec.amplitude > 0.0 {
                let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
                let normal = Normal::new(0.0, spec.amplitude).expect("valid standard deviation");
                for v in values.iter_mut() {
                    *v += T::lit(normal.sample(&mut rng));
                }
            }
        }
        Ok((SampledSignal::new(nodes, values)?, gaps))
    }

    pub fn export_csv<W: Write>(self, n: usize, noise: Option<NoiseSpec>, writer: W) -> Result<()> {
        let (signal, _) = self.sample::<f64>(n, noise)?;
        write_signal_csv(&signal, writer)
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TestFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown test function '{s}'")))
    }
}
