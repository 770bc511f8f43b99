//! Sampled signals, gap specifications and the mesh quantities derived from them.
//!
//! A signal is a strictly increasing node set `x_0 < ... < x_n` with one sample
//! per node. Jumps are known only up to the node interval that brackets them:
//! gap index `α` means a discontinuity somewhere in `(x_α, x_{α+1})`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledSignal<T> {
    nodes: Vec<T>,
    values: Vec<T>,
}

impl<T: Scalar> SampledSignal<T> {
    pub fn new(nodes: Vec<T>, values: Vec<T>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidSignal(format!(
                "need at least 2 nodes, got {}",
                nodes.len()
            )));
        }
        if nodes.len() != values.len() {
            return Err(Error::InvalidSignal(format!(
                "{} nodes but {} values",
                nodes.len(),
                values.len()
            )));
        }
        if let Some(i) = nodes.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidSignal(format!("node {i} is not finite")));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSignal(format!("value {i} is not finite")));
        }
        if let Some(i) = nodes.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSignal(format!(
                "nodes not strictly increasing at index {}",
                i + 1
            )));
        }
        Ok(Self { nodes, values })
    }

    /// Samples `f` on `n + 1` equispaced nodes `a + (b - a) i / n`.
    pub fn equispaced(a: T, b: T, n: usize, f: impl Fn(T) -> T) -> Result<Self> {
        let nodes = equispaced_nodes(a, b, n);
        let values = nodes.iter().map(|&x| f(x)).collect();
        Self::new(nodes, values)
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Index of the last node (`n`); the signal holds `n + 1` samples.
    pub fn n(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn a(&self) -> T {
        self.nodes[0]
    }

    pub fn b(&self) -> T {
        self.nodes[self.n()]
    }

    /// Absolute tolerance for abscissa comparisons at the scale of this domain.
    pub fn abscissa_tolerance(&self) -> T {
        let scale = self.a().abs().max(self.b().abs()).max(self.b() - self.a());
        T::lit(8.0) * T::epsilon() * scale
    }

    /// Uniform step if the nodes are equispaced within relative `1e-12`.
    pub fn uniform_step(&self) -> Option<T> {
        self.check_equispaced().ok()
    }

    pub(crate) fn check_equispaced(&self) -> Result<T> {
        let step = (self.b() - self.a()) / T::from_usize_lossy(self.n());
        let tol = T::lit(1e-12).max(T::lit(64.0) * T::epsilon()) * step;
        match self
            .nodes
            .windows(2)
            .position(|w| ((w[1] - w[0]) - step).abs() > tol)
        {
            Some(index) => Err(Error::NotEquispaced { index }),
            None => Ok(step),
        }
    }

    /// Largest `i` with `x_i <= x`, clamped to `0..n`.
    pub fn interval_index(&self, x: T) -> usize {
        let p = self.nodes.partition_point(|&v| v <= x);
        p.saturating_sub(1).min(self.n() - 1)
    }
}

pub fn equispaced_nodes<T: Scalar>(a: T, b: T, n: usize) -> Vec<T> {
    let nn = T::from_usize_lossy(n);
    (0..=n)
        .map(|i| {
            if i == n {
                b
            } else {
                a + (b - a) * T::from_usize_lossy(i) / nn
            }
        })
        .collect()
}

/// Node-interval indices known to bracket a jump.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapSpec {
    indices: Vec<usize>,
}

impl GapSpec {
    pub fn new(indices: Vec<usize>) -> Self {
        Self { indices }
    }

    pub fn none() -> Self {
        Self::default()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    /// Checks the indices against a signal with last node index `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        for (pos, &alpha) in self.indices.iter().enumerate() {
            if alpha == 0 || alpha + 1 >= n {
                return Err(Error::InvalidGaps(format!(
                    "gap index {alpha} must satisfy 0 < index < {}",
                    n.saturating_sub(1)
                )));
            }
            if pos > 0 {
                let prev = self.indices[pos - 1];
                if prev + 1 >= alpha {
                    return Err(Error::InvalidGaps(format!(
                        "gap indices {prev} and {alpha} must satisfy prev + 1 < next"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Whether the open window `(x_i, x_j)` contains some gap interval.
    pub fn crosses(&self, i: usize, j: usize) -> bool {
        let p = self.indices.partition_point(|&a| a < i);
        self.indices.get(p).is_some_and(|&a| a < j)
    }

    /// Whether `x` lies strictly inside one of the gap intervals.
    pub fn contains_abscissa<T: Scalar>(&self, signal: &SampledSignal<T>, x: T) -> bool {
        let nodes = signal.nodes();
        self.indices
            .iter()
            .any(|&a| nodes[a] < x && x < nodes[a + 1])
    }
}

/// A maximal node-bounded interval free of known jumps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuityInterval<T> {
    pub first_node: usize,
    pub last_node: usize,
    pub a: T,
    pub b: T,
}

impl<T: Scalar> ContinuityInterval<T> {
    pub fn length(&self) -> T {
        self.b - self.a
    }

    pub fn node_steps(&self) -> usize {
        self.last_node - self.first_node
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuityIntervals<T> {
    pub intervals: Vec<ContinuityInterval<T>>,
}

impl<T: Scalar> ContinuityIntervals<T> {
    pub fn h_min(&self) -> T {
        self.intervals
            .iter()
            .map(|i| i.length())
            .fold(T::infinity(), T::min)
    }

    /// Index of the continuity interval whose closure contains `x`.
    pub fn locate(&self, x: T) -> Option<usize> {
        self.intervals.iter().position(|i| i.a <= x && x <= i.b)
    }
}

pub fn continuity_intervals<T: Scalar>(
    signal: &SampledSignal<T>,
    gaps: &GapSpec,
) -> Result<ContinuityIntervals<T>> {
    let n = signal.n();
    gaps.validate(n)?;
    let x = signal.nodes();
    let mut bounds = Vec::with_capacity(gaps.len() + 1);
    let mut start = 0;
    for &alpha in gaps.indices() {
        bounds.push((start, alpha));
        start = alpha + 1;
    }
    bounds.push((start, n));
    let intervals = bounds
        .into_iter()
        .map(|(first_node, last_node)| ContinuityInterval {
            first_node,
            last_node,
            a: x[first_node],
            b: x[last_node],
        })
        .collect();
    Ok(ContinuityIntervals { intervals })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extremum {
    Max,
    Min,
}

/// Extremal width of `d + 2`-node windows `[x_i, x_{i+d+1}]` that do not
/// contain a gap interval. `d = 0` gives the extremal admissible node spacing.
pub fn window_width<T: Scalar>(
    signal: &SampledSignal<T>,
    gaps: &GapSpec,
    d: usize,
    which: Extremum,
) -> Result<T> {
    let steps = d + 1;
    let n = signal.n();
    if steps > n {
        return Err(Error::NoAdmissibleWindow { steps });
    }
    let x = signal.nodes();
    let widths = (0..=n - steps)
        .filter(|&i| !gaps.crosses(i, i + steps))
        .map(|i| x[i + steps] - x[i]);
    let best = match which {
        Extremum::Max => widths.fold(None, |acc: Option<T>, w| Some(acc.map_or(w, |a| a.max(w)))),
        Extremum::Min => widths.fold(None, |acc: Option<T>, w| Some(acc.map_or(w, |a| a.min(w)))),
    };
    best.ok_or(Error::NoAdmissibleWindow { steps })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshReport<T> {
    /// Length of the shortest continuity interval.
    pub h_min: T,
    pub h_max_xn: T,
    pub h_min_xn: T,
    pub d: usize,
    pub h_max_d: T,
    pub h_min_d: T,
    /// Largest `d` with `h_min >= h_max_d`; `None` if even `d = 0` fails.
    pub d_max: Option<usize>,
    /// Narrowest gap interval; `None` without gaps.
    pub h_s_min: Option<T>,
    /// Whether the requested `d` satisfies `h_min >= h_max_d`.
    pub condition_holds: bool,
}

/// `h_min >= h_max_d` up to a few ulps of the domain scale.
pub(crate) fn mesh_condition<T: Scalar>(signal: &SampledSignal<T>, h_min: T, h_max_d: T) -> bool {
    h_min >= h_max_d - signal.abscissa_tolerance()
}

pub fn mesh_report<T: Scalar>(
    signal: &SampledSignal<T>,
    gaps: &GapSpec,
    d: usize,
) -> Result<MeshReport<T>> {
    let intervals = continuity_intervals(signal, gaps)?;
    let h_min = intervals.h_min();
    let h_max_xn = window_width(signal, gaps, 0, Extremum::Max)?;
    let h_min_xn = window_width(signal, gaps, 0, Extremum::Min)?;
    let h_max_d = window_width(signal, gaps, d, Extremum::Max)?;
    let h_min_d = window_width(signal, gaps, d, Extremum::Min)?;

    let mut d_max = None;
    let mut probe = 0;
    while let Ok(w) = window_width(signal, gaps, probe, Extremum::Max) {
        if !mesh_condition(signal, h_min, w) {
            break;
        }
        d_max = Some(probe);
        probe += 1;
    }

    let x = signal.nodes();
    let h_s_min = gaps
        .indices()
        .iter()
        .map(|&a| x[a + 1] - x[a])
        .fold(None, |acc: Option<T>, w| Some(acc.map_or(w, |m| m.min(w))));

    Ok(MeshReport {
        h_min,
        h_max_xn,
        h_min_xn,
        d,
        h_max_d,
        h_min_d,
        d_max,
        h_s_min,
        condition_holds: mesh_condition(signal, h_min, h_max_d),
    })
}

/// Reads `x,y` rows. A first row that does not parse as numbers is taken as a header.
pub fn read_signal_csv<T: Scalar, R: Read>(reader: R) -> Result<SampledSignal<T>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut nodes = Vec::new();
    let mut values = Vec::new();
    for (idx, record) in rdr.records().enumerate() {
        let row = idx + 1;
        let record = record.map_err(|e| Error::Csv {
            row: e.position().map_or(row, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(row, |p| p.line() as usize);
        if record.len() != 2 {
            return Err(Error::Csv {
                row: line,
                message: format!("expected 2 columns, found {}", record.len()),
            });
        }
        let parsed: Option<(f64, f64)> = record[0]
            .parse()
            .ok()
            .zip(record[1].parse().ok());
        match parsed {
            Some((x, y)) => {
                nodes.push(T::lit(x));
                values.push(T::lit(y));
            }
            None if idx == 0 => continue,
            None => {
                return Err(Error::Csv {
                    row: line,
                    message: format!("cannot parse '{},{}' as numbers", &record[0], &record[1]),
                })
            }
        }
    }
    SampledSignal::new(nodes, values)
}

pub fn write_signal_csv<T: Scalar, W: Write>(signal: &SampledSignal<T>, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(["x", "y"]).map_err(io)?;
    for (x, y) in signal.nodes().iter().zip(signal.values()) {
        w.write_record([x.to_f64_lossy().to_string(), y.to_f64_lossy().to_string()])
            .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}
