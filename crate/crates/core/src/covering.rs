//! Overlapping coverings of the continuity intervals by windows of equal width.
//!
//! Every cover interval `U` has width `h_max_d`, holds at least `d + 1` nodes and
//! carries `K` blend points strictly inside it. Cover intervals never cross a gap.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{continuity_intervals, mesh_condition, window_width, Extremum, GapSpec, SampledSignal};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverInterval<T> {
    pub a: T,
    pub b: T,
    pub first_node: usize,
    pub last_node: usize,
    pub blend_points: Vec<T>,
    /// Index of the continuity interval this window belongs to.
    pub parent: usize,
}

impl<T: Scalar> CoverInterval<T> {
    pub fn node_indices(&self) -> RangeInclusive<usize> {
        self.first_node..=self.last_node
    }

    pub fn node_count(&self) -> usize {
        self.last_node - self.first_node + 1
    }

    pub fn width(&self) -> T {
        self.b - self.a
    }

    pub fn contains(&self, x: T) -> bool {
        self.a <= x && x <= self.b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Constructive covering valid on arbitrary meshes.
    General,
    /// Windows of `d + 1` node steps sharing one node with their successor.
    Equispaced,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Covering<T> {
    pub intervals: Vec<CoverInterval<T>>,
    /// Number of cover intervals per continuity interval.
    pub counts: Vec<usize>,
    pub d: usize,
    /// Blend points per interval; 0 until [`attach_blend_points`] runs.
    pub k: usize,
    pub width: T,
    pub scheme: Scheme,
}

impl<T: Scalar> Covering<T> {
    /// Total number of cover intervals, `M`.
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Cover intervals of continuity interval `l`.
    pub fn slice(&self, l: usize) -> &[CoverInterval<T>] {
        let start: usize = self.counts[..l].iter().sum();
        &self.intervals[start..start + self.counts[l]]
    }

    pub fn blend_sets(&self) -> Vec<Vec<T>> {
        self.intervals.iter().map(|u| u.blend_points.clone()).collect()
    }

    pub fn n_max(&self) -> usize {
        self.intervals.iter().map(|u| u.node_count()).max().unwrap_or(0)
    }
}

fn checked_width<T: Scalar>(signal: &SampledSignal<T>, gaps: &GapSpec, d: usize) -> Result<T> {
    let intervals = continuity_intervals(signal, gaps)?;
    let h_min = intervals.h_min();
    let width = window_width(signal, gaps, d, Extremum::Max)?;
    if !mesh_condition(signal, h_min, width) {
        return Err(Error::MeshCondition {
            d,
            h_min: h_min.to_f64_lossy(),
            h_max_d: width.to_f64_lossy(),
        });
    }
    Ok(width)
}

/// Index range of nodes inside `[a, b]`, with roundoff slack.
fn nodes_within<T: Scalar>(signal: &SampledSignal<T>, a: T, b: T) -> (usize, usize) {
    let tol = signal.abscissa_tolerance();
    let x = signal.nodes();
    let first = x.partition_point(|&v| v < a - tol);
    let end = x.partition_point(|&v| v <= b + tol);
    (first, end.saturating_sub(1))
}

/// Covering built by walking each continuity interval left to right: start at
/// the left end, restart each window at the left node of the node interval
/// containing the previous right end, and close with `[b - h, b]`.
pub fn build_covering_general<T: Scalar>(
    signal: &SampledSignal<T>,
    gaps: &GapSpec,
    d: usize,
) -> Result<Covering<T>> {
    let width = checked_width(signal, gaps, d)?;
    let tol = signal.abscissa_tolerance();
    let x = signal.nodes();
    let continuity = continuity_intervals(signal, gaps)?;
    let mut intervals = Vec::new();
    let mut counts = Vec::with_capacity(continuity.intervals.len());

    for (l, ci) in continuity.intervals.iter().enumerate() {
        let before = intervals.len();
        let push = |intervals: &mut Vec<CoverInterval<T>>, a: T, b: T| -> Result<T> {
            let (first, last) = nodes_within(signal, a, b);
            let first = first.max(ci.first_node);
            let last = last.min(ci.last_node);
            let found = if last >= first { last - first + 1 } else { 0 };
            if found < d + 1 {
                return Err(Error::CoverNodeCount {
                    index: intervals.len(),
                    found,
                    required: d + 1,
                });
            }
            intervals.push(CoverInterval {
                a,
                b,
                first_node: first,
                last_node: last,
                blend_points: Vec::new(),
                parent: l,
            });
            Ok(b)
        };

        let mut right = push(&mut intervals, ci.a, ci.a + width)?;
        let mut prev_start = ci.a;
        while right < ci.b - tol {
            if right + width > ci.b + tol {
                push(&mut intervals, ci.b - width, ci.b)?;
                break;
            }
            // left node of the node interval containing `right`; a node within
            // roundoff of `right` counts as `right` itself
            let i = signal
                .interval_index(right + tol)
                .clamp(ci.first_node, ci.last_node.saturating_sub(1));
            let start = x[i];
            if start <= prev_start {
                return Err(Error::CoverNodeCount {
                    index: intervals.len(),
                    found: 0,
                    required: d + 1,
                });
            }
            prev_start = start;
            let end = if (start + width - ci.b).abs() <= tol {
                ci.b
            } else {
                start + width
            };
            right = push(&mut intervals, start, end)?;
        }
        counts.push(intervals.len() - before);
    }

    Ok(Covering {
        intervals,
        counts,
        d,
        k: 0,
        width,
        scheme: Scheme::General,
    })
}

/// Covering by windows `[x_i, x_{i+d+1}]` stepping by `d + 1` nodes; a final
/// window that would overrun the continuity interval is shifted left to end on it.
pub fn build_covering_equispaced<T: Scalar>(
    signal: &SampledSignal<T>,
    gaps: &GapSpec,
    d: usize,
) -> Result<Covering<T>> {
    signal.check_equispaced()?;
    let width = checked_width(signal, gaps, d)?;
    let x = signal.nodes();
    let steps = d + 1;
    let continuity = continuity_intervals(signal, gaps)?;
    let mut intervals = Vec::new();
    let mut counts = Vec::with_capacity(continuity.intervals.len());

    for (l, ci) in continuity.intervals.iter().enumerate() {
        if ci.node_steps() < steps {
            return Err(Error::MeshCondition {
                d,
                h_min: ci.length().to_f64_lossy(),
                h_max_d: width.to_f64_lossy(),
            });
        }
        let mut starts: Vec<usize> = (ci.first_node..=ci.last_node - steps)
            .step_by(steps)
            .collect();
        let last_end = starts.last().map_or(ci.first_node, |&s| s + steps);
        if last_end < ci.last_node {
            starts.push(ci.last_node - steps);
        }
        for &s in &starts {
            intervals.push(CoverInterval {
                a: x[s],
                b: x[s + steps],
                first_node: s,
                last_node: s + steps,
                blend_points: Vec::new(),
                parent: l,
            });
        }
        counts.push(starts.len());
    }

    Ok(Covering {
        intervals,
        counts,
        d,
        k: 0,
        width,
        scheme: Scheme::Equispaced,
    })
}

/// `K` points `a + κ (b - a) / (K + 1)`, `κ = 1..=K`.
pub fn open_equispaced<T: Scalar>(a: T, b: T, k: usize) -> Vec<T> {
    let step = (b - a) / T::from_usize_lossy(k + 1);
    (1..=k).map(|j| a + step * T::from_usize_lossy(j)).collect()
}

/// Places `K` blend points in every cover interval.
///
/// With `share_overlaps`, consecutive cover intervals of the same continuity
/// interval list identical blend points on their overlap: the overlap receives
/// the default points of whichever neighbour has more of them there, and the
/// remaining points of each set are spread evenly over the part of its window
/// not shared with a neighbour. Overlaps of zero length leave the default
/// placement untouched.
pub fn attach_blend_points<T: Scalar>(
    mut covering: Covering<T>,
    k: usize,
    share_overlaps: bool,
) -> Result<Covering<T>> {
    if k == 0 {
        return Err(Error::InvalidParameter("blend point count K must be >= 1".into()));
    }
    let defaults: Vec<Vec<T>> = covering
        .intervals
        .iter()
        .map(|u| open_equispaced(u.a, u.b, k))
        .collect();

    if !share_overlaps {
        for (u, pts) in covering.intervals.iter_mut().zip(defaults) {
            u.blend_points = pts;
        }
        covering.k = k;
        return Ok(covering);
    }

    let m = covering.len();
    // shared[i]: points on the overlap between interval i and i + 1
    let mut shared: Vec<Option<(T, T, Vec<T>)>> = vec![None; m.saturating_sub(1)];
    for i in 0..m.saturating_sub(1) {
        let (u, v) = (&covering.intervals[i], &covering.intervals[i + 1]);
        if u.parent != v.parent || v.a >= u.b {
            continue;
        }
        let (lo, hi) = (v.a, u.b);
        let inside = |pts: &[T]| -> Vec<T> {
            pts.iter().copied().filter(|&p| lo <= p && p <= hi).collect()
        };
        let left = inside(&defaults[i]);
        let right = inside(&defaults[i + 1]);
        let pts = if right.len() > left.len() { right } else { left };
        shared[i] = Some((lo, hi, pts));
    }

    for i in 0..m {
        let u = &covering.intervals[i];
        let left = if i > 0 { shared[i - 1].as_ref() } else { None };
        let right = shared.get(i).and_then(|s| s.as_ref());
        if left.is_none() && right.is_none() {
            continue;
        }
        let private_lo = left.map_or(u.a, |(_, hi, _)| *hi);
        let private_hi = right.map_or(u.b, |(lo, _, _)| *lo);
        let n_left = left.map_or(0, |(_, _, p)| p.len());
        let n_right = right.map_or(0, |(_, _, p)| p.len());
        if private_lo > private_hi {
            return Err(Error::BlendSharing {
                index: i,
                reason: "overlaps with both neighbours intersect".into(),
            });
        }
        if n_left + n_right > k {
            return Err(Error::BlendSharing {
                index: i,
                reason: format!("{} shared points exceed K = {k}", n_left + n_right),
            });
        }
        let n_private = k - n_left - n_right;
        if n_private > 0 && private_lo >= private_hi {
            return Err(Error::BlendSharing {
                index: i,
                reason: "no room left for unshared points".into(),
            });
        }
        let mut pts: Vec<T> = Vec::with_capacity(k);
        if let Some((_, _, p)) = left {
            pts.extend_from_slice(p);
        }
        pts.extend(open_equispaced(private_lo, private_hi, n_private));
        if let Some((_, _, p)) = right {
            pts.extend_from_slice(p);
        }
        let distinct = pts.windows(2).all(|w| w[0] < w[1]);
        let interior = pts.first().is_some_and(|&p| p > u.a) && pts.last().is_some_and(|&p| p < u.b);
        if !distinct || !interior {
            return Err(Error::BlendSharing {
                index: i,
                reason: "shared placement is not strictly increasing and interior".into(),
            });
        }
        covering.intervals[i].blend_points = pts;
    }
    for (u, pts) in covering.intervals.iter_mut().zip(defaults) {
        if u.blend_points.is_empty() {
            u.blend_points = pts;
        }
    }
    covering.k = k;
    Ok(covering)
}
