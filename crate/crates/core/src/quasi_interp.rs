//! The quasi-interpolation operator `Q(x) = sum_i B_i(x) p_i(x)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::covering::{attach_blend_points, build_covering_equispaced, build_covering_general, Covering, Scheme};
use crate::error::{Result, Stage};
use crate::grid::{GapSpec, SampledSignal};
use crate::local_fit::{interpolating_model, least_squares_model, LocalModel};
use crate::scalar::Scalar;
use crate::shepard::{ShepardBasis, WeightVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeChoice {
    /// Equispaced windows on uniform grids, the general construction otherwise.
    #[default]
    Auto,
    General,
    Equispaced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Interpolating,
    /// Least-squares fit of the given degree on each cover interval.
    LeastSquares { degree: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    pub d: usize,
    pub mu: u32,
    pub k: usize,
    pub scheme: SchemeChoice,
    pub mode: Mode,
    /// `None` picks the scheme default: off for equispaced, on for general.
    pub share_overlaps: Option<bool>,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            d: 3,
            mu: 4,
            k: 10,
            scheme: SchemeChoice::Auto,
            mode: Mode::Interpolating,
            share_overlaps: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiInterpolant<T> {
    signal: SampledSignal<T>,
    gaps: GapSpec,
    covering: Covering<T>,
    models: Vec<LocalModel<T>>,
    basis: ShepardBasis<T>,
    mode: Mode,
}

/// One entry of [`QuasiInterpolant::eval_batch`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalPoint<T> {
    pub x: T,
    pub value: T,
    /// `x` lies outside `[a, b]`.
    pub extrapolated: bool,
    /// `x` lies strictly inside a gap interval.
    pub in_gap: bool,
}

/// `Q(x)` together with the range of the active local models at `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope<T> {
    pub value: T,
    pub lo: T,
    pub hi: T,
}

impl<T: Scalar> QuasiInterpolant<T> {
    pub fn build(signal: &SampledSignal<T>, gaps: &GapSpec, params: &Params) -> Result<Self> {
        gaps.validate(signal.n()).map_err(|e| e.at(Stage::Grid))?;
        crate::shepard::check_mu(params.mu).map_err(|e| e.at(Stage::Shepard))?;

        let scheme = match params.scheme {
            SchemeChoice::General => Scheme::General,
            SchemeChoice::Equispaced => Scheme::Equispaced,
            SchemeChoice::Auto if signal.uniform_step().is_some() => Scheme::Equispaced,
            SchemeChoice::Auto => Scheme::General,
        };
        let covering = match scheme {
            Scheme::General => build_covering_general(signal, gaps, params.d),
            Scheme::Equispaced => build_covering_equispaced(signal, gaps, params.d),
        }
        .map_err(|e| e.at(Stage::Covering))?;

        let share = params
            .share_overlaps
            .unwrap_or(scheme == Scheme::General);
        let covering =
            attach_blend_points(covering, params.k, share).map_err(|e| e.at(Stage::BlendPoints))?;

        let models = covering
            .intervals
            .iter()
            .map(|u| match params.mode {
                Mode::Interpolating => Ok(interpolating_model(u, signal)),
                Mode::LeastSquares { degree } => least_squares_model(u, signal, degree),
            })
            .collect::<Result<Vec<_>>>()
            .map_err(|e| e.at(Stage::LocalFit))?;

        let basis =
            ShepardBasis::new(covering.blend_sets(), params.mu).map_err(|e| e.at(Stage::Shepard))?;

        Ok(Self {
            signal: signal.clone(),
            gaps: gaps.clone(),
            covering,
            models,
            basis,
            mode: params.mode,
        })
    }

    pub fn signal(&self) -> &SampledSignal<T> {
        &self.signal
    }

    pub fn gaps(&self) -> &GapSpec {
        &self.gaps
    }

    pub fn covering(&self) -> &Covering<T> {
        &self.covering
    }

    pub fn models(&self) -> &[LocalModel<T>] {
        &self.models
    }

    pub fn basis(&self) -> &ShepardBasis<T> {
        &self.basis
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn weights(&self, x: T) -> WeightVector<T> {
        self.basis.eval(x)
    }

    pub fn eval(&self, x: T) -> T {
        let mut buf = Vec::with_capacity(self.models.len());
        self.eval_with(x, &mut buf)
    }

    fn eval_with(&self, x: T, buf: &mut Vec<T>) -> T {
        self.basis.eval_into(x, buf);
        buf.iter()
            .zip(&self.models)
            .filter(|(&w, _)| w > T::zero())
            .fold(T::zero(), |acc, (&w, p)| acc + w * p.eval(x))
    }

    /// Value and active-model range at `x`; `lo <= value <= hi` up to rounding.
    pub fn envelope(&self, x: T) -> Envelope<T> {
        let w = self.basis.eval(x);
        let mut value = T::zero();
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for (&wi, p) in w.weights.iter().zip(&self.models) {
            if wi > T::zero() {
                let v = p.eval(x);
                value += wi * v;
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        Envelope { value, lo, hi }
    }

    pub fn in_gap(&self, x: T) -> bool {
        self.gaps.contains_abscissa(&self.signal, x)
    }

    pub fn eval_batch(&self, xs: &[T]) -> Vec<EvalPoint<T>> {
        let (a, b) = (self.signal.a(), self.signal.b());
        xs.par_iter()
            .map_init(
                || Vec::with_capacity(self.models.len()),
                |buf, &x| EvalPoint {
                    x,
                    value: self.eval_with(x, buf),
                    extrapolated: x < a || x > b,
                    in_gap: self.in_gap(x),
                },
            )
            .collect()
    }

    /// Values only, in input order.
    pub fn eval_many(&self, xs: &[T]) -> Vec<T> {
        xs.par_iter()
            .map_init(
                || Vec::with_capacity(self.models.len()),
                |buf, &x| self.eval_with(x, buf),
            )
            .collect()
    }
}
