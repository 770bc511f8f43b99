//! Quasi-interpolation of univariate samples with known jump discontinuities,
//! blending local polynomial fits by multinode Shepard weights.
//!
//! Everything is generic over the floating point type; the `*64` aliases fix it to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod covering;
pub mod error;
pub mod error_analysis;
pub mod grid;
pub mod local_fit;
pub mod quasi_interp;
pub mod scalar;
pub mod shepard;
pub mod testfns;

pub use covering::{CoverInterval, Covering, Scheme};
pub use error::{Error, ErrorKind, Result, Stage};
pub use grid::{GapSpec, MeshReport, SampledSignal};
pub use local_fit::{LocalModel, ModelKind};
pub use quasi_interp::{EvalPoint, Mode, Params, QuasiInterpolant, SchemeChoice};
pub use scalar::Scalar;
pub use shepard::{ShepardBasis, WeightVector};
pub use testfns::{NoiseSpec, TestFunction};

pub type SampledSignal64 = SampledSignal<f64>;
pub type Covering64 = Covering<f64>;
pub type LocalModel64 = LocalModel<f64>;
pub type ShepardBasis64 = ShepardBasis<f64>;
pub type QuasiInterpolant64 = QuasiInterpolant<f64>;
