//! Monogenic maps of a three-dimensional variable with values in the
//! algebra of complex quaternions `H(C)`.
//!
//! The algebra is handled in the idempotent basis `{e1, e2, e3, e4}` where
//! `1 = e1 + e2`. A variable `ζ = x + y·i2 + z·i3` ranges over the real
//! three-dimensional subspace `E3` fixed by a [`Frame`], and every element of
//! `E3` splits as `ζ = ξ1·e1 + ξ2·e2` with complex coordinates `ξ1, ξ2`.
//!
//! Modules:
//!
//! * [`algebra`]: arithmetic, functionals, ideals and norms of `H(C)`.
//! * [`frame`]: the geometry of `E3`, projections and degeneracy lines.
//! * [`analytic`]: analytic functions of one complex variable (expressions,
//!   power series, builtins) with differentiation and Taylor coefficients.
//! * [`monogenic`]: right/left G-monogenic maps, Cauchy–Riemann residuals,
//!   Hausdorff differentials, products, Taylor expansion and classification.
//! * [`integration`]: algebra-valued line integrals, Morera residuals and the
//!   integral norm estimate.
//!
//! All math is generic over the scalar type. Arithmetic of [`Quat`] only
//! needs [`num_traits::Num`], so it also runs over exact rationals; everything
//! that needs square roots or elementary functions is bounded by [`Real`].

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

pub mod algebra;
pub mod analytic;
pub mod frame;
pub mod integration;
pub mod json;
pub mod lowdisc;
pub mod monogenic;

pub use num_complex::Complex;

pub use algebra::{Ideal, MatrixRep, Quat, QuatStd};
pub use analytic::{AnalyticFn, Builtin, Expr, PowerSeries};
pub use frame::{DegeneracyLine, DomainBox, Frame, LineLabel, Point3, ValidationReport};
pub use integration::{Order, Path, Triangle};
pub use monogenic::{
    ClassificationReport, Component, ComponentMap, GMap, HausdorffDecomposition, LeftGMap,
    RightGMap, Side,
};

/// Floating point scalar used by everything beyond plain ring arithmetic.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` constant into the scalar type.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 constant representable in scalar type")
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type C64 = Complex<f64>;
pub type Quat64 = Quat<f64>;
pub type QuatStd64 = QuatStd<f64>;
pub type Frame64 = Frame<f64>;
pub type Point64 = Point3<f64>;
pub type Expr64 = Expr<f64>;
pub type AnalyticFn64 = AnalyticFn<f64>;
pub type ComponentMap64 = ComponentMap<f64>;
pub type RightGMap64 = RightGMap<f64>;
pub type LeftGMap64 = LeftGMap<f64>;

pub type Quat32 = Quat<f32>;
pub type Frame32 = Frame<f32>;

/// Library-wide error, wrapping the per-module error kinds.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Algebra(#[from] algebra::AlgebraError),
    #[error(transparent)]
    Frame(#[from] frame::FrameError),
    #[error(transparent)]
    Parse(#[from] analytic::ParseError),
    #[error(transparent)]
    Eval(#[from] analytic::EvalError),
    #[error(transparent)]
    Monogenic(#[from] monogenic::MonogenicError),
    #[error(transparent)]
    Integration(#[from] integration::IntegrationError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
