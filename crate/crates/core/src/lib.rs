//! Gaussian beam superposition for the two-dimensional Helmholtz equation.
//!
//! Rays and their dynamic quantities are integrated through a smooth speed
//! model, each beam is expanded to second order around the point where its
//! central ray crosses a receiver line, and the beams are summed over a
//! uniform grid of source parameters. Closed-form error constants and
//! reference fields support convergence studies of the sum.

// negated comparisons are used on purpose so that NaN fails every check
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod beam_model;
pub mod cc_analysis;
pub mod error;
pub mod medium;
pub mod ray_engine;
pub mod reference_fields;
pub mod scalar;
pub mod study_harness;
pub mod superposition;

mod interp;
#[cfg(test)]
mod invariants;

pub use beam_model::{beam_width, eval_beam, find_crossing, BeamTaylor, Cutoff, ReceiverCrossing};
pub use error::{Error, Result};
pub use medium::{Coefficients, Domain, Medium, MediumKind};
pub use ray_engine::{
    amplitude_on_ray, phase_hessian, trace, trace_central, trace_dynamic, AmplitudeBranch, DynamicData, RayLaunch,
    RaySample, RayTrace, SymMatrix2,
};
pub use scalar::Real;
pub use superposition::{
    field_discrete, field_discrete_at, field_quadrature, plane_wave_bundle, BeamBundle, ComplexFieldSamples,
    SourceCurve, SuperposConfig,
};

pub type Medium64 = Medium<f64>;
pub type Medium32 = Medium<f32>;
pub type RayTrace64 = RayTrace<f64>;
pub type RayTrace32 = RayTrace<f32>;
pub type SuperposConfig64 = SuperposConfig<f64>;
pub type BeamBundle64 = BeamBundle<f64>;
pub type FieldSamples64 = ComplexFieldSamples<f64>;
