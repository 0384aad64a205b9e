//! Wasserstein-1, sliced, max-sliced and k-plane sliced distances, with the
//! numerical machinery used to probe how they compare: exact 1D and discrete
//! transport, sphere and Grassmannian sampling, a moment-cancelling
//! counterexample family, and Hilbert/Riesz transform checks.

// NaN must fail these checks, so `!(x > 0.0)` is deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod counterexample;
pub mod error;
pub mod harness;
pub mod measures;
pub mod ot1d;
pub mod ot_exact;
pub mod quadrature;
pub mod slicing;
pub mod special;
pub mod transforms;

pub use error::{Error, Result};
pub use measures::{
    project_1d, signed_split, Analytic1DMeasure, DiscreteMeasure, SignedDiscreteMeasure, StepCDF,
};
pub use ot1d::{w1_cdf, w1_gaussian_1d, wp_quantile, W1Result};
pub use ot_exact::{dual_gap, w1_exact, w1_exact_with, w1_signed, SolverConfig, TransportPlan};
pub use slicing::{Frame, SlicedEstimate};
