//! Detection of a single-photon wave packet in a two-arm interferometer by
//! classical intensity detectors and by Unruh-DeWitt two-level detectors.
//!
//! The field is a scalar in 1+1 dimensions with mass `m`. A Gaussian packet
//! is split into two arms of lengths `l1`, `l2`, recombined with a relative
//! phase `theta`, and detected at one of two output ports:
//!
//! - [`classical`]: time-integrated flux; visibility decays with `l2 - l1`.
//! - [`udw`]: eternally coupled detector; resonant, full visibility.
//! - [`ensemble`]: Gaussian-switched detector averaged over switching times,
//!   interpolating between the two.
//! - [`system`]: both ports instrumented at once.
//! - [`goldenrule`]: the sinc-kernel picture and its naive fringe prediction.
//! - [`oracle`]: quadrature routes used to check the closed forms.

// Parameter checks are written `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classical;
pub mod ensemble;
mod error;
pub mod goldenrule;
pub mod model;
pub mod oracle;
pub mod propagation;
pub mod system;
pub mod udw;

pub use error::{Error, Result};
pub use model::{
    omega, DetectionResult, DetectorSpec, Interferometer, Normalization, Port, PulseProfile,
    Switching,
};
