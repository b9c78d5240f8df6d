//! Barrier certification and safety-filter synthesis for the kinematic
//! bicycle model around a single disk obstacle.
//!
//! The pipeline: pick a barrier `h` from a two-parameter family
//! ([`barrier`]), soundly verify that the safe steering set at every on-barrier
//! state is an interval with a concave lower edge ([`verifier`], built on
//! [`certify`]), synthesize a piecewise-linear filter that clamps any steering
//! command into that interval and export it as a ReLU network
//! ([`synthesis`]), then run it in closed loop ([`filter`], [`sim`]).
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod barrier;
pub mod certify;
pub mod error;
pub mod filter;
pub mod interval;
pub mod kbm;
pub mod math;
pub mod sim;
pub mod synthesis;
pub mod verifier;

pub use barrier::{k_min, BarrierParams, LieContext};
pub use certify::{bisect_root, certify_min, CertConfig, CertResult, CertTarget, Rect, Sign, Verdict};
pub use error::{Error, Result};
pub use filter::{apply_filter, is_in_r, ActiveBound, FilterDecision};
pub use interval::Interval;
pub use kbm::{beta_from_delta, delta_from_beta, dynamics, integrate_step, Control, RelState, VehicleParams};
pub use math::wrap_angle;
pub use synthesis::{FilterNetwork, PwlFunction, ReluNetwork};
pub use verifier::{verify, VerificationCertificate, VerifyConfig};
