//! Rotation kinematics on SO(3).
//!
//! The crate follows the chain from rotation matrices to the kinematic
//! identity `dR/dt = S(w) R`:
//!
//! - [`so3`]: validated rotation matrices, skew matrices, frames and the
//!   polar projection back onto SO(3).
//! - [`algebra`]: hat/vee, elementary rotations, rotations from frame
//!   triads, fixed-frame composition (`R = R_second * R_first`),
//!   infinitesimal rotations and the exp/log maps.
//! - [`differential`]: the increment `dR = S(dphi) R`, the rate
//!   `S(w) R` and central-difference verification with convergence-order
//!   estimation.
//! - [`propagator`]: attitude propagation from sampled angular velocity with
//!   exponential, Euler and renormalized-Euler steppers, plus drift metrics.
//! - [`io`] and [`cli`]: CSV/JSON formats and the `so3kin` command line.
//!
//! Angles are radians and rates rad/s throughout. Angular velocity is the
//! spatial one, expressed in the fixed reference frame, so every update
//! multiplies from the left.

// `!(x <= tol)` is used on purpose so NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod cli;
pub mod differential;
pub mod error;
pub mod io;
pub mod linalg;
pub mod propagator;
pub mod so3;

pub use algebra::{
    compose_fixed, compose_infinitesimal, elementary_rotation, exp_so3, exp_so3_minus_identity,
    exp_so3_with, hat, infinitesimal_rotation, log_so3, rotation_from_frames, vee, Axis, AxisAngle,
    InfinitesimalRotation,
};
pub use differential::{
    differential_increment, estimate_convergence_order, finite_difference_residual, rotation_rate,
    AngularVelocity, ResidualReport,
};
pub use error::{Error, Result};
pub use linalg::{Mat3, Vec3};
pub use propagator::{
    drift_report, propagate, sample_rate, step_euler, step_euler_renorm, step_exponential,
    DriftReport, Interpolation, Method, RateProfile, Trajectory, TrajectoryMeta, TrajectorySample,
};
pub use so3::{
    project_to_so3, validate_rotation, Frame, RotationMatrix, SkewMatrix, ToleranceConfig,
};
