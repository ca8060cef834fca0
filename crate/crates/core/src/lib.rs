//! Gyro-free attitude and angular velocity estimation.
//!
//! A rigid body carries four accelerometers at `0, l·e₁, l·e₂, l·e₃` and a
//! magnetometer. Differences between the accelerometers give the angular
//! acceleration in closed form; accelerometer 0 and the magnetometer give two body
//! frame directions. An equivariant observer on the group `SO(3) ⋉ R³` fuses them
//! into an estimate of attitude and angular velocity without a gyroscope.
//!
//! - [`geometry`]: SO(3), the symmetry group and its actions on states, inputs and outputs.
//! - [`kinematics`]: second-order attitude kinematics, the lifted system and integrators.
//! - [`sensors`]: the virtual rig, angular acceleration extraction and measurement logs.
//! - [`observer`]: the observer, its innovation and Lyapunov diagnostics.
//! - [`sim`]: the simulation harness behind the `gyrofree` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod kinematics;
pub mod observer;
pub mod sensors;
pub mod sim;

pub use error::{Error, Result};
pub use geometry::{Rotation, SymElement, Vec3};
pub use kinematics::{InputVelocity, State};
pub use observer::{Diagnostics, ObserverConfig, ObserverState};
pub use sensors::{MeasurementFrame, OutputPair, RigConfig};
