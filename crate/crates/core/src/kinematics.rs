//! Second-order attitude kinematics, its lift onto the symmetry group, and the
//! discrete integrators used by the simulator and the observer.
//!
//! The system state is `(R, Ω)` with body-frame angular velocity `Ω`; the input is
//! `(π, θ)` where `π` is an extra angular velocity (zero for a physical body) and
//! `θ` the angular acceleration:
//!
//! ```text
//! Ṙ = R (Ω + π)×,   Ω̇ = θ
//! ```

use crate::error::{Error, Result};
use crate::geometry::{phi, skew, so3_exp, Mat3, Rotation, SymElement, Vec3};

/// Attitude of the body in the inertial frame and body-frame angular velocity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct State {
    pub attitude: Rotation,
    pub omega: Vec3,
}

impl State {
    pub fn new(attitude: Rotation, omega: Vec3) -> Self {
        State { attitude, omega }
    }
}

/// Input angular velocity `pi` and angular acceleration `theta`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InputVelocity {
    pub pi: Vec3,
    pub theta: Vec3,
}

impl InputVelocity {
    pub fn new(pi: Vec3, theta: Vec3) -> Self {
        InputVelocity { pi, theta }
    }

    /// The physical input: no extra angular velocity, only acceleration.
    pub fn natural(theta: Vec3) -> Self {
        InputVelocity {
            pi: Vec3::zeros(),
            theta,
        }
    }
}

/// Tangent vector at a [`State`], with the attitude part in ambient matrix form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateDerivative {
    pub d_attitude: Mat3,
    pub d_omega: Vec3,
}

/// Tangent vector at a [`SymElement`], with the rotation part in ambient matrix form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymDerivative {
    pub d_rotation: Mat3,
    pub d_translation: Vec3,
}

pub fn system_dynamics(x: &State, v: &InputVelocity) -> StateDerivative {
    StateDerivative {
        d_attitude: x.attitude.matrix() * skew(&(x.omega + v.pi)).matrix(),
        d_omega: v.theta,
    }
}

/// Lifted kinematics on the symmetry group for reference state `x0 = (R₀, Ω₀)`:
///
/// ```text
/// Q̇ = (Ω₀ + q + Qπ)× Q
/// q̇ = (Qπ)× (Ω₀ + q) + Qθ
/// ```
pub fn lifted_dynamics(x: &SymElement, v: &InputVelocity, x0: &State) -> SymDerivative {
    let w = x0.omega + x.translation;
    let q_pi = x.rotation * v.pi;
    SymDerivative {
        d_rotation: skew(&(w + q_pi)).matrix() * x.rotation.matrix(),
        d_translation: q_pi.cross(&w) + x.rotation * v.theta,
    }
}

/// State represented by the group element `x` relative to the reference `x0`. Same as [`phi`].
pub fn project_state(x: &SymElement, x0: &State) -> State {
    phi(x, x0)
}

/// One step of the ground-truth recursion `R⁺ = R exp((Ω + π) dt)`, `Ω⁺ = Ω + θ dt`.
pub fn integrate_state(x: &State, v: &InputVelocity, dt: f64) -> Result<State> {
    check_step(dt)?;
    Ok(State {
        attitude: x.attitude * so3_exp(&((x.omega + v.pi) * dt)),
        omega: x.omega + v.theta * dt,
    })
}

/// Lie–Euler step of the lifted kinematics: exponential left update of `Q` and a
/// forward Euler update of `q`. First order; the projected velocity picks up an
/// `O(dt²)` defect per step relative to [`integrate_state`].
pub fn integrate_sym(x: &SymElement, v: &InputVelocity, x0: &State, dt: f64) -> Result<SymElement> {
    check_step(dt)?;
    let w = x0.omega + x.translation + x.rotation * v.pi;
    let deriv = lifted_dynamics(x, v, x0);
    Ok(SymElement {
        rotation: so3_exp(&(w * dt)) * x.rotation,
        translation: x.translation + deriv.d_translation * dt,
    })
}

/// Step of the lifted kinematics whose projection reproduces [`integrate_state`]
/// exactly: the rotation update is the same left exponential as [`integrate_sym`],
/// and the translation is chosen so that `Qᵀ(Ω₀ + q)` advances by exactly `θ dt`.
///
/// Agrees with the forward Euler translation update to first order in `dt`.
pub fn integrate_sym_projected(x: &SymElement, v: &InputVelocity, x0: &State, dt: f64) -> Result<SymElement> {
    check_step(dt)?;
    let w = x0.omega + x.translation + x.rotation * v.pi;
    let rotation = so3_exp(&(w * dt)) * x.rotation;
    let projected_omega = x.rotation.transpose() * (x0.omega + x.translation) + v.theta * dt;
    Ok(SymElement {
        rotation,
        translation: rotation * projected_omega - x0.omega,
    })
}

fn check_step(dt: f64) -> Result<()> {
    if dt > 0.0 && dt.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveStep(dt))
    }
}
