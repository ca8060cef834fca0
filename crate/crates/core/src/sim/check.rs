//! Built-in invariant quick-suite run by `gyrofree check`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{
    phi, psi, random_rotation, random_vec3, rho, so3_exp, sym_compose, sym_inverse, Mat3, SymElement,
};
use crate::kinematics::{lifted_dynamics, system_dynamics, InputVelocity, State};
use crate::sensors::{extract_theta, simulate_frame_accelerating, RigConfig};

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub samples: usize,
    pub max_error: f64,
    pub tolerance: f64,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.max_error <= self.tolerance
    }
}

fn element(rng: &mut ChaCha8Rng) -> SymElement {
    SymElement::new(random_rotation(rng), random_vec3(rng))
}

fn state(rng: &mut ChaCha8Rng) -> State {
    State::new(random_rotation(rng), random_vec3(rng))
}

fn input(rng: &mut ChaCha8Rng) -> InputVelocity {
    InputVelocity::new(random_vec3(rng), random_vec3(rng))
}

fn sym_dist(a: &SymElement, b: &SymElement) -> f64 {
    (a.rotation.matrix() - b.rotation.matrix()).norm() + (a.translation - b.translation).norm()
}

fn state_dist(a: &State, b: &State) -> f64 {
    (a.attitude.matrix() - b.attitude.matrix()).norm() + (a.omega - b.omega).norm()
}

fn max_over<F: FnMut(&mut ChaCha8Rng) -> f64>(rng: &mut ChaCha8Rng, samples: usize, mut f: F) -> f64 {
    (0..samples).map(|_| f(rng)).fold(0.0, f64::max)
}

/// Runs every check with `samples` random draws from `seed`.
pub fn quick_check(seed: u64, samples: usize) -> Vec<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut push = |name, max_error, tolerance| {
        out.push(CheckOutcome {
            name,
            samples,
            max_error,
            tolerance,
        })
    };

    let err = max_over(&mut rng, samples, |rng| {
        let (a, b, c) = (element(rng), element(rng), element(rng));
        let assoc = sym_dist(
            &sym_compose(&sym_compose(&a, &b), &c),
            &sym_compose(&a, &sym_compose(&b, &c)),
        );
        let inv = sym_dist(&sym_compose(&a, &sym_inverse(&a)), &SymElement::identity());
        let ident = sym_dist(&sym_compose(&SymElement::identity(), &a), &a);
        assoc.max(inv).max(ident)
    });
    push("group axioms", err, 1e-12);

    let err = max_over(&mut rng, samples, |rng| {
        let (a, b, x, v, y) = (element(rng), element(rng), state(rng), input(rng), random_vec3(rng));
        let ba = sym_compose(&b, &a);
        let phi_err = state_dist(&phi(&a, &phi(&b, &x)), &phi(&ba, &x));
        let lhs = psi(&a, &psi(&b, &v));
        let rhs = psi(&ba, &v);
        let psi_err = (lhs.pi - rhs.pi).norm() + (lhs.theta - rhs.theta).norm();
        let rho_err = (rho(&a, &rho(&b, &y)) - rho(&ba, &y)).norm();
        phi_err.max(psi_err).max(rho_err)
    });
    push("right-action laws", err, 1e-12);

    let err = max_over(&mut rng, samples, |rng| {
        let (x_el, x, v) = (element(rng), state(rng), input(rng));
        let pushed = system_dynamics(&x, &v).d_attitude * x_el.rotation.matrix();
        let moved = system_dynamics(&phi(&x_el, &x), &psi(&x_el, &v)).d_attitude;
        let d_omega = x_el.rotation.transpose() * v.theta - system_dynamics(&phi(&x_el, &x), &psi(&x_el, &v)).d_omega;
        (pushed - moved).norm() + d_omega.norm()
    });
    push("equivariance", err, 1e-12);

    let h = 1e-6;
    let err = max_over(&mut rng, samples, |rng| {
        let (x_el, x0, v) = (element(rng), state(rng), input(rng));
        let lift = lifted_dynamics(&x_el, &v, &x0);
        let spin = lift.d_rotation * x_el.rotation.matrix().transpose();
        let w = crate::geometry::vee(&spin).expect("lift rotation part is right-trivialized skew");
        let at = |s: f64| {
            let el = SymElement::new(
                so3_exp(&(w * s)) * x_el.rotation,
                x_el.translation + lift.d_translation * s,
            );
            phi(&el, &x0)
        };
        let (plus, minus) = (at(h), at(-h));
        let fd_att: Mat3 = (plus.attitude.matrix() - minus.attitude.matrix()) / (2.0 * h);
        let fd_omega = (plus.omega - minus.omega) / (2.0 * h);
        let f = system_dynamics(&phi(&x_el, &x0), &v);
        (fd_att - f.d_attitude).norm().max((fd_omega - f.d_omega).norm())
    });
    push("system lift (finite differences)", err, 1e-6);

    let err = max_over(&mut rng, samples, |rng| {
        let rig = RigConfig {
            lever_arm: 0.1 + rng.random::<f64>(),
            ..RigConfig::default()
        };
        let (x, theta, common) = (state(rng), random_vec3(rng), random_vec3(rng) * 5.0);
        let frame = simulate_frame_accelerating(&x, &theta, &common, &rig, 0.0, None);
        (extract_theta(&frame, rig.lever_arm).expect("positive lever arm") - theta).norm()
    });
    push("angular acceleration extraction", err, 1e-12);

    out
}
