//! Equivariant observer on the symmetry group.
//!
//! The observer state `X̂ = (Q̂, q̂)` runs a copy of the lifted kinematics driven by
//! an innovation built from the measured gravity and magnetic directions:
//!
//! ```text
//! α  = m × Q̂ᵀR₀ᵀm̊ + a × Q̂ᵀR₀ᵀå
//! π̂  = k₁ α
//! θ̂  = θ + k₂ α
//! ```
//!
//! and its state estimate is `(R̂, Ω̂) = φ(X̂, (R₀, Ω₀))`. Along noise-free
//! trajectories `L = (1 − âᵀa) + (1 − m̂ᵀm) + |Ω − Ω̂|²/(2k₂)` satisfies
//! `dL/dt = −k₁|α|²`.

use crate::error::{Error, Result};
use crate::geometry::{phi, Mat3, SymElement, Vec3};
use crate::kinematics::{integrate_sym_projected, InputVelocity, State};
use crate::sensors::OutputPair;

pub type ObserverState = SymElement;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObserverConfig {
    /// Attitude innovation gain.
    pub k1: f64,
    /// Angular velocity innovation gain.
    pub k2: f64,
    /// Constant reference state `(R₀, Ω₀)`.
    pub reference: State,
    /// Inertial direction seen by accelerometer 0 (gravity reaction, `e₃`).
    pub accel_reference: Vec3,
    /// Inertial magnetic field direction.
    pub mag_reference: Vec3,
}

impl ObserverConfig {
    pub fn new(k1: f64, k2: f64, reference: State, mag_reference: Vec3) -> Self {
        ObserverConfig {
            k1,
            k2,
            reference,
            accel_reference: Vec3::z(),
            mag_reference,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k1 > 0.0 && self.k1.is_finite()) || !(self.k2 > 0.0 && self.k2.is_finite()) {
            return Err(Error::Config(format!(
                "gains must be positive, got k1={} k2={}",
                self.k1, self.k2
            )));
        }
        for (name, v) in [("accel", self.accel_reference), ("mag", self.mag_reference)] {
            if (v.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::Config(format!("{name} reference direction must be unit length")));
            }
        }
        if self.accel_reference.cross(&self.mag_reference).norm() < 1e-6 {
            return Err(Error::Config(
                "reference directions must be linearly independent".into(),
            ));
        }
        Ok(())
    }

    /// `M = m̊m̊ᵀ + åå ᵀ`.
    pub fn direction_matrix(&self) -> Mat3 {
        self.mag_reference * self.mag_reference.transpose() + self.accel_reference * self.accel_reference.transpose()
    }
}

/// Correction terms fed to the observer kinematics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Innovation {
    pub alpha: Vec3,
    pub pi_hat: Vec3,
    pub delta_theta: Vec3,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Diagnostics {
    pub lyapunov: f64,
    pub att_err_rad: f64,
    pub omega_err: f64,
    pub innovation_norm: f64,
}

/// `m × m̂ + a × â` for body-frame measured `(a, m)` and predicted `(â, m̂)`.
pub fn direction_error(accel: &Vec3, mag: &Vec3, accel_hat: &Vec3, mag_hat: &Vec3) -> Vec3 {
    mag.cross(mag_hat) + accel.cross(accel_hat)
}

pub fn innovation(y: &OutputPair, obs: &ObserverState, cfg: &ObserverConfig) -> Innovation {
    let to_body = (cfg.reference.attitude * obs.rotation).transpose();
    let accel_hat = to_body * cfg.accel_reference;
    let mag_hat = to_body * cfg.mag_reference;
    let alpha = direction_error(&y.accel_dir, &y.mag_dir, &accel_hat, &mag_hat);
    Innovation {
        alpha,
        pi_hat: alpha * cfg.k1,
        delta_theta: alpha * cfg.k2,
    }
}

/// One discrete observer step.
///
/// The rotation advances as `Q̂⁺ = exp((Ω₀ + q̂ + Q̂π̂) dt) Q̂`; the translation is
/// updated so that the estimate follows `R̂⁺ = R̂ exp((Ω̂ + π̂) dt)`, `Ω̂⁺ = Ω̂ + θ̂ dt`,
/// the same recursion as the ground truth.
pub fn observer_step(
    obs: &ObserverState,
    y: &OutputPair,
    theta_meas: &Vec3,
    cfg: &ObserverConfig,
    dt: f64,
) -> Result<ObserverState> {
    let inn = innovation(y, obs, cfg);
    let input = InputVelocity::new(inn.pi_hat, theta_meas + inn.delta_theta);
    integrate_sym_projected(obs, &input, &cfg.reference, dt)
}

/// Prediction without correction, for samples where the direction outputs are unusable.
pub fn observer_predict(
    obs: &ObserverState,
    theta_meas: &Vec3,
    cfg: &ObserverConfig,
    dt: f64,
) -> Result<ObserverState> {
    integrate_sym_projected(obs, &InputVelocity::natural(*theta_meas), &cfg.reference, dt)
}

pub fn estimate(obs: &ObserverState, cfg: &ObserverConfig) -> State {
    phi(obs, &cfg.reference)
}

/// Lyapunov value and error metrics against the true state, using noise-free directions.
pub fn lyapunov(x_true: &State, obs: &ObserverState, cfg: &ObserverConfig) -> Diagnostics {
    let est = estimate(obs, cfg);
    let rt = x_true.attitude.transpose();
    let rt_hat = est.attitude.transpose();
    let a = rt * cfg.accel_reference;
    let m = rt * cfg.mag_reference;
    let a_hat = rt_hat * cfg.accel_reference;
    let m_hat = rt_hat * cfg.mag_reference;
    let omega_tilde = x_true.omega - est.omega;
    let lyapunov = (1.0 - a_hat.dot(&a)) + (1.0 - m_hat.dot(&m)) + omega_tilde.norm_squared() / (2.0 * cfg.k2);
    let tilde = est.attitude * x_true.attitude.transpose();
    Diagnostics {
        lyapunov: lyapunov.max(0.0),
        att_err_rad: tilde.angle(),
        omega_err: omega_tilde.norm(),
        innovation_norm: direction_error(&a, &m, &a_hat, &m_hat).norm(),
    }
}

/// `‖R̃ᵀM − MR̃‖_F` with `R̃ = R̂Rᵀ`. Vanishes at every equilibrium of the error dynamics.
pub fn tilde_r_commutation_residual(x_true: &State, obs: &ObserverState, cfg: &ObserverConfig) -> f64 {
    let tilde = *(estimate(obs, cfg).attitude * x_true.attitude.transpose()).matrix();
    let m = cfg.direction_matrix();
    (tilde.transpose() * m - m * tilde).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{random_rotation, random_vec3, so3_exp, Rotation};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(13)
    }

    fn pair(accel_dir: Vec3, mag_dir: Vec3) -> OutputPair {
        OutputPair { accel_dir, mag_dir }
    }

    fn config(rng: &mut ChaCha8Rng) -> ObserverConfig {
        ObserverConfig::new(
            3.0,
            1.0,
            State::new(random_rotation(rng), random_vec3(rng)),
            Vec3::new(1.0, 0.0, 1.0).normalize(),
        )
    }

    /// Observer state whose estimate has attitude `tilde · R` and velocity `omega_hat`.
    fn obs_for(cfg: &ObserverConfig, truth: &State, tilde: Rotation, omega_hat: Vec3) -> ObserverState {
        let est = State::new(tilde * truth.attitude, omega_hat);
        crate::geometry::transitive_element(&cfg.reference, &est)
    }

    #[test]
    fn config_validation() {
        let mut rng = rng();
        let cfg = config(&mut rng);
        assert!(cfg.validate().is_ok());
        assert!(ObserverConfig { k1: 0.0, ..cfg }.validate().is_err());
        assert!(ObserverConfig { k2: -1.0, ..cfg }.validate().is_err());
        assert!(ObserverConfig {
            mag_reference: Vec3::z(),
            ..cfg
        }
        .validate()
        .is_err());
        assert!(ObserverConfig {
            mag_reference: Vec3::new(2.0, 0.0, 0.0),
            ..cfg
        }
        .validate()
        .is_err());
    }

    #[test]
    fn perfect_estimate_gives_zero_innovation_and_lyapunov() {
        let mut rng = rng();
        let cfg = config(&mut rng);
        let truth = State::new(random_rotation(&mut rng), random_vec3(&mut rng));
        let obs = obs_for(&cfg, &truth, Rotation::identity(), truth.omega);
        let a = truth.attitude.transpose() * cfg.accel_reference;
        let m = truth.attitude.transpose() * cfg.mag_reference;
        let inn = innovation(&pair(a, m), &obs, &cfg);
        assert!(inn.pi_hat.norm() < 1e-14 && inn.delta_theta.norm() < 1e-14);
        let d = lyapunov(&truth, &obs, &cfg);
        assert!(d.lyapunov < 1e-14);
        assert!(d.att_err_rad < 1e-7);
        assert!(d.omega_err < 1e-14);
        assert!(tilde_r_commutation_residual(&truth, &obs, &cfg) < 1e-14);
    }

    #[test]
    fn rotation_about_mag_reference_only_excites_accel_term() {
        let mut rng = rng();
        let mut cfg = config(&mut rng);
        cfg.mag_reference = Vec3::x();
        let truth = State::new(random_rotation(&mut rng), Vec3::zeros());
        let a = truth.attitude.transpose() * cfg.accel_reference;
        let m = truth.attitude.transpose() * cfg.mag_reference;
        for (angle, expected) in [(FRAC_PI_2, 1.0), (PI, 0.0)] {
            let obs = obs_for(&cfg, &truth, so3_exp(&(cfg.mag_reference * angle)), Vec3::zeros());
            let est = estimate(&obs, &cfg);
            let m_hat = est.attitude.transpose() * cfg.mag_reference;
            let a_hat = est.attitude.transpose() * cfg.accel_reference;
            assert!(m.cross(&m_hat).norm() < 1e-12);
            assert!((a.cross(&a_hat).norm() - expected).abs() < 1e-12);
            let inn = innovation(&pair(a, m), &obs, &cfg);
            assert!((inn.alpha - a.cross(&a_hat)).norm() < 1e-12);
        }
    }

    #[test]
    fn gains_scale_innovation() {
        let mut rng = rng();
        let cfg = config(&mut rng);
        let obs = SymElement::new(random_rotation(&mut rng), random_vec3(&mut rng));
        let a = random_vec3(&mut rng).normalize();
        let m = random_vec3(&mut rng).normalize();
        let inn = innovation(&pair(a, m), &obs, &cfg);
        assert!((inn.pi_hat - inn.delta_theta * 3.0).norm() < 1e-14);
        assert!(inn.alpha.norm() > 0.0);
    }

    #[test]
    fn lyapunov_maximum_for_half_turn() {
        let mut rng = rng();
        let cfg = config(&mut rng);
        let truth = State::new(random_rotation(&mut rng), random_vec3(&mut rng));
        let axis = cfg.accel_reference.cross(&cfg.mag_reference).normalize();
        let obs = obs_for(&cfg, &truth, so3_exp(&(axis * PI)), truth.omega);
        let d = lyapunov(&truth, &obs, &cfg);
        assert!((d.lyapunov - 4.0).abs() < 1e-12);
        assert!((d.att_err_rad - PI).abs() < 1e-7);
        assert!(d.innovation_norm < 1e-12);
    }

    #[test]
    fn commutation_residual_cases() {
        let mut rng = rng();
        let cfg = config(&mut rng);
        let truth = State::new(random_rotation(&mut rng), Vec3::zeros());
        // half turns about eigenvectors of M commute with M
        let m = cfg.direction_matrix();
        let eig = m.symmetric_eigen();
        for k in 0..3 {
            let axis: Vec3 = eig.eigenvectors.column(k).into();
            let obs = obs_for(&cfg, &truth, so3_exp(&(axis * PI)), Vec3::zeros());
            assert!(tilde_r_commutation_residual(&truth, &obs, &cfg) < 1e-12);
            let obs = obs_for(&cfg, &truth, so3_exp(&(axis * 0.4)), Vec3::zeros());
            // a partial turn about an eigenvector with distinct remaining eigenvalues does not commute
            let others: Vec<f64> = (0..3).filter(|&j| j != k).map(|j| eig.eigenvalues[j]).collect();
            let direct = {
                let t = *so3_exp(&(axis * 0.4)).matrix();
                (t.transpose() * m - m * t).norm()
            };
            assert!((tilde_r_commutation_residual(&truth, &obs, &cfg) - direct).abs() < 1e-12);
            assert_eq!(direct > 1e-6, (others[0] - others[1]).abs() > 1e-6);
        }
        let obs = obs_for(&cfg, &truth, random_rotation(&mut rng), Vec3::zeros());
        assert!(tilde_r_commutation_residual(&truth, &obs, &cfg) > 1e-3);
    }

    #[test]
    fn step_fixed_point_and_errors() {
        let mut rng = rng();
        let mut cfg = config(&mut rng);
        cfg.reference.omega = Vec3::zeros();
        let truth = State::new(random_rotation(&mut rng), Vec3::zeros());
        let obs = obs_for(&cfg, &truth, Rotation::identity(), Vec3::zeros());
        let obs = SymElement::new(obs.rotation, Vec3::zeros());
        let est = estimate(&obs, &cfg);
        let a = est.attitude.transpose() * cfg.accel_reference;
        let m = est.attitude.transpose() * cfg.mag_reference;
        let next = observer_step(&obs, &pair(a, m), &Vec3::zeros(), &cfg, 1e-3).unwrap();
        assert!((next.rotation.matrix() - obs.rotation.matrix()).norm() < 1e-15);
        assert!(next.translation.norm() < 1e-15);
        assert!(observer_step(&obs, &pair(a, m), &Vec3::zeros(), &cfg, 0.0).is_err());
        assert!(observer_predict(&obs, &Vec3::zeros(), &cfg, -1.0).is_err());
    }

    #[test]
    fn zero_innovation_step_is_prediction() {
        let mut rng = rng();
        let cfg = config(&mut rng);
        let obs = SymElement::new(random_rotation(&mut rng), random_vec3(&mut rng));
        let est = estimate(&obs, &cfg);
        let a = est.attitude.transpose() * cfg.accel_reference;
        let m = est.attitude.transpose() * cfg.mag_reference;
        let theta = random_vec3(&mut rng);
        let stepped = observer_step(&obs, &pair(a, m), &theta, &cfg, 1e-3).unwrap();
        let predicted = observer_predict(&obs, &theta, &cfg, 1e-3).unwrap();
        assert!((stepped.rotation.matrix() - predicted.rotation.matrix()).norm() < 1e-12);
        assert!((stepped.translation - predicted.translation).norm() < 1e-12);
    }

    #[test]
    fn projected_estimate_follows_second_order_kinematics() {
        let mut rng = rng();
        for _ in 0..50 {
            let cfg = config(&mut rng);
            let obs = SymElement::new(random_rotation(&mut rng), random_vec3(&mut rng));
            let a = random_vec3(&mut rng).normalize();
            let m = random_vec3(&mut rng).normalize();
            let theta = random_vec3(&mut rng);
            let inn = innovation(&pair(a, m), &obs, &cfg);
            let dt = 1e-6;
            let before = estimate(&obs, &cfg);
            let after = estimate(&observer_step(&obs, &pair(a, m), &theta, &cfg, dt).unwrap(), &cfg);
            let d_att = (after.attitude.matrix() - before.attitude.matrix()) / dt;
            let expected = before.attitude.matrix() * crate::geometry::skew(&(before.omega + inn.pi_hat)).matrix();
            let scale = 1.0 + (before.omega + inn.pi_hat).norm_squared();
            assert!((d_att - expected).norm() < 1e-5 * scale);
            let theta_hat = theta + inn.delta_theta;
            assert!(((after.omega - before.omega) / dt - theta_hat).norm() < 1e-6 * (1.0 + theta_hat.norm()));
        }
    }

    #[test]
    fn estimate_matches_phi() {
        let mut rng = rng();
        let cfg = config(&mut rng);
        assert_eq!(estimate(&SymElement::identity(), &cfg), cfg.reference);
        let v = random_vec3(&mut rng);
        let est = estimate(&SymElement::new(Rotation::identity(), v), &cfg);
        assert_eq!(est.attitude, cfg.reference.attitude);
        assert_eq!(est.omega, cfg.reference.omega + v);
        let obs = SymElement::new(random_rotation(&mut rng), random_vec3(&mut rng));
        assert_eq!(estimate(&obs, &cfg), phi(&obs, &cfg.reference));
    }
}
