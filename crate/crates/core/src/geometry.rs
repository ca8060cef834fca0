//! Rotation-group primitives and the symmetry group `SO(3) ⋉ R³`.
//!
//! Rotations are stored directly as 3×3 matrices. The symmetry group element
//! [`SymElement`] is a pair `(Q, q)` with product `(A, a)·(B, b) = (AB, a + Ab)`;
//! it acts on attitude/velocity states, inputs and direction outputs through the
//! right actions [`phi`], [`psi`] and [`rho`].
//!
//! Group operations never re-orthonormalize their results. Projection back onto
//! SO(3) only happens at construction boundaries ([`Rotation::project`]).

use std::fmt;
use std::ops::Mul;

use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::kinematics::{InputVelocity, State};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Orthonormality tolerance (Frobenius norm of `RᵀR − I`) and determinant tolerance.
pub const ROTATION_TOL: f64 = 1e-9;

/// Tolerance on the symmetric part of a matrix passed to [`vee`].
pub const SKEW_TOL: f64 = 1e-9;

const EXP_SMALL_ANGLE: f64 = 1e-8;

/// A 3×3 rotation matrix.
#[derive(Clone, Copy, PartialEq)]
pub struct Rotation(Mat3);

impl Rotation {
    pub fn identity() -> Self {
        Rotation(Mat3::identity())
    }

    /// Accepts `m` only if it is orthonormal with unit determinant within [`ROTATION_TOL`].
    pub fn from_matrix(m: Mat3) -> Result<Self> {
        let ortho_err = (m.transpose() * m - Mat3::identity()).norm();
        let det = m.determinant();
        if !ortho_err.is_finite() || ortho_err > ROTATION_TOL || (det - 1.0).abs() > ROTATION_TOL {
            return Err(Error::NotARotation { ortho_err, det });
        }
        Ok(Rotation(m))
    }

    /// Wraps `m` without checking. Callers must guarantee it is a rotation.
    pub fn from_matrix_unchecked(m: Mat3) -> Self {
        Rotation(m)
    }

    /// Closest rotation to `m` in Frobenius norm (polar decomposition via SVD).
    pub fn project(m: Mat3) -> Result<Self> {
        let svd = m.svd(true, true);
        let (u, v_t) = match (svd.u, svd.v_t) {
            (Some(u), Some(v_t)) => (u, v_t),
            _ => {
                return Err(Error::NotARotation {
                    ortho_err: f64::NAN,
                    det: m.determinant(),
                })
            }
        };
        let mut fix = Mat3::identity();
        if (u * v_t).determinant() < 0.0 {
            fix[(2, 2)] = -1.0;
        }
        Rotation::from_matrix(u * fix * v_t)
    }

    /// Builds a rotation from nine row-major entries, projecting onto SO(3).
    pub fn from_row_slice(rows: &[f64]) -> Result<Self> {
        if rows.len() != 9 {
            return Err(Error::Config(format!("rotation needs 9 entries, got {}", rows.len())));
        }
        Rotation::project(Mat3::from_row_slice(rows))
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn transpose(&self) -> Rotation {
        Rotation(self.0.transpose())
    }

    pub fn orthonormality_error(&self) -> f64 {
        (self.0.transpose() * self.0 - Mat3::identity()).norm()
    }

    pub fn determinant(&self) -> f64 {
        self.0.determinant()
    }

    /// Rotation angle in `[0, π]`.
    pub fn angle(&self) -> f64 {
        let m = &self.0;
        let s = Vec3::new(m[(2, 1)] - m[(1, 2)], m[(0, 2)] - m[(2, 0)], m[(1, 0)] - m[(0, 1)]).norm() * 0.5;
        let c = (m.trace() - 1.0) * 0.5;
        s.atan2(c)
    }
}

impl fmt::Debug for Rotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rotation{:?}", self.0.as_slice())
    }
}

impl Mul for Rotation {
    type Output = Rotation;
    fn mul(self, rhs: Rotation) -> Rotation {
        Rotation(self.0 * rhs.0)
    }
}

impl Mul<Vec3> for Rotation {
    type Output = Vec3;
    fn mul(self, rhs: Vec3) -> Vec3 {
        self.0 * rhs
    }
}

impl Mul<Vec3> for &Rotation {
    type Output = Vec3;
    fn mul(self, rhs: Vec3) -> Vec3 {
        self.0 * rhs
    }
}

/// A skew-symmetric 3×3 matrix. Only constructible through [`skew`], so `S + Sᵀ = 0` exactly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SkewMat(Mat3);

impl SkewMat {
    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn vee(&self) -> Vec3 {
        Vec3::new(self.0[(2, 1)], self.0[(0, 2)], self.0[(1, 0)])
    }
}

/// `skew(v)·w = v × w`.
pub fn skew(v: &Vec3) -> SkewMat {
    SkewMat(Mat3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0))
}

/// Inverse of [`skew`] on a general matrix. Fails if the symmetric part exceeds [`SKEW_TOL`].
pub fn vee(m: &Mat3) -> Result<Vec3> {
    let sym = ((m + m.transpose()) * 0.5).norm();
    if !(sym <= SKEW_TOL) {
        return Err(Error::NotSkewSymmetric(sym));
    }
    Ok(Vec3::new(
        0.5 * (m[(2, 1)] - m[(1, 2)]),
        0.5 * (m[(0, 2)] - m[(2, 0)]),
        0.5 * (m[(1, 0)] - m[(0, 1)]),
    ))
}

/// Matrix exponential of `skew(w)` (Rodrigues).
pub fn so3_exp(w: &Vec3) -> Rotation {
    let angle = w.norm();
    let k = *skew(w).matrix();
    let k2 = k * k;
    if angle < EXP_SMALL_ANGLE {
        return Rotation(Mat3::identity() + k + k2 * 0.5);
    }
    let a = angle.sin() / angle;
    let b = (1.0 - angle.cos()) / (angle * angle);
    Rotation(Mat3::identity() + k * a + k2 * b)
}

/// Element `(Q, q)` of the symmetry group `SO(3) ⋉ R³`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymElement {
    pub rotation: Rotation,
    pub translation: Vec3,
}

impl SymElement {
    pub fn new(rotation: Rotation, translation: Vec3) -> Self {
        SymElement { rotation, translation }
    }

    pub fn identity() -> Self {
        SymElement::new(Rotation::identity(), Vec3::zeros())
    }

    pub fn compose(&self, rhs: &SymElement) -> SymElement {
        sym_compose(self, rhs)
    }

    pub fn inverse(&self) -> SymElement {
        sym_inverse(self)
    }
}

impl Mul for SymElement {
    type Output = SymElement;
    fn mul(self, rhs: SymElement) -> SymElement {
        sym_compose(&self, &rhs)
    }
}

/// `(A, a)·(B, b) = (AB, a + A b)`.
pub fn sym_compose(lhs: &SymElement, rhs: &SymElement) -> SymElement {
    SymElement {
        rotation: lhs.rotation * rhs.rotation,
        translation: lhs.translation + lhs.rotation * rhs.translation,
    }
}

/// `(A, a)⁻¹ = (Aᵀ, −Aᵀa)`.
pub fn sym_inverse(x: &SymElement) -> SymElement {
    let rt = x.rotation.transpose();
    SymElement {
        rotation: rt,
        translation: -(rt * x.translation),
    }
}

/// State action: `φ((Q, q), (R, Ω)) = (RQ, Qᵀ(Ω + q))`.
pub fn phi(x: &SymElement, state: &State) -> State {
    State {
        attitude: state.attitude * x.rotation,
        omega: x.rotation.transpose() * (state.omega + x.translation),
    }
}

/// Input action: `ψ((Q, q), (π, θ)) = (Qᵀ(π − q), Qᵀθ)`.
pub fn psi(x: &SymElement, v: &InputVelocity) -> InputVelocity {
    let qt = x.rotation.transpose();
    InputVelocity {
        pi: qt * (v.pi - x.translation),
        theta: qt * v.theta,
    }
}

/// Output action on a direction measurement: `ρ((Q, q), y) = Qᵀy`.
pub fn rho(x: &SymElement, y: &Vec3) -> Vec3 {
    x.rotation.transpose() * *y
}

/// The group element that maps `from` onto `to` under [`phi`].
pub fn transitive_element(from: &State, to: &State) -> SymElement {
    let q = from.attitude.transpose() * to.attitude;
    SymElement {
        rotation: q,
        translation: q * to.omega - from.omega,
    }
}

/// Haar-uniform rotation: QR of a Gaussian matrix with the sign of `R`'s diagonal
/// folded into `Q`, then one column flipped if the determinant is negative.
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> Rotation {
    loop {
        let g = Mat3::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
        let qr = g.qr();
        let r = qr.r();
        let mut q = qr.q();
        if r.diagonal().iter().any(|d| d.abs() < 1e-12) {
            continue;
        }
        for j in 0..3 {
            if r[(j, j)] < 0.0 {
                q.column_mut(j).neg_mut();
            }
        }
        if q.determinant() < 0.0 {
            q.column_mut(0).neg_mut();
        }
        return Rotation(q);
    }
}

/// Vector with independent standard normal components.
pub fn random_vec3<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    Vec3::from_fn(|_, _| rng.sample(StandardNormal))
}
