use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Rotation, SymElement, Vec3};
use crate::kinematics::State;
use crate::sensors::{RigConfig, STANDARD_GRAVITY};

/// Body angular velocity profile driving the ground truth.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrajectorySpec {
    /// `Ω(t) = (sin 0.1t, cos 0.1t, 1)`.
    PaperDefault,
    ConstantRate([f64; 3]),
    /// CSV with header `t,wx,wy,wz`, linearly interpolated and held past the ends.
    CustomTable(PathBuf),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceMode {
    Random,
    /// Row-major attitude and angular velocity.
    Explicit {
        attitude: [f64; 9],
        omega: [f64; 3],
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitMode {
    Random,
    Explicit {
        rotation: [f64; 9],
        translation: [f64; 3],
    },
    /// The group element that projects exactly onto the initial true state.
    TrueLift,
}

/// Simulation parameters. Every field has a default; a TOML file only needs the
/// keys it changes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub dt: f64,
    pub duration: f64,
    pub seed: u64,
    pub k1: f64,
    pub k2: f64,
    /// Accelerometer lever arm in metres.
    pub l: f64,
    pub accel_noise_std: f64,
    pub mag_noise_std: f64,
    pub noise_on: bool,
    pub trajectory: TrajectorySpec,
    pub reference_mode: ReferenceMode,
    pub init_mode: InitMode,
    pub out_dir: PathBuf,
    pub gravity: f64,
    /// Inertial magnetic direction; normalized on use.
    pub mag_reference: [f64; 3],
    /// Row-major initial true attitude.
    pub initial_attitude: [f64; 9],
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            dt: 1e-3,
            duration: 60.0,
            seed: 0,
            k1: 3.0,
            k2: 1.0,
            l: 1.0,
            accel_noise_std: 0.3,
            mag_noise_std: 0.3,
            noise_on: true,
            trajectory: TrajectorySpec::PaperDefault,
            reference_mode: ReferenceMode::Random,
            init_mode: InitMode::Random,
            out_dir: PathBuf::from("out"),
            gravity: STANDARD_GRAVITY,
            mag_reference: [1.0, 0.0, 1.0],
            initial_attitude: [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
        }
    }
}

impl SimConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: SimConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })?;
        // relative table paths are resolved against the config file
        if let TrajectorySpec::CustomTable(table) = &cfg.trajectory {
            if table.is_relative() {
                if let Some(dir) = path.parent() {
                    cfg.trajectory = TrajectorySpec::CustomTable(dir.join(table));
                }
            }
        }
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.duration >= self.dt && self.duration.is_finite()) {
            return Err(Error::Config(format!(
                "duration must be at least dt, got {}",
                self.duration
            )));
        }
        if !(self.k1 > 0.0) || !(self.k2 > 0.0) {
            return Err(Error::Config(format!(
                "gains must be positive, got k1={} k2={}",
                self.k1, self.k2
            )));
        }
        if !(self.gravity > 0.0) {
            return Err(Error::Config("gravity must be positive".into()));
        }
        if Vec3::from(self.mag_reference).norm() == 0.0 {
            return Err(Error::Config("mag_reference must be non-zero".into()));
        }
        self.rig().validate()?;
        self.initial_state()?;
        Ok(())
    }

    /// Number of integration steps covering `duration`.
    pub fn steps(&self) -> usize {
        (self.duration / self.dt).round().max(1.0) as usize
    }

    pub fn rig(&self) -> RigConfig {
        let (accel_noise_std, mag_noise_std) = if self.noise_on {
            (self.accel_noise_std, self.mag_noise_std)
        } else {
            (0.0, 0.0)
        };
        RigConfig {
            lever_arm: self.l,
            gravity: self.gravity,
            mag_reference: Vec3::from(self.mag_reference).normalize(),
            accel_noise_std,
            mag_noise_std,
        }
    }

    pub(crate) fn initial_state(&self) -> Result<Rotation> {
        Rotation::from_row_slice(&self.initial_attitude)
    }
}

pub(crate) fn explicit_reference(attitude: &[f64; 9], omega: &[f64; 3]) -> Result<State> {
    Ok(State::new(Rotation::from_row_slice(attitude)?, Vec3::from(*omega)))
}

pub(crate) fn explicit_init(rotation: &[f64; 9], translation: &[f64; 3]) -> Result<SymElement> {
    Ok(SymElement::new(
        Rotation::from_row_slice(rotation)?,
        Vec3::from(*translation),
    ))
}
