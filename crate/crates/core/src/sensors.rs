//! Virtual sensor rig: four body-fixed accelerometers at `0, l·e₁, l·e₂, l·e₃` and a
//! magnetometer, plus closed-form recovery of angular acceleration from the
//! accelerometer differences.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::kinematics::State;

pub type NoiseRng = ChaCha8Rng;

pub const STANDARD_GRAVITY: f64 = 9.81;

/// Below this norm accelerometer 0 carries no usable gravity direction.
pub const DROPOUT_NORM: f64 = 1e-6;

pub const MEASUREMENT_LOG_HEADER: &str = "t,a0x,a0y,a0z,a1x,a1y,a1z,a2x,a2y,a2z,a3x,a3y,a3z,mx,my,mz";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RigConfig {
    pub lever_arm: f64,
    pub gravity: f64,
    /// Magnetic field direction in the inertial frame.
    pub mag_reference: Vec3,
    pub accel_noise_std: f64,
    pub mag_noise_std: f64,
}

impl Default for RigConfig {
    fn default() -> Self {
        RigConfig {
            lever_arm: 1.0,
            gravity: STANDARD_GRAVITY,
            mag_reference: Vec3::new(1.0, 0.0, 1.0).normalize(),
            accel_noise_std: 0.0,
            mag_noise_std: 0.0,
        }
    }
}

impl RigConfig {
    /// Accelerometer positions in the body frame.
    pub fn offsets(&self) -> [Vec3; 4] {
        let l = self.lever_arm;
        [
            Vec3::zeros(),
            Vec3::new(l, 0.0, 0.0),
            Vec3::new(0.0, l, 0.0),
            Vec3::new(0.0, 0.0, l),
        ]
    }

    /// Volume of the tetrahedron spanned by the accelerometers.
    pub fn tetrahedron_volume(&self) -> f64 {
        let r = self.offsets();
        ((r[1] - r[0]).cross(&(r[2] - r[0])).dot(&(r[3] - r[0]))).abs() / 6.0
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lever_arm > 0.0) {
            return Err(Error::NonPositiveLeverArm(self.lever_arm));
        }
        if !(self.tetrahedron_volume() > 0.0) {
            return Err(Error::Config("accelerometers are coplanar".into()));
        }
        if ((self.mag_reference.norm() - 1.0).abs() > 1e-12) || !self.mag_reference.iter().all(|c| c.is_finite()) {
            return Err(Error::Config("magnetic reference direction must be unit length".into()));
        }
        let angle = self
            .mag_reference
            .cross(&Vec3::z())
            .norm()
            .atan2(self.mag_reference.z.abs());
        if angle <= 1f64.to_radians() {
            return Err(Error::Config(
                "magnetic reference direction is parallel to gravity".into(),
            ));
        }
        if !(self.accel_noise_std >= 0.0) || !(self.mag_noise_std >= 0.0) {
            return Err(Error::Config("noise standard deviations must be non-negative".into()));
        }
        Ok(())
    }
}

/// One synchronous sample of the rig.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementFrame {
    pub t: f64,
    pub accel: [Vec3; 4],
    /// Unit magnetic field direction in the body frame.
    pub mag: Vec3,
}

/// Unit gravity and magnetic directions in the body frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OutputPair {
    pub accel_dir: Vec3,
    pub mag_dir: Vec3,
}

/// Independent, seedable noise streams, one per sensor channel.
#[derive(Clone, Debug)]
pub struct NoiseStreams {
    accel: [NoiseRng; 4],
    mag: NoiseRng,
}

impl NoiseStreams {
    /// Streams 1..=4 are the accelerometers, 5 the magnetometer.
    pub fn new(seed: u64) -> Self {
        let stream = |id: u64| {
            let mut rng = NoiseRng::seed_from_u64(seed);
            rng.set_stream(id);
            rng
        };
        NoiseStreams {
            accel: [stream(1), stream(2), stream(3), stream(4)],
            mag: stream(5),
        }
    }
}

fn gaussian3(rng: &mut NoiseRng, std: f64) -> Vec3 {
    Vec3::from_fn(|_, _| std * rng.sample::<f64, _>(StandardNormal))
}

/// Reading of accelerometer `index` for a body that is not translating.
pub fn simulate_accelerometer(
    x: &State,
    theta: &Vec3,
    rig: &RigConfig,
    index: usize,
    noise: Option<&mut NoiseRng>,
) -> Result<Vec3> {
    simulate_accelerometer_accelerating(x, theta, &Vec3::zeros(), rig, index, noise)
}

/// `aᵢ = a₀ + θ × rᵢ + Ω × (Ω × rᵢ) + εᵢ` with `a₀ = g Rᵀe₃ + linear_accel`
/// (`linear_accel` in the body frame).
pub fn simulate_accelerometer_accelerating(
    x: &State,
    theta: &Vec3,
    linear_accel: &Vec3,
    rig: &RigConfig,
    index: usize,
    noise: Option<&mut NoiseRng>,
) -> Result<Vec3> {
    let r = *rig.offsets().get(index).ok_or(Error::SensorIndex(index))?;
    let common = x.attitude.transpose() * Vec3::z() * rig.gravity + linear_accel;
    let omega = x.omega;
    let mut a = common + theta.cross(&r) + omega.cross(&omega.cross(&r));
    if let Some(rng) = noise {
        if rig.accel_noise_std > 0.0 {
            a += gaussian3(rng, rig.accel_noise_std);
        }
    }
    Ok(a)
}

/// Angular acceleration from the accelerometer differences. Centripetal terms and the
/// common acceleration cancel exactly.
pub fn extract_theta(frame: &MeasurementFrame, lever_arm: f64) -> Result<Vec3> {
    if !(lever_arm > 0.0) {
        return Err(Error::NonPositiveLeverArm(lever_arm));
    }
    let [a0, a1, a2, a3] = frame.accel;
    let d1 = a1 - a0;
    let d2 = a2 - a0;
    let d3 = a3 - a0;
    Ok(Vec3::new(d2.z - d3.y, d3.x - d1.z, d1.y - d2.x) / (2.0 * lever_arm))
}

pub fn simulate_frame(
    x: &State,
    theta: &Vec3,
    rig: &RigConfig,
    t: f64,
    noise: Option<&mut NoiseStreams>,
) -> MeasurementFrame {
    simulate_frame_accelerating(x, theta, &Vec3::zeros(), rig, t, noise)
}

pub fn simulate_frame_accelerating(
    x: &State,
    theta: &Vec3,
    linear_accel: &Vec3,
    rig: &RigConfig,
    t: f64,
    mut noise: Option<&mut NoiseStreams>,
) -> MeasurementFrame {
    let mut accel = [Vec3::zeros(); 4];
    for (i, a) in accel.iter_mut().enumerate() {
        let rng = noise.as_deref_mut().map(|n| &mut n.accel[i]);
        *a = simulate_accelerometer_accelerating(x, theta, linear_accel, rig, i, rng).expect("index < 4");
    }
    let mut mag = x.attitude.transpose() * rig.mag_reference;
    if let Some(n) = noise {
        if rig.mag_noise_std > 0.0 {
            mag += gaussian3(&mut n.mag, rig.mag_noise_std);
        }
    }
    MeasurementFrame {
        t,
        accel,
        mag: mag.normalize(),
    }
}

pub fn output_pair(frame: &MeasurementFrame) -> Result<OutputPair> {
    let a0 = frame.accel[0];
    let n = a0.norm();
    if !(n > DROPOUT_NORM) {
        return Err(Error::MeasurementDropout(n));
    }
    Ok(OutputPair {
        accel_dir: a0 / n,
        mag_dir: frame.mag,
    })
}

pub fn write_measurement_log(path: &Path, frames: &[MeasurementFrame]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut write = || -> std::io::Result<()> {
        writeln!(w, "{MEASUREMENT_LOG_HEADER}")?;
        for f in frames {
            write!(w, "{}", f.t)?;
            for a in &f.accel {
                write!(w, ",{},{},{}", a.x, a.y, a.z)?;
            }
            writeln!(w, ",{},{},{}", f.mag.x, f.mag.y, f.mag.z)?;
        }
        w.flush()
    };
    write().map_err(|e| Error::io(path, e))
}

pub fn read_measurement_log(path: &Path) -> Result<Vec<MeasurementFrame>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let csv_err = |line: usize, msg: String| Error::Csv {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut frames = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if n == 0 {
            if line.trim() != MEASUREMENT_LOG_HEADER {
                return Err(csv_err(1, format!("expected header `{MEASUREMENT_LOG_HEADER}`")));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let values = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| csv_err(n + 1, e.to_string()))?;
        if values.len() != 16 {
            return Err(csv_err(n + 1, format!("expected 16 columns, got {}", values.len())));
        }
        let v = |i: usize| Vec3::new(values[i], values[i + 1], values[i + 2]);
        frames.push(MeasurementFrame {
            t: values[0],
            accel: [v(1), v(4), v(7), v(10)],
            mag: v(13),
        });
    }
    if frames.is_empty() {
        return Err(csv_err(1, "log contains no samples".into()));
    }
    Ok(frames)
}
