//! C ABI for the `gyrofree` observer and simulation harness.
//!
//! Every entry point returns a [`GyrofreeStatus`]. On failure a human-readable
//! message is kept per thread and can be fetched with
//! [`gyrofree_last_error_message`]. Objects are opaque handles created by a
//! `*_new` function and released by the matching `*_free`.
//!
//! Arrays are passed as plain `double` pointers. Matrices are 9 entries in
//! row-major order, vectors 3 entries, and an accelerometer frame 12 entries
//! (accelerometers 0 to 3, each x, y, z).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use gyrofree::geometry::{Mat3, Rotation, Vec3};
use gyrofree::observer::{estimate, observer_predict, observer_step};
use gyrofree::sensors::{extract_theta, output_pair, write_measurement_log, MeasurementFrame};
use gyrofree::sim::{self, SimConfig, SimRun, TraceRecord};
use gyrofree::{Error, ObserverConfig, ObserverState, State, SymElement};

/// Result code of every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GyrofreeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotARotation = 3,
    /// The step ran as a pure prediction because accelerometer 0 read zero.
    MeasurementDropout = 4,
    Io = 5,
    Config = 6,
    /// No run has been performed on the simulation handle yet.
    NotRun = 7,
    Panic = 8,
}

/// Observer gains, lever arm and the fixed reference state.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct GyrofreeObserverParams {
    pub k1: f64,
    pub k2: f64,
    pub lever_arm: f64,
    /// Row-major; must be within 1e-6 of a rotation.
    pub reference_attitude: [f64; 9],
    pub reference_omega: [f64; 3],
    /// Inertial magnetic direction; normalized on use.
    pub mag_reference: [f64; 3],
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GyrofreeTraceRecord {
    pub t: f64,
    pub att_err_rad: f64,
    pub omega_err: f64,
    pub lyapunov: f64,
    pub innovation_norm: f64,
    pub commutation_residual: f64,
}

impl From<&TraceRecord> for GyrofreeTraceRecord {
    fn from(r: &TraceRecord) -> Self {
        GyrofreeTraceRecord {
            t: r.t,
            att_err_rad: r.att_err_rad,
            omega_err: r.omega_err,
            lyapunov: r.lyapunov,
            innovation_norm: r.innovation_norm,
            commutation_residual: r.commutation_residual,
        }
    }
}

/// Opaque observer handle.
pub struct GyrofreeObserver {
    config: ObserverConfig,
    lever_arm: f64,
    state: ObserverState,
}

/// Opaque simulation handle: a configuration plus the most recent run.
pub struct GyrofreeSimulation {
    config: SimConfig,
    run: Option<SimRun>,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

struct Failure(GyrofreeStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::NotARotation { .. } => GyrofreeStatus::NotARotation,
            Error::MeasurementDropout(_) => GyrofreeStatus::MeasurementDropout,
            Error::Io { .. } => GyrofreeStatus::Io,
            Error::Config(_) | Error::Csv { .. } => GyrofreeStatus::Config,
            _ => GyrofreeStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(GyrofreeStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(GyrofreeStatus::InvalidArgument, msg.into())
}

fn guard(f: impl FnOnce() -> Result<GyrofreeStatus, Failure>) -> GyrofreeStatus {
    let (status, msg) = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => (status, String::new()),
        Ok(Err(Failure(status, msg))) => (status, msg),
        Err(_) => (GyrofreeStatus::Panic, "internal panic".to_string()),
    };
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
    status
}

unsafe fn read<const N: usize>(p: *const f64, what: &str) -> Result<[f64; N], Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    let mut out = [0.0; N];
    out.copy_from_slice(std::slice::from_raw_parts(p, N));
    if out.iter().any(|v| !v.is_finite()) {
        return Err(invalid(format!("{what} has non-finite entries")));
    }
    Ok(out)
}

unsafe fn write(p: *mut f64, values: &[f64], what: &str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    std::slice::from_raw_parts_mut(p, values.len()).copy_from_slice(values);
    Ok(())
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null("handle"))
}

unsafe fn handle_mut<'a, T>(p: *mut T) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null("handle"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(format!("{what} is not valid UTF-8")))
}

/// Accepts nine row-major entries within `1e-6` of a rotation and projects away
/// the remaining drift. Reflections and distant matrices are rejected.
fn rotation(entries: &[f64; 9]) -> Result<Rotation, Failure> {
    let m = Mat3::from_row_slice(entries);
    let ortho_err = (m.transpose() * m - Mat3::identity()).norm();
    let det = m.determinant();
    if ortho_err > 1e-6 || det <= 0.0 {
        return Err(Error::NotARotation { ortho_err, det }.into());
    }
    Ok(Rotation::project(m)?)
}

fn rows(m: &Mat3) -> [f64; 9] {
    let mut out = [0.0; 9];
    for (i, v) in out.iter_mut().enumerate() {
        *v = m[(i / 3, i % 3)];
    }
    out
}

fn frame(accel: [f64; 12], mag: [f64; 3]) -> Result<MeasurementFrame, Failure> {
    let mag = Vec3::from(mag);
    if mag.norm() == 0.0 {
        return Err(invalid("magnetometer reading is zero"));
    }
    Ok(MeasurementFrame {
        t: 0.0,
        accel: std::array::from_fn(|i| Vec3::new(accel[3 * i], accel[3 * i + 1], accel[3 * i + 2])),
        mag: mag.normalize(),
    })
}

/// Copies the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `len - 1` bytes) and returns the full message length. Pass a
/// null `buf` to query the length. The message is empty after a successful call.
///
/// # Safety
/// `buf` must be null or point to at least `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn gyrofree_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn gyrofree_status_string(status: GyrofreeStatus) -> *const c_char {
    let s: &'static CStr = match status {
        GyrofreeStatus::Ok => c"ok",
        GyrofreeStatus::NullPointer => c"null pointer",
        GyrofreeStatus::InvalidArgument => c"invalid argument",
        GyrofreeStatus::NotARotation => c"not a rotation matrix",
        GyrofreeStatus::MeasurementDropout => c"measurement dropout",
        GyrofreeStatus::Io => c"I/O error",
        GyrofreeStatus::Config => c"invalid configuration",
        GyrofreeStatus::NotRun => c"simulation has not been run",
        GyrofreeStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

/// Fills `params` with gains 3 and 1, a unit lever arm, identity reference
/// attitude, zero reference rate and the magnetic direction (1, 0, 1)/√2.
///
/// # Safety
/// `params` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gyrofree_observer_default_params(params: *mut GyrofreeObserverParams) -> GyrofreeStatus {
    guard(|| {
        let out = params.as_mut().ok_or_else(|| null("params"))?;
        let m = Vec3::new(1.0, 0.0, 1.0).normalize();
        *out = GyrofreeObserverParams {
            k1: 3.0,
            k2: 1.0,
            lever_arm: 1.0,
            reference_attitude: [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
            reference_omega: [0.0; 3],
            mag_reference: [m.x, m.y, m.z],
        };
        Ok(GyrofreeStatus::Ok)
    })
}

/// Creates an observer. `init_rotation` (9) and `init_translation` (3) set the
/// initial group estimate; either may be null for identity and zero.
///
/// # Safety
/// Pointers must be null or valid for the documented number of elements.
#[no_mangle]
pub unsafe extern "C" fn gyrofree_observer_new(
    params: *const GyrofreeObserverParams,
    init_rotation: *const f64,
    init_translation: *const f64,
    out: *mut *mut GyrofreeObserver,
) -> GyrofreeStatus {
    guard(|| {
        let p = params.as_ref().ok_or_else(|| null("params"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        if !(p.lever_arm > 0.0 && p.lever_arm.is_finite()) {
            return Err(Error::NonPositiveLeverArm(p.lever_arm).into());
        }
        let mag = Vec3::from(p.mag_reference);
        if !(mag.norm() > 0.0) {
            return Err(invalid("magnetic reference direction is zero"));
        }
        let reference = State::new(rotation(&p.reference_attitude)?, Vec3::from(p.reference_omega));
        let config = ObserverConfig::new(p.k1, p.k2, reference, mag.normalize());
        config.validate()?;
        let rotation = if init_rotation.is_null() {
            Rotation::identity()
        } else {
            rotation(&read::<9>(init_rotation, "init_rotation")?)?
        };
        let translation = if init_translation.is_null() {
            Vec3::zeros()
        } else {
            Vec3::from(read::<3>(init_translation, "init_translation")?)
        };
        let observer = GyrofreeObserver {
            config,
            lever_arm: p.lever_arm,
            state: SymElement::new(rotation, translation),
        };
        *out = Box::into_raw(Box::new(observer));
        Ok(GyrofreeStatus::Ok)
    })
}

/// Advances the observer by `dt` with one accelerometer frame (12) and a
/// magnetometer reading (3, normalized here). If accelerometer 0 reads zero
/// the step is a pure prediction and the call returns
/// `GYROFREE_STATUS_MEASUREMENT_DROPOUT`; the state is still advanced.
///
/// # Safety
/// `observer` must come from [`gyrofree_observer_new`]; arrays must hold the
/// documented number of elements.
#[no_mangle]
pub unsafe extern "C" fn gyrofree_observer_step(
    observer: *mut GyrofreeObserver,
    accel: *const f64,
    mag: *const f64,
    dt: f64,
) -> GyrofreeStatus {
    guard(|| {
        let obs = handle_mut(observer)?;
        let f = frame(read::<12>(accel, "accel")?, read::<3>(mag, "mag")?)?;
        let theta = extract_theta(&f, obs.lever_arm)?;
        match output_pair(&f) {
            Ok(y) => {
                obs.state = observer_step(&obs.state, &y, &theta, &obs.config, dt)?;
                Ok(GyrofreeStatus::Ok)
            }
            Err(Error::MeasurementDropout(n)) => {
                obs.state = observer_predict(&obs.state, &theta, &obs.config, dt)?;
                Err(Error::MeasurementDropout(n).into())
            }
            Err(e) => Err(e.into()),
        }
    })
}

/// Writes the current attitude estimate (9, row-major) and angular velocity
/// estimate (3).
///
/// # Safety
/// `observer` must be a live handle; outputs must hold 9 and 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn gyrofree_observer_estimate(
    observer: *const GyrofreeObserver,
    attitude_out: *mut f64,
    omega_out: *mut f64,
) -> GyrofreeStatus {
    guard(|| {
        let obs = handle(observer)?;
        let est = estimate(&obs.state, &obs.config);
        write(attitude_out, &rows(est.attitude.matrix()), "attitude_out")?;
        write(omega_out, est.omega.as_slice(), "omega_out")?;
        Ok(GyrofreeStatus::Ok)
    })
}

/// Writes the internal group estimate: rotation (9, row-major) and translation (3).
///
/// # Safety
/// `observer` must be a live handle; outputs must hold 9 and 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn gyrofree_observer_group_state(
    observer: *const GyrofreeObserver,
    rotation_out: *mut f64,
    translation_out: *mut f64,
) -> GyrofreeStatus {
    guard(|| {
        let obs = handle(observer)?;
        write(rotation_out, &rows(obs.state.rotation.matrix()), "rotation_out")?;
        write(translation_out, obs.state.translation.as_slice(), "translation_out")?;
        Ok(GyrofreeStatus::Ok)
    })
}

/// # Safety
/// `observer` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gyrofree_observer_free(observer: *mut GyrofreeObserver) {
    if !observer.is_null() {
        drop(Box::from_raw(observer));
    }
}

/// Angular acceleration (3) from one accelerometer frame (12).
///
/// # Safety
/// `accel` must hold 12 doubles and `theta_out` 3.
#[no_mangle]
pub unsafe extern "C" fn gyrofree_extract_theta(
    accel: *const f64,
    lever_arm: f64,
    theta_out: *mut f64,
) -> GyrofreeStatus {
    guard(|| {
        let f = frame(read::<12>(accel, "accel")?, [1.0, 0.0, 0.0])?;
        let theta = extract_theta(&f, lever_arm)?;
        write(theta_out, theta.as_slice(), "theta_out")?;
        Ok(GyrofreeStatus::Ok)
    })
}

fn new_simulation(config: SimConfig, out: *mut *mut GyrofreeSimulation) -> Result<GyrofreeStatus, Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    // SAFETY: checked non-null above; the caller guarantees it is writable.
    unsafe { *out = Box::into_raw(Box::new(GyrofreeSimulation { config, run: None })) };
    Ok(GyrofreeStatus::Ok)
}

/// Creates a simulation from TOML text. Keys left out take their defaults; an
/// empty string gives the default configuration.
///
/// # Safety
/// `toml` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gyrofree_simulation_new_from_toml(
    toml: *const c_char,
    out: *mut *mut GyrofreeSimulation,
) -> GyrofreeStatus {
    guard(|| new_simulation(SimConfig::from_toml_str(text(toml, "toml")?)?, out))
}

/// Creates a simulation from a TOML file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gyrofree_simulation_load(
    path: *const c_char,
    out: *mut *mut GyrofreeSimulation,
) -> GyrofreeStatus {
    guard(|| new_simulation(SimConfig::load(Path::new(text(path, "path")?))?, out))
}

/// Replaces the seed and discards any previous run.
///
/// # Safety
/// `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gyrofree_simulation_set_seed(sim: *mut GyrofreeSimulation, seed: u64) -> GyrofreeStatus {
    guard(|| {
        let s = handle_mut(sim)?;
        s.config.seed = seed;
        s.run = None;
        Ok(GyrofreeStatus::Ok)
    })
}

/// Runs the configured simulation, replacing any previous result.
///
/// # Safety
/// `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gyrofree_simulation_run(sim: *mut GyrofreeSimulation) -> GyrofreeStatus {
    guard(|| {
        let s = handle_mut(sim)?;
        s.run = Some(sim::run(&s.config)?);
        Ok(GyrofreeStatus::Ok)
    })
}

fn last_run(s: &GyrofreeSimulation) -> Result<&SimRun, Failure> {
    s.run
        .as_ref()
        .ok_or_else(|| Failure(GyrofreeStatus::NotRun, "call gyrofree_simulation_run first".into()))
}

/// Number of trace records of the last run (steps + 1).
///
/// # Safety
/// `sim` must be a live handle and `len_out` writable.
#[no_mangle]
pub unsafe extern "C" fn gyrofree_simulation_trace_len(
    sim: *const GyrofreeSimulation,
    len_out: *mut usize,
) -> GyrofreeStatus {
    guard(|| {
        let run = last_run(handle(sim)?)?;
        *len_out.as_mut().ok_or_else(|| null("len_out"))? = run.trace.len();
        Ok(GyrofreeStatus::Ok)
    })
}

/// Copies trace record `index` of the last run.
///
/// # Safety
/// `sim` must be a live handle and `record_out` writable.
#[no_mangle]
pub unsafe extern "C" fn gyrofree_simulation_trace_record(
    sim: *const GyrofreeSimulation,
    index: usize,
    record_out: *mut GyrofreeTraceRecord,
) -> GyrofreeStatus {
    guard(|| {
        let run = last_run(handle(sim)?)?;
        let r = run
            .trace
            .get(index)
            .ok_or_else(|| invalid(format!("index {index} out of range ({} records)", run.trace.len())))?;
        *record_out.as_mut().ok_or_else(|| null("record_out"))? = r.into();
        Ok(GyrofreeStatus::Ok)
    })
}

/// Writes `trace.csv`, `trace.svg` and `measurements.csv` of the last run into
/// `dir`, creating it if needed.
///
/// # Safety
/// `sim` must be a live handle and `dir` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn gyrofree_simulation_write_outputs(
    sim: *const GyrofreeSimulation,
    dir: *const c_char,
) -> GyrofreeStatus {
    guard(|| {
        let run = last_run(handle(sim)?)?;
        let dir = Path::new(text(dir, "dir")?);
        std::fs::create_dir_all(dir).map_err(|e| Failure(GyrofreeStatus::Io, format!("{}: {e}", dir.display())))?;
        sim::write_trace_csv(&run.trace, &dir.join("trace.csv"))?;
        sim::write_plot_svg(&run.trace, &dir.join("trace.svg"))?;
        write_measurement_log(&dir.join("measurements.csv"), &run.frames)?;
        Ok(GyrofreeStatus::Ok)
    })
}

/// # Safety
/// `sim` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gyrofree_simulation_free(sim: *mut GyrofreeSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}
