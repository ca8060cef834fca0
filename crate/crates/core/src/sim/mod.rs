//! End-to-end simulation: ground truth, sensor rig, observer, logging and plots.

pub mod check;
pub mod config;
pub mod run;
pub mod trace;
pub mod trajectory;

pub use check::{quick_check, CheckOutcome};
pub use config::{InitMode, ReferenceMode, SimConfig, TrajectorySpec};
pub use run::{prepare, replay, run, run_observer, simulate_measurements, RunSetup, SimRun, TraceRecord};
pub use trace::{read_trace_csv, render_plot_svg, write_plot_svg, write_trace_csv, TRACE_HEADER};
pub use trajectory::{paper_trajectory, Trajectory};
