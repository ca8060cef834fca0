use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::sim::config::TrajectorySpec;

/// `Ω(t) = (sin 0.1t, cos 0.1t, 1)` and its analytic derivative.
pub fn paper_trajectory(t: f64) -> (Vec3, Vec3) {
    let (s, c) = (0.1 * t).sin_cos();
    (Vec3::new(s, c, 1.0), Vec3::new(0.1 * c, -0.1 * s, 0.0))
}

pub const TABLE_HEADER: &str = "t,wx,wy,wz";

#[derive(Clone, Debug)]
pub enum Trajectory {
    Paper,
    Constant(Vec3),
    Table { times: Vec<f64>, rates: Vec<Vec3> },
}

impl Trajectory {
    pub fn from_spec(spec: &TrajectorySpec) -> Result<Self> {
        Ok(match spec {
            TrajectorySpec::PaperDefault => Trajectory::Paper,
            TrajectorySpec::ConstantRate(w) => Trajectory::Constant(Vec3::from(*w)),
            TrajectorySpec::CustomTable(path) => Trajectory::load_table(path)?,
        })
    }

    pub fn load_table(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let csv_err = |line: usize, msg: String| Error::Csv {
            path: path.to_path_buf(),
            line,
            msg,
        };
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some(TABLE_HEADER) {
            return Err(csv_err(1, format!("expected header `{TABLE_HEADER}`")));
        }
        let mut times = Vec::new();
        let mut rates = Vec::new();
        for (n, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let v = line
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| csv_err(n + 2, e.to_string()))?;
            if v.len() != 4 {
                return Err(csv_err(n + 2, format!("expected 4 columns, got {}", v.len())));
            }
            if times.last().is_some_and(|&last| v[0] <= last) {
                return Err(csv_err(n + 2, "times must be strictly increasing".into()));
            }
            times.push(v[0]);
            rates.push(Vec3::new(v[1], v[2], v[3]));
        }
        if times.is_empty() {
            return Err(csv_err(2, "table has no rows".into()));
        }
        Ok(Trajectory::Table { times, rates })
    }

    /// Angular velocity and angular acceleration at `t`.
    pub fn sample(&self, t: f64) -> (Vec3, Vec3) {
        match self {
            Trajectory::Paper => paper_trajectory(t),
            Trajectory::Constant(w) => (*w, Vec3::zeros()),
            Trajectory::Table { times, rates } => {
                let n = times.len();
                if n == 1 || t <= times[0] {
                    return (rates[0], Vec3::zeros());
                }
                if t >= times[n - 1] {
                    return (rates[n - 1], Vec3::zeros());
                }
                let i = times.partition_point(|&ti| ti <= t) - 1;
                let span = times[i + 1] - times[i];
                let slope = (rates[i + 1] - rates[i]) / span;
                (rates[i] + slope * (t - times[i]), slope)
            }
        }
    }

    pub fn omega(&self, t: f64) -> Vec3 {
        self.sample(t).0
    }
}
