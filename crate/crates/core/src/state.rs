//! Phase-space states and integrated trajectories.
//!
//! A [`Trajectory`] stores every accepted step together with the vector
//! field evaluated there, so that any interior time can be recovered by
//! piecewise cubic Hermite interpolation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrate::IntegratorSettings;

/// Instantaneous state of the planar particle. Angles are unwrapped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarState {
    pub t: f64,
    pub r: f64,
    pub theta: f64,
    pub rdot: f64,
    pub thetadot: f64,
}

impl PolarState {
    pub fn new(t: f64, r: f64, theta: f64, rdot: f64, thetadot: f64) -> Result<Self> {
        let s = Self {
            t,
            r,
            theta,
            rdot,
            thetadot,
        };
        s.validate()?;
        Ok(s)
    }

    /// Builds a state from an `[r, theta, rdot, thetadot]` slice without validation.
    pub fn from_slice(t: f64, y: &[f64]) -> Self {
        Self {
            t,
            r: y[0],
            theta: y[1],
            rdot: y[2],
            thetadot: y[3],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [self.t, self.r, self.theta, self.rdot, self.thetadot];
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite polar state {self:?}")));
        }
        if self.r <= 0.0 {
            return Err(Error::Domain(format!("radius must be positive, got {}", self.r)));
        }
        Ok(())
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.r, self.theta, self.rdot, self.thetadot]
    }

    /// r²θ̇
    pub fn angular_momentum(&self) -> f64 {
        self.r * self.r * self.thetadot
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    Completed,
    Event,
    StepUnderflow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub t: f64,
    pub name: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evaluations: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub system: String,
    pub settings: IntegratorSettings,
    pub termination: Termination,
    pub stats: StepStats,
}

impl TrajectoryMeta {
    pub fn new(system: impl Into<String>, settings: IntegratorSettings) -> Self {
        Self {
            system: system.into(),
            settings,
            termination: Termination::Completed,
            stats: StepStats::default(),
        }
    }
}

/// Ordered samples of a first-order system `y' = f(t, y)`.
///
/// Invariants: sample times strictly increasing, one state and one
/// derivative vector per time, all vectors of the same dimension.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<Vec<f64>>,
    derivs: Vec<Vec<f64>>,
    pub meta: TrajectoryMeta,
    pub events: Vec<EventRecord>,
}

impl Trajectory {
    pub fn from_parts(
        times: Vec<f64>,
        states: Vec<Vec<f64>>,
        derivs: Vec<Vec<f64>>,
        meta: TrajectoryMeta,
    ) -> Result<Self> {
        if times.is_empty() || times.len() != states.len() || times.len() != derivs.len() {
            return Err(Error::Argument(format!(
                "mismatched trajectory parts: {} times, {} states, {} derivatives",
                times.len(),
                states.len(),
                derivs.len()
            )));
        }
        let dim = states[0].len();
        if states.iter().chain(derivs.iter()).any(|v| v.len() != dim) {
            return Err(Error::Argument("inconsistent state dimension".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Argument("sample times must be strictly increasing".into()));
        }
        Ok(Self {
            times,
            states,
            derivs,
            meta,
            events: Vec::new(),
        })
    }

    pub(crate) fn start(t0: f64, y0: Vec<f64>, f0: Vec<f64>, meta: TrajectoryMeta) -> Self {
        Self {
            times: vec![t0],
            states: vec![y0],
            derivs: vec![f0],
            meta,
            events: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, t: f64, y: Vec<f64>, f: Vec<f64>) {
        debug_assert!(t > *self.times.last().unwrap());
        self.times.push(t);
        self.states.push(y);
        self.derivs.push(f);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].len()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[Vec<f64>] {
        &self.states
    }

    pub fn derivatives(&self) -> &[Vec<f64>] {
        &self.derivs
    }

    pub fn t_span(&self) -> (f64, f64) {
        (self.times[0], *self.times.last().unwrap())
    }

    pub fn last_state(&self) -> &[f64] {
        self.states.last().unwrap()
    }

    /// Values of one state component at every sample.
    pub fn component(&self, i: usize) -> Vec<f64> {
        self.states.iter().map(|y| y[i]).collect()
    }

    /// Samples of a four-dimensional `[r, theta, rdot, thetadot]` trajectory.
    pub fn polar_states(&self) -> Result<Vec<PolarState>> {
        if self.dim() != 4 {
            return Err(Error::Argument(format!(
                "polar view needs a 4-dimensional trajectory, got {}",
                self.dim()
            )));
        }
        Ok(self
            .times
            .iter()
            .zip(&self.states)
            .map(|(&t, y)| PolarState::from_slice(t, y))
            .collect())
    }

    /// State at time `t` by cubic Hermite interpolation on the enclosing step.
    pub fn state_at(&self, t: f64) -> Result<Vec<f64>> {
        let (start, end) = self.t_span();
        if !(t >= start && t <= end) {
            return Err(Error::Range { value: t, start, end });
        }
        // index of the first node >= t
        let k = self.times.partition_point(|&s| s < t);
        if self.times[k] == t {
            return Ok(self.states[k].clone());
        }
        let i = k - 1;
        Ok(hermite(
            self.times[i],
            &self.states[i],
            &self.derivs[i],
            self.times[k],
            &self.states[k],
            &self.derivs[k],
            t,
        ))
    }

    pub fn resample(&self, times: &[f64]) -> Result<Vec<Vec<f64>>> {
        times.iter().map(|&t| self.state_at(t)).collect()
    }
}

/// Free-function form of [`Trajectory::resample`].
pub fn resample(traj: &Trajectory, times: &[f64]) -> Result<Vec<Vec<f64>>> {
    traj.resample(times)
}

/// Cubic Hermite interpolant through `(t0, y0, f0)` and `(t1, y1, f1)`.
pub(crate) fn hermite(t0: f64, y0: &[f64], f0: &[f64], t1: f64, y1: &[f64], f1: &[f64], t: f64) -> Vec<f64> {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    (0..y0.len())
        .map(|i| h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i])
        .collect()
}

/// Time derivative of the Hermite interpolant.
pub(crate) fn hermite_derivative(t0: f64, y0: &[f64], f0: &[f64], t1: f64, y1: &[f64], f1: &[f64], t: f64) -> Vec<f64> {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let s2 = s * s;
    let d00 = (6.0 * s2 - 6.0 * s) / h;
    let d10 = 3.0 * s2 - 4.0 * s + 1.0;
    let d01 = (-6.0 * s2 + 6.0 * s) / h;
    let d11 = 3.0 * s2 - 2.0 * s;
    (0..y0.len())
        .map(|i| d00 * y0[i] + d10 * f0[i] + d01 * y1[i] + d11 * f1[i])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> TrajectoryMeta {
        TrajectoryMeta::new("test", IntegratorSettings::default())
    }

    fn cubic_traj() -> Trajectory {
        // y = t^3, y' = 3t^2 on an irregular grid
        let times = vec![0.0, 0.3, 1.0, 1.7, 2.0];
        let states = times.iter().map(|&t: &f64| vec![t.powi(3)]).collect();
        let derivs = times.iter().map(|&t: &f64| vec![3.0 * t * t]).collect();
        Trajectory::from_parts(times, states, derivs, meta()).unwrap()
    }

    #[test]
    fn constant_trajectory_resamples_to_constant() {
        let times = vec![0.0, 1.0, 2.5];
        let states = vec![vec![4.0, -1.0]; 3];
        let derivs = vec![vec![0.0, 0.0]; 3];
        let traj = Trajectory::from_parts(times, states, derivs, meta()).unwrap();
        for t in [0.0, 0.1, 1.3, 2.5] {
            assert_eq!(traj.state_at(t).unwrap(), vec![4.0, -1.0]);
        }
    }

    #[test]
    fn node_query_returns_stored_state() {
        let traj = cubic_traj();
        assert_eq!(traj.state_at(1.7).unwrap(), vec![1.7f64.powi(3)]);
    }

    #[test]
    fn cubic_reproduced_at_midpoints() {
        let traj = cubic_traj();
        for w in traj.times().windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let y = traj.state_at(mid).unwrap()[0];
            assert!((y - mid.powi(3)).abs() < 1e-12, "{mid}: {y}");
        }
    }

    #[test]
    fn out_of_span_is_range_error() {
        let traj = cubic_traj();
        assert!(matches!(traj.state_at(2.01), Err(Error::Range { .. })));
        assert!(matches!(traj.state_at(-1e-9), Err(Error::Range { .. })));
        assert!(matches!(traj.state_at(f64::NAN), Err(Error::Range { .. })));
    }

    #[test]
    fn hermite_derivative_matches_cubic() {
        let d = hermite_derivative(0.0, &[0.0], &[0.0], 2.0, &[8.0], &[12.0], 1.5);
        assert!((d[0] - 3.0 * 1.5 * 1.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_increasing_times() {
        let r = Trajectory::from_parts(vec![0.0, 0.0], vec![vec![1.0]; 2], vec![vec![0.0]; 2], meta());
        assert!(r.is_err());
    }

    #[test]
    fn polar_state_validation() {
        assert!(PolarState::new(0.0, 0.0, 0.0, 0.0, 0.0).is_err());
        assert!(PolarState::new(0.0, 1.0, f64::NAN, 0.0, 0.0).is_err());
        let s = PolarState::new(0.0, 2.0, 0.0, 0.0, 0.25).unwrap();
        assert_eq!(s.angular_momentum(), 1.0);
    }
}
