//! Explicit Runge–Kutta integration with dense output and stop events.
//!
//! Two methods are available: classical fixed-step RK4 and the
//! Dormand–Prince 5(4) embedded pair with a PI step-size controller.
//! Every accepted step stores the state and the vector field, which
//! gives a C¹ cubic Hermite dense output used both for resampling and
//! for locating events by bisection.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{hermite, hermite_derivative, EventRecord, Termination, Trajectory, TrajectoryMeta};

/// First-order system `y' = f(t, y)`.
pub trait OdeSystem {
    fn dim(&self) -> usize;

    /// Writes `f(t, y)` into `dy`. Non-finite outputs mark a point as
    /// outside the domain of the system.
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]);

    /// Stop events that are part of the system definition (singular
    /// denominators, state floors).
    fn guards(&self) -> Vec<Event> {
        Vec::new()
    }

    fn describe(&self) -> String {
        "ode".to_string()
    }
}

/// Scalar second-order equation `y'' = g(x, y, y')`.
pub trait SecondOrderOde {
    fn accel(&self, x: f64, y: f64, yp: f64) -> f64;

    /// Guards over `(x, [y, y'])`.
    fn guards(&self) -> Vec<Event> {
        Vec::new()
    }

    fn describe(&self) -> String {
        "second-order ode".to_string()
    }
}

/// Adapter from a closure to [`OdeSystem`].
pub struct FnSystem<F> {
    dim: usize,
    name: String,
    f: F,
}

impl<F: Fn(f64, &[f64], &mut [f64])> FnSystem<F> {
    pub fn new(name: impl Into<String>, dim: usize, f: F) -> Self {
        Self {
            dim,
            name: name.into(),
            f,
        }
    }
}

impl<F: Fn(f64, &[f64], &mut [f64])> OdeSystem for FnSystem<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        (self.f)(t, y, dy)
    }

    fn describe(&self) -> String {
        self.name.clone()
    }
}

/// First-order form `(y, y')` of a scalar second-order equation.
pub struct FirstOrderForm<'a>(pub &'a dyn SecondOrderOde);

impl OdeSystem for FirstOrderForm<'_> {
    fn dim(&self) -> usize {
        2
    }

    fn rhs(&self, x: f64, y: &[f64], dy: &mut [f64]) {
        dy[0] = y[1];
        dy[1] = self.0.accel(x, y[0], y[1]);
    }

    fn guards(&self) -> Vec<Event> {
        self.0.guards()
    }

    fn describe(&self) -> String {
        self.0.describe()
    }
}

type EventFn = dyn Fn(f64, &[f64]) -> f64 + Send + Sync;

/// A named scalar function of `(t, y)`; integration stops at its first sign change.
#[derive(Clone)]
pub struct Event {
    pub name: String,
    func: Arc<EventFn>,
}

impl Event {
    pub fn new(name: impl Into<String>, f: impl Fn(f64, &[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            func: Arc::new(f),
        }
    }

    pub fn eval(&self, t: f64, y: &[f64]) -> f64 {
        (self.func)(t, y)
    }
}

impl fmt::Debug for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Event").field("name", &self.name).finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    FixedRk4,
    EmbeddedRk45,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorSettings {
    pub method: Method,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Step of the fixed method.
    pub h: f64,
    pub t_span: (f64, f64),
    pub max_steps: usize,
    #[serde(skip)]
    pub events: Vec<Event>,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        Self {
            method: Method::EmbeddedRk45,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            h: 1e-3,
            t_span: (0.0, 1.0),
            max_steps: 1_000_000,
            events: Vec::new(),
        }
    }
}

impl IntegratorSettings {
    pub fn adaptive(t0: f64, t1: f64, rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol,
            t_span: (t0, t1),
            ..Self::default()
        }
    }

    pub fn fixed(t0: f64, t1: f64, h: f64) -> Self {
        Self {
            method: Method::FixedRk4,
            h,
            t_span: (t0, t1),
            ..Self::default()
        }
    }

    pub fn with_event(mut self, event: Event) -> Self {
        self.events.push(event);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let (t0, t1) = self.t_span;
        if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
            return Err(Error::Argument(format!("invalid time span ({t0}, {t1})")));
        }
        if self.max_steps == 0 {
            return Err(Error::Argument("max_steps must be positive".into()));
        }
        match self.method {
            Method::EmbeddedRk45 => {
                if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
                    return Err(Error::Argument("tolerances must be positive".into()));
                }
            }
            Method::FixedRk4 => {
                if !(self.h > 0.0 && self.h.is_finite()) {
                    return Err(Error::Argument("fixed step must be positive".into()));
                }
            }
        }
        Ok(())
    }
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// PI controller
const SAFETY: f64 = 0.9;
const ALPHA: f64 = 0.7 / 4.0;
const BETA: f64 = 0.4 / 4.0;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;

/// Event times are resolved to this absolute width.
pub const EVENT_TIME_RESOLUTION: f64 = 1e-12;
/// Steps smaller than this fraction of the span count as underflow.
pub const STEP_UNDERFLOW_FRACTION: f64 = 1e-14;

fn all_finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

struct EventWatch {
    events: Vec<Event>,
    last: Vec<f64>,
}

impl EventWatch {
    fn new(events: Vec<Event>, t0: f64, y0: &[f64]) -> Self {
        let last = events.iter().map(|e| e.eval(t0, y0)).collect();
        Self { events, last }
    }

    /// Checks the step `(t0, y0, f0) -> (t1, y1, f1)` and returns the
    /// earliest crossing as `(time, index)`.
    fn check(&mut self, t0: f64, y0: &[f64], f0: &[f64], t1: f64, y1: &[f64], f1: &[f64]) -> Option<(f64, usize)> {
        let mut first: Option<(f64, usize)> = None;
        for (i, ev) in self.events.iter().enumerate() {
            let g0 = self.last[i];
            let g1 = ev.eval(t1, y1);
            let crossed = g0 != 0.0 && (g1 == 0.0 || g0.signum() != g1.signum());
            if crossed {
                // bisection on the dense output; keep the bracket end past the crossing
                let (mut lo, mut hi) = (t0, t1);
                while hi - lo > EVENT_TIME_RESOLUTION {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    let ym = hermite(t0, y0, f0, t1, y1, f1, mid);
                    let gm = ev.eval(mid, &ym);
                    if gm != 0.0 && gm.signum() == g0.signum() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                if first.is_none_or(|(t, _)| hi < t) {
                    first = Some((hi, i));
                }
            }
            self.last[i] = g1;
        }
        first
    }
}

/// Integrates `system` from `y0` over `settings.t_span`.
///
/// Returns the trajectory on normal completion, at the first event, or on
/// step-size underflow (recorded in `meta.termination`). Non-finite
/// states and exhausted step budgets are errors carrying the partial
/// trajectory.
pub fn integrate(system: &dyn OdeSystem, y0: &[f64], settings: &IntegratorSettings) -> Result<Trajectory> {
    settings.validate()?;
    if y0.len() != system.dim() {
        return Err(Error::Argument(format!(
            "initial state has dimension {}, system expects {}",
            y0.len(),
            system.dim()
        )));
    }
    if !all_finite(y0) {
        return Err(Error::Domain("non-finite initial state".into()));
    }
    let (t0, _) = settings.t_span;
    let mut f0 = vec![0.0; y0.len()];
    system.rhs(t0, y0, &mut f0);
    let meta = TrajectoryMeta::new(system.describe(), settings.clone());
    let mut traj = Trajectory::start(t0, y0.to_vec(), f0.clone(), meta);
    traj.meta.stats.rhs_evaluations = 1;
    if !all_finite(&f0) {
        return Err(Error::NumericalFailure {
            t: t0,
            reason: "vector field is not finite at the initial state".into(),
            partial: Box::new(traj),
        });
    }
    let mut events = system.guards();
    events.extend(settings.events.iter().cloned());
    let mut watch = EventWatch::new(events, t0, y0);
    match settings.method {
        Method::EmbeddedRk45 => run_dopri(system, settings, &mut traj, &mut watch),
        Method::FixedRk4 => run_rk4(system, settings, &mut traj, &mut watch),
    }?;
    Ok(traj)
}

/// Integrates `y'' = g(x, y, y')` from `(y0, yp0)`; the state is `[y, y']`.
pub fn solve_orbit_ode(
    ode: &dyn SecondOrderOde,
    y0: f64,
    yp0: f64,
    settings: &IntegratorSettings,
) -> Result<Trajectory> {
    integrate(&FirstOrderForm(ode), &[y0, yp0], settings)
}

/// Appends the accepted step and handles events. Returns `true` when integration must stop.
fn accept_step(traj: &mut Trajectory, watch: &mut EventWatch, t1: f64, y1: Vec<f64>, f1: Vec<f64>) -> bool {
    let n = traj.len();
    let t0 = traj.times()[n - 1];
    let hit = {
        let y0 = &traj.states()[n - 1];
        let f0 = &traj.derivatives()[n - 1];
        watch.check(t0, y0, f0, t1, &y1, &f1)
    };
    match hit {
        None => {
            traj.push(t1, y1, f1);
            false
        }
        Some((te, idx)) => {
            let y0 = traj.states()[n - 1].clone();
            let f0 = traj.derivatives()[n - 1].clone();
            if te >= t1 {
                traj.push(t1, y1, f1);
            } else if te > t0 {
                let ye = hermite(t0, &y0, &f0, t1, &y1, &f1, te);
                let fe = hermite_derivative(t0, &y0, &f0, t1, &y1, &f1, te);
                traj.push(te, ye, fe);
            }
            traj.events.push(EventRecord {
                t: te.min(t1),
                name: watch.events[idx].name.clone(),
            });
            traj.meta.termination = Termination::Event;
            true
        }
    }
}

fn initial_step(
    system: &dyn OdeSystem,
    t0: f64,
    y0: &[f64],
    f0: &[f64],
    s: &IntegratorSettings,
    evals: &mut usize,
) -> f64 {
    let span = s.t_span.1 - s.t_span.0;
    let sc: Vec<f64> = y0.iter().map(|y| s.abs_tol + s.rel_tol * y.abs()).collect();
    let rms =
        |v: &[f64]| -> f64 { (v.iter().zip(&sc).map(|(x, w)| (x / w).powi(2)).sum::<f64>() / v.len() as f64).sqrt() };
    let d0 = rms(y0);
    let d1 = rms(f0);
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h0 = h0.min(span);
    let y1: Vec<f64> = y0.iter().zip(f0).map(|(y, f)| y + h0 * f).collect();
    let mut f1 = vec![0.0; y0.len()];
    system.rhs(t0 + h0, &y1, &mut f1);
    *evals += 1;
    if !all_finite(&f1) {
        return h0 * 0.1;
    }
    let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = rms(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(1.0 / 5.0)
    };
    (100.0 * h0).min(h1).min(span)
}

fn run_dopri(
    system: &dyn OdeSystem,
    s: &IntegratorSettings,
    traj: &mut Trajectory,
    watch: &mut EventWatch,
) -> Result<()> {
    let n = system.dim();
    let (t_start, t_end) = s.t_span;
    let span = t_end - t_start;
    let h_min = STEP_UNDERFLOW_FRACTION * span;
    let mut t = t_start;
    let mut y = traj.states()[0].clone();
    let mut k1 = traj.derivatives()[0].clone();
    let mut evals = 0usize;
    let mut h = initial_step(system, t, &y, &k1, s, &mut evals);
    let mut err_prev: f64 = 1e-4;
    let mut rejected_last = false;
    let mut attempts = 0usize;

    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut k5 = vec![0.0; n];
    let mut k6 = vec![0.0; n];
    let mut k7 = vec![0.0; n];
    let mut tmp = vec![0.0; n];

    let finish = |traj: &mut Trajectory, evals: usize| {
        traj.meta.stats.rhs_evaluations += evals;
    };

    while t < t_end {
        if attempts >= s.max_steps {
            finish(traj, evals);
            return Err(Error::MaxSteps {
                t,
                max_steps: s.max_steps,
                partial: Box::new(traj.clone()),
            });
        }
        attempts += 1;
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        } else if h < h_min || t + h <= t {
            traj.meta.termination = Termination::StepUnderflow;
            finish(traj, evals);
            return Ok(());
        }

        for i in 0..n {
            tmp[i] = y[i] + h * A21 * k1[i];
        }
        system.rhs(t + C2 * h, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        system.rhs(t + C3 * h, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        system.rhs(t + C4 * h, &tmp, &mut k4);
        for i in 0..n {
            tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        system.rhs(t + C5 * h, &tmp, &mut k5);
        for i in 0..n {
            tmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        system.rhs(t + h, &tmp, &mut k6);
        let t_new = if last { t_end } else { t + h };
        let y_new: Vec<f64> = (0..n)
            .map(|i| y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]))
            .collect();
        system.rhs(t_new, &y_new, &mut k7);
        evals += 6;

        let mut err = 0.0f64;
        for i in 0..n {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = s.abs_tol + s.rel_tol * y[i].abs().max(y_new[i].abs());
            err = err.max((e / sc).abs());
        }
        let finite = err.is_finite() && all_finite(&y_new) && all_finite(&k7);

        if finite && err <= 1.0 {
            traj.meta.stats.accepted += 1;
            let stop = accept_step(traj, watch, t_new, y_new.clone(), k7.clone());
            if stop {
                finish(traj, evals);
                return Ok(());
            }
            t = t_new;
            y.copy_from_slice(&y_new);
            k1.copy_from_slice(&k7);
            let mut fac = if err == 0.0 {
                FAC_MAX
            } else {
                SAFETY * err.powf(-ALPHA) * err_prev.powf(BETA)
            };
            fac = fac.clamp(FAC_MIN, FAC_MAX);
            if rejected_last {
                fac = fac.min(1.0);
            }
            err_prev = err.max(1e-4);
            rejected_last = false;
            h *= fac;
        } else {
            traj.meta.stats.rejected += 1;
            let fac = if finite {
                (SAFETY * err.powf(-ALPHA)).max(FAC_MIN)
            } else {
                0.25
            };
            h *= fac;
            rejected_last = true;
            if h < h_min {
                traj.meta.termination = Termination::StepUnderflow;
                finish(traj, evals);
                return Ok(());
            }
        }
    }
    finish(traj, evals);
    Ok(())
}

fn run_rk4(
    system: &dyn OdeSystem,
    s: &IntegratorSettings,
    traj: &mut Trajectory,
    watch: &mut EventWatch,
) -> Result<()> {
    let n = system.dim();
    let (t_start, t_end) = s.t_span;
    let mut t = t_start;
    let mut y = traj.states()[0].clone();
    let mut k1 = traj.derivatives()[0].clone();
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    let mut evals = 0usize;
    let mut steps = 0usize;
    let mut k = 0u64;
    while t < t_end {
        if steps >= s.max_steps {
            traj.meta.stats.rhs_evaluations += evals;
            return Err(Error::MaxSteps {
                t,
                max_steps: s.max_steps,
                partial: Box::new(traj.clone()),
            });
        }
        steps += 1;
        k += 1;
        // nodes at t0 + k*h avoid accumulating rounding in t
        let mut t_new = t_start + k as f64 * s.h;
        if t_new >= t_end || t_end - t_new < 1e-9 * s.h {
            t_new = t_end;
        }
        let h = t_new - t;
        for i in 0..n {
            tmp[i] = y[i] + 0.5 * h * k1[i];
        }
        system.rhs(t + 0.5 * h, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = y[i] + 0.5 * h * k2[i];
        }
        system.rhs(t + 0.5 * h, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = y[i] + h * k3[i];
        }
        system.rhs(t_new, &tmp, &mut k4);
        let y_new: Vec<f64> = (0..n)
            .map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect();
        let mut f_new = vec![0.0; n];
        system.rhs(t_new, &y_new, &mut f_new);
        evals += 4;
        if !(all_finite(&y_new) && all_finite(&f_new)) {
            traj.meta.stats.rhs_evaluations += evals;
            return Err(Error::NumericalFailure {
                t: t_new,
                reason: "non-finite state or vector field".into(),
                partial: Box::new(traj.clone()),
            });
        }
        traj.meta.stats.accepted += 1;
        if accept_step(traj, watch, t_new, y_new.clone(), f_new.clone()) {
            traj.meta.stats.rhs_evaluations += evals;
            return Ok(());
        }
        t = t_new;
        y = y_new;
        k1 = f_new;
    }
    traj.meta.stats.rhs_evaluations += evals;
    Ok(())
}
