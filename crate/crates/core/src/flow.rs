//! Numerical Hamiltonian flows with conservation diagnostics.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::BFunction;
use crate::linalg;
use crate::systems::IntegrableSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Rk4,
    ImplicitMidpoint,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rk4" => Ok(Method::Rk4),
            "implicit_midpoint" | "midpoint" => Ok(Method::ImplicitMidpoint),
            other => Err(Error::InvalidArgument(format!("unknown method `{other}` (rk4, implicit_midpoint)"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Rk4 => "rk4",
            Method::ImplicitMidpoint => "implicit_midpoint",
        })
    }
}

const MIDPOINT_TOLERANCE: f64 = 1e-12;
const MIDPOINT_MAX_ITERATIONS: usize = 50;
/// Below this distance from Z a log-type integral is tracked through its smooth proxy.
const SINGULAR_MONITOR_CUTOFF: f64 = 1e-8;

fn axpy(x: &[f64], a: f64, k: &[f64]) -> Vec<f64> {
    x.iter().zip(k).map(|(xi, ki)| xi + a * ki).collect()
}

pub fn rk4_step<F>(field: &F, x: &[f64], dt: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let k1 = field(x)?;
    let k2 = field(&axpy(x, dt / 2.0, &k1))?;
    let k3 = field(&axpy(x, dt / 2.0, &k2))?;
    let k4 = field(&axpy(x, dt, &k3))?;
    Ok((0..x.len())
        .map(|i| x[i] + dt * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0)
        .collect())
}

/// `x' = x + dt * F((x + x') / 2)`, solved by fixed-point iteration.
pub fn implicit_midpoint_step<F>(field: &F, x: &[f64], dt: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let mut next = axpy(x, dt, &field(x)?);
    for _ in 0..MIDPOINT_MAX_ITERATIONS {
        let mid: Vec<f64> = x.iter().zip(&next).map(|(a, b)| 0.5 * (a + b)).collect();
        let candidate = axpy(x, dt, &field(&mid)?);
        let change = candidate.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let scale = 1.0 + linalg::norm(&candidate);
        next = candidate;
        if change <= MIDPOINT_TOLERANCE * scale {
            return Ok(next);
        }
    }
    Err(Error::Convergence(format!(
        "implicit midpoint stage did not converge in {MIDPOINT_MAX_ITERATIONS} iterations (dt = {dt})"
    )))
}

fn step<F>(method: Method, field: &F, x: &[f64], dt: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let out = match method {
        Method::Rk4 => rk4_step(field, x, dt)?,
        Method::ImplicitMidpoint => implicit_midpoint_step(field, x, dt)?,
    };
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("flow left the domain (non-finite state)".into()));
    }
    Ok(out)
}

/// Conserved-quantity monitor for one integral.
enum Monitor<'a> {
    Plain(&'a BFunction),
    /// `x_s * exp(g / c)` for `f = c log|x_s| + g`: smooth, vanishes exactly on Z.
    Proxy { f: &'a BFunction, s: usize },
}

impl Monitor<'_> {
    fn value(&self, x: &[f64]) -> Result<f64> {
        match self {
            Monitor::Plain(f) => f.value(x),
            Monitor::Proxy { f, s } => Ok(x[*s] * (f.smooth_part().eval(x)? / f.c()).exp()),
        }
    }
}

/// Time series of a single Hamiltonian flow.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub method: Method,
    pub dt: f64,
    pub coordinates: Vec<String>,
    pub times: Vec<f64>,
    /// States with angles unwrapped (valued in R).
    pub states: Vec<Vec<f64>>,
    /// Largest drift over all integrals at each recorded time.
    pub drift: Vec<f64>,
    /// Largest drift of each integral over the whole run.
    pub integral_drift: Vec<f64>,
    /// Integrals whose drift is measured through `x_s * exp(g / c)` instead of the log form.
    pub proxied: Vec<String>,
}

impl Trajectory {
    pub fn max_drift(&self) -> f64 {
        self.drift.iter().copied().fold(0.0, f64::max)
    }

    pub fn last(&self) -> &[f64] {
        self.states.last().expect("trajectory is never empty")
    }
}

/// Integrates `dx/dt = X_H` for `H = integrals[h_index]` on the grid `0, dt, .., T`.
pub fn integrate(
    sys: &IntegrableSystem,
    h_index: usize,
    p0: &[f64],
    dt: f64,
    t_total: f64,
    method: Method,
) -> Result<Trajectory> {
    sys.chart().check_point(p0)?;
    if h_index >= sys.integrals().len() {
        return Err(Error::InvalidArgument(format!(
            "integral index {h_index} out of range ({} integrals)",
            sys.integrals().len()
        )));
    }
    if !(dt > 0.0 && dt.is_finite() && t_total > 0.0 && t_total.is_finite()) {
        return Err(Error::InvalidArgument(format!("need dt > 0 and T > 0 (got dt = {dt}, T = {t_total})")));
    }
    let steps = (t_total / dt - 1e-9).ceil().max(1.0);
    if steps > 1e9 {
        return Err(Error::InvalidArgument(format!("step underflow: dt = {dt} is too small for T = {t_total}")));
    }
    let steps = steps as usize;
    let field = |x: &[f64]| sys.field(h_index, x);

    let monitors: Vec<Monitor> = sys
        .functions()
        .map(|f| match f.singular_index() {
            Some(s) if p0[s].abs() < SINGULAR_MONITOR_CUTOFF => Monitor::Proxy { f, s },
            _ => Monitor::Plain(f),
        })
        .collect();
    let proxied = sys
        .integrals()
        .iter()
        .zip(&monitors)
        .filter(|(_, m)| matches!(m, Monitor::Proxy { .. }))
        .map(|(i, _)| i.name.clone())
        .collect();
    let initial: Vec<f64> = monitors.iter().map(|m| m.value(p0)).collect::<Result<_>>()?;

    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut drift = Vec::with_capacity(steps + 1);
    let mut integral_drift = vec![0.0; monitors.len()];
    times.push(0.0);
    states.push(p0.to_vec());
    drift.push(0.0);
    let mut x = p0.to_vec();
    for k in 1..=steps {
        x = step(method, &field, &x, dt)?;
        let mut worst = 0.0f64;
        for (j, m) in monitors.iter().enumerate() {
            let d = match (m, m.value(&x)) {
                (_, Ok(v)) => (v - initial[j]).abs(),
                // A log-type integral evaluated exactly on Z: fall back to the proxy.
                (Monitor::Plain(f), Err(_)) if f.singular_index().is_some() => {
                    let s = f.singular_index().unwrap_or_default();
                    let proxy = Monitor::Proxy { f, s };
                    (proxy.value(&x)? - proxy.value(p0)?).abs()
                }
                (_, Err(e)) => return Err(e),
            };
            integral_drift[j] = f64::max(integral_drift[j], d);
            worst = worst.max(d);
        }
        times.push(k as f64 * dt);
        states.push(x.clone());
        drift.push(worst);
    }
    Ok(Trajectory {
        method,
        dt,
        coordinates: sys.chart().names().into_iter().map(String::from).collect(),
        times,
        states,
        drift,
        integral_drift,
        proxied,
    })
}

/// Default largest step used by [`joint_flow`] and [`combined_flow`].
pub const DEFAULT_MAX_STEP: f64 = 1e-3;

/// Flows `field` for time `t` (either sign) with equal steps no longer than `max_step`.
pub fn flow_for<F>(field: &F, p0: &[f64], t: f64, max_step: f64, method: Method) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    if t == 0.0 {
        return Ok(p0.to_vec());
    }
    if !(max_step > 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("bad flow time {t} or step {max_step}")));
    }
    let n = (t.abs() / max_step).ceil().max(1.0) as usize;
    let h = t / n as f64;
    let mut x = p0.to_vec();
    for _ in 0..n {
        x = step(method, field, &x, h)?;
    }
    Ok(x)
}

/// `Phi_{f_1}^{s_1} o .. o Phi_{f_k}^{s_k}` applied to `p0`, flowing `f_1` first.
pub fn joint_flow_with(sys: &IntegrableSystem, s: &[f64], p0: &[f64], max_step: f64, method: Method) -> Result<Vec<f64>> {
    sys.chart().check_point(p0)?;
    check_times(sys, s)?;
    let mut x = p0.to_vec();
    for (i, &t) in s.iter().enumerate() {
        x = flow_for(&|y: &[f64]| sys.field(i, y), &x, t, max_step, method)?;
    }
    Ok(x)
}

pub fn joint_flow(sys: &IntegrableSystem, s: &[f64], p0: &[f64]) -> Result<Vec<f64>> {
    joint_flow_with(sys, s, p0, DEFAULT_MAX_STEP, Method::Rk4)
}

fn check_times(sys: &IntegrableSystem, s: &[f64]) -> Result<()> {
    if s.len() != sys.integrals().len() {
        return Err(Error::InvalidArgument(format!(
            "time vector has {} entries, system has {} integrals",
            s.len(),
            sys.integrals().len()
        )));
    }
    Ok(())
}

/// Field `sum_i s_i X_{f_i}`.
pub fn combined_field(sys: &IntegrableSystem, s: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    let mut out = vec![0.0; x.len()];
    for (i, &si) in s.iter().enumerate().filter(|(_, &si)| si != 0.0) {
        for (o, v) in out.iter_mut().zip(sys.field(i, x)?) {
            *o += si * v;
        }
    }
    Ok(out)
}

/// Time-`t` flow of the single field `sum_i s_i X_{f_i}`; for commuting integrals this equals
/// `joint_flow(t * s)` while needing a single integration.
pub fn combined_flow(sys: &IntegrableSystem, s: &[f64], t: f64, p0: &[f64], max_step: f64) -> Result<Vec<f64>> {
    check_times(sys, s)?;
    let scale = linalg::norm(s).max(f64::MIN_POSITIVE);
    // Step length is measured in units of the combined time `|t * s|`.
    let unit: Vec<f64> = s.iter().map(|v| v / scale).collect();
    flow_for(&|y: &[f64]| combined_field(sys, &unit, y), p0, t * scale, max_step, Method::Rk4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::{BaseCoord, CoordKind, PhaseChart, PoissonStructure};
    use crate::systems::NamedIntegral;

    fn twisted(c: f64) -> IntegrableSystem {
        let chart = PhaseChart::new(
            vec![
                BaseCoord::with_fiber("theta1", CoordKind::Angle, "a1"),
                BaseCoord::with_fiber("theta2", CoordKind::Angle, "a2"),
            ],
            vec![],
            Some("a1"),
        )
        .unwrap();
        let s = PoissonStructure::twisted_b(&chart, c).unwrap();
        let f1 = chart.parse_bfunction(&format!("{c}*log(abs(a1))")).unwrap();
        let f2 = chart.parse_bfunction("a2").unwrap();
        IntegrableSystem::new("tw", chart, s, vec![NamedIntegral::new("f1", f1), NamedIntegral::new("f2", f2)]).unwrap()
    }

    fn oscillator() -> IntegrableSystem {
        let chart = PhaseChart::cotangent(vec![BaseCoord::with_fiber("x", CoordKind::Real, "y")]).unwrap();
        let s = PoissonStructure::canonical(&chart);
        let h = chart.parse_bfunction("0.5*(x^2 + y^2)").unwrap();
        IntegrableSystem::new("osc", chart, s, vec![NamedIntegral::new("H", h)]).unwrap()
    }

    #[test]
    fn twisted_singular_flow_is_unit_rotation() {
        let sys = twisted(2.0);
        for method in [Method::Rk4, Method::ImplicitMidpoint] {
            for a1 in [0.0, 0.7, -1.3] {
                let p0 = [0.25, 0.5, a1, 0.3];
                let tr = integrate(&sys, 0, &p0, 0.01, 5.0, method).unwrap();
                for (t, x) in tr.times.iter().zip(&tr.states) {
                    assert!((x[0] - (0.25 - t)).abs() <= 1e-12, "{method} {a1}: {x:?} at {t}");
                    assert_eq!(&x[1..], &p0[1..]);
                }
                assert!(tr.max_drift() <= 1e-12);
            }
        }
    }

    #[test]
    fn oscillator_midpoint_conserves_energy_and_has_period_two_pi() {
        let sys = oscillator();
        let tr = integrate(&sys, 0, &[1.0, 0.0], 1e-2, 100.0, Method::ImplicitMidpoint).unwrap();
        assert!(tr.max_drift() <= 1e-4, "{}", tr.max_drift());
        // First upward crossing of y = 0 after t = 0 with x > 0 marks one full turn.
        let mut period = None;
        for k in 1..tr.states.len() {
            let (a, b) = (&tr.states[k - 1], &tr.states[k]);
            if tr.times[k] > 1.0 && a[1] < 0.0 && b[1] >= 0.0 && b[0] > 0.0 {
                let frac = -a[1] / (b[1] - a[1]);
                period = Some(tr.times[k - 1] + frac * tr.dt);
                break;
            }
        }
        let period = period.unwrap();
        assert!((period - 2.0 * std::f64::consts::PI).abs() < 1e-3, "{period}");
    }

    #[test]
    fn z_is_invariant() {
        let sys = twisted(1.0);
        let tr = integrate(&sys, 1, &[0.1, 0.2, 0.0, 0.4], 0.01, 1.0, Method::ImplicitMidpoint).unwrap();
        assert!(tr.states.iter().all(|x| x[2] == 0.0));
        assert_eq!(tr.proxied, vec!["f1".to_string()]);
    }

    #[test]
    fn joint_flow_on_canonical_torus() {
        let chart = PhaseChart::cotangent(vec![BaseCoord::angle("t1"), BaseCoord::angle("t2")]).unwrap();
        let s = PoissonStructure::canonical(&chart);
        let ints = vec![
            NamedIntegral::new("a1", chart.parse_bfunction("p_t1").unwrap()),
            NamedIntegral::new("a2", chart.parse_bfunction("p_t2").unwrap()),
        ];
        let sys = IntegrableSystem::new("can", chart, s, ints).unwrap();
        let p0 = [0.1, 0.2, 0.3, 1.7];
        assert_eq!(joint_flow(&sys, &[0.0, 0.0], &p0).unwrap(), p0.to_vec());
        let x = joint_flow(&sys, &[0.4, 1.5], &p0).unwrap();
        assert!((x[0] - (0.1 - 0.4)).abs() < 1e-12 && (x[1] - (0.2 - 1.5)).abs() < 1e-12);
        let y = combined_flow(&sys, &[0.4, 1.5], 1.0, &p0, 1e-3).unwrap();
        assert!(linalg::norm(&axpy(&x, -1.0, &y)) < 1e-12);
    }

    #[test]
    fn bad_arguments() {
        let sys = oscillator();
        assert!(integrate(&sys, 0, &[1.0], 0.1, 1.0, Method::Rk4).is_err());
        assert!(integrate(&sys, 0, &[1.0, 0.0], 0.0, 1.0, Method::Rk4).is_err());
        assert!(integrate(&sys, 3, &[1.0, 0.0], 0.1, 1.0, Method::Rk4).is_err());
        assert!("euler".parse::<Method>().is_err());
    }
}
