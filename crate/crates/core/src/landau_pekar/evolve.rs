use serde::{Deserialize, Serialize};

use super::pair::PekarPair;
use super::solver::{LpDiagnostics, LpSolver};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    Strang,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpStepperConfig {
    pub dt: f64,
    pub t_end: f64,
    #[serde(default)]
    pub scheme: Scheme,
    /// Record a snapshot every this many steps (the final state is always
    /// recorded).
    pub record_every: usize,
}

impl LpStepperConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid("dt", format!("must be > 0, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(invalid("t_end", format!("must be >= 0, got {}", self.t_end)));
        }
        if self.record_every == 0 {
            return Err(invalid("record_every", "must be >= 1"));
        }
        Ok(())
    }

    /// Number of uniform steps; the step is shrunk so that they land on `t_end`.
    pub fn steps(&self) -> (usize, f64) {
        if self.t_end == 0.0 {
            return (0, self.dt);
        }
        let n = (self.t_end / self.dt - 1e-9).ceil().max(1.0) as usize;
        (n, self.t_end / n as f64)
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<(f64, PekarPair)>,
    pub diagnostics: Vec<LpDiagnostics>,
}

impl Trajectory {
    pub fn last(&self) -> &PekarPair {
        &self.snapshots.last().expect("trajectory is never empty").1
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.diagnostics
            .iter()
            .map(|d| (d.norm - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_energy_drift(&self) -> f64 {
        self.diagnostics
            .iter()
            .map(|d| d.energy_drift.abs())
            .fold(0.0, f64::max)
    }
}

/// Aborted run: the error plus everything recorded before it.
#[derive(Debug)]
pub struct Aborted {
    pub error: Error,
    pub partial: Trajectory,
    pub last_good: PekarPair,
}

impl std::fmt::Display for Aborted {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.error)
    }
}

pub fn evolve(state: &PekarPair, config: &LpStepperConfig) -> std::result::Result<Trajectory, Box<Aborted>> {
    let fail = |error: Error, partial: Trajectory, last_good: PekarPair| {
        Box::new(Aborted {
            error,
            partial,
            last_good,
        })
    };
    let empty = || Trajectory {
        snapshots: vec![],
        diagnostics: vec![],
    };
    if let Err(e) = config.validate().and_then(|_| state.validate()) {
        return Err(fail(e, empty(), state.clone()));
    }
    let mut solver = LpSolver::new(*state.lattice());
    let d0 = solver.diagnostics(state, 0.0, None);
    let e0 = d0.energy;
    let mut traj = Trajectory {
        snapshots: vec![(0.0, state.clone())],
        diagnostics: vec![d0],
    };
    let (n_steps, h) = config.steps();
    let mut current = state.clone();
    for step in 1..=n_steps {
        let t = step as f64 * h;
        let mut next = current.clone();
        if let Err(e) = solver.step_signed(&mut next, h) {
            let e = match e {
                Error::IntegratorAbort { reason, .. } => Error::IntegratorAbort { t, reason },
                other => other,
            };
            return Err(fail(e, traj, current));
        }
        current = next;
        if step % config.record_every == 0 || step == n_steps {
            let d = solver.diagnostics(&current, t, Some(e0));
            if !(d.energy.is_finite() && d.h2_norm.is_finite()) {
                return Err(fail(
                    Error::IntegratorAbort {
                        t,
                        reason: "non-finite diagnostics".into(),
                    },
                    traj,
                    current,
                ));
            }
            traj.snapshots.push((t, current.clone()));
            traj.diagnostics.push(d);
        }
    }
    Ok(traj)
}

/// Fit of the `C(1+|t|)` growth envelope.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EnvelopeFit {
    /// Smallest `C` with `value(t) ≤ C(1+|t|)` at every sample.
    pub constant: f64,
    /// Largest relative excess over `C(1+|t|)` (zero by construction of `C`).
    pub max_residual: f64,
    /// Log–log growth exponent of `value` against `1+t` over the second half.
    pub growth_exponent: f64,
    /// Growth faster than linear (exponent above 1.25).
    pub superlinear: bool,
}

pub fn fit_linear_envelope(times: &[f64], values: &[f64]) -> Result<EnvelopeFit> {
    if times.len() != values.len() || times.is_empty() {
        return Err(Error::InsufficientData("envelope fit needs matching non-empty series".into()));
    }
    let constant = times
        .iter()
        .zip(values)
        .map(|(t, v)| v / (1.0 + t.abs()))
        .fold(0.0, f64::max);
    let max_residual = times
        .iter()
        .zip(values)
        .map(|(t, v)| (v - constant * (1.0 + t.abs())) / (constant * (1.0 + t.abs())))
        .fold(f64::NEG_INFINITY, f64::max);
    let half = times.len() / 2;
    let xs: Vec<f64> = times[half..].iter().map(|t| (1.0 + t.abs()).ln()).collect();
    let ys: Vec<f64> = values[half..].iter().map(|v| v.max(1e-300).ln()).collect();
    let growth_exponent = if xs.len() >= 2 {
        least_squares_slope(&xs, &ys).0
    } else {
        0.0
    };
    Ok(EnvelopeFit {
        constant,
        max_residual,
        growth_exponent,
        superlinear: growth_exponent > 1.25,
    })
}

/// Ordinary least-squares slope and its standard error.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return (0.0, f64::INFINITY);
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let resid: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - my - slope * (x - mx)).powi(2))
        .sum();
    let se = if xs.len() > 2 {
        (resid / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    (slope, se)
}
