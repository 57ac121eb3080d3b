//! Analytic-versus-simulation comparison at one parameter point.

use nnoma_core::analytic::{analyze, OutageReport};
use nnoma_core::sim::{estimate_outage, MCEstimate};
use nnoma_core::SystemParams;
use serde::{Deserialize, Serialize};

use crate::config::{McSettings, RunConfig};
use crate::error::Result;

/// |analytic − simulated| ≤ max(abs, rel·simulated). The simulated value is
/// the reference the relative part scales with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn allowed(&self, reference: f64) -> f64 {
        self.abs.max(self.rel * reference.abs())
    }
}

/// CoMP-user outage.
pub const P0_TOLERANCE: Tolerance = Tolerance { abs: 0.01, rel: 0.10 };

/// NOMA-user outage; looser because the analysis places the cluster user at
/// its mean distance from the interferers.
pub const PI_TOLERANCE: Tolerance = Tolerance { abs: 0.02, rel: 0.15 };

/// Trials behind each run of the window-doubling check.
pub const WINDOW_CHECK_TRIALS: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub analytic: f64,
    pub simulated: f64,
    pub delta: f64,
    pub allowed: f64,
    /// Analytic value inside the simulated 95% interval.
    pub covered: bool,
    pub pass: bool,
}

impl Comparison {
    pub fn new(analytic: f64, simulated: f64, ci95: f64, tol: Tolerance) -> Self {
        let delta = (analytic - simulated).abs();
        let allowed = tol.allowed(simulated);
        Self {
            analytic,
            simulated,
            delta,
            allowed,
            covered: delta <= ci95,
            pass: delta <= allowed,
        }
    }
}

/// Simulated outage with the interference window at W and 2W on common
/// random numbers; the shift must stay inside the 95% half-width at W.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowCheck {
    pub window: f64,
    pub p0_near: f64,
    pub p0_far: f64,
    /// 95% half-width of the near estimate.
    pub p0_allowed: f64,
    pub pi_near: Option<f64>,
    pub pi_far: Option<f64>,
    pub pi_allowed: Option<f64>,
    pub pass: bool,
}

pub fn window_doubling(p: &SystemParams, mc: &McSettings) -> Result<WindowCheck> {
    let trials = mc.trials.min(WINDOW_CHECK_TRIALS);
    let near = estimate_outage(p, trials, mc.seed, mc.window)?;
    let far = estimate_outage(p, trials, mc.seed, 2.0 * mc.window)?;
    let mut pass = (near.p0_hat - far.p0_hat).abs() <= near.ci95_p0;
    if let (Some(a), Some(b), Some(ci)) = (near.pi_hat, far.pi_hat, near.ci95_pi) {
        pass &= (a - b).abs() <= ci;
    }
    Ok(WindowCheck {
        window: mc.window,
        p0_near: near.p0_hat,
        p0_far: far.p0_hat,
        p0_allowed: near.ci95_p0,
        pi_near: near.pi_hat,
        pi_far: far.pi_hat,
        pi_allowed: near.ci95_pi,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub analytic: OutageReport,
    pub simulated: MCEstimate,
    pub p0: Comparison,
    /// `None` when no trial had a cooperating BS.
    pub pi: Option<Comparison>,
    pub window: WindowCheck,
    pub pass: bool,
}

pub fn validate(cfg: &RunConfig) -> Result<ValidationReport> {
    let p = &cfg.params;
    let analytic = analyze(p, &cfg.accuracy)?;
    let simulated = estimate_outage(p, cfg.mc.trials, cfg.mc.seed, cfg.mc.window)?;
    let p0 = Comparison::new(analytic.p0, simulated.p0_hat, simulated.ci95_p0, P0_TOLERANCE);
    let pi = simulated
        .pi_hat
        .zip(simulated.ci95_pi)
        .map(|(pi, ci)| Comparison::new(analytic.pi, pi, ci, PI_TOLERANCE));
    let window = window_doubling(p, &cfg.mc)?;
    let pass = p0.pass && pi.as_ref().is_none_or(|c| c.pass) && window.pass;
    Ok(ValidationReport {
        analytic,
        simulated,
        p0,
        pi,
        window,
        pass,
    })
}
