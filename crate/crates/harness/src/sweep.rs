//! One-parameter grids evaluated analytically and/or by simulation.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use nnoma_core::analytic::analyze;
use nnoma_core::sim::estimate_outage;
use nnoma_core::SystemParams;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Modes, RunConfig};
use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepParam {
    LambdaC,
    Beta0Sq,
    R0Bpcu,
    RiBpcu,
    PsDbm,
    K,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::LambdaC => "lambda_c",
            SweepParam::Beta0Sq => "beta0_sq",
            SweepParam::R0Bpcu => "R0_bpcu",
            SweepParam::RiBpcu => "Ri_bpcu",
            SweepParam::PsDbm => "P_s_dbm",
            SweepParam::K => "K",
        }
    }

    /// `base` with this parameter set to `value`; a β₀² sweep keeps
    /// β₁² = 1 − β₀².
    pub fn apply(self, base: &SystemParams, value: f64) -> Result<SystemParams> {
        let mut raw = base.raw().clone();
        raw.set(self.name(), value)?;
        if self == SweepParam::Beta0Sq {
            raw.beta1_sq = 1.0 - value;
        }
        Ok(raw.build()?)
    }
}

impl FromStr for SweepParam {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        [
            SweepParam::LambdaC,
            SweepParam::Beta0Sq,
            SweepParam::R0Bpcu,
            SweepParam::RiBpcu,
            SweepParam::PsDbm,
            SweepParam::K,
        ]
        .into_iter()
        .find(|p| p.name() == s)
        .ok_or_else(|| {
            HarnessError::Sweep(format!(
                "cannot sweep `{s}`; choose lambda_c, beta0_sq, R0_bpcu, Ri_bpcu, P_s_dbm or K"
            ))
        })
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GridScale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub scale: GridScale,
}

impl Grid {
    pub fn new(lo: f64, hi: f64, count: usize, scale: GridScale) -> Result<Self> {
        if count < 2 {
            return Err(HarnessError::Sweep(format!(
                "grid needs at least 2 points, got {count}"
            )));
        }
        if !lo.is_finite() || !hi.is_finite() {
            return Err(HarnessError::Sweep("grid endpoints must be finite".into()));
        }
        if lo == hi {
            return Err(HarnessError::Sweep(format!("degenerate grid: both endpoints are {lo}")));
        }
        if scale == GridScale::Log && (lo <= 0.0 || hi <= 0.0) {
            return Err(HarnessError::Sweep("log grid endpoints must be positive".into()));
        }
        Ok(Self { lo, hi, count, scale })
    }

    /// Grid values in order; the endpoints are reproduced exactly.
    pub fn values(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i == 0 {
                    return self.lo;
                }
                if i == self.count - 1 {
                    return self.hi;
                }
                let t = i as f64 / last;
                match self.scale {
                    GridScale::Linear => self.lo + t * (self.hi - self.lo),
                    GridScale::Log => (self.lo.ln() + t * (self.hi.ln() - self.lo.ln())).exp(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub base: RunConfig,
    pub param: SweepParam,
    pub grid: Grid,
    pub modes: Modes,
}

impl SweepSpec {
    /// Parses `NAME=LO:HI:COUNT[:log]`.
    pub fn parse(base: RunConfig, arg: &str, modes: Modes) -> Result<Self> {
        let bad = |why: &str| HarnessError::Sweep(format!("`{arg}`: {why}; expected NAME=LO:HI:COUNT[:log]"));
        let (name, range) = arg.split_once('=').ok_or_else(|| bad("missing `=`"))?;
        let param: SweepParam = name.trim().parse()?;
        let fields: Vec<&str> = range.split(':').map(str::trim).collect();
        let scale = match fields.get(3) {
            None => GridScale::Linear,
            Some(&"log") => GridScale::Log,
            Some(&"lin") => GridScale::Linear,
            Some(_) => return Err(bad("the fourth field must be `log` or `lin`")),
        };
        if fields.len() < 3 || fields.len() > 4 {
            return Err(bad("wrong number of fields"));
        }
        let lo: f64 = fields[0].parse().map_err(|_| bad("LO is not a number"))?;
        let hi: f64 = fields[1].parse().map_err(|_| bad("HI is not a number"))?;
        let count: usize = fields[2].parse().map_err(|_| bad("COUNT is not a positive integer"))?;
        let grid = Grid::new(lo, hi, count, scale)?;
        for v in grid.values() {
            param.apply(&base.params, v)?;
        }
        Ok(Self {
            base,
            param,
            grid,
            modes,
        })
    }
}

/// One evaluated grid point. Columns of a mode that was not run, or of a
/// point that failed, are empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub index: usize,
    pub param: String,
    pub value: f64,
    pub p0: Option<f64>,
    pub pi: Option<f64>,
    pub p0_oma: Option<f64>,
    pub sum_rate_nnoma: Option<f64>,
    pub sum_rate_oma: Option<f64>,
    pub m_a: Option<usize>,
    pub poisson_tail: Option<f64>,
    pub overshoot: Option<f64>,
    pub series_tail_bound: Option<f64>,
    pub quad_delta: Option<f64>,
    pub mc_p0_hat: Option<f64>,
    pub mc_pi_hat: Option<f64>,
    pub mc_ci95_p0: Option<f64>,
    pub mc_ci95_pi: Option<f64>,
    pub mc_trials: Option<usize>,
    pub mc_seed: Option<u64>,
    pub wall_time_s: f64,
    pub error: Option<String>,
}

impl SweepRecord {
    fn empty(index: usize, param: &str, value: f64) -> Self {
        Self {
            index,
            param: param.into(),
            value,
            p0: None,
            pi: None,
            p0_oma: None,
            sum_rate_nnoma: None,
            sum_rate_oma: None,
            m_a: None,
            poisson_tail: None,
            overshoot: None,
            series_tail_bound: None,
            quad_delta: None,
            mc_p0_hat: None,
            mc_pi_hat: None,
            mc_ci95_p0: None,
            mc_ci95_pi: None,
            mc_trials: None,
            mc_seed: None,
            wall_time_s: 0.0,
            error: None,
        }
    }
}

/// Evaluates a single parameter point. `seed` is used as given.
pub fn run_point(
    index: usize,
    param: &str,
    value: f64,
    p: &SystemParams,
    cfg: &RunConfig,
    modes: Modes,
    seed: u64,
) -> SweepRecord {
    let start = Instant::now();
    let mut rec = SweepRecord::empty(index, param, value);
    let outcome = (|| -> Result<()> {
        if modes.analytic {
            let r = analyze(p, &cfg.accuracy)?;
            rec.p0 = Some(r.p0);
            rec.pi = Some(r.pi);
            rec.p0_oma = Some(r.p0_oma);
            rec.sum_rate_nnoma = Some(r.sum_rate_nnoma);
            rec.sum_rate_oma = Some(r.sum_rate_oma);
            rec.m_a = Some(r.m_a);
            rec.poisson_tail = Some(r.poisson_tail);
            rec.overshoot = Some(r.overshoot);
            rec.series_tail_bound = Some(r.series_tail_bound);
            rec.quad_delta = Some(r.quad_delta);
        }
        if modes.mc {
            let est = estimate_outage(p, cfg.mc.trials, seed, cfg.mc.window)?;
            rec.mc_p0_hat = Some(est.p0_hat);
            rec.mc_pi_hat = est.pi_hat;
            rec.mc_ci95_p0 = Some(est.ci95_p0);
            rec.mc_ci95_pi = est.ci95_pi;
            rec.mc_trials = Some(est.trials_used);
            rec.mc_seed = Some(seed);
        }
        Ok(())
    })();
    if let Err(e) = outcome {
        rec.error = Some(e.to_string());
    }
    rec.wall_time_s = start.elapsed().as_secs_f64();
    rec
}

/// One record per grid point, in grid order. Point `i` uses the MC seed
/// `root + i`, so any single point can be rerun on its own; a failing point
/// carries its error and the rest of the grid still runs.
pub fn run_sweep(spec: &SweepSpec) -> Vec<SweepRecord> {
    let values = spec.grid.values();
    values
        .par_iter()
        .enumerate()
        .map(|(i, &v)| {
            let seed = spec.base.mc.seed.wrapping_add(i as u64);
            match spec.param.apply(&spec.base.params, v) {
                Ok(p) => run_point(i, spec.param.name(), v, &p, &spec.base, spec.modes, seed),
                Err(e) => {
                    let mut rec = SweepRecord::empty(i, spec.param.name(), v);
                    rec.error = Some(e.to_string());
                    rec
                }
            }
        })
        .collect()
}
