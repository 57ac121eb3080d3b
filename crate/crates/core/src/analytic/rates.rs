//! Power-split turning point, outage sum rate and the combined report.

use serde::{Deserialize, Serialize};

use super::{comp_outage, noma_outage, AnalyticAccuracy, CompOutage, NomaOutage};
use crate::error::Result;
use crate::params::SystemParams;

/// β₀² at which ε₀/(β₀² − β₁²ε₀) = ε_i/β₁² with β₁² = 1 − β₀²:
/// (ε₀ + ε_iε₀)/(ε₀ + ε_iε₀ + ε_i).
pub fn turning_point(eps0: f64, epsi: f64) -> f64 {
    assert!(eps0 > 0.0 && epsi > 0.0, "thresholds must be positive");
    let num = eps0 + epsi * eps0;
    num / (num + epsi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SumRates {
    /// Bits per channel use per BS with network NOMA.
    pub nnoma: f64,
    /// Same metric when only the CoMP user is served (β₀² = 1).
    pub oma: f64,
    pub p0: f64,
    pub p0_oma: f64,
    pub pi: f64,
}

/// 1 − e^{−λ_cS_C}: probability that at least one BS cooperates.
fn p_m_positive(p: &SystemParams) -> f64 {
    -(-p.mean_coop()).exp_m1()
}

/// The CoMP rate shared among the λ_cS_C cooperating BSs plus the NOMA rate
/// of the one BS that serves a cluster user. Zero for an empty network.
fn per_bs_rates(p: &SystemParams, p0: f64, p0_oma: f64, pi: f64) -> (f64, f64) {
    let mean = p.mean_coop();
    if mean == 0.0 {
        return (0.0, 0.0);
    }
    let r0 = p.r0_bpcu();
    let nnoma = (1.0 - p0) * r0 / mean + p_m_positive(p) * (1.0 - pi) * p.ri_bpcu();
    let oma = (1.0 - p0_oma) * r0 / mean;
    (nnoma, oma)
}

fn oma_params(p: &SystemParams) -> Result<SystemParams> {
    p.with(|raw| {
        raw.beta0_sq = 1.0;
        raw.beta1_sq = 0.0;
    })
}

pub fn outage_sum_rate(p: &SystemParams, acc: &AnalyticAccuracy) -> Result<SumRates> {
    let p0 = comp_outage(p, acc)?.value;
    let p0_oma = comp_outage(&oma_params(p)?, acc)?.value;
    let pi = noma_outage(p, acc)?.value;
    let (nnoma, oma) = per_bs_rates(p, p0, p0_oma, pi);
    Ok(SumRates {
        nnoma,
        oma,
        p0,
        p0_oma,
        pi,
    })
}

/// Everything the analytic side reports for one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutageReport {
    pub p0: f64,
    pub pi: f64,
    pub p0_raw: f64,
    pub pi_raw: f64,
    pub p0_oma: f64,
    pub m_a: usize,
    pub poisson_tail: f64,
    pub overshoot: f64,
    pub series_tail_bound: f64,
    pub quad_delta: f64,
    pub sum_rate_nnoma: f64,
    pub sum_rate_oma: f64,
    pub p_m_positive: f64,
}

pub fn analyze(p: &SystemParams, acc: &AnalyticAccuracy) -> Result<OutageReport> {
    let comp: CompOutage = comp_outage(p, acc)?;
    let oma = comp_outage(&oma_params(p)?, acc)?;
    let noma: NomaOutage = noma_outage(p, acc)?;
    let (sum_rate_nnoma, sum_rate_oma) = per_bs_rates(p, comp.value, oma.value, noma.value);
    let outside = |v: f64| (v - 1.0).max(-v).max(0.0);
    Ok(OutageReport {
        p0: comp.value,
        pi: noma.value,
        p0_raw: comp.raw,
        pi_raw: noma.raw,
        p0_oma: oma.value,
        m_a: comp.m_a,
        poisson_tail: comp.poisson_tail,
        overshoot: comp.overshoot.max(outside(noma.raw)),
        series_tail_bound: comp.series_tail_bound,
        quad_delta: noma.quad_delta,
        sum_rate_nnoma,
        sum_rate_oma,
        p_m_positive: p_m_positive(p),
    })
}
