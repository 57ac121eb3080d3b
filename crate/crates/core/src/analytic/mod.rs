//! Closed-form outage probabilities, the power-split turning point and the
//! per-BS outage sum rate.

mod comp;
mod noma;
mod rates;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::SystemParams;

pub use comp::{comp_outage, comp_outage_conditional, poisson_count_pmf, poisson_upper_tail, CompOutage};
pub use noma::{noma_outage, NomaOutage};
pub use rates::{analyze, outage_sum_rate, turning_point, OutageReport, SumRates};

/// How the incomplete-gamma factor of each pole term is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GammaSeries {
    /// Σ_{k=0}^{K_A} of the series, as in the published expression.
    Truncated(usize),
    /// The finite closed form γ(j, x)/Γ(j) = 1 − Σ_{l<j} xˡe^{−x}/l!.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CompMethod {
    /// Sums the multinomial expansion analytically: the partial fractions of
    /// (Σ_n w_n d_n/(s+d_n))^m pole by pole. Cost O(N·m²) per m.
    PoleAggregated,
    /// Enumerates every composition of m and its residue table; bounded by
    /// [`AnalyticAccuracy::composition_budget`].
    Compositions,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticAccuracy {
    /// Chebyshev terms N in both mixtures.
    pub n_terms: usize,
    /// Poisson-count truncation M_A; `None` picks it from the mean.
    pub m_a: Option<usize>,
    pub k_a: GammaSeries,
    /// Outer Gauss–Legendre points for the NOMA-user integral.
    pub quad_points: usize,
    pub method: CompMethod,
    /// Largest number of compositions either enumerating path may visit.
    pub composition_budget: u128,
    /// Poisson tail mass the automatic M_A must get below.
    pub tail_bound: f64,
}

impl Default for AnalyticAccuracy {
    fn default() -> Self {
        Self {
            n_terms: 10,
            m_a: None,
            k_a: GammaSeries::Truncated(5),
            quad_points: 64,
            method: CompMethod::PoleAggregated,
            composition_budget: 5_000_000,
            tail_bound: 1e-4,
        }
    }
}

impl AnalyticAccuracy {
    pub fn validate(&self) -> Result<()> {
        if self.n_terms < 1 {
            return Err(Error::Validation("N must be at least 1".into()));
        }
        if self.m_a == Some(0) {
            return Err(Error::Validation("M_A must be at least 1".into()));
        }
        if self.k_a == GammaSeries::Truncated(0) {
            return Err(Error::Validation("K_A must be at least 1".into()));
        }
        if self.quad_points < 2 {
            return Err(Error::Validation("quad_points must be at least 2".into()));
        }
        if !(self.tail_bound > 0.0 && self.tail_bound < 1.0) {
            return Err(Error::Validation("tail_bound must lie in (0, 1)".into()));
        }
        Ok(())
    }

    /// M_A = ⌈mean + 6√mean⌉, raised until the Poisson tail is below
    /// `tail_bound`; an explicit setting is used as given.
    pub fn resolve_m_a(&self, p: &SystemParams) -> usize {
        if let Some(m) = self.m_a {
            return m;
        }
        let mean = p.mean_coop();
        let mut m = ((mean + 6.0 * mean.sqrt()).ceil() as usize).max(1);
        while poisson_upper_tail(m, mean) >= self.tail_bound {
            m += 1;
        }
        m
    }
}

/// Sum ordered by increasing magnitude with Neumaier compensation, so the
/// result does not depend on the order the terms were produced in.
pub(crate) fn accurate_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let mut sum = 0.0;
    let mut comp = 0.0;
    for x in terms {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
