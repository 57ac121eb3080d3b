//! Outage of the CoMP user.
//!
//! Conditioned on m cooperating BSs the combined gain has Laplace transform
//! Q(s)^m with Q(s) = Σ_n w_n d_n/(s + d_n). Each partial fraction
//! (d_n/(s+d_n))^j is an Erlang(j, d_n) law, whose cdf averaged over the
//! interference is γ(j, x)/Γ(j) with x = μ_n(I + 1/ρ), μ_n = d_n ε₀/(β₀² − β₁²ε₀).
//! In terms of ℓ_l = E[xˡe^{−x}/l!] that average is Σ_{l≥j} ℓ_l.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{accurate_sum, AnalyticAccuracy, CompMethod, GammaSeries};
use crate::error::{Error, Result};
use crate::params::{sic_feasible, SystemParams};
use crate::specfun::compositions::{composition_count, compositions, ln_factorial};
use crate::specfun::laplace::scaled_laplace_derivatives;
use crate::specfun::mixture::{coop_gain_mixture, ExpMixture};
use crate::specfun::residues::residues;

/// Pr(M = m) for the Poisson number of cooperating BSs.
pub fn poisson_count_pmf(m: usize, p: &SystemParams) -> f64 {
    pmf(m, p.mean_coop())
}

fn pmf(m: usize, mean: f64) -> f64 {
    if mean == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    (m as f64 * mean.ln() - mean - ln_factorial(m)).exp()
}

/// Σ_{k>m} Pr(M = k), summed upward so small tails keep full precision.
pub fn poisson_upper_tail(m: usize, mean: f64) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    let mut k = m + 1;
    let mut term = pmf(k, mean);
    let mut sum = 0.0;
    loop {
        sum += term;
        k += 1;
        term *= mean / k as f64;
        if (k as f64 > mean && term <= 1e-18 * sum) || term == 0.0 {
            break;
        }
    }
    sum
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompOutage {
    /// P₀ clamped to [0, 1].
    pub value: f64,
    /// P₀ before clamping, built from the unclamped conditional values.
    pub raw: f64,
    pub m_a: usize,
    /// Σ_{m>M_A} Pr(M = m); that mass is assigned the outage P_{0,M_A}.
    pub poisson_tail: f64,
    /// Largest distance outside [0, 1] of any unclamped conditional value
    /// or of the total.
    pub overshoot: f64,
    /// Upper bound on |P₀(exact γ) − P₀(K_A-truncated γ)|; zero for the
    /// exact mode.
    pub series_tail_bound: f64,
    /// Unclamped P_{0,m} for m = 0…M_A.
    pub conditional: Vec<f64>,
}

impl CompOutage {
    fn certain() -> Self {
        Self {
            value: 1.0,
            raw: 1.0,
            m_a: 0,
            poisson_tail: 0.0,
            overshoot: 0.0,
            series_tail_bound: 0.0,
            conditional: vec![1.0],
        }
    }
}

/// ℓ_0…ℓ_L at μ_n for every mixture pole.
struct PoleSeries {
    ell: Vec<Vec<f64>>,
}

impl PoleSeries {
    fn new(mix: &ExpMixture, p: &SystemParams, max_order: usize) -> Result<Self> {
        let scale = p.eps0() / p.sic_margin();
        let ell = mix
            .terms()
            .par_iter()
            .map(|t| scaled_laplace_derivatives(t.rate * scale, max_order, p))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { ell })
    }

    /// E[γ(j, x)/Γ(j)] at pole n under the configured series.
    fn gamma_term(&self, n: usize, j: usize, k_a: GammaSeries) -> f64 {
        let ell = &self.ell[n];
        match k_a {
            GammaSeries::Truncated(k) => accurate_sum(ell[j..=j + k].to_vec()),
            GammaSeries::Exact => {
                let mut terms: Vec<f64> = ell[..j].iter().map(|x| -x).collect();
                terms.push(1.0);
                accurate_sum(terms)
            }
        }
    }

    /// 1 − Σ_{l≤j+K_A} ℓ_l ≥ 0: what the truncated series leaves out.
    fn series_remainder(&self, n: usize, j: usize, k_a: GammaSeries) -> f64 {
        match k_a {
            GammaSeries::Truncated(k) => {
                let mut terms: Vec<f64> = self.ell[n][..=j + k].iter().map(|x| -x).collect();
                terms.push(1.0);
                accurate_sum(terms).max(0.0)
            }
            GammaSeries::Exact => 0.0,
        }
    }
}

fn series_order(m_max: usize, k_a: GammaSeries) -> usize {
    match k_a {
        GammaSeries::Truncated(k) => m_max + k,
        GammaSeries::Exact => m_max,
    }
}

/// Taylor coefficients of G(t) = w_n + t·Σ_{l≠n} w_l ρ_l/(ρ_l − 1 + t) up
/// to degree `degree`, with ρ_l = d_l/d_n; Q(s)^m = t^{−m}G(t)^m when
/// s + d_n = d_n t.
fn pole_generator(mix: &ExpMixture, n: usize, degree: usize) -> Vec<f64> {
    let terms = mix.terms();
    let d_n = terms[n].rate;
    let mut g = vec![0.0; degree + 1];
    g[0] = terms[n].weight;
    for (l, t) in terms.iter().enumerate() {
        if l == n {
            continue;
        }
        let ratio = t.rate / d_n;
        let shift = ratio - 1.0;
        let mut inv = 1.0 / shift;
        for (p, slot) in g.iter_mut().enumerate().skip(1) {
            let sign = if (p - 1) % 2 == 0 { 1.0 } else { -1.0 };
            *slot += sign * t.weight * ratio * inv;
            inv /= shift;
        }
    }
    g
}

/// Conditional outages P_{0,m} (m = 1…m_max) together with the per-m bound
/// on the K_A truncation, by the pole-aggregated route.
fn conditional_aggregated(
    mix: &ExpMixture,
    series: &PoleSeries,
    m_max: usize,
    k_a: GammaSeries,
) -> (Vec<f64>, Vec<f64>) {
    let per_pole: Vec<(Vec<f64>, Vec<f64>)> = (0..mix.len())
        .into_par_iter()
        .map(|n| {
            let degree = m_max.saturating_sub(1);
            let g = pole_generator(mix, n, degree);
            let mut power = vec![0.0; degree + 1];
            power[0] = 1.0;
            let mut values = Vec::with_capacity(m_max);
            let mut bounds = Vec::with_capacity(m_max);
            for m in 1..=m_max {
                power = truncated_product(&power, &g, degree);
                // coefficient of (d_n/(s+d_n))^j is [t^{m−j}] G^m
                let mut terms = Vec::with_capacity(m);
                let mut bound = Vec::with_capacity(m);
                for j in 1..=m {
                    let b = power[m - j];
                    terms.push(b * series.gamma_term(n, j, k_a));
                    bound.push(b.abs() * series.series_remainder(n, j, k_a));
                }
                values.push(accurate_sum(terms));
                bounds.push(accurate_sum(bound));
            }
            (values, bounds)
        })
        .collect();
    let values = (0..m_max)
        .map(|i| accurate_sum(per_pole.iter().map(|(v, _)| v[i]).collect()))
        .collect();
    let bounds = (0..m_max)
        .map(|i| accurate_sum(per_pole.iter().map(|(_, b)| b[i]).collect()))
        .collect();
    (values, bounds)
}

fn truncated_product(a: &[f64], b: &[f64], degree: usize) -> Vec<f64> {
    (0..=degree)
        .map(|k| accurate_sum((0..=k).map(|i| a[i] * b[k - i]).collect()))
        .collect()
}

/// P_{0,m} and its truncation bound by enumerating compositions of m.
fn conditional_by_compositions(
    mix: &ExpMixture,
    series: &PoleSeries,
    m: usize,
    acc: &AnalyticAccuracy,
) -> Result<(f64, f64)> {
    let parts = mix.len();
    let count = composition_count(m, parts).unwrap_or(u128::MAX);
    if count > acc.composition_budget {
        return Err(Error::Complexity {
            total: m,
            parts,
            count,
            budget: acc.composition_budget,
        });
    }
    let mut terms = Vec::new();
    let mut bound = Vec::new();
    for comp in compositions(m, parts) {
        let table = residues(&comp, mix)?;
        let multinomial = comp.multinomial_f64();
        for pole in &table.poles {
            for i in 0..pole.multiplicity {
                let j = pole.multiplicity - i;
                let coefficient = multinomial * pole.scaled(i);
                terms.push(coefficient * series.gamma_term(pole.index, j, acc.k_a));
                bound.push(coefficient.abs() * series.series_remainder(pole.index, j, acc.k_a));
            }
        }
    }
    Ok((accurate_sum(terms), accurate_sum(bound)))
}

fn conditional_values(p: &SystemParams, acc: &AnalyticAccuracy, m_max: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mix = coop_gain_mixture(p, acc.n_terms);
    let series = PoleSeries::new(&mix, p, series_order(m_max, acc.k_a))?;
    let (mut values, mut bounds) = match acc.method {
        CompMethod::PoleAggregated => conditional_aggregated(&mix, &series, m_max, acc.k_a),
        CompMethod::Compositions => {
            let pairs = (1..=m_max)
                .into_par_iter()
                .map(|m| conditional_by_compositions(&mix, &series, m, acc))
                .collect::<Result<Vec<_>>>()?;
            pairs.into_iter().unzip()
        }
    };
    values.insert(0, 1.0);
    bounds.insert(0, 0.0);
    Ok((values, bounds))
}

/// P_{0,m}, the CoMP outage given m cooperating BSs, clamped to [0, 1].
pub fn comp_outage_conditional(m: usize, p: &SystemParams, acc: &AnalyticAccuracy) -> Result<f64> {
    acc.validate()?;
    if m == 0 || !sic_feasible(p) {
        return Ok(1.0);
    }
    let value = match acc.method {
        CompMethod::PoleAggregated => conditional_values(p, acc, m)?.0[m],
        CompMethod::Compositions => {
            let mix = coop_gain_mixture(p, acc.n_terms);
            let series = PoleSeries::new(&mix, p, series_order(m, acc.k_a))?;
            conditional_by_compositions(&mix, &series, m, acc)?.0
        }
    };
    Ok(value.clamp(0.0, 1.0))
}

/// P₀ = Σ_m Pr(M = m)·P_{0,m}, truncated at M_A.
pub fn comp_outage(p: &SystemParams, acc: &AnalyticAccuracy) -> Result<CompOutage> {
    acc.validate()?;
    if !sic_feasible(p) {
        return Ok(CompOutage::certain());
    }
    let m_a = acc.resolve_m_a(p);
    let mean = p.mean_coop();
    let (values, bounds) = conditional_values(p, acc, m_a)?;
    let weights: Vec<f64> = (0..=m_a).map(|m| pmf(m, mean)).collect();
    let tail = poisson_upper_tail(m_a, mean);

    let weighted = |f: &dyn Fn(f64) -> f64| {
        let mut terms: Vec<f64> = weights.iter().zip(&values).map(|(w, v)| w * f(*v)).collect();
        terms.push(tail * f(values[m_a]));
        accurate_sum(terms)
    };
    let raw = weighted(&|v| v);
    let clamped = weighted(&|v| v.clamp(0.0, 1.0));
    let mut bound_terms: Vec<f64> = weights.iter().zip(&bounds).map(|(w, b)| w * b).collect();
    bound_terms.push(tail * bounds[m_a]);

    let outside = |v: f64| (v - 1.0).max(-v).max(0.0);
    let overshoot = values.iter().map(|&v| outside(v)).fold(outside(raw), f64::max);
    Ok(CompOutage {
        value: clamped.clamp(0.0, 1.0),
        raw,
        m_a,
        poisson_tail: tail,
        overshoot,
        series_tail_bound: accurate_sum(bound_terms),
        conditional: values,
    })
}
