//! Outage of the NOMA user served by a randomly chosen cooperating BS.
//!
//! The served user is the strongest of K cluster users, so its gain cdf is
//! F(z)^K with F(z) = 1 − Σ_n w_n e^{−c_n z}. Expanding the K-th power over
//! compositions (k_0, …, k_N) with w̃_0 = 1, c̃_0 = 0, w̃_n = −w_n leaves
//! exponentials e^{−ξz}, ξ = Σ k_n c̃_n, whose interference average is a
//! whole-plane PPP Laplace term times a correction for the empty disc of
//! radius R̄ around the CoMP user, averaged over the BS position d.

use std::cell::Cell;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{accurate_sum, AnalyticAccuracy};
use crate::error::{Error, Result};
use crate::params::{sic_feasible, SystemParams};
use crate::specfun::compositions::{composition_count, compositions, Composition};
use crate::specfun::gamma::beta_fn;
use crate::specfun::mixture::cluster_gain_mixture;
use crate::specfun::quadrature::{integrate, GaussLegendre};

/// Slack allowed on the arccos argument before the geometry is declared wrong.
const ARCCOS_SLACK: f64 = 1e-9;
/// Rounding floor added to the quadrature-difference diagnostic.
const QUAD_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NomaOutage {
    /// P_i clamped to [0, 1].
    pub value: f64,
    pub raw: f64,
    /// |P_i(q) − P_i(q/2)| + 1e-12 for the configured outer rule q.
    pub quad_delta: f64,
    /// max(ε₀/(β₀² − β₁²ε₀), ε_i/β₁²), the threshold both SIC stages share.
    pub eps_bar: f64,
}

impl NomaOutage {
    fn certain() -> Self {
        Self {
            value: 1.0,
            raw: 1.0,
            quad_delta: 0.0,
            eps_bar: f64::INFINITY,
        }
    }
}

/// Threshold on the served user's gain-to-interference ratio.
pub fn effective_threshold(p: &SystemParams) -> f64 {
    (p.eps0() / p.sic_margin()).max(p.epsi() / p.beta1_sq())
}

struct Evaluator<'a> {
    p: &'a SystemParams,
    eps_bar: f64,
    beta: f64,
}

impl Evaluator<'_> {
    /// Average over the BS distance d of the empty-disc correction at
    /// Laplace argument s, with the outer integral taken by `rule`.
    fn disc_correction(&self, s: f64, rule: &GaussLegendre) -> Result<f64> {
        let p = self.p;
        let (lo, hi, alpha, lambda_c) = (p.r_bar(), p.r_d(), p.alpha(), p.lambda_c());
        if lambda_c == 0.0 || s == 0.0 {
            return Ok(1.0);
        }
        let area = hi * hi - lo * lo;
        let bad_geometry = Cell::new(None);
        let mut total = Vec::with_capacity(rule.len());
        for (d, weight) in rule.mapped(lo, hi) {
            let inner = integrate(
                |r: f64| {
                    if r <= 0.0 {
                        return 0.0;
                    }
                    let cosine = (r * r + d * d - lo * lo) / (2.0 * r * d);
                    if cosine.abs() > 1.0 + ARCCOS_SLACK {
                        bad_geometry.set(Some(cosine));
                    }
                    r * s / (r.powf(alpha) + s) * cosine.clamp(-1.0, 1.0).acos()
                },
                d - lo,
                d + lo,
            )?;
            total.push(weight * 2.0 * d / area * (2.0 * lambda_c * inner).exp());
        }
        if let Some(c) = bad_geometry.get() {
            return Err(Error::Geometry(format!("arccos argument {c} outside [-1, 1]")));
        }
        Ok(accurate_sum(total))
    }

    /// exp(−2πλ_c s^{2/α} B(2/α, 1 − 2/α)/α): interference from the whole plane.
    fn whole_plane(&self, s: f64) -> f64 {
        let alpha = self.p.alpha();
        (-2.0 * PI * self.p.lambda_c() * s.powf(2.0 / alpha) * self.beta / alpha).exp()
    }

    /// Contribution of one composition under two outer rules.
    fn term(
        &self,
        comp: &Composition,
        weights: &[f64],
        rates: &[f64],
        rules: (&GaussLegendre, &GaussLegendre),
    ) -> Result<(f64, f64)> {
        let mut coefficient = comp.multinomial_f64();
        let mut xi = 0.0;
        for (n, &k) in comp.parts.iter().enumerate().filter(|(_, k)| **k > 0) {
            coefficient *= weights[n].powi(k as i32);
            coefficient *= (-(k as f64) * rates[n] * self.eps_bar * self.p.inv_rho()).exp();
            xi += k as f64 * rates[n];
        }
        let s = xi * self.eps_bar;
        let scale = coefficient * self.whole_plane(s);
        Ok((
            scale * self.disc_correction(s, rules.0)?,
            scale * self.disc_correction(s, rules.1)?,
        ))
    }
}

/// P_i, the outage of the NOMA user selected by the serving BS.
pub fn noma_outage(p: &SystemParams, acc: &AnalyticAccuracy) -> Result<NomaOutage> {
    acc.validate()?;
    if !sic_feasible(p) || p.beta1_sq() == 0.0 {
        return Ok(NomaOutage::certain());
    }
    let n_terms = acc.n_terms;
    let k_users = p.k_users();
    let count = composition_count(k_users, n_terms + 1).unwrap_or(u128::MAX);
    if count > acc.composition_budget {
        return Err(Error::Complexity {
            total: k_users,
            parts: n_terms + 1,
            count,
            budget: acc.composition_budget,
        });
    }
    let mix = cluster_gain_mixture(p, n_terms);
    let mut weights = vec![1.0];
    let mut rates = vec![0.0];
    for t in mix.terms() {
        weights.push(-t.weight);
        rates.push(t.rate);
    }
    let alpha = p.alpha();
    let eval = Evaluator {
        p,
        eps_bar: effective_threshold(p),
        beta: beta_fn(2.0 / alpha, (alpha - 2.0) / alpha),
    };
    let fine = GaussLegendre::new(acc.quad_points);
    let coarse = GaussLegendre::new((acc.quad_points / 2).max(1));

    let comps: Vec<Composition> = compositions(k_users, n_terms + 1)
        .filter(|c| c.parts[0] != k_users)
        .collect();
    let terms = comps
        .par_iter()
        .map(|c| eval.term(c, &weights, &rates, (&fine, &coarse)))
        .collect::<Result<Vec<_>>>()?;
    let (mut fine_terms, mut coarse_terms): (Vec<f64>, Vec<f64>) = terms.into_iter().unzip();
    fine_terms.push(1.0);
    coarse_terms.push(1.0);
    let raw = accurate_sum(fine_terms);
    let coarse_raw = accurate_sum(coarse_terms);
    Ok(NomaOutage {
        value: raw.clamp(0.0, 1.0),
        raw,
        quad_delta: (raw - coarse_raw).abs() + QUAD_FLOOR,
        eps_bar: eval.eps_bar,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::RawParams;
    use crate::specfun::mixture::normalization_slack;

    #[test]
    fn noiseless_empty_network_never_fails() {
        let p = RawParams {
            lambda_c: 0.0,
            noise_dbm_per_hz: f64::NEG_INFINITY,
            ..Default::default()
        }
        .build()
        .unwrap();
        let out = noma_outage(&p, &AnalyticAccuracy::default()).unwrap();
        // reduces to (1 − Σw_n)^K
        assert!(out.raw.abs() <= normalization_slack(10).powi(2) + 1e-15, "{out:?}");
    }

    #[test]
    fn single_user_single_term_hand_formula() {
        let p = RawParams {
            k_users: 1,
            lambda_c: 1e-5,
            ..Default::default()
        }
        .build()
        .unwrap();
        let acc = AnalyticAccuracy {
            n_terms: 1,
            ..Default::default()
        };
        let out = noma_outage(&p, &acc).unwrap();

        let mix = cluster_gain_mixture(&p, 1);
        let (w, c) = (mix.terms()[0].weight, mix.terms()[0].rate);
        let eps_bar = effective_threshold(&p);
        let s = c * eps_bar;
        let (lo, hi, lambda_c) = (p.r_bar(), p.r_d(), p.lambda_c());
        let whole = (-2.0 * PI * lambda_c * s.sqrt() * PI / 4.0).exp();
        let outer = integrate(
            |d: f64| {
                let inner = integrate(
                    |r: f64| {
                        let x = ((r * r + d * d - lo * lo) / (2.0 * r * d)).clamp(-1.0, 1.0);
                        r * s / (r.powi(4) + s) * x.acos()
                    },
                    d - lo,
                    d + lo,
                )
                .unwrap();
                2.0 * d / (hi * hi - lo * lo) * (2.0 * lambda_c * inner).exp()
            },
            lo,
            hi,
        )
        .unwrap();
        let expected = 1.0 - w * (-s * p.inv_rho()).exp() * whole * outer;
        assert!((out.raw - expected).abs() < 1e-8, "{} vs {expected}", out.raw);
    }

    #[test]
    fn oma_split_has_no_noma_user() {
        let p = RawParams {
            beta0_sq: 1.0,
            beta1_sq: 0.0,
            ..Default::default()
        }
        .build()
        .unwrap();
        assert_eq!(noma_outage(&p, &AnalyticAccuracy::default()).unwrap().value, 1.0);
    }

    #[test]
    fn threshold_branches() {
        let p = RawParams::default().build().unwrap();
        // ε_i/β₁² = 1.8284/0.2 dominates ε₀/(β₀² − β₁²ε₀) at the defaults
        assert!((effective_threshold(&p) - p.epsi() / 0.2).abs() < 1e-12);
    }

    #[test]
    fn grows_with_density() {
        let acc = AnalyticAccuracy::default();
        let values: Vec<f64> = [1e-6, 1e-5, 5e-5]
            .iter()
            .map(|&lambda_c| {
                let p = RawParams {
                    lambda_c,
                    ..Default::default()
                }
                .build()
                .unwrap();
                noma_outage(&p, &acc).unwrap().value
            })
            .collect();
        assert!(values.windows(2).all(|w| w[0] < w[1]), "{values:?}");
    }
}
