//! System parameters, unit conversions and derived link-budget constants.
//!
//! Everything downstream works in SI units (m, W, Hz). Decibel quantities only
//! appear in [`RawParams`], which is what configuration files map onto.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

const BETA_SUM_TOL: f64 = 1e-12;

/// Names of every raw parameter, in configuration-file spelling.
pub const PARAM_KEYS: [&str; 14] = [
    "lambda_c",
    "K",
    "R_c",
    "R_bar",
    "R_D",
    "alpha",
    "f_c",
    "P_s_dbm",
    "noise_dbm_per_hz",
    "bandwidth_hz",
    "beta0_sq",
    "beta1_sq",
    "R0_bpcu",
    "Ri_bpcu",
];

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

/// SINR threshold for a target rate in bits per channel use.
pub fn rate_to_threshold(bpcu: f64) -> f64 {
    2f64.powf(bpcu) - 1.0
}

/// Unvalidated physical and protocol parameters.
///
/// `Default` gives the reference evaluation point: f_c = 2 GHz, −170 dBm/Hz
/// noise over 10 MHz, α = 4, β₀² = 4/5, R_c = 30 m, R_D = 500 m, R̄ = 100 m,
/// P_s = 30 dBm, with λ_c = 1e-5, K = 2, R₀ = 0.5 and R_i = 1.5.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawParams {
    /// BS density, points per m².
    pub lambda_c: f64,
    /// NOMA users per cluster.
    pub k_users: usize,
    pub r_c: f64,
    pub r_bar: f64,
    pub r_d: f64,
    pub alpha: f64,
    pub f_c: f64,
    pub p_s_dbm: f64,
    pub noise_dbm_per_hz: f64,
    pub bandwidth_hz: f64,
    pub beta0_sq: f64,
    pub beta1_sq: f64,
    pub r0_bpcu: f64,
    pub ri_bpcu: f64,
}

impl Default for RawParams {
    fn default() -> Self {
        Self {
            lambda_c: 1e-5,
            k_users: 2,
            r_c: 30.0,
            r_bar: 100.0,
            r_d: 500.0,
            alpha: 4.0,
            f_c: 2e9,
            p_s_dbm: 30.0,
            noise_dbm_per_hz: -170.0,
            bandwidth_hz: 10e6,
            beta0_sq: 0.8,
            beta1_sq: 0.2,
            r0_bpcu: 0.5,
            ri_bpcu: 1.5,
        }
    }
}

impl RawParams {
    /// Sets a parameter by its configuration key.
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        match key {
            "lambda_c" => self.lambda_c = value,
            "K" => {
                if value < 1.0 || value.fract() != 0.0 || !value.is_finite() {
                    return Err(Error::Validation(format!("K must be a positive integer, got {value}")));
                }
                self.k_users = value as usize;
            }
            "R_c" => self.r_c = value,
            "R_bar" => self.r_bar = value,
            "R_D" => self.r_d = value,
            "alpha" => self.alpha = value,
            "f_c" => self.f_c = value,
            "P_s_dbm" => self.p_s_dbm = value,
            "noise_dbm_per_hz" => self.noise_dbm_per_hz = value,
            "bandwidth_hz" => self.bandwidth_hz = value,
            "beta0_sq" => self.beta0_sq = value,
            "beta1_sq" => self.beta1_sq = value,
            "R0_bpcu" => self.r0_bpcu = value,
            "Ri_bpcu" => self.ri_bpcu = value,
            other => return Err(Error::Validation(format!("unknown parameter `{other}`"))),
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        Some(match key {
            "lambda_c" => self.lambda_c,
            "K" => self.k_users as f64,
            "R_c" => self.r_c,
            "R_bar" => self.r_bar,
            "R_D" => self.r_d,
            "alpha" => self.alpha,
            "f_c" => self.f_c,
            "P_s_dbm" => self.p_s_dbm,
            "noise_dbm_per_hz" => self.noise_dbm_per_hz,
            "bandwidth_hz" => self.bandwidth_hz,
            "beta0_sq" => self.beta0_sq,
            "beta1_sq" => self.beta1_sq,
            "R0_bpcu" => self.r0_bpcu,
            "Ri_bpcu" => self.ri_bpcu,
            _ => return None,
        })
    }

    pub fn build(&self) -> Result<SystemParams> {
        SystemParams::new(self.clone())
    }
}

/// Builds validated parameters from a complete key → value mapping.
///
/// Every key in [`PARAM_KEYS`] must be present; defaults are applied by the
/// configuration layer, not here.
pub fn build_params(raw: &BTreeMap<String, f64>) -> Result<SystemParams> {
    let mut params = RawParams::default();
    for key in PARAM_KEYS {
        let value = *raw.get(key).ok_or_else(|| Error::MissingKey(key.to_string()))?;
        params.set(key, value)?;
    }
    if let Some(extra) = raw.keys().find(|k| !PARAM_KEYS.contains(&k.as_str())) {
        return Err(Error::Validation(format!("unknown parameter `{extra}`")));
    }
    params.build()
}

/// Validated parameters together with their derived constants.
///
/// Immutable once built; use [`SystemParams::with`] to derive a modified copy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemParams {
    raw: RawParams,
    eta: f64,
    p_s_w: f64,
    sigma_sq_w: f64,
    rho: f64,
    inv_rho: f64,
    eps0: f64,
    epsi: f64,
    s_c: f64,
}

impl SystemParams {
    pub fn new(raw: RawParams) -> Result<Self> {
        validate(&raw)?;
        let eta = SPEED_OF_LIGHT * SPEED_OF_LIGHT / (16.0 * PI * PI * raw.f_c * raw.f_c);
        let p_s_w = dbm_to_watts(raw.p_s_dbm);
        let sigma_sq_w = dbm_to_watts(raw.noise_dbm_per_hz) * raw.bandwidth_hz;
        let rho = eta * p_s_w / sigma_sq_w;
        let inv_rho = sigma_sq_w / (eta * p_s_w);
        let eps0 = rate_to_threshold(raw.r0_bpcu);
        let epsi = rate_to_threshold(raw.ri_bpcu);
        let s_c = PI * (raw.r_d * raw.r_d - raw.r_bar * raw.r_bar);
        Ok(Self {
            raw,
            eta,
            p_s_w,
            sigma_sq_w,
            rho,
            inv_rho,
            eps0,
            epsi,
            s_c,
        })
    }

    /// Returns a validated copy with `edit` applied to the raw parameters.
    pub fn with(&self, edit: impl FnOnce(&mut RawParams)) -> Result<Self> {
        let mut raw = self.raw.clone();
        edit(&mut raw);
        Self::new(raw)
    }

    pub fn raw(&self) -> &RawParams {
        &self.raw
    }
    pub fn lambda_c(&self) -> f64 {
        self.raw.lambda_c
    }
    pub fn k_users(&self) -> usize {
        self.raw.k_users
    }
    pub fn r_c(&self) -> f64 {
        self.raw.r_c
    }
    pub fn r_bar(&self) -> f64 {
        self.raw.r_bar
    }
    pub fn r_d(&self) -> f64 {
        self.raw.r_d
    }
    pub fn alpha(&self) -> f64 {
        self.raw.alpha
    }
    pub fn beta0_sq(&self) -> f64 {
        self.raw.beta0_sq
    }
    pub fn beta1_sq(&self) -> f64 {
        self.raw.beta1_sq
    }
    pub fn r0_bpcu(&self) -> f64 {
        self.raw.r0_bpcu
    }
    pub fn ri_bpcu(&self) -> f64 {
        self.raw.ri_bpcu
    }
    /// Path-loss constant c²/(16π²f_c²).
    pub fn eta(&self) -> f64 {
        self.eta
    }
    pub fn p_s_watts(&self) -> f64 {
        self.p_s_w
    }
    pub fn sigma_sq_w(&self) -> f64 {
        self.sigma_sq_w
    }
    /// Transmit SNR ηP_s/σ² (linear); infinite for a noiseless link.
    pub fn rho(&self) -> f64 {
        self.rho
    }
    /// 1/ρ, exactly zero for a noiseless link.
    pub fn inv_rho(&self) -> f64 {
        self.inv_rho
    }
    pub fn eps0(&self) -> f64 {
        self.eps0
    }
    pub fn epsi(&self) -> f64 {
        self.epsi
    }
    /// Area of the cooperation annulus, m².
    pub fn s_c(&self) -> f64 {
        self.s_c
    }
    /// Mean number of cooperating BSs, λ_c·S_C.
    pub fn mean_coop(&self) -> f64 {
        self.raw.lambda_c * self.s_c
    }

    /// β₀² − β₁²ε₀, the margin left for the CoMP signal after SIC.
    pub fn sic_margin(&self) -> f64 {
        self.raw.beta0_sq - self.raw.beta1_sq * self.eps0
    }
}

/// True iff the CoMP signal is decodable at some SINR, i.e. β₀² > β₁²ε₀.
pub fn sic_feasible(p: &SystemParams) -> bool {
    p.sic_margin() > 0.0
}

fn validate(raw: &RawParams) -> Result<()> {
    let fail = |msg: String| Err(Error::Validation(msg));
    let finite = [
        ("lambda_c", raw.lambda_c),
        ("R_c", raw.r_c),
        ("R_bar", raw.r_bar),
        ("R_D", raw.r_d),
        ("alpha", raw.alpha),
        ("f_c", raw.f_c),
        ("P_s_dbm", raw.p_s_dbm),
        ("bandwidth_hz", raw.bandwidth_hz),
        ("beta0_sq", raw.beta0_sq),
        ("beta1_sq", raw.beta1_sq),
        ("R0_bpcu", raw.r0_bpcu),
        ("Ri_bpcu", raw.ri_bpcu),
    ];
    if let Some((name, _)) = finite.iter().find(|(_, v)| !v.is_finite()) {
        return fail(format!("{name} must be finite"));
    }
    // -inf dBm/Hz is accepted and means a noiseless receiver.
    if raw.noise_dbm_per_hz.is_nan() || raw.noise_dbm_per_hz == f64::INFINITY {
        return fail("noise_dbm_per_hz must be a number below +inf".into());
    }
    if !(0.0..=1.0).contains(&raw.beta0_sq) || !(0.0..=1.0).contains(&raw.beta1_sq) {
        return fail("beta coefficients must lie in [0, 1]".into());
    }
    if (raw.beta0_sq + raw.beta1_sq - 1.0).abs() > BETA_SUM_TOL {
        return fail("beta coefficients must sum to 1".into());
    }
    if raw.alpha <= 2.0 {
        return fail("alpha must exceed 2".into());
    }
    if raw.r_bar <= 0.0 || raw.r_bar >= raw.r_d {
        return fail("radii must satisfy 0 < R_bar < R_D".into());
    }
    if raw.r_c <= 0.0 {
        return fail("R_c must be positive".into());
    }
    if raw.lambda_c < 0.0 {
        return fail("lambda_c must be nonnegative".into());
    }
    if raw.k_users < 1 {
        return fail("K must be at least 1".into());
    }
    if raw.f_c <= 0.0 || raw.bandwidth_hz <= 0.0 {
        return fail("f_c and bandwidth_hz must be positive".into());
    }
    if raw.r0_bpcu <= 0.0 || raw.ri_bpcu <= 0.0 {
        return fail("target rates must be positive".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn full_map() -> BTreeMap<String, f64> {
        let raw = RawParams::default();
        PARAM_KEYS
            .iter()
            .map(|k| (k.to_string(), raw.get(k).unwrap()))
            .collect()
    }

    #[test]
    fn eta_at_two_ghz() {
        let p = RawParams::default().build().unwrap();
        assert_relative_eq!(p.eta(), 1.4229e-4, max_relative = 1e-4);
    }

    #[test]
    fn rho_and_noise_power() {
        let p = RawParams::default().build().unwrap();
        assert_relative_eq!(p.sigma_sq_w(), 1e-13, max_relative = 1e-12);
        assert_relative_eq!(p.p_s_watts(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(p.rho(), 1.4229e9, max_relative = 1e-4);
        assert_relative_eq!(p.inv_rho() * p.rho(), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn annulus_area() {
        let p = RawParams::default().build().unwrap();
        assert_relative_eq!(p.s_c(), PI * 240_000.0, max_relative = 1e-15);
        assert_relative_eq!(p.s_c(), 7.5398e5, max_relative = 1e-4);
    }

    #[test]
    fn beta_sum_violation() {
        let raw = RawParams {
            beta0_sq: 0.5,
            beta1_sq: 0.6,
            ..Default::default()
        };
        let err = raw.build().unwrap_err();
        assert_eq!(err, Error::Validation("beta coefficients must sum to 1".into()));
    }

    #[test]
    fn alpha_must_exceed_two() {
        let raw = RawParams {
            alpha: 1.5,
            ..Default::default()
        };
        assert!(raw.build().unwrap_err().to_string().contains("alpha must exceed 2"));
    }

    #[test]
    fn build_params_names_missing_key() {
        let mut map = full_map();
        map.remove("R_D");
        assert_eq!(build_params(&map).unwrap_err(), Error::MissingKey("R_D".into()));
        assert!(build_params(&full_map()).is_ok());
    }

    #[test]
    fn build_params_rejects_unknown_key() {
        let mut map = full_map();
        map.insert("gamma".into(), 1.0);
        assert!(build_params(&map).is_err());
    }

    #[test]
    fn noiseless_receiver() {
        let raw = RawParams {
            noise_dbm_per_hz: f64::NEG_INFINITY,
            ..Default::default()
        };
        let p = raw.build().unwrap();
        assert_eq!(p.inv_rho(), 0.0);
        assert!(p.rho().is_infinite());
    }

    #[test]
    fn sic_feasibility_examples() {
        let p = RawParams::default().build().unwrap();
        assert!((p.eps0() - 0.41421).abs() < 1e-5);
        assert!(sic_feasible(&p));

        let bad = p
            .with(|r| {
                r.beta0_sq = 0.2;
                r.beta1_sq = 0.8;
                r.r0_bpcu = 1.0;
            })
            .unwrap();
        assert!((bad.eps0() - 1.0).abs() < 1e-15);
        assert!(!sic_feasible(&bad));

        let oma = p
            .with(|r| {
                r.beta0_sq = 1.0;
                r.beta1_sq = 0.0;
                r.r0_bpcu = 20.0;
            })
            .unwrap();
        assert!(sic_feasible(&oma));
    }

    #[test]
    fn derived_fields_are_pure() {
        let p = RawParams::default().build().unwrap();
        let q = SystemParams::new(p.raw().clone()).unwrap();
        assert_eq!(p, q);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn dbm_round_trip(dbm in -200.0f64..100.0) {
                let back = watts_to_dbm(dbm_to_watts(dbm));
                prop_assert!((back - dbm).abs() <= 1e-12 * dbm.abs().max(1.0));
            }

            #[test]
            fn feasibility_monotone_in_beta0(b0 in 0.0f64..1.0, step in 0.0f64..1.0, r0 in 0.01f64..4.0) {
                let b0_hi = b0 + (1.0 - b0) * step;
                let make = |b: f64| RawParams {
                    beta0_sq: b,
                    beta1_sq: 1.0 - b,
                    r0_bpcu: r0,
                    ..Default::default()
                }
                .build()
                .unwrap();
                if sic_feasible(&make(b0)) {
                    prop_assert!(sic_feasible(&make(b0_hi)));
                }
            }
        }
    }
}
