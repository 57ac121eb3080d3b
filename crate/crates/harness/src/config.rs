//! Flat `key = value` run configuration.
//!
//! One file carries the physical parameters, the analytic accuracy knobs, the
//! Monte-Carlo settings and optionally a sweep recipe. `#` starts a comment.
//! Keys that are not given keep the reference defaults; giving only one of
//! `beta0_sq` / `beta1_sq` sets the other to its complement.

use std::collections::BTreeSet;
use std::path::Path;
use std::str::FromStr;

use nnoma_core::analytic::{AnalyticAccuracy, CompMethod, GammaSeries};
use nnoma_core::params::PARAM_KEYS;
use nnoma_core::sim::DEFAULT_WINDOW;
use nnoma_core::{RawParams, SystemParams};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McSettings {
    pub trials: usize,
    pub seed: u64,
    pub window: f64,
}

impl Default for McSettings {
    fn default() -> Self {
        Self {
            trials: 200_000,
            seed: 1,
            window: DEFAULT_WINDOW,
        }
    }
}

/// Which evaluators a sweep runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Modes {
    pub analytic: bool,
    pub mc: bool,
}

impl Modes {
    pub const BOTH: Modes = Modes {
        analytic: true,
        mc: true,
    };
    pub const ANALYTIC: Modes = Modes {
        analytic: true,
        mc: false,
    };
    pub const MC: Modes = Modes {
        analytic: false,
        mc: true,
    };
}

impl FromStr for Modes {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "analytic" => Ok(Modes::ANALYTIC),
            "mc" => Ok(Modes::MC),
            "both" => Ok(Modes::BOTH),
            _ => Err("expected analytic, mc or both".into()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: SystemParams,
    pub accuracy: AnalyticAccuracy,
    pub mc: McSettings,
    /// Sweep recipe in `NAME=LO:HI:COUNT[:log]` form, if the file has one.
    pub sweep: Option<String>,
    pub modes: Modes,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: RawParams::default().build().expect("defaults are valid"),
            accuracy: AnalyticAccuracy::default(),
            mc: McSettings::default(),
            sweep: None,
            modes: Modes::BOTH,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e: T::Err| HarnessError::BadValue {
        key: key.into(),
        value: value.into(),
        reason: e.to_string(),
    })
}

/// `M_A`: a positive count or `auto`.
pub fn parse_m_a(value: &str) -> Result<Option<usize>> {
    if value == "auto" {
        return Ok(None);
    }
    parse_value("M_A", value).map(Some)
}

/// `K_A`: a positive count or `exact`.
pub fn parse_k_a(value: &str) -> Result<GammaSeries> {
    if value == "exact" {
        return Ok(GammaSeries::Exact);
    }
    parse_value("K_A", value).map(GammaSeries::Truncated)
}

fn parse_method(value: &str) -> Result<CompMethod> {
    match value {
        "pole" => Ok(CompMethod::PoleAggregated),
        "compositions" => Ok(CompMethod::Compositions),
        _ => Err(HarnessError::BadValue {
            key: "method".into(),
            value: value.into(),
            reason: "expected pole or compositions".into(),
        }),
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut raw = RawParams::default();
    let mut acc = AnalyticAccuracy::default();
    let mut mc = McSettings::default();
    let mut sweep = None;
    let mut modes = Modes::BOTH;
    let mut seen = BTreeSet::new();

    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body.split_once('=').ok_or_else(|| HarnessError::Syntax {
            line: line_no,
            text: body.into(),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if !seen.insert(key.to_string()) {
            return Err(HarnessError::DuplicateKey {
                line: line_no,
                key: key.into(),
            });
        }
        match key {
            k if PARAM_KEYS.contains(&k) => raw.set(k, parse_value(k, value)?)?,
            "N" => acc.n_terms = parse_value(key, value)?,
            "M_A" => acc.m_a = parse_m_a(value)?,
            "K_A" => acc.k_a = parse_k_a(value)?,
            "quad_points" => acc.quad_points = parse_value(key, value)?,
            "method" => acc.method = parse_method(value)?,
            "composition_budget" => acc.composition_budget = parse_value(key, value)?,
            "tail_bound" => acc.tail_bound = parse_value(key, value)?,
            "trials" => mc.trials = parse_value(key, value)?,
            "seed" => mc.seed = parse_value(key, value)?,
            "window" => mc.window = parse_value(key, value)?,
            "sweep" => sweep = Some(value.to_string()),
            "modes" => modes = parse_value(key, value)?,
            _ => {
                return Err(HarnessError::UnknownKey {
                    line: line_no,
                    key: key.into(),
                })
            }
        }
    }

    match (seen.contains("beta0_sq"), seen.contains("beta1_sq")) {
        (true, false) => raw.beta1_sq = 1.0 - raw.beta0_sq,
        (false, true) => raw.beta0_sq = 1.0 - raw.beta1_sq,
        _ => {}
    }
    acc.validate()?;
    Ok(RunConfig {
        params: raw.build()?,
        accuracy: acc,
        mc,
        sweep,
        modes,
    })
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_reference_defaults() {
        let cfg = parse_config("").unwrap();
        let r = cfg.params.raw();
        assert_eq!(r, &RawParams::default());
        assert_eq!(
            (r.f_c, r.noise_dbm_per_hz, r.bandwidth_hz, r.alpha),
            (2e9, -170.0, 10e6, 4.0)
        );
        assert_eq!((r.beta0_sq, r.beta1_sq), (0.8, 0.2));
        assert_eq!((r.r_c, r.r_d, r.r_bar, r.p_s_dbm), (30.0, 500.0, 100.0, 30.0));
        assert_eq!(cfg.accuracy, AnalyticAccuracy::default());
        assert_eq!(cfg.mc, McSettings::default());
    }

    #[test]
    fn alpha_below_two_is_rejected() {
        let err = parse_config("alpha=1.5").unwrap_err();
        assert!(err.to_string().contains("alpha must exceed 2"), "{err}");
    }

    #[test]
    fn beta_complement_is_inferred() {
        let cfg = parse_config("beta0_sq=0.64").unwrap();
        assert_eq!(cfg.params.beta1_sq(), 1.0 - 0.64);
        let cfg = parse_config("beta1_sq = 0.3").unwrap();
        assert_eq!(cfg.params.beta0_sq(), 1.0 - 0.3);
        assert!(parse_config("beta0_sq=0.6\nbeta1_sq=0.3").is_err());
    }

    #[test]
    fn errors_name_the_key() {
        let err = parse_config("# header\nlambda_c = 1e-5\nbogus = 3").unwrap_err();
        assert!(matches!(&err, HarnessError::UnknownKey { line: 3, key } if key == "bogus"));
        let err = parse_config("R_D = far").unwrap_err();
        assert!(err.to_string().contains("R_D"), "{err}");
        let err = parse_config("K_A = many").unwrap_err();
        assert!(err.to_string().contains("K_A"), "{err}");
        assert!(matches!(
            parse_config("just text"),
            Err(HarnessError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            parse_config("K=2\nK=3"),
            Err(HarnessError::DuplicateKey { line: 2, .. })
        ));
    }

    #[test]
    fn accuracy_and_mc_keys() {
        let cfg = parse_config(
            "N=20\nM_A=40\nK_A=exact\nquad_points=32\nmethod=compositions\n\
             trials=1000\nseed=9\nwindow=2500\nmodes=analytic\n\
             sweep = lambda_c=1e-6:5e-5:10:log  # trailing comment",
        )
        .unwrap();
        assert_eq!(cfg.accuracy.n_terms, 20);
        assert_eq!(cfg.accuracy.m_a, Some(40));
        assert_eq!(cfg.accuracy.k_a, GammaSeries::Exact);
        assert_eq!(cfg.accuracy.quad_points, 32);
        assert_eq!(cfg.accuracy.method, CompMethod::Compositions);
        assert_eq!(
            cfg.mc,
            McSettings {
                trials: 1000,
                seed: 9,
                window: 2500.0
            }
        );
        assert_eq!(cfg.modes, Modes::ANALYTIC);
        assert_eq!(cfg.sweep.as_deref(), Some("lambda_c=1e-6:5e-5:10:log"));
        assert_eq!(parse_config("M_A=auto").unwrap().accuracy.m_a, None);
        assert!(parse_config("K_A=0").is_err());
    }
}
