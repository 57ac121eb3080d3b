use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::network::{comp_sinr, noma_sinrs, sample_network};
use crate::error::{Error, Result};
use crate::params::SystemParams;

/// Default truncation radius of the interference field, 10·R_D at the
/// reference parameters.
pub const DEFAULT_WINDOW: f64 = 5000.0;

/// Trials handed to one worker at a time.
const CHUNK: usize = 1024;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub p0_hat: f64,
    /// `None` when no trial had a cooperating BS; see `pi_note`.
    pub pi_hat: Option<f64>,
    pub pi_note: Option<String>,
    pub ci95_p0: f64,
    pub ci95_pi: Option<f64>,
    pub trials_used: usize,
    /// Trials with at least one cooperating BS.
    pub noma_trials: usize,
    /// m_histogram[m] = trials with m cooperating BSs.
    pub m_histogram: Vec<u64>,
    pub seed: u64,
    pub window: f64,
}

/// 1.96·√(p(1−p)/n).
pub fn ci95_halfwidth(p: f64, n: usize) -> f64 {
    1.96 * (p * (1.0 - p) / n as f64).sqrt()
}

/// Independent stream for one trial: the same (seed, trial) pair always
/// yields the same draws, whichever worker runs it.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Stream for the serving-BS choice, kept apart from the network draws so
/// the choice does not depend on how many BSs the window holds.
fn selection_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    trial_rng(seed ^ 0x9e37_79b9_7f4a_7c15, trial)
}

#[derive(Debug, Clone, Default)]
struct Tally {
    comp_outages: u64,
    noma_trials: u64,
    noma_outages: u64,
    histogram: Vec<u64>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.comp_outages += other.comp_outages;
        self.noma_trials += other.noma_trials;
        self.noma_outages += other.noma_outages;
        if self.histogram.len() < other.histogram.len() {
            self.histogram.resize(other.histogram.len(), 0);
        }
        for (a, b) in self.histogram.iter_mut().zip(&other.histogram) {
            *a += b;
        }
        self
    }
}

fn run_trial(p: &SystemParams, window: f64, seed: u64, trial: u64, tally: &mut Tally) {
    let net = sample_network(p, window, &mut trial_rng(seed, trial));
    let m = net.coop.len();
    if tally.histogram.len() <= m {
        tally.histogram.resize(m + 1, 0);
    }
    tally.histogram[m] += 1;
    if comp_sinr(&net, p) < p.eps0() {
        tally.comp_outages += 1;
    }
    if let Some(s) = noma_sinrs(&net, p, &mut selection_rng(seed, trial)) {
        tally.noma_trials += 1;
        if !(s.sinr_i0 > p.eps0() && s.sinr_ii > p.epsi()) {
            tally.noma_outages += 1;
        }
    }
}

/// Empirical outage probabilities over `trials` independent networks.
///
/// Counts are integers merged by addition, so the estimate is bit-identical
/// for any number of worker threads.
pub fn estimate_outage(p: &SystemParams, trials: usize, seed: u64, window: f64) -> Result<MCEstimate> {
    if trials == 0 {
        return Err(Error::Validation("trials must be at least 1".into()));
    }
    if window <= p.r_d() || !window.is_finite() {
        return Err(Error::Validation(format!(
            "window radius {window} must exceed R_D = {}",
            p.r_d()
        )));
    }
    let chunks = trials.div_ceil(CHUNK);
    let tally = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut tally = Tally::default();
            for trial in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                run_trial(p, window, seed, trial as u64, &mut tally);
            }
            tally
        })
        .reduce(Tally::default, Tally::merge);

    let p0_hat = tally.comp_outages as f64 / trials as f64;
    let noma_trials = tally.noma_trials as usize;
    let (pi_hat, ci95_pi, pi_note) = if noma_trials == 0 {
        (None, None, Some("no trial had a cooperating BS".to_string()))
    } else {
        let pi = tally.noma_outages as f64 / noma_trials as f64;
        (Some(pi), Some(ci95_halfwidth(pi, noma_trials)), None)
    };
    Ok(MCEstimate {
        p0_hat,
        pi_hat,
        pi_note,
        ci95_p0: ci95_halfwidth(p0_hat, trials),
        ci95_pi,
        trials_used: trials,
        noma_trials,
        m_histogram: tally.histogram,
        seed,
        window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::poisson_count_pmf;
    use crate::params::RawParams;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    fn at(lambda_c: f64) -> SystemParams {
        RawParams {
            lambda_c,
            ..Default::default()
        }
        .build()
        .unwrap()
    }

    #[test]
    fn rejects_bad_settings() {
        assert!(estimate_outage(&at(1e-5), 0, 1, 5000.0).is_err());
        assert!(estimate_outage(&at(1e-5), 10, 1, 400.0).is_err());
    }

    #[test]
    fn empty_network_is_always_in_outage() {
        let est = estimate_outage(&at(0.0), 500, 1, 5000.0).unwrap();
        assert_eq!(est.p0_hat, 1.0);
        assert_eq!(est.pi_hat, None);
        assert!(est.pi_note.is_some());
        assert_eq!(est.m_histogram, vec![500]);
    }

    #[test]
    fn vanishing_thresholds() {
        let p = RawParams {
            lambda_c: 2e-6,
            r0_bpcu: 1e-12,
            ri_bpcu: 1e-12,
            ..Default::default()
        }
        .build()
        .unwrap();
        let est = estimate_outage(&p, 4000, 9, 3000.0).unwrap();
        let empty = est.m_histogram[0] as f64 / 4000.0;
        assert_eq!(est.p0_hat, empty);
        assert_eq!(est.pi_hat, Some(0.0));
    }

    #[test]
    fn identical_across_thread_counts() {
        let p = at(5e-6);
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| estimate_outage(&p, 5000, 42, 3000.0).unwrap())
        };
        let one = run(1);
        assert_eq!(one, run(3));
        assert_eq!(one, run(8));
        assert_ne!(one, estimate_outage(&p, 5000, 43, 3000.0).unwrap());
    }

    #[test]
    fn cooperating_count_is_poisson() {
        let p = at(1e-5);
        // the count only depends on the cooperation annulus, so a window just
        // past R_D keeps the run cheap
        let trials = 100_000;
        let est = estimate_outage(&p, trials, 7, 501.0).unwrap();
        let mut observed = Vec::new();
        let mut expected = Vec::new();
        let (mut obs_acc, mut exp_acc) = (0.0, 0.0);
        let max_m = est.m_histogram.len().max(40);
        for m in 0..max_m {
            obs_acc += *est.m_histogram.get(m).unwrap_or(&0) as f64;
            exp_acc += poisson_count_pmf(m, &p) * trials as f64;
            if exp_acc >= 5.0 {
                observed.push(obs_acc);
                expected.push(exp_acc);
                obs_acc = 0.0;
                exp_acc = 0.0;
            }
        }
        // fold the remainder and the upper tail into the last bin
        let tail = trials as f64 - expected.iter().sum::<f64>();
        *observed.last_mut().unwrap() += obs_acc;
        *expected.last_mut().unwrap() += tail;
        let stat: f64 = observed.iter().zip(&expected).map(|(o, e)| (o - e).powi(2) / e).sum();
        let dof = (observed.len() - 1) as f64;
        let p_value = 1.0 - ChiSquared::new(dof).unwrap().cdf(stat);
        assert!(p_value > 0.001, "chi2 {stat} on {dof} dof, p = {p_value}");
        let empty = est.m_histogram[0] as f64 / trials as f64;
        assert!((empty - 5.31e-4).abs() < 4.0 * (5.31e-4 / trials as f64).sqrt());
    }
}
