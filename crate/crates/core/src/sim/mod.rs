//! Monte-Carlo simulation of the network: BS process, cluster users,
//! Rayleigh fading and the resulting SINRs.

mod estimate;
mod network;

pub use estimate::{ci95_halfwidth, estimate_outage, trial_rng, MCEstimate, DEFAULT_WINDOW};
pub use network::{
    comp_sinr, noma_sinrs, sample_cluster_gain, sample_coop_gain, sample_network, uniform_in_annulus,
    NetworkRealization, NomaSinrs, Point,
};
