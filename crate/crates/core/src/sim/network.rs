use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp, Exp1};

use crate::params::SystemParams;

pub type Point = [f64; 2];

/// One draw of the BS process around the CoMP user at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkRealization {
    /// BS positions in the annulus R̄ ≤ ‖x‖ ≤ window.
    pub bs: Vec<Point>,
    /// Indices into `bs` with ‖x‖ ≤ R_D.
    pub coop: Vec<usize>,
    /// |g_j|² from every BS to the CoMP user.
    pub comp_fading: Vec<f64>,
    /// K user offsets y_{i,k} for each cooperating BS, in `coop` order.
    pub clusters: Vec<Vec<Point>>,
    /// |h_{i,k}|² from each cooperating BS to its own cluster users.
    pub cluster_fading: Vec<Vec<f64>>,
    /// |h_j|² from every BS to whichever cluster user ends up tagged.
    pub tagged_fading: Vec<f64>,
}

impl NetworkRealization {
    pub fn empty() -> Self {
        Self {
            bs: Vec::new(),
            coop: Vec::new(),
            comp_fading: Vec::new(),
            clusters: Vec::new(),
            cluster_fading: Vec::new(),
            tagged_fading: Vec::new(),
        }
    }
}

fn norm(v: Point) -> f64 {
    v[0].hypot(v[1])
}

/// Uniform point in the annulus lo ≤ r ≤ hi.
pub fn uniform_in_annulus<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> Point {
    let r = (lo * lo + rng.random::<f64>() * (hi * hi - lo * lo)).sqrt();
    let phi = 2.0 * PI * rng.random::<f64>();
    [r * phi.cos(), r * phi.sin()]
}

/// |g|²/‖x‖^α with x uniform in the cooperation annulus.
pub fn sample_coop_gain<R: Rng + ?Sized>(p: &SystemParams, rng: &mut R) -> f64 {
    let x = uniform_in_annulus(rng, p.r_bar(), p.r_d());
    let g: f64 = Exp1.sample(rng);
    g / norm(x).powf(p.alpha())
}

/// |h|²/‖y‖^α with y uniform in the cluster disc.
pub fn sample_cluster_gain<R: Rng + ?Sized>(p: &SystemParams, rng: &mut R) -> f64 {
    let y = uniform_in_annulus(rng, 0.0, p.r_c());
    let h: f64 = Exp1.sample(rng);
    h / norm(y).powf(p.alpha())
}

/// Samples the BS process on the annulus [R̄, window], which is the plane
/// process conditioned on an empty disc of radius R̄, truncated at `window`.
///
/// Points are generated outward in radius (area increments are Exp(λ_c)),
/// so the total count is Poisson(λ_cπ(window² − R̄²)) and, for a fixed
/// stream, the realization for a window W is an exact prefix of the one for
/// any larger window.
pub fn sample_network<R: Rng + ?Sized>(p: &SystemParams, window: f64, rng: &mut R) -> NetworkRealization {
    let (lo, r_d) = (p.r_bar(), p.r_d());
    let mut net = NetworkRealization::empty();
    if p.lambda_c() == 0.0 {
        return net;
    }
    let spacing = Exp::new(p.lambda_c()).expect("positive density");
    let mut area = 0.0;
    loop {
        area += spacing.sample(rng);
        let r = (lo * lo + area / PI).sqrt();
        if r > window {
            return net;
        }
        let phi = 2.0 * PI * rng.random::<f64>();
        let x = [r * phi.cos(), r * phi.sin()];
        net.bs.push(x);
        net.comp_fading.push(Exp1.sample(rng));
        net.tagged_fading.push(Exp1.sample(rng));
        if r <= r_d {
            net.coop.push(net.bs.len() - 1);
            let users = (0..p.k_users())
                .map(|_| uniform_in_annulus(rng, 0.0, p.r_c()))
                .collect();
            let fading = (0..p.k_users()).map(|_| Exp1.sample(rng)).collect();
            net.clusters.push(users);
            net.cluster_fading.push(fading);
        }
    }
}

/// SINR of the CoMP user: β₀²G/(β₁²G + I_out + 1/ρ). Zero without a
/// cooperating BS.
pub fn comp_sinr(net: &NetworkRealization, p: &SystemParams) -> f64 {
    if net.coop.is_empty() {
        return 0.0;
    }
    let alpha = p.alpha();
    let mut signal = 0.0;
    let mut interference = 0.0;
    let mut next_coop = net.coop.iter().peekable();
    for (j, (&x, &g)) in net.bs.iter().zip(&net.comp_fading).enumerate() {
        let gain = g / norm(x).powf(alpha);
        if next_coop.peek() == Some(&&j) {
            next_coop.next();
            signal += gain;
        } else {
            interference += gain;
        }
    }
    p.beta0_sq() * signal / (p.beta1_sq() * signal + interference + p.inv_rho())
}

/// Received quantities at the tagged NOMA user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NomaSinrs {
    /// SINR when decoding the CoMP signal first.
    pub sinr_i0: f64,
    /// SINR of its own signal after SIC.
    pub sinr_ii: f64,
    /// |h|²/‖y‖^α of the selected user.
    pub own_gain: f64,
    /// Σ_{j≠i} |h_j|²/‖y + x_i − x_j‖^α.
    pub interference: f64,
}

/// Picks a cooperating BS uniformly at random and its strongest cluster
/// user; `None` when no BS cooperates.
pub fn noma_sinrs<R: Rng + ?Sized>(net: &NetworkRealization, p: &SystemParams, rng: &mut R) -> Option<NomaSinrs> {
    if net.coop.is_empty() {
        return None;
    }
    let alpha = p.alpha();
    let slot = rng.random_range(0..net.coop.len());
    let serving = net.coop[slot];
    let (user, own_gain) = net.clusters[slot]
        .iter()
        .zip(&net.cluster_fading[slot])
        .map(|(&y, &h)| (y, h / norm(y).powf(alpha)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("clusters hold K ≥ 1 users");
    let xi = net.bs[serving];
    let position = [xi[0] + user[0], xi[1] + user[1]];
    let interference: f64 = net
        .bs
        .iter()
        .zip(&net.tagged_fading)
        .enumerate()
        .filter(|(j, _)| *j != serving)
        .map(|(_, (&xj, &h))| h / norm([position[0] - xj[0], position[1] - xj[1]]).powf(alpha))
        .sum();
    let floor = interference + p.inv_rho();
    Some(NomaSinrs {
        sinr_i0: p.beta0_sq() * own_gain / (p.beta1_sq() * own_gain + floor),
        sinr_ii: p.beta1_sq() * own_gain / floor,
        own_gain,
        interference,
    })
}
