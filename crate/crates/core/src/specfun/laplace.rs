//! Laplace functional of the out-of-disc interference plus noise and its
//! derivatives.
//!
//! With interferers forming a PPP of density λ_c outside radius R_D,
//!
//! ```text
//! L(μ) = E[e^{−μ(I + 1/ρ)}] = exp(τ(μ)),
//! τ(μ) = −μ/ρ − 2πλ_c ∫_{R_D}^∞ μr/(r^α + μ) dr
//!      = −μ/ρ − 2πλ_c μ R_D^{2−α}/(α−2) · ₂F₁(1−2/α, 1; 2−2/α; −μ/R_D^α).
//! ```
//!
//! The integral is evaluated after substituting r = R_D·y^{−1/(α−2)}, which
//! maps [R_D, ∞) onto (0, 1] with a smooth integrand for every α > 2. The
//! derivatives τ^{(k)} use the same substitution.

use std::f64::consts::PI;

use crate::error::Result;
use crate::params::SystemParams;
use crate::specfun::quadrature::integrate_tol;

const ABS_TOL: f64 = 1e-14;
const REL_TOL: f64 = 1e-11;

/// Gauss hypergeometric ₂F₁(a, b; c; z) for real `z ≤ 0`.
///
/// Uses the Pfaff transformation ₂F₁(a,b;c;z) = (1−z)^{−b}₂F₁(c−a,b;c;z/(z−1))
/// so the power series is always summed at an argument in [0, 1).
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> f64 {
    assert!(z <= 0.0, "only nonpositive arguments are supported");
    if z == 0.0 {
        return 1.0;
    }
    let w = z / (z - 1.0);
    (1.0 - z).powf(-b) * hyp2f1_series(c - a, b, c, w)
}

fn hyp2f1_series(a: f64, b: f64, c: f64, w: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..10_000_000u64 {
        let n = n as f64;
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * w;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() && n > 2.0 {
            break;
        }
    }
    sum
}

/// Shorthand for the quantities every τ evaluation needs.
struct Geometry {
    alpha: f64,
    r_d: f64,
    /// 2πλ_c·R_D²/(α−2)
    prefactor: f64,
    /// α/(α−2), the exponent in x = y^{α/(α−2)}
    power: f64,
    inv_rho: f64,
}

impl Geometry {
    fn new(p: &SystemParams) -> Self {
        let alpha = p.alpha();
        Self {
            alpha,
            r_d: p.r_d(),
            prefactor: 2.0 * PI * p.lambda_c() * p.r_d() * p.r_d() / (alpha - 2.0),
            power: alpha / (alpha - 2.0),
            inv_rho: p.inv_rho(),
        }
    }

    /// μ/R_D^α
    fn relative_load(&self, mu: f64) -> f64 {
        mu / self.r_d.powf(self.alpha)
    }
}

/// τ(μ) through the integral representation.
pub fn tau(mu: f64, p: &SystemParams) -> Result<f64> {
    let g = Geometry::new(p);
    if mu == 0.0 {
        return Ok(0.0);
    }
    let c = g.relative_load(mu);
    let integral = if g.prefactor == 0.0 {
        0.0
    } else {
        integrate_tol(|y: f64| c / (1.0 + c * y.powf(g.power)), 0.0, 1.0, ABS_TOL * c, REL_TOL)?
    };
    Ok(-mu * g.inv_rho - g.prefactor * integral)
}

/// τ(μ) through the hypergeometric closed form.
pub fn tau_hypergeometric(mu: f64, p: &SystemParams) -> f64 {
    let alpha = p.alpha();
    let c = mu / p.r_d().powf(alpha);
    let h = hyp2f1(1.0 - 2.0 / alpha, 1.0, 2.0 - 2.0 / alpha, -c);
    -mu * p.inv_rho() - 2.0 * PI * p.lambda_c() * mu * p.r_d().powf(2.0 - alpha) / (alpha - 2.0) * h
}

/// τ(μ) for α = 4 via ₂F₁(1/2, 1; 3/2; −x²) = arctan(x)/x.
pub fn tau_alpha4(mu: f64, p: &SystemParams) -> f64 {
    assert!((p.alpha() - 4.0).abs() < 1e-15, "closed form needs alpha = 4");
    let x = (mu / p.r_d().powi(4)).sqrt();
    let h = if x == 0.0 { 1.0 } else { x.atan() / x };
    -mu * p.inv_rho() - PI * p.lambda_c() * mu / (p.r_d() * p.r_d()) * h
}

/// τ^{(1)}(μ), …, τ^{(max_order)}(μ).
///
/// τ^{(k)}(μ) = −[k=1]/ρ − 2πλ_c(−1)^{k−1}k!∫_{R_D}^∞ r^{α+1}(r^α+μ)^{−(k+1)} dr.
pub fn tau_derivatives(mu: f64, max_order: usize, p: &SystemParams) -> Result<Vec<f64>> {
    let g = Geometry::new(p);
    let c = g.relative_load(mu);
    let mut out = Vec::with_capacity(max_order);
    let mut factorial = 1.0;
    for k in 1..=max_order {
        factorial *= k as f64;
        let kf = k as f64;
        let integral = if g.prefactor == 0.0 {
            0.0
        } else {
            integrate_tol(
                |y: f64| y.powf((kf - 1.0) * g.power) / (1.0 + c * y.powf(g.power)).powf(kf + 1.0),
                0.0,
                1.0,
                ABS_TOL,
                REL_TOL,
            )?
        };
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let interference = g.prefactor * sign * factorial * g.r_d.powf(-(kf * g.alpha)) * integral;
        let noise = if k == 1 { g.inv_rho } else { 0.0 };
        out.push(-noise - interference);
    }
    Ok(out)
}

/// L^{(0)}(μ), …, L^{(max_order)}(μ) with L = exp(τ) and
/// L^{(i)} = Σ_{j<i} C(i−1, j) τ^{(i−j)} L^{(j)}.
pub fn laplace_derivatives(mu: f64, max_order: usize, p: &SystemParams) -> Result<Vec<f64>> {
    let tau0 = tau(mu, p)?;
    let dtau = tau_derivatives(mu, max_order, p)?;
    let mut out = Vec::with_capacity(max_order + 1);
    out.push(tau0.exp());
    for i in 1..=max_order {
        let mut binom = 1.0; // C(i−1, 0)
        let mut acc = 0.0;
        for j in 0..i {
            acc += binom * dtau[i - j - 1] * out[j];
            binom = binom * (i - 1 - j) as f64 / (j + 1) as f64;
        }
        out.push(acc);
    }
    Ok(out)
}

/// Scaled derivatives ℓ_i = (−μ)ⁱ L^{(i)}(μ)/i!, i = 0…max_order.
///
/// ℓ_i = E[xⁱe^{−x}/i!] with x = μ(I + 1/ρ): the distribution of a
/// Poisson count whose mean is the random x. All terms are nonnegative, so
/// the recursion ℓ_i = Σ_{j<i} ((i−j)/i)·t_{i−j}·ℓ_j is stable for any order,
/// where t_k = (−μ)^k τ^{(k)}(μ)/k! ≥ 0.
pub fn scaled_laplace_derivatives(mu: f64, max_order: usize, p: &SystemParams) -> Result<Vec<f64>> {
    let t = scaled_tau_derivatives(mu, max_order, p)?;
    let mut ell = Vec::with_capacity(max_order + 1);
    ell.push(tau(mu, p)?.exp());
    for i in 1..=max_order {
        let acc: f64 = (0..i).map(|j| (i - j) as f64 * t[i - j] * ell[j]).sum();
        ell.push(acc / i as f64);
    }
    Ok(ell)
}

/// t_k = (−μ)^k τ^{(k)}(μ)/k! for k = 0…max_order (entry 0 is unused and 0).
pub fn scaled_tau_derivatives(mu: f64, max_order: usize, p: &SystemParams) -> Result<Vec<f64>> {
    let g = Geometry::new(p);
    let c = g.relative_load(mu);
    let mut t = vec![0.0; max_order + 1];
    if mu == 0.0 {
        return Ok(t);
    }
    for (k, slot) in t.iter_mut().enumerate().skip(1) {
        let kf = k as f64;
        let integral = if g.prefactor == 0.0 {
            0.0
        } else {
            // c·(cx)^{k−1}/(1+cx)^{k+1} at x = y^{α/(α−2)}, in log form
            let integrand = |y: f64| {
                let cx = c * y.powf(g.power);
                if cx == 0.0 {
                    return if k == 1 { c } else { 0.0 };
                }
                c * ((kf - 1.0) * cx.ln() - (kf + 1.0) * cx.ln_1p()).exp()
            };
            integrate_tol(integrand, 0.0, 1.0, ABS_TOL, REL_TOL)?
        };
        let noise = if k == 1 { mu * g.inv_rho } else { 0.0 };
        *slot = noise + g.prefactor * integral;
    }
    Ok(t)
}
