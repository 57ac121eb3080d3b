//! Incomplete gamma for integer order and the Beta function.

use crate::specfun::compositions::ln_factorial;

/// Lower incomplete gamma γ(s, x) = ∫₀ˣ t^{s−1}e^{−t} dt for integer `s ≥ 1`,
/// from the finite closed form (s−1)!·(1 − e^{−x}Σ_{j<s} xʲ/j!).
pub fn lower_inc_gamma(s: u32, x: f64) -> f64 {
    assert!(s >= 1, "integer order must be positive");
    ln_factorial(s as usize - 1).exp() * regularized_lower_gamma(s, x)
}

/// P(s, x) = γ(s, x)/Γ(s), the probability that a Poisson(x) count is ≥ s.
pub fn regularized_lower_gamma(s: u32, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let mut term = (-x).exp();
    let mut tail = term;
    for j in 1..s {
        term *= x / j as f64;
        tail += term;
    }
    (1.0 - tail).max(0.0)
}

/// γ(s, x) from the series Γ(s)·Σ_{k≥0} x^{s+k}e^{−x}/Γ(s+k+1), truncated
/// after `terms` terms.
pub fn lower_inc_gamma_series(s: u32, x: f64, terms: usize) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let ln_gamma_s = ln_factorial(s as usize - 1);
    let mut sum = 0.0;
    for k in 0..terms {
        let order = s as usize + k;
        let ln_term = order as f64 * x.ln() - x - ln_factorial(order);
        sum += ln_term.exp();
    }
    ln_gamma_s.exp() * sum
}

/// Number of series terms after which the remaining tail of
/// [`lower_inc_gamma_series`] is below double precision relative to the sum.
pub fn series_terms_for_convergence(x: f64) -> usize {
    // Poisson(x) mass beyond x + 12√x + 40 is < 1e-17.
    (x + 12.0 * x.sqrt() + 40.0).ceil() as usize
}

/// B(a, b) = Γ(a)Γ(b)/Γ(a+b) for `a, b > 0`.
pub fn beta_fn(a: f64, b: f64) -> f64 {
    assert!(a > 0.0 && b > 0.0, "Beta function needs positive arguments");
    statrs::function::beta::beta(a, b)
}
