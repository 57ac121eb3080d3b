//! Partial-fraction coefficients of products of shifted poles.
//!
//! For a composition `(k_1, …, k_N)` of a mixture `{(w_n, d_n)}` the Laplace
//! transform of the sum of the selected exponentials is
//!
//! ```text
//! q(s) = Π_{k_n≠0} w_n^{k_n} d_n^{k_n} (d_n + s)^{−k_n}
//!      = Σ_n Σ_{i=0}^{k_n−1} A_{n,i} / (s + d_n)^{k_n−i}
//! ```
//!
//! with `A_{n,i} = (1/i!) dⁱ/dsⁱ [(s+d_n)^{k_n} q(s)]` at `s = −d_n`. The
//! derivatives come from the logarithmic-derivative recursion on the
//! remaining product, in the scaled variable `s + d_n = d_n·t`.
//!
//! Far from the poles the partial fractions cancel heavily (Σ|terms|/|q(s)|
//! reaches 1e10 for eight-fold products), so coefficients and the
//! reconstruction are carried in double-double arithmetic.

use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::specfun::compositions::Composition;
use crate::specfun::mixture::ExpMixture;

/// a/b to double-double accuracy. twofloat's TwoFloat÷TwoFloat forms
/// 1 − b·(1/b) without a fused multiply-add and so only reaches f64
/// accuracy; its TwoFloat÷f64 is exact enough to build on.
fn dd_div(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let q = a / b.hi();
    let r = a - q * b;
    q + r / b.hi()
}

/// Partial-fraction data for one pole `−d_n` of multiplicity `k_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleResidues {
    /// Index of the pole in the mixture.
    pub index: usize,
    pub multiplicity: usize,
    pub rate: f64,
    /// S_{n,i} = A_{n,i}/d_n^{k_n−i} for i = 0…k_n−1.
    pub scaled_dd: Vec<TwoFloat>,
}

impl PoleResidues {
    /// A_{n,i}/d_n^{k_n−i}, the coefficient of (d_n/(s+d_n))^{k_n−i}.
    pub fn scaled(&self, i: usize) -> f64 {
        let v = self.scaled_dd[i];
        v.hi() + v.lo()
    }

    /// The raw coefficient A_{n,i} of 1/(s+d_n)^{k_n−i}.
    pub fn coefficient(&self, i: usize) -> f64 {
        self.scaled(i) * self.rate.powi((self.multiplicity - i) as i32)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidueTable {
    pub poles: Vec<PoleResidues>,
}

impl ResidueTable {
    /// Evaluates q(s) from its partial fractions.
    pub fn evaluate(&self, s: f64) -> f64 {
        let mut total = TwoFloat::from(0.0);
        for pole in &self.poles {
            let d = TwoFloat::from(pole.rate);
            let ratio = dd_div(d, TwoFloat::from(s) + d);
            for (i, c) in pole.scaled_dd.iter().enumerate() {
                total += *c * ratio.powi((pole.multiplicity - i) as i32);
            }
        }
        total.hi() + total.lo()
    }
}

/// q(s) evaluated directly as a product.
pub fn direct_transform(comp: &Composition, mix: &ExpMixture, s: f64) -> f64 {
    comp.parts
        .iter()
        .zip(mix.terms())
        .filter(|(k, _)| **k > 0)
        .map(|(&k, t)| (t.weight * t.rate / (t.rate + s)).powi(k as i32))
        .product()
}

/// Partial-fraction coefficients of q(s) for a composition over `mix`.
pub fn residues(comp: &Composition, mix: &ExpMixture) -> Result<ResidueTable> {
    if comp.parts.len() != mix.len() {
        return Err(Error::Validation(format!(
            "composition has {} parts but the mixture has {} terms",
            comp.parts.len(),
            mix.len()
        )));
    }
    let terms = mix.terms();
    let active: Vec<usize> = (0..terms.len()).filter(|&n| comp.parts[n] > 0).collect();
    let mut poles = Vec::with_capacity(active.len());
    for &n in &active {
        let k_n = comp.parts[n];
        let d_n = terms[n].rate;
        // F(t) = w_n^{k_n} Π_{j≠n} (w_j ρ_j / (ρ_j − 1 + t))^{k_j},  ρ_j = d_j/d_n
        let mut value_at_zero = TwoFloat::from(terms[n].weight).powi(k_n as i32);
        let mut shifts = Vec::with_capacity(active.len());
        for &j in active.iter().filter(|&&j| j != n) {
            let shift = TwoFloat::new_sub(terms[j].rate, d_n) / d_n;
            if shift.hi() == 0.0 {
                return Err(Error::DegeneratePole(d_n));
            }
            let ratio = TwoFloat::from(terms[j].rate) / d_n;
            let k_j = comp.parts[j];
            value_at_zero *= dd_div(ratio * terms[j].weight, shift).powi(k_j as i32);
            shifts.push((k_j as f64, shift));
        }
        // F'/F = Σ_j −k_j/(shift_j + t) = Σ_p g_p t^p
        let log_deriv: Vec<TwoFloat> = (0..k_n)
            .map(|p| {
                let alt = if p % 2 == 0 { -1.0 } else { 1.0 };
                shifts.iter().fold(TwoFloat::from(0.0), |acc, &(k, shift)| {
                    acc + dd_div(TwoFloat::from(alt * k), shift.powi(p as i32 + 1))
                })
            })
            .collect();
        let mut normalized = vec![TwoFloat::from(1.0)];
        for i in 0..k_n.saturating_sub(1) {
            let acc = (0..=i).fold(TwoFloat::from(0.0), |acc, p| acc + log_deriv[p] * normalized[i - p]);
            normalized.push(acc / (i + 1) as f64);
        }
        poles.push(PoleResidues {
            index: n,
            multiplicity: k_n,
            rate: d_n,
            scaled_dd: normalized.into_iter().map(|c| c * value_at_zero).collect(),
        });
    }
    Ok(ResidueTable { poles })
}
