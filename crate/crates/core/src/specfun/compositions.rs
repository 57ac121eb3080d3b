//! Weak compositions of an integer with their multinomial coefficients.

/// One weak composition `(k_1, …, k_N)` of `total`.
#[derive(Debug, Clone, PartialEq)]
pub struct Composition {
    pub parts: Vec<usize>,
    pub total: usize,
    /// total!/(k_1!…k_N!), `None` if it does not fit in a u128.
    pub multinomial: Option<u128>,
    /// Natural log of the multinomial coefficient.
    pub ln_multinomial: f64,
}

impl Composition {
    pub fn from_parts(parts: Vec<usize>) -> Self {
        let total = parts.iter().sum();
        let (multinomial, ln_multinomial) = multinomial(&parts);
        Self {
            parts,
            total,
            multinomial,
            ln_multinomial,
        }
    }

    pub fn multinomial_f64(&self) -> f64 {
        match self.multinomial {
            Some(m) => m as f64,
            None => self.ln_multinomial.exp(),
        }
    }
}

/// Exact multinomial (when it fits) and its logarithm, built as a product of
/// binomials so intermediate values never exceed the result.
pub fn multinomial(parts: &[usize]) -> (Option<u128>, f64) {
    let mut exact = Some(1u128);
    let mut ln = 0.0;
    let mut running = 0usize;
    for &k in parts {
        running += k;
        exact = exact.and_then(|acc| binomial(running, k).and_then(|b| acc.checked_mul(b)));
        ln += ln_binomial(running, k);
    }
    (exact, ln)
}

pub fn binomial(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc·(n−i) is divisible by (i+1) at every step.
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

pub fn ln_factorial(n: usize) -> f64 {
    statrs::function::factorial::ln_factorial(n as u64)
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Number of weak compositions of `total` into `parts` parts,
/// C(total+parts−1, parts−1).
pub fn composition_count(total: usize, parts: usize) -> Option<u128> {
    binomial(total + parts - 1, parts - 1)
}

/// Lazily enumerates every weak composition of `total` into `parts` parts,
/// starting from `(total, 0, …, 0)` in reverse lexicographic order.
///
/// Memory use is O(parts) regardless of how many compositions exist.
pub fn compositions(total: usize, parts: usize) -> Compositions {
    assert!(parts >= 1, "a composition needs at least one part");
    let mut first = vec![0; parts];
    first[0] = total;
    Compositions { next: Some(first) }
}

#[derive(Debug, Clone)]
pub struct Compositions {
    next: Option<Vec<usize>>,
}

impl Compositions {
    /// Advances without computing multinomials; returns the raw parts.
    pub fn next_parts(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let n = current.len();
        let pivot = current[..n - 1].iter().rposition(|&k| k > 0);
        if let Some(j) = pivot {
            let mut succ = current.clone();
            let tail = succ[n - 1];
            succ[n - 1] = 0;
            succ[j] -= 1;
            succ[j + 1] = tail + 1;
            self.next = Some(succ);
        }
        Some(current)
    }
}

impl Iterator for Compositions {
    type Item = Composition;

    fn next(&mut self) -> Option<Composition> {
        self.next_parts().map(Composition::from_parts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    #[test]
    fn two_into_two() {
        let all: Vec<_> = compositions(2, 2).collect();
        let parts: Vec<_> = all.iter().map(|c| c.parts.clone()).collect();
        assert_eq!(parts, vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        let mult: Vec<_> = all.iter().map(|c| c.multinomial.unwrap()).collect();
        assert_eq!(mult, vec![1, 2, 1]);
    }

    #[test]
    fn zero_total() {
        let all: Vec<_> = compositions(0, 7).collect();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].parts, vec![0; 7]);
        assert_eq!(all[0].multinomial, Some(1));
    }

    #[test]
    fn ten_into_ten() {
        let mut it = compositions(10, 10);
        let mut count = 0u64;
        while it.next_parts().is_some() {
            count += 1;
        }
        assert_eq!(count, 92378);
        assert_eq!(composition_count(10, 10), Some(92378));
    }

    #[test]
    fn multinomial_matches_factorials() {
        let (m, ln) = multinomial(&[3, 0, 2, 1]);
        assert_eq!(m, Some(60));
        assert!((ln - 60f64.ln()).abs() < 1e-12);
        // 40!/(20!·20!) fits; 200 ones do not.
        assert_eq!(multinomial(&[20, 20]).0, binomial(40, 20));
        assert!(multinomial(&[1; 200]).0.is_none());
    }

    proptest! {
        #[test]
        fn stars_and_bars(total in 0usize..=12, parts in 1usize..=12) {
            let all: Vec<_> = compositions(total, parts).collect();
            prop_assert_eq!(all.len() as u128, composition_count(total, parts).unwrap());
            let unique: HashSet<_> = all.iter().map(|c| c.parts.clone()).collect();
            prop_assert_eq!(unique.len(), all.len());
            for c in &all {
                prop_assert_eq!(c.parts.iter().sum::<usize>(), total);
                prop_assert!(c.multinomial.unwrap() >= 1);
            }
            // Σ multinomials = parts^total
            let sum: u128 = all.iter().map(|c| c.multinomial.unwrap()).sum();
            prop_assert_eq!(sum, (parts as u128).pow(total as u32));
        }
    }
}
