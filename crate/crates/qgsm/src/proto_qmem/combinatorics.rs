//! Exact basis-match combinatorics for the windowed challenge.
//!
//! With both sides choosing between two directions uniformly, the chance
//! that exactly q of m positions end up with matching bases is
//! C(m, q) / 2^m. Everything here stays in exact integer arithmetic
//! (m ≤ 64 keeps C(m, q) comfortably inside u128).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_WINDOW: u64 = 64;

/// C(m, q) in exact integers.
pub fn binomial(m: u64, q: u64) -> Result<u128> {
    if q > m || m > MAX_WINDOW {
        return Err(Error::BinomialOutOfRange { m, q });
    }
    let q = q.min(m - q);
    let mut result: u128 = 1;
    for i in 1..=q {
        // Exact at every step: result * (m - q + i) is divisible by i.
        result = result * u128::from(m - q + i) / u128::from(i);
    }
    Ok(result)
}

/// The exact rational C(m, q) / 2^m, kept unreduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchProbability {
    pub numerator: u128,
    pub denominator: u128,
}

impl MatchProbability {
    pub fn as_f64(self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

/// Probability that exactly `q` of `m` independently chosen basis pairs
/// match.
pub fn match_probability(m: u64, q: u64) -> Result<MatchProbability> {
    Ok(MatchProbability {
        numerator: binomial(m, q)?,
        denominator: 1u128 << m,
    })
}

/// The contracted number of same-direction picks: m/2 for even m,
/// (m+1)/2 for odd m — the argmax of `match_probability` in q.
pub fn q_contract(m: u64) -> u64 {
    m.div_ceil(2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example_is_exact() {
        let p = match_probability(10, 5).unwrap();
        assert_eq!((p.numerator, p.denominator), (252, 1024));
        assert!((p.as_f64() - 0.246).abs() < 5e-4);
    }

    #[test]
    fn zero_matches_probability() {
        for m in 1..=20 {
            let p = match_probability(m, 0).unwrap();
            assert_eq!((p.numerator, p.denominator), (1, 1u128 << m));
        }
    }

    #[test]
    fn sum_over_q_is_exactly_one_for_all_windows() {
        for m in 1..=64u64 {
            let total: u128 = (0..=m).map(|q| binomial(m, q).unwrap()).sum();
            assert_eq!(total, 1u128 << m, "m = {m}");
        }
    }

    #[test]
    fn contract_is_the_modal_match_count() {
        assert_eq!(q_contract(10), 5);
        assert_eq!(q_contract(11), 6);
        assert_eq!(q_contract(1), 1);
        for m in 1..=30u64 {
            let argmax = (0..=m)
                .max_by_key(|&q| binomial(m, q).unwrap())
                .unwrap();
            // For odd m the maximum is shared between (m±1)/2; the contract
            // picks the upper one.
            let expected = q_contract(m);
            let max_val = binomial(m, argmax).unwrap();
            assert_eq!(binomial(m, expected).unwrap(), max_val, "m = {m}");
        }
    }

    #[test]
    fn out_of_range_arguments_error() {
        assert!(binomial(10, 11).is_err());
        assert!(binomial(65, 1).is_err());
        assert!(match_probability(70, 2).is_err());
    }

    #[test]
    fn fixed_count_parity_against_subset_enumeration() {
        // Both sides committing to exactly q X-picks forces the matched
        // count to m − 2(q − overlap): brute-forced over every subset pair
        // for small windows.
        for m in 1..=12u32 {
            let masks_by_count: Vec<Vec<u32>> = (0..=m)
                .map(|q| (0u32..(1 << m)).filter(|x| x.count_ones() == q).collect())
                .collect();
            for q in 0..=m {
                for &a in &masks_by_count[q as usize] {
                    for &b in &masks_by_count[q as usize] {
                        let overlap = (a & b).count_ones();
                        let matched = m - (a ^ b).count_ones();
                        assert_eq!(matched, m - 2 * (q - overlap));
                        assert_eq!(matched % 2, m % 2);
                    }
                }
            }
        }
    }
}
