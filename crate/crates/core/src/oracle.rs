//! Closed-form truth oracles for families with infinite members.
//!
//! `rat-subgroup` members are `Z[1/(p1···pn)^n]` (ring variant) or the cyclic
//! group generated by `1/(p1···pn)^n` (cyclic variant), both inside `Q`.
//! `free-abelian` member `n` is `Z^n`. Only the witness schemas are decided.

use std::fmt;

use thiserror::Error;

use crate::eval::{EventualBehavior, Provenance, Row, TruthMatrix};
use crate::families;
use crate::syntax::Formula;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("family `{family}` has no schema `{schema}`")]
    UnknownSchema { family: String, schema: String },
    #[error("schema parameter m must be at least 1")]
    ZeroParameter,
    #[error("chain index must be at least 1")]
    ZeroIndex,
}

/// Deterministic trial division.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// The `n`-th prime, 1-based (`nth_prime(1) == 2`).
pub fn nth_prime(n: usize) -> u64 {
    assert!(n >= 1);
    (2..).filter(|&p| is_prime(p)).nth(n - 1).expect("primes are unbounded")
}

/// 1-based position of the prime `p` in the sequence of primes.
pub fn prime_index(p: u64) -> usize {
    assert!(is_prime(p));
    (2..=p).filter(|&q| is_prime(q)).count()
}

/// Distinct prime factors in increasing order.
pub fn prime_factors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            out.push(d);
            while m.is_multiple_of(d) {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// Whether `forall x. exists y. m·y = x` holds in `Z[1/(p1···pn)^n]`: exactly
/// when every prime factor of `m` is among the first `n` primes.
pub fn rational_subgroup_oracle(m: u64, n: usize) -> bool {
    prime_factors(m).into_iter().all(|p| prime_index(p) <= n)
}

/// Whether the subset-sum sentence with `m` variables holds in `Z^r`.
///
/// A nonempty subset sum is in `2Z^r` iff the residues mod 2 of the chosen
/// elements are linearly dependent over GF(2); any `m` vectors in dimension
/// `r < m` are dependent, while a basis extended by zeros is not when `m <= r`.
pub fn free_abelian_subset_sum_oracle(m: usize, r: usize) -> bool {
    m > r
}

/// Exhaustive check of the subset-sum sentence over tuples with entries in
/// `-2..=2`. Residues mod 2 decide the property and both residues occur, so
/// this domain is a complete falsification domain.
pub fn subset_sum_brute_force(m: usize, r: usize) -> bool {
    let values: Vec<i64> = (-2..=2).collect();
    let slots = m * r;
    let total = values.len().pow(slots as u32);
    (0..total).all(|code| {
        let mut c = code;
        let entries: Vec<i64> = (0..slots)
            .map(|_| {
                let v = values[c % values.len()];
                c /= values.len();
                v
            })
            .collect();
        (1u32..(1 << m)).any(|mask| {
            (0..r).all(|coord| {
                let sum: i64 = (0..m).filter(|i| mask & (1 << i) != 0).map(|i| entries[i * r + coord]).sum();
                sum % 2 == 0
            })
        })
    })
}

/// One line of the subset-sum bound comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundRow {
    pub m: usize,
    pub rank: usize,
    pub brute_force: bool,
    /// The criterion `rank < m`.
    pub criterion: bool,
    /// Whether the weaker bound `rank < m - 1` asserts truth here.
    pub loose_bound_asserts: bool,
}

impl BoundRow {
    pub fn status(&self) -> &'static str {
        match (self.brute_force == self.criterion, self.loose_bound_asserts) {
            (false, _) => "CRITERION-MISMATCH",
            (true, true) if !self.brute_force => "LOOSE-BOUND-WRONG",
            (true, false) if self.brute_force => "true-but-loose-bound-silent",
            _ => "agree",
        }
    }
}

/// Brute force versus the `rank < m` criterion versus the `rank < m - 1` bound.
pub fn subset_sum_bound_report(max_m: usize, max_rank: usize) -> Vec<BoundRow> {
    let mut rows = Vec::new();
    for m in 1..=max_m {
        for rank in 0..=max_rank {
            rows.push(BoundRow {
                m,
                rank,
                brute_force: subset_sum_brute_force(m, rank),
                criterion: free_abelian_subset_sum_oracle(m, rank),
                loose_bound_asserts: rank + 1 < m,
            });
        }
    }
    rows
}

/// Infinite families known only through their witness schemas.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleFamily {
    RationalRing,
    RationalCyclic,
    FreeAbelian,
}

impl OracleFamily {
    pub fn name(self) -> &'static str {
        match self {
            OracleFamily::RationalRing => "rat-subgroup:variant=ring",
            OracleFamily::RationalCyclic => "rat-subgroup:variant=cyclic",
            OracleFamily::FreeAbelian => "free-abelian",
        }
    }

    pub fn schemas(self) -> &'static [&'static str] {
        match self {
            OracleFamily::RationalRing | OracleFamily::RationalCyclic => &["div"],
            OracleFamily::FreeAbelian => &["subset-sum"],
        }
    }

    fn check(self, schema: &str, m: usize) -> Result<(), OracleError> {
        if !self.schemas().contains(&schema) {
            return Err(OracleError::UnknownSchema { family: self.name().to_string(), schema: schema.to_string() });
        }
        if m == 0 {
            return Err(OracleError::ZeroParameter);
        }
        Ok(())
    }

    /// The schema instance as a sentence over the abelian-group signature.
    pub fn sentence(self, schema: &str, m: usize) -> Result<Formula, OracleError> {
        self.check(schema, m)?;
        Ok(match self {
            OracleFamily::FreeAbelian => families::subset_sum_sentence(m),
            _ => families::divisibility_sentence(m),
        })
    }

    /// Truth of schema instance `m` at chain index `n` (1-based).
    pub fn decide(self, schema: &str, m: usize, n: usize) -> Result<bool, OracleError> {
        self.check(schema, m)?;
        if n == 0 {
            return Err(OracleError::ZeroIndex);
        }
        Ok(match self {
            OracleFamily::RationalRing => rational_subgroup_oracle(m as u64, n),
            // Each member is infinite cyclic; only m = 1 divides its generator.
            OracleFamily::RationalCyclic => m == 1,
            OracleFamily::FreeAbelian => free_abelian_subset_sum_oracle(m, n),
        })
    }

    pub fn eventual(self, schema: &str, m: usize) -> Result<EventualBehavior, OracleError> {
        self.check(schema, m)?;
        Ok(match self {
            OracleFamily::RationalRing => {
                let from = prime_factors(m as u64).last().map_or(1, |&p| prime_index(p));
                EventualBehavior::TrueFrom(from)
            }
            OracleFamily::RationalCyclic if m == 1 => EventualBehavior::TrueFrom(1),
            OracleFamily::RationalCyclic => EventualBehavior::FalseFrom(1),
            OracleFamily::FreeAbelian => EventualBehavior::FalseFrom(m),
        })
    }

    /// Oracle rows for the given schema instances over indices `1..=horizon`.
    pub fn matrix(self, schema: &str, instances: &[usize], horizon: usize) -> Result<TruthMatrix, OracleError> {
        let rows = instances
            .iter()
            .map(|&m| {
                let cells = (1..=horizon).map(|n| self.decide(schema, m, n)).collect::<Result<Vec<_>, _>>()?;
                Ok(Row {
                    label: format!("{schema}[m={m}]"),
                    sentence: Some(self.sentence(schema, m)?),
                    provenance: vec![Provenance::Oracle; cells.len()],
                    cells,
                    eventual: Some(self.eventual(schema, m)?),
                })
            })
            .collect::<Result<Vec<_>, OracleError>>()?;
        Ok(TruthMatrix { source: self.name().to_string(), horizon, rows, partners: None })
    }
}

impl fmt::Display for OracleFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        let first: Vec<u64> = (1..=6).map(nth_prime).collect();
        assert_eq!(first, vec![2, 3, 5, 7, 11, 13]);
        assert_eq!(prime_index(5), 3);
        assert_eq!(prime_factors(60), vec![2, 3, 5]);
        assert_eq!(prime_factors(1), Vec::<u64>::new());
        assert_eq!(prime_factors(49), vec![7]);
    }

    #[test]
    fn rational_subgroup_examples() {
        assert!(rational_subgroup_oracle(2, 1));
        assert!(!rational_subgroup_oracle(5, 2));
        assert!(rational_subgroup_oracle(5, 3));
        for n in 1..5 {
            assert!(rational_subgroup_oracle(1, n));
        }
    }

    #[test]
    fn subset_sum_examples() {
        assert!(free_abelian_subset_sum_oracle(2, 1));
        assert!(!free_abelian_subset_sum_oracle(2, 2));
        assert!(free_abelian_subset_sum_oracle(1, 0));
        assert!(subset_sum_brute_force(2, 1));
        assert!(!subset_sum_brute_force(2, 2));
        assert!(subset_sum_brute_force(1, 0));
    }

    #[test]
    fn bound_report_flags_the_loose_bound() {
        let rows = subset_sum_bound_report(3, 3);
        assert!(rows.iter().all(|r| r.status() != "CRITERION-MISMATCH"));
        let edge = rows.iter().find(|r| r.m == 3 && r.rank == 2).unwrap();
        assert_eq!(edge.status(), "true-but-loose-bound-silent");
    }

    #[test]
    fn eventual_behavior_matches_decisions() {
        for family in [OracleFamily::RationalRing, OracleFamily::RationalCyclic, OracleFamily::FreeAbelian] {
            let schema = family.schemas()[0];
            for m in 1..=12 {
                let eventual = family.eventual(schema, m).unwrap();
                for n in 1..=12 {
                    let v = family.decide(schema, m, n).unwrap();
                    match eventual {
                        EventualBehavior::TrueFrom(n0) => assert_eq!(v, n >= n0, "{family} m={m} n={n}"),
                        EventualBehavior::FalseFrom(n0) => assert_eq!(v, n < n0, "{family} m={m} n={n}"),
                        EventualBehavior::Oscillating(_) => unreachable!(),
                    }
                }
            }
        }
    }

    #[test]
    fn unknown_schema() {
        assert!(matches!(OracleFamily::FreeAbelian.decide("div", 1, 1), Err(OracleError::UnknownSchema { .. })));
        assert_eq!(OracleFamily::RationalRing.decide("div", 0, 1), Err(OracleError::ZeroParameter));
    }
}
