//! Lucas sequence arithmetic: terms, divisibility, primitive prime divisors,
//! and the rank of apparition.
//!
//! A Lucas pair is a pair of coprime nonzero integers (A, B) = (α+β, αβ)
//! where α, β are the roots of x² − Ax + B and α/β is not a root of unity.
//! The associated integer sequence is u₁ = 1, u₂ = A,
//! uₙ = A·uₙ₋₁ − B·uₙ₋₂, equivalently uₙ = (αⁿ − βⁿ)/(α − β).
//!
//! A prime ℓ dividing uₙ is *primitive* for uₙ when ℓ divides neither the
//! discriminant (α − β)² = A² − 4B nor any earlier term u₁ ⋯ uₙ₋₁. A term
//! with n > 2 and no primitive prime divisor is *defective*; every term with
//! n > 30 has a primitive prime divisor, and the defective terms below that
//! bound are completely classified (see `defects`).
//!
//! Primitivity is decided without factoring uₙ itself: for coprime (A, B)
//! the sequence is a strong divisibility sequence, gcd(uₘ, uₙ) = |u_gcd(m,n)|,
//! so any prime shared with an earlier term already divides u_d for some
//! proper divisor d | n. Stripping gcds with those few terms (plus the
//! discriminant) leaves exactly the primitive part, and only that reduced
//! part is ever factored.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::arith::{factor_bigint, is_prime_u64};

fn residue_u64(x: &BigInt, m: u64) -> u64 {
    x.mod_floor(&BigInt::from(m)).to_u64().expect("residue fits")
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LucasError {
    #[error("lucas pair entries must be nonzero (A={a}, B={b})")]
    ZeroEntry { a: BigInt, b: BigInt },
    #[error("lucas pair entries must be coprime (A={a}, B={b})")]
    NotCoprime { a: BigInt, b: BigInt },
    #[error("degenerate pair: A² ∈ {{B, 2B, 3B, 4B}} makes α/β a root of unity or α=β (A={a}, B={b})")]
    DegenerateRatio { a: BigInt, b: BigInt },
    #[error("{ell} divides the norm B; no rank of apparition exists")]
    DividesNorm { ell: u64 },
}

/// Index into a Lucas sequence; u₁ = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct LucasTermIndex(pub u64);

impl LucasTermIndex {
    pub fn new(n: u64) -> Option<Self> {
        (n >= 1).then_some(LucasTermIndex(n))
    }
}

/// Validated Lucas pair (A, B) = (α+β, αβ).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LucasPair {
    a: BigInt,
    b: BigInt,
}

impl LucasPair {
    /// Validates the defining constraints: A, B nonzero, coprime, and
    /// A² ∉ {B, 2B, 3B, 4B} (the last also rejects α = β).
    pub fn new(a: BigInt, b: BigInt) -> Result<Self, LucasError> {
        if a.is_zero() || b.is_zero() {
            return Err(LucasError::ZeroEntry { a, b });
        }
        if !a.gcd(&b).is_one() {
            return Err(LucasError::NotCoprime { a, b });
        }
        let a_sq = &a * &a;
        for k in 1..=4u8 {
            if a_sq == &b * BigInt::from(k) {
                return Err(LucasError::DegenerateRatio { a, b });
            }
        }
        Ok(LucasPair { a, b })
    }

    pub fn from_i64(a: i64, b: i64) -> Result<Self, LucasError> {
        LucasPair::new(BigInt::from(a), BigInt::from(b))
    }

    pub fn trace(&self) -> &BigInt {
        &self.a
    }

    pub fn norm(&self) -> &BigInt {
        &self.b
    }

    /// Discriminant (α − β)² = A² − 4B.
    pub fn discriminant(&self) -> BigInt {
        &self.a * &self.a - BigInt::from(4) * &self.b
    }

    /// n-th term by the linear recurrence, exact.
    pub fn term(&self, n: LucasTermIndex) -> BigInt {
        self.terms_up_to(n.0).pop().unwrap()
    }

    /// u₁..uₙ as a vector (index i holds u_{i+1}).
    pub fn terms_up_to(&self, n: u64) -> Vec<BigInt> {
        assert!(n >= 1);
        let mut terms = Vec::with_capacity(n as usize);
        terms.push(BigInt::one());
        if n >= 2 {
            terms.push(self.a.clone());
        }
        for i in 2..n as usize {
            let next = &self.a * &terms[i - 1] - &self.b * &terms[i - 2];
            terms.push(next);
        }
        terms
    }

    /// uₙ mod m via the recurrence in word arithmetic (m < 2^31 keeps the
    /// products inside u64).
    pub fn term_mod(&self, n: u64, m: u64) -> u64 {
        debug_assert!(m > 0 && m < (1 << 31));
        let a = residue_u64(&self.a, m);
        let b = residue_u64(&self.b, m);
        let mut prev = 1u64 % m;
        if n == 1 {
            return prev;
        }
        let mut cur = a % m;
        for _ in 2..n {
            let next = (a * cur % m + (m - b % m) * prev % m) % m;
            prev = cur;
            cur = next;
        }
        cur
    }

    /// The primitive part of uₙ: |uₙ| with every prime dividing the
    /// discriminant or an earlier term stripped out.
    pub fn primitive_part(&self, n: LucasTermIndex) -> BigInt {
        let terms = self.terms_up_to(n.0);
        self.primitive_part_from_terms(&terms, n.0)
    }

    fn primitive_part_from_terms(&self, terms: &[BigInt], n: u64) -> BigInt {
        let mut r = terms[n as usize - 1].abs();
        if r.is_zero() {
            // Cannot happen for a valid pair; kept as a guard for callers
            // that bypass validation in tests.
            return BigInt::zero();
        }
        let strip = |r: &mut BigInt, x: &BigInt| {
            if x.is_zero() {
                return;
            }
            loop {
                let g = r.gcd(x);
                if g.is_one() {
                    break;
                }
                *r /= &g;
            }
        };
        let disc = self.discriminant();
        strip(&mut r, &disc);
        // Strong divisibility: a prime shared with any earlier term divides
        // u_d for a proper divisor d of n, so those terms suffice.
        for d in 2..n {
            if n % d == 0 {
                strip(&mut r, &terms[d as usize - 1]);
            }
        }
        r
    }

    /// All primitive prime divisors of uₙ (n ≥ 2). Empty output for n > 2
    /// means uₙ is defective.
    pub fn primitive_prime_divisors(&self, n: LucasTermIndex) -> Vec<BigInt> {
        assert!(n.0 >= 2, "primitivity is defined for n >= 2");
        let reduced = self.primitive_part(n);
        if reduced.is_one() {
            return Vec::new();
        }
        factor_bigint(&reduced).into_iter().map(|(p, _)| p).collect()
    }

    /// Rank of apparition m_ℓ: the least n ≥ 2 with ℓ | uₙ, for an odd prime
    /// ℓ ∤ B. When ℓ | B no term is ever divisible by ℓ (the terms are
    /// ≡ A^{n−1} ≢ 0 mod ℓ), reported as `DividesNorm`.
    ///
    /// The result satisfies the trichotomy: m_ℓ = 2 iff ℓ | A; otherwise
    /// m_ℓ = ℓ when ℓ | (A² − 4B), and m_ℓ | ℓ−1 or m_ℓ | ℓ+1 when not.
    pub fn rank_of_apparition(&self, ell: u64) -> Result<u64, LucasError> {
        assert!(ell % 2 == 1 && is_prime_u64(ell), "ℓ must be an odd prime");
        debug_assert!(ell < (1 << 31));
        let ell_big = BigInt::from(ell);
        if (self.norm() % &ell_big).is_zero() {
            return Err(LucasError::DividesNorm { ell });
        }
        let a = residue_u64(&self.a, ell);
        let b = residue_u64(&self.b, ell);
        let mut prev = 1u64;
        let mut cur = a % ell;
        let mut n = 2u64;
        while cur != 0 {
            let next = (a * cur % ell + (ell - b % ell) * prev % ell) % ell;
            prev = cur;
            cur = next;
            n += 1;
            assert!(
                n <= ell + 1,
                "rank of apparition must appear by ℓ+1 (pair {:?}, ℓ={ell})",
                self
            );
        }
        debug_assert!(self.rank_trichotomy_holds(ell, n));
        Ok(n)
    }

    fn rank_trichotomy_holds(&self, ell: u64, m: u64) -> bool {
        let ell_big = BigInt::from(ell);
        if m == 2 {
            return (self.trace() % &ell_big).is_zero();
        }
        if (self.discriminant() % &ell_big).is_zero() {
            m == ell
        } else {
            (ell - 1) % m == 0 || (ell + 1) % m == 0
        }
    }
}

/// Spec-shaped constructor alias.
pub fn make_lucas_pair(a: i64, b: i64) -> Result<LucasPair, LucasError> {
    LucasPair::from_i64(a, b)
}

/// uₙ for the pair (A, B).
pub fn lucas_term(pair: &LucasPair, n: LucasTermIndex) -> BigInt {
    pair.term(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(a: i64, b: i64) -> LucasPair {
        LucasPair::from_i64(a, b).unwrap()
    }

    #[test]
    fn constructor_validation() {
        assert!(make_lucas_pair(2, 3).is_ok());
        assert!(matches!(
            make_lucas_pair(0, 5),
            Err(LucasError::ZeroEntry { .. })
        ));
        assert!(matches!(
            make_lucas_pair(2, 1),
            Err(LucasError::DegenerateRatio { .. })
        ));
        assert!(matches!(
            make_lucas_pair(6, 9),
            Err(LucasError::NotCoprime { .. })
        ));
        // A² = B, 2B, 3B also rejected.
        assert!(make_lucas_pair(3, 9).is_err());
        assert!(make_lucas_pair(4, 8).is_err());
        assert!(make_lucas_pair(3, 3).is_err());
    }

    #[test]
    fn terms_match_tabulated_values() {
        let p = pair(1, 2);
        assert_eq!(p.term(LucasTermIndex(1)), BigInt::from(1));
        assert_eq!(p.term(LucasTermIndex(5)), BigInt::from(-1));
        assert_eq!(p.term(LucasTermIndex(7)), BigInt::from(7));
        assert_eq!(p.term(LucasTermIndex(30)), BigInt::from(-24475));
        let q = pair(-1, 2);
        // Sign rule: u_n(−A, B) = (−1)^{n−1} u_n(A, B).
        assert_eq!(q.term(LucasTermIndex(30)), BigInt::from(24475));
    }

    #[test]
    fn primitive_divisors_examples() {
        // u₇ = 7 but 7 | A²−4B = −7: defective.
        assert!(pair(1, 2)
            .primitive_prime_divisors(LucasTermIndex(7))
            .is_empty());
        // u₅ = −1 has no prime divisors at all.
        assert!(pair(1, 2)
            .primitive_prime_divisors(LucasTermIndex(5))
            .is_empty());
        // u₃(2,11) = −7, disc = −40, u₂ = 2: primitive 7.
        assert_eq!(
            pair(2, 11).primitive_prime_divisors(LucasTermIndex(3)),
            vec![BigInt::from(7)]
        );
    }

    #[test]
    fn primitive_divisors_match_naive_definition() {
        // Cross-check the gcd-stripping route against the definition on a
        // range small enough to factor every term directly.
        for a in -8i64..=8 {
            for b in -8i64..=8 {
                let Ok(p) = LucasPair::from_i64(a, b) else {
                    continue;
                };
                let terms = p.terms_up_to(14);
                for n in 2..=14u64 {
                    let fast: std::collections::BTreeSet<BigInt> = p
                        .primitive_prime_divisors(LucasTermIndex(n))
                        .into_iter()
                        .collect();
                    let mut naive = std::collections::BTreeSet::new();
                    let disc = p.discriminant();
                    for (q, _) in factor_bigint(&terms[n as usize - 1]) {
                        let divides_earlier = (&disc % &q).is_zero()
                            || terms[..n as usize - 1].iter().any(|t| (t % &q).is_zero());
                        if !divides_earlier {
                            naive.insert(q);
                        }
                    }
                    assert_eq!(fast, naive, "pair ({a},{b}), n={n}");
                }
            }
        }
    }

    #[test]
    fn rank_of_apparition_examples() {
        // 7 | disc(1,2) = −7: rank equals ℓ.
        assert_eq!(pair(1, 2).rank_of_apparition(7).unwrap(), 7);
        // u₆(2,3) = −10: rank 6 | (5+1).
        assert_eq!(pair(2, 3).rank_of_apparition(5).unwrap(), 6);
        // u₄(2,11) = −36: rank 4 | (3+1).
        assert_eq!(pair(2, 11).rank_of_apparition(3).unwrap(), 4);
        assert!(matches!(
            pair(2, 11).rank_of_apparition(11),
            Err(LucasError::DividesNorm { ell: 11 })
        ));
    }

    #[test]
    fn term_mod_agrees_with_exact() {
        let p = pair(5, -7);
        let terms = p.terms_up_to(40);
        for m in [3u64, 5, 97, 1009] {
            for n in 1..=40u64 {
                let exact = terms[n as usize - 1].mod_floor(&BigInt::from(m));
                assert_eq!(BigInt::from(p.term_mod(n, m)), exact, "n={n} m={m}");
            }
        }
    }
}
