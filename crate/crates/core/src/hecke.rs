//! Local newform coefficient arithmetic.
//!
//! A newform's coefficients are multiplicative, and at a good prime p the
//! prime-power values satisfy the two-term recurrence
//! a(p^m) = a(p)·a(p^{m−1}) − χ(p)·p^{k−1}·a(p^{m−2}), so everything local is
//! determined by the Frobenius data (p, k, χ(p), a(p)). When a(p) ≠ 0 and
//! the pair (a(p), χ(p)p^{k−1}) is a valid Lucas pair, a(p^m) = u_{m+1} for
//! that pair; the supersingular case a(p) = 0 is handled by the recurrence
//! directly (the ratio α/β = −1 is degenerate).
//!
//! Under a trivial residual mod-2 representation a(p) is even at every good
//! odd p, which forces a(p^d) odd ⇔ d even and hence a(n) odd ⇔ n is an odd
//! square.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{exact_sqrt_u128, is_prime_u64};
use crate::lucas::LucasPair;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HeckeError {
    #[error("p must be an odd prime, got {0}")]
    NotOddPrime(u64),
    #[error("weight must be 2 or odd >= 1, got {0}")]
    BadWeight(u32),
    #[error("character value must be -1, 0 or 1, got {0}")]
    BadCharacter(i8),
    #[error("|a(p)| = {a_p} exceeds the Deligne bound 2·p^((k-1)/2) at p={p}, k={k}")]
    DeligneViolation { p: u64, k: u32, a_p: i64 },
    #[error("duplicate prime {0} in multiplicative assembly")]
    DuplicatePrime(u64),
    #[error("ord_p(N) = 0: {0} is not a level prime")]
    NotLevelPrime(u64),
}

/// Local Frobenius data (p, k, χ(p), a(p)) at a good odd prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FrobeniusPair {
    p: u64,
    weight: u32,
    chi: i8,
    a_p: i64,
}

impl FrobeniusPair {
    /// Validates: p odd prime, k = 2 (trivial character) or odd, χ ∈ {−1,0,1},
    /// and the Deligne bound a(p)² ≤ 4·p^{k−1} when χ ≠ 0.
    pub fn new(p: u64, weight: u32, chi: i8, a_p: i64) -> Result<Self, HeckeError> {
        if p == 2 || !is_prime_u64(p) {
            return Err(HeckeError::NotOddPrime(p));
        }
        if !(weight == 2 || weight % 2 == 1) || weight == 0 {
            return Err(HeckeError::BadWeight(weight));
        }
        if !(-1..=1).contains(&chi) {
            return Err(HeckeError::BadCharacter(chi));
        }
        if chi != 0 {
            let bound = BigInt::from(4) * BigInt::from(p).pow(weight - 1);
            if BigInt::from(a_p) * BigInt::from(a_p) > bound {
                return Err(HeckeError::DeligneViolation { p, k: weight, a_p });
            }
        }
        Ok(FrobeniusPair { p, weight, chi, a_p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn chi(&self) -> i8 {
        self.chi
    }

    pub fn a_p(&self) -> i64 {
        self.a_p
    }

    /// χ(p)·p^{k−1}, the norm of the Frobenius polynomial x² − a(p)x + B.
    pub fn norm(&self) -> BigInt {
        BigInt::from(self.chi) * BigInt::from(self.p).pow(self.weight - 1)
    }

    /// The Lucas pair (a(p), χ(p)p^{k−1}) when it is valid (a(p) ≠ 0, χ ≠ 0,
    /// coprime entries, non-degenerate ratio).
    pub fn as_lucas_pair(&self) -> Option<LucasPair> {
        LucasPair::new(BigInt::from(self.a_p), self.norm()).ok()
    }
}

/// a(p^m) by the Hecke recurrence; a(p^0) = 1.
pub fn coeff_prime_power(fp: &FrobeniusPair, m: u32) -> BigInt {
    let b = fp.norm();
    let a = BigInt::from(fp.a_p);
    let mut prev = BigInt::one();
    if m == 0 {
        return prev;
    }
    let mut cur = a.clone();
    for _ in 1..m {
        let next = &a * &cur - &b * &prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// a(∏ pᵢ^{mᵢ}) over distinct primes, by multiplicativity. The empty
/// product is a(1) = 1.
pub fn coeff_multiplicative(locals: &[(FrobeniusPair, u32)]) -> Result<BigInt, HeckeError> {
    let mut seen = Vec::with_capacity(locals.len());
    let mut acc = BigInt::one();
    for (fp, m) in locals {
        if seen.contains(&fp.p) {
            return Err(HeckeError::DuplicatePrime(fp.p));
        }
        seen.push(fp.p);
        acc *= coeff_prime_power(fp, *m);
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

/// True when n is an odd perfect square.
pub fn is_odd_square(n: u64) -> bool {
    n % 2 == 1 && exact_sqrt_u128(n as u128).is_some()
}

/// Parity of a(n) under a trivial residual mod-2 representation:
/// odd exactly at odd squares (caller guarantees gcd(n, 2N) = 1).
pub fn parity_shape(n: u64, mod2_trivial: bool) -> Parity {
    assert!(mod2_trivial, "parity shape only defined in the mod-2-trivial setting");
    assert!(n >= 1);
    if is_odd_square(n) {
        Parity::Odd
    } else {
        Parity::Even
    }
}

/// Coefficient at a prime dividing the level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum LevelCoeff {
    /// a(p^m) = 0.
    Zero,
    /// a(p^m) = (±1)^m; the sign is the sign of a(p), fixed but unknown here.
    UnitPower { m: u32 },
    /// a(p^m) = (±1)^m · p^{m(k−1)/2}.
    ScaledUnitPower { m: u32, p: u64, exponent: u64 },
}

impl LevelCoeff {
    /// |a(p^m)| as an integer.
    pub fn magnitude(&self) -> BigInt {
        match self {
            LevelCoeff::Zero => BigInt::zero(),
            LevelCoeff::UnitPower { .. } => BigInt::one(),
            LevelCoeff::ScaledUnitPower { p, exponent, .. } => BigInt::from(*p).pow(
                u32::try_from(*exponent).expect("exponent fits u32"),
            ),
        }
    }

    /// The value when the unknown sign cancels (m even), otherwise None.
    pub fn definite_value(&self) -> Option<BigInt> {
        match self {
            LevelCoeff::Zero => Some(BigInt::zero()),
            LevelCoeff::UnitPower { m } if m % 2 == 0 => Some(BigInt::one()),
            LevelCoeff::ScaledUnitPower { m, .. } if m % 2 == 0 => Some(self.magnitude()),
            _ => None,
        }
    }
}

/// a(p^m) at a level prime p | N.
///
/// Weight 2 (trivial character): (±1)^m when ord_p(N) = 1, zero otherwise.
/// Odd weight with χ definable mod N/p: zero (integrality forces a(p) = 0,
/// since a(p)² = χ₁(p)·p^{k−2} with k−2 odd). Odd weight with χ not
/// definable mod N/p: |a(p)| = p^{(k−1)/2}, so a(p^m) = (±1)^m p^{m(k−1)/2}.
pub fn level_coeff(
    p: u64,
    weight: u32,
    m: u32,
    chi_reducible_mod_n_over_p: bool,
    ord_p_n: u32,
) -> Result<LevelCoeff, HeckeError> {
    if ord_p_n == 0 {
        return Err(HeckeError::NotLevelPrime(p));
    }
    if m == 0 {
        return Ok(LevelCoeff::UnitPower { m: 0 });
    }
    if weight == 2 {
        return Ok(if ord_p_n == 1 {
            LevelCoeff::UnitPower { m }
        } else {
            LevelCoeff::Zero
        });
    }
    assert!(weight % 2 == 1, "level rule implemented for weight 2 and odd weights");
    if chi_reducible_mod_n_over_p {
        Ok(LevelCoeff::Zero)
    } else {
        Ok(LevelCoeff::ScaledUnitPower {
            m,
            p,
            exponent: m as u64 * (weight as u64 - 1) / 2,
        })
    }
}

/// A stored stretch of coefficients a(1..=n_max), with the multiplicative
/// structure spot-checkable.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoefficientSeries {
    pub n_max: u64,
    pub values: BTreeMap<u64, i64>,
}

impl CoefficientSeries {
    pub fn get(&self, n: u64) -> Option<i64> {
        self.values.get(&n).copied()
    }

    /// a(1) = 1 and multiplicativity on every stored coprime pair with a
    /// stored product.
    pub fn check_multiplicative(&self) -> Result<(), String> {
        match self.get(1) {
            Some(1) => {}
            other => return Err(format!("a(1) = {other:?}, expected 1")),
        }
        for (&n1, &v1) in &self.values {
            if n1 == 1 || n1 * n1 > self.n_max {
                continue;
            }
            for (&n2, &v2) in self.values.range(n1..) {
                if n1 == n2 || n1.gcd(&n2) != 1 {
                    continue;
                }
                let Some(prod) = n1.checked_mul(n2).filter(|&p| p <= self.n_max) else {
                    break;
                };
                if let Some(vp) = self.get(prod) {
                    let expect = (v1 as i128) * (v2 as i128);
                    if expect != vp as i128 {
                        return Err(format!(
                            "a({n1})·a({n2}) = {expect} but a({prod}) = {vp}"
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lucas::LucasTermIndex;

    fn fp(p: u64, k: u32, chi: i8, a_p: i64) -> FrobeniusPair {
        FrobeniusPair::new(p, k, chi, a_p).unwrap()
    }

    #[test]
    fn prime_power_examples() {
        // a(13^4) with a(13) = 2 in weight 2.
        assert_eq!(coeff_prime_power(&fp(13, 2, 1, 2), 4), BigInt::from(29));
        assert_eq!(coeff_prime_power(&fp(13, 2, 1, 2), 0), BigInt::one());
        // a(7^4) with a(7) = 4.
        assert_eq!(coeff_prime_power(&fp(7, 2, 1, 4), 4), BigInt::from(-31));
    }

    #[test]
    fn multiplicative_assembly() {
        assert_eq!(coeff_multiplicative(&[]).unwrap(), BigInt::one());
        assert_eq!(
            coeff_multiplicative(&[(fp(13, 2, 1, 2), 4)]).unwrap(),
            BigInt::from(29)
        );
        assert_eq!(
            coeff_multiplicative(&[(fp(13, 2, 1, 2), 4), (fp(7, 2, 1, 4), 4)]).unwrap(),
            BigInt::from(-899)
        );
        assert!(matches!(
            coeff_multiplicative(&[(fp(13, 2, 1, 2), 1), (fp(13, 2, 1, 4), 2)]),
            Err(HeckeError::DuplicatePrime(13))
        ));
    }

    #[test]
    fn parity_examples() {
        assert_eq!(parity_shape(9, true), Parity::Odd);
        assert_eq!(parity_shape(15, true), Parity::Even);
        assert_eq!(parity_shape(1, true), Parity::Odd);
    }

    #[test]
    fn level_coeff_examples() {
        assert_eq!(level_coeff(5, 2, 3, false, 2).unwrap(), LevelCoeff::Zero);
        let unit = level_coeff(5, 2, 2, false, 1).unwrap();
        assert_eq!(unit.definite_value(), Some(BigInt::one()));
        assert_eq!(level_coeff(3, 5, 1, true, 1).unwrap(), LevelCoeff::Zero);
        let scaled = level_coeff(3, 5, 2, false, 1).unwrap();
        assert_eq!(scaled.magnitude(), BigInt::from(81)); // (3^2)^2
        assert!(matches!(
            level_coeff(7, 2, 1, false, 0),
            Err(HeckeError::NotLevelPrime(7))
        ));
    }

    #[test]
    fn lucas_consistency() {
        // a(p^m) = u_{m+1}(α_p, β_p) whenever the Frobenius pair is a valid
        // Lucas pair.
        let cases = [
            fp(13, 2, 1, 2),
            fp(7, 2, 1, 4),
            fp(11, 2, 1, -6),
            fp(5, 3, -1, 2),
            fp(7, 5, 1, -22),
        ];
        for f in cases {
            let pair = f.as_lucas_pair().expect("valid lucas pair");
            for m in 0..=30u32 {
                assert_eq!(
                    coeff_prime_power(&f, m),
                    pair.term(LucasTermIndex(m as u64 + 1)),
                    "fp={f:?} m={m}"
                );
            }
        }
    }

    #[test]
    fn parity_of_prime_powers_with_even_trace() {
        for f in [fp(7, 2, 1, 4), fp(13, 2, 1, -2), fp(11, 3, -1, 4)] {
            for m in 0..=30u32 {
                let v = coeff_prime_power(&f, m);
                assert_eq!(v.is_odd(), m % 2 == 0, "fp={f:?} m={m}");
            }
        }
    }

    #[test]
    fn supersingular_closed_form() {
        // a(p) = 0: a(p^{2m}) = (−χp^{k−1})^m and odd powers vanish.
        for (p, k, chi) in [(5u64, 2u32, 1i8), (7, 3, -1), (13, 5, 1)] {
            let f = fp(p, k, chi, 0);
            assert!(f.as_lucas_pair().is_none());
            let b = f.norm();
            for m in 0..=12u32 {
                let v = coeff_prime_power(&f, m);
                if m % 2 == 1 {
                    assert!(v.is_zero());
                } else {
                    assert_eq!(v, (-&b).pow(m / 2));
                }
            }
        }
    }

    #[test]
    fn deligne_bound_enforced() {
        assert!(matches!(
            FrobeniusPair::new(13, 2, 1, 8),
            Err(HeckeError::DeligneViolation { .. })
        ));
        assert!(FrobeniusPair::new(13, 2, 1, 7).is_ok());
        // χ = 0 carries no bound (p | N).
        assert!(FrobeniusPair::new(13, 3, 0, 100).is_ok());
    }

    #[test]
    fn series_multiplicativity_check() {
        let mut values = BTreeMap::new();
        for (n, v) in [(1u64, 1i64), (2, -1), (3, 2), (4, 1), (6, -2), (12, 2)] {
            values.insert(n, v);
        }
        let series = CoefficientSeries { n_max: 12, values };
        assert!(series.check_multiplicative().is_ok());
        let mut bad = series.clone();
        bad.values.insert(6, 5);
        assert!(bad.check_multiplicative().is_err());
    }
}
