//! Integer arithmetic utilities shared by every module: deterministic
//! primality testing, integer square roots, factorization, and divisor
//! enumeration.
//!
//! Everything here is exact integer arithmetic. Primality below 2^64 is
//! decided by Miller–Rabin with the 12-witness set {2, 3, ..., 37}, which is
//! deterministic for all 64-bit inputs; above 2^64 the same witness set is
//! used as a strong-probable-prime test. Factorization is trial division to
//! 10^6 followed by Brent's variant of Pollard rho with a fixed seed
//! sequence, so results are reproducible run to run.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Witnesses that make Miller–Rabin deterministic for all n < 2^64.
const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Trial-division bound used before switching to Pollard rho.
pub const TRIAL_DIVISION_BOUND: u64 = 1_000_000;

#[inline]
pub fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic primality for u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'witness: for &a in &MR_WITNESSES {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primality for signed big integers: deterministic below 2^64, a
/// strong-probable-prime test with the fixed witness set above that.
pub fn is_prime_bigint(n: &BigInt) -> bool {
    if n.sign() != num_bigint::Sign::Plus {
        return false;
    }
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    if n.is_even() {
        return false;
    }
    let one = BigInt::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d: BigInt = &n_minus_1 >> s;
    'witness: for &a in &MR_WITNESSES {
        let a = BigInt::from(a);
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Floor of the square root.
pub fn isqrt_u64(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut x = 1u64 << (n.ilog2() / 2 + 1);
    loop {
        let y = (x + n / x) >> 1;
        if y >= x {
            return x;
        }
        x = y;
    }
}

/// Floor of the square root for u128, seeded from the 64-bit root of the
/// high limb so only a couple of Newton steps are needed.
pub fn isqrt_u128(n: u128) -> u128 {
    if n <= u64::MAX as u128 {
        return isqrt_u64(n as u64) as u128;
    }
    let shift = (n.ilog2() / 2 + 1).saturating_sub(31);
    let mut x = (isqrt_u64((n >> (2 * shift.min(32))) as u64) as u128) << shift.min(32);
    x = x.max(1);
    loop {
        let y = (x + n / x) >> 1;
        if y >= x {
            return x;
        }
        x = y;
    }
}

/// Returns `Some(sqrt)` when `n` is a perfect square.
pub fn exact_sqrt_u128(n: u128) -> Option<u128> {
    // Squares are 0, 1, 4, 9 mod 16; rejecting early skips most inputs.
    match n & 15 {
        0 | 1 | 4 | 9 => {
            let r = isqrt_u128(n);
            (r * r == n).then_some(r)
        }
        _ => None,
    }
}

/// Largest integer r with r^k <= n (n > 0, k >= 1).
pub fn nth_root_bigint(n: &BigInt, k: u32) -> BigInt {
    debug_assert!(n.is_positive());
    n.nth_root(k)
}

/// If `n = p^k` exactly for the given exponent, returns the base.
pub fn exact_kth_root_bigint(n: &BigInt, k: u32) -> Option<BigInt> {
    if !n.is_positive() {
        return None;
    }
    let r = nth_root_bigint(n, k);
    (r.pow(k) == *n).then_some(r)
}

fn pollard_rho_u64(n: u64) -> u64 {
    // Brent's cycle detection with a fixed constant schedule.
    debug_assert!(n > 1 && !is_prime_u64(n) && n % 2 == 1);
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod_u64(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        let mut count = 0u64;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd_u64(x.abs_diff(y), n);
            count += 1;
            if count > 1 << 22 {
                break;
            }
        }
        if d != n && d != 1 {
            return d;
        }
        c += 1;
    }
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Full factorization of a positive u64, returned as sorted (prime, exponent)
/// pairs.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    if n < 2 {
        return out;
    }
    for p in [2u64, 3, 5] {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    let mut d = 7u64;
    let increments = [4u64, 2, 4, 2, 4, 6, 2, 6];
    let mut idx = 0;
    while d <= TRIAL_DIVISION_BOUND && d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += increments[idx];
        idx = (idx + 1) % increments.len();
    }
    if n > 1 {
        factor_with_rho(n, &mut out);
    }
    out.sort_unstable();
    merge_exponents(out)
}

fn factor_with_rho(n: u64, out: &mut Vec<(u64, u32)>) {
    if n == 1 {
        return;
    }
    if is_prime_u64(n) {
        out.push((n, 1));
        return;
    }
    let d = pollard_rho_u64(n);
    factor_with_rho(d, out);
    factor_with_rho(n / d, out);
}

fn merge_exponents(sorted: Vec<(u64, u32)>) -> Vec<(u64, u32)> {
    let mut merged: Vec<(u64, u32)> = Vec::with_capacity(sorted.len());
    for (p, e) in sorted {
        match merged.last_mut() {
            Some((q, f)) if *q == p => *f += e,
            _ => merged.push((p, e)),
        }
    }
    merged
}

/// Factor a positive BigInt: trial division to 10^6, then Pollard rho on the
/// remaining cofactor. Intended for the reduced primitive parts of Lucas
/// terms, which stay well inside rho's comfortable range for n <= 60.
pub fn factor_bigint(n: &BigInt) -> Vec<(BigInt, u32)> {
    let mut n = n.abs();
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    if n <= BigInt::one() {
        return out;
    }
    if let Some(small) = n.to_u64() {
        return factor_u64(small)
            .into_iter()
            .map(|(p, e)| (BigInt::from(p), e))
            .collect();
    }
    for p in SmallPrimes::new(TRIAL_DIVISION_BOUND) {
        let pb = BigInt::from(p);
        if (&n % &pb).is_zero() {
            let mut e = 0;
            while (&n % &pb).is_zero() {
                n /= &pb;
                e += 1;
            }
            out.push((pb, e));
        }
        if let Some(small) = n.to_u64() {
            for (q, f) in factor_u64(small) {
                out.push((BigInt::from(q), f));
            }
            n = BigInt::one();
            break;
        }
    }
    if n > BigInt::one() {
        factor_bigint_rho(&n, &mut out);
    }
    out.sort();
    let mut merged: Vec<(BigInt, u32)> = Vec::with_capacity(out.len());
    for (p, e) in out {
        match merged.last_mut() {
            Some((q, f)) if *q == p => *f += e,
            _ => merged.push((p, e)),
        }
    }
    merged
}

fn factor_bigint_rho(n: &BigInt, out: &mut Vec<(BigInt, u32)>) {
    if n.is_one() {
        return;
    }
    if is_prime_bigint(n) {
        out.push((n.clone(), 1));
        return;
    }
    let d = pollard_rho_bigint(n);
    factor_bigint_rho(&d, out);
    factor_bigint_rho(&(n / &d), out);
}

fn pollard_rho_bigint(n: &BigInt) -> BigInt {
    let one = BigInt::one();
    let mut c = BigInt::one();
    loop {
        let f = |x: &BigInt| (x * x + &c) % n;
        let mut x = BigInt::from(2);
        let mut y = BigInt::from(2);
        let mut d = BigInt::one();
        let mut iters = 0u64;
        while d == one {
            x = f(&x);
            y = f(&f(&y));
            d = (&x - &y).abs().gcd(n);
            iters += 1;
            if iters > 1 << 24 {
                break;
            }
        }
        if d != one && &d != n {
            return d;
        }
        c += 1;
    }
}

/// Iterator over primes up to a bound, backed by a bit sieve.
pub struct SmallPrimes {
    sieve: Vec<bool>,
    next: usize,
}

impl SmallPrimes {
    pub fn new(limit: u64) -> Self {
        let limit = limit as usize;
        let mut sieve = vec![true; limit + 1];
        if limit >= 1 {
            sieve[0] = false;
            sieve[1] = false;
        }
        let mut i = 2usize;
        while i * i <= limit {
            if sieve[i] {
                let mut j = i * i;
                while j <= limit {
                    sieve[j] = false;
                    j += i;
                }
            }
            i += 1;
        }
        SmallPrimes { sieve, next: 2 }
    }
}

impl Iterator for SmallPrimes {
    type Item = u64;
    fn next(&mut self) -> Option<u64> {
        while self.next < self.sieve.len() {
            let n = self.next;
            self.next += 1;
            if self.sieve[n] {
                return Some(n as u64);
            }
        }
        None
    }
}

/// Sieve of smallest prime factors, used to build multiplicative series.
pub fn smallest_prime_factor_sieve(limit: usize) -> Vec<u32> {
    let mut spf = vec![0u32; limit + 1];
    for i in 2..=limit {
        if spf[i] == 0 {
            let mut j = i;
            while j <= limit {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

/// All odd divisors > 1 of n, sorted ascending.
pub fn odd_divisors(n: u64) -> Vec<u64> {
    let odd_part_factors: Vec<(u64, u32)> = factor_u64(n)
        .into_iter()
        .filter(|&(p, _)| p != 2)
        .collect();
    let mut divs = vec![1u64];
    for (p, e) in odd_part_factors {
        let mut extended = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d in &divs {
            let mut pe = 1u64;
            for _ in 0..=e {
                extended.push(d * pe);
                pe *= p;
            }
        }
        divs = extended;
    }
    divs.sort_unstable();
    divs.retain(|&d| d > 1);
    divs
}

/// The odd prime divisors of n, sorted ascending.
pub fn odd_prime_divisors(n: u64) -> Vec<u64> {
    factor_u64(n)
        .into_iter()
        .map(|(p, _)| p)
        .filter(|&p| p != 2)
        .collect()
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime_above(mut n: u64) -> u64 {
    if n < 2 {
        return 2;
    }
    n += 1;
    if n % 2 == 0 {
        n += 1;
    }
    while !is_prime_u64(n) {
        n += 2;
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_small_and_carmichael() {
        assert!(is_prime_u64(2));
        assert!(is_prime_u64(97));
        assert!(is_prime_u64(2_147_483_647));
        assert!(!is_prime_u64(561)); // Carmichael
        assert!(!is_prime_u64(1));
        assert!(!is_prime_u64(25326001));
    }

    #[test]
    fn isqrt_boundaries() {
        for n in 0..1000u64 {
            let r = isqrt_u64(n);
            assert!(r * r <= n && (r + 1) * (r + 1) > n, "n={n}");
        }
        let big: u128 = (1 << 100) + 12345;
        let r = isqrt_u128(big);
        assert!(r * r <= big && (r + 1) * (r + 1) > big);
        assert_eq!(exact_sqrt_u128(144), Some(12));
        assert_eq!(exact_sqrt_u128(145), None);
    }

    #[test]
    fn factor_roundtrip() {
        for n in [2u64, 12, 120, 5040, 1_000_003, 2_147_483_647, 600_851_475_143] {
            let f = factor_u64(n);
            let back: u64 = f.iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(back, n);
            assert!(f.iter().all(|&(p, _)| is_prime_u64(p)));
        }
    }

    #[test]
    fn factor_bigint_roundtrip() {
        let n = BigInt::from(24475u64) * BigInt::from(1_000_000_007u64);
        let f = factor_bigint(&n);
        let back: BigInt = f.iter().map(|(p, e)| p.pow(*e)).product();
        assert_eq!(back, n);
    }

    #[test]
    fn odd_divisor_enumeration() {
        assert_eq!(odd_divisors(120), vec![3, 5, 15]);
        assert_eq!(odd_prime_divisors(29 * 28 * 30), vec![3, 5, 7, 29]);
        assert_eq!(odd_divisors(8), Vec::<u64>::new());
    }

    #[test]
    fn next_prime_steps() {
        assert_eq!(next_prime_above(1), 2);
        assert_eq!(next_prime_above(2), 3);
        assert_eq!(next_prime_above(1_000_000_000_000), 1_000_000_000_039);
    }
}
