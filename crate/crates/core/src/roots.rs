//! Exact integer roots of univariate polynomials with arbitrary-precision
//! coefficients.
//!
//! Degrees ≤ 2 are solved directly. For higher degree the roots are found
//! modularly: pick 64-bit primes q whose product exceeds twice a bound on
//! the magnitude of any integer root, compute the roots of f mod q via
//! gcd(X^q − X, f) and equal-degree-1 splitting, lift candidates by CRT to
//! balanced representatives, and keep exactly those that evaluate to zero
//! in exact arithmetic. Every true integer root survives reduction mod
//! every q, so the candidate set is complete; the final exact evaluation
//! removes the spurious ones. No floating point anywhere.
//!
//! `integer_roots` derives the root bound from the coefficients (Cauchy
//! bound). `integer_roots_bounded` takes a caller-supplied bound instead,
//! which keeps the modulus small when the caller knows the real roots are
//! far below the Cauchy bound — the even Thue polynomials specialized at a
//! fixed trace are the motivating case.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::next_prime_above;

/// Montgomery arithmetic mod an odd 64-bit prime; the polynomial work below
/// is multiplication-bound and this halves the cost of each product.
#[derive(Clone, Copy)]
struct Mont {
    q: u64,
    q_neg_inv: u64, // -q^{-1} mod 2^64
    r2: u64,        // 2^128 mod q
}

impl Mont {
    fn new(q: u64) -> Self {
        debug_assert!(q % 2 == 1);
        // Newton iteration for the inverse of q mod 2^64.
        let mut inv = q;
        for _ in 0..5 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(q.wrapping_mul(inv)));
        }
        let r = (u64::MAX % q) + 1; // 2^64 mod q
        let r2 = ((r as u128 * r as u128) % q as u128) as u64;
        Mont { q, q_neg_inv: inv.wrapping_neg(), r2 }
    }

    #[inline]
    fn redc(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.q_neg_inv);
        let t2 = (t + m as u128 * self.q as u128) >> 64;
        let t2 = t2 as u64;
        if t2 >= self.q {
            t2 - self.q
        } else {
            t2
        }
    }

    #[inline]
    fn to_mont(&self, a: u64) -> u64 {
        self.redc(a as u128 * self.r2 as u128)
    }

    #[inline]
    fn from_mont(&self, a: u64) -> u64 {
        self.redc(a as u128)
    }

    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        self.redc(a as u128 * b as u128)
    }

    #[inline]
    fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    fn pow(&self, mut base: u64, mut e: u64) -> u64 {
        let mut acc = self.to_mont(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn inv(&self, a: u64) -> u64 {
        self.pow(a, self.q - 2)
    }
}

/// Dense polynomial mod q in Montgomery form, lowest degree first, no
/// leading zeros (empty = zero polynomial).
#[derive(Clone)]
struct PolyMod {
    c: Vec<u64>,
}

impl PolyMod {
    fn deg(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    fn trim(mut self) -> Self {
        while self.c.last() == Some(&0) {
            self.c.pop();
        }
        self
    }

    fn mul(&self, other: &PolyMod, m: &Mont) -> PolyMod {
        if self.is_zero() || other.is_zero() {
            return PolyMod { c: vec![] };
        }
        let mut out = vec![0u64; self.c.len() + other.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.c.iter().enumerate() {
                out[i + j] = m.add(out[i + j], m.mul(a, b));
            }
        }
        PolyMod { c: out }.trim()
    }

    /// Remainder modulo a monic polynomial.
    fn rem_monic(&self, modulus: &PolyMod, m: &Mont) -> PolyMod {
        let d = modulus.deg();
        debug_assert_eq!(modulus.c[d], m.to_mont(1));
        let mut r = self.c.clone();
        while r.len() > d {
            let lead = *r.last().unwrap();
            let shift = r.len() - 1 - d;
            if lead != 0 {
                for i in 0..d {
                    let t = m.mul(lead, modulus.c[i]);
                    r[shift + i] = m.sub(r[shift + i], t);
                }
            }
            r.pop();
        }
        PolyMod { c: r }.trim()
    }

    fn make_monic(&self, m: &Mont) -> PolyMod {
        if self.is_zero() {
            return self.clone();
        }
        let lead = *self.c.last().unwrap();
        let inv = m.inv(m.from_mont(lead));
        let inv_mont = m.to_mont(inv);
        PolyMod { c: self.c.iter().map(|&x| m.mul(x, inv_mont)).collect() }
    }

    fn gcd(mut a: PolyMod, mut b: PolyMod, m: &Mont) -> PolyMod {
        while !b.is_zero() {
            let b_monic = b.make_monic(m);
            let r = a.rem_monic(&b_monic, m);
            a = b_monic;
            b = r;
        }
        a.make_monic(m)
    }

    /// X^e mod self (self monic), by square-and-multiply over the bits of e.
    fn x_pow_mod(&self, e: u64, m: &Mont) -> PolyMod {
        let mut acc = PolyMod { c: vec![m.to_mont(1)] };
        let x = PolyMod { c: vec![0, m.to_mont(1)] }.rem_monic(self, m);
        let bits = 64 - e.leading_zeros();
        for i in (0..bits).rev() {
            acc = acc.mul(&acc, m).rem_monic(self, m);
            if (e >> i) & 1 == 1 {
                acc = acc.mul(&x, m).rem_monic(self, m);
            }
        }
        acc
    }
}

/// Roots of f mod q, where f is given by exact coefficients.
fn roots_mod_q(coeffs: &[BigInt], q: u64) -> Vec<u64> {
    let m = Mont::new(q);
    let qb = BigInt::from(q);
    let reduced: Vec<u64> = coeffs
        .iter()
        .map(|c| m.to_mont(c.mod_floor(&qb).to_u64().unwrap()))
        .collect();
    let f = (PolyMod { c: reduced }).trim();
    if f.is_zero() {
        // The whole polynomial vanished mod q; caller must choose another
        // prime. Cannot happen when the leading coefficient is ±1.
        panic!("polynomial vanishes mod {q}");
    }
    if f.deg() == 0 {
        return vec![];
    }
    let f = f.make_monic(&m);
    // gcd(X^q − X, f) is the product of the distinct linear factors.
    let xq = f.x_pow_mod(q, &m);
    let mut xq_minus_x = xq;
    // subtract X
    while xq_minus_x.c.len() < 2 {
        xq_minus_x.c.push(0);
    }
    xq_minus_x.c[1] = m.sub(xq_minus_x.c[1], m.to_mont(1));
    let linears = PolyMod::gcd(f.clone(), xq_minus_x.trim(), &m);
    let mut roots = Vec::new();
    split_linear_factors(&linears, &m, q, &mut roots, &mut 0x9e3779b97f4a7c15u64);
    roots.sort_unstable();
    roots.dedup();
    roots
}

/// Cantor–Zassenhaus equal-degree splitting specialized to degree-1 factors.
fn split_linear_factors(h: &PolyMod, m: &Mont, q: u64, out: &mut Vec<u64>, seed: &mut u64) {
    match h.deg() {
        0 => {}
        1 => {
            // monic X + c0: root = −c0.
            let c0 = m.from_mont(h.c[0]);
            out.push(if c0 == 0 { 0 } else { q - c0 });
        }
        _ => {
            // 0 is a root iff the constant term vanishes.
            if h.c[0] == 0 {
                out.push(0);
                let shifted = PolyMod { c: h.c[1..].to_vec() };
                split_linear_factors(&shifted, m, q, out, seed);
                return;
            }
            loop {
                // (X + s)^((q−1)/2) − 1 splits the roots by quadratic
                // character of (root + s); a fixed LCG supplies the shifts.
                *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let s = *seed % q;
                let shift = PolyMod { c: vec![m.to_mont(s), m.to_mont(1)] };
                let pow = poly_pow_mod(&shift, (q - 1) / 2, h, m);
                let mut w = pow;
                if w.c.is_empty() {
                    w.c.push(0);
                }
                w.c[0] = m.sub(w.c[0], m.to_mont(1));
                let g = PolyMod::gcd(h.clone(), w.trim(), m);
                let dg = if g.is_zero() { 0 } else { g.deg() };
                if dg > 0 && dg < h.deg() {
                    let rest = divide_out(h, &g, m);
                    split_linear_factors(&g, m, q, out, seed);
                    split_linear_factors(&rest, m, q, out, seed);
                    return;
                }
            }
        }
    }
}

fn poly_pow_mod(base: &PolyMod, mut e: u64, modulus: &PolyMod, m: &Mont) -> PolyMod {
    let mut acc = PolyMod { c: vec![m.to_mont(1)] };
    let mut b = base.rem_monic(modulus, m);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&b, m).rem_monic(modulus, m);
        }
        b = b.mul(&b, m).rem_monic(modulus, m);
        e >>= 1;
    }
    acc
}

/// Exact quotient h / g for monic g | h.
fn divide_out(h: &PolyMod, g: &PolyMod, m: &Mont) -> PolyMod {
    let mut r = h.c.clone();
    let dg = g.deg();
    let mut quot = vec![0u64; r.len() - dg];
    while r.len() > dg {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dg;
        quot[shift] = lead;
        if lead != 0 {
            for i in 0..=dg {
                let t = m.mul(lead, g.c[i]);
                r[shift + i] = m.sub(r[shift + i], t);
            }
        } else {
            r.pop();
            continue;
        }
        r.pop();
    }
    PolyMod { c: quot }.trim()
}

fn horner(coeffs: &[BigInt], x: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Smallest bound C with every real root of f inside |x| ≤ C
/// (Cauchy: 1 + max |c_i| / |c_lead|).
fn cauchy_bound(coeffs: &[BigInt]) -> BigInt {
    let lead = coeffs.last().unwrap().abs();
    let max_c = coeffs[..coeffs.len() - 1]
        .iter()
        .map(|c| c.abs())
        .max()
        .unwrap_or_else(BigInt::zero);
    BigInt::one() + max_c.div_ceil(&lead)
}

/// All integer roots of the polynomial (coefficients lowest-degree first),
/// with multiplicity collapsed. The zero polynomial is rejected.
pub fn integer_roots(coeffs: &[BigInt]) -> Vec<BigInt> {
    let bound = cauchy_bound(coeffs);
    integer_roots_with_bound(coeffs, &bound)
}

/// All integer roots x with |x| ≤ bound. Complete only if the caller's
/// bound really covers every integer root.
pub fn integer_roots_bounded(coeffs: &[BigInt], bound: u64) -> Vec<BigInt> {
    integer_roots_with_bound(coeffs, &BigInt::from(bound))
}

fn integer_roots_with_bound(coeffs: &[BigInt], bound: &BigInt) -> Vec<BigInt> {
    let mut c: Vec<BigInt> = coeffs.to_vec();
    while c.last().map(|x| x.is_zero()) == Some(true) {
        c.pop();
    }
    assert!(!c.is_empty(), "zero polynomial has every root");
    let mut roots: Vec<BigInt> = Vec::new();
    // Factor out X^k.
    let zeros = c.iter().take_while(|x| x.is_zero()).count();
    if zeros > 0 {
        roots.push(BigInt::zero());
        c.drain(..zeros);
    }
    match c.len() {
        1 => {}
        2 => {
            // c1 x + c0 = 0
            let (q, r) = (-&c[0]).div_rem(&c[1]);
            if r.is_zero() {
                roots.push(q);
            }
        }
        3 => {
            // Exact quadratic formula.
            let disc = &c[1] * &c[1] - BigInt::from(4) * &c[2] * &c[0];
            if disc.is_positive() || disc.is_zero() {
                let s = disc.sqrt();
                if &s * &s == disc {
                    for sign in [1i32, -1] {
                        let num = -&c[1] + BigInt::from(sign) * &s;
                        let den = BigInt::from(2) * &c[2];
                        let (q, r) = num.div_rem(&den);
                        if r.is_zero() {
                            roots.push(q);
                        }
                    }
                }
            }
        }
        _ => {
            roots.extend(modular_roots(&c, bound));
        }
    }
    roots.retain(|x| x.abs() <= bound.abs());
    roots.sort();
    roots.dedup();
    debug_assert!(roots.iter().all(|x| horner(coeffs, x).is_zero()));
    roots
}

fn modular_roots(c: &[BigInt], bound: &BigInt) -> Vec<BigInt> {
    let two_bound = BigInt::from(2) * bound + 1;
    let mut primes: Vec<u64> = Vec::new();
    let mut product = BigInt::one();
    let mut q = 1u64 << 41;
    while product < two_bound {
        q = next_prime_above(q);
        if (c.last().unwrap().mod_floor(&BigInt::from(q))).is_zero() {
            continue; // degree would drop mod q
        }
        primes.push(q);
        product *= BigInt::from(q);
    }

    // Candidate residues, CRT-extended one prime at a time.
    let mut candidates: Vec<BigInt> = vec![BigInt::zero()];
    let mut modulus = BigInt::one();
    for &q in &primes {
        let roots_q = roots_mod_q(c, q);
        let mut next: Vec<BigInt> = Vec::with_capacity(candidates.len() * roots_q.len().max(1));
        let qb = BigInt::from(q);
        // x ≡ cand (mod modulus), x ≡ r (mod q).
        let minv = mod_inverse(&modulus, &qb);
        for cand in &candidates {
            for &r in &roots_q {
                let delta = (BigInt::from(r) - cand).mod_floor(&qb);
                let t = (&delta * &minv).mod_floor(&qb);
                next.push(cand + &modulus * t);
            }
        }
        candidates = next;
        modulus *= &qb;
        assert!(
            candidates.len() <= 1 << 20,
            "candidate explosion in modular root lifting"
        );
        if candidates.is_empty() {
            return vec![];
        }
    }

    let half = &modulus >> 1;
    candidates
        .into_iter()
        .map(|x| if x > half { x - &modulus } else { x })
        .filter(|x| x.abs() <= *bound)
        .filter(|x| horner(c, x).is_zero())
        .collect()
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.extended_gcd(m);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(coeffs: &[i64]) -> Vec<BigInt> {
        coeffs.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn low_degree_cases() {
        assert_eq!(integer_roots(&poly(&[6, -5, 1])), vec![BigInt::from(2), BigInt::from(3)]);
        assert_eq!(integer_roots(&poly(&[-4, 2])), vec![BigInt::from(2)]);
        assert_eq!(integer_roots(&poly(&[1, 0, 1])), Vec::<BigInt>::new());
        assert_eq!(integer_roots(&poly(&[0, 0, 1])), vec![BigInt::zero()]);
        assert_eq!(integer_roots(&poly(&[5])), Vec::<BigInt>::new());
    }

    #[test]
    fn product_of_linear_factors() {
        // (x−1)(x−10)(x+100)(x−1000) = ...
        let roots = [1i64, 10, -100, 1000];
        let mut c = vec![BigInt::one()];
        for r in roots {
            let mut next = vec![BigInt::zero(); c.len() + 1];
            for (i, ci) in c.iter().enumerate() {
                next[i + 1] += ci;
                next[i] -= BigInt::from(r) * ci;
            }
            c = next;
        }
        let mut expected: Vec<BigInt> = roots.iter().map(|&r| BigInt::from(r)).collect();
        expected.sort();
        assert_eq!(integer_roots(&c), expected);
    }

    #[test]
    fn mixed_integer_and_irrational_roots() {
        // (x−7)(x²−2)(x²+x+1): only 7 is an integer root.
        let c = poly(&[-14, -21, -19, -12, -5, 1, 1]);
        // Recompute exactly: (x-7)(x^2-2)(x^2+x+1)
        let f1 = poly(&[-7, 1]);
        let f2 = poly(&[-2, 0, 1]);
        let f3 = poly(&[1, 1, 1]);
        let mul = |a: &[BigInt], b: &[BigInt]| {
            let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
            for (i, x) in a.iter().enumerate() {
                for (j, y) in b.iter().enumerate() {
                    out[i + j] += x * y;
                }
            }
            out
        };
        let f = mul(&mul(&f1, &f2), &f3);
        let _ = c;
        assert_eq!(integer_roots(&f), vec![BigInt::from(7)]);
    }

    #[test]
    fn repeated_roots_collapse() {
        // (x−3)³
        let f = poly(&[-27, 27, -9, 1]);
        assert_eq!(integer_roots(&f), vec![BigInt::from(3)]);
    }

    #[test]
    fn bounded_search_stays_complete_within_bound() {
        // (x − 9999)(x + 123)(x − 1)
        let f = {
            let mul = |a: &[BigInt], b: &[BigInt]| {
                let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
                for (i, x) in a.iter().enumerate() {
                    for (j, y) in b.iter().enumerate() {
                        out[i + j] += x * y;
                    }
                }
                out
            };
            let a = poly(&[-9999, 1]);
            let b = poly(&[123, 1]);
            let c = poly(&[-1, 1]);
            mul(&mul(&a, &b), &c)
        };
        assert_eq!(
            integer_roots_bounded(&f, 10_000),
            vec![BigInt::from(-123), BigInt::from(1), BigInt::from(9999)]
        );
    }

    #[test]
    fn large_coefficient_roots() {
        // (x − 10^15)(x + 10^15)(x − 5) needs >64-bit arithmetic.
        let big = BigInt::from(1_000_000_000_000_000u64);
        let f = vec![
            BigInt::from(5) * &big * &big,
            -(&big * &big),
            BigInt::from(-5),
            BigInt::one(),
        ];
        let roots = integer_roots(&f);
        assert_eq!(roots, vec![-&big, BigInt::from(5), big.clone()]);
    }
}
