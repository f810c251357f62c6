//! The even Thue polynomials F₂ₘ(X, Y) and the per-divisor solvers for
//! a(p^{d−1}) = ℓ.
//!
//! F₂ₘ is the degree-m homogeneous polynomial with
//! F₂ₘ(χ(p)p^{k−1}, a(p)²) = a(p^{2m}); concretely F₂ₘ(B, A²) = u_{2m+1}
//! for the Lucas pair (A, B), computed here by the two-step recurrence
//! F₂ₘ = (Y − 2X)·F₂ₘ₋₂ − X²·F₂ₘ₋₄ with F₀ = 1, F₂ = Y − X. The
//! generating-function expansion of 1/(1 − √Y·T + X·T²) is kept as an
//! independent oracle in the test suite.
//!
//! Solving a(p^{d−1}) = ℓ for odd d then means solving
//! F_{d−1}(X, a²) = ℓ over integers, per even trace a:
//!
//! * d = 3: weight 2 gives the unbounded family p = a² − ℓ; odd weights
//!   reduce to difference/sum-of-squares factorizations with finitely many
//!   candidates (and none at all for χ(p) = 0).
//! * d = 5: the quartic in a is quadratic in X, solved by a square test on
//!   the discriminant 5a⁴ + 4ℓ, scanning a up to a bound.
//! * d ≥ 7: for each trace a, F_{d−1}(X, a²) = ℓ is solved exactly and
//!   completely in X by the modular integer-root finder; the only
//!   incompleteness is the trace bound, which every bounded verdict
//!   carries.
//!
//! All solver arithmetic is exact; there is no floating point anywhere.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{exact_kth_root_bigint, exact_sqrt_u128, is_prime_u64};
use crate::hecke::{coeff_prime_power, FrobeniusPair};
use crate::roots::integer_roots_bounded;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ThueError {
    #[error("divisor d = {d} is below the general solver's range; use the d=3/d=5 solvers")]
    DegreeTooSmall { d: u64 },
}

/// F₂ₘ(X, Y): homogeneous of degree m, stored densely by Y-degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvenThuePoly {
    m: u32,
    /// coeffs[j] is the coefficient of Y^j X^{m−j}.
    coeffs: Vec<i128>,
}

impl EvenThuePoly {
    pub fn m(&self) -> u32 {
        self.m
    }

    /// Coefficient of X^i Y^j (zero unless i + j = m).
    pub fn coefficient(&self, i: u32, j: u32) -> i128 {
        if i + j != self.m {
            return 0;
        }
        self.coeffs[j as usize]
    }

    pub fn eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        // Homogeneous Horner in Y/X would divide; just accumulate powers.
        let mut acc = BigInt::zero();
        let mut y_pow = BigInt::from(1);
        let mut x_pows = Vec::with_capacity(self.coeffs.len());
        let mut xp = BigInt::from(1);
        for _ in 0..self.coeffs.len() {
            x_pows.push(xp.clone());
            xp *= x;
        }
        for (j, c) in self.coeffs.iter().enumerate() {
            acc += BigInt::from(*c) * &y_pow * &x_pows[self.m as usize - j];
            y_pow *= y;
        }
        acc
    }

    /// The univariate polynomial F₂ₘ(X, a²) in X, lowest degree first.
    pub fn univariate_in_x(&self, a: u64) -> Vec<BigInt> {
        let a2 = BigInt::from(a) * BigInt::from(a);
        let mut out = vec![BigInt::zero(); self.m as usize + 1];
        let mut y_pow = BigInt::from(1);
        for (j, c) in self.coeffs.iter().enumerate() {
            // Y^j X^{m−j}: X-degree m−j.
            out[self.m as usize - j] = BigInt::from(*c) * &y_pow;
            y_pow *= &a2;
        }
        out
    }
}

/// F₂ₘ by the even-index recurrence.
pub fn thue_poly(m: u32) -> EvenThuePoly {
    assert!(m >= 1, "F₀ is the constant 1; ask for m >= 1");
    assert!(m <= 80, "coefficients would overflow i128 beyond m ≈ 90");
    let mut prev2: Vec<i128> = vec![1]; // F₀
    let mut prev: Vec<i128> = vec![-1, 1]; // F₂ = Y − X
    if m == 1 {
        return EvenThuePoly { m, coeffs: prev };
    }
    for deg in 2..=m as usize {
        let mut next = vec![0i128; deg + 1];
        for j in 0..=deg {
            let from_y = if j >= 1 { prev.get(j - 1).copied().unwrap_or(0) } else { 0 };
            let from_2x = prev.get(j).copied().unwrap_or(0);
            let from_x2 = prev2.get(j).copied().unwrap_or(0);
            next[j] = from_y - 2 * from_2x - from_x2;
        }
        prev2 = prev;
        prev = next;
    }
    EvenThuePoly { m, coeffs: prev }
}

/// Whether a solver's congruence filter has been applied to a record, and
/// with what outcome.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum CongruenceStatus {
    NotApplied,
    Pass { r: u64 },
    Fail { r: u64, p_residue: u64, allowed: Vec<u64> },
}

/// One exact solution of a(p^{d−1}) = target. Since d − 1 is even the
/// coefficient depends on a(p)² only; `a_p` stores the positive
/// representative and both signs ±a_p realize the value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub p: u64,
    pub a_p: i64,
    pub d: u64,
    pub weight: u32,
    pub chi: i8,
    pub target: i64,
    pub congruence: CongruenceStatus,
}

impl SolutionRecord {
    /// Re-derives the coefficient through the Hecke recurrence; any record
    /// handed out by a solver satisfies this exactly.
    pub fn revalidate(&self) -> bool {
        match FrobeniusPair::new(self.p, self.weight, self.chi, self.a_p) {
            Ok(fp) => {
                coeff_prime_power(&fp, (self.d - 1) as u32) == BigInt::from(self.target)
            }
            Err(_) => false,
        }
    }
}

/// A candidate family with unboundedly many potential members (genus-0
/// case): concretely p = a² − ℓ over even traces a in weight 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyDescription {
    pub d: u64,
    pub weight: u32,
    pub chi: i8,
    pub target: i64,
    pub form: String,
    /// Residues mod r that members must satisfy, once a torsion filter is
    /// applied (set by the pipeline; None from the bare solver).
    pub residue_filter: Option<(u64, Vec<u64>)>,
    /// A few smallest members, for concreteness; each revalidates.
    pub samples: Vec<SolutionRecord>,
}

/// Result of one per-divisor solve.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolverOutcome {
    /// No solutions, by a finite certificate (empty residue set, defect
    /// argument, or factorization argument).
    ExcludedProved { reason: String },
    /// No solutions found up to the stated search bound.
    ExcludedBounded { bound: u64 },
    Solutions(Vec<SolutionRecord>),
    Family(FamilyDescription),
    Unresolved { reason: String },
}

fn make_record(p: u64, a_p: i64, d: u64, weight: u32, chi: i8, target: i64) -> Option<SolutionRecord> {
    if p < 3 || !is_prime_u64(p) {
        return None;
    }
    let fp = FrobeniusPair::new(p, weight, chi, a_p).ok()?;
    if coeff_prime_power(&fp, (d - 1) as u32) != BigInt::from(target) {
        return None;
    }
    Some(SolutionRecord {
        p,
        a_p,
        d,
        weight,
        chi,
        target,
        congruence: CongruenceStatus::NotApplied,
    })
}

/// a(p²) = ℓ. Weight 2: the candidate family p = a² − ℓ (infinite, genus
/// 0). Odd weight ≥ 3: χ = 0 is impossible, χ = 1 factors as a difference
/// of squares with at most one candidate per sign, χ = −1 is a finite
/// sum-of-two-squares enumeration (empty for negative targets).
pub fn solve_d3(ell: i64, weight: u32, chi: i8) -> SolverOutcome {
    if weight == 2 {
        assert_eq!(chi, 1, "weight 2 carries the trivial character");
        let mut samples = Vec::new();
        let mut a: i64 = 2;
        // Deligne: a² ≤ 4p = 4(a² − ℓ) ⇔ 3a² ≥ 4ℓ.
        while 3 * a * a < 4 * ell {
            a += 2;
        }
        while samples.len() < 3 && a <= 2_000_000 {
            let p = a * a - ell;
            if p >= 3 {
                if let Some(rec) = make_record(p as u64, a, 3, 2, 1, ell) {
                    samples.push(rec);
                }
            }
            a += 2;
        }
        return SolverOutcome::Family(FamilyDescription {
            d: 3,
            weight: 2,
            chi: 1,
            target: ell,
            form: format!("p = a^2 - ({ell}) over even a with 3a^2 >= 4*({ell})"),
            residue_filter: None,
            samples,
        });
    }

    assert!(weight % 2 == 1 && weight >= 3);
    let half = (weight - 1) / 2;
    match chi {
        0 => SolverOutcome::ExcludedProved {
            reason: "chi(p) = 0 makes a(p^2) = a(p)^2 a perfect square, never ±prime".into(),
        },
        1 => {
            // a(p)² − (p^half)² = ℓ: |y − s|·(y + s) = |ℓ| with y ≥ 0,
            // s = p^half ≥ 1 forces y + s = |ℓ|, |y − s| = 1.
            let la = ell.unsigned_abs();
            let (y, s) = if ell > 0 {
                ((la + 1) / 2, (la - 1) / 2)
            } else {
                ((la - 1) / 2, (la + 1) / 2)
            };
            let mut recs = Vec::new();
            if s >= 2 {
                if let Some(p) = exact_kth_root_bigint(&BigInt::from(s), half) {
                    if let Some(p) = p.to_u64() {
                        if let Some(rec) = make_record(p, y as i64, 3, weight, 1, ell) {
                            recs.push(rec);
                        }
                    }
                }
            }
            if recs.is_empty() {
                SolverOutcome::ExcludedProved {
                    reason: format!(
                        "difference of squares forces p^{half} = {s}, which is not a prime power of that shape"
                    ),
                }
            } else {
                SolverOutcome::Solutions(recs)
            }
        }
        -1 => {
            if ell < 0 {
                return SolverOutcome::ExcludedProved {
                    reason: "a(p^2) = a(p)^2 + p^{k-1} > 0 cannot be negative".into(),
                };
            }
            // y² + (p^half)² = ℓ: enumerate s = p^half ≤ √ℓ.
            let mut recs = Vec::new();
            let mut s = 2u64;
            while (s as u128) * (s as u128) <= ell as u128 {
                if exact_kth_root_bigint(&BigInt::from(s), half)
                    .and_then(|p| p.to_u64())
                    .map(is_prime_u64)
                    .unwrap_or(false)
                {
                    let rest = ell as u128 - (s as u128) * (s as u128);
                    if let Some(y) = exact_sqrt_u128(rest) {
                        let p = exact_kth_root_bigint(&BigInt::from(s), half)
                            .unwrap()
                            .to_u64()
                            .unwrap();
                        if let Some(rec) = make_record(p, y as i64, 3, weight, -1, ell) {
                            recs.push(rec);
                        }
                    }
                }
                s += 1;
            }
            if recs.is_empty() {
                SolverOutcome::ExcludedProved {
                    reason: "finite sum-of-two-squares enumeration is empty".into(),
                }
            } else {
                recs.sort_by_key(|r| (r.a_p.unsigned_abs(), r.p));
                SolverOutcome::Solutions(recs)
            }
        }
        _ => unreachable!("chi in {{-1,0,1}}"),
    }
}

/// a(p⁴) = ℓ in weight 2: for each even trace y, z² = 5y⁴ + 4ℓ must be a
/// square, and then p = (3y² ± z)/2.
pub fn solve_d5_weight2(ell: i64, y_bound: u64) -> SolverOutcome {
    solve_d5(ell, 2, 1, y_bound)
}

/// The same quartic route for any supported weight: F₄(X, y²) = ℓ is
/// quadratic in X = χ(p)p^{k−1}.
pub fn solve_d5(ell: i64, weight: u32, chi: i8, y_bound: u64) -> SolverOutcome {
    assert!(weight == 2 || (weight % 2 == 1 && weight >= 3));
    if chi == 0 {
        return SolverOutcome::ExcludedProved {
            reason: "chi(p) = 0 collapses a(p^4) to a(p)^4, a fourth power".into(),
        };
    }
    let mut recs = Vec::new();
    let mut y = 2u64;
    while y <= y_bound {
        let y2 = (y as u128) * (y as u128);
        let five_y4 = 5u128.checked_mul(y2 * y2).expect("y_bound keeps 5y^4 in u128");
        let disc = five_y4 as i128 + 4 * ell as i128;
        if disc >= 0 {
            if let Some(z) = exact_sqrt_u128(disc as u128) {
                for sign in [1i128, -1] {
                    let num = 3 * y2 as i128 + sign * z as i128;
                    if num <= 0 || num % 2 != 0 {
                        continue;
                    }
                    let x = num / 2;
                    let x_big = BigInt::from(x);
                    let p = if weight == 2 {
                        u64::try_from(x).ok().filter(|&p| chi == 1 && is_prime_u64(p))
                    } else {
                        // |X| = p^{k−1} with sign χ; x > 0 here, so χ = 1
                        // (χ = −1 would need X < 0, i.e. num < 0, skipped
                        // above and handled by the negative branch below).
                        (chi == 1)
                            .then(|| exact_kth_root_bigint(&x_big, weight - 1))
                            .flatten()
                            .and_then(|p| p.to_u64())
                            .filter(|&p| is_prime_u64(p))
                    };
                    if let Some(p) = p {
                        if let Some(rec) = make_record(p, y as i64, 5, weight, chi, ell) {
                            recs.push(rec);
                        }
                    }
                }
            }
        }
        // χ = −1 (odd weight): X < 0 with |X| = p^{k−1}; X = (3y² ± z)/2 < 0
        // needs z > 3y², i.e. the minus branch with large z.
        if chi == -1 && disc >= 0 {
            if let Some(z) = exact_sqrt_u128(disc as u128) {
                let num = 3 * y2 as i128 - z as i128;
                if num < 0 && num % 2 == 0 {
                    let x_abs = BigInt::from(-num / 2);
                    if let Some(p) = exact_kth_root_bigint(&x_abs, weight - 1).and_then(|p| p.to_u64())
                    {
                        if is_prime_u64(p) {
                            if let Some(rec) = make_record(p, y as i64, 5, weight, -1, ell) {
                                recs.push(rec);
                            }
                        }
                    }
                }
            }
        }
        y += 2;
    }
    finish_solutions(recs, y_bound)
}

fn finish_solutions(mut recs: Vec<SolutionRecord>, bound: u64) -> SolverOutcome {
    if recs.is_empty() {
        SolverOutcome::ExcludedBounded { bound }
    } else {
        recs.sort_by_key(|r| (r.a_p.unsigned_abs(), r.p, r.chi));
        recs.dedup();
        SolverOutcome::Solutions(recs)
    }
}

/// a(p^{d−1}) = ℓ for odd d ≥ 7: exact and complete in X = χ(p)p^{k−1} for
/// each even trace a ≤ a_bound.
///
/// All real roots of F_{d−1}(X, a²) − ℓ satisfy |X| < a²d²/2 (the factor
/// decomposition F = ∏(a² − cⱼX) with ∏cⱼ = 1 and cⱼ ≥ 4/d² pushes |F|
/// above |ℓ| outside that range for the target sizes asserted here), so the
/// bounded root search is complete per trace.
pub fn solve_higher(
    ell: i64,
    d: u64,
    weight: u32,
    chi: i8,
    a_bound: u64,
) -> Result<SolverOutcome, ThueError> {
    assert!(d % 2 == 1, "divisors are odd");
    if d < 7 {
        return Err(ThueError::DegreeTooSmall { d });
    }
    assert!(weight == 2 || (weight % 2 == 1 && weight >= 3));
    assert!(
        ell.unsigned_abs() < 100_000,
        "root bound a²d²/2 is justified for |ℓ| < 10^5"
    );
    if chi == 0 {
        return Ok(SolverOutcome::ExcludedProved {
            reason: "chi(p) = 0 makes a(p^{d-1}) = a(p)^{d-1}, a perfect power".into(),
        });
    }
    let m = ((d - 1) / 2) as u32;
    let f = thue_poly(m);
    let traces: Vec<u64> = (1..=a_bound / 2).map(|t| 2 * t).collect();
    let mut recs: Vec<SolutionRecord> = traces
        .par_chunks(256)
        .flat_map_iter(|chunk| {
            let mut local = Vec::new();
            for &a in chunk {
                let mut poly = f.univariate_in_x(a);
                poly[0] -= BigInt::from(ell);
                let bound = a * a * d * d / 2 + 4;
                for x in integer_roots_bounded(&poly, bound) {
                    let rec = match (weight, x.sign()) {
                        (2, num_bigint::Sign::Plus) => x
                            .to_u64()
                            .filter(|&p| chi == 1 && is_prime_u64(p))
                            .and_then(|p| make_record(p, a as i64, d, 2, 1, ell)),
                        (_, num_bigint::Sign::Plus) if weight != 2 && chi == 1 => {
                            exact_kth_root_bigint(&x, weight - 1)
                                .and_then(|p| p.to_u64())
                                .filter(|&p| is_prime_u64(p))
                                .and_then(|p| make_record(p, a as i64, d, weight, 1, ell))
                        }
                        (_, num_bigint::Sign::Minus) if weight != 2 && chi == -1 => {
                            exact_kth_root_bigint(&(-&x), weight - 1)
                                .and_then(|p| p.to_u64())
                                .filter(|&p| is_prime_u64(p))
                                .and_then(|p| make_record(p, a as i64, d, weight, -1, ell))
                        }
                        _ => None,
                    };
                    if let Some(rec) = rec {
                        local.push(rec);
                    }
                }
            }
            local
        })
        .collect();
    recs.sort_by_key(|r| (r.a_p.unsigned_abs(), r.p, r.chi));
    recs.dedup();
    if recs.is_empty() {
        Ok(SolverOutcome::ExcludedBounded { bound: a_bound })
    } else {
        Ok(SolverOutcome::Solutions(recs))
    }
}

/// Weight 1 is not decided: d = 3 cannot be avoided and its fiber equation
/// y² = ±ℓ + χ(p) is an open problem; emit it and stop.
pub fn weight1_residual(ell: i64, chi: i8) -> SolverOutcome {
    let la = ell.unsigned_abs();
    let reason = match chi {
        0 => format!("y^2 = ±{la}"),
        c => format!("y^2 = ±{la} {} 1", if c > 0 { "+" } else { "-" }),
    };
    SolverOutcome::Unresolved { reason }
}
