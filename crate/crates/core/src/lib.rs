//! Decides whether a given odd prime ℓ (either sign) can appear as a
//! Fourier coefficient a(n) of an integer-coefficient newform whose
//! residual mod-2 representation is trivial, and if so, pins down exactly
//! where. Verdicts come with machine-checkable certificates.
//!
//! The machinery, bottom up:
//!
//! * [`lucas`] — Lucas sequences, primitive prime divisors, ranks of
//!   apparition; a(p^{m}) is the Lucas term u_{m+1} of the Frobenius pair.
//! * [`hecke`] — local coefficient arithmetic: the prime-power recurrence,
//!   multiplicativity, parity under the mod-2-trivial hypothesis, level
//!   rules.
//! * [`defects`] — the classification tables of Lucas terms without
//!   primitive prime divisors, encoded as data and re-verified by the
//!   recurrence.
//! * [`congruence`] — torsion-point congruences: admissible (p, d) residue
//!   pairs, divisor-class exclusions, the prime-power rule.
//! * [`thue`] — the even Thue polynomials and the per-divisor solvers
//!   (d = 3 family, d = 5 quartic, exact bounded root search for d ≥ 7).
//! * [`roots`] — exact integer roots of univariate polynomials over the
//!   integers, used by the d ≥ 7 solver.
//! * [`curves`] — brute-force point counting, torsion probes, and
//!   coefficient-series scans used as a ground-truth oracle.
//! * [`sieve`] — the per-target decision pipeline and its certificates.
//! * [`batch`] — batch runs diffed against the published verdict lists.
//! * [`report`] — report documents and the on-disk result cache.

pub mod arith;
pub mod batch;
pub mod congruence;
pub mod curves;
pub mod defects;
pub mod hecke;
pub mod lucas;
pub mod report;
pub mod roots;
pub mod sieve;
pub mod thue;

pub use congruence::{admissible_pairs, filter_divisor, CongruenceSet, TorsionContext};
pub use curves::CurveSpec;
pub use defects::{defective_matches, is_defect_free_target, verify_tables};
pub use hecke::{coeff_multiplicative, coeff_prime_power, FrobeniusPair};
pub use lucas::{lucas_term, make_lucas_pair, LucasPair, LucasTermIndex};
pub use report::{run_sieve_cached, ResultCache, SieveReport};
pub use sieve::{candidate_divisors, run_sieve, Bounds, SieveTask, Verdict, VerdictKind};
pub use thue::{solve_d3, solve_d5_weight2, solve_higher, thue_poly, SolutionRecord, SolverOutcome};
