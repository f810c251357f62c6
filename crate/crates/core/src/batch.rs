//! Batch runs over the small-prime targets and the diff against the
//! published verdict lists.
//!
//! The published data: in the 3-torsion context, twenty values are
//! excluded outright, five positive values ≡ 1 (mod 3) are located as the
//! family n = p² with p ≡ 2 (mod 3), four values are located at a single
//! quartic point p⁴, and one (−79) is printed as located at 167⁴ even
//! though p = 167 ≡ 2 (mod 3) contradicts the mod-3 congruence for
//! a(p⁴) = −79 ≡ 2 — the batch expects that tension and records it as a
//! known discrepancy rather than conforming to it. In the 5-torsion
//! context thirteen values are excluded and the residue clauses pin down
//! the d = 3 family shapes.

use serde::{Deserialize, Serialize};

use crate::arith::SmallPrimes;
use crate::sieve::{run_sieve, Bounds, SieveFlags, SieveTask, VerdictKind};
use crate::thue::SolutionRecord;

/// Excluded values in the 3-torsion context.
pub static R3_EXCLUDED: &[i64] = &[
    -1, 1, 5, -7, 11, -13, 17, 23, -37, -43, 47, 53, 59, -61, -67, 71, -73, 83, 89, -97,
];

/// Excluded values in the 5-torsion context.
pub static R5_EXCLUDED: &[i64] = &[-1, 1, -11, 19, 29, -31, -41, 59, -61, -71, 79, 89, -691];

/// Quartic locations in the 3-torsion context: (ℓ, p, |a_p|), all at d = 5.
pub static R3_LOCATED: &[(i64, u64, i64)] = &[(29, 13, 2), (41, 43, 4), (-19, 7, 2), (-31, 7, 4)];

/// The tension case: the published table locates −79 at 167⁴ with
/// a(p) = ±8, but 167 ≡ 2 (mod 3) fails the congruence filter.
pub const R3_TENSION: (i64, u64, i64) = (-79, 167, 8);

/// Values located as the family n = p², p ≡ 2 (mod 3).
pub static R3_FAMILY: &[i64] = &[7, 13, 19, 31, 37];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BatchScope {
    /// Exactly the targets with published ground truth.
    PaperListsOnly,
    /// All signed odd primes |ℓ| < 100 plus ±1 and −691, both torsion
    /// contexts; targets without ground truth are reported, not diffed.
    AllSmallPrimes,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TargetOutcome {
    pub ell: i64,
    pub r: u64,
    pub kind: VerdictKind,
    pub witnesses: Vec<SolutionRecord>,
    pub family_residues: Vec<(u64, Vec<u64>)>,
    pub rejected: Vec<(u64, i64, u64)>,
    pub tension: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BatchReport {
    pub scope: String,
    pub outcomes: Vec<TargetOutcome>,
    /// Genuine mismatches against the published lists.
    pub diffs: Vec<String>,
    /// Known, expected discrepancies (the −79 congruence tension).
    pub expected_tensions: Vec<String>,
    /// Targets run without ground truth to diff against.
    pub unlisted: Vec<(i64, u64, String)>,
}

fn run_target(ell: i64, r: u64, bounds: Bounds) -> TargetOutcome {
    let task = SieveTask {
        ell,
        weight: 2,
        torsion: Some(r),
        bounds,
        flags: SieveFlags::default(),
    };
    let verdict = run_sieve(&task).expect("valid batch task");
    TargetOutcome {
        ell,
        r,
        kind: verdict.kind,
        witnesses: verdict.witnesses.clone(),
        family_residues: verdict
            .families
            .iter()
            .filter_map(|f| f.residue_filter.clone().map(|(m, res)| (m, res)))
            .collect(),
        rejected: verdict
            .rejected
            .iter()
            .map(|rr| (rr.record.p, rr.record.a_p, rr.record.d))
            .collect(),
        tension: !verdict.tension_flags.is_empty(),
    }
}

/// Runs the batch and diffs against the published lists.
pub fn reproduce_paper_lists(bounds: Bounds, scope: BatchScope) -> BatchReport {
    let mut targets: Vec<(i64, u64)> = Vec::new();
    match scope {
        BatchScope::PaperListsOnly => {
            for &ell in R3_EXCLUDED {
                targets.push((ell, 3));
            }
            for &(ell, _, _) in R3_LOCATED {
                targets.push((ell, 3));
            }
            targets.push((R3_TENSION.0, 3));
            for &ell in R3_FAMILY {
                targets.push((ell, 3));
            }
            for &ell in R5_EXCLUDED {
                targets.push((ell, 5));
            }
        }
        BatchScope::AllSmallPrimes => {
            let primes: Vec<i64> = SmallPrimes::new(100)
                .filter(|&p| p % 2 == 1)
                .map(|p| p as i64)
                .collect();
            for r in [3u64, 5] {
                targets.push((1, r));
                targets.push((-1, r));
                for &p in &primes {
                    targets.push((p, r));
                    targets.push((-p, r));
                }
            }
            targets.push((-691, 5));
        }
    }
    targets.sort_unstable();
    targets.dedup();

    let mut report = BatchReport {
        scope: format!("{scope:?}"),
        outcomes: Vec::new(),
        diffs: Vec::new(),
        expected_tensions: Vec::new(),
        unlisted: Vec::new(),
    };

    for &(ell, r) in &targets {
        let outcome = run_target(ell, r, bounds);
        diff_outcome(&outcome, &mut report);
        report.outcomes.push(outcome);
    }
    report
}

fn diff_outcome(out: &TargetOutcome, report: &mut BatchReport) {
    let (ell, r) = (out.ell, out.r);
    let excluded_list: &[i64] = if r == 3 { R3_EXCLUDED } else { R5_EXCLUDED };
    if excluded_list.contains(&ell) {
        if !out.kind.is_excluded() {
            report.diffs.push(format!(
                "ℓ={ell}, r={r}: published as excluded, got {:?}",
                out.kind
            ));
        }
        return;
    }
    if r == 3 {
        if let Some(&(_, p, a)) = R3_LOCATED.iter().find(|&&(l, _, _)| l == ell) {
            let exact = out.witnesses.len() == 1
                && out.witnesses[0].p == p
                && out.witnesses[0].a_p == a
                && out.witnesses[0].d == 5
                && out.kind == VerdictKind::Located;
            if !exact {
                report.diffs.push(format!(
                    "ℓ={ell}, r=3: expected the single quartic witness (p={p}, a=±{a}), got {:?} with witnesses {:?}",
                    out.kind, out.witnesses
                ));
            }
            return;
        }
        if ell == R3_TENSION.0 {
            let (_, p, a) = R3_TENSION;
            let rejected_match = out.rejected.iter().any(|&(rp, ra, rd)| (rp, ra, rd) == (p, a, 5));
            if out.kind.is_excluded() && rejected_match && out.tension {
                report.expected_tensions.push(format!(
                    "ℓ={ell}, r=3: exact solution (p={p}, a=±{a}) reproduced and rejected by the \
                     mod-3 congruence; published table lists it as located"
                ));
            } else {
                report.diffs.push(format!(
                    "ℓ={ell}, r=3: expected excluded-with-flagged-solution (p={p}, a=±{a}); got {:?} \
                     (rejected={:?}, tension={})",
                    out.kind, out.rejected, out.tension
                ));
            }
            return;
        }
        if R3_FAMILY.contains(&ell) {
            let family_ok = out.kind == VerdictKind::Located
                && out.family_residues == vec![(3u64, vec![2u64])]
                && out.witnesses.is_empty();
            if !family_ok {
                report.diffs.push(format!(
                    "ℓ={ell}, r=3: expected exactly the family n=p², p ≡ 2 (mod 3); got {:?} \
                     families {:?} witnesses {:?}",
                    out.kind, out.family_residues, out.witnesses
                ));
            }
            return;
        }
    }
    if r == 5 {
        // Residue clauses for targets not excluded: if located, the family
        // must sit at d = 3 with the published residues.
        let clause: Option<Vec<u64>> = match ell.rem_euclid(5) {
            1 => Some(vec![4]),
            2 if ell != -3 => Some(vec![2]),
            3 if ell != 3 => Some(vec![1, 3]),
            _ => None,
        };
        if let Some(expected) = clause {
            if out.kind == VerdictKind::Located {
                let bad_family = out
                    .family_residues
                    .iter()
                    .any(|(m, res)| *m != 5 || res.iter().any(|x| !expected.contains(x)));
                if bad_family || !out.witnesses.is_empty() {
                    report.diffs.push(format!(
                        "ℓ={ell}, r=5: located outside the published clause (families {:?}, witnesses {:?}, expected residues {expected:?})",
                        out.family_residues, out.witnesses
                    ));
                }
            }
            return;
        }
    }
    report
        .unlisted
        .push((ell, r, format!("{:?}", out.kind)));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_sizes() {
        assert_eq!(R3_EXCLUDED.len(), 20);
        assert_eq!(R5_EXCLUDED.len(), 13);
        assert_eq!(R3_LOCATED.len(), 4);
        assert_eq!(R3_FAMILY.len(), 5);
    }

    #[test]
    fn quick_batch_subset() {
        // A light pass over cheap members: congruence-only exclusions.
        let bounds = Bounds { y_bound: 2_000, a_bound: 60 };
        for ell in [-7i64, -13, -37, -73, -97] {
            let out = run_target(ell, 3, bounds);
            assert_eq!(out.kind, VerdictKind::ExcludedProved, "ell={ell}");
        }
        for ell in [-11i64, -31, -41, -61, -71, -691] {
            let out = run_target(ell, 5, bounds);
            assert_eq!(out.kind, VerdictKind::ExcludedProved, "ell={ell}");
        }
    }
}
