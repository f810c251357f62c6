//! Report documents and the on-disk result cache.
//!
//! One report per task, with stable field names and deterministic
//! content, so identical invocations diff clean. Cache keys encode the
//! full task (target, weight, torsion, bounds, flags) in the filename;
//! a hit replays the stored certificate instead of recomputing.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::defects::CATALOG_VERSION;
use crate::sieve::{run_sieve, SieveError, SieveTask, Verdict};
use crate::thue::SolutionRecord;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SieveReport {
    pub task: SieveTask,
    pub verdict: Verdict,
    /// Every exact solution the solvers produced, accepted or rejected,
    /// with congruence status marked.
    pub solutions: Vec<SolutionRecord>,
    pub bounds: crate::sieve::Bounds,
    pub catalog_version: String,
    pub pipeline_version: String,
}

impl SieveReport {
    pub fn from_verdict(task: SieveTask, verdict: Verdict) -> Self {
        let mut solutions = verdict.witnesses.clone();
        solutions.extend(verdict.rejected.iter().map(|r| r.record.clone()));
        solutions.sort_by_key(|r| (r.d, r.a_p.unsigned_abs(), r.p, r.chi));
        solutions.dedup();
        SieveReport {
            bounds: task.bounds,
            task,
            verdict,
            solutions,
            catalog_version: CATALOG_VERSION.into(),
            pipeline_version: crate::sieve::PIPELINE_VERSION.into(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Filesystem cache keyed by the full task parameters.
#[derive(Debug, Clone)]
pub struct ResultCache {
    dir: PathBuf,
}

pub const CACHE_ENV_VAR: &str = "NFSIEVE_CACHE_DIR";
pub const DEFAULT_CACHE_DIR: &str = ".nfsieve-cache";

impl ResultCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        ResultCache { dir: dir.into() }
    }

    /// Resolution order: explicit flag, then environment, then default.
    pub fn resolve(flag: Option<&Path>) -> Self {
        if let Some(dir) = flag {
            return ResultCache::new(dir);
        }
        if let Ok(dir) = std::env::var(CACHE_ENV_VAR) {
            if !dir.is_empty() {
                return ResultCache::new(dir);
            }
        }
        ResultCache::new(DEFAULT_CACHE_DIR)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn key(task: &SieveTask) -> String {
        format!(
            "sieve_ell{}_k{}_r{}_y{}_a{}_self{}.json",
            task.ell,
            task.weight,
            task.torsion.map_or("none".to_string(), |r| r.to_string()),
            task.bounds.y_bound,
            task.bounds.a_bound,
            task.flags.include_ell_itself as u8,
        )
    }

    pub fn load(&self, task: &SieveTask) -> Option<SieveReport> {
        let path = self.dir.join(Self::key(task));
        let text = fs::read_to_string(path).ok()?;
        let report: SieveReport = serde_json::from_str(&text).ok()?;
        (report.task == *task).then_some(report)
    }

    pub fn store(&self, report: &SieveReport) -> std::io::Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let path = self.dir.join(Self::key(&report.task));
        fs::write(&path, report.to_json())?;
        Ok(path)
    }

    pub fn list(&self) -> Vec<String> {
        let mut entries: Vec<String> = fs::read_dir(&self.dir)
            .into_iter()
            .flatten()
            .flatten()
            .filter_map(|e| e.file_name().into_string().ok())
            .filter(|name| name.ends_with(".json"))
            .collect();
        entries.sort();
        entries
    }

    pub fn clear(&self) -> std::io::Result<usize> {
        let mut removed = 0;
        if let Ok(dir) = fs::read_dir(&self.dir) {
            for entry in dir.flatten() {
                if entry.file_name().to_string_lossy().ends_with(".json") {
                    fs::remove_file(entry.path())?;
                    removed += 1;
                }
            }
        }
        Ok(removed)
    }
}

/// Runs a task, going through the cache when one is supplied. The returned
/// flag says whether the report came from the cache.
pub fn run_sieve_cached(
    task: &SieveTask,
    cache: Option<&ResultCache>,
) -> Result<(SieveReport, bool), SieveError> {
    if let Some(cache) = cache {
        if let Some(report) = cache.load(task) {
            return Ok((report, true));
        }
    }
    let verdict = run_sieve(task)?;
    let report = SieveReport::from_verdict(task.clone(), verdict);
    if let Some(cache) = cache {
        let _ = cache.store(&report);
    }
    Ok((report, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sieve::{Bounds, VerdictKind};

    fn small_task() -> SieveTask {
        SieveTask {
            bounds: Bounds { y_bound: 1000, a_bound: 50 },
            ..SieveTask::weight2(-7, 3)
        }
    }

    #[test]
    fn report_roundtrip_and_determinism() {
        let verdict = run_sieve(&small_task()).unwrap();
        let report = SieveReport::from_verdict(small_task(), verdict);
        let json = report.to_json();
        let back: SieveReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
        // Bit-identical across runs.
        let verdict2 = run_sieve(&small_task()).unwrap();
        let report2 = SieveReport::from_verdict(small_task(), verdict2);
        assert_eq!(report2.to_json(), json);
    }

    #[test]
    fn cache_roundtrip() {
        let tmp = tempfile::tempdir().unwrap();
        let cache = ResultCache::new(tmp.path());
        let (report, was_cached) = run_sieve_cached(&small_task(), Some(&cache)).unwrap();
        assert!(!was_cached);
        assert_eq!(report.verdict.kind, VerdictKind::ExcludedProved);
        let (replayed, was_cached) = run_sieve_cached(&small_task(), Some(&cache)).unwrap();
        assert!(was_cached);
        assert_eq!(replayed, report);
        assert_eq!(cache.list().len(), 1);
        assert_eq!(cache.clear().unwrap(), 1);
        assert!(cache.list().is_empty());
    }
}
