//! Run configuration and the JSON report document.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::twisted::Tables;
use crate::verify::{
    run_suite, Assessment, Status, Suite, VariantVerdict, VerificationResult, VerifyParams,
};

/// Schema version of [`ReportDocument`].
pub const REPORT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub max_weight: usize,
    pub suites: Vec<Suite>,
    pub ks: Vec<u32>,
    pub report: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub strict: bool,
    pub mutate: Option<String>,
    pub pbw_weight: Option<u32>,
    pub shifted_weight: Option<u32>,
    pub phi_order: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            max_weight: 8,
            suites: Suite::ALL.to_vec(),
            ks: vec![1, 2],
            report: None,
            cache_dir: None,
            jobs: None,
            strict: false,
            mutate: None,
            pbw_weight: None,
            shifted_weight: None,
            phi_order: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_weight < 1 {
            return Err(Error::Config("max weight must be positive".into()));
        }
        if self.ks.iter().any(|&k| k < 1) {
            return Err(Error::Config("k values must be at least 1".into()));
        }
        if self.suites.is_empty() {
            return Err(Error::Config("no suites selected".into()));
        }
        Ok(())
    }

    /// Suite parameters, with the per-suite bounds capped by the table order.
    pub fn params(&self) -> VerifyParams {
        let n = self.max_weight;
        let mut p = VerifyParams::new(n);
        p.ks = self.ks.clone();
        if let Some(w) = self.pbw_weight {
            p.pbw_weight = w.min(n as u32);
        }
        if let Some(w) = self.shifted_weight {
            p.shifted_weight = w.min(n as u32);
        }
        if let Some(o) = self.phi_order {
            p.phi_order = o.min(n);
        }
        match &self.mutate {
            Some(m) => p.with_mutation(m),
            None => p,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub id: String,
    pub status: Status,
    pub residual_terms: usize,
    pub ms: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub instances: Vec<InstanceRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    /// Failures outside multi-variant families.
    pub counted_failures: usize,
    pub variants: Vec<VariantVerdict>,
    /// `suite/family` pairs where no variant holds.
    pub unresolved_variants: Vec<String>,
    pub ok: bool,
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub version: u32,
    pub tool_version: String,
    pub config: RunConfig,
    pub table_hash: String,
    pub suites: Vec<SuiteReport>,
    pub summary: Summary,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl ReportDocument {
    pub fn from_results(
        config: &RunConfig,
        table_hash: String,
        results: &[VerificationResult],
        elapsed_ms: f64,
        warnings: Vec<String>,
    ) -> Self {
        let mut by_suite: BTreeMap<Suite, Vec<InstanceRecord>> = BTreeMap::new();
        for r in results {
            by_suite.entry(r.suite).or_default().push(InstanceRecord {
                id: r.id.clone(),
                status: r.status,
                residual_terms: r.residual_terms,
                ms: r.ms,
                detail: r.detail.clone(),
            });
        }
        let a = Assessment::of(results);
        let summary = Summary {
            total: a.total,
            passed: a.passed,
            failed: a.failed,
            skipped: a.skipped,
            counted_failures: a.counted_failures,
            unresolved_variants: a
                .unresolved_variants()
                .into_iter()
                .map(|(s, f)| format!("{s}/{f}"))
                .collect(),
            ok: a.ok(config.strict),
            variants: a.variants,
            elapsed_ms,
        };
        ReportDocument {
            version: REPORT_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            config: config.clone(),
            table_hash,
            suites: by_suite
                .into_iter()
                .map(|(suite, instances)| SuiteReport { suite, instances })
                .collect(),
            summary,
            warnings,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: ReportDocument = serde_json::from_str(s)?;
        if doc.version != REPORT_VERSION {
            return Err(Error::Config(format!(
                "report schema version {} is not {REPORT_VERSION}",
                doc.version
            )));
        }
        Ok(doc)
    }
}

/// Runs the configured suites on prebuilt tables.
pub fn run(
    config: &RunConfig,
    tables: &Tables,
    table_hash: String,
    warnings: Vec<String>,
) -> Result<ReportDocument> {
    config.validate()?;
    let params = config.params();
    let t0 = Instant::now();
    let mut results = Vec::new();
    for &suite in &config.suites {
        results.extend(run_suite(suite, tables, &params)?);
    }
    let elapsed = t0.elapsed().as_secs_f64() * 1e3;
    Ok(ReportDocument::from_results(
        config, table_hash, &results, elapsed, warnings,
    ))
}

/// An instance whose status differs between two reports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StatusChange {
    pub suite: Suite,
    pub id: String,
    pub before: Option<Status>,
    pub after: Option<Status>,
}

/// Status changes from `a` to `b`, including instances present in only one.
pub fn diff_reports(a: &ReportDocument, b: &ReportDocument) -> Vec<StatusChange> {
    let index = |d: &ReportDocument| -> BTreeMap<(Suite, String), Status> {
        d.suites
            .iter()
            .flat_map(|s| {
                s.instances
                    .iter()
                    .map(|i| ((s.suite, i.id.clone()), i.status))
            })
            .collect()
    };
    let (ia, ib) = (index(a), index(b));
    let mut keys: Vec<&(Suite, String)> = ia.keys().chain(ib.keys()).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter()
        .filter_map(|k| {
            let (before, after) = (ia.get(k).copied(), ib.get(k).copied());
            (before != after).then(|| StatusChange {
                suite: k.0,
                id: k.1.clone(),
                before,
                after,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_run(mutate: Option<&str>) -> ReportDocument {
        let tables = Tables::build(2).unwrap();
        let config = RunConfig {
            max_weight: 2,
            suites: vec![Suite::Pbw],
            mutate: mutate.map(Into::into),
            ..RunConfig::default()
        };
        run(&config, &tables, "h".into(), vec![]).unwrap()
    }

    #[test]
    fn summary_matches_the_arrays() {
        let doc = small_run(None);
        let n: usize = doc.suites.iter().map(|s| s.instances.len()).sum();
        assert_eq!(doc.summary.total, n);
        let pass = doc
            .suites
            .iter()
            .flat_map(|s| &s.instances)
            .filter(|i| i.status == Status::Pass)
            .count();
        assert_eq!(doc.summary.passed, pass);
        assert!(doc.summary.ok);
    }

    #[test]
    fn json_round_trip_and_diff() {
        let a = small_run(None);
        let back = ReportDocument::from_json(&a.to_json().unwrap()).unwrap();
        assert_eq!(back, a);
        let b = small_run(Some("count"));
        let changes = diff_reports(&a, &b);
        assert!(!changes.is_empty());
        assert!(changes.iter().all(|c| c.after == Some(Status::Fail)));
        assert!(diff_reports(&a, &back).is_empty());
    }

    #[test]
    fn schema_field_names() {
        let v: serde_json::Value =
            serde_json::from_str(&small_run(None).to_json().unwrap()).unwrap();
        for key in ["version", "config", "table_hash", "suites", "summary"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        let inst = &v["suites"][0]["instances"][0];
        for key in ["id", "status", "residual_terms", "ms"] {
            assert!(inst.get(key).is_some(), "{key}");
        }
        assert_eq!(v["suites"][0]["suite"], "pbw");
    }
}
