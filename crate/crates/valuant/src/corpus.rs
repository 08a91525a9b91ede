//! Runs fixtures, checks them against their `<name>.expect.json` sidecars and summarizes.
//!
//! A sidecar is `{"queries": [entry, ..]}` with one entry per query, in order.
//! An entry maps result keys to expected JSON values; `"error"` expects an
//! error code instead, and `"assertions"` maps tags to expected statuses.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde_json::{json, Value as Json};

use crate::engine::{Outcome, QueryReport, Session};
use crate::error::CliError;
use crate::problem::parse_problem;
use crate::theorems::{CheckOptions, Status, ELEMENT_TAGS, RAM_TAGS};

pub const PROBLEM_EXT: &str = "problem";
pub const SIDECAR_SUFFIX: &str = ".expect.json";

#[derive(Clone, Debug)]
pub struct FixtureReport {
    pub name: String,
    /// JSON report lines, one per query (or one for a fixture-level error).
    pub lines: Vec<Json>,
    pub outcome: Outcome,
    /// Worst status per tag over the fixture's queries.
    pub tags: BTreeMap<&'static str, Status>,
    pub sidecar: Option<bool>,
}

pub fn sidecar_path(problem: &Path) -> PathBuf {
    let stem = problem.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    problem.with_file_name(format!("{stem}{SIDECAR_SUFFIX}"))
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn load_sidecar(path: &Path) -> Result<Option<Vec<Json>>, CliError> {
    if !path.exists() {
        return Ok(None);
    }
    let shown = path.display().to_string();
    let j: Json =
        serde_json::from_str(&read(path)?).map_err(|e| CliError::Json { path: shown.clone(), message: e.to_string() })?;
    match j.get("queries").and_then(Json::as_array) {
        Some(q) => Ok(Some(q.clone())),
        None => Err(CliError::Json { path: shown, message: "expected {\"queries\": [..]}".into() }),
    }
}

/// Differences between an expected entry and a query report, as `(key, expected, actual)`.
fn compare(expected: &Json, report: &QueryReport) -> Vec<(String, Json, Json)> {
    let mut out = Vec::new();
    let Some(want) = expected.as_object() else {
        return vec![("entry".into(), expected.clone(), Json::Null)];
    };
    for (key, value) in want {
        let actual = match key.as_str() {
            "error" => report.error.as_ref().map_or(Json::Null, |(code, _)| json!(code)),
            "assertions" => {
                let got: serde_json::Map<String, Json> =
                    report.assertions.iter().map(|a| (a.tag.to_string(), json!(a.status.as_str()))).collect();
                let keys = value.as_object().map(|o| o.keys().cloned().collect::<Vec<_>>()).unwrap_or_default();
                Json::Object(keys.into_iter().map(|k| (k.clone(), got.get(&k).cloned().unwrap_or(Json::Null))).collect())
            }
            _ => report.result.as_ref().and_then(|r| r.get(key)).cloned().unwrap_or(Json::Null),
        };
        if actual != *value {
            out.push((key.clone(), value.clone(), actual));
        }
    }
    out
}

fn worse(a: Status, b: Status) -> Status {
    let rank = |s: Status| match s {
        Status::NotApplicable => 0,
        Status::Pass => 1,
        Status::Fail => 2,
    };
    if rank(b) > rank(a) {
        b
    } else {
        a
    }
}

fn fixture_error(name: &str, e: &CliError) -> FixtureReport {
    FixtureReport {
        name: name.to_string(),
        lines: vec![json!({
            "fixture": name,
            "status": "error",
            "error": {"code": e.code(), "message": e.to_string()},
        })],
        outcome: Outcome::Error,
        tags: BTreeMap::new(),
        sidecar: None,
    }
}

/// Runs one problem file, with its sidecar when present.
pub fn run_file(path: &Path, opts: CheckOptions) -> FixtureReport {
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let problem = match read(path).and_then(|t| parse_problem(&t)) {
        Ok(p) => p,
        Err(e) => return fixture_error(&name, &e),
    };
    let sidecar = match load_sidecar(&sidecar_path(path)) {
        Ok(s) => s,
        Err(e) => return fixture_error(&name, &e),
    };
    let dir = path.parent().unwrap_or(Path::new("."));
    let session = Session::new(&problem, dir, opts);
    let declared = session.declared_json();
    let reports = session.run_all();

    let mut lines = Vec::new();
    let mut outcome = Outcome::Ok;
    let mut tags = BTreeMap::new();
    let mut sidecar_ok = sidecar.as_ref().map(|s| s.len() == reports.len());
    for (i, r) in reports.iter().enumerate() {
        let mut status = r.outcome();
        let mut extra = vec![("fixture".to_string(), json!(name)), ("query".to_string(), json!(i))];
        if let Some(entries) = &sidecar {
            let diffs = entries.get(i).map_or_else(
                || vec![("entry".to_string(), Json::Null, json!("no sidecar entry"))],
                |want| compare(want, r),
            );
            let expects_error = entries.get(i).and_then(|w| w.get("error")).is_some();
            if status == Outcome::Error && expects_error && diffs.is_empty() {
                status = Outcome::Ok;
            }
            if !diffs.is_empty() {
                sidecar_ok = Some(false);
                if status == Outcome::Ok {
                    status = Outcome::Fail;
                }
            }
            let shown: Vec<Json> =
                diffs.iter().map(|(k, e, a)| json!({"key": k, "expected": e, "actual": a})).collect();
            extra.push(("expected".into(), json!(if diffs.is_empty() { "match" } else { "mismatch" })));
            extra.push(("mismatches".into(), Json::Array(shown)));
        } else {
            extra.push(("expected".into(), json!("absent")));
        }
        let mut line = r.to_json(&declared, session.unibranched(), extra);
        line["status"] = json!(status.as_str());
        lines.push(line);
        for a in &r.assertions {
            let slot = tags.entry(a.tag).or_insert(Status::NotApplicable);
            *slot = worse(*slot, a.status);
        }
        outcome = outcome.max(status);
    }
    if sidecar_ok == Some(false) && outcome == Outcome::Ok {
        outcome = Outcome::Fail;
    }
    if let Some(entries) = &sidecar {
        if entries.len() > reports.len() {
            lines.push(json!({
                "fixture": name,
                "status": "fail",
                "error": null,
                "expected": "mismatch",
                "mismatches": [{"key": "queries", "expected": entries.len(), "actual": reports.len()}],
            }));
        }
    }
    FixtureReport { name, lines, outcome, tags, sidecar: sidecar_ok }
}

/// Problem files in `dir`, sorted by name.
pub fn fixtures(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let entries = std::fs::read_dir(dir).map_err(|source| CliError::Io { path: dir.display().to_string(), source })?;
    let mut out: Vec<PathBuf> = entries
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == PROBLEM_EXT))
        .collect();
    out.sort();
    Ok(out)
}

/// Runs every fixture in `dir`, one thread each; results keep the sorted order.
pub fn verify_dir(dir: &Path, opts: CheckOptions) -> Result<Vec<FixtureReport>, CliError> {
    let files = fixtures(dir)?;
    std::thread::scope(|s| {
        let handles: Vec<_> = files
            .iter()
            .map(|f| {
                std::thread::Builder::new()
                    .stack_size(64 << 20)
                    .spawn_scoped(s, move || run_file(f, opts))
                    .expect("spawn fixture thread")
            })
            .collect();
        Ok(handles.into_iter().map(|h| h.join().expect("fixture thread panicked")).collect())
    })
}

/// Exit code: 0 when everything passes, 1 on a failed assertion or sidecar mismatch, 2 on an error.
pub fn exit_code(reports: &[FixtureReport]) -> i32 {
    match reports.iter().map(|r| r.outcome.clone()).max() {
        None | Some(Outcome::Ok) => 0,
        Some(Outcome::Fail) => 1,
        Some(Outcome::Error) => 2,
    }
}

fn all_tags() -> Vec<&'static str> {
    ELEMENT_TAGS.iter().chain(RAM_TAGS).copied().collect()
}

/// The summary JSON line: per-fixture status and the fixture × tag matrix.
pub fn summary_json(reports: &[FixtureReport]) -> Json {
    let count = |o: Outcome| reports.iter().filter(|r| r.outcome == o).count();
    let table: serde_json::Map<String, Json> = reports
        .iter()
        .map(|r| {
            let row: serde_json::Map<String, Json> =
                r.tags.iter().map(|(t, s)| (t.to_string(), json!(s.as_str()))).collect();
            (r.name.clone(), json!({"status": r.outcome.as_str(), "tags": row}))
        })
        .collect();
    json!({"summary": {
        "fixtures": reports.len(),
        "ok": count(Outcome::Ok),
        "fail": count(Outcome::Fail),
        "error": count(Outcome::Error),
        "table": table,
    }})
}

/// Human-readable matrix: `P` pass, `F` fail, `-` n-a, blank when the tag never ran.
pub fn summary_table(reports: &[FixtureReport]) -> String {
    let tags = all_tags();
    let width = reports.iter().map(|r| r.name.len()).max().unwrap_or(7).max(7);
    let mut out = String::new();
    out.push_str(&format!("{:width$}  {:6}", "fixture", "status"));
    for i in 1..=tags.len() {
        out.push_str(&format!(" {i:>2}"));
    }
    out.push_str("  sidecar\n");
    for r in reports {
        out.push_str(&format!("{:width$}  {:6}", r.name, r.outcome.as_str()));
        for t in &tags {
            let c = match r.tags.get(t) {
                Some(Status::Pass) => "P",
                Some(Status::Fail) => "F",
                Some(Status::NotApplicable) => "-",
                None => " ",
            };
            out.push_str(&format!(" {c:>2}"));
        }
        let sc = match r.sidecar {
            Some(true) => "match",
            Some(false) => "MISMATCH",
            None => "none",
        };
        out.push_str(&format!("  {sc}\n"));
    }
    for (i, t) in tags.iter().enumerate() {
        out.push_str(&format!("{:>3} {t}\n", i + 1));
    }
    let failed = reports.iter().filter(|r| r.outcome != Outcome::Ok).count();
    out.push_str(&format!("{} fixtures, {} not ok\n", reports.len(), failed));
    out
}
