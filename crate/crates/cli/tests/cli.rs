use std::path::Path;
use std::process::{Command, Output};

use ty3_core::report::ReportDocument;
use ty3_core::Status;

fn ty3(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ty3"))
        .args(args)
        .env("TY3_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn report(path: &Path) -> ReportDocument {
    ReportDocument::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn pbw_at_weight_one_reports_dimension_three() {
    let dir = tempfile::tempdir().unwrap();
    let r = dir.path().join("pbw.json");
    let out = ty3(
        &[
            "verify",
            "--suite",
            "pbw",
            "--max-weight",
            "1",
            "--report",
            r.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let doc = report(&r);
    let ids: Vec<&str> = doc.suites[0]
        .instances
        .iter()
        .map(|i| i.id.as_str())
        .collect();
    for family in ["mno-s", "drinfeld-e", "drinfeld-f"] {
        assert!(ids.contains(&format!("count[{family},W=1,dim=3]").as_str()));
    }
    assert!(doc.summary.ok);
    // The env override chose the cache directory.
    assert!(dir.path().join("tables-v1-n1.txt").exists());
}

#[test]
fn mutation_flips_the_exit_code_and_diff_sees_it() {
    let dir = tempfile::tempdir().unwrap();
    let clean = dir.path().join("clean.json");
    let mutated = dir.path().join("mutated.json");
    let base = ["verify", "--suite", "theorem11", "--max-weight", "5"];
    let run = |extra: &[&str], report: &Path| {
        let mut args = base.to_vec();
        args.extend_from_slice(extra);
        args.extend_from_slice(&["--report", report.to_str().unwrap()]);
        ty3(&args, dir.path())
    };
    assert_eq!(run(&[], &clean).status.code(), Some(0));
    assert_eq!(
        run(&["--mutate", "rel:GG"], &mutated).status.code(),
        Some(1)
    );
    let doc = report(&mutated);
    assert!(doc.suites[0]
        .instances
        .iter()
        .any(|i| i.id.starts_with("GG") && i.status == Status::Fail));

    let diff = |a: &Path, b: &Path| {
        ty3(
            &["report-diff", a.to_str().unwrap(), b.to_str().unwrap()],
            dir.path(),
        )
    };
    assert_eq!(diff(&clean, &mutated).status.code(), Some(1));
    assert_eq!(diff(&clean, &clean).status.code(), Some(0));
}

#[test]
fn cached_tables_are_truncated_and_tampering_rebuilds() {
    let dir = tempfile::tempdir().unwrap();
    let out = ty3(&["build-tables", "--max-weight", "3"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let cached = dir.path().join("tables-v1-n3.txt");
    assert!(cached.exists());

    let via_cache = dir.path().join("a.json");
    let fresh = dir.path().join("b.json");
    let verify = |r: &Path, extra: &[&str]| {
        let mut v = vec!["verify", "--suite", "rtt", "--max-weight", "2"];
        v.extend_from_slice(extra);
        v.extend_from_slice(&["--report", r.to_str().unwrap()]);
        ty3(&v, dir.path()).status.code()
    };
    assert_eq!(verify(&via_cache, &[]), Some(0));
    assert_eq!(verify(&fresh, &["--no-cache"]), Some(0));
    assert_eq!(report(&via_cache).table_hash, report(&fresh).table_hash);

    let text = std::fs::read_to_string(&cached).unwrap();
    std::fs::write(&cached, text.replacen(" 1 ", " 1 3*", 1)).unwrap();
    let tampered = dir.path().join("c.json");
    assert_eq!(verify(&tampered, &[]), Some(0));
    let doc = report(&tampered);
    assert!(doc.warnings.iter().any(|w| w.contains("hash mismatch")));
    assert_eq!(doc.table_hash, report(&fresh).table_hash);
}

#[test]
fn bad_arguments_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = ty3(&["verify", "--suite", "nonsense"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = ty3(
        &["verify", "--suite", "pbw", "--max-weight", "2", "--k", "0"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}
