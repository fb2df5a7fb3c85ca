//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines always reach stdout. The
//! process exits non-zero only when a criterion outside `KNOWN_FAILURES`
//! fails; the known ones still print FAIL.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::Instant;

use ty3_core::verify::relations::RelFamily;
use ty3_core::verify::CLEARED_ITEMS;
use ty3_core::{run_suite, Assessment, Status, Suite, Tables, VerificationResult, VerifyParams};

const N: usize = 8;
/// Order used for the negative controls; the smallest where every
/// relation family has a nonzero instance to perturb.
const MUTATION_N: usize = 5;

/// Criteria whose printed forms disagree with the algebra (see README).
const KNOWN_FAILURES: [&str; 2] = ["cleared identities", "Molev maps"];

struct Line {
    name: &'static str,
    ok: bool,
    detail: String,
}

fn of<'a>(rs: &'a [VerificationResult], family: &str) -> Vec<&'a VerificationResult> {
    rs.iter().filter(|r| r.family == family).collect()
}

fn variant<'a>(rs: &'a [VerificationResult], family: &str, v: &str) -> Vec<&'a VerificationResult> {
    rs.iter()
        .filter(|r| r.family == family && r.variant.as_deref() == Some(v))
        .collect()
}

fn tally(rs: &[&VerificationResult]) -> (usize, usize, usize) {
    let count = |s: Status| rs.iter().filter(|r| r.status == s).count();
    (
        count(Status::Pass),
        count(Status::Fail),
        count(Status::SkippedOutOfWindow),
    )
}

/// Every instance passes, and there is at least one.
fn all_pass(rs: &[&VerificationResult]) -> bool {
    !rs.is_empty() && rs.iter().all(|r| r.status == Status::Pass)
}

fn describe(label: &str, rs: &[&VerificationResult]) -> String {
    let (p, f, s) = tally(rs);
    let mut out = format!("{label} {p}/{}", p + f + s);
    if let Some(r) = rs.iter().find(|r| r.status != Status::Pass) {
        out.push_str(&format!(
            " (first miss {} residual {})",
            r.id, r.residual_terms
        ));
    }
    out
}

fn families_line(name: &'static str, rs: &[VerificationResult], families: &[&str]) -> Line {
    let groups: Vec<Vec<&VerificationResult>> = families.iter().map(|f| of(rs, f)).collect();
    Line {
        name,
        ok: groups.iter().all(|g| all_pass(g)),
        detail: families
            .iter()
            .zip(&groups)
            .map(|(f, g)| describe(f, g))
            .collect::<Vec<_>>()
            .join(", "),
    }
}

fn relations_line(rs: &[VerificationResult]) -> Line {
    let mut ok = true;
    let mut parts = Vec::new();
    for f in RelFamily::ALL {
        let name = f.name();
        let group = of(rs, name);
        if group.iter().any(|r| r.variant.is_some()) {
            let a = Assessment::of(rs);
            let holding: Vec<&str> = a
                .variants
                .iter()
                .filter(|v| v.family == name && v.holds)
                .map(|v| v.variant.as_str())
                .collect();
            ok &= holding.len() == 1;
            parts.push(format!("{name} holding variants {holding:?}"));
        } else {
            ok &= all_pass(&group);
            if !all_pass(&group) {
                parts.push(describe(name, &group));
            }
        }
    }
    let (p, f, s) = tally(&rs.iter().collect::<Vec<_>>());
    parts.insert(
        0,
        format!(
            "{} families, {p} pass {f} fail {s} skipped",
            RelFamily::ALL.len()
        ),
    );
    Line {
        name: "relation families",
        ok: ok && s == 0,
        detail: parts.join("; "),
    }
}

fn cleared_line(rs: &[VerificationResult]) -> Line {
    let mut ok = true;
    let mut parts = Vec::new();
    for item in CLEARED_ITEMS {
        if item == "item9" {
            let holding: Vec<&str> = ["printed", "derived"]
                .into_iter()
                .filter(|v| all_pass(&variant(rs, item, v)))
                .collect();
            ok &= !holding.is_empty();
            parts.push(format!("item9 holding variants {holding:?}"));
            continue;
        }
        let group: Vec<_> = of(rs, item)
            .into_iter()
            .filter(|r| r.variant.as_deref().is_none_or(|v| v == "printed"))
            .collect();
        ok &= all_pass(&group);
        if !all_pass(&group) {
            let fixed = variant(rs, item, "corrected");
            parts.push(format!(
                "{}; {}",
                describe(&format!("{item} printed"), &group),
                describe(&format!("{item} corrected"), &fixed)
            ));
        }
    }
    let (p, f, s) = tally(&rs.iter().collect::<Vec<_>>());
    parts.insert(0, format!("{p} pass {f} fail {s} skipped"));
    Line {
        name: "cleared identities",
        ok: ok && s == 0,
        detail: parts.join("; "),
    }
}

fn molev_line(rs: &[VerificationResult]) -> Line {
    let iota = of(rs, "iota");
    let linear = of(rs, "iota-linear");
    let printed = variant(rs, "rho", "printed");
    let half = variant(rs, "rho", "half");
    Line {
        name: "Molev maps",
        ok: iota.len() == 9 && all_pass(&iota) && all_pass(&linear) && all_pass(&printed),
        detail: format!(
            "{}, {}, {}, {}",
            describe("iota", &iota),
            describe("iota-linear", &linear),
            describe("rho printed", &printed),
            describe("rho with shift 1/2", &half)
        ),
    }
}

fn pbw_line(rs: &[VerificationResult]) -> Line {
    let mut line = families_line("PBW", rs, &["count", "independence", "span", "membership"]);
    // The low counts are fixed independently of the enumeration.
    let ids: BTreeSet<&str> = rs.iter().map(|r| r.id.as_str()).collect();
    for family in ["mno-s", "drinfeld-e", "drinfeld-f"] {
        for (w, dim) in [(1, 3), (2, 12)] {
            let id = format!("count[{family},W={w},dim={dim}]");
            if !ids.contains(id.as_str()) {
                line.ok = false;
                line.detail.push_str(&format!("; missing {id}"));
            }
        }
    }
    line
}

fn center_line(rs: &[VerificationResult]) -> Line {
    let mut line = families_line("center", rs, &["sdet", "central", "membership"]);
    for k in [1, 2] {
        for r in 1..=5 {
            let id = format!("membership{{k={k}}}[C({r})]");
            if !rs.iter().any(|x| x.id == id && x.status == Status::Pass) {
                line.ok = false;
                line.detail.push_str(&format!("; missing {id}"));
            }
        }
    }
    line
}

/// Instances that pass unperturbed and fail under `--mutate all`.
fn negative_controls(tables: &Tables) -> Line {
    let params = VerifyParams::new(MUTATION_N);
    let mutated = params.clone().with_mutation("all");
    let mut ok = true;
    let mut parts = Vec::new();
    for suite in Suite::ALL {
        let clean: BTreeMap<String, Status> = run_suite(suite, tables, &params)
            .unwrap()
            .into_iter()
            .map(|r| (r.id, r.status))
            .collect();
        let flipped = run_suite(suite, tables, &mutated)
            .unwrap()
            .into_iter()
            .filter(|r| r.status == Status::Fail && clean.get(&r.id) == Some(&Status::Pass))
            .count();
        ok &= flipped > 0;
        parts.push(format!("{suite} {flipped}"));
    }
    Line {
        name: "negative controls",
        ok,
        detail: format!("flipped at N={MUTATION_N}: {}", parts.join(", ")),
    }
}

fn main() -> ExitCode {
    // Under `cargo test -- --list` and similar, behave like an empty harness.
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let t0 = Instant::now();
    let tables = Tables::build(N).expect("tables");
    let params = VerifyParams::new(N);
    let run = |s: Suite| run_suite(s, &tables, &params).expect("suite runs");

    let rtt = run(Suite::Rtt);
    let mut lines = vec![
        families_line("RTT kernel oracle", &rtt, &["kernel"]),
        families_line("S-relations and symmetry", &rtt, &["SS", "symmetry"]),
        relations_line(&run(Suite::Theorem11)),
        cleared_line(&run(Suite::Theorem31)),
        families_line("Gauss round trip", &rtt, &["gauss"]),
        molev_line(&run(Suite::Molev)),
        pbw_line(&run(Suite::Pbw)),
        families_line(
            "shifted subalgebras",
            &run(Suite::Shifted),
            &["closure", "proper"],
        ),
    ];
    let phi = run(Suite::Phi);
    let phi_families: Vec<&str> = Suite::Phi.families();
    lines.push(families_line(
        "partial evaluation maps",
        &phi,
        &phi_families,
    ));
    lines.push(center_line(&run(Suite::Center)));
    lines.push(negative_controls(
        &tables.truncate(MUTATION_N).expect("truncate"),
    ));

    let mut unexpected = false;
    for l in &lines {
        println!(
            "{} {}: {}",
            if l.ok { "PASS" } else { "FAIL" },
            l.name,
            l.detail
        );
        unexpected |= !l.ok && !KNOWN_FAILURES.contains(&l.name);
    }
    eprintln!("acceptance finished in {:.1?}", t0.elapsed());
    if unexpected {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
