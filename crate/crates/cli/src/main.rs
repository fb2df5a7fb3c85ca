use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use ty3_core::cache::{self, Provenance};
use ty3_core::report::{self, diff_reports, ReportDocument, RunConfig};
use ty3_core::{Status, Suite, Tables};

#[derive(Parser)]
#[command(
    name = "ty3",
    version,
    about = "Exact verification engine for the twisted Yangian Y3+"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the coefficient tables and store them in the cache.
    BuildTables {
        #[arg(long, default_value_t = 8)]
        max_weight: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Run verification suites and write a JSON report.
    Verify(VerifyArgs),
    /// Compare instance statuses of two reports; exits 1 if any differ.
    ReportDiff { before: PathBuf, after: PathBuf },
}

#[derive(Args)]
struct Common {
    /// Cache directory; defaults to $TY3_CACHE_DIR, then .ty3-cache.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suites to run, comma-separated or repeated; all when omitted.
    #[arg(long = "suite", value_delimiter = ',')]
    suites: Vec<Suite>,
    /// Truncation order N of the tables.
    #[arg(long, default_value_t = 8)]
    max_weight: usize,
    /// Shift values for the shifted, phi and center suites.
    #[arg(long = "k", value_delimiter = ',', default_values_t = [1u32, 2])]
    ks: Vec<u32>,
    /// Where to write the JSON report.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Treat skipped-out-of-window instances as failures.
    #[arg(long)]
    strict: bool,
    /// Perturb one family (or `all`) as a negative control.
    #[arg(long)]
    mutate: Option<String>,
    /// Top weight of the PBW checks [default: min(5, N)].
    #[arg(long)]
    pbw_weight: Option<u32>,
    /// Top weight of the shifted-subalgebra checks [default: min(6, N)].
    #[arg(long)]
    shifted_weight: Option<u32>,
    /// Levels used for the phi relation images [default: min(6, N)].
    #[arg(long)]
    phi_order: Option<usize>,
    /// Build tables in memory only.
    #[arg(long)]
    no_cache: bool,
    #[command(flatten)]
    common: Common,
}

fn set_jobs(jobs: Option<usize>) -> Result<()> {
    if let Some(n) = jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    Ok(())
}

fn cache_dir(flag: &Option<PathBuf>) -> PathBuf {
    flag.clone().unwrap_or_else(cache::default_cache_dir)
}

fn build_tables(max_weight: usize, common: &Common) -> Result<ExitCode> {
    set_jobs(common.jobs)?;
    let t0 = Instant::now();
    let tables = Tables::build(max_weight)?;
    let path = cache::save(&tables, &cache_dir(&common.cache_dir))?;
    println!(
        "built tables to order {max_weight} in {:.2?}\n{}\nsha256 {}",
        t0.elapsed(),
        path.display(),
        cache::table_hash(&tables)
    );
    Ok(ExitCode::SUCCESS)
}

fn load_tables(args: &VerifyArgs, warnings: &mut Vec<String>) -> Result<Tables> {
    if args.no_cache {
        return Ok(Tables::build(args.max_weight)?);
    }
    let dir = cache_dir(&args.common.cache_dir);
    let (tables, provenance) = cache::load_or_build(&dir, args.max_weight)?;
    if let Provenance::Rebuilt(reason) = provenance {
        let w = format!(
            "cache in {} rejected ({reason}); tables rebuilt",
            dir.display()
        );
        eprintln!("warning: {w}");
        warnings.push(w);
    }
    Ok(tables)
}

fn print_summary(doc: &ReportDocument) {
    for s in &doc.suites {
        let count = |st: Status| s.instances.iter().filter(|i| i.status == st).count();
        println!(
            "{:<10} pass {:>5}  fail {:>4}  skipped {:>4}",
            s.suite.name(),
            count(Status::Pass),
            count(Status::Fail),
            count(Status::SkippedOutOfWindow)
        );
        for i in s
            .instances
            .iter()
            .filter(|i| i.status == Status::Fail)
            .take(5)
        {
            let detail = i
                .detail
                .as_deref()
                .map(|d| format!(" {d}"))
                .unwrap_or_default();
            println!("    FAIL {} (residual {}){detail}", i.id, i.residual_terms);
        }
    }
    for v in &doc.summary.variants {
        let verdict = if v.holds { "holds" } else { "fails" };
        println!(
            "variant {}/{}/{}: {verdict} ({} pass, {} fail)",
            v.suite, v.family, v.variant, v.passed, v.failed
        );
    }
    let s = &doc.summary;
    println!(
        "{} instances: {} passed, {} failed ({} counted), {} skipped in {:.1}s -> {}",
        s.total,
        s.passed,
        s.failed,
        s.counted_failures,
        s.skipped,
        s.elapsed_ms / 1e3,
        if s.ok { "OK" } else { "FAILED" }
    );
}

fn verify(args: VerifyArgs) -> Result<ExitCode> {
    set_jobs(args.common.jobs)?;
    let config = RunConfig {
        max_weight: args.max_weight,
        suites: if args.suites.is_empty() {
            Suite::ALL.to_vec()
        } else {
            args.suites.clone()
        },
        ks: args.ks.clone(),
        report: args.report.clone(),
        cache_dir: args.common.cache_dir.clone(),
        jobs: args.common.jobs,
        strict: args.strict,
        mutate: args.mutate.clone(),
        pbw_weight: args.pbw_weight,
        shifted_weight: args.shifted_weight,
        phi_order: args.phi_order,
    };
    config.validate()?;
    let mut warnings = Vec::new();
    let tables = load_tables(&args, &mut warnings)?;
    let doc = report::run(&config, &tables, cache::table_hash(&tables), warnings)?;
    if let Some(path) = &args.report {
        write_report(path, &doc)?;
    }
    print_summary(&doc);
    Ok(if doc.summary.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn write_report(path: &Path, doc: &ReportDocument) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)
            .with_context(|| format!("creating {}", parent.display()))?;
    }
    std::fs::write(path, doc.to_json()?).with_context(|| format!("writing {}", path.display()))
}

fn read_report(path: &Path) -> Result<ReportDocument> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    ReportDocument::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn report_diff(before: &Path, after: &Path) -> Result<ExitCode> {
    let (a, b) = (read_report(before)?, read_report(after)?);
    if a.table_hash != b.table_hash {
        println!("table hashes differ: {} vs {}", a.table_hash, b.table_hash);
    }
    let changes = diff_reports(&a, &b);
    let show = |s: Option<Status>| match s {
        Some(Status::Pass) => "pass",
        Some(Status::Fail) => "fail",
        Some(Status::SkippedOutOfWindow) => "skipped",
        None => "absent",
    };
    for c in &changes {
        println!(
            "{} {}: {} -> {}",
            c.suite,
            c.id,
            show(c.before),
            show(c.after)
        );
    }
    println!("{} status changes", changes.len());
    Ok(if changes.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::BuildTables { max_weight, common } => build_tables(max_weight, &common),
        Command::Verify(args) => verify(args),
        Command::ReportDiff { before, after } => report_diff(&before, &after),
    };
    outcome.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(2)
    })
}
