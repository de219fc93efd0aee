use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use jslibtrace::analysis::render::{corpus_jsonl, render_tables};
use jslibtrace::analysis::{CorpusReport, SiteReport};
use jslibtrace::catalogue::{load_catalogue, LoadWarning, MIN_REFERENCE_BYTES};
use jslibtrace::causality::{export_dot, read_event_log, CrawlEvent};
use jslibtrace::detection::{check_probe_specs, load_probe_specs, static_lookup, ScriptSample, StaticOutcome};
use jslibtrace::digest::Digest;
use jslibtrace::filterlist::{parse_filter_list, FilterSet};
use jslibtrace::parallel::{configure_threads, process_sites, SiteInput};
use jslibtrace::pipeline::process_site;
use jslibtrace::{Catalogue, Label};
use serde_json::json;

/// Exit status when `--fail-on-vuln` is set and a vulnerable inclusion was found.
const EXIT_VULNERABLE: u8 = 3;

#[derive(Parser)]
#[command(name = "jslibtrace", version, about = "Trace JavaScript library inclusions on crawled sites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Catalogue maintenance.
    Catalogue {
        #[command(subcommand)]
        action: CatalogueAction,
    },
    /// Causality tree for a single event log.
    Tree {
        #[command(subcommand)]
        action: TreeAction,
    },
    /// Static detection of script files or digests against the catalogue.
    Detect(DetectArgs),
    /// Full run over a corpus of event logs.
    Analyze(AnalyzeArgs),
    /// Re-render corpus tables from a previous run.
    Report {
        #[command(subcommand)]
        action: ReportAction,
    },
}

#[derive(Subcommand)]
enum CatalogueAction {
    /// Load a catalogue and print its statistics and warnings.
    Validate {
        path: PathBuf,
        /// Directory of `<library>.js` probe specs to check against the catalogue.
        #[arg(long)]
        probes: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum TreeAction {
    Build(TreeBuildArgs),
}

#[derive(Args)]
struct TreeBuildArgs {
    #[arg(long)]
    events: PathBuf,
    /// Site domain; defaults to the main document's host.
    #[arg(long)]
    site: Option<String>,
    /// Attach detections from this catalogue.
    #[arg(long, env = "JSLIBTRACE_CATALOGUE")]
    catalogue: Option<PathBuf>,
    #[arg(long = "filters", value_name = "LABEL=PATH")]
    filters: Vec<String>,
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Write the tree as JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DetectArgs {
    #[arg(long, env = "JSLIBTRACE_CATALOGUE")]
    catalogue: PathBuf,
    /// Script files to hash.
    files: Vec<PathBuf>,
    /// Look up a SHA-256 digest directly.
    #[arg(long, conflicts_with = "files")]
    digest: Option<Digest>,
    /// Byte length for `--digest`; defaults to the size floor.
    #[arg(long, requires = "digest")]
    length: Option<u64>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long, env = "JSLIBTRACE_CATALOGUE")]
    catalogue: PathBuf,
    /// Event log files or directories of `*.jsonl` logs.
    #[arg(long, required = true, num_args = 1..)]
    events: Vec<PathBuf>,
    #[arg(long = "filters", value_name = "LABEL=PATH")]
    filters: Vec<String>,
    #[arg(long, env = "JSLIBTRACE_OUT")]
    out: PathBuf,
    /// Also write one DOT file per site under `<out>/dot`.
    #[arg(long)]
    dot: bool,
    #[arg(long, env = "JSLIBTRACE_JOBS")]
    jobs: Option<usize>,
    #[arg(long)]
    fail_on_vuln: bool,
}

#[derive(Subcommand)]
enum ReportAction {
    Render {
        /// `sites.jsonl` from an analyze run.
        #[arg(long)]
        sites: PathBuf,
        /// Directory for `corpus.jsonl` and `tables.txt`; tables go to stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read_catalogue(path: &Path) -> Result<Catalogue> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let cat = load_catalogue(BufReader::new(file)).with_context(|| format!("loading {}", path.display()))?;
    for w in cat.warnings() {
        match w {
            LoadWarning::UndersizedReferenceFile { line, library_id, version, byte_length } => log::warn!(
                "{}:{}: dropped {library_id} {version} reference file of {byte_length} bytes (floor {MIN_REFERENCE_BYTES})",
                path.display(),
                line.map_or("?".to_string(), |l| l.to_string()),
            ),
            LoadWarning::DuplicateReferenceFile { line, digest } => log::warn!(
                "{}:{}: duplicate reference file {digest}",
                path.display(),
                line.map_or("?".to_string(), |l| l.to_string()),
            ),
        }
    }
    Ok(cat)
}

fn read_events(path: &Path) -> Result<Vec<CrawlEvent>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_event_log(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))
}

fn read_filters(specs: &[String]) -> Result<Vec<FilterSet>> {
    specs
        .iter()
        .map(|spec| {
            let (label, path) = spec.split_once('=').with_context(|| format!("--filters {spec:?}: expected LABEL=PATH"))?;
            let label: Label = label.parse().map_err(anyhow::Error::msg)?;
            let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
            let set = parse_filter_list(&text, label);
            log::info!(
                "{path}: {} rules, {} lines skipped ({} unsupported)",
                set.rule_count(),
                set.skipped.total(),
                set.skipped.unsupported
            );
            Ok(set)
        })
        .collect()
}

fn event_files(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(p)
                .with_context(|| format!("listing {}", p.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|e| e == "jsonl"))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(p.clone());
        }
    }
    if files.is_empty() {
        bail!("no event logs found");
    }
    Ok(files)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn dot_name(source: &str) -> String {
    let stem = Path::new(source).file_stem().and_then(|s| s.to_str()).unwrap_or("site");
    format!("{stem}.dot")
}

fn catalogue_validate(path: &Path, probes: Option<&Path>) -> Result<ExitCode> {
    let cat = read_catalogue(path)?;
    let summary = json!({
        "libraries": cat.library_ids().count(),
        "releases": cat.release_count(),
        "vulnerabilities": cat.vulnerability_count(),
        "reference_files": cat.reference_files().len(),
        "undersized_dropped": cat.undersized_dropped(),
        "warnings": cat.warnings(),
    });
    if let Some(dir) = probes {
        let specs = load_probe_specs(dir)?;
        check_probe_specs(&specs, &cat)?;
        log::info!("{} probe specs match the catalogue", specs.len());
    }
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(ExitCode::SUCCESS)
}

fn tree_build(args: &TreeBuildArgs) -> Result<ExitCode> {
    let events = read_events(&args.events)?;
    let cat = match &args.catalogue {
        Some(p) => read_catalogue(p)?,
        None => Catalogue::builder().build()?,
    };
    let filters = read_filters(&args.filters)?;
    let (tree, _) = process_site(&events, args.site.as_deref(), &cat, &filters)
        .with_context(|| format!("building tree from {}", args.events.display()))?;
    if let Some(dot) = &args.dot {
        write_file(dot, &export_dot(&tree))?;
    }
    let body = serde_json::to_string_pretty(&tree)?;
    match &args.out {
        Some(out) => write_file(out, &body)?,
        None => println!("{body}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn detect(args: &DetectArgs) -> Result<ExitCode> {
    let cat = read_catalogue(&args.catalogue)?;
    let samples: Vec<ScriptSample> = match args.digest {
        Some(digest) => vec![ScriptSample {
            node_id: digest.to_hex(),
            bytes_length: args.length.unwrap_or(MIN_REFERENCE_BYTES),
            digest,
            url: None,
            inline: false,
        }],
        None => {
            if args.files.is_empty() {
                bail!("give script files or --digest");
            }
            args.files
                .iter()
                .map(|f| {
                    let bytes = fs::read(f).with_context(|| format!("reading {}", f.display()))?;
                    Ok(ScriptSample::from_bytes(f.display().to_string(), &bytes, Some(f.display().to_string())))
                })
                .collect::<Result<_>>()?
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for s in &samples {
        let record = match static_lookup(s, &cat) {
            StaticOutcome::Matched(d) => json!({
                "input": s.node_id, "digest": s.digest, "library_id": d.library_id, "version": d.version,
            }),
            StaticOutcome::BelowSizeFloor => {
                log::warn!("{}: {} bytes is under the {MIN_REFERENCE_BYTES}-byte floor", s.node_id, s.bytes_length);
                json!({ "input": s.node_id, "digest": s.digest, "below_size_floor": true })
            }
            StaticOutcome::NoMatch => json!({ "input": s.node_id, "digest": s.digest, "library_id": null }),
        };
        writeln!(out, "{record}")?;
    }
    Ok(ExitCode::SUCCESS)
}

fn write_corpus(dir: &Path, corpus: &CorpusReport) -> Result<()> {
    write_file(&dir.join("corpus.jsonl"), &corpus_jsonl(corpus))?;
    write_file(&dir.join("tables.txt"), &render_tables(corpus))
}

fn analyze(args: &AnalyzeArgs) -> Result<ExitCode> {
    if let Some(jobs) = args.jobs {
        configure_threads(jobs);
    }
    let cat = read_catalogue(&args.catalogue)?;
    let filters = read_filters(&args.filters)?;
    let inputs = event_files(&args.events)?
        .into_iter()
        .map(|p| {
            Ok(SiteInput {
                source: p.display().to_string(),
                site_domain: None,
                events: read_events(&p)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    if args.dot {
        fs::create_dir_all(args.out.join("dot"))?;
    }

    let mut reports = Vec::new();
    let mut failures = Vec::new();
    let mut sites = BufWriter::new(File::create(args.out.join("sites.jsonl"))?);
    for result in process_sites(&inputs, &cat, &filters) {
        match result {
            Ok(site) => {
                serde_json::to_writer(&mut sites, &site.report)?;
                sites.write_all(b"\n")?;
                if args.dot {
                    write_file(&args.out.join("dot").join(dot_name(&site.source)), &export_dot(&site.tree))?;
                }
                reports.push(site.report);
            }
            Err((source, e)) => {
                log::error!("{source}: {e}");
                failures.push(json!({ "source": source, "error": e.to_string() }));
            }
        }
    }
    sites.flush()?;

    let corpus = CorpusReport::from_sites(&reports);
    write_corpus(&args.out, &corpus)?;
    let vulnerable = reports.iter().filter(|r| r.is_vulnerable()).count();
    let meta = json!({
        "tool_version": env!("CARGO_PKG_VERSION"),
        "parallel": cfg!(feature = "parallel"),
        "jobs": args.jobs,
        "catalogue": {
            "path": args.catalogue.display().to_string(),
            "libraries": cat.library_ids().count(),
            "releases": cat.release_count(),
            "vulnerabilities": cat.vulnerability_count(),
            "reference_files": cat.reference_files().len(),
            "undersized_dropped": cat.undersized_dropped(),
        },
        "filters": filters.iter().zip(&args.filters).map(|(f, spec)| json!({
            "spec": spec, "label": f.label, "rules": f.rule_count(), "skipped": f.skipped,
        })).collect::<Vec<_>>(),
        "sites": inputs.len(),
        "analysed": reports.len(),
        "vulnerable_sites": vulnerable,
        "failures": failures,
    });
    write_file(&args.out.join("run-meta.json"), &serde_json::to_string_pretty(&meta)?)?;
    log::info!("{} of {} sites analysed, {vulnerable} vulnerable", reports.len(), inputs.len());

    if args.fail_on_vuln && vulnerable > 0 {
        return Ok(ExitCode::from(EXIT_VULNERABLE));
    }
    Ok(ExitCode::SUCCESS)
}

fn report_render(sites: &Path, out: Option<&Path>) -> Result<ExitCode> {
    let file = File::open(sites).with_context(|| format!("opening {}", sites.display()))?;
    let mut reports: Vec<SiteReport> = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        reports.push(serde_json::from_str(&line).with_context(|| format!("{}:{}", sites.display(), n + 1))?);
    }
    let corpus = CorpusReport::from_sites(&reports);
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            write_corpus(dir, &corpus)?;
        }
        None => print!("{}", render_tables(&corpus)),
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Catalogue { action: CatalogueAction::Validate { path, probes } } => catalogue_validate(&path, probes.as_deref()),
        Command::Tree { action: TreeAction::Build(args) } => tree_build(&args),
        Command::Detect(args) => detect(&args),
        Command::Analyze(args) => analyze(&args),
        Command::Report { action: ReportAction::Render { sites, out } } => report_render(&sites, out.as_deref()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("JSLIBTRACE_LOG", "warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
