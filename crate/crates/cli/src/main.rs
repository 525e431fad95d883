//! Command-line front end: single-pair evaluation, suite runs, model
//! inspection, and decision-table export.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ocrqa_core::harness::{self, ReportFormat};
use ocrqa_core::metrics::{self, MetricConfig, MetricKind};
use ocrqa_core::testmodel::{
    build_decision_table, check_coverage, complexity, derive_ofat, export_table_csv, parse_model,
    DimensionCoverage, TestCase, TestModel3D,
};
use ocrqa_core::textmodel::{normalize, parse_ground_truth};
use ocrqa_core::{Error, Score};

const EXIT_USAGE: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_EVAL: u8 = 3;

#[derive(Parser)]
#[command(name = "ocrqa", version, about = "Score OCR output and manage 3D test models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score one OCR output file against one ground-truth file
    Eval(EvalArgs),
    /// Batch operations on a test-suite manifest
    #[command(subcommand)]
    Suite(SuiteCommand),
    /// Inspect a classification-tree model
    #[command(subcommand)]
    Model(ModelCommand),
    /// Decision-table operations
    #[command(subcommand)]
    Table(TableCommand),
}

#[derive(Args)]
struct EvalArgs {
    /// Ground-truth file (plain text, optionally with `#section:` headers)
    #[arg(long)]
    gt: PathBuf,
    /// OCR output file (plain UTF-8 text)
    #[arg(long)]
    ocr: PathBuf,
    /// Comma-separated subset of fca,ssa,ossa,tla,class,section
    #[arg(long)]
    metrics: Option<String>,
    /// Pass threshold; overrides OCRQA_THRESHOLD and the 0.95 default
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long, value_enum, default_value_t = EvalFormat::Text)]
    format: EvalFormat,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EvalFormat {
    Text,
    Json,
}

#[derive(Subcommand)]
enum SuiteCommand {
    /// Evaluate every case in a manifest against every system
    Run {
        manifest: PathBuf,
        /// Directory to write report files into (default: stdout)
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: String,
    },
}

#[derive(Subcommand)]
enum ModelCommand {
    /// Print leaf counts per tree and the total test complexity
    Complexity { model: PathBuf },
    /// Report stub coverage of a manifest's cases against a model
    Coverage { model: PathBuf, manifest: PathBuf },
    /// Derive a one-factor-at-a-time suite and emit a manifest skeleton
    Ofat {
        model: PathBuf,
        /// Base case file (TOML: id, selections, expected_output, gt, ocr)
        #[arg(long)]
        base: PathBuf,
    },
}

#[derive(Subcommand)]
enum TableCommand {
    /// Build the stub-by-case decision table and write it as CSV
    Export {
        model: PathBuf,
        manifest: PathBuf,
        /// Output path; `-` writes to stdout
        #[arg(long)]
        csv: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(CliError::Core(e)) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::UndefinedScore(_) => EXIT_EVAL,
                _ => EXIT_PARSE,
            };
            ExitCode::from(code)
        }
    }
}

enum CliError {
    Usage(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

type CliResult = Result<(), CliError>;

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Eval(args) => eval(args),
        Command::Suite(SuiteCommand::Run { manifest, report, format }) => {
            suite_run(&manifest, report.as_deref(), &format)
        }
        Command::Model(ModelCommand::Complexity { model }) => model_complexity(&model),
        Command::Model(ModelCommand::Coverage { model, manifest }) => {
            model_coverage(&model, &manifest)
        }
        Command::Model(ModelCommand::Ofat { model, base }) => model_ofat(&model, &base),
        Command::Table(TableCommand::Export { model, manifest, csv }) => {
            table_export(&model, &manifest, &csv)
        }
    }
}

/// Threshold priority: flag, then OCRQA_THRESHOLD, then 0.95.
fn resolve_threshold(flag: Option<f64>) -> Result<f64, CliError> {
    let value = match flag {
        Some(v) => v,
        None => match std::env::var("OCRQA_THRESHOLD") {
            Ok(raw) => raw.parse::<f64>().map_err(|_| {
                CliError::Usage(format!("OCRQA_THRESHOLD is not a number: `{raw}`"))
            })?,
            Err(_) => return Ok(0.95),
        },
    };
    if !(value > 0.0 && value <= 1.0) {
        return Err(CliError::Usage(format!("threshold must be in (0, 1], got {value}")));
    }
    Ok(value)
}

fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::Core(Error::io(path, e)))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum MetricChoice {
    Fca,
    Ssa,
    Ossa,
    Tla,
    Class,
    Section,
}

fn parse_metric_list(raw: Option<&str>) -> Result<Vec<MetricChoice>, CliError> {
    let Some(raw) = raw else {
        return Ok(vec![
            MetricChoice::Fca,
            MetricChoice::Ssa,
            MetricChoice::Ossa,
            MetricChoice::Tla,
            MetricChoice::Class,
            MetricChoice::Section,
        ]);
    };
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|name| match name {
            "fca" => Ok(MetricChoice::Fca),
            "ssa" => Ok(MetricChoice::Ssa),
            "ossa" => Ok(MetricChoice::Ossa),
            "tla" => Ok(MetricChoice::Tla),
            "class" => Ok(MetricChoice::Class),
            "section" => Ok(MetricChoice::Section),
            other => Err(CliError::Usage(format!(
                "unknown metric `{other}` (fca,ssa,ossa,tla,class,section)"
            ))),
        })
        .collect()
}

fn eval(args: EvalArgs) -> CliResult {
    let chosen = parse_metric_list(args.metrics.as_deref())?;
    let threshold = resolve_threshold(args.threshold)?;
    let config = MetricConfig::<Score> {
        pass_threshold: threshold,
        clamp_scores: true,
        threshold_metric: MetricKind::Fca,
        tla_match: metrics::TlaMatch::ExactAfterNormalization,
    };

    let doc = parse_ground_truth(&read_file(&args.gt)?)?;
    let ocr_bytes = read_file(&args.ocr)?;
    let ocr_text = std::str::from_utf8(&ocr_bytes)
        .map_err(|_| Error::InvalidEncoding { context: Some(args.ocr.display().to_string()) })?;
    let report = metrics::evaluate(&doc, &normalize(ocr_text), &config)?;

    let show = |m: MetricChoice| chosen.contains(&m);
    match args.format {
        EvalFormat::Text => {
            if show(MetricChoice::Fca) {
                println!("fca     {:.4}", report.scores.fca);
            }
            if show(MetricChoice::Ssa) {
                println!("ssa     {:.4}", report.scores.ssa);
            }
            if show(MetricChoice::Ossa) {
                println!("ossa    {:.4}", report.scores.ossa);
            }
            if show(MetricChoice::Tla) {
                println!("tla     {:.4}", report.scores.tla);
            }
            if show(MetricChoice::Class) {
                for (class, score) in &report.per_class {
                    match score {
                        Some(s) => println!("class {:<9} {:.4}", class.name(), s),
                        None => println!("class {:<9} n/a", class.name()),
                    }
                }
            }
            if show(MetricChoice::Section) {
                for (kind, scores) in &report.per_section {
                    match scores {
                        Some(s) => println!(
                            "section {:<11} fca {:.4}  ssa {:.4}  ossa {:.4}  tla {:.4}",
                            kind.name(),
                            s.fca,
                            s.ssa,
                            s.ossa,
                            s.tla
                        ),
                        None => println!("section {:<11} n/a", kind.name()),
                    }
                }
            }
            println!("result  {}", report.output_class);
        }
        EvalFormat::Json => {
            let mut root = serde_json::Map::new();
            if show(MetricChoice::Fca) {
                root.insert("fca".into(), report.scores.fca.into());
            }
            if show(MetricChoice::Ssa) {
                root.insert("ssa".into(), report.scores.ssa.into());
            }
            if show(MetricChoice::Ossa) {
                root.insert("ossa".into(), report.scores.ossa.into());
            }
            if show(MetricChoice::Tla) {
                root.insert("tla".into(), report.scores.tla.into());
            }
            if show(MetricChoice::Class) {
                let classes: serde_json::Map<String, serde_json::Value> = report
                    .per_class
                    .iter()
                    .map(|(c, v)| (c.name().to_string(), opt_to_json(v)))
                    .collect();
                root.insert("per_class".into(), classes.into());
            }
            if show(MetricChoice::Section) {
                let sections: serde_json::Map<String, serde_json::Value> = report
                    .per_section
                    .iter()
                    .map(|(k, v)| {
                        let value = match v {
                            Some(s) => serde_json::json!({
                                "fca": s.fca, "ssa": s.ssa, "ossa": s.ossa, "tla": s.tla,
                            }),
                            None => serde_json::Value::Null,
                        };
                        (k.name().to_string(), value)
                    })
                    .collect();
                root.insert("per_section".into(), sections.into());
            }
            root.insert("result".into(), report.output_class.to_string().into());
            root.insert("threshold".into(), threshold.into());
            println!(
                "{}",
                serde_json::to_string_pretty(&serde_json::Value::Object(root))
                    .expect("report serialization cannot fail")
            );
        }
    }
    Ok(())
}

fn opt_to_json(v: &Option<Score>) -> serde_json::Value {
    match v {
        Some(s) => (*s).into(),
        None => serde_json::Value::Null,
    }
}

fn suite_run(manifest: &Path, report_dir: Option<&Path>, format: &str) -> CliResult {
    let format: ReportFormat =
        format.parse().map_err(CliError::Usage)?;
    let threshold = resolve_threshold(None)?;
    let config = MetricConfig::<Score>::with_threshold(threshold);
    let suite = harness::load_manifest(manifest)?;
    for warning in &suite.warnings {
        eprintln!("warning: {warning}");
    }
    let run = harness::run_suite(&suite, &config);
    let aggregates = harness::aggregate(&suite, &run);
    let files = harness::render_report(&suite, &config, &run, &aggregates, format);
    match report_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            for file in &files {
                let path = dir.join(&file.name);
                std::fs::write(&path, &file.bytes).map_err(|e| Error::io(&path, e))?;
                println!("wrote {}", path.display());
            }
        }
        None => {
            let mut out = Vec::new();
            for (i, file) in files.iter().enumerate() {
                if files.len() > 1 {
                    if i > 0 {
                        out.push(b'\n');
                    }
                    out.extend_from_slice(format!("# {}\n", file.name).as_bytes());
                }
                out.extend_from_slice(&file.bytes);
            }
            use std::io::Write;
            std::io::stdout().write_all(&out).expect("stdout write");
        }
    }
    Ok(())
}

fn load_model_file(path: &Path) -> Result<TestModel3D, CliError> {
    Ok(parse_model(&read_file(path)?)?)
}

fn model_complexity(model_path: &Path) -> CliResult {
    let report = complexity(&load_model_file(model_path)?);
    println!("CC={} IC={} OC={} total={}", report.cc, report.ic, report.oc, report.total);
    Ok(())
}

fn coverage_line(name: &str, cov: &DimensionCoverage) -> String {
    format!("{name}: {}/{} ({:.1}%)", cov.covered, cov.total, cov.ratio() * 100.0)
}

fn model_coverage(model_path: &Path, manifest: &Path) -> CliResult {
    let model = load_model_file(model_path)?;
    let suite = harness::load_manifest(manifest)?;
    let report = check_coverage(&model, &suite.cases)?;
    println!("{}", coverage_line("context", &report.context));
    println!("{}", coverage_line("input", &report.input));
    println!("{}", coverage_line("output", &report.output));
    println!("{}", coverage_line("overall", &report.overall));
    if !report.uncovered.is_empty() {
        let ids: Vec<&str> = report.uncovered.iter().map(String::as_str).collect();
        println!("uncovered: {}", ids.join(", "));
    }
    Ok(())
}

#[derive(serde::Serialize)]
struct ManifestSkeleton {
    model: String,
    systems: Vec<String>,
    cases: Vec<TestCase>,
}

fn model_ofat(model_path: &Path, base_path: &Path) -> CliResult {
    let model = load_model_file(model_path)?;
    let base_bytes = read_file(base_path)?;
    let base_text = std::str::from_utf8(&base_bytes)
        .map_err(|_| Error::InvalidEncoding { context: Some(base_path.display().to_string()) })?;
    let base: TestCase = toml::from_str(base_text).map_err(|e| Error::parse(e.to_string()))?;
    let systems: Vec<String> = base.ocr_refs.keys().cloned().collect();

    let mut cases = derive_ofat(&model, &base)?;
    for case in &mut cases {
        case.gt_ref = PathBuf::from(format!("gt/{}.txt", case.id));
        case.ocr_refs = systems
            .iter()
            .map(|s| (s.clone(), PathBuf::from(format!("ocr/{s}/{}.txt", case.id))))
            .collect();
    }
    let skeleton = ManifestSkeleton {
        model: model_path.display().to_string(),
        systems,
        cases,
    };
    let rendered = toml::to_string(&skeleton).map_err(|e| Error::parse(e.to_string()))?;
    println!("{rendered}");
    Ok(())
}

fn table_export(model_path: &Path, manifest: &Path, csv_out: &Path) -> CliResult {
    let model = load_model_file(model_path)?;
    let suite = harness::load_manifest(manifest)?;
    let table = build_decision_table(&model, &suite.cases)?;
    let bytes = export_table_csv(&table);
    if csv_out == Path::new("-") {
        use std::io::Write;
        std::io::stdout().write_all(&bytes).expect("stdout write");
    } else {
        std::fs::write(csv_out, &bytes).map_err(|e| Error::io(csv_out, e))?;
        println!("wrote {}", csv_out.display());
    }
    Ok(())
}
