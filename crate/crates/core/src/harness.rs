//! Batch execution: manifests, suite runs, aggregation, and report
//! rendering.
//!
//! A manifest binds test cases to ground-truth and per-system OCR output
//! files. Running a suite evaluates every (case, system) combination,
//! classifies pass/fail, and aggregates by section, character class, and
//! normal-vs-complex context. Reports render as JSON (machine-stable),
//! CSV (one table per file), or Markdown.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{self, MetricConfig, MetricReport, Outcome, ScoreSet};
use crate::scalar::{mean, Scalar};
use crate::testmodel::{parse_model, validate_case, Severity, TestCase, TestModel3D};
use crate::textmodel::{normalize, parse_ground_truth, CharClass, SectionKind};

/// A loaded, validated test suite.
#[derive(Debug, Clone)]
pub struct Suite {
    /// Model path as written in the manifest.
    pub model_ref: PathBuf,
    pub model: TestModel3D,
    pub systems: Vec<String>,
    pub cases: Vec<TestCase>,
    /// Directory paths in the manifest are relative to.
    pub base_dir: PathBuf,
    /// Non-fatal findings from load time (e.g. missing files).
    pub warnings: Vec<String>,
}

#[derive(Debug, Deserialize)]
struct RawManifest {
    model: PathBuf,
    #[serde(default)]
    systems: Vec<String>,
    #[serde(default)]
    cases: Vec<TestCase>,
}

/// Loads a manifest file, the model it references, and validates every
/// case against the model. Missing data files are warnings, not errors;
/// the run marks them skipped.
pub fn load_manifest(path: &Path) -> Result<Suite> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|_| Error::InvalidEncoding { context: Some(path.display().to_string()) })?;
    let raw: RawManifest = toml::from_str(text).map_err(|e| Error::parse(e.to_string()))?;
    let base_dir = path.parent().unwrap_or_else(|| Path::new(".")).to_path_buf();

    let model_path = base_dir.join(&raw.model);
    let model_bytes = std::fs::read(&model_path).map_err(|e| Error::io(&model_path, e))?;
    let model = parse_model(&model_bytes)?;

    let mut warnings = Vec::new();
    for case in &raw.cases {
        validate_case(&model, case)?;
        for system in case.ocr_refs.keys() {
            if !raw.systems.contains(system) {
                return Err(Error::Validation(format!(
                    "case `{}` references system `{system}` not listed in the manifest",
                    case.id
                )));
            }
        }
        if !base_dir.join(&case.gt_ref).is_file() {
            warnings.push(format!(
                "case `{}`: ground truth file `{}` not found",
                case.id,
                case.gt_ref.display()
            ));
        }
        for (system, ocr) in &case.ocr_refs {
            if !base_dir.join(ocr).is_file() {
                warnings.push(format!(
                    "case `{}`/{system}: ocr file `{}` not found",
                    case.id,
                    ocr.display()
                ));
            }
        }
    }
    Ok(Suite {
        model_ref: raw.model,
        model,
        systems: raw.systems,
        cases: raw.cases,
        base_dir,
        warnings,
    })
}

/// Result of one (case, system) evaluation.
#[derive(Debug, Clone)]
pub enum EvalResult<S> {
    Report(Box<MetricReport<S>>),
    Skipped { reason: String },
}

#[derive(Debug, Clone)]
pub struct CaseEval<S> {
    pub case_id: String,
    pub system: String,
    pub result: EvalResult<S>,
}

/// Every evaluation of a suite run, in manifest order (cases outer,
/// systems inner).
#[derive(Debug, Clone)]
pub struct RunReport<S> {
    pub evaluations: Vec<CaseEval<S>>,
}

fn read_text_file(base: &Path, rel: &Path, what: &str) -> std::result::Result<Vec<u8>, String> {
    let path = base.join(rel);
    std::fs::read(&path).map_err(|e| format!("{what} file `{}` unreadable: {}", rel.display(), e.kind()))
}

fn evaluate_one<S: Scalar>(
    suite: &Suite,
    case: &TestCase,
    system: &str,
    config: &MetricConfig<S>,
) -> EvalResult<S> {
    let Some(ocr_ref) = case.ocr_refs.get(system) else {
        return EvalResult::Skipped { reason: format!("no ocr file bound for system `{system}`") };
    };
    let gt_bytes = match read_text_file(&suite.base_dir, &case.gt_ref, "ground truth") {
        Ok(b) => b,
        Err(reason) => return EvalResult::Skipped { reason },
    };
    let doc = match parse_ground_truth(&gt_bytes) {
        Ok(d) => d,
        Err(e) => return EvalResult::Skipped { reason: format!("ground truth rejected: {e}") },
    };
    let ocr_bytes = match read_text_file(&suite.base_dir, ocr_ref, "ocr") {
        Ok(b) => b,
        Err(reason) => return EvalResult::Skipped { reason },
    };
    let ocr_text = match std::str::from_utf8(&ocr_bytes) {
        Ok(t) => normalize(t),
        Err(_) => {
            return EvalResult::Skipped {
                reason: format!("ocr file `{}` is not valid utf-8", ocr_ref.display()),
            }
        }
    };
    match metrics::evaluate(&doc, &ocr_text, config) {
        Ok(report) => EvalResult::Report(Box::new(report)),
        Err(Error::UndefinedScore(_)) => {
            EvalResult::Skipped { reason: "empty ground truth".into() }
        }
        Err(e) => EvalResult::Skipped { reason: format!("evaluation failed: {e}") },
    }
}

/// Evaluates every (case, system) combination. Unreadable or undecodable
/// files skip that evaluation only; output is deterministic for fixed
/// inputs.
pub fn run_suite<S: Scalar>(suite: &Suite, config: &MetricConfig<S>) -> RunReport<S> {
    let mut evaluations = Vec::new();
    for case in &suite.cases {
        for system in &suite.systems {
            evaluations.push(CaseEval {
                case_id: case.id.clone(),
                system: system.clone(),
                result: evaluate_one(suite, case, system, config),
            });
        }
    }
    RunReport { evaluations }
}

/// Per-system aggregate rows.
#[derive(Debug, Clone)]
pub struct SystemAggregate<S> {
    pub evaluated: usize,
    pub skipped: usize,
    pub passes: usize,
    /// `passes / evaluated`; `None` when nothing was evaluated.
    pub pass_rate: Option<S>,
    pub mean_scores: MeanScoreSet<S>,
    pub per_section: BTreeMap<SectionKind, MeanScoreSet<S>>,
    pub per_class: BTreeMap<CharClass, Option<S>>,
    /// Mean FCA over cases whose selections are all normal-severity.
    pub normal_context_fca: Option<S>,
    /// Mean FCA over cases selecting at least one complex-severity stub.
    pub complex_context_fca: Option<S>,
}

/// Means of the four metrics; a component is `None` when no evaluation
/// defined it. Undefined scores stay out of denominators.
#[derive(Debug, Clone)]
pub struct MeanScoreSet<S> {
    pub fca: Option<S>,
    pub ssa: Option<S>,
    pub ossa: Option<S>,
    pub tla: Option<S>,
}

impl<S: Scalar> MeanScoreSet<S> {
    fn over(sets: &[&ScoreSet<S>]) -> Self {
        MeanScoreSet {
            fca: mean(sets.iter().map(|s| s.fca.clone())),
            ssa: mean(sets.iter().map(|s| s.ssa.clone())),
            ossa: mean(sets.iter().map(|s| s.ossa.clone())),
            tla: mean(sets.iter().map(|s| s.tla.clone())),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Aggregates<S> {
    pub per_system: BTreeMap<String, SystemAggregate<S>>,
}

/// Whether a case exercises a complex context: any selected stub carries
/// complex severity.
fn is_complex(model: &TestModel3D, case: &TestCase) -> bool {
    case.selections
        .iter()
        .any(|id| model.stub(id).is_some_and(|s| s.severity == Severity::Complex))
}

/// Folds per-evaluation reports into per-system tables. Skipped
/// evaluations contribute to no mean and no pass-rate denominator.
pub fn aggregate<S: Scalar>(suite: &Suite, report: &RunReport<S>) -> Aggregates<S> {
    let case_by_id: BTreeMap<&str, &TestCase> =
        suite.cases.iter().map(|c| (c.id.as_str(), c)).collect();
    let mut per_system = BTreeMap::new();
    for system in &suite.systems {
        let evals: Vec<&CaseEval<S>> =
            report.evaluations.iter().filter(|e| &e.system == system).collect();
        let reports: Vec<(&str, &MetricReport<S>)> = evals
            .iter()
            .filter_map(|e| match &e.result {
                EvalResult::Report(r) => Some((e.case_id.as_str(), r.as_ref())),
                EvalResult::Skipped { .. } => None,
            })
            .collect();
        let evaluated = reports.len();
        let skipped = evals.len() - evaluated;
        let passes =
            reports.iter().filter(|(_, r)| r.output_class == Outcome::Pass).count();
        let pass_rate = if evaluated == 0 {
            None
        } else {
            Some(S::from_count(passes) / S::from_count(evaluated))
        };

        let all_scores: Vec<&ScoreSet<S>> = reports.iter().map(|(_, r)| &r.scores).collect();
        let mean_scores = MeanScoreSet::over(&all_scores);

        let mut per_section = BTreeMap::new();
        for kind in SectionKind::ALL {
            let sets: Vec<&ScoreSet<S>> = reports
                .iter()
                .filter_map(|(_, r)| r.per_section.get(&kind).and_then(Option::as_ref))
                .collect();
            if !sets.is_empty() {
                per_section.insert(kind, MeanScoreSet::over(&sets));
            }
        }

        let mut per_class = BTreeMap::new();
        for class in CharClass::ALL {
            let scores: Vec<S> = reports
                .iter()
                .filter_map(|(_, r)| r.per_class.get(&class).cloned().flatten())
                .collect();
            per_class.insert(class, mean(scores));
        }

        let fca_of = |complex: bool| {
            mean(reports.iter().filter_map(|(case_id, r)| {
                let case = case_by_id.get(case_id)?;
                (is_complex(&suite.model, case) == complex).then(|| r.scores.fca.clone())
            }))
        };

        per_system.insert(
            system.clone(),
            SystemAggregate {
                evaluated,
                skipped,
                passes,
                pass_rate,
                mean_scores,
                per_section,
                per_class,
                normal_context_fca: fca_of(false),
                complex_context_fca: fca_of(true),
            },
        );
    }
    Aggregates { per_system }
}

/// Output format for rendered reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Markdown,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(format!("unknown report format `{other}` (json|csv|markdown)")),
        }
    }
}

/// One rendered output file.
#[derive(Debug, Clone)]
pub struct ReportFile {
    pub name: String,
    pub bytes: Vec<u8>,
}

// JSON schema types. Field order here is the wire order; maps are
// BTreeMaps so key order is stable byte-for-byte across runs.

#[derive(Debug, Serialize)]
struct JsonReport {
    meta: JsonMeta,
    cases: Vec<JsonCase>,
    aggregates: JsonAggregates,
}

#[derive(Debug, Serialize)]
struct JsonMeta {
    model: String,
    threshold: f64,
}

#[derive(Debug, Serialize)]
struct JsonCase {
    id: String,
    system: String,
    fca: Option<f64>,
    ssa: Option<f64>,
    ossa: Option<f64>,
    tla: Option<f64>,
    per_class: BTreeMap<String, Option<f64>>,
    per_section: BTreeMap<String, Option<JsonScoreSet>>,
    result: Option<String>,
    skipped_reason: Option<String>,
}

#[derive(Debug, Serialize)]
struct JsonScoreSet {
    fca: f64,
    ssa: f64,
    ossa: f64,
    tla: f64,
}

#[derive(Debug, Serialize)]
struct JsonAggregates {
    per_system: BTreeMap<String, JsonSystemAggregate>,
}

#[derive(Debug, Serialize)]
struct JsonSystemAggregate {
    evaluated: usize,
    skipped: usize,
    passes: usize,
    pass_rate: Option<f64>,
    mean: JsonMeanScores,
    per_section: BTreeMap<String, JsonMeanScores>,
    per_class: BTreeMap<String, Option<f64>>,
    normal_context_fca: Option<f64>,
    complex_context_fca: Option<f64>,
}

#[derive(Debug, Serialize)]
struct JsonMeanScores {
    fca: Option<f64>,
    ssa: Option<f64>,
    ossa: Option<f64>,
    tla: Option<f64>,
}

fn json_scores<S: Scalar>(set: &ScoreSet<S>) -> JsonScoreSet {
    JsonScoreSet {
        fca: set.fca.as_f64(),
        ssa: set.ssa.as_f64(),
        ossa: set.ossa.as_f64(),
        tla: set.tla.as_f64(),
    }
}

fn json_means<S: Scalar>(set: &MeanScoreSet<S>) -> JsonMeanScores {
    JsonMeanScores {
        fca: set.fca.as_ref().map(Scalar::as_f64),
        ssa: set.ssa.as_ref().map(Scalar::as_f64),
        ossa: set.ossa.as_ref().map(Scalar::as_f64),
        tla: set.tla.as_ref().map(Scalar::as_f64),
    }
}

fn build_json<S: Scalar>(
    suite: &Suite,
    config: &MetricConfig<S>,
    report: &RunReport<S>,
    aggregates: &Aggregates<S>,
) -> JsonReport {
    let cases = report
        .evaluations
        .iter()
        .map(|eval| match &eval.result {
            EvalResult::Report(r) => JsonCase {
                id: eval.case_id.clone(),
                system: eval.system.clone(),
                fca: Some(r.scores.fca.as_f64()),
                ssa: Some(r.scores.ssa.as_f64()),
                ossa: Some(r.scores.ossa.as_f64()),
                tla: Some(r.scores.tla.as_f64()),
                per_class: r
                    .per_class
                    .iter()
                    .map(|(c, v)| (c.name().to_string(), v.as_ref().map(Scalar::as_f64)))
                    .collect(),
                per_section: r
                    .per_section
                    .iter()
                    .map(|(k, v)| (k.name().to_string(), v.as_ref().map(json_scores)))
                    .collect(),
                result: Some(r.output_class.to_string()),
                skipped_reason: None,
            },
            EvalResult::Skipped { reason } => JsonCase {
                id: eval.case_id.clone(),
                system: eval.system.clone(),
                fca: None,
                ssa: None,
                ossa: None,
                tla: None,
                per_class: BTreeMap::new(),
                per_section: BTreeMap::new(),
                result: None,
                skipped_reason: Some(reason.clone()),
            },
        })
        .collect();
    let per_system = aggregates
        .per_system
        .iter()
        .map(|(name, agg)| {
            (
                name.clone(),
                JsonSystemAggregate {
                    evaluated: agg.evaluated,
                    skipped: agg.skipped,
                    passes: agg.passes,
                    pass_rate: agg.pass_rate.as_ref().map(Scalar::as_f64),
                    mean: json_means(&agg.mean_scores),
                    per_section: agg
                        .per_section
                        .iter()
                        .map(|(k, v)| (k.name().to_string(), json_means(v)))
                        .collect(),
                    per_class: agg
                        .per_class
                        .iter()
                        .map(|(c, v)| (c.name().to_string(), v.as_ref().map(Scalar::as_f64)))
                        .collect(),
                    normal_context_fca: agg.normal_context_fca.as_ref().map(Scalar::as_f64),
                    complex_context_fca: agg.complex_context_fca.as_ref().map(Scalar::as_f64),
                },
            )
        })
        .collect();
    JsonReport {
        meta: JsonMeta {
            model: suite.model_ref.display().to_string(),
            threshold: config.pass_threshold.as_f64(),
        },
        cases,
        aggregates: JsonAggregates { per_system },
    }
}

fn fmt_opt(v: &Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.4}"),
        None => "n/a".to_string(),
    }
}

fn render_markdown(json: &JsonReport) -> String {
    let mut md = String::new();
    let _ = writeln!(md, "# Suite report\n");
    let _ = writeln!(md, "Model: `{}`, pass threshold: {}\n", json.meta.model, json.meta.threshold);

    let _ = writeln!(md, "## Case results\n");
    let _ = writeln!(md, "| case | system | fca | ssa | ossa | tla | result |");
    let _ = writeln!(md, "|---|---|---|---|---|---|---|");
    for case in &json.cases {
        let result = case
            .result
            .clone()
            .unwrap_or_else(|| {
                format!("skipped: {}", case.skipped_reason.as_deref().unwrap_or("unknown"))
            });
        let _ = writeln!(
            md,
            "| {} | {} | {} | {} | {} | {} | {} |",
            case.id,
            case.system,
            fmt_opt(&case.fca),
            fmt_opt(&case.ssa),
            fmt_opt(&case.ossa),
            fmt_opt(&case.tla),
            result
        );
    }

    let _ = writeln!(md, "\n## FCA by section\n");
    let _ = writeln!(md, "| system | section | fca |");
    let _ = writeln!(md, "|---|---|---|");
    for (system, agg) in &json.aggregates.per_system {
        for (section, means) in &agg.per_section {
            let _ = writeln!(md, "| {} | {} | {} |", system, section, fmt_opt(&means.fca));
        }
    }

    let _ = writeln!(md, "\n## FCA by character class\n");
    let _ = writeln!(md, "| system | class | fca |");
    let _ = writeln!(md, "|---|---|---|");
    for (system, agg) in &json.aggregates.per_system {
        for (class, score) in &agg.per_class {
            let _ = writeln!(md, "| {} | {} | {} |", system, class, fmt_opt(score));
        }
    }

    let _ = writeln!(md, "\n## Metrics overall and by section\n");
    let _ = writeln!(md, "| system | scope | fca | ssa | ossa | tla |");
    let _ = writeln!(md, "|---|---|---|---|---|---|");
    for (system, agg) in &json.aggregates.per_system {
        let _ = writeln!(
            md,
            "| {} | overall | {} | {} | {} | {} |",
            system,
            fmt_opt(&agg.mean.fca),
            fmt_opt(&agg.mean.ssa),
            fmt_opt(&agg.mean.ossa),
            fmt_opt(&agg.mean.tla)
        );
        for (section, means) in &agg.per_section {
            let _ = writeln!(
                md,
                "| {} | {} | {} | {} | {} | {} |",
                system,
                section,
                fmt_opt(&means.fca),
                fmt_opt(&means.ssa),
                fmt_opt(&means.ossa),
                fmt_opt(&means.tla)
            );
        }
    }

    let _ = writeln!(md, "\n## Context difficulty\n");
    let _ = writeln!(md, "| system | normal fca | complex fca | pass rate |");
    let _ = writeln!(md, "|---|---|---|---|");
    for (system, agg) in &json.aggregates.per_system {
        let _ = writeln!(
            md,
            "| {} | {} | {} | {} |",
            system,
            fmt_opt(&agg.normal_context_fca),
            fmt_opt(&agg.complex_context_fca),
            fmt_opt(&agg.pass_rate)
        );
    }
    md
}

fn csv_table(headers: &[&str], rows: Vec<Vec<String>>) -> Vec<u8> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    writer.write_record(headers).expect("write to Vec cannot fail");
    for row in rows {
        writer.write_record(&row).expect("write to Vec cannot fail");
    }
    writer.into_inner().expect("flush to Vec cannot fail")
}

fn s_opt(v: &Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn render_csv(json: &JsonReport) -> Vec<ReportFile> {
    let cases = csv_table(
        &["case", "system", "fca", "ssa", "ossa", "tla", "result", "skipped_reason"],
        json.cases
            .iter()
            .map(|c| {
                vec![
                    c.id.clone(),
                    c.system.clone(),
                    s_opt(&c.fca),
                    s_opt(&c.ssa),
                    s_opt(&c.ossa),
                    s_opt(&c.tla),
                    c.result.clone().unwrap_or_default(),
                    c.skipped_reason.clone().unwrap_or_default(),
                ]
            })
            .collect(),
    );
    let mut section_rows = Vec::new();
    let mut class_rows = Vec::new();
    let mut metric_rows = Vec::new();
    let mut context_rows = Vec::new();
    for (system, agg) in &json.aggregates.per_system {
        for (section, means) in &agg.per_section {
            section_rows.push(vec![system.clone(), section.clone(), s_opt(&means.fca)]);
        }
        for (class, score) in &agg.per_class {
            class_rows.push(vec![system.clone(), class.clone(), s_opt(score)]);
        }
        metric_rows.push(vec![
            system.clone(),
            "overall".into(),
            s_opt(&agg.mean.fca),
            s_opt(&agg.mean.ssa),
            s_opt(&agg.mean.ossa),
            s_opt(&agg.mean.tla),
        ]);
        for (section, means) in &agg.per_section {
            metric_rows.push(vec![
                system.clone(),
                section.clone(),
                s_opt(&means.fca),
                s_opt(&means.ssa),
                s_opt(&means.ossa),
                s_opt(&means.tla),
            ]);
        }
        context_rows.push(vec![
            system.clone(),
            s_opt(&agg.normal_context_fca),
            s_opt(&agg.complex_context_fca),
            s_opt(&agg.pass_rate),
        ]);
    }
    vec![
        ReportFile { name: "cases.csv".into(), bytes: cases },
        ReportFile {
            name: "fca_by_section.csv".into(),
            bytes: csv_table(&["system", "section", "fca"], section_rows),
        },
        ReportFile {
            name: "fca_by_class.csv".into(),
            bytes: csv_table(&["system", "class", "fca"], class_rows),
        },
        ReportFile {
            name: "metrics_by_section.csv".into(),
            bytes: csv_table(&["system", "scope", "fca", "ssa", "ossa", "tla"], metric_rows),
        },
        ReportFile {
            name: "context_split.csv".into(),
            bytes: csv_table(
                &["system", "normal_fca", "complex_fca", "pass_rate"],
                context_rows,
            ),
        },
    ]
}

/// Renders a run into one or more files. JSON output is byte-stable for
/// identical inputs.
pub fn render_report<S: Scalar>(
    suite: &Suite,
    config: &MetricConfig<S>,
    report: &RunReport<S>,
    aggregates: &Aggregates<S>,
    format: ReportFormat,
) -> Vec<ReportFile> {
    let json = build_json(suite, config, report, aggregates);
    match format {
        ReportFormat::Json => {
            // Through `Value` so keys come out sorted: parse-and-reemit
            // is then the identity, and diffs between runs stay minimal.
            let value =
                serde_json::to_value(&json).expect("report serialization cannot fail");
            let mut bytes =
                serde_json::to_vec_pretty(&value).expect("report serialization cannot fail");
            bytes.push(b'\n');
            vec![ReportFile { name: "report.json".into(), bytes }]
        }
        ReportFormat::Markdown => vec![ReportFile {
            name: "report.md".into(),
            bytes: render_markdown(&json).into_bytes(),
        }],
        ReportFormat::Csv => render_csv(&json),
    }
}
