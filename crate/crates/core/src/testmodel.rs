//! The 3D classification test model.
//!
//! Three classification trees (context, input, output) decompose a test
//! dimension into categories with leaf stubs. Test cases select one leaf
//! per condition category and name one expected output stub; the
//! stub-by-case decision table, coverage checking, test complexity, and
//! one-factor-at-a-time suite derivation all operate on that structure.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Dimension {
    Context,
    Input,
    Output,
}

impl Dimension {
    pub fn name(self) -> &'static str {
        match self {
            Dimension::Context => "context",
            Dimension::Input => "input",
            Dimension::Output => "output",
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Stub severity, aggregated by the harness as normal-vs-complex context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    #[default]
    Normal,
    Complex,
}

/// A classification-tree leaf: the atomic test condition unit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stub {
    pub id: String,
    pub label: String,
    #[serde(default)]
    pub severity: Severity,
}

/// A named group of leaves; a test case picks at most one leaf per
/// category.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Category {
    pub name: String,
    pub leaves: Vec<Stub>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassificationTree {
    pub dimension: Dimension,
    pub categories: Vec<Category>,
}

impl ClassificationTree {
    pub fn leaf_count(&self) -> usize {
        self.categories.iter().map(|c| c.leaves.len()).sum()
    }

    pub fn stubs(&self) -> impl Iterator<Item = &Stub> {
        self.categories.iter().flat_map(|c| c.leaves.iter())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestModel3D {
    pub context: ClassificationTree,
    pub input: ClassificationTree,
    pub output: ClassificationTree,
}

/// Where a stub lives inside the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StubLocation {
    pub dimension: Dimension,
    pub category: usize,
    pub leaf: usize,
}

#[derive(Debug, Deserialize)]
struct RawModel {
    context: Vec<Category>,
    input: Vec<Category>,
    output: Vec<Category>,
}

impl TestModel3D {
    pub fn trees(&self) -> [&ClassificationTree; 3] {
        [&self.context, &self.input, &self.output]
    }

    /// Context and input categories, in model order: the condition
    /// categories a test case selects from.
    pub fn condition_categories(&self) -> impl Iterator<Item = (Dimension, &Category)> {
        self.context
            .categories
            .iter()
            .map(|c| (Dimension::Context, c))
            .chain(self.input.categories.iter().map(|c| (Dimension::Input, c)))
    }

    /// Id-to-location index over all three trees.
    pub fn stub_index(&self) -> BTreeMap<&str, StubLocation> {
        let mut index = BTreeMap::new();
        for tree in self.trees() {
            for (ci, category) in tree.categories.iter().enumerate() {
                for (li, leaf) in category.leaves.iter().enumerate() {
                    index.insert(
                        leaf.id.as_str(),
                        StubLocation { dimension: tree.dimension, category: ci, leaf: li },
                    );
                }
            }
        }
        index
    }

    pub fn stub(&self, id: &str) -> Option<&Stub> {
        self.trees().into_iter().flat_map(|t| t.stubs()).find(|s| s.id == id)
    }

    fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for tree in self.trees() {
            if tree.categories.is_empty() {
                return Err(Error::Validation(format!(
                    "{} tree has no categories",
                    tree.dimension
                )));
            }
            for category in &tree.categories {
                if category.name.trim().is_empty() {
                    return Err(Error::Validation(format!(
                        "unnamed category in {} tree",
                        tree.dimension
                    )));
                }
                if category.leaves.is_empty() {
                    return Err(Error::Validation(format!(
                        "category `{}` in {} tree has no leaves",
                        category.name, tree.dimension
                    )));
                }
                for leaf in &category.leaves {
                    if leaf.id.trim().is_empty() {
                        return Err(Error::Validation(format!(
                            "empty stub id in category `{}`",
                            category.name
                        )));
                    }
                    if !seen.insert(leaf.id.clone()) {
                        return Err(Error::Validation(format!(
                            "duplicate stub id `{}`",
                            leaf.id
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Parses a model file (TOML with top-level `context`, `input`, `output`
/// category lists) and validates its invariants.
pub fn parse_model(bytes: &[u8]) -> Result<TestModel3D> {
    let text = std::str::from_utf8(bytes)
        .map_err(|_| Error::InvalidEncoding { context: Some("model file".into()) })?;
    let raw: RawModel = toml::from_str(text).map_err(|e| Error::parse(e.to_string()))?;
    let model = TestModel3D {
        context: ClassificationTree { dimension: Dimension::Context, categories: raw.context },
        input: ClassificationTree { dimension: Dimension::Input, categories: raw.input },
        output: ClassificationTree { dimension: Dimension::Output, categories: raw.output },
    };
    model.validate()?;
    Ok(model)
}

/// One test case: condition selections plus the expected output stub and
/// the files that realize it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestCase {
    pub id: String,
    pub selections: Vec<String>,
    pub expected_output: String,
    #[serde(default, rename = "gt")]
    pub gt_ref: PathBuf,
    #[serde(default, rename = "ocr")]
    pub ocr_refs: BTreeMap<String, PathBuf>,
}

impl TestCase {
    pub fn selects(&self, stub_id: &str) -> bool {
        self.selections.iter().any(|s| s == stub_id)
    }
}

/// Checks a case against the model: known stubs, at most one leaf per
/// category, selections drawn from condition trees, expected output from
/// the output tree.
pub fn validate_case(model: &TestModel3D, case: &TestCase) -> Result<()> {
    let index = model.stub_index();
    let mut used: BTreeMap<(Dimension, usize), &str> = BTreeMap::new();
    for id in &case.selections {
        let loc = index.get(id.as_str()).ok_or_else(|| {
            Error::Validation(format!("case `{}` selects unknown stub `{id}`", case.id))
        })?;
        if loc.dimension == Dimension::Output {
            return Err(Error::Validation(format!(
                "case `{}` selects output stub `{id}`; outputs are expectations",
                case.id
            )));
        }
        let key = (loc.dimension, loc.category);
        if let Some(prior) = used.insert(key, id) {
            let tree = match loc.dimension {
                Dimension::Context => &model.context,
                _ => &model.input,
            };
            return Err(Error::Validation(format!(
                "case `{}` selects two leaves (`{prior}`, `{id}`) in category `{}`",
                case.id, tree.categories[loc.category].name
            )));
        }
    }
    let out_loc = index.get(case.expected_output.as_str()).ok_or_else(|| {
        Error::Validation(format!(
            "case `{}` expects unknown stub `{}`",
            case.id, case.expected_output
        ))
    })?;
    if out_loc.dimension != Dimension::Output {
        return Err(Error::Validation(format!(
            "case `{}` expected output `{}` is not in the output tree",
            case.id, case.expected_output
        )));
    }
    Ok(())
}

/// Leaf counts per tree and their product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ComplexityReport {
    pub cc: usize,
    pub ic: usize,
    pub oc: usize,
    pub total: usize,
}

/// Test complexity: the number of stubs per tree, multiplied.
pub fn complexity(model: &TestModel3D) -> ComplexityReport {
    let cc = model.context.leaf_count();
    let ic = model.input.leaf_count();
    let oc = model.output.leaf_count();
    ComplexityReport { cc, ic, oc, total: cc * ic * oc }
}

/// Derives the one-factor-at-a-time suite: the base case plus one
/// variant per non-base leaf of every condition category, each variant
/// differing from the base in exactly that category.
pub fn derive_ofat(model: &TestModel3D, base: &TestCase) -> Result<Vec<TestCase>> {
    validate_case(model, base)?;
    let index = model.stub_index();
    let mut selected_per_category: BTreeMap<(Dimension, usize), &str> = BTreeMap::new();
    for id in &base.selections {
        let loc = index[id.as_str()];
        selected_per_category.insert((loc.dimension, loc.category), id);
    }

    let mut suite = vec![base.clone()];
    for (ci, (dimension, category)) in indexed_condition_categories(model) {
        let base_choice =
            *selected_per_category.get(&(dimension, ci)).ok_or_else(|| {
                Error::Precondition(format!(
                    "base case `{}` selects nothing in category `{}`",
                    base.id, category.name
                ))
            })?;
        for leaf in &category.leaves {
            if leaf.id == base_choice {
                continue;
            }
            let mut variant = base.clone();
            variant.id = format!("{}-{}", base.id, leaf.id);
            for sel in &mut variant.selections {
                if sel == base_choice {
                    *sel = leaf.id.clone();
                }
            }
            suite.push(variant);
        }
    }
    Ok(suite)
}

fn indexed_condition_categories(
    model: &TestModel3D,
) -> impl Iterator<Item = (usize, (Dimension, &Category))> {
    model
        .context
        .categories
        .iter()
        .enumerate()
        .map(|(i, c)| (i, (Dimension::Context, c)))
        .chain(
            model
                .input
                .categories
                .iter()
                .enumerate()
                .map(|(i, c)| (i, (Dimension::Input, c))),
        )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DimensionCoverage {
    pub covered: usize,
    pub total: usize,
}

impl DimensionCoverage {
    pub fn ratio(&self) -> f64 {
        if self.total == 0 {
            1.0
        } else {
            self.covered as f64 / self.total as f64
        }
    }

    pub fn is_full(&self) -> bool {
        self.covered == self.total
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageReport {
    pub covered: BTreeSet<String>,
    pub uncovered: BTreeSet<String>,
    pub context: DimensionCoverage,
    pub input: DimensionCoverage,
    pub output: DimensionCoverage,
    pub overall: DimensionCoverage,
}

/// A stub is covered when some case selects it or names it as the
/// expected output.
pub fn check_coverage(model: &TestModel3D, cases: &[TestCase]) -> Result<CoverageReport> {
    let index = model.stub_index();
    let mut covered: BTreeSet<String> = BTreeSet::new();
    for case in cases {
        for id in case.selections.iter().chain(std::iter::once(&case.expected_output)) {
            if !index.contains_key(id.as_str()) {
                return Err(Error::Validation(format!(
                    "case `{}` references unknown stub `{id}`",
                    case.id
                )));
            }
            covered.insert(id.clone());
        }
    }
    let mut dims = BTreeMap::new();
    let mut uncovered = BTreeSet::new();
    for tree in model.trees() {
        let mut cov = DimensionCoverage { covered: 0, total: 0 };
        for stub in tree.stubs() {
            cov.total += 1;
            if covered.contains(&stub.id) {
                cov.covered += 1;
            } else {
                uncovered.insert(stub.id.clone());
            }
        }
        dims.insert(tree.dimension, cov);
    }
    let total: usize = dims.values().map(|c| c.total).sum();
    Ok(CoverageReport {
        context: dims[&Dimension::Context],
        input: dims[&Dimension::Input],
        output: dims[&Dimension::Output],
        overall: DimensionCoverage { covered: covered.len(), total },
        covered,
        uncovered,
    })
}

/// Decision-table cell marker.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cell {
    Blank,
    /// `x`: the case selects this condition stub.
    Selected,
    /// `o`: the case expects this output stub.
    Expected,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRow {
    pub stub_id: String,
    pub cells: Vec<Cell>,
}

/// Stub-by-case matrix: rows in tree order (context, input, output),
/// columns in case order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionTable {
    pub case_ids: Vec<String>,
    pub rows: Vec<TableRow>,
}

pub fn build_decision_table(model: &TestModel3D, cases: &[TestCase]) -> Result<DecisionTable> {
    for case in cases {
        validate_case(model, case)?;
    }
    let case_ids: Vec<String> = cases.iter().map(|c| c.id.clone()).collect();
    let mut rows = Vec::new();
    for tree in model.trees() {
        for stub in tree.stubs() {
            let cells = cases
                .iter()
                .map(|case| {
                    if tree.dimension == Dimension::Output {
                        if case.expected_output == stub.id {
                            Cell::Expected
                        } else {
                            Cell::Blank
                        }
                    } else if case.selects(&stub.id) {
                        Cell::Selected
                    } else {
                        Cell::Blank
                    }
                })
                .collect();
            rows.push(TableRow { stub_id: stub.id.clone(), cells });
        }
    }
    Ok(DecisionTable { case_ids, rows })
}

/// Renders the table as CSV: header `stub_id, <case ids...>`, cells `x`,
/// `o`, or empty; UTF-8, LF line endings, fields quoted when needed.
pub fn export_table_csv(table: &DecisionTable) -> Vec<u8> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let mut header = vec!["stub_id".to_string()];
    header.extend(table.case_ids.iter().cloned());
    writer.write_record(&header).expect("write to Vec cannot fail");
    for row in &table.rows {
        let mut record = vec![row.stub_id.clone()];
        record.extend(row.cells.iter().map(|c| {
            match c {
                Cell::Blank => "",
                Cell::Selected => "x",
                Cell::Expected => "o",
            }
            .to_string()
        }));
        writer.write_record(&record).expect("write to Vec cannot fail");
    }
    writer.into_inner().expect("flush to Vec cannot fail")
}

/// Parses CSV produced by [`export_table_csv`]; the structural invariant
/// of exactly one `o` per column is re-checked.
pub fn import_table_csv(bytes: &[u8]) -> Result<DecisionTable> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).from_reader(bytes);
    let mut records = reader.records();
    let header = match records.next() {
        Some(r) => r.map_err(|e| Error::parse(e.to_string()))?,
        None => return Err(Error::parse("empty decision table csv")),
    };
    if header.get(0) != Some("stub_id") {
        return Err(Error::parse("first header column must be `stub_id`"));
    }
    let case_ids: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut rows = Vec::new();
    for (i, record) in records.enumerate() {
        let record = record.map_err(|e| Error::parse(e.to_string()))?;
        if record.len() != case_ids.len() + 1 {
            return Err(Error::parse_at(i + 2, "row width does not match header"));
        }
        let stub_id = record.get(0).unwrap_or_default().to_string();
        let cells = record
            .iter()
            .skip(1)
            .map(|cell| match cell {
                "" => Ok(Cell::Blank),
                "x" => Ok(Cell::Selected),
                "o" => Ok(Cell::Expected),
                other => Err(Error::parse_at(i + 2, format!("unknown cell marker `{other}`"))),
            })
            .collect::<Result<Vec<Cell>>>()?;
        rows.push(TableRow { stub_id, cells });
    }
    for (col, case_id) in case_ids.iter().enumerate() {
        let expected = rows.iter().filter(|r| r.cells[col] == Cell::Expected).count();
        if expected != 1 {
            return Err(Error::Validation(format!(
                "case `{case_id}` has {expected} expected-output markers, wanted exactly 1"
            )));
        }
    }
    Ok(DecisionTable { case_ids, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_model() -> TestModel3D {
        parse_model(
            br#"
[[context]]
name = "light"
leaves = [{ id = "a", label = "A" }, { id = "b", label = "B", severity = "complex" }]

[[input]]
name = "list"
leaves = [{ id = "c", label = "C" }, { id = "d", label = "D" }, { id = "e", label = "E" }]

[[output]]
name = "result"
leaves = [{ id = "p", label = "pass" }, { id = "q", label = "fail" }]
"#,
        )
        .unwrap()
    }

    fn base_case() -> TestCase {
        TestCase {
            id: "base".into(),
            selections: vec!["a".into(), "c".into()],
            expected_output: "p".into(),
            gt_ref: PathBuf::new(),
            ocr_refs: BTreeMap::new(),
        }
    }

    #[test]
    fn parse_model_reads_trees_and_severity() {
        let model = tiny_model();
        assert_eq!(model.context.leaf_count(), 2);
        assert_eq!(model.input.leaf_count(), 3);
        assert_eq!(model.output.leaf_count(), 2);
        assert_eq!(model.stub("b").unwrap().severity, Severity::Complex);
        assert_eq!(model.stub("a").unwrap().severity, Severity::Normal);
    }

    #[test]
    fn parse_model_rejects_missing_tree() {
        let err = parse_model(b"[[context]]\nname = \"x\"\nleaves = [{id = \"a\", label = \"A\"}]")
            .unwrap_err();
        assert!(matches!(err, Error::Parse { .. }), "{err}");
    }

    #[test]
    fn parse_model_rejects_duplicate_ids() {
        let err = parse_model(
            br#"
[[context]]
name = "c"
leaves = [{ id = "a", label = "A" }]
[[input]]
name = "i"
leaves = [{ id = "a", label = "again" }]
[[output]]
name = "o"
leaves = [{ id = "p", label = "P" }]
"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("duplicate stub id `a`"), "{err}");
    }

    #[test]
    fn parse_model_rejects_empty_category() {
        let err = parse_model(
            br#"
[[context]]
name = "c"
leaves = []
[[input]]
name = "i"
leaves = [{ id = "a", label = "A" }]
[[output]]
name = "o"
leaves = [{ id = "p", label = "P" }]
"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("no leaves"), "{err}");
    }

    #[test]
    fn minimal_model_is_valid() {
        let model = parse_model(
            br#"
[[context]]
name = "c"
leaves = [{ id = "a", label = "A" }]
[[input]]
name = "i"
leaves = [{ id = "b", label = "B" }]
[[output]]
name = "o"
leaves = [{ id = "p", label = "P" }]
"#,
        )
        .unwrap();
        assert_eq!(complexity(&model).total, 1);
    }

    #[test]
    fn complexity_is_the_leaf_product() {
        let report = complexity(&tiny_model());
        assert_eq!((report.cc, report.ic, report.oc), (2, 3, 2));
        assert_eq!(report.total, 12);
    }

    #[test]
    fn ofat_enumerates_single_tweaks() {
        let model = tiny_model();
        let suite = derive_ofat(&model, &base_case()).unwrap();
        // 1 + (2-1) + (3-1)
        assert_eq!(suite.len(), 4);
        assert_eq!(suite[0].id, "base");
        assert_eq!(suite[1].selections, vec!["b".to_string(), "c".to_string()]);
        assert_eq!(suite[2].selections, vec!["a".to_string(), "d".to_string()]);
        assert_eq!(suite[3].selections, vec!["a".to_string(), "e".to_string()]);
        assert!(suite.iter().all(|c| c.expected_output == "p"));
        assert!(suite[1..].iter().all(|c| c.id.starts_with("base-")));
    }

    #[test]
    fn ofat_requires_every_category_selected() {
        let model = tiny_model();
        let mut base = base_case();
        base.selections = vec!["a".into()];
        let err = derive_ofat(&model, &base).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)), "{err}");
    }

    #[test]
    fn ofat_on_singleton_categories_is_just_the_base() {
        let model = parse_model(
            br#"
[[context]]
name = "c"
leaves = [{ id = "a", label = "A" }]
[[input]]
name = "i"
leaves = [{ id = "b", label = "B" }]
[[output]]
name = "o"
leaves = [{ id = "p", label = "P" }]
"#,
        )
        .unwrap();
        let base = TestCase {
            id: "base".into(),
            selections: vec!["a".into(), "b".into()],
            expected_output: "p".into(),
            gt_ref: PathBuf::new(),
            ocr_refs: BTreeMap::new(),
        };
        assert_eq!(derive_ofat(&model, &base).unwrap(), vec![base]);
    }

    #[test]
    fn coverage_of_ofat_suite_is_full_for_conditions() {
        let model = tiny_model();
        let suite = derive_ofat(&model, &base_case()).unwrap();
        let report = check_coverage(&model, &suite).unwrap();
        assert!(report.context.is_full());
        assert!(report.input.is_full());
        assert_eq!(report.output, DimensionCoverage { covered: 1, total: 2 });
    }

    #[test]
    fn coverage_of_empty_suite_is_zero() {
        let report = check_coverage(&tiny_model(), &[]).unwrap();
        assert_eq!(report.overall.covered, 0);
        assert_eq!(report.overall.total, 7);
        assert_eq!(report.uncovered.len(), 7);
    }

    #[test]
    fn coverage_counts_partial_selection() {
        let model = parse_model(
            br#"
[[context]]
name = "c"
leaves = [{ id = "a", label = "A" }, { id = "b", label = "B" }]
[[input]]
name = "i"
leaves = [{ id = "c", label = "C" }]
[[output]]
name = "o"
leaves = [{ id = "p", label = "P" }]
"#,
        )
        .unwrap();
        let case = TestCase {
            id: "t1".into(),
            selections: vec!["a".into(), "c".into()],
            expected_output: "p".into(),
            gt_ref: PathBuf::new(),
            ocr_refs: BTreeMap::new(),
        };
        let report = check_coverage(&model, &[case]).unwrap();
        assert_eq!(report.uncovered, BTreeSet::from(["b".to_string()]));
        assert_eq!(report.overall, DimensionCoverage { covered: 3, total: 4 });
    }

    #[test]
    fn coverage_rejects_unknown_stub() {
        let mut case = base_case();
        case.selections.push("nope".into());
        let err = check_coverage(&tiny_model(), &[case]).unwrap_err();
        assert!(err.to_string().contains("nope"), "{err}");
    }

    #[test]
    fn decision_table_rows_and_columns() {
        let model = tiny_model();
        let suite = derive_ofat(&model, &base_case()).unwrap();
        let table = build_decision_table(&model, &suite).unwrap();
        assert_eq!(table.case_ids.len(), 4);
        assert_eq!(table.rows.len(), 7);
        for col in 0..table.case_ids.len() {
            let expected =
                table.rows.iter().filter(|r| r.cells[col] == Cell::Expected).count();
            assert_eq!(expected, 1);
        }
    }

    #[test]
    fn decision_table_rejects_double_selection() {
        let model = tiny_model();
        let mut case = base_case();
        case.selections = vec!["a".into(), "b".into(), "c".into()];
        let err = build_decision_table(&model, &[case]).unwrap_err();
        assert!(err.to_string().contains("two leaves"), "{err}");
    }

    #[test]
    fn empty_case_list_gives_zero_columns() {
        let table = build_decision_table(&tiny_model(), &[]).unwrap();
        assert!(table.case_ids.is_empty());
        assert_eq!(table.rows.len(), 7);
        let csv = export_table_csv(&table);
        assert_eq!(String::from_utf8(csv).unwrap().lines().next(), Some("stub_id"));
    }

    #[test]
    fn csv_round_trip() {
        let model = tiny_model();
        let suite = derive_ofat(&model, &base_case()).unwrap();
        let table = build_decision_table(&model, &suite).unwrap();
        let bytes = export_table_csv(&table);
        assert_eq!(import_table_csv(&bytes).unwrap(), table);
    }

    #[test]
    fn csv_quotes_commas() {
        let table = DecisionTable {
            case_ids: vec!["case,one".into()],
            rows: vec![
                TableRow { stub_id: "s1".into(), cells: vec![Cell::Selected] },
                TableRow { stub_id: "out".into(), cells: vec![Cell::Expected] },
            ],
        };
        let bytes = export_table_csv(&table);
        let text = String::from_utf8(bytes).unwrap();
        assert!(text.contains("\"case,one\""), "{text}");
        assert_eq!(import_table_csv(text.as_bytes()).unwrap(), table);
    }

    #[test]
    fn single_cell_table_exports_expected_marker() {
        let table = DecisionTable {
            case_ids: vec!["t1".into()],
            rows: vec![TableRow { stub_id: "p".into(), cells: vec![Cell::Expected] }],
        };
        let text = String::from_utf8(export_table_csv(&table)).unwrap();
        assert_eq!(text, "stub_id,t1\np,o\n");
    }
}
