//! The four accuracy metrics, per-class and per-section views, and
//! pass/fail classification.
//!
//! Flexible character accuracy (FCA) matches ground-truth lines against
//! recognized text without regard to reading order. String segment
//! accuracy (SSA) runs the same matching over segment symbols; ordered
//! segment accuracy (OSSA) scores the serialized symbol sequence instead,
//! so it alone is sensitive to rearrangement. Text-line accuracy (TLA)
//! counts exactly reproduced lines.

use std::collections::BTreeMap;
use std::fmt;

use crate::alignment::{
    character_accuracy, substring_distance_pref, SpanPreference, SubstringMatch,
};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::textmodel::{
    build_symbols, filter_by_class, CharClass, GroundTruthDoc, NormalizedText, SectionKind,
};

/// Which metric a threshold applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    Fca,
    Ssa,
    Ossa,
    Tla,
}

/// Line-match rule for TLA. Exact comparison after normalization is the
/// only mode; the enum leaves room for relaxed modes without changing
/// call sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TlaMatch {
    ExactAfterNormalization,
}

/// Scoring configuration.
#[derive(Debug, Clone)]
pub struct MetricConfig<S> {
    /// Pass/fail boundary, inclusive on the pass side.
    pub pass_threshold: S,
    /// Clamp reported scores into `[0, 1]`; raw values stay in traces.
    pub clamp_scores: bool,
    /// Metric the pass threshold keys on.
    pub threshold_metric: MetricKind,
    pub tla_match: TlaMatch,
}

impl<S: Scalar> Default for MetricConfig<S> {
    fn default() -> Self {
        MetricConfig {
            pass_threshold: S::from_ratio(95, 100),
            clamp_scores: true,
            threshold_metric: MetricKind::Fca,
            tla_match: TlaMatch::ExactAfterNormalization,
        }
    }
}

impl<S: Scalar> MetricConfig<S> {
    pub fn with_threshold(threshold: S) -> Self {
        MetricConfig { pass_threshold: threshold, ..Self::default() }
    }

    fn finish(&self, raw: S) -> S {
        if self.clamp_scores {
            raw.clamp_unit()
        } else {
            raw
        }
    }
}

/// Pass/fail classification of one evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
        })
    }
}

/// One matched (ground-truth line, recognized span) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlexPair {
    pub gt_line: usize,
    pub ocr_line: usize,
    /// Half-open span in units of the original recognized line.
    pub ocr_span: (usize, usize),
    pub errors: usize,
}

/// Full account of one flexible-matching run.
///
/// Units are characters for FCA and segments for SSA. The accounting
/// identity `total_errors = pair errors + unmatched ground-truth units +
/// leftover recognized units` is asserted on every run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlexMatchTrace {
    pub pairs: Vec<FlexPair>,
    pub unmatched_gt: Vec<usize>,
    pub unmatched_gt_units: usize,
    pub leftover_ocr_units: usize,
    pub total_errors: usize,
    /// Ground-truth size `n` the score normalizes by.
    pub gt_units: usize,
}

/// A live recognized-text fragment: `units[start..end]` of an original
/// line. Matching a span splits the fragment and returns the ends to the
/// pool.
#[derive(Debug, Clone)]
struct PoolEntry {
    origin: usize,
    start: usize,
    end: usize,
    alive: bool,
    /// Content class; equal ids mean identical fragment contents.
    content: u32,
}

impl PoolEntry {
    fn len(&self) -> usize {
        self.end - self.start
    }
}

/// Interns fragment contents: identical sequences share an id, which is
/// what lets duplicate lines, repeated residuals, and the cost cache all
/// collapse to per-content work.
struct ContentTable<'a, E: Ord> {
    ids: std::collections::BTreeMap<&'a [E], u32>,
    /// Sorted copy per content, for multiset lower bounds.
    sorted: Vec<Vec<E>>,
}

impl<'a, E: Ord + Clone> ContentTable<'a, E> {
    fn new() -> Self {
        ContentTable { ids: std::collections::BTreeMap::new(), sorted: Vec::new() }
    }

    fn intern(&mut self, units: &'a [E]) -> u32 {
        if let Some(&id) = self.ids.get(units) {
            return id;
        }
        let id = self.sorted.len() as u32;
        let mut sorted = units.to_vec();
        sorted.sort_unstable();
        self.ids.insert(units, id);
        self.sorted.push(sorted);
        id
    }

    fn len(&self) -> usize {
        self.sorted.len()
    }
}

/// Size of the multiset intersection of two sorted sequences.
fn multiset_overlap<E: Ord>(a: &[E], b: &[E]) -> usize {
    let (mut i, mut j, mut shared) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                shared += 1;
                i += 1;
                j += 1;
            }
        }
    }
    shared
}

/// Cached verdict for one (ground-truth content, fragment content) pair.
#[derive(Debug, Clone, Copy)]
enum CostEntry {
    /// Exact containment found at this span.
    Exact(SubstringMatch),
    /// Not contained; the distance is at least `lb` (length and multiset
    /// bounds, and 1 for the failed containment itself).
    Bounded { lb: usize },
    /// Full substring distance.
    Computed(SubstringMatch),
}

struct Candidate {
    gt: usize,
    handle: usize,
    matched: SubstringMatch,
    gt_len: usize,
}

/// Compares candidates by normalized cost `E/|g|` (exact cross
/// multiplication), then longer ground-truth line, then lexicographic
/// contents. Content-based ordering is what makes the outcome
/// independent of reading order; pool position enters only between
/// fully identical candidates, where the choice cannot affect scores.
fn candidate_better<E: Ord>(
    new: &Candidate,
    best: &Candidate,
    gt_lines: &[Vec<E>],
    ocr_lines: &[Vec<E>],
    pool: &[PoolEntry],
) -> bool {
    let lhs = new.matched.error_count * best.gt_len;
    let rhs = best.matched.error_count * new.gt_len;
    if lhs != rhs {
        return lhs < rhs;
    }
    if new.gt_len != best.gt_len {
        return new.gt_len > best.gt_len;
    }
    let new_gt = &gt_lines[new.gt];
    let best_gt = &gt_lines[best.gt];
    if new_gt != best_gt {
        return new_gt < best_gt;
    }
    let fragment = |c: &Candidate| {
        let e = &pool[c.handle];
        &ocr_lines[e.origin][e.start..e.end]
    };
    let new_ocr = fragment(new);
    let best_ocr = fragment(best);
    if new_ocr != best_ocr {
        return new_ocr < best_ocr;
    }
    (new.gt, new.handle) < (best.gt, best.handle)
}

fn find_subslice<E: PartialEq>(haystack: &[E], needle: &[E]) -> Option<usize> {
    if needle.len() > haystack.len() {
        return None;
    }
    haystack.windows(needle.len()).position(|w| w == needle)
}

/// Cost cache indexed by (ground-truth content, fragment content).
struct CostCache {
    rows: Vec<Vec<Option<CostEntry>>>,
}

impl CostCache {
    fn new(gt_contents: usize) -> Self {
        CostCache { rows: vec![Vec::new(); gt_contents] }
    }

    fn get(&mut self, gt_content: u32, pool_content: u32) -> &mut Option<CostEntry> {
        let row = &mut self.rows[gt_content as usize];
        if row.len() <= pool_content as usize {
            row.resize(pool_content as usize + 1, None);
        }
        &mut row[pool_content as usize]
    }
}

/// The order-independent greedy matcher shared by FCA and SSA.
///
/// Repeatedly pairs the globally cheapest (ground-truth line, recognized
/// fragment) combination, consumes the matched span, and returns the
/// fragment's unconsumed ends to the pool. Unmatched ground-truth lines
/// count their full length as errors; recognized units never consumed
/// count one insertion error each.
pub(crate) fn flex_match<E: Ord + Clone>(
    gt_lines: &[Vec<E>],
    ocr_lines: &[Vec<E>],
) -> FlexMatchTrace {
    let gt_units: usize = gt_lines.iter().map(Vec::len).sum();
    let mut gt_live: Vec<bool> = gt_lines.iter().map(|l| !l.is_empty()).collect();
    let mut contents = ContentTable::new();
    let gt_content: Vec<u32> = gt_lines.iter().map(|l| contents.intern(l)).collect();
    // Ground-truth rows in selection-preference order (longer first,
    // then content): among zero-cost candidates the first row with any
    // hit wins outright, so scans can stop there.
    let gt_order: Vec<usize> = {
        let mut order: Vec<usize> = (0..gt_lines.len()).collect();
        order.sort_by(|&a, &b| {
            gt_lines[b]
                .len()
                .cmp(&gt_lines[a].len())
                .then_with(|| gt_lines[a].cmp(&gt_lines[b]))
                .then(a.cmp(&b))
        });
        order
    };
    // Normalization guarantees non-empty lines; tolerate empties anyway
    // by treating them as trivially matched (zero units, zero errors).
    let mut pool: Vec<PoolEntry> = ocr_lines
        .iter()
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(origin, l)| PoolEntry {
            origin,
            start: 0,
            end: l.len(),
            alive: true,
            content: contents.intern(l),
        })
        .collect();
    let gt_content_count = contents.len();
    let mut cost_cache = CostCache::new(gt_content_count.max(1));

    let mut pairs = Vec::new();
    let mut remaining = gt_live.iter().filter(|&&l| l).count();
    let mut alive_entries = pool.len();

    while remaining > 0 && alive_entries > 0 {
        let selected = select_candidate(
            gt_lines,
            &gt_content,
            &gt_order,
            ocr_lines,
            &gt_live,
            &pool,
            &contents,
            &mut cost_cache,
        );
        let Some(best) = selected else { break };

        let entry = &pool[best.handle];
        let (origin, entry_start, entry_end) = (entry.origin, entry.start, entry.end);
        let abs_span = (entry_start + best.matched.span.0, entry_start + best.matched.span.1);
        pairs.push(FlexPair {
            gt_line: best.gt,
            ocr_line: origin,
            ocr_span: abs_span,
            errors: best.matched.error_count,
        });
        gt_live[best.gt] = false;
        remaining -= 1;
        pool[best.handle].alive = false;
        alive_entries -= 1;
        if abs_span.0 > entry_start {
            let fragment = &ocr_lines[origin][entry_start..abs_span.0];
            pool.push(PoolEntry {
                origin,
                start: entry_start,
                end: abs_span.0,
                alive: true,
                content: contents.intern(fragment),
            });
            alive_entries += 1;
        }
        if abs_span.1 < entry_end {
            let fragment = &ocr_lines[origin][abs_span.1..entry_end];
            pool.push(PoolEntry {
                origin,
                start: abs_span.1,
                end: entry_end,
                alive: true,
                content: contents.intern(fragment),
            });
            alive_entries += 1;
        }
    }

    let mut unmatched_gt = Vec::new();
    let mut unmatched_gt_units = 0;
    for (i, live) in gt_live.iter().enumerate() {
        if *live {
            unmatched_gt.push(i);
            unmatched_gt_units += gt_lines[i].len();
        }
    }
    let leftover_ocr_units: usize =
        pool.iter().filter(|e| e.alive).map(PoolEntry::len).sum();
    let pair_errors: usize = pairs.iter().map(|p| p.errors).sum();
    let total_errors = pair_errors + unmatched_gt_units + leftover_ocr_units;

    let empty_gt_lines = gt_lines.iter().filter(|l| l.is_empty()).count();
    assert_eq!(pairs.len() + unmatched_gt.len() + empty_gt_lines, gt_lines.len());

    FlexMatchTrace {
        pairs,
        unmatched_gt,
        unmatched_gt_units,
        leftover_ocr_units,
        total_errors,
        gt_units,
    }
}

#[allow(clippy::too_many_arguments)]
fn select_candidate<E: Ord + Clone>(
    gt_lines: &[Vec<E>],
    gt_content: &[u32],
    gt_order: &[usize],
    ocr_lines: &[Vec<E>],
    gt_live: &[bool],
    pool: &[PoolEntry],
    contents: &ContentTable<'_, E>,
    cost_cache: &mut CostCache,
) -> Option<Candidate> {
    let mut best: Option<Candidate> = None;
    let consider = |cand: Candidate, best: &mut Option<Candidate>| {
        let better = match best {
            None => true,
            Some(b) => candidate_better(&cand, b, gt_lines, ocr_lines, pool),
        };
        if better {
            *best = Some(cand);
        }
    };

    // Lines with identical content are interchangeable this round: the
    // later duplicate loses every tie-break to the earlier one, so only
    // the first of each content participates. Class-filtered receipts
    // are full of repeated lines; this keeps them near-linear.
    let mut seen = vec![false; contents.len()];
    let gt_reps: Vec<usize> = gt_order
        .iter()
        .copied()
        .filter(|&gi| {
            let content = gt_content[gi] as usize;
            gt_live[gi] && !std::mem::replace(&mut seen[content], true)
        })
        .collect();
    let mut seen = vec![false; contents.len()];
    let pool_reps: Vec<usize> = pool
        .iter()
        .enumerate()
        .filter(|(_, e)| e.alive && !std::mem::replace(&mut seen[e.content as usize], true))
        .map(|(hi, _)| hi)
        .collect();

    // Bounding pass, row by row in preference order. A zero-cost pairing
    // exists iff the line occurs verbatim, and zero beats everything
    // else, so the first row with a hit settles the round and the
    // dynamic program is never needed. Misses are cached with a lower
    // bound (length gap, multiset gap, and 1 for the failed containment)
    // that drives the pruning below.
    for &gi in &gt_reps {
        let g = &gt_lines[gi];
        for &hi in &pool_reps {
            let entry = &pool[hi];
            let slot = cost_cache.get(gt_content[gi], entry.content);
            let found = match *slot {
                Some(CostEntry::Exact(m)) => Some(m),
                Some(CostEntry::Bounded { .. }) | Some(CostEntry::Computed(_)) => None,
                None => {
                    let g_sorted = &contents.sorted[gt_content[gi] as usize];
                    let o_sorted = &contents.sorted[entry.content as usize];
                    let shared = multiset_overlap(g_sorted, o_sorted);
                    let fragment = &ocr_lines[entry.origin][entry.start..entry.end];
                    let contained = shared == g.len()
                        && g.len() <= entry.len()
                        && find_subslice(fragment, g).is_some();
                    if contained {
                        let pos = find_subslice(fragment, g).unwrap();
                        let m = SubstringMatch { error_count: 0, span: (pos, pos + g.len()) };
                        *slot = Some(CostEntry::Exact(m));
                        Some(m)
                    } else {
                        let lb = (g.len() - shared)
                            .max(g.len().saturating_sub(entry.len()))
                            .max(1);
                        *slot = Some(CostEntry::Bounded { lb });
                        None
                    }
                }
            };
            if let Some(matched) = found {
                consider(Candidate { gt: gi, handle: hi, matched, gt_len: g.len() }, &mut best);
            }
        }
        // Rows come in tie-break order, so any hit here beats every
        // exact candidate a later row could offer.
        if best.is_some() {
            return best;
        }
    }

    // Distance pass. Seed with the pair of smallest normalized bound;
    // with a tight bound its true cost lands near the optimum and the
    // scan prunes almost everything else. The running best only
    // improves, so a pair pruned against an earlier best would also be
    // pruned against the final one.
    let cached_lb = |cache: &mut CostCache, gi: usize, hi: usize| {
        match cache.get(gt_content[gi], pool[hi].content) {
            Some(CostEntry::Bounded { lb }) => Some(*lb),
            _ => None,
        }
    };
    let mut seed: Option<(usize, usize)> = None;
    let mut seed_key: Option<(usize, usize)> = None; // (lb, glen) as fraction
    for &gi in &gt_reps {
        for &hi in &pool_reps {
            let lb = cached_lb(cost_cache, gi, hi).unwrap_or(0);
            let glen = gt_lines[gi].len();
            let better = match seed_key {
                None => true,
                Some((best_lb, best_glen)) => lb * best_glen < best_lb * glen,
            };
            if better {
                seed = Some((gi, hi));
                seed_key = Some((lb, glen));
            }
        }
    }

    fn evaluate<E: Ord + Clone>(
        gi: usize,
        hi: usize,
        gt_lines: &[Vec<E>],
        gt_content: &[u32],
        ocr_lines: &[Vec<E>],
        pool: &[PoolEntry],
        cost_cache: &mut CostCache,
    ) -> Candidate {
        let slot = cost_cache.get(gt_content[gi], pool[hi].content);
        let matched = match *slot {
            Some(CostEntry::Computed(m)) | Some(CostEntry::Exact(m)) => m,
            _ => {
                let entry = &pool[hi];
                let fragment = &ocr_lines[entry.origin][entry.start..entry.end];
                let m =
                    substring_distance_pref(&gt_lines[gi], fragment, SpanPreference::Longest);
                *slot = Some(CostEntry::Computed(m));
                m
            }
        };
        Candidate { gt: gi, handle: hi, matched, gt_len: gt_lines[gi].len() }
    }

    if let Some((gi, hi)) = seed {
        let cand = evaluate(gi, hi, gt_lines, gt_content, ocr_lines, pool, cost_cache);
        consider(cand, &mut best);
    }
    for &gi in &gt_reps {
        for &hi in &pool_reps {
            if let (Some(lb), Some(b)) = (cached_lb(cost_cache, gi, hi), &best) {
                if lb * b.gt_len > b.matched.error_count * gt_lines[gi].len() {
                    continue;
                }
            }
            let cand = evaluate(gi, hi, gt_lines, gt_content, ocr_lines, pool, cost_cache);
            consider(cand, &mut best);
        }
    }
    best
}

fn score_from_errors<S: Scalar>(n: usize, errors: usize) -> S {
    (S::from_count(n) - S::from_count(errors)) / S::from_count(n)
}

fn char_lines(text: &NormalizedText) -> Vec<Vec<char>> {
    text.lines.iter().map(|l| l.text.chars().collect()).collect()
}

/// Flexible character accuracy: order-independent line matching over
/// characters, scored against the ground-truth character count.
pub fn fca<S: Scalar>(
    gt: &NormalizedText,
    ocr: &NormalizedText,
    config: &MetricConfig<S>,
) -> Result<(S, FlexMatchTrace)> {
    let n = gt.char_count;
    if n == 0 {
        return Err(Error::UndefinedScore(
            "flexible character accuracy over empty ground truth".into(),
        ));
    }
    let trace = flex_match(&char_lines(gt), &char_lines(ocr));
    debug_assert_eq!(trace.gt_units, n);
    Ok((config.finish(score_from_errors(n, trace.total_errors)), trace))
}

/// String segment accuracy: flexible matching over per-line segment
/// symbols, scored against the ground-truth segment count.
pub fn ssa<S: Scalar>(
    gt: &NormalizedText,
    ocr: &NormalizedText,
    config: &MetricConfig<S>,
) -> Result<(S, FlexMatchTrace)> {
    let (gt_syms, ocr_syms, table) = build_symbols(gt, ocr);
    let n = gt_syms.symbol_count();
    if n == 0 {
        return Err(Error::UndefinedScore(
            "segment accuracy over ground truth with no segments".into(),
        ));
    }
    // Symbol ids are equal exactly when segment texts are, so matching
    // over the texts is the same matching with content-based ordering.
    let as_texts = |seq: &crate::textmodel::SymbolSequence| -> Vec<Vec<&str>> {
        seq.lines
            .iter()
            .map(|line| line.iter().map(|&id| table.text(id)).collect())
            .collect()
    };
    let trace = flex_match(&as_texts(&gt_syms), &as_texts(&ocr_syms));
    Ok((config.finish(score_from_errors(n, trace.total_errors)), trace))
}

/// Ordered string segment accuracy: plain character accuracy over the
/// left-to-right, top-to-bottom segment-symbol serialization.
pub fn ossa<S: Scalar>(
    gt: &NormalizedText,
    ocr: &NormalizedText,
    config: &MetricConfig<S>,
) -> Result<S> {
    Ok(config.finish(ossa_raw(gt, ocr)?))
}

fn ossa_raw<S: Scalar>(gt: &NormalizedText, ocr: &NormalizedText) -> Result<S> {
    let (gt_syms, ocr_syms, _) = build_symbols(gt, ocr);
    let g = gt_syms.flatten();
    if g.is_empty() {
        return Err(Error::UndefinedScore(
            "ordered segment accuracy over ground truth with no segments".into(),
        ));
    }
    character_accuracy(&g, &ocr_syms.flatten())
}

/// Text-line accuracy `r/t`: the fraction of ground-truth lines
/// reproduced exactly, matched one-to-one against recognized lines.
pub fn tla<S: Scalar>(
    gt: &NormalizedText,
    ocr: &NormalizedText,
    config: &MetricConfig<S>,
) -> Result<S> {
    let TlaMatch::ExactAfterNormalization = config.tla_match;
    let t = gt.lines.len();
    if t == 0 {
        return Err(Error::UndefinedScore("text line accuracy over empty ground truth".into()));
    }
    let mut available: BTreeMap<&str, usize> = BTreeMap::new();
    for line in &ocr.lines {
        *available.entry(line.text.as_str()).or_insert(0) += 1;
    }
    let mut r = 0usize;
    for line in &gt.lines {
        if let Some(count) = available.get_mut(line.text.as_str()) {
            if *count > 0 {
                *count -= 1;
                r += 1;
            }
        }
    }
    Ok(S::from_count(r) / S::from_count(t))
}

/// Accuracy restricted to one character class, or `None` when the class
/// does not occur in the ground truth. Undefined is a value here, not an
/// error: absent classes must stay out of aggregates instead of skewing
/// them as zeros.
pub fn class_accuracy<S: Scalar>(
    gt: &NormalizedText,
    ocr: &NormalizedText,
    class: CharClass,
    config: &MetricConfig<S>,
) -> Option<S> {
    let filtered_gt = filter_by_class(gt, class);
    if filtered_gt.is_empty() {
        return None;
    }
    let filtered_ocr = filter_by_class(ocr, class);
    let (score, _) = fca(&filtered_gt, &filtered_ocr, config)
        .expect("filtered ground truth is non-empty");
    Some(score)
}

/// The four scores side by side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreSet<S> {
    pub fca: S,
    pub ssa: S,
    pub ossa: S,
    pub tla: S,
}

impl<S: Clone> ScoreSet<S> {
    pub fn get(&self, kind: MetricKind) -> S {
        match kind {
            MetricKind::Fca => self.fca.clone(),
            MetricKind::Ssa => self.ssa.clone(),
            MetricKind::Ossa => self.ossa.clone(),
            MetricKind::Tla => self.tla.clone(),
        }
    }
}

/// Scores every section body against the full recognized text; the
/// order-independent matching localizes the section inside it. Sections
/// without content are `None`.
///
/// Unlike whole-document scores, recognized text left unconsumed is not
/// charged here: when one section is scored against a full document,
/// everything belonging to the other sections would otherwise swamp the
/// score to zero. Section OSSA likewise aligns the section's ordered
/// symbols against the best-matching stretch of the full stream.
pub fn section_metrics<S: Scalar>(
    doc: &GroundTruthDoc,
    ocr: &NormalizedText,
    config: &MetricConfig<S>,
) -> BTreeMap<SectionKind, Option<ScoreSet<S>>> {
    let mut out = BTreeMap::new();
    for kind in doc.kinds_present() {
        let scores = doc.body_of(kind).map(|body| {
            let (_, char_trace) = fca(&body, ocr, config).expect("section body is non-empty");
            let (_, seg_trace) = ssa(&body, ocr, config).expect("section body is non-empty");
            let localized = |trace: &FlexMatchTrace| {
                let errors = trace.total_errors - trace.leftover_ocr_units;
                config.finish(score_from_errors(trace.gt_units, errors))
            };
            let (gt_syms, ocr_syms, _) = build_symbols(&body, ocr);
            let ordered = crate::alignment::substring_distance(
                &gt_syms.flatten(),
                &ocr_syms.flatten(),
            );
            ScoreSet {
                fca: localized(&char_trace),
                ssa: localized(&seg_trace),
                ossa: config
                    .finish(score_from_errors(gt_syms.symbol_count(), ordered.error_count)),
                tla: tla(&body, ocr, config).expect("section body is non-empty"),
            }
        });
        out.insert(kind, scores);
    }
    out
}

/// Full evaluation traces kept for diagnostics, including the unclamped
/// scores.
#[derive(Debug, Clone)]
pub struct Traces<S> {
    pub fca: FlexMatchTrace,
    pub ssa: FlexMatchTrace,
    pub raw: ScoreSet<S>,
}

/// Everything one ground-truth/recognized-text comparison produces.
#[derive(Debug, Clone)]
pub struct MetricReport<S> {
    pub scores: ScoreSet<S>,
    pub per_class: BTreeMap<CharClass, Option<S>>,
    pub per_section: BTreeMap<SectionKind, Option<ScoreSet<S>>>,
    pub output_class: Outcome,
    pub traces: Traces<S>,
}

/// Pass/fail against the configured threshold (inclusive).
pub fn classify_output<S: Scalar>(scores: &ScoreSet<S>, config: &MetricConfig<S>) -> Outcome {
    if scores.get(config.threshold_metric) >= config.pass_threshold {
        Outcome::Pass
    } else {
        Outcome::Fail
    }
}

/// Computes all metrics, per-class and per-section views, and the
/// pass/fail classification for one document pair.
pub fn evaluate<S: Scalar>(
    doc: &GroundTruthDoc,
    ocr: &NormalizedText,
    config: &MetricConfig<S>,
) -> Result<MetricReport<S>> {
    let gt = doc.full_text();
    if gt.char_count == 0 {
        return Err(Error::UndefinedScore("empty ground truth".into()));
    }
    let (fca_score, fca_trace) = fca(&gt, ocr, config)?;
    let (ssa_score, ssa_trace) = ssa(&gt, ocr, config)?;
    let ossa_unclamped: S = ossa_raw(&gt, ocr)?;
    let ossa_score = config.finish(ossa_unclamped.clone());
    let tla_score = tla(&gt, ocr, config)?;

    let raw = ScoreSet {
        fca: score_from_errors(fca_trace.gt_units, fca_trace.total_errors),
        ssa: score_from_errors(ssa_trace.gt_units, ssa_trace.total_errors),
        ossa: ossa_unclamped,
        tla: tla_score.clone(),
    };
    let scores = ScoreSet { fca: fca_score, ssa: ssa_score, ossa: ossa_score, tla: tla_score };
    let per_class = CharClass::ALL
        .into_iter()
        .map(|class| (class, class_accuracy(&gt, ocr, class, config)))
        .collect();
    let per_section = section_metrics(doc, ocr, config);
    let output_class = classify_output(&scores, config);

    Ok(MetricReport { scores, per_class, per_section, output_class, traces: Traces { fca: fca_trace, ssa: ssa_trace, raw } })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textmodel::{normalize, parse_ground_truth};
    use num_rational::Rational64;

    type R = Rational64;

    fn cfg() -> MetricConfig<R> {
        MetricConfig::default()
    }

    fn r(n: i64, d: i64) -> R {
        R::new(n, d)
    }

    #[test]
    fn fca_ignores_reading_order() {
        let gt = normalize("hello\nworld");
        let ocr = normalize("world\nhello");
        let (score, trace) = fca(&gt, &ocr, &cfg()).unwrap();
        assert_eq!(score, r(1, 1));
        assert_eq!(trace.total_errors, 0);
        assert_eq!(trace.pairs.len(), 2);
    }

    #[test]
    fn fca_identity() {
        let t = normalize("a b c\nd e f\ng");
        let (score, _) = fca(&t, &t, &cfg()).unwrap();
        assert_eq!(score, r(1, 1));
    }

    #[test]
    fn fca_unmatched_lines_cost_their_length() {
        let gt = normalize("ab\ncd");
        let ocr = normalize("ab");
        let (score, trace) = fca(&gt, &ocr, &cfg()).unwrap();
        assert_eq!(trace.total_errors, 2);
        assert_eq!(trace.unmatched_gt, vec![1]);
        assert_eq!(score, r(1, 2));
    }

    #[test]
    fn fca_leftover_ocr_counts_as_insertions() {
        let gt = normalize("ab");
        let ocr = normalize("ab\nxyz");
        let (score, trace) = fca(&gt, &ocr, &cfg()).unwrap();
        assert_eq!(trace.leftover_ocr_units, 3);
        assert_eq!(trace.total_errors, 3);
        // raw (2-3)/2 clamps to zero
        assert_eq!(score, r(0, 1));
    }

    #[test]
    fn fca_merged_segment_line() {
        let gt = normalize("San Jose, CA");
        let ocr = normalize("San Jose,CA");
        let (score, trace) = fca(&gt, &ocr, &cfg()).unwrap();
        assert_eq!(trace.total_errors, 1);
        assert_eq!(score, r(11, 12));
    }

    #[test]
    fn fca_undefined_on_empty_gt() {
        let err = fca::<R>(&normalize(""), &normalize("x"), &cfg()).unwrap_err();
        assert!(matches!(err, Error::UndefinedScore(_)));
    }

    #[test]
    fn fca_empty_ocr_scores_zero() {
        let gt = normalize("abc\nde");
        let (score, trace) = fca(&gt, &normalize(""), &cfg()).unwrap();
        assert_eq!(trace.total_errors, 5);
        assert_eq!(score, r(0, 1));
    }

    #[test]
    fn ssa_exact_lines_any_order() {
        let gt = normalize("A B\nC D");
        let ocr = normalize("C D\nA B");
        let (score, _) = ssa(&gt, &ocr, &cfg()).unwrap();
        assert_eq!(score, r(1, 1));
    }

    #[test]
    fn ssa_merged_segments() {
        let gt = normalize("San Jose, CA");
        let ocr = normalize("San Jose,CA");
        let (score, trace) = ssa(&gt, &ocr, &cfg()).unwrap();
        assert_eq!(trace.gt_units, 3);
        assert_eq!(trace.total_errors, 2);
        assert_eq!(score, r(1, 3));
    }

    #[test]
    fn ossa_detects_reordering_ssa_does_not() {
        let gt = normalize("A B\nC D");
        let ocr = normalize("C D\nA B");
        let ossa_score: R = ossa(&gt, &ocr, &cfg()).unwrap();
        assert_eq!(ossa_score, r(0, 1));
        let (ssa_score, _) = ssa(&gt, &ocr, &cfg()).unwrap();
        assert_eq!(ssa_score, r(1, 1));
        let identity: R = ossa(&gt, &gt, &cfg()).unwrap();
        assert_eq!(identity, r(1, 1));
    }

    #[test]
    fn tla_counts_exact_lines_one_to_one() {
        let gt = normalize("a\nb\nc\nd");
        assert_eq!(tla::<R>(&gt, &gt, &cfg()).unwrap(), r(1, 1));
        let ocr = normalize("a\nX\nY\nZ");
        assert_eq!(tla::<R>(&gt, &ocr, &cfg()).unwrap(), r(1, 4));
        let gt = normalize("x\nx");
        let ocr = normalize("x");
        assert_eq!(tla::<R>(&gt, &ocr, &cfg()).unwrap(), r(1, 2));
    }

    #[test]
    fn class_accuracy_examples() {
        let gt = normalize("Total: $29.94");
        let same = class_accuracy::<R>(&gt, &gt, CharClass::Digit, &cfg());
        assert_eq!(same, Some(r(1, 1)));

        let dots_dropped = class_accuracy::<R>(
            &normalize("29.94"),
            &normalize("2994"),
            CharClass::Digit,
            &cfg(),
        );
        assert_eq!(dots_dropped, Some(r(1, 1)));

        let no_digits =
            class_accuracy::<R>(&normalize("abc"), &normalize("123"), CharClass::Digit, &cfg());
        assert_eq!(no_digits, None);
    }

    #[test]
    fn section_metrics_score_against_full_ocr() {
        let doc = parse_ground_truth(b"#section: store\naaa bbb").unwrap();
        let ocr = normalize("aaa bbb");
        let sections = section_metrics::<R>(&doc, &ocr, &cfg());
        let store = sections[&SectionKind::Store].as_ref().unwrap();
        assert_eq!(store.fca, r(1, 1));
        assert_eq!(store.tla, r(1, 1));
    }

    #[test]
    fn section_metrics_empty_section_is_undefined() {
        let doc = parse_ground_truth(b"#section: store\nx\n#section: items\n").unwrap();
        let sections = section_metrics::<R>(&doc, &normalize("x"), &cfg());
        assert!(sections[&SectionKind::Items].is_none());
        assert!(sections[&SectionKind::Store].is_some());
    }

    #[test]
    fn section_scores_localize_inside_full_output() {
        // Both sections recovered verbatim: each must score 1.0 even
        // though the other section's text is present in the output.
        let doc = parse_ground_truth(
            b"#section: store\naaaa bbbb\n#section: items\ncccc dddd\neeee",
        )
        .unwrap();
        let ocr = normalize("aaaa bbbb\ncccc dddd\neeee");
        let sections = section_metrics::<R>(&doc, &ocr, &cfg());
        for kind in [SectionKind::Store, SectionKind::Items] {
            let scores = sections[&kind].as_ref().unwrap();
            assert_eq!(scores.fca, r(1, 1), "{kind}");
            assert_eq!(scores.ssa, r(1, 1), "{kind}");
            assert_eq!(scores.ossa, r(1, 1), "{kind}");
            assert_eq!(scores.tla, r(1, 1), "{kind}");
        }
    }

    #[test]
    fn missing_section_scores_zero() {
        // Recognized output carries only section 1; section 2 bottoms out.
        let doc =
            parse_ground_truth(b"#section: store\naaaa\n#section: items\nzzzz").unwrap();
        let ocr = normalize("aaaa");
        let sections = section_metrics::<R>(&doc, &ocr, &cfg());
        assert_eq!(sections[&SectionKind::Store].as_ref().unwrap().fca, r(1, 1));
        assert_eq!(sections[&SectionKind::Items].as_ref().unwrap().fca, r(0, 1));
    }

    #[test]
    fn section_ossa_is_order_sensitive_within_the_stream() {
        let doc = parse_ground_truth(b"#section: items\nw x\ny z").unwrap();
        let ocr = normalize("pad pad\ny z\nw x");
        let sections = section_metrics::<R>(&doc, &ocr, &cfg());
        let items = sections[&SectionKind::Items].as_ref().unwrap();
        // Every line recovered verbatim, just out of order.
        assert_eq!(items.ssa, r(1, 1));
        assert_eq!(items.tla, r(1, 1));
        // The ordered stream w x y z never appears; the best contiguous
        // stretch covers only half the symbols.
        assert_eq!(items.ossa, r(1, 2));
    }

    #[test]
    fn classify_against_threshold() {
        let scores =
            |x: R| ScoreSet { fca: x, ssa: r(1, 1), ossa: r(1, 1), tla: r(1, 1) };
        assert_eq!(classify_output(&scores(r(95, 100)), &cfg()), Outcome::Pass);
        assert_eq!(classify_output(&scores(r(9499, 10000)), &cfg()), Outcome::Fail);
        assert_eq!(classify_output(&scores(r(1, 1)), &cfg()), Outcome::Pass);
    }

    #[test]
    fn evaluate_full_report_on_identity() {
        let doc = parse_ground_truth(b"#section: store\nShop 12\n#section: items\nTea $4.50")
            .unwrap();
        let ocr = normalize("Shop 12\nTea $4.50");
        let report = evaluate::<R>(&doc, &ocr, &cfg()).unwrap();
        assert_eq!(report.scores.fca, r(1, 1));
        assert_eq!(report.scores.ssa, r(1, 1));
        assert_eq!(report.scores.ossa, r(1, 1));
        assert_eq!(report.scores.tla, r(1, 1));
        assert_eq!(report.output_class, Outcome::Pass);
        assert_eq!(report.per_class[&CharClass::Digit], Some(r(1, 1)));
        assert_eq!(report.per_section.len(), 2);
    }

    #[test]
    fn raw_scores_keep_negative_values() {
        let doc = parse_ground_truth(b"ab").unwrap();
        let ocr = normalize("ab\nxyzw");
        let report = evaluate::<R>(&doc, &ocr, &cfg()).unwrap();
        assert_eq!(report.scores.fca, r(0, 1));
        assert_eq!(report.traces.raw.fca, r(-1, 1));
    }

    #[test]
    fn flex_trace_accounting_holds() {
        let gt = normalize("one two\nthree\nfour five six");
        let ocr = normalize("three\nsix one two");
        let (_, trace) = fca::<R>(&gt, &ocr, &cfg()).unwrap();
        let pair_errors: usize = trace.pairs.iter().map(|p| p.errors).sum();
        assert_eq!(
            trace.total_errors,
            pair_errors + trace.unmatched_gt_units + trace.leftover_ocr_units
        );
        assert_eq!(trace.pairs.len() + trace.unmatched_gt.len(), gt.lines.len());
    }
}
