//! Edit-distance computations with full operation traces.
//!
//! Two distances are provided: classic Levenshtein over whole sequences,
//! and an approximate-substring distance (free start/end gaps on the
//! haystack side) that lets a ground-truth line be located inside a
//! longer recognized line. Both work on any `Eq` element so the same
//! code serves character sequences and segment-symbol sequences.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One step of an edit script.
///
/// Positions index the ground-truth (`gt`) and recognized (`ocr`)
/// sequences. A `Delete` is a ground-truth element the recognizer
/// dropped; an `Insert` is a spurious recognized element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EditOp {
    Match { gt: usize, ocr: usize },
    Substitute { gt: usize, ocr: usize },
    Delete { gt: usize },
    Insert { ocr: usize },
}

impl EditOp {
    pub fn is_error(self) -> bool {
        !matches!(self, EditOp::Match { .. })
    }
}

/// A minimum-cost alignment between a ground-truth sequence and a
/// recognized sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EditScript {
    pub ops: Vec<EditOp>,
    /// Number of non-`Match` operations.
    pub error_count: usize,
}

impl EditScript {
    /// Applies the script to the recognized sequence, producing the
    /// ground-truth sequence: matches copy the recognized element,
    /// substitutions and deletions restore the ground-truth element,
    /// insertions drop the spurious one.
    pub fn replay<T: Clone>(&self, gt: &[T], ocr: &[T]) -> Vec<T> {
        let mut out = Vec::with_capacity(gt.len());
        for op in &self.ops {
            match *op {
                EditOp::Match { ocr: j, .. } => out.push(ocr[j].clone()),
                EditOp::Substitute { gt: i, .. } | EditOp::Delete { gt: i } => {
                    out.push(gt[i].clone())
                }
                EditOp::Insert { .. } => {}
            }
        }
        out
    }
}

const SUB: u8 = 0;
const DEL: u8 = 1;
const INS: u8 = 2;
const MATCH: u8 = 3;

/// Levenshtein distance with a deterministic backtrace.
///
/// Unit costs, no transposition. When several minimal alignments exist
/// the trace prefers `Match` over `Substitute` over `Delete` over
/// `Insert`; the error count is unaffected by the preference.
pub fn levenshtein<T: Eq>(gt: &[T], ocr: &[T]) -> EditScript {
    let n = gt.len();
    let m = ocr.len();
    let mut dist = vec![0u32; (n + 1) * (m + 1)];
    let mut step = vec![INS; (n + 1) * (m + 1)];
    let idx = |i: usize, j: usize| i * (m + 1) + j;

    for i in 1..=n {
        dist[idx(i, 0)] = i as u32;
        step[idx(i, 0)] = DEL;
    }
    for j in 1..=m {
        dist[idx(0, j)] = j as u32;
        step[idx(0, j)] = INS;
    }
    for i in 1..=n {
        for j in 1..=m {
            let (diag_step, diag_cost) = if gt[i - 1] == ocr[j - 1] {
                (MATCH, dist[idx(i - 1, j - 1)])
            } else {
                (SUB, dist[idx(i - 1, j - 1)] + 1)
            };
            let del_cost = dist[idx(i - 1, j)] + 1;
            let ins_cost = dist[idx(i, j - 1)] + 1;
            // Tie preference: match, substitute, delete, insert.
            let (mut best_cost, mut best_step) = (diag_cost, diag_step);
            if del_cost < best_cost {
                best_cost = del_cost;
                best_step = DEL;
            }
            if ins_cost < best_cost {
                best_cost = ins_cost;
                best_step = INS;
            }
            dist[idx(i, j)] = best_cost;
            step[idx(i, j)] = best_step;
        }
    }

    let mut ops = Vec::with_capacity(n.max(m));
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        match step[idx(i, j)] {
            MATCH => {
                i -= 1;
                j -= 1;
                ops.push(EditOp::Match { gt: i, ocr: j });
            }
            SUB => {
                i -= 1;
                j -= 1;
                ops.push(EditOp::Substitute { gt: i, ocr: j });
            }
            DEL => {
                i -= 1;
                ops.push(EditOp::Delete { gt: i });
            }
            _ => {
                j -= 1;
                ops.push(EditOp::Insert { ocr: j });
            }
        }
    }
    ops.reverse();
    let error_count = ops.iter().filter(|op| op.is_error()).count();
    debug_assert_eq!(error_count as u32, dist[idx(n, m)]);
    EditScript { ops, error_count }
}

/// Levenshtein error count only.
///
/// Runs a banded search with a doubling threshold, so near-identical
/// sequences cost O(E·n) instead of O(n·m); the exhaustive-oracle suite
/// pins the result to the full recurrence.
pub fn levenshtein_cost<T: Eq>(a: &[T], b: &[T]) -> usize {
    let max_len = a.len().max(b.len());
    if max_len == 0 {
        return 0;
    }
    let mut limit = a.len().abs_diff(b.len()).max(1);
    loop {
        if limit * 2 >= max_len {
            return levenshtein_cost_full(a, b);
        }
        if let Some(e) = levenshtein_cost_bounded(a, b, limit) {
            return e;
        }
        limit *= 2;
    }
}

fn levenshtein_cost_full<T: Eq>(a: &[T], b: &[T]) -> usize {
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut row: Vec<u32> = (0..=short.len() as u32).collect();
    for (j, lc) in long.iter().enumerate() {
        let mut prev_diag = row[0];
        row[0] = j as u32 + 1;
        for (i, sc) in short.iter().enumerate() {
            let cost = if sc == lc { prev_diag } else { prev_diag + 1 };
            let cost = cost.min(row[i] + 1).min(row[i + 1] + 1);
            prev_diag = row[i + 1];
            row[i + 1] = cost;
        }
    }
    *row.last().unwrap() as usize
}

const BAND_INF: u32 = u32::MAX / 2;

/// Band-limited distance: any alignment of cost <= `limit` stays within
/// `|i - j| <= limit` of the diagonal, so cells outside the band read as
/// infinity. Returns `None` when the true distance exceeds `limit`.
fn levenshtein_cost_bounded<T: Eq>(a: &[T], b: &[T], limit: usize) -> Option<usize> {
    let (n, m) = (a.len(), b.len());
    if n.abs_diff(m) > limit {
        return None;
    }
    let mut prev = vec![BAND_INF; m + 1];
    let mut cur = vec![BAND_INF; m + 1];
    for (j, cell) in prev.iter_mut().enumerate().take(limit.min(m) + 1) {
        *cell = j as u32;
    }
    for i in 1..=n {
        let lo = i.saturating_sub(limit);
        let hi = (i + limit).min(m);
        // The rolling arrays keep stale cells from two rows back; the
        // band only grows rightward, so only the left fringe needs an
        // explicit reset.
        if lo > 0 {
            cur[lo - 1] = BAND_INF;
        }
        if lo == 0 {
            cur[0] = i as u32;
        }
        for j in lo.max(1)..=hi {
            let sub = if a[i - 1] == b[j - 1] { prev[j - 1] } else { prev[j - 1] + 1 };
            cur[j] = sub.min(prev[j] + 1).min(cur[j - 1] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    let result = prev[m];
    (result as usize <= limit).then_some(result as usize)
}

/// Best approximate occurrence of a needle inside a haystack.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubstringMatch {
    /// Edit distance between the needle and the matched span.
    pub error_count: usize,
    /// Half-open span into the haystack.
    pub span: (usize, usize),
}

/// Which span to report when several achieve the minimal distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpanPreference {
    /// Smaller start, then smaller length.
    Shortest,
    /// Larger length, then smaller start. Flexible line matching uses
    /// this: consuming more recognized text on equal error terms avoids
    /// charging the same characters again as leftovers.
    Longest,
}

/// Minimum Levenshtein distance between `needle` and any contiguous
/// substring of `haystack`, with the matched span. Ties are broken by
/// smaller start, then smaller length.
pub fn substring_distance<T: Eq>(needle: &[T], haystack: &[T]) -> SubstringMatch {
    substring_distance_pref(needle, haystack, SpanPreference::Shortest)
}

/// [`substring_distance`] with an explicit span preference.
pub fn substring_distance_pref<T: Eq>(
    needle: &[T],
    haystack: &[T],
    pref: SpanPreference,
) -> SubstringMatch {
    let n = needle.len();
    let m = haystack.len();
    // Semi-global DP: row i holds, per haystack position j, the minimal
    // (cost, start) of aligning needle[..i] against a substring ending at
    // j. Starts are free (row 0 cost 0), ends are free (min over last
    // row). On cost ties the smaller start wins, which for a fixed end
    // is also the longer span.
    let mut prev: Vec<(u32, u32)> = (0..=m as u32).map(|j| (0, j)).collect();
    let mut cur = vec![(0u32, 0u32); m + 1];
    for i in 1..=n {
        cur[0] = (i as u32, 0);
        for j in 1..=m {
            let diag = prev[j - 1];
            let diag = if needle[i - 1] == haystack[j - 1] {
                diag
            } else {
                (diag.0 + 1, diag.1)
            };
            let up = (prev[j].0 + 1, prev[j].1);
            let left = (cur[j - 1].0 + 1, cur[j - 1].1);
            cur[j] = min_pair(min_pair(diag, up), left);
        }
        std::mem::swap(&mut prev, &mut cur);
    }

    let mut best: Option<(usize, usize, usize)> = None; // (cost, start, end)
    for (end, &(cost, start)) in prev.iter().enumerate() {
        let cand = (cost as usize, start as usize, end);
        let better = match best {
            None => true,
            Some(cur_best) => match pref {
                SpanPreference::Shortest => {
                    key_shortest(cand) < key_shortest(cur_best)
                }
                SpanPreference::Longest => key_longest(cand) < key_longest(cur_best),
            },
        };
        if better {
            best = Some(cand);
        }
    }
    let (error_count, start, end) = best.expect("haystack row is never empty");
    SubstringMatch { error_count, span: (start, end) }
}

fn min_pair(a: (u32, u32), b: (u32, u32)) -> (u32, u32) {
    if (a.0, a.1) <= (b.0, b.1) {
        a
    } else {
        b
    }
}

fn key_shortest(c: (usize, usize, usize)) -> (usize, usize, usize) {
    (c.0, c.1, c.2 - c.1)
}

fn key_longest(c: (usize, usize, usize)) -> (usize, std::cmp::Reverse<usize>, usize) {
    (c.0, std::cmp::Reverse(c.2 - c.1), c.1)
}

/// Character accuracy `(n - E) / n` against an `n`-element ground truth.
///
/// Not clamped; heavy over-recognition drives it negative. Clamping for
/// presentation is a reporting concern.
pub fn character_accuracy<S: Scalar, T: Eq>(gt: &[T], ocr: &[T]) -> Result<S> {
    let n = gt.len();
    if n == 0 {
        return Err(Error::UndefinedScore(
            "character accuracy over empty ground truth".into(),
        ));
    }
    let e = levenshtein_cost(gt, ocr);
    Ok((S::from_count(n) - S::from_count(e)) / S::from_count(n))
}

/// Convenience: [`levenshtein`] over the chars of two strings.
pub fn levenshtein_str(gt: &str, ocr: &str) -> EditScript {
    let g: Vec<char> = gt.chars().collect();
    let o: Vec<char> = ocr.chars().collect();
    levenshtein(&g, &o)
}
