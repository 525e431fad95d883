//! Reference implementations the test suites score the main crate
//! against.
//!
//! Everything here favors directness over speed: recursive edit
//! distance, explicit enumeration of substrings, a single unoptimized
//! matching loop. None of it shares code with `ocrqa-core`; that
//! independence is the point.

/// Edit distance by the textbook recurrence, memoized top-down.
pub fn lev<E: Eq>(a: &[E], b: &[E]) -> usize {
    fn rec<E: Eq>(a: &[E], b: &[E], i: usize, j: usize, memo: &mut [Option<usize>]) -> usize {
        let width = b.len() + 1;
        if let Some(v) = memo[i * width + j] {
            return v;
        }
        let v = if i == a.len() {
            b.len() - j
        } else if j == b.len() {
            a.len() - i
        } else {
            let keep = rec(a, b, i + 1, j + 1, memo) + usize::from(a[i] != b[j]);
            let drop_a = rec(a, b, i + 1, j, memo) + 1;
            let drop_b = rec(a, b, i, j + 1, memo) + 1;
            keep.min(drop_a).min(drop_b)
        };
        memo[i * width + j] = Some(v);
        v
    }
    let mut memo = vec![None; (a.len() + 1) * (b.len() + 1)];
    rec(a, b, 0, 0, &mut memo)
}

/// Distances from `needle` to every prefix of `haystack`, i.e. the last
/// DP row. Used to enumerate all substrings start by start.
fn prefix_distances<E: Eq>(needle: &[E], haystack: &[E]) -> Vec<usize> {
    let n = needle.len();
    let mut col: Vec<usize> = (0..=n).collect();
    let mut out = Vec::with_capacity(haystack.len() + 1);
    out.push(n);
    for h in haystack {
        let mut prev_diag = col[0];
        col[0] += 1;
        for (i, nc) in needle.iter().enumerate() {
            let cost = (prev_diag + usize::from(nc != h)).min(col[i] + 1).min(col[i + 1] + 1);
            prev_diag = col[i + 1];
            col[i + 1] = cost;
        }
        out.push(col[n]);
    }
    out
}

/// Minimum edit distance over every contiguous substring of `haystack`,
/// enumerated explicitly. `longest` picks the larger span on cost ties
/// (then smaller start); otherwise smaller start, then smaller length.
pub fn substring<E: Eq>(
    needle: &[E],
    haystack: &[E],
    longest: bool,
) -> (usize, (usize, usize)) {
    let mut best: Option<(usize, usize, usize)> = None; // (cost, start, end)
    for start in 0..=haystack.len() {
        for (len, cost) in prefix_distances(needle, &haystack[start..]).into_iter().enumerate() {
            let cand = (cost, start, start + len);
            let better = match best {
                None => true,
                Some(b) => {
                    if longest {
                        (cand.0, b.2 - b.1, cand.1) < (b.0, cand.2 - cand.1, b.1)
                    } else {
                        (cand.0, cand.1, cand.2 - cand.1) < (b.0, b.1, b.2 - b.1)
                    }
                }
            };
            if better {
                best = Some(cand);
            }
        }
    }
    let (cost, start, end) = best.expect("at least the empty substring exists");
    (cost, (start, end))
}

/// Total error count of the flexible line matching: repeatedly take the
/// globally cheapest (ground-truth line, pool fragment) pair by
/// normalized cost with content tie-breaks, consume the matched span,
/// return the fragment's ends to the pool, then charge unmatched lines
/// and leftover units.
pub fn flex_total<E: Ord + Clone>(gt_lines: &[Vec<E>], ocr_lines: &[Vec<E>]) -> usize {
    let mut gt: Vec<Vec<E>> = gt_lines.iter().filter(|l| !l.is_empty()).cloned().collect();
    let mut pool: Vec<Vec<E>> = ocr_lines.iter().filter(|l| !l.is_empty()).cloned().collect();
    let mut total = 0usize;
    while !gt.is_empty() && !pool.is_empty() {
        let mut best: Option<(usize, usize, usize, (usize, usize))> = None; // (cost, gi, pi, span)
        for (gi, g) in gt.iter().enumerate() {
            for (pi, o) in pool.iter().enumerate() {
                let (cost, span) = substring(g, o, true);
                let better = match best {
                    None => true,
                    Some((bc, bgi, bpi, _)) => {
                        let (bg, bo) = (&gt[bgi], &pool[bpi]);
                        let key_new = (cost * bg.len(), std::cmp::Reverse(g.len()));
                        let key_old = (bc * g.len(), std::cmp::Reverse(bg.len()));
                        key_new < key_old
                            || (key_new == key_old && (g, o) < (bg, bo))
                    }
                };
                if better {
                    best = Some((cost, gi, pi, span));
                }
            }
        }
        let (cost, gi, pi, span) = best.expect("both sides non-empty");
        total += cost;
        gt.remove(gi);
        let fragment = pool.remove(pi);
        if span.0 > 0 {
            pool.push(fragment[..span.0].to_vec());
        }
        if span.1 < fragment.len() {
            pool.push(fragment[span.1..].to_vec());
        }
    }
    total += gt.iter().map(Vec::len).sum::<usize>();
    total += pool.iter().map(Vec::len).sum::<usize>();
    total
}

/// Lines of an already-clean text (no blank lines, single spaces), as
/// char sequences.
pub fn char_lines(text: &str) -> Vec<Vec<char>> {
    text.lines().filter(|l| !l.is_empty()).map(|l| l.chars().collect()).collect()
}

/// Lines as segment sequences; segment identity is the text itself.
pub fn segment_lines(text: &str) -> Vec<Vec<&str>> {
    text.lines()
        .filter(|l| !l.is_empty())
        .map(|l| l.split_whitespace().collect())
        .collect()
}

/// Reading-order serialization of all segments.
pub fn flat_segments(text: &str) -> Vec<&str> {
    text.lines().flat_map(str::split_whitespace).collect()
}

/// Number of ground-truth lines reproduced exactly, one-to-one.
pub fn tla_matches(gt: &str, ocr: &str) -> usize {
    let mut remaining: Vec<&str> = ocr.lines().filter(|l| !l.is_empty()).collect();
    let mut r = 0;
    for line in gt.lines().filter(|l| !l.is_empty()) {
        if let Some(pos) = remaining.iter().position(|o| *o == line) {
            remaining.swap_remove(pos);
            r += 1;
        }
    }
    r
}

/// (errors, ground-truth units) for character-level flexible matching.
pub fn fca_errors(gt: &str, ocr: &str) -> (usize, usize) {
    let g = char_lines(gt);
    let n = g.iter().map(Vec::len).sum();
    (flex_total(&g, &char_lines(ocr)), n)
}

/// (errors, ground-truth units) for segment-level flexible matching.
pub fn ssa_errors(gt: &str, ocr: &str) -> (usize, usize) {
    let g = segment_lines(gt);
    let n = g.iter().map(Vec::len).sum();
    (flex_total(&g, &segment_lines(ocr)), n)
}

/// (errors, ground-truth units) for the ordered segment serialization.
pub fn ossa_errors(gt: &str, ocr: &str) -> (usize, usize) {
    let g = flat_segments(gt);
    (lev(&g, &flat_segments(ocr)), g.len())
}
