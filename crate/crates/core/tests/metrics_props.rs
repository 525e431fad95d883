//! Property tests for the metric layer: reading-order independence,
//! oracle equivalence of the flexible matcher, and score bounds.

use std::collections::BTreeMap;

use ocrqa_core::metrics::{class_accuracy, fca, ossa, ssa, tla, MetricConfig};
use ocrqa_core::textmodel::{normalize, CharClass};
use ocrqa_core::ExactScore;
use ocrqa_oracle as oracle;
use proptest::prelude::*;

fn cfg() -> MetricConfig<ExactScore> {
    MetricConfig::default()
}

fn line() -> impl Strategy<Value = String> {
    proptest::string::string_regex("[a-c]{1,5}( [a-c]{1,5}){0,2}").unwrap()
}

fn lines(max: usize) -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(line(), 1..max)
}

fn joined(lines: &[String]) -> String {
    lines.join("\n")
}

proptest! {
    #[test]
    fn fca_and_ssa_ignore_reading_order(
        gt in lines(5).prop_flat_map(|v| (Just(v.clone()), Just(v).prop_shuffle())),
        ocr in lines(5).prop_flat_map(|v| (Just(v.clone()), Just(v).prop_shuffle())),
    ) {
        let (gt_orig, gt_perm) = gt;
        let (ocr_orig, ocr_perm) = ocr;
        let a = (normalize(&joined(&gt_orig)), normalize(&joined(&ocr_orig)));
        let b = (normalize(&joined(&gt_perm)), normalize(&joined(&ocr_perm)));

        let fca_a = fca(&a.0, &a.1, &cfg()).unwrap().0;
        let fca_b = fca(&b.0, &b.1, &cfg()).unwrap().0;
        prop_assert_eq!(fca_a, fca_b);

        let ssa_a = ssa(&a.0, &a.1, &cfg()).unwrap().0;
        let ssa_b = ssa(&b.0, &b.1, &cfg()).unwrap().0;
        prop_assert_eq!(ssa_a, ssa_b);
    }

    #[test]
    fn flex_matcher_agrees_with_naive_oracle(gt in lines(4), ocr in lines(4)) {
        let gt_text = joined(&gt);
        let ocr_text = joined(&ocr);
        let (_, trace) = fca(&normalize(&gt_text), &normalize(&ocr_text), &cfg()).unwrap();
        let (expected_errors, expected_n) = oracle::fca_errors(&gt_text, &ocr_text);
        prop_assert_eq!(trace.total_errors, expected_errors);
        prop_assert_eq!(trace.gt_units, expected_n);

        let (_, trace) = ssa(&normalize(&gt_text), &normalize(&ocr_text), &cfg()).unwrap();
        let (expected_errors, expected_n) = oracle::ssa_errors(&gt_text, &ocr_text);
        prop_assert_eq!(trace.total_errors, expected_errors);
        prop_assert_eq!(trace.gt_units, expected_n);
    }

    #[test]
    fn ossa_agrees_with_oracle(gt in lines(4), ocr in lines(4)) {
        let gt_text = joined(&gt);
        let ocr_text = joined(&ocr);
        let score = ossa::<ExactScore>(&normalize(&gt_text), &normalize(&ocr_text), &cfg()).unwrap();
        let (e, n) = oracle::ossa_errors(&gt_text, &ocr_text);
        let raw = ExactScore::new(n as i64 - e as i64, n as i64);
        let expected = if raw < ExactScore::new(0, 1) { ExactScore::new(0, 1) } else { raw };
        prop_assert_eq!(score, expected);
    }

    #[test]
    fn tla_agrees_with_oracle_and_multiset_rule(gt in lines(4), ocr in lines(4)) {
        let gt_text = normalize(&joined(&gt));
        let ocr_text = normalize(&joined(&ocr));
        let score = tla::<ExactScore>(&gt_text, &ocr_text, &cfg()).unwrap();
        let r = oracle::tla_matches(&joined(&gt), &joined(&ocr));
        prop_assert_eq!(score, ExactScore::new(r as i64, gt.len() as i64));

        // r/t = 1 exactly when every line occurs with its multiplicity.
        let mut counts: BTreeMap<&str, i64> = BTreeMap::new();
        for l in &gt {
            *counts.entry(l.as_str()).or_default() += 1;
        }
        for l in &ocr {
            *counts.entry(l.as_str()).or_default() -= 1;
        }
        let contained = counts.values().all(|&c| c <= 0);
        prop_assert_eq!(score == ExactScore::new(1, 1), contained);
    }

    #[test]
    fn clamped_scores_stay_in_unit_interval(gt in lines(4), ocr in lines(4)) {
        let g = normalize(&joined(&gt));
        let o = normalize(&joined(&ocr));
        let zero = ExactScore::new(0, 1);
        let one = ExactScore::new(1, 1);
        for score in [
            fca(&g, &o, &cfg()).unwrap().0,
            ssa(&g, &o, &cfg()).unwrap().0,
            ossa(&g, &o, &cfg()).unwrap(),
            tla(&g, &o, &cfg()).unwrap(),
        ] {
            prop_assert!(zero <= score && score <= one, "{score} out of range");
        }
    }

    #[test]
    fn identical_inputs_score_one_everywhere(gt in lines(5)) {
        let g = normalize(&joined(&gt));
        let one = ExactScore::new(1, 1);
        prop_assert_eq!(fca(&g, &g, &cfg()).unwrap().0, one);
        prop_assert_eq!(ssa(&g, &g, &cfg()).unwrap().0, one);
        prop_assert_eq!(ossa::<ExactScore>(&g, &g, &cfg()).unwrap(), one);
        prop_assert_eq!(tla::<ExactScore>(&g, &g, &cfg()).unwrap(), one);
    }

    #[test]
    fn absent_class_is_undefined_not_zero(gt in lines(3), ocr in lines(3)) {
        // The line alphabet is a-c: digits never appear in ground truth.
        let g = normalize(&joined(&gt));
        let o = normalize(&joined(&ocr));
        prop_assert_eq!(class_accuracy::<ExactScore>(&g, &o, CharClass::Digit, &cfg()), None);
        prop_assert!(class_accuracy::<ExactScore>(&g, &o, CharClass::Alphabet, &cfg()).is_some());
    }

    #[test]
    fn flex_trace_accounting(gt in lines(4), ocr in lines(4)) {
        let g = normalize(&joined(&gt));
        let o = normalize(&joined(&ocr));
        let (_, trace) = fca::<ExactScore>(&g, &o, &cfg()).unwrap();
        let pair_errors: usize = trace.pairs.iter().map(|p| p.errors).sum();
        prop_assert_eq!(
            trace.total_errors,
            pair_errors + trace.unmatched_gt_units + trace.leftover_ocr_units
        );
        prop_assert_eq!(trace.pairs.len() + trace.unmatched_gt.len(), g.lines.len());
        for pair in &trace.pairs {
            let line_len = o.lines[pair.ocr_line].text.chars().count();
            prop_assert!(pair.ocr_span.0 <= pair.ocr_span.1 && pair.ocr_span.1 <= line_len);
        }
    }
}
