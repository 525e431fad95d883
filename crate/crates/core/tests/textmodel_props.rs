//! Property tests for normalization, tokenization, and symbol building.

use ocrqa_core::textmodel::{build_symbols, filter_by_class, normalize, CharClass};
use proptest::prelude::*;

fn messy_text() -> impl Strategy<Value = String> {
    prop::collection::vec(
        prop::sample::select(vec![
            "a", "B", "7", "$", ".", " ", "  ", "\t", "\n", "\r\n", "é", "µ", "#",
        ]),
        0..40,
    )
    .prop_map(|parts| parts.concat())
}

fn segment() -> impl Strategy<Value = String> {
    proptest::string::string_regex("[a-c$0-9]{1,4}").unwrap()
}

proptest! {
    #[test]
    fn normalize_is_idempotent(raw in messy_text()) {
        let once = normalize(&raw);
        prop_assert_eq!(&normalize(&once.render()), &once);
    }

    #[test]
    fn lines_have_no_breaks_or_edge_whitespace(raw in messy_text()) {
        let text = normalize(&raw);
        let mut total = 0;
        for line in &text.lines {
            prop_assert!(!line.text.is_empty());
            prop_assert!(!line.text.contains(['\n', '\r']));
            prop_assert_eq!(line.text.trim(), line.text.as_str());
            prop_assert!(!line.text.contains("  "));
            total += line.text.chars().count();
        }
        prop_assert_eq!(text.char_count, total);
    }

    #[test]
    fn segments_join_back_to_the_line(raw in messy_text()) {
        let text = normalize(&raw);
        for line in &text.lines {
            for seg in &line.segments {
                prop_assert!(!seg.text.is_empty());
                prop_assert!(!seg.text.contains(char::is_whitespace));
            }
            let joined: Vec<&str> = line.segments.iter().map(|s| s.text.as_str()).collect();
            prop_assert_eq!(joined.join(" "), line.text.clone());
        }
    }

    #[test]
    fn filter_is_idempotent(raw in messy_text()) {
        for class in CharClass::ALL {
            let text = normalize(&raw);
            let once = filter_by_class(&text, class);
            prop_assert_eq!(&filter_by_class(&once, class), &once);
        }
    }

    #[test]
    fn symbol_ids_equal_iff_texts_equal(
        gt_segs in prop::collection::vec(segment(), 0..12),
        ocr_segs in prop::collection::vec(segment(), 0..12),
    ) {
        let gt = normalize(&gt_segs.join(" "));
        let ocr = normalize(&ocr_segs.join(" "));
        let (g, o, table) = build_symbols(&gt, &ocr);
        let ids: Vec<_> = g.lines.iter().chain(o.lines.iter()).flatten().copied().collect();
        let texts: Vec<&str> = gt_segs.iter().chain(ocr_segs.iter()).map(String::as_str).collect();
        prop_assert_eq!(ids.len(), texts.len());
        for i in 0..ids.len() {
            prop_assert_eq!(table.text(ids[i]), texts[i]);
            for j in 0..ids.len() {
                prop_assert_eq!(ids[i] == ids[j], texts[i] == texts[j]);
            }
        }
    }
}
