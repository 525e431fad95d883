//! Canonical text representation.
//!
//! Everything the metrics compare goes through [`normalize`] first: NFC
//! composition, line splitting, whitespace collapsing. Comparisons are
//! case-sensitive throughout; case confusion is a real recognition error
//! and must stay visible.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use icu_normalizer::ComposingNormalizer;
use icu_properties::{props::GeneralCategory, CodePointMapData};

use crate::error::{Error, Result};

/// Character class of a non-whitespace character.
///
/// Whitespace belongs to no class; every other character maps to exactly
/// one of these.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CharClass {
    Alphabet,
    Digit,
    Special,
}

impl CharClass {
    pub const ALL: [CharClass; 3] = [CharClass::Alphabet, CharClass::Digit, CharClass::Special];

    pub fn name(self) -> &'static str {
        match self {
            CharClass::Alphabet => "alphabet",
            CharClass::Digit => "digit",
            CharClass::Special => "special",
        }
    }
}

impl fmt::Display for CharClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Classifies one character: letters, decimal digits, or special;
/// whitespace maps to `None`.
///
/// Classes follow the Unicode general category: Nd is a digit, L* is a
/// letter, so e.g. Roman numerals and circled numbers fall through to
/// `Special`.
pub fn classify_char(ch: char) -> Option<CharClass> {
    if ch.is_whitespace() {
        return None;
    }
    match CodePointMapData::<GeneralCategory>::new().get(ch) {
        GeneralCategory::DecimalNumber => Some(CharClass::Digit),
        GeneralCategory::UppercaseLetter
        | GeneralCategory::LowercaseLetter
        | GeneralCategory::TitlecaseLetter
        | GeneralCategory::ModifierLetter
        | GeneralCategory::OtherLetter => Some(CharClass::Alphabet),
        _ => Some(CharClass::Special),
    }
}

/// A maximal whitespace-free run of characters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StringSegment {
    pub text: String,
    pub classes_present: BTreeSet<CharClass>,
}

impl StringSegment {
    fn new(text: &str) -> Self {
        let classes_present = text.chars().filter_map(classify_char).collect();
        StringSegment { text: text.to_owned(), classes_present }
    }
}

/// One normalized text line with its segment decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Line {
    pub index: usize,
    pub text: String,
    pub segments: Vec<StringSegment>,
}

impl Line {
    /// Character count of the line, spaces included.
    pub fn char_len(&self) -> usize {
        self.text.chars().count()
    }
}

/// Whitespace-normalized text: non-empty lines, single spaces, no
/// leading/trailing whitespace, NFC form.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NormalizedText {
    pub lines: Vec<Line>,
    /// Total symbols: spaces inside lines count, line breaks do not.
    pub char_count: usize,
}

impl NormalizedText {
    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn segment_count(&self) -> usize {
        self.lines.iter().map(|l| l.segments.len()).sum()
    }

    /// Rebuilds the text, one normalized line per `\n`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, line) in self.lines.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            out.push_str(&line.text);
        }
        out
    }

    /// Builds from already-normalized line texts (no whitespace runs, no
    /// blank entries). Internal constructor shared by `normalize`,
    /// filtering, and section concatenation.
    pub(crate) fn from_clean_lines(texts: impl IntoIterator<Item = String>) -> Self {
        let mut lines = Vec::new();
        let mut char_count = 0;
        for text in texts {
            debug_assert!(!text.is_empty());
            char_count += text.chars().count();
            let segments = text.split_whitespace().map(StringSegment::new).collect();
            lines.push(Line { index: lines.len(), text, segments });
        }
        NormalizedText { lines, char_count }
    }
}

/// Splits raw text into lines on `\r\n`, `\r`, or `\n`.
fn split_line_breaks(raw: &str) -> Vec<&str> {
    let mut lines = Vec::new();
    let mut start = 0;
    let bytes = raw.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'\n' => {
                lines.push(&raw[start..i]);
                i += 1;
                start = i;
            }
            b'\r' => {
                lines.push(&raw[start..i]);
                i += if bytes.get(i + 1) == Some(&b'\n') { 2 } else { 1 };
                start = i;
            }
            _ => i += 1,
        }
    }
    lines.push(&raw[start..]);
    lines
}

/// Collapses whitespace runs to single spaces and trims the ends.
fn collapse_whitespace(line: &str) -> String {
    let mut out = String::with_capacity(line.len());
    let mut in_run = false;
    for ch in line.chars() {
        if ch.is_whitespace() {
            in_run = true;
        } else {
            if in_run && !out.is_empty() {
                out.push(' ');
            }
            in_run = false;
            out.push(ch);
        }
    }
    out
}

/// Normalizes raw text: NFC composition, line splitting on any break
/// convention, blank-line removal, whitespace collapse.
pub fn normalize(raw: &str) -> NormalizedText {
    let composed = ComposingNormalizer::new_nfc().normalize_utf8(raw.as_bytes());
    let cleaned = split_line_breaks(&composed)
        .into_iter()
        .map(collapse_whitespace)
        .filter(|l| !l.is_empty());
    NormalizedText::from_clean_lines(cleaned)
}

/// The segments of a normalized line, left to right.
pub fn tokenize_segments(line: &Line) -> Vec<StringSegment> {
    line.segments.clone()
}

/// Keeps only characters of `class`; emptied lines are dropped.
pub fn filter_by_class(text: &NormalizedText, class: CharClass) -> NormalizedText {
    let filtered = text.lines.iter().filter_map(|line| {
        let kept: String =
            line.text.chars().filter(|&c| classify_char(c) == Some(class)).collect();
        if kept.is_empty() {
            None
        } else {
            Some(kept)
        }
    });
    NormalizedText::from_clean_lines(filtered)
}

/// Opaque handle for a distinct segment spelling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolId(pub u32);

/// Bidirectional mapping between symbol ids and segment texts.
///
/// Identical segment texts share one id: a token recurring on a receipt
/// ("Tax", "$") must be matchable against any of its occurrences.
#[derive(Debug, Clone, Default)]
pub struct SymbolTable {
    texts: Vec<String>,
    ids: BTreeMap<String, SymbolId>,
}

impl SymbolTable {
    fn intern(&mut self, text: &str) -> SymbolId {
        if let Some(&id) = self.ids.get(text) {
            return id;
        }
        let id = SymbolId(self.texts.len() as u32);
        self.texts.push(text.to_owned());
        self.ids.insert(text.to_owned(), id);
        id
    }

    pub fn text(&self, id: SymbolId) -> &str {
        &self.texts[id.0 as usize]
    }

    pub fn id_of(&self, text: &str) -> Option<SymbolId> {
        self.ids.get(text).copied()
    }

    pub fn len(&self) -> usize {
        self.texts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.texts.is_empty()
    }
}

/// One side's segments as symbol ids, line structure preserved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolSequence {
    pub lines: Vec<Vec<SymbolId>>,
}

impl SymbolSequence {
    /// Reading order: left to right within a line, top to bottom.
    pub fn flatten(&self) -> Vec<SymbolId> {
        self.lines.iter().flatten().copied().collect()
    }

    pub fn symbol_count(&self) -> usize {
        self.lines.iter().map(Vec::len).sum()
    }
}

/// Builds a shared symbol table over both texts and rewrites each side's
/// segments as symbol ids. Ids are assigned in first-seen order, ground
/// truth first.
pub fn build_symbols(
    gt: &NormalizedText,
    ocr: &NormalizedText,
) -> (SymbolSequence, SymbolSequence, SymbolTable) {
    let mut table = SymbolTable::default();
    let mut encode = |text: &NormalizedText| SymbolSequence {
        lines: text
            .lines
            .iter()
            .map(|l| l.segments.iter().map(|s| table.intern(&s.text)).collect())
            .collect(),
    };
    let gt_seq = encode(gt);
    let ocr_seq = encode(ocr);
    (gt_seq, ocr_seq, table)
}

/// Receipt section kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SectionKind {
    Store,
    Items,
    Transaction,
    Misc,
    Other,
}

impl SectionKind {
    pub const ALL: [SectionKind; 5] = [
        SectionKind::Store,
        SectionKind::Items,
        SectionKind::Transaction,
        SectionKind::Misc,
        SectionKind::Other,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SectionKind::Store => "store",
            SectionKind::Items => "items",
            SectionKind::Transaction => "transaction",
            SectionKind::Misc => "misc",
            SectionKind::Other => "other",
        }
    }

    fn parse(name: &str) -> Option<SectionKind> {
        let lower = name.to_ascii_lowercase();
        SectionKind::ALL.into_iter().find(|k| k.name() == lower)
    }
}

impl fmt::Display for SectionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One labelled section of a ground-truth document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section {
    pub kind: SectionKind,
    pub body: NormalizedText,
}

/// Ground truth split into labelled sections; kinds may repeat.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroundTruthDoc {
    pub sections: Vec<Section>,
}

impl GroundTruthDoc {
    /// The whole document as one normalized text, sections concatenated
    /// in order.
    pub fn full_text(&self) -> NormalizedText {
        NormalizedText::from_clean_lines(
            self.sections
                .iter()
                .flat_map(|s| s.body.lines.iter().map(|l| l.text.clone())),
        )
    }

    /// All bodies of `kind` concatenated, or `None` when the kind never
    /// appears with content.
    pub fn body_of(&self, kind: SectionKind) -> Option<NormalizedText> {
        let lines: Vec<String> = self
            .sections
            .iter()
            .filter(|s| s.kind == kind)
            .flat_map(|s| s.body.lines.iter().map(|l| l.text.clone()))
            .collect();
        if lines.is_empty() {
            None
        } else {
            Some(NormalizedText::from_clean_lines(lines))
        }
    }

    /// Section kinds present in this document, in kind order.
    pub fn kinds_present(&self) -> Vec<SectionKind> {
        let present: BTreeSet<SectionKind> = self.sections.iter().map(|s| s.kind).collect();
        present.into_iter().collect()
    }
}

/// Matches a `#section: <name>` header line; returns the name part.
fn section_header(line: &str) -> Option<&str> {
    let trimmed = line.trim();
    let rest = trimmed
        .get(..9)
        .filter(|head| head.eq_ignore_ascii_case("#section:"))
        .map(|_| &trimmed[9..])?;
    Some(rest.trim())
}

/// Parses a ground-truth file: `#section: <name>` headers open sections,
/// content before any header lands in an implicit `other` section.
pub fn parse_ground_truth(bytes: &[u8]) -> Result<GroundTruthDoc> {
    let raw = std::str::from_utf8(bytes)
        .map_err(|_| Error::InvalidEncoding { context: Some("ground truth file".into()) })?;
    let mut sections: Vec<(SectionKind, Vec<&str>)> = Vec::new();
    for (lineno, line) in split_line_breaks(raw).into_iter().enumerate() {
        if let Some(name) = section_header(line) {
            let kind = SectionKind::parse(name).ok_or_else(|| {
                Error::parse_at(lineno + 1, format!("unknown section name `{name}`"))
            })?;
            sections.push((kind, Vec::new()));
        } else {
            match sections.last_mut() {
                Some((_, body)) => body.push(line),
                None if line.trim().is_empty() => {}
                None => sections.push((SectionKind::Other, vec![line])),
            }
        }
    }
    Ok(GroundTruthDoc {
        sections: sections
            .into_iter()
            .map(|(kind, body)| Section { kind, body: normalize(&body.join("\n")) })
            .collect(),
    })
}
