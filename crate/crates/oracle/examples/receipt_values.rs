//! Prints the reference metric values for the bundled receipt fixture.
//!
//! The acceptance suite freezes these numbers; rerun this after touching
//! `fixtures/receipt/` to refresh them.

use std::path::Path;

use ocrqa_oracle as oracle;

fn main() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let gt_raw = std::fs::read_to_string(root.join("fixtures/receipt/gt.txt")).unwrap();
    let gt: String = gt_raw
        .lines()
        .filter(|l| !l.trim_start().starts_with("#section:") && !l.trim().is_empty())
        .collect::<Vec<_>>()
        .join("\n");
    let ocr_raw = std::fs::read_to_string(root.join("fixtures/receipt/scanned.txt")).unwrap();
    let ocr = ocr_raw.trim_end_matches('\n');

    let (fca_e, fca_n) = oracle::fca_errors(&gt, ocr);
    let (ssa_e, ssa_n) = oracle::ssa_errors(&gt, ocr);
    let (ossa_e, ossa_n) = oracle::ossa_errors(&gt, ocr);
    let t = gt.lines().count();
    let r = oracle::tla_matches(&gt, ocr);
    println!("fca:  E={fca_e} n={fca_n}  -> {}/{fca_n}", fca_n - fca_e);
    println!("ssa:  E={ssa_e} n={ssa_n}  -> {}/{ssa_n}", ssa_n - ssa_e);
    println!("ossa: E={ossa_e} n={ossa_n} -> {}/{ossa_n}", ossa_n - ossa_e);
    println!("tla:  r={r} t={t} -> {r}/{t}");
}
