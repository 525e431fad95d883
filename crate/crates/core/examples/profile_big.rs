//! Rough per-metric timings on a ~10 KB receipt-like pair. Handy when
//! touching the matcher; the acceptance suite enforces the budget.

use std::time::Instant;

use ocrqa_core::metrics::{class_accuracy, fca, ossa, ssa, tla, MetricConfig};
use ocrqa_core::textmodel::{normalize, CharClass};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn big_pair() -> (String, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(0xB16);
    let mut gt_lines = Vec::new();
    let mut ocr_lines = Vec::new();
    let mut size = 0usize;
    let mut i = 0usize;
    while size < 10_000 {
        let line = format!(
            "Item {:03} pack of {} units net {}g ${}.{:02}",
            i,
            rng.random_range(1..9),
            rng.random_range(50..950),
            rng.random_range(1..40),
            rng.random_range(0..100),
        );
        size += line.chars().count() + 1;
        let damaged = match i % 11 {
            0 => line.replace(' ', ""),
            4 => line.replace('a', "e"),
            7 => format!("{line} xx"),
            _ => line.clone(),
        };
        gt_lines.push(line);
        ocr_lines.push(damaged);
        i += 1;
    }
    ocr_lines.swap(0, 1);
    (gt_lines.join("\n"), ocr_lines.join("\n"))
}

fn main() {
    let (gt_text, ocr_text) = big_pair();
    let cfg = MetricConfig::<f64>::default();
    let gt = normalize(&gt_text);
    let ocr = normalize(&ocr_text);

    let t = Instant::now();
    let fca_score = fca(&gt, &ocr, &cfg).unwrap().0;
    println!("fca   {:>12?}  (score {fca_score:.4})", t.elapsed());
    let t = Instant::now();
    let ssa_score = ssa(&gt, &ocr, &cfg).unwrap().0;
    println!("ssa   {:>12?}  (score {ssa_score:.4})", t.elapsed());
    let t = Instant::now();
    let ossa_score = ossa::<f64>(&gt, &ocr, &cfg).unwrap();
    println!("ossa  {:>12?}  (score {ossa_score:.4})", t.elapsed());
    let t = Instant::now();
    let tla_score = tla::<f64>(&gt, &ocr, &cfg).unwrap();
    println!("tla   {:>12?}  (score {tla_score:.4})", t.elapsed());
    for class in CharClass::ALL {
        let t = Instant::now();
        let score = class_accuracy::<f64>(&gt, &ocr, class, &cfg);
        println!("class {class:<9} {:>12?}  ({score:?})", t.elapsed());
    }
}
