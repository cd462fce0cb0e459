//! Maps a phase region for fragment S, generates a small balanced dataset
//! inside it and writes the splits as JSONL.
//!
//! `cargo run --release --example generate_dataset -- /tmp/fragsat-data 200`

use std::path::PathBuf;

use fragsat::datagen::{build_dataset, verify_instances, write_jsonl, GenConfig};
use fragsat::grammar::{FragmentTag, Vocabulary};
use fragsat::phasemap::{extract_region, map_region, Axis, GridSpec, Sampler};

fn main() {
    let mut args = std::env::args().skip(1);
    let dir =
        PathBuf::from(args.next().unwrap_or_else(|| std::env::temp_dir().join("fragsat-data").display().to_string()));
    let train: usize = args.next().map_or(100, |a| a.parse().expect("count"));
    let spec = GridSpec {
        fragment: FragmentTag::S,
        alpha: Axis::new(0.5, 3.0, 0.25),
        beta: None,
        n1: (6, 16),
        n2: (0, 0),
        samples: 100,
        seed: 3,
    };
    let region = extract_region(&map_region(&spec, &Sampler::default()).unwrap(), 0.35, 0.65).unwrap();
    let vocab = Vocabulary::default_english();
    let mut config = GenConfig::new(FragmentTag::S, train, train / 10, train / 10, 42);
    config.keep_models = true;
    let (splits, stats) = build_dataset(&config, &region, &vocab).expect("generation");
    std::fs::create_dir_all(&dir).unwrap();
    for (name, part) in splits.iter() {
        write_jsonl(&dir.join(format!("{name}.jsonl")), part).unwrap();
        let report = verify_instances(part, Some(&region), &vocab, 10).unwrap();
        println!("{name}: {} instances, clean = {}", part.len(), report.is_clean());
    }
    println!("{stats:?}");
    println!("written to {}", dir.display());
}
