//! Prints the statistics report (sizes, tokens, balance, histograms) of a
//! JSONL dataset file.
//!
//! `cargo run --example dataset_stats -- /tmp/fragsat-data/train.jsonl [csv]`

use std::path::PathBuf;

use fragsat::datagen::{dataset_report, read_jsonl};

fn main() {
    let mut args = std::env::args().skip(1);
    let path = PathBuf::from(args.next().expect("usage: dataset_stats <file.jsonl> [csv]"));
    let instances = read_jsonl(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let report = dataset_report(&instances).expect("report");
    if args.next().as_deref() == Some("csv") {
        print!("{}", report.to_csv());
    } else {
        print!("{}", report.to_text());
    }
}
