//! Maps P(sat) over an alpha grid for fragment S and extracts the region
//! where it lies in [0.35, 0.65].
//!
//! `cargo run --release --example phase_map -- 200`

use fragsat::grammar::FragmentTag;
use fragsat::phasemap::{extract_region, map_region, Axis, GridSpec, Sampler};

fn main() {
    let samples: usize = std::env::args().nth(1).map_or(100, |a| a.parse().expect("samples"));
    let spec = GridSpec {
        fragment: FragmentTag::S,
        alpha: Axis::new(0.5, 4.0, 0.25),
        beta: None,
        n1: (6, 16),
        n2: (0, 0),
        samples,
        seed: 1,
    };
    let grid = map_region(&spec, &Sampler::default()).expect("grid");
    for cell in &grid.cells {
        let e = &cell.estimate;
        let bar = "#".repeat((e.phat * 40.0).round() as usize);
        println!("alpha {:>5.2}  p = {:.3} [{:.3}, {:.3}]  {bar}", cell.alpha, e.phat, e.ci_lo, e.ci_hi);
    }
    let region = extract_region(&grid, 0.35, 0.65).expect("bounds");
    let alphas: Vec<f64> = region.cells.iter().map(|c| c.alpha).collect();
    println!("region [0.35, 0.65]: alpha in {alphas:?}");
}
