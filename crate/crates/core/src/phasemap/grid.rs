//! Parameter grids, phase-change regions and their CSV form.

use std::collections::{BTreeSet, VecDeque};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use log::warn;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::grammar::FragmentTag;

use super::{estimate_pooled, Estimate, PhaseError, Sampler};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl Axis {
    pub fn new(min: f64, max: f64, step: f64) -> Self {
        Axis { min, max, step }
    }

    pub fn values(&self) -> Vec<f64> {
        let n = ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1;
        (0..n).map(|i| round6(self.min + i as f64 * self.step)).collect()
    }

    fn validate(&self, name: &str) -> Result<(), PhaseError> {
        let ok =
            self.step > 0.0 && self.min > 0.0 && self.max >= self.min && self.step.is_finite() && self.max.is_finite();
        if ok {
            Ok(())
        } else {
            Err(PhaseError::InvalidParameter(format!("degenerate {name} axis {self:?}")))
        }
    }
}

fn round6(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

/// Half-open bin `[centre - step/2, centre + step/2)`.
fn in_bin(v: f64, centre: f64, step: f64) -> bool {
    let eps = 1e-9;
    v >= centre - step / 2.0 - eps && v < centre + step / 2.0 - eps
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub fragment: FragmentTag,
    pub alpha: Axis,
    /// Required exactly for fragments with transitive verbs.
    pub beta: Option<Axis>,
    pub n1: (usize, usize),
    pub n2: (usize, usize),
    pub samples: usize,
    pub seed: u64,
}

impl GridSpec {
    pub fn validate(&self) -> Result<(), PhaseError> {
        self.alpha.validate("alpha")?;
        match (&self.beta, self.fragment.has_verbs()) {
            (Some(b), true) => b.validate("beta")?,
            (None, false) => {}
            (Some(_), false) => {
                return Err(PhaseError::InvalidParameter(format!("fragment {} has no beta axis", self.fragment)))
            }
            (None, true) => {
                return Err(PhaseError::InvalidParameter(format!("fragment {} needs a beta axis", self.fragment)))
            }
        }
        if self.n1.0 == 0 || self.n1.0 > self.n1.1 {
            return Err(PhaseError::InvalidParameter(format!("bad n1 range {:?}", self.n1)));
        }
        if self.fragment.has_verbs() && (self.n2.0 == 0 || self.n2.0 > self.n2.1) {
            return Err(PhaseError::InvalidParameter(format!("bad n2 range {:?}", self.n2)));
        }
        if self.samples == 0 {
            return Err(PhaseError::NoSamples);
        }
        Ok(())
    }

    /// Short digest of the resolved configuration.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("spec serializes");
        hex::encode(&Sha256::digest(json.as_bytes())[..8])
    }

    fn n2_range(&self) -> Vec<usize> {
        if self.fragment.has_verbs() {
            (self.n2.0..=self.n2.1).collect()
        } else {
            vec![0]
        }
    }

    /// All `(m, n1, n2)` in the configured ranges whose `(m/n1, m/n2)`
    /// falls in the cell's bins.
    pub fn combos(&self, alpha: f64, beta: Option<f64>) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for n1 in self.n1.0..=self.n1.1 {
            let top = ((alpha + self.alpha.step) * n1 as f64).ceil() as usize;
            for m in 1..=top {
                if !in_bin(m as f64 / n1 as f64, alpha, self.alpha.step) {
                    continue;
                }
                for n2 in self.n2_range() {
                    let ok = match (beta, &self.beta) {
                        (Some(b), Some(axis)) => in_bin(m as f64 / n2 as f64, b, axis.step),
                        _ => true,
                    };
                    if ok {
                        out.push((m, n1, n2));
                    }
                }
            }
        }
        out
    }

    fn cell_keys(&self) -> Vec<(usize, f64, usize, Option<f64>)> {
        let betas: Vec<Option<f64>> = match &self.beta {
            Some(b) => b.values().into_iter().map(Some).collect(),
            None => vec![None],
        };
        let mut keys = Vec::new();
        for (ai, a) in self.alpha.values().into_iter().enumerate() {
            for (bi, b) in betas.iter().enumerate() {
                keys.push((ai, a, bi, *b));
            }
        }
        keys
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseCell {
    pub alpha_bin: usize,
    pub beta_bin: usize,
    pub alpha: f64,
    pub beta: Option<f64>,
    pub combos: Vec<(usize, usize, usize)>,
    pub estimate: Estimate,
}

impl PhaseCell {
    pub fn phat(&self) -> f64 {
        self.estimate.phat
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    pub spec: GridSpec,
    /// α-major; cells without any feasible combination are omitted.
    pub cells: Vec<PhaseCell>,
}

impl PhaseGrid {
    pub fn cell(&self, alpha_bin: usize, beta_bin: usize) -> Option<&PhaseCell> {
        self.cells.iter().find(|c| c.alpha_bin == alpha_bin && c.beta_bin == beta_bin)
    }
}

/// Estimates every feasible cell of the grid.
pub fn map_region(spec: &GridSpec, sampler: &Sampler) -> Result<PhaseGrid, PhaseError> {
    spec.validate()?;
    let nbeta = spec.beta.map_or(1, |b| b.values().len());
    let mut cells = Vec::new();
    for (ai, alpha, bi, beta) in spec.cell_keys() {
        let combos = spec.combos(alpha, beta);
        if combos.is_empty() {
            continue;
        }
        let stream = (ai * nbeta + bi) as u64;
        let estimate = estimate_pooled(spec.fragment, &combos, spec.samples, spec.seed, stream, sampler)?;
        log::info!("{} alpha={alpha} beta={beta:?}: {}/{} sat", spec.fragment, estimate.sat, estimate.samples);
        cells.push(PhaseCell { alpha_bin: ai, beta_bin: bi, alpha, beta, combos, estimate });
    }
    Ok(PhaseGrid { spec: spec.clone(), cells })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseRegion {
    pub fragment: FragmentTag,
    pub lo: f64,
    pub hi: f64,
    pub spec: GridSpec,
    pub cells: Vec<PhaseCell>,
}

impl PhaseRegion {
    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Whether `(alpha, beta)` lies in the bins of a region cell.
    pub fn contains(&self, alpha: f64, beta: Option<f64>) -> bool {
        self.cells.iter().any(|c| {
            in_bin(alpha, c.alpha, self.spec.alpha.step)
                && match (c.beta, beta, &self.spec.beta) {
                    (Some(cb), Some(b), Some(axis)) => in_bin(b, cb, axis.step),
                    (None, _, _) => true,
                    _ => false,
                }
        })
    }

    /// Sentence counts `m` placing `(m/n1, m/n2)` inside the region.
    pub fn admissible_m(&self, n1: usize, n2: usize) -> Vec<usize> {
        if n1 == 0 || (self.fragment.has_verbs() && n2 == 0) {
            return Vec::new();
        }
        let top = ((self.spec.alpha.max + self.spec.alpha.step) * n1 as f64).ceil() as usize;
        (1..=top)
            .filter(|&m| {
                let beta = (n2 > 0).then(|| m as f64 / n2 as f64);
                self.contains(m as f64 / n1 as f64, beta)
            })
            .collect()
    }

    /// Whether region cells form one 4-connected component of bins.
    pub fn is_connected(&self) -> bool {
        let bins: BTreeSet<(usize, usize)> = self.cells.iter().map(|c| (c.alpha_bin, c.beta_bin)).collect();
        let Some(&start) = bins.iter().next() else {
            return true;
        };
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some((a, b)) = queue.pop_front() {
            let next = [(a + 1, b), (a.wrapping_sub(1), b), (a, b + 1), (a, b.wrapping_sub(1))];
            for n in next {
                if bins.contains(&n) && seen.insert(n) {
                    queue.push_back(n);
                }
            }
        }
        seen.len() == bins.len()
    }
}

/// Cells whose point estimate lies in `[lo, hi]`.
pub fn extract_region(grid: &PhaseGrid, lo: f64, hi: f64) -> Result<PhaseRegion, PhaseError> {
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(PhaseError::InvalidBounds { lo, hi });
    }
    let cells: Vec<PhaseCell> =
        grid.cells.iter().filter(|c| c.estimate.samples > 0 && (lo..=hi).contains(&c.estimate.phat)).cloned().collect();
    let region = PhaseRegion { fragment: grid.spec.fragment, lo, hi, spec: grid.spec.clone(), cells };
    if region.is_empty() {
        warn!("phase-change region for {} is empty", region.fragment);
    } else if !region.is_connected() {
        warn!("phase-change region for {} is disconnected", region.fragment);
    }
    Ok(region)
}

const COLUMNS: [&str; 12] =
    ["fragment", "alpha", "beta", "m", "n1", "n2", "samples", "sat", "phat", "ci_lo", "ci_hi", "timeouts"];

#[derive(Serialize, Deserialize)]
struct Header {
    kind: String,
    hash: String,
    spec: GridSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bounds: Option<(f64, f64)>,
}

fn span(values: impl Iterator<Item = usize>) -> String {
    let v: Vec<usize> = values.collect();
    let (lo, hi) = (v.iter().min().copied().unwrap_or(0), v.iter().max().copied().unwrap_or(0));
    if lo == hi {
        lo.to_string()
    } else {
        format!("{lo}..{hi}")
    }
}

fn write_cells<W: Write>(mut out: W, header: &Header, cells: &[PhaseCell]) -> Result<(), PhaseError> {
    writeln!(out, "# {}", serde_json::to_string(header).expect("header serializes"))?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for c in cells {
        let e = &c.estimate;
        w.write_record([
            header.spec.fragment.to_string(),
            c.alpha.to_string(),
            c.beta.map(|b| b.to_string()).unwrap_or_default(),
            span(c.combos.iter().map(|t| t.0)),
            span(c.combos.iter().map(|t| t.1)),
            span(c.combos.iter().map(|t| t.2)),
            e.samples.to_string(),
            e.sat.to_string(),
            format!("{:.6}", e.phat),
            format!("{:.6}", e.ci_lo),
            format!("{:.6}", e.ci_hi),
            e.timeouts.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Grid CSV, preceded by a `#` line holding the resolved spec and its hash.
pub fn write_grid<W: Write>(out: W, grid: &PhaseGrid) -> Result<(), PhaseError> {
    let header = Header { kind: "phase-grid".into(), hash: grid.spec.hash(), spec: grid.spec.clone(), bounds: None };
    write_cells(out, &header, &grid.cells)
}

pub fn write_region<W: Write>(out: W, region: &PhaseRegion) -> Result<(), PhaseError> {
    let header = Header {
        kind: "phase-region".into(),
        hash: region.spec.hash(),
        spec: region.spec.clone(),
        bounds: Some((region.lo, region.hi)),
    };
    write_cells(out, &header, &region.cells)
}

fn read_cells(path: &Path) -> Result<(Header, Vec<PhaseCell>), PhaseError> {
    let mut reader = BufReader::new(File::open(path)?);
    let mut first = String::new();
    reader.read_line(&mut first)?;
    let json =
        first.strip_prefix("# ").ok_or_else(|| PhaseError::Format("missing configuration header line".into()))?;
    let header: Header = serde_json::from_str(json.trim()).map_err(|e| PhaseError::Format(e.to_string()))?;
    let mut r = csv::Reader::from_reader(reader);
    if r.headers()?.iter().ne(COLUMNS) {
        return Err(PhaseError::Format("unexpected column layout".into()));
    }
    let nbeta = header.spec.beta.map_or(1, |b| b.values().len());
    let keys = header.spec.cell_keys();
    let mut cells = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let bad = |what: &str| PhaseError::Format(format!("row {}: bad {what}", line + 1));
        let num = |i: usize, what: &str| rec[i].parse::<f64>().map_err(|_| bad(what));
        let count = |i: usize, what: &str| rec[i].parse::<usize>().map_err(|_| bad(what));
        let alpha = num(1, "alpha")?;
        let beta = if rec[2].is_empty() { None } else { Some(num(2, "beta")?) };
        let &(ai, a, bi, b) = keys
            .iter()
            .find(|k| (k.1 - alpha).abs() < 1e-9 && k.3.zip(beta).is_none_or(|(x, y)| (x - y).abs() < 1e-9))
            .ok_or_else(|| bad("cell coordinates"))?;
        let samples = count(6, "samples")?;
        let estimate = Estimate {
            samples,
            sat: count(7, "sat")?,
            phat: num(8, "phat")?,
            ci_lo: num(9, "ci_lo")?,
            ci_hi: num(10, "ci_hi")?,
            timeouts: count(11, "timeouts")?,
            unreliable: samples < header.spec.samples,
        };
        debug_assert!(bi < nbeta);
        cells.push(PhaseCell {
            alpha_bin: ai,
            beta_bin: bi,
            alpha: a,
            beta: b,
            combos: header.spec.combos(a, b),
            estimate,
        });
    }
    Ok((header, cells))
}

pub fn load_grid(path: &Path) -> Result<PhaseGrid, PhaseError> {
    let (header, cells) = read_cells(path)?;
    if header.kind != "phase-grid" {
        return Err(PhaseError::Format(format!("expected a phase grid, found {}", header.kind)));
    }
    Ok(PhaseGrid { spec: header.spec, cells })
}

pub fn load_region(path: &Path) -> Result<PhaseRegion, PhaseError> {
    let (header, cells) = read_cells(path)?;
    let (lo, hi) = match (header.kind.as_str(), header.bounds) {
        ("phase-region", Some(b)) => b,
        _ => return Err(PhaseError::Format(format!("expected a phase region, found {}", header.kind))),
    };
    Ok(PhaseRegion { fragment: header.spec.fragment, lo, hi, spec: header.spec, cells })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> GridSpec {
        GridSpec {
            fragment: FragmentTag::S,
            alpha: Axis::new(0.5, 2.0, 0.5),
            beta: None,
            n1: (6, 8),
            n2: (0, 0),
            samples: 10,
            seed: 1,
        }
    }

    fn cell(ai: usize, alpha: f64, phat: f64) -> PhaseCell {
        PhaseCell {
            alpha_bin: ai,
            beta_bin: 0,
            alpha,
            beta: None,
            combos: spec().combos(alpha, None),
            estimate: Estimate {
                samples: 10,
                sat: (phat * 10.0) as usize,
                timeouts: 0,
                phat,
                ci_lo: 0.0,
                ci_hi: 1.0,
                unreliable: false,
            },
        }
    }

    #[test]
    fn axis_values_and_combos() {
        assert_eq!(Axis::new(0.25, 1.0, 0.25).values(), vec![0.25, 0.5, 0.75, 1.0]);
        let s = spec();
        for (m, n1, _) in s.combos(1.0, None) {
            let a = m as f64 / n1 as f64;
            assert!((0.75..1.25).contains(&a));
        }
        assert!(s.combos(1.0, None).contains(&(6, 6, 0)));
    }

    #[test]
    fn region_selection() {
        let grid = PhaseGrid { spec: spec(), cells: vec![cell(0, 0.5, 0.2), cell(1, 1.0, 0.5), cell(2, 1.5, 0.9)] };
        let r = extract_region(&grid, 0.35, 0.65).unwrap();
        assert_eq!(r.cells.len(), 1);
        assert!(r.contains(1.1, None) && !r.contains(1.3, None));
        assert!(r.admissible_m(6, 0).iter().all(|&m| (5..=7).contains(&m)));
        assert!(matches!(extract_region(&grid, 0.65, 0.35), Err(PhaseError::InvalidBounds { .. })));
    }

    #[test]
    fn csv_round_trip() {
        let grid = PhaseGrid { spec: spec(), cells: vec![cell(0, 0.5, 0.2), cell(1, 1.0, 0.5)] };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("grid.csv");
        write_grid(File::create(&path).unwrap(), &grid).unwrap();
        assert_eq!(load_grid(&path).unwrap(), grid);
        let region = extract_region(&grid, 0.35, 0.65).unwrap();
        let rpath = dir.path().join("region.csv");
        write_region(File::create(&rpath).unwrap(), &region).unwrap();
        assert_eq!(load_region(&rpath).unwrap(), region);
        assert!(load_region(&path).is_err());
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().nth(1).unwrap(), COLUMNS.join(","));
    }
}
