//! Labeled dataset construction: region-constrained parameter sampling,
//! labeling, deduplication, label balancing, splitting and serialization,
//! plus zero-shot prompt rendering and dataset statistics.

mod jsonl;
mod prompt;
mod report;

use std::collections::{HashMap, HashSet};
use std::time::Instant;

use log::{debug, info};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use jsonl::{emit_jsonl, load_jsonl, read_jsonl, write_jsonl};
pub use prompt::{read_prompts, write_prompts, zero_shot_prompt, PromptRecord, PromptStyle};
pub use report::{dataset_report, DatasetReport, Histogram, Summary};

use crate::grammar::realize;
use crate::grammar::{parse, sample_sentence_set, FragmentTag, GrammarError, SamplingOptions, Vocabulary};
use crate::logic::{render_fol, translate, LogicError};
use crate::phasemap::{derive_seed, PhaseError, PhaseRegion};
use crate::solver::{model_check, solve, solve_sentences, SolveOptions, SolverError};

#[derive(Debug, Error)]
pub enum DataError {
    #[error("the phase-change region admits no (m, n1, n2) within the configured ranges")]
    RegionEmpty,
    #[error("region is for fragment {found}, configuration for {expected}")]
    RegionMismatch { expected: FragmentTag, found: FragmentTag },
    #[error("could not fill the {label} quota: {have} of {need} after {candidates} candidates")]
    QuotaUnreachable { label: Label, have: usize, need: usize, candidates: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("not enough instances: {needed} {label} needed, {available} available")]
    Insufficient { label: Label, needed: usize, available: usize },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("the true/false prompt style needs a labeled example instance")]
    MissingExample,
    #[error(transparent)]
    Phase(#[from] PhaseError),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Sat,
    Unsat,
}

impl Label {
    pub fn from_bool(sat: bool) -> Label {
        if sat {
            Label::Sat
        } else {
            Label::Unsat
        }
    }

    pub fn is_sat(self) -> bool {
        self == Label::Sat
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(if self.is_sat() { "sat" } else { "unsat" })
    }
}

/// Law of the noun count `n1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum N1Law {
    Uniform,
    /// Normal with mean at the midpoint and σ = range/4, rounded and
    /// truncated to the range.
    DiscretizedNormal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub fragment: FragmentTag,
    pub train: usize,
    pub eval: usize,
    pub test: usize,
    pub n1: (usize, usize),
    pub n2: (usize, usize),
    pub n1_law: N1Law,
    /// Restrict draws to `n1 + n2 == total_n`.
    pub total_n: Option<usize>,
    pub seed: u64,
    /// Allowed deviation of each split's sat fraction from 1/2.
    pub balance_tolerance: f64,
    pub distinct_slots: bool,
    pub node_budget: u64,
    /// Candidates tried per requested instance before giving up.
    pub candidate_factor: usize,
    /// Record solver wall time (makes output machine-dependent).
    pub record_timing: bool,
    pub keep_models: bool,
}

impl GenConfig {
    /// Sampling ranges and laws used for the fragment's training data:
    /// n1 ∈ [6, 16] normal for S/W, n1, n2 ∈ [3, 8] uniform otherwise.
    pub fn new(fragment: FragmentTag, train: usize, eval: usize, test: usize, seed: u64) -> Self {
        let (n1, n2, n1_law) = if fragment.has_verbs() {
            ((3, 8), (3, 8), N1Law::Uniform)
        } else {
            ((6, 16), (0, 0), N1Law::DiscretizedNormal)
        };
        GenConfig {
            fragment,
            train,
            eval,
            test,
            n1,
            n2,
            n1_law,
            total_n: None,
            seed,
            balance_tolerance: 0.01,
            distinct_slots: false,
            node_budget: SolveOptions::default().node_budget,
            candidate_factor: 200,
            record_timing: false,
            keep_models: false,
        }
    }

    pub fn total(&self) -> usize {
        self.train + self.eval + self.test
    }

    pub fn validate(&self) -> Result<(), DataError> {
        let bad = |m: String| Err(DataError::InvalidConfig(m));
        if self.n1.0 == 0 || self.n1.0 > self.n1.1 {
            return bad(format!("n1 range {:?} is empty", self.n1));
        }
        if self.fragment.has_verbs() && (self.n2.0 == 0 || self.n2.0 > self.n2.1) {
            return bad(format!("n2 range {:?} is empty", self.n2));
        }
        if !self.fragment.has_verbs() && self.n2 != (0, 0) {
            return bad(format!("fragment {} takes no verbs", self.fragment));
        }
        if !(0.0..0.5).contains(&self.balance_tolerance) {
            return bad(format!("balance tolerance {} outside [0, 0.5)", self.balance_tolerance));
        }
        if self.candidate_factor == 0 || self.node_budget == 0 {
            return bad("budgets must be positive".into());
        }
        Ok(())
    }

    /// First 16 hex digits of the SHA-256 of the JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(&Sha256::digest(json)[..8])
    }

    fn pairs(&self) -> Vec<(usize, usize)> {
        let n2s: Vec<usize> = if self.fragment.has_verbs() { (self.n2.0..=self.n2.1).collect() } else { vec![0] };
        (self.n1.0..=self.n1.1)
            .flat_map(|a| n2s.iter().map(move |&b| (a, b)))
            .filter(|&(a, b)| self.total_n.is_none_or(|t| a + b == t))
            .collect()
    }
}

/// Per-label quotas of a split of `size` instances.
pub fn label_quota(size: usize) -> (usize, usize) {
    (size - size / 2, size / 2)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledInstance {
    pub id: String,
    pub fragment: FragmentTag,
    pub m: usize,
    pub n1: usize,
    pub n2: usize,
    pub alpha: f64,
    pub beta: Option<f64>,
    pub sentences: Vec<String>,
    pub fol: Vec<String>,
    pub label: Label,
    pub seed: u64,
    pub solver_ms: Option<f64>,
    /// Element-major true atoms of a model (see `Structure::element_atoms`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<Vec<Vec<String>>>,
}

impl LabeledInstance {
    /// Order-insensitive identity used for deduplication.
    pub fn key(&self) -> Vec<String> {
        let mut k = self.sentences.clone();
        k.sort();
        k
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenStats {
    pub candidates: usize,
    pub timeouts: usize,
    pub duplicates: usize,
    /// Labeled candidates whose label quota was already full.
    pub surplus: usize,
    /// Draws whose (n1, n2) admitted no region m.
    pub inadmissible: usize,
}

enum Candidate {
    Labeled(Box<LabeledInstance>),
    Timeout,
    Inadmissible,
}

struct Generator<'a> {
    config: &'a GenConfig,
    vocab: &'a Vocabulary,
    pairs: Vec<(usize, usize)>,
    admissible: HashMap<(usize, usize), Vec<usize>>,
}

impl Generator<'_> {
    fn draw_n1<R: Rng>(&self, rng: &mut R) -> usize {
        let (lo, hi) = self.config.n1;
        match self.config.n1_law {
            N1Law::Uniform => rng.random_range(lo..=hi),
            N1Law::DiscretizedNormal => {
                let mean = (lo + hi) as f64 / 2.0;
                let sd = ((hi - lo) as f64 / 4.0).max(f64::MIN_POSITIVE);
                let normal = Normal::new(mean, sd).expect("valid normal");
                loop {
                    let x = normal.sample(rng).round();
                    if x >= lo as f64 && x <= hi as f64 {
                        return x as usize;
                    }
                }
            }
        }
    }

    fn draw_pair<R: Rng>(&self, rng: &mut R) -> (usize, usize) {
        if self.config.total_n.is_some() {
            // uniform over the pairs with the requested sum
            return self.pairs[rng.random_range(0..self.pairs.len())];
        }
        let n1 = self.draw_n1(rng);
        let n2 =
            if self.config.fragment.has_verbs() { rng.random_range(self.config.n2.0..=self.config.n2.1) } else { 0 };
        (n1, n2)
    }

    fn candidate(&self, seed: u64) -> Result<Candidate, DataError> {
        let c = self.config;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (n1, n2) = self.draw_pair(&mut rng);
        let ms = &self.admissible[&(n1, n2)];
        if ms.is_empty() {
            return Ok(Candidate::Inadmissible);
        }
        let m = ms[rng.random_range(0..ms.len())];
        let subset = self.vocab.sample_subset(n1, n2, &mut rng)?;
        let options = SamplingOptions { distinct_slots: c.distinct_slots, ..SamplingOptions::default() };
        let abstract_sentences = match sample_sentence_set(c.fragment, &subset, m, options, &mut rng) {
            Ok(s) => s,
            Err(GrammarError::SetTooLarge { .. }) => return Ok(Candidate::Inadmissible),
            Err(e) => return Err(e.into()),
        };
        let formulas = abstract_sentences.iter().map(|s| translate(s, self.vocab)).collect::<Result<Vec<_>, _>>()?;
        let sentences = abstract_sentences.iter().map(|s| realize(s, self.vocab)).collect::<Result<Vec<_>, _>>()?;
        let opts = SolveOptions { node_budget: c.node_budget, wall_budget: None, ..SolveOptions::default() };
        let start = Instant::now();
        let verdict = solve(c.fragment, &formulas, &opts)?;
        let elapsed = start.elapsed().as_secs_f64() * 1e3;
        let Some(sat) = verdict.label() else {
            return Ok(Candidate::Timeout);
        };
        let model = if c.keep_models { verdict.certificate().map(|cert| cert.structure.element_atoms()) } else { None };
        Ok(Candidate::Labeled(Box::new(LabeledInstance {
            id: String::new(),
            fragment: c.fragment,
            m,
            n1,
            n2,
            alpha: m as f64 / n1 as f64,
            beta: (n2 > 0).then(|| m as f64 / n2 as f64),
            sentences,
            fol: formulas.iter().map(render_fol).collect(),
            label: Label::from_bool(sat),
            seed,
            solver_ms: c.record_timing.then_some(elapsed),
            model,
        })))
    }
}

/// Candidates evaluated per parallel batch; fixed so that results do not
/// depend on the worker count.
const BATCH: usize = 256;

/// Generates `config.total()` unique, labeled instances inside `region`,
/// with each label's count equal to the sum of the splits' quotas.
/// Instances are returned in acceptance order with ids `<fragment>-<index>`.
pub fn generate_dataset(
    config: &GenConfig,
    region: &PhaseRegion,
    vocab: &Vocabulary,
) -> Result<(Vec<LabeledInstance>, GenStats), DataError> {
    config.validate()?;
    if region.fragment != config.fragment {
        return Err(DataError::RegionMismatch { expected: config.fragment, found: region.fragment });
    }
    let pairs = config.pairs();
    let admissible: HashMap<(usize, usize), Vec<usize>> =
        pairs.iter().map(|&(a, b)| ((a, b), region.admissible_m(a, b))).collect();
    if admissible.values().all(Vec::is_empty) {
        return Err(DataError::RegionEmpty);
    }
    let gen = Generator { config, vocab, pairs, admissible };
    let mut need = [0usize; 2];
    for size in [config.train, config.eval, config.test] {
        let (s, u) = label_quota(size);
        need[0] += s;
        need[1] += u;
    }
    let mut have = [0usize; 2];
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(config.total());
    let mut stats = GenStats::default();
    let cap = config.candidate_factor.saturating_mul(config.total().max(1));
    let mut next = 0usize;
    while have != need {
        if next >= cap {
            let l = if have[0] < need[0] { 0 } else { 1 };
            return Err(DataError::QuotaUnreachable {
                label: if l == 0 { Label::Sat } else { Label::Unsat },
                have: have[l],
                need: need[l],
                candidates: next,
            });
        }
        let batch: Vec<Result<Candidate, DataError>> = (next..next + BATCH)
            .into_par_iter()
            .map(|i| gen.candidate(derive_seed(config.seed, &[i as u64])))
            .collect();
        next += BATCH;
        for cand in batch {
            if have == need {
                break;
            }
            stats.candidates += 1;
            match cand? {
                Candidate::Timeout => stats.timeouts += 1,
                Candidate::Inadmissible => stats.inadmissible += 1,
                Candidate::Labeled(mut inst) => {
                    let l = usize::from(!inst.label.is_sat());
                    if have[l] == need[l] {
                        stats.surplus += 1;
                    } else if !seen.insert(inst.key()) {
                        stats.duplicates += 1;
                    } else {
                        debug_assert!(region.contains(inst.alpha, inst.beta));
                        inst.id = format!("{}-{:06}", config.fragment, out.len());
                        have[l] += 1;
                        out.push(*inst);
                    }
                }
            }
        }
        debug!("{} candidates: {} sat, {} unsat accepted", stats.candidates, have[0], have[1]);
    }
    info!(
        "{}: {} instances from {} candidates ({} timeouts, {} duplicates)",
        config.fragment,
        out.len(),
        stats.candidates,
        stats.timeouts,
        stats.duplicates
    );
    Ok((out, stats))
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Splits {
    pub train: Vec<LabeledInstance>,
    pub eval: Vec<LabeledInstance>,
    pub test: Vec<LabeledInstance>,
}

impl Splits {
    pub fn iter(&self) -> impl Iterator<Item = (&'static str, &[LabeledInstance])> {
        [("train", &self.train[..]), ("eval", &self.eval[..]), ("test", &self.test[..])].into_iter()
    }
}

/// Disjoint, label-balanced splits of the given sizes. Duplicate instances
/// are dropped first; membership and order depend only on `seed`.
pub fn split_dataset(
    instances: &[LabeledInstance],
    sizes: (usize, usize, usize),
    seed: u64,
) -> Result<Splits, DataError> {
    let mut seen = HashSet::new();
    let mut pools: [Vec<&LabeledInstance>; 2] = [Vec::new(), Vec::new()];
    for inst in instances {
        if seen.insert(inst.key()) {
            pools[usize::from(!inst.label.is_sat())].push(inst);
        } else {
            debug!("dropping duplicate instance {}", inst.id);
        }
    }
    let quotas: Vec<(usize, usize)> = [sizes.0, sizes.1, sizes.2].into_iter().map(label_quota).collect();
    for (l, label) in [Label::Sat, Label::Unsat].into_iter().enumerate() {
        let needed: usize = quotas.iter().map(|q| if l == 0 { q.0 } else { q.1 }).sum();
        if needed > pools[l].len() {
            return Err(DataError::Insufficient { label, needed, available: pools[l].len() });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[u64::MAX, l as u64]));
        pools[l].shuffle(&mut rng);
    }
    let mut taken = [0usize; 2];
    let mut parts: Vec<Vec<LabeledInstance>> = Vec::new();
    for (k, &(s, u)) in quotas.iter().enumerate() {
        let mut part: Vec<LabeledInstance> = pools[0][taken[0]..taken[0] + s]
            .iter()
            .chain(&pools[1][taken[1]..taken[1] + u])
            .map(|&i| i.clone())
            .collect();
        taken[0] += s;
        taken[1] += u;
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[u64::MAX - 1, k as u64]));
        part.shuffle(&mut rng);
        parts.push(part);
    }
    let test = parts.pop().expect("three parts");
    let eval = parts.pop().expect("three parts");
    let train = parts.pop().expect("three parts");
    Ok(Splits { train, eval, test })
}

/// Generates and splits according to `config`.
pub fn build_dataset(
    config: &GenConfig,
    region: &PhaseRegion,
    vocab: &Vocabulary,
) -> Result<(Splits, GenStats), DataError> {
    let (instances, stats) = generate_dataset(config, region, vocab)?;
    let splits = split_dataset(&instances, (config.train, config.eval, config.test), config.seed)?;
    Ok((splits, stats))
}

/// Zero-shot evaluation layout: for each total predicate count
/// n = n1 + n2, `per_n` instances (half per label). S/W use n1 ∈ [5, 10];
/// V/Z/A use n1 ∈ [3, 5], n2 ∈ [2, 5]. Six values of n, so 1200 instances
/// per fragment at `per_n = 200`.
pub fn zero_shot_dataset(
    fragment: FragmentTag,
    region: &PhaseRegion,
    vocab: &Vocabulary,
    per_n: usize,
    seed: u64,
) -> Result<Vec<LabeledInstance>, DataError> {
    let mut base = GenConfig::new(fragment, per_n, 0, 0, seed);
    if fragment.has_verbs() {
        base.n1 = (3, 5);
        base.n2 = (2, 5);
    } else {
        base.n1 = (5, 10);
    }
    base.n1_law = N1Law::Uniform;
    let mut out = Vec::new();
    for n in 5..=10 {
        let config = GenConfig { total_n: Some(n), seed: derive_seed(seed, &[n as u64]), ..base.clone() };
        let (mut instances, _) = generate_dataset(&config, region, vocab)?;
        for (i, inst) in instances.iter_mut().enumerate() {
            inst.id = format!("{fragment}-zs-n{n}-{i:04}");
        }
        out.extend(instances);
    }
    Ok(out)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub instances: usize,
    pub models_checked: usize,
    pub resolved: usize,
    pub label_mismatches: Vec<String>,
    pub bad_models: Vec<String>,
    pub outside_region: Vec<String>,
    pub duplicates: Vec<String>,
}

impl VerifyReport {
    pub fn is_clean(&self) -> bool {
        self.label_mismatches.is_empty()
            && self.bad_models.is_empty()
            && self.outside_region.is_empty()
            && self.duplicates.is_empty()
    }
}

/// Re-checks stored models, re-solves every `resolve_every`-th instance from
/// its surface sentences, and checks region containment and uniqueness.
pub fn verify_instances(
    instances: &[LabeledInstance],
    region: Option<&PhaseRegion>,
    vocab: &Vocabulary,
    resolve_every: usize,
) -> Result<VerifyReport, DataError> {
    let mut report = VerifyReport { instances: instances.len(), ..VerifyReport::default() };
    let mut seen = HashSet::new();
    for (i, inst) in instances.iter().enumerate() {
        if !seen.insert(inst.key()) {
            report.duplicates.push(inst.id.clone());
        }
        if region.is_some_and(|r| !r.contains(inst.alpha, inst.beta)) {
            report.outside_region.push(inst.id.clone());
        }
        let formulas = inst.fol.iter().map(|f| crate::logic::parse_fol(f)).collect::<Result<Vec<_>, _>>()?;
        if let Some(atoms) = &inst.model {
            report.models_checked += 1;
            let sig = crate::logic::Signature::from_formulas(&formulas);
            let ok = crate::solver::Structure::from_element_atoms(sig, atoms)
                .ok()
                .map(|s| model_check(&s, &formulas))
                .transpose()?
                .unwrap_or(false);
            if !ok {
                report.bad_models.push(inst.id.clone());
            }
        }
        if resolve_every > 0 && i % resolve_every == 0 {
            report.resolved += 1;
            let sentences =
                inst.sentences.iter().map(|s| parse(s, inst.fragment, vocab)).collect::<Result<Vec<_>, _>>()?;
            let opts = SolveOptions { wall_budget: None, ..SolveOptions::default() };
            let verdict = solve_sentences(inst.fragment, &sentences, vocab, &opts)?;
            if verdict.label() != Some(inst.label.is_sat()) {
                report.label_mismatches.push(inst.id.clone());
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phasemap::{extract_region, map_region, Axis, GridSpec, Sampler};

    pub(crate) fn s_region() -> PhaseRegion {
        let spec = GridSpec {
            fragment: FragmentTag::S,
            alpha: Axis::new(0.5, 4.0, 0.5),
            beta: None,
            n1: (6, 10),
            n2: (0, 0),
            samples: 40,
            seed: 1,
        };
        let grid = map_region(&spec, &Sampler::default()).unwrap();
        extract_region(&grid, 0.2, 0.8).unwrap()
    }

    #[test]
    fn generation_is_balanced_unique_and_reproducible() {
        let region = s_region();
        assert!(!region.is_empty());
        let vocab = Vocabulary::default_english();
        let mut config = GenConfig::new(FragmentTag::S, 30, 6, 6, 42);
        config.n1 = (6, 10);
        let (a, stats) = generate_dataset(&config, &region, &vocab).unwrap();
        assert_eq!(a.len(), 42);
        assert_eq!(a.iter().filter(|i| i.label.is_sat()).count(), 21);
        assert!(stats.candidates >= 42);
        let (b, _) = generate_dataset(&config, &region, &vocab).unwrap();
        assert_eq!(a, b);
        let report = verify_instances(&a, Some(&region), &vocab, 1).unwrap();
        assert!(report.is_clean(), "{report:?}");
        let splits = split_dataset(&a, (30, 6, 6), 42).unwrap();
        assert_eq!((splits.train.len(), splits.eval.len(), splits.test.len()), (30, 6, 6));
        assert_eq!(splits.train.iter().filter(|i| i.label.is_sat()).count(), 15);
        assert_eq!(splits.test.iter().filter(|i| i.label.is_sat()).count(), 3);
        assert_eq!(split_dataset(&a, (30, 6, 6), 42).unwrap(), splits);
    }

    #[test]
    fn split_rejects_duplicates_and_shortfalls() {
        let region = s_region();
        let vocab = Vocabulary::default_english();
        let mut config = GenConfig::new(FragmentTag::S, 14, 0, 0, 3);
        config.n1 = (6, 10);
        let (mut a, _) = generate_dataset(&config, &region, &vocab).unwrap();
        let splits = split_dataset(&a, (10, 2, 2), 9).unwrap();
        let ids: HashSet<&str> = splits.iter().flat_map(|(_, s)| s.iter().map(|i| i.id.as_str())).collect();
        assert_eq!(ids.len(), 14);
        a.push(a[0].clone());
        assert!(matches!(split_dataset(&a, (10, 2, 4), 9), Err(DataError::Insufficient { .. })));
        assert_eq!(split_dataset(&a, (10, 2, 2), 9).unwrap(), splits);
    }

    #[test]
    fn region_mismatch_and_emptiness() {
        let region = s_region();
        let vocab = Vocabulary::default_english();
        let config = GenConfig::new(FragmentTag::W, 4, 0, 0, 3);
        assert!(matches!(generate_dataset(&config, &region, &vocab), Err(DataError::RegionMismatch { .. })));
        let empty = PhaseRegion { cells: Vec::new(), ..region };
        let config = GenConfig::new(FragmentTag::S, 4, 0, 0, 3);
        assert!(matches!(generate_dataset(&config, &empty, &vocab), Err(DataError::RegionEmpty)));
    }
}
