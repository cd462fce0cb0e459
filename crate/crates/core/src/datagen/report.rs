//! Split statistics: sizes and token counts, label balance, parameter and
//! quantifier-ratio histograms.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{DataError, LabeledInstance};
use crate::grammar::FragmentTag;
use crate::logic::parse_fol;
use crate::phasemap::{instance_stats, InstanceStats};

const BIN: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

impl Summary {
    fn of(values: impl IntoIterator<Item = f64>) -> Summary {
        let (mut min, mut max, mut sum, mut n) = (f64::INFINITY, f64::NEG_INFINITY, 0.0, 0usize);
        for v in values {
            min = min.min(v);
            max = max.max(v);
            sum += v;
            n += 1;
        }
        if n == 0 {
            return Summary { min: 0.0, max: 0.0, mean: 0.0 };
        }
        Summary { min, max, mean: sum / n as f64 }
    }
}

/// Fixed-width bins keyed by their lower edge; `undefined` counts values
/// that do not exist (e.g. a ratio with no universal quantifier).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub width: f64,
    pub bins: Vec<(f64, usize)>,
    pub undefined: usize,
}

impl Histogram {
    fn of(values: impl IntoIterator<Item = Option<f64>>) -> Histogram {
        let mut bins: BTreeMap<i64, usize> = BTreeMap::new();
        let mut undefined = 0;
        for v in values {
            match v {
                Some(v) => *bins.entry((v / BIN + 1e-9).floor() as i64).or_default() += 1,
                None => undefined += 1,
            }
        }
        Histogram { width: BIN, bins: bins.into_iter().map(|(k, c)| (k as f64 * BIN, c)).collect(), undefined }
    }

    pub fn total(&self) -> usize {
        self.bins.iter().map(|b| b.1).sum::<usize>() + self.undefined
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FragmentReport {
    pub fragment: FragmentTag,
    pub count: usize,
    pub sat: usize,
    pub m: Summary,
    /// Space-separated words per instance.
    pub tokens: Summary,
    pub alpha: Histogram,
    pub beta: Option<Histogram>,
    /// #∃ / #∀ over all quantifiers, subject and object positions.
    pub ratio_all: Histogram,
    pub ratio_subject: Histogram,
    pub ratio_object: Option<Histogram>,
}

impl FragmentReport {
    pub fn sat_fraction(&self) -> f64 {
        self.sat as f64 / self.count.max(1) as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetReport {
    pub fragments: Vec<FragmentReport>,
}

pub fn dataset_report(instances: &[LabeledInstance]) -> Result<DatasetReport, DataError> {
    let mut groups: BTreeMap<FragmentTag, Vec<(&LabeledInstance, InstanceStats)>> = BTreeMap::new();
    for inst in instances {
        let formulas = inst.fol.iter().map(|f| parse_fol(f)).collect::<Result<Vec<_>, _>>()?;
        let stats = instance_stats(inst.fragment, &formulas, &inst.sentences, inst.n1, inst.n2);
        groups.entry(inst.fragment).or_default().push((inst, stats));
    }
    let fragments = groups
        .into_iter()
        .map(|(fragment, items)| {
            let verbs = fragment.has_verbs();
            FragmentReport {
                fragment,
                count: items.len(),
                sat: items.iter().filter(|(i, _)| i.label.is_sat()).count(),
                m: Summary::of(items.iter().map(|(i, _)| i.m as f64)),
                tokens: Summary::of(items.iter().map(|(_, s)| s.tokens as f64)),
                alpha: Histogram::of(items.iter().map(|(i, _)| Some(i.alpha))),
                beta: verbs.then(|| Histogram::of(items.iter().map(|(i, _)| i.beta))),
                ratio_all: Histogram::of(items.iter().map(|(_, s)| s.quantifier_ratio())),
                ratio_subject: Histogram::of(items.iter().map(|(_, s)| s.subject_ratio())),
                ratio_object: verbs.then(|| Histogram::of(items.iter().map(|(_, s)| s.object_ratio()))),
            }
        })
        .collect();
    Ok(DatasetReport { fragments })
}

impl DatasetReport {
    fn histograms(f: &FragmentReport) -> Vec<(&'static str, &Histogram)> {
        let mut h = vec![("alpha", &f.alpha)];
        h.extend(f.beta.as_ref().map(|b| ("beta", b)));
        h.push(("ratio_all", &f.ratio_all));
        h.push(("ratio_subject", &f.ratio_subject));
        h.extend(f.ratio_object.as_ref().map(|b| ("ratio_object", b)));
        h
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<8} {:>7} {:>7} {:>6} {:>6} {:>8} {:>7} {:>7} {:>8}",
            "fragment", "count", "sat%", "m_min", "m_max", "m_mean", "tok_min", "tok_max", "tok_mean"
        );
        for f in &self.fragments {
            let _ = writeln!(
                out,
                "{:<8} {:>7} {:>7.2} {:>6} {:>6} {:>8.2} {:>7} {:>7} {:>8.2}",
                f.fragment.to_string(),
                f.count,
                100.0 * f.sat_fraction(),
                f.m.min,
                f.m.max,
                f.m.mean,
                f.tokens.min,
                f.tokens.max,
                f.tokens.mean
            );
        }
        for f in &self.fragments {
            for (name, h) in Self::histograms(f) {
                let _ = writeln!(out, "\n{} {name}", f.fragment);
                for (lo, c) in &h.bins {
                    let _ = writeln!(out, "  [{:>6.2}, {:>6.2})  {:>7}", lo, lo + h.width, c);
                }
                if h.undefined > 0 {
                    let _ = writeln!(out, "  {:<16}  {:>7}", "undefined", h.undefined);
                }
            }
        }
        out
    }

    /// Long format: `fragment,metric,key,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("fragment,metric,key,value\n");
        for f in &self.fragments {
            let frag = f.fragment;
            let _ = writeln!(out, "{frag},count,,{}", f.count);
            let _ = writeln!(out, "{frag},sat,,{}", f.sat);
            for (name, s) in [("m", f.m), ("tokens", f.tokens)] {
                let _ = writeln!(out, "{frag},{name},min,{}", s.min);
                let _ = writeln!(out, "{frag},{name},max,{}", s.max);
                let _ = writeln!(out, "{frag},{name},mean,{}", s.mean);
            }
            for (name, h) in Self::histograms(f) {
                for (lo, c) in &h.bins {
                    let _ = writeln!(out, "{frag},{name},{lo},{c}");
                }
                if h.undefined > 0 {
                    let _ = writeln!(out, "{frag},{name},undefined,{}", h.undefined);
                }
            }
        }
        out
    }
}
