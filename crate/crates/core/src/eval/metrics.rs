use alloc::collections::BTreeMap;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Averaging {
    #[default]
    Micro,
    Macro,
}

impl fmt::Display for Averaging {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Averaging::Micro => "micro",
            Averaging::Macro => "macro",
        })
    }
}

impl FromStr for Averaging {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "micro" => Ok(Averaging::Micro),
            "macro" => Ok(Averaging::Macro),
            other => Err(Error::InvalidArgument(alloc::format!(
                "unknown averaging {other:?} (expected micro or macro)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LabelCounts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

/// Per-label true positives, false positives and false negatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionCounts<L: Ord> {
    pub per_label: BTreeMap<L, LabelCounts>,
    pub total: usize,
}

impl<L: Ord + Clone> ConfusionCounts<L> {
    pub fn from_pairs(y_true: &[L], y_pred: &[L]) -> Result<Self> {
        if y_true.len() != y_pred.len() {
            return Err(Error::DimensionMismatch {
                context: "predictions",
                expected: y_true.len(),
                actual: y_pred.len(),
            });
        }
        let mut per_label: BTreeMap<L, LabelCounts> = BTreeMap::new();
        for (t, p) in y_true.iter().zip(y_pred) {
            if t == p {
                per_label.entry(t.clone()).or_default().tp += 1;
            } else {
                per_label.entry(t.clone()).or_default().fn_ += 1;
                per_label.entry(p.clone()).or_default().fp += 1;
            }
        }
        Ok(Self {
            per_label,
            total: y_true.len(),
        })
    }

    pub fn correct(&self) -> usize {
        self.per_label.values().map(|c| c.tp).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub averaging: Averaging,
}

impl MetricsReport {
    /// Field-wise mean of several reports sharing one averaging mode.
    pub fn mean(reports: &[MetricsReport]) -> Result<MetricsReport> {
        let first = reports.first().ok_or_else(|| Error::InvalidArgument("no reports to average".into()))?;
        let n = reports.len() as f64;
        let avg = |f: fn(&MetricsReport) -> f64| reports.iter().map(f).sum::<f64>() / n;
        Ok(MetricsReport {
            accuracy: avg(|r| r.accuracy),
            precision: avg(|r| r.precision),
            recall: avg(|r| r.recall),
            f1: avg(|r| r.f1),
            averaging: first.averaging,
        })
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn f1(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

pub fn classification_metrics<L: Ord + Clone>(y_true: &[L], y_pred: &[L], averaging: Averaging) -> Result<MetricsReport> {
    if y_true.is_empty() {
        return Err(Error::InvalidArgument("metrics need at least one example".into()));
    }
    let counts = ConfusionCounts::from_pairs(y_true, y_pred)?;
    Ok(metrics_from_counts(&counts, averaging))
}

pub fn metrics_from_counts<L: Ord>(counts: &ConfusionCounts<L>, averaging: Averaging) -> MetricsReport {
    let correct: usize = counts.per_label.values().map(|c| c.tp).sum();
    let accuracy = ratio(correct, counts.total);
    let (precision, recall, f1_score) = match averaging {
        Averaging::Micro => {
            let fp: usize = counts.per_label.values().map(|c| c.fp).sum();
            let fn_: usize = counts.per_label.values().map(|c| c.fn_).sum();
            let p = ratio(correct, correct + fp);
            let r = ratio(correct, correct + fn_);
            (p, r, f1(p, r))
        }
        Averaging::Macro => {
            let n = counts.per_label.len().max(1) as f64;
            let mut sums = (0.0, 0.0, 0.0);
            for c in counts.per_label.values() {
                let p = ratio(c.tp, c.tp + c.fp);
                let r = ratio(c.tp, c.tp + c.fn_);
                sums.0 += p;
                sums.1 += r;
                sums.2 += f1(p, r);
            }
            (sums.0 / n, sums.1 / n, sums.2 / n)
        }
    };
    MetricsReport {
        accuracy,
        precision,
        recall,
        f1: f1_score,
        averaging,
    }
}

/// Fraction of positions where `y_pred` equals `y_true`.
pub fn accuracy<L: PartialEq>(y_true: &[L], y_pred: &[L]) -> f64 {
    let correct = y_true.iter().zip(y_pred).filter(|(t, p)| t == p).count();
    ratio(correct, y_true.len())
}
