//! Confusion matrices and the accuracy / sensitivity / specificity / PPV / NPV
//! percentages, rendered truncated to two decimals.

use std::fmt::Write as _;

use num_rational::Ratio;
use serde::Serialize;

use crate::classify::{Outcome, Prediction};
use crate::error::{Error, Result};

/// Renders a percentage truncated (not rounded) to two decimals.
pub fn format_truncated(value: Ratio<u64>) -> String {
    let hundredths = (value * Ratio::from_integer(100)).to_integer();
    format!("{}.{:02}", hundredths / 100, hundredths % 100)
}

/// `100 * num / den`, or `None` when `den` is zero.
pub fn percentage(num: u64, den: u64) -> Option<Ratio<u64>> {
    (den != 0).then(|| Ratio::new(100 * num, den))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    /// Class rank treated as positive.
    #[serde(skip)]
    pub positive: usize,
}

impl ConfusionMatrix {
    pub fn new(tp: u64, tn: u64, fp: u64, fn_: u64) -> Self {
        ConfusionMatrix {
            tp,
            tn,
            fp,
            fn_,
            positive: 0,
        }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }

    pub fn correct(&self) -> u64 {
        self.tp + self.tn
    }
}

/// Counts predictions against truth labels. An uncertain prediction counts
/// as an error against the true class: FN for a positive object, FP for a
/// negative one.
pub fn confusion(predictions: &[Prediction], truth: &[usize], positive: usize) -> Result<ConfusionMatrix> {
    if predictions.len() != truth.len() {
        return Err(Error::LengthMismatch {
            predictions: predictions.len(),
            labels: truth.len(),
        });
    }
    let mut cm = ConfusionMatrix {
        positive,
        ..Default::default()
    };
    for (p, &t) in predictions.iter().zip(truth) {
        let actual_positive = t == positive;
        match &p.outcome {
            Outcome::Class(c) => match (*c == positive, actual_positive) {
                (true, true) => cm.tp += 1,
                (false, false) => cm.tn += 1,
                (true, false) => cm.fp += 1,
                (false, true) => cm.fn_ += 1,
            },
            Outcome::Uncertain(_) => {
                if actual_positive {
                    cm.fn_ += 1;
                } else {
                    cm.fp += 1;
                }
            }
        }
    }
    Ok(cm)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Accuracy,
    Sensitivity,
    Specificity,
    Ppv,
    Npv,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::Accuracy,
        Metric::Sensitivity,
        Metric::Specificity,
        Metric::Ppv,
        Metric::Npv,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Metric::Accuracy => "Accuracy (%)",
            Metric::Sensitivity => "Sensitivity (%)",
            Metric::Specificity => "Specificity (%)",
            Metric::Ppv => "Positive Predictive Value (%)",
            Metric::Npv => "Negative Predictive Value",
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            Metric::Accuracy => "accuracy",
            Metric::Sensitivity => "sensitivity",
            Metric::Specificity => "specificity",
            Metric::Ppv => "ppv",
            Metric::Npv => "npv",
        }
    }
}

/// Exact percentages; `None` marks a zero denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetricsReport {
    pub accuracy: Option<Ratio<u64>>,
    pub sensitivity: Option<Ratio<u64>>,
    pub specificity: Option<Ratio<u64>>,
    pub ppv: Option<Ratio<u64>>,
    pub npv: Option<Ratio<u64>>,
}

impl MetricsReport {
    pub fn value(&self, metric: Metric) -> Option<Ratio<u64>> {
        match metric {
            Metric::Accuracy => self.accuracy,
            Metric::Sensitivity => self.sensitivity,
            Metric::Specificity => self.specificity,
            Metric::Ppv => self.ppv,
            Metric::Npv => self.npv,
        }
    }

    pub fn get(&self, metric: Metric) -> Result<Ratio<u64>> {
        self.value(metric).ok_or(Error::UndefinedMetric(metric.label()))
    }

    /// Two-decimal truncated rendering, or `undefined`.
    pub fn formatted(&self, metric: Metric) -> String {
        self.value(metric)
            .map(format_truncated)
            .unwrap_or_else(|| "undefined".to_string())
    }
}

pub fn metrics(cm: &ConfusionMatrix) -> MetricsReport {
    let ConfusionMatrix { tp, tn, fp, fn_, .. } = *cm;
    MetricsReport {
        accuracy: percentage(tp + tn, tp + fp + fn_ + tn),
        sensitivity: percentage(tp, tp + fn_),
        specificity: percentage(tn, fp + tn),
        ppv: percentage(tp, tp + fp),
        npv: percentage(tn, fn_ + tn),
    }
}

/// Confusion counts and metrics, one `label<TAB>value` row each.
pub fn render_metrics_text(cm: &ConfusionMatrix, report: &MetricsReport) -> String {
    let mut out = String::new();
    for (label, v) in [("TP", cm.tp), ("TN", cm.tn), ("FP", cm.fp), ("FN", cm.fn_)] {
        let _ = writeln!(out, "{label}\t{v}");
    }
    for m in Metric::ALL {
        let _ = writeln!(out, "{}\t{}", m.label(), report.formatted(m));
    }
    out
}

pub fn render_metrics_json(cm: &ConfusionMatrix, report: &MetricsReport) -> String {
    let mut metrics = serde_json::Map::new();
    for m in Metric::ALL {
        let v = match report.value(m) {
            Some(r) => serde_json::Value::String(format_truncated(r)),
            None => serde_json::Value::Null,
        };
        metrics.insert(m.key().to_string(), v);
    }
    let doc = serde_json::json!({
        "tp": cm.tp,
        "tn": cm.tn,
        "fp": cm.fp,
        "fn": cm.fn_,
        "metrics": metrics,
    });
    serde_json::to_string_pretty(&doc).expect("metrics serialize")
}
