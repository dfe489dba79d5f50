//! Confusion counts and the per-positive-class metrics derived from them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

impl Confusion {
    pub fn new(tp: usize, fp: usize, fn_: usize, tn: usize) -> Self {
        Confusion { tp, fp, fn_, tn }
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn record(&mut self, truth: bool, predicted: bool) {
        match (truth, predicted) {
            (true, true) => self.tp += 1,
            (false, true) => self.fp += 1,
            (true, false) => self.fn_ += 1,
            (false, false) => self.tn += 1,
        }
    }

    pub fn add(&mut self, other: &Confusion) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.fn_ += other.fn_;
        self.tn += other.tn;
    }
}

/// Ratios with a zero denominator are `None`, never 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMetrics {
    pub accuracy: f64,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f_measure: Option<f64>,
    pub tp_rate: Option<f64>,
    pub fp_rate: Option<f64>,
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn confusion_metrics(c: &Confusion) -> Result<ConfusionMetrics> {
    let total = c.total();
    if total == 0 {
        return Err(Error::InvalidArgument("empty confusion matrix".into()));
    }
    let precision = ratio(c.tp, c.tp + c.fp);
    let recall = ratio(c.tp, c.tp + c.fn_);
    let f_measure = match (precision, recall) {
        (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
        _ => None,
    };
    Ok(ConfusionMetrics {
        accuracy: (c.tp + c.tn) as f64 / total as f64,
        precision,
        recall,
        f_measure,
        tp_rate: recall,
        fp_rate: ratio(c.fp, c.fp + c.tn),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccuracyBand {
    VeryGood,
    Good,
    Okay,
    BelowPracticalThreshold,
}

impl AccuracyBand {
    /// Band of an accuracy given in percent.
    pub fn of(pct: f64) -> Self {
        if pct > 90.0 {
            AccuracyBand::VeryGood
        } else if pct >= 70.0 {
            AccuracyBand::Good
        } else if pct >= 60.0 {
            AccuracyBand::Okay
        } else {
            AccuracyBand::BelowPracticalThreshold
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            AccuracyBand::VeryGood => "very good",
            AccuracyBand::Good => "good",
            AccuracyBand::Okay => "okay",
            AccuracyBand::BelowPracticalThreshold => "below practical threshold",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_only_counts() {
        let m = confusion_metrics(&Confusion::new(0, 0, 0, 100)).unwrap();
        assert_eq!(m.accuracy, 1.0);
        assert_eq!(m.precision, None);
        assert_eq!(m.recall, None);
        assert_eq!(m.fp_rate, Some(0.0));
        assert!(confusion_metrics(&Confusion::default()).is_err());
    }

    #[test]
    fn bands() {
        assert_eq!(AccuracyBand::of(79.73).label(), "good");
        assert_eq!(AccuracyBand::of(64.48).label(), "okay");
        assert_eq!(AccuracyBand::of(100.0).label(), "very good");
        assert_eq!(AccuracyBand::of(90.0).label(), "good");
        assert_eq!(AccuracyBand::of(59.9).label(), "below practical threshold");
    }
}
