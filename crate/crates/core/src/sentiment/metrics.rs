use super::Label;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassMetrics {
    pub label: Label,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    /// Rows are gold labels, columns predictions, both in `Label::ALL` order.
    pub confusion: [[usize; 3]; 3],
    pub per_class: [ClassMetrics; 3],
    pub weighted_f1: f64,
    pub accuracy: f64,
}

/// Per-class precision/recall/F1 and the support-weighted F1.
///
/// A zero denominator yields 0 for that quantity, so a class absent from
/// both inputs has F1 = 0 and support 0.
pub fn classification_report(predictions: &[Label], gold: &[Label]) -> Result<ClassificationReport> {
    if predictions.len() != gold.len() {
        return Err(Error::LengthMismatch {
            left: predictions.len(),
            right: gold.len(),
        });
    }
    if gold.is_empty() {
        return Err(Error::Empty("classification inputs"));
    }
    let mut confusion = [[0usize; 3]; 3];
    for (p, g) in predictions.iter().zip(gold) {
        confusion[g.index()][p.index()] += 1;
    }
    let per_class = Label::ALL.map(|label| {
        let c = label.index();
        let tp = confusion[c][c];
        let predicted: usize = (0..3).map(|r| confusion[r][c]).sum();
        let support: usize = confusion[c].iter().sum();
        let precision = ratio(tp, predicted);
        let recall = ratio(tp, support);
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        ClassMetrics {
            label,
            precision,
            recall,
            f1,
            support,
        }
    });
    let total = gold.len() as f64;
    let weighted_f1 = per_class
        .iter()
        .map(|m| m.support as f64 * m.f1)
        .sum::<f64>()
        / total;
    let correct: usize = (0..3).map(|c| confusion[c][c]).sum();
    Ok(ClassificationReport {
        confusion,
        per_class,
        weighted_f1,
        accuracy: correct as f64 / total,
    })
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}
