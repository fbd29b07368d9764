//! Region-based evaluation of a predicted labeling against ground truth.
//!
//! Predicted classes are first matched to ground-truth classes by greedy
//! maximum overlap, which makes every metric invariant under relabeling of
//! the prediction. Precision and recall are macro-averaged over ground-truth
//! classes, with unmatched classes contributing zero, so both label
//! duplication and label dropout cost score.

use crate::error::{Error, Result};
use crate::field::LabelMap;

/// Everything `evaluate` reports.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    pub pixel_accuracy: f64,
    /// `matching[p]` is the ground-truth class paired with predicted class
    /// `p`, or `None` if the class went unmatched.
    pub matching: Vec<Option<usize>>,
}

fn overlap_table(predicted: &LabelMap, truth: &LabelMap) -> Result<Vec<Vec<usize>>> {
    if !predicted.same_shape(truth) {
        return Err(Error::Contract(format!(
            "label map sizes differ: {}x{} vs {}x{}",
            predicted.width(),
            predicted.height(),
            truth.width(),
            truth.height()
        )));
    }
    if predicted.data().is_empty() {
        return Err(Error::InvalidParameter("label maps are empty".into()));
    }
    let np = predicted.max_label().unwrap() as usize + 1;
    let nt = truth.max_label().unwrap() as usize + 1;
    let mut table = vec![vec![0usize; nt]; np];
    for (&p, &t) in predicted.data().iter().zip(truth.data()) {
        table[p as usize][t as usize] += 1;
    }
    Ok(table)
}

/// Maximum-overlap assignment of predicted classes to ground-truth classes:
/// greedily pair the unmatched (predicted, truth) pair with the largest
/// pixel overlap (ties toward lower indices), then exchange partners between
/// pairs while any exchange strictly increases the total overlap. The
/// exchange pass makes the result at least as good as every single swap of
/// its own pairs, which plain greedy does not guarantee.
pub fn match_labels(predicted: &LabelMap, truth: &LabelMap) -> Result<Vec<Option<usize>>> {
    let table = overlap_table(predicted, truth)?;
    let np = table.len();
    let nt = table[0].len();
    let mut matching = vec![None; np];
    let mut pred_used = vec![false; np];
    let mut truth_used = vec![false; nt];
    loop {
        let mut best: Option<(usize, usize, usize)> = None;
        for p in 0..np {
            if pred_used[p] {
                continue;
            }
            for t in 0..nt {
                if truth_used[t] || table[p][t] == 0 {
                    continue;
                }
                if best.map_or(true, |(_, _, o)| table[p][t] > o) {
                    best = Some((p, t, table[p][t]));
                }
            }
        }
        match best {
            Some((p, t, _)) => {
                matching[p] = Some(t);
                pred_used[p] = true;
                truth_used[t] = true;
            }
            None => break,
        }
    }

    let overlap = |p: usize, m: Option<usize>| m.map_or(0, |t| table[p][t]);
    loop {
        let mut best_gain = 0isize;
        let mut best_swap = None;
        for i in 0..np {
            for j in 0..i {
                let now = (overlap(i, matching[i]) + overlap(j, matching[j])) as isize;
                let then = (overlap(i, matching[j]) + overlap(j, matching[i])) as isize;
                if then - now > best_gain {
                    best_gain = then - now;
                    best_swap = Some((i, j));
                }
            }
        }
        match best_swap {
            Some((i, j)) => matching.swap(i, j),
            None => break,
        }
    }
    Ok(matching)
}

/// Match, then score: per matched class, precision `|I| / |pred|` and recall
/// `|I| / |truth|`, macro-averaged over ground-truth classes; pixel accuracy
/// is the matched-pixel fraction.
pub fn evaluate(predicted: &LabelMap, truth: &LabelMap) -> Result<EvalReport> {
    let table = overlap_table(predicted, truth)?;
    let matching = match_labels(predicted, truth)?;
    let nt = table[0].len();
    let total: usize = predicted.data().len();

    let pred_sizes: Vec<usize> = table.iter().map(|row| row.iter().sum()).collect();
    let mut truth_sizes = vec![0usize; nt];
    for row in &table {
        for (t, &o) in row.iter().enumerate() {
            truth_sizes[t] += o;
        }
    }

    let mut precision_sum = 0.0;
    let mut recall_sum = 0.0;
    let mut matched_pixels = 0usize;
    for (p, pair) in matching.iter().enumerate() {
        if let Some(t) = pair {
            let inter = table[p][*t];
            matched_pixels += inter;
            if pred_sizes[p] > 0 {
                precision_sum += inter as f64 / pred_sizes[p] as f64;
            }
            if truth_sizes[*t] > 0 {
                recall_sum += inter as f64 / truth_sizes[*t] as f64;
            }
        }
    }
    // ground-truth classes with no partner contribute zero to both averages
    let n_truth_classes = truth_sizes.iter().filter(|&&s| s > 0).count().max(1);
    let precision = precision_sum / n_truth_classes as f64;
    let recall = recall_sum / n_truth_classes as f64;
    let f_measure = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok(EvalReport {
        precision,
        recall,
        f_measure,
        pixel_accuracy: matched_pixels as f64 / total as f64,
        matching,
    })
}
