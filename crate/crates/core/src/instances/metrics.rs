use crate::error::{Error, Result};

/// `|best / optimal - 1| * 100`.
pub fn primal_gap(best: f64, optimal: f64) -> Result<f64> {
    if optimal == 0.0 {
        return Err(Error::invalid("primal gap is undefined for a zero optimum"));
    }
    Ok((best / optimal - 1.0).abs() * 100.0)
}

/// Average precision of `scores` against 0/1 `labels`.
///
/// Items are ranked by descending score. Items sharing a score form one
/// block: every positive in the block is credited with the precision
/// measured at the end of the block, so the result does not depend on how
/// ties are ordered.
pub fn average_precision(scores: &[f64], labels: &[u8]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::DimensionMismatch { expected: scores.len(), found: labels.len() });
    }
    let total_pos = labels.iter().filter(|&&l| l == 1).count();
    if total_pos == 0 {
        return Err(Error::invalid("average precision needs at least one positive label"));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::NonFinite("scores"));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut ap = 0.0;
    let mut seen = 0usize;
    let mut hits = 0usize;
    let mut start = 0;
    while start < order.len() {
        let s = scores[order[start]];
        let mut end = start;
        let mut block_pos = 0;
        while end < order.len() && scores[order[end]] == s {
            block_pos += usize::from(labels[order[end]] == 1);
            end += 1;
        }
        seen += end - start;
        hits += block_pos;
        ap += block_pos as f64 * hits as f64 / seen as f64;
        start = end;
    }
    Ok(ap / total_pos as f64)
}
