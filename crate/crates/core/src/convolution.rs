//! The renewal recursion `y_i = a_i sum_{j<i} K(i-j) b_j y_j`, `y_0 = 1`.
//!
//! Values are kept in linear scale relative to a running log offset, which is
//! moved whenever the newest entry leaves `[1e-100, 1e100]`. Each step is one
//! fixed-order dot product against the reversed weight vector, so the result
//! is bit-reproducible. The returned table is `log y_i`.

use crate::numeric::dot;

const RESCALE_HIGH: f64 = 1e100;
const RESCALE_LOW: f64 = 1e-100;
/// Stored entries are never pushed above this when scaling up.
const SAFE_MAX: f64 = 1e250;

/// Solve the recursion for `i = 0..=N` with `N = weights.len() - 1`.
///
/// `weights[n] = K(n)` (entry 0 is ignored); `log_pre[i] = log a_i` and
/// `log_post[j] = log b_j` must have length `N + 1`.
pub(crate) fn renewal_recursion(weights: &[f64], log_pre: &[f64], log_post: &[f64]) -> Vec<f64> {
    let n = weights.len() - 1;
    debug_assert_eq!(log_pre.len(), n + 1);
    debug_assert_eq!(log_post.len(), n + 1);
    let krev: Vec<f64> = (0..n).map(|i| weights[n - i]).collect();
    // entries further back than the last nonzero weight never contribute again
    let support = weights.iter().rposition(|w| *w > 0.0).unwrap_or(0).max(1);
    let mut stored = vec![0.0f64; n + 1];
    let mut logs = vec![f64::NEG_INFINITY; n + 1];
    let mut offset = 0.0f64;
    logs[0] = 0.0;
    stored[0] = log_post[0].exp();
    for i in 1..=n {
        let s = dot(&stored[..i], &krev[n - i..]);
        if s <= 0.0 {
            continue;
        }
        let log_y = log_pre[i] + s.ln() + offset;
        logs[i] = log_y;
        let log_entry = log_post[i] + log_y;
        let mut entry = (log_entry - offset).exp();
        if entry > RESCALE_HIGH || (entry < RESCALE_LOW && entry > 0.0) {
            let shift = log_entry - offset;
            let factor = (-shift).exp();
            let live = (i + 1).saturating_sub(support);
            stored[..live].fill(0.0);
            let peak = stored[live..i].iter().fold(0.0f64, |m, v| m.max(*v));
            if shift > 0.0 || peak * factor <= SAFE_MAX {
                for v in &mut stored[live..i] {
                    *v *= factor;
                }
                offset += shift;
                entry = 1.0;
            }
        }
        stored[i] = entry;
    }
    logs
}
