use serde::Serialize;

use crate::error::{invalid, Result};
use crate::homogeneous::hc0;
use crate::kernel::InterArrivalLaw;
use crate::numeric::mean_and_std_error;

use super::estimate::{check_size, log_zc_samples};

/// One grid point of a critical scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub h: f64,
    /// Replica mean of `log Z^c_N`.
    pub mean_log_z: f64,
    pub std_error: f64,
    pub localized: bool,
}

/// Bracket on `h_c(beta)` from a finite-volume scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalScan {
    pub beta: f64,
    pub n: usize,
    pub replicas: usize,
    pub threshold_sigmas: f64,
    pub hc_ann: f64,
    pub hc0: f64,
    pub left: f64,
    /// Smallest grid `h` detected as localized; `None` for a one-sided bracket.
    pub right: Option<f64>,
    pub rows: Vec<ScanRow>,
}

impl CriticalScan {
    pub fn width(&self) -> Option<f64> {
        self.right.map(|r| r - self.left)
    }
}

/// Scan `h_grid` with common random numbers. `certified_left` (a point known
/// to be delocalized) may raise the left end above `hc_ann`.
#[allow(clippy::too_many_arguments)]
pub fn critical_scan(
    law: &InterArrivalLaw,
    beta: f64,
    h_grid: &[f64],
    n: usize,
    replicas: usize,
    threshold_sigmas: f64,
    seed: u64,
    certified_left: Option<f64>,
) -> Result<CriticalScan> {
    if h_grid.is_empty() {
        return Err(invalid("h_grid", "must not be empty"));
    }
    if h_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("h_grid", "must be strictly increasing"));
    }
    if replicas < 2 {
        return Err(invalid("replicas", format!("must be at least 2, got {replicas}")));
    }
    check_size(n)?;
    let hc_ann = hc0(law) - 0.5 * beta * beta;
    let mut rows = Vec::with_capacity(h_grid.len());
    let mut right = None;
    for &h in h_grid {
        let samples: Vec<f64> = log_zc_samples(law, beta, h, n, replicas, seed, &[n])
            .into_iter()
            .map(|r| r[0])
            .collect();
        let (mean, se) = if beta == 0.0 {
            (samples[0], 0.0)
        } else {
            mean_and_std_error(&samples)
        };
        let localized = mean > threshold_sigmas * se;
        rows.push(ScanRow {
            h,
            mean_log_z: mean,
            std_error: se,
            localized,
        });
        if localized {
            right = Some(h);
            break;
        }
    }
    let left = certified_left.map_or(hc_ann, |c| c.max(hc_ann));
    Ok(CriticalScan {
        beta,
        n,
        replicas,
        threshold_sigmas,
        hc_ann,
        hc0: hc0(law),
        left,
        right,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::DEFAULT_TAIL_TOL;

    #[test]
    fn homogeneous_scan_contains_critical_point() {
        let law = InterArrivalLaw::power_law(0.5, 0.0, 64, DEFAULT_TAIL_TOL).unwrap();
        let grid: Vec<f64> = (0..20).map(|i| -0.1 + 0.02 * i as f64).collect();
        let scan = critical_scan(&law, 0.0, &grid, 1024, 2, 3.0, 1, None).unwrap();
        let right = scan.right.unwrap();
        assert!(scan.left <= 0.0 && right > 0.0);
        assert!(right < 0.3);
    }
}
