use serde::Serialize;

use crate::convolution::renewal_recursion;
use crate::error::{invalid, Result};
use crate::kernel::InterArrivalLaw;
use crate::numeric::log_sum_exp;

use super::disorder::DisorderSample;

/// `log Z^c_{n,omega}` for `n = 0..=N` and the free value `log Z^f_{N,omega}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogPartitionTable {
    pub log_zc: Vec<f64>,
    pub log_zf: f64,
}

impl LogPartitionTable {
    pub fn horizon(&self) -> usize {
        self.log_zc.len() - 1
    }

    pub fn log_zc_end(&self) -> f64 {
        self.log_zc[self.horizon()]
    }
}

/// Precomputed weights for repeated solves at a fixed size.
#[derive(Debug, Clone)]
pub struct QuenchedSolver {
    n: usize,
    weights: Vec<f64>,
    log_survival: Vec<f64>,
}

impl QuenchedSolver {
    pub fn new(law: &InterArrivalLaw, n: usize) -> Self {
        QuenchedSolver {
            n,
            weights: law.weights(n),
            log_survival: law.survival_table(n).iter().map(|s| s.ln()).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// `log Z^c_n`, `n = 0..=N`, from `log_xi = [_, log xi_1, ..., log xi_N]`.
    pub fn constrained(&self, log_xi: &[f64]) -> Vec<f64> {
        debug_assert_eq!(log_xi.len(), self.n + 1);
        let post = vec![0.0; self.n + 1];
        renewal_recursion(&self.weights, log_xi, &post)
    }

    /// `log Z^f_N = log sum_n Z^c_n P(tau_1 > N - n)`.
    pub fn free(&self, log_zc: &[f64]) -> f64 {
        let n = self.n;
        let terms: Vec<f64> = (0..=n).map(|m| log_zc[m] + self.log_survival[n - m]).collect();
        log_sum_exp(&terms)
    }

    pub fn solve(&self, log_xi: &[f64]) -> LogPartitionTable {
        let log_zc = self.constrained(log_xi);
        let log_zf = self.free(&log_zc);
        LogPartitionTable { log_zc, log_zf }
    }

    /// `log` of the partition function over `[m, N]` with contacts forced at
    /// both ends, for `m = 0..=N`.
    pub fn suffix(&self, log_xi: &[f64]) -> Vec<f64> {
        let n = self.n;
        debug_assert_eq!(log_xi.len(), n + 1);
        let pre = vec![0.0; n + 1];
        let post: Vec<f64> = (0..=n).map(|j| log_xi[n - j]).collect();
        let mut w = renewal_recursion(&self.weights, &pre, &post);
        w.reverse();
        w
    }
}

/// Quenched partition functions for one disorder realization.
pub fn log_partition(law: &InterArrivalLaw, disorder: &DisorderSample, n: usize) -> Result<LogPartitionTable> {
    if n < 1 {
        return Err(invalid("n", "must be at least 1"));
    }
    if disorder.len() < n {
        return Err(invalid(
            "disorder",
            format!("has {} charges but size {n} was requested", disorder.len()),
        ));
    }
    Ok(QuenchedSolver::new(law, n).solve(&disorder.log_xi(n)))
}
