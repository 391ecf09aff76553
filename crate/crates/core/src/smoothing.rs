//! Rare-stretch estimates and a numerical check of the quadratic smoothing bound.
//!
//! A block of length `ell` is a success when its constrained partition
//! function satisfies `log Z^c_ell >= a ell F(beta, h + delta)`. Shifting the
//! block charges by `delta / beta` makes success typical at a relative-entropy
//! cost `ell delta^2 / (2 beta^2)`.

use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, PinError, Result};
use crate::kernel::InterArrivalLaw;
use crate::numeric::mean_and_std_error;
use crate::quenched::{free_energy_mc, log_xi, sample_disorder, QuenchedSolver, MAX_SIZE};
use crate::rng::{replica_map, stream, Domain};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RareStretchConfig {
    pub ell: usize,
    pub a: f64,
    pub delta: f64,
    pub beta: f64,
    pub h: f64,
    pub replicas: usize,
}

impl RareStretchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ell < 1 || self.ell > MAX_SIZE {
            return Err(invalid("ell", format!("must lie in [1, {MAX_SIZE}], got {}", self.ell)));
        }
        if !(self.a > 0.0 && self.a < 1.0) {
            return Err(invalid("a", format!("must lie strictly in (0, 1), got {}", self.a)));
        }
        if !(self.delta > 0.0) {
            return Err(invalid("delta", format!("must be positive, got {}", self.delta)));
        }
        if !(self.beta > 0.0) {
            return Err(invalid("beta", format!("must be positive, got {}", self.beta)));
        }
        if !self.h.is_finite() {
            return Err(invalid("h", "must be finite"));
        }
        if self.replicas < 2 {
            return Err(invalid("replicas", format!("must be at least 2, got {}", self.replicas)));
        }
        Ok(())
    }

    /// `ell delta^2 / (2 beta^2)`.
    pub fn relative_entropy(&self) -> f64 {
        self.ell as f64 * self.delta * self.delta / (2.0 * self.beta * self.beta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RareStretchEstimate {
    /// `F(beta, h + delta)` used in the success threshold.
    pub f_shifted: f64,
    /// `a ell F(beta, h + delta)`.
    pub threshold: f64,
    /// Plain Monte Carlo success frequency.
    pub p_ell: f64,
    pub std_error: f64,
    pub successes: usize,
    /// Likelihood-ratio estimate from shifted blocks.
    pub p_importance: f64,
    pub std_error_importance: f64,
    /// Success frequency under the shifted law.
    pub p_shifted: f64,
    /// `exp(-ell delta^2 / (2 beta^2))`.
    pub entropy_floor: f64,
    /// `p_shifted exp(-(H + 1/e) / p_shifted)`, a lower bound on `p_ell`.
    pub entropy_bound: f64,
}

/// Estimate the block success probability. `f_shifted` is `F(beta, h + delta)`;
/// it is estimated at size `8 ell` when not supplied.
pub fn rare_stretch_prob(
    law: &InterArrivalLaw,
    cfg: &RareStretchConfig,
    f_shifted: Option<f64>,
    seed: u64,
) -> Result<RareStretchEstimate> {
    cfg.validate()?;
    let f = match f_shifted {
        Some(f) => f,
        None => {
            let size = (8 * cfg.ell).min(MAX_SIZE);
            free_energy_mc(law, cfg.beta, cfg.h + cfg.delta, size, cfg.replicas, seed)?.value
        }
    };
    if !(f > 0.0) {
        return Err(PinError::IllPosed(format!(
            "F(beta, h + delta) = {f} is not positive; the success event is ill-posed"
        )));
    }
    let ell = cfg.ell;
    let threshold = cfg.a * ell as f64 * f;
    let solver = QuenchedSolver::new(law, ell);
    let block_log_z = |omega: &[f64]| solver.constrained(&log_xi(omega, cfg.beta, cfg.h))[ell];

    let naive: Vec<f64> = replica_map(cfg.replicas, |r| {
        let omega = sample_disorder(seed, r, ell);
        f64::from(u8::from(block_log_z(&omega) >= threshold))
    });
    let successes = naive.iter().filter(|&&y| y > 0.0).count();
    let (p_ell, std_error) = mean_and_std_error(&naive);

    let mu = cfg.delta / cfg.beta;
    let shifted: Vec<(f64, f64)> = replica_map(cfg.replicas, |r| {
        let mut rng = stream(seed, Domain::Importance, r);
        let omega: Vec<f64> = (0..ell).map(|_| rng.sample::<f64, _>(StandardNormal) + mu).collect();
        if block_log_z(&omega) < threshold {
            return (0.0, 0.0);
        }
        let sum: f64 = omega.iter().sum();
        (1.0, (-mu * sum + 0.5 * ell as f64 * mu * mu).exp())
    });
    let hits: Vec<f64> = shifted.iter().map(|s| s.0).collect();
    let weights: Vec<f64> = shifted.iter().map(|s| s.1).collect();
    let (p_shifted, _) = mean_and_std_error(&hits);
    let (p_importance, std_error_importance) = mean_and_std_error(&weights);
    let entropy = cfg.relative_entropy();
    let entropy_bound = if p_shifted > 0.0 {
        p_shifted * (-(entropy + (-1.0f64).exp()) / p_shifted).exp()
    } else {
        0.0
    };
    Ok(RareStretchEstimate {
        f_shifted: f,
        threshold,
        p_ell,
        std_error,
        successes,
        p_importance,
        std_error_importance,
        p_shifted,
        entropy_floor: (-entropy).exp(),
        entropy_bound,
    })
}

/// Success indicators along one disorder stream cut into non-overlapping blocks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapStatistics {
    pub blocks: usize,
    pub successes: usize,
    pub p_hat: f64,
    /// Number of failures between consecutive successes.
    pub gaps: Vec<u64>,
    pub mean_gap: f64,
    pub mean_gap_se: f64,
    /// `(1 - p_hat) / p_hat`.
    pub geometric_mean_gap: f64,
    /// Fraction of zero gaps, expected `p_hat`.
    pub zero_gap_fraction: f64,
}

pub fn geometric_gaps(
    law: &InterArrivalLaw,
    cfg: &RareStretchConfig,
    f_shifted: f64,
    blocks: usize,
    seed: u64,
) -> Result<GapStatistics> {
    cfg.validate()?;
    if blocks < 2 {
        return Err(invalid("blocks", "must be at least 2"));
    }
    let ell = cfg.ell;
    let threshold = cfg.a * ell as f64 * f_shifted;
    let solver = QuenchedSolver::new(law, ell);
    let omega = sample_disorder(seed, 0, blocks * ell);
    let y: Vec<bool> = replica_map(blocks, |j| {
        let j = j as usize;
        let block = &omega[j * ell..(j + 1) * ell];
        solver.constrained(&log_xi(block, cfg.beta, cfg.h))[ell] >= threshold
    });
    let hits: Vec<usize> = y.iter().enumerate().filter(|(_, s)| **s).map(|(i, _)| i).collect();
    let gaps: Vec<u64> = hits.windows(2).map(|w| (w[1] - w[0] - 1) as u64).collect();
    let gap_values: Vec<f64> = gaps.iter().map(|&g| g as f64).collect();
    let (mean_gap, mean_gap_se) = if gaps.is_empty() {
        (f64::NAN, f64::INFINITY)
    } else {
        mean_and_std_error(&gap_values)
    };
    let p_hat = hits.len() as f64 / blocks as f64;
    Ok(GapStatistics {
        blocks,
        successes: hits.len(),
        p_hat,
        mean_gap,
        mean_gap_se,
        geometric_mean_gap: (1.0 - p_hat) / p_hat,
        zero_gap_fraction: if gaps.is_empty() {
            f64::NAN
        } else {
            gaps.iter().filter(|&&g| g == 0).count() as f64 / gaps.len() as f64
        },
        gaps,
    })
}

/// `E[log K(G ell)]` for `G` geometric on `{0, 1, ...}` with success
/// probability `p`, using `K(0) = 1`.
pub fn expected_log_gap_weight(law: &InterArrivalLaw, p: f64, ell: usize) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(invalid("p", format!("must lie in (0, 1], got {p}")));
    }
    // terms beyond (1-p)^k < e^-60 are dropped
    let k_max = ((60.0 / p).ceil() as u64).min(50_000_000);
    let q = 1.0 - p;
    let mut acc = 0.0;
    let mut weight = p;
    for k in 1..=k_max {
        weight *= q;
        if weight == 0.0 {
            break;
        }
        let kv = law.k(k * ell as u64);
        if kv <= 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        acc += weight * kv.ln();
    }
    Ok(acc)
}

/// Rare-stretch lower bound `a p F(beta, h + delta) + (p / ell) E[log K(G ell)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RareStretchBound {
    pub p: f64,
    pub f_shifted: f64,
    pub expected_log_gap: f64,
    pub lower_bound: f64,
}

pub fn rare_stretch_lower_bound(
    law: &InterArrivalLaw,
    a: f64,
    ell: usize,
    p: f64,
    f_shifted: f64,
) -> Result<RareStretchBound> {
    let expected_log_gap = expected_log_gap_weight(law, p, ell)?;
    Ok(RareStretchBound {
        p,
        f_shifted,
        expected_log_gap,
        lower_bound: a * p * f_shifted + p / ell as f64 * expected_log_gap,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothingVerdict {
    /// `F - 3 se` exceeds the bound.
    Violation,
    /// `F + 3 se` is within the bound.
    Ok,
    /// The bound lies inside the error bar.
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothingRow {
    pub delta: f64,
    pub delta_prime: f64,
    pub h: f64,
    pub f_mc: f64,
    pub std_error: f64,
    pub bound: f64,
    pub verdict: SmoothingVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmoothingReport {
    pub alpha: f64,
    pub beta: f64,
    pub hc_left: f64,
    pub hc_right: f64,
    pub n: usize,
    pub replicas: usize,
    pub rows: Vec<SmoothingRow>,
}

impl SmoothingReport {
    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| r.verdict == SmoothingVerdict::Violation).count()
    }
}

/// Compare `F(beta, right + delta)` with `(1 + alpha) delta'^2 / beta^2`,
/// `delta' = delta + (right - left)`.
#[allow(clippy::too_many_arguments)]
pub fn smoothing_check(
    law: &InterArrivalLaw,
    beta: f64,
    hc_bracket: (f64, f64),
    delta_grid: &[f64],
    n: usize,
    replicas: usize,
    seed: u64,
) -> Result<SmoothingReport> {
    let alpha = law
        .alpha()
        .filter(|_| law.has_heavy_tail())
        .ok_or_else(|| PinError::Unsupported("smoothing bound needs a power-law tail".into()))?;
    if !(beta > 0.0) {
        return Err(invalid("beta", format!("must be positive, got {beta}")));
    }
    let (left, right) = hc_bracket;
    if !(right >= left) {
        return Err(invalid("hc_bracket", format!("right end {right} is below left end {left}")));
    }
    let width = right - left;
    let mut rows = Vec::with_capacity(delta_grid.len());
    for &delta in delta_grid {
        if !(delta > 0.0) {
            return Err(invalid("delta_grid", format!("entries must be positive, got {delta}")));
        }
        let h = right + delta;
        let est = free_energy_mc(law, beta, h, n, replicas, seed)?;
        let delta_prime = delta + width;
        let bound = (1.0 + alpha) * delta_prime * delta_prime / (beta * beta);
        let (f, se) = (est.value, est.std_error);
        let verdict = if f - 3.0 * se > bound {
            SmoothingVerdict::Violation
        } else if f + 3.0 * se <= bound {
            SmoothingVerdict::Ok
        } else {
            SmoothingVerdict::Inconclusive
        };
        rows.push(SmoothingRow {
            delta,
            delta_prime,
            h,
            f_mc: f,
            std_error: se,
            bound,
            verdict,
        });
    }
    Ok(SmoothingReport {
        alpha,
        beta,
        hc_left: left,
        hc_right: right,
        n,
        replicas,
        rows,
    })
}
