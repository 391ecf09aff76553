use serde::Serialize;

use crate::error::{invalid, PinError, Result};
use crate::homogeneous::{contact_fraction, free_at_end, free_energy_value, hc0, partition, Boundary};
use crate::kernel::{intersection_law, intersection_stats, InterArrivalLaw};
use crate::rng::replica_map;

use super::disorder::{log_xi, sample_disorder};
use super::estimate::check_size;
use super::partition::QuenchedSolver;

/// Mean and variance of `exp(l_i)` computed in a shifted log domain.
#[derive(Debug, Clone, Copy, PartialEq)]
struct LinearMoments {
    mean: f64,
    variance: f64,
    variance_se: f64,
}

fn linear_moments(logs: &[f64]) -> LinearMoments {
    let shift = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let z: Vec<f64> = logs.iter().map(|l| (l - shift).exp()).collect();
    let n = z.len() as f64;
    let mean = z.iter().sum::<f64>() / n;
    let m2 = z.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let m4 = z.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    let variance = m2 * n / (n - 1.0);
    let scale = (2.0 * shift).exp();
    LinearMoments {
        mean: mean * shift.exp(),
        variance: variance * scale,
        variance_se: ((m4 - m2 * m2).max(0.0) / n).sqrt() * scale,
    }
}

/// Variance of `Z^f_N` at the annealed critical point `h = -beta^2/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VarianceReport {
    pub beta: f64,
    pub n: usize,
    pub replicas: usize,
    pub mc_mean: f64,
    pub mc_variance: f64,
    pub mc_std_error: f64,
    /// `exp(beta^2 |tau cap tau' cap [1,N]|) - 1` averaged exactly.
    pub exact_finite_n: f64,
    pub gamma2: Option<f64>,
    pub beta0: Option<f64>,
    /// `p2 / (1 - (1 - p2) e^{beta^2}) - 1`, `None` when the limit diverges.
    pub analytic_limit: Option<f64>,
}

/// `E^{x2}[exp(c |tau cap tau' cap [1,N]|)] - 1` via the intersection law.
fn overlap_moment(law: &InterArrivalLaw, c: f64, n: usize) -> Result<f64> {
    if c == 0.0 {
        return Ok(0.0);
    }
    let k2 = intersection_law(law, n)?;
    let zc = partition(&k2, c, n, Boundary::Constrained);
    Ok(free_at_end(&k2, &zc).exp_m1())
}

/// `(gamma2, beta0)` when the intersection renewal is terminating.
fn intersection_constants(law: &InterArrivalLaw, n: usize) -> Result<(Option<f64>, Option<f64>)> {
    let st = intersection_stats(law, n)?;
    let beta0 = st.gamma2.map(|g| ((1.0 + g) / g).ln().sqrt());
    Ok((st.gamma2, beta0))
}

fn geometric_limit(gamma2: f64, c: f64) -> Option<f64> {
    let p2 = 1.0 / (1.0 + gamma2);
    let denom = 1.0 - (1.0 - p2) * c.exp();
    (denom > 0.0).then(|| p2 / denom - 1.0)
}

pub fn variance_at_annealed_critical(
    law: &InterArrivalLaw,
    beta: f64,
    n: usize,
    replicas: usize,
    seed: u64,
) -> Result<VarianceReport> {
    if !law.is_persistent() {
        return Err(PinError::NotPersistent {
            k_infinity: law.k_infinity(),
        });
    }
    if replicas < 2 {
        return Err(invalid("replicas", format!("must be at least 2, got {replicas}")));
    }
    check_size(n)?;
    let h = -0.5 * beta * beta;
    let solver = QuenchedSolver::new(law, n);
    let logs = replica_map(replicas, |r| {
        let omega = sample_disorder(seed, r, n);
        solver.solve(&log_xi(&omega, beta, h)).log_zf
    });
    let mom = linear_moments(&logs);
    let (gamma2, beta0) = intersection_constants(law, n)?;
    let analytic_limit = gamma2.and_then(|g| geometric_limit(g, beta * beta));
    Ok(VarianceReport {
        beta,
        n,
        replicas,
        mc_mean: mom.mean,
        mc_variance: if beta == 0.0 { 0.0 } else { mom.variance },
        mc_std_error: if beta == 0.0 { 0.0 } else { mom.variance_se },
        exact_finite_n: overlap_moment(law, beta * beta, n)?,
        gamma2,
        beta0,
        analytic_limit,
    })
}

/// Second-moment diagnostics on the scale `N0 = q / F(0, delta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecondMomentWindow {
    pub beta: f64,
    pub delta: f64,
    pub q: f64,
    pub n0: usize,
    pub f0: f64,
    /// `E Z^f_{N0}` (exact, homogeneous at pinning `delta`).
    pub mean_exact: f64,
    pub mean_mc: f64,
    /// `var(Z^f_{N0}) / (E Z^f_{N0})^2` from the replicas.
    pub ratio_mc: f64,
    pub ratio_se: f64,
    /// Homogeneous free partition function at pinning `2 delta` over `N0`.
    pub t1: f64,
    /// Square root of the pair-overlap moment with `2 beta^2` at `N0`.
    pub t2: f64,
    /// `N0 -> inf` value of `t2` when the intersection renewal is terminating.
    pub t2_limit: Option<f64>,
    pub bound: f64,
    pub epsilon: f64,
    /// Empirical `P(Z^f >= (1 - epsilon) E Z^f)`.
    pub prob_above: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn second_moment_window(
    law: &InterArrivalLaw,
    beta: f64,
    delta: f64,
    q: f64,
    replicas: usize,
    seed: u64,
    epsilon: f64,
) -> Result<SecondMomentWindow> {
    if !law.is_persistent() {
        return Err(PinError::NotPersistent {
            k_infinity: law.k_infinity(),
        });
    }
    if !(delta > 0.0) {
        return Err(PinError::IllPosed(format!("F(0, delta) = 0 for delta = {delta}")));
    }
    if !(q > 0.0) {
        return Err(invalid("q", format!("must be positive, got {q}")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(invalid("epsilon", format!("must lie in (0, 1), got {epsilon}")));
    }
    if replicas < 2 {
        return Err(invalid("replicas", format!("must be at least 2, got {replicas}")));
    }
    let f0 = free_energy_value(law, delta)?;
    if f0 <= 0.0 {
        return Err(PinError::IllPosed(format!("F(0, delta) = 0 for delta = {delta}")));
    }
    let n0 = ((q / f0).round() as usize).max(1);
    check_size(n0)?;
    let zc = partition(law, delta, n0, Boundary::Constrained);
    let mean_exact = free_at_end(law, &zc).exp();
    let zc2 = partition(law, 2.0 * delta, n0, Boundary::Constrained);
    let t1 = free_at_end(law, &zc2).exp();
    let t2 = overlap_moment(law, 2.0 * beta * beta, n0)?.max(0.0).sqrt();
    let (gamma2, _) = intersection_constants(law, n0)?;
    let t2_limit = gamma2
        .and_then(|g| geometric_limit(g, 2.0 * beta * beta))
        .map(f64::sqrt);

    let h = delta - 0.5 * beta * beta;
    let solver = QuenchedSolver::new(law, n0);
    let logs = replica_map(replicas, |r| {
        let omega = sample_disorder(seed, r, n0);
        solver.solve(&log_xi(&omega, beta, h)).log_zf
    });
    let mom = linear_moments(&logs);
    let threshold = ((1.0 - epsilon) * mean_exact).ln();
    let above = logs.iter().filter(|&&l| l >= threshold).count();
    Ok(SecondMomentWindow {
        beta,
        delta,
        q,
        n0,
        f0,
        mean_exact,
        mean_mc: mom.mean,
        ratio_mc: mom.variance / (mean_exact * mean_exact),
        ratio_se: mom.variance_se / (mean_exact * mean_exact),
        t1,
        t2,
        t2_limit,
        bound: t1 * t2,
        epsilon,
        prob_above: above as f64 / replicas as f64,
    })
}

/// Second-order expansion of `F(beta, h_c^ann + delta)` around the annealed system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlnoPrediction {
    pub f0: f64,
    pub derivative: f64,
    /// `F(0, delta) - (e^{beta^2} - 1)/2 (dF)^2`.
    pub prediction: f64,
    /// `F(0, delta) - beta^2/2 (dF)^2`.
    pub prediction_simplified: f64,
    pub correction_simplified: f64,
}

pub fn flno_prediction(law: &InterArrivalLaw, beta: f64, delta: f64) -> Result<FlnoPrediction> {
    if !(delta > 0.0) {
        return Err(invalid("delta", format!("must be positive, got {delta}")));
    }
    let h = hc0(law) + delta;
    let f0 = free_energy_value(law, h)?;
    let d = contact_fraction(law, h)?.value;
    let correction_simplified = 0.5 * beta * beta * d * d;
    Ok(FlnoPrediction {
        f0,
        derivative: d,
        prediction: f0 - 0.5 * (beta * beta).exp_m1() * d * d,
        prediction_simplified: f0 - correction_simplified,
        correction_simplified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::DEFAULT_TAIL_TOL;

    #[test]
    fn zero_coupling_has_no_variance() {
        let law = InterArrivalLaw::power_law(0.3, 0.0, 64, DEFAULT_TAIL_TOL).unwrap();
        let rep = variance_at_annealed_critical(&law, 0.0, 128, 4, 3).unwrap();
        assert_eq!(rep.mc_variance, 0.0);
        assert_eq!(rep.exact_finite_n, 0.0);
        assert_eq!(rep.analytic_limit, Some(0.0));
        assert!((rep.mc_mean - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_overlap_moment_by_enumeration() {
        // two independent renewals with K = [0.5, 0.5], N = 3, all paths enumerated
        let law = InterArrivalLaw::explicit(vec![0.5, 0.5], 0.0).unwrap();
        let sets = |n: usize| -> Vec<(f64, Vec<usize>)> {
            // first-passage compositions, free end
            let mut out = Vec::new();
            fn rec(pos: usize, n: usize, p: f64, pts: Vec<usize>, out: &mut Vec<(f64, Vec<usize>)>) {
                out.push((p * if pos + 1 > n { 1.0 } else { survival(n - pos) }, pts.clone()));
                for step in 1..=2usize {
                    if pos + step <= n {
                        let mut q = pts.clone();
                        q.push(pos + step);
                        rec(pos + step, n, p * 0.5, q, out);
                    }
                }
            }
            fn survival(m: usize) -> f64 {
                // P(tau_1 > m) for K = [0.5, 0.5]
                match m {
                    0 => 1.0,
                    1 => 0.5,
                    _ => 0.0,
                }
            }
            rec(0, n, 1.0, vec![], &mut out);
            out
        };
        let c = 0.7f64;
        let all = sets(3);
        let mut expect = 0.0;
        for (p, a) in &all {
            for (q, b) in &all {
                let common = a.iter().filter(|x| b.contains(x)).count();
                expect += p * q * (c * common as f64).exp();
            }
        }
        let got = overlap_moment(&law, c, 3).unwrap();
        assert!((got - (expect - 1.0)).abs() < 1e-12, "{got} vs {}", expect - 1.0);
    }

    #[test]
    fn flno_without_disorder() {
        let law = InterArrivalLaw::power_law(0.3, 0.0, 64, DEFAULT_TAIL_TOL).unwrap();
        let p = flno_prediction(&law, 0.0, 0.1).unwrap();
        assert_eq!(p.prediction, p.f0);
    }
}
