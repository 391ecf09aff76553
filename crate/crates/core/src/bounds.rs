//! Fractional-moment delocalization certificates.
//!
//! With `A_j = E[(Z^c_j)^gamma]`, the iterated renewal inequality gives
//! `A_N <= rho max(A_0, ..., A_{k-1})` where
//!
//! ```text
//! rho = E[xi^gamma] sum_{j<k} A_j T_gamma(k - 1 - j),   T_gamma(r) = sum_{m>r} K(m)^gamma.
//! ```
//!
//! `rho <= 1` forces `F(beta, h) = 0`. The simple certificate is the case
//! `k = 1`, `A_0 = 1`. Inputs `A_j` are either provable upper bounds
//! (rigorous grade) or Monte Carlo means plus three standard errors
//! (statistical grade).

use serde::{Deserialize, Serialize};

use crate::error::{invalid, PinError, Result};
use crate::homogeneous::{free_energy_value, hc0, partition, Boundary};
use crate::kernel::{InterArrivalLaw, LawRecord};
use crate::quenched::{sample_disorder, QuenchedSolver, MAX_SIZE};
use crate::quenched::log_xi;
use crate::rng::replica_map;
use rayon::prelude::*;

/// Certified iff `rho (1 + 1e-12) <= 1 - SAFETY_MARGIN`.
pub const SAFETY_MARGIN: f64 = 1e-9;
/// Default search grid for the fractional exponent.
pub const GAMMA_GRID: [f64; 4] = [0.6, 0.7, 0.8, 0.9];
/// Number of shift values tried per rigorous bound.
const SHIFT_GRID_POINTS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    Simple,
    Iterated,
    Shifted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grade {
    /// Every input is a closed form or a provable upper bound.
    Rigorous,
    /// Fractional moments replaced by Monte Carlo mean plus three standard errors.
    Statistical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    CertifiedDelocalized,
    Inconclusive,
}

/// Evidence for one `A_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentEvidence {
    pub j: usize,
    pub mc_mean: Option<f64>,
    pub mc_std_error: Option<f64>,
    /// `(E Z^c_j)^gamma`.
    pub annealed_bound: f64,
    /// Best Gaussian-shift bound, when computed.
    pub shifted_bound: Option<f64>,
    /// Value entering `rho`.
    pub used: f64,
    /// `E[xi^gamma] A_j T_gamma(k - 1 - j)`.
    pub contribution: f64,
}

/// Polynomial-decay spot check `A_N <= max_{j<k} A_j` at `N = 2k, 4k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpotCheck {
    pub n: usize,
    pub mc_mean: f64,
    pub mc_std_error: f64,
    pub reference: f64,
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub grade: Grade,
    pub gamma: f64,
    pub k: usize,
    pub rho: f64,
    pub verdict: Verdict,
    pub law: Option<LawRecord>,
    pub beta: f64,
    pub h: f64,
    pub xi_moment: f64,
    /// `j` with the largest contribution to `rho`.
    pub dominant_j: usize,
    pub a_estimates: Vec<MomentEvidence>,
    pub spot_checks: Vec<SpotCheck>,
}

impl Certificate {
    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::CertifiedDelocalized
    }
}

pub fn verdict(rho: f64) -> Verdict {
    if rho * (1.0 + 1e-12) <= 1.0 - SAFETY_MARGIN {
        Verdict::CertifiedDelocalized
    } else {
        Verdict::Inconclusive
    }
}

/// `E[xi^gamma] = exp(gamma h + gamma^2 beta^2 / 2)`.
pub fn xi_moment(beta: f64, h: f64, gamma: f64) -> f64 {
    (gamma * h + 0.5 * gamma * gamma * beta * beta).exp()
}

fn check_gamma(law: &InterArrivalLaw, gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(invalid("gamma", format!("must lie strictly in (0, 1), got {gamma}")));
    }
    if let Some(alpha) = law.alpha().filter(|_| law.has_heavy_tail()) {
        if (1.0 + alpha) * gamma <= 1.0 {
            return Err(PinError::IllPosed(format!(
                "sum K(n)^gamma diverges for gamma = {gamma} <= 1/(1 + alpha)"
            )));
        }
    }
    Ok(())
}

/// `rho` for given `A_0..A_{k-1}` together with per-`j` contributions.
fn rho_from_moments(law: &InterArrivalLaw, beta: f64, h: f64, gamma: f64, a: &[f64]) -> (f64, Vec<f64>) {
    let k = a.len();
    let xi = xi_moment(beta, h, gamma);
    let tails = law.power_tail_table(gamma, k - 1);
    let contributions: Vec<f64> = a
        .iter()
        .enumerate()
        .map(|(j, aj)| xi * aj * tails[k - 1 - j])
        .collect();
    let rho = contributions.iter().sum::<f64>();
    (rho, contributions)
}

/// Assemble a certificate from fractional-moment inputs `evidence[j].used`.
#[allow(clippy::too_many_arguments)]
fn assemble(
    law: &InterArrivalLaw,
    kind: CertificateKind,
    grade: Grade,
    beta: f64,
    h: f64,
    gamma: f64,
    mut evidence: Vec<MomentEvidence>,
    spot_checks: Vec<SpotCheck>,
) -> Certificate {
    let a: Vec<f64> = evidence.iter().map(|e| e.used).collect();
    let (rho, contributions) = rho_from_moments(law, beta, h, gamma, &a);
    for (e, c) in evidence.iter_mut().zip(&contributions) {
        e.contribution = *c;
    }
    let dominant_j = contributions
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (j, &c)| if c > best.1 { (j, c) } else { best })
        .0;
    Certificate {
        kind,
        grade,
        gamma,
        k: a.len(),
        rho,
        verdict: verdict(rho),
        law: law.to_record().ok(),
        beta,
        h,
        xi_moment: xi_moment(beta, h, gamma),
        dominant_j,
        a_estimates: evidence,
        spot_checks,
    }
}

/// `rho = E[xi^gamma] sum_n K(n)^gamma`.
pub fn simple_certificate(law: &InterArrivalLaw, beta: f64, h: f64, gamma: f64) -> Result<Certificate> {
    check_gamma(law, gamma)?;
    let evidence = vec![MomentEvidence {
        j: 0,
        mc_mean: None,
        mc_std_error: None,
        annealed_bound: 1.0,
        shifted_bound: None,
        used: 1.0,
        contribution: 0.0,
    }];
    Ok(assemble(
        law,
        CertificateKind::Simple,
        Grade::Rigorous,
        beta,
        h,
        gamma,
        evidence,
        Vec::new(),
    ))
}

/// Largest `h` certified by the simple test at this `gamma`, from the closed form.
pub fn simple_threshold(law: &InterArrivalLaw, beta: f64, gamma: f64) -> Result<f64> {
    check_gamma(law, gamma)?;
    let log_sum = law.power_sum(gamma).ln();
    // gamma h + gamma^2 beta^2/2 + log sum = log(1 - margin)
    Ok(((1.0 - SAFETY_MARGIN).ln() - log_sum - 0.5 * gamma * gamma * beta * beta) / gamma)
}

/// Monte Carlo fractional moments `A_j(gamma)` for `j = 0..=j_max` and several `gamma`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FractionalMoments {
    pub beta: f64,
    pub h: f64,
    pub replicas: usize,
    pub gammas: Vec<f64>,
    /// `mean[g][j]`.
    pub mean: Vec<Vec<f64>>,
    pub std_error: Vec<Vec<f64>>,
}

impl FractionalMoments {
    pub fn j_max(&self) -> usize {
        self.mean[0].len() - 1
    }

    fn gamma_index(&self, gamma: f64) -> Option<usize> {
        self.gammas.iter().position(|g| *g == gamma)
    }
}

/// Estimate `A_j(gamma)` from `replicas` disorder samples.
pub fn fractional_moments(
    law: &InterArrivalLaw,
    beta: f64,
    h: f64,
    gammas: &[f64],
    j_max: usize,
    replicas: usize,
    seed: u64,
) -> Result<FractionalMoments> {
    if replicas < 2 {
        return Err(invalid("replicas", format!("must be at least 2, got {replicas}")));
    }
    if j_max > MAX_SIZE {
        return Err(PinError::ResourceLimit(format!("j_max = {j_max} exceeds {MAX_SIZE}")));
    }
    let solver = QuenchedSolver::new(law, j_max);
    let count = if beta == 0.0 { 1 } else { replicas };
    let logs = replica_map(count, |r| {
        let omega = sample_disorder(seed, r, j_max);
        solver.constrained(&log_xi(&omega, beta, h))
    });
    let n = count as f64;
    let mut mean = Vec::with_capacity(gammas.len());
    let mut std_error = Vec::with_capacity(gammas.len());
    for &g in gammas {
        let mut m_row = vec![0.0; j_max + 1];
        let mut s_row = vec![0.0; j_max + 1];
        for j in 0..=j_max {
            let vals: Vec<f64> = logs.iter().map(|l| g * l[j]).collect();
            let shift = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if shift == f64::NEG_INFINITY {
                continue;
            }
            let z: Vec<f64> = vals.iter().map(|v| (v - shift).exp()).collect();
            let m = z.iter().sum::<f64>() / n;
            m_row[j] = m * shift.exp();
            if count > 1 {
                let var = z.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
                s_row[j] = (var / n).sqrt() * shift.exp();
            }
        }
        mean.push(m_row);
        std_error.push(s_row);
    }
    Ok(FractionalMoments {
        beta,
        h,
        replicas,
        gammas: gammas.to_vec(),
        mean,
        std_error,
    })
}

/// Single `A_j` estimate with the annealed bound `(E Z^c_j)^gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub j: usize,
    pub mean: f64,
    pub std_error: f64,
    pub annealed_bound: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn fm_moment_mc(
    law: &InterArrivalLaw,
    beta: f64,
    h: f64,
    gamma: f64,
    j: usize,
    replicas: usize,
    seed: u64,
) -> Result<MomentEstimate> {
    if j < 1 {
        return Err(invalid("j", "must be at least 1"));
    }
    let fm = fractional_moments(law, beta, h, &[gamma], j, replicas, seed)?;
    let annealed = annealed_moments(law, beta, h, gamma, j);
    Ok(MomentEstimate {
        j,
        mean: fm.mean[0][j],
        std_error: fm.std_error[0][j],
        annealed_bound: annealed[j],
    })
}

/// `(E Z^c_j)^gamma` for `j = 0..=j_max`.
pub fn annealed_moments(law: &InterArrivalLaw, beta: f64, h: f64, gamma: f64, j_max: usize) -> Vec<f64> {
    partition(law, h + 0.5 * beta * beta, j_max, Boundary::Constrained)
        .iter()
        .map(|l| (gamma * l).exp())
        .collect()
}

/// Hoelder bound after shifting the charges on `1..=j` by `-mu`:
/// `A_j <= (E' Z^c_j)^gamma exp(gamma mu^2 j / (2 (1 - gamma)))`, where
/// `E' Z^c_j` is homogeneous at pinning `h + beta^2/2 - mu beta`.
/// Returns the bound for every `j = 0..=j_max`.
pub fn shifted_moments(
    law: &InterArrivalLaw,
    beta: f64,
    h: f64,
    gamma: f64,
    mu: f64,
    j_max: usize,
) -> Vec<f64> {
    let pinning = h + 0.5 * beta * beta - mu * beta;
    let cost = gamma * mu * mu / (2.0 * (1.0 - gamma));
    partition(law, pinning, j_max, Boundary::Constrained)
        .iter()
        .enumerate()
        .map(|(j, l)| (gamma * l + cost * j as f64).exp())
        .collect()
}

/// Shift bound at `delta = a beta^2` with shift `sqrt(a) beta`, at size `j <= k`.
/// The homogeneous pinning is `hc0 - beta^2 (sqrt(a) - a)`.
#[allow(clippy::too_many_arguments)]
pub fn shifted_bound(
    law: &InterArrivalLaw,
    beta: f64,
    delta: f64,
    gamma: f64,
    a: f64,
    j: usize,
    k: usize,
) -> Result<f64> {
    if !(a > 0.0 && a < 1.0) {
        return Err(invalid("a", format!("must lie strictly in (0, 1), got {a}")));
    }
    if j > k {
        return Err(invalid("j", format!("must not exceed k = {k}, got {j}")));
    }
    if free_energy_value(law, hc0(law) + delta)? <= 0.0 {
        return Err(PinError::IllPosed(format!("F(0, delta) = 0 for delta = {delta}")));
    }
    let h = hc0(law) - 0.5 * beta * beta + delta;
    Ok(shifted_moments(law, beta, h, gamma, a.sqrt() * beta, j)[j])
}

/// Best of the annealed bound and a grid of shift bounds, per `j`.
fn rigorous_moments(law: &InterArrivalLaw, beta: f64, h: f64, gamma: f64, j_max: usize) -> (Vec<f64>, Vec<f64>) {
    let annealed = annealed_moments(law, beta, h, gamma, j_max);
    let mut best = vec![f64::INFINITY; j_max + 1];
    if beta > 0.0 {
        // the shifted pinning runs from the annealed value down to far below hc0
        let mu_max = (h + 0.5 * beta * beta - hc0(law)).max(0.0) / beta + 2.0 * beta;
        for i in 1..=SHIFT_GRID_POINTS {
            let mu = mu_max * i as f64 / SHIFT_GRID_POINTS as f64;
            for (b, s) in best.iter_mut().zip(shifted_moments(law, beta, h, gamma, mu, j_max)) {
                *b = b.min(s);
            }
        }
    }
    (annealed, best)
}

/// Options for the iterated certificate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IteratedOptions {
    pub replicas: usize,
    pub seed: u64,
    /// Run the Monte Carlo spot checks at `2k` and `4k`.
    pub spot_checks: bool,
}

/// Both grades of the iterated certificate at one `(gamma, k)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IteratedPair {
    pub rigorous: Certificate,
    pub statistical: Certificate,
}

/// Iterated certificate from precomputed moments (`moments.j_max() >= k - 1`).
#[allow(clippy::too_many_arguments)]
pub fn iterated_from_moments(
    law: &InterArrivalLaw,
    beta: f64,
    h: f64,
    gamma: f64,
    k: usize,
    moments: &FractionalMoments,
) -> Result<IteratedPair> {
    check_gamma(law, gamma)?;
    if k < 1 {
        return Err(invalid("k", "must be at least 1"));
    }
    let g = moments
        .gamma_index(gamma)
        .ok_or_else(|| invalid("gamma", format!("{gamma} not present in the moment table")))?;
    if moments.j_max() + 1 < k {
        return Err(invalid("k", format!("needs moments up to j = {}", k - 1)));
    }
    let (annealed, shifted) = rigorous_moments(law, beta, h, gamma, k - 1);
    let evidence = |stat: bool| -> Vec<MomentEvidence> {
        (0..k)
            .map(|j| {
                let (mean, se) = (moments.mean[g][j], moments.std_error[g][j]);
                let rig = if j == 0 { 1.0 } else { annealed[j].min(shifted[j]) };
                let used = if j == 0 {
                    1.0
                } else if stat {
                    mean + 3.0 * se
                } else {
                    rig
                };
                MomentEvidence {
                    j,
                    mc_mean: Some(mean),
                    mc_std_error: Some(se),
                    annealed_bound: annealed[j],
                    shifted_bound: shifted[j].is_finite().then_some(shifted[j]),
                    used,
                    contribution: 0.0,
                }
            })
            .collect()
    };
    let spot = spot_checks(moments, g, k);
    Ok(IteratedPair {
        rigorous: assemble(
            law,
            CertificateKind::Iterated,
            Grade::Rigorous,
            beta,
            h,
            gamma,
            evidence(false),
            spot.clone(),
        ),
        statistical: assemble(
            law,
            CertificateKind::Iterated,
            Grade::Statistical,
            beta,
            h,
            gamma,
            evidence(true),
            spot,
        ),
    })
}

fn spot_checks(moments: &FractionalMoments, g: usize, k: usize) -> Vec<SpotCheck> {
    let reference = moments.mean[g][..k].iter().copied().fold(0.0, f64::max);
    [2 * k, 4 * k]
        .into_iter()
        .filter(|&n| n <= moments.j_max())
        .map(|n| {
            let (m, s) = (moments.mean[g][n], moments.std_error[g][n]);
            SpotCheck {
                n,
                mc_mean: m,
                mc_std_error: s,
                reference,
                consistent: m <= reference + 3.0 * s,
            }
        })
        .collect()
}

/// Iterated certificate at `(gamma, k)`, both grades.
pub fn iterated_certificate(
    law: &InterArrivalLaw,
    beta: f64,
    h: f64,
    gamma: f64,
    k: usize,
    opts: IteratedOptions,
) -> Result<IteratedPair> {
    check_gamma(law, gamma)?;
    if k < 1 {
        return Err(invalid("k", "must be at least 1"));
    }
    let j_max = if opts.spot_checks { 4 * k } else { k.max(2) - 1 };
    if j_max > MAX_SIZE {
        return Err(PinError::ResourceLimit(format!("k = {k} needs moments up to {j_max}")));
    }
    let moments = fractional_moments(law, beta, h, &[gamma], j_max.max(1), opts.replicas, opts.seed)?;
    iterated_from_moments(law, beta, h, gamma, k, &moments)
}

/// `gamma` grid restricted to `(1/(1+alpha), 1)`.
pub fn gamma_grid(law: &InterArrivalLaw) -> Vec<f64> {
    let floor = law
        .alpha()
        .filter(|_| law.has_heavy_tail())
        .map_or(0.0, |a| 1.0 / (1.0 + a));
    GAMMA_GRID.iter().copied().filter(|&g| g > floor).collect()
}

/// `k` grid: powers of two up to `k_cap`, or up to `1/F(0, delta)` when no cap
/// is given (4096 where the annealed free energy vanishes).
pub fn k_grid(law: &InterArrivalLaw, beta: f64, h: f64, k_cap: Option<usize>) -> Result<Vec<usize>> {
    let limit = match k_cap {
        Some(cap) => cap,
        None => {
            let f = free_energy_value(law, h + 0.5 * beta * beta)?;
            if f > 0.0 {
                (1.0 / f).min(MAX_SIZE as f64) as usize
            } else {
                4096
            }
        }
    };
    let mut ks = vec![1usize];
    while ks.last().unwrap() * 2 <= limit.max(1) {
        ks.push(ks.last().unwrap() * 2);
    }
    Ok(ks)
}

/// Result of searching the `(gamma, k)` grid at one `h`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSearch {
    pub h: f64,
    pub best_statistical: Certificate,
    pub best_rigorous: Certificate,
    pub best_simple: Certificate,
}

impl GridSearch {
    pub fn any_certified(&self) -> bool {
        self.best_statistical.is_certified() || self.best_rigorous.is_certified() || self.best_simple.is_certified()
    }
}

/// Minimize `rho` over the `(gamma, k)` grid at a single `h`. Moments are
/// estimated once up to `max(k)` (`4 max(k)` with spot checks).
pub fn grid_search(
    law: &InterArrivalLaw,
    beta: f64,
    h: f64,
    k_cap: Option<usize>,
    replicas: usize,
    seed: u64,
    spot_checks: bool,
) -> Result<GridSearch> {
    let gammas = gamma_grid(law);
    if gammas.is_empty() {
        return Err(PinError::IllPosed("no admissible gamma in the default grid".into()));
    }
    let ks = k_grid(law, beta, h, k_cap)?;
    let k_max = *ks.last().unwrap();
    let j_max = if spot_checks { 4 * k_max } else { k_max }.max(1);
    if j_max > MAX_SIZE {
        return Err(PinError::ResourceLimit(format!("k = {k_max} needs moments up to {j_max}")));
    }
    let moments = fractional_moments(law, beta, h, &gammas, j_max, replicas, seed)?;
    let candidates: Vec<(f64, usize)> = gammas.iter().flat_map(|&g| ks.iter().map(move |&k| (g, k))).collect();
    let pairs = candidates
        .par_iter()
        .map(|&(g, k)| iterated_from_moments(law, beta, h, g, k, &moments))
        .collect::<Result<Vec<_>>>()?;
    let simples = gammas
        .iter()
        .map(|&g| simple_certificate(law, beta, h, g))
        .collect::<Result<Vec<_>>>()?;
    let lowest = |it: &mut dyn Iterator<Item = Certificate>| {
        it.fold(None::<Certificate>, |best, c| match best {
            Some(b) if b.rho <= c.rho => Some(b),
            _ => Some(c),
        })
        .expect("nonempty grid")
    };
    Ok(GridSearch {
        h,
        best_statistical: lowest(&mut pairs.iter().map(|p| p.statistical.clone())),
        best_rigorous: lowest(&mut pairs.iter().map(|p| p.rigorous.clone())),
        best_simple: lowest(&mut simples.into_iter()),
    })
}

/// One row of the certified-shift search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftRow {
    pub delta: f64,
    pub h: f64,
    pub statistical_rho: f64,
    pub statistical_gamma: f64,
    pub statistical_k: usize,
    pub rigorous_rho: f64,
    pub simple_rho: f64,
    pub certified_statistical: bool,
    pub certified_rigorous: bool,
}

/// How far above `hc_ann(beta)` delocalization can be certified.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftSearch {
    pub beta: f64,
    pub hc_ann: f64,
    pub replicas: usize,
    pub rows: Vec<ShiftRow>,
    /// Largest `delta` with a statistical certificate at every grid point up to it.
    pub margin_statistical: Option<f64>,
    /// Same for rigorous (or simple) certificates.
    pub margin_rigorous: Option<f64>,
}

/// Run the grid search at `h = hc_ann + delta` for increasing `deltas`,
/// stopping after the first point where no grade certifies.
pub fn certified_shift(
    law: &InterArrivalLaw,
    beta: f64,
    deltas: &[f64],
    k_cap: Option<usize>,
    replicas: usize,
    seed: u64,
) -> Result<ShiftSearch> {
    if deltas.windows(2).any(|w| w[1] <= w[0]) || deltas.first().is_some_and(|d| *d <= 0.0) {
        return Err(invalid("deltas", "must be positive and strictly increasing"));
    }
    let hc_ann = hc0(law) - 0.5 * beta * beta;
    let mut rows = Vec::new();
    let (mut stat_open, mut rig_open) = (true, true);
    let (mut margin_statistical, mut margin_rigorous) = (None, None);
    for &delta in deltas {
        let h = hc_ann + delta;
        let g = grid_search(law, beta, h, k_cap, replicas, seed, false)?;
        let certified_statistical = g.best_statistical.is_certified();
        let certified_rigorous = g.best_rigorous.is_certified() || g.best_simple.is_certified();
        stat_open &= certified_statistical;
        rig_open &= certified_rigorous;
        if stat_open {
            margin_statistical = Some(delta);
        }
        if rig_open {
            margin_rigorous = Some(delta);
        }
        rows.push(ShiftRow {
            delta,
            h,
            statistical_rho: g.best_statistical.rho,
            statistical_gamma: g.best_statistical.gamma,
            statistical_k: g.best_statistical.k,
            rigorous_rho: g.best_rigorous.rho,
            simple_rho: g.best_simple.rho,
            certified_statistical,
            certified_rigorous,
        });
        if !stat_open && !rig_open {
            break;
        }
    }
    Ok(ShiftSearch {
        beta,
        hc_ann,
        replicas,
        rows,
        margin_statistical,
        margin_rigorous,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::DEFAULT_TAIL_TOL;

    fn half_law() -> InterArrivalLaw {
        InterArrivalLaw::power_law(0.5, 0.0, 64, DEFAULT_TAIL_TOL).unwrap()
    }

    #[test]
    fn xi_moment_closed_forms() {
        assert_eq!(xi_moment(0.0, 0.7, 0.3), (0.3f64 * 0.7).exp());
        let beta = 1.3f64;
        let h = -beta * beta / 2.0;
        assert!((xi_moment(beta, h, 0.5) - (-beta * beta / 8.0).exp()).abs() < 1e-15);
    }

    #[test]
    fn pure_law_is_inconclusive_without_disorder() {
        let c = simple_certificate(&half_law(), 0.0, 0.0, 0.8).unwrap();
        assert!(c.rho > 1.0);
        assert_eq!(c.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn summability_is_enforced() {
        assert!(simple_certificate(&half_law(), 1.0, 0.0, 0.6).is_err());
        assert!(simple_certificate(&half_law(), 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn k_equal_one_reduces_to_simple() {
        let law = half_law();
        let fm = fractional_moments(&law, 2.0, -1.5, &[0.8], 1, 8, 1).unwrap();
        let it = iterated_from_moments(&law, 2.0, -1.5, 0.8, 1, &fm).unwrap();
        let s = simple_certificate(&law, 2.0, -1.5, 0.8).unwrap();
        assert_eq!(it.statistical.rho.to_bits(), s.rho.to_bits());
        assert_eq!(it.rigorous.rho.to_bits(), s.rho.to_bits());
    }

    #[test]
    fn simple_threshold_is_the_boundary() {
        let law = half_law();
        let (beta, gamma) = (4.0, 0.8);
        let h = simple_threshold(&law, beta, gamma).unwrap();
        assert!(simple_certificate(&law, beta, h - 1e-6, gamma).unwrap().is_certified());
        assert!(!simple_certificate(&law, beta, h + 1e-6, gamma).unwrap().is_certified());
    }

    #[test]
    fn no_disorder_moments_are_exact() {
        let law = half_law();
        let fm = fractional_moments(&law, 0.0, 0.1, &[0.7], 20, 5, 3).unwrap();
        let ann = annealed_moments(&law, 0.0, 0.1, 0.7, 20);
        for j in 0..=20 {
            assert!((fm.mean[0][j] - ann[j]).abs() < 1e-14 * ann[j]);
            assert_eq!(fm.std_error[0][j], 0.0);
        }
    }

    #[test]
    fn zero_shift_is_annealed() {
        let law = half_law();
        let a = annealed_moments(&law, 1.0, -0.3, 0.7, 50);
        let s = shifted_moments(&law, 1.0, -0.3, 0.7, 0.0, 50);
        assert_eq!(a, s);
    }

    #[test]
    fn shifted_bound_dominates_monte_carlo() {
        let law = InterArrivalLaw::power_law(2.0, 0.0, 64, DEFAULT_TAIL_TOL).unwrap();
        let (beta, delta, gamma, a) = (1.0, 0.1, 0.8, 0.1);
        let h = -0.5 * beta * beta + delta;
        let fm = fractional_moments(&law, beta, h, &[gamma], 64, 2000, 9).unwrap();
        for j in [8usize, 32, 64] {
            let b = shifted_bound(&law, beta, delta, gamma, a, j, 64).unwrap();
            assert!(fm.mean[0][j] - 3.0 * fm.std_error[0][j] <= b, "j={j}");
        }
    }
}
