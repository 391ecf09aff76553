//! Exact sampling of contact sets under the quenched constrained measure.
//!
//! From a contact at `m` the next contact is `m + n` with probability
//! `K(n) xi_{m+n} Z[m+n, N] / Z[m, N]`, so a single backward table makes the
//! draw exact.

use std::io::Write;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, PinError, Result};
use crate::kernel::{ContactSet, InterArrivalLaw};
use crate::numeric::mean_and_std_error;
use crate::quenched::{log_xi, DisorderSample, QuenchedSolver};
use crate::rng::{replica_map, stream, Domain, Rng};

/// `log_z_suffix[m]` is the log partition function over `[m, N]` with contacts
/// at both ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuffixPartitionTable {
    pub log_z_suffix: Vec<f64>,
}

impl SuffixPartitionTable {
    pub fn horizon(&self) -> usize {
        self.log_z_suffix.len() - 1
    }
}

fn check_disorder(disorder: &DisorderSample, n: usize) -> Result<()> {
    if n < 1 {
        return Err(invalid("n", "must be at least 1"));
    }
    if disorder.len() < n {
        return Err(invalid(
            "disorder",
            format!("has {} charges but size {n} was requested", disorder.len()),
        ));
    }
    Ok(())
}

pub fn suffix_partition(law: &InterArrivalLaw, disorder: &DisorderSample, n: usize) -> Result<SuffixPartitionTable> {
    check_disorder(disorder, n)?;
    Ok(SuffixPartitionTable {
        log_z_suffix: QuenchedSolver::new(law, n).suffix(&disorder.log_xi(n)),
    })
}

/// Backward table plus everything needed for repeated exact draws.
#[derive(Debug, Clone)]
pub struct PathSampler {
    log_k: Vec<f64>,
    log_xi: Vec<f64>,
    suffix: SuffixPartitionTable,
}

impl PathSampler {
    pub fn new(law: &InterArrivalLaw, disorder: &DisorderSample, n: usize) -> Result<Self> {
        check_disorder(disorder, n)?;
        let log_xi = log_xi(&disorder.omega[..n], disorder.beta, disorder.h);
        let suffix = QuenchedSolver::new(law, n).suffix(&log_xi);
        if !suffix[0].is_finite() {
            return Err(PinError::IllPosed(format!("no renewal path reaches N = {n}")));
        }
        Ok(PathSampler {
            log_k: law.weights(n).iter().map(|k| k.ln()).collect(),
            log_xi,
            suffix: SuffixPartitionTable { log_z_suffix: suffix },
        })
    }

    pub fn horizon(&self) -> usize {
        self.suffix.horizon()
    }

    pub fn table(&self) -> &SuffixPartitionTable {
        &self.suffix
    }

    fn step_probability(&self, m: usize, n: usize) -> f64 {
        let s = &self.suffix.log_z_suffix;
        (self.log_k[n] + self.log_xi[m + n] + s[m + n] - s[m]).exp()
    }

    /// Law of the next gap from a contact at `m < N`, indexed by `n - 1`.
    pub fn step_distribution(&self, m: usize) -> Vec<f64> {
        (1..=self.horizon() - m).map(|n| self.step_probability(m, n)).collect()
    }

    pub fn sample(&self, rng: &mut Rng) -> ContactSet {
        let big_n = self.horizon();
        let mut points = vec![0u64];
        let mut m = 0usize;
        while m < big_n {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut chosen = None;
            for n in 1..=big_n - m {
                let p = self.step_probability(m, n);
                if p > 0.0 {
                    chosen = Some(n);
                    acc += p;
                    if acc > u {
                        break;
                    }
                }
            }
            // rounding can leave acc slightly below u; the last admissible gap absorbs it
            m += chosen.expect("suffix table is finite");
            points.push(m as u64);
        }
        ContactSet {
            points,
            horizon: big_n as u64,
        }
    }
}

/// One exact draw with stream `(seed, Path, index)`.
pub fn sample_path(law: &InterArrivalLaw, disorder: &DisorderSample, n: usize, seed: u64, index: u64) -> Result<ContactSet> {
    let sampler = PathSampler::new(law, disorder, n)?;
    Ok(sampler.sample(&mut stream(seed, Domain::Path, index)))
}

/// `count` independent draws; draw `i` uses stream `(seed, Path, i)`.
pub fn sample_paths(
    law: &InterArrivalLaw,
    disorder: &DisorderSample,
    n: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<ContactSet>> {
    let sampler = PathSampler::new(law, disorder, n)?;
    Ok(replica_map(count, |i| sampler.sample(&mut stream(seed, Domain::Path, i))))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContactStatistics {
    pub samples: usize,
    pub horizon: u64,
    pub fraction_mean: f64,
    pub fraction_se: f64,
    /// Empirical `P(n in tau)` for `n = 0..=N`.
    pub profile: Vec<f64>,
}

pub fn contact_statistics(samples: &[ContactSet]) -> Result<ContactStatistics> {
    let first = samples.first().ok_or_else(|| invalid("samples", "must be nonempty"))?;
    let horizon = first.horizon;
    if samples.iter().any(|s| s.horizon != horizon) {
        return Err(invalid("samples", "must share a common horizon"));
    }
    let fractions: Vec<f64> = samples.iter().map(|s| s.fraction()).collect();
    let (fraction_mean, fraction_se) = mean_and_std_error(&fractions);
    let mut counts = vec![0u64; horizon as usize + 1];
    for s in samples {
        for &p in &s.points {
            counts[p as usize] += 1;
        }
    }
    let total = samples.len() as f64;
    Ok(ContactStatistics {
        samples: samples.len(),
        horizon,
        fraction_mean,
        fraction_se,
        profile: counts.iter().map(|&c| c as f64 / total).collect(),
    })
}

/// Contact sets as JSON index lists.
pub fn contacts_to_json(samples: &[ContactSet]) -> Result<String> {
    serde_json::to_string(samples).map_err(|e| PinError::Unsupported(e.to_string()))
}

/// One `0/1` occupation row per sample, columns `0..=N`.
pub fn write_occupation_csv<W: Write>(out: W, samples: &[ContactSet]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if let Some(first) = samples.first() {
        w.write_record((0..=first.horizon).map(|n| n.to_string()))?;
    }
    for s in samples {
        w.write_record(s.occupation().iter().map(|b| b.to_string()))?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homogeneous::{partition, Boundary};
    use crate::kernel::{renewal_function, DEFAULT_TAIL_TOL};

    fn law() -> InterArrivalLaw {
        InterArrivalLaw::power_law(0.6, 0.1, 16, DEFAULT_TAIL_TOL).unwrap()
    }

    #[test]
    fn suffix_ends() {
        let d = DisorderSample::new(0.8, -0.2, 4, 0, 40);
        let t = suffix_partition(&law(), &d, 40).unwrap();
        let zc = QuenchedSolver::new(&law(), 40).constrained(&d.log_xi(40));
        assert_eq!(t.log_z_suffix[40], 0.0);
        assert!((t.log_z_suffix[0] - zc[40]).abs() < 1e-10 * zc[40].abs().max(1.0));
    }

    #[test]
    fn pure_suffix_is_renewal_function() {
        let l = law();
        let d = DisorderSample::new(0.0, 0.0, 1, 0, 30);
        let t = suffix_partition(&l, &d, 30).unwrap();
        let u = renewal_function(&l, 30).u;
        for m in 0..=30 {
            assert!((t.log_z_suffix[m].exp() - u[30 - m]).abs() < 1e-13);
        }
    }

    #[test]
    fn step_laws_are_normalized() {
        let d = DisorderSample::new(1.2, 0.3, 8, 0, 64);
        let s = PathSampler::new(&law(), &d, 64).unwrap();
        for m in 0..64 {
            let total: f64 = s.step_distribution(m).iter().sum();
            assert!((total - 1.0).abs() < 1e-10, "m={m}: {total}");
        }
    }

    #[test]
    fn paths_end_at_the_horizon() {
        let d = DisorderSample::new(1.0, 0.0, 2, 0, 50);
        for c in sample_paths(&law(), &d, 50, 20, 5).unwrap() {
            assert_eq!(c.points[0], 0);
            assert_eq!(*c.points.last().unwrap(), 50);
            assert!(c.points.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn pure_profile_matches_conditioned_renewal() {
        // P(n in tau | N in tau) = u_n u_{N-n} / u_N
        let l = law();
        let n = 12;
        let d = DisorderSample::new(0.0, 0.0, 1, 0, n);
        let samples = sample_paths(&l, &d, n, 40_000, 3).unwrap();
        let stats = contact_statistics(&samples).unwrap();
        let u = renewal_function(&l, n).u;
        for m in 0..=n {
            let p = u[m] * u[n - m] / u[n];
            let se = (p * (1.0 - p) / 40_000.0).sqrt();
            assert!((stats.profile[m] - p).abs() <= 4.0 * se + 1e-12, "m={m}");
        }
        let zc = partition(&l, 0.0, n, Boundary::Constrained);
        assert!((zc[n].exp() - u[n]).abs() < 1e-14);
    }

    #[test]
    fn statistics_reject_mixed_horizons() {
        let a = ContactSet { points: vec![0, 3], horizon: 3 };
        let b = ContactSet { points: vec![0, 4], horizon: 4 };
        assert!(contact_statistics(&[a, b]).is_err());
        assert!(contact_statistics(&[]).is_err());
    }

    #[test]
    fn occupation_csv_rows() {
        let a = ContactSet { points: vec![0, 2, 3], horizon: 3 };
        let mut buf = Vec::new();
        write_occupation_csv(&mut buf, &[a]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "0,1,2,3\n1,0,1,1\n");
    }
}
