use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::rng::{stream, Domain};

/// IID standard Gaussian charges `omega_1, ..., omega_N` with coupling `(beta, h)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisorderSample {
    pub beta: f64,
    pub h: f64,
    pub seed: u64,
    pub replica: u64,
    /// `omega[n - 1]` is the charge at site `n`.
    pub omega: Vec<f64>,
}

/// Charges for replica `replica` of master seed `seed`.
pub fn sample_disorder(seed: u64, replica: u64, n: usize) -> Vec<f64> {
    let mut rng = stream(seed, Domain::Disorder, replica);
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

impl DisorderSample {
    pub fn new(beta: f64, h: f64, seed: u64, replica: u64, n: usize) -> Self {
        DisorderSample {
            beta,
            h,
            seed,
            replica,
            omega: sample_disorder(seed, replica, n),
        }
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    /// `[0, log xi_1, ..., log xi_n]` with `log xi_k = beta omega_k + h`.
    pub fn log_xi(&self, n: usize) -> Vec<f64> {
        log_xi(&self.omega[..n], self.beta, self.h)
    }
}

/// `[0, beta omega_1 + h, ..., beta omega_N + h]`.
pub fn log_xi(omega: &[f64], beta: f64, h: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(omega.len() + 1);
    out.push(0.0);
    out.extend(omega.iter().map(|w| beta * w + h));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::mean_and_std_error;

    #[test]
    fn reproducible_gaussian_stream() {
        assert_eq!(sample_disorder(11, 2, 100), sample_disorder(11, 2, 100));
        assert_ne!(sample_disorder(11, 2, 100), sample_disorder(11, 3, 100));
        // prefixes agree, so longer samples extend shorter ones
        assert_eq!(sample_disorder(11, 2, 100)[..50], sample_disorder(11, 2, 50)[..]);
    }

    #[test]
    fn first_two_moments() {
        let xs = sample_disorder(2024, 0, 1_000_000);
        let (mean, _) = mean_and_std_error(&xs);
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        assert!(mean.abs() < 0.003, "{mean}");
        assert!((var - 1.0).abs() < 0.005, "{var}");
    }
}
