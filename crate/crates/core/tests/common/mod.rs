//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use pinlab::kernel::InterArrivalLaw;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

/// Weight of the contact set `{0} U inner U {n}` with charges `log_xi[1..=n]`.
fn constrained_weight(law: &InterArrivalLaw, log_xi: &[f64], inner: &[usize], n: usize) -> f64 {
    let mut prev = 0usize;
    let mut w = 1.0;
    for &p in inner.iter().chain(std::iter::once(&n)) {
        w *= law.k((p - prev) as u64) * log_xi[p].exp();
        prev = p;
    }
    w
}

fn subset(mask: u32, lo: usize, hi: usize) -> Vec<usize> {
    (lo..hi).filter(|&i| mask >> (i - lo) & 1 == 1).collect()
}

/// `Z^c_n` by summing over all `2^{n-1}` compositions of `n`.
pub fn enumerate_constrained(law: &InterArrivalLaw, log_xi: &[f64], n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    (0..1u32 << (n - 1))
        .map(|mask| constrained_weight(law, log_xi, &subset(mask, 1, n), n))
        .sum()
}

/// `Z^f_n`: contacts anywhere in `[1, n]`, the last excursion weighted by `P(tau_1 > n - last)`.
pub fn enumerate_free(law: &InterArrivalLaw, log_xi: &[f64], n: usize) -> f64 {
    let survival = |m: usize| law.survival(m as u64);
    (0..1u32 << n)
        .map(|mask| {
            let points = subset(mask, 1, n + 1);
            match points.last() {
                None => survival(n),
                Some(&last) => {
                    constrained_weight(law, log_xi, &points[..points.len() - 1], last) * survival(n - last)
                }
            }
        })
        .sum()
}

/// Every contact set of the constrained measure on `[0, n]` with its Gibbs probability.
pub fn gibbs_distribution(law: &InterArrivalLaw, log_xi: &[f64], n: usize) -> Vec<(Vec<u64>, f64)> {
    let mut out: Vec<(Vec<u64>, f64)> = (0..1u32 << (n - 1))
        .map(|mask| {
            let inner = subset(mask, 1, n);
            let w = constrained_weight(law, log_xi, &inner, n);
            let mut pts = vec![0u64];
            pts.extend(inner.iter().map(|&p| p as u64));
            pts.push(n as u64);
            (pts, w)
        })
        .collect();
    let z: f64 = out.iter().map(|(_, w)| w).sum();
    for e in &mut out {
        e.1 /= z;
    }
    out
}

/// Test-side generator, deliberately different from the crate's ChaCha8 streams.
pub fn test_rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn gaussians(rng: &mut StdRng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

/// One small config per CLI mode, as `(subcommand, toml)`.
pub fn cli_configs() -> Vec<(&'static str, String)> {
    let law = "[law]\nalpha = 0.75\nn_table = 64\n";
    let body = [
        ("homog", "[homog]\nh_min = -0.2\nh_max = 0.4\nsteps = 7\n"),
        ("quenched", "[quenched]\nbeta = 1.0\nh = 0.1\nn = 256\nreplicas = 16\n"),
        (
            "certify",
            "[certify]\nbeta = 1.0\nh = -0.6\nmethod = \"grid\"\nk_cap = 64\nreplicas = 40\ncheck_n = 256\ncheck_replicas = 8\n",
        ),
        ("variance", "[variance]\nbeta = 0.3\nn = 256\nreplicas = 50\n"),
        (
            "smoothing",
            "[smoothing]\nbeta = 1.0\nhc_left = -0.5\nhc_right = -0.35\ndeltas = [0.2, 0.4]\nn = 256\nreplicas = 12\nell = 16\n",
        ),
        ("sample", "[sample]\nbeta = 1.0\nh = 0.0\nn = 40\ncount = 50\n"),
        ("scan", "[scan]\nbeta = 1.0\nh_min = -0.6\nh_max = 0.0\nsteps = 5\nn = 256\nreplicas = 12\n"),
    ];
    body.iter()
        .map(|(mode, section)| (*mode, format!("mode = \"{mode}\"\nseed = 11\n{law}{section}")))
        .collect()
}
