//! Special functions and summation helpers shared by the kernel and solvers.
//!
//! Every infinite sum in the crate has the shape `sum_{n > m} e^{-b n} n^{-s}`
//! (possibly restricted to a sublattice). Those are evaluated by explicit
//! partial sums up to a moderate cutoff followed by an Euler-Maclaurin
//! remainder whose leading term is the exact integral of the summand.

use statrs::function::gamma::gamma;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `B_{2k} / (2k)!` for k = 1..=6.
const EM_COEFFS: [f64; 6] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
    -691.0 / 1_307_674_368_000.0,
];

/// Below this cutoff the remainder is never handed to Euler-Maclaurin.
const EM_MIN_CUTOFF: u64 = 64;

/// Decay rates at or above this are summed explicitly term by term.
const EXPLICIT_DECAY: f64 = 0.25;

/// Generalized exponential integral `E_s(z) = int_1^inf e^{-z t} t^{-s} dt`
/// for real `s > 0` and `z > 0`.
pub fn expint(s: f64, z: f64) -> f64 {
    debug_assert!(z > 0.0);
    if z >= 1.0 {
        expint_continued_fraction(s, z)
    } else {
        let nearest = s.round();
        if (s - nearest).abs() < 1e-7 && nearest >= 1.0 {
            expint_series_integer(nearest as u32, z)
        } else {
            expint_series(s, z)
        }
    }
}

fn expint_continued_fraction(s: f64, z: f64) -> f64 {
    const FPMIN: f64 = 1e-300;
    let mut b = z + s;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let fi = i as f64;
        let an = -fi * (s - 1.0 + fi);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h * (-z).exp()
}

fn expint_series_integer(n: u32, z: f64) -> f64 {
    let nm1 = n as i64 - 1;
    let mut ans = if nm1 != 0 {
        1.0 / nm1 as f64
    } else {
        -z.ln() - EULER_GAMMA
    };
    let mut fact = 1.0;
    for i in 1..1000i64 {
        fact *= -z / i as f64;
        let del = if i != nm1 {
            -fact / (i - nm1) as f64
        } else {
            let psi = -EULER_GAMMA + (1..=nm1).map(|k| 1.0 / k as f64).sum::<f64>();
            fact * (-z.ln() + psi)
        };
        ans += del;
        if del.abs() < ans.abs() * 1e-17 {
            break;
        }
    }
    ans
}

fn expint_series(s: f64, z: f64) -> f64 {
    let mut series = 0.0;
    let mut term = 1.0; // (-z)^k / k!
    for k in 0..1000u32 {
        let kf = k as f64;
        if k > 0 {
            term *= -z / kf;
        }
        let del = term / (kf + 1.0 - s);
        series += del;
        if k > 2 && del.abs() < 1e-18 * series.abs().max(1e-300) {
            break;
        }
    }
    gamma(1.0 - s) * z.powf(s - 1.0) - series
}

fn rising(s: f64, j: u32) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (s + i as f64))
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// j-th derivative of `f(x) = e^{-b x} x^{-s}`.
fn damped_power_derivative(s: f64, b: f64, x: f64, j: u32) -> f64 {
    let mut acc = 0.0;
    for i in 0..=j {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let bpow = if j - i == 0 { 1.0 } else { (-b).powi((j - i) as i32) };
        acc += binomial(j, i) * bpow * sign * rising(s, i) * x.powf(-s - i as f64);
    }
    acc * (-b * x).exp()
}

/// `int_m^inf e^{-b x} x^{-s} dx`.
fn damped_power_integral(s: f64, b: f64, m: f64) -> f64 {
    if b == 0.0 {
        m.powf(1.0 - s) / (s - 1.0)
    } else {
        m.powf(1.0 - s) * expint(s, b * m)
    }
}

/// Result of a tail summation: the value and an estimate of its truncation error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailSum {
    pub value: f64,
    pub error: f64,
}

/// `sum_{n > m} e^{-b n} n^{-s}`.
///
/// Requires `b >= 0`, and `s > 1` when `b == 0`. Returns `+inf` when the sum
/// diverges.
pub fn tail_sum(s: f64, b: f64, m: u64) -> TailSum {
    debug_assert!(b >= 0.0);
    if b == 0.0 && s <= 1.0 {
        return TailSum {
            value: f64::INFINITY,
            error: 0.0,
        };
    }
    if b >= EXPLICIT_DECAY {
        let mut acc = 0.0;
        let mut n = m + 1;
        loop {
            let nf = n as f64;
            let term = (-b * nf).exp() * nf.powf(-s);
            acc += term;
            // remaining terms are bounded by a geometric series of ratio e^{-b}
            if term <= 1e-18 * acc || term == 0.0 {
                let bound = term * (-b).exp() / (1.0 - (-b).exp());
                return TailSum {
                    value: acc,
                    error: bound,
                };
            }
            n += 1;
        }
    }
    let cutoff = m.max(EM_MIN_CUTOFF);
    let mut explicit = 0.0;
    for n in (m + 1)..=cutoff {
        let nf = n as f64;
        explicit += (-b * nf).exp() * nf.powf(-s);
    }
    let x = cutoff as f64;
    let mut remainder = damped_power_integral(s, b, x) - 0.5 * (-b * x).exp() * x.powf(-s);
    let n_terms = EM_COEFFS.len() - 1;
    for (k, coeff) in EM_COEFFS.iter().take(n_terms).enumerate() {
        let order = 2 * k as u32 + 1;
        remainder -= coeff * damped_power_derivative(s, b, x, order);
    }
    let omitted = EM_COEFFS[n_terms] * damped_power_derivative(s, b, x, 2 * n_terms as u32 + 1);
    let value = explicit + remainder;
    TailSum {
        value,
        error: omitted.abs() + 4.0 * f64::EPSILON * value.abs(),
    }
}

/// `sum_{n > m, n = 0 mod p} e^{-b n} n^{-s}` for a lattice of period `p`.
pub fn lattice_tail_sum(s: f64, b: f64, m: u64, period: u64) -> TailSum {
    if period <= 1 {
        return tail_sum(s, b, m);
    }
    let p = period as f64;
    let scale = p.powf(-s);
    let inner = tail_sum(s, b * p, m / period);
    TailSum {
        value: scale * inner.value,
        error: scale * inner.error,
    }
}

/// Riemann zeta function for real `s > 1`.
pub fn zeta(s: f64) -> f64 {
    1.0 + tail_sum(s, 0.0, 1).value
}

/// Dot product with eight fixed-order accumulators.
///
/// The summation order depends only on the slice length, so results are
/// bit-identical across runs and thread counts.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 8];
    let chunks_a = a.chunks_exact(8);
    let chunks_b = b.chunks_exact(8);
    let rem_a = chunks_a.remainder();
    let rem_b = chunks_b.remainder();
    for (ca, cb) in chunks_a.zip(chunks_b) {
        for i in 0..8 {
            acc[i] += ca[i] * cb[i];
        }
    }
    let mut tail = 0.0;
    for (x, y) in rem_a.iter().zip(rem_b) {
        tail += x * y;
    }
    ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail
}

/// `log(sum exp(x_i))`, `-inf` for an empty or all `-inf` input.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    max + xs.iter().map(|&x| (x - max).exp()).sum::<f64>().ln()
}

/// Compensated (Neumaier) summation.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Sample mean and standard error of the mean (`n - 1` normalization).
pub fn mean_and_std_error(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::INFINITY);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_tail(s: f64, b: f64, m: u64, upto: u64) -> f64 {
        // summed backwards for accuracy
        ((m + 1)..=upto)
            .rev()
            .map(|n| (-b * n as f64).exp() * (n as f64).powf(-s))
            .sum()
    }

    #[test]
    fn zeta_known_values() {
        let pi = std::f64::consts::PI;
        assert!((zeta(2.0) - pi * pi / 6.0).abs() < 1e-14);
        assert!((zeta(4.0) - pi.powi(4) / 90.0).abs() < 1e-14);
        assert!((zeta(1.5) - 2.612_375_348_685_488).abs() < 1e-13);
    }

    #[test]
    fn damped_tail_matches_brute_force() {
        for &(s, b) in &[(1.5, 1e-3), (0.5, 1e-2), (3.0, 0.05), (1.75, 0.2), (0.3, 0.1)] {
            let fast = tail_sum(s, b, 10).value;
            let slow = brute_tail(s, b, 10, 2_000_000);
            assert!(
                (fast - slow).abs() < 1e-11 * slow.max(1.0),
                "s={s} b={b}: {fast} vs {slow}"
            );
        }
    }

    #[test]
    fn explicit_branch_agrees_with_em_branch_near_threshold() {
        for b in [EXPLICIT_DECAY * (1.0 - 1e-9), EXPLICIT_DECAY] {
            let fast = tail_sum(1.5, b, 100).value;
            let slow = brute_tail(1.5, b, 100, 20_000);
            assert!((fast - slow).abs() < 1e-12 * slow, "b={b}: {fast} vs {slow}");
        }
    }

    #[test]
    fn expint_branches_are_continuous() {
        for &s in &[0.3, 1.0, 1.5, 2.0, 3.0, 2.75] {
            let lo = expint(s, 1.0 - 1e-12);
            let hi = expint(s, 1.0);
            assert!((lo - hi).abs() < 1e-10 * hi, "s={s}: {lo} vs {hi}");
        }
        // E_1(1) = 0.21938393439552...
        assert!((expint(1.0, 1.0) - 0.219_383_934_395_520_3).abs() < 1e-14);
    }

    #[test]
    fn lattice_sum_counts_only_multiples() {
        let direct: f64 = (6..200_000u64)
            .rev()
            .filter(|n| n % 2 == 0)
            .map(|n| (n as f64).powf(-2.5))
            .sum();
        // remainder beyond the cutoff by the midpoint integral
        let direct = direct + (200_000f64 - 1.0).powf(-1.5) / 3.0;
        let fast = lattice_tail_sum(2.5, 0.0, 5, 2).value;
        assert!((fast - direct).abs() < 1e-12);
    }

    #[test]
    fn dot_matches_naive() {
        let a: Vec<f64> = (0..37).map(|i| i as f64 * 0.5).collect();
        let b: Vec<f64> = (0..37).map(|i| 1.0 / (i as f64 + 1.0)).collect();
        let naive: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        assert!((dot(&a, &b) - naive).abs() < 1e-12);
    }
}

