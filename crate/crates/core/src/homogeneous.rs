//! The model without disorder: free energy, critical point, partition
//! functions and contact fraction.

use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::convolution::renewal_recursion;
use crate::error::{invalid, PinError, Result};
use crate::kernel::InterArrivalLaw;
use crate::numeric::log_sum_exp;

/// Width of the bisection bracket before Newton polishing.
const BISECTION_WIDTH: f64 = 1e-13;
/// `|e^h sum K - 1|` below this flags the critical point.
const CRITICAL_TOL: f64 = 1e-12;

/// Boundary condition at the right end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Constrained,
    Free,
}

/// `h_c(0) = -log sum_n K(n)`, exactly `0` for persistent laws.
pub fn hc0(law: &InterArrivalLaw) -> f64 {
    if law.is_persistent() {
        return 0.0;
    }
    -law.total_mass().ln()
}

#[derive(Debug, Clone)]
pub struct HomogeneousSolution {
    pub h: f64,
    /// Free energy `F(0, h)`.
    pub b: f64,
    pub hc0: f64,
    pub critical: bool,
    /// Residual `|sum e^{-bn+h} K(n) - 1|` (zero below the critical point).
    pub residual: f64,
    /// `K_b(n) = e^{-bn+h} K(n)`; only available for `h >= hc0`.
    pub tilted_law: Option<InterArrivalLaw>,
}

impl HomogeneousSolution {
    pub fn free_energy(&self) -> f64 {
        self.b
    }

    pub fn correlation_length(&self) -> f64 {
        if self.b > 0.0 {
            1.0 / self.b
        } else {
            f64::INFINITY
        }
    }
}

/// `sum_n e^{-bn+h} K(n)`.
fn tilted_mass(law: &InterArrivalLaw, h: f64, b: f64) -> f64 {
    h.exp() * law.moment(b, 0.0)
}

/// Solve `sum_n e^{-bn+h} K(n) = 1` for `b >= 0`.
pub fn free_energy(law: &InterArrivalLaw, h: f64, tol: f64) -> Result<HomogeneousSolution> {
    if !(tol > 0.0) {
        return Err(invalid("tol", format!("must be positive, got {tol}")));
    }
    if !h.is_finite() {
        return Err(invalid("h", "must be finite"));
    }
    let hc = hc0(law);
    let at_zero = tilted_mass(law, h, 0.0);
    let critical = (at_zero - 1.0).abs() < CRITICAL_TOL;
    if h <= hc || critical {
        let tilted_law = if critical || h == hc {
            law.tilt(h, 0.0).ok()
        } else {
            None
        };
        return Ok(HomogeneousSolution {
            h,
            b: 0.0,
            hc0: hc,
            critical,
            residual: 0.0,
            tilted_law,
        });
    }
    let mut lo = 0.0f64;
    let mut hi = h - hc + 1.0;
    while hi - lo > BISECTION_WIDTH * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if tilted_mass(law, h, mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut b = 0.5 * (lo + hi);
    for _ in 0..8 {
        let g = tilted_mass(law, h, b) - 1.0;
        let dg = -h.exp() * law.moment(b, 1.0);
        if !(dg < 0.0) || !dg.is_finite() {
            break;
        }
        let next = b - g / dg;
        if !(next > 0.0) || (next - b).abs() > 2.0 * (hi - lo).max(BISECTION_WIDTH) {
            break;
        }
        let done = (next - b).abs() <= 4.0 * f64::EPSILON * b;
        b = next;
        if done {
            break;
        }
    }
    let residual = (tilted_mass(law, h, b) - 1.0).abs();
    if residual > tol {
        return Err(PinError::RootFinding(format!(
            "residual {residual:e} exceeds tolerance {tol:e} at h = {h}"
        )));
    }
    let tilted_law = law.tilt(h, b)?;
    Ok(HomogeneousSolution {
        h,
        b,
        hc0: hc,
        critical: false,
        residual,
        tilted_law: Some(tilted_law),
    })
}

/// `F(0, h)` with the default tolerance.
pub fn free_energy_value(law: &InterArrivalLaw, h: f64) -> Result<f64> {
    Ok(free_energy(law, h, 1e-12)?.b)
}

/// `log Z_{n,h}` for `n = 0..=N` under the chosen boundary condition.
pub fn partition(law: &InterArrivalLaw, h: f64, n: usize, boundary: Boundary) -> Vec<f64> {
    let weights = law.weights(n);
    let pre = vec![h; n + 1];
    let post = vec![0.0; n + 1];
    let constrained = renewal_recursion(&weights, &pre, &post);
    match boundary {
        Boundary::Constrained => constrained,
        Boundary::Free => free_from_constrained(law, &constrained),
    }
}

/// `log Z^f_n = log sum_{m <= n} Z^c_m P(tau_1 > n - m)` for every `n`.
pub(crate) fn free_from_constrained(law: &InterArrivalLaw, log_constrained: &[f64]) -> Vec<f64> {
    let n = log_constrained.len() - 1;
    let survival = law.survival_table(n);
    let log_survival: Vec<f64> = survival.iter().map(|s| s.ln()).collect();
    let mut out = Vec::with_capacity(n + 1);
    let mut terms = Vec::with_capacity(n + 1);
    for k in 0..=n {
        terms.clear();
        terms.extend((0..=k).map(|m| log_constrained[m] + log_survival[k - m]));
        out.push(log_sum_exp(&terms));
    }
    out
}

/// `log Z^f_N` at a single size.
pub(crate) fn free_at_end(law: &InterArrivalLaw, log_constrained: &[f64]) -> f64 {
    let n = log_constrained.len() - 1;
    let survival = law.survival_table(n);
    let terms: Vec<f64> = (0..=n)
        .map(|m| log_constrained[m] + survival[n - m].ln())
        .collect();
    log_sum_exp(&terms)
}

/// Contact density and whether `h` sits at the critical point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContactFraction {
    pub value: f64,
    pub critical: bool,
}

/// `1 / E_{K_b}[tau_1] = dF(0,h)/dh`.
pub fn contact_fraction(law: &InterArrivalLaw, h: f64) -> Result<ContactFraction> {
    let sol = free_energy(law, h, 1e-12)?;
    if sol.critical {
        let heavy = law.alpha().is_some_and(|a| a <= 1.0) && law.has_heavy_tail();
        let value = if heavy {
            0.0
        } else {
            1.0 / (h.exp() * law.moment(0.0, 1.0))
        };
        return Ok(ContactFraction {
            value,
            critical: true,
        });
    }
    if sol.b == 0.0 {
        return Ok(ContactFraction {
            value: 0.0,
            critical: false,
        });
    }
    let mean = h.exp() * law.moment(sol.b, 1.0);
    Ok(ContactFraction {
        value: 1.0 / mean,
        critical: false,
    })
}

/// Leading behaviour `F(0, hc0 + delta) ~ constant * delta^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalAsymptotics {
    pub exponent: f64,
    pub constant: f64,
}

pub fn critical_asymptotics(law: &InterArrivalLaw) -> Result<CriticalAsymptotics> {
    let mass = law.total_mass();
    let heavy_alpha = law.alpha().filter(|_| law.has_heavy_tail());
    match heavy_alpha {
        Some(a) if (a - 1.0).abs() < 1e-12 => Err(PinError::Unsupported(
            "critical asymptotics at alpha = 1".into(),
        )),
        Some(a) if a < 1.0 => {
            let c = law.c_k_effective().expect("power tail");
            Ok(CriticalAsymptotics {
                exponent: 1.0 / a,
                constant: (a * mass / (c * gamma(1.0 - a))).powf(1.0 / a),
            })
        }
        _ => Ok(CriticalAsymptotics {
            exponent: 1.0,
            constant: mass / law.moment(0.0, 1.0),
        }),
    }
}

/// One row of an `h` grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridRow {
    pub h: f64,
    pub free_energy: f64,
    pub contact_fraction: f64,
    pub correlation_length: f64,
}

pub fn grid(law: &InterArrivalLaw, hs: &[f64]) -> Result<Vec<GridRow>> {
    hs.iter()
        .map(|&h| {
            let sol = free_energy(law, h, 1e-12)?;
            let cf = contact_fraction(law, h)?;
            Ok(GridRow {
                h,
                free_energy: sol.b,
                contact_fraction: cf.value,
                correlation_length: sol.correlation_length(),
            })
        })
        .collect()
}
