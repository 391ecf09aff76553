//! Inter-arrival laws and renewal-process primitives.
//!
//! A law is an explicit table `K(1..=n_table)` optionally followed by an
//! analytic power tail `w c n^{-(1+alpha)} e^{-d n}` on a sublattice of period
//! `p`. Tilting multiplies the tail by `e^{h - b n}`, so the weight `w` and
//! the decay `d` are carried along instead of being folded into a table.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, PinError, Result};
use crate::numeric::{compensated_sum, dot, lattice_tail_sum, tail_sum};
use crate::rng::{stream, Domain};

/// Tolerance on `total_mass + k_infinity = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Default tolerance for analytic tail sums.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// Analytic tail beyond the explicit table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerTail {
    pub alpha: f64,
    /// On-lattice constant: `K(n) ~ c_k n^{-(1+alpha)}` for `n = 0 mod period`.
    pub c_k: f64,
    pub period: u64,
    /// Log of the multiplicative weight accumulated by tilting.
    pub log_weight: f64,
    /// Exponential decay rate accumulated by tilting.
    pub decay: f64,
}

impl PowerTail {
    fn exponent(&self) -> f64 {
        1.0 + self.alpha
    }

    fn prefactor(&self) -> f64 {
        self.c_k * self.log_weight.exp()
    }

    fn on_lattice(&self, n: u64) -> bool {
        n.is_multiple_of(self.period)
    }

    fn value(&self, n: u64) -> f64 {
        if !self.on_lattice(n) {
            return 0.0;
        }
        let nf = n as f64;
        self.prefactor() * (-self.decay * nf).exp() * nf.powf(-self.exponent())
    }

    /// `sum_{n > m} n^p e^{-b n} K(n)` over the tail, with error estimate.
    fn moment_beyond(&self, m: u64, extra_decay: f64, power: f64) -> (f64, f64) {
        let t = lattice_tail_sum(
            self.exponent() - power,
            self.decay + extra_decay,
            m,
            self.period,
        );
        (self.prefactor() * t.value, self.prefactor() * t.error)
    }
}

/// A law on `{1, 2, ...} U {inf}`.
#[derive(Debug, Clone, PartialEq)]
pub struct InterArrivalLaw {
    table: Vec<f64>,
    tail: Option<PowerTail>,
    k_infinity: f64,
    total_mass: f64,
    tail_mass: f64,
    junction_mismatch: Option<f64>,
    /// `cumulative[i] = K(1) + ... + K(i)`, `cumulative[0] = 0`.
    cumulative: Vec<f64>,
}

impl InterArrivalLaw {
    fn assemble(table: Vec<f64>, tail: Option<PowerTail>, k_infinity: f64) -> Self {
        let n_table = table.len() as u64;
        let tail_mass = tail.map_or(0.0, |t| t.moment_beyond(n_table, 0.0, 0.0).0);
        let mut cumulative = Vec::with_capacity(table.len() + 1);
        cumulative.push(0.0);
        let mut acc = 0.0;
        for &k in &table {
            acc += k;
            cumulative.push(acc);
        }
        let table_mass = compensated_sum(table.iter().rev().copied());
        let junction_mismatch = tail.and_then(|t| {
            let last = (1..=n_table).rev().find(|&n| t.on_lattice(n))?;
            let analytic = t.value(last);
            Some((table[last as usize - 1] - analytic).abs() / analytic)
        });
        InterArrivalLaw {
            table,
            tail,
            k_infinity,
            total_mass: table_mass + tail_mass,
            tail_mass,
            junction_mismatch,
            cumulative,
        }
    }

    /// Pure power law `K(n) = c n^{-(1+alpha)}` with `c` fixed by the mass
    /// `1 - k_infinity`.
    pub fn power_law(alpha: f64, k_infinity: f64, n_table: usize, tail_tol: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(invalid("alpha", format!("must be a positive number, got {alpha}")));
        }
        if !(0.0..1.0).contains(&k_infinity) {
            return Err(invalid("k_infinity", format!("must lie in [0, 1), got {k_infinity}")));
        }
        if n_table < 2 {
            return Err(invalid("n_table", format!("must be at least 2, got {n_table}")));
        }
        if !(tail_tol > 0.0) {
            return Err(invalid("tail_tol", format!("must be positive, got {tail_tol}")));
        }
        let s = 1.0 + alpha;
        let remainder = tail_sum(s, 0.0, n_table as u64);
        let head = compensated_sum((1..=n_table).rev().map(|n| (n as f64).powf(-s)));
        let zeta = head + remainder.value;
        let c = (1.0 - k_infinity) / zeta;
        if c * remainder.error > tail_tol {
            return Err(PinError::TailTolerance {
                requested: tail_tol,
                achievable: c * remainder.error,
            });
        }
        let table = (1..=n_table).map(|n| c * (n as f64).powf(-s)).collect();
        let tail = PowerTail {
            alpha,
            c_k: c,
            period: 1,
            log_weight: 0.0,
            decay: 0.0,
        };
        Ok(Self::assemble(table, Some(tail), k_infinity))
    }

    /// Finite-support law given by an explicit table.
    pub fn explicit(table: Vec<f64>, k_infinity: f64) -> Result<Self> {
        if table.is_empty() {
            return Err(invalid("table", "must contain at least one entry"));
        }
        if let Some(bad) = table.iter().find(|k| !(**k >= 0.0 && k.is_finite())) {
            return Err(invalid("table", format!("entries must be finite and nonnegative, got {bad}")));
        }
        if !(0.0..1.0).contains(&k_infinity) {
            return Err(invalid("k_infinity", format!("must lie in [0, 1), got {k_infinity}")));
        }
        let law = Self::assemble(table, None, k_infinity);
        law.check_normalization()?;
        Ok(law)
    }

    /// Explicit table followed by an analytic tail `c_k n^{-(1+alpha)}` on
    /// multiples of `period`. The caller is responsible for normalization.
    pub fn with_tail(
        table: Vec<f64>,
        alpha: f64,
        c_k: f64,
        period: u64,
        k_infinity: f64,
    ) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(invalid("alpha", format!("must be a positive number, got {alpha}")));
        }
        if !(c_k > 0.0 && c_k.is_finite()) {
            return Err(invalid("cK", format!("must be positive, got {c_k}")));
        }
        if period == 0 {
            return Err(invalid("period", "must be at least 1"));
        }
        if table.is_empty() {
            return Err(invalid("table", "must contain at least one entry"));
        }
        if let Some(bad) = table.iter().find(|k| !(**k >= 0.0 && k.is_finite())) {
            return Err(invalid("table", format!("entries must be finite and nonnegative, got {bad}")));
        }
        if !(0.0..1.0).contains(&k_infinity) {
            return Err(invalid("k_infinity", format!("must lie in [0, 1), got {k_infinity}")));
        }
        let tail = PowerTail {
            alpha,
            c_k,
            period,
            log_weight: 0.0,
            decay: 0.0,
        };
        let law = Self::assemble(table, Some(tail), k_infinity);
        law.check_normalization()?;
        Ok(law)
    }

    /// First return time to zero of the simple random walk: exact table
    /// `K(2n) = C(2n, n) / ((2n - 1) 4^n)` up to `n_table`, then the
    /// asymptotic tail on even integers with its constant fitted so the law
    /// is persistent.
    pub fn simple_random_walk(n_table: usize) -> Result<Self> {
        if n_table < 2 {
            return Err(invalid("n_table", format!("must be at least 2, got {n_table}")));
        }
        let mut table = vec![0.0; n_table];
        let mut u = 1.0; // P(S_{2n} = 0)
        for n in 1..=n_table / 2 {
            u *= (2 * n - 1) as f64 / (2 * n) as f64;
            table[2 * n - 1] = u / (2 * n - 1) as f64;
        }
        let table_mass = compensated_sum(table.iter().rev().copied());
        let shape = lattice_tail_sum(1.5, 0.0, n_table as u64, 2).value;
        let c_k = (1.0 - table_mass) / shape;
        let tail = PowerTail {
            alpha: 0.5,
            c_k,
            period: 2,
            log_weight: 0.0,
            decay: 0.0,
        };
        Ok(Self::assemble(table, Some(tail), 0.0))
    }

    /// Geometric law `K(n) = p (1 - p)^{n-1}`, truncated once the remaining
    /// mass drops below `1e-17`.
    pub fn geometric(p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(invalid("p", format!("must lie in (0, 1], got {p}")));
        }
        let mut table = Vec::new();
        let mut remaining = 1.0f64;
        while remaining > 1e-17 {
            table.push(p * remaining);
            remaining *= 1.0 - p;
        }
        Self::explicit(table, 0.0)
    }

    fn check_normalization(&self) -> Result<()> {
        if (self.total_mass + self.k_infinity - 1.0).abs() > NORMALIZATION_TOL {
            return Err(PinError::Normalization {
                mass: self.total_mass,
                k_infinity: self.k_infinity,
            });
        }
        Ok(())
    }

    /// `K(n)`, zero for `n = 0`.
    pub fn k(&self, n: u64) -> f64 {
        if n == 0 {
            0.0
        } else if n as usize <= self.table.len() {
            self.table[n as usize - 1]
        } else {
            self.tail.map_or(0.0, |t| t.value(n))
        }
    }

    /// `[K(0), K(1), ..., K(n_max)]`.
    pub fn weights(&self, n_max: usize) -> Vec<f64> {
        (0..=n_max as u64).map(|n| self.k(n)).collect()
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn n_table(&self) -> usize {
        self.table.len()
    }

    pub fn tail(&self) -> Option<&PowerTail> {
        self.tail.as_ref()
    }

    pub fn alpha(&self) -> Option<f64> {
        self.tail.map(|t| t.alpha)
    }

    /// On-lattice tail constant (after any tilt weight, before decay).
    pub fn c_k(&self) -> Option<f64> {
        self.tail.map(|t| t.prefactor())
    }

    /// Tail constant averaged over the lattice, `c_k / period`.
    pub fn c_k_effective(&self) -> Option<f64> {
        self.tail.map(|t| t.prefactor() / t.period as f64)
    }

    pub fn period(&self) -> u64 {
        self.tail.map_or(1, |t| t.period)
    }

    pub fn k_infinity(&self) -> f64 {
        self.k_infinity
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    /// Relative gap between the last on-lattice table entry and the analytic tail.
    pub fn junction_mismatch(&self) -> Option<f64> {
        self.junction_mismatch
    }

    pub fn is_persistent(&self) -> bool {
        self.k_infinity <= NORMALIZATION_TOL && (self.total_mass - 1.0).abs() <= NORMALIZATION_TOL
    }

    /// Whether the tail decays like a pure power (no tilt decay).
    pub fn has_heavy_tail(&self) -> bool {
        self.tail.is_some_and(|t| t.decay == 0.0)
    }

    /// `sum_{n > m} K(n)`.
    pub fn mass_beyond(&self, m: u64) -> f64 {
        let n_table = self.table.len() as u64;
        if m >= n_table {
            return self.tail.map_or(0.0, |t| t.moment_beyond(m, 0.0, 0.0).0);
        }
        let in_table = compensated_sum(self.table[m as usize..].iter().rev().copied());
        in_table + self.tail_mass
    }

    /// `P(tau_1 > m) = K(inf) + sum_{n > m} K(n)`.
    pub fn survival(&self, m: u64) -> f64 {
        self.k_infinity + self.mass_beyond(m)
    }

    /// `[P(tau_1 > 0), ..., P(tau_1 > n_max)]`.
    pub fn survival_table(&self, n_max: usize) -> Vec<f64> {
        let mut out = vec![0.0; n_max + 1];
        let beyond = self.survival(n_max as u64);
        out[n_max] = beyond;
        let mut acc = beyond - self.k_infinity;
        for m in (0..n_max).rev() {
            acc += self.k(m as u64 + 1);
            out[m] = self.k_infinity + acc;
        }
        out
    }

    /// `sum_n n^power e^{-extra_decay n} K(n)`; `+inf` when divergent.
    pub fn moment(&self, extra_decay: f64, power: f64) -> f64 {
        let head = compensated_sum(
            self.table
                .iter()
                .enumerate()
                .rev()
                .map(|(i, k)| {
                    let n = (i + 1) as f64;
                    k * n.powf(power) * (-extra_decay * n).exp()
                }),
        );
        let tail = self
            .tail
            .map_or(0.0, |t| t.moment_beyond(self.table.len() as u64, extra_decay, power).0);
        head + tail
    }

    /// `sum_{n > r} K(n)^gamma`, rounded up by the tail error estimate.
    /// `+inf` when divergent.
    pub fn power_sum_beyond(&self, gamma: f64, r: u64) -> f64 {
        let n_table = self.table.len() as u64;
        let head = if r < n_table {
            compensated_sum(self.table[r as usize..].iter().rev().map(|k| k.powf(gamma)))
        } else {
            0.0
        };
        let tail = self.tail.map_or(0.0, |t| {
            let start = r.max(n_table);
            let s = lattice_tail_sum(t.exponent() * gamma, t.decay * gamma, start, t.period);
            t.prefactor().powf(gamma) * (s.value + s.error)
        });
        (head + tail) * (1.0 + 4.0 * f64::EPSILON)
    }

    /// `[T(0), ..., T(r_max)]` with `T(r) = sum_{m > r} K(m)^gamma`, rounded up.
    pub fn power_tail_table(&self, gamma: f64, r_max: usize) -> Vec<f64> {
        let mut out = vec![0.0; r_max + 1];
        let mut acc = self.power_sum_beyond(gamma, r_max as u64);
        out[r_max] = acc;
        for r in (0..r_max).rev() {
            acc += self.k(r as u64 + 1).powf(gamma);
            out[r] = acc * (1.0 + 4.0 * f64::EPSILON);
        }
        out
    }

    /// `sum_n K(n)^gamma`.
    pub fn power_sum(&self, gamma: f64) -> f64 {
        self.power_sum_beyond(gamma, 0)
    }

    /// `E[tau_1]`, infinite for terminating or heavy-tailed laws.
    pub fn mean_interarrival(&self) -> f64 {
        if self.k_infinity > NORMALIZATION_TOL {
            return f64::INFINITY;
        }
        self.moment(0.0, 1.0)
    }

    /// `K_b(n) = e^{-b n + h} K(n)`. Normalization is not enforced.
    pub fn tilt(&self, h: f64, b: f64) -> Result<Self> {
        if !(b >= 0.0 && b.is_finite()) {
            return Err(invalid("b", format!("must be finite and nonnegative, got {b}")));
        }
        if !h.is_finite() {
            return Err(invalid("h", "must be finite"));
        }
        let table = self
            .table
            .iter()
            .enumerate()
            .map(|(i, k)| k * (h - b * (i + 1) as f64).exp())
            .collect();
        let tail = self.tail.map(|t| PowerTail {
            log_weight: t.log_weight + h,
            decay: t.decay + b,
            ..t
        });
        let mut law = Self::assemble(table, tail, 0.0);
        if law.total_mass > 1.0 + NORMALIZATION_TOL {
            return Err(PinError::TiltOverflow {
                mass: law.total_mass,
            });
        }
        law.k_infinity = (1.0 - law.total_mass).max(0.0);
        Ok(law)
    }

    /// Map a terminating law to the persistent law `K / (1 - K(inf))`.
    pub fn persistentize(&self) -> Persistentized {
        if self.is_persistent() {
            return Persistentized {
                law: self.clone(),
                h_shift: 0.0,
                already_persistent: true,
            };
        }
        let mass = self.total_mass;
        let table = self.table.iter().map(|k| k / mass).collect();
        let tail = self.tail.map(|t| PowerTail {
            log_weight: t.log_weight - mass.ln(),
            ..t
        });
        Persistentized {
            law: Self::assemble(table, tail, 0.0),
            h_shift: mass.ln(),
            already_persistent: false,
        }
    }

    /// Serializable description that rebuilds this law exactly.
    pub fn to_record(&self) -> Result<LawRecord> {
        if let Some(t) = self.tail {
            if t.log_weight != 0.0 || t.decay != 0.0 {
                return Err(PinError::Unsupported(
                    "serializing a tilted law; serialize the untilted law and the tilt instead".into(),
                ));
            }
        }
        Ok(LawRecord {
            alpha: self.alpha(),
            c_k: self.c_k(),
            k_infinity: self.k_infinity,
            n_table: self.table.len(),
            period: self.tail.map(|t| t.period).filter(|&p| p != 1),
            tail_tol: None,
            table: Some(self.table.clone()),
        })
    }
}

/// Output of [`InterArrivalLaw::persistentize`].
#[derive(Debug, Clone, PartialEq)]
pub struct Persistentized {
    pub law: InterArrivalLaw,
    /// Added to `h` when passing from the terminating to the persistent law.
    pub h_shift: f64,
    pub already_persistent: bool,
}

/// Key-value form of a law.
///
/// With `table` present the law is rebuilt verbatim (with the power tail
/// `cK n^{-(1+alpha)}` beyond it when `alpha` and `cK` are given). Without a
/// table, `alpha` selects a pure power law normalized to `1 - k_infinity`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(rename = "cK", default, skip_serializing_if = "Option::is_none")]
    pub c_k: Option<f64>,
    #[serde(default)]
    pub k_infinity: f64,
    pub n_table: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<f64>>,
}

impl LawRecord {
    pub fn build(&self) -> Result<InterArrivalLaw> {
        match (&self.table, self.alpha, self.c_k) {
            (Some(table), alpha, c_k) => {
                if table.len() != self.n_table {
                    return Err(invalid(
                        "n_table",
                        format!("is {} but the table has {} entries", self.n_table, table.len()),
                    ));
                }
                match (alpha, c_k) {
                    (Some(a), Some(c)) => InterArrivalLaw::with_tail(
                        table.clone(),
                        a,
                        c,
                        self.period.unwrap_or(1),
                        self.k_infinity,
                    ),
                    (None, None) => InterArrivalLaw::explicit(table.clone(), self.k_infinity),
                    _ => Err(invalid("cK", "alpha and cK must be given together")),
                }
            }
            (None, Some(alpha), c_k) => {
                if self.period.is_some_and(|p| p != 1) {
                    return Err(invalid("period", "a generated power law has period 1"));
                }
                let law = InterArrivalLaw::power_law(
                    alpha,
                    self.k_infinity,
                    self.n_table,
                    self.tail_tol.unwrap_or(DEFAULT_TAIL_TOL),
                )?;
                if let Some(c) = c_k {
                    let actual = law.c_k().unwrap_or(f64::NAN);
                    if (c - actual).abs() > 1e-12 * actual {
                        return Err(invalid(
                            "cK",
                            format!("{c} is inconsistent with the normalized value {actual}"),
                        ));
                    }
                }
                Ok(law)
            }
            (None, None, _) => Err(invalid("alpha", "required when no table is given")),
        }
    }
}

/// `u_n = P(n in tau)` for `n = 0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct RenewalFunctionTable {
    pub u: Vec<f64>,
}

impl RenewalFunctionTable {
    pub fn horizon(&self) -> usize {
        self.u.len() - 1
    }
}

/// `u_0 = 1`, `u_n = sum_{m=1}^n K(m) u_{n-m}`.
pub fn renewal_function(law: &InterArrivalLaw, n: usize) -> RenewalFunctionTable {
    let weights = law.weights(n);
    let krev: Vec<f64> = (0..n).map(|i| weights[n - i]).collect();
    let mut u = vec![0.0; n + 1];
    u[0] = 1.0;
    for m in 1..=n {
        u[m] = dot(&u[..m], &krev[n - m..]);
    }
    RenewalFunctionTable { u }
}

/// A realization of the renewal set intersected with `[0, N]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContactSet {
    pub points: Vec<u64>,
    pub horizon: u64,
}

impl ContactSet {
    /// `1` at every contact, `0` elsewhere, for sites `0..=N`.
    pub fn occupation(&self) -> Vec<u8> {
        let mut row = vec![0u8; self.horizon as usize + 1];
        for &p in &self.points {
            row[p as usize] = 1;
        }
        row
    }

    /// Contacts in `(0, N]` divided by `N`.
    pub fn fraction(&self) -> f64 {
        if self.horizon == 0 {
            return 0.0;
        }
        (self.points.len() - 1) as f64 / self.horizon as f64
    }
}

/// Inverse-CDF sampler for a fixed law.
#[derive(Debug, Clone)]
pub struct RenewalSampler<'a> {
    law: &'a InterArrivalLaw,
    last_positive: u64,
}

impl<'a> RenewalSampler<'a> {
    pub fn new(law: &'a InterArrivalLaw) -> Self {
        let last_positive = law
            .table
            .iter()
            .rposition(|&k| k > 0.0)
            .map_or(0, |i| i as u64 + 1);
        RenewalSampler { law, last_positive }
    }

    /// Inter-arrival for the uniform variate `v` in `[0, 1)`; `None` is `inf`.
    pub fn invert(&self, v: f64) -> Option<u64> {
        let law = self.law;
        let table_mass = *law.cumulative.last().unwrap_or(&0.0);
        if v < table_mass {
            let n = law.cumulative.partition_point(|&c| c <= v);
            return Some(n as u64);
        }
        let Some(tail) = law.tail else {
            if law.k_infinity > NORMALIZATION_TOL || self.last_positive == 0 {
                return None;
            }
            return Some(self.last_positive);
        };
        if v >= table_mass + law.tail_mass {
            return if law.k_infinity > NORMALIZATION_TOL {
                None
            } else {
                Some(u64::MAX)
            };
        }
        // smallest n beyond the table with mass_beyond(n) < target
        let target = law.tail_mass - (v - table_mass);
        let beyond = |n: u64| tail.moment_beyond(n, 0.0, 0.0).0;
        let mut lo = law.table.len() as u64;
        let mut hi = lo.max(1);
        loop {
            hi = hi.saturating_mul(2);
            if beyond(hi) < target {
                break;
            }
            if hi == u64::MAX || hi > (1u64 << 62) {
                return Some(u64::MAX);
            }
            lo = hi;
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if beyond(mid) < target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        // round up to the lattice
        let p = tail.period;
        Some(hi.div_ceil(p) * p)
    }
}

/// Forward simulation of the renewal set up to `N`.
pub fn sample_renewal(law: &InterArrivalLaw, n: u64, seed: u64, index: u64) -> ContactSet {
    let sampler = RenewalSampler::new(law);
    let mut rng = stream(seed, Domain::Renewal, index);
    let mut points = vec![0u64];
    let mut pos = 0u64;
    loop {
        let v: f64 = rng.random();
        match sampler.invert(v) {
            Some(step) if step <= n - pos => {
                pos += step;
                points.push(pos);
            }
            _ => break,
        }
    }
    ContactSet { points, horizon: n }
}

/// Intersection of two independent copies of the renewal.
#[derive(Debug, Clone, PartialEq)]
pub struct IntersectionStats {
    /// `partial[n] = sum_{m=1}^n u_m^2`, `partial[0] = 0`.
    pub partial: Vec<f64>,
    /// Extrapolated `gamma_2 = sum_{n >= 1} u_n^2`, `None` when divergent.
    pub gamma2: Option<f64>,
    /// Predicted growth exponent `2 alpha - 1` of the partial sums when divergent
    /// with a heavy tail, `1` for positive recurrent laws.
    pub growth_exponent: Option<f64>,
}

/// Renewal asymptotics `u_n ~ C n^{alpha - 1}` on visited sites, for `alpha < 1`.
pub fn renewal_asymptote(law: &InterArrivalLaw) -> Option<f64> {
    let t = law.tail?;
    if t.decay != 0.0 || t.alpha >= 1.0 {
        return None;
    }
    let a = t.alpha;
    let p = t.period as f64;
    // averaged constant c_k / p; visited sites carry a factor p
    Some(p * a * (std::f64::consts::PI * a).sin() / (std::f64::consts::PI * t.prefactor() / p))
}

pub fn intersection_stats(law: &InterArrivalLaw, n: usize) -> Result<IntersectionStats> {
    if !law.is_persistent() {
        return Err(PinError::NotPersistent {
            k_infinity: law.k_infinity,
        });
    }
    let u = renewal_function(law, n).u;
    let mut partial = vec![0.0; n + 1];
    for m in 1..=n {
        partial[m] = partial[m - 1] + u[m] * u[m];
    }
    let (gamma2, growth_exponent) = match law.tail {
        Some(t) if t.decay == 0.0 && t.alpha < 0.5 => {
            let c = renewal_asymptote(law).expect("heavy tail with alpha < 1");
            let rest = lattice_tail_sum(2.0 - 2.0 * t.alpha, 0.0, n as u64, t.period).value;
            (Some(partial[n] + c * c * rest), None)
        }
        Some(t) if t.decay == 0.0 && t.alpha < 1.0 => (None, Some(2.0 * t.alpha - 1.0)),
        _ => (None, Some(1.0)),
    };
    Ok(IntersectionStats {
        partial,
        gamma2,
        growth_exponent,
    })
}

/// Inter-arrival law of `tau intersect tau'` computed from `v_n = u_n^2` by
/// inverting the renewal equation. Exact on `1..=n`, truncated beyond.
pub fn intersection_law(law: &InterArrivalLaw, n: usize) -> Result<InterArrivalLaw> {
    if !law.is_persistent() {
        return Err(PinError::NotPersistent {
            k_infinity: law.k_infinity,
        });
    }
    let u = renewal_function(law, n).u;
    let v: Vec<f64> = u.iter().map(|x| x * x).collect();
    let mut k2 = vec![0.0; n + 1];
    // K2(m) = v_m - sum_{j=1}^{m-1} K2(j) v_{m-j}
    let vrev: Vec<f64> = (0..n).map(|i| v[n - i]).collect();
    for m in 1..=n {
        let conv = if m > 1 { dot(&k2[1..m], &vrev[n - m + 1..n]) } else { 0.0 };
        k2[m] = (v[m] - conv).max(0.0);
    }
    let table: Vec<f64> = k2[1..].to_vec();
    let mass = compensated_sum(table.iter().rev().copied());
    let mut out = InterArrivalLaw::assemble(table, None, 0.0);
    out.k_infinity = (1.0 - mass).max(0.0);
    Ok(out)
}
