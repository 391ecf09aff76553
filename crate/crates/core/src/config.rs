//! Experiment configuration files.
//!
//! A config is TOML with top-level `mode` and `seed`, a `[law]` section in the
//! [`LawRecord`] format, an optional `[output]` section, and one section per
//! mode. Only the section named by `mode` is required; missing numeric keys
//! take the defaults documented on each field.
//!
//! ```toml
//! mode = "homog"
//! seed = 7
//!
//! [law]
//! alpha = 0.5
//! n_table = 256
//!
//! [homog]
//! h_min = -0.5
//! h_max = 0.5
//! ```

use serde::{Deserialize, Serialize};

use crate::error::PinError;
use crate::kernel::{InterArrivalLaw, LawRecord};
use crate::quenched::MAX_SIZE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Homog,
    Quenched,
    Certify,
    Variance,
    Smoothing,
    Sample,
    Scan,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Homog => "homog",
            Mode::Quenched => "quenched",
            Mode::Certify => "certify",
            Mode::Variance => "variance",
            Mode::Smoothing => "smoothing",
            Mode::Sample => "sample",
            Mode::Scan => "scan",
        }
    }
}

/// Why a config was rejected.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    /// Malformed TOML, unknown or duplicate keys; the message carries line and column.
    #[error("config syntax: {0}")]
    Syntax(String),
    #[error("config value out of range for `{field}`: {reason}")]
    Range { field: String, reason: String },
    #[error("config is missing the [{0}] section required by its mode")]
    MissingSection(&'static str),
}

fn range(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Range {
        field: field.to_string(),
        reason: reason.into(),
    }
}

fn default_out_dir() -> String {
    "out".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Artifact directory, default `out`; `--out` overrides it.
    #[serde(default = "default_out_dir")]
    pub dir: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: default_out_dir() }
    }
}

fn d_steps() -> usize {
    41
}
fn d_n() -> usize {
    1024
}
fn d_replicas() -> usize {
    64
}
fn d_sigmas() -> f64 {
    3.0
}
fn d_k() -> usize {
    16
}
fn d_cert_replicas() -> usize {
    200
}
fn d_check_n() -> usize {
    1024
}
fn d_check_replicas() -> usize {
    32
}
fn d_variance_n() -> usize {
    4096
}
fn d_variance_replicas() -> usize {
    1000
}
fn d_a() -> f64 {
    0.9
}
fn d_count() -> usize {
    1000
}

/// Grid of `steps` equally spaced values of `h` in `[h_min, h_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomogConfig {
    pub h_min: f64,
    pub h_max: f64,
    /// Default 41.
    #[serde(default = "d_steps")]
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuenchedConfig {
    pub beta: f64,
    pub h: f64,
    /// Default 1024.
    #[serde(default = "d_n")]
    pub n: usize,
    /// Default 64.
    #[serde(default = "d_replicas")]
    pub replicas: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertifyMethod {
    Simple,
    Iterated,
    /// Minimize over the `(gamma, k)` grid.
    Grid,
}

fn d_method() -> CertifyMethod {
    CertifyMethod::Grid
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifyConfig {
    pub beta: f64,
    pub h: f64,
    /// Default `grid`.
    #[serde(default = "d_method")]
    pub method: CertifyMethod,
    /// Required for `simple` and `iterated`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Iterated block length, default 16.
    #[serde(default = "d_k")]
    pub k: usize,
    /// Grid cap on `k`; without it the cap is `1/F(0, h + beta^2/2)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_cap: Option<usize>,
    /// Default 200.
    #[serde(default = "d_cert_replicas")]
    pub replicas: usize,
    /// Size of the free-energy consistency check run at certified points, default 1024.
    #[serde(default = "d_check_n")]
    pub check_n: usize,
    /// Default 32.
    #[serde(default = "d_check_replicas")]
    pub check_replicas: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VarianceConfig {
    pub beta: f64,
    /// Default 4096.
    #[serde(default = "d_variance_n")]
    pub n: usize,
    /// Default 1000.
    #[serde(default = "d_variance_replicas")]
    pub replicas: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmoothingConfig {
    pub beta: f64,
    pub hc_left: f64,
    pub hc_right: f64,
    pub deltas: Vec<f64>,
    /// Default 1024.
    #[serde(default = "d_n")]
    pub n: usize,
    /// Default 64.
    #[serde(default = "d_replicas")]
    pub replicas: usize,
    /// Block length for an optional rare-stretch estimate at the first delta.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell: Option<usize>,
    /// Success fraction of the rare-stretch event, default 0.9.
    #[serde(default = "d_a")]
    pub a: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleConfig {
    pub beta: f64,
    pub h: f64,
    pub n: usize,
    /// Number of paths, default 1000.
    #[serde(default = "d_count")]
    pub count: usize,
    /// Disorder replica index, default 0.
    #[serde(default)]
    pub replica: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub beta: f64,
    pub h_min: f64,
    pub h_max: f64,
    /// Default 41.
    #[serde(default = "d_steps")]
    pub steps: usize,
    /// Default 1024.
    #[serde(default = "d_n")]
    pub n: usize,
    /// Default 64.
    #[serde(default = "d_replicas")]
    pub replicas: usize,
    /// Default 3.
    #[serde(default = "d_sigmas")]
    pub threshold_sigmas: f64,
    /// Known delocalized point raising the left end of the bracket.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certified_left: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    /// Master seed, default 0.
    #[serde(default)]
    pub seed: u64,
    pub law: LawRecord,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub homog: Option<HomogConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quenched: Option<QuenchedConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certify: Option<CertifyConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variance: Option<VarianceConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smoothing: Option<SmoothingConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample: Option<SampleConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanConfig>,
}

fn finite(field: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(range(field, format!("must be finite, got {v}")))
    }
}

fn nonneg(field: &str, v: f64) -> Result<(), ConfigError> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(range(field, format!("must be finite and nonnegative, got {v}")))
    }
}

fn size(field: &str, v: usize) -> Result<(), ConfigError> {
    if (1..=MAX_SIZE).contains(&v) {
        Ok(())
    } else {
        Err(range(field, format!("must lie in [1, {MAX_SIZE}], got {v}")))
    }
}

fn at_least(field: &str, v: usize, min: usize) -> Result<(), ConfigError> {
    if v >= min {
        Ok(())
    } else {
        Err(range(field, format!("must be at least {min}, got {v}")))
    }
}

fn interval(lo_field: &str, lo: f64, hi: f64) -> Result<(), ConfigError> {
    if lo < hi {
        Ok(())
    } else {
        Err(range(lo_field, format!("must be below the upper end {hi}, got {lo}")))
    }
}

impl ExperimentConfig {
    pub fn law(&self) -> Result<InterArrivalLaw, ConfigError> {
        self.law.build().map_err(|e| match e {
            PinError::InvalidParameter { field, reason } => range(&format!("law.{field}"), reason),
            other => range("law", other.to_string()),
        })
    }

    /// Range checks for the law and the active mode section.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.law()?;
        match self.mode {
            Mode::Homog => {
                let c = self.homog.as_ref().ok_or(ConfigError::MissingSection("homog"))?;
                finite("homog.h_min", c.h_min)?;
                finite("homog.h_max", c.h_max)?;
                interval("homog.h_min", c.h_min, c.h_max)?;
                at_least("homog.steps", c.steps, 2)?;
            }
            Mode::Quenched => {
                let c = self.quenched.as_ref().ok_or(ConfigError::MissingSection("quenched"))?;
                nonneg("quenched.beta", c.beta)?;
                finite("quenched.h", c.h)?;
                size("quenched.n", c.n)?;
                at_least("quenched.replicas", c.replicas, 2)?;
            }
            Mode::Certify => {
                let c = self.certify.as_ref().ok_or(ConfigError::MissingSection("certify"))?;
                nonneg("certify.beta", c.beta)?;
                finite("certify.h", c.h)?;
                if let Some(g) = c.gamma {
                    if !(g > 0.0 && g < 1.0) {
                        return Err(range("certify.gamma", format!("must lie strictly in (0, 1), got {g}")));
                    }
                } else if c.method != CertifyMethod::Grid {
                    return Err(range("certify.gamma", "required unless method = \"grid\""));
                }
                size("certify.k", c.k)?;
                if let Some(cap) = c.k_cap {
                    size("certify.k_cap", cap)?;
                }
                at_least("certify.replicas", c.replicas, 2)?;
                size("certify.check_n", c.check_n)?;
                at_least("certify.check_replicas", c.check_replicas, 2)?;
            }
            Mode::Variance => {
                let c = self.variance.as_ref().ok_or(ConfigError::MissingSection("variance"))?;
                nonneg("variance.beta", c.beta)?;
                size("variance.n", c.n)?;
                at_least("variance.replicas", c.replicas, 2)?;
            }
            Mode::Smoothing => {
                let c = self.smoothing.as_ref().ok_or(ConfigError::MissingSection("smoothing"))?;
                if !(c.beta > 0.0 && c.beta.is_finite()) {
                    return Err(range("smoothing.beta", format!("must be positive, got {}", c.beta)));
                }
                finite("smoothing.hc_left", c.hc_left)?;
                finite("smoothing.hc_right", c.hc_right)?;
                if c.hc_right < c.hc_left {
                    return Err(range("smoothing.hc_right", "must not be below hc_left"));
                }
                if c.deltas.is_empty() || c.deltas.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
                    return Err(range("smoothing.deltas", "must be a nonempty list of positive values"));
                }
                size("smoothing.n", c.n)?;
                at_least("smoothing.replicas", c.replicas, 2)?;
                if let Some(ell) = c.ell {
                    size("smoothing.ell", ell)?;
                }
                if !(c.a > 0.0 && c.a < 1.0) {
                    return Err(range("smoothing.a", format!("must lie strictly in (0, 1), got {}", c.a)));
                }
            }
            Mode::Sample => {
                let c = self.sample.as_ref().ok_or(ConfigError::MissingSection("sample"))?;
                nonneg("sample.beta", c.beta)?;
                finite("sample.h", c.h)?;
                size("sample.n", c.n)?;
                at_least("sample.count", c.count, 1)?;
            }
            Mode::Scan => {
                let c = self.scan.as_ref().ok_or(ConfigError::MissingSection("scan"))?;
                nonneg("scan.beta", c.beta)?;
                finite("scan.h_min", c.h_min)?;
                finite("scan.h_max", c.h_max)?;
                interval("scan.h_min", c.h_min, c.h_max)?;
                at_least("scan.steps", c.steps, 2)?;
                size("scan.n", c.n)?;
                at_least("scan.replicas", c.replicas, 2)?;
                nonneg("scan.threshold_sigmas", c.threshold_sigmas)?;
                if let Some(l) = c.certified_left {
                    finite("scan.certified_left", l)?;
                }
            }
        }
        Ok(())
    }

    /// Canonical TOML text: every default filled in, fixed key order.
    pub fn to_canonical(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// Strict parse followed by [`ExperimentConfig::validate`].
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let config: ExperimentConfig = toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

/// `steps` equally spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    (0..steps)
        .map(|i| {
            if i + 1 == steps {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (steps - 1) as f64
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "mode = \"homog\"\n[law]\nalpha = 0.5\nn_table = 64\n[homog]\nh_min = -0.5\nh_max = 0.5\n";

    #[test]
    fn minimal_config_round_trips_canonically() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.seed, 0);
        assert_eq!(c.homog.as_ref().unwrap().steps, 41);
        let canon = c.to_canonical();
        let again = parse_config(&canon).unwrap();
        assert_eq!(again, c);
        assert_eq!(again.to_canonical(), canon);
    }

    #[test]
    fn negative_alpha_names_alpha() {
        let text = MINIMAL.replace("alpha = 0.5", "alpha = -1.0");
        match parse_config(&text) {
            Err(ConfigError::Range { field, .. }) => assert!(field.contains("alpha"), "{field}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn duplicate_and_unknown_keys_are_rejected() {
        let dup = MINIMAL.replace("n_table = 64\n", "n_table = 64\nn_table = 65\n");
        assert!(matches!(parse_config(&dup), Err(ConfigError::Syntax(_))));
        let unknown = MINIMAL.replace("[homog]\n", "[homog]\nwidth = 3\n");
        assert!(matches!(parse_config(&unknown), Err(ConfigError::Syntax(_))));
    }

    #[test]
    fn syntax_errors_carry_a_position() {
        let Err(ConfigError::Syntax(msg)) = parse_config("mode = \"homog\"\n[law\n") else {
            panic!("expected a syntax error");
        };
        assert!(msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn missing_mode_section() {
        let text = MINIMAL.replace("mode = \"homog\"", "mode = \"scan\"");
        assert_eq!(parse_config(&text), Err(ConfigError::MissingSection("scan")));
    }

    #[test]
    fn range_errors_name_the_field() {
        let text = MINIMAL.replace("mode = \"homog\"", "mode = \"quenched\"")
            + "[quenched]\nbeta = -1.0\nh = 0.0\n";
        match parse_config(&text) {
            Err(ConfigError::Range { field, .. }) => assert_eq!(field, "quenched.beta"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn linspace_hits_both_ends() {
        let v = linspace(-1.0, 0.3, 14);
        assert_eq!(v.len(), 14);
        assert_eq!(v[0], -1.0);
        assert_eq!(v[13], 0.3);
    }
}
