//! Experiment runner behind the `pinlab` binary.
//!
//! Every mode writes `<mode>.json` (and `<mode>.csv` for tabular modes) into
//! the output directory. JSON artifacts carry the canonical config text under
//! `"config"`; CSV artifacts start with the same text as `#` lines.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::bounds::{grid_search, iterated_certificate, simple_certificate, Certificate, IteratedOptions};
use crate::config::{linspace, CertifyMethod, ConfigError, ExperimentConfig, Mode};
use crate::error::PinError;
use crate::homogeneous::{critical_asymptotics, grid, hc0};
use crate::quenched::{annealed_reference, critical_scan, free_energy_mc, variance_at_annealed_critical, DisorderSample};
use crate::sampler::{contact_statistics, sample_paths, write_occupation_csv};
use crate::smoothing::{rare_stretch_lower_bound, rare_stretch_prob, smoothing_check, RareStretchConfig};

/// Failure of a run, mapped onto the process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Numeric(PinError),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("contradiction: {0}")]
    Contradiction(String),
    #[error("corrupt artifact {path}: {reason}")]
    Artifact { path: PathBuf, reason: String },
}

impl From<PinError> for CliError {
    fn from(e: PinError) -> Self {
        match e {
            PinError::ResourceLimit(msg) => CliError::Resource(msg),
            other => CliError::Numeric(other),
        }
    }
}

impl CliError {
    /// 1 i/o, 2 config or numerical input, 3 resource limit, 4 contradiction.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Artifact { .. } => 1,
            CliError::Config(_) | CliError::Numeric(_) => 2,
            CliError::Resource(_) => 3,
            CliError::Contradiction(_) => 4,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Read and parse a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    Ok(crate::config::parse_config(&text)?)
}

/// Paths written by a run, and the contradiction found by its self-check, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub artifacts: Vec<PathBuf>,
    pub contradiction: Option<String>,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    mode: &'static str,
    seed: u64,
    config: &'a str,
    result: T,
}

struct Writer {
    dir: PathBuf,
    canonical: String,
    mode: Mode,
    seed: u64,
    written: Vec<PathBuf>,
}

impl Writer {
    fn json<T: Serialize>(&mut self, result: &T) -> Result<(), CliError> {
        let env = Envelope {
            mode: self.mode.name(),
            seed: self.seed,
            config: &self.canonical,
            result,
        };
        let mut text = serde_json::to_string_pretty(&env).expect("report serializes");
        text.push('\n');
        self.write(&format!("{}.json", self.mode.name()), text.as_bytes())
    }

    fn csv(&mut self, body: &[u8]) -> Result<(), CliError> {
        let mut text = String::new();
        for line in self.canonical.lines() {
            let _ = writeln!(text, "# {line}");
        }
        let mut bytes = text.into_bytes();
        bytes.extend_from_slice(body);
        self.write(&format!("{}.csv", self.mode.name()), &bytes)
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(io_err(&path))?;
        self.written.push(path);
        Ok(())
    }
}

fn csv_rows<S: Serialize>(rows: &[S]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory csv");
    }
    w.into_inner().expect("in-memory csv")
}

#[derive(Serialize)]
struct HomogReport {
    hc0: f64,
    critical: Option<crate::homogeneous::CriticalAsymptotics>,
    rows: Vec<crate::homogeneous::GridRow>,
}

#[derive(Serialize)]
struct QuenchedReport {
    estimate: crate::quenched::FreeEnergyEstimate,
    annealed: crate::quenched::AnnealedReference,
}

#[derive(Debug, Clone, Copy, Serialize)]
struct ConsistencyCheck {
    f_mc: f64,
    std_error: f64,
    n: usize,
    replicas: usize,
    consistent: bool,
}

#[derive(Serialize)]
struct CertifyReport {
    method: CertifyMethod,
    beta: f64,
    h: f64,
    hc_ann: f64,
    certified: bool,
    certificates: Vec<Certificate>,
    consistency: Option<ConsistencyCheck>,
}

#[derive(Serialize)]
struct SmoothingOutput {
    report: crate::smoothing::SmoothingReport,
    rare_stretch: Option<RareStretchOutput>,
}

#[derive(Serialize)]
struct RareStretchOutput {
    ell: usize,
    a: f64,
    delta: f64,
    h: f64,
    estimate: Option<crate::smoothing::RareStretchEstimate>,
    bound: Option<crate::smoothing::RareStretchBound>,
    note: Option<String>,
}

#[derive(Serialize)]
struct SampleReport {
    beta: f64,
    h: f64,
    replica: u64,
    statistics: crate::sampler::ContactStatistics,
    contacts: Vec<Vec<u64>>,
}

/// Execute `config`, writing artifacts into `out_dir` (created if missing).
pub fn run(config: &ExperimentConfig, out_dir: &Path) -> Result<RunOutcome, CliError> {
    config.validate()?;
    let law = config.law()?;
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let mut w = Writer {
        dir: out_dir.to_path_buf(),
        canonical: config.to_canonical(),
        mode: config.mode,
        seed: config.seed,
        written: Vec::new(),
    };
    let seed = config.seed;
    let mut contradiction = None;
    match config.mode {
        Mode::Homog => {
            let c = config.homog.as_ref().expect("validated");
            let rows = grid(&law, &linspace(c.h_min, c.h_max, c.steps))?;
            w.csv(&csv_rows(&rows))?;
            w.json(&HomogReport {
                hc0: hc0(&law),
                critical: critical_asymptotics(&law).ok(),
                rows,
            })?;
        }
        Mode::Quenched => {
            let c = config.quenched.as_ref().expect("validated");
            let estimate = free_energy_mc(&law, c.beta, c.h, c.n, c.replicas, seed)?;
            let annealed = annealed_reference(&law, c.beta, c.h)?;
            w.json(&QuenchedReport { estimate, annealed })?;
        }
        Mode::Certify => {
            let c = config.certify.as_ref().expect("validated");
            let certificates = match c.method {
                CertifyMethod::Simple => vec![simple_certificate(&law, c.beta, c.h, c.gamma.expect("validated"))?],
                CertifyMethod::Iterated => {
                    let opts = IteratedOptions {
                        replicas: c.replicas,
                        seed,
                        spot_checks: true,
                    };
                    let pair = iterated_certificate(&law, c.beta, c.h, c.gamma.expect("validated"), c.k, opts)?;
                    vec![pair.rigorous, pair.statistical]
                }
                CertifyMethod::Grid => {
                    let g = grid_search(&law, c.beta, c.h, c.k_cap, c.replicas, seed, false)?;
                    vec![g.best_simple, g.best_rigorous, g.best_statistical]
                }
            };
            let certified = certificates.iter().any(|x| x.is_certified());
            let consistency = if certified {
                let est = free_energy_mc(&law, c.beta, c.h, c.check_n, c.check_replicas, seed)?;
                let consistent = est.value <= 3.0 * est.std_error;
                if !consistent {
                    contradiction = Some(format!(
                        "certified delocalized at (beta = {}, h = {}) but F_mc = {} > 3 x {}",
                        c.beta, c.h, est.value, est.std_error
                    ));
                }
                Some(ConsistencyCheck {
                    f_mc: est.value,
                    std_error: est.std_error,
                    n: c.check_n,
                    replicas: c.check_replicas,
                    consistent,
                })
            } else {
                None
            };
            w.json(&CertifyReport {
                method: c.method,
                beta: c.beta,
                h: c.h,
                hc_ann: hc0(&law) - 0.5 * c.beta * c.beta,
                certified,
                certificates,
                consistency,
            })?;
        }
        Mode::Variance => {
            let c = config.variance.as_ref().expect("validated");
            let report = variance_at_annealed_critical(&law, c.beta, c.n, c.replicas, seed)?;
            w.json(&report)?;
        }
        Mode::Smoothing => {
            let c = config.smoothing.as_ref().expect("validated");
            let report = smoothing_check(&law, c.beta, (c.hc_left, c.hc_right), &c.deltas, c.n, c.replicas, seed)?;
            let rare_stretch = c.ell.map(|ell| {
                let delta = c.deltas[0];
                let cfg = RareStretchConfig {
                    ell,
                    a: c.a,
                    delta,
                    beta: c.beta,
                    h: c.hc_right,
                    replicas: c.replicas,
                };
                let mut out = RareStretchOutput {
                    ell,
                    a: c.a,
                    delta,
                    h: c.hc_right,
                    estimate: None,
                    bound: None,
                    note: None,
                };
                match rare_stretch_prob(&law, &cfg, Some(report.rows[0].f_mc), seed) {
                    Ok(est) => {
                        out.bound = rare_stretch_lower_bound(&law, c.a, ell, est.p_ell, est.f_shifted).ok();
                        out.estimate = Some(est);
                    }
                    Err(e) => out.note = Some(e.to_string()),
                }
                out
            });
            w.json(&SmoothingOutput { report, rare_stretch })?;
        }
        Mode::Sample => {
            let c = config.sample.as_ref().expect("validated");
            let disorder = DisorderSample::new(c.beta, c.h, seed, c.replica, c.n);
            let samples = sample_paths(&law, &disorder, c.n, c.count, seed)?;
            let statistics = contact_statistics(&samples)?;
            let mut body = Vec::new();
            write_occupation_csv(&mut body, &samples).expect("in-memory csv");
            w.csv(&body)?;
            w.json(&SampleReport {
                beta: c.beta,
                h: c.h,
                replica: c.replica,
                statistics,
                contacts: samples.into_iter().map(|s| s.points).collect(),
            })?;
        }
        Mode::Scan => {
            let c = config.scan.as_ref().expect("validated");
            let hs = linspace(c.h_min, c.h_max, c.steps);
            let scan = critical_scan(&law, c.beta, &hs, c.n, c.replicas, c.threshold_sigmas, seed, c.certified_left)?;
            w.csv(&csv_rows(&scan.rows))?;
            w.json(&scan)?;
        }
    }
    Ok(RunOutcome {
        artifacts: w.written,
        contradiction,
    })
}

/// Summary of a set of JSON artifacts.
#[derive(Debug, Clone, PartialEq)]
pub struct Digest {
    pub text: String,
    pub contradictions: Vec<String>,
}

struct CurveRow {
    beta: f64,
    hc_ann: Option<f64>,
    hc0: Option<f64>,
    left: Option<f64>,
    right: Option<f64>,
    certified_max: Option<f64>,
}

fn field(v: &Value, path: &[&str]) -> Option<f64> {
    path.iter().try_fold(v, |cur, key| cur.get(key))?.as_f64()
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{v:.6}"))
}

/// One-page summary of scan, certify and smoothing artifacts, with a combined
/// critical-curve table. A certificate at or above a measured localized point
/// of the same `beta` is a contradiction.
pub fn report_digest(paths: &[PathBuf]) -> Result<Digest, CliError> {
    if paths.is_empty() {
        return Err(CliError::Artifact {
            path: PathBuf::new(),
            reason: "no artifacts given".into(),
        });
    }
    let mut lines = Vec::new();
    let mut curve: Vec<CurveRow> = Vec::new();
    let mut certified_points: Vec<(f64, f64, PathBuf)> = Vec::new();
    let mut contradictions = Vec::new();
    let row_for = |curve: &mut Vec<CurveRow>, beta: f64| -> usize {
        if let Some(i) = curve.iter().position(|r| r.beta == beta) {
            return i;
        }
        curve.push(CurveRow {
            beta,
            hc_ann: None,
            hc0: None,
            left: None,
            right: None,
            certified_max: None,
        });
        curve.len() - 1
    };
    for path in paths {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        let corrupt = |reason: &str| CliError::Artifact {
            path: path.clone(),
            reason: reason.to_string(),
        };
        let v: Value = serde_json::from_str(&text).map_err(|e| corrupt(&e.to_string()))?;
        let mode = v.get("mode").and_then(Value::as_str).ok_or_else(|| corrupt("missing mode"))?;
        let result = v.get("result").ok_or_else(|| corrupt("missing result"))?;
        let name = path.display();
        match mode {
            "scan" => {
                let beta = field(result, &["beta"]).ok_or_else(|| corrupt("scan without beta"))?;
                let i = row_for(&mut curve, beta);
                let r = &mut curve[i];
                r.hc_ann = field(result, &["hc_ann"]);
                r.hc0 = field(result, &["hc0"]);
                r.left = field(result, &["left"]);
                r.right = field(result, &["right"]);
                lines.push(format!(
                    "{name}: scan beta={beta}: hc_ann={} <= hc in [{}, {}] <= hc0={}",
                    fmt_opt(r.hc_ann),
                    fmt_opt(r.left),
                    fmt_opt(r.right),
                    fmt_opt(r.hc0)
                ));
            }
            "certify" => {
                let beta = field(result, &["beta"]).ok_or_else(|| corrupt("certify without beta"))?;
                let h = field(result, &["h"]).ok_or_else(|| corrupt("certify without h"))?;
                let certs = result
                    .get("certificates")
                    .and_then(Value::as_array)
                    .ok_or_else(|| corrupt("certify without certificates"))?;
                for c in certs {
                    let verdict = c.get("verdict").and_then(Value::as_str).unwrap_or("?");
                    let grade = c.get("grade").and_then(Value::as_str).unwrap_or("?");
                    let kind = c.get("kind").and_then(Value::as_str).unwrap_or("?");
                    lines.push(format!(
                        "{name}: certificate {kind}/{grade} beta={beta} h={h}: rho={} gamma={} k={} -> {verdict}",
                        fmt_opt(field(c, &["rho"])),
                        fmt_opt(field(c, &["gamma"])),
                        c.get("k").and_then(Value::as_u64).unwrap_or(0)
                    ));
                }
                let i = row_for(&mut curve, beta);
                curve[i].hc_ann = curve[i].hc_ann.or(field(result, &["hc_ann"]));
                if result.get("certified").and_then(Value::as_bool) == Some(true) {
                    curve[i].certified_max = Some(curve[i].certified_max.map_or(h, |m| m.max(h)));
                    certified_points.push((beta, h, path.clone()));
                }
                if result.pointer("/consistency/consistent").and_then(Value::as_bool) == Some(false) {
                    contradictions.push(format!("{name}: certified point has a positive Monte Carlo free energy"));
                }
            }
            "smoothing" => {
                let rows = result
                    .pointer("/report/rows")
                    .and_then(Value::as_array)
                    .ok_or_else(|| corrupt("smoothing without rows"))?;
                let count = |v: &str| rows.iter().filter(|r| r.get("verdict").and_then(Value::as_str) == Some(v)).count();
                lines.push(format!(
                    "{name}: smoothing beta={}: {} ok, {} inconclusive, {} violations",
                    fmt_opt(field(result, &["report", "beta"])),
                    count("ok"),
                    count("inconclusive"),
                    count("violation")
                ));
            }
            other => lines.push(format!("{name}: {other} artifact")),
        }
    }
    for (beta, h, path) in &certified_points {
        if let Some(r) = curve.iter().find(|r| r.beta == *beta).and_then(|r| r.right) {
            if *h >= r {
                contradictions.push(format!(
                    "{}: certificate at h={h} lies in the measured localized region h >= {r} (beta={beta})",
                    path.display()
                ));
            }
        }
    }
    let mut text = String::from("pinlab digest\n");
    for l in &lines {
        let _ = writeln!(text, "  {l}");
    }
    if !curve.is_empty() {
        curve.sort_by(|a, b| a.beta.total_cmp(&b.beta));
        let _ = writeln!(text, "critical curve\n  beta        hc_ann      certified   left        right       hc0");
        for r in &curve {
            let _ = writeln!(
                text,
                "  {:<11} {:<11} {:<11} {:<11} {:<11} {}",
                r.beta,
                fmt_opt(r.hc_ann),
                fmt_opt(r.certified_max),
                fmt_opt(r.left),
                fmt_opt(r.right),
                fmt_opt(r.hc0)
            );
        }
    }
    for c in &contradictions {
        let _ = writeln!(text, "CONTRADICTION {c}");
    }
    Ok(Digest { text, contradictions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn homog_config() -> ExperimentConfig {
        parse_config("mode = \"homog\"\nseed = 3\n[law]\nalpha = 0.5\nn_table = 32\n[homog]\nh_min = -0.2\nh_max = 0.4\nsteps = 4\n")
            .unwrap()
    }

    #[test]
    fn homog_emits_grid_csv_with_config_echo() {
        let dir = tempfile::tempdir().unwrap();
        let out = run(&homog_config(), dir.path()).unwrap();
        assert_eq!(out.artifacts.len(), 2);
        let csv = fs::read_to_string(dir.path().join("homog.csv")).unwrap();
        assert!(csv.starts_with("# mode = \"homog\""));
        let header = csv.lines().find(|l| !l.starts_with('#')).unwrap();
        assert_eq!(header, "h,free_energy,contact_fraction,correlation_length");
        assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 5);
    }

    #[test]
    fn exit_codes_are_distinct() {
        let codes = [
            CliError::Io {
                path: PathBuf::new(),
                source: std::io::Error::other("x"),
            }
            .exit_code(),
            CliError::Config(ConfigError::MissingSection("scan")).exit_code(),
            CliError::from(PinError::ResourceLimit("x".into())).exit_code(),
            CliError::Contradiction("x".into()).exit_code(),
        ];
        assert_eq!(codes, [1, 2, 3, 4]);
    }

    #[test]
    fn digest_rejects_empty_and_corrupt_input() {
        assert!(report_digest(&[]).is_err());
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.json");
        fs::write(&p, "{ not json").unwrap();
        assert!(report_digest(&[p]).is_err());
    }

    #[test]
    fn digest_flags_certificate_inside_localized_bracket() {
        let dir = tempfile::tempdir().unwrap();
        let scan = dir.path().join("scan.json");
        let cert = dir.path().join("certify.json");
        fs::write(
            &scan,
            r#"{"mode":"scan","result":{"beta":1.0,"hc_ann":-0.5,"hc0":0.0,"left":-0.5,"right":-0.3}}"#,
        )
        .unwrap();
        fs::write(
            &cert,
            r#"{"mode":"certify","result":{"beta":1.0,"h":-0.2,"hc_ann":-0.5,"certified":true,"certificates":[]}}"#,
        )
        .unwrap();
        let d = report_digest(&[scan.clone(), cert]).unwrap();
        assert_eq!(d.contradictions.len(), 1);
        assert!(d.text.contains("CONTRADICTION"));
        let ok = report_digest(&[scan]).unwrap();
        assert!(ok.contradictions.is_empty());
        assert!(ok.text.contains("critical curve"));
    }
}
