//! Experiment configuration files.
//!
//! A config is TOML with a top-level `master_seed` and repeated
//! `[[experiment]]` tables:
//!
//! ```toml
//! master_seed = 20240601
//!
//! [[experiment]]
//! name = "size_garch_anchor"
//! kind = "size_table"
//! process = { model = "garch11", alpha0 = 0.5, alpha1 = 0.2, beta1 = 0.4 }
//! n_values = [1000]
//! m_exponents = [0.6]
//! reps = 5000
//! deltas = [0.3]
//! thetas = [0.25]
//! alphas = [0.01, 0.05, 0.10]
//! ```

use std::fmt;
use std::path::Path;

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::error::{LrvError, Result};
use crate::simulate::{LinearFilter, ProcessSpec};
use crate::spectral::{bandwidth_from_exponent, max_bandwidth};
use crate::whittle::DEFAULT_BOUNDS;

pub const MIN_N: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    CltQn,
    CltWhittle,
    SizeTable,
    DensitySamples,
    BiasRate,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::CltQn => "clt_qn",
            ExperimentKind::CltWhittle => "clt_whittle",
            ExperimentKind::SizeTable => "size_table",
            ExperimentKind::DensitySamples => "density_samples",
            ExperimentKind::BiasRate => "bias_rate",
        }
    }
}

impl std::str::FromStr for ExperimentKind {
    type Err = LrvError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "clt_qn" => ExperimentKind::CltQn,
            "clt_whittle" => ExperimentKind::CltWhittle,
            "size_table" => ExperimentKind::SizeTable,
            "density_samples" => ExperimentKind::DensitySamples,
            "bias_rate" => ExperimentKind::BiasRate,
            other => return Err(LrvError::Config(format!("unknown experiment kind `{other}`"))),
        })
    }
}

/// How the bandwidth is chosen for a sample of size `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MRule {
    /// `m = ⌊N^β⌋`.
    Exponent(f64),
    /// `m = ⌊r N⌋`.
    Ratio(f64),
    Fixed(usize),
}

impl MRule {
    pub fn bandwidth(&self, n: usize) -> Result<usize> {
        let max = max_bandwidth(n);
        let m = match *self {
            MRule::Exponent(beta) => return Ok(bandwidth_from_exponent(n, beta)),
            MRule::Ratio(r) => ((n as f64) * r * (1.0 + 1e-12)).floor() as usize,
            MRule::Fixed(m) => m,
        };
        if m < 1 || m > max {
            return Err(LrvError::BandwidthOutOfRange { m, max });
        }
        Ok(m)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            MRule::Exponent(_) => "exponent",
            MRule::Ratio(_) => "ratio",
            MRule::Fixed(_) => "fixed",
        }
    }

    pub fn param(&self) -> f64 {
        match *self {
            MRule::Exponent(b) => b,
            MRule::Ratio(r) => r,
            MRule::Fixed(m) => m as f64,
        }
    }
}

impl fmt::Display for MRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MRule::Exponent(b) => write!(f, "N^{b}"),
            MRule::Ratio(r) => write!(f, "{r}N"),
            MRule::Fixed(m) => write!(f, "{m}"),
        }
    }
}

/// Which statistic a density experiment samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityStatistic {
    /// `T^(R)` from the full change-point pipeline.
    Residual,
    /// `2√m(Ĥ - 1/2)` on the raw path.
    Whittle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SizeParams {
    pub deltas: Vec<f64>,
    pub thetas: Vec<f64>,
    pub alphas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub kind: ExperimentKind,
    pub process: ProcessSpec,
    pub n_values: Vec<usize>,
    pub m_rules: Vec<MRule>,
    pub reps: usize,
    pub master_seed: u64,
    pub size: Option<SizeParams>,
    pub bounds: (f64, f64),
    pub statistic: DensityStatistic,
    /// Skipped unless the runner is asked for full-table reproduction.
    pub full_only: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let cfg = |msg: String| Err(LrvError::Config(format!("experiment `{}`: {msg}", self.name)));
        self.process.validate()?;
        if self.reps < 1 {
            return Err(LrvError::InsufficientReps { reps: 0, min: 1 });
        }
        if self.n_values.is_empty() || self.n_values.iter().any(|&n| n < MIN_N) {
            return cfg(format!("n_values must be non-empty with every N >= {MIN_N}"));
        }
        if self.m_rules.is_empty() {
            return cfg("no bandwidth rule given".into());
        }
        for rule in &self.m_rules {
            match *rule {
                MRule::Exponent(b) if !(b > 0.0 && b < 1.0) => return cfg(format!("m exponent {b} outside (0, 1)")),
                MRule::Ratio(r) if !(r > 0.0 && r < 0.5) => return cfg(format!("m ratio {r} outside (0, 0.5)")),
                _ => {}
            }
            for &n in &self.n_values {
                rule.bandwidth(n)?;
            }
        }
        let (lo, hi) = self.bounds;
        if !(lo > 0.0 && lo < hi && hi < 1.0) {
            return Err(LrvError::InvalidBounds { lower: lo, upper: hi });
        }
        if let Some(size) = &self.size {
            if size.thetas.iter().any(|&t| !(t > 0.0 && t < 1.0)) {
                return cfg("every theta must lie in (0, 1)".into());
            }
            if size.deltas.iter().any(|d| !d.is_finite()) {
                return cfg("every delta must be finite".into());
            }
            if size.alphas.iter().any(|&a| !(a > 0.0 && a < 1.0)) {
                return cfg("every alpha must lie in (0, 1)".into());
            }
        }
        match self.kind {
            ExperimentKind::SizeTable => {
                let Some(size) = &self.size else {
                    return cfg("size_table needs deltas, thetas and alphas".into());
                };
                if size.deltas.is_empty() || size.thetas.is_empty() || size.alphas.is_empty() {
                    return cfg("size_table needs non-empty deltas, thetas and alphas".into());
                }
                if !matches!(self.process, ProcessSpec::Garch11 { .. } | ProcessSpec::StochVol { .. }) {
                    return cfg("size_table supports garch11 and sv processes".into());
                }
            }
            ExperimentKind::BiasRate
                if !matches!(self.process, ProcessSpec::Iid { .. } | ProcessSpec::Linear { .. } | ProcessSpec::Garch11 { .. }) =>
            {
                return cfg("bias_rate needs a process with summable autocovariances (iid, linear or garch11)".into());
            }
            _ => {}
        }
        Ok(())
    }

    /// Change-point design for density experiments: first (Δ, θ) pair, or
    /// no shift.
    pub fn density_shift(&self) -> (f64, f64) {
        self.size
            .as_ref()
            .and_then(|s| Some((*s.deltas.first()?, *s.thetas.first()?)))
            .unwrap_or((0.0, 0.5))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub master_seed: u64,
    pub experiments: Vec<ExperimentConfig>,
    /// Raw text the config was parsed from.
    pub source: String,
}

impl Config {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| LrvError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| LrvError::Config(e.to_string()))?;
        let master_seed = raw.master_seed.unwrap_or(0);
        let mut experiments = Vec::with_capacity(raw.experiment.len());
        for e in raw.experiment {
            experiments.push(e.resolve(master_seed)?);
        }
        let mut names: Vec<&str> = experiments.iter().map(|e| e.name.as_str()).collect();
        names.sort_unstable();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(LrvError::Config(format!("duplicate experiment name `{}`", w[0])));
        }
        for e in &experiments {
            e.validate()?;
        }
        Ok(Config {
            master_seed,
            experiments,
            source: text.to_string(),
        })
    }

    pub fn experiment(&self, name: &str) -> Option<&ExperimentConfig> {
        self.experiments.iter().find(|e| e.name == name)
    }

    /// Git-style object hash of the config text.
    pub fn content_hash(&self) -> String {
        content_hash(self.source.as_bytes())
    }
}

/// `sha256("blob <len>\0" ++ content)`, hex encoded.
pub fn content_hash(content: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", content.len()).as_bytes());
    h.update(content);
    hex::encode(h.finalize())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    master_seed: Option<u64>,
    #[serde(default)]
    experiment: Vec<RawExperiment>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    name: String,
    kind: String,
    process: RawProcess,
    n_values: Vec<usize>,
    m_exponents: Option<Vec<f64>>,
    m_ratios: Option<Vec<f64>>,
    m: Option<Vec<usize>>,
    reps: usize,
    seed: Option<u64>,
    deltas: Option<Vec<f64>>,
    thetas: Option<Vec<f64>>,
    alphas: Option<Vec<f64>>,
    bounds: Option<[f64; 2]>,
    statistic: Option<String>,
    #[serde(default)]
    full_only: bool,
}

#[derive(Deserialize)]
#[serde(tag = "model", rename_all = "lowercase", deny_unknown_fields)]
enum RawProcess {
    Iid {
        #[serde(default = "one")]
        variance: f64,
    },
    Linear {
        d: Option<f64>,
        coefficients: Option<Vec<f64>>,
        #[serde(default = "one")]
        variance: f64,
    },
    Garch11 {
        alpha0: f64,
        alpha1: f64,
        beta1: f64,
    },
    Sv {
        alpha: f64,
        phi: f64,
        sigma_w2: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl RawProcess {
    fn resolve(self) -> Result<ProcessSpec> {
        Ok(match self {
            RawProcess::Iid { variance } => ProcessSpec::Iid { variance },
            RawProcess::Linear { d, coefficients, variance } => {
                let filter = match (d, coefficients) {
                    (Some(d), None) => LinearFilter::PowerDecay { d },
                    (None, Some(c)) => LinearFilter::Explicit(c),
                    _ => return Err(LrvError::Config("linear process needs exactly one of `d` or `coefficients`".into())),
                };
                ProcessSpec::Linear { filter, variance }
            }
            RawProcess::Garch11 { alpha0, alpha1, beta1 } => ProcessSpec::Garch11 { alpha0, alpha1, beta1 },
            RawProcess::Sv { alpha, phi, sigma_w2 } => ProcessSpec::StochVol { alpha, phi, sigma_w2 },
        })
    }
}

impl RawExperiment {
    fn resolve(self, master_seed: u64) -> Result<ExperimentConfig> {
        let kind: ExperimentKind = self.kind.parse()?;
        let mut m_rules = Vec::new();
        let given = [self.m_exponents.is_some(), self.m_ratios.is_some(), self.m.is_some()];
        if given.iter().filter(|&&g| g).count() > 1 {
            return Err(LrvError::Config(format!(
                "experiment `{}`: give only one of m_exponents, m_ratios or m",
                self.name
            )));
        }
        m_rules.extend(self.m_exponents.unwrap_or_default().into_iter().map(MRule::Exponent));
        m_rules.extend(self.m_ratios.unwrap_or_default().into_iter().map(MRule::Ratio));
        m_rules.extend(self.m.unwrap_or_default().into_iter().map(MRule::Fixed));
        let size = match (self.deltas, self.thetas, self.alphas) {
            (None, None, None) => None,
            (d, t, a) => Some(SizeParams {
                deltas: d.unwrap_or_default(),
                thetas: t.unwrap_or_default(),
                alphas: a.unwrap_or_default(),
            }),
        };
        let statistic = match self.statistic.as_deref() {
            None | Some("residual") => DensityStatistic::Residual,
            Some("whittle") => DensityStatistic::Whittle,
            Some(other) => {
                return Err(LrvError::Config(format!(
                    "unknown statistic `{other}` (expected `residual` or `whittle`)"
                )))
            }
        };
        Ok(ExperimentConfig {
            name: self.name,
            kind,
            process: self.process.resolve()?,
            n_values: self.n_values,
            m_rules,
            reps: self.reps,
            master_seed: self.seed.unwrap_or(master_seed),
            size,
            bounds: self.bounds.map_or(DEFAULT_BOUNDS, |b| (b[0], b[1])),
            statistic,
            full_only: self.full_only,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
master_seed = 7

[[experiment]]
name = "size"
kind = "size_table"
process = { model = "garch11", alpha0 = 0.5, alpha1 = 0.2, beta1 = 0.4 }
n_values = [1000, 5000]
m_exponents = [0.6, 0.75]
reps = 10
deltas = [0.3]
thetas = [0.25]
alphas = [0.05]

[[experiment]]
name = "bias"
kind = "bias_rate"
process = { model = "linear", coefficients = [1.0, 0.5] }
n_values = [1000]
m_ratios = [0.02, 0.04]
reps = 3
seed = 99
"#;

    #[test]
    fn parses_sample() {
        let c = Config::parse(SAMPLE).unwrap();
        assert_eq!(c.master_seed, 7);
        let s = c.experiment("size").unwrap();
        assert_eq!(s.kind, ExperimentKind::SizeTable);
        assert_eq!(s.m_rules, vec![MRule::Exponent(0.6), MRule::Exponent(0.75)]);
        assert_eq!(s.bounds, DEFAULT_BOUNDS);
        assert_eq!(s.master_seed, 7);
        let b = c.experiment("bias").unwrap();
        assert_eq!(b.master_seed, 99);
        assert_eq!(b.process, ProcessSpec::moving_average(vec![1.0, 0.5], 1.0));
        assert_eq!(b.m_rules[1].bandwidth(1000).unwrap(), 40);
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = [
            SAMPLE.replace("reps = 10", "reps = 0"),
            SAMPLE.replace("thetas = [0.25]", "thetas = [1.0]"),
            SAMPLE.replace("alphas = [0.05]", "alphas = [0.0]"),
            SAMPLE.replace("m_exponents = [0.6, 0.75]", "m_exponents = [1.2]"),
            SAMPLE.replace("n_values = [1000, 5000]", "n_values = [3]"),
            SAMPLE.replace("kind = \"size_table\"", "kind = \"nope\""),
            SAMPLE.replace("alpha0 = 0.5", "alpha0 = 0.5, gamma = 1"),
            SAMPLE.replace("name = \"bias\"", "name = \"size\""),
            SAMPLE.replace("m_ratios = [0.02, 0.04]", "m = [600]"),
            "master_seed = \"x\"".to_string(),
        ];
        for text in &bad {
            assert!(Config::parse(text).is_err(), "accepted:\n{text}");
        }
    }

    #[test]
    fn content_hash_matches_git_blob_scheme() {
        // sha256 of "blob 0\0".
        assert_eq!(
            content_hash(b""),
            "473a0f4c3be8a93681a267e3b1e9a7dcda1185436fe141f7749120a303721813"
        );
    }

    #[test]
    fn rule_bandwidths() {
        assert_eq!(MRule::Exponent(0.75).bandwidth(10_000).unwrap(), 1000);
        assert_eq!(MRule::Exponent(0.6).bandwidth(1000).unwrap(), 63);
        assert!(MRule::Fixed(5).bandwidth(10).is_err());
        assert_eq!(MRule::Ratio(0.02).bandwidth(1000).unwrap(), 20);
    }
}
