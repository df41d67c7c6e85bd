//! CSV rendering of experiment results.
//!
//! Every file starts with `#` metadata lines: the experiment, the resolved
//! configuration, the seeding rule and the content hash of the config file.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::config::{Config, DensityStatistic, ExperimentConfig, ExperimentKind};
use super::{check_bias_rate, run_clt_qn, run_clt_whittle, run_density_samples, run_size_table, SampleCell, Summary};
use crate::error::{LrvError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub name: String,
    /// `(file name, contents)`.
    pub files: Vec<(String, String)>,
    pub warnings: Vec<String>,
}

/// Runs the selected experiments of `config` in file order. Experiments
/// marked `full_only` are skipped unless `full` is set; an explicitly named
/// experiment always runs.
pub fn run_config(config: &Config, only: Option<&str>, full: bool) -> Result<Vec<ExperimentOutput>> {
    if let Some(name) = only {
        let exp = config
            .experiment(name)
            .ok_or_else(|| LrvError::Config(format!("no experiment named `{name}`")))?;
        return Ok(vec![render(exp, &config.content_hash())?]);
    }
    config
        .experiments
        .iter()
        .filter(|e| full || !e.full_only)
        .map(|e| render(e, &config.content_hash()))
        .collect()
}

pub fn write_outputs(outputs: &[ExperimentOutput], dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for out in outputs {
        for (file, contents) in &out.files {
            let path = dir.join(file);
            std::fs::write(&path, contents)?;
            written.push(path);
        }
    }
    Ok(written)
}

/// Runs one experiment and renders its output files.
pub fn render(cfg: &ExperimentConfig, config_hash: &str) -> Result<ExperimentOutput> {
    let header = header(cfg, config_hash);
    let name = &cfg.name;
    let mut files = Vec::new();
    let mut warnings = Vec::new();
    match cfg.kind {
        ExperimentKind::CltQn | ExperimentKind::CltWhittle => {
            let r = if cfg.kind == ExperimentKind::CltQn {
                run_clt_qn(cfg)?
            } else {
                run_clt_whittle(cfg)?
            };
            warnings = r.warnings;
            let cells: Vec<&SampleCell> = r.cells.iter().collect();
            files.push((format!("{name}.csv"), summary_csv(&header, &cells, &warnings)));
            files.push((format!("{name}.samples"), samples_file(&header, &cells)));
            let hists = cells
                .iter()
                .map(|c| Ok((*c, super::histogram(&c.samples, super::HISTOGRAM_BINS)?)))
                .collect::<Result<Vec<_>>>()?;
            files.push((format!("{name}.hist.csv"), hist_csv(&header, &hists)));
        }
        ExperimentKind::DensitySamples => {
            let r = run_density_samples(cfg)?;
            let mut head = header.clone();
            let stat = match r.statistic {
                DensityStatistic::Residual => format!(
                    "# statistic = T^(R) after a level shift delta={} at theta={}\n",
                    r.shift.0, r.shift.1
                ),
                DensityStatistic::Whittle => "# statistic = 2 sqrt(m) (H_hat - 1/2) on the raw path\n".to_string(),
            };
            head.push_str(&stat);
            let cells: Vec<&SampleCell> = r.cells.iter().map(|c| &c.cell).collect();
            files.push((format!("{name}.csv"), summary_csv(&head, &cells, &[])));
            files.push((format!("{name}.samples"), samples_file(&head, &cells)));
            let hists: Vec<_> = r.cells.iter().map(|c| (&c.cell, c.histogram.clone())).collect();
            files.push((format!("{name}.hist.csv"), hist_csv(&head, &hists)));
        }
        ExperimentKind::SizeTable => {
            let t = run_size_table(cfg)?;
            let mut s = header;
            s.push_str("delta,theta,m_rule,m_param,n,m,alpha,reps,rejections,percent,se\n");
            for c in &t.cells {
                writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{},{:.2},{:.4}",
                    c.delta,
                    c.theta,
                    c.rule.kind(),
                    c.rule.param(),
                    c.n,
                    c.m,
                    c.alpha,
                    c.reps,
                    c.rejections,
                    c.percent,
                    c.se
                )
                .unwrap();
            }
            files.push((format!("{name}.csv"), s));
        }
        ExperimentKind::BiasRate => {
            let t = check_bias_rate(cfg)?;
            warnings = t.warnings.clone();
            let mut s = header;
            for w in &warnings {
                writeln!(s, "# warning: {w}").unwrap();
            }
            s.push_str("n,m_rule,m_param,m,ratio,f0,exact_mean,exact_bias,mc_mean,mc_se,mc_bias\n");
            for r in &t.rows {
                writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    r.n,
                    r.rule.kind(),
                    r.rule.param(),
                    r.m,
                    r.ratio(),
                    r.f0,
                    r.exact_mean,
                    r.exact_bias(),
                    r.mc_mean,
                    r.mc_se,
                    r.mc_bias()
                )
                .unwrap();
            }
            for sl in &t.slopes {
                writeln!(s, "# slope n={} exact={} mc={}", sl.n, opt(sl.exact), opt(sl.mc)).unwrap();
            }
            files.push((format!("{name}.csv"), s));
        }
    }
    Ok(ExperimentOutput {
        name: name.clone(),
        files,
        warnings,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

fn header(cfg: &ExperimentConfig, config_hash: &str) -> String {
    let mut s = String::new();
    writeln!(s, "# experiment = {}", cfg.name).unwrap();
    writeln!(s, "# kind = {}", cfg.kind.as_str()).unwrap();
    writeln!(s, "# process = {}", cfg.process.describe()).unwrap();
    writeln!(s, "# n_values = {:?}", cfg.n_values).unwrap();
    let rules: Vec<String> = cfg.m_rules.iter().map(|r| r.to_string()).collect();
    writeln!(s, "# m_rules = [{}]", rules.join(", ")).unwrap();
    writeln!(s, "# reps = {}", cfg.reps).unwrap();
    if let Some(size) = &cfg.size {
        writeln!(s, "# deltas = {:?}", size.deltas).unwrap();
        writeln!(s, "# thetas = {:?}", size.thetas).unwrap();
        writeln!(s, "# alphas = {:?}", size.alphas).unwrap();
    }
    writeln!(s, "# bounds = [{}, {}]", cfg.bounds.0, cfg.bounds.1).unwrap();
    writeln!(s, "# full_only = {}", cfg.full_only).unwrap();
    writeln!(s, "# master_seed = {}", cfg.master_seed).unwrap();
    writeln!(
        s,
        "# seeding = ChaCha8 stream replication_stream(mix64(fnv1a(\"{}\") ^ mix64(N)), rep) of master_seed",
        cfg.name
    )
    .unwrap();
    writeln!(s, "# config_sha256 = {config_hash}").unwrap();
    s
}

fn summary_fields(s: &Summary) -> String {
    format!(
        "{},{},{},{},{}",
        s.mean,
        opt(s.variance),
        opt(s.sd()),
        opt(s.skewness),
        s.ks_distance
    )
}

fn summary_csv(header: &str, cells: &[&SampleCell], warnings: &[String]) -> String {
    let mut s = header.to_string();
    for w in warnings {
        writeln!(s, "# warning: {w}").unwrap();
    }
    s.push_str("n,m_rule,m_param,m,reps,mean,variance,sd,skewness,ks_distance\n");
    for c in cells {
        writeln!(
            s,
            "{},{},{},{},{},{}",
            c.n,
            c.rule.kind(),
            c.rule.param(),
            c.m,
            c.samples.len(),
            summary_fields(&c.summary)
        )
        .unwrap();
    }
    s
}

/// One value per line; each `(N, m)` cell is introduced by a `#` line.
fn samples_file(header: &str, cells: &[&SampleCell]) -> String {
    let mut s = header.to_string();
    for c in cells {
        writeln!(s, "# cell n={} m_rule={} m={}", c.n, c.rule, c.m).unwrap();
        for v in &c.samples {
            writeln!(s, "{v}").unwrap();
        }
    }
    s
}

fn hist_csv(header: &str, cells: &[(&SampleCell, super::Histogram)]) -> String {
    let mut s = header.to_string();
    s.push_str("n,m_rule,m_param,m,bin_left,bin_right,density\n");
    for (c, h) in cells {
        for (e, d) in h.edges.windows(2).zip(&h.density) {
            writeln!(s, "{},{},{},{},{},{},{}", c.n, c.rule.kind(), c.rule.param(), c.m, e[0], e[1], d).unwrap();
        }
    }
    s
}
