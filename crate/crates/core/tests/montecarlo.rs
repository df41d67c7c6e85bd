use lrvkit::montecarlo::{
    check_bias_rate, run_clt_qn, run_clt_whittle, run_config, run_density_samples, run_size_table, Config, MRule,
};
use lrvkit::LrvError;

fn config(body: &str) -> Config {
    Config::parse(&format!("master_seed = 20240601\n\n[[experiment]]\n{body}")).unwrap()
}

#[test]
fn white_noise_whittle_mean() {
    let c = config(
        r#"name = "lw_iid"
kind = "clt_whittle"
process = { model = "iid" }
n_values = [10000]
m_exponents = [0.6]
reps = 2000"#,
    );
    let r = run_clt_whittle(&c.experiments[0]).unwrap();
    assert!(r.warnings.is_empty());
    let s = &r.cells[0].summary;
    assert!(s.mean.abs() < 0.1, "mean {}", s.mean);
}

#[test]
fn clt_mean_stays_bounded_as_bandwidth_grows() {
    for process in [r#"{ model = "iid" }"#, r#"{ model = "garch11", alpha0 = 0.5, alpha1 = 0.2, beta1 = 0.4 }"#] {
        let c = config(&format!(
            r#"name = "clt_beta"
kind = "clt_qn"
process = {process}
n_values = [10000]
m_exponents = [0.6, 0.7, 0.75, 0.79]
reps = 1000"#
        ));
        let r = run_clt_qn(&c.experiments[0]).unwrap();
        for cell in &r.cells {
            assert!(cell.summary.mean.abs() <= 0.25, "{process} {}: {}", cell.rule, cell.summary.mean);
        }
    }
}

#[test]
fn sv_size_cell_at_mid_sample_break() {
    let c = config(
        r#"name = "sv_anchor"
kind = "size_table"
process = { model = "sv", alpha = 0.0, phi = 0.5, sigma_w2 = 1.0 }
n_values = [5000]
m_exponents = [0.7]
reps = 5000
deltas = [0.3]
thetas = [0.5]
alphas = [0.05]"#,
    );
    let t = run_size_table(&c.experiments[0]).unwrap();
    let cell = t.cell(0.3, 0.5, MRule::Exponent(0.7), 5000, 0.05).unwrap();
    assert!((cell.percent - 3.28).abs() <= 1.5, "{} vs 3.28", cell.percent);
}

#[test]
fn density_samples_contract() {
    let body = r#"name = "fig"
kind = "density_samples"
process = { model = "garch11", alpha0 = 0.5, alpha1 = 0.2, beta1 = 0.4 }
n_values = [1000]
m_exponents = [0.65]
reps = 5000
deltas = [0.3]
thetas = [0.25]"#;
    let c = config(body);
    let d = run_density_samples(&c.experiments[0]).unwrap();
    let cell = &d.cells[0];
    assert_eq!(cell.cell.samples.len(), 5000);
    assert!((cell.histogram.mass() - 1.0).abs() < 1e-9);

    let first = run_config(&c, None, false).unwrap();
    let again = run_config(&config(body), None, false).unwrap();
    assert_eq!(first, again);
    let samples = &first[0].files.iter().find(|f| f.0 == "fig.samples").unwrap().1;
    assert_eq!(samples.lines().filter(|l| !l.starts_with('#')).count(), 5000);

    let mut empty = c.experiments[0].clone();
    empty.reps = 0;
    assert!(matches!(run_density_samples(&empty), Err(LrvError::InsufficientReps { .. })));
    assert!(Config::parse(&format!("master_seed = 1\n[[experiment]]\n{}", body.replace("reps = 5000", "reps = 0"))).is_err());
}

#[test]
fn ma1_bias_rate() {
    let c = config(
        r#"name = "bias_ma1"
kind = "bias_rate"
process = { model = "linear", coefficients = [1.0, 0.5] }
n_values = [1000, 2000]
m_ratios = [0.02, 0.04, 0.08]
reps = 10000"#,
    );
    let t = check_bias_rate(&c.experiments[0]).unwrap();
    assert!(t.warnings.is_empty());
    for s in &t.slopes {
        let slope = s.exact.unwrap();
        assert!((1.2..=2.8).contains(&slope), "n={} slope {slope}", s.n);
    }
    for r in &t.rows {
        assert!((r.mc_mean - r.exact_mean).abs() < 4.0 * r.mc_se, "{r:?}");
    }
    // Same ratio, doubled N.
    for small in t.rows.iter().filter(|r| r.n == 1000) {
        let big = t.rows.iter().find(|r| r.n == 2000 && r.rule == small.rule).unwrap();
        assert!(big.exact_bias().abs() <= small.exact_bias().abs() + 1e-15);
    }
}

#[test]
fn white_noise_has_no_bias() {
    let c = config(
        r#"name = "bias_iid"
kind = "bias_rate"
process = { model = "iid" }
n_values = [500]
m_ratios = [0.02, 0.04, 0.08]
reps = 10000"#,
    );
    let t = check_bias_rate(&c.experiments[0]).unwrap();
    for r in &t.rows {
        assert!(r.exact_bias().abs() < 1e-15);
        assert!(r.mc_bias().abs() < 4.0 * r.mc_se, "{r:?}");
    }
    assert!(t.slopes.iter().all(|s| s.exact.is_none()));
}

#[test]
fn config_errors() {
    let bad = [
        "master_seed = 1\n[[experiment]]\nname = \"a\"\nkind = \"nope\"\nprocess = { model = \"iid\" }\nn_values = [100]\nm = [3]\nreps = 2",
        "master_seed = 1\n[[experiment]]\nname = \"a\"\nkind = \"clt_qn\"\nprocess = { model = \"iid\" }\nn_values = [100]\nreps = 2",
        "master_seed = 1\n[[experiment]]\nname = \"a\"\nkind = \"clt_qn\"\nprocess = { model = \"iid\" }\nn_values = [100]\nm = [3]\nreps = 2\ncolour = 1",
    ];
    for text in bad {
        let err = Config::parse(text).unwrap_err();
        assert!(err.is_config_error(), "{err}");
    }
}
