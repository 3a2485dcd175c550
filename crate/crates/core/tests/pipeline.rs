//! Covariate block, variance updates and the fit driver on synthetic panels.

use asis_panel::data_io::{
    self, fit, load_long_csv, load_long_csv_labelled, variance_updates, FitConfig, LongPanel,
};
use asis_panel::sampler::chain_rng;
use asis_panel::{
    generate_synthetic, generate_synthetic_with_covariates, ChainState, Error, InvGammaPrior,
    ModelSpec, PanelDataset, SamplerScheme, VarianceMode,
};
use std::io::Write;

#[test]
fn noiseless_panel_recovers_beta() {
    let beta_star = [0.8, -1.3, 2.0];
    let tight = ModelSpec::with_variances(1e-12, 1e-12).unwrap();
    let data = generate_synthetic_with_covariates(&tight, 0.0, &beta_star, 20, 8, 4).unwrap();
    let mut cfg = FitConfig::new(SamplerScheme::AsisSaAa, 2_000, 500, 3);
    cfg.spec = ModelSpec::with_variances(1e-4, 1e-4).unwrap();
    let out = fit(&data, &cfg).unwrap();
    for (k, b) in beta_star.iter().enumerate() {
        let s = out.summaries.iter().find(|p| p.name == format!("beta_{}", k + 1)).unwrap();
        assert!((s.mean - b).abs() < 0.01, "beta_{}: {} vs {b}", k + 1, s.mean);
    }
}

#[test]
fn noise_variance_is_recovered_at_scale() {
    let truth = ModelSpec::with_variances(4.0, 1.0).unwrap();
    let data = generate_synthetic(&truth, 0.0, 500, 100, 12).unwrap();
    let mut cfg = FitConfig::new(SamplerScheme::AsisSaAa, 1_500, 300, 6);
    cfg.spec.sigma_eps_sq = 1.0;
    let out = fit(&data, &cfg).unwrap();
    let s = out.summaries.iter().find(|p| p.name == "sigma_eps_sq").unwrap();
    assert!((3.8..=4.2).contains(&s.mean), "{}", s.mean);
    let a = out.summaries.iter().find(|p| p.name == "sigma_alpha_sq").unwrap();
    assert!((0.8..=1.25).contains(&a.mean), "{}", a.mean);
}

#[test]
fn sampled_fit_without_covariates_agrees_with_long_reference() {
    let truth = ModelSpec::with_variances(1.0, 1.0).unwrap();
    let data = generate_synthetic(&truth, 2.0, 30, 10, 40).unwrap();
    let mut short = FitConfig::new(SamplerScheme::AsisSaAa, 6_000, 1_000, 1);
    short.spec.variance_mode = VarianceMode::sampled_default();
    let mut long = short.clone();
    long.iterations = 120_000;
    long.seed = 2;
    let a = fit(&data, &short).unwrap();
    let b = fit(&data, &long).unwrap();
    let gap = (a.diagnostics.mean - b.diagnostics.mean).abs();
    assert!(gap < 3.0 * a.diagnostics.mcse + 3.0 * b.diagnostics.mcse, "{gap}");
}

#[test]
fn variance_updates_follow_conjugate_moments() {
    // fixed alpha and mu, so the sigma_eps^2 draw is IG(a + NT/2, b + SSE/2) exactly
    let spec = ModelSpec::with_variances(1.0, 1.0)
        .unwrap()
        .sampled(InvGammaPrior::new(3.0, 2.0).unwrap(), InvGammaPrior::new(3.0, 2.0).unwrap())
        .unwrap();
    let data = PanelDataset::new(2, 3, vec![1.0, 2.0, 3.0, -1.0, 0.0, 1.0]).unwrap();
    let base = ChainState::from_alpha(0.5, vec![2.0, 0.0], &spec);
    let mut rng = chain_rng(9);
    let draws = 200_000;
    let (mut se, mut sa) = (0.0, 0.0);
    for _ in 0..draws {
        let mut s = base.clone();
        variance_updates(&mut s, data.y(), &data, &spec, &mut rng).unwrap();
        se += s.sigma_eps_sq;
        sa += s.sigma_alpha_sq;
    }
    // SSE = 4, shape 6, scale 4 -> mean 0.8; SSA = 2.5, shape 4, scale 3.25 -> mean 13/12
    assert!((se / draws as f64 - 0.8).abs() < 0.01);
    assert!((sa / draws as f64 - 13.0 / 12.0).abs() < 0.02);
}

#[test]
fn synthetic_covariate_panel_keeps_scheme_ordering() {
    let truth = ModelSpec::with_variances(4.0, 0.05).unwrap();
    let data = generate_synthetic_with_covariates(&truth, 1.0, &[0.5, -1.0, 0.25], 48, 11, 5).unwrap();
    let mcse = |scheme| {
        let mut cfg = FitConfig::new(scheme, 10_000, 1_000, 11);
        cfg.spec.sigma_alpha_sq = 0.05;
        fit(&data, &cfg).unwrap().diagnostics.mcse
    };
    let (sa, aa, asis) = (
        mcse(SamplerScheme::Sa),
        mcse(SamplerScheme::Aa),
        mcse(SamplerScheme::AsisSaAa),
    );
    assert!(asis < aa && aa < sa, "{asis} {aa} {sa}");
}

fn write_tmp(body: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(body.as_bytes()).unwrap();
    f
}

#[test]
fn loader_shapes_and_errors() {
    let mut body = String::from("id,t,y,x1,x2,x3\n");
    for s in 0..48 {
        for year in 1985..1996 {
            body.push_str(&format!("S{s:02},{year},{},{},{},{}\n", s + year, 1.0, year, s));
        }
    }
    let f = write_tmp(&body);
    let data = load_long_csv(f.path()).unwrap();
    assert_eq!((data.n_individuals(), data.n_periods(), data.n_covariates()), (48, 11, 3));

    let missing = load_long_csv("/definitely/not/here.csv").unwrap_err();
    assert!(matches!(missing, Error::Io { .. }));

    let dup = write_tmp("id,t,y\na,1,1\nb,1,1\na,1,2\n");
    assert!(matches!(load_long_csv(dup.path()), Err(Error::DuplicateCell { row: 4, .. })));

    let gap = write_tmp("id,t,y\na,1,1\na,2,1\nb,1,1\n");
    assert!(matches!(load_long_csv(gap.path()), Err(Error::UnbalancedPanel { .. })));
}

#[test]
fn csv_round_trip() {
    let spec = ModelSpec::with_variances(1.0, 1.0).unwrap();
    let data = generate_synthetic_with_covariates(&spec, 0.0, &[1.0, 2.0], 4, 3, 1).unwrap();
    let panel = LongPanel {
        data: data.clone(),
        unit_ids: vec!["a".into(), "b".into(), "c".into(), "d".into()],
        periods: vec![2000, 2001, 2002],
        covariate_names: vec!["price".into(), "income".into()],
    };
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("panel.csv");
    data_io::write_long_csv(&panel, &path).unwrap();
    assert_eq!(load_long_csv_labelled(&path).unwrap(), panel);
}
