//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.
//!
//! Criterion 8 reads a real long-format cigarette panel from `ASIS_PANEL_CIGARETTE_CSV`
//! (columns id,t,y,x1..xK, logs applied to y and every covariate) when the variable is set,
//! and otherwise uses a synthetic covariate panel with known coefficients.

use std::process::ExitCode;
use std::time::Instant;

use asis_panel::data_io::{self, fit, FitConfig};
use asis_panel::diagnostics::{acf, ess, mcse_batch_means};
use asis_panel::experiments::{run_grid, ExperimentGrid, GridResult};
use asis_panel::sampler::{aa_mu_recursion, sa_mu_recursion, step_with_noise, NoiseDraws};
use asis_panel::{
    generate_synthetic, generate_synthetic_with_covariates, posterior_oracle_mu, rate_report,
    run_chain, ChainState, ModelSpec, RunConfig, SamplerScheme,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

struct Outcome {
    id: &'static str,
    pass: bool,
    detail: String,
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let eps = 10f64.powf(rng.random_range(-3.0..3.0));
        let alpha = 10f64.powf(rng.random_range(-3.0..3.0));
        let t = rng.random_range(1..=1000);
        let r = rate_report(&ModelSpec::with_variances(eps, alpha).unwrap(), 10, t).unwrap();
        worst = worst.max((r.rho_sa_asym + r.rho_aa_asym - 1.0).abs());
    }
    Outcome {
        id: "1",
        pass: worst <= 1e-14,
        detail: format!("trade-off identity over 1000 triples, max |sum - 1| = {worst:.2e}"),
    }
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for case in 0..100 {
        let spec = ModelSpec::known(
            10f64.powf(rng.random_range(-1.5..1.5)),
            10f64.powf(rng.random_range(-1.5..1.5)),
            rng.random_range(-2.0..2.0),
            10f64.powf(rng.random_range(-1.0..3.0)),
        )
        .unwrap();
        let (n, t) = (rng.random_range(1..50), rng.random_range(1..50));
        let data = generate_synthetic(&spec, rng.random_range(-2.0..2.0), n, t, case).unwrap();
        let mu0: f64 = rng.sample(StandardNormal);
        let alpha0: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let noise = NoiseDraws::draw(&mut rng, n);
        for scheme in [SamplerScheme::Sa, SamplerScheme::Aa] {
            let mut s = ChainState::from_alpha(mu0, alpha0.clone(), &spec);
            step_with_noise(scheme, &mut s, &data, &spec, &noise, 0.0).unwrap();
            let want = if scheme == SamplerScheme::Sa {
                sa_mu_recursion(mu0, &data, &spec, noise.z0, noise.zbar())
            } else {
                aa_mu_recursion(mu0, &data, &spec, noise.z0, noise.zbar())
            }
            .unwrap();
            worst = worst.max((s.mu_alpha - want).abs());
        }
    }
    Outcome {
        id: "2",
        pass: worst < 1e-10,
        detail: format!("steppers vs reduced recursions over 100 configs, max error {worst:.2e}"),
    }
}

fn criterion_3() -> Outcome {
    let spec = ModelSpec::with_variances(1.0, 1.0).unwrap();
    let data = generate_synthetic(&spec, 0.0, 10, 10, 3).unwrap();
    let oracle = posterior_oracle_mu(&data, &spec).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for scheme in SamplerScheme::ALL {
        let out = run_chain(
            scheme,
            &data,
            &spec,
            &RunConfig {
                iterations: 50_000,
                burn_in: 1_000,
                seed: 33,
            },
        )
        .unwrap();
        let mu = out.mu();
        let mean = mu.iter().sum::<f64>() / mu.len() as f64;
        let sq: Vec<f64> = mu.iter().map(|m| (m - oracle.mean).powi(2)).collect();
        let var = sq.iter().sum::<f64>() / sq.len() as f64;
        let zm = (mean - oracle.mean) / mcse_batch_means(mu, None).unwrap();
        let zv = (var - oracle.variance) / mcse_batch_means(&sq, None).unwrap();
        pass &= zm.abs() < 3.0 && zv.abs() < 3.0;
        parts.push(format!("{} z_mean={zm:+.2} z_var={zv:+.2}", scheme.key()));
    }
    Outcome {
        id: "3",
        pass,
        detail: format!("posterior moments within 3 MCSE: {}", parts.join(", ")),
    }
}

const SIZES: [(usize, usize); 4] = [(10, 10), (10, 100), (500, 10), (500, 100)];

fn mcse(res: &GridResult, n: usize, t: usize, p: u8, s: SamplerScheme) -> f64 {
    res.row(n, t, &format!("Pattern {p}"), s).unwrap().mean_mcse
}

fn criterion_4(res: &GridResult) -> Outcome {
    let mut bad = Vec::new();
    for (n, t) in SIZES {
        let (sa1, aa1) = (mcse(res, n, t, 1, SamplerScheme::Sa), mcse(res, n, t, 1, SamplerScheme::Aa));
        let (sa2, aa2) = (mcse(res, n, t, 2, SamplerScheme::Sa), mcse(res, n, t, 2, SamplerScheme::Aa));
        if sa1 >= aa1 {
            bad.push(format!("P1 ({n},{t})"));
        }
        if aa2 >= sa2 {
            bad.push(format!("P2 ({n},{t})"));
        }
    }
    Outcome {
        id: "4",
        pass: bad.is_empty(),
        detail: if bad.is_empty() {
            "SA < AA under pattern 1 and AA < SA under pattern 2 at all four panel sizes".into()
        } else {
            format!("ordering violated at {}", bad.join(", "))
        },
    }
}

fn criterion_5(res: &GridResult) -> Outcome {
    let mut dominated = 0;
    for (n, t) in SIZES {
        for p in 1..=3 {
            let asis = mcse(res, n, t, p, SamplerScheme::AsisSaAa);
            let best = mcse(res, n, t, p, SamplerScheme::Sa).min(mcse(res, n, t, p, SamplerScheme::Aa));
            dominated += usize::from(asis <= best);
        }
    }
    // published values, x 1e-5
    let targets = [
        ((10, 10), 2, SamplerScheme::AsisSaAa, 13.716),
        ((500, 100), 1, SamplerScheme::AsisSaAa, 0.585),
    ];
    let mut within = 0;
    let mut parts = Vec::new();
    for ((n, t), p, s, want) in targets {
        let got = mcse(res, n, t, p, s) * 1e5;
        let ok = (got / want - 1.0).abs() <= 0.3;
        within += usize::from(ok);
        parts.push(format!("P{p} ({n},{t}) {got:.3} vs {want}"));
    }
    Outcome {
        id: "5",
        pass: dominated == 12 && within == targets.len(),
        detail: format!(
            "ASIS <= min(SA, AA) in {dominated}/12 configs; magnitudes x1e-5 within 30%: {within}/{} [{}]",
            targets.len(),
            parts.join("; ")
        ),
    }
}

fn criterion_6(res: &GridResult, grid: &ExperimentGrid) -> Outcome {
    let mut worst_asis: f64 = 0.0;
    let mut worst_slow: f64 = 0.0;
    for (n, t) in SIZES {
        for p in 1..=3u8 {
            let label = format!("Pattern {p}");
            if grid.tau_alpha_sq * (n as f64) < 1000.0 {
                continue;
            }
            let asis = res.row(n, t, &label, SamplerScheme::AsisSaAa).unwrap().mean_lag1_acf;
            worst_asis = worst_asis.max(asis);
            let rates = res.rates_for(n, t, &label).unwrap();
            let (slow, rho) = if rates.rho_sa_exact >= rates.rho_aa_exact {
                (SamplerScheme::Sa, rates.rho_sa_exact)
            } else {
                (SamplerScheme::Aa, rates.rho_aa_exact)
            };
            let lag1 = res.row(n, t, &label, slow).unwrap().mean_lag1_acf;
            worst_slow = worst_slow.max((lag1 - rho).abs());
        }
    }
    Outcome {
        id: "6",
        pass: worst_asis < 0.05 && worst_slow <= 0.05,
        detail: format!(
            "max ASIS lag-1 ACF {worst_asis:.4} (< 0.05); max |lag-1 - rho_exact| of slower scheme {worst_slow:.4} (<= 0.05)"
        ),
    }
}

fn criterion_7(res: &GridResult) -> Outcome {
    let gap = |n, t| {
        let sa = mcse(res, n, t, 3, SamplerScheme::Sa);
        (sa - mcse(res, n, t, 3, SamplerScheme::Aa)).abs() / sa
    };
    let small: Vec<f64> = [(10, 10), (10, 100)].iter().map(|&(n, t)| gap(n, t)).collect();
    let large: Vec<f64> = [(500, 10), (500, 100)].iter().map(|&(n, t)| gap(n, t)).collect();
    Outcome {
        id: "7",
        pass: small.iter().all(|g| *g > 0.3) && large.iter().all(|g| *g < 0.15),
        detail: format!(
            "pattern 3 relative SA-AA gap: N=10 {:.3}, {:.3} (want > 0.3); N=500 {:.3}, {:.3} (want < 0.15)",
            small[0], small[1], large[0], large[1]
        ),
    }
}

fn criterion_8() -> Outcome {
    let (source, data) = match std::env::var("ASIS_PANEL_CIGARETTE_CSV") {
        Ok(path) => {
            let panel = data_io::load_long_csv_labelled(&path).expect("reading cigarette panel");
            let all: Vec<usize> = (0..panel.covariate_names.len()).collect();
            let panel = panel.log_transform(true, &all).expect("log transform");
            (format!("cigarette panel {path}"), panel.data)
        }
        Err(_) => {
            let truth = ModelSpec::with_variances(4.0, 0.05).unwrap();
            let d = generate_synthetic_with_covariates(&truth, 1.0, &[0.5, -1.0, 0.25], 48, 11, 8).unwrap();
            ("synthetic 48x11 panel, K=3".to_string(), d)
        }
    };
    let run = |scheme| {
        let mut cfg = FitConfig::new(scheme, 10_000, 1_000, 8);
        cfg.spec.sigma_alpha_sq = 0.05;
        fit(&data, &cfg).unwrap().diagnostics
    };
    let (sa, aa, asis) = (
        run(SamplerScheme::Sa),
        run(SamplerScheme::Aa),
        run(SamplerScheme::AsisSaAa),
    );
    let lag1 = asis.acf[1];
    Outcome {
        id: "8",
        pass: asis.mcse < aa.mcse && aa.mcse < sa.mcse && lag1 < 0.1,
        detail: format!(
            "{source}: MCSE x1e3 SA {:.3}, AA {:.3}, ASIS {:.3}; ASIS lag-1 ACF {lag1:.4}",
            sa.mcse * 1e3,
            aa.mcse * 1e3,
            asis.mcse * 1e3
        ),
    }
}

fn ar1(rho: f64, n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut x: f64 = rng.sample::<f64, _>(StandardNormal) / (1.0 - rho * rho).sqrt();
    (0..n)
        .map(|_| {
            x = rho * x + rng.sample::<f64, _>(StandardNormal);
            x
        })
        .collect()
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut checks = Vec::new();
    for rho in [0.0, 0.5, 0.9] {
        let x = ar1(rho, 200_000, &mut rng);
        let a = acf(&x, 5).unwrap();
        let acf_ok = (1..=5).all(|k| (a[k] - rho.powi(k as i32)).abs() < 0.02);
        let want_ess = 200_000.0 * (1.0 - rho) / (1.0 + rho);
        let ess_ok = (ess(&x).unwrap() / want_ess - 1.0).abs() < 0.15;
        let sd = (1.0 / (1.0 - rho * rho)).sqrt();
        let want_mcse = sd * ((1.0 + rho) / (1.0 - rho) / 200_000.0).sqrt();
        let mcse_ok = (mcse_batch_means(&x, None).unwrap() / want_mcse - 1.0).abs() < 0.15;
        checks.push((rho, acf_ok, ess_ok, mcse_ok));
    }
    let constant = acf(&[1.0; 100], 3).is_err()
        && ess(&[1.0; 100]).is_err()
        && mcse_batch_means(&[1.0; 100], None).is_err();
    let pass = constant && checks.iter().all(|c| c.1 && c.2 && c.3);
    Outcome {
        id: "9",
        pass,
        detail: format!(
            "AR(1) ACF/ESS/MCSE oracles at rho 0, 0.5, 0.9: {}; constant chains rejected: {constant}",
            checks
                .iter()
                .map(|(r, a, e, m)| format!("rho={r}: acf {a} ess {e} mcse {m}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    }
}

fn main() -> ExitCode {
    let started = Instant::now();
    let mut outcomes = vec![criterion_1(), criterion_2(), criterion_3()];

    let grid = ExperimentGrid::default();
    let grid_start = Instant::now();
    let res = run_grid(&grid).expect("replication grid");
    let grid_secs = grid_start.elapsed().as_secs_f64();
    outcomes.push(criterion_4(&res));
    outcomes.push(criterion_5(&res));
    outcomes.push(criterion_6(&res, &grid));
    outcomes.push(criterion_7(&res));
    outcomes.push(criterion_8());
    outcomes.push(criterion_9());

    println!();
    for o in &outcomes {
        println!(
            "{} criterion {}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.id,
            o.detail
        );
    }
    let failed = outcomes.iter().filter(|o| !o.pass).count();
    println!(
        "acceptance: {}/{} passed (grid {grid_secs:.0} s on {} threads, total {:.0} s)",
        outcomes.len() - failed,
        outcomes.len(),
        rayon::current_num_threads(),
        started.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
