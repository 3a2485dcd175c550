//! `asis-panel` command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error (missing or malformed files),
//! 3 numerical error.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use asis_panel::data_io::{self, FitConfig, FitOutput};
use asis_panel::experiments::{self, ExperimentGrid, GridSummary, Pattern};
use asis_panel::{
    generate_synthetic, posterior_oracle_mu, rate_report, run_chain, DiagnosticsReport,
    InvGammaPrior, ModelSpec, RateReport, RunConfig, SamplerScheme, VarianceMode,
};

#[derive(Parser, Debug)]
#[command(name = "asis-panel", version, about = "SA, AA and ASIS Gibbs samplers for the Gaussian panel model")]
struct Cli {
    /// Worker threads for the parallel pool (default: all cores)
    #[arg(long, global = true, env = "ASIS_PANEL_THREADS")]
    threads: Option<usize>,

    /// Output format for the report printed to stdout
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact and limiting convergence rates of SA and AA, and which one wins
    Theory(TheoryArgs),
    /// Simulate one panel and run the samplers on it
    Simulate(SimulateArgs),
    /// Run the full replication grid and write MCSE tables and ACF curves
    ReproduceTables(ReproduceArgs),
    /// Fit the model to a long-format CSV panel (id,t,y,x1..xK)
    Fit(FitArgs),
    /// Recompute ACF, MCSE and ESS from a stored draws file
    Diagnose(DiagnoseArgs),
}

/// Variance flags. Variances are the primary parameterization; the `--sigma-*` standard
/// deviation forms exist because the study's pattern tables quote standard deviations.
#[derive(Args, Debug, Clone)]
struct VarianceArgs {
    /// Observation noise variance sigma_eps^2
    #[arg(long, conflicts_with_all = ["sigma_eps", "pattern"])]
    sigma_eps_sq: Option<f64>,
    /// Observation noise standard deviation sigma_eps (squared before use)
    #[arg(long, conflicts_with = "pattern")]
    sigma_eps: Option<f64>,
    /// Heterogeneity variance sigma_alpha^2
    #[arg(long, conflicts_with_all = ["sigma_alpha", "pattern"])]
    sigma_alpha_sq: Option<f64>,
    /// Heterogeneity standard deviation sigma_alpha (squared before use)
    #[arg(long, conflicts_with = "pattern")]
    sigma_alpha: Option<f64>,
    /// Standard variance pattern 1, 2 or 3 (scaled with T)
    #[arg(long)]
    pattern: Option<u8>,
}

impl VarianceArgs {
    fn resolve(&self, t: usize) -> Result<(f64, f64)> {
        if let Some(p) = self.pattern {
            return Ok(experiments::pattern_variances(p, t)?);
        }
        let eps = self.sigma_eps_sq.or(self.sigma_eps.map(|s| s * s));
        let alpha = self.sigma_alpha_sq.or(self.sigma_alpha.map(|s| s * s));
        match (eps, alpha) {
            (Some(e), Some(a)) => Ok((e, a)),
            _ => Err(usage(
                "give --pattern, or both --sigma-eps-sq (or --sigma-eps) and --sigma-alpha-sq (or --sigma-alpha)",
            )),
        }
    }
}

#[derive(Args, Debug, Clone)]
struct PriorArgs {
    /// Prior mean phi_alpha of mu_alpha
    #[arg(long, default_value_t = ModelSpec::DEFAULT_PHI_ALPHA, allow_negative_numbers = true)]
    phi: f64,
    /// Prior variance tau_alpha^2 of mu_alpha
    #[arg(long, default_value_t = ModelSpec::DEFAULT_TAU_ALPHA_SQ)]
    tau_sq: f64,
}

#[derive(Args, Debug)]
struct TheoryArgs {
    #[command(flatten)]
    variances: VarianceArgs,
    #[command(flatten)]
    prior: PriorArgs,
    /// Number of individuals
    #[arg(short = 'N', long = "N")]
    n: usize,
    /// Number of periods
    #[arg(short = 'T', long = "T")]
    t: usize,
    /// Also write summary.json into this directory
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    variances: VarianceArgs,
    #[command(flatten)]
    prior: PriorArgs,
    #[arg(short = 'N', long = "N")]
    n: usize,
    #[arg(short = 'T', long = "T")]
    t: usize,
    /// True mu_alpha used to simulate the panel
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    mu_true: f64,
    /// Schemes to run (sa, aa, asis-sa-aa, asis-aa-sa); repeat or comma-separate
    #[arg(long = "scheme", value_delimiter = ',', default_value = "sa,aa,asis-sa-aa,asis-aa-sa")]
    schemes: Vec<SamplerScheme>,
    #[arg(long, default_value_t = 10_000)]
    iterations: usize,
    #[arg(long, default_value_t = 1_000)]
    burn_in: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 50)]
    max_lag: usize,
    /// Output directory for draws_<scheme>.csv and summary.json
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ReproduceArgs {
    /// Key-value config file; flags given on the command line override it
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    burn_in: Option<usize>,
    #[arg(long)]
    replications: Option<usize>,
    /// Panel sizes as NxT, comma-separated (default 10x10,10x100,500x10,500x100)
    #[arg(long, value_delimiter = ',', value_parser = parse_panel_size)]
    panel_sizes: Option<Vec<(usize, usize)>>,
    /// Pattern ids, comma-separated (default 1,2,3)
    #[arg(long, value_delimiter = ',')]
    patterns: Option<Vec<u8>>,
    /// Schemes, comma-separated (default sa,aa,asis-sa-aa)
    #[arg(long = "schemes", value_delimiter = ',')]
    schemes: Option<Vec<SamplerScheme>>,
    /// Use one dataset per configuration for all replications
    #[arg(long)]
    shared_dataset: bool,
    #[arg(long)]
    max_lag: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct FitArgs {
    /// Long-format CSV with header id,t,y,x1,...,xK
    input: PathBuf,
    /// Schemes to fit, comma-separated
    #[arg(long = "scheme", value_delimiter = ',', default_value = "sa,aa,asis-sa-aa")]
    schemes: Vec<SamplerScheme>,
    #[arg(long, default_value_t = 10_000)]
    iterations: usize,
    #[arg(long, default_value_t = 1_000)]
    burn_in: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Keep the variances fixed at --sigma-eps-sq / --sigma-alpha-sq instead of sampling them
    #[arg(long)]
    known_variances: bool,
    /// Known value, or starting value when sampled
    #[arg(long, default_value_t = 1.0)]
    sigma_eps_sq: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma_alpha_sq: f64,
    #[arg(long, default_value_t = 2.0)]
    eps_prior_shape: f64,
    #[arg(long, default_value_t = 1.0)]
    eps_prior_scale: f64,
    #[arg(long, default_value_t = 2.0)]
    alpha_prior_shape: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha_prior_scale: f64,
    #[command(flatten)]
    prior: PriorArgs,
    /// Prior mean of beta, comma-separated (default zeros)
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    beta_prior_mean: Vec<f64>,
    /// Prior variance of each beta_k
    #[arg(long, default_value_t = FitConfig::DEFAULT_BETA_PRIOR_VARIANCE)]
    beta_prior_var: f64,
    /// Fix beta at the pooled least-squares estimate instead of sampling it
    #[arg(long)]
    two_stage: bool,
    /// Take logs of y
    #[arg(long)]
    log_y: bool,
    /// Covariates to log, by name or 1-based index, or `all`
    #[arg(long, value_delimiter = ',')]
    log_x: Vec<String>,
    /// Record every alpha_i in draws.csv
    #[arg(long)]
    record_effects: bool,
    #[arg(long, default_value_t = 50)]
    max_lag: usize,
    /// Output directory; each scheme writes <out>/<scheme>/{draws.csv,summary.json}
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct DiagnoseArgs {
    /// draws.csv written by simulate or fit
    input: PathBuf,
    /// Parameters to diagnose (default: all columns)
    #[arg(long = "param", value_delimiter = ',')]
    params: Vec<String>,
    /// Additional leading draws to discard
    #[arg(long, default_value_t = 0)]
    burn_in: usize,
    #[arg(long, default_value_t = 50)]
    max_lag: usize,
    /// Also write summary.json into this directory
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_panel_size(s: &str) -> std::result::Result<(usize, usize), String> {
    experiments::parse_panel_size(s)
}

/// Bad flag combinations that clap cannot express.
#[derive(Debug)]
struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn exit_code(err: &anyhow::Error) -> u8 {
    use asis_panel::Error as E;
    if err.downcast_ref::<UsageError>().is_some() {
        return 1;
    }
    match err.downcast_ref::<E>().map(E::root) {
        Some(
            E::Domain { .. }
            | E::VarianceMode { .. }
            | E::UnknownPattern(_)
            | E::Config { .. },
        ) => 1,
        Some(E::NonFinite { .. } | E::ConstantChain | E::ChainTooShort { .. }) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let format = cli.format;
    match cli.command {
        Command::Theory(a) => theory(a, format),
        Command::Simulate(a) => simulate(a, format),
        Command::ReproduceTables(a) => reproduce(a, format),
        Command::Fit(a) => fit(a, format),
        Command::Diagnose(a) => diagnose(a, format),
    }
}

fn write_json(dir: &Path, name: &str, value: &impl Serialize) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    let body = serde_json::to_string_pretty(value)?;
    fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn print_json(value: &impl Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

#[derive(Serialize)]
struct TheorySummary {
    command: &'static str,
    spec: ModelSpec,
    report: RateReport,
}

fn theory(a: TheoryArgs, format: Format) -> Result<()> {
    let (eps, alpha) = a.variances.resolve(a.t)?;
    let spec = ModelSpec::known(eps, alpha, a.prior.phi, a.prior.tau_sq)?;
    let report = rate_report(&spec, a.n, a.t)?;
    let summary = TheorySummary {
        command: "theory",
        spec,
        report,
    };
    match format {
        Format::Json => print_json(&summary)?,
        Format::Csv => {
            println!("n,t,sigma_eps_sq,sigma_alpha_sq,tau_alpha_sq,phi_alpha,rho_sa_exact,rho_aa_exact,rho_sa_asym,rho_aa_asym,tradeoff_sum,verdict,regime_gap");
            let r = &report;
            println!(
                "{},{},{},{},{},{},{},{},{},{},{},{:?},{}",
                r.n, r.t, eps, alpha, spec.tau_alpha_sq, spec.phi_alpha, r.rho_sa_exact,
                r.rho_aa_exact, r.rho_sa_asym, r.rho_aa_asym, r.tradeoff_sum, r.verdict, r.regime_gap
            );
        }
        Format::Human => {
            let r = &report;
            println!(
                "N = {}, T = {}, sigma_eps^2 = {eps}, sigma_alpha^2 = {alpha}, tau_alpha^2 = {}, phi_alpha = {}",
                r.n, r.t, spec.tau_alpha_sq, spec.phi_alpha
            );
            println!("{:<12} {:>12} {:>12}", "rate", "SA", "AA");
            println!("{:<12} {:>12.6} {:>12.6}", "exact", r.rho_sa_exact, r.rho_aa_exact);
            println!("{:<12} {:>12.6} {:>12.6}", "asymptotic", r.rho_sa_asym, r.rho_aa_asym);
            println!("{:<12} {:>12.6} {:>12.6}", "shrinkage", r.sa_shrinkage, r.aa_shrinkage);
            println!("trade-off sum: {:.15}", r.tradeoff_sum);
            println!("regime gap:    {:.3e}", r.regime_gap);
            println!("verdict:       {} ({:?})", r.verdict, r.verdict);
            println!();
            print_json(&summary)?;
        }
    }
    if let Some(out) = &a.out {
        write_json(out, "summary.json", &summary)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct SchemeResult {
    scheme: SamplerScheme,
    seed: u64,
    rho_exact: Option<f64>,
    diagnostics: DiagnosticsReport,
}

#[derive(Serialize)]
struct SimulateSummary {
    command: &'static str,
    n: usize,
    t: usize,
    spec: ModelSpec,
    mu_true: f64,
    base_seed: u64,
    dataset_seed: u64,
    iterations: usize,
    burn_in: usize,
    max_lag: usize,
    mcse_estimator: &'static str,
    posterior: asis_panel::NormalMoments,
    rates: RateReport,
    schemes: Vec<SchemeResult>,
}

fn simulate(a: SimulateArgs, format: Format) -> Result<()> {
    let (eps, alpha) = a.variances.resolve(a.t)?;
    let spec = ModelSpec::known(eps, alpha, a.prior.phi, a.prior.tau_sq)?;
    let dataset_seed = experiments::derive_seed(a.seed, &[0]);
    let data = generate_synthetic(&spec, a.mu_true, a.n, a.t, dataset_seed)?;
    let rates = rate_report(&spec, a.n, a.t)?;
    let posterior = posterior_oracle_mu(&data, &spec)?;

    let runs: Vec<(SamplerScheme, u64, asis_panel::ChainOutput)> = a
        .schemes
        .par_iter()
        .map(|&scheme| {
            let idx = SamplerScheme::ALL.iter().position(|s| *s == scheme).unwrap() as u64;
            let seed = experiments::derive_seed(a.seed, &[1, idx]);
            let cfg = RunConfig {
                iterations: a.iterations,
                burn_in: a.burn_in,
                seed,
            };
            run_chain(scheme, &data, &spec, &cfg)
                .map(|out| (scheme, seed, out))
                .with_context(|| format!("running {scheme}"))
        })
        .collect::<Result<_>>()?;

    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let mut schemes = Vec::new();
    for (scheme, seed, out) in &runs {
        data_io::write_draws_csv(out, a.out.join(format!("draws_{}.csv", scheme.key())))?;
        let diagnostics = DiagnosticsReport::from_chain(out.mu(), a.burn_in, a.max_lag)
            .with_context(|| format!("diagnosing {scheme}"))?;
        schemes.push(SchemeResult {
            scheme: *scheme,
            seed: *seed,
            rho_exact: match scheme {
                SamplerScheme::Sa => Some(rates.rho_sa_exact),
                SamplerScheme::Aa => Some(rates.rho_aa_exact),
                _ => None,
            },
            diagnostics,
        });
    }
    let summary = SimulateSummary {
        command: "simulate",
        n: a.n,
        t: a.t,
        spec,
        mu_true: a.mu_true,
        base_seed: a.seed,
        dataset_seed,
        iterations: a.iterations,
        burn_in: a.burn_in,
        max_lag: a.max_lag,
        mcse_estimator: asis_panel::diagnostics::MCSE_ESTIMATOR,
        posterior,
        rates,
        schemes,
    };
    write_json(&a.out, "summary.json", &summary)?;

    match format {
        Format::Json => print_json(&summary)?,
        Format::Csv => {
            println!("scheme,mean,sd,mcse,ess,lag1_acf,rho_exact");
            for s in &summary.schemes {
                let d = &s.diagnostics;
                println!(
                    "{},{},{},{},{},{},{}",
                    s.scheme.key(), d.mean, d.sd, d.mcse, d.ess, lag1(d),
                    s.rho_exact.map_or(String::new(), |v| v.to_string())
                );
            }
        }
        Format::Human => {
            println!(
                "N = {}, T = {}, sigma_eps^2 = {eps}, sigma_alpha^2 = {alpha}; posterior mu_alpha: mean {:.6}, sd {:.6}",
                a.n, a.t, posterior.mean, posterior.variance.sqrt()
            );
            println!(
                "{:<14} {:>11} {:>11} {:>11} {:>10} {:>9} {:>9}",
                "scheme", "mean", "sd", "MCSE", "ESS", "lag-1", "rho"
            );
            for s in &summary.schemes {
                let d = &s.diagnostics;
                println!(
                    "{:<14} {:>11.6} {:>11.6} {:>11.3e} {:>10.1} {:>9.4} {:>9}",
                    s.scheme.to_string(), d.mean, d.sd, d.mcse, d.ess, lag1(d),
                    s.rho_exact.map_or("-".into(), |v| format!("{v:.4}"))
                );
            }
            println!("wrote {}", a.out.display());
        }
    }
    Ok(())
}

fn lag1(d: &DiagnosticsReport) -> f64 {
    d.acf.get(1).copied().unwrap_or(f64::NAN)
}

fn reproduce(a: ReproduceArgs, format: Format) -> Result<()> {
    let mut grid = ExperimentGrid::default();
    if let Some(path) = &a.config {
        let text = fs::read_to_string(path)
            .map_err(|e| asis_panel::Error::Io {
                path: path.clone(),
                source: e,
            })?;
        grid.apply_config_str(&text)
            .with_context(|| format!("reading config {}", path.display()))?;
    }
    if let Some(v) = a.seed {
        grid.base_seed = v;
    }
    if let Some(v) = a.iterations {
        grid.iterations = v;
    }
    if let Some(v) = a.burn_in {
        grid.burn_in = v;
    }
    if let Some(v) = a.replications {
        grid.replications = v;
    }
    if let Some(v) = a.panel_sizes {
        grid.panel_sizes = v;
    }
    if let Some(v) = a.patterns {
        grid.patterns = v.into_iter().map(Pattern::standard).collect::<asis_panel::Result<_>>()?;
    }
    if let Some(v) = a.schemes {
        grid.schemes = v;
    }
    if let Some(v) = a.max_lag {
        grid.max_lag = v;
    }
    grid.shared_dataset |= a.shared_dataset;

    let started = Instant::now();
    let result = experiments::run_grid(&grid)?;
    let mut summary = GridSummary::new(&grid, &result);
    summary.elapsed_seconds = Some(started.elapsed().as_secs_f64());
    summary.threads = Some(rayon::current_num_threads());
    let files = experiments::write_grid_outputs(&summary, &a.out)?;

    match format {
        Format::Json => print_json(&summary)?,
        Format::Csv => print!("{}", fs::read_to_string(&files[0])?),
        Format::Human => {
            let mut sizes = grid.panel_sizes.clone();
            sizes.dedup();
            for (n, t) in sizes {
                println!("(N, T) = ({n}, {t}); mean MCSE of mu_alpha x 1e5 over {} replications", grid.replications);
                print!("{:<12}", "");
                for s in &grid.schemes {
                    print!(" {:>14}", s.to_string());
                }
                println!();
                for p in &grid.patterns {
                    print!("{:<12}", p.label);
                    for &s in &grid.schemes {
                        let v = result.row(n, t, &p.label, s).map_or(f64::NAN, |r| r.scaled_mcse());
                        print!(" {v:>14.3}");
                    }
                    println!();
                }
                println!();
            }
            println!(
                "{} files written to {} in {:.1} s",
                files.len(),
                a.out.display(),
                started.elapsed().as_secs_f64()
            );
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct FitComparison<'a> {
    command: &'static str,
    input: &'a Path,
    log_y: bool,
    log_x: &'a [usize],
    runs: Vec<FitRunSummary<'a>>,
}

#[derive(Serialize)]
struct FitRunSummary<'a> {
    scheme: SamplerScheme,
    config: &'a FitConfig,
    mu_alpha: &'a DiagnosticsReport,
    parameters: &'a [data_io::ParamSummary],
}

fn fit(a: FitArgs, format: Format) -> Result<()> {
    let panel = data_io::load_long_csv_labelled(&a.input)?;
    let log_x: Vec<usize> = if a.log_x.iter().any(|s| s == "all") {
        (0..panel.covariate_names.len()).collect()
    } else {
        a.log_x
            .iter()
            .map(|s| {
                panel
                    .covariate_names
                    .iter()
                    .position(|c| c == s)
                    .or_else(|| s.parse::<usize>().ok().filter(|&i| i >= 1).map(|i| i - 1))
                    .ok_or_else(|| usage(format!("--log-x: no covariate named `{s}`")))
            })
            .collect::<Result<_>>()?
    };
    let panel = if a.log_y || !log_x.is_empty() {
        panel.log_transform(a.log_y, &log_x)?
    } else {
        panel
    };

    let variance_mode = if a.known_variances {
        VarianceMode::Known
    } else {
        VarianceMode::Sampled {
            eps_prior: InvGammaPrior::new(a.eps_prior_shape, a.eps_prior_scale)?,
            alpha_prior: InvGammaPrior::new(a.alpha_prior_shape, a.alpha_prior_scale)?,
        }
    };
    let spec = ModelSpec {
        sigma_eps_sq: a.sigma_eps_sq,
        sigma_alpha_sq: a.sigma_alpha_sq,
        phi_alpha: a.prior.phi,
        tau_alpha_sq: a.prior.tau_sq,
        variance_mode,
    };
    spec.validate()?;
    let configs: Vec<FitConfig> = a
        .schemes
        .iter()
        .map(|&scheme| FitConfig {
            spec,
            beta_prior_mean: a.beta_prior_mean.clone(),
            beta_prior_variance: a.beta_prior_var,
            scheme,
            iterations: a.iterations,
            burn_in: a.burn_in,
            seed: a.seed,
            two_stage: a.two_stage,
            record_effects: a.record_effects,
            max_lag: a.max_lag,
        })
        .collect();
    let outputs: Vec<FitOutput> = configs
        .par_iter()
        .map(|cfg| data_io::fit(&panel.data, cfg).with_context(|| format!("fitting {}", cfg.scheme)))
        .collect::<Result<_>>()?;

    for (cfg, out) in configs.iter().zip(&outputs) {
        data_io::write_fit_outputs(
            out,
            cfg,
            &panel.data,
            &panel.covariate_names,
            &a.out.join(cfg.scheme.key()),
        )?;
    }
    let comparison = FitComparison {
        command: "fit",
        input: &a.input,
        log_y: a.log_y,
        log_x: &log_x,
        runs: configs
            .iter()
            .zip(&outputs)
            .map(|(cfg, out)| FitRunSummary {
                scheme: cfg.scheme,
                config: cfg,
                mu_alpha: &out.diagnostics,
                parameters: &out.summaries,
            })
            .collect(),
    };
    write_json(&a.out, "summary.json", &comparison)?;

    match format {
        Format::Json => print_json(&comparison)?,
        Format::Csv => {
            println!("scheme,parameter,mean,sd,mcse,ess");
            for r in &comparison.runs {
                for p in r.parameters {
                    println!(
                        "{},{},{},{},{},{}",
                        r.scheme.key(), p.name, p.mean, p.sd,
                        p.mcse.map_or(String::new(), |v| v.to_string()),
                        p.ess.map_or(String::new(), |v| v.to_string())
                    );
                }
            }
        }
        Format::Human => {
            println!(
                "{}: N = {}, T = {}, K = {}",
                a.input.display(),
                panel.data.n_individuals(),
                panel.data.n_periods(),
                panel.data.n_covariates()
            );
            println!(
                "{:<14} {:>11} {:>11} {:>11} {:>10} {:>9}",
                "scheme", "mu mean", "mu sd", "MCSE", "ESS", "lag-1"
            );
            for r in &comparison.runs {
                let d = r.mu_alpha;
                println!(
                    "{:<14} {:>11.6} {:>11.6} {:>11.3e} {:>10.1} {:>9.4}",
                    r.scheme.to_string(), d.mean, d.sd, d.mcse, d.ess, lag1(d)
                );
            }
            if let Some(first) = comparison.runs.first() {
                println!();
                println!("posterior summaries ({}):", first.scheme);
                for p in first.parameters.iter().filter(|p| !p.name.starts_with("alpha_")) {
                    println!("  {:<16} {:>12.6} (sd {:.6})", p.name, p.mean, p.sd);
                }
            }
            println!("wrote {}", a.out.display());
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct DiagnoseEntry {
    parameter: String,
    report: DiagnosticsReport,
}

#[derive(Serialize)]
struct DiagnoseSummary<'a> {
    command: &'static str,
    input: &'a Path,
    burn_in: usize,
    max_lag: usize,
    mcse_estimator: &'static str,
    parameters: Vec<DiagnoseEntry>,
}

fn diagnose(a: DiagnoseArgs, format: Format) -> Result<()> {
    let table = data_io::read_draws_csv(&a.input)?;
    let names: Vec<String> = if a.params.is_empty() {
        table.parameters.clone()
    } else {
        a.params.clone()
    };
    let mut parameters = Vec::new();
    for name in names {
        let col = table
            .column(&name)
            .ok_or_else(|| usage(format!("--param: `{name}` is not a column of {}", a.input.display())))?;
        if a.burn_in >= col.len() {
            return Err(usage(format!(
                "--burn-in {} discards all {} draws",
                a.burn_in,
                col.len()
            )));
        }
        let report = DiagnosticsReport::from_chain(&col[a.burn_in..], a.burn_in, a.max_lag)
            .with_context(|| format!("diagnosing `{name}`"))?;
        parameters.push(DiagnoseEntry {
            parameter: name,
            report,
        });
    }
    let summary = DiagnoseSummary {
        command: "diagnose",
        input: &a.input,
        burn_in: a.burn_in,
        max_lag: a.max_lag,
        mcse_estimator: asis_panel::diagnostics::MCSE_ESTIMATOR,
        parameters,
    };
    if let Some(out) = &a.out {
        write_json(out, "summary.json", &summary)?;
    }
    match format {
        Format::Json => print_json(&summary)?,
        Format::Csv => {
            println!("parameter,n_draws,mean,sd,mcse,ess,lag1_acf");
            for e in &summary.parameters {
                let d = &e.report;
                println!("{},{},{},{},{},{},{}", e.parameter, d.n_draws, d.mean, d.sd, d.mcse, d.ess, lag1(d));
            }
        }
        Format::Human => {
            println!(
                "{:<16} {:>8} {:>12} {:>12} {:>11} {:>10} {:>9}",
                "parameter", "draws", "mean", "sd", "MCSE", "ESS", "lag-1"
            );
            for e in &summary.parameters {
                let d = &e.report;
                println!(
                    "{:<16} {:>8} {:>12.6} {:>12.6} {:>11.3e} {:>10.1} {:>9.4}",
                    e.parameter, d.n_draws, d.mean, d.sd, d.mcse, d.ess, lag1(d)
                );
            }
        }
    }
    Ok(())
}
