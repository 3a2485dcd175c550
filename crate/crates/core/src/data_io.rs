//! Real-panel pipeline: long-format CSV loading, a covariate coefficient block, optional
//! inverse-gamma variance updates, and the `fit` driver with its output files.
//!
//! Each fit sweep runs `beta | alpha, mu, variances` (partialing `x'beta` out of `y`), then the
//! scheme's `(alpha, mu_alpha)` block on the residualized panel, then the variance block. The
//! three blocks read from separate ChaCha8 streams of the same seed, so the beta and variance
//! draws consume the same random numbers whatever scheme runs in between.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::diagnostics::{self, DiagnosticsReport};
use crate::error::{ensure_positive, Error, Result};
use crate::model::{InvGammaPrior, ModelSpec, PanelDataset, VarianceMode};
use crate::sampler::{chain_rng, step, ChainOutput, ChainState, RunConfig, SamplerScheme};

/// A loaded long-format panel with its labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LongPanel {
    pub data: PanelDataset,
    /// Unit ids in lexicographic order (row order of `data`).
    pub unit_ids: Vec<String>,
    /// Periods in ascending order (column order of `data`).
    pub periods: Vec<i64>,
    pub covariate_names: Vec<String>,
}

impl LongPanel {
    /// Natural logarithm of `y` (if `log_y`) and of the listed covariate columns (0-based).
    pub fn log_transform(&self, log_y: bool, log_x: &[usize]) -> Result<Self> {
        let k = self.covariate_names.len();
        if let Some(&bad) = log_x.iter().find(|&&c| c >= k) {
            return Err(Error::domain(
                "log_x",
                format!("covariate index {bad} out of range (K = {k})"),
            ));
        }
        let t = self.periods.len();
        let log = |v: f64, what: &str, cell: usize| -> Result<f64> {
            if v > 0.0 {
                Ok(v.ln())
            } else {
                Err(Error::domain(
                    "log transform",
                    format!(
                        "{what} = {v} is not positive (unit `{}`, period {})",
                        self.unit_ids[cell / t],
                        self.periods[cell % t]
                    ),
                ))
            }
        };
        let y = if log_y {
            self.data
                .y()
                .iter()
                .enumerate()
                .map(|(c, &v)| log(v, "y", c))
                .collect::<Result<_>>()?
        } else {
            self.data.y().to_vec()
        };
        let mut data = PanelDataset::new(self.data.n_individuals(), t, y)?;
        if let Some(cov) = self.data.covariates() {
            let mut values = cov.values().to_vec();
            for &col in log_x {
                for cell in 0..values.len() / k {
                    let v = &mut values[cell * k + col];
                    *v = log(*v, &self.covariate_names[col], cell)?;
                }
            }
            data = data.with_covariates(k, values)?;
        }
        Ok(Self {
            data,
            ..self.clone()
        })
    }
}

/// Loads a balanced long-format panel from a CSV with header `id,t,y,x1,...,xK`.
pub fn load_long_csv(path: impl AsRef<Path>) -> Result<PanelDataset> {
    load_long_csv_labelled(path).map(|p| p.data)
}

/// As [`load_long_csv`], keeping unit ids, periods and covariate names.
pub fn load_long_csv_labelled(path: impl AsRef<Path>) -> Result<LongPanel> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_long_csv(file)
}

/// Parses long-format panel CSV from any reader. Row numbers in errors are file line numbers.
pub fn parse_long_csv<R: std::io::Read>(reader: R) -> Result<LongPanel> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers()?.clone();
    let names: Vec<&str> = header.iter().collect();
    if names.len() < 3
        || !names[0].eq_ignore_ascii_case("id")
        || !names[1].eq_ignore_ascii_case("t")
        || !names[2].eq_ignore_ascii_case("y")
    {
        return Err(Error::Parse {
            row: 1,
            message: format!("header must start with id,t,y; got `{}`", names.join(",")),
        });
    }
    let covariate_names: Vec<String> = names[3..].iter().map(|s| s.to_string()).collect();
    let k = covariate_names.len();

    // unit -> period -> (y, x)
    let mut cells: BTreeMap<String, BTreeMap<i64, (f64, Vec<f64>)>> = BTreeMap::new();
    let mut periods = BTreeSet::new();
    for record in rdr.records() {
        let record = record?;
        let row = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != 3 + k {
            return Err(Error::Parse {
                row,
                message: format!("expected {} fields, found {}", 3 + k, record.len()),
            });
        }
        let num = |idx: usize| -> Result<f64> {
            let raw = &record[idx];
            let v: f64 = raw.parse().map_err(|_| Error::Parse {
                row,
                message: format!("column `{}`: `{raw}` is not a number", names[idx]),
            })?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Parse {
                    row,
                    message: format!("column `{}`: `{raw}` is not finite", names[idx]),
                })
            }
        };
        let unit = record[0].to_string();
        if unit.is_empty() {
            return Err(Error::Parse {
                row,
                message: "empty id".into(),
            });
        }
        let period: i64 = record[1].parse().map_err(|_| Error::Parse {
            row,
            message: format!("column `t`: `{}` is not an integer", &record[1]),
        })?;
        let y = num(2)?;
        let x = (3..3 + k).map(num).collect::<Result<Vec<_>>>()?;
        let unit_cells = cells.entry(unit.clone()).or_default();
        if unit_cells.insert(period, (y, x)).is_some() {
            return Err(Error::DuplicateCell { unit, period, row });
        }
        periods.insert(period);
    }
    if cells.is_empty() {
        return Err(Error::Parse {
            row: 2,
            message: "no data rows".into(),
        });
    }

    let periods: Vec<i64> = periods.into_iter().collect();
    let (first, last) = (periods[0], periods[periods.len() - 1]);
    if let Some(gap) = (first..=last).find(|p| periods.binary_search(p).is_err()) {
        return Err(Error::UnbalancedPanel {
            unit: cells.keys().next().cloned().unwrap_or_default(),
            period: gap,
        });
    }
    for (unit, unit_cells) in &cells {
        if let Some(&missing) = periods.iter().find(|p| !unit_cells.contains_key(p)) {
            return Err(Error::UnbalancedPanel {
                unit: unit.clone(),
                period: missing,
            });
        }
    }

    let (n, t) = (cells.len(), periods.len());
    let mut y = Vec::with_capacity(n * t);
    let mut x = Vec::with_capacity(n * t * k);
    for unit_cells in cells.values() {
        for (yv, xv) in unit_cells.values() {
            y.push(*yv);
            x.extend_from_slice(xv);
        }
    }
    let mut data = PanelDataset::new(n, t, y)?;
    if k > 0 {
        data = data.with_covariates(k, x)?;
    }
    Ok(LongPanel {
        data,
        unit_ids: cells.into_keys().collect(),
        periods,
        covariate_names,
    })
}

/// Writes a panel in the long format read by [`load_long_csv`].
pub fn write_long_csv(panel: &LongPanel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["id".to_string(), "t".into(), "y".into()];
    header.extend(panel.covariate_names.iter().cloned());
    w.write_record(&header)?;
    let t = panel.periods.len();
    let k = panel.data.n_covariates();
    for (cell, y) in panel.data.y().iter().enumerate() {
        let mut rec = vec![
            panel.unit_ids[cell / t].clone(),
            panel.periods[cell % t].to_string(),
            y.to_string(),
        ];
        if let Some(cov) = panel.data.covariates() {
            rec.extend(cov.cell(cell)[..k].iter().map(|v| v.to_string()));
        }
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub spec: ModelSpec,
    /// Prior mean of `beta`; empty means all zeros.
    pub beta_prior_mean: Vec<f64>,
    /// Common prior variance of every `beta_k` (diagonal prior).
    pub beta_prior_variance: f64,
    pub scheme: SamplerScheme,
    pub iterations: usize,
    pub burn_in: usize,
    pub seed: u64,
    /// Fix `beta` at the pooled least-squares estimate instead of sampling it.
    pub two_stage: bool,
    /// Also record every `alpha_i` in the draws.
    pub record_effects: bool,
    pub max_lag: usize,
}

impl FitConfig {
    pub const DEFAULT_BETA_PRIOR_VARIANCE: f64 = 100.0;

    /// Sampled-variance fit with default hyperpriors and the default prior on `mu_alpha`.
    pub fn new(scheme: SamplerScheme, iterations: usize, burn_in: usize, seed: u64) -> Self {
        Self {
            spec: ModelSpec {
                sigma_eps_sq: 1.0,
                sigma_alpha_sq: 1.0,
                phi_alpha: ModelSpec::DEFAULT_PHI_ALPHA,
                tau_alpha_sq: ModelSpec::DEFAULT_TAU_ALPHA_SQ,
                variance_mode: VarianceMode::sampled_default(),
            },
            beta_prior_mean: Vec::new(),
            beta_prior_variance: Self::DEFAULT_BETA_PRIOR_VARIANCE,
            scheme,
            iterations,
            burn_in,
            seed,
            two_stage: false,
            record_effects: false,
            max_lag: diagnostics::DEFAULT_MAX_LAG,
        }
    }

    pub fn validate(&self, k: usize) -> Result<()> {
        self.spec.validate()?;
        self.run_config().validate()?;
        ensure_positive("beta_prior_variance", self.beta_prior_variance)?;
        if !self.beta_prior_mean.is_empty() && self.beta_prior_mean.len() != k {
            return Err(Error::Dimension {
                what: "beta_prior_mean",
                expected: k,
                got: self.beta_prior_mean.len(),
            });
        }
        Ok(())
    }

    fn run_config(&self) -> RunConfig {
        RunConfig {
            iterations: self.iterations,
            burn_in: self.burn_in,
            seed: self.seed,
        }
    }

    fn prior_mean(&self, k: usize) -> DVector<f64> {
        if self.beta_prior_mean.is_empty() {
            DVector::zeros(k)
        } else {
            DVector::from_column_slice(&self.beta_prior_mean)
        }
    }
}

const BETA_STREAM: u64 = 1;
const VARIANCE_STREAM: u64 = 2;

fn block_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn design(data: &PanelDataset) -> Option<(usize, DMatrix<f64>)> {
    data.covariates().map(|c| {
        let k = c.k();
        (
            k,
            DMatrix::from_row_slice(data.n_individuals() * data.n_periods(), k, c.values()),
        )
    })
}

/// Fails with `CollinearCovariates` when the non-zero columns of `X` are linearly dependent.
///
/// All-zero columns are uninformative rather than collinear: their coefficients simply keep
/// their prior.
fn check_collinearity(xtx: &DMatrix<f64>) -> Result<()> {
    let k = xtx.nrows();
    let scale = xtx.diagonal().max();
    let live: Vec<usize> = (0..k).filter(|&j| xtx[(j, j)] > 1e-12 * scale).collect();
    if live.is_empty() {
        return Ok(());
    }
    let corr = DMatrix::from_fn(live.len(), live.len(), |a, b| {
        let (i, j) = (live[a], live[b]);
        xtx[(i, j)] / (xtx[(i, i)] * xtx[(j, j)]).sqrt()
    });
    let eig = corr.symmetric_eigenvalues();
    let rank = eig.iter().filter(|&&v| v > 1e-10).count();
    if rank < live.len() {
        return Err(Error::CollinearCovariates {
            rank: rank + (k - live.len()),
            k,
        });
    }
    Ok(())
}

/// The `beta` Gibbs block: precomputed `X'X`, prior and design for one dataset.
#[derive(Debug, Clone)]
pub struct CovariateBlock {
    x: DMatrix<f64>,
    xtx: DMatrix<f64>,
    prior_mean: DVector<f64>,
    prior_precision: f64,
}

impl CovariateBlock {
    pub fn new(data: &PanelDataset, config: &FitConfig) -> Result<Self> {
        let (k, x) = design(data).ok_or_else(|| {
            Error::domain("covariates", "the covariate block needs a panel with covariates")
        })?;
        config.validate(k)?;
        let xtx = x.tr_mul(&x);
        check_collinearity(&xtx)?;
        Ok(Self {
            x,
            xtx,
            prior_mean: config.prior_mean(k),
            prior_precision: 1.0 / config.beta_prior_variance,
        })
    }

    /// Mean and precision of `beta | alpha, sigma_eps^2, y`.
    pub fn conditional(&self, data: &PanelDataset, state: &ChainState) -> (DVector<f64>, DMatrix<f64>) {
        let t = data.n_periods();
        let resid = DVector::from_iterator(
            data.y().len(),
            data.y().iter().enumerate().map(|(c, y)| y - state.alpha[c / t]),
        );
        let inv_eps = 1.0 / state.sigma_eps_sq;
        let k = self.xtx.nrows();
        let precision = &self.xtx * inv_eps + DMatrix::identity(k, k) * self.prior_precision;
        let rhs = self.x.tr_mul(&resid) * inv_eps + &self.prior_mean * self.prior_precision;
        let chol = precision
            .clone()
            .cholesky()
            .expect("prior term keeps the precision positive definite");
        (chol.solve(&rhs), precision)
    }

    /// Draws `beta`, stores it in the state and returns `y - x'beta`.
    pub fn draw<R: Rng + ?Sized>(
        &self,
        state: &mut ChainState,
        data: &PanelDataset,
        rng: &mut R,
    ) -> Result<Vec<f64>> {
        let (mean, precision) = self.conditional(data, state);
        let k = mean.len();
        let z = DVector::from_iterator(k, (0..k).map(|_| rng.sample::<f64, _>(StandardNormal)));
        let chol = precision
            .cholesky()
            .expect("prior term keeps the precision positive definite");
        // Q = L L' and beta = mean + L'^-1 z has covariance Q^-1
        let shift = chol
            .l()
            .transpose()
            .solve_upper_triangular(&z)
            .ok_or(Error::NonFinite { what: "beta draw" })?;
        let beta: Vec<f64> = (mean + shift).iter().copied().collect();
        if beta.iter().any(|b| !b.is_finite()) {
            return Err(Error::NonFinite { what: "beta draw" });
        }
        let resid = residualize(data, &beta);
        state.beta = Some(beta);
        Ok(resid)
    }
}

/// `y_it - x_it' beta`.
pub fn residualize(data: &PanelDataset, beta: &[f64]) -> Vec<f64> {
    match data.covariates() {
        None => data.y().to_vec(),
        Some(cov) => data
            .y()
            .iter()
            .enumerate()
            .map(|(c, y)| y - cov.cell(c).iter().zip(beta).map(|(x, b)| x * b).sum::<f64>())
            .collect(),
    }
}

/// One `beta` draw from its Gaussian full conditional; returns the residualized response.
///
/// Convenience wrapper that rebuilds the [`CovariateBlock`] on every call; `fit` builds it once.
pub fn partial_out_step<R: Rng + ?Sized>(
    state: &mut ChainState,
    data: &PanelDataset,
    config: &FitConfig,
    rng: &mut R,
) -> Result<Vec<f64>> {
    CovariateBlock::new(data, config)?.draw(state, data, rng)
}

/// Draw from `IG(shape, scale)` as `scale / Gamma(shape, 1)`.
pub fn draw_inv_gamma<R: Rng + ?Sized>(prior: InvGammaPrior, rng: &mut R) -> Result<f64> {
    let g = Gamma::new(prior.shape, 1.0)
        .map_err(|e| Error::domain("inverse-gamma shape", e.to_string()))?;
    Ok(prior.scale / g.sample(rng))
}

/// Conjugate inverse-gamma updates of `sigma_eps^2` and `sigma_alpha^2`.
///
/// `resid_y` is the response the `(alpha, mu)` block saw (`y - x'beta`, or `y`). Known mode
/// leaves the state untouched and draws nothing.
pub fn variance_updates<R: Rng + ?Sized>(
    state: &mut ChainState,
    resid_y: &[f64],
    data: &PanelDataset,
    spec: &ModelSpec,
    rng: &mut R,
) -> Result<()> {
    let VarianceMode::Sampled {
        eps_prior,
        alpha_prior,
    } = spec.variance_mode
    else {
        return Ok(());
    };
    let (n, t) = (data.n_individuals(), data.n_periods());
    if resid_y.len() != n * t {
        return Err(Error::Dimension {
            what: "residualized y",
            expected: n * t,
            got: resid_y.len(),
        });
    }
    let sse: f64 = resid_y
        .iter()
        .enumerate()
        .map(|(c, y)| (y - state.alpha[c / t]).powi(2))
        .sum();
    let ssa: f64 = state.alpha.iter().map(|a| (a - state.mu_alpha).powi(2)).sum();
    state.sigma_eps_sq = draw_inv_gamma(
        InvGammaPrior {
            shape: eps_prior.shape + (n * t) as f64 / 2.0,
            scale: eps_prior.scale + sse / 2.0,
        },
        rng,
    )?;
    state.sigma_alpha_sq = draw_inv_gamma(
        InvGammaPrior {
            shape: alpha_prior.shape + n as f64 / 2.0,
            scale: alpha_prior.scale + ssa / 2.0,
        },
        rng,
    )?;
    if !(state.sigma_eps_sq.is_finite() && state.sigma_alpha_sq.is_finite()) {
        return Err(Error::NonFinite { what: "variance draw" });
    }
    Ok(())
}

/// Pooled least squares of `y` on an intercept and the non-zero covariate columns.
///
/// Coefficients of all-zero columns are reported as 0.
pub fn pooled_ols(data: &PanelDataset) -> Result<Vec<f64>> {
    let (k, x) = design(data)
        .ok_or_else(|| Error::domain("covariates", "pooled OLS needs covariates"))?;
    check_collinearity(&x.tr_mul(&x))?;
    let live: Vec<usize> = (0..k).filter(|&j| x.column(j).iter().any(|v| *v != 0.0)).collect();
    let rows = x.nrows();
    let z = DMatrix::from_fn(rows, live.len() + 1, |r, c| {
        if c == 0 {
            1.0
        } else {
            x[(r, live[c - 1])]
        }
    });
    let y = DVector::from_column_slice(data.y());
    let coef = z
        .tr_mul(&z)
        .cholesky()
        .ok_or(Error::CollinearCovariates {
            rank: live.len(),
            k: live.len() + 1,
        })?
        .solve(&z.tr_mul(&y));
    let mut beta = vec![0.0; k];
    for (pos, &j) in live.iter().enumerate() {
        beta[j] = coef[pos + 1];
    }
    Ok(beta)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSummary {
    pub name: String,
    pub mean: f64,
    pub sd: f64,
    /// `None` for parameters that stayed constant over the run.
    pub mcse: Option<f64>,
    pub ess: Option<f64>,
}

impl ParamSummary {
    fn from_draws(name: &str, draws: &[f64]) -> Self {
        let n = draws.len() as f64;
        let mean = draws.iter().sum::<f64>() / n;
        let sd = if draws.len() > 1 {
            (draws.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self {
            name: name.to_string(),
            mean,
            sd,
            mcse: diagnostics::mcse_batch_means(draws, None).ok(),
            ess: diagnostics::ess(draws).ok(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitOutput {
    pub chain: ChainOutput,
    /// Diagnostics of the `mu_alpha` chain.
    pub diagnostics: DiagnosticsReport,
    pub summaries: Vec<ParamSummary>,
    /// The fixed coefficient vector of a two-stage fit.
    pub beta_fixed: Option<Vec<f64>>,
    pub final_state: ChainState,
}

/// Runs one chain of the full pipeline: beta block, scheme block, variance block.
pub fn fit(data: &PanelDataset, config: &FitConfig) -> Result<FitOutput> {
    let k = data.n_covariates();
    config.validate(k)?;
    let spec = &config.spec;
    let sampled = !spec.variance_mode.is_known();

    let mut beta_fixed = None;
    let mut block = None;
    let mut resid = data.y().to_vec();
    let mut initial_beta = None;
    if k > 0 {
        if config.two_stage {
            let b = pooled_ols(data)?;
            resid = residualize(data, &b);
            beta_fixed = Some(b);
        } else {
            let cb = CovariateBlock::new(data, config)?;
            let b = pooled_ols(data).unwrap_or_else(|_| config.prior_mean(k).iter().copied().collect());
            resid = residualize(data, &b);
            initial_beta = Some(b);
            block = Some(cb);
        }
    }
    let mut working = data.without_covariates().with_response(resid.clone())?;
    let mut state = ChainState::initial(&working, spec);
    state.beta = initial_beta;

    let mut parameters = vec![ChainOutput::MU.to_string()];
    if sampled {
        parameters.push("sigma_eps_sq".into());
        parameters.push("sigma_alpha_sq".into());
    }
    if block.is_some() {
        parameters.extend((1..=k).map(|j| format!("beta_{j}")));
    }
    if config.record_effects {
        parameters.extend((1..=data.n_individuals()).map(|i| format!("alpha_{i}")));
    }
    let kept = config.iterations - config.burn_in;
    let mut draws: Vec<Vec<f64>> = vec![Vec::with_capacity(kept); parameters.len()];

    let mut rng = chain_rng(config.seed);
    let mut beta_rng = block_rng(config.seed, BETA_STREAM);
    let mut var_rng = block_rng(config.seed, VARIANCE_STREAM);
    for it in 0..config.iterations {
        let mut sweep = || -> Result<()> {
            if let Some(cb) = &block {
                resid = cb.draw(&mut state, data, &mut beta_rng)?;
                working = working.with_response(resid.clone())?;
            }
            step(config.scheme, &mut state, &working, spec, &mut rng)?;
            if sampled {
                variance_updates(&mut state, &resid, data, spec, &mut var_rng)?;
            }
            Ok(())
        };
        sweep().map_err(|e| e.context(format!("fit sweep {it}")))?;
        if !state.mu_alpha.is_finite() {
            return Err(Error::NonFinite { what: "mu_alpha" });
        }
        if it >= config.burn_in {
            let mut col = draws.iter_mut();
            col.next().unwrap().push(state.mu_alpha);
            if sampled {
                col.next().unwrap().push(state.sigma_eps_sq);
                col.next().unwrap().push(state.sigma_alpha_sq);
            }
            if block.is_some() {
                for b in state.beta.as_deref().unwrap_or(&[]) {
                    col.next().unwrap().push(*b);
                }
            }
            if config.record_effects {
                for a in &state.alpha {
                    col.next().unwrap().push(*a);
                }
            }
        }
    }

    let chain = ChainOutput {
        scheme: config.scheme,
        seed: config.seed,
        iterations: config.iterations,
        burn_in: config.burn_in,
        parameters,
        draws,
    };
    let diagnostics = DiagnosticsReport::from_chain(chain.mu(), config.burn_in, config.max_lag)?;
    let summaries = chain
        .parameters
        .iter()
        .zip(&chain.draws)
        .map(|(name, d)| ParamSummary::from_draws(name, d))
        .collect();
    Ok(FitOutput {
        chain,
        diagnostics,
        summaries,
        beta_fixed,
        final_state: state,
    })
}

/// Writes `iteration,<param>,...` rows; iterations are 1-based sweep numbers.
pub fn write_draws_csv(chain: &ChainOutput, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["iteration".to_string()];
    header.extend(chain.parameters.iter().cloned());
    w.write_record(&header)?;
    for row in 0..chain.n_draws() {
        let mut rec = vec![(chain.burn_in + row + 1).to_string()];
        rec.extend(chain.draws.iter().map(|d| format!("{:e}", d[row])));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Draws table read back from a `draws.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct DrawsTable {
    pub iterations: Vec<u64>,
    pub parameters: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl DrawsTable {
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.parameters
            .iter()
            .position(|p| p == name)
            .map(|i| self.columns[i].as_slice())
    }
}

/// Reads a draws file. The `iteration` column is optional; every other column is a parameter.
pub fn read_draws_csv(path: impl AsRef<Path>) -> Result<DrawsTable> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let header = rdr.headers()?.clone();
    let has_iter = header.get(0) == Some("iteration");
    let offset = usize::from(has_iter);
    let parameters: Vec<String> = header.iter().skip(offset).map(str::to_string).collect();
    if parameters.is_empty() {
        return Err(Error::Parse {
            row: 1,
            message: "draws file has no parameter columns".into(),
        });
    }
    let mut iterations = Vec::new();
    let mut columns = vec![Vec::new(); parameters.len()];
    for record in rdr.records() {
        let record = record?;
        let row = record.position().map_or(0, |p| p.line() as usize);
        let parse = |idx: usize| -> Result<f64> {
            record[idx].parse::<f64>().map_err(|_| Error::Parse {
                row,
                message: format!("column `{}`: `{}` is not a number", &header[idx], &record[idx]),
            })
        };
        if has_iter {
            iterations.push(parse(0)? as u64);
        } else {
            iterations.push(iterations.len() as u64 + 1);
        }
        for (j, col) in columns.iter_mut().enumerate() {
            col.push(parse(j + offset)?);
        }
    }
    Ok(DrawsTable {
        iterations,
        parameters,
        columns,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FitSummary<'a> {
    pub config: &'a FitConfig,
    pub n_individuals: usize,
    pub n_periods: usize,
    pub covariate_names: &'a [String],
    pub mcse_estimator: &'static str,
    pub mu_alpha: &'a DiagnosticsReport,
    pub parameters: &'a [ParamSummary],
    pub beta_fixed: Option<&'a [f64]>,
}

/// Writes `draws.csv` and `summary.json` into `dir`.
pub fn write_fit_outputs(
    out: &FitOutput,
    config: &FitConfig,
    data: &PanelDataset,
    covariate_names: &[String],
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let draws = dir.join("draws.csv");
    write_draws_csv(&out.chain, &draws)?;
    let summary = FitSummary {
        config,
        n_individuals: data.n_individuals(),
        n_periods: data.n_periods(),
        covariate_names,
        mcse_estimator: diagnostics::MCSE_ESTIMATOR,
        mu_alpha: &out.diagnostics,
        parameters: &out.summaries,
        beta_fixed: out.beta_fixed.as_deref(),
    };
    let json = dir.join("summary.json");
    fs::write(&json, serde_json::to_string_pretty(&summary)?).map_err(|e| Error::io(&json, e))?;
    Ok(vec![draws, json])
}
