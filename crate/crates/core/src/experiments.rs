//! Replication harness for the simulation study.
//!
//! Every `(panel size, pattern)` configuration is run `replications` times; each replication
//! draws a synthetic panel and runs every requested scheme on it. Per-chain MCSE and ACF are
//! averaged across replications. Work is spread over the ambient rayon pool and results are
//! collected in task order, so the output is bit-identical for any thread count.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{self, acf, mcse_batch_means};
use crate::error::{Error, Result};
use crate::model::{generate_synthetic, ModelSpec};
use crate::sampler::{run_chain, RunConfig, SamplerScheme};
use crate::theory::{rate_report, RateReport};

/// Output tables report MCSE multiplied by this factor.
pub const TABLE_SCALE: f64 = 1e5;

/// `(sigma_eps, sigma_alpha)` for one of the three standard patterns at panel length `t`.
///
/// Pattern 1 puts `sigma_eps^2 = T sigma_alpha^2 / 10` (SA favoured), pattern 2
/// `sigma_eps^2 = 10 T sigma_alpha^2` (AA favoured) and pattern 3 `sigma_eps^2 = T sigma_alpha^2`,
/// always with `sigma_alpha = 1`. At `T = 10` this gives `(1, 1)`, `(10, 1)`, `(sqrt 10, 1)`
/// and at `T = 100` it gives `(sqrt 10, 1)`, `(sqrt 1000, 1)`, `(10, 1)`.
pub fn pattern_parameters(pattern_id: u8, t: usize) -> Result<(f64, f64)> {
    let (eps_sq, alpha_sq) = pattern_variances(pattern_id, t)?;
    Ok((eps_sq.sqrt(), alpha_sq.sqrt()))
}

/// Same as [`pattern_parameters`] but as exact variances `(sigma_eps^2, sigma_alpha^2)`.
pub fn pattern_variances(pattern_id: u8, t: usize) -> Result<(f64, f64)> {
    if t == 0 {
        return Err(Error::domain("n_periods", "must be at least 1"));
    }
    let t = t as f64;
    let eps_sq = match pattern_id {
        1 => t / 10.0,
        2 => 10.0 * t,
        3 => t,
        other => return Err(Error::UnknownPattern(other.to_string())),
    };
    Ok((eps_sq, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PatternKind {
    /// One of the three T-dependent patterns of [`pattern_variances`].
    Standard { id: u8 },
    Fixed { sigma_eps_sq: f64, sigma_alpha_sq: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pattern {
    pub label: String,
    #[serde(flatten)]
    pub kind: PatternKind,
}

impl Pattern {
    pub fn standard(id: u8) -> Result<Self> {
        pattern_variances(id, 1)?;
        Ok(Self {
            label: format!("Pattern {id}"),
            kind: PatternKind::Standard { id },
        })
    }

    pub fn fixed(label: impl Into<String>, sigma_eps_sq: f64, sigma_alpha_sq: f64) -> Self {
        Self {
            label: label.into(),
            kind: PatternKind::Fixed {
                sigma_eps_sq,
                sigma_alpha_sq,
            },
        }
    }

    /// `(sigma_eps^2, sigma_alpha^2)` at panel length `t`.
    pub fn variances(&self, t: usize) -> Result<(f64, f64)> {
        match self.kind {
            PatternKind::Standard { id } => pattern_variances(id, t),
            PatternKind::Fixed {
                sigma_eps_sq,
                sigma_alpha_sq,
            } => Ok((sigma_eps_sq, sigma_alpha_sq)),
        }
    }

    fn seed_key(&self) -> u64 {
        match self.kind {
            PatternKind::Standard { id } => u64::from(id),
            // FNV-1a of the label, offset so it cannot collide with the small standard ids
            PatternKind::Fixed { .. } => self.label.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
                (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
            }) | (1 << 63),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentGrid {
    pub panel_sizes: Vec<(usize, usize)>,
    pub patterns: Vec<Pattern>,
    pub schemes: Vec<SamplerScheme>,
    /// Sweeps per chain, burn-in included.
    pub iterations: usize,
    pub burn_in: usize,
    pub replications: usize,
    pub base_seed: u64,
    /// Population mean used to simulate data.
    pub mu_true: f64,
    pub phi_alpha: f64,
    pub tau_alpha_sq: f64,
    /// Reuse one dataset per configuration instead of a fresh one per replication.
    pub shared_dataset: bool,
    pub max_lag: usize,
}

impl Default for ExperimentGrid {
    fn default() -> Self {
        Self {
            panel_sizes: vec![(10, 10), (10, 100), (500, 10), (500, 100)],
            patterns: (1..=3).map(|id| Pattern::standard(id).unwrap()).collect(),
            schemes: vec![SamplerScheme::Sa, SamplerScheme::Aa, SamplerScheme::AsisSaAa],
            iterations: 10_000,
            burn_in: 1_000,
            replications: 100,
            base_seed: 42,
            mu_true: 0.0,
            phi_alpha: ModelSpec::DEFAULT_PHI_ALPHA,
            tau_alpha_sq: ModelSpec::DEFAULT_TAU_ALPHA_SQ,
            shared_dataset: false,
            max_lag: diagnostics::DEFAULT_MAX_LAG,
        }
    }
}

impl ExperimentGrid {
    pub fn validate(&self) -> Result<()> {
        if self.panel_sizes.is_empty() || self.patterns.is_empty() || self.schemes.is_empty() {
            return Err(Error::domain(
                "grid",
                "panel_sizes, patterns and schemes must be non-empty",
            ));
        }
        if self.panel_sizes.iter().any(|&(n, t)| n == 0 || t == 0) {
            return Err(Error::domain("panel_sizes", "N and T must be at least 1"));
        }
        if self.replications == 0 {
            return Err(Error::domain("replications", "must be at least 1"));
        }
        self.run_config(0).validate()?;
        let kept = self.iterations - self.burn_in;
        if kept < self.max_lag + 2 || kept < 8 {
            return Err(Error::domain(
                "iterations",
                format!("{kept} post-burn-in draws are too few for max_lag {}", self.max_lag),
            ));
        }
        for p in &self.patterns {
            for &(_, t) in &self.panel_sizes {
                let spec = self.spec_for(p, t)?;
                spec.validate()?;
            }
        }
        Ok(())
    }

    pub fn spec_for(&self, pattern: &Pattern, t: usize) -> Result<ModelSpec> {
        let (eps, alpha) = pattern.variances(t)?;
        ModelSpec::known(eps, alpha, self.phi_alpha, self.tau_alpha_sq)
    }

    fn run_config(&self, seed: u64) -> RunConfig {
        RunConfig {
            iterations: self.iterations,
            burn_in: self.burn_in,
            seed,
        }
    }

    /// Seed of the synthetic panel for replication `rep` of a configuration.
    pub fn dataset_seed(&self, n: usize, t: usize, pattern: &Pattern, rep: usize) -> u64 {
        let rep = if self.shared_dataset { 0 } else { rep as u64 };
        derive_seed(
            self.base_seed,
            &[DATA_DOMAIN, n as u64, t as u64, pattern.seed_key(), rep],
        )
    }

    /// Seed of the chain for `scheme` in replication `rep` of a configuration.
    pub fn chain_seed(
        &self,
        n: usize,
        t: usize,
        pattern: &Pattern,
        scheme: SamplerScheme,
        rep: usize,
    ) -> u64 {
        derive_seed(
            self.base_seed,
            &[
                CHAIN_DOMAIN,
                n as u64,
                t as u64,
                pattern.seed_key(),
                scheme.seed_index(),
                rep as u64,
            ],
        )
    }

    /// Applies `key = value` lines on top of `self`. Blank lines and `#` comments are ignored.
    ///
    /// Recognized keys mirror the struct fields: `panel_sizes` (`10x10, 500x100`),
    /// `patterns` (`1, 2, 3`), `schemes` (`sa, aa, asis-sa-aa`), `iterations`, `burn_in`,
    /// `replications`, `base_seed` (alias `seed`), `mu_true`, `phi_alpha`, `tau_alpha_sq`,
    /// `shared_dataset` and `max_lag`.
    pub fn apply_config_str(&mut self, text: &str) -> Result<()> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |message: String| Error::Config {
                line: idx + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let num = |v: &str| -> Result<f64> {
                v.parse::<f64>()
                    .map_err(|_| bad(format!("`{key}`: `{v}` is not a number")))
            };
            let int = |v: &str| -> Result<u64> {
                v.parse::<u64>()
                    .map_err(|_| bad(format!("`{key}`: `{v}` is not a non-negative integer")))
            };
            let list = || value.split(',').map(str::trim).filter(|s| !s.is_empty());
            match key {
                "panel_sizes" => {
                    self.panel_sizes = list()
                        .map(|s| parse_panel_size(s).map_err(&bad))
                        .collect::<Result<_>>()?;
                }
                "patterns" => {
                    self.patterns = list()
                        .map(|s| {
                            let id = s
                                .trim_start_matches(|c: char| c.is_ascii_alphabetic() || c == ' ')
                                .parse::<u8>()
                                .map_err(|_| Error::UnknownPattern(s.to_string()))?;
                            Pattern::standard(id)
                        })
                        .collect::<Result<_>>()?;
                }
                "schemes" => {
                    self.schemes = list().map(str::parse).collect::<Result<_>>()?;
                }
                "iterations" => self.iterations = int(value)? as usize,
                "burn_in" => self.burn_in = int(value)? as usize,
                "replications" => self.replications = int(value)? as usize,
                "base_seed" | "seed" => self.base_seed = int(value)?,
                "mu_true" => self.mu_true = num(value)?,
                "phi_alpha" => self.phi_alpha = num(value)?,
                "tau_alpha_sq" => self.tau_alpha_sq = num(value)?,
                "max_lag" => self.max_lag = int(value)? as usize,
                "shared_dataset" => {
                    self.shared_dataset = match value {
                        "true" | "yes" | "1" => true,
                        "false" | "no" | "0" => false,
                        other => return Err(bad(format!("`{key}`: `{other}` is not a boolean"))),
                    }
                }
                other => return Err(bad(format!("unknown key `{other}`"))),
            }
        }
        Ok(())
    }
}

/// Parses `NxT` (also `N,T` or `N*T`).
pub fn parse_panel_size(s: &str) -> std::result::Result<(usize, usize), String> {
    let (n, t) = s
        .split_once(['x', 'X', '*'])
        .ok_or_else(|| format!("panel size `{s}` is not of the form NxT"))?;
    let parse = |v: &str| {
        v.trim()
            .parse::<usize>()
            .map_err(|_| format!("panel size `{s}`: `{v}` is not an integer"))
    };
    Ok((parse(n)?, parse(t)?))
}

const DATA_DOMAIN: u64 = 0x6461_7461; // "data"
const CHAIN_DOMAIN: u64 = 0x6368_6e73; // "chns"

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stable seed derivation: folds each part into the state with one SplitMix64 round.
///
/// `h_0 = splitmix64(base)`, `h_{k+1} = splitmix64(h_k ^ parts[k])`. The mapping never changes
/// between releases, so adding configurations leaves existing seeds untouched.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(splitmix64(base), |h, &p| splitmix64(h ^ p))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub n: usize,
    pub t: usize,
    pub pattern: String,
    pub scheme: SamplerScheme,
    /// Mean over replications of the per-chain batch-means MCSE, in units of `mu_alpha`.
    pub mean_mcse: f64,
    /// Standard deviation of the per-chain MCSEs across replications.
    pub sd_mcse: f64,
    pub mean_lag1_acf: f64,
    /// Exact AR(1) coefficient for SA and AA; `None` for the interweaving schemes.
    pub rho_exact: Option<f64>,
    pub n_replications: usize,
}

impl TableRow {
    pub fn scaled_mcse(&self) -> f64 {
        self.mean_mcse * TABLE_SCALE
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcfCurve {
    pub n: usize,
    pub t: usize,
    pub pattern: String,
    pub scheme: SamplerScheme,
    /// Mean ACF across replications at lags `0..=max_lag`.
    pub acf: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigRates {
    pub n: usize,
    pub t: usize,
    pub pattern: String,
    pub sigma_eps_sq: f64,
    pub sigma_alpha_sq: f64,
    pub rates: RateReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub rows: Vec<TableRow>,
    pub acf_curves: Vec<AcfCurve>,
    pub rates: Vec<ConfigRates>,
}

impl GridResult {
    pub fn row(&self, n: usize, t: usize, pattern: &str, scheme: SamplerScheme) -> Option<&TableRow> {
        self.rows
            .iter()
            .find(|r| r.n == n && r.t == t && r.pattern == pattern && r.scheme == scheme)
    }

    pub fn curve(&self, n: usize, t: usize, pattern: &str, scheme: SamplerScheme) -> Option<&AcfCurve> {
        self.acf_curves
            .iter()
            .find(|c| c.n == n && c.t == t && c.pattern == pattern && c.scheme == scheme)
    }

    pub fn rates_for(&self, n: usize, t: usize, pattern: &str) -> Option<&RateReport> {
        self.rates
            .iter()
            .find(|c| c.n == n && c.t == t && c.pattern == pattern)
            .map(|c| &c.rates)
    }
}

struct ChainSummary {
    mcse: f64,
    acf: Vec<f64>,
}

fn run_replication(
    grid: &ExperimentGrid,
    n: usize,
    t: usize,
    pattern: &Pattern,
    rep: usize,
) -> Result<Vec<ChainSummary>> {
    let spec = grid.spec_for(pattern, t)?;
    let data = generate_synthetic(&spec, grid.mu_true, n, t, grid.dataset_seed(n, t, pattern, rep))?;
    grid.schemes
        .iter()
        .map(|&scheme| {
            let seed = grid.chain_seed(n, t, pattern, scheme, rep);
            let summarize = || -> Result<ChainSummary> {
                let out = run_chain(scheme, &data, &spec, &grid.run_config(seed))?;
                Ok(ChainSummary {
                    mcse: mcse_batch_means(out.mu(), None)?,
                    acf: acf(out.mu(), grid.max_lag)?,
                })
            };
            summarize().map_err(|e| {
                e.context(format!(
                    "N={n}, T={t}, {}, scheme {scheme}, replication {rep}",
                    pattern.label
                ))
            })
        })
        .collect()
}

/// Runs the whole grid on the current rayon pool.
pub fn run_grid(grid: &ExperimentGrid) -> Result<GridResult> {
    grid.validate()?;
    let configs: Vec<(usize, usize, &Pattern)> = grid
        .panel_sizes
        .iter()
        .flat_map(|&(n, t)| grid.patterns.iter().map(move |p| (n, t, p)))
        .collect();
    let tasks: Vec<(usize, usize)> = (0..configs.len())
        .flat_map(|c| (0..grid.replications).map(move |r| (c, r)))
        .collect();

    let results: Vec<Vec<ChainSummary>> = tasks
        .par_iter()
        .map(|&(c, rep)| {
            let (n, t, pattern) = configs[c];
            run_replication(grid, n, t, pattern, rep)
        })
        .collect::<Result<_>>()?;

    let reps = grid.replications;
    let mut rows = Vec::new();
    let mut acf_curves = Vec::new();
    let mut rates = Vec::new();
    for (c, &(n, t, pattern)) in configs.iter().enumerate() {
        let spec = grid.spec_for(pattern, t)?;
        let report = rate_report(&spec, n, t)?;
        let block = &results[c * reps..(c + 1) * reps];
        for (s, &scheme) in grid.schemes.iter().enumerate() {
            let mcses: Vec<f64> = block.iter().map(|r| r[s].mcse).collect();
            let mean_mcse = mcses.iter().sum::<f64>() / reps as f64;
            let sd_mcse = if reps > 1 {
                (mcses.iter().map(|m| (m - mean_mcse).powi(2)).sum::<f64>() / (reps - 1) as f64).sqrt()
            } else {
                0.0
            };
            let mut curve = vec![0.0; grid.max_lag + 1];
            for r in block {
                for (acc, v) in curve.iter_mut().zip(&r[s].acf) {
                    *acc += v;
                }
            }
            curve.iter_mut().for_each(|v| *v /= reps as f64);
            rows.push(TableRow {
                n,
                t,
                pattern: pattern.label.clone(),
                scheme,
                mean_mcse,
                sd_mcse,
                mean_lag1_acf: curve.get(1).copied().unwrap_or(f64::NAN),
                rho_exact: match scheme {
                    SamplerScheme::Sa => Some(report.rho_sa_exact),
                    SamplerScheme::Aa => Some(report.rho_aa_exact),
                    _ => None,
                },
                n_replications: reps,
            });
            acf_curves.push(AcfCurve {
                n,
                t,
                pattern: pattern.label.clone(),
                scheme,
                acf: curve,
            });
        }
        rates.push(ConfigRates {
            n,
            t,
            pattern: pattern.label.clone(),
            sigma_eps_sq: spec.sigma_eps_sq,
            sigma_alpha_sq: spec.sigma_alpha_sq,
            rates: report,
        });
    }
    Ok(GridResult {
        rows,
        acf_curves,
        rates,
    })
}

/// Run metadata written next to the tables.
#[derive(Debug, Clone, Serialize)]
pub struct GridSummary<'a> {
    pub grid: &'a ExperimentGrid,
    pub mcse_estimator: &'static str,
    pub mcse_aggregation: &'static str,
    pub table_scale: f64,
    pub seed_derivation: &'static str,
    pub interweaving_order: Vec<SamplerScheme>,
    pub elapsed_seconds: Option<f64>,
    pub threads: Option<usize>,
    pub result: &'a GridResult,
}

impl<'a> GridSummary<'a> {
    pub fn new(grid: &'a ExperimentGrid, result: &'a GridResult) -> Self {
        Self {
            grid,
            mcse_estimator: diagnostics::MCSE_ESTIMATOR,
            mcse_aggregation: "per-chain MCSE after burn-in, arithmetic mean over replications",
            table_scale: TABLE_SCALE,
            seed_derivation: "splitmix64 fold: dataset = (base, 'data', N, T, pattern, rep); \
                              chain = (base, 'chns', N, T, pattern, scheme, rep)",
            interweaving_order: grid
                .schemes
                .iter()
                .copied()
                .filter(|s| s.is_interweaving())
                .collect(),
            elapsed_seconds: None,
            threads: None,
            result,
        }
    }
}

/// Writes `tables.csv`, `table_<N>_<T>.csv`, `acf_<N>_<T>.csv` and `summary.json` into `dir`.
pub fn write_grid_outputs(summary: &GridSummary<'_>, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let result = summary.result;
    let mut written = Vec::new();
    let mut put = |name: String, body: String| -> Result<()> {
        let path = dir.join(name);
        fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        written.push(path);
        Ok(())
    };

    let mut all = String::from(
        "n,t,pattern,scheme,mean_mcse,mean_mcse_e5,sd_mcse,mean_lag1_acf,rho_exact,replications\n",
    );
    for r in &result.rows {
        let _ = writeln!(
            all,
            "{},{},{},{},{:.9e},{:.6},{:.9e},{:.6},{},{}",
            r.n,
            r.t,
            r.pattern,
            r.scheme.key(),
            r.mean_mcse,
            r.scaled_mcse(),
            r.sd_mcse,
            r.mean_lag1_acf,
            r.rho_exact.map_or(String::new(), |v| format!("{v:.6}")),
            r.n_replications
        );
    }
    put("tables.csv".into(), all)?;

    let mut by_size: BTreeMap<(usize, usize), Vec<&TableRow>> = BTreeMap::new();
    for r in &result.rows {
        by_size.entry((r.n, r.t)).or_default().push(r);
    }
    for (&(n, t), rows) in &by_size {
        let schemes = &summary.grid.schemes;
        let mut body = String::from("pattern");
        for s in schemes {
            let _ = write!(body, ",{}", s.key());
        }
        body.push('\n');
        for p in &summary.grid.patterns {
            body.push_str(&p.label);
            for &s in schemes {
                let v = rows
                    .iter()
                    .find(|r| r.pattern == p.label && r.scheme == s)
                    .map_or(f64::NAN, |r| r.scaled_mcse());
                let _ = write!(body, ",{v:.3}");
            }
            body.push('\n');
        }
        put(format!("table_{n}_{t}.csv"), body)?;

        let mut acf_body = String::from("pattern,scheme,lag,acf\n");
        for c in result.acf_curves.iter().filter(|c| c.n == n && c.t == t) {
            for (lag, v) in c.acf.iter().enumerate() {
                let _ = writeln!(acf_body, "{},{},{lag},{v:.6}", c.pattern, c.scheme.key());
            }
        }
        put(format!("acf_{n}_{t}.csv"), acf_body)?;
    }

    put("summary.json".into(), serde_json::to_string_pretty(summary)?)?;
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_grid() -> ExperimentGrid {
        ExperimentGrid {
            panel_sizes: vec![(5, 4)],
            iterations: 400,
            burn_in: 50,
            replications: 3,
            max_lag: 10,
            ..ExperimentGrid::default()
        }
    }

    #[test]
    fn defaults_follow_the_study_design() {
        let g = ExperimentGrid::default();
        assert_eq!(g.iterations, 10_000);
        assert_eq!(g.burn_in, 1_000);
        assert_eq!(g.replications, 100);
        assert_eq!(g.panel_sizes.len() * g.patterns.len(), 12);
        g.validate().unwrap();
    }

    #[test]
    fn pattern_values() {
        let (e, a) = pattern_parameters(3, 10).unwrap();
        assert_eq!((e, a), (10f64.sqrt(), 1.0));
        let (e2, a2) = pattern_variances(3, 10).unwrap();
        assert_eq!(e2, 10.0 * a2);

        assert_eq!(pattern_parameters(2, 100).unwrap(), (1000f64.sqrt(), 1.0));
        assert_eq!(pattern_parameters(1, 10).unwrap(), (1.0, 1.0));
        assert_eq!(pattern_parameters(2, 10).unwrap(), (10.0, 1.0));
        assert_eq!(pattern_parameters(1, 100).unwrap(), (10f64.sqrt(), 1.0));
        assert_eq!(pattern_parameters(3, 100).unwrap(), (10.0, 1.0));

        let (e1, a1) = pattern_variances(1, 10).unwrap();
        assert!(e1 < 10.0 * a1);
        assert!(matches!(pattern_parameters(4, 10), Err(Error::UnknownPattern(_))));
    }

    #[test]
    fn seeds_are_stable_and_distinct() {
        assert_eq!(derive_seed(42, &[1, 2, 3]), derive_seed(42, &[1, 2, 3]));
        assert_ne!(derive_seed(42, &[1, 2, 3]), derive_seed(42, &[1, 3, 2]));
        assert_ne!(derive_seed(42, &[]), derive_seed(43, &[]));
        // frozen value: changing it reseeds every published run
        assert_eq!(derive_seed(0, &[]), splitmix64(0));

        let g = ExperimentGrid::default();
        let p = &g.patterns[0];
        assert_ne!(g.dataset_seed(10, 10, p, 0), g.dataset_seed(10, 10, p, 1));
        assert_ne!(
            g.chain_seed(10, 10, p, SamplerScheme::Sa, 0),
            g.chain_seed(10, 10, p, SamplerScheme::Aa, 0)
        );
        let shared = ExperimentGrid {
            shared_dataset: true,
            ..g.clone()
        };
        assert_eq!(shared.dataset_seed(10, 10, p, 0), shared.dataset_seed(10, 10, p, 7));
    }

    #[test]
    fn config_overrides() {
        let mut g = ExperimentGrid::default();
        g.apply_config_str(
            "# quick run\npanel_sizes = 10x10, 20x5\npatterns = 1, 3\niterations = 2000\n\
             burn_in=100\nseed = 7\nschemes = sa, asis-aa-sa\nshared_dataset = yes\ntau_alpha_sq = 50\n",
        )
        .unwrap();
        assert_eq!(g.panel_sizes, vec![(10, 10), (20, 5)]);
        assert_eq!(g.patterns.len(), 2);
        assert_eq!(g.iterations, 2000);
        assert_eq!(g.burn_in, 100);
        assert_eq!(g.base_seed, 7);
        assert_eq!(g.schemes, vec![SamplerScheme::Sa, SamplerScheme::AsisAaSa]);
        assert!(g.shared_dataset);
        assert_eq!(g.tau_alpha_sq, 50.0);

        assert!(matches!(
            g.apply_config_str("bogus = 1"),
            Err(Error::Config { line: 1, .. })
        ));
        assert!(g.apply_config_str("iterations = ten").is_err());
        assert!(g.apply_config_str("patterns = 9").is_err());
    }

    #[test]
    fn grid_validation() {
        let mut g = small_grid();
        g.burn_in = g.iterations;
        assert!(g.validate().is_err());
        let mut g = small_grid();
        g.replications = 0;
        assert!(g.validate().is_err());
        let mut g = small_grid();
        g.panel_sizes = vec![(0, 3)];
        assert!(g.validate().is_err());
    }

    #[test]
    fn grid_is_deterministic_and_thread_independent() {
        let g = small_grid();
        let a = run_grid(&g).unwrap();
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = single.install(|| run_grid(&g)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rows.len(), 3 * 3);
        assert!(a.rows.iter().all(|r| r.mean_mcse > 0.0 && r.n_replications == 3));
    }

    #[test]
    fn outputs_are_written() {
        let g = small_grid();
        let res = run_grid(&g).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let files = write_grid_outputs(&GridSummary::new(&g, &res), dir.path()).unwrap();
        let names: Vec<String> = files
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect();
        assert_eq!(names, ["tables.csv", "table_5_4.csv", "acf_5_4.csv", "summary.json"]);
        let acf = fs::read_to_string(dir.path().join("acf_5_4.csv")).unwrap();
        assert_eq!(acf.lines().count(), 1 + 3 * 3 * 11);
        let table = fs::read_to_string(dir.path().join("table_5_4.csv")).unwrap();
        assert!(table.starts_with("pattern,sa,aa,asis-sa-aa\n"));
    }
}
