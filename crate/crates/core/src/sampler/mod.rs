//! Gibbs samplers for `mu_alpha` under sufficient (SA), ancillary (AA) and interwoven
//! (ASIS) augmentation.
//!
//! The chain state always stores the SA-scale effects `alpha` as canonical and keeps the
//! deviations `alpha_tilde = alpha - mu_alpha` in sync after every sweep.

mod conditionals;
mod recursion;
mod steppers;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelSpec, PanelDataset};

pub use conditionals::{
    draw_alpha_given_mu, draw_alpha_tilde_given_mu, draw_mu_given_alpha, draw_mu_given_alpha_tilde,
};
pub use recursion::{
    aa_limit_recursion, aa_mu_recursion, aa_recursion, aa_shrinkage, sa_limit_recursion,
    sa_mu_recursion, sa_recursion, sa_shrinkage, AffineRecursion,
};
pub use steppers::{
    step, step_aa, step_asis_aa_sa, step_asis_sa_aa, step_sa, step_with_noise,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerScheme {
    Sa,
    Aa,
    /// SA sweep, re-code to deviations, then `mu | alpha_tilde`.
    AsisSaAa,
    /// AA sweep, re-code to effects, then `mu | alpha`.
    AsisAaSa,
}

impl SamplerScheme {
    pub const ALL: [SamplerScheme; 4] = [
        SamplerScheme::Sa,
        SamplerScheme::Aa,
        SamplerScheme::AsisSaAa,
        SamplerScheme::AsisAaSa,
    ];

    pub fn is_interweaving(self) -> bool {
        matches!(self, SamplerScheme::AsisSaAa | SamplerScheme::AsisAaSa)
    }

    /// Stable short name used in file names, CSV columns and CLI flags.
    pub fn key(self) -> &'static str {
        match self {
            SamplerScheme::Sa => "sa",
            SamplerScheme::Aa => "aa",
            SamplerScheme::AsisSaAa => "asis-sa-aa",
            SamplerScheme::AsisAaSa => "asis-aa-sa",
        }
    }

    /// Index used when deriving per-scheme seeds. Never reorder.
    pub(crate) fn seed_index(self) -> u64 {
        match self {
            SamplerScheme::Sa => 0,
            SamplerScheme::Aa => 1,
            SamplerScheme::AsisSaAa => 2,
            SamplerScheme::AsisAaSa => 3,
        }
    }
}

impl fmt::Display for SamplerScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SamplerScheme::Sa => "SA",
            SamplerScheme::Aa => "AA",
            SamplerScheme::AsisSaAa => "ASIS(SA->AA)",
            SamplerScheme::AsisAaSa => "ASIS(AA->SA)",
        })
    }
}

impl FromStr for SamplerScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "sa" => Ok(SamplerScheme::Sa),
            "aa" => Ok(SamplerScheme::Aa),
            "asis" | "asis-sa-aa" | "asissaaa" | "asis(sa->aa)" => Ok(SamplerScheme::AsisSaAa),
            "asis-aa-sa" | "asisaasa" | "asis(aa->sa)" => Ok(SamplerScheme::AsisAaSa),
            other => Err(Error::domain(
                "scheme",
                format!("unknown scheme `{other}` (expected sa, aa, asis-sa-aa, asis-aa-sa)"),
            )),
        }
    }
}

/// Standard normals driving one sweep: `z` for the latent draw, `z0` for the `mu` draw.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseDraws {
    pub z0: f64,
    pub z: Vec<f64>,
}

impl NoiseDraws {
    pub fn new(z0: f64, z: Vec<f64>) -> Self {
        Self { z0, z }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            z0: 0.0,
            z: vec![0.0; n],
        }
    }

    /// Draws `z_1..z_N` and then `z0`, the same order the steppers use.
    pub fn draw<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Self {
        let z = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let z0 = rng.sample(StandardNormal);
        Self { z0, z }
    }

    pub fn zbar(&self) -> f64 {
        self.z.iter().sum::<f64>() / self.z.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainState {
    pub mu_alpha: f64,
    /// Individual effects on the SA scale (canonical).
    pub alpha: Vec<f64>,
    /// Deviations `alpha - mu_alpha`.
    pub alpha_tilde: Vec<f64>,
    pub beta: Option<Vec<f64>>,
    pub sigma_eps_sq: f64,
    pub sigma_alpha_sq: f64,
    pub iteration: u64,
}

impl ChainState {
    /// State from SA-scale effects; deviations are derived, variances copied from `spec`.
    pub fn from_alpha(mu_alpha: f64, alpha: Vec<f64>, spec: &ModelSpec) -> Self {
        let alpha_tilde = alpha.iter().map(|a| a - mu_alpha).collect();
        Self {
            mu_alpha,
            alpha,
            alpha_tilde,
            beta: None,
            sigma_eps_sq: spec.sigma_eps_sq,
            sigma_alpha_sq: spec.sigma_alpha_sq,
            iteration: 0,
        }
    }

    /// Starting point used by every runner: `mu_alpha` at the grand mean and each `alpha_i` at
    /// its individual sample mean.
    pub fn initial(data: &PanelDataset, spec: &ModelSpec) -> Self {
        let t = data.n_periods() as f64;
        let alpha = data.individual_sums().iter().map(|s| s / t).collect();
        Self::from_alpha(data.grand_mean(), alpha, spec)
    }

    /// `max_i |alpha_i - alpha_tilde_i - mu_alpha|`.
    pub fn recoding_error(&self) -> f64 {
        self.alpha
            .iter()
            .zip(&self.alpha_tilde)
            .map(|(a, t)| (a - t - self.mu_alpha).abs())
            .fold(0.0, f64::max)
    }
}

/// The chain's random stream. Stream 0 of a ChaCha8 generator keyed by `seed`.
pub fn chain_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Total sweeps, including burn-in.
    pub iterations: usize,
    pub burn_in: usize,
    pub seed: u64,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::domain("iterations", "must be at least 1"));
        }
        if self.burn_in >= self.iterations {
            return Err(Error::domain(
                "burn_in",
                format!(
                    "must be smaller than iterations ({} >= {})",
                    self.burn_in, self.iterations
                ),
            ));
        }
        Ok(())
    }

    pub fn kept(&self) -> usize {
        self.iterations - self.burn_in
    }
}

/// Post-burn-in draws of the monitored quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainOutput {
    pub scheme: SamplerScheme,
    pub seed: u64,
    pub iterations: usize,
    pub burn_in: usize,
    pub parameters: Vec<String>,
    /// One column per entry of `parameters`, each of length `iterations - burn_in`.
    pub draws: Vec<Vec<f64>>,
}

impl ChainOutput {
    pub const MU: &'static str = "mu_alpha";

    pub fn series(&self, name: &str) -> Option<&[f64]> {
        self.parameters
            .iter()
            .position(|p| p == name)
            .map(|i| self.draws[i].as_slice())
    }

    pub fn mu(&self) -> &[f64] {
        self.series(Self::MU).expect("mu_alpha is always monitored")
    }

    pub fn n_draws(&self) -> usize {
        self.draws.first().map_or(0, Vec::len)
    }
}

/// Runs one chain from [`ChainState::initial`] and records `mu_alpha` after burn-in.
pub fn run_chain(
    scheme: SamplerScheme,
    data: &PanelDataset,
    spec: &ModelSpec,
    config: &RunConfig,
) -> Result<ChainOutput> {
    spec.validate()?;
    config.validate()?;
    if !spec.variance_mode.is_known() {
        return Err(Error::VarianceMode { required: "Known" });
    }
    let mut rng = chain_rng(config.seed);
    let mut state = ChainState::initial(data, spec);
    let mut mu = Vec::with_capacity(config.kept());
    for it in 0..config.iterations {
        step(scheme, &mut state, data, spec, &mut rng)?;
        if it >= config.burn_in {
            mu.push(state.mu_alpha);
        }
    }
    Ok(ChainOutput {
        scheme,
        seed: config.seed,
        iterations: config.iterations,
        burn_in: config.burn_in,
        parameters: vec![ChainOutput::MU.to_string()],
        draws: vec![mu],
    })
}
