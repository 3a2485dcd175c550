//! Model primitives for the Gaussian panel model with individual effects
//!
//! ```text
//! y_it = alpha_i + eps_it,   alpha_i ~ N(mu_alpha, sigma_alpha^2),   eps_it ~ N(0, sigma_eps^2)
//! mu_alpha ~ N(phi_alpha, tau_alpha^2)
//! ```
//!
//! The same model written on the deviation scale `alpha_i = mu_alpha + alpha_tilde_i` is what
//! the ancillary samplers work with; both share the types defined here.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, ensure_positive, Error, Result};

/// Row-major `N x T x K` regressor tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct Covariates {
    k: usize,
    values: Vec<f64>,
}

impl Covariates {
    pub fn k(&self) -> usize {
        self.k
    }

    /// All entries, laid out as `[(i * T + t) * K + k]`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Regressor vector for a flattened cell index `i * T + t`.
    pub fn cell(&self, cell: usize) -> &[f64] {
        &self.values[cell * self.k..(cell + 1) * self.k]
    }
}

/// A balanced panel of `N` individuals observed over `T` periods.
///
/// Immutable once built: the cached per-individual sums and the grand mean are computed
/// in the constructor and never updated in place.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelDataset {
    n: usize,
    t: usize,
    y: Vec<f64>,
    covariates: Option<Covariates>,
    individual_sums: Vec<f64>,
    grand_mean: f64,
}

impl PanelDataset {
    /// Builds a panel from row-major observations (`y[i * T + t]`).
    pub fn new(n: usize, t: usize, y: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("n_individuals", "must be at least 1"));
        }
        if t == 0 {
            return Err(Error::domain("n_periods", "must be at least 1"));
        }
        if y.len() != n * t {
            return Err(Error::Dimension {
                what: "y (N * T)",
                expected: n * t,
                got: y.len(),
            });
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "y" });
        }
        let individual_sums: Vec<f64> = y.chunks_exact(t).map(|row| row.iter().sum()).collect();
        let grand_mean = individual_sums.iter().sum::<f64>() / (n * t) as f64;
        Ok(Self {
            n,
            t,
            y,
            covariates: None,
            individual_sums,
            grand_mean,
        })
    }

    /// Attaches a `N x T x K` regressor tensor laid out as `[(i * T + t) * K + k]`.
    pub fn with_covariates(mut self, k: usize, values: Vec<f64>) -> Result<Self> {
        if k == 0 {
            return Err(Error::domain("covariates", "K must be at least 1"));
        }
        if values.len() != self.n * self.t * k {
            return Err(Error::Dimension {
                what: "covariates (N * T * K)",
                expected: self.n * self.t * k,
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "covariates" });
        }
        self.covariates = Some(Covariates { k, values });
        Ok(self)
    }

    /// Same panel shape and covariates, new response values.
    pub fn with_response(&self, y: Vec<f64>) -> Result<Self> {
        let base = Self::new(self.n, self.t, y)?;
        Ok(Self {
            covariates: self.covariates.clone(),
            ..base
        })
    }

    /// Drops the covariate tensor.
    pub fn without_covariates(&self) -> Self {
        Self {
            covariates: None,
            ..self.clone()
        }
    }

    pub fn n_individuals(&self) -> usize {
        self.n
    }

    pub fn n_periods(&self) -> usize {
        self.t
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.y[i * self.t..(i + 1) * self.t]
    }

    pub fn covariates(&self) -> Option<&Covariates> {
        self.covariates.as_ref()
    }

    pub fn n_covariates(&self) -> usize {
        self.covariates.as_ref().map_or(0, Covariates::k)
    }

    /// `sum_t y_it` for every individual.
    pub fn individual_sums(&self) -> &[f64] {
        &self.individual_sums
    }

    /// `sum_i sum_t y_it`.
    pub fn total_sum(&self) -> f64 {
        self.grand_mean * (self.n * self.t) as f64
    }

    /// Mean over all `N * T` cells. In a balanced panel this is also the mean of the
    /// individual means.
    pub fn grand_mean(&self) -> f64 {
        self.grand_mean
    }
}

/// Inverse-gamma hyperprior `IG(shape, scale)` with density proportional to
/// `x^(-shape - 1) exp(-scale / x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvGammaPrior {
    pub shape: f64,
    pub scale: f64,
}

impl InvGammaPrior {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        ensure_positive("inverse-gamma shape", shape)?;
        ensure_positive("inverse-gamma scale", scale)?;
        Ok(Self { shape, scale })
    }

    /// Prior mean `scale / (shape - 1)`, defined for `shape > 1`.
    pub fn mean(&self) -> Option<f64> {
        (self.shape > 1.0).then(|| self.scale / (self.shape - 1.0))
    }
}

impl Default for InvGammaPrior {
    fn default() -> Self {
        Self {
            shape: 2.0,
            scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum VarianceMode {
    /// `sigma_eps^2` and `sigma_alpha^2` are fixed at their `ModelSpec` values.
    Known,
    /// Both variances get conjugate inverse-gamma updates every sweep.
    Sampled {
        eps_prior: InvGammaPrior,
        alpha_prior: InvGammaPrior,
    },
}

impl VarianceMode {
    pub fn sampled_default() -> Self {
        VarianceMode::Sampled {
            eps_prior: InvGammaPrior::default(),
            alpha_prior: InvGammaPrior::default(),
        }
    }

    pub fn is_known(&self) -> bool {
        matches!(self, VarianceMode::Known)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    /// Observation noise variance `sigma_eps^2` (initial value when sampled).
    pub sigma_eps_sq: f64,
    /// Heterogeneity variance `sigma_alpha^2` (initial value when sampled).
    pub sigma_alpha_sq: f64,
    /// Prior mean of `mu_alpha`.
    pub phi_alpha: f64,
    /// Prior variance of `mu_alpha`.
    pub tau_alpha_sq: f64,
    pub variance_mode: VarianceMode,
}

impl ModelSpec {
    pub const DEFAULT_PHI_ALPHA: f64 = 0.0;
    pub const DEFAULT_TAU_ALPHA_SQ: f64 = 100.0;

    /// Known-variance spec, validated.
    pub fn known(sigma_eps_sq: f64, sigma_alpha_sq: f64, phi_alpha: f64, tau_alpha_sq: f64) -> Result<Self> {
        let spec = Self {
            sigma_eps_sq,
            sigma_alpha_sq,
            phi_alpha,
            tau_alpha_sq,
            variance_mode: VarianceMode::Known,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Known-variance spec with the default `N(0, 100)` prior on `mu_alpha`.
    pub fn with_variances(sigma_eps_sq: f64, sigma_alpha_sq: f64) -> Result<Self> {
        Self::known(
            sigma_eps_sq,
            sigma_alpha_sq,
            Self::DEFAULT_PHI_ALPHA,
            Self::DEFAULT_TAU_ALPHA_SQ,
        )
    }

    pub fn sampled(mut self, eps_prior: InvGammaPrior, alpha_prior: InvGammaPrior) -> Result<Self> {
        self.variance_mode = VarianceMode::Sampled {
            eps_prior,
            alpha_prior,
        };
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("sigma_eps_sq", self.sigma_eps_sq)?;
        ensure_positive("sigma_alpha_sq", self.sigma_alpha_sq)?;
        ensure_positive("tau_alpha_sq", self.tau_alpha_sq)?;
        ensure_finite("phi_alpha", self.phi_alpha)?;
        if let VarianceMode::Sampled {
            eps_prior,
            alpha_prior,
        } = self.variance_mode
        {
            InvGammaPrior::new(eps_prior.shape, eps_prior.scale)?;
            InvGammaPrior::new(alpha_prior.shape, alpha_prior.scale)?;
        }
        Ok(())
    }
}

/// Full-conditional precisions shared by all samplers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Precisions {
    /// `T / sigma_eps^2 + 1 / sigma_alpha^2`, precision of each `alpha_i` given `mu_alpha`.
    pub lambda_alpha: f64,
    /// `N / sigma_alpha^2 + 1 / tau_alpha^2`, precision of `mu_alpha` given `alpha`.
    pub lambda_mu_sa: f64,
    /// `N T / sigma_eps^2 + 1 / tau_alpha^2`, precision of `mu_alpha` given `alpha_tilde`.
    pub lambda_mu_aa: f64,
}

pub fn compute_precisions(spec: &ModelSpec, n: usize, t: usize) -> Result<Precisions> {
    spec.validate()?;
    precisions_for(spec.sigma_eps_sq, spec.sigma_alpha_sq, spec.tau_alpha_sq, n, t)
}

pub(crate) fn precisions_for(
    sigma_eps_sq: f64,
    sigma_alpha_sq: f64,
    tau_alpha_sq: f64,
    n: usize,
    t: usize,
) -> Result<Precisions> {
    ensure_positive("sigma_eps_sq", sigma_eps_sq)?;
    ensure_positive("sigma_alpha_sq", sigma_alpha_sq)?;
    ensure_positive("tau_alpha_sq", tau_alpha_sq)?;
    if n == 0 || t == 0 {
        return Err(Error::domain("panel size", "N and T must be at least 1"));
    }
    let (n, t) = (n as f64, t as f64);
    let inv_eps = 1.0 / sigma_eps_sq;
    let inv_alpha = 1.0 / sigma_alpha_sq;
    let inv_tau = 1.0 / tau_alpha_sq;
    Ok(Precisions {
        lambda_alpha: inv_eps * t + inv_alpha,
        lambda_mu_sa: inv_alpha * n + inv_tau,
        lambda_mu_aa: inv_eps * n * t + inv_tau,
    })
}

/// Draws a synthetic panel: `alpha_i ~ N(mu_true, sigma_alpha^2)` and then
/// `y_it = alpha_i + eps_it`.
///
/// Normals are consumed in the order `alpha_1, eps_11..eps_1T, alpha_2, ...` from a
/// ChaCha8 stream seeded with `seed`, so the output is bit-reproducible.
pub fn generate_synthetic(
    spec: &ModelSpec,
    mu_true: f64,
    n: usize,
    t: usize,
    seed: u64,
) -> Result<PanelDataset> {
    generate_synthetic_with_covariates(spec, mu_true, &[], n, t, seed)
}

/// Like [`generate_synthetic`], plus iid standard-normal regressors entering as `x_it' beta`.
///
/// With an empty `beta` no covariates are attached and the draw sequence is identical to
/// [`generate_synthetic`]. Otherwise each cell consumes its `K` regressors right before its
/// noise term.
pub fn generate_synthetic_with_covariates(
    spec: &ModelSpec,
    mu_true: f64,
    beta: &[f64],
    n: usize,
    t: usize,
    seed: u64,
) -> Result<PanelDataset> {
    spec.validate()?;
    ensure_finite("mu_true", mu_true)?;
    if n == 0 || t == 0 {
        return Err(Error::domain("panel size", "N and T must be at least 1"));
    }
    let k = beta.len();
    let sd_alpha = spec.sigma_alpha_sq.sqrt();
    let sd_eps = spec.sigma_eps_sq.sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut y = Vec::with_capacity(n * t);
    let mut x = Vec::with_capacity(n * t * k);
    for _ in 0..n {
        let z: f64 = rng.sample(StandardNormal);
        let alpha = mu_true + sd_alpha * z;
        for _ in 0..t {
            let mut mean = alpha;
            for b in beta {
                let xv: f64 = rng.sample(StandardNormal);
                mean += xv * b;
                x.push(xv);
            }
            let e: f64 = rng.sample(StandardNormal);
            y.push(mean + sd_eps * e);
        }
    }
    let data = PanelDataset::new(n, t, y)?;
    if k == 0 {
        Ok(data)
    } else {
        data.with_covariates(k, x)
    }
}

/// Mean and variance of a Gaussian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalMoments {
    pub mean: f64,
    pub variance: f64,
}

/// Exact marginal posterior of `mu_alpha` with `alpha` integrated out.
///
/// Each individual mean is `N(mu_alpha, sigma_alpha^2 + sigma_eps^2 / T)` given `mu_alpha`, so
/// the posterior is Gaussian with precision `1/tau^2 + N / (sigma_alpha^2 + sigma_eps^2 / T)`.
pub fn posterior_oracle_mu(data: &PanelDataset, spec: &ModelSpec) -> Result<NormalMoments> {
    spec.validate()?;
    if !spec.variance_mode.is_known() {
        return Err(Error::VarianceMode { required: "Known" });
    }
    if data.covariates().is_some() {
        return Err(Error::domain(
            "data",
            "posterior oracle is only defined for panels without covariates",
        ));
    }
    let n = data.n_individuals() as f64;
    let t = data.n_periods() as f64;
    let data_precision = n / (spec.sigma_alpha_sq + spec.sigma_eps_sq / t);
    let prior_precision = 1.0 / spec.tau_alpha_sq;
    let precision = prior_precision + data_precision;
    let mean = (prior_precision * spec.phi_alpha + data_precision * data.grand_mean()) / precision;
    Ok(NormalMoments {
        mean,
        variance: 1.0 / precision,
    })
}
