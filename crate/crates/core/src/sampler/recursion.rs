//! Reduced scalar recursions for `mu_alpha`.
//!
//! Composing the two draws of an SA (or AA) sweep gives an AR(1) process for `mu_alpha`
//! driven by `z0` and the mean `zbar` of the latent-draw normals:
//!
//! ```text
//! mu' = rho * mu + intercept + zbar_weight * zbar + z0_weight * z0
//! ```
//!
//! The exact forms carry finite-sample shrinkage factors; the limit forms are what remains
//! as `tau_alpha^2 * N -> infinity`. These are evaluated in closed form and serve as
//! independent oracles for the steppers and as the source of the theoretical rates.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{compute_precisions, ModelSpec, PanelDataset};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineRecursion {
    pub rho: f64,
    pub intercept: f64,
    pub zbar_weight: f64,
    pub z0_weight: f64,
}

impl AffineRecursion {
    pub fn next(&self, mu_prev: f64, z0: f64, zbar: f64) -> f64 {
        self.rho * mu_prev + self.intercept + self.zbar_weight * zbar + self.z0_weight * z0
    }

    /// Stationary mean `intercept / (1 - rho)`.
    pub fn fixed_point(&self) -> f64 {
        self.intercept / (1.0 - self.rho)
    }

    /// Stationary variance of the AR(1) process when `zbar` averages `n` standard normals.
    pub fn stationary_variance(&self, n: usize) -> f64 {
        (self.zbar_weight.powi(2) / n as f64 + self.z0_weight.powi(2)) / (1.0 - self.rho * self.rho)
    }
}

/// `sigma_alpha^-2 / (sigma_alpha^-2 + tau^-2 / N)`, the SA shrinkage factor.
pub fn sa_shrinkage(spec: &ModelSpec, n: usize) -> f64 {
    let inv_alpha = 1.0 / spec.sigma_alpha_sq;
    inv_alpha / (inv_alpha + 1.0 / (spec.tau_alpha_sq * n as f64))
}

/// `sigma_eps^-2 / (sigma_eps^-2 + tau^-2 / (N T))`, the AA shrinkage factor.
pub fn aa_shrinkage(spec: &ModelSpec, n: usize, t: usize) -> f64 {
    let inv_eps = 1.0 / spec.sigma_eps_sq;
    inv_eps / (inv_eps + 1.0 / (spec.tau_alpha_sq * (n * t) as f64))
}

/// Exact SA recursion for a panel with grand mean `grand_mean`.
pub fn sa_recursion(spec: &ModelSpec, n: usize, t: usize, grand_mean: f64) -> Result<AffineRecursion> {
    let p = compute_precisions(spec, n, t)?;
    let inv_eps = 1.0 / spec.sigma_eps_sq;
    let inv_alpha = 1.0 / spec.sigma_alpha_sq;
    let inv_tau = 1.0 / spec.tau_alpha_sq;
    let shrink = sa_shrinkage(spec, n);
    Ok(AffineRecursion {
        rho: shrink * inv_alpha / p.lambda_alpha,
        intercept: shrink * inv_eps * t as f64 * grand_mean / p.lambda_alpha
            + inv_tau * spec.phi_alpha / p.lambda_mu_sa,
        zbar_weight: shrink / p.lambda_alpha.sqrt(),
        z0_weight: 1.0 / p.lambda_mu_sa.sqrt(),
    })
}

/// Exact AA recursion for a panel with grand mean `grand_mean`.
pub fn aa_recursion(spec: &ModelSpec, n: usize, t: usize, grand_mean: f64) -> Result<AffineRecursion> {
    let p = compute_precisions(spec, n, t)?;
    let inv_eps = 1.0 / spec.sigma_eps_sq;
    let inv_alpha = 1.0 / spec.sigma_alpha_sq;
    let inv_tau = 1.0 / spec.tau_alpha_sq;
    let shrink = aa_shrinkage(spec, n, t);
    Ok(AffineRecursion {
        rho: shrink * inv_eps * t as f64 / p.lambda_alpha,
        intercept: shrink * inv_alpha * grand_mean / p.lambda_alpha
            + inv_tau * spec.phi_alpha / p.lambda_mu_aa,
        zbar_weight: -shrink / p.lambda_alpha.sqrt(),
        z0_weight: 1.0 / p.lambda_mu_aa.sqrt(),
    })
}

/// SA recursion in the `tau_alpha^2 N -> infinity` limit.
pub fn sa_limit_recursion(spec: &ModelSpec, n: usize, t: usize, grand_mean: f64) -> Result<AffineRecursion> {
    let p = compute_precisions(spec, n, t)?;
    Ok(AffineRecursion {
        rho: (1.0 / spec.sigma_alpha_sq) / p.lambda_alpha,
        intercept: (t as f64 / spec.sigma_eps_sq) * grand_mean / p.lambda_alpha,
        zbar_weight: 1.0 / p.lambda_alpha.sqrt(),
        z0_weight: 1.0 / p.lambda_mu_sa.sqrt(),
    })
}

/// AA recursion in the `tau_alpha^2 N -> infinity` limit.
pub fn aa_limit_recursion(spec: &ModelSpec, n: usize, t: usize, grand_mean: f64) -> Result<AffineRecursion> {
    let p = compute_precisions(spec, n, t)?;
    Ok(AffineRecursion {
        rho: (t as f64 / spec.sigma_eps_sq) / p.lambda_alpha,
        intercept: (1.0 / spec.sigma_alpha_sq) * grand_mean / p.lambda_alpha,
        zbar_weight: -1.0 / p.lambda_alpha.sqrt(),
        z0_weight: 1.0 / p.lambda_mu_aa.sqrt(),
    })
}

/// One step of the exact SA recursion from `mu_prev`.
pub fn sa_mu_recursion(
    mu_prev: f64,
    data: &PanelDataset,
    spec: &ModelSpec,
    z0: f64,
    zbar: f64,
) -> Result<f64> {
    let rec = sa_recursion(spec, data.n_individuals(), data.n_periods(), data.grand_mean())?;
    Ok(rec.next(mu_prev, z0, zbar))
}

/// One step of the exact AA recursion from `mu_prev`.
pub fn aa_mu_recursion(
    mu_prev: f64,
    data: &PanelDataset,
    spec: &ModelSpec,
    z0: f64,
    zbar: f64,
) -> Result<f64> {
    let rec = aa_recursion(spec, data.n_individuals(), data.n_periods(), data.grand_mean())?;
    Ok(rec.next(mu_prev, z0, zbar))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sa_shrinkage_at_table_four_size() {
        let spec = ModelSpec::known(1.0, 1.0, 0.0, 100.0).unwrap();
        let s = sa_shrinkage(&spec, 500);
        assert!((s - 1.0 / (1.0 + 0.01 / 500.0)).abs() < 1e-15);
        assert!((s - 0.99998).abs() < 1e-9);
    }

    #[test]
    fn exact_coefficients_approach_limits() {
        // tau^2 N = 1e8
        let spec = ModelSpec::known(1.0, 1.0, 0.0, 1e7).unwrap();
        let sa = sa_recursion(&spec, 10, 10, 0.0).unwrap();
        let aa = aa_recursion(&spec, 10, 10, 0.0).unwrap();
        assert!((sa.rho - 1.0 / 11.0).abs() < 1e-6);
        assert!((aa.rho - 10.0 / 11.0).abs() < 1e-6);
        let sa_lim = sa_limit_recursion(&spec, 10, 10, 0.0).unwrap();
        assert!(sa.rho <= sa_lim.rho);
    }

    #[test]
    fn stationary_moments_match_posterior() {
        use crate::model::{generate_synthetic, posterior_oracle_mu};
        let spec = ModelSpec::known(4.0, 0.5, 0.3, 2.0).unwrap();
        let data = generate_synthetic(&spec, 1.0, 6, 5, 2).unwrap();
        let post = posterior_oracle_mu(&data, &spec).unwrap();
        for rec in [
            sa_recursion(&spec, 6, 5, data.grand_mean()).unwrap(),
            aa_recursion(&spec, 6, 5, data.grand_mean()).unwrap(),
        ] {
            assert!((rec.fixed_point() - post.mean).abs() < 1e-12);
            assert!((rec.stationary_variance(6) - post.variance).abs() < 1e-12);
        }
    }
}
