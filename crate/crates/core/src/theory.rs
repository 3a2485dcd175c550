//! Convergence rates of the SA and AA `mu_alpha` chains.
//!
//! Both reduced chains are AR(1); the coefficient on the previous `mu_alpha` is the
//! geometric rate. In the limit the two coefficients are the precision shares
//! `sigma_alpha^-2 / lambda_alpha` (SA) and `T sigma_eps^-2 / lambda_alpha` (AA), which
//! sum to one, so whichever augmentation has the smaller share mixes faster.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{compute_precisions, ModelSpec};
use crate::sampler::{aa_shrinkage, sa_shrinkage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    SaFaster,
    AaFaster,
    Tie,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::SaFaster => "SA converges faster",
            Verdict::AaFaster => "AA converges faster",
            Verdict::Tie => "SA and AA tie",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub n: usize,
    pub t: usize,
    /// Exact SA coefficient, including the finite-`tau^2 N` shrinkage factor.
    pub rho_sa_exact: f64,
    pub rho_aa_exact: f64,
    /// `sigma_alpha^-2 / lambda_alpha`.
    pub rho_sa_asym: f64,
    /// `T sigma_eps^-2 / lambda_alpha`.
    pub rho_aa_asym: f64,
    /// `rho_sa_asym + rho_aa_asym`; one up to rounding.
    pub tradeoff_sum: f64,
    pub verdict: Verdict,
    pub sa_shrinkage: f64,
    pub aa_shrinkage: f64,
    /// See [`asymptotic_regime_gap`].
    pub regime_gap: f64,
}

impl RateReport {
    /// Exact coefficient of the slower of SA and AA (SA on a tie).
    pub fn slower_exact(&self) -> f64 {
        match self.verdict {
            Verdict::AaFaster => self.rho_sa_exact,
            Verdict::SaFaster => self.rho_aa_exact,
            Verdict::Tie => self.rho_sa_exact.max(self.rho_aa_exact),
        }
    }
}

/// Compares `sigma_eps^2` against `sigma_alpha^2 T` exactly.
pub fn verdict(spec: &ModelSpec, t: usize) -> Verdict {
    let rhs = spec.sigma_alpha_sq * t as f64;
    match spec.sigma_eps_sq.partial_cmp(&rhs) {
        Some(Ordering::Less) => Verdict::SaFaster,
        Some(Ordering::Greater) => Verdict::AaFaster,
        _ => Verdict::Tie,
    }
}

pub fn rate_report(spec: &ModelSpec, n: usize, t: usize) -> Result<RateReport> {
    let p = compute_precisions(spec, n, t)?;
    let rho_sa_asym = (1.0 / spec.sigma_alpha_sq) / p.lambda_alpha;
    let rho_aa_asym = (t as f64 / spec.sigma_eps_sq) / p.lambda_alpha;
    let sa = sa_shrinkage(spec, n);
    let aa = aa_shrinkage(spec, n, t);
    Ok(RateReport {
        n,
        t,
        rho_sa_exact: sa * rho_sa_asym,
        rho_aa_exact: aa * rho_aa_asym,
        rho_sa_asym,
        rho_aa_asym,
        tradeoff_sum: rho_sa_asym + rho_aa_asym,
        verdict: verdict(spec, t),
        sa_shrinkage: sa,
        aa_shrinkage: aa,
        regime_gap: asymptotic_regime_gap(spec, n, t)?,
    })
}

/// Distance from the large-`tau^2 N` regime: the largest of the two shrinkage complements
/// `1 - s` and the two prior-mean terms `tau^-2 |phi| / lambda_mu`.
///
/// The complements equal `tau^-2 / lambda_mu_sa` and `tau^-2 / lambda_mu_aa`, so every term
/// decreases strictly in `N` and in `tau^2`.
pub fn asymptotic_regime_gap(spec: &ModelSpec, n: usize, t: usize) -> Result<f64> {
    let p = compute_precisions(spec, n, t)?;
    let inv_tau = 1.0 / spec.tau_alpha_sq;
    let phi = spec.phi_alpha.abs();
    let terms = [
        1.0 - sa_shrinkage(spec, n),
        1.0 - aa_shrinkage(spec, n, t),
        inv_tau * phi / p.lambda_mu_sa,
        inv_tau * phi / p.lambda_mu_aa,
    ];
    Ok(terms.into_iter().fold(0.0, f64::max))
}
