//! One full sweep per scheme.
//!
//! Each sweep pulls standard normals in a fixed order: `z_1..z_N` for the latent draw, then
//! one `z0` per `mu` draw. The `*_with_noise` variants replay a supplied [`NoiseDraws`] in the
//! same order; the RNG variants consume the chain's own stream.

use rand::Rng;
use rand_distr::StandardNormal;

use super::conditionals::{check_noise, check_state, Kernel};
use super::{ChainState, NoiseDraws, SamplerScheme};
use crate::error::Result;
use crate::model::{ModelSpec, PanelDataset};

fn sweep(
    scheme: SamplerScheme,
    state: &mut ChainState,
    data: &PanelDataset,
    spec: &ModelSpec,
    normal: &mut impl FnMut() -> f64,
) -> Result<()> {
    check_state(state, data)?;
    let k = Kernel::new(state, data, spec)?;
    let sums = data.individual_sums();
    let total_y = data.total_sum();
    let mu = state.mu_alpha;

    match scheme {
        SamplerScheme::Sa => {
            let sum_alpha = k.fill_alpha(sums, mu, &mut state.alpha, normal);
            let mu_next = k.mu_given_alpha(sum_alpha, normal());
            recode_tilde_from_alpha(state, mu_next);
        }
        SamplerScheme::Aa => {
            let sum_tilde = k.fill_alpha_tilde(sums, mu, &mut state.alpha_tilde, normal);
            let mu_next = k.mu_given_alpha_tilde(total_y, sum_tilde, normal());
            recode_alpha_from_tilde(state, mu_next);
        }
        SamplerScheme::AsisSaAa => {
            let sum_alpha = k.fill_alpha(sums, mu, &mut state.alpha, normal);
            let mu_half = k.mu_given_alpha(sum_alpha, normal());
            recode_tilde_from_alpha(state, mu_half);
            // sum of the re-coded deviations, without another pass over alpha_tilde
            let sum_tilde = sum_alpha - mu_half * state.alpha.len() as f64;
            let mu_next = k.mu_given_alpha_tilde(total_y, sum_tilde, normal());
            recode_alpha_from_tilde(state, mu_next);
        }
        SamplerScheme::AsisAaSa => {
            let sum_tilde = k.fill_alpha_tilde(sums, mu, &mut state.alpha_tilde, normal);
            let mu_half = k.mu_given_alpha_tilde(total_y, sum_tilde, normal());
            recode_alpha_from_tilde(state, mu_half);
            let sum_alpha = sum_tilde + mu_half * state.alpha.len() as f64;
            let mu_next = k.mu_given_alpha(sum_alpha, normal());
            recode_tilde_from_alpha(state, mu_next);
        }
    }
    state.iteration += 1;
    Ok(())
}

/// `alpha_tilde <- alpha - mu` and `mu_alpha <- mu`.
fn recode_tilde_from_alpha(state: &mut ChainState, mu: f64) {
    state.mu_alpha = mu;
    for (t, a) in state.alpha_tilde.iter_mut().zip(&state.alpha) {
        *t = a - mu;
    }
}

/// `alpha <- alpha_tilde + mu` and `mu_alpha <- mu`.
fn recode_alpha_from_tilde(state: &mut ChainState, mu: f64) {
    state.mu_alpha = mu;
    for (a, t) in state.alpha.iter_mut().zip(&state.alpha_tilde) {
        *a = t + mu;
    }
}

/// Advances the chain by one sweep of `scheme`, drawing noise from `rng`.
pub fn step<R: Rng + ?Sized>(
    scheme: SamplerScheme,
    state: &mut ChainState,
    data: &PanelDataset,
    spec: &ModelSpec,
    rng: &mut R,
) -> Result<()> {
    sweep(scheme, state, data, spec, &mut || rng.sample(StandardNormal))
}

/// Advances the chain by one sweep of `scheme`, replaying `noise`.
///
/// `z0_final` is the standard normal for the second `mu` draw of the interweaving schemes;
/// SA and AA ignore it.
pub fn step_with_noise(
    scheme: SamplerScheme,
    state: &mut ChainState,
    data: &PanelDataset,
    spec: &ModelSpec,
    noise: &NoiseDraws,
    z0_final: f64,
) -> Result<()> {
    check_noise(noise, data.n_individuals())?;
    let mut replay = noise.z.iter().copied().chain([noise.z0, z0_final]);
    sweep(scheme, state, data, spec, &mut || {
        replay.next().expect("noise replay exhausted")
    })
}

/// SA Gibbs sweep: `alpha | mu`, then `mu | alpha`.
pub fn step_sa<R: Rng + ?Sized>(
    state: &mut ChainState,
    data: &PanelDataset,
    spec: &ModelSpec,
    rng: &mut R,
) -> Result<()> {
    step(SamplerScheme::Sa, state, data, spec, rng)
}

/// AA Gibbs sweep: `alpha_tilde | mu`, then `mu | alpha_tilde`.
pub fn step_aa<R: Rng + ?Sized>(
    state: &mut ChainState,
    data: &PanelDataset,
    spec: &ModelSpec,
    rng: &mut R,
) -> Result<()> {
    step(SamplerScheme::Aa, state, data, spec, rng)
}

/// Interweaving sweep: SA draws of `alpha` and `mu`, re-code to `alpha_tilde = alpha - mu`,
/// then redraw `mu | alpha_tilde`.
pub fn step_asis_sa_aa<R: Rng + ?Sized>(
    state: &mut ChainState,
    data: &PanelDataset,
    spec: &ModelSpec,
    rng: &mut R,
) -> Result<()> {
    step(SamplerScheme::AsisSaAa, state, data, spec, rng)
}

/// Interweaving sweep: AA draws of `alpha_tilde` and `mu`, re-code to
/// `alpha = alpha_tilde + mu`, then redraw `mu | alpha`.
pub fn step_asis_aa_sa<R: Rng + ?Sized>(
    state: &mut ChainState,
    data: &PanelDataset,
    spec: &ModelSpec,
    rng: &mut R,
) -> Result<()> {
    step(SamplerScheme::AsisAaSa, state, data, spec, rng)
}
