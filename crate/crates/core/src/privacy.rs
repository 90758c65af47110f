//! Rényi local differential privacy of a mechanism and of its cascade with
//! a post-processing channel.
//!
//! For a mechanism `W -> X` and a channel `X -> Y`, the privacy of the
//! cascade is bounded by
//!
//! ```text
//! phi = ln(1 + eta_TV * R_a(Gamma_max(Y), Gamma_min(Y)) * g_a^{-1}(eps_f)) / (a - 1)
//! ```
//!
//! where `eps_f = exp((a - 1) eps) - 1` is the mechanism's guarantee on the
//! `f_alpha` scale and the `Gamma` extremes range over the mechanism's rows
//! pushed through the channel.

use serde::Serialize;

use crate::contraction::{cross_channel_gamma, eta_tv, InputSet};
use crate::divergences::{d_infinity, renyi_div, Alpha};
use crate::error::{Error, Result};
use crate::inequalities::{g_alpha_inverse, renyi_scaled_r_alpha, GammaBounds};
use crate::probkit::Channel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GuaranteeKind {
    Rldp,
    /// Order infinity, i.e. pure LDP.
    LdpPure,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrivacyGuarantee {
    /// Nats; infinite when some pair of rows is not mutually absolutely continuous.
    pub epsilon: f64,
    pub alpha: Alpha,
    pub kind: GuaranteeKind,
}

/// How the TV contraction coefficient of the post-processing channel is
/// chosen when assembling the amplification bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EtaTvMode {
    /// Use 1, valid for every channel.
    #[default]
    AssumeOne,
    /// Dobrushin coefficient over the full simplex.
    Dobrushin,
    /// Exact coefficient over the mechanism's rows.
    FiniteExact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmplificationReport {
    pub alpha: Alpha,
    pub mechanism_rldp: f64,
    pub composed_rldp_true: f64,
    pub phi_bound: f64,
    pub eta_tv_used: f64,
    pub gammas: GammaBounds,
}

/// Report for one alphabet size in [`asymptotic_sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub n: usize,
    pub k: usize,
    pub report: AmplificationReport,
}

/// `n x n` randomized response: `e^eps / (n + e^eps - 1)` on the diagonal,
/// `1 / (n + e^eps - 1)` elsewhere.
pub fn randomized_response(n: usize, epsilon: f64) -> Result<Channel> {
    if n < 2 {
        return Err(Error::BadParams(format!("randomized response needs n >= 2, got {n}")));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::BadParams(format!("epsilon must be positive and finite, got {epsilon}")));
    }
    let e = epsilon.exp();
    let denom = n as f64 + e - 1.0;
    let (diag, off) = (e / denom, 1.0 / denom);
    let rows = (0..n)
        .map(|w| (0..n).map(|x| if w == x { diag } else { off }).collect())
        .collect();
    Channel::new(rows)
}

/// Block-diagonal channel of `m` uniform `k x k` blocks.
pub fn block_uniform_channel(m: usize, k: usize) -> Result<Channel> {
    if m == 0 || k == 0 {
        return Err(Error::BadParams(format!("block counts must be positive, got m={m} k={k}")));
    }
    let n = m * k;
    let level = 1.0 / k as f64;
    let rows = (0..n)
        .map(|x| {
            let block = x / k;
            (0..n).map(|y| if y / k == block { level } else { 0.0 }).collect()
        })
        .collect();
    Channel::new(rows)
}

/// Worst-case Rényi divergence between two rows of `mechanism`.
///
/// Ordered pairs are enumerated since the divergence is asymmetric. An
/// infinite order gives the pure LDP level.
pub fn rldp_guarantee(mechanism: &Channel, alpha: Alpha) -> Result<PrivacyGuarantee> {
    let kind = if alpha.is_infinite() {
        GuaranteeKind::LdpPure
    } else {
        alpha.require_above_one()?;
        GuaranteeKind::Rldp
    };
    let rows = mechanism.rows();
    let mut epsilon: f64 = 0.0;
    for (i, p) in rows.iter().enumerate() {
        for (j, q) in rows.iter().enumerate() {
            if i == j {
                continue;
            }
            let d = match kind {
                GuaranteeKind::LdpPure => d_infinity(p, q)?,
                GuaranteeKind::Rldp => renyi_div(p, q, alpha)?,
            };
            epsilon = epsilon.max(d);
            if epsilon.is_infinite() {
                return Ok(PrivacyGuarantee { epsilon, alpha, kind });
            }
        }
    }
    Ok(PrivacyGuarantee { epsilon, alpha, kind })
}

/// `exp((a - 1) eps) - 1`, the `f_alpha` value of a Rényi divergence `eps`.
pub fn epsilon_to_f(epsilon: f64, alpha: Alpha) -> Result<f64> {
    let a = alpha.require_above_one()?;
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(Error::OutOfRange {
            name: "epsilon",
            value: epsilon,
            range: "[0, inf]",
        });
    }
    Ok(((a - 1.0) * epsilon).exp_m1())
}

/// Amplification bound on the cascade's Rényi guarantee, in nats.
pub fn phi_bound(epsilon_f: f64, alpha: Alpha, eta_tv: f64, gammas: &GammaBounds) -> Result<f64> {
    if !(0.0..=1.0).contains(&eta_tv) {
        return Err(Error::OutOfRange {
            name: "eta_tv",
            value: eta_tv,
            range: "[0, 1]",
        });
    }
    let tv_budget = g_alpha_inverse(epsilon_f, alpha)?;
    renyi_scaled_r_alpha(eta_tv * tv_budget, gammas, alpha)
}

/// Mechanism guarantee, true cascade guarantee and the amplification bound
/// at one order.
pub fn amplification_report(
    mechanism: &Channel,
    post: &Channel,
    alpha: Alpha,
    eta_mode: EtaTvMode,
) -> Result<AmplificationReport> {
    alpha.require_above_one()?;
    if mechanism.output_size() != post.input_size() {
        return Err(Error::DimensionMismatch {
            expected: post.input_size(),
            found: mechanism.output_size(),
        });
    }
    let mechanism_rldp = rldp_guarantee(mechanism, alpha)?.epsilon;
    let composed = mechanism.compose(post)?;
    let composed_rldp_true = rldp_guarantee(&composed, alpha)?.epsilon;
    let inputs = InputSet::rows_of(mechanism);
    let gammas = cross_channel_gamma(post, &inputs)?;
    let eta_tv_used = match eta_mode {
        EtaTvMode::AssumeOne => 1.0,
        EtaTvMode::Dobrushin => degenerate_as_zero(eta_tv(post, &InputSet::FullSimplex))?,
        EtaTvMode::FiniteExact => degenerate_as_zero(eta_tv(post, &inputs))?,
    };
    let phi = if mechanism_rldp == 0.0 {
        0.0
    } else {
        phi_bound(epsilon_to_f(mechanism_rldp, alpha)?, alpha, eta_tv_used, &gammas)?
    };
    Ok(AmplificationReport {
        alpha,
        mechanism_rldp,
        composed_rldp_true,
        phi_bound: phi,
        eta_tv_used,
        gammas,
    })
}

fn degenerate_as_zero(r: Result<crate::contraction::ContractionEstimate>) -> Result<f64> {
    match r {
        Ok(e) => Ok(e.value),
        Err(Error::DegenerateSet) => Ok(0.0),
        Err(e) => Err(e),
    }
}

/// Randomized response of size `n` followed by `block_uniform_channel(m, n/m)`
/// for each `n`, at a fixed order, with `eta_TV` taken as 1.
pub fn asymptotic_sweep(epsilon: f64, m: usize, n_values: &[usize], alpha: Alpha) -> Result<Vec<SweepPoint>> {
    if m == 0 {
        return Err(Error::BadParams("m must be positive".into()));
    }
    n_values
        .iter()
        .map(|&n| {
            if n == 0 || n % m != 0 {
                return Err(Error::BadParams(format!("n = {n} is not a positive multiple of m = {m}")));
            }
            let k = n / m;
            let mechanism = randomized_response(n, epsilon)?;
            let post = block_uniform_channel(m, k)?;
            let report = amplification_report(&mechanism, &post, alpha, EtaTvMode::AssumeOne)?;
            Ok(SweepPoint { n, k, report })
        })
        .collect()
}

/// Closed-form cross-channel extremes for randomized response followed by
/// uniform blocks of size `k`: `1 + (e^eps - 1)/k` and its reciprocal.
pub fn block_uniform_gamma(epsilon: f64, k: usize) -> GammaBounds {
    let g = 1.0 + epsilon.exp_m1() / k as f64;
    GammaBounds {
        gamma_max: g,
        gamma_min: 1.0 / g,
    }
}

/// Log-spaced grid of `points` orders over `[lo, hi]`.
pub fn log_spaced_alphas(lo: f64, hi: f64, points: usize) -> Result<Vec<Alpha>> {
    if !(lo > 1.0 && hi >= lo && hi.is_finite()) || points == 0 {
        return Err(Error::BadParams(format!("bad alpha grid [{lo}, {hi}] x {points}")));
    }
    if points == 1 {
        return Ok(vec![Alpha::above_one(lo)?]);
    }
    let (l, h) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| {
            let v = if i == points - 1 {
                hi
            } else {
                (l + (h - l) * i as f64 / (points - 1) as f64).exp()
            };
            Alpha::above_one(v)
        })
        .collect()
}

/// Default order grid: 50 log-spaced points over `[1.1, 100]`.
pub fn default_alpha_grid() -> Vec<Alpha> {
    log_spaced_alphas(1.1, 100.0, 50).expect("static grid")
}
