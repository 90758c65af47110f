//! The five subcommands as plain functions, so tests can call them without
//! going through argument parsing. Grid points are evaluated in parallel;
//! `collect` keeps them in input order.

use rayon::prelude::*;
use serde::Serialize;

use sdpi_core::contraction::{confusion_graph, eta_alpha_search, eta_tv, is_k_singular, prop1_no_contraction, InputSet};
use sdpi_core::divergences::{e_gamma, f_alpha_div, renyi_div, tv};
use sdpi_core::inequalities::joint_range_envelope;
use sdpi_core::privacy::{amplification_report, asymptotic_sweep, block_uniform_channel, randomized_response, EtaTvMode};
use sdpi_core::{Alpha, Channel, Distribution};

use crate::input::check_grid;
use crate::output::Table;
use crate::CliError;

pub const DIV_COLUMNS: &[&str] = &["alpha", "tv", "e_gamma_1", "f_alpha", "renyi"];
pub const JOINT_RANGE_COLUMNS: &[&str] = &["t", "envelope", "g_alpha", "p_star"];
pub const AMPLIFY_COLUMNS: &[&str] = &["alpha", "rldp_mechanism", "rldp_composed_true", "phi_bound", "gamma_max"];
pub const SWEEP_N_COLUMNS: &[&str] = &["n", "gamma_max", "rldp_composed_true", "phi_bound"];

fn alpha_values(alphas: &[Alpha]) -> Vec<f64> {
    alphas.iter().map(|a| a.value()).collect()
}

/// One row per order: TV, `E_1`, the `f_alpha` divergence and Rényi divergence.
pub fn cmd_div(p: &Distribution, q: &Distribution, alphas: &[Alpha]) -> Result<Table, CliError> {
    check_grid("alpha", &alpha_values(alphas))?;
    if p.alphabet_size() != q.alphabet_size() {
        return Err(CliError::Input(format!(
            "q: alphabet size {} does not match p's {}",
            q.alphabet_size(),
            p.alphabet_size()
        )));
    }
    let t = tv(p, q)?;
    let e1 = e_gamma(p, q, 1.0)?;
    let rows = alphas
        .par_iter()
        .map(|&a| Ok(vec![a.value(), t, e1, f_alpha_div(p, q, a)?, renyi_div(p, q, a)?]))
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(Table::new(DIV_COLUMNS, rows))
}

/// `points` equally spaced TV values from 0 to `t_max` inclusive.
pub fn t_grid(points: usize, t_max: f64) -> Result<Vec<f64>, CliError> {
    if points == 0 {
        return Err(CliError::Input("points: must be positive".into()));
    }
    if !(0.0..1.0).contains(&t_max) {
        return Err(CliError::Input(format!("t-max: must lie in [0, 1), got {t_max}")));
    }
    if points == 1 {
        return Ok(vec![0.0]);
    }
    Ok((0..points).map(|i| t_max * i as f64 / (points - 1) as f64).collect())
}

/// Lower envelope of the joint range next to the closed-form bound.
pub fn cmd_joint_range(alpha: Alpha, t_points: &[f64], solver_tol: f64) -> Result<Table, CliError> {
    if !(alpha.value() > 1.0 && alpha.value().is_finite()) {
        return Err(CliError::Input(format!("alpha: must be finite and > 1, got {}", alpha.value())));
    }
    check_grid("t", t_points)?;
    let rows = t_points
        .par_iter()
        .map(|&t| {
            let pt = joint_range_envelope(t, alpha, solver_tol)?;
            Ok(vec![pt.t, pt.envelope, pt.bound, pt.p_star])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(Table::new(JOINT_RANGE_COLUMNS, rows))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyzeReport {
    pub input_size: usize,
    pub output_size: usize,
    pub k_singular: Option<usize>,
    pub edge_count: usize,
    pub complete: bool,
    pub prop1_no_contraction: bool,
    pub eta_tv_dobrushin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_alpha_lower_bound: Option<f64>,
}

/// Structural report on a channel; with an order also a seeded search for
/// the Rényi contraction coefficient.
pub fn cmd_analyze(channel: &Channel, alpha: Option<Alpha>, budget: usize, seed: u64) -> Result<AnalyzeReport, CliError> {
    let graph = confusion_graph(channel);
    let eta_alpha = match alpha {
        Some(a) => Some(eta_alpha_search(channel, a, &InputSet::FullSimplex, budget, seed)?.value),
        None => None,
    };
    Ok(AnalyzeReport {
        input_size: channel.input_size(),
        output_size: channel.output_size(),
        k_singular: is_k_singular(channel),
        edge_count: graph.edge_count(),
        complete: graph.is_complete(),
        prop1_no_contraction: prop1_no_contraction(channel),
        eta_tv_dobrushin: eta_tv(channel, &InputSet::FullSimplex)?.value,
        alpha: alpha.map(Alpha::value),
        eta_alpha_lower_bound: eta_alpha,
    })
}

fn check_epsilon(epsilon: f64) -> Result<(), CliError> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(CliError::Input(format!("epsilon: must be positive, got {epsilon}")));
    }
    Ok(())
}

/// Randomized response on `n` symbols followed by `n / k` uniform blocks of
/// size `k`: true guarantees and the amplification bound per order.
pub fn cmd_amplify(n: usize, epsilon: f64, k: usize, alphas: &[Alpha], eta_mode: EtaTvMode) -> Result<Table, CliError> {
    check_epsilon(epsilon)?;
    check_grid("alpha", &alpha_values(alphas))?;
    if k == 0 || !n.is_multiple_of(k) || n / k == 0 {
        return Err(CliError::Input(format!("k: block size {k} does not divide n = {n}")));
    }
    let mechanism = randomized_response(n, epsilon)?;
    let post = block_uniform_channel(n / k, k)?;
    let rows = alphas
        .par_iter()
        .map(|&a| {
            let r = amplification_report(&mechanism, &post, a, eta_mode)?;
            Ok(vec![a.value(), r.mechanism_rldp, r.composed_rldp_true, r.phi_bound, r.gammas.gamma_max])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(Table::new(AMPLIFY_COLUMNS, rows))
}

/// Fixed number of blocks `m`, growing alphabet `n`.
pub fn cmd_sweep_n(epsilon: f64, m: usize, n_values: &[usize], alpha: Alpha) -> Result<Table, CliError> {
    check_epsilon(epsilon)?;
    check_grid("n", n_values)?;
    if let Some(&n) = n_values.iter().find(|&&n| m == 0 || n == 0 || !n.is_multiple_of(m)) {
        return Err(CliError::Input(format!("n: {n} is not a positive multiple of m = {m}")));
    }
    let rows = n_values
        .par_iter()
        .map(|&n| {
            let point = asymptotic_sweep(epsilon, m, &[n], alpha)?.remove(0);
            let r = point.report;
            Ok(vec![n as f64, r.gammas.gamma_max, r.composed_rldp_true, r.phi_bound])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(Table::new(SWEEP_N_COLUMNS, rows))
}
