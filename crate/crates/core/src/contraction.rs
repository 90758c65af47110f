//! Contraction diagnostics for a fixed channel.
//!
//! A channel whose confusion graph is incomplete (two inputs with disjoint
//! output supports) does not contract any Rényi divergence over the full
//! simplex; [`appendix_b_pair`] builds the input pair that witnesses this.
//! For restricted input sets the cross-channel likelihood-ratio extremes
//! ([`cross_channel_gamma`]) combine with the TV contraction coefficient
//! into the strong data processing bound [`sdpi_bound`].

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Exp1};
use serde::Serialize;

use crate::divergences::{renyi_div, tv, Alpha};
use crate::error::{Error, Result};
use crate::inequalities::{g_alpha_inverse, r_alpha, GammaBounds};
use crate::probkit::{Channel, Distribution};

/// Ratios above `1 + DPI_SLACK` are treated as a numerical bug.
pub const DPI_SLACK: f64 = 1e-6;

/// Perturbation used for the deterministic seed pairs of
/// [`eta_alpha_search`].
pub const SEED_PERTURBATION: f64 = 1e-6;

/// Graph on input symbols; `x` and `x'` are adjacent when some output is
/// reachable from both.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfusionGraph {
    pub vertex_count: usize,
    /// Unordered pairs stored as `(min, max)`.
    pub edges: BTreeSet<(usize, usize)>,
}

impl ConfusionGraph {
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, x: usize, y: usize) -> bool {
        self.edges.contains(&(x.min(y), x.max(y)))
    }

    pub fn is_complete(&self) -> bool {
        let n = self.vertex_count;
        self.edges.len() == n * n.saturating_sub(1) / 2
    }
}

/// Input distributions a contraction coefficient ranges over.
#[derive(Debug, Clone, PartialEq)]
pub enum InputSet {
    FullSimplex,
    Finite(Vec<Distribution>),
}

impl InputSet {
    pub fn finite(members: Vec<Distribution>) -> Result<Self> {
        let first = members.first().ok_or(Error::Empty)?;
        for m in &members {
            first.check_same_size(m)?;
        }
        Ok(InputSet::Finite(members))
    }

    /// The rows of a mechanism, i.e. the inputs it feeds a post-processing
    /// channel.
    pub fn rows_of(mechanism: &Channel) -> Self {
        InputSet::Finite(mechanism.rows().to_vec())
    }

    fn members_for(&self, channel: &Channel) -> Result<&[Distribution]> {
        match self {
            InputSet::FullSimplex => Err(Error::UnsupportedInputSet),
            InputSet::Finite(members) => {
                for m in members {
                    if m.alphabet_size() != channel.input_size() {
                        return Err(Error::DimensionMismatch {
                            expected: channel.input_size(),
                            found: m.alphabet_size(),
                        });
                    }
                }
                Ok(members)
            }
        }
    }
}

/// A contraction ratio together with the input pair attaining it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionEstimate {
    pub value: f64,
    pub witness: (Distribution, Distribution),
    /// Set when `value` comes from a search over an infinite set and so
    /// only bounds the supremum from below.
    pub is_lower_bound: bool,
}

pub fn confusion_graph(channel: &Channel) -> ConfusionGraph {
    let n = channel.input_size();
    let mut edges = BTreeSet::new();
    for y in 0..channel.output_size() {
        let column: Vec<usize> = (0..n).filter(|&x| channel.entry(x, y) > 0.0).collect();
        for (i, &a) in column.iter().enumerate() {
            for &b in &column[i + 1..] {
                edges.insert((a, b));
            }
        }
    }
    ConfusionGraph {
        vertex_count: n,
        edges,
    }
}

/// Inputs `(x, x')`, `x < x'`, whose output supports are disjoint.
pub fn disjoint_row_pairs(channel: &Channel) -> Vec<(usize, usize)> {
    let supports: Vec<_> = channel.rows().iter().map(Distribution::support).collect();
    let mut pairs = Vec::new();
    for i in 0..supports.len() {
        for j in i + 1..supports.len() {
            if supports[i].is_disjoint(&supports[j]) {
                pairs.push((i, j));
            }
        }
    }
    pairs
}

/// True when two inputs have disjoint output supports, in which case no
/// Rényi divergence contracts over the full simplex.
pub fn prop1_no_contraction(channel: &Channel) -> bool {
    !disjoint_row_pairs(channel).is_empty()
}

/// `Some(k)` when the channel is square, every row has exactly `k` positive
/// entries and each of them equals `1/k` (to 1e-9).
pub fn is_k_singular(channel: &Channel) -> Option<usize> {
    if !channel.is_square() {
        return None;
    }
    let k = channel.row(0).support().len();
    let level = 1.0 / k as f64;
    let ok = channel.rows().iter().all(|row| {
        let probs = row.probs();
        probs.iter().filter(|&&v| v > 0.0).count() == k
            && probs.iter().all(|&v| v == 0.0 || (v - level).abs() <= 1e-9)
    });
    ok.then_some(k)
}

/// Input pair whose contraction ratio tends to 1 as `gamma -> 0`.
///
/// `P` is a point mass at `i` with `gamma` spread uniformly over the other
/// symbols; `Q` splits `1 - gamma` evenly between `i` and `j` and spreads
/// `gamma` over the remaining symbols. With only two symbols there is no
/// remainder and `Q` is uniform.
pub fn appendix_b_pair(channel: &Channel, i: usize, j: usize, gamma: f64) -> Result<(Distribution, Distribution)> {
    let n = channel.input_size();
    for idx in [i, j] {
        if idx >= n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: idx + 1,
            });
        }
    }
    if i == j || !channel.row(i).support().is_disjoint(&channel.row(j).support()) {
        return Err(Error::SupportsOverlap { i, j });
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::BadGamma(gamma));
    }
    let p: Vec<f64> = (0..n)
        .map(|x| if x == i { 1.0 - gamma } else { gamma / (n - 1) as f64 })
        .collect();
    let q: Vec<f64> = if n == 2 {
        vec![0.5, 0.5]
    } else {
        (0..n)
            .map(|x| {
                if x == i || x == j {
                    0.5 * (1.0 - gamma)
                } else {
                    gamma / (n - 2) as f64
                }
            })
            .collect()
    };
    Ok((Distribution::new(p)?, Distribution::new(q)?))
}

/// `D_a(C p || C q) / D_a(p || q)`, or `None` when the input divergence is
/// zero or infinite.
pub fn renyi_ratio(channel: &Channel, p: &Distribution, q: &Distribution, alpha: Alpha) -> Result<Option<f64>> {
    let din = renyi_div(p, q, alpha)?;
    if din == 0.0 || !din.is_finite() {
        return Ok(None);
    }
    let dout = renyi_div(&channel.push_forward(p)?, &channel.push_forward(q)?, alpha)?;
    Ok(Some(dout / din))
}

/// Extremes over member pairs `(P, Q)` and outputs `y` of
/// `(C Q)(y) / (C P)(y)`. Identical pairs are included, so the result
/// always contains 1, and since both orders of each pair are visited
/// `gamma_min = 1 / gamma_max`.
pub fn cross_channel_gamma(channel: &Channel, inputs: &InputSet) -> Result<GammaBounds> {
    let members = inputs.members_for(channel)?;
    let outputs = members
        .iter()
        .map(|m| channel.push_forward(m))
        .collect::<Result<Vec<_>>>()?;
    let mut gamma_max: f64 = 1.0;
    let mut gamma_min: f64 = 1.0;
    for p_out in &outputs {
        for q_out in &outputs {
            for (&py, &qy) in p_out.probs().iter().zip(q_out.probs()) {
                if py == 0.0 && qy == 0.0 {
                    continue;
                }
                let r = if py == 0.0 { f64::INFINITY } else { qy / py };
                gamma_max = gamma_max.max(r);
                gamma_min = gamma_min.min(r);
            }
        }
    }
    GammaBounds::new(gamma_max, gamma_min)
}

/// Total variation contraction coefficient.
///
/// Over the full simplex this is the Dobrushin coefficient, the largest TV
/// between two rows. Over a finite set it is the largest ratio
/// `TV(C p, C q) / TV(p, q)` among member pairs with `p != q`.
pub fn eta_tv(channel: &Channel, inputs: &InputSet) -> Result<ContractionEstimate> {
    let mut best: Option<(f64, Distribution, Distribution)> = None;
    match inputs {
        InputSet::FullSimplex => {
            let n = channel.input_size();
            for i in 0..n {
                for j in i + 1..n {
                    let v = tv(channel.row(i), channel.row(j))?;
                    if best.as_ref().is_none_or(|b| v > b.0) {
                        best = Some((v, Distribution::point_mass(n, i)?, Distribution::point_mass(n, j)?));
                    }
                }
            }
        }
        InputSet::Finite(_) => {
            let members = inputs.members_for(channel)?;
            let outputs = members
                .iter()
                .map(|m| channel.push_forward(m))
                .collect::<Result<Vec<_>>>()?;
            for i in 0..members.len() {
                for j in i + 1..members.len() {
                    let din = tv(&members[i], &members[j])?;
                    if din == 0.0 {
                        continue;
                    }
                    let v = tv(&outputs[i], &outputs[j])? / din;
                    if best.as_ref().is_none_or(|b| v > b.0) {
                        best = Some((v, members[i].clone(), members[j].clone()));
                    }
                }
            }
        }
    }
    let (value, p, q) = best.ok_or(Error::DegenerateSet)?;
    Ok(ContractionEstimate {
        value: value.clamp(0.0, 1.0),
        witness: (p, q),
        is_lower_bound: false,
    })
}

/// Tracks the best ratio seen and enforces the DPI.
struct Best {
    value: f64,
    witness: Option<(Distribution, Distribution)>,
}

impl Best {
    fn offer(&mut self, ratio: Option<f64>, p: &Distribution, q: &Distribution) -> Result<bool> {
        let Some(r) = ratio else { return Ok(false) };
        if r > 1.0 + DPI_SLACK {
            return Err(Error::DpiViolation { ratio: r });
        }
        if self.witness.is_none() || r > self.value {
            self.value = r;
            self.witness = Some((p.clone(), q.clone()));
            return Ok(true);
        }
        Ok(false)
    }
}

/// Lower bound on the Rényi contraction coefficient `eta_a(C, inputs)`.
///
/// Over a finite set every ordered member pair is evaluated and the result
/// is exact. Over the full simplex the search evaluates, within `budget`
/// ratio evaluations: the [`appendix_b_pair`] construction for every pair
/// of rows with disjoint supports; seeded random pairs (flat Dirichlet and
/// sharpened Dirichlet draws); then coordinate moves of mass between two
/// symbols of either distribution around the incumbent, with a shrinking
/// step. Deterministic for fixed `seed` and `budget`.
pub fn eta_alpha_search(
    channel: &Channel,
    alpha: Alpha,
    inputs: &InputSet,
    budget: usize,
    seed: u64,
) -> Result<ContractionEstimate> {
    alpha.require_above_one()?;
    let mut best = Best {
        value: 0.0,
        witness: None,
    };
    if let InputSet::Finite(_) = inputs {
        let members = inputs.members_for(channel)?;
        for p in members {
            for q in members {
                best.offer(renyi_ratio(channel, p, q, alpha)?, p, q)?;
            }
        }
        let (p, q) = best.witness.ok_or(Error::DegenerateSet)?;
        return Ok(ContractionEstimate {
            value: best.value.clamp(0.0, 1.0),
            witness: (p, q),
            is_lower_bound: false,
        });
    }

    let n = channel.input_size();
    if n < 2 {
        return Err(Error::DegenerateSet);
    }
    let mut evals = 0usize;
    for (i, j) in disjoint_row_pairs(channel) {
        for (a, b) in [(i, j), (j, i)] {
            let (p, q) = appendix_b_pair(channel, a, b, SEED_PERTURBATION)?;
            best.offer(renyi_ratio(channel, &p, &q, alpha)?, &p, &q)?;
            evals += 1;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random_budget = budget.saturating_sub(evals) / 2;
    for draw in 0..random_budget {
        let sharp = draw % 2 == 1;
        let p = random_simplex_point(&mut rng, n, sharp)?;
        let q = random_simplex_point(&mut rng, n, sharp)?;
        best.offer(renyi_ratio(channel, &p, &q, alpha)?, &p, &q)?;
        evals += 1;
    }

    if best.witness.is_none() {
        // every sampled pair had zero input divergence
        let p = Distribution::point_mass(n, 0)?;
        let q = Distribution::uniform(n)?;
        best.offer(renyi_ratio(channel, &p, &q, alpha)?, &p, &q)?;
        evals += 1;
    }
    let Some((mut p, mut q)) = best.witness.clone() else {
        return Err(Error::DegenerateSet);
    };

    let mut step = 0.1;
    while evals < budget && step > 1e-12 {
        let mut improved = false;
        'moves: for which in 0..2 {
            for from in 0..n {
                for to in 0..n {
                    if from == to || evals >= budget {
                        continue;
                    }
                    let base = if which == 0 { &p } else { &q };
                    let Some(moved) = shift_mass(base, from, to, step) else { continue };
                    let (cp, cq) = if which == 0 { (&moved, &q) } else { (&p, &moved) };
                    evals += 1;
                    if best.offer(renyi_ratio(channel, cp, cq, alpha)?, cp, cq)? {
                        if which == 0 {
                            p = moved;
                        } else {
                            q = moved;
                        }
                        improved = true;
                        break 'moves;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }

    let (p, q) = best.witness.ok_or(Error::DegenerateSet)?;
    Ok(ContractionEstimate {
        value: best.value.clamp(0.0, 1.0),
        witness: (p, q),
        is_lower_bound: true,
    })
}

fn random_simplex_point(rng: &mut ChaCha8Rng, n: usize, sharp: bool) -> Result<Distribution> {
    // Dirichlet(1) via normalized exponentials; the sharp variant cubes the
    // weights to push mass toward the simplex boundary
    let mut w: Vec<f64> = (0..n)
        .map(|_| {
            let e: f64 = Exp1.sample(rng);
            if sharp {
                e.powi(3)
            } else {
                e
            }
        })
        .collect();
    if sharp && rng.random_bool(0.5) {
        let zero = rng.random_range(0..n);
        w[zero] = 0.0;
    }
    let s: f64 = w.iter().sum();
    if s == 0.0 {
        return Distribution::uniform(n);
    }
    Distribution::new(w.into_iter().map(|v| v / s).collect())
}

/// Moves `step` of the mass at `from` (relative to its size) to `to`.
fn shift_mass(d: &Distribution, from: usize, to: usize, step: f64) -> Option<Distribution> {
    let probs = d.probs();
    let amount = probs[from] * step;
    if amount == 0.0 {
        return None;
    }
    let mut v = probs.to_vec();
    v[from] -= amount;
    v[to] += amount;
    Distribution::new(v).ok()
}

/// Upper bound on `D_f(C p || C q)` over member pairs of `inputs` whose
/// input divergence is at most `input_falpha`:
/// `eta_TV * R_a(Gamma_max(Y), Gamma_min(Y)) * g_a^{-1}(input_falpha)`.
///
/// A zero factor wins over an infinite one, since a zero TV coefficient or
/// TV budget forces equal outputs.
pub fn sdpi_bound(channel: &Channel, alpha: Alpha, inputs: &InputSet, input_falpha: f64) -> Result<f64> {
    alpha.require_above_one()?;
    if input_falpha.is_nan() || input_falpha < 0.0 {
        return Err(Error::NegativeS(input_falpha));
    }
    let gammas = cross_channel_gamma(channel, inputs)?;
    let eta = match eta_tv(channel, inputs) {
        Ok(e) => e.value,
        Err(Error::DegenerateSet) => 0.0,
        Err(e) => return Err(e),
    };
    let tv_budget = g_alpha_inverse(input_falpha, alpha)?;
    let scale = eta * tv_budget;
    if scale == 0.0 {
        return Ok(0.0);
    }
    let r = r_alpha(gammas.gamma_max, gammas.gamma_min, alpha)?;
    if r == 0.0 {
        return Ok(0.0);
    }
    Ok(scale * r)
}
