//! Divergence functionals on finite alphabets.
//!
//! All functions return `f64`; `f64::INFINITY` stands for a divergence that
//! is infinite because absolute continuity fails. Rényi and KL values are in
//! nats.
//!
//! The `f_alpha` family uses the generator `x^a - 1` for `a > 1`,
//! `1 - x^a` for `a < 1` and `x log x` at `a = 1`, so that for `a > 1`
//! the Rényi divergence is `log(1 + D_f) / (a - 1)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::probkit::Distribution;

/// Above this order the per-term power is evaluated as
/// `exp(a log p - (a - 1) log q)`.
pub const LOG_DOMAIN_ALPHA: f64 = 60.0;

/// Default relative tolerance for [`f_alpha_via_egamma`].
pub const DEFAULT_QUADRATURE_TOL: f64 = 1e-6;

/// Divergence order `alpha` in `(0, inf]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Alpha(f64);

impl Alpha {
    pub const INFINITY: Alpha = Alpha(f64::INFINITY);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value <= 0.0 {
            return Err(Error::InvalidAlpha(value));
        }
        Ok(Self(value))
    }

    /// Finite order strictly above 1, as the Pinsker-type bounds require.
    pub fn above_one(value: f64) -> Result<Self> {
        let a = Self::new(value).map_err(|_| Error::UnsupportedAlpha(value))?;
        a.require_above_one()?;
        Ok(a)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_one(self) -> bool {
        self.0 == 1.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    pub(crate) fn require_above_one(self) -> Result<f64> {
        if self.0 > 1.0 && self.0.is_finite() {
            Ok(self.0)
        } else {
            Err(Error::UnsupportedAlpha(self.0))
        }
    }
}

impl TryFrom<f64> for Alpha {
    type Error = Error;
    fn try_from(value: f64) -> Result<Self> {
        Alpha::new(value)
    }
}

impl From<Alpha> for f64 {
    fn from(a: Alpha) -> f64 {
        a.0
    }
}

/// Total variation distance `1/2 sum |p - q|`.
pub fn tv(p: &Distribution, q: &Distribution) -> Result<f64> {
    p.check_same_size(q)?;
    let s: f64 = p
        .probs()
        .iter()
        .zip(q.probs())
        .map(|(a, b)| (a - b).abs())
        .sum();
    Ok((0.5 * s).clamp(0.0, 1.0))
}

/// Hockey-stick divergence `1/2 sum |p - g q| - 1/2 |1 - g|`.
pub fn e_gamma(p: &Distribution, q: &Distribution, gamma: f64) -> Result<f64> {
    p.check_same_size(q)?;
    if gamma.is_nan() || gamma <= 0.0 {
        return Err(Error::NonPositiveGamma(gamma));
    }
    Ok(e_gamma_unchecked(p.probs(), q.probs(), gamma))
}

fn e_gamma_unchecked(p: &[f64], q: &[f64], gamma: f64) -> f64 {
    let s: f64 = p.iter().zip(q).map(|(a, b)| (a - gamma * b).abs()).sum();
    (0.5 * s - 0.5 * (1.0 - gamma).abs()).max(0.0)
}

/// `D_f(p || q)` for the generator `f_alpha`.
///
/// For `alpha > 1` any `x` with `q(x) = 0 < p(x)` makes the value infinite;
/// symbols with `p(x) = q(x) = 0` contribute nothing. `alpha = 1` is KL.
pub fn f_alpha_div(p: &Distribution, q: &Distribution, alpha: Alpha) -> Result<f64> {
    p.check_same_size(q)?;
    let a = alpha.value();
    if alpha.is_infinite() {
        return Err(Error::UnsupportedAlpha(a));
    }
    if alpha.is_one() {
        return kl(p, q);
    }
    let (p, q) = (p.probs(), q.probs());
    if a > 1.0 {
        let mut sum = 0.0;
        for (&pi, &qi) in p.iter().zip(q) {
            if qi == 0.0 {
                if pi > 0.0 {
                    return Ok(f64::INFINITY);
                }
                continue;
            }
            sum += if pi == 0.0 {
                -qi
            } else if a > LOG_DOMAIN_ALPHA {
                (a * pi.ln() - (a - 1.0) * qi.ln()).exp() - qi
            } else {
                qi * (a * (pi / qi).ln()).exp_m1()
            };
        }
        Ok(sum.max(0.0))
    } else {
        // q(x) = 0 terms vanish in the limit q -> 0 for a < 1
        let sum: f64 = p
            .iter()
            .zip(q)
            .filter(|(_, &qi)| qi > 0.0)
            .map(|(&pi, &qi)| if pi == 0.0 { qi } else { -qi * (a * (pi / qi).ln()).exp_m1() })
            .sum();
        Ok(sum.clamp(0.0, 1.0))
    }
}

/// Rényi divergence of order `alpha` in nats.
///
/// `alpha = 1` is KL and `alpha = inf` is [`d_infinity`].
pub fn renyi_div(p: &Distribution, q: &Distribution, alpha: Alpha) -> Result<f64> {
    p.check_same_size(q)?;
    if alpha.is_infinite() {
        return d_infinity(p, q);
    }
    if alpha.is_one() {
        return kl(p, q);
    }
    let a = alpha.value();
    let f = f_alpha_div(p, q, alpha)?;
    if a > 1.0 {
        if f.is_infinite() {
            // either a support violation or overflow of sum p^a q^(1-a)
            if has_support_violation(p.probs(), q.probs()) {
                return Ok(f64::INFINITY);
            }
            return Ok(log_power_sum(p.probs(), q.probs(), a) / (a - 1.0));
        }
        Ok((f.ln_1p() / (a - 1.0)).max(0.0))
    } else {
        // 1 - f = sum p^a q^(1-a); zero when supports are disjoint
        if f >= 1.0 {
            return Ok(f64::INFINITY);
        }
        Ok(((-f).ln_1p() / (a - 1.0)).max(0.0))
    }
}

fn has_support_violation(p: &[f64], q: &[f64]) -> bool {
    p.iter().zip(q).any(|(&pi, &qi)| qi == 0.0 && pi > 0.0)
}

/// `log sum_x p^a q^(1-a)` by log-sum-exp, over the common support.
fn log_power_sum(p: &[f64], q: &[f64], a: f64) -> f64 {
    let logs: Vec<f64> = p
        .iter()
        .zip(q)
        .filter(|(&pi, &qi)| pi > 0.0 && qi > 0.0)
        .map(|(&pi, &qi)| a * pi.ln() + (1.0 - a) * qi.ln())
        .collect();
    let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + logs.iter().map(|l| (l - m).exp()).sum::<f64>().ln()
}

/// Order-infinity Rényi divergence `max_{x in supp p} log(p(x) / q(x))`.
pub fn d_infinity(p: &Distribution, q: &Distribution) -> Result<f64> {
    p.check_same_size(q)?;
    let mut best = f64::NEG_INFINITY;
    for (&pi, &qi) in p.probs().iter().zip(q.probs()) {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            return Ok(f64::INFINITY);
        }
        best = best.max((pi / qi).ln());
    }
    Ok(best.max(0.0))
}

/// Relative entropy in nats with `0 log 0 = 0`.
pub fn kl(p: &Distribution, q: &Distribution) -> Result<f64> {
    p.check_same_size(q)?;
    let mut sum = 0.0;
    for (&pi, &qi) in p.probs().iter().zip(q.probs()) {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            return Ok(f64::INFINITY);
        }
        sum += pi * (pi / qi).ln();
    }
    Ok(sum.max(0.0))
}

/// Smallest and largest likelihood ratio `p(x)/q(x)`, skipping symbols
/// outside both supports. The max is infinite on a support violation and
/// the min is 0 when `p` vanishes somewhere `q` does not.
pub(crate) fn likelihood_ratio_range(p: &[f64], q: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi == 0.0 && qi == 0.0 {
            continue;
        }
        let r = if qi == 0.0 { f64::INFINITY } else { pi / qi };
        lo = lo.min(r);
        hi = hi.max(r);
    }
    (lo, hi)
}

/// `D_f` for `f_alpha`, `alpha > 1`, recovered from the hockey-stick curve:
/// `a (a - 1) * integral E_g(p||q) g^(a-2) dg`.
///
/// `E_g` vanishes outside `[min p/q, max p/q]` and is piecewise linear with
/// kinks at the likelihood ratios, so the integral is split at those ratios
/// and each piece is integrated with adaptive Simpson to relative tolerance
/// `quadrature_tol`.
pub fn f_alpha_via_egamma(
    p: &Distribution,
    q: &Distribution,
    alpha: Alpha,
    quadrature_tol: f64,
) -> Result<f64> {
    p.check_same_size(q)?;
    let a = alpha.require_above_one()?;
    if !(quadrature_tol > 0.0) {
        return Err(Error::OutOfRange {
            name: "quadrature_tol",
            value: quadrature_tol,
            range: "(0, inf)",
        });
    }
    let (pp, qq) = (p.probs(), q.probs());
    if has_support_violation(pp, qq) {
        return Err(Error::SupportViolation);
    }
    let (lo, hi) = likelihood_ratio_range(pp, qq);
    if !(hi > lo) {
        return Ok(0.0);
    }
    let mut knots: Vec<f64> = pp
        .iter()
        .zip(qq)
        .filter(|(_, &qi)| qi > 0.0)
        .map(|(&pi, &qi)| pi / qi)
        .chain([1.0])
        .filter(|&r| r >= lo && r <= hi)
        .collect();
    knots.sort_by(f64::total_cmp);
    knots.dedup();

    let integrand = |g: f64| {
        let e = e_gamma_unchecked(pp, qq, g);
        // avoid 0 * inf at g = 0 when a < 2
        if e == 0.0 { 0.0 } else { e * g.powf(a - 2.0) }
    };
    // a composite Simpson pass sets the absolute error budget
    let coarse: f64 = knots
        .windows(2)
        .map(|w| composite_simpson(&integrand, w[0], w[1], 64))
        .sum();
    if coarse == 0.0 {
        return Ok(0.0);
    }
    let abs_tol = quadrature_tol * coarse.abs();
    let span = hi - lo;
    let mut total = 0.0;
    for w in knots.windows(2) {
        let eps = abs_tol * (w[1] - w[0]) / span;
        let piece = if w[0] == 0.0 {
            // E_g ~ c g near 0, so the integrand behaves like g^(a-1); the
            // substitution g = width * s^2 makes it smooth for a > 1
            let width = w[1];
            let smooth = |s: f64| integrand(width * s * s) * 2.0 * width * s;
            adaptive_simpson(&smooth, 0.0, 1.0, eps)
        } else {
            adaptive_simpson(&integrand, w[0], w[1], eps)
        };
        total += piece.ok_or(Error::QuadratureFailure { tolerance: quadrature_tol })?;
    }
    Ok((a * (a - 1.0) * total).max(0.0))
}

fn composite_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let x = a + i as f64 * h;
        s += if i % 2 == 1 { 4.0 * f(x) } else { 2.0 * f(x) };
    }
    s * h / 3.0
}

const SIMPSON_MAX_DEPTH: u32 = 48;

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> Option<f64> {
    let (fa, fb) = (f(a), f(b));
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, eps, SIMPSON_MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> Option<f64> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * eps {
        return Some(left + right + delta / 15.0);
    }
    if depth == 0 {
        return None;
    }
    Some(
        simpson_step(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)?
            + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)?,
    )
}
