//! Pinsker-type bounds between the `f_alpha` divergence and total variation.
//!
//! * [`r_alpha`] and [`reverse_pinsker`]: upper bound on `D_f` from TV and
//!   the extreme likelihood ratios of the pair (or of a set of pairs).
//! * [`g_alpha`] and [`g_alpha_inverse`]: lower bound on `D_f` from TV, and
//!   the piecewise inverse used to turn a divergence budget into a TV bound.
//! * [`psi_alpha`] and [`joint_range_envelope`]: the binary reduction of
//!   the joint range of `(TV, D_f)` and its numerically minimized lower
//!   envelope.
//!
//! Every function here requires a finite order `alpha > 1`.

use serde::Serialize;

use crate::divergences::{f_alpha_div, likelihood_ratio_range, tv, Alpha};
use crate::error::{Error, Result};
use crate::probkit::Distribution;

/// Default bracket width for [`joint_range_envelope`].
pub const DEFAULT_SOLVER_TOL: f64 = 1e-10;

const GOLDEN_MAX_ITER: usize = 200;
const BISECT_MAX_ITER: usize = 400;

/// Extreme likelihood ratios `(max p/q, min p/q)`, possibly taken over a
/// whole set of pairs. `gamma_min <= 1 <= gamma_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaBounds {
    pub gamma_max: f64,
    pub gamma_min: f64,
}

impl GammaBounds {
    pub const TRIVIAL: GammaBounds = GammaBounds {
        gamma_max: 1.0,
        gamma_min: 1.0,
    };

    pub fn new(gamma_max: f64, gamma_min: f64) -> Result<Self> {
        if gamma_max.is_nan() || gamma_min.is_nan() || gamma_max < 1.0 || !(0.0..=1.0).contains(&gamma_min) {
            return Err(Error::InvalidGammaBounds { gamma_max, gamma_min });
        }
        Ok(Self { gamma_max, gamma_min })
    }

    pub fn is_finite(&self) -> bool {
        self.gamma_max.is_finite()
    }

    /// True when `self` contains the interval of `other`.
    pub fn dominates(&self, other: &GammaBounds) -> bool {
        let slack = |x: f64| 1e-12 * x.abs().max(1.0);
        self.gamma_max >= other.gamma_max - slack(other.gamma_max)
            && self.gamma_min <= other.gamma_min + slack(other.gamma_min)
    }
}

/// One point on the lower boundary of the joint range of `(TV, D_f)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JointRangePoint {
    pub t: f64,
    /// `min_p psi_alpha(p, t)`.
    pub envelope: f64,
    /// `g_alpha(t)`.
    pub bound: f64,
    pub p_star: f64,
}

/// Likelihood-ratio extremes of a single pair.
pub fn pair_gamma(p: &Distribution, q: &Distribution) -> Result<GammaBounds> {
    p.check_same_size(q)?;
    let (lo, hi) = likelihood_ratio_range(p.probs(), q.probs());
    // both sides sum to one, so the ratios straddle 1 up to rounding
    Ok(GammaBounds {
        gamma_max: hi.max(1.0),
        gamma_min: lo.min(1.0),
    })
}

/// `(u^a - 1)/(u - 1) - (1 - v^a)/(1 - v)`, with the value `a` taken at
/// `u = 1` and `v = 1`, and `+inf` at `u = inf`.
pub fn r_alpha(u: f64, v: f64, alpha: Alpha) -> Result<f64> {
    let a = alpha.require_above_one()?;
    check_uv(u, v)?;
    let upper = secant_upper(u, a);
    if upper.is_infinite() {
        return Ok(f64::INFINITY);
    }
    Ok((upper - secant_lower(v, a)).max(0.0))
}

fn check_uv(u: f64, v: f64) -> Result<()> {
    if u.is_nan() || u < 1.0 {
        return Err(Error::OutOfRange {
            name: "u",
            value: u,
            range: "[1, inf]",
        });
    }
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::OutOfRange {
            name: "v",
            value: v,
            range: "[0, 1]",
        });
    }
    Ok(())
}

// (u^a - 1) / (u - 1)
fn secant_upper(u: f64, a: f64) -> f64 {
    if u == 1.0 {
        a
    } else if u.is_infinite() {
        f64::INFINITY
    } else {
        (a * u.ln()).exp_m1() / (u - 1.0)
    }
}

// (1 - v^a) / (1 - v)
fn secant_lower(v: f64, a: f64) -> f64 {
    if v == 1.0 {
        a
    } else if v == 0.0 {
        1.0
    } else {
        -(a * v.ln()).exp_m1() / (1.0 - v)
    }
}

/// `ln(1 + scale * R_a(u, v)) / (a - 1)` without forming `u^a`.
///
/// This is the Rényi-scale form of the reverse Pinsker bound (with
/// `scale = TV`) and of the amplification bound (with
/// `scale = eta_TV * g_a^{-1}(eps_f)`). A zero scale gives 0 even when
/// `u` is infinite.
pub fn renyi_scaled_r_alpha(scale: f64, gammas: &GammaBounds, alpha: Alpha) -> Result<f64> {
    let a = alpha.require_above_one()?;
    check_uv(gammas.gamma_max, gammas.gamma_min)?;
    if scale.is_nan() || scale < 0.0 {
        return Err(Error::OutOfRange {
            name: "scale",
            value: scale,
            range: "[0, inf)",
        });
    }
    if scale == 0.0 {
        return Ok(0.0);
    }
    let (u, v) = (gammas.gamma_max, gammas.gamma_min);
    if u.is_infinite() || scale.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let upper = secant_upper(u, a);
    let lower = secant_lower(v, a);
    let log_value = if upper.is_finite() && upper < 1e300 {
        (scale * (upper - lower).max(0.0)).ln_1p()
    } else {
        // ln(s*A - s*B + 1) = ln(s*A) + ln1p((1 - s*B)/(s*A)),
        // ln A = a ln u + ln(1 - u^-a) - ln(u - 1)
        let log_upper = a * u.ln() + (-(-a * u.ln()).exp()).ln_1p() - (u - 1.0).ln();
        let log_sa = scale.ln() + log_upper;
        log_sa + ((1.0 - scale * lower) * (-log_sa).exp()).ln_1p()
    };
    Ok((log_value / (a - 1.0)).max(0.0))
}

/// Upper bound `TV(p, q) * R_a(gamma_max, gamma_min)` on `D_f(p || q)`.
///
/// `gammas` must contain the pair's own likelihood-ratio interval.
pub fn reverse_pinsker(p: &Distribution, q: &Distribution, alpha: Alpha, gammas: &GammaBounds) -> Result<f64> {
    alpha.require_above_one()?;
    let own = pair_gamma(p, q)?;
    if !gammas.dominates(&own) {
        return Err(Error::GammaViolation {
            gamma_max: gammas.gamma_max,
            gamma_min: gammas.gamma_min,
            pair_max: own.gamma_max,
            pair_min: own.gamma_min,
        });
    }
    let t = tv(p, q)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    Ok(t * r_alpha(gammas.gamma_max, gammas.gamma_min, alpha)?)
}

fn check_t(t: f64) -> Result<()> {
    if !(0.0..1.0).contains(&t) {
        return Err(Error::OutOfRange {
            name: "t",
            value: t,
            range: "[0, 1)",
        });
    }
    Ok(())
}

/// Lower bound on `D_f(p || q)` as a function of `t = TV(p, q)`.
///
/// Three pieces: the KL Pinsker bound for `t < 1/a, a < 2`; the Jensen
/// bound `(1 + 4t^2)^(a-1) - 1` for `t < 1/a, a >= 2`; and the exact
/// boundary `(1 - t)^(1-a) - 1` for `t >= 1/a`.
pub fn g_alpha(t: f64, alpha: Alpha) -> Result<f64> {
    let a = alpha.require_above_one()?;
    check_t(t)?;
    let value = if t < 1.0 / a {
        if a < 2.0 {
            (2.0 * (a - 1.0) * t * t).exp_m1()
        } else {
            ((a - 1.0) * (4.0 * t * t).ln_1p()).exp_m1()
        }
    } else {
        ((1.0 - a) * (-t).ln_1p()).exp_m1()
    };
    Ok(value.max(0.0))
}

/// Seam for the `a < 2` branch of [`g_alpha_inverse`]: `2 - 2/a`.
pub fn h1(a: f64) -> f64 {
    2.0 - 2.0 / a
}

/// Seam for the `a >= 2` branch of [`g_alpha_inverse`]: `(1 + 4/a^2)^(a-1) - 1`.
pub fn h2(a: f64) -> f64 {
    ((a - 1.0) * (4.0 / (a * a)).ln_1p()).exp_m1()
}

/// Piecewise inverse of [`g_alpha`], returning a TV value in `[0, 1]`.
///
/// `g_alpha` jumps upward at `t = 1/a`, so this is not a true inverse; the
/// case seams sit at `h1(a)` and `h2(a)` and the last branch is floored at
/// `1/a`. What holds is `g_alpha_inverse(g_alpha(t)) >= t`.
pub fn g_alpha_inverse(s: f64, alpha: Alpha) -> Result<f64> {
    let a = alpha.require_above_one()?;
    if s.is_nan() || s < 0.0 {
        return Err(Error::NegativeS(s));
    }
    let t = if a < 2.0 && s < h1(a) {
        (s.ln_1p() / (2.0 * (a - 1.0))).sqrt()
    } else if a >= 2.0 && s < h2(a) {
        0.5 * (s.ln_1p() / (a - 1.0)).exp_m1().sqrt()
    } else {
        // 1 - (s+1)^(1/(1-a)), computed through ln1p so s = inf gives 1
        let tail = -(s.ln_1p() / (1.0 - a)).exp_m1();
        tail.max(1.0 / a)
    };
    Ok(t.clamp(0.0, 1.0))
}

/// Binary `f_alpha` divergence between `[p, 1-p]` and `[p+t, 1-p-t]`.
///
/// Boundary conventions: the first term is 0 at `p = 0`; at `p = 1 - t`
/// the second term is 0 when `t = 0` and `+inf` otherwise.
pub fn psi_alpha(p: f64, t: f64, alpha: Alpha) -> Result<f64> {
    let a = alpha.require_above_one()?;
    check_t(t)?;
    if !(0.0..=1.0 - t).contains(&p) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            range: "[0, 1 - t]",
        });
    }
    Ok(psi_unchecked(p, t, a))
}

fn psi_unchecked(p: f64, t: f64, a: f64) -> f64 {
    let first = if p == 0.0 { 0.0 } else { p * (p / (p + t)).powf(a - 1.0) };
    let rest = 1.0 - p;
    let rest_q = 1.0 - p - t;
    let second = if rest_q <= 0.0 {
        if t == 0.0 {
            0.0
        } else {
            return f64::INFINITY;
        }
    } else {
        rest * (rest / rest_q).powf(a - 1.0)
    };
    (first + second - 1.0).max(0.0)
}

/// `d psi / d p`.
fn psi_derivative(p: f64, t: f64, a: f64) -> f64 {
    let rest_q = 1.0 - p - t;
    if rest_q <= 0.0 {
        return f64::INFINITY;
    }
    let first = if p == 0.0 {
        0.0
    } else {
        (p / (p + t)).powf(a - 1.0) / (p + t)
    };
    let second = ((1.0 - p) / rest_q).powf(a - 1.0) / rest_q;
    (a * t + p) * (first + second) - second
}

/// Minimizes the convex map `p -> psi_alpha(p, t)` over `[0, 1 - t]`.
///
/// If the slope at `p = 0` is non-negative the minimum is at 0. Otherwise
/// golden-section search brackets the minimizer to `solver_tol`; should
/// that stall, bisection on the sign of the slope takes over.
pub fn joint_range_envelope(t: f64, alpha: Alpha, solver_tol: f64) -> Result<JointRangePoint> {
    let a = alpha.require_above_one()?;
    check_t(t)?;
    if !(solver_tol > 0.0) {
        return Err(Error::OutOfRange {
            name: "solver_tol",
            value: solver_tol,
            range: "(0, inf)",
        });
    }
    let bound = g_alpha(t, alpha)?;
    if t == 0.0 {
        return Ok(JointRangePoint {
            t,
            envelope: 0.0,
            bound,
            p_star: 0.0,
        });
    }
    let p_star = if psi_derivative(0.0, t, a) >= 0.0 {
        0.0
    } else {
        golden_section(|p| psi_unchecked(p, t, a), 0.0, 1.0 - t, solver_tol)
            .or_else(|| slope_bisection(|p| psi_derivative(p, t, a), 0.0, 1.0 - t, solver_tol))
            .ok_or(Error::SolverFailure {
                tolerance: solver_tol,
                width: f64::NAN,
            })?
    };
    let envelope = psi_unchecked(p_star, t, a).min(psi_unchecked(0.0, t, a));
    let p_star = if envelope == psi_unchecked(p_star, t, a) { p_star } else { 0.0 };
    Ok(JointRangePoint {
        t,
        envelope,
        bound,
        p_star,
    })
}

fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> Option<f64> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..GOLDEN_MAX_ITER {
        if hi - lo <= tol {
            let mid = 0.5 * (lo + hi);
            return Some(mid);
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    None
}

fn slope_bisection(df: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> Option<f64> {
    for _ in 0..BISECT_MAX_ITER {
        if hi - lo <= tol {
            return Some(0.5 * (lo + hi));
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if df(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    None
}

/// Convenience: `g_alpha(TV(p, q)) <= D_f(p || q)` slack, i.e.
/// `D_f - g_alpha(TV)`. Negative values would falsify the lower bound.
pub fn pinsker_slack(p: &Distribution, q: &Distribution, alpha: Alpha) -> Result<f64> {
    let t = tv(p, q)?;
    if t >= 1.0 {
        return Ok(f64::INFINITY);
    }
    Ok(f_alpha_div(p, q, alpha)? - g_alpha(t, alpha)?)
}
