//! Acceptance suite: one PASS/FAIL line per criterion on stdout, non-zero
//! exit when any criterion fails. Runs without the libtest harness so the
//! lines are shown by a plain `cargo test`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sdpi_cli::commands::{cmd_amplify, cmd_sweep_n};
use sdpi_core::contraction::{appendix_b_pair, cross_channel_gamma, prop1_no_contraction, renyi_ratio, InputSet};
use sdpi_core::divergences::{d_infinity, f_alpha_div, f_alpha_via_egamma, tv};
use sdpi_core::inequalities::{g_alpha, joint_range_envelope, pair_gamma, renyi_scaled_r_alpha, reverse_pinsker};
use sdpi_core::oracle::{envelope_grid, eta_grid, naive_f_alpha};
use sdpi_core::privacy::{
    block_uniform_channel, block_uniform_gamma, default_alpha_grid, randomized_response, EtaTvMode,
};
use sdpi_core::{Alpha, Channel, Distribution};

type Check = Result<String, String>;

fn alpha(a: f64) -> Alpha {
    Alpha::new(a).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn normalize(w: Vec<f64>) -> Distribution {
    let s: f64 = w.iter().sum();
    Distribution::new(w.into_iter().map(|x| x / s).collect()).unwrap()
}

// exponential weights; with `zeros` about a fifth of the entries vanish
fn random_dist(rng: &mut ChaCha8Rng, n: usize, zeros: bool) -> Distribution {
    loop {
        let w: Vec<f64> = (0..n)
            .map(|_| {
                if zeros && rng.random::<f64>() < 0.2 {
                    0.0
                } else {
                    -(1.0 - rng.random::<f64>()).ln() + 1e-3
                }
            })
            .collect();
        if w.iter().any(|&x| x > 0.0) {
            return normalize(w);
        }
    }
}

/// `p` may have zeros, `q` has full support, so every divergence is finite.
fn random_pair(rng: &mut ChaCha8Rng) -> (Distribution, Distribution) {
    let n = rng.random_range(2..=6);
    (random_dist(rng, n, true), random_dist(rng, n, false))
}

fn tgrid() -> Vec<f64> {
    (0..200).map(|i| 0.995 * i as f64 / 199.0).collect()
}

fn three_singular() -> Channel {
    let t = 1.0 / 3.0;
    Channel::new(vec![
        vec![t, t, t, 0.0],
        vec![t, t, 0.0, t],
        vec![t, 0.0, t, t],
        vec![0.0, t, t, t],
    ])
    .unwrap()
}

fn two_block() -> Channel {
    Channel::new(vec![
        vec![0.5, 0.5, 0.0, 0.0],
        vec![0.5, 0.5, 0.0, 0.0],
        vec![0.0, 0.0, 0.5, 0.5],
        vec![0.0, 0.0, 0.5, 0.5],
    ])
    .unwrap()
}

const PINSKER_ALPHAS: [f64; 6] = [1.5, 2.0, 3.0, 4.0, 8.0, 32.0];

fn ac1_joint_range_tightness() -> Check {
    let mut worst: f64 = 0.0;
    for a in [1.5, 4.0, 8.0, 2.0] {
        for t in tgrid() {
            if a != 2.0 && t < 1.0 / a {
                continue;
            }
            let pt = joint_range_envelope(t, alpha(a), 1e-10).map_err(|e| format!("a={a} t={t}: {e}"))?;
            let dev = (pt.envelope - pt.bound).abs() / pt.bound.max(1.0);
            worst = worst.max(dev);
            ensure(dev <= 1e-7, || format!("a={a} t={t}: envelope {} vs g {}", pt.envelope, pt.bound))?;
        }
    }
    Ok(format!("max scaled deviation {worst:.2e}"))
}

fn ac2_pinsker() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = f64::INFINITY;
    for a in PINSKER_ALPHAS {
        for i in 0..10_000 {
            let (p, q) = random_pair(&mut rng);
            let f = f_alpha_div(&p, &q, alpha(a)).unwrap();
            let g = g_alpha(tv(&p, &q).unwrap(), alpha(a)).unwrap();
            // relative slack for the large values reached at a = 32
            let slack = 1e-10 * g.max(1.0);
            worst = worst.min((f - g) / g.max(1.0));
            ensure(f >= g - slack, || format!("a={a} pair {i}: f={f} < g={g}"))?;
        }
    }
    Ok(format!("0 violations in 60000 pairs; min scaled slack {worst:.2e}"))
}

fn ac3_reverse_pinsker() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for a in PINSKER_ALPHAS {
        for i in 0..10_000 {
            let (p, q) = random_pair(&mut rng);
            let f = f_alpha_div(&p, &q, alpha(a)).unwrap();
            let b = reverse_pinsker(&p, &q, alpha(a), &pair_gamma(&p, &q).unwrap()).unwrap();
            ensure(b >= f - 1e-10 * f.max(1.0), || format!("a={a} pair {i}: bound {b} < f {f}"))?;
        }
    }
    Ok("0 violations in 60000 pairs".into())
}

fn ac4_large_order_limit() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    let mut accepted = 0;
    while accepted < 100 {
        let n = rng.random_range(2..=5);
        let (p, q) = (random_dist(&mut rng, n, false), random_dist(&mut rng, n, false));
        let g = pair_gamma(&p, &q).unwrap();
        if !(1.1..=10.0).contains(&g.gamma_max) {
            continue;
        }
        accepted += 1;
        let v = renyi_scaled_r_alpha(tv(&p, &q).unwrap(), &g, alpha(1000.0)).unwrap();
        let target = d_infinity(&p, &q).unwrap();
        let rel = (v - target).abs() / target;
        worst = worst.max(rel);
        ensure(rel <= 0.01, || format!("{v} vs log gamma_max {target}"))?;
    }
    Ok(format!("100 pairs with gamma_max in [1.1, 10]; max relative error {worst:.2e}"))
}

fn ac5_integral() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(2..=6);
        let (p, q) = (random_dist(&mut rng, n, false), random_dist(&mut rng, n, false));
        for a in [2.0, 4.0] {
            let direct = f_alpha_div(&p, &q, alpha(a)).unwrap();
            let via = f_alpha_via_egamma(&p, &q, alpha(a), 1e-6).map_err(|e| e.to_string())?;
            let rel = (via - direct).abs() / direct;
            worst = worst.max(rel);
            ensure(rel <= 1e-4, || format!("a={a}: {via} vs {direct}"))?;
        }
    }
    Ok(format!("max relative error {worst:.2e}"))
}

fn ac6_prop1() -> Check {
    let q = two_block();
    let (pin, qin) = appendix_b_pair(&q, 0, 2, 1e-6).unwrap();
    let mut ratios = Vec::new();
    for a in [2.0, 4.0, 16.0] {
        let r = renyi_ratio(&q, &pin, &qin, alpha(a)).unwrap().ok_or("zero input divergence")?;
        ensure(r >= 0.99, || format!("Q ratio at a={a} is {r}"))?;
        ratios.push(r);
    }
    let p = three_singular();
    ensure(!prop1_no_contraction(&p), || "P reported as non-contracting".into())?;
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for j in i + 1..4 {
            let sub = p.restrict_inputs(&[i, j]).unwrap();
            let e = eta_grid(&sub, 2.0, 50).unwrap();
            worst = worst.max(e);
            ensure(e <= 1.0 + 1e-9, || format!("P rows ({i},{j}): eta_grid {e}"))?;
        }
    }
    Ok(format!("Q ratios {ratios:.6?}; P binary eta_grid max {worst:.4}"))
}

fn ac7_closed_form() -> Check {
    for (m, k, eps) in [(2usize, 2usize, 2f64.ln()), (2, 50, 10f64.ln()), (10, 10, 6f64.ln())] {
        let mech = randomized_response(m * k, eps).unwrap();
        let got = cross_channel_gamma(&block_uniform_channel(m, k).unwrap(), &InputSet::rows_of(&mech)).unwrap();
        let want = block_uniform_gamma(eps, k);
        let expected = 1.0 + eps.exp_m1() / k as f64;
        ensure((want.gamma_max - expected).abs() < 1e-15, || "closed form helper".into())?;
        ensure(
            (got.gamma_max - expected).abs() <= 1e-9 && (got.gamma_min - 1.0 / expected).abs() <= 1e-9,
            || format!("(m,k)=({m},{k}): got ({}, {}), want ({expected}, {})", got.gamma_max, got.gamma_min, 1.0 / expected),
        )?;
    }
    Ok("3 configurations within 1e-9".into())
}

fn ac8_amplification_sweep() -> Check {
    let grid = default_alpha_grid();
    let mut notes = Vec::new();
    for (n, eps, k) in [(4usize, 2f64.ln(), 2usize), (20, 10f64.ln(), 2), (100, 10f64.ln(), 50)] {
        let t = cmd_amplify(n, eps, k, &grid, EtaTvMode::AssumeOne).map_err(|e| e.to_string())?;
        ensure(t.rows.len() == 50, || format!("{} rows", t.rows.len()))?;
        let alphas = t.column("alpha").unwrap();
        let mech = t.column("rldp_mechanism").unwrap();
        let comp = t.column("rldp_composed_true").unwrap();
        let phi = t.column("phi_bound").unwrap();
        for i in 0..alphas.len() {
            ensure(comp[i] <= mech[i] * (1.0 + 1e-12), || format!("n={n} a={}: composed > mechanism", alphas[i]))?;
            ensure(comp[i] <= phi[i] * (1.0 + 1e-12), || format!("n={n} a={}: composed > phi", alphas[i]))?;
        }
        let gaps: Vec<f64> = (0..alphas.len())
            .filter(|&i| alphas[i] >= 10.0)
            .map(|i| (phi[i] - comp[i]) / comp[i])
            .collect();
        ensure(gaps.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9)), || {
            format!("n={n}: relative gap not non-increasing over [10, 100]: {gaps:?}")
        })?;
        notes.push(format!("n={n}: gap {:.3} -> {:.3}", gaps[0], gaps[gaps.len() - 1]));
    }
    Ok(notes.join("; "))
}

fn ac9_perfect_privacy() -> Check {
    let t = cmd_sweep_n(2f64.ln(), 2, &[4, 8, 16, 32, 64, 128], alpha(4.0)).map_err(|e| e.to_string())?;
    let comp = t.column("rldp_composed_true").unwrap();
    let phi = t.column("phi_bound").unwrap();
    ensure(comp.windows(2).all(|w| w[1] < w[0]), || format!("composed not decreasing: {comp:?}"))?;
    ensure(phi.windows(2).all(|w| w[1] < w[0]), || format!("phi not decreasing: {phi:?}"))?;
    let ratio = comp[5] / comp[0];
    ensure(ratio < 0.25, || format!("n=128 / n=4 ratio {ratio}"))?;
    Ok(format!("composed n=128 / n=4 = {ratio:.2e}"))
}

fn ac10_oracles() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let orders = [1.5, 2.0, 4.0, 8.0, 32.0];
    let mut worst: f64 = 0.0;
    for i in 0..10_000 {
        let n = rng.random_range(2..=6);
        let (p, q) = (random_dist(&mut rng, n, false), random_dist(&mut rng, n, false));
        let a = orders[i % orders.len()];
        let naive = naive_f_alpha(p.probs(), q.probs(), a).unwrap();
        let main = f_alpha_div(&p, &q, alpha(a)).unwrap();
        let rel = (naive - main).abs() / main.max(1e-300);
        if main > 1e-6 {
            worst = worst.max(rel);
        }
        // tiny divergences are dominated by cancellation in the naive sum
        ensure(rel <= 1e-10 || (naive - main).abs() <= 1e-15, || format!("a={a}: naive {naive} vs {main}"))?;
    }
    let mut env_worst: f64 = 0.0;
    for a in [1.5, 2.0, 4.0, 8.0] {
        for t in [0.05, 0.2, 0.4, 0.6, 0.9] {
            let grid = envelope_grid(a, t, 10_000).unwrap();
            let main = joint_range_envelope(t, alpha(a), 1e-10).unwrap().envelope;
            let dev = (grid - main).abs();
            env_worst = env_worst.max(dev);
            ensure(dev <= 1e-5, || format!("a={a} t={t}: grid {grid} vs {main}"))?;
        }
    }
    Ok(format!("f_alpha max rel {worst:.2e}; envelope max abs {env_worst:.2e} over 20 points"))
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Check,
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "joint-range tightness", limit: Some(Duration::from_secs(10)), run: ac1_joint_range_tightness },
        Criterion { id: 2, name: "Pinsker validity", limit: Some(Duration::from_secs(30)), run: ac2_pinsker },
        Criterion { id: 3, name: "reverse Pinsker validity", limit: Some(Duration::from_secs(30)), run: ac3_reverse_pinsker },
        Criterion { id: 4, name: "large-order limit recovers D_inf", limit: None, run: ac4_large_order_limit },
        Criterion { id: 5, name: "E_gamma integral representation", limit: None, run: ac5_integral },
        Criterion { id: 6, name: "no contraction for incomplete confusion graph", limit: None, run: ac6_prop1 },
        Criterion { id: 7, name: "block-uniform closed-form gamma", limit: None, run: ac7_closed_form },
        Criterion { id: 8, name: "amplification sweep (RR + blocks)", limit: Some(Duration::from_secs(60)), run: ac8_amplification_sweep },
        Criterion { id: 9, name: "perfect privacy as n grows", limit: None, run: ac9_perfect_privacy },
        Criterion { id: 10, name: "oracle equivalence", limit: None, run: ac10_oracles },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match (outcome, c.limit) {
            (Ok(_), Some(limit)) if elapsed > limit => Err(format!("took {elapsed:.1?}, limit {limit:?}")),
            (o, _) => o,
        };
        let (status, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("acceptance {:>2} {status} {} [{elapsed:.2?}] {detail}", c.id, c.name);
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
