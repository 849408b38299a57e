//! Acceptance criteria, one line per criterion. Exits nonzero if any fails.

use std::f64::consts::{FRAC_PI_2, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use hybrid_chsh::catstates::{equal_amplitude_cascade, herald_cat, split_cat};
use hybrid_chsh::chsh::{
    asymptotic_condition, chsh_value, conditions, low_efficiency_witness, s_max_atomic, s_max_closed,
    s_max_over_alpha, stationarity_residual, violation_threshold, FreeParam, OptimizerSettings, WitnessSearch,
};
use hybrid_chsh::coefficients::{optimal_bin, scenario_coefficients, QuadratureSettings};
use hybrid_chsh::oracle::{
    cat_norm_sqr, chsh_expectation, lossy_hybrid_state, noclick_operator, oracle_coefficients, p_threshold_operator,
    truncation_for, x_bin_operator,
};
use hybrid_chsh::{ChannelSpec, Coefficients, LossConvention, Result, Scenario, ScenarioKind, StateSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn photocount_max() -> Result<Outcome> {
    let settings = OptimizerSettings::default();
    let half = s_max_over_alpha(&ChannelSpec::lossless(), Scenario::photocount(LossConvention::HalfExponent), &settings)?;
    let born = s_max_over_alpha(&ChannelSpec::lossless(), Scenario::photocount(LossConvention::BornRule), &settings)?;
    let pass = within(half.s_value, 2.324, 0.005) && within(half.alpha_opt, 2.1, 0.1);
    outcome(
        pass,
        format!(
            "half-exponent S={:.4} alpha={:.3} (want 2.324±0.005 @ 2.1±0.1); born-rule S={:.4} alpha={:.3}",
            half.s_value, half.alpha_opt, born.s_value, born.alpha_opt
        ),
    )
}

fn photocount_threshold() -> Result<Outcome> {
    let th = violation_threshold(
        Scenario::photocount(LossConvention::BornRule),
        FreeParam::TLine,
        &ChannelSpec::lossless(),
        &OptimizerSettings::default(),
    )?;
    outcome(
        within(th.value, 0.522, 0.005),
        format!("t_line threshold {:.4} (want 0.522±0.005), S at bracket {:.12}/{:.12}", th.value, th.s_lo, th.s_hi),
    )
}

fn witnesses() -> Result<Outcome> {
    let settings = OptimizerSettings::default();
    let mut pass = true;
    let mut parts = Vec::new();
    for eta in [1.0, 0.1, 0.01, 0.001] {
        match low_efficiency_witness(eta, 1000.0, LossConvention::HalfExponent, &settings)? {
            WitnessSearch::Found(w) => {
                let needs_condition = eta < 0.05;
                let cond = asymptotic_condition(eta, w.alpha);
                let ok = w.s > 2.0 && (!needs_condition || cond);
                pass &= ok;
                parts.push(format!("eta={eta}: alpha={:.3} S-2={:.3e} cond={cond}", w.alpha, w.excess));
            }
            WitnessSearch::NotFound { predicted_alpha } => {
                pass = false;
                parts.push(format!("eta={eta}: none (predicted {predicted_alpha:?})"));
            }
        }
    }
    outcome(pass, parts.join("; "))
}

fn two_homodyne_max() -> Result<Outcome> {
    let r = s_max_over_alpha(&ChannelSpec::lossless(), Scenario::two_homodyne(), &OptimizerSettings::default())?;
    outcome(
        within(r.s_value, 2.29, 0.005),
        format!("S={:.4} alpha={:.3} (want 2.29±0.005)", r.s_value, r.alpha_opt),
    )
}

fn two_homodyne_threshold() -> Result<Outcome> {
    let th = violation_threshold(
        Scenario::two_homodyne(),
        FreeParam::TLine,
        &ChannelSpec::lossless(),
        &OptimizerSettings::default(),
    )?;
    outcome(
        within(th.value, 0.678, 0.003),
        format!("t_line threshold {:.4} (want 0.678±0.003)", th.value),
    )
}

fn alpha_opt_behaviour() -> Result<Outcome> {
    let settings = OptimizerSettings::default();
    let opt = |t: f64| -> Result<f64> {
        let ch = ChannelSpec::new(t, 1.0, 1.0)?;
        Ok(s_max_over_alpha(&ch, Scenario::two_homodyne(), &settings)?.alpha_opt)
    };
    let typical: Vec<(f64, f64)> = [0.75, 0.85, 0.95]
        .iter()
        .map(|&t| Ok((t, opt(t)?)))
        .collect::<Result<_>>()?;
    let in_range = typical.iter().all(|&(_, a)| (2.1..=3.1).contains(&a));
    let sweep: Vec<f64> = (0..=322).map(|i| 0.678 + i as f64 * 0.001).collect();
    let alphas: Vec<f64> = sweep.par_iter().map(|&t| opt(t.min(1.0))).collect::<Result<_>>()?;
    let (imax, amax) = alphas
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |(bi, ba), (i, &a)| if a > ba { (i, a) } else { (bi, ba) });
    let shown: Vec<String> = typical.iter().map(|(t, a)| format!("T={t}:{a:.3}")).collect();
    outcome(
        in_range && amax <= 10.0,
        format!("{} (want [2.1,3.1]); max alpha_opt {:.3} at T={:.3} (want <=10)", shown.join(" "), amax, sweep[imax]),
    )
}

fn atomic_threshold() -> Result<Outcome> {
    let settings = OptimizerSettings::default();
    let at_one = violation_threshold(Scenario::two_homodyne(), FreeParam::EtaA, &ChannelSpec::lossless(), &settings)?;
    let ts: Vec<f64> = (0..21).map(|i| 0.70 + 0.015 * i as f64).collect();
    let boundary: Vec<(f64, f64)> = ts
        .par_iter()
        .map(|&t| {
            let fixed = ChannelSpec::new(t.min(1.0), 1.0, 1.0)?;
            Ok((t, violation_threshold(Scenario::two_homodyne(), FreeParam::EtaA, &fixed, &settings)?.value))
        })
        .collect::<Result<_>>()?;
    let worst = boundary
        .iter()
        .map(|&(t, e)| e * t)
        .fold(f64::INFINITY, f64::min);
    // Sanity: the optimized S just above the threshold at T = 1 violates.
    let above = s_max_atomic(&ChannelSpec::new(1.0, 1.0, (at_one.hi + 0.001).min(1.0))?, &settings)?;
    outcome(
        within(at_one.value, 0.817, 0.005) && worst > 2.0 / 3.0 && above.s_value > 2.0,
        format!(
            "eta_a threshold at T=1 {:.4} (want 0.817±0.005); min eta_a*T over 21 points {:.4} (want >2/3)",
            at_one.value, worst
        ),
    )
}

#[derive(Clone, Copy)]
struct Tuple {
    alpha: f64,
    nu: f64,
    gamma: f64,
    b: f64,
    channel: ChannelSpec,
    kind: ScenarioKind,
}

fn oracle_chsh(t: &Tuple, n: usize) -> Result<f64> {
    let hybrid = lossy_hybrid_state(&StateSpec::new(t.nu, t.alpha)?, t.channel.t_line, Some(n))?;
    let b0 = x_bin_operator(t.b, n)?;
    let b1 = match t.kind {
        ScenarioKind::Photocount => noclick_operator(t.channel.eta, n)?,
        ScenarioKind::TwoHomodyne => p_threshold_operator((t.channel.t_line / 2.0).sqrt() * t.alpha, n)?,
    };
    chsh_expectation(&hybrid, t.gamma, &b0, &b1)
}

fn oracle_equivalence() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let tuples: Vec<Tuple> = (0..50)
        .map(|i| {
            let alpha = rng.random_range(0.1..=3.5);
            let t_line = rng.random_range(0.0..=1.0);
            let b = if i % 3 == 0 {
                rng.random_range(0.2..3.0)
            } else {
                optimal_bin(alpha, t_line).unwrap_or(1.0).min(10.0)
            };
            Tuple {
                alpha,
                nu: rng.random_range(0.0..=FRAC_PI_2),
                gamma: rng.random_range(-PI..PI),
                b,
                channel: ChannelSpec {
                    t_line,
                    eta: rng.random_range(0.0..=1.0),
                    eta_a: 1.0,
                },
                kind: if i % 2 == 0 {
                    ScenarioKind::Photocount
                } else {
                    ScenarioKind::TwoHomodyne
                },
            }
        })
        .collect();
    let rows: Vec<[f64; 3]> = tuples
        .par_iter()
        .map(|t| {
            let q = QuadratureSettings::default();
            let a = scenario_coefficients(t.alpha, &t.channel, t.kind, LossConvention::BornRule, t.b, &q)?;
            let n = truncation_for(t.alpha);
            let o = oracle_coefficients(t.alpha, &t.channel, t.kind, t.b, Some(n))?;
            let s = oracle_chsh(t, n)?;
            let s2 = oracle_chsh(t, 2 * n)?;
            let o2 = oracle_coefficients(t.alpha, &t.channel, t.kind, t.b, Some(2 * n))?;
            let coeff_dev = (a.c1 - o.c1).abs().max((a.c2 - o.c2).abs()).max((a.c3 - o.c3).abs());
            let chsh_dev = (chsh_value(&a, t.nu, t.gamma) - s).abs();
            let trunc = (s2 - s)
                .abs()
                .max((o2.c1 - o.c1).abs())
                .max((o2.c2 - o.c2).abs())
                .max((o2.c3 - o.c3).abs());
            Ok([coeff_dev, chsh_dev, trunc])
        })
        .collect::<Result<_>>()?;
    let max = |k: usize| rows.iter().fold(0.0f64, |m, r| m.max(r[k]));
    let (c, s, tr) = (max(0), max(1), max(2));
    outcome(
        c <= 1e-6 && s <= 1e-6 && tr <= 1e-8,
        format!("50 tuples: max coeff dev {c:.2e}, CHSH dev {s:.2e} (want <=1e-6); doubling {tr:.2e} (want <=1e-8)"),
    )
}

fn closed_form_properties() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let q = QuadratureSettings::default();
    let mut coeffs: Vec<Coefficients> = Vec::with_capacity(10_000);
    for i in 0..10_000 {
        if i % 2 == 0 {
            coeffs.push(Coefficients::new(
                rng.random_range(-1.0..=1.0),
                rng.random_range(-1.0..=1.0),
                rng.random_range(-1.0..=1.0),
            ));
        } else {
            let alpha = rng.random_range(0.05..6.0);
            let ch = ChannelSpec::new(rng.random_range(0.0..=1.0), rng.random_range(0.0..=1.0), 1.0)?;
            let kind = if i % 4 == 1 {
                ScenarioKind::Photocount
            } else {
                ScenarioKind::TwoHomodyne
            };
            let b = optimal_bin(alpha, ch.t_line).unwrap_or(f64::INFINITY);
            coeffs.push(scenario_coefficients(alpha, &ch, kind, LossConvention::BornRule, b, &q)?);
        }
    }
    let seeds: Vec<u64> = (0..coeffs.len()).map(|_| rng.random()).collect();
    let rows: Vec<(f64, f64, bool)> = coeffs
        .par_iter()
        .zip(&seeds)
        .map(|(c, &seed)| {
            let m = s_max_closed(c);
            let stat = if m.interior {
                stationarity_residual(c, m.nu_opt).abs()
            } else {
                0.0
            };
            let mut local = ChaCha8Rng::seed_from_u64(seed);
            let mut over = 0.0f64;
            for _ in 0..1000 {
                let nu = local.random_range(0.0..=FRAC_PI_2);
                let gamma = local.random_range(-PI..PI);
                over = over.max(chsh_value(c, nu, gamma) - m.s);
            }
            let (c1, c2) = conditions(c);
            (stat, over, m.s <= 2.0 || (c1 && c2))
        })
        .collect();
    let stat = rows.iter().fold(0.0f64, |m, r| m.max(r.0));
    let over = rows.iter().fold(0.0f64, |m, r| m.max(r.1));
    let implied = rows.iter().filter(|r| !r.2).count();
    outcome(
        stat <= 1e-10 && over <= 1e-12 && implied == 0,
        format!(
            "10^4 tuples: stationarity {stat:.2e} (want <=1e-10), dominance excess {over:.2e}, S>2 without C1&C2: {implied}"
        ),
    )
}

fn cat_suite() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut norm_dev = 0.0f64;
    for _ in 0..40 {
        let state = StateSpec::new(rng.random_range(0.0..=FRAC_PI_2), rng.random_range(0.0..6.0))?;
        let cat = herald_cat(&state)?;
        let n = truncation_for(cat.alpha.norm());
        let fock = cat_norm_sqr(cat.nu, cat.alpha, n)?.powf(-0.5);
        norm_dev = norm_dev.max((fock - cat.norm).abs());
    }
    let cat = herald_cat(&StateSpec::new(0.6, 3.0)?)?;
    let (mut spread, mut energy) = (0.0f64, 0.0f64);
    for n in 2..=12 {
        let split = split_cat(&cat, &equal_amplitude_cascade(n)?);
        spread = spread.max(split.amplitude_spread());
        energy = energy.max(split.energy_residual().abs());
    }
    outcome(
        norm_dev <= 1e-8 && spread <= 1e-12 && energy <= 1e-12,
        format!("N vs oracle {norm_dev:.2e} (want <=1e-8); spread {spread:.2e}, energy {energy:.2e} (want <=1e-12)"),
    )
}

type Criterion = (u32, &'static str, Duration, fn() -> Result<Outcome>);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (1, "photocount maximum (half-exponent)", Duration::from_secs(5), photocount_max),
        (2, "photocount transmission threshold", Duration::from_secs(30), photocount_threshold),
        (3, "low-efficiency witnesses", Duration::from_secs(60), witnesses),
        (4, "two-homodyne maximum", Duration::from_secs(5), two_homodyne_max),
        (5, "two-homodyne transmission threshold", Duration::from_secs(30), two_homodyne_threshold),
        (6, "alpha_opt behaviour", Duration::from_secs(60), alpha_opt_behaviour),
        (7, "atomic-efficiency threshold", Duration::from_secs(120), atomic_threshold),
        (8, "oracle equivalence", Duration::from_secs(120), oracle_equivalence),
        (9, "closed-form optimizer properties", Duration::from_secs(60), closed_form_properties),
        (10, "cat-state suite", Duration::from_secs(10), cat_suite),
    ];
    let mut failed = 0;
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let (pass, detail) = match result {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let in_time = elapsed <= budget;
        let ok = pass && in_time;
        if !ok {
            failed += 1;
        }
        println!(
            "[{}] {id:>2} {name}: {detail} | {:.2}s (budget {}s{})",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs(),
            if in_time { "" } else { ", exceeded" }
        );
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
