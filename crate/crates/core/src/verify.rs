//! Seeded cross-check suites: closed-form results against the Fock-space oracle
//! and against their own algebraic invariants.
//!
//! Samples are drawn sequentially from a ChaCha stream and then evaluated in
//! parallel, so a report depends only on the seed and sample count.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::catstates::{equal_amplitude_cascade, herald_cat, heralding_probability, split_cat, CascadeSpec};
use crate::chsh::{chsh_value, conditions, s_max_closed, stationarity_residual};
use crate::coefficients::{optimal_bin, scenario_coefficients, QuadratureSettings};
use crate::error::Result;
use crate::model::{ChannelSpec, Coefficients, LossConvention, ScenarioKind, StateSpec};
use crate::oracle::{
    beamsplitter_reduced_density, cat_norm_sqr, chsh_expectation, heralding_probability_fock, lossy_hybrid_state,
    noclick_operator, oracle_coefficients, p_threshold_operator, truncation_for, x_bin_operator, FockOperator,
};

/// Largest amplitude drawn for oracle comparisons.
pub const ORACLE_ALPHA_MAX: f64 = 3.5;

pub const COEFFICIENT_TOL: f64 = 1e-8;
pub const CHSH_TOL: f64 = 1e-6;
pub const TRUNCATION_TOL: f64 = 1e-8;
pub const STATIONARITY_TOL: f64 = 1e-10;
pub const IDENTITY_TOL: f64 = 1e-12;
/// Slack allowed when a random `(ν, γ)` is compared with the closed-form maximum.
pub const DOMINANCE_SLACK: f64 = 1e-12;
pub const OPERATOR_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub samples: usize,
    /// Multiplies every tolerance. A negative value makes every check fail,
    /// which is how the harness tests itself.
    pub tolerance_scale: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 20,
            tolerance_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub deviation: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.deviation <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn max_deviation(&self) -> f64 {
        self.checks.iter().fold(0.0, |m, c| m.max(c.deviation))
    }

    /// Worst check per name, in first-appearance order.
    pub fn summary(&self) -> Vec<Check> {
        let mut out: Vec<Check> = Vec::new();
        for c in &self.checks {
            match out.iter_mut().find(|o| o.name == c.name) {
                Some(o) if c.deviation > o.deviation || (!c.passed() && o.passed()) => *o = c.clone(),
                Some(_) => {}
                None => out.push(c.clone()),
            }
        }
        out
    }
}

struct Collector {
    scale: f64,
    checks: Vec<Check>,
}

impl Collector {
    fn new(scale: f64) -> Self {
        Self {
            scale,
            checks: Vec::new(),
        }
    }

    fn push(&mut self, name: &'static str, deviation: f64, tolerance: f64) {
        // NaN deviations must fail.
        let deviation = if deviation.is_nan() { f64::INFINITY } else { deviation };
        self.checks.push(Check {
            name,
            deviation,
            tolerance: tolerance * self.scale,
        });
    }

    fn finish(self, suite: &'static str) -> SuiteReport {
        SuiteReport {
            suite,
            checks: self.checks,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Tuple {
    alpha: f64,
    nu: f64,
    gamma: f64,
    channel: ChannelSpec,
    kind: ScenarioKind,
    b: f64,
}

fn draw_tuple(rng: &mut ChaCha8Rng, kind: ScenarioKind) -> Tuple {
    let alpha = rng.random_range(0.1..ORACLE_ALPHA_MAX);
    let t_line = rng.random_range(0.0..=1.0);
    let eta = rng.random_range(0.0..=1.0);
    let b = if rng.random_bool(0.5) {
        optimal_bin(alpha, t_line).unwrap_or(1.0).min(10.0)
    } else {
        rng.random_range(0.2..3.0)
    };
    Tuple {
        alpha,
        nu: rng.random_range(0.0..=FRAC_PI_2),
        gamma: rng.random_range(-PI..PI),
        channel: ChannelSpec {
            t_line,
            eta,
            eta_a: 1.0,
        },
        kind,
        b,
    }
}

fn draw_tuples(rng: &mut ChaCha8Rng, n: usize) -> Vec<Tuple> {
    (0..n)
        .map(|i| {
            let kind = if i % 2 == 0 {
                ScenarioKind::Photocount
            } else {
                ScenarioKind::TwoHomodyne
            };
            draw_tuple(rng, kind)
        })
        .collect()
}

fn analytic(t: &Tuple) -> Result<Coefficients> {
    scenario_coefficients(
        t.alpha,
        &t.channel,
        t.kind,
        LossConvention::BornRule,
        t.b,
        &QuadratureSettings::default(),
    )
}

fn b1_operator(t: &Tuple, n_max: usize) -> Result<FockOperator> {
    match t.kind {
        ScenarioKind::Photocount => noclick_operator(t.channel.eta, n_max),
        ScenarioKind::TwoHomodyne => p_threshold_operator(
            t.channel.t_line.sqrt() * t.alpha / std::f64::consts::SQRT_2,
            n_max,
        ),
    }
}

/// Oracle CHSH at the tuple's `(ν, γ)` with truncation `n_max`.
fn oracle_chsh(t: &Tuple, n_max: usize) -> Result<f64> {
    let state = StateSpec::new(t.nu, t.alpha)?;
    let hybrid = lossy_hybrid_state(&state, t.channel.t_line, Some(n_max))?;
    let b0 = x_bin_operator(t.b, n_max)?;
    let b1 = b1_operator(t, n_max)?;
    chsh_expectation(&hybrid, t.gamma, &b0, &b1)
}

fn coefficient_deviations(a: &Coefficients, o: &Coefficients) -> [f64; 3] {
    [(a.c1 - o.c1).abs(), (a.c2 - o.c2).abs(), (a.c3 - o.c3).abs()]
}

/// Analytic coefficients against the oracle on random tuples.
pub fn coefficients_suite(config: &VerifyConfig) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let tuples = draw_tuples(&mut rng, config.samples);
    let rows: Vec<Result<(Coefficients, Coefficients)>> = tuples
        .par_iter()
        .map(|t| Ok((analytic(t)?, oracle_coefficients(t.alpha, &t.channel, t.kind, t.b, None)?)))
        .collect();
    let mut col = Collector::new(config.tolerance_scale);
    for row in rows {
        let (a, o) = row?;
        let [d1, d2, d3] = coefficient_deviations(&a, &o);
        col.push("c1 vs oracle", d1, COEFFICIENT_TOL);
        col.push("c2 vs oracle", d2, COEFFICIENT_TOL);
        col.push("c3 vs oracle", d3, COEFFICIENT_TOL);
        let over = [a.c1, a.c2, a.c3].iter().fold(0.0f64, |m, c| m.max(c.abs() - 1.0));
        col.push("|c_i| <= 1", over.max(0.0), IDENTITY_TOL);
    }
    Ok(col.finish("coefficients"))
}

/// Closed-form maximization invariants on random coefficient triples.
pub fn chsh_suite(config: &VerifyConfig) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(1));
    let mut col = Collector::new(config.tolerance_scale);
    let n = config.samples * 50;
    for _ in 0..n {
        let c = Coefficients::new(
            rng.random_range(-1.0..=1.0),
            rng.random_range(-1.0..=1.0),
            rng.random_range(-1.0..=1.0),
        );
        let m = s_max_closed(&c);
        if m.interior {
            col.push("stationarity at nu_opt", stationarity_residual(&c, m.nu_opt).abs(), STATIONARITY_TOL);
        }
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let nu = rng.random_range(0.0..=FRAC_PI_2);
            let gamma = rng.random_range(-PI..PI);
            worst = worst.max(chsh_value(&c, nu, gamma) - m.s);
        }
        col.push("S_max dominates random (nu, gamma)", worst.max(0.0), DOMINANCE_SLACK);
        let (c1_ok, c2_ok) = conditions(&c);
        let implied = m.s <= 2.0 || (c1_ok && c2_ok);
        col.push("S > 2 implies C1 and C2", if implied { 0.0 } else { m.s - 2.0 }, 0.0);
        col.push("S <= Tsirelson", (m.s - crate::chsh::TSIRELSON).max(0.0), IDENTITY_TOL);
    }
    Ok(col.finish("chsh"))
}

/// Operator sanity, full CHSH assembly against the oracle, truncation
/// convergence and the rank-2 loss shortcut.
pub fn oracle_suite(config: &VerifyConfig) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(2));
    let tuples = draw_tuples(&mut rng, config.samples);
    let doubling_count = config.samples.min(4);
    let rows: Vec<Result<(f64, f64, Option<f64>)>> = tuples
        .par_iter()
        .enumerate()
        .map(|(i, t)| {
            let n = truncation_for(t.alpha);
            let c = analytic(t)?;
            let expected = chsh_value(&c, t.nu, t.gamma);
            let got = oracle_chsh(t, n)?;
            let doubled = if i < doubling_count {
                Some((oracle_chsh(t, 2 * n)? - got).abs())
            } else {
                None
            };
            Ok((expected, got, doubled))
        })
        .collect();
    let mut col = Collector::new(config.tolerance_scale);
    for row in rows {
        let (expected, got, doubled) = row?;
        col.push("CHSH assembly vs oracle", (expected - got).abs(), CHSH_TOL);
        if let Some(d) = doubled {
            col.push("truncation doubling", d, TRUNCATION_TOL);
        }
    }

    let b = rng.random_range(0.3..2.0);
    let thr = rng.random_range(-1.0..2.0);
    let eta = rng.random_range(0.0..=1.0);
    let n = 30;
    for op in [x_bin_operator(b, n)?, p_threshold_operator(thr, n)?, noclick_operator(eta, n)?] {
        col.push("operator hermiticity", op.hermiticity_defect(), OPERATOR_TOL);
        let (lo, hi) = op.spectral_bounds();
        col.push("spectrum within [-1, 1]", (hi - 1.0).max(-1.0 - lo).max(0.0), OPERATOR_TOL);
    }
    // Projective only up to the truncation edge; the no-click observable is not projective.
    let wide = x_bin_operator(40.0, n)?;
    col.push("wide bin is projective", wide.projector_defect(), OPERATOR_TOL);

    let small = StateSpec::new(rng.random_range(0.0..=FRAC_PI_2), rng.random_range(0.1..1.0))?;
    let t_line = rng.random_range(0.0..=1.0);
    let full = beamsplitter_reduced_density(&small, t_line, 20)?;
    let short = lossy_hybrid_state(&small, t_line, Some(20))?.density();
    let dev = (full - short).iter().fold(0.0f64, |m, z| m.max(z.norm()));
    col.push("rank-2 loss vs beamsplitter", dev, OPERATOR_TOL);
    Ok(col.finish("fock-oracle"))
}

/// Cat normalization and heralding against the oracle, cascade identities.
pub fn catstates_suite(config: &VerifyConfig) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(3));
    let mut col = Collector::new(config.tolerance_scale);
    for _ in 0..config.samples {
        let state = StateSpec::new(rng.random_range(0.0..=FRAC_PI_2), rng.random_range(0.0..6.0))?;
        let cat = herald_cat(&state)?;
        let n = truncation_for(cat.alpha.norm());
        let fock = cat.norm * cat.norm * cat_norm_sqr(cat.nu, cat.alpha, n)?;
        col.push("cat norm vs oracle", (fock - 1.0).abs(), COEFFICIENT_TOL);
        let p = heralding_probability(&state)?;
        let p_fock = heralding_probability_fock(&state, None)?;
        col.push("heralding probability vs oracle", (p - p_fock).abs(), COEFFICIENT_TOL);

        let k = rng.random_range(1..6);
        let ts: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..=1.0)).collect();
        let split = split_cat(&cat, &CascadeSpec::new(ts)?);
        col.push("energy identity (random cascade)", split.energy_residual().abs(), IDENTITY_TOL);
        let mixed = split
            .plus
            .iter()
            .zip(&split.minus)
            .fold(0.0f64, |m, (p, q)| m.max((p + q).norm()));
        col.push("branches globally opposite", mixed, 0.0);
    }
    let cat = herald_cat(&StateSpec::new(0.5, 2.0)?)?;
    for n_modes in 2..=12 {
        let split = split_cat(&cat, &equal_amplitude_cascade(n_modes)?);
        col.push("equal-amplitude spread", split.amplitude_spread(), IDENTITY_TOL);
        col.push("equal-amplitude energy identity", split.energy_residual().abs(), IDENTITY_TOL);
        let target = (1.0 / n_modes as f64).sqrt();
        let off = split.factors.iter().fold(0.0f64, |m, f| m.max((f - target).abs()));
        col.push("equal amplitude is 1/sqrt(N)", off, IDENTITY_TOL);
    }
    Ok(col.finish("catstates"))
}

pub fn run_all(config: &VerifyConfig) -> Result<Vec<SuiteReport>> {
    Ok(vec![
        coefficients_suite(config)?,
        chsh_suite(config)?,
        oracle_suite(config)?,
        catstates_suite(config)?,
    ])
}

/// Plain-text report; byte-identical for identical configs.
pub fn format_report(config: &VerifyConfig, reports: &[SuiteReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "verify seed={} samples={}", config.seed, config.samples);
    for r in reports {
        let status = if r.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(
            out,
            "suite {}: {} checks={} max_deviation={:.3e}",
            r.suite,
            status,
            r.checks.len(),
            r.max_deviation()
        );
        for c in r.summary() {
            let mark = if c.passed() { "ok" } else { "FAILED" };
            let _ = writeln!(
                out,
                "  {:<36} max={:.3e} tol={:.1e} {}",
                c.name, c.deviation, c.tolerance, mark
            );
        }
    }
    let all = reports.iter().all(SuiteReport::passed);
    let _ = writeln!(out, "overall: {}", if all { "PASS" } else { "FAIL" });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> VerifyConfig {
        VerifyConfig {
            seed: 7,
            samples: 2,
            tolerance_scale: 1.0,
        }
    }

    #[test]
    fn chsh_suite_passes() {
        let r = chsh_suite(&tiny()).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn catstates_suite_passes() {
        assert!(catstates_suite(&tiny()).unwrap().passed());
    }

    #[test]
    fn corrupted_tolerance_fails() {
        let cfg = VerifyConfig {
            tolerance_scale: -1.0,
            ..tiny()
        };
        assert!(!catstates_suite(&cfg).unwrap().passed());
    }

    #[test]
    fn nan_deviation_fails() {
        let mut c = Collector::new(1.0);
        c.push("x", f64::NAN, 1.0);
        assert!(!c.finish("s").passed());
    }
}
