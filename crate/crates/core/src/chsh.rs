//! CHSH values and their layered optimization.
//!
//! With `A₀,₁ = cos γ σz ± sin γ σx` the CHSH expression reduces to
//! `S = 2cos γ⟨σz B₁⟩ + 2sin γ⟨σx B₀⟩`, where for the hybrid state
//! `⟨σz B₁⟩ = c₂cos²ν − c₃sin²ν` and `⟨σx B₀⟩ = 2c₁cos ν sin ν`. The maximum over γ
//! is the Euclidean norm of the two terms, and writing `S_γ = 2√f` with
//! `f = A sin⁴ν + B sin²ν + c₂²`, `A = (c₂+c₃)² − 4c₁²`, `B = 4c₁² − 2c₂(c₂+c₃)`
//! gives the maximum over ν in closed form. The bin half-width is fixed at
//! [`optimal_bin`](crate::coefficients::optimal_bin) and only `|α|` is searched
//! numerically.
//!
//! Violation is judged on the cancellation-free excess `S − 2` against
//! [`VIOLATION_RESOLUTION`]. Near the transmission thresholds the excess decays
//! super-exponentially with `|α|`; for photocounting (Born rule) a violation
//! persists for every `T > 1/2` and for two homodyne measurements for every
//! `T > 2/3` as `|α| → ∞`, but it drops below one ulp of 2.0 at `T ≈ 0.522`
//! and `T ≈ 0.678` respectively. Those are the thresholds reported here.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use rayon::prelude::*;

use crate::coefficients::{c1_at_optimal_bin, scenario_coefficients, QuadratureSettings};
use crate::error::{Error, Result};
use crate::model::{ChannelSpec, ChshResult, Coefficients, LossConvention, Scenario, ScenarioKind};
use crate::search::{bisect_predicate, golden_max, local_maxima};

pub const TSIRELSON: f64 = 2.0 * std::f64::consts::SQRT_2;

/// Smallest `S − 2` counted as a violation: one unit in the last place of 2.0.
pub const VIOLATION_RESOLUTION: f64 = 2.0 * f64::EPSILON;

/// Absolute tolerance on the free parameter for [`violation_threshold`].
pub const THRESHOLD_TOL: f64 = 1e-4;

/// Allowed `|∂S/∂ν|` (up to a factor 4) at an interior atomic-path optimum.
const STATIONARITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerSettings {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub alpha_step: f64,
    /// Golden-section tolerance in `|α|`; also the S tie tolerance between local maxima.
    pub refine_tol: f64,
    /// Dense ν grid size for the inefficient-atom path.
    pub nu_grid_points: usize,
    pub quadrature: QuadratureSettings,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            alpha_min: 0.05,
            alpha_max: 12.0,
            alpha_step: 0.05,
            refine_tol: 1e-6,
            nu_grid_points: 2001,
            quadrature: QuadratureSettings::default(),
        }
    }
}

impl OptimizerSettings {
    pub fn with_alpha_max(mut self, alpha_max: f64) -> Self {
        self.alpha_max = alpha_max;
        self
    }

    pub fn validate(self) -> Result<Self> {
        let grid_ok = self.alpha_min >= 0.0 && self.alpha_step > 0.0 && self.alpha_max > self.alpha_min;
        if !grid_ok {
            return Err(Error::EmptyGrid);
        }
        if !(self.refine_tol > 0.0) || self.nu_grid_points < 2 {
            return Err(Error::Invalid("refine_tol must be > 0 and nu_grid_points >= 2".into()));
        }
        self.quadrature.validate()?;
        Ok(self)
    }

    /// Grid `alpha_min, alpha_min + step, …` up to and including `alpha_max`.
    pub fn alpha_grid(&self) -> Vec<f64> {
        let n = ((self.alpha_max - self.alpha_min) / self.alpha_step + 1e-9).floor() as usize + 1;
        (0..n)
            .map(|i| (self.alpha_min + i as f64 * self.alpha_step).min(self.alpha_max))
            .collect()
    }
}

fn sigma_terms(c: &Coefficients, nu: f64) -> (f64, f64) {
    let (s, co) = nu.sin_cos();
    let zb1 = c.c2 * co * co - c.c3 * s * s;
    let xb0 = 2.0 * c.c1 * co * s;
    (zb1, xb0)
}

/// CHSH value at fixed `(ν, γ)`: `2cos γ⟨σz B₁⟩ + 2sin γ⟨σx B₀⟩`.
pub fn chsh_value(c: &Coefficients, nu: f64, gamma: f64) -> f64 {
    let (zb1, xb0) = sigma_terms(c, nu);
    2.0 * gamma.cos() * zb1 + 2.0 * gamma.sin() * xb0
}

/// Maximum over γ at fixed ν.
pub fn s_gamma(c: &Coefficients, nu: f64) -> f64 {
    let (zb1, xb0) = sigma_terms(c, nu);
    2.0 * zb1.hypot(xb0)
}

/// The γ achieving [`s_gamma`].
pub fn gamma_opt(c: &Coefficients, nu: f64) -> Result<f64> {
    let (zb1, xb0) = sigma_terms(c, nu);
    if zb1 == 0.0 && xb0 == 0.0 {
        return Err(Error::GammaUndefined);
    }
    Ok(xb0.atan2(zb1))
}

/// Conditions C1 `c₃(c₂+c₃) < 2c₁²` and C2 `c₂(c₂+c₃) < 2c₁²`, necessary for `S > 2`.
pub fn conditions(c: &Coefficients) -> (bool, bool) {
    let sum = c.sum23();
    let rhs = 2.0 * c.c1 * c.c1;
    (c.c3 * sum < rhs, c.c2 * sum < rhs)
}

/// `A` and `B` of `f(sin ν) = A sin⁴ν + B sin²ν + c₂²`.
pub fn quartic_coefficients(c: &Coefficients) -> (f64, f64) {
    let sum = c.sum23();
    let c1sq = c.c1 * c.c1;
    (sum * sum - 4.0 * c1sq, 4.0 * c1sq - 2.0 * c.c2 * sum)
}

/// `(2A sin²ν + B) sin ν`, zero at every extremum of `f`.
pub fn stationarity_residual(c: &Coefficients, nu: f64) -> f64 {
    let (a, b) = quartic_coefficients(c);
    let s = nu.sin();
    (2.0 * a * s * s + b) * s
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormMax {
    pub s: f64,
    pub nu_opt: f64,
    /// `S − 2` without cancellation.
    pub excess: f64,
    /// Whether the optimum is the interior stationary point (both conditions hold).
    pub interior: bool,
}

fn excess_from_f(f_minus_one: f64) -> f64 {
    let f = 1.0 + f_minus_one;
    2.0 * f_minus_one / (f.max(0.0).sqrt() + 1.0)
}

/// Maximum of `S_γ` over ν.
///
/// When `A < 0` and `0 < B/(−2A) < 1` the maximum is interior at
/// `sin²ν = B/(−2A)` with `S = 2√(c₂² + B²/(−4A))`; otherwise it sits at an
/// endpoint, `max(2|c₂|, 2|c₃|)`.
pub fn s_max_closed(c: &Coefficients) -> ClosedFormMax {
    let (a, b) = quartic_coefficients(c);
    if a < 0.0 {
        let x = b / (-2.0 * a);
        if x > 0.0 && x < 1.0 {
            let gain = b * b / (-4.0 * a);
            let f_minus_one = gain - c.one_minus_c2 * (2.0 - c.one_minus_c2);
            let f = c.c2 * c.c2 + gain;
            return ClosedFormMax {
                s: 2.0 * f.sqrt(),
                nu_opt: x.sqrt().asin(),
                excess: excess_from_f(f_minus_one),
                interior: true,
            };
        }
    }
    let (d2, d3) = (c.abs_c2_minus_one(), c.abs_c3_minus_one());
    if c.c2.abs() >= c.c3.abs() {
        ClosedFormMax {
            s: 2.0 * c.c2.abs(),
            nu_opt: 0.0,
            excess: 2.0 * d2,
            interior: false,
        }
    } else {
        ClosedFormMax {
            s: 2.0 * c.c3.abs(),
            nu_opt: FRAC_PI_2,
            excess: 2.0 * d3,
            interior: false,
        }
    }
}

/// `S_γ` with inefficient atomic detection (two-homodyne coefficients, `c₃ = −c₂`):
/// `2(η_a√(c₁²sin²2ν + c₂²) + (1 − η_a)c₂cos 2ν)`.
pub fn s_gamma_atomic(c: &Coefficients, nu: f64, eta_a: f64) -> f64 {
    let (s2, c2n) = (2.0 * nu).sin_cos();
    2.0 * (eta_a * (c.c1 * c.c1 * s2 * s2 + c.c2 * c.c2).sqrt() + (1.0 - eta_a) * c.c2 * c2n)
}

/// `η_a c₁² sin2ν cos2ν/√(c₁²sin²2ν + c₂²) − (1 − η_a)c₂ sin2ν`, proportional to `∂S/∂ν`.
pub fn atomic_stationarity_residual(c: &Coefficients, nu: f64, eta_a: f64) -> f64 {
    let (s2, c2n) = (2.0 * nu).sin_cos();
    let root = (c.c1 * c.c1 * s2 * s2 + c.c2 * c.c2).sqrt();
    let first = if root > 0.0 {
        eta_a * c.c1 * c.c1 * s2 * c2n / root
    } else {
        0.0
    };
    first - (1.0 - eta_a) * c.c2 * s2
}

/// Maximizes [`s_gamma_atomic`] over ν ∈ [0, π/2]: dense grid, golden refinement of
/// every grid local maximum, and a stationarity check at interior optima.
/// Returns `(ν_opt, S)`.
pub fn nu_opt_atomic(c: &Coefficients, eta_a: f64, grid_points: usize) -> Result<(f64, f64)> {
    let n = grid_points.max(2);
    let h = FRAC_PI_2 / (n - 1) as f64;
    let grid: Vec<f64> = (0..n).map(|i| (i as f64 * h).min(FRAC_PI_2)).collect();
    let values: Vec<f64> = grid.iter().map(|&nu| s_gamma_atomic(c, nu, eta_a)).collect();
    let mut starts = local_maxima(&values);
    if starts.is_empty() {
        starts.push(argmax_first(&values));
    }
    let mut best = (grid[starts[0]], values[starts[0]]);
    for &i in &starts {
        let lo = grid[i.saturating_sub(1)];
        let hi = grid[(i + 1).min(n - 1)];
        let cand = golden_max(|nu| s_gamma_atomic(c, nu, eta_a), lo, hi, 1e-12);
        if cand.1 > best.1 {
            best = cand;
        }
    }
    let (nu, s) = best;
    let boundary = nu <= 1e-9 || nu >= FRAC_PI_2 - 1e-9;
    if !boundary {
        let residual = atomic_stationarity_residual(c, nu, eta_a);
        if residual.abs() > STATIONARITY_TOL {
            return Err(Error::Stationarity { nu, residual });
        }
    }
    Ok((nu, s))
}

fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// What is being maximized over `|α|`.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Objective {
    /// Closed-form maximum over ν and γ (perfect atomic detection).
    Closed(Scenario),
    /// Two-homodyne with atomic efficiency `η_a`; ν searched numerically.
    Atomic,
}

fn result_from(alpha: f64, b: f64, c: Coefficients, s: f64, excess: f64, nu: f64) -> ChshResult {
    let (c1_ok, c2_ok) = conditions(&c);
    ChshResult {
        s_value: s,
        excess,
        nu_opt: nu,
        // Any γ is optimal when both correlators vanish.
        gamma_opt: gamma_opt(&c, nu).unwrap_or(0.0),
        b_opt: b,
        alpha_opt: alpha,
        coefficients: c,
        c1_ok,
        c2_ok,
    }
}

fn evaluate(alpha: f64, channel: &ChannelSpec, objective: Objective, settings: &OptimizerSettings) -> Result<ChshResult> {
    let q = &settings.quadrature;
    let (b, _) = c1_at_optimal_bin(alpha, channel.t_line, q)?;
    match objective {
        Objective::Closed(scenario) => {
            let c = scenario_coefficients(alpha, channel, scenario.kind, scenario.loss_convention, b, q)?;
            match scenario.kind {
                ScenarioKind::Photocount => {
                    let m = s_max_closed(&c);
                    Ok(result_from(alpha, b, c, m.s, m.excess, m.nu_opt))
                }
                ScenarioKind::TwoHomodyne => {
                    // c₃ = −c₂: S_γ = 2√(c₁²sin²2ν + c₂²), maximal at ν = π/4.
                    let f_minus_one = c.c1 * c.c1 - c.one_minus_c2 * (2.0 - c.one_minus_c2);
                    let s = 2.0 * (c.c1 * c.c1 + c.c2 * c.c2).sqrt();
                    Ok(result_from(alpha, b, c, s, excess_from_f(f_minus_one), FRAC_PI_4))
                }
            }
        }
        Objective::Atomic => {
            let c = scenario_coefficients(alpha, channel, ScenarioKind::TwoHomodyne, LossConvention::default(), b, q)?;
            let (nu, s) = nu_opt_atomic(&c, channel.eta_a, settings.nu_grid_points)?;
            Ok(result_from(alpha, b, c, s, s - 2.0, nu))
        }
    }
}

fn is_violation(r: &ChshResult) -> bool {
    r.excess > VIOLATION_RESOLUTION
}

/// `candidate` (larger α) replaces `incumbent` only if it is better by more than
/// `tol`, or if it violates and the incumbent does not.
fn beats(candidate: &ChshResult, incumbent: &ChshResult, tol: f64) -> bool {
    if is_violation(candidate) != is_violation(incumbent) {
        return is_violation(candidate);
    }
    candidate.excess > incumbent.excess + tol
}

fn maximize_over_alpha(channel: &ChannelSpec, objective: Objective, settings: &OptimizerSettings) -> Result<ChshResult> {
    let settings = settings.validate()?;
    let grid = settings.alpha_grid();
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let scan: Vec<ChshResult> = grid
        .par_iter()
        .map(|&a| evaluate(a, channel, objective, &settings))
        .collect::<Result<_>>()?;
    let excess: Vec<f64> = scan.iter().map(|r| r.excess).collect();
    let mut starts = local_maxima(&excess);
    if starts.is_empty() {
        starts.push(argmax_first(&excess));
    }

    let refined: Vec<ChshResult> = starts
        .par_iter()
        .map(|&i| {
            let lo = grid[i.saturating_sub(1)];
            let hi = grid[(i + 1).min(grid.len() - 1)];
            if lo == hi {
                return Ok(scan[i]);
            }
            let mut failure = None;
            let (alpha, _) = golden_max(
                |a| match evaluate(a, channel, objective, &settings) {
                    Ok(r) => r.excess,
                    Err(e) => {
                        failure.get_or_insert(e);
                        f64::NEG_INFINITY
                    }
                },
                lo,
                hi,
                settings.refine_tol,
            );
            if let Some(e) = failure {
                return Err(e);
            }
            let r = evaluate(alpha, channel, objective, &settings)?;
            Ok(if r.excess >= scan[i].excess { r } else { scan[i] })
        })
        .collect::<Result<_>>()?;

    // `starts` is ascending in α, so ties resolve to the smaller amplitude.
    let mut best = refined[0];
    for r in &refined[1..] {
        if beats(r, &best, settings.refine_tol) {
            best = *r;
        }
    }
    Ok(best)
}

/// Optimized CHSH value with perfect atomic detection (`channel.eta_a` is ignored).
pub fn s_max_over_alpha(channel: &ChannelSpec, scenario: Scenario, settings: &OptimizerSettings) -> Result<ChshResult> {
    let channel = channel.validate()?;
    maximize_over_alpha(&channel, Objective::Closed(scenario), settings)
}

/// Optimized two-homodyne CHSH value with atomic detection efficiency `channel.eta_a`.
pub fn s_max_atomic(channel: &ChannelSpec, settings: &OptimizerSettings) -> Result<ChshResult> {
    let channel = channel.validate()?;
    maximize_over_alpha(&channel, Objective::Atomic, settings)
}

/// Optimized value for a scenario, taking the atomic path for two homodyne
/// measurements when `eta_a < 1`.
pub fn optimized(channel: &ChannelSpec, scenario: Scenario, settings: &OptimizerSettings) -> Result<ChshResult> {
    match scenario.kind {
        ScenarioKind::TwoHomodyne if channel.eta_a < 1.0 => s_max_atomic(channel, settings),
        _ => s_max_over_alpha(channel, scenario, settings),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FreeParam {
    TLine,
    EtaA,
}

impl FreeParam {
    pub fn name(self) -> &'static str {
        match self {
            FreeParam::TLine => "t_line",
            FreeParam::EtaA => "eta_a",
        }
    }

    fn apply(self, fixed: &ChannelSpec, value: f64) -> ChannelSpec {
        let mut ch = *fixed;
        match self {
            FreeParam::TLine => ch.t_line = value,
            FreeParam::EtaA => ch.eta_a = value,
        }
        ch
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    pub param: FreeParam,
    /// Midpoint of the final bracket.
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
    /// Optimized S at the bracket ends (no violation at `lo`, violation at `hi`).
    pub s_lo: f64,
    pub s_hi: f64,
}

/// Smallest value of `free` in `[0, 1]` at which the optimized CHSH value
/// violates, by bisection to [`THRESHOLD_TOL`].
pub fn violation_threshold(
    scenario: Scenario,
    free: FreeParam,
    fixed: &ChannelSpec,
    settings: &OptimizerSettings,
) -> Result<Threshold> {
    if free == FreeParam::EtaA && scenario.kind != ScenarioKind::TwoHomodyne {
        return Err(Error::Invalid("eta_a threshold requires the two-homodyne scenario".into()));
    }
    let run = |p: f64| -> Result<ChshResult> {
        let ch = free.apply(fixed, p).validate()?;
        if free == FreeParam::EtaA {
            s_max_atomic(&ch, settings)
        } else {
            optimized(&ch, scenario, settings)
        }
    };
    let at_lo = run(0.0)?;
    let at_hi = run(1.0)?;
    if is_violation(&at_lo) || !is_violation(&at_hi) {
        return Err(Error::NoThreshold);
    }
    let mut failure = None;
    let (lo, hi) = bisect_predicate(
        |p| match run(p) {
            Ok(r) => is_violation(&r),
            Err(e) => {
                failure.get_or_insert(e);
                false
            }
        },
        0.0,
        1.0,
        THRESHOLD_TOL,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(Threshold {
        param: free,
        value: 0.5 * (lo + hi),
        lo,
        hi,
        s_lo: run(lo)?.s_value,
        s_hi: run(hi)?.s_value,
    })
}

/// Large-|α| sufficient condition for violation with photocounting at `T = 1`
/// (half-exponent convention): `e^{−η|α|²/4} < √(2/π)·2/|α|`.
pub fn asymptotic_condition(eta: f64, alpha: f64) -> bool {
    (-eta * alpha * alpha / 4.0).exp() < (2.0 / PI).sqrt() * 2.0 / alpha
}

/// The amplitude beyond which [`asymptotic_condition`] holds for all larger `|α|`,
/// or `None` if it holds for every `|α| > 0`.
pub fn asymptotic_crossover(eta: f64) -> Option<f64> {
    // h(α) = η α²/4 + ln(2√(2/π)) − ln α; the condition is h > 0.
    let log_c = (2.0 * (2.0 / PI).sqrt()).ln();
    let h = |a: f64| eta * a * a / 4.0 + log_c - a.ln();
    let a_min = (2.0 / eta).sqrt();
    if h(a_min) > 0.0 {
        return None;
    }
    let mut hi = 2.0 * a_min;
    while h(hi) <= 0.0 {
        hi *= 2.0;
    }
    let (_, root) = bisect_predicate(|a| h(a) > 0.0, a_min, hi, 1e-12 * hi);
    Some(root)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    pub alpha: f64,
    pub s: f64,
    pub excess: f64,
    pub crossover: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WitnessSearch {
    Found(Witness),
    NotFound { predicted_alpha: Option<f64> },
}

/// Ratio between consecutive amplitudes of the witness search grid.
const WITNESS_GRID_RATIO: f64 = 1.01;

/// Searches for a violating amplitude with photocounting at `T = 1` and
/// efficiency `eta`.
///
/// The log-spaced scan starts at [`asymptotic_crossover`] (or at
/// `settings.alpha_min` when the asymptotic condition holds everywhere), takes
/// the first violating amplitude, and climbs to the local maximum of S.
pub fn low_efficiency_witness(
    eta: f64,
    alpha_search_max: f64,
    convention: LossConvention,
    settings: &OptimizerSettings,
) -> Result<WitnessSearch> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::OutOfRange {
            field: "eta",
            bound: "(0,1]",
            value: eta,
        });
    }
    let channel = ChannelSpec::new(1.0, eta, 1.0)?;
    let objective = Objective::Closed(Scenario::photocount(convention));
    let crossover = asymptotic_crossover(eta);
    let start = crossover.unwrap_or(settings.alpha_min).max(settings.alpha_min);
    let eval = |a: f64| evaluate(a, &channel, objective, settings);

    let mut prev = start;
    let mut alpha = start;
    let mut found = None;
    while alpha <= alpha_search_max {
        let r = eval(alpha)?;
        if is_violation(&r) {
            found = Some(r);
            break;
        }
        prev = alpha;
        alpha *= WITNESS_GRID_RATIO;
    }
    let Some(mut current) = found else {
        return Ok(WitnessSearch::NotFound { predicted_alpha: crossover });
    };

    // Climb while the grid keeps improving, then refine on the last bracket.
    let mut lo = prev;
    loop {
        let next_alpha = current.alpha_opt * WITNESS_GRID_RATIO;
        if next_alpha > alpha_search_max {
            break;
        }
        let next = eval(next_alpha)?;
        if next.excess <= current.excess {
            let mut failure = None;
            let (a, _) = golden_max(
                |a| match eval(a) {
                    Ok(r) => r.excess,
                    Err(e) => {
                        failure.get_or_insert(e);
                        f64::NEG_INFINITY
                    }
                },
                lo,
                next_alpha,
                settings.refine_tol * current.alpha_opt,
            );
            if let Some(e) = failure {
                return Err(e);
            }
            let refined = eval(a)?;
            if refined.excess >= current.excess && is_violation(&refined) {
                current = refined;
            }
            break;
        }
        lo = current.alpha_opt;
        current = next;
    }
    Ok(WitnessSearch::Found(Witness {
        alpha: current.alpha_opt,
        s: current.s_value,
        excess: current.excess,
        crossover,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coeffs(c1: f64, c2: f64, c3: f64) -> Coefficients {
        Coefficients::new(c1, c2, c3)
    }

    #[test]
    fn s_gamma_examples() {
        assert!(s_gamma(&coeffs(0.0, 1.0, 1.0), FRAC_PI_4).abs() < 1e-15);
        assert!((s_gamma(&coeffs(1.0, 1.0, -1.0), FRAC_PI_4) - TSIRELSON).abs() < 1e-15);
    }

    #[test]
    fn gamma_opt_alignment() {
        // ν = 0: ⟨σx B₀⟩ = 0, ⟨σz B₁⟩ = c₂ > 0.
        assert_eq!(gamma_opt(&coeffs(0.3, 1.0, 0.2), 0.0).unwrap(), 0.0);
        // c₂cos²ν = c₃sin²ν at ν = π/4 when c₂ = c₃.
        let g = gamma_opt(&coeffs(0.3, 0.5, 0.5), FRAC_PI_4).unwrap();
        assert!((g - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(gamma_opt(&coeffs(0.0, 0.0, 0.0), 0.7).unwrap_err(), Error::GammaUndefined);
    }

    #[test]
    fn conditions_examples() {
        assert_eq!(conditions(&coeffs(1.0, 1.0, -1.0)), (true, true));
        assert_eq!(conditions(&coeffs(0.0, 1.0, 1.0)), (false, false));
    }

    #[test]
    fn closed_form_examples() {
        let m = s_max_closed(&coeffs(1.0, 1.0, -1.0));
        assert!((m.s - TSIRELSON).abs() < 1e-15);
        assert!((m.nu_opt - FRAC_PI_4).abs() < 1e-15);
        assert!(m.interior);
        let m = s_max_closed(&coeffs(0.0, 1.0, 1.0));
        assert_eq!((m.s, m.nu_opt, m.excess), (2.0, 0.0, 0.0));
        let m = s_max_closed(&coeffs(0.1, 0.3, -0.9));
        assert_eq!(m.nu_opt, FRAC_PI_2);
        assert!((m.s - 1.8).abs() < 1e-15);
    }

    #[test]
    fn excess_matches_naive_difference() {
        let c = coeffs(0.4, 1.0, -0.6);
        let m = s_max_closed(&c);
        assert!((m.excess - (m.s - 2.0)).abs() < 1e-15);
        let n = Coefficients::from_complements(1e-8, 0.0, 1e-17);
        let m = s_max_closed(&n);
        // Naive S − 2 would be 0 here; f − 1 = B²/(−4A) with c₂ + c₃ = 1e-17.
        let (sum, c1sq) = (1e-17, 1e-16);
        let gain = (4.0 * c1sq - 2.0 * sum) * (4.0 * c1sq - 2.0 * sum) / (4.0 * (4.0 * c1sq - sum * sum));
        assert!(m.s - 2.0 == 0.0);
        assert!(((m.excess - gain) / gain).abs() < 1e-12, "{} vs {gain}", m.excess);
    }

    #[test]
    fn atomic_formula_limits() {
        let c = coeffs(0.4, 0.7, -0.7);
        for nu in [0.1, 0.5, 1.2] {
            let perfect = s_gamma_atomic(&c, nu, 1.0);
            let direct = 2.0 * (0.16 * (2.0 * nu).sin().powi(2) + 0.49f64).sqrt();
            assert!((perfect - direct).abs() < 1e-15);
        }
        assert!((s_gamma_atomic(&c, 0.0, 0.0) - 1.4).abs() < 1e-15);
    }

    #[test]
    fn atomic_nu_matches_algebraic_optimum() {
        // In u = cos 2ν the objective is concave with stationary point
        // u* = (1−η)c₂√(c₁²+c₂²) / (c₁√(η²c₁² + (1−η)²c₂²)).
        for &(c1, c2, eta) in &[(0.45, 0.8, 0.9), (0.3, 0.95, 0.85), (0.5, 0.6, 0.99)] {
            let c = coeffs(c1, c2, -c2);
            let (nu, _) = nu_opt_atomic(&c, eta, 2001).unwrap();
            let u = ((1.0 - eta) * c2 * (c1 * c1 + c2 * c2).sqrt()
                / (c1 * (eta * eta * c1 * c1 + (1.0 - eta) * (1.0 - eta) * c2 * c2).sqrt()))
            .min(1.0);
            let nu_star = 0.5 * u.acos();
            assert!((nu - nu_star).abs() < 1e-6, "{nu} vs {nu_star}");
        }
    }

    #[test]
    fn alpha_grid_default() {
        let g = OptimizerSettings::default().alpha_grid();
        assert_eq!(g.len(), 240);
        assert_eq!(g[0], 0.05);
        assert!((g[239] - 12.0).abs() < 1e-12);
    }

    #[test]
    fn empty_grid_is_an_error() {
        let s = OptimizerSettings {
            alpha_max: 0.0,
            ..Default::default()
        };
        let err = s_max_over_alpha(&ChannelSpec::lossless(), Scenario::two_homodyne(), &s).unwrap_err();
        assert_eq!(err, Error::EmptyGrid);
    }

    #[test]
    fn crossover_behaviour() {
        assert_eq!(asymptotic_crossover(1.0), None);
        let a = asymptotic_crossover(0.01).unwrap();
        assert!(a > 30.0 && a < 40.0, "{a}");
        assert!(asymptotic_condition(0.01, a * 1.001));
        assert!(!asymptotic_condition(0.01, a * 0.999));
        assert!(asymptotic_condition(0.01, 10.0 * a));
    }

    #[test]
    fn near_product_state_does_not_violate() {
        let c = {
            let a = 0.01;
            let ch = ChannelSpec::new(1.0, 0.999, 1.0).unwrap();
            let q = QuadratureSettings::default();
            let (b, _) = c1_at_optimal_bin(a, 1.0, &q).unwrap();
            scenario_coefficients(a, &ch, ScenarioKind::Photocount, LossConvention::HalfExponent, b, &q).unwrap()
        };
        assert!(s_max_closed(&c).s <= 2.0 + 1e-6);
    }

    #[test]
    fn eta_a_threshold_requires_two_homodyne() {
        let err = violation_threshold(
            Scenario::photocount(LossConvention::BornRule),
            FreeParam::EtaA,
            &ChannelSpec::lossless(),
            &OptimizerSettings::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Invalid(_)));
    }
}
