//! Adaptive Gauss–Kronrod (10/21-point) integration.
//!
//! The interval with the largest error estimate is bisected until the summed
//! estimate drops below `max(abs_tol, rel_tol·|I|)`. The local error estimate
//! is the plain `|K₂₁ − G₁₀|`, which is pessimistic for smooth integrands.
//! [`integrate_vec`] runs the same scheme on a vector-valued integrand with a
//! shared mesh, using the max-norm of the component errors.

#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};

/// Kronrod abscissae on [-1, 1] (non-negative half, descending). Odd indices are the Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_614_842,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// 10-point Gauss weights, paired with `XGK[1], XGK[3], …, XGK[9]`.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 200,
        }
    }
}

impl QuadratureSettings {
    pub fn validate(self) -> Result<Self> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) || self.max_subdivisions == 0 {
            return Err(Error::Invalid(
                "quadrature tolerances must be positive and max_subdivisions >= 1".into(),
            ));
        }
        Ok(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[10] * fc;
    let mut gauss = 0.0;
    for j in 0..10 {
        let dx = half * XGK[j];
        let sum = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, settings: &QuadratureSettings) -> Result<QuadratureResult> {
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            error: 0.0,
            intervals: 0,
        });
    }
    // (a, b, value, error)
    let (v, e) = gk21(&f, a, b);
    let mut intervals = vec![(a, b, v, e)];
    loop {
        let total: f64 = intervals.iter().map(|iv| iv.2).sum();
        let error: f64 = intervals.iter().map(|iv| iv.3).sum();
        let tolerance = settings.abs_tol.max(settings.rel_tol * total.abs());
        if error <= tolerance {
            return Ok(QuadratureResult {
                value: total,
                error,
                intervals: intervals.len(),
            });
        }
        if intervals.len() >= settings.max_subdivisions {
            return Err(Error::QuadratureNotConverged { estimate: error, tolerance });
        }
        let worst = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .expect("non-empty interval list");
        let (lo, hi, _, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (vl, el) = gk21(&f, lo, mid);
        let (vr, er) = gk21(&f, mid, hi);
        intervals.push((lo, mid, vl, el));
        intervals.push((mid, hi, vr, er));
    }
}

struct VecPanel {
    lo: f64,
    hi: f64,
    value: Vec<f64>,
    error: f64,
}

fn gk21_vec<F: Fn(f64, &mut [f64])>(f: &F, a: f64, b: f64, dim: usize, scratch: &mut [f64]) -> VecPanel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kronrod = vec![0.0; dim];
    let mut gauss = vec![0.0; dim];
    let mut accumulate = |x: f64, wk: f64, wg: f64, scratch: &mut [f64]| {
        f(x, scratch);
        for i in 0..dim {
            kronrod[i] += wk * scratch[i];
            gauss[i] += wg * scratch[i];
        }
    };
    accumulate(center, WGK[10], 0.0, scratch);
    for j in 0..10 {
        let dx = half * XGK[j];
        let wg = if j % 2 == 1 { WG[j / 2] } else { 0.0 };
        accumulate(center - dx, WGK[j], wg, scratch);
        accumulate(center + dx, WGK[j], wg, scratch);
    }
    let mut error = 0.0f64;
    for i in 0..dim {
        kronrod[i] *= half;
        error = error.max((kronrod[i] - gauss[i] * half).abs());
    }
    VecPanel {
        lo: a,
        hi: b,
        value: kronrod,
        error,
    }
}

/// Integrates a vector-valued `f` over `[a, b]`; `f(x, out)` writes `dim` components.
///
/// Convergence is declared when the summed max-norm error estimate is below
/// `max(abs_tol, rel_tol·max|Iᵢ|)`.
pub fn integrate_vec<F: Fn(f64, &mut [f64])>(
    f: F,
    dim: usize,
    a: f64,
    b: f64,
    settings: &QuadratureSettings,
) -> Result<(Vec<f64>, f64)> {
    if a == b {
        return Ok((vec![0.0; dim], 0.0));
    }
    let mut scratch = vec![0.0; dim];
    let mut panels = vec![gk21_vec(&f, a, b, dim, &mut scratch)];
    loop {
        let error: f64 = panels.iter().map(|p| p.error).sum();
        let mut total = vec![0.0; dim];
        for p in &panels {
            for (t, v) in total.iter_mut().zip(&p.value) {
                *t += v;
            }
        }
        let scale = total.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tolerance = settings.abs_tol.max(settings.rel_tol * scale);
        if error <= tolerance {
            return Ok((total, error));
        }
        if panels.len() >= settings.max_subdivisions {
            return Err(Error::QuadratureNotConverged { estimate: error, tolerance });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .expect("non-empty panel list");
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.lo + p.hi);
        panels.push(gk21_vec(&f, p.lo, mid, dim, &mut scratch));
        panels.push(gk21_vec(&f, mid, p.hi, dim, &mut scratch));
    }
}
