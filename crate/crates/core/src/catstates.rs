//! Heralded coherent-state superpositions and their splitting on a beamsplitter
//! cascade.
//!
//! Measuring the atom of `cos ν|s,0⟩ + sin ν|g,α⟩` in the `(|s⟩ ± |g⟩)/√2`
//! basis and keeping the `+` outcome leaves `cos ν|0⟩ + sin ν|α⟩`. Displacing
//! by `−α/2` centres it as `N(cos ν|−a⟩ + sin ν|a⟩)` with `a = α/2`. Every
//! function here takes the hybrid-state `α` and reports `a` explicitly.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::StateSpec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatState {
    pub nu: f64,
    /// Amplitude `a` of the `|+a⟩` branch (half the hybrid-state α).
    pub alpha: Complex64,
    /// `N = [1 + sin 2ν·e^{−2|a|²}]^{−1/2}`.
    pub norm: f64,
}

/// Normalization of `cos ν|−a⟩ + sin ν|a⟩`, using `⟨−a|a⟩ = e^{−2|a|²}`.
pub fn cat_norm(nu: f64, cat_alpha_mag: f64) -> f64 {
    (1.0 + (2.0 * nu).sin() * (-2.0 * cat_alpha_mag * cat_alpha_mag).exp()).powf(-0.5)
}

pub fn herald_cat(state: &StateSpec) -> Result<CatState> {
    let state = state.validate()?;
    let alpha = state.alpha() / 2.0;
    Ok(CatState {
        nu: state.nu,
        alpha,
        norm: cat_norm(state.nu, alpha.norm()),
    })
}

/// Probability of the `+` atomic outcome: `½(1 + sin 2ν·e^{−|α|²/2})`.
pub fn heralding_probability(state: &StateSpec) -> Result<f64> {
    let state = state.validate()?;
    let a = state.alpha_mag;
    Ok(0.5 * (1.0 + (2.0 * state.nu).sin() * (-a * a / 2.0).exp()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CascadeSpec {
    transmittivities: Vec<f64>,
}

impl CascadeSpec {
    /// Amplitude transmittivities `tᵢ ∈ (0, 1]`, one per splitter.
    pub fn new(transmittivities: Vec<f64>) -> Result<Self> {
        if transmittivities.is_empty() {
            return Err(Error::Invalid("cascade needs at least one beamsplitter".into()));
        }
        for &t in &transmittivities {
            if t.is_nan() || t <= 0.0 || t > 1.0 {
                return Err(Error::OutOfRange {
                    field: "transmittivity",
                    bound: "(0,1]",
                    value: t,
                });
            }
        }
        Ok(Self { transmittivities })
    }

    pub fn transmittivities(&self) -> &[f64] {
        &self.transmittivities
    }

    pub fn reflectivities(&self) -> Vec<f64> {
        self.transmittivities.iter().map(|t| (1.0 - t * t).sqrt()).collect()
    }

    /// Output modes: one reflected port per splitter plus the final transmitted port.
    pub fn n_modes(&self) -> usize {
        self.transmittivities.len() + 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitCat {
    pub nu: f64,
    pub norm: f64,
    /// `f_k = r_k·Π_{i<k} tᵢ`, and `Π tᵢ` for the last mode.
    pub factors: Vec<f64>,
    /// Per-mode amplitudes `f_k·a` of the `sin ν` branch.
    pub plus: Vec<Complex64>,
    /// Per-mode amplitudes `−f_k·a` of the `cos ν` branch.
    pub minus: Vec<Complex64>,
}

impl SplitCat {
    /// `Σf_k² − 1`; zero for any lossless cascade.
    pub fn energy_residual(&self) -> f64 {
        self.factors.iter().map(|f| f * f).sum::<f64>() - 1.0
    }

    /// `max|f_k| − min|f_k|`.
    pub fn amplitude_spread(&self) -> f64 {
        let (lo, hi) = self
            .factors
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), f| (lo.min(f.abs()), hi.max(f.abs())));
        hi - lo
    }
}

pub fn split_cat(cat: &CatState, cascade: &CascadeSpec) -> SplitCat {
    let mut factors = Vec::with_capacity(cascade.n_modes());
    let mut through = 1.0;
    for (&t, r) in cascade.transmittivities.iter().zip(cascade.reflectivities()) {
        factors.push(r * through);
        through *= t;
    }
    factors.push(through);
    SplitCat {
        nu: cat.nu,
        norm: cat.norm,
        plus: factors.iter().map(|&f| cat.alpha * f).collect(),
        minus: factors.iter().map(|&f| -cat.alpha * f).collect(),
        factors,
    }
}

/// Transmittivities giving equal amplitude in all `n_modes` outputs:
/// `t₁² = (N−1)/N`, then `t_k² = 2 − 1/t_{k−1}²`.
pub fn equal_amplitude_cascade(n_modes: usize) -> Result<CascadeSpec> {
    if n_modes < 2 {
        return Err(Error::Invalid(format!("n_modes must be at least 2 (got {n_modes})")));
    }
    let n = n_modes as f64;
    let mut t_sq = (n - 1.0) / n;
    let mut ts = Vec::with_capacity(n_modes - 1);
    for k in 1..n_modes {
        if k > 1 {
            t_sq = 2.0 - 1.0 / t_sq;
        }
        if !(t_sq > 0.0) {
            return Err(Error::CascadeRecursion(t_sq, k));
        }
        ts.push(t_sq.sqrt());
    }
    CascadeSpec::new(ts)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

    use super::*;

    #[test]
    fn degenerate_cat() {
        let cat = herald_cat(&StateSpec::new(FRAC_PI_4, 0.0).unwrap()).unwrap();
        assert!((cat.norm - FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(cat.alpha, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn cat_amplitude_is_half() {
        let cat = herald_cat(&StateSpec::new(FRAC_PI_4, 4.0).unwrap()).unwrap();
        assert_eq!(cat.alpha, Complex64::new(0.0, 2.0));
        assert!((cat.norm - (1.0 + (-8.0f64).exp()).powf(-0.5)).abs() < 1e-15);
        assert!((cat.norm - 0.999_832).abs() < 1e-6);
    }

    #[test]
    fn heralding_probability_relates_to_norm() {
        let s = StateSpec::new(0.4, 1.3).unwrap();
        let p = heralding_probability(&s).unwrap();
        let cat = herald_cat(&s).unwrap();
        assert!((p - 0.5 / (cat.norm * cat.norm)).abs() < 1e-15);
    }

    #[test]
    fn fifty_fifty_split() {
        let cat = herald_cat(&StateSpec::new(FRAC_PI_4, 4.0).unwrap()).unwrap();
        let split = split_cat(&cat, &CascadeSpec::new(vec![FRAC_1_SQRT_2]).unwrap());
        for z in &split.plus {
            assert!((z - Complex64::new(0.0, 2.0f64.sqrt())).norm() < 1e-15);
        }
        for (p, m) in split.plus.iter().zip(&split.minus) {
            assert_eq!(*p, -*m);
        }
    }

    #[test]
    fn transparent_splitter() {
        let cat = herald_cat(&StateSpec::new(0.3, 2.0).unwrap()).unwrap();
        let split = split_cat(&cat, &CascadeSpec::new(vec![1.0]).unwrap());
        assert_eq!(split.factors, vec![0.0, 1.0]);
    }

    #[test]
    fn three_mode_recursion() {
        let c = equal_amplitude_cascade(3).unwrap();
        let t = c.transmittivities();
        assert!((t[0] * t[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((t[1] * t[1] - 0.5).abs() < 1e-15);
        let cat = herald_cat(&StateSpec::new(0.5, 1.0).unwrap()).unwrap();
        let split = split_cat(&cat, &c);
        for f in &split.factors {
            assert!((f - 1.0 / 3.0f64.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn recursion_for_many_modes() {
        let cat = herald_cat(&StateSpec::new(0.5, 1.0).unwrap()).unwrap();
        for n in 2..=12 {
            let split = split_cat(&cat, &equal_amplitude_cascade(n).unwrap());
            assert_eq!(split.factors.len(), n);
            assert!(split.amplitude_spread() <= 1e-12, "{n}");
            assert!(split.energy_residual().abs() <= 1e-12);
        }
    }

    #[test]
    fn invalid_inputs() {
        assert!(equal_amplitude_cascade(1).is_err());
        assert!(CascadeSpec::new(vec![]).is_err());
        assert!(CascadeSpec::new(vec![0.0]).is_err());
        assert!(CascadeSpec::new(vec![1.2]).is_err());
    }
}
