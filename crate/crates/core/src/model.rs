//! Domain types shared by the rest of the crate.
//!
//! The hybrid state is `cos ν |s,0⟩ + sin ν |g,α⟩`. Only the magnitude of the
//! coherent amplitude is stored: α is taken purely imaginary (`α = i|α|`),
//! which puts the relative phase between the X-quadrature measurement and the
//! coherent displacement at π/2 and maximizes the homodyne coherence term.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Phase attached to the coherent amplitude: α = `ALPHA_PHASE · |α|`.
pub const ALPHA_PHASE: Complex64 = Complex64::new(0.0, 1.0);

fn check_range(field: &'static str, bound: &'static str, value: f64, lo: f64, hi: f64) -> Result<()> {
    if value.is_nan() || value < lo || value > hi {
        return Err(Error::OutOfRange { field, bound, value });
    }
    Ok(())
}

/// Parameters of the hybrid atom-field state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateSpec {
    /// Mixing angle ν in radians, `0 ≤ ν ≤ π/2`.
    pub nu: f64,
    /// Coherent amplitude magnitude |α|.
    pub alpha_mag: f64,
}

impl StateSpec {
    pub fn new(nu: f64, alpha_mag: f64) -> Result<Self> {
        Self { nu, alpha_mag }.validate()
    }

    pub fn validate(self) -> Result<Self> {
        check_range("nu", "[0, π/2]", self.nu, 0.0, FRAC_PI_2)?;
        check_range("alpha_mag", "[0, ∞)", self.alpha_mag, 0.0, f64::INFINITY)?;
        Ok(self)
    }

    /// The complex coherent amplitude under the imaginary-phase convention.
    pub fn alpha(&self) -> Complex64 {
        ALPHA_PHASE * self.alpha_mag
    }
}

/// Loss parameters: line transmission, photocounting and atomic detection efficiencies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSpec {
    pub t_line: f64,
    pub eta: f64,
    pub eta_a: f64,
}

impl ChannelSpec {
    pub fn new(t_line: f64, eta: f64, eta_a: f64) -> Result<Self> {
        Self { t_line, eta, eta_a }.validate()
    }

    pub fn lossless() -> Self {
        Self {
            t_line: 1.0,
            eta: 1.0,
            eta_a: 1.0,
        }
    }

    pub fn validate(self) -> Result<Self> {
        check_range("t_line", "[0,1]", self.t_line, 0.0, 1.0)?;
        check_range("eta", "[0,1]", self.eta, 0.0, 1.0)?;
        check_range("eta_a", "[0,1]", self.eta_a, 0.0, 1.0)?;
        Ok(self)
    }
}

/// Which observable the field side uses for `B₁`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioKind {
    /// `B₁` is on/off photocounting ("+1" on no click).
    Photocount,
    /// `B₁` is a P-quadrature homodyne measurement with a half-line binning.
    TwoHomodyne,
}

/// How the photocounting efficiency enters the no-click expectation `c₃`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum LossConvention {
    /// `c₃ = 2·exp(−ηT|α|²/2) − 1`, the half-exponent form used in the
    /// original analytic treatment (and its arbitrary-η argument).
    HalfExponent,
    /// `c₃ = 2·|⟨0|√(ηT)α⟩|² − 1 = 2·exp(−ηT|α|²) − 1`.
    #[default]
    BornRule,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Scenario {
    pub kind: ScenarioKind,
    /// Ignored for [`ScenarioKind::TwoHomodyne`].
    pub loss_convention: LossConvention,
}

impl Scenario {
    pub fn photocount(loss_convention: LossConvention) -> Self {
        Self {
            kind: ScenarioKind::Photocount,
            loss_convention,
        }
    }

    pub fn two_homodyne() -> Self {
        Self {
            kind: ScenarioKind::TwoHomodyne,
            loss_convention: LossConvention::default(),
        }
    }
}

/// Measurement settings: atomic angle γ, X-bin half-width `b`, and the P threshold of
/// the two-homodyne `B₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSpec {
    pub gamma: f64,
    pub b: f64,
    pub p_threshold: f64,
}

impl MeasurementSpec {
    pub fn new(gamma: f64, b: f64, p_threshold: f64) -> Result<Self> {
        Self { gamma, b, p_threshold }.validate()
    }

    pub fn validate(self) -> Result<Self> {
        if self.b.is_nan() || self.b <= 0.0 {
            return Err(Error::OutOfRange {
                field: "b",
                bound: "(0, ∞)",
                value: self.b,
            });
        }
        Ok(self)
    }
}

/// The triple `(c₁, c₂, c₃)` that determines the CHSH value of a scenario.
///
/// `one_minus_c2` and `one_plus_c3` carry `1 − c₂` and `1 + c₃` to full relative
/// precision. Near the violation threshold `c₂ → 1` and `c₃ → −1`, and the margin
/// `S − 2` is far below the spacing of doubles around 1; the closed-form
/// maximizer uses these complements to evaluate that margin without cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub one_minus_c2: f64,
    pub one_plus_c3: f64,
}

impl Coefficients {
    pub fn new(c1: f64, c2: f64, c3: f64) -> Self {
        Self {
            c1,
            c2,
            c3,
            one_minus_c2: 1.0 - c2,
            one_plus_c3: 1.0 + c3,
        }
    }

    /// Builds coefficients from accurately computed complements.
    pub fn from_complements(c1: f64, one_minus_c2: f64, one_plus_c3: f64) -> Self {
        Self {
            c1,
            c2: 1.0 - one_minus_c2,
            c3: one_plus_c3 - 1.0,
            one_minus_c2,
            one_plus_c3,
        }
    }

    /// Checks `|cᵢ| ≤ 1` up to `slack`.
    pub fn validate(self, slack: f64) -> Result<Self> {
        let bound = 1.0 + slack;
        check_range("c1", "[-1,1]", self.c1, -bound, bound)?;
        check_range("c2", "[-1,1]", self.c2, -bound, bound)?;
        check_range("c3", "[-1,1]", self.c3, -bound, bound)?;
        Ok(self)
    }

    /// `c₂ + c₃`, computed from the complements.
    pub fn sum23(&self) -> f64 {
        self.one_plus_c3 - self.one_minus_c2
    }

    /// `|c₂| − 1` without cancellation.
    pub fn abs_c2_minus_one(&self) -> f64 {
        if self.c2 >= 0.0 {
            -self.one_minus_c2
        } else {
            -(2.0 - self.one_minus_c2)
        }
    }

    /// `|c₃| − 1` without cancellation.
    pub fn abs_c3_minus_one(&self) -> f64 {
        if self.c3 <= 0.0 {
            -self.one_plus_c3
        } else {
            -(2.0 - self.one_plus_c3)
        }
    }
}

/// An optimized CHSH value with the parameters that achieve it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshResult {
    pub s_value: f64,
    /// `S − 2` evaluated without cancellation; positive means violation.
    pub excess: f64,
    pub nu_opt: f64,
    pub gamma_opt: f64,
    pub b_opt: f64,
    pub alpha_opt: f64,
    pub coefficients: Coefficients,
    /// Condition C1: `c₃(c₂+c₃) < 2c₁²`.
    pub c1_ok: bool,
    /// Condition C2: `c₂(c₂+c₃) < 2c₁²`.
    pub c2_ok: bool,
}
