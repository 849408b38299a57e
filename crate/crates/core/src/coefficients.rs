//! Scenario coefficients `c₁, c₂, c₃` under line loss and detector inefficiency.
//!
//! With `β = i√T|α|` the attenuated amplitude and `V` the visibility left by the
//! loss environment,
//!
//! * `c₁ = ½V·Tr((|0⟩⟨β| + |β⟩⟨0|)B₀) = V[(2/√π)∫_{−b}^{b} e^{−x²}cos(√2·x·√T|α|)dx − e^{−T|α|²/2}]`,
//! * `c₂ = Tr(|0⟩⟨0|B₁)`, `c₃ = Tr(|β⟩⟨β|B₁)`,
//!
//! where `B₀` bins the X quadrature on `[−b, b]` and `B₁` is either the no-click
//! photocount observable or a P-quadrature half-line binning.

use std::f64::consts::{FRAC_2_SQRT_PI, PI, SQRT_2};

use crate::error::{Error, Result};
use crate::model::{ChannelSpec, Coefficients, LossConvention, ScenarioKind};
use crate::quadrature::integrate;

pub use crate::quadrature::QuadratureSettings;

/// Beyond this |x| the Gaussian weight `e^{−x²}` is below the smallest normal double.
const GAUSSIAN_CUTOFF: f64 = 27.0;

/// `V = exp(−(1 − T)|α|²/2)`.
pub fn visibility(alpha_mag: f64, t_line: f64) -> f64 {
    (-(1.0 - t_line) * alpha_mag * alpha_mag / 2.0).exp()
}

/// Homodyne coherence coefficient for an X-bin of half-width `b`.
///
/// `b = +∞` is accepted and evaluates the Gaussian cosine transform limit
/// `(2/√π)∫e^{−x²}cos(kx)dx = 2e^{−k²/4}`.
pub fn c1(alpha_mag: f64, t_line: f64, b: f64, settings: &QuadratureSettings) -> Result<f64> {
    if b.is_nan() || b <= 0.0 {
        return Err(Error::OutOfRange {
            field: "b",
            bound: "(0, ∞)",
            value: b,
        });
    }
    let v = visibility(alpha_mag, t_line);
    let overlap = (-t_line * alpha_mag * alpha_mag / 2.0).exp();
    let k = SQRT_2 * t_line.sqrt() * alpha_mag;
    let binned = if b.is_infinite() {
        2.0 * overlap
    } else {
        let upper = b.min(GAUSSIAN_CUTOFF);
        let half = integrate(|x| (-x * x).exp() * (k * x).cos(), 0.0, upper, settings)?;
        2.0 * FRAC_2_SQRT_PI * half.value
    };
    Ok(v * (binned - overlap))
}

/// The bin half-width maximizing `c₁`: the first zero of the cosine,
/// `b = π/(2√2·√T|α|)`.
pub fn optimal_bin(alpha_mag: f64, t_line: f64) -> Result<f64> {
    let effective = t_line.sqrt() * alpha_mag;
    if !(effective > 0.0) {
        return Err(Error::BinUndefined);
    }
    Ok(PI / (2.0 * SQRT_2 * effective))
}

/// `c₁` at [`optimal_bin`], falling back to the `b → ∞` limit when the attenuated
/// amplitude vanishes (the integrand is then a pure Gaussian). Returns `(b, c₁)`.
pub fn c1_at_optimal_bin(alpha_mag: f64, t_line: f64, settings: &QuadratureSettings) -> Result<(f64, f64)> {
    let b = match optimal_bin(alpha_mag, t_line) {
        Ok(b) => b,
        Err(Error::BinUndefined) => f64::INFINITY,
        Err(e) => return Err(e),
    };
    Ok((b, c1(alpha_mag, t_line, b, settings)?))
}

/// Vacuum never clicks: `c₂ = 1` for photocounting, independent of loss.
pub fn c2_photocount() -> f64 {
    1.0
}

/// `1 + c₃` for photocounting, i.e. twice the no-click probability.
pub fn one_plus_c3_photocount(alpha_mag: f64, t_line: f64, eta: f64, convention: LossConvention) -> f64 {
    let mean = eta * t_line * alpha_mag * alpha_mag;
    let exponent = match convention {
        LossConvention::HalfExponent => mean / 2.0,
        LossConvention::BornRule => mean,
    };
    2.0 * (-exponent).exp()
}

pub fn c3_photocount(alpha_mag: f64, t_line: f64, eta: f64, convention: LossConvention) -> f64 {
    one_plus_c3_photocount(alpha_mag, t_line, eta, convention) - 1.0
}

/// P threshold of the two-homodyne `B₁`: midway between the P distributions of
/// `|0⟩` (centred at 0) and `|i√T|α|⟩` (centred at `√2·√T|α|`).
pub fn two_homodyne_p_threshold(alpha_mag: f64, t_line: f64) -> f64 {
    t_line.sqrt() * alpha_mag / SQRT_2
}

/// `c₂ = erf(√(T/2)|α|)`; by symmetry of the midpoint threshold, `c₃ = −c₂`.
pub fn c2_twohomodyne(alpha_mag: f64, t_line: f64) -> f64 {
    libm::erf((t_line / 2.0).sqrt() * alpha_mag)
}

/// `1 − c₂ = erfc(√(T/2)|α|)`, which is also `1 + c₃`.
pub fn one_minus_c2_twohomodyne(alpha_mag: f64, t_line: f64) -> f64 {
    libm::erfc((t_line / 2.0).sqrt() * alpha_mag)
}

/// All three coefficients for a scenario at a given bin half-width.
pub fn scenario_coefficients(
    alpha_mag: f64,
    channel: &ChannelSpec,
    kind: ScenarioKind,
    convention: LossConvention,
    b: f64,
    settings: &QuadratureSettings,
) -> Result<Coefficients> {
    let c1 = c1(alpha_mag, channel.t_line, b, settings)?;
    Ok(match kind {
        ScenarioKind::Photocount => Coefficients::from_complements(
            c1,
            1.0 - c2_photocount(),
            one_plus_c3_photocount(alpha_mag, channel.t_line, channel.eta, convention),
        ),
        ScenarioKind::TwoHomodyne => {
            let tail = one_minus_c2_twohomodyne(alpha_mag, channel.t_line);
            Coefficients::from_complements(c1, tail, tail)
        }
    })
}
