//! Brute-force reference: states and measurement operators as explicit vectors
//! and matrices on a truncated Fock space.
//!
//! Nothing here calls into [`coefficients`](crate::coefficients) or
//! [`chsh`](crate::chsh). Bin operators are built from Hermite functions in the
//! `x̂ = (a + a†)/√2` convention by quadrature of their products; momentum-space
//! elements use `⟨n|p⟩ = iⁿ ψₙ(p)`. Line loss is represented by the rank-2
//! purification: the atom-field state keeps both branches and the off-diagonal
//! block is scaled by the overlap of the two environment states.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{ChannelSpec, Coefficients, ScenarioKind, StateSpec, ALPHA_PHASE};
use crate::quadrature::{integrate_vec, QuadratureSettings};

/// Largest tolerated `1 − ‖ψ‖²` for a truncated physical state.
pub const NORM_DEFICIT_TOL: f64 = 1e-10;

const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
const C_ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Truncation for amplitude `|α|`: `⌈|α|² + 10|α| + 20⌉`.
pub fn truncation_for(alpha_mag: f64) -> usize {
    (alpha_mag * alpha_mag + 10.0 * alpha_mag + 20.0).ceil() as usize
}

fn oracle_quadrature() -> QuadratureSettings {
    QuadratureSettings {
        abs_tol: 1e-12,
        rel_tol: 1e-12,
        max_subdivisions: 4000,
    }
}

/// Past this |x| every ψₙ with n ≤ n_max is negligible.
fn support_edge(n_max: usize) -> f64 {
    ((2 * n_max + 1) as f64).sqrt() + 15.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    pub amplitudes: Vec<Complex64>,
}

impl FockVector {
    pub fn vacuum(n_max: usize) -> Self {
        let mut amplitudes = vec![C_ZERO; n_max + 1];
        amplitudes[0] = C_ONE;
        Self { amplitudes }
    }

    pub fn n_max(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &FockVector) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            amplitudes: self.amplitudes.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn add(&self, other: &FockVector) -> Self {
        Self {
            amplitudes: self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a + b).collect(),
        }
    }
}

/// `|α⟩` truncated at `n_max`, built by the recurrence `aₙ = aₙ₋₁·α/√n`.
pub fn coherent_fock(alpha: Complex64, n_max: usize) -> Result<FockVector> {
    let mut amplitudes = Vec::with_capacity(n_max + 1);
    let mut a = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    amplitudes.push(a);
    for n in 1..=n_max {
        a = a * alpha / (n as f64).sqrt();
        amplitudes.push(a);
    }
    let v = FockVector { amplitudes };
    if 1.0 - v.norm_sqr() > NORM_DEFICIT_TOL {
        let mut required = n_max.max(truncation_for(alpha.norm()));
        while 1.0 - coherent_fock_unchecked(alpha, required).norm_sqr() > NORM_DEFICIT_TOL {
            required += required / 2 + 1;
        }
        return Err(Error::Truncation { given: n_max, required });
    }
    Ok(v)
}

fn coherent_fock_unchecked(alpha: Complex64, n_max: usize) -> FockVector {
    let mut amplitudes = Vec::with_capacity(n_max + 1);
    let mut a = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    amplitudes.push(a);
    for n in 1..=n_max {
        a = a * alpha / (n as f64).sqrt();
        amplitudes.push(a);
    }
    FockVector { amplitudes }
}

/// Hermite functions ψ₀…ψ_{n_max} at `x`, by the upward recurrence
/// `ψₙ₊₁ = √(2/(n+1))·x·ψₙ − √(n/(n+1))·ψₙ₋₁`, `ψ₀ = π^{−1/4}e^{−x²/2}`.
pub fn hermite_functions(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = PI.powf(-0.25) * (-x * x / 2.0).exp();
    if out.len() > 1 {
        out[1] = std::f64::consts::SQRT_2 * x * out[0];
    }
    for n in 1..out.len().saturating_sub(1) {
        let nf = n as f64;
        out[n + 1] = (2.0 / (nf + 1.0)).sqrt() * x * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
    }
}

/// `(m, n)` pairs with `m ≤ n`, optionally restricted to even `m + n`.
fn index_pairs(n_max: usize, even_only: bool) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for m in 0..=n_max {
        for n in m..=n_max {
            if !even_only || (m + n) % 2 == 0 {
                pairs.push((m, n));
            }
        }
    }
    pairs
}

/// `∫_a^b ψₘψₙ dx` for the given pairs.
fn overlap_integrals(pairs: &[(usize, usize)], n_max: usize, a: f64, b: f64) -> Result<Vec<f64>> {
    let settings = oracle_quadrature();
    let (values, _) = integrate_vec(
        |x, out| {
            let mut psi = vec![0.0; n_max + 1];
            hermite_functions(x, &mut psi);
            for (slot, &(m, n)) in out.iter_mut().zip(pairs) {
                *slot = psi[m] * psi[n];
            }
        },
        pairs.len(),
        a,
        b,
        &settings,
    )?;
    Ok(values)
}

/// i^k for integer k.
fn i_pow(k: i64) -> Complex64 {
    match k.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    pub matrix: DMatrix<Complex64>,
    pub hermitian: bool,
}

impl FockOperator {
    pub fn identity(n_max: usize) -> Self {
        Self {
            matrix: DMatrix::identity(n_max + 1, n_max + 1),
            hermitian: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `⟨bra|M|ket⟩`.
    pub fn sandwich(&self, bra: &FockVector, ket: &FockVector) -> Result<Complex64> {
        if bra.dim() != self.dim() || ket.dim() != self.dim() {
            return Err(Error::DimensionMismatch(self.dim(), bra.dim().max(ket.dim())));
        }
        let mut acc = C_ZERO;
        for i in 0..self.dim() {
            let bi = bra.amplitudes[i].conj();
            if bi == C_ZERO {
                continue;
            }
            let row: Complex64 = (0..self.dim()).map(|j| self.matrix[(i, j)] * ket.amplitudes[j]).sum();
            acc += bi * row;
        }
        Ok(acc)
    }

    /// `max|M − M†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Smallest and largest eigenvalue of the Hermitian part.
    pub fn spectral_bounds(&self) -> (f64, f64) {
        let h = (&self.matrix + self.matrix.adjoint()) * Complex64::new(0.5, 0.0);
        let ev = h.symmetric_eigenvalues();
        (ev.min(), ev.max())
    }

    /// Max-abs entry of `P² − P` for `P = (M + 𝟙)/2`.
    pub fn projector_defect(&self) -> f64 {
        let d = self.dim();
        let p = (&self.matrix + DMatrix::<Complex64>::identity(d, d)) * Complex64::new(0.5, 0.0);
        let diff = &p * &p - &p;
        diff.iter().fold(0.0f64, |m, z| m.max(z.norm()))
    }
}

/// `B₀ = 2∫_{−b}^{b}|x⟩⟨x|dx − 𝟙`. Odd-parity elements vanish exactly.
pub fn x_bin_operator(b: f64, n_max: usize) -> Result<FockOperator> {
    if b.is_nan() || b <= 0.0 {
        return Err(Error::OutOfRange {
            field: "b",
            bound: "(0, ∞)",
            value: b,
        });
    }
    let pairs = index_pairs(n_max, true);
    let half = overlap_integrals(&pairs, n_max, 0.0, b.min(support_edge(n_max)))?;
    let d = n_max + 1;
    let mut matrix = DMatrix::from_element(d, d, C_ZERO);
    for (&(m, n), v) in pairs.iter().zip(&half) {
        // The product of equal-parity Hermite functions is even: ∫_{−b}^{b} = 2∫_0^b.
        let proj = 2.0 * v;
        let entry = Complex64::new(2.0 * proj - if m == n { 1.0 } else { 0.0 }, 0.0);
        matrix[(m, n)] = entry;
        matrix[(n, m)] = entry;
    }
    Ok(FockOperator { matrix, hermitian: true })
}

/// `B₁ = 2∫_{−∞}^{threshold}|p⟩⟨p|dp − 𝟙`, with `⟨m|p⟩⟨p|n⟩ = i^{m−n}ψₘ(p)ψₙ(p)`.
pub fn p_threshold_operator(threshold: f64, n_max: usize) -> Result<FockOperator> {
    if threshold.is_nan() {
        return Err(Error::Invalid("p threshold is NaN".into()));
    }
    let edge = support_edge(n_max);
    let pairs = index_pairs(n_max, false);
    let upper = threshold.min(edge);
    let values = if upper <= -edge {
        vec![0.0; pairs.len()]
    } else {
        overlap_integrals(&pairs, n_max, -edge, upper)?
    };
    let d = n_max + 1;
    let mut matrix = DMatrix::from_element(d, d, C_ZERO);
    for (&(m, n), v) in pairs.iter().zip(&values) {
        let diag = if m == n { 1.0 } else { 0.0 };
        let entry = i_pow(m as i64 - n as i64) * (2.0 * v) - Complex64::new(diag, 0.0);
        matrix[(m, n)] = entry;
        matrix[(n, m)] = entry.conj();
    }
    Ok(FockOperator { matrix, hermitian: true })
}

/// No-click observable with efficiency η: `diag(2(1−η)ⁿ − 1)`.
pub fn noclick_operator(eta: f64, n_max: usize) -> Result<FockOperator> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::OutOfRange {
            field: "eta",
            bound: "[0,1]",
            value: eta,
        });
    }
    let d = n_max + 1;
    let mut matrix = DMatrix::from_element(d, d, C_ZERO);
    for n in 0..d {
        matrix[(n, n)] = Complex64::new(2.0 * (1.0 - eta).powi(n as i32) - 1.0, 0.0);
    }
    Ok(FockOperator { matrix, hermitian: true })
}

/// Atom-field state after line loss.
///
/// `branch_s` and `branch_g` carry the weights `cos ν` and `sin ν`; the
/// off-diagonal block of the density operator is scaled by `decoherence_v`.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridState {
    pub branch_s: FockVector,
    pub branch_g: FockVector,
    pub decoherence_v: f64,
}

impl HybridState {
    pub fn n_max(&self) -> usize {
        self.branch_s.n_max()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.branch_s.norm_sqr() + self.branch_g.norm_sqr()
    }

    /// Density operator on atom ⊗ field, atom index 0 = `|s⟩`, 1 = `|g⟩`.
    pub fn density(&self) -> DMatrix<Complex64> {
        let d = self.branch_s.dim();
        let branches = [&self.branch_s, &self.branch_g];
        DMatrix::from_fn(2 * d, 2 * d, |r, c| {
            let (ai, k) = (r / d, r % d);
            let (aj, l) = (c / d, c % d);
            let w = if ai == aj { 1.0 } else { self.decoherence_v };
            branches[ai].amplitudes[k] * branches[aj].amplitudes[l].conj() * w
        })
    }
}

/// The hybrid state after a line of transmission `t_line`, truncated at
/// `n_max` (default: [`truncation_for`] of `|α|`).
pub fn lossy_hybrid_state(state: &StateSpec, t_line: f64, n_max: Option<usize>) -> Result<HybridState> {
    let state = state.validate()?;
    ChannelSpec::new(t_line, 1.0, 1.0)?;
    let n = n_max.unwrap_or_else(|| truncation_for(state.alpha_mag));
    let alpha = ALPHA_PHASE * state.alpha_mag;
    let vacuum = coherent_fock(C_ZERO, n)?;
    let field_g = coherent_fock(alpha * t_line.sqrt(), n)?;
    let env_g = coherent_fock(alpha * (1.0 - t_line).sqrt(), n)?;
    let (sin, cos) = state.nu.sin_cos();
    Ok(HybridState {
        branch_s: vacuum.scaled(Complex64::new(cos, 0.0)),
        branch_g: field_g.scaled(Complex64::new(sin, 0.0)),
        decoherence_v: vacuum.inner(&env_g).norm(),
    })
}

/// Same atom-field state built by acting with a beamsplitter on the field and a
/// vacuum environment mode, then tracing the environment out. Intended for
/// small `n_max` as a check on the rank-2 shortcut.
pub fn beamsplitter_reduced_density(state: &StateSpec, t_line: f64, n_max: usize) -> Result<DMatrix<Complex64>> {
    let state = state.validate()?;
    let d = n_max + 1;
    let input = coherent_fock(ALPHA_PHASE * state.alpha_mag, n_max)?;
    let (t, r) = (t_line.sqrt(), (1.0 - t_line).sqrt());
    let (sin, cos) = state.nu.sin_cos();
    // psi[atom][field k][env j]
    let mut psi = vec![vec![vec![C_ZERO; d]; d]; 2];
    psi[0][0][0] = Complex64::new(cos, 0.0);
    let mut binom = vec![1.0f64];
    for n in 0..d {
        if n > 0 {
            let mut next = vec![1.0; n + 1];
            for k in 1..n {
                next[k] = binom[k - 1] + binom[k];
            }
            binom = next;
        }
        for k in 0..=n {
            let amp = binom[k].sqrt() * t.powi(k as i32) * r.powi((n - k) as i32);
            psi[1][k][n - k] += input.amplitudes[n] * amp * sin;
        }
    }
    Ok(DMatrix::from_fn(2 * d, 2 * d, |row, col| {
        let (a, k) = (row / d, row % d);
        let (b, l) = (col / d, col % d);
        (0..d).map(|j| psi[a][k][j] * psi[b][l][j].conj()).sum()
    }))
}

fn atom_operator(gamma: f64, sign: f64) -> DMatrix<Complex64> {
    let (s, c) = gamma.sin_cos();
    // cos γ σz ± sin γ σx in the {|s⟩, |g⟩} basis, σz|s⟩ = |s⟩.
    DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(c, 0.0),
            Complex64::new(sign * s, 0.0),
            Complex64::new(sign * s, 0.0),
            Complex64::new(-c, 0.0),
        ],
    )
}

fn trace_product(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> Complex64 {
    let n = a.nrows();
    let mut acc = C_ZERO;
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// `⟨A₀B₁⟩ + ⟨A₁B₁⟩ + ⟨A₀B₀⟩ − ⟨A₁B₀⟩` by direct trace against the density operator.
pub fn chsh_expectation(hybrid: &HybridState, gamma: f64, b0: &FockOperator, b1: &FockOperator) -> Result<f64> {
    let d = hybrid.branch_s.dim();
    for op in [b0, b1] {
        if op.dim() != d {
            return Err(Error::DimensionMismatch(d, op.dim()));
        }
    }
    let rho = hybrid.density();
    let a0 = atom_operator(gamma, 1.0);
    let a1 = atom_operator(gamma, -1.0);
    let corr = |a: &DMatrix<Complex64>, b: &FockOperator| trace_product(&a.kronecker(&b.matrix), &rho).re;
    Ok(corr(&a0, b1) + corr(&a1, b1) + corr(&a0, b0) - corr(&a1, b0))
}

/// Coefficients from explicit operators (Born-rule photocounting).
///
/// The two-homodyne `B₁` threshold is the midpoint of the P distributions of the
/// two field branches, `√T|α|/√2`.
pub fn oracle_coefficients(
    alpha_mag: f64,
    channel: &ChannelSpec,
    kind: ScenarioKind,
    b: f64,
    n_max: Option<usize>,
) -> Result<Coefficients> {
    let channel = channel.validate()?;
    let n = n_max.unwrap_or_else(|| truncation_for(alpha_mag));
    let alpha = ALPHA_PHASE * alpha_mag;
    let vacuum = coherent_fock(C_ZERO, n)?;
    let beta = coherent_fock(alpha * channel.t_line.sqrt(), n)?;
    let env = coherent_fock(alpha * (1.0 - channel.t_line).sqrt(), n)?;
    let v = vacuum.inner(&env).norm();

    let b0 = x_bin_operator(b, n)?;
    let c1 = 0.5 * v * (b0.sandwich(&vacuum, &beta)? + b0.sandwich(&beta, &vacuum)?).re;
    let b1 = match kind {
        ScenarioKind::Photocount => noclick_operator(channel.eta, n)?,
        ScenarioKind::TwoHomodyne => {
            p_threshold_operator(channel.t_line.sqrt() * alpha_mag / std::f64::consts::SQRT_2, n)?
        }
    };
    let c2 = b1.sandwich(&vacuum, &vacuum)?.re;
    let c3 = b1.sandwich(&beta, &beta)?.re;
    Ok(Coefficients::new(c1, c2, c3))
}

/// `‖cos ν|−a⟩ + sin ν|a⟩‖²` from truncated Fock vectors.
pub fn cat_norm_sqr(nu: f64, cat_alpha: Complex64, n_max: usize) -> Result<f64> {
    let (sin, cos) = nu.sin_cos();
    let minus = coherent_fock(-cat_alpha, n_max)?.scaled(Complex64::new(cos, 0.0));
    let plus = coherent_fock(cat_alpha, n_max)?.scaled(Complex64::new(sin, 0.0));
    Ok(minus.add(&plus).norm_sqr())
}

/// Probability of projecting the atom on `(|s⟩ + |g⟩)/√2` in the lossless hybrid state.
pub fn heralding_probability_fock(state: &StateSpec, n_max: Option<usize>) -> Result<f64> {
    let h = lossy_hybrid_state(state, 1.0, n_max)?;
    Ok(0.5 * h.branch_s.add(&h.branch_g).norm_sqr())
}
