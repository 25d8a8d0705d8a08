//! Hermite functions, harmonic-oscillator eigenpairs in the moving variable
//! ξ(x,t) = (γ₃(t) + β₃x)/α₂, the quantized invariant eigenvalues
//!
//! ```text
//! λ_{n,s}^± = α₁ + γ₁ + β₃ s √(μ(2n+1±1)),      λ_{n+1}^− = λ_n^+,
//! ```
//!
//! and the spinor eigenfunction assembly. The eigenproblem decouples into the
//! supersymmetric pair I_± = L_∓L_± with L_± = p_x ± iW, W(x,t) = ξ(x,t); in
//! ξ these are harmonic oscillators of frequency μ, so the eigenfunctions are
//!
//! ```text
//! χ_n(ξ) = (2ⁿn!)^{−1/2} (μ/π)^{1/4} e^{−μξ²/2} H_n(√μ ξ),  λ̃_n = μ(n+½).
//! ```
//!
//! L_+ creates (L_+χ_n ∝ i χ_{n+1}), so the paired spinor carries oscillator
//! indices (n, n+1) across its components — the ladder pairing — and the
//! unpaired zero mode (λ = α₁+γ₁) lives entirely in the lower component.
//! The equal-index pairing (χ_n, χ_n) used by the phase cancellation argument
//! is kept selectable for comparison; it is not an eigenvector for n ≥ 1.

use crate::error::{Error, Result};
use crate::operators::{px_field, DerivativeMethod, Grid1D, SpinorGridField};
use crate::scenario::ScenarioParams;
use crate::C64;

/// Physicists' Hermite polynomial H_n(x) by the three-term recurrence
/// H_{n+1} = 2x H_n − 2n H_{n−1}.
///
/// Values overflow doubles well past n = 64; larger indices must go through
/// the normalized eigenfunction recurrence instead.
pub fn hermite(n: usize, x: f64) -> Result<f64> {
    if n > 64 {
        return Err(Error::usage(format!(
            "hermite(n = {n}) would overflow; use ho_eigenfunction for large n"
        )));
    }
    let mut h_prev = 1.0;
    if n == 0 {
        return Ok(h_prev);
    }
    let mut h = 2.0 * x;
    for m in 1..n {
        let next = 2.0 * x * h - 2.0 * m as f64 * h_prev;
        h_prev = h;
        h = next;
    }
    Ok(h)
}

/// Normalized oscillator eigenfunction χ_n(ξ) for frequency μ, evaluated with
/// the stable normalized recurrence
/// χ_{m+1} = z √(2/(m+1)) χ_m − √(m/(m+1)) χ_{m−1}, z = √μ ξ,
/// which carries the Gaussian and the 1/√(2ⁿn!) factor along and never forms
/// the overflowing unnormalized pieces.
pub fn ho_eigenfunction(n: usize, mu: f64, xi: f64) -> Result<f64> {
    if !(mu > 0.0) {
        return Err(Error::domain(format!("ho_eigenfunction needs mu > 0, got {mu}")));
    }
    let z = mu.sqrt() * xi;
    let mut chi_prev = 0.0;
    let mut chi = (mu / std::f64::consts::PI).powf(0.25) * (-0.5 * z * z).exp();
    for m in 0..n {
        let m = m as f64;
        let next = z * (2.0 / (m + 1.0)).sqrt() * chi - (m / (m + 1.0)).sqrt() * chi_prev;
        chi_prev = chi;
        chi = next;
    }
    Ok(chi)
}

/// Oscillator eigenvalue λ̃_n = μ(n + ½).
pub fn lambda_tilde(n: usize, mu: f64) -> Result<f64> {
    if !(mu > 0.0) {
        return Err(Error::domain(format!("lambda_tilde needs mu > 0, got {mu}")));
    }
    Ok(mu * (n as f64 + 0.5))
}

/// The sign s = ±1 in front of the square root of λ_{n,s}^±.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// The ± branch inside the radicand √(μ(2n+1±1)).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

/// Which oscillator indices the two spinor components carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pairing {
    /// (χ_n, isχ_{n+1}) — the actual eigenvectors of I(t).
    Ladder,
    /// (χ_n, sχ_n) — the equal-index construction of the phase argument.
    EqualIndex,
}

/// Component normalization convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// Every nonzero component has unit L² norm (total √2 for paired states).
    PerComponent,
    /// The whole spinor has unit L² norm.
    Total,
}

/// λ_{n,s}^± = α₁ + γ₁ + β₃ s √(μ(2n+1±1)).
pub fn invariant_eigenvalue(params: &ScenarioParams, n: usize, s: Sign, branch: Branch) -> f64 {
    let radicand = params.mu()
        * match branch {
            Branch::Plus => 2.0 * n as f64 + 2.0,
            Branch::Minus => 2.0 * n as f64,
        };
    params.alpha1 + params.gamma1 + params.beta3 * s.value() * radicand.sqrt()
}

/// The moving coordinate ξ(x,t) = (γ₃(t) + β₃x)/α₂ and its inverse.
#[derive(Debug, Clone, Copy)]
pub struct XiMap {
    pub gamma3: f64,
    pub beta3: f64,
    pub alpha2: f64,
}

impl XiMap {
    pub fn for_params(params: &ScenarioParams, t: f64) -> Result<Self> {
        Ok(XiMap {
            gamma3: params.gamma3_of_t(t)?,
            beta3: params.beta3,
            alpha2: params.alpha2,
        })
    }

    pub fn xi(&self, x: f64) -> f64 {
        (self.gamma3 + self.beta3 * x) / self.alpha2
    }

    pub fn x_of_xi(&self, xi: f64) -> f64 {
        (self.alpha2 * xi - self.gamma3) / self.beta3
    }
}

/// W(x,t) = [γ₃(t) + β₃x]/α₂, identical to ξ(x,t) by construction.
pub fn superpotential(params: &ScenarioParams, x: f64, t: f64) -> Result<f64> {
    Ok(XiMap::for_params(params, t)?.xi(x))
}

/// One normalized oscillator eigenfunction as a reusable value.
#[derive(Debug, Clone, Copy)]
pub struct OscillatorState {
    pub n: usize,
    pub mu: f64,
}

impl OscillatorState {
    pub fn new(n: usize, mu: f64) -> Result<Self> {
        if !(mu > 0.0) {
            return Err(Error::domain(format!("oscillator state needs mu > 0, got {mu}")));
        }
        Ok(OscillatorState { n, mu })
    }

    pub fn eval(&self, xi: f64) -> f64 {
        ho_eigenfunction(self.n, self.mu, xi).expect("mu validated at construction")
    }

    /// Half-width in ξ covering the classical turning point plus `sigmas`
    /// Gaussian widths.
    pub fn halfwidth(&self, sigmas: f64) -> f64 {
        ((2.0 * self.n as f64 + 1.0) / self.mu).sqrt() + sigmas / self.mu.sqrt()
    }
}

/// A quantized invariant eigenpair plus the recipe that materializes its
/// spinor eigenfunction at any time.
#[derive(Debug, Clone, Copy)]
pub struct EigenSolution {
    pub n: usize,
    pub s: Sign,
    pub branch: Branch,
    pub lambda: f64,
    pub pairing: Pairing,
    pub normalization: Normalization,
}

impl EigenSolution {
    pub fn new(
        params: &ScenarioParams,
        n: usize,
        s: Sign,
        branch: Branch,
        pairing: Pairing,
        normalization: Normalization,
    ) -> Self {
        EigenSolution {
            n,
            s,
            branch,
            lambda: invariant_eigenvalue(params, n, s, branch),
            pairing,
            normalization,
        }
    }

    /// λ − α₁ − γ₁, the SUSY block eigenvalue.
    pub fn lambda_reduced(&self, params: &ScenarioParams) -> f64 {
        self.lambda - params.alpha1 - params.gamma1
    }

    /// Oscillator indices (upper, lower); `None` marks an absent component.
    /// Under the ladder pairing the branch− states are the branch+ states of
    /// n−1 (the ladder identity λ_{n+1}^− = λ_n^+), and (0, −) is the
    /// unpaired zero mode living in the lower component.
    pub fn component_indices(&self) -> (Option<usize>, Option<usize>) {
        match self.pairing {
            Pairing::EqualIndex => (Some(self.n), Some(self.n)),
            Pairing::Ladder => match self.branch {
                Branch::Plus => (Some(self.n), Some(self.n + 1)),
                Branch::Minus => {
                    if self.n == 0 {
                        (None, Some(0))
                    } else {
                        (Some(self.n - 1), Some(self.n))
                    }
                }
            },
        }
    }

    /// Largest oscillator index either component carries.
    pub fn max_index(&self) -> usize {
        let (up, low) = self.component_indices();
        up.unwrap_or(0).max(low.unwrap_or(0))
    }
}

/// Grid sized by the spec rule: ξ-half-width √((2m+3)/μ) + σ/√μ around ξ=0
/// with m the state's top oscillator index, mapped back through x(ξ,t).
pub fn grid_for_state(
    params: &ScenarioParams,
    eig: &EigenSolution,
    t: f64,
    n_points: usize,
    sigmas: f64,
) -> Result<Grid1D> {
    grid_for_window(params, eig, t, t, n_points, sigmas)
}

/// Like [`grid_for_state`] but covering the moving center x(0,t) = −γ₃/β₃
/// over a whole time span (γ₃ is monotone, so the endpoints bound it).
pub fn grid_for_window(
    params: &ScenarioParams,
    eig: &EigenSolution,
    t0: f64,
    t1: f64,
    n_points: usize,
    sigmas: f64,
) -> Result<Grid1D> {
    let mu = params.mu();
    let m = eig.max_index() as f64;
    let half_xi = ((2.0 * m + 3.0) / mu).sqrt() + sigmas / mu.sqrt();
    let half_x = mu * half_xi; // |dx/dξ| = |α₂/β₃| = μ
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..=8 {
        let t = t0 + (t1 - t0) * i as f64 / 8.0;
        let center = XiMap::for_params(params, t)?.x_of_xi(0.0);
        lo = lo.min(center - half_x);
        hi = hi.max(center + half_x);
    }
    Grid1D::new(lo, hi, n_points)
}

fn normalized_component(
    grid: &Grid1D,
    xi_map: &XiMap,
    state: &OscillatorState,
) -> Result<Vec<C64>> {
    let mut values: Vec<C64> = grid
        .points()
        .iter()
        .map(|&x| C64::new(state.eval(xi_map.xi(x)), 0.0))
        .collect();
    // raw grid norm² should be μ (unit in dξ, dx = μ dξ); below 0.999² of
    // that the grid is clipping the state
    let h = grid.spacing();
    let mut raw_sqr = 0.0;
    for (i, v) in values.iter().enumerate() {
        let w = if i == 0 || i == grid.n_points - 1 { 0.5 * h } else { h };
        raw_sqr += v.norm_sqr() * w;
    }
    let mu = xi_map.alpha2 / xi_map.beta3;
    let coverage = (raw_sqr / mu.abs()).sqrt();
    if coverage < 0.999 {
        return Err(Error::Resolution(format!(
            "grid too narrow for oscillator index {}: coverage {coverage:.6} < 0.999 \
             (widen the grid or raise --grid-halfwidth-sigma)",
            state.n
        )));
    }
    let inv = 1.0 / raw_sqr.sqrt();
    for v in values.iter_mut() {
        *v *= inv;
    }
    Ok(values)
}

/// Materialize the spinor eigenfunction of `eig` at time `t` on `grid`.
///
/// The upper component is χ at its oscillator index; under the ladder pairing
/// the lower component is built by applying L_+ = p_x + iW(x,t) to the upper
/// and normalizing (which lands on i·χ_{n+1} — the oscillator ladder), then
/// fixing the relative sign by s. Components are individually unit-norm under
/// [`Normalization::PerComponent`]; [`Normalization::Total`] rescales the
/// whole spinor to norm 1.
pub fn assemble_spinor(
    params: &ScenarioParams,
    eig: &EigenSolution,
    t: f64,
    grid: &Grid1D,
) -> Result<SpinorGridField> {
    if !params.window_contains(t) {
        return Err(Error::domain(format!("t = {t} outside scenario window")));
    }
    let xi_map = XiMap::for_params(params, t)?;
    let mu = params.mu();
    let (up_idx, low_idx) = eig.component_indices();
    let mut field = SpinorGridField::zeros(*grid);
    let method = DerivativeMethod::auto_for(grid);

    if let Some(nu) = up_idx {
        field.upper = normalized_component(grid, &xi_map, &OscillatorState::new(nu, mu)?)?;
    }

    match (up_idx, low_idx, eig.pairing) {
        (Some(_), Some(_), Pairing::EqualIndex) => {
            let s = C64::new(eig.s.value(), 0.0);
            field.lower = field.upper.iter().map(|v| v * s).collect();
        }
        (None, Some(nl), _) => {
            // unpaired zero mode: lower = χ_0, upper stays zero
            field.lower = normalized_component(grid, &xi_map, &OscillatorState::new(nl, mu)?)?;
        }
        (Some(_), Some(nl), Pairing::Ladder) => {
            // verify the target index fits the grid before differentiating
            normalized_component(grid, &xi_map, &OscillatorState::new(nl, mu)?)?;
            let mut ladder = px_field(&field, method)?;
            for (j, v) in ladder.upper.iter_mut().enumerate() {
                let w = xi_map.xi(grid.point(j));
                *v += C64::new(0.0, w) * field.upper[j];
            }
            let (norm_up, _) = ladder.component_norms();
            let scale = C64::new(eig.s.value() / norm_up, 0.0);
            field.lower = ladder.upper.iter().map(|v| v * scale).collect();
        }
        (_, None, _) => unreachable!("every pairing yields a lower component"),
    }

    if eig.normalization == Normalization::Total {
        let n = field.norm();
        field.scale(C64::new(1.0 / n, 0.0));
    }
    Ok(field)
}
