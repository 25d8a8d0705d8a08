//! Grid discretizations of Ĥ(t) and I(t) and the residuals verifying the
//! invariant evolution equation ∂_t I + (1/i)[I, Ĥ] = 0 and the eigenvalue
//! equation I(t)χ = λχ.
//!
//! The momentum operator is spectral (Fourier) by default with a 4th-order
//! central-difference fallback; the eigenfunctions are Gaussian-localized, so
//! the implied periodic wrap is harmless once the grid covers their support.
//! Grid inner products use trapezoidal weights.

use crate::error::{Error, Result};
use crate::report::ResidualReport;
use crate::scenario::ScenarioParams;
use crate::spectrum::EigenSolution;
use crate::C64;
use rustfft::FftPlanner;
use std::sync::Mutex;

/// Uniform 1D grid, endpoints inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if n_points < 16 {
            return Err(Error::usage(format!("grid needs >= 16 points, got {n_points}")));
        }
        if !(x_max > x_min) {
            return Err(Error::domain(format!(
                "grid needs x_max > x_min, got [{x_min}, {x_max}]"
            )));
        }
        Ok(Grid1D { x_min, x_max, n_points })
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.point(i)).collect()
    }

    /// Trapezoid weight of node `i`.
    pub(crate) fn weight(&self, i: usize) -> f64 {
        let h = self.spacing();
        if i == 0 || i == self.n_points - 1 {
            0.5 * h
        } else {
            h
        }
    }
}

/// Two complex component arrays (φ₊, φ₋) over a grid.
#[derive(Debug, Clone)]
pub struct SpinorGridField {
    pub grid: Grid1D,
    pub upper: Vec<C64>,
    pub lower: Vec<C64>,
}

impl SpinorGridField {
    pub fn zeros(grid: Grid1D) -> Self {
        SpinorGridField {
            grid,
            upper: vec![C64::ZERO; grid.n_points],
            lower: vec![C64::ZERO; grid.n_points],
        }
    }

    pub fn from_fn(
        grid: Grid1D,
        mut up: impl FnMut(f64) -> C64,
        mut low: impl FnMut(f64) -> C64,
    ) -> Self {
        let mut f = SpinorGridField::zeros(grid);
        for i in 0..grid.n_points {
            let x = grid.point(i);
            f.upper[i] = up(x);
            f.lower[i] = low(x);
        }
        f
    }

    /// ⟨self|other⟩ = Σ w (ū v + l̄ m) with trapezoid weights.
    pub fn inner(&self, other: &SpinorGridField) -> C64 {
        debug_assert_eq!(self.grid, other.grid);
        let mut acc = C64::ZERO;
        for i in 0..self.grid.n_points {
            let w = self.grid.weight(i);
            acc += (self.upper[i].conj() * other.upper[i]
                + self.lower[i].conj() * other.lower[i])
                * w;
        }
        acc
    }

    pub fn norm_sqr(&self) -> f64 {
        self.inner(self).re
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn component_norms(&self) -> (f64, f64) {
        let mut up = 0.0;
        let mut low = 0.0;
        for i in 0..self.grid.n_points {
            let w = self.grid.weight(i);
            up += self.upper[i].norm_sqr() * w;
            low += self.lower[i].norm_sqr() * w;
        }
        (up.sqrt(), low.sqrt())
    }

    pub fn scale(&mut self, s: C64) {
        for v in self.upper.iter_mut().chain(self.lower.iter_mut()) {
            *v *= s;
        }
    }

    pub fn scaled(&self, s: C64) -> Self {
        let mut f = self.clone();
        f.scale(s);
        f
    }

    pub fn add(&self, other: &SpinorGridField) -> Self {
        debug_assert_eq!(self.grid, other.grid);
        let mut f = self.clone();
        for i in 0..f.upper.len() {
            f.upper[i] += other.upper[i];
            f.lower[i] += other.lower[i];
        }
        f
    }

    pub fn sub(&self, other: &SpinorGridField) -> Self {
        self.add(&other.scaled(C64::new(-1.0, 0.0)))
    }

    /// self += c · other
    pub fn axpy(&mut self, c: C64, other: &SpinorGridField) {
        for i in 0..self.upper.len() {
            self.upper[i] += c * other.upper[i];
            self.lower[i] += c * other.lower[i];
        }
    }

    /// Largest |value| on the two edge nodes of either component.
    pub fn max_boundary_abs(&self) -> f64 {
        let n = self.grid.n_points;
        [self.upper[0], self.upper[n - 1], self.lower[0], self.lower[n - 1]]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Momentum discretization choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeMethod {
    Spectral,
    Central4,
}

impl DerivativeMethod {
    /// Spectral where the grid allows it, else the 4th-order stencil.
    pub fn auto_for(grid: &Grid1D) -> Self {
        if grid.n_points.is_power_of_two() {
            DerivativeMethod::Spectral
        } else {
            DerivativeMethod::Central4
        }
    }
}

static PLANNER: Mutex<Option<FftPlanner<f64>>> = Mutex::new(None);

fn fft_forward_inverse(
    n: usize,
) -> (std::sync::Arc<dyn rustfft::Fft<f64>>, std::sync::Arc<dyn rustfft::Fft<f64>>) {
    let mut guard = PLANNER.lock().expect("fft planner lock");
    let planner = guard.get_or_insert_with(FftPlanner::new);
    (planner.plan_fft_forward(n), planner.plan_fft_inverse(n))
}

/// k_j of an N-point FFT with period N·h; the Nyquist mode is zeroed to keep
/// the derivative of real data real.
fn wavenumbers(n: usize, h: f64) -> Vec<f64> {
    let dk = 2.0 * std::f64::consts::PI / (n as f64 * h);
    (0..n)
        .map(|j| {
            if 2 * j < n {
                j as f64 * dk
            } else if 2 * j == n {
                0.0
            } else {
                (j as f64 - n as f64) * dk
            }
        })
        .collect()
}

fn px_component_spectral(values: &mut [C64], h: f64) {
    let n = values.len();
    let (fwd, inv) = fft_forward_inverse(n);
    fwd.process(values);
    let ks = wavenumbers(n, h);
    let scale = 1.0 / n as f64;
    for (v, k) in values.iter_mut().zip(ks) {
        *v *= k * scale; // p_x = F⁻¹ diag(k) F
    }
    inv.process(values);
}

fn px_component_central4(values: &[C64], h: f64) -> Vec<C64> {
    let n = values.len();
    let c = C64::new(0.0, -1.0) / (12.0 * h);
    (0..n)
        .map(|i| {
            let ip1 = values[(i + 1) % n];
            let ip2 = values[(i + 2) % n];
            let im1 = values[(i + n - 1) % n];
            let im2 = values[(i + n - 2) % n];
            c * (-ip2 + ip1 * 8.0 - im1 * 8.0 + im2)
        })
        .collect()
}

pub(crate) fn px_field(field: &SpinorGridField, method: DerivativeMethod) -> Result<SpinorGridField> {
    let h = field.grid.spacing();
    match method {
        DerivativeMethod::Spectral => {
            if !field.grid.n_points.is_power_of_two() {
                return Err(Error::usage(format!(
                    "spectral derivative needs a power-of-two grid, got {} points",
                    field.grid.n_points
                )));
            }
            let mut out = field.clone();
            px_component_spectral(&mut out.upper, h);
            px_component_spectral(&mut out.lower, h);
            Ok(out)
        }
        DerivativeMethod::Central4 => {
            let mut out = field.clone();
            out.upper = px_component_central4(&field.upper, h);
            out.lower = px_component_central4(&field.lower, h);
            Ok(out)
        }
    }
}

/// Output of [`apply_px`]: spectral differentiation implies periodic wrap, so
/// fields must be negligible at the grid edges (|value| < 1e-10) for the
/// result to be trustworthy; `boundary_warning` flags a violation.
pub struct PxOutput {
    pub field: SpinorGridField,
    pub boundary_warning: bool,
}

/// Componentwise p_x = −i d/dx.
pub fn apply_px(field: &SpinorGridField, method: DerivativeMethod) -> Result<PxOutput> {
    let boundary_warning = field.max_boundary_abs() >= 1e-10;
    Ok(PxOutput {
        field: px_field(field, method)?,
        boundary_warning,
    })
}

type ScalarFn = Box<dyn Fn(f64) -> Result<f64> + Send + Sync>;

/// Matrix-free Ĥ(t) = a(t) σ_x p_x + [kb(t) + g(t) x] σ_y − ω𝕀.
pub struct Hamiltonian {
    a: ScalarFn,
    g: ScalarFn,
    kb: ScalarFn,
    pub omega: f64,
    pub method: DerivativeMethod,
}

impl Hamiltonian {
    pub fn from_params(params: &ScenarioParams, method: DerivativeMethod) -> Self {
        let pa = params.clone();
        let pg = params.clone();
        let pk = params.clone();
        Hamiltonian {
            a: Box::new(move |t| pa.a_of_t(t)),
            g: Box::new(move |t| pg.g_of_t(t)),
            kb: Box::new(move |t| Ok(pk.k * pk.b_of_t(t))),
            omega: params.omega,
            method,
        }
    }

    /// Frozen-profile Hamiltonian with constant a, g, kb (Landau limit).
    pub fn static_fields(a: f64, g: f64, kb: f64, omega: f64, method: DerivativeMethod) -> Self {
        Hamiltonian {
            a: Box::new(move |_| Ok(a)),
            g: Box::new(move |_| Ok(g)),
            kb: Box::new(move |_| Ok(kb)),
            omega,
            method,
        }
    }

    pub fn apply(&self, t: f64, field: &SpinorGridField) -> Result<SpinorGridField> {
        let a = (self.a)(t)?;
        let g = (self.g)(t)?;
        let kb = (self.kb)(t)?;
        let p = px_field(field, self.method)?;
        let mut out = SpinorGridField::zeros(field.grid);
        let i = C64::new(0.0, 1.0);
        for j in 0..field.grid.n_points {
            let v = kb + g * field.grid.point(j);
            out.upper[j] = a * p.lower[j] - i * v * field.lower[j] - self.omega * field.upper[j];
            out.lower[j] = a * p.upper[j] + i * v * field.upper[j] - self.omega * field.lower[j];
        }
        Ok(out)
    }
}

/// Matrix-free I(t) = (α₁p_x + γ₁)𝕀 + α₂ p_x σ_x + [β₃x + γ₃(t)] σ_y.
pub struct Invariant {
    pub alpha1: f64,
    pub gamma1: f64,
    pub alpha2: f64,
    pub beta3: f64,
    gamma3: ScalarFn,
    pub method: DerivativeMethod,
}

impl Invariant {
    pub fn from_params(params: &ScenarioParams, method: DerivativeMethod) -> Self {
        let p = params.clone();
        Invariant {
            alpha1: params.alpha1,
            gamma1: params.gamma1,
            alpha2: params.alpha2,
            beta3: params.beta3,
            gamma3: Box::new(move |t| p.gamma3_of_t(t)),
            method,
        }
    }

    /// Negative control: γ₃ frozen at its t₀ value while Ĥ(t) keeps moving.
    pub fn frozen_gamma3(params: &ScenarioParams, t0: f64, method: DerivativeMethod) -> Result<Self> {
        let g3 = params.gamma3_of_t(t0)?;
        Ok(Invariant {
            alpha1: params.alpha1,
            gamma1: params.gamma1,
            alpha2: params.alpha2,
            beta3: params.beta3,
            gamma3: Box::new(move |_| Ok(g3)),
            method,
        })
    }

    pub fn with_constant_gamma3(params: &ScenarioParams, gamma3: f64, method: DerivativeMethod) -> Self {
        Invariant {
            alpha1: params.alpha1,
            gamma1: params.gamma1,
            alpha2: params.alpha2,
            beta3: params.beta3,
            gamma3: Box::new(move |_| Ok(gamma3)),
            method,
        }
    }

    pub fn apply(&self, t: f64, field: &SpinorGridField) -> Result<SpinorGridField> {
        let gamma3 = (self.gamma3)(t)?;
        let p = px_field(field, self.method)?;
        let mut out = SpinorGridField::zeros(field.grid);
        let i = C64::new(0.0, 1.0);
        for j in 0..field.grid.n_points {
            let v = self.beta3 * field.grid.point(j) + gamma3;
            out.upper[j] = self.alpha1 * p.upper[j] + self.gamma1 * field.upper[j]
                + self.alpha2 * p.lower[j]
                - i * v * field.lower[j];
            out.lower[j] = self.alpha1 * p.lower[j] + self.gamma1 * field.lower[j]
                + self.alpha2 * p.upper[j]
                + i * v * field.upper[j];
        }
        Ok(out)
    }
}

/// Ĥ(t)Φ through the scenario's profiles.
pub fn apply_hamiltonian(
    params: &ScenarioParams,
    t: f64,
    field: &SpinorGridField,
) -> Result<SpinorGridField> {
    if !params.window_contains(t) {
        return Err(Error::domain(format!("t = {t} outside scenario window")));
    }
    Hamiltonian::from_params(params, DerivativeMethod::auto_for(&field.grid)).apply(t, field)
}

/// I(t)Φ through the scenario's γ₃.
pub fn apply_invariant(
    params: &ScenarioParams,
    t: f64,
    field: &SpinorGridField,
) -> Result<SpinorGridField> {
    if !params.window_contains(t) {
        return Err(Error::domain(format!("t = {t} outside scenario window")));
    }
    Invariant::from_params(params, DerivativeMethod::auto_for(&field.grid)).apply(t, field)
}

/// Max over probes of r = ‖(∂_tI)φ + (1/i)(IĤ − ĤI)φ‖ / ‖φ‖ for arbitrary
/// operator pairs. ∂_tI is applied as an operator difference with the given
/// centered step, which works unchanged for deliberately broken invariants.
pub fn evolution_residual_ops(
    inv: &Invariant,
    ham: &Hamiltonian,
    t: f64,
    h: f64,
    probes: &[SpinorGridField],
) -> Result<f64> {
    let minus_i = C64::new(0.0, -1.0);
    let mut worst = 0.0_f64;
    for probe in probes {
        let dti = inv
            .apply(t + h, probe)?
            .sub(&inv.apply(t - h, probe)?)
            .scaled(C64::new(0.5 / h, 0.0));
        let ih = inv.apply(t, &ham.apply(t, probe)?)?;
        let hi = ham.apply(t, &inv.apply(t, probe)?)?;
        let mut r = dti;
        r.axpy(minus_i, &ih.sub(&hi));
        worst = worst.max(r.norm() / probe.norm());
    }
    Ok(worst)
}

/// Residual of the invariant evolution equation on the scenario's Ĥ and I.
///
/// The centered ∂_tI stencil (step 1e-5·window) must stay inside the window.
pub fn invariant_evolution_residual(
    params: &ScenarioParams,
    t: f64,
    probes: &[SpinorGridField],
) -> Result<ResidualReport> {
    if probes.len() < 3 {
        return Err(Error::usage(format!(
            "need >= 3 probe fields spanning distinct oscillator states, got {}",
            probes.len()
        )));
    }
    let h = 1e-5 * params.window_width();
    if t - h <= params.t_min || t + h >= params.t_max {
        return Err(Error::domain(format!(
            "t = {t} too close to the window edge for the centered stencil (h = {h})"
        )));
    }
    let method = DerivativeMethod::auto_for(&probes[0].grid);
    let inv = Invariant::from_params(params, method);
    let ham = Hamiltonian::from_params(params, method);
    let worst = evolution_residual_ops(&inv, &ham, t, h, probes)?;
    let mut report = ResidualReport::new(format!("invariant evolution @ t={t}"));
    report.push_asserted("evolution_residual_max", worst, 1e-5);
    Ok(report)
}

/// ‖(I(t) − λ)χ‖ / ‖χ‖ for the assembled eigen-spinor.
pub fn eigen_residual(
    params: &ScenarioParams,
    eig: &EigenSolution,
    t: f64,
    grid: &Grid1D,
) -> Result<f64> {
    let chi = crate::spectrum::assemble_spinor(params, eig, t, grid)?;
    let mut r = apply_invariant(params, t, &chi)?;
    r.axpy(C64::new(-eig.lambda, 0.0), &chi);
    Ok(r.norm() / chi.norm())
}

/// Eigenvalues of the densely discretized I(t) (2N×2N Hermitian), ascending.
///
/// Capped at 512 grid points; the matrix is built column-by-column from the
/// matrix-free operator.
pub fn dense_invariant_eigenvalues(
    params: &ScenarioParams,
    t: f64,
    grid: &Grid1D,
) -> Result<Vec<f64>> {
    if grid.n_points > 512 {
        return Err(Error::usage(format!(
            "dense diagonalization capped at 512 points, got {}",
            grid.n_points
        )));
    }
    let n = grid.n_points;
    let inv = Invariant::from_params(params, DerivativeMethod::auto_for(grid));
    let dim = 2 * n;
    let mut mat = nalgebra::DMatrix::<C64>::zeros(dim, dim);
    let mut basis = SpinorGridField::zeros(*grid);
    for col in 0..dim {
        if col < n {
            basis.upper[col] = C64::ONE;
        } else {
            basis.lower[col - n] = C64::ONE;
        }
        let out = inv.apply(t, &basis)?;
        for row in 0..n {
            mat[(row, col)] = out.upper[row];
            mat[(row + n, col)] = out.lower[row];
        }
        if col < n {
            basis.upper[col] = C64::ZERO;
        } else {
            basis.lower[col - n] = C64::ZERO;
        }
    }
    let mut eigenvalues: Vec<f64> = mat.symmetric_eigen().eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(eigenvalues)
}
