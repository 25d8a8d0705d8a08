//! Exact 2×2 complex matrix algebra, su(2) decomposition, and the six
//! constraint equations that the invariant coefficient matrices must satisfy:
//!
//! ```text
//! [α,σx] = 0        [β,σy] = 0        g[α,σy] + a[β,σx] = 0
//! iα̇ + kb[α,σy] + a[γ,σx] = 0
//! iβ̇ + g[γ,σy] = 0
//! iγ̇ + kb[γ,σy] + i a σxβ − i g ασy = 0
//! ```
//!
//! The solved coefficients α = α₁𝕀 + α₂σx, β = β₃σy, γ = γ₁𝕀 + γ₃(t)σy
//! annihilate the whole system exactly whenever the scenario supplies the
//! self-consistent γ₃, g, a (see [`crate::scenario`]).

use crate::error::{Error, Result};
use crate::report::ResidualReport;
use crate::scenario::ScenarioParams;
use crate::C64;
use std::fmt;

/// Dense 2×2 complex matrix, row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub e: [[C64; 2]; 2],
}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{:.4}{:+.4}i, {:.4}{:+.4}i], [{:.4}{:+.4}i, {:.4}{:+.4}i]]",
            self.e[0][0].re,
            self.e[0][0].im,
            self.e[0][1].re,
            self.e[0][1].im,
            self.e[1][0].re,
            self.e[1][0].im,
            self.e[1][1].re,
            self.e[1][1].im
        )
    }
}

const I: C64 = C64::new(0.0, 1.0);

impl Mat2 {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2 { e: [[a, b], [c, d]] }
    }

    pub fn zero() -> Self {
        Mat2::new(C64::ZERO, C64::ZERO, C64::ZERO, C64::ZERO)
    }

    pub fn identity() -> Self {
        Mat2::new(C64::ONE, C64::ZERO, C64::ZERO, C64::ONE)
    }

    pub fn sigma_x() -> Self {
        Mat2::new(C64::ZERO, C64::ONE, C64::ONE, C64::ZERO)
    }

    pub fn sigma_y() -> Self {
        Mat2::new(C64::ZERO, -I, I, C64::ZERO)
    }

    pub fn sigma_z() -> Self {
        Mat2::new(C64::ONE, C64::ZERO, C64::ZERO, -C64::ONE)
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = *self;
        for r in 0..2 {
            for c in 0..2 {
                m.e[r][c] *= s;
            }
        }
        m
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn add(&self, o: &Mat2) -> Self {
        let mut m = *self;
        for r in 0..2 {
            for c in 0..2 {
                m.e[r][c] += o.e[r][c];
            }
        }
        m
    }

    pub fn sub(&self, o: &Mat2) -> Self {
        self.add(&o.scale_re(-1.0))
    }

    pub fn mul(&self, o: &Mat2) -> Self {
        let mut m = Mat2::zero();
        for r in 0..2 {
            for c in 0..2 {
                m.e[r][c] = self.e[r][0] * o.e[0][c] + self.e[r][1] * o.e[1][c];
            }
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        Mat2::new(
            self.e[0][0].conj(),
            self.e[1][0].conj(),
            self.e[0][1].conj(),
            self.e[1][1].conj(),
        )
    }

    pub fn trace(&self) -> C64 {
        self.e[0][0] + self.e[1][1]
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.e
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.sub(&self.adjoint()).frobenius_norm() <= tol
    }
}

/// Coefficients of a matrix in the basis {𝕀, σx, σy, σz}.
#[derive(Debug, Clone, Copy)]
pub struct PauliDecomposition {
    pub c_i: C64,
    pub c_x: C64,
    pub c_y: C64,
    pub c_z: C64,
}

impl PauliDecomposition {
    pub fn reconstruct(&self) -> Mat2 {
        Mat2::identity()
            .scale(self.c_i)
            .add(&Mat2::sigma_x().scale(self.c_x))
            .add(&Mat2::sigma_y().scale(self.c_y))
            .add(&Mat2::sigma_z().scale(self.c_z))
    }
}

/// su(2)-basis expansion via the trace inner products c_k = tr(σ_k m)/2.
pub fn pauli_decompose(m: &Mat2) -> PauliDecomposition {
    let half = C64::new(0.5, 0.0);
    PauliDecomposition {
        c_i: m.trace() * half,
        c_x: Mat2::sigma_x().mul(m).trace() * half,
        c_y: Mat2::sigma_y().mul(m).trace() * half,
        c_z: Mat2::sigma_z().mul(m).trace() * half,
    }
}

/// ab − ba.
pub fn commutator(a: &Mat2, b: &Mat2) -> Mat2 {
    a.mul(b).sub(&b.mul(a))
}

/// Time-parameterized matrix with an optional analytic derivative.
pub struct TimeMatrix {
    f: Box<dyn Fn(f64) -> Mat2 + Send + Sync>,
    df: Option<Box<dyn Fn(f64) -> Mat2 + Send + Sync>>,
}

impl TimeMatrix {
    pub fn new(f: impl Fn(f64) -> Mat2 + Send + Sync + 'static) -> Self {
        TimeMatrix { f: Box::new(f), df: None }
    }

    pub fn with_derivative(
        f: impl Fn(f64) -> Mat2 + Send + Sync + 'static,
        df: impl Fn(f64) -> Mat2 + Send + Sync + 'static,
    ) -> Self {
        TimeMatrix {
            f: Box::new(f),
            df: Some(Box::new(df)),
        }
    }

    pub fn constant(m: Mat2) -> Self {
        TimeMatrix::with_derivative(move |_| m, |_| Mat2::zero())
    }

    pub fn at(&self, t: f64) -> Mat2 {
        (self.f)(t)
    }

    /// Analytic derivative when provided, else a central difference with step `h`.
    pub fn derivative_at(&self, t: f64, h: f64) -> Mat2 {
        match &self.df {
            Some(df) => df(t),
            None => self.at(t + h).sub(&self.at(t - h)).scale_re(0.5 / h),
        }
    }
}

/// The invariant ansatz coefficients α(t), β(t), γ(t) of I = αp_x + βx + γ.
pub struct CoefficientSet {
    pub alpha: TimeMatrix,
    pub beta: TimeMatrix,
    pub gamma: TimeMatrix,
}

impl CoefficientSet {
    pub fn zero() -> Self {
        CoefficientSet {
            alpha: TimeMatrix::constant(Mat2::zero()),
            beta: TimeMatrix::constant(Mat2::zero()),
            gamma: TimeMatrix::constant(Mat2::zero()),
        }
    }

    /// Hermiticity of all three coefficients at time `t`.
    pub fn hermitian_at(&self, t: f64, tol: f64) -> bool {
        self.alpha.at(t).is_hermitian(tol)
            && self.beta.at(t).is_hermitian(tol)
            && self.gamma.at(t).is_hermitian(tol)
    }
}

/// The solved coefficient matrices: α = α₁𝕀 + α₂σx and β = β₃σy constant,
/// γ = γ₁𝕀 + γ₃(t)σy with γ̇₃ = α₁ g supplied analytically.
pub fn paper_coefficients(params: &ScenarioParams) -> CoefficientSet {
    let alpha = Mat2::identity()
        .scale_re(params.alpha1)
        .add(&Mat2::sigma_x().scale_re(params.alpha2));
    let beta = Mat2::sigma_y().scale_re(params.beta3);

    let p_gamma = params.clone();
    let p_dgamma = params.clone();
    let gamma1 = params.gamma1;
    let alpha1 = params.alpha1;
    let gamma = TimeMatrix::with_derivative(
        move |t| {
            let g3 = p_gamma.gamma3_of_t(t).unwrap_or(f64::NAN);
            Mat2::identity()
                .scale_re(gamma1)
                .add(&Mat2::sigma_y().scale_re(g3))
        },
        move |t| {
            // γ̇ = γ̇₃ σy = α₁ g σy (zero when α₁ = 0, where γ₃ is constant)
            let gdot = if alpha1 == 0.0 {
                0.0
            } else {
                alpha1 * p_dgamma.g_of_t(t).unwrap_or(f64::NAN)
            };
            Mat2::sigma_y().scale_re(gdot)
        },
    );

    CoefficientSet {
        alpha: TimeMatrix::constant(alpha),
        beta: TimeMatrix::constant(beta),
        gamma,
    }
}

/// Frobenius norms of the six constraint expressions at time `t`.
///
/// Time derivatives use the analytic form when the set provides one and a
/// central difference with step 1e-5·(t_max−t_min) otherwise.
pub fn constraint_residuals(
    coeffs: &CoefficientSet,
    params: &ScenarioParams,
    t: f64,
) -> Result<ResidualReport> {
    if !params.window_contains(t) {
        return Err(Error::domain(format!(
            "t = {t} outside scenario window [{}, {}]",
            params.t_min, params.t_max
        )));
    }
    let h = 1e-5 * params.window_width();
    let a = params.a_of_t(t)?;
    let g = params.g_of_t(t)?;
    let kb = params.k * params.b_of_t(t);

    let sx = Mat2::sigma_x();
    let sy = Mat2::sigma_y();
    let alpha = coeffs.alpha.at(t);
    let beta = coeffs.beta.at(t);
    let gamma = coeffs.gamma.at(t);
    let alpha_dot = coeffs.alpha.derivative_at(t, h);
    let beta_dot = coeffs.beta.derivative_at(t, h);
    let gamma_dot = coeffs.gamma.derivative_at(t, h);

    let c_ax = commutator(&alpha, &sx);
    let c_by = commutator(&beta, &sy);
    let mixed = commutator(&alpha, &sy)
        .scale_re(g)
        .add(&commutator(&beta, &sx).scale_re(a));
    let c1 = alpha_dot
        .scale(I)
        .add(&commutator(&alpha, &sy).scale_re(kb))
        .add(&commutator(&gamma, &sx).scale_re(a));
    let c2 = beta_dot.scale(I).add(&commutator(&gamma, &sy).scale_re(g));
    let c3 = gamma_dot
        .scale(I)
        .add(&commutator(&gamma, &sy).scale_re(kb))
        .add(&sx.mul(&beta).scale(I * a))
        .sub(&alpha.mul(&sy).scale(I * g));

    let mut report = ResidualReport::new(format!("constraints@t={t}"));
    let tol = 1e-6;
    report.push_asserted("comm_alpha_sigma_x", c_ax.frobenius_norm(), tol);
    report.push_asserted("comm_beta_sigma_y", c_by.frobenius_norm(), tol);
    report.push_asserted("mixed_g_alpha_a_beta", mixed.frobenius_norm(), tol);
    report.push_asserted("evolution_alpha", c1.frobenius_norm(), tol);
    report.push_asserted("evolution_beta", c2.frobenius_norm(), tol);
    report.push_asserted("evolution_gamma", c3.frobenius_norm(), tol);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{GFormula, ScenarioParams, TimeProfile};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn test_params() -> ScenarioParams {
        // k=1, α₁=1, α₂=1, β₃=1, b=2 const, window start ~0: γ₃(1) ≈ 2, g(1) ≈ 1
        ScenarioParams::new(
            1.0,
            0.3,
            1.0,
            1.0,
            1.0,
            0.0,
            1e-12,
            2.0,
            TimeProfile::Constant { value: 2.0 },
            None,
            GFormula::Corrected,
        )
        .unwrap()
    }

    #[test]
    fn pauli_basis_elements() {
        let d = pauli_decompose(&Mat2::identity());
        assert!((d.c_i - C64::ONE).norm() < 1e-15);
        assert!(d.c_x.norm() < 1e-15 && d.c_y.norm() < 1e-15 && d.c_z.norm() < 1e-15);

        let d = pauli_decompose(&Mat2::sigma_y());
        assert!((d.c_y - C64::ONE).norm() < 1e-15);
        assert!(d.c_i.norm() < 1e-15 && d.c_x.norm() < 1e-15 && d.c_z.norm() < 1e-15);
    }

    #[test]
    fn pauli_decompose_hand_solved() {
        // [[3, 1−i],[1+i, −1]] = 𝕀 + σx + σy + 2σz
        let m = Mat2::new(
            C64::new(3.0, 0.0),
            C64::new(1.0, -1.0),
            C64::new(1.0, 1.0),
            C64::new(-1.0, 0.0),
        );
        let d = pauli_decompose(&m);
        assert!((d.c_i - C64::ONE).norm() < 1e-14);
        assert!((d.c_x - C64::ONE).norm() < 1e-14);
        assert!((d.c_y - C64::ONE).norm() < 1e-14);
        assert!((d.c_z - C64::new(2.0, 0.0)).norm() < 1e-14);
        assert!(d.reconstruct().sub(&m).frobenius_norm() < 1e-14);
    }

    #[test]
    fn reconstruct_roundtrip_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let mut m = Mat2::zero();
            for r in 0..2 {
                for c in 0..2 {
                    m.e[r][c] = C64::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
                }
            }
            let rec = pauli_decompose(&m).reconstruct();
            assert!(rec.sub(&m).frobenius_norm() < 1e-14 * (1.0 + m.frobenius_norm()));
        }
    }

    #[test]
    fn hermitian_matrices_have_real_coefficients() {
        let m = Mat2::new(
            C64::new(2.0, 0.0),
            C64::new(0.5, -1.5),
            C64::new(0.5, 1.5),
            C64::new(-3.0, 0.0),
        );
        assert!(m.is_hermitian(1e-15));
        let d = pauli_decompose(&m);
        for c in [d.c_i, d.c_x, d.c_y, d.c_z] {
            assert!(c.im.abs() < 1e-14);
        }
    }

    #[test]
    fn commutator_pauli_algebra() {
        // [σx, σy] = 2i σz
        let c = commutator(&Mat2::sigma_x(), &Mat2::sigma_y());
        let expect = Mat2::sigma_z().scale(C64::new(0.0, 2.0));
        assert!(c.sub(&expect).frobenius_norm() < 1e-15);

        // [m, m] = 0
        let m = Mat2::new(
            C64::new(1.0, 2.0),
            C64::new(0.0, -1.0),
            C64::new(3.0, 0.0),
            C64::new(0.0, 0.5),
        );
        assert!(commutator(&m, &m).frobenius_norm() < 1e-15);

        // identity part drops out
        let c = commutator(&Mat2::sigma_x().add(&Mat2::identity()), &Mat2::sigma_y());
        assert!(c.sub(&expect).frobenius_norm() < 1e-15);
    }

    #[test]
    fn commutator_antisymmetric_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let mut a = Mat2::zero();
            let mut b = Mat2::zero();
            for r in 0..2 {
                for c in 0..2 {
                    a.e[r][c] = C64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
                    b.e[r][c] = C64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
                }
            }
            let sum = commutator(&a, &b).add(&commutator(&b, &a));
            assert!(sum.frobenius_norm() < 1e-13);
        }
    }

    #[test]
    fn paper_coefficients_structure() {
        let params = test_params();
        let coeffs = paper_coefficients(&params);
        for &t in &[0.2, 0.7, 1.9] {
            let da = pauli_decompose(&coeffs.alpha.at(t));
            assert!(da.c_y.norm() < 1e-15 && da.c_z.norm() < 1e-15);
            let db = pauli_decompose(&coeffs.beta.at(t));
            assert!(db.c_i.norm() < 1e-15 && db.c_x.norm() < 1e-15 && db.c_z.norm() < 1e-15);
            assert!(coeffs.hermitian_at(t, 1e-14));
        }
        // γ(1) = γ₁𝕀 + 2σy for the reference scenario
        let dg = pauli_decompose(&coeffs.gamma.at(1.0));
        assert!(close(dg.c_y.re, 2.0, 1e-9));
        assert!(dg.c_i.norm() < 1e-15);
    }

    #[test]
    fn paper_coefficients_annihilate_constraints() {
        let params = test_params();
        let coeffs = paper_coefficients(&params);
        for &t in &[0.3, 0.9, 1.5] {
            let report = constraint_residuals(&coeffs, &params, t).unwrap();
            assert!(
                report.all_asserted_pass(),
                "failed at t={t}: {:?}",
                report.failures()
            );
        }
    }

    #[test]
    fn broken_alpha_fails_first_constraint() {
        let params = test_params();
        let mut coeffs = paper_coefficients(&params);
        coeffs.alpha = TimeMatrix::constant(Mat2::sigma_y());
        let report = constraint_residuals(&coeffs, &params, 1.0).unwrap();
        // ‖[σy, σx]‖ = ‖−2iσz‖ = 2√2
        let entry = report.get("comm_alpha_sigma_x").unwrap();
        assert!(close(entry.value, 2.0 * 2.0_f64.sqrt(), 1e-12));
        assert!(!report.all_asserted_pass());
    }

    #[test]
    fn zero_coefficients_trivially_pass() {
        let params = test_params();
        let report = constraint_residuals(&CoefficientSet::zero(), &params, 1.0).unwrap();
        assert!(report.max_asserted() < 1e-15);
    }

    #[test]
    fn out_of_window_time_rejected() {
        let params = test_params();
        let coeffs = paper_coefficients(&params);
        assert!(constraint_residuals(&coeffs, &params, 5.0).is_err());
    }
}
