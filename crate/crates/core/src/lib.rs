//! Exact solutions of the reduced 2+1d massless Dirac equation
//! `i ∂_t Φ = Ĥ(x,t) Φ`, `Ĥ = a(t) σ_x p_x + [k b(t) + g(t) x] σ_y − ω 𝕀`,
//! constructed through a quadratic-in-(p_x, x) dynamical invariant
//! `I(t) = (α₁p_x + γ₁)𝕀 + α₂ p_x σ_x + [β₃ x + γ₃(t)] σ_y`,
//! together with the grid operators, eigensolvers, quadrature and unitary
//! propagation used to verify every analytic ingredient independently.
//!
//! Module map:
//! - [`scenario`]: physical configurations (constants, time profiles, the
//!   γ₃/g/a closed forms and their self-consistency residuals).
//! - [`algebra`]: 2×2 complex matrices, su(2) decomposition, and the six
//!   invariant constraint equations.
//! - [`spectrum`]: Hermite functions, oscillator eigenpairs, the quantized
//!   invariant eigenvalues λ_{n,s}^± and spinor eigenfunction assembly.
//! - [`operators`]: grid discretizations of Ĥ(t) and I(t), evolution and
//!   eigen residuals, dense diagonalization.
//! - [`phase`]: the Lewis-Riesenfeld phase, by quadrature and in closed form.
//! - [`propagator`]: Crank–Nicolson evolution, PDE residuals, and the static
//!   Landau-level oracle.
//! - [`oracles`]: independent finite-difference eigensolver used to
//!   cross-check the oscillator spectrum.

pub mod algebra;
pub mod error;
pub mod operators;
pub mod oracles;
pub mod phase;
pub mod propagator;
pub mod report;
pub mod scenario;
pub mod spectrum;

pub use error::{Error, Result};
pub use report::{ResidualEntry, ResidualReport};

/// Complex double, the scalar type of every field and matrix here.
pub type C64 = num_complex::Complex64;
