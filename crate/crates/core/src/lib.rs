//! Potential reconstruction for the radially symmetric steady-state
//! Schrödinger equation on a core-shell disk.
//!
//! The rescaled problem reads `r⁻¹(r ψ′)′ = σ⁻¹ ψ` in the core `r < r₁`
//! and `r⁻¹(r ψ′)′ = ψ` in the shell `r₁ < r < 1`, with continuity of `ψ`
//! and of the σ-weighted flux across `r = r₁` and `ψ(1) = f`. The boundary
//! flux `ψ′(1)` is `λ·f`, so the Dirichlet-to-Neumann map reduces to one
//! scalar multiplier.
//!
//! Modules:
//!
//! - [`specfun`]: modified Bessel functions `I₀, I₁, K₀, K₁`.
//! - [`dnmap`]: closed-form solution, DN multipliers, Jaeger cross products.
//! - [`fdsolver`]: finite-difference forward solver on a uniform radial grid.
//! - [`inverse`]: noisy data, Tikhonov functional, Newton minimisation and
//!   discrepancy-principle parameter choice.
//! - [`camouflage`]: pairs of distinct profiles sharing one DN map.
//! - [`reproduce`]: regeneration of the reference result tables.
//!
//! All numerical code is generic over [`Real`] (implemented for `f32` and
//! `f64`); the aliases below fix the scalar to `f64`, which is what the
//! accuracy targets and the command-line tool assume.

pub mod camouflage;
pub mod dnmap;
pub mod error;
pub mod fdsolver;
pub mod inverse;
mod real;
pub mod reproduce;
pub mod roots;
pub mod specfun;

pub use error::{Error, Result, Stage};
pub use real::Real;

/// Core-shell profile `(r₁, σ₁)` in double precision.
pub type Profile = dnmap::PotentialProfile<f64>;
/// Single-precision profile.
pub type Profile32 = dnmap::PotentialProfile<f32>;
pub type Coefficients = dnmap::ShellCoefficients<f64>;
pub type Multiplier = dnmap::DnMultiplier<f64>;
pub type Scaling = dnmap::PhysicalScaling<f64>;
pub type Grid = fdsolver::RadialGrid<f64>;
pub type Solution = fdsolver::FdSolution<f64>;
pub type Measurement = inverse::NoisyMeasurement<f64>;
pub type Estimate = inverse::TikhonovResult<f64>;
pub type Pair = camouflage::CamouflagePair<f64>;
