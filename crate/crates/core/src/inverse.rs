//! Recovery of the core coefficient `σ₁` from one noisy boundary flux.
//!
//! Synthetic data come from the finite-difference solver, the inversion uses
//! the closed-form multiplier, so the two forward models differ. The
//! regularised estimate minimises
//!
//! ```text
//! T_α(σ) = ½ |λ(σ, r₁) f − g^δ|² + ½ α σ²
//! ```
//!
//! by Newton's method in `s = ln σ`, and `α` follows the discrepancy
//! principle `δ ≤ |λ(σ_α) f − g^δ| ≤ τ δ`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::dnmap::{dn_multiplier, dn_multiplier_and_derivative, PotentialProfile};
use crate::error::{Error, Result, Stage};
use crate::fdsolver::solve_fd;
use crate::real::Real;
use crate::specfun::arg_limit;

/// Clean and perturbed boundary flux.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoisyMeasurement<T> {
    pub g_clean: T,
    pub g_delta: T,
    pub delta: T,
    pub seed: u64,
}

/// `g^δ = g + δζ` with one standard normal draw `ζ` from a ChaCha8 stream
/// seeded by `seed`.
pub fn make_noisy<T: Real>(g: T, delta: T, seed: u64) -> Result<NoisyMeasurement<T>> {
    if !g.is_finite() {
        return Err(Error::InvalidParameter(format!("measurement must be finite, got {g}")));
    }
    if !(delta.is_finite() && delta >= T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "noise level must be finite and non-negative, got {delta}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zeta: f64 = StandardNormal.sample(&mut rng);
    let g_delta = if delta == T::zero() { g } else { g + delta * T::lit(zeta) };
    Ok(NoisyMeasurement {
        g_clean: g,
        g_delta,
        delta,
        seed,
    })
}

fn check_alpha<T: Real>(alpha: T) -> Result<()> {
    if !(alpha.is_finite() && alpha > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "regularisation parameter must be positive, got {alpha}"
        )));
    }
    Ok(())
}

fn check_data<T: Real>(f: T, g_delta: T) -> Result<()> {
    if !(f.is_finite() && g_delta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "f and g_delta must be finite, got f = {f}, g_delta = {g_delta}"
        )));
    }
    Ok(())
}

/// `T_α(σ)`.
pub fn tikhonov_value<T: Real>(sigma: T, f: T, g_delta: T, alpha: T, r1: T) -> Result<T> {
    check_alpha(alpha)?;
    check_data(f, g_delta)?;
    let profile = PotentialProfile::new(r1, sigma)?;
    let misfit = dn_multiplier(&profile)?.lambda * f - g_delta;
    let half = T::lit(0.5);
    Ok(half * misfit * misfit + half * alpha * sigma * sigma)
}

/// `dT_α/dσ = (λ f − g^δ) f ∂λ/∂σ + α σ`, with the analytic `∂λ/∂σ`.
pub fn tikhonov_gradient<T: Real>(sigma: T, f: T, g_delta: T, alpha: T, r1: T) -> Result<T> {
    check_alpha(alpha)?;
    check_data(f, g_delta)?;
    let profile = PotentialProfile::new(r1, sigma)?;
    let (lambda, dlambda) = dn_multiplier_and_derivative(&profile)?;
    Ok((lambda * f - g_delta) * f * dlambda + alpha * sigma)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TikhonovResult<T> {
    pub sigma_est: T,
    pub alpha: T,
    /// `|λ(σ_est) f − g^δ|`.
    pub residual: T,
    /// `|σ_est − σ_true|`, when the truth is known.
    pub eps_abs: Option<T>,
    pub iterations: usize,
    /// `dT_α/dσ` at `sigma_est`.
    pub gradient: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions<T> {
    pub max_iterations: usize,
    /// Stop once `|dT_α/dσ|` falls below this (or below its rounding floor).
    pub gradient_tol: T,
    /// With `|dT_α/dσ|` below tolerance, also wait for the Newton step in
    /// `ln σ` to fall below this. The gradient scales with `∂λ/∂σ`, which
    /// can be small, so a small gradient alone leaves `σ` loosely fixed.
    pub step_tol: T,
    pub sigma_max: T,
}

impl<T: Real> Default for NewtonOptions<T> {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            gradient_tol: T::lit(1e-10),
            step_tol: T::lit(1e-12),
            sigma_max: T::lit(1e6),
        }
    }
}

/// Value, first and second `σ`-derivatives of `T_α` at one point.
struct Local<T> {
    value: T,
    grad: T,
    hess: T,
    misfit: T,
    /// Magnitude of the terms summed into `grad`, for its rounding floor.
    grad_scale: T,
}

struct Objective<T> {
    f: T,
    g_delta: T,
    alpha: T,
    r1: T,
}

impl<T: Real> Objective<T> {
    fn value(&self, sigma: T) -> Result<T> {
        let profile = PotentialProfile::new(self.r1, sigma)?;
        let m = dn_multiplier(&profile)?.lambda * self.f - self.g_delta;
        let half = T::lit(0.5);
        Ok(half * m * m + half * self.alpha * sigma * sigma)
    }

    fn local(&self, sigma: T) -> Result<Local<T>> {
        let profile = PotentialProfile::new(self.r1, sigma)?;
        let (lambda, dlambda) = dn_multiplier_and_derivative(&profile)?;
        // ∂²λ/∂σ² by central differences of the analytic first derivative
        let h = sigma * T::lit(1e-4);
        let (_, up) = dn_multiplier_and_derivative(&profile.with_sigma1(sigma + h)?)?;
        let (_, down) = dn_multiplier_and_derivative(&profile.with_sigma1(sigma - h)?)?;
        let d2lambda = (up - down) / (T::lit(2.0) * h);

        let m = lambda * self.f - self.g_delta;
        let fit = m * self.f * dlambda;
        let reg = self.alpha * sigma;
        let half = T::lit(0.5);
        let slope = self.f * dlambda;
        Ok(Local {
            value: half * m * m + half * reg * sigma,
            grad: fit + reg,
            hess: slope * slope + m * self.f * d2lambda + self.alpha,
            misfit: m,
            grad_scale: fit.abs() + reg.abs(),
        })
    }
}

pub fn minimize_newton<T: Real>(f: T, g_delta: T, alpha: T, r1: T, sigma_init: T) -> Result<TikhonovResult<T>> {
    minimize_newton_with(f, g_delta, alpha, r1, sigma_init, &NewtonOptions::default())
}

/// Newton iteration on `s = ln σ` with backtracking.
///
/// `σ` is confined to `[σ_min, sigma_max]`, where `σ_min` keeps the core
/// Bessel argument `r₁/√σ` at half the admissible range. Three consecutive
/// iterates pinned to a bound raise [`Error::ProjectionCycle`].
pub fn minimize_newton_with<T: Real>(
    f: T,
    g_delta: T,
    alpha: T,
    r1: T,
    sigma_init: T,
    options: &NewtonOptions<T>,
) -> Result<TikhonovResult<T>> {
    check_alpha(alpha)?;
    check_data(f, g_delta)?;
    PotentialProfile::new(r1, sigma_init)?;
    let obj = Objective { f, g_delta, alpha, r1 };

    let sigma_min = {
        let x_max = arg_limit::<T>() * T::lit(0.5);
        (r1 / x_max).powi(2)
    };
    let (s_lo, s_hi) = (sigma_min.ln(), options.sigma_max.ln());
    let eps = T::epsilon();
    let max_step = T::lit(2.0);

    let mut s = sigma_init.ln().max(s_lo).min(s_hi);
    let mut pinned = 0usize;
    let mut last_grad = T::nan();

    for iteration in 0..options.max_iterations {
        let sigma = s.exp();
        let loc = obj.local(sigma)?;
        last_grad = loc.grad;
        let floor = T::lit(64.0) * eps * loc.grad_scale;
        let done = |loc: &Local<T>| TikhonovResult {
            sigma_est: sigma,
            alpha,
            residual: loc.misfit.abs(),
            eps_abs: None,
            iterations: iteration,
            gradient: loc.grad,
        };
        if loc.grad.abs() <= floor {
            return Ok(done(&loc));
        }

        let gs = sigma * loc.grad;
        let hs = sigma * sigma * loc.hess + gs;
        let mut step = if hs > T::zero() { -gs / hs } else { -gs.signum() };
        if loc.grad.abs() <= options.gradient_tol && hs > T::zero() && step.abs() <= options.step_tol {
            return Ok(done(&loc));
        }
        step = step.max(-max_step).min(max_step);

        let mut accepted = None;
        for _ in 0..60 {
            let trial = (s + step).max(s_lo).min(s_hi);
            let value = obj.value(trial.exp())?;
            let decrease = T::lit(1e-4) * (trial - s) * gs;
            let flat = (value - loc.value).abs() <= T::lit(16.0) * eps * loc.value.abs();
            if flat && loc.grad.abs() <= options.gradient_tol {
                // converged to rounding: the objective no longer resolves the step
                return Ok(done(&loc));
            }
            if value <= loc.value + decrease || flat {
                accepted = Some(trial);
                break;
            }
            step = step * T::lit(0.5);
        }
        let Some(next) = accepted else {
            break;
        };

        if next <= s_lo || next >= s_hi {
            pinned += 1;
            if pinned >= 3 {
                return Err(Error::ProjectionCycle {
                    sigma: next.exp().to_f64_lossy(),
                    sigma_max: options.sigma_max.to_f64_lossy(),
                });
            }
        } else {
            pinned = 0;
        }
        s = next;
    }

    Err(Error::NoConvergence {
        iterations: options.max_iterations,
        last_sigma: s.exp().to_f64_lossy(),
        gradient: last_grad.to_f64_lossy(),
    })
}

/// Settings of the discrepancy-principle search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscrepancyOptions<T> {
    pub tau: T,
    pub alpha_max: T,
    pub alpha_min: T,
    /// Geometric grid density: the ratio between neighbours is `10^(1/steps)`.
    pub steps_per_decade: usize,
    pub max_bisections: usize,
    pub sigma_init: T,
    pub newton: NewtonOptions<T>,
}

impl<T: Real> Default for DiscrepancyOptions<T> {
    fn default() -> Self {
        Self {
            tau: T::lit(1.1),
            alpha_max: T::one(),
            alpha_min: T::lit(1e-14),
            steps_per_decade: 4,
            max_bisections: 60,
            sigma_init: T::one(),
            newton: NewtonOptions::default(),
        }
    }
}

/// Chosen `α` together with the minimiser it produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaChoice<T> {
    pub alpha: T,
    pub estimate: TikhonovResult<T>,
}

pub fn choose_alpha_discrepancy<T: Real>(f: T, g_delta: T, delta: T, r1: T) -> Result<T> {
    choose_alpha_discrepancy_with(f, g_delta, delta, r1, &DiscrepancyOptions::default()).map(|c| c.alpha)
}

/// Scans `α` downwards over a geometric grid until the residual drops to
/// `τδ` or below, then bisects in `ln α` between the last two grid points if
/// it overshot below `δ`.
pub fn choose_alpha_discrepancy_with<T: Real>(
    f: T,
    g_delta: T,
    delta: T,
    r1: T,
    options: &DiscrepancyOptions<T>,
) -> Result<AlphaChoice<T>> {
    if !(delta.is_finite() && delta > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "discrepancy principle needs a positive noise level, got {delta}"
        )));
    }
    if !(options.tau >= T::one()) {
        return Err(Error::InvalidParameter(format!("tau must be at least 1, got {}", options.tau)));
    }
    check_alpha(options.alpha_min)?;
    check_alpha(options.alpha_max)?;
    if options.steps_per_decade == 0 || options.alpha_min > options.alpha_max {
        return Err(Error::InvalidParameter("empty alpha grid".into()));
    }
    check_data(f, g_delta)?;

    let lower = delta;
    let upper = options.tau * delta;
    let solve = |alpha: T| -> Result<TikhonovResult<T>> {
        minimize_newton_with(f, g_delta, alpha, r1, options.sigma_init, &options.newton)
    };
    let mut min_seen = T::infinity();
    let mut max_seen = T::neg_infinity();
    let failure = |lo: T, hi: T| Error::Discrepancy {
        min_residual: lo.to_f64_lossy(),
        max_residual: hi.to_f64_lossy(),
        lower: lower.to_f64_lossy(),
        upper: upper.to_f64_lossy(),
    };

    let ratio = T::lit(10.0).powf(T::one() / T::from_usize_exact(options.steps_per_decade));
    // small slack so the grid reaches alpha_min despite rounding
    let stop = options.alpha_min * (T::one() - T::lit(1e-9));
    let mut alpha = options.alpha_max;
    let mut previous: Option<(T, T)> = None;

    while alpha >= stop {
        let est = solve(alpha)?;
        let r = est.residual;
        min_seen = min_seen.min(r);
        max_seen = max_seen.max(r);
        if r <= upper {
            if r >= lower {
                return Ok(AlphaChoice { alpha, estimate: est });
            }
            let Some((big_alpha, _)) = previous else {
                return Err(failure(min_seen, max_seen));
            };
            // residual(big_alpha) > τδ, residual(alpha) < δ
            let (mut lo, mut hi) = (alpha.ln(), big_alpha.ln());
            for _ in 0..options.max_bisections {
                let mid = T::lit(0.5) * (lo + hi);
                let a = mid.exp();
                let est = solve(a)?;
                let r = est.residual;
                min_seen = min_seen.min(r);
                max_seen = max_seen.max(r);
                if r < lower {
                    lo = mid;
                } else if r > upper {
                    hi = mid;
                } else {
                    return Ok(AlphaChoice { alpha: a, estimate: est });
                }
            }
            return Err(failure(min_seen, max_seen));
        }
        previous = Some((alpha, r));
        alpha = alpha / ratio;
    }
    Err(failure(min_seen, max_seen))
}

/// End-to-end pipeline settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionSetup<T> {
    /// Intervals of the forward grid (`Δr = 1/N`).
    pub n_intervals: usize,
    /// `α` used when `δ = 0`.
    pub alpha_floor: T,
    /// Skip the discrepancy search and use this `α`.
    pub fixed_alpha: Option<T>,
    pub discrepancy: DiscrepancyOptions<T>,
}

impl<T: Real> Default for ReconstructionSetup<T> {
    fn default() -> Self {
        Self {
            n_intervals: 10_000,
            alpha_floor: T::lit(1e-14),
            fixed_alpha: None,
            discrepancy: DiscrepancyOptions::default(),
        }
    }
}

/// Synthetic data by the FD solver, noise, `α` choice, Newton.
pub fn reconstruct<T: Real>(profile_true: &PotentialProfile<T>, f: T, delta: T, seed: u64) -> Result<TikhonovResult<T>> {
    reconstruct_with(profile_true, f, delta, seed, &ReconstructionSetup::default())
}

pub fn reconstruct_with<T: Real>(
    profile_true: &PotentialProfile<T>,
    f: T,
    delta: T,
    seed: u64,
    setup: &ReconstructionSetup<T>,
) -> Result<TikhonovResult<T>> {
    let g = synthetic_flux(profile_true, f, setup)?;
    reconstruct_from_flux(g, profile_true, f, delta, seed, setup)
}

/// FD forward solve for the clean flux.
pub fn synthetic_flux<T: Real>(profile_true: &PotentialProfile<T>, f: T, setup: &ReconstructionSetup<T>) -> Result<T> {
    solve_fd(f, profile_true, setup.n_intervals)
        .map(|s| s.neumann)
        .map_err(|e| e.at(Stage::Forward))
}

/// Pipeline from a precomputed clean flux.
pub fn reconstruct_from_flux<T: Real>(
    g_clean: T,
    profile_true: &PotentialProfile<T>,
    f: T,
    delta: T,
    seed: u64,
    setup: &ReconstructionSetup<T>,
) -> Result<TikhonovResult<T>> {
    let data = make_noisy(g_clean, delta, seed).map_err(|e| e.at(Stage::Noise))?;
    let r1 = profile_true.r1();
    let options = &setup.discrepancy;

    let mut result = match (setup.fixed_alpha, delta > T::zero()) {
        (Some(alpha), _) => minimize_newton_with(f, data.g_delta, alpha, r1, options.sigma_init, &options.newton)
            .map_err(|e| e.at(Stage::Newton))?,
        (None, false) => minimize_newton_with(f, data.g_delta, setup.alpha_floor, r1, options.sigma_init, &options.newton)
            .map_err(|e| e.at(Stage::Newton))?,
        (None, true) => {
            choose_alpha_discrepancy_with(f, data.g_delta, delta, r1, options)
                .map_err(|e| e.at(Stage::Alpha))?
                .estimate
        }
    };
    result.eps_abs = Some((result.sigma_est - profile_true.sigma1()).abs());
    Ok(result)
}

/// Independent reconstructions for each seed, in the order of `seeds`.
pub fn reconstruct_ensemble<T: Real>(
    profile_true: &PotentialProfile<T>,
    f: T,
    delta: T,
    seeds: &[u64],
    setup: &ReconstructionSetup<T>,
) -> Result<Vec<Result<TikhonovResult<T>>>> {
    let g = synthetic_flux(profile_true, f, setup)?;
    Ok(seeds
        .par_iter()
        .map(|&seed| reconstruct_from_flux(g, profile_true, f, delta, seed, setup))
        .collect())
}

/// Serializable record of one reconstruction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub r1: f64,
    pub sigma_true: f64,
    pub delta: f64,
    pub seed: u64,
    pub alpha: f64,
    pub sigma_est: f64,
    pub residual: f64,
    pub eps_abs: Option<f64>,
    pub iterations: usize,
}

impl ExperimentRecord {
    pub fn new<T: Real>(profile_true: &PotentialProfile<T>, delta: T, seed: u64, result: &TikhonovResult<T>) -> Self {
        Self {
            r1: profile_true.r1().to_f64_lossy(),
            sigma_true: profile_true.sigma1().to_f64_lossy(),
            delta: delta.to_f64_lossy(),
            seed,
            alpha: result.alpha.to_f64_lossy(),
            sigma_est: result.sigma_est.to_f64_lossy(),
            residual: result.residual.to_f64_lossy(),
            eps_abs: result.eps_abs.map(Real::to_f64_lossy),
            iterations: result.iterations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lambda(r1: f64, s: f64) -> f64 {
        dn_multiplier(&PotentialProfile::new(r1, s).unwrap()).unwrap().lambda
    }

    #[test]
    fn zero_noise_keeps_data() {
        let m = make_noisy(0.44, 0.0, 7).unwrap();
        assert_eq!(m.g_delta, 0.44);
        assert!(make_noisy(0.44, -1.0, 7).is_err());
        assert!(make_noisy(0.44, f64::NAN, 7).is_err());
    }

    #[test]
    fn noise_is_deterministic_per_seed() {
        let a = make_noisy(0.44_f64, 0.01, 123).unwrap();
        let b = make_noisy(0.44_f64, 0.01, 123).unwrap();
        assert_eq!(a.g_delta.to_bits(), b.g_delta.to_bits());
        let c = make_noisy(0.44, 0.01, 124).unwrap();
        assert_ne!(a.g_delta, c.g_delta);
    }

    #[test]
    fn penalty_is_additive() {
        let g = lambda(0.7, 0.9) + 0.05;
        for &s in &[0.2, 0.9, 3.0] {
            let a = tikhonov_value(s, 1.0, g, 1e-3, 0.7).unwrap();
            let b = tikhonov_value(s, 1.0, g, 1e-300, 0.7).unwrap();
            assert!((a - b - 0.5 * 1e-3 * s * s).abs() < 1e-15);
        }
    }

    #[test]
    fn exact_data_gives_vanishing_functional() {
        let g = lambda(0.7, 0.9);
        let v = tikhonov_value(0.9, 1.0, g, 1e-300, 0.7).unwrap();
        assert!(v < 1e-30);
    }

    #[test]
    fn noiseless_recovery() {
        let g = lambda(0.7, 0.9);
        let res = minimize_newton(1.0, g, 1e-12, 0.7, 0.5).unwrap();
        assert!((res.sigma_est - 0.9).abs() < 1e-5, "{res:?}");
        assert!(res.gradient.abs() <= 1e-10);
        assert!(res.iterations <= 100);
    }

    #[test]
    fn invalid_inputs() {
        assert!(minimize_newton(1.0, 0.4, 0.0, 0.7, 1.0).is_err());
        assert!(minimize_newton(1.0, 0.4, 1e-3, 0.7, -1.0).is_err());
        assert!(minimize_newton(1.0, 0.4, 1e-3, 1.7, 1.0).is_err());
        assert!(choose_alpha_discrepancy(1.0, 0.4, 0.0, 0.7).is_err());
    }

    #[test]
    fn unreachable_band_is_reported() {
        // data far above every attainable multiplier: even α → 0 leaves a large residual
        let err = choose_alpha_discrepancy(1.0, 5.0, 1e-3, 0.7).unwrap_err();
        assert!(matches!(err, Error::Discrepancy { .. }), "{err:?}");
    }

    #[test]
    fn record_serializes() {
        let prof = PotentialProfile::new(0.7, 0.9).unwrap();
        let g = lambda(0.7, 0.9);
        let res = reconstruct_from_flux(g, &prof, 1.0, 0.0, 3, &ReconstructionSetup::default()).unwrap();
        let rec = ExperimentRecord::new(&prof, 0.0, 3, &res);
        let json = serde_json::to_value(&rec).unwrap();
        for key in ["r1", "sigma_true", "delta", "seed", "alpha", "sigma_est", "residual", "eps_abs", "iterations"] {
            assert!(json.get(key).is_some(), "{key}");
        }
    }
}
