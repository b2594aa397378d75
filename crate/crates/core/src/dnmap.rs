//! Closed-form solution of the core-shell transmission problem and the
//! Dirichlet-to-Neumann multiplier.
//!
//! In the core the bounded solution is `a₀ I₀(r/√σ₁)`, in the shell
//! `a₁ I₀(r) + b₁ K₀(r)`. Matching value and σ-weighted flux at `r₁` and
//! imposing `ψ(1) = f` fixes the three constants through the ratio
//!
//! ```text
//! ρ(r₁, σ₁) = (√σ₁ I₁(x) I₀(r₁) − I₀(x) I₁(r₁)) / (√σ₁ I₁(x) K₀(r₁) + I₀(x) K₁(r₁)),   x = r₁/√σ₁
//! ```
//!
//! and the boundary flux is `λ f` with `λ = −(ρ K₁(1) + I₁(1)) / (ρ K₀(1) − I₀(1))`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::real::Real;
use crate::specfun::{bessel_i01, bessel_k01};

/// Smallest admissible `|ρ K₀(1) − I₀(1)|`.
pub const DEGENERATE_THRESHOLD: f64 = 1e-14;

/// Piecewise-constant rescaled potential: core radius `r₁ ∈ (0, 1)` and core
/// coefficient `σ₁ > 0`. The shell coefficient is fixed to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotentialProfile<T> {
    r1: T,
    sigma1: T,
}

impl<T: Real> PotentialProfile<T> {
    pub fn new(r1: T, sigma1: T) -> Result<Self> {
        if !(r1.is_finite() && r1 > T::zero() && r1 < T::one()) {
            return Err(Error::InvalidParameter(format!(
                "r1 must lie in (0, 1), got {r1}"
            )));
        }
        if !(sigma1.is_finite() && sigma1 > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "sigma1 must be positive and finite, got {sigma1}"
            )));
        }
        Ok(Self { r1, sigma1 })
    }

    pub fn r1(&self) -> T {
        self.r1
    }

    pub fn sigma1(&self) -> T {
        self.sigma1
    }

    /// Same core radius, different coefficient.
    pub fn with_sigma1(&self, sigma1: T) -> Result<Self> {
        Self::new(self.r1, sigma1)
    }

    /// Argument `r₁/√σ₁` of the core Bessel functions at the interface.
    pub fn core_argument(&self) -> T {
        self.r1 / self.sigma1.sqrt()
    }
}

/// Constants of the closed-form solution for a given boundary value `f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShellCoefficients<T> {
    pub a0: T,
    pub a1: T,
    pub b1: T,
    pub rho: T,
}

/// The scalar `λ` of the multiplier map `f ↦ λ f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DnMultiplier<T> {
    pub lambda: T,
}

impl<T: Real> DnMultiplier<T> {
    pub fn apply(&self, f: T) -> T {
        self.lambda * f
    }

    /// Operator norm of a multiplier on scalars, `|λ|`.
    pub fn operator_norm(&self) -> T {
        self.lambda.abs()
    }
}

/// Physical constants needed to undo the rescaling of the potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalScaling<T> {
    pub hbar: T,
    pub mass: T,
    pub energy: T,
}

impl<T: Real> PhysicalScaling<T> {
    pub fn new(hbar: T, mass: T, energy: T) -> Result<Self> {
        if !(hbar.is_finite() && hbar > T::zero()) {
            return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")));
        }
        if !(mass.is_finite() && mass > T::zero()) {
            return Err(Error::InvalidParameter(format!("mass must be positive, got {mass}")));
        }
        if !energy.is_finite() {
            return Err(Error::InvalidParameter(format!("energy must be finite, got {energy}")));
        }
        Ok(Self { hbar, mass, energy })
    }

    /// `2m/ħ²`, the factor that turns `U` and `E` into their rescaled forms.
    pub fn rescale_factor(&self) -> T {
        T::lit(2.0) * self.mass / (self.hbar * self.hbar)
    }
}

/// Bessel values shared by all the closed-form expressions.
#[derive(Debug, Clone, Copy)]
struct Ingredients<T> {
    q: T,
    x: T,
    i0x: T,
    i1x: T,
    i0r: T,
    i1r: T,
    k0r: T,
    k1r: T,
}

impl<T: Real> Ingredients<T> {
    fn new(profile: &PotentialProfile<T>) -> Result<Self> {
        let q = profile.sigma1.sqrt();
        let x = profile.r1 / q;
        let (i0x, i1x) = bessel_i01(x)?;
        let (i0r, i1r) = bessel_i01(profile.r1)?;
        let (k0r, k1r) = bessel_k01(profile.r1)?;
        Ok(Self { q, x, i0x, i1x, i0r, i1r, k0r, k1r })
    }

    fn rho_parts(&self) -> (T, T) {
        let a = self.q * self.i1x;
        let num = a * self.i0r - self.i0x * self.i1r;
        let den = a * self.k0r + self.i0x * self.k1r;
        (num, den)
    }
}

/// Bessel values at the outer boundary `r = 1`.
#[derive(Debug, Clone, Copy)]
struct Boundary<T> {
    i0: T,
    i1: T,
    k0: T,
    k1: T,
}

impl<T: Real> Boundary<T> {
    fn new() -> Self {
        let (i0, i1) = bessel_i01(T::one()).expect("I at 1");
        let (k0, k1) = bessel_k01(T::one()).expect("K at 1");
        Self { i0, i1, k0, k1 }
    }

    fn denominator(&self, rho: T) -> Result<T> {
        let den = rho * self.k0 - self.i0;
        if den.abs() < T::lit(DEGENERATE_THRESHOLD) {
            return Err(Error::Degenerate {
                denominator: den.abs().to_f64_lossy(),
                threshold: DEGENERATE_THRESHOLD,
            });
        }
        Ok(den)
    }
}

/// The shell ratio `ρ(r₁, σ₁)`; zero exactly when `σ₁ = 1`.
pub fn rho<T: Real>(profile: &PotentialProfile<T>) -> Result<T> {
    let (num, den) = Ingredients::new(profile)?.rho_parts();
    Ok(num / den)
}

pub fn shell_coefficients<T: Real>(f: T, profile: &PotentialProfile<T>) -> Result<ShellCoefficients<T>> {
    if !f.is_finite() {
        return Err(Error::InvalidParameter(format!("boundary value f must be finite, got {f}")));
    }
    let ing = Ingredients::new(profile)?;
    let (num, den) = ing.rho_parts();
    let rho = num / den;
    let outer = Boundary::<T>::new().denominator(rho)?;
    Ok(ShellCoefficients {
        a0: (rho * ing.k0r - ing.i0r) * f / (outer * ing.i0x),
        a1: -f / outer,
        b1: rho * f / outer,
        rho,
    })
}

/// Closed-form `ψ(r)` on `[0, 1]`.
pub fn psi_analytic<T: Real>(r: T, f: T, profile: &PotentialProfile<T>) -> Result<T> {
    let c = shell_coefficients(f, profile)?;
    psi_from_coefficients(r, &c, profile)
}

/// Evaluates `ψ(r)` from precomputed coefficients. At `r = r₁` the core
/// expression is used.
pub fn psi_from_coefficients<T: Real>(
    r: T,
    c: &ShellCoefficients<T>,
    profile: &PotentialProfile<T>,
) -> Result<T> {
    if !(r >= T::zero() && r <= T::one()) {
        return Err(Error::InvalidParameter(format!("radius must lie in [0, 1], got {r}")));
    }
    if r <= profile.r1 {
        let (i0, _) = bessel_i01(r / profile.sigma1.sqrt())?;
        Ok(c.a0 * i0)
    } else {
        let (i0, _) = bessel_i01(r)?;
        let (k0, _) = bessel_k01(r)?;
        Ok(c.a1 * i0 + c.b1 * k0)
    }
}

/// Shell expression `a₁ I₀(r) + b₁ K₀(r)` regardless of which side of the
/// interface `r` lies on. Used for the one-sided limit at `r₁`.
pub fn psi_shell_branch<T: Real>(r: T, c: &ShellCoefficients<T>) -> Result<T> {
    let (i0, _) = bessel_i01(r)?;
    let (k0, _) = bessel_k01(r)?;
    Ok(c.a1 * i0 + c.b1 * k0)
}

pub fn dn_multiplier<T: Real>(profile: &PotentialProfile<T>) -> Result<DnMultiplier<T>> {
    let rho = rho(profile)?;
    let b = Boundary::<T>::new();
    let den = b.denominator(rho)?;
    Ok(DnMultiplier {
        lambda: -(rho * b.k1 + b.i1) / den,
    })
}

/// `λ` and `dλ/dσ₁` at fixed `r₁`.
///
/// Differentiates through `ρ` with `I₀′ = I₁`, `I₁′(x) = I₀(x) − I₁(x)/x`
/// and `∂x/∂σ₁ = −x/(2σ₁)`. Since `∂λ/∂ρ = (I₀(1)K₁(1) + I₁(1)K₀(1)) / (ρK₀(1) − I₀(1))²`
/// the chain is short.
pub fn dn_multiplier_and_derivative<T: Real>(profile: &PotentialProfile<T>) -> Result<(T, T)> {
    let ing = Ingredients::new(profile)?;
    let (num, den) = ing.rho_parts();
    let rho = num / den;
    let b = Boundary::<T>::new();
    let outer = b.denominator(rho)?;
    let lambda = -(rho * b.k1 + b.i1) / outer;

    let sigma = profile.sigma1;
    let two = T::lit(2.0);
    let dx = -ing.x / (two * sigma);
    let dq = T::one() / (two * ing.q);
    let di1x = if ing.x > T::zero() {
        ing.i0x - ing.i1x / ing.x
    } else {
        T::lit(0.5)
    };
    // A = q I₁(x), B = I₀(x)
    let da = dq * ing.i1x + ing.q * di1x * dx;
    let db = ing.i1x * dx;
    let dnum = da * ing.i0r - db * ing.i1r;
    let dden = da * ing.k0r + db * ing.k1r;
    let drho = (dnum * den - num * dden) / (den * den);

    let wronskian_one = b.i0 * b.k1 + b.i1 * b.k0;
    let dlambda = wronskian_one / (outer * outer) * drho;
    Ok((lambda, dlambda))
}

/// `λ` through the Jaeger cross products anchored at `(1, r₁)`:
///
/// ```text
/// λ = (I₀(x) D₁₁(1,r₁) − √σ₁ I₁(x) D₁₀(1,r₁)) / (I₀(x) D₀₁(1,r₁) − √σ₁ I₁(x) D(1,r₁))
/// ```
pub fn dn_multiplier_jaeger<T: Real>(profile: &PotentialProfile<T>) -> Result<DnMultiplier<T>> {
    let q = profile.sigma1.sqrt();
    let (i0x, i1x) = bessel_i01(profile.core_argument())?;
    let jd = JaegerValues::new(T::one(), profile.r1)?;
    let num = i0x * jd.d11 - q * i1x * jd.d10;
    let den = i0x * jd.d01 - q * i1x * jd.d;
    if den.abs() < T::lit(DEGENERATE_THRESHOLD) {
        return Err(Error::Degenerate {
            denominator: den.abs().to_f64_lossy(),
            threshold: DEGENERATE_THRESHOLD,
        });
    }
    Ok(DnMultiplier { lambda: num / den })
}

/// Multiplier of the homogeneous disk, `I₁(1)/I₀(1)`.
pub fn disk_dn_multiplier<T: Real>() -> DnMultiplier<T> {
    let b = Boundary::<T>::new();
    DnMultiplier { lambda: b.i1 / b.i0 }
}

/// Operator-norm distance `|λ(p) − λ(q)|`.
pub fn dn_distance<T: Real>(p: &PotentialProfile<T>, q: &PotentialProfile<T>) -> Result<T> {
    Ok((dn_multiplier(p)?.lambda - dn_multiplier(q)?.lambda).abs())
}

/// `D(x, y) = I₀(x)K₀(y) − K₀(x)I₀(y)`.
pub fn jaeger_d<T: Real>(x: T, y: T) -> Result<T> {
    Ok(JaegerValues::new(x, y)?.d)
}

/// `∂D/∂x = I₁(x)K₀(y) + K₁(x)I₀(y)`.
pub fn jaeger_d10<T: Real>(x: T, y: T) -> Result<T> {
    Ok(JaegerValues::new(x, y)?.d10)
}

/// `∂D/∂y = −I₀(x)K₁(y) − K₀(x)I₁(y)`.
pub fn jaeger_d01<T: Real>(x: T, y: T) -> Result<T> {
    Ok(JaegerValues::new(x, y)?.d01)
}

/// `∂²D/∂x∂y = −I₁(x)K₁(y) + K₁(x)I₁(y)`.
pub fn jaeger_d11<T: Real>(x: T, y: T) -> Result<T> {
    Ok(JaegerValues::new(x, y)?.d11)
}

/// All four cross products at one point, sharing the Bessel evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JaegerValues<T> {
    pub d: T,
    pub d10: T,
    pub d01: T,
    pub d11: T,
}

impl<T: Real> JaegerValues<T> {
    pub fn new(x: T, y: T) -> Result<Self> {
        let (i0x, i1x) = bessel_i01(x)?;
        let (k0x, k1x) = bessel_k01(x)?;
        let (i0y, i1y) = bessel_i01(y)?;
        let (k0y, k1y) = bessel_k01(y)?;
        Ok(Self {
            d: i0x * k0y - k0x * i0y,
            d10: i1x * k0y + k1x * i0y,
            d01: -i0x * k1y - k0x * i1y,
            d11: -i1x * k1y + k1x * i1y,
        })
    }
}

/// `F(η) = η I₁(r/η) / I₀(r/η)`, strictly increasing in `η`.
pub fn monotone_f<T: Real>(eta: T, r: T) -> Result<T> {
    if !(eta > T::zero() && r > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "monotone_f needs eta > 0 and r > 0, got eta = {eta}, r = {r}"
        )));
    }
    let (i0, i1) = bessel_i01(r / eta)?;
    Ok(eta * i1 / i0)
}

/// Physical potentials `(U₁, U₂)` of core and shell.
///
/// `U₁ = E + ħ²/(2m σ₁)` and `U₂ = E + ħ²/(2m)`.
pub fn physical_potential<T: Real>(profile: &PotentialProfile<T>, scaling: &PhysicalScaling<T>) -> (T, T) {
    let k = scaling.rescale_factor();
    let e_tilde = k * scaling.energy;
    let u1 = (e_tilde + profile.sigma1.recip()) / k;
    let u2 = (e_tilde + T::one()) / k;
    (u1, u2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(r1: f64, s: f64) -> PotentialProfile<f64> {
        PotentialProfile::new(r1, s).unwrap()
    }

    #[test]
    fn profile_validation() {
        assert!(PotentialProfile::new(0.0, 1.0).is_err());
        assert!(PotentialProfile::new(1.0, 1.0).is_err());
        assert!(PotentialProfile::new(1.5, 1.0).is_err());
        assert!(PotentialProfile::new(0.5, 0.0).is_err());
        assert!(PotentialProfile::new(0.5, -2.0).is_err());
        assert!(PotentialProfile::new(0.5, f64::NAN).is_err());
        assert!(PotentialProfile::new(0.5, 2.0).is_ok());
    }

    #[test]
    fn rho_vanishes_for_homogeneous_disk() {
        assert_eq!(rho(&p(0.5, 1.0)).unwrap(), 0.0);
        assert!(rho(&p(1e-8, 4.0)).unwrap().abs() < 1e-15);
        // σ₁ > 1 gives ρ > 0, σ₁ < 1 gives ρ < 0
        assert!(rho(&p(0.3, 2.0)).unwrap() > 0.0);
        assert!(rho(&p(0.3, 0.5)).unwrap() < 0.0);
    }

    #[test]
    fn zero_boundary_value_gives_zero_solution() {
        let c = shell_coefficients(0.0, &p(0.4, 3.0)).unwrap();
        assert_eq!((c.a0, c.a1, c.b1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn reference_center_values() {
        // ψ(0) = a₀ since I₀(0) = 1
        let c = shell_coefficients(1.0, &p(0.7, 0.9)).unwrap();
        assert!((c.a0 - 692.0 / 887.0).abs() < 1e-4);
        let c = shell_coefficients(1.0, &p(0.8, 1.5)).unwrap();
        assert!((c.a0 - 199.0 / 240.0).abs() < 1e-4);
        let centre = psi_analytic(0.0, 1.0, &p(0.7, 0.9)).unwrap();
        assert!((centre - 0.780158).abs() < 1e-4);
    }

    #[test]
    fn boundary_and_interface_conditions() {
        for &(r1, s, f) in &[(0.7, 0.9, 1.0), (0.3, 2.0, -2.5), (0.8, 0.05, 0.3), (0.15, 12.0, 4.0)] {
            let prof = p(r1, s);
            let c = shell_coefficients(f, &prof).unwrap();
            let at_one = psi_analytic(1.0, f, &prof).unwrap();
            assert!((at_one - f).abs() <= 1e-12 * f.abs());

            let inner = psi_from_coefficients(r1, &c, &prof).unwrap();
            let outer = psi_shell_branch(r1, &c).unwrap();
            assert!((inner - outer).abs() <= 1e-12 * inner.abs().max(outer.abs()));

            let x = prof.core_argument();
            let (i0x, i1x) = bessel_i01(x).unwrap();
            let (i0r, i1r) = bessel_i01(r1).unwrap();
            let (k0r, k1r) = bessel_k01(r1).unwrap();
            let lhs = s.sqrt() * c.a0 * i1x;
            let rhs = c.a1 * i1r - c.b1 * k1r;
            assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(rhs.abs()));
            let lhs = c.a0 * i0x;
            let rhs = c.a1 * i0r + c.b1 * k0r;
            assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs());
        }
    }

    #[test]
    fn homogeneous_profile_gives_disk_multiplier() {
        let disk = disk_dn_multiplier::<f64>().lambda;
        assert!((disk - 0.44638997).abs() < 1e-7);
        for i in 1..10 {
            let lam = dn_multiplier(&p(f64::from(i) / 10.0, 1.0)).unwrap().lambda;
            assert_eq!(lam, disk);
        }
    }

    #[test]
    fn example_multiplier_is_limit_of_fd_sequence() {
        let lam = dn_multiplier(&p(0.3, 2.0)).unwrap().lambda;
        assert!((lam - 0.4465).abs() < 1e-3);
        // FD values 0.4431, 0.4448, 0.4457, 0.4461 approach from below
        assert!(lam > 0.4461);
    }

    #[test]
    fn jaeger_form_matches_direct_form() {
        for &(r1, s) in &[(0.5, 1.0), (0.3, 2.0), (0.8, 0.5), (0.05, 20.0), (0.95, 0.05)] {
            let a = dn_multiplier(&p(r1, s)).unwrap().lambda;
            let b = dn_multiplier_jaeger(&p(r1, s)).unwrap().lambda;
            assert!((a - b).abs() <= 1e-11 * a.abs(), "{r1} {s}: {a} vs {b}");
        }
    }

    #[test]
    fn distance_is_operator_norm_difference() {
        let a = p(0.7, 0.9);
        assert_eq!(dn_distance(&a, &a).unwrap(), 0.0);
        assert!(dn_distance(&a, &p(0.7, 1.5)).unwrap() > 1e-3);
        let m = dn_multiplier(&a).unwrap();
        assert_eq!(m.operator_norm(), m.lambda.abs());
        assert_eq!(m.apply(2.0), 2.0 * m.lambda);
    }

    #[test]
    fn jaeger_diagonal() {
        for &x in &[0.1_f64, 0.5, 1.0, 3.0, 10.0] {
            assert_eq!(jaeger_d(x, x).unwrap(), 0.0);
            assert!((jaeger_d10(x, x).unwrap() - 1.0 / x).abs() < 1e-12 / x);
            assert!(jaeger_d11(x, x).unwrap().abs() < 1e-15 * (1.0 + 1.0 / x));
        }
    }

    #[test]
    fn monotone_f_limits() {
        assert!((monotone_f(1.0_f64, 1.0).unwrap() - 0.44638997).abs() < 1e-7);
        for &r in &[0.3_f64, 0.7, 2.0] {
            assert!((monotone_f(1e6, r).unwrap() - r / 2.0).abs() < 1e-6);
        }
        assert!(monotone_f(0.0, 1.0).is_err());
    }

    #[test]
    fn physical_potentials() {
        let s = PhysicalScaling::new(1.0, 0.5, 0.0).unwrap();
        let (u1, u2) = physical_potential(&p(0.5, 2.0), &s);
        assert!((u1 - 0.5).abs() < 1e-15);
        assert!((u2 - 1.0).abs() < 1e-15);

        let s = PhysicalScaling::new(1.054_571_817e-34, 9.109_383_7e-31, 1.6e-19).unwrap();
        let (u1, u2) = physical_potential(&p(0.5, 1.0), &s);
        assert!((u1 - u2).abs() <= 1e-15 * u2.abs());
        let (u1, _) = physical_potential(&p(0.5, 1e300), &s);
        assert!((u1 - s.energy).abs() <= 1e-12 * s.energy);
        assert!(PhysicalScaling::new(0.0, 1.0, 1.0).is_err());
        assert!(PhysicalScaling::new(1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn derivative_matches_central_difference() {
        for &(r1, s) in &[(0.7, 0.9), (0.8, 1.5), (0.3, 0.05), (0.5, 15.0)] {
            let (_, d) = dn_multiplier_and_derivative(&p(r1, s)).unwrap();
            let h = 1e-6 * s;
            let up = dn_multiplier(&p(r1, s + h)).unwrap().lambda;
            let dn = dn_multiplier(&p(r1, s - h)).unwrap().lambda;
            let fd = (up - dn) / (2.0 * h);
            assert!(((d - fd) / d).abs() < 1e-6, "{r1} {s}: {d} vs {fd}");
        }
    }

    #[test]
    fn generic_over_single_precision() {
        let prof = PotentialProfile::<f32>::new(0.3, 2.0).unwrap();
        let lam = dn_multiplier(&prof).unwrap().lambda;
        let ref_lam = dn_multiplier(&p(0.3, 2.0)).unwrap().lambda;
        assert!((f64::from(lam) - ref_lam).abs() < 1e-6);
    }
}
