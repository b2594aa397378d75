//! Modified Bessel functions of orders 0 and 1 on the positive real axis.
//!
//! Evaluation strategy:
//!
//! - `I₀, I₁`: ascending power series for `x ≤ 25` (all terms positive, so
//!   there is no cancellation), Hankel asymptotic expansion beyond.
//! - `K₀, K₁`: logarithmic series for `x ≤ 2`, Steed's continued fraction
//!   (Temme's CF2 form) for `x > 2`.
//!
//! Arguments above [`arg_limit`] (700 for `f64`) are rejected with a range
//! error instead of overflowing.

use crate::error::{Error, Result};
use crate::real::Real;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_6;

/// Above this the power series for `I` is replaced by the asymptotic form.
const I_SERIES_MAX: f64 = 25.0;
/// Above this `K` comes from the continued fraction.
const K_SERIES_MAX: f64 = 2.0;
const MAX_TERMS: usize = 500;

/// A function value with a rough bound on its absolute rounding error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselEval<T> {
    pub value: T,
    pub estimated_abs_error: T,
}

/// Largest admissible argument: 700 in double precision, and a few units
/// below `ln(MAX)` for narrower types.
pub fn arg_limit<T: Real>() -> T {
    T::lit(700.0).min(T::max_value().ln() - T::lit(8.0))
}

fn check_first_kind<T: Real>(name: &'static str, x: T) -> Result<()> {
    if !x.is_finite() || x < T::zero() {
        return Err(Error::Domain {
            function: name,
            arg: x.to_f64_lossy(),
            requirement: "a finite argument x >= 0",
        });
    }
    check_range(name, x)
}

fn check_second_kind<T: Real>(name: &'static str, x: T) -> Result<()> {
    if !x.is_finite() || x <= T::zero() {
        return Err(Error::Domain {
            function: name,
            arg: x.to_f64_lossy(),
            requirement: "a finite argument x > 0",
        });
    }
    check_range(name, x)
}

fn check_range<T: Real>(name: &'static str, x: T) -> Result<()> {
    let limit = arg_limit::<T>();
    if x > limit {
        return Err(Error::Range {
            function: name,
            arg: x.to_f64_lossy(),
            limit: limit.to_f64_lossy(),
        });
    }
    Ok(())
}

/// `(I₀(x), I₁(x))` for `x ≥ 0`.
pub fn bessel_i01<T: Real>(x: T) -> Result<(T, T)> {
    check_first_kind("bessel_i", x)?;
    Ok(i01_unchecked(x))
}

/// `(K₀(x), K₁(x))` for `x > 0`.
pub fn bessel_k01<T: Real>(x: T) -> Result<(T, T)> {
    check_second_kind("bessel_k", x)?;
    Ok(k01_unchecked(x))
}

pub fn bessel_i0<T: Real>(x: T) -> Result<T> {
    check_first_kind("bessel_i0", x)?;
    Ok(i01_unchecked(x).0)
}

pub fn bessel_i1<T: Real>(x: T) -> Result<T> {
    check_first_kind("bessel_i1", x)?;
    Ok(i01_unchecked(x).1)
}

pub fn bessel_k0<T: Real>(x: T) -> Result<T> {
    check_second_kind("bessel_k0", x)?;
    Ok(k01_unchecked(x).0)
}

pub fn bessel_k1<T: Real>(x: T) -> Result<T> {
    check_second_kind("bessel_k1", x)?;
    Ok(k01_unchecked(x).1)
}

/// Which of the four functions to evaluate through [`eval`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselKind {
    I0,
    I1,
    K0,
    K1,
}

impl BesselKind {
    pub const ALL: [BesselKind; 4] = [BesselKind::I0, BesselKind::I1, BesselKind::K0, BesselKind::K1];

    pub fn name(self) -> &'static str {
        match self {
            BesselKind::I0 => "i0",
            BesselKind::I1 => "i1",
            BesselKind::K0 => "k0",
            BesselKind::K1 => "k1",
        }
    }
}

impl std::str::FromStr for BesselKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "i0" => Ok(BesselKind::I0),
            "i1" => Ok(BesselKind::I1),
            "k0" => Ok(BesselKind::K0),
            "k1" => Ok(BesselKind::K1),
            other => Err(Error::InvalidParameter(format!(
                "unknown Bessel function '{other}', expected one of i0, i1, k0, k1"
            ))),
        }
    }
}

/// Point evaluation with an error estimate.
///
/// The estimate is a conservative multiple of the unit roundoff: the series
/// and continued-fraction paths accumulate a handful of rounding errors
/// each, while the logarithmic `K` series loses up to the ratio between its
/// largest term and the result.
pub fn eval<T: Real>(kind: BesselKind, x: T) -> Result<BesselEval<T>> {
    let value = match kind {
        BesselKind::I0 => bessel_i0(x)?,
        BesselKind::I1 => bessel_i1(x)?,
        BesselKind::K0 => bessel_k0(x)?,
        BesselKind::K1 => bessel_k1(x)?,
    };
    let eps = T::epsilon();
    let amplification = match kind {
        BesselKind::I0 | BesselKind::I1 => T::lit(16.0),
        BesselKind::K0 | BesselKind::K1 if x <= T::lit(K_SERIES_MAX) => {
            // |ln(x/2)+γ|·I₀(x) bounds the largest cancelling term.
            let (i0, _) = i01_unchecked(x);
            let lead = ((x / T::lit(2.0)).ln() + T::lit(EULER_GAMMA)).abs() * i0 + T::one();
            T::lit(16.0) * (lead / value.abs()).max(T::one())
        }
        _ => T::lit(32.0),
    };
    Ok(BesselEval {
        value,
        estimated_abs_error: amplification * eps * value.abs(),
    })
}

fn i01_unchecked<T: Real>(x: T) -> (T, T) {
    if x <= T::lit(I_SERIES_MAX) {
        (i0_series(x), i1_series(x))
    } else {
        (i_asymptotic(0, x), i_asymptotic(1, x))
    }
}

fn k01_unchecked<T: Real>(x: T) -> (T, T) {
    if x <= T::lit(K_SERIES_MAX) {
        k01_series(x)
    } else {
        k01_continued_fraction(x)
    }
}

/// Cut-off for dropping series terms: three decades below the unit roundoff.
fn series_tolerance<T: Real>() -> T {
    T::epsilon() * T::lit(1e-3)
}

fn i0_series<T: Real>(x: T) -> T {
    let q = x * x / T::lit(4.0);
    let tol = series_tolerance::<T>();
    let mut term = T::one();
    let mut sum = T::one();
    for k in 1..MAX_TERMS {
        let k = T::from_usize_exact(k);
        term = term * q / (k * k);
        sum = sum + term;
        if term <= tol * sum {
            break;
        }
    }
    sum
}

fn i1_series<T: Real>(x: T) -> T {
    let half = x / T::lit(2.0);
    let q = half * half;
    let tol = series_tolerance::<T>();
    let mut term = T::one();
    let mut sum = T::one();
    for k in 1..MAX_TERMS {
        let kf = T::from_usize_exact(k);
        term = term * q / (kf * (kf + T::one()));
        sum = sum + term;
        if term <= tol * sum {
            break;
        }
    }
    half * sum
}

/// `I_ν(x) ~ eˣ/√(2πx) · Σ (-1)ᵏ aₖ(ν)/xᵏ`, truncated at the smallest term.
fn i_asymptotic<T: Real>(order: u32, x: T) -> T {
    let mu = T::lit(4.0 * f64::from(order * order));
    let tol = series_tolerance::<T>();
    let mut term = T::one();
    let mut sum = T::one();
    for k in 1..MAX_TERMS {
        let odd = T::from_usize_exact(2 * k - 1);
        let next = -term * (mu - odd * odd) / (T::from_usize_exact(k) * T::lit(8.0) * x);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum = sum + term;
        if term.abs() <= tol * sum.abs() {
            break;
        }
    }
    x.exp() / (T::lit(2.0) * T::PI() * x).sqrt() * sum
}

/// Logarithmic ascending series:
///
/// `K₀(x) = -(ln(x/2)+γ) I₀(x) + Σ_{k≥1} Hₖ qᵏ/(k!)²`
///
/// `K₁(x) = 1/x + ln(x/2) I₁(x) - (x/4) Σ_{k≥0} (ψ(k+1)+ψ(k+2)) qᵏ/(k!(k+1)!)`
///
/// with `q = x²/4`, `Hₖ` the harmonic numbers and `ψ(n+1) = Hₙ - γ`.
fn k01_series<T: Real>(x: T) -> (T, T) {
    let gamma = T::lit(EULER_GAMMA);
    let q = x * x / T::lit(4.0);
    let log_half = (x / T::lit(2.0)).ln();
    let tol = series_tolerance::<T>();

    let i0 = i0_series(x);
    let i1 = i1_series(x);

    // K₀
    let mut term = T::one();
    let mut harmonic = T::zero();
    let mut tail0 = T::zero();
    for k in 1..MAX_TERMS {
        let kf = T::from_usize_exact(k);
        term = term * q / (kf * kf);
        harmonic = harmonic + T::one() / kf;
        let contrib = term * harmonic;
        tail0 = tail0 + contrib;
        if contrib <= tol * tail0 {
            break;
        }
    }
    let k0 = -(log_half + gamma) * i0 + tail0;

    // K₁
    let mut term = T::one();
    let mut h_k = T::zero();
    let mut h_k1 = T::one();
    let mut tail1 = -gamma - gamma + h_k + h_k1;
    for k in 1..MAX_TERMS {
        let kf = T::from_usize_exact(k);
        term = term * q / (kf * (kf + T::one()));
        h_k = h_k + T::one() / kf;
        h_k1 = h_k1 + T::one() / (kf + T::one());
        let contrib = term * (h_k + h_k1 - gamma - gamma);
        tail1 = tail1 + contrib;
        if contrib.abs() <= tol * tail1.abs() {
            break;
        }
    }
    let k1 = x.recip() + log_half * i1 - x / T::lit(4.0) * tail1;

    (k0, k1)
}

/// Steed's algorithm for the second continued fraction of `K_ν`, `ν = 0`,
/// which yields `K₀` and `K₁` together.
fn k01_continued_fraction<T: Real>(x: T) -> (T, T) {
    let two = T::lit(2.0);
    let eps = T::epsilon();
    let a1 = T::lit(0.25);

    let mut b = two * (T::one() + x);
    let mut d = b.recip();
    let mut h = d;
    let mut delh = d;
    let mut q1 = T::zero();
    let mut q2 = T::one();
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = T::one() + q * delh;

    for i in 1..MAX_TERMS {
        let fi = T::from_usize_exact(i);
        a = a - two * fi;
        c = -a * c / (fi + T::one());
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q = q + c * qnew;
        b = b + two;
        d = (b + a * d).recip();
        delh = (b * d - T::one()) * delh;
        h = h + delh;
        let dels = q * delh;
        s = s + dels;
        if (dels / s).abs() < eps {
            break;
        }
    }
    h = a1 * h;
    let k0 = (T::PI() / (two * x)).sqrt() * (-x).exp() / s;
    let k1 = k0 * (x + T::lit(0.5) - h) / x;
    (k0, k1)
}
