//! Distinct core-shell profiles with identical DN maps.
//!
//! Two profiles `(r₁, σ₁)` and `(r₂, σ₂)` share their multiplier exactly
//! when the determinant
//!
//! ```text
//! | D₁₀(r₁,r₂)        √σ₁ I₁(r₁/√σ₁)   D₁₁(r₁,r₂)       |
//! | I₀(r₂/√σ₂)        0                √σ₂ I₁(r₂/√σ₂)   |
//! | D(r₁,r₂)          I₀(r₁/√σ₁)       D₀₁(r₁,r₂)       |
//! ```
//!
//! vanishes. For fixed `(r₁, σ₁, r₂)` the admissible `σ₂` are the roots of
//! this determinant in `σ₂`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::dnmap::{dn_multiplier, JaegerValues, PotentialProfile};
use crate::error::{Error, Result};
use crate::fdsolver::solve_fd;
use crate::real::Real;
use crate::roots::brent;
use crate::specfun::bessel_i01;

/// Default `σ₂` search interval.
pub const SCAN_LO: f64 = 1e-4;
pub const SCAN_HI: f64 = 1e3;
/// Log-spaced scan points used to bracket sign changes.
pub const SCAN_POINTS: usize = 200;
/// Relative bracket width at which root refinement stops.
pub const ROOT_REL_TOL: f64 = 5e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CamouflagePair<T> {
    pub p: PotentialProfile<T>,
    pub q: PotentialProfile<T>,
    /// Row-scaled determinant at `(p, q)`.
    pub det_residual: T,
    /// `|λ(p) − λ(q)|`.
    pub dn_residual: T,
}

impl<T: Real> CamouflagePair<T> {
    pub fn new(p: PotentialProfile<T>, q: PotentialProfile<T>) -> Result<Self> {
        let det_residual = det_d(p.r1(), p.sigma1(), q.r1(), q.sigma1())?;
        let dn_residual = (dn_multiplier(&p)?.lambda - dn_multiplier(&q)?.lambda).abs();
        Ok(Self { p, q, det_residual, dn_residual })
    }
}

fn check_profile_args<T: Real>(r1: T, sigma1: T, r2: T, sigma2: T) -> Result<()> {
    PotentialProfile::new(r1, sigma1)?;
    PotentialProfile::new(r2, sigma2)?;
    Ok(())
}

/// Rows of the determinant before scaling.
fn matrix<T: Real>(r1: T, sigma1: T, r2: T, sigma2: T) -> Result<[[T; 3]; 3]> {
    let q1 = sigma1.sqrt();
    let q2 = sigma2.sqrt();
    let (i0a, i1a) = bessel_i01(r1 / q1)?;
    let (i0b, i1b) = bessel_i01(r2 / q2)?;
    let jd = JaegerValues::new(r1, r2)?;
    Ok([
        [jd.d10, q1 * i1a, jd.d11],
        [i0b, T::zero(), q2 * i1b],
        [jd.d, i0a, jd.d01],
    ])
}

/// The camouflage determinant with every row scaled to unit max-norm.
pub fn det_d<T: Real>(r1: T, sigma1: T, r2: T, sigma2: T) -> Result<T> {
    check_profile_args(r1, sigma1, r2, sigma2)?;
    let mut m = matrix(r1, sigma1, r2, sigma2)?;
    for row in m.iter_mut() {
        let norm = row.iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
        if norm > T::zero() {
            for v in row.iter_mut() {
                *v = *v / norm;
            }
        }
    }
    Ok(m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
}

/// Scan samples `(σ₂, det)` on a log grid of `points` nodes over `[lo, hi]`.
pub fn scan_det<T: Real>(r1: T, sigma1: T, r2: T, lo: T, hi: T, points: usize) -> Result<Vec<(T, T)>> {
    if !(lo > T::zero() && hi > lo && points >= 2) {
        return Err(Error::InvalidParameter(format!(
            "scan needs 0 < lo < hi and at least two points, got [{lo}, {hi}] with {points}"
        )));
    }
    let (llo, lhi) = (lo.ln(), hi.ln());
    let last = T::from_usize_exact(points - 1);
    (0..points)
        .into_par_iter()
        .map(|i| {
            let t = T::from_usize_exact(i) / last;
            let s = if i + 1 == points { hi } else if i == 0 { lo } else { (llo + (lhi - llo) * t).exp() };
            det_d(r1, sigma1, r2, s).map(|d| (s, d))
        })
        .collect()
}

fn refine<T: Real>(r1: T, sigma1: T, r2: T, lo: T, hi: T) -> Result<T> {
    let mut failure = None;
    let out = brent(
        |s| match det_d(r1, sigma1, r2, s) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                T::nan()
            }
        },
        lo,
        hi,
        T::lit(ROOT_REL_TOL),
        400,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    out.map(|b| b.root).ok_or_else(|| Error::NoRoot {
        lo: lo.to_f64_lossy(),
        hi: hi.to_f64_lossy(),
        scan: Vec::new(),
    })
}

fn roots_from_scan<T: Real>(r1: T, sigma1: T, r2: T, scan: &[(T, T)]) -> Result<Vec<T>> {
    let mut roots = Vec::new();
    for w in scan.windows(2) {
        let ((sa, da), (sb, db)) = (w[0], w[1]);
        if da == T::zero() {
            roots.push(sa);
        } else if db != T::zero() && (da > T::zero()) != (db > T::zero()) {
            roots.push(refine(r1, sigma1, r2, sa, sb)?);
        }
    }
    if let Some(&(s, d)) = scan.last() {
        if d == T::zero() {
            roots.push(s);
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
    roots.dedup();
    Ok(roots)
}

fn no_root<T: Real>(lo: T, hi: T, scan: &[(T, T)]) -> Error {
    Error::NoRoot {
        lo: lo.to_f64_lossy(),
        hi: hi.to_f64_lossy(),
        scan: scan.iter().map(|&(s, d)| (s.to_f64_lossy(), d.to_f64_lossy())).collect(),
    }
}

/// A root `σ₂` of the determinant inside `bracket`.
///
/// Refines directly when the determinant changes sign over the bracket,
/// otherwise scans it on a log grid and returns the smallest root found.
pub fn find_sigma2<T: Real>(r1: T, sigma1: T, r2: T, bracket: (T, T)) -> Result<T> {
    let (lo, hi) = bracket;
    check_profile_args(r1, sigma1, r2, T::one())?;
    let dlo = det_d(r1, sigma1, r2, lo)?;
    let dhi = det_d(r1, sigma1, r2, hi)?;
    if dlo == T::zero() {
        return Ok(lo);
    }
    if (dlo > T::zero()) != (dhi > T::zero()) {
        return refine(r1, sigma1, r2, lo, hi);
    }
    let scan = scan_det(r1, sigma1, r2, lo, hi, SCAN_POINTS)?;
    roots_from_scan(r1, sigma1, r2, &scan)?
        .into_iter()
        .next()
        .ok_or_else(|| no_root(lo, hi, &scan))
}

/// Every root `σ₂` in the default interval `(10⁻⁴, 10³)`, ascending.
pub fn find_sigma2_roots<T: Real>(r1: T, sigma1: T, r2: T) -> Result<Vec<T>> {
    find_sigma2_roots_in(r1, sigma1, r2, T::lit(SCAN_LO), T::lit(SCAN_HI))
}

pub fn find_sigma2_roots_in<T: Real>(r1: T, sigma1: T, r2: T, lo: T, hi: T) -> Result<Vec<T>> {
    check_profile_args(r1, sigma1, r2, T::one())?;
    let scan = scan_det(r1, sigma1, r2, lo, hi, SCAN_POINTS)?;
    let roots = roots_from_scan(r1, sigma1, r2, &scan)?;
    if roots.is_empty() {
        return Err(no_root(lo, hi, &scan));
    }
    Ok(roots)
}

/// Analytic and finite-difference comparison of a pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairVerification<T> {
    pub dn_residual: T,
    /// `(N, |g_N(p) − g_N(q)|)` for every requested grid size.
    pub fd_residuals: Vec<(usize, T)>,
}

pub fn verify_pair<T: Real>(pair: &CamouflagePair<T>, f: T, grid_sizes: &[usize]) -> Result<PairVerification<T>> {
    let dn_residual = (dn_multiplier(&pair.p)?.apply(f) - dn_multiplier(&pair.q)?.apply(f)).abs();
    let fd_residuals = grid_sizes
        .par_iter()
        .map(|&n| {
            let gp = solve_fd(f, &pair.p, n)?.neumann;
            let gq = solve_fd(f, &pair.q, n)?.neumann;
            Ok((n, (gp - gq).abs()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PairVerification { dn_residual, fd_residuals })
}

/// Serializable summary of one pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CamouflageReport {
    pub r1: f64,
    pub sigma1: f64,
    pub r2: f64,
    pub sigma2: f64,
    pub det_residual: f64,
    pub dn_residual: f64,
    #[serde(rename = "fd_residuals_by_N")]
    pub fd_residuals_by_n: BTreeMap<usize, f64>,
}

impl CamouflageReport {
    pub fn new<T: Real>(pair: &CamouflagePair<T>, verification: Option<&PairVerification<T>>) -> Self {
        Self {
            r1: pair.p.r1().to_f64_lossy(),
            sigma1: pair.p.sigma1().to_f64_lossy(),
            r2: pair.q.r1().to_f64_lossy(),
            sigma2: pair.q.sigma1().to_f64_lossy(),
            det_residual: pair.det_residual.to_f64_lossy(),
            dn_residual: verification
                .map(|v| v.dn_residual)
                .unwrap_or(pair.dn_residual)
                .to_f64_lossy(),
            fd_residuals_by_n: verification
                .map(|v| v.fd_residuals.iter().map(|&(n, r)| (n, r.to_f64_lossy())).collect())
                .unwrap_or_default(),
        }
    }
}
