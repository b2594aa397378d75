//! Regeneration of the four reference result tables.
//!
//! Tables 3 and 4 are deterministic: FD fluxes of a camouflage pair for
//! `N ∈ {100, 200, 400, 800}`. Tables 1 and 2 are noisy reconstructions;
//! their reference rows come from a single unseeded noise draw, so they are
//! regenerated as seed ensembles and summarised by medians.

use serde::Serialize;

use crate::camouflage::{find_sigma2, verify_pair, CamouflagePair};
use crate::dnmap::PotentialProfile;
use crate::error::{Error, Result};
use crate::fdsolver::solve_fd;
use crate::inverse::{reconstruct_ensemble, ReconstructionSetup, TikhonovResult};

pub const GRID_SIZES: [usize; 4] = [100, 200, 400, 800];
pub const NOISE_LEVELS: [f64; 3] = [0.1, 0.01, 0.001];

/// Reference row of a camouflage table: `(N, λ_p, λ_q, |λ_p − λ_q|)`.
pub type CamouflageReference = (usize, f64, f64, f64);
/// Reference row of a noise table: `(δ, α, σ_est, ε_abs)`.
pub type NoiseReference = (f64, f64, f64, f64);

pub const TABLE_1: [NoiseReference; 3] = [
    (0.1, 1.36e-3, 0.9007, 7.4295e-4),
    (0.01, 1.29e-4, 0.9003, 3.3653e-4),
    (0.001, 5.4e-6, 0.9002, 2.4817e-4),
];
pub const TABLE_2: [NoiseReference; 3] = [
    (0.1, 5.56e-4, 1.4999, 1.3517e-4),
    (0.01, 5.19e-5, 1.5003, 2.9780e-4),
    (0.001, 2.1e-6, 1.5000, 4.6362e-5),
];
pub const TABLE_3: [CamouflageReference; 4] = [
    (100, 0.4431, 0.4409, 2.2122e-3),
    (200, 0.4448, 0.4438, 1.0481e-3),
    (400, 0.4457, 0.4452, 5.1991e-4),
    (800, 0.4461, 0.4459, 2.5845e-4),
];
pub const TABLE_4: [CamouflageReference; 4] = [
    (100, 0.4234, 0.4254, 2.0125e-3),
    (200, 0.4267, 0.4278, 1.0036e-3),
    (400, 0.4284, 0.4289, 5.0138e-4),
    (800, 0.4293, 0.4295, 2.5071e-4),
];

/// Median `ε_abs` bound per noise level of the ensemble summaries.
pub const MEDIAN_EPS_BOUND: [f64; 3] = [5e-2, 5e-3, 1e-3];
/// Band around the true `σ₁` for the ensemble median estimate.
pub const SIGMA_BAND: [f64; 3] = [0.05, 0.01, 0.005];

/// Which table to rebuild.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TableId {
    One,
    Two,
    Three,
    Four,
}

impl TableId {
    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1 => Ok(TableId::One),
            2 => Ok(TableId::Two),
            3 => Ok(TableId::Three),
            4 => Ok(TableId::Four),
            _ => Err(Error::InvalidParameter(format!("table id must be 1, 2, 3 or 4, got {n}"))),
        }
    }

    pub fn number(self) -> u8 {
        match self {
            TableId::One => 1,
            TableId::Two => 2,
            TableId::Three => 3,
            TableId::Four => 4,
        }
    }
}

/// `(r₁, σ₁)` of the noise tables.
pub fn noise_table_profile(id: TableId) -> Option<(f64, f64, &'static [NoiseReference; 3])> {
    match id {
        TableId::One => Some((0.7, 0.9, &TABLE_1)),
        TableId::Two => Some((0.8, 1.5, &TABLE_2)),
        _ => None,
    }
}

/// `(r₁, σ₁, r₂, σ₂ bracket)` of the camouflage tables.
pub fn camouflage_table_setup(id: TableId) -> Option<(f64, f64, f64, (f64, f64), &'static [CamouflageReference; 4])> {
    match id {
        TableId::Three => Some((0.3, 2.0, 0.7, (0.5, 2.0), &TABLE_3)),
        TableId::Four => Some((0.8, 0.5, 0.4, (1e-3, 0.2), &TABLE_4)),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CamouflageRow {
    pub n: usize,
    pub lambda_p: f64,
    pub lambda_q: f64,
    pub eps_abs: f64,
    pub reference: CamouflageReference,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CamouflageTable {
    pub table: u8,
    pub pair: CamouflagePair<f64>,
    pub rows: Vec<CamouflageRow>,
}

impl CamouflageTable {
    /// Ratios of consecutive `ε_abs` entries.
    pub fn eps_ratios(&self) -> Vec<f64> {
        self.rows.windows(2).map(|w| w[0].eps_abs / w[1].eps_abs).collect()
    }
}

pub fn camouflage_table(id: TableId) -> Result<CamouflageTable> {
    let (r1, sigma1, r2, bracket, reference) = camouflage_table_setup(id)
        .ok_or_else(|| Error::InvalidParameter(format!("table {} is not a camouflage table", id.number())))?;
    let sigma2 = find_sigma2(r1, sigma1, r2, bracket)?;
    let pair = CamouflagePair::new(PotentialProfile::new(r1, sigma1)?, PotentialProfile::new(r2, sigma2)?)?;
    let check = verify_pair(&pair, 1.0, &GRID_SIZES)?;
    let mut rows = Vec::with_capacity(GRID_SIZES.len());
    for (&(n, eps), reference) in check.fd_residuals.iter().zip(reference.iter()) {
        rows.push(CamouflageRow {
            n,
            lambda_p: solve_fd(1.0, &pair.p, n)?.neumann,
            lambda_q: solve_fd(1.0, &pair.q, n)?.neumann,
            eps_abs: eps,
            reference: *reference,
        });
    }
    Ok(CamouflageTable { table: id.number(), pair, rows })
}

/// Summary of one noise level over an ensemble of seeds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseRow {
    pub delta: f64,
    pub seeds: usize,
    pub failures: usize,
    pub median_alpha: f64,
    pub median_sigma: f64,
    /// Failed seeds count as infinite error.
    pub median_eps_abs: f64,
    pub eps_bound: f64,
    pub sigma_band: f64,
    pub reference: NoiseReference,
}

impl NoiseRow {
    pub fn within_eps_bound(&self) -> bool {
        self.median_eps_abs < self.eps_bound
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseTable {
    pub table: u8,
    pub r1: f64,
    pub sigma_true: f64,
    pub first_seed: u64,
    pub rows: Vec<NoiseRow>,
}

impl NoiseTable {
    /// Median error does not grow as the noise level decreases.
    pub fn median_eps_non_increasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].median_eps_abs <= w[0].median_eps_abs)
    }
}

/// Median of a sample; NaN for an empty one.
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}

pub fn noise_table(id: TableId, first_seed: u64, seeds: usize, setup: &ReconstructionSetup<f64>) -> Result<NoiseTable> {
    let (r1, sigma_true, reference) = noise_table_profile(id)
        .ok_or_else(|| Error::InvalidParameter(format!("table {} is not a noise table", id.number())))?;
    let profile = PotentialProfile::new(r1, sigma_true)?;
    let seed_list: Vec<u64> = (0..seeds as u64).map(|k| first_seed.wrapping_add(k)).collect();
    let mut rows = Vec::new();
    for (i, &delta) in NOISE_LEVELS.iter().enumerate() {
        let results = reconstruct_ensemble(&profile, 1.0, delta, &seed_list, setup)?;
        rows.push(summarize(delta, &results, MEDIAN_EPS_BOUND[i], SIGMA_BAND[i], reference[i]));
    }
    Ok(NoiseTable {
        table: id.number(),
        r1,
        sigma_true,
        first_seed,
        rows,
    })
}

fn summarize(
    delta: f64,
    results: &[Result<TikhonovResult<f64>>],
    eps_bound: f64,
    sigma_band: f64,
    reference: NoiseReference,
) -> NoiseRow {
    let ok: Vec<&TikhonovResult<f64>> = results.iter().filter_map(|r| r.as_ref().ok()).collect();
    let failures = results.len() - ok.len();
    let mut eps: Vec<f64> = ok.iter().map(|r| r.eps_abs.unwrap_or(f64::INFINITY)).collect();
    eps.extend(std::iter::repeat_n(f64::INFINITY, failures));
    NoiseRow {
        delta,
        seeds: results.len(),
        failures,
        median_alpha: median(&ok.iter().map(|r| r.alpha).collect::<Vec<_>>()),
        median_sigma: median(&ok.iter().map(|r| r.sigma_est).collect::<Vec<_>>()),
        median_eps_abs: median(&eps),
        eps_bound,
        sigma_band,
        reference,
    }
}
