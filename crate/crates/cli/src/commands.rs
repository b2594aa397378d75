use coreshell::camouflage::{find_sigma2, find_sigma2_roots, verify_pair, CamouflagePair, CamouflageReport};
use coreshell::dnmap::{dn_multiplier, dn_multiplier_and_derivative, shell_coefficients};
use coreshell::fdsolver::{solve_fd_with, FdOptions};
use coreshell::inverse::{reconstruct_ensemble, reconstruct_from_flux, synthetic_flux, ExperimentRecord, ReconstructionSetup};
use coreshell::reproduce::{camouflage_table, median, noise_table, TableId};
use coreshell::specfun::{self, BesselKind};
use coreshell::Profile;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{parse_list, Resolver};
use crate::error::CliError;
use crate::output::{Cell, Report, Table};
use crate::{CamouflageArgs, ForwardArgs, InvertArgs, ProfileArgs, ReproduceArgs, SweepArgs};

type Result<T> = std::result::Result<T, CliError>;

pub const DEFAULT_F: f64 = 1.0;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_FD_INTERVALS: usize = 1000;
pub const DEFAULT_REPRODUCE_SEEDS: usize = 100;
pub const MAX_SWEEP_POINTS: usize = 10_000_000;

fn profile(res: &Resolver, args: &ProfileArgs) -> Result<Profile> {
    let r1 = res.require("r1", args.r1)?;
    let sigma1 = res.require("sigma1", args.sigma1)?;
    Ok(Profile::new(r1, sigma1)?)
}

fn boundary_value(res: &Resolver, f: Option<f64>) -> Result<f64> {
    let f = res.or("f", f, DEFAULT_F)?;
    if !f.is_finite() {
        return Err(CliError::BadInput(format!("f must be finite, got {f}")));
    }
    Ok(f)
}

/// `N` from `--n` or `--dr`; both may be given if they agree.
fn intervals(res: &Resolver, n: Option<usize>, dr: Option<f64>, default: usize) -> Result<usize> {
    let n = res.get("n", n)?;
    let dr = res.get::<f64>("dr", dr)?;
    let from_dr = match dr {
        None => None,
        Some(dr) => {
            if !(dr.is_finite() && dr > 0.0 && dr < 1.0) {
                return Err(CliError::BadInput(format!("dr must lie in (0, 1), got {dr}")));
            }
            let m = (1.0 / dr).round();
            if (m * dr - 1.0).abs() > 1e-9 {
                return Err(CliError::BadInput(format!("1/dr must be an integer, got dr = {dr}")));
            }
            Some(m as usize)
        }
    };
    let n = match (n, from_dr) {
        (Some(a), Some(b)) if a != b => {
            return Err(CliError::BadInput(format!("n = {a} and dr give different grids (1/dr = {b})")));
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => default,
    };
    if n < 2 {
        return Err(CliError::BadInput(format!("n must be at least 2, got {n}")));
    }
    Ok(n)
}

pub fn dn(res: &Resolver, args: &ProfileArgs) -> Result<Report> {
    let p = profile(res, args)?;
    let f = boundary_value(res, args.f)?;
    let (lambda, dlambda) = dn_multiplier_and_derivative(&p)?;
    let c = shell_coefficients(f, &p)?;
    let g = lambda * f;

    let mut t = Table::new(&["quantity", "value"]);
    for (name, value) in [
        ("r1", p.r1()),
        ("sigma1", p.sigma1()),
        ("f", f),
        ("lambda", lambda),
        ("g", g),
        ("dlambda/dsigma1", dlambda),
        ("rho", c.rho),
        ("a0", c.a0),
        ("a1", c.a1),
        ("b1", c.b1),
        ("psi(0)", c.a0),
    ] {
        t.push(vec![name.into(), value.into()]);
    }
    let json = json!({
        "r1": p.r1(),
        "sigma1": p.sigma1(),
        "f": f,
        "lambda": lambda,
        "g": g,
        "dlambda_dsigma1": dlambda,
        "coefficients": c,
        "psi_center": c.a0,
    });
    Ok(Report::new(vec![t], json))
}

pub fn forward_fd(res: &Resolver, args: &ForwardArgs) -> Result<Report> {
    let p = profile(res, &args.profile)?;
    let f = boundary_value(res, args.profile.f)?;
    let n = intervals(res, args.n, args.dr, DEFAULT_FD_INTERVALS)?;
    let pin_center = res.get("pin-center", args.pin_center)?;
    let sol = solve_fd_with(f, &p, n, &FdOptions { pin_center })?;
    let lambda = dn_multiplier(&p)?.lambda;
    let exact = lambda * f;

    let mut t = Table::new(&["quantity", "value"]);
    t.push(vec!["N".into(), n.into()]);
    t.push(vec!["dr".into(), sol.grid.step().into()]);
    t.push(vec!["interface node".into(), sol.grid.interface_index().into()]);
    t.push(vec!["g".into(), sol.neumann.into()]);
    t.push(vec!["psi(0)".into(), sol.center().into()]);
    t.push(vec!["lambda*f".into(), exact.into()]);
    t.push(vec!["|g - lambda*f|".into(), (sol.neumann - exact).abs().into()]);

    let mut nodes = Table::new(&["r", "psi"]);
    for (r, &psi) in sol.grid.nodes().zip(&sol.values) {
        nodes.push(vec![r.into(), psi.into()]);
    }
    let json = json!({
        "r1": p.r1(),
        "sigma1": p.sigma1(),
        "f": f,
        "n": n,
        "dr": sol.grid.step(),
        "interface_index": sol.grid.interface_index(),
        "pin_center": pin_center,
        "g": sol.neumann,
        "psi_center": sol.center(),
        "g_exact": exact,
        "g_error": (sol.neumann - exact).abs(),
    });
    let mut report = Report::new(vec![t], json);
    report.csv = Some(nodes);
    Ok(report)
}

fn setup(res: &Resolver, args: &InvertArgs) -> Result<ReconstructionSetup<f64>> {
    let mut setup = ReconstructionSetup::<f64>::default();
    setup.n_intervals = intervals(res, args.n, args.dr, setup.n_intervals)?;
    setup.fixed_alpha = res.get("alpha", args.alpha)?;
    if let Some(alpha) = setup.fixed_alpha {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(CliError::BadInput(format!("alpha must be positive, got {alpha}")));
        }
    }
    let tau = res.or("tau", args.tau, setup.discrepancy.tau)?;
    if !(tau.is_finite() && tau >= 1.0) {
        return Err(CliError::BadInput(format!("tau must be at least 1, got {tau}")));
    }
    setup.discrepancy.tau = tau;
    let sigma_init = res.or("sigma-init", args.sigma_init, setup.discrepancy.sigma_init)?;
    if !(sigma_init.is_finite() && sigma_init > 0.0) {
        return Err(CliError::BadInput(format!("sigma-init must be positive, got {sigma_init}")));
    }
    setup.discrepancy.sigma_init = sigma_init;
    Ok(setup)
}

pub fn invert(res: &Resolver, args: &InvertArgs) -> Result<Report> {
    let p = profile(res, &args.profile)?;
    let f = boundary_value(res, args.profile.f)?;
    let delta = res.or("delta", args.delta, 0.0)?;
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(CliError::BadInput(format!("delta must be non-negative, got {delta}")));
    }
    let seed = res.or("seed", args.seed, DEFAULT_SEED)?;
    let count = res.or("seeds", args.seeds, 1usize)?;
    if count == 0 {
        return Err(CliError::BadInput("seeds must be at least 1".into()));
    }
    let setup = setup(res, args)?;

    if count == 1 {
        let g = synthetic_flux(&p, f, &setup)?;
        let result = reconstruct_from_flux(g, &p, f, delta, seed, &setup)?;
        let record = ExperimentRecord::new(&p, delta, seed, &result);
        let mut t = Table::new(&["quantity", "value"]);
        t.push(vec!["r1".into(), record.r1.into()]);
        t.push(vec!["sigma_true".into(), record.sigma_true.into()]);
        t.push(vec!["delta".into(), record.delta.into()]);
        t.push(vec!["seed".into(), record.seed.into()]);
        t.push(vec!["alpha".into(), record.alpha.into()]);
        t.push(vec!["sigma_est".into(), record.sigma_est.into()]);
        t.push(vec!["eps_abs".into(), record.eps_abs.into()]);
        t.push(vec!["residual".into(), record.residual.into()]);
        t.push(vec!["iterations".into(), record.iterations.into()]);
        let mut json = serde_json::to_value(&record).expect("record JSON");
        json["gradient"] = json!(result.gradient);
        json["n_intervals"] = json!(setup.n_intervals);
        return Ok(Report::new(vec![t], json));
    }

    let seeds: Vec<u64> = (0..count as u64).map(|k| seed.wrapping_add(k)).collect();
    let results = reconstruct_ensemble(&p, f, delta, &seeds, &setup)?;
    if let Some(Err(first)) = results.iter().find(|r| r.is_err()) {
        if results.iter().all(|r| r.is_err()) {
            return Err(first.clone().into());
        }
    }

    let mut t = Table::new(&["seed", "alpha", "sigma_est", "eps_abs", "residual", "iterations", "status"]);
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (&s, r) in seeds.iter().zip(&results) {
        match r {
            Ok(result) => {
                let rec = ExperimentRecord::new(&p, delta, s, result);
                t.push(vec![
                    s.into(),
                    rec.alpha.into(),
                    rec.sigma_est.into(),
                    rec.eps_abs.into(),
                    rec.residual.into(),
                    rec.iterations.into(),
                    "ok".into(),
                ]);
                records.push(rec);
            }
            Err(e) => {
                let dash = || Cell::from("-");
                t.push(vec![s.into(), dash(), dash(), dash(), dash(), dash(), CliError::from(e.clone()).code().into()]);
                failures.push(json!({ "seed": s, "error": e.to_string() }));
            }
        }
    }
    let med = |key: fn(&ExperimentRecord) -> f64| median(&records.iter().map(key).collect::<Vec<_>>());
    let (m_alpha, m_sigma, m_eps) = (
        med(|r| r.alpha),
        med(|r| r.sigma_est),
        med(|r| r.eps_abs.unwrap_or(f64::INFINITY)),
    );
    let mut summary = Table::new(&["seeds", "failures", "median alpha", "median sigma_est", "median eps_abs"])
        .titled(format!("median over successful seeds, delta = {delta}"));
    summary.push(vec![count.into(), failures.len().into(), m_alpha.into(), m_sigma.into(), m_eps.into()]);

    let json = json!({
        "r1": p.r1(),
        "sigma_true": p.sigma1(),
        "delta": delta,
        "first_seed": seed,
        "seeds": count,
        "n_intervals": setup.n_intervals,
        "records": records,
        "failures": failures,
        "median": { "alpha": m_alpha, "sigma_est": m_sigma, "eps_abs": m_eps },
    });
    let mut report = Report::new(vec![t.clone(), summary], json);
    report.csv = Some(t);
    Ok(report)
}

pub fn camouflage(res: &Resolver, args: &CamouflageArgs) -> Result<Report> {
    let r1 = res.require("r1", args.r1)?;
    let sigma1 = res.require("sigma1", args.sigma1)?;
    let r2 = res.require("r2", args.r2)?;
    let f = boundary_value(res, args.f)?;
    let bracket = match res.get::<String>("bracket", args.bracket.clone())? {
        None => None,
        Some(text) => match parse_list::<f64>(&text, "bracket")?.as_slice() {
            &[lo, hi] if lo > 0.0 && hi > lo && hi.is_finite() => Some((lo, hi)),
            _ => return Err(CliError::BadInput(format!("bracket must be LO,HI with 0 < LO < HI, got '{text}'"))),
        },
    };
    let grid_sizes = match res.get::<String>("fd-check", args.fd_check.clone())? {
        None => Vec::new(),
        Some(text) => parse_list::<usize>(&text, "fd-check")?,
    };

    let p = Profile::new(r1, sigma1)?;
    let roots = match bracket {
        Some(b) => vec![find_sigma2(r1, sigma1, r2, b)?],
        None => find_sigma2_roots(r1, sigma1, r2)?,
    };

    let mut summary = Table::new(&["sigma2", "det residual", "|lambda_p - lambda_q|"]);
    let mut fd = Table::new(&["sigma2", "N", "|g_N(p) - g_N(q)|"]);
    let mut reports = Vec::new();
    for &sigma2 in &roots {
        let pair = CamouflagePair::new(p, Profile::new(r2, sigma2)?)?;
        let check = if grid_sizes.is_empty() {
            None
        } else {
            Some(verify_pair(&pair, f, &grid_sizes)?)
        };
        summary.push(vec![sigma2.into(), pair.det_residual.into(), pair.dn_residual.into()]);
        for &(n, eps) in check.iter().flat_map(|c| &c.fd_residuals) {
            fd.push(vec![sigma2.into(), n.into(), eps.into()]);
        }
        reports.push(CamouflageReport::new(&pair, check.as_ref()));
    }
    let mut tables = vec![summary];
    if !fd.rows.is_empty() {
        tables.push(fd);
    }
    let json = json!({ "pairs": reports });
    Ok(Report::new(tables, json))
}

fn axis(min: f64, max: f64, steps: usize, log: bool, what: &str) -> Result<Vec<f64>> {
    if steps == 0 {
        return Err(CliError::BadInput(format!("{what}-steps must be at least 1")));
    }
    if !(min.is_finite() && max.is_finite() && min <= max) {
        return Err(CliError::BadInput(format!("{what} range must satisfy min <= max, got [{min}, {max}]")));
    }
    if log && min <= 0.0 {
        return Err(CliError::BadInput(format!("log-spaced {what} needs a positive minimum, got {min}")));
    }
    if steps == 1 {
        return Ok(vec![min]);
    }
    let t = |k: usize| k as f64 / (steps - 1) as f64;
    Ok((0..steps)
        .map(|k| {
            if log {
                (min.ln() + t(k) * (max.ln() - min.ln())).exp()
            } else {
                min + t(k) * (max - min)
            }
        })
        .collect())
}

pub fn sweep(res: &Resolver, args: &SweepArgs) -> Result<Report> {
    let r1_steps = res.or("r1-steps", args.r1_steps, 9usize)?;
    let s_steps = res.or("sigma1-steps", args.sigma1_steps, 41usize)?;
    if r1_steps.saturating_mul(s_steps) > MAX_SWEEP_POINTS {
        return Err(CliError::BadInput(format!(
            "sweep grid has {r1_steps} x {s_steps} points, the limit is {MAX_SWEEP_POINTS}"
        )));
    }
    let log = res.flag("log-sigma", args.log_sigma)?;
    let r1s = axis(
        res.or("r1-min", args.r1_min, 0.1)?,
        res.or("r1-max", args.r1_max, 0.9)?,
        r1_steps,
        false,
        "r1",
    )?;
    let sigmas = axis(
        res.or("sigma1-min", args.sigma1_min, 0.1)?,
        res.or("sigma1-max", args.sigma1_max, 10.0)?,
        s_steps,
        log,
        "sigma1",
    )?;
    let points: Vec<(f64, f64)> = r1s.iter().flat_map(|&r| sigmas.iter().map(move |&s| (r, s))).collect();
    let lambdas = points
        .par_iter()
        .map(|&(r1, s)| Ok(dn_multiplier(&Profile::new(r1, s)?)?.lambda))
        .collect::<Result<Vec<f64>>>()?;

    let mut t = Table::new(&["r1", "sigma1", "lambda"]);
    let mut rows = Vec::with_capacity(points.len());
    for (&(r1, s), &l) in points.iter().zip(&lambdas) {
        t.push(vec![r1.into(), s.into(), l.into()]);
        rows.push(json!({ "r1": r1, "sigma1": s, "lambda": l }));
    }
    Ok(Report::new(vec![t], Value::Array(rows)))
}

pub fn reproduce(res: &Resolver, args: &ReproduceArgs) -> Result<Report> {
    let id = TableId::from_number(args.table)?;
    if let Ok(table) = camouflage_table(id) {
        return Ok(camouflage_report(table));
    }
    let seeds = res.or("seeds", args.seeds, DEFAULT_REPRODUCE_SEEDS)?;
    if seeds == 0 {
        return Err(CliError::BadInput("seeds must be at least 1".into()));
    }
    let first_seed = res.or("seed", args.seed, DEFAULT_SEED)?;
    let mut setup = ReconstructionSetup::<f64>::default();
    setup.n_intervals = intervals(res, args.n, None, setup.n_intervals)?;
    let table = noise_table(id, first_seed, seeds, &setup)?;

    let mut t = Table::new(&[
        "delta",
        "alpha ref",
        "median alpha",
        "sigma ref",
        "median sigma",
        "eps ref",
        "median eps",
        "eps bound",
        "failures",
    ])
    .titled(format!(
        "table {}: r1 = {}, sigma1 = {}, {} seeds from {}",
        table.table, table.r1, table.sigma_true, seeds, first_seed
    ));
    for row in &table.rows {
        let (_, alpha_ref, sigma_ref, eps_ref) = row.reference;
        t.push(vec![
            row.delta.into(),
            alpha_ref.into(),
            row.median_alpha.into(),
            sigma_ref.into(),
            row.median_sigma.into(),
            eps_ref.into(),
            row.median_eps_abs.into(),
            row.eps_bound.into(),
            row.failures.into(),
        ]);
    }
    let mut report = Report::new(vec![t], serde_json::to_value(&table).expect("table JSON"));
    report.notes.push("failed seeds count as infinite error in the median eps column".into());
    report
        .notes
        .push(format!("median eps non-increasing in delta: {}", table.median_eps_non_increasing()));
    Ok(report)
}

fn camouflage_report(table: coreshell::reproduce::CamouflageTable) -> Report {
    let mut t = Table::new(&["N", "lambda_p ref", "lambda_p", "lambda_q ref", "lambda_q", "eps ref", "eps"]).titled(format!(
        "table {}: p = ({}, {}), q = ({}, {})",
        table.table,
        table.pair.p.r1(),
        table.pair.p.sigma1(),
        table.pair.q.r1(),
        table.pair.q.sigma1()
    ));
    for row in &table.rows {
        let (_, lp, lq, eps) = row.reference;
        t.push(vec![
            row.n.into(),
            lp.into(),
            row.lambda_p.into(),
            lq.into(),
            row.lambda_q.into(),
            eps.into(),
            row.eps_abs.into(),
        ]);
    }
    let ratios: Vec<String> = table.eps_ratios().iter().map(|r| crate::output::sig6(*r)).collect();
    let mut report = Report::new(vec![t], serde_json::to_value(&table).expect("table JSON"));
    report.notes.push(format!("eps ratios under grid doubling: {}", ratios.join(", ")));
    report
}

pub fn specfun_eval(kind: BesselKind, x: f64) -> Result<Report> {
    let e = specfun::eval(kind, x)?;
    let mut t = Table::new(&["function", "x", "value", "estimated abs error"]);
    t.push(vec![kind.name().into(), x.into(), e.value.into(), e.estimated_abs_error.into()]);
    let json = json!({
        "function": kind.name(),
        "x": x,
        "value": e.value,
        "estimated_abs_error": e.estimated_abs_error,
    });
    Ok(Report::new(vec![t], json))
}
