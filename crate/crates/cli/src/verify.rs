//! Monte Carlo versus quadrature and invariant checks for one configuration.

use quantile_hedge::{
    duality_check, mc_means, mc_price, mc_prob_zero, mc_psi_grid, phi2, price, prob_zero_payoff, psi1, psi2,
    psi_curve, Error, McEstimate, Measure, Method, RiskLevel,
};

use crate::config::{check_grid, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{Cell, Table};

pub const VERIFY_COLUMNS: &[&str] = &[
    "check",
    "level",
    "status",
    "method",
    "value",
    "est_error",
    "reference",
    "reference_error",
    "detail",
];

/// Levels of the default Monte Carlo grid, as multiples of `1/p(H)`.
const DEFAULT_LEVELS: [f64; 4] = [0.1, 0.2, 0.5, 1.0];

/// Shortfall probability of the simulated success check.
const CHECK_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        }
    }
}

struct Row {
    check: &'static str,
    level: Option<f64>,
    status: Status,
    method: &'static str,
    value: f64,
    est_error: f64,
    reference: f64,
    reference_error: f64,
    detail: String,
}

impl Row {
    fn cells(self) -> Vec<Cell> {
        vec![
            self.check.into(),
            self.level.map_or(Cell::text(""), Cell::Num),
            self.status.name().into(),
            self.method.into(),
            self.value.into(),
            self.est_error.into(),
            self.reference.into(),
            self.reference_error.into(),
            Cell::Text(self.detail),
        ]
    }

    /// A row for a check the solvers refuse on this configuration.
    fn skipped(check: &'static str, level: Option<f64>, why: &str) -> Self {
        Row {
            check,
            level,
            status: Status::Skipped,
            method: Method::Quadrature.name(),
            value: f64::NAN,
            est_error: f64::NAN,
            reference: f64::NAN,
            reference_error: f64::NAN,
            detail: format!("DegenerateMeasure: {why}"),
        }
    }
}

/// Compares an exact or quadrature value with a Monte Carlo estimate.
fn against_mc(
    check: &'static str,
    level: Option<f64>,
    method: &'static str,
    (value, est_error): (f64, f64),
    mc: &McEstimate,
    sigmas: f64,
) -> Row {
    let (status, detail) = if mc.agrees(value, sigmas, est_error) {
        (Status::Pass, format!("within {sigmas} SE"))
    } else if mc.std_error == 0.0 {
        (Status::Skipped, "sample shows no variation and cannot resolve the value".into())
    } else {
        let z = (value - mc.mean).abs() / mc.std_error;
        (Status::Fail, format!("off by {z:.2} SE"))
    };
    Row {
        check,
        level,
        status,
        method,
        value,
        est_error,
        reference: mc.mean,
        reference_error: mc.std_error,
        detail,
    }
}

fn pass_if(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

/// Runs every check. The table is returned even when some check fails.
pub fn verify_table(run: &RunConfig, c_grid: Option<&[f64]>, alpha_grid: Option<&[f64]>) -> CliResult<(Table, usize)> {
    let m = &run.model;
    let h = &run.payoff;
    let q = run.quadrature();
    let (n, seed, k) = (run.mc.n, run.mc.seed, run.verify.sigmas);
    let params = *m.params();
    let mut rows = Vec::new();

    let disc = m.discount();
    let ident = mc_means(m, n, seed, 3, |w1, w2, out| {
        let (s1, s2) = m.terminal_assets(w1, w2, Measure::Martingale);
        out[0] = m.density_at(w1, w2);
        out[1] = disc * s1;
        out[2] = disc * s2;
    })?;
    let exact = "exact";
    rows.push(against_mc("density-mean", None, exact, (1.0, 0.0), &ident[0], k));
    rows.push(against_mc("discounted-asset-1", None, exact, (params.s0_1, 0.0), &ident[1], k));
    rows.push(against_mc("discounted-asset-2", None, exact, (params.s0_2, 0.0), &ident[2], k));

    let p = price(m, h, q)?;
    let quad = Method::Quadrature.name();
    rows.push(against_mc("price", None, quad, (p.value, p.est_error), &mc_price(m, h, n, seed)?, k));
    let zero = prob_zero_payoff(m, h)?;
    rows.push(against_mc("prob-zero-payoff", None, quad, (zero, 0.0), &mc_prob_zero(m, h, n, seed)?, k));

    let at_zero = psi1(m, h, 0.0, q)?;
    rows.push(Row {
        check: "psi1-at-zero",
        level: Some(0.0),
        status: pass_if(at_zero.value == 1.0),
        method: quad,
        value: at_zero.value,
        est_error: at_zero.est_error,
        reference: 1.0,
        reference_error: 0.0,
        detail: "must equal 1 exactly".into(),
    });

    let default_grid: Vec<f64> = DEFAULT_LEVELS.iter().map(|l| l / p.value).collect();
    let grid = c_grid.unwrap_or(&default_grid);
    check_grid("c-grid", grid)?;
    let mc = mc_psi_grid(m, h, grid, n, seed)?;
    for (&c, (m1, m2)) in grid.iter().zip(&mc) {
        let v1 = psi1(m, h, c, q)?;
        let v2 = psi2(m, h, c, q)?;
        rows.push(against_mc("psi1", Some(c), quad, (v1.value, v1.est_error), m1, k));
        rows.push(against_mc("psi2", Some(c), quad, (v2.value, v2.est_error), m2, k));
    }

    rows.push(monotone_row(run, p.value)?);
    rows.extend(limit_rows(run, p.value, zero)?);

    let default_alphas: Vec<f64> = (1..=25).map(|i| 0.01 + 0.49 * (i - 1) as f64 / 24.0).collect();
    let alphas: Vec<f64> = match alpha_grid {
        Some(g) => {
            check_grid("alpha-grid", g)?;
            g.to_vec()
        }
        // Only shortfalls below P(H ≠ 0) have an interior solution.
        None => default_alphas.into_iter().filter(|&a| a < 1.0 - zero).collect(),
    };
    if !alphas.is_empty() {
        let report = duality_check(m, h, &alphas, run.verify.duality_tol, &run.solver)?;
        rows.push(match report.degenerate {
            Some(why) => Row::skipped("duality", None, &why),
            None => Row {
                check: "duality",
                level: None,
                status: pass_if(report.violations.is_empty()),
                method: quad,
                value: report.max_residual,
                est_error: 0.0,
                reference: 0.0,
                reference_error: run.verify.duality_tol,
                detail: format!("max over {} risk levels, tolerance {:e}", alphas.len(), run.verify.duality_tol),
            },
        });
    }

    if CHECK_ALPHA < 1.0 - zero {
        match phi2(m, h, RiskLevel::new(CHECK_ALPHA)?, &run.solver) {
            Ok(r) => {
                let [(hit, cost)] = mc_psi_grid(m, h, &[r.c_star], n, seed)?[..] else {
                    unreachable!("one level gives one estimate")
                };
                let v = psi1(m, h, r.c_star, q)?;
                rows.push(against_mc("phi2-success", Some(CHECK_ALPHA), quad, (v.value, v.est_error), &hit, k));
                rows.push(against_mc("phi2-cost", Some(CHECK_ALPHA), quad, (r.value, r.est_error), &cost, k));
            }
            Err(Error::DegenerateMeasure(why)) => rows.push(Row::skipped("phi2-success", Some(CHECK_ALPHA), &why)),
            Err(e) => return Err(e.into()),
        }
    }

    let failed = rows.iter().filter(|r| r.status == Status::Fail).count();
    let mut t = Table::new(VERIFY_COLUMNS);
    for r in rows {
        t.push(r.cells());
    }
    Ok((t, failed))
}

/// Nonincreasing `Ψ₁`, `Ψ₂` on 50 log-spaced levels plus `c = 0`.
fn monotone_row(run: &RunConfig, p: f64) -> CliResult<Row> {
    let grid: Vec<f64> = std::iter::once(0.0)
        .chain((0..50).map(|i| 10f64.powf(-3.0 + 9.0 * i as f64 / 49.0) / p))
        .collect();
    let base = Row {
        check: "monotone",
        level: None,
        status: Status::Pass,
        method: Method::Quadrature.name(),
        value: 0.0,
        est_error: 0.0,
        reference: 0.0,
        reference_error: 0.0,
        detail: format!("{} levels", grid.len()),
    };
    match psi_curve(&run.model, &run.payoff, &grid, run.quadrature()) {
        Ok(curve) => {
            let pts = &curve.points;
            let rise = pts
                .windows(2)
                .map(|w| (w[1].psi1.value - w[0].psi1.value).max((w[1].psi2.value - w[0].psi2.value) / p))
                .fold(f64::NEG_INFINITY, f64::max);
            let err = pts
                .iter()
                .map(|pt| pt.psi1.est_error.max(pt.psi2.est_error / p))
                .fold(0.0, f64::max);
            Ok(Row {
                value: rise,
                est_error: err,
                detail: format!("largest step up over {} levels (Ψ₂ relative to the price)", grid.len()),
                ..base
            })
        }
        Err(e @ Error::MonotonicityViolation { .. }) => Ok(Row {
            status: Status::Fail,
            value: f64::NAN,
            detail: e.to_string(),
            ..base
        }),
        Err(e) => Err(e.into()),
    }
}

/// At a very large level only `{H = 0}` remains in the success set.
fn limit_rows(run: &RunConfig, p: f64, zero: f64) -> CliResult<[Row; 2]> {
    let c = 1e9 / p;
    let v1 = psi1(&run.model, &run.payoff, c, run.quadrature())?;
    let v2 = psi2(&run.model, &run.payoff, c, run.quadrature())?;
    let quad = Method::Quadrature.name();
    Ok([
        Row {
            check: "limit-psi1",
            level: Some(c),
            status: pass_if((v1.value - zero).abs() < 1e-5),
            method: quad,
            value: v1.value,
            est_error: v1.est_error,
            reference: zero,
            reference_error: 0.0,
            detail: "must be within 1e-5 of P(H = 0)".into(),
        },
        Row {
            check: "limit-psi2",
            level: Some(c),
            status: pass_if(v2.value < 1e-6 * p),
            method: quad,
            value: v2.value,
            est_error: v2.est_error,
            reference: 0.0,
            reference_error: 1e-6 * p,
            detail: "must be below 1e-6 times the price".into(),
        },
    ])
}

/// Turns failed checks into an error.
pub fn finish(failed: usize, total: usize) -> CliResult<()> {
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::Verification(format!("{failed} of {total} checks failed")))
    }
}
