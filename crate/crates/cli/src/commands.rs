//! Tables for `price`, `psi`, `phi1` and `phi2`.

use quantile_hedge::{
    mc_price, mc_psi_grid, phi1, phi2, price, psi_curve, HedgeBudget, McEstimate, Method, QuantileResult,
    RiskLevel,
};

use crate::config::{check_grid, RunConfig};
use crate::error::CliResult;
use crate::output::{Cell, Table};

pub const PRICE_COLUMNS: &[&str] = &[
    "payoff", "strike", "method", "price", "est_error", "mc_price", "mc_std_error", "mc_n", "mc_seed",
];

pub const PSI_COLUMNS: &[&str] = &[
    "c",
    "method",
    "psi1",
    "psi1_error",
    "psi2",
    "psi2_error",
    "mc_psi1",
    "mc_psi1_std_error",
    "mc_psi2",
    "mc_psi2_std_error",
];

pub const PHI1_COLUMNS: &[&str] = &[
    "x",
    "branch",
    "method",
    "c_star",
    "phi1",
    "est_error",
    "mc_phi1",
    "mc_phi1_std_error",
    "mc_cost",
    "mc_cost_std_error",
];

pub const PHI2_COLUMNS: &[&str] = &[
    "alpha",
    "branch",
    "method",
    "c_star",
    "phi2",
    "est_error",
    "mc_success",
    "mc_success_std_error",
    "mc_phi2",
    "mc_phi2_std_error",
];

fn mc_cells(e: &McEstimate) -> [Cell; 2] {
    [e.mean.into(), e.std_error.into()]
}

pub fn price_table(run: &RunConfig) -> CliResult<Table> {
    let p = price(&run.model, &run.payoff, run.quadrature())?;
    let mc = mc_price(&run.model, &run.payoff, run.mc.n, run.mc.seed)?;
    let mut t = Table::new(PRICE_COLUMNS);
    let mut row = vec![
        Cell::from(run.payoff.kind.name()),
        run.payoff.strike.into(),
        p.method.name().into(),
        p.value.into(),
        p.est_error.into(),
    ];
    row.extend(mc_cells(&mc));
    row.extend([mc.n.into(), mc.seed.into()]);
    t.push(row);
    Ok(t)
}

pub fn psi_table(run: &RunConfig, c_grid: &[f64]) -> CliResult<Table> {
    check_grid("c-grid", c_grid)?;
    let curve = psi_curve(&run.model, &run.payoff, c_grid, run.quadrature())?;
    let mc = mc_psi_grid(&run.model, &run.payoff, c_grid, run.mc.n, run.mc.seed)?;
    let mut t = Table::new(PSI_COLUMNS);
    for (pt, (m1, m2)) in curve.points.iter().zip(&mc) {
        let mut row = vec![
            Cell::from(pt.c),
            pt.psi1.method.name().into(),
            pt.psi1.value.into(),
            pt.psi1.est_error.into(),
            pt.psi2.value.into(),
            pt.psi2.est_error.into(),
        ];
        row.extend(mc_cells(m1));
        row.extend(mc_cells(m2));
        t.push(row);
    }
    Ok(t)
}

/// Solver results on a grid with the simulated success frequency and cost
/// of each modified claim, all drawn from one shared sample.
fn quantile_table(
    run: &RunConfig,
    columns: &[&'static str],
    grid: &[f64],
    results: &[QuantileResult],
) -> CliResult<Table> {
    let levels: Vec<f64> = results.iter().map(|r| r.c_star).collect();
    let mc = mc_psi_grid(&run.model, &run.payoff, &levels, run.mc.n, run.mc.seed)?;
    let mut t = Table::new(columns);
    for ((&g, r), (hit, cost)) in grid.iter().zip(results).zip(&mc) {
        let mut row = vec![
            Cell::from(g),
            r.branch.name().into(),
            Method::Quadrature.name().into(),
            r.c_star.into(),
            r.value.into(),
            r.est_error.into(),
        ];
        row.extend(mc_cells(hit));
        row.extend(mc_cells(cost));
        t.push(row);
    }
    Ok(t)
}

pub fn phi1_table(run: &RunConfig, x_grid: &[f64]) -> CliResult<Table> {
    check_grid("x-grid", x_grid)?;
    let results = x_grid
        .iter()
        .map(|&x| Ok(phi1(&run.model, &run.payoff, HedgeBudget::new(x)?, &run.solver)?))
        .collect::<CliResult<Vec<_>>>()?;
    quantile_table(run, PHI1_COLUMNS, x_grid, &results)
}

pub fn phi2_table(run: &RunConfig, alpha_grid: &[f64]) -> CliResult<Table> {
    check_grid("alpha-grid", alpha_grid)?;
    let results = alpha_grid
        .iter()
        .map(|&a| Ok(phi2(&run.model, &run.payoff, RiskLevel::new(a)?, &run.solver)?))
        .collect::<CliResult<Vec<_>>>()?;
    quantile_table(run, PHI2_COLUMNS, alpha_grid, &results)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{FileConfig, Overrides};

    fn run(text: &str) -> RunConfig {
        RunConfig::resolve(FileConfig::parse(text).unwrap(), &Overrides::default()).unwrap()
    }

    #[test]
    fn zero_risk_cost_is_the_price() {
        let r = run("[mc]\nn = 1000\n");
        let p = price_table(&r).unwrap();
        let c = phi2_table(&r, &[0.0]).unwrap();
        assert_eq!(p.rows()[0][3], c.rows()[0][4]);
    }

    #[test]
    fn rows_follow_the_grid() {
        let r = run("[mc]\nn = 1000\n");
        let t = psi_table(&r, &[0.0, 0.01, 0.1]).unwrap();
        assert_eq!(t.rows().len(), 3);
        assert_eq!(t.rows()[1][0], Cell::Num(0.01));
        assert!(psi_table(&r, &[0.1, 0.01]).is_err());
        assert!(phi1_table(&r, &[-1.0]).is_err());
        assert!(phi2_table(&r, &[0.5, 1.5]).is_err());
    }
}
