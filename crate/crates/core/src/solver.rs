//! Inversion of `Ψ₁`, `Ψ₂` and the functions `Φ₁`, `Φ₂`.
//!
//! `Φ₁(x) = Ψ₁(c(x))` with `Ψ₂(c(x)) = x` is the largest success probability
//! reachable with capital `x`; `Φ₂(α) = Ψ₂(c(α))` with `Ψ₁(c(α)) = 1 − α` is
//! the smallest capital that keeps the shortfall probability at `α`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::QuadratureSpec;
use crate::market::MarketModel;
use crate::payoff::{price, prob_zero_payoff_with, Payoff, PayoffKind};
use crate::psi::{psi1, psi2, success_set, SuccessSet};

/// Initial capital `x ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HedgeBudget {
    pub x: f64,
}

impl HedgeBudget {
    pub fn new(x: f64) -> Result<Self> {
        if !(x >= 0.0) || !x.is_finite() {
            return Err(Error::InvalidParameter(format!("budget must be finite and >= 0, got {x}")));
        }
        Ok(Self { x })
    }
}

/// Accepted shortfall probability `α ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskLevel {
    pub alpha: f64,
}

impl RiskLevel {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidParameter(format!("risk level must lie in [0, 1], got {alpha}")));
        }
        Ok(Self { alpha })
    }
}

/// Tolerances of the root solvers and the quadratures they call.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSpec {
    #[serde(skip)]
    pub quadrature: QuadratureSpec,
    /// `|Ψ₂(c) − x| ≤ budget_rel_tol · p(H)`.
    pub budget_rel_tol: f64,
    /// `|Ψ₁(c) − (1 − α)| ≤ risk_abs_tol`.
    pub risk_abs_tol: f64,
    pub max_iterations: usize,
}

impl Default for SolverSpec {
    fn default() -> Self {
        Self {
            quadrature: QuadratureSpec::default(),
            budget_rel_tol: 1e-8,
            risk_abs_tol: 1e-8,
            max_iterations: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Interior,
    FullHedge,
    ZeroBudget,
    ZeroCost,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Interior => "interior",
            Branch::FullHedge => "full-hedge",
            Branch::ZeroBudget => "zero-budget",
            Branch::ZeroCost => "zero-cost",
        }
    }
}

/// Value of `Φ₁` or `Φ₂` together with the level and the modified claim
/// `H·1_{A_c}` whose replication attains it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantileResult {
    pub value: f64,
    pub est_error: f64,
    pub c_star: f64,
    pub branch: Branch,
    pub modified_claim: SuccessSet,
}

/// Refuses inputs whose `Ψ₁` is a step function: a digital claim in a
/// market without risk premium has a weighted payoff that is constant on a
/// half-plane.
fn guard(model: &MarketModel, payoff: &Payoff) -> Result<()> {
    if payoff.kind == PayoffKind::Digital && model.is_risk_neutral() {
        return Err(Error::DegenerateMeasure(
            "digital claim with zero market price of risk: success probability is a step function of c"
                .into(),
        ));
    }
    Ok(())
}

/// Smallest `c` with `below(c)`, for a predicate that is false at `c = 0`
/// and stays true once it holds.
fn smallest_level<F>(scale: f64, max_iterations: usize, mut below: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<bool>,
{
    let mut lo = 0.0;
    let mut hi = 1.0 / scale;
    while !below(hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 / scale {
            return Err(Error::DegenerateMeasure(format!(
                "no crossing found up to c = {hi:e}"
            )));
        }
    }
    for _ in 0..max_iterations {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-14 * hi || mid <= lo || mid >= hi {
            break;
        }
        if below(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Level `c` with `Ψ₂(c) = x` for `0 < x < p(H)`; the smallest such level on
/// flat stretches.
pub fn solve_c_for_budget(
    model: &MarketModel,
    payoff: &Payoff,
    budget: HedgeBudget,
    spec: &SolverSpec,
) -> Result<f64> {
    let q = &spec.quadrature;
    let p = price(model, payoff, q)?.value;
    let x = budget.x;
    if !(x > 0.0 && x < p) {
        return Err(Error::OutOfRange {
            what: "budget",
            value: x,
            range: format!("(0, {p})"),
        });
    }
    guard(model, payoff)?;
    let c = smallest_level(p, spec.max_iterations, |c| Ok(psi2(model, payoff, c, q)?.value <= x))?;
    let got = psi2(model, payoff, c, q)?.value;
    if (got - x).abs() > spec.budget_rel_tol * p {
        return Err(Error::DegenerateMeasure(format!(
            "price of knocked-out claim jumps across the budget at c = {c:e} ({got} vs {x})"
        )));
    }
    Ok(c)
}

/// Level `c` with `Ψ₁(c) = 1 − α` for `0 ≤ α < P(H ≠ 0)`; `α = 0` gives `c = 0`.
pub fn solve_c_for_risk(
    model: &MarketModel,
    payoff: &Payoff,
    risk: RiskLevel,
    spec: &SolverSpec,
) -> Result<f64> {
    let q = &spec.quadrature;
    let nonzero = 1.0 - prob_zero_payoff_with(model, payoff, q)?;
    let alpha = risk.alpha;
    if !(alpha >= 0.0 && alpha < nonzero) {
        return Err(Error::OutOfRange {
            what: "alpha",
            value: alpha,
            range: format!("[0, {nonzero})"),
        });
    }
    if alpha == 0.0 {
        return Ok(0.0);
    }
    guard(model, payoff)?;
    let target = 1.0 - alpha;
    let p = price(model, payoff, q)?.value;
    let c = smallest_level(p, spec.max_iterations, |c| Ok(psi1(model, payoff, c, q)?.value <= target))?;
    let got = psi1(model, payoff, c, q)?.value;
    if (got - target).abs() > spec.risk_abs_tol {
        return Err(Error::DegenerateMeasure(format!(
            "success probability jumps across {target} at c = {c:e} (reaches {got})"
        )));
    }
    Ok(c)
}

/// Maximal success probability `Φ₁(x)`.
pub fn phi1(
    model: &MarketModel,
    payoff: &Payoff,
    budget: HedgeBudget,
    spec: &SolverSpec,
) -> Result<QuantileResult> {
    let q = &spec.quadrature;
    if budget.x == 0.0 {
        return Ok(QuantileResult {
            value: prob_zero_payoff_with(model, payoff, q)?,
            est_error: 0.0,
            c_star: f64::INFINITY,
            branch: Branch::ZeroBudget,
            modified_claim: success_set(model, payoff, f64::INFINITY)?,
        });
    }
    let p = price(model, payoff, q)?;
    if budget.x >= p.value {
        return Ok(QuantileResult {
            value: 1.0,
            est_error: 0.0,
            c_star: 0.0,
            branch: Branch::FullHedge,
            modified_claim: success_set(model, payoff, 0.0)?,
        });
    }
    let c = solve_c_for_budget(model, payoff, budget, spec)?;
    let v = psi1(model, payoff, c, q)?;
    Ok(QuantileResult {
        value: v.value,
        est_error: v.est_error,
        c_star: c,
        branch: Branch::Interior,
        modified_claim: success_set(model, payoff, c)?,
    })
}

/// Minimal cost `Φ₂(α)`.
pub fn phi2(
    model: &MarketModel,
    payoff: &Payoff,
    risk: RiskLevel,
    spec: &SolverSpec,
) -> Result<QuantileResult> {
    let q = &spec.quadrature;
    if risk.alpha == 0.0 {
        let p = price(model, payoff, q)?;
        return Ok(QuantileResult {
            value: p.value,
            est_error: p.est_error,
            c_star: 0.0,
            branch: Branch::FullHedge,
            modified_claim: success_set(model, payoff, 0.0)?,
        });
    }
    let nonzero = 1.0 - prob_zero_payoff_with(model, payoff, q)?;
    if risk.alpha >= nonzero {
        return Ok(QuantileResult {
            value: 0.0,
            est_error: 0.0,
            c_star: f64::INFINITY,
            branch: Branch::ZeroCost,
            modified_claim: success_set(model, payoff, f64::INFINITY)?,
        });
    }
    let c = solve_c_for_risk(model, payoff, risk, spec)?;
    let v = psi2(model, payoff, c, q)?;
    Ok(QuantileResult {
        value: v.value,
        est_error: v.est_error,
        c_star: c,
        branch: Branch::Interior,
        modified_claim: success_set(model, payoff, c)?,
    })
}

/// One grid point of the round trip `Φ₁(Φ₂(α))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualityPoint {
    pub alpha: f64,
    pub cost: f64,
    pub probability: f64,
    /// `|Φ₁(Φ₂(α)) − (1 − α)|`
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualityReport {
    pub points: Vec<DualityPoint>,
    pub max_residual: f64,
    /// Alphas whose residual exceeds the tolerance.
    pub violations: Vec<f64>,
    /// Set when the solvers refuse the inputs.
    pub degenerate: Option<String>,
}

/// Checks `Φ₁(Φ₂(α)) = 1 − α` on a grid of risk levels.
pub fn duality_check(
    model: &MarketModel,
    payoff: &Payoff,
    alpha_grid: &[f64],
    tolerance: f64,
    spec: &SolverSpec,
) -> Result<DualityReport> {
    let mut report = DualityReport {
        points: Vec::with_capacity(alpha_grid.len()),
        max_residual: 0.0,
        violations: vec![],
        degenerate: None,
    };
    if let Err(Error::DegenerateMeasure(msg)) = guard(model, payoff) {
        report.degenerate = Some(msg);
        return Ok(report);
    }
    for &alpha in alpha_grid {
        let round_trip = phi2(model, payoff, RiskLevel::new(alpha)?, spec).and_then(|cost| {
            let prob = phi1(model, payoff, HedgeBudget::new(cost.value)?, spec)?;
            Ok((cost.value, prob.value))
        });
        let (cost, probability) = match round_trip {
            Ok(v) => v,
            Err(Error::DegenerateMeasure(msg)) => {
                report.degenerate = Some(msg);
                break;
            }
            Err(e) => return Err(e),
        };
        let residual = (probability - (1.0 - alpha)).abs();
        report.max_residual = report.max_residual.max(residual);
        if residual > tolerance {
            report.violations.push(alpha);
        }
        report.points.push(DualityPoint {
            alpha,
            cost,
            probability,
            residual,
        });
    }
    Ok(report)
}
