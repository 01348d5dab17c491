//! Quantile hedging of two-asset claims in a correlated Black–Scholes market.
//!
//! For a claim `H` the success sets `A_c = {Z̃_T⁻¹ ≥ cH}` are parametrised by
//! a level `c ≥ 0`. The library evaluates
//!
//! * `Ψ₁(c) = P(A_c)`, the physical probability of the success set, and
//! * `Ψ₂(c) = Ẽ[e^{−rT} H 1_{A_c}]`, the price of the knocked-out claim,
//!
//! by one-dimensional conditional-Gaussian quadrature, inverts them by
//! monotone bisection to obtain the maximal success probability `Φ₁(x)` for a
//! budget `x` and the minimal cost `Φ₂(α)` for a shortfall probability `α`,
//! and cross-checks everything with an independent Monte Carlo estimator.
//!
//! ```
//! use quantile_hedge::{MarketModel, MarketParams, Payoff, PayoffKind, QuadratureSpec};
//!
//! let model = MarketModel::new(MarketParams::baseline()).unwrap();
//! let digital = Payoff::new(PayoffKind::Digital, 100.0).unwrap();
//! let spec = QuadratureSpec::default();
//! let p = quantile_hedge::price(&model, &digital, &spec).unwrap();
//! let half = quantile_hedge::psi2(&model, &digital, 1.0 / p.value, &spec).unwrap();
//! assert!(half.value < p.value);
//! ```

// Negated comparisons reject NaN together with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod gaussian;
pub mod market;
pub mod mc;
pub mod payoff;
pub mod psi;
pub mod solver;

pub use error::{Error, Result};
pub use gaussian::{Quadrature, QuadratureSpec};
pub use market::{MarketModel, MarketParams, Measure, MeasureChange, ThresholdSet};
pub use mc::{
    mc_mean, mc_means, mc_price, mc_prob_zero, mc_psi, mc_psi_grid, np_bruteforce, np_bruteforce_min, sample_terminal,
    DiscreteMarket, McEstimate, NpOutcome,
};
pub use payoff::{payoff_value, price, prob_zero_payoff, weighted_payoff, Payoff, PayoffKind};
pub use psi::{
    psi1, psi2, psi_curve, spread_section_contains, spread_upper_set, success_set, IntervalUnion, Method, PsiCurve,
    PsiPoint, PsiValue, SuccessSet,
};
pub use solver::{
    duality_check, phi1, phi2, solve_c_for_budget, solve_c_for_risk, Branch, DualityReport,
    HedgeBudget, QuantileResult, RiskLevel, SolverSpec,
};
