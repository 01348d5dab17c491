//! The five two-asset claims, their weighted payoffs and the zero-payoff
//! probabilities.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{bivariate_normal_cdf, std_normal_cdf, QuadratureSpec};
use crate::market::{MarketModel, Measure};
use crate::psi::{self, PsiValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PayoffKind {
    /// `K·1{S¹ ≥ S²}`
    #[serde(rename = "digital")]
    Digital,
    /// `S²(S¹ − K)⁺`
    #[serde(rename = "quanto-dom")]
    QuantoDomestic,
    /// `(S¹ − K/S²)⁺`
    #[serde(rename = "quanto-for")]
    QuantoForeign,
    /// `(max(S¹, S²) − K)⁺`
    #[serde(rename = "outperf")]
    Outperformance,
    /// `(S¹ − S² − K)⁺`
    #[serde(rename = "spread")]
    Spread,
}

impl PayoffKind {
    pub const ALL: [PayoffKind; 5] = [
        PayoffKind::Digital,
        PayoffKind::QuantoDomestic,
        PayoffKind::QuantoForeign,
        PayoffKind::Outperformance,
        PayoffKind::Spread,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PayoffKind::Digital => "digital",
            PayoffKind::QuantoDomestic => "quanto-dom",
            PayoffKind::QuantoForeign => "quanto-for",
            PayoffKind::Outperformance => "outperf",
            PayoffKind::Spread => "spread",
        }
    }
}

impl fmt::Display for PayoffKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PayoffKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PayoffKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown payoff '{s}'")))
    }
}

/// A claim of a given kind with strike `K > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Payoff {
    pub kind: PayoffKind,
    pub strike: f64,
}

impl Payoff {
    pub fn new(kind: PayoffKind, strike: f64) -> Result<Self> {
        if !(strike > 0.0) || !strike.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "strike must be positive and finite, got {strike}"
            )));
        }
        Ok(Self { kind, strike })
    }

    /// Payoff at terminal prices `(s1, s2)`.
    pub fn value(&self, s1: f64, s2: f64) -> f64 {
        let k = self.strike;
        match self.kind {
            PayoffKind::Digital => {
                if s1 >= s2 {
                    k
                } else {
                    0.0
                }
            }
            PayoffKind::QuantoDomestic => s2 * (s1 - k).max(0.0),
            PayoffKind::QuantoForeign => (s1 - k / s2).max(0.0),
            PayoffKind::Outperformance => (s1.max(s2) - k).max(0.0),
            PayoffKind::Spread => (s1 - s2 - k).max(0.0),
        }
    }
}

pub fn payoff_value(payoff: &Payoff, s1: f64, s2: f64) -> f64 {
    payoff.value(s1, s2)
}

/// `Z̃_T · H` at physical Brownian coordinates.
pub fn weighted_payoff(model: &MarketModel, payoff: &Payoff, w1: f64, w2: f64) -> f64 {
    let (s1, s2) = model.terminal_assets(w1, w2, Measure::Physical);
    let h = payoff.value(s1, s2);
    if h == 0.0 {
        0.0
    } else {
        model.density_at(w1, w2) * h
    }
}

/// `P(H = 0)` under the physical measure.
pub fn prob_zero_payoff(model: &MarketModel, payoff: &Payoff) -> Result<f64> {
    prob_zero_payoff_with(model, payoff, &QuadratureSpec::default())
}

/// As [`prob_zero_payoff`], with explicit tolerances for the spread quadrature.
pub fn prob_zero_payoff_with(
    model: &MarketModel,
    payoff: &Payoff,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let p = model.params();
    let t = p.maturity;
    let th = model.thresholds(payoff.strike);
    let (s1, s2, rho) = (p.sigma_1, p.sigma_2, p.rho);
    let value = match payoff.kind {
        PayoffKind::Digital => {
            let sd = (t * (s1 * s1 - 2.0 * rho * s1 * s2 + s2 * s2)).sqrt();
            std_normal_cdf(th.b / sd)
        }
        PayoffKind::QuantoDomestic => std_normal_cdf(th.a1 / t.sqrt()),
        PayoffKind::QuantoForeign => {
            let sd = (t * (s1 * s1 + 2.0 * rho * s1 * s2 + s2 * s2)).sqrt();
            std_normal_cdf(th.d / sd)
        }
        PayoffKind::Outperformance => {
            bivariate_normal_cdf(th.a1 / t.sqrt(), th.a2 / t.sqrt(), rho)?
        }
        PayoffKind::Spread => psi::spread::prob_zero(model, payoff.strike, spec)?.value,
    };
    Ok(value.clamp(0.0, 1.0))
}

/// Arbitrage-free price `Ẽ[e^{−rT}H]`, which is `Ψ₂(0)`.
pub fn price(model: &MarketModel, payoff: &Payoff, spec: &QuadratureSpec) -> Result<PsiValue> {
    psi::psi2(model, payoff, 0.0, spec)
}
