//! Two-asset correlated Black–Scholes market.
//!
//! Brownian coordinates `(w1, w2)` are the terminal values of the correlated
//! Wiener process at maturity, distributed `N(0, T·Q)` with
//! `Q = [[1, ρ], [ρ, 1]]`. Under the martingale measure the same law holds for
//! the shifted process `W̃ = W + θT`, `θᵢ = (αᵢ − r)/σᵢ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which probability measure a set of Brownian coordinates refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Measure {
    /// Physical measure `P`, coordinates are `W_T`.
    Physical,
    /// Martingale measure `P̃`, coordinates are `W̃_T`.
    Martingale,
}

/// Raw market parameters. Missing fields deserialise to the baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MarketParams {
    pub s0_1: f64,
    pub s0_2: f64,
    pub alpha_1: f64,
    pub alpha_2: f64,
    pub sigma_1: f64,
    pub sigma_2: f64,
    pub rho: f64,
    pub r: f64,
    /// Maturity `T` in years.
    pub maturity: f64,
}

impl Default for MarketParams {
    fn default() -> Self {
        Self::baseline()
    }
}

impl MarketParams {
    /// The reference market used throughout the tests and the CLI defaults.
    pub fn baseline() -> Self {
        Self {
            s0_1: 100.0,
            s0_2: 100.0,
            alpha_1: 0.10,
            alpha_2: 0.08,
            sigma_1: 0.2,
            sigma_2: 0.3,
            rho: 0.5,
            r: 0.05,
            maturity: 1.0,
        }
    }
}

/// Constants of the martingale density `Z̃_T = exp(−A₁W¹_T − A₂W²_T − BT)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureChange {
    pub a1_const: f64,
    pub a2_const: f64,
    pub b_const: f64,
}

/// Brownian-coordinate thresholds for a strike `K`.
///
/// `{S¹ ≥ K} = {W¹ ≥ a1} = {W̃¹ ≥ a1_tilde}`, likewise for `a2`;
/// `{S¹ ≥ S²} = {σ₁W¹ − σ₂W² ≥ b}`; `{S¹S² ≥ K} = {σ₁W¹ + σ₂W² ≥ d}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdSet {
    pub a1: f64,
    pub a1_tilde: f64,
    pub a2: f64,
    pub a2_tilde: f64,
    pub b: f64,
    pub b_tilde: f64,
    pub d: f64,
    pub d_tilde: f64,
}

/// Validated market with precomputed measure-change constants. Immutable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketModel {
    params: MarketParams,
    theta: [f64; 2],
    change: MeasureChange,
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg.to_string()))
    }
}

/// `½ θᵀ Q⁻¹ θ`, evaluated without the square-root factorisation.
pub(crate) fn half_quadratic_form(theta: [f64; 2], rho: f64) -> f64 {
    let [t1, t2] = theta;
    0.5 * (t1 * t1 - 2.0 * rho * t1 * t2 + t2 * t2) / (1.0 - rho * rho)
}

impl MarketModel {
    pub fn new(params: MarketParams) -> Result<Self> {
        let p = &params;
        let all = [
            p.s0_1, p.s0_2, p.alpha_1, p.alpha_2, p.sigma_1, p.sigma_2, p.rho, p.r, p.maturity,
        ];
        require(all.iter().all(|v| v.is_finite()), "parameters must be finite")?;
        require(p.s0_1 > 0.0 && p.s0_2 > 0.0, "initial prices must be positive")?;
        require(p.sigma_1 > 0.0 && p.sigma_2 > 0.0, "volatilities must be positive")?;
        require(p.maturity > 0.0, "maturity must be positive")?;
        require(p.rho.abs() < 1.0, "correlation must lie in (-1, 1)")?;

        let theta = [(p.alpha_1 - p.r) / p.sigma_1, (p.alpha_2 - p.r) / p.sigma_2];
        let change = measure_change(theta, p.rho);

        // B from the Q^{-1/2} expansion must agree with the direct quadratic form.
        let direct = half_quadratic_form(theta, p.rho);
        let scale = direct.abs().max(f64::MIN_POSITIVE);
        if (change.b_const - direct).abs() > 1e-9 * scale && (change.b_const - direct).abs() > 1e-300
        {
            return Err(Error::InvalidParameter(format!(
                "measure-change constant B inconsistent ({} vs {}); correlation too close to ±1",
                change.b_const, direct
            )));
        }

        Ok(Self {
            params,
            theta,
            change,
        })
    }

    pub fn params(&self) -> &MarketParams {
        &self.params
    }

    /// Market prices of risk `θᵢ = (αᵢ − r)/σᵢ`.
    pub fn theta(&self) -> [f64; 2] {
        self.theta
    }

    pub fn measure_constants(&self) -> MeasureChange {
        self.change
    }

    pub fn maturity(&self) -> f64 {
        self.params.maturity
    }

    pub fn discount(&self) -> f64 {
        (-self.params.r * self.params.maturity).exp()
    }

    /// `A₁θ₁ + A₂θ₂`, the drift picked up by `A·W` when rewritten in `W̃`.
    pub fn risk_drift(&self) -> f64 {
        self.change.a1_const * self.theta[0] + self.change.a2_const * self.theta[1]
    }

    /// True when every drift equals the short rate, i.e. `P̃ = P`.
    pub fn is_risk_neutral(&self) -> bool {
        self.change.a1_const == 0.0 && self.change.a2_const == 0.0
    }

    /// `ln Z̃_T⁻¹ = A₁w₁ + A₂w₂ + BT` at physical coordinates.
    pub fn log_inverse_density(&self, w1: f64, w2: f64) -> f64 {
        let c = &self.change;
        c.a1_const * w1 + c.a2_const * w2 + c.b_const * self.params.maturity
    }

    /// Martingale density `dP̃/dP` at physical coordinates.
    pub fn density_at(&self, w1: f64, w2: f64) -> f64 {
        (-self.log_inverse_density(w1, w2)).exp()
    }

    /// Maps martingale coordinates `W̃` to physical coordinates `W = W̃ − θT`.
    pub fn to_physical(&self, w1_tilde: f64, w2_tilde: f64) -> (f64, f64) {
        let t = self.params.maturity;
        (w1_tilde - self.theta[0] * t, w2_tilde - self.theta[1] * t)
    }

    /// Maps physical coordinates to martingale coordinates `W̃ = W + θT`.
    pub fn to_martingale(&self, w1: f64, w2: f64) -> (f64, f64) {
        let t = self.params.maturity;
        (w1 + self.theta[0] * t, w2 + self.theta[1] * t)
    }

    /// Coordinates expressed as physical ones, whatever measure they refer to.
    pub fn physical_coords(&self, w1: f64, w2: f64, measure: Measure) -> (f64, f64) {
        match measure {
            Measure::Physical => (w1, w2),
            Measure::Martingale => self.to_physical(w1, w2),
        }
    }

    fn drift(&self, asset: usize, measure: Measure) -> f64 {
        match (measure, asset) {
            (Measure::Physical, 0) => self.params.alpha_1,
            (Measure::Physical, _) => self.params.alpha_2,
            (Measure::Martingale, _) => self.params.r,
        }
    }

    /// `ln Sⁱ_T` given the Brownian coordinate of asset `i` (0 or 1) under `measure`.
    pub fn log_asset(&self, asset: usize, w: f64, measure: Measure) -> f64 {
        let p = &self.params;
        let (s0, sigma) = if asset == 0 {
            (p.s0_1, p.sigma_1)
        } else {
            (p.s0_2, p.sigma_2)
        };
        s0.ln() + (self.drift(asset, measure) - 0.5 * sigma * sigma) * p.maturity + sigma * w
    }

    pub fn asset(&self, asset: usize, w: f64, measure: Measure) -> f64 {
        self.log_asset(asset, w, measure).exp()
    }

    /// Terminal prices `(S¹_T, S²_T)` at coordinates interpreted under `measure`.
    pub fn terminal_assets(&self, w1: f64, w2: f64, measure: Measure) -> (f64, f64) {
        (self.asset(0, w1, measure), self.asset(1, w2, measure))
    }

    pub fn thresholds(&self, strike: f64) -> ThresholdSet {
        let p = &self.params;
        let t = p.maturity;
        let (v1, v2) = (p.sigma_1 * p.sigma_1, p.sigma_2 * p.sigma_2);
        let ln_k1 = (strike / p.s0_1).ln();
        let ln_k2 = (strike / p.s0_2).ln();
        let ln_k12 = (strike / (p.s0_1 * p.s0_2)).ln();
        let ln_ratio = (p.s0_2 / p.s0_1).ln();
        ThresholdSet {
            a1: (ln_k1 - (p.alpha_1 - 0.5 * v1) * t) / p.sigma_1,
            a1_tilde: (ln_k1 - (p.r - 0.5 * v1) * t) / p.sigma_1,
            a2: (ln_k2 - (p.alpha_2 - 0.5 * v2) * t) / p.sigma_2,
            a2_tilde: (ln_k2 - (p.r - 0.5 * v2) * t) / p.sigma_2,
            b: ln_ratio + (p.alpha_2 - p.alpha_1 - 0.5 * (v2 - v1)) * t,
            b_tilde: ln_ratio - 0.5 * (v2 - v1) * t,
            d: ln_k12 - (p.alpha_1 + p.alpha_2 - 0.5 * (v1 + v2)) * t,
            d_tilde: ln_k12 - (2.0 * p.r - 0.5 * (v1 + v2)) * t,
        }
    }
}

/// `A = Q⁻¹θ` from the closed 2×2 inverse and `B = ½|Q^{-1/2}θ|²` from the
/// symmetric square root of `Q⁻¹`.
pub(crate) fn measure_change(theta: [f64; 2], rho: f64) -> MeasureChange {
    let [t1, t2] = theta;
    let denom = rho * rho - 1.0;
    let a1 = (-t1 + rho * t2) / denom;
    let a2 = (rho * t1 - t2) / denom;

    let p = 1.0 / (1.0 + rho).sqrt();
    let q = 1.0 / (1.0 - rho).sqrt();
    let u = (p + q) * t1 + (p - q) * t2;
    let v = (p - q) * t1 + (p + q) * t2;
    let b = (u * u + v * v) / 8.0;

    MeasureChange {
        a1_const: a1,
        a2_const: a2,
        b_const: b,
    }
}
