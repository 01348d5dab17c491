//! Outperformance claim `(max(S¹, S²) − K)⁺`.
//!
//! The payoff is `S¹ − K` on `{S¹ ≥ S², S¹ ≥ K}` and `S² − K` on
//! `{S² > S¹, S² ≥ K}`. On the first region membership depends on `W²` only
//! through `A₂W² ≥ v₁(c, W¹)`, on the second through `A₁W¹ ≥ v₂(c, W²)`.
//! Conditioning on the asset that sets the payoff therefore turns both the
//! region and the membership test into half-lines of the other coordinate.

use crate::error::Result;
use crate::gaussian::{
    bivariate_normal_cdf, integrate_gauss_weighted_on, GaussianVec, Quadrature, QuadratureSpec,
};
use crate::market::MarketModel;

use super::{graded_from, halfline, ln_pos, mass_of, meet};

/// Parameters of one region, written for the conditioning coordinate `x`
/// (Brownian driver of the leading asset) and the other coordinate `u`.
struct Region {
    sigma_lead: f64,
    sigma_other: f64,
    /// Strike threshold of the leading asset.
    strike_at: f64,
    /// Ordering threshold: the region is `σ_lead x − σ_other u ≥ order_at`.
    order_at: f64,
    a_lead: f64,
    a_other: f64,
}

impl Region {
    /// Conditional mass of the admissible `u` given `x`.
    fn inner(&self, x: f64, rho: f64, cond_sd: f64, strike: f64, shift: f64) -> (f64, f64) {
        let excess = strike * (self.sigma_lead * (x - self.strike_at)).exp_m1();
        let v = shift + ln_pos(excess) - self.a_lead * x;
        let ordered = (self.sigma_lead * x - self.order_at) / self.sigma_other;
        let set = meet(halfline(self.a_other, v), f64::NEG_INFINITY, ordered);
        (excess.max(0.0), mass_of(rho * x, cond_sd, set))
    }
}

fn regions(model: &MarketModel, strike: f64, martingale: bool) -> [Region; 2] {
    let p = model.params();
    let mc = model.measure_constants();
    let th = model.thresholds(strike);
    let (a1, a2, b) = if martingale {
        (th.a1_tilde, th.a2_tilde, th.b_tilde)
    } else {
        (th.a1, th.a2, th.b)
    };
    [
        Region {
            sigma_lead: p.sigma_1,
            sigma_other: p.sigma_2,
            strike_at: a1,
            order_at: b,
            a_lead: mc.a1_const,
            a_other: mc.a2_const,
        },
        // S² > S¹ reads σ₂W² − σ₁W¹ > −b.
        Region {
            sigma_lead: p.sigma_2,
            sigma_other: p.sigma_1,
            strike_at: a2,
            order_at: -b,
            a_lead: mc.a2_const,
            a_other: mc.a1_const,
        },
    ]
}

fn integrate_regions<F>(
    model: &MarketModel,
    strike: f64,
    martingale: bool,
    shift: f64,
    spec: &QuadratureSpec,
    weight: F,
) -> Result<Quadrature>
where
    F: Fn(f64, f64) -> f64,
{
    let p = *model.params();
    let t = p.maturity;
    let cond_sd = (t * (1.0 - p.rho * p.rho)).sqrt();
    let outer = GaussianVec::univariate(0.0, t)?;
    let mut total = Quadrature::zero();
    for region in regions(model, strike, martingale) {
        let q = integrate_gauss_weighted_on(
            |x| {
                let (excess, mass) = region.inner(x, p.rho, cond_sd, strike, shift);
                weight(excess, mass)
            },
            &outer,
            spec,
            &[(region.strike_at, f64::INFINITY)],
            &graded_from(region.strike_at, t.sqrt()),
        )?;
        total.value += q.value;
        total.error += q.error;
        total.evaluations += q.evaluations;
    }
    Ok(total)
}

pub(super) fn psi1(model: &MarketModel, strike: f64, ln_c: f64, spec: &QuadratureSpec) -> Result<Quadrature> {
    let t = model.maturity();
    let th = model.thresholds(strike);
    let shift = ln_c - model.measure_constants().b_const * t;
    let zero = bivariate_normal_cdf(th.a1 / t.sqrt(), th.a2 / t.sqrt(), model.params().rho)?;
    let q = integrate_regions(model, strike, false, shift, spec, |_, mass| mass)?;
    Ok(Quadrature {
        value: zero + q.value,
        ..q
    })
}

pub(super) fn psi2(
    model: &MarketModel,
    strike: f64,
    ln_c: f64,
    scale: f64,
    spec: &QuadratureSpec,
) -> Result<Quadrature> {
    let t = model.maturity();
    let shift = ln_c + (model.risk_drift() - model.measure_constants().b_const) * t;
    let q = integrate_regions(model, strike, true, shift, spec, |excess, mass| {
        excess * mass / scale
    })?;
    Ok(q.scaled(model.discount() * scale))
}
