//! Digital claim `K·1{S¹ ≥ S²}`.
//!
//! With `X = A₁W¹ + A₂W²` and `Y = σ₁W¹ − σ₂W²` the success set is
//! `{Y < b} ∪ {Y ≥ b, X + BT ≥ ln cK}`; conditioning on `Y` leaves a single
//! normal tail for `X`.

use crate::error::Result;
use crate::gaussian::{
    conditional_law, integrate_gauss_weighted_on, linear_law, ConditionIndex, ConditionalLaw,
    std_normal_cdf, GaussianVec, Quadrature, QuadratureSpec,
};
use crate::market::MarketModel;

use super::{halfline, meet, normal_mass, upper_tail};

struct Laws {
    y: GaussianVec,
    x_given_y: ConditionalLaw,
}

fn laws(model: &MarketModel) -> Result<Laws> {
    let p = model.params();
    let mc = model.measure_constants();
    let w = GaussianVec::brownian(p.maturity, p.rho);
    let joint = linear_law(
        &[vec![mc.a1_const, mc.a2_const], vec![p.sigma_1, -p.sigma_2]],
        &w,
    )?;
    Ok(Laws {
        y: joint.marginal(1),
        x_given_y: conditional_law(&joint, ConditionIndex::Second)?,
    })
}

/// `P(Y ≥ lo, X ≥ level)` for the joint law above.
fn joint_tail(laws: &Laws, lo: f64, level: f64, spec: &QuadratureSpec) -> Result<Quadrature> {
    let sd_y = laws.y.sd(0);
    if level == f64::NEG_INFINITY {
        return Ok(Quadrature::exact(upper_tail(lo, sd_y)));
    }
    let cond = laws.x_given_y;
    if cond.cond_var == 0.0 {
        // X is an affine function of Y: the inner factor is an indicator
        // and the whole term is a normal interval mass.
        let ys = halfline(cond.cond_mean_slope, level - cond.cond_mean_intercept);
        let set = meet(ys, lo, f64::INFINITY);
        return Ok(Quadrature::exact(set.map_or(0.0, |(a, b)| {
            normal_mass(0.0, sd_y, a, b)
        })));
    }
    let s = cond.sd();
    integrate_gauss_weighted_on(
        |y| std_normal_cdf((cond.mean_at(y) - level) / s),
        &laws.y,
        spec,
        &[(lo, f64::INFINITY)],
        &[],
    )
}

pub(super) fn psi1(model: &MarketModel, strike: f64, ln_c: f64, spec: &QuadratureSpec) -> Result<Quadrature> {
    let l = laws(model)?;
    let th = model.thresholds(strike);
    let bt = model.measure_constants().b_const * model.maturity();
    let zero = std_normal_cdf(th.b / l.y.sd(0));
    let q = joint_tail(&l, th.b, ln_c + strike.ln() - bt, spec)?;
    Ok(Quadrature {
        value: zero + q.value,
        ..q
    })
}

pub(super) fn psi2(model: &MarketModel, strike: f64, ln_c: f64, spec: &QuadratureSpec) -> Result<Quadrature> {
    let l = laws(model)?;
    let th = model.thresholds(strike);
    let t = model.maturity();
    let bt = model.measure_constants().b_const * t;
    // In martingale coordinates A·W = A·W̃ − (A·θ)T.
    let level = ln_c + strike.ln() - bt + model.risk_drift() * t;
    let q = joint_tail(&l, th.b_tilde, level, spec)?;
    Ok(q.scaled(model.discount() * strike))
}
