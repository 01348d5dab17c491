//! Quanto claims: domestic `S²(S¹ − K)⁺` and foreign `(S¹ − K/S²)⁺`.

use crate::error::Result;
use crate::gaussian::{
    conditional_law, integrate_gauss_weighted_on, linear_law, std_normal_cdf, ConditionIndex,
    GaussianVec, Quadrature, QuadratureSpec,
};
use crate::market::MarketModel;

use super::{exp_mass_of, graded_from, halfline, ln_pos, mass_of, DEGENERATE_SLOPE};

fn snap(k: f64) -> f64 {
    if k.abs() < DEGENERATE_SLOPE {
        0.0
    } else {
        k
    }
}

/// `P(A_c)` for the domestic quanto.
///
/// On `{W¹ = x ≥ a₁}` membership reads `(A₂ − σ₂)W² ≥ v(c, x)` with
/// `W² | W¹ = x ~ N(ρx, T(1 − ρ²))`.
pub(super) fn domestic_psi1(
    model: &MarketModel,
    strike: f64,
    ln_c: f64,
    spec: &QuadratureSpec,
) -> Result<Quadrature> {
    let p = *model.params();
    let mc = model.measure_constants();
    let t = p.maturity;
    let th = model.thresholds(strike);
    let k = snap(mc.a2_const - p.sigma_2);
    let cond_sd = (t * (1.0 - p.rho * p.rho)).sqrt();
    let offset = ln_c + p.s0_2.ln() + (p.alpha_2 - 0.5 * p.sigma_2 * p.sigma_2 - mc.b_const) * t;
    let outer = GaussianVec::univariate(0.0, t)?;
    let q = integrate_gauss_weighted_on(
        |x| {
            let excess = strike * (p.sigma_1 * (x - th.a1)).exp_m1();
            let v = offset - mc.a1_const * x + ln_pos(excess);
            mass_of(p.rho * x, cond_sd, halfline(k, v))
        },
        &outer,
        spec,
        &[(th.a1, f64::INFINITY)],
        &graded_from(th.a1, t.sqrt()),
    )?;
    Ok(Quadrature {
        value: std_normal_cdf(th.a1 / t.sqrt()) + q.value,
        ..q
    })
}

/// `Ẽ[e^{−rT} S²(S¹ − K)⁺ 1_{A_c}]` for the domestic quanto.
///
/// The inner expectation over `W̃² | W̃¹ = x` of `S̃² 1{(A₂ − σ₂)W̃² ≥ w(c, x)}`
/// is a lognormal partial moment.
pub(super) fn domestic_psi2(
    model: &MarketModel,
    strike: f64,
    ln_c: f64,
    scale: f64,
    spec: &QuadratureSpec,
) -> Result<Quadrature> {
    let p = *model.params();
    let mc = model.measure_constants();
    let t = p.maturity;
    let th = model.thresholds(strike);
    let k = snap(mc.a2_const - p.sigma_2);
    let cond_sd = (t * (1.0 - p.rho * p.rho)).sqrt();
    let drift2 = (p.r - 0.5 * p.sigma_2 * p.sigma_2) * t;
    let offset = ln_c + p.s0_2.ln() + drift2 + (model.risk_drift() - mc.b_const) * t;
    let s2_factor = p.s0_2 * drift2.exp() / scale;
    let outer = GaussianVec::univariate(0.0, t)?;
    let q = integrate_gauss_weighted_on(
        |x| {
            let excess = strike * (p.sigma_1 * (x - th.a1_tilde)).exp_m1();
            if excess <= 0.0 {
                return 0.0;
            }
            let w = offset - mc.a1_const * x + excess.ln();
            excess * s2_factor * exp_mass_of(p.rho * x, cond_sd, p.sigma_2, halfline(k, w))
        },
        &outer,
        spec,
        &[(th.a1_tilde, f64::INFINITY)],
        &graded_from(th.a1_tilde, t.sqrt()),
    )?;
    Ok(q.scaled(model.discount() * scale))
}

/// `P(A_c)` for the foreign quanto.
///
/// With `Z = σ₁W¹ + σ₂W²` and `U = A₁W¹ + (A₂ + σ₂)W²`, membership on
/// `{Z = z ≥ d}` reads `U ≥ v(c, z)`.
pub(super) fn foreign_psi1(
    model: &MarketModel,
    strike: f64,
    ln_c: f64,
    spec: &QuadratureSpec,
) -> Result<Quadrature> {
    let p = *model.params();
    let mc = model.measure_constants();
    let t = p.maturity;
    let th = model.thresholds(strike);
    let w = GaussianVec::brownian(t, p.rho);
    let joint = linear_law(
        &[
            vec![mc.a1_const, mc.a2_const + p.sigma_2],
            vec![p.sigma_1, p.sigma_2],
        ],
        &w,
    )?;
    let z_law = joint.marginal(1);
    let u_given_z = conditional_law(&joint, ConditionIndex::Second)?;
    let s = u_given_z.sd();
    let offset = ln_c - p.s0_2.ln() + (0.5 * p.sigma_2 * p.sigma_2 - p.alpha_2 - mc.b_const) * t;
    let q = integrate_gauss_weighted_on(
        |z| {
            let v = offset + ln_pos(strike * (z - th.d).exp_m1());
            let m = u_given_z.mean_at(z);
            if s == 0.0 {
                if m >= v {
                    1.0
                } else {
                    0.0
                }
            } else {
                std_normal_cdf((m - v) / s)
            }
        },
        &z_law,
        spec,
        &[(th.d, f64::INFINITY)],
        &graded_from(th.d, z_law.sd(0)),
    )?;
    Ok(Quadrature {
        value: std_normal_cdf(th.d / z_law.sd(0)) + q.value,
        ..q
    })
}

/// `Ẽ[e^{−rT}(S¹ − K/S²)⁺ 1_{A_c}]` for the foreign quanto.
///
/// Conditioning on `Z̃ = z` fixes `W̃² = (z − σ₁W̃¹)/σ₂`, so the claim and the
/// membership test are functions of `W̃¹` alone and the inner expectation is
/// a lognormal partial moment in `W̃¹ | Z̃ = z`.
pub(super) fn foreign_psi2(
    model: &MarketModel,
    strike: f64,
    ln_c: f64,
    scale: f64,
    spec: &QuadratureSpec,
) -> Result<Quadrature> {
    let p = *model.params();
    let mc = model.measure_constants();
    let t = p.maturity;
    let th = model.thresholds(strike);
    let (s1, s2) = (p.sigma_1, p.sigma_2);
    let w = GaussianVec::brownian(t, p.rho);
    let joint = linear_law(&[vec![1.0, 0.0], vec![s1, s2]], &w)?;
    let z_law = joint.marginal(1);
    let x_given_z = conditional_law(&joint, ConditionIndex::Second)?;
    let x_sd = x_given_z.sd();

    let u2 = mc.a2_const + s2;
    let kappa = snap(mc.a1_const - u2 * s1 / s2);
    let drift_all = (2.0 * p.r - 0.5 * (s1 * s1 + s2 * s2)) * t;
    let g = p.s0_1 * p.s0_2 * drift_all.exp();
    let s2_drift = p.s0_2 * ((p.r - 0.5 * s2 * s2) * t).exp();
    let offset = ln_c - p.s0_2.ln() + (0.5 * s2 * s2 - p.r - mc.b_const + model.risk_drift()) * t;
    let q = integrate_gauss_weighted_on(
        |z| {
            // (S̃¹S̃² − K) / S̃² = (G − K e^{−z}) e^{σ₁x} / (S⁰₂ e^{(r − σ₂²/2)T})
            let net = -g * (th.d_tilde - z).exp_m1();
            if net <= 0.0 {
                return 0.0;
            }
            let wz = offset + ln_pos(strike * (z - th.d_tilde).exp_m1());
            let set = halfline(kappa, wz - u2 * z / s2);
            let moment = exp_mass_of(x_given_z.mean_at(z), x_sd, s1, set);
            net * moment / (s2_drift * scale)
        },
        &z_law,
        spec,
        &[(th.d_tilde, f64::INFINITY)],
        &graded_from(th.d_tilde, z_law.sd(0)),
    )?;
    Ok(q.scaled(model.discount() * scale))
}
