//! Engine values of `Ψ₁`, `Ψ₂` against direct plane integration.

mod common;

use common::{brute_psi1, brute_psi2, natural_payoff, random_params, rng};
use quantile_hedge::{price, psi1, psi2, MarketModel, MarketParams, PayoffKind, QuadratureSpec};

fn compare(params: MarketParams, kind: PayoffKind, levels: &[f64]) {
    let model = MarketModel::new(params).unwrap();
    let payoff = natural_payoff(&params, kind);
    let spec = QuadratureSpec::default();
    let p = price(&model, &payoff, &spec).unwrap().value;
    for &rel in levels {
        let c = rel / p;
        let e1 = psi1(&model, &payoff, c, &spec).unwrap().value;
        let e2 = psi2(&model, &payoff, c, &spec).unwrap().value;
        let b1 = brute_psi1(&params, &payoff, c);
        let b2 = brute_psi2(&params, &payoff, c, p);
        assert!((e1 - b1).abs() < 1e-8, "{kind} psi1 at c={c}: {e1} vs {b1}");
        assert!((e2 - b2).abs() < 1e-8 * p, "{kind} psi2 at c={c}: {e2} vs {b2}");
    }
}

const LEVELS: [f64; 6] = [0.0, 0.1, 1.0, 10.0, 100.0, 1e4];

#[test]
fn digital_matches_oracle() {
    compare(MarketParams::baseline(), PayoffKind::Digital, &LEVELS);
}

#[test]
fn quanto_domestic_matches_oracle() {
    compare(MarketParams::baseline(), PayoffKind::QuantoDomestic, &LEVELS);
}

#[test]
fn quanto_foreign_matches_oracle() {
    compare(MarketParams::baseline(), PayoffKind::QuantoForeign, &LEVELS);
}

#[test]
fn outperformance_matches_oracle() {
    compare(MarketParams::baseline(), PayoffKind::Outperformance, &LEVELS);
}

#[test]
fn spread_matches_oracle() {
    compare(MarketParams::baseline(), PayoffKind::Spread, &LEVELS);
}

#[test]
fn random_markets_match_oracle() {
    let mut g = rng(77);
    for _ in 0..3 {
        let params = random_params(&mut g);
        for kind in PayoffKind::ALL {
            compare(params, kind, &[0.3, 3.0, 30.0]);
        }
    }
}

#[test]
fn quanto_domestic_with_positive_membership_slope() {
    // A₂ > σ₂ reverses the half-line of the inner coordinate.
    let mut p = MarketParams::baseline();
    p.alpha_2 = 0.2;
    p.sigma_2 = 0.15;
    p.rho = -0.3;
    let m = MarketModel::new(p).unwrap();
    assert!(m.measure_constants().a2_const > p.sigma_2);
    compare(p, PayoffKind::QuantoDomestic, &[0.3, 3.0, 30.0]);
}

#[test]
fn spread_regimes_match_oracle() {
    let mut below = MarketParams::baseline();
    below.alpha_1 = 0.08;
    below.alpha_2 = 0.08;
    let mut equal = MarketParams::baseline();
    equal.rho = 0.0;
    equal.alpha_1 = equal.r + equal.sigma_1 * equal.sigma_1;
    for p in [below, equal] {
        compare(p, PayoffKind::Spread, &[0.3, 3.0, 30.0]);
    }
}
