//! Independent oracles shared by the integration tests.
//!
//! Nothing here calls the quadrature engine of the library: the brute-force
//! oracle integrates the defining inequality of the success set over the
//! plane with its own composite Gauss–Legendre rule, and the closed forms are
//! derived by exponential tilting.
#![allow(dead_code)]

use std::f64::consts::PI;

use quantile_hedge::gaussian::{bivariate_normal_cdf, std_normal_cdf};
use quantile_hedge::{MarketModel, MarketParams, Payoff, PayoffKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn baseline() -> MarketModel {
    MarketModel::new(MarketParams::baseline()).unwrap()
}

/// Strike giving an at-the-money claim of each kind.
pub fn natural_strike(p: &MarketParams, kind: PayoffKind) -> f64 {
    match kind {
        PayoffKind::Digital => 100.0,
        PayoffKind::QuantoDomestic | PayoffKind::Outperformance => p.s0_1,
        PayoffKind::QuantoForeign => p.s0_1 * p.s0_2,
        PayoffKind::Spread => 2.0,
    }
}

pub fn natural_payoff(p: &MarketParams, kind: PayoffKind) -> Payoff {
    Payoff::new(kind, natural_strike(p, kind)).unwrap()
}

/// Random market parameters in a moderate range.
pub fn random_params(rng: &mut ChaCha8Rng) -> MarketParams {
    MarketParams {
        s0_1: rng.random_range(80.0..120.0),
        s0_2: rng.random_range(80.0..120.0),
        alpha_1: rng.random_range(0.0..0.15),
        alpha_2: rng.random_range(0.0..0.15),
        sigma_1: rng.random_range(0.15..0.4),
        sigma_2: rng.random_range(0.15..0.4),
        rho: rng.random_range(-0.7..0.7),
        r: rng.random_range(0.01..0.06),
        maturity: rng.random_range(0.5..2.0),
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Measure-change constants from `A = Q⁻¹θ`, `B = ½θᵀQ⁻¹θ`, written out directly.
pub fn constants(p: &MarketParams) -> (f64, f64, f64) {
    let t1 = (p.alpha_1 - p.r) / p.sigma_1;
    let t2 = (p.alpha_2 - p.r) / p.sigma_2;
    let det = 1.0 - p.rho * p.rho;
    let a1 = (t1 - p.rho * t2) / det;
    let a2 = (t2 - p.rho * t1) / det;
    (a1, a2, 0.5 * (a1 * t1 + a2 * t2))
}

fn claim(kind: PayoffKind, k: f64, s1: f64, s2: f64) -> f64 {
    match kind {
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

/// Point of the plane in the coordinates of one measure.
pub struct Plane {
    p: MarketParams,
    a1: f64,
    a2: f64,
    b: f64,
    theta: (f64, f64),
    kind: PayoffKind,
    strike: f64,
    ln_c: f64,
    martingale: bool,
}

impl Plane {
    pub fn new(p: &MarketParams, payoff: &Payoff, c: f64, martingale: bool) -> Self {
        let (a1, a2, b) = constants(p);
        Self {
            p: *p,
            a1,
            a2,
            b,
            theta: ((p.alpha_1 - p.r) / p.sigma_1, (p.alpha_2 - p.r) / p.sigma_2),
            kind: payoff.kind,
            strike: payoff.strike,
            ln_c: if c > 0.0 { c.ln() } else { f64::NEG_INFINITY },
            martingale,
        }
    }

    fn prices(&self, x: f64, u: f64) -> (f64, f64) {
        let p = &self.p;
        let (m1, m2) = if self.martingale { (p.r, p.r) } else { (p.alpha_1, p.alpha_2) };
        let t = p.maturity;
        (
            p.s0_1 * ((m1 - 0.5 * p.sigma_1 * p.sigma_1) * t + p.sigma_1 * x).exp(),
            p.s0_2 * ((m2 - 0.5 * p.sigma_2 * p.sigma_2) * t + p.sigma_2 * u).exp(),
        )
    }

    pub fn payoff(&self, x: f64, u: f64) -> f64 {
        let (s1, s2) = self.prices(x, u);
        claim(self.kind, self.strike, s1, s2)
    }

    fn key(&self, x: f64, u: f64) -> Key {
        let (s1, s2) = self.prices(x, u);
        (self.member(x, u), self.payoff(x, u) > 0.0, s1 >= s2)
    }

    pub fn member(&self, x: f64, u: f64) -> bool {
        let h = self.payoff(x, u);
        if h == 0.0 || self.ln_c == f64::NEG_INFINITY {
            return true;
        }
        let t = self.p.maturity;
        let (w1, w2) = if self.martingale {
            (x - self.theta.0 * t, u - self.theta.1 * t)
        } else {
            (x, u)
        };
        self.a1 * w1 + self.a2 * w2 + self.b * t >= self.ln_c + h.ln()
    }
}

/// Gauss–Legendre nodes and weights on [−1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

fn pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// Regime of a point: membership, whether the claim pays, which asset leads.
type Key = (bool, bool, bool);

/// Refines a change of `key` between `a` and `b` into every breakpoint it hides.
fn split<K: Fn(f64) -> Key>(key: &K, a: f64, ka: Key, b: f64, kb: Key, out: &mut Vec<f64>) {
    if b - a <= 1e-13 * (1.0 + a.abs()) {
        out.push(0.5 * (a + b));
        return;
    }
    let m = 0.5 * (a + b);
    let km = key(m);
    if km != ka {
        split(key, a, ka, m, km, out);
    }
    if km != kb {
        split(key, m, km, b, kb, out);
    }
}

/// Breakpoints of a piecewise function of `u` on `[lo, hi]`, found by a
/// dense scan of `key` and recursive bisection.
fn breaks<K: Fn(f64) -> Key>(key: K, lo: f64, hi: f64, scan: usize) -> Vec<f64> {
    let mut out = vec![lo];
    let mut prev_u = lo;
    let mut prev = key(lo);
    for i in 1..=scan {
        let u = lo + (hi - lo) * i as f64 / scan as f64;
        let cur = key(u);
        if cur != prev {
            split(&key, prev_u, prev, u, cur, &mut out);
        }
        prev = cur;
        prev_u = u;
    }
    out.push(hi);
    out
}

fn panel<F: Fn(f64) -> f64>(f: &F, l: f64, r: f64, rule: &[(f64, f64)]) -> f64 {
    let (mid, half) = (0.5 * (l + r), 0.5 * (r - l));
    rule.iter().map(|&(x, wt)| wt * f(mid + half * x)).sum::<f64>() * half
}

fn composite<F: Fn(f64) -> f64>(f: F, cuts: &[f64], max_width: f64, rule: &[(f64, f64)]) -> f64 {
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let pieces = ((b - a) / max_width).ceil().max(1.0) as usize;
        let h = (b - a) / pieces as f64;
        for j in 0..pieces {
            total += panel(&f, a + j as f64 * h, a + (j + 1) as f64 * h, rule);
        }
    }
    total
}

/// Recursive bisection of a panel until both halves agree with the whole.
fn adaptive<F: Fn(f64) -> f64>(f: &F, l: f64, r: f64, whole: f64, tol: f64, depth: u32, rule: &[(f64, f64)]) -> f64 {
    let m = 0.5 * (l + r);
    let (left, right) = (panel(f, l, m, rule), panel(f, m, r, rule));
    if depth == 0 || (left + right - whole).abs() <= tol {
        return left + right;
    }
    adaptive(f, l, m, left, 0.5 * tol, depth - 1, rule) + adaptive(f, m, r, right, 0.5 * tol, depth - 1, rule)
}

/// `∫∫ g(x, u) φ₂(x, u) dx du` over the plane for the terminal Brownian law,
/// with `g` smooth between the breakpoints of `key` in `u`. `scale` sets the
/// absolute accuracy of the outer rule.
fn plane_integral<G, K>(p: &MarketParams, g: G, key: K, scale: f64) -> f64
where
    G: Fn(f64, f64) -> f64,
    K: Fn(f64, f64) -> Key,
{
    let t = p.maturity;
    let st = t.sqrt();
    let s_cond = (t * (1.0 - p.rho * p.rho)).sqrt();
    let rule = gauss_legendre(20);
    let span = 10.0;
    let inner = |x: f64| {
        let mu = p.rho * x;
        let (lo, hi) = (mu - span * s_cond, mu + span * s_cond);
        let cuts = breaks(|u| key(x, u), lo, hi, 400);
        composite(|u| g(x, u) * pdf((u - mu) / s_cond) / s_cond, &cuts, 0.5 * s_cond, &rule)
    };
    let f = |x: f64| inner(x) * pdf(x / st) / st;
    let panels = 40;
    let h = 2.0 * span * st / panels as f64;
    let tol = 1e-11 * scale / panels as f64;
    (0..panels)
        .map(|i| {
            let (l, r) = (-span * st + i as f64 * h, -span * st + (i + 1) as f64 * h);
            adaptive(&f, l, r, panel(&f, l, r, &rule), tol, 30, &rule)
        })
        .sum()
}

/// `P(A_c)` by direct integration of the membership indicator.
pub fn brute_psi1(p: &MarketParams, payoff: &Payoff, c: f64) -> f64 {
    let plane = Plane::new(p, payoff, c, false);
    plane_integral(
        p,
        |x, u| if plane.member(x, u) { 1.0 } else { 0.0 },
        |x, u| plane.key(x, u),
        1.0,
    )
}

/// `Ẽ[e^{−rT} H 1_{A_c}]` by direct integration; `scale` is the size of the
/// claim, typically its price.
pub fn brute_psi2(p: &MarketParams, payoff: &Payoff, c: f64, scale: f64) -> f64 {
    let plane = Plane::new(p, payoff, c, true);
    let disc = (-p.r * p.maturity).exp();
    disc * plane_integral(
        p,
        |x, u| {
            if plane.member(x, u) {
                plane.payoff(x, u)
            } else {
                0.0
            }
        },
        |x, u| plane.key(x, u),
        scale,
    )
}

/// Closed-form prices by exponential tilting, where one exists.
pub fn closed_form_price(p: &MarketParams, payoff: &Payoff) -> Option<f64> {
    let t = p.maturity;
    let st = t.sqrt();
    let (s1, s2, rho, r) = (p.sigma_1, p.sigma_2, p.rho, p.r);
    let k = payoff.strike;
    let disc = (-r * t).exp();
    let a1t = ((k / p.s0_1).ln() - (r - 0.5 * s1 * s1) * t) / s1;
    match payoff.kind {
        PayoffKind::Digital => {
            let var = t * (s1 * s1 - 2.0 * rho * s1 * s2 + s2 * s2);
            let bt = (p.s0_2 / p.s0_1).ln() - 0.5 * (s2 * s2 - s1 * s1) * t;
            Some(disc * k * std_normal_cdf(-bt / var.sqrt()))
        }
        PayoffKind::QuantoDomestic => {
            // E[S¹S² 1{W¹ ≥ ã₁}] − K E[S² 1{W¹ ≥ ã₁}]
            let both = p.s0_1 * p.s0_2 * ((2.0 * r + rho * s1 * s2) * t).exp();
            let shift_both = t * (s1 + rho * s2);
            let single = p.s0_2 * (r * t).exp();
            let shift_single = t * rho * s2;
            Some(
                disc * (both * std_normal_cdf((shift_both - a1t) / st)
                    - k * single * std_normal_cdf((shift_single - a1t) / st)),
            )
        }
        PayoffKind::QuantoForeign => {
            // E[S¹ 1{Z ≥ d̃}] − K E[1/S² 1{Z ≥ d̃}], Z = σ₁W¹ + σ₂W²
            let var_z = t * (s1 * s1 + 2.0 * rho * s1 * s2 + s2 * s2);
            let dt = (k / (p.s0_1 * p.s0_2)).ln() - (2.0 * r - 0.5 * (s1 * s1 + s2 * s2)) * t;
            let first = p.s0_1 * (r * t).exp();
            let shift1 = t * (s1 * s1 + rho * s1 * s2);
            let inv2 = ((-r + s2 * s2) * t).exp() / p.s0_2;
            let shift2 = -t * (rho * s1 * s2 + s2 * s2);
            let sd = var_z.sqrt();
            Some(
                disc * (first * std_normal_cdf((shift1 - dt) / sd)
                    - k * inv2 * std_normal_cdf((shift2 - dt) / sd)),
            )
        }
        _ => None,
    }
}

/// Closed-form `P(H = 0)` for the kinds where it is a normal probability.
pub fn closed_form_prob_zero(p: &MarketParams, payoff: &Payoff) -> Option<f64> {
    let t = p.maturity;
    let (s1, s2, rho) = (p.sigma_1, p.sigma_2, p.rho);
    let k = payoff.strike;
    let a1 = ((k / p.s0_1).ln() - (p.alpha_1 - 0.5 * s1 * s1) * t) / s1;
    let a2 = ((k / p.s0_2).ln() - (p.alpha_2 - 0.5 * s2 * s2) * t) / s2;
    match payoff.kind {
        PayoffKind::Outperformance => {
            Some(bivariate_normal_cdf(a1 / t.sqrt(), a2 / t.sqrt(), rho).unwrap())
        }
        PayoffKind::QuantoDomestic => Some(std_normal_cdf(a1 / t.sqrt())),
        _ => None,
    }
}

/// Single-asset call `Ẽ[e^{−rT}(Sⁱ − K)⁺]` (Black–Scholes).
pub fn black_scholes_call(s0: f64, k: f64, sigma: f64, r: f64, t: f64) -> f64 {
    let st = sigma * t.sqrt();
    let d1 = ((s0 / k).ln() + (r + 0.5 * sigma * sigma) * t) / st;
    s0 * std_normal_cdf(d1) - k * (-r * t).exp() * std_normal_cdf(d1 - st)
}

/// Log-spaced grid.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}
