//! Spread claim `(S¹ − S² − K)⁺`.
//!
//! Conditioning on the second coordinate `y`, membership of `x` (first
//! coordinate) in `A_c` reads
//!
//! `E e^{A₁x} − F e^{σ₁x} ≥ −c(S²(y) + K)`,
//!
//! with `E = e^{A₂y + BT}` and `F = c S⁰₁ e^{(α₁ − σ₁²/2)T}` under the physical
//! measure. The left side is convex-like in shape: for `A₁ > σ₁` it has a
//! single minimum, otherwise it crosses the right side at most once, so the
//! section of `A_c` at `y` is one or two half-lines or the whole line.

use crate::error::{Error, Result};
use crate::gaussian::{integrate_gauss_weighted_on, GaussianVec, Quadrature, QuadratureSpec};
use crate::market::{MarketModel, Measure};

use super::IntervalUnion;

/// Roots are located to this absolute accuracy in `x`.
const ROOT_TOL: f64 = 1e-12;
/// Bracket expansion gives up beyond this distance.
const MAX_REACH: f64 = 1e8;

/// `ln E + A₁x`, `ln F + σ₁x` and `ln C₀` of the section at a fixed `y`.
#[derive(Debug, Clone, Copy)]
struct Section {
    ln_e: f64,
    a: f64,
    ln_f: f64,
    sigma: f64,
    ln_c0: f64,
}

fn logaddexp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        hi
    } else {
        hi + (lo - hi).exp().ln_1p()
    }
}

impl Section {
    fn new(model: &MarketModel, ln_c: f64, y: f64, strike: f64, measure: Measure) -> Self {
        let p = model.params();
        let mc = model.measure_constants();
        let t = p.maturity;
        let (ln_e, mu1) = match measure {
            Measure::Physical => (mc.a2_const * y + mc.b_const * t, p.alpha_1),
            Measure::Martingale => {
                let [t1, t2] = model.theta();
                (
                    mc.a2_const * (y - t2 * t) - mc.a1_const * t1 * t + mc.b_const * t,
                    p.r,
                )
            }
        };
        let s2 = model.asset(1, y, measure);
        Self {
            ln_e,
            a: mc.a1_const,
            ln_f: ln_c + p.s0_1.ln() + (mu1 - 0.5 * p.sigma_1 * p.sigma_1) * t,
            sigma: p.sigma_1,
            ln_c0: ln_c + (s2 + strike).ln(),
        }
    }

    /// Positive inside the section, negative outside; a monotone transform of
    /// `E e^{A₁x} − F e^{σ₁x} + C₀`.
    fn margin(&self, x: f64) -> f64 {
        logaddexp(self.ln_e + self.a * x, self.ln_c0) - (self.ln_f + self.sigma * x)
    }

    fn contains(&self, x: f64) -> bool {
        self.margin(x) >= 0.0
    }

    fn ratio_equal(&self) -> bool {
        (self.a - self.sigma).abs() <= 1e-12 * self.sigma
    }

    /// Bisection for the sign change of `margin` between `inside` and `outside`.
    fn bisect(&self, mut inside: f64, mut outside: f64) -> f64 {
        for _ in 0..200 {
            if (inside - outside).abs() <= ROOT_TOL {
                break;
            }
            let mid = 0.5 * (inside + outside);
            if mid == inside || mid == outside {
                break;
            }
            if self.contains(mid) {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        inside
    }

    /// First point from `start` stepping by `dir` where membership is `want`.
    fn search(&self, start: f64, dir: f64, want: bool) -> Option<f64> {
        let mut step = 1.0;
        while step <= MAX_REACH {
            let x = start + dir * step;
            if self.contains(x) == want {
                return Some(x);
            }
            step *= 2.0;
        }
        None
    }

    fn failure(&self, lo: f64, hi: f64) -> Error {
        let fallback = if self.contains(lo) && self.contains(hi) {
            IntervalUnion::full()
        } else {
            IntervalUnion::empty()
        };
        Error::RootBracketFailure { fallback }
    }

    fn set(&self) -> Result<IntervalUnion> {
        let neg = f64::NEG_INFINITY;
        let pos = f64::INFINITY;
        if self.ratio_equal() {
            if self.ln_e >= self.ln_f {
                return Ok(IntervalUnion::full());
            }
            // (E − F)e^{σx} + C₀ = 0
            let ln_gap = self.ln_f + (-(self.ln_e - self.ln_f).exp_m1()).ln();
            let x0 = (self.ln_c0 - ln_gap) / self.sigma;
            return IntervalUnion::new(vec![(neg, x0)]);
        }
        if self.a > self.sigma {
            // Minimum of E e^{A₁x} − F e^{σ₁x} where A₁E e^{A₁x} = σ₁F e^{σ₁x}.
            let x_hat =
                (self.sigma.ln() + self.ln_f - self.a.ln() - self.ln_e) / (self.a - self.sigma);
            if !x_hat.is_finite() {
                return Err(self.failure(-MAX_REACH, MAX_REACH));
            }
            if self.contains(x_hat) {
                return Ok(IntervalUnion::full());
            }
            let left = self
                .search(x_hat, -1.0, true)
                .ok_or_else(|| self.failure(x_hat - MAX_REACH, x_hat + MAX_REACH))?;
            let right = self
                .search(x_hat, 1.0, true)
                .ok_or_else(|| self.failure(x_hat - MAX_REACH, x_hat + MAX_REACH))?;
            let x1 = self.bisect(left, x_hat);
            let x2 = self.bisect(right, x_hat);
            return IntervalUnion::new(vec![(neg, x1), (x2, pos)]);
        }
        // A₁ < σ₁: strictly decreasing wherever it is nonpositive.
        let (inside, outside) = if self.contains(0.0) {
            let out = self.search(0.0, 1.0, false);
            (0.0, out.ok_or_else(|| self.failure(-MAX_REACH, MAX_REACH))?)
        } else {
            let inn = self.search(0.0, -1.0, true);
            (inn.ok_or_else(|| self.failure(-MAX_REACH, MAX_REACH))?, 0.0)
        };
        let x0 = self.bisect(inside, outside);
        IntervalUnion::new(vec![(neg, x0)])
    }
}

/// Section `{x : (x, y) ∈ A_c}` of the success set for the spread with
/// strike `strike`, in the coordinates of `measure`.
pub fn spread_upper_set(
    model: &MarketModel,
    strike: f64,
    c: f64,
    y: f64,
    measure: Measure,
) -> Result<IntervalUnion> {
    if !(c > 0.0) || !c.is_finite() || !y.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "spread section needs finite c > 0 and finite y, got c={c}, y={y}"
        )));
    }
    Section::new(model, c.ln(), y, strike, measure).set()
}

/// Threshold of the first coordinate above which the spread pays.
fn pay_threshold(model: &MarketModel, strike: f64, y: f64, measure: Measure) -> f64 {
    let p = model.params();
    let mu1 = match measure {
        Measure::Physical => p.alpha_1,
        Measure::Martingale => p.r,
    };
    let s2 = model.asset(1, y, measure);
    (((s2 + strike) / p.s0_1).ln() - (mu1 - 0.5 * p.sigma_1 * p.sigma_1) * p.maturity) / p.sigma_1
}

fn section_set(model: &MarketModel, strike: f64, ln_c: f64, y: f64, measure: Measure) -> Result<IntervalUnion> {
    if ln_c == f64::NEG_INFINITY {
        return Ok(IntervalUnion::full());
    }
    Section::new(model, ln_c, y, strike, measure).set()
}

/// Runs an outer Gaussian integral over `y` whose integrand may fail.
fn integrate_y<F>(model: &MarketModel, spec: &QuadratureSpec, mut f: F) -> Result<Quadrature>
where
    F: FnMut(f64) -> Result<f64>,
{
    let outer = GaussianVec::univariate(0.0, model.maturity())?;
    let mut failure = None;
    let q = integrate_gauss_weighted_on(
        |y| match f(y) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        &outer,
        spec,
        &[(f64::NEG_INFINITY, f64::INFINITY)],
        &[],
    );
    match failure {
        Some(e) => Err(e),
        None => q,
    }
}

fn conditional_sd(model: &MarketModel) -> f64 {
    let p = model.params();
    (p.maturity * (1.0 - p.rho * p.rho)).sqrt()
}

pub(crate) fn prob_zero(model: &MarketModel, strike: f64, spec: &QuadratureSpec) -> Result<Quadrature> {
    let rho = model.params().rho;
    let sd = conditional_sd(model);
    integrate_y(model, spec, |y| {
        let e = pay_threshold(model, strike, y, Measure::Physical);
        Ok(super::normal_mass(rho * y, sd, f64::NEG_INFINITY, e))
    })
}

pub(super) fn psi1(model: &MarketModel, strike: f64, ln_c: f64, spec: &QuadratureSpec) -> Result<Quadrature> {
    let rho = model.params().rho;
    let sd = conditional_sd(model);
    integrate_y(model, spec, |y| {
        let e = pay_threshold(model, strike, y, Measure::Physical);
        let set = section_set(model, strike, ln_c, y, Measure::Physical)?;
        let paying = set.intersect(e, f64::INFINITY).gaussian_mass(rho * y, sd);
        Ok(paying + super::normal_mass(rho * y, sd, f64::NEG_INFINITY, e))
    })
}

pub(super) fn psi2(
    model: &MarketModel,
    strike: f64,
    ln_c: f64,
    scale: f64,
    spec: &QuadratureSpec,
) -> Result<Quadrature> {
    let p = *model.params();
    let rho = p.rho;
    let sd = conditional_sd(model);
    let s1_factor = p.s0_1 * ((p.r - 0.5 * p.sigma_1 * p.sigma_1) * p.maturity).exp();
    let q = integrate_y(model, spec, |y| {
        let f = pay_threshold(model, strike, y, Measure::Martingale);
        let set = section_set(model, strike, ln_c, y, Measure::Martingale)?;
        let paying = set.intersect(f, f64::INFINITY);
        let s2k = model.asset(1, y, Measure::Martingale) + strike;
        let value = s1_factor * paying.gaussian_exp_moment(rho * y, sd, p.sigma_1)
            - s2k * paying.gaussian_mass(rho * y, sd);
        Ok(value.max(0.0) / scale)
    })?;
    Ok(q.scaled(model.discount() * scale))
}

/// Direct evaluation of the defining inequality, used to cross-check sections.
pub fn spread_section_contains(
    model: &MarketModel,
    strike: f64,
    c: f64,
    y: f64,
    x: f64,
    measure: Measure,
) -> bool {
    let (s1, s2) = model.terminal_assets(x, y, measure);
    let (w1, w2) = model.physical_coords(x, y, measure);
    let lhs = model.log_inverse_density(w1, w2).exp();
    lhs >= c * (s1 - s2 - strike)
}
