//! Success sets `A_c` and the functions `Ψ₁(c) = P(A_c)` and
//! `Ψ₂(c) = Ẽ[e^{−rT} H 1_{A_c}]`.
//!
//! Each payoff reduces the two-dimensional expectation to a single Gaussian
//! integral by conditioning on one coordinate; the conditional law of the
//! other coordinate is normal, so the inner expectation over the success set
//! is a finite sum of `Φ` terms.

mod digital;
mod outperformance;
mod quanto;
pub(crate) mod spread;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gaussian::{std_normal_cdf, std_normal_interval, Quadrature, QuadratureSpec};
use crate::market::{MarketModel, Measure};
use crate::payoff::{Payoff, PayoffKind};

pub use spread::{spread_section_contains, spread_upper_set};

/// How a value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Quadrature,
    MonteCarlo,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Quadrature => "quadrature",
            Method::MonteCarlo => "monte-carlo",
        }
    }
}

/// A value of `Ψ₁` or `Ψ₂` with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiValue {
    pub value: f64,
    pub est_error: f64,
    pub method: Method,
}

impl PsiValue {
    fn from_quadrature(q: Quadrature) -> Self {
        Self {
            value: q.value,
            est_error: q.error,
            method: Method::Quadrature,
        }
    }
}

/// Sorted, pairwise disjoint, non-empty closed intervals on the extended line.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalUnion {
    intervals: Vec<(f64, f64)>,
}

impl IntervalUnion {
    pub fn empty() -> Self {
        Self { intervals: vec![] }
    }

    pub fn full() -> Self {
        Self {
            intervals: vec![(f64::NEG_INFINITY, f64::INFINITY)],
        }
    }

    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        let ordered = intervals.iter().all(|&(lo, hi)| lo <= hi && !lo.is_nan() && !hi.is_nan())
            && intervals.windows(2).all(|w| w[0].1 < w[1].0);
        if !ordered {
            return Err(Error::InvalidParameter(format!(
                "intervals {intervals:?} are not sorted and disjoint"
            )));
        }
        Ok(Self { intervals })
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.intervals == [(f64::NEG_INFINITY, f64::INFINITY)]
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(lo, hi)| x >= lo && x <= hi)
    }

    /// Intersection with `[lo, hi]`.
    pub fn intersect(&self, lo: f64, hi: f64) -> IntervalUnion {
        let intervals = self
            .intervals
            .iter()
            .filter_map(|&(a, b)| {
                let (a, b) = (a.max(lo), b.min(hi));
                (a <= b).then_some((a, b))
            })
            .collect();
        IntervalUnion { intervals }
    }

    /// `P(X ∈ self)` for `X ~ N(mean, sd²)`.
    pub fn gaussian_mass(&self, mean: f64, sd: f64) -> f64 {
        self.intervals
            .iter()
            .map(|&(lo, hi)| normal_mass(mean, sd, lo, hi))
            .sum()
    }

    /// `E[e^{aX} 1{X ∈ self}]` for `X ~ N(mean, sd²)`.
    pub fn gaussian_exp_moment(&self, mean: f64, sd: f64, a: f64) -> f64 {
        self.intervals
            .iter()
            .map(|&(lo, hi)| normal_exp_mass(mean, sd, a, lo, hi))
            .sum()
    }
}

/// `ln x` for `x > 0`, `−∞` otherwise.
pub(crate) fn ln_pos(x: f64) -> f64 {
    if x > 0.0 {
        x.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// Coefficients below this magnitude make a linear constraint degenerate.
pub(crate) const DEGENERATE_SLOPE: f64 = 1e-12;

/// `{u : k·u ≥ rhs}` as a closed interval, `None` when empty.
pub(crate) fn halfline(k: f64, rhs: f64) -> Option<(f64, f64)> {
    if rhs == f64::NEG_INFINITY {
        return Some((f64::NEG_INFINITY, f64::INFINITY));
    }
    if k.abs() < DEGENERATE_SLOPE {
        return (0.0 >= rhs).then_some((f64::NEG_INFINITY, f64::INFINITY));
    }
    let root = rhs / k;
    if root.is_nan() {
        return None;
    }
    if k > 0.0 {
        Some((root, f64::INFINITY))
    } else {
        Some((f64::NEG_INFINITY, root))
    }
}

/// Intersection of two closed intervals.
pub(crate) fn meet(a: Option<(f64, f64)>, lo: f64, hi: f64) -> Option<(f64, f64)> {
    let (a0, a1) = a?;
    let (l, h) = (a0.max(lo), a1.min(hi));
    (l <= h).then_some((l, h))
}

/// Breakpoints crowding geometrically onto `start` from the right.
///
/// Next to a payoff boundary the log-excess tends to `−∞`, so for large `c`
/// the nontrivial part of the integrand is a band of width `O(1/c)` there;
/// panels halving towards `start` let the rule see it at any level.
pub(crate) fn graded_from(start: f64, width: f64) -> Vec<f64> {
    (0..64)
        .map(|k| start + width * 0.5f64.powi(k))
        .filter(|&b| b > start)
        .collect()
}

/// `P(lo ≤ X ≤ hi)` for `X ~ N(mean, sd²)`; a point mass when `sd = 0`.
pub(crate) fn normal_mass(mean: f64, sd: f64, lo: f64, hi: f64) -> f64 {
    if sd == 0.0 {
        return if mean >= lo && mean <= hi { 1.0 } else { 0.0 };
    }
    std_normal_interval((lo - mean) / sd, (hi - mean) / sd)
}

/// `E[e^{aX} 1{lo ≤ X ≤ hi}]` for `X ~ N(mean, sd²)`.
pub(crate) fn normal_exp_mass(mean: f64, sd: f64, a: f64, lo: f64, hi: f64) -> f64 {
    let tilted = mean + a * sd * sd;
    (a * mean + 0.5 * a * a * sd * sd).exp() * normal_mass(tilted, sd, lo, hi)
}

/// `P(lo ≤ X ≤ hi)` wrapped as an option-interval.
pub(crate) fn mass_of(mean: f64, sd: f64, set: Option<(f64, f64)>) -> f64 {
    set.map_or(0.0, |(lo, hi)| normal_mass(mean, sd, lo, hi))
}

pub(crate) fn exp_mass_of(mean: f64, sd: f64, a: f64, set: Option<(f64, f64)>) -> f64 {
    set.map_or(0.0, |(lo, hi)| normal_exp_mass(mean, sd, a, lo, hi))
}

/// `P(X ≥ lo)` for `X ~ N(0, sd²)`.
pub(crate) fn upper_tail(lo: f64, sd: f64) -> f64 {
    std_normal_cdf(-lo / sd)
}

/// Size of a payoff, used to keep price integrands of order one so that the
/// absolute tolerance acts relative to the claim.
pub(crate) fn reference_scale(model: &MarketModel, payoff: &Payoff) -> f64 {
    let p = model.params();
    match payoff.kind {
        PayoffKind::Digital => payoff.strike,
        PayoffKind::QuantoDomestic => p.s0_1 * p.s0_2,
        PayoffKind::QuantoForeign | PayoffKind::Spread => p.s0_1,
        PayoffKind::Outperformance => p.s0_1.max(p.s0_2),
    }
}

fn log_level(c: f64) -> Result<f64> {
    if !(c >= 0.0) || !c.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "level c must be finite and nonnegative, got {c}"
        )));
    }
    Ok(ln_pos(c))
}

/// The success set `A_c = {Z̃_T⁻¹ ≥ cH}`.
///
/// `level = +∞` is allowed and leaves only the zero-payoff region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuccessSet {
    pub level: f64,
    pub payoff: Payoff,
    model: MarketModel,
}

impl SuccessSet {
    /// Membership of the point `(w1, w2)` given in the coordinates of `measure`.
    pub fn contains(&self, w1: f64, w2: f64, measure: Measure) -> bool {
        if self.level == 0.0 {
            return true;
        }
        let (s1, s2) = self.model.terminal_assets(w1, w2, measure);
        let h = self.payoff.value(s1, s2);
        if h == 0.0 {
            return true;
        }
        if self.level == f64::INFINITY {
            return false;
        }
        let (x1, x2) = self.model.physical_coords(w1, w2, measure);
        self.model.log_inverse_density(x1, x2) >= self.level.ln() + h.ln()
    }

    /// The modified claim `H·1_{A_c}` at a point.
    pub fn knocked_out_payoff(&self, w1: f64, w2: f64, measure: Measure) -> f64 {
        if self.contains(w1, w2, measure) {
            let (s1, s2) = self.model.terminal_assets(w1, w2, measure);
            self.payoff.value(s1, s2)
        } else {
            0.0
        }
    }
}

pub fn success_set(model: &MarketModel, payoff: &Payoff, c: f64) -> Result<SuccessSet> {
    if !(c >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "level c must be nonnegative, got {c}"
        )));
    }
    Ok(SuccessSet {
        level: c,
        payoff: *payoff,
        model: *model,
    })
}

/// `Ψ₁(c) = P(A_c)`.
pub fn psi1(model: &MarketModel, payoff: &Payoff, c: f64, spec: &QuadratureSpec) -> Result<PsiValue> {
    spec.validate()?;
    let ln_c = log_level(c)?;
    if c == 0.0 {
        return Ok(PsiValue {
            value: 1.0,
            est_error: 0.0,
            method: Method::Quadrature,
        });
    }
    let k = payoff.strike;
    let q = match payoff.kind {
        PayoffKind::Digital => digital::psi1(model, k, ln_c, spec)?,
        PayoffKind::QuantoDomestic => quanto::domestic_psi1(model, k, ln_c, spec)?,
        PayoffKind::QuantoForeign => quanto::foreign_psi1(model, k, ln_c, spec)?,
        PayoffKind::Outperformance => outperformance::psi1(model, k, ln_c, spec)?,
        PayoffKind::Spread => spread::psi1(model, k, ln_c, spec)?,
    };
    let mut v = PsiValue::from_quadrature(q);
    v.value = v.value.clamp(0.0, 1.0);
    Ok(v)
}

/// `Ψ₂(c) = Ẽ[e^{−rT} H 1_{A_c}]`; `Ψ₂(0)` is the price of `H`.
pub fn psi2(model: &MarketModel, payoff: &Payoff, c: f64, spec: &QuadratureSpec) -> Result<PsiValue> {
    spec.validate()?;
    let ln_c = log_level(c)?;
    let k = payoff.strike;
    let scale = reference_scale(model, payoff);
    let q = match payoff.kind {
        PayoffKind::Digital => digital::psi2(model, k, ln_c, spec)?,
        PayoffKind::QuantoDomestic => quanto::domestic_psi2(model, k, ln_c, scale, spec)?,
        PayoffKind::QuantoForeign => quanto::foreign_psi2(model, k, ln_c, scale, spec)?,
        PayoffKind::Outperformance => outperformance::psi2(model, k, ln_c, scale, spec)?,
        PayoffKind::Spread => spread::psi2(model, k, ln_c, scale, spec)?,
    };
    let mut v = PsiValue::from_quadrature(q);
    v.value = v.value.max(0.0);
    Ok(v)
}

/// One row of a tabulated curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiPoint {
    pub c: f64,
    pub psi1: PsiValue,
    pub psi2: PsiValue,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsiCurve {
    pub payoff: Payoff,
    pub points: Vec<PsiPoint>,
}

/// Tolerance for a nonincreasing pair, from the two error estimates.
fn slack(a: &PsiValue, b: &PsiValue) -> f64 {
    2.0 * (a.est_error + b.est_error) + 8.0 * f64::EPSILON * a.value.abs().max(b.value.abs())
}

/// `Ψ₁` and `Ψ₂` on an increasing grid, checked to be nonincreasing.
pub fn psi_curve(
    model: &MarketModel,
    payoff: &Payoff,
    c_grid: &[f64],
    spec: &QuadratureSpec,
) -> Result<PsiCurve> {
    if c_grid.iter().any(|c| !(*c >= 0.0) || !c.is_finite())
        || c_grid.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(Error::InvalidParameter(
            "c grid must be finite, nonnegative and strictly increasing".into(),
        ));
    }
    let points = c_grid
        .par_iter()
        .map(|&c| {
            Ok(PsiPoint {
                c,
                psi1: psi1(model, payoff, c, spec)?,
                psi2: psi2(model, payoff, c, spec)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    for w in points.windows(2) {
        let (lo, hi) = (&w[0], &w[1]);
        for (column, a, b) in [("psi1", &lo.psi1, &hi.psi1), ("psi2", &lo.psi2, &hi.psi2)] {
            if b.value > a.value + slack(a, b) {
                return Err(Error::MonotonicityViolation {
                    column,
                    c_lo: lo.c,
                    c_hi: hi.c,
                    v_lo: a.value,
                    v_hi: b.value,
                });
            }
        }
    }
    Ok(PsiCurve {
        payoff: *payoff,
        points,
    })
}
