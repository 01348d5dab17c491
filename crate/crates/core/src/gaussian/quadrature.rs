//! Adaptive Gauss–Kronrod (10/21) quadrature against normal weights.
//!
//! Integrals `∫ f(x) φ_{m,s}(x) dx` are computed in the standardised variable
//! `z = (x − m)/s` over the window `|z| ≤ trunc_sigmas`. Integrands with jumps
//! are handled by passing the jump locations as breakpoints so that every
//! panel sees a smooth function.
#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::law::GaussianVec;
use super::normal::std_normal_pdf;
use crate::error::{Error, Result};

/// Tolerances for every quadrature in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    /// Half-width of the integration window in standard deviations.
    pub trunc_sigmas: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-9,
            trunc_sigmas: 8.5,
            max_subdivisions: 1 << 14,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.trunc_sigmas >= 6.0) || self.max_subdivisions == 0 {
            return Err(Error::InvalidParameter(format!(
                "quadrature spec needs abs_tol > 0, trunc_sigmas >= 6, max_subdivisions > 0: {self:?}"
            )));
        }
        Ok(())
    }

    pub fn with_tol(self, abs_tol: f64) -> Self {
        Self { abs_tol, ..self }
    }
}

/// Result of a quadrature: value and estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

impl Quadrature {
    pub fn zero() -> Self {
        Self {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        }
    }

    pub fn exact(value: f64) -> Self {
        Self {
            value,
            error: 0.0,
            evaluations: 0,
        }
    }

    pub fn scaled(self, factor: f64) -> Self {
        Self {
            value: self.value * factor,
            error: self.error * factor.abs(),
            evaluations: self.evaluations,
        }
    }
}

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077600525374806,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// 21-point Kronrod rule with embedded 10-point Gauss error estimate.
fn gk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let centr = 0.5 * (a + b);
    let hlgth = 0.5 * (b - a);
    let fc = f(centr);
    let mut resg = 0.0;
    let mut resk = WGK[10] * fc;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for (j, wg) in WG.iter().enumerate() {
        let jtw = 2 * j + 1;
        let dx = hlgth * XGK[jtw];
        let (f1, f2) = (f(centr - dx), f(centr + dx));
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        resg += wg * (f1 + f2);
        resk += WGK[jtw] * (f1 + f2);
        resabs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..5 {
        let jtwm1 = 2 * j;
        let dx = hlgth * XGK[jtwm1];
        let (f1, f2) = (f(centr - dx), f(centr + dx));
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        resk += WGK[jtwm1] * (f1 + f2);
        resabs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }
    let reskh = 0.5 * resk;
    let mut resasc = WGK[10] * (fc - reskh).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let dh = hlgth.abs();
    let value = resk * hlgth;
    resabs *= dh;
    resasc *= dh;
    let mut error = ((resk - resg) * hlgth).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Panel { a, b, value, error }
}

/// Globally adaptive integration of `f` over a union of finite panels.
pub fn integrate_panels<F: FnMut(f64) -> f64>(
    mut f: F,
    panels: &[(f64, f64)],
    abs_tol: f64,
    max_subdivisions: usize,
) -> Result<Quadrature> {
    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Panel> = Vec::new();
    let mut evaluations = 0;
    for &(a, b) in panels {
        if b > a {
            heap.push(gk21(&mut f, a, b));
            evaluations += 21;
        }
    }
    let total = |heap: &BinaryHeap<Panel>, frozen: &[Panel]| -> (f64, f64) {
        heap.iter()
            .chain(frozen.iter())
            .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
    };
    loop {
        let (value, error) = total(&heap, &frozen);
        if error <= abs_tol {
            return Ok(Quadrature {
                value,
                error,
                evaluations,
            });
        }
        if heap.len() + frozen.len() >= max_subdivisions || heap.is_empty() {
            return Err(Error::ToleranceNotMet {
                estimate: value,
                error,
            });
        }
        let worst = heap.pop().expect("heap checked non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            frozen.push(worst);
            continue;
        }
        heap.push(gk21(&mut f, worst.a, mid));
        heap.push(gk21(&mut f, mid, worst.b));
        evaluations += 42;
    }
}

/// Standardised panels of `domain ∩ [m − k s, m + k s]`, split at `breakpoints`.
fn standard_panels(
    mean: f64,
    sd: f64,
    k: f64,
    domain: &[(f64, f64)],
    breakpoints: &[f64],
) -> Vec<(f64, f64)> {
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .filter(|b| b.is_finite())
        .map(|b| (b - mean) / sd)
        .filter(|z| z.abs() < k)
        .collect();
    cuts.sort_by(f64::total_cmp);
    let mut out = Vec::new();
    for &(lo, hi) in domain {
        let zlo = ((lo - mean) / sd).max(-k);
        let zhi = ((hi - mean) / sd).min(k);
        if !(zhi > zlo) {
            continue;
        }
        let mut start = zlo;
        for &c in cuts.iter().filter(|&&c| c > zlo && c < zhi) {
            if c > start {
                out.push((start, c));
                start = c;
            }
        }
        out.push((start, zhi));
    }
    out
}

fn univariate_params(weight: &GaussianVec) -> Result<(f64, f64)> {
    if weight.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            actual: weight.dim(),
        });
    }
    Ok((weight.mean()[0], weight.sd(0)))
}

/// `∫ f(x) φ(x) dx` over the truncation window of the normal weight.
pub fn integrate_gauss_weighted<F: FnMut(f64) -> f64>(
    f: F,
    weight: &GaussianVec,
    spec: &QuadratureSpec,
) -> Result<Quadrature> {
    integrate_gauss_weighted_on(f, weight, spec, &[(f64::NEG_INFINITY, f64::INFINITY)], &[])
}

/// `∫_domain f(x) φ(x) dx`, with the domain given as closed intervals and the
/// integrand's jump points as `breakpoints`.
///
/// A zero-variance weight is a point mass: the result is `f(mean)` when the
/// mean lies in the domain.
pub fn integrate_gauss_weighted_on<F: FnMut(f64) -> f64>(
    mut f: F,
    weight: &GaussianVec,
    spec: &QuadratureSpec,
    domain: &[(f64, f64)],
    breakpoints: &[f64],
) -> Result<Quadrature> {
    let (mean, sd) = univariate_params(weight)?;
    if sd == 0.0 {
        let inside = domain.iter().any(|&(lo, hi)| mean >= lo && mean <= hi);
        return Ok(if inside {
            Quadrature {
                value: f(mean),
                error: 0.0,
                evaluations: 1,
            }
        } else {
            Quadrature::zero()
        });
    }
    let panels = standard_panels(mean, sd, spec.trunc_sigmas, domain, breakpoints);
    integrate_panels(
        |z| {
            let fx = f(mean + sd * z);
            if fx == 0.0 {
                0.0
            } else {
                fx * std_normal_pdf(z)
            }
        },
        &panels,
        spec.abs_tol,
        spec.max_subdivisions,
    )
}

/// Outer Gaussian-weighted integral of inner quadratures.
///
/// The reported error adds the outer estimate to the largest inner estimate;
/// with each level at `abs_tol` it stays below `2·abs_tol`.
pub fn integrate_nested<F: FnMut(f64) -> Result<Quadrature>>(
    outer_weight: &GaussianVec,
    mut inner: F,
    spec: &QuadratureSpec,
    domain: &[(f64, f64)],
    breakpoints: &[f64],
) -> Result<Quadrature> {
    let mut failure: Option<Error> = None;
    let mut inner_err: f64 = 0.0;
    let mut inner_evals = 0;
    let outer = integrate_gauss_weighted_on(
        |x| {
            if failure.is_some() {
                return 0.0;
            }
            match inner(x) {
                Ok(q) => {
                    inner_err = inner_err.max(q.error);
                    inner_evals += q.evaluations;
                    q.value
                }
                Err(Error::ToleranceNotMet { estimate, error }) => {
                    failure = Some(Error::ToleranceNotMet { estimate, error });
                    estimate
                }
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            }
        },
        outer_weight,
        spec,
        domain,
        breakpoints,
    );
    match (outer, failure) {
        (_, Some(Error::ToleranceNotMet { error, .. })) => Err(Error::ToleranceNotMet {
            estimate: f64::NAN,
            error,
        }),
        (_, Some(e)) => Err(e),
        (Err(Error::ToleranceNotMet { estimate, error }), None) => Err(Error::ToleranceNotMet {
            estimate,
            error: error + inner_err,
        }),
        (Err(e), None) => Err(e),
        (Ok(q), None) => Ok(Quadrature {
            value: q.value,
            error: q.error + inner_err,
            evaluations: q.evaluations + inner_evals,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::normal::std_normal_cdf;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn kronrod_weights_sum_to_two() {
        let s: f64 = 2.0 * WGK[..10].iter().sum::<f64>() + WGK[10];
        assert!((s - 2.0).abs() < 1e-15);
        let g: f64 = 2.0 * WG.iter().sum::<f64>();
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn polynomials_are_exact() {
        for deg in 0..=19 {
            let q = integrate_panels(|x| x.powi(deg), &[(0.0, 1.0)], 1e-13, 1).unwrap();
            let want = 1.0 / (deg as f64 + 1.0);
            assert!((q.value - want).abs() < 1e-14, "degree {deg}");
        }
    }

    #[test]
    fn normalisation_and_moments() {
        let w = GaussianVec::univariate(1.5, 0.64).unwrap();
        let one = integrate_gauss_weighted(|_| 1.0, &w, &spec()).unwrap();
        assert!((one.value - 1.0).abs() < 1e-9);
        let m1 = integrate_gauss_weighted(|x| x, &w, &spec()).unwrap();
        assert!((m1.value - 1.5).abs() < 1e-9);
        let m2 = integrate_gauss_weighted(|x| (x - 1.5).powi(2), &w, &spec()).unwrap();
        assert!((m2.value - 0.64).abs() < 1e-9);
    }

    #[test]
    fn indicator_tail_matches_closed_form() {
        let t = 2.0;
        let w = GaussianVec::univariate(0.0, t).unwrap();
        for a in [-3.0, -0.4, 0.0, 0.9, 2.5] {
            let q = integrate_gauss_weighted_on(
                |x| if x >= a { 1.0 } else { 0.0 },
                &w,
                &spec(),
                &[(f64::NEG_INFINITY, f64::INFINITY)],
                &[a],
            )
            .unwrap();
            let want = std_normal_cdf(-a / t.sqrt());
            assert!((q.value - want).abs() < 1e-9, "a={a}");
        }
    }

    #[test]
    fn point_mass_weight() {
        let w = GaussianVec::univariate(0.5, 0.0).unwrap();
        let q = integrate_gauss_weighted_on(|x| x * 4.0, &w, &spec(), &[(0.0, 1.0)], &[]).unwrap();
        assert_eq!(q.value, 2.0);
        let q = integrate_gauss_weighted_on(|x| x, &w, &spec(), &[(1.0, 2.0)], &[]).unwrap();
        assert_eq!(q.value, 0.0);
    }

    #[test]
    fn nested_anchors() {
        let w = GaussianVec::univariate(0.0, 1.0).unwrap();
        let full = [(f64::NEG_INFINITY, f64::INFINITY)];
        let one = integrate_nested(&w, |_| Ok(Quadrature::exact(1.0)), &spec(), &full, &[]).unwrap();
        assert!((one.value - 1.0).abs() < 1e-9);
        let half = integrate_nested(
            &w,
            |x| Ok(Quadrature::exact(std_normal_cdf(x))),
            &spec(),
            &full,
            &[],
        )
        .unwrap();
        assert!((half.value - 0.5).abs() < 1e-9);
        // Inner quadrature for Φ(x) as a Gaussian integral.
        let inner_w = GaussianVec::univariate(0.0, 1.0).unwrap();
        let nested = integrate_nested(
            &w,
            |x| {
                integrate_gauss_weighted_on(|_| 1.0, &inner_w, &spec(), &[(f64::NEG_INFINITY, x)], &[])
            },
            &spec(),
            &full,
            &[],
        )
        .unwrap();
        assert!((nested.value - 0.5).abs() < 2e-9);
        assert!(nested.error <= 2e-9);
    }

    #[test]
    fn exhausted_budget_reports_estimate() {
        let res = integrate_panels(
            |x| if x > 0.3 { 1.0 } else { 0.0 },
            &[(0.0, 1.0)],
            1e-15,
            4,
        );
        match res {
            Err(Error::ToleranceNotMet { estimate, .. }) => assert!((estimate - 0.7).abs() < 0.1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn spec_validation() {
        assert!(spec().validate().is_ok());
        assert!(QuadratureSpec { trunc_sigmas: 5.0, ..spec() }.validate().is_err());
        assert!(QuadratureSpec { abs_tol: 0.0, ..spec() }.validate().is_err());
    }
}
