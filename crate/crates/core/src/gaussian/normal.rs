//! Univariate and bivariate standard normal distribution functions.
#![allow(clippy::excessive_precision)]

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal distribution function `Φ(x)`.
pub fn std_normal_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Standard normal density.
pub fn std_normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// `Φ(hi) − Φ(lo)` evaluated on the tail that keeps precision.
pub fn std_normal_interval(lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    if lo > 0.0 {
        std_normal_cdf(-lo) - std_normal_cdf(-hi)
    } else {
        std_normal_cdf(hi) - std_normal_cdf(lo)
    }
}

// Gauss–Legendre half-rules (weight, abscissa) for the Drezner–Wesolowsky
// reduction, as used in Genz's BVND.
const GL6: [(f64, f64); 3] = [
    (0.1713244923791705e+00, -0.9324695142031522e+00),
    (0.3607615730481384e+00, -0.6612093864662647e+00),
    (0.4679139345726904e+00, -0.2386191860831970e+00),
];

const GL12: [(f64, f64); 6] = [
    (0.4717533638651177e-01, -0.9815606342467191e+00),
    (0.1069393259953183e+00, -0.9041172563704750e+00),
    (0.1600783285433464e+00, -0.7699026741943050e+00),
    (0.2031674267230659e+00, -0.5873179542866171e+00),
    (0.2334925365383547e+00, -0.3678314989981802e+00),
    (0.2491470458134029e+00, -0.1252334085114692e+00),
];

const GL20: [(f64, f64); 10] = [
    (0.1761400713915212e-01, -0.9931285991850949e+00),
    (0.4060142980038694e-01, -0.9639719272779138e+00),
    (0.6267204833410906e-01, -0.9122344282513259e+00),
    (0.8327674157670475e-01, -0.8391169718222188e+00),
    (0.1019301198172404e+00, -0.7463319064601508e+00),
    (0.1181945319615184e+00, -0.6360536807265150e+00),
    (0.1316886384491766e+00, -0.5108670019508271e+00),
    (0.1420961093183821e+00, -0.3737060887154196e+00),
    (0.1491729864726037e+00, -0.2277858511416451e+00),
    (0.1527533871307259e+00, -0.7652652113349733e-01),
];

/// Upper orthant probability `P(X > h, Y > k)` for a standard bivariate
/// normal with correlation `r`.
fn upper_orthant(h: f64, k: f64, r: f64) -> f64 {
    let rule: &[(f64, f64)] = if r.abs() < 0.3 {
        &GL6
    } else if r.abs() < 0.75 {
        &GL12
    } else {
        &GL20
    };
    let mut k = k;
    let hk = h * k;
    let mut bvn = 0.0;

    if r.abs() < 0.925 {
        if r != 0.0 {
            let hs = 0.5 * (h * h + k * k);
            let asr = 0.5 * r.asin();
            for &(w, x) in rule {
                for sign in [-1.0, 1.0] {
                    let sn = (asr * (sign * x + 1.0)).sin();
                    bvn += w * ((sn * hk - hs) / (1.0 - sn * sn)).exp();
                }
            }
            bvn *= asr / (2.0 * PI);
        }
        return bvn + std_normal_cdf(-h) * std_normal_cdf(-k);
    }

    if r < 0.0 {
        k = -k;
    }
    let hk = if r < 0.0 { -hk } else { hk };
    let as_ = (1.0 - r) * (1.0 + r);
    let mut a = as_.sqrt();
    let bs = (h - k) * (h - k);
    let c = (4.0 - hk) / 8.0;
    let d = (12.0 - hk) / 16.0;
    let asr = -0.5 * (bs / as_ + hk);
    if asr > -100.0 {
        bvn = a
            * asr.exp()
            * (1.0 - c * (bs - as_) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as_ * as_ / 5.0);
    }
    if -hk < 100.0 {
        let b = bs.sqrt();
        bvn -= (-0.5 * hk).exp()
            * (2.0 * PI).sqrt()
            * std_normal_cdf(-b / a)
            * b
            * (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
    }
    a *= 0.5;
    for &(w, x) in rule {
        for sign in [-1.0, 1.0] {
            let xs = (a * (sign * x + 1.0)).powi(2);
            let rs = (1.0 - xs).sqrt();
            let asr = -0.5 * (bs / xs + hk);
            if asr > -100.0 {
                bvn += a
                    * w
                    * asr.exp()
                    * ((-hk * (1.0 - rs) / (2.0 * (1.0 + rs))).exp() / rs
                        - (1.0 + c * xs * (1.0 + d * xs)));
            }
        }
    }
    bvn /= -2.0 * PI;

    if r > 0.0 {
        bvn + std_normal_cdf(-h.max(k))
    } else {
        let mut out = -bvn;
        if k > h {
            out += if h < 0.0 {
                std_normal_cdf(k) - std_normal_cdf(h)
            } else {
                std_normal_cdf(-h) - std_normal_cdf(-k)
            };
        }
        out
    }
}

/// `P(Z₁ ≤ x, Z₂ ≤ y)` for a standard bivariate normal with correlation `rho`.
pub fn bivariate_normal_cdf(x: f64, y: f64, rho: f64) -> Result<f64> {
    if !(rho.abs() < 1.0) {
        return Err(Error::InvalidCorrelation(rho));
    }
    if x == f64::NEG_INFINITY || y == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(std_normal_cdf(y));
    }
    if y == f64::INFINITY {
        return Ok(std_normal_cdf(x));
    }
    Ok(upper_orthant(-x, -y, rho).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Maclaurin series of erf, summed in f64 for moderate arguments.
    fn erf_series(x: f64) -> f64 {
        let mut term = x;
        let mut sum = x;
        let x2 = x * x;
        for n in 1..200 {
            term *= -x2 / n as f64;
            let add = term / (2 * n + 1) as f64;
            sum += add;
            if add.abs() < 1e-20 {
                break;
            }
        }
        sum * 2.0 / PI.sqrt()
    }

    /// Lentz continued fraction for the upper tail, good for x ≳ 2.
    fn upper_tail_cf(x: f64) -> f64 {
        // Q(x) = φ(x) / (x + 1/(x + 2/(x + 3/(x + ...))))
        let mut f = x;
        for n in (1..300).rev() {
            f = x + n as f64 / f;
        }
        std_normal_pdf(x) / f
    }

    #[test]
    fn cdf_anchor_values() {
        assert_eq!(std_normal_cdf(0.0), 0.5);
        assert_eq!(std_normal_cdf(40.0), 1.0);
        assert_eq!(std_normal_cdf(-40.0), 0.0);
        let oracle = 0.5 * (1.0 + erf_series(1.0 / 2f64.sqrt()));
        assert!((oracle - 0.8413447460685429).abs() < 2e-16);
        assert!((std_normal_cdf(1.0) - 0.8413447460685429).abs() < 1e-15);
    }

    #[test]
    fn cdf_matches_independent_oracles() {
        for i in 0..=160 {
            let x = -8.0 + 0.1 * i as f64;
            let got = std_normal_cdf(x);
            if x.abs() <= 2.5 {
                let want = 0.5 * (1.0 + erf_series(x / 2f64.sqrt()));
                assert!((got - want).abs() < 1e-15, "x={x}: {got} vs {want}");
            } else if x > 0.0 {
                let want = 1.0 - upper_tail_cf(x);
                assert!((got - want).abs() < 1e-15, "x={x}");
            } else {
                let want = upper_tail_cf(-x);
                assert!((got - want).abs() < 1e-15, "x={x}");
            }
        }
    }

    #[test]
    fn bivariate_anchors() {
        let orthant = 0.25 + 0.5f64.asin() / (2.0 * PI);
        assert!((orthant - 1.0 / 3.0).abs() < 1e-15);
        assert!((bivariate_normal_cdf(0.0, 0.0, 0.5).unwrap() - orthant).abs() < 1e-14);
        assert!((bivariate_normal_cdf(0.0, 0.0, 0.0).unwrap() - 0.25).abs() < 1e-16);
        for rho in [-0.99, -0.95, -0.5, 0.0, 0.3, 0.8, 0.93, 0.99] {
            for x in [-2.0, -0.3, 0.0, 1.1, 3.0] {
                let v = bivariate_normal_cdf(x, 40.0, rho).unwrap();
                assert!((v - std_normal_cdf(x)).abs() < 1e-14, "rho={rho} x={x}");
            }
        }
        assert!(matches!(
            bivariate_normal_cdf(0.0, 0.0, 1.0),
            Err(Error::InvalidCorrelation(_))
        ));
    }

    #[test]
    fn bivariate_orthant_identity_over_rho() {
        for i in -99..=99 {
            let rho = i as f64 / 100.0;
            let want = 0.25 + rho.asin() / (2.0 * PI);
            let got = bivariate_normal_cdf(0.0, 0.0, rho).unwrap();
            assert!((got - want).abs() < 1e-12, "rho={rho}: {got} vs {want}");
        }
    }

    #[test]
    fn interval_mass() {
        assert!((std_normal_interval(-1.0, 1.0) - 0.682_689_492_137_085_9).abs() < 1e-15);
        assert_eq!(std_normal_interval(1.0, 1.0), 0.0);
        assert!(std_normal_interval(10.0, 11.0) > 0.0);
    }
}
