//! Gaussian vectors of dimension one or two, their linear images and
//! conditional laws.

use crate::error::{Error, Result};

/// A normal law `N(mean, cov)` in one or two dimensions.
///
/// Degenerate covariances (zero determinant) are allowed; [`GaussianVec::is_degenerate`]
/// flags them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianVec {
    dim: usize,
    mean: [f64; 2],
    cov: [[f64; 2]; 2],
}

impl GaussianVec {
    pub fn univariate(mean: f64, variance: f64) -> Result<Self> {
        if !(variance >= 0.0) || !mean.is_finite() || !variance.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "univariate law needs finite mean and variance >= 0, got ({mean}, {variance})"
            )));
        }
        Ok(Self {
            dim: 1,
            mean: [mean, 0.0],
            cov: [[variance, 0.0], [0.0, 0.0]],
        })
    }

    pub fn bivariate(mean: [f64; 2], cov: [[f64; 2]; 2]) -> Result<Self> {
        let symmetric = (cov[0][1] - cov[1][0]).abs() <= 1e-12 * (cov[0][0] + cov[1][1]).max(1.0);
        let det = cov[0][0] * cov[1][1] - cov[0][1] * cov[1][0];
        let tol = 1e-12 * (cov[0][0] * cov[1][1]).max(f64::MIN_POSITIVE);
        if !symmetric || cov[0][0] < 0.0 || cov[1][1] < 0.0 || det < -tol {
            return Err(Error::InvalidParameter(format!(
                "covariance {cov:?} is not symmetric positive semidefinite"
            )));
        }
        Ok(Self { dim: 2, mean, cov })
    }

    /// Law of the terminal Brownian vector `W_T ~ N(0, T·[[1, ρ], [ρ, 1]])`.
    pub fn brownian(maturity: f64, rho: f64) -> Self {
        Self {
            dim: 2,
            mean: [0.0, 0.0],
            cov: [[maturity, rho * maturity], [rho * maturity, maturity]],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean[..self.dim]
    }

    pub fn cov(&self, i: usize, j: usize) -> f64 {
        self.cov[i][j]
    }

    pub fn variance(&self, i: usize) -> f64 {
        self.cov[i][i]
    }

    pub fn sd(&self, i: usize) -> f64 {
        self.cov[i][i].sqrt()
    }

    pub fn is_degenerate(&self) -> bool {
        match self.dim {
            1 => self.cov[0][0] == 0.0,
            _ => {
                let det = self.cov[0][0] * self.cov[1][1] - self.cov[0][1] * self.cov[1][0];
                det <= 1e-14 * self.cov[0][0] * self.cov[1][1]
            }
        }
    }

    /// Marginal law of coordinate `i`.
    pub fn marginal(&self, i: usize) -> GaussianVec {
        GaussianVec {
            dim: 1,
            mean: [self.mean[i], 0.0],
            cov: [[self.cov[i][i], 0.0], [0.0, 0.0]],
        }
    }
}

/// Law of `AX` for a `k × d` matrix `A` (k, d ∈ {1, 2}): `N(Am, AΣAᵀ)`.
pub fn linear_law(matrix: &[Vec<f64>], input: &GaussianVec) -> Result<GaussianVec> {
    let k = matrix.len();
    if k == 0 || k > 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: k,
        });
    }
    let d = input.dim;
    if let Some(row) = matrix.iter().find(|row| row.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            actual: row.len(),
        });
    }
    let mut mean = [0.0; 2];
    let mut cov = [[0.0; 2]; 2];
    for i in 0..k {
        mean[i] = (0..d).map(|a| matrix[i][a] * input.mean[a]).sum();
        for j in 0..k {
            let mut s = 0.0;
            for a in 0..d {
                for b in 0..d {
                    s += matrix[i][a] * input.cov[a][b] * matrix[j][b];
                }
            }
            cov[i][j] = s;
        }
    }
    // Exact symmetry regardless of summation order.
    if k == 2 {
        let off = 0.5 * (cov[0][1] + cov[1][0]);
        cov[0][1] = off;
        cov[1][0] = off;
    }
    Ok(GaussianVec { dim: k, mean, cov })
}

/// Which coordinate of a bivariate law is conditioned on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionIndex {
    First,
    Second,
}

/// Conditional law of one coordinate given the other:
/// `N(intercept + slope·y, variance)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalLaw {
    pub cond_mean_intercept: f64,
    pub cond_mean_slope: f64,
    pub cond_var: f64,
}

impl ConditionalLaw {
    pub fn mean_at(&self, y: f64) -> f64 {
        self.cond_mean_intercept + self.cond_mean_slope * y
    }

    pub fn sd(&self) -> f64 {
        self.cond_var.sqrt()
    }

    /// The law at a given conditioning value.
    pub fn at(&self, y: f64) -> GaussianVec {
        GaussianVec {
            dim: 1,
            mean: [self.mean_at(y), 0.0],
            cov: [[self.cond_var, 0.0], [0.0, 0.0]],
        }
    }
}

/// Conditional law of the free coordinate of `joint` given the coordinate
/// `condition_on`.
pub fn conditional_law(joint: &GaussianVec, condition_on: ConditionIndex) -> Result<ConditionalLaw> {
    if joint.dim != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: joint.dim,
        });
    }
    let (free, given) = match condition_on {
        ConditionIndex::First => (1, 0),
        ConditionIndex::Second => (0, 1),
    };
    let s22 = joint.cov[given][given];
    if !(s22 > 0.0) {
        return Err(Error::DegenerateConditioning);
    }
    let s12 = joint.cov[free][given];
    let slope = s12 / s22;
    let var = joint.cov[free][free] - s12 * s12 / s22;
    // Cancellation can push an exactly singular law slightly negative.
    let var_floor = 1e-13 * joint.cov[free][free].abs();
    let cond_var = if var <= var_floor { 0.0 } else { var };
    Ok(ConditionalLaw {
        cond_mean_intercept: joint.mean[free] - slope * joint.mean[given],
        cond_mean_slope: slope,
        cond_var,
    })
}
