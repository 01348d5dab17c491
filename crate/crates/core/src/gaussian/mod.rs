//! Normal distribution functions, Gaussian linear algebra and quadrature.

mod law;
mod normal;
mod quadrature;

pub use law::{conditional_law, linear_law, ConditionIndex, ConditionalLaw, GaussianVec};
pub use normal::{bivariate_normal_cdf, std_normal_cdf, std_normal_interval, std_normal_pdf};
pub use quadrature::{
    integrate_gauss_weighted, integrate_gauss_weighted_on, integrate_nested, integrate_panels,
    Quadrature, QuadratureSpec,
};
