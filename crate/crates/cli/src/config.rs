//! TOML run configuration merged with command-line overrides.

use std::path::Path;

use quantile_hedge::{MarketModel, MarketParams, Payoff, PayoffKind, QuadratureSpec, SolverSpec};
use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PayoffSection {
    pub kind: Option<PayoffKind>,
    pub strike: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McSettings {
    pub n: usize,
    pub seed: u64,
}

impl Default for McSettings {
    fn default() -> Self {
        Self { n: 1_000_000, seed: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySettings {
    /// Monte Carlo comparisons accept `|value − mean| ≤ sigmas·SE + est_error`.
    pub sigmas: f64,
    /// Bound on `|Φ₁(Φ₂(α)) − (1 − α)|`.
    pub duality_tol: f64,
}

impl Default for VerifySettings {
    fn default() -> Self {
        Self { sigmas: 4.0, duality_tol: 1e-6 }
    }
}

/// Contents of a config file. Every section and field is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub market: MarketParams,
    pub payoff: PayoffSection,
    pub quadrature: QuadratureSpec,
    pub solver: SolverSpec,
    pub mc: McSettings,
    pub verify: VerifySettings,
}

impl FileConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Input(format!("invalid config: {e}")))
    }
}

/// Overrides taken from command-line flags.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub payoff: Option<PayoffKind>,
    pub strike: Option<f64>,
    pub seed: Option<u64>,
    pub mc_n: Option<usize>,
}

/// Fully resolved inputs of one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: MarketModel,
    pub payoff: Payoff,
    pub solver: SolverSpec,
    pub mc: McSettings,
    pub verify: VerifySettings,
}

impl RunConfig {
    pub fn resolve(file: FileConfig, overrides: &Overrides) -> CliResult<Self> {
        let model = MarketModel::new(file.market)?;
        let kind = overrides.payoff.or(file.payoff.kind).unwrap_or(PayoffKind::Digital);
        let strike = match overrides.strike.or(file.payoff.strike) {
            Some(k) => k,
            None => default_strike(&file.market, kind)?,
        };
        let payoff = Payoff::new(kind, strike)?;
        file.quadrature.validate()?;
        let mut solver = file.solver;
        solver.quadrature = file.quadrature;
        let mut mc = file.mc;
        if let Some(n) = overrides.mc_n {
            mc.n = n;
        }
        if let Some(seed) = overrides.seed {
            mc.seed = seed;
        }
        if mc.n == 0 {
            return Err(CliError::Input("Monte Carlo sample size must be at least 1".into()));
        }
        let verify = file.verify;
        if !(verify.sigmas > 0.0) || !(verify.duality_tol > 0.0) {
            return Err(CliError::Input("verify sigmas and duality_tol must be positive".into()));
        }
        Ok(Self { model, payoff, solver, mc, verify })
    }

    pub fn quadrature(&self) -> &QuadratureSpec {
        &self.solver.quadrature
    }
}

/// At-the-money strike in the units of each claim. A spread has none.
fn default_strike(m: &MarketParams, kind: PayoffKind) -> CliResult<f64> {
    match kind {
        PayoffKind::Digital | PayoffKind::QuantoDomestic | PayoffKind::Outperformance => Ok(m.s0_1),
        PayoffKind::QuantoForeign => Ok(m.s0_1 * m.s0_2),
        PayoffKind::Spread => Err(CliError::Input(
            "spread payoff needs an explicit strike (--strike or [payoff] strike)".into(),
        )),
    }
}

/// Checks that a grid is nonempty, finite and strictly increasing.
pub fn check_grid(name: &str, grid: &[f64]) -> CliResult<()> {
    if grid.is_empty() {
        return Err(CliError::Input(format!("{name} is empty")));
    }
    if let Some(v) = grid.iter().find(|v| !v.is_finite()) {
        return Err(CliError::Input(format!("{name} contains non-finite value {v}")));
    }
    if let Some(w) = grid.windows(2).find(|w| w[1] <= w[0]) {
        return Err(CliError::Input(format!(
            "{name} must be strictly increasing, found {} then {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_baseline_defaults() {
        let run = RunConfig::resolve(FileConfig::parse("").unwrap(), &Overrides::default()).unwrap();
        assert_eq!(*run.model.params(), MarketParams::baseline());
        assert_eq!(run.payoff, Payoff::new(PayoffKind::Digital, 100.0).unwrap());
        assert_eq!(run.solver, SolverSpec::default());
        assert_eq!(run.mc, McSettings::default());
    }

    #[test]
    fn partial_sections_keep_other_defaults() {
        let text = "[market]\nrho = -0.2\n[payoff]\nkind = \"spread\"\nstrike = 3.0\n[quadrature]\nabs_tol = 1e-10\n[mc]\nseed = 9\n";
        let run = RunConfig::resolve(FileConfig::parse(text).unwrap(), &Overrides::default()).unwrap();
        assert_eq!(run.model.params().rho, -0.2);
        assert_eq!(run.model.params().sigma_1, MarketParams::baseline().sigma_1);
        assert_eq!(run.payoff.kind, PayoffKind::Spread);
        assert_eq!(run.quadrature().abs_tol, 1e-10);
        assert_eq!(run.quadrature().trunc_sigmas, QuadratureSpec::default().trunc_sigmas);
        assert_eq!((run.mc.seed, run.mc.n), (9, McSettings::default().n));
    }

    #[test]
    fn flags_override_the_file() {
        let file = FileConfig::parse("[payoff]\nkind = \"digital\"\nstrike = 50.0\n[mc]\nn = 10\n").unwrap();
        let o = Overrides {
            payoff: Some(PayoffKind::QuantoForeign),
            strike: None,
            seed: Some(3),
            mc_n: Some(20),
        };
        let run = RunConfig::resolve(file, &o).unwrap();
        assert_eq!(run.payoff.kind, PayoffKind::QuantoForeign);
        assert_eq!(run.payoff.strike, 50.0);
        assert_eq!((run.mc.n, run.mc.seed), (20, 3));
    }

    #[test]
    fn bad_inputs_are_rejected() {
        assert!(FileConfig::parse("[market]\nsigma1 = 0.2\n").is_err());
        assert!(FileConfig::parse("[payoff]\nkind = \"call\"\n").is_err());
        let spread = FileConfig::parse("[payoff]\nkind = \"spread\"\n").unwrap();
        assert!(RunConfig::resolve(spread, &Overrides::default()).is_err());
        let zero = Overrides {
            mc_n: Some(0),
            ..Overrides::default()
        };
        assert!(RunConfig::resolve(FileConfig::default(), &zero).is_err());
        let corr = FileConfig::parse("[market]\nrho = 1.0\n").unwrap();
        assert!(RunConfig::resolve(corr, &Overrides::default()).is_err());
    }

    #[test]
    fn grids_must_increase() {
        assert!(check_grid("g", &[0.0, 0.5, 1.0]).is_ok());
        assert!(check_grid("g", &[]).is_err());
        assert!(check_grid("g", &[0.5, 0.5]).is_err());
        assert!(check_grid("g", &[1.0, f64::NAN]).is_err());
    }
}
