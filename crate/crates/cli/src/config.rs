//! Run configuration: one JSON document per invocation, unknown keys rejected.

use std::path::{Path, PathBuf};

use nlaffine::params::{ModelSpec, ParameterBox, StateDomain};
use nlaffine::payoff::PayoffSpec;
use nlaffine::pdesolver::{GridOptions, Scheme};
use nlaffine::pricing::{Method, PricingOptions};
use nlaffine::simulate::SimConfig;
use nlaffine::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: Option<ModelConfig>,
    pub payoff: Option<PayoffSpec>,
    pub x0: Option<f64>,
    pub x0_grid: Option<RangeSpec>,
    pub horizon: Option<f64>,
    pub maturities: Option<Vec<f64>>,
    #[serde(default)]
    pub method: Method,
    #[serde(default)]
    pub grid: GridOptions,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default)]
    pub sim: SimConfig,
    #[serde(default)]
    pub output: OutputConfig,
    pub seed: Option<u64>,
    pub riccati: Option<RiccatiRequest>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub b0_lo: f64,
    pub b0_hi: f64,
    pub b1_lo: f64,
    pub b1_hi: f64,
    pub a0_lo: f64,
    pub a0_hi: f64,
    pub a1_lo: f64,
    pub a1_hi: f64,
    pub domain: StateDomain,
    #[serde(default)]
    pub force: bool,
    /// Swap reversed endpoints with a warning instead of rejecting them.
    #[serde(default)]
    pub sort_endpoints: bool,
}

impl ModelConfig {
    pub fn pbox(&self) -> ParameterBox {
        ParameterBox {
            b0_lo: self.b0_lo,
            b0_hi: self.b0_hi,
            b1_lo: self.b1_lo,
            b1_hi: self.b1_hi,
            a0_lo: self.a0_lo,
            a0_hi: self.a0_hi,
            a1_lo: self.a1_lo,
            a1_hi: self.a1_hi,
        }
    }

    /// Checked box plus endpoint-sort warnings.
    pub fn checked_box(&self) -> Result<(ParameterBox, Vec<String>)> {
        let pbox = self.pbox();
        match pbox.check() {
            Ok(()) => Ok((pbox, Vec::new())),
            Err(Error::InvalidInterval(_)) if self.sort_endpoints => pbox.sorted(),
            Err(e) => Err(e),
        }
    }

    pub fn model(&self, force: bool) -> Result<(ModelSpec, Vec<String>)> {
        let (pbox, warnings) = self.checked_box()?;
        Ok((ModelSpec::with_force(pbox, self.domain, self.force || force)?, warnings))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub from: f64,
    pub to: f64,
    pub step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverOptions {
    pub scheme: Scheme,
    pub cfl_safety: f64,
    pub policy_tol: f64,
    pub policy_max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        let d = nlaffine::pdesolver::SolveConfig::default();
        Self { scheme: d.scheme, cfl_safety: d.cfl_safety, policy_tol: d.policy_tol, policy_max_iter: d.policy_max_iter }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
    /// Where to write the upper value surface (`t,x,value`) of a PDE price.
    pub surface: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RiccatiKind {
    Mgf,
    Bond,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiccatiRequest {
    pub b0: f64,
    pub b1: f64,
    pub a0: f64,
    pub a1: f64,
    #[serde(default)]
    pub u: f64,
    pub horizon: f64,
    pub mode: RiccatiKind,
    pub steps: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid config: {e}")))
    }

    pub fn require_model(&self) -> Result<&ModelConfig> {
        self.model.as_ref().ok_or_else(|| Error::Config("config has no `model` section".into()))
    }

    pub fn require_payoff(&self) -> Result<&PayoffSpec> {
        self.payoff.as_ref().ok_or_else(|| Error::Config("config has no `payoff`".into()))
    }

    pub fn horizon(&self) -> Result<f64> {
        self.horizon.ok_or_else(|| Error::Config("config has no `horizon`".into()))
    }

    /// Starting points from `x0` or `x0_grid` (exactly one of them).
    pub fn starting_points(&self) -> Result<Vec<f64>> {
        match (self.x0, self.x0_grid) {
            (Some(x), None) => Ok(vec![x]),
            (None, Some(g)) => {
                if !(g.step > 0.0 && g.to >= g.from) {
                    return Err(Error::Config(format!("invalid x0_grid {g:?}")));
                }
                Ok(nlaffine::figures::x0_grid(g.from, g.to, g.step))
            }
            (Some(_), Some(_)) => Err(Error::Config("give either `x0` or `x0_grid`, not both".into())),
            (None, None) => Err(Error::Config("config needs `x0` or `x0_grid`".into())),
        }
    }

    pub fn pricing_options(&self, seed: Option<u64>) -> PricingOptions {
        let mut o = PricingOptions { grid: self.grid, sim: self.sim, ..PricingOptions::default() };
        o.solve.scheme = self.solver.scheme;
        o.solve.cfl_safety = self.solver.cfl_safety;
        o.solve.policy_tol = self.solver.policy_tol;
        o.solve.policy_max_iter = self.solver.policy_max_iter;
        if let Some(s) = seed.or(self.seed) {
            o.sim.seed = s;
        }
        o
    }
}
