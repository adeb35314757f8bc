//! Upper and lower prices, bond curves and the model-risk measure
//! `μ(ψ) = upper(ψ) − lower(ψ)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{CornerParams, Direction, ModelSpec, StateDomain};
use crate::payoff::{PayoffSpec, Shape};
use crate::pdesolver::{self, Diagnostics, Discounting, Grid, GridOptions, SolveConfig, ValueSurface};
use crate::riccati;
use crate::simulate::{self, McEstimate, SimConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Auto,
    Pde,
    Riccati,
    Mc,
}

/// Method that actually produced a bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MethodUsed {
    Riccati,
    #[serde(rename = "PDE")]
    Pde,
    #[serde(rename = "MC")]
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PricingOptions {
    pub grid: GridOptions,
    pub solve: SolveConfig,
    pub sim: SimConfig,
    /// Relative change at the probes below which a widened grid is accepted.
    pub widening_tol: f64,
}

impl Default for PricingOptions {
    fn default() -> Self {
        Self {
            grid: GridOptions::default(),
            solve: SolveConfig::default(),
            sim: SimConfig::default(),
            widening_tol: 1e-3,
        }
    }
}

impl PricingOptions {
    pub fn new() -> Self {
        Self::default()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PricingDiagnostics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<Grid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pde_upper: Option<Diagnostics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pde_lower: Option<Diagnostics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_upper: Option<McEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_lower: Option<McEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corner_upper: Option<CornerParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corner_lower: Option<CornerParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sim: Option<SimConfig>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PricingResult {
    pub x0: f64,
    pub horizon: f64,
    pub upper: f64,
    pub lower: f64,
    pub model_risk: f64,
    pub method_upper: MethodUsed,
    pub method_lower: MethodUsed,
    pub diagnostics: PricingDiagnostics,
}

impl PricingResult {
    fn new(x0: f64, horizon: f64, upper: f64, lower: f64, method: MethodUsed, diagnostics: PricingDiagnostics) -> Self {
        Self {
            x0,
            horizon,
            upper,
            lower,
            model_risk: upper - lower,
            method_upper: method,
            method_lower: method,
            diagnostics,
        }
    }

    pub fn summary_line(&self) -> String {
        format!(
            "upper={} lower={} mu={}",
            crate::io::fmt_num(self.upper),
            crate::io::fmt_num(self.lower),
            crate::io::fmt_num(self.model_risk)
        )
    }
}

fn check_state(model: &ModelSpec, x0: f64) -> Result<()> {
    if !x0.is_finite() || (model.domain == StateDomain::PositiveHalfLine && x0 <= 0.0) {
        return Err(Error::Domain(format!("x0={x0} lies outside the state space {}", model.domain)));
    }
    Ok(())
}

fn check_horizon(horizon: f64) -> Result<()> {
    if horizon >= 0.0 && horizon.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("invalid horizon {horizon}")))
    }
}

fn riccati_applies(model: &ModelSpec, payoff: &PayoffSpec, x0s: &[f64]) -> bool {
    payoff.is_exponential() && x0s.iter().all(|&x| riccati::in_corner_regime(model, x))
}

/// Prices `payoff(X_T)` started at `x0`, without discounting.
pub fn price(
    model: &ModelSpec,
    payoff: &PayoffSpec,
    x0: f64,
    horizon: f64,
    method: Method,
    opts: &PricingOptions,
) -> Result<PricingResult> {
    Ok(price_curve(model, payoff, &[x0], horizon, method, opts)?.remove(0))
}

/// Prices a batch of starting points. The PDE path solves once on a grid covering all of them.
pub fn price_curve(
    model: &ModelSpec,
    payoff: &PayoffSpec,
    x0s: &[f64],
    horizon: f64,
    method: Method,
    opts: &PricingOptions,
) -> Result<Vec<PricingResult>> {
    payoff.check()?;
    check_horizon(horizon)?;
    if x0s.is_empty() {
        return Err(Error::Config("no starting points given".into()));
    }
    for &x in x0s {
        check_state(model, x)?;
    }
    let method = match method {
        Method::Auto if riccati_applies(model, payoff, x0s) => Method::Riccati,
        Method::Auto => Method::Pde,
        m => m,
    };
    match method {
        Method::Riccati => x0s.iter().map(|&x| price_riccati(model, payoff, x, horizon)).collect(),
        Method::Mc => x0s.iter().map(|&x| price_mc(model, payoff, x, horizon, false, opts)).collect(),
        _ => price_pde(model, payoff, x0s, horizon, Discounting::None, opts),
    }
}

fn price_riccati(model: &ModelSpec, payoff: &PayoffSpec, x0: f64, horizon: f64) -> Result<PricingResult> {
    let PayoffSpec::Exponential { u } = *payoff else {
        return Err(Error::Regime("the Riccati method prices exponential payoffs only".into()));
    };
    let upper = riccati::mgf_upper(model, x0, u, horizon)?;
    let lower = riccati::mgf_lower(model, x0, u, horizon)?;
    let mut diag = PricingDiagnostics::default();
    if model.is_forced() {
        diag.warnings.push("forced model: no uniqueness guarantee".into());
    }
    Ok(PricingResult::new(x0, horizon, upper, lower, MethodUsed::Riccati, diag))
}

fn corner_for(model: &ModelSpec, payoff: &PayoffSpec, x0: f64, direction: Direction, discounted: bool) -> CornerParams {
    // A bond (discounted constant) behaves like a decreasing convex payoff of the rate.
    let shape = if discounted { Shape::DecreasingConvex } else { payoff.shape() };
    match shape.classes() {
        Some((m, c)) => model.pbox.corner_for_shape(x0, m, c, direction),
        None => model.pbox.worst_case_corner(x0, direction),
    }
}

fn price_mc(
    model: &ModelSpec,
    payoff: &PayoffSpec,
    x0: f64,
    horizon: f64,
    discounted: bool,
    opts: &PricingOptions,
) -> Result<PricingResult> {
    let mut diag = PricingDiagnostics { sim: Some(opts.sim), ..Default::default() };
    let shape = if discounted { Shape::DecreasingConvex } else { payoff.shape() };
    if shape == Shape::Neither || !riccati::in_corner_regime(model, x0) {
        diag.warnings.push(
            "corner-law Monte Carlo outside a single-corner regime: upper is a feasible-law lower bound for the \
             upper price, lower an upper bound for the lower price"
                .into(),
        );
    }
    let mut est = [None, None];
    for (k, dir) in [Direction::Upper, Direction::Lower].into_iter().enumerate() {
        let corner = corner_for(model, payoff, x0, dir, discounted);
        let s = simulate::simulate_terminal(&corner, x0, horizon, &opts.sim)?;
        diag.warnings.extend(s.warnings.iter().cloned());
        est[k] = Some((corner, simulate::mc_expectation(&s, |x| payoff.eval(x), discounted)));
    }
    let (cu, eu) = est[0].unwrap();
    let (cl, el) = est[1].unwrap();
    diag.corner_upper = Some(cu);
    diag.corner_lower = Some(cl);
    diag.mc_upper = Some(eu);
    diag.mc_lower = Some(el);
    diag.warnings.dedup();
    Ok(PricingResult::new(x0, horizon, eu.mean, el.mean, MethodUsed::Mc, diag))
}

/// Upper and lower surfaces on one grid.
pub fn solve_pair(
    model: &ModelSpec,
    payoff: &PayoffSpec,
    grid: &Grid,
    discounting: Discounting,
    opts: &PricingOptions,
) -> Result<(ValueSurface, ValueSurface)> {
    let cfg = opts.solve.with_discounting(discounting);
    let f = |x: f64| payoff.eval(x);
    let (up, lo) = rayon::join(
        || pdesolver::solve(model, f, grid, &cfg.with_direction(Direction::Upper)),
        || pdesolver::solve(model, f, grid, &cfg.with_direction(Direction::Lower)),
    );
    Ok((up?, lo?))
}

fn widened(grid: &Grid, model: &ModelSpec) -> Result<Grid> {
    let dx = grid.dx();
    let extra = ((0.5 * (grid.x_max - grid.x_min) / dx).ceil() as usize).max(1);
    let x_min = if model.domain == StateDomain::PositiveHalfLine { grid.x_min } else { grid.x_min - extra as f64 * dx };
    let n_x = grid.n_x + extra + if model.domain == StateDomain::PositiveHalfLine { 0 } else { extra };
    Grid::new(x_min, x_min + (n_x - 1) as f64 * dx, n_x, grid.horizon, grid.n_t)
}

fn price_pde(
    model: &ModelSpec,
    payoff: &PayoffSpec,
    x0s: &[f64],
    horizon: f64,
    discounting: Discounting,
    opts: &PricingOptions,
) -> Result<Vec<PricingResult>> {
    let lo = x0s.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = x0s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let grid = pdesolver::auto_grid(model, lo, hi, horizon, &opts.grid)?;
    price_pde_on(model, payoff, x0s, grid, discounting, opts)
}

/// PDE prices on a caller-supplied grid, so several boxes can share one discretization.
pub fn price_curve_on_grid(
    model: &ModelSpec,
    payoff: &PayoffSpec,
    x0s: &[f64],
    grid: &Grid,
    opts: &PricingOptions,
) -> Result<Vec<PricingResult>> {
    payoff.check()?;
    for &x in x0s {
        check_state(model, x)?;
    }
    price_pde_on(model, payoff, x0s, *grid, Discounting::None, opts)
}

fn price_pde_on(
    model: &ModelSpec,
    payoff: &PayoffSpec,
    x0s: &[f64],
    mut grid: Grid,
    discounting: Discounting,
    opts: &PricingOptions,
) -> Result<Vec<PricingResult>> {
    let horizon = grid.horizon;
    let (mut up, mut down) = solve_pair(model, payoff, &grid, discounting, opts)?;
    let mut warnings = Vec::new();
    if payoff.is_exponential() && horizon > 0.0 {
        // exponential payoffs feel the truncation; widen once and compare at the probes
        let wide = widened(&grid, model)?;
        let (wu, wd) = solve_pair(model, payoff, &wide, discounting, opts)?;
        let mut change = 0.0f64;
        for &x in x0s {
            for (a, b) in [(&up, &wu), (&down, &wd)] {
                let (va, vb) = (a.read_value(0.0, x)?, b.read_value(0.0, x)?);
                change = change.max((va - vb).abs() / vb.abs().max(f64::MIN_POSITIVE));
            }
        }
        if change >= opts.widening_tol {
            warnings.push(format!(
                "exponential payoff: widening the grid still moved the price by {:.3e} (relative)",
                change
            ));
        }
        grid = wide;
        up = wu;
        down = wd;
    }
    if model.is_forced() {
        warnings.push("forced model: no uniqueness guarantee".into());
    }
    x0s.iter()
        .map(|&x| {
            let u = up.read_value(0.0, x)?;
            let l = down.read_value(0.0, x)?;
            let diag = PricingDiagnostics {
                grid: Some(grid),
                pde_upper: Some(up.diagnostics.clone()),
                pde_lower: Some(down.diagnostics.clone()),
                warnings: warnings.clone(),
                ..Default::default()
            };
            Ok(PricingResult::new(x, horizon, u, l, MethodUsed::Pde, diag))
        })
        .collect()
}

/// `μ = upper − lower` for the same method on both sides.
pub fn model_risk(model: &ModelSpec, payoff: &PayoffSpec, x0: f64, horizon: f64, opts: &PricingOptions) -> Result<f64> {
    Ok(price(model, payoff, x0, horizon, Method::Auto, opts)?.model_risk)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BondPoint {
    pub maturity: f64,
    pub p_upper: f64,
    pub p_lower: f64,
    pub method: MethodUsed,
}

/// Upper and lower zero-coupon bond prices `E[exp(-∫_0^T X dt)]` per maturity.
///
/// The PDE path solves the term-structure equation once up to the longest
/// maturity and reads the shorter ones off the same surface.
pub fn bond_curve(
    model: &ModelSpec,
    x0: f64,
    maturities: &[f64],
    method: Method,
    opts: &PricingOptions,
) -> Result<Vec<BondPoint>> {
    check_state(model, x0)?;
    for &t in maturities {
        check_horizon(t)?;
    }
    let t_max = maturities.iter().copied().fold(0.0, f64::max);
    let method = match method {
        Method::Auto if riccati::in_corner_regime(model, x0) => Method::Riccati,
        Method::Auto => Method::Pde,
        m => m,
    };
    match method {
        Method::Riccati => maturities
            .iter()
            .map(|&t| {
                Ok(BondPoint {
                    maturity: t,
                    p_upper: riccati::bond_bound(model, x0, t, Direction::Upper)?,
                    p_lower: riccati::bond_bound(model, x0, t, Direction::Lower)?,
                    method: MethodUsed::Riccati,
                })
            })
            .collect(),
        Method::Mc => maturities
            .iter()
            .map(|&t| {
                let r = price_mc(model, &PayoffSpec::Constant { c: 1.0 }, x0, t, true, opts)?;
                Ok(BondPoint { maturity: t, p_upper: r.upper, p_lower: r.lower, method: MethodUsed::Mc })
            })
            .collect(),
        _ => {
            if t_max == 0.0 {
                return Ok(maturities
                    .iter()
                    .map(|&t| BondPoint { maturity: t, p_upper: 1.0, p_lower: 1.0, method: MethodUsed::Pde })
                    .collect());
            }
            let mut gopts = opts.grid;
            gopts.n_t = gopts.n_t.max((100.0 * t_max).ceil() as usize);
            let grid = pdesolver::auto_grid(model, x0, x0, t_max, &gopts)?;
            let (up, down) = solve_pair(model, &PayoffSpec::Constant { c: 1.0 }, &grid, Discounting::StateRate, opts)?;
            maturities
                .iter()
                .map(|&t| {
                    Ok(BondPoint {
                        maturity: t,
                        p_upper: up.value_at_maturity(t, x0)?,
                        p_lower: down.value_at_maturity(t, x0)?,
                        method: MethodUsed::Pde,
                    })
                })
                .collect()
        }
    }
}

/// Upper and lower bond prices for one maturity.
pub fn bond_price(model: &ModelSpec, x0: f64, maturity: f64, method: Method, opts: &PricingOptions) -> Result<PricingResult> {
    if method == Method::Mc {
        return price_mc(model, &PayoffSpec::Constant { c: 1.0 }, x0, maturity, true, opts);
    }
    let p = bond_curve(model, x0, &[maturity], method, opts)?[0];
    Ok(PricingResult::new(x0, maturity, p.p_upper, p.p_lower, p.method, PricingDiagnostics::default()))
}
