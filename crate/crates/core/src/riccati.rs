//! Riccati equations for exponential-affine transforms of a fixed corner law.
//!
//! For a corner `(b0, b1, a0, a1)` the pair `(φ, ψ)` solves
//!
//! ```text
//! φ' = ½ a0 ψ² + b0 ψ,          φ(0) = 0
//! ψ' = ½ a1 ψ² + b1 ψ - c,      ψ(0) = u
//! ```
//!
//! with `c = 0` for moment generating functions (`E[e^{u X_t}]`) and `c = 1`
//! for zero-coupon bonds (`E[e^{-∫X}]`). The transform is `exp(φ + ψ x)`.
//!
//! When the parameter box collapses to a single worst-case law (fixed-slope
//! Vasiček on ℝ, or CIR on ℝ>0) the upper and lower expectations of
//! monotone convex payoffs are these transforms evaluated at the right corner.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{CornerParams, Curvature, Direction, ModelSpec, Monotonicity};

/// Absolute cap on `|ψ|` before the solution is declared exploded.
pub const DEFAULT_BLOWUP_CAP: f64 = 1e8;

/// Below this magnitude a coefficient counts as zero in the closed-form branches.
const ZERO_COEF: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RiccatiMode {
    Mgf,
    Bond,
}

impl RiccatiMode {
    fn forcing(self) -> f64 {
        match self {
            RiccatiMode::Mgf => 0.0,
            RiccatiMode::Bond => 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RiccatiSolution {
    pub t_grid: Vec<f64>,
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
    pub mode: RiccatiMode,
    pub corner: CornerParams,
    pub u0: f64,
}

impl RiccatiSolution {
    pub fn phi_end(&self) -> f64 {
        *self.phi.last().expect("non-empty grid")
    }

    pub fn psi_end(&self) -> f64 {
        *self.psi.last().expect("non-empty grid")
    }

    /// `exp(φ(T) + ψ(T) x)`.
    pub fn transform(&self, x: f64) -> f64 {
        (self.phi_end() + self.psi_end() * x).exp()
    }
}

/// `max(200, 200·T)` steps.
pub fn default_steps(horizon: f64) -> usize {
    (200.0 * horizon).ceil().max(200.0) as usize
}

/// Classical fourth-order Runge–Kutta on the augmented state `(φ, ψ)`.
pub fn solve_riccati(
    corner: &CornerParams,
    u: f64,
    horizon: f64,
    n_steps: usize,
    mode: RiccatiMode,
) -> Result<RiccatiSolution> {
    solve_riccati_with_cap(corner, u, horizon, n_steps, mode, DEFAULT_BLOWUP_CAP)
}

pub fn solve_riccati_with_cap(
    corner: &CornerParams,
    u: f64,
    horizon: f64,
    n_steps: usize,
    mode: RiccatiMode,
    cap: f64,
) -> Result<RiccatiSolution> {
    if n_steps == 0 {
        return Err(Error::Config("Riccati solver needs at least one step".into()));
    }
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(Error::Config(format!("invalid horizon {horizon}")));
    }
    let c = mode.forcing();
    let rhs = |psi: f64| -> (f64, f64) {
        (
            0.5 * corner.a0 * psi * psi + corner.b0 * psi,
            0.5 * corner.a1 * psi * psi + corner.b1 * psi - c,
        )
    };
    let h = horizon / n_steps as f64;
    let mut t_grid = Vec::with_capacity(n_steps + 1);
    let mut phi = Vec::with_capacity(n_steps + 1);
    let mut psi = Vec::with_capacity(n_steps + 1);
    let (mut f, mut g) = (0.0, u);
    t_grid.push(0.0);
    phi.push(f);
    psi.push(g);
    for k in 0..n_steps {
        let (k1f, k1g) = rhs(g);
        let (k2f, k2g) = rhs(g + 0.5 * h * k1g);
        let (k3f, k3g) = rhs(g + 0.5 * h * k2g);
        let (k4f, k4g) = rhs(g + h * k3g);
        f += h / 6.0 * (k1f + 2.0 * k2f + 2.0 * k3f + k4f);
        g += h / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g);
        let t = (k + 1) as f64 * h;
        if !g.is_finite() || !f.is_finite() || g.abs() > cap {
            return Err(Error::BlowUp { t });
        }
        t_grid.push(t);
        phi.push(f);
        psi.push(g);
    }
    Ok(RiccatiSolution { t_grid, phi, psi, mode, corner: *corner, u0: u })
}

/// `g_n(z) = Σ_{j≥0} z^j / (j+n)!`, i.e. `(e^z - Σ_{j<n} z^j/j!) / z^n`.
///
/// Evaluated by series near zero so that `expm1`-type quotients stay exact.
fn g_n(n: u32, z: f64) -> f64 {
    if z.abs() < 2.0 {
        let mut fact = 1.0;
        for k in 2..=n {
            fact *= k as f64;
        }
        let mut term = 1.0 / fact;
        let mut sum = term;
        for j in 1..60 {
            term *= z / (j + n) as f64;
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        let mut g = z.exp();
        let mut fact = 1.0;
        for k in 1..=n {
            g = (g - 1.0 / fact) / z;
            fact *= k as f64;
        }
        g
    }
}

/// Closed form for a corner with `a1 = 0` (Ornstein–Uhlenbeck).
///
/// Mgf mode: `ψ = u e^{b1 t}`, `φ = b0 u (e^{b1 t}-1)/b1 + a0 u² (e^{2 b1 t}-1)/(4 b1)`.
/// Bond mode: the classical Vasiček coefficients for `ψ(0) = u`.
/// Both are written through `g_n` and are continuous at `b1 = 0`.
pub fn vasicek_closed_form(corner: &CornerParams, u: f64, t: f64, mode: RiccatiMode) -> Result<(f64, f64)> {
    if corner.a1 != 0.0 {
        return Err(Error::Domain(format!("Vasiček closed form needs a1 = 0, got {}", corner.a1)));
    }
    let (b0, b1, a0) = (corner.b0, corner.b1, corner.a0);
    let z = b1 * t;
    match mode {
        RiccatiMode::Mgf => {
            let psi = u * z.exp();
            let int_psi = u * t * g_n(1, z);
            let int_psi2 = u * u * t * g_n(1, 2.0 * z);
            Ok((b0 * int_psi + 0.5 * a0 * int_psi2, psi))
        }
        RiccatiMode::Bond => {
            // ψ(s) = u e^{b1 s} - s g1(b1 s)
            let psi = u * z.exp() - t * g_n(1, z);
            let int_e = t * g_n(1, z);
            let int_e2 = t * g_n(1, 2.0 * z);
            let int_g = t * t * g_n(2, z);
            let int_eg = t * t * (2.0 * g_n(2, 2.0 * z) - g_n(2, z));
            let int_gg = t * t * t * (4.0 * g_n(3, 2.0 * z) - 2.0 * g_n(3, z));
            let int_psi = u * int_e - int_g;
            let int_psi2 = u * u * int_e2 - 2.0 * u * int_eg + int_gg;
            Ok((b0 * int_psi + 0.5 * a0 * int_psi2, psi))
        }
    }
}

/// Classical CIR bond coefficients, `γ = sqrt(b1² + 2 a1)`.
///
/// Falls back to the `a1 = 0` Vasiček form when `a1` is below `1e-8`.
pub fn cir_bond_closed_form(corner: &CornerParams, t: f64) -> Result<(f64, f64)> {
    if corner.a0 != 0.0 || corner.a1 < 0.0 || corner.b0 <= 0.0 {
        return Err(Error::Domain(format!(
            "CIR bond closed form needs a0 = 0, a1 > 0, b0 > 0 (got a0={}, a1={}, b0={})",
            corner.a0, corner.a1, corner.b0
        )));
    }
    if corner.a1 < ZERO_COEF {
        let flat = CornerParams { a1: 0.0, ..*corner };
        return vasicek_closed_form(&flat, 0.0, t, RiccatiMode::Bond);
    }
    let (b0, b1, a1) = (corner.b0, corner.b1, corner.a1);
    let gamma = (b1 * b1 + 2.0 * a1).sqrt();
    let em1 = (gamma * t).exp_m1();
    let denom = gamma * (em1 + 2.0) - b1 * em1;
    let psi = -2.0 * em1 / denom;
    let log_ratio = (2.0 * gamma).ln() + 0.5 * (gamma - b1) * t - denom.ln();
    let phi = 2.0 * b0 / a1 * log_ratio;
    Ok((phi, psi))
}

/// `(φ, ψ)` at time `t` for a corner, using a closed form where one exists.
pub fn affine_coefficients(corner: &CornerParams, u: f64, t: f64, mode: RiccatiMode) -> Result<(f64, f64)> {
    if corner.a1 == 0.0 {
        return vasicek_closed_form(corner, u, t, mode);
    }
    if mode == RiccatiMode::Bond && corner.a0 == 0.0 && u == 0.0 && corner.b0 > 0.0 {
        return cir_bond_closed_form(corner, t);
    }
    let sol = solve_riccati(corner, u, t, default_steps(t), mode)?;
    Ok((sol.phi_end(), sol.psi_end()))
}

/// Whether the box reduces to one worst-case law for monotone convex payoffs at `x0`.
pub fn in_corner_regime(model: &ModelSpec, x0: f64) -> bool {
    model.is_fixed_slope_vasicek() || (model.is_positive_cir() && x0 > 0.0)
}

fn require_regime(model: &ModelSpec, x0: f64) -> Result<()> {
    if in_corner_regime(model, x0) {
        Ok(())
    } else {
        Err(Error::Regime(
            "closed form needs a fixed-slope Vasiček model on R or a Feller CIR model on R+ with x0 > 0; \
             use the PDE solver"
                .into(),
        ))
    }
}

/// Upper or lower bound of `E[e^{u X_t}]` started at `x0`.
///
/// `u ≥ 0` is an increasing convex payoff; `u < 0` a decreasing convex one,
/// which takes the drift from the opposite side of the box.
pub fn mgf_bound(model: &ModelSpec, x0: f64, u: f64, t: f64, direction: Direction) -> Result<f64> {
    require_regime(model, x0)?;
    let monotone = if u >= 0.0 { Monotonicity::Increasing } else { Monotonicity::Decreasing };
    let corner = model.pbox.corner_for_shape(x0, monotone, Curvature::Convex, direction);
    let (phi, psi) = affine_coefficients(&corner, u, t, RiccatiMode::Mgf)?;
    Ok((phi + psi * x0).exp())
}

/// `sup E[e^{u X_t}]` over all admissible laws.
pub fn mgf_upper(model: &ModelSpec, x0: f64, u: f64, t: f64) -> Result<f64> {
    mgf_bound(model, x0, u, t, Direction::Upper)
}

pub fn mgf_lower(model: &ModelSpec, x0: f64, u: f64, t: f64) -> Result<f64> {
    mgf_bound(model, x0, u, t, Direction::Lower)
}

/// Upper or lower zero-coupon bond price `E[e^{-∫_0^t X_s ds}]`.
///
/// The bond price is decreasing and convex in the short rate, so the upper
/// price uses the low drift with the high diffusion, and the lower price the
/// reverse.
pub fn bond_bound(model: &ModelSpec, x0: f64, t: f64, direction: Direction) -> Result<f64> {
    require_regime(model, x0)?;
    let corner = model.pbox.corner_for_shape(x0, Monotonicity::Decreasing, Curvature::Convex, direction);
    let (phi, psi) = affine_coefficients(&corner, 0.0, t, RiccatiMode::Bond)?;
    Ok((phi + psi * x0).exp())
}
