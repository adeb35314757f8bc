//! Monotone finite differences for the non-linear Kolmogorov equation
//!
//! ```text
//! -∂t v - G(x, ∂x v, ∂xx v) + r(x) v = 0,    v(T, ·) = ψ
//! ```
//!
//! with `r ≡ 0` (upper/lower expectations) or `r(x) = x` (term-structure
//! equation, discounting at the short rate). The lower direction replaces the
//! supremum by the infimum over the box.
//!
//! Drift is upwinded per candidate drift value: for a fixed drift `β` the term
//! `β⁺ D⁺v - β⁻ D⁻v` is monotone, and since it is piecewise linear in `β` its
//! extremum over the drift interval sits at an endpoint or at `β = 0`. The
//! diffusion term is linear in the diffusion value, so its extremum is an
//! endpoint. The discrete Hamiltonian is therefore exact over the box and
//! monotone, which is what the convergence theory for viscosity solutions
//! asks for.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{Direction, ModelSpec, ParameterBox, StateDomain};

/// Largest number of explicit sub-steps a single solve may take.
pub const MAX_TIME_STEPS: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub n_x: usize,
    pub horizon: f64,
    pub n_t: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_x: usize, horizon: f64, n_t: usize) -> Result<Self> {
        let g = Self { x_min, x_max, n_x, horizon, n_t };
        g.check()?;
        Ok(g)
    }

    pub fn check(&self) -> Result<()> {
        if !(self.x_min < self.x_max) || !self.x_min.is_finite() || !self.x_max.is_finite() {
            return Err(Error::Config(format!("grid needs x_min < x_max, got [{}, {}]", self.x_min, self.x_max)));
        }
        if self.n_x < 3 {
            return Err(Error::Config(format!("grid needs n_x >= 3, got {}", self.n_x)));
        }
        if self.n_t < 1 {
            return Err(Error::Config("grid needs n_t >= 1".into()));
        }
        if !(self.horizon >= 0.0 && self.horizon.is_finite()) {
            return Err(Error::Config(format!("invalid horizon {}", self.horizon)));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_x - 1) as f64
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.n_t as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        if j == self.n_x - 1 {
            self.x_max
        } else {
            self.x_min + j as f64 * self.dx()
        }
    }

    pub fn t(&self, n: usize) -> f64 {
        if n == self.n_t {
            self.horizon
        } else {
            n as f64 * self.dt()
        }
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n_x).map(|j| self.x(j)).collect()
    }

    /// Shifts the grid (keeping its spacing) so that `x = 0` is a node when
    /// it lies inside. The `x⁺` kink of the diffusion bounds then sits exactly
    /// on a node.
    pub fn snapped_to_zero(mut self) -> Self {
        if self.x_min < 0.0 && self.x_max > 0.0 {
            let dx = self.dx();
            let k = (self.x_min / dx).round();
            self.x_min = k * dx;
            self.x_max = self.x_min + (self.n_x - 1) as f64 * dx;
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    ExplicitMonotone,
    ImplicitPolicyIteration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Discounting {
    None,
    /// Discount at the short rate `x`.
    StateRate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Boundary {
    /// Second derivative pinned to zero at the two extreme nodes, first
    /// derivative one-sided.
    LinearExtrapolation,
    /// Values held fixed at the two extreme nodes.
    Dirichlet { left: f64, right: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub scheme: Scheme,
    pub direction: Direction,
    pub discounting: Discounting,
    pub boundary: Boundary,
    pub cfl_safety: f64,
    pub policy_tol: f64,
    pub policy_max_iter: usize,
    /// Explicit sub-steps per grid time step. `None` picks the fewest that
    /// satisfy the stability limit; a fixed count lets nested boxes share
    /// one time discretization.
    pub substeps: Option<u64>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::ExplicitMonotone,
            direction: Direction::Upper,
            discounting: Discounting::None,
            boundary: Boundary::LinearExtrapolation,
            cfl_safety: 0.9,
            policy_tol: 1e-10,
            policy_max_iter: 50,
            substeps: None,
        }
    }
}

impl SolveConfig {
    pub fn upper() -> Self {
        Self::default()
    }

    pub fn lower() -> Self {
        Self { direction: Direction::Lower, ..Self::default() }
    }

    pub fn with_direction(self, direction: Direction) -> Self {
        Self { direction, ..self }
    }

    pub fn with_discounting(self, discounting: Discounting) -> Self {
        Self { discounting, ..self }
    }

    pub fn with_scheme(self, scheme: Scheme) -> Self {
        Self { scheme, ..self }
    }

    fn check(&self) -> Result<()> {
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(Error::Config(format!("cfl_safety must lie in (0, 1], got {}", self.cfl_safety)));
        }
        if !(self.policy_tol > 0.0) || self.policy_max_iter == 0 {
            return Err(Error::Config("policy tolerances must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub scheme: Option<Scheme>,
    /// Time step actually used by the marching.
    pub dt_effective: f64,
    /// `dt_effective` over the explicit stability limit (≤ cfl_safety for the explicit scheme).
    pub cfl_ratio: f64,
    pub substeps: u64,
    pub policy_iterations: usize,
    pub max_policy_iterations_per_step: usize,
    /// `max |v| / (1 + |x|)` over the surface.
    pub linear_growth_bound: f64,
    pub warnings: Vec<String>,
}

/// Value function on a time–space grid.
///
/// `values[n][j]` is `v(t_n, x_j)` with `t_n` measured forward from 0; row
/// `n_t` is the terminal payoff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueSurface {
    pub grid: Grid,
    pub values: Vec<Vec<f64>>,
    pub diagnostics: Diagnostics,
}

impl ValueSurface {
    /// Bilinear interpolation in `(t, x)`.
    pub fn read_value(&self, t: f64, x: f64) -> Result<f64> {
        let g = &self.grid;
        let eps = 1e-12 * (1.0 + g.x_max.abs().max(g.x_min.abs()));
        if !(x >= g.x_min - eps && x <= g.x_max + eps && t >= -1e-12 && t <= g.horizon + 1e-12) {
            return Err(Error::OutOfGrid { t, x });
        }
        let (j, wx) = locate((x - g.x_min) / g.dx(), g.n_x);
        let (n, wt) = if g.horizon == 0.0 { (0, 0.0) } else { locate(t / g.dt(), g.n_t + 1) };
        let row = |n: usize| {
            let r = &self.values[n];
            if wx == 0.0 {
                r[j]
            } else {
                (1.0 - wx) * r[j] + wx * r[j + 1]
            }
        };
        Ok(if wt == 0.0 { row(n) } else { (1.0 - wt) * row(n) + wt * row(n + 1) })
    }

    /// Term-structure view: `F(τ, x)` with `τ` the time to maturity.
    pub fn value_at_maturity(&self, tau: f64, x: f64) -> Result<f64> {
        self.read_value(self.grid.horizon - tau, x)
    }

    /// Row at `t = 0`.
    pub fn initial_row(&self) -> &[f64] {
        &self.values[0]
    }

    /// Writes `t,x,value` rows, time-outer.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "x", "value"])?;
        for (n, row) in self.values.iter().enumerate() {
            let t = crate::io::fmt_num(self.grid.t(n));
            for (j, v) in row.iter().enumerate() {
                w.write_record([t.as_str(), &crate::io::fmt_num(self.grid.x(j)), &crate::io::fmt_num(*v)])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Index of the cell containing `pos` (in node units) and the weight of its
/// right node. Exact nodes get weight zero.
fn locate(pos: f64, n_nodes: usize) -> (usize, f64) {
    let pos = pos.clamp(0.0, (n_nodes - 1) as f64);
    let nearest = pos.round();
    if (pos - nearest).abs() < 1e-9 {
        return (nearest as usize, 0.0);
    }
    let j = (pos.floor() as usize).min(n_nodes - 2);
    (j, pos - j as f64)
}

/// Per-node coefficient bounds, precomputed once per solve.
struct NodeCoefs {
    drift: Vec<[f64; 2]>,
    diffusion: Vec<[f64; 2]>,
    rate: Vec<f64>,
}

impl NodeCoefs {
    fn new(pbox: &ParameterBox, xs: &[f64], discounting: Discounting) -> Self {
        let drift = xs
            .iter()
            .map(|&x| {
                let d = pbox.drift_interval(x);
                [d.lo, d.hi]
            })
            .collect();
        let diffusion = xs
            .iter()
            .map(|&x| {
                let a = pbox.diffusion_interval(x);
                [a.lo, a.hi]
            })
            .collect();
        let rate = xs
            .iter()
            .map(|&x| match discounting {
                Discounting::None => 0.0,
                Discounting::StateRate => x,
            })
            .collect();
        Self { drift, diffusion, rate }
    }

    /// Drift candidates at node `j`: both endpoints, and zero when it lies inside.
    fn drift_candidates(&self, j: usize) -> ([f64; 3], usize) {
        let [lo, hi] = self.drift[j];
        if lo < 0.0 && hi > 0.0 {
            ([lo, hi, 0.0], 3)
        } else {
            ([lo, hi, 0.0], 2)
        }
    }
}

/// One node's choice of drift and diffusion value.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Control {
    beta: f64,
    alpha: f64,
}

fn better(direction: Direction, cand: f64, best: f64) -> bool {
    match direction {
        Direction::Upper => cand > best,
        Direction::Lower => cand < best,
    }
}

/// Optimal upwinded drift term and diffusion term at an interior node.
fn interior_control(coefs: &NodeCoefs, j: usize, pf: f64, pb: f64, q: f64, direction: Direction) -> (Control, f64) {
    let (cands, n) = coefs.drift_candidates(j);
    let upwind = |b: f64| if b >= 0.0 { b * pf } else { b * pb };
    let mut beta = cands[1];
    let mut best = upwind(beta);
    for &b in &cands[..n] {
        let v = upwind(b);
        if better(direction, v, best) {
            best = v;
            beta = b;
        }
    }
    let [alo, ahi] = coefs.diffusion[j];
    let (alpha, dterm) = {
        let (vlo, vhi) = (0.5 * alo * q, 0.5 * ahi * q);
        if better(direction, vlo, vhi) {
            (alo, vlo)
        } else {
            (ahi, vhi)
        }
    };
    (Control { beta, alpha }, best + dterm)
}

/// Boundary node: one-sided first derivative `p`, no second derivative.
fn boundary_control(coefs: &NodeCoefs, j: usize, p: f64, direction: Direction) -> (Control, f64) {
    let [lo, hi] = coefs.drift[j];
    let (vlo, vhi) = (lo * p, hi * p);
    let alpha = coefs.diffusion[j][1];
    if better(direction, vlo, vhi) {
        (Control { beta: lo, alpha }, vlo)
    } else {
        (Control { beta: hi, alpha }, vhi)
    }
}

/// Explicit stability limit `min_j dx² / (a_hi(x_j) + dx |b|_max(x_j))`.
fn explicit_dt_limit(pbox: &ParameterBox, xs: &[f64], dx: f64, discounting: Discounting) -> f64 {
    let mut lim = f64::INFINITY;
    for &x in xs {
        let denom = pbox.diffusion_interval(x).hi + dx * pbox.max_abs_drift(x);
        if denom > 0.0 {
            lim = lim.min(dx * dx / denom);
        }
        if discounting == Discounting::StateRate && x < 0.0 {
            // keeps 1 + dt·x bounded away from zero in the implicit reaction term
            lim = lim.min(0.5 / -x);
        }
    }
    lim
}

fn stable_substeps(grid: &Grid, dt_limit: f64, safety: f64) -> u64 {
    let dt_target = safety * dt_limit;
    if dt_target.is_finite() {
        (grid.dt() / dt_target).ceil().max(1.0) as u64
    } else {
        1
    }
}

/// Sub-steps per grid time step the explicit scheme picks for this model.
pub fn explicit_substeps(model: &ModelSpec, grid: &Grid, cfg: &SolveConfig) -> u64 {
    let limit = explicit_dt_limit(&model.pbox, &grid.xs(), grid.dx(), cfg.discounting);
    stable_substeps(grid, limit, cfg.cfl_safety)
}

/// Solves backward from `v(T, ·) = payoff` and returns the whole surface.
pub fn solve<F: Fn(f64) -> f64>(model: &ModelSpec, payoff: F, grid: &Grid, cfg: &SolveConfig) -> Result<ValueSurface> {
    grid.check()?;
    cfg.check()?;
    if model.domain == StateDomain::PositiveHalfLine && grid.x_min < 0.0 {
        return Err(Error::Config(format!("grid starts at {} on the positive half-line", grid.x_min)));
    }
    let xs = grid.xs();
    let terminal: Vec<f64> = xs.iter().map(|&x| payoff(x)).collect();
    if terminal.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("payoff is not finite on the grid".into()));
    }
    let mut diagnostics = Diagnostics { scheme: Some(cfg.scheme), ..Default::default() };
    if model.is_forced() {
        diagnostics.warnings.push("no uniqueness guarantee: model accepted with force flag".into());
    }
    let coefs = NodeCoefs::new(&model.pbox, &xs, cfg.discounting);
    let dx = grid.dx();
    let mut values = vec![Vec::new(); grid.n_t + 1];
    values[grid.n_t] = terminal;

    if grid.horizon > 0.0 {
        let dt_limit = explicit_dt_limit(&model.pbox, &xs, dx, cfg.discounting);
        match cfg.scheme {
            Scheme::ExplicitMonotone => {
                let sub = match cfg.substeps {
                    Some(k) => {
                        if k == 0 || grid.dt() / k as f64 > dt_limit {
                            return Err(Error::Config(format!("{k} sub-steps violate the stability limit")));
                        }
                        k
                    }
                    None => stable_substeps(grid, dt_limit, cfg.cfl_safety),
                };
                let total = sub.saturating_mul(grid.n_t as u64);
                if total > MAX_TIME_STEPS {
                    return Err(Error::CflViolation { steps: total, limit: MAX_TIME_STEPS });
                }
                let h = grid.dt() / sub as f64;
                diagnostics.dt_effective = h;
                diagnostics.cfl_ratio = if dt_limit.is_finite() { h / dt_limit } else { 0.0 };
                diagnostics.substeps = total;
                let mut cur = values[grid.n_t].clone();
                let mut next = vec![0.0; grid.n_x];
                for n in (0..grid.n_t).rev() {
                    for _ in 0..sub {
                        explicit_step(&coefs, &cur, &mut next, dx, h, cfg);
                        std::mem::swap(&mut cur, &mut next);
                    }
                    if cur.iter().any(|v| !v.is_finite()) {
                        return Err(Error::Numerical(format!("non-finite value at t={}", grid.t(n))));
                    }
                    values[n] = cur.clone();
                }
            }
            Scheme::ImplicitPolicyIteration => {
                let h = grid.dt();
                diagnostics.dt_effective = h;
                diagnostics.cfl_ratio = if dt_limit.is_finite() { h / dt_limit } else { 0.0 };
                diagnostics.substeps = grid.n_t as u64;
                let mut cur = values[grid.n_t].clone();
                for n in (0..grid.n_t).rev() {
                    let (next, iters) = implicit_step(&coefs, &cur, dx, h, cfg, grid.t(n))?;
                    diagnostics.policy_iterations += iters;
                    diagnostics.max_policy_iterations_per_step = diagnostics.max_policy_iterations_per_step.max(iters);
                    cur = next;
                    values[n] = cur.clone();
                }
            }
        }
    } else {
        for n in 0..grid.n_t {
            values[n] = values[grid.n_t].clone();
        }
    }

    diagnostics.linear_growth_bound = values
        .iter()
        .flat_map(|row| row.iter().zip(&xs).map(|(v, x)| v.abs() / (1.0 + x.abs())))
        .fold(0.0, f64::max);
    Ok(ValueSurface { grid: *grid, values, diagnostics })
}

fn explicit_step(coefs: &NodeCoefs, cur: &[f64], next: &mut [f64], dx: f64, h: f64, cfg: &SolveConfig) {
    let n = cur.len();
    let inv_dx = 1.0 / dx;
    let inv_dx2 = inv_dx * inv_dx;
    for j in 1..n - 1 {
        let pf = (cur[j + 1] - cur[j]) * inv_dx;
        let pb = (cur[j] - cur[j - 1]) * inv_dx;
        let q = (cur[j + 1] - 2.0 * cur[j] + cur[j - 1]) * inv_dx2;
        let (_, ham) = interior_control(coefs, j, pf, pb, q, cfg.direction);
        next[j] = (cur[j] + h * ham) / (1.0 + h * coefs.rate[j]);
    }
    match cfg.boundary {
        Boundary::LinearExtrapolation => {
            let (_, hl) = boundary_control(coefs, 0, (cur[1] - cur[0]) * inv_dx, cfg.direction);
            next[0] = (cur[0] + h * hl) / (1.0 + h * coefs.rate[0]);
            let (_, hr) = boundary_control(coefs, n - 1, (cur[n - 1] - cur[n - 2]) * inv_dx, cfg.direction);
            next[n - 1] = (cur[n - 1] + h * hr) / (1.0 + h * coefs.rate[n - 1]);
        }
        Boundary::Dirichlet { left, right } => {
            next[0] = left;
            next[n - 1] = right;
        }
    }
}

/// Tridiagonal rows `lower[j] v[j-1] + diag[j] v[j] + upper[j] v[j+1] = rhs[j]`.
fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for j in 1..n {
        let m = diag[j] - lower[j] * c[j - 1];
        c[j] = if j + 1 < n { upper[j] / m } else { 0.0 };
        d[j] = (rhs[j] - lower[j] * d[j - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for j in (0..n - 1).rev() {
        x[j] = d[j] - c[j] * x[j + 1];
    }
    x
}

/// Fully implicit step with Howard policy iteration on the node-wise controls.
fn implicit_step(
    coefs: &NodeCoefs,
    prev: &[f64],
    dx: f64,
    h: f64,
    cfg: &SolveConfig,
    t: f64,
) -> Result<(Vec<f64>, usize)> {
    let n = prev.len();
    let inv_dx = 1.0 / dx;
    let inv_dx2 = inv_dx * inv_dx;
    let policy_of = |v: &[f64]| -> Vec<Control> {
        (0..n)
            .map(|j| {
                if j == 0 {
                    boundary_control(coefs, 0, (v[1] - v[0]) * inv_dx, cfg.direction).0
                } else if j == n - 1 {
                    boundary_control(coefs, j, (v[j] - v[j - 1]) * inv_dx, cfg.direction).0
                } else {
                    let pf = (v[j + 1] - v[j]) * inv_dx;
                    let pb = (v[j] - v[j - 1]) * inv_dx;
                    let q = (v[j + 1] - 2.0 * v[j] + v[j - 1]) * inv_dx2;
                    interior_control(coefs, j, pf, pb, q, cfg.direction).0
                }
            })
            .collect()
    };
    let mut policy = policy_of(prev);
    let mut v = prev.to_vec();
    for iter in 1..=cfg.policy_max_iter {
        let mut lower = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        for j in 0..n {
            let Control { beta, alpha } = policy[j];
            let reaction = 1.0 + h * coefs.rate[j];
            if j == 0 || j == n - 1 {
                match cfg.boundary {
                    Boundary::Dirichlet { .. } => diag[j] = 1.0,
                    Boundary::LinearExtrapolation => {
                        let w = h * beta * inv_dx;
                        diag[j] = reaction;
                        if j == 0 {
                            diag[j] += w;
                            upper[j] = -w;
                        } else {
                            diag[j] -= w;
                            lower[j] = w;
                        }
                    }
                }
                continue;
            }
            let up = h * (beta.max(0.0) * inv_dx + 0.5 * alpha * inv_dx2);
            let dn = h * ((-beta).max(0.0) * inv_dx + 0.5 * alpha * inv_dx2);
            lower[j] = -dn;
            upper[j] = -up;
            diag[j] = reaction + up + dn;
        }
        let mut rhs = prev.to_vec();
        if let Boundary::Dirichlet { left, right } = cfg.boundary {
            rhs[0] = left;
            rhs[n - 1] = right;
        }
        let new_v = thomas(&lower, &diag, &upper, &rhs);
        if new_v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numerical(format!("implicit solve produced non-finite values at t={t}")));
        }
        let change = new_v.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        v = new_v;
        let new_policy = policy_of(&v);
        let scale = 1.0 + v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if new_policy == policy || change <= cfg.policy_tol * scale {
            return Ok((v, iter));
        }
        policy = new_policy;
    }
    Err(Error::PolicyDivergence { iterations: cfg.policy_max_iter, t })
}

/// Builds a grid around the probe range `[lo, hi]`.
///
/// The half-width is six effective standard deviations `sqrt(T · max a)` plus
/// the largest drift displacement over the probe range; the diffusion maximum
/// is re-evaluated once over the widened range.
pub fn auto_grid(model: &ModelSpec, probe_lo: f64, probe_hi: f64, horizon: f64, opts: &GridOptions) -> Result<Grid> {
    if !(probe_lo <= probe_hi) {
        return Err(Error::Config(format!("empty probe range [{probe_lo}, {probe_hi}]")));
    }
    let pbox = &model.pbox;
    let drift_shift = horizon * pbox.max_abs_drift(probe_lo).max(pbox.max_abs_drift(probe_hi));
    let sigma = |lo: f64, hi: f64| {
        let a = pbox.diffusion_interval(lo).hi.max(pbox.diffusion_interval(hi).hi);
        (horizon * a).sqrt()
    };
    let mut half = opts.width_sigmas * sigma(probe_lo, probe_hi) + drift_shift;
    half = opts.width_sigmas * sigma(probe_lo - half, probe_hi + half) + drift_shift;
    half = half.max(opts.min_margin);
    let mut x_min = probe_lo - half;
    let x_max = probe_hi + half;
    if model.domain == StateDomain::PositiveHalfLine {
        x_min = 1e-4 * x_max;
        if probe_lo < x_min {
            return Err(Error::Config(format!("probe {probe_lo} lies below the positive grid start {x_min}")));
        }
    }
    let n_x = (((x_max - x_min) / opts.dx_target).ceil() as usize + 1).clamp(opts.min_nodes, opts.max_nodes);
    let grid = Grid::new(x_min, x_max, n_x, horizon, opts.n_t.max(1))?;
    Ok(if model.domain == StateDomain::RealLine { grid.snapped_to_zero() } else { grid })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridOptions {
    pub dx_target: f64,
    pub min_nodes: usize,
    pub max_nodes: usize,
    pub n_t: usize,
    pub width_sigmas: f64,
    pub min_margin: f64,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self { dx_target: 0.0025, min_nodes: 201, max_nodes: 1601, n_t: 100, width_sigmas: 6.0, min_margin: 0.5 }
    }
}
