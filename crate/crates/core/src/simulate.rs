//! Monte Carlo for fixed-coefficient affine SDEs
//!
//! ```text
//! dX = (b0 + b1 X) dt + sqrt(a0 + a1 X⁺) dW
//! ```
//!
//! Random numbers: path `k` (or antithetic pair `k`) draws from a ChaCha8
//! generator seeded with `seed` on stream `k`, so results do not depend on
//! scheduling or thread count. Normals come from the inverse normal CDF of
//! 53-bit uniforms in `(0, 1)`.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::params::CornerParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SimScheme {
    /// Diffusion `sqrt(max(a0 + a1 X, 0))`.
    Euler,
    /// Diffusion `sqrt(a0 + a1 X⁺)`; the drift keeps `X`.
    FullTruncation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub n_paths: usize,
    pub n_steps: usize,
    pub seed: u64,
    pub scheme: SimScheme,
    pub antithetic: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self { n_paths: 100_000, n_steps: 200, seed: 42, scheme: SimScheme::FullTruncation, antithetic: true }
    }
}

impl SimConfig {
    pub fn check(&self) -> Result<()> {
        if self.n_paths < 2 || self.n_steps < 1 {
            return Err(Error::Config(format!(
                "simulation needs n_paths >= 2 and n_steps >= 1, got {} and {}",
                self.n_paths, self.n_steps
            )));
        }
        if self.antithetic && self.n_paths % 2 != 0 {
            return Err(Error::Config(format!("antithetic sampling needs an even path count, got {}", self.n_paths)));
        }
        Ok(())
    }
}

/// Per-path end state, running minimum and trapezoidal `∫ X dt`.
///
/// With antithetic sampling paths `2k` and `2k+1` form pair `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub terminal: Vec<f64>,
    pub discount_integral: Vec<f64>,
    pub minimum: Vec<f64>,
    pub antithetic: bool,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_paths: usize,
    pub discounted: bool,
}

#[derive(Debug, Clone, Copy)]
struct PathState {
    x: f64,
    integral: f64,
    min: f64,
}

impl PathState {
    fn new(x0: f64) -> Self {
        Self { x: x0, integral: 0.0, min: x0 }
    }

    fn step(&mut self, c: &CornerParams, scheme: SimScheme, dt: f64, sqrt_dt: f64, z: f64) {
        let x = self.x;
        let var = match scheme {
            SimScheme::Euler => (c.a0 + c.a1 * x).max(0.0),
            SimScheme::FullTruncation => c.a0 + c.a1 * x.max(0.0),
        };
        let next = x + (c.b0 + c.b1 * x) * dt + var.sqrt() * sqrt_dt * z;
        self.integral += 0.5 * (x + next) * dt;
        self.min = self.min.min(next);
        self.x = next;
    }
}

fn uniform_open(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

fn stream_rng(seed: u64, k: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k);
    rng
}

/// Simulates one path (or antithetic pair) `k`, calling `visit(step, states)` after every step.
fn run_unit<F: FnMut(usize, &[PathState])>(
    corner: &CornerParams,
    x0: f64,
    horizon: f64,
    cfg: &SimConfig,
    k: u64,
    normal: &Normal,
    mut visit: F,
) -> Vec<PathState> {
    let dt = horizon / cfg.n_steps as f64;
    let sqrt_dt = dt.sqrt();
    let mut rng = stream_rng(cfg.seed, k);
    let mut states = vec![PathState::new(x0); if cfg.antithetic { 2 } else { 1 }];
    visit(0, &states);
    for s in 1..=cfg.n_steps {
        let z = normal.inverse_cdf(uniform_open(&mut rng));
        states[0].step(corner, cfg.scheme, dt, sqrt_dt, z);
        if cfg.antithetic {
            states[1].step(corner, cfg.scheme, dt, sqrt_dt, -z);
        }
        visit(s, &states);
    }
    states
}

/// Simulates `cfg.n_paths` paths of the corner law from `x0` up to `horizon`.
pub fn simulate_terminal(corner: &CornerParams, x0: f64, horizon: f64, cfg: &SimConfig) -> Result<SampleSet> {
    cfg.check()?;
    if !(horizon >= 0.0 && horizon.is_finite() && x0.is_finite()) {
        return Err(Error::Config(format!("invalid horizon {horizon} or start {x0}")));
    }
    let mut warnings = Vec::new();
    if corner.a0 == 0.0 && corner.a1 > 0.0 && corner.b0 < 0.5 * corner.a1 {
        warnings.push(format!(
            "Feller condition fails: b0={} < a1/2={}; paths may reach zero",
            corner.b0,
            0.5 * corner.a1
        ));
    }
    let normal = Normal::standard();
    let units = if cfg.antithetic { cfg.n_paths / 2 } else { cfg.n_paths };
    let states: Vec<PathState> = (0..units as u64)
        .into_par_iter()
        .flat_map_iter(|k| run_unit(corner, x0, horizon, cfg, k, &normal, |_, _| {}))
        .collect();
    if let Some(i) = states.iter().position(|s| !s.x.is_finite() || !s.integral.is_finite()) {
        return Err(Error::Numerical(format!("path {i} became non-finite (x={})", states[i].x)));
    }
    Ok(SampleSet {
        terminal: states.iter().map(|s| s.x).collect(),
        discount_integral: states.iter().map(|s| s.integral).collect(),
        minimum: states.iter().map(|s| s.min).collect(),
        antithetic: cfg.antithetic,
        warnings,
    })
}

/// Mean and standard error of `payoff(X_T)`, times `exp(-∫X dt)` when `discounted`.
///
/// Antithetic pairs are averaged first and count as one observation.
pub fn mc_expectation<F: Fn(f64) -> f64>(samples: &SampleSet, payoff: F, discounted: bool) -> McEstimate {
    let value = |i: usize| {
        let v = payoff(samples.terminal[i]);
        if discounted {
            v * (-samples.discount_integral[i]).exp()
        } else {
            v
        }
    };
    let n = samples.terminal.len();
    let obs: Vec<f64> = if samples.antithetic {
        (0..n / 2).map(|k| 0.5 * (value(2 * k) + value(2 * k + 1))).collect()
    } else {
        (0..n).map(value).collect()
    };
    let m = obs.len() as f64;
    let mean = obs.iter().sum::<f64>() / m;
    let var = if obs.len() > 1 { obs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0) } else { 0.0 };
    McEstimate { mean, std_error: (var / m).sqrt(), n_paths: n, discounted }
}

/// Fraction of paths whose running minimum reaches zero or below.
pub fn positivity_fraction(corner: &CornerParams, x0: f64, horizon: f64, cfg: &SimConfig) -> Result<f64> {
    if corner.a0 != 0.0 {
        return Err(Error::Domain(format!("positivity check needs a0 = 0, got {}", corner.a0)));
    }
    if !(x0 > 0.0) {
        return Err(Error::Domain(format!("positivity check needs x0 > 0, got {x0}")));
    }
    let s = simulate_terminal(corner, x0, horizon, cfg)?;
    let hits = s.minimum.iter().filter(|&&m| m <= 0.0).count();
    Ok(hits as f64 / s.minimum.len() as f64)
}

/// Writes `path_id,t,x` rows for the first `n_dump` paths.
pub fn write_paths_csv<W: std::io::Write>(
    corner: &CornerParams,
    x0: f64,
    horizon: f64,
    cfg: &SimConfig,
    n_dump: usize,
    out: W,
) -> Result<()> {
    cfg.check()?;
    let normal = Normal::standard();
    let dt = horizon / cfg.n_steps as f64;
    let per_unit = if cfg.antithetic { 2 } else { 1 };
    let n_dump = n_dump.min(cfg.n_paths);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["path_id", "t", "x"])?;
    let mut k = 0u64;
    while (k as usize) * per_unit < n_dump {
        let mut rows: Vec<Vec<(f64, f64)>> = vec![Vec::new(); per_unit];
        run_unit(corner, x0, horizon, cfg, k, &normal, |s, states| {
            let t = if s == cfg.n_steps { horizon } else { s as f64 * dt };
            for (r, st) in rows.iter_mut().zip(states) {
                r.push((t, st.x));
            }
        });
        for (j, r) in rows.into_iter().enumerate() {
            let id = k as usize * per_unit + j;
            if id >= n_dump {
                break;
            }
            for (t, x) in r {
                w.write_record([id.to_string(), crate::io::fmt_num(t), crate::io::fmt_num(x)])?;
            }
        }
        k += 1;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(n_paths: usize, n_steps: usize) -> SimConfig {
        SimConfig { n_paths, n_steps, ..SimConfig::default() }
    }

    #[test]
    fn deterministic_ode_is_exact() {
        let c = CornerParams::new(0.3, 0.0, 0.0, 0.0);
        let s = simulate_terminal(&c, 0.1, 2.0, &small(100, 7)).unwrap();
        assert!(s.terminal.iter().all(|&x| (x - 0.7).abs() < 1e-14));
        let e = mc_expectation(&s, |_| 1.0, false);
        assert_eq!((e.mean, e.std_error), (1.0, 0.0));
    }

    #[test]
    fn reproducible_and_thread_independent() {
        let c = CornerParams::new(0.15, -0.5, 0.0, 0.2);
        let cfg = small(2000, 50);
        let a = simulate_terminal(&c, 1.0, 1.0, &cfg).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| simulate_terminal(&c, 1.0, 1.0, &cfg).unwrap());
        assert_eq!(a, b);
        let other = simulate_terminal(&c, 1.0, 1.0, &SimConfig { seed: 7, ..cfg }).unwrap();
        assert_ne!(a.terminal, other.terminal);
    }

    #[test]
    fn antithetic_linear_payoff_equals_euler_recursion() {
        let c = CornerParams::new(0.15, -0.5, 0.02, 0.0);
        let cfg = SimConfig { scheme: SimScheme::Euler, ..small(200, 40) };
        let s = simulate_terminal(&c, 0.0, 1.0, &cfg).unwrap();
        let dt = 1.0 / 40.0;
        let mut m = 0.0;
        for _ in 0..40 {
            m += (c.b0 + c.b1 * m) * dt;
        }
        let e = mc_expectation(&s, |x| x, false);
        assert!((e.mean - m).abs() < 1e-14);
        assert!(e.std_error < 1e-14);
    }

    #[test]
    fn weak_error_is_first_order() {
        // Antithetic pairs remove the noise of a linear payoff, leaving the scheme bias.
        let c = CornerParams::new(0.15, -0.5, 0.02, 0.0);
        let exact = 0.3 * (1.0 - (-0.5f64).exp());
        let pts: Vec<(f64, f64)> = [5usize, 10, 20, 40, 80]
            .iter()
            .map(|&n| {
                let cfg = SimConfig { scheme: SimScheme::Euler, ..small(20, n) };
                let e = mc_expectation(&simulate_terminal(&c, 0.0, 1.0, &cfg).unwrap(), |x| x, false);
                ((1.0 / n as f64).ln(), (e.mean - exact).abs().ln())
            })
            .collect();
        let k = pts.len() as f64;
        let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / k, pts.iter().map(|p| p.1).sum::<f64>() / k);
        let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
            / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
        assert!((slope - 1.0).abs() < 0.3, "slope {slope}");
    }

    #[test]
    fn schemes_differ_only_below_zero_with_both_diffusions() {
        let c = CornerParams::new(0.0, 0.0, 0.01, 0.5);
        let mut e = PathState::new(-0.01);
        let mut f = PathState::new(-0.01);
        e.step(&c, SimScheme::Euler, 0.01, 0.1, 1.0);
        f.step(&c, SimScheme::FullTruncation, 0.01, 0.1, 1.0);
        assert!(e.x < f.x);
        let mut e = PathState::new(0.2);
        let mut f = PathState::new(0.2);
        e.step(&c, SimScheme::Euler, 0.01, 0.1, 1.0);
        f.step(&c, SimScheme::FullTruncation, 0.01, 0.1, 1.0);
        assert_eq!(e.x, f.x);
    }

    #[test]
    fn positivity_contrast() {
        let cfg = small(4000, 500);
        let feller = positivity_fraction(&CornerParams::new(0.15, -0.5, 0.0, 0.2), 0.05, 1.0, &cfg).unwrap();
        let violating = positivity_fraction(&CornerParams::new(0.05, -0.5, 0.0, 0.4), 0.05, 1.0, &cfg).unwrap();
        assert!(violating > 0.2, "{violating}");
        assert!(feller < violating);
        let drift_only = positivity_fraction(&CornerParams::new(0.1, 0.0, 0.0, 0.0), 0.05, 1.0, &cfg).unwrap();
        assert_eq!(drift_only, 0.0);
        assert!(positivity_fraction(&CornerParams::new(0.1, 0.0, 0.01, 0.0), 0.05, 1.0, &cfg).is_err());
    }

    #[test]
    fn feller_warning() {
        let s = simulate_terminal(&CornerParams::new(0.05, -0.5, 0.0, 0.4), 0.5, 1.0, &small(10, 5)).unwrap();
        assert_eq!(s.warnings.len(), 1);
    }

    #[test]
    fn config_checks() {
        assert!(small(1, 10).check().is_err());
        assert!(small(3, 10).check().is_err());
        assert!(SimConfig { antithetic: false, ..small(3, 10) }.check().is_ok());
        assert!(small(4, 0).check().is_err());
    }

    #[test]
    fn path_dump_layout() {
        let mut buf = Vec::new();
        let c = CornerParams::new(0.15, -0.5, 0.02, 0.0);
        write_paths_csv(&c, 0.0, 1.0, &small(10, 4), 3, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "path_id,t,x");
        assert_eq!(lines.len(), 1 + 3 * 5);
        assert_eq!(lines[1], "0,0,0");
        assert!(lines.last().unwrap().starts_with("2,1,"));
    }
}
