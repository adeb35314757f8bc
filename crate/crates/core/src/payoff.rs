//! Terminal payoffs `ψ(X_T)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{Curvature, Monotonicity};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PayoffSpec {
    Call { strike: f64 },
    Butterfly { k1: f64, k2: f64, k3: f64 },
    Exponential { u: f64 },
    Constant { c: f64 },
    Identity,
    /// Piecewise-linear through `(x, y)` knots, extended linearly beyond the ends.
    Custom { table: Vec<(f64, f64)> },
}

/// Monotonicity and curvature class, as far as it can be read off the payoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Shape {
    IncreasingConvex,
    DecreasingConvex,
    DecreasingConcave,
    Neither,
}

impl Shape {
    pub fn classes(self) -> Option<(Monotonicity, Curvature)> {
        match self {
            Shape::IncreasingConvex => Some((Monotonicity::Increasing, Curvature::Convex)),
            Shape::DecreasingConvex => Some((Monotonicity::Decreasing, Curvature::Convex)),
            Shape::DecreasingConcave => Some((Monotonicity::Decreasing, Curvature::Concave)),
            Shape::Neither => None,
        }
    }
}

impl PayoffSpec {
    pub fn call(strike: f64) -> Self {
        PayoffSpec::Call { strike }
    }

    pub fn butterfly(k1: f64, k2: f64, k3: f64) -> Result<Self> {
        let p = PayoffSpec::Butterfly { k1, k2, k3 };
        p.check()?;
        Ok(p)
    }

    pub fn custom(table: Vec<(f64, f64)>) -> Result<Self> {
        let p = PayoffSpec::Custom { table };
        p.check()?;
        Ok(p)
    }

    pub fn check(&self) -> Result<()> {
        let finite = |v: f64, what: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("payoff {what} must be finite")))
            }
        };
        match self {
            PayoffSpec::Call { strike } => finite(*strike, "strike"),
            PayoffSpec::Butterfly { k1, k2, k3 } => {
                if k1 < k2 && k2 < k3 {
                    Ok(())
                } else {
                    Err(Error::Config(format!("butterfly strikes must increase, got {k1}, {k2}, {k3}")))
                }
            }
            PayoffSpec::Exponential { u } => finite(*u, "exponent"),
            PayoffSpec::Constant { c } => finite(*c, "constant"),
            PayoffSpec::Identity => Ok(()),
            PayoffSpec::Custom { table } => {
                if table.len() < 2 {
                    return Err(Error::Config("custom payoff needs at least two knots".into()));
                }
                if table.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
                    return Err(Error::Config("custom payoff knots must be finite".into()));
                }
                if table.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(Error::Config("custom payoff knots must be strictly increasing in x".into()));
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            PayoffSpec::Call { strike } => (x - strike).max(0.0),
            PayoffSpec::Butterfly { k1, k2, k3 } => {
                (x - k1).max(0.0) - 2.0 * (x - k2).max(0.0) + (x - k3).max(0.0)
            }
            PayoffSpec::Exponential { u } => (u * x).exp(),
            PayoffSpec::Constant { c } => *c,
            PayoffSpec::Identity => x,
            PayoffSpec::Custom { table } => {
                let i = table.partition_point(|k| k.0 <= x).clamp(1, table.len() - 1) - 1;
                let ((x0, y0), (x1, y1)) = (table[i], table[i + 1]);
                y0 + (y1 - y0) * (x - x0) / (x1 - x0)
            }
        }
    }

    /// Global Lipschitz constant, `None` when unbounded.
    pub fn lipschitz_constant(&self) -> Option<f64> {
        match self {
            PayoffSpec::Call { .. } | PayoffSpec::Identity => Some(1.0),
            // slopes are 0, 1, -1, 0 whatever the strike spacing
            PayoffSpec::Butterfly { .. } => Some(1.0),
            PayoffSpec::Exponential { u } if *u == 0.0 => Some(0.0),
            PayoffSpec::Exponential { .. } => None,
            PayoffSpec::Constant { .. } => Some(0.0),
            PayoffSpec::Custom { table } => Some(
                table
                    .windows(2)
                    .map(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).abs())
                    .fold(0.0, f64::max),
            ),
        }
    }

    /// Lipschitz constant on `[x_min, x_max]`.
    pub fn lipschitz_on(&self, x_min: f64, x_max: f64) -> f64 {
        match self {
            PayoffSpec::Exponential { u } => u.abs() * (u * x_max).exp().max((u * x_min).exp()),
            _ => self.lipschitz_constant().unwrap_or(f64::INFINITY),
        }
    }

    pub fn shape(&self) -> Shape {
        match self {
            PayoffSpec::Call { .. } | PayoffSpec::Identity | PayoffSpec::Constant { .. } => Shape::IncreasingConvex,
            PayoffSpec::Exponential { u } if *u >= 0.0 => Shape::IncreasingConvex,
            PayoffSpec::Exponential { .. } => Shape::DecreasingConvex,
            PayoffSpec::Butterfly { .. } => Shape::Neither,
            PayoffSpec::Custom { table } => {
                let slopes: Vec<f64> = table.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect();
                let increasing = slopes.iter().all(|&s| s >= 0.0);
                let decreasing = slopes.iter().all(|&s| s <= 0.0);
                let convex = slopes.windows(2).all(|w| w[1] >= w[0]);
                let concave = slopes.windows(2).all(|w| w[1] <= w[0]);
                match (increasing, decreasing, convex, concave) {
                    (true, _, true, _) => Shape::IncreasingConvex,
                    (_, true, true, _) => Shape::DecreasingConvex,
                    (_, true, _, true) => Shape::DecreasingConcave,
                    _ => Shape::Neither,
                }
            }
        }
    }

    pub fn is_exponential(&self) -> bool {
        matches!(self, PayoffSpec::Exponential { .. })
    }
}
