//! Built-in experiments: parameter tables, payoffs and the datasets behind
//! the three published plots.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{CornerParams, ModelSpec, ParameterBox, StateDomain};
use crate::payoff::PayoffSpec;
use crate::pricing::{self, Method, PricingOptions, PricingResult};
use crate::riccati::{self, RiccatiMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FigureName {
    #[serde(rename = "fig1")]
    Fig1,
    #[serde(rename = "fig2")]
    Fig2,
    #[serde(rename = "fig3-call")]
    Fig3Call,
    #[serde(rename = "fig3-butterfly")]
    Fig3Butterfly,
}

impl FigureName {
    pub const ALL: [FigureName; 4] = [FigureName::Fig1, FigureName::Fig2, FigureName::Fig3Call, FigureName::Fig3Butterfly];

    pub fn as_str(self) -> &'static str {
        match self {
            FigureName::Fig1 => "fig1",
            FigureName::Fig2 => "fig2",
            FigureName::Fig3Call => "fig3-call",
            FigureName::Fig3Butterfly => "fig3-butterfly",
        }
    }
}

impl fmt::Display for FigureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FigureName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown figure {s:?}; expected fig1, fig2, fig3-call or fig3-butterfly")))
    }
}

/// Horizon used by every figure.
pub const HORIZON: f64 = 1.0;

/// `lo, lo + step, ..., hi` without accumulated rounding.
pub fn x0_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|i| ((lo + i as f64 * step) * 1e9).round() / 1e9).collect()
}

/// Non-linear Vasiček box with an uncertain drift slope. Only the upper
/// drift level and diffusion are tabulated, so the lower ones equal them.
pub fn fig1_box() -> ParameterBox {
    ParameterBox { b0_lo: 0.15, b0_hi: 0.15, b1_lo: -3.0, b1_hi: -0.5, a0_lo: 0.02, a0_hi: 0.02, a1_lo: 0.0, a1_hi: 0.0 }
}

/// Vasiček–CIR box; both diffusion coefficients uncertain on ℝ.
pub fn fig2_box() -> ParameterBox {
    ParameterBox { b0_lo: 0.05, b0_hi: 0.15, b1_lo: -1.0, b1_hi: -0.5, a0_lo: 0.0, a0_hi: 0.08, a1_lo: 0.0, a1_hi: 0.2 }
}

/// Tabulated non-linear Vasiček parameters as printed: `(a0 columns, slope columns, b0 columns)`,
/// each ordered (upper, middle, lower).
pub const FIG3_TABLE: [[f64; 3]; 3] = [[0.0003, 0.003, 0.017], [0.00, -0.06, -0.11], [0.026, 0.023, 0.019]];

/// The Vasiček box of the model-risk study, with the diffusion endpoints
/// sorted. The middle table column is the slope `b1` (`a1 ≡ 0` in this model).
pub fn fig3_box() -> (ParameterBox, Vec<String>) {
    let [a0, b1, b0] = FIG3_TABLE;
    let raw = ParameterBox { b0_lo: b0[2], b0_hi: b0[0], b1_lo: b1[2], b1_hi: b1[0], a0_lo: a0[2], a0_hi: a0[0], a1_lo: 0.0, a1_hi: 0.0 };
    raw.sorted().expect("table endpoints are finite")
}

/// The no-uncertainty model of the model-risk study (middle table column).
pub fn fig3_reference() -> CornerParams {
    let [a0, b1, b0] = FIG3_TABLE;
    CornerParams::new(b0[1], b1[1], a0[1], 0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureDataset {
    pub name: FigureName,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Parameter choices and warnings needed to reproduce the rows.
    pub metadata: Vec<String>,
}

impl FigureDataset {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let header: Vec<&str> = self.columns.iter().map(String::as_str).collect();
        crate::io::write_table(out, &header, &self.rows)
    }
}

/// Upper curve of a sub-box on ℝ, on the grid of the enclosing experiment.
///
/// The sub-box also reuses the enclosing box's time step, so the discrete
/// solutions inherit the ordering of the boxes exactly.
fn upper_curve(
    pbox: ParameterBox,
    payoff: &PayoffSpec,
    xs: &[f64],
    outer: &PricingResult,
    opts: &PricingOptions,
) -> Result<Vec<f64>> {
    let m = ModelSpec::with_force(pbox, StateDomain::RealLine, true)?;
    let grid = outer.diagnostics.grid.expect("PDE results carry their grid");
    let substeps = outer.diagnostics.pde_upper.as_ref().map(|d| d.substeps / grid.n_t as u64);
    let mut o = *opts;
    o.solve.substeps = substeps;
    Ok(pricing::price_curve_on_grid(&m, payoff, xs, &grid, &o)?.iter().map(|r| r.upper).collect())
}


pub fn generate(name: FigureName, opts: &PricingOptions) -> Result<FigureDataset> {
    match name {
        FigureName::Fig1 => fig1(opts),
        FigureName::Fig2 => fig2(opts),
        FigureName::Fig3Call => fig3(name, PayoffSpec::call(0.1), opts),
        FigureName::Fig3Butterfly => fig3(name, PayoffSpec::butterfly(-0.2, 0.3, 0.8)?, opts),
    }
}

fn fig1(opts: &PricingOptions) -> Result<FigureDataset> {
    let pbox = fig1_box();
    let model = ModelSpec::new(pbox, StateDomain::RealLine)?;
    let xs = x0_grid(-1.0, 1.0, 0.05);
    let payoff = PayoffSpec::Exponential { u: 1.0 };
    let priced = pricing::price_curve(&model, &payoff, &xs, HORIZON, Method::Pde, opts)?;
    let steep = CornerParams::new(pbox.b0_hi, pbox.b1_lo, pbox.a0_hi, 0.0);
    let flat = CornerParams::new(pbox.b0_hi, pbox.b1_hi, pbox.a0_hi, 0.0);
    let mgf = |c: &CornerParams, x: f64| -> Result<f64> {
        let (phi, psi) = riccati::vasicek_closed_form(c, 1.0, HORIZON, RiccatiMode::Mgf)?;
        Ok((phi + psi * x).exp())
    };
    let mut rows = Vec::with_capacity(xs.len());
    for (x, r) in xs.iter().zip(&priced) {
        let (s, f) = (mgf(&steep, *x)?, mgf(&flat, *x)?);
        let reference = if *x < 0.0 { s } else { f };
        rows.push(vec![*x, r.upper, r.lower, reference, s, f]);
    }
    let mut metadata = vec![
        "payoff: exp(x); horizon 1".to_string(),
        "box: b0=[0.15,0.15] b1=[-3,-0.5] a0=[0.02,0.02] a1=[0,0]; b0_lo and a0_lo are not tabulated and set to the upper values".to_string(),
        "reference_model: Vasicek (0.15, -3, 0.02) for x0<0 and (0.15, -0.5, 0.02) for x0>=0".to_string(),
    ];
    metadata.extend(priced[0].diagnostics.warnings.iter().cloned());
    Ok(FigureDataset {
        name: FigureName::Fig1,
        columns: cols(&["x0", "upper", "lower", "reference_model", "vasicek_b1_lo", "vasicek_b1_hi"]),
        rows,
        metadata,
    })
}

fn fig2(opts: &PricingOptions) -> Result<FigureDataset> {
    let pbox = fig2_box();
    let model = ModelSpec::with_force(pbox, StateDomain::RealLine, true)?;
    let xs = x0_grid(-0.5, 1.5, 0.05);
    let payoff = PayoffSpec::call(0.5);
    let priced = pricing::price_curve(&model, &payoff, &xs, HORIZON, Method::Pde, opts)?;
    let vasicek = upper_curve(ParameterBox { a1_hi: 0.0, ..pbox }, &payoff, &xs, &priced[0], opts)?;
    let cir = upper_curve(ParameterBox { a0_hi: 0.0, ..pbox }, &payoff, &xs, &priced[0], opts)?;
    let centre = CornerParams::new(
        0.5 * (pbox.b0_lo + pbox.b0_hi),
        0.5 * (pbox.b1_lo + pbox.b1_hi),
        0.5 * (pbox.a0_lo + pbox.a0_hi),
        0.5 * (pbox.a1_lo + pbox.a1_hi),
    );
    let reference = upper_curve(centre.as_box(), &payoff, &xs, &priced[0], opts)?;
    let rows = (0..xs.len())
        .map(|i| vec![xs[i], priced[i].upper, priced[i].lower, reference[i], vasicek[i], cir[i]])
        .collect();
    Ok(FigureDataset {
        name: FigureName::Fig2,
        columns: cols(&["x0", "upper", "lower", "reference_model", "vasicek_upper", "cir_upper"]),
        rows,
        metadata: vec![
            "payoff: call, strike 0.5; horizon 1; undiscounted".into(),
            "box: b0=[0.05,0.15] b1=[-1,-0.5] a0=[0,0.08] a1=[0,0.2] on R, forced (a0_lo=0)".into(),
            "vasicek_upper sets a1_hi=0; cir_upper sets a0_hi=0".into(),
            "reference_model: box centre (0.1, -0.75, 0.04, 0.1)".into(),
        ],
    })
}

fn fig3(name: FigureName, payoff: PayoffSpec, opts: &PricingOptions) -> Result<FigureDataset> {
    let (pbox, warnings) = fig3_box();
    let model = ModelSpec::new(pbox, StateDomain::RealLine)?;
    let xs = x0_grid(-0.5, 1.5, 0.05);
    let priced = pricing::price_curve(&model, &payoff, &xs, HORIZON, Method::Pde, opts)?;
    let reference = upper_curve(fig3_reference().as_box(), &payoff, &xs, &priced[0], opts)?;
    let rows = (0..xs.len())
        .map(|i| vec![xs[i], priced[i].upper, priced[i].lower, reference[i], priced[i].model_risk])
        .collect();
    let mut metadata = vec![
        format!("payoff: {}; horizon 1", serde_json::to_string(&payoff)?),
        "box: b0=[0.019,0.026] b1=[-0.11,0] a0=[0.0003,0.017] a1=[0,0]; the middle table block is the drift slope b1".into(),
        "reference_model: (b0, b1, a0) = (0.023, -0.06, 0.003)".into(),
    ];
    metadata.extend(warnings);
    Ok(FigureDataset { name, columns: cols(&["x0", "upper", "lower", "reference_model", "model_risk"]), rows, metadata })
}

fn cols(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}
