//! The parameter box and the set-valued affine coefficients it induces.
//!
//! A [`ParameterBox`] bounds the four coefficients of the affine diffusion
//!
//! ```text
//! dX_t = (b0 + b1 X_t) dt + sqrt(a0 + a1 X_t^+) dW_t
//! ```
//!
//! Every law whose drift stays in [`ParameterBox::drift_interval`] and whose
//! squared diffusion stays in [`ParameterBox::diffusion_interval`] is an
//! admissible model. Upper and lower prices are taken over all of them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::InvalidInterval(format!("non-finite endpoint in [{lo}, {hi}]")));
        }
        if lo > hi {
            return Err(Error::InvalidInterval(format!("lower endpoint {lo} exceeds upper endpoint {hi}")));
        }
        Ok(Self { lo, hi })
    }

    /// The degenerate interval `[v, v]`.
    pub fn point(v: f64) -> Self {
        Self { lo: v, hi: v }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    /// `self ⊆ other`.
    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    fn endpoint(&self, upper: bool) -> f64 {
        if upper {
            self.hi
        } else {
            self.lo
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// The compact uncertainty set for `(b0, b1, a0, a1)`.
///
/// Serializes as a flat JSON object with keys `b0_lo` … `a1_hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterBox {
    pub b0_lo: f64,
    pub b0_hi: f64,
    pub b1_lo: f64,
    pub b1_hi: f64,
    pub a0_lo: f64,
    pub a0_hi: f64,
    pub a1_lo: f64,
    pub a1_hi: f64,
}

impl ParameterBox {
    /// Builds a box from its four coordinate intervals and checks the invariants.
    pub fn new(b0: Interval, b1: Interval, a0: Interval, a1: Interval) -> Result<Self> {
        let pbox = Self {
            b0_lo: b0.lo,
            b0_hi: b0.hi,
            b1_lo: b1.lo,
            b1_hi: b1.hi,
            a0_lo: a0.lo,
            a0_hi: a0.hi,
            a1_lo: a1.lo,
            a1_hi: a1.hi,
        };
        pbox.check()?;
        Ok(pbox)
    }

    /// A box containing the single parameter vector `(b0, b1, a0, a1)`.
    pub fn degenerate(b0: f64, b1: f64, a0: f64, a1: f64) -> Result<Self> {
        Self::new(Interval::point(b0), Interval::point(b1), Interval::point(a0), Interval::point(a1))
    }

    /// Checks `lo ≤ hi` on every axis and non-negativity of the diffusion axes.
    pub fn check(&self) -> Result<()> {
        for (name, lo, hi) in self.axes() {
            if !(lo.is_finite() && hi.is_finite()) {
                return Err(Error::InvalidInterval(format!("{name}: non-finite endpoint")));
            }
            if lo > hi {
                return Err(Error::InvalidInterval(format!("{name}_lo={lo} exceeds {name}_hi={hi}")));
            }
        }
        if self.a0_lo < 0.0 || self.a1_lo < 0.0 {
            return Err(Error::InvalidInterval(format!(
                "diffusion coefficients must be non-negative (a0_lo={}, a1_lo={})",
                self.a0_lo, self.a1_lo
            )));
        }
        Ok(())
    }

    /// Swaps reversed endpoints instead of rejecting them, returning one warning
    /// per swapped axis. Negative diffusion bounds are still an error.
    pub fn sorted(mut self) -> Result<(Self, Vec<String>)> {
        let mut warnings = Vec::new();
        let mut fix = |name: &str, lo: &mut f64, hi: &mut f64| {
            if *lo > *hi {
                warnings.push(format!("{name}: endpoints given as lo={lo}, hi={hi}; swapped"));
                std::mem::swap(lo, hi);
            }
        };
        fix("b0", &mut self.b0_lo, &mut self.b0_hi);
        fix("b1", &mut self.b1_lo, &mut self.b1_hi);
        fix("a0", &mut self.a0_lo, &mut self.a0_hi);
        fix("a1", &mut self.a1_lo, &mut self.a1_hi);
        self.check()?;
        Ok((self, warnings))
    }

    fn axes(&self) -> [(&'static str, f64, f64); 4] {
        [
            ("b0", self.b0_lo, self.b0_hi),
            ("b1", self.b1_lo, self.b1_hi),
            ("a0", self.a0_lo, self.a0_hi),
            ("a1", self.a1_lo, self.a1_hi),
        ]
    }

    pub fn b0(&self) -> Interval {
        Interval { lo: self.b0_lo, hi: self.b0_hi }
    }
    pub fn b1(&self) -> Interval {
        Interval { lo: self.b1_lo, hi: self.b1_hi }
    }
    pub fn a0(&self) -> Interval {
        Interval { lo: self.a0_lo, hi: self.a0_hi }
    }
    pub fn a1(&self) -> Interval {
        Interval { lo: self.a1_lo, hi: self.a1_hi }
    }

    pub fn is_degenerate(&self) -> bool {
        self.axes().iter().all(|(_, lo, hi)| lo == hi)
    }

    /// `self ⊆ other`, axis by axis.
    pub fn is_subset_of(&self, other: &ParameterBox) -> bool {
        self.b0().is_subset_of(&other.b0())
            && self.b1().is_subset_of(&other.b1())
            && self.a0().is_subset_of(&other.a0())
            && self.a1().is_subset_of(&other.a1())
    }

    /// Whether `(b0, b1, a0, a1)` lies in the box.
    pub fn contains(&self, b0: f64, b1: f64, a0: f64, a1: f64) -> bool {
        self.b0().contains(b0) && self.b1().contains(b1) && self.a0().contains(a0) && self.a1().contains(a1)
    }

    /// All 16 vertices of the box (with repetitions on degenerate axes).
    pub fn vertices(&self) -> [CornerParams; 16] {
        std::array::from_fn(|k| CornerParams {
            b0: self.b0().endpoint(k & 1 != 0),
            b1: self.b1().endpoint(k & 2 != 0),
            a0: self.a0().endpoint(k & 4 != 0),
            a1: self.a1().endpoint(k & 8 != 0),
            regime_x0: 0.0,
        })
    }

    /// `b*(x) = {b0 + b1 x : (b0, b1) in the box}`.
    pub fn drift_interval(&self, x: f64) -> Interval {
        if x >= 0.0 {
            Interval { lo: self.b0_lo + self.b1_lo * x, hi: self.b0_hi + self.b1_hi * x }
        } else {
            Interval { lo: self.b0_lo + self.b1_hi * x, hi: self.b0_hi + self.b1_lo * x }
        }
    }

    /// `a*(x) = {a0 + a1 x⁺ : (a0, a1) in the box}`; both endpoints are ≥ 0.
    pub fn diffusion_interval(&self, x: f64) -> Interval {
        let xp = x.max(0.0);
        Interval { lo: self.a0_lo + self.a1_lo * xp, hi: self.a0_hi + self.a1_hi * xp }
    }

    /// Largest `|b0 + b1 x|` over the box.
    pub fn max_abs_drift(&self, x: f64) -> f64 {
        let d = self.drift_interval(x);
        d.lo.abs().max(d.hi.abs())
    }

    /// The corner law attaining the upper (or lower) expectation of increasing
    /// convex payoffs started at `x0`.
    ///
    /// The drift slope is frozen by the sign of `x0`. The result is a valid
    /// worst-case law only when paths cannot change sign relative to `x0`
    /// (positive CIR-type models) or the slope is not uncertain.
    pub fn worst_case_corner(&self, x0: f64, direction: Direction) -> CornerParams {
        self.corner_for_shape(x0, Monotonicity::Increasing, Curvature::Convex, direction)
    }

    /// Corner law for a payoff of the given shape.
    ///
    /// The drift is taken from the upper side when the payoff increases and
    /// the upper expectation is wanted (or it decreases and the lower one is
    /// wanted); the diffusion from the upper side when the payoff is convex
    /// and the upper expectation is wanted (or concave and lower).
    pub fn corner_for_shape(
        &self,
        x0: f64,
        monotone: Monotonicity,
        curvature: Curvature,
        direction: Direction,
    ) -> CornerParams {
        let maximize = direction == Direction::Upper;
        let drift_up = (monotone == Monotonicity::Increasing) == maximize;
        let diff_up = (curvature == Curvature::Convex) == maximize;
        // b1 x is largest with b1_hi on x ≥ 0 and with b1_lo on x < 0.
        let slope_up = drift_up == (x0 >= 0.0);
        CornerParams {
            b0: self.b0().endpoint(drift_up),
            b1: self.b1().endpoint(slope_up),
            a0: self.a0().endpoint(diff_up),
            a1: self.a1().endpoint(diff_up),
            regime_x0: x0,
        }
    }

    /// Coefficient bounds of `F(X)` for a C² transform `F`, given `f1 = F'(x)`
    /// and `f2 = F''(x)`.
    ///
    /// Returns `(a^F(x), b^F(x))`.
    pub fn transform_bounds(&self, x: f64, f1: f64, f2: f64) -> (Interval, Interval) {
        let a = self.diffusion_interval(x);
        let b = self.drift_interval(x);
        let s = f1 * f1;
        let a_f = Interval { lo: s * a.lo, hi: s * a.hi };
        let cands = [
            f1 * b.lo + 0.5 * f2 * a.lo,
            f1 * b.lo + 0.5 * f2 * a.hi,
            f1 * b.hi + 0.5 * f2 * a.lo,
            f1 * b.hi + 0.5 * f2 * a.hi,
        ];
        let b_f = Interval {
            lo: cands.iter().copied().fold(f64::INFINITY, f64::min),
            hi: cands.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        };
        (a_f, b_f)
    }
}

/// State space of the process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StateDomain {
    #[serde(rename = "R")]
    RealLine,
    #[serde(rename = "R+")]
    PositiveHalfLine,
}

impl fmt::Display for StateDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateDomain::RealLine => f.write_str("R"),
            StateDomain::PositiveHalfLine => f.write_str("R+"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Upper,
    Lower,
}

impl Direction {
    pub fn flip(self) -> Self {
        match self {
            Direction::Upper => Direction::Lower,
            Direction::Lower => Direction::Upper,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Curvature {
    Convex,
    Concave,
}

/// One parameter vector of the box, used as a fixed-coefficient affine law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CornerParams {
    pub b0: f64,
    pub b1: f64,
    pub a0: f64,
    pub a1: f64,
    /// Starting state whose sign fixed the drift slope.
    pub regime_x0: f64,
}

impl CornerParams {
    pub fn new(b0: f64, b1: f64, a0: f64, a1: f64) -> Self {
        Self { b0, b1, a0, a1, regime_x0: 0.0 }
    }

    pub fn drift(&self, x: f64) -> f64 {
        self.b0 + self.b1 * x
    }

    pub fn diffusion(&self, x: f64) -> f64 {
        self.a0 + self.a1 * x.max(0.0)
    }

    /// The affine generator `(b0 + b1 x) p + ½ (a0 + a1 x⁺) q`.
    pub fn generator(&self, x: f64, p: f64, q: f64) -> f64 {
        self.drift(x) * p + 0.5 * self.diffusion(x) * q
    }

    /// The degenerate box around this corner.
    pub fn as_box(&self) -> ParameterBox {
        ParameterBox {
            b0_lo: self.b0,
            b0_hi: self.b0,
            b1_lo: self.b1,
            b1_hi: self.b1,
            a0_lo: self.a0,
            a0_hi: self.a0,
            a1_lo: self.a1,
            a1_hi: self.a1,
        }
    }
}

/// Which uniqueness result covers the model's PDE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UniquenessRegime {
    /// State space ℝ with `a0_lo > 0`: coefficients are Lipschitz.
    Lipschitz,
    /// State space ℝ>0, `a0 ≡ 0` and the Feller condition.
    Degenerate,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub proper: bool,
    pub feller_ok: bool,
    pub uniqueness_regime: UniquenessRegime,
    pub reasons: Vec<String>,
    /// Accepted only because the caller forced it.
    pub forced: bool,
}

impl AdmissibilityReport {
    pub fn accepted(&self) -> bool {
        self.uniqueness_regime != UniquenessRegime::None || self.forced
    }
}

impl fmt::Display for AdmissibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "proper: {}", self.proper)?;
        writeln!(f, "feller_ok: {}", self.feller_ok)?;
        writeln!(f, "uniqueness_regime: {:?}", self.uniqueness_regime)?;
        if self.forced {
            writeln!(f, "forced: no uniqueness guarantee")?;
        }
        for r in &self.reasons {
            writeln!(f, "- {r}")?;
        }
        Ok(())
    }
}

/// Classifies the box/state-space pair.
///
/// Never fails; see [`validate`] for the rejecting variant.
pub fn assess(pbox: &ParameterBox, domain: StateDomain) -> AdmissibilityReport {
    let mut reasons = Vec::new();
    let positive_level = pbox.a0_lo > 0.0;
    let no_level = pbox.a0_lo == 0.0 && pbox.a0_hi == 0.0;
    let feller_ok = pbox.a1_hi > 0.0 && pbox.b0_lo >= pbox.a1_hi / 2.0;
    let proper = positive_level || (no_level && feller_ok);

    if positive_level {
        reasons.push(format!("a0_lo={} > 0: diffusion bounded away from zero", pbox.a0_lo));
    } else if no_level {
        if feller_ok {
            reasons.push(format!("a0 = 0 and b0_lo={} >= a1_hi/2={}: Feller condition holds", pbox.b0_lo, pbox.a1_hi / 2.0));
        } else {
            reasons.push(format!(
                "a0 = 0 but Feller condition fails: b0_lo={} < a1_hi/2={} (or a1_hi = 0)",
                pbox.b0_lo,
                pbox.a1_hi / 2.0
            ));
        }
    } else {
        reasons.push(format!(
            "a0_lo={} with a0_hi={}: neither a0_lo > 0 nor a0 identically zero",
            pbox.a0_lo, pbox.a0_hi
        ));
    }

    let regime = match domain {
        StateDomain::RealLine if positive_level => UniquenessRegime::Lipschitz,
        StateDomain::RealLine => {
            reasons.push(format!("a0_lo={} outside Lipschitz uniqueness regime on R", pbox.a0_lo));
            UniquenessRegime::None
        }
        StateDomain::PositiveHalfLine if no_level && feller_ok => UniquenessRegime::Degenerate,
        StateDomain::PositiveHalfLine => {
            reasons.push("R+ requires a0_lo = a0_hi = 0 and b0_lo >= a1_hi/2 > 0".to_string());
            UniquenessRegime::None
        }
    };

    AdmissibilityReport { proper, feller_ok, uniqueness_regime: regime, reasons, forced: false }
}

/// Accepts the model iff one of the two uniqueness regimes applies.
pub fn validate(pbox: &ParameterBox, domain: StateDomain) -> Result<AdmissibilityReport> {
    pbox.check()?;
    let report = assess(pbox, domain);
    if report.uniqueness_regime == UniquenessRegime::None {
        return Err(Error::Rejected(report));
    }
    Ok(report)
}

/// A validated box plus its state space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSpec {
    pub pbox: ParameterBox,
    pub domain: StateDomain,
    pub admissibility: AdmissibilityReport,
}

impl ModelSpec {
    pub fn new(pbox: ParameterBox, domain: StateDomain) -> Result<Self> {
        let admissibility = validate(&pbox, domain)?;
        Ok(Self { pbox, domain, admissibility })
    }

    /// Like [`ModelSpec::new`] but runs outside the proven uniqueness regimes
    /// when `force` is set; such models are labelled as forced.
    pub fn with_force(pbox: ParameterBox, domain: StateDomain, force: bool) -> Result<Self> {
        pbox.check()?;
        let mut admissibility = assess(&pbox, domain);
        if admissibility.uniqueness_regime == UniquenessRegime::None {
            if !force {
                return Err(Error::Rejected(admissibility));
            }
            admissibility.forced = true;
            admissibility.reasons.push("forced: no uniqueness guarantee".to_string());
        }
        Ok(Self { pbox, domain, admissibility })
    }

    pub fn is_forced(&self) -> bool {
        self.admissibility.forced
    }

    /// Non-linear Vasiček with a known drift slope (`a1 ≡ 0`, `b1_lo = b1_hi`) on ℝ.
    pub fn is_fixed_slope_vasicek(&self) -> bool {
        self.domain == StateDomain::RealLine
            && self.pbox.a1_lo == 0.0
            && self.pbox.a1_hi == 0.0
            && self.pbox.b1_lo == self.pbox.b1_hi
    }

    /// Non-linear CIR on ℝ>0 in the Feller regime.
    pub fn is_positive_cir(&self) -> bool {
        self.domain == StateDomain::PositiveHalfLine
            && self.admissibility.uniqueness_regime == UniquenessRegime::Degenerate
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn fig2_box() -> ParameterBox {
        ParameterBox {
            b0_lo: 0.05,
            b0_hi: 0.15,
            b1_lo: -1.0,
            b1_hi: -0.5,
            a0_lo: 0.0,
            a0_hi: 0.08,
            a1_lo: 0.0,
            a1_hi: 0.2,
        }
    }

    fn enumerate(pbox: &ParameterBox, x: f64) -> (Interval, Interval) {
        let v = pbox.vertices();
        let b: Vec<f64> = v.iter().map(|c| c.b0 + c.b1 * x).collect();
        let a: Vec<f64> = v.iter().map(|c| c.a0 + c.a1 * x.max(0.0)).collect();
        let mm = |s: &[f64]| Interval {
            lo: s.iter().copied().fold(f64::INFINITY, f64::min),
            hi: s.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        };
        (mm(&b), mm(&a))
    }

    #[test]
    fn drift_interval_matches_corner_enumeration() {
        let pbox = fig2_box();
        let d = pbox.drift_interval(1.0);
        assert!((d.lo - -0.95).abs() < 1e-15 && (d.hi - -0.35).abs() < 1e-15);
        let d = pbox.drift_interval(-1.0);
        assert!((d.lo - 0.55).abs() < 1e-15 && (d.hi - 1.15).abs() < 1e-15);
        assert_eq!(pbox.drift_interval(0.0), pbox.b0());
        for x in [-3.0, -0.2, 0.0, 0.7, 5.0] {
            assert_eq!(pbox.drift_interval(x), enumerate(&pbox, x).0);
        }
    }

    #[test]
    fn diffusion_interval_uses_positive_part() {
        let pbox = fig2_box();
        let a = pbox.diffusion_interval(0.5);
        assert_eq!(a.lo, 0.0);
        assert!((a.hi - 0.18).abs() < 1e-15);
        assert_eq!(pbox.diffusion_interval(-2.0), pbox.a0());
        let deg = ParameterBox::degenerate(0.0, 0.0, 0.3, 0.2).unwrap();
        let a = deg.diffusion_interval(1.0);
        assert_eq!(a.lo, a.hi);
        assert!((a.lo - 0.5).abs() < 1e-15);
    }

    #[test]
    fn validate_examples() {
        let fig2 = fig2_box();
        let err = validate(&fig2, StateDomain::RealLine).unwrap_err();
        match err {
            Error::Rejected(r) => {
                assert!(!r.proper);
                assert!(r.reasons.iter().any(|s| s.contains("a0_lo=0 outside Lipschitz uniqueness regime")));
            }
            e => panic!("unexpected {e:?}"),
        }
        let bumped = ParameterBox { a0_lo: 0.01, ..fig2 };
        let r = validate(&bumped, StateDomain::RealLine).unwrap();
        assert_eq!(r.uniqueness_regime, UniquenessRegime::Lipschitz);

        let cir = ParameterBox {
            b0_lo: 0.15,
            b0_hi: 0.2,
            b1_lo: -1.0,
            b1_hi: -0.5,
            a0_lo: 0.0,
            a0_hi: 0.0,
            a1_lo: 0.1,
            a1_hi: 0.2,
        };
        let r = validate(&cir, StateDomain::PositiveHalfLine).unwrap();
        assert!(r.feller_ok && r.proper);
        assert_eq!(r.uniqueness_regime, UniquenessRegime::Degenerate);

        let bad = ParameterBox { a1_hi: 0.4, ..cir };
        assert!(matches!(validate(&bad, StateDomain::PositiveHalfLine), Err(Error::Rejected(_))));
    }

    #[test]
    fn force_flag_labels_model() {
        let m = ModelSpec::with_force(fig2_box(), StateDomain::RealLine, true).unwrap();
        assert!(m.is_forced());
        assert!(m.admissibility.accepted());
        assert!(ModelSpec::with_force(fig2_box(), StateDomain::RealLine, false).is_err());
    }

    #[test]
    fn reversed_endpoints_rejected_or_sorted() {
        let raw = ParameterBox { a0_lo: 0.017, a0_hi: 0.0003, ..fig2_box() };
        assert!(matches!(raw.check(), Err(Error::InvalidInterval(_))));
        let (sorted, warnings) = raw.sorted().unwrap();
        assert_eq!(sorted.a0(), Interval { lo: 0.0003, hi: 0.017 });
        assert_eq!(warnings.len(), 1);
        let neg = ParameterBox { a1_lo: -0.1, ..fig2_box() };
        assert!(neg.check().is_err());
    }

    #[test]
    fn worst_case_corner_examples() {
        let pbox = fig2_box();
        let c = pbox.worst_case_corner(1.0, Direction::Upper);
        assert_eq!((c.a0, c.a1, c.b0, c.b1), (0.08, 0.2, 0.15, -0.5));
        let c = pbox.worst_case_corner(-1.0, Direction::Upper);
        assert_eq!(c.b1, -1.0);
        let c = pbox.worst_case_corner(1.0, Direction::Lower);
        assert_eq!((c.a0, c.a1, c.b0, c.b1), (0.0, 0.0, 0.05, -1.0));
        let c = pbox.worst_case_corner(-1.0, Direction::Lower);
        assert_eq!(c.b1, -0.5);
        let deg = ParameterBox::degenerate(0.1, -0.2, 0.3, 0.4).unwrap();
        for d in [Direction::Upper, Direction::Lower] {
            let c = deg.worst_case_corner(0.5, d);
            assert_eq!((c.b0, c.b1, c.a0, c.a1), (0.1, -0.2, 0.3, 0.4));
        }
    }

    #[test]
    fn decreasing_convex_corner_takes_low_drift_high_diffusion() {
        let pbox = fig2_box();
        let c = pbox.corner_for_shape(1.0, Monotonicity::Decreasing, Curvature::Convex, Direction::Upper);
        assert_eq!((c.b0, c.b1, c.a0, c.a1), (0.05, -1.0, 0.08, 0.2));
        let c = pbox.corner_for_shape(1.0, Monotonicity::Decreasing, Curvature::Convex, Direction::Lower);
        assert_eq!((c.b0, c.b1, c.a0, c.a1), (0.15, -0.5, 0.0, 0.0));
    }

    #[test]
    fn transform_bounds_examples() {
        let pbox = fig2_box();
        for x in [-1.0, 0.0, 0.4, 2.0] {
            let (a, b) = pbox.transform_bounds(x, 1.0, 0.0);
            assert_eq!(a, pbox.diffusion_interval(x));
            assert_eq!(b, pbox.drift_interval(x));
        }
        // F(x) = x² on a box with b0 = 0.
        let sq = ParameterBox { b0_lo: 0.0, b0_hi: 0.0, a1_lo: 0.0, a1_hi: 0.0, ..fig2_box() };
        let sq = ParameterBox { a0_lo: 0.01, ..sq };
        for x in [-1.5, 0.3, 2.0] {
            let (_, b) = sq.transform_bounds(x, 2.0 * x, 2.0);
            let lo = 2.0 * x * x * sq.b1_lo + sq.a0_lo;
            let hi = 2.0 * x * x * sq.b1_hi + sq.a0_hi;
            assert!((b.lo - lo).abs() < 1e-14 && (b.hi - hi).abs() < 1e-14);
        }
        // F = exp with b1 ≡ 0, a1 ≡ 0: drift of S = e^X is [S(b0_lo + a0_lo/2), S(b0_hi + a0_hi/2)].
        let bs = ParameterBox {
            b0_lo: -0.02,
            b0_hi: 0.03,
            b1_lo: 0.0,
            b1_hi: 0.0,
            a0_lo: 0.04,
            a0_hi: 0.09,
            a1_lo: 0.0,
            a1_hi: 0.0,
        };
        for x in [-0.5, 0.0, 0.8] {
            let s = f64::exp(x);
            let (a, b) = bs.transform_bounds(x, s, s);
            assert!((b.lo - (s * bs.b0_lo + 0.5 * s * bs.a0_lo)).abs() < 1e-14);
            assert!((b.hi - (s * bs.b0_hi + 0.5 * s * bs.a0_hi)).abs() < 1e-14);
            assert!((a.lo - s * s * bs.a0_lo).abs() < 1e-14 && (a.hi - s * s * bs.a0_hi).abs() < 1e-14);
        }
    }

    #[test]
    fn serde_flat_keys_and_domain_strings() {
        let json = serde_json::to_value(fig2_box()).unwrap();
        assert_eq!(json["a0_hi"], 0.08);
        assert_eq!(serde_json::to_string(&StateDomain::PositiveHalfLine).unwrap(), "\"R+\"");
        let d: StateDomain = serde_json::from_str("\"R\"").unwrap();
        assert_eq!(d, StateDomain::RealLine);
        let bad = r#"{"b0_lo":0,"b0_hi":0,"b1_lo":0,"b1_hi":0,"a0_lo":0,"a0_hi":0,"a1_lo":0,"a1_hi":0,"extra":1}"#;
        assert!(serde_json::from_str::<ParameterBox>(bad).is_err());
    }
}
