//! Closed-form scalar functions of the cell-energy model.
//!
//! `c_n` is the minimal second moment of a unit-area `n`-gon, extended to real
//! `n >= 3`. `g_α(m, n) = c₆/(1-α)·m^α + c_n·m²` is the per-cell lower bound
//! on the rescaled energy, and `h_α` is its gap to the tangent plane at
//! `(m, n) = (1, 6)`. Constants are evaluated from their closed forms on every
//! call.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest exponent for which the crystallization argument is carried out.
pub const ALPHA_BAR: f64 = 0.583;

/// Entropy exponent, any real value below 1.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || value >= 1.0 {
            return Err(Error::Domain(format!("alpha must be finite and < 1, got {value}")));
        }
        Ok(Self(value))
    }

    pub fn bar() -> Self {
        Self(ALPHA_BAR)
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// `c₆ / (1 - α)`, the entropy coefficient of the rescaled energy.
    pub fn rescaled_coefficient(self) -> f64 {
        c6() / (1.0 - self.0)
    }

    /// `(2 - α)/(1 - α) · c₆`, the asymptotic energy per unit area.
    pub fn asymptotic_energy_density(self) -> f64 {
        (2.0 - self.0) / (1.0 - self.0) * c6()
    }
}

impl TryFrom<f64> for Alpha {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Alpha::new(v)
    }
}

impl From<Alpha> for f64 {
    fn from(a: Alpha) -> f64 {
        a.0
    }
}

/// `c₆ = 5 / (18√3)`
pub fn c6() -> f64 {
    5.0 / (18.0 * 3f64.sqrt())
}

/// `c_∞ = 1 / (2π)`
pub fn c_inf() -> f64 {
    1.0 / (2.0 * PI)
}

/// `κ = ∂_n c_n` at `n = 6`, `2π/243 − 5√3/324`.
pub fn kappa() -> f64 {
    2.0 * PI / 243.0 - 5.0 * 3f64.sqrt() / 324.0
}

fn check_order(n: f64) -> Result<()> {
    if !(n >= 3.0) {
        return Err(Error::Domain(format!("polygon order must be >= 3, got {n}")));
    }
    Ok(())
}

pub(crate) fn moment_constant(n: f64) -> f64 {
    if n.is_infinite() {
        return c_inf();
    }
    let t = (PI / n).tan();
    (t / 3.0 + 1.0 / t) / (2.0 * n)
}

pub(crate) fn moment_constant_derivative(n: f64) -> f64 {
    let x = PI / n;
    let sec2 = 1.0 / x.cos().powi(2);
    let csc2 = 1.0 / x.sin().powi(2);
    -moment_constant(n) / n + (-PI / (3.0 * n * n) * sec2 + PI / (n * n) * csc2) / (2.0 * n)
}

/// `c_n = (1/2n)(tan(π/n)/3 + cot(π/n))`, for real `n >= 3`.
pub fn c_n(n: f64) -> Result<f64> {
    check_order(n)?;
    Ok(moment_constant(n))
}

/// Analytic `∂_n c_n`.
pub fn dn_c_n(n: f64) -> Result<f64> {
    check_order(n)?;
    if n.is_infinite() {
        return Ok(0.0);
    }
    Ok(moment_constant_derivative(n))
}

fn check_mass(alpha: Alpha, m: f64) -> Result<()> {
    if !(m >= 0.0) || !m.is_finite() {
        return Err(Error::Domain(format!("mass must be finite and >= 0, got {m}")));
    }
    if m == 0.0 && alpha.value() <= 0.0 {
        return Err(Error::Domain("m = 0 requires alpha > 0".into()));
    }
    Ok(())
}

fn check_positive_mass(m: f64) -> Result<()> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::Domain(format!("mass must be finite and > 0, got {m}")));
    }
    Ok(())
}

pub fn g_alpha(alpha: Alpha, m: f64, n: f64) -> Result<f64> {
    check_mass(alpha, m)?;
    let cn = c_n(n)?;
    Ok(alpha.rescaled_coefficient() * m.powf(alpha.value()) + cn * m * m)
}

pub fn h_alpha(alpha: Alpha, m: f64, n: f64) -> Result<f64> {
    check_mass(alpha, m)?;
    let cn = c_n(n)?;
    Ok(h_alpha_eval(Precision::Double, alpha.value(), m, cn, n - 6.0).value)
}

pub fn dm_h_alpha(alpha: Alpha, m: f64, n: f64) -> Result<f64> {
    check_positive_mass(m)?;
    let cn = c_n(n)?;
    Ok(dm_h_alpha_eval(Precision::Double, alpha.value(), m, cn).value)
}

/// `∂²_mm h_α = -α c₆ m^{α-2} + 2 c_n`
pub fn d2m_h_alpha(alpha: Alpha, m: f64, n: f64) -> Result<f64> {
    check_positive_mass(m)?;
    let cn = c_n(n)?;
    let a = alpha.value();
    Ok(-a * c6() * m.powf(a - 2.0) + 2.0 * cn)
}

/// The `α → 1` limit `h₁(m, n) = c_n m² − c₆ m − c₆ m ln m − κ(n − 6)`.
pub fn h_one(m: f64, n: f64) -> Result<f64> {
    check_positive_mass(m)?;
    let cn = c_n(n)?;
    Ok(h_one_eval(Precision::Double, m, cn, n - 6.0).value)
}

pub fn dm_h_one(m: f64, n: f64) -> Result<f64> {
    check_positive_mass(m)?;
    let cn = c_n(n)?;
    Ok(dm_h_one_eval(Precision::Double, m, cn).value)
}

/// Distances from the centre of a unit-area regular hexagon to its vertices
/// and to its edges: `(√(2/(3√3)), √(1/(2√3)))`.
pub fn hexagon_reference_distances() -> (f64, f64) {
    let s3 = 3f64.sqrt();
    ((2.0 / (3.0 * s3)).sqrt(), (1.0 / (2.0 * s3)).sqrt())
}

/// Summation strategy used by the evaluators below.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Precision {
    #[default]
    Double,
    /// Neumaier-compensated sums with polynomial parts in Horner form.
    Compensated,
}

impl Precision {
    pub fn sum(self, terms: &[f64]) -> f64 {
        match self {
            Precision::Double => terms.iter().sum(),
            Precision::Compensated => neumaier_sum(terms),
        }
    }
}

fn neumaier_sum(terms: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &t in terms {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    sum + comp
}

/// A computed value together with the magnitude of the terms that produced
/// it, for forward-error estimation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluated {
    pub value: f64,
    /// `Σ |term|`
    pub scale: f64,
    /// Number of floating-point operations along the longest path.
    pub depth: u32,
}

impl Evaluated {
    pub fn from_terms(p: Precision, terms: &[f64], depth: u32) -> Self {
        Evaluated {
            value: p.sum(terms),
            scale: terms.iter().map(|t| t.abs()).sum(),
            depth: depth + terms.len() as u32,
        }
    }

    pub fn exact(value: f64) -> Self {
        Evaluated { value, scale: value.abs(), depth: 1 }
    }

    /// First-order forward error bound `depth · u · scale`.
    pub fn error_bound(&self) -> f64 {
        f64::from(self.depth) * f64::EPSILON * self.scale
    }
}

/// `h_α` with an explicit moment constant and `n − 6`; the tail variants use
/// `c_∞` here.
pub fn h_alpha_eval(p: Precision, alpha: f64, m: f64, cn: f64, n_minus_6: f64) -> Evaluated {
    let c6 = c6();
    let a = c6 / (1.0 - alpha);
    let b = c6 * (2.0 - alpha) / (1.0 - alpha);
    let entropy = a * m.powf(alpha);
    let tangent = -kappa() * n_minus_6;
    match p {
        Precision::Double => {
            Evaluated::from_terms(p, &[entropy, cn * m * m, -b * m, tangent], 8)
        }
        Precision::Compensated => {
            let quad = (cn * m - b) * m;
            let mut e = Evaluated::from_terms(p, &[entropy, quad, tangent], 8);
            e.scale += (cn * m * m).abs() + (b * m).abs();
            e
        }
    }
}

/// `∂_m h_α = α/(1−α) c₆ m^{α−1} + 2 c_n m − c₆ (2−α)/(1−α)`
pub fn dm_h_alpha_eval(p: Precision, alpha: f64, m: f64, cn: f64) -> Evaluated {
    let c6 = c6();
    let terms = [
        alpha / (1.0 - alpha) * c6 * m.powf(alpha - 1.0),
        2.0 * cn * m,
        -c6 * (2.0 - alpha) / (1.0 - alpha),
    ];
    Evaluated::from_terms(p, &terms, 8)
}

pub fn h_one_eval(p: Precision, m: f64, cn: f64, n_minus_6: f64) -> Evaluated {
    let c6 = c6();
    let tangent = -kappa() * n_minus_6;
    match p {
        Precision::Double => Evaluated::from_terms(
            p,
            &[cn * m * m, -c6 * m, -c6 * m * m.ln(), tangent],
            8,
        ),
        Precision::Compensated => {
            let poly = ((cn * m) - c6 * (1.0 + m.ln())) * m;
            let mut e = Evaluated::from_terms(p, &[poly, tangent], 8);
            e.scale += (cn * m * m).abs() + (c6 * m).abs() + (c6 * m * m.ln()).abs();
            e
        }
    }
}

/// `∂_m h₁ = 2 c_n m − 2 c₆ − c₆ ln m`
pub fn dm_h_one_eval(p: Precision, m: f64, cn: f64) -> Evaluated {
    let c6 = c6();
    Evaluated::from_terms(p, &[2.0 * cn * m, -2.0 * c6, -c6 * m.ln()], 6)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn named_constants() {
        assert!(rel(c_n(6.0).unwrap(), c6()) < 1e-15);
        assert!((c6() - 0.1603750748).abs() < 1e-10);
        assert!(rel(c_n(4.0).unwrap(), 1.0 / 6.0) < 1e-15);
        assert!(rel(c_n(3.0).unwrap(), 1.0 / (3.0 * 3f64.sqrt())) < 1e-15);
        assert!((c_n(1e6).unwrap() - c_inf()).abs() < 1e-9);
        assert!(rel(dn_c_n(6.0).unwrap(), kappa()) < 1e-12);
        assert!((kappa() + 8.7245e-4).abs() < 1e-7);
    }

    #[test]
    fn order_below_three_is_refused() {
        assert!(c_n(2.5).is_err());
        assert!(dn_c_n(f64::NAN).is_err());
        assert!(g_alpha(Alpha::bar(), 1.0, 2.0).is_err());
    }

    #[test]
    fn alpha_validation() {
        assert!(Alpha::new(1.0).is_err());
        assert!(Alpha::new(f64::NAN).is_err());
        assert!(Alpha::new(-3.0).is_ok());
    }

    #[test]
    fn derivative_matches_central_differences() {
        let mut n = 3.01;
        while n < 40.0 {
            let h = 1e-6;
            let fd = (c_n(n + h).unwrap() - c_n(n - h).unwrap()) / (2.0 * h);
            let an = dn_c_n(n).unwrap();
            assert!(an < 0.0);
            assert!((fd - an).abs() < 1e-9, "n={n} fd={fd} an={an}");
            n += 0.37;
        }
    }

    #[test]
    fn g_at_tangent_point() {
        let a = Alpha::bar();
        let expected = c6() * (2.0 - ALPHA_BAR) / (1.0 - ALPHA_BAR);
        assert!(rel(g_alpha(a, 1.0, 6.0).unwrap(), expected) < 1e-15);
        assert!((expected - 0.544967580).abs() < 1e-9);
        assert_eq!(g_alpha(Alpha::new(0.5).unwrap(), 0.0, 4.0).unwrap(), 0.0);
        assert!(g_alpha(Alpha::new(0.0).unwrap(), 0.0, 4.0).is_err());
        assert!(g_alpha(Alpha::new(-0.5).unwrap(), 0.0, 4.0).is_err());
    }

    #[test]
    fn h_vanishes_at_tangent_point() {
        for a in [-2.0, 0.1, 0.5, ALPHA_BAR, 0.9, 0.999] {
            let a = Alpha::new(a).unwrap();
            assert!(h_alpha(a, 1.0, 6.0).unwrap().abs() < 1e-15);
            assert!(dm_h_alpha(a, 1.0, 6.0).unwrap().abs() < 1e-15);
        }
        assert!(h_one(1.0, 6.0).unwrap().abs() < 1e-16);
        assert!(dm_h_one(1.0, 6.0).unwrap().abs() < 1e-16);
    }

    #[test]
    fn h_at_zero_mass_is_tangent_offset() {
        let a = Alpha::bar();
        for n in 6..20 {
            let n = n as f64;
            let v = h_alpha(a, 0.0, n).unwrap();
            assert!(rel(v, -kappa() * (n - 6.0)).max((v + kappa() * (n - 6.0)).abs()) < 1e-15);
            assert!(v >= 0.0);
        }
    }

    #[test]
    fn bracket_example() {
        assert!(dm_h_alpha(Alpha::bar(), 0.764, 3.0).unwrap() <= -8e-6);
    }

    #[test]
    fn h_one_slope_at_105() {
        for n in 3..=12 {
            assert!(dm_h_one(1.05, n as f64).unwrap() > 0.005);
        }
    }

    #[test]
    fn h_one_is_a_close_approximation_near_one() {
        // |h_α − h₁| <= ½ c₆ (1−α) (ln m)² max(1, m)
        for a in [0.9, 0.99, 0.999] {
            let alpha = Alpha::new(a).unwrap();
            for i in 0..=180 {
                let m = 0.2 + i as f64 * 0.01;
                for n in [3.0, 5.0, 6.0, 9.0] {
                    let d = (h_alpha(alpha, m, n).unwrap() - h_one(m, n).unwrap()).abs();
                    let bound = 0.5 * c6() * (1.0 - a) * m.ln().powi(2) * m.max(1.0);
                    assert!(d <= bound + 1e-13, "a={a} m={m} n={n} d={d} bound={bound}");
                }
            }
        }
    }

    #[test]
    fn hexagon_radii() {
        let (r_out, r_in) = hexagon_reference_distances();
        assert!((r_out - 0.62040).abs() < 1e-5);
        assert!((r_in - 0.53728).abs() < 1e-5);
        assert!(rel(r_out / r_in, 2.0 / 3f64.sqrt()) < 1e-15);
    }

    #[test]
    fn compensated_agrees_with_double() {
        let a = ALPHA_BAR;
        for (m, n) in [(0.3, 3.0), (1.2, 5.0), (2.0620e-4, 4.0), (5.0, 11.0)] {
            let cn = moment_constant(n);
            let d = h_alpha_eval(Precision::Double, a, m, cn, n - 6.0);
            let c = h_alpha_eval(Precision::Compensated, a, m, cn, n - 6.0);
            assert!((d.value - c.value).abs() <= d.error_bound() + c.error_bound());
        }
    }
}
