//! Weight functions `h` and the Jensen coefficient.
//!
//! The Jensen coefficient `M_K(h) = inf_{t in K} h(t)/t` is available under
//! three policies, see [`CoefficientPolicy`]. The default everywhere in this
//! workspace is [`CoefficientPolicy::Safe`], i.e. `2 h(1/2)`: the infimum over
//! `(0, 1)` is too small for the operator inequality when `h(t)/t` is
//! decreasing (e.g. `h(t) = sqrt(t)` gives 1 where `sqrt(2)` is needed).

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use core::fmt;
use core::str::FromStr;

use crate::optimize::golden_max;
use crate::scalar::Spec;
use crate::{Error, Result};

const GRID_POINTS: usize = 10_001;
const GRID_FLOOR: f64 = 1e-6;
const DIVERGENCE_CUTOFF: f64 = 1e12;

/// User supplied `h` on `(0, 1]`.
#[derive(Clone)]
pub struct Tabulated {
    name: String,
    rule: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl Tabulated {
    pub fn name(&self) -> &str {
        &self.name
    }
}

impl fmt::Debug for Tabulated {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Tabulated")
            .field("name", &self.name)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum HFunction {
    /// `h(t) = t` (convex)
    Identity,
    /// `h(t) = c` (P-class when `c = 1`)
    Constant(f64),
    /// `h(t) = t^s`, `s in (0, 1]` (s-convex in the second sense)
    Power(f64),
    /// `h(t) = 1/t` (Godunova–Levin)
    Reciprocal,
    /// `h(t) = t^-s`, `s in (0, 1]` (s-Godunova–Levin)
    ReciprocalPower(f64),
    Tabulated(Tabulated),
}

impl HFunction {
    pub fn constant(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "c",
                value: c,
            });
        }
        Ok(HFunction::Constant(c))
    }

    pub fn power(s: f64) -> Result<Self> {
        check_exponent(s)?;
        Ok(HFunction::Power(s))
    }

    pub fn reciprocal_power(s: f64) -> Result<Self> {
        check_exponent(s)?;
        Ok(HFunction::ReciprocalPower(s))
    }

    pub fn tabulated<F>(name: impl Into<String>, rule: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        HFunction::Tabulated(Tabulated {
            name: name.into(),
            rule: Arc::new(rule),
        })
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            HFunction::Identity => t,
            HFunction::Constant(c) => *c,
            HFunction::Power(s) => libm::pow(t, *s),
            HFunction::Reciprocal => 1.0 / t,
            HFunction::ReciprocalPower(s) => libm::pow(t, -*s),
            HFunction::Tabulated(tab) => (tab.rule)(t),
        }
    }

    pub fn is_named_family(&self) -> bool {
        !matches!(self, HFunction::Tabulated(_))
    }
}

fn check_exponent(s: f64) -> Result<()> {
    if s > 0.0 && s <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "s",
            value: s,
        })
    }
}

impl fmt::Display for HFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HFunction::Identity => f.write_str("identity"),
            HFunction::Constant(c) => write!(f, "constant:{c}"),
            HFunction::Power(s) => write!(f, "power:{s}"),
            HFunction::Reciprocal => f.write_str("reciprocal"),
            HFunction::ReciprocalPower(s) => write!(f, "recpower:{s}"),
            HFunction::Tabulated(t) => write!(f, "tabulated:{}", t.name),
        }
    }
}

impl FromStr for HFunction {
    type Err = Error;

    /// `identity`, `constant:c`, `power:s`, `reciprocal`, `recpower:s`.
    fn from_str(s: &str) -> Result<Self> {
        let spec = Spec::split(s.trim());
        let param_pos = spec.name.len() + 1;
        match spec.name {
            "identity" => spec.no_args().map(|_| HFunction::Identity),
            "constant" => HFunction::constant(spec.exactly(1)?[0])
                .map_err(|_| spec.error(param_pos, "constant must be positive")),
            "power" => HFunction::power(spec.exactly(1)?[0])
                .map_err(|_| spec.error(param_pos, "s must lie in (0, 1]")),
            "reciprocal" => spec.no_args().map(|_| HFunction::Reciprocal),
            "recpower" => HFunction::reciprocal_power(spec.exactly(1)?[0])
                .map_err(|_| spec.error(param_pos, "s must lie in (0, 1]")),
            other => Err(spec.error(0, format!("unknown h family {other:?}"))),
        }
    }
}

/// Which constant multiplies `<f(A)x, x>` in the operator Jensen inequality.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum CoefficientPolicy {
    /// `inf_{t in (0,1)} h(t)/t`
    Infimum,
    /// `2 h(1/2)`
    #[default]
    Safe,
    /// `h(lambda)/lambda` for a fixed `lambda in (0, 1)`
    PointwiseLambda(f64),
}

impl CoefficientPolicy {
    pub fn pointwise(lambda: f64) -> Result<Self> {
        if lambda > 0.0 && lambda < 1.0 {
            Ok(CoefficientPolicy::PointwiseLambda(lambda))
        } else {
            Err(Error::InvalidParameter {
                name: "lambda",
                value: lambda,
            })
        }
    }
}

impl fmt::Display for CoefficientPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientPolicy::Infimum => f.write_str("infimum"),
            CoefficientPolicy::Safe => f.write_str("safe"),
            CoefficientPolicy::PointwiseLambda(l) => write!(f, "lambda:{l}"),
        }
    }
}

impl FromStr for CoefficientPolicy {
    type Err = Error;

    /// `infimum` (or `paper`), `safe` or `lambda:<value>`.
    fn from_str(s: &str) -> Result<Self> {
        let spec = Spec::split(s.trim());
        match spec.name {
            "infimum" | "paper" => spec.no_args().map(|_| CoefficientPolicy::Infimum),
            "safe" => spec.no_args().map(|_| CoefficientPolicy::Safe),
            "lambda" => CoefficientPolicy::pointwise(spec.exactly(1)?[0])
                .map_err(|_| spec.error(7, "lambda must lie in (0, 1)")),
            other => Err(spec.error(0, format!("unknown policy {other:?}"))),
        }
    }
}

/// Jensen coefficient of `h` under `policy`.
///
/// `tol` is the accuracy of the numerical infimum for tabulated `h` under
/// [`CoefficientPolicy::Infimum`]; it is unused otherwise. May return
/// `f64::INFINITY` when `h(t)/t` diverges on the whole grid.
pub fn jensen_coefficient(h: &HFunction, policy: CoefficientPolicy, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            value: tol,
        });
    }
    match policy {
        CoefficientPolicy::Safe => pointwise(h, 0.5),
        CoefficientPolicy::PointwiseLambda(lambda) => {
            if !(lambda > 0.0 && lambda < 1.0) {
                return Err(Error::InvalidParameter {
                    name: "lambda",
                    value: lambda,
                });
            }
            pointwise(h, lambda)
        }
        CoefficientPolicy::Infimum => match h {
            // h(t)/t is non-increasing for every named family, so the
            // infimum is the limit t -> 1.
            HFunction::Identity
            | HFunction::Power(_)
            | HFunction::Reciprocal
            | HFunction::ReciprocalPower(_) => Ok(1.0),
            HFunction::Constant(c) => Ok(*c),
            HFunction::Tabulated(_) => tabulated_infimum(h, tol),
        },
    }
}

fn pointwise(h: &HFunction, lambda: f64) -> Result<f64> {
    let v = h.eval(lambda);
    if !(v >= 0.0) {
        return Err(Error::Negative {
            function: h.to_string(),
            t: lambda,
            value: v,
        });
    }
    Ok(v / lambda)
}

fn grid_point(k: usize) -> f64 {
    let hi = 1.0 - GRID_FLOOR;
    GRID_FLOOR + (hi - GRID_FLOOR) * k as f64 / (GRID_POINTS - 1) as f64
}

fn tabulated_infimum(h: &HFunction, tol: f64) -> Result<f64> {
    let mut best = (0usize, f64::INFINITY);
    for k in 0..GRID_POINTS {
        let t = grid_point(k);
        let v = h.eval(t);
        if !(v >= 0.0) {
            return Err(Error::Negative {
                function: h.to_string(),
                t,
                value: v,
            });
        }
        let r = v / t;
        if r < best.1 {
            best = (k, r);
        }
    }
    if best.1 > DIVERGENCE_CUTOFF {
        return Ok(f64::INFINITY);
    }
    let lo = grid_point(best.0.saturating_sub(1));
    let hi = grid_point((best.0 + 1).min(GRID_POINTS - 1));
    let (_, neg) = golden_max(|t| Ok(-h.eval(t) / t), lo, hi, tol)?;
    Ok(best.1.min(-neg))
}

/// Closed-form safe coefficient for the five named families.
pub fn classify_coefficient(h: &HFunction) -> Result<f64> {
    match h {
        HFunction::Identity => Ok(1.0),
        HFunction::Constant(c) => Ok(2.0 * c),
        HFunction::Power(s) => Ok(libm::pow(2.0, 1.0 - s)),
        HFunction::Reciprocal => Ok(4.0),
        HFunction::ReciprocalPower(s) => Ok(libm::pow(2.0, 1.0 + s)),
        HFunction::Tabulated(_) => Err(Error::UnsupportedFamily {
            family: h.to_string(),
        }),
    }
}

/// Whether `h(t)/t` is (weakly) decreasing on `(0, 1)`.
///
/// Closed form for the named families; tabulated `h` is checked on a grid of
/// `samples` points with slack `1e-12`.
pub fn is_h_over_t_decreasing(h: &HFunction, samples: usize) -> bool {
    if h.is_named_family() {
        return true;
    }
    let samples = samples.max(2);
    let hi = 1.0 - GRID_FLOOR;
    let ratio = |k: usize| {
        let t = GRID_FLOOR + (hi - GRID_FLOOR) * k as f64 / (samples - 1) as f64;
        h.eval(t) / t
    };
    let mut prev = ratio(0);
    for k in 1..samples {
        let r = ratio(k);
        if r > prev + 1e-12 {
            return false;
        }
        prev = r;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    #[test]
    fn infimum_named_families() {
        assert_eq!(
            jensen_coefficient(&HFunction::Identity, CoefficientPolicy::Infimum, TOL).unwrap(),
            1.0
        );
        let h = HFunction::power(0.5).unwrap();
        assert_eq!(
            jensen_coefficient(&h, CoefficientPolicy::Infimum, TOL).unwrap(),
            1.0
        );
        assert_eq!(
            jensen_coefficient(&HFunction::Reciprocal, CoefficientPolicy::Infimum, TOL).unwrap(),
            1.0
        );
    }

    #[test]
    fn safe_values() {
        let h = HFunction::power(0.5).unwrap();
        let c = jensen_coefficient(&h, CoefficientPolicy::Safe, TOL).unwrap();
        assert!(libm::fabs(c - core::f64::consts::SQRT_2) < 1e-15);
        let c = jensen_coefficient(&HFunction::Reciprocal, CoefficientPolicy::Safe, TOL).unwrap();
        assert_eq!(c, 4.0);
    }

    #[test]
    fn tabulated_grid_infimum() {
        // h(t)/t = t^-1/2 is decreasing; infimum approached at t -> 1
        let h = HFunction::tabulated("sqrt", libm::sqrt);
        let c = jensen_coefficient(&h, CoefficientPolicy::Infimum, TOL).unwrap();
        assert!(libm::fabs(c - 1.0) < 1e-6);
        // h(t) = (t - 1/2)^2 + t/4: h(t)/t = t + 1/(4t) - 3/4, minimum 1/4 at t = 1/2
        let h = HFunction::tabulated("bowl", |t| (t - 0.5) * (t - 0.5) + 0.25 * t);
        let c = jensen_coefficient(&h, CoefficientPolicy::Infimum, TOL).unwrap();
        assert!(libm::fabs(c - 0.25) < 1e-10, "{c}");
        let h = HFunction::tabulated("half", |t| 0.5 * t);
        let c = jensen_coefficient(&h, CoefficientPolicy::Infimum, TOL).unwrap();
        assert!(libm::fabs(c - 0.5) < 1e-12);
    }

    #[test]
    fn tabulated_divergence_and_negativity() {
        let h = HFunction::tabulated("huge", |_| 1e20);
        assert_eq!(
            jensen_coefficient(&h, CoefficientPolicy::Infimum, TOL).unwrap(),
            f64::INFINITY
        );
        let h = HFunction::tabulated("neg", |t| t - 0.5);
        assert!(matches!(
            jensen_coefficient(&h, CoefficientPolicy::Infimum, TOL),
            Err(Error::Negative { .. })
        ));
        let h = HFunction::tabulated("vanish", |t| if t < 0.5 { 0.0 } else { t });
        assert_eq!(
            jensen_coefficient(&h, CoefficientPolicy::Infimum, TOL).unwrap(),
            0.0
        );
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_coefficient(&HFunction::Identity).unwrap(), 1.0);
        let c = classify_coefficient(&HFunction::power(0.3).unwrap()).unwrap();
        assert!(libm::fabs(c - 1.624_504_792_712_471) < 1e-12);
        assert_eq!(
            classify_coefficient(&HFunction::reciprocal_power(1.0).unwrap()).unwrap(),
            4.0
        );
        assert!(matches!(
            classify_coefficient(&HFunction::tabulated("t", |t| t)),
            Err(Error::UnsupportedFamily { .. })
        ));
    }

    #[test]
    fn monotonicity_examples() {
        assert!(is_h_over_t_decreasing(&HFunction::Reciprocal, 100));
        assert!(is_h_over_t_decreasing(&HFunction::Identity, 100));
        assert!(!is_h_over_t_decreasing(
            &HFunction::tabulated("sq", |t| t * t),
            100
        ));
        assert!(is_h_over_t_decreasing(
            &HFunction::tabulated("sqrt", libm::sqrt),
            100
        ));
    }

    #[test]
    fn parse_specifiers() {
        for s in [
            "identity",
            "constant:1",
            "power:0.5",
            "reciprocal",
            "recpower:0.25",
        ] {
            let h: HFunction = s.parse().unwrap();
            assert_eq!(h.to_string(), s);
        }
        match "power:1.5".parse::<HFunction>() {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 6),
            other => panic!("{other:?}"),
        }
        assert!("constant:0".parse::<HFunction>().is_err());
        assert!("gamma".parse::<HFunction>().is_err());
        for s in ["infimum", "safe", "lambda:0.64"] {
            let p: CoefficientPolicy = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
        }
        assert!("lambda:1".parse::<CoefficientPolicy>().is_err());
    }
}
