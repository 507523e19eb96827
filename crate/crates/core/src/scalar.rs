//! Scalar functions `f` with analytic first and second derivatives.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum ScalarFunction {
    /// `a t + b`
    Affine {
        a: f64,
        b: f64,
    },
    Square,
    /// `t^p` on `[0, inf)`, `p > 0`
    Power(f64),
    Sqrt,
    Exp,
    /// `c_0 + c_1 t + c_2 t^2 + ...`
    Polynomial(Vec<f64>),
}

impl ScalarFunction {
    pub fn power(p: f64) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "p",
                value: p,
            });
        }
        Ok(ScalarFunction::Power(p))
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Empty {
                what: "polynomial coefficients",
            });
        }
        Ok(ScalarFunction::Polynomial(coeffs))
    }

    /// Closed lower bound of the domain (`-inf` for entire functions).
    pub fn domain_lower(&self) -> f64 {
        match self {
            ScalarFunction::Power(_) | ScalarFunction::Sqrt => 0.0,
            _ => f64::NEG_INFINITY,
        }
    }

    pub fn in_domain(&self, t: f64) -> bool {
        t.is_finite() && t >= self.domain_lower()
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            ScalarFunction::Affine { a, b } => a * t + b,
            ScalarFunction::Square => t * t,
            ScalarFunction::Power(p) => libm::pow(t, *p),
            ScalarFunction::Sqrt => libm::sqrt(t),
            ScalarFunction::Exp => libm::exp(t),
            ScalarFunction::Polynomial(c) => horner(c, t),
        }
    }

    pub fn eval_checked(&self, t: f64) -> Result<f64> {
        if !self.in_domain(t) {
            return Err(Error::Domain {
                function: self.to_string(),
                value: t,
            });
        }
        Ok(self.eval(t))
    }

    pub fn d1(&self, t: f64) -> f64 {
        match self {
            ScalarFunction::Affine { a, .. } => *a,
            ScalarFunction::Square => 2.0 * t,
            ScalarFunction::Power(p) => p * libm::pow(t, p - 1.0),
            ScalarFunction::Sqrt => 0.5 / libm::sqrt(t),
            ScalarFunction::Exp => libm::exp(t),
            ScalarFunction::Polynomial(c) => horner(&derive(c), t),
        }
    }

    pub fn d2(&self, t: f64) -> f64 {
        match self {
            ScalarFunction::Affine { .. } => 0.0,
            ScalarFunction::Square => 2.0,
            ScalarFunction::Power(p) => p * (p - 1.0) * libm::pow(t, p - 2.0),
            ScalarFunction::Sqrt => -0.25 / (t * libm::sqrt(t)),
            ScalarFunction::Exp => libm::exp(t),
            ScalarFunction::Polynomial(c) => horner(&derive(&derive(c)), t),
        }
    }
}

fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, ci| acc * t + ci)
}

fn derive(c: &[f64]) -> Vec<f64> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(k, ck)| k as f64 * ck)
        .collect()
}

impl fmt::Display for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarFunction::Affine { a, b } => write!(f, "affine:{a},{b}"),
            ScalarFunction::Square => f.write_str("square"),
            ScalarFunction::Power(p) => write!(f, "power:{p}"),
            ScalarFunction::Sqrt => f.write_str("sqrt"),
            ScalarFunction::Exp => f.write_str("exp"),
            ScalarFunction::Polynomial(c) => {
                f.write_str("poly:")?;
                for (i, ci) in c.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{ci}")?;
                }
                Ok(())
            }
        }
    }
}

/// Splits `name:args` and parses the comma separated numbers in `args`.
///
/// Positions in errors are byte offsets into the original input.
pub(crate) struct Spec<'a> {
    pub input: &'a str,
    pub name: &'a str,
    args: Option<(usize, &'a str)>,
}

impl<'a> Spec<'a> {
    pub fn split(input: &'a str) -> Self {
        match input.find(':') {
            Some(i) => Spec {
                input,
                name: &input[..i],
                args: Some((i + 1, &input[i + 1..])),
            },
            None => Spec {
                input,
                name: input,
                args: None,
            },
        }
    }

    pub fn error(&self, position: usize, reason: impl Into<String>) -> Error {
        Error::Parse {
            input: self.input.to_string(),
            position,
            reason: reason.into(),
        }
    }

    pub fn no_args(&self) -> Result<()> {
        match self.args {
            None => Ok(()),
            Some((pos, _)) => {
                Err(self.error(pos - 1, format!("{} takes no parameters", self.name)))
            }
        }
    }

    pub fn numbers(&self) -> Result<Vec<f64>> {
        let (start, args) = self.args.ok_or_else(|| {
            self.error(
                self.input.len(),
                format!("{} needs parameters after ':'", self.name),
            )
        })?;
        let mut out = Vec::new();
        let mut pos = start;
        for part in args.split(',') {
            let trimmed = part.trim();
            let value = trimmed
                .parse::<f64>()
                .map_err(|_| self.error(pos, format!("expected a number, found {trimmed:?}")))?;
            if !value.is_finite() {
                return Err(self.error(pos, "parameter must be finite"));
            }
            out.push(value);
            pos += part.len() + 1;
        }
        Ok(out)
    }

    pub fn exactly(&self, count: usize) -> Result<Vec<f64>> {
        let v = self.numbers()?;
        if v.len() != count {
            let pos = self.args.map(|a| a.0).unwrap_or(self.input.len());
            return Err(self.error(
                pos,
                format!("{} takes {count} parameter(s), got {}", self.name, v.len()),
            ));
        }
        Ok(v)
    }
}

impl FromStr for ScalarFunction {
    type Err = Error;

    /// `affine:a,b`, `square`, `power:p`, `sqrt`, `exp`, `poly:c0,c1,...`.
    fn from_str(s: &str) -> Result<Self> {
        let spec = Spec::split(s.trim());
        match spec.name {
            "affine" => {
                let v = spec.exactly(2)?;
                Ok(ScalarFunction::Affine { a: v[0], b: v[1] })
            }
            "square" => spec.no_args().map(|_| ScalarFunction::Square),
            "power" => {
                let v = spec.exactly(1)?;
                ScalarFunction::power(v[0]).map_err(|_| spec.error(6, "power must be positive"))
            }
            "sqrt" => spec.no_args().map(|_| ScalarFunction::Sqrt),
            "exp" => spec.no_args().map(|_| ScalarFunction::Exp),
            "poly" => ScalarFunction::polynomial(spec.numbers()?),
            other => Err(spec.error(0, format!("unknown function {other:?}"))),
        }
    }
}
