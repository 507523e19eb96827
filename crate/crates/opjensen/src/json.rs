//! Serializable forms of reports, witnesses and converse constants.
//!
//! Non-finite reals are written as the strings `"inf"`, `"-inf"` and `"nan"`
//! so that every report survives a JSON round trip.

use opjensen_core::engine::{InequalityReport, Witness};
use opjensen_core::{ConverseConstants, PieceData};
use serde::{Deserialize, Serialize};

pub mod real {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Number(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if x.is_nan() {
            s.serialize_str("nan")
        } else if *x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Number(x) => Ok(x),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(D::Error::custom(format!("not a real: {other}"))),
            },
        }
    }
}

pub mod opt_real {
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    struct Wrapped(#[serde(with = "super::real")] f64);

    pub fn serialize<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => super::real::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Ok(Option::<Wrapped>::deserialize(d)?.map(|w| w.0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessJson {
    pub n: usize,
    pub matrix: Vec<f64>,
    pub x: Vec<f64>,
    pub f: String,
    pub h: String,
    pub seed: Option<u64>,
    #[serde(rename = "override")]
    pub override_positivity: bool,
}

impl From<&Witness> for WitnessJson {
    fn from(w: &Witness) -> Self {
        WitnessJson {
            n: w.n,
            matrix: w.matrix.clone(),
            x: w.x.clone(),
            f: w.f.clone(),
            h: w.h.clone(),
            seed: w.seed,
            override_positivity: w.override_positivity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub name: String,
    #[serde(with = "real")]
    pub lhs: f64,
    #[serde(with = "real")]
    pub rhs: f64,
    #[serde(with = "real")]
    pub coefficient: f64,
    pub policy: String,
    #[serde(with = "real")]
    pub slack: f64,
    pub holds: bool,
    pub witness: WitnessJson,
}

impl ReportJson {
    pub fn is_vacuous(&self) -> bool {
        self.coefficient.is_infinite()
    }
}

impl From<&InequalityReport> for ReportJson {
    fn from(r: &InequalityReport) -> Self {
        ReportJson {
            name: r.name.to_string(),
            lhs: r.lhs,
            rhs: r.rhs,
            coefficient: r.coefficient,
            policy: r.policy.to_string(),
            slack: r.slack,
            holds: r.holds,
            witness: (&r.witness).into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PieceJson {
    pub i: usize,
    pub x_lo: f64,
    pub x_hi: f64,
    #[serde(with = "real")]
    pub mu: f64,
    pub class: String,
    #[serde(with = "opt_real")]
    pub t_bar_ratio: Option<f64>,
    #[serde(with = "opt_real")]
    pub t_bar_diff: Option<f64>,
    #[serde(with = "opt_real")]
    pub lambda_ratio: Option<f64>,
    #[serde(with = "opt_real")]
    pub lambda_diff: Option<f64>,
}

impl From<&PieceData> for PieceJson {
    fn from(p: &PieceData) -> Self {
        PieceJson {
            i: p.index,
            x_lo: p.lo,
            x_hi: p.hi,
            mu: p.mu,
            class: p.class.as_str().to_string(),
            t_bar_ratio: p.t_bar_ratio,
            t_bar_diff: p.t_bar_diff,
            lambda_ratio: p.lambda_ratio,
            lambda_diff: p.lambda_diff,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsJson {
    #[serde(with = "real")]
    pub alpha: f64,
    #[serde(with = "real")]
    pub beta: f64,
    #[serde(with = "real")]
    pub coefficient: f64,
    pub pieces: Vec<PieceJson>,
}

impl From<&ConverseConstants> for ConstantsJson {
    fn from(k: &ConverseConstants) -> Self {
        ConstantsJson {
            alpha: k.alpha,
            beta: k.beta,
            coefficient: k.coefficient,
            pieces: k.pieces.iter().map(PieceJson::from).collect(),
        }
    }
}
