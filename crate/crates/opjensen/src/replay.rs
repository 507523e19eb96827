//! Re-evaluates a serialized report from its witness.

use opjensen_core::converse::converse_check;
use opjensen_core::engine::{
    endpoint_bound_check, hermite_hadamard_check, lambda_pointwise_check, mond_pecaric_check,
    InequalityReport,
};
use opjensen_core::{
    CheckOptions, CoefficientPolicy, HFunction, HermitianMatrix, ScalarFunction, SpectrumInterval,
    UnitVector,
};

use crate::campaign::Subdivision;
use crate::error::{config, Result};
use crate::json::ReportJson;

/// Tolerance for a replayed `lhs`/`rhs` to count as reproduced.
pub const REPLAY_TOL: f64 = 1e-12;

/// Parameters a witness does not carry.
#[derive(Debug, Clone, Default)]
pub struct ReplayContext {
    /// Enclosing interval for the endpoint and converse reports. Hermite–Hadamard
    /// campaigns use the spectrum hull and replay with `None`.
    pub interval: Option<(f64, f64)>,
    /// Hermite–Hadamard weights.
    pub weights: Option<(f64, f64)>,
    pub subdivision: Subdivision,
}

pub fn replay(report: &ReportJson, ctx: &ReplayContext) -> Result<InequalityReport> {
    let w = &report.witness;
    let f: ScalarFunction = w.f.parse()?;
    let h: HFunction = w.h.parse()?;
    let policy: CoefficientPolicy = report.policy.parse()?;
    let a = HermitianMatrix::new(w.n, w.matrix.clone())?;
    let x = UnitVector::new(w.x.clone())?;
    let opts = CheckOptions {
        override_positivity: w.override_positivity,
        seed: w.seed,
    };
    let interval = || -> Result<Option<SpectrumInterval>> {
        ctx.interval
            .map(|(m, big_m)| {
                if w.override_positivity {
                    SpectrumInterval::new_unchecked_positivity(m, big_m)
                } else {
                    SpectrumInterval::new(m, big_m)
                }
            })
            .transpose()
            .map_err(Into::into)
    };
    let name = report.name.as_str();
    let replayed = match name {
        // multi-operator witnesses hold the block-diagonal operator
        "mond-pecaric" | "multi-operator" | "weighted-multi" => {
            mond_pecaric_check(&f, &h, &a, &x, policy, opts)?
        }
        "pointwise-lambda" => match policy {
            CoefficientPolicy::PointwiseLambda(l) => {
                lambda_pointwise_check(&f, &h, &a, &x, l, opts)?
            }
            other => return Err(config(format!("pointwise report with policy {other}"))),
        },
        "endpoint-bound" => endpoint_bound_check(&f, &h, &a, &x, policy, interval()?, opts)?,
        "hh-lower" | "hh-upper" | "hh-squared" => {
            let (p, q) = ctx
                .weights
                .ok_or_else(|| config("replaying a Hermite-Hadamard report needs weights"))?;
            let r = hermite_hadamard_check(&f, &h, &a, &x, p, q, policy, interval()?, opts)?;
            match name {
                "hh-lower" => r.lower,
                "hh-upper" => r.upper,
                _ => r.squared_chain,
            }
        }
        "converse-ratio" | "converse-difference" => {
            let iv = interval()?
                .ok_or_else(|| config("replaying a converse report needs the interval"))?;
            let pf = ctx.subdivision.build(&f, &iv)?;
            let r = converse_check(&pf, &h, &a, &x, policy, opts)?;
            if name == "converse-ratio" {
                r.ratio
            } else {
                r.difference
            }
        }
        other => return Err(config(format!("no replay rule for report `{other}`"))),
    };
    Ok(replayed)
}

fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= REPLAY_TOL * a.abs().max(1.0)
}

/// Replays `report` and checks `lhs` and `rhs` against the recorded values.
pub fn reproduces(report: &ReportJson, ctx: &ReplayContext) -> Result<bool> {
    let r = replay(report, ctx)?;
    Ok(close(r.lhs, report.lhs) && close(r.rhs, report.rhs) && r.holds == report.holds)
}
