//! Verification of the operator inequalities on concrete instances.
//!
//! Every check evaluates both sides of one inequality for a given operator
//! `A`, unit vector `x`, scalar function `f` and weight `h`, and returns an
//! [`InequalityReport`]. A report holds when
//! `rhs - lhs >= -1e-9 * max(1, |rhs|)`.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hfunc::jensen_coefficient;
use crate::optimize::{bisect, golden_max};
use crate::spectral::{block_diag, dot, matrix_function, spectrum_bounds};
use crate::{
    within_margin, CoefficientPolicy, Error, HFunction, HermitianMatrix, Result, ScalarFunction,
    SpectrumInterval, UnitVector, VectorFamily,
};

/// Accuracy requested from [`jensen_coefficient`] by the checks.
pub const COEFFICIENT_TOL: f64 = 1e-12;
/// Largest tolerated `|<Ax,x> - (pm+qM)/(p+q)|`.
pub const BARYCENTER_TOL: f64 = 1e-9;
/// Largest tolerated disagreement between the multi-operator sums and the
/// block-diagonal single-operator evaluation.
pub const BLOCK_AGREEMENT_TOL: f64 = 1e-10;
const WEIGHT_TOL: f64 = 1e-12;
const SPECTRUM_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CheckOptions {
    /// Skip the `0 < m` requirement on the spectrum.
    pub override_positivity: bool,
    /// Seed that produced the instance, recorded in the witness.
    pub seed: Option<u64>,
}

impl CheckOptions {
    pub fn seeded(seed: u64) -> Self {
        CheckOptions {
            seed: Some(seed),
            ..Default::default()
        }
    }

    pub fn with_override(mut self) -> Self {
        self.override_positivity = true;
        self
    }
}

/// Everything needed to replay a report.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub n: usize,
    /// Row-major `n x n` entries of the operator.
    pub matrix: Vec<f64>,
    pub x: Vec<f64>,
    pub f: String,
    pub h: String,
    pub seed: Option<u64>,
    pub override_positivity: bool,
}

impl Witness {
    pub fn new(
        a: &HermitianMatrix,
        x: &[f64],
        f: &ScalarFunction,
        h: &HFunction,
        opts: CheckOptions,
    ) -> Self {
        Witness {
            n: a.dim(),
            matrix: a.entries().to_vec(),
            x: x.to_vec(),
            f: f.to_string(),
            h: h.to_string(),
            seed: opts.seed,
            override_positivity: opts.override_positivity,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub coefficient: f64,
    pub policy: CoefficientPolicy,
    /// `rhs - lhs`
    pub slack: f64,
    pub holds: bool,
    /// The coefficient is infinite and the inequality says nothing.
    pub vacuous: bool,
    pub witness: Witness,
}

impl InequalityReport {
    pub fn new(
        name: &'static str,
        lhs: f64,
        rhs: f64,
        coefficient: f64,
        policy: CoefficientPolicy,
        witness: Witness,
    ) -> Self {
        let vacuous = coefficient.is_infinite();
        let slack = rhs - lhs;
        InequalityReport {
            name,
            lhs,
            rhs,
            coefficient,
            policy,
            slack,
            holds: vacuous || within_margin(slack, rhs),
            vacuous,
            witness,
        }
    }
}

fn coefficient(h: &HFunction, policy: CoefficientPolicy) -> Result<f64> {
    jensen_coefficient(h, policy, COEFFICIENT_TOL)
}

/// `c * value` with `inf * 0 = inf` (an infinite coefficient makes the bound
/// vacuous whatever it multiplies).
fn scale(c: f64, value: f64) -> f64 {
    if c.is_infinite() {
        f64::INFINITY
    } else {
        c * value
    }
}

fn check_positive(a: &HermitianMatrix, opts: CheckOptions) -> Result<()> {
    let (lo, _) = a.spectrum_hull();
    if !opts.override_positivity && lo <= 0.0 {
        return Err(Error::NonPositiveSpectrum { min: lo });
    }
    Ok(())
}

/// `(<Ax,x>, <f(A)x,x>)` for a possibly non-unit `x`.
fn forms(f: &ScalarFunction, a: &HermitianMatrix, x: &[f64]) -> Result<(f64, f64)> {
    let g = a.form(x)?;
    let fa = matrix_function(a, f)?.form(x)?;
    Ok((g, fa))
}

fn resolve_interval(
    a: &HermitianMatrix,
    interval: Option<SpectrumInterval>,
    opts: CheckOptions,
) -> Result<SpectrumInterval> {
    let iv = match interval {
        Some(iv) => iv,
        None if opts.override_positivity => {
            let (lo, hi) = a.spectrum_hull();
            if lo == hi {
                return Err(Error::DegenerateSpectrum { value: lo });
            }
            SpectrumInterval::new_unchecked_positivity(lo, hi)?
        }
        None => spectrum_bounds(a)?,
    };
    if !opts.override_positivity && iv.lower() <= 0.0 {
        return Err(Error::NonPositiveSpectrum { min: iv.lower() });
    }
    let (lo, hi) = a.spectrum_hull();
    if !(iv.contains(lo, SPECTRUM_SLACK) && iv.contains(hi, SPECTRUM_SLACK)) {
        return Err(Error::InvalidInterval {
            m: iv.lower(),
            big_m: iv.upper(),
        });
    }
    Ok(iv)
}

/// `f(<Ax,x>) <= C <f(A)x,x>` with `C` the Jensen coefficient under `policy`.
pub fn mond_pecaric_check(
    f: &ScalarFunction,
    h: &HFunction,
    a: &HermitianMatrix,
    x: &UnitVector,
    policy: CoefficientPolicy,
    opts: CheckOptions,
) -> Result<InequalityReport> {
    mond_pecaric_named("mond-pecaric", f, h, a, x, policy, opts)
}

fn mond_pecaric_named(
    name: &'static str,
    f: &ScalarFunction,
    h: &HFunction,
    a: &HermitianMatrix,
    x: &UnitVector,
    policy: CoefficientPolicy,
    opts: CheckOptions,
) -> Result<InequalityReport> {
    check_positive(a, opts)?;
    let c = coefficient(h, policy)?;
    let (g, fa) = forms(f, a, x.as_slice())?;
    let lhs = f.eval_checked(g)?;
    let witness = Witness::new(a, x.as_slice(), f, h, opts);
    Ok(InequalityReport::new(
        name,
        lhs,
        scale(c, fa),
        c,
        policy,
        witness,
    ))
}

/// `f(<Ax,x>) <= h(lambda)/lambda <f(A)x,x>` for a fixed `lambda in (0,1)`.
pub fn lambda_pointwise_check(
    f: &ScalarFunction,
    h: &HFunction,
    a: &HermitianMatrix,
    x: &UnitVector,
    lambda: f64,
    opts: CheckOptions,
) -> Result<InequalityReport> {
    let policy = CoefficientPolicy::pointwise(lambda)?;
    mond_pecaric_named("pointwise-lambda", f, h, a, x, policy, opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefinementOutcome {
    /// `f(<Ax,x>) <= M <f(A)x,x> < <f(A)x,x>` verified.
    Refined,
    /// `M >= 1` or `f(<Ax,x>) < <f(A)x,x>` fails.
    NotApplicable,
    /// Hypotheses hold but `f(<Ax,x>) <= M <f(A)x,x>` does not.
    Violated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinementReport {
    pub outcome: RefinementOutcome,
    /// `inf_{(0,1)} h(t)/t`
    pub coefficient: f64,
    /// `f(<Ax,x>)`
    pub lhs: f64,
    /// `M <f(A)x,x>`
    pub middle: f64,
    /// `<f(A)x,x>`
    pub upper: f64,
}

const STRICT_MARGIN: f64 = 1e-12;

/// Refinement chain `f(<Ax,x>) <= M <f(A)x,x> < <f(A)x,x>` when `M < 1`.
pub fn refinement_check(
    f: &ScalarFunction,
    h: &HFunction,
    a: &HermitianMatrix,
    x: &UnitVector,
    opts: CheckOptions,
) -> Result<RefinementReport> {
    check_positive(a, opts)?;
    let c = coefficient(h, CoefficientPolicy::Infimum)?;
    let (g, fa) = forms(f, a, x.as_slice())?;
    let lhs = f.eval_checked(g)?;
    let middle = scale(c, fa);
    let outcome = if !(c < 1.0) || !(lhs < fa - STRICT_MARGIN) {
        RefinementOutcome::NotApplicable
    } else if within_margin(middle - lhs, middle) && middle < fa {
        RefinementOutcome::Refined
    } else {
        RefinementOutcome::Violated
    };
    Ok(RefinementReport {
        outcome,
        coefficient: c,
        lhs,
        middle,
        upper: fa,
    })
}

/// `C ((M - t)/(M - m) f(m) + (t - m)/(M - m) f(M))` at `t`.
fn chord(f: &ScalarFunction, iv: &SpectrumInterval, t: f64) -> Result<f64> {
    let (m, big_m) = (iv.lower(), iv.upper());
    let fm = f.eval_checked(m)?;
    let f_big = f.eval_checked(big_m)?;
    Ok((big_m - t) / (big_m - m) * fm + (t - m) / (big_m - m) * f_big)
}

/// `<f(A)x,x> <= C ((M - <Ax,x>)/(M - m) f(m) + (<Ax,x> - m)/(M - m) f(M))`.
///
/// `interval` defaults to the spectrum hull of `a`; a wider enclosing interval
/// may be supplied.
pub fn endpoint_bound_check(
    f: &ScalarFunction,
    h: &HFunction,
    a: &HermitianMatrix,
    x: &UnitVector,
    policy: CoefficientPolicy,
    interval: Option<SpectrumInterval>,
    opts: CheckOptions,
) -> Result<InequalityReport> {
    let iv = resolve_interval(a, interval, opts)?;
    let c = coefficient(h, policy)?;
    let (g, fa) = forms(f, a, x.as_slice())?;
    let rhs = scale(c, chord(f, &iv, g)?);
    let witness = Witness::new(a, x.as_slice(), f, h, opts);
    Ok(InequalityReport::new(
        "endpoint-bound",
        fa,
        rhs,
        c,
        policy,
        witness,
    ))
}

/// Objective `F(u, v)` for [`maximize_f`]; must be non-decreasing in `u`.
#[derive(Clone)]
pub struct FObjective {
    pub name: String,
    rule: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    pub monotone_in_u: bool,
}

impl core::fmt::Debug for FObjective {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("FObjective")
            .field("name", &self.name)
            .field("monotone_in_u", &self.monotone_in_u)
            .finish()
    }
}

impl FObjective {
    pub fn new<F>(name: impl Into<String>, rule: F, monotone_in_u: bool) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        FObjective {
            name: name.into(),
            rule: Arc::new(rule),
            monotone_in_u,
        }
    }

    /// `u / v`
    pub fn ratio() -> Self {
        Self::new("u/v", |u, v| u / v, true)
    }

    /// `u - v`
    pub fn difference() -> Self {
        Self::new("u-v", |u, v| u - v, true)
    }

    /// `u - c v`
    pub fn scaled_difference(c: f64) -> Self {
        Self::new("u-c*v", move |u, v| u - c * v, true)
    }

    pub fn eval(&self, u: f64, v: f64) -> f64 {
        (self.rule)(u, v)
    }
}

const MONOTONE_SPOT_CHECKS: usize = 100;

fn spot_check_monotone(obj: &FObjective, u_range: (f64, f64), v_range: (f64, f64)) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..MONOTONE_SPOT_CHECKS {
        let a = u_range.0 + (u_range.1 - u_range.0) * rng.random::<f64>();
        let b = u_range.0 + (u_range.1 - u_range.0) * rng.random::<f64>();
        let v = v_range.0 + (v_range.1 - v_range.0) * rng.random::<f64>();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (f_lo, f_hi) = (obj.eval(lo, v), obj.eval(hi, v));
        if f_lo.is_finite()
            && f_hi.is_finite()
            && f_lo > f_hi + 1e-12 * crate::max(1.0, libm::fabs(f_hi))
        {
            return Err(Error::NotMonotone {
                u_lo: lo,
                u_hi: hi,
                v,
            });
        }
    }
    Ok(())
}

fn improves(candidate: f64, best: f64) -> bool {
    candidate > best + 1e-14 * crate::max(1.0, libm::fabs(best))
}

/// Maximizes `theta -> F(C (theta f(m) + (1-theta) f(M)), f(theta m + (1-theta) M))`
/// over `[0, 1]`.
///
/// Uniform grid of `grid` points followed by golden-section refinement to
/// `1e-10` around the best grid point. Ties go to the smaller `theta`.
pub fn maximize_f(
    objective: &FObjective,
    f: &ScalarFunction,
    h: &HFunction,
    interval: &SpectrumInterval,
    policy: CoefficientPolicy,
    grid: usize,
) -> Result<(f64, f64)> {
    if grid < 3 {
        return Err(Error::InvalidParameter {
            name: "grid",
            value: grid as f64,
        });
    }
    if !objective.monotone_in_u {
        return Err(Error::InvalidParameter {
            name: "monotone_in_u",
            value: 0.0,
        });
    }
    let c = coefficient(h, policy)?;
    let (m, big_m) = (interval.lower(), interval.upper());
    let fm = f.eval_checked(m)?;
    let f_big = f.eval_checked(big_m)?;

    let eval = |theta: f64| -> Result<f64> {
        let u = scale(c, theta * fm + (1.0 - theta) * f_big);
        let v = f.eval_checked(theta * m + (1.0 - theta) * big_m)?;
        let value = objective.eval(u, v);
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::ObjectiveDomain { theta, u, v })
        }
    };

    let thetas = (0..grid).map(|k| k as f64 / (grid - 1) as f64);
    let mut best = (0usize, f64::NEG_INFINITY);
    let mut v_range = (f64::INFINITY, f64::NEG_INFINITY);
    for (k, theta) in thetas.enumerate() {
        let value = eval(theta)?;
        let v = f.eval(theta * m + (1.0 - theta) * big_m);
        v_range = (v_range.0.min(v), v_range.1.max(v));
        if k == 0 || improves(value, best.1) {
            best = (k, value);
        }
    }
    let u_range = (scale(c, fm.min(f_big)), scale(c, fm.max(f_big)));
    spot_check_monotone(objective, u_range, v_range)?;

    let step = 1.0 / (grid - 1) as f64;
    let lo = (best.0 as f64 - 1.0).max(0.0) * step;
    let hi = ((best.0 + 1) as f64 * step).min(1.0);
    let mut theta_star = best.0 as f64 * step;
    let mut value = best.1;
    let (t, v) = golden_max(eval, lo, hi, 1e-10)?;
    if improves(v, value) {
        theta_star = t;
        value = v;
    }
    Ok((theta_star, value))
}

/// The three linked reports of the Hermite–Hadamard chain.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteHadamardReport {
    /// `f((pm+qM)/(p+q)) / C <= <f(A)x,x>`
    pub lower: InequalityReport,
    /// `<f(A)x,x> <= C (p f(m) + q f(M))/(p+q)`
    pub upper: InequalityReport,
    /// `f((pm+qM)/(p+q)) <= C^2 (p f(m) + q f(M))/(p+q)`, the form the
    /// two-step argument through both bounds actually yields.
    pub squared_chain: InequalityReport,
    pub barycenter: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn hermite_hadamard_check(
    f: &ScalarFunction,
    h: &HFunction,
    a: &HermitianMatrix,
    x: &UnitVector,
    p: f64,
    q: f64,
    policy: CoefficientPolicy,
    interval: Option<SpectrumInterval>,
    opts: CheckOptions,
) -> Result<HermiteHadamardReport> {
    if !(p >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
        });
    }
    if !(q >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "q",
            value: q,
        });
    }
    if !(p + q > 0.0) {
        return Err(Error::InvalidParameter {
            name: "p + q",
            value: p + q,
        });
    }
    let iv = resolve_interval(a, interval, opts)?;
    let (m, big_m) = (iv.lower(), iv.upper());
    let barycenter = (p * m + q * big_m) / (p + q);
    let (g, fa) = forms(f, a, x.as_slice())?;
    let residual = g - barycenter;
    if libm::fabs(residual) > BARYCENTER_TOL {
        return Err(Error::BarycenterMismatch { residual });
    }
    let c = coefficient(h, policy)?;
    let f_bary = f.eval_checked(barycenter)?;
    let endpoint_mean = (p * f.eval_checked(m)? + q * f.eval_checked(big_m)?) / (p + q);
    let witness = Witness::new(a, x.as_slice(), f, h, opts);
    let lower_lhs = if c.is_infinite() { 0.0 } else { f_bary / c };
    Ok(HermiteHadamardReport {
        lower: InequalityReport::new("hh-lower", lower_lhs, fa, c, policy, witness.clone()),
        upper: InequalityReport::new(
            "hh-upper",
            fa,
            scale(c, endpoint_mean),
            c,
            policy,
            witness.clone(),
        ),
        squared_chain: InequalityReport::new(
            "hh-squared",
            f_bary,
            scale(c, scale(c, endpoint_mean)),
            c,
            policy,
            witness,
        ),
        barycenter,
    })
}

/// Moves `y` toward an extreme eigenvector of `a` until `<Ax,x> = target`.
///
/// `target` must lie in the spectrum hull of `a`.
pub fn match_barycenter(a: &HermitianMatrix, y: &UnitVector, target: f64) -> Result<UnitVector> {
    let (lo, hi) = a.spectrum_hull();
    if !(target >= lo - SPECTRUM_SLACK && target <= hi + SPECTRUM_SLACK) {
        return Err(Error::InvalidParameter {
            name: "target",
            value: target,
        });
    }
    let g = a.form(y.as_slice())?;
    if g == target {
        return Ok(y.clone());
    }
    let e = if target > g {
        a.eigen().eigenvector(a.dim() - 1)
    } else {
        a.eigen().eigenvector(0)
    };
    // keep the path away from the origin
    let sign = if dot(&e, y.as_slice()) < 0.0 {
        -1.0
    } else {
        1.0
    };
    let path = |s: f64| -> Vec<f64> {
        y.as_slice()
            .iter()
            .zip(&e)
            .map(|(yi, ei)| (1.0 - s) * yi + s * sign * ei)
            .collect()
    };
    let value = |s: f64| -> f64 {
        let v = path(s);
        a.form(&v)
            .map(|num| num / dot(&v, &v) - target)
            .unwrap_or(f64::NAN)
    };
    let end = value(1.0);
    let s = if libm::fabs(end) <= SPECTRUM_SLACK {
        1.0
    } else {
        bisect(value, 0.0, 1.0, 1e-16, 200)?
    };
    UnitVector::normalized(path(s))
}

/// Result of a multi-operator check together with the block-diagonal replay.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiReport {
    /// Evaluated from the per-operator sums; the witness is the block-diagonal
    /// operator and the stacked vector.
    pub report: InequalityReport,
    /// The same instance through [`mond_pecaric_check`] on the block operator.
    pub block_report: InequalityReport,
    /// `max(|lhs - lhs_block|, |rhs - rhs_block|)`
    pub agreement: f64,
}

impl MultiReport {
    pub fn agrees(&self) -> bool {
        self.agreement <= BLOCK_AGREEMENT_TOL
    }
}

/// `f(sum <A_i x_i, x_i>) <= C sum <f(A_i) x_i, x_i>` for `sum ||x_i||^2 = 1`.
pub fn multi_operator_check(
    f: &ScalarFunction,
    h: &HFunction,
    ops: &[HermitianMatrix],
    xs: &VectorFamily,
    policy: CoefficientPolicy,
    opts: CheckOptions,
) -> Result<MultiReport> {
    multi_named("multi-operator", f, h, ops, xs, policy, opts)
}

fn multi_named(
    name: &'static str,
    f: &ScalarFunction,
    h: &HFunction,
    ops: &[HermitianMatrix],
    xs: &VectorFamily,
    policy: CoefficientPolicy,
    opts: CheckOptions,
) -> Result<MultiReport> {
    if ops.is_empty() {
        return Err(Error::Empty {
            what: "operator list",
        });
    }
    if ops.len() != xs.len() {
        return Err(Error::DimensionMismatch {
            expected: ops.len(),
            found: xs.len(),
        });
    }
    let c = coefficient(h, policy)?;
    let mut g = 0.0;
    let mut fa = 0.0;
    for (a, x) in ops.iter().zip(xs.vectors()) {
        check_positive(a, opts)?;
        let (gi, fi) = forms(f, a, x)?;
        g += gi;
        fa += fi;
    }
    let lhs = f.eval_checked(g)?;
    let block = block_diag(ops)?;
    let stacked = xs.stacked()?;
    let block_report = mond_pecaric_check(f, h, &block, &stacked, policy, opts)?;
    let report = InequalityReport::new(
        name,
        lhs,
        scale(c, fa),
        c,
        policy,
        Witness::new(&block, stacked.as_slice(), f, h, opts),
    );
    let agreement = diff(report.lhs, block_report.lhs).max(diff(report.rhs, block_report.rhs));
    Ok(MultiReport {
        report,
        block_report,
        agreement,
    })
}

fn diff(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        libm::fabs(a - b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedReport {
    pub report: InequalityReport,
    /// The same instance as a multi-operator check with `x_i = sqrt(p_i) x`.
    pub substitution: MultiReport,
    /// `max(|lhs - lhs_sub|, |rhs - rhs_sub|)`
    pub agreement: f64,
}

/// `f(sum p_i <A_i x, x>) <= C sum p_i <f(A_i) x, x>` for weights summing to one.
pub fn weighted_multi_check(
    f: &ScalarFunction,
    h: &HFunction,
    ops: &[HermitianMatrix],
    x: &UnitVector,
    weights: &[f64],
    policy: CoefficientPolicy,
    opts: CheckOptions,
) -> Result<WeightedReport> {
    if ops.is_empty() {
        return Err(Error::Empty {
            what: "operator list",
        });
    }
    if ops.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: ops.len(),
            found: weights.len(),
        });
    }
    let total: f64 = weights.iter().sum();
    if weights.iter().any(|p| !(*p >= 0.0)) || libm::fabs(total - 1.0) > WEIGHT_TOL {
        return Err(Error::WeightSum { total });
    }
    let c = coefficient(h, policy)?;
    let mut g = 0.0;
    let mut fa = 0.0;
    for (a, p) in ops.iter().zip(weights) {
        check_positive(a, opts)?;
        let (gi, fi) = forms(f, a, x.as_slice())?;
        g += p * gi;
        fa += p * fi;
    }
    let lhs = f.eval_checked(g)?;
    let family = VectorFamily::new(
        weights
            .iter()
            .map(|p| x.as_slice().iter().map(|xi| libm::sqrt(*p) * xi).collect())
            .collect(),
    )?;
    let substitution = multi_named("weighted-multi", f, h, ops, &family, policy, opts)?;
    let report = InequalityReport::new(
        "weighted-multi",
        lhs,
        scale(c, fa),
        c,
        policy,
        substitution.report.witness.clone(),
    );
    let agreement =
        diff(report.lhs, substitution.report.lhs).max(diff(report.rhs, substitution.report.rhs));
    Ok(WeightedReport {
        report,
        substitution,
        agreement,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    fn diag(v: &[f64]) -> HermitianMatrix {
        HermitianMatrix::diag(v).unwrap()
    }

    fn unit(v: &[f64]) -> UnitVector {
        UnitVector::normalized(v.to_vec()).unwrap()
    }

    fn half() -> UnitVector {
        UnitVector::new(vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap()
    }

    fn sqrt_h() -> HFunction {
        HFunction::power(0.5).unwrap()
    }

    #[test]
    fn counterexample_instance_is_equality_under_safe_policy() {
        let a = diag(&[1.0, 0.0]);
        let opts = CheckOptions::default().with_override();
        let r = mond_pecaric_check(
            &ScalarFunction::Sqrt,
            &sqrt_h(),
            &a,
            &half(),
            CoefficientPolicy::Safe,
            opts,
        )
        .unwrap();
        assert!(libm::fabs(r.lhs - libm::sqrt(0.5)) < 1e-15);
        assert!(libm::fabs(r.rhs - SQRT_2 * 0.5) < 1e-15);
        assert!(libm::fabs(r.slack) < 1e-12);
        assert!(r.holds);
    }

    #[test]
    fn counterexample_needs_override() {
        let a = diag(&[1.0, 0.0]);
        let err = mond_pecaric_check(
            &ScalarFunction::Sqrt,
            &sqrt_h(),
            &a,
            &half(),
            CoefficientPolicy::Safe,
            CheckOptions::default(),
        );
        assert!(matches!(err, Err(Error::NonPositiveSpectrum { .. })));
    }

    #[test]
    fn infimum_coefficient_fails_on_counterexample() {
        let a = diag(&[1.0, 0.0]);
        let opts = CheckOptions::default().with_override();
        let r = mond_pecaric_check(
            &ScalarFunction::Sqrt,
            &sqrt_h(),
            &a,
            &half(),
            CoefficientPolicy::Infimum,
            opts,
        )
        .unwrap();
        assert_eq!(r.coefficient, 1.0);
        assert!(!r.holds);
        assert!(r.slack < 0.0);
    }

    #[test]
    fn lambda_examples() {
        let a = diag(&[1.0, 0.0]);
        let opts = CheckOptions::default().with_override();
        let r = lambda_pointwise_check(&ScalarFunction::Sqrt, &sqrt_h(), &a, &half(), 0.64, opts)
            .unwrap();
        assert!(libm::fabs(r.coefficient - 1.25) < 1e-15);
        assert!(libm::fabs(r.rhs - 0.625) < 1e-15);
        assert!(!r.holds);
        let r = lambda_pointwise_check(&ScalarFunction::Sqrt, &sqrt_h(), &a, &half(), 0.5, opts)
            .unwrap();
        assert!(libm::fabs(r.slack) < 1e-12 && r.holds);
        let r = lambda_pointwise_check(
            &ScalarFunction::Square,
            &HFunction::Identity,
            &diag(&[1.0, 2.0]),
            &half(),
            0.25,
            CheckOptions::default(),
        )
        .unwrap();
        assert_eq!(r.coefficient, 1.0);
        assert!(r.holds);
    }

    #[test]
    fn linear_f_gives_equality() {
        let a = HermitianMatrix::from_rows(&[vec![1.5, 0.2], vec![0.2, 1.2]]).unwrap();
        let x = unit(&[0.3, 0.8]);
        let f = ScalarFunction::Affine { a: 1.0, b: 0.0 };
        let r = mond_pecaric_check(
            &f,
            &HFunction::Identity,
            &a,
            &x,
            CoefficientPolicy::Safe,
            CheckOptions::default(),
        )
        .unwrap();
        assert!(libm::fabs(r.slack) < 1e-14);
    }

    #[test]
    fn square_identity_arithmetic() {
        let r = mond_pecaric_check(
            &ScalarFunction::Square,
            &HFunction::Identity,
            &diag(&[1.0, 2.0]),
            &half(),
            CoefficientPolicy::Safe,
            CheckOptions::default(),
        )
        .unwrap();
        assert!(libm::fabs(r.lhs - 2.25) < 1e-14);
        assert!(libm::fabs(r.rhs - 2.5) < 1e-14);
        assert!(r.holds);
    }

    #[test]
    fn infinite_coefficient_is_vacuous() {
        let h = HFunction::tabulated("huge", |_| 1e20);
        let r = mond_pecaric_check(
            &ScalarFunction::Square,
            &h,
            &diag(&[1.0, 2.0]),
            &half(),
            CoefficientPolicy::Infimum,
            CheckOptions::default(),
        )
        .unwrap();
        assert!(r.vacuous && r.holds);
    }

    #[test]
    fn refinement_outcomes() {
        let opts = CheckOptions::default();
        let zero = ScalarFunction::Polynomial(vec![0.0]);
        let half_h = HFunction::tabulated("t/2", |t| 0.5 * t);
        let r = refinement_check(&zero, &half_h, &diag(&[1.0, 2.0]), &half(), opts).unwrap();
        assert_eq!(r.outcome, RefinementOutcome::NotApplicable);

        let r = refinement_check(
            &ScalarFunction::Square,
            &HFunction::Identity,
            &diag(&[1.0, 2.0]),
            &half(),
            opts,
        )
        .unwrap();
        assert_eq!(r.outcome, RefinementOutcome::NotApplicable);

        // mean 0.5075, second moment 1.000075: 0.2576 <= 0.5000375 < 1.000075
        let a = diag(&[0.01, 2.0]);
        let x = UnitVector::new(vec![libm::sqrt(0.75), 0.5]).unwrap();
        let r = refinement_check(&ScalarFunction::Square, &half_h, &a, &x, opts).unwrap();
        assert_eq!(r.outcome, RefinementOutcome::Refined);
        assert!(libm::fabs(r.coefficient - 0.5) < 1e-12);

        let r = refinement_check(
            &ScalarFunction::Square,
            &half_h,
            &diag(&[1.0, 2.0]),
            &half(),
            opts,
        )
        .unwrap();
        assert_eq!(r.outcome, RefinementOutcome::Violated);
    }

    #[test]
    fn endpoint_examples() {
        let opts = CheckOptions::default();
        let r = endpoint_bound_check(
            &ScalarFunction::Square,
            &HFunction::Identity,
            &diag(&[1.0, 2.0]),
            &half(),
            CoefficientPolicy::Safe,
            None,
            opts,
        )
        .unwrap();
        assert!(libm::fabs(r.lhs - 2.5) < 1e-14 && libm::fabs(r.rhs - 2.5) < 1e-14);

        let x = unit(&[1.0, 1.0, 1.0]);
        let r = endpoint_bound_check(
            &ScalarFunction::Square,
            &HFunction::Identity,
            &diag(&[1.0, 1.5, 2.0]),
            &x,
            CoefficientPolicy::Safe,
            None,
            opts,
        )
        .unwrap();
        assert!(libm::fabs(r.lhs - 29.0 / 12.0) < 1e-14);
        assert!(libm::fabs(r.rhs - 2.5) < 1e-14);
        assert!(r.holds);

        let x = unit(&[1.0, 0.0]);
        let r = endpoint_bound_check(
            &ScalarFunction::Exp,
            &HFunction::constant(1.0).unwrap(),
            &diag(&[1.0, 2.0]),
            &x,
            CoefficientPolicy::Safe,
            None,
            opts,
        )
        .unwrap();
        assert!(libm::fabs(r.lhs - libm::exp(1.0)) < 1e-14);
        assert!(libm::fabs(r.rhs - 2.0 * libm::exp(1.0)) < 1e-14);

        assert!(matches!(
            endpoint_bound_check(
                &ScalarFunction::Square,
                &HFunction::Identity,
                &diag(&[3.0, 3.0]),
                &half(),
                CoefficientPolicy::Safe,
                None,
                opts
            ),
            Err(Error::DegenerateSpectrum { .. })
        ));
    }

    #[test]
    fn maximize_examples() {
        let iv = SpectrumInterval::new(1.0, 2.0).unwrap();
        let (t, v) = maximize_f(
            &FObjective::difference(),
            &ScalarFunction::Square,
            &HFunction::Identity,
            &iv,
            CoefficientPolicy::Safe,
            1001,
        )
        .unwrap();
        // argmax of a smooth maximum is only resolvable to ~sqrt(eps)
        assert!(libm::fabs(t - 0.5) < 1e-6 && libm::fabs(v - 0.25) < 1e-14);
        let (t, v) = maximize_f(
            &FObjective::ratio(),
            &ScalarFunction::Square,
            &HFunction::Identity,
            &iv,
            CoefficientPolicy::Safe,
            1001,
        )
        .unwrap();
        assert!(libm::fabs(t - 2.0 / 3.0) < 1e-6 && libm::fabs(v - 1.125) < 1e-14);
        let f = ScalarFunction::Affine { a: 1.0, b: 0.0 };
        let (t, v) = maximize_f(
            &FObjective::difference(),
            &f,
            &HFunction::Identity,
            &iv,
            CoefficientPolicy::Safe,
            101,
        )
        .unwrap();
        assert_eq!((t, v), (0.0, 0.0));
    }

    #[test]
    fn maximize_errors() {
        let iv = SpectrumInterval::new_unchecked_positivity(0.0, 1.0).unwrap();
        let r = maximize_f(
            &FObjective::ratio(),
            &ScalarFunction::Square,
            &HFunction::Identity,
            &iv,
            CoefficientPolicy::Safe,
            11,
        );
        assert!(matches!(r, Err(Error::ObjectiveDomain { .. })));
        let iv = SpectrumInterval::new(1.0, 2.0).unwrap();
        let bad = FObjective::new("-u", |u, _| -u, true);
        let r = maximize_f(
            &bad,
            &ScalarFunction::Square,
            &HFunction::Identity,
            &iv,
            CoefficientPolicy::Safe,
            11,
        );
        assert!(matches!(r, Err(Error::NotMonotone { .. })));
        let r = maximize_f(
            &FObjective::ratio(),
            &ScalarFunction::Square,
            &HFunction::Identity,
            &iv,
            CoefficientPolicy::Safe,
            2,
        );
        assert!(r.is_err());
    }

    #[test]
    fn hermite_hadamard_worked_example() {
        let x = UnitVector::new(vec![libm::sqrt(2.0 / 3.0), libm::sqrt(1.0 / 3.0)]).unwrap();
        let r = hermite_hadamard_check(
            &ScalarFunction::Square,
            &HFunction::Identity,
            &diag(&[1.0, 2.0]),
            &x,
            2.0,
            1.0,
            CoefficientPolicy::Safe,
            None,
            CheckOptions::default(),
        )
        .unwrap();
        assert!(libm::fabs(r.lower.lhs - 16.0 / 9.0) < 1e-12);
        assert!(libm::fabs(r.lower.rhs - 2.0) < 1e-12);
        assert!(libm::fabs(r.upper.rhs - 2.0) < 1e-12);
        assert!(r.lower.holds && r.upper.holds && r.squared_chain.holds);
    }

    #[test]
    fn hermite_hadamard_sqrt_example() {
        let r = hermite_hadamard_check(
            &ScalarFunction::Sqrt,
            &sqrt_h(),
            &diag(&[1.0, 4.0]),
            &half(),
            1.0,
            1.0,
            CoefficientPolicy::Safe,
            None,
            CheckOptions::default(),
        )
        .unwrap();
        assert!(libm::fabs(r.barycenter - 2.5) < 1e-15);
        assert!(libm::fabs(r.upper.lhs - 1.5) < 1e-14);
        assert!(r.lower.holds && r.upper.holds);
    }

    #[test]
    fn hermite_hadamard_eigenvector_endpoint() {
        let x = unit(&[1.0, 0.0]);
        let r = hermite_hadamard_check(
            &ScalarFunction::Exp,
            &HFunction::Identity,
            &diag(&[1.0, 2.0]),
            &x,
            1.0,
            0.0,
            CoefficientPolicy::Safe,
            None,
            CheckOptions::default(),
        )
        .unwrap();
        let e = libm::exp(1.0);
        for v in [r.lower.lhs, r.lower.rhs, r.upper.rhs] {
            assert!(libm::fabs(v - e) < 1e-14);
        }
    }

    #[test]
    fn hermite_hadamard_rejects_mismatch() {
        let r = hermite_hadamard_check(
            &ScalarFunction::Square,
            &HFunction::Identity,
            &diag(&[1.0, 2.0]),
            &half(),
            2.0,
            1.0,
            CoefficientPolicy::Safe,
            None,
            CheckOptions::default(),
        );
        match r {
            Err(Error::BarycenterMismatch { residual }) => {
                assert!(libm::fabs(residual - (1.5 - 4.0 / 3.0)) < 1e-14)
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn barycenter_matching() {
        let a = HermitianMatrix::from_rows(&[
            vec![1.2, 0.3, 0.0],
            vec![0.3, 1.5, 0.1],
            vec![0.0, 0.1, 1.9],
        ])
        .unwrap();
        let y = unit(&[0.2, -0.7, 0.4]);
        let (lo, hi) = a.spectrum_hull();
        for target in [lo, 0.5 * (lo + hi), hi, lo + 0.1] {
            let x = match_barycenter(&a, &y, target).unwrap();
            assert!(libm::fabs(a.form(x.as_slice()).unwrap() - target) < 1e-12);
        }
    }

    #[test]
    fn multi_examples() {
        let ops = [diag(&[1.0, 2.0]), diag(&[2.0, 3.0])];
        let xs = VectorFamily::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let r = multi_operator_check(
            &ScalarFunction::Square,
            &HFunction::Identity,
            &ops,
            &xs,
            CoefficientPolicy::Safe,
            CheckOptions::default(),
        )
        .unwrap();
        assert!(libm::fabs(r.report.lhs - 4.0) < 1e-14);
        assert!(libm::fabs(r.report.rhs - 4.5) < 1e-14);
        assert!(r.agrees());

        let single = multi_operator_check(
            &ScalarFunction::Square,
            &HFunction::Identity,
            &ops[..1],
            &VectorFamily::new(vec![half().into_inner()]).unwrap(),
            CoefficientPolicy::Safe,
            CheckOptions::default(),
        )
        .unwrap();
        let direct = mond_pecaric_check(
            &ScalarFunction::Square,
            &HFunction::Identity,
            &ops[0],
            &half(),
            CoefficientPolicy::Safe,
            CheckOptions::default(),
        )
        .unwrap();
        assert_eq!(single.report.lhs, direct.lhs);
        assert_eq!(single.report.rhs, direct.rhs);
    }

    #[test]
    fn weighted_examples() {
        let ops = [diag(&[1.0, 2.0]), diag(&[2.0, 3.0])];
        let r = weighted_multi_check(
            &ScalarFunction::Square,
            &HFunction::Identity,
            &ops,
            &half(),
            &[0.5, 0.5],
            CoefficientPolicy::Safe,
            CheckOptions::default(),
        )
        .unwrap();
        assert!(libm::fabs(r.report.lhs - 4.0) < 1e-14);
        assert!(libm::fabs(r.report.rhs - 4.5) < 1e-14);
        assert!(r.agreement <= 1e-12);

        let same = [ops[0].clone(), ops[0].clone()];
        let r = weighted_multi_check(
            &ScalarFunction::Square,
            &HFunction::Identity,
            &same,
            &half(),
            &[0.5, 0.5],
            CoefficientPolicy::Safe,
            CheckOptions::default(),
        )
        .unwrap();
        assert!(libm::fabs(r.report.lhs - 2.25) < 1e-14);

        assert!(matches!(
            weighted_multi_check(
                &ScalarFunction::Square,
                &HFunction::Identity,
                &ops,
                &half(),
                &[0.6, 0.6],
                CoefficientPolicy::Safe,
                CheckOptions::default()
            ),
            Err(Error::WeightSum { .. })
        ));
    }
}
