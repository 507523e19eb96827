//! Converse constants `alpha` and `beta` for piecewise twice differentiable `f`.
//!
//! For a subdivision `m = x_0 < x_1 < ... < x_n = M` adapted to the sign of
//! `f''`, each piece `[x_{i-1}, x_i]` has the chord
//! `L_i(t) = f(x_{i-1}) + mu_i (t - x_{i-1})`. The constants bound
//! `max L_i/f` (ratio form, giving `alpha`) and `max (L_i - f)` (difference
//! form, giving `beta`) over all pieces, floored at 1 and 0 respectively:
//!
//! * convex pieces with `mu_i != 0`: `mu_i / f'(t)` at the root of
//!   `G_i(t) = mu_i f(t) - L_i(t) f'(t)`, and `L_i(t) - f(t)` at the root of
//!   `mu_i - f'(t)`;
//! * pieces with `mu_i == 0`: `f(x_{i-1}) / f(t)` and `f(x_{i-1}) - f(t)` at
//!   the root of `f'`;
//! * concave and linear pieces contribute the floors.
//!
//! The operator bounds are then `<f(A)x,x> / (C alpha) <= f(<Ax,x>)` and
//! `<f(A)x,x> / C - beta <= f(<Ax,x>)` with `C` the Jensen coefficient.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use crate::engine::{CheckOptions, InequalityReport, Witness, COEFFICIENT_TOL};
use crate::hfunc::{classify_coefficient, jensen_coefficient};
use crate::optimize::bisect;
use crate::spectral::{block_diag, matrix_function};
use crate::{
    CoefficientPolicy, Error, HFunction, HermitianMatrix, Result, ScalarFunction, SpectrumInterval,
    UnitVector, VectorFamily,
};

const CURVATURE_SAMPLES: usize = 101;
const CURVATURE_TOL: f64 = 1e-12;
/// Offset (relative to the piece width) at which one-sided limits of `f''`
/// are sampled.
const ONE_SIDED_OFFSET: f64 = 1e-8;
const ROOT_TOL: f64 = 1e-12;
const ROOT_MAX_ITER: usize = 200;
const INFLECTION_GRID: usize = 1001;
const INFLECTION_TOL: f64 = 1e-10;
const POSITIVITY_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PieceClass {
    /// `f'' > 0` on the open piece (weakly at isolated points)
    ConvexPiece,
    /// `f'' < 0` on the open piece (weakly at isolated points)
    ConcavePiece,
    /// `f'' == 0` on the piece
    FlatOrNeither,
}

impl PieceClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            PieceClass::ConvexPiece => "convex",
            PieceClass::ConcavePiece => "concave",
            PieceClass::FlatOrNeither => "flat",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PieceData {
    /// 1-based piece index `i` of `[x_{i-1}, x_i]`.
    pub index: usize,
    pub lo: f64,
    pub hi: f64,
    /// Chord slope `(f(x_i) - f(x_{i-1})) / (x_i - x_{i-1})`.
    pub mu: f64,
    /// `(f(x_{i-1}), f(x_i))`, the chord's endpoint values.
    pub chord: (f64, f64),
    pub class: PieceClass,
    /// Stationary point of `L_i / f` (ratio form).
    pub t_bar_ratio: Option<f64>,
    /// Stationary point of `L_i - f` (difference form).
    pub t_bar_diff: Option<f64>,
    /// This piece's ratio contribution to `alpha` before flooring.
    pub ratio: Option<f64>,
    /// This piece's difference contribution to `beta` before flooring.
    pub difference: Option<f64>,
    /// `C * max_t L_i/f`; `C * ratio` when set, otherwise `C`.
    pub lambda_ratio: Option<f64>,
    /// `C * max_t (L_i - f)`; `C * difference` when set, otherwise 0.
    pub lambda_diff: Option<f64>,
}

impl PieceData {
    pub fn chord_at(&self, t: f64) -> f64 {
        self.chord.0 + self.mu * (t - self.lo)
    }

    fn has_zero_slope(&self) -> bool {
        let scale = crate::max(
            1.0,
            crate::max(libm::fabs(self.chord.0), libm::fabs(self.chord.1)),
        );
        libm::fabs(self.mu * (self.hi - self.lo)) <= 1e-14 * scale
    }
}

/// `f` on `[m, M]` with a subdivision on whose open pieces `f''` keeps one sign.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseC2Function {
    base: ScalarFunction,
    knots: Vec<f64>,
}

impl PiecewiseC2Function {
    pub fn new(base: ScalarFunction, knots: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidSubdivision {
                reason: "need at least the two endpoints m and M".to_string(),
            });
        }
        if knots.iter().any(|k| !k.is_finite()) {
            return Err(Error::InvalidSubdivision {
                reason: "knots must be finite".to_string(),
            });
        }
        if let Some(w) = knots.windows(2).find(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidSubdivision {
                reason: format!("knots must be strictly increasing ({} >= {})", w[0], w[1]),
            });
        }
        SpectrumInterval::new(knots[0], knots[knots.len() - 1])?;
        if !base.in_domain(knots[0]) {
            return Err(Error::Domain {
                function: base.to_string(),
                value: knots[0],
            });
        }
        let pf = PiecewiseC2Function { base, knots };
        for i in 0..pf.pieces() {
            pf.curvature(i)?;
        }
        Ok(pf)
    }

    /// The trivial subdivision `{m, M}`.
    pub fn trivial(base: ScalarFunction, interval: &SpectrumInterval) -> Result<Self> {
        Self::new(base, alloc::vec![interval.lower(), interval.upper()])
    }

    /// Subdivides `interval` at the sign changes of `f''`, each located by
    /// bisection to `1e-10`.
    pub fn auto_refine(base: ScalarFunction, interval: &SpectrumInterval) -> Result<Self> {
        let (m, big_m) = (interval.lower(), interval.upper());
        let step = (big_m - m) / (INFLECTION_GRID - 1) as f64;
        let mut knots = alloc::vec![m];
        let mut last: Option<(f64, f64)> = None;
        for k in 0..INFLECTION_GRID {
            let t = if k == INFLECTION_GRID - 1 {
                big_m
            } else {
                m + step * k as f64
            };
            let v = base.d2(t);
            if libm::fabs(v) <= CURVATURE_TOL {
                continue;
            }
            if let Some((t0, v0)) = last {
                if v0.signum() != v.signum() {
                    let root = bisect(|s| base.d2(s), t0, t, INFLECTION_TOL, ROOT_MAX_ITER)?;
                    if root > knots[knots.len() - 1] && root < big_m {
                        knots.push(root);
                    }
                }
            }
            last = Some((t, v));
        }
        knots.push(big_m);
        Self::new(base, knots)
    }

    pub fn base(&self) -> &ScalarFunction {
        &self.base
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn pieces(&self) -> usize {
        self.knots.len() - 1
    }

    pub fn interval(&self) -> SpectrumInterval {
        SpectrumInterval::new(self.knots[0], self.knots[self.knots.len() - 1])
            .expect("validated at construction")
    }

    fn curvature(&self, i: usize) -> Result<PieceClass> {
        let (lo, hi) = (self.knots[i], self.knots[i + 1]);
        let w = hi - lo;
        let interior =
            (1..=CURVATURE_SAMPLES).map(|k| lo + w * k as f64 / (CURVATURE_SAMPLES + 1) as f64);
        let one_sided = [lo + ONE_SIDED_OFFSET * w, hi - ONE_SIDED_OFFSET * w];
        let (mut pos, mut neg) = (false, false);
        for t in interior.chain(one_sided) {
            let v = self.base.d2(t);
            if !v.is_finite() {
                return Err(Error::Domain {
                    function: format!("{}''", self.base),
                    value: t,
                });
            }
            pos |= v > CURVATURE_TOL;
            neg |= v < -CURVATURE_TOL;
        }
        match (pos, neg) {
            (true, true) => Err(Error::MixedCurvature {
                piece: i + 1,
                lo,
                hi,
            }),
            (true, false) => Ok(PieceClass::ConvexPiece),
            (false, true) => Ok(PieceClass::ConcavePiece),
            (false, false) => Ok(PieceClass::FlatOrNeither),
        }
    }
}

/// Chord slope, chord and curvature class of every piece.
pub fn classify_intervals(pf: &PiecewiseC2Function) -> Result<Vec<PieceData>> {
    let f = &pf.base;
    (0..pf.pieces())
        .map(|i| {
            let (lo, hi) = (pf.knots[i], pf.knots[i + 1]);
            let (f_lo, f_hi) = (f.eval_checked(lo)?, f.eval_checked(hi)?);
            Ok(PieceData {
                index: i + 1,
                lo,
                hi,
                mu: (f_hi - f_lo) / (hi - lo),
                chord: (f_lo, f_hi),
                class: pf.curvature(i)?,
                t_bar_ratio: None,
                t_bar_diff: None,
                ratio: None,
                difference: None,
                lambda_ratio: None,
                lambda_diff: None,
            })
        })
        .collect()
}

fn require_convex_sloped(piece: &PieceData) -> Result<()> {
    if piece.class != PieceClass::ConvexPiece || piece.has_zero_slope() {
        return Err(Error::InvalidParameter {
            name: "piece (needs a convex piece with nonzero chord slope)",
            value: piece.index as f64,
        });
    }
    Ok(())
}

/// Root of `G_i(t) = mu_i f(t) - L_i(t) f'(t)` on a convex piece.
pub fn solve_ratio_stationary(piece: &PieceData, f: &ScalarFunction) -> Result<f64> {
    require_convex_sloped(piece)?;
    let g = |t: f64| piece.mu * f.eval(t) - piece.chord_at(t) * f.d1(t);
    bisect(g, piece.lo, piece.hi, ROOT_TOL, ROOT_MAX_ITER)
}

/// Root of `mu_i - f'(t)` on a convex piece.
pub fn solve_diff_stationary(piece: &PieceData, f: &ScalarFunction) -> Result<f64> {
    require_convex_sloped(piece)?;
    bisect(
        |t| piece.mu - f.d1(t),
        piece.lo,
        piece.hi,
        ROOT_TOL,
        ROOT_MAX_ITER,
    )
}

/// Root of `f'` on a zero-slope piece; `None` when `f` is constant there.
fn solve_critical_point(piece: &PieceData, f: &ScalarFunction) -> Result<Option<f64>> {
    match bisect(|t| f.d1(t), piece.lo, piece.hi, ROOT_TOL, ROOT_MAX_ITER) {
        Ok(t) => Ok(Some(t)),
        Err(Error::NoSignChange { .. }) => {
            let w = piece.hi - piece.lo;
            let flat = (0..=CURVATURE_SAMPLES + 1)
                .map(|k| piece.lo + w * k as f64 / (CURVATURE_SAMPLES + 1) as f64)
                .all(|t| libm::fabs(f.d1(t)) <= CURVATURE_TOL);
            if flat {
                Ok(None)
            } else {
                Err(Error::StationaryPoint { piece: piece.index })
            }
        }
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConverseConstants {
    pub alpha: f64,
    pub beta: f64,
    /// Jensen coefficient `C` under the policy the constants were computed for.
    pub coefficient: f64,
    pub pieces: Vec<PieceData>,
}

fn check_positive_on(pf: &PiecewiseC2Function) -> Result<()> {
    let f = &pf.base;
    for i in 0..pf.pieces() {
        let (lo, hi) = (pf.knots[i], pf.knots[i + 1]);
        for k in 0..=CURVATURE_SAMPLES + 1 {
            let t = lo + (hi - lo) * k as f64 / (CURVATURE_SAMPLES + 1) as f64;
            let v = f.eval(t);
            if !(v >= POSITIVITY_FLOOR) {
                return Err(Error::NonPositiveFunction {
                    function: f.to_string(),
                    t,
                    value: v,
                });
            }
        }
    }
    Ok(())
}

/// `alpha`, `beta` and the per-piece data for `pf` under `policy`.
pub fn compute_constants(
    pf: &PiecewiseC2Function,
    h: &HFunction,
    policy: CoefficientPolicy,
) -> Result<ConverseConstants> {
    check_positive_on(pf)?;
    let c = jensen_coefficient(h, policy, COEFFICIENT_TOL)?;
    let f = &pf.base;
    let mut pieces = classify_intervals(pf)?;
    let mut alpha = 1.0f64;
    let mut beta = 0.0f64;
    for piece in pieces.iter_mut() {
        let f_lo = piece.chord.0;
        if piece.has_zero_slope() {
            if let Some(t) = solve_critical_point(piece, f)? {
                let ft = f.eval(t);
                piece.t_bar_ratio = Some(t);
                piece.t_bar_diff = Some(t);
                piece.ratio = Some(f_lo / ft);
                piece.difference = Some(f_lo - ft);
            }
        } else if piece.class == PieceClass::ConvexPiece {
            let tr = solve_ratio_stationary(piece, f)?;
            let td = solve_diff_stationary(piece, f)?;
            piece.t_bar_ratio = Some(tr);
            piece.t_bar_diff = Some(td);
            piece.ratio = Some(piece.mu / f.d1(tr));
            piece.difference = Some(f_lo + piece.mu * (td - piece.lo) - f.eval(td));
        }
        // concave and linear pieces: L_i / f <= 1 and L_i - f <= 0
        let ratio = piece.ratio.unwrap_or(1.0);
        let difference = piece.difference.unwrap_or(0.0);
        piece.lambda_ratio = Some(c * ratio);
        piece.lambda_diff = Some(if difference == 0.0 {
            0.0
        } else {
            c * difference
        });
        alpha = alpha.max(ratio);
        beta = beta.max(difference);
    }
    Ok(ConverseConstants {
        alpha,
        beta,
        coefficient: c,
        pieces,
    })
}

/// Converse constants with the safe coefficient of a named `h` family, and
/// the resulting prefactors `1/(C alpha)` and `1/C`.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyConstants {
    pub constants: ConverseConstants,
    /// `1 / (C alpha)`
    pub prefactor_ratio: f64,
    /// `1 / C`
    pub prefactor_diff: f64,
}

pub fn family_constants(pf: &PiecewiseC2Function, family: &HFunction) -> Result<FamilyConstants> {
    let c = classify_coefficient(family)?;
    let mut constants = compute_constants(pf, family, CoefficientPolicy::Safe)?;
    // the closed form, which agrees with 2 h(1/2) to rounding
    constants.coefficient = c;
    for p in constants.pieces.iter_mut() {
        p.lambda_ratio = Some(c * p.ratio.unwrap_or(1.0));
        p.lambda_diff = Some(c * p.difference.unwrap_or(0.0));
    }
    Ok(FamilyConstants {
        prefactor_ratio: 1.0 / (c * constants.alpha),
        prefactor_diff: 1.0 / c,
        constants,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConverseReport {
    /// `<f(A)x,x> / (C alpha) <= f(<Ax,x>)`
    pub ratio: InequalityReport,
    /// `<f(A)x,x> / C - beta <= f(<Ax,x>)`
    pub difference: InequalityReport,
}

/// Both converse bounds on `(A, x)` with constants already computed for `pf`.
pub fn converse_check_with(
    pf: &PiecewiseC2Function,
    constants: &ConverseConstants,
    h: &HFunction,
    a: &HermitianMatrix,
    x: &UnitVector,
    policy: CoefficientPolicy,
    opts: CheckOptions,
) -> Result<ConverseReport> {
    let iv = pf.interval();
    let (lo, hi) = a.spectrum_hull();
    if !(iv.contains(lo, 1e-10) && iv.contains(hi, 1e-10)) {
        return Err(Error::InvalidInterval {
            m: iv.lower(),
            big_m: iv.upper(),
        });
    }
    let f = &pf.base;
    let g = a.form(x.as_slice())?;
    let fa = matrix_function(a, f)?.form(x.as_slice())?;
    let rhs = f.eval_checked(g)?;
    let c = constants.coefficient;
    let (ratio_lhs, diff_lhs) = if c.is_infinite() {
        (0.0, -constants.beta)
    } else {
        (fa / (c * constants.alpha), fa / c - constants.beta)
    };
    let witness = Witness::new(a, x.as_slice(), f, h, opts);
    Ok(ConverseReport {
        ratio: InequalityReport::new("converse-ratio", ratio_lhs, rhs, c, policy, witness.clone()),
        difference: InequalityReport::new("converse-difference", diff_lhs, rhs, c, policy, witness),
    })
}

pub fn converse_check(
    pf: &PiecewiseC2Function,
    h: &HFunction,
    a: &HermitianMatrix,
    x: &UnitVector,
    policy: CoefficientPolicy,
    opts: CheckOptions,
) -> Result<ConverseReport> {
    let constants = compute_constants(pf, h, policy)?;
    converse_check_with(pf, &constants, h, a, x, policy, opts)
}

/// Converse bounds for `sum <f(A_i) x_i, x_i>` via the block-diagonal operator.
pub fn multi_converse_check(
    pf: &PiecewiseC2Function,
    h: &HFunction,
    ops: &[HermitianMatrix],
    xs: &VectorFamily,
    policy: CoefficientPolicy,
    opts: CheckOptions,
) -> Result<ConverseReport> {
    if ops.len() != xs.len() {
        return Err(Error::DimensionMismatch {
            expected: ops.len(),
            found: xs.len(),
        });
    }
    let block = block_diag(ops)?;
    converse_check(pf, h, &block, &xs.stacked()?, policy, opts)
}
