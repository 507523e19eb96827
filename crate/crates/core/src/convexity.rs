//! Sampling oracle for h-convexity:
//! `f(lambda u + (1 - lambda) v) <= h(lambda) f(u) + h(1 - lambda) f(v)`.

use alloc::string::ToString;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, HFunction, Result, ScalarFunction, SpectrumInterval};

const LAMBDA_FLOOR: f64 = 1e-9;

/// A sampled triple at which the h-convexity inequality fails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub u: f64,
    pub v: f64,
    pub lambda: f64,
    pub lhs: f64,
    pub rhs: f64,
}

impl Violation {
    /// Re-evaluates both sides at the stored triple.
    pub fn recompute(&self, f: &ScalarFunction, h: &HFunction) -> (f64, f64) {
        sides(f, h, self.u, self.v, self.lambda)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexityWitness {
    pub holds: bool,
    /// The worst sampled violation when `holds` is false.
    pub violation: Option<Violation>,
}

fn sides(f: &ScalarFunction, h: &HFunction, u: f64, v: f64, lambda: f64) -> (f64, f64) {
    let lhs = f.eval(lambda * u + (1.0 - lambda) * v);
    let rhs = h.eval(lambda) * f.eval(u) + h.eval(1.0 - lambda) * f.eval(v);
    (lhs, rhs)
}

/// Tolerance above which `lhs` exceeding `rhs` counts as a violation.
pub fn convexity_margin(rhs: f64) -> f64 {
    crate::VIOLATION_TOL * crate::max(1.0, libm::fabs(rhs))
}

/// Samples `trials` triples `(u, v, lambda)` uniformly from
/// `[m, M]^2 x [1e-9, 1 - 1e-9]` and reports the largest violation found.
pub fn check_h_convex(
    f: &ScalarFunction,
    h: &HFunction,
    interval: &SpectrumInterval,
    trials: usize,
    seed: u64,
) -> Result<ConvexityWitness> {
    if trials == 0 {
        return Err(Error::InvalidParameter {
            name: "trials",
            value: 0.0,
        });
    }
    let (m, big_m) = (interval.lower(), interval.upper());
    if !f.in_domain(m) {
        return Err(Error::Domain {
            function: f.to_string(),
            value: m,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: Option<(f64, Violation)> = None;
    for _ in 0..trials {
        let u = m + (big_m - m) * rng.random::<f64>();
        let v = m + (big_m - m) * rng.random::<f64>();
        let lambda = LAMBDA_FLOOR + (1.0 - 2.0 * LAMBDA_FLOOR) * rng.random::<f64>();
        let mid = lambda * u + (1.0 - lambda) * v;
        for t in [u, v, mid] {
            let ft = f.eval(t);
            if !(ft >= 0.0) {
                return Err(Error::Negative {
                    function: f.to_string(),
                    t,
                    value: ft,
                });
            }
        }
        let (lhs, rhs) = sides(f, h, u, v, lambda);
        let excess = lhs - rhs - convexity_margin(rhs);
        if excess > 0.0 && worst.is_none_or(|(w, _)| excess > w) {
            worst = Some((
                excess,
                Violation {
                    u,
                    v,
                    lambda,
                    lhs,
                    rhs,
                },
            ));
        }
    }
    Ok(ConvexityWitness {
        holds: worst.is_none(),
        violation: worst.map(|(_, v)| v),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(m: f64, big_m: f64) -> SpectrumInterval {
        SpectrumInterval::new(m, big_m).unwrap()
    }

    #[test]
    fn sqrt_is_sqrt_convex() {
        let h = HFunction::power(0.5).unwrap();
        let w = check_h_convex(&ScalarFunction::Sqrt, &h, &iv(1.0, 4.0), 5000, 1).unwrap();
        assert!(w.holds);
    }

    #[test]
    fn linear_is_convex_with_equality() {
        let w = check_h_convex(
            &ScalarFunction::Affine { a: 1.0, b: 0.0 },
            &HFunction::Identity,
            &iv(1.0, 2.0),
            5000,
            2,
        )
        .unwrap();
        assert!(w.holds);
    }

    #[test]
    fn square_fails_for_t_squared_weight() {
        // excess 2 lambda (1 - lambda) u v peaks at lambda = 1/2, u = v = M
        let h = HFunction::tabulated("t^2", |t| t * t);
        let w = check_h_convex(&ScalarFunction::Square, &h, &iv(1.0, 2.0), 10_000, 3).unwrap();
        assert!(!w.holds);
        let viol = w.violation.unwrap();
        assert!(libm::fabs(viol.lambda - 0.5) < 0.1);
        assert!(libm::fabs(viol.u - viol.v) < 0.3);
        let (lhs, rhs) = viol.recompute(&ScalarFunction::Square, &h);
        assert_eq!((lhs, rhs), (viol.lhs, viol.rhs));
        assert!(lhs > rhs + convexity_margin(rhs));
    }

    #[test]
    fn negative_f_is_rejected() {
        let f = ScalarFunction::Affine { a: 1.0, b: -1.5 };
        assert!(matches!(
            check_h_convex(&f, &HFunction::Identity, &iv(1.0, 2.0), 100, 0),
            Err(Error::Negative { .. })
        ));
    }

    #[test]
    fn deterministic_per_seed() {
        let h = HFunction::tabulated("t^2", |t| t * t);
        let a = check_h_convex(&ScalarFunction::Exp, &h, &iv(1.0, 2.0), 500, 9).unwrap();
        let b = check_h_convex(&ScalarFunction::Exp, &h, &iv(1.0, 2.0), 500, 9).unwrap();
        assert_eq!(a, b);
    }
}
