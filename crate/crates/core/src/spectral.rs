//! Dense real symmetric matrices and their functional calculus.
//!
//! Every [`HermitianMatrix`] carries its eigendecomposition, computed once at
//! construction by a cyclic Jacobi sweep. `f(A)` is then
//! `U diag(f(lambda_1), .., f(lambda_n)) U^T`.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

/// Largest supported matrix dimension.
pub const MAX_DIM: usize = 64;

const JACOBI_THRESHOLD: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;
const UNIT_TOL: f64 = 1e-12;

/// Eigenvalues in ascending order with matching orthonormal eigenvectors.
///
/// `vectors` is row-major `dim x dim`; column `k` is the eigenvector of
/// `values[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Vec<f64>,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Column `k` of the eigenvector matrix.
    pub fn eigenvector(&self, k: usize) -> Vec<f64> {
        let n = self.dim();
        (0..n).map(|i| self.vectors[i * n + k]).collect()
    }

    /// `U diag(d) U^T` for the given diagonal.
    pub fn compose(&self, diag: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let u = &self.vectors;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += u[i * n + k] * diag[k] * u[j * n + k];
                }
                out[i * n + j] = acc;
                out[j * n + i] = acc;
            }
        }
        out
    }

    /// `max |U^T U - I|`.
    pub fn orthonormality_residual(&self) -> f64 {
        let n = self.dim();
        let u = &self.vectors;
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                let mut acc = 0.0;
                for i in 0..n {
                    acc += u[i * n + a] * u[i * n + b];
                }
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max(libm::fabs(acc - target));
            }
        }
        worst
    }
}

/// Real symmetric operator on `R^dim` with its cached eigendecomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    entries: Vec<f64>,
    eigen: EigenDecomposition,
}

impl HermitianMatrix {
    /// Builds a matrix from row-major entries, symmetrizing as `(V + V^T)/2`.
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::UnsupportedDimension { dim, max: MAX_DIM });
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        let mut sym = entries;
        for i in 0..dim {
            for j in (i + 1)..dim {
                let v = 0.5 * (sym[i * dim + j] + sym[j * dim + i]);
                sym[i * dim + j] = v;
                sym[j * dim + i] = v;
            }
        }
        let eigen = jacobi_eigh(dim, &sym)?;
        Ok(HermitianMatrix {
            dim,
            entries: sym,
            eigen,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        Self::new(dim, entries)
    }

    pub fn diag(values: &[f64]) -> Result<Self> {
        let n = values.len();
        let mut entries = vec![0.0; n * n];
        for (i, v) in values.iter().enumerate() {
            entries[i * n + i] = *v;
        }
        Self::new(n, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn eigen(&self) -> &EigenDecomposition {
        &self.eigen
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigen.values
    }

    pub fn max_abs(&self) -> f64 {
        self.entries
            .iter()
            .fold(0.0f64, |a, v| a.max(libm::fabs(*v)))
    }

    /// Smallest and largest eigenvalue, with no validity checks.
    pub fn spectrum_hull(&self) -> (f64, f64) {
        let v = &self.eigen.values;
        (v[0], v[v.len() - 1])
    }

    /// `max |U diag(lambda) U^T - A|`.
    pub fn reconstruction_residual(&self) -> f64 {
        let back = self.eigen.compose(&self.eigen.values);
        back.iter()
            .zip(&self.entries)
            .fold(0.0f64, |a, (x, y)| a.max(libm::fabs(x - y)))
    }

    /// `A y` for an arbitrary vector of matching length.
    pub fn apply(&self, y: &[f64]) -> Vec<f64> {
        let n = self.dim;
        (0..n)
            .map(|i| {
                self.entries[i * n..(i + 1) * n]
                    .iter()
                    .zip(y)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// `y^T A y` for an arbitrary (not necessarily unit) vector.
    pub fn form(&self, y: &[f64]) -> Result<f64> {
        if y.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: y.len(),
            });
        }
        Ok(dot(&self.apply(y), y))
    }

    /// `f(A)` for an arbitrary scalar map of the spectrum.
    ///
    /// `map` is called once per eigenvalue, in ascending order, and may reject
    /// the eigenvalue.
    pub fn map_spectrum<F>(&self, mut map: F) -> Result<HermitianMatrix>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let mapped = self
            .eigen
            .values
            .iter()
            .map(|t| map(*t))
            .collect::<Result<Vec<_>>>()?;
        let entries = self.eigen.compose(&mapped);
        // The eigenvectors carry over; only the eigenvalues need sorting.
        let mut order: Vec<usize> = (0..self.dim).collect();
        order.sort_by(|a, b| mapped[*a].total_cmp(&mapped[*b]));
        let n = self.dim;
        let mut values = Vec::with_capacity(n);
        let mut vectors = vec![0.0; n * n];
        for (new_k, old_k) in order.iter().enumerate() {
            values.push(mapped[*old_k]);
            for i in 0..n {
                vectors[i * n + new_k] = self.eigen.vectors[i * n + old_k];
            }
        }
        Ok(HermitianMatrix {
            dim: n,
            entries,
            eigen: EigenDecomposition { values, vectors },
        })
    }
}

/// Unit vector in `R^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVector(Vec<f64>);

impl UnitVector {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Empty {
                what: "vector components",
            });
        }
        let norm = norm(&components);
        if libm::fabs(norm - 1.0) > UNIT_TOL {
            return Err(Error::NotUnitNorm { norm });
        }
        Ok(UnitVector(components))
    }

    /// Scales a nonzero vector to unit length.
    pub fn normalized(components: Vec<f64>) -> Result<Self> {
        let norm = norm(&components);
        if components.is_empty() || norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotUnitNorm { norm });
        }
        Ok(UnitVector(
            components.into_iter().map(|c| c / norm).collect(),
        ))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// `[m, M]` with `0 < m < M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumInterval {
    lower: f64,
    upper: f64,
}

impl SpectrumInterval {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower > 0.0 && lower < upper && upper.is_finite()) {
            return Err(Error::InvalidInterval {
                m: lower,
                big_m: upper,
            });
        }
        Ok(SpectrumInterval { lower, upper })
    }

    /// Skips the positivity requirement; still needs `m < M`.
    pub fn new_unchecked_positivity(lower: f64, upper: f64) -> Result<Self> {
        if !(lower < upper && lower.is_finite() && upper.is_finite()) {
            return Err(Error::InvalidInterval {
                m: lower,
                big_m: upper,
            });
        }
        Ok(SpectrumInterval { lower, upper })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, t: f64, tol: f64) -> bool {
        t >= self.lower - tol && t <= self.upper + tol
    }
}

/// Vectors `x_1..x_n` whose squared norms sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFamily(Vec<Vec<f64>>);

impl VectorFamily {
    pub fn new(vectors: Vec<Vec<f64>>) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::Empty {
                what: "vector family",
            });
        }
        let total: f64 = vectors.iter().map(|v| dot(v, v)).sum();
        if libm::fabs(total - 1.0) > UNIT_TOL {
            return Err(Error::FamilyNorm { total });
        }
        Ok(VectorFamily(vectors))
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Stacks the family into a single unit vector.
    pub fn stacked(&self) -> Result<UnitVector> {
        UnitVector::new(self.0.iter().flatten().copied().collect())
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

/// Eigendecomposition of `a`.
pub fn eigh(a: &HermitianMatrix) -> EigenDecomposition {
    a.eigen.clone()
}

/// Cyclic Jacobi on a symmetric row-major matrix.
fn jacobi_eigh(n: usize, input: &[f64]) -> Result<EigenDecomposition> {
    let mut a = input.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let scale = frobenius(&a).max(1.0);
    let threshold = JACOBI_THRESHOLD * scale;

    let mut sweeps = 0;
    loop {
        let off = off_diagonal(n, &a);
        if off <= threshold {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NonConvergence {
                sweeps,
                off_diagonal: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.is_infinite() {
                    0.0
                } else {
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (libm::fabs(theta) + libm::sqrt(theta * theta + 1.0))
                };
                if t == 0.0 {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                rotate(n, &mut a, &mut v, p, q, c, s, t * apq);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|x, y| a[*x * n + *x].total_cmp(&a[*y * n + *y]));
    let values = order.iter().map(|k| a[k * n + k]).collect();
    let mut vectors = vec![0.0; n * n];
    for (new_k, old_k) in order.iter().enumerate() {
        for i in 0..n {
            vectors[i * n + new_k] = v[i * n + old_k];
        }
    }
    Ok(EigenDecomposition { values, vectors })
}

#[allow(clippy::too_many_arguments)]
fn rotate(n: usize, a: &mut [f64], v: &mut [f64], p: usize, q: usize, c: f64, s: f64, shift: f64) {
    a[p * n + p] -= shift;
    a[q * n + q] += shift;
    a[p * n + q] = 0.0;
    a[q * n + p] = 0.0;
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        let new_kp = c * akp - s * akq;
        let new_kq = s * akp + c * akq;
        a[k * n + p] = new_kp;
        a[p * n + k] = new_kp;
        a[k * n + q] = new_kq;
        a[q * n + k] = new_kq;
    }
    for k in 0..n {
        let vkp = v[k * n + p];
        let vkq = v[k * n + q];
        v[k * n + p] = c * vkp - s * vkq;
        v[k * n + q] = s * vkp + c * vkq;
    }
}

fn frobenius(a: &[f64]) -> f64 {
    libm::sqrt(a.iter().map(|x| x * x).sum())
}

fn off_diagonal(n: usize, a: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[i * n + j] * a[i * n + j];
            }
        }
    }
    libm::sqrt(acc)
}

/// `f(A)` for a scalar function; fails on the first eigenvalue outside the
/// domain of `f`.
pub fn matrix_function(a: &HermitianMatrix, f: &crate::ScalarFunction) -> Result<HermitianMatrix> {
    a.map_spectrum(|t| f.eval_checked(t))
}

/// `<Ax, x>`.
pub fn quadratic_form(a: &HermitianMatrix, x: &UnitVector) -> Result<f64> {
    a.form(x.as_slice())
}

/// `(lambda_min, lambda_max)` as a valid positive interval.
pub fn spectrum_bounds(a: &HermitianMatrix) -> Result<SpectrumInterval> {
    let (lo, hi) = a.spectrum_hull();
    if lo <= 0.0 {
        return Err(Error::NonPositiveSpectrum { min: lo });
    }
    if lo == hi {
        return Err(Error::DegenerateSpectrum { value: lo });
    }
    SpectrumInterval::new(lo, hi)
}

/// Block-diagonal composition. The eigendecomposition is assembled from the
/// blocks rather than recomputed.
pub fn block_diag(blocks: &[HermitianMatrix]) -> Result<HermitianMatrix> {
    if blocks.is_empty() {
        return Err(Error::Empty {
            what: "operator list",
        });
    }
    let n: usize = blocks.iter().map(|b| b.dim).sum();
    if n > MAX_DIM {
        return Err(Error::UnsupportedDimension {
            dim: n,
            max: MAX_DIM,
        });
    }
    let mut entries = vec![0.0; n * n];
    // (eigenvalue, global column) pairs before sorting
    let mut pairs: Vec<(f64, Vec<f64>)> = Vec::with_capacity(n);
    let mut offset = 0;
    for b in blocks {
        let d = b.dim;
        for i in 0..d {
            for j in 0..d {
                entries[(offset + i) * n + offset + j] = b.entries[i * d + j];
            }
        }
        for k in 0..d {
            let mut col = vec![0.0; n];
            for i in 0..d {
                col[offset + i] = b.eigen.vectors[i * d + k];
            }
            pairs.push((b.eigen.values[k], col));
        }
        offset += d;
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut values = Vec::with_capacity(n);
    let mut vectors = vec![0.0; n * n];
    for (k, (val, col)) in pairs.into_iter().enumerate() {
        values.push(val);
        for i in 0..n {
            vectors[i * n + k] = col[i];
        }
    }
    Ok(HermitianMatrix {
        dim: n,
        entries,
        eigen: EigenDecomposition { values, vectors },
    })
}

/// Random orthogonal matrix from Gram–Schmidt QR of a Gaussian matrix, with
/// the sign convention `diag(R) > 0`.
pub fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let mut cols: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect()
        })
        .collect();
    for k in 0..n {
        // two passes of modified Gram-Schmidt keep the columns orthonormal
        // to rounding
        for _ in 0..2 {
            for j in 0..k {
                let (done, rest) = cols.split_at_mut(k);
                let proj = dot(&rest[0], &done[j]);
                for (c, q) in rest[0].iter_mut().zip(&done[j]) {
                    *c -= proj * q;
                }
            }
        }
        let nrm = norm(&cols[k]);
        for c in cols[k].iter_mut() {
            *c /= nrm;
        }
    }
    let mut q = vec![0.0; n * n];
    for (k, col) in cols.iter().enumerate() {
        for i in 0..n {
            q[i * n + k] = col[i];
        }
    }
    q
}

/// Uniformly distributed unit vector.
pub fn random_unit<R: Rng + ?Sized>(n: usize, rng: &mut R) -> UnitVector {
    loop {
        let v: Vec<f64> = (0..n)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        if let Ok(u) = UnitVector::normalized(v) {
            return u;
        }
    }
}

/// Samples eigenvalues in `[m, M]` and returns `Q diag(lambda) Q^T`.
///
/// With probability 1/4 the smallest eigenvalue is pinned to `m` and the
/// largest to `M` (for `n == 1` the single eigenvalue goes to one endpoint).
pub fn random_operator<R: Rng + ?Sized>(
    n: usize,
    interval: &SpectrumInterval,
    rng: &mut R,
) -> Result<HermitianMatrix> {
    if n == 0 || n > MAX_DIM {
        return Err(Error::UnsupportedDimension {
            dim: n,
            max: MAX_DIM,
        });
    }
    let (m, big_m) = (interval.lower(), interval.upper());
    let mut values: Vec<f64> = (0..n)
        .map(|_| m + (big_m - m) * rng.random::<f64>())
        .collect();
    if rng.random_range(0..4u32) == 0 {
        if n == 1 {
            values[0] = if rng.random::<bool>() { m } else { big_m };
        } else {
            values[0] = m;
            values[n - 1] = big_m;
        }
    }
    let q = random_orthogonal(n, rng);
    let eig = EigenDecomposition {
        values: values.clone(),
        vectors: q,
    };
    let entries = eig.compose(&values);
    HermitianMatrix::new(n, entries)
}

/// Seeded `(A, x)` with `Sp(A)` in `interval` and `x` uniform on the sphere.
pub fn random_instance(
    n: usize,
    interval: &SpectrumInterval,
    seed: u64,
) -> Result<(HermitianMatrix, UnitVector)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = random_operator(n, interval, &mut rng)?;
    let x = random_unit(n, &mut rng);
    Ok((a, x))
}

/// Random family `x_1..x_k` with `dims[i]` components each and total squared
/// norm one.
pub fn random_family<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<VectorFamily> {
    let total: usize = dims.iter().sum();
    let stacked = random_unit(total.max(1), rng).into_inner();
    let mut out = Vec::with_capacity(dims.len());
    let mut offset = 0;
    for d in dims {
        out.push(stacked[offset..offset + d].to_vec());
        offset += d;
    }
    VectorFamily::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ScalarFunction;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        libm::fabs(a - b) <= tol
    }

    #[test]
    fn diagonal_input_is_already_diagonalized() {
        let a = HermitianMatrix::diag(&[1.0, 2.0]).unwrap();
        let e = eigh(&a);
        assert_eq!(e.values, vec![1.0, 2.0]);
        assert_eq!(e.vectors, vec![1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn swap_matrix_eigenvalues() {
        // characteristic polynomial lambda^2 - 1
        let a = HermitianMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let e = eigh(&a);
        assert!(close(e.values[0], -1.0, 1e-14));
        assert!(close(e.values[1], 1.0, 1e-14));
        assert!(a.reconstruction_residual() <= 1e-14);
    }

    #[test]
    fn construction_symmetrizes() {
        let a = HermitianMatrix::new(2, vec![1.0, 2.0, 4.0, 1.0]).unwrap();
        assert_eq!(a.get(0, 1), 3.0);
        assert_eq!(a.get(1, 0), 3.0);
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert!(matches!(
            HermitianMatrix::new(0, vec![]),
            Err(Error::UnsupportedDimension { .. })
        ));
        assert!(matches!(
            HermitianMatrix::new(65, vec![0.0; 65 * 65]),
            Err(Error::UnsupportedDimension { .. })
        ));
        assert!(matches!(
            HermitianMatrix::new(2, vec![0.0; 3]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn random_eight_by_eight_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let entries: Vec<f64> = (0..64).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let a = HermitianMatrix::new(8, entries).unwrap();
        assert!(a.reconstruction_residual() <= 1e-10 * a.max_abs().max(1.0));
        assert!(a.eigen().orthonormality_residual() <= 1e-10);
        assert!(a.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn functional_calculus_examples() {
        let swap = HermitianMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let sq = matrix_function(&swap, &ScalarFunction::Square).unwrap();
        for (i, v) in sq.entries().iter().enumerate() {
            let target = if i == 0 || i == 3 { 1.0 } else { 0.0 };
            assert!(close(*v, target, 1e-12));
        }
        let id = matrix_function(&swap, &ScalarFunction::Affine { a: 1.0, b: 0.0 }).unwrap();
        for (x, y) in id.entries().iter().zip(swap.entries()) {
            assert!(close(*x, *y, 1e-10));
        }
        let d = HermitianMatrix::diag(&[1.0, 4.0]).unwrap();
        let r = matrix_function(&d, &ScalarFunction::Sqrt).unwrap();
        assert_eq!(r.entries(), &[1.0, 0.0, 0.0, 2.0]);
    }

    #[test]
    fn functional_calculus_domain_error() {
        let d = HermitianMatrix::diag(&[-1.0, 4.0]).unwrap();
        match matrix_function(&d, &ScalarFunction::Sqrt) {
            Err(Error::Domain { value, .. }) => assert_eq!(value, -1.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn quadratic_form_examples() {
        let a = HermitianMatrix::diag(&[1.0, 0.0]).unwrap();
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let x = UnitVector::new(vec![h, h]).unwrap();
        assert!(close(quadratic_form(&a, &x).unwrap(), 0.5, 1e-15));

        let a = HermitianMatrix::diag(&[1.0, 2.0]).unwrap();
        let x = UnitVector::normalized(vec![libm::sqrt(2.0 / 3.0), libm::sqrt(1.0 / 3.0)]).unwrap();
        assert!(close(quadratic_form(&a, &x).unwrap(), 4.0 / 3.0, 1e-14));

        let a = HermitianMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let x = UnitVector::new(a.eigen().eigenvector(0)).unwrap();
        assert!(close(quadratic_form(&a, &x).unwrap(), 1.0, 1e-14));

        let bad = UnitVector::new(vec![1.0]).unwrap();
        assert!(matches!(
            quadratic_form(&a, &bad),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn spectrum_bounds_cases() {
        let b = spectrum_bounds(&HermitianMatrix::diag(&[1.0, 2.0]).unwrap()).unwrap();
        assert_eq!((b.lower(), b.upper()), (1.0, 2.0));
        assert!(matches!(
            spectrum_bounds(&HermitianMatrix::diag(&[3.0, 3.0]).unwrap()),
            Err(Error::DegenerateSpectrum { .. })
        ));
        assert!(matches!(
            spectrum_bounds(&HermitianMatrix::diag(&[-1.0, 2.0]).unwrap()),
            Err(Error::NonPositiveSpectrum { .. })
        ));
    }

    #[test]
    fn block_diag_examples() {
        let one = block_diag(&[HermitianMatrix::diag(&[1.0, 2.0]).unwrap()]).unwrap();
        assert_eq!(
            one.entries(),
            HermitianMatrix::diag(&[1.0, 2.0]).unwrap().entries()
        );
        let two = block_diag(&[
            HermitianMatrix::diag(&[1.0]).unwrap(),
            HermitianMatrix::diag(&[2.0]).unwrap(),
        ])
        .unwrap();
        assert_eq!(two.entries(), &[1.0, 0.0, 0.0, 2.0]);
        let four = block_diag(&[
            HermitianMatrix::diag(&[1.0, 2.0]).unwrap(),
            HermitianMatrix::diag(&[2.0, 3.0]).unwrap(),
        ])
        .unwrap();
        assert_eq!(
            four.entries(),
            HermitianMatrix::diag(&[1.0, 2.0, 2.0, 3.0])
                .unwrap()
                .entries()
        );
        assert_eq!(four.eigenvalues(), &[1.0, 2.0, 2.0, 3.0]);
        assert!(matches!(block_diag(&[]), Err(Error::Empty { .. })));
    }

    #[test]
    fn random_instance_examples() {
        let iv = SpectrumInterval::new(1.0, 2.0).unwrap();
        for seed in 0..20 {
            let (a, x) = random_instance(1, &iv, seed).unwrap();
            assert!(iv.contains(a.get(0, 0), 1e-15));
            assert!(close(libm::fabs(x.as_slice()[0]), 1.0, 1e-15));
        }
        let (a, _) = random_instance(4, &iv, 42).unwrap();
        let (lo, hi) = a.spectrum_hull();
        assert!(lo >= 1.0 - 1e-12 && hi <= 2.0 + 1e-12);
        let again = random_instance(4, &iv, 42).unwrap();
        assert_eq!(again.0, a);
    }

    #[test]
    fn interval_and_vector_validation() {
        assert!(SpectrumInterval::new(0.0, 1.0).is_err());
        assert!(SpectrumInterval::new(2.0, 1.0).is_err());
        assert!(SpectrumInterval::new_unchecked_positivity(0.0, 1.0).is_ok());
        assert!(UnitVector::new(vec![1.0, 1.0]).is_err());
        assert!(VectorFamily::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).is_ok());
        assert!(matches!(
            VectorFamily::new(vec![vec![1.0], vec![1.0]]),
            Err(Error::FamilyNorm { .. })
        ));
    }
}
