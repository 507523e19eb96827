use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {off_diagonal:e})")]
    NonConvergence { sweeps: usize, off_diagonal: f64 },

    #[error("matrix dimension {dim} outside supported range 1..={max}")]
    UnsupportedDimension { dim: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("value {value} outside the domain of {function}")]
    Domain { function: String, value: f64 },

    #[error("spectrum is not positive: smallest eigenvalue {min}")]
    NonPositiveSpectrum { min: f64 },

    #[error("degenerate spectrum: m == M == {value}")]
    DegenerateSpectrum { value: f64 },

    #[error("invalid interval [{m}, {big_m}]: need 0 < m < M")]
    InvalidInterval { m: f64, big_m: f64 },

    #[error("empty list of {what}")]
    Empty { what: &'static str },

    #[error("vector is not unit norm (norm {norm})")]
    NotUnitNorm { norm: f64 },

    #[error("vector family squared norms sum to {total}, expected 1")]
    FamilyNorm { total: f64 },

    #[error("weights must be nonnegative and sum to 1 (sum {total})")]
    WeightSum { total: f64 },

    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("{function} is negative at t = {t}: {value}")]
    Negative {
        function: String,
        t: f64,
        value: f64,
    },

    #[error("{function} must be strictly positive on the interval; f({t}) = {value}")]
    NonPositiveFunction {
        function: String,
        t: f64,
        value: f64,
    },

    #[error("unsupported h family: {family}")]
    UnsupportedFamily { family: String },

    #[error("cannot parse {input:?} at position {position}: {reason}")]
    Parse {
        input: String,
        position: usize,
        reason: String,
    },

    #[error("barycenter mismatch: <Ax,x> - (pm+qM)/(p+q) = {residual:e}")]
    BarycenterMismatch { residual: f64 },

    #[error("objective undefined at theta = {theta} (u = {u}, v = {v})")]
    ObjectiveDomain { theta: f64, u: f64, v: f64 },

    #[error("objective is not non-decreasing in u: F({u_lo}, {v}) > F({u_hi}, {v})")]
    NotMonotone { u_lo: f64, u_hi: f64, v: f64 },

    #[error("invalid subdivision: {reason}")]
    InvalidSubdivision { reason: String },

    #[error("f'' changes sign on piece {piece} = [{lo}, {hi}]; refine the subdivision at the inflection point")]
    MixedCurvature { piece: usize, lo: f64, hi: f64 },

    #[error("no sign change on [{lo}, {hi}]: g(lo) = {g_lo:e}, g(hi) = {g_hi:e}")]
    NoSignChange {
        lo: f64,
        hi: f64,
        g_lo: f64,
        g_hi: f64,
    },

    #[error("piece {piece} has zero chord slope but no interior stationary point")]
    StationaryPoint { piece: usize },
}
