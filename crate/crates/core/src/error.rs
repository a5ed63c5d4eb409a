use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Everything that can go wrong in the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Grid bounds are not ordered or a node count is below 3.
    DegenerateGrid(&'static str),
    /// The two axes induce different spacings.
    SpacingMismatch { hx: f64, hy: f64 },
    /// Value count does not match the grid.
    SizeMismatch { expected: usize, got: usize },
    /// A NaN or infinite value was found at the given flat index.
    NonFinite { index: usize },
    /// A stencil was requested on a boundary (or out of range) node.
    NotInterior { i: usize, j: usize },
    /// A point lies outside the grid rectangle.
    OutOfBounds { x: f64, y: f64 },
    /// Two fields or a field and boundary data live on different grids.
    GridMismatch,
    InvalidProfile(&'static str),
    IndefinitePolynomial,
    /// Field grid does not cover the closed unit disk.
    NotCoveringUnitDisk,
    InvalidProblem(&'static str),
    /// Pattern iteration hit the sweep limit.
    NotConverged {
        sweeps: usize,
        residual: f64,
        last_pattern_changes: usize,
    },
    /// Conjugate gradients failed to reach the residual target.
    LinearSolverBreakdown { iterations: usize, residual: f64 },
    /// A ball or circle leaves the grid rectangle.
    BallOutsideDomain { x: f64, y: f64, r: f64 },
    /// Radius too small for the grid spacing.
    UnderResolved { r: f64, h: f64 },
    /// Input to the ACF functional is negative beyond tolerance.
    NegativeInput { min: f64 },
    /// `S_r` vanishes, so the normalized rescaling is undefined.
    VanishingNorm { r: f64 },
    InvalidLadder(&'static str),
    InvalidDirection,
    InvalidArgument(&'static str),
    /// No zero-set crossing inside the fitting window.
    EmptyZeroSet,
    /// The zero set crosses a transverse line more than once.
    NotAGraph { t: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DegenerateGrid(why) => write!(f, "degenerate grid: {why}"),
            Error::SpacingMismatch { hx, hy } => {
                write!(f, "grid spacing differs between axes: hx = {hx}, hy = {hy}")
            }
            Error::SizeMismatch { expected, got } => {
                write!(f, "expected {expected} values, got {got}")
            }
            Error::NonFinite { index } => write!(f, "non-finite value at index {index}"),
            Error::NotInterior { i, j } => write!(f, "node ({i}, {j}) is not interior"),
            Error::OutOfBounds { x, y } => write!(f, "point ({x}, {y}) outside grid"),
            Error::GridMismatch => f.write_str("grids do not match"),
            Error::InvalidProfile(why) => write!(f, "invalid profile: {why}"),
            Error::IndefinitePolynomial => f.write_str("polynomial is not sign-definite"),
            Error::NotCoveringUnitDisk => f.write_str("field does not cover the unit disk"),
            Error::InvalidProblem(why) => write!(f, "invalid problem: {why}"),
            Error::NotConverged {
                sweeps,
                residual,
                last_pattern_changes,
            } => write!(
                f,
                "pattern iteration did not converge after {sweeps} sweeps \
                 (residual {residual:e}, {last_pattern_changes} pattern changes in last sweep)"
            ),
            Error::LinearSolverBreakdown {
                iterations,
                residual,
            } => write!(
                f,
                "conjugate gradients stalled after {iterations} iterations (residual {residual:e})"
            ),
            Error::BallOutsideDomain { x, y, r } => {
                write!(f, "ball of radius {r} at ({x}, {y}) leaves the grid")
            }
            Error::UnderResolved { r, h } => {
                write!(f, "radius {r} is under-resolved on spacing {h}")
            }
            Error::NegativeInput { min } => write!(f, "input must be non-negative (min {min:e})"),
            Error::VanishingNorm { r } => write!(f, "S_r vanishes at r = {r}"),
            Error::InvalidLadder(why) => write!(f, "invalid radius ladder: {why}"),
            Error::InvalidDirection => f.write_str("direction must be a unit vector"),
            Error::InvalidArgument(why) => write!(f, "invalid argument: {why}"),
            Error::EmptyZeroSet => f.write_str("zero set is empty in the window"),
            Error::NotAGraph { t } => {
                write!(f, "zero set is not a graph at transverse coordinate {t}")
            }
        }
    }
}

impl core::error::Error for Error {}
