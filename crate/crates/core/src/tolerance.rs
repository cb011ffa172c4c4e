//! Named numerical tolerances.

/// Structural identities: hermiticity, unitarity, projector algebra, exact
/// products of small matrices.
pub const STRUCTURAL: f64 = 1e-12;

/// Eigen-decomposition residuals, relative to the matrix norm.
pub const EIGEN_RESIDUAL: f64 = 1e-10;

/// Quantities obtained by fitting (correlation and entanglement lengths).
pub const FITTED: f64 = 1e-3;

/// Imaginary parts of transfer-operator entries below this are rounding noise.
pub const REAL_PART: f64 = 1e-10;

/// Connected correlators below this magnitude are excluded from fits.
pub const CORRELATOR_FLOOR: f64 = 1e-12;

/// Entanglement-length fits treat slopes below this as zero.
pub const FLAT_SLOPE: f64 = 1e-12;
