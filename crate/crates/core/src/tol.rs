//! Numerical tolerances.
//!
//! All geometry is carried out in `f64`. Every predicate in the crate is
//! parameterized by one of these constants; none of them is scale-adaptive, so
//! inputs are expected to have coordinates of order one.

/// Geometric tolerance: point coincidence, facet membership, slack tests.
pub const GEO: f64 = 1e-9;

/// Reduced-cost and pivot tolerance inside the simplex solver.
pub const LP: f64 = 1e-10;

/// Angular slack (radians) for positive-spanning and cone-intersection tests.
pub const ANG: f64 = 1e-9;

/// Residual threshold below which a trajectory pair counts as certified.
pub const CERT: f64 = 1e-7;
