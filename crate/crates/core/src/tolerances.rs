//! Numeric thresholds shared across modules.

/// Half-width of the band around the unit sphere in which a point counts as
/// ideal, and around a polar plane in which a vertex counts as almost proper.
pub const TAU_IDEAL: f64 = 1e-9;

/// Maximum residual of a prescribed plane concurrence at a vertex.
pub const CONCURRENCE_RESIDUAL: f64 = 1e-8;

/// Slack allowed when checking that a vertex lies in a selected half-space.
pub const CONVEXITY_SLACK: f64 = 1e-9;

/// Tolerance for equality cases in the angle admissibility checker.
pub const ADMISSIBILITY_EQ: f64 = 1e-9;

/// Default absolute tolerance of the volume quadrature.
pub const QUADRATURE_TOL: f64 = 1e-5;

/// Default evaluation budget of the volume quadrature.
pub const QUADRATURE_BUDGET: usize = 10_000_000;

/// Default step for central differences in the Schläfli residual.
pub const SCHLAFLI_STEP: f64 = 1e-4;

/// Convergence threshold (max angle-sum defect) of the circle packing solve.
pub const PACKING_DEFECT: f64 = 1e-10;

/// Iteration cap of the circle packing solve.
pub const PACKING_MAX_ITER: usize = 10_000;

/// Dihedral angles produced by the realization solver match the target to this.
pub const REALIZE_ANGLE_TOL: f64 = 1e-8;

/// Truncated edge length below which the flow declares an edge collapse.
pub const EDGE_COLLAPSE_LENGTH: f64 = 1e-6;
