use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every domain failure the library can report.
///
/// Each variant has a stable machine-readable code (see [`Error::code`]) that
/// the command-line front end prints as `ERR <code> <detail>`.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point is not hyperideal: |p| = {norm}")]
    PoleNotHyperideal { norm: f64 },
    #[error("planes intersect outside the closed ball (cosine {cosine})")]
    PlanesDisjointInBall { cosine: f64 },
    #[error("planes coincide")]
    PlanesEqual,
    #[error("point is not in the hyperbolic space: |p| = {norm}")]
    OutsideModel { norm: f64 },
    #[error("deformation factor must be positive, got {factor}")]
    DegenerateDeformation { factor: f64 },

    #[error("graph is not polyhedral: {0}")]
    NotPolyhedral(String),
    #[error("collapse leaves a degenerate graph: {0}")]
    CollapseMakesDegenerate(String),
    #[error("angle {angle} on edge {edge} is outside (0, pi)")]
    AngleOutOfRange { edge: usize, angle: f64 },
    #[error("malformed input at line {line}: {detail}")]
    Parse { line: usize, detail: String },

    #[error("planes do not realize the expected skeleton: {0}")]
    SkeletonMismatch(String),
    #[error("polyhedron is not convex: vertex {vertex} violates face {face} by {excess}")]
    NonConvex { vertex: usize, face: usize, excess: f64 },
    #[error("edge {edge} misses the hyperbolic ball")]
    EdgeMissesBall { edge: usize },
    #[error("at least three angles are needed, got {0}")]
    TooFewAngles(usize),
    #[error("polyhedron is improper: vertex {vertex} lies outside the polar half-space of {pole}")]
    ImproperInput { vertex: usize, pole: usize },
    #[error("truncation invariant violated: {0}")]
    TruncationInvariant(String),

    #[error("points are not ideal: |p| = {norm}")]
    NotIdeal { norm: f64 },
    #[error("quadrature budget exhausted: estimate {estimate} with error {error}")]
    QuadratureBudgetExceeded { estimate: f64, error: f64 },
    #[error("path changes combinatorics inside the differencing window: {0}")]
    PathDiscontinuous(String),

    #[error("circle packing solver diverged: residual {residual}")]
    SolverDiverged { residual: f64 },

    #[error("Newton iteration diverged: residual {residual}")]
    NewtonDiverged { residual: f64 },
    #[error("skeleton changed during the solve: {0}")]
    SkeletonChanged(String),
    #[error("too many degeneration events ({0})")]
    MaxEventsExceeded(usize),
    #[error("flow stalled at t = {t}")]
    StallDetected { t: f64 },
    #[error("polyhedron has no ideal vertices")]
    NoIdealVertices,
    #[error("deformation lost properness")]
    PropernessLost,
    #[error("no separating plane for vertex {0}")]
    NoSeparatingPlane(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable identifier printed by the command-line tool.
    pub fn code(&self) -> &'static str {
        match self {
            Error::PoleNotHyperideal { .. } => "PoleNotHyperideal",
            Error::PlanesDisjointInBall { .. } => "PlanesDisjointInBall",
            Error::PlanesEqual => "PlanesEqual",
            Error::OutsideModel { .. } => "OutsideModel",
            Error::DegenerateDeformation { .. } => "DegenerateDeformation",
            Error::NotPolyhedral(_) => "NotPolyhedral",
            Error::CollapseMakesDegenerate(_) => "CollapseMakesDegenerate",
            Error::AngleOutOfRange { .. } => "AngleOutOfRange",
            Error::Parse { .. } => "Parse",
            Error::SkeletonMismatch(_) => "SkeletonMismatch",
            Error::NonConvex { .. } => "NonConvex",
            Error::EdgeMissesBall { .. } => "EdgeMissesBall",
            Error::TooFewAngles(_) => "TooFewAngles",
            Error::ImproperInput { .. } => "ImproperInput",
            Error::TruncationInvariant(_) => "TruncationInvariant",
            Error::NotIdeal { .. } => "NotIdeal",
            Error::QuadratureBudgetExceeded { .. } => "QuadratureBudgetExceeded",
            Error::PathDiscontinuous(_) => "PathDiscontinuous",
            Error::SolverDiverged { .. } => "SolverDiverged",
            Error::NewtonDiverged { .. } => "NewtonDiverged",
            Error::SkeletonChanged(_) => "SkeletonChanged",
            Error::MaxEventsExceeded(_) => "MaxEventsExceeded",
            Error::StallDetected { .. } => "StallDetected",
            Error::NoIdealVertices => "NoIdealVertices",
            Error::PropernessLost => "PropernessLost",
            Error::NoSeparatingPlane(_) => "NoSeparatingPlane",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }
}
