//! Error types shared across the crate.

use thiserror::Error;

/// Errors raised while constructing or validating meshes and feature models.
#[derive(Debug, Error)]
pub enum MeshError {
    #[error("edge ({0}, {1}) is shared by {2} triangles; a manifold edge has at most 2")]
    NonManifoldEdge(u32, u32, usize),
    #[error("edge ({0}, {1}) is traversed in the same direction by two triangles; orientation is inconsistent")]
    InconsistentOrientation(u32, u32),
    #[error("interior vertex {0} has a one-ring that does not close into a single cycle")]
    OpenOneRing(u32),
    #[error("vertex index {0} is out of range (mesh has {1} vertices)")]
    VertexOutOfRange(u32, usize),
    #[error("tetrahedron {0} has non-positive signed volume {1:.3e}")]
    InvertedTet(usize, f64),
    #[error("boundary triangle {0} carries no surface feature id")]
    UntaggedBoundaryTriangle(usize),
    #[error("boundary triangle {0} carries more than one surface feature id")]
    MultiTaggedBoundaryTriangle(usize),
    #[error("feature curve {id}: edge ({0}, {1}) does not lie on a feature-surface interface", .edge.0, .edge.1)]
    CurveEdgeOffInterface { id: u32, edge: (u32, u32) },
    #[error("feature curve {0} is not a 1-manifold polyline or loop")]
    CurveNotManifold(u32),
    #[error("degenerate strip: on-curve vertex {0} has surface valence 2")]
    DegenerateCreaseVertex(u32),
    #[error("polyline must have at least one edge")]
    EmptyPolyline,
    #[error("{0}")]
    Invalid(String),
}

/// Errors raised by mesh file readers and writers.
#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unsupported MSH version {0}; supported versions are 2.2 and 4.1")]
    UnsupportedVersion(String),
    #[error("{format} supports polynomial degree up to {max}, requested {requested}")]
    UnsupportedDegree {
        format: &'static str,
        max: usize,
        requested: usize,
    },
    #[error("unsupported element type {0}")]
    UnsupportedElementType(i32),
    #[error("file mixes surface and volume elements in an unsupported way: {0}")]
    MixedDimension(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Errors raised by the interpolative control-mesh solve.
#[derive(Debug, Error)]
pub enum SolveError {
    #[error("linear solver did not converge: residual {residual:.3e} after {iterations} iterations (tolerance {tolerance:.3e})")]
    NonConvergence {
        residual: f64,
        iterations: usize,
        tolerance: f64,
    },
    #[error("singular system: {0}")]
    Singular(String),
}

/// Errors raised during limit-model evaluation.
#[derive(Debug, Error)]
pub enum EvalError {
    #[error("barycentric coordinates ({0}, {1}, {2}) are outside the master element")]
    InvalidBarycentric(f64, f64, f64),
    #[error("triangle {0} does not belong to any feature surface")]
    TriangleWithoutSurface(usize),
    #[error("evaluation point lies on a feature point; use the identity branch")]
    OnFeaturePoint,
    #[error("stencil requires valence >= 3, found {0}")]
    ValenceTooSmall(usize),
}

/// Errors raised by nodal distributions.
#[derive(Debug, Error)]
pub enum DistributionError {
    #[error("degree must be at least 1, requested {0}")]
    DegreeTooSmall(usize),
    #[error("warp-and-blend nodes are tabulated for degrees 1..=10, requested {0}")]
    UnsupportedWarpBlendDegree(usize),
}

/// Errors raised by the feature-smoothing bookkeeping.
#[derive(Debug, Error)]
pub enum SmoothingError {
    #[error("unknown {kind} feature id {id}")]
    UnknownId { kind: &'static str, id: u32 },
    #[error("point feature {id} has {count} incident curves; only 0 or 2 can be smoothed automatically")]
    PointIncidence { id: u32, count: usize },
}

/// Errors raised by the measurement operations.
#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("Vandermonde system is ill-conditioned (reciprocal condition estimate {0:.2e}); use warp-and-blend nodes or a lower degree")]
    IllConditioned(f64),
    #[error("curve {0} has no edges")]
    EmptyCurve(u32),
    #[error("edge ({0}, {1}) is not interior to a feature surface")]
    NotInteriorEdge(u32, u32),
    #[error("threshold must lie strictly between 0 and 180 degrees, got {0}")]
    BadThreshold(f64),
}

/// Top-level error for the curving pipelines.
#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error(transparent)]
    Smoothing(#[from] SmoothingError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("boundary/volume correspondence failure: {0}")]
    Correspondence(String),
    #[error("{0}")]
    Config(String),
}
