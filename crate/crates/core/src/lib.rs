//! Feature-aware subdivision limit models and high-order mesh curving.
//!
//! Starting from a linear triangle or tetrahedral mesh with marked feature
//! points, curves, and surfaces, this crate builds a smooth limit model from
//! hierarchical subdivision (cubic curves, Loop surfaces), evaluates it
//! element-wise, and interpolates it with piece-wise polynomial meshes of
//! arbitrary degree. It also measures the result (distance to the limit,
//! Lebesgue constants, normal-angle smoothness), suggests sharp features to
//! smooth, and curves tetrahedral meshes by boundary replacement with
//! transfinite-interpolation accommodation.
//!
//! Entry points:
//! - [`mesh`]: linear meshes, adjacency, feature models, I/O.
//! - [`subdivision`]: refinement rules and the interpolative control solve.
//! - [`limit`]: element-wise parameterization of the limit model.
//! - [`nodes`]: nodal distributions (equispaced, warp-and-blend).
//! - [`homesh`]: high-order mesh generation and re-linearization.
//! - [`metrics`]: accuracy, smoothness, and feature-detection reports.
//! - [`volume`]: volume curving with hierarchical blending and quality.

pub mod basis1d;
pub mod error;
pub mod geometry;
pub mod lattice;
pub mod limit;
pub mod homesh;
pub mod lagrange;
pub mod mesh;
pub mod metrics;
pub mod nodes;
pub mod quadrature;
pub mod samples;
pub mod subdivision;
pub mod volume;

pub use error::{
    DistributionError, EvalError, IoError, MeshError, MetricsError, PipelineError, SmoothingError,
    SolveError,
};
pub use geometry::{vec3, Aabb, Vec3};
pub use mesh::{FeatureModel, SurfaceMesh, VolumeMesh, VolumeModel};
