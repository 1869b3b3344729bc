//! Mesh file I/O.
//!
//! Gmsh MSH (versions 2.2 and 4.1, ASCII) round-trips linear and high-order
//! meshes with feature tags: surface ids ride on triangles, curve ids on line
//! elements, point ids on point elements, each in its own dimension's
//! namespace. VTU output (Lagrange cells) serves visualization with optional
//! scalar fields. A JSON sidecar carries the full feature model when the
//! mesh format cannot.
//!
//! High-order node coordinates are written in the canonical lattice slot
//! order. Tools that assume equispaced reference nodes will read a mesh with
//! the same node positions whose in-element parameterization differs when a
//! non-lattice distribution generated the nodes.

mod msh;
mod sidecar;
mod vtu;

pub use msh::{
    read_msh, write_linear_surface_msh, write_linear_volume_msh, write_ho_msh, MshVersion, RawMsh,
};
pub use sidecar::{read_sidecar, write_sidecar};
pub use vtu::{write_vtu, VtuField};

use std::path::Path;

use crate::error::IoError;
use crate::mesh::{FeatureModel, SurfaceMesh, VolumeMesh, VolumeModel};

/// Result of loading a linear mesh file.
pub enum LoadedMesh {
    Surface {
        mesh: SurfaceMesh,
        model: FeatureModel,
    },
    Volume {
        mesh: VolumeMesh,
        model: VolumeModel,
    },
}

/// Loads a linear (degree-1) mesh with its feature tags, from either MSH
/// version. Files with tetrahedra load as volumes; pure triangle files load
/// as surfaces with curve and point features taken from tagged line and
/// point elements.
pub fn load_linear_mesh(path: impl AsRef<Path>) -> Result<LoadedMesh, IoError> {
    let raw = read_msh(path)?;
    raw.into_linear()
}
