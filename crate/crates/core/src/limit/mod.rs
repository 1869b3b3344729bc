//! Element-wise parameterization of the limit model.
//!
//! [`LimitEvaluator`] maps barycentric points of linear-mesh triangles onto
//! the limit model: feature points map to themselves, points interior to a
//! feature curve onto the cubic limit curve, and surface points onto the Loop
//! limit surface. Regular feature-free patches evaluate directly through the
//! quartic box spline; everything else subdivides a local patch until the
//! container becomes regular and feature-free, so the cost grows only
//! logarithmically with the distance to the nearest feature or irregular
//! vertex.

mod basis;
mod patch;

pub use basis::{
    box_spline_basis, box_spline_basis_grad, curve_segment_basis, curve_segment_basis_deriv,
    REGULAR_STENCIL_ORDER,
};
pub use patch::{descend_triangle, LocalPatch, LocalPolyline};

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::error::{EvalError, PipelineError};
use crate::geometry::Vec3;
use crate::mesh::{sorted_pair, FeatureModel, SurfaceMesh};
use crate::subdivision::{compute_control_mesh, ControlMesh};

/// Maximum local refinement depth before falling back to the corner limit
/// mask; only reachable within machine epsilon of an irregular corner.
pub const DEPTH_CAP: usize = 48;

/// Four ordered control points of a limit-curve segment; the middle two are
/// the segment endpoints.
#[derive(Clone, Copy, Debug)]
pub struct CurveStencil(pub [Vec3; 4]);

/// Cubic limit-curve segment value at u in [0, 1].
pub fn eval_curve_segment(stencil: &CurveStencil, u: f64) -> Vec3 {
    basis::eval_curve_segment(&stencil.0, u)
}

/// Control points of a triangle patch: the triangle plus its one-ring.
///
/// Regular patches carry 12 points in the canonical order documented at
/// [`REGULAR_STENCIL_ORDER`]; a patch with one irregular corner carries the
/// local sub-mesh used for repeated subdivision.
#[derive(Clone, Debug)]
pub struct SurfacePatchStencil {
    patch: LocalPatch,
    /// Valence of the irregular corner, if any (then N = valence + 6 points).
    pub irregular_valence: Option<usize>,
}

impl SurfacePatchStencil {
    /// Builds the stencil from a local patch whose container has complete
    /// rings, at most one irregular corner, and no feature contact.
    pub fn from_patch(patch: LocalPatch) -> Result<SurfacePatchStencil, EvalError> {
        let val = patch
            .corner_valences()
            .expect("container corner rings are complete");
        for &k in &val {
            if k < 3 {
                return Err(EvalError::ValenceTooSmall(k));
            }
        }
        let irregular: Vec<usize> = val.iter().copied().filter(|&k| k != 6).collect();
        assert!(
            irregular.len() <= 1,
            "patch stencil requires at most one irregular vertex"
        );
        assert!(
            !patch.has_feature(),
            "patch stencil must be free of feature entities"
        );
        Ok(SurfacePatchStencil {
            irregular_valence: irregular.first().copied(),
            patch,
        })
    }

    /// Number of control points: 12 when regular, valence + 6 otherwise.
    pub fn len(&self) -> usize {
        match self.irregular_valence {
            None => 12,
            Some(k) => k + 6,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Control points; canonical box-spline order when regular.
    pub fn points(&self) -> Vec<Vec3> {
        if let Some(st) = self.patch.regular_stencil() {
            return st.to_vec();
        }
        self.patch.verts.clone()
    }
}

/// Result of a surface evaluation.
#[derive(Clone, Copy, Debug)]
pub struct SurfaceEval {
    pub point: Vec3,
    /// Tangents with respect to the barycentric parameters (v, w) of the
    /// original triangle; `None` on the corner-mask path.
    pub tangents: Option<(Vec3, Vec3)>,
    /// True when the depth cap forced the corner limit mask.
    pub used_corner_fallback: bool,
}

/// Evaluates a surface patch at barycentric `bary`, descending into local
/// subdivisions while the container patch stays irregular.
pub fn eval_surface_patch(stencil: &SurfacePatchStencil, bary: [f64; 3]) -> SurfaceEval {
    eval_patch_loop(stencil.patch.clone(), bary, [[1.0, 0.0], [0.0, 1.0]])
}

fn mat2_mul(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

/// Shared descent loop: assumes the patch is feature-free; `chain` maps the
/// current patch parameters back to the caller's (v, w).
fn eval_patch_loop(mut patch: LocalPatch, mut bary: [f64; 3], mut chain: [[f64; 2]; 2]) -> SurfaceEval {
    loop {
        let val = patch
            .corner_valences()
            .expect("container corner rings are complete");
        let ev_slot = (0..3).find(|&k| val[k] != 6);
        match ev_slot {
            None => {
                let stencil = patch
                    .regular_stencil()
                    .expect("regular container has a 12-point stencil");
                let (v, w) = (bary[1], bary[2]);
                let point = basis::eval_box_spline(&stencil, v, w);
                let (gv, gw) = basis::eval_box_spline_grad(&stencil, v, w);
                // pull tangents back through the parameter chain
                let tv = gv * chain[0][0] + gw * chain[1][0];
                let tw = gv * chain[0][1] + gw * chain[1][1];
                return SurfaceEval {
                    point,
                    tangents: Some((tv, tw)),
                    used_corner_fallback: false,
                };
            }
            Some(slot) => {
                if bary[slot] >= 1.0 {
                    // exactly the irregular corner: the limit mask is exact
                    let point = patch
                        .corner_limit_position(slot)
                        .expect("corner ring is complete");
                    return SurfaceEval {
                        point,
                        tangents: None,
                        used_corner_fallback: false,
                    };
                }
                if patch.depth >= DEPTH_CAP {
                    let point = patch
                        .corner_limit_position(slot)
                        .expect("corner ring is complete");
                    return SurfaceEval {
                        point,
                        tangents: None,
                        used_corner_fallback: true,
                    };
                }
                let child = patch.subdivide_and_descend(&mut bary);
                chain = mat2_mul(patch::descend_jacobian(child), chain);
            }
        }
    }
}

/// An evaluation point: element index plus barycentric coordinates.
#[derive(Clone, Copy, Debug)]
pub struct EvalPoint {
    pub element: u32,
    pub bary: [f64; 3],
}

/// Ordered vertex walk of one feature curve.
#[derive(Clone, Debug)]
pub struct Chain {
    pub vertices: Vec<u32>,
    pub closed: bool,
}

impl Chain {
    pub fn n_segments(&self) -> usize {
        if self.closed {
            self.vertices.len()
        } else {
            self.vertices.len() - 1
        }
    }

    pub fn segment(&self, k: usize) -> (u32, u32) {
        let n = self.vertices.len();
        (self.vertices[k], self.vertices[(k + 1) % n])
    }
}

fn build_chain(edges: &[(u32, u32)]) -> Chain {
    let mut adj: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for &(a, b) in edges {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    let endpoints: Vec<u32> = adj
        .iter()
        .filter(|(_, n)| n.len() == 1)
        .map(|(&v, _)| v)
        .collect();
    let closed = endpoints.is_empty();
    let (start, first) = if closed {
        let &(a, b) = edges.iter().min().unwrap();
        (a, b)
    } else {
        let s = *endpoints.iter().min().unwrap();
        (s, adj[&s][0])
    };
    let mut vertices = vec![start, first];
    let mut used: HashSet<(u32, u32)> = HashSet::new();
    used.insert(sorted_pair(start, first));
    let mut cur = first;
    loop {
        let next = adj[&cur]
            .iter()
            .copied()
            .find(|&n| !used.contains(&sorted_pair(cur, n)));
        match next {
            Some(n) => {
                used.insert(sorted_pair(cur, n));
                if closed && n == start {
                    break;
                }
                vertices.push(n);
                cur = n;
            }
            None => break,
        }
    }
    Chain { vertices, closed }
}

/// Element-wise parameterization of the limit model. Immutable after
/// construction; evaluation calls are pure and thread-safe.
pub struct LimitEvaluator {
    control: SurfaceMesh,
    original: Vec<Vec3>,
    model: FeatureModel,
    crease_edges: HashSet<(u32, u32)>,
    point_vertices: HashSet<u32>,
    curve_vertices: HashSet<u32>,
    chains: BTreeMap<u32, Chain>,
    /// Position of each curve edge within its chain.
    edge_segment: HashMap<(u32, u32), (u32, u32)>,
    pub control_residual: f64,
}

impl LimitEvaluator {
    /// Completes and validates the model, solves the interpolative control
    /// mesh, and prepares the adjacency caches.
    pub fn new(mesh: &SurfaceMesh, model: &FeatureModel) -> Result<LimitEvaluator, PipelineError> {
        let model = crate::mesh::complete_model(mesh, model.clone())?;
        let control = compute_control_mesh(mesh, &model)?;
        Self::from_control(mesh.vertices().to_vec(), control, model)
    }

    /// Builds the evaluator from an already-solved control mesh.
    pub fn from_control(
        original: Vec<Vec3>,
        control: ControlMesh,
        model: FeatureModel,
    ) -> Result<LimitEvaluator, PipelineError> {
        let mut crease_edges = HashSet::new();
        let mut chains = BTreeMap::new();
        let mut edge_segment = HashMap::new();
        for (&cid, edges) in &model.curves {
            let chain = build_chain(edges);
            for k in 0..chain.n_segments() {
                let (a, b) = chain.segment(k);
                edge_segment.insert(sorted_pair(a, b), (cid, k as u32));
            }
            chains.insert(cid, chain);
            for &e in edges {
                crease_edges.insert(e);
            }
        }
        let point_vertices = model.feature_point_vertices();
        let curve_vertices = model.curve_vertices();
        Ok(LimitEvaluator {
            original,
            crease_edges,
            point_vertices,
            curve_vertices,
            chains,
            edge_segment,
            control_residual: control.residual,
            control: control.mesh,
            model,
        })
    }

    pub fn control_mesh(&self) -> &SurfaceMesh {
        &self.control
    }

    pub fn model(&self) -> &FeatureModel {
        &self.model
    }

    pub fn chains(&self) -> &BTreeMap<u32, Chain> {
        &self.chains
    }

    pub fn original_positions(&self) -> &[Vec3] {
        &self.original
    }

    fn snap(xi: [f64; 3]) -> Result<[f64; 3], EvalError> {
        let mut out = xi;
        for c in &mut out {
            if c.abs() < 1e-13 {
                *c = 0.0;
            }
            if *c < 0.0 || !c.is_finite() {
                return Err(EvalError::InvalidBarycentric(xi[0], xi[1], xi[2]));
            }
        }
        let sum: f64 = out.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(EvalError::InvalidBarycentric(xi[0], xi[1], xi[2]));
        }
        Ok([out[0] / sum, out[1] / sum, out[2] / sum])
    }

    /// Maps a barycentric point of triangle `tri` onto the limit model:
    /// feature points stay, feature-curve interiors go through the limit
    /// curve, everything else through the limit surface.
    pub fn map_onto_limit(&self, tri: u32, xi: [f64; 3]) -> Result<Vec3, EvalError> {
        self.map_onto_limit_full(tri, xi).map(|e| e.point)
    }

    /// Like [`Self::map_onto_limit`], with tangents where the regular path
    /// provides them.
    pub fn map_onto_limit_full(&self, tri: u32, xi: [f64; 3]) -> Result<SurfaceEval, EvalError> {
        let xi = Self::snap(xi)?;
        let t = self.control.triangle(tri);
        let zeros: Vec<usize> = (0..3).filter(|&i| xi[i] == 0.0).collect();
        match zeros.len() {
            2 => {
                let slot = (0..3).find(|&i| xi[i] != 0.0).unwrap();
                let v = t[slot];
                if self.point_vertices.contains(&v) {
                    return Ok(SurfaceEval {
                        point: self.original[v as usize],
                        tangents: None,
                        used_corner_fallback: false,
                    });
                }
                if self.curve_vertices.contains(&v) {
                    let point = self.vertex_on_curve(v)?;
                    return Ok(SurfaceEval {
                        point,
                        tangents: None,
                        used_corner_fallback: false,
                    });
                }
                self.map_onto_limit_surface(tri, xi)
            }
            1 => {
                let z = zeros[0];
                let (a, b) = (t[(z + 1) % 3], t[(z + 2) % 3]);
                let key = sorted_pair(a, b);
                if let Some(&(cid, seg)) = self.edge_segment.get(&key) {
                    let chain = &self.chains[&cid];
                    let (s0, s1) = chain.segment(seg as usize);
                    // weight of the segment's second vertex
                    let tb = if s1 == b {
                        xi[(z + 2) % 3]
                    } else {
                        debug_assert_eq!(s1, a);
                        xi[(z + 1) % 3]
                    };
                    debug_assert!(s0 == a || s0 == b);
                    let point = self.map_onto_limit_curve(cid, seg as usize, tb)?;
                    return Ok(SurfaceEval {
                        point,
                        tangents: None,
                        used_corner_fallback: false,
                    });
                }
                self.map_onto_limit_surface(tri, xi)
            }
            _ => self.map_onto_limit_surface(tri, xi),
        }
    }

    /// Limit position of a vertex lying in the interior of a feature curve.
    fn vertex_on_curve(&self, v: u32) -> Result<Vec3, EvalError> {
        let mut incident: Vec<(u32, u32)> = self
            .edge_segment
            .iter()
            .filter(|(&(a, b), _)| a == v || b == v)
            .map(|(_, &cs)| cs)
            .collect();
        incident.sort_unstable();
        let (cid, seg) = incident[0];
        let chain = &self.chains[&cid];
        let (s0, _s1) = chain.segment(seg as usize);
        let t = if s0 == v { 0.0 } else { 1.0 };
        self.map_onto_limit_curve(cid, seg as usize, t)
    }

    /// Maps parameter `t` of segment `seg` of feature curve `curve` onto the
    /// limit curve, refining the local polyline while the container touches a
    /// feature point.
    pub fn map_onto_limit_curve(
        &self,
        curve: u32,
        seg: usize,
        t: f64,
    ) -> Result<Vec3, EvalError> {
        let chain = self.chains.get(&curve).ok_or(EvalError::OnFeaturePoint)?;
        let n = chain.vertices.len();
        let (s0, s1) = chain.segment(seg);
        if self.point_vertices.contains(&s0) && t == 0.0 {
            return Err(EvalError::OnFeaturePoint);
        }
        if self.point_vertices.contains(&s1) && t >= 1.0 {
            return Err(EvalError::OnFeaturePoint);
        }

        let pos = |k: isize| -> Option<u32> {
            if chain.closed {
                Some(chain.vertices[k.rem_euclid(n as isize) as usize])
            } else if (0..n as isize).contains(&k) {
                Some(chain.vertices[k as usize])
            } else {
                None
            }
        };
        // window: segment endpoints plus one neighbor vertex per side when it
        // exists (missing neighbors imply pinned chain endpoints)
        let mut pts = Vec::with_capacity(4);
        let mut fixed = Vec::with_capacity(4);
        for k in (seg as isize - 1)..=(seg as isize + 2) {
            if let Some(v) = pos(k) {
                pts.push(self.control.vertex(v));
                fixed.push(self.point_vertices.contains(&v));
            }
        }
        let container = usize::from(pos(seg as isize - 1).is_some());
        let mut line = LocalPolyline {
            pts,
            fixed,
            container,
        };
        let mut u = t;
        let mut depth = 0;
        while line.adjacent_to_feature() {
            line.subdivide_and_descend(&mut u);
            depth += 1;
            if depth > DEPTH_CAP {
                // only reachable within epsilon of a pinned endpoint
                return Ok(line.pts[line.container]);
            }
        }
        Ok(line.eval(u))
    }

    /// Maps a point interior to a feature surface onto the limit surface,
    /// isolating irregular corners and receding from features by local
    /// subdivision.
    pub fn map_onto_limit_surface(
        &self,
        tri: u32,
        xi: [f64; 3],
    ) -> Result<SurfaceEval, EvalError> {
        let xi = Self::snap(xi)?;
        let mut patch = LocalPatch::extract(
            &self.control,
            tri,
            &self.crease_edges,
            &self.point_vertices,
            |v| self.curve_vertices.contains(&v) || self.point_vertices.contains(&v),
        );
        let mut bary = xi;
        let mut chain = [[1.0, 0.0], [0.0, 1.0]];

        // isolate multiple irregular corners with one refinement; when a
        // corner ring is open (feature contact) the feature loop below
        // refines at least once, which isolates as a side effect
        if let Some(val) = patch.corner_valences() {
            if val.iter().filter(|&&k| k != 6).count() > 1 {
                let child = patch.subdivide_and_descend(&mut bary);
                chain = mat2_mul(patch::descend_jacobian(child), chain);
            }
        }
        while patch.has_feature() {
            if patch.depth >= DEPTH_CAP {
                break;
            }
            let child = patch.subdivide_and_descend(&mut bary);
            chain = mat2_mul(patch::descend_jacobian(child), chain);
        }
        Ok(eval_patch_loop(patch, bary, chain))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{vec3, Vec3};
    use crate::mesh::infer_features;
    use crate::samples;
    use crate::subdivision::{limit_mesh_positions, subdivide_surface};
    use approx::assert_relative_eq;

    fn evaluator_for(mesh: &SurfaceMesh, tags: &[u32]) -> LimitEvaluator {
        let model = infer_features(mesh, tags).unwrap();
        LimitEvaluator::new(mesh, &model).unwrap()
    }

    #[test]
    fn planar_mesh_limit_stays_in_plane() {
        // the limit of a flat control mesh is flat; the parameterization of
        // an uneven flat mesh need not be the affine map, so only the plane
        // membership and vertex interpolation are asserted here
        let mesh = samples::planar_patch(3);
        let tags = vec![1u32; mesh.triangles().len()];
        let ev = evaluator_for(&mesh, &tags);
        for tri in 0..mesh.triangles().len() as u32 {
            for bary in [[1.0 / 3.0; 3], [0.7, 0.1, 0.2], [0.5, 0.5, 0.0], [1.0, 0.0, 0.0]] {
                let p = ev.map_onto_limit(tri, bary).unwrap();
                assert!(p.z.abs() < 1e-10);
            }
            let t = mesh.triangle(tri);
            for slot in 0..3 {
                let mut bary = [0.0; 3];
                bary[slot] = 1.0;
                let p = ev.map_onto_limit(tri, bary).unwrap();
                assert_relative_eq!(
                    (p - mesh.vertex(t[slot])).norm(),
                    0.0,
                    epsilon = 1e-9
                );
            }
        }
    }

    #[test]
    fn uniform_flat_cube_limit_is_pointwise_identity() {
        // on a uniform piecewise-flat model the control solve is the
        // identity and every branch of the dispatch reproduces the linear
        // map exactly: surface patches, crease curves, and corners
        let (mesh, tags) = samples::cube_surface(3);
        let ev = evaluator_for(&mesh, &tags);
        assert!(ev.control_residual < 1e-12);
        for tri in (0..mesh.triangles().len() as u32).step_by(7) {
            for bary in [
                [1.0 / 3.0; 3],
                [0.6, 0.25, 0.15],
                [0.5, 0.5, 0.0],
                [0.0, 0.25, 0.75],
                [1.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
            ] {
                let p = ev.map_onto_limit(tri, bary).unwrap();
                let lin = mesh.point_in_triangle(tri, bary);
                assert_relative_eq!((p - lin).norm(), 0.0, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn feature_point_identity() {
        let (mesh, tags) = samples::cube_surface(2);
        let model = infer_features(&mesh, &tags).unwrap();
        let ev = LimitEvaluator::new(&mesh, &model).unwrap();
        let corner = *model.points.values().next().unwrap();
        // find a triangle containing the corner
        let (tri, slot) = mesh
            .triangles()
            .iter()
            .enumerate()
            .find_map(|(ti, t)| t.iter().position(|&v| v == corner).map(|s| (ti, s)))
            .unwrap();
        let mut bary = [0.0; 3];
        bary[slot] = 1.0;
        let p = ev.map_onto_limit(tri as u32, bary).unwrap();
        assert_eq!(p, mesh.vertex(corner));
    }

    #[test]
    fn curve_point_matches_direct_dispatch() {
        let (mesh, tags) = samples::cube_surface(2);
        let model = infer_features(&mesh, &tags).unwrap();
        let ev = LimitEvaluator::new(&mesh, &model).unwrap();
        // pick a curve edge and the triangle containing it
        let (&key, &(cid, seg)) = ev
            .edge_segment
            .iter()
            .min_by_key(|(&(a, b), _)| (a, b))
            .unwrap();
        let (a, b) = key;
        let e = mesh.edge_between(a, b).unwrap();
        let tri = mesh.edge(e).tris[0].unwrap();
        let t = mesh.triangle(tri);
        let (ia, ib) = (
            t.iter().position(|&v| v == a).unwrap(),
            t.iter().position(|&v| v == b).unwrap(),
        );
        let mut bary = [0.0; 3];
        bary[ia] = 0.5;
        bary[ib] = 0.5;
        let via_tri = ev.map_onto_limit(tri, bary).unwrap();
        let chain = &ev.chains[&cid];
        let (s0, _) = chain.segment(seg as usize);
        let tpar = if s0 == a { 0.5 } else { 0.5 };
        let via_curve = ev.map_onto_limit_curve(cid, seg as usize, tpar).unwrap();
        assert_relative_eq!((via_tri - via_curve).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn corner_of_regular_stencil_is_limit_position() {
        let mesh = samples::torus(12, 9, 1.0, 0.4);
        let tags = vec![1u32; mesh.triangles().len()];
        let model = infer_features(&mesh, &tags).unwrap();
        let ev = LimitEvaluator::new(&mesh, &model).unwrap();
        let limits = limit_mesh_positions(ev.control_mesh(), &model).unwrap();
        for tri in [0u32, 5, 41] {
            for slot in 0..3 {
                let mut bary = [0.0; 3];
                bary[slot] = 1.0;
                let p = ev.map_onto_limit(tri, bary).unwrap();
                let v = mesh.triangle(tri)[slot];
                assert_relative_eq!((p - limits[v as usize]).norm(), 0.0, epsilon = 1e-12);
                // and the limit projection of the control mesh reproduces the
                // input mesh (interpolation property)
                assert_relative_eq!(
                    (limits[v as usize] - mesh.vertex(v)).norm(),
                    0.0,
                    epsilon = 1e-9
                );
            }
        }
    }

    #[test]
    fn watertight_across_shared_edges() {
        let mesh = samples::reference_sphere();
        let tags = vec![1u32; mesh.triangles().len()];
        let ev = evaluator_for(&mesh, &tags);
        for e in [3u32, 100, 500] {
            let edge = mesh.edge(e);
            let (a, b) = edge.verts;
            let [t0, t1] = [edge.tris[0].unwrap(), edge.tris[1].unwrap()];
            for frac in [0.25, 0.5, 0.8] {
                let mut evals = Vec::new();
                for t in [t0, t1] {
                    let tv = mesh.triangle(t);
                    let mut bary = [0.0; 3];
                    bary[tv.iter().position(|&v| v == a).unwrap()] = 1.0 - frac;
                    bary[tv.iter().position(|&v| v == b).unwrap()] = frac;
                    evals.push(ev.map_onto_limit(t, bary).unwrap());
                }
                assert_relative_eq!((evals[0] - evals[1]).norm(), 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn dyadic_oracle_small() {
        // master correctness check at denominators <= 4 on a featured cube
        // and on a mixed-valence sphere
        for (mesh, tags) in [samples::cube_surface(2), {
            let m = samples::uv_sphere(8, 5, 1.0);
            let t = vec![1u32; m.triangles().len()];
            (m, t)
        }] {
            let model = infer_features(&mesh, &tags).unwrap();
            let ev = LimitEvaluator::new(&mesh, &model).unwrap();
            let n = 2usize;

            // global-subdivision oracle on the control mesh
            let mut meshes = vec![ev.control_mesh().clone()];
            let mut models = vec![model.clone()];
            let mut traces = Vec::new();
            for l in 0..n {
                let (m, mo, tr) = subdivide_surface(&meshes[l], &models[l]).unwrap();
                meshes.push(m);
                models.push(mo);
                traces.push(tr);
            }
            let limits = limit_mesh_positions(&meshes[n], &models[n]).unwrap();

            let denom = 1 << n;
            for tri in 0..mesh.triangles().len() as u32 {
                for i in 0..=denom {
                    for j in 0..=(denom - i) {
                        let k = denom - i - j;
                        let bary = [
                            i as f64 / denom as f64,
                            j as f64 / denom as f64,
                            k as f64 / denom as f64,
                        ];
                        let p = ev.map_onto_limit(tri, bary).unwrap();
                        // descend the trace to the coincident fine vertex
                        let mut cur = tri;
                        let mut b = bary;
                        for tr in &traces {
                            let (child, nb) = descend_triangle(b);
                            cur = tr.children[cur as usize][child];
                            b = nb;
                        }
                        let slot = (0..3).find(|&s| b[s] >= 1.0 - 1e-12).unwrap();
                        let v = meshes[n].triangle(cur)[slot];
                        let oracle = limits[v as usize];
                        assert!(
                            (p - oracle).norm() < 1e-9,
                            "tri {tri} bary {bary:?}: {p:?} vs {oracle:?}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn irregular_corner_exact_and_near() {
        // icosahedron: all vertices valence 5
        let mesh = samples::icosahedron(1.0);
        let tags = vec![1u32; mesh.triangles().len()];
        let ev = evaluator_for(&mesh, &tags);
        let model = infer_features(&mesh, &tags).unwrap();
        let limits = limit_mesh_positions(ev.control_mesh(), &model).unwrap();
        let p = ev.map_onto_limit(0, [1.0, 0.0, 0.0]).unwrap();
        let v = mesh.triangle(0)[0];
        assert_relative_eq!((p - limits[v as usize]).norm(), 0.0, epsilon = 1e-12);
        // extremely close to the corner: falls back to the mask within cap
        let eps = 1e-16;
        let res = ev
            .map_onto_limit_full(0, [1.0 - 2.0 * eps, eps, eps])
            .unwrap();
        assert!((res.point - limits[v as usize]).norm() < 1e-9);
    }

    /// Uniform regular lattice patch around the triangle (0,0),(1,0),(0,1),
    /// mapped into the plane by an arbitrary affine frame.
    fn uniform_regular_patch(origin: Vec3, du: Vec3, dv: Vec3) -> LocalPatch {
        let lattice_pt = |i: i32, j: i32| origin + du * i as f64 + dv * j as f64;
        let corners = [(0, 0), (1, 0), (0, 1)];
        let mut tris_lattice: Vec<[(i32, i32); 3]> = Vec::new();
        for i in -2..3 {
            for j in -2..3 {
                let up = [(i, j), (i + 1, j), (i, j + 1)];
                let down = [(i + 1, j), (i + 1, j + 1), (i, j + 1)];
                for t in [up, down] {
                    if t.iter().any(|p| corners.contains(p)) {
                        tris_lattice.push(t);
                    }
                }
            }
        }
        let mut ids: HashMap<(i32, i32), u32> = HashMap::new();
        let mut verts = Vec::new();
        let mut tris = Vec::new();
        let mut container = 0;
        for (k, t) in tris_lattice.iter().enumerate() {
            if *t == [(0, 0), (1, 0), (0, 1)] {
                container = k;
            }
            let mut lt = [0u32; 3];
            for (s, &p) in t.iter().enumerate() {
                let id = *ids.entry(p).or_insert_with(|| {
                    verts.push(lattice_pt(p.0, p.1));
                    (verts.len() - 1) as u32
                });
                lt[s] = id;
            }
            tris.push(lt);
        }
        LocalPatch {
            verts,
            tris,
            crease: HashSet::new(),
            points: HashSet::new(),
            outer_on_feature: false,
            container,
            depth: 0,
        }
    }

    #[test]
    fn uniform_planar_stencil_has_linear_precision() {
        // spec of the regular patch: a uniform planar stencil evaluates to
        // the affine image of the barycentric point, with exact tangents
        let origin = vec3(0.3, -0.2, 0.7);
        let du = vec3(1.0, 0.25, -0.5);
        let dv = vec3(-0.2, 1.1, 0.4);
        let patch = uniform_regular_patch(origin, du, dv);
        let stencil = SurfacePatchStencil::from_patch(patch).unwrap();
        assert_eq!(stencil.len(), 12);
        assert!(stencil.irregular_valence.is_none());
        for bary in [[1.0, 0.0, 0.0], [0.25, 0.5, 0.25], [0.0, 0.5, 0.5], [0.1, 0.2, 0.7]] {
            let res = eval_surface_patch(&stencil, bary);
            let expect = origin + du * bary[1] + dv * bary[2];
            assert_relative_eq!((res.point - expect).norm(), 0.0, epsilon = 1e-13);
            let (tv, tw) = res.tangents.unwrap();
            assert_relative_eq!((tv - du).norm(), 0.0, epsilon = 1e-12);
            assert_relative_eq!((tw - dv).norm(), 0.0, epsilon = 1e-12);
        }
        // all control points equal p -> p (partition of unity)
        let mut same = uniform_regular_patch(origin, du, dv);
        let q = vec3(4.0, 5.0, -6.0);
        for v in &mut same.verts {
            *v = q;
        }
        let st = SurfacePatchStencil::from_patch(same).unwrap();
        let res = eval_surface_patch(&st, [0.3, 0.5, 0.2]);
        assert_relative_eq!((res.point - q).norm(), 0.0, epsilon = 1e-13);
    }
}
