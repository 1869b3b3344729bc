//! Accuracy and smoothness measurement.
//!
//! Distances between a high-order mesh and the limit model, Lebesgue
//! constants of nodal distributions with the induced best-approximation
//! bounds, normal- and tangent-angle metrics along feature entities, and the
//! assisted smooth-feature detector.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis1d::gauss_legendre;
use crate::error::MetricsError;
use crate::geometry::Vec3;
use crate::homesh::HighOrderMesh;
use crate::lagrange::TriLagrange;
use crate::lattice;
use crate::limit::LimitEvaluator;
use crate::mesh::SurfaceMesh;
use crate::nodes::{NodalDistribution, NodeKind};

/// Default sampling lattice degree for distance estimates (231 points).
pub const DISTANCE_GRID_DEGREE: usize = 20;
/// Default dense lattice degree for Lebesgue estimates.
pub const LEBESGUE_GRID_DEGREE: usize = 200;
/// Interior samples per edge for normal-angle estimates.
pub const EDGE_ANGLE_SAMPLES: usize = 20;

/// Distance of a high-order mesh to the limit model.
#[derive(Clone, Debug, Serialize)]
pub struct DistanceReport {
    /// Characteristic length used for adimensionalization.
    pub char_length: f64,
    /// max over surfaces of the per-surface distance, divided by the length.
    pub model_distance: f64,
    /// Per-surface supremum distances (not adimensionalized).
    pub per_surface: BTreeMap<u32, f64>,
    /// Per-element supremum distances (not adimensionalized).
    pub per_element: Vec<f64>,
    pub grid_degree: usize,
}

/// Lebesgue constant estimate of a nodal distribution.
#[derive(Clone, Debug, Serialize)]
pub struct LebesgueReport {
    pub degree: usize,
    pub kind: String,
    pub lambda: f64,
    pub grid_degree: usize,
}

/// The equispaced barycentric lattice of the given degree.
pub fn lattice_grid(degree: usize) -> Vec<[f64; 3]> {
    let mut pts = Vec::with_capacity(lattice::tri_node_count(degree));
    for m in lattice::tri_multi_indices(degree) {
        pts.push([
            m[0] as f64 / degree as f64,
            m[1] as f64 / degree as f64,
            m[2] as f64 / degree as f64,
        ]);
    }
    pts
}

fn basis_matrix(ho: &HighOrderMesh, grid: &[[f64; 3]]) -> (TriLagrange, Vec<Vec<f64>>) {
    let dist = crate::nodes::make_distribution(ho.degree, ho.kind).expect("valid distribution");
    let lagr = TriLagrange::new(ho.degree, &dist.points);
    let rows = grid.iter().map(|&p| lagr.eval(p)).collect();
    (lagr, rows)
}

fn ho_point(ho: &HighOrderMesh, element: u32, basis_row: &[f64]) -> Vec3 {
    let el = &ho.elements[element as usize];
    let mut acc = Vec3::ZERO;
    for (&n, &b) in el.iter().zip(basis_row) {
        acc += ho.nodes[n as usize] * b;
    }
    acc
}

/// Supremum (over the sample grid) of the distance between the limit map and
/// the isoparametric map of one element.
pub fn element_distance(
    evaluator: &LimitEvaluator,
    ho: &HighOrderMesh,
    element: u32,
    grid: &[[f64; 3]],
) -> f64 {
    let (_, rows) = basis_matrix(ho, grid);
    element_distance_with(evaluator, ho, element, grid, &rows)
}

fn element_distance_with(
    evaluator: &LimitEvaluator,
    ho: &HighOrderMesh,
    element: u32,
    grid: &[[f64; 3]],
    rows: &[Vec<f64>],
) -> f64 {
    let mut worst = 0.0_f64;
    for (p, row) in grid.iter().zip(rows) {
        let on_limit = evaluator
            .map_onto_limit(element, *p)
            .expect("grid points are valid barycentrics");
        let on_mesh = ho_point(ho, element, row);
        worst = worst.max((on_limit - on_mesh).norm());
    }
    worst
}

/// Distance between the mesh and the limit model: per-surface suprema, their
/// maximum adimensionalized by `char_length`. The grid is the default
/// degree-20 lattice plus the element's own nodes.
pub fn model_distance(
    evaluator: &LimitEvaluator,
    ho: &HighOrderMesh,
    char_length: f64,
) -> DistanceReport {
    assert!(char_length > 0.0);
    let mut grid = lattice_grid(DISTANCE_GRID_DEGREE);
    let own = crate::nodes::make_distribution(ho.degree, ho.kind).expect("valid distribution");
    grid.extend(own.points.iter().copied());
    let (_, rows) = basis_matrix(ho, &grid);

    let per_element: Vec<f64> = (0..ho.elements.len() as u32)
        .into_par_iter()
        .map(|e| element_distance_with(evaluator, ho, e, &grid, &rows))
        .collect();

    let mut per_surface: BTreeMap<u32, f64> = BTreeMap::new();
    for (&sid, elems) in &ho.model.surfaces {
        let d = elems
            .iter()
            .fold(0.0_f64, |m, &e| m.max(per_element[e as usize]));
        per_surface.insert(sid, d);
    }
    let model = per_surface.values().fold(0.0_f64, |m, &d| m.max(d)) / char_length;
    DistanceReport {
        char_length,
        model_distance: model,
        per_surface,
        per_element,
        grid_degree: DISTANCE_GRID_DEGREE,
    }
}

/// Estimates the Lebesgue constant of a distribution on a dense lattice.
pub fn lebesgue_constant(
    distribution: &NodalDistribution,
    grid_degree: usize,
) -> Result<LebesgueReport, MetricsError> {
    let lagr = TriLagrange::new(distribution.degree, &distribution.points);
    if lagr.rcond_estimate < 1e-13 {
        return Err(MetricsError::IllConditioned(lagr.rcond_estimate));
    }
    let grid = lattice_grid(grid_degree);
    let lambda = grid
        .par_iter()
        .map(|&p| lagr.eval(p).iter().map(|l| l.abs()).sum::<f64>())
        .reduce(|| 0.0, f64::max);
    Ok(LebesgueReport {
        degree: distribution.degree,
        kind: distribution.kind.to_string(),
        lambda,
        grid_degree,
    })
}

/// Bounds on the best-approximation error from an interpolation distance and
/// a Lebesgue constant: (distance / (1 + lambda), distance).
pub fn best_approx_bounds(distance: f64, lambda: f64) -> (f64, f64) {
    (distance / (1.0 + lambda), distance)
}

/// Unit normal of the element map at a barycentric point; `None` when the
/// tangents are degenerate there.
fn normal_at(ho: &HighOrderMesh, lagr: &TriLagrange, element: u32, bary: [f64; 3]) -> Option<Vec3> {
    let grads = lagr.eval_grad(bary);
    let el = &ho.elements[element as usize];
    let mut tr = Vec3::ZERO;
    let mut ts = Vec3::ZERO;
    for (&n, (gr, gs)) in el.iter().zip(grads) {
        tr += ho.nodes[n as usize] * gr;
        ts += ho.nodes[n as usize] * gs;
    }
    tr.cross(ts).normalized()
}

fn angle_deg(a: Vec3, b: Vec3) -> f64 {
    a.dot(b).clamp(-1.0, 1.0).acos().to_degrees()
}

/// Maximum angle between the normals of the two elements incident to an
/// edge, sampled at interior points of the edge. Degenerate samples are
/// excluded.
pub fn edge_normal_angle(
    linear: &SurfaceMesh,
    ho: &HighOrderMesh,
    edge: u32,
    samples: usize,
) -> Result<f64, MetricsError> {
    let e = linear.edge(edge);
    let (a, b) = e.verts;
    let [Some(t0), Some(t1)] = e.tris else {
        return Err(MetricsError::NotInteriorEdge(a, b));
    };
    let lagr = {
        let dist = crate::nodes::make_distribution(ho.degree, ho.kind).expect("valid");
        TriLagrange::new(ho.degree, &dist.points)
    };
    let mut worst = 0.0_f64;
    for k in 1..=samples {
        let f = k as f64 / (samples + 1) as f64;
        let mut normals = Vec::with_capacity(2);
        for &t in &[t0, t1] {
            let tri = linear.triangle(t);
            let mut bary = [0.0; 3];
            bary[tri.iter().position(|&v| v == a).unwrap()] = 1.0 - f;
            bary[tri.iter().position(|&v| v == b).unwrap()] = f;
            if let Some(n) = normal_at(ho, &lagr, t, bary) {
                normals.push(n);
            }
        }
        if normals.len() == 2 {
            worst = worst.max(angle_deg(normals[0], normals[1]));
        }
    }
    Ok(worst)
}

/// Maximum [`edge_normal_angle`] over all interior edges that are not
/// feature-curve edges (the smoothness indicator of the whole mesh).
pub fn max_normal_angle(
    linear: &SurfaceMesh,
    ho: &HighOrderMesh,
    crease: &std::collections::HashSet<(u32, u32)>,
) -> f64 {
    let dist = crate::nodes::make_distribution(ho.degree, ho.kind).expect("valid");
    let lagr = TriLagrange::new(ho.degree, &dist.points);
    (0..linear.edges().len() as u32)
        .into_par_iter()
        .map(|ei| {
            let e = linear.edge(ei);
            if e.is_boundary() || crease.contains(&e.verts) {
                return 0.0;
            }
            let (a, b) = e.verts;
            let [t0, t1] = [e.tris[0].unwrap(), e.tris[1].unwrap()];
            let mut worst = 0.0_f64;
            for k in 1..=EDGE_ANGLE_SAMPLES {
                let f = k as f64 / (EDGE_ANGLE_SAMPLES + 1) as f64;
                let mut normals = Vec::with_capacity(2);
                for &t in &[t0, t1] {
                    let tri = linear.triangle(t);
                    let mut bary = [0.0; 3];
                    bary[tri.iter().position(|&v| v == a).unwrap()] = 1.0 - f;
                    bary[tri.iter().position(|&v| v == b).unwrap()] = f;
                    if let Some(n) = normal_at(ho, &lagr, t, bary) {
                        normals.push(n);
                    }
                }
                if normals.len() == 2 {
                    worst = worst.max(angle_deg(normals[0], normals[1]));
                }
            }
            worst
        })
        .reduce(|| 0.0, f64::max)
}

/// Arclength-weighted average of the normal angle along a feature curve,
/// by Gauss quadrature (5 points per degree-q edge).
pub fn curve_average_angle(
    linear: &SurfaceMesh,
    ho: &HighOrderMesh,
    curve: u32,
) -> Result<f64, MetricsError> {
    let chains = ho
        .model
        .curves
        .get(&curve)
        .ok_or(MetricsError::EmptyCurve(curve))?;
    if chains.is_empty() {
        return Err(MetricsError::EmptyCurve(curve));
    }
    let dist = crate::nodes::make_distribution(ho.degree, ho.kind).expect("valid");
    let lagr = TriLagrange::new(ho.degree, &dist.points);
    let edge_params = edge_trace_parameters(&dist);
    let lag1 = crate::basis1d::Lagrange1d::new(
        edge_params.iter().map(|&f| 2.0 * f - 1.0).collect(),
    );
    let (gx, gw) = gauss_legendre(5);

    let mut num = 0.0;
    let mut den = 0.0;
    for ho_edge in chains {
        let (a, b) = (
            ho_edge[0],
            *ho_edge.last().expect("edge chain has q+1 nodes"),
        );
        let e = linear
            .edge_between(a, b)
            .ok_or(MetricsError::NotInteriorEdge(a, b))?;
        let [Some(t0), Some(t1)] = linear.edge(e).tris else {
            return Err(MetricsError::NotInteriorEdge(a, b));
        };
        for (&x, &w) in gx.iter().zip(&gw) {
            let f = (x + 1.0) / 2.0;
            // arclength weight from the 1D restriction of the edge
            let dl = lag1.eval_deriv(x);
            let mut tangent = Vec3::ZERO;
            for (&n, &d) in ho_edge.iter().zip(&dl) {
                tangent += ho.nodes[n as usize] * d;
            }
            let weight = w * tangent.norm();
            let mut normals = Vec::with_capacity(2);
            for &t in &[t0, t1] {
                let tri = linear.triangle(t);
                let mut bary = [0.0; 3];
                bary[tri.iter().position(|&v| v == a).unwrap()] = 1.0 - f;
                bary[tri.iter().position(|&v| v == b).unwrap()] = f;
                if let Some(n) = normal_at(ho, &lagr, t, bary) {
                    normals.push(n);
                }
            }
            if normals.len() == 2 {
                num += weight * angle_deg(normals[0], normals[1]);
                den += weight;
            }
        }
    }
    if den <= 0.0 {
        return Err(MetricsError::EmptyCurve(curve));
    }
    Ok(num / den)
}

/// Fractions along an edge at which the distribution's edge nodes sit
/// (including the endpoints), walked from the edge's first vertex.
fn edge_trace_parameters(dist: &NodalDistribution) -> Vec<f64> {
    let q = dist.degree;
    let multis = lattice::tri_multi_indices(q);
    let mut params = vec![0.0; q + 1];
    params[q] = 1.0;
    for (slot, &m) in multis.iter().enumerate() {
        if let lattice::TriEntity::Edge { edge: 0, t } = lattice::tri_entity(q, m) {
            // edge 0 runs from corner 0 to corner 1
            params[t] = dist.points[slot][1];
        }
    }
    params
}

/// A suggested feature to smooth.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SmoothingSuggestion {
    pub kind: SuggestionKind,
    pub id: u32,
    /// Average normal angle (curves) or tangent mismatch angle (points),
    /// in degrees; absent for isolated points suggested unconditionally.
    pub angle_deg: Option<f64>,
    pub threshold_deg: f64,
    /// Incident-curve count, for points.
    pub incident_curves: Option<usize>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum SuggestionKind {
    Curve,
    Point,
}

/// Which detection pass to run (points are meaningful after the accepted
/// curves have been smoothed and the mesh regenerated).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DetectPass {
    Curves,
    Points,
}

/// Suggests features to smooth: curves whose average normal angle is below
/// the threshold; points with no incident curve (always) or exactly two
/// incident curves joining with a tangent angle below the threshold. Points
/// with one or more than two incident curves are never auto-suggested.
pub fn detect_smooth_candidates(
    linear: &SurfaceMesh,
    ho: &HighOrderMesh,
    delta_deg: f64,
    pass: DetectPass,
) -> Result<Vec<SmoothingSuggestion>, MetricsError> {
    if !(0.0 < delta_deg && delta_deg < 180.0) {
        return Err(MetricsError::BadThreshold(delta_deg));
    }
    let mut out = Vec::new();
    match pass {
        DetectPass::Curves => {
            for &cid in ho.model.curves.keys() {
                // open-boundary curves have one-sided edges; treat them as
                // maximally sharp and never suggest them
                let alpha = match curve_average_angle(linear, ho, cid) {
                    Ok(a) => a,
                    Err(MetricsError::NotInteriorEdge(_, _)) => continue,
                    Err(e) => return Err(e),
                };
                if alpha < delta_deg {
                    out.push(SmoothingSuggestion {
                        kind: SuggestionKind::Curve,
                        id: cid,
                        angle_deg: Some(alpha),
                        threshold_deg: delta_deg,
                        incident_curves: None,
                    });
                }
            }
        }
        DetectPass::Points => {
            let dist = crate::nodes::make_distribution(ho.degree, ho.kind).expect("valid");
            let edge_params = edge_trace_parameters(&dist);
            let lag1 = crate::basis1d::Lagrange1d::new(
                edge_params.iter().map(|&f| 2.0 * f - 1.0).collect(),
            );
            for (&pid, &node) in &ho.model.points {
                // edges of curves incident to this point, directed away
                let mut tangents: Vec<Vec3> = Vec::new();
                let mut incident = std::collections::BTreeSet::new();
                for (&cid, edges) in &ho.model.curves {
                    for ho_edge in edges {
                        let first = ho_edge[0];
                        let last = *ho_edge.last().unwrap();
                        if first != node && last != node {
                            continue;
                        }
                        incident.insert(cid);
                        let x = if first == node { -1.0 } else { 1.0 };
                        let dl = lag1.eval_deriv(x);
                        let mut t = Vec3::ZERO;
                        for (&n, &d) in ho_edge.iter().zip(&dl) {
                            t += ho.nodes[n as usize] * d;
                        }
                        // direct away from the point
                        if last == node {
                            t = -t;
                        }
                        if let Some(t) = t.normalized() {
                            tangents.push(t);
                        }
                    }
                }
                match incident.len() {
                    0 => out.push(SmoothingSuggestion {
                        kind: SuggestionKind::Point,
                        id: pid,
                        angle_deg: None,
                        threshold_deg: delta_deg,
                        incident_curves: Some(0),
                    }),
                    2 if tangents.len() == 2 => {
                        // smooth continuation means opposite tangents
                        let angle = angle_deg(tangents[0], -tangents[1]);
                        if angle < delta_deg {
                            out.push(SmoothingSuggestion {
                                kind: SuggestionKind::Point,
                                id: pid,
                                angle_deg: Some(angle),
                                threshold_deg: delta_deg,
                                incident_curves: Some(2),
                            });
                        }
                    }
                    _ => {}
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::infer_features;
    use crate::nodes::make_distribution;
    use crate::samples;
    use approx::assert_relative_eq;

    fn ho_of(
        mesh: &SurfaceMesh,
        tags: &[u32],
        q: usize,
        kind: NodeKind,
    ) -> (HighOrderMesh, LimitEvaluator) {
        let model = infer_features(mesh, tags).unwrap();
        let dist = make_distribution(q, kind).unwrap();
        crate::homesh::generate_ho_surface_mesh(mesh, &model, q, &dist, 0).unwrap()
    }

    #[test]
    fn lebesgue_q1_is_one() {
        let d = make_distribution(1, NodeKind::Equispaced).unwrap();
        let r = lebesgue_constant(&d, 60).unwrap();
        assert_relative_eq!(r.lambda, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn lebesgue_symmetric_under_permutation() {
        // evaluating on a permuted grid gives the same maximum
        let d = make_distribution(4, NodeKind::WarpBlend).unwrap();
        let lagr = TriLagrange::new(4, &d.points);
        let grid = lattice_grid(40);
        let f = |p: [f64; 3]| lagr.eval(p).iter().map(|l| l.abs()).sum::<f64>();
        let a = grid.iter().map(|&p| f(p)).fold(0.0, f64::max);
        let b = grid
            .iter()
            .map(|&p| f([p[2], p[0], p[1]]))
            .fold(0.0, f64::max);
        assert_relative_eq!(a, b, epsilon = 1e-9);
    }

    #[test]
    fn bounds_shape() {
        let (lo, hi) = best_approx_bounds(7.02e-4, 70.89);
        assert!(lo <= hi);
        assert_relative_eq!(lo, 7.02e-4 / 71.89, epsilon = 1e-12);
        assert_eq!(best_approx_bounds(0.0, 3.0), (0.0, 0.0));
        let (lo, hi) = best_approx_bounds(2.0, 0.0);
        assert_relative_eq!(lo, hi, epsilon = 1e-15);
    }

    #[test]
    fn planar_model_distance_zero_q4() {
        // uniform flat cube: the limit maps are affine, so any q matches
        let (mesh, tags) = samples::cube_surface(2);
        let (ho, ev) = ho_of(&mesh, &tags, 4, NodeKind::Equispaced);
        let report = model_distance(&ev, &ho, 1.0);
        assert!(report.model_distance < 1e-10, "{}", report.model_distance);
    }

    #[test]
    fn coplanar_and_perpendicular_angles() {
        // flat wedge: 0 degrees between normals
        let (mesh, tags) = samples::wedge(180.0, 2);
        let (ho, _) = ho_of(&mesh, &tags, 2, NodeKind::Equispaced);
        // interior non-crease edge
        let e = (0..mesh.edges().len() as u32)
            .find(|&e| !mesh.edge(e).is_boundary())
            .unwrap();
        let a = edge_normal_angle(&mesh, &ho, e, 5).unwrap();
        assert!(a < 1e-7);

        let (mesh, tags) = samples::wedge(90.0, 2);
        let model = infer_features(&mesh, &tags).unwrap();
        let (ho, _) = ho_of(&mesh, &tags, 2, NodeKind::Equispaced);
        // the crease edge between surfaces 1 and 2 is the feature curve;
        // normals there differ by 90 degrees
        let crease_curve = *model
            .curves
            .iter()
            .find(|(_, edges)| {
                edges.iter().all(|&(a, b)| {
                    let e = mesh.edge_between(a, b).unwrap();
                    !mesh.edge(e).is_boundary()
                })
            })
            .map(|(cid, _)| cid)
            .unwrap();
        let alpha = curve_average_angle(&mesh, &ho, crease_curve).unwrap();
        assert_relative_eq!(alpha, 90.0, epsilon = 1e-6);
    }

    #[test]
    fn wedge_120_gives_60_degree_average() {
        let (mesh, tags) = samples::wedge(120.0, 2);
        let model = infer_features(&mesh, &tags).unwrap();
        let (ho, _) = ho_of(&mesh, &tags, 3, NodeKind::Equispaced);
        let crease_curve = *model
            .curves
            .iter()
            .find(|(_, edges)| {
                edges.iter().all(|&(a, b)| {
                    let e = mesh.edge_between(a, b).unwrap();
                    !mesh.edge(e).is_boundary()
                })
            })
            .map(|(cid, _)| cid)
            .unwrap();
        let alpha = curve_average_angle(&mesh, &ho, crease_curve).unwrap();
        assert_relative_eq!(alpha, 60.0, epsilon = 1e-6);
    }

    #[test]
    fn cube_has_no_suggestions_at_17_degrees() {
        let (mesh, tags) = samples::cube_surface(2);
        let (ho, _) = ho_of(&mesh, &tags, 2, NodeKind::Equispaced);
        let s = detect_smooth_candidates(&mesh, &ho, 17.0, DetectPass::Curves).unwrap();
        assert!(s.is_empty(), "{s:?}");
    }

    #[test]
    fn cylinder_seams_detected_rims_not() {
        let (mesh, tags) = samples::cylinder_surface(16, 4, true);
        let model = infer_features(&mesh, &tags).unwrap();
        let (ho, _) = ho_of(&mesh, &tags, 3, NodeKind::WarpBlend);
        let s = detect_smooth_candidates(&mesh, &ho, 17.0, DetectPass::Curves).unwrap();
        // the two vertical seams are flat interfaces; the rim arcs are 90ated
        let suggested: Vec<u32> = s.iter().map(|x| x.id).collect();
        // find the seam curves: those whose edges are vertical lines
        let mut seams = Vec::new();
        for (&cid, edges) in &model.curves {
            let vertical = edges.iter().all(|&(a, b)| {
                let pa = mesh.vertex(a);
                let pb = mesh.vertex(b);
                (pa.x - pb.x).abs() < 1e-12 && (pa.y - pb.y).abs() < 1e-12
            });
            if vertical {
                seams.push(cid);
            }
        }
        assert_eq!(seams.len(), 2);
        for seam in &seams {
            assert!(suggested.contains(seam), "seam {seam} not suggested");
        }
        for id in &suggested {
            assert!(seams.contains(id), "non-seam {id} suggested");
        }
    }

    #[test]
    fn collinear_point_junction_suggested() {
        // split one cube edge into two curves by marking its midpoint as a
        // feature point: the junction is a straight continuation
        let (mesh, tags) = samples::cube_surface(2);
        let mut model = infer_features(&mesh, &tags).unwrap();
        // pick a curve with 2 edges and mark its interior vertex
        let (&cid, edges) = model.curves.iter().find(|(_, e)| e.len() == 2).unwrap();
        let edges = edges.clone();
        let shared = {
            let (a, b) = edges[0];
            let (c, d) = edges[1];
            if a == c || a == d {
                a
            } else {
                b
            }
        };
        let next_pid = model.points.keys().max().unwrap() + 1;
        model.points.insert(next_pid, shared);
        let c2 = model.curves.keys().max().unwrap() + 1;
        model.curves.remove(&cid);
        model.curves.insert(cid, vec![edges[0]]);
        model.curves.insert(c2, vec![edges[1]]);
        let dist = make_distribution(3, NodeKind::Equispaced).unwrap();
        let (ho, _) =
            crate::homesh::generate_ho_surface_mesh(&mesh, &model, 3, &dist, 0).unwrap();
        let s = detect_smooth_candidates(&mesh, &ho, 17.0, DetectPass::Points).unwrap();
        let hit = s
            .iter()
            .find(|x| x.kind == SuggestionKind::Point && ho.model.points[&x.id] == shared);
        assert!(hit.is_some(), "{s:?}");
        assert!(hit.unwrap().angle_deg.unwrap() < 1.0);
    }

    #[test]
    fn detector_invariant_under_rigid_motion_and_scale() {
        let (mesh, tags) = samples::cylinder_surface(12, 3, true);
        let (ho, _) = ho_of(&mesh, &tags, 2, NodeKind::Equispaced);
        let s1 = detect_smooth_candidates(&mesh, &ho, 17.0, DetectPass::Curves).unwrap();

        // rotate + scale the mesh and regenerate
        let rot = |p: Vec3| {
            let (s, c) = (0.6f64.sin(), 0.6f64.cos());
            crate::geometry::vec3(
                3.0 * (c * p.x - s * p.y) + 1.0,
                3.0 * (s * p.x + c * p.y) - 2.0,
                3.0 * p.z + 0.5,
            )
        };
        let moved = SurfaceMesh::new(
            mesh.vertices().iter().map(|&p| rot(p)).collect(),
            mesh.triangles().to_vec(),
        )
        .unwrap();
        let (ho2, _) = ho_of(&moved, &tags, 2, NodeKind::Equispaced);
        let s2 = detect_smooth_candidates(&moved, &ho2, 17.0, DetectPass::Curves).unwrap();
        assert_eq!(s1.len(), s2.len());
        for (a, b) in s1.iter().zip(&s2) {
            assert_eq!(a.id, b.id);
            assert_relative_eq!(
                a.angle_deg.unwrap(),
                b.angle_deg.unwrap(),
                epsilon = 1e-7
            );
        }
    }
}
