//! Local sub-meshes for element-wise limit evaluation.
//!
//! A [`LocalPatch`] is the one-ring closure of a container triangle: every
//! triangle sharing a vertex with it. That closure is exactly the data needed
//! to evaluate the limit patch over the container, and one refinement step of
//! it yields the closure of the container's child: the child stencil only
//! involves updates of the container corners and midpoints of corner-incident
//! edges, all of whose masks are complete inside the closure. The patch
//! therefore supports repeated subdivide-and-descend without touching the
//! global mesh.
//!
//! A [`LocalPolyline`] is the curve-side analogue: the container segment plus
//! one neighbor segment per side.

use std::collections::{HashMap, HashSet};

use crate::geometry::Vec3;
use crate::limit::basis;
use crate::mesh::sorted_pair;

/// Barycentric descent: which child contains `bary`, and `bary` remapped.
///
/// A coordinate strictly greater than 1/2 selects that corner's child; ties
/// and interior points go to the central child. The remap is exact for dyadic
/// inputs.
pub fn descend_triangle(bary: [f64; 3]) -> (usize, [f64; 3]) {
    if bary[0] > 0.5 {
        (0, [2.0 * bary[0] - 1.0, 2.0 * bary[1], 2.0 * bary[2]])
    } else if bary[1] > 0.5 {
        (1, [2.0 * bary[1] - 1.0, 2.0 * bary[2], 2.0 * bary[0]])
    } else if bary[2] > 0.5 {
        (2, [2.0 * bary[2] - 1.0, 2.0 * bary[0], 2.0 * bary[1]])
    } else {
        (
            3,
            [
                1.0 - 2.0 * bary[2],
                1.0 - 2.0 * bary[0],
                1.0 - 2.0 * bary[1],
            ],
        )
    }
}

/// Parameter Jacobian d(v', w')/d(v, w) of [`descend_triangle`] per child,
/// with (v, w) = (bary[1], bary[2]).
pub fn descend_jacobian(child: usize) -> [[f64; 2]; 2] {
    match child {
        0 => [[2.0, 0.0], [0.0, 2.0]],
        1 => [[0.0, 2.0], [-2.0, -2.0]],
        2 => [[-2.0, -2.0], [2.0, 0.0]],
        _ => [[2.0, 2.0], [-2.0, 0.0]],
    }
}

#[derive(Clone, Debug)]
pub struct LocalPatch {
    pub verts: Vec<Vec3>,
    pub tris: Vec<[u32; 3]>,
    /// Crease (feature-curve) edges among local vertices, sorted pairs.
    pub crease: HashSet<(u32, u32)>,
    /// Feature-point vertices (local ids).
    pub points: HashSet<u32>,
    /// Closure vertices lying on a feature outside the patch; only possible
    /// before the first local refinement.
    pub outer_on_feature: bool,
    pub container: usize,
    /// Local refinements performed so far.
    pub depth: usize,
}

impl LocalPatch {
    /// Extracts the one-ring closure of triangle `tri` of `mesh`.
    ///
    /// `crease_edges` and `feature_points` are the global crease data;
    /// `on_feature` tells whether a global vertex lies on any feature.
    pub fn extract(
        mesh: &crate::mesh::SurfaceMesh,
        tri: u32,
        crease_edges: &HashSet<(u32, u32)>,
        feature_points: &HashSet<u32>,
        on_feature: impl Fn(u32) -> bool,
    ) -> LocalPatch {
        let corners = mesh.triangle(tri);
        let mut tri_set: Vec<u32> = Vec::new();
        let mut seen_t = HashSet::new();
        for &c in &corners {
            for &t in &mesh.ring(c).triangles {
                if seen_t.insert(t) {
                    tri_set.push(t);
                }
            }
        }
        // container first, then the rest in discovery order
        tri_set.retain(|&t| t != tri);
        tri_set.insert(0, tri);

        let mut local_of: HashMap<u32, u32> = HashMap::new();
        let mut global_of: Vec<u32> = Vec::new();
        let mut verts = Vec::new();
        let mut tris = Vec::new();
        for &t in &tri_set {
            let tv = mesh.triangle(t);
            let mut lt = [0u32; 3];
            for (k, &v) in tv.iter().enumerate() {
                let lid = *local_of.entry(v).or_insert_with(|| {
                    verts.push(mesh.vertex(v));
                    global_of.push(v);
                    (verts.len() - 1) as u32
                });
                lt[k] = lid;
            }
            tris.push(lt);
        }

        let mut points = HashSet::new();
        let mut outer_on_feature = false;
        for (lv, &gv) in global_of.iter().enumerate() {
            if feature_points.contains(&gv) {
                points.insert(lv as u32);
            }
            if on_feature(gv) {
                outer_on_feature = true;
            }
        }
        let mut crease = HashSet::new();
        for t in &tris {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                let g = sorted_pair(global_of[a as usize], global_of[b as usize]);
                if crease_edges.contains(&g) {
                    crease.insert(sorted_pair(a, b));
                }
            }
        }

        LocalPatch {
            verts,
            tris,
            crease,
            points,
            outer_on_feature,
            container: 0,
            depth: 0,
        }
    }

    pub fn container_corners(&self) -> [u32; 3] {
        self.tris[self.container]
    }

    /// Any feature data inside (or known to touch) the closure.
    pub fn has_feature(&self) -> bool {
        self.outer_on_feature || !self.crease.is_empty() || !self.points.is_empty()
    }

    fn edge_tris(&self) -> HashMap<(u32, u32), Vec<u32>> {
        let mut map: HashMap<(u32, u32), Vec<u32>> = HashMap::new();
        for (ti, t) in self.tris.iter().enumerate() {
            for k in 0..3 {
                map.entry(sorted_pair(t[k], t[(k + 1) % 3]))
                    .or_default()
                    .push(ti as u32);
            }
        }
        map
    }

    /// Counterclockwise ring of `v` walked over the local triangles; `None`
    /// if the ring does not close (incomplete data, never the case for
    /// container corners).
    pub fn ring_of(&self, v: u32) -> Option<Vec<u32>> {
        let mut succ: HashMap<u32, u32> = HashMap::new();
        for t in &self.tris {
            if let Some(k) = t.iter().position(|&x| x == v) {
                let (a, b) = (t[(k + 1) % 3], t[(k + 2) % 3]);
                if succ.insert(a, b).is_some() {
                    return None;
                }
            }
        }
        if succ.is_empty() {
            return None;
        }
        let start = *succ.keys().min().unwrap();
        let mut ring = vec![start];
        let mut cur = start;
        loop {
            match succ.get(&cur) {
                Some(&next) => {
                    if next == start {
                        break;
                    }
                    ring.push(next);
                    cur = next;
                    if ring.len() > succ.len() {
                        return None;
                    }
                }
                None => return None,
            }
        }
        (ring.len() == succ.len()).then_some(ring)
    }

    pub fn corner_valences(&self) -> Option<[usize; 3]> {
        let [a, b, c] = self.container_corners();
        Some([
            self.ring_of(a)?.len(),
            self.ring_of(b)?.len(),
            self.ring_of(c)?.len(),
        ])
    }

    /// The 12 control points of a regular, feature-free container patch in
    /// the canonical basis order; `None` if any corner is irregular.
    pub fn regular_stencil(&self) -> Option<[Vec3; 12]> {
        let [a, b, c] = self.container_corners();
        let ra = self.rotated_ring(a, b)?;
        let rb = self.rotated_ring(b, c)?;
        let rc = self.rotated_ring(c, a)?;
        if ra.len() != 6 || rb.len() != 6 || rc.len() != 6 {
            return None;
        }
        debug_assert_eq!(ra[1], c);
        debug_assert_eq!(rb[1], a);
        debug_assert_eq!(rc[1], b);
        debug_assert_eq!(rb[2], ra[5]);
        debug_assert_eq!(rc[2], rb[5]);
        debug_assert_eq!(rc[5], ra[2]);
        let ids = [
            a, b, c, ra[3], ra[4], ra[5], ra[2], rb[4], rb[5], rb[3], rc[3], rc[4],
        ];
        let mut out = [Vec3::ZERO; 12];
        for (k, &id) in ids.iter().enumerate() {
            out[k] = self.verts[id as usize];
        }
        Some(out)
    }

    fn rotated_ring(&self, v: u32, start: u32) -> Option<Vec<u32>> {
        let ring = self.ring_of(v)?;
        let pos = ring.iter().position(|&x| x == start)?;
        Some(ring[pos..].iter().chain(ring[..pos].iter()).copied().collect())
    }

    /// Limit position of a container corner (used at the irregular-corner
    /// fallback and for exact corner hits).
    pub fn corner_limit_position(&self, slot: usize) -> Option<Vec3> {
        let v = self.container_corners()[slot];
        let crease_nbrs: Vec<u32> = self
            .crease
            .iter()
            .filter_map(|&(x, y)| {
                if x == v {
                    Some(y)
                } else if y == v {
                    Some(x)
                } else {
                    None
                }
            })
            .collect();
        if self.points.contains(&v) {
            return Some(self.verts[v as usize]);
        }
        if crease_nbrs.len() == 2 {
            return Some(crate::subdivision::limit_position_curve(
                self.verts[crease_nbrs[0] as usize],
                self.verts[v as usize],
                self.verts[crease_nbrs[1] as usize],
            ));
        }
        let ring = self.ring_of(v)?;
        let pts: Vec<Vec3> = ring.iter().map(|&w| self.verts[w as usize]).collect();
        crate::subdivision::limit_position_surface(self.verts[v as usize], &pts).ok()
    }

    /// One local refinement step followed by descent into the child of
    /// `bary`; the patch becomes the child's one-ring closure and `bary` is
    /// remapped. Returns the child slot taken.
    pub fn subdivide_and_descend(&mut self, bary: &mut [f64; 3]) -> usize {
        let corners = self.container_corners();
        let edge_tris = self.edge_tris();

        // fine vertex positions: container-corner updates
        let mut fverts: Vec<Vec3> = Vec::new();
        let mut fine_of_vertex: HashMap<u32, u32> = HashMap::new();
        let mut fine_points: HashSet<u32> = HashSet::new();
        for &v in &corners {
            if fine_of_vertex.contains_key(&v) {
                continue;
            }
            let crease_nbrs: Vec<u32> = {
                let mut n: Vec<u32> = self
                    .crease
                    .iter()
                    .filter_map(|&(x, y)| {
                        if x == v {
                            Some(y)
                        } else if y == v {
                            Some(x)
                        } else {
                            None
                        }
                    })
                    .collect();
                n.sort_unstable();
                n
            };
            let pos = if self.points.contains(&v) {
                fine_points.insert(fverts.len() as u32);
                self.verts[v as usize]
            } else if crease_nbrs.len() == 2 {
                (self.verts[crease_nbrs[0] as usize]
                    + self.verts[v as usize] * 6.0
                    + self.verts[crease_nbrs[1] as usize])
                    / 8.0
            } else {
                let ring = self
                    .ring_of(v)
                    .expect("container corner ring is complete by construction");
                let k = ring.len();
                let omega = crate::subdivision::loop_omega(k);
                let sum = ring
                    .iter()
                    .fold(Vec3::ZERO, |acc, &w| acc + self.verts[w as usize]);
                self.verts[v as usize] * (1.0 - k as f64 * omega) + sum * omega
            };
            fine_of_vertex.insert(v, fverts.len() as u32);
            fverts.push(pos);
        }

        // midpoints of corner-incident edgesature
        let mut edges: Vec<(u32, u32)> = edge_tris
            .keys()
            .filter(|&&(x, y)| corners.contains(&x) || corners.contains(&y))
            .copied()
            .collect();
        edges.sort_unstable();
        let mut fine_of_edge: HashMap<(u32, u32), u32> = HashMap::new();
        let mut fine_crease: HashSet<(u32, u32)> = HashSet::new();
        for &(u, v) in &edges {
            let pu = self.verts[u as usize];
            let pv = self.verts[v as usize];
            let pos = if self.crease.contains(&(u, v)) {
                (pu + pv) * 0.5
            } else {
                let inc = &edge_tris[&(u, v)];
                if inc.len() != 2 {
                    continue; // wing missing: midpoint not computable, not needed
                }
                let mut wings = Vec::with_capacity(2);
                for &t in inc {
                    let tv = self.tris[t as usize];
                    wings.push(tv.iter().copied().find(|&x| x != u && x != v).unwrap());
                }
                (pu + pv) * 0.375
                    + (self.verts[wings[0] as usize] + self.verts[wings[1] as usize]) * 0.125
            };
            let id = fverts.len() as u32;
            fine_of_edge.insert((u, v), id);
            fverts.push(pos);
            if self.crease.contains(&(u, v)) {
                for &w in &[u, v] {
                    if let Some(&fw) = fine_of_vertex.get(&w) {
                        fine_crease.insert(sorted_pair(fw, id));
                    }
                }
            }
        }

        // children triangles with all vertices available
        let mut ftris: Vec<[u32; 3]> = Vec::new();
        let mut container_children: [Option<u32>; 4] = [None; 4];
        for (ti, t) in self.tris.iter().enumerate() {
            let [v0, v1, v2] = *t;
            let m01 = fine_of_edge.get(&sorted_pair(v0, v1)).copied();
            let m12 = fine_of_edge.get(&sorted_pair(v1, v2)).copied();
            let m20 = fine_of_edge.get(&sorted_pair(v2, v0)).copied();
            let f0 = fine_of_vertex.get(&v0).copied();
            let f1 = fine_of_vertex.get(&v1).copied();
            let f2 = fine_of_vertex.get(&v2).copied();
            let children: [[Option<u32>; 3]; 4] = [
                [f0, m01, m20],
                [f1, m12, m01],
                [f2, m20, m12],
                [m01, m12, m20],
            ];
            for (slot, ch) in children.iter().enumerate() {
                if let [Some(x), Some(y), Some(z)] = ch {
                    let id = ftris.len() as u32;
                    ftris.push([*x, *y, *z]);
                    if ti == self.container {
                        container_children[slot] = Some(id);
                    }
                }
            }
        }

        let (child_slot, new_bary) = descend_triangle(*bary);
        *bary = new_bary;
        let child = container_children[child_slot]
            .expect("container children are always computable");

        // restrict to the child's one-ring closure
        let child_verts = ftris[child as usize];
        let keep: Vec<u32> = ftris
            .iter()
            .enumerate()
            .filter(|(_, t)| t.iter().any(|v| child_verts.contains(v)))
            .map(|(i, _)| i as u32)
            .collect();
        let mut remap: HashMap<u32, u32> = HashMap::new();
        let mut verts = Vec::new();
        let mut tris = Vec::new();
        let mut new_container = 0usize;
        for &ti in &keep {
            if ti == child {
                new_container = tris.len();
            }
            let t = ftris[ti as usize];
            let mut lt = [0u32; 3];
            for (k, &v) in t.iter().enumerate() {
                let lid = *remap.entry(v).or_insert_with(|| {
                    verts.push(fverts[v as usize]);
                    (verts.len() - 1) as u32
                });
                lt[k] = lid;
            }
            tris.push(lt);
        }
        let crease = fine_crease
            .iter()
            .filter_map(|&(a, b)| match (remap.get(&a), remap.get(&b)) {
                (Some(&x), Some(&y)) => Some(sorted_pair(x, y)),
                _ => None,
            })
            .collect();
        let points = fine_points
            .iter()
            .filter_map(|p| remap.get(p).copied())
            .collect();

        self.verts = verts;
        self.tris = tris;
        self.crease = crease;
        self.points = points;
        self.outer_on_feature = false;
        self.container = new_container;
        self.depth += 1;
        child_slot
    }
}

/// Local polyline around a curve container segment.
#[derive(Clone, Debug)]
pub struct LocalPolyline {
    pub pts: Vec<Vec3>,
    pub fixed: Vec<bool>,
    /// Container segment (pts[container], pts[container + 1]).
    pub container: usize,
}

impl LocalPolyline {
    /// Whether the container touches a pinned (feature-point) vertex or the
    /// data boundary.
    pub fn adjacent_to_feature(&self) -> bool {
        self.fixed[self.container] || self.fixed[self.container + 1]
    }

    /// Stencil [x1, x2, x3, x4] with the container as (x2, x3); requires a
    /// non-feature-adjacent container.
    pub fn stencil(&self) -> [Vec3; 4] {
        debug_assert!(!self.adjacent_to_feature());
        [
            self.pts[self.container - 1],
            self.pts[self.container],
            self.pts[self.container + 1],
            self.pts[self.container + 2],
        ]
    }

    /// One curve refinement around the container, then descent into the
    /// child containing `t` (remapped).
    pub fn subdivide_and_descend(&mut self, t: &mut f64) {
        let k = self.container;
        let n = self.pts.len();
        let update = |i: usize| -> Vec3 {
            if self.fixed[i] || i == 0 || i == n - 1 {
                // ends of the local window are either pinned or dropped below
                self.pts[i]
            } else {
                (self.pts[i - 1] + self.pts[i] * 6.0 + self.pts[i + 1]) / 8.0
            }
        };
        let mid = |i: usize| (self.pts[i] + self.pts[i + 1]) * 0.5;

        // fine points around the container: m(k-1), p'(k), m(k), p'(k+1), m(k+1)
        let mut pts = Vec::with_capacity(5);
        let mut fixed = Vec::with_capacity(5);
        let mut container = 0usize;
        if k > 0 {
            pts.push(mid(k - 1));
            fixed.push(false);
        }
        let base = pts.len();
        pts.push(update(k));
        fixed.push(self.fixed[k]);
        pts.push(mid(k));
        fixed.push(false);
        pts.push(update(k + 1));
        fixed.push(self.fixed[k + 1]);
        if k + 2 < n {
            pts.push(mid(k + 1));
            fixed.push(false);
        }
        if *t < 0.5 {
            *t *= 2.0;
            container += base;
        } else {
            *t = 2.0 * *t - 1.0;
            container += base + 1;
        }
        self.pts = pts;
        self.fixed = fixed;
        self.container = container;
    }

    /// Evaluates the limit curve at parameter `t` on the container.
    pub fn eval(&self, t: f64) -> Vec3 {
        basis::eval_curve_segment(&self.stencil(), t)
    }
}
