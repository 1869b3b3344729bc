//! Transfinite interpolation on edges, triangular faces, and tetrahedra.
//!
//! The hierarchy runs edges, then faces, then interiors: each level keeps the
//! lower-dimensional entities fixed and accommodates their curvature inward.
//! All formulas reproduce affine maps exactly.

use crate::basis1d::Lagrange1d;
use crate::geometry::Vec3;
use crate::lagrange::TriLagrange;

/// Degree-q restriction of an element map to one edge: node coordinates at
/// parameters in [0, 1] (endpoint nodes included).
pub struct EdgeRestriction<'a> {
    pub lagrange: &'a Lagrange1d,
    pub nodes: &'a [Vec3],
}

impl EdgeRestriction<'_> {
    pub fn eval(&self, f: f64) -> Vec3 {
        let vals = self.lagrange.eval(2.0 * f - 1.0);
        self.nodes
            .iter()
            .zip(vals)
            .fold(Vec3::ZERO, |acc, (&p, l)| acc + p * l)
    }
}

/// Degree-q restriction of an element map to one triangular face.
pub struct FaceRestriction<'a> {
    pub lagrange: &'a TriLagrange,
    pub nodes: &'a [Vec3],
}

impl FaceRestriction<'_> {
    pub fn eval(&self, bary: [f64; 3]) -> Vec3 {
        let vals = self.lagrange.eval(bary);
        self.nodes
            .iter()
            .zip(vals)
            .fold(Vec3::ZERO, |acc, (&p, l)| acc + p * l)
    }
}

/// Edge relocation: nodes placed on the straight segment between the (possibly
/// relocated) endpoints at the given parameters.
pub fn tfi_edge(endpoints: (Vec3, Vec3), params: &[f64]) -> Vec<Vec3> {
    params
        .iter()
        .map(|&f| endpoints.0 * (1.0 - f) + endpoints.1 * f)
        .collect()
}

/// Face relocation: the interior node at barycentric `l` follows the six
/// edge projections and the corner positions.
///
/// `corners` are the face's vertex positions; `edges[i]` is the restriction
/// to the edge opposite corner i, parameterized from its lower-local to its
/// higher-local corner, i.e. edge 0 runs from corner 1 to corner 2, edge 1
/// from corner 0 to corner 2, edge 2 from corner 0 to corner 1.
pub fn tfi_face(
    corners: [Vec3; 3],
    edges: [&EdgeRestriction; 3],
    interior: &[[f64; 3]],
) -> Vec<Vec3> {
    interior
        .iter()
        .map(|&l| {
            // projections onto edge f_i with the j-th barycentric component
            // recomputed from the others; expressed as the fraction toward
            // the edge's second corner in the parameterization above
            let e0 = |frac: f64| edges[0].eval(frac); // corner1 -> corner2
            let e1 = |frac: f64| edges[1].eval(frac); // corner0 -> corner2
            let e2 = |frac: f64| edges[2].eval(frac); // corner0 -> corner1
            let x12 = e0(l[2]); // (0, 1-l2, l2)
            let x13 = e0(1.0 - l[1]); // (0, l1, 1-l1)
            let x21 = e1(l[2]); // (1-l2, 0, l2)
            let x23 = e1(1.0 - l[0]); // (l0, 0, 1-l0)
            let x31 = e2(l[1]); // (1-l1, l1, 0)
            let x32 = e2(1.0 - l[0]); // (l0, 1-l0, 0)
            (x21 + x31 - corners[0]) * l[0]
                + (x12 + x32 - corners[1]) * l[1]
                + (x13 + x23 - corners[2]) * l[2]
        })
        .collect()
}

/// Tetrahedron relocation: the interior node at barycentric `l` combines the
/// face projections, edge projections, and vertices.
///
/// `faces[i]` is the restriction to the face opposite vertex i, evaluated in
/// the barycentric frame of the remaining vertices in ascending local order;
/// `edges[(i,k)]` the restriction to the edge between local vertices i < k,
/// parameterized from i to k.
pub struct TetTfiMaps<'a> {
    /// face_opposite[i]: map of the face not containing local vertex i,
    /// taking barycentrics over the other three vertices in ascending order.
    pub face_opposite: [&'a FaceRestriction<'a>; 4],
    /// edge[(i, k)] for i < k, parameterized from vertex i to vertex k.
    pub edge: std::collections::HashMap<(usize, usize), EdgeRestriction<'a>>,
}

pub fn tfi_tet(corners: [Vec3; 4], maps: &TetTfiMaps, interior: &[[f64; 4]]) -> Vec<Vec3> {
    let others = |i: usize| -> [usize; 3] {
        let mut o = [0usize; 3];
        let mut k = 0;
        for v in 0..4 {
            if v != i {
                o[k] = v;
                k += 1;
            }
        }
        o
    };
    interior
        .iter()
        .map(|&l| {
            let mut out = Vec3::ZERO;
            for i in 0..4 {
                let mut term = corners[i];
                // face projections: zero component j, recompute component i
                for j in 0..4 {
                    if j == i {
                        continue;
                    }
                    let mut lp = l;
                    lp[j] = 0.0;
                    lp[i] = 1.0 - (0..4).filter(|&m| m != i).map(|m| lp[m]).sum::<f64>();
                    // barycentric over the face opposite j (ascending corners)
                    let fc = others(j);
                    let fb = [lp[fc[0]], lp[fc[1]], lp[fc[2]]];
                    term += maps.face_opposite[j].eval(fb);
                }
                // edge projections: zero components j and k, recompute i
                let o = others(i);
                for a in 0..3 {
                    for b in (a + 1)..3 {
                        let (j, k) = (o[a], o[b]);
                        // remaining vertex pair: i and the one not in {j, k}
                        let m = o[3 - a - b];
                        let frac_m = l[m]; // weight of the non-i endpoint
                        let key = if i < m { (i, m) } else { (m, i) };
                        let edge = maps.edge.get(&key).expect("edge map present");
                        let frac = if i < m { frac_m } else { 1.0 - frac_m };
                        term = term - edge.eval(frac);
                    }
                }
                out += term * l[i];
            }
            out
        })
        .collect()
}
