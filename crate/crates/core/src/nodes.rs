//! Nodal distributions on the master triangle and tetrahedron.
//!
//! Equispaced nodes are the exact rational lattice. The warp-and-blend family
//! moves the equispaced lattice so that edge nodes land on Gauss-Lobatto
//! abscissae, using the published per-degree blend parameters for triangles
//! (degrees 1 through 10). Node order is the canonical lattice order of
//! [`crate::lattice`], so warped and equispaced sets index identically.

use crate::basis1d::{gauss_lobatto_nodes, Lagrange1d};
use crate::error::DistributionError;
use crate::lattice;

/// Node family on the master triangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Equispaced,
    WarpBlend,
}

impl std::fmt::Display for NodeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NodeKind::Equispaced => write!(f, "equispaced"),
            NodeKind::WarpBlend => write!(f, "warpblend"),
        }
    }
}

/// A degree-q interpolation node set on the master triangle, in barycentric
/// coordinates and canonical lattice order.
#[derive(Clone, Debug)]
pub struct NodalDistribution {
    pub degree: usize,
    pub kind: NodeKind,
    pub points: Vec<[f64; 3]>,
}

/// Optimized blend parameters for triangle warp-and-blend nodes, degree 1..=10.
const BLEND_ALPHA: [f64; 10] = [
    0.0, 0.0, 1.4152, 0.1001, 0.2751, 0.9800, 1.0999, 1.2832, 1.3648, 1.4773,
];

/// Builds the degree-`q` node set of the requested family.
pub fn make_distribution(q: usize, kind: NodeKind) -> Result<NodalDistribution, DistributionError> {
    if q < 1 {
        return Err(DistributionError::DegreeTooSmall(q));
    }
    let lattice_pts: Vec<[f64; 3]> = lattice::tri_multi_indices(q)
        .iter()
        .map(|m| {
            [
                m[0] as f64 / q as f64,
                m[1] as f64 / q as f64,
                m[2] as f64 / q as f64,
            ]
        })
        .collect();
    let points = match kind {
        NodeKind::Equispaced => lattice_pts,
        NodeKind::WarpBlend => {
            if q > 10 {
                return Err(DistributionError::UnsupportedWarpBlendDegree(q));
            }
            let warper = WarpBlend::new(q);
            lattice_pts.iter().map(|&l| warper.warp(l)).collect()
        }
    };
    Ok(NodalDistribution {
        degree: q,
        kind,
        points,
    })
}

struct WarpBlend {
    alpha: f64,
    interp: Lagrange1d,
    shift: Vec<f64>, // Gauss-Lobatto minus equispaced, per 1D node
}

impl WarpBlend {
    fn new(q: usize) -> WarpBlend {
        let alpha = BLEND_ALPHA[q - 1];
        let equi: Vec<f64> = (0..=q).map(|k| -1.0 + 2.0 * k as f64 / q as f64).collect();
        let lgl = gauss_lobatto_nodes(q);
        let shift: Vec<f64> = lgl.iter().zip(&equi).map(|(g, e)| g - e).collect();
        WarpBlend {
            alpha,
            interp: Lagrange1d::new(equi),
            shift,
        }
    }

    /// 1D warp: interpolates the node shifts from the equispaced lattice and
    /// removes the (1 - r^2) edge factor, which the 2D blend restores.
    fn warp_factor(&self, r: f64) -> f64 {
        let w: f64 = self
            .interp
            .eval(r)
            .iter()
            .zip(&self.shift)
            .map(|(l, s)| l * s)
            .sum();
        let sf = 1.0 - r * r;
        if sf.abs() < 1e-10 {
            0.0
        } else {
            w / sf
        }
    }

    fn warp(&self, l: [f64; 3]) -> [f64; 3] {
        // equilateral coordinates
        let mut x = -l[1] + l[2];
        let mut y = (-l[1] - l[2] + 2.0 * l[0]) / 3.0_f64.sqrt();
        let dirs = [
            (1.0, 0.0),
            ((2.0 * std::f64::consts::PI / 3.0).cos(), (2.0 * std::f64::consts::PI / 3.0).sin()),
            ((4.0 * std::f64::consts::PI / 3.0).cos(), (4.0 * std::f64::consts::PI / 3.0).sin()),
        ];
        let args = [l[2] - l[1], l[0] - l[2], l[1] - l[0]];
        let blends = [
            4.0 * l[1] * l[2] * (1.0 + (self.alpha * l[0]).powi(2)),
            4.0 * l[0] * l[2] * (1.0 + (self.alpha * l[1]).powi(2)),
            4.0 * l[0] * l[1] * (1.0 + (self.alpha * l[2]).powi(2)),
        ];
        for k in 0..3 {
            let w = blends[k] * self.warp_factor(args[k]);
            x += w * dirs[k].0;
            y += w * dirs[k].1;
        }
        // back to barycentric, snapping lattice zeros exactly
        let l0 = (3.0_f64.sqrt() * y + 1.0) / 3.0;
        let l1 = (-3.0 * x - 3.0_f64.sqrt() * y + 2.0) / 6.0;
        let l2 = (3.0 * x - 3.0_f64.sqrt() * y + 2.0) / 6.0;
        let mut out = [l0, l1, l2];
        for c in &mut out {
            if c.abs() < 1e-13 {
                *c = 0.0;
            }
        }
        let sum: f64 = out.iter().sum();
        [out[0] / sum, out[1] / sum, out[2] / sum]
    }
}

/// Equispaced lattice nodes on the master tetrahedron, canonical order.
#[derive(Clone, Debug)]
pub struct TetDistribution {
    pub degree: usize,
    pub points: Vec<[f64; 4]>,
}

pub fn tet_equispaced(q: usize) -> TetDistribution {
    assert!(q >= 1);
    let points = lattice::tet_multi_indices(q)
        .iter()
        .map(|m| {
            [
                m[0] as f64 / q as f64,
                m[1] as f64 / q as f64,
                m[2] as f64 / q as f64,
                m[3] as f64 / q as f64,
            ]
        })
        .collect();
    TetDistribution { degree: q, points }
}

/// Writes a distribution as a plain-text table (one barycentric triple per
/// line) for auditing.
pub fn distribution_table(dist: &NodalDistribution) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "# degree {} kind {} nodes {}\n",
        dist.degree,
        dist.kind,
        dist.points.len()
    ));
    for p in &dist.points {
        out.push_str(&format!("{:.17e} {:.17e} {:.17e}\n", p[0], p[1], p[2]));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{tri_entity, TriEntity};
    use approx::assert_relative_eq;

    #[test]
    fn degree_one_is_vertices() {
        for kind in [NodeKind::Equispaced, NodeKind::WarpBlend] {
            let d = make_distribution(1, kind).unwrap();
            assert_eq!(d.points.len(), 3);
            assert_eq!(d.points[0], [1.0, 0.0, 0.0]);
            assert_eq!(d.points[1], [0.0, 1.0, 0.0]);
            assert_eq!(d.points[2], [0.0, 0.0, 1.0]);
        }
    }

    #[test]
    fn equispaced_q2_has_midpoints() {
        let d = make_distribution(2, NodeKind::Equispaced).unwrap();
        assert_eq!(d.points.len(), 6);
        assert_eq!(d.points[3], [0.5, 0.5, 0.0]);
    }

    #[test]
    fn warpblend_q3_edges_at_lobatto() {
        let d = make_distribution(3, NodeKind::WarpBlend).unwrap();
        let multis = lattice::tri_multi_indices(3);
        let gl = gauss_lobatto_nodes(3);
        for (m, p) in multis.iter().zip(&d.points) {
            if let TriEntity::Edge { edge, t } = tri_entity(3, *m) {
                let [a, b] = lattice::TRI_EDGES[edge];
                // fraction along the edge from corner a to corner b
                let frac = p[b] / (p[a] + p[b]);
                let expect = (gl[t] + 1.0) / 2.0;
                assert_relative_eq!(frac, expect, epsilon = 1e-12);
                // edge nodes stay exactly on the edge
                let off = 3 - a - b;
                assert_eq!(p[off], 0.0);
            }
        }
    }

    #[test]
    fn warpblend_symmetric_under_permutation() {
        let d = make_distribution(5, NodeKind::WarpBlend).unwrap();
        // the set must be closed under barycentric permutation
        let mut perms: Vec<[u64; 3]> = Vec::new();
        let quant = |p: &[f64; 3]| {
            [
                (p[0] * 1e12).round() as u64,
                (p[1] * 1e12).round() as u64,
                (p[2] * 1e12).round() as u64,
            ]
        };
        for p in &d.points {
            perms.push(quant(p));
        }
        perms.sort_unstable();
        for p in &d.points {
            for perm in [[1usize, 2, 0], [2, 0, 1], [0, 2, 1], [1, 0, 2], [2, 1, 0]] {
                let q = quant(&[p[perm[0]], p[perm[1]], p[perm[2]]]);
                assert!(perms.binary_search(&q).is_ok(), "missing permutation of {p:?}");
            }
        }
    }

    #[test]
    fn warpblend_unsupported_degree() {
        assert!(matches!(
            make_distribution(11, NodeKind::WarpBlend),
            Err(DistributionError::UnsupportedWarpBlendDegree(11))
        ));
        assert!(make_distribution(11, NodeKind::Equispaced).is_ok());
    }

    #[test]
    fn tet_equispaced_counts() {
        let d = tet_equispaced(3);
        assert_eq!(d.points.len(), 20);
        assert_eq!(d.points[0], [1.0, 0.0, 0.0, 0.0]);
    }
}
