//! Jacobian-based shape quality of high-order elements.
//!
//! The pointwise distortion of the map from the ideal (linear input) element
//! is eta = ||J||_F^2 / (d * det(J)^(2/d)); an element's quality is the
//! reciprocal of the weighted L2 aggregate of eta over a degree-2q
//! quadrature, with non-positive Jacobians collapsing the quality to 0.
//! Quality 1 holds exactly when the element is a similarity image of its
//! linear counterpart.

use serde::Serialize;

use crate::geometry::Vec3;
use crate::lagrange::{TetLagrange, TriLagrange};
use crate::quadrature;

/// Per-stage quality summary.
#[derive(Clone, Debug, Serialize)]
pub struct QualityReport {
    pub stage: String,
    pub min_quality: f64,
    pub inverted: usize,
    pub per_element: Vec<f64>,
}

impl QualityReport {
    pub fn from_elements(stage: &str, per_element: Vec<f64>) -> QualityReport {
        let inverted = per_element.iter().filter(|&&q| q <= 0.0).count();
        let min_quality = per_element.iter().fold(f64::INFINITY, |m, &q| m.min(q));
        QualityReport {
            stage: stage.to_string(),
            min_quality: if per_element.is_empty() {
                1.0
            } else {
                min_quality
            },
            inverted,
            per_element,
        }
    }
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn inv3(m: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let d = det3(m);
    if d.abs() < f64::MIN_POSITIVE {
        return None;
    }
    let inv = [
        [
            (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / d,
            (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / d,
            (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / d,
        ],
        [
            (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / d,
            (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / d,
            (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / d,
        ],
        [
            (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / d,
            (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / d,
            (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / d,
        ],
    ];
    Some(inv)
}

fn mat3_mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

/// Precomputed shape-function gradients at the quadrature points of one
/// reference node set.
pub struct TetQualityKernel {
    pub grads: Vec<Vec<(f64, f64, f64)>>,
    pub weights: Vec<f64>,
}

impl TetQualityKernel {
    pub fn new(basis: &TetLagrange, q: usize) -> TetQualityKernel {
        let (pts, weights) = quadrature::tet_rule(2 * q);
        let grads = pts.iter().map(|&p| basis.eval_grad(p)).collect();
        TetQualityKernel { grads, weights }
    }

    /// Quality of one element against its linear corners.
    pub fn quality(&self, nodes: &[Vec3], corners: [Vec3; 4]) -> f64 {
        // constant Jacobian of the ideal element in (r, s, t)
        let jl = [
            [
                (corners[1].x - corners[0].x) / 2.0,
                (corners[2].x - corners[0].x) / 2.0,
                (corners[3].x - corners[0].x) / 2.0,
            ],
            [
                (corners[1].y - corners[0].y) / 2.0,
                (corners[2].y - corners[0].y) / 2.0,
                (corners[3].y - corners[0].y) / 2.0,
            ],
            [
                (corners[1].z - corners[0].z) / 2.0,
                (corners[2].z - corners[0].z) / 2.0,
                (corners[3].z - corners[0].z) / 2.0,
            ],
        ];
        let Some(jl_inv) = inv3(&jl) else {
            return 0.0;
        };
        let mut num = 0.0;
        let mut den = 0.0;
        for (grads, &w) in self.grads.iter().zip(&self.weights) {
            let mut j = [[0.0; 3]; 3];
            for (p, g) in nodes.iter().zip(grads) {
                j[0][0] += p.x * g.0;
                j[0][1] += p.x * g.1;
                j[0][2] += p.x * g.2;
                j[1][0] += p.y * g.0;
                j[1][1] += p.y * g.1;
                j[1][2] += p.y * g.2;
                j[2][0] += p.z * g.0;
                j[2][1] += p.z * g.1;
                j[2][2] += p.z * g.2;
            }
            let rel = mat3_mul(&j, &jl_inv);
            let det = det3(&rel);
            if det <= 0.0 {
                return 0.0;
            }
            let fro2: f64 = rel.iter().flatten().map(|x| x * x).sum();
            let eta = fro2 / (3.0 * det.powf(2.0 / 3.0));
            num += w * eta * eta;
            den += w;
        }
        let eta_bar = (num / den).sqrt();
        (1.0 / eta_bar).min(1.0)
    }
}

/// Same for surface triangles (3x2 Jacobians; inversion is detected by the
/// normal flipping against the linear element's normal).
pub struct TriQualityKernel {
    grads: Vec<Vec<(f64, f64)>>,
    weights: Vec<f64>,
}

impl TriQualityKernel {
    pub fn new(basis: &TriLagrange, q: usize) -> TriQualityKernel {
        let (pts, weights) = quadrature::triangle_rule(2 * q);
        let grads = pts.iter().map(|&p| basis.eval_grad(p)).collect();
        TriQualityKernel { grads, weights }
    }

    pub fn quality(&self, nodes: &[Vec3], corners: [Vec3; 3]) -> f64 {
        let e1 = (corners[1] - corners[0]) / 2.0;
        let e2 = (corners[2] - corners[0]) / 2.0;
        let n_lin = e1.cross(e2);
        // 2x2 metric of the ideal element
        let g = [[e1.dot(e1), e1.dot(e2)], [e2.dot(e1), e2.dot(e2)]];
        let gdet = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        if gdet <= 0.0 {
            return 0.0;
        }
        let ginv = [
            [g[1][1] / gdet, -g[0][1] / gdet],
            [-g[1][0] / gdet, g[0][0] / gdet],
        ];
        let mut num = 0.0;
        let mut den = 0.0;
        for (grads, &w) in self.grads.iter().zip(&self.weights) {
            let mut tr = Vec3::ZERO;
            let mut ts = Vec3::ZERO;
            for (p, g) in nodes.iter().zip(grads) {
                tr += *p * g.0;
                ts += *p * g.1;
            }
            if tr.cross(ts).dot(n_lin) <= 0.0 {
                return 0.0;
            }
            // first fundamental form of the element against the ideal metric
            let a = [[tr.dot(tr), tr.dot(ts)], [ts.dot(tr), ts.dot(ts)]];
            // M = A * G^-1; eta = tr(M) / (2 sqrt(det M))
            let m = [
                [
                    a[0][0] * ginv[0][0] + a[0][1] * ginv[1][0],
                    a[0][0] * ginv[0][1] + a[0][1] * ginv[1][1],
                ],
                [
                    a[1][0] * ginv[0][0] + a[1][1] * ginv[1][0],
                    a[1][0] * ginv[0][1] + a[1][1] * ginv[1][1],
                ],
            ];
            let mdet = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            if mdet <= 0.0 {
                return 0.0;
            }
            let eta = (m[0][0] + m[1][1]) / (2.0 * mdet.sqrt());
            num += w * eta * eta;
            den += w;
        }
        let eta_bar = (num / den).sqrt();
        (1.0 / eta_bar).min(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::vec3;
    use crate::nodes;
    use approx::assert_relative_eq;

    #[test]
    fn straight_tet_has_quality_one() {
        let q = 3;
        let dist = nodes::tet_equispaced(q);
        let basis = TetLagrange::new(q, &dist.points);
        let kernel = TetQualityKernel::new(&basis, q);
        let corners = [
            vec3(0.0, 0.0, 0.0),
            vec3(2.0, 0.1, 0.0),
            vec3(0.4, 1.5, 0.0),
            vec3(0.2, 0.3, 1.8),
        ];
        let nodes: Vec<Vec3> = dist
            .points
            .iter()
            .map(|l| {
                corners[0] * l[0] + corners[1] * l[1] + corners[2] * l[2] + corners[3] * l[3]
            })
            .collect();
        let quality = kernel.quality(&nodes, corners);
        assert_relative_eq!(quality, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn inverted_tet_has_quality_zero() {
        let q = 2;
        let dist = nodes::tet_equispaced(q);
        let basis = TetLagrange::new(q, &dist.points);
        let kernel = TetQualityKernel::new(&basis, q);
        let corners = [
            vec3(0.0, 0.0, 0.0),
            vec3(1.0, 0.0, 0.0),
            vec3(0.0, 1.0, 0.0),
            vec3(0.0, 0.0, 1.0),
        ];
        let mut nodes: Vec<Vec3> = dist
            .points
            .iter()
            .map(|l| {
                corners[0] * l[0] + corners[1] * l[1] + corners[2] * l[2] + corners[3] * l[3]
            })
            .collect();
        // push the face-center node of the bottom through the opposite side
        let idx = dist
            .points
            .iter()
            .position(|l| l[3] == 0.0 && l[0] > 0.0 && l[1] > 0.0 && l[2] > 0.0)
            .unwrap_or(4);
        nodes[idx] += vec3(0.0, 0.0, 2.5);
        assert_eq!(kernel.quality(&nodes, corners), 0.0);
    }

    #[test]
    fn similarity_invariance() {
        // scaled and rotated straight elements keep quality 1
        let q = 2;
        let dist = nodes::tet_equispaced(q);
        let basis = TetLagrange::new(q, &dist.points);
        let kernel = TetQualityKernel::new(&basis, q);
        let corners = [
            vec3(0.0, 0.0, 0.0),
            vec3(1.0, 0.0, 0.0),
            vec3(0.0, 1.0, 0.0),
            vec3(0.0, 0.0, 1.0),
        ];
        let rot = |p: Vec3| {
            vec3(
                2.0 * (0.8 * p.x - 0.6 * p.y),
                2.0 * (0.6 * p.x + 0.8 * p.y),
                2.0 * p.z + 1.0,
            )
        };
        let moved = corners.map(rot);
        let nodes: Vec<Vec3> = dist
            .points
            .iter()
            .map(|l| moved[0] * l[0] + moved[1] * l[1] + moved[2] * l[2] + moved[3] * l[3])
            .collect();
        // quality of the mapped element against the ORIGINAL linear corners:
        // similarity image, so still 1
        assert_relative_eq!(kernel.quality(&nodes, corners), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn straight_triangle_quality_one() {
        let q = 4;
        let dist = nodes::make_distribution(q, nodes::NodeKind::WarpBlend).unwrap();
        let basis = TriLagrange::new(q, &dist.points);
        let kernel = TriQualityKernel::new(&basis, q);
        let corners = [
            vec3(0.0, 0.0, 1.0),
            vec3(1.5, 0.2, 1.0),
            vec3(0.3, 1.1, 1.0),
        ];
        let nodes: Vec<Vec3> = dist
            .points
            .iter()
            .map(|l| corners[0] * l[0] + corners[1] * l[1] + corners[2] * l[2])
            .collect();
        assert_relative_eq!(kernel.quality(&nodes, corners), 1.0, epsilon = 1e-12);
    }
}
