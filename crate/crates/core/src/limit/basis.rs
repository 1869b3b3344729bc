//! Polynomial bases of the limit model: the cubic segment basis of the curve
//! scheme and the quartic box-spline basis of a regular surface patch.
//!
//! The 12 box-spline basis polynomials are stored as exact rational
//! coefficients (common denominator 12) over the monomials v^i w^j, i+j <= 4,
//! where (u, v, w) = (1-v-w, v, w) are barycentric coordinates on the patch
//! triangle. The coefficients were generated by exact rational subdivision of
//! the regular lattice followed by an exact polynomial fit at 45 dyadic
//! points, and are re-verified against subdivision by the dyadic oracle test
//! suite.
//!
//! Control-point order: patch corners A, B, C first, then the ring closure in
//! the canonical layout documented at [`REGULAR_STENCIL_ORDER`].

use crate::geometry::Vec3;

/// Monomial exponents (i, j) for v^i w^j in coefficient order.
pub const MONOMIALS: [(u32, u32); 15] = [
    (0, 0),
    (1, 0),
    (0, 1),
    (2, 0),
    (1, 1),
    (0, 2),
    (3, 0),
    (2, 1),
    (1, 2),
    (0, 3),
    (4, 0),
    (3, 1),
    (2, 2),
    (1, 3),
    (0, 4),
];

/// Numerators of the 12 basis polynomials over denominator 12.
const BOX_SPLINE_NUM: [[i64; 15]; 12] = [
    [6, 0, 0, -12, -12, -12, 8, 12, 12, 8, -1, -2, 0, -2, -1],
    [1, 4, 2, 6, 6, 0, -4, -6, -12, -4, -1, -2, 0, 4, 2],
    [1, 2, 4, 0, 6, 6, -4, -12, -6, -4, 2, 4, 0, -2, -1],
    [1, -4, -2, 6, 6, 0, -4, -6, 0, 2, 1, 2, 0, -2, -1],
    [1, -2, -4, 0, 6, 6, 2, 0, -6, -4, -1, -2, 0, 2, 1],
    [1, 2, -2, 0, -6, 0, -4, 0, 6, 2, 2, 4, 0, -2, -1],
    [1, -2, 2, 0, -6, 0, 2, 6, 0, -4, -1, -2, 0, 4, 2],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 2, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 2, 6, 6, 2, -1, -2, 0, -2, -1],
    [0, 0, 0, 0, 0, 0, 2, 0, 0, 0, -1, -2, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 2, 1],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 2, 0, 0, 0, -2, -1],
];

/// How the 12 control points are gathered from the one-rings of a regular
/// patch triangle (a, b, c) with counterclockwise rings:
///
/// index 0..2:  a, b, c;
/// 3: ring(a) from b, position 3;   4: ring(a) position 4;  5: position 5;
/// 6: ring(a) position 2;
/// 7: ring(b) from c, position 4;   8: ring(b) position 5;  9: position 3;
/// 10: ring(c) from a, position 3;  11: ring(c) position 4.
pub const REGULAR_STENCIL_ORDER: &str =
    "[a, b, c, ringA[3], ringA[4], ringA[5], ringA[2], ringB[4], ringB[5], ringB[3], ringC[3], ringC[4]]";

/// Values of the 12 quartic box-spline basis functions at barycentric
/// (1-v-w, v, w).
pub fn box_spline_basis(v: f64, w: f64) -> [f64; 12] {
    let mut monos = [0.0; 15];
    for (k, &(i, j)) in MONOMIALS.iter().enumerate() {
        monos[k] = v.powi(i as i32) * w.powi(j as i32);
    }
    let mut out = [0.0; 12];
    for (s, row) in BOX_SPLINE_NUM.iter().enumerate() {
        let mut acc = 0.0;
        for (k, &c) in row.iter().enumerate() {
            acc += c as f64 * monos[k];
        }
        out[s] = acc / 12.0;
    }
    out
}

/// Gradients (d/dv, d/dw) of the 12 basis functions.
pub fn box_spline_basis_grad(v: f64, w: f64) -> [(f64, f64); 12] {
    let mut dv = [0.0; 15];
    let mut dw = [0.0; 15];
    for (k, &(i, j)) in MONOMIALS.iter().enumerate() {
        dv[k] = if i > 0 {
            i as f64 * v.powi(i as i32 - 1) * w.powi(j as i32)
        } else {
            0.0
        };
        dw[k] = if j > 0 {
            j as f64 * v.powi(i as i32) * w.powi(j as i32 - 1)
        } else {
            0.0
        };
    }
    let mut out = [(0.0, 0.0); 12];
    for (s, row) in BOX_SPLINE_NUM.iter().enumerate() {
        let (mut gv, mut gw) = (0.0, 0.0);
        for (k, &c) in row.iter().enumerate() {
            gv += c as f64 * dv[k];
            gw += c as f64 * dw[k];
        }
        out[s] = (gv / 12.0, gw / 12.0);
    }
    out
}

/// Point of a regular patch at barycentric (1-v-w, v, w) from its 12 control
/// points in canonical order.
pub fn eval_box_spline(points: &[Vec3; 12], v: f64, w: f64) -> Vec3 {
    let basis = box_spline_basis(v, w);
    let mut acc = Vec3::ZERO;
    for (p, b) in points.iter().zip(basis) {
        acc += *p * b;
    }
    acc
}

/// Tangents (d/dv, d/dw) of a regular patch.
pub fn eval_box_spline_grad(points: &[Vec3; 12], v: f64, w: f64) -> (Vec3, Vec3) {
    let basis = box_spline_basis_grad(v, w);
    let mut gv = Vec3::ZERO;
    let mut gw = Vec3::ZERO;
    for (p, (bv, bw)) in points.iter().zip(basis) {
        gv += *p * bv;
        gw += *p * bw;
    }
    (gv, gw)
}

/// Cubic B-spline segment basis: weights of the four stencil points
/// [x1, x2, x3, x4] for the segment (x2, x3) at parameter u in [0, 1].
pub fn curve_segment_basis(u: f64) -> [f64; 4] {
    let u2 = u * u;
    let u3 = u2 * u;
    let om = 1.0 - u;
    [
        om * om * om / 6.0,
        (3.0 * u3 - 6.0 * u2 + 4.0) / 6.0,
        (-3.0 * u3 + 3.0 * u2 + 3.0 * u + 1.0) / 6.0,
        u3 / 6.0,
    ]
}

/// Derivative of [`curve_segment_basis`] with respect to u.
pub fn curve_segment_basis_deriv(u: f64) -> [f64; 4] {
    let u2 = u * u;
    let om = 1.0 - u;
    [
        -om * om / 2.0,
        (9.0 * u2 - 12.0 * u) / 6.0,
        (-9.0 * u2 + 6.0 * u + 3.0) / 6.0,
        u2 / 2.0,
    ]
}

/// Value of the cubic limit-curve segment.
pub fn eval_curve_segment(points: &[Vec3; 4], u: f64) -> Vec3 {
    let b = curve_segment_basis(u);
    points[0] * b[0] + points[1] * b[1] + points[2] * b[2] + points[3] * b[3]
}
