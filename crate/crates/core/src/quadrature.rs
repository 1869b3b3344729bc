//! Quadrature on simplices via collapsed-coordinate product rules.

use crate::basis1d::{gauss_jacobi, gauss_legendre};

/// Rule exact for polynomials of total degree `deg` on the reference
/// triangle, returned as barycentric points and weights summing to the
/// reference area 1/2.
pub fn triangle_rule(deg: usize) -> (Vec<[f64; 3]>, Vec<f64>) {
    let n = deg / 2 + 1;
    let (xa, wa) = gauss_legendre(n);
    let (xb, wb) = gauss_jacobi(1, 0, n);
    let mut pts = Vec::with_capacity(n * n);
    let mut wts = Vec::with_capacity(n * n);
    for (&b, &wjb) in xb.iter().zip(&wb) {
        let l2 = (1.0 + b) / 2.0;
        for (&a, &wga) in xa.iter().zip(&wa) {
            let l1 = (1.0 + a) / 2.0 * (1.0 - l2);
            let l0 = 1.0 - l1 - l2;
            pts.push([l0, l1, l2]);
            wts.push(wga * wjb / 8.0);
        }
    }
    (pts, wts)
}

/// Rule exact for polynomials of total degree `deg` on the reference
/// tetrahedron, weights summing to the reference volume 1/6.
pub fn tet_rule(deg: usize) -> (Vec<[f64; 4]>, Vec<f64>) {
    let n = deg / 2 + 1;
    let (xa, wa) = gauss_legendre(n);
    let (xb, wb) = gauss_jacobi(1, 0, n);
    let (xc, wc) = gauss_jacobi(2, 0, n);
    let mut pts = Vec::with_capacity(n * n * n);
    let mut wts = Vec::with_capacity(n * n * n);
    for (&c, &wjc) in xc.iter().zip(&wc) {
        let l3 = (1.0 + c) / 2.0;
        for (&b, &wjb) in xb.iter().zip(&wb) {
            let l2 = (1.0 + b) / 2.0 * (1.0 - l3);
            for (&a, &wga) in xa.iter().zip(&wa) {
                let l1 = (1.0 + a) / 2.0 * (1.0 - l2 - l3);
                let l0 = 1.0 - l1 - l2 - l3;
                pts.push([l0, l1, l2, l3]);
                wts.push(wga * wjb * wjc / 64.0);
            }
        }
    }
    (pts, wts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn triangle_rule_exactness() {
        let (pts, wts) = triangle_rule(5);
        assert_relative_eq!(wts.iter().sum::<f64>(), 0.5, epsilon = 1e-13);
        // integral of l1^2 l2^3 over the reference triangle: 2! 3! / (2+3+2)! * 2 * area...
        // use the Dirichlet formula: int l0^a l1^b l2^c dA = a! b! c! / (a+b+c+2)! * 2 * (1/2)
        let s: f64 = pts
            .iter()
            .zip(&wts)
            .map(|(p, w)| w * p[1] * p[1] * p[2] * p[2] * p[2])
            .sum();
        let exact = 2.0 * 6.0 / (1..=7).map(|k| k as f64).product::<f64>();
        assert_relative_eq!(s, exact, epsilon = 1e-14);
    }

    #[test]
    fn tet_rule_exactness() {
        let (pts, wts) = tet_rule(4);
        assert_relative_eq!(wts.iter().sum::<f64>(), 1.0 / 6.0, epsilon = 1e-13);
        // int l1 l2 l3 dV = 1!1!1! / (1+1+1+3)! * 6 * (1/6)
        let s: f64 = pts
            .iter()
            .zip(&wts)
            .map(|(p, w)| w * p[1] * p[2] * p[3])
            .sum();
        let exact = 1.0 / (1..=6).map(|k| k as f64).product::<f64>();
        assert_relative_eq!(s, exact, epsilon = 1e-15);
    }
}
