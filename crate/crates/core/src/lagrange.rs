//! Orthonormal simplex bases (collapsed-coordinate Jacobi construction) and
//! Lagrange shape functions over arbitrary nodal sets.
//!
//! Triangles use barycentric coordinates (l0, l1, l2) mapped to the bi-unit
//! triangle with r = 2 l1 - 1, s = 2 l2 - 1; tetrahedra analogously with
//! t = 2 l3 - 1.

use nalgebra::{DMatrix, DVector};

use crate::basis1d::{grad_jacobi_p, jacobi_p};

/// Modal index pairs (i, j) with i + j <= q, in a fixed order.
pub fn tri_modes(q: usize) -> Vec<(usize, usize)> {
    let mut m = Vec::new();
    for i in 0..=q {
        for j in 0..=(q - i) {
            m.push((i, j));
        }
    }
    m
}

fn tet_modes(q: usize) -> Vec<(usize, usize, usize)> {
    let mut m = Vec::new();
    for i in 0..=q {
        for j in 0..=(q - i) {
            for k in 0..=(q - i - j) {
                m.push((i, j, k));
            }
        }
    }
    m
}

/// Orthonormal basis value on the bi-unit triangle.
pub fn simplex2d(i: usize, j: usize, r: f64, s: f64) -> f64 {
    let a = if (1.0 - s).abs() > 1e-14 {
        2.0 * (1.0 + r) / (1.0 - s) - 1.0
    } else {
        -1.0
    };
    let b = s;
    2.0_f64.sqrt() * jacobi_p(0, 0, i, a) * jacobi_p(2 * i + 1, 0, j, b) * (1.0 - b).powi(i as i32)
}

/// Gradient (d/dr, d/ds) of [`simplex2d`].
pub fn grad_simplex2d(i: usize, j: usize, r: f64, s: f64) -> (f64, f64) {
    let a = if (1.0 - s).abs() > 1e-14 {
        2.0 * (1.0 + r) / (1.0 - s) - 1.0
    } else {
        -1.0
    };
    let b = s;
    let fa = jacobi_p(0, 0, i, a);
    let dfa = grad_jacobi_p(0, 0, i, a);
    let gb = jacobi_p(2 * i + 1, 0, j, b);
    let dgb = grad_jacobi_p(2 * i + 1, 0, j, b);
    let half_1mb = 0.5 * (1.0 - b);

    let mut dmodedr = dfa * gb;
    if i >= 1 {
        dmodedr *= half_1mb.powi(i as i32 - 1);
    }
    let mut dmodeds = dfa * (gb * 0.5 * (1.0 + a));
    if i >= 1 {
        dmodeds *= half_1mb.powi(i as i32 - 1);
    }
    let mut tmp = dgb * half_1mb.powi(i as i32);
    if i >= 1 {
        tmp -= 0.5 * i as f64 * gb * half_1mb.powi(i as i32 - 1);
    }
    dmodeds += fa * tmp;
    let norm = 2.0_f64.powf(i as f64 + 0.5);
    (dmodedr * norm, dmodeds * norm)
}

/// Orthonormal basis value on the bi-unit tetrahedron.
pub fn simplex3d(i: usize, j: usize, k: usize, r: f64, s: f64, t: f64) -> f64 {
    let a = if (s + t).abs() > 1e-14 {
        -2.0 * (1.0 + r) / (s + t) - 1.0
    } else {
        -1.0
    };
    let b = if (1.0 - t).abs() > 1e-14 {
        2.0 * (1.0 + s) / (1.0 - t) - 1.0
    } else {
        -1.0
    };
    let c = t;
    2.0 * 2.0_f64.sqrt()
        * jacobi_p(0, 0, i, a)
        * jacobi_p(2 * i + 1, 0, j, b)
        * (1.0 - b).powi(i as i32)
        * jacobi_p(2 * i + 2 * j + 2, 0, k, c)
        * (1.0 - c).powi((i + j) as i32)
}

/// Gradient (d/dr, d/ds, d/dt) of [`simplex3d`].
pub fn grad_simplex3d(i: usize, j: usize, k: usize, r: f64, s: f64, t: f64) -> (f64, f64, f64) {
    let a = if (s + t).abs() > 1e-14 {
        -2.0 * (1.0 + r) / (s + t) - 1.0
    } else {
        -1.0
    };
    let b = if (1.0 - t).abs() > 1e-14 {
        2.0 * (1.0 + s) / (1.0 - t) - 1.0
    } else {
        -1.0
    };
    let c = t;
    let fa = jacobi_p(0, 0, i, a);
    let dfa = grad_jacobi_p(0, 0, i, a);
    let gb = jacobi_p(2 * i + 1, 0, j, b);
    let dgb = grad_jacobi_p(2 * i + 1, 0, j, b);
    let hc = jacobi_p(2 * i + 2 * j + 2, 0, k, c);
    let dhc = grad_jacobi_p(2 * i + 2 * j + 2, 0, k, c);

    // following the standard collapsed-coordinate chain rule
    let mut dmodedr = dfa * (gb * hc);
    if i >= 1 {
        dmodedr *= (0.5 * (1.0 - b)).powi(i as i32 - 1);
    }
    if i + j >= 1 {
        dmodedr *= (0.5 * (1.0 - c)).powi((i + j) as i32 - 1);
    }

    let mut dmodeds = 0.5 * (1.0 + a) * dmodedr;
    let mut tmp = dgb * (0.5 * (1.0 - b)).powi(i as i32);
    if i >= 1 {
        tmp += -0.5 * i as f64 * gb * (0.5 * (1.0 - b)).powi(i as i32 - 1);
    }
    if i + j >= 1 {
        tmp *= (0.5 * (1.0 - c)).powi((i + j) as i32 - 1);
    }
    tmp = fa * (tmp * hc);
    dmodeds += tmp;

    let mut dmodedt = 0.5 * (1.0 + a) * dmodedr + 0.5 * (1.0 + b) * tmp;
    let mut tmp2 = dhc * (0.5 * (1.0 - c)).powi((i + j) as i32);
    if i + j >= 1 {
        tmp2 -= 0.5 * (i + j) as f64 * hc * (0.5 * (1.0 - c)).powi((i + j) as i32 - 1);
    }
    tmp2 = fa * (gb * tmp2);
    tmp2 *= (0.5 * (1.0 - b)).powi(i as i32);
    dmodedt += tmp2;

    let norm = 2.0_f64.powf(2.0 * i as f64 + j as f64 + 1.5);
    (dmodedr * norm, dmodeds * norm, dmodedt * norm)
}

/// Lagrange basis over a triangle node set given in barycentric coordinates.
pub struct TriLagrange {
    q: usize,
    modes: Vec<(usize, usize)>,
    vt_lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    /// Reciprocal condition estimate of the Vandermonde (from LU diagonal).
    pub rcond_estimate: f64,
}

pub fn bary_to_rs(l: [f64; 3]) -> (f64, f64) {
    (2.0 * l[1] - 1.0, 2.0 * l[2] - 1.0)
}

impl TriLagrange {
    pub fn new(q: usize, nodes: &[[f64; 3]]) -> TriLagrange {
        let modes = tri_modes(q);
        let n = modes.len();
        assert_eq!(nodes.len(), n, "node count must match the basis dimension");
        let mut v = DMatrix::zeros(n, n);
        for (p, &l) in nodes.iter().enumerate() {
            let (r, s) = bary_to_rs(l);
            for (m, &(i, j)) in modes.iter().enumerate() {
                v[(p, m)] = simplex2d(i, j, r, s);
            }
        }
        let mut dmin = f64::INFINITY;
        let mut dmax = 0.0_f64;
        let lu = v.transpose().lu();
        for d in 0..n {
            let u = lu.u()[(d, d)].abs();
            dmin = dmin.min(u);
            dmax = dmax.max(u);
        }
        TriLagrange {
            q,
            modes,
            vt_lu: lu,
            rcond_estimate: if dmax > 0.0 { dmin / dmax } else { 0.0 },
        }
    }

    pub fn degree(&self) -> usize {
        self.q
    }

    pub fn n_nodes(&self) -> usize {
        self.modes.len()
    }

    /// Shape-function values at a barycentric point.
    pub fn eval(&self, l: [f64; 3]) -> Vec<f64> {
        let (r, s) = bary_to_rs(l);
        let psi = DVector::from_iterator(
            self.modes.len(),
            self.modes.iter().map(|&(i, j)| simplex2d(i, j, r, s)),
        );
        self.vt_lu
            .solve(&psi)
            .expect("triangle Vandermonde is invertible")
            .as_slice()
            .to_vec()
    }

    /// Shape-function derivatives (d/dr, d/ds) at a barycentric point.
    pub fn eval_grad(&self, l: [f64; 3]) -> Vec<(f64, f64)> {
        let (r, s) = bary_to_rs(l);
        let n = self.modes.len();
        let mut dr = DVector::zeros(n);
        let mut ds = DVector::zeros(n);
        for (m, &(i, j)) in self.modes.iter().enumerate() {
            let (gr, gs) = grad_simplex2d(i, j, r, s);
            dr[m] = gr;
            ds[m] = gs;
        }
        let lr = self.vt_lu.solve(&dr).expect("invertible");
        let ls = self.vt_lu.solve(&ds).expect("invertible");
        (0..n).map(|p| (lr[p], ls[p])).collect()
    }
}

/// Lagrange basis over a tetrahedron node set in barycentric coordinates.
pub struct TetLagrange {
    q: usize,
    modes: Vec<(usize, usize, usize)>,
    vt_lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

pub fn bary_to_rst(l: [f64; 4]) -> (f64, f64, f64) {
    (2.0 * l[1] - 1.0, 2.0 * l[2] - 1.0, 2.0 * l[3] - 1.0)
}

impl TetLagrange {
    pub fn new(q: usize, nodes: &[[f64; 4]]) -> TetLagrange {
        let modes = tet_modes(q);
        let n = modes.len();
        assert_eq!(nodes.len(), n, "node count must match the basis dimension");
        let mut v = DMatrix::zeros(n, n);
        for (p, &l) in nodes.iter().enumerate() {
            let (r, s, t) = bary_to_rst(l);
            for (m, &(i, j, k)) in modes.iter().enumerate() {
                v[(p, m)] = simplex3d(i, j, k, r, s, t);
            }
        }
        TetLagrange {
            q,
            modes,
            vt_lu: v.transpose().lu(),
        }
    }

    pub fn degree(&self) -> usize {
        self.q
    }

    pub fn eval(&self, l: [f64; 4]) -> Vec<f64> {
        let (r, s, t) = bary_to_rst(l);
        let psi = DVector::from_iterator(
            self.modes.len(),
            self.modes.iter().map(|&(i, j, k)| simplex3d(i, j, k, r, s, t)),
        );
        self.vt_lu
            .solve(&psi)
            .expect("tetrahedron Vandermonde is invertible")
            .as_slice()
            .to_vec()
    }

    /// Shape-function derivatives (d/dr, d/ds, d/dt).
    pub fn eval_grad(&self, l: [f64; 4]) -> Vec<(f64, f64, f64)> {
        let (r, s, t) = bary_to_rst(l);
        let n = self.modes.len();
        let mut dr = DVector::zeros(n);
        let mut ds = DVector::zeros(n);
        let mut dt = DVector::zeros(n);
        for (m, &(i, j, k)) in self.modes.iter().enumerate() {
            let (gr, gs, gt) = grad_simplex3d(i, j, k, r, s, t);
            dr[m] = gr;
            ds[m] = gs;
            dt[m] = gt;
        }
        let lr = self.vt_lu.solve(&dr).expect("invertible");
        let ls = self.vt_lu.solve(&ds).expect("invertible");
        let lt = self.vt_lu.solve(&dt).expect("invertible");
        (0..n).map(|p| (lr[p], ls[p], lt[p])).collect()
    }
}
