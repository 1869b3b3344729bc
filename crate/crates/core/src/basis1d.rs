//! One-dimensional orthogonal polynomials, nodes, and quadrature.
//!
//! Jacobi polynomials are normalized to be orthonormal on [-1, 1] with
//! weight (1-x)^alpha (1+x)^beta.

use nalgebra::{DMatrix, SymmetricEigen};

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Orthonormal Jacobi polynomial P_n^(alpha,beta) at `x` (integer weights).
pub fn jacobi_p(alpha: usize, beta: usize, n: usize, x: f64) -> f64 {
    let (a, b) = (alpha as f64, beta as f64);
    let gamma0 = 2f64.powf(a + b + 1.0) / (a + b + 1.0) * factorial(alpha) * factorial(beta)
        / factorial(alpha + beta);
    let p0 = 1.0 / gamma0.sqrt();
    if n == 0 {
        return p0;
    }
    let gamma1 = (a + 1.0) * (b + 1.0) / (a + b + 3.0) * gamma0;
    let p1 = ((a + b + 2.0) * x / 2.0 + (a - b) / 2.0) / gamma1.sqrt();
    if n == 1 {
        return p1;
    }
    let mut aold = 2.0 / (2.0 + a + b) * ((a + 1.0) * (b + 1.0) / (a + b + 3.0)).sqrt();
    let (mut pm1, mut p) = (p0, p1);
    for i in 1..n {
        let i = i as f64;
        let h1 = 2.0 * i + a + b;
        let anew = 2.0 / (h1 + 2.0)
            * ((i + 1.0) * (i + 1.0 + a + b) * (i + 1.0 + a) * (i + 1.0 + b)
                / ((h1 + 1.0) * (h1 + 3.0)))
                .sqrt();
        let bnew = -(a * a - b * b) / (h1 * (h1 + 2.0));
        let pnew = ((x - bnew) * p - aold * pm1) / anew;
        pm1 = p;
        p = pnew;
        aold = anew;
    }
    p
}

/// Derivative of the orthonormal Jacobi polynomial.
pub fn grad_jacobi_p(alpha: usize, beta: usize, n: usize, x: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    (nf * (nf + alpha as f64 + beta as f64 + 1.0)).sqrt()
        * jacobi_p(alpha + 1, beta + 1, n - 1, x)
}

/// Gauss-Lobatto-Legendre nodes of degree `n` (n+1 nodes including the ends),
/// ascending.
pub fn gauss_lobatto_nodes(n: usize) -> Vec<f64> {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n + 1];
    nodes[0] = -1.0;
    nodes[n] = 1.0;
    // interior nodes: roots of Jacobi(1,1)_{n-1}, Newton from Chebyshev guesses
    for k in 1..n {
        let mut x = -(std::f64::consts::PI * k as f64 / n as f64).cos();
        for _ in 0..50 {
            let f = jacobi_p(1, 1, n - 1, x);
            let df = grad_jacobi_p(1, 1, n - 1, x);
            let dx = f / df;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[k] = x;
    }
    nodes
}

/// Gauss-Jacobi quadrature with `n` points for integer weights (alpha, beta),
/// via the symmetric eigenvalue problem of the recurrence matrix.
pub fn gauss_jacobi(alpha: usize, beta: usize, n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let (a, b) = (alpha as f64, beta as f64);
    let mu0 = 2f64.powf(a + b + 1.0) * factorial(alpha) * factorial(beta)
        / factorial(alpha + beta + 1);
    if n == 1 {
        return (vec![(b - a) / (a + b + 2.0)], vec![mu0]);
    }
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let fi = i as f64;
        let h1 = 2.0 * fi + a + b;
        let diag = if i == 0 && a + b == 0.0 {
            0.0
        } else {
            -(a * a - b * b) / (h1 * (h1 + 2.0))
        };
        m[(i, i)] = diag;
        if i + 1 < n {
            let f1 = fi + 1.0;
            let off = 2.0 / (h1 + 2.0)
                * (f1 * (f1 + a + b) * (f1 + a) * (f1 + b) / ((h1 + 1.0) * (h1 + 3.0))).sqrt();
            m[(i, i + 1)] = off;
            m[(i + 1, i)] = off;
        }
    }
    let eig = SymmetricEigen::new(m);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let v0 = eig.eigenvectors[(0, k)];
            (eig.eigenvalues[k], v0 * v0 * mu0)
        })
        .collect();
    pairs.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
    pairs.into_iter().unzip()
}

/// Gauss-Legendre rule with `n` points.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    gauss_jacobi(0, 0, n)
}

/// Values of the 1D Lagrange basis over `nodes` at `x`.
///
/// Computed through the Legendre Vandermonde for stability at moderate
/// degrees.
pub struct Lagrange1d {
    nodes: Vec<f64>,
    v_lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl Lagrange1d {
    pub fn new(nodes: Vec<f64>) -> Lagrange1d {
        let n = nodes.len();
        let mut v = DMatrix::zeros(n, n);
        for (i, &x) in nodes.iter().enumerate() {
            for j in 0..n {
                v[(i, j)] = jacobi_p(0, 0, j, x);
            }
        }
        Lagrange1d {
            nodes,
            v_lu: v.transpose().lu(),
        }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Basis values l_j(x), j = 0..n.
    pub fn eval(&self, x: f64) -> Vec<f64> {
        let n = self.nodes.len();
        let psi =
            nalgebra::DVector::from_iterator(n, (0..n).map(|j| jacobi_p(0, 0, j, x)));
        self.v_lu
            .solve(&psi)
            .expect("1D Vandermonde is invertible")
            .as_slice()
            .to_vec()
    }

    /// Basis derivative values l_j'(x).
    pub fn eval_deriv(&self, x: f64) -> Vec<f64> {
        let n = self.nodes.len();
        let psi =
            nalgebra::DVector::from_iterator(n, (0..n).map(|j| grad_jacobi_p(0, 0, j, x)));
        self.v_lu
            .solve(&psi)
            .expect("1D Vandermonde is invertible")
            .as_slice()
            .to_vec()
    }
}
