//! Sparse/dense linear solves for the control-mesh system.
//!
//! The limit operator has a handful of entries per row. Small systems go
//! through a dense LU; larger ones through BiCGSTAB with Jacobi
//! preconditioning, which converges quickly here because the operator is
//! close to diagonally dominant (diagonal between 0.4 and 1).

use nalgebra::{DMatrix, DVector};

use crate::error::SolveError;

/// Row-compressed sparse matrix.
pub struct Csr {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<u32>,
    pub vals: Vec<f64>,
}

impl Csr {
    /// Builds from per-row entry lists (columns need not be sorted).
    pub fn from_rows(rows: &[Vec<(u32, f64)>]) -> Csr {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for row in rows {
            let mut entries = row.clone();
            entries.sort_by_key(|e| e.0);
            for (c, v) in entries {
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        Csr {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn mul_vec(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[self.cols[k] as usize];
            }
            out[i] = acc;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![1.0; self.n];
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                if self.cols[k] as usize == i {
                    d[i] = self.vals[k];
                }
            }
        }
        d
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                m[(i, self.cols[k] as usize)] = self.vals[k];
            }
        }
        m
    }
}

const DENSE_LIMIT: usize = 4096;

/// Solves `A x = b` for several right-hand sides to the absolute
/// infinity-norm residual `tol`.
pub fn solve(a: &Csr, rhs: &[Vec<f64>], tol: f64) -> Result<Vec<Vec<f64>>, SolveError> {
    let sols = if a.n <= DENSE_LIMIT {
        let dense = a.to_dense();
        let lu = dense.lu();
        let mut out = Vec::with_capacity(rhs.len());
        for b in rhs {
            let x = lu
                .solve(&DVector::from_column_slice(b))
                .ok_or_else(|| SolveError::Singular("dense LU factorization failed".into()))?;
            out.push(x.as_slice().to_vec());
        }
        out
    } else {
        rhs.iter()
            .map(|b| bicgstab(a, b, tol))
            .collect::<Result<Vec<_>, _>>()?
    };
    // verify the residual bound in all cases
    let mut worst = 0.0_f64;
    let mut buf = vec![0.0; a.n];
    for (x, b) in sols.iter().zip(rhs) {
        a.mul_vec(x, &mut buf);
        for i in 0..a.n {
            worst = worst.max((buf[i] - b[i]).abs());
        }
    }
    if worst > tol {
        return Err(SolveError::NonConvergence {
            residual: worst,
            iterations: 0,
            tolerance: tol,
        });
    }
    Ok(sols)
}

fn bicgstab(a: &Csr, b: &[f64], tol: f64) -> Result<Vec<f64>, SolveError> {
    let n = a.n;
    let diag = a.diagonal();
    let precond = |v: &[f64], out: &mut Vec<f64>| {
        out.clear();
        out.extend(v.iter().zip(&diag).map(|(x, d)| x / d));
    };
    let inf = |v: &[f64]| v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));

    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let r0 = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut buf = vec![0.0; n];
    let mut phat = Vec::new();
    let mut shat = Vec::new();
    let max_iter = 20_000;
    for it in 0..max_iter {
        if inf(&r) <= tol {
            return Ok(x);
        }
        let rho_new: f64 = r0.iter().zip(&r).map(|(a, b)| a * b).sum();
        if rho_new.abs() < f64::MIN_POSITIVE {
            break;
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        precond(&p, &mut phat);
        a.mul_vec(&phat, &mut v);
        let denom: f64 = r0.iter().zip(&v).map(|(a, b)| a * b).sum();
        if denom.abs() < f64::MIN_POSITIVE {
            break;
        }
        alpha = rho / denom;
        let s: Vec<f64> = r.iter().zip(&v).map(|(r, v)| r - alpha * v).collect();
        if inf(&s) <= tol {
            for i in 0..n {
                x[i] += alpha * phat[i];
            }
            return Ok(x);
        }
        precond(&s, &mut shat);
        a.mul_vec(&shat, &mut buf);
        let tt: f64 = buf.iter().map(|t| t * t).sum();
        if tt < f64::MIN_POSITIVE {
            break;
        }
        omega = buf.iter().zip(&s).map(|(t, s)| t * s).sum::<f64>() / tt;
        for i in 0..n {
            x[i] += alpha * phat[i] + omega * shat[i];
            r[i] = s[i] - omega * buf[i];
        }
        if it == max_iter - 1 {
            break;
        }
    }
    a.mul_vec(&x, &mut buf);
    let residual = buf
        .iter()
        .zip(b)
        .fold(0.0_f64, |m, (ax, b)| m.max((ax - b).abs()));
    if residual <= tol {
        Ok(x)
    } else {
        Err(SolveError::NonConvergence {
            residual,
            iterations: max_iter,
            tolerance: tol,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_small_system() {
        let rows = vec![
            vec![(0u32, 2.0), (1u32, 1.0)],
            vec![(0u32, 1.0), (1u32, 3.0)],
        ];
        let a = Csr::from_rows(&rows);
        let sol = solve(&a, &[vec![3.0, 4.0]], 1e-12).unwrap();
        assert!((sol[0][0] - 1.0).abs() < 1e-12);
        assert!((sol[0][1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bicgstab_diag_dominant() {
        let n = 200;
        let rows: Vec<Vec<(u32, f64)>> = (0..n)
            .map(|i| {
                let mut r = vec![(i as u32, 4.0)];
                if i > 0 {
                    r.push((i as u32 - 1, 1.0));
                }
                if i + 1 < n {
                    r.push((i as u32 + 1, 1.0));
                }
                r
            })
            .collect();
        let a = Csr::from_rows(&rows);
        let b = vec![1.0; n];
        let x = bicgstab(&a, &b, 1e-12).unwrap();
        let mut buf = vec![0.0; n];
        a.mul_vec(&x, &mut buf);
        for i in 0..n {
            assert!((buf[i] - 1.0).abs() < 1e-11);
        }
    }
}
