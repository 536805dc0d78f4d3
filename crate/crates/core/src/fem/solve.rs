//! Symmetric positive definite solves: sparse LDLᵀ with nested dissection,
//! Jacobi-preconditioned CG for very large systems.

use super::ldl::{BlockLdl, BlockMatrix, Pivoting};
use super::ordering::nested_dissection;
use super::sparse::CsrMatrix;
use crate::error::{Error, Result};

/// Systems up to this size are factorised directly.
pub const DIRECT_LIMIT: usize = 200_000;
pub const DEFAULT_TOL: f64 = 1e-10;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn residual(a: &CsrMatrix, x: &[f64], b: &[f64]) -> Vec<f64> {
    a.matvec(x).iter().zip(b).map(|(ax, bi)| bi - ax).collect()
}

/// Graph of the off-diagonal pattern of a square CSR matrix.
pub fn matrix_graph(a: &CsrMatrix) -> Vec<Vec<usize>> {
    (0..a.nrows())
        .map(|i| a.row(i).0.iter().copied().filter(|&j| j != i).collect())
        .collect()
}

/// Reusable direct factorisation of an SPD matrix.
pub struct SpdFactor {
    a: CsrMatrix,
    ldl: BlockLdl<1>,
}

impl SpdFactor {
    pub fn new(a: &CsrMatrix) -> Result<Self> {
        assert_eq!(a.nrows(), a.ncols());
        let rows: Vec<Vec<usize>> = (0..a.nrows()).map(|i| a.row(i).0.to_vec()).collect();
        let mut bm = BlockMatrix::<1>::with_pattern(&rows);
        for i in 0..a.nrows() {
            let (c, v) = a.row(i);
            for (&j, &x) in c.iter().zip(v) {
                bm.block_mut(i, j)[0][0] = x;
            }
        }
        let perm = nested_dissection(&matrix_graph(a));
        let ldl = BlockLdl::factor(&bm, &perm, Pivoting::PositiveDefinite)?;
        Ok(SpdFactor { a: a.clone(), ldl })
    }

    fn raw_solve(&self, b: &[f64]) -> Vec<f64> {
        let bb: Vec<[f64; 1]> = b.iter().map(|&v| [v]).collect();
        self.ldl.solve(&bb).into_iter().map(|v| v[0]).collect()
    }

    /// Solve with up to three steps of iterative refinement.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = self.raw_solve(b);
        let bn = norm(b);
        for _ in 0..3 {
            let r = residual(&self.a, &x, b);
            if norm(&r) <= 1e-14 * bn {
                break;
            }
            let dx = self.raw_solve(&r);
            x.iter_mut().zip(dx).for_each(|(xi, d)| *xi += d);
        }
        x
    }
}

/// Jacobi-preconditioned conjugate gradients.
pub fn pcg(a: &CsrMatrix, b: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let n = b.len();
    let diag = a.diagonal();
    if let Some(row) = diag.iter().position(|&d| !(d > 0.0)) {
        return Err(Error::NotPositiveDefinite { row, pivot: diag[row] });
    }
    let bn = norm(b);
    let mut x = vec![0.0; n];
    if bn == 0.0 {
        return Ok(x);
    }
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    for it in 0..max_iter {
        let ap = a.matvec(&p);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if !(pap > 0.0) {
            return Err(Error::NotPositiveDefinite { row: it, pivot: pap });
        }
        let step = rz / pap;
        for i in 0..n {
            x[i] += step * p[i];
            r[i] -= step * ap[i];
        }
        if norm(&r) <= tol * bn {
            return Ok(x);
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::NoConvergence { iterations: max_iter, residual: norm(&r) / bn })
}

/// Solves `A x = b` for SPD `A` to relative residual `tol`.
pub fn solve_spd(a: &CsrMatrix, b: &[f64], tol: f64) -> Result<Vec<f64>> {
    let n = b.len();
    if n <= DIRECT_LIMIT {
        let x = SpdFactor::new(a)?.solve(b);
        let bn = norm(b);
        let rn = norm(&residual(a, &x, b));
        if rn > tol.max(1e-14) * bn {
            return Err(Error::NoConvergence { iterations: 3, residual: rn / bn });
        }
        Ok(x)
    } else {
        pcg(a, b, tol, 20 * n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_and_two_by_two() {
        let b = vec![1.0, -2.0, 3.0];
        assert_eq!(solve_spd(&CsrMatrix::identity(3), &b, 1e-12).unwrap(), b);
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 0, 2.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 2.0)]);
        let x = solve_spd(&a, &[3.0, 3.0], 1e-12).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
    }

    fn random_spd(n: usize, seed: u64) -> CsrMatrix {
        // Gram matrix of sparse random rows plus a diagonal shift
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = Vec::new();
        let rows: Vec<Vec<(usize, f64)>> = (0..n)
            .map(|_| (0..4).map(|_| (rng.gen_range(0..n), rng.gen_range(-1.0..1.0))).collect())
            .collect();
        for r in &rows {
            for &(i, a) in r {
                for &(j, b) in r {
                    t.push((i, j, a * b));
                }
            }
        }
        for i in 0..n {
            t.push((i, i, 0.1));
        }
        CsrMatrix::from_triplets(n, n, &t)
    }

    #[test]
    fn random_spd_residual() {
        let a = random_spd(50, 3);
        let b: Vec<f64> = (0..50).map(|i| (i as f64).sin()).collect();
        let x = solve_spd(&a, &b, 1e-10).unwrap();
        assert!(norm(&residual(&a, &x, &b)) <= 1e-10 * norm(&b));
        let y = pcg(&a, &b, 1e-10, 10_000).unwrap();
        assert!(norm(&residual(&a, &y, &b)) <= 1e-10 * norm(&b));
    }

    #[test]
    fn indefinite_rejected() {
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 1, 3.0), (1, 0, 3.0), (1, 1, 1.0)]);
        assert!(matches!(solve_spd(&a, &[1.0, 1.0], 1e-10), Err(Error::NotPositiveDefinite { .. })));
    }
}
