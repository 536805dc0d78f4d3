//! Sparse block `L D Lᵀ` factorisation (up-looking, elimination-tree driven).
//!
//! The matrix is stored as a symmetric block CSR with `B × B` blocks, both
//! triangles present. No pivoting is performed: callers must guarantee that
//! every leading block principal submatrix is nonsingular (true for SPD
//! matrices and for the coupled optimality system).

use crate::error::{Error, Result};

pub type Block<const B: usize> = [[f64; B]; B];

#[derive(Clone, Debug)]
pub struct BlockMatrix<const B: usize> {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    blocks: Vec<Block<B>>,
}

impl<const B: usize> BlockMatrix<B> {
    /// Zero matrix on a pattern of sorted rows.
    pub fn with_pattern(rows: &[Vec<usize>]) -> Self {
        let mut row_ptr = vec![0];
        let mut col_idx = Vec::new();
        for r in rows {
            col_idx.extend_from_slice(r);
            row_ptr.push(col_idx.len());
        }
        let nnz = col_idx.len();
        BlockMatrix { n: rows.len(), row_ptr, col_idx, blocks: vec![[[0.0; B]; B]; nnz] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> (&[usize], &[Block<B>]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.blocks[r])
    }

    pub fn block_mut(&mut self, i: usize, j: usize) -> &mut Block<B> {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        let k = self.col_idx[r.clone()]
            .binary_search(&j)
            .unwrap_or_else(|_| panic!("block ({i},{j}) not in pattern"));
        &mut self.blocks[r.start + k]
    }

    pub fn matvec(&self, x: &[[f64; B]]) -> Vec<[f64; B]> {
        (0..self.n)
            .map(|i| {
                let (c, b) = self.row(i);
                let mut y = [0.0; B];
                for (&j, blk) in c.iter().zip(b) {
                    let t = mul_vec(blk, &x[j]);
                    for r in 0..B {
                        y[r] += t[r];
                    }
                }
                y
            })
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks.iter().flatten().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[inline]
fn mul_vec<const B: usize>(a: &Block<B>, x: &[f64; B]) -> [f64; B] {
    let mut y = [0.0; B];
    for r in 0..B {
        for c in 0..B {
            y[r] += a[r][c] * x[c];
        }
    }
    y
}

#[inline]
fn mul_t_vec<const B: usize>(a: &Block<B>, x: &[f64; B]) -> [f64; B] {
    let mut y = [0.0; B];
    for r in 0..B {
        for c in 0..B {
            y[c] += a[r][c] * x[r];
        }
    }
    y
}

#[inline]
fn mul_bt<const B: usize>(a: &Block<B>, b: &Block<B>) -> Block<B> {
    let mut out = [[0.0; B]; B];
    for r in 0..B {
        for c in 0..B {
            let mut s = 0.0;
            for k in 0..B {
                s += a[r][k] * b[c][k];
            }
            out[r][c] = s;
        }
    }
    out
}

#[inline]
fn mul<const B: usize>(a: &Block<B>, b: &Block<B>) -> Block<B> {
    let mut out = [[0.0; B]; B];
    for r in 0..B {
        for k in 0..B {
            for c in 0..B {
                out[r][c] += a[r][k] * b[k][c];
            }
        }
    }
    out
}

#[inline]
fn sub_assign<const B: usize>(a: &mut Block<B>, b: &Block<B>) {
    for r in 0..B {
        for c in 0..B {
            a[r][c] -= b[r][c];
        }
    }
}

fn transpose<const B: usize>(a: &Block<B>) -> Block<B> {
    let mut t = [[0.0; B]; B];
    for r in 0..B {
        for c in 0..B {
            t[c][r] = a[r][c];
        }
    }
    t
}

/// Gauss–Jordan inverse with partial pivoting; `None` when a pivot is
/// negligible relative to `scale`.
fn inverse<const B: usize>(a: &Block<B>, scale: f64) -> Option<Block<B>> {
    let mut m = *a;
    let mut inv = [[0.0; B]; B];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for col in 0..B {
        let piv = (col..B).max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))?;
        if !(m[piv][col].abs() > 1e-14 * scale) {
            return None;
        }
        m.swap(col, piv);
        inv.swap(col, piv);
        let d = m[col][col];
        for c in 0..B {
            m[col][c] /= d;
            inv[col][c] /= d;
        }
        for r in 0..B {
            if r != col {
                let f = m[r][col];
                if f != 0.0 {
                    for c in 0..B {
                        m[r][c] -= f * m[col][c];
                        inv[r][c] -= f * inv[col][c];
                    }
                }
            }
        }
    }
    Some(inv)
}

#[derive(Clone, Debug)]
pub struct BlockLdl<const B: usize> {
    perm: Vec<usize>,
    lp: Vec<usize>,
    li: Vec<usize>,
    lx: Vec<Block<B>>,
    d_inv: Vec<Block<B>>,
    /// Diagonal of `D` (scalar case) for definiteness checks.
    d: Vec<Block<B>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pivoting {
    /// Require positive scalar pivots (B = 1 SPD use).
    PositiveDefinite,
    /// Only require nonsingular pivot blocks.
    Nonsingular,
}

impl<const B: usize> BlockLdl<B> {
    /// Factorises `P A Pᵀ` where `perm[new] = old`.
    pub fn factor(a: &BlockMatrix<B>, perm: &[usize], mode: Pivoting) -> Result<Self> {
        let n = a.n;
        assert_eq!(perm.len(), n);
        let mut iperm = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            iperm[old] = new;
        }
        const NONE: usize = usize::MAX;

        // symbolic: elimination tree and column counts
        let mut parent = vec![NONE; n];
        let mut flag = vec![NONE; n];
        let mut lnz = vec![0usize; n];
        for k in 0..n {
            flag[k] = k;
            let (cols, _) = a.row(perm[k]);
            for &c in cols {
                let mut i = iperm[c];
                if i < k {
                    while flag[i] != k {
                        if parent[i] == NONE {
                            parent[i] = k;
                        }
                        lnz[i] += 1;
                        flag[i] = k;
                        i = parent[i];
                    }
                }
            }
        }
        let mut lp = vec![0usize; n + 1];
        for k in 0..n {
            lp[k + 1] = lp[k] + lnz[k];
        }
        let nnz = lp[n];
        let mut li = vec![0usize; nnz];
        let mut lx = vec![[[0.0; B]; B]; nnz];
        let mut d = vec![[[0.0; B]; B]; n];
        let mut d_inv = vec![[[0.0; B]; B]; n];

        // numeric
        let scale = a.max_abs().max(f64::MIN_POSITIVE);
        let mut y = vec![[[0.0; B]; B]; n];
        let mut pattern = vec![0usize; n];
        let mut fill = vec![0usize; n];
        flag.iter_mut().for_each(|f| *f = NONE);
        for k in 0..n {
            let mut top = n;
            flag[k] = k;
            let (cols, blocks) = a.row(perm[k]);
            for (&c, blk) in cols.iter().zip(blocks) {
                let mut i = iperm[c];
                if i <= k {
                    // y holds row k of the permuted matrix: Ā(k, i) = A(perm k, c)
                    let acc = &mut y[i];
                    for r in 0..B {
                        for s in 0..B {
                            acc[r][s] += blk[r][s];
                        }
                    }
                    let mut len = 0;
                    while flag[i] != k {
                        pattern[len] = i;
                        len += 1;
                        flag[i] = k;
                        i = parent[i];
                    }
                    while len > 0 {
                        top -= 1;
                        len -= 1;
                        pattern[top] = pattern[len];
                    }
                }
            }
            let mut dk = y[k];
            y[k] = [[0.0; B]; B];
            for &j in &pattern[top..n] {
                let wj = y[j];
                y[j] = [[0.0; B]; B];
                for p in lp[j]..lp[j] + fill[j] {
                    let upd = mul_bt(&wj, &lx[p]);
                    sub_assign(&mut y[li[p]], &upd);
                }
                let lkj = mul(&wj, &d_inv[j]);
                sub_assign(&mut dk, &mul_bt(&wj, &lkj));
                let p = lp[j] + fill[j];
                li[p] = k;
                lx[p] = lkj;
                fill[j] += 1;
            }
            if mode == Pivoting::PositiveDefinite && B == 1 && !(dk[0][0] > 1e-14 * scale) {
                return Err(Error::NotPositiveDefinite { row: perm[k], pivot: dk[0][0] });
            }
            d_inv[k] = inverse(&dk, scale).ok_or(Error::SingularPivot { row: perm[k] })?;
            d[k] = dk;
        }
        Ok(BlockLdl { perm: perm.to_vec(), lp, li, lx, d_inv, d })
    }

    /// Number of stored off-diagonal blocks of `L`.
    pub fn nnz(&self) -> usize {
        self.li.len()
    }

    pub fn pivots(&self) -> &[Block<B>] {
        &self.d
    }

    pub fn solve(&self, b: &[[f64; B]]) -> Vec<[f64; B]> {
        let n = self.perm.len();
        let mut x: Vec<[f64; B]> = self.perm.iter().map(|&p| b[p]).collect();
        for j in 0..n {
            let xj = x[j];
            for p in self.lp[j]..self.lp[j + 1] {
                let t = mul_vec(&self.lx[p], &xj);
                let xi = &mut x[self.li[p]];
                for r in 0..B {
                    xi[r] -= t[r];
                }
            }
        }
        for j in 0..n {
            x[j] = mul_vec(&self.d_inv[j], &x[j]);
        }
        for j in (0..n).rev() {
            let mut xj = x[j];
            for p in self.lp[j]..self.lp[j + 1] {
                let t = mul_t_vec(&self.lx[p], &x[self.li[p]]);
                for r in 0..B {
                    xj[r] -= t[r];
                }
            }
            x[j] = xj;
        }
        let mut out = vec![[0.0; B]; n];
        for (k, &p) in self.perm.iter().enumerate() {
            out[p] = x[k];
        }
        out
    }
}

/// Checks that a block matrix equals its transpose (up to `tol` relative).
pub fn is_symmetric<const B: usize>(a: &BlockMatrix<B>, tol: f64) -> bool {
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    for i in 0..a.n {
        let (c, b) = a.row(i);
        for (&j, blk) in c.iter().zip(b) {
            let (cj, bj) = a.row(j);
            let Ok(k) = cj.binary_search(&i) else { return false };
            let t = transpose(&bj[k]);
            for r in 0..B {
                for s in 0..B {
                    if (blk[r][s] - t[r][s]).abs() > tol * scale {
                        return false;
                    }
                }
            }
        }
    }
    true
}
