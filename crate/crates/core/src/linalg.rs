//! Dense matrices over GF(2^t) and the Gaussian-elimination toolkit the code
//! constructions are built on: rank, kernel bases, row-space solves,
//! inverses of information-set submatrices.
//!
//! Vectors are row vectors throughout; encoding is `msg * G`.

use crate::field::{GFContext, Symbol};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Symbol>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Symbol>]) -> Mat {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        assert!(rows.iter().all(|v| v.len() == c), "ragged rows");
        let mut data = Vec::with_capacity(r * c);
        for v in rows {
            data.extend_from_slice(v);
        }
        Mat { rows: r, cols: c, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Symbol {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Symbol) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[Symbol] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Symbol>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    /// Vertical stack; all blocks must share the column count.
    pub fn stack(blocks: &[&Mat]) -> Mat {
        assert!(!blocks.is_empty());
        let cols = blocks[0].cols;
        assert!(blocks.iter().all(|b| b.cols == cols), "column mismatch in stack");
        let rows = blocks.iter().map(|b| b.rows).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for b in blocks {
            data.extend_from_slice(&b.data);
        }
        Mat { rows, cols, data }
    }

    /// The submatrix formed by the given columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Mat {
        let mut m = Mat::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                m.set(r, j, self.get(r, c));
            }
        }
        m
    }

    /// Row vector times matrix: `v * self`, `v` of length `rows`.
    pub fn vec_mul(&self, v: &[Symbol], ctx: &GFContext) -> Vec<Symbol> {
        assert_eq!(v.len(), self.rows, "vector/matrix size mismatch");
        let mut out = vec![0 as Symbol; self.cols];
        for (r, &vr) in v.iter().enumerate() {
            if vr == 0 {
                continue;
            }
            let row = self.row(r);
            if vr == 1 {
                for (o, &g) in out.iter_mut().zip(row) {
                    *o ^= g;
                }
            } else {
                for (o, &g) in out.iter_mut().zip(row) {
                    *o ^= ctx.mul(vr, g);
                }
            }
        }
        out
    }

    pub fn mat_mul(&self, other: &Mat, ctx: &GFContext) -> Mat {
        assert_eq!(self.cols, other.rows);
        let mut out = Mat::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let prod = other.vec_mul(self.row(r), ctx);
            out.data[r * other.cols..(r + 1) * other.cols].copy_from_slice(&prod);
        }
        out
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }
}

/// Adds `scale * row src` to `row dst`.
fn row_axpy(m: &mut Mat, dst: usize, src: usize, scale: Symbol, ctx: &GFContext) {
    if scale == 0 {
        return;
    }
    let cols = m.cols;
    for c in 0..cols {
        let s = m.data[src * cols + c];
        if s != 0 {
            m.data[dst * cols + c] ^= ctx.mul(scale, s);
        }
    }
}

fn scale_row(m: &mut Mat, r: usize, scale: Symbol, ctx: &GFContext) {
    if scale == 1 {
        return;
    }
    let cols = m.cols;
    for c in 0..cols {
        let v = m.data[r * cols + c];
        if v != 0 {
            m.data[r * cols + c] = ctx.mul(v, scale);
        }
    }
}

fn swap_rows(m: &mut Mat, a: usize, b: usize) {
    if a == b {
        return;
    }
    let cols = m.cols;
    for c in 0..cols {
        m.data.swap(a * cols + c, b * cols + c);
    }
}

/// Reduced row echelon form; returns the reduced matrix and its pivot columns.
pub fn rref(m: &Mat, ctx: &GFContext) -> (Mat, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let Some(piv) = (r..a.rows).find(|&i| a.get(i, c) != 0) else {
            continue;
        };
        swap_rows(&mut a, r, piv);
        let inv = ctx.inv(a.get(r, c));
        scale_row(&mut a, r, inv, ctx);
        for i in 0..a.rows {
            if i != r {
                let f = a.get(i, c);
                row_axpy(&mut a, i, r, f, ctx);
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank(m: &Mat, ctx: &GFContext) -> usize {
    rref(m, ctx).1.len()
}

/// Basis of `{ x : m * x^T = 0 }`, returned as the rows of a
/// `(cols - rank) x cols` matrix.
pub fn kernel_rows(m: &Mat, ctx: &GFContext) -> Mat {
    let (r, pivots) = rref(m, ctx);
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Mat::zeros(free.len(), m.cols);
    for (bi, &fc) in free.iter().enumerate() {
        basis.set(bi, fc, 1);
        for (pr, &pc) in pivots.iter().enumerate() {
            // pivot variable = -(coefficient of the free variable); char 2 drops the sign
            basis.set(bi, pc, r.get(pr, fc));
        }
    }
    basis
}

/// Solves `x * g = target` for a row vector `x`, if `target` lies in the row
/// space of `g`. The solution is unique when `g` has full row rank.
pub fn solve_row_space(g: &Mat, target: &[Symbol], ctx: &GFContext) -> Option<Vec<Symbol>> {
    assert_eq!(target.len(), g.cols());
    // Eliminate on [g | I] so the identity block accumulates row operations.
    let mut a = Mat::zeros(g.rows, g.cols + g.rows);
    for r in 0..g.rows {
        for c in 0..g.cols {
            a.set(r, c, g.get(r, c));
        }
        a.set(r, g.cols + r, 1);
    }
    let mut t = target.to_vec();
    let mut coeffs = vec![0 as Symbol; g.rows];
    let mut r = 0;
    for c in 0..g.cols {
        if r == a.rows {
            break;
        }
        let Some(piv) = (r..a.rows).find(|&i| a.get(i, c) != 0) else {
            continue;
        };
        swap_rows(&mut a, r, piv);
        let inv = ctx.inv(a.get(r, c));
        scale_row(&mut a, r, inv, ctx);
        for i in 0..a.rows {
            if i != r {
                let f = a.get(i, c);
                row_axpy(&mut a, i, r, f, ctx);
            }
        }
        // reduce the target against this pivot, recording the combination
        let f = t[c];
        if f != 0 {
            for j in 0..g.cols {
                let v = a.get(r, j);
                if v != 0 {
                    t[j] ^= ctx.mul(f, v);
                }
            }
            for j in 0..g.rows {
                let v = a.get(r, g.cols + j);
                if v != 0 {
                    coeffs[j] ^= ctx.mul(f, v);
                }
            }
        }
        r += 1;
    }
    if t.iter().any(|&v| v != 0) {
        return None;
    }
    Some(coeffs)
}

/// Inverse of a square matrix, if nonsingular.
pub fn invert(m: &Mat, ctx: &GFContext) -> Option<Mat> {
    assert_eq!(m.rows, m.cols);
    let n = m.rows;
    let mut a = Mat::zeros(n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            a.set(r, c, m.get(r, c));
        }
        a.set(r, n + r, 1);
    }
    let (red, pivots) = rref(&a, ctx);
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    let mut inv = Mat::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            inv.set(r, c, red.get(r, n + c));
        }
    }
    Some(inv)
}

/// Parity-check matrix of the code generated by `g`: a basis of the dual.
pub fn parity_from_generator(g: &Mat, ctx: &GFContext) -> Mat {
    kernel_rows(g, ctx)
}
