//! Reed-Solomon evaluation codes and their errors-and-erasures decoder.
//!
//! The code is `{ (f(x_0), ..., f(x_{n-1})) : deg f < k }` with evaluation
//! points `x_j = alpha^j`. Decoding restricts to the non-erased coordinates
//! and runs the extended-Euclid (Gao) decoder there, which corrects any
//! combination of e errors and s erasures with `2e + s < d = n - k + 1`.

use std::sync::Arc;

use crate::code::{CodeError, LinearCode};
use crate::field::{GFContext, Symbol};
use crate::linalg::Mat;

// ---- dense polynomials over GF(q), coefficients low to high ----

pub(crate) fn poly_trim(p: &mut Vec<Symbol>) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

fn poly_deg(p: &[Symbol]) -> isize {
    p.len() as isize - 1
}

fn poly_add(a: &[Symbol], b: &[Symbol]) -> Vec<Symbol> {
    let mut out = vec![0; a.len().max(b.len())];
    for (i, &c) in a.iter().enumerate() {
        out[i] ^= c;
    }
    for (i, &c) in b.iter().enumerate() {
        out[i] ^= c;
    }
    poly_trim(&mut out);
    out
}

fn poly_mul(ctx: &GFContext, a: &[Symbol], b: &[Symbol]) -> Vec<Symbol> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0 as Symbol; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if y != 0 {
                out[i + j] ^= ctx.mul(x, y);
            }
        }
    }
    poly_trim(&mut out);
    out
}

/// Quotient and remainder of `a / b`; `b` must be nonzero.
fn poly_divmod(ctx: &GFContext, a: &[Symbol], b: &[Symbol]) -> (Vec<Symbol>, Vec<Symbol>) {
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut rem = a.to_vec();
    poly_trim(&mut rem);
    if rem.len() < b.len() {
        return (Vec::new(), rem);
    }
    let mut quot = vec![0 as Symbol; rem.len() - b.len() + 1];
    let lead_inv = ctx.inv(*b.last().unwrap());
    while rem.len() >= b.len() {
        let shift = rem.len() - b.len();
        let factor = ctx.mul(*rem.last().unwrap(), lead_inv);
        quot[shift] = factor;
        for (i, &bc) in b.iter().enumerate() {
            if bc != 0 {
                rem[shift + i] ^= ctx.mul(factor, bc);
            }
        }
        poly_trim(&mut rem);
        if rem.is_empty() {
            break;
        }
    }
    poly_trim(&mut quot);
    (quot, rem)
}

pub(crate) fn poly_eval(ctx: &GFContext, p: &[Symbol], x: Symbol) -> Symbol {
    let mut acc = 0;
    for &c in p.iter().rev() {
        acc = ctx.add(ctx.mul(acc, x), c);
    }
    acc
}

/// Lagrange interpolation through `(points[i], values[i])`; points distinct.
fn poly_interpolate(ctx: &GFContext, points: &[Symbol], values: &[Symbol]) -> Vec<Symbol> {
    let mut acc: Vec<Symbol> = Vec::new();
    for (i, (&xi, &yi)) in points.iter().zip(values).enumerate() {
        if yi == 0 {
            continue;
        }
        let mut basis = vec![yi];
        let mut denom: Symbol = 1;
        for (j, &xj) in points.iter().enumerate() {
            if j == i {
                continue;
            }
            basis = poly_mul(ctx, &basis, &[xj, 1]); // (x - x_j) = (x + x_j)
            denom = ctx.mul(denom, ctx.add(xi, xj));
        }
        let scale = ctx.inv(denom);
        for c in basis.iter_mut() {
            *c = ctx.mul(*c, scale);
        }
        acc = poly_add(&acc, &basis);
    }
    acc
}

/// A Reed-Solomon `[n, k, n-k+1]` code over GF(2^t), `n <= q-1`.
#[derive(Debug, Clone)]
pub struct ReedSolomonCode {
    ctx: Arc<GFContext>,
    points: Vec<Symbol>,
    k: usize,
    linear: LinearCode,
}

impl ReedSolomonCode {
    pub fn new(ctx: Arc<GFContext>, n: usize, k: usize) -> Result<ReedSolomonCode, CodeError> {
        if n > ctx.q() - 1 {
            return Err(CodeError::Construction(format!(
                "length {n} exceeds q-1 = {}",
                ctx.q() - 1
            )));
        }
        if k == 0 || k > n {
            return Err(CodeError::Construction(format!("bad dimension k={k} for length {n}")));
        }
        let points: Vec<Symbol> = (0..n).map(|j| ctx.alpha_pow(j)).collect();
        // row i of the generator evaluates x^i at every point
        let mut gen = Mat::zeros(k, n);
        for (j, &x) in points.iter().enumerate() {
            gen.set(0, j, 1);
            for i in 1..k {
                gen.set(i, j, ctx.mul(gen.get(i - 1, j), x));
            }
        }
        let linear = LinearCode::new(ctx.clone(), gen)?;
        linear.set_verified_distance(n - k + 1);
        Ok(ReedSolomonCode { ctx, points, k, linear })
    }

    pub fn ctx(&self) -> &Arc<GFContext> {
        &self.ctx
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// The MDS distance n - k + 1.
    pub fn distance(&self) -> usize {
        self.n() - self.k + 1
    }

    pub fn as_linear(&self) -> &LinearCode {
        &self.linear
    }

    pub fn encode(&self, msg: &[Symbol]) -> Result<Vec<Symbol>, CodeError> {
        self.linear.encode(msg)
    }

    pub fn message_of(&self, codeword: &[Symbol]) -> Result<Vec<Symbol>, CodeError> {
        self.linear.message_of(codeword)
    }

    /// Errors-and-erasures decoding. Returns the transmitted codeword
    /// whenever `2e + s < d` (e errors outside the erasures, s erasures);
    /// beyond that it may return `None` or a wrong codeword.
    pub fn decode_errors_erasures(
        &self,
        received: &[Symbol],
        erasures: &[usize],
    ) -> Result<Option<Vec<Symbol>>, CodeError> {
        let n = self.n();
        if received.len() != n {
            return Err(CodeError::LengthMismatch { expected: n, got: received.len() });
        }
        if erasures.iter().any(|&e| e >= n) {
            return Err(CodeError::BadCoordinates("erasure index out of range".into()));
        }
        let mut erased = vec![false; n];
        for &e in erasures {
            erased[e] = true;
        }
        let keep: Vec<usize> = (0..n).filter(|&i| !erased[i]).collect();
        if keep.len() < self.k {
            return Ok(None);
        }
        let pts: Vec<Symbol> = keep.iter().map(|&i| self.points[i]).collect();
        let vals: Vec<Symbol> = keep.iter().map(|&i| received[i]).collect();
        let Some(f) = gao_decode(&self.ctx, &pts, &vals, self.k) else {
            return Ok(None);
        };
        let cw: Vec<Symbol> = self.points.iter().map(|&x| poly_eval(&self.ctx, &f, x)).collect();
        Ok(Some(cw))
    }
}

/// Extended-Euclid decoding on `n'` distinct points: finds `f` with
/// `deg f < k` agreeing with the values in all but at most
/// `(n' - k) / 2` positions, or `None`.
fn gao_decode(
    ctx: &GFContext,
    points: &[Symbol],
    values: &[Symbol],
    k: usize,
) -> Option<Vec<Symbol>> {
    let np = points.len();
    // g0 = prod (x - x_i)
    let mut g0: Vec<Symbol> = vec![1];
    for &x in points {
        g0 = poly_mul(ctx, &g0, &[x, 1]);
    }
    let g1 = poly_interpolate(ctx, points, values);
    if g1.is_empty() {
        return Some(Vec::new()); // all-zero word
    }
    // partial extended Euclid, tracking the g1 cofactor
    let mut r0 = g0;
    let mut r1 = g1;
    let mut v0: Vec<Symbol> = Vec::new();
    let mut v1: Vec<Symbol> = vec![1];
    while 2 * poly_deg(&r1) >= (np + k) as isize {
        let (q, rem) = poly_divmod(ctx, &r0, &r1);
        let vnext = poly_add(&v0, &poly_mul(ctx, &q, &v1));
        r0 = std::mem::replace(&mut r1, rem);
        v0 = std::mem::replace(&mut v1, vnext);
        if r1.is_empty() {
            break;
        }
    }
    if v1.is_empty() {
        return None;
    }
    let (f, rem) = poly_divmod(ctx, &r1, &v1);
    if !rem.is_empty() || poly_deg(&f) >= k as isize {
        return None;
    }
    Some(f)
}
