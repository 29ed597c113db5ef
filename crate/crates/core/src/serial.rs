//! Serial multilevel concatenation: a binary nested tower as the inner code,
//! one outer code per level over GF(2^{t_i}), two-stage encoding (outer
//! codes first, then every column through the inner code), and the m-stage
//! decoder that alternates per-column ML decoding, GMD outer decoding, and
//! coset stripping.
//!
//! Codeword layout: bit `j * n0 + r` is row r of column j; every column is a
//! codeword of the inner code.

use std::sync::Arc;

use crate::code::{CodeError, MlDecoded};
use crate::field::{GFContext, Symbol};
use crate::gmd::{gmd_decode, OuterCode};
use crate::tower::NestedTower;

/// Per-stage diagnostics of the serial decoder.
#[derive(Debug, Clone)]
pub struct SerialDecodeResult {
    /// Recovered information bits (all levels concatenated).
    pub message: Vec<Symbol>,
    /// Outer (GMD) decoding success per stage.
    pub stage_ok: Vec<bool>,
    /// The outer codeword settled on per stage (the GMD output, or the raw
    /// inner-decoded word when GMD failed and decoding continued).
    pub stage_words: Vec<Vec<Symbol>>,
    /// Residual bits after the final strip; zero exactly on clean decodes.
    pub residual: Vec<Symbol>,
    pub first_failed_stage: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct SerialParams {
    pub n: usize,
    pub k: usize,
    pub rate: f64,
    /// `min_i d_{0,i} d_{1,i}` from verified component distances.
    pub design_distance: usize,
}

/// The serial multilevel concatenated code.
#[derive(Debug, Clone)]
pub struct SerialCode {
    tower: NestedTower,
    outer_ctxs: Vec<Arc<GFContext>>,
    outers: Vec<OuterCode>,
    n1: usize,
    /// Message bit offsets per level (K_0 = 0, ..., K_m = K).
    offsets: Vec<usize>,
}

impl SerialCode {
    pub fn new(tower: NestedTower, outers: Vec<OuterCode>) -> Result<SerialCode, CodeError> {
        if tower.ctx().t() != 1 {
            return Err(CodeError::Construction("inner tower must be binary".into()));
        }
        if outers.len() != tower.num_levels() {
            return Err(CodeError::Construction(format!(
                "outer code count {} != tower levels {}",
                outers.len(),
                tower.num_levels()
            )));
        }
        let n1 = outers[0].n();
        let mut outer_ctxs = Vec::with_capacity(outers.len());
        for (i, outer) in outers.iter().enumerate() {
            if outer.n() != n1 {
                return Err(CodeError::Construction("outer codes differ in length".into()));
            }
            let t_i = tower.level_dim(i) as u32;
            let ctx = outer.ctx().clone();
            if ctx.t() != t_i {
                return Err(CodeError::Construction(format!(
                    "outer code {i} is over GF(2^{}), level degree is {t_i}",
                    ctx.t()
                )));
            }
            outer_ctxs.push(ctx);
        }
        let mut offsets = vec![0usize];
        for (i, outer) in outers.iter().enumerate() {
            offsets.push(offsets[i] + outer.k() * tower.level_dim(i));
        }
        Ok(SerialCode { tower, outer_ctxs, outers, n1, offsets })
    }

    pub fn tower(&self) -> &NestedTower {
        &self.tower
    }

    pub fn outer(&self, level: usize) -> &OuterCode {
        &self.outers[level]
    }

    pub fn num_levels(&self) -> usize {
        self.outers.len()
    }

    pub fn n0(&self) -> usize {
        self.tower.n()
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n(&self) -> usize {
        self.n0() * self.n1
    }

    pub fn k(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// Message bit range of a level.
    pub fn level_range(&self, level: usize) -> std::ops::Range<usize> {
        self.offsets[level]..self.offsets[level + 1]
    }

    /// Encodes K information bits to the N-bit codeword.
    pub fn encode(&self, u: &[Symbol]) -> Result<Vec<Symbol>, CodeError> {
        if u.len() != self.k() {
            return Err(CodeError::LengthMismatch { expected: self.k(), got: u.len() });
        }
        // outer stage: per level, pack bits into symbols and encode
        let mut outer_words = Vec::with_capacity(self.num_levels());
        for (i, outer) in self.outers.iter().enumerate() {
            let t_i = self.tower.level_dim(i);
            let ctx = &self.outer_ctxs[i];
            let bits = &u[self.level_range(i)];
            let msg: Vec<Symbol> = bits
                .chunks(t_i)
                .map(|c| ctx.from_bits(c))
                .collect::<Result<_, _>>()
                .map_err(|e| CodeError::Construction(e.to_string()))?;
            outer_words.push(outer.encode(&msg)?);
        }
        // inner stage: stack each column's symbol bits and encode with the tower
        let mut out = vec![0 as Symbol; self.n()];
        for j in 0..self.n1 {
            let parts: Vec<Vec<Symbol>> = (0..self.num_levels())
                .map(|i| self.outer_ctxs[i].to_bits(outer_words[i][j]))
                .collect();
            let col = self.tower.encode_levels(0, &parts)?;
            out[j * self.n0()..(j + 1) * self.n0()].copy_from_slice(&col);
        }
        Ok(out)
    }

    /// Per-column ML decode against the nested code of `level`, returning
    /// the extracted level symbols and the distance-gap reliabilities.
    fn inner_stage(
        &self,
        level: usize,
        columns: &[Vec<Symbol>],
    ) -> Result<(Vec<Symbol>, Vec<f64>), CodeError> {
        let nested = self.tower.level_code(level);
        let t_i = self.tower.level_dim(level);
        let ctx = &self.outer_ctxs[level];
        let mut symbols = Vec::with_capacity(self.n1);
        let mut reliabilities = Vec::with_capacity(self.n1);
        for col in columns {
            let MlDecoded { message, gap, .. } = nested.ml_decode(col)?;
            let sym = ctx
                .from_bits(&message[..t_i])
                .map_err(|e| CodeError::Construction(e.to_string()))?;
            symbols.push(sym);
            reliabilities.push(gap as f64);
        }
        Ok((symbols, reliabilities))
    }

    /// The m-stage decoder. A stage whose GMD decode fails is flagged;
    /// decoding continues with the raw inner-decoded word so later stages
    /// still produce diagnostics.
    pub fn decode(&self, y: &[Symbol]) -> Result<SerialDecodeResult, CodeError> {
        if y.len() != self.n() {
            return Err(CodeError::LengthMismatch { expected: self.n(), got: y.len() });
        }
        let n0 = self.n0();
        let mut columns: Vec<Vec<Symbol>> =
            (0..self.n1).map(|j| y[j * n0..(j + 1) * n0].to_vec()).collect();
        let mut message = vec![0 as Symbol; self.k()];
        let mut stage_ok = Vec::with_capacity(self.num_levels());
        let mut stage_words = Vec::with_capacity(self.num_levels());
        let mut first_failed = None;
        for level in 0..self.num_levels() {
            let (raw, reliabilities) = self.inner_stage(level, &columns)?;
            let outer = &self.outers[level];
            let decoded = gmd_decode(outer, &raw, &reliabilities)?;
            let ok = decoded.is_some();
            if !ok && first_failed.is_none() {
                first_failed = Some(level);
            }
            let word = decoded.unwrap_or(raw);
            // recover the level's message bits (exact when `word` is the
            // transmitted outer codeword)
            let msg = match outer.message_of(&word) {
                Ok(m) => m,
                Err(_) => vec![0 as Symbol; outer.k()],
            };
            let t_i = self.tower.level_dim(level);
            let ctx = &self.outer_ctxs[level];
            let range = self.level_range(level);
            for (s, &sym) in msg.iter().enumerate() {
                let bits = ctx.to_bits(sym);
                let base = range.start + s * t_i;
                message[base..base + t_i].copy_from_slice(&bits);
            }
            // coset strip every column
            let block = self.tower.block(level);
            for (j, col) in columns.iter_mut().enumerate() {
                let bits = ctx.to_bits(word[j]);
                let z = block.vec_mul(&bits, self.tower.ctx());
                for (c, zb) in col.iter_mut().zip(z) {
                    *c ^= zb;
                }
            }
            stage_ok.push(ok);
            stage_words.push(word);
        }
        let mut residual = Vec::with_capacity(self.n());
        for col in &columns {
            residual.extend_from_slice(col);
        }
        Ok(SerialDecodeResult { message, stage_ok, stage_words, residual, first_failed_stage: first_failed })
    }

    pub fn params(&self) -> Result<SerialParams, CodeError> {
        let n = self.n();
        let k = self.k();
        let mut design = usize::MAX;
        for level in 0..self.num_levels() {
            let d0 = match self.tower.verified_distances() {
                Some(d) => d[level],
                None => self.tower.level_code(level).min_distance()?,
            };
            let d1 = self.outers[level].distance()?;
            design = design.min(d0 * d1);
        }
        Ok(SerialParams { n, k, rate: k as f64 / n as f64, design_distance: design })
    }

    /// Exact minimum distance by enumerating all 2^K codewords.
    pub fn min_distance_bruteforce(&self) -> Result<usize, CodeError> {
        let k = self.k();
        if k > 20 {
            return Err(CodeError::BudgetExceeded { needed: 1u128 << k, budget: 1 << 20 });
        }
        let mut best = self.n() + 1;
        for m in 1u64..(1u64 << k) {
            let u: Vec<Symbol> = (0..k).map(|i| ((m >> i) & 1) as Symbol).collect();
            let cw = self.encode(&u)?;
            let w = cw.iter().filter(|&&b| b != 0).count();
            best = best.min(w);
        }
        Ok(best)
    }
}
