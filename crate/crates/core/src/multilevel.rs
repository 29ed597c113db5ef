//! The m-level bipartite-graph code and its m-stage decoder.
//!
//! Structure: a q-ary nested tower over the left degree supplies per-level
//! generator blocks G_i; the per-level message vectors written on level i's
//! edges must satisfy the auxiliary code at every left vertex and the right
//! code B_i at every level-i right vertex. Those two families of constraints
//! make the level-i message layer exactly a basic bipartite-graph code C_i
//! on the level subgraph, so the whole code is the direct sum of the C_i
//! re-expanded through the tower.
//!
//! Decoding runs one stage per level: constrained reliabilities from the
//! current residuals, a min-sum round at the level's right vertices, basic
//! iterations on C_i, then coset stripping `y <- y + a_i G_i`.

use std::sync::Arc;

use crate::code::{CodeError, LinearCode};
use crate::expander::{
    bit_dist_table, gather_left_bits, min_sum_best, pack_symbols, scatter_left_symbols, BGCode,
    ReliabilityTable,
};
use crate::field::{GFContext, Symbol};
use crate::graph::MultilevelGraph;
use crate::linalg::{self, Mat};
use crate::tower::NestedTower;

#[derive(Debug, Clone, Copy, Default)]
pub struct MlDecodeConfig {
    /// Round cap for the per-stage basic iterations (default 4 log2 n).
    pub max_rounds: Option<usize>,
    /// Abort at the first failed stage instead of continuing for diagnostics.
    pub strict: bool,
}

#[derive(Debug, Clone)]
pub struct MlDecodeResult {
    /// Recovered q-ary message layer per level (indexed by the level
    /// subgraph's edge ids); `None` for stages skipped in strict mode.
    pub level_words: Vec<Option<Vec<Symbol>>>,
    /// Per-stage success flags (basic iterations reached a fixed point).
    pub stage_ok: Vec<bool>,
    /// Residual bits after all strips; equals the channel error pattern when
    /// every stage decided correctly.
    pub residual: Vec<Symbol>,
    /// Rebuilt codeword bits, when every stage produced a layer.
    pub codeword: Option<Vec<Symbol>>,
}

/// Per-level and aggregate parameters reported by [`MLExpanderCode::params`].
#[derive(Debug, Clone)]
pub struct MlParams {
    pub n_bits: usize,
    /// q-ary dimension (the binary dimension is t times this).
    pub dim_q: usize,
    pub rate: f64,
    /// The rate bound from the per-level constraint count:
    /// `sum_i (Delta_i / Delta)(R_{1,i} + R_{aux,i} - 1)`.
    pub rate_bound: f64,
    pub rate_slack: f64,
    /// `min_i delta_{0,i} delta_{1,i}` from the verified component distances.
    pub design_rel_distance: f64,
}

/// An m-level bipartite-graph code.
#[derive(Debug, Clone)]
pub struct MLExpanderCode {
    ctx: Arc<GFContext>,
    graph: MultilevelGraph,
    tower: NestedTower,
    aux: Vec<LinearCode>,
    right: Vec<LinearCode>,
    /// The per-level basic BG codes C_i on (V_0 u V_i, E_i; aux_i, B_i).
    level_bg: Vec<BGCode>,
}

impl MLExpanderCode {
    pub fn new(
        graph: MultilevelGraph,
        tower: NestedTower,
        aux: Vec<LinearCode>,
        right: Vec<LinearCode>,
    ) -> Result<MLExpanderCode, CodeError> {
        let m = graph.num_stages();
        if tower.num_levels() != m || aux.len() != m || right.len() != m {
            return Err(CodeError::Construction(format!(
                "level counts disagree: graph {m}, tower {}, aux {}, right {}",
                tower.num_levels(),
                aux.len(),
                right.len()
            )));
        }
        if tower.n() != graph.total_degree() {
            return Err(CodeError::Construction(format!(
                "tower length {} != total degree {}",
                tower.n(),
                graph.total_degree()
            )));
        }
        let ctx = tower.ctx().clone();
        for i in 0..m {
            if tower.level_dim(i) != graph.degree(i) {
                return Err(CodeError::Construction(format!(
                    "tower level {i} dimension {} != level degree {}",
                    tower.level_dim(i),
                    graph.degree(i)
                )));
            }
            if aux[i].n() != graph.degree(i) || right[i].n() != graph.degree(i) {
                return Err(CodeError::Construction(format!(
                    "aux/right code length at level {i} must equal the level degree {}",
                    graph.degree(i)
                )));
            }
            if aux[i].ctx().q() != ctx.q() || right[i].ctx().q() != ctx.q() {
                return Err(CodeError::Construction("component fields disagree".into()));
            }
        }
        let mut level_bg = Vec::with_capacity(m);
        for i in 0..m {
            level_bg.push(BGCode::new(graph.level(i).clone(), aux[i].clone(), right[i].clone())?);
        }
        Ok(MLExpanderCode { ctx, graph, tower, aux, right, level_bg })
    }

    pub fn ctx(&self) -> &Arc<GFContext> {
        &self.ctx
    }

    pub fn graph(&self) -> &MultilevelGraph {
        &self.graph
    }

    pub fn tower(&self) -> &NestedTower {
        &self.tower
    }

    pub fn num_stages(&self) -> usize {
        self.graph.num_stages()
    }

    pub fn level_code(&self, i: usize) -> &BGCode {
        &self.level_bg[i]
    }

    pub fn aux_code(&self, i: usize) -> &LinearCode {
        &self.aux[i]
    }

    pub fn right_code(&self, i: usize) -> &LinearCode {
        &self.right[i]
    }

    pub fn len_bits(&self) -> usize {
        self.graph.edge_count() * self.ctx.t() as usize
    }

    /// Message shape: q-ary dimension of each level's layer code.
    pub fn level_dims(&self) -> Vec<usize> {
        self.level_bg.iter().map(|c| c.dimension()).collect()
    }

    pub fn dim_q(&self) -> usize {
        self.level_bg.iter().map(|c| c.dimension()).sum()
    }

    /// Encodes per-level messages: each layer through its BG code, then all
    /// layers through the tower at every left vertex.
    pub fn encode(&self, level_msgs: &[Vec<Symbol>]) -> Result<Vec<Symbol>, CodeError> {
        let m = self.num_stages();
        if level_msgs.len() != m {
            return Err(CodeError::LengthMismatch { expected: m, got: level_msgs.len() });
        }
        let layers: Vec<Vec<Symbol>> = level_msgs
            .iter()
            .enumerate()
            .map(|(i, msg)| self.level_bg[i].encode(msg))
            .collect::<Result<_, _>>()?;
        self.assemble(&layers)
    }

    /// Rebuilds the codeword bits from per-level layers (each indexed by its
    /// level subgraph's edge ids).
    pub fn assemble(&self, layers: &[Vec<Symbol>]) -> Result<Vec<Symbol>, CodeError> {
        self.assemble_from(0, layers)
    }

    /// Rebuilds the contribution of levels `from_level..m` alone; the
    /// noisier prefix levels contribute nothing. This is the reference for
    /// the stage-stripping telescoping identity.
    pub fn assemble_from(
        &self,
        from_level: usize,
        layers: &[Vec<Symbol>],
    ) -> Result<Vec<Symbol>, CodeError> {
        let m = self.num_stages();
        if from_level + layers.len() != m {
            return Err(CodeError::LengthMismatch { expected: m - from_level, got: layers.len() });
        }
        let mut bits = vec![0 as Symbol; self.len_bits()];
        for v in 0..self.graph.n() {
            let parts: Vec<Vec<Symbol>> = layers
                .iter()
                .enumerate()
                .map(|(j, layer)| {
                    let d = self.graph.degree(from_level + j);
                    layer[v * d..(v + 1) * d].to_vec()
                })
                .collect();
            let x_v = self.tower.encode_levels(from_level, &parts)?;
            scatter_left_symbols(&self.graph, &self.ctx, &mut bits, v, &x_v);
        }
        Ok(bits)
    }

    /// Definition-style membership: every left word in the tower code with
    /// aux-valid layer messages, every level's layer word in its right code.
    pub fn is_member(&self, bits: &[Symbol]) -> bool {
        if bits.len() != self.len_bits() {
            return false;
        }
        let m = self.num_stages();
        let mut layers: Vec<Vec<Symbol>> =
            (0..m).map(|i| vec![0 as Symbol; self.graph.level(i).edge_count()]).collect();
        for v in 0..self.graph.n() {
            let local_bits = gather_left_bits(&self.graph, &self.ctx, bits, v);
            let x_v = pack_symbols(&self.ctx, &local_bits);
            let Ok(parts) = self.tower.split(0, &x_v) else {
                return false;
            };
            for i in 0..m {
                if !self.aux[i].contains(&parts[i]) {
                    return false;
                }
                let d = self.graph.degree(i);
                layers[i][v * d..(v + 1) * d].copy_from_slice(&parts[i]);
            }
        }
        for i in 0..m {
            let sub = self.graph.level(i);
            for w in 0..sub.n() {
                let word: Vec<Symbol> =
                    sub.right_edges(w).iter().map(|&e| layers[i][e as usize]).collect();
                if !self.right[i].contains(&word) {
                    return false;
                }
            }
        }
        true
    }

    /// Stage step 1: constrained reliabilities. For each level edge {v, w}
    /// and symbol b, the minimum bit distance from the residual at v to a
    /// codeword of the nested code A_level whose level message carries b at
    /// that coordinate.
    pub fn stage_reliabilities(
        &self,
        level: usize,
        residual: &[Symbol],
    ) -> Result<ReliabilityTable, CodeError> {
        let d = self.graph.degree(level);
        let q = self.ctx.q();
        let mut table = ReliabilityTable::new(self.graph.n(), d, q);
        let nested = self.tower.level_code(level);
        for v in 0..self.graph.n() {
            let local_bits = gather_left_bits(&self.graph, &self.ctx, residual, v);
            let dist = bit_dist_table(&self.ctx, &local_bits, nested.n());
            nested.for_each_codeword(|msg, cw| {
                let total: u32 = cw.iter().enumerate().map(|(j, &c)| dist[j * q + c as usize]).sum();
                // the level message is the leading block of the nested
                // code's message layout
                for j in 0..d {
                    table.observe(v, j, msg[j], total);
                }
            })?;
        }
        Ok(table)
    }

    /// Stage step 2: min-sum at the level's right vertices; returns the
    /// seeded layer word.
    pub fn stage_min_sum(
        &self,
        level: usize,
        table: &ReliabilityTable,
    ) -> Result<Vec<Symbol>, CodeError> {
        let sub = self.graph.level(level);
        let d = sub.degree();
        let mut seed = vec![0 as Symbol; sub.edge_count()];
        for w in 0..sub.n() {
            let edges = sub.right_edges(w);
            let best = min_sum_best(&self.right[level], |pos, b| {
                let e = edges[pos] as usize;
                table.cost(e / d, e % d, b)
            })?;
            for (pos, &e) in edges.iter().enumerate() {
                seed[e as usize] = best[pos];
            }
        }
        Ok(seed)
    }

    /// Stage step 3: basic iterations on the level's BG code.
    pub fn stage_basic(
        &self,
        level: usize,
        seed: &[Symbol],
        max_rounds: Option<usize>,
    ) -> Result<(Vec<Symbol>, bool), CodeError> {
        let r = self.level_bg[level].basic_decode(seed, max_rounds)?;
        Ok((r.word, r.converged))
    }

    /// Coset stripping: `residual_v += a_v G_level` for every left vertex.
    pub fn strip_level(
        &self,
        level: usize,
        residual: &mut [Symbol],
        layer: &[Symbol],
    ) -> Result<(), CodeError> {
        let d = self.graph.degree(level);
        let sub = self.graph.level(level);
        if layer.len() != sub.edge_count() {
            return Err(CodeError::LengthMismatch { expected: sub.edge_count(), got: layer.len() });
        }
        let t = self.ctx.t() as usize;
        for v in 0..self.graph.n() {
            let a_v = &layer[v * d..(v + 1) * d];
            let z_v = self.tower.block(level).vec_mul(a_v, &self.ctx);
            // xor the contribution onto v's edges in local order
            let mut idx = 0;
            for lvl in 0..self.graph.num_levels() {
                for e in self.graph.left_edges_at(lvl, v) {
                    for b in 0..t {
                        residual[e * t + b] ^= (z_v[idx] >> b) & 1;
                    }
                    idx += 1;
                }
            }
        }
        Ok(())
    }

    /// The m-stage decoder.
    pub fn decode(&self, y_bits: &[Symbol], cfg: MlDecodeConfig) -> Result<MlDecodeResult, CodeError> {
        if y_bits.len() != self.len_bits() {
            return Err(CodeError::LengthMismatch { expected: self.len_bits(), got: y_bits.len() });
        }
        let m = self.num_stages();
        let mut residual = y_bits.to_vec();
        let mut level_words: Vec<Option<Vec<Symbol>>> = vec![None; m];
        let mut stage_ok = vec![false; m];
        for level in 0..m {
            let table = self.stage_reliabilities(level, &residual)?;
            let seed = self.stage_min_sum(level, &table)?;
            let (word, converged) = self.stage_basic(level, &seed, cfg.max_rounds)?;
            stage_ok[level] = converged;
            self.strip_level(level, &mut residual, &word)?;
            level_words[level] = Some(word);
            if cfg.strict && !converged {
                break;
            }
        }
        let codeword = if level_words.iter().all(|w| w.is_some()) {
            let layers: Vec<Vec<Symbol>> =
                level_words.iter().map(|w| w.clone().unwrap()).collect();
            Some(self.assemble(&layers)?)
        } else {
            None
        };
        Ok(MlDecodeResult { level_words, stage_ok, residual, codeword })
    }

    /// Dimension of the full code from one monolithic elimination over the
    /// stacked Definition-style constraints, independent of the per-level
    /// layer structure. Used to validate the rate accounting.
    pub fn monolithic_dimension(&self) -> Result<usize, CodeError> {
        let m = self.num_stages();
        let delta = self.graph.total_degree();
        let ne = self.graph.edge_count();
        let full = self.tower.full_code();
        let k = full.k();
        // linear map x_v -> message (a_0, ..., a_{m-1}): select an
        // information set I and invert the generator on it
        let stacked = full.generator().clone();
        let (_, pivots) = linalg::rref(&stacked, &self.ctx);
        let g_i = stacked.select_columns(&pivots);
        let inv = linalg::invert(&g_i, &self.ctx).ok_or(CodeError::NotInformationSet)?;
        // w maps x (length delta) to the message (length k): w = E_I * inv
        let mut selector = Mat::zeros(delta, k);
        for (idx, &c) in pivots.iter().enumerate() {
            selector.set(c, idx, 1);
        }
        let w_full = selector.mat_mul(&inv, &self.ctx);
        // per-vertex edge layout in local order
        let edge_ids: Vec<Vec<usize>> = (0..self.graph.n())
            .map(|v| (0..self.graph.num_levels()).flat_map(|l| self.graph.left_edges_at(l, v)).collect())
            .collect();
        let h_left = full.parity_check();
        let mut rows: Vec<Vec<Symbol>> = Vec::new();
        for v in 0..self.graph.n() {
            for r in 0..h_left.rows() {
                let mut row = vec![0 as Symbol; ne];
                for (j, &e) in edge_ids[v].iter().enumerate() {
                    row[e] = h_left.get(r, j);
                }
                rows.push(row);
            }
        }
        let mut level_offset = 0;
        for i in 0..m {
            let d = self.graph.degree(i);
            let cols: Vec<usize> = (level_offset..level_offset + d).collect();
            let w_i = w_full.select_columns(&cols); // delta x d
            // aux parity on a_v^i = x_v * w_i, for every v
            let h_aux = self.aux[i].parity_check();
            let block = w_i.mat_mul(&h_aux.transpose(), &self.ctx); // delta x rows
            for v in 0..self.graph.n() {
                for r in 0..h_aux.rows() {
                    let mut row = vec![0 as Symbol; ne];
                    for (c, &e) in edge_ids[v].iter().enumerate() {
                        row[e] = block.get(c, r);
                    }
                    rows.push(row);
                }
            }
            // right parity on the layer word gathered at each w
            let h_right = self.right[i].parity_check();
            let sub = self.graph.level(i);
            for wv in 0..sub.n() {
                let edges = sub.right_edges(wv);
                for r in 0..h_right.rows() {
                    let mut row = vec![0 as Symbol; ne];
                    for (pos, &le) in edges.iter().enumerate() {
                        let hp = h_right.get(r, pos);
                        if hp == 0 {
                            continue;
                        }
                        let v = le as usize / d;
                        let local = le as usize % d;
                        // a_v^i[local] = sum_c x_v[c] w_i[c][local]
                        for (c, &e) in edge_ids[v].iter().enumerate() {
                            let coef = self.ctx.mul(hp, w_i.get(c, local));
                            if coef != 0 {
                                row[e] = self.ctx.add(row[e], coef);
                            }
                        }
                    }
                    rows.push(row);
                }
            }
            level_offset += d;
        }
        let constraints = Mat::from_rows(&rows);
        Ok(ne - linalg::rank(&constraints, &self.ctx))
    }

    /// Reported parameters with the rate-bound accounting and the design
    /// relative distance from verified component distances.
    pub fn params(&self) -> Result<MlParams, CodeError> {
        let m = self.num_stages();
        let n_bits = self.len_bits();
        let dim_q = self.dim_q();
        let delta = self.graph.total_degree() as f64;
        let rate = dim_q as f64 / (self.graph.n() as f64 * delta);
        let mut rate_bound = 0.0;
        let mut design = f64::INFINITY;
        for i in 0..m {
            let d_i = self.graph.degree(i) as f64;
            let r1 = self.right[i].rate();
            let raux = self.aux[i].rate();
            rate_bound += d_i / delta * (r1 + raux - 1.0);
            let nested = self.tower.level_code(i);
            let d0 = nested.min_distance_binary()? as f64;
            let delta0 = d0 / (self.tower.n() as f64 * self.ctx.t() as f64);
            let d1 = self.right[i].min_distance()? as f64;
            let delta1 = d1 / self.right[i].n() as f64;
            design = design.min(delta0 * delta1);
        }
        Ok(MlParams { n_bits, dim_q, rate, rate_bound, rate_slack: rate - rate_bound, design_rel_distance: design })
    }
}
