//! Generator-matrix linear codes over GF(2^t) with enumeration-based
//! minimum-distance search and maximum-likelihood decoding.
//!
//! Enumeration walks the message space in lexicographic order with an
//! odometer, updating the current codeword by one scaled generator row per
//! digit change, so a full sweep costs O(q^k * n) symbol operations.

use std::fmt;
use std::sync::{Arc, OnceLock};

use rand::Rng;

use crate::field::{GFContext, Symbol};
use crate::linalg::{self, Mat};

/// Messages spaces larger than this are refused by the enumeration routines.
pub const ENUM_BUDGET: u128 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodeError {
    LengthMismatch { expected: usize, got: usize },
    RankDeficient { rank: usize, expected: usize },
    BudgetExceeded { needed: u128, budget: u128 },
    NotInCode,
    BadCoordinates(String),
    NotInformationSet,
    Construction(String),
}

impl fmt::Display for CodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeError::LengthMismatch { expected, got } => {
                write!(f, "vector length {got}, expected {expected}")
            }
            CodeError::RankDeficient { rank, expected } => {
                write!(f, "generator matrix has rank {rank}, expected {expected}")
            }
            CodeError::BudgetExceeded { needed, budget } => {
                write!(f, "enumeration needs {needed} codewords, budget is {budget}")
            }
            CodeError::NotInCode => write!(f, "vector is not a codeword"),
            CodeError::BadCoordinates(s) => write!(f, "bad coordinate set: {s}"),
            CodeError::NotInformationSet => write!(f, "coordinates do not form an information set"),
            CodeError::Construction(s) => write!(f, "construction failed: {s}"),
        }
    }
}

impl std::error::Error for CodeError {}

/// Result of maximum-likelihood decoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MlDecoded {
    pub message: Vec<Symbol>,
    pub codeword: Vec<Symbol>,
    /// Hamming distance from the received word to `codeword`.
    pub distance: usize,
    /// Distance of the runner-up codeword minus `distance`; 0 when the
    /// decision is not unique. Used as a reliability weight downstream.
    pub gap: usize,
}

/// A `[n, k]` linear code over GF(2^t), held as a full-rank generator matrix.
#[derive(Debug)]
pub struct LinearCode {
    ctx: Arc<GFContext>,
    gen: Mat,
    distance: OnceLock<usize>,
}

impl Clone for LinearCode {
    fn clone(&self) -> Self {
        let d = OnceLock::new();
        if let Some(v) = self.distance.get() {
            let _ = d.set(*v);
        }
        LinearCode { ctx: self.ctx.clone(), gen: self.gen.clone(), distance: d }
    }
}

impl LinearCode {
    /// Wraps a generator matrix, rejecting rank-deficient ones.
    pub fn new(ctx: Arc<GFContext>, gen: Mat) -> Result<LinearCode, CodeError> {
        let r = linalg::rank(&gen, &ctx);
        if r != gen.rows() {
            return Err(CodeError::RankDeficient { rank: r, expected: gen.rows() });
        }
        Ok(LinearCode { ctx, gen, distance: OnceLock::new() })
    }

    /// Samples a random `[n, k]` code (full-rank generator), retrying on
    /// rank-deficient draws.
    pub fn random<R: Rng>(ctx: Arc<GFContext>, n: usize, k: usize, rng: &mut R) -> LinearCode {
        assert!(k <= n, "dimension exceeds length");
        let q = ctx.q();
        loop {
            let rows: Vec<Vec<Symbol>> =
                (0..k).map(|_| (0..n).map(|_| rng.gen_range(0..q) as Symbol).collect()).collect();
            let gen = Mat::from_rows(&rows);
            if let Ok(code) = LinearCode::new(ctx.clone(), gen) {
                return code;
            }
        }
    }

    pub fn ctx(&self) -> &Arc<GFContext> {
        &self.ctx
    }

    pub fn n(&self) -> usize {
        self.gen.cols()
    }

    pub fn k(&self) -> usize {
        self.gen.rows()
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n() as f64
    }

    pub fn generator(&self) -> &Mat {
        &self.gen
    }

    /// Number of codewords, if it fits the enumeration budget.
    pub fn codeword_count(&self) -> Result<u128, CodeError> {
        let mut count: u128 = 1;
        for _ in 0..self.k() {
            count = count.saturating_mul(self.ctx.q() as u128);
            if count > ENUM_BUDGET {
                return Err(CodeError::BudgetExceeded { needed: count, budget: ENUM_BUDGET });
            }
        }
        Ok(count)
    }

    pub fn encode(&self, msg: &[Symbol]) -> Result<Vec<Symbol>, CodeError> {
        if msg.len() != self.k() {
            return Err(CodeError::LengthMismatch { expected: self.k(), got: msg.len() });
        }
        Ok(self.gen.vec_mul(msg, &self.ctx))
    }

    /// Visits every (message, codeword) pair in lexicographic message order.
    pub fn for_each_codeword<F: FnMut(&[Symbol], &[Symbol])>(
        &self,
        mut f: F,
    ) -> Result<(), CodeError> {
        self.codeword_count()?;
        let q = self.ctx.q() as Symbol;
        let k = self.k();
        let mut msg = vec![0 as Symbol; k];
        let mut cw = vec![0 as Symbol; self.n()];
        f(&msg, &cw);
        loop {
            let mut j = k;
            while j > 0 && msg[j - 1] == q - 1 {
                j -= 1;
            }
            if j == 0 {
                return Ok(());
            }
            let j = j - 1;
            let old = msg[j];
            msg[j] = old + 1;
            self.add_scaled_row(&mut cw, j, old ^ (old + 1));
            for jj in j + 1..k {
                let rolled = msg[jj];
                msg[jj] = 0;
                self.add_scaled_row(&mut cw, jj, rolled);
            }
            f(&msg, &cw);
        }
    }

    fn add_scaled_row(&self, cw: &mut [Symbol], row: usize, scale: Symbol) {
        if scale == 0 {
            return;
        }
        let r = self.gen.row(row);
        if scale == 1 {
            for (c, &g) in cw.iter_mut().zip(r) {
                *c ^= g;
            }
        } else {
            for (c, &g) in cw.iter_mut().zip(r) {
                *c ^= self.ctx.mul(scale, g);
            }
        }
    }

    /// Exact minimum distance (symbol Hamming weight) by enumeration.
    /// The result is cached; construction never pays for it up front.
    pub fn min_distance(&self) -> Result<usize, CodeError> {
        if let Some(&d) = self.distance.get() {
            return Ok(d);
        }
        let mut best = self.n() + 1;
        self.for_each_codeword(|msg, cw| {
            if msg.iter().all(|&m| m == 0) {
                return;
            }
            let w = cw.iter().filter(|&&s| s != 0).count();
            if w < best {
                best = w;
            }
        })?;
        let _ = self.distance.set(best);
        Ok(best)
    }

    /// Minimum number of nonzero *bits* over all nonzero codewords: the
    /// distance of the binary image of a q-ary code.
    pub fn min_distance_binary(&self) -> Result<usize, CodeError> {
        if self.ctx.t() == 1 {
            return self.min_distance();
        }
        let mut best = self.n() * self.ctx.t() as usize + 1;
        self.for_each_codeword(|msg, cw| {
            if msg.iter().all(|&m| m == 0) {
                return;
            }
            let w: usize = cw.iter().map(|&s| s.count_ones() as usize).sum();
            if w < best {
                best = w;
            }
        })?;
        Ok(best)
    }

    /// Records an externally verified minimum distance.
    pub fn set_verified_distance(&self, d: usize) {
        let _ = self.distance.set(d);
    }

    pub fn cached_distance(&self) -> Option<usize> {
        self.distance.get().copied()
    }

    /// Maximum-likelihood decoding in the symbol Hamming metric, by full
    /// enumeration. Ties break to the lexicographically smallest message.
    pub fn ml_decode(&self, received: &[Symbol]) -> Result<MlDecoded, CodeError> {
        if received.len() != self.n() {
            return Err(CodeError::LengthMismatch { expected: self.n(), got: received.len() });
        }
        let mut best: Option<(Vec<Symbol>, Vec<Symbol>, usize)> = None;
        let mut second = usize::MAX;
        self.for_each_codeword(|msg, cw| {
            let d = cw.iter().zip(received).filter(|(a, b)| a != b).count();
            match &best {
                None => best = Some((msg.to_vec(), cw.to_vec(), d)),
                Some((_, _, bd)) => {
                    if d < *bd {
                        second = *bd;
                        best = Some((msg.to_vec(), cw.to_vec(), d));
                    } else if d < second {
                        second = d;
                    }
                }
            }
        })?;
        let (message, codeword, distance) = best.expect("code has at least the zero codeword");
        let gap = if second == usize::MAX { 0 } else { second - distance };
        Ok(MlDecoded { message, codeword, distance, gap })
    }

    pub fn contains(&self, word: &[Symbol]) -> bool {
        word.len() == self.n() && linalg::solve_row_space(&self.gen, word, &self.ctx).is_some()
    }

    /// Recovers the message of a codeword, if it is one.
    pub fn message_of(&self, codeword: &[Symbol]) -> Result<Vec<Symbol>, CodeError> {
        if codeword.len() != self.n() {
            return Err(CodeError::LengthMismatch { expected: self.n(), got: codeword.len() });
        }
        linalg::solve_row_space(&self.gen, codeword, &self.ctx).ok_or(CodeError::NotInCode)
    }

    /// True iff the k columns at `coords` are nonsingular.
    pub fn is_information_set(&self, coords: &[usize]) -> Result<bool, CodeError> {
        if coords.len() != self.k() {
            return Err(CodeError::BadCoordinates(format!(
                "need exactly k={} coordinates, got {}",
                self.k(),
                coords.len()
            )));
        }
        if coords.iter().any(|&c| c >= self.n()) {
            return Err(CodeError::BadCoordinates("coordinate out of range".into()));
        }
        let sub = self.gen.select_columns(coords);
        Ok(linalg::rank(&sub, &self.ctx) == self.k())
    }

    /// The map taking values on an information set to the full codeword:
    /// `(G_I)^{-1} G`. Row i corresponds to coordinate `coords[i]`.
    pub fn systematic_map(&self, coords: &[usize]) -> Result<Mat, CodeError> {
        if !self.is_information_set(coords)? {
            return Err(CodeError::NotInformationSet);
        }
        let gi = self.gen.select_columns(coords);
        let inv = linalg::invert(&gi, &self.ctx).ok_or(CodeError::NotInformationSet)?;
        Ok(inv.mat_mul(&self.gen, &self.ctx))
    }

    /// Parity-check matrix, derived on demand by elimination.
    pub fn parity_check(&self) -> Mat {
        linalg::parity_from_generator(&self.gen, &self.ctx)
    }
}

/// Hamming distance between equal-length symbol vectors.
pub fn hamming(a: &[Symbol], b: &[Symbol]) -> usize {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}
