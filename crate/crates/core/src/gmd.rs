//! Generalized Minimum Distance decoding over an errors-and-erasures decoder.
//!
//! The trial schedule erases the j least reliable positions for
//! j = 0, 2, 4, ..., up to d-1, and the winner is the trial candidate with
//! the smallest reliability-weighted discrepancy from the received word.

use crate::code::{CodeError, LinearCode};
use crate::field::Symbol;
use crate::reed_solomon::ReedSolomonCode;

/// An outer code usable at a concatenation level: Reed-Solomon with algebraic
/// errors-and-erasures decoding, or a small generic linear code decoded by
/// enumeration within the same bounded-distance contract (a candidate is
/// returned only when it satisfies `2e + s < d`, so callers can treat a
/// `None` from either variant as the same event).
#[derive(Debug, Clone)]
pub enum OuterCode {
    ReedSolomon(ReedSolomonCode),
    Generic(LinearCode),
}

impl OuterCode {
    pub fn ctx(&self) -> &std::sync::Arc<crate::field::GFContext> {
        match self {
            OuterCode::ReedSolomon(c) => c.ctx(),
            OuterCode::Generic(c) => c.ctx(),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            OuterCode::ReedSolomon(c) => c.n(),
            OuterCode::Generic(c) => c.n(),
        }
    }

    pub fn k(&self) -> usize {
        match self {
            OuterCode::ReedSolomon(c) => c.k(),
            OuterCode::Generic(c) => c.k(),
        }
    }

    pub fn distance(&self) -> Result<usize, CodeError> {
        match self {
            OuterCode::ReedSolomon(c) => Ok(c.distance()),
            OuterCode::Generic(c) => c.min_distance(),
        }
    }

    pub fn encode(&self, msg: &[Symbol]) -> Result<Vec<Symbol>, CodeError> {
        match self {
            OuterCode::ReedSolomon(c) => c.encode(msg),
            OuterCode::Generic(c) => c.encode(msg),
        }
    }

    pub fn message_of(&self, codeword: &[Symbol]) -> Result<Vec<Symbol>, CodeError> {
        match self {
            OuterCode::ReedSolomon(c) => c.message_of(codeword),
            OuterCode::Generic(c) => c.message_of(codeword),
        }
    }

    /// Errors-and-erasures decoding with the `2e + s < d` guarantee.
    pub fn decode_errors_erasures(
        &self,
        received: &[Symbol],
        erasures: &[usize],
    ) -> Result<Option<Vec<Symbol>>, CodeError> {
        match self {
            OuterCode::ReedSolomon(c) => c.decode_errors_erasures(received, erasures),
            OuterCode::Generic(c) => {
                if received.len() != c.n() {
                    return Err(CodeError::LengthMismatch {
                        expected: c.n(),
                        got: received.len(),
                    });
                }
                let mut erased = vec![false; c.n()];
                for &e in erasures {
                    if e >= c.n() {
                        return Err(CodeError::BadCoordinates("erasure index out of range".into()));
                    }
                    erased[e] = true;
                }
                let d = c.min_distance()?;
                let s = erased.iter().filter(|&&b| b).count();
                // nearest codeword on the non-erased coordinates
                let mut best: Option<(Vec<Symbol>, usize)> = None;
                c.for_each_codeword(|_, cw| {
                    let e = cw
                        .iter()
                        .zip(received)
                        .zip(&erased)
                        .filter(|((a, b), &er)| !er && a != b)
                        .count();
                    if best.as_ref().is_none_or(|(_, be)| e < *be) {
                        best = Some((cw.to_vec(), e));
                    }
                })?;
                let (cw, e) = best.expect("nonempty code");
                Ok(if 2 * e + s < d { Some(cw) } else { None })
            }
        }
    }
}

/// GMD decoding: errors-and-erasures trials over the even erasure schedule,
/// returning the candidate with minimum weighted discrepancy, or `None` when
/// every trial fails.
///
/// Reliabilities are nonnegative, larger = more trusted; ties in the
/// least-reliable ordering break by position index for determinism.
pub fn gmd_decode(
    code: &OuterCode,
    received: &[Symbol],
    reliabilities: &[f64],
) -> Result<Option<Vec<Symbol>>, CodeError> {
    let n = code.n();
    if received.len() != n {
        return Err(CodeError::LengthMismatch { expected: n, got: received.len() });
    }
    if reliabilities.len() != n {
        return Err(CodeError::LengthMismatch { expected: n, got: reliabilities.len() });
    }
    if reliabilities.iter().any(|&r| !r.is_finite() || r < 0.0) {
        return Err(CodeError::BadCoordinates(
            "reliabilities must be finite and nonnegative".into(),
        ));
    }
    let d = code.distance()?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| reliabilities[a].partial_cmp(&reliabilities[b]).unwrap().then(a.cmp(&b)));
    let mut best: Option<(Vec<Symbol>, f64)> = None;
    let mut j = 0;
    while j < d {
        let erasures = &order[..j];
        if let Some(cand) = code.decode_errors_erasures(received, erasures)? {
            let discrepancy: f64 = cand
                .iter()
                .zip(received)
                .zip(reliabilities)
                .filter(|((a, b), _)| a != b)
                .map(|(_, &r)| r)
                .sum();
            if best.as_ref().is_none_or(|(_, bd)| discrepancy < *bd) {
                best = Some((cand, discrepancy));
            }
        }
        j += 2;
    }
    Ok(best.map(|(cw, _)| cw))
}
