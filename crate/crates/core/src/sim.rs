//! BSC Monte Carlo harness: deterministic bit-flip channel, trial runner
//! with per-stage failure accounting and Wilson intervals, and the
//! exact-weight radius sweep.
//!
//! Reproducibility contract: every trial derives its own generator as
//! `ChaCha8Rng(seed = mix(master, trial_index))`, so trial sets are
//! order-independent and identical configs produce identical outputs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::code::CodeError;
use crate::expander::ModifiedBGCode;
use crate::field::Symbol;
use crate::multilevel::{MLExpanderCode, MlDecodeConfig};
use crate::serial::SerialCode;

/// splitmix64 finalizer; the seed-derivation mix.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Per-trial seed: hash of the master seed and the trial index.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index.wrapping_add(0x51ed2701)))
}

/// Flips each bit independently with probability p, deterministically for a
/// given seed.
pub fn bsc_transmit(bits: &[Symbol], p: f64, seed: u64) -> Vec<Symbol> {
    assert!((0.0..=0.5).contains(&p), "crossover probability {p} outside [0, 1/2]");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    bits.iter().map(|&b| if rng.gen::<f64>() < p { b ^ 1 } else { b }).collect()
}

/// Stage-failure accounting mode: strict aborts multilevel decoding at the
/// first flagged stage, diagnostic always runs every stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureMode {
    Strict,
    Diagnostic,
}

/// Any of the three decodable constructions, behind one trial interface.
/// A handful of these exist per process; the variant size spread is fine.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum CodeUnderTest {
    Serial(SerialCode),
    Single(ModifiedBGCode),
    Multilevel(MLExpanderCode),
}

/// Ground truth of one trial: the transmitted codeword plus whatever
/// per-stage reference data the construction exposes.
#[derive(Debug, Clone)]
pub struct Transmitted {
    pub codeword: Vec<Symbol>,
    /// Per-stage reference words (outer codewords / layer words / the full
    /// word for the single-level code).
    stage_truth: Vec<Vec<Symbol>>,
}

/// Outcome of one decoded trial.
#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub failed: bool,
    /// Which stages produced a wrong word (diagnostic attribution).
    pub stage_wrong: Vec<bool>,
    /// First stage the decoder itself flagged, if any.
    pub reported_first_fail: Option<usize>,
}

impl CodeUnderTest {
    pub fn n_bits(&self) -> usize {
        match self {
            CodeUnderTest::Serial(c) => c.n(),
            CodeUnderTest::Single(c) => c.len_bits(),
            CodeUnderTest::Multilevel(c) => c.len_bits(),
        }
    }

    pub fn num_stages(&self) -> usize {
        match self {
            CodeUnderTest::Serial(c) => c.num_levels(),
            CodeUnderTest::Single(_) => 1,
            CodeUnderTest::Multilevel(c) => c.num_stages(),
        }
    }

    /// Encodes a uniformly random message drawn from `rng`.
    pub fn random_transmission<R: Rng>(&self, rng: &mut R) -> Result<Transmitted, CodeError> {
        match self {
            CodeUnderTest::Serial(c) => {
                let u: Vec<Symbol> = (0..c.k()).map(|_| rng.gen_range(0..2) as Symbol).collect();
                let codeword = c.encode(&u)?;
                // reference outer codeword per level
                let mut stage_truth = Vec::with_capacity(c.num_levels());
                for level in 0..c.num_levels() {
                    let t_i = c.tower().level_dim(level);
                    let ctx = c.outer(level).ctx().clone();
                    let bits = &u[c.level_range(level)];
                    let msg: Vec<Symbol> = bits
                        .chunks(t_i)
                        .map(|ch| ctx.from_bits(ch).expect("chunked bits"))
                        .collect();
                    stage_truth.push(c.outer(level).encode(&msg)?);
                }
                Ok(Transmitted { codeword, stage_truth })
            }
            CodeUnderTest::Single(c) => {
                let msg: Vec<Symbol> =
                    (0..c.dimension()).map(|_| rng.gen_range(0..c.ctx().q()) as Symbol).collect();
                let codeword = c.encode(&msg)?;
                Ok(Transmitted { stage_truth: vec![codeword.clone()], codeword })
            }
            CodeUnderTest::Multilevel(c) => {
                let msgs: Vec<Vec<Symbol>> = c
                    .level_dims()
                    .iter()
                    .map(|&d| (0..d).map(|_| rng.gen_range(0..c.ctx().q()) as Symbol).collect())
                    .collect();
                let codeword = c.encode(&msgs)?;
                let stage_truth: Vec<Vec<Symbol>> = (0..c.num_stages())
                    .map(|i| c.level_code(i).encode(&msgs[i]))
                    .collect::<Result<_, _>>()?;
                Ok(Transmitted { codeword, stage_truth })
            }
        }
    }

    /// Decodes and attributes failures against the ground truth.
    pub fn run_trial(
        &self,
        tx: &Transmitted,
        received: &[Symbol],
        mode: FailureMode,
    ) -> Result<TrialOutcome, CodeError> {
        match self {
            CodeUnderTest::Serial(c) => {
                let res = c.decode(received)?;
                let stage_wrong: Vec<bool> = res
                    .stage_words
                    .iter()
                    .zip(&tx.stage_truth)
                    .map(|(got, want)| got != want)
                    .collect();
                Ok(TrialOutcome {
                    failed: stage_wrong.iter().any(|&b| b),
                    stage_wrong,
                    reported_first_fail: res.first_failed_stage,
                })
            }
            CodeUnderTest::Single(c) => {
                let res = c.decode(received, None)?;
                let wrong = res.word != tx.codeword;
                Ok(TrialOutcome {
                    failed: wrong,
                    stage_wrong: vec![wrong],
                    reported_first_fail: if res.converged { None } else { Some(0) },
                })
            }
            CodeUnderTest::Multilevel(c) => {
                let cfg = MlDecodeConfig {
                    max_rounds: None,
                    strict: mode == FailureMode::Strict,
                };
                let res = c.decode(received, cfg)?;
                let stage_wrong: Vec<bool> = res
                    .level_words
                    .iter()
                    .zip(&tx.stage_truth)
                    .map(|(got, want)| got.as_ref() != Some(want))
                    .collect();
                Ok(TrialOutcome {
                    failed: stage_wrong.iter().any(|&b| b),
                    stage_wrong,
                    reported_first_fail: res.stage_ok.iter().position(|&ok| !ok),
                })
            }
        }
    }
}

/// Aggregated results at one channel parameter.
#[derive(Debug, Clone)]
pub struct PointResult {
    pub p: f64,
    pub trials: u64,
    pub failures: u64,
    /// Trials whose first wrong stage was i.
    pub stage_first_wrong: Vec<u64>,
    /// Trials in which stage i was wrong at all.
    pub stage_any_wrong: Vec<u64>,
    pub p_hat: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    /// `-log2(p_hat) / N`, when failures were observed.
    pub exponent_estimate: Option<f64>,
}

/// Wilson 95% score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    if successes == 0 {
        // the closed form cancels to zero exactly; avoid the rounding dust
        let z2 = 1.959963984540054_f64.powi(2);
        return (0.0, z2 / (n as f64 + z2));
    }
    let z = 1.959963984540054_f64;
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = p + z2 / (2.0 * nf);
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    (((center - half) / denom).max(0.0), ((center + half) / denom).min(1.0))
}

/// Runs `trials` independent encode-transmit-decode trials at every p in
/// the grid. Trial t at grid point g uses the derived seed
/// `mix(master, g * trials + t)`; messages and noise come from that stream.
pub fn run_trials(
    code: &CodeUnderTest,
    p_grid: &[f64],
    trials: u64,
    master_seed: u64,
    mode: FailureMode,
) -> Result<Vec<PointResult>, CodeError> {
    let m = code.num_stages();
    let mut out = Vec::with_capacity(p_grid.len());
    for (gi, &p) in p_grid.iter().enumerate() {
        let mut failures = 0u64;
        let mut stage_first = vec![0u64; m];
        let mut stage_any = vec![0u64; m];
        for t in 0..trials {
            let seed = derive_seed(master_seed, gi as u64 * trials + t);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let tx = code.random_transmission(&mut rng)?;
            let y = bsc_transmit(&tx.codeword, p, splitmix64(seed));
            let outcome = code.run_trial(&tx, &y, mode)?;
            if outcome.failed {
                failures += 1;
                for (i, &w) in outcome.stage_wrong.iter().enumerate() {
                    if w {
                        stage_any[i] += 1;
                    }
                }
                if let Some(first) = outcome.stage_wrong.iter().position(|&w| w) {
                    stage_first[first] += 1;
                }
            }
        }
        let p_hat = failures as f64 / trials.max(1) as f64;
        let (lo, hi) = wilson_interval(failures, trials);
        let exponent = if failures > 0 {
            Some(-p_hat.log2() / code.n_bits() as f64)
        } else {
            None
        };
        out.push(PointResult {
            p,
            trials,
            failures,
            stage_first_wrong: stage_first,
            stage_any_wrong: stage_any,
            p_hat,
            wilson_low: lo,
            wilson_high: hi,
            exponent_estimate: exponent,
        });
    }
    Ok(out)
}

/// One row of a radius sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub weight: usize,
    pub attempts: u64,
    pub successes: u64,
    /// True when every weight-w pattern was enumerated instead of sampled.
    pub exhaustive: bool,
}

/// Success-rate-vs-error-weight table. Weights whose pattern count fits the
/// budget are enumerated exhaustively (on a fresh random codeword per
/// pattern index); larger weights get `patterns` uniformly random patterns.
pub fn radius_sweep(
    code: &CodeUnderTest,
    weights: &[usize],
    patterns: u64,
    master_seed: u64,
    exhaustive_budget: u64,
) -> Result<Vec<SweepRow>, CodeError> {
    let n = code.n_bits();
    let mut out = Vec::with_capacity(weights.len());
    for (wi, &w) in weights.iter().enumerate() {
        assert!(w <= n, "weight {w} exceeds length {n}");
        let count = binomial(n as u64, w as u64);
        let exhaustive = count.map(|c| c <= exhaustive_budget).unwrap_or(false);
        let mut successes = 0u64;
        let mut attempts = 0u64;
        if exhaustive {
            let mut positions: Vec<usize> = (0..w).collect();
            loop {
                let seed = derive_seed(master_seed, (wi as u64) << 40 | attempts);
                if run_pattern(code, &positions, seed)? {
                    successes += 1;
                }
                attempts += 1;
                if !next_combination(&mut positions, n) {
                    break;
                }
            }
        } else {
            for t in 0..patterns {
                let seed = derive_seed(master_seed, (wi as u64) << 40 | t);
                let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed));
                let positions = sample_positions(n, w, &mut rng);
                if run_pattern(code, &positions, seed)? {
                    successes += 1;
                }
                attempts += 1;
            }
        }
        out.push(SweepRow { weight: w, attempts, successes, exhaustive });
    }
    Ok(out)
}

fn run_pattern(code: &CodeUnderTest, positions: &[usize], seed: u64) -> Result<bool, CodeError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tx = code.random_transmission(&mut rng)?;
    let mut y = tx.codeword.clone();
    for &pos in positions {
        y[pos] ^= 1;
    }
    let outcome = code.run_trial(&tx, &y, FailureMode::Diagnostic)?;
    Ok(!outcome.failed)
}

fn binomial(n: u64, k: u64) -> Option<u64> {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)?;
        acc /= (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Advances to the next w-subset of {0..n}; false when exhausted.
fn next_combination(positions: &mut [usize], n: usize) -> bool {
    let w = positions.len();
    if w == 0 {
        return false;
    }
    let mut i = w;
    while i > 0 {
        i -= 1;
        if positions[i] < n - (w - i) {
            positions[i] += 1;
            for j in i + 1..w {
                positions[j] = positions[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn sample_positions<R: Rng>(n: usize, w: usize, rng: &mut R) -> Vec<usize> {
    // partial Fisher-Yates over indices
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..w {
        let j = rng.gen_range(i..n);
        idx.swap(i, j);
    }
    let mut picked = idx[..w].to_vec();
    picked.sort_unstable();
    picked
}

// ---- output emitters ----

/// CSV for the per-p results; stage columns expand with the stage count.
pub fn simulation_csv(results: &[PointResult]) -> String {
    let m = results.first().map_or(0, |r| r.stage_first_wrong.len());
    let mut s = String::from("p,trials,failures,p_hat,wilson_low,wilson_high,exponent");
    for i in 1..=m {
        s.push_str(&format!(",stage{i}_first,stage{i}_any"));
    }
    s.push('\n');
    for r in results {
        s.push_str(&format!(
            "{},{},{},{},{},{},{}",
            r.p,
            r.trials,
            r.failures,
            r.p_hat,
            r.wilson_low,
            r.wilson_high,
            r.exponent_estimate.map_or(String::new(), |e| e.to_string())
        ));
        for i in 0..m {
            s.push_str(&format!(",{},{}", r.stage_first_wrong[i], r.stage_any_wrong[i]));
        }
        s.push('\n');
    }
    s
}

/// Full-diagnostics JSON (hand-rolled; the schema is numeric throughout).
pub fn simulation_json(results: &[PointResult], master_seed: u64, mode: FailureMode) -> String {
    let mut s = String::from("{\n");
    s.push_str(&format!("  \"seed\": {master_seed},\n"));
    s.push_str(&format!(
        "  \"mode\": \"{}\",\n",
        match mode {
            FailureMode::Strict => "strict",
            FailureMode::Diagnostic => "diagnostic",
        }
    ));
    s.push_str("  \"points\": [\n");
    for (i, r) in results.iter().enumerate() {
        s.push_str(&format!(
            "    {{\"p\": {}, \"trials\": {}, \"failures\": {}, \"p_hat\": {}, \"wilson\": [{}, {}], \"exponent\": {}, \"stage_first\": {:?}, \"stage_any\": {:?}}}{}\n",
            r.p,
            r.trials,
            r.failures,
            r.p_hat,
            r.wilson_low,
            r.wilson_high,
            r.exponent_estimate.map_or("null".to_string(), |e| e.to_string()),
            r.stage_first_wrong,
            r.stage_any_wrong,
            if i + 1 < results.len() { "," } else { "" }
        ));
    }
    s.push_str("  ]\n}\n");
    s
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("weight,attempts,successes,success_rate,exhaustive\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            r.weight,
            r.attempts,
            r.successes,
            r.successes as f64 / r.attempts.max(1) as f64,
            r.exhaustive
        ));
    }
    s
}
