//! Acceptance suite. Every criterion runs sequentially inside one test so
//! the per-criterion wall-clock budgets are meaningful on a quiet machine,
//! and one PASS/FAIL line prints per criterion (run with
//! `cargo test --test acceptance -- --nocapture` to see them).

#![allow(clippy::needless_range_loop)]

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mlec::bounds::{
    bz_distance, bz_rate, forney_exponent, gv_distance, m_level_distance, multilevel_exponent,
    zyablov_distance, ChannelParams, NumericSettings,
};
use mlec::code::LinearCode;
use mlec::expander::ModifiedBGCode;
use mlec::field::{GFContext, Symbol};
use mlec::gmd::{gmd_decode, OuterCode};
use mlec::graph::build_multilevel_graph;
use mlec::linalg::Mat;
use mlec::multilevel::{MLExpanderCode, MlDecodeConfig};
use mlec::reed_solomon::ReedSolomonCode;
use mlec::serial::SerialCode;
use mlec::sim::{
    run_trials, simulation_csv, simulation_json, CodeUnderTest, FailureMode,
};
use mlec::tower::{build_systematic_tower, build_tower, DistanceMetric};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn assert_close(a: f64, b: f64, tol: f64, what: &str) {
    assert!((a - b).abs() <= tol, "{what}: {a} vs {b} (tol {tol})");
}

/// Brute-force grid maximizer over [a, b] with `points` intervals, split
/// across two worker threads.
fn oracle_grid_max<F: Fn(f64) -> f64 + Sync>(f: F, a: f64, b: f64, points: usize) -> (f64, f64) {
    let half = points / 2;
    let scan = |lo: usize, hi: usize| {
        let mut best = (f64::NEG_INFINITY, a);
        for i in lo..=hi {
            let x = a + (b - a) * i as f64 / points as f64;
            let v = f(x);
            if v > best.0 {
                best = (v, x);
            }
        }
        best
    };
    let (left, right) = std::thread::scope(|s| {
        let h = s.spawn(|| scan(0, half));
        let r = scan(half + 1, points);
        (h.join().expect("oracle worker"), r)
    });
    if left.0 >= right.0 {
        left
    } else {
        right
    }
}

// ---- criterion 1: bounds engine ----

fn c1_bounds_engine() {
    let s = NumericSettings::default();
    let eps = 1e-8;
    let r_grid = [0.1, 0.2, 0.3];
    let p_grid = [0.01, 0.02, 0.05];
    for &p in &p_grid {
        let ch = ChannelParams::new(p).unwrap();
        // continuity across both breakpoints to 1e-6
        for b in [ch.r_x, ch.r_crit] {
            let jump = (ch.e0(b - eps).unwrap() - ch.e0(b + eps).unwrap()).abs();
            assert!(jump <= 1e-6, "E0 jump {jump} at breakpoint {b}, p = {p}");
        }
        // E0 at capacity
        assert!(ch.e0(ch.capacity).unwrap().abs() <= 1e-9, "E0(C) != 0 at p = {p}");
        for &r in &r_grid {
            // m = 1 reduces to the Forney bound
            let f = forney_exponent(&ch, r, &s).unwrap();
            let m1 = multilevel_exponent(&ch, 1, r, &s).unwrap();
            assert_close(f.value, m1.value, 1e-9, "E^(1) vs Forney");
            // strict monotonicity through m = 6
            let mut prev = 0.0;
            for m in 1..=7u32 {
                let v = multilevel_exponent(&ch, m, r, &s).unwrap().value;
                assert!(
                    v > prev,
                    "E^({m}) = {v} not above E^({}) = {prev} at (R={r}, p={p})",
                    m - 1
                );
                prev = v;
            }
            // every maximizer against the 10^6-point grid oracle
            let hi = ch.capacity - 1e-6;
            let (ov, oa) = oracle_grid_max(
                |r0| ch.e0(r0).unwrap() * (1.0 - r / r0),
                r,
                ch.capacity,
                1_000_000,
            );
            assert_close(f.value, ov, 1e-6, "Forney value vs oracle");
            assert_close(f.argmax, oa, 1e-6, "Forney argmax vs oracle");
            for m in 1..=6u32 {
                let got = multilevel_exponent(&ch, m, r, &s).unwrap();
                let (ov, oa) = oracle_grid_max(
                    |r0| {
                        let mut inv = 0.0;
                        for i in 1..=m {
                            inv += 1.0 / ch.e0(i as f64 * r0 / m as f64).unwrap();
                        }
                        (r0 - r) / (r0 / m as f64 * inv)
                    },
                    r,
                    hi,
                    1_000_000,
                );
                assert_close(got.value, ov, 1e-6, &format!("E^({m}) value vs oracle"));
                assert_close(got.argmax, oa, 1e-6, &format!("E^({m}) argmax vs oracle"));
            }
        }
    }
}

// ---- criterion 2: distance-bound ordering ----

fn c2_distance_bounds() {
    let s = NumericSettings::default();
    for i in 1..=19 {
        let r = 0.05 * i as f64;
        let z = zyablov_distance(r, &s).unwrap().value;
        let bz = bz_distance(r, &s).unwrap();
        let gv = gv_distance(r).unwrap();
        let mut prev = z;
        for m in [2u32, 4, 8, 16] {
            let dm = m_level_distance(m, r, &s).unwrap().value;
            assert!(dm + 1e-9 >= prev, "delta^({m}) decreased at R = {r}");
            assert!(z <= dm + 1e-9, "delta^({m}) below Zyablov at R = {r}");
            assert!(dm <= bz + 1e-9, "delta^({m}) above Blokh-Zyablov at R = {r}");
            prev = dm;
        }
        assert!(z <= bz + 1e-9, "ordering Z <= BZ at R = {r}");
        assert!(bz <= gv + 1e-9, "ordering BZ <= GV at R = {r}");
    }
    for delta in [0.05, 0.1, 0.2] {
        let r = bz_rate(delta, &s).unwrap();
        let back = bz_distance(r, &s).unwrap();
        assert_close(back, delta, 1e-8, "bz_rate/bz_distance round trip");
    }
}

// ---- criterion 3: fields, RS distances, EE and GMD decoding ----

fn c3_codes() {
    // field axioms, exhaustively for every q <= 256
    for t in 1..=8u32 {
        let ctx = GFContext::new(t).unwrap();
        let q = ctx.q() as Symbol;
        for a in 0..q {
            assert_eq!(ctx.add(a, a), 0);
            if a != 0 {
                assert_eq!(ctx.mul(a, ctx.inv(a)), 1);
            }
            for b in 0..q {
                for c in 0..q {
                    assert_eq!(ctx.mul(ctx.mul(a, b), c), ctx.mul(a, ctx.mul(b, c)));
                    assert_eq!(
                        ctx.mul(a, ctx.add(b, c)),
                        ctx.add(ctx.mul(a, b), ctx.mul(a, c))
                    );
                }
            }
        }
    }
    // RS brute-forced distance = n - k + 1 for n <= 15 (within the
    // enumeration budget q^k <= 2^24)
    let gf4 = Arc::new(GFContext::new(2).unwrap());
    let gf8 = Arc::new(GFContext::new(3).unwrap());
    let gf16 = Arc::new(GFContext::new(4).unwrap());
    let cases: Vec<(Arc<GFContext>, usize, usize)> = vec![
        (gf4.clone(), 3, 1),
        (gf4, 3, 2),
        (gf8.clone(), 5, 2),
        (gf8.clone(), 7, 1),
        (gf8.clone(), 7, 3),
        (gf8.clone(), 7, 5),
        (gf16.clone(), 15, 2),
        (gf16.clone(), 15, 4),
        (gf16, 15, 6),
    ];
    for (ctx, n, k) in cases {
        let rs = ReedSolomonCode::new(ctx, n, k).unwrap();
        assert_eq!(
            rs.as_linear().min_distance().unwrap(),
            n - k + 1,
            "RS[{n},{k}] distance"
        );
    }
    // RS[7,3,5] corrects every <=2-error pattern, over all codewords
    let gf8 = Arc::new(GFContext::new(3).unwrap());
    let rs = ReedSolomonCode::new(gf8, 7, 3).unwrap();
    rs.as_linear()
        .for_each_codeword(|_, cw| {
            for i in 0..7 {
                for e1 in 1..8 as Symbol {
                    let mut y = cw.to_vec();
                    y[i] ^= e1;
                    assert_eq!(
                        rs.decode_errors_erasures(&y, &[]).unwrap().as_deref(),
                        Some(cw),
                        "single error at {i}"
                    );
                    for j in i + 1..7 {
                        for e2 in 1..8 as Symbol {
                            let mut y2 = y.clone();
                            y2[j] ^= e2;
                            assert_eq!(
                                rs.decode_errors_erasures(&y2, &[]).unwrap().as_deref(),
                                Some(cw),
                                "errors at {i},{j}"
                            );
                        }
                    }
                }
            }
        })
        .unwrap();
    // GMD corrects every constructed instance below the 2e + s < d threshold
    let outer = OuterCode::ReedSolomon(rs);
    let mut r = rng(303);
    for e in 0..=2usize {
        for s in 0..5usize {
            if 2 * e + s >= 5 {
                continue;
            }
            for _ in 0..20 {
                let msg: Vec<Symbol> = (0..3).map(|_| r.gen_range(0..8) as Symbol).collect();
                let cw = outer.encode(&msg).unwrap();
                let mut y = cw.clone();
                let mut rel = vec![1.0; 7];
                let mut pos: Vec<usize> = (0..7).collect();
                for i in 0..7 {
                    let j = r.gen_range(i..7);
                    pos.swap(i, j);
                }
                // s least-reliable positions, corrupted or not; e full-
                // reliability errors elsewhere
                for (rank, &p) in pos[..s].iter().enumerate() {
                    rel[p] = 0.001 * (rank + 1) as f64;
                    if r.gen_bool(0.7) {
                        y[p] ^= r.gen_range(1..8) as Symbol;
                    }
                }
                for &p in &pos[s..s + e] {
                    y[p] ^= r.gen_range(1..8) as Symbol;
                }
                let got = gmd_decode(&outer, &y, &rel).unwrap();
                assert_eq!(got.as_deref(), Some(cw.as_slice()), "GMD at e={e}, s={s}");
            }
        }
    }
}

// ---- criterion 4: tower and direct-sum structure ----

fn c4_tower_direct_sum() {
    let binary = Arc::new(GFContext::binary());
    // verified nested distances, re-checked by independent enumeration
    let targets = [4usize, 6];
    let tower = build_tower(
        binary.clone(),
        12,
        &[2, 2],
        &targets,
        2000,
        DistanceMetric::Symbol,
        &mut rng(41),
    )
    .unwrap();
    for level in 0..2 {
        let refs: Vec<&Mat> = (level..2).map(|l| tower.block(l)).collect();
        let fresh = LinearCode::new(binary.clone(), Mat::stack(&refs)).unwrap();
        let d = fresh.min_distance().unwrap();
        assert!(d >= targets[level], "level {level}: d = {d} below target");
        assert_eq!(d, tower.verified_distances().unwrap()[level]);
    }
    // direct-sum split round-trips every codeword (16-bit tower)
    let big = build_tower(
        binary.clone(),
        24,
        &[6, 6, 4],
        &[2, 3, 6],
        4000,
        DistanceMetric::Symbol,
        &mut rng(42),
    )
    .unwrap();
    assert_eq!(big.total_dim(), 16);
    let full = big.full_code();
    full.for_each_codeword(|msg, cw| {
        let parts = big.split(0, cw).unwrap();
        let mut flat = Vec::new();
        for p in &parts {
            flat.extend_from_slice(p);
        }
        assert_eq!(flat, msg);
        assert_eq!(big.encode_levels(0, &parts).unwrap(), cw);
    })
    .unwrap();
    // serial code enumeration equals the direct sum of the per-level
    // concatenations
    let tower = build_tower(
        binary,
        10,
        &[2, 2],
        &[3, 4],
        2000,
        DistanceMetric::Symbol,
        &mut rng(43),
    )
    .unwrap();
    let gf4 = Arc::new(GFContext::new(2).unwrap());
    let outers = vec![
        OuterCode::ReedSolomon(ReedSolomonCode::new(gf4.clone(), 3, 2).unwrap()),
        OuterCode::ReedSolomon(ReedSolomonCode::new(gf4.clone(), 3, 1).unwrap()),
    ];
    let code = SerialCode::new(tower, outers).unwrap();
    assert_eq!(code.k(), 6);
    let mut serial_set = std::collections::BTreeSet::new();
    for msg in 0u32..(1 << code.k()) {
        let bits: Vec<Symbol> = (0..code.k()).map(|i| ((msg >> i) & 1) as Symbol).collect();
        serial_set.insert(code.encode(&bits).unwrap());
    }
    let mut level_sets: Vec<Vec<Vec<Symbol>>> = Vec::new();
    for level in 0..2 {
        let outer = code.outer(level);
        let mut words = Vec::new();
        let lin = match outer {
            OuterCode::ReedSolomon(c) => c.as_linear().clone(),
            OuterCode::Generic(c) => c.clone(),
        };
        lin.for_each_codeword(|_, b| {
            let mut w = vec![0 as Symbol; code.n()];
            for (j, &sym) in b.iter().enumerate() {
                let bits = gf4.to_bits(sym);
                let col = code.tower().block(level).vec_mul(&bits, code.tower().ctx());
                for (row, &c) in col.iter().enumerate() {
                    w[j * code.n0() + row] = c;
                }
            }
            words.push(w);
        })
        .unwrap();
        level_sets.push(words);
    }
    let mut sum_set = std::collections::BTreeSet::new();
    for w0 in &level_sets[0] {
        for w1 in &level_sets[1] {
            let sum: Vec<Symbol> = w0.iter().zip(w1).map(|(a, b)| a ^ b).collect();
            sum_set.insert(sum);
        }
    }
    assert_eq!(serial_set, sum_set, "C must equal the direct sum of the level concatenations");
}

// ---- criterion 5: serial decoder ----

fn serial_test_instance() -> SerialCode {
    let binary = Arc::new(GFContext::binary());
    let tower = build_tower(
        binary,
        12,
        &[3, 3],
        &[4, 6],
        4000,
        DistanceMetric::Symbol,
        &mut rng(51),
    )
    .unwrap();
    let gf8 = Arc::new(GFContext::new(3).unwrap());
    let outers = vec![
        OuterCode::ReedSolomon(ReedSolomonCode::new(gf8.clone(), 7, 1).unwrap()),
        OuterCode::ReedSolomon(ReedSolomonCode::new(gf8, 7, 3).unwrap()),
    ];
    SerialCode::new(tower, outers).unwrap()
}

fn c5_serial_decoder() {
    let code = serial_test_instance();
    let mut r = rng(52);
    // noiseless round trips with zero final residual
    for _ in 0..50 {
        let u: Vec<Symbol> = (0..code.k()).map(|_| r.gen_range(0..2) as Symbol).collect();
        let cw = code.encode(&u).unwrap();
        let res = code.decode(&cw).unwrap();
        assert_eq!(res.message, u);
        assert!(res.stage_ok.iter().all(|&b| b));
        assert!(res.residual.iter().all(|&b| b == 0), "telescoping left a residual");
    }
    // every error pattern confined to fewer than min_i d_{1,i}/2 = 2.5
    // columns, exhaustively over column subsets of size <= 2, with several
    // adversarial fills per subset
    let n0 = code.n0();
    let fills = |cols: &[usize], variant: u64| -> Vec<(usize, Vec<Symbol>)> {
        let mut out = Vec::new();
        let mut fr = rng(0x5EED ^ variant);
        for &c in cols {
            let pattern: Vec<Symbol> = match variant {
                0 => vec![1; n0],
                1 => (0..n0).map(|i| (i % 2) as Symbol).collect(),
                _ => (0..n0).map(|_| fr.gen_range(0..2) as Symbol).collect(),
            };
            out.push((c, pattern));
        }
        out
    };
    let u: Vec<Symbol> = (0..code.k()).map(|_| r.gen_range(0..2) as Symbol).collect();
    let cw = code.encode(&u).unwrap();
    let mut subsets: Vec<Vec<usize>> = vec![vec![]];
    for a in 0..7 {
        subsets.push(vec![a]);
        for b in a + 1..7 {
            subsets.push(vec![a, b]);
        }
    }
    for cols in &subsets {
        for variant in 0..4u64 {
            if cols.is_empty() && variant > 0 {
                continue;
            }
            let mut y = cw.clone();
            let mut nonzero = false;
            for (c, pattern) in fills(cols, variant) {
                for (row, &bit) in pattern.iter().enumerate() {
                    if bit == 1 {
                        y[c * n0 + row] ^= 1;
                        nonzero = true;
                    }
                }
            }
            if !cols.is_empty() && !nonzero {
                continue;
            }
            let res = code.decode(&y).unwrap();
            assert_eq!(
                res.message, u,
                "confined errors in columns {cols:?} (fill {variant}) not corrected"
            );
        }
    }
}

// ---- criterion 6: single-level expander codes ----

fn c6_expander() {
    // K_{3,3} with parity codes: dimension by rank vs full enumeration
    let binary = Arc::new(GFContext::binary());
    let parity3 = {
        let rows = vec![vec![1, 0, 1], vec![0, 1, 1]];
        LinearCode::new(binary.clone(), Mat::from_rows(&rows)).unwrap()
    };
    let g = mlec::graph::random_biregular(3, 3, &mut rng(61)).unwrap();
    let bg = mlec::expander::BGCode::new(g, parity3.clone(), parity3).unwrap();
    let mut members = std::collections::BTreeSet::new();
    for word in 0u32..(1 << 9) {
        let bits: Vec<Symbol> = (0..9).map(|i| ((word >> i) & 1) as Symbol).collect();
        if bg.is_member(&bits) {
            members.insert(bits);
        }
    }
    assert_eq!(members.len(), 1usize << bg.dimension(), "rank vs enumeration");
    let lin = LinearCode::new(bg.ctx().clone(), bg.generator().clone()).unwrap();
    lin.for_each_codeword(|_, cw| {
        assert!(members.contains(cw));
        let r = bg.basic_decode(cw, None).unwrap();
        assert!(r.converged && r.rounds == 1 && r.word == cw, "codewords are fixed points");
    })
    .unwrap();

    // the modified construction on a complete expander level (lambda = 0)
    let gf8 = Arc::new(GFContext::new(3).unwrap());
    let mut r = rng(62);
    let graph = build_multilevel_graph(4, &[4, 2], 3.0, 200, &mut r).unwrap();
    assert!(graph.level(0).lambda() < 1e-7, "K_{{4,4}} level must have lambda 0");
    let tower = build_systematic_tower(
        gf8.clone(),
        &[4],
        2,
        &[3],
        20000,
        DistanceMetric::Symbol,
        &mut r,
    )
    .unwrap();
    let left = tower.full_code();
    let right = ReedSolomonCode::new(gf8.clone(), 4, 2).unwrap().as_linear().clone();
    let aux = ReedSolomonCode::new(gf8, 4, 3).unwrap().as_linear().clone();
    let code = ModifiedBGCode::new(graph, left, right, aux).unwrap();
    let dim = code.dimension();
    assert!(dim > 0);

    // noiseless decode and all single-edge errors (every nonzero pattern on
    // the 3 bits of one edge, which covers all single-bit errors)
    let mut msg: Vec<Symbol> = (0..dim).map(|i| ((i * 5 + 2) % 8) as Symbol).collect();
    msg[0] = 1;
    let word = code.encode(&msg).unwrap();
    assert!(code.is_member(&word));
    let clean = code.decode(&word, None).unwrap();
    assert!(clean.converged);
    assert_eq!(clean.word, word);
    let t = 3;
    let edges = code.graph().edge_count();
    for e in 0..edges {
        for delta in 1..8u16 {
            let mut y = word.clone();
            for b in 0..t {
                y[e * t + b] ^= (delta >> b) & 1;
            }
            let res = code.decode(&y, None).unwrap();
            assert!(res.converged, "edge {e} delta {delta} did not converge");
            assert_eq!(res.word, word, "edge {e} delta {delta} miscorrected");
        }
    }

    // brute-forced binary distance meets the theorem bound with measured
    // lambda (= 0 here, so the degradation factors drop out)
    let bound = code.theorem_distance_bound().unwrap();
    assert!(bound > 0.0, "instance must make the bound informative");
    // binary image basis: every q-ary basis message scaled by each power
    // of the field generator
    let t_bits = code.ctx().t() as usize;
    let mut rows = Vec::new();
    for i in 0..dim {
        for s in 0..t_bits {
            let mut m = vec![0 as Symbol; dim];
            m[i] = code.ctx().alpha_pow(s);
            rows.push(code.encode(&m).unwrap());
        }
    }
    let as_linear =
        LinearCode::new(Arc::new(GFContext::binary()), Mat::from_rows(&rows)).unwrap();
    let d_bin = as_linear.min_distance().unwrap();
    assert!(
        d_bin as f64 >= bound,
        "measured distance {d_bin} below the theorem bound {bound}"
    );
}

// ---- criterion 7: multilevel construction ----

fn parity_code(ctx: Arc<GFContext>, n: usize) -> LinearCode {
    let mut rows = Vec::new();
    for i in 0..n - 1 {
        let mut row = vec![0 as Symbol; n];
        row[i] = 1;
        row[n - 1] = 1;
        rows.push(row);
    }
    LinearCode::new(ctx, Mat::from_rows(&rows)).unwrap()
}

fn two_level_instance(seed: u64) -> MLExpanderCode {
    let ctx = Arc::new(GFContext::new(2).unwrap());
    let mut r = rng(seed);
    let graph = build_multilevel_graph(6, &[3, 3, 2], 3.0, 500, &mut r).unwrap();
    let tower = build_systematic_tower(
        ctx.clone(),
        &[3, 3],
        2,
        &[2, 2],
        4000,
        DistanceMetric::Symbol,
        &mut r,
    )
    .unwrap();
    let aux = vec![parity_code(ctx.clone(), 3), parity_code(ctx.clone(), 3)];
    let right = vec![parity_code(ctx.clone(), 3), parity_code(ctx, 3)];
    MLExpanderCode::new(graph, tower, aux, right).unwrap()
}

fn c7_multilevel() {
    let code = two_level_instance(71);
    let mut r = rng(72);
    let random_msgs = |r: &mut ChaCha8Rng| -> Vec<Vec<Symbol>> {
        code.level_dims()
            .iter()
            .map(|&d| (0..d).map(|_| r.gen_range(0..4) as Symbol).collect())
            .collect()
    };
    // noiseless m-stage telescoping leaves a zero residual
    for _ in 0..20 {
        let msgs = random_msgs(&mut r);
        let word = code.encode(&msgs).unwrap();
        let res = code.decode(&word, MlDecodeConfig::default()).unwrap();
        assert!(res.stage_ok.iter().all(|&b| b));
        assert!(res.residual.iter().all(|&b| b == 0));
        assert_eq!(res.codeword.as_deref(), Some(word.as_slice()));
    }
    // oracle-decision telescoping identity, checked symbolically
    let msgs = random_msgs(&mut r);
    let word = code.encode(&msgs).unwrap();
    let layers: Vec<Vec<Symbol>> =
        (0..2).map(|i| code.level_code(i).encode(&msgs[i]).unwrap()).collect();
    let mut y = word.clone();
    for &b in &[3usize, 11, 40, 77] {
        let len = y.len();
        y[b % len] ^= 1;
    }
    let error: Vec<Symbol> = y.iter().zip(&word).map(|(a, b)| a ^ b).collect();
    let mut residual = y;
    code.strip_level(0, &mut residual, &layers[0]).unwrap();
    // after stripping level 0: residual = error + level-1 contribution
    let mut expect = vec![0 as Symbol; code.len_bits()];
    let layer1 = code.assemble_from(1, &[layers[1].clone()]).unwrap();
    for (e, (&l, &err)) in expect.iter_mut().zip(layer1.iter().zip(&error)) {
        *e = l ^ err;
    }
    assert_eq!(residual, expect, "stage-0 telescoping identity");
    code.strip_level(1, &mut residual, &layers[1]).unwrap();
    assert_eq!(residual, error, "stage-1 telescoping identity");

    // m = 1 path is bit-identical to the single-level modified decoder
    let ctx = Arc::new(GFContext::new(2).unwrap());
    let mut r1 = rng(73);
    let graph = build_multilevel_graph(6, &[3, 2], 3.0, 500, &mut r1).unwrap();
    let tower = build_systematic_tower(
        ctx.clone(),
        &[3],
        2,
        &[2],
        4000,
        DistanceMetric::Symbol,
        &mut r1,
    )
    .unwrap();
    let aux = parity_code(ctx.clone(), 3);
    let right = parity_code(ctx, 3);
    let ml = MLExpanderCode::new(
        graph.clone(),
        tower.clone(),
        vec![aux.clone()],
        vec![right.clone()],
    )
    .unwrap();
    let single = ModifiedBGCode::new(graph, tower.full_code(), right, aux).unwrap();
    assert_eq!(ml.dim_q(), single.dimension());
    let msgs: Vec<Vec<Symbol>> = ml
        .level_dims()
        .iter()
        .map(|&d| (0..d).map(|_| r1.gen_range(0..4) as Symbol).collect())
        .collect();
    let word = ml.encode(&msgs).unwrap();
    let mut cases = vec![word.clone()];
    for flips in 1..=4usize {
        let mut y = word.clone();
        for _ in 0..flips {
            let i = r1.gen_range(0..y.len());
            y[i] ^= 1;
        }
        cases.push(y);
    }
    for y in &cases {
        let tm = ml.stage_reliabilities(0, y).unwrap();
        let ts = single.reliability_pass(y).unwrap();
        for v in 0..6 {
            for j in 0..3 {
                for b in 0..4u16 {
                    assert_eq!(tm.cost(v, j, b), ts.cost(v, j, b), "tables diverge");
                }
            }
        }
        assert_eq!(
            ml.stage_min_sum(0, &tm).unwrap(),
            single.min_sum_round(&ts).unwrap(),
            "min-sum rounds diverge"
        );
        let rm = ml.decode(y, MlDecodeConfig::default()).unwrap();
        let rs = single.decode(y, None).unwrap();
        if let Some(cw) = rm.codeword {
            assert_eq!(cw, rs.word, "decoded words diverge");
        }
    }

    // rate accounting on a rank-computed instance
    let p = code.params().unwrap();
    assert_eq!(code.monolithic_dimension().unwrap(), code.dim_q());
    assert!(p.rate >= p.rate_bound - 1e-12);
    assert!(p.rate_slack >= 0.0);
    println!(
        "    [criterion 7] rate {:.4}, bound {:.4}, measured slack {:.4}",
        p.rate, p.rate_bound, p.rate_slack
    );
}

// ---- criterion 8: simulation harness ----

fn c8_simulation() {
    let code = CodeUnderTest::Multilevel(two_level_instance(71));
    // p = 0 gives zero failures
    let clean = run_trials(&code, &[0.0], 200, 881, FailureMode::Diagnostic).unwrap();
    assert_eq!(clean[0].failures, 0);
    // 5-point grid, 2000 trials per point, monotone within Wilson intervals
    let p_grid = [0.001, 0.004, 0.01, 0.03, 0.08];
    let results = run_trials(&code, &p_grid, 2000, 882, FailureMode::Diagnostic).unwrap();
    for w in results.windows(2) {
        assert!(
            w[0].wilson_low <= w[1].wilson_high + 1e-12,
            "failure rate not monotone within intervals: {} @ p={} vs {} @ p={}",
            w[0].p_hat,
            w[0].p,
            w[1].p_hat,
            w[1].p
        );
    }
    // the top of the grid must actually fail sometimes, or monotonicity is
    // vacuous
    assert!(results.last().unwrap().failures > 0, "grid too easy to be informative");
    // bit-identical reruns under the same master seed
    let again = run_trials(&code, &p_grid, 2000, 882, FailureMode::Diagnostic).unwrap();
    assert_eq!(simulation_csv(&results), simulation_csv(&again));
    assert_eq!(
        simulation_json(&results, 882, FailureMode::Diagnostic),
        simulation_json(&again, 882, FailureMode::Diagnostic)
    );
}

// ---- driver ----

#[test]
fn acceptance_criteria() {
    type Criterion = (&'static str, Option<u64>, fn());
    let criteria: Vec<Criterion> = vec![
        ("1 bounds engine", Some(60), c1_bounds_engine),
        ("2 distance-bound ordering", None, c2_distance_bounds),
        ("3 fields, RS, EE and GMD", None, c3_codes),
        ("4 tower and direct-sum", None, c4_tower_direct_sum),
        ("5 serial decoder", Some(300), c5_serial_decoder),
        ("6 expander codes", None, c6_expander),
        ("7 multilevel construction", None, c7_multilevel),
        ("8 simulation harness", Some(600), c8_simulation),
    ];
    let mut failed = Vec::new();
    for (name, budget, f) in criteria {
        let t0 = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f));
        let elapsed = t0.elapsed();
        let mut ok = outcome.is_ok();
        let mut note = String::new();
        if let Some(limit) = budget {
            if elapsed > Duration::from_secs(limit) {
                ok = false;
                note = format!(" [budget {limit}s exceeded]");
            }
        }
        println!(
            "criterion {name}: {} ({:.1}s){note}",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
        if !ok {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
