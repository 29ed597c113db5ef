//! Browser bindings for the bounds curves and a small live decoder run.
//!
//! Three operations are exposed, each returning a JSON string the page
//! plots directly:
//!
//! * [`exponent_curves`]: E_0, the Forney bound, the m-level exponent and a
//!   high-order stand-in for the infinite-level limit, over a rate grid;
//! * [`distance_curves`]: Gilbert-Varshamov, Zyablov, m-level and
//!   Blokh-Zyablov distance bounds over a rate grid;
//! * [`decode_demo`]: Monte Carlo trials of the bundled two-level
//!   bipartite-graph code at a chosen crossover probability.
//!
//! The numeric settings trade the library defaults' last digits for
//! interactive latency (coarser maximization grids).

use std::fmt::Write as _;
use std::sync::{Arc, OnceLock};

use wasm_bindgen::prelude::wasm_bindgen;

use mlec::bounds::{
    bz_distance, forney_exponent, gv_distance, m_level_distance, multilevel_exponent,
    zyablov_distance, ChannelParams, NumericSettings,
};
use mlec::code::LinearCode;
use mlec::field::{GFContext, Symbol};
use mlec::graph::build_multilevel_graph;
use mlec::linalg::Mat;
use mlec::multilevel::MLExpanderCode;
use mlec::sim::{run_trials, CodeUnderTest, FailureMode};
use mlec::tower::{build_systematic_tower, DistanceMetric};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn demo_settings() -> NumericSettings {
    NumericSettings { grid_points: 512, refine_tol: 1e-7, ..NumericSettings::default() }
}

fn json_series(out: &mut String, label: &str, values: &[f64]) {
    let _ = write!(out, "{{\"label\":\"{label}\",\"values\":[");
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        if v.is_finite() {
            let _ = write!(out, "{v}");
        } else {
            out.push_str("null");
        }
    }
    out.push_str("]}");
}

/// Error exponent curves at crossover probability `p`: E_0, E^(1), E^(m),
/// and E^(64) as a stand-in for the infinite-level limit.
#[wasm_bindgen]
pub fn exponent_curves(p: f64, m: u32, points: u32) -> String {
    let s = demo_settings();
    let Ok(ch) = ChannelParams::new(p) else {
        return format!("{{\"error\":\"p must lie in (0, 1/2), got {p}\"}}");
    };
    let m = m.clamp(2, 32);
    let points = points.clamp(16, 400) as usize;
    let mut grid = Vec::with_capacity(points);
    let mut e0_vals = Vec::with_capacity(points);
    let mut forney = Vec::with_capacity(points);
    let mut mlevel = Vec::with_capacity(points);
    let mut inf = Vec::with_capacity(points);
    for i in 0..points {
        let r = ch.capacity * (i as f64 + 0.5) / points as f64;
        grid.push(r);
        e0_vals.push(ch.e0(r).unwrap_or(0.0));
        forney.push(forney_exponent(&ch, r, &s).map(|v| v.value).unwrap_or(0.0));
        mlevel.push(multilevel_exponent(&ch, m, r, &s).map(|v| v.value).unwrap_or(0.0));
        inf.push(multilevel_exponent(&ch, 64, r, &s).map(|v| v.value).unwrap_or(0.0));
    }
    let mut out = String::from("{\"r\":[");
    for (i, r) in grid.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{r}");
    }
    let _ = write!(out, "],\"capacity\":{},\"curves\":[", ch.capacity);
    json_series(&mut out, "E0", &e0_vals);
    out.push(',');
    json_series(&mut out, "Forney (m=1)", &forney);
    out.push(',');
    json_series(&mut out, &format!("m={m}"), &mlevel);
    out.push(',');
    json_series(&mut out, "m=64 (≈ limit)", &inf);
    out.push_str("]}");
    out
}

/// Distance-bound curves over the rate axis: GV, Zyablov, the m-level bound
/// and Blokh-Zyablov.
#[wasm_bindgen]
pub fn distance_curves(m: u32, points: u32) -> String {
    let s = demo_settings();
    let m = m.clamp(2, 32);
    let points = points.clamp(16, 400) as usize;
    let mut grid = Vec::with_capacity(points);
    let mut gv = Vec::with_capacity(points);
    let mut zy = Vec::with_capacity(points);
    let mut ml = Vec::with_capacity(points);
    let mut bz = Vec::with_capacity(points);
    for i in 0..points {
        let r = (i as f64 + 0.5) / points as f64;
        grid.push(r);
        gv.push(gv_distance(r).unwrap_or(0.0));
        zy.push(zyablov_distance(r, &s).map(|v| v.value).unwrap_or(0.0));
        ml.push(m_level_distance(m, r, &s).map(|v| v.value).unwrap_or(0.0));
        bz.push(bz_distance(r, &s).unwrap_or(0.0));
    }
    let mut out = String::from("{\"r\":[");
    for (i, r) in grid.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{r}");
    }
    out.push_str("],\"curves\":[");
    json_series(&mut out, "Gilbert-Varshamov", &gv);
    out.push(',');
    json_series(&mut out, "Zyablov (m=1)", &zy);
    out.push(',');
    json_series(&mut out, &format!("m={m}"), &ml);
    out.push(',');
    json_series(&mut out, "Blokh-Zyablov", &bz);
    out.push_str("]}");
    out
}

fn parity(ctx: Arc<GFContext>, n: usize) -> LinearCode {
    let mut rows = Vec::new();
    for i in 0..n - 1 {
        let mut row = vec![0 as Symbol; n];
        row[i] = 1;
        row[n - 1] = 1;
        rows.push(row);
    }
    LinearCode::new(ctx, Mat::from_rows(&rows)).expect("parity generator has full rank")
}

/// The demo code: two levels over GF(4) on 6 + 6 + 6 + 6 vertices.
fn demo_code() -> &'static CodeUnderTest {
    static CODE: OnceLock<CodeUnderTest> = OnceLock::new();
    CODE.get_or_init(|| {
        let ctx = Arc::new(GFContext::new(2).expect("GF(4)"));
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let graph =
            build_multilevel_graph(6, &[3, 3, 2], 3.0, 500, &mut rng).expect("demo graph");
        let tower = build_systematic_tower(
            ctx.clone(),
            &[3, 3],
            2,
            &[2, 2],
            4000,
            DistanceMetric::Symbol,
            &mut rng,
        )
        .expect("demo tower");
        let aux = vec![parity(ctx.clone(), 3), parity(ctx.clone(), 3)];
        let right = vec![parity(ctx.clone(), 3), parity(ctx, 3)];
        CodeUnderTest::Multilevel(
            MLExpanderCode::new(graph, tower, aux, right).expect("demo code"),
        )
    })
}

/// Monte Carlo decoding trials of the demo code at crossover probability
/// `p`; returns per-stage failure counts and the Wilson interval.
#[wasm_bindgen]
pub fn decode_demo(p: f64, trials: u32, seed: u32) -> String {
    if !(0.0..=0.5).contains(&p) {
        return format!("{{\"error\":\"p must lie in [0, 1/2], got {p}\"}}");
    }
    let trials = trials.clamp(1, 2000) as u64;
    let code = demo_code();
    let results = match run_trials(code, &[p], trials, seed as u64, FailureMode::Diagnostic) {
        Ok(r) => r,
        Err(e) => return format!("{{\"error\":\"{e}\"}}"),
    };
    let r = &results[0];
    format!(
        "{{\"p\":{},\"n_bits\":{},\"trials\":{},\"failures\":{},\"p_hat\":{},\"wilson\":[{},{}],\"stage_first\":{:?},\"stage_any\":{:?}}}",
        r.p,
        code.n_bits(),
        r.trials,
        r.failures,
        r.p_hat,
        r.wilson_low,
        r.wilson_high,
        r.stage_first_wrong,
        r.stage_any_wrong
    )
}
