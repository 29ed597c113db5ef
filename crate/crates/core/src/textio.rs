//! Text serialization for codes, graphs, towers, and whole constructions.
//!
//! Everything is line-oriented. Generator rows are hex strings with a fixed
//! number of digits per symbol (`ceil(t/4)`), one row per line. A bundle
//! file starts with `mlec-code v1` and a `kind` line, then carries the
//! blocks the construction needs, each terminated by `end`:
//!
//! * `kind serial`: a `tower` block, then one `code` or `rs` block per level;
//! * `kind single`: a `graph` block (two levels), then `code` blocks for the
//!   left, right and auxiliary codes;
//! * `kind multilevel`: a `graph` block, a `tower` block, then m auxiliary
//!   and m right `code` blocks.
//!
//! Graph `lambda` lines are informative records; the second eigenvalue is
//! re-measured on load.

use std::fmt;
use std::sync::Arc;

use crate::code::LinearCode;
use crate::expander::ModifiedBGCode;
use crate::field::{GFContext, Symbol};
use crate::gmd::OuterCode;
use crate::graph::{BipartiteGraph, MultilevelGraph};
use crate::linalg::Mat;
use crate::multilevel::MLExpanderCode;
use crate::reed_solomon::ReedSolomonCode;
use crate::serial::SerialCode;
use crate::sim::CodeUnderTest;
use crate::tower::NestedTower;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextIoError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for TextIoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "code file: {}", self.message)
        } else {
            write!(f, "code file line {}: {}", self.line, self.message)
        }
    }
}

impl std::error::Error for TextIoError {}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, TextIoError> {
    Err(TextIoError { line, message: message.into() })
}

fn hex_width(t: u32) -> usize {
    t.div_ceil(4) as usize
}

fn row_to_hex(ctx: &GFContext, row: &[Symbol]) -> String {
    let w = hex_width(ctx.t());
    row.iter().map(|&s| format!("{s:0w$x}")).collect()
}

fn hex_to_row(ctx: &GFContext, hex: &str, n: usize, line: usize) -> Result<Vec<Symbol>, TextIoError> {
    let w = hex_width(ctx.t());
    if hex.len() != n * w {
        return err(line, format!("row has {} hex digits, expected {}", hex.len(), n * w));
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let chunk = &hex[i * w..(i + 1) * w];
        let v = u32::from_str_radix(chunk, 16)
            .map_err(|_| TextIoError { line, message: format!("bad hex {chunk:?}") })?;
        if v as usize >= ctx.q() {
            return err(line, format!("symbol {v} out of range for q = {}", ctx.q()));
        }
        out.push(v as Symbol);
    }
    Ok(out)
}

/// Line cursor with 1-based positions.
struct Cursor<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Cursor<'a> {
        let lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .collect();
        Cursor { lines, pos: 0 }
    }

    fn peek(&self) -> Option<(usize, &'a str)> {
        self.lines.get(self.pos).copied()
    }

    fn next(&mut self) -> Result<(usize, &'a str), TextIoError> {
        let item = self.peek().ok_or(TextIoError { line: 0, message: "unexpected end of file".into() })?;
        self.pos += 1;
        Ok(item)
    }

    fn expect(&mut self, literal: &str) -> Result<usize, TextIoError> {
        let (line, l) = self.next()?;
        if l != literal {
            return err(line, format!("expected {literal:?}, got {l:?}"));
        }
        Ok(line)
    }

    /// Reads `key value...` returning the value part.
    fn kv(&mut self, key: &str) -> Result<(usize, &'a str), TextIoError> {
        let (line, l) = self.next()?;
        match l.split_once(char::is_whitespace) {
            Some((k, v)) if k == key => Ok((line, v.trim())),
            _ => err(line, format!("expected {key:?} <value>, got {l:?}")),
        }
    }

    fn kv_usize(&mut self, key: &str) -> Result<usize, TextIoError> {
        let (line, v) = self.kv(key)?;
        v.parse().map_err(|_| TextIoError { line, message: format!("{key}: bad integer {v:?}") })
    }

    fn kv_usize_list(&mut self, key: &str) -> Result<Vec<usize>, TextIoError> {
        let (line, v) = self.kv(key)?;
        v.split_whitespace()
            .map(|s| {
                s.parse()
                    .map_err(|_| TextIoError { line, message: format!("{key}: bad integer {s:?}") })
            })
            .collect()
    }
}

fn parse_field_header(cur: &mut Cursor) -> Result<Arc<GFContext>, TextIoError> {
    let t = cur.kv_usize("t")? as u32;
    let (line, poly) = cur.kv("poly")?;
    let poly = poly.strip_prefix("0x").unwrap_or(poly);
    let poly = u32::from_str_radix(poly, 16)
        .map_err(|_| TextIoError { line, message: format!("bad polynomial {poly:?}") })?;
    GFContext::with_poly(t, poly)
        .map(Arc::new)
        .map_err(|e| TextIoError { line, message: e.to_string() })
}

fn write_field_header(out: &mut String, ctx: &GFContext) {
    out.push_str(&format!("t {}\n", ctx.t()));
    out.push_str(&format!("poly 0x{:x}\n", ctx.primitive_poly()));
}

// ---- linear code blocks ----

pub fn write_linear_code(code: &LinearCode) -> String {
    let mut out = String::from("code\n");
    write_field_header(&mut out, code.ctx());
    out.push_str(&format!("n {}\n", code.n()));
    out.push_str(&format!("k {}\n", code.k()));
    for r in 0..code.k() {
        out.push_str(&format!("row {}\n", row_to_hex(code.ctx(), code.generator().row(r))));
    }
    out.push_str("end\n");
    out
}

fn parse_linear_code(cur: &mut Cursor) -> Result<LinearCode, TextIoError> {
    cur.expect("code")?;
    let ctx = parse_field_header(cur)?;
    let n = cur.kv_usize("n")?;
    let k = cur.kv_usize("k")?;
    let mut rows = Vec::with_capacity(k);
    for _ in 0..k {
        let (line, hex) = cur.kv("row")?;
        rows.push(hex_to_row(&ctx, hex, n, line)?);
    }
    let line = cur.expect("end")?;
    LinearCode::new(ctx, Mat::from_rows(&rows))
        .map_err(|e| TextIoError { line, message: e.to_string() })
}

// ---- Reed-Solomon blocks ----

pub fn write_rs_code(code: &ReedSolomonCode) -> String {
    let mut out = String::from("rs\n");
    write_field_header(&mut out, code.ctx());
    out.push_str(&format!("n {}\n", code.n()));
    out.push_str(&format!("k {}\n", code.k()));
    out.push_str("end\n");
    out
}

fn parse_rs_code(cur: &mut Cursor) -> Result<ReedSolomonCode, TextIoError> {
    cur.expect("rs")?;
    let ctx = parse_field_header(cur)?;
    let n = cur.kv_usize("n")?;
    let k = cur.kv_usize("k")?;
    let line = cur.expect("end")?;
    ReedSolomonCode::new(ctx, n, k).map_err(|e| TextIoError { line, message: e.to_string() })
}

fn write_outer_code(code: &OuterCode) -> String {
    match code {
        OuterCode::ReedSolomon(c) => write_rs_code(c),
        OuterCode::Generic(c) => write_linear_code(c),
    }
}

fn parse_outer_code(cur: &mut Cursor) -> Result<OuterCode, TextIoError> {
    match cur.peek() {
        Some((_, "rs")) => Ok(OuterCode::ReedSolomon(parse_rs_code(cur)?)),
        Some((_, "code")) => Ok(OuterCode::Generic(parse_linear_code(cur)?)),
        Some((line, l)) => err(line, format!("expected an outer code block, got {l:?}")),
        None => err(0, "unexpected end of file"),
    }
}

// ---- tower blocks ----

pub fn write_tower(tower: &NestedTower) -> String {
    let mut out = String::from("tower\n");
    write_field_header(&mut out, tower.ctx());
    out.push_str(&format!("n {}\n", tower.n()));
    out.push_str(&format!("levels {}\n", tower.num_levels()));
    let dims: Vec<String> = (0..tower.num_levels()).map(|i| tower.level_dim(i).to_string()).collect();
    out.push_str(&format!("dims {}\n", dims.join(" ")));
    match tower.verified_distances() {
        Some(d) => {
            let d: Vec<String> = d.iter().map(|x| x.to_string()).collect();
            out.push_str(&format!("distances {}\n", d.join(" ")));
        }
        None => out.push_str("distances unknown\n"),
    }
    for level in 0..tower.num_levels() {
        out.push_str(&format!("block {level}\n"));
        let b = tower.block(level);
        for r in 0..b.rows() {
            out.push_str(&format!("row {}\n", row_to_hex(tower.ctx(), b.row(r))));
        }
    }
    out.push_str("end\n");
    out
}

fn parse_tower(cur: &mut Cursor) -> Result<NestedTower, TextIoError> {
    cur.expect("tower")?;
    let ctx = parse_field_header(cur)?;
    let n = cur.kv_usize("n")?;
    let levels = cur.kv_usize("levels")?;
    let dims = cur.kv_usize_list("dims")?;
    if dims.len() != levels {
        return err(0, format!("dims count {} != levels {levels}", dims.len()));
    }
    let (dline, dval) = cur.kv("distances")?;
    let distances: Option<Vec<usize>> = if dval == "unknown" {
        None
    } else {
        Some(
            dval.split_whitespace()
                .map(|s| {
                    s.parse().map_err(|_| TextIoError {
                        line: dline,
                        message: format!("bad distance {s:?}"),
                    })
                })
                .collect::<Result<_, _>>()?,
        )
    };
    let mut blocks = Vec::with_capacity(levels);
    for level in 0..levels {
        let (line, idx) = cur.kv("block")?;
        if idx.parse::<usize>().ok() != Some(level) {
            return err(line, format!("expected block {level}, got {idx:?}"));
        }
        let mut rows = Vec::with_capacity(dims[level]);
        for _ in 0..dims[level] {
            let (rline, hex) = cur.kv("row")?;
            rows.push(hex_to_row(&ctx, hex, n, rline)?);
        }
        blocks.push(Mat::from_rows(&rows));
    }
    let line = cur.expect("end")?;
    let mut tower = NestedTower::from_blocks(ctx, blocks)
        .map_err(|e| TextIoError { line, message: e.to_string() })?;
    if let Some(d) = distances {
        if d.len() != levels {
            return err(dline, format!("distances count {} != levels {levels}", d.len()));
        }
        tower.set_verified_distances(d);
    }
    Ok(tower)
}

// ---- graph blocks ----

pub fn write_graph(graph: &MultilevelGraph) -> String {
    let mut out = String::from("graph\n");
    out.push_str(&format!("n {}\n", graph.n()));
    out.push_str(&format!("levels {}\n", graph.num_levels()));
    let degrees: Vec<String> =
        (0..graph.num_levels()).map(|i| graph.degree(i).to_string()).collect();
    out.push_str(&format!("degrees {}\n", degrees.join(" ")));
    let lambdas: Vec<String> =
        (0..graph.num_levels()).map(|i| format!("{}", graph.level(i).lambda())).collect();
    out.push_str(&format!("lambda {}\n", lambdas.join(" ")));
    out.push_str("edges\n");
    for level in 0..graph.num_levels() {
        let g = graph.level(level);
        for v in 0..g.n() {
            for e in g.left_edges(v) {
                out.push_str(&format!("{level} {v} {}\n", g.right_of(e)));
            }
        }
    }
    out.push_str("end\n");
    out
}

fn parse_graph(cur: &mut Cursor) -> Result<MultilevelGraph, TextIoError> {
    cur.expect("graph")?;
    let n = cur.kv_usize("n")?;
    let levels = cur.kv_usize("levels")?;
    let degrees = cur.kv_usize_list("degrees")?;
    if degrees.len() != levels {
        return err(0, format!("degrees count {} != levels {levels}", degrees.len()));
    }
    let _recorded_lambda = cur.kv("lambda")?;
    cur.expect("edges")?;
    let mut neighbors: Vec<Vec<Vec<u32>>> =
        (0..levels).map(|l| vec![Vec::with_capacity(degrees[l]); n]).collect();
    loop {
        let (line, l) = cur.next()?;
        if l == "end" {
            break;
        }
        let parts: Vec<&str> = l.split_whitespace().collect();
        if parts.len() != 3 {
            return err(line, format!("expected 'level left right', got {l:?}"));
        }
        let level: usize = parts[0]
            .parse()
            .map_err(|_| TextIoError { line, message: format!("bad level {:?}", parts[0]) })?;
        let v: usize = parts[1]
            .parse()
            .map_err(|_| TextIoError { line, message: format!("bad left vertex {:?}", parts[1]) })?;
        let w: u32 = parts[2]
            .parse()
            .map_err(|_| TextIoError { line, message: format!("bad right vertex {:?}", parts[2]) })?;
        if level >= levels || v >= n {
            return err(line, "edge endpoint out of range");
        }
        neighbors[level][v].push(w);
    }
    let mut built = Vec::with_capacity(levels);
    for (l, nb) in neighbors.into_iter().enumerate() {
        built.push(
            BipartiteGraph::from_neighbors(n, degrees[l], &nb)
                .map_err(|e| TextIoError { line: 0, message: format!("level {l}: {e}") })?,
        );
    }
    MultilevelGraph::from_levels(built).map_err(|e| TextIoError { line: 0, message: e.to_string() })
}

// ---- bundles ----

/// Serializes a full construction to the bundle format.
pub fn write_bundle(code: &CodeUnderTest, seed: Option<u64>) -> String {
    let mut out = String::from("mlec-code v1\n");
    if let Some(s) = seed {
        out.push_str(&format!("seed {s}\n"));
    }
    match code {
        CodeUnderTest::Serial(c) => {
            out.push_str("kind serial\n");
            out.push_str(&write_tower(c.tower()));
            for level in 0..c.num_levels() {
                out.push_str(&write_outer_code(c.outer(level)));
            }
        }
        CodeUnderTest::Single(c) => {
            out.push_str("kind single\n");
            out.push_str(&write_graph(c.graph()));
            out.push_str(&write_linear_code(c.left_code()));
            out.push_str(&write_linear_code(c.right_code()));
            out.push_str(&write_linear_code(c.aux_code()));
        }
        CodeUnderTest::Multilevel(c) => {
            out.push_str("kind multilevel\n");
            out.push_str(&write_graph(c.graph()));
            out.push_str(&write_tower(c.tower()));
            for i in 0..c.num_stages() {
                out.push_str(&write_linear_code(c.aux_code(i)));
            }
            for i in 0..c.num_stages() {
                out.push_str(&write_linear_code(c.right_code(i)));
            }
        }
    }
    out
}

/// Parses a bundle back into a construction, re-validating everything the
/// constructors check (ranks, information sets, degree agreements).
pub fn read_bundle(text: &str) -> Result<CodeUnderTest, TextIoError> {
    let mut cur = Cursor::new(text);
    cur.expect("mlec-code v1")?;
    if let Some((_, l)) = cur.peek() {
        if l.starts_with("seed ") {
            cur.next()?;
        }
    }
    let (line, kind) = cur.kv("kind")?;
    match kind {
        "serial" => {
            let tower = parse_tower(&mut cur)?;
            let mut outers = Vec::with_capacity(tower.num_levels());
            for _ in 0..tower.num_levels() {
                outers.push(parse_outer_code(&mut cur)?);
            }
            SerialCode::new(tower, outers)
                .map(CodeUnderTest::Serial)
                .map_err(|e| TextIoError { line: 0, message: e.to_string() })
        }
        "single" => {
            let graph = parse_graph(&mut cur)?;
            let left = parse_linear_code(&mut cur)?;
            let right = parse_linear_code(&mut cur)?;
            let aux = parse_linear_code(&mut cur)?;
            ModifiedBGCode::new(graph, left, right, aux)
                .map(CodeUnderTest::Single)
                .map_err(|e| TextIoError { line: 0, message: e.to_string() })
        }
        "multilevel" => {
            let graph = parse_graph(&mut cur)?;
            let tower = parse_tower(&mut cur)?;
            let m = graph.num_stages();
            let mut aux = Vec::with_capacity(m);
            for _ in 0..m {
                aux.push(parse_linear_code(&mut cur)?);
            }
            let mut right = Vec::with_capacity(m);
            for _ in 0..m {
                right.push(parse_linear_code(&mut cur)?);
            }
            MLExpanderCode::new(graph, tower, aux, right)
                .map(CodeUnderTest::Multilevel)
                .map_err(|e| TextIoError { line: 0, message: e.to_string() })
        }
        other => err(line, format!("unknown kind {other:?}")),
    }
}
