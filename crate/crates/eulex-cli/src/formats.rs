//! Line-oriented text formats for instances and certificates.
//!
//! Every format starts with a `<TAG> 1` header line. `#` starts a comment,
//! blank lines are skipped, and all diagnostics carry 1-based line numbers.
//! Rendering is canonical (sorted arc, edge and join lists, lefts-first
//! vertex numbering for bipartite instances), so `render` is deterministic
//! and `parse . render` is the identity on canonically stored instances.

use eulex_core::advice::{Advice, Hint, HintKind};
use eulex_core::cbm::{CbmInstance, Side};
use eulex_core::graph::{EeInstance, Multigraph, WeightMatrix};
use eulex_core::reductions::{HcInstance, RpInstance, Sat3Instance};
use eulex_core::ssc::{SscInstance, TwoDeeInstance};
use eulex_core::weight::{is_finite, Weight, INF, MAX_FINITE};
use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;

/// A malformed input with the 1-based line it was detected on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.msg)
    }
}

impl std::error::Error for ParseError {}

type PResult<T> = Result<T, ParseError>;

fn fail<T>(line: usize, msg: impl Into<String>) -> PResult<T> {
    Err(ParseError { line, msg: msg.into() })
}

/// Comment-stripped token lines with their original line numbers.
struct Reader<'a> {
    lines: Vec<(usize, Vec<&'a str>)>,
    at: usize,
    end: usize,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Self {
        let lines: Vec<(usize, Vec<&'a str>)> = text
            .lines()
            .enumerate()
            .filter_map(|(i, raw)| {
                let body = raw.split('#').next().unwrap();
                let toks: Vec<&str> = body.split_whitespace().collect();
                (!toks.is_empty()).then_some((i + 1, toks))
            })
            .collect();
        let end = text.lines().count() + 1;
        Reader { lines, at: 0, end }
    }

    fn next(&mut self, what: &str) -> PResult<(usize, Vec<&'a str>)> {
        match self.lines.get(self.at) {
            Some((no, toks)) => {
                self.at += 1;
                Ok((*no, toks.clone()))
            }
            None => fail(self.end, format!("unexpected end of input, expected {what}")),
        }
    }

    /// Requires the version header `<tag> 1`.
    fn header(&mut self, tag: &str) -> PResult<()> {
        let (no, toks) = self.next(&format!("the header '{tag} 1'"))?;
        if toks.len() != 2 || toks[0] != tag {
            return fail(no, format!("expected the header '{tag} 1'"));
        }
        if toks[1] != "1" {
            return fail(no, format!("unsupported {tag} version '{}'", toks[1]));
        }
        Ok(())
    }

    /// Requires a `<key> <value>` line and returns the raw value token.
    fn keyed(&mut self, key: &str) -> PResult<(usize, &'a str)> {
        let (no, toks) = self.next(&format!("'{key} <value>'"))?;
        if toks.len() != 2 || toks[0] != key {
            return fail(no, format!("expected '{key} <value>'"));
        }
        Ok((no, toks[1]))
    }

    fn keyed_count(&mut self, key: &str) -> PResult<(usize, usize)> {
        let (no, tok) = self.keyed(key)?;
        Ok((no, parse_usize(tok, no)?))
    }

    /// Requires a line of exactly `want` tokens.
    fn row(&mut self, want: usize, what: &str) -> PResult<(usize, Vec<&'a str>)> {
        let (no, toks) = self.next(what)?;
        if toks.len() != want {
            return fail(no, format!("expected {what}"));
        }
        Ok((no, toks))
    }

    fn finish(&mut self) -> PResult<()> {
        match self.lines.get(self.at) {
            Some((no, toks)) => fail(*no, format!("unexpected trailing content '{}'", toks[0])),
            None => Ok(()),
        }
    }
}

fn parse_usize(tok: &str, line: usize) -> PResult<usize> {
    tok.parse().or_else(|_| fail(line, format!("expected a non-negative integer, got '{tok}'")))
}

fn parse_i64(tok: &str, line: usize) -> PResult<i64> {
    tok.parse().or_else(|_| fail(line, format!("expected an integer, got '{tok}'")))
}

/// A weight token: `inf` or a non-negative integer.
fn parse_weight(tok: &str, line: usize) -> PResult<Weight> {
    if tok == "inf" {
        return Ok(INF);
    }
    tok.parse().or_else(|_| fail(line, format!("expected a weight or 'inf', got '{tok}'")))
}

/// A weight token capped at the finite input bound; `inf` stays allowed.
fn parse_capped_weight(tok: &str, line: usize) -> PResult<Weight> {
    let w = parse_weight(tok, line)?;
    if is_finite(w) && w > MAX_FINITE {
        return fail(line, format!("finite weights may not exceed {MAX_FINITE}"));
    }
    Ok(w)
}

/// A finite budget token, capped at the finite input bound.
fn parse_budget(tok: &str, line: usize) -> PResult<Weight> {
    let w = parse_weight(tok, line)?;
    if w > MAX_FINITE {
        return fail(line, format!("the budget must be a finite value at most {MAX_FINITE}"));
    }
    Ok(w)
}

pub fn render_weight(w: Weight) -> String {
    if is_finite(w) {
        w.to_string()
    } else {
        "inf".to_string()
    }
}

fn parse_vertex(tok: &str, line: usize, n: usize) -> PResult<usize> {
    let v = parse_usize(tok, line)?;
    if v >= n {
        return fail(line, format!("vertex {v} out of range, the instance has {n} vertices"));
    }
    Ok(v)
}

fn parse_arc_pair(toks: &[&str], line: usize, n: usize) -> PResult<(usize, usize)> {
    let u = parse_vertex(toks[0], line, n)?;
    let v = parse_vertex(toks[1], line, n)?;
    if u == v {
        return fail(line, format!("self loop at vertex {u}"));
    }
    Ok((u, v))
}

// ---------------------------------------------------------------- EE

pub fn parse_ee(text: &str) -> PResult<EeInstance> {
    let mut r = Reader::new(text);
    r.header("EE")?;
    let (nline, n) = r.keyed_count("vertices")?;
    if n == 0 {
        return fail(nline, "an instance needs at least one vertex");
    }
    let (_, m) = r.keyed_count("arcs")?;
    let mut arcs = Vec::with_capacity(m);
    for _ in 0..m {
        let (no, toks) = r.row(2, "an arc line 'u v'")?;
        arcs.push(parse_arc_pair(&toks, no, n)?);
    }
    let (_, t) = r.keyed_count("weights")?;
    let mut entries = Vec::with_capacity(t);
    for _ in 0..t {
        let (no, toks) = r.row(3, "a weight line 'u v w'")?;
        let (u, v) = parse_arc_pair(&toks, no, n)?;
        entries.push((u, v, parse_capped_weight(toks[2], no)?));
    }
    let (dline, dtok) = r.keyed("default-weight")?;
    let default = parse_capped_weight(dtok, dline)?;
    let (bline, btok) = r.keyed("omega-max")?;
    let budget = parse_budget(btok, bline)?;
    r.finish()?;
    let mut weights = WeightMatrix::from_fn(n, |_, _| default);
    for (u, v, w) in entries {
        weights.set(u, v, w);
    }
    let graph = Multigraph::with_arcs(n, arcs)
        .map_err(|e| ParseError { line: nline, msg: e.to_string() })?;
    EeInstance::new(graph, weights, budget)
        .map_err(|e| ParseError { line: bline, msg: e.to_string() })
}

pub fn render_ee(inst: &EeInstance) -> String {
    let n = inst.graph.n();
    let mut arcs = inst.graph.arcs().to_vec();
    arcs.sort_unstable();
    // The default weight is the most common off-diagonal entry; ties go to
    // the smaller value, so rendering stays deterministic.
    let mut counts: BTreeMap<Weight, usize> = BTreeMap::new();
    for u in 0..n {
        for v in 0..n {
            if u != v {
                *counts.entry(inst.weights.get(u, v)).or_default() += 1;
            }
        }
    }
    let default =
        counts.iter().max_by_key(|&(&w, &c)| (c, std::cmp::Reverse(w))).map_or(INF, |(&w, _)| w);
    let mut out = String::new();
    let _ = writeln!(out, "EE 1");
    let _ = writeln!(out, "vertices {n}");
    let _ = writeln!(out, "arcs {}", arcs.len());
    for (u, v) in arcs {
        let _ = writeln!(out, "{u} {v}");
    }
    let mut entries = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && inst.weights.get(u, v) != default {
                entries.push((u, v, inst.weights.get(u, v)));
            }
        }
    }
    let _ = writeln!(out, "weights {}", entries.len());
    for (u, v, w) in entries {
        let _ = writeln!(out, "{u} {v} {}", render_weight(w));
    }
    let _ = writeln!(out, "default-weight {}", render_weight(default));
    let _ = writeln!(out, "omega-max {}", render_weight(inst.omega_max));
    out
}

// ---------------------------------------------------------------- CBM

/// File vertex ids number the left side `0..n1` and the right side
/// `n1..n1+n2`, which is also how parsing stores them.
pub fn parse_cbm(text: &str) -> PResult<CbmInstance> {
    let mut r = Reader::new(text);
    r.header("CBM")?;
    let (_, n1) = r.keyed_count("v1")?;
    let (v2line, n2) = r.keyed_count("v2")?;
    let n = n1 + n2;
    let side: Vec<Side> =
        (0..n).map(|v| if v < n1 { Side::Left } else { Side::Right }).collect();
    let (_, m) = r.keyed_count("edges")?;
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (no, toks) = r.row(3, "an edge line 'u v w'")?;
        let u = parse_vertex(toks[0], no, n)?;
        let v = parse_vertex(toks[1], no, n)?;
        if u >= n1 || v < n1 {
            return fail(no, format!("edge {u} {v} must lead from v1 to v2"));
        }
        edges.push((u, v, parse_capped_weight(toks[2], no)?));
    }
    let (_, k) = r.keyed_count("cells")?;
    let mut cell_of = Vec::with_capacity(n);
    for _ in 0..n {
        let (no, toks) = r.row(1, "a cell id line")?;
        let c = parse_usize(toks[0], no)?;
        if c >= k {
            return fail(no, format!("cell {c} out of range, the instance has {k} cells"));
        }
        cell_of.push(c);
    }
    let (_, j) = r.keyed_count("joins")?;
    let mut joins = Vec::with_capacity(j);
    for _ in 0..j {
        let (no, toks) = r.row(2, "a join line 'a b'")?;
        let a = parse_usize(toks[0], no)?;
        let b = parse_usize(toks[1], no)?;
        if a == b || a >= k || b >= k {
            return fail(no, format!("join {a} {b} is not a pair of distinct cells"));
        }
        joins.push((a, b));
    }
    let (bline, btok) = r.keyed("omega-max")?;
    let budget = parse_budget(btok, bline)?;
    r.finish()?;
    CbmInstance::new(side, edges, cell_of, k, joins, budget)
        .map_err(|e| ParseError { line: v2line, msg: e.to_string() })
}

pub fn render_cbm(inst: &CbmInstance) -> String {
    // File ids are lefts first; instances built elsewhere may interleave
    // sides, so rendering renumbers and is canonical up to that relabeling.
    let lefts = inst.left_vertices();
    let rights = inst.right_vertices();
    let mut rank = vec![0usize; inst.n()];
    for (i, &v) in lefts.iter().chain(rights.iter()).enumerate() {
        rank[v] = i;
    }
    let mut edges: Vec<(usize, usize, Weight)> =
        inst.edges().iter().map(|&(u, v, w)| (rank[u], rank[v], w)).collect();
    edges.sort_unstable();
    let mut out = String::new();
    let _ = writeln!(out, "CBM 1");
    let _ = writeln!(out, "v1 {}", lefts.len());
    let _ = writeln!(out, "v2 {}", rights.len());
    let _ = writeln!(out, "edges {}", edges.len());
    for (u, v, w) in edges {
        let _ = writeln!(out, "{u} {v} {}", render_weight(w));
    }
    let _ = writeln!(out, "cells {}", inst.num_cells());
    for &v in lefts.iter().chain(rights.iter()) {
        let _ = writeln!(out, "{}", inst.cell_of(v));
    }
    let _ = writeln!(out, "joins {}", inst.joins().len());
    for &(a, b) in inst.joins() {
        let _ = writeln!(out, "{a} {b}");
    }
    let _ = writeln!(out, "omega-max {}", render_weight(inst.omega_max));
    out
}

// ---------------------------------------------------------------- SSC

pub fn parse_ssc(text: &str) -> PResult<SscInstance> {
    let mut r = Reader::new(text);
    r.header("SSC")?;
    let (cline, c) = r.keyed_count("colors")?;
    let (_, k) = r.keyed_count("switches")?;
    let mut switches = Vec::with_capacity(k);
    for _ in 0..k {
        let (_, l) = r.keyed_count("switch")?;
        let mut positions = Vec::with_capacity(l);
        for _ in 0..l {
            let (no, toks) = r.next("a position line '<count> <colors..>'")?;
            let p = parse_usize(toks[0], no)?;
            if toks.len() != p + 1 {
                return fail(no, format!("position announces {p} colors but lists {}", toks.len() - 1));
            }
            let mut colors = Vec::with_capacity(p);
            for tok in &toks[1..] {
                let col = parse_usize(tok, no)?;
                if col >= c {
                    return fail(no, format!("color {col} out of range, the instance has {c} colors"));
                }
                colors.push(col);
            }
            positions.push(colors);
        }
        switches.push(positions);
    }
    r.finish()?;
    SscInstance::new(c, switches).map_err(|e| ParseError { line: cline, msg: e.to_string() })
}

pub fn render_ssc(inst: &SscInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "SSC 1");
    let _ = writeln!(out, "colors {}", inst.num_colors());
    let _ = writeln!(out, "switches {}", inst.switches().len());
    for positions in inst.switches() {
        let _ = writeln!(out, "switch {}", positions.len());
        for colors in positions {
            let _ = write!(out, "{}", colors.len());
            for col in colors {
                let _ = write!(out, " {col}");
            }
            out.push('\n');
        }
    }
    out
}

// ---------------------------------------------------------------- RP

pub fn parse_rp(text: &str) -> PResult<RpInstance> {
    let mut r = Reader::new(text);
    r.header("RP")?;
    let (nline, n) = r.keyed_count("vertices")?;
    if n == 0 {
        return fail(nline, "an instance needs at least one vertex");
    }
    let (_, m) = r.keyed_count("arcs")?;
    let mut arcs = Vec::with_capacity(m);
    for _ in 0..m {
        let (no, toks) = r.row(3, "an arc line 'u v w'")?;
        let (u, v) = parse_arc_pair(&toks, no, n)?;
        arcs.push((u, v, parse_capped_weight(toks[2], no)?));
    }
    let (_, req) = r.keyed_count("required")?;
    let mut required = Vec::with_capacity(req);
    for _ in 0..req {
        let (no, toks) = r.row(1, "a required arc index line")?;
        let i = parse_usize(toks[0], no)?;
        if i >= arcs.len() {
            return fail(no, format!("required index {i} out of range, the instance has {m} arcs"));
        }
        required.push(i);
    }
    let (bline, btok) = r.keyed("omega-max")?;
    let budget = parse_weight(btok, bline)?;
    r.finish()?;
    RpInstance::new(n, arcs, required, budget)
        .map_err(|e| ParseError { line: nline, msg: e.to_string() })
}

pub fn render_rp(inst: &RpInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "RP 1");
    let _ = writeln!(out, "vertices {}", inst.n());
    let _ = writeln!(out, "arcs {}", inst.arcs().len());
    for &(u, v, w) in inst.arcs() {
        let _ = writeln!(out, "{u} {v} {}", render_weight(w));
    }
    let _ = writeln!(out, "required {}", inst.required().len());
    for &i in inst.required() {
        let _ = writeln!(out, "{i}");
    }
    let _ = writeln!(out, "omega-max {}", render_weight(inst.omega_max));
    out
}

// ---------------------------------------------------------------- 2DEE

pub fn parse_2dee(text: &str) -> PResult<TwoDeeInstance> {
    let mut r = Reader::new(text);
    r.header("2DEE")?;
    let (nline, n) = r.keyed_count("points")?;
    if n == 0 {
        return fail(nline, "an instance needs at least one point");
    }
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let (no, toks) = r.row(2, "a point line 'x y'")?;
        points.push((parse_i64(toks[0], no)?, parse_i64(toks[1], no)?));
    }
    let (_, m) = r.keyed_count("arcs")?;
    let mut arcs = Vec::with_capacity(m);
    for _ in 0..m {
        let (no, toks) = r.row(2, "an arc line 'u v'")?;
        arcs.push(parse_arc_pair(&toks, no, n)?);
    }
    let (_, budget) = r.keyed_count("budget")?;
    r.finish()?;
    TwoDeeInstance::new(points, arcs, budget)
        .map_err(|e| ParseError { line: nline, msg: e.to_string() })
}

pub fn render_2dee(inst: &TwoDeeInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "2DEE 1");
    let _ = writeln!(out, "points {}", inst.points().len());
    for &(x, y) in inst.points() {
        let _ = writeln!(out, "{x} {y}");
    }
    let _ = writeln!(out, "arcs {}", inst.arcs().len());
    for &(u, v) in inst.arcs() {
        let _ = writeln!(out, "{u} {v}");
    }
    let _ = writeln!(out, "budget {}", inst.max_arcs);
    out
}

// ---------------------------------------------------------------- HC

/// HC is an input-only format: instances enter through `reduce hc-to-ee`
/// and nothing produces them, so there is no renderer.
pub fn parse_hc(text: &str) -> PResult<HcInstance> {
    let mut r = Reader::new(text);
    r.header("HC")?;
    let (nline, n) = r.keyed_count("vertices")?;
    if n == 0 {
        return fail(nline, "an instance needs at least one vertex");
    }
    let (_, m) = r.keyed_count("arcs")?;
    let mut arcs = Vec::with_capacity(m);
    for _ in 0..m {
        let (no, toks) = r.row(2, "an arc line 'u v'")?;
        arcs.push(parse_arc_pair(&toks, no, n)?);
    }
    r.finish()?;
    HcInstance::new(n, arcs).map_err(|e| ParseError { line: nline, msg: e.to_string() })
}

// ---------------------------------------------------------------- SAT

/// Parses the DIMACS CNF subset with at most three literals per clause and
/// one clause per line. `c` lines are comments, literals are 1-based and
/// negative for negated variables, and every clause line ends with `0`.
pub fn parse_sat(text: &str) -> PResult<Sat3Instance> {
    let mut num_vars = None;
    let mut want_clauses = 0usize;
    let mut clauses = Vec::new();
    let mut pline = 0usize;
    for (i, raw) in text.lines().enumerate() {
        let no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks[0] == "p" {
            if num_vars.is_some() {
                return fail(no, "duplicate problem line");
            }
            if toks.len() != 4 || toks[1] != "cnf" {
                return fail(no, "expected the problem line 'p cnf <vars> <clauses>'");
            }
            num_vars = Some(parse_usize(toks[2], no)?);
            want_clauses = parse_usize(toks[3], no)?;
            pline = no;
            continue;
        }
        let Some(vars) = num_vars else {
            return fail(no, "clause before the problem line");
        };
        if toks.last() != Some(&"0") {
            return fail(no, "a clause line must end with 0");
        }
        let lits = &toks[..toks.len() - 1];
        if lits.is_empty() || lits.len() > 3 {
            return fail(no, "a clause needs one to three literals");
        }
        let mut clause = Vec::with_capacity(lits.len());
        for tok in lits {
            let lit = parse_i64(tok, no)?;
            let var = lit.unsigned_abs() as usize;
            if lit == 0 || var > vars {
                return fail(no, format!("literal {lit} out of range for {vars} variables"));
            }
            clause.push((var - 1, lit > 0));
        }
        clauses.push(clause);
    }
    let Some(vars) = num_vars else {
        return fail(text.lines().count() + 1, "missing problem line 'p cnf <vars> <clauses>'");
    };
    if clauses.len() != want_clauses {
        return fail(pline, format!("expected {want_clauses} clauses, found {}", clauses.len()));
    }
    Sat3Instance::new(vars, clauses).map_err(|e| ParseError { line: pline, msg: e.to_string() })
}

// ------------------------------------------------------- certificates

/// An arc or edge list certificate: one `u v` pair per line.
pub fn parse_pair_cert(text: &str) -> PResult<Vec<(usize, usize)>> {
    let mut r = Reader::new(text);
    let mut pairs = Vec::new();
    while r.lines.len() > r.at {
        let (no, toks) = r.row(2, "a certificate line 'u v'")?;
        pairs.push((parse_usize(toks[0], no)?, parse_usize(toks[1], no)?));
    }
    Ok(pairs)
}

pub fn render_pair_cert(pairs: &[(usize, usize)]) -> String {
    let mut out = String::new();
    for &(u, v) in pairs {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

/// A switch set cover certificate: one chosen position index per line.
pub fn parse_choice_cert(text: &str) -> PResult<Vec<usize>> {
    let mut r = Reader::new(text);
    let mut choice = Vec::new();
    while r.lines.len() > r.at {
        let (no, toks) = r.row(1, "a certificate line with one position index")?;
        choice.push(parse_usize(toks[0], no)?);
    }
    Ok(choice)
}

pub fn render_choice_cert(choice: &[usize]) -> String {
    let mut out = String::new();
    for &i in choice {
        let _ = writeln!(out, "{i}");
    }
    out
}

// ------------------------------------------------------------- advice

/// Parses an advice given as comma-separated hints, each hint a dash
/// separated component trace, cycle hints marked by a leading `*`:
/// `0-1-0,*0-1-2-0`.
pub fn parse_advice(text: &str) -> Result<Advice, String> {
    let mut advice = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        let (kind, trace) = match part.strip_prefix('*') {
            Some(rest) => (HintKind::Cycle, rest),
            None => (HintKind::Path, part),
        };
        let comps = trace
            .split('-')
            .map(|tok| tok.trim().parse::<usize>().map_err(|_| format!("bad component '{tok}'")))
            .collect::<Result<Vec<usize>, String>>()?;
        advice.push(Hint::new(comps, kind).map_err(|e| format!("bad hint '{part}': {e}"))?);
    }
    Ok(advice)
}

pub fn render_advice(advice: &[Hint]) -> String {
    advice
        .iter()
        .map(|h| {
            let trace =
                h.comps().iter().map(usize::to_string).collect::<Vec<_>>().join("-");
            match h.kind() {
                HintKind::Cycle => format!("*{trace}"),
                HintKind::Path => trace,
            }
        })
        .collect::<Vec<_>>()
        .join(",")
}
