//! Edge-list text format: a header line `n m`, then `m` lines `u v` with `u < v` in
//! ascending lexicographic order.

use std::io::{BufRead, Write};

use super::Graph;
use crate::error::{Error, Result};

pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    writeln!(out, "{} {}", g.n(), g.edge_count())?;
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}

pub fn read_edge_list<R: BufRead>(input: R) -> Result<Graph> {
    let mut lines = input.lines().enumerate();
    let parse_pair = |line_no: usize, line: &str| -> Result<(usize, usize)> {
        let mut it = line.split_whitespace();
        let mut next = || -> Result<usize> {
            it.next()
                .ok_or_else(|| Error::Parse { line: line_no, reason: "expected two integers".into() })?
                .parse()
                .map_err(|e| Error::Parse { line: line_no, reason: format!("{e}") })
        };
        let pair = (next()?, next()?);
        if it.next().is_some() {
            return Err(Error::Parse { line: line_no, reason: "trailing tokens".into() });
        }
        Ok(pair)
    };
    let (n, m) = match lines.next() {
        Some((i, line)) => parse_pair(i + 1, &line?)?,
        None => return Err(Error::Parse { line: 1, reason: "missing header".into() }),
    };
    let mut edges = Vec::with_capacity(m);
    let mut prev: Option<(usize, usize)> = None;
    for (i, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (u, v) = parse_pair(i + 1, &line)?;
        if u >= v {
            return Err(Error::Parse { line: i + 1, reason: "expected u < v".into() });
        }
        if prev.is_some_and(|p| p >= (u, v)) {
            return Err(Error::Parse { line: i + 1, reason: "edges not strictly ascending".into() });
        }
        prev = Some((u, v));
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(Error::Parse {
            line: 1,
            reason: format!("header declares {m} edges, found {}", edges.len()),
        });
    }
    let g = Graph::from_edges(n, &edges)?;
    g.check_invariants()?;
    Ok(g)
}
