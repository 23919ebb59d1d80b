//! Text and JSON formats. All node ids in files and JSON are 1-based.
//!
//! - edge list: optional `n <count>` header, then one `u v` pair per line;
//!   `#` starts a comment.
//! - adjacency matrix: `n` rows of `n` 0/1 entries separated by commas or
//!   whitespace.
//! - partition: one block per line, ids separated by whitespace.

use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{Graph, Multigraph, Partition};
use crate::Probability;

/// Version stamped into every JSON document the CLI emits.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    EdgeList,
    AdjacencyMatrix,
}

impl FromStr for GraphFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "edge-list" => Ok(GraphFormat::EdgeList),
            "adjacency-matrix" => Ok(GraphFormat::AdjacencyMatrix),
            other => Err(format!("unknown graph format `{other}`")),
        }
    }
}

pub fn load_graph(text: &str, format: GraphFormat) -> Result<Graph> {
    match format {
        GraphFormat::EdgeList => parse_edge_list(text),
        GraphFormat::AdjacencyMatrix => parse_adjacency_matrix(text),
    }
}

/// Non-empty lines with comments stripped, paired with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn parse_id(token: &str, line: usize) -> Result<usize> {
    let id: usize = token.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("`{token}` is not a node id"),
    })?;
    if id == 0 {
        return Err(Error::Parse {
            line,
            msg: "node ids are 1-based".into(),
        });
    }
    Ok(id - 1)
}

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut declared = None;
    let mut edges = Vec::new();
    for (idx, (line, content)) in content_lines(text).enumerate() {
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if idx == 0 && tokens.first() == Some(&"n") {
            let count = match tokens.as_slice() {
                [_, count] => count.parse::<usize>().ok(),
                _ => None,
            };
            declared = Some(count.filter(|&c| c > 0).ok_or_else(|| Error::Parse {
                line,
                msg: "header must be `n <positive count>`".into(),
            })?);
            continue;
        }
        match tokens.as_slice() {
            [u, v] => edges.push((parse_id(u, line)?, parse_id(v, line)?)),
            _ => {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected `u v`, found `{content}`"),
                })
            }
        }
    }
    let n = match declared {
        Some(n) => n,
        None => edges.iter().map(|&(u, v)| u.max(v) + 1).max().ok_or(Error::Parse {
            line: 1,
            msg: "empty edge list needs an `n <count>` header".into(),
        })?,
    };
    Graph::new(n, edges)
}

pub fn parse_adjacency_matrix(text: &str) -> Result<Graph> {
    let mut rows: Vec<(usize, Vec<u8>)> = Vec::new();
    for (line, content) in content_lines(text) {
        let row = content
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| match t {
                "0" => Ok(0),
                "1" => Ok(1),
                _ => Err(Error::Parse {
                    line,
                    msg: format!("entry `{t}` is not 0 or 1"),
                }),
            })
            .collect::<Result<Vec<u8>>>()?;
        rows.push((line, row));
    }
    let n = rows.len();
    if n == 0 {
        return Err(Error::Parse {
            line: 1,
            msg: "empty adjacency matrix".into(),
        });
    }
    for (line, row) in &rows {
        if row.len() != n {
            return Err(Error::Parse {
                line: *line,
                msg: format!("expected {n} entries, found {}", row.len()),
            });
        }
    }
    let mut edges = Vec::new();
    for i in 0..n {
        if rows[i].1[i] != 0 {
            return Err(Error::NonzeroDiagonal(i));
        }
        for j in i + 1..n {
            if rows[i].1[j] != rows[j].1[i] {
                return Err(Error::Asymmetric { row: i, col: j });
            }
            if rows[i].1[j] == 1 {
                edges.push((i, j));
            }
        }
    }
    Graph::new(n, edges)
}

/// Reads a partition of the nodes of a graph with `n` nodes.
pub fn parse_partition(text: &str, n: usize) -> Result<Partition> {
    let mut blocks = Vec::new();
    for (line, content) in content_lines(text) {
        let block = content
            .split_whitespace()
            .map(|t| parse_id(t, line))
            .collect::<Result<Vec<usize>>>()?;
        if let Some(&id) = block.iter().find(|&&id| id >= n) {
            return Err(Error::NodeOutOfRange { id, n });
        }
        blocks.push(block);
    }
    let p = Partition::new(blocks)?;
    if p.node_count() != n {
        return Err(Error::InvalidPartition(format!(
            "blocks cover {} of {n} nodes",
            p.node_count()
        )));
    }
    Ok(p)
}

pub fn write_edge_list(g: &Graph) -> String {
    let mut out = format!("n {}\n", g.node_count());
    for &(u, v) in g.edges() {
        out.push_str(&format!("{} {}\n", u + 1, v + 1));
    }
    out
}

pub fn write_partition(p: &Partition) -> String {
    let mut out = String::new();
    for block in p.blocks() {
        let ids: Vec<String> = block.iter().map(|v| (v + 1).to_string()).collect();
        out.push_str(&ids.join(" "));
        out.push('\n');
    }
    out
}

pub fn graph_json(g: &Graph) -> Value {
    let edges: Vec<[usize; 2]> = g.edges().iter().map(|&(u, v)| [u + 1, v + 1]).collect();
    json!({ "schema_version": SCHEMA_VERSION, "n": g.node_count(), "edges": edges })
}

pub fn multigraph_json(m: &Multigraph) -> Value {
    json!({ "schema_version": SCHEMA_VERSION, "k": m.node_count(), "multiplicity": m.matrix() })
}

/// Blocks as sorted arrays of 1-based ids.
pub fn partition_json(p: &Partition) -> Value {
    let blocks: Vec<Vec<usize>> = p
        .blocks()
        .iter()
        .map(|b| b.iter().map(|v| v + 1).collect())
        .collect();
    json!(blocks)
}

/// `num/den`, always with an explicit denominator (`1/1`, `0/1`).
pub fn rational_string(r: &Probability) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Decimal rendering with `digits` fractional digits, rounded half to even.
pub fn decimal_string(r: &Probability, digits: usize) -> String {
    let scale = BigUint::from(10u32).pow(digits as u32);
    let scaled = r.numer() * &scale;
    let (mut q, rem) = scaled.div_rem(r.denom());
    let twice = rem * 2u32;
    if twice > *r.denom() || (twice == *r.denom() && q.is_odd()) {
        q += 1u32;
    }
    let (int, frac) = q.div_rem(&scale);
    if digits == 0 {
        return int.to_string();
    }
    let frac = frac.to_string();
    format!("{int}.{}{frac}", "0".repeat(digits - frac.len()))
}

/// Nearest `f64` to a probability. Presentation only.
pub fn to_f64(r: &Probability) -> f64 {
    if r.numer().is_zero() {
        return 0.0;
    }
    // 60 significant bits is beyond f64 precision
    let shift = (r.denom().bits() as i64 - r.numer().bits() as i64 + 60).max(0) as usize;
    let q: BigUint = (r.numer() << shift) / r.denom();
    let q: f64 = q.to_string().parse().expect("decimal digits");
    q / 2f64.powi(shift as i32)
}
