//! graph6 text format, bit-exact per the standard encoding:
//! 6-bit chunks offset by 63, upper triangle in column order.

use crate::graph::{CubicGraph, GraphError};

/// Parses one graph6 line into a validated cubic graph.
pub fn parse_graph6(text: &str) -> Result<CubicGraph, GraphError> {
    let s = text.trim();
    let s = s.strip_prefix(">>graph6<<").unwrap_or(s);
    if s.is_empty() {
        return Err(GraphError::MalformedGraph6("empty input".into()));
    }
    let bytes = s.as_bytes();
    for &b in bytes {
        if !(63..=126).contains(&b) {
            return Err(GraphError::MalformedGraph6(format!(
                "byte {b} outside printable graph6 range"
            )));
        }
    }
    let (n, header_len) = decode_order(bytes)?;
    let body = &bytes[header_len..];
    let pairs = n * (n.saturating_sub(1)) / 2;
    let need = pairs.div_ceil(6);
    if body.len() != need {
        return Err(GraphError::MalformedGraph6(format!(
            "expected {need} body bytes for n={n}, got {}",
            body.len()
        )));
    }
    let mut edges = Vec::new();
    let mut pos = 0usize;
    for j in 1..n {
        for i in 0..j {
            let byte = body[pos / 6] - 63;
            if byte >> (5 - pos % 6) & 1 == 1 {
                edges.push((i, j));
            }
            pos += 1;
        }
    }
    // Padding bits must be zero.
    while pos < need * 6 {
        let byte = body[pos / 6] - 63;
        if byte >> (5 - pos % 6) & 1 == 1 {
            return Err(GraphError::MalformedGraph6("nonzero padding bits".into()));
        }
        pos += 1;
    }
    CubicGraph::from_edges(n, &edges)
}

fn decode_order(bytes: &[u8]) -> Result<(usize, usize), GraphError> {
    if bytes[0] != 126 {
        return Ok(((bytes[0] - 63) as usize, 1));
    }
    if bytes.len() >= 2 && bytes[1] != 126 {
        if bytes.len() < 4 {
            return Err(GraphError::MalformedGraph6("truncated order field".into()));
        }
        let n = ((bytes[1] - 63) as usize) << 12
            | ((bytes[2] - 63) as usize) << 6
            | (bytes[3] - 63) as usize;
        return Ok((n, 4));
    }
    if bytes.len() < 8 {
        return Err(GraphError::MalformedGraph6("truncated order field".into()));
    }
    let mut n = 0usize;
    for &b in &bytes[2..8] {
        n = n << 6 | (b - 63) as usize;
    }
    Ok((n, 8))
}

/// Standard graph6 encoding of the graph; `parse_graph6` inverts it exactly.
pub fn to_graph6(g: &CubicGraph) -> String {
    let n = g.vertex_count();
    let mut out: Vec<u8> = Vec::new();
    if n <= 62 {
        out.push(n as u8 + 63);
    } else if n <= 258047 {
        out.push(126);
        out.push((n >> 12) as u8 + 63);
        out.push((n >> 6 & 63) as u8 + 63);
        out.push((n & 63) as u8 + 63);
    } else {
        out.push(126);
        out.push(126);
        for shift in (0..6).rev() {
            out.push((n >> (6 * shift) & 63) as u8 + 63);
        }
    }
    let pairs = n * (n - 1) / 2;
    let mut bits = vec![0u8; pairs.div_ceil(6)];
    let mut pos = 0usize;
    for j in 1..n {
        for i in 0..j {
            if g.edge_index(i, j).is_some() {
                bits[pos / 6] |= 1 << (5 - pos % 6);
            }
            pos += 1;
        }
    }
    out.extend(bits.iter().map(|b| b + 63));
    String::from_utf8(out).expect("graph6 bytes are printable ASCII")
}

/// Reads every graph6 line from a text blob; `#` lines and blanks skipped.
pub fn parse_graph6_lines(text: &str) -> Result<Vec<CubicGraph>, GraphError> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(parse_graph6)
        .collect()
}
