//! Z4 x Z2 group arithmetic, the constructive and extraction directions of
//! the coloring characterization, the 3-edge-colorable mapping, and full
//! verification.

use crate::bits::EdgeSet;
use crate::factor::{two_factor, TwoFactor};
use crate::graph::CubicGraph;
use crate::structures::{
    f_complement, reduce, validate_f_matching, FComplement, FMatching, FPath, MatchingInF,
    ReducedGraph,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ColoringError {
    #[error("the given classes are not a proper 3-edge-coloring")]
    NotProper3Coloring,
    #[error("the F-complement is not 3-even; propagation clashes on a loop through vertex {0}")]
    NotThreeEven(usize),
    #[error("invalid coloring: {0}")]
    InvalidColoring(String),
    #[error("internal invariant breached: {0}")]
    Internal(&'static str),
}

/// An element of Z4 x Z2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GroupElement {
    pub x: u8,
    pub y: u8,
}

impl GroupElement {
    pub const ZERO: GroupElement = GroupElement { x: 0, y: 0 };

    pub fn new(x: u8, y: u8) -> Self {
        GroupElement { x: x % 4, y: y % 2 }
    }

    pub fn is_zero(self) -> bool {
        self == Self::ZERO
    }

    pub fn neg(self) -> Self {
        GroupElement::new(4 - self.x % 4, 2 - self.y % 2)
    }

    /// The seven non-zero elements in lexicographic order.
    pub fn nonzero() -> [GroupElement; 7] {
        let mut out = Vec::new();
        for x in 0..4 {
            for y in 0..2 {
                let e = GroupElement::new(x, y);
                if !e.is_zero() {
                    out.push(e);
                }
            }
        }
        out.try_into().unwrap()
    }

    pub fn all() -> [GroupElement; 8] {
        let mut out = Vec::new();
        for x in 0..4 {
            for y in 0..2 {
                out.push(GroupElement::new(x, y));
            }
        }
        out.try_into().unwrap()
    }
}

impl std::ops::Add for GroupElement {
    type Output = GroupElement;
    fn add(self, rhs: GroupElement) -> GroupElement {
        GroupElement::new((self.x + rhs.x) % 4, (self.y + rhs.y) % 2)
    }
}

/// All 3-subsets of the non-zero elements that sum to zero.
///
/// There are exactly five, and none of them has all y-coordinates zero.
pub fn zero_sum_blocks() -> Vec<[GroupElement; 3]> {
    let elems = GroupElement::nonzero();
    let mut blocks = Vec::new();
    for i in 0..7 {
        for j in i + 1..7 {
            for k in j + 1..7 {
                if (elems[i] + elems[j] + elems[k]).is_zero() {
                    blocks.push([elems[i], elems[j], elems[k]]);
                }
            }
        }
    }
    blocks
}

/// A total edge coloring by group elements, indexed by canonical edge id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeColoring {
    pub colors: Vec<GroupElement>,
}

impl EdgeColoring {
    pub fn color(&self, e: usize) -> GroupElement {
        self.colors[e]
    }

    /// X_i = { e : x(e) = i }.
    pub fn class_x(&self, g: &CubicGraph, i: u8) -> EdgeSet {
        let mut s = g.empty_edge_set();
        for (e, c) in self.colors.iter().enumerate() {
            if c.x == i {
                s.insert(e);
            }
        }
        s
    }

    /// Y_j = { e : y(e) = j }.
    pub fn class_y(&self, g: &CubicGraph, j: u8) -> EdgeSet {
        let mut s = g.empty_edge_set();
        for (e, c) in self.colors.iter().enumerate() {
            if c.y == j {
                s.insert(e);
            }
        }
        s
    }
}

/// Verification verdicts for a coloring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdicts {
    pub proper: bool,
    pub nowhere_zero: bool,
    pub zero_sum: bool,
}

impl Verdicts {
    pub fn all(&self) -> bool {
        self.proper && self.nowhere_zero && self.zero_sum
    }
}

/// Checks properness, the nowhere-zero property, and the zero-sum property.
pub fn verify(g: &CubicGraph, c: &EdgeColoring) -> Verdicts {
    assert_eq!(c.colors.len(), g.edge_count(), "coloring must be total");
    let nowhere_zero = c.colors.iter().all(|e| !e.is_zero());
    let mut proper = true;
    let mut zero_sum = true;
    for v in 0..g.vertex_count() {
        let [e1, e2, e3] = g.incident_edges(v);
        let (c1, c2, c3) = (c.colors[e1], c.colors[e2], c.colors[e3]);
        if c1 == c2 || c1 == c3 || c2 == c3 {
            proper = false;
        }
        if !(c1 + c2 + c3).is_zero() {
            zero_sum = false;
        }
    }
    Verdicts {
        proper,
        nowhere_zero,
        zero_sum,
    }
}

/// Replaces the three classes of a proper 3-edge-coloring by (1,0), (1,1)
/// and (2,1).
pub fn from_3_edge_coloring(
    g: &CubicGraph,
    classes: &[EdgeSet; 3],
) -> Result<EdgeColoring, ColoringError> {
    let m = g.edge_count();
    let mut assigned: Vec<Option<usize>> = vec![None; m];
    for (ci, class) in classes.iter().enumerate() {
        for e in class.iter() {
            if assigned[e].replace(ci).is_some() {
                return Err(ColoringError::NotProper3Coloring);
            }
        }
    }
    if assigned.iter().any(Option::is_none) {
        return Err(ColoringError::NotProper3Coloring);
    }
    for v in 0..g.vertex_count() {
        let mut seen = [false; 3];
        for e in g.incident_edges(v) {
            seen[assigned[e].unwrap()] = true;
        }
        if seen != [true; 3] {
            return Err(ColoringError::NotProper3Coloring);
        }
    }
    let palette = [
        GroupElement::new(1, 0),
        GroupElement::new(1, 1),
        GroupElement::new(2, 1),
    ];
    let colors = assigned.iter().map(|a| palette[a.unwrap()]).collect();
    let coloring = EdgeColoring { colors };
    debug_assert!(verify(g, &coloring).all());
    Ok(coloring)
}

/// Builds the coloring promised by the characterization from a 2-factor, a
/// matching in it, an F-matching and a 3-even F-complement.
///
/// y is the indicator of F; x is 0 on M, 2 on the F-matching edges, and
/// alternates over {1, 3} along every loop: starting from the lowest-index
/// 3-vertex (or the loop's canonical start if it has none), the value is
/// copied across 3-vertices and flipped across 2-vertices.
pub fn construct(
    g: &CubicGraph,
    f: &TwoFactor,
    m: &MatchingInF,
    fm: &FMatching,
    fc: &FComplement,
) -> Result<EdgeColoring, ColoringError> {
    let covered = g.degrees_in(&m.edges);
    let is_three = |v: usize| covered[v] == 0;
    let mut colors = vec![GroupElement::ZERO; g.edge_count()];
    for e in 0..g.edge_count() {
        let y = if f.edge_set.contains(e) { 1 } else { 0 };
        colors[e] = GroupElement::new(0, y);
    }
    for e in fm.edge_set.iter() {
        colors[e].x = 2;
    }
    for l in &fc.loops {
        let len = l.vertices.len();
        let start = l
            .vertices
            .iter()
            .enumerate()
            .filter(|&(_, &v)| is_three(v))
            .map(|(i, _)| i)
            .min_by_key(|&i| l.vertices[i])
            .unwrap_or(0);
        let mut x = 1u8;
        colors[l.edges[start]].x = x;
        for step in 1..len {
            let pos = (start + step) % len;
            // The vertex between the previous edge and this one.
            let v = l.vertices[pos];
            if !is_three(v) {
                x = if x == 1 { 3 } else { 1 };
            }
            colors[l.edges[pos]].x = x;
        }
        // Close the loop at the start vertex.
        let v0 = l.vertices[start];
        let last_x = colors[l.edges[(start + len - 1) % len]].x;
        let first_x = colors[l.edges[start]].x;
        let consistent = if is_three(v0) {
            last_x == first_x
        } else {
            last_x != first_x
        };
        if !consistent {
            return Err(ColoringError::NotThreeEven(v0));
        }
    }
    let coloring = EdgeColoring { colors };
    if !verify(g, &coloring).all() {
        return Err(ColoringError::Internal(
            "constructed coloring failed verification",
        ));
    }
    Ok(coloring)
}

/// The structures recovered from a verified coloring.
#[derive(Debug, Clone)]
pub struct Extracted {
    pub factor: TwoFactor,
    pub matching: MatchingInF,
    pub f_matching: FMatching,
    pub complement: FComplement,
    pub reduced: ReducedGraph,
}

/// Recovers (F, M, F-matching, F-complement) from a verified coloring:
/// F = G - Y0, M = X0, the paths are the components of X2, and the loops
/// are what remains.
pub fn extract(g: &CubicGraph, c: &EdgeColoring) -> Result<Extracted, ColoringError> {
    if !verify(g, c).all() {
        return Err(ColoringError::InvalidColoring(
            "coloring is not proper nowhere-zero zero-sum".into(),
        ));
    }
    let y0 = c.class_y(g, 0);
    let factor = two_factor(g, &y0)
        .map_err(|_| ColoringError::InvalidColoring("Y0 is not a perfect matching".into()))?;
    let x0 = c.class_x(g, 0);
    let matching = MatchingInF::new(g, &factor, x0)
        .map_err(|e| ColoringError::InvalidColoring(format!("X0 is not a matching in F: {e}")))?;
    let reduced = reduce(g, &matching);
    let x2 = c.class_x(g, 2);
    let paths = decompose_paths(g, &x2)?;
    let f_matching = validate_f_matching(g, &factor, &reduced, paths)
        .map_err(|e| ColoringError::InvalidColoring(format!("X2 is not an F-matching: {e}")))?;
    let complement = f_complement(g, &reduced, &f_matching)
        .map_err(|e| ColoringError::InvalidColoring(format!("bad F-complement: {e}")))?;
    if !complement.three_even() {
        return Err(ColoringError::InvalidColoring(
            "extracted F-complement is not 3-even".into(),
        ));
    }
    Ok(Extracted {
        factor,
        matching,
        f_matching,
        complement,
        reduced,
    })
}

/// Splits an edge set of maximum degree 2 into canonical vertex-disjoint
/// paths; a cycle inside the set is an error.
pub fn decompose_paths(g: &CubicGraph, set: &EdgeSet) -> Result<Vec<FPath>, ColoringError> {
    let deg = g.degrees_in(set);
    if deg.iter().any(|&d| d > 2) {
        return Err(ColoringError::InvalidColoring(
            "X2 has a vertex of degree 3".into(),
        ));
    }
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); g.vertex_count()];
    for e in set.iter() {
        let (a, b) = g.endpoints(e);
        incident[a].push(e);
        incident[b].push(e);
    }
    let mut used = vec![false; g.edge_count()];
    let mut paths = Vec::new();
    for start in 0..g.vertex_count() {
        if deg[start] != 1 || incident[start].iter().all(|&e| used[e]) {
            continue;
        }
        let mut vertices = vec![start];
        let mut edges = Vec::new();
        let mut cur = start;
        loop {
            let Some(&e) = incident[cur].iter().find(|&&e| !used[e]) else {
                break;
            };
            used[e] = true;
            cur = g.other_endpoint(e, cur);
            vertices.push(cur);
            edges.push(e);
        }
        paths.push(FPath { vertices, edges });
    }
    if set.iter().any(|e| !used[e]) {
        return Err(ColoringError::InvalidColoring(
            "X2 contains a cycle".into(),
        ));
    }
    Ok(paths)
}
