//! Builds the odd-cycle-incidence graph K_odd from a perfect matching of
//! the even cycles and derives a maximum matching whose reduced graph has a
//! simple F-matching.

use crate::bits::EdgeSet;
use crate::factor::{odd_cycle_matching_avoiding, TwoFactor};
use crate::graph::{CubicGraph, SubgraphView};
use crate::structures::{reduce, validate_f_matching, FMatching, FPath, MatchingInF};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OddIncidenceError {
    #[error("the given edge set is not a perfect matching of the even cycles")]
    NotPerfectOnEven,
}

/// A contracted connection between two odd cycles, carrying its realizing
/// path in H_odd (endpoints on the named cycles, interior all 2-vertices).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KOddEdge {
    /// Positions into `OddCycleIncidenceGraph::cycles`.
    pub a: usize,
    pub b: usize,
    pub path_vertices: Vec<usize>,
    pub path_edges: Vec<usize>,
}

/// Multigraph on the odd cycles of F; self-loops are kept but unusable in a
/// perfect matching.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OddCycleIncidenceGraph {
    /// Odd cycle indices into the 2-factor's cycle list.
    pub cycles: Vec<usize>,
    pub edges: Vec<KOddEdge>,
}

/// Contracts the odd cycles of F and suppresses the 2-vertices of
/// H_odd = G - M_even.
pub fn build_k_odd(
    g: &CubicGraph,
    f: &TwoFactor,
    m_even: &EdgeSet,
) -> Result<OddCycleIncidenceGraph, OddIncidenceError> {
    let odd = f.odd_cycle_indices();
    let even_edges = f.edges_of_cycles(g, &f.even_cycle_indices());
    if !m_even.is_subset(&even_edges) {
        return Err(OddIncidenceError::NotPerfectOnEven);
    }
    let deg = g.degrees_in(m_even);
    for (ci, cycle) in f.cycles.iter().enumerate() {
        let want = if f.cycles[ci].len() % 2 == 0 { 1 } else { 0 };
        if cycle.iter().any(|&v| deg[v] != want) {
            return Err(OddIncidenceError::NotPerfectOnEven);
        }
    }
    // Position of each vertex's odd cycle, if any.
    let mut on_odd = vec![usize::MAX; g.vertex_count()];
    for (pos, &ci) in odd.iter().enumerate() {
        for &v in &f.cycles[ci] {
            on_odd[v] = pos;
        }
    }
    let h_odd = g.full_edge_set().difference(m_even);
    let odd_cycle_edges = f.edges_of_cycles(g, &odd);
    let mut edges: Vec<KOddEdge> = Vec::new();
    for &ci in &odd {
        for &c in &f.cycles[ci] {
            // The unique incident edge leaving the odd cycles.
            let start_edge = g
                .incident_edges(c)
                .into_iter()
                .find(|&e| h_odd.contains(e) && !odd_cycle_edges.contains(e))
                .expect("odd-cycle vertex keeps its leaving edge in H_odd");
            let mut vertices = vec![c];
            let mut path_edges = vec![start_edge];
            let mut cur = g.other_endpoint(start_edge, c);
            let mut prev_edge = start_edge;
            while on_odd[cur] == usize::MAX {
                vertices.push(cur);
                let next = g
                    .incident_edges(cur)
                    .into_iter()
                    .find(|&e| e != prev_edge && h_odd.contains(e))
                    .expect("2-vertex of H_odd has a second edge");
                prev_edge = next;
                cur = g.other_endpoint(next, cur);
                path_edges.push(next);
            }
            vertices.push(cur);
            // Each connection is discovered from both ends; keep the copy
            // walked from its smaller endpoint.
            if c < cur {
                edges.push(KOddEdge {
                    a: on_odd[c],
                    b: on_odd[cur],
                    path_vertices: vertices,
                    path_edges,
                });
            }
        }
    }
    edges.sort_by(|p, q| {
        (p.a.min(p.b), p.a.max(p.b), &p.path_vertices).cmp(&(
            q.a.min(q.b),
            q.a.max(q.b),
            &q.path_vertices,
        ))
    });
    Ok(OddCycleIncidenceGraph {
        cycles: odd,
        edges,
    })
}

/// A maximum matching in F together with its induced simple F-matching.
#[derive(Debug, Clone)]
pub struct DerivedMatching {
    pub matching: MatchingInF,
    pub f_matching: FMatching,
}

/// Enumerates perfect matchings of the K_odd multigraph in canonical order.
fn for_each_k_odd_matching(
    k: &OddCycleIncidenceGraph,
    mut visit: impl FnMut(&[usize]) -> bool,
) {
    fn rec(
        k: &OddCycleIncidenceGraph,
        covered: &mut Vec<bool>,
        chosen: &mut Vec<usize>,
        visit: &mut impl FnMut(&[usize]) -> bool,
    ) -> bool {
        let Some(v) = covered.iter().position(|&c| !c) else {
            return visit(chosen);
        };
        for (ei, e) in k.edges.iter().enumerate() {
            if e.a == e.b {
                continue;
            }
            let (lo, hi) = (e.a.min(e.b), e.a.max(e.b));
            if lo != v || covered[hi] {
                continue;
            }
            covered[lo] = true;
            covered[hi] = true;
            chosen.push(ei);
            let keep_going = rec(k, covered, chosen, visit);
            chosen.pop();
            covered[lo] = false;
            covered[hi] = false;
            if !keep_going {
                return false;
            }
        }
        true
    }
    let mut covered = vec![false; k.cycles.len()];
    let mut chosen = Vec::new();
    rec(k, &mut covered, &mut chosen, &mut visit);
}

/// If K_odd has a perfect matching, returns M = M_odd u M_even with the
/// induced simple F-matching; `None` when K_odd has none.
///
/// Per matched connection, the path endpoints c_i get neighbors u_i on
/// their cycles (lower-indexed first), M_odd is the unique maximum matching
/// of each odd cycle avoiding u_i, and the F-paths are u c P c' u'.
pub fn derive_matching(
    g: &CubicGraph,
    f: &TwoFactor,
    m_even: &EdgeSet,
    k: &OddCycleIncidenceGraph,
) -> Option<DerivedMatching> {
    let mut result = None;
    for_each_k_odd_matching(k, |chosen| {
        // Endpoint c_i on each odd cycle, from the realizing paths.
        let mut endpoint = vec![usize::MAX; k.cycles.len()];
        for &ei in chosen {
            let e = &k.edges[ei];
            endpoint[e.a] = e.path_vertices[0];
            endpoint[e.b] = *e.path_vertices.last().unwrap();
        }
        // Try the 2-way neighbor choice per cycle, lower-indexed first.
        let combos = 1usize << k.cycles.len();
        'combo: for mask in 0..combos {
            let mut u = vec![usize::MAX; k.cycles.len()];
            let mut m_edges: Vec<usize> = m_even.to_vec();
            for (pos, &ci) in k.cycles.iter().enumerate() {
                let cycle = &f.cycles[ci];
                let c = endpoint[pos];
                let at = cycle.iter().position(|&v| v == c).unwrap();
                let len = cycle.len();
                let mut nbrs = [cycle[(at + 1) % len], cycle[(at + len - 1) % len]];
                nbrs.sort_unstable();
                let pick = nbrs[mask >> pos & 1];
                u[pos] = pick;
                let skip = cycle.iter().position(|&v| v == pick).unwrap();
                m_edges.extend(odd_cycle_matching_avoiding(g, f, ci, skip));
            }
            let m_set = EdgeSet::from_indices(g.edge_count(), &m_edges);
            let Ok(matching) = MatchingInF::new(g, f, m_set) else {
                continue 'combo;
            };
            let h = reduce(g, &matching);
            let mut paths = Vec::new();
            for &ei in chosen {
                let e = &k.edges[ei];
                let (ua, ub) = (u[e.a], u[e.b]);
                let ca = e.path_vertices[0];
                let cb = *e.path_vertices.last().unwrap();
                let mut vertices = vec![ua];
                vertices.extend(&e.path_vertices);
                vertices.push(ub);
                let mut edges = vec![g.edge_index(ua, ca).expect("cycle edge")];
                edges.extend(&e.path_edges);
                edges.push(g.edge_index(cb, ub).expect("cycle edge"));
                paths.push(FPath { vertices, edges });
            }
            paths.sort_by_key(|p| p.vertices[0].min(*p.vertices.last().unwrap()));
            let Ok(f_matching) = validate_f_matching(g, f, &h, paths) else {
                continue 'combo;
            };
            if !f_matching.simple {
                continue 'combo;
            }
            result = Some(DerivedMatching {
                matching,
                f_matching,
            });
            return false;
        }
        true
    });
    result
}

/// The perfect matchings of the even cycles of F, in canonical order: two
/// choices per even cycle, combined as an odometer. Empty F_even gives one
/// empty matching.
pub fn even_matchings(g: &CubicGraph, f: &TwoFactor, limit: usize) -> Vec<EdgeSet> {
    let even = f.even_cycle_indices();
    let per_cycle: Vec<[Vec<usize>; 2]> = even
        .iter()
        .map(|&ci| crate::factor::even_cycle_matchings(g, f, ci))
        .collect();
    let total: usize = per_cycle
        .iter()
        .fold(1usize, |acc, _| acc.saturating_mul(2))
        .min(limit.max(1));
    let mut out = Vec::with_capacity(total);
    for combo in 0..total {
        let mut edges = Vec::new();
        for (i, pair) in per_cycle.iter().enumerate() {
            edges.extend(&pair[combo >> i & 1]);
        }
        out.push(EdgeSet::from_indices(g.edge_count(), &edges));
    }
    out
}

/// Convenience check used in tests and the pipeline.
pub fn is_perfect_on_even(g: &CubicGraph, f: &TwoFactor, m_even: &EdgeSet) -> bool {
    let even_edges = f.edges_of_cycles(g, &f.even_cycle_indices());
    if !m_even.is_subset(&even_edges) {
        return false;
    }
    let view = SubgraphView::new(g, m_even.clone());
    f.even_cycle_indices().iter().all(|&ci| {
        f.cycles[ci].iter().all(|&v| view.degrees[v] == 1)
    })
}
