//! Everything between a chosen (F, M) pair and the coloring construction:
//! the reduced graph H = G - M, F-paths, F-matchings, F-complements,
//! 3-parity, and the main-component classification for the oddness-two case.

use crate::bits::EdgeSet;
use crate::budget::{Budget, BudgetExhausted};
use crate::factor::{cycles_of_two_regular, TwoFactor};
use crate::graph::{CubicGraph, SubgraphView};
use serde::{Deserialize, Serialize};
use std::ops::ControlFlow;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("matching edge {0} does not lie in the 2-factor")]
    NotInFactor(usize),
    #[error("edges {0} and {1} share a vertex")]
    NotAMatching(usize, usize),
    #[error("malformed structure: {0}")]
    MalformedStructure(String),
    #[error("expected exactly two 3-vertices, found {0}")]
    WrongVertexCount(usize),
}

/// A matching inside a 2-factor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchingInF {
    pub edges: EdgeSet,
    /// Covers all vertices of even cycles and all but one per odd cycle.
    pub maximum: bool,
}

impl MatchingInF {
    pub fn new(g: &CubicGraph, f: &TwoFactor, edges: EdgeSet) -> Result<Self, StructureError> {
        if let Some(e) = edges.iter().find(|&e| !f.edge_set.contains(e)) {
            return Err(StructureError::NotInFactor(e));
        }
        let list = edges.to_vec();
        for (i, &e) in list.iter().enumerate() {
            let (a, b) = g.endpoints(e);
            for &e2 in &list[i + 1..] {
                let (c, d) = g.endpoints(e2);
                if a == c || a == d || b == c || b == d {
                    return Err(StructureError::NotAMatching(e, e2));
                }
            }
        }
        let deg = g.degrees_in(&edges);
        let maximum = f.cycles.iter().all(|cycle| {
            let uncovered = cycle.iter().filter(|&&v| deg[v] == 0).count();
            uncovered == cycle.len() % 2
        });
        Ok(MatchingInF { edges, maximum })
    }
}

/// H = G - M with every vertex classified as a 2-vertex or 3-vertex.
#[derive(Debug, Clone)]
pub struct ReducedGraph {
    pub matching: EdgeSet,
    pub h_edges: EdgeSet,
    /// is_three[v] holds when v is uncovered by M, i.e. has degree 3 in H.
    pub is_three: Vec<bool>,
    /// Per-vertex incident H-edge indices, increasing.
    pub h_incident: Vec<Vec<usize>>,
    /// Connected components of H as sorted vertex lists.
    pub components: Vec<Vec<usize>>,
}

impl ReducedGraph {
    pub fn three_vertices(&self) -> Vec<usize> {
        (0..self.is_three.len())
            .filter(|&v| self.is_three[v])
            .collect()
    }
}

/// Removes the matching from G and classifies the vertices.
pub fn reduce(g: &CubicGraph, m: &MatchingInF) -> ReducedGraph {
    let h_edges = g.full_edge_set().difference(&m.edges);
    let covered = g.degrees_in(&m.edges);
    let is_three: Vec<bool> = covered.iter().map(|&d| d == 0).collect();
    let mut h_incident = vec![Vec::new(); g.vertex_count()];
    for e in h_edges.iter() {
        let (a, b) = g.endpoints(e);
        h_incident[a].push(e);
        h_incident[b].push(e);
    }
    // Components of H by union over H-edges.
    let mut comp = vec![usize::MAX; g.vertex_count()];
    let mut components = Vec::new();
    for start in 0..g.vertex_count() {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = components.len();
        let mut members = vec![start];
        comp[start] = id;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &e in &h_incident[v] {
                let w = g.other_endpoint(e, v);
                if comp[w] == usize::MAX {
                    comp[w] = id;
                    members.push(w);
                    stack.push(w);
                }
            }
        }
        members.sort_unstable();
        components.push(members);
    }
    ReducedGraph {
        matching: m.edges.clone(),
        h_edges,
        is_three,
        h_incident,
        components,
    }
}

/// A path in H whose end-vertices are 3-vertices, whose interior vertices
/// are 2-vertices, and whose end-edges lie in F.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FPath {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

/// Vertex-disjoint F-paths covering every 3-vertex of H as an end-vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FMatching {
    pub paths: Vec<FPath>,
    pub edge_set: EdgeSet,
    /// Set when no interior edge lies on an odd cycle of F.
    pub simple: bool,
}

/// Validates a path family as an F-matching of H and computes its flags.
pub fn validate_f_matching(
    g: &CubicGraph,
    f: &TwoFactor,
    h: &ReducedGraph,
    paths: Vec<FPath>,
) -> Result<FMatching, StructureError> {
    let odd_edges = f.edges_of_cycles(g, &f.odd_cycle_indices());
    let mut used = vec![false; g.vertex_count()];
    let mut endpoint_count = vec![0usize; g.vertex_count()];
    let mut edge_set = g.empty_edge_set();
    let mut simple = true;
    for p in &paths {
        if p.edges.is_empty() || p.vertices.len() != p.edges.len() + 1 {
            return Err(StructureError::MalformedStructure(
                "path shape is inconsistent".into(),
            ));
        }
        for (i, &e) in p.edges.iter().enumerate() {
            let (a, b) = g.endpoints(e);
            if (a, b) != (p.vertices[i].min(p.vertices[i + 1]), p.vertices[i].max(p.vertices[i + 1])) {
                return Err(StructureError::MalformedStructure(
                    "path edges do not join consecutive vertices".into(),
                ));
            }
            if !h.h_edges.contains(e) {
                return Err(StructureError::MalformedStructure(format!(
                    "path edge {e} is not an edge of H"
                )));
            }
            let end_edge = i == 0 || i == p.edges.len() - 1;
            if end_edge && !f.edge_set.contains(e) {
                return Err(StructureError::MalformedStructure(format!(
                    "end-edge {e} is outside the 2-factor"
                )));
            }
            if !end_edge && odd_edges.contains(e) {
                simple = false;
            }
            edge_set.insert(e);
        }
        let last = *p.vertices.last().unwrap();
        for (i, &v) in p.vertices.iter().enumerate() {
            if used[v] {
                return Err(StructureError::MalformedStructure(format!(
                    "vertex {v} lies on two paths"
                )));
            }
            used[v] = true;
            let endpoint = i == 0 || i == p.vertices.len() - 1;
            if endpoint {
                if !h.is_three[v] {
                    return Err(StructureError::MalformedStructure(format!(
                        "end-vertex {v} is not a 3-vertex of H"
                    )));
                }
                endpoint_count[v] += 1;
            } else if h.is_three[v] {
                return Err(StructureError::MalformedStructure(format!(
                    "interior vertex {v} is a 3-vertex of H"
                )));
            }
        }
        let _ = last;
    }
    for v in 0..g.vertex_count() {
        if h.is_three[v] && endpoint_count[v] != 1 {
            return Err(StructureError::MalformedStructure(format!(
                "3-vertex {v} is an end-vertex of {} paths",
                endpoint_count[v]
            )));
        }
    }
    Ok(FMatching {
        paths,
        edge_set,
        simple,
    })
}

/// Outcome of the exhaustive F-matching search.
#[derive(Debug, Clone)]
pub enum FSearch {
    Found(FMatching),
    Absent,
    BudgetExhausted,
}

/// Visits every F-matching of H in canonical order.
///
/// Growth is depth-first from the lowest-indexed uncovered 3-vertex, taking
/// incident edges in index order; `require_simple` prunes interior edges on
/// odd cycles of F. Returns Ok(true) when the whole space was covered.
pub fn for_each_f_matching(
    g: &CubicGraph,
    f: &TwoFactor,
    h: &ReducedGraph,
    require_simple: bool,
    budget: &mut Budget,
    visit: &mut impl FnMut(&[FPath]) -> ControlFlow<()>,
) -> Result<bool, BudgetExhausted> {
    let odd_edges = f.edges_of_cycles(g, &f.odd_cycle_indices());
    let mut used = vec![false; g.vertex_count()];
    let mut family: Vec<FPath> = Vec::new();

    struct Ctx<'a, V> {
        g: &'a CubicGraph,
        f: &'a TwoFactor,
        h: &'a ReducedGraph,
        odd_edges: &'a EdgeSet,
        require_simple: bool,
        budget: &'a mut Budget,
        visit: &'a mut V,
    }

    fn family_rec<V: FnMut(&[FPath]) -> ControlFlow<()>>(
        ctx: &mut Ctx<V>,
        used: &mut Vec<bool>,
        family: &mut Vec<FPath>,
    ) -> Result<ControlFlow<()>, BudgetExhausted> {
        ctx.budget.tick()?;
        let Some(root) = (0..used.len()).find(|&v| ctx.h.is_three[v] && !used[v]) else {
            return Ok((ctx.visit)(family));
        };
        let mut vertices = vec![root];
        let mut edges = Vec::new();
        path_rec(ctx, used, family, root, &mut vertices, &mut edges)
    }

    fn path_rec<V: FnMut(&[FPath]) -> ControlFlow<()>>(
        ctx: &mut Ctx<V>,
        used: &mut Vec<bool>,
        family: &mut Vec<FPath>,
        root: usize,
        vertices: &mut Vec<usize>,
        edges: &mut Vec<usize>,
    ) -> Result<ControlFlow<()>, BudgetExhausted> {
        ctx.budget.tick()?;
        let v = *vertices.last().unwrap();
        let incident = ctx.h.h_incident[v].clone();
        for e in incident {
            if edges.last() == Some(&e) {
                continue;
            }
            let w = ctx.g.other_endpoint(e, v);
            if used[w] || vertices.contains(&w) {
                continue;
            }
            let first = edges.is_empty();
            if first && !ctx.f.edge_set.contains(e) {
                continue;
            }
            if ctx.h.is_three[w] {
                // Close the path: the final edge must lie in F.
                if !ctx.f.edge_set.contains(e) {
                    continue;
                }
                vertices.push(w);
                edges.push(e);
                for &x in vertices.iter() {
                    used[x] = true;
                }
                family.push(FPath {
                    vertices: vertices.clone(),
                    edges: edges.clone(),
                });
                let flow = family_rec(ctx, used, family)?;
                family.pop();
                for &x in vertices.iter() {
                    used[x] = false;
                }
                vertices.pop();
                edges.pop();
                if flow.is_break() {
                    return Ok(ControlFlow::Break(()));
                }
            } else {
                // Continue through a 2-vertex; e becomes a non-final edge.
                if ctx.require_simple && !first && ctx.odd_edges.contains(e) {
                    continue;
                }
                vertices.push(w);
                edges.push(e);
                let flow = path_rec(ctx, used, family, root, vertices, edges)?;
                vertices.pop();
                edges.pop();
                if flow.is_break() {
                    return Ok(ControlFlow::Break(()));
                }
            }
        }
        Ok(ControlFlow::Continue(()))
    }

    let mut ctx = Ctx {
        g,
        f,
        h,
        odd_edges: &odd_edges,
        require_simple,
        budget,
        visit,
    };
    Ok(family_rec(&mut ctx, &mut used, &mut family)?.is_continue())
}

/// First F-matching in canonical order, `Absent` when an exhaustive search
/// finds none, `BudgetExhausted` when the node budget ran out first.
pub fn find_f_matching(
    g: &CubicGraph,
    f: &TwoFactor,
    h: &ReducedGraph,
    require_simple: bool,
    budget: &mut Budget,
) -> FSearch {
    let mut found: Option<Vec<FPath>> = None;
    let outcome = for_each_f_matching(g, f, h, require_simple, budget, &mut |paths| {
        found = Some(paths.to_vec());
        ControlFlow::Break(())
    });
    match (found, outcome) {
        (Some(paths), _) => {
            let fm = validate_f_matching(g, f, h, paths).expect("search emits valid families");
            FSearch::Found(fm)
        }
        (None, Ok(_)) => FSearch::Absent,
        (None, Err(_)) => FSearch::BudgetExhausted,
    }
}

/// One loop of an F-complement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Loop {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    pub three_count: usize,
}

impl Loop {
    pub fn three_even(&self) -> bool {
        self.three_count % 2 == 0
    }
}

/// The loops of H left after deleting an F-matching's edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FComplement {
    pub loops: Vec<Loop>,
}

impl FComplement {
    pub fn three_even(&self) -> bool {
        self.loops.iter().all(Loop::three_even)
    }

    pub fn three_odd_loop_indices(&self) -> Vec<usize> {
        (0..self.loops.len())
            .filter(|&i| !self.loops[i].three_even())
            .collect()
    }

    pub fn edge_set(&self, g: &CubicGraph) -> EdgeSet {
        let mut s = g.empty_edge_set();
        for l in &self.loops {
            for &e in &l.edges {
                s.insert(e);
            }
        }
        s
    }
}

/// Loop decomposition of H minus the F-matching edges, with 3-parities.
pub fn f_complement(
    g: &CubicGraph,
    h: &ReducedGraph,
    fm: &FMatching,
) -> Result<FComplement, StructureError> {
    let remaining = h.h_edges.difference(&fm.edge_set);
    let view = SubgraphView::new(g, remaining.clone());
    if view.degrees.iter().any(|&d| d != 0 && d != 2) {
        return Err(StructureError::MalformedStructure(
            "complement of the F-matching is not a disjoint union of cycles".into(),
        ));
    }
    for v in 0..g.vertex_count() {
        if h.is_three[v] && view.degrees[v] != 2 {
            return Err(StructureError::MalformedStructure(format!(
                "3-vertex {v} is not on a loop"
            )));
        }
    }
    let loops: Vec<Loop> = cycles_of_two_regular(g, &remaining)
        .into_iter()
        .map(|vertices| {
            let edges: Vec<usize> = (0..vertices.len())
                .map(|i| {
                    g.edge_index(vertices[i], vertices[(i + 1) % vertices.len()])
                        .expect("loop edge")
                })
                .collect();
            let three_count = vertices.iter().filter(|&&v| h.is_three[v]).count();
            Loop {
                vertices,
                edges,
                three_count,
            }
        })
        .collect();
    if let Some(l) = loops.iter().find(|l| l.vertices.len() % 2 == 1) {
        return Err(StructureError::MalformedStructure(format!(
            "loop through vertex {} has odd length",
            l.vertices[0]
        )));
    }
    Ok(FComplement { loops })
}

/// Classification of the component holding the two 3-vertices in the
/// oddness-two, maximum-matching case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MainComponent {
    /// Two 3-vertices joined by three internally disjoint paths.
    Theta { paths: [FPath; 3] },
    /// Two vertex-disjoint cycles joined by a path.
    KayakPaddle {
        cycle_a: Vec<usize>,
        path: FPath,
        cycle_b: Vec<usize>,
    },
    Other,
}

/// Walks from `start` along `first_edge` through 2-vertices of H until the
/// next 3-vertex.
fn chain_walk(
    g: &CubicGraph,
    h: &ReducedGraph,
    start: usize,
    first_edge: usize,
) -> (Vec<usize>, Vec<usize>) {
    let mut vertices = vec![start];
    let mut edges = vec![first_edge];
    let mut prev_edge = first_edge;
    let mut cur = g.other_endpoint(first_edge, start);
    vertices.push(cur);
    while !h.is_three[cur] {
        let &next_edge = h.h_incident[cur]
            .iter()
            .find(|&&e| e != prev_edge)
            .expect("2-vertex has a second H-edge");
        cur = g.other_endpoint(next_edge, cur);
        vertices.push(cur);
        edges.push(next_edge);
        prev_edge = next_edge;
    }
    (vertices, edges)
}

pub fn classify_main_component(
    g: &CubicGraph,
    h: &ReducedGraph,
) -> Result<MainComponent, StructureError> {
    let three = h.three_vertices();
    if three.len() != 2 {
        return Err(StructureError::WrongVertexCount(three.len()));
    }
    let (r1, r2) = (three[0], three[1]);
    let mut to_r2: Vec<FPath> = Vec::new();
    let mut loops_at_r1: Vec<Vec<usize>> = Vec::new();
    for &e in &h.h_incident[r1] {
        let (vertices, edges) = chain_walk(g, h, r1, e);
        let end = *vertices.last().unwrap();
        if end == r2 {
            to_r2.push(FPath { vertices, edges });
        } else if end == r1 {
            loops_at_r1.push(vertices);
        } else {
            return Err(StructureError::MalformedStructure(format!(
                "walk from {r1} ended at unexpected 3-vertex {end}"
            )));
        }
    }
    match (to_r2.len(), loops_at_r1.len()) {
        (3, 0) => {
            let mut it = to_r2.into_iter();
            Ok(MainComponent::Theta {
                paths: [it.next().unwrap(), it.next().unwrap(), it.next().unwrap()],
            })
        }
        (1, 2) => {
            // The two r1 walks traverse the same cycle both ways.
            let mut cycle_a = loops_at_r1.swap_remove(0);
            cycle_a.pop();
            let path = to_r2.swap_remove(0);
            // The cycle at r2 is found from its two edges off the path.
            let last_path_edge = *path.edges.last().unwrap();
            let e = *h.h_incident[r2]
                .iter()
                .find(|&&e| e != last_path_edge)
                .expect("r2 has an off-path edge");
            let (mut cycle_b, _) = chain_walk(g, h, r2, e);
            if *cycle_b.last().unwrap() != r2 {
                return Ok(MainComponent::Other);
            }
            cycle_b.pop();
            Ok(MainComponent::KayakPaddle {
                cycle_a,
                path,
                cycle_b,
            })
        }
        _ => Ok(MainComponent::Other),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factor::{perfect_matchings, two_factor};
    use crate::generators;

    fn max_matching_of(
        g: &CubicGraph,
        f: &TwoFactor,
        odd_skips: &[usize],
    ) -> MatchingInF {
        // Maximum matching: skip one vertex per odd cycle, cover evens fully.
        let mut edges = Vec::new();
        let mut odd_i = 0;
        for (ci, cycle) in f.cycles.iter().enumerate() {
            if cycle.len() % 2 == 1 {
                edges.extend(crate::factor::odd_cycle_matching_avoiding(
                    g, f, ci, odd_skips[odd_i],
                ));
                odd_i += 1;
            } else {
                edges.extend(crate::factor::even_cycle_matchings(g, f, ci)[0].clone());
            }
        }
        MatchingInF::new(g, f, EdgeSet::from_indices(g.edge_count(), &edges)).unwrap()
    }

    #[test]
    fn empty_matching_leaves_all_three_vertices() {
        let g = generators::petersen();
        let pm = &perfect_matchings(&g, Some(1)).unwrap()[0];
        let f = two_factor(&g, pm).unwrap();
        let m = MatchingInF::new(&g, &f, g.empty_edge_set()).unwrap();
        assert!(!m.maximum);
        let h = reduce(&g, &m);
        assert_eq!(h.three_vertices().len(), 10);
    }

    #[test]
    fn petersen_maximum_matching_leaves_one_three_vertex_per_cycle() {
        let g = generators::petersen();
        let pm = &perfect_matchings(&g, Some(1)).unwrap()[0];
        let f = two_factor(&g, pm).unwrap();
        let m = max_matching_of(&g, &f, &[0, 0]);
        assert!(m.maximum);
        let h = reduce(&g, &m);
        let three = h.three_vertices();
        assert_eq!(three.len(), 2);
        assert_eq!(three.len(), g.vertex_count() - 2 * m.edges.count());
        for cycle in &f.cycles {
            assert_eq!(three.iter().filter(|v| cycle.contains(v)).count(), 1);
        }
    }

    #[test]
    fn k4_perfect_matching_in_f_leaves_none() {
        let g = generators::k4();
        let pm = &perfect_matchings(&g, Some(1)).unwrap()[0];
        let f = two_factor(&g, pm).unwrap();
        let m = max_matching_of(&g, &f, &[]);
        assert!(m.maximum);
        let h = reduce(&g, &m);
        assert!(h.three_vertices().is_empty());
        // Zero 3-vertices: the empty family is vacuously an F-matching.
        match find_f_matching(&g, &f, &h, false, &mut Budget::unlimited()) {
            FSearch::Found(fm) => assert!(fm.paths.is_empty() && fm.simple),
            other => panic!("expected empty F-matching, got {other:?}"),
        }
    }

    #[test]
    fn matching_in_f_rejects_bad_inputs() {
        let g = generators::petersen();
        let pm = &perfect_matchings(&g, Some(1)).unwrap()[0];
        let f = two_factor(&g, pm).unwrap();
        let outside = pm.to_vec()[0];
        assert!(matches!(
            MatchingInF::new(&g, &f, EdgeSet::from_indices(g.edge_count(), &[outside])),
            Err(StructureError::NotInFactor(_))
        ));
        let c = &f.cycles[0];
        let e1 = g.edge_index(c[0], c[1]).unwrap();
        let e2 = g.edge_index(c[1], c[2]).unwrap();
        assert!(matches!(
            MatchingInF::new(&g, &f, EdgeSet::from_indices(g.edge_count(), &[e1, e2])),
            Err(StructureError::NotAMatching(..))
        ));
    }

    #[test]
    fn petersen_maximum_matchings_classify_as_theta_or_kayak() {
        // Scan all (perfect matching, uncovered-vertex) choices; every
        // main component is a theta or a kayak paddle, thetas occur, and
        // every theta has at least one connecting path that is an F-path,
        // giving a 3-even complement through the search.
        let g = generators::petersen();
        let mut thetas = 0usize;
        let mut kayaks = 0usize;
        for pm in perfect_matchings(&g, None).unwrap() {
            let f = two_factor(&g, &pm).unwrap();
            for skip_a in 0..5 {
                for skip_b in 0..5 {
                    let m = max_matching_of(&g, &f, &[skip_a, skip_b]);
                    let h = reduce(&g, &m);
                    match classify_main_component(&g, &h).unwrap() {
                        MainComponent::Theta { paths } => {
                            thetas += 1;
                            let f_path_count = paths
                                .iter()
                                .filter(|p| {
                                    f.edge_set.contains(p.edges[0])
                                        && f.edge_set.contains(*p.edges.last().unwrap())
                                })
                                .count();
                            assert!(f_path_count >= 1);
                            match find_f_matching(&g, &f, &h, false, &mut Budget::unlimited()) {
                                FSearch::Found(fm) => {
                                    assert_eq!(fm.paths.len(), 1);
                                    let fc = f_complement(&g, &h, &fm).unwrap();
                                    assert!(fc.loops.iter().any(|l| l.three_count == 2));
                                }
                                other => panic!("theta instance lost its F-matching: {other:?}"),
                            }
                        }
                        MainComponent::KayakPaddle { .. } => kayaks += 1,
                        MainComponent::Other => panic!("impossible main component"),
                    }
                }
            }
        }
        assert!(thetas > 0, "no theta instance among Petersen maximum matchings");
        assert!(kayaks > 0, "no kayak instance among Petersen maximum matchings");
    }

    #[test]
    fn wrong_vertex_count_is_rejected() {
        let g = generators::petersen();
        let pm = &perfect_matchings(&g, Some(1)).unwrap()[0];
        let f = two_factor(&g, pm).unwrap();
        let m = MatchingInF::new(&g, &f, g.empty_edge_set()).unwrap();
        let h = reduce(&g, &m);
        assert!(matches!(
            classify_main_component(&g, &h),
            Err(StructureError::WrongVertexCount(10))
        ));
    }

    #[test]
    fn loops_are_even_and_partition_h_edges() {
        let g = generators::petersen();
        for pm in perfect_matchings(&g, None).unwrap() {
            let f = two_factor(&g, &pm).unwrap();
            let m = max_matching_of(&g, &f, &[1, 2]);
            let h = reduce(&g, &m);
            if let FSearch::Found(fm) = find_f_matching(&g, &f, &h, false, &mut Budget::unlimited())
            {
                let fc = f_complement(&g, &h, &fm).unwrap();
                let mut union = fm.edge_set.clone();
                for l in &fc.loops {
                    assert_eq!(l.vertices.len() % 2, 0);
                    for &e in &l.edges {
                        assert!(!union.contains(e), "loop and path edges overlap");
                        union.insert(e);
                    }
                }
                assert_eq!(union, h.h_edges);
            }
        }
    }

    #[test]
    fn kayak_with_non_factor_connecting_path_has_no_f_matching() {
        // Problem P1: a maximum matching whose main component is a kayak
        // paddle whose unique connecting path fails to be an F-path.
        let g = generators::petersen();
        let mut hits = 0usize;
        for pm in perfect_matchings(&g, None).unwrap() {
            let f = two_factor(&g, &pm).unwrap();
            for skip_a in 0..5 {
                for skip_b in 0..5 {
                    let m = max_matching_of(&g, &f, &[skip_a, skip_b]);
                    let h = reduce(&g, &m);
                    let Ok(MainComponent::KayakPaddle { path, .. }) =
                        classify_main_component(&g, &h)
                    else {
                        continue;
                    };
                    let is_f_path = f.edge_set.contains(path.edges[0])
                        && f.edge_set.contains(*path.edges.last().unwrap());
                    let search = find_f_matching(&g, &f, &h, false, &mut Budget::unlimited());
                    if !is_f_path {
                        hits += 1;
                        assert!(
                            matches!(search, FSearch::Absent),
                            "non-F connecting path must leave H without an F-matching"
                        );
                    }
                }
            }
        }
        assert!(hits > 0, "no P1 instance found on Petersen");
    }

    #[test]
    fn budget_exhaustion_is_reported_distinctly() {
        let g = generators::petersen();
        let pm = &perfect_matchings(&g, Some(1)).unwrap()[0];
        let f = two_factor(&g, pm).unwrap();
        let m = MatchingInF::new(&g, &f, g.empty_edge_set()).unwrap();
        let h = reduce(&g, &m);
        assert!(matches!(
            find_f_matching(&g, &f, &h, false, &mut Budget::new(3)),
            FSearch::BudgetExhausted
        ));
    }

    /// Independent oracle for small H: enumerate all subsets of H-edges and
    /// test the F-matching property directly.
    fn naive_has_f_matching(g: &CubicGraph, f: &TwoFactor, h: &ReducedGraph) -> bool {
        let h_list = h.h_edges.to_vec();
        let m = h_list.len();
        'subsets: for mask in 0u64..(1 << m) {
            let chosen: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| h_list[i]).collect();
            let set = EdgeSet::from_indices(g.edge_count(), &chosen);
            let deg = g.degrees_in(&set);
            // Must be a disjoint union of paths whose ends are exactly the
            // 3-vertices, interiors 2-vertices, end-edges in F.
            for v in 0..g.vertex_count() {
                if deg[v] > 2 {
                    continue 'subsets;
                }
            }
            let endpoints: Vec<usize> = (0..g.vertex_count()).filter(|&v| deg[v] == 1).collect();
            let three = h.three_vertices();
            if endpoints != three {
                continue;
            }
            for v in 0..g.vertex_count() {
                if h.is_three[v] && deg[v] != 1 {
                    continue 'subsets;
                }
                if !h.is_three[v] && deg[v] == 1 {
                    continue 'subsets;
                }
            }
            // No cycles: edge count equals vertex count minus path count.
            let touched = (0..g.vertex_count()).filter(|&v| deg[v] > 0).count();
            if chosen.len() != touched.saturating_sub(endpoints.len() / 2) {
                continue;
            }
            // End-edges must lie in F.
            for &v in &endpoints {
                let e = chosen
                    .iter()
                    .copied()
                    .find(|&e| {
                        let (a, b) = g.endpoints(e);
                        a == v || b == v
                    })
                    .unwrap();
                if !f.edge_set.contains(e) {
                    continue 'subsets;
                }
            }
            return true;
        }
        false
    }

    #[test]
    fn exhaustive_search_agrees_with_naive_oracle_on_small_instances() {
        let g = generators::petersen();
        let pms = perfect_matchings(&g, None).unwrap();
        let mut checked = 0;
        for pm in &pms {
            let f = two_factor(&g, pm).unwrap();
            for skip_a in 0..3 {
                let m = max_matching_of(&g, &f, &[skip_a, 2 * skip_a % 5]);
                let h = reduce(&g, &m);
                let fast = matches!(
                    find_f_matching(&g, &f, &h, false, &mut Budget::unlimited()),
                    FSearch::Found(_)
                );
                assert_eq!(fast, naive_has_f_matching(&g, &f, &h));
                checked += 1;
            }
        }
        assert!(checked >= 18);
    }
}
