//! Cubic graph representation with canonical vertex/edge indexing.

use crate::bits::EdgeSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("malformed graph6 input: {0}")]
    MalformedGraph6(String),
    #[error("graph is not cubic: vertex {vertex} has degree {degree}")]
    NotCubic { vertex: usize, degree: usize },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("parallel edge between {0} and {1}")]
    ParallelEdge(usize, usize),
    #[error("edge set is not a matching: edges {0} and {1} share a vertex")]
    NotAMatching(usize, usize),
    #[error("edge reduction would create a self-loop at suppressed vertex {0}")]
    SelfLoopCreated(usize),
    #[error("edge reduction would create a multi-edge between {0} and {1}")]
    MultiEdgeCreated(usize, usize),
}

/// Immutable simple cubic graph.
///
/// Vertices are `0..n`. Edges are stored sorted lexicographically by
/// `(min endpoint, max endpoint)`; the position in this list is the
/// canonical edge index, stable across runs and serializations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubicGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<[usize; 3]>,
}

impl CubicGraph {
    /// Builds a graph from an unordered list of vertex pairs.
    ///
    /// Rejects self-loops, parallel edges, non-cubic degree sequences and
    /// disconnected inputs.
    pub fn from_edges(n: usize, raw: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut edges: Vec<(usize, usize)> = Vec::with_capacity(raw.len());
        for &(a, b) in raw {
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            assert!(a < n && b < n, "edge endpoint out of range");
            edges.push((a.min(b), a.max(b)));
        }
        edges.sort_unstable();
        for w in edges.windows(2) {
            if w[0] == w[1] {
                return Err(GraphError::ParallelEdge(w[0].0, w[0].1));
            }
        }
        let mut degree = vec![0usize; n];
        let mut adjacency = vec![[usize::MAX; 3]; n];
        for (i, &(a, b)) in edges.iter().enumerate() {
            for v in [a, b] {
                if degree[v] == 3 {
                    return Err(GraphError::NotCubic {
                        vertex: v,
                        degree: 4,
                    });
                }
                adjacency[v][degree[v]] = i;
                degree[v] += 1;
            }
        }
        if let Some(v) = degree.iter().position(|&d| d != 3) {
            return Err(GraphError::NotCubic {
                vertex: v,
                degree: degree[v],
            });
        }
        let g = CubicGraph { n, edges, adjacency };
        if !g.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn endpoints(&self, edge: usize) -> (usize, usize) {
        self.edges[edge]
    }

    /// The three canonical edge indices incident to `v`, in increasing order.
    pub fn incident_edges(&self, v: usize) -> [usize; 3] {
        self.adjacency[v]
    }

    /// The canonical edge index of `{a, b}`, if present.
    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        let key = (a.min(b), a.max(b));
        self.edges.binary_search(&key).ok()
    }

    pub fn other_endpoint(&self, edge: usize, v: usize) -> usize {
        let (a, b) = self.edges[edge];
        if a == v {
            b
        } else {
            debug_assert_eq!(b, v);
            a
        }
    }

    pub fn neighbors(&self, v: usize) -> [usize; 3] {
        let mut out = [0; 3];
        for (i, &e) in self.adjacency[v].iter().enumerate() {
            out[i] = self.other_endpoint(e, v);
        }
        out
    }

    pub fn empty_edge_set(&self) -> EdgeSet {
        EdgeSet::new(self.edges.len())
    }

    pub fn full_edge_set(&self) -> EdgeSet {
        EdgeSet::from_indices(self.edges.len(), &(0..self.edges.len()).collect::<Vec<_>>())
    }

    fn is_connected(&self) -> bool {
        if self.n == 0 {
            return false;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for w in self.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }

    /// All cut edges, found with one DFS (low-link).
    ///
    /// The result is empty exactly when the graph is 2-edge-connected.
    pub fn find_bridges(&self) -> EdgeSet {
        let mut bridges = self.empty_edge_set();
        let mut visit = vec![usize::MAX; self.n];
        let mut low = vec![usize::MAX; self.n];
        // Iterative DFS; frame = (vertex, incoming edge, next incident slot).
        let mut stack: Vec<(usize, usize, usize)> = vec![(0, usize::MAX, 0)];
        visit[0] = 0;
        low[0] = 0;
        let mut clock = 1usize;
        while let Some(&mut (v, parent_edge, ref mut slot)) = stack.last_mut() {
            if *slot < 3 {
                let e = self.adjacency[v][*slot];
                *slot += 1;
                if e == parent_edge {
                    continue;
                }
                let w = self.other_endpoint(e, v);
                if visit[w] == usize::MAX {
                    visit[w] = clock;
                    low[w] = clock;
                    clock += 1;
                    stack.push((w, e, 0));
                } else {
                    low[v] = low[v].min(visit[w]);
                }
            } else {
                stack.pop();
                if let Some(&mut (u, _, _)) = stack.last_mut() {
                    low[u] = low[u].min(low[v]);
                    if low[v] > visit[u] {
                        bridges.insert(parent_edge);
                    }
                }
            }
        }
        bridges
    }

    pub fn is_bridgeless(&self) -> bool {
        self.find_bridges().is_empty()
    }

    /// Length of a shortest cycle.
    pub fn girth(&self) -> usize {
        let mut best = usize::MAX;
        // Shortest cycle through each edge: BFS between its endpoints with
        // the edge itself removed.
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            let mut dist = vec![usize::MAX; self.n];
            dist[a] = 0;
            let mut queue = std::collections::VecDeque::from([a]);
            'bfs: while let Some(v) = queue.pop_front() {
                for (slot, &f) in self.adjacency[v].iter().enumerate() {
                    if f == e {
                        continue;
                    }
                    let w = self.neighbors(v)[slot];
                    if dist[w] == usize::MAX {
                        dist[w] = dist[v] + 1;
                        if w == b {
                            break 'bfs;
                        }
                        queue.push_back(w);
                    }
                }
            }
            if dist[b] != usize::MAX {
                best = best.min(dist[b] + 1);
            }
        }
        best
    }

    /// Deletes a matching and suppresses the arising degree-2 vertices.
    ///
    /// Surviving vertices are relabeled in increasing order of their old
    /// labels, so the result has canonical indexing again.
    pub fn edge_reduction(&self, removed: &EdgeSet) -> Result<CubicGraph, GraphError> {
        let (n, edges) = self.suppress_matching(removed)?;
        CubicGraph::from_edges(n, &edges)
    }

    /// The raw edge list after deleting a matching and suppressing the
    /// degree-2 vertices, before the connectivity check. Relabeled to
    /// 0..n'; rejects non-matchings and reductions that would create a
    /// self-loop or multi-edge.
    pub fn suppress_matching(
        &self,
        removed: &EdgeSet,
    ) -> Result<(usize, Vec<(usize, usize)>), GraphError> {
        let sel = removed.to_vec();
        for (i, &e) in sel.iter().enumerate() {
            for &f in &sel[i + 1..] {
                let (a, b) = self.edges[e];
                let (c, d) = self.edges[f];
                if a == c || a == d || b == c || b == d {
                    return Err(GraphError::NotAMatching(e, f));
                }
            }
        }
        let mut suppressed = vec![false; self.n];
        for &e in &sel {
            let (a, b) = self.edges[e];
            suppressed[a] = true;
            suppressed[b] = true;
        }
        // Walk from each surviving vertex through suppressed chains to find
        // the reduced edges.
        let mut new_edges: Vec<(usize, usize)> = Vec::new();
        let mut seen_pairs = std::collections::BTreeSet::new();
        let mut walked = vec![false; self.edges.len()];
        for v in 0..self.n {
            if suppressed[v] {
                continue;
            }
            for (slot, &e) in self.adjacency[v].iter().enumerate() {
                if removed.contains(e) {
                    continue;
                }
                walked[e] = true;
                let mut cur = self.neighbors(v)[slot];
                let mut prev_edge = e;
                while suppressed[cur] {
                    // A suppressed vertex keeps exactly two live edges.
                    let mut advanced = false;
                    for &f in &self.adjacency[cur] {
                        if f == prev_edge || removed.contains(f) {
                            continue;
                        }
                        walked[f] = true;
                        cur = self.other_endpoint(f, cur);
                        prev_edge = f;
                        advanced = true;
                        break;
                    }
                    assert!(advanced, "suppressed vertex lost both live edges");
                }
                if cur == v {
                    return Err(GraphError::SelfLoopCreated(v));
                }
                if cur > v {
                    if !seen_pairs.insert((v, cur)) {
                        return Err(GraphError::MultiEdgeCreated(v, cur));
                    }
                    new_edges.push((v, cur));
                }
            }
        }
        // A live cycle made entirely of suppressed vertices would vanish
        // silently; treat it like a degenerate self-loop.
        for e in 0..self.edges.len() {
            if !removed.contains(e) && !walked[e] {
                let (a, b) = self.edges[e];
                if suppressed[a] && suppressed[b] {
                    return Err(GraphError::SelfLoopCreated(a));
                }
            }
        }
        // Multi-edges between the same surviving pair may be discovered from
        // either side; the pair set above catches them. A pair seen once from
        // each direction is the same edge, so dedup is not needed.
        let survivors: Vec<usize> = (0..self.n).filter(|&v| !suppressed[v]).collect();
        let mut relabel = vec![usize::MAX; self.n];
        for (new, &old) in survivors.iter().enumerate() {
            relabel[old] = new;
        }
        let relabeled: Vec<(usize, usize)> = new_edges
            .iter()
            .map(|&(a, b)| (relabel[a], relabel[b]))
            .collect();
        Ok((survivors.len(), relabeled))
    }

    /// Per-vertex degrees within an edge subset.
    pub fn degrees_in(&self, set: &EdgeSet) -> Vec<usize> {
        let mut deg = vec![0usize; self.n];
        for e in set.iter() {
            let (a, b) = self.edges[e];
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }
}

/// An edge subset of a host graph together with its degree table.
#[derive(Debug, Clone)]
pub struct SubgraphView {
    pub edges: EdgeSet,
    pub degrees: Vec<usize>,
}

impl SubgraphView {
    pub fn new(g: &CubicGraph, edges: EdgeSet) -> Self {
        let degrees = g.degrees_in(&edges);
        SubgraphView { edges, degrees }
    }

    pub fn is_perfect_matching(&self) -> bool {
        self.degrees.iter().all(|&d| d == 1)
    }

    pub fn is_matching(&self) -> bool {
        self.degrees.iter().all(|&d| d <= 1)
    }

    pub fn is_two_regular(&self) -> bool {
        self.degrees.iter().all(|&d| d == 2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    fn naive_bridges(g: &CubicGraph) -> Vec<usize> {
        // Delete each edge in turn and test connectivity by BFS.
        let mut out = Vec::new();
        for e in 0..g.edge_count() {
            let mut seen = vec![false; g.vertex_count()];
            seen[0] = true;
            let mut stack = vec![0usize];
            let mut count = 1;
            while let Some(v) = stack.pop() {
                for (slot, &f) in g.incident_edges(v).iter().enumerate() {
                    if f == e {
                        continue;
                    }
                    let w = g.neighbors(v)[slot];
                    if !seen[w] {
                        seen[w] = true;
                        count += 1;
                        stack.push(w);
                    }
                }
            }
            if count != g.vertex_count() {
                out.push(e);
            }
        }
        out
    }

    #[test]
    fn k4_shape() {
        let g = generators::k4();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edge_count(), 6);
        assert_eq!(g.incident_edges(0), [0, 1, 2]);
    }

    #[test]
    fn rejects_degenerate_inputs() {
        assert!(matches!(
            CubicGraph::from_edges(2, &[(0, 0), (0, 1), (1, 1)]),
            Err(GraphError::SelfLoop(_))
        ));
        assert!(matches!(
            CubicGraph::from_edges(4, &[(0, 1), (0, 1), (2, 3), (0, 2), (1, 3), (2, 3)]),
            Err(GraphError::ParallelEdge(..))
        ));
        // Path P3: degree-1 endpoints.
        assert!(matches!(
            CubicGraph::from_edges(3, &[(0, 1), (1, 2)]),
            Err(GraphError::NotCubic { .. })
        ));
    }

    #[test]
    fn petersen_and_k4_are_bridgeless() {
        assert!(generators::petersen().find_bridges().is_empty());
        assert!(generators::k4().find_bridges().is_empty());
    }

    #[test]
    fn bridge_gadget_found_and_matches_naive_oracle() {
        // Two copies of K4 with one edge subdivided, joined through the
        // subdivision vertices: the joining edge is the unique bridge.
        let mut edges = Vec::new();
        // Copy one on 0..4 with subdivision vertex 4 on edge (0,1).
        edges.extend([(0, 4), (4, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        // Copy two on 5..9 with subdivision vertex 9 on edge (5,6).
        edges.extend([(5, 9), (9, 6), (5, 7), (5, 8), (6, 7), (6, 8), (7, 8)]);
        edges.push((4, 9));
        let g = CubicGraph::from_edges(10, &edges).unwrap();
        let bridges = g.find_bridges();
        let expected = g.edge_index(4, 9).unwrap();
        assert_eq!(bridges.to_vec(), vec![expected]);
        assert_eq!(naive_bridges(&g), vec![expected]);
    }

    #[test]
    fn bridges_agree_with_naive_oracle_on_corpus() {
        for g in [
            generators::petersen(),
            generators::q3(),
            generators::prism(),
            generators::k33(),
            generators::flower(5).unwrap(),
        ] {
            assert_eq!(g.find_bridges().to_vec(), naive_bridges(&g));
        }
    }

    #[test]
    fn girth_of_fixtures() {
        assert_eq!(generators::k4().girth(), 3);
        assert_eq!(generators::k33().girth(), 4);
        assert_eq!(generators::petersen().girth(), 5);
    }

    #[test]
    fn edge_reduction_on_cube() {
        let g = generators::q3();
        let mut rm = g.empty_edge_set();
        rm.insert(0);
        let r = g.edge_reduction(&rm).unwrap();
        assert_eq!(r.vertex_count(), 6);
        assert_eq!(r.edge_count(), 9);
    }

    #[test]
    fn edge_reduction_rejects_non_matching() {
        let g = generators::q3();
        let e0 = g.incident_edges(0)[0];
        let e1 = g.incident_edges(0)[1];
        let rm = EdgeSet::from_indices(g.edge_count(), &[e0, e1]);
        assert!(matches!(
            g.edge_reduction(&rm),
            Err(GraphError::NotAMatching(..))
        ));
    }

    #[test]
    fn edge_reduction_detects_multi_edge() {
        // Removing one rung of the prism makes the two triangles share two
        // suppressed chains between the same vertex pair.
        let g = generators::prism();
        let rung = g.edge_index(0, 3).unwrap();
        let rm = EdgeSet::from_indices(g.edge_count(), &[rung]);
        let err = g.edge_reduction(&rm).unwrap_err();
        assert!(matches!(
            err,
            GraphError::MultiEdgeCreated(..) | GraphError::SelfLoopCreated(_)
        ));
    }
}
