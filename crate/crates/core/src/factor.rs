//! Perfect matchings, their complementary 2-factors, cycle decompositions,
//! and oddness.

use crate::bits::EdgeSet;
use crate::graph::{CubicGraph, SubgraphView};
use serde::{Deserialize, Serialize};
use std::ops::ControlFlow;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FactorError {
    #[error("graph has no perfect matching")]
    NoPerfectMatching,
    #[error("edge set is not a perfect matching")]
    NotPerfectMatching,
}

/// A spanning 2-regular subgraph as a list of cycles.
///
/// Cycles are canonical: each starts at its smallest vertex and runs toward
/// that vertex's smaller cycle neighbor; the list is sorted by start vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoFactor {
    pub cycles: Vec<Vec<usize>>,
    pub edge_set: EdgeSet,
}

impl TwoFactor {
    pub fn odd_cycle_indices(&self) -> Vec<usize> {
        (0..self.cycles.len())
            .filter(|&i| self.cycles[i].len() % 2 == 1)
            .collect()
    }

    pub fn even_cycle_indices(&self) -> Vec<usize> {
        (0..self.cycles.len())
            .filter(|&i| self.cycles[i].len() % 2 == 0)
            .collect()
    }

    pub fn odd_cycle_count(&self) -> usize {
        self.odd_cycle_indices().len()
    }

    /// Edge indices along cycle `i`, in traversal order.
    pub fn cycle_edges(&self, g: &CubicGraph, i: usize) -> Vec<usize> {
        let c = &self.cycles[i];
        (0..c.len())
            .map(|j| g.edge_index(c[j], c[(j + 1) % c.len()]).expect("cycle edge"))
            .collect()
    }

    /// Edge set of the union of all odd (resp. even) cycles.
    pub fn edges_of_cycles(&self, g: &CubicGraph, idx: &[usize]) -> EdgeSet {
        let mut s = g.empty_edge_set();
        for &i in idx {
            for e in self.cycle_edges(g, i) {
                s.insert(e);
            }
        }
        s
    }

    /// Cycle index containing vertex `v`.
    pub fn cycle_of_vertex(&self, v: usize) -> usize {
        self.cycles
            .iter()
            .position(|c| c.contains(&v))
            .expect("2-factor spans all vertices")
    }
}

/// Visits perfect matchings in canonical lexicographic order of their
/// edge-index sets. Returns `true` when the enumeration ran to completion.
///
/// Backtracks on the lowest-indexed uncovered vertex, trying its incident
/// edges in index order; because each chosen edge has its smaller endpoint
/// at that vertex, emission order is lexicographic.
pub fn for_each_perfect_matching(
    g: &CubicGraph,
    mut visit: impl FnMut(&EdgeSet) -> ControlFlow<()>,
) -> bool {
    let n = g.vertex_count();
    let mut covered = vec![false; n];
    let mut chosen: Vec<usize> = Vec::with_capacity(n / 2);
    fn rec(
        g: &CubicGraph,
        covered: &mut Vec<bool>,
        chosen: &mut Vec<usize>,
        visit: &mut impl FnMut(&EdgeSet) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let Some(v) = covered.iter().position(|&c| !c) else {
            let set = EdgeSet::from_indices(g.edge_count(), chosen);
            return visit(&set);
        };
        for &e in &g.incident_edges(v) {
            let w = g.other_endpoint(e, v);
            if covered[w] {
                continue;
            }
            covered[v] = true;
            covered[w] = true;
            chosen.push(e);
            let flow = rec(g, covered, chosen, visit);
            chosen.pop();
            covered[v] = false;
            covered[w] = false;
            flow?;
        }
        ControlFlow::Continue(())
    }
    rec(g, &mut covered, &mut chosen, &mut visit).is_continue()
}

/// The default enumeration cap: everything on small graphs, a bounded
/// prefix above 30 vertices.
pub fn default_pm_limit(g: &CubicGraph) -> Option<usize> {
    if g.vertex_count() <= 30 {
        None
    } else {
        Some(300)
    }
}

/// Distinct perfect matchings in canonical order, at most `limit` of them.
///
/// `limit = None` enumerates exhaustively. Errs only when the graph has no
/// perfect matching at all (impossible for bridgeless cubic graphs).
pub fn perfect_matchings(
    g: &CubicGraph,
    limit: Option<usize>,
) -> Result<Vec<EdgeSet>, FactorError> {
    let mut out = Vec::new();
    for_each_perfect_matching(g, |pm| {
        out.push(pm.clone());
        if limit.is_some_and(|l| out.len() >= l) {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    if out.is_empty() {
        return Err(FactorError::NoPerfectMatching);
    }
    Ok(out)
}

/// Cycle decomposition of the complement of a perfect matching.
pub fn two_factor(g: &CubicGraph, pm: &EdgeSet) -> Result<TwoFactor, FactorError> {
    if !SubgraphView::new(g, pm.clone()).is_perfect_matching() {
        return Err(FactorError::NotPerfectMatching);
    }
    let edge_set = g.full_edge_set().difference(pm);
    Ok(TwoFactor {
        cycles: cycles_of_two_regular(g, &edge_set),
        edge_set,
    })
}

/// Decomposes a 2-regular edge set into canonical cycles.
///
/// Panics if some vertex touched by the set does not have degree exactly 2
/// in it; callers validate first.
pub fn cycles_of_two_regular(g: &CubicGraph, edges: &EdgeSet) -> Vec<Vec<usize>> {
    let deg = g.degrees_in(edges);
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); g.vertex_count()];
    for e in edges.iter() {
        let (a, b) = g.endpoints(e);
        incident[a].push(e);
        incident[b].push(e);
    }
    let mut seen = vec![false; g.vertex_count()];
    let mut cycles = Vec::new();
    for start in 0..g.vertex_count() {
        if seen[start] || deg[start] == 0 {
            continue;
        }
        assert_eq!(deg[start], 2, "edge set is not 2-regular at {start}");
        // Traverse toward the smaller neighbor first.
        let mut nbrs: Vec<usize> = incident[start]
            .iter()
            .map(|&e| g.other_endpoint(e, start))
            .collect();
        nbrs.sort_unstable();
        let mut cycle = vec![start];
        seen[start] = true;
        let mut prev = start;
        let mut cur = nbrs[0];
        while cur != start {
            assert_eq!(deg[cur], 2, "edge set is not 2-regular at {cur}");
            cycle.push(cur);
            seen[cur] = true;
            let next = incident[cur]
                .iter()
                .map(|&e| g.other_endpoint(e, cur))
                .find(|&w| w != prev)
                .expect("degree-2 vertex has a forward neighbor");
            prev = cur;
            cur = next;
        }
        cycles.push(cycle);
    }
    cycles
}

/// Result of an oddness scan over perfect matchings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OddnessWitness {
    pub factor: TwoFactor,
    pub oddness: usize,
    /// False when the scan stopped at a budget before exhausting all
    /// perfect matchings, so the reported value is only an upper bound.
    pub proven_minimal: bool,
}

/// A 2-factor minimizing the number of odd cycles, scanning perfect
/// matchings in canonical order up to `pm_limit`.
pub fn oddness_witness(g: &CubicGraph, pm_limit: Option<usize>) -> Result<OddnessWitness, FactorError> {
    let mut best: Option<TwoFactor> = None;
    let mut best_odd = usize::MAX;
    let mut count = 0usize;
    let complete = for_each_perfect_matching(g, |pm| {
        count += 1;
        let f = two_factor(g, pm).expect("enumerated set is a perfect matching");
        let odd = f.odd_cycle_count();
        if odd < best_odd {
            best_odd = odd;
            best = Some(f);
        }
        if best_odd == 0 || pm_limit.is_some_and(|l| count >= l) {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    let factor = best.ok_or(FactorError::NoPerfectMatching)?;
    Ok(OddnessWitness {
        factor,
        oddness: best_odd,
        proven_minimal: complete || best_odd == 0,
    })
}

/// Visits every matching contained in `allowed` (the empty one included)
/// in subset-lexicographic order of edge-index sets.
pub fn for_each_matching_within(
    g: &CubicGraph,
    allowed: &EdgeSet,
    mut visit: impl FnMut(&EdgeSet) -> ControlFlow<()>,
) -> bool {
    let edges: Vec<usize> = allowed.to_vec();
    let mut covered = vec![false; g.vertex_count()];
    let mut chosen: Vec<usize> = Vec::new();
    fn rec(
        g: &CubicGraph,
        edges: &[usize],
        from: usize,
        covered: &mut Vec<bool>,
        chosen: &mut Vec<usize>,
        visit: &mut impl FnMut(&EdgeSet) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        visit(&EdgeSet::from_indices(g.edge_count(), chosen))?;
        for (i, &e) in edges.iter().enumerate().skip(from) {
            let (a, b) = g.endpoints(e);
            if covered[a] || covered[b] {
                continue;
            }
            covered[a] = true;
            covered[b] = true;
            chosen.push(e);
            let flow = rec(g, edges, i + 1, covered, chosen, visit);
            chosen.pop();
            covered[a] = false;
            covered[b] = false;
            flow?;
        }
        ControlFlow::Continue(())
    }
    rec(g, &edges, 0, &mut covered, &mut chosen, &mut visit).is_continue()
}

/// The two perfect matchings of an even cycle, as edge-index sets keyed by
/// parity of position along the canonical traversal.
pub fn even_cycle_matchings(g: &CubicGraph, f: &TwoFactor, cycle: usize) -> [Vec<usize>; 2] {
    let edges = f.cycle_edges(g, cycle);
    assert!(edges.len() % 2 == 0, "cycle is odd");
    let a = edges.iter().copied().step_by(2).collect();
    let b = edges.iter().copied().skip(1).step_by(2).collect();
    [a, b]
}

/// The unique perfect matching of `cycle` minus the vertex at position
/// `skip` along the canonical traversal (cycle length must be odd).
pub fn odd_cycle_matching_avoiding(
    g: &CubicGraph,
    f: &TwoFactor,
    cycle: usize,
    skip: usize,
) -> Vec<usize> {
    let c = &f.cycles[cycle];
    let len = c.len();
    assert!(len % 2 == 1, "cycle is even");
    let mut out = Vec::with_capacity(len / 2);
    for k in 0..len / 2 {
        let pos = (skip + 1 + 2 * k) % len;
        let a = c[pos];
        let b = c[(pos + 1) % len];
        out.push(g.edge_index(a, b).expect("cycle edge"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    /// Independent oracle: filter all edge subsets of size n/2.
    fn naive_pm_count(g: &CubicGraph) -> usize {
        let m = g.edge_count();
        let k = g.vertex_count() / 2;
        let mut count = 0usize;
        let mut pick: Vec<usize> = (0..k).collect();
        loop {
            let set = EdgeSet::from_indices(m, &pick);
            if SubgraphView::new(g, set).is_perfect_matching() {
                count += 1;
            }
            // Next k-combination of 0..m.
            let mut i = k;
            loop {
                if i == 0 {
                    return count;
                }
                i -= 1;
                if pick[i] != i + m - k {
                    break;
                }
                if i == 0 {
                    return count;
                }
            }
            pick[i] += 1;
            for j in i + 1..k {
                pick[j] = pick[j - 1] + 1;
            }
        }
    }

    #[test]
    fn k4_has_three_perfect_matchings() {
        let g = generators::k4();
        let pms = perfect_matchings(&g, None).unwrap();
        assert_eq!(pms.len(), 3);
        assert_eq!(naive_pm_count(&g), 3);
    }

    #[test]
    fn petersen_has_six_perfect_matchings() {
        let g = generators::petersen();
        let pms = perfect_matchings(&g, None).unwrap();
        assert_eq!(pms.len(), 6);
        assert_eq!(naive_pm_count(&g), 6);
        // Canonical order: sorted edge lists are strictly increasing.
        let lists: Vec<Vec<usize>> = pms.iter().map(|s| s.to_vec()).collect();
        for w in lists.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn cube_has_nine_perfect_matchings() {
        let g = generators::q3();
        assert_eq!(perfect_matchings(&g, None).unwrap().len(), 9);
        assert_eq!(naive_pm_count(&g), 9);
    }

    #[test]
    fn limit_truncates_the_stream() {
        let g = generators::petersen();
        assert_eq!(perfect_matchings(&g, Some(2)).unwrap().len(), 2);
    }

    #[test]
    fn two_factor_of_k4_is_one_square() {
        let g = generators::k4();
        for pm in perfect_matchings(&g, None).unwrap() {
            let f = two_factor(&g, &pm).unwrap();
            assert_eq!(f.cycles.len(), 1);
            assert_eq!(f.cycles[0].len(), 4);
        }
    }

    #[test]
    fn every_petersen_two_factor_is_two_pentagons() {
        let g = generators::petersen();
        for pm in perfect_matchings(&g, None).unwrap() {
            let f = two_factor(&g, &pm).unwrap();
            let lens: Vec<usize> = f.cycles.iter().map(Vec::len).collect();
            assert_eq!(lens, vec![5, 5]);
            assert!(f.edge_set.is_disjoint(&pm));
            assert_eq!(f.edge_set.count() + pm.count(), g.edge_count());
        }
    }

    #[test]
    fn flower_two_factors_have_even_odd_cycle_count() {
        let g = generators::flower(5).unwrap();
        for pm in perfect_matchings(&g, Some(40)).unwrap() {
            let f = two_factor(&g, &pm).unwrap();
            assert_eq!(f.odd_cycle_count() % 2, 0);
            let covered: usize = f.cycles.iter().map(Vec::len).sum();
            assert_eq!(covered, g.vertex_count());
        }
    }

    #[test]
    fn two_factor_rejects_non_matchings() {
        let g = generators::k4();
        let bad = EdgeSet::from_indices(g.edge_count(), &[0, 1]);
        assert_eq!(
            two_factor(&g, &bad).unwrap_err(),
            FactorError::NotPerfectMatching
        );
    }

    #[test]
    fn oddness_values() {
        assert_eq!(oddness_witness(&generators::k4(), None).unwrap().oddness, 0);
        let w = oddness_witness(&generators::petersen(), None).unwrap();
        assert_eq!(w.oddness, 2);
        assert!(w.proven_minimal);
        let w = oddness_witness(&generators::blanusa(1).unwrap(), None).unwrap();
        assert_eq!(w.oddness, 2);
    }

    #[test]
    fn matchings_within_factor_enumerate_in_subset_lex_order() {
        let g = generators::k4();
        let pm = &perfect_matchings(&g, None).unwrap()[0];
        let f = two_factor(&g, pm).unwrap();
        let mut seen: Vec<Vec<usize>> = Vec::new();
        for_each_matching_within(&g, &f.edge_set, |m| {
            seen.push(m.to_vec());
            ControlFlow::Continue(())
        });
        assert_eq!(seen[0], Vec::<usize>::new());
        for w in seen.windows(2) {
            assert!(w[0] < w[1]);
        }
        // A 4-cycle has 1 empty + 4 singletons + 2 opposite pairs.
        assert_eq!(seen.len(), 7);
    }

    #[test]
    fn cycle_matching_helpers() {
        let g = generators::petersen();
        let pm = &perfect_matchings(&g, None).unwrap()[0];
        let f = two_factor(&g, pm).unwrap();
        for ci in 0..f.cycles.len() {
            for skip in 0..f.cycles[ci].len() {
                let m = odd_cycle_matching_avoiding(&g, &f, ci, skip);
                assert_eq!(m.len(), 2);
                let set = EdgeSet::from_indices(g.edge_count(), &m);
                let view = SubgraphView::new(&g, set);
                assert!(view.is_matching());
                assert_eq!(view.degrees[f.cycles[ci][skip]], 0);
            }
        }
    }
}
