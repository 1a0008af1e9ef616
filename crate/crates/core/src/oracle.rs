//! Independent ground truth: brute-force Z4xZ2-colorability, exact
//! 3-edge-colorability, exhaustive characterization search, resistance,
//! and the reduction number.

use crate::bits::EdgeSet;
use crate::budget::{Budget, BudgetExhausted};
use crate::coloring::{verify, EdgeColoring, GroupElement};
use crate::factor::{
    for_each_matching_within, for_each_perfect_matching, oddness_witness, two_factor, TwoFactor,
};
use crate::graph::{CubicGraph, GraphError};
use crate::structures::{
    f_complement, for_each_f_matching, reduce, validate_f_matching, FComplement, FMatching,
    MatchingInF,
};
use std::ops::ControlFlow;

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct OracleConfig {
    pub node_budget: u64,
    /// Disables the automorphism symmetry reduction for cross-checks.
    pub paranoid: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            node_budget: 50_000_000,
            paranoid: false,
        }
    }
}

/// Exact decision with witness and search statistics.
#[derive(Debug, Clone)]
pub struct OracleVerdict {
    pub colorable: bool,
    pub witness: Option<EdgeColoring>,
    pub nodes: u64,
}

/// The automorphisms of Z4 x Z2 as permutations of the eight elements
/// (indexed by 2x + y). There are exactly eight: an order-4 image for
/// (1,0) and one of two order-2 images for (0,1).
fn group_automorphisms() -> Vec<[u8; 8]> {
    let idx = |e: GroupElement| (e.x * 2 + e.y) as usize;
    let order4 = [
        GroupElement::new(1, 0),
        GroupElement::new(3, 0),
        GroupElement::new(1, 1),
        GroupElement::new(3, 1),
    ];
    let order2 = [GroupElement::new(0, 1), GroupElement::new(2, 1)];
    let mut auts = Vec::new();
    for g1 in order4 {
        for g2 in order2 {
            let mut map = [0u8; 8];
            let mut image_seen = [false; 8];
            let mut ok = true;
            for x in 0..4u8 {
                for y in 0..2u8 {
                    // phi(x, y) = x * g1 + y * g2.
                    let mut img = GroupElement::ZERO;
                    for _ in 0..x {
                        img = img + g1;
                    }
                    for _ in 0..y {
                        img = img + g2;
                    }
                    let from = (x * 2 + y) as usize;
                    map[from] = idx(img) as u8;
                    if std::mem::replace(&mut image_seen[idx(img)], true) {
                        ok = false;
                    }
                }
            }
            if ok {
                auts.push(map);
            }
        }
    }
    debug_assert_eq!(auts.len(), 8);
    auts
}

/// How deep along the canonical edge order the lexicographic-minimality
/// pruning looks.
const SYM_PREFIX: usize = 4;

struct Z4Z2Search<'g> {
    g: &'g CubicGraph,
    colors: Vec<Option<GroupElement>>,
    auts: Vec<[u8; 8]>,
    paranoid: bool,
    budget: Budget,
    nodes: u64,
}

impl<'g> Z4Z2Search<'g> {
    fn new(g: &'g CubicGraph, config: &OracleConfig) -> Self {
        Z4Z2Search {
            g,
            colors: vec![None; g.edge_count()],
            auts: group_automorphisms(),
            paranoid: config.paranoid,
            budget: Budget::new(config.node_budget),
            nodes: 0,
        }
    }

    /// Assigns e := v, propagating forced third edges. Pushes every
    /// assignment onto the trail; on failure the caller unwinds.
    fn assign(&mut self, e: usize, v: GroupElement, trail: &mut Vec<usize>) -> bool {
        if let Some(cur) = self.colors[e] {
            return cur == v;
        }
        if v.is_zero() {
            return false;
        }
        self.colors[e] = Some(v);
        trail.push(e);
        let (a, b) = self.g.endpoints(e);
        for u in [a, b] {
            let incident = self.g.incident_edges(u);
            let assigned: Vec<(usize, GroupElement)> = incident
                .iter()
                .filter_map(|&f| self.colors[f].map(|c| (f, c)))
                .collect();
            for i in 0..assigned.len() {
                for j in i + 1..assigned.len() {
                    if assigned[i].1 == assigned[j].1 {
                        return false;
                    }
                }
            }
            match assigned.len() {
                3 => {
                    let sum = assigned[0].1 + assigned[1].1 + assigned[2].1;
                    if !sum.is_zero() {
                        return false;
                    }
                }
                2 => {
                    let forced = (assigned[0].1 + assigned[1].1).neg();
                    let &third = incident
                        .iter()
                        .find(|&&f| self.colors[f].is_none())
                        .expect("two of three assigned leaves one free");
                    if !self.assign(third, forced, trail) {
                        return false;
                    }
                }
                _ => {}
            }
        }
        true
    }

    fn unwind(&mut self, trail: &mut Vec<usize>, checkpoint: usize) {
        while trail.len() > checkpoint {
            let e = trail.pop().unwrap();
            self.colors[e] = None;
        }
    }

    /// Prunes partial assignments whose fully-assigned canonical prefix is
    /// not lexicographically minimal under the group automorphisms.
    fn prefix_is_canonical(&self) -> bool {
        if self.paranoid {
            return true;
        }
        let mut prefix: Vec<u8> = Vec::with_capacity(SYM_PREFIX);
        for e in 0..self.g.edge_count().min(SYM_PREFIX) {
            match self.colors[e] {
                Some(c) => prefix.push(c.x * 2 + c.y),
                None => break,
            }
        }
        if prefix.is_empty() {
            return true;
        }
        for aut in &self.auts {
            let mapped: Vec<u8> = prefix.iter().map(|&c| aut[c as usize]).collect();
            if mapped < prefix {
                return false;
            }
        }
        true
    }

    fn search(
        &mut self,
        trail: &mut Vec<usize>,
        visit: &mut impl FnMut(&EdgeColoring) -> ControlFlow<()>,
    ) -> Result<ControlFlow<()>, BudgetExhausted> {
        self.budget.tick()?;
        self.nodes += 1;
        if !self.prefix_is_canonical() {
            return Ok(ControlFlow::Continue(()));
        }
        let Some(e) = self.colors.iter().position(Option::is_none) else {
            let coloring = EdgeColoring {
                colors: self.colors.iter().map(|c| c.unwrap()).collect(),
            };
            debug_assert!(verify(self.g, &coloring).all());
            return Ok(visit(&coloring));
        };
        for v in GroupElement::nonzero() {
            let checkpoint = trail.len();
            let ok = self.assign(e, v, trail);
            if ok {
                let flow = self.search(trail, visit)?;
                self.unwind(trail, checkpoint);
                if flow.is_break() {
                    return Ok(ControlFlow::Break(()));
                }
            } else {
                self.unwind(trail, checkpoint);
            }
        }
        Ok(ControlFlow::Continue(()))
    }
}

/// Streams proper colorings found by the exact backtracking search, up to
/// `limit` of them.
pub fn z4z2_colorings(
    g: &CubicGraph,
    limit: usize,
    config: &OracleConfig,
) -> Result<Vec<EdgeColoring>, BudgetExhausted> {
    let mut search = Z4Z2Search::new(g, config);
    let mut out = Vec::new();
    let mut trail = Vec::new();
    let _ = search.search(&mut trail, &mut |c| {
        out.push(c.clone());
        if out.len() >= limit {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    Ok(out)
}

/// Exact decision of proper Z4xZ2-colorability.
pub fn brute_force_z4z2(
    g: &CubicGraph,
    config: &OracleConfig,
) -> Result<OracleVerdict, BudgetExhausted> {
    let mut search = Z4Z2Search::new(g, config);
    let mut witness = None;
    let mut trail = Vec::new();
    let _ = search.search(&mut trail, &mut |c| {
        witness = Some(c.clone());
        ControlFlow::Break(())
    })?;
    Ok(OracleVerdict {
        colorable: witness.is_some(),
        witness,
        nodes: search.nodes,
    })
}

struct ThreeEdgeSearch<'g> {
    g: &'g CubicGraph,
    colors: Vec<Option<u8>>,
    budget: Budget,
    nodes: u64,
    used_mask: u8,
}

impl<'g> ThreeEdgeSearch<'g> {
    fn assign(&mut self, e: usize, v: u8, trail: &mut Vec<(usize, u8)>) -> bool {
        if let Some(cur) = self.colors[e] {
            return cur == v;
        }
        self.colors[e] = Some(v);
        trail.push((e, self.used_mask));
        self.used_mask |= 1 << v;
        let (a, b) = self.g.endpoints(e);
        for u in [a, b] {
            let incident = self.g.incident_edges(u);
            let assigned: Vec<(usize, u8)> = incident
                .iter()
                .filter_map(|&f| self.colors[f].map(|c| (f, c)))
                .collect();
            for i in 0..assigned.len() {
                for j in i + 1..assigned.len() {
                    if assigned[i].1 == assigned[j].1 {
                        return false;
                    }
                }
            }
            if assigned.len() == 2 {
                let forced = 3 - assigned[0].1 - assigned[1].1;
                let &third = incident
                    .iter()
                    .find(|&&f| self.colors[f].is_none())
                    .expect("one edge left free");
                if !self.assign(third, forced, trail) {
                    return false;
                }
            }
        }
        true
    }

    fn unwind(&mut self, trail: &mut Vec<(usize, u8)>, checkpoint: usize) {
        while trail.len() > checkpoint {
            let (e, mask) = trail.pop().unwrap();
            self.colors[e] = None;
            self.used_mask = mask;
        }
    }

    fn search(&mut self, trail: &mut Vec<(usize, u8)>) -> Result<bool, BudgetExhausted> {
        self.budget.tick()?;
        self.nodes += 1;
        let Some(e) = self.colors.iter().position(Option::is_none) else {
            return Ok(true);
        };
        for v in 0..3u8 {
            // Introduce colors in increasing order; sound because the
            // propagation order is invariant under color relabeling.
            if v > 0 && self.used_mask >> (v - 1) & 1 == 0 {
                break;
            }
            let checkpoint = trail.len();
            if self.assign(e, v, trail) && self.search(trail)? {
                return Ok(true);
            }
            self.unwind(trail, checkpoint);
        }
        Ok(false)
    }
}

/// Exact 3-edge-colorability with a witness partition.
pub fn is_3_edge_colorable(
    g: &CubicGraph,
    config: &OracleConfig,
) -> Result<Option<[EdgeSet; 3]>, BudgetExhausted> {
    let mut search = ThreeEdgeSearch {
        g,
        colors: vec![None; g.edge_count()],
        budget: Budget::new(config.node_budget),
        nodes: 0,
        used_mask: 0,
    };
    let mut trail = Vec::new();
    if !search.search(&mut trail)? {
        return Ok(None);
    }
    let mut classes = [
        g.empty_edge_set(),
        g.empty_edge_set(),
        g.empty_edge_set(),
    ];
    for (e, c) in search.colors.iter().enumerate() {
        classes[c.unwrap() as usize].insert(e);
    }
    Ok(Some(classes))
}

/// A witness for the structural characterization.
#[derive(Debug, Clone)]
pub struct CharWitness {
    pub factor: TwoFactor,
    pub matching: MatchingInF,
    pub f_matching: FMatching,
    pub complement: FComplement,
}

#[derive(Debug, Clone)]
pub enum CharSearch {
    Found(Box<CharWitness>),
    Absent,
    BudgetExhausted,
}

/// Exhaustive search over perfect matchings, matchings in the 2-factor,
/// and F-matchings, for one whose F-complement is 3-even. The first
/// witness in canonical order wins.
pub fn characterization_search(g: &CubicGraph, node_budget: u64) -> CharSearch {
    let mut budget = Budget::new(node_budget);
    let mut witness: Option<CharWitness> = None;
    let mut out_of_budget = false;
    let complete = for_each_perfect_matching(g, |pm| {
        if budget.tick().is_err() {
            out_of_budget = true;
            return ControlFlow::Break(());
        }
        let f = two_factor(g, pm).expect("enumeration yields perfect matchings");
        let inner_complete = for_each_matching_within(g, &f.edge_set, |m_set| {
            if budget.tick().is_err() {
                out_of_budget = true;
                return ControlFlow::Break(());
            }
            let m = MatchingInF::new(g, &f, m_set.clone()).expect("enumerated matching");
            let h = reduce(g, &m);
            let mut found_here = None;
            let res = for_each_f_matching(g, &f, &h, false, &mut budget, &mut |paths| {
                let fm = validate_f_matching(g, &f, &h, paths.to_vec())
                    .expect("search emits valid families");
                match f_complement(g, &h, &fm) {
                    Ok(fc) if fc.three_even() => {
                        found_here = Some((fm, fc));
                        ControlFlow::Break(())
                    }
                    _ => ControlFlow::Continue(()),
                }
            });
            if res.is_err() {
                out_of_budget = true;
                return ControlFlow::Break(());
            }
            if let Some((fm, fc)) = found_here {
                witness = Some(CharWitness {
                    factor: f.clone(),
                    matching: m,
                    f_matching: fm,
                    complement: fc,
                });
                return ControlFlow::Break(());
            }
            ControlFlow::Continue(())
        });
        if witness.is_some() || !inner_complete {
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    });
    match witness {
        Some(w) => CharSearch::Found(Box::new(w)),
        None if out_of_budget => CharSearch::BudgetExhausted,
        None => {
            debug_assert!(complete || out_of_budget);
            CharSearch::Absent
        }
    }
}

/// Proper 3-edge-colorability of a subcubic remainder after deleting the
/// given edges (properness only, no zero-sum).
fn subcubic_3_colorable(
    g: &CubicGraph,
    deleted: &EdgeSet,
    budget: &mut Budget,
) -> Result<bool, BudgetExhausted> {
    let alive: Vec<usize> = (0..g.edge_count()).filter(|&e| !deleted.contains(e)).collect();
    fn rec(
        g: &CubicGraph,
        alive: &[usize],
        at: usize,
        colors: &mut Vec<Option<u8>>,
        used: u8,
        budget: &mut Budget,
    ) -> Result<bool, BudgetExhausted> {
        budget.tick()?;
        if at == alive.len() {
            return Ok(true);
        }
        let e = alive[at];
        let (a, b) = g.endpoints(e);
        for v in 0..3u8 {
            if v > 0 && used >> (v - 1) & 1 == 0 {
                break;
            }
            let clash = g
                .incident_edges(a)
                .iter()
                .chain(g.incident_edges(b).iter())
                .any(|&f| colors[f] == Some(v));
            if clash {
                continue;
            }
            colors[e] = Some(v);
            if rec(g, alive, at + 1, colors, used | 1 << v, budget)? {
                return Ok(true);
            }
            colors[e] = None;
        }
        Ok(false)
    }
    let mut colors = vec![None; g.edge_count()];
    rec(g, &alive, 0, &mut colors, 0, budget)
}

/// Minimum number of edge deletions making the graph 3-edge-colorable.
pub fn resistance(g: &CubicGraph, node_budget: u64) -> Result<usize, BudgetExhausted> {
    let mut budget = Budget::new(node_budget);
    for k in 0..=g.edge_count() {
        let mut found = false;
        for_each_subset(g.edge_count(), k, &mut |subset| {
            let deleted = EdgeSet::from_indices(g.edge_count(), subset);
            match subcubic_3_colorable(g, &deleted, &mut budget) {
                Ok(true) => {
                    found = true;
                    false
                }
                Ok(false) => true,
                Err(_) => false,
            }
        });
        if found {
            return Ok(k);
        }
        if budget.remaining() == 0 {
            return Err(BudgetExhausted);
        }
    }
    unreachable!("deleting every edge is 3-edge-colorable");
}

/// k-subsets of 0..n in lexicographic order; visitor returns false to stop.
fn for_each_subset(n: usize, k: usize, visit: &mut impl FnMut(&[usize]) -> bool) {
    if k > n {
        return;
    }
    let mut pick: Vec<usize> = (0..k).collect();
    loop {
        if !visit(&pick) {
            return;
        }
        if k == 0 {
            return;
        }
        let mut i = k - 1;
        while pick[i] == i + n - k {
            if i == 0 {
                return;
            }
            i -= 1;
        }
        pick[i] += 1;
        for j in i + 1..k {
            pick[j] = pick[j - 1] + 1;
        }
    }
}

/// Whether the reduction along a matching leaves a 3-edge-colorable graph;
/// disconnected reductions are tested component by component. `None` when
/// the reduction is invalid (self-loop or multi-edge).
fn reduction_is_3_colorable(
    g: &CubicGraph,
    matching: &EdgeSet,
    config: &OracleConfig,
) -> Result<Option<bool>, BudgetExhausted> {
    let (n, edges) = match g.suppress_matching(matching) {
        Ok(pair) => pair,
        Err(GraphError::SelfLoopCreated(_)) | Err(GraphError::MultiEdgeCreated(..)) => {
            return Ok(None)
        }
        Err(GraphError::NotAMatching(..)) => return Ok(None),
        Err(e) => panic!("unexpected suppression failure: {e}"),
    };
    // Split into connected components; all are cubic.
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in &edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut comp = vec![usize::MAX; n];
    let mut groups = 0usize;
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = groups;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if comp[w] == usize::MAX {
                    comp[w] = groups;
                    stack.push(w);
                }
            }
        }
        groups += 1;
    }
    for gi in 0..groups {
        let members: Vec<usize> = (0..n).filter(|&v| comp[v] == gi).collect();
        let mut relabel = vec![usize::MAX; n];
        for (new, &old) in members.iter().enumerate() {
            relabel[old] = new;
        }
        let sub_edges: Vec<(usize, usize)> = edges
            .iter()
            .filter(|&&(a, b)| comp[a] == gi && comp[b] == gi)
            .map(|&(a, b)| (relabel[a], relabel[b]))
            .collect();
        let sub = CubicGraph::from_edges(members.len(), &sub_edges)
            .expect("suppressed component is simple cubic connected");
        if is_3_edge_colorable(&sub, config)?.is_none() {
            return Ok(Some(false));
        }
    }
    Ok(Some(true))
}

/// Minimum size of a matching whose edge reduction yields a
/// 3-edge-colorable graph. Size zero means the graph itself is
/// 3-edge-colorable.
pub fn reduction_number(g: &CubicGraph, config: &OracleConfig) -> Result<usize, BudgetExhausted> {
    if is_3_edge_colorable(g, config)?.is_some() {
        return Ok(0);
    }
    for k in 1..=g.vertex_count() / 2 {
        let mut found = false;
        let mut exhausted = false;
        for_each_size_k_matching(g, k, &mut |set| {
            match reduction_is_3_colorable(g, set, config) {
                Ok(Some(true)) => {
                    found = true;
                    false
                }
                Ok(_) => true,
                Err(_) => {
                    exhausted = true;
                    false
                }
            }
        });
        if exhausted {
            return Err(BudgetExhausted);
        }
        if found {
            return Ok(k);
        }
    }
    Err(BudgetExhausted)
}

/// All matchings of exactly k edges, lexicographically.
fn for_each_size_k_matching(
    g: &CubicGraph,
    k: usize,
    visit: &mut impl FnMut(&EdgeSet) -> bool,
) {
    fn rec(
        g: &CubicGraph,
        k: usize,
        from: usize,
        covered: &mut Vec<bool>,
        chosen: &mut Vec<usize>,
        visit: &mut impl FnMut(&EdgeSet) -> bool,
    ) -> bool {
        if chosen.len() == k {
            return visit(&EdgeSet::from_indices(g.edge_count(), chosen));
        }
        for e in from..g.edge_count() {
            let (a, b) = g.endpoints(e);
            if covered[a] || covered[b] {
                continue;
            }
            covered[a] = true;
            covered[b] = true;
            chosen.push(e);
            let keep = rec(g, k, e + 1, covered, chosen, visit);
            chosen.pop();
            covered[a] = false;
            covered[b] = false;
            if !keep {
                return false;
            }
        }
        true
    }
    let mut covered = vec![false; g.vertex_count()];
    let mut chosen = Vec::new();
    rec(g, k, 0, &mut covered, &mut chosen, visit);
}

/// Oddness via the exhaustive scan in the factor module.
pub fn oddness(g: &CubicGraph, pm_limit: Option<usize>) -> Option<(usize, bool)> {
    oddness_witness(g, pm_limit)
        .ok()
        .map(|w| (w.oddness, w.proven_minimal))
}
