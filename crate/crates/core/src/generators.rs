//! Deterministic constructions of test graphs: classic snarks, permutation
//! graphs, and 3-edge-colorable controls.
//!
//! Every generator uses a fixed, documented labeling so that golden graph6
//! fixtures and certificates are reproducible.

use crate::graph::{CubicGraph, GraphError};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeneratorError {
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("construction produced a non-simple graph")]
    NotSimple,
}

/// Complete graph on four vertices, the smallest cubic graph.
pub fn k4() -> CubicGraph {
    CubicGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
}

/// Complete bipartite graph with parts {0,1,2} and {3,4,5}.
pub fn k33() -> CubicGraph {
    let mut edges = Vec::new();
    for a in 0..3 {
        for b in 3..6 {
            edges.push((a, b));
        }
    }
    CubicGraph::from_edges(6, &edges).unwrap()
}

/// Triangular prism: triangles 0-1-2 and 3-4-5 joined by rungs i,(i+3).
pub fn prism() -> CubicGraph {
    CubicGraph::from_edges(
        6,
        &[
            (0, 1),
            (1, 2),
            (0, 2),
            (3, 4),
            (4, 5),
            (3, 5),
            (0, 3),
            (1, 4),
            (2, 5),
        ],
    )
    .unwrap()
}

/// 3-dimensional cube graph on 0..8; neighbors differ in one bit.
pub fn q3() -> CubicGraph {
    let mut edges = Vec::new();
    for v in 0..8usize {
        for bit in [1, 2, 4] {
            let w = v ^ bit;
            if v < w {
                edges.push((v, w));
            }
        }
    }
    CubicGraph::from_edges(8, &edges).unwrap()
}

/// The four 3-edge-colorable control graphs: K4, K3,3, prism, Q3.
pub fn controls() -> Vec<(&'static str, CubicGraph)> {
    vec![
        ("k4", k4()),
        ("k33", k33()),
        ("prism", prism()),
        ("q3", q3()),
    ]
}

/// Petersen graph: outer 5-cycle 0..5, spokes i,(i+5), inner pentagram
/// 5+i adjacent to 5+((i+2) mod 5).
pub fn petersen() -> CubicGraph {
    let mut edges = Vec::new();
    for i in 0..5usize {
        edges.push((i, (i + 1) % 5));
        edges.push((i, i + 5));
        edges.push((5 + i, 5 + (i + 2) % 5));
    }
    CubicGraph::from_edges(10, &edges).unwrap()
}

/// One of the two 18-vertex snarks, built as a dot product of two Petersen
/// copies.
///
/// Copy one drops the adjacent vertices 0 and 1; copy two drops a pair of
/// independent edges. `which = 1` removes the edge pair {0,1},{3,4}
/// (endpoints at distance one), `which = 2` removes {0,1},{7,9}
/// (endpoints at distance two); the two choices are inequivalent in the
/// Petersen graph and yield the two distinct snarks.
pub fn blanusa(which: u8) -> Result<CubicGraph, GeneratorError> {
    if which != 1 && which != 2 {
        return Err(GeneratorError::BadParameter(format!(
            "blanusa variant must be 1 or 2, got {which}"
        )));
    }
    let p = petersen();
    // Copy one: Petersen minus vertices 0 and 1, relabeled v -> v-2.
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for &(a, b) in p.edges() {
        if a >= 2 && b >= 2 {
            edges.push((a - 2, b - 2));
        }
    }
    // Dangling ends in copy one: neighbors of 0 besides 1 are {4, 5};
    // neighbors of 1 besides 0 are {2, 6}. After relabeling: 2, 3 | 0, 4.
    let (u1, u2, v1, v2) = (4 - 2, 5 - 2, 2 - 2, 6 - 2);
    // Copy two: Petersen minus the chosen edge pair, relabeled v -> v+8.
    let (f1, f2) = if which == 1 { ((0, 1), (3, 4)) } else { ((0, 1), (7, 9)) };
    for &(a, b) in p.edges() {
        if (a, b) == f1 || (a, b) == f2 {
            continue;
        }
        edges.push((a + 8, b + 8));
    }
    let (a, b) = (f1.0 + 8, f1.1 + 8);
    let (c, d) = (f2.0 + 8, f2.1 + 8);
    edges.extend([(u1, a), (u2, b), (v1, c), (v2, d)]);
    CubicGraph::from_edges(18, &edges).map_err(|_| GeneratorError::NotSimple)
}

/// Flower snark J_k for odd k >= 5, on 4k vertices.
///
/// Labeling: star center 4i joined to hub 4i+1 and petals 4i+2, 4i+3; hubs
/// form a k-cycle; petals form one 2k-cycle closed with a twist.
pub fn flower(k: usize) -> Result<CubicGraph, GeneratorError> {
    if k < 5 || k % 2 == 0 {
        return Err(GeneratorError::BadParameter(format!(
            "flower snark parameter must be odd and >= 5, got {k}"
        )));
    }
    let t = |i: usize| 4 * i;
    let u = |i: usize| 4 * i + 1;
    let v = |i: usize| 4 * i + 2;
    let w = |i: usize| 4 * i + 3;
    let mut edges = Vec::new();
    for i in 0..k {
        edges.push((t(i), u(i)));
        edges.push((t(i), v(i)));
        edges.push((t(i), w(i)));
        edges.push((u(i), u((i + 1) % k)));
    }
    for i in 0..k - 1 {
        edges.push((v(i), v(i + 1)));
        edges.push((w(i), w(i + 1)));
    }
    edges.push((v(k - 1), w(0)));
    edges.push((w(k - 1), v(0)));
    CubicGraph::from_edges(4 * k, &edges).map_err(|_| GeneratorError::NotSimple)
}

/// Two disjoint n-cycles joined by the matching i -> pi(i)'.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationSpec {
    pub n: usize,
    pub pi: Vec<usize>,
}

impl PermutationSpec {
    pub fn new(n: usize, pi: Vec<usize>) -> Result<Self, GeneratorError> {
        if n < 5 || n % 2 == 0 {
            return Err(GeneratorError::BadParameter(format!(
                "cycle length must be odd and >= 5, got {n}"
            )));
        }
        if pi.len() != n {
            return Err(GeneratorError::BadParameter(
                "permutation length differs from n".into(),
            ));
        }
        let mut seen = vec![false; n];
        for &x in &pi {
            if x >= n || seen[x] {
                return Err(GeneratorError::BadParameter(
                    "pi is not a permutation".into(),
                ));
            }
            seen[x] = true;
        }
        Ok(PermutationSpec { n, pi })
    }
}

/// The permutation graph of `spec`: outer cycle 0..n, inner cycle n..2n,
/// spokes i to n + pi(i).
///
/// The defining 2-factor (the two n-cycles) is returned alongside the graph.
pub fn permutation_graph(
    spec: &PermutationSpec,
) -> Result<(CubicGraph, [Vec<usize>; 2]), GeneratorError> {
    let n = spec.n;
    let mut edges = Vec::new();
    for i in 0..n {
        edges.push((i, (i + 1) % n));
        edges.push((n + i, n + (i + 1) % n));
        edges.push((i, n + spec.pi[i]));
    }
    let g = CubicGraph::from_edges(2 * n, &edges).map_err(|_| GeneratorError::NotSimple)?;
    let outer: Vec<usize> = (0..n).collect();
    let inner: Vec<usize> = (n..2 * n).collect();
    Ok((g, [outer, inner]))
}

/// Deterministic RNG for all seeded sampling in this crate.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// All permutations of 0..n in lexicographic order. Intended for small n.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // Next lexicographic permutation.
        let Some(i) = (0..n - 1).rev().find(|&i| cur[i] < cur[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    out
}

/// A uniformly random permutation of 0..n from the given RNG.
pub fn random_permutation(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut pi: Vec<usize> = (0..n).collect();
    pi.shuffle(rng);
    pi
}

/// Permutation snarks found deterministically: all 120 permutations are
/// enumerated at n = 5; larger n are sampled from a per-n seeded stream.
/// A candidate counts only when the oracle proves it not 3-edge-colorable
/// within the node budget, so the result never contains false snarks.
pub fn permutation_snarks(
    ns: &[usize],
    per_n_cap: usize,
    seed: u64,
    attempts_per_n: usize,
    node_budget: u64,
) -> Vec<(PermutationSpec, CubicGraph)> {
    let cfg = crate::oracle::OracleConfig {
        node_budget,
        paranoid: false,
    };
    let mut out = Vec::new();
    for &n in ns {
        let mut here = 0usize;
        let consider = |spec: PermutationSpec, out: &mut Vec<(PermutationSpec, CubicGraph)>| {
            let Ok((g, _)) = permutation_graph(&spec) else {
                return false;
            };
            if matches!(crate::oracle::is_3_edge_colorable(&g, &cfg), Ok(None)) {
                out.push((spec, g));
                return true;
            }
            false
        };
        if n == 5 {
            for pi in all_permutations(5) {
                if here >= per_n_cap {
                    break;
                }
                let spec = PermutationSpec::new(5, pi).expect("valid spec");
                if consider(spec, &mut out) {
                    here += 1;
                }
            }
        } else {
            let mut rng = seeded_rng(seed.wrapping_mul(0x9e37_79b9).wrapping_add(n as u64));
            for _ in 0..attempts_per_n {
                if here >= per_n_cap {
                    break;
                }
                let pi = random_permutation(n, &mut rng);
                let Ok(spec) = PermutationSpec::new(n, pi) else {
                    continue;
                };
                if consider(spec, &mut out) {
                    here += 1;
                }
            }
        }
    }
    out
}

/// Random connected bridgeless cubic graph on n vertices via the pairing
/// model with rejection. Deterministic for a fixed seed.
pub fn random_cubic_bridgeless(n: usize, rng: &mut impl Rng) -> Result<CubicGraph, GraphError> {
    assert!(n >= 4 && n % 2 == 0, "cubic graphs need even n >= 4");
    loop {
        let mut points: Vec<usize> = (0..3 * n).collect();
        points.shuffle(rng);
        let mut edges = Vec::with_capacity(3 * n / 2);
        for pair in points.chunks(2) {
            edges.push((pair[0] / 3, pair[1] / 3));
        }
        let Ok(g) = CubicGraph::from_edges(n, &edges) else {
            continue;
        };
        if g.is_bridgeless() {
            return Ok(g);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_shapes() {
        assert_eq!(petersen().vertex_count(), 10);
        assert_eq!(petersen().girth(), 5);
        assert_eq!(flower(5).unwrap().vertex_count(), 20);
        assert_eq!(flower(7).unwrap().vertex_count(), 28);
        assert!(flower(4).is_err());
        assert!(flower(3).is_err());
        for (_name, g) in controls() {
            assert!(g.is_bridgeless());
        }
    }

    #[test]
    fn blanusa_shapes() {
        for which in [1, 2] {
            let g = blanusa(which).unwrap();
            assert_eq!(g.vertex_count(), 18);
            assert_eq!(g.edge_count(), 27);
            assert!(g.is_bridgeless());
            assert_eq!(g.girth(), 5);
        }
        assert!(blanusa(3).is_err());
        assert_ne!(blanusa(1).unwrap().edges(), blanusa(2).unwrap().edges());
    }

    #[test]
    fn permutation_graph_records_its_two_factor() {
        let spec = PermutationSpec::new(5, vec![0, 2, 4, 1, 3]).unwrap();
        let (g, factor) = permutation_graph(&spec).unwrap();
        assert_eq!(g.vertex_count(), 10);
        for cycle in &factor {
            assert_eq!(cycle.len(), 5);
            for i in 0..cycle.len() {
                assert!(g
                    .edge_index(cycle[i], cycle[(i + 1) % cycle.len()])
                    .is_some());
            }
        }
    }

    #[test]
    fn pentagram_permutation_gives_a_petersen_like_graph() {
        // pi(i) = 2i mod 5.
        let spec = PermutationSpec::new(5, vec![0, 2, 4, 1, 3]).unwrap();
        let (g, _) = permutation_graph(&spec).unwrap();
        assert_eq!(g.girth(), 5);
    }

    #[test]
    fn all_permutations_of_three() {
        let ps = all_permutations(3);
        assert_eq!(ps.len(), 6);
        assert_eq!(ps[0], vec![0, 1, 2]);
        assert_eq!(ps[5], vec![2, 1, 0]);
    }

    #[test]
    fn random_cubic_is_cubic_and_bridgeless() {
        let mut rng = seeded_rng(7);
        for _ in 0..5 {
            let g = random_cubic_bridgeless(10, &mut rng).unwrap();
            assert_eq!(g.vertex_count(), 10);
            assert!(g.is_bridgeless());
        }
    }

    #[test]
    fn seeded_sampling_is_reproducible() {
        let a = random_cubic_bridgeless(12, &mut seeded_rng(42)).unwrap();
        let b = random_cubic_bridgeless(12, &mut seeded_rng(42)).unwrap();
        assert_eq!(a.edges(), b.edges());
    }
}
