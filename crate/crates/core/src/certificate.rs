//! Self-contained, independently re-verifiable records of a coloring and
//! the structures that produced it.

use crate::coloring::{extract, verify, EdgeColoring, GroupElement, Verdicts};
use crate::factor::TwoFactor;
use crate::graph::CubicGraph;
use crate::graph6::{parse_graph6, to_graph6};
use crate::structures::{FComplement, FMatching, MatchingInF};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertificateError {
    #[error("certificate graph6 field is invalid: {0}")]
    BadGraph(String),
    #[error("certificate coloring is not total")]
    PartialColoring,
    #[error("verdict mismatch: {0}")]
    VerdictMismatch(String),
    #[error("structure mismatch: {0}")]
    StructureMismatch(String),
    #[error("coloring does not verify")]
    DoesNotVerify,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopRecord {
    pub vertices: Vec<usize>,
    pub three_count: usize,
    pub three_even: bool,
}

/// A certificate of colorability, serializable as a single JSON document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub graph6: String,
    pub two_factor: Vec<Vec<usize>>,
    pub matching: Vec<(usize, usize)>,
    pub f_matching: Vec<Vec<usize>>,
    pub loops: Vec<LoopRecord>,
    /// Edge index -> (x, y).
    pub coloring: BTreeMap<usize, (u8, u8)>,
    pub verdicts: Verdicts,
    pub stage: String,
}

/// Orients a path from its smaller endpoint and sorts paths by first
/// vertex, so equality against re-derived structures is meaningful.
fn canonical_paths(paths: &FMatching) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = paths
        .paths
        .iter()
        .map(|p| {
            let mut v = p.vertices.clone();
            if v.last() < v.first() {
                v.reverse();
            }
            v
        })
        .collect();
    out.sort();
    out
}

impl Certificate {
    pub fn new(
        g: &CubicGraph,
        stage: &str,
        f: &TwoFactor,
        m: &MatchingInF,
        fm: &FMatching,
        fc: &FComplement,
        coloring: &EdgeColoring,
    ) -> Certificate {
        let verdicts = verify(g, coloring);
        Certificate {
            graph6: to_graph6(g),
            two_factor: f.cycles.clone(),
            matching: m.edges.iter().map(|e| g.endpoints(e)).collect(),
            f_matching: canonical_paths(fm),
            loops: fc
                .loops
                .iter()
                .map(|l| LoopRecord {
                    vertices: l.vertices.clone(),
                    three_count: l.three_count,
                    three_even: l.three_even(),
                })
                .collect(),
            coloring: coloring
                .colors
                .iter()
                .enumerate()
                .map(|(e, c)| (e, (c.x, c.y)))
                .collect(),
            verdicts,
            stage: stage.to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Certificate, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Re-derives every verdict and structure from the embedded data and
    /// checks the certificate against them.
    pub fn reverify(&self) -> Result<(), CertificateError> {
        let g = parse_graph6(&self.graph6).map_err(|e| CertificateError::BadGraph(e.to_string()))?;
        let mut colors = Vec::with_capacity(g.edge_count());
        for e in 0..g.edge_count() {
            let &(x, y) = self
                .coloring
                .get(&e)
                .ok_or(CertificateError::PartialColoring)?;
            colors.push(GroupElement::new(x, y));
        }
        if self.coloring.len() != g.edge_count() {
            return Err(CertificateError::PartialColoring);
        }
        let coloring = EdgeColoring { colors };
        let verdicts = verify(&g, &coloring);
        if verdicts != self.verdicts {
            return Err(CertificateError::VerdictMismatch(format!(
                "stored {:?}, derived {:?}",
                self.verdicts, verdicts
            )));
        }
        if !verdicts.all() {
            return Err(CertificateError::DoesNotVerify);
        }
        let ex = extract(&g, &coloring).map_err(|e| {
            CertificateError::StructureMismatch(format!("extraction failed: {e}"))
        })?;
        if ex.factor.cycles != self.two_factor {
            return Err(CertificateError::StructureMismatch(
                "2-factor cycles differ".into(),
            ));
        }
        let matching: Vec<(usize, usize)> =
            ex.matching.edges.iter().map(|e| g.endpoints(e)).collect();
        if matching != self.matching {
            return Err(CertificateError::StructureMismatch(
                "matching edges differ".into(),
            ));
        }
        if canonical_paths(&ex.f_matching) != self.f_matching {
            return Err(CertificateError::StructureMismatch(
                "F-matching paths differ".into(),
            ));
        }
        let loops: Vec<LoopRecord> = ex
            .complement
            .loops
            .iter()
            .map(|l| LoopRecord {
                vertices: l.vertices.clone(),
                three_count: l.three_count,
                three_even: l.three_even(),
            })
            .collect();
        if loops != self.loops {
            return Err(CertificateError::StructureMismatch("loops differ".into()));
        }
        Ok(())
    }

    /// DOT rendering: 2-factor cycles colored per cycle, matching edges
    /// dashed, F-matching path edges bold.
    pub fn to_dot(&self) -> Result<String, CertificateError> {
        let g = parse_graph6(&self.graph6).map_err(|e| CertificateError::BadGraph(e.to_string()))?;
        let palette = [
            "firebrick", "royalblue", "forestgreen", "darkorange", "purple", "teal", "goldenrod",
            "deeppink",
        ];
        let mut cycle_of_edge: BTreeMap<usize, usize> = BTreeMap::new();
        for (ci, cycle) in self.two_factor.iter().enumerate() {
            for i in 0..cycle.len() {
                if let Some(e) = g.edge_index(cycle[i], cycle[(i + 1) % cycle.len()]) {
                    cycle_of_edge.insert(e, ci);
                }
            }
        }
        let mut matching_edges = std::collections::BTreeSet::new();
        for &(a, b) in &self.matching {
            if let Some(e) = g.edge_index(a, b) {
                matching_edges.insert(e);
            }
        }
        let mut path_edges = std::collections::BTreeSet::new();
        for p in &self.f_matching {
            for w in p.windows(2) {
                if let Some(e) = g.edge_index(w[0], w[1]) {
                    path_edges.insert(e);
                }
            }
        }
        let mut out = String::from("graph coloring {\n  node [shape=circle];\n");
        for e in 0..g.edge_count() {
            let (a, b) = g.endpoints(e);
            let mut attrs: Vec<String> = Vec::new();
            if let Some(&ci) = cycle_of_edge.get(&e) {
                attrs.push(format!("color={}", palette[ci % palette.len()]));
            } else {
                attrs.push("color=gray40".into());
            }
            if matching_edges.contains(&e) {
                attrs.push("style=dashed".into());
            }
            if path_edges.contains(&e) {
                attrs.push("penwidth=2.5".into());
            }
            if let Some(&(x, y)) = self.coloring.get(&e) {
                attrs.push(format!("label=\"({x},{y})\""));
            }
            out.push_str(&format!("  {} -- {} [{}];\n", a, b, attrs.join(", ")));
        }
        out.push_str("}\n");
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::oracle::{brute_force_z4z2, OracleConfig};

    fn petersen_certificate() -> Certificate {
        let g = generators::petersen();
        let v = brute_force_z4z2(&g, &OracleConfig::default()).unwrap();
        let coloring = v.witness.unwrap();
        let ex = extract(&g, &coloring).unwrap();
        Certificate::new(
            &g,
            "oracle-only",
            &ex.factor,
            &ex.matching,
            &ex.f_matching,
            &ex.complement,
            &coloring,
        )
    }

    #[test]
    fn json_roundtrip_and_reverify() {
        let cert = petersen_certificate();
        let json = cert.to_json();
        let back = Certificate::from_json(&json).unwrap();
        assert_eq!(back, cert);
        back.reverify().unwrap();
    }

    #[test]
    fn tampered_color_is_caught() {
        let mut cert = petersen_certificate();
        let (&e, &(x, y)) = cert.coloring.iter().next().unwrap();
        cert.coloring.insert(e, ((x + 1) % 4, y));
        assert!(cert.reverify().is_err());
    }

    #[test]
    fn tampered_structure_is_caught() {
        let mut cert = petersen_certificate();
        cert.two_factor[0].swap(1, 2);
        assert!(cert.reverify().is_err());
    }

    #[test]
    fn dot_rendering_mentions_styles() {
        let cert = petersen_certificate();
        let dot = cert.to_dot().unwrap();
        assert!(dot.starts_with("graph coloring {"));
        assert!(dot.contains("style=dashed") || cert.matching.is_empty());
        assert!(dot.contains("penwidth=2.5"));
        assert!(dot.contains("label=\"("));
    }
}
