//! Staged coloring driver: corollary map, theta fast path, odd-incidence
//! derivation with correction, exhaustive characterization, and the brute
//! force oracle as last resort. First success wins and every coloring is
//! re-verified before being reported.

use crate::certificate::Certificate;
use crate::coloring::{construct, extract, from_3_edge_coloring, verify};
use crate::correction::{correct_and_color, CorrectionError};
use crate::factor::{perfect_matchings, two_factor, TwoFactor};
use crate::graph::CubicGraph;
use crate::graph6::to_graph6;
use crate::odd_incidence::{build_k_odd, derive_matching, even_matchings};
use crate::oracle::{
    brute_force_z4z2, characterization_search, is_3_edge_colorable, CharSearch, OracleConfig,
};
use crate::structures::{classify_main_component, f_complement, reduce, validate_f_matching,
    MainComponent, MatchingInF};
use serde::{Deserialize, Serialize};
use std::time::Instant;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Perfect matchings scanned in stages 2 and 3; `None` enumerates
    /// exhaustively up to 30 vertices and caps at 300 above.
    pub pm_limit: Option<usize>,
    /// Maximum matchings tried per qualifying 2-factor in stage 2.
    pub max_matchings_per_factor: usize,
    /// Even-cycle matching combinations tried per 2-factor in stage 3.
    pub even_matchings_limit: usize,
    /// Node budget for each F-matching search.
    pub f_search_nodes: u64,
    /// Node budget for stage 1's 3-edge-colorability check.
    pub stage1_nodes: u64,
    /// Node budget for stage 4's exhaustive characterization search.
    pub char_nodes: u64,
    /// Configuration of the stage 5 oracle.
    pub oracle: OracleConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        // Defaults sized for interactive use up to roughly 28 vertices.
        PipelineConfig {
            pm_limit: None,
            max_matchings_per_factor: 600,
            even_matchings_limit: 16,
            f_search_nodes: 2_000_000,
            stage1_nodes: 5_000_000,
            char_nodes: 30_000_000,
            oracle: OracleConfig::default(),
        }
    }
}

pub const STAGE_NAMES: [&str; 5] = [
    "corollary-map",
    "theta-fast-path",
    "odd-incidence+correction",
    "exhaustive-characterization",
    "oracle-only",
];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageOutcome {
    pub stage: String,
    pub outcome: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    pub millis: u128,
}

/// One JSON line per attempted correction candidate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CandidateDiagnostic {
    pub candidate: String,
    pub stage_reached: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub claims: Option<Vec<(String, bool)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportEntry {
    pub id: String,
    pub graph6: String,
    pub n: usize,
    pub girth: usize,
    pub bridgeless: bool,
    /// "colorable", "not-colorable" or "unknown".
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stage: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    pub stages: Vec<StageOutcome>,
    pub diagnostics: Vec<CandidateDiagnostic>,
}

struct StageClock {
    start: Instant,
}

impl StageClock {
    fn new() -> Self {
        StageClock {
            start: Instant::now(),
        }
    }

    fn outcome(&self, stage: &str, outcome: &str, detail: Option<String>) -> StageOutcome {
        StageOutcome {
            stage: stage.to_string(),
            outcome: outcome.to_string(),
            detail,
            millis: self.start.elapsed().as_millis(),
        }
    }
}

fn certified(
    g: &CubicGraph,
    stage: &str,
    f: &TwoFactor,
    m: &MatchingInF,
    fm: &crate::structures::FMatching,
    fc: &crate::structures::FComplement,
    coloring: &crate::coloring::EdgeColoring,
) -> Option<Certificate> {
    if !verify(g, coloring).all() {
        return None;
    }
    let cert = Certificate::new(g, stage, f, m, fm, fc, coloring);
    cert.reverify().ok()?;
    Some(cert)
}

/// Runs the staged strategy on one validated graph.
pub fn run_pipeline(g: &CubicGraph, id: &str, config: &PipelineConfig) -> ReportEntry {
    let mut entry = ReportEntry {
        id: id.to_string(),
        graph6: to_graph6(g),
        n: g.vertex_count(),
        girth: g.girth(),
        bridgeless: g.is_bridgeless(),
        verdict: "unknown".into(),
        stage: None,
        certificate: None,
        stages: Vec::new(),
        diagnostics: Vec::new(),
    };

    // Stage 1: 3-edge-colorable graphs map directly.
    let clock = StageClock::new();
    let stage1_cfg = OracleConfig {
        node_budget: config.stage1_nodes,
        paranoid: config.oracle.paranoid,
    };
    match is_3_edge_colorable(g, &stage1_cfg) {
        Ok(Some(classes)) => match from_3_edge_coloring(g, &classes) {
            Ok(coloring) => {
                let ex = extract(g, &coloring).expect("corollary map extracts");
                if let Some(cert) = certified(
                    g,
                    STAGE_NAMES[0],
                    &ex.factor,
                    &ex.matching,
                    &ex.f_matching,
                    &ex.complement,
                    &coloring,
                ) {
                    entry.stages.push(clock.outcome(STAGE_NAMES[0], "success", None));
                    entry.verdict = "colorable".into();
                    entry.stage = Some(STAGE_NAMES[0].into());
                    entry.certificate = Some(cert);
                    return entry;
                }
                entry
                    .stages
                    .push(clock.outcome(STAGE_NAMES[0], "failed", Some("certificate rejected".into())));
            }
            Err(e) => entry
                .stages
                .push(clock.outcome(STAGE_NAMES[0], "failed", Some(e.to_string()))),
        },
        Ok(None) => entry
            .stages
            .push(clock.outcome(STAGE_NAMES[0], "not-3-edge-colorable", None)),
        Err(_) => entry
            .stages
            .push(clock.outcome(STAGE_NAMES[0], "budget", None)),
    }

    let pm_limit = config.pm_limit.map_or_else(|| crate::factor::default_pm_limit(g), Some);
    let pms = match perfect_matchings(g, pm_limit) {
        Ok(pms) => pms,
        Err(e) => {
            entry.stages.push(StageOutcome {
                stage: "perfect-matchings".into(),
                outcome: "failed".into(),
                detail: Some(e.to_string()),
                millis: 0,
            });
            // Without a perfect matching there is no 2-factor and no Y0;
            // such a graph cannot be colorable.
            entry.verdict = "not-colorable".into();
            return entry;
        }
    };
    let factors: Vec<TwoFactor> = pms
        .iter()
        .map(|pm| two_factor(g, pm).expect("enumerated perfect matching"))
        .collect();

    // Stage 2: oddness-two 2-factors with a theta main component.
    let clock = StageClock::new();
    let mut stage2_tried = 0usize;
    for f in factors.iter().filter(|f| f.odd_cycle_count() == 2) {
        if let Some((cert, detail)) = try_theta_fast_path(g, f, config, &mut stage2_tried) {
            entry
                .stages
                .push(clock.outcome(STAGE_NAMES[1], "success", Some(detail)));
            entry.verdict = "colorable".into();
            entry.stage = Some(STAGE_NAMES[1].into());
            entry.certificate = Some(cert);
            return entry;
        }
        if stage2_tried >= config.max_matchings_per_factor {
            break;
        }
    }
    entry.stages.push(clock.outcome(
        STAGE_NAMES[1],
        "no-theta-instance",
        Some(format!("{stage2_tried} maximum matchings tried")),
    ));

    // Stage 3: odd-incidence derivation, then correction when needed.
    let clock = StageClock::new();
    for (fi, f) in factors.iter().enumerate() {
        for (mi, m_even) in even_matchings(g, f, config.even_matchings_limit)
            .iter()
            .enumerate()
        {
            let candidate = format!("pm{fi}/even{mi}");
            let Ok(k) = build_k_odd(g, f, m_even) else {
                continue;
            };
            let Some(d) = derive_matching(g, f, m_even, &k) else {
                entry.diagnostics.push(CandidateDiagnostic {
                    candidate,
                    stage_reached: "k-odd-matching".into(),
                    claims: None,
                    error: Some("K_odd has no perfect matching".into()),
                });
                continue;
            };
            let h = reduce(g, &d.matching);
            let Ok(fc) = f_complement(g, &h, &d.f_matching) else {
                continue;
            };
            match correct_and_color(g, f, &d.matching, &d.f_matching, &fc) {
                Ok(out) => {
                    if let Some(cert) = certified(
                        g,
                        STAGE_NAMES[2],
                        f,
                        &out.matching,
                        &out.f_matching,
                        &out.complement,
                        &out.coloring,
                    ) {
                        entry.diagnostics.push(CandidateDiagnostic {
                            candidate,
                            stage_reached: if out.report.corrected {
                                "corrected".into()
                            } else {
                                "three-even".into()
                            },
                            claims: Some(out.report.claims.clone()),
                            error: None,
                        });
                        entry
                            .stages
                            .push(clock.outcome(STAGE_NAMES[2], "success", None));
                        entry.verdict = "colorable".into();
                        entry.stage = Some(STAGE_NAMES[2].into());
                        entry.certificate = Some(cert);
                        return entry;
                    }
                }
                Err(e) => {
                    let stage_reached = match &e {
                        CorrectionError::Infeasible { .. } => "hypothesis",
                        CorrectionError::NormalizationFailed(_) => "normalization",
                        CorrectionError::NotAnMPath(_) => "q-family",
                        CorrectionError::ClaimViolated(_) => "claims",
                        CorrectionError::Construction(_) => "construction",
                    };
                    entry.diagnostics.push(CandidateDiagnostic {
                        candidate,
                        stage_reached: stage_reached.into(),
                        claims: None,
                        error: Some(e.to_string()),
                    });
                }
            }
        }
    }
    entry
        .stages
        .push(clock.outcome(STAGE_NAMES[2], "exhausted-candidates", None));

    // Stage 4: exhaustive characterization search.
    let clock = StageClock::new();
    match characterization_search(g, config.char_nodes) {
        CharSearch::Found(w) => {
            if let Ok(coloring) = construct(g, &w.factor, &w.matching, &w.f_matching, &w.complement)
            {
                if let Some(cert) = certified(
                    g,
                    STAGE_NAMES[3],
                    &w.factor,
                    &w.matching,
                    &w.f_matching,
                    &w.complement,
                    &coloring,
                ) {
                    entry
                        .stages
                        .push(clock.outcome(STAGE_NAMES[3], "success", None));
                    entry.verdict = "colorable".into();
                    entry.stage = Some(STAGE_NAMES[3].into());
                    entry.certificate = Some(cert);
                    return entry;
                }
            }
            entry
                .stages
                .push(clock.outcome(STAGE_NAMES[3], "failed", Some("witness rejected".into())));
        }
        CharSearch::Absent => {
            entry
                .stages
                .push(clock.outcome(STAGE_NAMES[3], "absent", None));
            entry.verdict = "not-colorable".into();
            // Fall through to the oracle for a cross-check.
        }
        CharSearch::BudgetExhausted => entry
            .stages
            .push(clock.outcome(STAGE_NAMES[3], "budget", None)),
    }

    // Stage 5: brute force oracle.
    let clock = StageClock::new();
    match brute_force_z4z2(g, &config.oracle) {
        Ok(v) if v.colorable => {
            let coloring = v.witness.expect("colorable verdicts carry a witness");
            if let Ok(ex) = extract(g, &coloring) {
                if let Some(cert) = certified(
                    g,
                    STAGE_NAMES[4],
                    &ex.factor,
                    &ex.matching,
                    &ex.f_matching,
                    &ex.complement,
                    &coloring,
                ) {
                    entry
                        .stages
                        .push(clock.outcome(STAGE_NAMES[4], "success", None));
                    entry.verdict = "colorable".into();
                    entry.stage = Some(STAGE_NAMES[4].into());
                    entry.certificate = Some(cert);
                    return entry;
                }
            }
            entry
                .stages
                .push(clock.outcome(STAGE_NAMES[4], "failed", Some("witness rejected".into())));
            entry.verdict = "unknown".into();
        }
        Ok(_) => {
            entry
                .stages
                .push(clock.outcome(STAGE_NAMES[4], "not-colorable", None));
            entry.verdict = "not-colorable".into();
        }
        Err(_) => {
            entry
                .stages
                .push(clock.outcome(STAGE_NAMES[4], "budget", None));
            if entry.verdict != "not-colorable" {
                entry.verdict = "unknown".into();
            }
        }
    }
    entry
}

/// Scans maximum matchings of an oddness-two 2-factor for a theta main
/// component and colors through it.
fn try_theta_fast_path(
    g: &CubicGraph,
    f: &TwoFactor,
    config: &PipelineConfig,
    tried: &mut usize,
) -> Option<(Certificate, String)> {
    let odd = f.odd_cycle_indices();
    let evens = even_matchings(g, f, config.even_matchings_limit);
    let odd_lens: Vec<usize> = odd.iter().map(|&ci| f.cycles[ci].len()).collect();
    // Odometer over the uncovered-vertex choice per odd cycle.
    let mut skips = vec![0usize; odd.len()];
    loop {
        for m_even in &evens {
            if *tried >= config.max_matchings_per_factor {
                return None;
            }
            *tried += 1;
            let mut edges = m_even.to_vec();
            for (i, &ci) in odd.iter().enumerate() {
                edges.extend(crate::factor::odd_cycle_matching_avoiding(g, f, ci, skips[i]));
            }
            let m_set = crate::bits::EdgeSet::from_indices(g.edge_count(), &edges);
            let Ok(m) = MatchingInF::new(g, f, m_set) else {
                continue;
            };
            let h = reduce(g, &m);
            let Ok(MainComponent::Theta { paths }) = classify_main_component(g, &h) else {
                continue;
            };
            // At least one of the three connecting paths starts and ends
            // with factor edges.
            let Some(p) = paths.iter().find(|p| {
                f.edge_set.contains(p.edges[0]) && f.edge_set.contains(*p.edges.last().unwrap())
            }) else {
                continue;
            };
            let Ok(fm) = validate_f_matching(g, f, &h, vec![p.clone()]) else {
                continue;
            };
            let Ok(fc) = f_complement(g, &h, &fm) else {
                continue;
            };
            if !fc.three_even() {
                continue;
            }
            let Ok(coloring) = construct(g, f, &m, &fm, &fc) else {
                continue;
            };
            if let Some(cert) = certified(g, STAGE_NAMES[1], f, &m, &fm, &fc, &coloring) {
                return Some((cert, format!("{} matchings tried", *tried)));
            }
        }
        // Advance the skip odometer.
        let mut i = 0;
        loop {
            if i == skips.len() {
                return None;
            }
            skips[i] += 1;
            if skips[i] < odd_lens[i] {
                break;
            }
            skips[i] = 0;
            i += 1;
        }
    }
}

/// How a batch is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    /// Rayon data parallelism over graphs; falls back to sequential when
    /// the `parallel` feature is disabled.
    Parallel,
}

fn run_batch_sequential(
    graphs: &[(String, CubicGraph)],
    config: &PipelineConfig,
) -> Vec<ReportEntry> {
    graphs
        .iter()
        .map(|(id, g)| run_pipeline(g, id, config))
        .collect()
}

#[cfg(feature = "parallel")]
fn run_batch_parallel(
    graphs: &[(String, CubicGraph)],
    config: &PipelineConfig,
) -> Vec<ReportEntry> {
    use rayon::prelude::*;
    graphs
        .par_iter()
        .map(|(id, g)| run_pipeline(g, id, config))
        .collect()
}

/// Runs the pipeline over a batch of graphs; output order follows input
/// order in both modes.
pub fn run_batch(
    graphs: &[(String, CubicGraph)],
    config: &PipelineConfig,
    mode: ExecMode,
) -> Vec<ReportEntry> {
    match mode {
        ExecMode::Sequential => run_batch_sequential(graphs, config),
        ExecMode::Parallel => {
            #[cfg(feature = "parallel")]
            {
                run_batch_parallel(graphs, config)
            }
            #[cfg(not(feature = "parallel"))]
            {
                run_batch_sequential(graphs, config)
            }
        }
    }
}
