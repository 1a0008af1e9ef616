//! Command line driver: ingest graphs, run the staged coloring strategy,
//! emit certificates and batch reports.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use z4z2::generators;
use z4z2::oracle;
use z4z2::pipeline::{run_batch, run_pipeline, ExecMode, PipelineConfig};
use z4z2::{parse_graph6_lines, to_graph6, Certificate, CubicGraph};

/// Exit codes: 0 success, 1 verification failure, 2 input error,
/// 3 budget exhausted.
const EXIT_VERIFY: i32 = 1;
const EXIT_INPUT: i32 = 2;
const EXIT_BUDGET: i32 = 3;

#[derive(Parser)]
#[command(name = "z4z2", version, about = "Proper Z4xZ2 edge-colorings of cubic graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct BudgetArgs {
    /// Perfect matchings scanned per graph; defaults to every matching
    /// up to 30 vertices and 300 above.
    #[arg(long)]
    pm_limit: Option<usize>,
    /// Node budget for structure searches.
    #[arg(long, default_value_t = 2_000_000)]
    search_nodes: u64,
    /// Node budget for the brute-force oracles.
    #[arg(long, default_value_t = 50_000_000)]
    oracle_nodes: u64,
    /// Disable the oracle's symmetry reduction.
    #[arg(long)]
    paranoid: bool,
}

impl BudgetArgs {
    fn pipeline_config(&self) -> PipelineConfig {
        PipelineConfig {
            pm_limit: self.pm_limit,
            f_search_nodes: self.search_nodes,
            char_nodes: self.oracle_nodes,
            oracle: oracle::OracleConfig {
                node_budget: self.oracle_nodes,
                paranoid: self.paranoid,
            },
            ..PipelineConfig::default()
        }
    }

    fn oracle_config(&self) -> oracle::OracleConfig {
        oracle::OracleConfig {
            node_budget: self.oracle_nodes,
            paranoid: self.paranoid,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Color graphs from a graph6 file ('-' reads standard input) and
    /// print one certificate JSON document per colorable graph.
    Color {
        /// Input path or '-' for standard input.
        input: String,
        #[command(flatten)]
        budgets: BudgetArgs,
        /// Write certificates to this directory instead of stdout.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Also write a DOT rendering next to each certificate.
        #[arg(long)]
        emit_dot: bool,
        /// Print one diagnostics JSON line per correction candidate to
        /// standard error.
        #[arg(long)]
        diagnostics: bool,
    },
    /// Re-verify a certificate produced by `color`.
    Verify { certificate: PathBuf },
    /// Exact colorability verdicts for every graph in a file.
    Oracle {
        input: String,
        #[command(flatten)]
        budgets: BudgetArgs,
    },
    /// Batch pipeline over a graph6 file, one JSON report line per graph.
    Survey {
        input: String,
        #[command(flatten)]
        budgets: BudgetArgs,
        /// Output JSONL path (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Process graphs sequentially instead of with the worker pool.
        #[arg(long)]
        sequential: bool,
    },
    /// Print generator output as graph6.
    Gen {
        /// petersen | blanusa1 | blanusa2 | flower | permutation | controls
        family: String,
        /// flower: k. permutation: n, then either a seed via --seed or an
        /// explicit permutation of 0..n as remaining arguments.
        params: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Resistance, reduction number, oddness, and the bound check for
    /// every graph in a file.
    Reduce {
        input: String,
        #[command(flatten)]
        budgets: BudgetArgs,
    },
}

fn read_input(input: &str) -> Result<String> {
    if input == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        Ok(buf)
    } else {
        std::fs::read_to_string(input).with_context(|| format!("reading {input}"))
    }
}

fn load_graphs(input: &str) -> Result<Vec<(String, CubicGraph)>> {
    let text = read_input(input)?;
    let graphs = parse_graph6_lines(&text).map_err(|e| anyhow::anyhow!("{e}"))?;
    Ok(graphs
        .into_iter()
        .enumerate()
        .map(|(i, g)| (format!("g{i}"), g))
        .collect())
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_INPUT
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Color {
            input,
            budgets,
            out_dir,
            emit_dot,
            diagnostics,
        } => color_cmd(&input, &budgets, out_dir.as_deref(), emit_dot, diagnostics),
        Command::Verify { certificate } => verify_cmd(&certificate),
        Command::Oracle { input, budgets } => oracle_cmd(&input, &budgets),
        Command::Survey {
            input,
            budgets,
            out,
            sequential,
        } => survey_cmd(&input, &budgets, out.as_deref(), sequential),
        Command::Gen {
            family,
            params,
            seed,
        } => gen_cmd(&family, &params, seed),
        Command::Reduce { input, budgets } => reduce_cmd(&input, &budgets),
    }
}

fn color_cmd(
    input: &str,
    budgets: &BudgetArgs,
    out_dir: Option<&Path>,
    emit_dot: bool,
    diagnostics: bool,
) -> Result<i32> {
    let graphs = load_graphs(input)?;
    if graphs.is_empty() {
        bail!("no graphs in input");
    }
    let config = budgets.pipeline_config();
    let mut worst = 0;
    for (id, g) in &graphs {
        let entry = run_pipeline(g, id, &config);
        if diagnostics {
            for d in &entry.diagnostics {
                eprintln!("{}", serde_json::to_string(d)?);
            }
        }
        match (&entry.certificate, entry.verdict.as_str()) {
            (Some(cert), _) => {
                let json = cert.to_json();
                if let Some(dir) = out_dir {
                    std::fs::create_dir_all(dir)?;
                    let path = dir.join(format!("{id}.cert.json"));
                    std::fs::File::create(&path)?.write_all(json.as_bytes())?;
                    if emit_dot {
                        let dot = cert.to_dot().map_err(|e| anyhow::anyhow!("{e}"))?;
                        std::fs::write(dir.join(format!("{id}.dot")), dot)?;
                    }
                    println!("{id}: colorable via {} -> {}", cert.stage, path.display());
                } else {
                    println!("{json}");
                    if emit_dot {
                        let dot = cert.to_dot().map_err(|e| anyhow::anyhow!("{e}"))?;
                        println!("{dot}");
                    }
                }
            }
            (None, "not-colorable") => {
                println!("{id}: not colorable");
                worst = worst.max(EXIT_VERIFY);
            }
            (None, _) => {
                println!("{id}: unknown (budgets exhausted)");
                worst = worst.max(EXIT_BUDGET);
            }
        }
    }
    Ok(worst)
}

fn verify_cmd(path: &Path) -> Result<i32> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {path:?}"))?;
    let cert = Certificate::from_json(&text)?;
    match cert.reverify() {
        Ok(()) => {
            println!("ok: certificate verifies ({} stage)", cert.stage);
            Ok(0)
        }
        Err(e) => {
            println!("FAIL: {e}");
            Ok(EXIT_VERIFY)
        }
    }
}

fn oracle_cmd(input: &str, budgets: &BudgetArgs) -> Result<i32> {
    let graphs = load_graphs(input)?;
    let config = budgets.oracle_config();
    let mut worst = 0;
    for (id, g) in &graphs {
        let three = oracle::is_3_edge_colorable(g, &config);
        let z = oracle::brute_force_z4z2(g, &config);
        match (three, z) {
            (Ok(t), Ok(v)) => {
                let verdict = serde_json::json!({
                    "id": id,
                    "graph6": to_graph6(g),
                    "three_edge_colorable": t.is_some(),
                    "z4z2_colorable": v.colorable,
                    "nodes": v.nodes,
                });
                println!("{verdict}");
            }
            _ => {
                println!("{}", serde_json::json!({"id": id, "error": "budget exhausted"}));
                worst = worst.max(EXIT_BUDGET);
            }
        }
    }
    Ok(worst)
}

fn survey_cmd(
    input: &str,
    budgets: &BudgetArgs,
    out: Option<&Path>,
    sequential: bool,
) -> Result<i32> {
    let graphs = load_graphs(input)?;
    let config = budgets.pipeline_config();
    let mode = if sequential {
        ExecMode::Sequential
    } else {
        ExecMode::Parallel
    };
    let entries = run_batch(&graphs, &config, mode);
    let mut lines = String::new();
    for e in &entries {
        lines.push_str(&serde_json::to_string(e)?);
        lines.push('\n');
    }
    match out {
        Some(path) => std::fs::write(path, lines)?,
        None => print!("{lines}"),
    }
    let budget_hit = entries.iter().any(|e| e.verdict == "unknown");
    Ok(if budget_hit { EXIT_BUDGET } else { 0 })
}

fn gen_cmd(family: &str, params: &[usize], seed: u64) -> Result<i32> {
    let print = |g: &CubicGraph| println!("{}", to_graph6(g));
    match family {
        "petersen" => print(&generators::petersen()),
        "blanusa1" => print(&generators::blanusa(1)?),
        "blanusa2" => print(&generators::blanusa(2)?),
        "flower" => {
            let k = *params.first().context("flower needs k")?;
            print(&generators::flower(k)?);
        }
        "controls" => {
            for (_, g) in generators::controls() {
                print(&g);
            }
        }
        "permutation" => {
            let n = *params.first().context("permutation needs n")?;
            let pi = if params.len() > 1 {
                params[1..].to_vec()
            } else {
                generators::random_permutation(n, &mut generators::seeded_rng(seed))
            };
            let spec = generators::PermutationSpec::new(n, pi)?;
            let (g, _) = generators::permutation_graph(&spec)?;
            print(&g);
        }
        other => bail!("unknown family {other}"),
    }
    Ok(0)
}

fn reduce_cmd(input: &str, budgets: &BudgetArgs) -> Result<i32> {
    let graphs = load_graphs(input)?;
    let config = budgets.oracle_config();
    let mut worst = 0;
    for (id, g) in &graphs {
        let r = oracle::resistance(g, budgets.oracle_nodes);
        let er = oracle::reduction_number(g, &config);
        let odd = oracle::oddness(g, budgets.pm_limit);
        match (r, er, odd) {
            (Ok(r), Ok(er), Some((omega, proven))) => {
                let bound_holds = 2 * er <= g.vertex_count() - omega;
                println!(
                    "{}",
                    serde_json::json!({
                        "id": id,
                        "graph6": to_graph6(g),
                        "resistance": r,
                        "reduction_number": er,
                        "oddness": omega,
                        "oddness_proven_minimal": proven,
                        "bound_2er_le_n_minus_omega": bound_holds,
                    })
                );
                if !bound_holds {
                    worst = worst.max(EXIT_VERIFY);
                }
            }
            _ => {
                println!("{}", serde_json::json!({"id": id, "error": "budget exhausted"}));
                worst = worst.max(EXIT_BUDGET);
            }
        }
    }
    Ok(worst)
}
