use std::path::Path;

use picturedef::fillings::{distinguish, filling_lower_bound, FillingReport};
use picturedef::germ::{parse_germ, samples::concurrent_lines};
use picturedef::incidence::{
    check_matrix, constraints_of, enumerate_matrices, enumerate_realizable, matrices_to_text,
    parse_matrices, realizable_by_translated_lines, stream_rng,
};
use picturedef::plumbing::{self, parse_graph, parse_graph_json, recognize_sandwiched, reduce};
use picturedef::resolution::{resolve, sandwiched_graph};
use picturedef::{DecoratedGerm, IncidenceMatrix, Rational, Realizability, Recognition, WeightedTree};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::{reproduce, Command, FillingsCommand, Format, GermCommand, GraphCommand, RunConfig};

pub fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_germ(path: &Path) -> Result<DecoratedGerm, CliError> {
    parse_germ(&read(path)?).map_err(|e| CliError::from_germ(path, e))
}

fn load_graph(path: &Path) -> Result<WeightedTree, CliError> {
    let text = read(path)?;
    let parsed = if text.trim_start().starts_with('{') {
        parse_graph_json(&text)
    } else {
        parse_graph(&text)
    };
    parsed.map(|(tree, _)| tree).map_err(|e| CliError::from_graph(path, e))
}

fn load_matrices(path: &Path) -> Result<Vec<IncidenceMatrix>, CliError> {
    parse_matrices(&read(path)?).map_err(|e| CliError::from_matrices(path, e))
}

fn load_single_matrix(path: &Path) -> Result<IncidenceMatrix, CliError> {
    let mut ms = load_matrices(path)?;
    if ms.len() != 1 {
        return Err(CliError::input(path, format!("expected one matrix, found {}", ms.len())));
    }
    Ok(ms.remove(0))
}

fn json_line(v: &Value) -> String {
    format!("{v}\n")
}

fn tuple<T: ToString>(xs: &[T]) -> String {
    format!("({})", xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(","))
}

fn matrices_json(ms: &[IncidenceMatrix]) -> String {
    ms.iter().map(|m| json_line(&json!({ "rows": m.to_rows() }))).collect()
}

pub fn dispatch(config: &RunConfig) -> Result<String, CliError> {
    let fmt = config.format;
    match &config.command {
        Command::Germ(cmd) => germ(cmd, config),
        Command::Resolve { germ, ecl } => {
            let germ = load_germ(germ)?;
            if *ecl {
                let tree = sandwiched_graph(&germ)?.tree;
                Ok(graph_out(&tree, fmt))
            } else {
                let graph = resolve(&germ)?;
                Ok(match fmt {
                    Format::Text => graph.to_text(),
                    Format::Json => graph.to_json_lines(),
                })
            }
        }
        Command::Graph(cmd) => graph(cmd, fmt),
        Command::Enumerate { germ } => {
            let ms = enumerate_matrices(&constraints_of(&load_germ(germ)?));
            Ok(match fmt {
                Format::Text => matrices_to_text(&ms),
                Format::Json => matrices_json(&ms),
            })
        }
        Command::Realizable {
            germ,
            slopes,
            samples,
            seed,
            matrices,
        } => realizable(germ.as_deref(), slopes, *samples, *seed, matrices.as_deref(), fmt),
        Command::Fillings(cmd) => fillings(cmd, fmt),
        Command::Reproduce {
            example,
            seed,
            samples,
            no_check,
        } => {
            let report = reproduce::run(*example, config.m_big_rule, *seed, *samples, !*no_check)?;
            Ok(match fmt {
                Format::Text => report,
                Format::Json => json_line(&json!({ "example": example.name(), "report": report })),
            })
        }
    }
}

fn germ(cmd: &GermCommand, config: &RunConfig) -> Result<String, CliError> {
    let fmt = config.format;
    match cmd {
        GermCommand::Check { germ } => {
            let g = load_germ(germ)?;
            Ok(match fmt {
                Format::Text => g.canonical_text(),
                Format::Json => json_line(&json!({
                    "valid": true,
                    "points": g.cluster().len(),
                    "branches": g.branch_count(),
                    "canonical": g.canonical_text(),
                })),
            })
        }
        GermCommand::Invariants { germ } => {
            let inv = load_germ(germ)?.invariants(config.m_big_rule);
            Ok(match fmt {
                Format::Text => {
                    let mut out = format!("rule={}\n", inv.rule);
                    out.push_str(&format!("delta={}\n", tuple(&inv.delta)));
                    out.push_str(&format!("m={}\n", tuple(&inv.total_multiplicity)));
                    out.push_str(&format!("M={}\n", tuple(&inv.embedded_total_multiplicity)));
                    let r = inv.delta.len();
                    for i in 0..r {
                        for k in i + 1..r {
                            out.push_str(&format!("C{}.C{}={}\n", i + 1, k + 1, inv.intersections[i][k]));
                        }
                    }
                    out.push_str(&format!("delta(C)={}\n", inv.delta_curve));
                    out.push_str(&format!("standard={}\n", inv.standard));
                    out
                }
                Format::Json => json_line(&serde_json::to_value(&inv).expect("serializable")),
            })
        }
        GermCommand::Equivalent { first, second } => {
            let map = load_germ(first)?.equivalence(&load_germ(second)?);
            Ok(match fmt {
                Format::Text => match &map {
                    Some(m) => {
                        let mut out = String::from("equivalent\n");
                        for (a, b) in m {
                            out.push_str(&format!("map {a} {b}\n"));
                        }
                        out
                    }
                    None => "not equivalent\n".to_owned(),
                },
                Format::Json => json_line(&json!({ "equivalent": map.is_some(), "map": map })),
            })
        }
    }
}

fn graph_out(tree: &WeightedTree, fmt: Format) -> String {
    match fmt {
        Format::Text => tree.to_text(),
        Format::Json => tree.to_json_lines(),
    }
}

fn graph_records(tree: &WeightedTree) -> Vec<Value> {
    tree.to_json_lines()
        .lines()
        .map(|l| serde_json::from_str(l).expect("own json output"))
        .collect()
}

fn graph(cmd: &GraphCommand, fmt: Format) -> Result<String, CliError> {
    match cmd {
        GraphCommand::Blowdown { graph, vertex: Some(label) } => {
            let tree = load_graph(graph)?;
            let v = tree
                .index_of(label)
                .ok_or_else(|| CliError::domain(&picturedef::PlumbingError::UnknownVertex(label.clone())))?;
            Ok(graph_out(&plumbing::blow_down_step(&tree, v)?, fmt))
        }
        GraphCommand::Blowdown { graph, vertex: None } => {
            let red = reduce(&load_graph(graph)?);
            Ok(match fmt {
                Format::Text => {
                    let mut out: String = red.trace.iter().map(|l| format!("contract {l}\n")).collect();
                    if red.is_smooth() {
                        out.push_str("remainder: empty (smooth)\n");
                    } else {
                        out.push_str("remainder:\n");
                        out.push_str(&red.remainder.to_text());
                    }
                    out
                }
                Format::Json => json_line(&json!({
                    "trace": red.trace,
                    "smooth": red.is_smooth(),
                    "remainder": graph_records(&red.remainder),
                })),
            })
        }
        GraphCommand::Definite { graph } => {
            let nd = plumbing::is_negative_definite(&load_graph(graph)?);
            Ok(match fmt {
                Format::Text => format!("negative-definite={nd}\n"),
                Format::Json => json_line(&json!({ "negative_definite": nd })),
            })
        }
        GraphCommand::Recognize { graph, max_extra } => {
            let tree = load_graph(graph)?;
            Ok(match (recognize_sandwiched(&tree, *max_extra)?, fmt) {
                (Recognition::Certified(cert), Format::Text) => {
                    let mut out = String::from("sandwiched: certified\n");
                    for (host, k) in cert.additions.iter().filter(|(_, k)| *k > 0) {
                        out.push_str(&format!("add {host} {k}\n"));
                    }
                    for label in &cert.blow_downs {
                        out.push_str(&format!("blow-down {label}\n"));
                    }
                    out
                }
                (Recognition::Certified(cert), Format::Json) => json_line(&json!({
                    "sandwiched": "certified",
                    "additions": cert.additions,
                    "blow_downs": cert.blow_downs,
                })),
                (Recognition::Unknown { bounds, candidates_tried }, Format::Text) => format!(
                    "sandwiched: unknown\nbounds: {}\ncandidates tried: {candidates_tried}\n",
                    bounds.iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
                ),
                (Recognition::Unknown { bounds, candidates_tried }, Format::Json) => json_line(&json!({
                    "sandwiched": "unknown",
                    "bounds": bounds,
                    "candidates_tried": candidates_tried,
                })),
            })
        }
    }
}

fn realizable(
    germ: Option<&Path>,
    slopes: &[Rational],
    samples: usize,
    seed: u64,
    matrices: Option<&Path>,
    fmt: Format,
) -> Result<String, CliError> {
    let germ = match germ {
        Some(path) => load_germ(path)?,
        None if slopes.len() >= 2 => concurrent_lines(slopes.len(), slopes.len() as u64 - 1),
        None => {
            return Err(CliError::domain(&picturedef::IncidenceError::PreconditionViolated(
                "at least two slopes are needed".into(),
            )))
        }
    };
    let cs = constraints_of(&germ);
    let Some(path) = matrices else {
        let ms = enumerate_realizable(&cs, slopes, samples, seed)?;
        return Ok(match fmt {
            Format::Text => matrices_to_text(&ms),
            Format::Json => matrices_json(&ms),
        });
    };
    let ms = load_matrices(path)?;
    let mut out = String::new();
    for (k, m) in ms.iter().enumerate() {
        check_matrix(m, &cs)?;
        let verdict = realizable_by_translated_lines(m, &cs, slopes, samples, &mut stream_rng(seed, k as u64))?;
        let line = match (verdict, fmt) {
            (Realizability::Realizable { offsets }, Format::Text) => format!(
                "matrix {}: realizable offsets={}\n",
                k + 1,
                offsets.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
            ),
            (Realizability::NotRealizable { samples, failure_bound }, Format::Text) => format!(
                "matrix {}: not realizable after {samples} samples (false-negative bound {failure_bound:.3e})\n",
                k + 1
            ),
            (Realizability::Realizable { offsets }, Format::Json) => json_line(&json!({
                "matrix": k + 1,
                "realizable": true,
                "offsets": offsets.iter().map(ToString::to_string).collect::<Vec<_>>(),
            })),
            (Realizability::NotRealizable { samples, failure_bound }, Format::Json) => json_line(&json!({
                "matrix": k + 1,
                "realizable": false,
                "samples": samples,
                "failure_bound": failure_bound,
            })),
        };
        out.push_str(&line);
    }
    Ok(out)
}

fn report_json(r: &FillingReport) -> Value {
    json!({
        "matrix": r.matrix.to_rows(),
        "gram": r.gram,
        "euler_number": r.euler_number,
        "kernel_rank": r.kernel.rank(),
        "kernel_gram": r.kernel.gram,
        "cap": r.cap.handles,
    })
}

fn fillings(cmd: &FillingsCommand, fmt: Format) -> Result<String, CliError> {
    match cmd {
        FillingsCommand::Report { germ, matrices } => {
            let germ = load_germ(germ)?;
            let reports = load_matrices(matrices)?
                .iter()
                .map(|m| FillingReport::new(&germ, m))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(match fmt {
                Format::Text => reports.iter().map(FillingReport::to_text).collect::<Vec<_>>().join("\n"),
                Format::Json => reports.iter().map(|r| json_line(&report_json(r))).collect(),
            })
        }
        FillingsCommand::Distinguish { germ, first, second } => {
            let d = distinguish(&load_germ(germ)?, &load_single_matrix(first)?, &load_single_matrix(second)?)?;
            Ok(match fmt {
                Format::Text => format!("{d}\n"),
                Format::Json => json_line(&json!({ "verdict": d })),
            })
        }
        FillingsCommand::Count { germs, matrices } => {
            let gs = germs.iter().map(|p| load_germ(p)).collect::<Result<Vec<_>, _>>()?;
            let sets = if matrices.is_empty() {
                gs.iter().map(|g| enumerate_matrices(&constraints_of(g))).collect()
            } else {
                matrices.iter().map(|p| load_matrices(p)).collect::<Result<Vec<_>, _>>()?
            };
            let n = filling_lower_bound(&gs, &sets)?;
            Ok(match fmt {
                Format::Text => format!("filling lower bound: {n}\n"),
                Format::Json => json_line(&json!({ "filling_lower_bound": n })),
            })
        }
    }
}
