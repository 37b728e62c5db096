//! Command line front end for the Eulerian extension toolkit: instance I/O,
//! exact solvers, exhaustive oracles, reductions, generators, certificate
//! checks and a small benchmark harness.
//!
//! Exit codes follow the decision problem: 0 means yes and the solution went
//! to standard output (or `--out`), 1 means no, 2 means a usage, I/O or
//! parse error. `--json` switches every report to one machine readable
//! object; instance files named `-` are read from standard input.

mod formats;

use clap::{Parser, Subcommand, ValueEnum};
use eulex_core::advice::enumerate_min_connecting_advices;
use eulex_core::cbm::{oracle_cbm, solve_cbm_general, verify_matching};
use eulex_core::gen::{gen_random_cbm_degree2, gen_random_ee, gen_random_ssc};
use eulex_core::graph::EeInstance;
use eulex_core::preprocess::preprocess;
use eulex_core::reductions::{ee_to_rp, hc_to_ee, kernelize_eeca, rp_to_ee, sat3_to_cbm};
use eulex_core::solver::{
    oracle_ee_with_cap, solve_ee, verify_extension, SolveStats, ORACLE_DEFAULT_CAP,
};
use eulex_core::ssc::{compose_ssc, solve_ssc, ssc_to_2dee, twodee_to_ee, verify_ssc_choice};
use eulex_core::weight::Weight;
use serde_json::{json, Value};
use std::fs;
use std::io::Read as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "eulex", version, about = "Eulerian extension solver toolkit")]
struct Cli {
    /// Emit one machine readable JSON object instead of plain text.
    #[arg(long, global = true)]
    json: bool,
    /// Write the output to a file instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an EE instance exactly; prints the weight and the extension.
    SolveEe { file: String },
    /// Solve a CBM instance exactly; prints the weight and the matching.
    SolveCbm { file: String },
    /// Solve an SSC instance; prints one chosen position per switch.
    SolveSsc { file: String },
    /// Decide an EE instance by exhaustive search (small instances only).
    OracleEe {
        file: String,
        /// Largest admissible vertex count.
        #[arg(long, default_value_t = ORACLE_DEFAULT_CAP)]
        cap: usize,
    },
    /// Decide a CBM instance by enumerating every perfect matching.
    OracleCbm { file: String },
    /// Normalize an EE instance: split vertices, close weights metrically.
    Preprocess { file: String },
    /// Translate an instance into another problem of the family.
    Reduce { kind: ReduceKind, file: String },
    /// Merge SSC instances into one that is solvable iff some input is.
    ComposeSsc {
        #[arg(required = true)]
        files: Vec<String>,
    },
    /// Shrink an advice bearing EE instance to its problem kernel.
    KernelizeEeca {
        file: String,
        /// Advice as comma separated hints, each a dash separated component
        /// trace, cycle hints marked by a leading `*`: `0-1-0,*0-1-2-0`.
        /// Defaults to the first minimal connecting advice of the instance.
        #[arg(long)]
        advice: Option<String>,
    },
    /// Generate a random instance.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Check a certificate against an instance.
    Verify { kind: VerifyKind, instance: String, certificate: String },
    /// Solve EE instances in bulk and report effort counters per instance.
    Bench {
        /// Instance files; seeded random instances are used when absent.
        files: Vec<String>,
        /// Number of generated instances when no files are given.
        #[arg(long, default_value_t = 24)]
        count: usize,
        /// Generator seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ReduceKind {
    #[value(name = "hc-to-ee")]
    HcToEe,
    #[value(name = "rp-to-ee")]
    RpToEe,
    #[value(name = "ee-to-rp")]
    EeToRp,
    #[value(name = "sat-to-cbm")]
    SatToCbm,
    #[value(name = "ssc-to-2dee")]
    SscTo2dee,
    #[value(name = "2dee-to-ee")]
    TwodeeToEe,
}

#[derive(Subcommand)]
enum GenKind {
    /// A random EE instance with the given shape.
    Ee {
        /// Vertices.
        #[arg(long, default_value_t = 7)]
        n: usize,
        /// Connected components.
        #[arg(long, default_value_t = 2)]
        c: usize,
        /// Total positive balance.
        #[arg(long, default_value_t = 2)]
        b: usize,
        /// Largest finite weight.
        #[arg(long, default_value_t = 10)]
        wmax: Weight,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// A random CBM instance with left degrees at most two.
    Cbm {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// A random SSC instance.
    Ssc {
        #[arg(long, default_value_t = 2)]
        colors: usize,
        #[arg(long, default_value_t = 2)]
        switches: usize,
        /// Positions per switch.
        #[arg(long, default_value_t = 2)]
        positions: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyKind {
    Ee,
    Cbm,
    Ssc,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("eulex: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read_input(path: &str) -> Result<String, String> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf).map_err(|e| format!("standard input: {e}"))?;
        Ok(buf)
    } else {
        fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))
    }
}

fn deliver(out: &Option<PathBuf>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Attributes a parse error to its source file.
fn at<T>(path: &str, parsed: Result<T, formats::ParseError>) -> Result<T, String> {
    parsed.map_err(|e| format!("{path}: {e}"))
}

enum Cert {
    Pairs(Vec<(usize, usize)>),
    Choice(Vec<usize>),
}

/// One decided question, ready for plain or JSON output.
struct Outcome {
    command: &'static str,
    answer: bool,
    weight: Option<Weight>,
    cert: Option<Cert>,
    stats: Value,
    time_ms: f64,
    /// Explanation written to standard error when the answer is no.
    note: Option<String>,
}

fn finish(cli: &Cli, o: Outcome) -> Result<ExitCode, String> {
    let text = if cli.json {
        let cert = match &o.cert {
            Some(Cert::Pairs(pairs)) => json!(pairs),
            Some(Cert::Choice(choice)) => json!(choice),
            None => Value::Null,
        };
        let mut v = json!({
            "schema": 1,
            "command": o.command,
            "answer": if o.answer { "yes" } else { "no" },
            "weight": o.weight,
            "certificate": cert,
            "stats": o.stats,
            "time_ms": o.time_ms,
        });
        if !o.answer {
            v["reason"] = json!(o.note);
        }
        format!("{v:#}\n")
    } else if o.answer {
        let mut t = String::new();
        if let Some(w) = o.weight {
            t.push_str(&format!("# weight {w}\n"));
        }
        match &o.cert {
            Some(Cert::Pairs(pairs)) => t.push_str(&formats::render_pair_cert(pairs)),
            Some(Cert::Choice(choice)) => t.push_str(&formats::render_choice_cert(choice)),
            None => {}
        }
        t
    } else {
        String::new()
    };
    deliver(&cli.out, &text)?;
    if !o.answer {
        if let Some(note) = &o.note {
            eprintln!("eulex: {note}");
        }
    }
    Ok(if o.answer { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

/// Output for commands that rewrite instances rather than decide them.
fn emit_instance(
    cli: &Cli,
    command: &'static str,
    text: String,
    extra: Vec<(&'static str, Value)>,
) -> Result<ExitCode, String> {
    if cli.json {
        let mut obj = serde_json::Map::new();
        obj.insert("schema".into(), json!(1));
        obj.insert("command".into(), json!(command));
        for (key, value) in extra {
            obj.insert(key.into(), value);
        }
        obj.insert("instance".into(), json!(text));
        deliver(&cli.out, &format!("{:#}\n", Value::Object(obj)))?;
    } else {
        deliver(&cli.out, &text)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn ee_stats(inst: &EeInstance, solve: Option<&SolveStats>) -> Value {
    let mut stats = json!({
        "n": inst.n(),
        "m": inst.graph.arcs().len(),
        "b": inst.graph.total_positive_balance(),
        "c": inst.graph.components().count,
    });
    if let Some(s) = solve {
        stats["advices"] = json!(s.advices);
        stats["nodes"] = json!(s.nodes);
        stats["branches"] = json!(s.branches);
        stats["max_branches_per_node"] = json!(s.max_branches_per_node);
        stats["minpath_calls"] = json!(s.minpath_calls);
    }
    stats
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match &cli.command {
        Command::SolveEe { file } => {
            let inst = at(file, formats::parse_ee(&read_input(file)?))?;
            let start = Instant::now();
            let report = solve_ee(&inst);
            let time_ms = start.elapsed().as_secs_f64() * 1e3;
            let stats = ee_stats(&inst, Some(&report.stats));
            let (answer, weight, cert) =
                match report.optimum.filter(|&(w, _)| w <= inst.omega_max) {
                    Some((w, ext)) => (true, Some(w), Some(Cert::Pairs(ext))),
                    None => (false, None, None),
                };
            finish(
                &cli,
                Outcome {
                    command: "solve-ee",
                    answer,
                    weight,
                    cert,
                    stats,
                    time_ms,
                    note: Some("no extension within the budget".into()),
                },
            )
        }
        Command::SolveCbm { file } => {
            let inst = at(file, formats::parse_cbm(&read_input(file)?))?;
            let start = Instant::now();
            let solved = solve_cbm_general(&inst);
            let time_ms = start.elapsed().as_secs_f64() * 1e3;
            let stats = json!({
                "n": inst.n(),
                "m": inst.edges().len(),
                "cells": inst.num_cells(),
                "joins": inst.joins().len(),
            });
            let (answer, weight, cert) = match solved {
                Some((w, matching)) => (true, Some(w), Some(Cert::Pairs(matching))),
                None => (false, None, None),
            };
            finish(
                &cli,
                Outcome {
                    command: "solve-cbm",
                    answer,
                    weight,
                    cert,
                    stats,
                    time_ms,
                    note: Some("no conjoining perfect matching within the budget".into()),
                },
            )
        }
        Command::SolveSsc { file } => {
            let inst = at(file, formats::parse_ssc(&read_input(file)?))?;
            let start = Instant::now();
            let solved = solve_ssc(&inst);
            let time_ms = start.elapsed().as_secs_f64() * 1e3;
            let stats = json!({
                "colors": inst.num_colors(),
                "switches": inst.switches().len(),
            });
            let (answer, cert) = match solved {
                Some(choice) => (true, Some(Cert::Choice(choice))),
                None => (false, None),
            };
            finish(
                &cli,
                Outcome {
                    command: "solve-ssc",
                    answer,
                    weight: None,
                    cert,
                    stats,
                    time_ms,
                    note: Some("no choice of positions covers all colors".into()),
                },
            )
        }
        Command::OracleEe { file, cap } => {
            let inst = at(file, formats::parse_ee(&read_input(file)?))?;
            if inst.n() > *cap {
                return Err(format!(
                    "{file}: the oracle accepts at most {cap} vertices, the instance has {}",
                    inst.n()
                ));
            }
            let start = Instant::now();
            let solved = oracle_ee_with_cap(&inst, *cap);
            let time_ms = start.elapsed().as_secs_f64() * 1e3;
            let stats = ee_stats(&inst, None);
            let (answer, weight, cert) = match solved {
                Some((w, ext)) => (true, Some(w), Some(Cert::Pairs(ext))),
                None => (false, None, None),
            };
            finish(
                &cli,
                Outcome {
                    command: "oracle-ee",
                    answer,
                    weight,
                    cert,
                    stats,
                    time_ms,
                    note: Some("no extension within the budget".into()),
                },
            )
        }
        Command::OracleCbm { file } => {
            let inst = at(file, formats::parse_cbm(&read_input(file)?))?;
            if inst.n() > 16 {
                return Err(format!(
                    "{file}: the oracle accepts at most 16 vertices, the instance has {}",
                    inst.n()
                ));
            }
            let start = Instant::now();
            let solved = oracle_cbm(&inst);
            let time_ms = start.elapsed().as_secs_f64() * 1e3;
            let stats = json!({
                "n": inst.n(),
                "m": inst.edges().len(),
                "cells": inst.num_cells(),
                "joins": inst.joins().len(),
            });
            finish(
                &cli,
                Outcome {
                    command: "oracle-cbm",
                    answer: solved.is_some(),
                    weight: solved,
                    cert: None,
                    stats,
                    time_ms,
                    note: Some("no conjoining perfect matching within the budget".into()),
                },
            )
        }
        Command::Preprocess { file } => {
            let inst = at(file, formats::parse_ee(&read_input(file)?))?;
            let (pre, _) = preprocess(&inst);
            emit_instance(&cli, "preprocess", formats::render_ee(&pre), Vec::new())
        }
        Command::Reduce { kind, file } => {
            let text = read_input(file)?;
            let rendered = match kind {
                ReduceKind::HcToEe => {
                    formats::render_ee(&hc_to_ee(&at(file, formats::parse_hc(&text))?))
                }
                ReduceKind::RpToEe => {
                    formats::render_ee(&rp_to_ee(&at(file, formats::parse_rp(&text))?))
                }
                ReduceKind::EeToRp => {
                    formats::render_rp(&ee_to_rp(&at(file, formats::parse_ee(&text))?))
                }
                ReduceKind::SatToCbm => {
                    formats::render_cbm(&sat3_to_cbm(&at(file, formats::parse_sat(&text))?))
                }
                ReduceKind::SscTo2dee => {
                    formats::render_2dee(&ssc_to_2dee(&at(file, formats::parse_ssc(&text))?))
                }
                ReduceKind::TwodeeToEe => {
                    formats::render_ee(&twodee_to_ee(&at(file, formats::parse_2dee(&text))?))
                }
            };
            emit_instance(&cli, "reduce", rendered, Vec::new())
        }
        Command::ComposeSsc { files } => {
            let mut instances = Vec::with_capacity(files.len());
            for f in files {
                instances.push(at(f, formats::parse_ssc(&read_input(f)?))?);
            }
            let merged = compose_ssc(&instances);
            emit_instance(&cli, "compose-ssc", formats::render_ssc(&merged), Vec::new())
        }
        Command::KernelizeEeca { file, advice } => {
            let inst = at(file, formats::parse_ee(&read_input(file)?))?;
            let advice = match advice {
                Some(text) => formats::parse_advice(text).map_err(|e| format!("--advice: {e}"))?,
                None => {
                    let c = inst.graph.components().count;
                    if c == 1 {
                        Vec::new()
                    } else {
                        enumerate_min_connecting_advices(c).into_iter().next().unwrap()
                    }
                }
            };
            let (kernel, kernel_advice) = kernelize_eeca(&inst, &advice);
            let mut text = String::new();
            if !kernel_advice.is_empty() {
                text.push_str(&format!("# advice {}\n", formats::render_advice(&kernel_advice)));
            }
            text.push_str(&formats::render_ee(&kernel));
            emit_instance(
                &cli,
                "kernelize-eeca",
                text,
                vec![("advice", json!(formats::render_advice(&kernel_advice)))],
            )
        }
        Command::Gen { kind } => match kind {
            GenKind::Ee { n, c, b, wmax, seed } => {
                if *c == 0 || *c > *n {
                    return Err(format!("gen ee: needs 1 <= c <= n, got c = {c}, n = {n}"));
                }
                let inst = gen_random_ee(*n, *c, *b, *wmax, *seed);
                emit_instance(&cli, "gen-ee", formats::render_ee(&inst), Vec::new())
            }
            GenKind::Cbm { seed } => {
                let inst = gen_random_cbm_degree2(*seed);
                emit_instance(&cli, "gen-cbm", formats::render_cbm(&inst), Vec::new())
            }
            GenKind::Ssc { colors, switches, positions, seed } => {
                if *colors == 0 {
                    return Err("gen ssc: needs at least one color".into());
                }
                let inst = gen_random_ssc(*colors, *switches, *positions, *seed);
                emit_instance(&cli, "gen-ssc", formats::render_ssc(&inst), Vec::new())
            }
        },
        Command::Verify { kind, instance, certificate } => {
            let inst_text = read_input(instance)?;
            let cert_text = read_input(certificate)?;
            let start = Instant::now();
            let outcome = match kind {
                VerifyKind::Ee => {
                    let inst = at(instance, formats::parse_ee(&inst_text))?;
                    let cert = at(certificate, formats::parse_pair_cert(&cert_text))?;
                    let stats = ee_stats(&inst, None);
                    match verify_extension(&inst, &cert) {
                        Ok(w) if w <= inst.omega_max => (true, Some(w), stats, None),
                        Ok(w) => (
                            false,
                            None,
                            stats,
                            Some(format!("weight {w} exceeds the budget {}", inst.omega_max)),
                        ),
                        Err(e) => (false, None, stats, Some(e.to_string())),
                    }
                }
                VerifyKind::Cbm => {
                    let inst = at(instance, formats::parse_cbm(&inst_text))?;
                    let cert = at(certificate, formats::parse_pair_cert(&cert_text))?;
                    let stats = json!({ "n": inst.n(), "m": inst.edges().len() });
                    match verify_matching(&inst, &cert) {
                        Ok(w) if w <= inst.omega_max => (true, Some(w), stats, None),
                        Ok(w) => (
                            false,
                            None,
                            stats,
                            Some(format!("weight {w} exceeds the budget {}", inst.omega_max)),
                        ),
                        Err(e) => (false, None, stats, Some(e.to_string())),
                    }
                }
                VerifyKind::Ssc => {
                    let inst = at(instance, formats::parse_ssc(&inst_text))?;
                    let cert = at(certificate, formats::parse_choice_cert(&cert_text))?;
                    let stats = json!({
                        "colors": inst.num_colors(),
                        "switches": inst.switches().len(),
                    });
                    if verify_ssc_choice(&inst, &cert) {
                        (true, None, stats, None)
                    } else {
                        (false, None, stats, Some("the choice does not cover all colors".into()))
                    }
                }
            };
            let time_ms = start.elapsed().as_secs_f64() * 1e3;
            let (answer, weight, stats, note) = outcome;
            finish(
                &cli,
                Outcome { command: "verify", answer, weight, cert: None, stats, time_ms, note },
            )
        }
        Command::Bench { files, count, seed } => {
            let mut instances: Vec<(String, EeInstance)> = Vec::new();
            if files.is_empty() {
                for i in 0..*count {
                    // A fixed schedule of shapes, deterministic in the seed.
                    let n = 4 + i % 4;
                    let c = 1 + i % 3;
                    let b = i % 5;
                    let gseed = seed.wrapping_mul(1000).wrapping_add(i as u64);
                    instances.push((format!("gen-{i}"), gen_random_ee(n, c, b, 10, gseed)));
                }
            } else {
                for f in files {
                    instances.push((f.clone(), at(f, formats::parse_ee(&read_input(f)?))?));
                }
            }
            let mut rows = Vec::new();
            for (name, inst) in &instances {
                let start = Instant::now();
                let report = solve_ee(inst);
                let time_ms = start.elapsed().as_secs_f64() * 1e3;
                let weight =
                    report.optimum.as_ref().filter(|&&(w, _)| w <= inst.omega_max).map(|o| o.0);
                rows.push((name.clone(), inst, weight, report.stats, time_ms));
            }
            if cli.json {
                let list: Vec<Value> = rows
                    .iter()
                    .map(|(name, inst, weight, stats, time_ms)| {
                        json!({
                            "name": name,
                            "answer": if weight.is_some() { "yes" } else { "no" },
                            "weight": weight,
                            "stats": ee_stats(inst, Some(stats)),
                            "time_ms": time_ms,
                        })
                    })
                    .collect();
                let v = json!({ "schema": 1, "command": "bench", "instances": list });
                deliver(&cli.out, &format!("{v:#}\n"))?;
            } else {
                let mut text = String::from(
                    "# name n m b c answer weight advices nodes branches max-branch minpath time-ms\n",
                );
                for (name, inst, weight, stats, time_ms) in &rows {
                    let comps = inst.graph.components();
                    text.push_str(&format!(
                        "{name} {} {} {} {} {} {} {} {} {} {} {} {time_ms:.3}\n",
                        inst.n(),
                        inst.graph.arcs().len(),
                        inst.graph.total_positive_balance(),
                        comps.count,
                        if weight.is_some() { "yes" } else { "no" },
                        weight.map_or_else(|| "-".to_string(), |w| w.to_string()),
                        stats.advices,
                        stats.nodes,
                        stats.branches,
                        stats.max_branches_per_node,
                        stats.minpath_calls,
                    ));
                }
                deliver(&cli.out, &text)?;
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
