//! Command-line front end. Exit codes: 0 all checks pass, 1 a check failed,
//! 2 the input could not be read or parsed.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde_json::json;

use artin_wpd::coxeter::verify_dihedral_lemmas;
use artin_wpd::graph::{check_hypotheses, parse_graph, DefiningGraph};
use artin_wpd::shadow::{build_shadow, extract_hyperplanes, structural_checks, to_dot};
use artin_wpd::walks::{DEFAULT_EXACT_LIMIT, WALK_SOLVERS};
use artin_wpd::{construct, verify_document, ConstructError, ConstructOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "artin-wpd", version, about = "Contracting elements for join-decomposable Artin groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report the hypotheses of the construction for a graph.
    Classify { graph: PathBuf },
    /// Build the certificate for an eligible graph.
    Construct {
        graph: PathBuf,
        /// Write the certificate here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Use lcm of the walk lengths instead of their product.
        #[arg(long)]
        lcm: bool,
        /// Largest factor solved exactly by the `auto` walk solver.
        #[arg(long, default_value_t = DEFAULT_EXACT_LIMIT as u64, value_parser = clap::value_parser!(u64).range(2..))]
        exact_limit: u64,
        #[arg(long, default_value = "auto", value_parser = clap::builder::PossibleValuesParser::new(WALK_SOLVERS))]
        walk_solver: String,
    },
    /// Re-check a certificate file against its graph.
    Verify {
        graph: PathBuf,
        certificate: PathBuf,
        /// Print the full report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Build a ball of the W-shadow and run the structural checks.
    Shadow {
        graph: PathBuf,
        #[arg(short, long, default_value_t = 2)]
        radius: usize,
        /// Write the 1-skeleton with hyperplane classes as DOT.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Dihedral base-case table for m = 3..=m_max.
    DihedralSweep { m_max: u32 },
}

struct InputError(anyhow::Error);

fn read_graph(path: &Path) -> Result<DefiningGraph, InputError> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(InputError)?;
    parse_graph(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(InputError)
}

fn write_json(out: &mut dyn Write, value: &serde_json::Value) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(value)?)?;
    Ok(())
}

/// Runs the command line `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(InputError(e)) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_INPUT
        }
    }
}

fn io(e: impl Into<anyhow::Error>) -> InputError {
    InputError(e.into())
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, InputError> {
    match command {
        Command::Classify { graph } => {
            let g = read_graph(&graph)?;
            write_json(out, &serde_json::to_value(check_hypotheses(&g)).map_err(io)?).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Construct {
            graph,
            output,
            lcm,
            exact_limit,
            walk_solver,
        } => {
            let g = read_graph(&graph)?;
            let opts = ConstructOptions {
                walk_solver,
                length_policy: if lcm { "lcm" } else { "product" }.into(),
                exact_limit: exact_limit as usize,
            };
            let c = match construct(&g, &opts) {
                Ok(c) => c,
                Err(ConstructError::Deferred(report)) => {
                    write_json(out, &json!({ "status": "deferred", "hypotheses": *report })).map_err(io)?;
                    return Ok(EXIT_OK);
                }
                Err(ConstructError::Ineligible(report)) => {
                    write_json(out, &json!({ "status": "ineligible", "hypotheses": *report })).map_err(io)?;
                    return Ok(EXIT_CHECK_FAILED);
                }
                Err(e) => {
                    writeln!(err, "construction failed: {e}").map_err(io)?;
                    return Ok(EXIT_CHECK_FAILED);
                }
            };
            let report = c.verify();
            let text = c.to_json();
            match output {
                Some(path) => {
                    fs::write(&path, &text).with_context(|| format!("writing {}", path.display())).map_err(InputError)?;
                    writeln!(
                        out,
                        "k = {}, n = {}, r = {}, |gamma| = {}, hyperplanes = {}, key4 = {}, coverage = {}/{}",
                        c.k(),
                        c.schedule.n,
                        c.gamma.r(),
                        c.gamma.len(),
                        c.hyperplanes.total_count(),
                        c.separation.entries.len(),
                        report.covered,
                        report.generators
                    )
                    .map_err(io)?;
                }
                None => out.write_all(text.as_bytes()).map_err(io)?,
            }
            if report.passed() {
                Ok(EXIT_OK)
            } else {
                for f in &report.failures {
                    writeln!(err, "{f}").map_err(io)?;
                }
                Ok(EXIT_CHECK_FAILED)
            }
        }
        Command::Verify { graph, certificate, json } => {
            let g = read_graph(&graph)?;
            let text = fs::read_to_string(&certificate)
                .with_context(|| format!("reading {}", certificate.display()))
                .map_err(InputError)?;
            let value: serde_json::Value = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", certificate.display()))
                .map_err(InputError)?;
            let report = verify_document(&g, &value);
            if json {
                write_json(out, &serde_json::to_value(&report).map_err(io)?).map_err(io)?;
            } else {
                if let Some(cert) = &report.certificate {
                    for step in &cert.steps {
                        let mark = if step.passed { "ok" } else { "FAIL" };
                        write!(out, "step {:>3} d={:<4} {:<7} {mark:<4} {}", step.index, step.d, step.tag.to_string(), step.detail)
                            .map_err(io)?;
                        match &step.oracle {
                            Some(o) => writeln!(out, " [{o}]").map_err(io)?,
                            None => writeln!(out).map_err(io)?,
                        }
                    }
                    let c = &cert.closing;
                    writeln!(out, "closing  d={:<4} {:<7} {:<4} {}", c.d, c.tag.to_string(), if c.passed { "ok" } else { "FAIL" }, c.detail)
                        .map_err(io)?;
                    writeln!(out, "coverage {}/{}, hyperplanes {}", cert.covered, cert.generators, cert.total_count).map_err(io)?;
                }
                for f in &report.failures {
                    writeln!(out, "failure: {f}").map_err(io)?;
                }
                writeln!(out, "{}", if report.passed() { "certificate verified" } else { "certificate rejected" }).map_err(io)?;
            }
            Ok(if report.passed() { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
        Command::Shadow { graph, radius, dot } => {
            let g = read_graph(&graph)?;
            let sc = build_shadow(&g, radius).map_err(io)?;
            let hyperplanes = extract_hyperplanes(&sc);
            let report = structural_checks(&sc, &g);
            if let Some(path) = dot {
                fs::write(&path, to_dot(&sc, &hyperplanes))
                    .with_context(|| format!("writing {}", path.display()))
                    .map_err(InputError)?;
            }
            write_json(
                out,
                &json!({
                    "stats": sc.stats(hyperplanes.len()),
                    "structure": report,
                    "passed": report.passed(),
                    "note": "W-shadow verified; no statement about the Artin group is checked",
                }),
            )
            .map_err(io)?;
            Ok(if report.passed() { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
        Command::DihedralSweep { m_max } => {
            if m_max < 3 {
                return Err(InputError(anyhow::anyhow!("m_max must be at least 3, got {m_max}")));
            }
            let mut all = true;
            writeln!(out, "{:>5} {:>6} {:>6} {:>6}", "m", "order", "cases", "pass").map_err(io)?;
            for m in 3..=m_max {
                let r = verify_dihedral_lemmas(m).map_err(io)?;
                let passed = r.all_passed();
                all &= passed;
                writeln!(out, "{:>5} {:>6} {:>6} {:>6}", m, r.group_order, r.cases.len(), if passed { "yes" } else { "no" })
                    .map_err(io)?;
            }
            Ok(if all { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
    }
}
