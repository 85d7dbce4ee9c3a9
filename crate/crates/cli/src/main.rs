//! `ffacute` command-line driver.
//!
//! Exit codes: 0 success, 1 the checked property fails, 2 invalid input,
//! 3 search budget exhausted, 4 an identity check failed.

mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;
use ffacute::charsums::{sum_report, Check, SumOptions};
use ffacute::field::prime_power;
use ffacute::geometry::set_is_acute;
use ffacute::io::PointSetDoc;
use ffacute::search::{
    bound_table, exact_search, greedy_lower, grid_construct, max_acute_exact, qr_run_table,
    ExactCheckpoint, ExactOptions, SearchReport,
};
use ffacute::{FieldInfo, FieldSpec, PointSet};
use serde::Serialize;

use config::{Cli, Command, Construct, FieldArgs, Format, Mode, RunConfig};

const EXIT_PROPERTY: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_IDENTITY: u8 = 4;

#[derive(Serialize)]
struct VerifyReport {
    field: FieldInfo,
    n: usize,
    set_size: usize,
    set_hash: String,
    acute: bool,
    /// Indices into the input point list.
    violation: Option<[usize; 3]>,
}

#[derive(Serialize)]
struct SearchOutput<'a> {
    #[serde(flatten)]
    report: &'a SearchReport,
    checks: Vec<Check>,
}

#[derive(Serialize)]
struct Table<'a, T> {
    rows: &'a [T],
}

struct Emitted {
    bytes: Vec<u8>,
    code: u8,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(cli.log_level)
        .format_timestamp(None)
        .init();
    let threads = cli.threads;
    let out = cli.out.clone();
    match ffacute::exec::with_threads(threads, || run(&cli)) {
        Ok(emitted) => match output::emit(out.as_deref(), &emitted.bytes) {
            Ok(()) => ExitCode::from(emitted.code),
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(EXIT_INPUT)
            }
        },
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<ffacute::Error>() {
        Some(ffacute::Error::BudgetExceeded(_)) => EXIT_BUDGET,
        _ => EXIT_INPUT,
    }
}

fn base_config(cli: &Cli, command: &str) -> RunConfig {
    RunConfig {
        command: command.into(),
        out: cli
            .out
            .as_ref()
            .map(|p| output::resolve(p).display().to_string()),
        format: cli.format,
        threads: ffacute::exec::current_threads(),
        log_level: cli.log_level.to_string().to_lowercase(),
        ..RunConfig::default()
    }
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn read_set(path: &Path) -> Result<PointSet> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(PointSetDoc::from_json(&text)?.to_set()?)
}

fn field_from(args: &FieldArgs) -> Result<FieldSpec> {
    Ok(FieldSpec::new(args.p, args.k, args.modulus.clone())?)
}

/// Reports are JSON only; tables accept both encodings.
fn report_format(cli: &Cli) -> Result<()> {
    if cli.format == Some(Format::Csv) {
        bail!("csv output is only available for the qr-run and table commands");
    }
    Ok(())
}

fn table_bytes<T: Serialize>(cli: &Cli, rows: &[T], config: &RunConfig) -> Result<Vec<u8>> {
    match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => output::csv_rows(rows),
        Format::Json => output::json_with_config(&Table { rows }, config),
    }
}

fn run(cli: &Cli) -> Result<Emitted> {
    match &cli.command {
        Command::Verify { set } => {
            report_format(cli)?;
            let points = read_set(set)?;
            let check = set_is_acute(&points);
            let report = VerifyReport {
                field: points.field().info(),
                n: points.dim(),
                set_size: points.len(),
                set_hash: points.hash_hex(),
                acute: check.acute,
                violation: check.violation,
            };
            if let Some([i, j, k]) = check.violation {
                eprintln!("not acute: points {i}, {j}, {k} violate");
            }
            let config = RunConfig {
                p: Some(points.field().p()),
                k: Some(points.field().k()),
                modulus: points.field().modulus().map(<[u64]>::to_vec),
                n: Some(points.dim()),
                set: Some(path_str(set)),
                set_hash: Some(report.set_hash.clone()),
                ..base_config(cli, "verify")
            };
            Ok(Emitted {
                bytes: output::json_with_config(&report, &config)?,
                code: if check.acute { 0 } else { EXIT_PROPERTY },
            })
        }
        Command::Search {
            field,
            n,
            mode,
            nodes,
            restarts,
            seed,
            no_fix_origin,
            checkpoint,
            resume,
        } => {
            report_format(cli)?;
            let f = field_from(field)?;
            let report = match mode {
                Mode::Exact => {
                    let opts = ExactOptions {
                        node_budget: *nodes,
                        fix_origin: !no_fix_origin,
                        ..ExactOptions::default()
                    };
                    let prior = resume.as_deref().map(read_checkpoint).transpose()?;
                    let (report, state) = exact_search(&f, *n, &opts, prior.as_ref())?;
                    if let Some(path) = checkpoint {
                        let mut bytes = serde_json::to_vec_pretty(&state)?;
                        bytes.push(b'\n');
                        output::emit(Some(path), &bytes)?;
                    }
                    report
                }
                Mode::Greedy => {
                    let seed = seed.context("--seed is required for greedy mode")?;
                    greedy_lower(&f, *n, *restarts, seed)?
                }
            };
            let checks = search_checks(&report)?;
            let config = RunConfig {
                p: Some(f.p()),
                k: Some(f.k()),
                modulus: f.modulus().map(<[u64]>::to_vec),
                n: Some(*n),
                mode: Some((*mode).into()),
                node_budget: report.config.node_budget,
                fix_origin: report.config.fix_origin,
                seed: report.config.seed,
                restarts: report.config.restarts,
                checkpoint: checkpoint.as_deref().map(path_str),
                resume: resume.as_deref().map(path_str),
                ..base_config(cli, "search")
            };
            let code = if checks.iter().any(Check::failed) {
                EXIT_IDENTITY
            } else if !report.exhaustive && *mode == Mode::Exact {
                eprintln!(
                    "node budget exhausted after {} nodes; best size so far {}",
                    report.nodes_explored, report.best_size
                );
                EXIT_BUDGET
            } else {
                0
            };
            let out = SearchOutput {
                report: &report,
                checks,
            };
            Ok(Emitted {
                bytes: output::json_with_config(&out, &config)?,
                code,
            })
        }
        Command::Charsums {
            set,
            p,
            k,
            modulus,
            n,
            random,
            seed,
            alpha,
            quad_cap,
            inject_fault,
        } => {
            report_format(cli)?;
            let points = match (set, p) {
                (Some(path), _) => read_set(path)?,
                (None, Some(p)) => {
                    let f = FieldSpec::new(*p, *k, modulus.clone())?;
                    let (n, size, seed) = (n.unwrap_or(0), random.unwrap_or(0), seed.unwrap_or(0));
                    PointSet::random(f, n, size, seed)?
                }
                (None, None) => bail!("give either --set or --p with --n, --random and --seed"),
            };
            let f = points.field();
            let opts = SumOptions {
                alpha: alpha.map(|a| f.elem(a)).transpose()?,
                quad_cap: *quad_cap as u128,
                inject_fault: *inject_fault,
            };
            let report = sum_report(&points, &opts)?;
            let failed: Vec<&str> = report.failed_checks().map(|c| c.name.as_str()).collect();
            if !failed.is_empty() {
                eprintln!("identity checks failed: {}", failed.join(", "));
            }
            let config = RunConfig {
                p: Some(f.p()),
                k: Some(f.k()),
                modulus: f.modulus().map(<[u64]>::to_vec),
                n: Some(points.dim()),
                set: set.as_deref().map(path_str),
                set_hash: Some(report.set_hash.clone()),
                alpha: Some(report.alpha),
                seed: if set.is_some() { None } else { *seed },
                random: if set.is_some() { None } else { *random },
                quad_cap: Some(*quad_cap),
                inject_fault: *inject_fault,
                ..base_config(cli, "charsums")
            };
            Ok(Emitted {
                bytes: output::json_with_config(&report, &config)?,
                code: if failed.is_empty() { 0 } else { EXIT_IDENTITY },
            })
        }
        Command::Construct {
            kind: Construct::Grid { p, n, m },
        } => {
            report_format(cli)?;
            let report = grid_construct(*p, *n, *m)?;
            if let Some([i, j, k]) = report.violation {
                eprintln!("grid is not acute: points {i}, {j}, {k} violate");
            }
            let config = RunConfig {
                p: Some(*p),
                k: Some(1),
                n: Some(*n),
                m: Some(*m),
                ..base_config(cli, "construct grid")
            };
            Ok(Emitted {
                bytes: output::json_with_config(&report, &config)?,
                code: if report.acute { 0 } else { EXIT_PROPERTY },
            })
        }
        Command::QrRun { p_min, p_max } => {
            let rows = qr_run_table(*p_min, *p_max)?;
            let config = RunConfig {
                p_min: Some(*p_min),
                p_max: Some(*p_max),
                ..base_config(cli, "qr-run")
            };
            Ok(Emitted {
                bytes: table_bytes(cli, &rows, &config)?,
                code: 0,
            })
        }
        Command::Table {
            n,
            fields,
            reports,
            nodes,
        } => {
            let (searches, config) = match (reports, fields) {
                (Some(files), _) => {
                    let parsed = files
                        .iter()
                        .map(|p| read_report(p))
                        .collect::<Result<Vec<_>>>()?;
                    let config = RunConfig {
                        n: *n,
                        reports: Some(files.iter().map(|p| path_str(p)).collect()),
                        ..base_config(cli, "table")
                    };
                    (parsed, config)
                }
                (None, Some(qs)) => {
                    let n = n.context("--n is required with --fields")?;
                    let mut out = Vec::with_capacity(qs.len());
                    for &q in qs {
                        let Some((p, k)) = prime_power(q) else {
                            bail!("{q} is not a prime power");
                        };
                        out.push(max_acute_exact(&FieldSpec::new(p, k, None)?, n, *nodes)?);
                    }
                    let config = RunConfig {
                        n: Some(n),
                        fields: Some(qs.clone()),
                        node_budget: Some(*nodes),
                        ..base_config(cli, "table")
                    };
                    (out, config)
                }
                (None, None) => bail!("give either --fields or --reports"),
            };
            if let Some(want) = n {
                if let Some(r) = searches.iter().find(|r| r.n != *want) {
                    bail!(
                        "report for F_{}^{} does not match --n {want}",
                        r.field.q,
                        r.n
                    );
                }
            }
            let rows = bound_table(&searches);
            let code = if fields.is_some() && searches.iter().any(|r| !r.exhaustive) {
                EXIT_BUDGET
            } else {
                0
            };
            Ok(Emitted {
                bytes: table_bytes(cli, &rows, &config)?,
                code,
            })
        }
    }
}

/// Re-verification of a search witness and the planar size bound.
fn search_checks(report: &SearchReport) -> Result<Vec<Check>> {
    let witness = report.witness_set()?;
    let acute = set_is_acute(&witness).acute;
    let mut checks = vec![Check::at_most(
        "witness_acute",
        if acute && witness.len() == report.best_size {
            0.0
        } else {
            1.0
        },
        0.0,
        0.0,
    )];
    if report.n == 2 {
        let b = report.best_size as f64;
        let q = report.field.q as f64;
        checks.push(Check::at_most(
            "planar_bound",
            b.powi(3),
            8.0 * q.powi(4),
            0.0,
        ));
    }
    Ok(checks)
}

fn read_checkpoint(path: &Path) -> Result<ExactCheckpoint> {
    let path: PathBuf = output::resolve(path);
    let text =
        std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing checkpoint {}", path.display()))
}

fn read_report(path: &Path) -> Result<SearchReport> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing search report {}", path.display()))
}
