//! `kissbound`: reproducible experiments for the kissing-number bounds.
//!
//! Exit codes: 0 success or certified, 1 certification failed, 2 usage,
//! 3 I/O or malformed input, 4 numeric-domain error.

mod meta;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use kissbound::caps::RhoGeometry;
use kissbound::certifier::{
    audit_corner_rules, CertifyOptions, CertifyParams, CertifyStatus, CornerRule, CERTIFICATE_KEYS,
};
use kissbound::config;
use kissbound::density::{
    max_density, sweep_csv_row, sweep_minimum, sweep_rho_pruned, SearchConfig, SweepEntry, SWEEP_CSV_HEADER,
};
use kissbound::highdim::{a_of_d, k_bound_highdim, round_up, MAX_DIMENSION, MIN_DIMENSION};
use kissbound::packing::{contact_graph, coverage_audit_with, fcc_fragment, load_packing_with};
use kissbound::report::format_sig;
use kissbound::Error;

use meta::RunMetadata;

const EXIT_FAILED: u8 = 1;
const EXIT_IO: u8 = 3;
const EXIT_DOMAIN: u8 = 4;

/// Samples drawn by the corner-rule audit before a certification run.
const AUDIT_SAMPLES: usize = 100_000;

#[derive(Parser)]
#[command(name = "kissbound", version, about = "Upper bounds on kissing numbers via inflated spherical caps")]
struct Cli {
    /// Worker threads (defaults to KISSBOUND_THREADS, then the core count).
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RuleChoice {
    /// Audit the monotone corner rule and fall back to two corners if it fails.
    Auto,
    Monotone,
    TwoCorner,
}

#[derive(Subcommand)]
enum Command {
    /// Area bound a(d), or 2 / f_d(rho) when --rho is given.
    Highdim {
        #[arg(long = "d", value_parser = clap::value_parser!(u32).range(MIN_DIMENSION as i64..=MAX_DIMENSION as i64))]
        d: u32,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Sweep the inflation ratio and report the best three-dimensional bound.
    Optimize {
        #[arg(long)]
        rho_lo: f64,
        #[arg(long)]
        rho_hi: f64,
        #[arg(long)]
        step: f64,
        /// Spacing of the multistart grid, in radians.
        #[arg(long, default_value_t = config::START_STEP)]
        start_step: f64,
        #[arg(long, default_value_t = config::LOCAL_TOLERANCE)]
        tolerance: f64,
        #[arg(long, default_value_t = config::LOCAL_MAX_ITERATIONS)]
        max_iterations: usize,
        /// Skip ratios whose cheap lower bound reaches this value.
        #[arg(long)]
        prune: Option<f64>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Certify the density bound over a grid of boxes.
    Certify {
        #[arg(long, default_value_t = config::RHO)]
        rho: f64,
        #[arg(long, default_value_t = config::DELTA)]
        delta: f64,
        #[arg(long, default_value_t = config::TARGET)]
        target: f64,
        #[arg(long, default_value_t = config::FP_SLACK)]
        fp_slack: f64,
        #[arg(long, value_enum, default_value = "auto")]
        rule: RuleChoice,
        /// Resume from, and periodically save to, this file.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long, default_value_t = config::CHECKPOINT_EVERY)]
        checkpoint_every: u64,
        /// Certificate path.
        #[arg(long, default_value = "certificate.txt")]
        output: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        quiet: bool,
        /// Stop after this many boxes, leaving the checkpoint for a later run.
        #[arg(long, hide = true, requires = "checkpoint")]
        halt_after: Option<u64>,
    },
    /// Contact graph of a packing, optionally with the coverage audit.
    Graph {
        input: PathBuf,
        #[arg(long)]
        rho: Option<f64>,
        /// Relative tangency tolerance.
        #[arg(long, default_value_t = config::TANGENCY_TOLERANCE)]
        tolerance: f64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Write a face-centered cubic fragment as a packing document.
    Fcc {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=50))]
        shells: u32,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

enum Failure {
    Core(Error),
    Io(PathBuf, std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Io(..) => EXIT_IO,
            Failure::Core(Error::Io(_) | Error::Parse(_) | Error::Checkpoint { .. }) => EXIT_IO,
            Failure::Core(Error::Domain(_) | Error::Degenerate(_) | Error::Overlap { .. }) => EXIT_DOMAIN,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Io(p, e) => write!(f, "{}: {e}", p.display()),
        }
    }
}

type Outcome = Result<u8, Failure>;

/// Sends `text` to `output` (with a metadata sidecar) or to stdout.
fn deliver(text: &str, output: Option<&Path>, meta: &mut RunMetadata) -> Result<(), Failure> {
    match output {
        Some(path) => {
            meta.write_output(path, text.as_bytes())
                .map_err(|e| Failure::Io(path.to_path_buf(), e))?;
            meta.finish().map_err(|e| Failure::Io(path.to_path_buf(), e))?;
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .map_err(|e| Failure::Io(PathBuf::from("<stdout>"), e))?;
        }
    }
    Ok(())
}

fn highdim(d: u32, rho: Option<f64>, format: Format, output: Option<&Path>) -> Outcome {
    let mut meta = RunMetadata::start();
    meta.set("d", d);
    let rho_used = rho.unwrap_or(3f64.sqrt());
    meta.set("rho", rho_used);
    let result = k_bound_highdim(d, rho_used)?;
    // without --rho the bound is a(d), computed directly from the profile
    let bound = match rho {
        Some(_) => result.bound,
        None => a_of_d(d)?,
    };
    let shown = round_up(bound, 3);
    let mut text = String::new();
    match format {
        Format::Csv => {
            let _ = writeln!(text, "d,rho,f_d,bound,bound_rounded_up");
            let _ = writeln!(
                text,
                "{d},{},{},{},{shown:.3}",
                format_sig(rho_used, 12),
                format_sig(result.f_d, 12),
                format_sig(bound, 12)
            );
        }
        Format::Text => {
            let name = if rho.is_some() { "2/f_d(rho)" } else { "a(d)" };
            let _ = writeln!(text, "d = {d}, rho = {}", format_sig(rho_used, 12));
            let _ = writeln!(text, "f_d = {}", format_sig(result.f_d, 12));
            let _ = writeln!(text, "{name} = {}", format_sig(bound, 15));
            let _ = writeln!(text, "{name} < {shown:.3}");
        }
    }
    deliver(&text, output, &mut meta)?;
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn optimize(
    lo: f64,
    hi: f64,
    step: f64,
    cfg: SearchConfig,
    prune: Option<f64>,
    format: Format,
    output: Option<&Path>,
) -> Outcome {
    let mut meta = RunMetadata::start();
    meta.set("rho_lo", lo);
    meta.set("rho_hi", hi);
    meta.set("step", step);
    meta.set("start_step", cfg.start_step);
    meta.set("tolerance", cfg.tolerance);
    meta.set("max_iterations", cfg.max_iterations);
    meta.set("prune", prune);

    let rows = sweep_rho_pruned(lo, hi, step, &cfg, prune.unwrap_or(f64::INFINITY))?;
    let evaluated: Vec<_> = rows.iter().filter_map(SweepEntry::evaluated).collect();
    let best = sweep_minimum(evaluated.iter().copied());

    let mut text = String::new();
    match format {
        Format::Csv => {
            let header = if prune.is_some() {
                format!("{SWEEP_CSV_HEADER},pruned")
            } else {
                SWEEP_CSV_HEADER.to_string()
            };
            let _ = writeln!(text, "{header}");
            for row in &rows {
                let line = match row {
                    SweepEntry::Evaluated(r) => sweep_csv_row(r),
                    SweepEntry::Pruned {
                        rho,
                        alpha_zero_objective,
                    } => format!(
                        "{},,,,,{}",
                        format_sig(*rho, 12),
                        format_sig(*alpha_zero_objective, 12)
                    ),
                };
                let flag = match (prune, row) {
                    (None, _) => "",
                    (Some(_), SweepEntry::Pruned { .. }) => ",true",
                    (Some(_), SweepEntry::Evaluated(_)) => ",false",
                };
                let _ = writeln!(text, "{line}{flag}");
            }
        }
        Format::Text => {
            for row in &rows {
                match row {
                    SweepEntry::Evaluated(r) => {
                        let _ = writeln!(
                            text,
                            "rho {}  max density {}  at ({}, {}, {})  objective {}",
                            format_sig(r.rho, 6),
                            format_sig(r.max_density, 10),
                            format_sig(r.argmax[0], 8),
                            format_sig(r.argmax[1], 8),
                            format_sig(r.argmax[2], 8),
                            format_sig(r.objective, 10)
                        );
                    }
                    SweepEntry::Pruned {
                        rho,
                        alpha_zero_objective,
                    } => {
                        let _ = writeln!(
                            text,
                            "rho {}  pruned (objective >= {})",
                            format_sig(*rho, 6),
                            format_sig(*alpha_zero_objective, 10)
                        );
                    }
                }
            }
        }
    }
    let summary = match best {
        Some(b) => format!(
            "minimum objective {} at rho {}",
            format_sig(b.objective, 10),
            format_sig(b.rho, 6)
        ),
        None => "every ratio was pruned".to_string(),
    };
    // CSV stays machine-readable: the summary goes to stderr there
    match format {
        Format::Text => {
            let _ = writeln!(text, "{summary}");
        }
        Format::Csv => eprintln!("{summary}"),
    }
    if let Some(b) = best {
        meta.set("min_objective", b.objective);
        meta.set("argmin_rho", b.rho);
    }
    deliver(&text, output, &mut meta)?;
    Ok(0)
}

struct CertifyArgs {
    params: CertifyParams,
    rule: RuleChoice,
    checkpoint: Option<PathBuf>,
    checkpoint_every: u64,
    output: PathBuf,
    format: Format,
    quiet: bool,
    halt_after: Option<u64>,
}

fn certify(args: CertifyArgs) -> Outcome {
    let mut meta = RunMetadata::start();
    let p = args.params;
    p.validate()?;
    let geom = RhoGeometry::new(p.rho)?;
    meta.set("rho", p.rho);
    meta.set("delta", p.delta);
    meta.set("target", p.target);
    meta.set("fp_slack", p.fp_slack);

    let rule = match args.rule {
        RuleChoice::Monotone => CornerRule::Monotone,
        RuleChoice::TwoCorner => CornerRule::TwoCorner,
        RuleChoice::Auto => {
            let audit = audit_corner_rules(&geom, AUDIT_SAMPLES, 1);
            meta.set("audit_samples", audit.samples);
            meta.set("audit_skipped", audit.skipped);
            meta.set("audit_holds", audit.holds());
            if audit.holds() {
                CornerRule::Monotone
            } else {
                if !args.quiet {
                    eprintln!("corner-rule audit failed ({audit:?}); using two-corner bounds");
                }
                CornerRule::TwoCorner
            }
        }
    };
    meta.set("corner_rule", rule.name());

    let options = CertifyOptions {
        rule,
        checkpoint: args.checkpoint.clone(),
        checkpoint_every: args.checkpoint_every,
        halt_after: args.halt_after,
    };
    let quiet = args.quiet;
    let status = kissbound::certifier::certify_with(&p, &options, |done, total| {
        if !quiet {
            eprintln!("boxes {done}/{total}");
        }
    })?;

    let report = match status {
        CertifyStatus::Finished(r) => r,
        CertifyStatus::Suspended { boxes_done, total } => {
            eprintln!(
                "suspended after {boxes_done} of {total} boxes; rerun with the same --checkpoint to resume"
            );
            return Ok(EXIT_FAILED);
        }
    };
    let cert = report.certificate;
    let body = cert.emit();
    meta.set("boxes_checked", cert.boxes_checked);
    meta.set("worst_box", report.worst_box.to_vec());
    meta.set("worst_box_lower", report.worst_cell.lower.to_vec());
    meta.set("unbounded_boxes", report.unbounded_boxes);
    meta.write_output(&args.output, body.as_bytes())
        .map_err(|e| Failure::Io(args.output.clone(), e))?;
    meta.finish().map_err(|e| Failure::Io(args.output.clone(), e))?;

    let mut text = String::new();
    match args.format {
        Format::Csv => {
            let _ = writeln!(text, "{}", CERTIFICATE_KEYS.join(","));
            let _ = writeln!(
                text,
                "{:.16e},{:.16e},{:.16e},{},{:.16e},{:.16e},{:.16e},{}",
                cert.rho,
                cert.delta,
                cert.target,
                cert.boxes_checked,
                cert.max_box_bound,
                cert.certified_bound,
                cert.fp_slack,
                cert.passed
            );
        }
        Format::Text => {
            let _ = writeln!(text, "{}", cert.summary_line());
            let _ = writeln!(
                text,
                "max box bound {} at box {:?}; certified bound {} vs target {}",
                format_sig(cert.max_box_bound, 12),
                report.worst_box,
                format_sig(cert.certified_bound, 12),
                cert.target
            );
            let _ = writeln!(text, "certificate written to {}", args.output.display());
        }
    }
    print!("{text}");
    Ok(if cert.passed { 0 } else { EXIT_FAILED })
}

fn graph(input: &Path, rho: Option<f64>, tolerance: f64, format: Format, output: Option<&Path>) -> Outcome {
    let mut meta = RunMetadata::start();
    let document = std::fs::read_to_string(input).map_err(|e| Failure::Io(input.to_path_buf(), e))?;
    let packing = load_packing_with(&document, tolerance).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", input.display())),
        other => other,
    })?;
    let g = contact_graph(&packing);
    let within = g.average_degree <= config::TARGET;
    meta.set("input", input.display().to_string());
    meta.set("input_sha256", meta::checksum(document.as_bytes()));
    meta.set("tolerance", tolerance);

    let audit = match rho {
        Some(rho) => {
            let ceiling = max_density(&RhoGeometry::new(rho)?, &SearchConfig::default())?.max_density;
            meta.set("rho", rho);
            Some(coverage_audit_with(&packing, rho, ceiling)?)
        }
        None => None,
    };

    let mut text = String::new();
    match (format, &audit) {
        (Format::Csv, Some(report)) => {
            let mut buf = Vec::new();
            report
                .write_csv(&mut buf)
                .map_err(|e| Failure::Io(PathBuf::from("<buffer>"), e))?;
            text = String::from_utf8(buf).expect("csv is utf-8");
        }
        (Format::Csv, None) => {
            let _ = writeln!(text, "vertex_count,edge_count,average_degree,tolerance");
            let _ = writeln!(
                text,
                "{},{},{},{:e}",
                g.vertex_count,
                g.edges.len(),
                format_sig(g.average_degree, 12),
                tolerance
            );
        }
        (Format::Text, _) => {
            let _ = writeln!(text, "balls: {}", g.vertex_count);
            let _ = writeln!(text, "edges: {}", g.edges.len());
            let _ = writeln!(text, "average degree: {}", format_sig(g.average_degree, 12));
            let _ = writeln!(text, "tangency tolerance: {tolerance:e}");
            let _ = writeln!(
                text,
                "average degree <= {}: {}",
                config::TARGET,
                if within { "yes" } else { "NO" }
            );
            if let Some(r) = &audit {
                let worst = r.per_ball.iter().map(|b| b.coverage_sum).fold(0.0, f64::max);
                let _ = writeln!(text, "rho: {}", r.rho);
                let _ = writeln!(
                    text,
                    "edge sum {} >= {} * {} edges: {}",
                    format_sig(r.edge_sum, 12),
                    format_sig(r.pair_minimum, 12),
                    r.edge_count,
                    if r.edge_sum_holds() { "yes" } else { "NO" }
                );
                let _ = writeln!(
                    text,
                    "largest per-ball coverage {} <= max density {} + 1e-6: {}",
                    format_sig(worst, 12),
                    format_sig(r.density_ceiling, 12),
                    if r.ceiling_violations.is_empty() { "yes" } else { "NO" }
                );
                let _ = writeln!(
                    text,
                    "pair identity violations: {}",
                    r.pair_identity_violations.len()
                );
            }
        }
    }
    deliver(&text, output, &mut meta)?;
    let holds = within && audit.as_ref().map_or(true, |r| r.holds());
    Ok(if holds { 0 } else { EXIT_FAILED })
}

fn fcc(shells: u32, output: Option<&Path>) -> Outcome {
    let mut meta = RunMetadata::start();
    meta.set("shells", shells);
    let p = fcc_fragment(shells)?;
    deliver(&(p.to_json() + "\n"), output, &mut meta)?;
    Ok(0)
}

fn workers(flag: Option<usize>) -> Result<Option<usize>, String> {
    if let Some(n) = flag {
        return Ok(Some(n));
    }
    match std::env::var(config::THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| format!("{} must be a positive integer, got `{v}`", config::THREADS_ENV)),
        Err(_) => Ok(None),
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Highdim {
            d,
            rho,
            format,
            output,
        } => highdim(d, rho, format, output.as_deref()),
        Command::Optimize {
            rho_lo,
            rho_hi,
            step,
            start_step,
            tolerance,
            max_iterations,
            prune,
            format,
            output,
        } => optimize(
            rho_lo,
            rho_hi,
            step,
            SearchConfig {
                start_step,
                tolerance,
                max_iterations,
            },
            prune,
            format,
            output.as_deref(),
        ),
        Command::Certify {
            rho,
            delta,
            target,
            fp_slack,
            rule,
            checkpoint,
            checkpoint_every,
            output,
            format,
            quiet,
            halt_after,
        } => certify(CertifyArgs {
            params: CertifyParams {
                rho,
                delta,
                target,
                fp_slack,
            },
            rule,
            checkpoint,
            checkpoint_every,
            output,
            format,
            quiet,
            halt_after,
        }),
        Command::Graph {
            input,
            rho,
            tolerance,
            format,
            output,
        } => graph(&input, rho, tolerance, format, output.as_deref()),
        Command::Fcc { shells, output } => fcc(shells, output.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match workers(cli.workers) {
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Ok(Some(0)) => {
            eprintln!("error: worker count must be a positive integer");
            return ExitCode::from(2);
        }
        Ok(Some(n)) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        }
        Ok(None) => {}
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}
