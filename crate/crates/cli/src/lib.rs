//! Command-line front end for `branch-lab-core`.
//!
//! Every subcommand produces a [`report::Report`] (JSON, schema
//! `branch-lab/1`) and optionally a CSV table of the pairings behind it.
//! Exit codes: 0 for a definite verdict or a passing demo, 2 for an
//! inconclusive verdict or a demo that did not pass, 1 for errors.

pub mod commands;
pub mod config;
pub mod literal;
pub mod report;

use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use config::{Overrides, PanelSpec, RunConfig};
use report::{Report, Timing};

#[derive(Debug, Parser)]
#[command(name = "branch-lab", version, about = "Weak limits, ideals and quotient algebras of smooth sequences")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// JSON file with configuration defaults; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Also write the pairing table as CSV.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// Domain "lower,upper"; bounds may be constant expressions like 2*pi.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub domain: Option<String>,
    /// JSON panel file: {"count": n, "normalized": bool} or a list of
    /// {"center", "width", "normalized"} bumps.
    #[arg(long, global = true)]
    pub panel: Option<PathBuf>,
    /// Largest schedule index; for certificate searches, the largest index
    /// tried per cell.
    #[arg(long, global = true)]
    pub nu_max: Option<u32>,
    /// Weak-limit tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Certificate cell width.
    #[arg(long, global = true)]
    pub cell: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Weak limit of a sequence against every panel member.
    Limit(SeqArgs),
    /// Evidence classification of a sequence (null, convergent, divergent).
    Classify(SeqArgs),
    /// Ideals of the sequence algebra.
    #[command(subcommand)]
    Ideal(IdealCommand),
    /// Finite spans of sequences.
    #[command(subcommand)]
    Span(SpanCommand),
    /// Elements of a quotient algebra.
    #[command(subcommand)]
    Gf(GfCommand),
    /// Worked counterexamples.
    #[command(subcommand)]
    Demo(DemoCommand),
}

#[derive(Debug, Args)]
pub struct SeqArgs {
    /// Sequence literal or expression in x and nu.
    #[arg(long = "seq")]
    pub seq: String,
}

#[derive(Debug, Subcommand)]
pub enum IdealCommand {
    /// Off-diagonality, unit search and derivation closure of an ideal.
    Check(IdealCheckArgs),
}

#[derive(Debug, Args)]
pub struct IdealCheckArgs {
    /// Comma-separated generators (literals or files holding one).
    #[arg(long, required_unless_present = "eventually_zero")]
    pub generators: Vec<String>,
    /// Use the ideal of eventually-zero sequences instead.
    #[arg(long, conflicts_with = "generators")]
    pub eventually_zero: bool,
    /// Also decide membership of this sequence.
    #[arg(long)]
    pub member: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum SpanCommand {
    /// Certificate that two finite spans meet only in zero.
    Independence(SpanArgs),
}

#[derive(Debug, Args)]
pub struct SpanArgs {
    #[arg(long, required = true)]
    pub first: Vec<String>,
    #[arg(long, required = true)]
    pub second: Vec<String>,
    /// Indices sampled (1..=N).
    #[arg(long, default_value_t = 8)]
    pub grid_nu: u32,
    /// x samples per index.
    #[arg(long, default_value_t = 32)]
    pub grid_x: usize,
}

#[derive(Debug, Args)]
pub struct AlgebraArgs {
    /// "eventually-zero" or comma-separated generators of the ideal.
    #[arg(long, default_value = "eventually-zero")]
    pub algebra: String,
}

#[derive(Debug, Subcommand)]
pub enum GfCommand {
    /// Product of two elements.
    Mul(GfBinaryArgs),
    /// Whether two representatives define the same element.
    Equal(GfBinaryArgs),
    /// Derivative; needs an ideal closed under differentiation.
    Derive(GfDeriveArgs),
}

#[derive(Debug, Args)]
pub struct GfBinaryArgs {
    #[command(flatten)]
    pub algebra: AlgebraArgs,
    /// Sequence literal, or one of delta, heaviside, delta:K.
    #[arg(long)]
    pub lhs: String,
    #[arg(long)]
    pub rhs: String,
}

#[derive(Debug, Args)]
pub struct GfDeriveArgs {
    #[command(flatten)]
    pub algebra: AlgebraArgs,
    #[arg(long)]
    pub lhs: String,
    #[arg(long, default_value_t = 1)]
    pub order: u32,
}

#[derive(Debug, Subcommand)]
pub enum DemoCommand {
    /// A weakly null sequence whose square is not weakly null.
    Nosquare {
        #[arg(long = "seq", default_value = "cos(nu*x)")]
        seq: String,
    },
    /// Two off-diagonal ideals whose sum contains a unit.
    NoLargestIdeal {
        #[arg(long, default_value = "1+sin(nu*x)")]
        first: String,
        #[arg(long, default_value = "1+cos(nu*x)")]
        second: String,
    },
    /// Representative dependence of a nonlinear operation.
    Branching {
        /// File with one representative per line.
        #[arg(long)]
        reps: Option<PathBuf>,
        /// Representative literal; repeatable. Default: cos(nu*x) and 0.
        #[arg(long = "rep")]
        rep: Vec<String>,
        /// Operation in the variable u.
        #[arg(long, default_value = "u^2")]
        op: String,
    },
    /// Pairings of the squared delta representative.
    DeltaSquare,
}

/// Exit code and the report, when one was produced.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub report: Option<Report>,
}

fn overrides(g: &GlobalArgs, command: &Command) -> Result<Overrides> {
    let panel = match &g.panel {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            Some(serde_json::from_str::<PanelSpec>(&text)?)
        }
        None => None,
    };
    let certificate_side = matches!(command, Command::Ideal(_) | Command::Demo(DemoCommand::NoLargestIdeal { .. }));
    Ok(Overrides {
        domain: g.domain.as_deref().map(literal::parse_domain).transpose()?,
        panel,
        nu_max: g.nu_max.filter(|_| !certificate_side),
        tol: g.tol,
        cell_width: g.cell,
        certificate_nu_max: g.nu_max.filter(|_| certificate_side),
    })
}

fn execute(cli: &Cli, argv: &[String]) -> Result<(i32, Report)> {
    let started = Instant::now();
    let base = match &cli.global.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let config = base.merge(overrides(&cli.global, &cli.command)?);
    config.validate()?;
    let mut report = Report::new(argv.to_vec(), config);
    let definite = commands::dispatch(&cli.command, &mut report)?;
    let timestamp_unix_ms = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis());
    report.timing = Some(Timing { timestamp_unix_ms, elapsed_ms: started.elapsed().as_millis() });
    if let Some(path) = &cli.global.csv {
        std::fs::write(path, report::emit_csv(&report)?)?;
    }
    let json = report.to_json()?;
    match &cli.global.out {
        Some(path) => std::fs::write(path, json + "\n")?,
        None => println!("{json}"),
    }
    Ok((if definite { 0 } else { 2 }, report))
}

/// Runs one invocation. `argv` excludes the program name.
pub fn run<I, S>(argv: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(std::iter::once("branch-lab".to_string()).chain(argv.iter().cloned())) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return Outcome { code, report: None };
        }
    };
    match execute(&cli, &argv) {
        Ok((code, report)) => Outcome { code, report: Some(report) },
        Err(e) => {
            eprintln!("error: {e:#}");
            Outcome { code: 1, report: None }
        }
    }
}
