//! Command-line front end.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use argnn_core::dynamics::{Gate, PermutationMode};
use argnn_core::experiment::{
    run_capacity, run_eigen_trace, ExperimentConfig, RunSpec, DEFAULT_INPUTS, DEFAULT_PASSES, DEFAULT_RUNS,
    DEFAULT_TIMING_INTERVAL, DEFAULT_TIMING_RUNS,
};
use argnn_core::{AssociationRule, PruneMode};

use crate::{formats, harness};

#[derive(Debug, Parser)]
#[command(name = "argnn", version, about = "Spectral edge pruning for asynchronous recurrent graph neural networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a single network and write its log, prune events and final graph.
    Train(SingleArgs),
    /// Final error and pruned edges over a sweep of gates, modes and hidden counts.
    Capacity(CapacityArgs),
    /// Error and pruned percentage sampled during training.
    Timing(TimingArgs),
    /// Per-step eigenvalue components of every behavior for a single run.
    Trace(SingleArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GateArg {
    And,
    Or,
    Xor,
}

impl From<GateArg> for Gate {
    fn from(g: GateArg) -> Self {
        match g {
            GateArg::And => Gate::And,
            GateArg::Or => Gate::Or,
            GateArg::Xor => Gate::Xor,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Directed,
    Weighted,
    None,
}

impl From<ModeArg> for PruneMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Directed => PruneMode::Directed,
            ModeArg::Weighted => PruneMode::Weighted,
            ModeArg::None => PruneMode::None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum AssocArg {
    Eigvec,
    #[default]
    Index,
}

impl From<AssocArg> for AssociationRule {
    fn from(a: AssocArg) -> Self {
        match a {
            AssocArg::Eigvec => AssociationRule::Eigenvector,
            AssocArg::Index => AssociationRule::Index,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum PermArg {
    #[default]
    PerInput,
    PerPass,
}

impl From<PermArg> for PermutationMode {
    fn from(p: PermArg) -> Self {
        match p {
            PermArg::PerInput => PermutationMode::PerInput,
            PermArg::PerPass => PermutationMode::PerPass,
        }
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Input configurations presented during training.
    #[arg(long, default_value_t = DEFAULT_INPUTS)]
    pub inputs: usize,
    /// Behavior sweeps per input configuration.
    #[arg(long, default_value_t = DEFAULT_PASSES as u64, value_parser = clap::value_parser!(u64).range(1..))]
    pub passes: u64,
    /// Base seed; run `i` uses `seed + i`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Eigenvalue-to-node association rule.
    #[arg(long, value_enum, default_value_t = AssocArg::Index)]
    pub assoc: AssocArg,
    /// Execution-order permutation schedule.
    #[arg(long, value_enum, default_value_t = PermArg::PerInput)]
    pub perm: PermArg,
    /// Output directory (created if missing).
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Worker threads for independent runs.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: u64,
}

#[derive(Debug, Args)]
pub struct SingleArgs {
    #[arg(long, value_enum, default_value_t = GateArg::Xor)]
    pub gate: GateArg,
    #[arg(long, default_value_t = 2)]
    pub hidden: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Directed)]
    pub mode: ModeArg,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct CapacityArgs {
    /// Gate to run; all three when omitted.
    #[arg(long, value_enum)]
    pub gate: Option<GateArg>,
    /// Single hidden-node count.
    #[arg(long, conflicts_with = "hidden_range")]
    pub hidden: Option<usize>,
    /// Inclusive hidden-node range `a..b`.
    #[arg(long, value_parser = parse_range, default_value = "1..6")]
    pub hidden_range: (usize, usize),
    /// Degree mode; directed, weighted and none when omitted.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, default_value_t = DEFAULT_RUNS as u64, value_parser = clap::value_parser!(u64).range(1..))]
    pub runs: u64,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct TimingArgs {
    #[arg(long, value_enum, default_value_t = GateArg::Xor)]
    pub gate: GateArg,
    #[arg(long, default_value_t = 2)]
    pub hidden: usize,
    /// Degree mode; directed and weighted when omitted.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, default_value_t = DEFAULT_TIMING_RUNS as u64, value_parser = clap::value_parser!(u64).range(1..))]
    pub runs: u64,
    /// Sample every this many input configurations.
    #[arg(long, default_value_t = DEFAULT_TIMING_INTERVAL as u64, value_parser = clap::value_parser!(u64).range(1..))]
    pub interval: u64,
    #[command(flatten)]
    pub common: CommonArgs,
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected a range like 1..6, got `{s}`"))?;
    let a: usize = a.trim().parse().map_err(|e| format!("bad range start `{a}`: {e}"))?;
    let b: usize = b.trim().parse().map_err(|e| format!("bad range end `{b}`: {e}"))?;
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok((a, b))
}

struct Output {
    dir: PathBuf,
}

impl Output {
    fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
        Ok(Self { dir: dir.to_path_buf() })
    }

    fn write(&self, name: &str, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
        let path = self.dir.join(name);
        let file = File::create(&path).with_context(|| format!("cannot write {}", path.display()))?;
        let mut out = BufWriter::new(file);
        f(&mut out).and_then(|_| out.flush()).with_context(|| format!("cannot write {}", path.display()))
    }

    fn params(&self, rows: &[(&str, String)]) -> Result<()> {
        self.write("params.csv", |out| {
            writeln!(out, "key,value")?;
            for (k, v) in rows {
                writeln!(out, "{k},{v}")?;
            }
            Ok(())
        })
    }
}

fn common_params(c: &CommonArgs) -> Vec<(&'static str, String)> {
    vec![
        ("inputs", c.inputs.to_string()),
        ("passes", c.passes.to_string()),
        ("seed", c.seed.to_string()),
        ("assoc", assoc_name(c.assoc).into()),
        ("perm", perm_name(c.perm).into()),
    ]
}

fn assoc_name(a: AssocArg) -> &'static str {
    match a {
        AssocArg::Eigvec => "eigvec",
        AssocArg::Index => "index",
    }
}

fn perm_name(p: PermArg) -> &'static str {
    match p {
        PermArg::PerInput => "per-input",
        PermArg::PerPass => "per-pass",
    }
}

fn join<T>(items: &[T], name: impl Fn(&T) -> &'static str) -> String {
    items.iter().map(name).collect::<Vec<_>>().join(";")
}

fn single_spec(args: &SingleArgs) -> RunSpec {
    RunSpec {
        gate: args.gate.into(),
        mode: args.mode.into(),
        hidden: args.hidden,
        run_index: 0,
        seed: args.common.seed,
        n_inputs: args.common.inputs,
        passes: args.common.passes as usize,
        assoc: args.common.assoc.into(),
        perm: args.common.perm.into(),
    }
}

fn single_params(command: &str, spec: &RunSpec, common: &CommonArgs) -> Vec<(&'static str, String)> {
    let mut rows = vec![
        ("command", command.to_string()),
        ("gate", spec.gate.name().into()),
        ("hidden", spec.hidden.to_string()),
        ("mode", spec.mode.name().into()),
    ];
    rows.extend(common_params(common));
    rows
}

fn report_diagnostics(d: argnn_core::dynamics::Diagnostics) {
    if d.solver_failures > 0 || d.association_fallbacks > 0 {
        eprintln!(
            "argnn: {} of {} behaviors skipped pruning after an eigensolver failure; {} used index association fallback",
            d.solver_failures, d.behaviors, d.association_fallbacks
        );
    }
}

fn train(args: &SingleArgs) -> Result<()> {
    let out = Output::create(&args.common.out)?;
    let spec = single_spec(args);
    let outcome = run_capacity(&spec);
    report_diagnostics(outcome.diagnostics);
    out.params(&single_params("train", &spec, &args.common))?;
    out.write("train_log.csv", |w| formats::write_train_log(w, &outcome.log))?;
    out.write("prune_events.csv", |w| formats::write_prune_events(w, &outcome.events))?;
    out.write("graph.csv", |w| formats::write_graph(w, &outcome.graph))?;
    out.write("results.csv", |w| formats::write_results(w, &[outcome.record]))?;
    Ok(())
}

fn trace(args: &SingleArgs) -> Result<()> {
    let out = Output::create(&args.common.out)?;
    let spec = single_spec(args);
    let (rows, outcome) = run_eigen_trace(&spec);
    report_diagnostics(outcome.diagnostics);
    out.params(&single_params("trace", &spec, &args.common))?;
    out.write("eigentrace.csv", |w| formats::write_eigentrace(w, &rows))?;
    out.write("prune_events.csv", |w| formats::write_prune_events(w, &outcome.events))?;
    Ok(())
}

fn capacity(args: &CapacityArgs) -> Result<()> {
    let out = Output::create(&args.common.out)?;
    let hidden_counts: Vec<usize> = match args.hidden {
        Some(h) => vec![h],
        None => (args.hidden_range.0..=args.hidden_range.1).collect(),
    };
    let cfg = ExperimentConfig {
        gates: args.gate.map_or(Gate::ALL.to_vec(), |g| vec![g.into()]),
        hidden_counts,
        modes: args.mode.map_or(PruneMode::ALL.to_vec(), |m| vec![m.into()]),
        n_inputs: args.common.inputs,
        passes: args.common.passes as usize,
        runs: args.runs as usize,
        base_seed: args.common.seed,
        assoc: args.common.assoc.into(),
        perm: args.common.perm.into(),
    };
    let results = harness::capacity(&cfg, args.common.jobs as usize);
    report_diagnostics(results.diagnostics);

    let mut params = vec![
        ("command", "capacity".to_string()),
        ("gates", join(&sorted(&cfg.gates), |g| g.name())),
        ("hidden", cfg.hidden_counts.iter().map(usize::to_string).collect::<Vec<_>>().join(";")),
        ("modes", join(&sorted(&cfg.modes), |m| m.name())),
        ("runs", cfg.runs.to_string()),
    ];
    params.extend(common_params(&args.common));
    out.params(&params)?;
    out.write("results.csv", |w| formats::write_results(w, &results.records))?;
    out.write("summary.csv", |w| formats::write_summary(w, &results.summary))?;
    Ok(())
}

fn sorted<T: Ord + Copy>(items: &[T]) -> Vec<T> {
    let mut v = items.to_vec();
    v.sort();
    v.dedup();
    v
}

fn timing(args: &TimingArgs) -> Result<()> {
    let out = Output::create(&args.common.out)?;
    let modes = args
        .mode
        .map_or(vec![PruneMode::Directed, PruneMode::Weighted], |m| vec![m.into()]);
    let cfg = ExperimentConfig {
        gates: vec![args.gate.into()],
        hidden_counts: vec![args.hidden],
        modes,
        n_inputs: args.common.inputs,
        passes: args.common.passes as usize,
        runs: args.runs as usize,
        base_seed: args.common.seed,
        assoc: args.common.assoc.into(),
        perm: args.common.perm.into(),
    };
    let results = harness::timing(&cfg, args.interval as usize, args.common.jobs as usize);

    let mut params = vec![
        ("command", "timing".to_string()),
        ("gate", Gate::from(args.gate).name().to_string()),
        ("hidden", args.hidden.to_string()),
        ("modes", join(&sorted(&cfg.modes), |m| m.name())),
        ("runs", cfg.runs.to_string()),
        ("interval", args.interval.to_string()),
    ];
    params.extend(common_params(&args.common));
    out.params(&params)?;
    out.write("timing.csv", |w| formats::write_timing(w, &results.traces))?;
    out.write("timing_summary.csv", |w| formats::write_timing_summary(w, &results.summary))?;
    Ok(())
}

/// Executes a parsed command line.
pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Train(args) => train(args),
        Command::Capacity(args) => capacity(args),
        Command::Timing(args) => timing(args),
        Command::Trace(args) => trace(args),
    }
}

/// Parses `args` and runs the command. Usage errors exit with 2, runtime
/// failures (unwritable output and the like) with 1.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return ExitCode::from(if err.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("argnn: {err:#}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_parsing() {
        assert_eq!(parse_range("1..3"), Ok((1, 3)));
        assert_eq!(parse_range("2..2"), Ok((2, 2)));
        assert!(parse_range("3..1").is_err());
        assert!(parse_range("1-3").is_err());
        assert!(parse_range("a..3").is_err());
    }

    #[test]
    fn flag_defaults() {
        let cli = Cli::try_parse_from(["argnn", "capacity"]).unwrap();
        let Command::Capacity(args) = cli.command else { panic!() };
        assert_eq!(args.hidden_range, (1, 6));
        assert_eq!(args.runs, 10);
        assert_eq!(args.common.inputs, 2000);
        assert_eq!(args.common.passes, 10);
        assert_eq!(args.common.assoc, AssocArg::Index);
        assert_eq!(args.common.perm, PermArg::PerInput);

        let cli = Cli::try_parse_from(["argnn", "timing"]).unwrap();
        let Command::Timing(args) = cli.command else { panic!() };
        assert_eq!((args.runs, args.hidden, args.interval), (5, 2, 10));
    }

    #[test]
    fn invalid_flags_are_rejected() {
        assert!(Cli::try_parse_from(["argnn", "train", "--gate", "nand"]).is_err());
        assert!(Cli::try_parse_from(["argnn", "train", "--bogus"]).is_err());
        assert!(Cli::try_parse_from(["argnn", "capacity", "--hidden", "2", "--hidden-range", "1..3"]).is_err());
        assert!(Cli::try_parse_from(["argnn", "timing", "--passes", "0"]).is_err());
    }
}
