//! `ifm`: run and sweep interaction-free measurement protocols.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage error, 3 parameter outside
//! the physical domain.

mod args;
mod report;

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use ifm_core::protocols::{ParamKind, Registry};
use ifm_core::sampler::sample;
use ifm_core::IfmError;
use rayon::prelude::*;

use args::{Cli, Command, Format, OutputArgs, RunArgs, SweepArgs};
use report::{NumberFormat, RunReport, SweepReport, SweepRow};

const DEFAULT_SEED: u64 = 1;
const PRECISION_VAR: &str = "IFM_PRECISION";

#[derive(Debug)]
enum CliError {
    Usage(String),
    Domain(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Domain(m) => write!(f, "domain error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<IfmError> for CliError {
    fn from(e: IfmError) -> Self {
        match e {
            IfmError::Config(m) => CliError::Usage(m),
            IfmError::Domain(m) => CliError::Domain(m),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn number_format() -> Result<NumberFormat, CliError> {
    match std::env::var(PRECISION_VAR) {
        Err(_) => Ok(NumberFormat::default()),
        Ok(s) => match s.parse::<usize>() {
            Ok(digits @ 1..=17) => Ok(NumberFormat { digits }),
            _ => Err(CliError::Usage(format!(
                "{PRECISION_VAR} must be an integer in 1..=17, got `{s}`"
            ))),
        },
    }
}

fn open_output(output: &OutputArgs) -> Result<Box<dyn Write>, CliError> {
    Ok(match &output.output {
        Some(path) => Box::new(BufWriter::new(create(path)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn create(path: &Path) -> Result<File, CliError> {
    File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write_json(mut out: Box<dyn Write>, value: &serde_json::Value) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| CliError::Io(e.to_string()))?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn lookup<'r>(
    registry: &'r Registry,
    name: &str,
) -> Result<&'r dyn ifm_core::protocols::Protocol, CliError> {
    registry.get(name).ok_or_else(|| {
        let known: Vec<_> = registry.names().collect();
        CliError::Usage(format!(
            "unknown protocol `{name}` (known: {})",
            known.join(", ")
        ))
    })
}

fn run(registry: &Registry, args: &RunArgs, nf: &NumberFormat) -> Result<(), CliError> {
    let protocol = lookup(registry, &args.protocol)?;
    let given = args.physics.params();
    registry.check_params(protocol.name(), &given)?;
    if args.seed.is_some() && args.trials == 0 {
        return Err(CliError::Usage("--seed requires --trials".into()));
    }
    let params = given.merged_over(&protocol.defaults());
    let evaluation = protocol.evaluate(&params)?;
    let sampled = if args.trials > 0 {
        let setup = protocol.setup(&params)?;
        let seed = args.seed.unwrap_or(DEFAULT_SEED);
        Some(sample(&setup.circuit, &setup.initial, args.trials, seed)?)
    } else {
        None
    };
    let report = RunReport {
        protocol: protocol.name(),
        params: &params,
        accepted: protocol.params(),
        evaluation: &evaluation,
        sample: sampled.as_ref(),
    };
    let out = open_output(&args.output)?;
    match args.output.format {
        Format::Csv => report.write_csv(out, nf)?,
        Format::Json => write_json(out, &report.to_json(nf))?,
    }
    Ok(())
}

fn sweep(registry: &Registry, args: &SweepArgs, nf: &NumberFormat) -> Result<(), CliError> {
    let protocol = lookup(registry, &args.protocol)?;
    let kind = ParamKind::from_name(&args.param)
        .ok_or_else(|| CliError::Usage(format!("unknown parameter `{}`", args.param)))?;
    registry.check_sweep(protocol.name(), kind)?;
    let given = args.physics.params();
    registry.check_params(protocol.name(), &given)?;
    if given.provided().contains(&kind) {
        return Err(CliError::Usage(format!(
            "{} is both swept and fixed",
            kind.flag()
        )));
    }
    let points = args.points();
    if points.is_empty() {
        return Err(CliError::Usage(
            "empty sweep: pass --values or --from/--to/--steps with steps >= 1".into(),
        ));
    }
    let base = given.merged_over(&protocol.defaults());
    let rows = points
        .par_iter()
        .map(|&value| {
            let mut params = base.clone();
            params.set_numeric(kind, value)?;
            Ok(SweepRow {
                value,
                evaluation: protocol.evaluate(&params)?,
            })
        })
        .collect::<Result<Vec<_>, IfmError>>()?;
    let report = SweepReport {
        protocol: protocol.name(),
        param: kind,
        rows: &rows,
    };
    let out = open_output(&args.output)?;
    match args.output.format {
        Format::Csv => report.write_csv(out, nf)?,
        Format::Json => write_json(out, &report.to_json(nf))?,
    }
    Ok(())
}

fn list(registry: &Registry) -> Result<(), CliError> {
    let mut out = io::stdout().lock();
    for p in registry.iter() {
        let flags: Vec<_> = p.params().iter().map(|k| k.flag()).collect();
        writeln!(out, "{:<12} {}", p.name(), p.description())?;
        if !flags.is_empty() {
            writeln!(out, "{:<12} accepts {}", "", flags.join(" "))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let registry = Registry::builtin();
    let result = number_format().and_then(|nf| match &cli.command {
        Command::Run(args) => run(&registry, args, &nf),
        Command::Sweep(args) => sweep(&registry, args, &nf),
        Command::List => list(&registry),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ifm: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
