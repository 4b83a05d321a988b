//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ifm_core::elements::ObjectKind;
use ifm_core::protocols::Params;
use ifm_core::Amplitude;

#[derive(Debug, Parser)]
#[command(
    name = "ifm",
    version,
    about = "Interaction-free measurement simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one protocol at a single parameter point.
    Run(RunArgs),
    /// Evaluate a protocol over a list or range of values for one parameter.
    Sweep(SweepArgs),
    /// List the registered protocols and the parameters each accepts.
    List,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Physical parameters. Each protocol accepts only a subset.
#[derive(Debug, Args)]
pub struct ProtocolArgs {
    /// Object in the probed arm.
    #[arg(long, value_parser = parse_object)]
    pub object: Option<ObjectKind>,
    /// Number of cavity bounces.
    #[arg(long = "N", visible_alias = "n")]
    pub bounces: Option<usize>,
    /// Mirror reflectivity, in [0, 1).
    #[arg(long = "R", visible_alias = "r", allow_negative_numbers = true)]
    pub reflectivity: Option<f64>,
    /// Round-trip detuning phase in radians.
    #[arg(long, allow_negative_numbers = true)]
    pub phi: Option<f64>,
    /// Complex transmittance: `re`, `re,im`, or `modulus@phase`.
    #[arg(long, value_parser = parse_complex, allow_negative_numbers = true)]
    pub t: Option<Amplitude>,
}

impl ProtocolArgs {
    pub fn params(&self) -> Params {
        Params {
            object: self.object,
            bounces: self.bounces,
            reflectivity: self.reflectivity,
            detuning: self.phi,
            transmittance: self.t,
        }
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    pub protocol: String,
    #[command(flatten)]
    pub physics: ProtocolArgs,
    /// Monte Carlo trials to draw; 0 reports the exact distribution only.
    #[arg(long, default_value_t = 0)]
    pub trials: u64,
    /// Sampler seed (requires --trials). Defaults to 1.
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub protocol: String,
    /// Parameter to vary: N, R, phi or t.
    #[arg(long)]
    pub param: String,
    /// Explicit sweep points.
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        conflicts_with_all = ["from", "to", "steps"]
    )]
    pub values: Option<Vec<f64>>,
    #[arg(long, requires_all = ["to", "steps"], allow_negative_numbers = true)]
    pub from: Option<f64>,
    #[arg(long, requires_all = ["from", "steps"], allow_negative_numbers = true)]
    pub to: Option<f64>,
    /// Number of evenly spaced points from --from to --to inclusive.
    #[arg(long, requires_all = ["from", "to"])]
    pub steps: Option<usize>,
    #[command(flatten)]
    pub physics: ProtocolArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

impl SweepArgs {
    pub fn points(&self) -> Vec<f64> {
        if let Some(values) = &self.values {
            return values.clone();
        }
        match (self.from, self.to, self.steps) {
            (Some(a), _, Some(1)) => vec![a],
            (Some(a), Some(b), Some(n)) => (0..n)
                .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
                .collect(),
            _ => Vec::new(),
        }
    }
}

fn parse_object(s: &str) -> Result<ObjectKind, String> {
    s.parse().map_err(|e: ifm_core::IfmError| e.to_string())
}

fn parse_complex(s: &str) -> Result<Amplitude, String> {
    let num = |x: &str| {
        x.trim()
            .parse::<f64>()
            .map_err(|_| format!("`{x}` is not a number"))
    };
    if let Some((m, p)) = s.split_once('@') {
        Ok(Amplitude::from_polar(num(m)?, num(p)?))
    } else if let Some((re, im)) = s.split_once(',') {
        Ok(Amplitude::new(num(re)?, num(im)?))
    } else {
        Ok(Amplitude::new(num(s)?, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("0.5").unwrap(), Amplitude::new(0.5, 0.0));
        assert_eq!(
            parse_complex("0.5,-0.25").unwrap(),
            Amplitude::new(0.5, -0.25)
        );
        let polar = parse_complex("2@0").unwrap();
        assert!((polar - Amplitude::new(2.0, 0.0)).norm() < 1e-15);
        assert!(parse_complex("x").is_err());
    }

    #[test]
    fn range_points_are_inclusive() {
        let cli = Cli::try_parse_from([
            "ifm", "sweep", "zeno", "--param", "N", "--from", "10", "--to", "30", "--steps", "3",
        ])
        .unwrap();
        let Command::Sweep(s) = cli.command else {
            panic!("expected sweep")
        };
        assert_eq!(s.points(), vec![10.0, 20.0, 30.0]);
    }
}
