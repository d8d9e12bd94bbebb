use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use eqtrap::models::jc::DEFAULT_TAIL_TOLERANCE;
use eqtrap::models::Cutoff;

use crate::CliError;

#[derive(Debug, Clone, Parser)]
#[command(name = "eqtrap", version, about = "Information-trapping and equilibration diagnostics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Jaynes–Cummings trapping measure vs detuning for several temperatures.
    Figure1(Figure1Args),
    /// Jaynes–Cummings trapping measure and its correlation bound vs detuning.
    Figure2(Figure2Args),
    /// Two-band model: trapping measures and master-equation rates on a γt grid.
    TwoBand(TwoBandArgs),
    /// Monte-Carlo check of the equilibration bound on random Hamiltonians.
    RandomBound(RandomBoundArgs),
    /// Run the built-in cross-checks; exits 3 if any fails.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Jc,
    TwoBand,
    ProductBasis,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; standard output if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

/// Photon-number cutoff as given on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NMax {
    Auto,
    Fixed(usize),
}

impl FromStr for NMax {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(NMax::Auto);
        }
        s.parse()
            .map(NMax::Fixed)
            .map_err(|_| format!("expected `auto` or a photon number, got `{s}`"))
    }
}

#[derive(Debug, Clone, Args)]
pub struct CutoffArgs {
    #[arg(long, default_value = "auto")]
    pub n_max: NMax,
    /// Neglected thermal mass allowed by the automatic cutoff.
    #[arg(long, default_value_t = DEFAULT_TAIL_TOLERANCE)]
    pub tol_tail: f64,
}

impl CutoffArgs {
    pub fn cutoff(&self) -> Cutoff {
        match self.n_max {
            NMax::Auto => Cutoff::Auto(self.tol_tail),
            NMax::Fixed(n) => Cutoff::Fixed(n),
        }
    }
}

/// Detuning grid `Δ/ω`, inclusive at both ends.
#[derive(Debug, Clone, Args)]
pub struct DeltaRange {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub delta_min: f64,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    pub delta_max: f64,
    #[arg(long, default_value_t = 101)]
    pub steps: usize,
}

impl DeltaRange {
    pub fn points(&self) -> Result<Vec<f64>, CliError> {
        linspace(self.delta_min, self.delta_max, self.steps, "Δ")
    }
}

pub(crate) fn linspace(min: f64, max: f64, steps: usize, what: &str) -> Result<Vec<f64>, CliError> {
    if !(min.is_finite() && max.is_finite()) {
        return Err(CliError::Config(format!("{what} range must be finite")));
    }
    if steps == 0 || min > max {
        return Err(CliError::Config(format!("empty {what} range [{min}, {max}] with {steps} steps")));
    }
    if steps == 1 {
        return Ok(vec![min]);
    }
    let h = (max - min) / (steps - 1) as f64;
    Ok((0..steps).map(|i| if i + 1 == steps { max } else { min + h * i as f64 }).collect())
}

#[derive(Debug, Clone, Args)]
pub struct Figure1Args {
    #[arg(long, value_enum, default_value_t = Model::Jc)]
    pub model: Model,
    /// Coupling `g/ω`.
    #[arg(long, default_value_t = 1.0)]
    pub g: f64,
    /// Inverse temperatures `βω`, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0.003,0.005,0.01")]
    pub beta_omega: Vec<f64>,
    #[command(flatten)]
    pub delta: DeltaRange,
    #[command(flatten)]
    pub cutoff: CutoffArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct Figure2Args {
    #[arg(long, value_enum, default_value_t = Model::Jc)]
    pub model: Model,
    #[arg(long, default_value_t = 1.0)]
    pub g: f64,
    #[arg(long, default_value_t = 0.01)]
    pub beta_omega: f64,
    #[command(flatten)]
    pub delta: DeltaRange,
    #[command(flatten)]
    pub cutoff: CutoffArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct TwoBandArgs {
    #[arg(long, default_value_t = 100)]
    pub n1: u64,
    #[arg(long, default_value_t = 100)]
    pub n2: u64,
    #[arg(long, default_value_t = 0.01)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.5)]
    pub band_width: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gap: f64,
    /// First point of the logarithmic `γt` grid.
    #[arg(long, default_value_t = 1e-3)]
    pub t_min: f64,
    #[arg(long, default_value_t = 1e2)]
    pub t_max: f64,
    #[arg(long, default_value_t = 51)]
    pub steps: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct RandomBoundArgs {
    #[arg(long, default_value_t = 2)]
    pub d_s: usize,
    #[arg(long, default_value_t = 20)]
    pub d_b: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sampled times per trial.
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
    /// Sampling window; defaults to 200 periods of the slowest level spacing.
    #[arg(long)]
    pub t_max: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_endpoints() {
        assert_eq!(linspace(0.0, 1.0, 3, "x").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(linspace(2.0, 2.0, 1, "x").unwrap(), vec![2.0]);
        assert!(linspace(1.0, 0.0, 3, "x").is_err());
        assert!(linspace(0.0, 1.0, 0, "x").is_err());
    }

    #[test]
    fn n_max_parsing() {
        assert_eq!("auto".parse::<NMax>(), Ok(NMax::Auto));
        assert_eq!("12".parse::<NMax>(), Ok(NMax::Fixed(12)));
        assert!("-3".parse::<NMax>().is_err());
    }
}
