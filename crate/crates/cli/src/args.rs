use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use meson_eff::{Basis, Quasispin, TimePolicy};

use crate::commands::ScanVar;
use crate::config::{ConfigLayer, GridSpec, SystemSpec};
use crate::parse::{self, Figure, ObservableSpec, ParseError};

#[derive(Parser, Debug)]
#[command(
    name = "meson-eff",
    version,
    about = "Effective observables, entropic bounds and Bell witnesses for neutral mesons"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Default, Clone)]
pub struct GlobalArgs {
    /// Preset: kaon, bmeson, stable, equal-width.
    #[arg(long, global = true)]
    pub system: Option<String>,
    #[arg(long, global = true)]
    pub gamma_s: Option<f64>,
    #[arg(long, global = true)]
    pub gamma_l: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    #[arg(long, global = true)]
    pub t_min: Option<f64>,
    #[arg(long, global = true)]
    pub t_max: Option<f64>,
    /// Number of grid points, both ends included.
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    /// dm or tau-s; applies to the grid, observable times and the t column.
    #[arg(long, global = true)]
    pub time_unit: Option<String>,
    /// Decimal or 0x-prefixed hexadecimal.
    #[arg(long, global = true, value_parser = parse_seed)]
    pub seed: Option<u64>,
    /// Write CSV output here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

impl GlobalArgs {
    pub fn layer(&self) -> ConfigLayer {
        ConfigLayer {
            system: self.system.clone().map(SystemSpec::Preset),
            gamma_s: self.gamma_s,
            gamma_l: self.gamma_l,
            delta: self.delta,
            time_unit: self.time_unit.clone(),
            grid: GridSpec {
                t_min: self.t_min,
                t_max: self.t_max,
                steps: self.steps,
            },
            output_path: self.out.clone(),
            seed: self.seed,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the decay widths, delta and unit conversions.
    Constants,
    /// Entropic uncertainty bound along the time grid (CSV).
    Uncertainty {
        /// Figure preset: 1a, 1b, 2a-2d, 3a, 3b.
        #[arg(long, value_parser = parse_figure)]
        fig: Option<Figure>,
        /// First observable "alpha,phi,t"; angles accept pi, pi/2, 3pi/4.
        #[arg(long, value_parser = parse_observable)]
        obs1: Option<ObservableSpec>,
        /// Second observable "alpha,phi,t".
        #[arg(long, value_parser = parse_observable)]
        obs2: Option<ObservableSpec>,
        /// Which observable's time follows the grid: first, second or both.
        #[arg(long, value_parser = parse_scan, default_value = "second")]
        scan: ScanVar,
        /// Use CP-violating eigenvectors, reading quasispins in this basis.
        #[arg(long, value_parser = parse_basis)]
        cp_basis: Option<Basis>,
    },
    /// Misidentification and complementary times, and the equal-time delta.
    Times,
    /// Bell witness eigenvalues along the time grid (CSV), or the CP test.
    Bell {
        /// Figure preset: 4a, 4b, 4c, 5a, 5b.
        #[arg(long, value_parser = parse_figure)]
        fig: Option<Figure>,
        /// Time policy: a (all equal), b (alternating-1), c (alternating-2).
        #[arg(long, value_parser = parse_policy)]
        policy: Option<TimePolicy>,
        /// Quasispin "alpha,phi" for n; all four default to K0bar.
        #[arg(long, value_parser = parse_quasispin)]
        n: Option<Quasispin>,
        #[arg(long, value_parser = parse_quasispin)]
        m: Option<Quasispin>,
        #[arg(long, value_parser = parse_quasispin)]
        n_prime: Option<Quasispin>,
        #[arg(long, value_parser = parse_quasispin)]
        m_prime: Option<Quasispin>,
        /// Build the observables with the CP-violating Bloch corrections.
        #[arg(long)]
        cp_mode: bool,
        /// Run the CP Bell test at the configured delta instead of a scan.
        #[arg(long)]
        cp_test: bool,
    },
    /// Cross-check closed forms against independent computations.
    Verify {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Also report the summed single-jump bipartite generator.
        #[arg(long)]
        literal_bipartite_generator: bool,
    },
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let t = s.trim();
    let r = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => t.parse(),
    };
    r.map_err(|e| format!("invalid seed {s:?}: {e}"))
}

fn stringify<T>(r: Result<T, ParseError>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn parse_figure(s: &str) -> Result<Figure, String> {
    stringify(s.parse())
}

fn parse_observable(s: &str) -> Result<ObservableSpec, String> {
    stringify(parse::parse_observable(s))
}

fn parse_quasispin(s: &str) -> Result<Quasispin, String> {
    stringify(parse::parse_quasispin(s))
}

fn parse_policy(s: &str) -> Result<TimePolicy, String> {
    stringify(parse::parse_policy(s))
}

fn parse_basis(s: &str) -> Result<Basis, String> {
    stringify(parse::parse_basis(s))
}

fn parse_scan(s: &str) -> Result<ScanVar, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "first" | "1" => Ok(ScanVar::First),
        "second" | "2" => Ok(ScanVar::Second),
        "both" => Ok(ScanVar::Both),
        _ => Err(format!("unknown scan variable {s:?}; expected first, second or both")),
    }
}
