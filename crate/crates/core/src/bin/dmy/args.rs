use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Construct and numerically check planar maps with contracting Jacobian
/// spectrum: Szlenk's map, G_a = F - a·Id and the squashed map f = H ∘ G_a.
///
/// Exit status: 0 all checks pass, 1 a check failed, 2 usage or parameter
/// error, 3 I/O error. DMY_THREADS caps the worker count (0 or unset = auto).
#[derive(Debug, Parser)]
#[command(name = "dmy", version)]
pub struct Cli {
    /// JSON file of flag values (an object keyed by long flag name, or a
    /// report with an embedded "config"); flags on the command line win.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample the Jacobian spectrum over a region and run spectral checks.
    Spectrum(SpectrumArgs),
    /// Iterate a map and write the orbit as CSV.
    Orbit(OrbitArgs),
    /// Newton search for a periodic orbit and its multipliers.
    Periodic(PeriodicArgs),
    /// Rasterize ω-limit classes over [-L, L]² as a binary PGM.
    Basin(BasinArgs),
    /// Build f = H ∘ G_a and run the full verification.
    Counterexample(CounterexampleArgs),
    /// Tabulate the radial profile phi as CSV.
    Phi(PhiArgs),
    /// Check whether a straight ray from the origin is invariant.
    Ray(RayArgs),
    /// Outer-ball contraction bound (S0, mu) with sampled verification.
    Dissipativity(DissipativityArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapKind {
    Linear,
    Szlenk,
    Ga,
    Counterexample,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct MapArgs {
    /// Which map to use.
    #[arg(long, value_enum, default_value = "szlenk")]
    pub map: MapKind,
    /// Row-major entries a,b,c,d of a linear map [[a, b], [c, d]].
    #[arg(long, default_value = "1,0,0,1", allow_hyphen_values = true)]
    pub matrix: String,
    /// Szlenk parameter k, in (1, 2/sqrt(3)); the counterexample needs k < 1.01614.
    #[arg(long, default_value_t = 1.01)]
    pub k: f64,
    /// Contraction shift a of G_a, in (0, 1).
    #[arg(long, default_value_t = 0.005)]
    pub a: f64,
    /// Initial slope budget for the counterexample's profile.
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct SpectrumArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub map: MapArgs,
    /// Sampling rectangle xmin:xmax:ymin:ymax.
    #[arg(long, default_value = "-30:30:-30:30", allow_hyphen_values = true)]
    pub region: String,
    /// Grid dimensions NxM (ignored when --random is given).
    #[arg(long, default_value = "201x201")]
    pub grid: String,
    /// Use N seeded uniform samples instead of a grid.
    #[arg(long, value_name = "N")]
    pub random: Option<usize>,
    /// Seed for --random.
    #[arg(long, default_value_t = 0)]
    pub rng_seed: u64,
    /// Checks: ball:RADIUS, interval:LO:HI (no real eigenvalue in [LO, HI)), real-free.
    #[arg(long, allow_hyphen_values = true)]
    pub check: Vec<String>,
    /// Report path (JSON); stdout when omitted.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct OrbitArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub map: MapArgs,
    /// Starting point x,y.
    #[arg(long, default_value = "10,0", allow_hyphen_values = true)]
    pub seed: String,
    #[arg(long, default_value_t = 8)]
    pub steps: usize,
    #[arg(long, default_value_t = 1e9)]
    pub escape_radius: f64,
    /// CSV path (columns step,x,y); stdout when omitted.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct PeriodicArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub map: MapArgs,
    #[arg(long, default_value_t = 4)]
    pub period: usize,
    /// Newton seed x,y.
    #[arg(long, default_value = "9.5,0.1", allow_hyphen_values = true)]
    pub seed: String,
    /// Closure residual tolerance.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 100)]
    pub max_steps: usize,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct OmegaArgs {
    #[arg(long, default_value_t = 10_000)]
    pub max_iterations: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub origin_tol: f64,
    #[arg(long, default_value_t = 1e9)]
    pub escape_radius: f64,
    /// Trailing iterates kept for cycle detection.
    #[arg(long, default_value_t = 64)]
    pub window: usize,
    /// Relative tolerance for two iterates to coincide.
    #[arg(long, default_value_t = 1e-7)]
    pub cycle_tol: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct BasinArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub map: MapArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub omega: OmegaArgs,
    /// Half-width L of the window [-L, L]².
    #[arg(long, default_value_t = 15.0)]
    pub half_width: f64,
    /// Raster size WxH.
    #[arg(long, default_value = "256x256")]
    pub resolution: String,
    /// PGM path.
    #[arg(long, default_value = "basin.pgm")]
    #[serde(skip)]
    pub out: PathBuf,
    /// Optional JSON summary (cell counts and config).
    #[arg(long)]
    #[serde(skip)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct CounterexampleArgs {
    #[arg(long, default_value_t = 1.01)]
    pub k: f64,
    #[arg(long, default_value_t = 0.005)]
    pub a: f64,
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
    /// Log-polar radii in the spectral sweep of f.
    #[arg(long, default_value_t = 1000)]
    pub sweep_radii: usize,
    #[arg(long, default_value_t = 96)]
    pub sweep_angles: usize,
    /// Log-spaced radii for the phi envelope check.
    #[arg(long, default_value_t = 10_000)]
    pub phi_samples: usize,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PhiArgs {
    /// Radius of the flat disc.
    #[arg(long = "R", default_value_t = 20.0)]
    #[serde(rename = "R")]
    pub inner_radius: f64,
    /// Norm bound; the floor is 1/(2C).
    #[arg(long = "C", default_value_t = 2.0)]
    #[serde(rename = "C")]
    pub norm_bound: f64,
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
    /// Number of log-spaced radii (a row for r = 0 is always added).
    #[arg(long, default_value_t = 50)]
    #[serde(rename = "log-samples")]
    pub log_samples: usize,
    #[arg(long, default_value_t = 1e-3)]
    #[serde(rename = "r-min")]
    pub r_min: f64,
    /// Largest radius; defaults to 10·r_tail.
    #[arg(long)]
    #[serde(rename = "r-max")]
    pub r_max: Option<f64>,
    /// CSV path (columns r,phi,phi_prime_times_r); stdout when omitted.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct RayArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub map: MapArgs,
    /// Direction of the ray in radians.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub angle: f64,
    #[arg(long, default_value_t = 100.0)]
    pub r_max: f64,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct DissipativityArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub map: MapArgs,
    /// Inner radius R, or "tail" for the counterexample's tail radius.
    #[arg(long = "R", default_value = "20")]
    #[serde(rename = "R")]
    pub radius: String,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}
