use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "nlapprox", version, about = "Sparse-approximation constants computed exactly at desk scale")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Where the dictionary comes from. At most one source may be given.
#[derive(Debug, Clone, Args)]
#[group(multiple = false)]
pub struct Source {
    /// Matrix file: header "m N" then m rows of N numbers.
    #[arg(long, value_name = "PATH")]
    pub matrix: Option<PathBuf>,
    /// Dirac basis of R^M plus the normalized constant vector.
    #[arg(long, value_name = "M")]
    pub dirac_dc: Option<usize>,
    /// Dirac basis of R^N plus the geometric atom (a, a^2, ..., a^N).
    #[arg(long, value_name = "N,A", value_parser = parse_dirac_geo)]
    pub dirac_geo: Option<(usize, f64)>,
    /// M×N matrix with i.i.d. N(0, 1/M) entries (see --seed).
    #[arg(long, value_name = "M,N", value_parser = parse_pair)]
    pub gaussian: Option<(usize, usize)>,
    /// Whitespace-separated null vector z; the dictionary has kernel span{z}.
    #[arg(long, value_name = "PATH")]
    pub null_vector: Option<PathBuf>,
}

/// Flags shared by every subcommand. Unset values fall back to the
/// per-command defaults listed in the README.
#[derive(Debug, Clone, Args)]
pub struct Common {
    #[command(flatten)]
    pub source: Source,
    /// Base seed for Gaussian dictionaries and randomized trials.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Exponent τ of the ℓ^τ quasi-norm (default depends on the command).
    #[arg(long)]
    pub tau: Option<f64>,
    /// Perturbation size or tolerance parameter ε.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Largest sparsity level k.
    #[arg(long)]
    pub kmax: Option<usize>,
    /// Cap on the number of enumerated supports or patterns.
    #[arg(long)]
    pub cap: Option<f64>,
    /// Numerical tolerance (rank threshold, bisection width).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Number of random trials.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Signal f: comma-separated numbers, or a file of numbers.
    #[arg(long, allow_hyphen_values = true)]
    pub signal: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Frame bounds A, B and column-norm diagnostics.
    FrameBounds(Common),
    /// Orthonormal kernel basis.
    Nullspace(Common),
    /// Best k-term errors σ_0..σ_kmax of a signal.
    SigmaProfile(Common),
    /// Minimum ℓ^τ representation of a signal.
    LtauNorm(Common),
    /// K-functional K(f, t; ℓ^p(Φ), H).
    Kfunctional {
        #[command(flatten)]
        common: Common,
        /// Weight t > 0 of the sparsity term.
        #[arg(long)]
        t: f64,
        /// Exponent p ∈ (0, 1] or p = 2.
        #[arg(long, default_value_t = 1.0)]
        p: f64,
    },
    /// Discrete interpolation norm from dyadic K-functional samples.
    InterpNorm {
        #[command(flatten)]
        common: Common,
        /// Interpolation parameter θ ∈ (0, 1).
        #[arg(long, default_value_t = 0.5)]
        theta: f64,
        /// Outer sequence exponent q.
        #[arg(long, default_value_t = 2.0)]
        q: f64,
        /// Exponent p of the sparsity space.
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        /// Number of dyadic levels t = 2^{-j}.
        #[arg(long, default_value_t = 8)]
        levels: usize,
    },
    /// Empirical lower bound on the Bernstein constant per sparsity level.
    BernsteinReport(Common),
    /// Sufficient condition and C1 constant of a null vector.
    PropA(Common),
    /// One-dimensional kernel analysis: C2, the B_z sandwich, tail constant.
    PropB(Common),
    /// Block-plateau perturbation of a null vector and its growth witness.
    Example1 {
        #[command(flatten)]
        common: Common,
        /// Ratio of the default geometric null vector (a, a², ...).
        #[arg(long, default_value_t = 0.5)]
        a: f64,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        /// Plateau decay exponent, must exceed 1/p.
        #[arg(long, default_value_t = 2.0)]
        beta: f64,
        /// Block boundaries m₀ < m₁ < ….
        #[arg(long, value_delimiter = ',', default_value = "2,4,16,256")]
        blocks: Vec<usize>,
    },
    /// Exact (or sampled) RIP constants for k = 1..kmax.
    RipReport(Common),
    /// Probe the RIP-to-Bernstein inequality.
    VerifyRipBernstein {
        #[command(flatten)]
        common: Common,
        /// RIP slack κ ∈ (0, 1).
        #[arg(long, default_value_t = 0.5)]
        kappa: f64,
    },
    /// Redundancy constants t(R), γ(R), m(R) and the Gaussian Bernstein bound.
    GaussianConstants {
        #[command(flatten)]
        common: Common,
        /// Redundancy ratio R = N/M > 1 (default R₀).
        #[arg(long = "R", value_name = "R")]
        r: Option<f64>,
        /// Also evaluate the finite-dimensional bounds (and, with --trials,
        /// the Monte-Carlo check) at these sizes.
        #[arg(long, value_name = "M,N,K", value_delimiter = ',', num_args = 1)]
        dims: Option<Vec<usize>>,
    },
    /// γ(R) and friends over a logarithmic grid of R.
    GammaTable {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1.01)]
        r_min: f64,
        #[arg(long, default_value_t = 1e12)]
        r_max: f64,
        /// Number of grid points.
        #[arg(long, default_value_t = 25)]
        points: usize,
    },
    /// Largest ε for which ℓ¹-optimal sign patterns are near-best in ℓ^τ.
    NearbestEpsilon(Common),
    /// Observed ratio between the ℓ¹ minimizer and the best ℓ^τ representation.
    NearbestFactor(Common),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::FrameBounds(_) => "frame-bounds",
            Command::Nullspace(_) => "nullspace",
            Command::SigmaProfile(_) => "sigma-profile",
            Command::LtauNorm(_) => "ltau-norm",
            Command::Kfunctional { .. } => "kfunctional",
            Command::InterpNorm { .. } => "interp-norm",
            Command::BernsteinReport(_) => "bernstein-report",
            Command::PropA(_) => "prop-a",
            Command::PropB(_) => "prop-b",
            Command::Example1 { .. } => "example1",
            Command::RipReport(_) => "rip-report",
            Command::VerifyRipBernstein { .. } => "verify-rip-bernstein",
            Command::GaussianConstants { .. } => "gaussian-constants",
            Command::GammaTable { .. } => "gamma-table",
            Command::NearbestEpsilon(_) => "nearbest-epsilon",
            Command::NearbestFactor(_) => "nearbest-factor",
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::FrameBounds(c)
            | Command::Nullspace(c)
            | Command::SigmaProfile(c)
            | Command::LtauNorm(c)
            | Command::BernsteinReport(c)
            | Command::PropA(c)
            | Command::PropB(c)
            | Command::RipReport(c)
            | Command::NearbestEpsilon(c)
            | Command::NearbestFactor(c) => c,
            Command::Kfunctional { common, .. }
            | Command::InterpNorm { common, .. }
            | Command::Example1 { common, .. }
            | Command::VerifyRipBernstein { common, .. }
            | Command::GaussianConstants { common, .. }
            | Command::GammaTable { common, .. } => common,
        }
    }
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected two comma-separated integers")?;
    Ok((
        a.trim().parse().map_err(|e| format!("{a}: {e}"))?,
        b.trim().parse().map_err(|e| format!("{b}: {e}"))?,
    ))
}

fn parse_dirac_geo(s: &str) -> Result<(usize, f64), String> {
    let (n, a) = s.split_once(',').ok_or("expected N,A")?;
    Ok((
        n.trim().parse().map_err(|e| format!("{n}: {e}"))?,
        a.trim().parse().map_err(|e| format!("{a}: {e}"))?,
    ))
}
