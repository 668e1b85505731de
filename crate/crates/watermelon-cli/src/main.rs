//! `watermelon`: compute, verify and draw from the command line.
//!
//! Exit codes: 0 success, 2 invalid input, 3 a failed identity, 1 anything
//! else.

mod commands;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "watermelon",
    version,
    about = "Schur-function identities, vicious walkers and XX0 correlators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: Global,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Seed for random test points.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output directory for files.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Cap on the number of mode subsets in spectral sums.
    #[arg(long, global = true, default_value_t = watermelon::xx0::DEFAULT_BUDGET)]
    pub budget: u128,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Boxed plane-partition generating function Z_q(L, N, K).
    Zq { l: usize, n: usize, k: usize },
    /// MacMahon count A(L, N, K), optionally checked by enumeration.
    Count {
        l: usize,
        n: usize,
        k: usize,
        #[arg(long)]
        brute: bool,
    },
    /// Schur function at a principal specialization or rational points.
    Schur {
        /// Partition, comma separated.
        #[arg(long, value_delimiter = ',')]
        lambda: Vec<usize>,
        /// Number of variables.
        #[arg(long = "N")]
        n: Option<usize>,
        /// Specialization when no points are given.
        #[arg(long, value_enum, default_value_t = Spec::QN)]
        at: Spec,
        /// Rational points such as 1/2,3,5/7.
        #[arg(long, value_delimiter = ',')]
        points: Vec<String>,
    },
    /// Check an identity over a parameter range.
    Verify {
        /// One of macmahon, cauchy-binet, theorem1, theorem2, theorem3,
        /// theorem4, props, random-turns, bottleneck, amplitude, spin-chain,
        /// form-factors, all.
        identity: String,
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long = "L")]
        l: Option<usize>,
        #[arg(long = "M")]
        m: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        ell: Option<usize>,
        /// Reduced ranges.
        #[arg(long)]
        small: bool,
        /// Print every case.
        #[arg(long)]
        verbose: bool,
    },
    /// Watermelon generating function and count.
    Watermelon(WatermelonArgs),
    /// Random-turns walker counts.
    Walks {
        #[arg(long, value_delimiter = ',')]
        from: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        to: Vec<usize>,
        #[arg(long = "K")]
        k: usize,
        #[arg(long = "M")]
        m: usize,
        /// Second leg for a bottleneck count.
        #[arg(long = "K2")]
        k2: Option<usize>,
        /// Sites `0..m` forbidden between the legs.
        #[arg(long = "bottleneck", default_value_t = 0)]
        bottleneck: usize,
    },
    /// Transition amplitude <j| e^{-tH} |l>.
    Amplitude {
        #[arg(long, value_delimiter = ',')]
        from: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        to: Vec<usize>,
        #[arg(long)]
        t: f64,
        #[arg(long = "M")]
        m: usize,
        #[arg(long, value_enum, default_value_t = AmpMethod::Det)]
        method: AmpMethod,
    },
    /// Persistence of the domain wall.
    Persistence {
        #[arg(long = "N")]
        n: usize,
        #[arg(long = "M")]
        m: usize,
        /// Domain-wall size.
        #[arg(long = "n", default_value_t = 0)]
        wall: usize,
        #[arg(long)]
        t: f64,
    },
    /// Dynamical auto-correlation with a projector.
    Autocorr {
        #[arg(long = "N")]
        n: usize,
        #[arg(long = "M")]
        m: usize,
        #[arg(long = "n", default_value_t = 0)]
        wall: usize,
        /// Projector bound.
        #[arg(long = "m", default_value_t = 0)]
        mproj: usize,
        #[arg(long)]
        t1: f64,
        #[arg(long)]
        t2: f64,
    },
    /// Predicted against fitted large-t power laws.
    Asymptotics {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long = "N")]
        n: usize,
        #[arg(long = "M")]
        m: usize,
        #[arg(long = "n", default_value_t = 0)]
        wall: usize,
        #[arg(long = "m", default_value_t = 0)]
        mproj: usize,
        #[arg(long)]
        tmin: Option<f64>,
        #[arg(long)]
        tmax: Option<f64>,
        #[arg(long, default_value_t = 12)]
        points: usize,
    },
    /// Write SVG pictures of nests.
    Draw(DrawArgs),
}

#[derive(Args, Debug, Clone)]
pub struct WatermelonArgs {
    #[arg(long = "N")]
    pub n: usize,
    /// Defaults to N.
    #[arg(long = "L")]
    pub l: Option<usize>,
    #[arg(long = "Mcal")]
    pub calm: usize,
    /// Lower bound n of the gluing partition.
    #[arg(long, default_value_t = 0)]
    pub lower: usize,
    #[arg(long, default_value_t = 0)]
    pub delta: usize,
}

#[derive(Args, Debug, Clone)]
pub struct DrawArgs {
    #[arg(value_enum)]
    pub what: DrawKind,
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long = "L")]
    pub l: Option<usize>,
    #[arg(long = "Mcal")]
    pub calm: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub lower: usize,
    #[arg(long, default_value_t = 0)]
    pub delta: usize,
    #[arg(long, default_value_t = 0)]
    pub k: usize,
    #[arg(long, value_delimiter = ',')]
    pub lambda: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    pub from: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    pub to: Vec<usize>,
    #[arg(long = "K")]
    pub steps: Option<usize>,
    #[arg(long = "M")]
    pub m: Option<usize>,
    /// Render the whole family instead of one member.
    #[arg(long)]
    pub all: bool,
    /// Member to render (1-based) without --all.
    #[arg(long, default_value_t = 1)]
    pub index: usize,
    /// SceneSpec JSON file for `draw scene`.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub prefix: Option<String>,
    #[arg(long, default_value_t = 24)]
    pub cell_px: usize,
    #[arg(long)]
    pub no_labels: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum DrawKind {
    Star,
    ConjStar,
    Watermelon,
    Walks,
    Figure2,
    Scene,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Spec {
    #[value(name = "q_n")]
    QN,
    #[value(name = "q_n_over_q")]
    QNOverQ,
    #[value(name = "inv_q_n")]
    InvQN,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum AmpMethod {
    Det,
    Spectral,
    Series,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Amplitude,
    Persistence,
    TwoTime,
    Autocorr,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.global.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(2);
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }
    match commands::dispatch(&cli) {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
